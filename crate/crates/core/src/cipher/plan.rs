use serde::{Deserialize, Serialize};

use super::{check_round, PermDirection, PoolOrder};
use crate::error::{Error, Result};
use crate::geometry::{Point, PointCloud};
use crate::keystream::{derive_permutation, Keystream};

/// Index of coordinate `axis` of pooled point `point` (plaintext points
/// `0..n`, anchors `n..2n`).
fn slot(order: PoolOrder, n: usize, dim: usize, point: usize, axis: usize) -> usize {
    match order {
        PoolOrder::PointMajor => point * dim + axis,
        PoolOrder::AxisMajor => {
            let (half, local) = if point < n { (0, point) } else { (1, point - n) };
            half * n * dim + axis * n + local
        }
    }
}

pub(crate) fn layout<T: Clone>(points: &[Vec<T>], n: usize, dim: usize, order: PoolOrder) -> Vec<T> {
    let mut cells: Vec<Option<T>> = vec![None; 2 * n * dim];
    for (pi, p) in points.iter().enumerate() {
        for (axis, v) in p.iter().enumerate() {
            cells[slot(order, n, dim, pi, axis)] = Some(v.clone());
        }
    }
    cells.into_iter().map(|c| c.expect("layout covers the pool")).collect()
}

pub(crate) fn delayout<T: Clone>(pool: &[T], n: usize, dim: usize, order: PoolOrder) -> Vec<Vec<T>> {
    (0..2 * n)
        .map(|pi| (0..dim).map(|axis| pool[slot(order, n, dim, pi, axis)].clone()).collect())
        .collect()
}

fn pool_shape(pool_len: usize, dim: usize) -> Result<usize> {
    if pool_len == 0 || !pool_len.is_multiple_of(2 * dim) {
        return Err(Error::SizeMismatch(format!("pool of {pool_len} coordinates does not split into {dim}-D points")));
    }
    Ok(pool_len / (2 * dim))
}

/// Flat coordinate pool: plaintext points first, then anchors. Repeated
/// coordinates keep their multiplicity.
pub fn build_pool(plain: &PointCloud, anchors: &PointCloud, order: PoolOrder) -> Result<Vec<f64>> {
    if plain.len() != anchors.len() {
        return Err(Error::SizeMismatch(format!("{} plaintext points vs {} anchors", plain.len(), anchors.len())));
    }
    if plain.dim() != anchors.dim() {
        return Err(Error::DimensionMismatch { expected: plain.dim(), found: anchors.dim() });
    }
    let points: Vec<Vec<f64>> = plain
        .points()
        .iter()
        .chain(anchors.points())
        .map(|p| p.coords().to_vec())
        .collect();
    Ok(layout(&points, plain.len(), plain.dim(), order))
}

/// Splits a pool laid out like [`build_pool`] into its first and second
/// halves of points.
pub fn chunk_pool(pool: &[f64], dim: usize, order: PoolOrder) -> Result<(Vec<Point>, Vec<Point>)> {
    let n = pool_shape(pool.len(), dim)?;
    let mut points: Vec<Point> = delayout(pool, n, dim, order).into_iter().map(Point::new).collect();
    let second = points.split_off(n);
    Ok((points, second))
}

/// Inverse of [`build_pool`].
pub fn unbuild_pool(pool: &[f64], dim: usize, order: PoolOrder) -> Result<(PointCloud, PointCloud)> {
    let (plain, anchors) = chunk_pool(pool, dim, order)?;
    Ok((PointCloud::new(plain)?, PointCloud::new(anchors)?))
}

/// Permutes the pool and re-chunks it into `(P', O')`.
pub fn shuffle(pool: &[f64], plan: &PermutationPlan, dim: usize, order: PoolOrder) -> Result<(Vec<Point>, Vec<Point>)> {
    let permuted = plan.apply(pool)?;
    chunk_pool(&permuted, dim, order)
}

/// Recovers the pool from `(P', O')`.
pub fn unshuffle(p_prime: &[Point], o_prime: &[Point], plan: &PermutationPlan, order: PoolOrder) -> Result<Vec<f64>> {
    let n = p_prime.len();
    if o_prime.len() != n || n == 0 {
        return Err(Error::SizeMismatch(format!("{} P' points vs {} O' points", n, o_prime.len())));
    }
    let dim = p_prime[0].dim();
    let points: Vec<Vec<f64>> = p_prime.iter().chain(o_prime).map(|p| p.coords().to_vec()).collect();
    if points.iter().any(|p| p.len() != dim) {
        return Err(Error::DimensionMismatch { expected: dim, found: 0 });
    }
    plan.invert(&layout(&points, n, dim, order))
}

/// Contiguous partition of the pool: one block when `n <= 8`, otherwise
/// `floor(n / 8)` blocks with the remainder folded into the last one.
pub fn standard_blocks(pool_len: usize, n: usize) -> Vec<(usize, usize)> {
    let count = if n > 8 { n / 8 } else { 1 };
    let size = pool_len / count;
    (0..count)
        .map(|b| {
            let start = b * size;
            let len = if b + 1 == count { pool_len - start } else { size };
            (start, len)
        })
        .collect()
}

/// A permutation acting on the pool range `start..start + perm.len()`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Block {
    pub start: usize,
    pub perm: Vec<usize>,
}

fn check_bijection(perm: &[usize]) -> Result<()> {
    let mut seen = vec![false; perm.len()];
    for &p in perm {
        if p >= perm.len() || seen[p] {
            return Err(Error::InvalidPlan(format!("{perm:?} is not a permutation of 0..{}", perm.len())));
        }
        seen[p] = true;
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "PlanRecord", into = "PlanRecord")]
pub struct PermutationPlan {
    pool_len: usize,
    blocks: Vec<Block>,
    direction: PermDirection,
}

/// Serialized form: blocks are consecutive and permutations 1-based.
#[derive(Serialize, Deserialize)]
struct PlanRecord {
    pool_len: usize,
    direction: PermDirection,
    blocks: Vec<Vec<usize>>,
}

impl TryFrom<PlanRecord> for PermutationPlan {
    type Error = Error;

    fn try_from(rec: PlanRecord) -> Result<Self> {
        let mut start = 0;
        let mut blocks = Vec::with_capacity(rec.blocks.len());
        for perm in rec.blocks {
            let perm = one_based_to_zero(&perm)?;
            let len = perm.len();
            blocks.push(Block { start, perm });
            start += len;
        }
        PermutationPlan::from_blocks(rec.pool_len, blocks, rec.direction)
    }
}

impl From<PermutationPlan> for PlanRecord {
    fn from(plan: PermutationPlan) -> Self {
        PlanRecord {
            pool_len: plan.pool_len,
            direction: plan.direction,
            blocks: plan.blocks.iter().map(|b| b.perm.iter().map(|p| p + 1).collect()).collect(),
        }
    }
}

/// Converts a permutation written with entries `1..=len`.
pub fn one_based_to_zero(perm: &[usize]) -> Result<Vec<usize>> {
    perm.iter()
        .map(|&p| p.checked_sub(1).ok_or_else(|| Error::InvalidPlan("permutation entries are 1-based".into())))
        .collect()
}

impl PermutationPlan {
    pub fn identity(pool_len: usize, direction: PermDirection) -> Self {
        Self { pool_len, blocks: vec![Block { start: 0, perm: (0..pool_len).collect() }], direction }
    }

    /// Blocks must tile `0..pool_len` in order.
    pub fn from_blocks(pool_len: usize, blocks: Vec<Block>, direction: PermDirection) -> Result<Self> {
        let mut cursor = 0;
        for b in &blocks {
            if b.start != cursor || b.perm.is_empty() {
                return Err(Error::InvalidPlan("blocks must tile the pool contiguously".into()));
            }
            check_bijection(&b.perm)?;
            cursor += b.perm.len();
        }
        if cursor != pool_len {
            return Err(Error::InvalidPlan(format!("blocks cover {cursor} of {pool_len} pool entries")));
        }
        Ok(Self { pool_len, blocks, direction })
    }

    /// Key-derived plan over the standard partition. Round 2 reads the
    /// stream right after the values consumed by round 1.
    pub fn derived(ks: &Keystream, n: usize, dim: usize, round: usize, direction: PermDirection) -> Result<Self> {
        check_round(round)?;
        let pool_len = 2 * dim * n;
        let base = (round - 1) * pool_len;
        let blocks = standard_blocks(pool_len, n)
            .into_iter()
            .map(|(start, len)| Block { start, perm: derive_permutation(ks, len, base + start) })
            .collect();
        Self::from_blocks(pool_len, blocks, direction)
    }

    /// User-supplied 0-based permutations. A single permutation spanning
    /// the whole pool is accepted for any `n`; otherwise the permutations
    /// must match [`standard_blocks`].
    pub fn explicit(perms: &[Vec<usize>], n: usize, dim: usize, direction: PermDirection) -> Result<Self> {
        let pool_len = 2 * dim * n;
        if perms.len() == 1 && perms[0].len() == pool_len {
            return Self::from_blocks(pool_len, vec![Block { start: 0, perm: perms[0].clone() }], direction);
        }
        let layout = standard_blocks(pool_len, n);
        if layout.len() != perms.len() || layout.iter().zip(perms).any(|((_, len), p)| *len != p.len()) {
            let sizes: Vec<usize> = layout.iter().map(|b| b.1).collect();
            return Err(Error::InvalidPlan(format!("expected blocks of sizes {sizes:?}")));
        }
        let blocks = layout.into_iter().zip(perms).map(|((start, _), p)| Block { start, perm: p.clone() }).collect();
        Self::from_blocks(pool_len, blocks, direction)
    }

    pub fn pool_len(&self) -> usize {
        self.pool_len
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn direction(&self) -> PermDirection {
        self.direction
    }

    /// `src[i]` is the pool index that lands in output slot `i`.
    pub fn source_indices(&self) -> Vec<usize> {
        let mut src = vec![0; self.pool_len];
        for b in &self.blocks {
            for (i, &p) in b.perm.iter().enumerate() {
                match self.direction {
                    PermDirection::Gather => src[b.start + i] = b.start + p,
                    PermDirection::Scatter => src[b.start + p] = b.start + i,
                }
            }
        }
        src
    }

    pub fn apply<T: Clone>(&self, pool: &[T]) -> Result<Vec<T>> {
        self.check_len(pool.len())?;
        Ok(self.source_indices().into_iter().map(|s| pool[s].clone()).collect())
    }

    pub fn invert<T: Clone>(&self, shuffled: &[T]) -> Result<Vec<T>> {
        self.check_len(shuffled.len())?;
        let mut out: Vec<Option<T>> = vec![None; self.pool_len];
        for (i, s) in self.source_indices().into_iter().enumerate() {
            out[s] = Some(shuffled[i].clone());
        }
        Ok(out.into_iter().map(|v| v.expect("plan is a bijection")).collect())
    }

    /// True when every `P'` slot draws a plaintext coordinate, which is
    /// the case in which decryption has a unique answer.
    pub fn keeps_plaintext_in_p_slots(&self) -> bool {
        let half = self.pool_len / 2;
        self.source_indices().iter().take(half).all(|&s| s < half)
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.pool_len {
            return Err(Error::InvalidPlan(format!("plan covers {} entries, pool has {len}", self.pool_len)));
        }
        Ok(())
    }
}
