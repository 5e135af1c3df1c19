//! Independent oracles and fixed scenarios shared by the integration
//! tests and the acceptance runner. Nothing here calls into the library's
//! geometry or linear algebra; the oracles are written from scratch.

#![allow(dead_code, clippy::needless_range_loop)]

use std::ops::{Add, Mul, Neg, Sub};

use geostab::cipher::{
    CipherParams, Conventions, DecryptSetup, KeyMaterial, PermDirection, PermutationSource, PoolOrder,
};
use geostab::geometry::{BoundingSphere, Composition, Handedness, Point, PointCloud, RotationConvention};
use geostab::keystream::{ChaoticKey, Keystream};
use num_rational::BigRational;
use num_traits::Zero;

// ---------------------------------------------------------------------------
// Chebyshev polynomials in closed form

pub fn chebyshev_closed(k: f64, degree: u32) -> f64 {
    match degree {
        3 => 4.0 * k.powi(3) - 3.0 * k,
        4 => 8.0 * k.powi(4) - 8.0 * k * k + 1.0,
        5 => 16.0 * k.powi(5) - 20.0 * k.powi(3) + 5.0 * k,
        _ => panic!("no closed form for degree {degree}"),
    }
}

// ---------------------------------------------------------------------------
// Brute-force minimal enclosing ball

fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col].abs() < 1e-12 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    Some(x)
}

/// Center of the smallest sphere through all of `support`, within their
/// affine hull.
fn circumcenter(support: &[&[f64]]) -> Option<Vec<f64>> {
    let p0 = support[0];
    let d = p0.len();
    if support.len() == 1 {
        return Some(p0.to_vec());
    }
    let v: Vec<Vec<f64>> = support[1..].iter().map(|p| (0..d).map(|i| p[i] - p0[i]).collect()).collect();
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let m = v.len();
    let gram: Vec<Vec<f64>> = (0..m).map(|i| (0..m).map(|j| 2.0 * dot(&v[i], &v[j])).collect()).collect();
    let rhs: Vec<f64> = v.iter().map(|vi| dot(vi, vi)).collect();
    let lambda = solve_dense(gram, rhs)?;
    Some((0..d).map(|i| p0[i] + (0..m).map(|k| lambda[k] * v[k][i]).sum::<f64>()).collect())
}

/// Smallest ball over every support set of size 1..=d+1 that covers all
/// points.
pub fn brute_force_meb(points: &[Vec<f64>]) -> (Vec<f64>, f64) {
    let n = points.len();
    let d = points[0].len();
    let dist = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
    let mut best: Option<(Vec<f64>, f64)> = None;
    for mask in 1u32..(1 << n) {
        let size = mask.count_ones() as usize;
        if size > d + 1 {
            continue;
        }
        let support: Vec<&[f64]> = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| points[i].as_slice()).collect();
        let Some(center) = circumcenter(&support) else { continue };
        let radius = support.iter().map(|p| dist(p, &center)).fold(0.0, f64::max);
        let covers = points.iter().all(|p| dist(p, &center) <= radius * (1.0 + 1e-10) + 1e-10);
        if covers && best.as_ref().is_none_or(|b| radius < b.1) {
            best = Some((center, radius));
        }
    }
    best.expect("some support set always covers")
}

// ---------------------------------------------------------------------------
// Exact arithmetic in Q(sqrt 2, sqrt 3), basis (1, sqrt 2, sqrt 3, sqrt 6)

#[derive(Clone, Debug, PartialEq)]
pub struct Surd([BigRational; 4]);

pub fn q(num: i64, den: i64) -> BigRational {
    BigRational::new(num.into(), den.into())
}

impl Surd {
    pub fn rational(r: BigRational) -> Self {
        Surd([r, BigRational::zero(), BigRational::zero(), BigRational::zero()])
    }

    pub fn int(n: i64) -> Self {
        Self::rational(q(n, 1))
    }

    pub fn new(a: BigRational, b: BigRational, c: BigRational, d: BigRational) -> Self {
        Surd([a, b, c, d])
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|x| x.is_zero())
    }

    pub fn to_f64(&self) -> f64 {
        let f = |r: &BigRational| {
            let n: f64 = r.numer().to_string().parse().unwrap();
            let d: f64 = r.denom().to_string().parse().unwrap();
            n / d
        };
        f(&self.0[0]) + f(&self.0[1]) * 2f64.sqrt() + f(&self.0[2]) * 3f64.sqrt() + f(&self.0[3]) * 6f64.sqrt()
    }

    // a + b sqrt3 -> a - b sqrt3, with a, b in Q(sqrt 2)
    fn conj3(&self) -> Self {
        let [a, b, c, d] = self.0.clone();
        Surd([a, b, -c, -d])
    }

    fn conj2(&self) -> Self {
        let [a, b, c, d] = self.0.clone();
        Surd([a, -b, c, -d])
    }

    pub fn inverse(&self) -> Self {
        assert!(!self.is_zero(), "inverse of zero");
        // x * conj3(x) lies in Q(sqrt 2); times its sqrt-2 conjugate is rational
        let t = self.clone() * self.conj3();
        let denom = t.clone() * t.conj2();
        debug_assert!(denom.0[1..].iter().all(|x| x.is_zero()));
        let inv = denom.0[0].recip();
        let num = self.conj3() * t.conj2();
        Surd(num.0.map(|x| x * &inv))
    }
}

impl Add for Surd {
    type Output = Surd;
    fn add(self, o: Surd) -> Surd {
        let [a, b, c, d] = self.0;
        let [e, f, g, h] = o.0;
        Surd([a + e, b + f, c + g, d + h])
    }
}

impl Sub for Surd {
    type Output = Surd;
    fn sub(self, o: Surd) -> Surd {
        self + (-o)
    }
}

impl Neg for Surd {
    type Output = Surd;
    fn neg(self) -> Surd {
        Surd(self.0.map(|x| -x))
    }
}

impl Mul for Surd {
    type Output = Surd;
    fn mul(self, o: Surd) -> Surd {
        // products of basis elements: index pairs -> (scale, index)
        const TABLE: [[(i64, usize); 4]; 4] = [
            [(1, 0), (1, 1), (1, 2), (1, 3)],
            [(1, 1), (2, 0), (1, 3), (2, 2)],
            [(1, 2), (1, 3), (3, 0), (3, 1)],
            [(1, 3), (2, 2), (3, 1), (6, 0)],
        ];
        let mut out: [BigRational; 4] = std::array::from_fn(|_| BigRational::zero());
        for i in 0..4 {
            for j in 0..4 {
                let (s, k) = TABLE[i][j];
                out[k] = &out[k] + &self.0[i] * &o.0[j] * q(s, 1);
            }
        }
        Surd(out)
    }
}

/// Rank by exact Gaussian elimination.
pub fn exact_rank(mut rows: Vec<Vec<Surd>>) -> usize {
    let cols = rows.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for col in 0..cols {
        let Some(p) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else { continue };
        rows.swap(rank, p);
        let inv = rows[rank][col].inverse();
        for r in 0..rows.len() {
            if r != rank && !rows[r][col].is_zero() {
                let f = rows[r][col].clone() * inv.clone();
                for k in col..cols {
                    let v = rows[r][k].clone() - f.clone() * rows[rank][k].clone();
                    rows[r][k] = v;
                }
            }
        }
        rank += 1;
    }
    rank
}

// ---------------------------------------------------------------------------
// Planar two-point scenario with the P'/O' assignment
// P'1 = (x1, y2), P'2 = (y1, 1/3), O'1 = (x2, 4/5), O'2 = (-1/2, -2/3)

pub const EX1_GATHER: [usize; 8] = [1, 4, 2, 5, 3, 8, 6, 7];

pub fn ex1_keystream() -> Keystream {
    let third = 1.0 / 3.0;
    Keystream::from_states(
        vec![[third, -0.5, 0.25, -2.0 / 3.0, 0.8, third], [-2.0 / 3.0, 0.8, third, 0.0, 0.0, 0.0]],
        3,
    )
    .unwrap()
}

pub fn ex1_params(psi: f64) -> CipherParams {
    let mut params = CipherParams::new(psi, KeyMaterial::Explicit(ex1_keystream()), 2).unwrap();
    params.permutation = PermutationSource::Explicit(vec![vec![EX1_GATHER.iter().map(|i| i - 1).collect()]]);
    params.sphere = Some(BoundingSphere::new(Point::origin(2), 1.0).unwrap());
    params
}

pub fn ex1_setup(psi: f64) -> DecryptSetup {
    let params = ex1_params(psi);
    DecryptSetup::from_key(&params, params.sphere.as_ref().unwrap(), 2).unwrap()
}

/// Coefficients (unknowns x1, y1, x2, y2) and constant term of each
/// ciphertext coordinate, written out by hand for `psi = num/den`.
pub fn ex1_exact_system(psi: BigRational) -> Vec<(Vec<Surd>, Surd)> {
    let psi = Surd::rational(psi);
    let z = || Surd::int(0);
    let half_sqrt2 = Surd::new(q(0, 1), q(1, 2), q(0, 1), q(0, 1));
    let (c1, s1) = (half_sqrt2.clone(), half_sqrt2);
    let (c2, s2) = (Surd::rational(q(1, 2)), Surd::new(q(0, 1), q(0, 1), q(1, 2), q(0, 1)));
    let one = Surd::int(1);
    let r = |x: BigRational| Surd::rational(x);
    let pc1 = psi.clone() * c1;
    let ps1 = psi.clone() * s1;
    let pc2 = psi.clone() * c2;
    let ps2 = psi * s2;
    vec![
        (vec![pc1.clone(), z(), one.clone() - pc1.clone(), -ps1.clone()], ps1.clone() * r(q(4, 5))),
        (vec![ps1.clone(), z(), -ps1, pc1.clone()], r(q(4, 5)) * (one - pc1)),
        (vec![z(), pc2.clone(), z(), z()], pc2.clone() * r(q(1, 2)) - ps2.clone() - r(q(1, 2))),
        (vec![z(), ps2.clone(), z(), z()], pc2 + ps2 * r(q(1, 2)) - r(q(2, 3))),
    ]
}

/// Ranks of the coefficient matrix and of `[A | c - const]` for a
/// rational ciphertext `c`.
pub fn ex1_exact_ranks(psi: BigRational, cipher: [BigRational; 4]) -> (usize, usize) {
    let sys = ex1_exact_system(psi);
    let coeff: Vec<Vec<Surd>> = sys.iter().map(|(row, _)| row.clone()).collect();
    let aug: Vec<Vec<Surd>> = sys
        .iter()
        .zip(cipher)
        .map(|((row, k), c)| {
            let mut row = row.clone();
            row.push(Surd::rational(c) - k.clone());
            row
        })
        .collect();
    (exact_rank(coeff), exact_rank(aug))
}

// ---------------------------------------------------------------------------
// Two-point spatial scenario far from the origin

pub const EX2_KEY: [f64; 6] = [0.7, 0.2, -0.6, 0.9, -0.8, -0.7];
pub const EX2_PLAN: [usize; 12] = [9, 12, 7, 11, 8, 10, 6, 1, 4, 3, 2, 5];
pub const EX2_PRINTED: [[f64; 3]; 2] = [[123.6391, 388.6309, 575.0550], [151.8342, -21.5335, 24.5006]];

pub fn ex2_plain() -> PointCloud {
    PointCloud::new(vec![Point::from([400.0, 9.0, 100.0]), Point::from([599.0, 10.0, 100.0])]).unwrap()
}

pub fn ex2_sphere() -> BoundingSphere {
    BoundingSphere::new(Point::from([500.0, 10.0, 100.0]), 100.0).unwrap()
}

pub fn ex2_params(conventions: Conventions) -> CipherParams {
    let key = ChaoticKey::new(EX2_KEY, 3).unwrap();
    let mut params = CipherParams::new(1.0 / 9.0, KeyMaterial::Chaotic(key), 3).unwrap();
    params.permutation = PermutationSource::Explicit(vec![vec![EX2_PLAN.iter().map(|i| i - 1).collect()]]);
    params.sphere = Some(ex2_sphere());
    params.conventions = conventions;
    params
}

/// The convention combination that comes closest to the printed points.
pub fn ex2_closest() -> Conventions {
    Conventions {
        pool_order: PoolOrder::PointMajor,
        direction: PermDirection::Gather,
        rotation: RotationConvention { handedness: Handedness::Counterclockwise, composition: Composition::Zyx },
    }
}

pub fn all_conventions() -> Vec<Conventions> {
    let mut out = Vec::new();
    for pool_order in [PoolOrder::PointMajor, PoolOrder::AxisMajor] {
        for direction in [PermDirection::Gather, PermDirection::Scatter] {
            for handedness in [Handedness::Counterclockwise, Handedness::Clockwise] {
                for composition in [Composition::Xyz, Composition::Zyx] {
                    out.push(Conventions { pool_order, direction, rotation: RotationConvention { handedness, composition } });
                }
            }
        }
    }
    out
}

pub fn max_abs_error(cloud: &PointCloud, expected: &[[f64; 3]]) -> f64 {
    cloud
        .points()
        .iter()
        .zip(expected)
        .flat_map(|(p, e)| p.coords().iter().zip(e).map(|(a, b)| (a - b).abs()))
        .fold(0.0, f64::max)
}

// ---------------------------------------------------------------------------
// Random configurations whose plans keep plaintext coordinates in P' slots

/// A gather plan (point-major pool) that permutes plaintext slots among
/// themselves and anchor slots among themselves.
pub fn random_safe_perm<R: rand::Rng>(rng: &mut R, half: usize) -> Vec<usize> {
    use rand::seq::SliceRandom;
    let mut plain: Vec<usize> = (0..half).collect();
    let mut anchors: Vec<usize> = (half..2 * half).collect();
    plain.shuffle(rng);
    anchors.shuffle(rng);
    plain.extend(anchors);
    plain
}

pub fn random_safe_case<R: rand::Rng>(
    rng: &mut R,
    dim: usize,
    variant: geostab::cipher::Variant,
    rounds: usize,
) -> (PointCloud, CipherParams) {
    let n = rng.random_range(2..=12);
    let center: Vec<f64> = (0..dim).map(|_| rng.random_range(-50.0..50.0)).collect();
    let plain = PointCloud::new(
        (0..n).map(|_| Point::new(center.iter().map(|c| c + rng.random_range(-10.0..10.0)).collect())).collect(),
    )
    .unwrap();
    let k0: [f64; 6] = std::array::from_fn(|_| rng.random_range(-0.99..0.99));
    let key = ChaoticKey::new(k0, rng.random_range(3..=5)).unwrap();
    let psi = rng.random_range(0.01..=1.0);
    let mut params = CipherParams::new(psi, KeyMaterial::Chaotic(key), dim).unwrap();
    params.variant = variant;
    params.rounds = rounds;
    params.permutation =
        PermutationSource::Explicit((0..rounds).map(|_| vec![random_safe_perm(rng, n * dim)]).collect());
    (plain, params)
}
