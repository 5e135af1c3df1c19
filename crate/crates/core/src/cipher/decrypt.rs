//! Decryption as a linear system.
//!
//! A receiver holding the key knows the anchors, the angles and the plan,
//! so each cipher coordinate is an affine function of the `d N` unknown
//! plaintext coordinates. Unknown `k` is coordinate `k % d` of plaintext
//! point `k / d`. The system is solved in the least-squares sense and
//! classified by numerical rank.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::anchors::{gen_anchors, gen_angles, AngleSet};
use super::encrypt::Encryption;
use super::plan::{delayout, layout, PermutationPlan};
use super::{CipherParams, Conventions, Variant};
use crate::error::{Error, Result};
use crate::geometry::{rotation_matrix, BoundingSphere, Point, PointCloud};

/// Residual above which the system is declared inconsistent.
pub const RESIDUAL_TOL: f64 = 1e-6;
/// Singular values below this fraction of the largest count as zero.
pub const RANK_RTOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Classification {
    Unique,
    Inconsistent,
    Underdetermined,
}

/// Key material of one round, as the receiver reconstructs it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundMaterial {
    pub anchors: Vec<Point>,
    pub angles: AngleSet,
    pub plan: PermutationPlan,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecryptSetup {
    pub psi: f64,
    pub variant: Variant,
    pub conventions: Conventions,
    pub rounds: Vec<RoundMaterial>,
}

impl DecryptSetup {
    /// Rebuilds every round's material from the key and the plaintext
    /// sphere.
    pub fn from_key(params: &CipherParams, sphere: &BoundingSphere, n: usize) -> Result<Self> {
        params.validate()?;
        let ks = params.key.keystream(n)?;
        let mut rounds = Vec::with_capacity(params.rounds);
        for round in 1..=params.rounds {
            let anchors = gen_anchors(sphere, &ks, round, n)?.anchors.into_points();
            let angles = gen_angles(&ks, round, n, params.dimension)?;
            let plan = match &params.permutation {
                super::PermutationSource::Derived => {
                    PermutationPlan::derived(&ks, n, params.dimension, round, params.conventions.direction)?
                }
                super::PermutationSource::Explicit(per_round) => PermutationPlan::explicit(
                    per_round
                        .get(round - 1)
                        .ok_or_else(|| Error::InvalidPlan(format!("no explicit plan for round {round}")))?,
                    n,
                    params.dimension,
                    params.conventions.direction,
                )?,
            };
            rounds.push(RoundMaterial { anchors, angles, plan });
        }
        Ok(Self { psi: params.psi, variant: params.variant, conventions: params.conventions, rounds })
    }

    pub fn from_encryption(enc: &Encryption, params: &CipherParams) -> Self {
        Self {
            psi: params.psi,
            variant: params.variant,
            conventions: params.conventions,
            rounds: enc
                .rounds
                .iter()
                .map(|r| RoundMaterial {
                    anchors: r.anchors.anchors.points().to_vec(),
                    angles: r.angles.clone(),
                    plan: r.plan.clone(),
                })
                .collect(),
        }
    }
}

/// `matrix * x = rhs`, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearSystem {
    pub matrix: Vec<Vec<f64>>,
    pub rhs: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecryptOutcome {
    pub classification: Classification,
    pub solution: Option<PointCloud>,
    pub residual: f64,
    pub rank: usize,
    pub augmented_rank: usize,
    pub unknowns: usize,
    pub system: LinearSystem,
}

/// Affine form `coeffs . x + constant` over the unknowns.
#[derive(Debug, Clone, PartialEq)]
struct Affine {
    coeffs: Vec<f64>,
    constant: f64,
}

impl Affine {
    fn unknown(index: usize, count: usize) -> Self {
        let mut coeffs = vec![0.0; count];
        coeffs[index] = 1.0;
        Self { coeffs, constant: 0.0 }
    }

    fn known(value: f64, count: usize) -> Self {
        Self { coeffs: vec![0.0; count], constant: value }
    }

    fn axpy(&mut self, a: f64, other: &Affine) {
        for (c, o) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *c += a * o;
        }
        self.constant += a * other.constant;
    }
}

fn rank_of(singular: &[f64]) -> usize {
    let top = singular.iter().copied().fold(0.0, f64::max);
    if top == 0.0 {
        return 0;
    }
    singular.iter().filter(|&&s| s > RANK_RTOL * top).count()
}

pub fn decrypt_solve(cipher: &PointCloud, setup: &DecryptSetup) -> Result<DecryptOutcome> {
    if !(setup.psi > 0.0) || !setup.psi.is_finite() {
        return Err(Error::InvalidParameter(format!("psi = {} must be positive", setup.psi)));
    }
    if setup.rounds.is_empty() {
        return Err(Error::InvalidPlan("no rounds to invert".into()));
    }
    let n = cipher.len();
    let dim = cipher.dim();
    let unknowns = n * dim;
    let psi = setup.psi;

    let mut current: Vec<Vec<Affine>> =
        (0..n).map(|j| (0..dim).map(|a| Affine::unknown(j * dim + a, unknowns)).collect()).collect();

    for (r, material) in setup.rounds.iter().enumerate() {
        if material.plan.pool_len() != 2 * unknowns {
            return Err(Error::InvalidPlan(format!(
                "round {} plan covers {} entries, pool has {}",
                r + 1,
                material.plan.pool_len(),
                2 * unknowns
            )));
        }
        if material.anchors.len() != n || material.angles.angles.len() != n {
            return Err(Error::SizeMismatch(format!("round {} key material does not match {n} points", r + 1)));
        }
        let mut pooled = current.clone();
        for a in &material.anchors {
            if a.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: a.dim() });
            }
            pooled.push(a.coords().iter().map(|&v| Affine::known(v, unknowns)).collect());
        }
        let order = setup.conventions.pool_order;
        let shuffled = material.plan.apply(&layout(&pooled, n, dim, order))?;
        let mut points = delayout(&shuffled, n, dim, order);
        let o_prime = points.split_off(n);
        let p_prime = points;

        let mut next = Vec::with_capacity(n);
        for j in 0..n {
            let rot = rotation_matrix(&material.angles.angles[j], dim, setup.conventions.rotation)?;
            // original: psi R P' + (I - psi R) O';  modified: psi R P' + psi (I - R) O'
            let (o_self, o_rot) = match setup.variant {
                Variant::Original => (1.0, -psi),
                Variant::Modified => (psi, -psi),
            };
            let mut out = Vec::with_capacity(dim);
            for i in 0..dim {
                let mut form = Affine::known(0.0, unknowns);
                form.axpy(o_self, &o_prime[j][i]);
                for k in 0..dim {
                    let rik = rot.entry(i, k);
                    form.axpy(psi * rik, &p_prime[j][k]);
                    form.axpy(o_rot * rik, &o_prime[j][k]);
                }
                out.push(form);
            }
            next.push(out);
        }
        current = next;
    }

    let mut matrix = Vec::with_capacity(unknowns);
    let mut rhs = Vec::with_capacity(unknowns);
    for (forms, c) in current.iter().zip(cipher.points()) {
        for (form, &value) in forms.iter().zip(c.coords()) {
            matrix.push(form.coeffs.clone());
            rhs.push(value - form.constant);
        }
    }

    let rows = matrix.len();
    let a = DMatrix::from_fn(rows, unknowns, |i, j| matrix[i][j]);
    let b = DVector::from_vec(rhs.clone());
    let svd = a.clone().svd(true, true);
    let rank = rank_of(svd.singular_values.as_slice());
    let top = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let x = svd
        .solve(&b, RANK_RTOL * top)
        .map_err(|e| Error::InvalidParameter(format!("least-squares solve failed: {e}")))?;
    let residual = (&a * &x - &b).norm();

    let mut augmented = a.insert_column(unknowns, 0.0);
    augmented.set_column(unknowns, &b);
    let augmented_rank = rank_of(augmented.singular_values().as_slice());

    let classification = if residual > RESIDUAL_TOL {
        Classification::Inconsistent
    } else if rank == unknowns {
        Classification::Unique
    } else {
        Classification::Underdetermined
    };
    let solution = match classification {
        Classification::Unique => Some(PointCloud::new(
            (0..n).map(|j| Point::new(x.as_slice()[j * dim..(j + 1) * dim].to_vec())).collect(),
        )?),
        _ => None,
    };
    Ok(DecryptOutcome {
        classification,
        solution,
        residual,
        rank,
        augmented_rank,
        unknowns,
        system: LinearSystem { matrix, rhs },
    })
}
