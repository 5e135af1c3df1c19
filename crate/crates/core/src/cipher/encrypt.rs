use serde::{Deserialize, Serialize};

use super::anchors::{gen_anchors, gen_angles, AnchorSet, AngleSet};
use super::plan::{build_pool, shuffle, PermutationPlan};
use super::{CipherParams, PermutationSource, Variant};
use crate::error::{Error, Result};
use crate::geometry::{min_enclosing_sphere, rotation_matrix, BoundingSphere, Point, PointCloud, RotationConvention};
use crate::keystream::Keystream;

fn check_inputs(p_prime: &[Point], o_prime: &[Point], angles: &AngleSet, psi: f64) -> Result<()> {
    if p_prime.len() != o_prime.len() || p_prime.len() != angles.angles.len() {
        return Err(Error::SizeMismatch(format!(
            "{} P' points, {} O' points, {} angle sets",
            p_prime.len(),
            o_prime.len(),
            angles.angles.len()
        )));
    }
    if !(psi > 0.0) {
        return Err(Error::InvalidParameter(format!("psi = {psi} must be positive")));
    }
    Ok(())
}

fn localized_rotation(
    p_prime: &[Point],
    o_prime: &[Point],
    angles: &AngleSet,
    psi: f64,
    convention: RotationConvention,
    variant: Variant,
) -> Result<PointCloud> {
    check_inputs(p_prime, o_prime, angles, psi)?;
    let mut out = Vec::with_capacity(p_prime.len());
    for ((p, o), a) in p_prime.iter().zip(o_prime).zip(&angles.angles) {
        let r = rotation_matrix(a, p.dim(), convention)?;
        let turned = r.apply(&p.sub(o));
        out.push(match variant {
            Variant::Original => turned.scale(psi).add(o),
            Variant::Modified => turned.add(o).scale(psi),
        });
    }
    PointCloud::new(out)
}

/// `C^j = psi R^j (P'^j - O'^j) + O'^j`
pub fn encrypt_original(
    p_prime: &[Point],
    o_prime: &[Point],
    angles: &AngleSet,
    psi: f64,
    convention: RotationConvention,
) -> Result<PointCloud> {
    localized_rotation(p_prime, o_prime, angles, psi, convention, Variant::Original)
}

/// `C^j = psi [R^j (P'^j - O'^j) + O'^j]`
pub fn encrypt_modified(
    p_prime: &[Point],
    o_prime: &[Point],
    angles: &AngleSet,
    psi: f64,
    convention: RotationConvention,
) -> Result<PointCloud> {
    localized_rotation(p_prime, o_prime, angles, psi, convention, Variant::Modified)
}

/// Every intermediate value of one round.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundTrace {
    pub round: usize,
    pub input: PointCloud,
    pub anchors: AnchorSet,
    pub angles: AngleSet,
    pub pool: Vec<f64>,
    pub plan: PermutationPlan,
    pub p_prime: Vec<Point>,
    pub o_prime: Vec<Point>,
    pub cipher: PointCloud,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Encryption {
    pub ciphertext: PointCloud,
    /// Plaintext sphere used for the anchors of every round.
    pub sphere: BoundingSphere,
    pub keystream: Keystream,
    pub rounds: Vec<RoundTrace>,
}

impl Encryption {
    pub fn plans(&self) -> Vec<&PermutationPlan> {
        self.rounds.iter().map(|r| &r.plan).collect()
    }
}

fn round_plan(params: &CipherParams, ks: &Keystream, n: usize, round: usize) -> Result<PermutationPlan> {
    let direction = params.conventions.direction;
    match &params.permutation {
        PermutationSource::Derived => PermutationPlan::derived(ks, n, params.dimension, round, direction),
        PermutationSource::Explicit(rounds) => {
            let perms = rounds
                .get(round - 1)
                .ok_or_else(|| Error::InvalidPlan(format!("no explicit plan for round {round}")))?;
            PermutationPlan::explicit(perms, n, params.dimension, direction)
        }
    }
}

/// Runs one round on `input` with round-`round` key material.
pub fn encrypt_round(
    input: &PointCloud,
    sphere: &BoundingSphere,
    ks: &Keystream,
    round: usize,
    params: &CipherParams,
) -> Result<RoundTrace> {
    let n = input.len();
    let anchors = gen_anchors(sphere, ks, round, n)?;
    let angles = gen_angles(ks, round, n, params.dimension)?;
    let order = params.conventions.pool_order;
    let pool = build_pool(input, &anchors.anchors, order)?;
    let plan = round_plan(params, ks, n, round)?;
    let (p_prime, o_prime) = shuffle(&pool, &plan, params.dimension, order)?;
    let cipher = localized_rotation(&p_prime, &o_prime, &angles, params.psi, params.conventions.rotation, params.variant)?;
    Ok(RoundTrace { round, input: input.clone(), anchors, angles, pool, plan, p_prime, o_prime, cipher })
}

/// Sphere fit (unless overridden), keystream, then one or two rounds.
pub fn encrypt_pipeline(plain: &PointCloud, params: &CipherParams) -> Result<Encryption> {
    params.validate()?;
    if plain.dim() != params.dimension {
        return Err(Error::DimensionMismatch { expected: params.dimension, found: plain.dim() });
    }
    if plain.len() < 2 {
        return Err(Error::InvalidParameter("the cipher needs at least two plaintext points".into()));
    }
    if !params.psi_in_advertised_range() {
        log::debug!("psi = {} lies outside the advertised range for the {:?} rule", params.psi, params.variant);
    }
    let sphere = match &params.sphere {
        Some(s) => s.clone(),
        None => min_enclosing_sphere(plain),
    };
    let keystream = params.key.keystream(plain.len())?;
    let mut rounds = Vec::with_capacity(params.rounds);
    let mut current = plain.clone();
    for round in 1..=params.rounds {
        let trace = encrypt_round(&current, &sphere, &keystream, round, params)?;
        current = trace.cipher.clone();
        rounds.push(trace);
    }
    Ok(Encryption { ciphertext: current, sphere, keystream, rounds })
}
