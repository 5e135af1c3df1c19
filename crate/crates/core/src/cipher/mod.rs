//! The permutation-and-rotation cipher.
//!
//! One round turns plaintext `P^j` into cipher points `C^j`:
//!
//! 1. anchors `O^j = P0 + r_p (k1, k2, k3)` from keystream state `K^{j'}`,
//!    `j' = j` in round 1 and `j + N` in round 2;
//! 2. whole-degree angles `floor(180 k_{i+3})` from the same state;
//! 3. the `2 d N` coordinates of plaintext and anchors are pooled,
//!    block-permuted and re-chunked into `P'^j`, `O'^j`;
//! 4. a localized rotation, either `psi R (P' - O') + O'` (original) or
//!    `psi [R (P' - O') + O']` (modified).
//!
//! This cipher is implemented as an object of analysis. It is not
//! confidential and, for plans that mix plaintext coordinates into anchor
//! slots, not even decryptable.

mod anchors;
mod decrypt;
mod encrypt;
mod plan;

pub use anchors::{gen_anchors, gen_angles, AnchorSet, AngleSet};
pub use decrypt::{decrypt_solve, Classification, DecryptOutcome, DecryptSetup, LinearSystem, RoundMaterial};
pub use encrypt::{encrypt_modified, encrypt_original, encrypt_pipeline, encrypt_round, Encryption, RoundTrace};
pub use plan::{build_pool, chunk_pool, one_based_to_zero, shuffle, standard_blocks, unbuild_pool, unshuffle, Block, PermutationPlan};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{check_dimension, BoundingSphere, RotationConvention};
use crate::keystream::{ChaoticKey, Keystream};

/// Upper end of the scaling range advertised for the original rule.
pub const PSI_MAX_ORIGINAL: f64 = 1.0 / 9.0;
/// Upper end of the range under which the modified rule stays inside the
/// plaintext sphere when that sphere is centered at the origin.
pub const PSI_MAX_MODIFIED: f64 = 1.0 / 12.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    /// `C = psi R (P' - O') + O'`
    #[default]
    Original,
    /// `C = psi [R (P' - O') + O']`
    Modified,
}

/// Order of the coordinate pool. Plaintext always precedes anchors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PoolOrder {
    /// `x1 y1 z1 x2 y2 z2 ...`
    #[default]
    PointMajor,
    /// `x1 x2 ... y1 y2 ... z1 z2 ...`
    AxisMajor,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PermDirection {
    /// `out[i] = pool[perm[i]]`
    #[default]
    Gather,
    /// `out[perm[i]] = pool[i]`
    Scatter,
}

/// Choices the construction leaves open, fixed per run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Conventions {
    pub pool_order: PoolOrder,
    pub direction: PermDirection,
    pub rotation: RotationConvention,
}

/// Where the keystream comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KeyMaterial {
    Chaotic(ChaoticKey),
    /// Externally supplied states `K^1, K^2, ...` (worked examples).
    Explicit(Keystream),
}

impl KeyMaterial {
    /// Keystream covering both rounds (`2N` states) for a chaotic key; an
    /// explicit stream is returned as given.
    pub fn keystream(&self, n: usize) -> Result<Keystream> {
        match self {
            KeyMaterial::Chaotic(key) => Keystream::generate(key, 2 * n),
            KeyMaterial::Explicit(ks) => Ok(ks.clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PermutationSource {
    /// Rank-sorted keystream values past the anchor/angle states.
    #[default]
    Derived,
    /// 0-based permutations per round, one per block.
    Explicit(Vec<Vec<Vec<usize>>>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CipherParams {
    pub psi: f64,
    pub key: KeyMaterial,
    pub dimension: usize,
    pub rounds: usize,
    pub variant: Variant,
    pub permutation: PermutationSource,
    pub conventions: Conventions,
    /// Plaintext sphere to use instead of the fitted minimal ball.
    pub sphere: Option<BoundingSphere>,
}

impl CipherParams {
    pub fn new(psi: f64, key: KeyMaterial, dimension: usize) -> Result<Self> {
        let params = Self {
            psi,
            key,
            dimension,
            rounds: 1,
            variant: Variant::Original,
            permutation: PermutationSource::Derived,
            conventions: Conventions::default(),
            sphere: None,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.psi > 0.0) || !self.psi.is_finite() {
            return Err(Error::InvalidParameter(format!("psi = {} must be positive", self.psi)));
        }
        if !(1..=2).contains(&self.rounds) {
            return Err(Error::InvalidParameter(format!("rounds = {} must be 1 or 2", self.rounds)));
        }
        check_dimension(self.dimension)?;
        if let Some(sphere) = &self.sphere {
            if sphere.center.dim() != self.dimension {
                return Err(Error::DimensionMismatch { expected: self.dimension, found: sphere.center.dim() });
            }
        }
        if let PermutationSource::Explicit(rounds) = &self.permutation {
            if rounds.len() < self.rounds {
                return Err(Error::InvalidPlan(format!(
                    "{} explicit round plan(s) supplied for {} round(s)",
                    rounds.len(),
                    self.rounds
                )));
            }
        }
        Ok(())
    }

    /// Whether `psi` lies in the range the chosen rule was designed for.
    pub fn psi_in_advertised_range(&self) -> bool {
        let max = match self.variant {
            Variant::Original => PSI_MAX_ORIGINAL,
            Variant::Modified => PSI_MAX_MODIFIED,
        };
        self.psi <= max
    }
}

pub(crate) fn check_round(round: usize) -> Result<()> {
    if round == 1 || round == 2 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("round index {round} must be 1 or 2")))
    }
}
