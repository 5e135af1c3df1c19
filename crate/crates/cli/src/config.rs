//! Options shared by every command. Each field can come from a flag or
//! from the TOML file named by `--config`; flags win over the file and the
//! file wins over built-in defaults. Relative paths in a file resolve
//! against the file's directory.

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use geostab::cipher::{
    CipherParams, Conventions, KeyMaterial, PermDirection, PermutationSource, PoolOrder, Variant,
};
use geostab::geometry::{BoundingSphere, Composition, Handedness, Point, PointCloud, RotationConvention};
use geostab::keystream::{ChaoticKey, Keystream};
use geostab::stability::CenterMode;
use rand::{Rng, SeedableRng};
use serde::Deserialize;

use crate::error::{CliError, CliResult};
use crate::io::read_cloud;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VariantOpt {
    Original,
    Modified,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PermutationOpt {
    Derived,
    File,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PoolOrderOpt {
    PointMajor,
    AxisMajor,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DirectionOpt {
    Gather,
    Scatter,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HandednessOpt {
    Ccw,
    Cw,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CompositionOpt {
    Xyz,
    Zyx,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CenterModeOpt {
    Meb,
    Centroid,
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Options {
    /// TOML file supplying any of these options
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Input point cloud (CSV or ASCII PLY), or a report for plot-data
    #[arg(long, short)]
    pub input: Option<PathBuf>,
    /// Output file; reports go to stdout when omitted
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// Trace file: written by encrypt, read by decrypt, analyze and plot-data
    #[arg(long)]
    pub trace: Option<PathBuf>,
    /// Where decrypt writes its diagnosis when recovery is not unique
    #[arg(long)]
    pub diagnosis: Option<PathBuf>,
    /// Plaintext cloud whose minimal ball serves as the plaintext sphere
    #[arg(long)]
    pub plain: Option<PathBuf>,
    /// Initial key state, six values in [-1, 1]
    #[arg(long, num_args = 6, allow_negative_numbers = true, value_name = "K")]
    pub key: Option<Vec<f64>>,
    /// Chebyshev degree (at least 3)
    #[arg(long)]
    pub degree: Option<u32>,
    /// Scaling factor
    #[arg(long)]
    pub psi: Option<f64>,
    #[arg(long, value_enum)]
    pub variant: Option<VariantOpt>,
    #[arg(long)]
    pub rounds: Option<usize>,
    #[arg(long)]
    pub dimension: Option<usize>,
    /// Key-derived permutations or the ones in --plan-file
    #[arg(long, value_enum)]
    pub permutation: Option<PermutationOpt>,
    /// JSON plan: a plan object, a list of them (one per round), a 1-based
    /// permutation of the whole pool, or a list of those
    #[arg(long)]
    pub plan_file: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub pool_order: Option<PoolOrderOpt>,
    #[arg(long, value_enum)]
    pub perm_direction: Option<DirectionOpt>,
    #[arg(long, value_enum)]
    pub handedness: Option<HandednessOpt>,
    /// Rotation order: xyz applies R1 R2 R3, zyx applies R3 R2 R1
    #[arg(long, value_enum)]
    pub composition: Option<CompositionOpt>,
    /// Plaintext sphere center (overrides the minimal ball)
    #[arg(long, num_args = 2..=3, allow_negative_numbers = true, value_name = "C")]
    pub sphere_center: Option<Vec<f64>>,
    #[arg(long)]
    pub sphere_radius: Option<f64>,
    /// How analyze picks the ciphertext center
    #[arg(long, value_enum)]
    pub center_mode: Option<CenterModeOpt>,
    #[arg(long)]
    pub trials: Option<usize>,
    /// Trials per bucket of the instability census
    #[arg(long)]
    pub census_trials: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,

    // file-only: inline data
    /// Explicit keystream states, one six-vector per state
    #[arg(skip)]
    pub keystream: Option<Vec<[f64; 6]>>,
    /// Inline plaintext points
    #[arg(skip)]
    pub plaintext: Option<Vec<Vec<f64>>>,
    /// Inline 1-based whole-pool permutations, one per round
    #[arg(skip)]
    pub plan: Option<Vec<Vec<usize>>>,
}

macro_rules! overlay {
    ($flags:expr, $file:expr, $($field:ident),*) => {
        Options { $($field: $flags.$field.or($file.$field),)* }
    };
}

fn rebase(base: &Path, p: Option<PathBuf>) -> Option<PathBuf> {
    p.map(|p| if p.is_relative() { base.join(p) } else { p })
}

impl Options {
    pub fn parse_toml(text: &str) -> CliResult<Options> {
        toml::from_str(text).map_err(|e| CliError::Parse(format!("config: {e}")))
    }

    /// Loads `--config` (if any) under the flags.
    pub fn resolve(self) -> CliResult<Options> {
        let Some(path) = self.config.clone() else { return Ok(self) };
        let text = std::fs::read_to_string(&path).map_err(|e| CliError::io(&path, e))?;
        let mut file = Self::parse_toml(&text)
            .map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        file.input = rebase(&base, file.input);
        file.output = rebase(&base, file.output);
        file.trace = rebase(&base, file.trace);
        file.diagnosis = rebase(&base, file.diagnosis);
        file.plain = rebase(&base, file.plain);
        file.plan_file = rebase(&base, file.plan_file);
        Ok(self.over(file))
    }

    /// Field-wise `self` if set, else `file`.
    pub fn over(self, file: Options) -> Options {
        overlay!(
            self, file, config, input, output, trace, diagnosis, plain, key, degree, psi, variant, rounds, dimension,
            permutation, plan_file, pool_order, perm_direction, handedness, composition, sphere_center,
            sphere_radius, center_mode, trials, census_trials, seed, keystream, plaintext, plan
        )
    }

    pub fn variant(&self) -> Variant {
        match self.variant {
            Some(VariantOpt::Modified) => Variant::Modified,
            _ => Variant::Original,
        }
    }

    pub fn center_mode(&self) -> CenterMode {
        match self.center_mode {
            Some(CenterModeOpt::Centroid) => CenterMode::Centroid,
            _ => CenterMode::MinimalBall,
        }
    }

    pub fn conventions(&self) -> Conventions {
        Conventions {
            pool_order: match self.pool_order {
                Some(PoolOrderOpt::AxisMajor) => PoolOrder::AxisMajor,
                _ => PoolOrder::PointMajor,
            },
            direction: match self.perm_direction {
                Some(DirectionOpt::Scatter) => PermDirection::Scatter,
                _ => PermDirection::Gather,
            },
            rotation: RotationConvention {
                handedness: match self.handedness {
                    Some(HandednessOpt::Cw) => Handedness::Clockwise,
                    _ => Handedness::Counterclockwise,
                },
                composition: match self.composition {
                    Some(CompositionOpt::Zyx) => Composition::Zyx,
                    _ => Composition::Xyz,
                },
            },
        }
    }

    /// The sphere override, if both center and radius are given.
    pub fn sphere(&self) -> CliResult<Option<BoundingSphere>> {
        match (&self.sphere_center, self.sphere_radius) {
            (Some(c), Some(r)) => Ok(Some(BoundingSphere::new(Point::new(c.clone()), r)?)),
            (None, None) => Ok(None),
            _ => Err(CliError::Usage("--sphere-center and --sphere-radius go together".into())),
        }
    }

    /// The plaintext from `--input` or the inline `plaintext` table.
    pub fn plaintext(&self) -> CliResult<PointCloud> {
        if let Some(path) = &self.input {
            return read_cloud(path);
        }
        match &self.plaintext {
            Some(points) => Ok(PointCloud::new(points.iter().cloned().map(Point::new).collect())?),
            None => Err(CliError::Usage("no input: pass --input or set plaintext in the config".into())),
        }
    }

    fn key_material(&self) -> CliResult<KeyMaterial> {
        let degree = self.degree.unwrap_or(3);
        match (&self.key, &self.keystream) {
            (Some(_), Some(_)) => Err(CliError::Usage("give either a key or an explicit keystream, not both".into())),
            (Some(k), None) => {
                let k0: [f64; 6] =
                    k.as_slice().try_into().map_err(|_| CliError::Usage(format!("--key takes 6 values, got {}", k.len())))?;
                Ok(KeyMaterial::Chaotic(ChaoticKey::new(k0, degree)?))
            }
            (None, Some(states)) => Ok(KeyMaterial::Explicit(Keystream::from_states(states.clone(), degree)?)),
            (None, None) => {
                // a key drawn from the seed keeps unkeyed runs reproducible
                let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(self.seed.unwrap_or(0));
                let k0: [f64; 6] = std::array::from_fn(|_| rng.random_range(-0.999..0.999));
                log::info!("no key given; using seed-derived key {k0:?}");
                Ok(KeyMaterial::Chaotic(ChaoticKey::new(k0, degree)?))
            }
        }
    }

    fn explicit_plans(&self) -> CliResult<PlanSpec> {
        if let Some(plans) = &self.plan {
            let rounds = plans
                .iter()
                .map(|p| Ok(vec![geostab::cipher::one_based_to_zero(p)?]))
                .collect::<CliResult<_>>()?;
            return Ok((rounds, None));
        }
        let path = self
            .plan_file
            .as_ref()
            .ok_or_else(|| CliError::Usage("--permutation file needs --plan-file or an inline plan".into()))?;
        read_plan_file(path)
    }

    /// Cipher parameters; the dimension defaults to that of `data`.
    pub fn cipher_params(&self, data_dim: usize) -> CliResult<CipherParams> {
        let dimension = self.dimension.unwrap_or(data_dim);
        let mut params = CipherParams::new(self.psi.unwrap_or(1.0 / 9.0), self.key_material()?, dimension)?;
        params.rounds = self.rounds.unwrap_or(1);
        params.variant = self.variant();
        params.conventions = self.conventions();
        params.sphere = self.sphere()?;
        let wants_file = match self.permutation {
            Some(PermutationOpt::File) => true,
            Some(PermutationOpt::Derived) => false,
            None => self.plan.is_some() || self.plan_file.is_some(),
        };
        if wants_file {
            let (rounds, direction) = self.explicit_plans()?;
            if let Some(d) = direction {
                // a plan object carries its own direction
                params.conventions.direction = d;
            }
            params.permutation = PermutationSource::Explicit(rounds);
        }
        params.validate()?;
        Ok(params)
    }
}

/// Reads every accepted plan-file shape into per-round, per-block 0-based
/// permutations.
/// One-based permutation per round, plus the direction the file asked for.
pub type PlanSpec = (Vec<Vec<Vec<usize>>>, Option<PermDirection>);

pub fn read_plan_file(path: &Path) -> CliResult<PlanSpec> {
    let value: serde_json::Value = crate::json::read(path)?;
    parse_plan_value(value).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
}

fn parse_plan_value(value: serde_json::Value) -> Result<PlanSpec, String> {
    use geostab::cipher::PermutationPlan;
    use serde_json::Value;

    fn record(v: Value) -> Result<PermutationPlan, String> {
        serde_json::from_value(v).map_err(|e| e.to_string())
    }
    fn whole(v: Value) -> Result<Vec<Vec<usize>>, String> {
        let perm: Vec<usize> = serde_json::from_value(v).map_err(|e| e.to_string())?;
        Ok(vec![geostab::cipher::one_based_to_zero(&perm).map_err(|e| e.to_string())?])
    }
    let blocks = |p: &PermutationPlan| p.blocks().iter().map(|b| b.perm.clone()).collect::<Vec<_>>();

    match value {
        Value::Object(_) => {
            let plan = record(value)?;
            Ok((vec![blocks(&plan)], Some(plan.direction())))
        }
        Value::Array(items) if items.iter().all(Value::is_object) && !items.is_empty() => {
            let plans = items.into_iter().map(record).collect::<Result<Vec<_>, _>>()?;
            let direction = plans[0].direction();
            if plans.iter().any(|p| p.direction() != direction) {
                return Err("all rounds must share one permutation direction".into());
            }
            Ok((plans.iter().map(blocks).collect(), Some(direction)))
        }
        Value::Array(items) if items.iter().all(Value::is_number) && !items.is_empty() => {
            Ok((vec![whole(Value::Array(items))?], None))
        }
        Value::Array(items) if items.iter().all(Value::is_array) && !items.is_empty() => {
            Ok((items.into_iter().map(whole).collect::<Result<_, _>>()?, None))
        }
        _ => Err("unrecognized plan layout".into()),
    }
}
