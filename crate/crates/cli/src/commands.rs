use std::path::Path;

use geostab::cipher::{decrypt_solve, encrypt_pipeline, Classification, DecryptOutcome, DecryptSetup};
use geostab::geometry::{min_enclosing_sphere, BoundingSphere, Point, PointCloud};
use geostab::stability::{
    assess_with, bound_report, instability_census, verify_bounds, CensusConfig, CenterChoice, PsiChoice, TrialConfig,
};
use serde::Serialize;

use crate::config::Options;
use crate::error::{CliError, CliResult, Outcome};
use crate::io::{format_csv, read_cloud, write_cloud};
use crate::json;
use crate::reports::*;

pub const EXAMPLE1_CONFIG: &str = include_str!("../../../scenarios/example1.toml");
pub const EXAMPLE2_CONFIG: &str = include_str!("../../../scenarios/example2.toml");

/// Cipher points printed alongside the spatial two-point scenario.
pub const EXAMPLE2_PRINTED: [[f64; 3]; 2] = [[123.6391, 388.6309, 575.0550], [151.8342, -21.5335, 24.5006]];

fn emit_cloud(path: Option<&Path>, cloud: &PointCloud) -> CliResult<()> {
    match path {
        Some(p) => write_cloud(p, cloud),
        None => {
            print!("{}", format_csv(cloud));
            Ok(())
        }
    }
}

pub fn load_trace(path: &Path) -> CliResult<Trace> {
    let trace: Trace = json::read(path)?;
    check_schema(&trace.schema, TRACE_SCHEMA)?;
    Ok(trace)
}

pub fn run_encryption(opts: &Options) -> CliResult<Trace> {
    let plaintext = opts.plaintext()?;
    let params = opts.cipher_params(plaintext.dim())?;
    if !params.psi_in_advertised_range() {
        log::warn!("psi = {} lies outside the advertised range for the {:?} rule", params.psi, params.variant);
    }
    let encryption = encrypt_pipeline(&plaintext, &params)?;
    Ok(Trace { schema: TRACE_SCHEMA.into(), params, plaintext, encryption })
}

pub fn encrypt(opts: &Options) -> CliResult<Outcome> {
    let trace = run_encryption(opts)?;
    // render both before writing either so a failure leaves no files
    let trace_text = json::to_string(&trace)?;
    if let Some(path) = &opts.trace {
        json::write_atomic(path, &trace_text)?;
    }
    emit_cloud(opts.output.as_deref(), &trace.encryption.ciphertext)?;
    Ok(Outcome::Success)
}

fn plain_sphere(opts: &Options) -> CliResult<BoundingSphere> {
    if let Some(s) = opts.sphere()? {
        return Ok(s);
    }
    match &opts.plain {
        Some(path) => Ok(min_enclosing_sphere(&read_cloud(path)?)),
        None => Err(CliError::Usage("the plaintext sphere is needed: pass --sphere-center/--sphere-radius or --plain".into())),
    }
}

fn required_input(opts: &Options) -> CliResult<PointCloud> {
    let path = opts.input.as_ref().ok_or_else(|| CliError::Usage("--input is required".into()))?;
    read_cloud(path)
}

/// The ciphertext and decryption setup, from a trace or from the key.
pub fn decrypt_inputs(opts: &Options) -> CliResult<(PointCloud, DecryptSetup)> {
    if let Some(path) = &opts.trace {
        let trace = load_trace(path)?;
        let cipher = match &opts.input {
            Some(p) => read_cloud(p)?,
            None => trace.encryption.ciphertext.clone(),
        };
        return Ok((cipher, DecryptSetup::from_encryption(&trace.encryption, &trace.params)));
    }
    let cipher = required_input(opts)?;
    let params = opts.cipher_params(cipher.dim())?;
    let sphere = plain_sphere(opts)?;
    let setup = DecryptSetup::from_key(&params, &sphere, cipher.len())?;
    Ok((cipher, setup))
}

pub fn diagnosis(outcome: &DecryptOutcome) -> Diagnosis {
    Diagnosis {
        schema: DIAGNOSIS_SCHEMA.into(),
        classification: outcome.classification,
        rank: outcome.rank,
        augmented_rank: outcome.augmented_rank,
        unknowns: outcome.unknowns,
        residual: outcome.residual,
        system: outcome.system.clone(),
    }
}

pub fn decrypt(opts: &Options) -> CliResult<Outcome> {
    let (cipher, setup) = decrypt_inputs(opts)?;
    let outcome = decrypt_solve(&cipher, &setup)?;
    match &outcome.solution {
        Some(recovered) => {
            emit_cloud(opts.output.as_deref(), recovered)?;
            Ok(Outcome::Success)
        }
        None => {
            log::warn!("decryption is {:?}; writing a diagnosis", outcome.classification);
            json::write(opts.diagnosis.as_deref().or(opts.output.as_deref()), &diagnosis(&outcome))?;
            Ok(Outcome::Diagnosis)
        }
    }
}

pub fn analysis(opts: &Options) -> CliResult<Analysis> {
    let (ciphertext, sphere, psi, variant) = match &opts.trace {
        Some(path) => {
            let trace = load_trace(path)?;
            let cipher = match &opts.input {
                Some(p) => read_cloud(p)?,
                None => trace.encryption.ciphertext,
            };
            (cipher, trace.encryption.sphere, trace.params.psi, trace.params.variant)
        }
        None => (required_input(opts)?, plain_sphere(opts)?, opts.psi.unwrap_or(1.0 / 9.0), opts.variant()),
    };
    let stability = assess_with(&sphere, &ciphertext, opts.center_mode())?;
    let bounds = bound_report(psi, &sphere, &ciphertext, variant);
    Ok(Analysis { schema: ANALYSIS_SCHEMA.into(), psi, variant, ciphertext, stability, bounds })
}

pub fn analyze(opts: &Options) -> CliResult<Outcome> {
    json::write(opts.output.as_deref(), &analysis(opts)?)?;
    Ok(Outcome::Success)
}

pub fn verification(opts: &Options) -> CliResult<VerifyReport> {
    if opts.sphere_center.as_ref().is_some_and(|c| c.len() != 3) {
        return Err(CliError::Usage("verification runs in 3D; --sphere-center needs three values".into()));
    }
    let seed = opts.seed.unwrap_or(0);
    let variant = opts.variant();
    let config = TrialConfig {
        trials: opts.trials.unwrap_or(10_000),
        seed,
        variant,
        psi: opts.psi.map_or(PsiChoice::Uniform(1.0), PsiChoice::Fixed),
        center: opts.sphere_center.clone().map_or(CenterChoice::Random(1e3), |c| CenterChoice::Fixed(Point::new(c))),
        max_radius: opts.sphere_radius.unwrap_or(1e2),
        ..Default::default()
    };
    let census = CensusConfig {
        trials_per_bucket: opts.census_trials.unwrap_or(1000),
        seed,
        psi: opts.psi.unwrap_or(1.0 / 9.0),
        center: opts.sphere_center.clone().map_or_else(|| Point::origin(3), Point::new),
        radius: opts.sphere_radius.unwrap_or(1.0),
        ..Default::default()
    };
    Ok(VerifyReport {
        schema: VERIFY_SCHEMA.into(),
        seed,
        variant,
        bounds: verify_bounds(&config)?,
        census: instability_census(&census)?,
    })
}

pub fn verify(opts: &Options) -> CliResult<Outcome> {
    let report = verification(opts)?;
    json::write(opts.output.as_deref(), &report)?;
    if report.bounds.violations() > 0 {
        log::error!("{} bound violation(s) found", report.bounds.violations());
        return Ok(Outcome::Violation);
    }
    Ok(Outcome::Success)
}

pub fn plot_bundle(opts: &Options) -> CliResult<PlotBundle> {
    if let Some(path) = &opts.trace {
        return PlotBundle::from_trace(&load_trace(path)?);
    }
    let path = opts.input.as_ref().ok_or_else(|| CliError::Usage("plot-data needs --trace or --input".into()))?;
    let value: serde_json::Value = json::read(path)?;
    let parse_err = |e: serde_json::Error| CliError::Parse(format!("{}: {e}", path.display()));
    match value.get("schema").and_then(|s| s.as_str()) {
        Some(TRACE_SCHEMA) => PlotBundle::from_trace(&serde_json::from_value(value).map_err(parse_err)?),
        Some(ANALYSIS_SCHEMA) => PlotBundle::from_analysis(&serde_json::from_value(value).map_err(parse_err)?),
        other => Err(CliError::Parse(format!("{}: cannot plot a {other:?} document", path.display()))),
    }
}

pub fn plot_data(opts: &Options) -> CliResult<Outcome> {
    json::write(opts.output.as_deref(), &plot_bundle(opts)?)?;
    Ok(Outcome::Success)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Scenario {
    Example1,
    Example2,
}

#[derive(Debug, Serialize)]
pub struct DecryptSummary {
    pub classification: Classification,
    pub rank: usize,
    pub augmented_rank: usize,
    pub unknowns: usize,
}

impl From<&DecryptOutcome> for DecryptSummary {
    fn from(o: &DecryptOutcome) -> Self {
        Self { classification: o.classification, rank: o.rank, augmented_rank: o.augmented_rank, unknowns: o.unknowns }
    }
}

#[derive(Debug, Serialize)]
#[serde(untagged)]
pub enum Reproduction {
    Planar {
        schema: String,
        scenario: String,
        genuine: DecryptSummary,
        arbitrary: DecryptSummary,
    },
    Spatial {
        schema: String,
        scenario: String,
        ciphertext: PointCloud,
        printed: Vec<Point>,
        max_abs_error: f64,
        stability: geostab::stability::StabilityReport,
    },
}

pub fn scenario_options(scenario: Scenario, flags: Options) -> CliResult<Options> {
    let text = match scenario {
        Scenario::Example1 => EXAMPLE1_CONFIG,
        Scenario::Example2 => EXAMPLE2_CONFIG,
    };
    Ok(flags.over(Options::parse_toml(text)?))
}

pub fn reproduction(scenario: Scenario, opts: &Options) -> CliResult<(Reproduction, Trace)> {
    let trace = run_encryption(opts)?;
    let enc = &trace.encryption;
    let report = match scenario {
        Scenario::Example1 => {
            let setup = DecryptSetup::from_encryption(enc, &trace.params);
            let genuine = decrypt_solve(&enc.ciphertext, &setup)?;
            let n = enc.ciphertext.len();
            let zeros = PointCloud::new(vec![Point::origin(enc.ciphertext.dim()); n])?;
            let arbitrary = decrypt_solve(&zeros, &setup)?;
            Reproduction::Planar {
                schema: REPRODUCTION_SCHEMA.into(),
                scenario: "example1".into(),
                genuine: (&genuine).into(),
                arbitrary: (&arbitrary).into(),
            }
        }
        Scenario::Example2 => {
            let printed: Vec<Point> = EXAMPLE2_PRINTED.iter().map(|p| Point::from(*p)).collect();
            let max_abs_error = enc
                .ciphertext
                .points()
                .iter()
                .zip(&printed)
                .flat_map(|(a, b)| a.coords().iter().zip(b.coords()).map(|(x, y)| (x - y).abs()))
                .fold(0.0, f64::max);
            Reproduction::Spatial {
                schema: REPRODUCTION_SCHEMA.into(),
                scenario: "example2".into(),
                ciphertext: enc.ciphertext.clone(),
                printed,
                max_abs_error,
                stability: assess_with(&enc.sphere, &enc.ciphertext, opts.center_mode())?,
            }
        }
    };
    Ok((report, trace))
}

pub fn reproduce(scenario: Scenario, flags: Options) -> CliResult<Outcome> {
    let opts = scenario_options(scenario, flags)?;
    let (report, trace) = reproduction(scenario, &opts)?;
    if let Some(path) = &opts.trace {
        json::write(Some(path), &trace)?;
    }
    json::write(opts.output.as_deref(), &report)?;
    Ok(Outcome::Success)
}
