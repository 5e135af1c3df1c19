//! JSON documents written by the commands. Every document starts with a
//! `schema` tag naming its layout and version.

use geostab::cipher::{CipherParams, Classification, Encryption, LinearSystem, Variant};
use geostab::geometry::{
    anchor_cube, extent_stats, shuffled_cube, AxisBox, BoundingSphere, Point, PointCloud,
};
use geostab::stability::{BoundReport, CensusReport, StabilityReport, TrialSummary};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

pub const TRACE_SCHEMA: &str = "geostab.trace/1";
pub const ANALYSIS_SCHEMA: &str = "geostab.analysis/1";
pub const DIAGNOSIS_SCHEMA: &str = "geostab.diagnosis/1";
pub const VERIFY_SCHEMA: &str = "geostab.verify/1";
pub const PLOT_SCHEMA: &str = "geostab.plot/1";
pub const REPRODUCTION_SCHEMA: &str = "geostab.reproduction/1";

pub fn check_schema(found: &str, expected: &str) -> CliResult<()> {
    if found == expected {
        Ok(())
    } else {
        Err(CliError::Parse(format!("expected a {expected} document, found {found}")))
    }
}

/// Everything needed to replay or invert an encryption.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trace {
    pub schema: String,
    pub params: CipherParams,
    pub plaintext: PointCloud,
    pub encryption: Encryption,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Analysis {
    pub schema: String,
    pub psi: f64,
    pub variant: Variant,
    pub ciphertext: PointCloud,
    pub stability: StabilityReport,
    pub bounds: BoundReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnosis {
    pub schema: String,
    pub classification: Classification,
    pub rank: usize,
    pub augmented_rank: usize,
    pub unknowns: usize,
    pub residual: f64,
    pub system: LinearSystem,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub schema: String,
    pub seed: u64,
    pub variant: Variant,
    pub bounds: TrialSummary,
    pub census: CensusReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SphereItem {
    pub label: String,
    pub center: Point,
    pub radius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CubeItem {
    pub label: String,
    pub lower: Point,
    pub upper: Point,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Role {
    Plain,
    Anchor,
    Shuffled,
    ShuffledAnchor,
    Cipher,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointSet {
    pub role: Role,
    pub label: String,
    pub points: Vec<Point>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlotBundle {
    pub schema: String,
    pub spheres: Vec<SphereItem>,
    pub cubes: Vec<CubeItem>,
    pub point_sets: Vec<PointSet>,
}

fn cube_item(label: &str, b: AxisBox) -> CubeItem {
    CubeItem { label: label.into(), lower: b.lower, upper: b.upper }
}

/// The box around the plaintext sphere holding plaintext and anchors, and
/// the one holding every shuffled point.
fn cubes(sphere: &BoundingSphere) -> CliResult<Vec<CubeItem>> {
    let (c, r) = (&sphere.center, sphere.radius);
    if c.dim() == 3 {
        return Ok(vec![cube_item("omega", anchor_cube(c, r)), cube_item("omega-shuffled", shuffled_cube(c, r)?)]);
    }
    let h = std::f64::consts::SQRT_2 * r;
    let around = AxisBox {
        lower: Point::new(c.coords().iter().map(|v| v - h).collect()),
        upper: Point::new(c.coords().iter().map(|v| v + h).collect()),
    };
    let e = extent_stats(c);
    let shuffled = AxisBox::cube(c.dim(), e.min - h, e.max + h);
    Ok(vec![cube_item("omega", around), cube_item("omega-shuffled", shuffled)])
}

fn sphere_item(label: &str, s: &BoundingSphere) -> SphereItem {
    SphereItem { label: label.into(), center: s.center.clone(), radius: s.radius }
}

fn point_set(role: Role, label: String, points: &[Point]) -> PointSet {
    PointSet { role, label, points: points.to_vec() }
}

impl PlotBundle {
    pub fn from_trace(trace: &Trace) -> CliResult<Self> {
        let enc = &trace.encryption;
        let cipher_ball = geostab::geometry::min_enclosing_sphere(&enc.ciphertext);
        let mut sets = vec![point_set(Role::Plain, "plaintext".into(), trace.plaintext.points())];
        for r in &enc.rounds {
            let k = r.round;
            sets.push(point_set(Role::Anchor, format!("anchors-{k}"), r.anchors.anchors.points()));
            sets.push(point_set(Role::Shuffled, format!("p-prime-{k}"), &r.p_prime));
            sets.push(point_set(Role::ShuffledAnchor, format!("o-prime-{k}"), &r.o_prime));
            sets.push(point_set(Role::Cipher, format!("cipher-{k}"), r.cipher.points()));
        }
        Ok(Self {
            schema: PLOT_SCHEMA.into(),
            spheres: vec![sphere_item("plain", &enc.sphere), sphere_item("cipher", &cipher_ball)],
            cubes: cubes(&enc.sphere)?,
            point_sets: sets,
        })
    }

    pub fn from_analysis(a: &Analysis) -> CliResult<Self> {
        let s = &a.stability;
        Ok(Self {
            schema: PLOT_SCHEMA.into(),
            spheres: vec![sphere_item("plain", &s.plain_sphere), sphere_item("cipher", &s.cipher_sphere)],
            cubes: cubes(&s.plain_sphere)?,
            point_sets: vec![point_set(Role::Cipher, "ciphertext".into(), a.ciphertext.points())],
        })
    }
}
