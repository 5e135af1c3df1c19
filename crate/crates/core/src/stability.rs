//! Stability verdicts, closed-form deviation bounds and their Monte Carlo
//! verification.
//!
//! Two verdicts are reported. The strict one takes the ciphertext's
//! minimal enclosing ball as `(C0, r_c)` and tests
//! `r_p >= r_c > 0` (dimensional) and `|C0 - P0| <= r_p - r_c` (spatial).
//! The witness verdict asks whether *some* ball around the ciphertext
//! nests in the plaintext sphere, which holds iff every cipher point is
//! within `r_p` of `P0`. The two differ: cipher points `(r, 0, 0)` and
//! `(0, r, 0)` pass the witness test for `r_p = r` but their minimal ball
//! has `|C0| + r_c = sqrt(2) r`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cipher::{encrypt_pipeline, CipherParams, KeyMaterial, Variant};
use crate::error::{Error, Result};
use crate::geometry::{extent_stats, min_enclosing_sphere, shuffled_cube, BoundingSphere, Point, PointCloud, CONTAINMENT_TOL};
use crate::keystream::ChaoticKey;

const SQRT_3: f64 = 1.732_050_807_568_877_2;

/// How the ciphertext center `C0` is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CenterMode {
    /// Center of the minimal enclosing ball; `r_c` is its radius.
    #[default]
    MinimalBall,
    /// Centroid; `r_c` is the largest distance from it.
    Centroid,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub plain_sphere: BoundingSphere,
    pub cipher_sphere: BoundingSphere,
    pub center_mode: CenterMode,
    pub center_offset: f64,
    pub dimensional: bool,
    pub spatial: bool,
    pub geometric: bool,
    pub witness_geometric: bool,
    pub max_deviation: f64,
}

pub fn assess(plain_sphere: &BoundingSphere, ciphertext: &PointCloud) -> Result<StabilityReport> {
    assess_with(plain_sphere, ciphertext, CenterMode::MinimalBall)
}

pub fn assess_with(plain_sphere: &BoundingSphere, ciphertext: &PointCloud, mode: CenterMode) -> Result<StabilityReport> {
    let r_p = plain_sphere.radius;
    if !(r_p > 0.0) {
        return Err(Error::DegenerateSphere(r_p));
    }
    if plain_sphere.center.dim() != ciphertext.dim() {
        return Err(Error::DimensionMismatch { expected: plain_sphere.center.dim(), found: ciphertext.dim() });
    }
    let cipher_sphere = match mode {
        CenterMode::MinimalBall => min_enclosing_sphere(ciphertext),
        CenterMode::Centroid => {
            let center = ciphertext.centroid();
            let radius = ciphertext.points().iter().map(|p| p.distance(&center)).fold(0.0, f64::max);
            BoundingSphere { center, radius }
        }
    };
    let r_c = cipher_sphere.radius;
    let center_offset = cipher_sphere.center.distance(&plain_sphere.center);
    let max_deviation = max_deviation(&plain_sphere.center, ciphertext);
    let dimensional = r_c > 0.0 && r_c <= r_p + CONTAINMENT_TOL;
    let spatial = center_offset <= r_p - r_c + CONTAINMENT_TOL;
    Ok(StabilityReport {
        plain_sphere: plain_sphere.clone(),
        cipher_sphere,
        center_mode: mode,
        center_offset,
        dimensional,
        spatial,
        geometric: dimensional && spatial,
        witness_geometric: max_deviation <= r_p + CONTAINMENT_TOL,
        max_deviation,
    })
}

/// `max_j |C^j - P0|`
pub fn max_deviation(center: &Point, cloud: &PointCloud) -> f64 {
    cloud.points().iter().map(|c| c.distance(center)).fold(0.0, f64::max)
}

/// Bound on `|P'^j - O'^j|` and on the distance of any shuffled point
/// from `P0`: `6 r_p + sqrt(3) (M0 - m0)`.
pub fn shuffle_pair_bound(r_p: f64, center: &Point) -> f64 {
    let e = extent_stats(center);
    6.0 * r_p + SQRT_3 * (e.max - e.min)
}

/// Deviation bound for the original rule, `(psi + 1)(6 r_p + sqrt(3)(M0 - m0))`.
/// At the origin this is `6 (psi + 1) r_p`.
pub fn lemma1_bound(psi: f64, r_p: f64, center: &Point) -> f64 {
    (psi + 1.0) * shuffle_pair_bound(r_p, center)
}

/// The origin specialization `6 (psi + 1) r_p`.
pub fn corollary1_bound(psi: f64, r_p: f64) -> f64 {
    (psi + 1.0) * (6.0 * r_p)
}

/// Deviation bound for the modified rule,
/// `psi [12 r_p + 3 sqrt(3)(M0 - m0)] + |1 - psi| |P0|`; `12 psi r_p` at the
/// origin.
pub fn lemma3_bound(psi: f64, r_p: f64, center: &Point) -> f64 {
    let e = extent_stats(center);
    psi * (12.0 * r_p + 3.0 * SQRT_3 * (e.max - e.min)) + (1.0 - psi).abs() * center.norm()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub lemma1_bound: f64,
    /// Present when the plaintext sphere is centered at the origin.
    pub corollary1_bound: Option<f64>,
    pub lemma3_bound: f64,
    pub observed_max: f64,
    pub variant: Variant,
    /// `observed_max` over the bound matching `variant`.
    pub tightness: f64,
}

pub fn bound_report(psi: f64, plain_sphere: &BoundingSphere, ciphertext: &PointCloud, variant: Variant) -> BoundReport {
    let center = &plain_sphere.center;
    let r_p = plain_sphere.radius;
    let lemma1 = lemma1_bound(psi, r_p, center);
    let lemma3 = lemma3_bound(psi, r_p, center);
    let observed_max = max_deviation(center, ciphertext);
    let bound = match variant {
        Variant::Original => lemma1,
        Variant::Modified => lemma3,
    };
    BoundReport {
        lemma1_bound: lemma1,
        corollary1_bound: center.coords().iter().all(|&c| c == 0.0).then(|| corollary1_bound(psi, r_p)),
        lemma3_bound: lemma3,
        observed_max,
        variant,
        tightness: if bound > 0.0 { observed_max / bound } else { 0.0 },
    }
}

// ---------------------------------------------------------------------------
// Monte Carlo

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PsiChoice {
    Fixed(f64),
    /// Uniform on `(0, max]`.
    Uniform(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CenterChoice {
    Fixed(Point),
    /// Uniform in the ball of the given radius about the origin.
    Random(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Sampling {
    /// Uniform inside the plaintext ball.
    #[default]
    Interior,
    /// Uniform on its boundary sphere.
    Boundary,
}

/// One family of random 3D encryptions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialConfig {
    pub trials: usize,
    pub seed: u64,
    pub variant: Variant,
    pub min_points: usize,
    pub max_points: usize,
    pub psi: PsiChoice,
    pub center: CenterChoice,
    /// `r_p` is drawn uniformly from `(0, max_radius]`.
    pub max_radius: f64,
    pub sampling: Sampling,
}

impl Default for TrialConfig {
    fn default() -> Self {
        Self {
            trials: 1000,
            seed: 0,
            variant: Variant::Original,
            min_points: 2,
            max_points: 64,
            psi: PsiChoice::Uniform(1.0),
            center: CenterChoice::Random(1e3),
            max_radius: 1e2,
            sampling: Sampling::Interior,
        }
    }
}

impl TrialConfig {
    fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidParameter("at least one trial is required".into()));
        }
        if self.min_points < 2 || self.max_points < self.min_points {
            return Err(Error::InvalidParameter(format!(
                "point range {}..={} must start at 2 or more",
                self.min_points, self.max_points
            )));
        }
        if !(self.max_radius > 0.0) {
            return Err(Error::InvalidParameter("max_radius must be positive".into()));
        }
        match self.psi {
            PsiChoice::Fixed(p) | PsiChoice::Uniform(p) if !(p > 0.0) => {
                Err(Error::InvalidParameter(format!("psi {p} must be positive")))
            }
            _ => Ok(()),
        }
    }
}

/// The generator for trial `t`: one ChaCha stream per trial under the
/// master seed, so any trial can be replayed alone.
pub fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng
}

fn unit_ball_point<R: Rng>(rng: &mut R) -> [f64; 3] {
    loop {
        let v: [f64; 3] = [rng.random_range(-1.0..=1.0), rng.random_range(-1.0..=1.0), rng.random_range(-1.0..=1.0)];
        let n2: f64 = v.iter().map(|c| c * c).sum();
        if n2 <= 1.0 && n2 > 1e-4 {
            return v;
        }
    }
}

fn sample_point<R: Rng>(rng: &mut R, center: &Point, r: f64, sampling: Sampling) -> Point {
    let v = unit_ball_point(rng);
    let scale = match sampling {
        Sampling::Interior => r,
        Sampling::Boundary => r / v.iter().map(|c| c * c).sum::<f64>().sqrt(),
    };
    center.add(&Point::from(v).scale(scale))
}

/// A randomly generated encryption problem.
#[derive(Debug, Clone)]
pub struct TrialInstance {
    pub plain: PointCloud,
    pub sphere: BoundingSphere,
    pub params: CipherParams,
}

pub fn sample_instance(config: &TrialConfig, trial: usize) -> Result<TrialInstance> {
    let mut rng = trial_rng(config.seed, trial);
    let n = rng.random_range(config.min_points..=config.max_points);
    let psi = match config.psi {
        PsiChoice::Fixed(p) => p,
        PsiChoice::Uniform(max) => max * (1.0 - rng.random::<f64>()),
    };
    let center = match &config.center {
        CenterChoice::Fixed(c) => c.clone(),
        CenterChoice::Random(radius) => sample_point(&mut rng, &Point::origin(3), *radius, Sampling::Interior),
    };
    let r_p = config.max_radius * (1.0 - rng.random::<f64>());
    let mut k0 = [0.0; 6];
    for k in &mut k0 {
        *k = rng.random_range(-0.999..0.999);
    }
    let key = ChaoticKey::new(k0, rng.random_range(3..=6))?;
    let plain = PointCloud::new((0..n).map(|_| sample_point(&mut rng, &center, r_p, config.sampling)).collect())?;
    let sphere = BoundingSphere::new(center, r_p)?;
    let mut params = CipherParams::new(psi, KeyMaterial::Chaotic(key), 3)?;
    params.variant = config.variant;
    params.sphere = Some(sphere.clone());
    Ok(TrialInstance { plain, sphere, params })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialSummary {
    pub trials: usize,
    pub points_checked: usize,
    /// Shuffled points outside the cube `[m0 - sqrt(3) r_p, M0 + sqrt(3) r_p]^3`.
    pub cube_violations: usize,
    /// Pairs with `|P' - O'|` above `6 r_p + sqrt(3)(M0 - m0)`.
    pub pair_violations: usize,
    /// Cipher points above the deviation bound of the variant.
    pub bound_violations: usize,
    pub max_tightness: f64,
    pub max_pair_tightness: f64,
    pub witness_stable_trials: usize,
    pub geometric_stable_trials: usize,
}

impl TrialSummary {
    pub fn violations(&self) -> usize {
        self.cube_violations + self.pair_violations + self.bound_violations
    }

    fn empty() -> Self {
        Self {
            trials: 0,
            points_checked: 0,
            cube_violations: 0,
            pair_violations: 0,
            bound_violations: 0,
            max_tightness: 0.0,
            max_pair_tightness: 0.0,
            witness_stable_trials: 0,
            geometric_stable_trials: 0,
        }
    }

    fn merge(mut self, other: Self) -> Self {
        self.trials += other.trials;
        self.points_checked += other.points_checked;
        self.cube_violations += other.cube_violations;
        self.pair_violations += other.pair_violations;
        self.bound_violations += other.bound_violations;
        self.max_tightness = self.max_tightness.max(other.max_tightness);
        self.max_pair_tightness = self.max_pair_tightness.max(other.max_pair_tightness);
        self.witness_stable_trials += other.witness_stable_trials;
        self.geometric_stable_trials += other.geometric_stable_trials;
        self
    }
}

fn exceeds(value: f64, bound: f64) -> bool {
    value > bound + 1e-9 * (1.0 + bound)
}

/// Runs one trial and checks every claim of the deviation chain.
pub fn run_trial(config: &TrialConfig, trial: usize) -> Result<TrialSummary> {
    let inst = sample_instance(config, trial)?;
    let enc = encrypt_pipeline(&inst.plain, &inst.params)?;
    let center = &inst.sphere.center;
    let r_p = inst.sphere.radius;
    let psi = inst.params.psi;
    let cube = shuffled_cube(center, r_p)?;
    let pair_bound = shuffle_pair_bound(r_p, center);
    let bound = match config.variant {
        Variant::Original => lemma1_bound(psi, r_p, center),
        Variant::Modified => lemma3_bound(psi, r_p, center),
    };
    let round = &enc.rounds[0];
    let tol = 1e-9 * (1.0 + cube.upper.coords()[0].abs().max(cube.lower.coords()[0].abs()));
    let mut s = TrialSummary::empty();
    s.trials = 1;
    s.points_checked = enc.ciphertext.len();
    s.cube_violations = round.p_prime.iter().chain(&round.o_prime).filter(|p| !cube.contains(p, tol)).count();
    for (p, o) in round.p_prime.iter().zip(&round.o_prime) {
        let d = p.distance(o);
        s.max_pair_tightness = s.max_pair_tightness.max(d / pair_bound);
        s.pair_violations += usize::from(exceeds(d, pair_bound));
    }
    for c in enc.ciphertext.points() {
        let d = c.distance(center);
        s.max_tightness = s.max_tightness.max(d / bound);
        s.bound_violations += usize::from(exceeds(d, bound));
    }
    let report = assess(&inst.sphere, &enc.ciphertext)?;
    s.witness_stable_trials = usize::from(report.witness_geometric);
    s.geometric_stable_trials = usize::from(report.geometric);
    Ok(s)
}

/// Runs every trial (in parallel) and aggregates counts and maxima; the
/// result does not depend on execution order.
pub fn verify_bounds(config: &TrialConfig) -> Result<TrialSummary> {
    config.validate()?;
    (0..config.trials)
        .into_par_iter()
        .map(|t| run_trial(config, t))
        .try_reduce(TrialSummary::empty, |a, b| Ok(a.merge(b)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CensusConfig {
    pub trials_per_bucket: usize,
    pub seed: u64,
    pub psi: f64,
    pub center: Point,
    pub radius: f64,
    pub min_points: usize,
    pub max_points: usize,
    /// Skip encryption and assess the plaintext against itself.
    pub identity_control: bool,
}

impl Default for CensusConfig {
    fn default() -> Self {
        Self {
            trials_per_bucket: 1000,
            seed: 0,
            psi: 1.0 / 9.0,
            center: Point::origin(3),
            radius: 1.0,
            min_points: 2,
            max_points: 16,
            identity_control: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BucketStats {
    pub trials: usize,
    pub unstable: usize,
    pub witness_unstable: usize,
    pub unstable_fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CensusReport {
    pub boundary: BucketStats,
    pub interior: BucketStats,
}

fn census_bucket(config: &CensusConfig, sampling: Sampling) -> Result<BucketStats> {
    let trial_config = TrialConfig {
        trials: config.trials_per_bucket,
        // boundary and interior buckets draw from distinct master seeds
        seed: config.seed ^ if sampling == Sampling::Boundary { 0x9e37_79b9_7f4a_7c15 } else { 0 },
        variant: Variant::Original,
        min_points: config.min_points,
        max_points: config.max_points,
        psi: PsiChoice::Fixed(config.psi),
        center: CenterChoice::Fixed(config.center.clone()),
        max_radius: config.radius,
        sampling,
    };
    trial_config.validate()?;
    let outcomes: Vec<(bool, bool)> = (0..config.trials_per_bucket)
        .into_par_iter()
        .map(|t| {
            let mut inst = sample_instance(&trial_config, t)?;
            // fixed radius: the census varies sampling, not scale
            let plain = PointCloud::new(
                inst.plain
                    .points()
                    .iter()
                    .map(|p| config.center.add(&p.sub(&inst.sphere.center).scale(config.radius / inst.sphere.radius)))
                    .collect(),
            )?;
            inst.params.sphere = None;
            let sphere = min_enclosing_sphere(&plain);
            let cipher = if config.identity_control {
                plain.clone()
            } else {
                encrypt_pipeline(&plain, &inst.params)?.ciphertext
            };
            let report = assess(&sphere, &cipher)?;
            Ok((!report.geometric, !report.witness_geometric))
        })
        .collect::<Result<_>>()?;
    let unstable = outcomes.iter().filter(|o| o.0).count();
    let witness_unstable = outcomes.iter().filter(|o| o.1).count();
    Ok(BucketStats {
        trials: outcomes.len(),
        unstable,
        witness_unstable,
        unstable_fraction: unstable as f64 / outcomes.len() as f64,
    })
}

/// Fraction of geometrically unstable encryptions under the original rule,
/// for plaintext sampled on the sphere boundary versus inside it.
pub fn instability_census(config: &CensusConfig) -> Result<CensusReport> {
    if !(config.psi > 0.0) || !(config.radius > 0.0) {
        return Err(Error::InvalidParameter("census psi and radius must be positive".into()));
    }
    Ok(CensusReport {
        boundary: census_bucket(config, Sampling::Boundary)?,
        interior: census_bucket(config, Sampling::Interior)?,
    })
}
