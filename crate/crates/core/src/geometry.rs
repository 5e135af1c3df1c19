//! Points, enclosing balls, rotations and the coordinate-shuffle extent
//! estimates.

use std::f64::consts::SQRT_2;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Slack for "inside the ball" checks on desk-scale coordinates.
pub const CONTAINMENT_TOL: f64 = 1e-9;

const SQRT_3: f64 = 1.732_050_807_568_877_2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point(Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Self {
        Self(coords)
    }

    pub fn origin(dim: usize) -> Self {
        Self(vec![0.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.0
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }

    pub fn sub(&self, other: &Point) -> Point {
        Point(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn add(&self, other: &Point) -> Point {
        Point(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn scale(&self, s: f64) -> Point {
        Point(self.0.iter().map(|a| a * s).collect())
    }

    pub fn dot(&self, other: &Point) -> f64 {
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn distance(&self, other: &Point) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    pub fn min_coord(&self) -> f64 {
        self.0.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_coord(&self) -> f64 {
        self.0.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

impl From<Vec<f64>> for Point {
    fn from(v: Vec<f64>) -> Self {
        Self(v)
    }
}

impl<const D: usize> From<[f64; D]> for Point {
    fn from(v: [f64; D]) -> Self {
        Self(v.to_vec())
    }
}

pub(crate) fn check_dimension(dim: usize) -> Result<()> {
    match dim {
        2 | 3 => Ok(()),
        other => Err(Error::Dimension(other)),
    }
}

/// Nonempty, dimension-homogeneous list of finite 2D or 3D points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Point>", into = "Vec<Point>")]
pub struct PointCloud {
    points: Vec<Point>,
}

impl PointCloud {
    pub fn new(points: Vec<Point>) -> Result<Self> {
        let first = points.first().ok_or(Error::EmptyCloud)?;
        let dim = first.dim();
        check_dimension(dim)?;
        for (i, p) in points.iter().enumerate() {
            if p.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: p.dim() });
            }
            if !p.is_finite() {
                return Err(Error::NonFinite(i));
            }
        }
        Ok(Self { points })
    }

    pub fn dim(&self) -> usize {
        self.points[0].dim()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn into_points(self) -> Vec<Point> {
        self.points
    }

    pub fn translated(&self, shift: &Point) -> PointCloud {
        PointCloud { points: self.points.iter().map(|p| p.add(shift)).collect() }
    }

    pub fn centroid(&self) -> Point {
        let n = self.points.len() as f64;
        let mut acc = vec![0.0; self.dim()];
        for p in &self.points {
            for (a, c) in acc.iter_mut().zip(p.coords()) {
                *a += c;
            }
        }
        Point(acc.into_iter().map(|a| a / n).collect())
    }
}

impl TryFrom<Vec<Point>> for PointCloud {
    type Error = Error;

    fn try_from(points: Vec<Point>) -> Result<Self> {
        Self::new(points)
    }
}

impl From<PointCloud> for Vec<Point> {
    fn from(cloud: PointCloud) -> Self {
        cloud.points
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundingSphere {
    pub center: Point,
    pub radius: f64,
}

impl BoundingSphere {
    pub fn new(center: Point, radius: f64) -> Result<Self> {
        if !(radius >= 0.0) || !radius.is_finite() {
            return Err(Error::InvalidParameter(format!("sphere radius {radius} must be finite and nonnegative")));
        }
        check_dimension(center.dim())?;
        Ok(Self { center, radius })
    }

    pub fn contains(&self, p: &Point, tol: f64) -> bool {
        self.center.distance(p) <= self.radius + tol
    }

    pub fn encloses(&self, cloud: &PointCloud) -> bool {
        cloud.points().iter().all(|p| self.contains(p, CONTAINMENT_TOL))
    }
}

/// Axis-aligned box, `lower <= upper` per axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxisBox {
    pub lower: Point,
    pub upper: Point,
}

impl AxisBox {
    pub fn new(lower: Point, upper: Point) -> Result<Self> {
        if lower.dim() != upper.dim() {
            return Err(Error::DimensionMismatch { expected: lower.dim(), found: upper.dim() });
        }
        if lower.coords().iter().zip(upper.coords()).any(|(l, u)| l > u) {
            return Err(Error::InvalidParameter("box lower bound exceeds upper bound".into()));
        }
        Ok(Self { lower, upper })
    }

    /// Box whose every axis spans `[lo, hi]`.
    pub fn cube(dim: usize, lo: f64, hi: f64) -> Self {
        Self { lower: Point(vec![lo; dim]), upper: Point(vec![hi; dim]) }
    }

    pub fn contains(&self, p: &Point, tol: f64) -> bool {
        p.coords()
            .iter()
            .zip(self.lower.coords().iter().zip(self.upper.coords()))
            .all(|(c, (l, u))| *c >= l - tol && *c <= u + tol)
    }
}

/// Coordinate range and farthest-pair bound of a shuffled region.
///
/// For [`extent_stats`] `min`/`max` are the extreme coordinates of the
/// center itself (`m0`, `M0`); for the shuffle estimates they are the
/// bounds `m`, `M` shared by every axis after shuffling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtentStats {
    pub min: f64,
    pub max: f64,
    pub rho: f64,
}

impl ExtentStats {
    /// Center of the cube `[min, max]^dim`.
    pub fn center(&self, dim: usize) -> Point {
        Point(vec![(self.min + self.max) / 2.0; dim])
    }
}

pub fn extent_stats(center: &Point) -> ExtentStats {
    if center.dim() == 0 {
        return ExtentStats { min: 0.0, max: 0.0, rho: 0.0 };
    }
    let (min, max) = (center.min_coord(), center.max_coord());
    ExtentStats { min, max, rho: (center.dim() as f64).sqrt() * (max - min) }
}

/// Planar points shuffled among themselves: they land in the square
/// `[m, M]^2`, whose diagonal `sqrt(2) (M - m)` bounds every distance.
pub fn shuffle_extent_pure(region: &AxisBox) -> Result<ExtentStats> {
    if region.lower.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, found: region.lower.dim() });
    }
    let min = region.lower.min_coord();
    let max = region.upper.max_coord();
    Ok(ExtentStats { min, max, rho: SQRT_2 * (max - min) })
}

/// Farthest-pair bound when planar points in `B(center, r)` are shuffled
/// with anchors drawn from `B(center, sqrt(2) r)`.
pub fn shuffle_extent_mixed_2d(center: &Point, r: f64) -> Result<f64> {
    if center.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, found: center.dim() });
    }
    if !(r > 0.0) {
        return Err(Error::InvalidParameter(format!("radius {r} must be positive")));
    }
    let c = center.coords();
    Ok(4.0 * r + SQRT_2 * (c[0] - c[1]).abs())
}

/// 3D counterpart: plaintext in `B(P0, r_p)`, anchors in
/// `B(P0, sqrt(3) r_p)`.
pub fn shuffle_extent_mixed_3d(center: &Point, r_p: f64) -> Result<ExtentStats> {
    if center.dim() != 3 {
        return Err(Error::DimensionMismatch { expected: 3, found: center.dim() });
    }
    if !(r_p > 0.0) {
        return Err(Error::InvalidParameter(format!("radius {r_p} must be positive")));
    }
    let base = extent_stats(center);
    let min = base.min - SQRT_3 * r_p;
    let max = base.max + SQRT_3 * r_p;
    Ok(ExtentStats { min, max, rho: SQRT_3 * (max - min) })
}

/// The cube that holds every shuffled point (plaintext and anchors alike).
pub fn shuffled_cube(center: &Point, r_p: f64) -> Result<AxisBox> {
    let stats = shuffle_extent_mixed_3d(center, r_p)?;
    Ok(AxisBox::cube(3, stats.min, stats.max))
}

/// The cube `|x_i - p0_i| <= sqrt(3) r_p` holding plaintext and anchors
/// before shuffling.
pub fn anchor_cube(center: &Point, r_p: f64) -> AxisBox {
    let h = SQRT_3 * r_p;
    AxisBox {
        lower: Point(center.coords().iter().map(|c| c - h).collect()),
        upper: Point(center.coords().iter().map(|c| c + h).collect()),
    }
}

// ---------------------------------------------------------------------------
// Rotations

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Handedness {
    /// Positive angles turn counterclockwise seen from the positive axis.
    #[default]
    Counterclockwise,
    Clockwise,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Composition {
    /// `R = R_x(a1) R_y(a2) R_z(a3)`
    #[default]
    Xyz,
    /// `R = R_z(a3) R_y(a2) R_x(a1)`
    Zyx,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct RotationConvention {
    pub handedness: Handedness,
    pub composition: Composition,
}

/// `(sin, cos)` of a whole number of degrees, exact at multiples of 90.
fn sin_cos_deg(deg: i32) -> (f64, f64) {
    match deg.rem_euclid(360) {
        0 => (0.0, 1.0),
        90 => (1.0, 0.0),
        180 => (0.0, -1.0),
        270 => (-1.0, 0.0),
        d => (f64::from(d)).to_radians().sin_cos(),
    }
}

/// A proper rotation of the plane or of space, applied to column vectors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rotation {
    dim: usize,
    m: [[f64; 3]; 3],
}

impl Rotation {
    pub fn identity(dim: usize) -> Self {
        let mut m = [[0.0; 3]; 3];
        for (i, row) in m.iter_mut().enumerate().take(dim) {
            row[i] = 1.0;
        }
        Self { dim, m }
    }

    fn axis(axis: usize, deg: i32, handedness: Handedness) -> [[f64; 3]; 3] {
        let (mut s, c) = sin_cos_deg(deg);
        if handedness == Handedness::Clockwise {
            s = -s;
        }
        match axis {
            0 => [[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]],
            1 => [[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]],
            _ => [[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Row-major entries; only the leading `dim x dim` block is meaningful.
    pub fn matrix(&self) -> &[[f64; 3]; 3] {
        &self.m
    }

    pub fn entry(&self, row: usize, col: usize) -> f64 {
        self.m[row][col]
    }

    pub fn mul(&self, other: &Rotation) -> Rotation {
        Rotation { dim: self.dim, m: mat_mul(&self.m, &other.m) }
    }

    pub fn transpose(&self) -> Rotation {
        let mut t = [[0.0; 3]; 3];
        for (i, row) in self.m.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                t[j][i] = *v;
            }
        }
        Rotation { dim: self.dim, m: t }
    }

    pub fn determinant(&self) -> f64 {
        let m = &self.m;
        if self.dim == 2 {
            return m[0][0] * m[1][1] - m[0][1] * m[1][0];
        }
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    /// `max |(R^T R - I)_ij|`
    pub fn orthogonality_error(&self) -> f64 {
        let prod = self.transpose().mul(self);
        let mut worst: f64 = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((prod.m[i][j] - target).abs());
            }
        }
        worst
    }

    pub fn apply(&self, p: &Point) -> Point {
        let c = p.coords();
        Point(
            (0..self.dim)
                .map(|i| (0..self.dim).map(|j| self.m[i][j] * c[j]).sum())
                .collect(),
        )
    }
}

fn mat_mul(a: &[[f64; 3]; 3], b: &[[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

/// Rotation from whole-degree angles: one angle in the plane, or
/// `(a1, a2, a3)` about X, Y and Z in space.
pub fn rotation_matrix(angles: &[i32], dim: usize, convention: RotationConvention) -> Result<Rotation> {
    check_dimension(dim)?;
    let expected = dim * (dim - 1) / 2;
    if angles.len() != expected {
        return Err(Error::AngleCount { dim, expected, found: angles.len() });
    }
    if dim == 2 {
        let z = Rotation::axis(2, angles[0], convention.handedness);
        let mut m = [[0.0; 3]; 3];
        for i in 0..2 {
            m[i][..2].copy_from_slice(&z[i][..2]);
        }
        return Ok(Rotation { dim, m });
    }
    let [rx, ry, rz] = [0, 1, 2].map(|a| Rotation::axis(a, angles[a], convention.handedness));
    let m = match convention.composition {
        Composition::Xyz => mat_mul(&mat_mul(&rx, &ry), &rz),
        Composition::Zyx => mat_mul(&mat_mul(&rz, &ry), &rx),
    };
    Ok(Rotation { dim, m })
}

// ---------------------------------------------------------------------------
// Minimal enclosing ball

/// Smallest ball through every support point, centered in their affine
/// hull. `None` for an empty or affinely dependent support.
fn circumball(support: &[&Point]) -> Option<BoundingSphere> {
    let (first, rest) = support.split_first()?;
    if rest.is_empty() {
        return Some(BoundingSphere { center: (*first).clone(), radius: 0.0 });
    }
    let k = rest.len();
    let vecs: Vec<Point> = rest.iter().map(|p| p.sub(first)).collect();
    let gram = DMatrix::from_fn(k, k, |i, j| 2.0 * vecs[i].dot(&vecs[j]));
    let rhs = DVector::from_fn(k, |i, _| vecs[i].dot(&vecs[i]));
    let scale = gram.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let lu = gram.lu();
    let det = lu.determinant();
    if !(det.abs() > 1e-14 * scale.powi(k as i32)) {
        return None;
    }
    let lambda = lu.solve(&rhs)?;
    let mut offset = Point::origin(first.dim());
    for (l, v) in lambda.iter().zip(&vecs) {
        offset = offset.add(&v.scale(*l));
    }
    let center = first.add(&offset);
    let radius = support.iter().map(|p| center.distance(p)).fold(0.0, f64::max);
    Some(BoundingSphere { center, radius })
}

/// Fallback for numerically degenerate supports: ball on the farthest
/// pair, grown to cover the rest.
fn covering_ball(support: &[&Point]) -> BoundingSphere {
    let mut best = (0, 0, -1.0);
    for i in 0..support.len() {
        for j in i..support.len() {
            let d = support[i].distance(support[j]);
            if d > best.2 {
                best = (i, j, d);
            }
        }
    }
    let center = support[best.0].add(support[best.1]).scale(0.5);
    let radius = support.iter().map(|p| center.distance(p)).fold(0.0, f64::max);
    BoundingSphere { center, radius }
}

fn ball_of_support(support: &[&Point]) -> Option<BoundingSphere> {
    if support.is_empty() {
        return None;
    }
    Some(circumball(support).unwrap_or_else(|| covering_ball(support)))
}

fn outside(ball: &Option<BoundingSphere>, p: &Point) -> bool {
    match ball {
        None => true,
        Some(b) => b.center.distance(p) > b.radius * (1.0 + 1e-12) + 1e-12,
    }
}

// Move-to-front Welzl: recursion depth is bounded by the support size.
fn mtf_ball<'a>(order: &mut Vec<&'a Point>, end: usize, support: &mut Vec<&'a Point>, dim: usize) -> Option<BoundingSphere> {
    let mut ball = ball_of_support(support);
    if support.len() == dim + 1 {
        return ball;
    }
    for i in 0..end {
        let p = order[i];
        if outside(&ball, p) {
            support.push(p);
            ball = mtf_ball(order, i, support, dim);
            support.pop();
            order.remove(i);
            order.insert(0, p);
        }
    }
    ball
}

/// Exact minimal enclosing ball (Welzl with move-to-front).
pub fn min_enclosing_sphere(cloud: &PointCloud) -> BoundingSphere {
    let mut order: Vec<&Point> = cloud.points().iter().collect();
    let n = order.len();
    let mut support = Vec::with_capacity(cloud.dim() + 1);
    mtf_ball(&mut order, n, &mut support, cloud.dim()).expect("cloud is nonempty")
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn p(c: &[f64]) -> Point {
        Point::new(c.to_vec())
    }

    #[test]
    fn cloud_validation() {
        assert_eq!(PointCloud::new(vec![]), Err(Error::EmptyCloud));
        assert!(matches!(
            PointCloud::new(vec![p(&[0.0, 0.0]), p(&[0.0, 0.0, 0.0])]),
            Err(Error::DimensionMismatch { .. })
        ));
        assert_eq!(PointCloud::new(vec![p(&[1.0, f64::NAN])]), Err(Error::NonFinite(0)));
        assert_eq!(PointCloud::new(vec![p(&[1.0])]), Err(Error::Dimension(1)));
    }

    #[test]
    fn meb_small_cases() {
        let single = PointCloud::new(vec![p(&[3.0, -2.0, 7.0])]).unwrap();
        let b = min_enclosing_sphere(&single);
        assert_eq!(b.center, p(&[3.0, -2.0, 7.0]));
        assert_eq!(b.radius, 0.0);

        let pair = PointCloud::new(vec![p(&[0.0, 0.0, 0.0]), p(&[2.0, 0.0, 0.0])]).unwrap();
        let b = min_enclosing_sphere(&pair);
        assert_abs_diff_eq!(b.center.distance(&p(&[1.0, 0.0, 0.0])), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(b.radius, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn meb_cube_corners() {
        let mut corners = Vec::new();
        for x in [-1.0, 1.0] {
            for y in [-1.0, 1.0] {
                for z in [-1.0, 1.0] {
                    corners.push(p(&[x, y, z]));
                }
            }
        }
        let cloud = PointCloud::new(corners.clone()).unwrap();
        let b = min_enclosing_sphere(&cloud);
        assert!(b.center.norm() < 1e-9);
        assert_abs_diff_eq!(b.radius, 3f64.sqrt(), epsilon = 1e-9);
        for c in &corners {
            assert_abs_diff_eq!(b.center.distance(c), 3f64.sqrt(), epsilon = 1e-9);
        }
    }

    #[test]
    fn meb_handles_duplicates_and_collinear() {
        let cloud = PointCloud::new(vec![
            p(&[0.0, 0.0]),
            p(&[1.0, 0.0]),
            p(&[1.0, 0.0]),
            p(&[2.0, 0.0]),
            p(&[0.5, 0.0]),
        ])
        .unwrap();
        let b = min_enclosing_sphere(&cloud);
        assert_abs_diff_eq!(b.radius, 1.0, epsilon = 1e-12);
        assert!(b.encloses(&cloud));
    }

    #[test]
    fn rotation_identity_and_planar() {
        let r = rotation_matrix(&[0, 0, 0], 3, RotationConvention::default()).unwrap();
        assert_eq!(r, Rotation::identity(3));

        let r = rotation_matrix(&[45], 2, RotationConvention::default()).unwrap();
        let h = 2f64.sqrt() / 2.0;
        assert_abs_diff_eq!(r.entry(0, 0), h, epsilon = 1e-15);
        assert_abs_diff_eq!(r.entry(0, 1), -h, epsilon = 1e-15);
        assert_abs_diff_eq!(r.entry(1, 0), h, epsilon = 1e-15);
        assert_abs_diff_eq!(r.entry(1, 1), h, epsilon = 1e-15);
    }

    #[test]
    fn rotation_about_x_maps_y_to_z() {
        let r = rotation_matrix(&[90, 0, 0], 3, RotationConvention::default()).unwrap();
        assert_eq!(r.apply(&p(&[0.0, 1.0, 0.0])), p(&[0.0, 0.0, 1.0]));
        assert!(r.orthogonality_error() < 1e-15);
        assert_eq!(r.determinant(), 1.0);

        let cw = RotationConvention { handedness: Handedness::Clockwise, ..Default::default() };
        let r = rotation_matrix(&[90, 0, 0], 3, cw).unwrap();
        assert_eq!(r.apply(&p(&[0.0, 1.0, 0.0])), p(&[0.0, 0.0, -1.0]));
    }

    #[test]
    fn composition_orders_differ() {
        let xyz = rotation_matrix(&[30, 40, 50], 3, RotationConvention::default()).unwrap();
        let zyx = rotation_matrix(
            &[30, 40, 50],
            3,
            RotationConvention { composition: Composition::Zyx, ..Default::default() },
        )
        .unwrap();
        let rx = rotation_matrix(&[30, 0, 0], 3, RotationConvention::default()).unwrap();
        let ry = rotation_matrix(&[0, 40, 0], 3, RotationConvention::default()).unwrap();
        let rz = rotation_matrix(&[0, 0, 50], 3, RotationConvention::default()).unwrap();
        let manual = rz.mul(&ry).mul(&rx);
        for i in 0..3 {
            for j in 0..3 {
                assert_abs_diff_eq!(zyx.entry(i, j), manual.entry(i, j), epsilon = 1e-15);
            }
        }
        assert!((xyz.entry(0, 2) - zyx.entry(0, 2)).abs() > 1e-3);
    }

    #[test]
    fn rotation_angle_count() {
        assert_eq!(
            rotation_matrix(&[1, 2], 3, RotationConvention::default()),
            Err(Error::AngleCount { dim: 3, expected: 3, found: 2 })
        );
        assert!(rotation_matrix(&[1, 2], 2, RotationConvention::default()).is_err());
        assert!(rotation_matrix(&[1], 4, RotationConvention::default()).is_err());
    }

    #[test]
    fn extent_stats_examples() {
        let e = extent_stats(&p(&[0.0, 0.0, 0.0]));
        assert_eq!((e.min, e.max), (0.0, 0.0));
        let e = extent_stats(&p(&[10.0, 15.0, 20.0]));
        assert_eq!((e.min, e.max), (10.0, 20.0));
        let e = extent_stats(&p(&[3.0, 4.0]));
        assert_eq!((e.min, e.max), (3.0, 4.0));
    }

    #[test]
    fn pure_shuffle_extent() {
        let unit = AxisBox::new(p(&[0.0, 0.0]), p(&[1.0, 1.0])).unwrap();
        assert_abs_diff_eq!(shuffle_extent_pure(&unit).unwrap().rho, SQRT_2, epsilon = 1e-15);
        let rect = AxisBox::new(p(&[1.0, 3.0]), p(&[6.0, 8.0])).unwrap();
        let e = shuffle_extent_pure(&rect).unwrap();
        assert_eq!((e.min, e.max), (1.0, 8.0));
        assert_abs_diff_eq!(e.rho, 7.0 * SQRT_2, epsilon = 1e-12);
        assert_abs_diff_eq!(e.center(2).distance(&p(&[4.5, 4.5])), 0.0, epsilon = 1e-15);
        let flat = AxisBox::new(p(&[2.0, 2.0]), p(&[2.0, 2.0])).unwrap();
        assert_eq!(shuffle_extent_pure(&flat).unwrap().rho, 0.0);
        assert!(AxisBox::new(p(&[1.0, 0.0]), p(&[0.0, 0.0])).is_err());
    }

    #[test]
    fn mixed_shuffle_extent_2d() {
        assert_abs_diff_eq!(shuffle_extent_mixed_2d(&p(&[0.0, 0.0]), 1.0).unwrap(), 4.0, epsilon = 1e-15);
        assert_abs_diff_eq!(shuffle_extent_mixed_2d(&p(&[3.0, 4.0]), 1.5).unwrap(), 6.0 + SQRT_2, epsilon = 1e-12);
        assert_abs_diff_eq!(shuffle_extent_mixed_2d(&p(&[5.0, 5.0]), 2.0).unwrap(), 8.0, epsilon = 1e-15);
        assert!(shuffle_extent_mixed_2d(&p(&[0.0, 0.0]), 0.0).is_err());
        assert!(shuffle_extent_mixed_2d(&p(&[0.0, 0.0, 0.0]), 1.0).is_err());
    }

    #[test]
    fn mixed_shuffle_extent_3d() {
        let e = shuffle_extent_mixed_3d(&p(&[10.0, 15.0, 20.0]), 5.0).unwrap();
        assert_abs_diff_eq!(e.rho, 30.0 + 10.0 * SQRT_3, epsilon = 1e-12);
        assert_abs_diff_eq!(e.center(3).distance(&p(&[15.0, 15.0, 15.0])), 0.0, epsilon = 1e-12);

        let e = shuffle_extent_mixed_3d(&p(&[0.0, 0.0, 0.0]), 1.0).unwrap();
        assert_abs_diff_eq!(e.min, -SQRT_3, epsilon = 1e-15);
        assert_abs_diff_eq!(e.max, SQRT_3, epsilon = 1e-15);
        assert_abs_diff_eq!(e.rho, 6.0, epsilon = 1e-12);

        for c in [-7.5, 0.25, 123.0] {
            let e = shuffle_extent_mixed_3d(&p(&[c, c, c]), 1.0).unwrap();
            assert_abs_diff_eq!(e.max - e.min, 2.0 * SQRT_3, epsilon = 1e-12);
        }
        assert!(shuffle_extent_mixed_3d(&p(&[0.0, 0.0, 0.0]), -1.0).is_err());
    }

    #[test]
    fn shuffled_cube_bounds() {
        let cube = shuffled_cube(&p(&[0.0, 0.0, 0.0]), 1.0).unwrap();
        assert_eq!(cube, AxisBox::cube(3, -SQRT_3, SQRT_3));
        let cube = shuffled_cube(&p(&[10.0, 15.0, 20.0]), 5.0).unwrap();
        for i in 0..3 {
            assert_abs_diff_eq!(cube.lower.coords()[i], 10.0 - 5.0 * SQRT_3, epsilon = 1e-12);
            assert_abs_diff_eq!(cube.upper.coords()[i], 20.0 + 5.0 * SQRT_3, epsilon = 1e-12);
        }
        // side = 2 sqrt(3) r_p + (M0 - m0)
        let side = cube.upper.coords()[0] - cube.lower.coords()[0];
        assert_abs_diff_eq!(side, 2.0 * SQRT_3 * 5.0 + 10.0, epsilon = 1e-12);
    }
}
