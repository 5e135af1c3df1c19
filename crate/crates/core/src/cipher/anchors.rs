use serde::{Deserialize, Serialize};

use super::check_round;
use crate::error::{Error, Result};
use crate::geometry::{check_dimension, BoundingSphere, Point, PointCloud};
use crate::keystream::Keystream;

/// Key-derived pivot points for one round, with the sphere they were
/// spread around.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnchorSet {
    pub anchors: PointCloud,
    pub sphere: BoundingSphere,
}

/// Whole-degree rotation angles, one list per point (three in space,
/// one in the plane).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AngleSet {
    pub angles: Vec<Vec<i32>>,
}

// Keystream state feeding point `j` (1-based) in the given round.
fn state_index(j: usize, round: usize, n: usize) -> usize {
    j + (round / 2) * n
}

pub fn gen_anchors(sphere: &BoundingSphere, ks: &Keystream, round: usize, n: usize) -> Result<AnchorSet> {
    check_round(round)?;
    let dim = sphere.center.dim();
    check_dimension(dim)?;
    if n == 0 {
        return Err(Error::EmptyCloud);
    }
    let mut anchors = Vec::with_capacity(n);
    for j in 1..=n {
        let state = ks.state(state_index(j, round, n))?;
        let offset = Point::new(state[..dim].to_vec());
        anchors.push(sphere.center.add(&offset.scale(sphere.radius)));
    }
    Ok(AnchorSet { anchors: PointCloud::new(anchors)?, sphere: sphere.clone() })
}

pub fn gen_angles(ks: &Keystream, round: usize, n: usize, dim: usize) -> Result<AngleSet> {
    check_round(round)?;
    check_dimension(dim)?;
    // the plane uses k3 alone; space uses k4..k6
    let components = if dim == 2 { 2..3 } else { 3..6 };
    let mut angles = Vec::with_capacity(n);
    for j in 1..=n {
        let state = ks.state(state_index(j, round, n))?;
        angles.push(state[components.clone()].iter().map(|&k| (180.0 * k).floor() as i32).collect());
    }
    Ok(AngleSet { angles })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::keystream::{ChaoticKey, STATE_LEN};

    fn stream(states: Vec<[f64; STATE_LEN]>) -> Keystream {
        Keystream::from_states(states, 3).unwrap()
    }

    fn unit_sphere(dim: usize) -> BoundingSphere {
        BoundingSphere::new(Point::origin(dim), 1.0).unwrap()
    }

    #[test]
    fn anchors_on_unit_sphere_copy_keystream() {
        let ks = stream(vec![[0.5, -0.5, 0.25, 0.0, 0.0, 0.0]]);
        let set = gen_anchors(&unit_sphere(3), &ks, 1, 1).unwrap();
        assert_eq!(set.anchors.points()[0], Point::from([0.5, -0.5, 0.25]));
    }

    #[test]
    fn planar_anchors_use_first_two_components() {
        let third = 1.0 / 3.0;
        let ks = stream(vec![
            [third, -0.5, 0.25, -2.0 / 3.0, 0.8, third],
            [-2.0 / 3.0, 0.8, third, 0.0, 0.0, 0.0],
        ]);
        let set = gen_anchors(&unit_sphere(2), &ks, 1, 2).unwrap();
        assert_eq!(set.anchors.points()[0], Point::from([third, -0.5]));
        assert_eq!(set.anchors.points()[1], Point::from([-2.0 / 3.0, 0.8]));
        let angles = gen_angles(&ks, 1, 2, 2).unwrap();
        assert_eq!(angles.angles, vec![vec![45], vec![60]]);
    }

    #[test]
    fn angle_floor_examples() {
        let ks = stream(vec![[0.0, 0.0, 0.0, -0.5, 0.25, 0.216]]);
        let angles = gen_angles(&ks, 1, 1, 3).unwrap();
        assert_eq!(angles.angles, vec![vec![-90, 45, 38]]);
        let ks = stream(vec![[0.0, 0.0, 0.0, 1.0 / 3.0, -1.0, 0.0]]);
        assert_eq!(gen_angles(&ks, 1, 1, 3).unwrap().angles, vec![vec![60, -180, 0]]);
    }

    #[test]
    fn second_round_reads_offset_states() {
        let key = ChaoticKey::new([0.7, 0.2, -0.6, 0.9, -0.8, -0.7], 3).unwrap();
        let ks = Keystream::generate(&key, 6).unwrap();
        let sphere = BoundingSphere::new(Point::from([1.0, 2.0, 3.0]), 2.0).unwrap();
        let r2 = gen_anchors(&sphere, &ks, 2, 3).unwrap();
        for j in 1..=3 {
            let k = ks.state(j + 3).unwrap();
            let expected = Point::from([1.0 + 2.0 * k[0], 2.0 + 2.0 * k[1], 3.0 + 2.0 * k[2]]);
            assert_eq!(r2.anchors.points()[j - 1], expected);
        }
        assert!(gen_anchors(&sphere, &ks, 2, 4).is_err());
        assert!(gen_anchors(&sphere, &ks, 3, 1).is_err());
        assert!(gen_angles(&ks, 2, 4, 3).is_err());
    }

    #[test]
    fn anchors_stay_near_center() {
        let key = ChaoticKey::new([0.13, -0.27, 0.39, 0.41, -0.58, 0.66], 4).unwrap();
        let ks = Keystream::generate(&key, 80).unwrap();
        let sphere = BoundingSphere::new(Point::from([-40.0, 7.0, 300.0]), 12.5).unwrap();
        for round in [1, 2] {
            let set = gen_anchors(&sphere, &ks, round, 40).unwrap();
            for a in set.anchors.points() {
                assert!(a.distance(&sphere.center) <= 3f64.sqrt() * sphere.radius + 1e-9);
            }
        }
        let plane = BoundingSphere::new(Point::from([5.0, -5.0]), 3.0).unwrap();
        for a in gen_anchors(&plane, &ks, 1, 40).unwrap().anchors.points() {
            assert!(a.distance(&plane.center) <= 2f64.sqrt() * plane.radius + 1e-9);
        }
    }
}
