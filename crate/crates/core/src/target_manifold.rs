//! Geometry of the pair of disjoint well manifolds m+/m- in the target space:
//! signed distances, nearest-point projections onto the tubular neighborhoods,
//! and the sets of points realizing the gap distance.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ManifoldError {
    #[error("invalid manifold configuration: {0}")]
    InvalidConfig(String),
    #[error("point is farther than dist_m/2 from both well components")]
    OutsideHalfTubes,
    #[error("point outside the 2*delta0 tube of m; nearest-point projection not guaranteed unique")]
    OutsideTube,
    #[error("point is not on the manifold within tolerance")]
    NotOnManifold,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    Plus,
    Minus,
}

/// The two well components. Capsules must face each other exactly: parallel
/// spines of equal length displaced perpendicular to their direction, so that
/// the minimal-pair set is a continuum (the facing flat sides). The capsule
/// boundary is C^{1,1} rather than C-infinity; accepted deliberately.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ManifoldKind {
    TwoSpheres {
        center_plus: Vec<f64>,
        radius_plus: f64,
        center_minus: Vec<f64>,
        radius_minus: f64,
    },
    TwoCapsules {
        seg_plus: [Vec<f64>; 2],
        radius_plus: f64,
        seg_minus: [Vec<f64>; 2],
        radius_minus: f64,
    },
    /// Formal degenerate case in n = 1 (0-spheres enclose nothing): U+/- are
    /// empty and the signed distance is always -dist to the point. Provided as
    /// a scalar Allen-Cahn validation oracle.
    TwoPoints { a_plus: f64, a_minus: f64 },
}

#[derive(Debug, Clone)]
pub struct ManifoldPair {
    pub ambient_dim: usize,
    pub kind: ManifoldKind,
    /// dist_m, the Euclidean distance between the two components.
    pub gap: f64,
    /// delta0; the nearest-point projection is single-valued on the
    /// 2*delta0 tube.
    pub tube_radius: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum MinimalSet {
    Point(Vec<f64>),
    Segment { a: Vec<f64>, b: Vec<f64> },
}

impl MinimalSet {
    /// A representative point of the set (the point itself, or the midpoint).
    pub fn representative(&self) -> Vec<f64> {
        match self {
            MinimalSet::Point(p) => p.clone(),
            MinimalSet::Segment { a, b } => {
                a.iter().zip(b).map(|(x, y)| 0.5 * (x + y)).collect()
            }
        }
    }

    /// Point of the set at parameter `t` in [-1, 1] (center-relative for a
    /// segment; a point ignores `t`).
    pub fn at_parameter(&self, t: f64) -> Vec<f64> {
        match self {
            MinimalSet::Point(p) => p.clone(),
            MinimalSet::Segment { a, b } => {
                let s = 0.5 * (1.0 + t);
                a.iter().zip(b).map(|(x, y)| x + s * (y - x)).collect()
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct MinimalSets {
    pub plus: MinimalSet,
    pub minus: MinimalSet,
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

#[inline]
fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Closest point on the segment [a, b] to u, returned as the clamped parameter.
fn segment_param(u: &[f64], a: &[f64], b: &[f64]) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 0..u.len() {
        let d = b[i] - a[i];
        num += (u[i] - a[i]) * d;
        den += d * d;
    }
    (num / den).clamp(0.0, 1.0)
}

fn dist_point_segment(u: &[f64], a: &[f64], b: &[f64]) -> f64 {
    let t = segment_param(u, a, b);
    let mut s = 0.0;
    for i in 0..u.len() {
        let q = a[i] + t * (b[i] - a[i]);
        s += (u[i] - q) * (u[i] - q);
    }
    s.sqrt()
}

impl ManifoldPair {
    /// Builds the pair, derives gap and the default tube radius
    /// delta0 = 0.25 * min(radius-, radius+, gap/2), and checks the tube and
    /// disjointness invariants. Pass `tube_radius = None` for the default.
    pub fn new(kind: ManifoldKind, tube_radius: Option<f64>) -> Result<Self, ManifoldError> {
        let (ambient_dim, gap, reach) = match &kind {
            ManifoldKind::TwoSpheres {
                center_plus,
                radius_plus,
                center_minus,
                radius_minus,
            } => {
                let n = center_plus.len();
                if n == 0 || center_minus.len() != n {
                    return Err(ManifoldError::InvalidConfig(
                        "sphere centers must share a nonzero dimension".into(),
                    ));
                }
                if *radius_plus <= 0.0 || *radius_minus <= 0.0 {
                    return Err(ManifoldError::InvalidConfig("radii must be positive".into()));
                }
                let c2c = dist2(center_plus, center_minus).sqrt();
                if c2c <= radius_plus + radius_minus {
                    return Err(ManifoldError::InvalidConfig(format!(
                        "spheres overlap or touch: |c+ - c-| = {c2c} <= r+ + r-"
                    )));
                }
                let gap = c2c - radius_plus - radius_minus;
                (n, gap, radius_plus.min(*radius_minus))
            }
            ManifoldKind::TwoCapsules {
                seg_plus,
                radius_plus,
                seg_minus,
                radius_minus,
            } => {
                let n = seg_plus[0].len();
                for s in [&seg_plus[1], &seg_minus[0], &seg_minus[1]] {
                    if s.len() != n {
                        return Err(ManifoldError::InvalidConfig(
                            "capsule endpoints must share a dimension".into(),
                        ));
                    }
                }
                if n < 2 {
                    return Err(ManifoldError::InvalidConfig(
                        "capsules need ambient dimension >= 2".into(),
                    ));
                }
                if *radius_plus <= 0.0 || *radius_minus <= 0.0 {
                    return Err(ManifoldError::InvalidConfig("radii must be positive".into()));
                }
                let dir_p: Vec<f64> = seg_plus[1].iter().zip(&seg_plus[0]).map(|(b, a)| b - a).collect();
                let dir_m: Vec<f64> = seg_minus[1].iter().zip(&seg_minus[0]).map(|(b, a)| b - a).collect();
                let lp = norm(&dir_p);
                let lm = norm(&dir_m);
                if lp == 0.0 || lm == 0.0 {
                    return Err(ManifoldError::InvalidConfig("degenerate capsule spine".into()));
                }
                if (lp - lm).abs() > 1e-12 * lp.max(lm) {
                    return Err(ManifoldError::InvalidConfig(
                        "capsule spines must have equal length (facing flat sides)".into(),
                    ));
                }
                let cosang = dot(&dir_p, &dir_m) / (lp * lm);
                if (cosang.abs() - 1.0).abs() > 1e-12 {
                    return Err(ManifoldError::InvalidConfig(
                        "capsule spines must be parallel (facing flat sides)".into(),
                    ));
                }
                // orient the minus spine like the plus spine
                let (m0, m1) = if cosang > 0.0 {
                    (&seg_minus[0], &seg_minus[1])
                } else {
                    (&seg_minus[1], &seg_minus[0])
                };
                let disp: Vec<f64> = m0.iter().zip(&seg_plus[0]).map(|(a, b)| a - b).collect();
                let axial = dot(&disp, &dir_p) / lp;
                if axial.abs() > 1e-12 * (1.0 + norm(&disp)) {
                    return Err(ManifoldError::InvalidConfig(
                        "capsule spines must face each other (perpendicular displacement)".into(),
                    ));
                }
                let disp1: Vec<f64> = m1.iter().zip(&seg_plus[1]).map(|(a, b)| a - b).collect();
                if dist2(&disp, &disp1).sqrt() > 1e-12 * (1.0 + norm(&disp)) {
                    return Err(ManifoldError::InvalidConfig(
                        "capsule spines must be exact perpendicular translates".into(),
                    ));
                }
                let line_dist = norm(&disp);
                if line_dist <= radius_plus + radius_minus {
                    return Err(ManifoldError::InvalidConfig("capsules overlap or touch".into()));
                }
                let gap = line_dist - radius_plus - radius_minus;
                (n, gap, radius_plus.min(*radius_minus))
            }
            ManifoldKind::TwoPoints { a_plus, a_minus } => {
                if a_plus == a_minus {
                    return Err(ManifoldError::InvalidConfig("the two points coincide".into()));
                }
                (1, (a_plus - a_minus).abs(), f64::INFINITY)
            }
        };
        let reach_bound = reach.min(gap / 2.0);
        let tube_radius = tube_radius.unwrap_or(0.25 * reach_bound);
        if !(tube_radius > 0.0) || 2.0 * tube_radius >= reach_bound {
            return Err(ManifoldError::InvalidConfig(format!(
                "tube radius {tube_radius} violates 2*delta0 < min(reach, gap/2) = {reach_bound}"
            )));
        }
        Ok(Self {
            ambient_dim,
            kind,
            gap,
            tube_radius,
        })
    }

    pub fn two_spheres(
        center_plus: Vec<f64>,
        radius_plus: f64,
        center_minus: Vec<f64>,
        radius_minus: f64,
    ) -> Result<Self, ManifoldError> {
        Self::new(
            ManifoldKind::TwoSpheres {
                center_plus,
                radius_plus,
                center_minus,
                radius_minus,
            },
            None,
        )
    }

    /// Signed distance to one component: positive strictly inside the enclosed
    /// domain, negative outside, zero on the manifold. Total on R^n.
    pub fn signed_dist_component(&self, u: &[f64], side: Side) -> f64 {
        match &self.kind {
            ManifoldKind::TwoSpheres {
                center_plus,
                radius_plus,
                center_minus,
                radius_minus,
            } => {
                let (c, r) = match side {
                    Side::Plus => (center_plus, radius_plus),
                    Side::Minus => (center_minus, radius_minus),
                };
                r - dist2(u, c).sqrt()
            }
            ManifoldKind::TwoCapsules {
                seg_plus,
                radius_plus,
                seg_minus,
                radius_minus,
            } => {
                let (seg, r) = match side {
                    Side::Plus => (seg_plus, radius_plus),
                    Side::Minus => (seg_minus, radius_minus),
                };
                r - dist_point_segment(u, &seg[0], &seg[1])
            }
            ManifoldKind::TwoPoints { a_plus, a_minus } => {
                let a = match side {
                    Side::Plus => *a_plus,
                    Side::Minus => *a_minus,
                };
                -(u[0] - a).abs()
            }
        }
    }

    /// Unsigned distance to one component.
    #[inline]
    pub fn dist_component(&self, u: &[f64], side: Side) -> f64 {
        self.signed_dist_component(u, side).abs()
    }

    /// Unsigned distance to m = m+ disjoint-union m-.
    #[inline]
    pub fn dist_m(&self, u: &[f64]) -> f64 {
        self.dist_component(u, Side::Plus)
            .min(self.dist_component(u, Side::Minus))
    }

    /// The branchwise signed distance d_m: the active side and its signed
    /// distance. On the equidistant midset both branch conditions hold with
    /// equality and the "+" side is returned; the choice is observationally
    /// irrelevant downstream because the quasi-distance is continuous there.
    pub fn signed_dist_m(&self, u: &[f64]) -> Result<(Side, f64), ManifoldError> {
        let half = 0.5 * self.gap;
        let dp = self.signed_dist_component(u, Side::Plus);
        if dp.abs() <= half {
            return Ok((Side::Plus, dp));
        }
        let dm = self.signed_dist_component(u, Side::Minus);
        if dm.abs() <= half {
            return Ok((Side::Minus, dm));
        }
        Err(ManifoldError::OutsideHalfTubes)
    }

    /// True when u lies strictly inside the open enclosed domain U_side.
    pub fn inside(&self, u: &[f64], side: Side) -> bool {
        match self.kind {
            ManifoldKind::TwoPoints { .. } => false,
            _ => self.signed_dist_component(u, side) > 0.0,
        }
    }

    fn project_component(&self, u: &[f64], side: Side, out: &mut [f64]) {
        match &self.kind {
            ManifoldKind::TwoSpheres {
                center_plus,
                radius_plus,
                center_minus,
                radius_minus,
            } => {
                let (c, r) = match side {
                    Side::Plus => (center_plus, radius_plus),
                    Side::Minus => (center_minus, radius_minus),
                };
                let rho = dist2(u, c).sqrt();
                for i in 0..u.len() {
                    out[i] = c[i] + r * (u[i] - c[i]) / rho;
                }
            }
            ManifoldKind::TwoCapsules {
                seg_plus,
                radius_plus,
                seg_minus,
                radius_minus,
            } => {
                let (seg, r) = match side {
                    Side::Plus => (seg_plus, radius_plus),
                    Side::Minus => (seg_minus, radius_minus),
                };
                let t = segment_param(u, &seg[0], &seg[1]);
                let mut rho2 = 0.0;
                for i in 0..u.len() {
                    let q = seg[0][i] + t * (seg[1][i] - seg[0][i]);
                    out[i] = q;
                    rho2 += (u[i] - q) * (u[i] - q);
                }
                let rho = rho2.sqrt();
                for i in 0..u.len() {
                    out[i] += r * (u[i] - out[i]) / rho;
                }
            }
            ManifoldKind::TwoPoints { a_plus, a_minus } => {
                out[0] = match side {
                    Side::Plus => *a_plus,
                    Side::Minus => *a_minus,
                };
            }
        }
    }

    /// The component of m nearest to u.
    #[inline]
    pub fn nearer_side(&self, u: &[f64]) -> Side {
        if self.dist_component(u, Side::Plus) <= self.dist_component(u, Side::Minus) {
            Side::Plus
        } else {
            Side::Minus
        }
    }

    /// Nearest-point projection onto m, defined on the 2*delta0 tube.
    pub fn project_m(&self, u: &[f64]) -> Result<Vec<f64>, ManifoldError> {
        let mut out = vec![0.0; self.ambient_dim];
        self.project_m_into(u, &mut out)?;
        Ok(out)
    }

    /// Projection onto a prescribed component, defined on its 2*delta0 tube.
    pub fn project_side(&self, u: &[f64], side: Side) -> Result<Vec<f64>, ManifoldError> {
        if self.dist_component(u, side) >= 2.0 * self.tube_radius {
            return Err(ManifoldError::OutsideTube);
        }
        let mut out = vec![0.0; self.ambient_dim];
        self.project_component(u, side, &mut out);
        Ok(out)
    }

    pub fn project_m_into(&self, u: &[f64], out: &mut [f64]) -> Result<(), ManifoldError> {
        if self.dist_m(u) >= 2.0 * self.tube_radius {
            return Err(ManifoldError::OutsideTube);
        }
        self.project_component(u, self.nearer_side(u), out);
        Ok(())
    }

    /// The sets M+/- of points realizing dist_m.
    pub fn minimal_sets(&self) -> MinimalSets {
        match &self.kind {
            ManifoldKind::TwoSpheres {
                center_plus,
                radius_plus,
                center_minus,
                radius_minus,
            } => {
                let c2c = dist2(center_plus, center_minus).sqrt();
                let nu: Vec<f64> = center_minus
                    .iter()
                    .zip(center_plus)
                    .map(|(cm, cp)| (cm - cp) / c2c)
                    .collect();
                let p_plus: Vec<f64> = center_plus
                    .iter()
                    .zip(&nu)
                    .map(|(c, v)| c + radius_plus * v)
                    .collect();
                let p_minus: Vec<f64> = center_minus
                    .iter()
                    .zip(&nu)
                    .map(|(c, v)| c - radius_minus * v)
                    .collect();
                MinimalSets {
                    plus: MinimalSet::Point(p_plus),
                    minus: MinimalSet::Point(p_minus),
                }
            }
            ManifoldKind::TwoCapsules {
                seg_plus,
                radius_plus,
                seg_minus,
                radius_minus,
            } => {
                // facing direction: perpendicular displacement from + spine to - spine
                let dir_p: Vec<f64> = seg_plus[1].iter().zip(&seg_plus[0]).map(|(b, a)| b - a).collect();
                let dir_m: Vec<f64> = seg_minus[1].iter().zip(&seg_minus[0]).map(|(b, a)| b - a).collect();
                let (m0, m1) = if dot(&dir_p, &dir_m) > 0.0 {
                    (seg_minus[0].clone(), seg_minus[1].clone())
                } else {
                    (seg_minus[1].clone(), seg_minus[0].clone())
                };
                let disp: Vec<f64> = m0.iter().zip(&seg_plus[0]).map(|(a, b)| a - b).collect();
                let line_dist = norm(&disp);
                let nu: Vec<f64> = disp.iter().map(|d| d / line_dist).collect();
                let shift = |p: &[f64], r: f64, sgn: f64| -> Vec<f64> {
                    p.iter().zip(&nu).map(|(x, v)| x + sgn * r * v).collect()
                };
                MinimalSets {
                    plus: MinimalSet::Segment {
                        a: shift(&seg_plus[0], *radius_plus, 1.0),
                        b: shift(&seg_plus[1], *radius_plus, 1.0),
                    },
                    minus: MinimalSet::Segment {
                        a: shift(&m0, *radius_minus, -1.0),
                        b: shift(&m1, *radius_minus, -1.0),
                    },
                }
            }
            ManifoldKind::TwoPoints { a_plus, a_minus } => MinimalSets {
                plus: MinimalSet::Point(vec![*a_plus]),
                minus: MinimalSet::Point(vec![*a_minus]),
            },
        }
    }

    /// Checks the minimal-pair characterization |p+ - p-| = dist_m for points
    /// lying on the respective components (within tol).
    pub fn is_minimal_pair(
        &self,
        p_plus: &[f64],
        p_minus: &[f64],
        tol: f64,
    ) -> Result<bool, ManifoldError> {
        if self.dist_component(p_plus, Side::Plus) > tol
            || self.dist_component(p_minus, Side::Minus) > tol
        {
            return Err(ManifoldError::NotOnManifold);
        }
        let d = dist2(p_plus, p_minus).sqrt();
        Ok((d - self.gap).abs() <= tol)
    }

    /// Curvature scale used for reaction-stiffness estimates: the largest
    /// principal curvature of either component (0 for point wells).
    pub fn max_curvature(&self) -> f64 {
        match &self.kind {
            ManifoldKind::TwoSpheres {
                radius_plus,
                radius_minus,
                ..
            }
            | ManifoldKind::TwoCapsules {
                radius_plus,
                radius_minus,
                ..
            } => 1.0 / radius_plus.min(*radius_minus),
            ManifoldKind::TwoPoints { .. } => 0.0,
        }
    }

    /// Depth of one enclosed domain, sup over U_side of dist(., m_side).
    /// Zero for point wells.
    pub fn enclosed_inradius(&self, side: Side) -> f64 {
        match &self.kind {
            ManifoldKind::TwoSpheres {
                radius_plus,
                radius_minus,
                ..
            }
            | ManifoldKind::TwoCapsules {
                radius_plus,
                radius_minus,
                ..
            } => match side {
                Side::Plus => *radius_plus,
                Side::Minus => *radius_minus,
            },
            ManifoldKind::TwoPoints { .. } => 0.0,
        }
    }

    /// Distance from u to the non-smooth core of the component distance
    /// functions (sphere centers / capsule spines); the projection direction
    /// degenerates there.
    pub fn medial_margin(&self, u: &[f64]) -> f64 {
        match &self.kind {
            ManifoldKind::TwoSpheres {
                center_plus,
                center_minus,
                ..
            } => dist2(u, center_plus)
                .sqrt()
                .min(dist2(u, center_minus).sqrt()),
            ManifoldKind::TwoCapsules {
                seg_plus, seg_minus, ..
            } => dist_point_segment(u, &seg_plus[0], &seg_plus[1])
                .min(dist_point_segment(u, &seg_minus[0], &seg_minus[1])),
            // distance to a point is non-differentiable only at the point
            // itself, where the composed quasi-distance is still C^1
            ManifoldKind::TwoPoints { .. } => f64::INFINITY,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn spheres() -> ManifoldPair {
        ManifoldPair::two_spheres(vec![2.0, 0.0], 1.0, vec![-2.0, 0.0], 1.0).unwrap()
    }

    fn capsules() -> ManifoldPair {
        ManifoldPair::new(
            ManifoldKind::TwoCapsules {
                seg_plus: [vec![3.0, -1.0], vec![3.0, 1.0]],
                radius_plus: 0.5,
                seg_minus: [vec![-3.0, -1.0], vec![-3.0, 1.0]],
                radius_minus: 0.5,
            },
            None,
        )
        .unwrap()
    }

    #[test]
    fn sphere_signed_distances() {
        let m = spheres();
        assert_eq!(m.gap, 2.0);
        assert!((m.signed_dist_component(&[2.0, 0.0], Side::Plus) - 1.0).abs() < 1e-15);
        assert!(m.signed_dist_component(&[1.0, 0.0], Side::Plus).abs() < 1e-15);
        assert!((m.signed_dist_component(&[0.0, 0.0], Side::Minus) + 1.0).abs() < 1e-15);
    }

    #[test]
    fn branchwise_signed_distance() {
        let m = spheres();
        let (side, d) = m.signed_dist_m(&[0.5, 0.0]).unwrap();
        assert_eq!(side, Side::Plus);
        assert!((d + 0.5).abs() < 1e-15);
        let (side, d) = m.signed_dist_m(&[-1.2, 0.0]).unwrap();
        assert_eq!(side, Side::Minus);
        assert!((d - 0.2).abs() < 1e-15);
        assert!(matches!(
            m.signed_dist_m(&[0.0, 5.0]),
            Err(ManifoldError::OutsideHalfTubes)
        ));
    }

    #[test]
    fn midset_tie_breaks_to_plus() {
        let m = spheres();
        let (side, d) = m.signed_dist_m(&[0.0, 0.0]).unwrap();
        assert_eq!(side, Side::Plus);
        assert!((d + 1.0).abs() < 1e-15);
    }

    #[test]
    fn projection_examples() {
        // delta0 just under 0.5 so the example point (0.5, 0) sits inside the
        // 2*delta0 tube
        let m = ManifoldPair::new(
            ManifoldKind::TwoSpheres {
                center_plus: vec![2.0, 0.0],
                radius_plus: 1.0,
                center_minus: vec![-2.0, 0.0],
                radius_minus: 1.0,
            },
            Some(0.4999),
        )
        .unwrap();
        let p = m.project_m(&[0.5, 0.0]).unwrap();
        assert!((p[0] - 1.0).abs() < 1e-14 && p[1].abs() < 1e-14);

        let c = capsules();
        let p = c.project_m(&[2.4, 0.3]).unwrap();
        assert!((p[0] - 2.5).abs() < 1e-14 && (p[1] - 0.3).abs() < 1e-14);

        // fixed point on the manifold
        let q = m.project_m(&[1.0, 0.0]).unwrap();
        assert!((q[0] - 1.0).abs() < 1e-14 && q[1].abs() < 1e-14);

        assert!(matches!(m.project_m(&[0.0, 5.0]), Err(ManifoldError::OutsideTube)));
    }

    #[test]
    fn projection_idempotent_and_distance_realizing() {
        let m = spheres();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..500 {
            let base = if rng.gen_bool(0.5) { [2.0, 0.0] } else { [-2.0, 0.0] };
            let ang: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            let rad: f64 = rng.gen_range(0.6..1.4); // within the 2*delta0 tube (delta0 = 0.25)
            let u = [base[0] + rad * ang.cos(), base[1] + rad * ang.sin()];
            let p = m.project_m(&u).unwrap();
            let d = m.dist_m(&u);
            let pd = ((u[0] - p[0]).powi(2) + (u[1] - p[1]).powi(2)).sqrt();
            assert!((pd - d).abs() <= 1e-12 * (1.0 + d));
            let pp = m.project_m(&p).unwrap();
            assert!(dist2(&p, &pp).sqrt() <= 1e-12);
        }
    }

    #[test]
    fn component_distance_is_lipschitz() {
        let m = capsules();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..2000 {
            let u = [rng.gen_range(-5.0..5.0), rng.gen_range(-4.0..4.0)];
            let v = [rng.gen_range(-5.0..5.0), rng.gen_range(-4.0..4.0)];
            for side in [Side::Plus, Side::Minus] {
                let du = m.signed_dist_component(&u, side);
                let dv = m.signed_dist_component(&v, side);
                assert!((du - dv).abs() <= dist2(&u, &v).sqrt() + 1e-12);
            }
        }
    }

    #[test]
    fn triangle_inequality_through_gap() {
        let m = spheres();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..2000 {
            let u = [rng.gen_range(-6.0..6.0), rng.gen_range(-6.0..6.0)];
            let s = m.dist_component(&u, Side::Plus) + m.dist_component(&u, Side::Minus);
            assert!(s >= m.gap - 1e-12);
        }
    }

    #[test]
    fn minimal_sets_spheres_and_capsules() {
        let m = spheres();
        let ms = m.minimal_sets();
        assert_eq!(ms.plus, MinimalSet::Point(vec![1.0, 0.0]));
        assert_eq!(ms.minus, MinimalSet::Point(vec![-1.0, 0.0]));

        let c = capsules();
        let ms = c.minimal_sets();
        match &ms.plus {
            MinimalSet::Segment { a, b } => {
                assert!((a[0] - 2.5).abs() < 1e-14 && (b[0] - 2.5).abs() < 1e-14);
                assert!((a[1] + 1.0).abs() < 1e-14 && (b[1] - 1.0).abs() < 1e-14);
            }
            _ => panic!("expected facing segment"),
        }

        let p = ManifoldPair::new(ManifoldKind::TwoPoints { a_plus: 1.0, a_minus: -1.0 }, None).unwrap();
        let ms = p.minimal_sets();
        assert_eq!(ms.plus, MinimalSet::Point(vec![1.0]));
        assert_eq!(ms.minus, MinimalSet::Point(vec![-1.0]));
    }

    #[test]
    fn minimal_pair_checks() {
        let m = spheres();
        assert!(m.is_minimal_pair(&[1.0, 0.0], &[-1.0, 0.0], 1e-9).unwrap());

        let c = capsules();
        assert!(c.is_minimal_pair(&[2.5, 0.4], &[-2.5, 0.4], 1e-9).unwrap());
        assert!(!c.is_minimal_pair(&[2.5, 0.4], &[-2.5, -0.4], 1e-9).unwrap());
        assert!(matches!(
            c.is_minimal_pair(&[2.8, 0.4], &[-2.5, 0.4], 1e-9),
            Err(ManifoldError::NotOnManifold)
        ));
    }

    #[test]
    fn minimal_pairs_align_with_common_normal() {
        // q = p + gap * nu for the facing-direction unit vector nu
        let c = capsules();
        let ms = c.minimal_sets();
        for t in [-1.0, -0.3, 0.2, 1.0] {
            let p = ms.plus.at_parameter(t);
            let q = ms.minus.at_parameter(t);
            assert!(c.is_minimal_pair(&p, &q, 1e-9).unwrap());
            // common normal is -e_x here
            assert!((q[0] - (p[0] - c.gap)).abs() < 1e-12);
            assert!((q[1] - p[1]).abs() < 1e-12);
        }
    }

    #[test]
    fn two_points_degenerate_case() {
        let p = ManifoldPair::new(ManifoldKind::TwoPoints { a_plus: 1.0, a_minus: -1.0 }, None).unwrap();
        assert_eq!(p.gap, 2.0);
        // always non-positive: U+- are empty
        assert!((p.signed_dist_component(&[0.25], Side::Plus) + 0.75).abs() < 1e-15);
        assert!(!p.inside(&[1.0 + 1e-9], Side::Plus));
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(ManifoldPair::two_spheres(vec![1.0, 0.0], 1.0, vec![-1.0, 0.0], 1.0).is_err());
        assert!(ManifoldPair::new(
            ManifoldKind::TwoCapsules {
                seg_plus: [vec![3.0, -1.0], vec![3.0, 1.0]],
                radius_plus: 0.5,
                seg_minus: [vec![-3.0, -1.0], vec![-3.0, 2.0]],
                radius_minus: 0.5,
            },
            None,
        )
        .is_err());
        // oversized tube radius
        assert!(
            ManifoldPair::new(
                ManifoldKind::TwoSpheres {
                    center_plus: vec![2.0, 0.0],
                    radius_plus: 1.0,
                    center_minus: vec![-2.0, 0.0],
                    radius_minus: 1.0,
                },
                Some(0.6),
            )
            .is_err()
        );
    }
}
