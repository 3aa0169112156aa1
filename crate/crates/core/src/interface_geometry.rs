//! Analytic evolving interfaces (exact mean-curvature-flow solutions), their
//! signed distance, and the extended normal/curvature fields xi and H with
//! their cutoffs, plus a finite-difference verifier for the transport
//! identities they satisfy.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::num_util::quintic_cutoff;

#[derive(Debug, Error)]
pub enum InterfaceError {
    #[error("normal direction undefined at the sphere center")]
    AtCenter,
    #[error("identity sample lies outside B_(delta0/2) of the interface")]
    SampleOutsideTube,
    #[error("invalid interface configuration: {0}")]
    InvalidConfig(String),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InterfaceKind {
    /// r(t) = sqrt(r0^2 - 2 (d-1) t), the exact shrinking-sphere MCF solution
    ShrinkingSphere { center: Vec<f64>, r0: f64 },
    /// flat stationary front in d = 1 at x0; d_Sigma = x0 - x
    StationaryPoint { x0: f64 },
}

/// d_Sigma > 0 inside the sphere (Omega+ = interior).
#[derive(Debug, Clone)]
pub struct InterfaceDescriptor {
    pub kind: InterfaceKind,
    pub spatial_dim: usize,
    /// tube half-width for the xi and H cutoffs (independent of the
    /// target-space delta0)
    pub delta0_geo: f64,
}

/// Residual report from `verify_identities`, max absolute values over samples.
#[derive(Debug, Clone, Copy)]
pub struct IdentityReport {
    /// div xi + H . xi  (O(d_Sigma) near the interface)
    pub res_a: f64,
    /// dt d_Sigma + H . grad d_Sigma
    pub res_b: f64,
    /// dt xi + (H . grad) xi + (grad H)^T xi
    pub res_c: f64,
    /// dt |xi|^2 + (H . grad) |xi|^2
    pub res_d: f64,
    /// max |d_Sigma| over the samples (the (a) contract is C1 |d| + C2 h^2)
    pub max_abs_dist: f64,
}

/// phi(x) = exp(1/(x^2-1) + 1) inside |x| < 1, zero outside.
#[inline]
pub fn phi_bump(x: f64) -> f64 {
    let x2 = x * x;
    if x2 >= 1.0 {
        0.0
    } else {
        (1.0 / (x2 - 1.0) + 1.0).exp()
    }
}

impl InterfaceDescriptor {
    pub fn new(kind: InterfaceKind, spatial_dim: usize, delta0_geo: f64) -> Result<Self, InterfaceError> {
        match &kind {
            InterfaceKind::ShrinkingSphere { center, r0 } => {
                if spatial_dim < 2 {
                    return Err(InterfaceError::InvalidConfig(
                        "shrinking sphere needs spatial dimension >= 2".into(),
                    ));
                }
                if center.len() != spatial_dim {
                    return Err(InterfaceError::InvalidConfig(
                        "center dimension mismatch".into(),
                    ));
                }
                if *r0 <= 0.0 {
                    return Err(InterfaceError::InvalidConfig("r0 must be positive".into()));
                }
            }
            InterfaceKind::StationaryPoint { .. } => {
                if spatial_dim != 1 {
                    return Err(InterfaceError::InvalidConfig(
                        "stationary point front is the d = 1 case".into(),
                    ));
                }
            }
        }
        if !(delta0_geo > 0.0) {
            return Err(InterfaceError::InvalidConfig("delta0_geo must be positive".into()));
        }
        Ok(Self {
            kind,
            spatial_dim,
            delta0_geo,
        })
    }

    /// Interface radius at time t (infinite for the flat front).
    pub fn radius(&self, t: f64) -> f64 {
        match &self.kind {
            InterfaceKind::ShrinkingSphere { r0, .. } => {
                let d = self.spatial_dim as f64;
                (r0 * r0 - 2.0 * (d - 1.0) * t).max(0.0).sqrt()
            }
            InterfaceKind::StationaryPoint { .. } => f64::INFINITY,
        }
    }

    pub fn center(&self) -> Option<&[f64]> {
        match &self.kind {
            InterfaceKind::ShrinkingSphere { center, .. } => Some(center),
            InterfaceKind::StationaryPoint { .. } => None,
        }
    }

    /// Signed distance, positive in the enclosed region Omega+.
    pub fn d_sigma(&self, x: &[f64], t: f64) -> f64 {
        match &self.kind {
            InterfaceKind::ShrinkingSphere { center, .. } => {
                let mut rho2 = 0.0;
                for i in 0..x.len() {
                    let d = x[i] - center[i];
                    rho2 += d * d;
                }
                self.radius(t) - rho2.sqrt()
            }
            InterfaceKind::StationaryPoint { x0 } => x0 - x[0],
        }
    }

    /// grad d_Sigma, the inner normal n extended off the interface.
    pub fn normal(&self, x: &[f64], _t: f64) -> Result<Vec<f64>, InterfaceError> {
        match &self.kind {
            InterfaceKind::ShrinkingSphere { center, .. } => {
                let mut rho2 = 0.0;
                for i in 0..x.len() {
                    let d = x[i] - center[i];
                    rho2 += d * d;
                }
                let rho = rho2.sqrt();
                if rho < 1e-12 {
                    return Err(InterfaceError::AtCenter);
                }
                Ok(x.iter()
                    .zip(center)
                    .map(|(xi, ci)| -(xi - ci) / rho)
                    .collect())
            }
            InterfaceKind::StationaryPoint { .. } => Ok(vec![-1.0]),
        }
    }

    /// Normal velocity V = -dt d_Sigma; (d-1)/r(t) for the shrinking sphere.
    pub fn velocity(&self, _x: &[f64], t: f64) -> f64 {
        match &self.kind {
            InterfaceKind::ShrinkingSphere { .. } => {
                let d = self.spatial_dim as f64;
                (d - 1.0) / self.radius(t)
            }
            InterfaceKind::StationaryPoint { .. } => 0.0,
        }
    }

    /// xi = phi(d_Sigma/delta0) grad d_Sigma; compactly supported in the
    /// delta0 tube, equal to the inner normal on the interface.
    pub fn xi(&self, x: &[f64], t: f64) -> Result<Vec<f64>, InterfaceError> {
        let d = self.d_sigma(x, t);
        if d.abs() >= self.delta0_geo {
            return Ok(vec![0.0; self.spatial_dim]);
        }
        let factor = phi_bump(d / self.delta0_geo);
        let mut n = self.normal(x, t)?;
        for v in n.iter_mut() {
            *v *= factor;
        }
        Ok(n)
    }

    /// xi written into a caller buffer; the hot path for grid diagnostics.
    pub fn xi_into(&self, x: &[f64], t: f64, out: &mut [f64]) -> Result<(), InterfaceError> {
        let d = self.d_sigma(x, t);
        if d.abs() >= self.delta0_geo {
            out.fill(0.0);
            return Ok(());
        }
        let factor = phi_bump(d / self.delta0_geo);
        match &self.kind {
            InterfaceKind::ShrinkingSphere { center, .. } => {
                let mut rho2 = 0.0;
                for i in 0..x.len() {
                    let dd = x[i] - center[i];
                    rho2 += dd * dd;
                }
                let rho = rho2.sqrt();
                if rho < 1e-12 {
                    return Err(InterfaceError::AtCenter);
                }
                for i in 0..x.len() {
                    out[i] = -factor * (x[i] - center[i]) / rho;
                }
            }
            InterfaceKind::StationaryPoint { .. } => out[0] = -factor,
        }
        Ok(())
    }

    /// C^2 bump: 1 on |d_Sigma| <= delta0, 0 on |d_Sigma| >= 2 delta0.
    pub fn eta0(&self, x: &[f64], t: f64) -> f64 {
        let d = self.d_sigma(x, t).abs();
        quintic_cutoff(d / self.delta0_geo - 1.0)
    }

    /// Extended curvature vector H = kappa grad d_Sigma with
    /// kappa = -(Laplacian d_Sigma)(P_Sigma(x)) eta0; constant in the normal
    /// direction inside the tube, zero beyond 2 delta0.
    pub fn h_ext(&self, x: &[f64], t: f64) -> Result<Vec<f64>, InterfaceError> {
        match &self.kind {
            InterfaceKind::ShrinkingSphere { .. } => {
                let d = self.d_sigma(x, t);
                if d.abs() >= 2.0 * self.delta0_geo {
                    return Ok(vec![0.0; self.spatial_dim]);
                }
                let dim = self.spatial_dim as f64;
                let kappa = (dim - 1.0) / self.radius(t) * self.eta0(x, t);
                let mut n = self.normal(x, t)?;
                for v in n.iter_mut() {
                    *v *= kappa;
                }
                Ok(n)
            }
            InterfaceKind::StationaryPoint { .. } => Ok(vec![0.0]),
        }
    }

    /// delta0-truncation of the identity map.
    #[inline]
    pub fn eta_trunc(&self, v: f64) -> f64 {
        v.clamp(-self.delta0_geo, self.delta0_geo)
    }

    /// chi = +1 on Omega+ (including the interface itself), -1 on Omega-.
    #[inline]
    pub fn chi(&self, x: &[f64], t: f64) -> f64 {
        if self.d_sigma(x, t) >= 0.0 {
            1.0
        } else {
            -1.0
        }
    }

    /// Analytic divergence of xi (used by the dissipation monitor):
    /// phi'(d/delta0)/delta0 + phi(d/delta0) Laplacian d_Sigma(x).
    pub fn div_xi(&self, x: &[f64], t: f64) -> f64 {
        let d = self.d_sigma(x, t);
        if d.abs() >= self.delta0_geo {
            return 0.0;
        }
        let z = d / self.delta0_geo;
        let phi = phi_bump(z);
        let z2 = z * z;
        let dphi = phi * (-2.0 * z / ((z2 - 1.0) * (z2 - 1.0)));
        let lap_d = match &self.kind {
            InterfaceKind::ShrinkingSphere { center, .. } => {
                let mut rho2 = 0.0;
                for i in 0..x.len() {
                    let dd = x[i] - center[i];
                    rho2 += dd * dd;
                }
                -((self.spatial_dim as f64) - 1.0) / rho2.sqrt()
            }
            InterfaceKind::StationaryPoint { .. } => 0.0,
        };
        dphi / self.delta0_geo + phi * lap_d
    }

    /// Finite-difference verification of the transport identities satisfied
    /// by d_Sigma, xi and H inside the delta0 tube. Samples must lie within
    /// B_(delta0/2) of Sigma_t.
    pub fn verify_identities(
        &self,
        t: f64,
        samples: &[Vec<f64>],
        fd_step: f64,
    ) -> Result<IdentityReport, InterfaceError> {
        let dim = self.spatial_dim;
        let h = fd_step;
        let mut rep = IdentityReport {
            res_a: 0.0,
            res_b: 0.0,
            res_c: 0.0,
            res_d: 0.0,
            max_abs_dist: 0.0,
        };
        for x in samples {
            let dist = self.d_sigma(x, t);
            if dist.abs() > 0.5 * self.delta0_geo {
                return Err(InterfaceError::SampleOutsideTube);
            }
            rep.max_abs_dist = rep.max_abs_dist.max(dist.abs());
            let hvec = self.h_ext(x, t)?;
            let xi = self.xi(x, t)?;

            // displaced sample points per axis
            let mut xp = vec![x.clone(); dim];
            let mut xm = vec![x.clone(); dim];
            for i in 0..dim {
                xp[i][i] += h;
                xm[i][i] -= h;
            }

            // (a) div xi + H . xi
            let mut div_xi = 0.0;
            for i in 0..dim {
                let a = self.xi(&xp[i], t)?[i];
                let b = self.xi(&xm[i], t)?[i];
                div_xi += (a - b) / (2.0 * h);
            }
            let hx: f64 = hvec.iter().zip(&xi).map(|(a, b)| a * b).sum();
            rep.res_a = rep.res_a.max((div_xi + hx).abs());

            // (b) dt d + H . grad d
            let ddt = (self.d_sigma(x, t + h) - self.d_sigma(x, t - h)) / (2.0 * h);
            let mut adv = 0.0;
            for i in 0..dim {
                let gd = (self.d_sigma(&xp[i], t) - self.d_sigma(&xm[i], t)) / (2.0 * h);
                adv += hvec[i] * gd;
            }
            rep.res_b = rep.res_b.max((ddt + adv).abs());

            // (c) dt xi + (H . grad) xi + (grad H)^T xi
            let xi_tp = self.xi(x, t + h)?;
            let xi_tm = self.xi(x, t - h)?;
            for c in 0..dim {
                let mut r = (xi_tp[c] - xi_tm[c]) / (2.0 * h);
                for i in 0..dim {
                    let dxi = (self.xi(&xp[i], t)?[c] - self.xi(&xm[i], t)?[c]) / (2.0 * h);
                    r += hvec[i] * dxi;
                    // (grad H)^T xi, component c: sum_i dH_i/dx_c xi_i
                    let dh = (self.h_ext(&xp[c], t)?[i] - self.h_ext(&xm[c], t)?[i]) / (2.0 * h);
                    r += dh * xi[i];
                }
                rep.res_c = rep.res_c.max(r.abs());
            }

            // (d) dt |xi|^2 + (H . grad) |xi|^2
            let norm2 = |v: &[f64]| v.iter().map(|a| a * a).sum::<f64>();
            let mut r = (norm2(&xi_tp) - norm2(&xi_tm)) / (2.0 * h);
            for i in 0..dim {
                let np = norm2(&self.xi(&xp[i], t)?);
                let nm = norm2(&self.xi(&xm[i], t)?);
                r += hvec[i] * (np - nm) / (2.0 * h);
            }
            rep.res_d = rep.res_d.max(r.abs());
        }
        Ok(rep)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn circle() -> InterfaceDescriptor {
        InterfaceDescriptor::new(
            InterfaceKind::ShrinkingSphere {
                center: vec![0.0, 0.0],
                r0: 0.3,
            },
            2,
            0.1,
        )
        .unwrap()
    }

    #[test]
    fn shrinking_circle_radius_law() {
        let c = circle();
        let r = c.radius(0.03);
        assert!((r - 0.03f64.sqrt()).abs() < 1e-12);
        // V r = 1 exactly for the circle
        for t in [0.0, 0.01, 0.02, 0.03] {
            let v = c.velocity(&[0.0, 0.0], t);
            assert!((v * c.radius(t) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn signed_distance_and_normal() {
        let c = circle();
        let x = [0.3, 0.0];
        assert!(c.d_sigma(&x, 0.0).abs() < 1e-15);
        let n = c.normal(&x, 0.0).unwrap();
        assert!((n[0] + 1.0).abs() < 1e-15 && n[1].abs() < 1e-15);
        // positive inside
        assert!(c.d_sigma(&[0.0, 0.1], 0.0) > 0.0);
        assert!(matches!(c.normal(&[0.0, 0.0], 0.0), Err(InterfaceError::AtCenter)));
    }

    #[test]
    fn xi_values_and_cutoff() {
        let c = circle();
        let t = 0.0;
        // on Sigma: |xi| = 1 (phi(0) = 1)
        let xi = c.xi(&[0.3, 0.0], t).unwrap();
        let n = (xi[0] * xi[0] + xi[1] * xi[1]).sqrt();
        assert!((n - 1.0).abs() < 1e-14);
        // |d| = delta0: zero
        let xi = c.xi(&[0.4, 0.0], t).unwrap();
        assert_eq!(xi, vec![0.0, 0.0]);
        // d/delta0 = 1/2: |xi| = e^(-1/3), inside the sandwich bounds
        let xi = c.xi(&[0.25, 0.0], t).unwrap();
        let n = (xi[0] * xi[0] + xi[1] * xi[1]).sqrt();
        let expect = (-1.0f64 / 3.0).exp();
        assert!((n - expect).abs() < 1e-12);
        assert!(n <= 0.875 && n >= 0.0);
    }

    #[test]
    fn phi_sandwich_bounds() {
        for k in 0..=1000 {
            let x = -1.2 + 2.4 * k as f64 / 1000.0;
            let p = phi_bump(x);
            assert_eq!(p, phi_bump(-x));
            if x.abs() >= 1.0 {
                assert_eq!(p, 0.0);
            }
            if x.abs() <= 0.5 {
                assert!(1.0 - 4.0 * x * x <= p + 1e-12);
                assert!(p <= 1.0 - 0.5 * x * x + 1e-12);
            }
        }
    }

    #[test]
    fn one_minus_xi_dot_n_controls_distance_squared() {
        // 1 - xi . n >= C min(d^2, 1) with C = min(1/(2 delta0^2), 1 - phi(1/2))
        // scaled to the tube; the explicit constant comes from the phi sandwich
        let c = circle();
        let d0 = c.delta0_geo;
        let cst = (1.0 / (2.0 * d0 * d0)).min((1.0 - phi_bump(0.5)) / (d0 * d0 * 0.25));
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..1000 {
            let ang: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            let rho: f64 = rng.gen_range(0.05..0.55);
            let x = [rho * ang.cos(), rho * ang.sin()];
            let d = c.d_sigma(&x, 0.0);
            let xi = c.xi(&x, 0.0).unwrap();
            let n = c.normal(&x, 0.0).unwrap();
            let dot: f64 = xi.iter().zip(&n).map(|(a, b)| a * b).sum();
            assert!(dot <= 1.0 + 1e-14);
            let lower = if d.abs() <= 0.5 * d0 {
                0.5 * (d / d0) * (d / d0)
            } else {
                1.0 - phi_bump(0.5)
            };
            assert!(1.0 - dot + 1e-12 >= lower.min(1.0));
            let _ = cst;
        }
    }

    #[test]
    fn curvature_extension() {
        let c = circle();
        let t = 0.03;
        let r = c.radius(t);
        let x = [r, 0.0];
        let h = c.h_ext(&x, t).unwrap();
        let hn = (h[0] * h[0] + h[1] * h[1]).sqrt();
        assert!((hn - 1.0 / r).abs() < 1e-12);
        assert!(h[0] < 0.0, "curvature vector points to the inner normal");
        // constant along the normal inside the delta0 tube
        let x2 = [r - 0.05, 0.0];
        let h2 = c.h_ext(&x2, t).unwrap();
        assert!((h2[0] - h[0]).abs() < 1e-12 && (h2[1] - h[1]).abs() < 1e-12);
        // zero beyond 2 delta0
        let h3 = c.h_ext(&[r + 0.21, 0.0], t).unwrap();
        assert_eq!(h3, vec![0.0, 0.0]);
    }

    #[test]
    fn truncation_and_sign_function() {
        let c = InterfaceDescriptor::new(
            InterfaceKind::ShrinkingSphere {
                center: vec![0.0, 0.0],
                r0: 0.3,
            },
            2,
            0.25,
        )
        .unwrap();
        assert_eq!(c.eta_trunc(0.3), 0.25);
        assert_eq!(c.eta_trunc(-0.1), -0.1);
        assert_eq!(c.eta_trunc(0.0), 0.0);
        assert_eq!(c.chi(&[0.0, 0.0], 0.0), 1.0);
        // eta(d_Sigma) chi >= 0 at random points
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10_000 {
            let x = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
            let d = c.d_sigma(&x, 0.0);
            assert!(c.eta_trunc(d) * c.chi(&x, 0.0) >= 0.0);
        }
    }

    #[test]
    fn identities_hold_at_fd_order() {
        let c = circle();
        let t = 0.005;
        let r = c.radius(t);
        let mut samples = Vec::new();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..40 {
            let ang: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            let off: f64 = rng.gen_range(-0.45 * c.delta0_geo..0.45 * c.delta0_geo);
            samples.push(vec![(r + off) * ang.cos(), (r + off) * ang.sin()]);
        }
        let h1 = 1e-3;
        let rep1 = c.verify_identities(t, &samples, h1).unwrap();
        let rep2 = c.verify_identities(t, &samples, 0.5 * h1).unwrap();
        // Richardson slope about 2 for (b), (c), (d)
        for (a, b) in [
            (rep1.res_b, rep2.res_b),
            (rep1.res_c, rep2.res_c),
            (rep1.res_d, rep2.res_d),
        ] {
            let slope = (a / b).log2();
            assert!(slope > 1.7 && slope < 2.3, "slope {slope}");
        }
        // residual (a) is O(d) + O(h^2)
        let c_a = 100.0;
        assert!(rep1.res_a <= c_a * rep1.max_abs_dist + c_a * h1 * h1);

        // on the interface itself, (a) is pure O(h^2)
        let on_sigma: Vec<Vec<f64>> = (0..16)
            .map(|k| {
                let ang = std::f64::consts::TAU * k as f64 / 16.0;
                vec![r * ang.cos(), r * ang.sin()]
            })
            .collect();
        let rep = c.verify_identities(t, &on_sigma, h1).unwrap();
        assert!(rep.res_a <= c_a * h1 * h1, "res_a on Sigma = {:e}", rep.res_a);
    }

    #[test]
    fn stationary_front_identities_vanish() {
        let c = InterfaceDescriptor::new(InterfaceKind::StationaryPoint { x0: 0.03 }, 1, 0.25).unwrap();
        let samples = vec![vec![0.0], vec![0.05], vec![-0.05]];
        let rep = c.verify_identities(0.1, &samples, 1e-3).unwrap();
        assert!(rep.res_a <= 1e-12);
        assert!(rep.res_b <= 1e-12);
        assert!(rep.res_c <= 1e-12);
        assert!(rep.res_d <= 1e-12);
    }

    #[test]
    fn sample_outside_tube_rejected() {
        let c = circle();
        let bad = vec![vec![0.3 + 0.06, 0.0]];
        assert!(matches!(
            c.verify_identities(0.0, &bad, 1e-3),
            Err(InterfaceError::SampleOutsideTube)
        ));
    }

    #[test]
    fn div_xi_matches_finite_differences() {
        let c = circle();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let ang: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            let rho: f64 = rng.gen_range(0.22..0.38);
            let x = [rho * ang.cos(), rho * ang.sin()];
            let h = 1e-5;
            let mut fd = 0.0;
            for i in 0..2 {
                let mut xp = x;
                let mut xm = x;
                xp[i] += h;
                xm[i] -= h;
                fd += (c.xi(&xp, 0.0).unwrap()[i] - c.xi(&xm, 0.0).unwrap()[i]) / (2.0 * h);
            }
            let an = c.div_xi(&x, 0.0);
            assert!((fd - an).abs() < 1e-4 * (1.0 + an.abs()), "{fd} vs {an}");
        }
    }
}
