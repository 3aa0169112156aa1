//! The bulk potential F(u) = f(d_m^2(u)), its gradient, the quasi-distance
//! d_F and the centralized potential.
//!
//! The radial profile is a polynomial ramp joining f(0) = 0 to the plateau
//! f = c3 at s = delta0^2 with a C^2 junction. Quadrature of sqrt(2 f) is
//! memoized on a table once at construction; everything else is pure.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::num_util::{adaptive_simpson, hermite, QuadError};
use crate::target_manifold::{ManifoldError, ManifoldPair, Side};

#[derive(Debug, Error)]
pub enum PotentialError {
    #[error("f is defined on s >= 0")]
    NegativeArgument,
    #[error("point within 1e-8 of a set where the quasi-distance is only Lipschitz")]
    NearKink,
    #[error("invalid potential configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Quadrature(#[from] QuadError),
    #[error(transparent)]
    Manifold(#[from] ManifoldError),
}

/// Admissible radial ramps. `Cubic` is the default; `Quintic` is the
/// regression variant (same linear slope structure, steeper entry).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum RampKind {
    #[default]
    Cubic,
    Quintic,
}

#[derive(Debug, Clone, Copy)]
pub struct PotentialParams {
    /// plateau value of f
    pub c3: f64,
    /// tube half-width shared with the manifold pair
    pub delta0: f64,
    /// lower linear bound: c1 * s <= f(s) on [0, delta0^2]
    pub c1: f64,
    /// upper linear bound
    pub c2: f64,
    /// lim f(s)/s as s -> 0
    pub c4: f64,
    /// surface tension, 2 * int_0^{dist_m/2} sqrt(2 f(l^2)) dl
    pub c_f: f64,
}

const QUAD_TABLE_CELLS: usize = 4096;
const KINK_MARGIN: f64 = 1e-8;

/// Distance-to-kink guard below which projection directions degenerate.
const MEDIAL_EPS: f64 = 1e-14;

#[derive(Debug, Clone)]
struct QuadTable {
    /// cumulative integral of sqrt(2 f(l^2)) on [0, delta0], cell endpoints
    values: Vec<f64>,
    /// integrand at the cell endpoints (exact slopes for Hermite interpolation)
    slopes: Vec<f64>,
    cell: f64,
    delta0: f64,
    sqrt_2c3: f64,
}

impl QuadTable {
    fn eval(&self, a: f64) -> f64 {
        debug_assert!(a >= 0.0);
        if a >= self.delta0 {
            return self.values[QUAD_TABLE_CELLS] + self.sqrt_2c3 * (a - self.delta0);
        }
        let k = ((a / self.cell) as usize).min(QUAD_TABLE_CELLS - 1);
        let x0 = k as f64 * self.cell;
        hermite(
            a,
            x0,
            x0 + self.cell,
            self.values[k],
            self.values[k + 1],
            self.slopes[k],
            self.slopes[k + 1],
        )
    }
}

#[derive(Debug, Clone)]
pub struct Potential {
    pub manifold: ManifoldPair,
    pub ramp: RampKind,
    pub params: PotentialParams,
    quad: QuadTable,
}

enum QuasiCase {
    /// within the m- half tube: d_F = I(dist(u, m-))
    NearMinus,
    /// within the m+ half tube or inside U+: d_F = c_F - I(dist(u, m+))
    NearPlus,
    /// the two constant cases, d_F = c_F / 2
    ConstMid,
}

impl Potential {
    pub fn new(manifold: ManifoldPair, c3: f64, ramp: RampKind) -> Result<Self, PotentialError> {
        if !(c3 > 0.0) {
            return Err(PotentialError::InvalidConfig("c3 must be positive".into()));
        }
        let delta0 = manifold.tube_radius;
        let d02 = delta0 * delta0;
        let (c2, c4) = match ramp {
            RampKind::Cubic => (3.0 * c3 / d02, 3.0 * c3 / d02),
            RampKind::Quintic => (5.0 * c3 / d02, 5.0 * c3 / d02),
        };
        let params = PotentialParams {
            c3,
            delta0,
            c1: c3 / d02,
            c2,
            c4,
            c_f: f64::NAN,
        };
        let mut pot = Self {
            manifold,
            ramp,
            params,
            quad: QuadTable {
                values: Vec::new(),
                slopes: Vec::new(),
                cell: 0.0,
                delta0,
                sqrt_2c3: (2.0 * c3).sqrt(),
            },
        };
        pot.build_quad_table()?;
        let half = 0.5 * pot.manifold.gap;
        pot.params.c_f = 2.0 * pot.integral_sqrt_2f_adaptive(half, 1e-10)?;
        // Keep d_F within [0, c_F]: the deep-U+ branch c_F - I(depth) must not
        // undershoot zero, which bounds how fat U+ may be relative to the gap.
        let depth = pot.manifold.enclosed_inradius(Side::Plus);
        if pot.quad.eval(depth) > pot.params.c_f {
            return Err(PotentialError::InvalidConfig(format!(
                "U+ is too deep for the quasi-distance range: I({depth}) > c_F"
            )));
        }
        Ok(pot)
    }

    fn build_quad_table(&mut self) -> Result<(), PotentialError> {
        let delta0 = self.params.delta0;
        let cell = delta0 / QUAD_TABLE_CELLS as f64;
        let mut values = Vec::with_capacity(QUAD_TABLE_CELLS + 1);
        let mut slopes = Vec::with_capacity(QUAD_TABLE_CELLS + 1);
        let integrand = |l: f64| (2.0 * self.f_val(l * l)).sqrt();
        let mut acc = 0.0;
        values.push(0.0);
        slopes.push(0.0);
        let per_cell_tol = 1e-10 / QUAD_TABLE_CELLS as f64;
        for k in 0..QUAD_TABLE_CELLS {
            let a = k as f64 * cell;
            let b = a + cell;
            acc += adaptive_simpson(integrand, a, b, per_cell_tol)?;
            values.push(acc);
            slopes.push(integrand(b));
        }
        self.quad = QuadTable {
            values,
            slopes,
            cell,
            delta0,
            sqrt_2c3: (2.0 * self.params.c3).sqrt(),
        };
        Ok(())
    }

    #[inline]
    fn f_val(&self, s: f64) -> f64 {
        let d02 = self.params.delta0 * self.params.delta0;
        if s >= d02 {
            return self.params.c3;
        }
        // expanded in x to avoid cancellation for s near 0
        let x = s / d02;
        match self.ramp {
            RampKind::Cubic => self.params.c3 * x * (3.0 + x * (-3.0 + x)),
            RampKind::Quintic => {
                self.params.c3 * x * (5.0 + x * (-10.0 + x * (10.0 + x * (-5.0 + x))))
            }
        }
    }

    #[inline]
    fn f_deriv(&self, s: f64) -> f64 {
        let d02 = self.params.delta0 * self.params.delta0;
        if s >= d02 {
            return 0.0;
        }
        let y = 1.0 - s / d02;
        match self.ramp {
            RampKind::Cubic => 3.0 * self.params.c3 / d02 * y * y,
            RampKind::Quintic => 5.0 * self.params.c3 / d02 * y * y * y * y,
        }
    }

    #[inline]
    fn f_second(&self, s: f64) -> f64 {
        let d02 = self.params.delta0 * self.params.delta0;
        if s >= d02 {
            return 0.0;
        }
        let y = 1.0 - s / d02;
        match self.ramp {
            RampKind::Cubic => -6.0 * self.params.c3 / (d02 * d02) * y,
            RampKind::Quintic => -20.0 * self.params.c3 / (d02 * d02) * y * y * y,
        }
    }

    /// The ramp and its derivative at s >= 0.
    pub fn f_eval(&self, s: f64) -> Result<(f64, f64), PotentialError> {
        if s < 0.0 {
            return Err(PotentialError::NegativeArgument);
        }
        Ok((self.f_val(s), self.f_deriv(s)))
    }

    /// F(u) = f(dist(u, m)^2).
    #[inline]
    pub fn f_of_u(&self, u: &[f64]) -> f64 {
        let d = self.manifold.dist_m(u);
        self.f_val(d * d)
    }

    /// grad F(u) = 2 f'(d^2) (u - P_m u) inside the delta0 tube, zero on the
    /// plateau and on m itself.
    pub fn grad_f_into(&self, u: &[f64], out: &mut [f64]) {
        let side = self.manifold.nearer_side(u);
        let d = self.manifold.dist_component(u, side);
        if d >= self.params.delta0 || d == 0.0 {
            out.fill(0.0);
            return;
        }
        let fp = self.f_deriv(d * d);
        self.manifold_project_diff(u, side, out);
        for v in out.iter_mut() {
            *v *= 2.0 * fp;
        }
    }

    /// writes u - P_side(u) into out
    fn manifold_project_diff(&self, u: &[f64], side: Side, out: &mut [f64]) {
        // projection is well-defined within the tube; callers guarantee d < delta0
        let p = match self.manifold.project_side(u, side) {
            Ok(p) => p,
            Err(_) => {
                out.fill(0.0);
                return;
            }
        };
        for i in 0..u.len() {
            out[i] = u[i] - p[i];
        }
    }

    pub fn grad_f(&self, u: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; u.len()];
        self.grad_f_into(u, &mut out);
        out
    }

    fn classify(&self, u: &[f64]) -> QuasiCase {
        let half = 0.5 * self.manifold.gap;
        if self.manifold.dist_component(u, Side::Minus) <= half {
            QuasiCase::NearMinus
        } else if self.manifold.dist_component(u, Side::Plus) <= half
            || self.manifold.inside(u, Side::Plus)
        {
            QuasiCase::NearPlus
        } else {
            QuasiCase::ConstMid
        }
    }

    /// The quasi-distance d_F: 0 on m-, c_F on m+, c_F/2 on the constant
    /// cases, potential-weighted distance in the half tubes. Total on R^n,
    /// with values in [0, c_F].
    pub fn quasi_dist(&self, u: &[f64]) -> f64 {
        match self.classify(u) {
            QuasiCase::NearMinus => self.quad.eval(self.manifold.dist_component(u, Side::Minus)),
            QuasiCase::NearPlus => {
                self.params.c_f - self.quad.eval(self.manifold.dist_component(u, Side::Plus))
            }
            QuasiCase::ConstMid => 0.5 * self.params.c_f,
        }
    }

    /// |partial d_F(u)|: sqrt(2 f(d^2)) on the active branches, 0 on the
    /// constant cases. Total (takes the branch tie-break on the kink set).
    pub fn pdf_norm(&self, u: &[f64]) -> f64 {
        match self.classify(u) {
            QuasiCase::NearMinus => {
                let d = self.manifold.dist_component(u, Side::Minus);
                (2.0 * self.f_val(d * d)).sqrt()
            }
            QuasiCase::NearPlus => {
                let d = self.manifold.dist_component(u, Side::Plus);
                (2.0 * self.f_val(d * d)).sqrt()
            }
            QuasiCase::ConstMid => 0.0,
        }
    }

    /// Generalized differential of d_F as used by the grid diagnostics: the
    /// classical gradient where it exists, the branch-tie-break one-sided
    /// gradient on the (measure-zero) kink set, zero where the projection
    /// direction degenerates. Never errors.
    pub fn pdf_into(&self, u: &[f64], out: &mut [f64]) {
        let (side, sign) = match self.classify(u) {
            QuasiCase::NearMinus => (Side::Minus, 1.0),
            QuasiCase::NearPlus => (Side::Plus, -1.0),
            QuasiCase::ConstMid => {
                out.fill(0.0);
                return;
            }
        };
        let d = self.manifold.dist_component(u, side);
        if d == 0.0 || self.manifold.medial_margin(u) < MEDIAL_EPS {
            out.fill(0.0);
            return;
        }
        let g = (2.0 * self.f_val(d * d)).sqrt();
        self.manifold_project_diff_any(u, side, out);
        let scale = sign * g / d;
        for v in out.iter_mut() {
            *v *= scale;
        }
    }

    /// u - P_side(u) without the tube-radius restriction (the distance
    /// foot-point is well-defined whenever the medial margin is positive).
    fn manifold_project_diff_any(&self, u: &[f64], side: Side, out: &mut [f64]) {
        use crate::target_manifold::ManifoldKind;
        match &self.manifold.kind {
            ManifoldKind::TwoPoints { a_plus, a_minus } => {
                let a = match side {
                    Side::Plus => *a_plus,
                    Side::Minus => *a_minus,
                };
                out[0] = u[0] - a;
            }
            _ => {
                let p = self.project_any(u, side);
                for i in 0..u.len() {
                    out[i] = u[i] - p[i];
                }
            }
        }
    }

    fn project_any(&self, u: &[f64], side: Side) -> Vec<f64> {
        use crate::target_manifold::ManifoldKind;
        let mut out = vec![0.0; u.len()];
        match &self.manifold.kind {
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
                let mut rho2 = 0.0;
                for i in 0..u.len() {
                    rho2 += (u[i] - c[i]) * (u[i] - c[i]);
                }
                let rho = rho2.sqrt();
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
                let mut num = 0.0;
                let mut den = 0.0;
                for i in 0..u.len() {
                    let d = seg[1][i] - seg[0][i];
                    num += (u[i] - seg[0][i]) * d;
                    den += d * d;
                }
                let t = (num / den).clamp(0.0, 1.0);
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
        out
    }

    /// Classical gradient of d_F; errors within 1e-8 of the kink set (branch
    /// boundaries outside the tube and the medial cores of the distance
    /// functions).
    pub fn grad_quasi_dist(&self, u: &[f64]) -> Result<Vec<f64>, PotentialError> {
        let half = 0.5 * self.manifold.gap;
        let dp = self.manifold.dist_component(u, Side::Plus);
        let dm = self.manifold.dist_component(u, Side::Minus);
        let mut margin = (dm - half).abs();
        if !self.manifold.inside(u, Side::Plus) {
            margin = margin.min((dp - half).abs());
        }
        margin = margin.min(self.manifold.medial_margin(u));
        if margin < KINK_MARGIN {
            return Err(PotentialError::NearKink);
        }
        let mut out = vec![0.0; u.len()];
        self.pdf_into(u, &mut out);
        Ok(out)
    }

    /// The centralized potential: even, vanishing at +-dist_m/2.
    pub fn centralized(&self, lam: f64) -> f64 {
        let half = 0.5 * self.manifold.gap;
        let t = half - lam.abs();
        self.f_val(t * t)
    }

    pub fn centralized_deriv(&self, lam: f64) -> f64 {
        let half = 0.5 * self.manifold.gap;
        let t = half - lam.abs();
        let d = -2.0 * t * self.f_deriv(t * t);
        if lam >= 0.0 {
            d
        } else {
            -d
        }
    }

    pub fn centralized_second(&self, lam: f64) -> f64 {
        let half = 0.5 * self.manifold.gap;
        let t = half - lam.abs();
        2.0 * self.f_deriv(t * t) + 4.0 * t * t * self.f_second(t * t)
    }

    /// Third derivative of the centralized potential (for grid sizing).
    pub fn centralized_third_abs(&self, lam: f64) -> f64 {
        let half = 0.5 * self.manifold.gap;
        let t = half - lam.abs();
        (12.0 * t * self.f_second(t * t) + 8.0 * t * t * t * self.f_third(t * t)).abs()
    }

    fn f_third(&self, s: f64) -> f64 {
        let d02 = self.params.delta0 * self.params.delta0;
        if s >= d02 {
            return 0.0;
        }
        let y = 1.0 - s / d02;
        match self.ramp {
            RampKind::Cubic => 6.0 * self.params.c3 / (d02 * d02 * d02),
            RampKind::Quintic => 60.0 * self.params.c3 / (d02 * d02 * d02) * y * y,
        }
    }

    /// I(a) = int_0^a sqrt(2 f(l^2)) dl via the memoized table (exact linear
    /// continuation on the plateau).
    #[inline]
    pub fn integral_sqrt_2f(&self, a: f64) -> f64 {
        self.quad.eval(a)
    }

    /// Same integral by adaptive Simpson, for construction and cross-checks.
    pub fn integral_sqrt_2f_adaptive(&self, a: f64, tol: f64) -> Result<f64, QuadError> {
        let delta0 = self.params.delta0;
        if a <= delta0 {
            return adaptive_simpson(|l| (2.0 * self.f_val(l * l)).sqrt(), 0.0, a, tol);
        }
        let head = adaptive_simpson(|l| (2.0 * self.f_val(l * l)).sqrt(), 0.0, delta0, tol)?;
        Ok(head + (2.0 * self.params.c3).sqrt() * (a - delta0))
    }

    /// Spectral bound of the Hessian of F over the delta0 tube, by sampling
    /// the radial eigenvalue |2 f' + 4 s f''| and the tangential bound
    /// 2 |f'| (1 + delta0 k / (1 - delta0 k)) for the worst curvature k.
    pub fn reaction_hessian_bound(&self) -> f64 {
        let d0 = self.params.delta0;
        let kappa = self.manifold.max_curvature();
        let bend = if kappa > 0.0 {
            1.0 + d0 * kappa / (1.0 - d0 * kappa)
        } else {
            1.0
        };
        let mut lam: f64 = 0.0;
        let n = 2048;
        for k in 0..=n {
            let s = (k as f64 / n as f64) * d0 * d0;
            let fp = self.f_deriv(s);
            let fpp = self.f_second(s);
            let radial = (2.0 * fp + 4.0 * s * fpp).abs();
            let tangential = 2.0 * fp.abs() * bend;
            lam = lam.max(radial).max(tangential);
        }
        1.25 * lam
    }
}
