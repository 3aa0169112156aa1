//! One-dimensional connection problems: the surface tension c_F, the optimal
//! transition profile alpha, and minimal connections between prescribed well
//! points by relaxation of the discrete action.

use thiserror::Error;

use crate::num_util::{
    adaptive_simpson, hermite, hermite_deriv, ols_slope, quintic_hermite, KahanSum, QuadError,
};
use crate::potential::Potential;
use crate::target_manifold::Side;

#[derive(Debug, Error)]
pub enum ProfileError {
    #[error(transparent)]
    Quadrature(#[from] QuadError),
    #[error("analytic tail splice disagrees with quadrature by {disagreement:e} (> 1e-8)")]
    EndpointSingularity { disagreement: f64 },
    #[error("relaxation did not converge: grad sup norm {grad_inf:e} after {iterations} iterations")]
    NoConvergence { iterations: usize, grad_inf: f64 },
    #[error("connection endpoint is not on its well manifold within 1e-9")]
    EndpointOffManifold,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

/// Threshold on F-tilde/c3 below which the endpoint log integral is spliced
/// analytically. Tighter than strictly needed so the splice check passes with
/// a wide margin on every supported geometry.
const SPLICE_FRAC: f64 = 1e-8;
/// |alpha(s_max) - dist_m/2|; one order below the 1e-12 clamp contract.
const TAIL_END: f64 = 1e-13;
const GRAD_TOL: f64 = 1e-8;
const ITER_BUDGET: usize = 100_000;

/// 2 * int_0^{dist_m/2} sqrt(2 f(l^2)) dl by adaptive quadrature (tol 1e-10).
pub fn compute_cf(pot: &Potential) -> Result<f64, ProfileError> {
    let half = 0.5 * pot.manifold.gap;
    Ok(2.0 * pot.integral_sqrt_2f_adaptive(half, 1e-10)?)
}

/// The same constant through the centralized potential,
/// 2 * int_0^{dist_m/2} sqrt(2 F~(l)) dl; must agree with `compute_cf`.
pub fn compute_cf_tilde(pot: &Potential) -> Result<f64, ProfileError> {
    let half = 0.5 * pot.manifold.gap;
    Ok(2.0 * adaptive_simpson(|l| (2.0 * pot.centralized(l)).sqrt(), 0.0, half, 1e-10)?)
}

/// Tabulated optimal profile: odd, strictly increasing, alpha' = sqrt(2 F~(alpha)),
/// clamped to +-dist_m/2 beyond +-s_max.
#[derive(Debug, Clone)]
pub struct ProfileTable {
    /// uniform grid, symmetric about 0
    pub s_grid: Vec<f64>,
    pub alpha: Vec<f64>,
    pub alpha_prime: Vec<f64>,
    pub s_max: f64,
    /// exponential rate fitted to the stored tail
    pub tail_rate: f64,
    /// dist_m / 2
    pub half_gap: f64,
    ds: f64,
    /// F~'(alpha_k), Hermite slopes for alpha_prime
    alpha_second: Vec<f64>,
    /// index of s = 0
    center: usize,
}

pub fn build_profile(pot: &Potential) -> Result<ProfileTable, ProfileError> {
    let half = 0.5 * pot.manifold.gap;
    let delta0 = pot.params.delta0;
    let c3 = pot.params.c3;
    let c4 = pot.params.c4;
    let sqrt_2c3 = (2.0 * c3).sqrt();
    let rate = (2.0 * c4).sqrt();

    // mu = half - a, the distance from the well value; f(mu_spl^2) = SPLICE_FRAC*c3
    let mu_spl = {
        let (mut lo, mut hi) = (0.0, delta0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if pot.f_eval(mid * mid).unwrap().0 < SPLICE_FRAC * c3 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    };

    // linear core through the plateau: s(a) = a / sqrt(2 c3) for a <= half - delta0
    let s_core = (half - delta0) / sqrt_2c3;

    // ramp region: geometric mu-grid from delta0 down to mu_spl; the quintic
    // inversion below keeps the residual of the filled table well under 1e-6
    let nb = 2048;
    let ratio = (mu_spl / delta0).powf(1.0 / nb as f64);
    let mut mu_nodes = Vec::with_capacity(nb + 1);
    let mut s_nodes = Vec::with_capacity(nb + 1);
    mu_nodes.push(delta0);
    s_nodes.push(s_core);
    let mut s_acc = s_core;
    let mut mu_prev = delta0;
    for j in 1..=nb {
        let mu_next = if j == nb { mu_spl } else { delta0 * ratio.powi(j as i32) };
        let seg = adaptive_simpson(
            |mu| 1.0 / (2.0 * pot.f_eval(mu * mu).unwrap().0).sqrt(),
            mu_next,
            mu_prev,
            1e-14,
        )?;
        s_acc += seg;
        mu_nodes.push(mu_next);
        s_nodes.push(s_acc);
        mu_prev = mu_next;
    }
    let s_spl = s_acc;

    // splice consistency: quadrature over [mu_spl, 2 mu_spl] vs the log form
    let quad_step = adaptive_simpson(
        |mu| 1.0 / (2.0 * pot.f_eval(mu * mu).unwrap().0).sqrt(),
        mu_spl,
        2.0 * mu_spl,
        1e-14,
    )?;
    let log_step = (2.0f64).ln() / rate;
    let disagreement = (quad_step - log_step).abs();
    if disagreement > 1e-8 {
        return Err(ProfileError::EndpointSingularity { disagreement });
    }

    let s_max = s_spl + (mu_spl / TAIL_END).ln() / rate;

    // grid spacing: the cap from the table contract, tightened so that both
    // the first-order and the second-difference ODE residuals stay below 1e-6
    let ds_cap = 1e-3 * pot.manifold.gap / rate;
    let mut q4max: f64 = 0.0; // bound on |alpha''''| = |F~''' 2F~ + F~'' F~'|
    let mut q3max: f64 = 0.0; // bound on |alpha'''| = |F~'' alpha'|
    let nsamp = 8192;
    for k in 0..=nsamp {
        let lam = k as f64 / nsamp as f64 * half;
        let ft = pot.centralized(lam);
        let f1 = pot.centralized_deriv(lam).abs();
        let f2 = pot.centralized_second(lam).abs();
        let f3 = pot.centralized_third_abs(lam);
        q4max = q4max.max(f3 * 2.0 * ft + f2 * f1);
        q3max = q3max.max(f2 * (2.0 * ft).sqrt());
    }
    let ds_first = (6.0 * 0.35e-6 / q3max.max(1e-30)).sqrt();
    // second differences of the stored table balance truncation ds^2 q4 / 12
    // against the f64 rounding floor ~ 4 eps |alpha| / ds^2; sit at the optimum
    let eps_abs = 1.5 * f64::EPSILON * half.max(1.0);
    let ds_noise = (48.0 * eps_abs / q4max.max(1e-30)).powf(0.25);
    let upper = ds_cap.min(ds_first);
    let ds_target = if ds_noise < upper { ds_noise } else { upper };
    let n_half = (s_max / ds_target).ceil() as usize + 1;
    let ds = s_max / (n_half - 1) as f64;

    // alpha on the nonnegative half by monotone sweep through the three regions
    let mut alpha_half = Vec::with_capacity(n_half);
    let mut seg_idx = 0usize;
    for k in 0..n_half {
        let s = k as f64 * ds;
        let a = if s <= s_core {
            sqrt_2c3 * s
        } else if s >= s_spl {
            half - mu_spl * (-(rate * (s - s_spl))).exp()
        } else {
            while seg_idx + 1 < s_nodes.len() && s_nodes[seg_idx + 1] < s {
                seg_idx += 1;
            }
            let (s0, s1) = (s_nodes[seg_idx], s_nodes[seg_idx + 1]);
            let (a0, a1) = (half - mu_nodes[seg_idx], half - mu_nodes[seg_idx + 1]);
            // alpha' = sqrt(2 F~), alpha'' = F~'(alpha): exact end data
            let m0 = (2.0 * pot.centralized(a0)).sqrt();
            let m1 = (2.0 * pot.centralized(a1)).sqrt();
            let c0 = pot.centralized_deriv(a0);
            let c1 = pot.centralized_deriv(a1);
            quintic_hermite(s, s0, s1, a0, a1, m0, m1, c0, c1)
        };
        alpha_half.push(a.min(half - TAIL_END));
    }

    // assemble the symmetric table
    let n_full = 2 * n_half - 1;
    let center = n_half - 1;
    let mut s_grid = vec![0.0; n_full];
    let mut alpha = vec![0.0; n_full];
    let mut alpha_prime = vec![0.0; n_full];
    let mut alpha_second = vec![0.0; n_full];
    for k in 0..n_half {
        let s = k as f64 * ds;
        let a = alpha_half[k];
        let ap = (2.0 * pot.centralized(a)).sqrt();
        let app = pot.centralized_deriv(a);
        s_grid[center + k] = s;
        alpha[center + k] = a;
        alpha_prime[center + k] = ap;
        alpha_second[center + k] = app;
        s_grid[center - k] = -s;
        alpha[center - k] = -a;
        alpha_prime[center - k] = ap;
        alpha_second[center - k] = -app;
    }

    // fitted tail rate over the pure-tail window mu in [10*TAIL_END, mu_spl]
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for k in 0..n_half {
        let mu = half - alpha_half[k];
        if mu <= mu_spl && mu >= 10.0 * TAIL_END {
            xs.push(k as f64 * ds);
            ys.push(mu.ln());
        }
    }
    let tail_rate = if xs.len() >= 3 {
        -ols_slope(&xs, &ys).0
    } else {
        rate
    };

    Ok(ProfileTable {
        s_grid,
        alpha,
        alpha_prime,
        s_max,
        tail_rate,
        half_gap: half,
        ds,
        alpha_second,
        center,
    })
}

impl ProfileTable {
    /// alpha(s); odd by construction, clamped to +-dist_m/2 beyond +-s_max.
    pub fn eval_alpha(&self, s: f64) -> f64 {
        let t = s.abs();
        if t >= self.s_max {
            return self.half_gap.copysign(s);
        }
        let k = ((t / self.ds) as usize).min(self.alpha.len() - self.center - 2);
        let i = self.center + k;
        let x0 = k as f64 * self.ds;
        let v = hermite(
            t,
            x0,
            x0 + self.ds,
            self.alpha[i],
            self.alpha[i + 1],
            self.alpha_prime[i],
            self.alpha_prime[i + 1],
        );
        v.copysign(s)
    }

    /// alpha'(s); even, zero beyond +-s_max.
    pub fn eval_alpha_prime(&self, s: f64) -> f64 {
        let t = s.abs();
        if t >= self.s_max {
            return 0.0;
        }
        let k = ((t / self.ds) as usize).min(self.alpha.len() - self.center - 2);
        let i = self.center + k;
        let x0 = k as f64 * self.ds;
        hermite(
            t,
            x0,
            x0 + self.ds,
            self.alpha_prime[i],
            self.alpha_prime[i + 1],
            self.alpha_second[i],
            self.alpha_second[i + 1],
        )
        .max(0.0)
    }

    /// d alpha/ds of the interpolant itself (used by residual cross-checks).
    pub fn eval_alpha_interp_deriv(&self, s: f64) -> f64 {
        let t = s.abs();
        if t >= self.s_max {
            return 0.0;
        }
        let k = ((t / self.ds) as usize).min(self.alpha.len() - self.center - 2);
        let i = self.center + k;
        let x0 = k as f64 * self.ds;
        hermite_deriv(
            t,
            x0,
            x0 + self.ds,
            self.alpha[i],
            self.alpha[i + 1],
            self.alpha_prime[i],
            self.alpha_prime[i + 1],
        )
    }
}

/// Relaxation scheme for the discrete connection action.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relaxer {
    /// plain gradient descent with Armijo backtracking
    GradientDescent,
    /// inertial descent (FIRE); handles the soft sliding modes along the wells
    Fire,
}

#[derive(Debug, Clone)]
pub struct ConnectionResult {
    pub action: f64,
    /// arc parameter per node
    pub s: Vec<f64>,
    /// path nodes, flat [node][component]
    pub path: Vec<f64>,
    pub ncomp: usize,
    pub iterations: usize,
    pub grad_inf: f64,
}

fn action_and_grad(pot: &Potential, path: &[f64], n: usize, ncomp: usize, ds: f64, grad: &mut [f64]) -> f64 {
    let mut act = KahanSum::new();
    grad.fill(0.0);
    let mut gf = vec![0.0; ncomp];
    for k in 0..n - 1 {
        let a = &path[k * ncomp..(k + 1) * ncomp];
        let b = &path[(k + 1) * ncomp..(k + 2) * ncomp];
        let mut kin = 0.0;
        for c in 0..ncomp {
            let d = b[c] - a[c];
            kin += d * d;
        }
        act.add(0.5 * kin / ds + pot.f_of_u(a) * ds);
    }
    for j in 1..n - 1 {
        let prev = j - 1;
        let next = j + 1;
        let u = &path[j * ncomp..(j + 1) * ncomp];
        pot.grad_f_into(u, &mut gf);
        for c in 0..ncomp {
            grad[j * ncomp + c] = (2.0 * path[j * ncomp + c]
                - path[prev * ncomp + c]
                - path[next * ncomp + c])
                / ds
                + gf[c] * ds;
        }
    }
    act.value()
}

fn grad_inf_norm(grad: &[f64], n: usize, ncomp: usize) -> f64 {
    let mut worst = 0.0f64;
    for j in 0..n {
        let mut g2 = 0.0;
        for c in 0..ncomp {
            let g = grad[j * ncomp + c];
            g2 += g * g;
        }
        worst = worst.max(g2.sqrt());
    }
    worst
}

/// Minimizes the discrete connection action over paths clamped to
/// gamma(-s_half) = p_minus, gamma(s_half) = p_plus, starting from the
/// straight segment. `nodes` must be odd and >= 101; `s_half >= 3 s_max`.
pub fn minimal_connection(
    pot: &Potential,
    profile: &ProfileTable,
    p_plus: &[f64],
    p_minus: &[f64],
    nodes: usize,
    s_half: f64,
    relaxer: Relaxer,
) -> Result<ConnectionResult, ProfileError> {
    if nodes < 101 || nodes % 2 == 0 {
        return Err(ProfileError::InvalidArgument(format!(
            "nodes must be odd and >= 101, got {nodes}"
        )));
    }
    if s_half < 3.0 * profile.s_max {
        return Err(ProfileError::InvalidArgument(format!(
            "s_half = {s_half} must be >= 3 * s_max = {}",
            3.0 * profile.s_max
        )));
    }
    if pot.manifold.dist_component(p_plus, Side::Plus) > 1e-9
        || pot.manifold.dist_component(p_minus, Side::Minus) > 1e-9
    {
        return Err(ProfileError::EndpointOffManifold);
    }
    let ncomp = pot.manifold.ambient_dim;
    let n = nodes;
    let ds = 2.0 * s_half / (n - 1) as f64;

    let mut path = vec![0.0; n * ncomp];
    for j in 0..n {
        let t = j as f64 / (n - 1) as f64;
        for c in 0..ncomp {
            path[j * ncomp + c] = p_minus[c] + t * (p_plus[c] - p_minus[c]);
        }
    }

    let stiffness = 4.0 / ds + pot.reaction_hessian_bound() * ds;
    let mut grad = vec![0.0; n * ncomp];
    let mut action = action_and_grad(pot, &path, n, ncomp, ds, &mut grad);
    let mut gn = grad_inf_norm(&grad, n, ncomp);
    let mut iterations = 0;

    match relaxer {
        Relaxer::GradientDescent => {
            let mut eta = 1.0 / stiffness;
            let mut trial = vec![0.0; n * ncomp];
            let mut tgrad = vec![0.0; n * ncomp];
            while gn > GRAD_TOL && iterations < ITER_BUDGET {
                let g2: f64 = grad.iter().map(|g| g * g).sum();
                loop {
                    for i in 0..path.len() {
                        trial[i] = path[i] - eta * grad[i];
                    }
                    let ta = action_and_grad(pot, &trial, n, ncomp, ds, &mut tgrad);
                    if ta <= action - 1e-4 * eta * g2 {
                        std::mem::swap(&mut path, &mut trial);
                        std::mem::swap(&mut grad, &mut tgrad);
                        action = ta;
                        eta = (eta * 1.25).min(10.0 / stiffness);
                        break;
                    }
                    eta *= 0.5;
                    if eta < 1e-18 {
                        return Err(ProfileError::NoConvergence {
                            iterations,
                            grad_inf: gn,
                        });
                    }
                }
                gn = grad_inf_norm(&grad, n, ncomp);
                iterations += 1;
            }
        }
        Relaxer::Fire => {
            let dt_max = 1.6 / stiffness.sqrt();
            let mut dt = 0.2 * dt_max;
            let mut vel = vec![0.0; n * ncomp];
            let mut mix = 0.1;
            let mut n_pos = 0usize;
            while gn > GRAD_TOL && iterations < ITER_BUDGET {
                let power: f64 = grad.iter().zip(&vel).map(|(g, v)| -g * v).sum();
                if power > 0.0 {
                    n_pos += 1;
                    if n_pos > 5 {
                        dt = (dt * 1.1).min(dt_max);
                        mix *= 0.99;
                    }
                } else {
                    n_pos = 0;
                    dt *= 0.5;
                    vel.fill(0.0);
                    mix = 0.1;
                }
                let vnorm: f64 = vel.iter().map(|v| v * v).sum::<f64>().sqrt();
                let fnorm: f64 = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
                for i in 0..vel.len() {
                    vel[i] -= dt * grad[i];
                }
                if fnorm > 0.0 && vnorm > 0.0 {
                    for i in 0..vel.len() {
                        vel[i] = (1.0 - mix) * vel[i] + mix * (-grad[i] / fnorm) * vnorm;
                    }
                }
                for i in 0..path.len() {
                    path[i] += dt * vel[i];
                }
                // endpoints stay clamped: their grad entries are zero but the
                // velocity mixing cannot move them since vel there stays zero
                action = action_and_grad(pot, &path, n, ncomp, ds, &mut grad);
                gn = grad_inf_norm(&grad, n, ncomp);
                iterations += 1;
            }
        }
    }

    if gn > GRAD_TOL {
        return Err(ProfileError::NoConvergence {
            iterations,
            grad_inf: gn,
        });
    }

    let s: Vec<f64> = (0..n).map(|j| -s_half + j as f64 * ds).collect();
    Ok(ConnectionResult {
        action,
        s,
        path,
        ncomp,
        iterations,
        grad_inf: gn,
    })
}

/// Default truncation half-width for connections: 10 * s_max.
pub fn default_s_half(profile: &ProfileTable) -> f64 {
    10.0 * profile.s_max
}
