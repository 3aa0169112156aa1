//! Small numerical helpers shared across modules: compensated summation,
//! adaptive Simpson quadrature, Hermite interpolation, smoothsteps, OLS fits.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum QuadError {
    #[error("adaptive quadrature did not reach tolerance {tol:e} within the subdivision budget")]
    QuadratureFailure { tol: f64 },
}

/// Kahan-Babuska compensated summation; fixed order, deterministic.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

fn adaptive_simpson_rec(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Result<f64, QuadError> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let err = left + right - whole;
    // accept on the requested tolerance or on the rounding floor of the panel
    let floor = 1e-14 * (left.abs() + right.abs());
    if err.abs() <= (15.0 * tol).max(floor) {
        return Ok(left + right + err / 15.0);
    }
    if depth == 0 {
        return Err(QuadError::QuadratureFailure { tol });
    }
    let l = adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)?;
    let r = adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)?;
    Ok(l + r)
}

/// Adaptive Simpson on [a, b] with absolute tolerance `tol`.
pub fn adaptive_simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<f64, QuadError> {
    if a == b {
        return Ok(0.0);
    }
    let m = 0.5 * (a + b);
    let fa = f(a);
    let fm = f(m);
    let fb = f(b);
    let whole = simpson(a, b, fa, fm, fb);
    adaptive_simpson_rec(&f, a, b, fa, fm, fb, whole, tol, 48)
}

/// Cubic Hermite value on [x0, x1] with endpoint values/slopes.
#[inline]
pub fn hermite(x: f64, x0: f64, x1: f64, y0: f64, y1: f64, m0: f64, m1: f64) -> f64 {
    let h = x1 - x0;
    let t = (x - x0) / h;
    let t2 = t * t;
    let t3 = t2 * t;
    let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
    let h10 = t3 - 2.0 * t2 + t;
    let h01 = -2.0 * t3 + 3.0 * t2;
    let h11 = t3 - t2;
    h00 * y0 + h10 * h * m0 + h01 * y1 + h11 * h * m1
}

/// Derivative of the cubic Hermite interpolant at x.
#[inline]
pub fn hermite_deriv(x: f64, x0: f64, x1: f64, y0: f64, y1: f64, m0: f64, m1: f64) -> f64 {
    let h = x1 - x0;
    let t = (x - x0) / h;
    let t2 = t * t;
    let dh00 = (6.0 * t2 - 6.0 * t) / h;
    let dh10 = 3.0 * t2 - 4.0 * t + 1.0;
    let dh01 = (-6.0 * t2 + 6.0 * t) / h;
    let dh11 = 3.0 * t2 - 2.0 * t;
    dh00 * y0 + dh10 * m0 + dh01 * y1 + dh11 * m1
}

/// Two-point quintic Hermite on [x0, x1] matching values, first and second
/// derivatives at both ends.
#[allow(clippy::too_many_arguments)]
#[inline]
pub fn quintic_hermite(
    x: f64,
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
    m0: f64,
    m1: f64,
    c0: f64,
    c1: f64,
) -> f64 {
    let h = x1 - x0;
    let t = (x - x0) / h;
    let t2 = t * t;
    let t3 = t2 * t;
    let t4 = t3 * t;
    let t5 = t4 * t;
    let h0 = 1.0 - 10.0 * t3 + 15.0 * t4 - 6.0 * t5;
    let h1 = 10.0 * t3 - 15.0 * t4 + 6.0 * t5;
    let h2 = t - 6.0 * t3 + 8.0 * t4 - 3.0 * t5;
    let h3 = -4.0 * t3 + 7.0 * t4 - 3.0 * t5;
    let h4 = 0.5 * (t2 - 3.0 * t3 + 3.0 * t4 - t5);
    let h5 = 0.5 * (t3 - 2.0 * t4 + t5);
    h0 * y0 + h1 * y1 + h * (h2 * m0 + h3 * m1) + h * h * (h4 * c0 + h5 * c1)
}

/// C^2 quintic step: 1 for z <= 0, 0 for z >= 1, monotone in between.
#[inline]
pub fn quintic_cutoff(z: f64) -> f64 {
    if z <= 0.0 {
        1.0
    } else if z >= 1.0 {
        0.0
    } else {
        let z3 = z * z * z;
        1.0 - z3 * (10.0 - 15.0 * z + 6.0 * z * z)
    }
}

/// Ordinary least squares fit y = a + b x; returns (slope, intercept, slope std error).
pub fn ols_slope(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    assert!(xs.len() == ys.len() && xs.len() >= 2);
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let mut ss_res = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        let r = y - (intercept + slope * x);
        ss_res += r * r;
    }
    let se = if xs.len() > 2 {
        (ss_res / (n - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    (slope, intercept, se)
}

/// Percentile (0..=100) of a sample by linear interpolation on the sorted copy.
pub fn percentile(values: &[f64], p: f64) -> f64 {
    assert!(!values.is_empty());
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let rank = p / 100.0 * (v.len() - 1) as f64;
    let lo = rank.floor() as usize;
    let hi = rank.ceil() as usize;
    if lo == hi {
        v[lo]
    } else {
        v[lo] + (rank - lo as f64) * (v[hi] - v[lo])
    }
}

/// Tridiagonal solve (Thomas algorithm) for a system with constant off-diagonals:
/// `(diag) x_i + off (x_{i-1} + x_{i+1}) = rhs_i`, Dirichlet exterior values already
/// folded into `rhs`. `scratch` must have the same length as `rhs`.
pub fn thomas_const(diag: f64, off: f64, rhs: &mut [f64], scratch: &mut [f64]) {
    let n = rhs.len();
    if n == 0 {
        return;
    }
    // forward sweep
    scratch[0] = off / diag;
    rhs[0] /= diag;
    for i in 1..n {
        let m = diag - off * scratch[i - 1];
        scratch[i] = off / m;
        rhs[i] = (rhs[i] - off * rhs[i - 1]) / m;
    }
    for i in (0..n - 1).rev() {
        rhs[i] -= scratch[i] * rhs[i + 1];
    }
}
