//! Beta-function kernel: log beta, the regularized incomplete beta function
//! and its inverse.
//!
//! `reg_inc_beta` uses the classic continued fraction (modified Lentz) with
//! the `I_t(a,b) = 1 - I_{1-t}(b,a)` swap whenever `t` lies past the
//! fraction's region of fast convergence. `beta_quantile` brackets the root
//! in `[0, 1]` and refines it with Newton steps on the Beta density, falling
//! back to bisection whenever a step leaves the bracket.

use std::fmt;

use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

/// Shape parameters `(a, b)` of a Beta distribution. Both strictly positive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaParams {
    a: f64,
    b: f64,
}

impl BetaParams {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && a > 0.0) || !(b.is_finite() && b > 0.0) {
            return Err(Error::Domain(format!(
                "beta shape parameters must be finite and positive, got ({a}, {b})"
            )));
        }
        Ok(BetaParams { a, b })
    }

    /// Beta(1, 1).
    pub const fn uniform() -> Self {
        BetaParams { a: 1.0, b: 1.0 }
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn mean(&self) -> f64 {
        self.a / (self.a + self.b)
    }

    pub fn variance(&self) -> f64 {
        let s = self.a + self.b;
        self.a * self.b / (s * s * (s + 1.0))
    }

    /// The mirrored distribution Beta(b, a).
    pub fn swapped(&self) -> Self {
        BetaParams {
            a: self.b,
            b: self.a,
        }
    }
}

impl Default for BetaParams {
    fn default() -> Self {
        Self::uniform()
    }
}

impl fmt::Display for BetaParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Beta({}, {})", self.a, self.b)
    }
}

/// A real number in the closed unit interval.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Probability(f64);

impl Probability {
    pub fn new(value: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&value) {
            Ok(Probability(value))
        } else {
            Err(Error::Domain(format!("{value} is not a probability")))
        }
    }

    /// Like [`Probability::new`] but also rejects the endpoints 0 and 1.
    pub fn open(value: f64) -> Result<Self> {
        if value > 0.0 && value < 1.0 {
            Ok(Probability(value))
        } else {
            Err(Error::Domain(format!(
                "{value} must lie strictly between 0 and 1"
            )))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

impl fmt::Display for Probability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// Remainder of Stirling's series: `ln Γ(x) - ((x - 1/2) ln x - x + ln √(2π))`.
/// Truncation error is below 1e-15 for `x >= 10`.
fn stirling_correction(x: f64) -> f64 {
    let r = 1.0 / x;
    let r2 = r * r;
    r * (1.0 / 12.0
        - r2 * (1.0 / 360.0
            - r2 * (1.0 / 1260.0
                - r2 * (1.0 / 1680.0
                    - r2 * (1.0 / 1188.0 - r2 * (691.0 / 360_360.0 - r2 / 156.0))))))
}

/// `ln B(a, b)` without validating the arguments.
///
/// Large arguments go through Stirling corrections rather than subtracting
/// three large `ln Γ` values, which would cancel catastrophically.
pub(crate) fn ln_beta(a: f64, b: f64) -> f64 {
    let (p, q) = if a <= b { (a, b) } else { (b, a) };
    if p >= 10.0 {
        let corr = stirling_correction(p) + stirling_correction(q) - stirling_correction(p + q);
        let ratio = p / (p + q);
        -0.5 * q.ln() + LN_SQRT_2PI + corr + (p - 0.5) * ratio.ln() + q * (-ratio).ln_1p()
    } else if q >= 10.0 {
        let corr = stirling_correction(q) - stirling_correction(p + q);
        ln_gamma(p) + corr + p - p * (p + q).ln() + (q - 0.5) * (-p / (p + q)).ln_1p()
    } else {
        ln_gamma(p) + ln_gamma(q) - ln_gamma(p + q)
    }
}

/// `ln B(a, b) = ln Γ(a) + ln Γ(b) - ln Γ(a + b)`.
pub fn log_beta_function(p: BetaParams) -> f64 {
    ln_beta(p.a, p.b)
}

/// Density of Beta(a, b) at `t`.
pub fn beta_pdf(t: f64, p: BetaParams) -> f64 {
    if !(0.0..=1.0).contains(&t) {
        return 0.0;
    }
    if t == 0.0 || t == 1.0 {
        // Edge values are limits; only finite ones are meaningful.
        let shape = if t == 0.0 { p.a } else { p.b };
        return if shape < 1.0 {
            f64::INFINITY
        } else if shape > 1.0 {
            0.0
        } else {
            (-ln_beta(p.a, p.b)).exp()
        };
    }
    ((p.a - 1.0) * t.ln() + (p.b - 1.0) * (-t).ln_1p() - ln_beta(p.a, p.b)).exp()
}

const CF_MAX_ITER: usize = 20_000;
const CF_TINY: f64 = 1e-300;

/// Continued fraction for `I_t(a, b)`, accurate when `t < (a + 1) / (a + b + 2)`.
fn inc_beta_cf(a: f64, b: f64, t: f64) -> Result<f64> {
    let front = (a * t.ln() + b * (-t).ln_1p() - ln_beta(a, b)).exp() / a;

    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * t / qap;
    if d.abs() < CF_TINY {
        d = CF_TINY;
    }
    d = 1.0 / d;
    let mut h = d;

    for m in 1..=CF_MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;

        // even term
        let aa = m * (b - m) * t / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < CF_TINY {
            d = CF_TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < CF_TINY {
            c = CF_TINY;
        }
        d = 1.0 / d;
        h *= d * c;

        // odd term
        let aa = -(a + m) * (qab + m) * t / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < CF_TINY {
            d = CF_TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < CF_TINY {
            c = CF_TINY;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;

        if (delta - 1.0).abs() <= f64::EPSILON {
            return Ok(front * h);
        }
    }
    Err(Error::Domain(format!(
        "incomplete beta continued fraction did not converge for ({a}, {b}) at t={t}"
    )))
}

/// Regularized incomplete beta function `I_t(a, b)`, i.e. the Beta(a, b) CDF.
///
/// Returns exactly 0 at `t = 0` and exactly 1 at `t = 1`.
pub fn reg_inc_beta(t: f64, p: BetaParams) -> Result<f64> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::Domain(format!("t = {t} outside [0, 1]")));
    }
    if t == 0.0 {
        return Ok(0.0);
    }
    if t == 1.0 {
        return Ok(1.0);
    }
    let (a, b) = (p.a, p.b);
    let value = if t > (a + 1.0) / (a + b + 2.0) {
        1.0 - inc_beta_cf(b, a, 1.0 - t)?
    } else {
        inc_beta_cf(a, b, t)?
    };
    Ok(value.clamp(0.0, 1.0))
}

/// Residual bound every returned quantile satisfies.
pub const QUANTILE_TOLERANCE: f64 = 1e-10;
const QUANTILE_MAX_ITER: usize = 400;

/// Inverse of [`reg_inc_beta`]: the `t` with `I_t(a, b) = q`.
///
/// `q` must lie strictly inside `(0, 1)`; the endpoints are rejected rather
/// than mapped to 0 or 1. A search that ends with `|I_t - q| > 1e-10`
/// reports [`Error::Convergence`].
pub fn beta_quantile(p: BetaParams, q: f64) -> Result<f64> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::Domain(format!(
            "quantile level {q} must lie strictly between 0 and 1"
        )));
    }
    let (a, b) = (p.a, p.b);
    let lbeta = ln_beta(a, b);
    let cdf = |t: f64| reg_inc_beta(t, p);
    // Newton slope, in the log domain to avoid overflow near the edges.
    let ln_pdf = |t: f64| (a - 1.0) * t.ln() + (b - 1.0) * (-t).ln_1p() - lbeta;

    let mean = p.mean();
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    let f_mean = cdf(mean)? - q;
    if f_mean == 0.0 {
        return Ok(mean);
    }
    // Leading-order tail expansions: I_t ~ t^a / (a B) near 0, and
    // 1 - I_t ~ (1 - t)^b / (b B) near 1.
    let mut t = if f_mean > 0.0 {
        hi = mean;
        ((q.ln() + a.ln() + lbeta) / a).exp()
    } else {
        lo = mean;
        1.0 - (((-q).ln_1p() + b.ln() + lbeta) / b).exp()
    };
    if !(t > lo && t < hi) {
        t = 0.5 * (lo + hi);
    }

    let mut residual = f64::INFINITY;
    for _ in 0..QUANTILE_MAX_ITER {
        let f = cdf(t)? - q;
        residual = f.abs();
        if f == 0.0 {
            return Ok(t);
        }
        if f < 0.0 {
            lo = t;
        } else {
            hi = t;
        }

        let slope = ln_pdf(t).exp();
        let newton = t - f / slope;
        let next = if slope.is_finite() && slope > 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };

        if (next - t).abs() <= 2.0 * f64::EPSILON * t.max(f64::MIN_POSITIVE)
            || hi - lo <= 2.0 * f64::EPSILON * hi
        {
            let f_next = cdf(next)? - q;
            let (best_t, best_r) = if f_next.abs() < residual {
                (next, f_next.abs())
            } else {
                (t, residual)
            };
            if best_r <= QUANTILE_TOLERANCE {
                return Ok(best_t);
            }
            residual = best_r;
            break;
        }
        t = next;
    }
    Err(Error::Convergence { a, b, q, residual })
}
