//! Independent reference computations used by the test suites. Nothing in
//! here calls into the crate under test.
#![allow(dead_code)]

/// Binomial coefficient in floating point.
pub fn choose(n: u32, k: u32) -> f64 {
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * f64::from(n - i) / f64::from(i + 1))
}

/// `P(X >= k)` for `X ~ Binomial(n, theta)`.
pub fn binomial_upper_tail(n: u32, k: u32, theta: f64) -> f64 {
    (k..=n)
        .map(|j| choose(n, j) * theta.powi(j as i32) * (1.0 - theta).powi((n - j) as i32))
        .sum()
}

/// `I_t(a, b)` for integer shapes via
/// `Σ_{j=a}^{a+b-1} C(a+b-1, j) t^j (1-t)^(a+b-1-j)`.
pub fn inc_beta_binomial_sum(t: f64, a: u32, b: u32) -> f64 {
    binomial_upper_tail(a + b - 1, a, t)
}

/// Root of an increasing function on `[lo, hi]` by plain bisection.
pub fn bisect_increasing(f: impl Fn(f64) -> f64, target: f64, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Tanh-sinh quadrature over `(0, 1)`. The integrand receives both `t` and
/// `1 - t`, each computed without cancellation, so endpoint singularities of
/// the form `t^(a-1)` and `(1-t)^(b-1)` are integrated to near machine
/// precision.
pub fn tanh_sinh_unit(f: impl Fn(f64, f64) -> f64) -> f64 {
    let h = 1.0 / 256.0;
    let half_pi = std::f64::consts::FRAC_PI_2;
    let mut sum = 0.0;
    let kmax = (6.5 / h) as i64;
    for k in -kmax..=kmax {
        let tau = k as f64 * h;
        let u = half_pi * tau.sinh();
        let t = 1.0 / (1.0 + (-2.0 * u).exp());
        let s = 1.0 / (1.0 + (2.0 * u).exp());
        if t <= 0.0 || s <= 0.0 {
            continue;
        }
        // dt/dtau = pi cosh(tau) t (1 - t)
        let w = std::f64::consts::PI * tau.cosh() * t * s;
        let v = f(t, s);
        if v.is_finite() {
            sum += w * v;
        }
    }
    sum * h
}

/// `B(a, b)` by quadrature.
pub fn beta_integral(a: f64, b: f64) -> f64 {
    tanh_sinh_unit(|t, s| (a - 1.0).mul_add(t.ln(), (b - 1.0) * s.ln()).exp())
}
