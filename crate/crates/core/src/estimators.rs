//! Point estimators of a conditional probability `P(A|B)` from counts.
//!
//! All estimators work from a [`FrequencyPair`]: `n` occurrences of the
//! conditioning item B, `x` of which also contain A. Under a Beta(a, b)
//! prior the posterior is Beta(a + x, b + n - x); the estimators differ in
//! how they summarise it:
//!
//! | estimator                 | value                                   |
//! |---------------------------|-----------------------------------------|
//! | [`mle`]                   | `x / n` (posterior mode, uniform prior) |
//! | [`laplace_mean`]          | `(x + 1) / (n + 2)`                     |
//! | [`posterior_mean`]        | `(x + a) / (n + a + b)`                 |
//! | [`theta_lower_bound`]     | `t` with `P(Θ > t) = α`                 |
//! | [`clopper_pearson_lower`] | one-sided frequentist lower limit       |

use std::fmt;
use std::str::FromStr;

use crate::beta::{beta_quantile, BetaParams, Probability};
use crate::error::{Error, Result};

/// Observed counts for one conditional-probability query.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FrequencyPair {
    n: u64,
    x: u64,
}

impl FrequencyPair {
    pub fn new(n: u64, x: u64) -> Result<Self> {
        if x > n {
            return Err(Error::Domain(format!(
                "joint count x = {x} exceeds marginal count n = {n}"
            )));
        }
        Ok(FrequencyPair { n, x })
    }

    /// Occurrences of the conditioning item.
    pub fn n(&self) -> u64 {
        self.n
    }

    /// Joint occurrences.
    pub fn x(&self) -> u64 {
        self.x
    }
}

impl fmt::Display for FrequencyPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(n={}, x={})", self.n, self.x)
    }
}

/// Conjugate update: Beta(a, b) prior plus `f` gives Beta(a + x, b + n - x).
pub fn posterior_params(f: FrequencyPair, prior: BetaParams) -> BetaParams {
    BetaParams::new(prior.a() + f.x as f64, prior.b() + (f.n - f.x) as f64)
        .expect("positive prior plus nonnegative counts stays positive")
}

pub fn mle(f: FrequencyPair) -> Result<f64> {
    if f.n == 0 {
        return Err(Error::UndefinedEstimate);
    }
    Ok(f.x as f64 / f.n as f64)
}

/// Add-one smoothing, `(x + 1) / (n + 2)`. Defined for `n = 0`.
pub fn laplace_mean(f: FrequencyPair) -> f64 {
    (f.x as f64 + 1.0) / (f.n as f64 + 2.0)
}

pub fn posterior_mean(f: FrequencyPair, prior: BetaParams) -> f64 {
    (f.x as f64 + prior.a()) / (f.n as f64 + prior.a() + prior.b())
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "confidence level {alpha} must lie strictly between 0 and 1"
        )))
    }
}

/// Lower limit `θ_lb` of the credible interval `[θ_lb, 1]` that carries
/// posterior mass `alpha`.
///
/// Always strictly inside `(0, 1)`, including for `x = 0`.
pub fn theta_lower_bound(f: FrequencyPair, prior: BetaParams, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    beta_quantile(posterior_params(f, prior), 1.0 - alpha)
}

/// One-sided Clopper-Pearson lower limit at coverage `alpha`: zero when
/// `x = 0`, otherwise the `1 - alpha` quantile of Beta(x, n - x + 1).
pub fn clopper_pearson_lower(f: FrequencyPair, alpha: f64) -> Result<f64> {
    if f.n == 0 {
        return Err(Error::UndefinedEstimate);
    }
    check_alpha(alpha)?;
    if f.x == 0 {
        return Ok(0.0);
    }
    let shape = BetaParams::new(f.x as f64, (f.n - f.x + 1) as f64)?;
    beta_quantile(shape, 1.0 - alpha)
}

/// Method-of-moments Beta fit.
pub fn fit_prior_moments(mean: f64, variance: f64) -> Result<BetaParams> {
    if !(mean > 0.0 && mean < 1.0) {
        return Err(Error::Domain(format!(
            "mean {mean} must lie strictly between 0 and 1"
        )));
    }
    let bound = mean * (1.0 - mean);
    if variance.is_nan() || variance <= 0.0 {
        return Err(Error::Domain(format!(
            "variance {variance} must be positive"
        )));
    }
    if variance >= bound {
        return Err(Error::InfeasibleMoments { variance, bound });
    }
    let k = bound / variance - 1.0;
    BetaParams::new(mean * k, (1.0 - mean) * k)
}

/// Ratios closer than this to an excluded value are dropped.
pub const EXCLUSION_TOLERANCE: f64 = 1e-9;

/// Low-denominator ratios whose histogram spikes are artefacts of tiny
/// counts: 0 and every `p/q` with `q <= 5`.
pub const DEFAULT_EXCLUDED_RATIOS: [(u32, u32); 11] = [
    (0, 1),
    (1, 1),
    (1, 2),
    (1, 3),
    (2, 3),
    (1, 4),
    (3, 4),
    (1, 5),
    (2, 5),
    (3, 5),
    (4, 5),
];

pub fn default_exclusions() -> Vec<f64> {
    DEFAULT_EXCLUDED_RATIOS
        .iter()
        .map(|&(p, q)| f64::from(p) / f64::from(q))
        .collect()
}

/// Result of [`fit_prior_from_ratios`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PriorFit {
    pub params: BetaParams,
    /// Number of ratios left after exclusion.
    pub retained: usize,
    pub mean: f64,
    /// Unbiased sample variance of the retained ratios.
    pub variance: f64,
}

/// Fits a Beta prior to observed ratios after dropping the excluded atoms.
pub fn fit_prior_from_ratios(ratios: &[f64], excluded: &[f64]) -> Result<PriorFit> {
    let kept: Vec<f64> = ratios
        .iter()
        .copied()
        .filter(|r| {
            !excluded
                .iter()
                .any(|e| (r - e).abs() <= EXCLUSION_TOLERANCE)
        })
        .collect();
    if kept.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "{} of {} ratios remain after exclusion, need at least 2",
            kept.len(),
            ratios.len()
        )));
    }
    let count = kept.len() as f64;
    let mean = kept.iter().sum::<f64>() / count;
    let variance = kept.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / (count - 1.0);
    if variance <= 0.0 {
        return Err(Error::InsufficientData(
            "retained ratios have zero variance".into(),
        ));
    }
    let params = fit_prior_moments(mean, variance)?;
    Ok(PriorFit {
        params,
        retained: kept.len(),
        mean,
        variance,
    })
}

/// Minimum-support filter: `None` drops the pair entirely.
pub fn apply_minsup(f: FrequencyPair, minsup: u64) -> Option<FrequencyPair> {
    (f.n >= minsup).then_some(f)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EstimatorKind {
    Mle,
    Laplace,
    PosteriorMean,
    LowerBound,
    ClopperPearson,
}

impl EstimatorKind {
    /// Short name used in estimator specs and output labels.
    pub fn short_name(self) -> &'static str {
        match self {
            EstimatorKind::Mle => "mle",
            EstimatorKind::Laplace => "laplace",
            EstimatorKind::PosteriorMean => "pmean",
            EstimatorKind::LowerBound => "lb",
            EstimatorKind::ClopperPearson => "cp",
        }
    }
}

impl FromStr for EstimatorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "mle" => EstimatorKind::Mle,
            "laplace" => EstimatorKind::Laplace,
            "pmean" | "posterior_mean" => EstimatorKind::PosteriorMean,
            "lb" | "lower_bound" => EstimatorKind::LowerBound,
            "cp" | "clopper_pearson" => EstimatorKind::ClopperPearson,
            other => return Err(Error::UnknownEstimator(other.to_string())),
        })
    }
}

/// An estimator together with its parameters.
///
/// Parsed from specs of the form `kind[:key=val,...]`, for example
/// `lb:alpha=0.99`, `mle:minsup=3` or `pmean:a=0.17,b=1.06`. Recognised keys
/// are `alpha`, `a`, `b` and `minsup`; every kind accepts `minsup`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimatorConfig {
    pub kind: EstimatorKind,
    pub prior: BetaParams,
    pub alpha: Probability,
    pub minsup: u64,
}

pub const DEFAULT_ALPHA: f64 = 0.99;

impl EstimatorConfig {
    pub fn new(kind: EstimatorKind) -> Self {
        EstimatorConfig {
            kind,
            prior: BetaParams::uniform(),
            alpha: Probability::open(DEFAULT_ALPHA).expect("default alpha is valid"),
            minsup: 1,
        }
    }

    pub fn with_alpha(mut self, alpha: f64) -> Result<Self> {
        self.alpha = Probability::open(alpha)?;
        Ok(self)
    }

    pub fn with_prior(mut self, prior: BetaParams) -> Self {
        self.prior = prior;
        self
    }

    pub fn with_minsup(mut self, minsup: u64) -> Result<Self> {
        if minsup == 0 {
            return Err(Error::Domain("minsup must be at least 1".into()));
        }
        self.minsup = minsup;
        Ok(self)
    }

    /// Scores `f`, or `None` when minimum support drops it.
    pub fn estimate(&self, f: FrequencyPair) -> Result<Option<f64>> {
        let Some(f) = apply_minsup(f, self.minsup) else {
            return Ok(None);
        };
        let alpha = self.alpha.get();
        let value = match self.kind {
            EstimatorKind::Mle => mle(f)?,
            EstimatorKind::Laplace => laplace_mean(f),
            EstimatorKind::PosteriorMean => posterior_mean(f, self.prior),
            EstimatorKind::LowerBound => theta_lower_bound(f, self.prior, alpha)?,
            EstimatorKind::ClopperPearson => clopper_pearson_lower(f, alpha)?,
        };
        Ok(Some(value))
    }

    /// Filename-safe label, e.g. `lb_alpha=0.99` or `mle_minsup=3`.
    pub fn label(&self) -> String {
        let mut parts = vec![self.kind.short_name().to_string()];
        match self.kind {
            EstimatorKind::LowerBound | EstimatorKind::ClopperPearson => {
                parts.push(format!("alpha={}", self.alpha));
            }
            EstimatorKind::PosteriorMean => {
                parts.push(format!("a={}", self.prior.a()));
                parts.push(format!("b={}", self.prior.b()));
            }
            EstimatorKind::Mle | EstimatorKind::Laplace => {}
        }
        if self.kind == EstimatorKind::LowerBound && self.prior != BetaParams::uniform() {
            parts.push(format!("a={}", self.prior.a()));
            parts.push(format!("b={}", self.prior.b()));
        }
        if self.minsup != 1 || self.kind == EstimatorKind::Mle {
            parts.push(format!("minsup={}", self.minsup));
        }
        parts.join("_")
    }
}

impl FromStr for EstimatorConfig {
    type Err = Error;

    fn from_str(spec: &str) -> Result<Self> {
        let bad = |reason: String| Error::EstimatorSpec {
            spec: spec.to_string(),
            reason,
        };
        let (kind, rest) = match spec.split_once(':') {
            Some((kind, rest)) => (kind, rest),
            None => (spec, ""),
        };
        let mut config = EstimatorConfig::new(kind.trim().parse()?);
        let (mut a, mut b) = (config.prior.a(), config.prior.b());
        for item in rest.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| bad(format!("expected key=value, got `{item}`")))?;
            let number = |v: &str| {
                v.trim()
                    .parse::<f64>()
                    .map_err(|e| bad(format!("{key}: {e}")))
            };
            match key.trim() {
                "alpha" => {
                    config = config
                        .with_alpha(number(value)?)
                        .map_err(|e| bad(e.to_string()))?
                }
                "a" => a = number(value)?,
                "b" => b = number(value)?,
                "minsup" => {
                    let m = value
                        .trim()
                        .parse::<u64>()
                        .map_err(|e| bad(format!("minsup: {e}")))?;
                    config = config.with_minsup(m).map_err(|e| bad(e.to_string()))?;
                }
                other => return Err(bad(format!("unknown key `{other}`"))),
            }
        }
        config.prior = BetaParams::new(a, b).map_err(|e| bad(e.to_string()))?;
        Ok(config)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::beta::reg_inc_beta;
    use crate::oracles;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_distr::{Beta, Distribution};

    fn fp(n: u64, x: u64) -> FrequencyPair {
        FrequencyPair::new(n, x).unwrap()
    }

    fn uniform() -> BetaParams {
        BetaParams::uniform()
    }

    fn fitted() -> BetaParams {
        BetaParams::new(0.17, 1.06).unwrap()
    }

    #[test]
    fn frequency_pair_rejects_x_above_n() {
        assert!(FrequencyPair::new(2, 3).is_err());
        assert!(FrequencyPair::new(0, 0).is_ok());
    }

    #[test]
    fn posterior_update() {
        assert_eq!(posterior_params(fp(0, 0), uniform()), uniform());
        assert_eq!(
            posterior_params(fp(1, 0), uniform()),
            BetaParams::new(1.0, 2.0).unwrap()
        );
        assert_eq!(
            posterior_params(fp(4, 1), uniform()),
            BetaParams::new(2.0, 4.0).unwrap()
        );
    }

    #[test]
    fn mle_values() {
        assert_eq!(format!("{:.5}", mle(fp(4, 3)).unwrap()), "0.75000");
        assert_eq!(mle(fp(2, 1)).unwrap(), 0.5);
        assert_eq!(mle(fp(6, 0)).unwrap(), 0.0);
        assert!(matches!(mle(fp(0, 0)), Err(Error::UndefinedEstimate)));
    }

    #[test]
    fn laplace_values() {
        assert_eq!(format!("{:.5}", laplace_mean(fp(1, 0))), "0.33333");
        assert_eq!(format!("{:.5}", laplace_mean(fp(6, 6))), "0.87500");
        assert_eq!(laplace_mean(fp(0, 0)), 0.5);
    }

    #[test]
    fn posterior_mean_matches_integration() {
        assert_eq!(
            format!("{:.5}", posterior_mean(fp(1, 1), uniform())),
            "0.66667"
        );
        let prior = fitted();
        for (f, closed) in [(fp(0, 0), 0.17 / 1.23), (fp(1, 1), 1.17 / 2.23)] {
            let post = posterior_params(f, prior);
            let (a, b) = (post.a(), post.b());
            let norm = oracles::beta_integral(a, b);
            let first_moment = oracles::beta_integral(a + 1.0, b);
            let by_quadrature = first_moment / norm;
            let got = posterior_mean(f, prior);
            assert!(
                (got - by_quadrature).abs() < 1e-10,
                "{got} vs {by_quadrature}"
            );
            assert!((got - closed).abs() < 1e-15);
        }
        assert_eq!(format!("{:.5}", posterior_mean(fp(0, 0), prior)), "0.13821");
        assert_eq!(format!("{:.5}", posterior_mean(fp(1, 1), prior)), "0.52466");
    }

    #[test]
    fn lower_bound_values() {
        let lb = |n, x| theta_lower_bound(fp(n, x), uniform(), 0.99).unwrap();
        assert_eq!(format!("{:.5}", lb(1, 0)), "0.00501");
        assert_eq!(format!("{:.5}", lb(5, 3)), "0.17307");
        assert!((lb(0, 0) - 0.01).abs() < 1e-12);
    }

    #[test]
    fn lower_bound_rejects_degenerate_alpha() {
        for alpha in [0.0, 1.0, 1.2] {
            assert!(theta_lower_bound(fp(3, 1), uniform(), alpha).is_err());
        }
    }

    #[test]
    fn clopper_pearson_values() {
        assert_eq!(clopper_pearson_lower(fp(1, 0), 0.99).unwrap(), 0.0);
        // P(X >= 1 | theta) = 1 - (1 - theta) = theta for n = 1
        let expected =
            oracles::bisect_increasing(|t| oracles::binomial_upper_tail(1, 1, t), 0.01, 0.0, 1.0);
        let got = clopper_pearson_lower(fp(1, 1), 0.99).unwrap();
        assert!((got - expected).abs() < 1e-10);
        assert!((got - 0.01).abs() < 1e-10);

        let expected =
            oracles::bisect_increasing(|t| oracles::binomial_upper_tail(6, 3, t), 0.01, 0.0, 1.0);
        let got = clopper_pearson_lower(fp(6, 3), 0.99).unwrap();
        assert!((got - expected).abs() < 1e-10, "{got} vs {expected}");

        assert!(matches!(
            clopper_pearson_lower(fp(0, 0), 0.99),
            Err(Error::UndefinedEstimate)
        ));
    }

    #[test]
    fn clopper_pearson_is_zero_where_lower_bound_is_positive() {
        for n in 1..=30 {
            assert_eq!(clopper_pearson_lower(fp(n, 0), 0.99).unwrap(), 0.0);
            assert!(theta_lower_bound(fp(n, 0), uniform(), 0.99).unwrap() > 0.0);
        }
    }

    #[test]
    fn large_sample_matches_normal_approximation() {
        let f = fp(1_000_000, 500_000);
        let got = theta_lower_bound(f, uniform(), 0.99).unwrap();
        // posterior is close to N(0.5, 0.25 / n); z_0.99 = 2.326348
        let approx = 0.5 - 2.326_348 * (0.25_f64 / 1e6).sqrt();
        assert!((got - 0.5).abs() < 0.005);
        assert!((got - approx).abs() < 1e-5, "{got} vs {approx}");
    }

    #[test]
    fn moment_fit_examples() {
        let p = fit_prior_moments(0.5, 1.0 / 12.0).unwrap();
        assert!((p.a() - 1.0).abs() < 1e-12 && (p.b() - 1.0).abs() < 1e-12);
        let p = fit_prior_moments(0.5, 0.05).unwrap();
        assert!((p.a() - 2.0).abs() < 1e-12 && (p.b() - 2.0).abs() < 1e-12);

        // moments of Beta(0.17, 1.06) computed from the closed forms
        let (a, b) = (0.17_f64, 1.06_f64);
        let mean = a / (a + b);
        let var = a * b / ((a + b) * (a + b) * (a + b + 1.0));
        assert!((mean - 0.13821).abs() < 1e-5 && (var - 0.05342).abs() < 1e-5);
        let p = fit_prior_moments(mean, var).unwrap();
        assert!((p.a() - 0.17).abs() < 1e-2 && (p.b() - 1.06).abs() < 1e-2);
        let p = fit_prior_moments(0.13821, 0.05342).unwrap();
        assert!((p.a() - 0.17).abs() < 1e-2 && (p.b() - 1.06).abs() < 1e-2);
    }

    #[test]
    fn moment_fit_rejects_infeasible() {
        assert!(matches!(
            fit_prior_moments(0.5, 0.25),
            Err(Error::InfeasibleMoments { .. })
        ));
        assert!(fit_prior_moments(0.0, 0.01).is_err());
        assert!(fit_prior_moments(0.5, 0.0).is_err());
    }

    #[test]
    fn ratio_fit_excludes_everything() {
        let excluded = [1.0, 0.8, 0.2, 0.4, 0.6];
        let err = fit_prior_from_ratios(&[0.2, 0.4, 0.6, 0.8, 1.0], &excluded).unwrap_err();
        assert!(matches!(err, Error::InsufficientData(_)));
    }

    #[test]
    fn ratio_fit_uses_sample_moments() {
        let fit = fit_prior_from_ratios(&[0.1, 0.3], &[]).unwrap();
        assert!((fit.mean - 0.2).abs() < 1e-15);
        assert!((fit.variance - 0.02).abs() < 1e-15);
        // k = 0.16 / 0.02 - 1 = 7
        assert!((fit.params.a() - 1.4).abs() < 1e-12);
        assert!((fit.params.b() - 5.6).abs() < 1e-12);
        assert_eq!(fit.retained, 2);
    }

    #[test]
    fn ratio_fit_rational_atoms() {
        let ratios = [1.0 / 3.0, 2.0 / 3.0, 0.0, 0.125, 0.375, 0.3];
        let fit = fit_prior_from_ratios(&ratios, &default_exclusions()).unwrap();
        assert_eq!(fit.retained, 3);
        assert_eq!(default_exclusions().len(), 11);
    }

    #[test]
    fn ratio_fit_monte_carlo_round_trip() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        let dist = Beta::new(0.17, 1.06).unwrap();
        let sample: Vec<f64> = (0..100_000).map(|_| dist.sample(&mut rng)).collect();
        let fit = fit_prior_from_ratios(&sample, &[]).unwrap();
        assert!((fit.params.a() - 0.17).abs() < 0.05, "{:?}", fit.params);
        assert!((fit.params.b() - 1.06).abs() < 0.05, "{:?}", fit.params);
    }

    #[test]
    fn minsup_filter() {
        assert_eq!(apply_minsup(fp(1, 1), 2), None);
        assert_eq!(apply_minsup(fp(5, 2), 2), Some(fp(5, 2)));
        assert_eq!(apply_minsup(fp(1, 1), 1), Some(fp(1, 1)));
    }

    #[test]
    fn spec_parsing() {
        let c: EstimatorConfig = "lb:alpha=0.99".parse().unwrap();
        assert_eq!(c.kind, EstimatorKind::LowerBound);
        assert_eq!(c.alpha.get(), 0.99);
        assert_eq!(c.label(), "lb_alpha=0.99");

        let c: EstimatorConfig = "mle:minsup=3".parse().unwrap();
        assert_eq!(c.minsup, 3);
        assert_eq!(c.label(), "mle_minsup=3");

        let c: EstimatorConfig = "pmean:a=0.17,b=1.06".parse().unwrap();
        assert_eq!(c.prior, fitted());
        assert_eq!(c.label(), "pmean_a=0.17_b=1.06");

        let c: EstimatorConfig = "laplace".parse().unwrap();
        assert_eq!(c.kind, EstimatorKind::Laplace);

        assert!(matches!(
            "bogus".parse::<EstimatorConfig>(),
            Err(Error::UnknownEstimator(_))
        ));
        assert!("lb:alpha=1".parse::<EstimatorConfig>().is_err());
        assert!("lb:gamma=2".parse::<EstimatorConfig>().is_err());
        assert!("mle:minsup=0".parse::<EstimatorConfig>().is_err());
        assert!("pmean:a=-1".parse::<EstimatorConfig>().is_err());
    }

    #[test]
    fn config_estimate_applies_minsup() {
        let c: EstimatorConfig = "mle:minsup=2".parse().unwrap();
        assert_eq!(c.estimate(fp(1, 1)).unwrap(), None);
        assert_eq!(c.estimate(fp(4, 1)).unwrap(), Some(0.25));
    }

    proptest! {
        #[test]
        fn lower_bound_positive_and_survival(
            n in 0u64..2000,
            frac in 0.0f64..=1.0,
            alpha in 0.5f64..0.9999,
            a in 0.05f64..5.0,
            b in 0.05f64..5.0,
        ) {
            let x = (frac * n as f64).round() as u64;
            let f = fp(n, x);
            let prior = BetaParams::new(a, b).unwrap();
            let lb = theta_lower_bound(f, prior, alpha).unwrap();
            prop_assert!(lb > 0.0 && lb < 1.0);
            let survival = reg_inc_beta(lb, posterior_params(f, prior)).unwrap();
            prop_assert!((survival - (1.0 - alpha)).abs() <= 1e-9);
        }
    }
}
