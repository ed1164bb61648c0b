//! Precomputed estimator tables: for every `(n, x)` with `1 <= n <= n_max`,
//! the MLE, posterior mean and lower bound side by side.

use std::io::Write;

use crate::beta::BetaParams;
use crate::error::{Error, Result};
use crate::estimators::{mle, posterior_mean, theta_lower_bound, FrequencyPair};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimatorTableRow {
    pub n: u64,
    pub x: u64,
    /// `x / n`; absent only for `n = 0`.
    pub mle: Option<f64>,
    /// Posterior mean; `(x + 1) / (n + 2)` under the uniform prior.
    pub laplace: f64,
    pub lower_bound: f64,
}

pub const CSV_HEADER: &str = "n,x,mle,laplace,theta_lb";

/// One row per `(n, x)`, `1 <= n <= n_max`, `0 <= x <= n`, ascending.
pub fn generate_table(n_max: u64, alpha: f64, prior: BetaParams) -> Result<Vec<EstimatorTableRow>> {
    if n_max == 0 {
        return Err(Error::Domain("n_max must be at least 1".into()));
    }
    let mut rows = Vec::with_capacity((n_max * (n_max + 3) / 2) as usize);
    for n in 1..=n_max {
        for x in 0..=n {
            let f = FrequencyPair::new(n, x)?;
            rows.push(EstimatorTableRow {
                n,
                x,
                mle: mle(f).ok(),
                laplace: posterior_mean(f, prior),
                lower_bound: theta_lower_bound(f, prior, alpha)?,
            });
        }
    }
    Ok(rows)
}

/// Rounds half-up to five decimals and renders in fixed point.
pub fn format_5dp(value: f64) -> String {
    let rounded = (value * 1e5 + 0.5).floor() / 1e5;
    format!("{rounded:.5}")
}

pub fn write_csv<W: Write>(rows: &[EstimatorTableRow], mut out: W) -> std::io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for row in rows {
        let mle = row.mle.map_or_else(|| "NA".to_string(), format_5dp);
        writeln!(
            out,
            "{},{},{},{},{}",
            row.n,
            row.x,
            mle,
            format_5dp(row.laplace),
            format_5dp(row.lower_bound)
        )?;
    }
    Ok(())
}
