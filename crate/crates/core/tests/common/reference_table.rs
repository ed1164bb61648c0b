//! Published estimator table: uniform prior, confidence level 0.99.
#![allow(dead_code)]

/// `(n, x, mle, laplace, theta_lb)`
pub const REFERENCE_ROWS: [(u64, u64, f64, f64, f64); 27] = [
    (1, 0, 0.00000, 0.33333, 0.00501),
    (1, 1, 1.00000, 0.66667, 0.10000),
    (2, 0, 0.00000, 0.25000, 0.00334),
    (2, 1, 0.50000, 0.50000, 0.05890),
    (2, 2, 1.00000, 0.75000, 0.21544),
    (3, 0, 0.00000, 0.20000, 0.00251),
    (3, 1, 0.33333, 0.40000, 0.04200),
    (3, 2, 0.66667, 0.60000, 0.14087),
    (3, 3, 1.00000, 0.80000, 0.31623),
    (4, 0, 0.00000, 0.16667, 0.00201),
    (4, 1, 0.25000, 0.33333, 0.03268),
    (4, 2, 0.50000, 0.50000, 0.10564),
    (4, 3, 0.75000, 0.66667, 0.22207),
    (4, 4, 1.00000, 0.83333, 0.39811),
    (5, 0, 0.00000, 0.14286, 0.00167),
    (5, 1, 0.20000, 0.28571, 0.02676),
    (5, 2, 0.40000, 0.42857, 0.08473),
    (5, 3, 0.60000, 0.57143, 0.17307),
    (5, 4, 0.80000, 0.71429, 0.29431),
    (5, 5, 1.00000, 0.85714, 0.46416),
    (6, 0, 0.00000, 0.12500, 0.00144),
    (6, 1, 0.16667, 0.25000, 0.02267),
    (6, 2, 0.33333, 0.37500, 0.07080),
    (6, 3, 0.50000, 0.50000, 0.14227),
    (6, 4, 0.66667, 0.62500, 0.23632),
    (6, 5, 0.83333, 0.75000, 0.35664),
    (6, 6, 1.00000, 0.87500, 0.51795),
];

/// The table as CSV, exactly as the `table` command should print it.
pub fn reference_csv() -> String {
    let mut s = String::from("n,x,mle,laplace,theta_lb\n");
    for (n, x, mle, laplace, lb) in REFERENCE_ROWS {
        s.push_str(&format!("{n},{x},{mle:.5},{laplace:.5},{lb:.5}\n"));
    }
    s
}
