use serde::Serialize;

use super::{DiagnosticsError, Result};

/// Ratio the final step must undercut for a superlinear verdict.
pub const SUPERLINEAR_THRESHOLD: f64 = 0.1;

/// Geometric-rate summary of a positive residual sequence.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RateReport {
    /// `exp(slope)` of the least-squares line through `(k, ln res_k)` over the window.
    pub rate: f64,
    /// First index of the fitting window; it runs to the end of the sequence.
    pub window_start: usize,
    /// `res_{k+1} / res_k` for the whole sequence.
    pub ratios: Vec<f64>,
    /// Last three ratios strictly decreasing and the final one below [`SUPERLINEAR_THRESHOLD`].
    pub superlinear: bool,
}

impl RateReport {
    pub fn is_superlinear(&self, threshold: f64) -> bool {
        last_three_decreasing(&self.ratios) && self.ratios.last().is_some_and(|r| *r < threshold)
    }
}

/// True when the last three entries are strictly decreasing.
pub fn last_three_decreasing(ratios: &[f64]) -> bool {
    ratios.len() >= 3 && ratios[ratios.len() - 3..].windows(2).all(|w| w[1] < w[0])
}

/// Start of the default window: the last six entries among those above
/// `1e2 * eps * res_0`, so the floating-point floor is not fitted.
pub fn default_window_start(residuals: &[f64]) -> usize {
    default_window(residuals).0
}

fn default_window(residuals: &[f64]) -> (usize, usize) {
    let floor = 1e2 * f64::EPSILON * residuals.first().copied().unwrap_or(0.0);
    let end = residuals.iter().rposition(|r| *r > floor).map_or(0, |i| i + 1);
    (end.saturating_sub(6), end)
}

/// Fits a geometric rate over the trailing `window` entries, or over the
/// default window (see [`default_window_start`]) when `None`.
pub fn fit_linear_rate(residuals: &[f64], window: Option<usize>) -> Result<RateReport> {
    if let Some((index, &value)) = residuals.iter().enumerate().find(|(_, r)| !(**r > 0.0)) {
        return Err(DiagnosticsError::NonPositiveResidual { index, value });
    }
    let (start, end) = match window {
        Some(w) => (residuals.len().saturating_sub(w), residuals.len()),
        None => default_window(residuals),
    };
    let len = end - start;
    if len < 3 {
        return Err(DiagnosticsError::TooShort { len, needed: 3 });
    }
    let pts: Vec<(f64, f64)> = (start..end).map(|k| (k as f64, residuals[k].ln())).collect();
    let n = len as f64;
    let (mx, my) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x / n, b + y / n));
    let (sxy, sxx) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + (x - mx) * (y - my), b + (x - mx) * (x - mx)));
    let rate = (sxy / sxx).exp();
    let ratios: Vec<f64> = residuals.windows(2).map(|w| w[1] / w[0]).collect();
    let mut report = RateReport { rate, window_start: start, ratios, superlinear: false };
    report.superlinear = report.is_superlinear(SUPERLINEAR_THRESHOLD);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometric_sequence_recovers_ratio() {
        let r = fit_linear_rate(&[1.0, 0.5, 0.25, 0.125], None).unwrap();
        assert!((r.rate - 0.5).abs() < 1e-12);
        assert!(!r.superlinear);
    }

    #[test]
    fn constant_sequence_has_unit_rate() {
        let r = fit_linear_rate(&[3.0; 5], None).unwrap();
        assert!((r.rate - 1.0).abs() < 1e-12);
    }

    #[test]
    fn constructed_superlinear_decay() {
        let r = fit_linear_rate(&[1.0, 1e-1, 1e-3, 1e-7], None).unwrap();
        for (got, want) in r.ratios.iter().zip([1e-1, 1e-2, 1e-4]) {
            assert!((got / want - 1.0).abs() < 1e-12);
        }
        assert!(r.superlinear);
    }

    #[test]
    fn window_excludes_floor() {
        let mut res: Vec<f64> = (0..10).map(|k| 0.1f64.powi(k)).collect();
        res.extend([1e-15, 1e-15, 1e-15]);
        assert_eq!(default_window_start(&res), 4);
        assert!((fit_linear_rate(&res, None).unwrap().rate - 0.1).abs() < 1e-10);
    }

    #[test]
    fn errors() {
        assert!(matches!(fit_linear_rate(&[1.0, 0.5], None), Err(DiagnosticsError::TooShort { .. })));
        assert!(matches!(
            fit_linear_rate(&[1.0, 0.0, 0.5], None),
            Err(DiagnosticsError::NonPositiveResidual { index: 1, .. })
        ));
    }
}
