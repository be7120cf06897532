//! Least-squares fits of `log variance = intercept + slope · log N`.

use super::VarianceSummary;
use crate::error::{Error, Result};
use crate::samplers::Method;

#[derive(Debug, Clone, PartialEq)]
pub struct SlopeFit {
    pub method: Method,
    pub integrand: String,
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Ordinary least squares on `(ln n, ln v)` pairs. Returns
/// `(slope, intercept, r²)`.
pub fn fit_power_law(points: &[(f64, f64)]) -> Result<(f64, f64, f64)> {
    let mut distinct: Vec<f64> = points.iter().map(|p| p.0).collect();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    if distinct.len() < 3 {
        return Err(Error::DegenerateFit(format!(
            "need at least 3 distinct N values, got {}",
            distinct.len()
        )));
    }
    if let Some(&(n, v)) = points
        .iter()
        .find(|(n, v)| !(*n > 0.0 && *v > 0.0 && v.is_finite()))
    {
        return Err(Error::DegenerateFit(format!(
            "cannot take logarithms of N={n}, variance={v}"
        )));
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|(n, v)| (n.ln(), v.ln())).collect();
    let m = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / m;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = logs.iter().map(|p| (p.1 - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r_squared = if syy == 0.0 {
        1.0
    } else {
        (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0)
    };
    Ok((slope, intercept, r_squared))
}

/// Fit over every row of `summary` belonging to `method`.
pub fn fit_loglog_slope(summary: &VarianceSummary, method: Method) -> Result<SlopeFit> {
    let rows: Vec<_> = summary.rows_for(method).collect();
    let integrand = rows
        .first()
        .map(|r| r.integrand.clone())
        .ok_or_else(|| Error::DegenerateFit(format!("no rows for method {method}")))?;
    let points: Vec<(f64, f64)> = rows.iter().map(|r| (r.n as f64, r.variance)).collect();
    let (slope, intercept, r_squared) =
        fit_power_law(&points).map_err(|e| Error::DegenerateFit(format!("{method}: {e}")))?;
    Ok(SlopeFit {
        method,
        integrand,
        slope,
        intercept,
        r_squared,
    })
}
