//! Closed-form upper bound for the log of the sharp constant, the
//! asymptotic main term and error envelope, and the monotonicity
//! relations, all used as checks against the determinant solver.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::sharpsolve::ep1_constant;
use crate::specialfn::log_gamma;

fn check_range(alpha: f64, beta: f64, strict: bool) -> Result<()> {
    let ok = beta > -1.0 && if strict { alpha > beta } else { alpha >= beta };
    if ok && alpha.is_finite() && beta.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "need alpha {} beta > -1, got alpha = {alpha}, beta = {beta}",
            if strict { ">" } else { ">=" }
        )))
    }
}

/// Test-function upper bound:
/// `log EP1 <= 2(a-b) log 2 + log((b+1)/(a+1))
///  + 2 log G(a-b+1) + log G(2a-b+2) - log G(2a-2b+1) - log G(b+2)`.
pub fn upper_bound_log_ep1(alpha: f64, beta: f64) -> Result<f64> {
    check_range(alpha, beta, false)?;
    Ok(2.0 * (alpha - beta) * 2.0_f64.ln()
        + ((beta + 1.0) / (alpha + 1.0)).ln()
        + 2.0 * log_gamma(alpha - beta + 1.0)?
        + log_gamma(2.0 * alpha - beta + 2.0)?
        - log_gamma(2.0 * alpha - 2.0 * beta + 1.0)?
        - log_gamma(beta + 2.0)?)
}

/// Asymptotic main term `M(a, b) = 2(a-b) log(a+2) + log((b+1)/(a+1))`.
pub fn asymptotic_main_term(alpha: f64, beta: f64) -> Result<f64> {
    check_range(alpha, beta, false)?;
    Ok(2.0 * (alpha - beta) * (alpha + 2.0).ln() + ((beta + 1.0) / (alpha + 1.0)).ln())
}

/// The bracketed error envelope
/// `((a-b)(a+2)/(a+1)) log(2(a+1)(a-b+1)/((a-b)(a+2)))`, positive
/// throughout `a > b > -1`.
pub fn asymptotic_envelope(alpha: f64, beta: f64) -> Result<f64> {
    check_range(alpha, beta, true)?;
    let x = alpha - beta;
    Ok((x * (alpha + 2.0) / (alpha + 1.0))
        * (2.0 * (alpha + 1.0) * (x + 1.0) / (x * (alpha + 2.0))).ln())
}

/// One calibration row of the asymptotics check.
#[derive(Debug, Clone, Serialize)]
pub struct AsymptoticsReport {
    pub alpha: f64,
    pub beta: f64,
    /// `log EP1(alpha, beta; 1; 1)` from the determinant solver
    /// (integer gap only).
    pub log_ep1: f64,
    pub main_term: f64,
    pub envelope: f64,
    pub upper_bound_log: f64,
    /// `|log_ep1 - main_term| / envelope`.
    pub ratio: f64,
}

/// Builds a calibration row for `alpha = beta + k`.
pub fn asymptotics_report(beta: f64, k: u32) -> Result<AsymptoticsReport> {
    let alpha = beta + k as f64;
    let log_ep1 = ep1_constant(beta, k, 1.0)?.ln();
    let main_term = asymptotic_main_term(alpha, beta)?;
    let envelope = asymptotic_envelope(alpha, beta)?;
    let upper_bound_log = upper_bound_log_ep1(alpha, beta)?;
    Ok(AsymptoticsReport {
        alpha,
        beta,
        log_ep1,
        main_term,
        envelope,
        upper_bound_log,
        ratio: (log_ep1 - main_term).abs() / envelope,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct MonotonicityCell {
    pub beta: f64,
    pub k: u32,
    pub lambda0: f64,
    /// `lambda0(beta, k) - lambda0(beta, k-1)`, present for k >= 2.
    pub margin_in_k: Option<f64>,
    /// `lambda0(beta+1, k)^{2k} - lambda0(beta, k)^{2k}`.
    pub margin_in_shift: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct MonotonicityReport {
    pub cells: Vec<MonotonicityCell>,
}

/// Verifies, on the integer-gap lattice, that `lambda0(beta, k)` is
/// nondecreasing in k and that `lambda0(beta, k)^{2k}` strictly
/// increases under `beta -> beta + 1`; reports the margins.
pub fn monotonicity_suite(beta_grid: &[f64], k_max: u32) -> Result<MonotonicityReport> {
    let mut cells = Vec::new();
    for &beta in beta_grid {
        let mut prev_lambda0: Option<f64> = None;
        for k in 1..=k_max {
            let l0 = ep1_constant(beta, k, 1.0)?.powf(0.5 / k as f64);
            let l0_shift = ep1_constant(beta + 1.0, k, 1.0)?.powf(0.5 / k as f64);
            let margin_in_k = prev_lambda0.map(|p| l0 - p);
            if let Some(m) = margin_in_k {
                if m < -1e-10 * l0 {
                    return Err(Error::PropertyViolation(format!(
                        "lambda0({beta}, {k}) = {l0} < lambda0({beta}, {})",
                        k - 1
                    )));
                }
            }
            let margin_in_shift = l0_shift.powi(2 * k as i32) - l0.powi(2 * k as i32);
            if margin_in_shift <= 0.0 {
                return Err(Error::PropertyViolation(format!(
                    "EP1({}, {beta}) did not increase under the unit shift at k = {k}",
                    beta + k as f64
                )));
            }
            cells.push(MonotonicityCell { beta, k, lambda0: l0, margin_in_k, margin_in_shift });
            prev_lambda0 = Some(l0);
        }
    }
    Ok(MonotonicityReport { cells })
}
