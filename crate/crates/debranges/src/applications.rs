//! Translations of the sharp constant into its applications: higher
//! order Poincare inequalities on an interval, the Laplacian/gradient
//! variant on a ball (through the dimension-shift identity), and the
//! radial non-increasing delta-majorant constant.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sharpsolve::ep1_constant;
use crate::specialfn::log_gamma;

/// Query for the interval/ball Poincare constants.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct PoincareQuery {
    /// Order of the dominating derivative.
    pub m: u32,
    /// Order of the dominated derivative.
    pub n: u32,
    /// Interval half-length or ball radius.
    pub r: f64,
    /// Laplacian-form parameters `(d, m1, n1)`; `None` selects the
    /// one-dimensional interval inequality.
    pub dimension_flags: Option<LaplacianFlags>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct LaplacianFlags {
    pub d: u32,
    pub m1: u32,
    pub n1: u32,
}

fn check_radius(r: f64) -> Result<()> {
    if r > 0.0 && r.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("radius {r} must be positive")))
    }
}

/// Sharp constant of
/// `int |g^(n)|^2 <= C int |g^(m)|^2` over `W^{m,2}_0(-r, r)`:
/// `C = r^{2(m-n)} / (EP1)(m - 1/2, n - 1/2; 1; 1)`.
pub fn poincare_constant(q: &PoincareQuery) -> Result<f64> {
    check_radius(q.r)?;
    if q.m < q.n {
        return Err(Error::Domain(format!("need m >= n, got m = {}, n = {}", q.m, q.n)));
    }
    if q.m == q.n {
        return Ok(1.0);
    }
    let k = q.m - q.n;
    let beta = q.n as f64 - 0.5;
    let ep1 = ep1_constant(beta, k, 1.0)?;
    Ok(q.r.powi(2 * k as i32) / ep1)
}

/// Sharp constant of
/// `int |grad^{n1} (Lap^n g)|^2 <= C int |grad^{m1} (Lap^m g)|^2`
/// over `W^{2m+m1,2}_0(B_r)`:
/// `C = r^{2(2m+m1-2n-n1)} / (EP1)(2m+m1-1+d/2, 2n+n1-1+d/2; 1; 1)`,
/// valid in dimension d through the dimension-shift identity.
pub fn laplacian_poincare_constant(q: &PoincareQuery) -> Result<f64> {
    check_radius(q.r)?;
    let flags = q
        .dimension_flags
        .ok_or_else(|| Error::Domain("laplacian form needs dimension_flags (d, m1, n1)".into()))?;
    if flags.d < 2 {
        return Err(Error::Domain(format!("dimension d = {} must be >= 2", flags.d)));
    }
    if flags.m1 > 1 || flags.n1 > 1 {
        return Err(Error::Domain("m1 and n1 must lie in {0, 1}".into()));
    }
    let high = 2 * q.m + flags.m1;
    let low = 2 * q.n + flags.n1;
    if high < low {
        return Err(Error::Domain(format!("need 2m + m1 >= 2n + n1, got {high} < {low}")));
    }
    if high == low {
        return Ok(1.0);
    }
    let k = high - low;
    let gap = k as f64;
    if gap.fract() != 0.0 || gap < 1.0 {
        return Err(Error::NonIntegerGap { gap });
    }
    let beta = low as f64 - 1.0 + flags.d as f64 / 2.0;
    let ep1 = ep1_constant(beta, k, 1.0)?;
    Ok(q.r.powi(2 * k as i32) / ep1)
}

/// `(EP2)(d; delta) = (omega_{d-1}/d) (EP1)(d/2, 0; 1; delta)` with
/// `omega_{d-1} = 2 pi^{d/2} / Gamma(d/2)`: minimal integral of a radial
/// non-increasing entire majorant of the delta at the origin. Known
/// exactly only for even d.
pub fn ep2_constant(d: u32, delta: f64) -> Result<f64> {
    if d == 0 {
        return Err(Error::Domain("dimension must be >= 1".into()));
    }
    if !d.is_multiple_of(2) {
        return Err(Error::OddDimension { d });
    }
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::Domain(format!("delta {delta} must be positive")));
    }
    let k = d / 2;
    let df = d as f64;
    let surface_over_d =
        (2.0_f64.ln() + 0.5 * df * std::f64::consts::PI.ln() - log_gamma(0.5 * df)? - df.ln()).exp();
    Ok(surface_over_d * ep1_constant(0.0, k, delta)?)
}
