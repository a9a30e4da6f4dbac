//! Companion functions `A_nu`, `B_nu`, `C_nu = B/A` of the homogeneous
//! spaces, their positive zeros, the diagonal reproducing kernel, and
//! log-gamma.
//!
//! `A_nu` and `B_nu` are normalized Bessel functions,
//! `A_nu(z) = Gamma(nu+1) (z/2)^{-nu} J_nu(z)` and likewise `B_nu` with
//! `J_{nu+1}`; both are entire, `A` even, `B` odd, with only real simple
//! zeros. Power series on a disc, Hankel-type asymptotics on the real
//! axis beyond the cutoff.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use num_complex::Complex64;

use crate::dd::{CDd, Dd};
use crate::error::{Error, Result};

/// Argument type accepted by the evaluators.
pub type ComplexPoint = Complex64;

/// The order parameter `nu > -1` of a homogeneous space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpaceOrder {
    nu: f64,
}

impl SpaceOrder {
    pub fn new(nu: f64) -> Result<SpaceOrder> {
        if !nu.is_finite() || nu <= -1.0 {
            return Err(Error::Domain(format!("space order nu = {nu} must be finite and > -1")));
        }
        Ok(SpaceOrder { nu })
    }

    #[inline]
    pub fn nu(&self) -> f64 {
        self.nu
    }
}

/// Evaluation controls for the series/asymptotic switch.
#[derive(Debug, Clone, Copy)]
pub struct EvalConfig {
    /// Real arguments beyond this radius go through the asymptotic path.
    pub series_cutoff_radius: f64,
    pub series_max_terms: usize,
    pub target_rel_error: f64,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            series_cutoff_radius: 24.0,
            series_max_terms: 400,
            target_rel_error: 1e-13,
        }
    }
}

impl EvalConfig {
    pub fn new(series_cutoff_radius: f64, series_max_terms: usize, target_rel_error: f64) -> Result<Self> {
        let mut problems = Vec::new();
        if !(series_cutoff_radius > 0.0) {
            problems.push(format!("series_cutoff_radius = {series_cutoff_radius} must be > 0"));
        }
        if series_max_terms < 20 {
            problems.push(format!("series_max_terms = {series_max_terms} must be >= 20"));
        }
        if !(target_rel_error > 0.0 && target_rel_error < 1e-6) {
            problems.push(format!("target_rel_error = {target_rel_error} must lie in (0, 1e-6)"));
        }
        if problems.is_empty() {
            Ok(EvalConfig { series_cutoff_radius, series_max_terms, target_rel_error })
        } else {
            Err(Error::Validation(problems))
        }
    }
}

/// Relative guard below which `C = B/A` refuses to divide.
pub const POLE_GUARD: f64 = 1e-12;

fn check_finite(z: Complex64) -> Result<()> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("non-finite argument {z}")))
    }
}

/// Power series for `A_nu` in double-double arithmetic.
///
/// Terms follow `t_0 = 1`, `t_n = t_{n-1} * (-(z/2)^2) / (n (nu + n))`.
fn series_a(nu: f64, z: Complex64, cfg: &EvalConfig) -> Result<Complex64> {
    let half_re = z.re * 0.5;
    let half_im = z.im * 0.5;
    // w = -(z/2)^2, components exact in Dd
    let w = CDd::new(
        Dd::from_prod(half_im, half_im).sub(Dd::from_prod(half_re, half_re)),
        Dd::from_prod(half_re, half_im).mul_f64(-2.0),
    );
    let mut term = CDd::from_f64(1.0, 0.0);
    let mut sum = term;
    let mut prev_abs = f64::INFINITY;
    for n in 1..=cfg.series_max_terms {
        let nf = n as f64;
        let denom = Dd::from_sum(nu, nf).mul_f64(nf);
        term = term.mul(w).mul_dd(denom.recip());
        sum = sum.add(term);
        let t_abs = term.abs_approx();
        if t_abs <= prev_abs && t_abs < 0.1 * cfg.target_rel_error * sum.abs_approx() {
            return Ok(Complex64::new(sum.re.to_f64(), sum.im.to_f64()));
        }
        prev_abs = t_abs;
    }
    Err(Error::NonConvergence { terms: cfg.series_max_terms, abs_z: z.norm() })
}

/// Power series for `B_nu`: `t_0 = (z/2)/(nu+1)`,
/// `t_n = t_{n-1} * (-(z/2)^2) / (n (nu + n + 1))`.
fn series_b(nu: f64, z: Complex64, cfg: &EvalConfig) -> Result<Complex64> {
    let half_re = z.re * 0.5;
    let half_im = z.im * 0.5;
    let w = CDd::new(
        Dd::from_prod(half_im, half_im).sub(Dd::from_prod(half_re, half_re)),
        Dd::from_prod(half_re, half_im).mul_f64(-2.0),
    );
    let nu1 = Dd::from_sum(nu, 1.0);
    let mut term = CDd::from_f64(half_re, half_im).mul_dd(nu1.recip());
    let mut sum = term;
    let mut prev_abs = f64::INFINITY;
    for n in 1..=cfg.series_max_terms {
        let nf = n as f64;
        let denom = Dd::from_sum(nu, nf + 1.0).mul_f64(nf);
        term = term.mul(w).mul_dd(denom.recip());
        sum = sum.add(term);
        let t_abs = term.abs_approx();
        if t_abs <= prev_abs && t_abs < 0.1 * cfg.target_rel_error * (sum.abs_approx() + 1e-300) {
            return Ok(Complex64::new(sum.re.to_f64(), sum.im.to_f64()));
        }
        prev_abs = t_abs;
    }
    Err(Error::NonConvergence { terms: cfg.series_max_terms, abs_z: z.norm() })
}

/// Number of Hankel-expansion coefficients per trigonometric factor.
const ASYMP_TERMS: usize = 8;

/// `A_nu(x)` and `B_nu(x)` for real `x` beyond the series cutoff, through
/// the Hankel asymptotics of `J_nu` and `J_{nu+1}` and the normalization
/// `Gamma(nu+1) (x/2)^{-nu}`.
fn asymptotic_ab(nu: f64, x: f64) -> (f64, f64) {
    debug_assert!(x > 0.0);
    let scale = (log_gamma_unchecked(nu + 1.0) - nu * (0.5 * x).ln()).exp();
    let amp = (2.0 / (std::f64::consts::PI * x)).sqrt();
    let bracket = |order: f64| -> f64 {
        let mu = 4.0 * order * order;
        let mut a = [0.0_f64; ASYMP_TERMS];
        a[0] = 1.0;
        for j in 1..ASYMP_TERMS {
            let odd = (2 * j - 1) as f64;
            a[j] = a[j - 1] * (mu - odd * odd) / (8.0 * j as f64);
        }
        let x2 = x * x;
        // P = a0 - a2/x^2 + a4/x^4 - a6/x^6 ; Q = a1/x - a3/x^3 + a5/x^5 - a7/x^7
        let p = a[0] - a[2] / x2 + a[4] / (x2 * x2) - a[6] / (x2 * x2 * x2);
        let q = (a[1] - a[3] / x2 + a[5] / (x2 * x2) - a[7] / (x2 * x2 * x2)) / x;
        let chi = x - (0.5 * order + 0.25) * std::f64::consts::PI;
        p * chi.cos() - q * chi.sin()
    };
    let a_val = scale * amp * bracket(nu);
    let b_val = scale * amp * bracket(nu + 1.0);
    (a_val, b_val)
}

/// `A_nu(z)`, even and real entire; relative error at the configured
/// target for |z| up to ~60 (series on the disc, asymptotics on the real
/// axis past the cutoff).
pub fn eval_a(nu: SpaceOrder, z: ComplexPoint, cfg: &EvalConfig) -> Result<Complex64> {
    check_finite(z)?;
    if z.im == 0.0 && z.re.abs() > cfg.series_cutoff_radius {
        let (a, _) = asymptotic_ab(nu.nu(), z.re.abs());
        return Ok(Complex64::new(a, 0.0));
    }
    series_a(nu.nu(), z, cfg)
}

/// `B_nu(z)`, odd and real entire, `B'(0) = 1/(2 nu + 2)`.
pub fn eval_b(nu: SpaceOrder, z: ComplexPoint, cfg: &EvalConfig) -> Result<Complex64> {
    check_finite(z)?;
    if z.im == 0.0 && z.re.abs() > cfg.series_cutoff_radius {
        let (_, b) = asymptotic_ab(nu.nu(), z.re.abs());
        let b = if z.re < 0.0 { -b } else { b };
        return Ok(Complex64::new(b, 0.0));
    }
    series_b(nu.nu(), z, cfg)
}

/// `C_nu(z) = B_nu(z)/A_nu(z)`; `tan z` when `nu = -1/2`.
pub fn eval_c(nu: SpaceOrder, z: ComplexPoint, cfg: &EvalConfig) -> Result<Complex64> {
    let a = eval_a(nu, z, cfg)?;
    let b = eval_b(nu, z, cfg)?;
    if a.norm() < POLE_GUARD * b.norm() {
        return Err(Error::PoleProximity { abs_a: a.norm(), abs_b: b.norm(), guard: POLE_GUARD });
    }
    Ok(b / a)
}

/// Real-axis convenience for `A_nu`.
pub fn eval_a_real(nu: SpaceOrder, x: f64, cfg: &EvalConfig) -> Result<f64> {
    Ok(eval_a(nu, Complex64::new(x, 0.0), cfg)?.re)
}

/// Real-axis convenience for `B_nu`.
pub fn eval_b_real(nu: SpaceOrder, x: f64, cfg: &EvalConfig) -> Result<f64> {
    Ok(eval_b(nu, Complex64::new(x, 0.0), cfg)?.re)
}

/// Diagonal reproducing kernel
/// `K_nu(x,x) = [A^2 + B^2 - (2 nu + 1) A B / x] / pi`,
/// with the derivative eliminated through `A' = -B`,
/// `B' = A - (2 nu + 1) B / z`; at `x = 0` the limit `1/(pi (2 nu + 2))`.
pub fn kernel_diag(nu: SpaceOrder, x: f64, cfg: &EvalConfig) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::Domain(format!("non-finite argument {x}")));
    }
    if x == 0.0 {
        return Ok(1.0 / (std::f64::consts::PI * (2.0 * nu.nu() + 2.0)));
    }
    let a = eval_a_real(nu, x, cfg)?;
    let b = eval_b_real(nu, x, cfg)?;
    Ok((a * a + b * b - (2.0 * nu.nu() + 1.0) * a * b / x) / std::f64::consts::PI)
}

/// Lanczos approximation (g = 7, 9 coefficients), valid to ~1e-14
/// relative over the supported range.
const LANCZOS_G: f64 = 7.0;
#[allow(clippy::excessive_precision)]
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

fn log_gamma_unchecked(x: f64) -> f64 {
    if x < 0.5 {
        // shift out of the small-argument region
        return log_gamma_unchecked(x + 1.0) - x.ln();
    }
    let xg = x - 1.0;
    let mut s = LANCZOS_COEF[0];
    for (i, c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        s += c / (xg + i as f64);
    }
    let t = xg + LANCZOS_G + 0.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (xg + 0.5) * t.ln() - t + s.ln()
}

/// `log Gamma(x)` for `x > 0`.
pub fn log_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::Domain(format!("log_gamma requires x > 0, got {x}")));
    }
    Ok(log_gamma_unchecked(x))
}

// ---------------------------------------------------------------------------
// Positive zeros of A_nu (equivalently of J_nu)
// ---------------------------------------------------------------------------

static ZERO_MEMO: OnceLock<Mutex<HashMap<u64, Vec<f64>>>> = OnceLock::new();

fn zero_memo() -> &'static Mutex<HashMap<u64, Vec<f64>>> {
    ZERO_MEMO.get_or_init(|| Mutex::new(HashMap::new()))
}

/// McMahon-type initial guess for the n-th zero.
fn mcmahon_guess(nu: f64, n: usize) -> f64 {
    let b = (n as f64 + 0.5 * nu - 0.25) * std::f64::consts::PI;
    let mu = 4.0 * nu * nu;
    if b > 1.0 {
        b - (mu - 1.0) / (8.0 * b)
    } else {
        b.max(0.05)
    }
}

fn sign_scan_bisect(
    nu: SpaceOrder,
    cfg: &EvalConfig,
    lo: f64,
    hi: f64,
    steps: usize,
) -> Result<f64> {
    let h = (hi - lo) / steps as f64;
    let mut x0 = lo;
    let mut f0 = eval_a_real(nu, x0, cfg)?;
    for i in 1..=steps {
        let x1 = lo + i as f64 * h;
        let f1 = eval_a_real(nu, x1, cfg)?;
        if f0 == 0.0 {
            return Ok(x0);
        }
        if f0.signum() != f1.signum() {
            let (mut a, mut b, mut fa) = (x0, x1, f0);
            for _ in 0..200 {
                let m = 0.5 * (a + b);
                if m <= a || m >= b {
                    break;
                }
                let fm = eval_a_real(nu, m, cfg)?;
                if fm.signum() == fa.signum() {
                    a = m;
                    fa = fm;
                } else {
                    b = m;
                }
            }
            return Ok(0.5 * (a + b));
        }
        x0 = x1;
        f0 = f1;
    }
    Err(Error::ConvergenceFailure(format!(
        "no sign change of A_nu on [{lo}, {hi}] (nu = {})",
        nu.nu()
    )))
}

/// Newton refinement of the n-th zero inside a guard bracket; falls back
/// to a sign scan plus bisection if Newton leaves the bracket.
fn refine_zero(nu: SpaceOrder, cfg: &EvalConfig, n: usize, prev: Option<f64>) -> Result<f64> {
    let guess = mcmahon_guess(nu.nu(), n);
    let (lo, hi) = match prev {
        Some(p) => (p + 1e-9 * (1.0 + p), p + 2.0 * std::f64::consts::PI),
        None => (1e-8, (nu.nu().max(0.0) * 0.5 + 1.0) * std::f64::consts::PI + 4.0),
    };
    let mut x = guess.clamp(lo, hi);
    let mut ok = false;
    for _ in 0..100 {
        let fa = eval_a_real(nu, x, cfg)?;
        let dfa = -eval_b_real(nu, x, cfg)?;
        if dfa == 0.0 {
            break;
        }
        let dx = fa / dfa;
        let xn = x - dx;
        if !xn.is_finite() || xn <= lo || xn >= hi {
            break;
        }
        x = xn;
        if dx.abs() < 1e-15 * x.abs() + 1e-15 {
            ok = true;
            break;
        }
    }
    let candidate = if ok { x } else { sign_scan_bisect(nu, cfg, lo, hi, 256)? };
    // guard against Newton landing on a neighbouring zero: A keeps the
    // sign (-1)^{n-1} on (xi_{n-1}, xi_n)
    let left = prev.unwrap_or(0.0);
    let probe = left + 0.5 * (candidate - left);
    let expected = if (n - 1).is_multiple_of(2) { 1.0 } else { -1.0 };
    let probe_val = eval_a_real(nu, probe, cfg)?;
    if probe_val.signum() != expected || candidate <= left {
        return sign_scan_bisect(nu, cfg, lo, hi, 1024);
    }
    Ok(candidate)
}

/// The n-th positive zero `xi_n` of `A_nu` (1-based), memoized per order.
pub fn bessel_zero(nu: SpaceOrder, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain("zero index n must be >= 1".into()));
    }
    let cfg = EvalConfig::default();
    let mut memo = zero_memo().lock().unwrap();
    let table = memo.entry(nu.nu().to_bits()).or_default();
    while table.len() < n {
        let prev = table.last().copied();
        let idx = table.len() + 1;
        let z = refine_zero(nu, &cfg, idx, prev)?;
        table.push(z);
    }
    Ok(table[n - 1])
}

/// Seed the per-order zero table from externally persisted values.
///
/// Entries are validated (`|A(xi)|` must be at residual level) and must
/// extend the table contiguously from index 1; anything else is ignored,
/// the cache being advisory.
pub fn seed_zero_cache(nu: f64, zeros: &[f64]) {
    let order = match SpaceOrder::new(nu) {
        Ok(o) => o,
        Err(_) => return,
    };
    let cfg = EvalConfig::default();
    let mut validated: Vec<f64> = Vec::with_capacity(zeros.len());
    let mut prev = 0.0;
    for &z in zeros {
        if !(z.is_finite() && z > prev) {
            break;
        }
        let a = match eval_a_real(order, z, &cfg) {
            Ok(v) => v,
            Err(_) => break,
        };
        let b = match eval_b_real(order, z, &cfg) {
            Ok(v) => v,
            Err(_) => break,
        };
        // simple-zero residual: |A| << |A'| * spacing
        if a.abs() > 1e-8 * b.abs().max(1e-300) {
            break;
        }
        validated.push(z);
        prev = z;
    }
    if validated.is_empty() {
        return;
    }
    let mut memo = zero_memo().lock().unwrap();
    let table = memo.entry(nu.to_bits()).or_default();
    if table.len() < validated.len() {
        *table = validated;
    }
}

/// Snapshot of the in-process zero tables, for persistence.
pub fn zero_cache_snapshot() -> Vec<(f64, Vec<f64>)> {
    let memo = zero_memo().lock().unwrap();
    memo.iter().map(|(bits, v)| (f64::from_bits(*bits), v.clone())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn cfg() -> EvalConfig {
        EvalConfig::default()
    }

    fn nu(v: f64) -> SpaceOrder {
        SpaceOrder::new(v).unwrap()
    }

    /// Independent series for J_order used as an oracle; gamma values by
    /// recurrence from closed forms, no shared code with the evaluators.
    fn j_series_oracle(order: f64, x: f64) -> f64 {
        // Gamma(order + 1) by recurrence from Gamma on (1, 2]
        let gamma_base = |mut t: f64| -> f64 {
            // only called with t = order + 1 or fractional offsets where
            // order is a multiple of 1/2 in the tests
            let mut acc = 1.0;
            while t > 2.0 {
                t -= 1.0;
                acc *= t;
            }
            let g = if (t - 1.5).abs() < 1e-14 {
                0.5 * PI.sqrt()
            } else if (t - 1.0).abs() < 1e-14 || (t - 2.0).abs() < 1e-14 {
                1.0
            } else {
                panic!("oracle gamma only supports half-integers");
            };
            acc * g
        };
        let mut term = (0.5 * x).powf(order) / gamma_base(order + 1.0);
        let mut sum = term;
        for n in 1..200 {
            let nf = n as f64;
            term *= -(0.25 * x * x) / (nf * (nf + order));
            sum += term;
            if term.abs() < 1e-18 * sum.abs() {
                break;
            }
        }
        sum
    }

    #[test]
    fn a_reduces_to_cos_at_minus_half() {
        let v = eval_a(nu(-0.5), Complex64::new(1.0, 0.0), &cfg()).unwrap();
        assert!((v.re - 1.0_f64.cos()).abs() < 1e-15, "got {}", v.re);
        assert_eq!(v.im, 0.0);
    }

    #[test]
    fn a_at_zero_is_one() {
        let v = eval_a(nu(0.0), Complex64::new(0.0, 0.0), &cfg()).unwrap();
        assert_eq!(v.re, 1.0);
    }

    #[test]
    fn a_vanishes_at_first_j0_zero() {
        // location derived by bisection on the power series itself
        let z0 = 2.404825557695773;
        let v = eval_a(nu(0.0), Complex64::new(z0, 0.0), &cfg()).unwrap();
        assert!(v.re.abs() < 1e-12, "A_0(j_01) = {}", v.re);
    }

    #[test]
    fn b_reduces_to_sin_at_minus_half() {
        let v = eval_b(nu(-0.5), Complex64::new(1.0, 0.0), &cfg()).unwrap();
        assert!((v.re - 1.0_f64.sin()).abs() < 1e-15);
    }

    #[test]
    fn b_at_zero_vanishes_with_unit_slope_ratio() {
        let v = eval_b(nu(0.0), Complex64::new(0.0, 0.0), &cfg()).unwrap();
        assert_eq!(v.re, 0.0);
        // B'(0) = 1/(2 nu + 2) via a small step
        for order in [-0.5, 0.0, 1.5] {
            let h = 1e-6;
            let d = eval_b_real(nu(order), h, &cfg()).unwrap() / h;
            assert!((d - 1.0 / (2.0 * order + 2.0)).abs() < 1e-9, "order {order}: {d}");
        }
    }

    #[test]
    fn b_matches_independent_j_series() {
        // B_{1/2}(pi) = Gamma(3/2) (pi/2)^{-1/2} J_{3/2}(pi)
        let oracle = 0.5 * PI.sqrt() * (0.5 * PI).powf(-0.5) * j_series_oracle(1.5, PI);
        let v = eval_b_real(nu(0.5), PI, &cfg()).unwrap();
        assert!((v - oracle).abs() < 1e-14, "{v} vs {oracle}");
        // which is exactly 1/pi
        assert!((v - 1.0 / PI).abs() < 1e-14);
    }

    #[test]
    fn c_is_tangent_at_minus_half() {
        let v = eval_c(nu(-0.5), Complex64::new(0.7, 0.0), &cfg()).unwrap();
        assert!((v.re - 0.7_f64.tan()).abs() < 1e-14);
    }

    #[test]
    fn c_at_zero_vanishes() {
        let v = eval_c(nu(0.0), Complex64::new(0.0, 0.0), &cfg()).unwrap();
        assert_eq!(v, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn c_on_imaginary_axis_is_imaginary_positive() {
        let v = eval_c(nu(0.0), Complex64::new(0.0, 1.0), &cfg()).unwrap();
        assert!(v.re.abs() < 1e-15);
        assert!(v.im > 0.0);
    }

    #[test]
    fn c_errors_near_pole() {
        let z0 = bessel_zero(nu(0.0), 1).unwrap();
        let err = eval_c(nu(0.0), Complex64::new(z0, 0.0), &cfg());
        assert!(matches!(err, Err(Error::PoleProximity { .. })));
    }

    #[test]
    fn series_reports_non_convergence() {
        let tight = EvalConfig::new(24.0, 20, 1e-13).unwrap();
        let err = series_a(0.0, Complex64::new(20.0, 0.0), &tight);
        assert!(matches!(err, Err(Error::NonConvergence { .. })));
    }

    #[test]
    fn zeros_of_cos_and_sinc() {
        let z = bessel_zero(nu(-0.5), 3).unwrap();
        assert!((z - 2.5 * PI).abs() < 1e-12);
        let z = bessel_zero(nu(0.5), 1).unwrap();
        assert!((z - PI).abs() < 1e-12);
    }

    #[test]
    fn first_j0_zero_matches_series_bisection() {
        // oracle: plain bisection on the power series
        let c = cfg();
        let f = |x: f64| eval_a_real(nu(0.0), x, &c).unwrap();
        let (mut a, mut b) = (2.0, 3.0);
        assert!(f(a) > 0.0 && f(b) < 0.0);
        for _ in 0..80 {
            let m = 0.5 * (a + b);
            if f(m) > 0.0 {
                a = m;
            } else {
                b = m;
            }
        }
        let oracle = 0.5 * (a + b);
        let z = bessel_zero(nu(0.0), 1).unwrap();
        assert!((z - oracle).abs() < 1e-12);
        assert!((z - 2.404825557695773).abs() < 1e-12);
    }

    #[test]
    fn zeros_increase_and_are_simple() {
        for order in [-0.9, -0.5, 0.0, 1.0, 2.5, 5.0] {
            let o = nu(order);
            let mut prev = 0.0;
            for n in 1..=30 {
                let z = bessel_zero(o, n).unwrap();
                assert!(z > prev, "nu={order} n={n}");
                let b = eval_b_real(o, z, &cfg()).unwrap();
                assert!(b.abs() > 0.0, "zero not simple at nu={order} n={n}");
                prev = z;
            }
        }
    }

    #[test]
    fn ode_residuals_on_grid() {
        let c = cfg();
        let h = 1e-5;
        for order in [-0.9, -0.5, 0.0, 1.0, 2.5] {
            let o = nu(order);
            let mut x = 0.1;
            while x <= 20.0 {
                let ap = (eval_a_real(o, x + h, &c).unwrap() - eval_a_real(o, x - h, &c).unwrap()) / (2.0 * h);
                let b = eval_b_real(o, x, &c).unwrap();
                assert!((ap + b).abs() < 1e-6, "A' = -B fails at nu={order}, x={x}: {}", (ap + b).abs());
                let bp = (eval_b_real(o, x + h, &c).unwrap() - eval_b_real(o, x - h, &c).unwrap()) / (2.0 * h);
                let a = eval_a_real(o, x, &c).unwrap();
                let rhs = a - (2.0 * order + 1.0) / x * b;
                assert!((bp - rhs).abs() < 1e-6, "B' fails at nu={order}, x={x}");
                x += 0.83;
            }
        }
    }

    #[test]
    fn reduction_to_cos_sin_on_complex_grid() {
        let c = cfg();
        let o = nu(-0.5);
        for &re in &[0.0, 0.5, 3.0, 11.0, 19.5] {
            for &im in &[0.0, 0.5, 2.5, 5.0] {
                let z = Complex64::new(re, im);
                let a = eval_a(o, z, &c).unwrap();
                let b = eval_b(o, z, &c).unwrap();
                assert!((a - z.cos()).norm() < 1e-12 * z.cos().norm().max(1.0), "cos at {z}");
                assert!((b - z.sin()).norm() < 1e-12 * z.sin().norm().max(1.0), "sin at {z}");
            }
        }
    }

    #[test]
    fn bessel_bounds_lemma() {
        let c = cfg();
        for order in [-0.9, -0.5, 0.0, 1.0, 2.5, 5.0] {
            let o = nu(order);
            let xa = 2.0 * (order + 1.0_f64).sqrt();
            for i in 0..=50 {
                let x = xa * i as f64 / 50.0;
                let a = eval_a_real(o, x, &c).unwrap();
                let lo = 1.0 - x * x / (4.0 * (order + 1.0));
                assert!(a >= lo - 1e-12 && a <= 1.0 + 1e-12, "A bound nu={order} x={x}");
            }
            let xb = 2.0 * (order + 2.0_f64).sqrt();
            for i in 0..=50 {
                let x = xb * i as f64 / 50.0;
                let b = eval_b_real(o, x, &c).unwrap();
                assert!(b <= x / (2.0 * (order + 1.0)) + 1e-12, "B bound nu={order} x={x}");
            }
        }
    }

    #[test]
    fn kernel_diag_values_and_positivity() {
        let c = cfg();
        for order in [-0.7, -0.5, 0.0, 1.0] {
            let k0 = kernel_diag(nu(order), 0.0, &c).unwrap();
            assert!((k0 - 1.0 / (PI * (2.0 * order + 2.0))).abs() < 1e-15);
        }
        let k = kernel_diag(nu(-0.5), 1.0, &c).unwrap();
        assert!((k - 1.0 / PI).abs() < 1e-14);
        // upper bound of the kernel lemma for -1 < nu <= 0
        let o = nu(-0.3);
        let k = kernel_diag(o, 0.5, &c).unwrap();
        let bound = (1.0 / (2.0 * 0.7) + 0.25 / (4.0 * 0.49)) / PI;
        assert!(k <= bound);
        assert!((k - 0.22269661811351302).abs() < 1e-10);
        // positivity across a sample grid
        for order in [-0.9, -0.5, 0.0, 1.0, 2.5] {
            let o = nu(order);
            let mut x = 0.0;
            while x <= 30.0 {
                assert!(kernel_diag(o, x, &c).unwrap() > 0.0, "K > 0 fails nu={order} x={x}");
                x += 0.37;
            }
        }
    }

    #[test]
    fn evaluation_paths_agree_at_cutoff() {
        let c = cfg();
        let x = c.series_cutoff_radius;
        for order in [-0.9, -0.5, 0.0, 1.0, 2.5] {
            let series = series_a(order, Complex64::new(x, 0.0), &c).unwrap().re;
            let (asym, _) = asymptotic_ab(order, x);
            assert!(
                (series - asym).abs() <= 1e-9 * series.abs().max(1e-3),
                "A paths disagree nu={order}: {series} vs {asym}"
            );
            let series_b_v = series_b(order, Complex64::new(x, 0.0), &c).unwrap().re;
            let (_, asym_b) = asymptotic_ab(order, x);
            assert!(
                (series_b_v - asym_b).abs() <= 1e-9 * series_b_v.abs().max(1e-3),
                "B paths disagree nu={order}"
            );
        }
    }

    #[test]
    fn log_gamma_values() {
        assert!(log_gamma(1.0).unwrap().abs() < 1e-13);
        assert!((log_gamma(0.5).unwrap() - PI.sqrt().ln()).abs() < 1e-13);
        assert!((log_gamma(10.0).unwrap() - 362880.0_f64.ln()).abs() < 1e-12);
        assert!(matches!(log_gamma(0.0), Err(Error::Domain(_))));
        assert!(matches!(log_gamma(-3.0), Err(Error::Domain(_))));
    }

    #[test]
    fn space_order_rejects_bad_nu() {
        assert!(SpaceOrder::new(-1.0).is_err());
        assert!(SpaceOrder::new(f64::NAN).is_err());
        assert!(SpaceOrder::new(-0.999).is_ok());
    }

    #[test]
    fn parity_holds_on_the_asymptotic_branch() {
        // |x| beyond the cutoff goes through the Hankel path; A stays
        // even and B odd there too
        let c = cfg();
        for order in [-0.5, 0.0, 1.0, 2.5] {
            let o = nu(order);
            for &x in &[25.0, 40.0, 300.0] {
                let ap = eval_a(o, Complex64::new(x, 0.0), &c).unwrap();
                let am = eval_a(o, Complex64::new(-x, 0.0), &c).unwrap();
                assert_eq!(ap, am, "A even at nu={order}, x={x}");
                let bp = eval_b(o, Complex64::new(x, 0.0), &c).unwrap();
                let bm = eval_b(o, Complex64::new(-x, 0.0), &c).unwrap();
                assert_eq!(bp, -bm, "B odd at nu={order}, x={x}");
                assert_eq!(ap.im, 0.0);
            }
        }
        // and at nu = -1/2 the branch is exactly cos/sin
        let o = nu(-0.5);
        for &x in &[26.0_f64, 150.0] {
            let a = eval_a(o, Complex64::new(-x, 0.0), &c).unwrap().re;
            assert!((a - x.cos()).abs() < 1e-12, "x={x}");
            let b = eval_b(o, Complex64::new(-x, 0.0), &c).unwrap().re;
            assert!((b + x.sin()).abs() < 1e-12, "x={x}");
        }
    }

    #[test]
    fn eval_config_validation() {
        assert!(EvalConfig::new(24.0, 400, 1e-13).is_ok());
        assert!(matches!(EvalConfig::new(0.0, 400, 1e-13), Err(Error::Validation(_))));
        assert!(matches!(EvalConfig::new(24.0, 10, 1e-13), Err(Error::Validation(_))));
        assert!(matches!(EvalConfig::new(24.0, 400, 1e-3), Err(Error::Validation(_))));
        // all violations reported at once
        match EvalConfig::new(-1.0, 5, 0.5) {
            Err(Error::Validation(msgs)) => assert_eq!(msgs.len(), 3),
            other => panic!("expected validation error, got {other:?}"),
        }
    }

    #[test]
    fn zero_memo_is_consistent_under_concurrent_access() {
        // several threads hammer overlapping (nu, n) ranges; every
        // answer must match a single-threaded reference
        let orders = [-0.6, 0.4, 1.7];
        let reference: Vec<Vec<f64>> = orders
            .iter()
            .map(|&b| {
                let o = nu(b);
                (1..=40).map(|n| bessel_zero(o, n).unwrap()).collect()
            })
            .collect();
        std::thread::scope(|scope| {
            for t in 0..4 {
                let reference = &reference;
                scope.spawn(move || {
                    for (oi, &b) in orders.iter().enumerate() {
                        let o = nu(b);
                        for n in (1 + t % 3..=40).rev() {
                            let z = bessel_zero(o, n).unwrap();
                            assert_eq!(z, reference[oi][n - 1], "nu={b} n={n}");
                        }
                    }
                });
            }
        });
    }
}
