//! The space abstraction consumed by the solver: evaluation of the
//! companion functions `A`, `B`, `C = B/A` at complex points, the positive
//! zeros `xi_n` of `A`, and the weights `c_n = -A'(xi_n)/B(xi_n)`.
//!
//! The homogeneous space of order `beta` is the primary concrete
//! instance (`xi_n = j_{beta,n}`, all weights 1); a tabulated instance
//! wraps user-supplied spectra after validating the structural
//! conditions on sample grids.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specialfn::{self, EvalConfig, SpaceOrder, POLE_GUARD};

/// How the spectrum behaves beyond any finite truncation, used by tail
/// corrections of spectral sums.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TailProfile {
    /// Infinitely many zeros, asymptotically uniformly spaced, weights
    /// approaching a limit (Bessel-like).
    Asymptotic { spacing: f64, weight: f64 },
    /// Finitely many zeros; spectral sums terminate.
    Finite,
}

/// What the solver needs from a de Branges space.
pub trait Space: Send + Sync {
    fn eval_a(&self, z: Complex64) -> Result<Complex64>;
    fn eval_b(&self, z: Complex64) -> Result<Complex64>;

    /// `C(z) = B(z)/A(z)` with a pole guard.
    fn eval_c(&self, z: Complex64) -> Result<Complex64> {
        let a = self.eval_a(z)?;
        let b = self.eval_b(z)?;
        if a.norm() < POLE_GUARD * b.norm() {
            return Err(Error::PoleProximity { abs_a: a.norm(), abs_b: b.norm(), guard: POLE_GUARD });
        }
        Ok(b / a)
    }

    /// n-th positive zero of `A` (1-based), strictly increasing in n.
    fn zero(&self, n: usize) -> Result<f64>;

    /// Weight `c_n > 0` attached to the n-th zero.
    fn weight(&self, n: usize) -> Result<f64>;

    /// Number of positive zeros when finite.
    fn zero_count(&self) -> Option<usize>;

    fn tail_profile(&self) -> TailProfile;
}

/// Homogeneous space of order `beta`: `A = A_beta`, `B = B_beta`,
/// `xi_n = j_{beta,n}`, `c_n = 1`.
#[derive(Debug, Clone)]
pub struct HomogeneousSpace {
    order: SpaceOrder,
    cfg: EvalConfig,
}

impl HomogeneousSpace {
    pub fn new(order: SpaceOrder) -> HomogeneousSpace {
        HomogeneousSpace { order, cfg: EvalConfig::default() }
    }

    pub fn with_config(order: SpaceOrder, cfg: EvalConfig) -> HomogeneousSpace {
        HomogeneousSpace { order, cfg }
    }

    pub fn order(&self) -> SpaceOrder {
        self.order
    }

    /// Norm constant `c_beta = pi 2^{-2 beta - 1} Gamma(beta+1)^{-2}`
    /// translating the `H(E_beta)` norm into the `|x|^{2 beta + 1}`
    /// weight.
    pub fn norm_constant(&self) -> f64 {
        let beta = self.order.nu();
        let lg = specialfn::log_gamma(beta + 1.0).expect("beta + 1 > 0 by construction");
        (std::f64::consts::PI.ln() - (2.0 * beta + 1.0) * 2.0_f64.ln() - 2.0 * lg).exp()
    }
}

/// Constructs the homogeneous space of order `beta`.
pub fn homogeneous_space(beta: f64) -> Result<HomogeneousSpace> {
    Ok(HomogeneousSpace::new(SpaceOrder::new(beta)?))
}

/// `int |f|^2 |E_beta|^{-2} = c_beta int |f|^2 |x|^{2 beta + 1}`.
pub fn weighted_norm_ratio(space: &HomogeneousSpace) -> f64 {
    space.norm_constant()
}

impl Space for HomogeneousSpace {
    fn eval_a(&self, z: Complex64) -> Result<Complex64> {
        specialfn::eval_a(self.order, z, &self.cfg)
    }

    fn eval_b(&self, z: Complex64) -> Result<Complex64> {
        specialfn::eval_b(self.order, z, &self.cfg)
    }

    fn zero(&self, n: usize) -> Result<f64> {
        specialfn::bessel_zero(self.order, n)
    }

    fn weight(&self, _n: usize) -> Result<f64> {
        Ok(1.0)
    }

    fn zero_count(&self) -> Option<usize> {
        None
    }

    fn tail_profile(&self) -> TailProfile {
        TailProfile::Asymptotic { spacing: std::f64::consts::PI, weight: 1.0 }
    }
}

/// Serialized shape of a tabulated spectrum; the companion functions are
/// supplied programmatically.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TabulatedSpaceData {
    pub zeros: Vec<f64>,
    pub weights: Vec<f64>,
}

type EntireFn = Box<dyn Fn(Complex64) -> Complex64 + Send + Sync>;

/// Space built from explicit zeros/weights plus `A`, `B` callables.
pub struct TabulatedSpace {
    zeros: Vec<f64>,
    weights: Vec<f64>,
    a: EntireFn,
    b: EntireFn,
}

impl std::fmt::Debug for TabulatedSpace {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TabulatedSpace")
            .field("zeros", &self.zeros)
            .field("weights", &self.weights)
            .finish_non_exhaustive()
    }
}

impl TabulatedSpace {
    /// Validates and wraps user data. Every violated invariant is
    /// reported, not only the first.
    pub fn new(zeros: Vec<f64>, weights: Vec<f64>, a: EntireFn, b: EntireFn) -> Result<TabulatedSpace> {
        let mut problems = Vec::new();
        if zeros.is_empty() {
            problems.push("zero list is empty".to_string());
        }
        if zeros.len() != weights.len() {
            problems.push(format!(
                "{} zeros but {} weights",
                zeros.len(),
                weights.len()
            ));
        }
        let mut prev = 0.0;
        for (i, &z) in zeros.iter().enumerate() {
            if !(z.is_finite() && z > prev) {
                problems.push(format!("zeros must be finite, positive, strictly increasing (index {})", i + 1));
                break;
            }
            prev = z;
        }
        for (i, &w) in weights.iter().enumerate() {
            if !(w.is_finite() && w > 0.0) {
                problems.push(format!("weight {} at index {} must be positive", w, i + 1));
                break;
            }
        }
        // structural conditions sampled: A(0) != 0, A even, B odd
        let a0 = a(Complex64::new(0.0, 0.0));
        if a0.norm() < 1e-12 {
            problems.push("A(0) = 0 violates the no-real-zero condition".to_string());
        }
        for &x in &[0.37, 1.1, 2.9] {
            let zp = Complex64::new(x, 0.0);
            let zm = Complex64::new(-x, 0.0);
            if (a(zp) - a(zm)).norm() > 1e-9 * (1.0 + a(zp).norm()) {
                problems.push(format!("A is not even at x = {x}"));
            }
            if (b(zp) + b(zm)).norm() > 1e-9 * (1.0 + b(zp).norm()) {
                problems.push(format!("B is not odd at x = {x}"));
            }
        }
        if problems.is_empty() {
            // spectral consistency: A(xi_n) ~ 0, c_n ~ -A'(xi_n)/B(xi_n).
            // Fixed step: the oscillation scale of an exponential-type-1
            // function is O(1), so the central-difference truncation error
            // stays ~h^2/6 ~ 2e-9 across the whole spectrum
            for (i, (&z, &w)) in zeros.iter().zip(weights.iter()).enumerate() {
                let h = 1e-4;
                let ap = (a(Complex64::new(z + h, 0.0)) - a(Complex64::new(z - h, 0.0))).re / (2.0 * h);
                let bz = b(Complex64::new(z, 0.0)).re;
                let az = a(Complex64::new(z, 0.0)).re;
                if az.abs() > 1e-6 * (ap.abs() * (1.0 + z)).max(1.0) {
                    problems.push(format!("A does not vanish at claimed zero {} (index {})", z, i + 1));
                    continue;
                }
                if bz.abs() < 1e-12 {
                    problems.push(format!("B vanishes at zero {} of A (common zero, index {})", z, i + 1));
                    continue;
                }
                let c_fd = -ap / bz;
                if (c_fd - w).abs() > 1e-6 * w.abs().max(1e-12) {
                    problems.push(format!(
                        "weight {} at index {} disagrees with -A'(xi)/B(xi) = {}",
                        w,
                        i + 1,
                        c_fd
                    ));
                }
            }
        }
        if !problems.is_empty() {
            return Err(Error::Validation(problems));
        }
        Ok(TabulatedSpace { zeros, weights, a, b })
    }

    pub fn from_data(data: TabulatedSpaceData, a: EntireFn, b: EntireFn) -> Result<TabulatedSpace> {
        TabulatedSpace::new(data.zeros, data.weights, a, b)
    }
}

impl Space for TabulatedSpace {
    fn eval_a(&self, z: Complex64) -> Result<Complex64> {
        Ok((self.a)(z))
    }

    fn eval_b(&self, z: Complex64) -> Result<Complex64> {
        Ok((self.b)(z))
    }

    fn zero(&self, n: usize) -> Result<f64> {
        self.zeros
            .get(n.checked_sub(1).ok_or_else(|| Error::Domain("zero index must be >= 1".into()))?)
            .copied()
            .ok_or_else(|| Error::Domain(format!("zero index {n} exceeds tabulated count {}", self.zeros.len())))
    }

    fn weight(&self, n: usize) -> Result<f64> {
        self.weights
            .get(n.checked_sub(1).ok_or_else(|| Error::Domain("weight index must be >= 1".into()))?)
            .copied()
            .ok_or_else(|| Error::Domain(format!("weight index {n} exceeds tabulated count {}", self.weights.len())))
    }

    fn zero_count(&self) -> Option<usize> {
        Some(self.zeros.len())
    }

    fn tail_profile(&self) -> TailProfile {
        TailProfile::Finite
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn homogeneous_minus_half_is_cosine_space() {
        let s = homogeneous_space(-0.5).unwrap();
        for n in 1..=5 {
            let z = s.zero(n).unwrap();
            assert!((z - (n as f64 - 0.5) * PI).abs() < 1e-12);
            assert_eq!(s.weight(n).unwrap(), 1.0);
        }
        let c = s.eval_c(Complex64::new(0.7, 0.0)).unwrap();
        assert!((c.re - 0.7_f64.tan()).abs() < 1e-14);
    }

    #[test]
    fn homogeneous_zero_order_first_zero() {
        let s = homogeneous_space(0.0).unwrap();
        assert!((s.zero(1).unwrap() - 2.404825557695773).abs() < 1e-12);
    }

    #[test]
    fn norm_constants() {
        assert!((weighted_norm_ratio(&homogeneous_space(-0.5).unwrap()) - 1.0).abs() < 1e-14);
        assert!((weighted_norm_ratio(&homogeneous_space(0.0).unwrap()) - PI / 2.0).abs() < 1e-14);
        assert!((weighted_norm_ratio(&homogeneous_space(1.0).unwrap()) - PI / 8.0).abs() < 1e-14);
    }

    #[test]
    fn rejects_bad_order() {
        assert!(homogeneous_space(-1.0).is_err());
        assert!(homogeneous_space(-2.0).is_err());
    }

    fn cos_sin_space(zeros: Vec<f64>, weights: Vec<f64>) -> Result<TabulatedSpace> {
        TabulatedSpace::new(zeros, weights, Box::new(|z: Complex64| z.cos()), Box::new(|z: Complex64| z.sin()))
    }

    #[test]
    fn tabulated_cosine_space_matches_homogeneous() {
        let zeros: Vec<f64> = (1..=6).map(|n| (n as f64 - 0.5) * PI).collect();
        let weights = vec![1.0; 6];
        let t = cos_sin_space(zeros, weights).unwrap();
        let h = homogeneous_space(-0.5).unwrap();
        for n in 1..=6 {
            assert!((t.zero(n).unwrap() - h.zero(n).unwrap()).abs() < 1e-12);
        }
        let z = Complex64::new(0.3, 0.2);
        assert!((t.eval_c(z).unwrap() - h.eval_c(z).unwrap()).norm() < 1e-12);
        assert_eq!(t.zero_count(), Some(6));
    }

    #[test]
    fn tabulated_rejects_zero_weight() {
        let zeros: Vec<f64> = (1..=3).map(|n| (n as f64 - 0.5) * PI).collect();
        let err = cos_sin_space(zeros, vec![1.0, 0.0, 1.0]);
        match err {
            Err(Error::Validation(msgs)) => {
                assert!(msgs.iter().any(|m| m.contains("must be positive")), "{msgs:?}")
            }
            other => panic!("expected validation error, got {other:?}"),
        }
    }

    #[test]
    fn tabulated_rejects_non_monotone_zeros() {
        let err = cos_sin_space(vec![PI / 2.0, 1.0, 2.5 * PI], vec![1.0; 3]);
        assert!(matches!(err, Err(Error::Validation(_))));
    }

    #[test]
    fn tabulated_rejects_wrong_weights() {
        let zeros: Vec<f64> = (1..=3).map(|n| (n as f64 - 0.5) * PI).collect();
        let err = cos_sin_space(zeros, vec![1.0, 1.0, 2.0]);
        match err {
            Err(Error::Validation(msgs)) => {
                assert!(msgs.iter().any(|m| m.contains("disagrees")), "{msgs:?}")
            }
            other => panic!("expected validation error, got {other:?}"),
        }
    }

    #[test]
    fn tabulated_rejects_fake_zero() {
        let err = cos_sin_space(vec![1.0, 4.0], vec![1.0, 1.0]);
        assert!(matches!(err, Err(Error::Validation(_))));
    }

    #[test]
    fn interpolation_identity_partial_sums() {
        // C(z)/(2z) = sum_n 1/(c_n (xi_n^2 - z^2)); the truncation error
        // should roughly halve as the truncation doubles
        let s = homogeneous_space(0.3).unwrap();
        for &z in &[Complex64::new(0.3, 0.0), Complex64::new(1.1, 0.0), Complex64::new(0.5, 0.5)] {
            let target = s.eval_c(z).unwrap() / (2.0 * z);
            let partial = |n_max: usize| -> Complex64 {
                let mut acc = Complex64::new(0.0, 0.0);
                for n in 1..=n_max {
                    let xi = s.zero(n).unwrap();
                    acc += 1.0 / (s.weight(n).unwrap() * (Complex64::new(xi * xi, 0.0) - z * z));
                }
                acc
            };
            let e1 = (partial(100) - target).norm();
            let e2 = (partial(200) - target).norm();
            let e3 = (partial(400) - target).norm();
            assert!(e2 < e1 && e3 < e2, "errors not decreasing: {e1} {e2} {e3}");
            let r1 = e1 / e2;
            let r2 = e2 / e3;
            assert!((1.6..2.6).contains(&r1), "halving rate off: {r1}");
            assert!((1.6..2.6).contains(&r2), "halving rate off: {r2}");
        }
    }
}
