//! Reduced-scale run of every module's invariant checks; one pass/fail
//! line per property, nonzero exit on any failure.

use std::process::ExitCode;
use std::time::Instant;

use num_complex::Complex64;

use debranges::applications::ep2_constant;
use debranges::bounds::{monotonicity_suite, upper_bound_log_ep1};
use debranges::extremal::{constraint_residuals, extremizer_coeffs, rayleigh_quotient};
use debranges::linalg::{bordered_det, det_complex, MatrixC};
use debranges::oracles::{fd_poincare_value, galerkin_value, FDConfig, GalerkinConfig};
use debranges::sharpsolve::{solve_lambda0, SharpProblem};
use debranges::spaces::{homogeneous_space, Space};
use debranges::specialfn::{bessel_zero, eval_a, eval_a_real, eval_b, eval_b_real, kernel_diag, EvalConfig, SpaceOrder};

type Check = (&'static str, fn(f64) -> Result<(), String>);

fn specialfn_reduction(scale: f64) -> Result<(), String> {
    let cfg = EvalConfig::default();
    let o = SpaceOrder::new(-0.5).map_err(|e| e.to_string())?;
    for &x in &[0.3, 2.0, 9.5, 18.0] {
        let z = Complex64::new(x, 0.7);
        let a = eval_a(o, z, &cfg).map_err(|e| e.to_string())?;
        if (a - z.cos()).norm() > 1e-12 * scale * z.cos().norm().max(1.0) {
            return Err(format!("A != cos at {z}"));
        }
        let b = eval_b(o, z, &cfg).map_err(|e| e.to_string())?;
        if (b - z.sin()).norm() > 1e-12 * scale * z.sin().norm().max(1.0) {
            return Err(format!("B != sin at {z}"));
        }
    }
    Ok(())
}

fn specialfn_ode(scale: f64) -> Result<(), String> {
    let cfg = EvalConfig::default();
    let h = 1e-5;
    for beta in [-0.5, 0.5] {
        let o = SpaceOrder::new(beta).map_err(|e| e.to_string())?;
        let mut x = 0.2_f64;
        while x <= 10.0 {
            let ap = (eval_a_real(o, x + h, &cfg).unwrap() - eval_a_real(o, x - h, &cfg).unwrap()) / (2.0 * h);
            let b = eval_b_real(o, x, &cfg).unwrap();
            if (ap + b).abs() > 1e-6 * scale {
                return Err(format!("A' = -B residual at nu={beta}, x={x}"));
            }
            x += 1.1;
        }
    }
    Ok(())
}

fn bessel_zero_oracle(scale: f64) -> Result<(), String> {
    let cfg = EvalConfig::default();
    let o = SpaceOrder::new(0.0).unwrap();
    let f = |x: f64| eval_a_real(o, x, &cfg).unwrap();
    let (mut a, mut b) = (2.0, 3.0);
    for _ in 0..70 {
        let m = 0.5 * (a + b);
        if f(m) > 0.0 {
            a = m;
        } else {
            b = m;
        }
    }
    let oracle = 0.5 * (a + b);
    let z = bessel_zero(o, 1).map_err(|e| e.to_string())?;
    if (z - oracle).abs() > 1e-12 * scale {
        return Err(format!("bessel_zero(0,1) = {z} vs bisection {oracle}"));
    }
    Ok(())
}

fn kernel_positivity(_scale: f64) -> Result<(), String> {
    let cfg = EvalConfig::default();
    for beta in [-0.9, 0.0, 2.5] {
        let o = SpaceOrder::new(beta).unwrap();
        let mut x = 0.0_f64;
        while x <= 15.0 {
            if kernel_diag(o, x, &cfg).map_err(|e| e.to_string())? <= 0.0 {
                return Err(format!("kernel not positive at nu={beta}, x={x}"));
            }
            x += 0.73;
        }
    }
    Ok(())
}

fn linalg_identities(scale: f64) -> Result<(), String> {
    let c = |re: f64, im: f64| Complex64::new(re, im);
    let a = MatrixC::from_rows(&[vec![c(1.0, 0.2), c(-0.4, 0.9)], vec![c(0.3, -1.0), c(2.0, 0.1)]]);
    let b = MatrixC::from_rows(&[vec![c(0.5, -0.3), c(1.1, 0.0)], vec![c(-0.2, 0.8), c(0.9, -0.5)]]);
    let lhs = det_complex(&a.mul(&b));
    let rhs = det_complex(&a) * det_complex(&b);
    if (lhs - rhs).norm() > 1e-12 * scale * rhs.norm() {
        return Err("det(AB) != det(A) det(B)".into());
    }
    let m = MatrixC::from_rows(&[vec![c(1.0, 0.0), c(2.0, 0.0)], vec![c(3.0, 0.0), c(4.0, 0.0)]]);
    let expect = c(4.0, 0.0) - c(2.0, 0.0) - c(3.0, 0.0) + c(1.0, 0.0);
    if (bordered_det(&m) - expect).norm() > 1e-13 * scale {
        return Err("bordered determinant identity".into());
    }
    Ok(())
}

fn solver_table(scale: f64) -> Result<(), String> {
    use std::f64::consts::PI;
    let s = homogeneous_space(-0.5).map_err(|e| e.to_string())?;
    for (k, target) in [(1u32, PI / 2.0), (3, PI)] {
        let p = SharpProblem::new(&s, k).map_err(|e| e.to_string())?;
        let r = solve_lambda0(&p, None, 1e-11).map_err(|e| e.to_string())?;
        if (r.lambda0 - target).abs() > 1e-9 * scale {
            return Err(format!("lambda0(-1/2, {k}) = {} vs {target}", r.lambda0));
        }
    }
    let p = SharpProblem::new(&s, 2).map_err(|e| e.to_string())?;
    let r = solve_lambda0(&p, None, 1e-11).map_err(|e| e.to_string())?;
    if !(2.36..2.37).contains(&r.lambda0) {
        return Err(format!("lambda0(-1/2, 2) = {}", r.lambda0));
    }
    Ok(())
}

fn galerkin_gap(scale: f64) -> Result<(), String> {
    let s = homogeneous_space(0.0).unwrap();
    let p = SharpProblem::new(&s, 3).map_err(|e| e.to_string())?;
    let r = solve_lambda0(&p, None, 1e-11).map_err(|e| e.to_string())?;
    let g = galerkin_value(&p, &GalerkinConfig { truncation: 100 }).map_err(|e| e.to_string())?;
    if g.value < r.constant {
        return Err("galerkin value below solver value".into());
    }
    let gap = (g.value - r.constant) / r.constant;
    if gap > 1e-4 * scale {
        return Err(format!("galerkin gap {gap:.3e} at N = 100"));
    }
    Ok(())
}

fn fd_dirichlet(scale: f64) -> Result<(), String> {
    use std::f64::consts::PI;
    let v = fd_poincare_value(&FDConfig { grid_points: 127, order_m: 1, order_n: 0, radius: 1.0 })
        .map_err(|e| e.to_string())?;
    if (v - PI * PI / 4.0).abs() > 1e-3 * scale {
        return Err(format!("fd(m=1) = {v}"));
    }
    Ok(())
}

fn extremal_rayleigh(scale: f64) -> Result<(), String> {
    let s = homogeneous_space(-0.5).unwrap();
    let p = SharpProblem::new(&s, 2).map_err(|e| e.to_string())?;
    let r = solve_lambda0(&p, None, 1e-11).map_err(|e| e.to_string())?;
    let c = extremizer_coeffs(&p, &r, 200).map_err(|e| e.to_string())?;
    let rq = rayleigh_quotient(&c, &s).map_err(|e| e.to_string())?;
    let rel = (rq - r.constant).abs() / r.constant;
    if rel > 1e-6 * scale {
        return Err(format!("Rayleigh rel {rel:.3e}"));
    }
    let res = constraint_residuals(&c, &s).map_err(|e| e.to_string())?;
    if res.iter().any(|&v| v > 1e-6 * scale) {
        return Err(format!("constraint residuals {res:?}"));
    }
    Ok(())
}

fn bounds_dominance(_scale: f64) -> Result<(), String> {
    for beta in [-0.5, 1.0] {
        let s = homogeneous_space(beta).unwrap();
        for k in 1..=3u32 {
            let p = SharpProblem::new(&s, k).map_err(|e| e.to_string())?;
            let r = solve_lambda0(&p, None, 1e-11).map_err(|e| e.to_string())?;
            let ub = upper_bound_log_ep1(beta + k as f64, beta).map_err(|e| e.to_string())?;
            if ub < 2.0 * k as f64 * r.lambda0.ln() {
                return Err(format!("dominance fails at beta={beta}, k={k}"));
            }
        }
    }
    Ok(())
}

fn ep2_first_cell(_scale: f64) -> Result<(), String> {
    let v = ep2_constant(2, 1.0).map_err(|e| e.to_string())?.sqrt();
    if !(4.26..4.27).contains(&v) {
        return Err(format!("EP2(2;1)^(1/2) = {v}"));
    }
    Ok(())
}

fn monotonicity_small(_scale: f64) -> Result<(), String> {
    monotonicity_suite(&[-0.5, 0.0], 3).map_err(|e| e.to_string())?;
    Ok(())
}

fn interpolation_series(_scale: f64) -> Result<(), String> {
    let s = homogeneous_space(0.3).unwrap();
    let z = Complex64::new(1.1, 0.0);
    let target = s.eval_c(z).map_err(|e| e.to_string())? / (2.0 * z);
    let partial = |n_max: usize| -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for n in 1..=n_max {
            let xi = s.zero(n).unwrap();
            acc += 1.0 / (Complex64::new(xi * xi, 0.0) - z * z);
        }
        acc
    };
    let e1 = (partial(50) - target).norm();
    let e2 = (partial(100) - target).norm();
    if e2 >= e1 || e2.is_nan() {
        return Err(format!("series error not decreasing: {e1} -> {e2}"));
    }
    Ok(())
}

pub fn run(tol_scale: f64) -> ExitCode {
    let checks: Vec<Check> = vec![
        ("specialfn_cos_sin_reduction", specialfn_reduction),
        ("specialfn_ode_residuals", specialfn_ode),
        ("specialfn_bessel_zero_vs_bisection", bessel_zero_oracle),
        ("specialfn_kernel_positivity", kernel_positivity),
        ("linalg_determinant_identities", linalg_identities),
        ("spaces_interpolation_series", interpolation_series),
        ("sharpsolve_half_table", solver_table),
        ("oracles_galerkin_gap", galerkin_gap),
        ("oracles_fd_dirichlet", fd_dirichlet),
        ("extremal_rayleigh_and_constraints", extremal_rayleigh),
        ("bounds_upper_dominance", bounds_dominance),
        ("applications_ep2_first_cell", ep2_first_cell),
        ("bounds_monotonicity", monotonicity_small),
    ];
    let start = Instant::now();
    let mut failures = Vec::new();
    for (name, check) in &checks {
        match check(tol_scale) {
            Ok(()) => println!("PASS {name}"),
            Err(msg) => {
                println!("FAIL {name}: {msg}");
                failures.push(*name);
            }
        }
    }
    println!(
        "selftest: {}/{} passed in {:.2} s",
        checks.len() - failures.len(),
        checks.len(),
        start.elapsed().as_secs_f64()
    );
    if failures.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("failed properties: {}", failures.join(", "));
        ExitCode::FAILURE
    }
}
