//! Acceptance gate: one PASS/FAIL line per criterion. Runs without the
//! libtest harness so the lines always reach the output.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::sync::Arc;

use bvstar::bvcalc::PiecewiseBV;
use bvstar::cantor::CantorFunction;
use bvstar::claw::{forced_jump, riemann_solve, solution_curve, FluxModel, RiemannSolution, WaveKind};
use bvstar::gelfand::{ibp_check, tv_function, GelfandOptions, MeasureCurve, TVOptions, TestCurve};
use bvstar::measures::{MeasureVector, Quadrature, SignedMeasure, Window};
use bvstar::testfns::{seeded_family, TestFunction, TestVector};
use bvstar::verify::{
    distributional_residual, entropy_check, frozen_curve, gelfand_form_residual, holder_check, lax_check, rh_check,
    variation_bound_check, weakstar_residual, ToleranceConfig,
};

struct Gate {
    failures: usize,
}

impl Gate {
    fn report(&mut self, id: u32, title: &str, outcome: Result<String, String>) {
        match outcome {
            Ok(detail) => println!("PASS [{id:>2}] {title}: {detail}"),
            Err(detail) => {
                self.failures += 1;
                println!("FAIL [{id:>2}] {title}: {detail}");
            }
        }
    }
}

fn ensure(ok: bool, detail: String) -> Result<String, String> {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn window() -> Window {
    Window::new(-2.0, 2.0).unwrap()
}

fn times() -> Vec<f64> {
    (0..10).map(|j| (j as f64 + 0.5) / 10.0).collect()
}

fn family() -> Vec<TestFunction> {
    seeded_family(&window(), 10, 42)
}

fn vector_family(n: usize) -> Vec<TestVector> {
    (0..n).flat_map(|i| family().into_iter().map(move |phi| TestVector::unit(n, i, phi))).collect()
}

fn scenarios() -> Vec<(&'static str, RiemannSolution)> {
    let p = FluxModel::PSystem { k: 1.0, gamma: 1.0 };
    vec![
        ("burgers shock", riemann_solve(&FluxModel::Burgers, &[1.0], &[0.0]).unwrap()),
        ("burgers rarefaction", riemann_solve(&FluxModel::Burgers, &[0.0], &[1.0]).unwrap()),
        ("p-system 1-shock", riemann_solve(&p, &[1.0, 0.0], &[0.5, -(0.5f64).sqrt()]).unwrap()),
    ]
}

fn c1_rankine_hugoniot_lax() -> Result<String, String> {
    let cfg = ToleranceConfig::default();
    let sol = riemann_solve(&FluxModel::Burgers, &[1.0], &[0.0]).map_err(|e| e.to_string())?;
    if sol.waves.len() != 1 || sol.waves[0].kind != WaveKind::Shock {
        return Err(format!("expected one shock, got {:?}", sol.waves));
    }
    let w = &sol.waves[0];
    let speed = w.jump_speed().unwrap();
    let rh = rh_check(w, &FluxModel::Burgers);
    let lax = lax_check(w, &FluxModel::Burgers, cfg.lax_margin, cfg.contact);
    let mut reversed_ok = true;
    for (ul, ur) in [(0.0, 1.0), (-1.0, 2.0), (0.3, 0.31), (-2.0, -0.5)] {
        let rev = riemann_solve(&FluxModel::Burgers, &[ul], &[ur]).map_err(|e| e.to_string())?;
        reversed_ok &= rev.waves.len() == 1 && rev.waves[0].kind == WaveKind::Rarefaction;
    }
    ensure(
        (speed - 0.5).abs() <= 1e-12 && rh <= 1e-12 && lax.pass && reversed_ok,
        format!(
            "speed {speed}, RH residual {rh:.1e}, Lax strict {}, increasing data gives rarefactions {reversed_ok}",
            lax.pass
        ),
    )
}

fn c2_weakstar() -> Result<String, String> {
    let cfg = ToleranceConfig::default();
    let mut parts = Vec::new();
    let mut ok = true;
    for (name, sol) in scenarios() {
        let curve = solution_curve(&sol, window(), 1.0, cfg.cheb_degree).map_err(|e| e.to_string())?;
        let mut worst: f64 = 0.0;
        for phi in vector_family(sol.dim()) {
            for &t in &times() {
                worst = worst.max(weakstar_residual(&curve, &sol.flux, &phi, t, &cfg).map_err(|e| e.to_string())?);
            }
        }
        ok &= worst <= 1e-6;
        parts.push(format!("{name} {worst:.1e}"));
    }
    ensure(ok, format!("max residual (tol 1e-6): {}", parts.join(", ")))
}

fn c3_gelfand_form() -> Result<String, String> {
    let cfg = ToleranceConfig::default();
    let mut parts = Vec::new();
    let mut ok = true;
    for (name, sol) in scenarios() {
        let curve = solution_curve(&sol, window(), 1.0, cfg.cheb_degree).map_err(|e| e.to_string())?;
        let mut worst: f64 = 0.0;
        for phi in vector_family(sol.dim()) {
            for &t in &[0.3, 1.0] {
                let r = gelfand_form_residual(&curve, &sol.flux, &phi, 0.0, t, &cfg).map_err(|e| e.to_string())?;
                worst = worst.max(r);
            }
        }
        ok &= worst <= 1e-8;
        parts.push(format!("{name} {worst:.1e}"));
    }
    let sol = riemann_solve(&FluxModel::Burgers, &[1.0], &[0.0]).unwrap();
    let frozen = frozen_curve(&sol, window(), 1.0, &cfg).map_err(|e| e.to_string())?;
    let mut frozen_err: f64 = 0.0;
    let mut probes = family();
    probes.push(TestFunction::plateau(0.0, 1.0, 0.5).unwrap());
    for phi in probes {
        let expected = 0.5 * phi.value(0.0);
        let phi = TestVector::scalar(phi);
        let r = gelfand_form_residual(&frozen, &FluxModel::Burgers, &phi, 0.0, 1.0, &cfg).map_err(|e| e.to_string())?;
        frozen_err = frozen_err.max((r - expected).abs());
    }
    ok &= frozen_err <= 1e-8;
    ensure(ok, format!("max residual (tol 1e-8): {}; frozen curve |r - phi(0)/2| = {frozen_err:.1e}", parts.join(", ")))
}

fn c4_entropy() -> Result<String, String> {
    let cfg = ToleranceConfig::default();
    let pair = FluxModel::Burgers.entropy_pair();
    let shock = riemann_solve(&FluxModel::Burgers, &[1.0], &[0.0]).unwrap();
    let admissible = entropy_check(&shock, pair, 0.5, &window(), &cfg).map_err(|e| e.to_string())?;
    let reversed = forced_jump(&FluxModel::Burgers, &[0.0], &[1.0], None).unwrap();
    let rejected = entropy_check(&reversed, pair, 0.5, &window(), &cfg).map_err(|e| e.to_string())?;
    let (a, r) = (admissible.max_atom, rejected.max_atom);
    ensure(
        (a + 1.0 / 12.0).abs() <= 1e-10 && admissible.pass && (r - 1.0 / 12.0).abs() <= 1e-10 && !rejected.pass,
        format!("shock atom {a:.12} (pass {}), reversed atom {r:.12} (pass {})", admissible.pass, rejected.pass),
    )
}

fn c5_bv_calculus() -> Result<String, String> {
    let w = Window::new(0.0, 1.0).unwrap();
    let f = PiecewiseBV::from_monomials(w, vec![], &[vec![0.0, -1.0, 1.0]], None).map_err(|e| e.to_string())?;
    let tv = f.total_variation();
    let n = 100_000;
    let oracle: f64 = (0..n)
        .map(|i| {
            let g = |x: f64| x * x - x;
            (g((i + 1) as f64 / n as f64) - g(i as f64 / n as f64)).abs()
        })
        .sum();
    let cantor = PiecewiseBV::cantor_only(w, CantorFunction::new(0.0, 1.0, 1.0).unwrap()).map_err(|e| e.to_string())?;
    let mu = cantor.dderiv().map_err(|e| e.to_string())?;
    let singular: f64 = mu.cantor_parts().iter().map(|c| c.mass.abs()).sum();
    let first_moment = mu.integrate(|x| x, &[], &Quadrature::default()).map_err(|e| e.to_string())?;
    let structure_ok = mu.atoms().is_empty() && mu.has_zero_density();
    ensure(
        (tv - 0.5).abs() <= 1e-12
            && (tv - oracle).abs() <= 1e-6
            && structure_ok
            && (singular - 1.0).abs() <= 1e-12
            && (first_moment - 0.5).abs() <= 1e-6,
        format!(
            "TV {tv:.15}, partition oracle {oracle:.10}; Cantor: no atoms/density {structure_ok}, singular mass {singular}, first moment {first_moment:.10}"
        ),
    )
}

fn growing_atom() -> MeasureCurve {
    let w = Window::new(-1.0, 1.0).unwrap();
    MeasureCurve::new(1.0, w, 1, Arc::new(move |t| Ok(MeasureVector::scalar(SignedMeasure::dirac(w, 0.0, t)?))))
        .unwrap()
        .with_derivative(Arc::new(move |_| Ok(MeasureVector::scalar(SignedMeasure::dirac(w, 0.0, 1.0)?))))
}

fn c6_integration_by_parts() -> Result<String, String> {
    let phi = TestVector::scalar(TestFunction::bump(0.0, 0.5).unwrap());
    let f = TestCurve::separable(phi, |t| 1.0 - t, |_| -1.0);
    let rep = ibp_check(&growing_atom(), &f, 100, &GelfandOptions::default()).map_err(|e| e.to_string())?;
    ensure(
        (rep.lhs - 0.5).abs() <= 1e-9 && (rep.rhs - 0.5).abs() <= 1e-9 && rep.product_rule_residual <= 1e-6,
        format!(
            "lhs {:.12}, rhs {:.12}, product rule residual {:.1e} over 100 times",
            rep.lhs, rep.rhs, rep.product_rule_residual
        ),
    )
}

fn c7_total_variation_function() -> Result<String, String> {
    let sol = riemann_solve(&FluxModel::Burgers, &[1.0], &[0.0]).unwrap();
    let curve = solution_curve(&sol, window(), 1.0, 32).map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    let mut ok = true;
    for t in [0.25, 0.5, 1.0] {
        let rep = tv_function(&curve, t, &TVOptions::default()).map_err(|e| e.to_string())?;
        let v = rep.levels.last().copied().unwrap_or(f64::NAN);
        ok &= rep.converged && !rep.divergence_flag;
        worst = worst.max((v - t / 2.0).abs());
    }
    let w = Window::new(-1.0, 2.0).unwrap();
    let moving =
        MeasureCurve::new(1.0, w, 1, Arc::new(move |t| Ok(MeasureVector::scalar(SignedMeasure::dirac(w, t, 1.0)?))))
            .map_err(|e| e.to_string())?;
    let flag = tv_function(&moving, 1.0, &TVOptions::default()).map_err(|e| e.to_string())?.divergence_flag;
    ensure(
        ok && worst <= 1e-6 && flag,
        format!("max |V(t) - t/2| = {worst:.1e} at t in {{0.25, 0.5, 1}}; moving atom divergence flag {flag}"),
    )
}

fn c8_growth() -> Result<String, String> {
    let sol = riemann_solve(&FluxModel::Burgers, &[1.0], &[0.0]).unwrap();
    let curve = solution_curve(&sol, window(), 1.0, 32).map_err(|e| e.to_string())?;
    let rep = holder_check(&curve, f64::INFINITY, 16).map_err(|e| e.to_string())?;
    let grid: Vec<f64> = (0..=20).map(|i| i as f64 / 20.0).collect();
    let g1: Vec<(f64, f64)> = grid.iter().map(|&t| (t, 1.0)).collect();
    let g_half: Vec<(f64, f64)> = grid.iter().map(|&t| (t, 0.5)).collect();
    let pass_one = variation_bound_check(&curve, &g1).map_err(|e| e.to_string())?.pass;
    let pass_half = variation_bound_check(&curve, &g_half).map_err(|e| e.to_string())?.pass;
    ensure(
        (rep.constant - 0.5).abs() <= 1e-6 && pass_one && !pass_half,
        format!(
            "Lipschitz constant {:.12} (q = inf); g = 1 passes {pass_one}; g = 0.5 passes {pass_half}",
            rep.constant
        ),
    )
}

fn c9_distributional() -> Result<String, String> {
    let cfg = ToleranceConfig::default();
    let beta = TestFunction::plateau(0.0, 1.0, 0.99).unwrap();
    let exact = riemann_solve(&FluxModel::Burgers, &[1.0], &[0.0]).unwrap();
    let mut worst: f64 = 0.0;
    for alpha in vector_family(1) {
        worst =
            worst.max(distributional_residual(&exact, &alpha, &beta, &window(), 1.0, &cfg).map_err(|e| e.to_string())?);
    }
    let path = TestVector::scalar(TestFunction::plateau(0.3, 0.9, 0.5).unwrap());
    let off = forced_jump(&FluxModel::Burgers, &[1.0], &[0.0], Some(0.6)).unwrap();
    let r = distributional_residual(&off, &path, &beta, &window(), 1.0, &cfg).map_err(|e| e.to_string())?;
    ensure(
        worst <= 1e-6 && (r - 0.1).abs() <= 1e-3,
        format!("exact shock {worst:.1e}; speed 0.6 on the path plateau {r:.6}"),
    )
}

fn scenario(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios").join(format!("{name}.json"))
}

fn verify(config: &Path, out: &Path) -> Result<i32, String> {
    let status = Command::new(env!("CARGO_BIN_EXE_bvstar"))
        .args(["verify", "--config"])
        .arg(config)
        .arg("--out-dir")
        .arg(out)
        .args(["--seed", "42"])
        .stderr(std::process::Stdio::null())
        .status()
        .map_err(|e| e.to_string())?;
    status.code().ok_or_else(|| "terminated by signal".to_string())
}

fn directory_bytes(dir: &Path) -> Result<Vec<(String, Vec<u8>)>, String> {
    let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .map_err(|e| e.to_string())?
        .map(|e| {
            let e = e.map_err(|e| e.to_string())?;
            Ok((e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).map_err(|e| e.to_string())?))
        })
        .collect::<Result<_, String>>()?;
    files.sort();
    Ok(files)
}

fn c10_determinism_and_exit_codes() -> Result<String, String> {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut codes = Vec::new();
    let mut identical = true;
    for name in ["burgers_shock", "reversed_shock", "frozen"] {
        let (a, b) = (tmp.path().join(format!("{name}_a")), tmp.path().join(format!("{name}_b")));
        let code_a = verify(&scenario(name), &a)?;
        let code_b = verify(&scenario(name), &b)?;
        identical &= code_a == code_b && directory_bytes(&a)? == directory_bytes(&b)?;
        codes.push(code_a);
    }
    let broken = tmp.path().join("no_window.json");
    std::fs::write(&broken, r#"{"flux": {"model": "burgers"}, "left": [1.0], "right": [0.0]}"#)
        .map_err(|e| e.to_string())?;
    codes.push(verify(&broken, &tmp.path().join("broken"))?);
    ensure(
        identical && codes == [0, 1, 1, 2],
        format!("byte-identical reruns {identical}; exit codes shock/reversed/frozen/missing-window = {codes:?}"),
    )
}

fn main() {
    let mut gate = Gate { failures: 0 };
    gate.report(1, "Rankine-Hugoniot and Lax", c1_rankine_hugoniot_lax());
    gate.report(2, "weak* residual", c2_weakstar());
    gate.report(3, "Gelfand-integral form", c3_gelfand_form());
    gate.report(4, "entropy measure", c4_entropy());
    gate.report(5, "BV calculus", c5_bv_calculus());
    gate.report(6, "integration by parts", c6_integration_by_parts());
    gate.report(7, "total variation function", c7_total_variation_function());
    gate.report(8, "growth estimate", c8_growth());
    gate.report(9, "distributional residual", c9_distributional());
    gate.report(10, "determinism and CLI contract", c10_determinism_and_exit_codes());
    println!("acceptance: {} of 10 criteria passed", 10 - gate.failures);
    if gate.failures > 0 {
        std::process::exit(1);
    }
}
