use bvstar::claw::{riemann_solve, solution_curve, FluxModel};
use bvstar::gelfand::{
    ftc_residual, gelfand_integral, lebesgue_diff_check, tv_function, GelfandOptions, MeasureCurve, TVOptions,
};
use bvstar::measures::{Quadrature, Window};
use bvstar::quad::Adaptive;
use bvstar::testfns::{seeded_family, TestVector};
use proptest::prelude::*;

fn window() -> Window {
    Window::new(-2.0, 2.0).unwrap()
}

fn curves() -> Vec<MeasureCurve> {
    let p = FluxModel::PSystem { k: 1.0, gamma: 1.4 };
    [
        riemann_solve(&FluxModel::Burgers, &[1.0], &[0.0]).unwrap(),
        riemann_solve(&FluxModel::Burgers, &[-0.5], &[1.0]).unwrap(),
        riemann_solve(&p, &[1.0, -0.3], &[1.1, 0.2]).unwrap(),
    ]
    .iter()
    .map(|sol| solution_curve(sol, window(), 1.0, 32).unwrap())
    .collect()
}

fn family(dim: usize, seed: u64) -> Vec<TestVector> {
    seeded_family(&window(), 4, seed).into_iter().map(|phi| TestVector::unit(dim, dim - 1, phi)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn pairing_is_bounded_by_norms(seed in 0u64..500, t in 0.0..1.0f64) {
        let quad = Quadrature::default();
        for curve in curves() {
            let psi = curve.eval(t).unwrap();
            for phi in family(curve.dim(), seed) {
                let p = curve.pairing(t, &phi, &quad).unwrap();
                prop_assert!(p.abs() <= psi.norm() * phi.sup_norm() * (1.0 + 1e-12) + 1e-12);
            }
        }
    }

    #[test]
    fn integral_is_additive(seed in 0u64..500, a in 0.0..0.4f64, b in 0.4..0.7f64, c in 0.7..1.0f64) {
        let opts = GelfandOptions::default();
        for curve in curves() {
            for phi in family(curve.dim(), seed) {
                let whole = gelfand_integral(&curve, &phi, a, c, &opts).unwrap();
                let split = gelfand_integral(&curve, &phi, a, b, &opts).unwrap() + gelfand_integral(&curve, &phi, b, c, &opts).unwrap();
                prop_assert!((whole - split).abs() <= 1e-9);
            }
        }
    }
}

#[test]
fn variation_chain() {
    for curve in curves() {
        let rep = tv_function(&curve, 1.0, &TVOptions::default()).unwrap();
        assert!(rep.converged);
        let grid = &rep.grid;
        let step = grid.len() / 8;
        for i in (0..grid.len()).step_by(step) {
            for j in (i + step..grid.len()).step_by(step) {
                let ((s, vs), (t, vt)) = (grid[i], grid[j]);
                let dist = curve.eval(t).unwrap().sub(&curve.eval(s).unwrap()).unwrap().norm();
                let speed =
                    Adaptive::with_tol(1e-10).try_integrate(s, t, |tau| Ok(curve.derivative(tau)?.norm())).unwrap();
                assert!(dist <= vt - vs + 1e-9, "{dist} > {}", vt - vs);
                assert!(vt - vs <= speed + 1e-9, "{} > {speed}", vt - vs);
            }
        }
    }
}

#[test]
fn ftc_then_lebesgue_residuals_shrink() {
    let opts = GelfandOptions::default();
    let hs: Vec<f64> = (2..12).map(|k| 2f64.powi(-k)).collect();
    for curve in curves() {
        for phi in family(curve.dim(), 11) {
            assert!(ftc_residual(&curve, &phi, 0.0, 1.0, &opts).unwrap() <= 1e-8);
            let res = lebesgue_diff_check(&curve, &phi, 0.37, &hs).unwrap();
            assert!(res.last().unwrap() <= &(res[0] + 1e-12));
        }
    }
}
