use fractel::scalar::{solve_scalar, solve_scalar_critical, solve_scalar_distinct};
use fractel::spectral::{assemble_physical, norm_tau, solve, solve_with};
use fractel::verify::laplace::{LaplaceMode, Target};
use fractel::{CaseTag, Complex64, Forcing, ScalarProblem, SolveOptions, SpectralOperator, TelegraphProblem};

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn scalar(rho: f64, alpha: f64, lambda: f64, phi0: f64, phi1: f64, poly: &[f64]) -> ScalarProblem {
    let g = if poly.is_empty() {
        Forcing::Zero
    } else {
        Forcing::Polynomial(poly.iter().map(|v| c(*v)).collect())
    };
    ScalarProblem::new(rho, alpha, lambda, c(phi0), c(phi1), g, 1.0).unwrap()
}

#[test]
fn closed_form_matches_laplace_inversion_in_both_cases() {
    let cases = [
        (0.5, 1.0, 3.0, 0.3, 1.0, vec![0.5]),
        (0.75, 0.5, 0.1, -0.2, 0.7, vec![1.0, -1.0]),
        (0.9, 2.0, 4.0, 0.4, -0.5, vec![]),
        (0.3, 1.0, 1.0, 1.0, 0.0, vec![0.0, 2.0]),
    ];
    for (rho, alpha, lambda, phi0, phi1, poly) in cases {
        let p = scalar(rho, alpha, lambda, phi0, phi1, &poly);
        let sol = solve_scalar(&p).unwrap();
        let mode = LaplaceMode {
            rho,
            alpha,
            lambda,
            phi0,
            phi1,
            poly,
        };
        for t in [0.1, 0.3, 0.5, 0.8, 1.0] {
            let y = mode.invert(t, Target::Y);
            let dy = mode.invert(t, Target::DyRho);
            assert!((sol.y(t).unwrap().re - y).abs() <= 1e-6 * (1.0 + y.abs()), "ρ={rho} λ={lambda} t={t}");
            assert!(
                (sol.dy_rho(t).unwrap().re - dy).abs() <= 1e-6 * (1.0 + dy.abs()),
                "ρ={rho} λ={lambda} t={t}"
            );
        }
    }
}

#[test]
fn distinct_formula_tends_to_critical_formula() {
    for rho in [0.5, 0.9] {
        let alpha = 1.3;
        let a2 = alpha * alpha;
        let crit = solve_scalar_critical(&scalar(rho, alpha, a2, 0.4, 1.0, &[0.5, 0.25])).unwrap();
        assert_eq!(crit.case_tag(), CaseTag::Critical);
        for sign in [-1.0, 1.0] {
            let near = scalar(rho, alpha, a2 * (1.0 + sign * 1e-6), 0.4, 1.0, &[0.5, 0.25]);
            let dist = solve_scalar_distinct(&near).unwrap();
            let worst = (0..=200)
                .map(|i| i as f64 / 200.0)
                .map(|t| (dist.y(t).unwrap() - crit.y(t).unwrap()).norm())
                .fold(0.0, f64::max);
            assert!(worst <= 1e-4, "ρ={rho} sign={sign}: {worst:e}");
        }
    }
}

#[test]
fn initial_conditions() {
    for (rho, lambda) in [(0.5, 0.5), (0.75, 1.0), (0.9, 2.0), (0.6, 1.0)] {
        let p = scalar(rho, 1.0, lambda, 0.2, 0.2, &[]);
        let sol = solve_scalar(&p).unwrap();
        assert_eq!(sol.y(0.0).unwrap(), c(0.2));
        let gaps: Vec<f64> = [1e-6, 1e-5, 1e-4, 1e-3]
            .iter()
            .map(|t| (sol.dy_rho(*t).unwrap() - c(0.2)).norm())
            .collect();
        assert!(gaps[0] <= 1e-3, "ρ={rho}: {gaps:?}");
        assert!(gaps.windows(2).all(|w| w[0] < w[1]), "ρ={rho}: {gaps:?}");
    }
}

fn laplacian_problem(modes: usize) -> TelegraphProblem {
    let op = SpectralOperator::laplacian_1d(std::f64::consts::PI, modes).unwrap();
    let sign = |k: usize| if k % 2 == 0 { 1.0 } else { -1.0 };
    let phi0 = (1..=modes).map(|k| c(sign(k) / (k * k) as f64)).collect();
    let phi1 = (1..=modes).map(|k| c(1.0 / (k * k * k) as f64)).collect();
    TelegraphProblem::unforced(0.5, 1.0, 1.0, op, phi0, phi1).unwrap()
}

#[test]
fn parseval_holds_for_the_laplacian_fixture() {
    let p = laplacian_problem(32);
    let field = solve(&p).unwrap();
    assert_eq!(field.critical_modes(), vec![1]);
    let n = 4096;
    let x: Vec<f64> = (0..=n).map(|i| std::f64::consts::PI * i as f64 / n as f64).collect();
    for t in [0.25, 0.5, 1.0] {
        let phys = assemble_physical(&field, &x, &[t]).unwrap();
        let v = &phys.values[0];
        // trapezoid rule, exact for trigonometric polynomials of this degree
        let h = x[1];
        let l2 = (v.iter().map(|u| u.norm_sqr()).sum::<f64>() * h).sqrt();
        let coeff = norm_tau(&field.u(t).unwrap(), p.operator.eigenvalues(), 0.0).value;
        assert!((l2 - coeff).abs() <= 1e-6, "t={t}: {l2} vs {coeff}");
    }
}

#[test]
fn zero_data_gives_zero_solution() {
    let op = SpectralOperator::laplacian_1d(2.0, 16).unwrap();
    let p = TelegraphProblem::unforced(0.4, 0.7, 1.0, op, vec![c(0.0); 16], vec![c(0.0); 16]).unwrap();
    let field = solve(&p).unwrap();
    for i in 0..=20 {
        let t = i as f64 / 20.0;
        assert!(field.u(t).unwrap().iter().all(|v| v.norm() == 0.0));
    }
}

#[test]
fn serial_and_parallel_solves_agree_bitwise() {
    let p = laplacian_problem(64);
    let par = solve(&p).unwrap();
    let ser = solve_with(&p, &SolveOptions { parallel: false, ..SolveOptions::default() }).unwrap();
    for i in 1..=40 {
        let t = i as f64 / 40.0;
        assert_eq!(par.u(t).unwrap(), ser.u(t).unwrap());
        assert_eq!(par.du(t).unwrap(), ser.du(t).unwrap());
    }
}
