use super::*;
use crate::exact::effective_fourier;
use crate::greens::ComparisonMedium;
use crate::laminate::{PhaseId, Realization, UnitCell, WeightSpec};
use num_complex::Complex64 as C64;

fn cell() -> UnitCell<f64> {
    UnitCell::reference()
}

fn opts() -> EimOptions<f64> {
    EimOptions::default()
}

fn rel(a: C64, b: C64) -> f64 {
    (a - b).norm() / b.norm()
}

fn plane_solution(omega: f64, zeta: f64, y: f64) -> EimSolution<f64> {
    let c = cell();
    let p = EimProblem::new(&c, &Realization::new(y), omega, zeta, &opts(), SourceSpec::plane(&c, C64::new(1.0, 0.0), zeta))
        .unwrap();
    solve_problem(p).unwrap()
}

#[test]
fn matched_homogeneous_cell_has_no_eigen_fields() {
    let c = UnitCell::homogeneous(1.0, 0.05, 0.5);
    let p = EimProblem::new(&c, &Realization::reference(), 0.4, 1.0, &opts(), SourceSpec::plane(&c, C64::new(1.0, 0.0), 1.0))
        .unwrap();
    assert!(p.layout.q_star.is_empty() && p.layout.u_star.is_empty());
    let sol = solve_problem(p).unwrap();
    assert!(sol.r_star().norm() < 1e-14);
}

#[test]
fn mismatched_homogeneous_cell_recovers_its_own_properties() {
    let c = UnitCell::homogeneous(1.0, 0.3, 0.9);
    let real = Realization::new(0.2);
    let o = EimOptions {
        medium: Some(ComparisonMedium::new(0.05, 0.5)),
        ..opts()
    };
    let t = extract_effective_pm_zeta(&c, &real, 2.0, 1.0, &o, &WeightSpec::Dephased).unwrap();
    assert!(rel(t.k, C64::new(0.3, 0.0)) < 1e-6, "{}", t.k);
    assert!(rel(t.c, C64::new(0.9, 0.0)) < 1e-6, "{}", t.c);
    assert!(t.chi.norm() < 1e-7 && t.xi.norm() < 1e-7);
}

#[test]
fn backward_error_is_small() {
    let sol = plane_solution(0.01 / 8.0 * 8.0, 1e-4 * std::f64::consts::PI, 0.0);
    assert!(sol.residual < 1e-10, "{}", sol.residual);
    assert!(sol.rcond > 0.0);
}

#[test]
fn solution_is_linear_in_source_amplitude() {
    let c = cell();
    let mk = |amp: C64| {
        let p = EimProblem::new(&c, &Realization::reference(), 1.0, 1.0, &opts(), SourceSpec::plane(&c, amp, 1.0)).unwrap();
        solve_problem(p).unwrap()
    };
    let (s1, s2) = (mk(C64::new(1.0, 0.0)), mk(C64::new(-2.0, 3.0)));
    for (a, b) in s1.unknowns.iter().zip(&s2.unknowns) {
        assert!((a * C64::new(-2.0, 3.0) - b).norm() <= 1e-10 * b.norm().max(1e-12));
    }
}

#[test]
fn identity_system_returns_right_hand_side() {
    let sys = EimSystem {
        matrix: crate::linalg::DenseMatrix::<f64>::identity(3),
        rhs: vec![C64::new(1.0, 2.0), C64::new(0.0, -1.0), C64::new(3.0, 0.0)],
    };
    let (x, _, _) = crate::linalg::solve_dense(&sys.matrix, &sys.rhs).unwrap();
    assert_eq!(x, sys.rhs);
}

#[test]
fn fields_are_continuous_and_satisfy_jump_conditions() {
    let omega = 3.0;
    let sol = plane_solution(omega, 1.0, 0.0);
    let eps = 1e-9;
    let f = evaluate_fields(&sol, &[-0.4 - eps, -0.4 + eps, 0.3 - eps, 0.3 + eps, 0.4 - eps, 0.4 + eps]).unwrap();
    // Interfaces at ±c1 L: T and q continuous.
    for k in [0, 4] {
        assert!(rel(f.t[k], f.t[k + 1]) < 1e-6);
        assert!(rel(f.q_polarized[k], f.q_polarized[k + 1]) < 1e-6, "{} {}", f.q_polarized[k], f.q_polarized[k + 1]);
    }
    // Capacity point: q(p+) - q(p-) = i omega H T(p).
    let jump = f.q_polarized[3] - f.q_polarized[2];
    let want = C64::new(0.0, omega) * f.t[2];
    assert!(rel(jump, want) < 1e-6, "{jump} {want}");
    assert!(evaluate_fields(&sol, &[sol.problem.capacity_point]).is_err());
}

#[test]
fn bloch_conditions_hold() {
    let zeta = 1.0;
    let sol = plane_solution(2.0, zeta, 0.3);
    let (tl, tr) = (sol.temperature(-1.0).0, sol.temperature(1.0).0);
    assert!((tr * C64::new(0.0, -2.0 * zeta).exp() - tl).norm() < 1e-8 * tl.norm());
    assert!((tl - sol.t_left()).norm() < 1e-8 * tl.norm());
    // Flux: interior limits at both ends.
    let f = evaluate_fields(&sol, &[-1.0 + 1e-9, 1.0 - 1e-9]).unwrap();
    let q = &f.q_polarized;
    assert!((q[1] * C64::new(0.0, -2.0 * zeta).exp() - q[0]).norm() < 1e-6 * q[0].norm());
    assert!(rel(q[0], sol.q_left()) < 1e-6);
}

#[test]
fn local_and_polarized_flux_agree_at_element_centres() {
    let sol = plane_solution(3.0, 1.0, 0.1);
    let centres: Vec<f64> = sol.problem.mesh.elements.iter().map(|e| e.center()).collect();
    let f = evaluate_fields(&sol, &centres).unwrap();
    for (a, b) in f.q.iter().zip(&f.q_polarized) {
        assert!((a - b).norm() < 1e-9 * b.norm().max(1e-3));
    }
}

#[test]
fn eigen_fields_satisfy_inclusion_conditions() {
    let sol = plane_solution(2.0, 1.0, -0.35);
    assert!(sol.consistency_residual() < 1e-8, "{}", sol.consistency_residual());
}

#[test]
fn dephased_gradient_average_is_i_zeta_temperature() {
    let zeta = 1.0;
    let sol = plane_solution(1.5, zeta, 0.0);
    let a = cell_averages(&sol, &WeightSpec::Dephased).unwrap();
    assert!(rel(a.tx, C64::new(0.0, zeta) * a.t) < 1e-6, "{} {}", a.tx, a.t);
}

#[test]
fn constant_field_averages() {
    // Static-like check: a homogeneous matched cell with a uniform source at
    // vanishing zeta has <T,x> = 0 under the uniform weight.
    let c = UnitCell::homogeneous(1.0, 0.05, 0.5);
    let p = EimProblem::new(&c, &Realization::reference(), 0.2, 0.0, &opts(), SourceSpec::plane(&c, C64::new(1.0, 0.0), 0.0)).unwrap();
    let sol = solve_problem(p).unwrap();
    let a = cell_averages(&sol, &WeightSpec::Uniform).unwrap();
    // Uniform source on a homogeneous periodic cell: T = Q / (-i omega C).
    let want = C64::new(1.0, 0.0) / C64::new(0.0, -0.2 * 0.5);
    assert!(rel(a.t, want) < 1e-8, "{} {}", a.t, want);
    assert!(a.tx.norm() < 1e-8 * a.t.norm());
}

#[test]
fn dephased_averages_are_realization_invariant() {
    let avg = |y| cell_averages(&plane_solution(2.0, 1.0, y), &WeightSpec::Dephased).unwrap();
    let a0 = avg(0.0);
    for y in [-0.5, 0.5] {
        let a = avg(y);
        assert!(rel(a.t, a0.t) < 1e-6, "y={y}: {} {}", a.t, a0.t);
        assert!(rel(a.q, a0.q) < 1e-6);
        assert!(rel(a.f, a0.f) < 1e-6);
    }
}

#[test]
fn two_source_extraction_rank_deficient_for_dephased_weight() {
    let c = cell();
    let r = Realization::reference();
    let sources = [SourceSpec::plane(&c, C64::new(1.0, 0.0), 1.0), SourceSpec::modulated(&c, 1.0, 0.3)];
    let e = extract_effective_two_sources(&c, &r, 2.4, 1.0, &opts(), &WeightSpec::Dephased, sources);
    assert!(matches!(e, Err(crate::error::Error::RankDeficient { .. })));
}

#[test]
fn two_source_extraction_on_homogeneous_cell() {
    let c = UnitCell::homogeneous(1.0, 0.3, 0.9);
    let r = Realization::reference();
    let o = EimOptions {
        medium: Some(ComparisonMedium::new(0.05, 0.5)),
        ..opts()
    };
    let sources = [SourceSpec::plane(&c, C64::new(1.0, 0.0), 1.0), SourceSpec::modulated(&c, 1.0, 0.3)];
    let t = extract_effective_two_sources(&c, &r, 2.4, 1.0, &o, &WeightSpec::Uniform, sources).unwrap();
    assert!(rel(t.k, C64::new(0.3, 0.0)) < 1e-8, "{}", t.k);
    assert!(rel(t.c, C64::new(0.9, 0.0)) < 1e-8, "{}", t.c);
    assert!(t.chi.norm() < 1e-8 && t.xi.norm() < 1e-8);
}

#[test]
fn symmetric_cells_have_no_coupling() {
    for c in [cell().with_alpha(0.0), cell().with_point_capacity(0.0)] {
        let t = extract_effective_pm_zeta(&c, &Realization::reference(), 5.0, 1.0, &opts(), &WeightSpec::Dephased).unwrap();
        let scale = t.k.norm() * std::f64::consts::PI / c.half_length;
        assert!(t.chi.norm() / scale < 1e-6, "{}", t.chi);
        assert!(t.xi.norm() / scale < 1e-6, "{}", t.xi);
    }
}

#[test]
fn agrees_with_exact_method_at_reference_point() {
    let c = cell();
    let omega = 5.0;
    let e = extract_effective_pm_zeta(&c, &Realization::reference(), omega, 1.0, &opts(), &WeightSpec::Dephased).unwrap();
    let x = effective_fourier(&c, omega, 1.0, &WeightSpec::Dephased, 100).unwrap();
    for d in e.relative_deviation(&x) {
        assert!(d < 0.01, "{e:?} {x:?}");
    }
    assert!(rel(e.chi, C64::new(-0.096, -0.029)) < 0.02);
}

#[test]
fn masked_weight_agrees_with_exact_method() {
    let c = cell();
    let w = WeightSpec::PhaseMasked(PhaseId::Two);
    let e = extract_effective_pm_zeta(&c, &Realization::reference(), 5.0, 1.0, &opts(), &w).unwrap();
    let x = effective_fourier(&c, 5.0, 1.0, &w, 100).unwrap();
    for d in e.relative_deviation(&x) {
        assert!(d < 0.02, "{e:?} {x:?}");
    }
}

#[test]
fn kernels_are_even_under_zeta_reversal() {
    let c = cell();
    let r = Realization::reference();
    let a = extract_effective_pm_zeta(&c, &r, 2.0, 1.0, &opts(), &WeightSpec::Dephased).unwrap();
    let b = extract_effective_pm_zeta(&c, &r, 2.0, -1.0, &opts(), &WeightSpec::Dephased).unwrap();
    for d in a.relative_deviation(&b) {
        assert!(d < 1e-12);
    }
}

#[test]
fn mesh_refinement_moves_kernels_little() {
    let c = cell();
    let r = Realization::reference();
    let coarse = extract_effective_pm_zeta(&c, &r, 2.0, 1.0, &opts(), &WeightSpec::Dephased).unwrap();
    let fine = EimOptions {
        elements: 400,
        sample_points: 800,
        medium: None,
    };
    let fine = extract_effective_pm_zeta(&c, &r, 2.0, 1.0, &fine, &WeightSpec::Dephased).unwrap();
    for d in coarse.relative_deviation(&fine) {
        assert!(d < 1e-3, "{d}");
    }
}

#[test]
fn zero_zeta_uses_a_small_symmetric_loading() {
    let c = cell();
    let r = Realization::reference();
    let t = extract_effective_pm_zeta(&c, &r, 0.4, 0.0, &opts(), &WeightSpec::Dephased).unwrap();
    assert_eq!(t.wavenumber, 0.0);
    let x = effective_fourier(&c, 0.4, 0.0, &WeightSpec::Dephased, 100).unwrap();
    for d in t.relative_deviation(&x) {
        assert!(d < 0.01);
    }
}
