use super::*;
use crate::linalg::{eig_hermitian, max_entangled, seeded_rng, standard_complex_gaussian};

type M = Matrix<f64>;

fn lambda_max_problem(h: &M) -> Problem<f64> {
    // minimize y  s.t.  y I - H >= 0
    let n = h.rows();
    Problem::new(vec![1.0], vec![Block::new(-h, vec![M::identity(n)]).unwrap()]).unwrap()
}

fn random_hermitian(n: usize, seed: u64) -> M {
    let mut rng = seeded_rng(seed, 3);
    M::from_fn(n, n, |_, _| standard_complex_gaussian::<f64>(&mut rng)).hermitian_part()
}

fn assert_certificate(sol: &Solution<f64>, tol: f64) {
    assert_eq!(sol.status, Status::Optimal);
    assert!(sol.gap.abs() <= tol, "gap {}", sol.gap);
    assert!(sol.primal_value >= sol.dual_value - 10.0 * tol);
    assert!(sol.complementarity <= 10.0 * tol);
    for z in sol.dual_matrices.iter().chain(&sol.slack_matrices) {
        assert!(eig_hermitian(z).unwrap().min() >= -1e-8);
    }
}

#[test]
fn max_eigenvalue_of_diagonal() {
    let sol = solve(&lambda_max_problem(&M::from_diag(&[1.0, 2.0])), 1e-8, 200);
    assert_certificate(&sol, 1e-8);
    assert!((sol.y[0] - 2.0).abs() < 1e-7);
    // dual certificate concentrates on the top eigenvector
    assert!((sol.dual_matrices[0][(1, 1)].re - 1.0).abs() < 1e-6);
}

#[test]
fn interval_endpoints() {
    // diag(y, 1 - y) >= 0
    let block = Block::new(
        M::from_diag(&[0.0, 1.0]),
        vec![M::from_diag(&[1.0, -1.0])],
    )
    .unwrap();
    let lo = solve(&Problem::new(vec![1.0], vec![block.clone()]).unwrap(), 1e-8, 200);
    assert_certificate(&lo, 1e-8);
    assert!(lo.y[0].abs() < 1e-7);
    let hi = solve(&Problem::new(vec![-1.0], vec![block]).unwrap(), 1e-8, 200);
    assert_certificate(&hi, 1e-8);
    assert!((hi.y[0] - 1.0).abs() < 1e-7);
}

#[test]
fn random_max_eigenvalue_matches_jacobi() {
    let h = random_hermitian(4, 99);
    let sol = solve(&lambda_max_problem(&h), 1e-8, 200);
    assert_certificate(&sol, 1e-8);
    let exact = eig_hermitian(&h).unwrap().max();
    assert!((sol.primal_value - exact).abs() < 1e-7);
}

#[test]
fn fifty_random_instances_against_eigendecomposition() {
    for k in 0..50u64 {
        let n = 2 + (k as usize % 8);
        let h = random_hermitian(n, 1000 + k);
        let sol = solve(&lambda_max_problem(&h), 1e-8, 200);
        assert_certificate(&sol, 1e-8);
        let exact = eig_hermitian(&h).unwrap().max();
        assert!((sol.primal_value - exact).abs() < 1e-7, "n={n} k={k}");
    }
}

#[test]
fn objective_scaling() {
    let h = random_hermitian(5, 7);
    let p = lambda_max_problem(&h);
    let base = solve(&p, 1e-8, 200);
    let scaled = solve(&p.with_scaled_objective(3.5), 1e-8, 200);
    assert_eq!(scaled.status, Status::Optimal);
    assert!((scaled.primal_value - 3.5 * base.primal_value).abs() < 1e-7);
    assert!((scaled.y[0] - base.y[0]).abs() < 1e-7);
}

#[test]
fn reproducible_bit_for_bit() {
    let p = lambda_max_problem(&random_hermitian(6, 5));
    let a = solve(&p, 1e-8, 200);
    let b = solve(&p, 1e-8, 200);
    assert_eq!(a.y, b.y);
    assert_eq!(a.dual_matrices, b.dual_matrices);
}

#[test]
fn detects_infeasibility() {
    // y >= 1 and y <= 0
    let p = Problem::new(
        vec![1.0],
        vec![
            Block::new(M::from_diag(&[-1.0]), vec![M::from_diag(&[1.0])]).unwrap(),
            Block::new(M::from_diag(&[0.0]), vec![M::from_diag(&[-1.0])]).unwrap(),
        ],
    )
    .unwrap();
    let sol = solve(&p, 1e-8, 200);
    assert_eq!(sol.status, Status::Infeasible);
    let ray = sol.infeasibility_ray.unwrap();
    // improving ray: tr(F_1 Z) ~ 0 and -tr(F0 Z) > 0
    let lhs = ray[0][(0, 0)].re - ray[1][(0, 0)].re;
    assert!(lhs.abs() < 1e-4);
    assert!(ray[0][(0, 0)].re > 0.0);
}

#[test]
fn iteration_cap_reports_failure() {
    let sol = solve(&lambda_max_problem(&random_hermitian(4, 1)), 1e-8, 2);
    assert_eq!(sol.status, Status::NumericalFailure);
    assert_eq!(sol.iterations, 2);
}

#[test]
fn complex_block_dual_folding() {
    // maximize Re <v|H|v> over states with H complex: same as lambda_max
    let h = M::new(
        2,
        2,
        vec![
            Complex::new(0.0, 0.0),
            Complex::new(0.0, -1.0),
            Complex::new(0.0, 1.0),
            Complex::new(0.0, 0.0),
        ],
    )
    .unwrap();
    let sol = solve(&lambda_max_problem(&h), 1e-8, 200);
    assert_certificate(&sol, 1e-8);
    assert!((sol.y[0] - 1.0).abs() < 1e-7);
    // dual is the projector on the +1 eigenvector of Pauli Y
    let z = &sol.dual_matrices[0];
    assert!((z.trace_re() - 1.0).abs() < 1e-7);
    assert!((z[(1, 0)] - Complex::new(0.0, 0.5)).norm() < 1e-6);
}

#[test]
fn embedding_spectra() {
    let e = real_embedding(&M::identity(2)).unwrap();
    assert_eq!(e, RealMatrix::identity(4));
    let y = M::new(
        2,
        2,
        vec![
            Complex::new(0.0, 0.0),
            Complex::new(0.0, -1.0),
            Complex::new(0.0, 1.0),
            Complex::new(0.0, 0.0),
        ],
    )
    .unwrap();
    let ev = real_embedding(&y).unwrap().sym_eigenvalues();
    for (a, b) in ev.iter().zip([-1.0, -1.0, 1.0, 1.0]) {
        assert!((a - b).abs() < 1e-12);
    }
    let ev = real_embedding(&max_entangled::<f64>(2).projector()).unwrap().sym_eigenvalues();
    for (a, b) in ev.iter().zip([0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 1.0]) {
        assert!((a - b).abs() < 1e-12);
    }
    let bad = M::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]).unwrap();
    assert!(real_embedding(&bad).is_err());
}

#[test]
fn fold_matches_trace_pairing() {
    let f = random_hermitian(3, 21);
    let mut rng = seeded_rng(4, 4);
    let g = M::from_fn(6, 6, |_, _| Complex::new(standard_complex_gaussian::<f64>(&mut rng).re, 0.0));
    let z = realify(&g.matmul(&g.transpose()));
    let lhs = embed(&f, 3).dot(&z);
    let rhs = trace_product(&f, &fold(&z, 3));
    assert!((lhs - rhs).abs() < 1e-12);
}

#[test]
fn problem_validation() {
    let blk = Block::new(M::identity(2), vec![M::identity(2)]).unwrap();
    assert!(Problem::new(vec![1.0, 2.0], vec![blk]).is_err());
    assert!(Block::new(M::identity(2), vec![M::identity(3)]).is_err());
    let nh = M::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]).unwrap();
    assert!(matches!(Block::new(nh, vec![]), Err(Error::NotHermitian { .. })));
}
