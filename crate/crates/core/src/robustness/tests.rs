use super::*;
use crate::linalg::{kron, max_entangled};
use crate::states::{isotropic, pure_from_schmidt, random_density, random_product};
use proptest::prelude::*;

type D = Density<f64>;

fn sp(a: usize, b: usize) -> BipartiteSpace {
    BipartiteSpace::new(a, b).unwrap()
}

fn pt_trace_norm(rho: &D) -> f64 {
    eig_hermitian(&rho.partial_transpose())
        .unwrap()
        .values
        .iter()
        .map(|l| l.abs())
        .sum()
}

fn noisy(rho: &D, lambda: f64) -> D {
    rho.mix(&maximally_mixed(rho.space()), lambda).unwrap()
}

/// Schmidt amplitudes `(cos t, sin t)` or a three-term spherical point.
fn schmidt_from_angles(angles: &[f64]) -> Vec<f64> {
    match angles {
        [t] => vec![t.cos(), t.sin()],
        [t, p] => vec![t.cos(), t.sin() * p.cos(), t.sin() * p.sin()],
        _ => unreachable!(),
    }
}

#[test]
fn max_entangled_robustness() {
    for d in [2usize, 3] {
        let phi = max_entangled::<f64>(d).projector();
        let sigma = Density::from_parts(phi, sp(d, d));
        let r = robustness_ppt(&sigma).unwrap();
        assert!((r.value - (d as f64 - 1.0)).abs() < 1e-6, "d={d}: {}", r.value);
        assert!(r.solver_gap.abs() <= 1e-8);
    }
}

#[test]
fn pure_states_match_schmidt_formula() {
    let cases: [&[f64]; 6] = [&[0.3], &[0.7], &[1.2], &[0.5, 0.4], &[0.9, 0.8], &[0.2, 1.3]];
    for angles in cases {
        let a = schmidt_from_angles(angles);
        let a: Vec<f64> = a.iter().map(|x| x.abs()).collect();
        let expected = a.iter().sum::<f64>().powi(2) - 1.0;
        let sigma = pure_from_schmidt(&a).unwrap();
        let r = robustness_ppt(&sigma).unwrap();
        assert!((r.value - expected).abs() < 1e-6, "{a:?}: {} vs {expected}", r.value);
    }
}

#[test]
fn isotropic_robustness_is_linear_in_fidelity() {
    for (d, f) in [(2usize, 0.9), (3, 0.6), (3, 0.34)] {
        let r = robustness_ppt(&isotropic::<f64>(d, f).unwrap()).unwrap();
        let expected = (d as f64 * f - 1.0).max(0.0);
        assert!((r.value - expected).abs() < 1e-6, "d={d} F={f}: {}", r.value);
    }
}

#[test]
fn relaxation_label() {
    assert_eq!(Relaxation::for_space(sp(2, 2)), Relaxation::PptExact);
    assert_eq!(Relaxation::for_space(sp(2, 3)), Relaxation::PptExact);
    assert_eq!(Relaxation::for_space(sp(3, 3)), Relaxation::PptLowerBound);
    assert_eq!(Relaxation::for_space(sp(2, 4)), Relaxation::PptLowerBound);
}

#[test]
fn zero_exactly_on_ppt_states() {
    let mut entangled = 0;
    for seed in 0..50u64 {
        let space = if seed % 2 == 0 { sp(2, 2) } else { sp(2, 3) };
        let sigma = noisy(&random_density(space, seed), 0.4 + 0.012 * seed as f64);
        let r = robustness_ppt(&sigma).unwrap();
        let ppt = sigma.min_pt_eigenvalue() >= -1e-9;
        assert_eq!(r.is_zero(), ppt, "seed {seed}: R={} ppt={ppt}", r.value);
        entangled += usize::from(!ppt);
    }
    assert!(entangled > 5 && entangled < 45, "{entangled}");
}

#[test]
fn bracketed_by_negativity_and_white_noise() {
    for seed in 0..12u64 {
        let space = [sp(2, 2), sp(2, 3), sp(3, 3)][seed as usize % 3];
        let sigma = random_density::<f64>(space, 100 + seed);
        let r = robustness_ppt(&sigma).unwrap().value;
        let negativity = (pt_trace_norm(&sigma) - 1.0) / 2.0;
        let white = relative_robustness(&sigma, &maximally_mixed(space)).unwrap().finite().unwrap();
        assert!(r >= negativity - 1e-7, "{r} < {negativity}");
        assert!(r <= white + 1e-7, "{r} > {white}");
    }
}

#[test]
fn optimal_noise_certifies_value() {
    for seed in 0..6u64 {
        let sigma = random_density::<f64>(sp(2, 3), 200 + seed);
        let r = robustness_ppt(&sigma).unwrap();
        let pi = &r.optimal_noise;
        assert!((pi.matrix().trace_re() - 1.0).abs() < 1e-9);
        assert!(eig_hermitian(pi.matrix()).unwrap().min() >= -1e-7);
        assert!(pi.min_pt_eigenvalue() >= -1e-7);
        assert!(r.washed_out(&sigma).min_pt_eigenvalue() >= -1e-7);
        // relative robustness against the optimal noise recovers the value
        let rel = relative_robustness(&sigma, pi).unwrap().finite().unwrap();
        assert!((rel - r.value).abs() < 1e-5, "{rel} vs {}", r.value);
    }
}

#[test]
fn relative_robustness_of_bell_state_against_white_noise() {
    let sigma = Density::from_parts(max_entangled::<f64>(2).projector(), sp(2, 2));
    let s = relative_robustness(&sigma, &maximally_mixed(sp(2, 2))).unwrap();
    assert!((s.finite().unwrap() - 2.0).abs() < 1e-10);
}

#[test]
fn relative_robustness_dominates_robustness() {
    for seed in 0..8u64 {
        let space = sp(2, 2);
        let sigma = random_density::<f64>(space, 300 + seed);
        let r = robustness_ppt(&sigma).unwrap().value;
        for pi in [random_product(space, seed), random_density(space, 400 + seed)] {
            if let Some(rel) = relative_robustness(&sigma, &pi).unwrap().finite() {
                assert!(rel >= r - 1e-7);
            }
        }
    }
}

#[test]
fn relative_robustness_with_singular_noise() {
    let space = sp(2, 2);
    let phi = Density::from_parts(max_entangled::<f64>(2).projector(), space);
    // |00><00| cannot wash out the Bell coherence
    let zero = Density::from_parts(
        kron(&Matrix::from_diag(&[1.0, 0.0]), &Matrix::from_diag(&[1.0, 0.0])),
        space,
    );
    assert_eq!(relative_robustness(&phi, &zero).unwrap(), RelativeRobustness::Unbounded);
    // rank-2 noise on |01>, |10> needs exactly one unit
    let anti = Density::from_parts(Matrix::from_diag(&[0.0, 0.5, 0.5, 0.0]), space);
    let s = relative_robustness(&phi, &anti).unwrap().finite().unwrap();
    assert!((s - 1.0).abs() < 1e-9, "{s}");
    let mixed = phi.mix(&anti, 1.0 / (1.0 + s)).unwrap();
    assert!(mixed.min_pt_eigenvalue().abs() < 1e-9);
    // a PPT target needs none
    assert_eq!(relative_robustness(&zero, &phi).unwrap(), RelativeRobustness::Finite(0.0));
}

#[test]
fn relative_robustness_rejects_mismatched_spaces() {
    let a = maximally_mixed::<f64>(sp(2, 2));
    let b = maximally_mixed::<f64>(sp(2, 3));
    assert!(relative_robustness(&a, &b).is_err());
}

#[test]
fn convex_along_mixtures() {
    let space = sp(2, 2);
    let a = random_density::<f64>(space, 11);
    let b = Density::from_parts(max_entangled::<f64>(2).projector(), space);
    let ra = robustness_ppt(&a).unwrap().value;
    let rb = robustness_ppt(&b).unwrap().value;
    for k in 1..5 {
        let l = k as f64 / 5.0;
        let r = robustness_ppt(&a.mix(&b, l).unwrap()).unwrap().value;
        assert!(r <= l * ra + (1.0 - l) * rb + 1e-7);
    }
}

#[test]
fn mixing_toward_optimal_noise_traces_a_line() {
    // R((sigma + t pi)/(1 + t)) = (R - t)/(1 + t) for t <= R along the optimal direction
    let sigma = Density::from_parts(max_entangled::<f64>(2).projector(), sp(2, 2));
    let r = robustness_ppt(&sigma).unwrap();
    for t in [0.25, 0.5, 0.75] {
        let mixed = sigma.mix(&r.optimal_noise, 1.0 / (1.0 + t)).unwrap();
        let rt = robustness_ppt(&mixed).unwrap().value;
        assert!((rt - (r.value - t) / (1.0 + t)).abs() < 1e-6);
    }
}

#[test]
fn witness_from_certificate() {
    for seed in 0..5u64 {
        let space = [sp(2, 2), sp(2, 3), sp(3, 3)][seed as usize % 3];
        let sigma = random_density::<f64>(space, 500 + seed);
        let r = robustness_ppt(&sigma).unwrap();
        if r.is_zero() {
            continue;
        }
        let w = witness_from_dual_with(&sigma, &r, 20, seed).unwrap();
        assert!((w.value_on_target + r.value).abs() < 1e-6);
        assert!(w.normalization_bound <= 1.0 + 1e-6);
        // PPT states stay within [0, 1]
        for pi in [maximally_mixed(space), random_product(space, seed), r.optimal_noise.clone()] {
            let v = witness_value(&w, &pi);
            assert!((-1e-6..=1.0 + 1e-6).contains(&v), "{v}");
        }
        assert!((witness_value(&w, &r.washed_out(&sigma))).abs() < 1e-5);
    }
}

#[test]
fn witness_of_ppt_state_is_trivial() {
    let sigma = maximally_mixed::<f64>(sp(2, 2));
    let r = robustness_ppt(&sigma).unwrap();
    assert!(r.is_zero());
    assert_eq!(r.optimal_noise, sigma);
    let w = witness_from_dual(&sigma, &r).unwrap();
    assert_eq!(w.operator.max_abs(), 0.0);
}

#[test]
fn hermitian_basis_is_orthogonal_and_complete() {
    let n = 3;
    let basis = hermitian_basis::<f64>(n);
    assert_eq!(basis.len(), n * n);
    for (i, a) in basis.iter().enumerate() {
        for (j, b) in basis.iter().enumerate() {
            let ip = trace_inner(a, b).unwrap();
            assert!(ip.im.abs() < 1e-15);
            if i != j {
                assert_eq!(ip.re, 0.0);
            }
        }
    }
    let y: Vec<f64> = (0..n * n).map(|k| k as f64 - 3.5).collect();
    let m = from_coordinates(n, &y);
    for (k, e) in basis.iter().enumerate() {
        let norm = trace_inner(e, e).unwrap().re;
        assert!((trace_inner(e, &m).unwrap().re / norm - y[k]).abs() < 1e-14);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn two_qubit_pure_states(t in 0.0f64..std::f64::consts::FRAC_PI_2) {
        let a = [t.cos(), t.sin()];
        let sigma = pure_from_schmidt(&a).unwrap();
        let r = robustness_ppt(&sigma).unwrap().value;
        prop_assert!((r - 2.0 * a[0] * a[1]).abs() < 1e-6);
    }
}
