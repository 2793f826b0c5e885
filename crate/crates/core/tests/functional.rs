mod common;

use itertools::Itertools;
use sixvertex::functional::{coefficients, permuted_residual, pole_residue, residual, terms, v_function, v_split_check};
use sixvertex::oracle::partition_function;
use sixvertex::scalar::rel_diff;
use sixvertex::C64;

#[test]
fn single_site_ratio_of_coefficients() {
    // Up to a common factor the equation is sinh(2λ_0) Z(λ_1) - sinh(2λ_1) Z(λ_0) = 0.
    for d in common::draws(201, 1, 10) {
        let (l0, l1) = (d.lambda0, d.lambdas[0]);
        let m = coefficients(&d.params, l0, &d.lambdas).unwrap();
        let want = -(l0 * 2.0).sinh() / (l1 * 2.0).sinh();
        assert!(rel_diff(m.m0 / m.mi[0], want) < 1e-12);
        assert!(residual(&d.params, l0, &d.lambdas).unwrap() < 1e-12);
    }
}

#[test]
fn equation_holds_at_random_points() {
    for (len, tol) in [(1, 1e-12), (2, 1e-10), (3, 1e-10), (4, 1e-10)] {
        for d in common::draws(203, len, 10) {
            let r = residual(&d.params, d.lambda0, &d.lambdas).unwrap();
            assert!(r < tol, "L={len}: {r:e}");
        }
    }
}

#[test]
fn opposite_residues_at_coincidence() {
    for d in common::draws(207, 3, 3) {
        for k in 0..3 {
            let delta = C64::new(1e-7, 5e-8);
            let m = coefficients(&d.params, d.lambdas[k] + delta, &d.lambdas).unwrap();
            let res = pole_residue(&d.params, k, &d.lambdas).unwrap();
            assert!(rel_diff(m.m0 * delta, res) < 1e-5);
            assert!(rel_diff(m.mi[k] * delta, -res) < 1e-5);
        }
    }
}

#[test]
fn special_zero_leaves_vanishing_terms() {
    let d = &common::draws(211, 2, 1)[0];
    let p = &d.params;
    let scale: f64 = terms(p, d.lambda0, &d.lambdas).unwrap().iter().map(|t| t.norm()).sum();
    let special = [p.mu[0] - p.gamma, p.mu[0]];
    assert!(partition_function(p, &special).unwrap().norm() < 1e-12 * scale);
    let t = terms(p, d.lambda0, &special).unwrap();
    let total: C64 = t.iter().sum();
    assert!(total.norm() < 1e-12 * scale);
}

#[test]
fn identity_roles_reproduce_residual() {
    let d = &common::draws(213, 3, 1)[0];
    let base = residual(&d.params, d.lambda0, &d.lambdas).unwrap();
    assert_eq!(permuted_residual(&d.params, &[0, 1, 2, 3], d.lambda0, &d.lambdas).unwrap(), base);
}

#[test]
fn permuted_family() {
    for d in common::draws(217, 2, 5) {
        assert!(permuted_residual(&d.params, &[1, 0, 2], d.lambda0, &d.lambdas).unwrap() < 1e-10);
    }
    for d in common::draws(219, 3, 3) {
        for roles in (0..4).permutations(4) {
            let r = permuted_residual(&d.params, &roles, d.lambda0, &d.lambdas).unwrap();
            assert!(r < 1e-10, "{roles:?}: {r:e}");
        }
    }
}

#[test]
fn rejects_non_permutation_roles() {
    let d = &common::draws(223, 2, 1)[0];
    assert!(permuted_residual(&d.params, &[0, 0, 2], d.lambda0, &d.lambdas).is_err());
    assert!(permuted_residual(&d.params, &[0, 1], d.lambda0, &d.lambdas).is_err());
}

#[test]
fn rejects_coincident_arguments() {
    let d = &common::draws(227, 2, 1)[0];
    let same = [d.lambdas[0], d.lambdas[0]];
    let err = coefficients(&d.params, d.lambda0, &same).unwrap_err();
    assert!(matches!(err, sixvertex::Error::Coincident { i: 1, j: 2 }), "{err}");
}

#[test]
fn z_v_split() {
    for (len, tol) in [(2, 1e-10), (3, 1e-9)] {
        for d in common::draws(229, len, 5) {
            let report = v_split_check(&d.params, &d.lambdas).unwrap();
            let r = report.get("v_split").unwrap().residual;
            assert!(r < tol, "L={len}: {r:e}");
        }
    }
}

#[test]
fn v_is_symmetric() {
    for d in common::draws(233, 4, 3) {
        let rest = &d.lambdas[1..];
        let v = v_function(&d.params, rest).unwrap();
        for perm in rest.iter().copied().permutations(3) {
            assert!(rel_diff(v, v_function(&d.params, &perm).unwrap()) < 1e-12);
        }
    }
}
