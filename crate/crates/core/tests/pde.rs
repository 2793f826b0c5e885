mod common;

use common::c;
use sixvertex::oracle::{asymptotic_coefficient, zbar_leading_coefficient, zbar_value};
use sixvertex::pde::{
    apply_d, extract_omegas, lbar_r_expansion, lbar_residual, loop_residue, omega_2l_apply, reduction_system_check,
    PoleSite, ReductionSystem,
};
use sixvertex::poly::{interpolate_zbar, InterpolationOptions};
use sixvertex::sampling::{draw_point, stream_rng, DEFAULT_CLEARANCE};
use sixvertex::scalar::rel_diff;
use sixvertex::{Poly, C64};

fn xs_of(ls: &[C64]) -> Vec<C64> {
    ls.iter().map(|l| (l * 2.0).exp()).collect()
}

fn zbar(d: &sixvertex::sampling::Draw<f64>) -> Poly {
    interpolate_zbar(&d.params, &InterpolationOptions::default()).unwrap()
}

#[test]
fn single_site_coefficients() {
    let d = &common::draws(401, 1, 1)[0];
    let p = &d.params;
    let k = p.c() * (p.h - p.mu[0]).sinh();
    let poly = zbar(d);
    let want = [-k * 0.5, c(0.0, 0.0), k * 0.5];
    for (got, want) in poly.coeffs().iter().zip(want) {
        assert!((got - want).norm() <= 1e-13 * k.norm());
    }
}

#[test]
fn interpolation_round_trip_and_top_corner() {
    for len in 1..=3 {
        let d = &common::draws(403, len, 1)[0];
        let poly = zbar(d);
        let mut rng = stream_rng(405, len as u64);
        for _ in 0..10 {
            let (ls, _) = draw_point(&mut rng, &d.params, DEFAULT_CLEARANCE).unwrap();
            let r = rel_diff(poly.eval(&xs_of(&ls)).unwrap(), zbar_value(&d.params, &ls).unwrap());
            assert!(r < 1e-9, "L={len}: {r:e}");
        }
        assert!(rel_diff(zbar_leading_coefficient(&d.params).unwrap(), asymptotic_coefficient(&d.params)) < 1e-9);
    }
}

#[test]
fn d_operator_special_cases() {
    let mut rng = stream_rng(407, 0);
    let poly = Poly::random(2, 4, &mut rng);
    let xs = [c(0.6, 0.8), c(-0.28, 0.96)];
    let same = apply_d(&poly, 1, xs[1], &xs).unwrap();
    assert_eq!(same.substitution, poly.eval(&xs).unwrap());
    assert!(rel_diff(same.differential, same.substitution) < 1e-15);

    let k = c(1.7, -0.4);
    let mut coeffs = vec![c(0.0, 0.0); 25];
    coeffs[0] = k;
    let constant = Poly::new(2, 4, coeffs).unwrap();
    let d = apply_d(&constant, 0, c(0.3, -0.2), &xs).unwrap();
    assert_eq!((d.substitution, d.differential), (k, k));
}

#[test]
fn d_operator_realizations_agree() {
    let mut rng = stream_rng(409, 0);
    for len in 1..=3 {
        let poly = Poly::random(len, 2 * len, &mut rng);
        for k in 0..5 {
            let unit = |t: f64| C64::from_polar(1.0, t);
            let x0 = unit(0.7 * k as f64 + 0.2);
            let xs: Vec<C64> = (0..len).map(|i| unit(1.3 * i as f64 - 0.4 * k as f64)).collect();
            for var in 0..len {
                let d = apply_d(&poly, var, x0, &xs).unwrap();
                assert!(rel_diff(d.substitution, d.differential) < 1e-11);
            }
        }
    }
}

#[test]
fn rescaled_operator_annihilates_zbar() {
    for (len, tol) in [(1, 1e-11), (2, 1e-9), (3, 1e-9)] {
        for d in common::draws(411, len, 2) {
            let poly = zbar(&d);
            let x0 = (d.lambda0 * 2.0).exp();
            let r = lbar_residual(&d.params, x0, &poly, &d.lambdas).unwrap();
            assert!(r < tol, "L={len}: {r:e}");
            let doubled = poly.scale(c(2.0, 0.0));
            assert!((lbar_residual(&d.params, x0, &doubled, &d.lambdas).unwrap() - r).abs() < 1e-12);
        }
    }
}

#[test]
fn every_omega_annihilates_zbar() {
    for (len, tol) in [(1, 1e-9), (2, 1e-9), (3, 1e-8)] {
        for d in common::draws(413, len, 2) {
            let om = extract_omegas(&d.params, &zbar(&d), &d.lambdas).unwrap();
            assert_eq!(om.omegas.len(), 2 * len + 1);
            for (k, r) in om.omegas.iter().enumerate() {
                assert!(*r < tol, "L={len}, k={k}: {r:e}");
            }
        }
    }
}

#[test]
fn omega_coefficients_are_linear() {
    let d = &common::draws(415, 2, 1)[0];
    let mut rng = stream_rng(417, 0);
    let poly = Poly::random(2, 4, &mut rng);
    let one = lbar_r_expansion(&d.params, &poly, &d.lambdas, 1.3).unwrap();
    let two = lbar_r_expansion(&d.params, &poly.scale(c(2.0, 0.0)), &d.lambdas, 1.3).unwrap();
    for (a, b) in one.coeffs.iter().zip(&two.coeffs) {
        assert!((b - a * 2.0).norm() <= 1e-12 * one.scale);
    }
}

#[test]
fn generic_polynomial_has_bounded_x0_degree() {
    let mut rng = stream_rng(419, 0);
    for len in 1..=3 {
        let d = &common::draws(421, len, 1)[0];
        let poly = Poly::random(len, 2 * len, &mut rng);
        let om = extract_omegas(&d.params, &poly, &d.lambdas).unwrap();
        assert!(om.over_degree < 1e-9, "L={len}");
        assert!(om.omegas.iter().any(|&r| r > 1e-3));
    }
}

#[test]
fn top_order_equation() {
    for (len, tol) in [(1, 1e-11), (2, 1e-9), (3, 1e-9)] {
        for d in common::draws(423, len, 2) {
            let r = omega_2l_apply(&d.params, &zbar(&d), &d.lambdas).unwrap();
            assert!(r < tol, "L={len}: {r:e}");
        }
    }
}

#[test]
fn top_order_equation_rejects_random_polynomials() {
    let mut rng = stream_rng(425, 0);
    for len in 1..=3 {
        let d = &common::draws(427, len, 1)[0];
        for _ in 0..5 {
            let poly = Poly::random(len, 2 * len, &mut rng);
            assert!(omega_2l_apply(&d.params, &poly, &d.lambdas).unwrap() > 1e-2);
        }
    }
}

#[test]
fn first_order_reduction() {
    for len in 1..=3 {
        for d in common::draws(429, len, 2) {
            let poly = zbar(&d);
            let sys = ReductionSystem::assemble(&d.params, &xs_of(&d.lambdas)).unwrap();
            assert_eq!(sys.dim(), (2 * len - 1) * len + 1);
            assert_eq!(sys.state(&poly).len(), sys.dim());
            let report = reduction_system_check(&d.params, &poly, &d.lambdas).unwrap();
            assert_eq!(report.get("reduction_chain_rows").unwrap().residual, 0.0);
            assert!(report.get("reduction_first_row").unwrap().residual < 1e-9);
        }
    }
}

#[test]
fn pole_structure_of_rescaled_operator() {
    let mut rng = stream_rng(431, 0);
    let d = &common::draws(433, 2, 1)[0];
    let poly = Poly::random(2, 4, &mut rng);
    assert!(loop_residue(&d.params, &poly, &d.lambdas, PoleSite::TwoLambda, 1e-3).unwrap() < 1e-6);
    for i in 0..2 {
        assert!(loop_residue(&d.params, &poly, &d.lambdas, PoleSite::Lambda(i), 1e-3).unwrap() < 1e-6);
        assert!(loop_residue(&d.params, &poly, &d.lambdas, PoleSite::Reflected(i), 1e-3).unwrap() > 1e-2);
    }
}
