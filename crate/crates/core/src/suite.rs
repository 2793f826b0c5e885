//! The full invariant suite for one parameter set.
//!
//! Checks are grouped; every group draws from its own seeded stream and
//! groups may run concurrently. Rows are assembled in declaration order, so
//! a fixed seed gives the same report regardless of the thread count.

use std::collections::BTreeMap;

use num_complex::Complex;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::algebra::ModelParams;
use crate::error::{Error, Result};
use crate::functional::{coefficients, permuted_residual, pole_residue, residual, v_split_check};
use crate::integral::{
    default_eps_ladder, h_function, h_recursion_spread, homogeneous_limit, residue_sum, EvalPath, HomogeneousPoint,
    Offsets,
};
use crate::interp::circle_nodes;
use crate::oracle::{asymptotic_coefficient, partition_function, zbar_fit_in_variable, zbar_leading_coefficient, zbar_value};
use crate::pde::{
    apply_d, extract_omegas, lbar_residual, loop_residue, omega_2l_apply, reduction_system_check, PoleSite,
};
use crate::poly::{interpolate_zbar, InterpolationOptions, PolyRep};
use crate::relations::{
    double_row_consistency, exchange_residuals, reflection_algebra_residual, reflection_equation_residual,
    unitarity_residual, weight_action_residuals, yang_baxter_residual,
};
use crate::report::VerificationReport;
use crate::sampling::{draw_lambda0, draw_point, stream_rng, DEFAULT_CLEARANCE};
use crate::scalar::{normalize, rel_diff};

type C = Complex<f64>;

/// Largest `L` at which polynomial-evaluation rows keep their fixed
/// tolerances.
const PINNED_EVAL_LEN: usize = 3;

/// Tolerances and sampling choices for [`verify`].
#[derive(Clone, Debug, PartialEq)]
pub struct SuiteConfig {
    pub seed: u64,
    pub interpolation: InterpolationOptions,
    /// Replacement tolerances keyed by row name.
    pub overrides: BTreeMap<String, f64>,
    /// Probe points per check, the supplied point included.
    pub probes: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            interpolation: InterpolationOptions::default(),
            overrides: BTreeMap::new(),
            probes: 5,
        }
    }
}

/// A model and the spectral point the suite is anchored at.
#[derive(Clone, Debug, PartialEq)]
pub struct SuiteInput {
    pub params: ModelParams<f64>,
    pub lambdas: Vec<C>,
    pub lambda0: Option<C>,
}

struct Ctx<'a> {
    params: &'a ModelParams<f64>,
    lambdas: &'a [C],
    lambda0: C,
    /// `(λ, λ_0)` pairs; the first is the supplied point.
    probes: Vec<(Vec<C>, C)>,
    poly: Option<PolyRep<f64>>,
}

impl Ctx<'_> {
    fn len(&self) -> usize {
        self.params.len()
    }

    /// Second spectral parameter for two-parameter relations.
    fn second(&self) -> C {
        if self.len() >= 2 {
            self.lambdas[1]
        } else {
            self.lambda0
        }
    }

    fn max_over_probes(&self, f: impl Fn(&[C], C) -> Result<f64>) -> Result<f64> {
        self.probes.iter().try_fold(0.0, |m: f64, (ls, l0)| Ok(m.max(f(ls, *l0)?)))
    }
}

type Group = fn(&Ctx, &mut ChaCha8Rng) -> Result<VerificationReport>;

const GROUPS: &[Group] = &[substrate, oracle_checks, functional_checks, integral_checks, pde_checks];

fn substrate(ctx: &Ctx, _: &mut ChaCha8Rng) -> Result<VerificationReport> {
    let (p, l1, l2) = (ctx.params, ctx.lambdas[0], ctx.second());
    let mut r = VerificationReport::new();
    r.push("yang_baxter", "Yang-Baxter equation", yang_baxter_residual(p.gamma, l1, l2), 1e-12);
    r.push("unitarity", "R(λ)R(-λ) = a(λ)a(-λ)", unitarity_residual(p.gamma, l1), 1e-12);
    r.push("reflection_equation", "reflection equation for K", reflection_equation_residual(p, l1, l2), 1e-12);
    r.push("reflection_algebra", "reflection algebra for the double-row monodromy", reflection_algebra_residual(p, l1, l2), 1e-12);
    r.push("double_row_blocks", "block form of τKτ̄", double_row_consistency(p, l1), 1e-12);
    r.extend(exchange_residuals(p, l1, l2)?);
    r.extend(weight_action_residuals(p, l1));
    Ok(r)
}

fn oracle_checks(ctx: &Ctx, _: &mut ChaCha8Rng) -> Result<VerificationReport> {
    let (p, ls) = (ctx.params, ctx.lambdas);
    let n = ctx.len();
    let mut r = VerificationReport::new();
    let z = partition_function(p, ls)?;
    if n == 1 {
        let want = p.gamma.sinh() * (p.h - p.mu[0]).sinh() * (ls[0] * 2.0).sinh();
        r.push("single_site_closed_form", "Z = sinh γ sinh(h-μ) sinh 2λ at L = 1", rel_diff(z, want), 1e-12);
    }
    if n >= 2 {
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                let mut swapped = ls.to_vec();
                swapped.swap(i, j);
                worst = worst.max(rel_diff(z, partition_function(p, &swapped)?));
            }
        }
        r.push("symmetry", "Z symmetric under transpositions", worst, 1e-12);
    }
    let fit = zbar_fit_in_variable(p, ls, 0, 2 * n + 3, 1.0)?;
    let peak = fit.iter().fold(0.0, |m: f64, c| m.max(c.norm()));
    let over = fit[2 * n + 1].norm().max(fit[2 * n + 2].norm());
    r.push("polynomial_degree", "Z̄ of degree 2L in x_1", normalize(over, peak), 1e-9);
    r.push_lower_bound("polynomial_degree_exact", "x_1^{2L} coefficient of Z̄ nonzero", normalize(fit[2 * n].norm(), peak), 1e-8);
    if n >= 2 {
        let scale = z.norm();
        let (mut first, mut second): (f64, f64) = (0.0, 0.0);
        for &m in &p.mu {
            let mut a = ls.to_vec();
            a[0] = m - p.gamma;
            a[1] = m;
            first = first.max(partition_function(p, &a)?.norm());
            a[1] = -m - p.gamma;
            second = second.max(partition_function(p, &a)?.norm());
        }
        r.push("special_zero_mu", "Z = 0 at λ_1 = μ_j - γ, λ_2 = μ_j", normalize(first, scale), 1e-10);
        r.push("special_zero_reflected", "Z = 0 at λ_1 = μ_j - γ, λ_2 = -μ_j - γ", normalize(second, scale), 1e-10);
    }
    Ok(r)
}

fn functional_checks(ctx: &Ctx, _: &mut ChaCha8Rng) -> Result<VerificationReport> {
    let p = ctx.params;
    let n = ctx.len();
    let mut r = VerificationReport::new();
    r.push("functional_equation", "functional equation for Z", ctx.max_over_probes(|ls, l0| residual(p, l0, ls))?, 1e-10);
    let permuted = ctx.max_over_probes(|ls, l0| {
        (1..=n).try_fold(0.0, |m: f64, k| {
            let mut roles: Vec<usize> = (0..=n).collect();
            roles.swap(0, k);
            Ok(m.max(permuted_residual(p, &roles, l0, ls)?))
        })
    })?;
    r.push("functional_equation_permuted", "λ_0 exchanged with each λ_k", permuted, 1e-10);

    let (ls, l0) = (ctx.lambdas, ctx.lambda0);
    let approach = [1e-1, 1e-2, 1e-3, 1e-4].iter().try_fold(0.0, |m: f64, &d| {
        let dir = (l0 - ls[0]) / (l0 - ls[0]).norm();
        Ok::<_, Error>(m.max(residual(p, ls[0] + dir * d, ls)?))
    })?;
    r.push("functional_equation_near_pole", "residual as λ_0 → λ_1", approach, 1e-8);

    // Residues of M_0 and M_1 at λ_0 = λ_1 by the trapezoid rule.
    let radius = 1e-3;
    let nodes = circle_nodes(32, 1.0, 0.1);
    let (mut res0, mut res1) = (C::new(0.0, 0.0), C::new(0.0, 0.0));
    for &dir in &nodes {
        let m = coefficients(p, ls[0] + dir * radius, ls)?;
        res0 += m.m0 * dir * radius;
        res1 += m.mi[0] * dir * radius;
    }
    res0 /= nodes.len() as f64;
    res1 /= nodes.len() as f64;
    let want = pole_residue(p, 0, ls)?;
    r.push("residue_pairing", "Res M_0 = -Res M_k at λ_0 = λ_k", rel_diff(res0, want).max(rel_diff(res1, -want)), 1e-9);

    if n >= 2 {
        r.extend(v_split_check(p, ls)?);
    }
    Ok(r)
}

fn integral_checks(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<VerificationReport> {
    let p = ctx.params;
    let n = ctx.len();
    let mut r = VerificationReport::new();
    let dual = ctx.max_over_probes(|ls, _| Ok(rel_diff(residue_sum(p, ls)?, partition_function(p, ls)?)))?;
    r.push("integral_representation", "residue sum equals Z", dual, 1e-9);
    if n < 2 {
        return Ok(r);
    }
    let spread = h_recursion_spread(p, rng, 5)?;
    r.push("h_recursion", "H / recursion right-hand side constant in w", spread, 1e-10);
    let mut w = ctx.lambdas.to_vec();
    w[1] = w[0];
    r.push("h_coincident_zero", "H = 0 when w_1 = w_2", h_function(p, &w)?.norm(), f64::MIN_POSITIVE);

    let point = HomogeneousPoint {
        gamma: p.gamma,
        h: p.h,
        len: n,
        lambda: ctx.lambdas[0],
        mu: p.mu[0],
    };
    let ladder = default_eps_ladder();
    let first = Offsets::roots_of_unity(n, 0.3);
    let oracle = homogeneous_limit(&point, &ladder, &first, EvalPath::Oracle)?;
    let residues = homogeneous_limit(&point, &ladder, &first, EvalPath::ResidueSum)?;
    let rotated = homogeneous_limit(&point, &ladder, &Offsets::roots_of_unity(n, 1.1), EvalPath::Oracle)?;
    r.push("homogeneous_dual_path", "homogeneous limit, oracle vs residue sum", rel_diff(oracle.value, residues.value), 1e-6);
    r.push("homogeneous_offsets", "homogeneous limit independent of offsets", rel_diff(oracle.value, rotated.value), 1e-7);
    Ok(r)
}

fn pde_checks(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<VerificationReport> {
    let mut r = VerificationReport::new();
    let Some(poly) = &ctx.poly else {
        return Ok(r);
    };
    let p = ctx.params;
    let n = ctx.len();
    let xs_of = |ls: &[C]| -> Vec<C> { ls.iter().map(|l| (l * 2.0).exp()).collect() };

    // Past L = 3 the monomial form of Z̄ cancels heavily at the probes
    // (condition numbers near 1e9 at L = 4), so rows that evaluate it get
    // a tolerance no tighter than the roundoff that cancellation leaves.
    let kappa = ctx.max_over_probes(|ls, _| {
        let xs = xs_of(ls);
        Ok(poly.eval_scale(&xs)? / poly.eval(&xs)?.norm())
    })?;
    let widen = n > PINNED_EVAL_LEN && kappa.is_finite();
    let eval_tol = |base: f64| if widen { base.max(16.0 * f64::EPSILON * kappa) } else { base };
    let anchor = |text: &str| if widen { format!("{text}, roundoff-limited tolerance") } else { text.to_string() };

    let round = ctx.max_over_probes(|ls, _| Ok(rel_diff(poly.eval(&xs_of(ls))?, zbar_value(p, ls)?)))?;
    r.push("interpolation_round_trip", anchor("interpolated Z̄ reproduces the oracle"), round, eval_tol(1e-9));
    r.push(
        "leading_coefficient",
        "top coefficient of Z̄ equals the q-factorial formula",
        rel_diff(zbar_leading_coefficient(p)?, asymptotic_coefficient(p)),
        1e-9,
    );

    let random = PolyRep::random(n, 2 * n, rng);
    // Unit-modulus points keep the Taylor terms of size O(1); at |x| ~ e^2
    // their cancellation alone eats most of the tolerance.
    let mut d_agree: f64 = 0.0;
    for _ in 0..ctx.probes.len() {
        let mut unit = || C::from_polar(1.0, rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI));
        let x0 = unit();
        let xs: Vec<C> = (0..n).map(|_| unit()).collect();
        for i in 0..n {
            let d = apply_d(&random, i, x0, &xs)?;
            d_agree = d_agree.max(rel_diff(d.substitution, d.differential));
        }
    }
    r.push("d_operator_realizations", "substitution and Taylor forms of D agree", d_agree, 1e-11);

    let lbar = ctx.max_over_probes(|ls, l0| lbar_residual(p, (l0 * 2.0).exp(), poly, ls))?;
    r.push("lbar_functional", anchor("rescaled operator annihilates Z̄"), lbar, eval_tol(1e-9));
    let omegas = ctx.max_over_probes(|ls, _| Ok(extract_omegas(p, poly, ls)?.omegas.into_iter().fold(0.0, f64::max)))?;
    r.push("omega_k", anchor("every Ω_k annihilates Z̄"), omegas, eval_tol(1e-8));
    let over = extract_omegas(p, &random, ctx.lambdas)?.over_degree;
    r.push("lbar_pole_clearing", "cleared operator has x_0-degree at most 2L", over, 1e-9);

    let omega_2l = ctx.max_over_probes(|ls, _| omega_2l_apply(p, poly, ls))?;
    r.push("omega_2l", anchor("closed-form Ω_2L annihilates Z̄"), omega_2l, eval_tol(1e-9));
    let mut weakest = f64::INFINITY;
    for _ in 0..25 {
        weakest = weakest.min(omega_2l_apply(p, &PolyRep::random(n, 2 * n, rng), ctx.lambdas)?);
    }
    r.push_lower_bound("omega_2l_nonvacuity", "Ω_2L does not annihilate random polynomials", weakest, 1e-2);

    let mut first: f64 = 0.0;
    let mut chain: f64 = 0.0;
    for (ls, _) in &ctx.probes {
        let rep = reduction_system_check(p, poly, ls)?;
        first = first.max(rep.get("reduction_first_row").map_or(f64::NAN, |row| row.residual));
        chain = chain.max(rep.get("reduction_chain_rows").map_or(f64::NAN, |row| row.residual));
    }
    r.push("reduction_first_row", anchor("first-order system, leading row"), first, eval_tol(1e-9));
    r.push("reduction_chain_rows", "first-order system, derivative chain", chain, 1e-15);

    let ls = ctx.lambdas;
    r.push("pole_two_lambda", "no residue at a(2λ_0) = 0", loop_residue(p, &random, ls, PoleSite::TwoLambda, 1e-3)?, 1e-6);
    let lam = (0..n).try_fold(0.0, |m: f64, i| Ok::<_, Error>(m.max(loop_residue(p, &random, ls, PoleSite::Lambda(i), 1e-3)?)))?;
    r.push("pole_lambda", "no residue at λ_0 = λ_i", lam, 1e-6);
    let refl = (0..n).try_fold(f64::INFINITY, |m: f64, i| {
        Ok::<_, Error>(m.min(loop_residue(p, &random, ls, PoleSite::Reflected(i), 1e-3)?))
    })?;
    r.push_lower_bound("pole_reflected", "residue at a(λ_0 + λ_i) = 0 survives", refl, 1e-2);
    Ok(r)
}

/// Runs every applicable check at `input`. Interpolation-based checks are
/// skipped when `L` exceeds the interpolation budget.
///
/// Runs on the current rayon pool; wrap in `ThreadPool::install` to fix
/// the degree of parallelism.
pub fn verify(input: &SuiteInput, cfg: &SuiteConfig) -> Result<VerificationReport> {
    let p = &input.params;
    p.check_point(&input.lambdas)?;
    let mut rng = stream_rng(cfg.seed, 0);
    let lambda0 = match input.lambda0 {
        Some(l0) => l0,
        None => draw_lambda0(&mut rng, p, &input.lambdas, DEFAULT_CLEARANCE)?,
    };
    let mut probes = vec![(input.lambdas.clone(), lambda0)];
    for _ in 1..cfg.probes.max(1) {
        probes.push(draw_point(&mut rng, p, DEFAULT_CLEARANCE)?);
    }
    let poly = if p.len() <= cfg.interpolation.max_len {
        Some(interpolate_zbar(p, &cfg.interpolation)?)
    } else {
        None
    };
    let ctx = Ctx {
        params: p,
        lambdas: &input.lambdas,
        lambda0,
        probes,
        poly,
    };
    let parts: Vec<VerificationReport> = GROUPS
        .par_iter()
        .enumerate()
        .map(|(k, group)| group(&ctx, &mut stream_rng(cfg.seed, k as u64 + 1)))
        .collect::<Result<_>>()?;
    let mut report = VerificationReport::new();
    for part in parts {
        report.extend(part);
    }
    report.apply_overrides(&cfg.overrides);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cx;

    fn input(l: usize) -> SuiteInput {
        let mu = (0..l).map(|j| cx(0.29 - 0.31 * j as f64, 0.05 + 0.09 * j as f64)).collect();
        SuiteInput {
            params: ModelParams::new(cx(0.31, 0.11), cx(0.83, -0.07), mu).unwrap(),
            lambdas: (0..l).map(|j| cx(0.57 - 0.38 * j as f64, -0.23 + 0.3 * j as f64)).collect(),
            lambda0: None,
        }
    }

    #[test]
    fn suite_passes_at_small_l() {
        for l in 1..=2 {
            let rep = verify(&input(l), &SuiteConfig::default()).unwrap();
            let failed: Vec<_> = rep.rows().iter().filter(|r| !r.pass).collect();
            assert!(failed.is_empty(), "L={l}: {failed:#?}");
        }
    }

    #[test]
    fn overrides_can_fail_a_row() {
        let cfg = SuiteConfig {
            overrides: [("functional_equation".to_string(), 1e-30)].into(),
            ..Default::default()
        };
        let rep = verify(&input(1), &cfg).unwrap();
        assert!(!rep.get("functional_equation").unwrap().pass);
    }

    #[test]
    fn budget_skips_interpolation_rows() {
        let cfg = SuiteConfig {
            interpolation: InterpolationOptions { max_len: 1, ..Default::default() },
            ..Default::default()
        };
        let rep = verify(&input(2), &cfg).unwrap();
        assert!(rep.get("omega_2l").is_none());
        assert!(rep.get("integral_representation").is_some());
    }
}
