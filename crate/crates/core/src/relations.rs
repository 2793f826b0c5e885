//! Residual checkers for the algebraic identities behind the model: the
//! Yang-Baxter and reflection equations, unitarity, the reflection algebra,
//! the exchange relations used to derive the functional equation, and the
//! vacuum actions of the monodromy entries.
//!
//! Every checker evaluates both sides as explicit matrices and returns the
//! normalized max-entry residual from [`relation_residual`].

use num_complex::Complex;

use crate::algebra::{
    double_row, double_row_blocks, guard, k_matrix, monodromy, r_matrix, r_matrix_gamma, BlockSet, ModelParams, Row,
};
use crate::error::Result;
use crate::linalg::{kron_unchecked, relation_residual, Matrix, Vector};
use crate::report::VerificationReport;
use crate::scalar::{normalize, real, Real};

/// Embeds a two-factor operator acting on tensor slots `(i, j)` of an
/// `n`-fold product of `C^2`, slot 0 most significant.
pub fn embed_two_site<T: Real>(op: &Matrix<T>, i: usize, j: usize, n: usize) -> Matrix<T> {
    assert!(i != j && i < n && j < n, "distinct slots inside the product");
    let dim = 1 << n;
    let bit = |s: usize, slot: usize| (s >> (n - 1 - slot)) & 1;
    let mut out = Matrix::zeros(dim, dim);
    for row in 0..dim {
        for col in 0..dim {
            // spectator slots must agree
            let mask = !((1 << (n - 1 - i)) | (1 << (n - 1 - j))) & (dim - 1);
            if row & mask != col & mask {
                continue;
            }
            let r = 2 * bit(row, i) + bit(row, j);
            let c = 2 * bit(col, i) + bit(col, j);
            out[(row, col)] = op[(r, c)];
        }
    }
    out
}

/// Full single-row monodromy on `V_0 ⊗ V_Q` built as an ordered product of
/// embedded R-matrices, independent of the block accumulation in
/// [`monodromy`].
pub fn monodromy_full<T: Real>(params: &ModelParams<T>, lambda: Complex<T>, row: Row) -> Matrix<T> {
    let n = params.len() + 1;
    let mut acc = Matrix::identity(1 << n);
    for (j, &mu) in params.mu.iter().enumerate() {
        let arg = match row {
            Row::Plain => lambda - mu,
            Row::Barred => lambda + mu,
        };
        let r = embed_two_site(&r_matrix(params, arg), 0, j + 1, n);
        acc = match row {
            Row::Plain => &r * &acc,
            Row::Barred => &acc * &r,
        };
    }
    acc
}

/// `τ(λ)·(K(λ) ⊗ id)·τ̄(λ)` as a full matrix.
pub fn double_row_full<T: Real>(params: &ModelParams<T>, lambda: Complex<T>) -> Matrix<T> {
    let k = kron_unchecked(&k_matrix(params, lambda), &Matrix::identity(params.dim()));
    let t = monodromy_full(params, lambda, Row::Plain);
    let tb = monodromy_full(params, lambda, Row::Barred);
    &(&t * &k) * &tb
}

/// Places an auxiliary-space block operator in slot 1 or 2 of
/// `V_1 ⊗ V_2 ⊗ V_Q`.
fn lift_aux<T: Real>(blocks: &BlockSet<T>, slot: usize) -> Matrix<T> {
    let n = blocks.a.rows();
    let mut out = Matrix::zeros(4 * n, 4 * n);
    for a1 in 0..2 {
        for a2 in 0..2 {
            for b1 in 0..2 {
                for b2 in 0..2 {
                    let blk = match slot {
                        1 if a2 == b2 => blocks.block(a1, b1),
                        2 if a1 == b1 => blocks.block(a2, b2),
                        _ => continue,
                    };
                    let (r0, c0) = ((2 * a1 + a2) * n, (2 * b1 + b2) * n);
                    for i in 0..n {
                        for j in 0..n {
                            out[(r0 + i, c0 + j)] = blk[(i, j)];
                        }
                    }
                }
            }
        }
    }
    out
}

fn r_aux<T: Real>(params: &ModelParams<T>, lambda: Complex<T>) -> Matrix<T> {
    kron_unchecked(&r_matrix(params, lambda), &Matrix::identity(params.dim()))
}

/// `R12(λ1-λ2) R13(λ1) R23(λ2) = R23(λ2) R13(λ1) R12(λ1-λ2)`.
pub fn yang_baxter_residual<T: Real>(gamma: Complex<T>, l1: Complex<T>, l2: Complex<T>) -> T {
    let r12 = embed_two_site(&r_matrix_gamma(gamma, l1 - l2), 0, 1, 3);
    let r13 = embed_two_site(&r_matrix_gamma(gamma, l1), 0, 2, 3);
    let r23 = embed_two_site(&r_matrix_gamma(gamma, l2), 1, 2, 3);
    let lhs = &(&r12 * &r13) * &r23;
    let rhs = &(&r23 * &r13) * &r12;
    relation_residual(&[&lhs], &[&rhs])
}

/// `R(λ) R(-λ) = a(λ) a(-λ) id`.
pub fn unitarity_residual<T: Real>(gamma: Complex<T>, lambda: Complex<T>) -> T {
    let prod = &r_matrix_gamma(gamma, lambda) * &r_matrix_gamma(gamma, -lambda);
    let want = Matrix::identity(4).scale((lambda + gamma).sinh() * (gamma - lambda).sinh());
    relation_residual(&[&prod], &[&want])
}

/// Reflection equation for the diagonal K-matrix on `V_1 ⊗ V_2`.
pub fn reflection_equation_residual<T: Real>(params: &ModelParams<T>, l1: Complex<T>, l2: Complex<T>) -> T {
    let i2 = Matrix::identity(2);
    let r_minus = r_matrix(params, l1 - l2);
    let r_plus = r_matrix(params, l1 + l2);
    let k1 = kron_unchecked(&k_matrix(params, l1), &i2);
    let k2 = kron_unchecked(&i2, &k_matrix(params, l2));
    let lhs = &(&(&(&r_minus * &k1) * &r_plus) * &k2);
    let rhs = &(&(&(&k2 * &r_plus) * &k1) * &r_minus);
    relation_residual(&[lhs], &[rhs])
}

/// Reflection algebra for the double-row monodromy on `V_1 ⊗ V_2 ⊗ V_Q`.
pub fn reflection_algebra_residual<T: Real>(params: &ModelParams<T>, l1: Complex<T>, l2: Complex<T>) -> T {
    let t1 = lift_aux(&double_row_blocks(params, l1), 1);
    let t2 = lift_aux(&double_row_blocks(params, l2), 2);
    let r_minus = r_aux(params, l1 - l2);
    let r_plus = r_aux(params, l1 + l2);
    let lhs = &(&(&r_minus * &t1) * &r_plus) * &t2;
    let rhs = &(&(&t2 * &r_plus) * &t1) * &r_minus;
    relation_residual(&[&lhs], &[&rhs])
}

/// Residual of the block-built double-row monodromy against the full
/// ordered product `τ K τ̄`.
pub fn double_row_consistency<T: Real>(params: &ModelParams<T>, lambda: Complex<T>) -> T {
    let blocks = double_row_blocks(params, lambda).assemble();
    let full = double_row_full(params, lambda);
    relation_residual(&[&blocks], &[&full])
}

/// The five exchange relations at `(λ1, λ2)` plus the mixed
/// `τ̄₂ R(2λ) τ₁` intertwining relation from which two of them are read off.
pub fn exchange_residuals<T: Real>(
    params: &ModelParams<T>,
    l1: Complex<T>,
    l2: Complex<T>,
) -> Result<VerificationReport> {
    let two = real::<T>(2.0);
    let p = params;
    let c = p.c();
    let ctx = "exchange_residuals";
    let b21 = guard(ctx, "b(λ2-λ1) = 0", p.b(l2 - l1))?;
    let a_sum = guard(ctx, "a(λ2+λ1) = 0", p.a(l2 + l1))?;
    let b_2l1g = guard(ctx, "b(2λ1+γ) = 0", p.b(l1 * two + p.gamma))?;
    let a_2l2 = guard(ctx, "a(2λ2) = 0", p.a(l2 * two))?;
    let b12 = -b21;
    let b_sum_g = guard(ctx, "b(λ1+λ2+γ) = 0", p.b(l1 + l2 + p.gamma))?;

    let m1 = double_row(p, l1)?;
    let m2 = double_row(p, l2)?;
    let (a1, b1, dt1) = (&m1.blocks.a, &m1.blocks.b, &m1.dtilde);
    let (a2, b2, dt2) = (&m2.blocks.a, &m2.blocks.b, &m2.dtilde);
    let r_2l2 = p.b(l2 * two) / a_2l2;
    let a_2l1g = p.a(l1 * two + p.gamma);

    let mut report = VerificationReport::new();

    // A(λ1) B(λ2)
    let lhs = a1 * b2;
    let t1 = (b2 * a1).scale(p.a(l2 - l1) / b21 * p.b(l2 + l1) / a_sum);
    let t2 = (b1 * a2).scale(-(r_2l2 * c / b21));
    let t3 = (b1 * dt2).scale(-(c / a_sum));
    report.push(
        "exchange_ab",
        "reflection algebra exchange A·B",
        relation_residual(&[&lhs], &[&t1, &t2, &t3]),
        1e-12,
    );

    // D̃(λ1) B(λ2)
    let lhs = dt1 * b2;
    let t1 = (b2 * dt1).scale(p.a(l2 + l1 + p.gamma) / b_sum_g * p.a(l1 - l2) / b12);
    let t2 = (b1 * dt2).scale(-(a_2l1g / b_2l1g * c / b12));
    let t3 = (b1 * a2).scale(r_2l2 * a_2l1g / b_2l1g * c / a_sum);
    report.push(
        "exchange_dtilde_b",
        "reflection algebra exchange D̃·B",
        relation_residual(&[&lhs], &[&t1, &t2, &t3]),
        1e-12,
    );

    // B(λ1) B(λ2) = B(λ2) B(λ1)
    report.push(
        "exchange_bb",
        "reflection algebra exchange B·B",
        relation_residual(&[&(b1 * b2)], &[&(b2 * b1)]),
        1e-12,
    );

    // Mixed relations at a single spectral parameter λ1.
    let lam = l1;
    let a_2l = guard(ctx, "a(2λ1) = 0", p.a(lam * two))?;
    let t = monodromy(p, lam, Row::Plain);
    let tb = monodromy(p, lam, Row::Barred);
    let ratio = c / a_2l;

    let tau1 = lift_aux(&t, 1);
    let taubar2 = lift_aux(&tb, 2);
    let r2l = r_aux(p, lam * two);
    let lhs = &(&taubar2 * &r2l) * &tau1;
    let rhs = &(&tau1 * &r2l) * &taubar2;
    report.push(
        "intertwining_tau_taubar",
        "Yang-Baxter algebra at λ1 = -λ2",
        relation_residual(&[&lhs], &[&rhs]),
        1e-12,
    );

    // C B̄ = B̄ C + c/a(2λ) (Ā A - D D̄)
    let lhs = &t.c * &tb.b;
    let r1 = &tb.b * &t.c;
    let r2 = (&tb.a * &t.a).scale(ratio);
    let r3 = (&t.d * &tb.d).scale(-ratio);
    report.push(
        "commutation_c_bbar",
        "C·B̄ commutation",
        relation_residual(&[&lhs], &[&r1, &r2, &r3]),
        1e-12,
    );

    // B C̄ = C̄ B + c/a(2λ) (D̄ D - A Ā)
    let lhs = &t.b * &tb.c;
    let r1 = &tb.c * &t.b;
    let r2 = (&tb.d * &t.d).scale(ratio);
    let r3 = (&t.a * &tb.a).scale(-ratio);
    report.push(
        "commutation_b_cbar",
        "B·C̄ commutation",
        relation_residual(&[&lhs], &[&r1, &r2, &r3]),
        1e-12,
    );

    Ok(report)
}

fn vector_residual<T: Real>(got: &Vector<T>, want: &Vector<T>) -> T {
    let diff = got
        .entries()
        .iter()
        .zip(want.entries())
        .fold(T::zero(), |m, (&a, &b)| m.max((a - b).norm()));
    normalize(diff, got.max_abs() + want.max_abs())
}

/// Vacuum actions of the single-row monodromy entries on `|0>` and `<0̄|`.
pub fn weight_action_residuals<T: Real>(params: &ModelParams<T>, lambda: Complex<T>) -> VerificationReport {
    let p = params;
    let n = p.len();
    let prod = |f: &dyn Fn(Complex<T>) -> Complex<T>| -> Complex<T> {
        p.mu.iter().fold(Complex::new(T::one(), T::zero()), |acc, &m| acc * f(m))
    };
    let a_minus = prod(&|m| p.a(lambda - m));
    let a_plus = prod(&|m| p.a(lambda + m));
    let b_minus = prod(&|m| p.b(lambda - m));
    let b_plus = prod(&|m| p.b(lambda + m));
    let zero = Complex::new(T::zero(), T::zero());

    let t = monodromy(p, lambda, Row::Plain);
    let tb = monodromy(p, lambda, Row::Barred);
    let ket = crate::algebra::vacuum::<T>(n);
    let bra = crate::algebra::dual_vacuum::<T>(n);

    let mut report = VerificationReport::new();
    let kets: [(&str, &Matrix<T>, Complex<T>); 6] = [
        ("A_on_vacuum", &t.a, a_minus),
        ("Abar_on_vacuum", &tb.a, a_plus),
        ("D_on_vacuum", &t.d, b_minus),
        ("Dbar_on_vacuum", &tb.d, b_plus),
        ("C_on_vacuum", &t.c, zero),
        ("Cbar_on_vacuum", &tb.c, zero),
    ];
    for (name, op, eig) in kets {
        let got = op.matvec(&ket).expect("square operator");
        report.push(name, "highest-weight vacuum action", vector_residual(&got, &ket.scale(eig)), 1e-13);
    }
    let bras: [(&str, &Matrix<T>, Complex<T>); 6] = [
        ("dual_vacuum_A", &t.a, b_minus),
        ("dual_vacuum_Abar", &tb.a, b_plus),
        ("dual_vacuum_D", &t.d, a_minus),
        ("dual_vacuum_Dbar", &tb.d, a_plus),
        ("dual_vacuum_C", &t.c, zero),
        ("dual_vacuum_Cbar", &tb.c, zero),
    ];
    for (name, op, eig) in bras {
        let got = op.vecmat(&bra).expect("square operator");
        report.push(name, "lowest-weight dual vacuum action", vector_residual(&got, &bra.scale(eig)), 1e-13);
    }
    report
}
