//! Global and K-way partial transposition of a state operator.
//!
//! The global partial transpose on qubit `p` exchanges the `p`-th bits of the
//! row and column index of every element. The K-way partial transpose does
//! the same, but only for elements whose row and column indices differ in
//! exactly `K` qubits, one of which is `p`; all other elements are copied.

use crate::error::{domain, Result};
use crate::matrix::CMatrix;
use crate::qstate::{qubit_mask, DensityOperator, OperatorKind};

fn check_state_operator(rho: &DensityOperator, p: usize) -> Result<()> {
    if rho.kind != OperatorKind::State {
        return domain("partial transposes are taken of the state operator");
    }
    if p == 0 || p > rho.n {
        return domain(format!("qubit {p} out of range 1..={}", rho.n));
    }
    Ok(())
}

/// Exchanges bit `mask` between `i` and `j`.
#[inline]
fn swap_bit(i: usize, j: usize, mask: usize) -> (usize, usize) {
    if (i ^ j) & mask == 0 {
        (i, j)
    } else {
        (i ^ mask, j ^ mask)
    }
}

fn transpose_where(rho: &DensityOperator, p: usize, pred: impl Fn(usize, usize) -> bool) -> CMatrix {
    let mask = qubit_mask(rho.n, p);
    let src = &rho.mat;
    CMatrix::from_fn(src.dim(), |i, j| {
        if pred(i, j) {
            let (a, b) = swap_bit(i, j, mask);
            src[(a, b)]
        } else {
            src[(i, j)]
        }
    })
}

/// Global partial transpose with respect to qubit `p`.
pub fn global_pt(rho: &DensityOperator, p: usize) -> Result<DensityOperator> {
    check_state_operator(rho, p)?;
    Ok(DensityOperator {
        n: rho.n,
        mat: transpose_where(rho, p, |_, _| true),
        kind: OperatorKind::GlobalPt { p },
    })
}

/// K-way partial transpose with respect to qubit `p`.
pub fn kway_pt(rho: &DensityOperator, p: usize, k: usize) -> Result<DensityOperator> {
    check_state_operator(rho, p)?;
    if k < 2 || k > rho.n {
        return domain(format!("K = {k} outside 2..={}", rho.n));
    }
    let mask = qubit_mask(rho.n, p);
    Ok(DensityOperator {
        n: rho.n,
        mat: transpose_where(rho, p, |i, j| (i ^ j) & mask != 0 && (i ^ j).count_ones() as usize == k),
        kind: OperatorKind::KwayPt { p, k },
    })
}

/// Residual of the expansion of the global partial transpose in K-way
/// partial transposes:
/// `R = rho_G - sum_{K=2..n} rho_K + (n - 2) rho`.
///
/// `R` vanishes except on elements whose indices differ only at qubit `p`,
/// where it equals `rho(J, I) - rho(I, J)`; it is therefore zero for states
/// with real amplitudes. Returns the matrix and its largest entry modulus.
pub fn decomposition_residual(rho: &DensityOperator, p: usize) -> Result<(CMatrix, f64)> {
    let mut acc = global_pt(rho, p)?.mat;
    for k in 2..=rho.n {
        acc = acc.sub(&kway_pt(rho, p, k)?.mat);
    }
    let residual = acc.add(&rho.mat.scale((rho.n - 2) as f64));
    let max = residual.max_abs();
    Ok((residual, max))
}
