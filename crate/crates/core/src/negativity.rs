//! Negativity of partially transposed operators.
//!
//! Negativity is `||op||_1 - 1 = 2 * sum |negative eigenvalues|`, which for a
//! single qubit against the rest ranges over `[0, 1]`. The spectrum comes from
//! a cyclic complex Jacobi eigensolver.

use num_complex::Complex64;

use crate::error::{domain, Error, Result};
use crate::matrix::CMatrix;
use crate::ptranspose::{global_pt, kway_pt};
use crate::qstate::{density, DensityOperator, PureState};

const MAX_SWEEPS: usize = 64;

/// Eigenvalues of a Hermitian matrix, sorted descending.
pub fn eigvals_hermitian(mat: &CMatrix) -> Result<Vec<f64>> {
    let defect = mat.hermiticity_defect();
    if defect > 1e-10 {
        return domain(format!("matrix is not Hermitian (defect {defect:.3e})"));
    }
    let n = mat.dim();
    let mut a = mat.clone();
    for i in 0..n {
        a[(i, i)] = Complex64::new(a[(i, i)].re, 0.0);
    }
    let scale = mat.frobenius_sq().sqrt();
    if scale == 0.0 {
        return Ok(vec![0.0; n]);
    }
    let target = (f64::EPSILON * scale).powi(2);

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)].norm_sqr())
            .sum();
        if off <= target {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut a, p, q);
            }
        }
    }
    if !converged {
        return Err(Error::Numeric("Jacobi eigensolver did not converge".into()));
    }
    let mut ev: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    ev.sort_by(|x, y| y.total_cmp(x));
    Ok(ev)
}

/// One Jacobi rotation annihilating `a[p][q]`. The pivot block is made real
/// by a phase on column `q`, then rotated as in the real symmetric case.
fn rotate(a: &mut CMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let mag = apq.norm();
    if mag == 0.0 {
        return;
    }
    let (app, aqq) = (a[(p, p)].re, a[(q, q)].re);
    if mag < 1e-300 || mag <= f64::EPSILON * 1e-3 * (app.abs() + aqq.abs()) {
        a[(p, q)] = Complex64::new(0.0, 0.0);
        a[(q, p)] = Complex64::new(0.0, 0.0);
        return;
    }
    let phase = apq / mag;
    let theta = (aqq - app) / (2.0 * mag);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let t = if theta == 0.0 { 1.0 } else { t };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    // J = [[c, s], [-s e^{-i phi}, c e^{-i phi}]] acting on (p, q)
    let jpp = Complex64::new(c, 0.0);
    let jpq = Complex64::new(s, 0.0);
    let jqp = -phase.conj() * s;
    let jqq = phase.conj() * c;
    let n = a.dim();
    for k in 0..n {
        let (akp, akq) = (a[(k, p)], a[(k, q)]);
        a[(k, p)] = akp * jpp + akq * jqp;
        a[(k, q)] = akp * jpq + akq * jqq;
    }
    for k in 0..n {
        let (apk, aqk) = (a[(p, k)], a[(q, k)]);
        a[(p, k)] = jpp.conj() * apk + jqp.conj() * aqk;
        a[(q, k)] = jpq.conj() * apk + jqq.conj() * aqk;
    }
    a[(p, q)] = Complex64::new(0.0, 0.0);
    a[(q, p)] = Complex64::new(0.0, 0.0);
    a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);
}

/// `2 * sum max(0, -lambda)`, i.e. `||op||_1 - 1` for a trace-one operator.
pub fn negativity_of(op: &DensityOperator) -> Result<f64> {
    let ev = eigvals_hermitian(op.matrix())?;
    let neg: f64 = ev.iter().filter(|&&l| l < 0.0).map(|l| -l).sum();
    // an empty float sum is -0.0
    Ok(if neg > 0.0 { 2.0 * neg } else { 0.0 })
}

/// Negativity of the global partial transpose on qubit `p`.
pub fn global_negativity(state: &PureState, p: usize) -> Result<f64> {
    negativity_of(&global_pt(&density(state), p)?)
}

/// Negativity of the K-way partial transpose on qubit `p`.
///
/// This is the negativity of the operator `rho_K^{T_p}` itself, not a
/// partial contribution to the global negativity.
pub fn kpt_negativity(state: &PureState, p: usize, k: usize) -> Result<f64> {
    negativity_of(&kway_pt(&density(state), p, k)?)
}

/// Smallest eigenvalue of the global partial transpose on qubit `p`.
pub fn min_gpt_eigenvalue(state: &PureState, p: usize) -> Result<f64> {
    let ev = eigvals_hermitian(global_pt(&density(state), p)?.matrix())?;
    Ok(*ev.last().expect("nonempty spectrum"))
}
