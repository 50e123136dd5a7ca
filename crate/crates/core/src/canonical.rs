//! Local-operator reductions toward canonical states.
//!
//! Building blocks:
//!
//! * [`zero_slot_unitary`] rotates one qubit so that the amplitude at a chosen
//!   slot vanishes while every font determinant in which that qubit is the
//!   row qubit is preserved (the rotation has unit determinant).
//! * [`diagonalizing_ilo`] is the invertible follow-up that clears the
//!   remaining off-diagonal entry of a font.
//! * [`annihilate_font_unitary`] searches a unitary on another qubit that
//!   sends a chosen font determinant to zero.
//!
//! Full canonicalization is exact for three qubits ([`canonicalize3`],
//! five-term form `a000, a100, a101, a110, a111`) and a seeded multi-start
//! search for more qubits ([`canonicalize_heuristic`]).

use std::cmp::Ordering;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Serialize, Serializer};

use crate::error::{domain, Error, Result};
use crate::fonts::{det_between, font_census, NegativityFont};
use crate::optimize::{bfgs, levenberg_marquardt};
use crate::qstate::{apply_local, apply_matrix_raw, qubit_mask, LocalOperator, OpKind, PureState, DEFAULT_TOL};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Lexicographic canonicalization objective: fewer basis terms first, then
/// higher-order fonts, then fewer nonzero fonts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Objective {
    pub lbp: usize,
    /// Negated highest font order with a nonzero determinant (0 if none).
    pub neg_max_order: i64,
    pub fonts: usize,
}

impl Serialize for Objective {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        (self.lbp, self.neg_max_order, self.fonts).serialize(s)
    }
}

/// Objective of a state. The font terms use the qubit(s) carrying the
/// highest nonzero font order; ties pick the smallest nonzero-font count.
pub fn objective(state: &PureState, tol: f64) -> Objective {
    let mut best_order = 0usize;
    let mut fonts = 0usize;
    for p in 1..=state.n() {
        let census = font_census(state, p, tol).expect("qubit in range");
        let order = census.max_order().unwrap_or(0);
        let count = census.total_nonzero();
        if order > best_order || (order == best_order && count < fonts) {
            best_order = order;
            fonts = count;
        }
    }
    Objective {
        lbp: state.lbp_count(tol),
        neg_max_order: -(best_order as i64),
        fonts,
    }
}

/// A canonical representative together with the audit trail that produced it.
#[derive(Clone, Debug)]
pub struct CanonicalForm {
    pub state: PureState,
    /// Operators applied to the input, in order.
    pub ops: Vec<LocalOperator>,
    pub lbp_count: usize,
    pub objective: Objective,
    pub restarts_used: usize,
    /// Whether the search confirmed its answer (always true for exact paths).
    pub converged: bool,
    /// Best objective after each restart.
    pub objective_trace: Vec<Objective>,
}

impl CanonicalForm {
    fn exact(state: PureState, ops: Vec<LocalOperator>, tol: f64) -> Self {
        let obj = objective(&state, tol);
        CanonicalForm {
            lbp_count: state.lbp_count(tol),
            state,
            ops,
            objective: obj,
            restarts_used: 0,
            converged: true,
            objective_trace: vec![],
        }
    }
}

/// Unitary on qubit `p` that zeroes the amplitude with qubit `p` in state 0
/// and the remaining qubits as in `column`:
/// `U = |a1|/sqrt(|a0|^2+|a1|^2) * [[1, -a0/a1], [conj(a0)/conj(a1), 1]]`.
///
/// `det U = 1`, so every font determinant with row qubit `p` is unchanged.
pub fn zero_slot_unitary(state: &PureState, p: usize, column: usize) -> Result<LocalOperator> {
    state.check_qubit(p)?;
    if column >= state.dim() {
        return domain(format!("column label {column} out of range"));
    }
    let mask = qubit_mask(state.n(), p);
    let a0 = state.amp(column & !mask);
    let a1 = state.amp(column | mask);
    if a1.norm() <= DEFAULT_TOL * state.max_abs() {
        return Err(Error::DegenerateSlot);
    }
    let k = a1.norm() / (a0.norm_sqr() + a1.norm_sqr()).sqrt();
    let r = a0 / a1;
    let m = [[ONE * k, -r * k], [r.conj() * k, ONE * k]];
    LocalOperator::unitary(p, m)
}

/// Invertible operator on qubit `p` that maps a font with vanishing top-right
/// entry, `[[b00, 0], [b10, b11]]`, to `[[1, 0], [0, b11]]` (before
/// renormalization of the state).
pub fn diagonalizing_ilo(state: &PureState, p: usize, base: usize, comp: usize) -> Result<LocalOperator> {
    state.check_qubit(p)?;
    let mask = qubit_mask(state.n(), p);
    let b00 = state.amp(base & !mask);
    let b10 = state.amp(base | mask);
    if b00.norm() <= DEFAULT_TOL * state.max_abs() {
        return Err(Error::DegenerateSlot);
    }
    if state.amp(comp & !mask).norm() > 1e-9 * state.max_abs() {
        return domain("font top-right entry must vanish before diagonalization");
    }
    LocalOperator::invertible(p, [[ONE / b00, ZERO], [-b10 / b00, ONE]])
}

/// Amplitude at `index` after `U(t) = [[1, -conj(t)], [t, 1]]` (unnormalized)
/// on qubit `q`, as a linear form in `(1, t, conj(t))`.
fn linear_form(state: &PureState, q: usize, index: usize) -> [Complex64; 3] {
    let mask = qubit_mask(state.n(), q);
    let a0 = state.amp(index & !mask);
    let a1 = state.amp(index | mask);
    if index & mask == 0 {
        [a0, ZERO, -a1]
    } else {
        [a1, a0, ZERO]
    }
}

/// Coefficients of a polynomial in `t` and `conj(t)` of degree two:
/// `[1, t, tb, t^2, tb^2, t*tb]`.
type Quadric = [Complex64; 6];

fn mul_forms(x: &[Complex64; 3], y: &[Complex64; 3]) -> Quadric {
    [
        x[0] * y[0],
        x[0] * y[1] + x[1] * y[0],
        x[0] * y[2] + x[2] * y[0],
        x[1] * y[1],
        x[2] * y[2],
        x[1] * y[2] + x[2] * y[1],
    ]
}

fn eval_quadric(c: &Quadric, t: Complex64) -> Complex64 {
    let tb = t.conj();
    c[0] + c[1] * t + c[2] * tb + c[3] * t * t + c[4] * tb * tb + c[5] * t * tb
}

/// Roots of `a z^2 + b z + c`, smallest modulus first; `None` entries for a
/// degenerate leading coefficient are dropped.
fn quadratic_roots(a: Complex64, b: Complex64, c: Complex64) -> Vec<Complex64> {
    let scale = a.norm() + b.norm() + c.norm();
    if scale == 0.0 {
        return vec![ZERO];
    }
    let mut roots = if a.norm() <= 1e-15 * scale {
        if b.norm() <= 1e-15 * scale {
            vec![]
        } else {
            vec![-c / b]
        }
    } else {
        let d2 = b * b - 4.0 * a * c;
        // a double root is only resolved to sqrt(eps) through the square
        // root, so a discriminant at rounding level is snapped to zero
        let snap = d2.norm() <= 1e-13 * (b.norm_sqr() + 4.0 * (a * c).norm());
        let disc = if snap { ZERO } else { d2.sqrt() };
        let sign = if (b.conj() * disc).re >= 0.0 { 1.0 } else { -1.0 };
        let q = -(b + disc * sign) / 2.0;
        if q.norm() == 0.0 {
            vec![ZERO, ZERO]
        } else {
            vec![q / a, c / q]
        }
    };
    roots.sort_by(|x, y| x.norm().total_cmp(&y.norm()).then(x.re.total_cmp(&y.re)));
    roots
}

fn param_unitary(q: usize, t: Complex64) -> Result<LocalOperator> {
    let k = 1.0 / (1.0 + t.norm_sqr()).sqrt();
    LocalOperator::unitary(q, [[ONE * k, -t.conj() * k], [t * k, ONE * k]])
}

/// Finds a unitary on qubit `q` (not the font's transposed qubit) after which
/// the determinant of the font at the same basis positions vanishes.
///
/// Closed-form when the determinant depends on only one of `t`, `conj(t)`;
/// otherwise damped Newton in `(Re t, Im t)` from 64 seeded starts.
pub fn annihilate_font_unitary(state: &PureState, q: usize, font: &NegativityFont, tol: f64) -> Result<LocalOperator> {
    state.check_qubit(q)?;
    if q == font.p {
        return domain("the annihilating qubit must differ from the transposed qubit");
    }
    let scale = state.max_abs().powi(2);
    let current = det_at(state, font);
    if current.norm() <= tol * scale {
        return Ok(LocalOperator::identity(q));
    }
    let forms = font.cells.map(|row| row.map(|i| linear_form(state, q, i)));
    let p1 = mul_forms(&forms[0][0], &forms[1][1]);
    let p2 = mul_forms(&forms[1][0], &forms[0][1]);
    let coeffs: Quadric = std::array::from_fn(|i| p1[i] - p2[i]);
    let cmax = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let negligible = |c: Complex64| c.norm() <= 1e-14 * cmax;

    let accept = |op: LocalOperator| -> Option<LocalOperator> {
        let next = apply_local(state, &op).ok()?;
        (det_at(&next, font).norm() <= 10.0 * tol * scale).then_some(op)
    };

    let mut candidates = vec![];
    if negligible(coeffs[2]) && negligible(coeffs[4]) && negligible(coeffs[5]) {
        candidates.extend(quadratic_roots(coeffs[3], coeffs[1], coeffs[0]));
    } else if negligible(coeffs[1]) && negligible(coeffs[3]) && negligible(coeffs[5]) {
        candidates.extend(
            quadratic_roots(coeffs[4], coeffs[2], coeffs[0])
                .into_iter()
                .map(|s| s.conj()),
        );
    }
    for t in candidates {
        if let Some(op) = param_unitary(q, t).ok().and_then(accept) {
            return Ok(op);
        }
    }
    // t -> infinity: the bit-flip-like limit of the family
    if let Some(op) = LocalOperator::unitary(q, [[ZERO, -ONE], [ONE, ZERO]])
        .ok()
        .and_then(accept)
    {
        return Ok(op);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_f047);
    for _ in 0..64 {
        let r = rng.random::<f64>().sqrt();
        let phi = rng.random_range(0.0..std::f64::consts::TAU);
        let t = newton_root(&coeffs, Complex64::from_polar(r, phi));
        if let Some(op) = t.and_then(|t| param_unitary(q, t).ok()).and_then(accept) {
            return Ok(op);
        }
    }
    Err(Error::NoSolution(format!(
        "no unitary on qubit {q} annihilates the font (|det| = {:.3e})",
        current.norm()
    )))
}

fn det_at(state: &PureState, font: &NegativityFont) -> Complex64 {
    let c = &font.cells;
    state.amp(c[0][0]) * state.amp(c[1][1]) - state.amp(c[1][0]) * state.amp(c[0][1])
}

fn newton_root(c: &Quadric, start: Complex64) -> Option<Complex64> {
    let mut t = start;
    let mut f = eval_quadric(c, t);
    let scale = c.iter().map(|x| x.norm()).fold(0.0, f64::max);
    for _ in 0..100 {
        if f.norm() <= 1e-15 * scale * (1.0 + t.norm_sqr()) {
            return Some(t);
        }
        let tb = t.conj();
        let ft = c[1] + 2.0 * c[3] * t + c[5] * tb;
        let ftb = c[2] + 2.0 * c[4] * tb + c[5] * t;
        let i = Complex64::new(0.0, 1.0);
        let fx = ft + ftb;
        let fy = i * ft - i * ftb;
        let (j11, j12, j21, j22) = (fx.re, fy.re, fx.im, fy.im);
        let det = j11 * j22 - j12 * j21;
        if det.abs() < 1e-300 {
            return None;
        }
        let dx = -(j22 * f.re - j12 * f.im) / det;
        let dy = -(-j21 * f.re + j11 * f.im) / det;
        let mut step = 1.0;
        loop {
            let trial = t + Complex64::new(dx, dy) * step;
            let ft = eval_quadric(c, trial);
            if ft.norm() < f.norm() {
                t = trial;
                f = ft;
                break;
            }
            step *= 0.5;
            if step < 1e-10 {
                return None;
            }
        }
    }
    (f.norm() <= 1e-12 * scale * (1.0 + t.norm_sqr())).then_some(t)
}

/// Exact local-unitary canonical form of a three-qubit state:
/// nonzero amplitudes only at `000, 100, 101, 110, 111`, with `a000`,
/// `a101`, `a110`, `a111` real and nonnegative whenever nonzero.
pub fn canonicalize3(state: &PureState) -> Result<CanonicalForm> {
    if state.n() != 3 {
        return domain("canonicalize3 requires exactly 3 qubits");
    }
    let mut ops = vec![];
    let mut s = state.clone();
    let push = |s: &mut PureState, ops: &mut Vec<LocalOperator>, op: LocalOperator| -> Result<()> {
        if !op.is_identity() {
            *s = apply_local(s, &op)?;
            ops.push(op);
        }
        Ok(())
    };

    // qubit 1: make the i1 = 0 block (qubits 2,3) rank one
    let block = |s: &PureState, i1: usize| -> [[Complex64; 2]; 2] {
        [
            [s.amp(i1 << 2), s.amp((i1 << 2) | 1)],
            [s.amp((i1 << 2) | 2), s.amp((i1 << 2) | 3)],
        ]
    };
    let (b0, b1) = (block(&s, 0), block(&s, 1));
    let c = b0[0][0] * b0[1][1] - b0[0][1] * b0[1][0];
    let a = b1[0][0] * b1[1][1] - b1[0][1] * b1[1][0];
    let b = b0[0][0] * b1[1][1] + b0[1][1] * b1[0][0] - b0[0][1] * b1[1][0] - b0[1][0] * b1[0][1];
    let tiny = 1e-14 * s.max_abs().powi(2);
    if c.norm() > tiny {
        let op = match quadratic_roots(a, b, c).first() {
            Some(&t) => {
                let k = 1.0 / (1.0 + t.norm_sqr()).sqrt();
                LocalOperator::unitary(1, [[ONE * k, t * k], [-t.conj() * k, ONE * k]])?
            }
            None => LocalOperator::unitary(1, [[ZERO, ONE], [-ONE, ZERO]])?,
        };
        push(&mut s, &mut ops, op)?;
    }

    // qubits 2 and 3: rotate the rank-one block onto |00>
    let b0 = block(&s, 0);
    let cols = [[b0[0][0], b0[1][0]], [b0[0][1], b0[1][1]]];
    let x = *cols
        .iter()
        .max_by(|u, v| (u[0].norm_sqr() + u[1].norm_sqr()).total_cmp(&(v[0].norm_sqr() + v[1].norm_sqr())))
        .expect("two columns");
    if let Some(op) = aligning_unitary(2, x, s.max_abs()) {
        push(&mut s, &mut ops, op?)?;
    }
    let y = [s.amp(0b000), s.amp(0b001)];
    if let Some(op) = aligning_unitary(3, y, s.max_abs()) {
        push(&mut s, &mut ops, op?)?;
    }

    // phases
    let cut = 1e-14 * s.max_abs();
    let a000 = s.amp(0b000);
    if a000.norm() > cut {
        let th = -a000.arg();
        push(&mut s, &mut ops, LocalOperator::phases(1, th, th))?;
    }
    let arg_if = |i: usize, s: &PureState| (s.amp(i).norm() > cut).then(|| s.amp(i).arg());
    let (g100, g101, g110, g111) = (
        arg_if(0b100, &s),
        arg_if(0b101, &s),
        arg_if(0b110, &s),
        arg_if(0b111, &s),
    );
    let (mut f1, mut f2, mut f3) = (0.0, 0.0, 0.0);
    match (g101, g110, g111) {
        (Some(x101), Some(x110), Some(x111)) => {
            f3 = x110 - x111;
            f2 = x101 - x111;
            f1 = -x101 - f3;
        }
        (x101, x110, Some(x111)) => {
            if let Some(v) = x101 {
                f3 = -v;
            }
            if let Some(v) = x110 {
                f2 = -v;
            }
            if x101.is_none() {
                f3 = -x111 - f2;
            } else {
                f2 = -x111 - f3;
            }
        }
        (x101, x110, None) => {
            if let Some(v) = g100 {
                f1 = -v;
            }
            if let Some(v) = x101 {
                f3 = -v - f1;
            }
            if let Some(v) = x110 {
                f2 = -v - f1;
            }
        }
    }
    for (q, f) in [(1, f1), (2, f2), (3, f3)] {
        if f != 0.0 {
            push(&mut s, &mut ops, LocalOperator::phases(q, 0.0, f))?;
        }
    }
    Ok(CanonicalForm::exact(s, ops, DEFAULT_TOL))
}

/// Unitary on `qubit` mapping the vector `x` to `(|x|, 0)`; `None` when `x`
/// is negligible or already aligned.
fn aligning_unitary(qubit: usize, x: [Complex64; 2], scale: f64) -> Option<Result<LocalOperator>> {
    let norm = (x[0].norm_sqr() + x[1].norm_sqr()).sqrt();
    if norm <= 1e-14 * scale || x[1].norm() <= 1e-16 * norm {
        return None;
    }
    let m = [[x[0].conj() / norm, x[1].conj() / norm], [-x[1] / norm, x[0] / norm]];
    Some(LocalOperator::unitary(qubit, m))
}

/// Stochastic (SLOCC) reduction: the slot-zeroing unitary on qubit 1, unit
/// upper-triangular operators on qubits `2..=n` zeroing the slots
/// `1..101..1`, then the diagonalizing invertible operator on qubit 1. Each
/// step is kept only if it lowers the term count.
pub fn slocc_reduce(state: &PureState, tol: f64) -> Result<(PureState, Vec<LocalOperator>)> {
    let n = state.n();
    let all = state.dim() - 1;
    let mut s = state.clone();
    let mut ops = vec![];
    let mut try_step = |s: &mut PureState, op: Result<LocalOperator>| -> Result<()> {
        let Ok(op) = op else { return Ok(()) };
        let next = apply_local(s, &op)?;
        if next.lbp_count(tol) < s.lbp_count(tol) {
            *s = next;
            ops.push(op);
        }
        Ok(())
    };
    try_step(&mut s, zero_slot_unitary(state, 1, all))?;
    for q in 2..=n {
        let mask = qubit_mask(n, q);
        let pivot = s.amp(all);
        if pivot.norm() <= tol * s.max_abs() {
            continue;
        }
        let y = -s.amp(all & !mask) / pivot;
        let op = LocalOperator::invertible(q, [[ONE, y], [ZERO, ONE]]);
        try_step(&mut s, op)?;
    }
    let ilo = diagonalizing_ilo(&s, 1, 0, all & !qubit_mask(n, 1));
    try_step(&mut s, ilo)?;
    Ok((s, ops))
}

/// Options for [`canonicalize_heuristic`].
#[derive(Clone, Copy, Debug)]
pub struct HeuristicOptions {
    pub max_restarts: usize,
    pub tol: f64,
    pub seed: u64,
}

impl Default for HeuristicOptions {
    fn default() -> Self {
        HeuristicOptions {
            max_restarts: 32,
            tol: DEFAULT_TOL,
            seed: 0,
        }
    }
}

/// `exp(i theta . sigma)` for a rotation vector `theta`.
fn su2_from_params(th: &[f64]) -> [[Complex64; 2]; 2] {
    let r = (th[0] * th[0] + th[1] * th[1] + th[2] * th[2]).sqrt();
    let (cr, sinc) = if r < 1e-8 {
        (1.0 - r * r / 2.0, 1.0 - r * r / 6.0)
    } else {
        (r.cos(), r.sin() / r)
    };
    let (x, y, z) = (th[0] * sinc, th[1] * sinc, th[2] * sinc);
    [
        [Complex64::new(cr, z), Complex64::new(y, x)],
        [Complex64::new(-y, x), Complex64::new(cr, -z)],
    ]
}

fn transformed(state: &PureState, params: &[f64]) -> Vec<Complex64> {
    let mut amps = state.amps().to_vec();
    for q in 1..=state.n() {
        let m = su2_from_params(&params[3 * (q - 1)..3 * q]);
        apply_matrix_raw(&mut amps, state.n(), q, &m);
    }
    amps
}

fn smoothed_l1(amps: &[Complex64], eps: f64) -> f64 {
    amps.iter().map(|a| (a.norm_sqr() + eps * eps).sqrt()).sum()
}

/// Splits amplitude magnitudes at the widest multiplicative gap below 1% of
/// the maximum; returns the indices below the gap.
fn small_set(amps: &[Complex64]) -> Vec<usize> {
    let max = amps.iter().map(|a| a.norm()).fold(0.0, f64::max);
    let mut order: Vec<usize> = (0..amps.len()).collect();
    order.sort_by(|&i, &j| amps[i].norm().total_cmp(&amps[j].norm()));
    let mut best: Option<(f64, usize)> = None;
    for w in 0..order.len() - 1 {
        let lo = amps[order[w]].norm();
        let hi = amps[order[w + 1]].norm();
        if lo > 1e-2 * max {
            break;
        }
        let ratio = hi / lo.max(1e-300);
        if best.is_none_or(|(r, _)| ratio > r) {
            best = Some((ratio, w + 1));
        }
    }
    match best {
        Some((ratio, cut)) if ratio > 10.0 => order[..cut].to_vec(),
        _ => vec![],
    }
}

/// Upper bound on search rounds in [`canonicalize_heuristic`].
const MAX_ROUNDS: usize = 8;

struct Round {
    best: Option<Vec<f64>>,
    confirmations: usize,
    trace: Vec<Objective>,
}

/// One multi-start pass from `state`. `best` is set only when some restart
/// strictly improves on the state's own objective.
fn search_round(state: &PureState, opts: &HeuristicOptions) -> Result<Round> {
    let n = state.n();
    let mut best_params: Option<Vec<f64>> = None;
    let mut best_obj = objective(state, opts.tol);
    let mut confirmations = 0usize;
    let mut trace = Vec::with_capacity(opts.max_restarts);
    for restart in 0..opts.max_restarts {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ (restart as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
        let mut x: Vec<f64> = if restart == 0 {
            vec![0.0; 3 * n]
        } else {
            (0..3 * n).map(|_| rng.random_range(-1.6..1.6)).collect()
        };
        for eps in [1e-2, 1e-4, 1e-6] {
            x = bfgs(|p| smoothed_l1(&transformed(state, p), eps), &x, 300, 1e-10);
        }
        let zeros = small_set(&transformed(state, &x));
        if !zeros.is_empty() {
            let residual = |p: &[f64]| -> Vec<f64> {
                let a = transformed(state, p);
                zeros.iter().flat_map(|&i| [a[i].re, a[i].im]).collect()
            };
            let (xp, norm) = levenberg_marquardt(residual, &x, 200, 1e-15);
            if norm < 1e-9 {
                x = xp;
            }
        }
        let candidate = PureState::from_amplitudes_capped(n, transformed(state, &x), usize::MAX)?;
        let obj = objective(&candidate, opts.tol);
        match obj.cmp(&best_obj) {
            Ordering::Less => {
                best_obj = obj;
                best_params = Some(x);
                confirmations = 1;
            }
            Ordering::Equal => confirmations += 1,
            Ordering::Greater => {}
        }
        trace.push(best_obj);
    }
    Ok(Round {
        best: best_params,
        confirmations,
        trace,
    })
}

/// Global phase making the largest-modulus amplitude real and nonnegative.
fn phase_fix(state: &PureState) -> Option<LocalOperator> {
    let amax = *state
        .amps()
        .iter()
        .max_by(|a, b| a.norm().total_cmp(&b.norm()))
        .expect("nonempty");
    (amax.im != 0.0 || amax.re < 0.0).then(|| {
        let th = -amax.arg();
        LocalOperator::phases(1, th, th)
    })
}

/// Best-effort canonical form for any qubit count: a multi-start search over
/// products of single-qubit unitaries minimizing [`Objective`]. Each restart
/// runs a smoothed-L1 descent, then drives the near-zero amplitudes to zero
/// with Levenberg-Marquardt. The current state is the incumbent, so the
/// objective never worsens; ties keep the incumbent.
///
/// Rounds repeat from the improved state until a round finds nothing better.
/// That last round is exactly the search a rerun on the output performs, so
/// the result is a fixed point. `converged` is false when the round limit
/// is hit first.
pub fn canonicalize_heuristic(state: &PureState, opts: &HeuristicOptions) -> Result<CanonicalForm> {
    let n = state.n();
    let mut s = state.clone();
    let mut ops = vec![];
    let mut trace = vec![];
    let mut restarts_used = 0;
    let mut converged = false;
    for _ in 0..MAX_ROUNDS {
        if let Some(op) = phase_fix(&s) {
            s = apply_local(&s, &op)?;
            ops.push(op);
        }
        let round = search_round(&s, opts)?;
        restarts_used += opts.max_restarts;
        trace.extend(round.trace);
        let Some(params) = round.best else {
            converged = opts.max_restarts == 0 || round.confirmations > 0;
            break;
        };
        for q in 1..=n {
            let op = LocalOperator::unitary(q, su2_from_params(&params[3 * (q - 1)..3 * q]))?;
            if !op.is_identity() {
                s = apply_local(&s, &op)?;
                ops.push(op);
            }
        }
    }
    let obj = objective(&s, opts.tol);
    Ok(CanonicalForm {
        lbp_count: s.lbp_count(opts.tol),
        state: s,
        ops,
        objective: obj,
        restarts_used,
        converged,
        objective_trace: trace,
    })
}

/// Exact path for three qubits, search otherwise.
pub fn canonicalize(state: &PureState, opts: &HeuristicOptions) -> Result<CanonicalForm> {
    if state.n() == 3 {
        canonicalize3(state)
    } else {
        canonicalize_heuristic(state, opts)
    }
}

/// `(D^{00..0} - D^{0011..1})^2 - 4 D_{(A2)_0}^{00..0} D_{(A2)_1}^{00..0}`
/// for transposed qubit 1. Invariant under `SL(2)` operators on qubits 1
/// and 2.
pub fn cluster_invariant(state: &PureState) -> Result<Complex64> {
    let n = state.n();
    if n < 3 {
        return domain("cluster invariant needs at least 3 qubits");
    }
    let rest = (1usize << (n - 1)) - 1; // qubits 2..n all one
    let tail = (1usize << (n - 2)) - 1; // qubits 3..n all one
    let q2 = 1usize << (n - 2);
    let d0 = det_between(state, 1, 0, rest);
    let d0011 = det_between(state, 1, tail, q2);
    let da0 = det_between(state, 1, 0, tail);
    let da1 = det_between(state, 1, q2, rest);
    let diff = d0 - d0011;
    Ok(diff * diff - 4.0 * da0 * da1)
}

/// Whether an operator list contains any invertible (non-unitary) element.
pub fn uses_ilo(ops: &[LocalOperator]) -> bool {
    ops.iter().any(|o| o.kind() == OpKind::Invertible)
}
