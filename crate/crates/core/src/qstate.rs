//! N-qubit pure states, local operators and state operators.
//!
//! Basis convention: qubit 1 is the most significant bit, so the ket
//! `|i1 i2 ... iN>` has integer index `sum_m i_m * 2^(N-m)` and reads
//! left-to-right exactly as written. Qubit numbers in the public API are
//! 1-based.

use std::fmt;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::matrix::CMatrix;

/// Default cap on the number of qubits (operator dimension 256).
pub const DEFAULT_MAX_QUBITS: usize = 8;
/// Default numerical zero tolerance, relative to the largest amplitude.
pub const DEFAULT_TOL: f64 = 1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Mask selecting qubit `q` (1-based) in an `n`-qubit index.
#[inline]
pub fn qubit_mask(n: usize, q: usize) -> usize {
    1 << (n - q)
}

/// Value (0 or 1) of qubit `q` in basis index `value`.
#[inline]
pub fn bit_of(value: usize, n: usize, q: usize) -> usize {
    (value >> (n - q)) & 1
}

/// A computational basis state `|i1 ... iN>`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasisIndex {
    n: usize,
    value: usize,
}

impl BasisIndex {
    pub fn new(n: usize, value: usize) -> Result<Self> {
        if n == 0 || n >= usize::BITS as usize {
            return domain(format!("qubit count {n} not representable"));
        }
        if value >> n != 0 {
            return domain(format!("index {value} out of range for {n} qubits"));
        }
        Ok(BasisIndex { n, value })
    }

    /// Parses a string of binary digits, qubit 1 first.
    pub fn from_bits(bits: &str) -> Result<Self> {
        let n = bits.len();
        if n == 0 {
            return domain("empty bit string");
        }
        let mut value = 0usize;
        for c in bits.chars() {
            value = match c {
                '0' => value << 1,
                '1' => (value << 1) | 1,
                other => return domain(format!("non-binary digit {other:?}")),
            };
        }
        Self::new(n, value)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn value(&self) -> usize {
        self.value
    }

    pub fn bit(&self, q: usize) -> usize {
        bit_of(self.value, self.n, q)
    }

    pub fn bits(&self) -> String {
        (1..=self.n).map(|q| if self.bit(q) == 1 { '1' } else { '0' }).collect()
    }

    pub fn hamming(&self, other: &BasisIndex) -> u32 {
        (self.value ^ other.value).count_ones()
    }
}

impl fmt::Display for BasisIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|{}>", self.bits())
    }
}

/// Normalized N-qubit pure state.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    n: usize,
    amps: Vec<Complex64>,
}

impl PureState {
    /// Builds a state from a full amplitude vector, normalizing it.
    pub fn from_amplitudes(n: usize, amps: Vec<Complex64>) -> Result<Self> {
        Self::from_amplitudes_capped(n, amps, DEFAULT_MAX_QUBITS)
    }

    pub fn from_amplitudes_capped(n: usize, mut amps: Vec<Complex64>, cap: usize) -> Result<Self> {
        check_qubits(n, cap)?;
        if amps.len() != 1 << n {
            return domain(format!(
                "expected {} amplitudes for {n} qubits, got {}",
                1usize << n,
                amps.len()
            ));
        }
        if amps.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::InvalidState("non-finite amplitude".into()));
        }
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidState("zero norm".into()));
        }
        amps.iter_mut().for_each(|a| *a /= norm);
        Ok(PureState { n, amps })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amp(&self, index: usize) -> Complex64 {
        self.amps[index]
    }

    pub fn max_abs(&self) -> f64 {
        self.amps.iter().map(|a| a.norm()).fold(0.0, f64::max)
    }

    /// Number of local basis product terms with `|a| > tol * max|a|`.
    pub fn lbp_count(&self, tol: f64) -> usize {
        let cut = tol * self.max_abs();
        self.amps.iter().filter(|a| a.norm() > cut).count()
    }

    /// Nonzero terms as `(index, amplitude)` pairs, using the relative tolerance.
    pub fn terms(&self, tol: f64) -> Vec<(BasisIndex, Complex64)> {
        let cut = tol * self.max_abs();
        self.amps
            .iter()
            .enumerate()
            .filter(|(_, a)| a.norm() > cut)
            .map(|(i, a)| (BasisIndex { n: self.n, value: i }, *a))
            .collect()
    }

    /// Checks that `q` is a valid 1-based qubit number.
    pub fn check_qubit(&self, q: usize) -> Result<()> {
        if q == 0 || q > self.n {
            return domain(format!("qubit {q} out of range 1..={}", self.n));
        }
        Ok(())
    }
}

fn check_qubits(n: usize, cap: usize) -> Result<()> {
    if n < 2 {
        return domain(format!("need at least 2 qubits, got {n}"));
    }
    if n > cap {
        return domain(format!("{n} qubits exceeds the cap of {cap}"));
    }
    Ok(())
}

/// Builds a normalized state from `(basis index, coefficient)` terms.
/// Duplicate indices are summed.
pub fn make_state(n: usize, terms: &[(BasisIndex, Complex64)]) -> Result<PureState> {
    make_state_capped(n, terms, DEFAULT_MAX_QUBITS)
}

pub fn make_state_capped(n: usize, terms: &[(BasisIndex, Complex64)], cap: usize) -> Result<PureState> {
    check_qubits(n, cap)?;
    if terms.is_empty() {
        return Err(Error::InvalidState("no terms".into()));
    }
    let mut amps = vec![ZERO; 1 << n];
    let mut scale = 0.0f64;
    for (idx, c) in terms {
        if idx.n() != n {
            return domain(format!("term {idx} does not have {n} qubits"));
        }
        amps[idx.value()] += c;
        scale = scale.max(c.norm());
    }
    // cancellation residue from summed duplicates
    let cut = 1e-14 * scale;
    for a in amps.iter_mut() {
        if a.norm() <= cut {
            *a = ZERO;
        }
    }
    PureState::from_amplitudes_capped(n, amps, cap)
}

/// Whether a local operator is unitary or merely invertible.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OpKind {
    Unitary,
    Invertible,
}

/// A 2x2 operator acting on one qubit.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalOperator {
    qubit: usize,
    matrix: [[Complex64; 2]; 2],
    kind: OpKind,
}

impl LocalOperator {
    /// A unitary on `qubit`; fails unless `m^dagger m = I` within 1e-12.
    pub fn unitary(qubit: usize, matrix: [[Complex64; 2]; 2]) -> Result<Self> {
        if qubit == 0 {
            return domain("qubits are numbered from 1");
        }
        let defect = unitarity_defect(&matrix);
        if defect > 1e-12 {
            return domain(format!("matrix is not unitary (defect {defect:.3e})"));
        }
        Ok(LocalOperator {
            qubit,
            matrix,
            kind: OpKind::Unitary,
        })
    }

    /// An invertible local operator; fails if `|det| <= 1e-12`.
    pub fn invertible(qubit: usize, matrix: [[Complex64; 2]; 2]) -> Result<Self> {
        if qubit == 0 {
            return domain("qubits are numbered from 1");
        }
        if det2(&matrix).norm() <= 1e-12 {
            return domain("singular local operator");
        }
        Ok(LocalOperator {
            qubit,
            matrix,
            kind: OpKind::Invertible,
        })
    }

    pub fn identity(qubit: usize) -> Self {
        LocalOperator {
            qubit,
            matrix: [[ONE, ZERO], [ZERO, ONE]],
            kind: OpKind::Unitary,
        }
    }

    /// `diag(e^{i a}, e^{i b})`.
    pub fn phases(qubit: usize, a: f64, b: f64) -> Self {
        LocalOperator {
            qubit,
            matrix: [
                [Complex64::from_polar(1.0, a), ZERO],
                [ZERO, Complex64::from_polar(1.0, b)],
            ],
            kind: OpKind::Unitary,
        }
    }

    pub fn qubit(&self) -> usize {
        self.qubit
    }

    pub fn matrix(&self) -> &[[Complex64; 2]; 2] {
        &self.matrix
    }

    pub fn kind(&self) -> OpKind {
        self.kind
    }

    pub fn is_identity(&self) -> bool {
        let m = &self.matrix;
        (m[0][0] - ONE).norm() < 1e-15
            && (m[1][1] - ONE).norm() < 1e-15
            && m[0][1].norm() < 1e-15
            && m[1][0].norm() < 1e-15
    }
}

pub(crate) fn det2(m: &[[Complex64; 2]; 2]) -> Complex64 {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

fn unitarity_defect(m: &[[Complex64; 2]; 2]) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..2 {
        for j in 0..2 {
            let dot: Complex64 = (0..2).map(|k| m[k][i].conj() * m[k][j]).sum();
            let target = if i == j { ONE } else { ZERO };
            worst = worst.max((dot - target).norm());
        }
    }
    worst
}

/// Applies a 2x2 matrix to qubit `q` of a raw amplitude vector, in place.
pub(crate) fn apply_matrix_raw(amps: &mut [Complex64], n: usize, q: usize, m: &[[Complex64; 2]; 2]) {
    let mask = qubit_mask(n, q);
    for i0 in 0..amps.len() {
        if i0 & mask != 0 {
            continue;
        }
        let i1 = i0 | mask;
        let (a0, a1) = (amps[i0], amps[i1]);
        amps[i0] = m[0][0] * a0 + m[0][1] * a1;
        amps[i1] = m[1][0] * a0 + m[1][1] * a1;
    }
}

/// Applies a local operator and renormalizes.
pub fn apply_local(state: &PureState, op: &LocalOperator) -> Result<PureState> {
    state.check_qubit(op.qubit)?;
    if op.kind == OpKind::Invertible && det2(&op.matrix).norm() <= 1e-12 {
        return domain("singular local operator");
    }
    let mut amps = state.amps.clone();
    apply_matrix_raw(&mut amps, state.n, op.qubit, &op.matrix);
    if op.kind == OpKind::Unitary {
        return Ok(PureState { n: state.n, amps });
    }
    PureState::from_amplitudes_capped(state.n, amps, usize::MAX)
}

/// Applies a sequence of local operators in order.
pub fn apply_all<'a>(state: &PureState, ops: impl IntoIterator<Item = &'a LocalOperator>) -> Result<PureState> {
    let mut s = state.clone();
    for op in ops {
        s = apply_local(&s, op)?;
    }
    Ok(s)
}

/// Kind of a state operator: the state itself, its global partial transpose,
/// or a K-way partial transpose.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OperatorKind {
    State,
    GlobalPt { p: usize },
    KwayPt { p: usize, k: usize },
}

/// A `2^n x 2^n` state operator or one of its partial transposes.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityOperator {
    pub(crate) n: usize,
    pub(crate) mat: CMatrix,
    pub(crate) kind: OperatorKind,
}

impl DensityOperator {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn kind(&self) -> OperatorKind {
        self.kind
    }

    pub fn transposed_qubit(&self) -> Option<usize> {
        match self.kind {
            OperatorKind::State => None,
            OperatorKind::GlobalPt { p } | OperatorKind::KwayPt { p, .. } => Some(p),
        }
    }
}

/// `rho = |psi><psi|`.
pub fn density(state: &PureState) -> DensityOperator {
    let a = &state.amps;
    DensityOperator {
        n: state.n,
        mat: CMatrix::from_fn(a.len(), |i, j| a[i] * a[j].conj()),
        kind: OperatorKind::State,
    }
}

/// Relabels qubits: qubit `m` of the input becomes qubit `perm[m-1]` of the output.
pub fn permute_qubits(state: &PureState, perm: &[usize]) -> Result<PureState> {
    let n = state.n;
    if perm.len() != n {
        return domain(format!("permutation has {} entries, expected {n}", perm.len()));
    }
    let mut seen = vec![false; n];
    for &t in perm {
        if t == 0 || t > n || seen[t - 1] {
            return domain("permutation is not a bijection on 1..=n");
        }
        seen[t - 1] = true;
    }
    let mut amps = vec![ZERO; state.dim()];
    for (i, a) in state.amps.iter().enumerate() {
        let mut j = 0usize;
        for (m, &t) in perm.iter().enumerate() {
            if bit_of(i, n, m + 1) == 1 {
                j |= qubit_mask(n, t);
            }
        }
        amps[j] = *a;
    }
    Ok(PureState { n, amps })
}

/// Inverse of a 1-based permutation.
pub fn inverse_permutation(perm: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; perm.len()];
    for (m, &t) in perm.iter().enumerate() {
        inv[t - 1] = m + 1;
    }
    inv
}

/// Seeded random state with i.i.d. standard complex Gaussian amplitudes,
/// drawn from ChaCha8 (real part then imaginary part, index ascending).
pub fn random_state(n: usize, seed: u64) -> Result<PureState> {
    check_qubits(n, DEFAULT_MAX_QUBITS)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let amps = (0..1usize << n)
        .map(|_| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex64::new(re, im)
        })
        .collect();
    PureState::from_amplitudes(n, amps)
}

/// Seeded random state with real Gaussian amplitudes.
pub fn random_real_state(n: usize, seed: u64) -> Result<PureState> {
    check_qubits(n, DEFAULT_MAX_QUBITS)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let amps = (0..1usize << n)
        .map(|_| Complex64::new(rng.sample(StandardNormal), 0.0))
        .collect();
    PureState::from_amplitudes(n, amps)
}

/// Haar-random element of SU(2).
pub fn random_su2<R: Rng + ?Sized>(rng: &mut R) -> [[Complex64; 2]; 2] {
    let g: [f64; 4] = std::array::from_fn(|_| rng.sample(StandardNormal));
    let norm = g.iter().map(|x| x * x).sum::<f64>().sqrt();
    let a = Complex64::new(g[0], g[1]) / norm;
    let b = Complex64::new(g[2], g[3]) / norm;
    [[a, -b.conj()], [b, a.conj()]]
}

/// Haar-random unitary in U(2) acting on `qubit`.
pub fn random_unitary<R: Rng + ?Sized>(qubit: usize, rng: &mut R) -> LocalOperator {
    let su = random_su2(rng);
    let phase = Complex64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU));
    let matrix = [
        [su[0][0] * phase, su[0][1] * phase],
        [su[1][0] * phase, su[1][1] * phase],
    ];
    LocalOperator {
        qubit,
        matrix,
        kind: OpKind::Unitary,
    }
}

/// Applies an independent Haar-random unitary to every qubit.
pub fn random_lu_disguise(state: &PureState, seed: u64) -> PureState {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut s = state.clone();
    for q in 1..=state.n {
        let u = random_unitary(q, &mut rng);
        apply_matrix_raw(&mut s.amps, s.n, q, &u.matrix);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn ket(bits: &str) -> BasisIndex {
        BasisIndex::from_bits(bits).unwrap()
    }

    #[test]
    fn basis_index_convention() {
        let b = ket("100");
        assert_eq!(b.value(), 4);
        assert_eq!(b.bit(1), 1);
        assert_eq!(b.bits(), "100");
        assert_eq!(ket("011").hamming(&ket("100")), 3);
        assert!(BasisIndex::new(3, 8).is_err());
        assert!(BasisIndex::from_bits("012").is_err());
    }

    #[test]
    fn ghz_normalization() {
        let s = make_state(3, &[(ket("000"), c(1.0)), (ket("111"), c(1.0))]).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((s.amp(0) - c(h)).norm() < 1e-15);
        assert!((s.amp(7) - c(h)).norm() < 1e-15);
        assert_eq!(s.lbp_count(DEFAULT_TOL), 2);
    }

    #[test]
    fn cancelling_terms_are_rejected() {
        let r = make_state(3, &[(ket("000"), c(1.0)), (ket("000"), c(-1.0))]);
        assert!(matches!(r, Err(Error::InvalidState(_))));
    }

    #[test]
    fn cluster_amplitudes() {
        let s = make_state(
            4,
            &[
                (ket("0000"), c(1.0)),
                (ket("0011"), c(-1.0)),
                (ket("1110"), c(1.0)),
                (ket("1101"), c(1.0)),
            ],
        )
        .unwrap();
        for (i, v) in [(0, 0.5), (3, -0.5), (14, 0.5), (13, 0.5)] {
            assert!((s.amp(i) - c(v)).norm() < 1e-15);
        }
        assert_eq!(s.lbp_count(DEFAULT_TOL), 4);
    }

    #[test]
    fn index_out_of_range_and_width_mismatch() {
        assert!(make_state(2, &[(ket("000"), c(1.0))]).is_err());
        assert!(make_state(1, &[(ket("0"), c(1.0))]).is_err());
        assert!(make_state(9, &[(BasisIndex::new(9, 0).unwrap(), c(1.0))]).is_err());
        assert!(make_state_capped(9, &[(BasisIndex::new(9, 0).unwrap(), c(1.0))], 10).is_ok());
    }

    #[test]
    fn bit_flip_on_last_qubit() {
        let s = make_state(3, &[(ket("000"), c(1.0))]).unwrap();
        let x = LocalOperator::unitary(3, [[c(0.0), c(1.0)], [c(1.0), c(0.0)]]).unwrap();
        let t = apply_local(&s, &x).unwrap();
        assert_eq!(t.amp(1), c(1.0));
        assert_eq!(t.amp(0), c(0.0));
    }

    #[test]
    fn identity_leaves_state_unchanged() {
        let s = random_state(3, 1).unwrap();
        for q in 1..=3 {
            assert_eq!(apply_local(&s, &LocalOperator::identity(q)).unwrap(), s);
        }
    }

    #[test]
    fn operator_validation() {
        assert!(LocalOperator::unitary(1, [[c(1.0), c(1.0)], [c(0.0), c(1.0)]]).is_err());
        assert!(LocalOperator::invertible(1, [[c(1.0), c(1.0)], [c(1.0), c(1.0)]]).is_err());
        assert!(LocalOperator::invertible(1, [[c(2.0), c(1.0)], [c(0.0), c(1.0)]]).is_ok());
        let s = random_state(2, 3).unwrap();
        let op = LocalOperator::identity(3);
        assert!(apply_local(&s, &op).is_err());
    }

    #[test]
    fn invertible_operator_renormalizes() {
        let s = random_state(3, 5).unwrap();
        let op = LocalOperator::invertible(2, [[c(3.0), c(1.0)], [c(0.0), c(0.5)]]).unwrap();
        let t = apply_local(&s, &op).unwrap();
        let norm: f64 = t.amps().iter().map(|a| a.norm_sqr()).sum();
        assert!((norm - 1.0).abs() < 1e-12);
    }

    #[test]
    fn product_density_is_rank_one() {
        let s = make_state(2, &[(ket("00"), c(1.0))]).unwrap();
        let rho = density(&s);
        assert_eq!(rho.matrix()[(0, 0)], c(1.0));
        assert_eq!(rho.matrix().max_abs(), 1.0);
        assert_eq!(rho.kind(), OperatorKind::State);
    }

    #[test]
    fn ghz_density_corners() {
        let s = make_state(3, &[(ket("000"), c(1.0)), (ket("111"), c(1.0))]).unwrap();
        let rho = density(&s);
        for (i, j) in [(0, 0), (0, 7), (7, 0), (7, 7)] {
            assert!((rho.matrix()[(i, j)] - c(0.5)).norm() < 1e-15);
        }
        assert!(rho.matrix()[(0, 1)].norm() == 0.0);
    }

    #[test]
    fn permutation_examples() {
        let s = make_state(4, &[(ket("0011"), c(1.0))]).unwrap();
        assert_eq!(permute_qubits(&s, &[1, 2, 4, 3]).unwrap(), s);
        assert_eq!(permute_qubits(&s, &[1, 2, 3, 4]).unwrap(), s);
        let t = make_state(3, &[(ket("100"), c(1.0))]).unwrap();
        let u = permute_qubits(&t, &[3, 2, 1]).unwrap();
        assert_eq!(u.amp(ket("001").value()), c(1.0));
        assert!(permute_qubits(&t, &[1, 1, 2]).is_err());
        assert!(permute_qubits(&t, &[1, 2]).is_err());
    }

    #[test]
    fn random_state_is_deterministic() {
        let a = random_state(3, 7).unwrap();
        let b = random_state(3, 7).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, random_state(3, 8).unwrap());
        let norm: f64 = a.amps().iter().map(|x| x.norm_sqr()).sum();
        assert!((norm - 1.0).abs() < 1e-12);
    }

    #[test]
    fn random_unitaries_are_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..50 {
            let u = random_unitary(1, &mut rng);
            assert!(unitarity_defect(u.matrix()) < 1e-13);
            assert!((det2(&random_su2(&mut rng)) - ONE).norm() < 1e-13);
        }
    }
}
