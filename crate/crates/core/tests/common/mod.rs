//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use nalgebra::DMatrix;
use negafont::{CMatrix, PureState};
use num_complex::Complex64;

/// Hermitian spectrum from nalgebra, sorted descending.
pub fn oracle_eigs(m: &CMatrix) -> Vec<f64> {
    let d = m.dim();
    let mat = DMatrix::from_fn(d, d, |i, j| m[(i, j)]);
    let mut ev: Vec<f64> = mat.symmetric_eigen().eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| b.total_cmp(a));
    ev
}

/// Density matrix `|psi><psi|`, built entrywise.
pub fn oracle_density(s: &PureState) -> Vec<Vec<Complex64>> {
    let a = s.amps();
    a.iter().map(|x| a.iter().map(|y| x * y.conj()).collect()).collect()
}

/// All 2x2 minors of the amplitude matrix whose rows are indexed by qubit
/// `p` and whose columns by the bit strings of the other qubits.
pub fn oracle_minors(s: &PureState, p: usize) -> Vec<(usize, Complex64)> {
    let n = s.n();
    let amp = |row: char, col: &str| {
        let mut bits: String = col.to_string();
        bits.insert(p - 1, row);
        s.amp(usize::from_str_radix(&bits, 2).unwrap())
    };
    let cols: Vec<String> = (0..1usize << (n - 1)).map(|c| format!("{c:0w$b}", w = n - 1)).collect();
    let mut out = vec![];
    for i in 0..cols.len() {
        for j in i + 1..cols.len() {
            let k = cols[i].chars().zip(cols[j].chars()).filter(|(a, b)| a != b).count() + 1;
            let d = amp('0', &cols[i]) * amp('1', &cols[j]) - amp('1', &cols[i]) * amp('0', &cols[j]);
            out.push((k, d));
        }
    }
    out
}

/// Cayley hyperdeterminant of a 2x2x2 tensor; the 3-tangle is `4 |Det|`.
pub fn oracle_tangle(s: &PureState) -> f64 {
    let a = |b: &str| s.amp(usize::from_str_radix(b, 2).unwrap());
    let d1 = a("000").powi(2) * a("111").powi(2)
        + a("001").powi(2) * a("110").powi(2)
        + a("010").powi(2) * a("101").powi(2)
        + a("100").powi(2) * a("011").powi(2);
    let d2 = a("000") * a("111") * a("011") * a("100")
        + a("000") * a("111") * a("101") * a("010")
        + a("000") * a("111") * a("110") * a("001")
        + a("011") * a("100") * a("101") * a("010")
        + a("011") * a("100") * a("110") * a("001")
        + a("101") * a("010") * a("110") * a("001");
    let d3 = a("000") * a("110") * a("101") * a("011") + a("111") * a("001") * a("010") * a("100");
    4.0 * (d1 - 2.0 * d2 + 4.0 * d3).norm()
}

/// Counts by enumerating signatures: nonempty subsets of `{2..n}` are the
/// major classes; singletons `{K}` with `2 < K < n` leave the state
/// factorized into smaller GHZ-like parts and are not N-partite types.
pub fn oracle_class_counts(n: usize) -> (u64, u64) {
    let orders: Vec<usize> = (2..=n).collect();
    let (mut classes, mut types) = (0, 0);
    for bits in 1..1u64 << orders.len() {
        let set: Vec<usize> = orders
            .iter()
            .enumerate()
            .filter(|(i, _)| bits >> i & 1 == 1)
            .map(|(_, &k)| k)
            .collect();
        classes += 1;
        if !(set.len() == 1 && set[0] > 2 && set[0] < n) {
            types += 1;
        }
    }
    (classes, types)
}

pub fn binom(n: u64, k: u64) -> u64 {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}
