//! Negativity fonts: 2x2 amplitude submatrices whose rows differ in the
//! transposed qubit and whose columns differ in `K - 1` further qubits.
//!
//! Arrange the amplitudes as a `2 x 2^(n-1)` matrix with rows indexed by the
//! transposed qubit `p` and columns by the remaining qubits. Fonts are in
//! bijection with unordered pairs of distinct columns; the order `K` of a
//! font is one more than the Hamming distance between its column labels.
//! Column labels are stored as basis indices with qubit `p` cleared.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{domain, Result};
use crate::negativity::global_negativity;
use crate::qstate::{bit_of, qubit_mask, PureState};

/// One negativity font for transposed qubit `p`.
#[derive(Clone, Debug, PartialEq)]
pub struct NegativityFont {
    pub p: usize,
    /// Qubits that differ between the two columns, plus `p`; ascending.
    pub flips: Vec<usize>,
    /// Qubits held fixed, with their values; ascending by qubit.
    pub spectators: Vec<(usize, u8)>,
    /// Left-column assignment of `flips \ {p}`, in qubit order.
    pub base: Vec<u8>,
    /// `[[a(0,base), a(0,comp)], [a(1,base), a(1,comp)]]`.
    pub entries: [[Complex64; 2]; 2],
    /// Basis indices of the four entries, same layout as `entries`.
    pub cells: [[usize; 2]; 2],
    pub det: Complex64,
}

impl NegativityFont {
    pub fn order(&self) -> usize {
        self.flips.len()
    }

    /// Column labels (basis index with qubit `p` cleared) of base and complement.
    pub fn columns(&self) -> (usize, usize) {
        (self.cells[0][0], self.cells[0][1])
    }
}

/// Determinant of the font formed by columns `col_a` (left) and `col_b`
/// (right) for transposed qubit `p`. Bit `p` of the labels is ignored.
pub fn det_between(state: &PureState, p: usize, col_a: usize, col_b: usize) -> Complex64 {
    let mask = qubit_mask(state.n(), p);
    let (a, b) = (col_a & !mask, col_b & !mask);
    state.amp(a) * state.amp(b | mask) - state.amp(a | mask) * state.amp(b)
}

fn build_font(state: &PureState, p: usize, base: usize, comp: usize) -> NegativityFont {
    let n = state.n();
    let mask = qubit_mask(n, p);
    let diff = base ^ comp;
    let mut flips = vec![];
    let mut spectators = vec![];
    let mut base_bits = vec![];
    for q in 1..=n {
        if q == p {
            flips.push(q);
        } else if diff & qubit_mask(n, q) != 0 {
            flips.push(q);
            base_bits.push(bit_of(base, n, q) as u8);
        } else {
            spectators.push((q, bit_of(base, n, q) as u8));
        }
    }
    let cells = [[base, comp], [base | mask, comp | mask]];
    let entries = cells.map(|row| row.map(|i| state.amp(i)));
    let det = entries[0][0] * entries[1][1] - entries[1][0] * entries[0][1];
    NegativityFont {
        p,
        flips,
        spectators,
        base: base_bits,
        entries,
        cells,
        det,
    }
}

/// All fonts for transposed qubit `p`, optionally restricted to order `k`.
/// Sorted by flips, then spectators, then base.
pub fn enumerate_fonts(state: &PureState, p: usize, k: Option<usize>) -> Result<Vec<NegativityFont>> {
    state.check_qubit(p)?;
    let n = state.n();
    if let Some(k) = k {
        if k < 2 || k > n {
            return domain(format!("K = {k} outside 2..={n}"));
        }
    }
    let mask = qubit_mask(n, p);
    let columns: Vec<usize> = (0..state.dim()).filter(|i| i & mask == 0).collect();
    let mut fonts = vec![];
    for (x, &a) in columns.iter().enumerate() {
        for &b in &columns[x + 1..] {
            let order = (a ^ b).count_ones() as usize + 1;
            if k.is_none_or(|k| k == order) {
                fonts.push(build_font(state, p, a, b));
            }
        }
    }
    fonts.sort_by(|f, g| {
        f.flips
            .cmp(&g.flips)
            .then_with(|| f.spectators.cmp(&g.spectators))
            .then_with(|| f.base.cmp(&g.base))
    });
    Ok(fonts)
}

/// Per-order counts of fonts with nonvanishing determinant.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FontCensus {
    pub p: usize,
    /// `K -> number of order-K fonts with |det| > tol * max|a|^2`, for K = 2..=n.
    pub counts: BTreeMap<usize, usize>,
    /// Sum of `|det|^2` over all fonts, without threshold.
    pub total_sq: f64,
}

impl FontCensus {
    pub fn count(&self, k: usize) -> usize {
        self.counts.get(&k).copied().unwrap_or(0)
    }

    pub fn total_nonzero(&self) -> usize {
        self.counts.values().sum()
    }

    /// Highest order with at least one nonzero font.
    pub fn max_order(&self) -> Option<usize> {
        self.counts.iter().rev().find(|(_, &c)| c > 0).map(|(&k, _)| k)
    }
}

pub fn font_census(state: &PureState, p: usize, tol: f64) -> Result<FontCensus> {
    let fonts = enumerate_fonts(state, p, None)?;
    let cut = tol * state.max_abs().powi(2);
    let mut counts: BTreeMap<usize, usize> = (2..=state.n()).map(|k| (k, 0)).collect();
    let mut total_sq = 0.0;
    for f in &fonts {
        let mag = f.det.norm();
        total_sq += mag * mag;
        if mag > cut {
            *counts.entry(f.order()).or_default() += 1;
        }
    }
    Ok(FontCensus { p, counts, total_sq })
}

/// `(N_G^2, 4 * sum |det|^2)` for transposed qubit `p`; the two agree for
/// every pure state.
pub fn font_total_identity(state: &PureState, p: usize) -> Result<(f64, f64)> {
    let ng = global_negativity(state, p)?;
    let census = font_census(state, p, 0.0)?;
    Ok((ng * ng, 4.0 * census.total_sq))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::{make_state, BasisIndex};

    fn st(n: usize, kets: &[&str]) -> PureState {
        let t: Vec<_> = kets
            .iter()
            .map(|b| (BasisIndex::from_bits(b).unwrap(), Complex64::new(1.0, 0.0)))
            .collect();
        make_state(n, &t).unwrap()
    }

    #[test]
    fn three_qubit_font_list() {
        let s = st(3, &["000", "111"]);
        let fonts = enumerate_fonts(&s, 1, None).unwrap();
        assert_eq!(fonts.len(), 6);
        assert_eq!(fonts.iter().filter(|f| f.order() == 3).count(), 2);
        assert_eq!(fonts.iter().filter(|f| f.order() == 2).count(), 4);
        let three: Vec<_> = fonts.iter().filter(|f| f.order() == 3).collect();
        // D^{000} then D^{001}
        assert_eq!(three[0].base, vec![0, 0]);
        assert_eq!(three[0].cells, [[0, 3], [4, 7]]);
        assert_eq!(three[1].base, vec![0, 1]);
        assert_eq!(three[1].cells, [[1, 2], [5, 6]]);
        assert!((three[0].det - 0.5).norm() < 1e-15);
    }

    #[test]
    fn spectator_labels() {
        let s = st(3, &["000", "111"]);
        let two = enumerate_fonts(&s, 1, Some(2)).unwrap();
        // flips {1,2} with qubit 3 spectator, then flips {1,3} with qubit 2 spectator
        assert_eq!(two[0].flips, vec![1, 2]);
        assert_eq!(two[0].spectators, vec![(3, 0)]);
        assert_eq!(two[1].spectators, vec![(3, 1)]);
        assert_eq!(two[2].flips, vec![1, 3]);
        assert_eq!(two[2].spectators, vec![(2, 0)]);
    }

    #[test]
    fn ghz4_single_nonzero_four_way_font() {
        let s = st(4, &["0000", "1111"]);
        let fonts = enumerate_fonts(&s, 1, Some(4)).unwrap();
        assert_eq!(fonts.len(), 4);
        let nz: Vec<_> = fonts.iter().filter(|f| f.det.norm() > 1e-12).collect();
        assert_eq!(nz.len(), 1);
        assert!((nz[0].det - 0.5).norm() < 1e-15);
    }

    #[test]
    fn w3_three_way_fonts_vanish() {
        let s = st(3, &["001", "010", "100"]);
        for f in enumerate_fonts(&s, 1, Some(3)).unwrap() {
            assert_eq!(f.det.norm(), 0.0);
        }
    }

    #[test]
    fn table_one_censuses() {
        let ghz = font_census(&st(3, &["000", "111"]), 1, 1e-10).unwrap();
        assert_eq!((ghz.count(3), ghz.count(2)), (1, 0));
        let ci = st(3, &["000", "111", "110"]);
        let census = font_census(&ci, 1, 1e-10).unwrap();
        assert_eq!((census.count(3), census.count(2)), (1, 1));
        let d000 = det_between(&ci, 1, 0b000, 0b011);
        assert!((d000 - 1.0 / 3.0).norm() < 1e-15);
        let w = font_census(&st(3, &["000", "110", "101"]), 1, 1e-10).unwrap();
        assert_eq!((w.count(3), w.count(2)), (0, 2));
    }

    #[test]
    fn identity_examples() {
        let (l, r) = font_total_identity(&st(3, &["000", "111"]), 1).unwrap();
        assert!((l - 1.0).abs() < 1e-12 && (r - 1.0).abs() < 1e-12);
        let (l, r) = font_total_identity(&st(3, &["001", "010", "100"]), 1).unwrap();
        assert!((l - 8.0 / 9.0).abs() < 1e-12 && (r - 8.0 / 9.0).abs() < 1e-12);
        let (l, r) = font_total_identity(&st(3, &["000", "001", "010", "011"]), 2).unwrap();
        assert!(l.abs() < 1e-12 && r.abs() < 1e-12);
    }

    #[test]
    fn bad_order_is_rejected() {
        let s = st(3, &["000", "111"]);
        assert!(enumerate_fonts(&s, 1, Some(1)).is_err());
        assert!(enumerate_fonts(&s, 1, Some(4)).is_err());
        assert!(enumerate_fonts(&s, 5, None).is_err());
    }
}
