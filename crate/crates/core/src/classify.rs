//! Class and subclass assignment from the structure of the global partial
//! transpose of the canonical state.
//!
//! The major class is read off the GPT signature: the set of orders `K` for
//! which the canonical state carries a K-way coherence through the anchor
//! qubit. The subclass is the font census at that qubit.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_complex::Complex64;
use serde::{Serialize, Serializer};

use crate::canonical::{canonicalize3, canonicalize_heuristic, CanonicalForm, HeuristicOptions};
use crate::error::{domain, Error, Result};
use crate::fonts::{det_between, font_census, FontCensus};
use crate::negativity::{global_negativity, kpt_negativity};
use crate::qstate::{qubit_mask, PureState};
use crate::report::CanonicalReport;

/// Schema identifier carried by every JSON report.
pub const SCHEMA_VERSION: &str = "negafont/1";

/// Orders `K` of the coherences that involve qubit `p`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GptSignature {
    pub p: usize,
    pub ks: BTreeSet<usize>,
}

impl GptSignature {
    /// Ranking key for anchor selection: highest order, then set size.
    fn key(&self) -> (usize, usize) {
        (self.ks.iter().next_back().copied().unwrap_or(0), self.ks.len())
    }
}

pub fn gpt_signature(state: &PureState, p: usize, tol: f64) -> Result<GptSignature> {
    state.check_qubit(p)?;
    let mask = qubit_mask(state.n(), p);
    let cut = tol * state.max_abs().powi(2);
    let nz: Vec<(usize, Complex64)> = state
        .amps()
        .iter()
        .copied()
        .enumerate()
        .filter(|(_, a)| a.norm() > 0.0)
        .collect();
    let mut ks = BTreeSet::new();
    for (x, &(i, ai)) in nz.iter().enumerate() {
        for &(j, aj) in &nz[x + 1..] {
            let diff = i ^ j;
            let k = diff.count_ones() as usize;
            if diff & mask != 0 && k >= 2 && (ai * aj).norm() > cut {
                ks.insert(k);
            }
        }
    }
    Ok(GptSignature { p, ks })
}

/// 3-tangle from font determinants of transposed qubit 1:
/// `4 |(D^000 + D^001)^2 - 4 D_(A3)0^00 D_(A3)1^00|`.
pub fn three_tangle(state: &PureState) -> Result<f64> {
    if state.n() != 3 {
        return domain("the 3-tangle is defined for 3 qubits");
    }
    // column labels over qubits 2,3
    let d000 = det_between(state, 1, 0b00, 0b11);
    let d001 = det_between(state, 1, 0b01, 0b10);
    let a3_0 = det_between(state, 1, 0b00, 0b10);
    let a3_1 = det_between(state, 1, 0b01, 0b11);
    let sum = d000 + d001;
    Ok(4.0 * (sum * sum - 4.0 * a3_0 * a3_1).norm())
}

/// Major class label.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ClassLabel {
    CI,
    CII,
    CIII,
    CIV,
    CV,
    CVI,
    CVII,
    /// No qubit carries a coherence of order two or more.
    Separable,
}

impl ClassLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            ClassLabel::CI => "CI",
            ClassLabel::CII => "CII",
            ClassLabel::CIII => "CIII",
            ClassLabel::CIV => "CIV",
            ClassLabel::CV => "CV",
            ClassLabel::CVI => "CVI",
            ClassLabel::CVII => "CVII",
            ClassLabel::Separable => "SEP",
        }
    }

    /// Three-qubit table: `{2,3}` CI, `{3}` CII, `{2}` CIII.
    pub fn for_three(ks: &BTreeSet<usize>) -> Self {
        match ks.iter().copied().collect::<Vec<_>>().as_slice() {
            [2, 3] => ClassLabel::CI,
            [3] => ClassLabel::CII,
            [2] => ClassLabel::CIII,
            _ => ClassLabel::Separable,
        }
    }

    /// Four-qubit table, CI through CVII.
    pub fn for_four(ks: &BTreeSet<usize>) -> Self {
        match ks.iter().copied().collect::<Vec<_>>().as_slice() {
            [2, 3, 4] => ClassLabel::CI,
            [3, 4] => ClassLabel::CII,
            [2, 4] => ClassLabel::CIII,
            [2, 3] => ClassLabel::CIV,
            [4] => ClassLabel::CV,
            [3] => ClassLabel::CVI,
            [2] => ClassLabel::CVII,
            _ => ClassLabel::Separable,
        }
    }
}

impl fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Serialize for ClassLabel {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

/// Per-qubit view of the canonical state.
#[derive(Clone, Debug, Serialize)]
pub struct QubitReport {
    pub qubit: usize,
    pub signature: Vec<usize>,
    pub census: BTreeMap<usize, usize>,
    pub font_sq_sum: f64,
    /// Global negativity for this qubit against the rest.
    pub negativity: f64,
    /// Negativity of each K-way partially transposed operator.
    pub kpt_negativity: BTreeMap<usize, f64>,
}

/// Classification outcome.
#[derive(Clone, Debug, Serialize)]
pub struct ClassReport {
    pub version: &'static str,
    pub n: usize,
    pub class: ClassLabel,
    /// `{"N4": .., "N3": .., "N2": ..}` at the anchor qubit.
    pub subclass: BTreeMap<String, usize>,
    /// Qubit whose signature fixes the class.
    pub anchor_qubit: usize,
    pub per_qubit: Vec<QubitReport>,
    pub tau3: Option<f64>,
    pub separable_qubits: Vec<usize>,
    pub fully_separable: bool,
    /// True when every bipartition has a mixed reduced state.
    pub genuinely_entangled: bool,
    /// Set when qubits have different signatures and the anchor rule decided.
    pub signatures_disagree: bool,
    pub canonicalization: CanonicalReport,
    /// The canonical form came from a search that did not confirm its result.
    pub provisional: bool,
}

/// Options for [`classify`].
#[derive(Clone, Copy, Debug)]
pub struct ClassifyOptions {
    pub tol: f64,
    /// Skip canonicalization for four or more qubits.
    pub assume_canonical: bool,
    pub search: HeuristicOptions,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions {
            tol: crate::qstate::DEFAULT_TOL,
            assume_canonical: false,
            search: HeuristicOptions::default(),
        }
    }
}

/// Bipartitions (as the side containing qubit 1) across which the state is
/// a product, detected by reduced-state purity.
pub fn product_bipartitions(state: &PureState, tol: f64) -> Vec<Vec<usize>> {
    let n = state.n();
    let mut out = vec![];
    // subsets containing qubit 1, excluding the full set
    for bits in 0..(1usize << (n - 1)) - 1 {
        let side: Vec<usize> = std::iter::once(1)
            .chain((2..=n).filter(|q| bits >> (q - 2) & 1 == 1))
            .collect();
        let mask: usize = side.iter().map(|&q| qubit_mask(n, q)).sum();
        let rows = 1usize << side.len();
        let cols = 1usize << (n - side.len());
        // M[r][c] with r indexing the side, c the complement
        let mut m = vec![Complex64::new(0.0, 0.0); rows * cols];
        for (i, a) in state.amps().iter().enumerate() {
            let (r, c) = (pext(i, mask), pext(i, !mask & (state.dim() - 1)));
            m[r * cols + c] = *a;
        }
        // purity = ||M M^dagger||_F^2
        let mut purity = 0.0;
        for r1 in 0..rows {
            for r2 in 0..rows {
                let g: Complex64 = (0..cols).map(|c| m[r1 * cols + c] * m[r2 * cols + c].conj()).sum();
                purity += g.norm_sqr();
            }
        }
        if 1.0 - purity < tol {
            out.push(side);
        }
    }
    out
}

/// Gathers the bits of `x` selected by `mask` into the low bits.
fn pext(x: usize, mask: usize) -> usize {
    let mut out = 0;
    let mut bit = 0;
    for k in 0..usize::BITS {
        if mask >> k & 1 == 1 {
            out |= (x >> k & 1) << bit;
            bit += 1;
        }
    }
    out
}

fn build_report(cf: &CanonicalForm, tol: f64, label_of: fn(&BTreeSet<usize>) -> ClassLabel) -> Result<ClassReport> {
    let s = &cf.state;
    let n = s.n();
    let mut per_qubit = vec![];
    let mut signatures = vec![];
    let mut censuses: Vec<FontCensus> = vec![];
    for p in 1..=n {
        let sig = gpt_signature(s, p, tol)?;
        let census = font_census(s, p, tol)?;
        let negativity = global_negativity(s, p)?;
        let kpt = (2..=n)
            .map(|k| Ok((k, kpt_negativity(s, p, k)?)))
            .collect::<Result<BTreeMap<_, _>>>()?;
        per_qubit.push(QubitReport {
            qubit: p,
            signature: sig.ks.iter().copied().collect(),
            census: census.counts.clone(),
            font_sq_sum: census.total_sq,
            negativity,
            kpt_negativity: kpt,
        });
        signatures.push(sig);
        censuses.push(census);
    }
    let anchor = signatures
        .iter()
        .enumerate()
        .max_by(|(i, a), (j, b)| a.key().cmp(&b.key()).then(j.cmp(i)))
        .map(|(i, _)| i)
        .expect("at least two qubits");
    let class = label_of(&signatures[anchor].ks);
    let subclass = (2..=n)
        .rev()
        .map(|k| (format!("N{k}"), censuses[anchor].count(k)))
        .collect();
    let separable_qubits: Vec<usize> = per_qubit
        .iter()
        .filter(|q| q.negativity < tol)
        .map(|q| q.qubit)
        .collect();
    let signatures_disagree = signatures.windows(2).any(|w| w[0].ks != w[1].ks);
    Ok(ClassReport {
        version: SCHEMA_VERSION,
        n,
        class,
        subclass,
        anchor_qubit: anchor + 1,
        fully_separable: separable_qubits.len() == n,
        genuinely_entangled: product_bipartitions(s, tol).is_empty(),
        separable_qubits,
        per_qubit,
        tau3: None,
        signatures_disagree,
        canonicalization: CanonicalReport::from(cf),
        provisional: !cf.converged,
    })
}

/// Three-qubit classification: exact canonical form, signature label, font
/// census subclass, and the 3-tangle relation check.
pub fn classify3(state: &PureState, tol: f64) -> Result<ClassReport> {
    if state.n() != 3 {
        return domain("classify3 requires exactly 3 qubits");
    }
    let cf = canonicalize3(state)?;
    let mut report = build_report(&cf, tol, ClassLabel::for_three)?;
    let tau = three_tangle(&cf.state)?;
    report.tau3 = Some(tau);
    let ng = report.per_qubit[report.anchor_qubit - 1].negativity;
    let gap = (tau - ng * ng).abs();
    let consistent = match report.class {
        ClassLabel::CI => gap > 1e-9,
        ClassLabel::CII => gap <= 1e-9,
        ClassLabel::CIII | ClassLabel::Separable => tau < tol.max(1e-12),
        _ => unreachable!("three-qubit labels only"),
    };
    if !consistent {
        return Err(Error::Inconsistent(format!(
            "label {} but tau3 = {tau:.12}, N_G^2 = {:.12}",
            report.class,
            ng * ng
        )));
    }
    Ok(report)
}

/// Four-qubit classification. Unless `assume_canonical` is set the state is
/// first canonicalized by the heuristic search; an unconfirmed search marks
/// the report provisional.
pub fn classify4(
    state: &PureState,
    tol: f64,
    assume_canonical: bool,
    search: &HeuristicOptions,
) -> Result<ClassReport> {
    if state.n() != 4 {
        return domain("classify4 requires exactly 4 qubits");
    }
    let cf = if assume_canonical {
        canonicalize_heuristic(
            state,
            &HeuristicOptions {
                max_restarts: 0,
                ..*search
            },
        )?
    } else {
        canonicalize_heuristic(state, &HeuristicOptions { tol, ..*search })?
    };
    build_report(&cf, tol, ClassLabel::for_four)
}

/// Dispatches on the qubit count.
pub fn classify(state: &PureState, opts: &ClassifyOptions) -> Result<ClassReport> {
    match state.n() {
        3 => classify3(state, opts.tol),
        4 => classify4(state, opts.tol, opts.assume_canonical, &opts.search),
        n => domain(format!("class labels are defined for 3 and 4 qubits, not {n}")),
    }
}

/// `(major classes, N-partite entanglement types)` for `n` qubits:
/// `2^(n-1) - 1` and `2^(n-1) - n + 2`. For two qubits the single class
/// `{2}` is also the single type.
pub fn count_classes(n: usize) -> Result<(u64, u64)> {
    if n < 2 {
        return domain("need at least 2 qubits");
    }
    if n > 63 {
        return domain("qubit count too large to count classes");
    }
    if n == 2 {
        return Ok((1, 1));
    }
    let half = 1u64 << (n - 1);
    Ok((half - 1, half - n as u64 + 2))
}
