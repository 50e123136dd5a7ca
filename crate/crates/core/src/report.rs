//! Serializable records for fonts, operators and canonical forms. Complex
//! numbers are written as `[re, im]`.

use num_complex::Complex64;
use serde::Serialize;

use crate::canonical::{CanonicalForm, Objective};
use crate::fonts::NegativityFont;
use crate::qstate::{LocalOperator, OpKind};

pub fn pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

#[derive(Clone, Debug, Serialize)]
pub struct OpRecord {
    pub qubit: usize,
    /// Row-major 2x2 matrix.
    pub matrix: [[[f64; 2]; 2]; 2],
    pub kind: OpKind,
}

impl From<&LocalOperator> for OpRecord {
    fn from(op: &LocalOperator) -> Self {
        OpRecord {
            qubit: op.qubit(),
            matrix: op.matrix().map(|row| row.map(pair)),
            kind: op.kind(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CanonicalReport {
    pub canonical_amps: Vec<[f64; 2]>,
    pub lbp_count: usize,
    pub ops: Vec<OpRecord>,
    pub objective: Objective,
    pub restarts_used: usize,
    pub converged: bool,
}

impl From<&CanonicalForm> for CanonicalReport {
    fn from(cf: &CanonicalForm) -> Self {
        CanonicalReport {
            canonical_amps: cf.state.amps().iter().copied().map(pair).collect(),
            lbp_count: cf.lbp_count,
            ops: cf.ops.iter().map(OpRecord::from).collect(),
            objective: cf.objective,
            restarts_used: cf.restarts_used,
            converged: cf.converged,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FontRecord {
    pub p: usize,
    #[serde(rename = "K")]
    pub k: usize,
    pub flips: Vec<usize>,
    pub spectators: Vec<(usize, u8)>,
    pub base: Vec<u8>,
    /// `a(0,base), a(0,comp), a(1,base), a(1,comp)`.
    pub entries: [[f64; 2]; 4],
    pub det: [f64; 2],
}

impl From<&NegativityFont> for FontRecord {
    fn from(f: &NegativityFont) -> Self {
        let e = f.entries;
        FontRecord {
            p: f.p,
            k: f.order(),
            flips: f.flips.clone(),
            spectators: f.spectators.clone(),
            base: f.base.clone(),
            entries: [pair(e[0][0]), pair(e[0][1]), pair(e[1][0]), pair(e[1][1])],
            det: pair(f.det),
        }
    }
}
