//! Human-readable formatting. Numbers carry 17 significant digits.

use negafont::PureState;
use num_complex::Complex64;

pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn cnum(z: Complex64) -> String {
    let sign = if z.im.is_sign_negative() { '-' } else { '+' };
    format!("{:.16e}{sign}{:.16e}i", z.re, z.im.abs())
}

/// Terms of `state` above `tol` relative to the largest amplitude.
pub fn ket_string(state: &PureState, tol: f64) -> String {
    let terms = state.terms(tol);
    if terms.is_empty() {
        return "0".into();
    }
    terms
        .iter()
        .map(|(b, a)| format!("({}){b}", cnum(*a)))
        .collect::<Vec<_>>()
        .join(" + ")
}

/// Left-aligned columns separated by two spaces.
pub fn table(headers: &[&str], rows: &[Vec<String>]) -> String {
    let mut width: Vec<usize> = headers.iter().map(|h| h.len()).collect();
    for row in rows {
        for (w, cell) in width.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: Vec<String>| {
        let padded: Vec<String> = cells.iter().zip(&width).map(|(c, w)| format!("{c:<w$}")).collect();
        padded.join("  ").trim_end().to_string() + "\n"
    };
    let mut out = line(headers.iter().map(|h| h.to_string()).collect());
    out += &line(width.iter().map(|w| "-".repeat(*w)).collect());
    for row in rows {
        out += &line(row.clone());
    }
    out
}
