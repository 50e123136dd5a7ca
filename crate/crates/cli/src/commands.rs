use std::fmt::Write;

use negafont::canonical::slocc_reduce;
use negafont::report::{pair, CanonicalReport, FontRecord, OpRecord};
use negafont::{
    canonicalize, classify, cluster_invariant, count_classes, decomposition_residual, density, enumerate_fonts,
    font_total_identity, global_negativity, global_pt, kpt_negativity, kway_pt, negativity_of, parse_lines,
    parse_state, three_tangle, ClassReport, ClassifyOptions, Error, HeuristicOptions, PureState,
};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::text::{cnum, ket_string, num, table};
use crate::{ClassifyArgs, CliError, Command};

type Out = Result<String, CliError>;

const SCHEMA: &str = negafont::classify::SCHEMA_VERSION;

/// The `--state` text of a command, for caret diagnostics.
pub fn state_text(cmd: &Command) -> Option<&str> {
    match cmd {
        Command::Classify(a) => a.state.as_deref(),
        Command::Fonts { state, .. }
        | Command::Transpose { state, .. }
        | Command::Negativity { state, .. }
        | Command::Canonicalize { state, .. }
        | Command::Invariants { state, .. } => Some(&state.state),
        Command::Count { .. } => None,
    }
}

pub fn run(cmd: &Command) -> Out {
    match cmd {
        Command::Classify(args) => classify_cmd(args),
        Command::Fonts {
            state,
            qubit,
            k,
            tol,
            json,
        } => fonts_cmd(&parse_state(&state.state)?, *qubit, *k, *tol, *json),
        Command::Transpose {
            state,
            qubit,
            k,
            dump,
            json,
        } => transpose_cmd(&parse_state(&state.state)?, *qubit, *k, *dump, *json),
        Command::Negativity { state, qubit, json } => negativity_cmd(&parse_state(&state.state)?, *qubit, *json),
        Command::Canonicalize {
            state,
            restarts,
            seed,
            tol,
            slocc,
            json,
        } => {
            let opts = HeuristicOptions {
                max_restarts: *restarts,
                tol: *tol,
                seed: *seed,
            };
            canonicalize_cmd(&parse_state(&state.state)?, &opts, *slocc, *json)
        }
        Command::Invariants { state, json } => invariants_cmd(&parse_state(&state.state)?, *json),
        Command::Count { n, json } => count_cmd(*n, *json),
    }
}

fn check_tol(tol: f64) -> Result<(), CliError> {
    if tol.is_finite() && tol >= 0.0 {
        Ok(())
    } else {
        Err(CliError::Usage(format!(
            "--tol must be a nonnegative number, got {tol}"
        )))
    }
}

fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("report types serialize") + "\n"
}

fn classify_cmd(args: &ClassifyArgs) -> Out {
    check_tol(args.tol)?;
    let opts = ClassifyOptions {
        tol: args.tol,
        assume_canonical: args.assume_canonical,
        search: HeuristicOptions {
            max_restarts: args.restarts,
            tol: args.tol,
            seed: args.seed,
        },
    };
    if let Some(path) = &args.file {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
        return Ok(batch(&text, &opts));
    }
    let state = parse_state(args.state.as_deref().expect("clap requires --state or --file"))?;
    let report = classify(&state, &opts)?;
    Ok(if args.json {
        to_json(&report)
    } else {
        classify_text(&report, args.tol)
    })
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::Parse(_) => "parse",
        Error::InvalidState(_) => "invalid_state",
        Error::Domain(_) => "domain",
        Error::Numeric(_) | Error::DegenerateSlot | Error::NoSolution(_) => "numeric",
        Error::Inconsistent(_) => "inconsistent",
    }
}

/// One JSON record per input line, in input order. Failing lines produce
/// error records.
pub fn batch(text: &str, opts: &ClassifyOptions) -> String {
    let lines = parse_lines(text);
    let records: Vec<Value> = lines
        .par_iter()
        .map(|(line, input, parsed)| {
            let outcome = parsed
                .clone()
                .map_err(Error::from)
                .and_then(|e| e.to_state())
                .and_then(|s| classify(&s, opts));
            let mut record = match outcome {
                Ok(report) => serde_json::to_value(&report).expect("report serializes"),
                Err(e) => {
                    let mut err = json!({"kind": error_kind(&e), "message": e.to_string()});
                    if let Error::Parse(p) = &e {
                        err["offset"] = json!(p.offset);
                    }
                    json!({"version": SCHEMA, "error": err})
                }
            };
            record["line"] = json!(line);
            record["input"] = json!(input);
            record
        })
        .collect();
    records.iter().map(to_json).collect()
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn classify_text(r: &ClassReport, tol: f64) -> String {
    let mut out = String::new();
    let sub: Vec<String> = r.subclass.iter().rev().map(|(k, v)| format!("{k}={v}")).collect();
    let _ = writeln!(out, "class: {}", r.class);
    let _ = writeln!(out, "subclass: {}", sub.join(" "));
    let _ = writeln!(out, "anchor qubit: {}", r.anchor_qubit);
    if let Some(t) = r.tau3 {
        let _ = writeln!(out, "tau3: {}", num(t));
    }
    let sep = if r.separable_qubits.is_empty() {
        "none".to_string()
    } else {
        r.separable_qubits
            .iter()
            .map(usize::to_string)
            .collect::<Vec<_>>()
            .join(", ")
    };
    let _ = writeln!(out, "separable qubits: {sep}");
    let _ = writeln!(out, "genuinely entangled: {}", yes_no(r.genuinely_entangled));
    if r.signatures_disagree {
        let _ = writeln!(out, "note: qubit signatures differ; class taken from the anchor qubit");
    }
    let _ = writeln!(out, "provisional: {}", yes_no(r.provisional));
    let amps: Vec<num_complex::Complex64> = r
        .canonicalization
        .canonical_amps
        .iter()
        .map(|[re, im]| num_complex::Complex64::new(*re, *im))
        .collect();
    if let Ok(cs) = PureState::from_amplitudes(r.n, amps) {
        let _ = writeln!(out, "canonical form: {}", ket_string(&cs, tol));
    }
    out.push('\n');
    let rows: Vec<Vec<String>> = r
        .per_qubit
        .iter()
        .map(|q| {
            let sig = q.signature.iter().map(usize::to_string).collect::<Vec<_>>().join(",");
            let census = q
                .census
                .iter()
                .rev()
                .map(|(k, c)| format!("N{k}={c}"))
                .collect::<Vec<_>>()
                .join(" ");
            vec![q.qubit.to_string(), format!("{{{sig}}}"), num(q.negativity), census]
        })
        .collect();
    out + &table(&["qubit", "signature", "N_G", "fonts"], &rows)
}

fn fonts_cmd(s: &PureState, p: usize, k: Option<usize>, tol: f64, json: bool) -> Out {
    check_tol(tol)?;
    let fonts = enumerate_fonts(s, p, k)?;
    if json {
        let records: Vec<FontRecord> = fonts.iter().map(FontRecord::from).collect();
        return Ok(to_json(&json!({"version": SCHEMA, "p": p, "fonts": records})));
    }
    let cut = tol * s.max_abs().powi(2);
    let nonzero = fonts.iter().filter(|f| f.det.norm() > cut).count();
    let rows: Vec<Vec<String>> = fonts
        .iter()
        .map(|f| {
            let flips = f.flips.iter().map(usize::to_string).collect::<Vec<_>>().join(",");
            let spect = f
                .spectators
                .iter()
                .map(|(q, v)| format!("{q}={v}"))
                .collect::<Vec<_>>()
                .join(",");
            let base: String = f.base.iter().map(u8::to_string).collect();
            vec![
                f.order().to_string(),
                flips,
                spect,
                base,
                cnum(f.det),
                num(f.det.norm()),
            ]
        })
        .collect();
    let mut out = table(&["K", "flips", "spectators", "base", "det", "|det|"], &rows);
    let _ = writeln!(out, "{} fonts, {nonzero} with nonzero det", fonts.len());
    Ok(out)
}

fn transpose_cmd(s: &PureState, p: usize, k: Option<usize>, dump: bool, json: bool) -> Out {
    let rho = density(s);
    let op = match k {
        Some(k) => kway_pt(&rho, p, k)?,
        None => global_pt(&rho, p)?,
    };
    let negativity = negativity_of(&op)?;
    let (_, residual) = decomposition_residual(&rho, p)?;
    let dim = op.matrix().dim();
    if json {
        let mut v = json!({
            "version": SCHEMA, "p": p, "K": k, "dim": dim,
            "negativity": negativity, "residual_max": residual,
        });
        if dump {
            let m: Vec<[f64; 2]> = op.matrix().as_slice().iter().copied().map(pair).collect();
            v["matrix"] = json!(m);
        }
        return Ok(to_json(&v));
    }
    let mut out = String::new();
    let what = k.map_or("global".to_string(), |k| format!("{k}-way"));
    let _ = writeln!(out, "{what} partial transpose on qubit {p} ({dim}x{dim})");
    let _ = writeln!(out, "negativity: {}", num(negativity));
    let _ = writeln!(out, "decomposition residual (max |entry|): {}", num(residual));
    if dump {
        for i in 0..dim {
            let row: Vec<String> = (0..dim).map(|j| cnum(op.matrix()[(i, j)])).collect();
            let _ = writeln!(out, "{}", row.join("  "));
        }
    }
    Ok(out)
}

#[derive(Serialize)]
struct NegRow {
    qubit: usize,
    global: f64,
    kway: std::collections::BTreeMap<usize, f64>,
}

fn negativity_cmd(s: &PureState, qubit: Option<usize>, json: bool) -> Out {
    let qubits: Vec<usize> = match qubit {
        Some(q) => {
            s.check_qubit(q)?;
            vec![q]
        }
        None => (1..=s.n()).collect(),
    };
    let rows = qubits
        .iter()
        .map(|&q| {
            let kway = (2..=s.n())
                .map(|k| Ok((k, kpt_negativity(s, q, k)?)))
                .collect::<negafont::Result<_>>()?;
            Ok(NegRow {
                qubit: q,
                global: global_negativity(s, q)?,
                kway,
            })
        })
        .collect::<negafont::Result<Vec<_>>>()?;
    if json {
        return Ok(to_json(&json!({"version": SCHEMA, "n": s.n(), "qubits": rows})));
    }
    let mut headers = vec!["qubit".to_string(), "N_G".to_string()];
    headers.extend((2..=s.n()).map(|k| format!("N(K={k})")));
    let cells: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            let mut row = vec![r.qubit.to_string(), num(r.global)];
            row.extend(r.kway.values().map(|v| num(*v)));
            row
        })
        .collect();
    let h: Vec<&str> = headers.iter().map(String::as_str).collect();
    Ok(table(&h, &cells))
}

fn canonicalize_cmd(s: &PureState, opts: &HeuristicOptions, slocc: bool, json: bool) -> Out {
    check_tol(opts.tol)?;
    let cf = canonicalize(s, opts)?;
    let reduced = if slocc {
        Some(slocc_reduce(&cf.state, opts.tol)?)
    } else {
        None
    };
    if json {
        let mut v = serde_json::to_value(CanonicalReport::from(&cf)).expect("serializes");
        v["version"] = json!(SCHEMA);
        if let Some((r, ops)) = &reduced {
            v["slocc"] = json!({
                "amps": r.amps().iter().copied().map(pair).collect::<Vec<_>>(),
                "lbp_count": r.lbp_count(opts.tol),
                "ops": ops.iter().map(OpRecord::from).collect::<Vec<_>>(),
            });
        }
        return Ok(to_json(&v));
    }
    let mut out = String::new();
    let o = cf.objective;
    let _ = writeln!(out, "canonical form: {}", ket_string(&cf.state, opts.tol));
    let _ = writeln!(out, "terms: {}", cf.lbp_count);
    let _ = writeln!(out, "objective: ({}, {}, {})", o.lbp, o.neg_max_order, o.fonts);
    let _ = writeln!(
        out,
        "restarts: {}  confirmed: {}",
        cf.restarts_used,
        yes_no(cf.converged)
    );
    let _ = writeln!(out, "operators: {}", cf.ops.len());
    for op in &cf.ops {
        let m = op.matrix();
        let _ = writeln!(
            out,
            "  qubit {} [{:?}]: [[{}, {}], [{}, {}]]",
            op.qubit(),
            op.kind(),
            cnum(m[0][0]),
            cnum(m[0][1]),
            cnum(m[1][0]),
            cnum(m[1][1])
        );
    }
    if let Some((r, ops)) = &reduced {
        let _ = writeln!(
            out,
            "SLOCC reduced ({} operators): {}",
            ops.len(),
            ket_string(r, opts.tol)
        );
        let _ = writeln!(out, "SLOCC terms: {}", r.lbp_count(opts.tol));
    }
    Ok(out)
}

fn invariants_cmd(s: &PureState, json: bool) -> Out {
    let tau3 = if s.n() == 3 { Some(three_tangle(s)?) } else { None };
    let cluster = if s.n() >= 3 { Some(cluster_invariant(s)?) } else { None };
    let ident = (1..=s.n())
        .map(|p| {
            let (l, r) = font_total_identity(s, p)?;
            Ok(json!({"p": p, "ng_sq": l, "four_sum_det_sq": r, "difference": (l - r).abs()}))
        })
        .collect::<negafont::Result<Vec<_>>>()?;
    if json {
        return Ok(to_json(&json!({
            "version": SCHEMA, "n": s.n(), "tau3": tau3,
            "cluster_invariant": cluster.map(pair), "font_sum": ident,
        })));
    }
    let mut out = String::new();
    if let Some(t) = tau3 {
        let _ = writeln!(out, "tau3: {}", num(t));
    }
    if let Some(c) = cluster {
        let _ = writeln!(out, "cluster invariant: {}", cnum(c));
    }
    let rows: Vec<Vec<String>> = ident
        .iter()
        .map(|v| {
            let f = |k: &str| num(v[k].as_f64().unwrap_or(f64::NAN));
            vec![v["p"].to_string(), f("ng_sq"), f("four_sum_det_sq"), f("difference")]
        })
        .collect();
    out += &table(&["qubit", "N_G^2", "4 sum |D|^2", "difference"], &rows);
    Ok(out)
}

fn count_cmd(n: usize, json: bool) -> Out {
    let (classes, types) = count_classes(n)?;
    Ok(if json {
        to_json(&json!({"version": SCHEMA, "n": n, "major_classes": classes, "n_partite_types": types}))
    } else {
        format!("major classes: {classes}, N-partite types: {types}\n")
    })
}
