//! Acceptance suite: one PASS/FAIL line per criterion. Exits nonzero if any
//! criterion fails.

mod common;

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::Instant;

use common::{binom, oracle_class_counts, oracle_eigs, oracle_minors, oracle_tangle};
use negafont::canonical::zero_slot_unitary;
use negafont::qstate::{qubit_mask, random_real_state, random_su2, random_unitary};
use negafont::{
    apply_local, canonicalize3, canonicalize_heuristic, classify3, classify4, cluster_invariant, count_classes,
    decomposition_residual, density, enumerate_fonts, font_total_identity, global_negativity, global_pt, gpt_signature,
    kpt_negativity, make_state, parse_ket, parse_state, random_lu_disguise, random_state, BasisIndex, ClassLabel,
    HeuristicOptions, KetExpression, LocalOperator, PureState,
};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {{
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($msg)+));
        }
    }};
}

const TOL: f64 = 1e-10;

fn ket(text: &str) -> PureState {
    parse_state(text).unwrap_or_else(|e| panic!("{text}: {e}"))
}

fn table_one() -> Outcome {
    let rows = [
        ("|000>+|111>+|110>", ClassLabel::CI, (1, 1)),
        ("|000>+|111>", ClassLabel::CII, (1, 0)),
        ("|000>+|110>+|101>", ClassLabel::CIII, (0, 2)),
    ];
    for (text, label, (n3, n2)) in rows {
        let s = ket(text);
        let r = classify3(&s, TOL).map_err(|e| format!("{text}: {e}"))?;
        ensure!(r.class == label, "{text}: got {} expected {label}", r.class);
        ensure!(
            (r.subclass["N3"], r.subclass["N2"]) == (n3, n2),
            "{text}: census {:?}",
            r.subclass
        );
        let tau = r.tau3.unwrap();
        ensure!(
            (tau - oracle_tangle(&s)).abs() < 1e-12,
            "{text}: tau3 {tau} vs hyperdeterminant"
        );
        let ng = global_negativity(&s, r.anchor_qubit).map_err(|e| e.to_string())?;
        match label {
            ClassLabel::CI => {
                ensure!((tau - 4.0 / 9.0).abs() < 1e-10, "CI tau3 = {tau}");
                ensure!((ng * ng - 8.0 / 9.0).abs() < 1e-10, "CI N_G^2 = {}", ng * ng);
            }
            ClassLabel::CII => {
                ensure!(
                    (tau - 1.0).abs() < 1e-9 && (ng * ng - 1.0).abs() < 1e-9,
                    "CII tau3 {tau}, N_G^2 {}",
                    ng * ng
                )
            }
            _ => ensure!(tau < 1e-10, "CIII tau3 = {tau}"),
        }
    }
    Ok("CI/CII/CIII with censuses {1,1}/{1,0}/{0,2}; tau3 = 4/9, 1, 0".into())
}

fn table_two() -> Outcome {
    let rows = [
        ("|0000>+|1111>+|1110>+|1100>", ClassLabel::CI),
        ("|0000>+|1111>+|1110>", ClassLabel::CII),
        ("|0000>+|1111>+|1100>", ClassLabel::CIII),
        ("|0000>+|1111>+0.7|1100>+1.3|0011>", ClassLabel::CIII),
        ("|0000>+|1111>+(0.4-0.9i)|1100>+2.2|0011>", ClassLabel::CIII),
        ("|0000>+|1110>+|1101>", ClassLabel::CIV),
        ("|0000>+|1111>", ClassLabel::CV),
        ("|0000>+|1110>", ClassLabel::CVI),
        ("|0000>+|1100>+|1010>+|1001>", ClassLabel::CVII),
    ];
    let opts = HeuristicOptions::default();
    for (text, label) in rows {
        let r = classify4(&ket(text), TOL, true, &opts).map_err(|e| format!("{text}: {e}"))?;
        ensure!(r.class == label, "{text}: got {} expected {label}", r.class);
        if label == ClassLabel::CVI {
            ensure!(
                r.separable_qubits == vec![4],
                "CVI separable qubits {:?}",
                r.separable_qubits
            );
        }
    }
    Ok(format!(
        "{} representatives labelled; CVI qubit 4 separable",
        rows.len()
    ))
}

fn counting() -> Outcome {
    for (n, want) in [(3, (3, 3)), (4, (7, 6)), (5, (15, 13))] {
        let got = count_classes(n).map_err(|e| e.to_string())?;
        ensure!(got == want, "n={n}: {got:?}");
        ensure!(
            got == oracle_class_counts(n),
            "n={n}: disagrees with subset enumeration"
        );
    }
    Ok("(3,3) (7,6) (15,13)".into())
}

fn decomposition() -> Outcome {
    let mut worst_real: f64 = 0.0;
    let mut worst_complex: f64 = 0.0;
    for n in 2..=6 {
        for seed in 0..100 {
            let real = random_real_state(n, seed).unwrap();
            let cplx = random_state(n, 1000 + seed).unwrap();
            for p in 1..=n {
                let (_, r) = decomposition_residual(&density(&real), p).map_err(|e| e.to_string())?;
                worst_real = worst_real.max(r);
                let rho = common::oracle_density(&cplx);
                let (res, _) = decomposition_residual(&density(&cplx), p).map_err(|e| e.to_string())?;
                let m = qubit_mask(n, p);
                for i in 0..1usize << n {
                    for j in 0..1usize << n {
                        let d = i ^ j;
                        let expected = if d.count_ones() == 1 && d & m != 0 {
                            rho[j][i] - rho[i][j]
                        } else {
                            Complex64::new(0.0, 0.0)
                        };
                        worst_complex = worst_complex.max((res[(i, j)] - expected).norm());
                    }
                }
            }
        }
    }
    ensure!(worst_real < 1e-12, "real residual {worst_real:.3e}");
    ensure!(worst_complex < 1e-12, "complex residual deviation {worst_complex:.3e}");
    Ok(format!(
        "real max {worst_real:.1e}; complex deviation max {worst_complex:.1e}"
    ))
}

fn font_sum() -> Outcome {
    let (mut worst_id, mut worst_min): (f64, f64) = (0.0, 0.0);
    for n in 2..=6 {
        for seed in 0..100 {
            let s = random_state(n, seed).unwrap();
            for p in 1..=n {
                let (lhs, rhs) = font_total_identity(&s, p).map_err(|e| e.to_string())?;
                worst_id = worst_id.max((lhs - rhs).abs());
                let sum_sq: f64 = oracle_minors(&s, p).iter().map(|(_, d)| d.norm_sqr()).sum();
                let ev = oracle_eigs(global_pt(&density(&s), p).unwrap().matrix());
                worst_min = worst_min.max((ev[ev.len() - 1] + sum_sq.sqrt()).abs());
            }
        }
    }
    ensure!(worst_id < 1e-10, "font-sum identity off by {worst_id:.3e}");
    ensure!(worst_min < 1e-10, "min eigenvalue off by {worst_min:.3e}");
    Ok(format!(
        "identity max {worst_id:.1e}; min eigenvalue max {worst_min:.1e}"
    ))
}

fn font_combinatorics() -> Outcome {
    let mut checked = 0;
    for n in 2..=6u64 {
        let s = random_state(n as usize, 7 * n).unwrap();
        for p in 1..=n as usize {
            let fonts = enumerate_fonts(&s, p, None).map_err(|e| e.to_string())?;
            ensure!(
                fonts.len() as u64 == binom(1 << (n - 1), 2),
                "n={n} p={p}: total {}",
                fonts.len()
            );
            for k in 2..=n {
                let count = fonts.iter().filter(|f| f.order() as u64 == k).count() as u64;
                ensure!(count == binom(n - 1, k - 1) << (n - 2), "n={n} p={p} K={k}: {count}");
            }
            let mut ours: Vec<(usize, [f64; 2])> = fonts.iter().map(|f| (f.order(), [f.det.re, f.det.im])).collect();
            let mut oracle: Vec<(usize, [f64; 2])> = oracle_minors(&s, p)
                .into_iter()
                .map(|(k, d)| (k, [d.re, d.im]))
                .collect();
            let key = |a: &(usize, [f64; 2]), b: &(usize, [f64; 2])| {
                a.0.cmp(&b.0)
                    .then(a.1[0].total_cmp(&b.1[0]))
                    .then(a.1[1].total_cmp(&b.1[1]))
            };
            ours.sort_by(key);
            oracle.sort_by(key);
            for (x, y) in ours.iter().zip(&oracle) {
                ensure!(
                    x.0 == y.0 && (x.1[0] - y.1[0]).abs() < 1e-15 && (x.1[1] - y.1[1]).abs() < 1e-15,
                    "n={n} p={p}: determinant multiset differs"
                );
            }
            checked += fonts.len();
        }
    }
    Ok(format!("{checked} fonts matched against brute-force minors"))
}

fn canonicalization() -> Outcome {
    let allowed = [0b000, 0b100, 0b101, 0b110, 0b111];
    for seed in 0..100 {
        let s = random_state(3, seed).unwrap();
        let cf = canonicalize3(&s).map_err(|e| format!("seed {seed}: {e}"))?;
        ensure!(cf.lbp_count <= 5, "seed {seed}: {} terms", cf.lbp_count);
        for (i, a) in cf.state.amps().iter().enumerate() {
            ensure!(
                allowed.contains(&i) || a.norm() < 1e-10,
                "seed {seed}: amplitude at {i:03b}"
            );
        }
        for p in 1..=3 {
            let before = global_negativity(&s, p).unwrap();
            let after = global_negativity(&cf.state, p).unwrap();
            ensure!(
                (before - after).abs() < 1e-10,
                "seed {seed} p={p}: negativity {before} -> {after}"
            );
        }
    }
    let reps = [
        "|000>+|111>+|110>",
        "|000>+|111>",
        "|000>+|110>+|101>",
        "|001>+|010>+|100>",
        "|000>+|011>",
    ];
    for text in reps {
        let s = ket(text);
        let label = classify3(&s, TOL).map_err(|e| e.to_string())?.class;
        for seed in 0..100 {
            let d = random_lu_disguise(&s, seed);
            let got = classify3(&d, TOL)
                .map_err(|e| format!("{text} seed {seed}: {e}"))?
                .class;
            ensure!(got == label, "{text} seed {seed}: {got} vs {label}");
        }
    }
    let mut worst: f64 = 0.0;
    for seed in 0..100 {
        let s = random_state(3, 500 + seed).unwrap();
        for col in 0..4usize {
            let op = zero_slot_unitary(&s, 1, col).map_err(|e| e.to_string())?;
            let b = apply_local(&s, &op).unwrap();
            let m = qubit_mask(3, 1);
            worst = worst.max(b.amp(col).norm());
            for other in (0..4usize).filter(|&c| c != col) {
                let lhs = b.amp(other) * b.amp(col | m);
                let rhs = s.amp(other) * s.amp(col | m) - s.amp(other | m) * s.amp(col);
                worst = worst.max((lhs - rhs).norm());
            }
        }
    }
    ensure!(worst < 1e-12, "zero-slot product identity off by {worst:.3e}");
    Ok(format!(
        "100 states in five-term form; 500 disguised labels stable; product identity {worst:.1e}"
    ))
}

fn cluster() -> Outcome {
    let c = ket("|0000> - |0011> + |1110> + |1101>");
    let opts = HeuristicOptions::default();
    let cf = canonicalize_heuristic(&c, &opts).map_err(|e| e.to_string())?;
    let sig = gpt_signature(&cf.state, 1, TOL).unwrap().ks;
    ensure!(sig == BTreeSet::from([2, 4]), "canonical signature {sig:?}");
    ensure!(cf.converged, "search did not confirm its result");
    let r = classify4(&c, TOL, false, &opts).map_err(|e| e.to_string())?;
    ensure!(
        !r.provisional && r.class == ClassLabel::CIII,
        "classified {} provisional={}",
        r.class,
        r.provisional
    );

    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let mut worst: f64 = 0.0;
    for n in [4, 5] {
        for _ in 0..10 {
            let g = |rng: &mut ChaCha8Rng| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            let (a0, a1, a2) = (g(&mut rng), g(&mut rng), g(&mut rng));
            let a3 = -a0 * a1 / a2;
            let ones = "1".repeat(n);
            let terms = [
                ("0".repeat(n), a0),
                (ones.clone(), a1),
                (format!("00{}", &ones[2..]), a2),
                (format!("11{}", "0".repeat(n - 2)), a3),
            ];
            let terms: Vec<_> = terms
                .iter()
                .map(|(b, a)| (BasisIndex::from_bits(b).unwrap(), *a))
                .collect();
            let s = make_state(n, &terms).unwrap();
            let inv = cluster_invariant(&s).unwrap();
            for _ in 0..10 {
                let mut t = s.clone();
                for q in [1, 2] {
                    t = apply_local(&t, &LocalOperator::unitary(q, random_su2(&mut rng)).unwrap()).unwrap();
                }
                worst = worst.max((cluster_invariant(&t).unwrap() - inv).norm());
                let mut u = s.clone();
                for q in [1, 2] {
                    u = apply_local(&u, &random_unitary(q, &mut rng)).unwrap();
                }
                worst = worst.max((cluster_invariant(&u).unwrap().norm() - inv.norm()).abs());
            }
        }
    }
    ensure!(worst < 1e-9, "cluster invariant drifted by {worst:.3e}");
    Ok(format!(
        "signature {{2,4}} after {} restarts; invariant drift {worst:.1e}",
        cf.restarts_used
    ))
}

fn w_and_ghz() -> Outcome {
    let ghz = ket("|000>+|111>");
    let w = ket("|001>+|010>+|100>");
    let w_value = 2.0 * 2f64.sqrt() / 3.0;
    for p in 1..=3 {
        let g = global_negativity(&ghz, p).unwrap();
        let wn = global_negativity(&w, p).unwrap();
        ensure!((g - 1.0).abs() < 1e-10, "GHZ p={p}: {g}");
        ensure!((wn - w_value).abs() < 1e-10, "W p={p}: {wn}");
        let ev = oracle_eigs(global_pt(&density(&w), p).unwrap().matrix());
        let oracle = 2.0 * ev.iter().filter(|&&l| l < 0.0).map(|l| -l).sum::<f64>();
        ensure!((oracle - wn).abs() < 1e-10, "W p={p}: oracle {oracle}");
        let (g2, g3) = (kpt_negativity(&ghz, p, 2).unwrap(), kpt_negativity(&ghz, p, 3).unwrap());
        let (w2, w3) = (kpt_negativity(&w, p, 2).unwrap(), kpt_negativity(&w, p, 3).unwrap());
        ensure!(g3 > 1e-6 && g2 < 1e-12, "GHZ p={p}: K-way negativities {g2}, {g3}");
        ensure!(w2 > 1e-6 && w3 < 1e-12, "W p={p}: K-way negativities {w2}, {w3}");
    }
    Ok(format!("GHZ 1, W {w_value:.12}"))
}

fn parser() -> Outcome {
    let printed = [
        "|000>+|111>+|110>",
        "|000>+|111>",
        "|000>+|110>+|101>",
        "|0000>+|1111>+|1110>+|1100>",
        "|0000>+|1111>+|1110>",
        "|0000>+|1111>+|1100>",
        "|0000>+|1110>+|1101>",
        "|0000>+|1111>",
        "|0000>+|1110>",
        "|0000>+|1100>+|1010>+|1001>",
        "|0000> - |0011> + |1110> + |1101>",
    ];
    for text in printed {
        parse_ket(text).map_err(|e| format!("{text}: {e}"))?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let alphabet = b"|01>+-*()i./sqrte2 9x\xff";
    let mut errors = 0;
    for _ in 0..100_000 {
        let len = rng.random_range(0..16);
        let bytes: Vec<u8> = (0..len)
            .map(|_| {
                if rng.random_bool(0.8) {
                    alphabet[rng.random_range(0..alphabet.len())]
                } else {
                    rng.random()
                }
            })
            .collect();
        let text = String::from_utf8_lossy(&bytes);
        let outcome = std::panic::catch_unwind(|| parse_ket(&text));
        match outcome {
            Err(_) => return Err(format!("parser panicked on {bytes:?}")),
            Ok(Err(e)) => {
                errors += 1;
                ensure!(e.offset <= text.len(), "offset {} beyond input {text:?}", e.offset);
            }
            Ok(Ok(_)) => {}
        }
    }
    for seed in 0..100 {
        let s = random_state(1 + (seed as usize % 5) + 1, seed).unwrap();
        let e = KetExpression::from_state(&s);
        let back = parse_ket(&e.to_string()).map_err(|err| err.to_string())?;
        ensure!(back == e, "seed {seed}: term list changed");
        let t = back.to_state().unwrap();
        let dev = s
            .amps()
            .iter()
            .zip(t.amps())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        ensure!(dev < 1e-12, "seed {seed}: amplitudes moved by {dev:.3e}");
    }
    Ok(format!(
        "{} representatives parsed; {errors} fuzz errors all positioned; 100 exact round trips",
        printed.len()
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("three-qubit table", table_one),
        ("four-qubit table", table_two),
        ("class counting", counting),
        ("decomposition identity", decomposition),
        ("font-sum identity", font_sum),
        ("font combinatorics", font_combinatorics),
        ("canonicalization", canonicalization),
        ("cluster-state class", cluster),
        ("W/GHZ negativities", w_and_ghz),
        ("ket parser", parser),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name} ({secs:.2}s): {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name} ({secs:.2}s): {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
