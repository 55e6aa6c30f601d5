//! One line per acceptance criterion. Criterion 1 contains a closed form
//! that the exact values contradict; it is reported as FAIL and the test
//! asserts that the contradiction is exactly the known one.

use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::Instant;

use num_rational::Ratio;

use coded_pir::array::{apir, array_max_k, array_verify, example_2x25};
use coded_pir::code::bounds::{lower_bound, theorem8_ceil, theorem8_ratio};
use coded_pir::code::combinators::{concat, even_extend};
use coded_pir::code::oracle::code_max_k;
use coded_pir::code::reference::starred_cells;
use coded_pir::code::table::{bounds_cell, table_closure, Replayer};
use coded_pir::code::{verify, PirCode};
use coded_pir::construct::{
    balanced_multiplicity_code, constant_weight_code, cubic_code, example2_code, gf4_example_code, majority_logic_15_7,
    projective_plane, steiner_code, steiner_triple, Orientation,
};
use coded_pir::emulation::{
    accounting_check, coded_privacy_audit, distribute, retrieve, retrieve_robust, CodedPrivacyMode, CodedStore,
    Database, RecoveryScheme, ResponseMode,
};
use coded_pir::gf::FieldSpec;
use coded_pir::ledger;
use coded_pir::protocol::{privacy_audit, Coins, EnumCoins, LinearPirProtocol, PrivacyMode, RandomTape, XorK};
use coded_pir::service::{Client, InProcessCluster, ServerState};

const EXHAUSTIVE_LIMIT: u128 = 1 << 16;
const TAPES: u64 = 100;

struct Verdict {
    pass: bool,
    /// Failure that the criterion's own data shows cannot be met.
    known_gap: bool,
    detail: String,
}

fn pass(detail: impl Into<String>) -> Verdict {
    Verdict { pass: true, known_gap: false, detail: detail.into() }
}

fn fail(detail: impl Into<String>) -> Verdict {
    Verdict { pass: false, known_gap: false, detail: detail.into() }
}

fn check(ok: bool, good: impl Into<String>, bad: impl Into<String>) -> Verdict {
    if ok {
        pass(good)
    } else {
        fail(bad)
    }
}

fn binary() -> FieldSpec {
    FieldSpec::binary()
}

fn fano() -> PirCode {
    steiner_code(&projective_plane(2).unwrap(), Orientation::Column).unwrap()
}

fn four_server_code() -> PirCode {
    let f = binary();
    even_extend(&concat(&PirCode::parity(&f, 2), &PirCode::identity(&f, 2)).unwrap()).unwrap()
}

fn criterion_1() -> Verdict {
    let mut wrong = Vec::new();
    let mut exact = |s: usize, k: usize, want: usize, formula: &str| {
        let c = bounds_cell(s, k).unwrap();
        if c.lower != c.upper || c.upper != want {
            wrong.push((s, k, formula.to_string(), want, c.lower, c.upper));
        }
    };
    for s in 1..=32 {
        exact(s, 2, s + 1, "s+1");
    }
    for k in 1..=16 {
        exact(2, k, (3 * k).div_ceil(2), "ceil(3k/2)");
        exact(3, k, (7 * k).div_ceil(4), "ceil(7k/4)");
        exact(1, k, k, "k");
    }
    for (s, k, v) in starred_cells() {
        exact(s, k, v, "starred");
    }
    if wrong.is_empty() {
        return pass("all listed cells tight and equal to their closed forms");
    }
    let gaps: Vec<usize> = wrong.iter().filter(|w| w.0 == 3 && w.2 == "ceil(7k/4)").map(|w| w.1).collect();
    let only_gaps = wrong.len() == gaps.len() && wrong.iter().all(|w| w.4 == w.5);
    let listed: Vec<String> = wrong.iter().map(|w| format!("A({},{})={} vs {}={}", w.0, w.1, w.5, w.2, w.3)).collect();
    Verdict {
        pass: false,
        known_gap: only_gaps && gaps == [1, 5, 9, 13],
        detail: format!("tight everywhere, but the closed form misses: {}", listed.join(", ")),
    }
}

fn criterion_2() -> Verdict {
    let k = |c: &PirCode| code_max_k(c.generator()).unwrap();
    let got = (k(&example2_code()), k(&fano()), k(&majority_logic_15_7()));
    let parity: Vec<usize> = (1..=10).map(|s| k(&PirCode::parity(&binary(), s))).collect();
    check(
        got == (3, 4, 5) && parity.iter().all(|&p| p == 2),
        "[8,4] -> 3, Fano [14,7] -> 4, (15,7) -> 5 on every coordinate, parity s<=10 -> 2",
        format!("oracle values {got:?}, parity {parity:?}"),
    )
}

fn constructed_codes() -> Vec<(String, PirCode)> {
    let mut out: Vec<(String, PirCode)> = Vec::new();
    for sigma in 2..=4 {
        for k in 2..=4 {
            out.push((format!("cubic({sigma},{k})"), cubic_code(sigma, k).unwrap()));
        }
    }
    for n in [7, 9, 13] {
        for (o, tag) in [(Orientation::Column, "column"), (Orientation::Row, "row")] {
            out.push((format!("sts-{tag}({n})"), steiner_code(&steiner_triple(n).unwrap(), o).unwrap()));
        }
    }
    for q in [2, 3] {
        for (o, tag) in [(Orientation::Column, "column"), (Orientation::Row, "row")] {
            out.push((format!("pg-{tag}({q})"), steiner_code(&projective_plane(q).unwrap(), o).unwrap()));
        }
    }
    for r in 2..=10 {
        for k in 3..=r + 1 {
            if let Ok(c) = constant_weight_code(r, k) {
                if c.s() > 0 {
                    out.push((format!("constant-weight({r},{k})"), c));
                }
            }
        }
    }
    for s in 1..=4 {
        let step = 1 << (s - 1);
        for k in (step..=16).step_by(step) {
            out.push((format!("balanced({s},{k})"), balanced_multiplicity_code(s, k).unwrap()));
        }
    }
    out.push(("example2".into(), example2_code()));
    out.push(("ml15-7".into(), majority_logic_15_7()));
    let mut replayer = Replayer::new();
    let mut seen: BTreeMap<String, ()> = out.iter().map(|(n, _)| (n.clone(), ())).collect();
    for cell in table_closure(12, 8).unwrap() {
        let name = format!("table({},{})={}", cell.s, cell.k, cell.provenance);
        let code = replayer.build(&cell.provenance).unwrap();
        assert_eq!((code.s(), code.m()), (cell.s, cell.upper), "{name}");
        if seen.insert(name.clone(), ()).is_none() {
            out.push((name, code));
        }
    }
    out
}

fn criterion_3(codes: &[(String, PirCode)]) -> Verdict {
    let mut bad = Vec::new();
    for (name, c) in codes {
        let (g, k, w) = c.clone().into_parts();
        if let Err(v) = verify(&g, k, &w) {
            bad.push(format!("{name}: {v}"));
        } else if !g.distance_at_least(k).or_else(|_| g.min_distance().map(|d| d >= k)).unwrap() {
            bad.push(format!("{name}: distance below {k}"));
        }
    }
    check(
        bad.is_empty(),
        format!("{} codes re-verified with min distance >= k", codes.len()),
        bad.join("; "),
    )
}

/// Errors over all tapes when the space is small, else over `TAPES` tapes.
fn all_positions(store: &CodedStore, db: &Database, p: &dyn LinearPirProtocol) -> (usize, usize, bool) {
    let (mut errors, mut runs, mut exhaustive) = (0, 0, true);
    for i in 0..db.n() {
        let mut check = |coins: &mut dyn Coins| {
            runs += 1;
            match retrieve(store, p, i, coins) {
                Ok((v, s)) if v == db.get(i) && accounting_check(&s, p).is_ok() => {}
                _ => errors += 1,
            }
        };
        let space = EnumCoins::space_of(|c| {
            let _ = retrieve(store, p, i, c);
        });
        if space <= EXHAUSTIVE_LIMIT {
            EnumCoins::run(EXHAUSTIVE_LIMIT, |c| check(c)).unwrap();
        } else {
            exhaustive = false;
            for t in 0..TAPES {
                check(&mut RandomTape::split(i as u64, t));
            }
        }
    }
    (errors, runs, exhaustive)
}

fn criterion_4(codes: &[(String, PirCode)]) -> Verdict {
    let mut bad = Vec::new();
    let (mut runs, mut exhaustive_codes, mut tested) = (0, 0, 0);
    for (name, c) in codes {
        if c.k() < 2 {
            continue;
        }
        tested += 1;
        let scheme: Arc<dyn RecoveryScheme> = Arc::new(c.clone());
        let p = XorK::new(binary(), c.k()).unwrap();
        let mut all_exhaustive = true;
        for len in [4, 8] {
            let db = Database::random(binary(), c.s() * len, len as u64);
            let store = distribute(&db, Arc::clone(&scheme)).unwrap();
            let (e, r, ex) = all_positions(&store, &db, &p);
            runs += r;
            all_exhaustive &= ex;
            if e > 0 {
                bad.push(format!("{name} L={len}: {e} errors"));
            }
        }
        exhaustive_codes += usize::from(all_exhaustive);
    }
    check(
        bad.is_empty(),
        format!("{tested} codes with k>=2, {runs} retrievals, {exhaustive_codes} codes over every tape, 0 errors"),
        bad.join("; "),
    )
}

fn criterion_5() -> Verdict {
    let mut replayer = Replayer::new();
    let mut bad = Vec::new();
    let mut runs = 0;
    for cell in table_closure(6, 6).unwrap() {
        if cell.k < 2 {
            continue;
        }
        let code: Arc<dyn RecoveryScheme> = Arc::new(replayer.build(&cell.provenance).unwrap());
        let p: Arc<dyn LinearPirProtocol> = Arc::new(XorK::new(binary(), cell.k).unwrap());
        for len in [4, 8] {
            let db = Database::random(binary(), cell.s * len, 3);
            let store = distribute(&db, Arc::clone(&code)).unwrap();
            let cluster = InProcessCluster::spawn((0..code.servers()).map(|h| ServerState::new(h, Arc::clone(&p))).collect());
            let client = Client::new(&cluster, Arc::clone(&code), Arc::clone(&p)).unwrap();
            client.upload(&store).unwrap();
            for i in [0, db.n() - 1] {
                runs += 1;
                let out = client.retrieve(i, ResponseMode::Permuted, false, &mut RandomTape::new(i as u64)).unwrap();
                let m = code.servers() as u64;
                let closed = (m * p.upload_bits(len), m * p.download_bits(len));
                if out.value != db.get(i) || (out.wire.payload_up_bits, out.wire.payload_down_bits) != closed {
                    bad.push(format!("({},{}) L={len} i={i}", cell.s, cell.k));
                }
            }
        }
    }
    let parity: Arc<dyn RecoveryScheme> = Arc::new(PirCode::parity(&binary(), 2));
    let db = Database::random(binary(), 16, 8);
    let store = distribute(&db, parity).unwrap();
    let p = XorK::xor2();
    let totals: Vec<u64> = (0..16)
        .map(|i| {
            let (_, s) = retrieve(&store, &p, i, &mut RandomTape::new(i as u64)).unwrap();
            s.accounting.uploaded_bits + s.accounting.downloaded_bits
        })
        .collect();
    let example = totals.iter().all(|&t| t == 3 * 16 / 2 + 3);
    check(
        bad.is_empty() && example,
        format!("{runs} wire runs equal m*U1 and m*D1; two-part parity at n=16 totals {} bits", totals[0]),
        format!("off the closed form: {bad:?}; parity totals {totals:?}"),
    )
}

fn criterion_6() -> Verdict {
    let mut bad = Vec::new();
    let mut compared = 0u128;
    let mut exact = |p: &dyn LinearPirProtocol, n: usize| {
        for j in 0..p.k() {
            for i2 in 1..n {
                let v = privacy_audit(p, j, n, 0, i2, PrivacyMode::Exact).unwrap();
                compared += v.tapes;
                if !v.identical {
                    bad.push(format!("{} n={n} server {j} index {i2}", p.name()));
                }
            }
        }
    };
    let xor2 = XorK::xor2();
    for n in 1..=12 {
        exact(&xor2, n);
    }
    let xor3 = XorK::new(binary(), 3).unwrap();
    for n in 1..=6 {
        exact(&xor3, n);
    }
    let code = example2_code();
    for h in 0..code.m() {
        for i2 in 1..16 {
            let v = coded_privacy_audit(&code, 4, &xor3, h, 0, i2, CodedPrivacyMode(ResponseMode::Permuted)).unwrap();
            if !v.identical {
                bad.push(format!("example2 server {h} index {i2}"));
            }
        }
    }
    check(
        bad.is_empty(),
        format!("xor2 n<=12, xor3 n<=6 ({compared} tapes) and all 8 Example-2 servers at n=16: identical multisets"),
        bad.join("; "),
    )
}

fn criterion_7() -> Verdict {
    let a = example_2x25();
    let ks: Vec<usize> = (0..6).map(|b| array_max_k(&a, b).unwrap()).collect();
    let mut want: Vec<Vec<usize>> = (1..=5).map(|c| vec![c]).collect();
    want.extend((6..=15).map(|c| vec![c, c + 10]));
    let got: Vec<Vec<usize>> = a.witness_columns(0).iter().map(|w| w.iter().map(|c| c + 1).collect()).collect();
    let a3 = apir(3).unwrap();
    let params = ((a.m2(), a.k()), (a3.m2(), a3.k()));
    let ok_static = array_verify(&a).is_ok() && ks == [15; 6] && got == want && params == ((25, 15), (385, 220));
    let scheme: Arc<dyn RecoveryScheme> = Arc::new(apir(2).unwrap());
    let p = XorK::new(binary(), 15).unwrap();
    let mut errors = 0;
    let mut runs = 0;
    for seed in 0..4 {
        let db = Database::random(binary(), 24, seed);
        let store = distribute(&db, Arc::clone(&scheme)).unwrap();
        let (e, r, _) = all_positions(&store, &db, &p);
        errors += e;
        runs += r;
    }
    check(
        ok_static && errors == 0,
        format!("[2x25,6] k=15 on all bits, x1 recipes match, apir(2)=(25,15), apir(3)=(385,220), n=24 retrieval: {runs} runs, 0 errors"),
        format!("max k {ks:?}, x1 recipes {got:?}, params {params:?}, {errors} retrieval errors"),
    )
}

fn criterion_8() -> Verdict {
    let c = gf4_example_code();
    let f = c.field().clone();
    let (a, a2) = (f.primitive(), f.mul(f.primitive(), f.primitive()));
    let (g, k, w) = c.clone().into_parts();
    let recipes: Vec<Vec<(usize, u8)>> = w[0].iter().map(|r| r.members().to_vec()).collect();
    let want = vec![vec![(0, 1)], vec![(1, 1), (2, 1)], vec![(3, a2), (4, a)]];
    let d = g.min_distance().unwrap();
    check(
        f.order() == 4 && k == 3 && verify(&g, k, &w).is_ok() && recipes == want && d == 4,
        "GF(4) [5,2] verifies with k=3, x1 recipes {1},{2,3},{(4,a^2),(5,a)}, min distance 4",
        format!("k={k} recipes {recipes:?} distance {d}"),
    )
}

fn criterion_9() -> Verdict {
    let (lower, upper, k) = ledger::a_3_15().unwrap();
    let ratio = theorem8_ratio(5, 4845).unwrap();
    let ceil = theorem8_ceil(5, 4845);
    let report = ledger::report(&ledger::discrepancies().unwrap());
    let stable = report == ledger::report(&ledger::discrepancies().unwrap());
    check(
        (lower, upper, k) == (27, 27, 15)
            && lower_bound(3, 15) == 27
            && ceil == 9388
            && ratio == Ratio::new(150195, 16)
            && stable
            && report.contains("published=26 derived=27")
            && report.contains("published=9387 derived=9388"),
        format!("A(3,15)=27 (published 26); t=4 bound {ceil} = ceil({ratio}) (published 9387)"),
        format!("A(3,15) {lower}/{upper} k={k}, t=4 {ceil}, stable={stable}"),
    )
}

fn criterion_10() -> Verdict {
    let code = four_server_code();
    let scheme: Arc<dyn RecoveryScheme> = Arc::new(code.clone());
    let p = XorK::new(binary(), 3).unwrap();
    let db = Database::random(binary(), code.s() * 4, 10);
    let store = distribute(&db, scheme).unwrap();
    let mut errors = Vec::new();
    let mut runs = 0u128;
    for h in 0..code.m() {
        for i in 0..db.n() {
            let n = EnumCoins::run(EXHAUSTIVE_LIMIT, |c| match retrieve_robust(&store, &p, i, &[h], c) {
                Ok((v, s)) if v == db.get(i) && s.plan.envelopes[h].is_none() => {}
                _ => errors.push((h, i)),
            });
            match n {
                Ok(n) => runs += n,
                Err(_) => {
                    for t in 0..TAPES {
                        runs += 1;
                        match retrieve_robust(&store, &p, i, &[h], &mut RandomTape::split(h as u64, t)) {
                            Ok((v, _)) if v == db.get(i) => {}
                            _ => errors.push((h, i)),
                        }
                    }
                }
            }
        }
    }
    errors.dedup();
    check(
        errors.is_empty() && code.k() == 4,
        format!("[{},{}] k=4 code, xor3: every single failure x every index, {runs} runs, 0 errors", code.m(), code.s()),
        format!("failures at (server, index) {errors:?}"),
    )
}

fn main() {
    let codes = constructed_codes();
    let timed = |f: &(dyn Fn() -> Verdict + Sync)| {
        let t = Instant::now();
        let v = f();
        (v, t.elapsed())
    };
    let names = [
        "exact small-case optimal values",
        "oracle certifications",
        "constructed codes verify with distance >= k",
        "emulation correctness",
        "communication accounting",
        "exact privacy",
        "array codes",
        "non-binary code",
        "discrepancy ledger",
        "robust retrieval",
    ];
    let results = std::thread::scope(|sc| {
        let codes = &codes;
        let jobs: Vec<Box<dyn Fn() -> Verdict + Send + Sync + '_>> = vec![
            Box::new(criterion_1),
            Box::new(criterion_2),
            Box::new(move || criterion_3(codes)),
            Box::new(move || criterion_4(codes)),
            Box::new(criterion_5),
            Box::new(criterion_6),
            Box::new(criterion_7),
            Box::new(criterion_8),
            Box::new(criterion_9),
            Box::new(criterion_10),
        ];
        let handles: Vec<_> = jobs.into_iter().map(|f| sc.spawn(move || timed(f.as_ref()))).collect();
        handles.into_iter().map(|h| h.join().expect("criterion panicked")).collect::<Vec<_>>()
    });
    for (n, ((v, t), name)) in results.iter().zip(names).enumerate() {
        let tag = if v.pass { "PASS" } else { "FAIL" };
        println!("[{tag}] {:>2} {name} ({:.2}s): {}", n + 1, t.as_secs_f64(), v.detail);
    }
    let passed = results.iter().filter(|(v, _)| v.pass).count();
    let known = results.iter().filter(|(v, _)| !v.pass && v.known_gap).count();
    println!("acceptance: {passed} passed, {known} known unattainable, {} failed", results.len() - passed - known);
    for (n, (v, _)) in results.iter().enumerate() {
        assert!(v.pass || v.known_gap, "criterion {} failed: {}", n + 1, v.detail);
    }
}
