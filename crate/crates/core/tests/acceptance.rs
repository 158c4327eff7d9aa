//! One line per acceptance criterion; exits nonzero if any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use operad_lab::cli::{run_compose, run_verify, Bounds, Report, TheoremId, VerificationJob};
use operad_lab::defcx::{self, koszul_pairs, OperadMapSpec};
use operad_lab::exactla::RankMode;
use operad_lab::operads::{check_axioms, check_equivariance_generators, lie_basis, OperadImpl, OperadName};
use operad_lab::twist::{self, TwComplex};

/// Exact values are compared with zero tolerance; these are the wall-clock
/// ceilings, in seconds.
const LIMIT_COMPOSE: u64 = 1;
const LIMIT_DIMS: u64 = 30;
const LIMIT_TH3_1: u64 = 1;
const LIMIT_TH3_2: u64 = 60;
const LIMIT_TH3_4: u64 = 1;
const LIMIT_ID_PL: u64 = 300;
const LIMIT_TH2_2: u64 = 120;
const LIMIT_TH2_1: u64 = 60;
const LIMIT_TH5_1: u64 = 600;
const LIMIT_SEC6: u64 = 300;
const LIMIT_STRUCT: u64 = 300;

struct Outcome {
    pass: bool,
    detail: String,
}

fn verify(t: TheoremId, bounds: Bounds, mode: RankMode) -> Result<Report, String> {
    let mut job = VerificationJob::new(t);
    job.bounds = bounds;
    job.mode = mode;
    run_verify(&job).map_err(|e| format!("{t}: {e}"))
}

fn from_report(r: Result<Report, String>) -> Outcome {
    match r {
        Ok(r) => {
            let f = r.failures();
            let detail = if f.is_empty() {
                format!("{} rows, {} checks", r.rows.len(), r.checks.len())
            } else {
                format!("{} failures, first: {}", f.len(), f[0])
            };
            Outcome { pass: r.passed(), detail }
        }
        Err(e) => Outcome { pass: false, detail: e },
    }
}

fn weight(w: usize) -> Bounds {
    Bounds { max_weight: Some(w), ..Bounds::default() }
}

fn c1() -> Outcome {
    let expected = ["1 2(1,3(4))", "1 2(1,3,4)", "1 2(3(1),4)", "1 2(3(1,4))"];
    match run_compose("2(1,3) o_2 1(2)") {
        Ok(lc) => {
            let text = lc.to_string();
            let mut got: Vec<&str> = text.lines().collect();
            got.sort();
            Outcome { pass: got == expected, detail: format!("{got:?}") }
        }
        Err(e) => Outcome { pass: false, detail: e.to_string() },
    }
}

fn c2() -> Outcome {
    let mut bad = Vec::new();
    for n in 1..=7usize {
        let pl = OperadImpl::PL.basis(n).map(|b| b.len());
        let perm = OperadImpl::Perm.basis(n).map(|b| b.len());
        let lie = lie_basis(n).map(|b| b.len());
        let fact: usize = (1..n).product();
        if pl != Ok(n.pow(n as u32 - 1)) || perm != Ok(n) || lie != Ok(fact) {
            bad.push(format!("n={n}: {pl:?} {perm:?} {lie:?}"));
        }
    }
    Outcome { pass: bad.is_empty(), detail: if bad.is_empty() { "n <= 7".into() } else { bad.join("; ") } }
}

fn c9() -> Outcome {
    let r = verify(TheoremId::Th5_1, Bounds { max_arity: Some(4), ..Bounds::default() }, RankMode::Modular);
    let windows_ok = r.as_ref().map_or(false, |r| {
        (1..=4).all(|n| {
            let ks: Vec<usize> = r
                .rows
                .iter()
                .filter_map(|x| match x {
                    operad_lab::cli::Row::Tw(t) if t.arity == n => Some(t.alphas),
                    _ => None,
                })
                .collect();
            ks == (0..=7 - n).collect::<Vec<_>>()
        })
    });
    let mut o = from_report(r);
    if !windows_ok {
        o.pass = false;
        o.detail = format!("window mismatch; {}", o.detail);
    }
    o
}

fn c10() -> Outcome {
    let parts = [
        ("rpl", from_report(verify(TheoremId::Th6_1Rpl, Bounds::default(), RankMode::Exact))),
        ("kernel", from_report(verify(TheoremId::Th6_1LieElements, Bounds { max_arity: Some(5), ..Bounds::default() }, RankMode::Exact))),
        ("q", from_report(verify(TheoremId::QIdentity, Bounds { max_arity: Some(4), ..Bounds::default() }, RankMode::Exact))),
    ];
    Outcome {
        pass: parts.iter().all(|(_, o)| o.pass),
        detail: parts.iter().map(|(n, o)| format!("{n} {}: {}", if o.pass { "ok" } else { "FAIL" }, o.detail)).collect::<Vec<_>>().join(" | "),
    }
}

fn c11() -> Outcome {
    let mut bad = Vec::new();
    let mut blocks = 0usize;
    let mut maps: Vec<OperadMapSpec> = Vec::new();
    for n in [OperadName::Com, OperadName::Lie, OperadName::Ass, OperadName::PL] {
        maps.push(OperadMapSpec::standard(n, n).unwrap());
    }
    for (s, t) in koszul_pairs() {
        maps.push(OperadMapSpec::standard(s, t).unwrap());
        maps.push(OperadMapSpec::standard(t.koszul_dual(), s.koszul_dual()).unwrap());
    }
    for f in &maps {
        match defcx::build_generic(f, 6).and_then(|c| c.check_d_squared().map(|_| c.w_max())) {
            Ok(w) => blocks += w,
            Err(e) => bad.push(format!("{}: {e}", f.name())),
        }
    }
    let models = [defcx::build_lie_to_pl(7), defcx::build_id_pl(6), defcx::build_pl_to_ass(10), defcx::build_e_case_formula(10)];
    for (i, c) in models.into_iter().enumerate() {
        match c.and_then(|c| c.check_d_squared().map(|_| c.w_max())) {
            Ok(w) if i < 3 => blocks += w,
            Ok(_) => bad.push("case formula unexpectedly squares to zero".into()),
            Err(e) if i == 3 && e.is_consistency_failure() => {}
            Err(e) => bad.push(format!("model {i}: {e}")),
        }
    }
    for n in 0..=4 {
        match TwComplex::build(n, 8 - n).and_then(|c| c.check_d_squared().map(|_| c.k_top())) {
            Ok(k) => blocks += k,
            Err(e) => bad.push(format!("tw {n}: {e}")),
        }
    }
    match twist::orbit_oracle_table(6) {
        Ok(rows) => {
            for (n, k, fast, slow) in rows {
                if fast != slow {
                    bad.push(format!("orbit ({n}, {k}): {fast} vs {slow}"));
                }
            }
        }
        Err(e) => bad.push(format!("orbit oracle: {e}")),
    }
    for op in [OperadImpl::PL, OperadImpl::Perm, OperadImpl::Ass, OperadImpl::Com] {
        for r in [check_axioms(&op, 6), check_equivariance_generators(&op, 6)] {
            match r {
                Ok(f) if f.is_empty() => {}
                Ok(f) => bad.push(format!("{}: {}", op.name(), f[0])),
                Err(e) => bad.push(format!("{}: {e}", op.name())),
            }
        }
    }
    Outcome {
        pass: bad.is_empty(),
        detail: if bad.is_empty() { format!("{blocks} blocks with d^2 = 0, orbit oracle n + k <= 6, axioms <= 6") } else { bad.join("; ") },
    }
}

fn main() -> ExitCode {
    let criteria: Vec<(&str, u64, Box<dyn Fn() -> Outcome>)> = vec![
        ("1 composition oracle", LIMIT_COMPOSE, Box::new(c1)),
        ("2 dimension table", LIMIT_DIMS, Box::new(c2)),
        ("3 PL->Com acyclic, w <= 7", LIMIT_TH3_1, Box::new(|| from_report(verify(TheoremId::Th3_1, weight(7), RankMode::Exact)))),
        ("4 Lie->PL acyclic, w <= 7", LIMIT_TH3_2, Box::new(|| from_report(verify(TheoremId::Th3_2, weight(7), RankMode::Exact)))),
        ("5 PL->Ass acyclic with case formula, w <= 10", LIMIT_TH3_4, Box::new(|| from_report(verify(TheoremId::Th3_4, weight(10), RankMode::Exact)))),
        ("6 id_PL acyclic, w <= 6", LIMIT_ID_PL, Box::new(|| from_report(verify(TheoremId::Th4_1, weight(6), RankMode::Modular)))),
        ("7 Koszul dual pairs, w <= 6", LIMIT_TH2_2, Box::new(|| from_report(verify(TheoremId::Th2_2, weight(6), RankMode::Exact)))),
        ("8 identity maps of Com, Lie, Ass", LIMIT_TH2_1, Box::new(|| {
            let mut o = from_report(verify(TheoremId::Th2_1, weight(7), RankMode::Exact));
            let ass = from_report(verify(TheoremId::Th2_1, weight(5), RankMode::Exact));
            o.pass &= ass.pass;
            o
        })),
        ("9 twisted complex, n <= 4, n + k <= 7", LIMIT_TH5_1, Box::new(c9)),
        ("10 quotient, Lie elements, Q identity", LIMIT_SEC6, Box::new(c10)),
        ("11 structural suite", LIMIT_STRUCT, Box::new(c11)),
    ];
    let mut failed = 0;
    for (name, limit, f) in criteria {
        let start = Instant::now();
        let mut o = f();
        let t = start.elapsed();
        if t > Duration::from_secs(limit) {
            o.pass = false;
            o.detail = format!("over the {limit} s limit; {}", o.detail);
        }
        if !o.pass {
            failed += 1;
        }
        println!("{} criterion {name} ({:.2?}): {}", if o.pass { "PASS" } else { "FAIL" }, t, o.detail);
    }
    println!("acceptance: {} failed", failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
