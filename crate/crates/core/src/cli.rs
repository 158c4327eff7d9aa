//! Theorem-indexed verification jobs, deterministic JSON reports and the
//! composition calculator behind the `operad-lab` binary.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::defcx::{
    self, build_e_case_formula, build_generic_with, build_id_pl, build_lie_to_pl, build_pl_to_ass, homology_profile,
    koszul_dual_check, koszul_pairs, low_weight_class, DefError, GradedChainComplex, OperadMapSpec,
};
use crate::exactla::{Grade, HomologyReport, RankMode, RankPolicy};
use crate::operads::{pl_compose, LinComb, OperadError, OperadName, SuspensionData};
use crate::treekit::{parse_tree, TreeError};
use crate::twist::{self, TwComplex, TwError};

pub const SCHEMA_VERSION: u32 = 1;

pub const DEFAULT_TREE_WEIGHT: usize = 7;
pub const DEFAULT_E_WEIGHT: usize = 10;
pub const DEFAULT_TW_ARITY: usize = 4;
pub const DEFAULT_RPL_ARITY: usize = 3;
pub const DEFAULT_KERNEL_ARITY: usize = 5;
pub const DEFAULT_ID_ASS_WEIGHT: usize = 5;
pub const DEFAULT_KOSZUL_WEIGHT: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TheoremId {
    Th2_1,
    Th2_2,
    Th3_1,
    Th3_2,
    Th3_4,
    Th4_1,
    Th5_1,
    Th6_1Rpl,
    Th6_1LieElements,
    QIdentity,
}

impl TheoremId {
    pub const ALL: [TheoremId; 10] = [
        TheoremId::Th2_1,
        TheoremId::Th2_2,
        TheoremId::Th3_1,
        TheoremId::Th3_2,
        TheoremId::Th3_4,
        TheoremId::Th4_1,
        TheoremId::Th5_1,
        TheoremId::Th6_1Rpl,
        TheoremId::Th6_1LieElements,
        TheoremId::QIdentity,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TheoremId::Th2_1 => "th2.1",
            TheoremId::Th2_2 => "th2.2",
            TheoremId::Th3_1 => "th3.1",
            TheoremId::Th3_2 => "th3.2",
            TheoremId::Th3_4 => "th3.4",
            TheoremId::Th4_1 => "th4.1",
            TheoremId::Th5_1 => "th5.1",
            TheoremId::Th6_1Rpl => "th6.1-rpl",
            TheoremId::Th6_1LieElements => "th6.1-lie-elements",
            TheoremId::QIdentity => "q-identity",
        }
    }
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TheoremId {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self, CliError> {
        TheoremId::ALL
            .into_iter()
            .find(|t| t.as_str() == s.trim().to_ascii_lowercase())
            .ok_or_else(|| CliError::Input(format!("unknown theorem id {s:?}")))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Bounds {
    pub max_arity: Option<usize>,
    pub max_weight: Option<usize>,
    pub max_alphas: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerificationJob {
    pub theorem: TheoremId,
    pub bounds: Bounds,
    pub mode: RankMode,
    /// Suspension sign table; only test fixtures change it.
    pub susp: SuspensionData,
}

impl VerificationJob {
    pub fn new(theorem: TheoremId) -> Self {
        VerificationJob { theorem, bounds: Bounds::default(), mode: RankMode::Modular, susp: SuspensionData::standard() }
    }

    fn policy(&self) -> RankPolicy {
        match self.mode {
            RankMode::Exact => RankPolicy::exact_only(),
            RankMode::Modular => RankPolicy::default(),
        }
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("internal consistency failure: {0}")]
    Internal(String),
    #[error("resource cap: {0}")]
    Cap(String),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// Process exit status for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Internal(_) => 2,
            CliError::Cap(_) => 3,
            CliError::Input(_) | CliError::Io(_) => 64,
        }
    }
}

impl From<DefError> for CliError {
    fn from(e: DefError) -> Self {
        if e.is_consistency_failure() {
            CliError::Internal(e.to_string())
        } else if e.is_cap() {
            CliError::Cap(e.to_string())
        } else {
            CliError::Input(e.to_string())
        }
    }
}

impl From<TwError> for CliError {
    fn from(e: TwError) -> Self {
        if e.is_consistency_failure() {
            CliError::Internal(e.to_string())
        } else if e.is_cap() {
            CliError::Cap(e.to_string())
        } else {
            CliError::Input(e.to_string())
        }
    }
}

impl From<OperadError> for CliError {
    fn from(e: OperadError) -> Self {
        match e {
            OperadError::Cap { .. } | OperadError::Tree(TreeError::ResourceLimit { .. }) => CliError::Cap(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<TreeError> for CliError {
    fn from(e: TreeError) -> Self {
        match e {
            TreeError::ResourceLimit { .. } => CliError::Cap(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

// ---------------------------------------------------------------------------
// Reports

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProfileRow {
    pub complex: String,
    pub weight: usize,
    pub dim: usize,
    pub rank_in: usize,
    pub rank_out: usize,
    pub betti: usize,
    pub expected_betti: usize,
    pub exact: bool,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TwRow {
    pub complex: String,
    pub arity: usize,
    pub alphas: usize,
    pub dim: usize,
    pub betti: usize,
    pub expected_betti: usize,
    pub exact: bool,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum Row {
    Profile(ProfileRow),
    Tw(TwRow),
}

impl Row {
    pub fn pass(&self) -> bool {
        match self {
            Row::Profile(r) => r.pass,
            Row::Tw(r) => r.pass,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    fn new(name: impl Into<String>, pass: bool, detail: impl Into<String>) -> Self {
        Check { name: name.into(), pass, detail: detail.into() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub theorem: String,
    pub mode: RankMode,
    pub bounds: Bounds,
    pub rows: Vec<Row>,
    pub checks: Vec<Check>,
    /// Observations that do not affect the verdict.
    pub flags: Vec<String>,
    pub verdict: String,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.verdict == "pass"
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            0
        } else {
            1
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize") + "\n"
    }

    pub fn failures(&self) -> Vec<String> {
        let mut out: Vec<String> = self.checks.iter().filter(|c| !c.pass).map(|c| format!("{}: {}", c.name, c.detail)).collect();
        for r in self.rows.iter().filter(|r| !r.pass()) {
            out.push(match r {
                Row::Profile(p) => format!("{} weight {}: betti {} expected {}", p.complex, p.weight, p.betti, p.expected_betti),
                Row::Tw(t) => format!("{} ({}, {}): betti {} expected {}", t.complex, t.arity, t.alphas, t.betti, t.expected_betti),
            });
        }
        out
    }
}

struct Builder {
    job: VerificationJob,
    bounds: Bounds,
    rows: Vec<Row>,
    checks: Vec<Check>,
    flags: Vec<String>,
}

impl Builder {
    fn check(&mut self, name: impl Into<String>, pass: bool, detail: impl Into<String>) {
        self.checks.push(Check::new(name, pass, detail));
    }

    fn profile(&mut self, c: &GradedChainComplex, reports: &[HomologyReport], expected: impl Fn(usize) -> usize) {
        for r in reports {
            let Grade::Weight { weight } = r.grade else { continue };
            let e = expected(weight);
            self.rows.push(Row::Profile(ProfileRow {
                complex: c.name().to_string(),
                weight,
                dim: r.dim_chain,
                rank_in: r.rank_in,
                rank_out: r.rank_out,
                betti: r.betti,
                expected_betti: e,
                exact: r.exact,
                pass: r.betti == e,
            }));
        }
        if let Some(w) = low_weight_class(reports) {
            self.flags.push(format!("{}: a single homology class at weight {w}", c.name()));
        }
    }

    fn acyclic(&mut self, c: &GradedChainComplex, w_max: usize) -> Result<(), CliError> {
        c.check_d_squared()?;
        let reports = homology_profile(c, 1, w_max, self.job.policy())?;
        self.profile(c, &reports, |_| 0);
        Ok(())
    }

    fn vanishing(&mut self, c: &GradedChainComplex, from: usize, to: usize) {
        let dims: Vec<usize> = (from..=to).map(|w| c.dim(w)).collect();
        self.check(format!("{}: components vanish at weights {from}..{to}", c.name()), dims.iter().all(|&d| d == 0), format!("dims {dims:?}"));
    }

    fn finish(self) -> Report {
        let pass = self.rows.iter().all(Row::pass) && self.checks.iter().all(|c| c.pass);
        Report {
            schema_version: SCHEMA_VERSION,
            theorem: self.job.theorem.to_string(),
            mode: self.job.mode,
            bounds: self.bounds,
            rows: self.rows,
            checks: self.checks,
            flags: self.flags,
            verdict: if pass { "pass" } else { "fail" }.to_string(),
        }
    }
}

fn generic(b: &Builder, source: OperadName, target: OperadName, w: usize) -> Result<GradedChainComplex, CliError> {
    Ok(build_generic_with(&OperadMapSpec::standard(source, target)?, w, &b.job.susp)?)
}

fn factorial(n: usize) -> usize {
    (1..=n).product()
}

/// Runs one job. `Err` carries the internal-failure and cap classes;
/// claim mismatches are reported through the verdict.
pub fn run_verify(job: &VerificationJob) -> Result<Report, CliError> {
    use OperadName::*;
    let mut b = Builder { job: job.clone(), bounds: Bounds::default(), rows: Vec::new(), checks: Vec::new(), flags: Vec::new() };
    let bw = job.bounds.max_weight;
    let ba = job.bounds.max_arity;
    match job.theorem {
        TheoremId::Th2_1 => {
            let w = bw.unwrap_or(DEFAULT_TREE_WEIGHT);
            let wa = bw.map_or(DEFAULT_ID_ASS_WEIGHT, |w| w.min(DEFAULT_ID_ASS_WEIGHT));
            b.bounds.max_weight = Some(w);
            for op in [Com, Lie] {
                let c = generic(&b, op, op, w)?;
                b.acyclic(&c, w)?;
                b.vanishing(&c, 3.min(w + 1), w);
            }
            let c = generic(&b, Ass, Ass, wa)?;
            b.acyclic(&c, wa)?;
        }
        TheoremId::Th2_2 => {
            let w = bw.unwrap_or(DEFAULT_KOSZUL_WEIGHT);
            b.bounds.max_weight = Some(w);
            if !job.susp.is_standard() {
                for (s, t) in koszul_pairs() {
                    generic(&b, s, t, w)?.check_d_squared()?;
                }
            }
            for (s, t) in koszul_pairs() {
                let rep = koszul_dual_check(&OperadMapSpec::standard(s, t)?, w)?;
                for r in &rep.rows {
                    let detail = format!("dims {} / {}", r.dim_left, r.dim_right);
                    b.check(format!("{} vs {} at weight {}", rep.map, rep.dual, r.weight), r.dims_agree && r.blocks_agree, detail);
                }
            }
        }
        TheoremId::Th3_1 => {
            let w = bw.unwrap_or(DEFAULT_TREE_WEIGHT);
            b.bounds.max_weight = Some(w);
            let c = generic(&b, PL, Com, w)?;
            b.acyclic(&c, w)?;
            b.vanishing(&c, 3.min(w + 1), w);
        }
        TheoremId::Th3_2 => {
            let w = bw.unwrap_or(DEFAULT_TREE_WEIGHT);
            b.bounds.max_weight = Some(w);
            let c = build_lie_to_pl(w)?;
            b.acyclic(&c, w)?;
            let low: Vec<usize> = (1..=4.min(w + 1)).map(|k| c.dim(k)).collect();
            let oracle = [1, 1, 1, 2];
            b.check("lie_to_pl: dims at weights 1..4", low[..] == oracle[..low.len()], format!("dims {low:?}"));
            let wc = w.min(6);
            let rows = defcx::compare_tree_model(wc, false)?;
            b.check(
                format!("lie_to_pl: tree model equals the generic complex up to weight {wc}"),
                rows.iter().all(|r| r.dims_agree && r.blocks_agree),
                format!("{} weights compared", rows.len()),
            );
        }
        TheoremId::Th3_4 => {
            let w = bw.unwrap_or(DEFAULT_E_WEIGHT);
            b.bounds.max_weight = Some(w);
            let c = build_pl_to_ass(w)?;
            b.acyclic(&c, w)?;
            let formula = build_e_case_formula(w)?;
            let mut mismatched = Vec::new();
            for k in 1..=w {
                if formula.block_ref(k) != c.block_ref(k) {
                    mismatched.push(k);
                }
            }
            b.check("pl_to_ass: blocks equal the parity case formula", mismatched.is_empty(), format!("mismatched weights {mismatched:?}"));
            let wc = w.min(7);
            let rows = defcx::compare_e_model(wc)?;
            b.check(
                format!("pl_to_ass: e-model equals the generic complex up to weight {wc}"),
                rows.iter().all(|r| r.dims_agree && r.blocks_agree),
                format!("{} weights compared", rows.len()),
            );
        }
        TheoremId::Th4_1 => {
            let w = bw.unwrap_or(DEFAULT_TREE_WEIGHT);
            b.bounds.max_weight = Some(w);
            let c = build_id_pl(w)?;
            b.acyclic(&c, w)?;
            let wc = w.min(6);
            let rows = defcx::compare_tree_model(wc, true)?;
            b.check(
                format!("id_pl: marked tree model equals the generic complex up to weight {wc}"),
                rows.iter().all(|r| r.dims_agree && r.blocks_agree),
                format!("{} weights compared", rows.len()),
            );
        }
        TheoremId::Th5_1 => {
            let a = ba.unwrap_or(DEFAULT_TW_ARITY);
            b.bounds.max_arity = Some(a);
            b.bounds.max_alphas = job.bounds.max_alphas;
            for n in 1..=a {
                let k_max = job.bounds.max_alphas.unwrap_or(twist::TW_CAP.saturating_sub(n + 1));
                let c = TwComplex::build(n, k_max + 1)?;
                let reports = c.homology(k_max, job.policy())?;
                tw_rows(&mut b, "tw", &reports, factorial(n - 1));
                if n <= 4 {
                    let li = twist::lie_image_check(n)?;
                    b.check(format!("tw: brackets of arity {n} map onto degree-0 homology"), li.passed(), format!("{li:?}"));
                }
            }
            let k0 = job.bounds.max_alphas.unwrap_or(5).min(twist::TW_CAP - 1);
            let signs = twist::arity_zero_matches_def(k0)?;
            b.check(
                format!("tw: arity 0 equals the Lie->PL tree complex up to sign for k <= {k0}"),
                signs.iter().all(|(_, s)| s.is_some()),
                format!("{signs:?}"),
            );
        }
        TheoremId::Th6_1Rpl => {
            let a = ba.unwrap_or(DEFAULT_RPL_ARITY);
            b.bounds.max_arity = Some(a);
            b.bounds.max_alphas = job.bounds.max_alphas;
            for n in 1..=a {
                let k_max = job.bounds.max_alphas.unwrap_or(twist::TW_CAP.saturating_sub(n + 1));
                let rows = twist::rpl_homology(n, k_max, job.policy())?;
                for r in rows {
                    let e = if r.alphas == 0 { factorial(n - 1) } else { 0 };
                    b.rows.push(Row::Tw(TwRow {
                        complex: "rpl".into(),
                        arity: r.arity,
                        alphas: r.alphas,
                        dim: r.dim,
                        betti: r.betti,
                        expected_betti: e,
                        exact: r.exact,
                        pass: r.betti == e,
                    }));
                }
            }
        }
        TheoremId::Th6_1LieElements => {
            let a = ba.unwrap_or(DEFAULT_KERNEL_ARITY);
            b.bounds.max_arity = Some(a);
            for n in 1..=a {
                let r = twist::kernel_criterion(n)?;
                b.check(format!("kernel of d on PL({n}) equals the Lie brackets"), r.passed(), format!("{r:?}"));
            }
        }
        TheoremId::QIdentity => {
            let a = ba.unwrap_or(DEFAULT_TW_ARITY);
            b.bounds.max_arity = Some(a);
            for n in 1..=a {
                let f = twist::q_identity_check(n)?;
                let detail = f.first().map_or_else(|| "all pairs".to_string(), |x| format!("{} failures, first {x:?}", f.len()));
                b.check(format!("Q(a, b) at total arity {n}"), f.is_empty(), detail);
            }
        }
    }
    Ok(b.finish())
}

fn tw_rows(b: &mut Builder, complex: &str, reports: &[HomologyReport], h0: usize) {
    for r in reports {
        let Grade::Bidegree { arity, alphas } = r.grade else { continue };
        let e = if alphas == 0 { h0 } else { 0 };
        b.rows.push(Row::Tw(TwRow {
            complex: complex.into(),
            arity,
            alphas,
            dim: r.dim_chain,
            betti: r.betti,
            expected_betti: e,
            exact: r.exact,
            pass: r.betti == e,
        }));
    }
}

// ---------------------------------------------------------------------------
// Configuration

/// Settings read from a `key = value` file (`#` starts a comment).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Config {
    pub bounds: Bounds,
    pub mode: Option<RankMode>,
    pub out: Option<String>,
    pub suspension_flip: Option<(usize, usize, usize)>,
}

pub fn parse_mode(s: &str) -> Result<RankMode, CliError> {
    match s.trim().to_ascii_lowercase().as_str() {
        "exact" => Ok(RankMode::Exact),
        "modular" | "modular-certified" => Ok(RankMode::Modular),
        other => Err(CliError::Input(format!("unknown mode {other:?}"))),
    }
}

impl Config {
    pub fn parse(text: &str) -> Result<Config, CliError> {
        let mut c = Config::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = |msg: &str| CliError::Input(format!("config line {}: {msg}", lineno + 1));
            let (k, v) = line.split_once('=').ok_or_else(|| bad("expected key = value"))?;
            let (k, v) = (k.trim(), v.trim());
            let num = || v.parse::<usize>().map_err(|_| bad("expected a nonnegative integer"));
            match k {
                "max_arity" => c.bounds.max_arity = Some(num()?),
                "max_weight" => c.bounds.max_weight = Some(num()?),
                "max_alphas" => c.bounds.max_alphas = Some(num()?),
                "mode" => c.mode = Some(parse_mode(v)?),
                "out" => c.out = Some(v.to_string()),
                "suspension_flip" => {
                    let parts: Vec<usize> =
                        v.split(',').map(|p| p.trim().parse::<usize>()).collect::<Result<_, _>>().map_err(|_| bad("expected n,i,m"))?;
                    let [n, i, m] = parts[..] else { return Err(bad("expected n,i,m")) };
                    if i == 0 || i > n || m == 0 {
                        return Err(bad("slot out of range"));
                    }
                    c.suspension_flip = Some((n, i, m));
                }
                _ => return Err(bad(&format!("unknown key {k:?}"))),
            }
        }
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Config, CliError> {
        Config::parse(&std::fs::read_to_string(path)?)
    }

    /// Builds a job; values set here are overridden by `overrides`.
    pub fn job(&self, theorem: TheoremId, overrides: Bounds, mode: Option<RankMode>) -> VerificationJob {
        let mut job = VerificationJob::new(theorem);
        job.bounds = Bounds {
            max_arity: overrides.max_arity.or(self.bounds.max_arity),
            max_weight: overrides.max_weight.or(self.bounds.max_weight),
            max_alphas: overrides.max_alphas.or(self.bounds.max_alphas),
        };
        if let Some(m) = mode.or(self.mode) {
            job.mode = m;
        }
        if let Some((n, i, m)) = self.suspension_flip {
            job.susp = SuspensionData::with_flipped_entry(n, i, m);
        }
        job
    }
}

// ---------------------------------------------------------------------------
// Composition calculator

/// Evaluates `<tree> o_<i> <tree>` in `PL`.
pub fn run_compose(expr: &str) -> Result<LinComb<crate::operads::Key>, CliError> {
    let (left, rest) = expr
        .split_once(" o_")
        .ok_or_else(|| CliError::Input(format!("expected `<tree> o_<i> <tree>`, got {expr:?}")))?;
    let (slot, right) = rest
        .trim_start()
        .split_once(char::is_whitespace)
        .ok_or_else(|| CliError::Input("missing right operand".into()))?;
    let i: usize = slot.parse().map_err(|_| CliError::Input(format!("bad slot {slot:?}")))?;
    let t = parse_tree(left.trim())?;
    let s = parse_tree(right.trim())?;
    Ok(pl_compose(&t, i, &s)?)
}

// ---------------------------------------------------------------------------
// Dimension tables

/// Dimensions of a named complex or operad, as `(grade, dim)` pairs.
///
/// Recognised ids: `def:<P>-><Q>`, `lie_to_pl`, `id_pl`, `pl_to_ass`,
/// `tw:<n>`, `rpl:<n>`, `operad:<P>`.
pub fn run_dims(id: &str, bounds: Bounds) -> Result<Vec<(usize, usize)>, CliError> {
    let w = bounds.max_weight.unwrap_or(DEFAULT_TREE_WEIGHT);
    let complex_dims = |c: GradedChainComplex| (1..=w).map(|k| (k, c.dim(k))).collect();
    if let Some(rest) = id.strip_prefix("def:") {
        let (s, t) = rest.split_once("->").ok_or_else(|| CliError::Input(format!("expected def:P->Q, got {id:?}")))?;
        let f = OperadMapSpec::standard(s.parse()?, t.parse()?)?;
        return Ok(complex_dims(defcx::build_generic(&f, w)?));
    }
    if let Some(n) = id.strip_prefix("tw:").or_else(|| id.strip_prefix("rpl:")) {
        let n: usize = n.parse().map_err(|_| CliError::Input(format!("bad arity in {id:?}")))?;
        let k = bounds.max_alphas.unwrap_or(twist::TW_CAP.saturating_sub(n));
        if id.starts_with("tw:") {
            return Ok((0..=k).map(|j| twist::tw_basis(n, j).map(|b| (j, b.len()))).collect::<Result<_, _>>()?);
        }
        let rows = twist::rpl_homology(n, k.saturating_sub(1), RankPolicy::default())?;
        return Ok(rows.iter().map(|r| (r.alphas, r.dim)).collect());
    }
    if let Some(op) = id.strip_prefix("operad:") {
        let name: OperadName = op.parse()?;
        let a = bounds.max_arity.unwrap_or(DEFAULT_TREE_WEIGHT);
        return (1..=a)
            .map(|n| {
                let d = if name == OperadName::Lie { crate::operads::lie_basis(n)?.len() } else { name.ambient().basis(n)?.len() };
                Ok((n, d))
            })
            .collect();
    }
    match id {
        "lie_to_pl" => Ok(complex_dims(build_lie_to_pl(w)?)),
        "id_pl" => Ok(complex_dims(build_id_pl(w)?)),
        "pl_to_ass" => Ok(complex_dims(build_pl_to_ass(bounds.max_weight.unwrap_or(DEFAULT_E_WEIGHT))?)),
        _ => Err(CliError::Input(format!("unknown complex id {id:?}"))),
    }
}

/// Counts of report rows by verdict, for the one-line summary.
pub fn summary(report: &Report) -> BTreeMap<&'static str, usize> {
    let mut m = BTreeMap::new();
    let rows_ok = report.rows.iter().filter(|r| r.pass()).count();
    let checks_ok = report.checks.iter().filter(|c| c.pass).count();
    m.insert("rows_pass", rows_ok);
    m.insert("rows_fail", report.rows.len() - rows_ok);
    m.insert("checks_pass", checks_ok);
    m.insert("checks_fail", report.checks.len() - checks_ok);
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(t: TheoremId, bounds: Bounds) -> Report {
        let mut job = VerificationJob::new(t);
        job.bounds = bounds;
        run_verify(&job).unwrap()
    }

    #[test]
    fn theorem_ids_round_trip() {
        for t in TheoremId::ALL {
            assert_eq!(t.as_str().parse::<TheoremId>().unwrap(), t);
        }
        assert!("th9.9".parse::<TheoremId>().is_err());
    }

    #[test]
    fn small_jobs() {
        let r = run(TheoremId::Th3_1, Bounds { max_weight: Some(5), ..Bounds::default() });
        assert!(r.passed(), "{:?}", r.failures());
        assert_eq!(r.rows.len(), 5);
        let r = run(TheoremId::Th5_1, Bounds { max_arity: Some(3), max_alphas: Some(3), ..Bounds::default() });
        assert!(r.passed(), "{:?}", r.failures());
        let h0: Vec<usize> = r
            .rows
            .iter()
            .filter_map(|x| match x {
                Row::Tw(t) if t.alphas == 0 => Some(t.betti),
                _ => None,
            })
            .collect();
        assert_eq!(h0, vec![1, 1, 2]);
    }

    #[test]
    fn case_formula_makes_th3_4_fail() {
        let r = run(TheoremId::Th3_4, Bounds { max_weight: Some(4), ..Bounds::default() });
        assert!(r.rows.iter().all(Row::pass));
        assert!(!r.passed());
    }

    #[test]
    fn flipped_sign_is_internal() {
        let mut job = VerificationJob::new(TheoremId::Th2_1);
        job.bounds.max_weight = Some(3);
        job.susp = SuspensionData::with_flipped_entry(2, 2, 2);
        let e = run_verify(&job).unwrap_err();
        assert_eq!(e.exit_code(), 2, "{e}");
    }

    #[test]
    fn cap_is_reported() {
        let e = run_verify(&{
            let mut j = VerificationJob::new(TheoremId::Th3_1);
            j.bounds.max_weight = Some(40);
            j
        })
        .unwrap_err();
        assert_eq!(e.exit_code(), 3, "{e}");
    }

    #[test]
    fn reports_are_deterministic() {
        let a = run(TheoremId::Th3_2, Bounds { max_weight: Some(5), ..Bounds::default() }).to_json();
        let b = run(TheoremId::Th3_2, Bounds { max_weight: Some(5), ..Bounds::default() }).to_json();
        assert_eq!(a, b);
        assert!(a.contains("\"schema_version\": 1"));
    }

    #[test]
    fn config_file() {
        let c = Config::parse("# bounds\nmax_weight = 4\nmode=exact\nsuspension_flip = 2,2,2\n").unwrap();
        assert_eq!(c.bounds.max_weight, Some(4));
        assert_eq!(c.mode, Some(RankMode::Exact));
        let job = c.job(TheoremId::Th3_1, Bounds { max_weight: Some(6), ..Bounds::default() }, None);
        assert_eq!(job.bounds.max_weight, Some(6));
        assert!(!job.susp.is_standard());
        assert!(Config::parse("max_weight = -1").is_err());
        assert!(Config::parse("colour = red").is_err());
    }

    #[test]
    fn compose_units() {
        assert_eq!(run_compose("1 o_1 1(2)").unwrap().to_string(), "1 1(2)");
        assert_eq!(run_compose("1(2) o_2 1").unwrap().to_string(), "1 1(2)");
        assert!(run_compose("1(2) o_3 1").is_err());
        assert!(run_compose("1(2) 1").is_err());
    }

    #[test]
    fn dims_table() {
        let d = run_dims("operad:PL", Bounds { max_arity: Some(4), ..Bounds::default() }).unwrap();
        assert_eq!(d, vec![(1, 1), (2, 2), (3, 9), (4, 64)]);
        let d = run_dims("def:PL->Com", Bounds { max_weight: Some(3), ..Bounds::default() }).unwrap();
        assert_eq!(d, vec![(1, 1), (2, 1), (3, 0)]);
        assert!(run_dims("nope", Bounds::default()).is_err());
    }
}
