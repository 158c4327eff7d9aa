//! The twisted operad `Tw(PL)` and its quotient by the ideal generated by
//! `α ◁ α`.
//!
//! The arity-`n` part of `Tw(PL)` with `k` copies of the Maurer–Cartan
//! element is spanned by rooted trees with `n` labelled vertices and `k`
//! `Alpha` vertices; the `Alpha` vertices are odd, so the orientation
//! conventions of [`crate::treekit`] apply. The differential adds exactly one
//! `Alpha` vertex, so each `(n, k)` block is finite.

use std::collections::{BTreeMap, HashMap, HashSet};

use serde::Serialize;
use thiserror::Error;

use crate::defcx::{build_lie_to_pl, DefError};
use crate::exactla::{self, Coeff, Grade, HomologyReport, LaError, RankPolicy, SparseMatrix};
use crate::operads::{graft, lie_basis, perm_sign, permutations, pl_insert, Key, LinComb, OperadError};
use crate::treekit::{
    canonical_form, canonicalize, enumerate_labelled, enumerate_orbits, split_vertex_expansions, CanonicalResult,
    RootedTree, TreeError, VertexDecoration,
};

/// Largest `n + k` for which a component is built.
pub const TW_CAP: usize = 8;

#[derive(Debug, Error)]
pub enum TwError {
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error(transparent)]
    Operad(#[from] OperadError),
    #[error(transparent)]
    La(#[from] LaError),
    #[error(transparent)]
    Def(#[from] DefError),
    #[error("component ({n}, {k}) exceeds the cap n + k <= {cap}")]
    Cap { n: usize, k: usize, cap: usize },
    #[error("d∘d is nonzero at ({n}, {k}) ({nonzero} nonzero entries)")]
    DSquared { n: usize, k: usize, nonzero: usize },
    #[error("a differential term left the component: {0}")]
    Grading(String),
    #[error("the ideal is not closed under the differential at ({n}, {k})")]
    IdealNotClosed { n: usize, k: usize },
}

impl TwError {
    pub fn is_consistency_failure(&self) -> bool {
        match self {
            TwError::DSquared { .. } | TwError::Grading(_) | TwError::IdealNotClosed { .. } => true,
            TwError::Def(e) => e.is_consistency_failure(),
            TwError::La(LaError::CompositionNonzero { .. }) => true,
            _ => false,
        }
    }

    pub fn is_cap(&self) -> bool {
        match self {
            TwError::Cap { .. } | TwError::Tree(TreeError::ResourceLimit { .. }) => true,
            TwError::Def(e) => e.is_cap(),
            TwError::Operad(OperadError::Cap { .. }) => true,
            _ => false,
        }
    }
}

fn sign_pow(e: usize) -> i64 {
    if e % 2 == 0 {
        1
    } else {
        -1
    }
}

fn cap_check(n: usize, k: usize) -> Result<(), TwError> {
    if n + k > TW_CAP {
        Err(TwError::Cap { n, k, cap: TW_CAP })
    } else {
        Ok(())
    }
}

/// Canonical basis of the `(n, k)` component (empty for `n = k = 0`).
pub fn tw_basis(n: usize, k: usize) -> Result<Vec<RootedTree>, TwError> {
    cap_check(n, k)?;
    if n + k == 0 {
        return Ok(Vec::new());
    }
    Ok(enumerate_orbits(n, k, false)?)
}

/// The single-`Alpha`-edge tree `α ◁ α` (root first).
pub fn alpha_alpha() -> RootedTree {
    RootedTree::single(VertexDecoration::ALPHA).add_leaf(0, VertexDecoration::ALPHA)
}

/// Raw terms of the twisted differential of `t`, before canonicalisation:
/// splitting `Alpha` vertices, the bracket with `α` (new `Alpha` root, new
/// `Alpha` leaves) and the splitting of labelled vertices into a labelled
/// and an `Alpha` half.
pub fn tw_terms(t: &RootedTree) -> Vec<(RootedTree, i64)> {
    let k = t.n_alphas();
    let mut out = Vec::new();
    let mut pos = 0;
    for v in 0..t.len() {
        if t.is_odd(v) {
            pos += 1;
            for (tree, sg) in split_vertex_expansions(t, v, VertexDecoration::ALPHA, VertexDecoration::ALPHA) {
                out.push((tree, -sign_pow(pos - 1) * sg as i64));
            }
        }
    }
    out.push((t.graft_under_new_root(VertexDecoration::ALPHA), 1));
    for v in 0..t.len() {
        out.push((t.add_leaf(v, VertexDecoration::ALPHA), -sign_pow(k)));
    }
    let mut before = 0;
    for v in 0..t.len() {
        if t.is_odd(v) {
            before += 1;
            continue;
        }
        let d = t.decoration(v);
        for (tree, _) in split_vertex_expansions(t, v, VertexDecoration::ALPHA, d) {
            out.push((tree, -sign_pow(before)));
        }
        for (tree, _) in split_vertex_expansions(t, v, d, VertexDecoration::ALPHA) {
            out.push((tree, sign_pow(k)));
        }
    }
    out
}

/// Sums raw terms in the canonical basis, dropping sign-killed trees.
pub fn reduce_terms(terms: impl IntoIterator<Item = (RootedTree, i64)>) -> BTreeMap<RootedTree, i64> {
    let mut out: BTreeMap<RootedTree, i64> = BTreeMap::new();
    for (t, c) in terms {
        if let CanonicalResult::Canonical { rep, sign } = canonicalize(&t) {
            *out.entry(rep).or_insert(0) += c * sign as i64;
        }
    }
    out.retain(|_, c| *c != 0);
    out
}

/// The twisted differential applied to a combination of trees.
pub fn tw_apply(x: &BTreeMap<RootedTree, i64>) -> BTreeMap<RootedTree, i64> {
    reduce_terms(x.iter().flat_map(|(t, &c)| tw_terms(t).into_iter().map(move |(u, d)| (u, c * d))))
}

fn index_of(basis: &[RootedTree]) -> HashMap<&RootedTree, usize> {
    basis.iter().enumerate().map(|(i, t)| (t, i)).collect()
}

fn column(
    x: &BTreeMap<RootedTree, i64>,
    index: &HashMap<&RootedTree, usize>,
    n: usize,
    k: usize,
) -> Result<Vec<(usize, Coeff)>, TwError> {
    x.iter()
        .map(|(t, &c)| match index.get(t) {
            Some(&r) => Ok((r, Coeff::from_integer(c))),
            None => Err(TwError::Grading(format!("{t} is not a basis tree of ({n}, {k})"))),
        })
        .collect()
}

/// Arity-`n` part of `Tw(PL)` for `k = 0..=k_top`, with the blocks
/// `D_k: (n, k) -> (n, k + 1)` for `k < k_top`.
#[derive(Clone, Debug)]
pub struct TwComplex {
    pub n: usize,
    bases: Vec<Vec<RootedTree>>,
    blocks: Vec<SparseMatrix>,
}

impl TwComplex {
    pub fn build(n: usize, k_top: usize) -> Result<Self, TwError> {
        cap_check(n, k_top)?;
        let bases: Vec<Vec<RootedTree>> = (0..=k_top).map(|k| tw_basis(n, k)).collect::<Result<_, _>>()?;
        let mut blocks = Vec::new();
        for k in 0..k_top {
            let index = index_of(&bases[k + 1]);
            let cols = bases[k]
                .iter()
                .map(|t| column(&reduce_terms(tw_terms(t)), &index, n, k + 1))
                .collect::<Result<Vec<_>, _>>()?;
            blocks.push(SparseMatrix::from_columns(bases[k + 1].len(), cols));
        }
        Ok(TwComplex { n, bases, blocks })
    }

    pub fn k_top(&self) -> usize {
        self.bases.len() - 1
    }

    pub fn dim(&self, k: usize) -> usize {
        self.bases.get(k).map_or(0, |b| b.len())
    }

    pub fn basis(&self, k: usize) -> &[RootedTree] {
        &self.bases[k]
    }

    /// `D_k`; `D_{-1}` is represented by `k = usize::MAX` as the zero map.
    pub fn block(&self, k: usize) -> &SparseMatrix {
        &self.blocks[k]
    }

    fn block_in(&self, k: usize) -> SparseMatrix {
        if k == 0 {
            SparseMatrix::zeros(self.dim(0), 0)
        } else {
            self.blocks[k - 1].clone()
        }
    }

    pub fn check_d_squared(&self) -> Result<(), TwError> {
        for k in 1..self.blocks.len() {
            let nz = self.blocks[k].product_nonzeros(&self.blocks[k - 1])?;
            if nz > 0 {
                return Err(TwError::DSquared { n: self.n, k: k - 1, nonzero: nz });
            }
        }
        Ok(())
    }

    /// Homology at `k = 0..=k_max` (`k_max < k_top`).
    pub fn homology(&self, k_max: usize, policy: RankPolicy) -> Result<Vec<HomologyReport>, TwError> {
        if k_max >= self.k_top() {
            return Err(TwError::Cap { n: self.n, k: k_max + 1, cap: self.k_top() });
        }
        self.check_d_squared()?;
        (0..=k_max)
            .map(|k| {
                Ok(exactla::homology_dim_with(
                    &self.block_in(k),
                    &self.blocks[k],
                    policy,
                    Grade::Bidegree { arity: self.n, alphas: k },
                )?)
            })
            .collect()
    }
}

/// Betti numbers of `Tw(PL)(n)` at `k = 0..=k_max`.
pub fn tw_homology(n: usize, k_max: usize, policy: RankPolicy) -> Result<Vec<HomologyReport>, TwError> {
    TwComplex::build(n, k_max + 1)?.homology(k_max, policy)
}

/// Coordinates of a combination of labelled trees (no `Alpha` vertices) in
/// the `k = 0` basis.
fn pl_column(x: &LinComb<Key>, index: &HashMap<&RootedTree, usize>, n: usize) -> Result<Vec<(usize, Coeff)>, TwError> {
    x.iter()
        .map(|(key, c)| {
            let Key::Tree(t) = key else { return Err(TwError::Grading(key.to_string())) };
            let r = *index.get(t).ok_or_else(|| TwError::Grading(format!("{t} is not in PL({n})")))?;
            Ok((r, exactla::from_big(c).ok_or_else(|| TwError::Grading("coefficient overflow".into()))?))
        })
        .collect()
}

/// Outcome of pushing the Lie brackets into degree zero homology.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LieImage {
    pub n: usize,
    pub brackets: usize,
    pub all_cycles: bool,
    pub rank: usize,
    pub betti0: usize,
}

impl LieImage {
    pub fn passed(&self) -> bool {
        self.all_cycles && self.rank == self.brackets && self.betti0 == self.brackets
    }
}

/// The left-normed brackets are cycles, independent, and span the whole
/// `k = 0` homology (nothing hits `k = 0`, so independence is injectivity).
pub fn lie_image_check(n: usize) -> Result<LieImage, TwError> {
    let c = TwComplex::build(n, 1)?;
    let index = index_of(c.basis(0));
    let brackets = lie_basis(n)?;
    let cols = brackets.iter().map(|b| pl_column(b, &index, n)).collect::<Result<Vec<_>, _>>()?;
    let l = SparseMatrix::from_columns(c.dim(0), cols);
    let image = c.block(0).mul(&l)?;
    let betti0 = c.homology(0, RankPolicy::exact_only())?[0].betti;
    Ok(LieImage { n, brackets: brackets.len(), all_cycles: image.is_zero(), rank: exactla::rank(&l), betti0 })
}

/// Spanning set of the ideal generated by `α ◁ α` in component `(n, k)`:
/// `α ◁ α` inserted at every labelled vertex of every tree of `(n + 1, k - 2)`.
pub fn ideal_spanning(n: usize, k: usize, target: &[RootedTree]) -> Result<SparseMatrix, TwError> {
    if k < 2 {
        return Ok(SparseMatrix::zeros(target.len(), 0));
    }
    let index = index_of(target);
    let aa = alpha_alpha();
    let mut cols = Vec::new();
    for u in tw_basis(n + 1, k - 2)? {
        for j in 1..=(n + 1) as u32 {
            let x = reduce_terms(pl_insert(&u, j, &aa, |_| VertexDecoration::ALPHA, 0).into_iter().map(|t| (t, 1)));
            if !x.is_empty() {
                cols.push(column(&x, &index, n, k)?);
            }
        }
    }
    Ok(SparseMatrix::from_columns(target.len(), cols))
}

/// An independent basis of the ideal component, as columns in the basis of
/// [`tw_basis`]`(n, k)`.
pub fn ideal_component(n: usize, k: usize) -> Result<SparseMatrix, TwError> {
    let target = tw_basis(n, k)?;
    let span = ideal_spanning(n, k, &target)?;
    let keep = exactla::independent_columns(&span);
    Ok(SparseMatrix::from_columns(target.len(), keep.iter().map(|&j| span.column(j).to_vec()).collect()))
}

/// Rank of `[a | b]`.
fn joint_rank(a: &SparseMatrix, b: &SparseMatrix, policy: RankPolicy) -> Result<exactla::RankOutcome, TwError> {
    Ok(exactla::rank_with(&a.hstack(b)?, policy))
}

/// Per-`k` data of the quotient complex `Tw(PL)(n) / (α ◁ α)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RplRow {
    pub arity: usize,
    pub alphas: usize,
    pub tw_dim: usize,
    pub ideal_dim: usize,
    pub dim: usize,
    pub rank_in: usize,
    pub rank_out: usize,
    pub betti: usize,
    pub exact: bool,
}

/// Homology of the quotient at `k = 0..=k_max`, after checking that the
/// differential maps the ideal into itself.
pub fn rpl_homology(n: usize, k_max: usize, policy: RankPolicy) -> Result<Vec<RplRow>, TwError> {
    let c = TwComplex::build(n, k_max + 1)?;
    c.check_d_squared()?;
    let ideals: Vec<SparseMatrix> = (0..=k_max + 1)
        .map(|k| {
            let span = ideal_spanning(n, k, c.basis(k))?;
            let keep = exactla::independent_columns(&span);
            Ok(SparseMatrix::from_columns(c.dim(k), keep.iter().map(|&j| span.column(j).to_vec()).collect()))
        })
        .collect::<Result<_, TwError>>()?;
    // quotient ranks q_k of D_k: C_k / I_k -> C_{k+1} / I_{k+1}
    let mut q = Vec::new();
    for k in 0..=k_max {
        let i_next = &ideals[k + 1];
        let moved = c.block(k).mul(&ideals[k])?;
        let base = exactla::rank(i_next);
        if exactla::rank_with(&i_next.hstack(&moved)?, policy).rank != base {
            return Err(TwError::IdealNotClosed { n, k });
        }
        let joint = joint_rank(c.block(k), i_next, policy)?;
        q.push((joint.rank - base, joint.exact));
    }
    let mut rows = Vec::new();
    for k in 0..=k_max {
        let dim = c.dim(k) - ideals[k].n_cols();
        let (rank_in, ex_in) = if k == 0 { (0, true) } else { q[k - 1] };
        let (rank_out, ex_out) = q[k];
        rows.push(RplRow {
            arity: n,
            alphas: k,
            tw_dim: c.dim(k),
            ideal_dim: ideals[k].n_cols(),
            dim,
            rank_in,
            rank_out,
            betti: dim - rank_in - rank_out,
            exact: ex_in && ex_out,
        });
    }
    Ok(rows)
}

/// Basis of the kernel of the quotient differential on the `k = 0` part
/// (which is `PL(n)`; the ideal vanishes for `k <= 1`).
pub fn lie_elements_kernel(n: usize) -> Result<Vec<LinComb<Key>>, TwError> {
    let c = TwComplex::build(n, 1)?;
    let basis = c.basis(0);
    Ok(exactla::kernel(c.block(0))
        .into_iter()
        .map(|v| LinComb::from_terms(v.into_iter().map(|(i, x)| (Key::Tree(basis[i].clone()), x))))
        .collect())
}

/// Subspace comparison of the kernel with the span of the Lie brackets.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KernelReport {
    pub n: usize,
    pub kernel_dim: usize,
    pub lie_dim: usize,
    pub joint_rank: usize,
}

impl KernelReport {
    pub fn passed(&self) -> bool {
        self.kernel_dim == self.lie_dim && self.joint_rank == self.kernel_dim
    }
}

pub fn kernel_criterion(n: usize) -> Result<KernelReport, TwError> {
    let basis = tw_basis(n, 0)?;
    let index = index_of(&basis);
    let to_matrix = |xs: &[LinComb<Key>]| -> Result<SparseMatrix, TwError> {
        let cols = xs.iter().map(|x| pl_column(x, &index, n)).collect::<Result<Vec<_>, _>>()?;
        Ok(SparseMatrix::from_columns(basis.len(), cols))
    };
    let k = to_matrix(&lie_elements_kernel(n)?)?;
    let l = to_matrix(&lie_basis(n)?)?;
    Ok(KernelReport { n, kernel_dim: exactla::rank(&k), lie_dim: exactla::rank(&l), joint_rank: exactla::rank(&k.hstack(&l)?) })
}

fn sum_raw(terms: Vec<(RootedTree, i64)>) -> BTreeMap<RootedTree, i64> {
    let mut m = BTreeMap::new();
    for (t, c) in terms {
        *m.entry(t).or_insert(0) += c;
    }
    m
}

fn graft_all(a: &BTreeMap<RootedTree, i64>, b: &BTreeMap<RootedTree, i64>) -> Vec<(RootedTree, i64)> {
    let mut out = Vec::new();
    for (s, cs) in a {
        for (t, ct) in b {
            for v in 0..s.len() {
                out.push((graft(s, v, t), cs * ct));
            }
        }
    }
    out
}

/// The three-vertex tree with an `Alpha` root and subtrees `a`, `b`.
pub fn alpha_corolla(a: &RootedTree, b: &RootedTree) -> RootedTree {
    let root = RootedTree::single(VertexDecoration::ALPHA);
    graft(&graft(&root, 0, a), 0, b)
}

/// Failure of the derivation rule for a pair of trees.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QIdentityFailure {
    pub a: String,
    pub b: String,
    pub defect: String,
}

/// `d(a ◁ b) - d(a) ◁ b - a ◁ d(b) = Q(a, b)` for all labelled trees `a` on
/// `1..=p` and `b` on `p+1..=n`, where `Q(a, b) = ∘(a, b)` is the corolla on
/// the element `∘ = -α`.
pub fn q_identity_check(n: usize) -> Result<Vec<QIdentityFailure>, TwError> {
    cap_check(n, 1)?;
    let mut failures = Vec::new();
    for p in 1..n {
        let left = tw_basis(p, 0)?;
        let right: Vec<RootedTree> =
            tw_basis(n - p, 0)?.into_iter().map(|t| t.map_labels(|l| l + p as u32)).collect();
        for a in &left {
            for b in &right {
                let xa = BTreeMap::from([(a.clone(), 1)]);
                let xb = BTreeMap::from([(b.clone(), 1)]);
                let prod = reduce_terms(graft_all(&xa, &xb));
                let mut terms: Vec<(RootedTree, i64)> = tw_apply(&prod).into_iter().collect();
                let da = sum_raw(tw_terms(a));
                let db = sum_raw(tw_terms(b));
                terms.extend(graft_all(&da, &xb).into_iter().map(|(t, c)| (t, -c)));
                terms.extend(graft_all(&xa, &db).into_iter().map(|(t, c)| (t, -c)));
                terms.push((alpha_corolla(a, b), 1));
                let defect = reduce_terms(terms);
                if !defect.is_empty() {
                    let text: Vec<String> = defect.iter().map(|(t, c)| format!("{c} {t}")).collect();
                    failures.push(QIdentityFailure { a: a.to_string(), b: b.to_string(), defect: text.join(" + ") });
                }
            }
        }
    }
    Ok(failures)
}

/// Compares the arity-zero blocks with the tree model of `Def(Lie -> PL)`:
/// `D_k` must equal `±` the weight-`k` block for `1 <= k <= k_max`.
pub fn arity_zero_matches_def(k_max: usize) -> Result<Vec<(usize, Option<i64>)>, TwError> {
    let tw = TwComplex::build(0, k_max + 1)?;
    let def = build_lie_to_pl(k_max)?;
    let mut out = Vec::new();
    for k in 1..=k_max {
        let same_basis = def.basis(k).iter().zip(tw.basis(k)).all(|(key, t)| *key == Key::Tree(t.clone()))
            && def.dim(k) == tw.dim(k)
            && def.dim(k + 1) == tw.dim(k + 1);
        let d = def.block_ref(k);
        let sign = if !same_basis {
            None
        } else if tw.block(k) == d {
            Some(1)
        } else if *tw.block(k) == d.scale(Coeff::from_integer(-1)) {
            Some(-1)
        } else {
            None
        };
        out.push((k, sign));
    }
    Ok(out)
}

/// Dimension of the `(n, k)` component computed without the orbit sign
/// rule: enumerate labelled trees on `n + k` labels, read labels above `n`
/// as `Alpha` vertices, and count orbits under their permutations on which
/// the signed average does not vanish.
pub fn orbit_dimension_oracle(n: usize, k: usize) -> Result<usize, TwError> {
    cap_check(n, k)?;
    if n + k == 0 {
        return Ok(0);
    }
    let perms = permutations(k);
    let mut seen: HashSet<RootedTree> = HashSet::new();
    let mut count = 0;
    for t in enumerate_labelled(n + k)? {
        if seen.contains(&t) {
            continue;
        }
        let mut avg: HashMap<RootedTree, i64> = HashMap::new();
        for sigma in &perms {
            let u = canonical_form(&t.map_labels(|l| if l as usize <= n { l } else { sigma[l as usize - n - 1] + n as u32 })).0;
            *avg.entry(u.clone()).or_insert(0) += perm_sign(sigma);
            seen.insert(u);
        }
        if avg.values().any(|&c| c != 0) {
            count += 1;
        }
    }
    Ok(count)
}

/// `(n, k, orbit count, oracle count)` for all `n + k <= max_total`.
pub fn orbit_oracle_table(max_total: usize) -> Result<Vec<(usize, usize, usize, usize)>, TwError> {
    let mut out = Vec::new();
    for total in 1..=max_total {
        for n in 0..=total {
            let k = total - n;
            out.push((n, k, tw_basis(n, k)?.len(), orbit_dimension_oracle(n, k)?));
        }
    }
    Ok(out)
}
