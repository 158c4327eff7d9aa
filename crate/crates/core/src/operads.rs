//! Explicit operads with bases and partial compositions.
//!
//! Keys of arity `n` are always multilinear in the inputs `1..=n`. The
//! symmetric group acts by relabelling inputs: `σ·μ` feeds input `i` of `μ`
//! with the variable `σ(i)`. None of these operads carries an internal
//! grading, so the action never introduces a sign; signs only enter through
//! the suspension [`SuspensionData`].
//!
//! `Lie` is never given a separate presentation. It is the suboperad of `PL`
//! spanned by [`lie_basis`].

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::treekit::{canonical_form, format_tree, parse_tree, RootedTree, TreeError, VertexDecoration, VertexKind};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OperadError {
    #[error("slot {slot} out of range for arity {arity}")]
    SlotOutOfRange { slot: usize, arity: usize },
    #[error("label mismatch: {0}")]
    LabelMismatch(String),
    #[error("key {key} is not a basis key of {operad}")]
    WrongKey { key: String, operad: String },
    #[error("cannot parse key {0:?}")]
    BadKey(String),
    #[error("arity {arity} exceeds the cap {cap}")]
    Cap { arity: usize, cap: usize },
    #[error(transparent)]
    Tree(#[from] TreeError),
}

// ---------------------------------------------------------------------------
// Linear combinations

/// Finite rational combination of keys; zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LinComb<K: Ord> {
    terms: BTreeMap<K, BigRational>,
}

impl<K: Ord> Default for LinComb<K> {
    fn default() -> Self {
        LinComb { terms: BTreeMap::new() }
    }
}

impl<K: Ord + Clone> LinComb<K> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn single(key: K) -> Self {
        let mut l = Self::new();
        l.add_term(key, BigRational::one());
        l
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (K, BigRational)>) -> Self {
        let mut l = Self::new();
        for (k, c) in terms {
            l.add_term(k, c);
        }
        l
    }

    pub fn add_term(&mut self, key: K, c: BigRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(key) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add_int(&mut self, key: K, c: i64) {
        self.add_term(key, BigRational::from_integer(BigInt::from(c)));
    }

    pub fn add_scaled(&mut self, other: &LinComb<K>, s: &BigRational) {
        for (k, c) in &other.terms {
            self.add_term(k.clone(), c * s);
        }
    }

    pub fn scaled(&self, s: &BigRational) -> LinComb<K> {
        let mut l = Self::new();
        l.add_scaled(self, s);
        l
    }

    pub fn neg(&self) -> LinComb<K> {
        self.scaled(&-BigRational::one())
    }

    pub fn sub(&self, other: &LinComb<K>) -> LinComb<K> {
        let mut l = self.clone();
        l.add_scaled(other, &-BigRational::one());
        l
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, key: &K) -> BigRational {
        self.terms.get(key).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&K, &BigRational)> {
        self.terms.iter()
    }

    pub fn keys(&self) -> impl Iterator<Item = &K> {
        self.terms.keys()
    }

    /// Applies a signed map to every key.
    pub fn map<L: Ord + Clone>(&self, mut f: impl FnMut(&K) -> Option<(L, i64)>) -> LinComb<L> {
        let mut out = LinComb::new();
        for (k, c) in &self.terms {
            if let Some((l, s)) = f(k) {
                out.add_term(l, c * BigRational::from_integer(BigInt::from(s)));
            }
        }
        out
    }

    /// Bilinear extension of `f` on pairs of keys.
    pub fn bilinear<L: Ord + Clone, M: Ord + Clone>(
        &self,
        other: &LinComb<L>,
        mut f: impl FnMut(&K, &L) -> LinComb<M>,
    ) -> LinComb<M> {
        let mut out = LinComb::new();
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                out.add_scaled(&f(a, b), &(ca * cb));
            }
        }
        out
    }
}

impl<K: Ord + fmt::Display> fmt::Display for LinComb<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (idx, (k, c)) in self.terms.iter().enumerate() {
            if idx > 0 {
                f.write_str("\n")?;
            }
            write!(f, "{c} {k}")?;
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Basis keys

/// A basis element of one of the explicit operads, or of a Hadamard product.
///
/// `Tree` keys are labelled rooted trees in canonical layout. `Perm` records
/// which input is underlined. `Ass` stores the word `x_{w_1} ... x_{w_n}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Key {
    Tree(RootedTree),
    Perm { arity: usize, mark: usize },
    Ass(Vec<u32>),
    Com(usize),
    Pair(Box<Key>, Box<Key>),
    /// Stands for the left-normed bracket of the given arity; only used to
    /// name elements of subspaces spanned by brackets.
    Bracket(usize),
}

impl Key {
    /// Canonical key for a labelled tree.
    pub fn tree(t: &RootedTree) -> Key {
        Key::Tree(canonical_form(t).0)
    }

    pub fn pair(a: Key, b: Key) -> Key {
        Key::Pair(Box::new(a), Box::new(b))
    }

    pub fn arity(&self) -> usize {
        match self {
            Key::Tree(t) => t.n_labels(),
            Key::Perm { arity, .. } => *arity,
            Key::Ass(w) => w.len(),
            Key::Com(n) => *n,
            Key::Pair(a, _) => a.arity(),
            Key::Bracket(n) => *n,
        }
    }

    /// `σ·key` where `sigma[i-1] = σ(i)`.
    pub fn act(&self, sigma: &[u32]) -> Key {
        match self {
            Key::Tree(t) => Key::tree(&t.map_labels(|l| sigma[l as usize - 1])),
            Key::Perm { arity, mark } => Key::Perm { arity: *arity, mark: sigma[mark - 1] as usize },
            Key::Ass(w) => Key::Ass(w.iter().map(|&l| sigma[l as usize - 1]).collect()),
            Key::Com(n) => Key::Com(*n),
            Key::Pair(a, b) => Key::pair(a.act(sigma), b.act(sigma)),
            Key::Bracket(n) => Key::Bracket(*n),
        }
    }

    pub fn parse(text: &str) -> Result<Key, OperadError> {
        let bad = || OperadError::BadKey(text.to_string());
        let text = text.trim();
        if let Some(rest) = text.strip_prefix("perm:") {
            let (n, i) = rest.split_once(':').ok_or_else(bad)?;
            let arity: usize = n.parse().map_err(|_| bad())?;
            let mark: usize = i.parse().map_err(|_| bad())?;
            if mark == 0 || mark > arity {
                return Err(bad());
            }
            return Ok(Key::Perm { arity, mark });
        }
        if let Some(rest) = text.strip_prefix("ass:") {
            let w: Vec<u32> = if rest.contains(',') {
                rest.split(',').map(|s| s.parse().map_err(|_| bad())).collect::<Result<_, _>>()?
            } else {
                rest.chars().map(|c| c.to_digit(10).ok_or_else(bad)).collect::<Result<_, _>>()?
            };
            let mut sorted = w.clone();
            sorted.sort_unstable();
            if w.is_empty() || sorted.iter().enumerate().any(|(k, &l)| l as usize != k + 1) {
                return Err(bad());
            }
            return Ok(Key::Ass(w));
        }
        if let Some(rest) = text.strip_prefix("com:") {
            let n: usize = rest.parse().map_err(|_| bad())?;
            if n == 0 {
                return Err(bad());
            }
            return Ok(Key::Com(n));
        }
        if let Some(rest) = text.strip_prefix("lie:") {
            let n: usize = rest.parse().map_err(|_| bad())?;
            return Ok(Key::Bracket(n));
        }
        if text.starts_with('<') && text.ends_with('>') {
            let inner = &text[1..text.len() - 1];
            let (a, b) = split_top_level(inner).ok_or_else(bad)?;
            return Ok(Key::pair(Key::parse(a)?, Key::parse(b)?));
        }
        let t = parse_tree(text)?;
        if t.n_alphas() > 0 || t.marked_vertex().is_some() {
            return Err(bad());
        }
        Ok(Key::tree(&t))
    }
}

fn split_top_level(s: &str) -> Option<(&str, &str)> {
    let mut depth = 0i32;
    for (i, ch) in s.char_indices() {
        match ch {
            '(' | '<' => depth += 1,
            ')' | '>' => depth -= 1,
            '|' if depth == 0 => return Some((&s[..i], &s[i + 1..])),
            _ => {}
        }
    }
    None
}

impl fmt::Display for Key {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Key::Tree(t) => f.write_str(&format_tree(t)),
            Key::Perm { arity, mark } => write!(f, "perm:{arity}:{mark}"),
            Key::Ass(w) => {
                let sep = if w.len() >= 10 { "," } else { "" };
                let parts: Vec<String> = w.iter().map(|l| l.to_string()).collect();
                write!(f, "ass:{}", parts.join(sep))
            }
            Key::Com(n) => write!(f, "com:{n}"),
            Key::Pair(a, b) => write!(f, "<{a}|{b}>"),
            Key::Bracket(n) => write!(f, "lie:{n}"),
        }
    }
}

// ---------------------------------------------------------------------------
// Permutations

/// All permutations of `1..=n` in lexicographic order, one-line notation.
pub fn permutations(n: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur: Vec<u32> = (1..=n as u32).collect();
    loop {
        out.push(cur.clone());
        let Some(i) = (1..n).rev().find(|&i| cur[i - 1] < cur[i]) else {
            return out;
        };
        let j = (i..n).rev().find(|&j| cur[j] > cur[i - 1]).unwrap();
        cur.swap(i - 1, j);
        cur[i..].reverse();
    }
}

pub fn perm_sign(sigma: &[u32]) -> i64 {
    let seq: Vec<usize> = sigma.iter().map(|&s| s as usize).collect();
    crate::treekit::permutation_sign(&seq) as i64
}

pub fn perm_inverse(sigma: &[u32]) -> Vec<u32> {
    let mut inv = vec![0u32; sigma.len()];
    for (i, &s) in sigma.iter().enumerate() {
        inv[s as usize - 1] = i as u32 + 1;
    }
    inv
}

/// The block permutation `σ ∘_i τ` making the action compatible with `∘_i`:
/// `(σ·μ) ∘_{σ(i)} (τ·ν) = (σ ∘_i τ)·(μ ∘_i ν)`.
pub fn compose_perms(sigma: &[u32], i: usize, tau: &[u32]) -> Vec<u32> {
    let n = sigma.len();
    let m = tau.len();
    let si = sigma[i - 1] as usize;
    let place = |s: usize| if s < si { s } else { s + m - 1 };
    let mut out = Vec::with_capacity(n + m - 1);
    for l in 1..=n + m - 1 {
        let image = if l < i {
            place(sigma[l - 1] as usize)
        } else if l < i + m {
            si + tau[l - i] as usize - 1
        } else {
            place(sigma[l - m] as usize)
        };
        out.push(image as u32);
    }
    out
}

/// Relabelling of a composite `μ ∘_i ν` (arities `n`, `m`): where input `l`
/// of `μ` (other than `i`) ends up.
fn outer_label(l: u32, i: u32, m: u32) -> u32 {
    if l < i {
        l
    } else {
        l + m - 1
    }
}

// ---------------------------------------------------------------------------
// PL

fn check_slot(i: usize, arity: usize) -> Result<(), OperadError> {
    if i == 0 || i > arity {
        Err(OperadError::SlotOutOfRange { slot: i, arity })
    } else {
        Ok(())
    }
}

fn check_labelled(t: &RootedTree) -> Result<(), OperadError> {
    if t.n_alphas() > 0 || t.marked_vertex().is_some() || t.odd_all() {
        return Err(OperadError::WrongKey { key: format_tree(t), operad: "PL".into() });
    }
    Ok(())
}

/// Insertion of `s` into the vertex labelled `i` of `t`: the root of `s`
/// takes the place of that vertex and every child of it is regrafted onto any
/// vertex of `s`, in all possible ways.
pub fn pl_compose(t: &RootedTree, i: usize, s: &RootedTree) -> Result<LinComb<Key>, OperadError> {
    check_labelled(t)?;
    check_labelled(s)?;
    let n = t.n_labels();
    let m = s.n_labels();
    if i == 0 || i > n {
        return Err(OperadError::LabelMismatch(format!("label {i} does not occur in {}", format_tree(t))));
    }
    let mut out = LinComb::new();
    for tree in pl_insert(t, i as u32, s, |l| VertexDecoration::label(l + i as u32 - 1), m) {
        out.add_int(Key::tree(&tree), 1);
    }
    Ok(out)
}

/// Raw insertion used by `pl_compose` and by the twisted complexes: returns
/// every grafted tree (vertices of `t` except the target keep their ids, the
/// vertices of `s` follow in their own order). `s_deco` decorates the
/// inserted vertices from the original labels; labels of `t` above `i` shift
/// by `shift - 1`.
pub(crate) fn pl_insert(
    t: &RootedTree,
    i: u32,
    s: &RootedTree,
    mut s_deco: impl FnMut(u32) -> VertexDecoration,
    shift: usize,
) -> Vec<RootedTree> {
    let target = t.vertex_with_label(i).expect("label present");
    let kids = t.children(target);
    let nt = t.len();
    // ids: t vertices before target keep ids, after target shift down by one,
    // then s vertices
    let tid = |v: usize| if v < target { v } else { v - 1 };
    let base = nt - 1;
    let sroot = s.root();
    let mut parent = vec![0usize; nt - 1 + s.len()];
    let mut deco = Vec::with_capacity(nt - 1 + s.len());
    for v in 0..nt {
        if v == target {
            continue;
        }
        let d = t.decoration(v);
        deco.push(match d.kind {
            VertexKind::Label(l) => VertexDecoration {
                kind: VertexKind::Label(outer_label(l, i, shift as u32)),
                marked: d.marked,
            },
            VertexKind::Alpha => d,
        });
    }
    for v in 0..s.len() {
        let d = s.decoration(v);
        deco.push(match d.kind {
            VertexKind::Label(l) => s_deco(l).with_mark(d.marked || s_deco(l).marked),
            VertexKind::Alpha => d,
        });
    }
    for v in 0..nt {
        if v == target {
            continue;
        }
        let p = t.parent(v);
        parent[tid(v)] = if p == target { usize::MAX } else { tid(p) };
    }
    let t_root_is_target = t.root() == target;
    for v in 0..s.len() {
        parent[base + v] = if v == sroot {
            if t_root_is_target {
                base + v
            } else {
                tid(t.parent(target))
            }
        } else {
            base + s.parent(v)
        };
    }
    let ns = s.len();
    let total = ns.pow(kids.len() as u32);
    let mut out = Vec::with_capacity(total);
    let mut choice = vec![0usize; kids.len()];
    for _ in 0..total {
        let mut p = parent.clone();
        for (k, &c) in kids.iter().enumerate() {
            p[tid(c)] = base + choice[k];
        }
        out.push(RootedTree::from_parts(p, deco.clone(), t.odd_all()));
        for c in choice.iter_mut() {
            *c += 1;
            if *c < ns {
                break;
            }
            *c = 0;
        }
    }
    out
}

/// The tree obtained by hanging `s` below vertex `v` of `t`. Vertices of `s`
/// are appended after those of `t`; decorations are kept as they are.
pub fn graft(t: &RootedTree, v: usize, s: &RootedTree) -> RootedTree {
    let nt = t.len();
    let mut parent: Vec<usize> = t.parents().to_vec();
    let mut deco: Vec<VertexDecoration> = t.decorations().to_vec();
    for u in 0..s.len() {
        parent.push(if u == s.root() { v } else { nt + s.parent(u) });
        deco.push(s.decoration(u));
    }
    RootedTree::from_parts(parent, deco, t.odd_all())
}

/// The pre-Lie product `a ◁ b` of multilinear tree combinations on disjoint
/// label sets: `b` is grafted at every vertex of `a`.
pub fn pre_lie_product(a: &LinComb<Key>, b: &LinComb<Key>) -> LinComb<Key> {
    a.bilinear(b, |x, y| {
        let (Key::Tree(s), Key::Tree(t)) = (x, y) else {
            panic!("pre-Lie product needs tree keys");
        };
        let mut out = LinComb::new();
        for v in 0..s.len() {
            out.add_int(Key::tree(&graft(s, v, t)), 1);
        }
        out
    })
}

pub fn bracket(a: &LinComb<Key>, b: &LinComb<Key>) -> LinComb<Key> {
    pre_lie_product(a, b).sub(&pre_lie_product(b, a))
}

/// Largest arity accepted by [`lie_basis`].
pub const LIE_BASIS_CAP: usize = 8;

/// Left-normed brackets `[[..[x_1, x_{σ(2)}], ..], x_{σ(n)}]` expanded in
/// the tree basis of `PL(n)`, for all permutations `σ` of `2..=n` in
/// lexicographic order.
pub fn lie_basis(n: usize) -> Result<Vec<LinComb<Key>>, OperadError> {
    if n == 0 {
        return Err(OperadError::SlotOutOfRange { slot: 0, arity: 0 });
    }
    if n > LIE_BASIS_CAP {
        return Err(OperadError::Cap { arity: n, cap: LIE_BASIS_CAP });
    }
    let leaf = |l: u32| LinComb::single(Key::tree(&RootedTree::single(VertexDecoration::label(l))));
    let rest: Vec<Vec<u32>> = permutations(n - 1).into_iter().map(|p| p.iter().map(|x| x + 1).collect()).collect();
    Ok(rest
        .iter()
        .map(|word| {
            let mut acc = leaf(1);
            for &l in word {
                acc = bracket(&acc, &leaf(l));
            }
            acc
        })
        .collect())
}

/// The left-normed bracket `[[..[x_1, x_2], ..], x_n]`.
pub fn left_normed_bracket(n: usize) -> LinComb<Key> {
    let leaf = |l: u32| LinComb::single(Key::tree(&RootedTree::single(VertexDecoration::label(l))));
    let mut acc = leaf(1);
    for l in 2..=n as u32 {
        acc = bracket(&acc, &leaf(l));
    }
    acc
}

/// Image under `PL → Com`: every tree goes to the single basis element.
pub fn project_to_com(x: &LinComb<Key>) -> BigRational {
    x.iter().map(|(_, c)| c.clone()).sum()
}

// ---------------------------------------------------------------------------
// Perm, Ass, Com

pub fn perm_compose(mu: &Key, i: usize, nu: &Key) -> Result<LinComb<Key>, OperadError> {
    let (&Key::Perm { arity: n, mark: a }, &Key::Perm { arity: m, mark: b }) = (mu, nu) else {
        return Err(OperadError::WrongKey { key: format!("{mu} or {nu}"), operad: "Perm".into() });
    };
    check_slot(i, n)?;
    let mark = if a == i {
        i + b - 1
    } else {
        outer_label(a as u32, i as u32, m as u32) as usize
    };
    Ok(LinComb::single(Key::Perm { arity: n + m - 1, mark }))
}

pub fn ass_compose(mu: &Key, i: usize, nu: &Key) -> Result<LinComb<Key>, OperadError> {
    let (Key::Ass(w), Key::Ass(u)) = (mu, nu) else {
        return Err(OperadError::WrongKey { key: format!("{mu} or {nu}"), operad: "Ass".into() });
    };
    check_slot(i, w.len())?;
    let m = u.len() as u32;
    let mut out = Vec::with_capacity(w.len() + u.len() - 1);
    for &l in w {
        if l as usize == i {
            out.extend(u.iter().map(|&x| x + i as u32 - 1));
        } else {
            out.push(outer_label(l, i as u32, m));
        }
    }
    Ok(LinComb::single(Key::Ass(out)))
}

pub fn com_compose(mu: &Key, i: usize, nu: &Key) -> Result<LinComb<Key>, OperadError> {
    let (&Key::Com(n), &Key::Com(m)) = (mu, nu) else {
        return Err(OperadError::WrongKey { key: format!("{mu} or {nu}"), operad: "Com".into() });
    };
    check_slot(i, n)?;
    Ok(LinComb::single(Key::Com(n + m - 1)))
}

// ---------------------------------------------------------------------------
// Operads as values

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OperadName {
    PL,
    Perm,
    Ass,
    Com,
    Lie,
}

impl OperadName {
    pub fn koszul_dual(self) -> OperadName {
        match self {
            OperadName::PL => OperadName::Perm,
            OperadName::Perm => OperadName::PL,
            OperadName::Ass => OperadName::Ass,
            OperadName::Com => OperadName::Lie,
            OperadName::Lie => OperadName::Com,
        }
    }

    /// The operad whose keys carry elements of this one (`Lie` lives in `PL`).
    pub fn ambient(self) -> OperadImpl {
        match self {
            OperadName::PL | OperadName::Lie => OperadImpl::PL,
            OperadName::Perm => OperadImpl::Perm,
            OperadName::Ass => OperadImpl::Ass,
            OperadName::Com => OperadImpl::Com,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            OperadName::PL => "PL",
            OperadName::Perm => "Perm",
            OperadName::Ass => "Ass",
            OperadName::Com => "Com",
            OperadName::Lie => "Lie",
        }
    }

    /// Basis of the arity-two component, as elements of the ambient operad.
    pub fn generators(self) -> Vec<LinComb<Key>> {
        let t = |s: &str| LinComb::single(Key::parse(s).unwrap());
        match self {
            OperadName::PL => vec![t("1(2)"), t("2(1)")],
            OperadName::Perm => vec![t("perm:2:1"), t("perm:2:2")],
            OperadName::Ass => vec![t("ass:12"), t("ass:21")],
            OperadName::Com => vec![t("com:2")],
            OperadName::Lie => vec![t("1(2)").sub(&t("2(1)"))],
        }
    }

    /// The dual basis of [`Self::generators`] inside the arity-two component
    /// of the Koszul dual operad (pairing including the sign twist).
    pub fn dual_generators(self) -> Vec<LinComb<Key>> {
        let t = |s: &str| LinComb::single(Key::parse(s).unwrap());
        match self {
            OperadName::PL => vec![t("perm:2:1"), t("perm:2:2").neg()],
            OperadName::Perm => vec![t("1(2)"), t("2(1)").neg()],
            OperadName::Ass => vec![t("ass:12"), t("ass:21").neg()],
            OperadName::Com => vec![t("1(2)").sub(&t("2(1)"))],
            OperadName::Lie => vec![t("com:2")],
        }
    }
}

impl fmt::Display for OperadName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for OperadName {
    type Err = OperadError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "pl" | "prelie" => Ok(OperadName::PL),
            "perm" => Ok(OperadName::Perm),
            "ass" => Ok(OperadName::Ass),
            "com" => Ok(OperadName::Com),
            "lie" => Ok(OperadName::Lie),
            _ => Err(OperadError::BadKey(s.to_string())),
        }
    }
}

/// An operad given by a basis in each arity and partial compositions.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum OperadImpl {
    PL,
    Perm,
    Ass,
    Com,
    Hadamard(Box<OperadImpl>, Box<OperadImpl>),
}

impl OperadImpl {
    pub fn hadamard(p: OperadImpl, q: OperadImpl) -> OperadImpl {
        OperadImpl::Hadamard(Box::new(p), Box::new(q))
    }

    pub fn name(&self) -> String {
        match self {
            OperadImpl::PL => "PL".into(),
            OperadImpl::Perm => "Perm".into(),
            OperadImpl::Ass => "Ass".into(),
            OperadImpl::Com => "Com".into(),
            OperadImpl::Hadamard(p, q) => format!("({} x {})", p.name(), q.name()),
        }
    }

    pub fn basis(&self, n: usize) -> Result<Vec<Key>, OperadError> {
        if n == 0 {
            return Ok(Vec::new());
        }
        Ok(match self {
            OperadImpl::PL => crate::treekit::enumerate_labelled(n)?.into_iter().map(Key::Tree).collect(),
            OperadImpl::Perm => (1..=n).map(|mark| Key::Perm { arity: n, mark }).collect(),
            OperadImpl::Ass => permutations(n).into_iter().map(Key::Ass).collect(),
            OperadImpl::Com => vec![Key::Com(n)],
            OperadImpl::Hadamard(p, q) => {
                let bq = q.basis(n)?;
                let mut out = Vec::new();
                for a in p.basis(n)? {
                    for b in &bq {
                        out.push(Key::pair(a.clone(), b.clone()));
                    }
                }
                out
            }
        })
    }

    pub fn unit(&self) -> Key {
        match self {
            OperadImpl::PL => Key::tree(&RootedTree::single(VertexDecoration::label(1))),
            OperadImpl::Perm => Key::Perm { arity: 1, mark: 1 },
            OperadImpl::Ass => Key::Ass(vec![1]),
            OperadImpl::Com => Key::Com(1),
            OperadImpl::Hadamard(p, q) => Key::pair(p.unit(), q.unit()),
        }
    }

    pub fn compose(&self, mu: &Key, i: usize, nu: &Key) -> Result<LinComb<Key>, OperadError> {
        match (self, mu, nu) {
            (OperadImpl::PL, Key::Tree(t), Key::Tree(s)) => pl_compose(t, i, s),
            (OperadImpl::Perm, _, _) => perm_compose(mu, i, nu),
            (OperadImpl::Ass, _, _) => ass_compose(mu, i, nu),
            (OperadImpl::Com, _, _) => com_compose(mu, i, nu),
            (OperadImpl::Hadamard(p, q), Key::Pair(a1, a2), Key::Pair(b1, b2)) => {
                let x = p.compose(a1, i, b1)?;
                let y = q.compose(a2, i, b2)?;
                Ok(x.bilinear(&y, |u, v| LinComb::single(Key::pair(u.clone(), v.clone()))))
            }
            _ => Err(OperadError::WrongKey { key: format!("{mu} or {nu}"), operad: self.name() }),
        }
    }

    pub fn compose_lin(&self, mu: &LinComb<Key>, i: usize, nu: &LinComb<Key>) -> Result<LinComb<Key>, OperadError> {
        let mut out = LinComb::new();
        for (a, ca) in mu.iter() {
            for (b, cb) in nu.iter() {
                out.add_scaled(&self.compose(a, i, b)?, &(ca * cb));
            }
        }
        Ok(out)
    }

    /// `σ·key`; the sign is always `+1` for these ungraded operads.
    pub fn sym_action(&self, sigma: &[u32], key: &Key) -> (Key, i64) {
        (key.act(sigma), 1)
    }
}

// ---------------------------------------------------------------------------
// Suspension

/// Sign table of the operadic suspension `S`: `S(n)` is one-dimensional,
/// spanned by `f_n` of degree `1 - n`, with `S_n` acting by the sign
/// representation and `f_n ∘_i f_m = ε(n, i, m) f_{n+m-1}`. The standard
/// choice `ε = (-1)^{(m-1)(i-1)}` is the Koszul sign of moving the `m - 1`
/// degree shifts of the inserted generator past the `i - 1` earlier slots.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct SuspensionData {
    flipped: Vec<(usize, usize, usize)>,
}

impl SuspensionData {
    pub fn standard() -> Self {
        Self::default()
    }

    /// A deliberately broken table with the sign at `(n, i, m)` reversed.
    pub fn with_flipped_entry(n: usize, i: usize, m: usize) -> Self {
        SuspensionData { flipped: vec![(n, i, m)] }
    }

    pub fn is_standard(&self) -> bool {
        self.flipped.is_empty()
    }

    pub fn sign(&self, n: usize, i: usize, m: usize) -> i64 {
        let base = if (m - 1) * (i - 1) % 2 == 0 { 1 } else { -1 };
        if self.flipped.contains(&(n, i, m)) {
            -base
        } else {
            base
        }
    }
}

// ---------------------------------------------------------------------------
// Cooperad decomposition

/// One term of an infinitesimal decomposition: the dual of
/// `σ·(outer ∘_slot inner)` where `σ` is the unshuffle `shuffle`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DecompTerm {
    pub outer: Key,
    pub slot: usize,
    pub inner: Key,
    pub shuffle: Vec<u32>,
}

/// Pointed unshuffles for `∘_i` with an inner block of size `m` inside
/// arity `n`: `σ` is increasing on the inner block, and the outer inputs,
/// with the inner block represented by its smallest label, stay increasing.
/// Every two-vertex tree shape with slot `i` arises from exactly one of them.
pub fn unshuffles(n: usize, i: usize, m: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    for sigma in subsets(n, m).into_iter().map(|subset| {
        let rest: Vec<u32> = (1..=n as u32).filter(|x| !subset.contains(x)).collect();
        let mut r = rest.iter();
        (1..=n)
            .map(|l| if l >= i && l < i + m { subset[l - i] } else { *r.next().unwrap() })
            .collect::<Vec<u32>>()
    }) {
        let outer: Vec<u32> = (1..=n).filter(|&l| l <= i || l >= i + m).map(|l| sigma[l - 1]).collect();
        if outer.windows(2).all(|w| w[0] < w[1]) {
            out.push(sigma);
        }
    }
    out
}

fn subsets(n: usize, m: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut subset: Vec<u32> = (1..=m as u32).collect();
    loop {
        out.push(subset.clone());
        let Some(k) = (0..m).rev().find(|&k| subset[k] < (n - m + k + 1) as u32) else {
            return out;
        };
        subset[k] += 1;
        for j in k + 1..m {
            subset[j] = subset[j - 1] + 1;
        }
    }
}

/// Infinitesimal decomposition `Δ_i` of the dual basis element `key^∨` of
/// the cooperad `S ⊗ (P^!)^*`: the coefficient of `(x ⊗ y, σ)` is the
/// coefficient of `key` in `σ·(x ∘_i y)`, times the suspension sign and
/// `sgn(σ)`.
pub fn cooperad_decompose(
    pshriek: &OperadImpl,
    susp: &SuspensionData,
    key: &Key,
    i: usize,
    split: (usize, usize),
) -> Result<LinComb<DecompTerm>, OperadError> {
    let (a, b) = split;
    let n = key.arity();
    if a + b != n + 1 || a == 0 || b == 0 {
        return Err(OperadError::LabelMismatch(format!("split ({a},{b}) does not fit arity {n}")));
    }
    check_slot(i, a)?;
    let mut out = LinComb::new();
    let outer_basis = pshriek.basis(a)?;
    let inner_basis = pshriek.basis(b)?;
    let shuffles = unshuffles(n, i, b);
    for x in &outer_basis {
        for y in &inner_basis {
            let comp = pshriek.compose(x, i, y)?;
            for sigma in &shuffles {
                let c = comp.map(|k| Some((k.act(sigma), 1))).coeff(key);
                if c.is_zero() {
                    continue;
                }
                let s = susp.sign(a, i, b) * perm_sign(sigma);
                let term = DecompTerm { outer: x.clone(), slot: i, inner: y.clone(), shuffle: sigma.clone() };
                out.add_term(term, c * BigRational::from_integer(BigInt::from(s)));
            }
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Axiom checks

struct Memo<'a> {
    op: &'a OperadImpl,
    cache: HashMap<(Key, usize, Key), LinComb<Key>>,
}

impl Memo<'_> {
    fn get(&mut self, a: &Key, i: usize, b: &Key) -> Result<LinComb<Key>, OperadError> {
        let key = (a.clone(), i, b.clone());
        if let Some(v) = self.cache.get(&key) {
            return Ok(v.clone());
        }
        let v = self.op.compose(a, i, b)?;
        self.cache.insert(key, v.clone());
        Ok(v)
    }

    fn lin(&mut self, mu: &LinComb<Key>, i: usize, b: &Key) -> Result<LinComb<Key>, OperadError> {
        let mut out = LinComb::new();
        for (a, c) in mu.iter() {
            out.add_scaled(&self.get(a, i, b)?, c);
        }
        Ok(out)
    }

    fn lin_left(&mut self, a: &Key, i: usize, nu: &LinComb<Key>) -> Result<LinComb<Key>, OperadError> {
        let mut out = LinComb::new();
        for (b, c) in nu.iter() {
            out.add_scaled(&self.get(a, i, b)?, c);
        }
        Ok(out)
    }
}

/// Failures found by [`check_axioms`], rendered for diagnostics.
pub fn check_axioms(op: &OperadImpl, max_total: usize) -> Result<Vec<String>, OperadError> {
    let mut failures = Vec::new();
    let bases: Vec<Vec<Key>> = (0..=max_total).map(|n| op.basis(n)).collect::<Result<_, _>>()?;
    let unit = op.unit();
    for n in 1..=max_total {
        for a in &bases[n] {
            for i in 1..=n {
                if op.compose(a, i, &unit)? != LinComb::single(a.clone()) {
                    failures.push(format!("right unit fails on {a} at {i}"));
                }
            }
            if op.compose(&unit, 1, a)? != LinComb::single(a.clone()) {
                failures.push(format!("left unit fails on {a}"));
            }
        }
    }
    let mut memo = Memo { op, cache: HashMap::new() };
    for n in 2..=max_total {
        for m in 2..=max_total + 1 - n {
            for k in 2..=max_total + 2 - n - m {
                for a in &bases[n] {
                    for b in &bases[m] {
                        for i in 1..=n {
                            let ab = memo.get(a, i, b)?;
                            for c in &bases[k] {
                                for j in 1..=m {
                                    let lhs = memo.lin(&ab, i + j - 1, c)?;
                                    let bc = memo.get(b, j, c)?;
                                    let rhs = memo.lin_left(a, i, &bc)?;
                                    if lhs != rhs {
                                        failures.push(format!("sequential axiom fails on {a} o{i} {b} o{j} {c}"));
                                    }
                                }
                                for j in i + 1..=n {
                                    let lhs = memo.lin(&ab, j + m - 1, c)?;
                                    let ac = memo.get(a, j, c)?;
                                    let rhs = memo.lin(&ac, i, b)?;
                                    if lhs != rhs {
                                        failures.push(format!("parallel axiom fails on {a} o{i} {b}, o{j} {c}"));
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(failures)
}

/// Checks `(σ·μ) ∘_{σ(i)} (τ·ν) = (σ ∘_i τ)·(μ ∘_i ν)` on every pair of basis
/// elements and every pair of permutations, for arities `n + m - 1 <= max_total`.
pub fn check_equivariance(op: &OperadImpl, max_total: usize) -> Result<Vec<String>, OperadError> {
    equivariance_with(op, max_total, permutations)
}

/// Equivariance on the identity and adjacent transpositions only, which
/// generate each symmetric group; enough for the full statement.
pub fn check_equivariance_generators(op: &OperadImpl, max_total: usize) -> Result<Vec<String>, OperadError> {
    equivariance_with(op, max_total, adjacent_transpositions)
}

fn adjacent_transpositions(n: usize) -> Vec<Vec<u32>> {
    let id: Vec<u32> = (1..=n as u32).collect();
    let mut out = vec![id.clone()];
    for k in 1..n {
        let mut s = id.clone();
        s.swap(k - 1, k);
        out.push(s);
    }
    out
}

fn equivariance_with(op: &OperadImpl, max_total: usize, perms: fn(usize) -> Vec<Vec<u32>>) -> Result<Vec<String>, OperadError> {
    let mut failures = Vec::new();
    for n in 1..=max_total {
        for m in 1..=max_total + 1 - n {
            let pn = perms(n);
            let pm = perms(m);
            for a in op.basis(n)? {
                for b in op.basis(m)? {
                    for i in 1..=n {
                        let base = op.compose(&a, i, &b)?;
                        for sigma in &pn {
                            for tau in &pm {
                                let lhs = op.compose(&a.act(sigma), sigma[i - 1] as usize, &b.act(tau))?;
                                let st = compose_perms(sigma, i, tau);
                                let rhs = base.map(|k| Some((k.act(&st), 1)));
                                if lhs != rhs {
                                    failures.push(format!("equivariance fails on {a} o{i} {b}"));
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(failures)
}

/// Checks the operad axioms for the suspension signs together with the sign
/// action: sequential and parallel composition, and equivariance through
/// block permutations.
pub fn check_suspension(susp: &SuspensionData, max_total: usize) -> Vec<String> {
    let mut failures = Vec::new();
    for n in 1..=max_total {
        for m in 1..=max_total + 1 - n {
            for k in 1..=max_total + 2 - n - m {
                for i in 1..=n {
                    for j in 1..=m {
                        let lhs = susp.sign(n, i, m) * susp.sign(n + m - 1, i + j - 1, k);
                        let rhs = susp.sign(m, j, k) * susp.sign(n, i, m + k - 1);
                        if lhs != rhs {
                            failures.push(format!("sequential ({n},{i},{m},{j},{k})"));
                        }
                    }
                    for j in i + 1..=n {
                        // (f ∘_i g) ∘_{j+m-1} h = (-1)^{|g||h|} (f ∘_j h) ∘_i g
                        let lhs = susp.sign(n, i, m) * susp.sign(n + m - 1, j + m - 1, k);
                        let koszul = if (m - 1) * (k - 1) % 2 == 0 { 1 } else { -1 };
                        let rhs = koszul * susp.sign(n, j, k) * susp.sign(n + k - 1, i, m);
                        if lhs != rhs {
                            failures.push(format!("parallel ({n},{i},{m},{j},{k})"));
                        }
                    }
                }
            }
            if n + m - 1 <= 5 {
                for sigma in permutations(n) {
                    for tau in permutations(m) {
                        for i in 1..=n {
                            let lhs = perm_sign(&sigma) * perm_sign(&tau) * susp.sign(n, sigma[i - 1] as usize, m);
                            let rhs = perm_sign(&compose_perms(&sigma, i, &tau)) * susp.sign(n, i, m);
                            if lhs != rhs {
                                failures.push(format!("equivariance ({n},{i},{m})"));
                            }
                        }
                    }
                }
            }
        }
    }
    failures
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tree(s: &str) -> RootedTree {
        parse_tree(s).unwrap()
    }

    fn keys(l: &LinComb<Key>) -> Vec<String> {
        l.keys().map(|k| k.to_string()).collect()
    }

    #[test]
    fn displayed_composition() {
        let out = pl_compose(&tree("2(1,3)"), 2, &tree("1(2)")).unwrap();
        let mut expected: Vec<String> = ["2(1,3,4)", "2(3(1,4))", "2(1,3(4))", "2(3(1),4)"]
            .iter()
            .map(|s| Key::tree(&tree(s)).to_string())
            .collect();
        expected.sort();
        let mut got = keys(&out);
        got.sort();
        assert_eq!(got, expected);
        assert!(out.iter().all(|(_, c)| c.is_one()));
    }

    #[test]
    fn composition_term_count() {
        // children of the target vertex times |s| choices each
        let t = tree("1(2,3,4)");
        let s = tree("1(2(3))");
        let raw = pl_insert(&t, 1, &s, VertexDecoration::label, 3);
        assert_eq!(raw.len(), 27);
    }

    #[test]
    fn units() {
        let t = tree("2(1,3)");
        let one = tree("1");
        for i in 1..=3 {
            let out = pl_compose(&t, i, &one).unwrap();
            assert_eq!(out, LinComb::single(Key::tree(&t)));
        }
        assert_eq!(pl_compose(&one, 1, &t).unwrap(), LinComb::single(Key::tree(&t)));
        assert!(matches!(pl_compose(&t, 4, &one), Err(OperadError::LabelMismatch(_))));
    }

    #[test]
    fn small_compositions() {
        let p = |s: &str| Key::parse(s).unwrap();
        assert_eq!(perm_compose(&p("perm:2:1"), 1, &p("perm:2:1")).unwrap(), LinComb::single(p("perm:3:1")));
        assert_eq!(perm_compose(&p("perm:2:2"), 1, &p("perm:2:2")).unwrap(), LinComb::single(p("perm:3:3")));
        assert_eq!(perm_compose(&p("perm:2:1"), 2, &p("perm:2:2")).unwrap(), LinComb::single(p("perm:3:1")));
        assert_eq!(com_compose(&p("com:2"), 2, &p("com:2")).unwrap(), LinComb::single(p("com:3")));
        assert_eq!(ass_compose(&p("ass:21"), 1, &p("ass:21")).unwrap(), LinComb::single(p("ass:321")));
        assert_eq!(ass_compose(&p("ass:1"), 1, &p("ass:231")).unwrap(), LinComb::single(p("ass:231")));
        assert!(matches!(perm_compose(&p("perm:2:1"), 3, &p("perm:2:1")), Err(OperadError::SlotOutOfRange { .. })));
    }

    #[test]
    fn permutative_identity_holds() {
        // underlined products satisfy a1 a2 a3 = a1 a3 a2
        let op = OperadImpl::Perm;
        let mu = Key::parse("perm:2:1").unwrap();
        let left = op.compose(&mu, 1, &mu).unwrap();
        let swapped = left.map(|k| Some((k.act(&[1, 3, 2]), 1)));
        assert_eq!(left, swapped);
    }

    #[test]
    fn key_serialization_roundtrip() {
        for s in ["perm:4:2", "ass:3124", "com:5", "1(2,3(4))", "<1(2)|perm:2:2>"] {
            let k = Key::parse(s).unwrap();
            assert_eq!(Key::parse(&k.to_string()).unwrap(), k);
        }
        let long = Key::Ass((1..=11).rev().collect());
        assert_eq!(Key::parse(&long.to_string()).unwrap(), long);
        assert!(Key::parse("perm:2:3").is_err());
        assert!(Key::parse("ass:113").is_err());
        assert!(Key::parse("*(1)").is_err());
    }

    #[test]
    fn dimensions() {
        for n in 1..=5 {
            assert_eq!(OperadImpl::PL.basis(n).unwrap().len(), n.pow(n as u32 - 1));
            assert_eq!(OperadImpl::Perm.basis(n).unwrap().len(), n);
            assert_eq!(OperadImpl::Ass.basis(n).unwrap().len(), (1..=n).product::<usize>());
            assert_eq!(OperadImpl::Com.basis(n).unwrap().len(), 1);
        }
        let vert = OperadImpl::hadamard(OperadImpl::PL, OperadImpl::Perm);
        assert_eq!(vert.basis(3).unwrap().len(), 27);
        let ap = OperadImpl::hadamard(OperadImpl::Ass, OperadImpl::Perm);
        assert_eq!(ap.basis(3).unwrap().len(), 18);
        let pc = OperadImpl::hadamard(OperadImpl::PL, OperadImpl::Com);
        assert_eq!(pc.basis(4).unwrap().len(), 64);
    }

    #[test]
    fn lie_basis_small() {
        let b2 = lie_basis(2).unwrap();
        assert_eq!(b2.len(), 1);
        let expected = LinComb::single(Key::parse("1(2)").unwrap()).sub(&LinComb::single(Key::parse("2(1)").unwrap()));
        assert_eq!(b2[0], expected);
        assert_eq!(lie_basis(3).unwrap().len(), 2);
        for n in 2..=5 {
            for x in lie_basis(n).unwrap() {
                assert!(project_to_com(&x).is_zero());
            }
        }
        assert!(matches!(lie_basis(LIE_BASIS_CAP + 1), Err(OperadError::Cap { .. })));
    }

    #[test]
    fn operad_axioms_low_arity() {
        for op in [
            OperadImpl::PL,
            OperadImpl::Perm,
            OperadImpl::Ass,
            OperadImpl::Com,
            OperadImpl::hadamard(OperadImpl::PL, OperadImpl::Perm),
        ] {
            assert_eq!(check_axioms(&op, 4).unwrap(), Vec::<String>::new(), "{}", op.name());
            assert_eq!(check_equivariance(&op, 4).unwrap(), Vec::<String>::new(), "{}", op.name());
            assert_eq!(check_equivariance_generators(&op, 5).unwrap(), Vec::<String>::new(), "{}", op.name());
        }
    }

    #[test]
    fn suspension_is_an_operad() {
        assert!(check_suspension(&SuspensionData::standard(), 6).is_empty());
        assert!(!check_suspension(&SuspensionData::with_flipped_entry(2, 2, 2), 4).is_empty());
    }

    #[test]
    fn unshuffle_counts() {
        assert_eq!(unshuffles(3, 1, 2).len(), 2);
        assert_eq!(unshuffles(3, 2, 2).len(), 1);
        assert_eq!(unshuffles(5, 2, 3).len(), 3);
        assert_eq!(unshuffles(4, 3, 1), vec![vec![1, 2, 3, 4]]);
        for s in unshuffles(4, 2, 2) {
            assert!(s[1] < s[2]);
        }
    }

    #[test]
    fn counit_decomposition() {
        let susp = SuspensionData::standard();
        let key = Key::parse("1(2,3)").unwrap();
        for i in 1..=3 {
            let d = cooperad_decompose(&OperadImpl::PL, &susp, &key, i, (3, 1)).unwrap();
            assert_eq!(d.len(), 1);
            let (term, c) = d.iter().next().unwrap();
            assert_eq!(term.outer, key);
            assert_eq!(term.inner, OperadImpl::PL.unit());
            assert!(c.is_one());
        }
    }

    #[test]
    fn com_dual_cobracket_has_three_terms() {
        let susp = SuspensionData::standard();
        let mut total = 0;
        for i in 1..=2 {
            let d = cooperad_decompose(&OperadImpl::Com, &susp, &Key::Com(3), i, (2, 2)).unwrap();
            for (t, c) in d.iter() {
                let expected = susp.sign(2, i, 2) * perm_sign(&t.shuffle);
                assert_eq!(*c, BigRational::from_integer(BigInt::from(expected)));
            }
            total += d.len();
        }
        assert_eq!(total, 3);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn arb_perm(n: usize) -> impl Strategy<Value = Vec<u32>> {
            Just((1..=n as u32).collect::<Vec<u32>>()).prop_shuffle()
        }

        proptest! {
            #[test]
            fn pl_equivariance(
                (n, sigma, i) in (1usize..=4).prop_flat_map(|n| (Just(n), arb_perm(n), 1..=n)),
                (m, tau) in (1usize..=3).prop_flat_map(|m| (Just(m), arb_perm(m))),
                seed in any::<u64>(),
            ) {
                let bn = OperadImpl::PL.basis(n).unwrap();
                let bm = OperadImpl::PL.basis(m).unwrap();
                let a = &bn[(seed as usize) % bn.len()];
                let b = &bm[(seed as usize / 7) % bm.len()];
                let lhs = OperadImpl::PL.compose(&a.act(&sigma), sigma[i - 1] as usize, &b.act(&tau)).unwrap();
                let st = compose_perms(&sigma, i, &tau);
                let rhs = OperadImpl::PL.compose(a, i, b).unwrap().map(|k| Some((k.act(&st), 1)));
                prop_assert_eq!(lhs, rhs);
            }

            #[test]
            fn pre_lie_identity(seed in any::<u64>()) {
                // (x◁y)◁z - x◁(y◁z) is symmetric in y, z
                let b2 = OperadImpl::PL.basis(2).unwrap();
                let x = LinComb::single(b2[(seed % 2) as usize].clone());
                let y = LinComb::single(Key::tree(&RootedTree::single(VertexDecoration::label(3))));
                let z = LinComb::single(Key::tree(&RootedTree::single(VertexDecoration::label(4))));
                let assoc = |y: &LinComb<Key>, z: &LinComb<Key>| {
                    pre_lie_product(&pre_lie_product(&x, y), z).sub(&pre_lie_product(&x, &pre_lie_product(y, z)))
                };
                prop_assert_eq!(assoc(&y, &z), assoc(&z, &y));
            }
        }
    }
}
