//! Decorated rooted trees.
//!
//! A [`RootedTree`] stores a parent array (the root is its own parent) and one
//! [`VertexDecoration`] per vertex. Vertices of homological degree -1 ("odd"
//! vertices) are the `Alpha` vertices, plus every labelled vertex when the tree
//! is flagged `odd_all`. The order of vertex ids fixes an orientation: a tree
//! stands for the wedge product of its odd vertices taken in id order, so
//! permuting odd vertices multiplies the element by the sign of the
//! permutation.
//!
//! Canonical representatives are laid out in preorder with children sorted by
//! their AHU code, so two trees are isomorphic iff their canonical
//! representatives compare equal.

use std::collections::HashSet;
use std::fmt;

use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VertexKind {
    Label(u32),
    Alpha,
}

/// Kind plus the "distinguished vertex" flag. The derived ordering
/// (labels by index, then `Alpha`, then marked) refines the AHU codes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexDecoration {
    pub kind: VertexKind,
    pub marked: bool,
}

impl VertexDecoration {
    pub const ALPHA: VertexDecoration = VertexDecoration { kind: VertexKind::Alpha, marked: false };
    pub const MARKED_ALPHA: VertexDecoration = VertexDecoration { kind: VertexKind::Alpha, marked: true };

    pub fn label(i: u32) -> Self {
        VertexDecoration { kind: VertexKind::Label(i), marked: false }
    }

    pub fn with_mark(self, marked: bool) -> Self {
        VertexDecoration { marked, ..self }
    }

    pub fn label_index(&self) -> Option<u32> {
        match self.kind {
            VertexKind::Label(i) => Some(i),
            VertexKind::Alpha => None,
        }
    }

    pub fn is_alpha(&self) -> bool {
        matches!(self.kind, VertexKind::Alpha)
    }

    fn token(&self) -> u32 {
        let base = match self.kind {
            VertexKind::Label(i) => i,
            VertexKind::Alpha => 1 << 28,
        };
        2 * base + 2 + self.marked as u32
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TreeError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("duplicate label {0}")]
    DuplicateLabel(u32),
    #[error("labels must be exactly 1..{0}")]
    LabelGap(usize),
    #[error("more than one marked vertex")]
    MultipleMarked,
    #[error("the empty tree is not allowed")]
    Empty,
    #[error("parent array does not describe a rooted tree")]
    NotATree,
    #[error("resource limit exceeded: {needed} trees requested, cap is {cap}")]
    ResourceLimit { needed: u128, cap: u128 },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RootedTree {
    parent: Vec<usize>,
    deco: Vec<VertexDecoration>,
    odd_all: bool,
}

impl RootedTree {
    pub fn new(parent: Vec<usize>, deco: Vec<VertexDecoration>, odd_all: bool) -> Result<Self, TreeError> {
        let t = RootedTree { parent, deco, odd_all };
        t.validate()?;
        Ok(t)
    }

    /// Builds without validation; callers guarantee the tree invariants.
    pub(crate) fn from_parts(parent: Vec<usize>, deco: Vec<VertexDecoration>, odd_all: bool) -> Self {
        debug_assert!(RootedTree { parent: parent.clone(), deco: deco.clone(), odd_all }.validate().is_ok());
        RootedTree { parent, deco, odd_all }
    }

    pub fn single(deco: VertexDecoration) -> Self {
        RootedTree { parent: vec![0], deco: vec![deco], odd_all: false }
    }

    fn validate(&self) -> Result<(), TreeError> {
        let n = self.parent.len();
        if n == 0 {
            return Err(TreeError::Empty);
        }
        if self.deco.len() != n {
            return Err(TreeError::NotATree);
        }
        let roots: Vec<usize> = (0..n).filter(|&v| self.parent[v] == v).collect();
        if roots.len() != 1 || self.parent.iter().any(|&p| p >= n) {
            return Err(TreeError::NotATree);
        }
        for v in 0..n {
            let mut cur = v;
            let mut steps = 0;
            while self.parent[cur] != cur {
                cur = self.parent[cur];
                steps += 1;
                if steps > n {
                    return Err(TreeError::NotATree);
                }
            }
        }
        let mut seen = HashSet::new();
        for d in &self.deco {
            if let VertexKind::Label(i) = d.kind {
                if i == 0 {
                    return Err(TreeError::Syntax { pos: 0, msg: "labels start at 1".into() });
                }
                if !seen.insert(i) {
                    return Err(TreeError::DuplicateLabel(i));
                }
            }
        }
        if self.deco.iter().filter(|d| d.marked).count() > 1 {
            return Err(TreeError::MultipleMarked);
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn root(&self) -> usize {
        (0..self.len()).find(|&v| self.parent[v] == v).expect("validated tree has a root")
    }

    pub fn parent(&self, v: usize) -> usize {
        self.parent[v]
    }

    pub fn parents(&self) -> &[usize] {
        &self.parent
    }

    pub fn decoration(&self, v: usize) -> VertexDecoration {
        self.deco[v]
    }

    pub fn decorations(&self) -> &[VertexDecoration] {
        &self.deco
    }

    pub fn odd_all(&self) -> bool {
        self.odd_all
    }

    pub fn with_odd_all(mut self, odd_all: bool) -> Self {
        self.odd_all = odd_all;
        self
    }

    pub fn is_odd(&self, v: usize) -> bool {
        self.odd_all || self.deco[v].is_alpha()
    }

    pub fn odd_count(&self) -> usize {
        (0..self.len()).filter(|&v| self.is_odd(v)).count()
    }

    /// Homological degree: minus the number of odd vertices.
    pub fn degree(&self) -> i32 {
        -(self.odd_count() as i32)
    }

    pub fn n_labels(&self) -> usize {
        self.deco.iter().filter(|d| !d.is_alpha()).count()
    }

    pub fn n_alphas(&self) -> usize {
        self.deco.iter().filter(|d| d.is_alpha()).count()
    }

    pub fn marked_vertex(&self) -> Option<usize> {
        self.deco.iter().position(|d| d.marked)
    }

    pub fn vertex_with_label(&self, label: u32) -> Option<usize> {
        self.deco.iter().position(|d| d.kind == VertexKind::Label(label))
    }

    pub fn children_lists(&self) -> Vec<Vec<usize>> {
        let mut ch = vec![Vec::new(); self.len()];
        for v in 0..self.len() {
            if self.parent[v] != v {
                ch[self.parent[v]].push(v);
            }
        }
        ch
    }

    pub fn children(&self, v: usize) -> Vec<usize> {
        (0..self.len()).filter(|&u| u != v && self.parent[u] == v).collect()
    }

    /// Relabels every labelled vertex through `f`.
    pub fn map_labels(&self, mut f: impl FnMut(u32) -> u32) -> RootedTree {
        let deco = self
            .deco
            .iter()
            .map(|d| match d.kind {
                VertexKind::Label(i) => VertexDecoration { kind: VertexKind::Label(f(i)), marked: d.marked },
                VertexKind::Alpha => *d,
            })
            .collect();
        RootedTree { parent: self.parent.clone(), deco, odd_all: self.odd_all }
    }

    /// Same shape with replaced decorations.
    pub fn with_decorations(&self, deco: Vec<VertexDecoration>) -> RootedTree {
        assert_eq!(deco.len(), self.len());
        RootedTree { parent: self.parent.clone(), deco, odd_all: self.odd_all }
    }

    /// Appends a new leaf below `at`; the new vertex gets the last id.
    pub fn add_leaf(&self, at: usize, deco: VertexDecoration) -> RootedTree {
        let mut parent = self.parent.clone();
        let mut d = self.deco.clone();
        parent.push(at);
        d.push(deco);
        RootedTree { parent, deco: d, odd_all: self.odd_all }
    }

    /// Puts a new root below nothing and hangs the whole tree from it. The new
    /// root gets id 0 and every old id shifts by one.
    pub fn graft_under_new_root(&self, deco: VertexDecoration) -> RootedTree {
        let old_root = self.root();
        let mut parent = Vec::with_capacity(self.len() + 1);
        parent.push(0);
        for v in 0..self.len() {
            parent.push(if v == old_root { 0 } else { self.parent[v] + 1 });
        }
        let mut d = Vec::with_capacity(self.len() + 1);
        d.push(deco);
        d.extend_from_slice(&self.deco);
        RootedTree { parent, deco: d, odd_all: self.odd_all }
    }

    /// Renumbers vertices: old vertex `v` gets id `perm[v]`.
    pub fn permute_vertices(&self, perm: &[usize]) -> RootedTree {
        let n = self.len();
        let mut parent = vec![0; n];
        let mut deco = vec![self.deco[0]; n];
        for v in 0..n {
            parent[perm[v]] = perm[self.parent[v]];
            deco[perm[v]] = self.deco[v];
        }
        RootedTree { parent, deco, odd_all: self.odd_all }
    }
}

impl fmt::Display for RootedTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_tree(self))
    }
}

// ---------------------------------------------------------------------------
// Parsing and formatting

pub fn parse_tree(text: &str) -> Result<RootedTree, TreeError> {
    let bytes: Vec<(usize, u8)> = text.bytes().enumerate().filter(|(_, b)| !b.is_ascii_whitespace()).collect();
    let mut p = Parser { toks: &bytes, i: 0, len: text.len(), parent: Vec::new(), deco: Vec::new() };
    p.tree(None)?;
    if p.i != bytes.len() {
        return Err(TreeError::Syntax { pos: bytes[p.i].0, msg: "trailing input".into() });
    }
    let n = p.deco.len();
    let labels: Vec<u32> = p.deco.iter().filter_map(|d| d.label_index()).collect();
    let mut seen = HashSet::new();
    for &l in &labels {
        if !seen.insert(l) {
            return Err(TreeError::DuplicateLabel(l));
        }
    }
    if labels.iter().any(|&l| l as usize > labels.len()) {
        return Err(TreeError::LabelGap(labels.len()));
    }
    if p.deco.iter().filter(|d| d.marked).count() > 1 {
        return Err(TreeError::MultipleMarked);
    }
    debug_assert!(n > 0);
    RootedTree::new(p.parent, p.deco, false)
}

struct Parser<'a> {
    toks: &'a [(usize, u8)],
    i: usize,
    len: usize,
    parent: Vec<usize>,
    deco: Vec<VertexDecoration>,
}

impl Parser<'_> {
    fn pos(&self) -> usize {
        self.toks.get(self.i).map(|t| t.0).unwrap_or(self.len)
    }

    fn peek(&self) -> Option<u8> {
        self.toks.get(self.i).map(|t| t.1)
    }

    fn err<T>(&self, msg: &str) -> Result<T, TreeError> {
        Err(TreeError::Syntax { pos: self.pos(), msg: msg.to_string() })
    }

    fn tree(&mut self, parent: Option<usize>) -> Result<(), TreeError> {
        let id = self.deco.len();
        let kind = match self.peek() {
            Some(b'*') => {
                self.i += 1;
                VertexKind::Alpha
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos();
                let mut value: u64 = 0;
                while let Some(c) = self.peek().filter(u8::is_ascii_digit) {
                    value = value * 10 + (c - b'0') as u64;
                    if value > u32::MAX as u64 {
                        return Err(TreeError::Syntax { pos: start, msg: "label too large".into() });
                    }
                    self.i += 1;
                }
                if value == 0 {
                    return Err(TreeError::Syntax { pos: start, msg: "labels start at 1".into() });
                }
                VertexKind::Label(value as u32)
            }
            _ => return self.err("expected a label or '*'"),
        };
        let marked = if self.peek() == Some(b'@') {
            self.i += 1;
            true
        } else {
            false
        };
        self.parent.push(parent.unwrap_or(id));
        self.deco.push(VertexDecoration { kind, marked });
        if self.peek() == Some(b'(') {
            self.i += 1;
            loop {
                self.tree(Some(id))?;
                match self.peek() {
                    Some(b',') => self.i += 1,
                    Some(b')') => {
                        self.i += 1;
                        break;
                    }
                    _ => return self.err("expected ',' or ')'"),
                }
            }
        }
        Ok(())
    }
}

/// Tree literal with children in canonical order and no whitespace.
pub fn format_tree(t: &RootedTree) -> String {
    let codes = ahu_codes(t);
    let children = sorted_children(t, &codes);
    let mut out = String::new();
    write_vertex(t, t.root(), &children, &mut out);
    out
}

fn write_vertex(t: &RootedTree, v: usize, children: &[Vec<usize>], out: &mut String) {
    let d = t.deco[v];
    match d.kind {
        VertexKind::Label(i) => out.push_str(&i.to_string()),
        VertexKind::Alpha => out.push('*'),
    }
    if d.marked {
        out.push('@');
    }
    if !children[v].is_empty() {
        out.push('(');
        for (j, &c) in children[v].iter().enumerate() {
            if j > 0 {
                out.push(',');
            }
            write_vertex(t, c, children, out);
        }
        out.push(')');
    }
}

// ---------------------------------------------------------------------------
// Canonical forms

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CanonicalResult {
    Zero,
    Canonical { rep: RootedTree, sign: i8 },
}

impl CanonicalResult {
    pub fn is_zero(&self) -> bool {
        matches!(self, CanonicalResult::Zero)
    }
}

fn postorder(t: &RootedTree, children: &[Vec<usize>]) -> Vec<usize> {
    let mut order = Vec::with_capacity(t.len());
    let mut stack = vec![(t.root(), false)];
    while let Some((v, expanded)) = stack.pop() {
        if expanded {
            order.push(v);
        } else {
            stack.push((v, true));
            for &c in &children[v] {
                stack.push((c, false));
            }
        }
    }
    order
}

/// AHU code of every subtree: decoration token, child codes in sorted order,
/// closing zero.
fn ahu_codes(t: &RootedTree) -> Vec<Vec<u32>> {
    let children = t.children_lists();
    let mut codes: Vec<Vec<u32>> = vec![Vec::new(); t.len()];
    for v in postorder(t, &children) {
        let mut kids: Vec<&Vec<u32>> = children[v].iter().map(|&c| &codes[c]).collect();
        kids.sort();
        let mut code = Vec::with_capacity(1 + kids.iter().map(|k| k.len()).sum::<usize>() + 1);
        code.push(t.deco[v].token());
        for k in kids {
            code.extend_from_slice(k);
        }
        code.push(0);
        codes[v] = code;
    }
    codes
}

fn sorted_children(t: &RootedTree, codes: &[Vec<u32>]) -> Vec<Vec<usize>> {
    let mut children = t.children_lists();
    for ch in children.iter_mut() {
        ch.sort_by(|&a, &b| codes[a].cmp(&codes[b]).then(a.cmp(&b)));
    }
    children
}

/// Canonical layout of `t` together with the orientation sign, or `None` for
/// the sign when an automorphism acts oddly on the odd vertices.
pub(crate) fn canonical_form(t: &RootedTree) -> (RootedTree, Option<i8>) {
    let n = t.len();
    let codes = ahu_codes(t);
    let children = sorted_children(t, &codes);

    // odd-vertex counts per subtree
    let mut odd_below = vec![0usize; n];
    for v in postorder(t, &children) {
        odd_below[v] = t.is_odd(v) as usize + children[v].iter().map(|&c| odd_below[c]).sum::<usize>();
    }
    let mut killed = false;
    for v in 0..n {
        for w in children[v].windows(2) {
            if codes[w[0]] == codes[w[1]] && odd_below[w[0]] % 2 == 1 {
                killed = true;
            }
        }
    }

    // preorder layout
    let mut new_id = vec![0usize; n];
    let mut next = 0;
    let mut stack = vec![t.root()];
    while let Some(v) = stack.pop() {
        new_id[v] = next;
        next += 1;
        for &c in children[v].iter().rev() {
            stack.push(c);
        }
    }
    let rep = t.permute_vertices(&new_id);

    if killed {
        return (rep, None);
    }
    let seq: Vec<usize> = (0..n).filter(|&v| t.is_odd(v)).map(|v| new_id[v]).collect();
    (rep, Some(permutation_sign(&seq)))
}

pub fn canonicalize(t: &RootedTree) -> CanonicalResult {
    match canonical_form(t) {
        (_, None) => CanonicalResult::Zero,
        (rep, Some(sign)) => CanonicalResult::Canonical { rep, sign },
    }
}

/// Sign of the sequence viewed as a permutation of its sorted values.
pub fn permutation_sign(seq: &[usize]) -> i8 {
    let mut inv = 0usize;
    for i in 0..seq.len() {
        for j in i + 1..seq.len() {
            if seq[i] > seq[j] {
                inv += 1;
            }
        }
    }
    if inv % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Explicit automorphism listing, used as an independent check of the
/// sign rule: every decoration-preserving parent-compatible bijection.
pub fn automorphisms(t: &RootedTree) -> Vec<Vec<usize>> {
    let n = t.len();
    let mut out = Vec::new();
    let mut perm = vec![usize::MAX; n];
    let mut used = vec![false; n];
    fn rec(t: &RootedTree, v: usize, perm: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        let n = t.len();
        if v == n {
            if (0..n).all(|u| perm[t.parent[u]] == t.parent[perm[u]]) {
                out.push(perm.clone());
            }
            return;
        }
        for w in 0..n {
            if !used[w] && t.deco[w] == t.deco[v] {
                used[w] = true;
                perm[v] = w;
                rec(t, v + 1, perm, used, out);
                used[w] = false;
            }
        }
        perm[v] = usize::MAX;
    }
    rec(t, 0, &mut perm, &mut used, &mut out);
    out
}

// ---------------------------------------------------------------------------
// Vertex splitting

/// All ways to replace `v` by an edge `upper -> lower`: `lower` keeps the id
/// and the parent of `v`, `upper` becomes the last vertex, and each subset of
/// the children of `v` moves to `upper`.
///
/// The returned sign expresses the same element with `upper` placed directly
/// after `lower` in the vertex order, i.e. `sign * tree` equals the tree in
/// block-insertion order.
pub fn split_vertex_expansions(
    t: &RootedTree,
    v: usize,
    lower: VertexDecoration,
    upper: VertexDecoration,
) -> Vec<(RootedTree, i8)> {
    let kids = t.children(v);
    let upper_odd = t.odd_all || upper.is_alpha();
    let after = (v + 1..t.len()).filter(|&u| t.is_odd(u)).count();
    let sign = if upper_odd && after % 2 == 1 { -1 } else { 1 };
    let new_id = t.len();
    let mut out = Vec::with_capacity(1 << kids.len());
    for mask in 0u32..(1u32 << kids.len()) {
        let mut parent = t.parent.clone();
        let mut deco = t.deco.clone();
        deco[v] = lower;
        parent.push(v);
        deco.push(upper);
        for (j, &c) in kids.iter().enumerate() {
            if mask >> j & 1 == 1 {
                parent[c] = new_id;
            }
        }
        out.push((RootedTree { parent, deco, odd_all: t.odd_all }, sign));
    }
    out
}

// ---------------------------------------------------------------------------
// Enumeration

/// Upper bound on the number of trees any single enumeration may produce.
pub const DEFAULT_TREE_CAP: u128 = 5_000_000;

/// All rooted trees on labels `1..=n` (canonical layout), in lexicographic
/// order of their canonical representatives.
pub fn enumerate_labelled(n: usize) -> Result<Vec<RootedTree>, TreeError> {
    enumerate_labelled_capped(n, DEFAULT_TREE_CAP)
}

pub fn enumerate_labelled_capped(n: usize, cap: u128) -> Result<Vec<RootedTree>, TreeError> {
    if n == 0 {
        return Err(TreeError::Empty);
    }
    let needed = (n as u128).pow(n as u32 - 1);
    if needed > cap {
        return Err(TreeError::ResourceLimit { needed, cap });
    }
    let deco: Vec<VertexDecoration> = (1..=n as u32).map(VertexDecoration::label).collect();
    let mut out = Vec::with_capacity(needed as usize);
    if n == 1 {
        return Ok(vec![RootedTree::single(deco[0])]);
    }
    // Prüfer sequences give the unrooted trees; each is rooted at every vertex.
    let mut seq = vec![0usize; n - 2];
    loop {
        let edges = prufer_decode(&seq, n);
        let mut adj = vec![Vec::new(); n];
        for &(a, b) in &edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        for root in 0..n {
            let mut parent = vec![usize::MAX; n];
            parent[root] = root;
            let mut stack = vec![root];
            while let Some(u) = stack.pop() {
                for &w in &adj[u] {
                    if parent[w] == usize::MAX {
                        parent[w] = u;
                        stack.push(w);
                    }
                }
            }
            let t = RootedTree { parent, deco: deco.clone(), odd_all: false };
            out.push(canonical_form(&t).0);
        }
        // next sequence
        let mut j = 0;
        loop {
            if j == seq.len() {
                out.sort();
                return Ok(out);
            }
            seq[j] += 1;
            if seq[j] < n {
                break;
            }
            seq[j] = 0;
            j += 1;
        }
    }
}

fn prufer_decode(seq: &[usize], n: usize) -> Vec<(usize, usize)> {
    let mut degree = vec![1usize; n];
    for &s in seq {
        degree[s] += 1;
    }
    let mut edges = Vec::with_capacity(n - 1);
    for &s in seq {
        let leaf = (0..n).find(|&v| degree[v] == 1).expect("prufer leaf");
        edges.push((leaf, s));
        degree[leaf] -= 1;
        degree[s] -= 1;
    }
    let rest: Vec<usize> = (0..n).filter(|&v| degree[v] == 1).collect();
    edges.push((rest[0], rest[1]));
    edges
}

/// Shape of the trees requested from [`enumerate_classes`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct OrbitSpec {
    pub labels: usize,
    pub alphas: usize,
    /// Exactly one vertex carries the mark.
    pub marked: bool,
}

/// Every isomorphism class (including sign-killed ones) of trees with the
/// given vertex content, as canonical representatives in sorted order.
pub fn enumerate_classes(spec: OrbitSpec, cap: u128) -> Result<Vec<RootedTree>, TreeError> {
    if spec.labels + spec.alphas == 0 {
        return Err(TreeError::Empty);
    }
    let mut grid: Vec<Vec<Vec<RootedTree>>> = vec![vec![Vec::new(); spec.alphas + 1]; spec.labels + 1];
    for n in 0..=spec.labels {
        for k in 0..=spec.alphas {
            let classes = match (n, k) {
                (0, 0) => Vec::new(),
                (1, 0) => vec![RootedTree::single(VertexDecoration::label(1))],
                (0, 1) => vec![RootedTree::single(VertexDecoration::ALPHA)],
                _ => {
                    let mut set = HashSet::new();
                    if k > 0 {
                        for t in &grid[n][k - 1] {
                            for at in 0..t.len() {
                                set.insert(canonical_form(&t.add_leaf(at, VertexDecoration::ALPHA)).0);
                            }
                        }
                    }
                    if n > 0 {
                        for t in &grid[n - 1][k] {
                            for l in 1..=n as u32 {
                                let shifted = t.map_labels(|i| if i >= l { i + 1 } else { i });
                                for at in 0..t.len() {
                                    set.insert(canonical_form(&shifted.add_leaf(at, VertexDecoration::label(l))).0);
                                }
                            }
                        }
                    }
                    if set.len() as u128 > cap {
                        return Err(TreeError::ResourceLimit { needed: set.len() as u128, cap });
                    }
                    set.into_iter().collect()
                }
            };
            grid[n][k] = classes;
        }
    }
    let mut out = std::mem::take(&mut grid[spec.labels][spec.alphas]);
    if spec.marked {
        let mut set = HashSet::new();
        for t in &out {
            for v in 0..t.len() {
                let mut deco = t.deco.clone();
                deco[v].marked = true;
                set.insert(canonical_form(&t.with_decorations(deco)).0);
            }
        }
        out = set.into_iter().collect();
    }
    out.sort();
    Ok(out)
}

/// Sign-admissible classes with `n_labels` labelled and `k_alpha` Alpha
/// vertices. With `odd_all`, the "labelled" vertices carry no labels and are
/// odd; they are represented as Alpha vertices.
pub fn enumerate_orbits(n_labels: usize, k_alpha: usize, odd_all: bool) -> Result<Vec<RootedTree>, TreeError> {
    enumerate_admissible(n_labels, k_alpha, odd_all, false)
}

/// As [`enumerate_orbits`], with exactly one marked vertex.
pub fn enumerate_marked_orbits(n_labels: usize, k_alpha: usize, odd_all: bool) -> Result<Vec<RootedTree>, TreeError> {
    enumerate_admissible(n_labels, k_alpha, odd_all, true)
}

fn enumerate_admissible(n_labels: usize, k_alpha: usize, odd_all: bool, marked: bool) -> Result<Vec<RootedTree>, TreeError> {
    let spec = if odd_all {
        OrbitSpec { labels: 0, alphas: n_labels + k_alpha, marked }
    } else {
        OrbitSpec { labels: n_labels, alphas: k_alpha, marked }
    };
    Ok(enumerate_classes(spec, DEFAULT_TREE_CAP)?
        .into_iter()
        .filter(|t| canonical_form(t).1.is_some())
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_examples() {
        let t = parse_tree("1(2,3)").unwrap();
        assert_eq!(t.len(), 3);
        assert_eq!(t.root(), 0);
        assert_eq!(t.decoration(0).label_index(), Some(1));
        assert_eq!(t.children(0), vec![1, 2]);

        let a = parse_tree("*(1,2)").unwrap();
        assert!(a.decoration(a.root()).is_alpha());
        assert_eq!(a.n_labels(), 2);

        assert_eq!(parse_tree("1(2,2)"), Err(TreeError::DuplicateLabel(2)));
        assert_eq!(parse_tree("*@(*@)"), Err(TreeError::MultipleMarked));
        assert!(matches!(parse_tree("1(2"), Err(TreeError::Syntax { pos: 3, .. })));
        assert!(matches!(parse_tree("1(3)"), Err(TreeError::LabelGap(2))));
        assert!(matches!(parse_tree(""), Err(TreeError::Syntax { .. })));
        assert_eq!(parse_tree(" 1 ( 2 , * @ ) ").unwrap(), parse_tree("1(2,*@)").unwrap());
    }

    #[test]
    fn format_sorts_children() {
        assert_eq!(format_tree(&parse_tree("1(3,2)").unwrap()), "1(2,3)");
        assert_eq!(format_tree(&parse_tree("*(*(*),*)").unwrap()), "*(*,*(*))");
        assert_eq!(format_tree(&parse_tree("2(*@,1)").unwrap()), "2(1,*@)");
    }

    #[test]
    fn single_vertex_is_canonical() {
        let t = parse_tree("1").unwrap();
        assert_eq!(canonicalize(&t), CanonicalResult::Canonical { rep: t, sign: 1 });
    }

    #[test]
    fn alpha_cherry_vanishes() {
        let t = parse_tree("*(*,*)").unwrap();
        assert!(canonicalize(&t).is_zero());
        // oracle: the leaf swap is an automorphism and acts oddly
        let odd_auto = automorphisms(&t).iter().any(|p| {
            let seq: Vec<usize> = (0..t.len()).filter(|&v| t.is_odd(v)).map(|v| p[v]).collect();
            permutation_sign(&seq) == -1
        });
        assert!(odd_auto);
        // with a labelled root the cherry still dies
        assert!(canonicalize(&parse_tree("1(*,*)").unwrap()).is_zero());
        // but two labelled leaves under an alpha are fine
        assert!(!canonicalize(&parse_tree("*(1,2)").unwrap()).is_zero());
    }

    #[test]
    fn canonical_sign_tracks_odd_order() {
        // root * with children 1 and *, the two alphas in either order
        let a = RootedTree::new(vec![0, 0, 0], vec![VertexDecoration::ALPHA, VertexDecoration::label(1), VertexDecoration::ALPHA], false).unwrap();
        let b = RootedTree::new(vec![2, 2, 2], vec![VertexDecoration::ALPHA, VertexDecoration::label(1), VertexDecoration::ALPHA], false).unwrap();
        let (ra, sa) = match canonicalize(&a) {
            CanonicalResult::Canonical { rep, sign } => (rep, sign),
            _ => panic!(),
        };
        let (rb, sb) = match canonicalize(&b) {
            CanonicalResult::Canonical { rep, sign } => (rep, sign),
            _ => panic!(),
        };
        assert_eq!(ra, rb);
        assert_eq!(sa, -sb);
    }

    #[test]
    fn canonicalize_is_idempotent() {
        for t in enumerate_classes(OrbitSpec { labels: 2, alphas: 3, marked: false }, DEFAULT_TREE_CAP).unwrap() {
            match canonicalize(&t) {
                CanonicalResult::Canonical { rep, sign } => {
                    assert_eq!(rep, t);
                    assert_eq!(sign, 1);
                }
                CanonicalResult::Zero => {}
            }
        }
    }

    #[test]
    fn labelled_counts() {
        assert_eq!(enumerate_labelled(1).unwrap().len(), 1);
        assert_eq!(enumerate_labelled(3).unwrap().len(), 9);
        assert_eq!(enumerate_labelled(4).unwrap().len(), 64);
        assert!(matches!(enumerate_labelled_capped(7, 1000), Err(TreeError::ResourceLimit { .. })));
    }

    #[test]
    fn orbit_examples() {
        assert_eq!(enumerate_orbits(0, 2, false).unwrap().len(), 1);
        let three = enumerate_orbits(0, 3, false).unwrap();
        assert_eq!(three.len(), 1);
        assert_eq!(format_tree(&three[0]), "*(*(*))");
        let two = enumerate_orbits(2, 0, false).unwrap();
        assert_eq!(two.len(), 2);
        let lits: Vec<String> = two.iter().map(format_tree).collect();
        assert!(lits.contains(&"1(2)".to_string()) && lits.contains(&"2(1)".to_string()));
        assert_eq!(enumerate_orbits(4, 0, true).unwrap().len(), 2);
        assert_eq!(enumerate_marked_orbits(2, 0, true).unwrap().len(), 2);
        assert_eq!(enumerate_marked_orbits(1, 0, true).unwrap().len(), 1);
    }

    #[test]
    fn split_counts() {
        let t = parse_tree("1(2,3(4,5,6))").unwrap();
        let l = VertexDecoration::label(1);
        assert_eq!(split_vertex_expansions(&t, 1, l, VertexDecoration::ALPHA).len(), 1);
        assert_eq!(split_vertex_expansions(&t, 0, l, VertexDecoration::ALPHA).len(), 4);
        assert_eq!(split_vertex_expansions(&t, 2, l, VertexDecoration::ALPHA).len(), 8);
    }

    #[test]
    fn split_sign_matches_block_order() {
        // upper inserted right after v versus appended: sign relates them
        let t = parse_tree("*(*,*(*))").unwrap();
        for v in 0..t.len() {
            for (tree, sign) in split_vertex_expansions(&t, v, VertexDecoration::ALPHA, VertexDecoration::ALPHA) {
                // move the appended vertex to position v+1
                let n = tree.len();
                let perm: Vec<usize> = (0..n)
                    .map(|u| if u == n - 1 { v + 1 } else if u > v { u + 1 } else { u })
                    .collect();
                let block = tree.permute_vertices(&perm);
                let (r1, s1) = canonical_form(&tree);
                let (r2, s2) = canonical_form(&block);
                assert_eq!(r1, r2);
                if let (Some(s1), Some(s2)) = (s1, s2) {
                    assert_eq!(sign * s1, s2);
                }
            }
        }
    }
}
