//! Exact sparse linear algebra over the rationals, with a multi-prime modular
//! accelerator.
//!
//! Matrices are stored column-major: column `j` is the image of the `j`-th
//! source basis vector. Elimination inserts columns one at a time into an
//! echelon structure, shortest columns first, choosing as pivot the row with
//! the fewest entries in the whole matrix (a Markowitz-style heuristic).

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

pub type Coeff = Rational64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LaError {
    #[error("entry ({row}, {col}) out of range for a {n_rows}x{n_cols} matrix")]
    OutOfRange { row: usize, col: usize, n_rows: usize, n_cols: usize },
    #[error("duplicate entry at ({0}, {1})")]
    Duplicate(usize, usize),
    #[error("explicit zero at ({0}, {1})")]
    ExplicitZero(usize, usize),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("composition of consecutive differentials is nonzero ({nonzero} nonzero entries)")]
    CompositionNonzero { nonzero: usize },
    #[error("matrix market parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseMatrix {
    n_rows: usize,
    n_cols: usize,
    cols: Vec<Vec<(usize, Coeff)>>,
}

impl SparseMatrix {
    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        SparseMatrix { n_rows, n_cols, cols: vec![Vec::new(); n_cols] }
    }

    pub fn identity(n: usize) -> Self {
        SparseMatrix { n_rows: n, n_cols: n, cols: (0..n).map(|i| vec![(i, Coeff::one())]).collect() }
    }

    /// Strict constructor: no duplicates, no explicit zeros, indices in range.
    pub fn new(n_rows: usize, n_cols: usize, entries: Vec<(usize, usize, Coeff)>) -> Result<Self, LaError> {
        let mut cols = vec![Vec::new(); n_cols];
        for (row, col, c) in entries {
            if row >= n_rows || col >= n_cols {
                return Err(LaError::OutOfRange { row, col, n_rows, n_cols });
            }
            if c.is_zero() {
                return Err(LaError::ExplicitZero(row, col));
            }
            cols[col].push((row, c));
        }
        for (j, col) in cols.iter_mut().enumerate() {
            col.sort_by_key(|e| e.0);
            if let Some(w) = col.windows(2).find(|w| w[0].0 == w[1].0) {
                return Err(LaError::Duplicate(w[0].0, j));
            }
        }
        Ok(SparseMatrix { n_rows, n_cols, cols })
    }

    /// Lenient constructor for builders: sums duplicates and drops zeros.
    pub fn from_columns(n_rows: usize, columns: Vec<Vec<(usize, Coeff)>>) -> Self {
        let n_cols = columns.len();
        let cols = columns
            .into_iter()
            .map(|mut col| {
                col.sort_by_key(|e| e.0);
                let mut merged: Vec<(usize, Coeff)> = Vec::with_capacity(col.len());
                for (r, c) in col {
                    assert!(r < n_rows, "row {r} out of range {n_rows}");
                    match merged.last_mut() {
                        Some(last) if last.0 == r => last.1 += c,
                        _ => merged.push((r, c)),
                    }
                }
                merged.retain(|e| !e.1.is_zero());
                merged
            })
            .collect();
        SparseMatrix { n_rows, n_cols, cols }
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn nnz(&self) -> usize {
        self.cols.iter().map(Vec::len).sum()
    }

    pub fn column(&self, j: usize) -> &[(usize, Coeff)] {
        &self.cols[j]
    }

    pub fn columns(&self) -> &[Vec<(usize, Coeff)>] {
        &self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> Coeff {
        self.cols[col].iter().find(|e| e.0 == row).map(|e| e.1).unwrap_or_else(Coeff::zero)
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, Coeff)> + '_ {
        self.cols.iter().enumerate().flat_map(|(j, col)| col.iter().map(move |&(i, c)| (i, j, c)))
    }

    pub fn is_zero(&self) -> bool {
        self.cols.iter().all(Vec::is_empty)
    }

    pub fn transpose(&self) -> SparseMatrix {
        let mut cols = vec![Vec::new(); self.n_rows];
        for (i, j, c) in self.entries() {
            cols[i].push((j, c));
        }
        SparseMatrix { n_rows: self.n_cols, n_cols: self.n_rows, cols }
    }

    pub fn scale(&self, s: Coeff) -> SparseMatrix {
        if s.is_zero() {
            return SparseMatrix::zeros(self.n_rows, self.n_cols);
        }
        let cols = self.cols.iter().map(|col| col.iter().map(|&(i, c)| (i, c * s)).collect()).collect();
        SparseMatrix { n_rows: self.n_rows, n_cols: self.n_cols, cols }
    }

    /// Columns of `self` followed by the columns of `other`.
    pub fn hstack(&self, other: &SparseMatrix) -> Result<SparseMatrix, LaError> {
        if self.n_rows != other.n_rows {
            return Err(LaError::Shape(format!("hstack rows {} vs {}", self.n_rows, other.n_rows)));
        }
        let mut cols = self.cols.clone();
        cols.extend(other.cols.iter().cloned());
        Ok(SparseMatrix { n_rows: self.n_rows, n_cols: self.n_cols + other.n_cols, cols })
    }

    /// `self * other` computed exactly.
    pub fn mul(&self, other: &SparseMatrix) -> Result<SparseMatrix, LaError> {
        if self.n_cols != other.n_rows {
            return Err(LaError::Shape(format!("{}x{} times {}x{}", self.n_rows, self.n_cols, other.n_rows, other.n_cols)));
        }
        let mut cols = Vec::with_capacity(other.n_cols);
        for col in &other.cols {
            let mut acc: HashMap<usize, BigRational> = HashMap::new();
            for &(k, b) in col {
                for &(i, a) in &self.cols[k] {
                    *acc.entry(i).or_insert_with(BigRational::zero) += to_big(a) * to_big(b);
                }
            }
            let mut out: Vec<(usize, Coeff)> = acc
                .into_iter()
                .filter(|(_, v)| !v.is_zero())
                .map(|(i, v)| (i, from_big(&v).expect("product entry fits in 64-bit rational")))
                .collect();
            out.sort_by_key(|e| e.0);
            cols.push(out);
        }
        Ok(SparseMatrix { n_rows: self.n_rows, n_cols: other.n_cols, cols })
    }

    /// Counts the nonzero entries of `self * other` without materialising it.
    pub fn product_nonzeros(&self, other: &SparseMatrix) -> Result<usize, LaError> {
        if self.n_cols != other.n_rows {
            return Err(LaError::Shape(format!("{}x{} times {}x{}", self.n_rows, self.n_cols, other.n_rows, other.n_cols)));
        }
        let integral = self.entries().chain(other.entries()).all(|(_, _, c)| c.is_integer());
        let mut nonzero = 0;
        if integral {
            let mut acc: HashMap<usize, i128> = HashMap::new();
            for col in &other.cols {
                acc.clear();
                for &(k, b) in col {
                    for &(i, a) in &self.cols[k] {
                        *acc.entry(i).or_insert(0) += *a.numer() as i128 * *b.numer() as i128;
                    }
                }
                nonzero += acc.values().filter(|v| **v != 0).count();
            }
        } else {
            nonzero = self.mul(other)?.nnz();
        }
        Ok(nonzero)
    }

    fn max_dim(&self) -> usize {
        self.n_rows.max(self.n_cols)
    }
}

pub fn to_big(c: Coeff) -> BigRational {
    BigRational::new(BigInt::from(*c.numer()), BigInt::from(*c.denom()))
}

pub fn from_big(c: &BigRational) -> Option<Coeff> {
    Some(Coeff::new(c.numer().to_i64()?, c.denom().to_i64()?))
}

// ---------------------------------------------------------------------------
// Field abstraction for the elimination kernel

trait Field: Clone {
    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn sub_mul(&self, acc: &mut Self::Elem, a: &Self::Elem, b: &Self::Elem);
    fn inv(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    type Elem: Clone;
}

#[derive(Clone)]
struct Rationals;

impl Field for Rationals {
    type Elem = BigRational;
    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
    fn sub_mul(&self, acc: &mut BigRational, a: &BigRational, b: &BigRational) {
        *acc -= a * b;
    }
    fn inv(&self, a: &BigRational) -> BigRational {
        a.recip()
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
}

#[derive(Clone, Copy)]
struct PrimeField {
    p: u64,
}

impl PrimeField {
    fn reduce(&self, c: Coeff) -> u64 {
        let num = c.numer().rem_euclid(self.p as i64) as u64;
        let den = c.denom().rem_euclid(self.p as i64) as u64;
        num * pow_mod(den, self.p - 2, self.p) % self.p
    }
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1u64;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

impl Field for PrimeField {
    type Elem = u64;
    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn sub_mul(&self, acc: &mut u64, a: &u64, b: &u64) {
        let prod = a * b % self.p;
        *acc = (*acc + self.p - prod) % self.p;
    }
    fn inv(&self, a: &u64) -> u64 {
        pow_mod(*a, self.p - 2, self.p)
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        a * b % self.p
    }
}

struct Pivot<E> {
    lead: usize,
    vec: Vec<(usize, E)>,
    /// Combination of input columns producing `vec` (only when tracking).
    combo: Vec<(usize, E)>,
}

/// Incremental echelon form over a field.
struct Echelon<F: Field> {
    field: F,
    n: usize,
    pivots: Vec<Pivot<F::Elem>>,
    pivot_of: Vec<Option<usize>>,
    weight: Vec<usize>,
    track: bool,
    // scratch
    vals: Vec<F::Elem>,
    touched: Vec<usize>,
    is_touched: Vec<bool>,
}

enum Inserted<E> {
    Pivot,
    /// Reduced to zero; carries the dependency among input columns.
    Dependent(Vec<(usize, E)>),
}

impl<F: Field> Echelon<F> {
    fn new(field: F, n: usize, weight: Vec<usize>, track: bool) -> Self {
        let zero = field.zero();
        Echelon {
            field,
            n,
            pivots: Vec::new(),
            pivot_of: vec![None; n],
            weight,
            track,
            vals: vec![zero; n],
            touched: Vec::new(),
            is_touched: vec![false; n],
        }
    }

    fn touch(&mut self, i: usize) {
        if !self.is_touched[i] {
            self.is_touched[i] = true;
            self.touched.push(i);
        }
    }

    fn insert(&mut self, id: usize, v: Vec<(usize, F::Elem)>) -> Inserted<F::Elem> {
        let mut heap = BinaryHeap::new();
        for (i, c) in v {
            self.touch(i);
            self.vals[i] = c;
            if let Some(t) = self.pivot_of[i] {
                heap.push(Reverse(t));
            }
        }
        let mut combo: HashMap<usize, F::Elem> = HashMap::new();
        if self.track {
            combo.insert(id, self.field.one());
        }
        while let Some(Reverse(t)) = heap.pop() {
            let lead = self.pivots[t].lead;
            let c = self.vals[lead].clone();
            if self.field.is_zero(&c) {
                continue;
            }
            let pv = std::mem::take(&mut self.pivots[t].vec);
            for (i, pc) in &pv {
                if !self.is_touched[*i] {
                    self.touch(*i);
                }
                let was_zero = self.field.is_zero(&self.vals[*i]);
                self.field.sub_mul(&mut self.vals[*i], &c, pc);
                if was_zero && *i != lead {
                    if let Some(t2) = self.pivot_of[*i] {
                        heap.push(Reverse(t2));
                    }
                }
            }
            self.pivots[t].vec = pv;
            if self.track {
                for (k, pc) in &self.pivots[t].combo {
                    let e = combo.entry(*k).or_insert_with(|| self.field.zero());
                    self.field.sub_mul(e, &c, pc);
                }
            }
        }
        let mut reduced: Vec<(usize, F::Elem)> = Vec::new();
        for &i in &self.touched {
            if !self.field.is_zero(&self.vals[i]) {
                reduced.push((i, std::mem::replace(&mut self.vals[i], self.field.zero())));
            }
            self.is_touched[i] = false;
        }
        self.touched.clear();
        let combo: Vec<(usize, F::Elem)> = {
            let mut c: Vec<_> = combo.into_iter().filter(|(_, v)| !self.field.is_zero(v)).collect();
            c.sort_by_key(|e| e.0);
            c
        };
        if reduced.is_empty() {
            return Inserted::Dependent(combo);
        }
        reduced.sort_by_key(|e| e.0);
        let lead = reduced.iter().map(|e| e.0).min_by_key(|&i| (self.weight[i], i)).expect("nonempty");
        let lc = reduced.iter().find(|e| e.0 == lead).expect("lead present").1.clone();
        let inv = self.field.inv(&lc);
        let vec = reduced.into_iter().map(|(i, c)| (i, self.field.mul(&c, &inv))).collect();
        let combo = combo.into_iter().map(|(i, c)| (i, self.field.mul(&c, &inv))).collect();
        self.pivot_of[lead] = Some(self.pivots.len());
        self.pivots.push(Pivot { lead, vec, combo });
        debug_assert!(self.pivots.len() <= self.n);
        Inserted::Pivot
    }
}

fn row_weights(m: &SparseMatrix) -> Vec<usize> {
    let mut w = vec![0usize; m.n_rows];
    for (i, _, _) in m.entries() {
        w[i] += 1;
    }
    w
}

/// Orients the matrix so that the inserted vectors are the shorter family.
fn oriented(m: &SparseMatrix) -> std::borrow::Cow<'_, SparseMatrix> {
    if m.n_cols <= m.n_rows {
        std::borrow::Cow::Borrowed(m)
    } else {
        std::borrow::Cow::Owned(m.transpose())
    }
}

fn insertion_order(m: &SparseMatrix) -> Vec<usize> {
    let mut order: Vec<usize> = (0..m.n_cols).collect();
    order.sort_by_key(|&j| (m.cols[j].len(), j));
    order
}

/// Exact rank over the rationals.
pub fn rank(m: &SparseMatrix) -> usize {
    let m = oriented(m);
    let mut ech = Echelon::new(Rationals, m.n_rows, row_weights(&m), false);
    let mut r = 0;
    for j in insertion_order(&m) {
        let v = m.cols[j].iter().map(|&(i, c)| (i, to_big(c))).collect();
        if let Inserted::Pivot = ech.insert(j, v) {
            r += 1;
        }
    }
    r
}

/// Rank over `Z/p`. The caller guarantees `p` divides no denominator.
pub fn rank_mod_p(m: &SparseMatrix, p: u64) -> usize {
    let m = oriented(m);
    let field = PrimeField { p };
    let mut ech = Echelon::new(field, m.n_rows, row_weights(&m), false);
    let mut r = 0;
    for j in insertion_order(&m) {
        let v: Vec<(usize, u64)> = m.cols[j].iter().map(|&(i, c)| (i, field.reduce(c))).filter(|e| e.1 != 0).collect();
        if let Inserted::Pivot = ech.insert(j, v) {
            r += 1;
        }
    }
    r
}

/// A basis of the kernel of `m` (vectors indexed by columns), exact.
pub fn kernel(m: &SparseMatrix) -> Vec<Vec<(usize, BigRational)>> {
    let mut ech = Echelon::new(Rationals, m.n_rows, row_weights(m), true);
    let mut out = Vec::new();
    for j in insertion_order(m) {
        let v = m.cols[j].iter().map(|&(i, c)| (i, to_big(c))).collect();
        if let Inserted::Dependent(combo) = ech.insert(j, v) {
            out.push(combo);
        }
    }
    out
}

/// Indices of the columns that are independent of the columns before them,
/// scanning left to right (exact).
pub fn independent_columns(m: &SparseMatrix) -> Vec<usize> {
    let mut ech = Echelon::new(Rationals, m.n_rows, row_weights(m), false);
    let mut out = Vec::new();
    for j in 0..m.n_cols {
        let v = m.cols[j].iter().map(|&(i, c)| (i, to_big(c))).collect();
        if let Inserted::Pivot = ech.insert(j, v) {
            out.push(j);
        }
    }
    out
}

/// Coordinates of every column of `targets` in terms of the columns of
/// `basis`, which must be independent. Fails when a target is outside the
/// span.
pub fn solve_in_span(basis: &SparseMatrix, targets: &SparseMatrix) -> Result<SparseMatrix, LaError> {
    if basis.n_rows != targets.n_rows {
        return Err(LaError::Shape(format!("{} rows against {}", basis.n_rows, targets.n_rows)));
    }
    let b = basis.n_cols;
    let mut ech = Echelon::new(Rationals, basis.n_rows, row_weights(basis), true);
    for j in 0..b {
        let v = basis.cols[j].iter().map(|&(i, c)| (i, to_big(c))).collect();
        if let Inserted::Dependent(_) = ech.insert(j, v) {
            return Err(LaError::Shape(format!("basis column {j} is dependent")));
        }
    }
    let mut cols = Vec::with_capacity(targets.n_cols);
    for j in 0..targets.n_cols {
        let v = targets.cols[j].iter().map(|&(i, c)| (i, to_big(c))).collect();
        match ech.insert(b + j, v) {
            Inserted::Pivot => return Err(LaError::Shape(format!("target column {j} is outside the span"))),
            Inserted::Dependent(combo) => {
                let own = combo.iter().find(|e| e.0 == b + j).map(|e| e.1.clone()).expect("own coefficient");
                let mut col = Vec::new();
                for (k, c) in combo {
                    if k < b {
                        let x = -(c / &own);
                        col.push((k, from_big(&x).ok_or_else(|| LaError::Shape("coefficient overflow".into()))?));
                    }
                }
                cols.push(col);
            }
        }
    }
    Ok(SparseMatrix::from_columns(b, cols))
}

/// Distinct primes between 2^30 and 2^31 used for modular ranks.
pub const DEFAULT_PRIMES: [u64; 5] = [2147483647, 2147483629, 2147483587, 2147483579, 2147483563];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ModularRank {
    pub rank: usize,
    /// At least three usable primes agree on `rank`, or the exact fallback ran.
    pub certified: bool,
    pub primes_used: usize,
    pub exact_fallback: bool,
}

/// Rank over the first three usable primes (primes dividing a denominator
/// are skipped). When they disagree, or fewer than three are usable, the
/// exact rank is computed instead.
pub fn rank_modular(m: &SparseMatrix, primes: &[u64]) -> ModularRank {
    let usable: Vec<u64> = primes
        .iter()
        .copied()
        .filter(|&p| m.entries().all(|(_, _, c)| c.denom().rem_euclid(p as i64) != 0))
        .take(3)
        .collect();
    let ranks: Vec<usize> = usable.iter().map(|&p| rank_mod_p(m, p)).collect();
    if ranks.len() == 3 && ranks.iter().all(|&r| r == ranks[0]) {
        ModularRank { rank: ranks[0], certified: true, primes_used: 3, exact_fallback: false }
    } else {
        ModularRank { rank: rank(m), certified: true, primes_used: usable.len(), exact_fallback: true }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RankMode {
    Exact,
    Modular,
}

/// Which rank routine a block gets: exact elimination up to
/// `exact_threshold` (largest dimension), the certified modular path above.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RankPolicy {
    pub mode: RankMode,
    pub exact_threshold: usize,
}

impl Default for RankPolicy {
    fn default() -> Self {
        RankPolicy { mode: RankMode::Exact, exact_threshold: 2000 }
    }
}

impl RankPolicy {
    pub fn exact_only() -> Self {
        RankPolicy { mode: RankMode::Exact, exact_threshold: usize::MAX }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct RankOutcome {
    pub rank: usize,
    /// Computed by rational elimination (as opposed to modular agreement).
    pub exact: bool,
}

pub fn rank_with(m: &SparseMatrix, policy: RankPolicy) -> RankOutcome {
    if m.is_zero() {
        return RankOutcome { rank: 0, exact: true };
    }
    let big = m.max_dim() > policy.exact_threshold;
    if policy.mode == RankMode::Modular || big {
        let r = rank_modular(m, &DEFAULT_PRIMES);
        RankOutcome { rank: r.rank, exact: r.exact_fallback }
    } else {
        RankOutcome { rank: rank(m), exact: true }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum Grade {
    Weight { weight: usize },
    Bidegree { arity: usize, alphas: usize },
}

/// Homology of `C_in --d_in--> C --d_out--> C_out` at `C`.
///
/// When a rank comes from the modular path it is a lower bound for the
/// rational rank, so `betti` is then an upper bound; it is exact whenever it
/// is zero, and `exact` records whether rational elimination produced both
/// ranks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct HomologyReport {
    #[serde(flatten)]
    pub grade: Grade,
    pub dim_chain: usize,
    pub rank_in: usize,
    pub rank_out: usize,
    pub betti: usize,
    pub exact: bool,
}

pub fn check_composition(d_in: &SparseMatrix, d_out: &SparseMatrix) -> Result<(), LaError> {
    if d_in.n_rows != d_out.n_cols {
        return Err(LaError::Shape(format!(
            "d_in has {} rows but d_out has {} columns",
            d_in.n_rows, d_out.n_cols
        )));
    }
    let nonzero = d_out.product_nonzeros(d_in)?;
    if nonzero > 0 {
        return Err(LaError::CompositionNonzero { nonzero });
    }
    Ok(())
}

pub fn homology_dim(d_in: &SparseMatrix, d_out: &SparseMatrix) -> Result<HomologyReport, LaError> {
    homology_dim_with(d_in, d_out, RankPolicy::exact_only(), Grade::Weight { weight: 0 })
}

pub fn homology_dim_with(
    d_in: &SparseMatrix,
    d_out: &SparseMatrix,
    policy: RankPolicy,
    grade: Grade,
) -> Result<HomologyReport, LaError> {
    check_composition(d_in, d_out)?;
    let dim = d_out.n_cols;
    let r_in = rank_with(d_in, policy);
    let r_out = rank_with(d_out, policy);
    assert!(r_in.rank + r_out.rank <= dim, "ranks exceed dimension despite d∘d = 0");
    Ok(HomologyReport {
        grade,
        dim_chain: dim,
        rank_in: r_in.rank,
        rank_out: r_out.rank,
        betti: dim - r_in.rank - r_out.rank,
        exact: r_in.exact && r_out.exact,
    })
}

// ---------------------------------------------------------------------------
// Matrix Market style dump

pub fn to_matrix_market(m: &SparseMatrix) -> String {
    let mut out = String::from("%%MatrixMarket matrix coordinate rational general\n");
    let _ = writeln!(out, "{} {} {}", m.n_rows, m.n_cols, m.nnz());
    for (i, j, c) in m.entries() {
        if c.is_integer() {
            let _ = writeln!(out, "{} {} {}", i + 1, j + 1, c.numer());
        } else {
            let _ = writeln!(out, "{} {} {}/{}", i + 1, j + 1, c.numer(), c.denom());
        }
    }
    out
}

pub fn from_matrix_market(text: &str) -> Result<SparseMatrix, LaError> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (ln, header) = lines.next().ok_or(LaError::Parse { line: 1, msg: "empty input".into() })?;
    if header.trim() != "%%MatrixMarket matrix coordinate rational general" {
        return Err(LaError::Parse { line: ln + 1, msg: "unexpected header".into() });
    }
    let mut lines = lines.filter(|(_, l)| !l.starts_with('%'));
    let parse_err = |line: usize, msg: &str| LaError::Parse { line: line + 1, msg: msg.to_string() };
    let (ln, size) = lines.next().ok_or(parse_err(ln, "missing size line"))?;
    let dims: Vec<usize> = size
        .split_whitespace()
        .map(|s| s.parse().map_err(|_| parse_err(ln, "bad size")))
        .collect::<Result<_, _>>()?;
    if dims.len() != 3 {
        return Err(parse_err(ln, "size line needs three fields"));
    }
    let mut entries = Vec::with_capacity(dims[2]);
    for (ln, line) in lines {
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.len() != 3 {
            return Err(parse_err(ln, "entry needs three fields"));
        }
        let i: usize = f[0].parse().map_err(|_| parse_err(ln, "bad row"))?;
        let j: usize = f[1].parse().map_err(|_| parse_err(ln, "bad column"))?;
        if i == 0 || j == 0 {
            return Err(parse_err(ln, "indices are 1-based"));
        }
        let c: Coeff = match f[2].split_once('/') {
            Some((a, b)) => {
                let a: i64 = a.parse().map_err(|_| parse_err(ln, "bad numerator"))?;
                let b: i64 = b.parse().map_err(|_| parse_err(ln, "bad denominator"))?;
                if b == 0 {
                    return Err(parse_err(ln, "zero denominator"));
                }
                Coeff::new(a, b)
            }
            None => Coeff::from_integer(f[2].parse().map_err(|_| parse_err(ln, "bad value"))?),
        };
        entries.push((i - 1, j - 1, c));
    }
    if entries.len() != dims[2] {
        return Err(LaError::Parse { line: 2, msg: format!("expected {} entries, found {}", dims[2], entries.len()) });
    }
    SparseMatrix::new(dims[0], dims[1], entries)
}

/// Absolute value helper used by report code.
pub fn abs_coeff(c: Coeff) -> Coeff {
    c.abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> Coeff {
        Coeff::from_integer(n)
    }

    fn dense(rows: &[&[i64]]) -> SparseMatrix {
        let mut e = Vec::new();
        for (i, r) in rows.iter().enumerate() {
            for (j, &v) in r.iter().enumerate() {
                if v != 0 {
                    e.push((i, j, q(v)));
                }
            }
        }
        SparseMatrix::new(rows.len(), rows[0].len(), e).unwrap()
    }

    #[test]
    fn trivial_ranks() {
        assert_eq!(rank(&SparseMatrix::zeros(5, 7)), 0);
        assert_eq!(rank(&SparseMatrix::identity(4)), 4);
        assert_eq!(rank(&dense(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]])), 2);
    }

    #[test]
    fn constructor_rejects_bad_entries() {
        assert!(matches!(SparseMatrix::new(2, 2, vec![(2, 0, q(1))]), Err(LaError::OutOfRange { .. })));
        assert!(matches!(SparseMatrix::new(2, 2, vec![(0, 0, q(0))]), Err(LaError::ExplicitZero(0, 0))));
        assert!(matches!(SparseMatrix::new(2, 2, vec![(0, 0, q(1)), (0, 0, q(2))]), Err(LaError::Duplicate(0, 0))));
    }

    #[test]
    fn rank_needs_rationals() {
        // rank 1 over Q; 2x2 minor is 1/2*4 - 1*2 = 0
        let m = SparseMatrix::new(2, 2, vec![(0, 0, Coeff::new(1, 2)), (0, 1, q(1)), (1, 0, q(2)), (1, 1, q(4))]).unwrap();
        assert_eq!(rank(&m), 1);
    }

    #[test]
    fn modular_rank_skips_denominator_primes() {
        let p = DEFAULT_PRIMES[0];
        let m = SparseMatrix::new(2, 2, vec![(0, 0, Coeff::new(1, p as i64)), (1, 1, q(1))]).unwrap();
        let r = rank_modular(&m, &DEFAULT_PRIMES);
        assert_eq!(r.primes_used, 3);
        assert_eq!(r.rank, 2);
        assert!(r.certified);
        let id = SparseMatrix::identity(6);
        assert_eq!(rank_modular(&id, &DEFAULT_PRIMES), ModularRank { rank: 6, certified: true, primes_used: 3, exact_fallback: false });
    }

    #[test]
    fn modular_rank_can_drop_and_fallback_repairs_it() {
        // determinant equals the first prime, so the rank drops mod that prime only
        let p = DEFAULT_PRIMES[0] as i64;
        let m = dense(&[&[p, 0], &[0, 1]]);
        assert_eq!(rank_mod_p(&m, DEFAULT_PRIMES[0]), 1);
        let r = rank_modular(&m, &DEFAULT_PRIMES[..3]);
        assert_eq!(r.rank, 2);
        assert!(r.exact_fallback);
    }

    #[test]
    fn default_primes_are_prime() {
        for &p in &DEFAULT_PRIMES {
            assert!(p > 1 << 20);
            let mut d = 2u64;
            while d * d <= p {
                assert_ne!(p % d, 0, "{p} divisible by {d}");
                d += 1;
            }
        }
    }

    #[test]
    fn homology_examples() {
        let z_in = SparseMatrix::zeros(3, 0);
        let z_out = SparseMatrix::zeros(0, 3);
        assert_eq!(homology_dim(&z_in, &z_out).unwrap().betti, 3);

        // exact pair: C_in = k -> C = k^2 -> C_out = k, image = kernel
        let d_in = dense(&[&[1], &[1]]);
        let d_out = dense(&[&[1, -1]]);
        let h = homology_dim(&d_in, &d_out).unwrap();
        assert_eq!((h.rank_in, h.rank_out, h.betti), (1, 1, 0));

        let bad_out = dense(&[&[1, 1]]);
        assert!(matches!(homology_dim(&d_in, &bad_out), Err(LaError::CompositionNonzero { nonzero: 1 })));
    }

    #[test]
    fn kernel_is_annihilated() {
        let m = dense(&[&[1, 2, 3, 0], &[0, 1, 1, 1], &[1, 3, 4, 1]]);
        let ker = kernel(&m);
        assert_eq!(ker.len(), 4 - rank(&m));
        for v in &ker {
            for i in 0..m.n_rows() {
                let s: BigRational = v.iter().map(|(j, c)| to_big(m.get(i, *j)) * c).sum();
                assert!(s.is_zero());
            }
        }
    }

    #[test]
    fn span_solving() {
        let basis = dense(&[&[1, 0], &[1, 1], &[0, 2]]);
        let targets = dense(&[&[2, 0], &[5, 0], &[6, 0]]);
        let x = solve_in_span(&basis, &targets).unwrap();
        assert_eq!(x, dense(&[&[2, 0], &[3, 0]]));
        assert_eq!(basis.mul(&x).unwrap(), targets);
        assert!(solve_in_span(&basis, &dense(&[&[1], &[0], &[0]])).is_err());
        assert_eq!(independent_columns(&dense(&[&[1, 2, 0], &[1, 2, 1]])), vec![0, 2]);
    }

    #[test]
    fn matrix_market_roundtrip() {
        let m = SparseMatrix::new(3, 2, vec![(0, 0, Coeff::new(-3, 4)), (2, 1, q(5))]).unwrap();
        let text = to_matrix_market(&m);
        assert!(text.starts_with("%%MatrixMarket matrix coordinate rational general\n3 2 2\n"));
        assert_eq!(from_matrix_market(&text).unwrap(), m);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn small_matrix() -> impl Strategy<Value = SparseMatrix> {
            (1usize..9, 1usize..9).prop_flat_map(|(r, c)| {
                proptest::collection::vec(-2i64..=2, r * c).prop_map(move |vals| {
                    let e = vals
                        .iter()
                        .enumerate()
                        .filter(|(_, v)| **v != 0)
                        .map(|(k, v)| (k / c, k % c, Coeff::from_integer(*v)))
                        .collect();
                    SparseMatrix::new(r, c, e).unwrap()
                })
            })
        }

        proptest! {
            #[test]
            fn rank_is_transpose_invariant(m in small_matrix()) {
                prop_assert_eq!(rank(&m), rank(&m.transpose()));
            }

            #[test]
            fn modular_agrees_with_exact(m in small_matrix()) {
                prop_assert_eq!(rank_modular(&m, &DEFAULT_PRIMES).rank, rank(&m));
            }

            #[test]
            fn kernel_dimension(m in small_matrix()) {
                prop_assert_eq!(kernel(&m).len() + rank(&m), m.n_cols());
            }
        }
    }
}
