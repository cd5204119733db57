//! Markov families, incidence matrices and the subshift they define.
//!
//! Rectangles are indexed from 1 in every user-facing place (crossing
//! triples, symbol words, violation lists) and from 0 in matrices.

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const PERRON_TOL: f64 = 1e-12;
pub const PERRON_MAXITER: usize = 100_000;
/// Perron entries at or below this count as zero for the support flag.
pub const SUPPORT_TOL: f64 = 1e-9;
pub const DEFAULT_LIST_BUDGET: u128 = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Degeneracy {
    #[serde(rename = "full")]
    Full,
    #[serde(rename = "arc+")]
    ArcPlus,
    #[serde(rename = "arc-")]
    ArcMinus,
    #[serde(rename = "point")]
    Point,
}

/// A Markov 4-gon; degenerate shapes are allowed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Rect4Gon {
    pub id: String,
    pub degeneracy: Degeneracy,
    /// Corner points in disk coordinates, used only for drawing.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub anchor: Option<[[f64; 2]; 4]>,
}

impl Rect4Gon {
    pub fn new(id: impl Into<String>, degeneracy: Degeneracy) -> Self {
        Rect4Gon {
            id: id.into(),
            degeneracy,
            anchor: None,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct CrossingEntry {
    pub count: u64,
    /// Recorded for single crossings; not interpreted.
    pub orientation: Option<String>,
}

/// Component counts of `h(R_i) ∩ R_j`; pairs not listed count zero.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CrossingTable {
    n: usize,
    entries: Vec<CrossingEntry>,
}

/// One row of a crossing table as written by users: 1-based indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrossingTriple {
    pub i: usize,
    pub j: usize,
    pub count: i64,
    pub orientation: Option<String>,
}

impl CrossingTriple {
    pub fn new(i: usize, j: usize, count: i64) -> Self {
        CrossingTriple {
            i,
            j,
            count,
            orientation: None,
        }
    }
}

impl CrossingTable {
    pub fn zeros(n: usize) -> Self {
        CrossingTable {
            n,
            entries: vec![CrossingEntry::default(); n * n],
        }
    }

    pub fn from_triples(n: usize, triples: &[CrossingTriple]) -> Result<Self> {
        let mut t = Self::zeros(n);
        let mut seen = vec![false; n * n];
        for tr in triples {
            if tr.i == 0 || tr.j == 0 || tr.i > n || tr.j > n {
                return Err(Error::validation(format!(
                    "crossing ({}, {}) is outside 1..={n}",
                    tr.i, tr.j
                )));
            }
            if tr.count < 0 {
                return Err(Error::validation(format!(
                    "crossing ({}, {}) has negative count {}",
                    tr.i, tr.j, tr.count
                )));
            }
            let k = (tr.i - 1) * n + (tr.j - 1);
            if std::mem::replace(&mut seen[k], true) {
                return Err(Error::validation(format!(
                    "crossing ({}, {}) is listed twice",
                    tr.i, tr.j
                )));
            }
            t.entries[k] = CrossingEntry {
                count: tr.count as u64,
                orientation: tr.orientation.clone(),
            };
        }
        Ok(t)
    }

    pub fn from_counts(counts: &Array2<u64>) -> Result<Self> {
        let (r, c) = counts.dim();
        if r != c {
            return Err(Error::validation(format!(
                "count matrix is {r}x{c}, not square"
            )));
        }
        Ok(CrossingTable {
            n: r,
            entries: counts
                .iter()
                .map(|&count| CrossingEntry {
                    count,
                    orientation: None,
                })
                .collect(),
        })
    }

    pub fn size(&self) -> usize {
        self.n
    }

    /// Entry for 1-based indices.
    pub fn get(&self, i: usize, j: usize) -> &CrossingEntry {
        &self.entries[(i - 1) * self.n + (j - 1)]
    }

    pub fn counts(&self) -> Array2<u64> {
        Array2::from_shape_fn((self.n, self.n), |(i, j)| {
            self.entries[i * self.n + j].count
        })
    }

    /// Nonzero entries as 1-based triples in row-major order.
    pub fn triples(&self) -> Vec<CrossingTriple> {
        let mut out = Vec::new();
        for i in 0..self.n {
            for j in 0..self.n {
                let e = &self.entries[i * self.n + j];
                if e.count > 0 || e.orientation.is_some() {
                    out.push(CrossingTriple {
                        i: i + 1,
                        j: j + 1,
                        count: e.count as i64,
                        orientation: e.orientation.clone(),
                    });
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MarkovViolation {
    pub i: usize,
    pub j: usize,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MarkovVerification {
    pub violations: Vec<MarkovViolation>,
}

impl MarkovVerification {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

fn check_ids(rects: &[Rect4Gon], table: &CrossingTable) -> Result<()> {
    if rects.len() != table.size() {
        return Err(Error::validation(format!(
            "{} rectangles but the crossing table is {}x{}",
            rects.len(),
            table.size(),
            table.size()
        )));
    }
    for (k, r) in rects.iter().enumerate() {
        if rects[..k].iter().any(|o| o.id == r.id) {
            return Err(Error::validation(format!(
                "duplicate rectangle id {}",
                r.id
            )));
        }
    }
    Ok(())
}

/// A family is Markov when every nonempty `h(R_i) ∩ R_j` is one component.
pub fn verify_markov(rects: &[Rect4Gon], table: &CrossingTable) -> Result<MarkovVerification> {
    check_ids(rects, table)?;
    let n = table.size();
    let violations = (1..=n)
        .flat_map(|i| (1..=n).map(move |j| (i, j)))
        .filter_map(|(i, j)| {
            let count = table.get(i, j).count;
            (count > 1).then_some(MarkovViolation { i, j, count })
        })
        .collect();
    Ok(MarkovVerification { violations })
}

/// 0/1 transition matrix of a verified Markov family.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IncidenceA(pub Array2<u64>);

/// Component-count matrix of a pre-Markov family.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IncidenceB(pub Array2<u64>);

pub fn build_matrix_a(rects: &[Rect4Gon], table: &CrossingTable) -> Result<IncidenceA> {
    let v = verify_markov(rects, table)?;
    if let Some(bad) = v.violations.first() {
        return Err(Error::validation(format!(
            "not a Markov family: crossing ({}, {}) has {} components",
            bad.i, bad.j, bad.count
        )));
    }
    Ok(IncidenceA(table.counts().mapv(|c| u64::from(c > 0))))
}

pub fn build_matrix_b(table: &CrossingTable) -> IncidenceB {
    IncidenceB(table.counts())
}

/// Finite window `(i_0, ..., i_m)` of a symbol sequence, symbols from 1.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SymbolWord(pub Vec<usize>);

impl SymbolWord {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_admissible(&self, a: &Array2<u64>) -> bool {
        let n = a.nrows();
        self.0.iter().all(|&s| (1..=n).contains(&s))
            && self.0.windows(2).all(|p| a[[p[0] - 1, p[1] - 1]] > 0)
    }
}

impl std::fmt::Display for SymbolWord {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.0.iter().map(usize::to_string).collect();
        f.write_str(&parts.join(" "))
    }
}

/// Drops the first symbol.
pub fn shift(w: &SymbolWord) -> Result<SymbolWord> {
    if w.len() < 2 {
        return Err(Error::validation("shift needs a word of length at least 2"));
    }
    Ok(SymbolWord(w.0[1..].to_vec()))
}

fn check_square<T>(m: &Array2<T>, what: &str) -> Result<usize> {
    let (r, c) = m.dim();
    if r != c {
        return Err(Error::validation(format!("{what} is {r}x{c}, not square")));
    }
    Ok(r)
}

/// Number of admissible words of length `m` ending in each symbol, exact.
fn ending_counts(a: &Array2<u64>, m: usize) -> Result<Vec<u128>> {
    let n = a.nrows();
    let mut v = vec![1u128; n];
    for _ in 1..m {
        let mut next = vec![0u128; n];
        for (i, &vi) in v.iter().enumerate() {
            for (j, nj) in next.iter_mut().enumerate() {
                if a[[i, j]] > 0 {
                    *nj = nj.checked_add(vi).ok_or(Error::Budget {
                        what: "admissible word count",
                        needed: u128::MAX,
                        limit: u128::MAX,
                    })?;
                }
            }
        }
        v = next;
    }
    Ok(v)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AdmissibleWords {
    pub length: usize,
    pub count: u128,
    /// Lexicographic list, present only when the count fits the budget.
    pub words: Option<Vec<SymbolWord>>,
}

/// Counts the admissible words of length `m` and lists them when there are
/// at most `list_budget`.
pub fn admissible_words(a: &Array2<u64>, m: usize, list_budget: u128) -> Result<AdmissibleWords> {
    let n = check_square(a, "transition matrix")?;
    if m == 0 {
        return Err(Error::validation("word length must be at least 1"));
    }
    let count = ending_counts(a, m)?.into_iter().sum::<u128>();
    let words = (count <= list_budget).then(|| {
        let mut out = Vec::with_capacity(count as usize);
        let mut stack: Vec<Vec<usize>> = (1..=n).rev().map(|s| vec![s]).collect();
        while let Some(w) = stack.pop() {
            if w.len() == m {
                out.push(SymbolWord(w));
                continue;
            }
            let last = w[w.len() - 1] - 1;
            for j in (0..n).rev() {
                if a[[last, j]] > 0 {
                    let mut next = w.clone();
                    next.push(j + 1);
                    stack.push(next);
                }
            }
        }
        out
    });
    Ok(AdmissibleWords {
        length: m,
        count,
        words,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PerronMethod {
    PowerIteration,
    /// Reducible matrix solved class by class after power iteration stalled.
    ClassDecomposition,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PerronData {
    pub kappa: f64,
    /// Nonnegative, sums to one.
    pub y: Vec<f64>,
    /// `max |M y - kappa y|`.
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
    pub full_support: bool,
    pub method: PerronMethod,
}

fn mat_vec(m: &Array2<f64>, y: &[f64]) -> Vec<f64> {
    m.rows()
        .into_iter()
        .map(|row| row.iter().zip(y).map(|(a, b)| a * b).sum())
        .collect()
}

fn residual(m: &Array2<f64>, y: &[f64]) -> (f64, f64) {
    let my = mat_vec(m, y);
    let kappa: f64 = my.iter().sum();
    let r = my
        .iter()
        .zip(y)
        .map(|(a, b)| (a - kappa * b).abs())
        .fold(0.0, f64::max);
    (kappa, r)
}

struct PowerRun {
    y: Vec<f64>,
    kappa: f64,
    residual: f64,
    iterations: usize,
    converged: bool,
}

/// Power iteration on `M + I` from the uniform vector. The shift makes
/// irreducible matrices primitive, so periodic classes still converge.
/// With `stall` set, stops once progress is slower than halving the
/// residual per checkpoint.
fn power_run(m: &Array2<f64>, tol: f64, maxiter: usize, stall: bool) -> PowerRun {
    const CHECKPOINT: usize = 512;
    let n = m.nrows();
    let mut y = vec![1.0 / n as f64; n];
    let (mut kappa, mut res) = residual(m, &y);
    let mut iterations = 0;
    let mut last_checkpoint = res;
    while res > tol && iterations < maxiter {
        let my = mat_vec(m, &y);
        let next: Vec<f64> = my.iter().zip(&y).map(|(a, b)| a + b).collect();
        let s: f64 = next.iter().sum();
        y = next.into_iter().map(|v| v / s).collect();
        (kappa, res) = residual(m, &y);
        iterations += 1;
        if stall && iterations % CHECKPOINT == 0 {
            if res > 0.5 * last_checkpoint {
                break;
            }
            last_checkpoint = res;
        }
    }
    PowerRun {
        y,
        kappa,
        residual: res,
        iterations,
        converged: res <= tol,
    }
}

/// Strongly connected classes of the graph `i -> j` when `M_ij > 0`, with
/// `reach[i][j]` true when a path of length at least zero joins them.
fn classes(m: &Array2<f64>) -> (Vec<Vec<usize>>, Vec<Vec<bool>>) {
    let n = m.nrows();
    let mut reach: Vec<Vec<bool>> = (0..n)
        .map(|i| (0..n).map(|j| i == j || m[[i, j]] > 0.0).collect())
        .collect();
    for k in 0..n {
        for i in 0..n {
            if reach[i][k] {
                for j in 0..n {
                    if reach[k][j] {
                        reach[i][j] = true;
                    }
                }
            }
        }
    }
    let mut assigned = vec![false; n];
    let mut out = Vec::new();
    for i in 0..n {
        if assigned[i] {
            continue;
        }
        let class: Vec<usize> = (i..n).filter(|&j| reach[i][j] && reach[j][i]).collect();
        for &j in &class {
            assigned[j] = true;
        }
        out.push(class);
    }
    (out, reach)
}

fn submatrix(m: &Array2<f64>, idx: &[usize]) -> Array2<f64> {
    Array2::from_shape_fn((idx.len(), idx.len()), |(a, b)| m[[idx[a], idx[b]]])
}

/// Solves `x` from `a x = b` by Gaussian elimination with partial pivoting.
fn solve(mut a: Array2<f64>, mut b: Vec<f64>) -> Result<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let p = (col..n)
            .max_by(|&x, &y| a[[x, col]].abs().total_cmp(&a[[y, col]].abs()))
            .unwrap_or(col);
        if a[[p, col]].abs() < 1e-300 {
            return Err(Error::NumericDegeneracy(
                "singular system in Perron solve".into(),
            ));
        }
        if p != col {
            for k in 0..n {
                a.swap([p, k], [col, k]);
            }
            b.swap(p, col);
        }
        for r in col + 1..n {
            let f = a[[r, col]] / a[[col, col]];
            for k in col..n {
                a[[r, k]] -= f * a[[col, k]];
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|k| a[[r, k]] * x[k]).sum();
        x[r] = (b[r] - s) / a[[r, r]];
    }
    Ok(x)
}

/// Nonnegative eigenvector of a reducible matrix: the Perron vector of a
/// dominant class that no other dominant class reaches, extended to the
/// classes that reach it.
fn by_classes(m: &Array2<f64>, tol: f64, maxiter: usize) -> Result<PowerRun> {
    let n = m.nrows();
    let (cls, reach) = classes(m);
    let mut iterations = 0;
    let blocks: Vec<(f64, Vec<f64>)> = cls
        .iter()
        .map(|c| {
            let sub = submatrix(m, c);
            if c.len() == 1 {
                return (sub[[0, 0]], vec![1.0]);
            }
            let run = power_run(&sub, tol, maxiter, false);
            iterations += run.iterations;
            (run.kappa, run.y)
        })
        .collect();
    let kappa = blocks.iter().map(|b| b.0).fold(0.0, f64::max);
    let near = |r: f64| (r - kappa).abs() <= 1e-9 * kappa.max(1.0);
    let chosen = (0..cls.len())
        .find(|&c| {
            near(blocks[c].0)
                && !(0..cls.len())
                    .any(|d| d != c && near(blocks[d].0) && reach[cls[d][0]][cls[c][0]])
        })
        .ok_or_else(|| Error::NumericDegeneracy("no dominant class".into()))?;
    let mut y = vec![0.0; n];
    for (&i, &v) in cls[chosen].iter().zip(&blocks[chosen].1) {
        y[i] = v;
    }
    let upstream: Vec<usize> = (0..n)
        .filter(|&i| reach[i][cls[chosen][0]] && !cls[chosen].contains(&i))
        .collect();
    if !upstream.is_empty() {
        // (kappa I - M_UU) y_U = M_{U,C} y_C has a nonnegative solution since
        // every upstream class has spectral radius below kappa.
        let mut a = submatrix(m, &upstream).mapv(|v| -v);
        for k in 0..upstream.len() {
            a[[k, k]] += kappa;
        }
        let rhs: Vec<f64> = upstream
            .iter()
            .map(|&i| cls[chosen].iter().map(|&j| m[[i, j]] * y[j]).sum())
            .collect();
        for (&i, v) in upstream.iter().zip(solve(a, rhs)?) {
            y[i] = v.max(0.0);
        }
    }
    let s: f64 = y.iter().sum();
    let y: Vec<f64> = y.into_iter().map(|v| v / s).collect();
    let (kappa, res) = residual(m, &y);
    Ok(PowerRun {
        y,
        kappa,
        residual: res,
        iterations,
        converged: res <= tol,
    })
}

/// Dominant nonnegative eigenpair of a nonnegative matrix.
pub fn perron(m: &Array2<f64>, tol: f64, maxiter: usize) -> Result<PerronData> {
    let n = check_square(m, "matrix")?;
    if n == 0 {
        return Err(Error::validation("matrix is empty"));
    }
    if m.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(Error::validation(
            "matrix entries must be finite and nonnegative",
        ));
    }
    if m.iter().all(|v| *v == 0.0) {
        return Err(Error::ZeroMatrix);
    }
    let (cls, _) = classes(m);
    let reducible = cls.len() > 1;
    let mut run = power_run(m, tol, maxiter, reducible);
    let mut method = PerronMethod::PowerIteration;
    if !run.converged && reducible {
        let spent = run.iterations;
        let alt = by_classes(m, tol, maxiter)?;
        if alt.residual < run.residual {
            run = PowerRun {
                iterations: spent + alt.iterations,
                ..alt
            };
            method = PerronMethod::ClassDecomposition;
        }
    }
    let full_support = run.y.iter().all(|&v| v > SUPPORT_TOL);
    Ok(PerronData {
        kappa: run.kappa,
        y: run.y,
        residual: run.residual,
        iterations: run.iterations,
        converged: run.converged,
        full_support,
        method,
    })
}

/// Row-major nested vectors, for serialization.
pub fn to_rows<T: Copy>(m: &Array2<T>) -> Vec<Vec<T>> {
    m.rows().into_iter().map(|r| r.to_vec()).collect()
}

pub fn to_f64(m: &Array2<u64>) -> Array2<f64> {
    m.mapv(|v| v as f64)
}

/// `log kappa`, clamped at zero (nilpotent matrices have kappa 0).
pub fn entropy(a: &Array2<u64>) -> Result<f64> {
    let p = perron(&to_f64(a), PERRON_TOL, PERRON_MAXITER)?;
    Ok(p.kappa.ln().max(0.0))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InvariantMeasures {
    /// Right Perron vector of `B`.
    pub plus: PerronData,
    /// Right Perron vector of `B^T`.
    pub minus: PerronData,
    pub kappa: f64,
    /// `|kappa(B) - kappa(B^T)|`.
    pub kappa_gap: f64,
}

pub fn invariant_measures(b: &Array2<u64>, tol: f64, maxiter: usize) -> Result<InvariantMeasures> {
    let m = to_f64(b);
    let plus = perron(&m, tol, maxiter)?;
    let minus = perron(&m.t().to_owned(), tol, maxiter)?;
    Ok(InvariantMeasures {
        kappa: plus.kappa,
        kappa_gap: (plus.kappa - minus.kappa).abs(),
        plus,
        minus,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CodingReport {
    pub depth: usize,
    pub count: u128,
    /// Sum of the entries of `A^(d-1)`.
    pub expected: u128,
    pub counts_match: bool,
    /// d-words whose last symbol has a successor.
    pub extendable: u128,
    /// Every d-word extends exactly when its last symbol has a successor.
    pub extensions_match: bool,
    /// Symbols (from 1) whose row of `A` is zero.
    pub dead_ends: Vec<usize>,
}

impl CodingReport {
    pub fn is_consistent(&self) -> bool {
        self.counts_match && self.extensions_match && self.dead_ends.is_empty()
    }
}

fn matrix_power_sum(a: &Array2<u64>, k: usize) -> Result<u128> {
    let n = a.nrows();
    let overflow = || Error::Budget {
        what: "matrix power",
        needed: u128::MAX,
        limit: u128::MAX,
    };
    let mut p: Vec<Vec<u128>> = (0..n)
        .map(|i| (0..n).map(|j| u128::from(i == j)).collect())
        .collect();
    for _ in 0..k {
        let mut next = vec![vec![0u128; n]; n];
        for i in 0..n {
            for l in 0..n {
                if p[i][l] == 0 {
                    continue;
                }
                for j in 0..n {
                    let term = p[i][l]
                        .checked_mul(u128::from(a[[l, j]]))
                        .ok_or_else(overflow)?;
                    next[i][j] = next[i][j].checked_add(term).ok_or_else(overflow)?;
                }
            }
        }
        p = next;
    }
    p.iter()
        .flatten()
        .try_fold(0u128, |s, &v| s.checked_add(v).ok_or_else(overflow))
}

/// Depth-`d` cylinder checks of the coding by admissible words.
pub fn coding_consistency(a: &Array2<u64>, depth: usize) -> Result<CodingReport> {
    let n = check_square(a, "transition matrix")?;
    if depth < 2 {
        return Err(Error::validation("coding depth must be at least 2"));
    }
    let ends = ending_counts(a, depth)?;
    let count: u128 = ends.iter().sum();
    let expected = matrix_power_sum(&a.mapv(|v| u64::from(v > 0)), depth - 1)?;
    let outdeg: Vec<u128> = (0..n)
        .map(|i| (0..n).filter(|&j| a[[i, j]] > 0).count() as u128)
        .collect();
    let extendable: u128 = ends
        .iter()
        .zip(&outdeg)
        .filter(|(_, d)| **d > 0)
        .map(|(e, _)| e)
        .sum();
    let longer: u128 = ends.iter().zip(&outdeg).map(|(e, d)| e * d).sum();
    let longer_direct: u128 = ending_counts(a, depth + 1)?.iter().sum();
    let extensions_match = longer == longer_direct;
    Ok(CodingReport {
        depth,
        count,
        expected,
        counts_match: count == expected,
        extendable,
        extensions_match,
        dead_ends: (0..n).filter(|&i| outdeg[i] == 0).map(|i| i + 1).collect(),
    })
}
