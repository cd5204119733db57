//! Free Fuchsian groups, reduced words and substitution automorphisms.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::hyperbolic::{
    apply_isometry, axis_with, classify_isometry, DiskPoint, HPoint, IdealPoint, Isometry,
    IsometryClass, EPS_TRACE,
};

/// Default cap on the length of any word produced by substitution.
pub const DEFAULT_WORD_BUDGET: usize = 1_000_000;
/// Default cap on the number of words returned by ball enumeration.
pub const DEFAULT_BALL_BUDGET: u128 = 1_000_000;

/// A generator or its inverse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Letter {
    pub generator: usize,
    pub inverse: bool,
}

impl Letter {
    pub fn gen(generator: usize) -> Self {
        Letter {
            generator,
            inverse: false,
        }
    }

    pub fn inv(generator: usize) -> Self {
        Letter {
            generator,
            inverse: true,
        }
    }

    pub fn inverted(self) -> Self {
        Letter {
            generator: self.generator,
            inverse: !self.inverse,
        }
    }

    /// Position in the alphabet `a < a^-1 < b < b^-1 < ...`.
    pub fn rank_key(self) -> usize {
        2 * self.generator + usize::from(self.inverse)
    }
}

/// A freely reduced word. The empty word is the identity.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Word(Vec<Letter>);

/// Cancels adjacent inverse pairs. Every letter must name one of `rank` generators.
pub fn free_reduce(letters: &[Letter], rank: usize) -> Result<Word> {
    let mut out: Vec<Letter> = Vec::with_capacity(letters.len());
    for &l in letters {
        if l.generator >= rank {
            return Err(Error::validation(format!(
                "generator index {} out of range for rank {rank}",
                l.generator
            )));
        }
        push_reduced(&mut out, l);
    }
    Ok(Word(out))
}

fn push_reduced(out: &mut Vec<Letter>, l: Letter) {
    if out.last() == Some(&l.inverted()) {
        out.pop();
    } else {
        out.push(l);
    }
}

impl Word {
    pub fn identity() -> Self {
        Word(Vec::new())
    }

    pub fn letter(l: Letter) -> Self {
        Word(vec![l])
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn inverse(&self) -> Self {
        Word(self.0.iter().rev().map(|l| l.inverted()).collect())
    }

    /// Reduced product `self * other`.
    pub fn concat(&self, other: &Word) -> Self {
        let mut out = self.0.clone();
        for &l in &other.0 {
            push_reduced(&mut out, l);
        }
        Word(out)
    }

    /// `self * w * self^-1`.
    pub fn conjugate(&self, w: &Word) -> Self {
        self.concat(w).concat(&self.inverse())
    }

    /// Splits `self = u * v * u^-1` with `v` cyclically reduced.
    pub fn cyclic_decompose(&self) -> (Word, Word) {
        let l = &self.0;
        let mut i = 0;
        while i + 1 < l.len() - i && l[i] == l[l.len() - 1 - i].inverted() {
            i += 1;
        }
        (Word(l[..i].to_vec()), Word(l[i..l.len() - i].to_vec()))
    }

    /// Parses whitespace-separated generator names, each optionally
    /// followed by `^-1`. The result is freely reduced.
    pub fn parse(text: &str, names: &[String]) -> Result<Self> {
        let mut letters = Vec::new();
        for token in text.split_whitespace() {
            let (name, inverse) = match token.strip_suffix("^-1") {
                Some(stem) => (stem, true),
                None => (token.strip_suffix("^1").unwrap_or(token), false),
            };
            let generator = names.iter().position(|n| n == name).ok_or_else(|| {
                Error::validation(format!("unknown generator `{name}` in word \"{text}\""))
            })?;
            letters.push(Letter { generator, inverse });
        }
        free_reduce(&letters, names.len())
    }

    /// Inverse of [`Word::parse`].
    pub fn format(&self, names: &[String]) -> String {
        self.0
            .iter()
            .map(|l| {
                let name = names
                    .get(l.generator)
                    .cloned()
                    .unwrap_or_else(|| format!("g{}", l.generator));
                if l.inverse {
                    format!("{name}^-1")
                } else {
                    name
                }
            })
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Shortlex comparison key.
    fn shortlex_key(&self) -> (usize, Vec<usize>) {
        (self.len(), self.0.iter().map(|l| l.rank_key()).collect())
    }

    pub fn shortlex_cmp(&self, other: &Word) -> std::cmp::Ordering {
        self.shortlex_key().cmp(&other.shortlex_key())
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        let names: Vec<String> = (0..26)
            .map(|i| char::from(b'a' + i as u8).to_string())
            .collect();
        f.write_str(&self.format(&names))
    }
}

/// A free group of hyperbolic isometries with named generators.
#[derive(Debug, Clone, PartialEq)]
pub struct FuchsianGroup {
    names: Vec<String>,
    generators: Vec<Isometry>,
    inverses: Vec<Isometry>,
}

impl FuchsianGroup {
    /// Validates that there is at least one generator, names are unique and
    /// every generator is hyperbolic.
    pub fn new(generators: Vec<(String, Isometry)>) -> Result<Self> {
        Self::with_tolerance(generators, EPS_TRACE)
    }

    pub fn with_tolerance(generators: Vec<(String, Isometry)>, eps_trace: f64) -> Result<Self> {
        if generators.is_empty() {
            return Err(Error::validation("group needs at least one generator"));
        }
        let mut names: Vec<String> = Vec::with_capacity(generators.len());
        let mut mats = Vec::with_capacity(generators.len());
        for (name, m) in generators {
            if name.is_empty() || name.contains(char::is_whitespace) || name.contains('^') {
                return Err(Error::validation(format!(
                    "invalid generator name \"{name}\""
                )));
            }
            if names.contains(&name) {
                return Err(Error::validation(format!(
                    "duplicate generator name {name}"
                )));
            }
            if classify_isometry(&m, eps_trace) != IsometryClass::Hyperbolic {
                return Err(Error::validation(format!(
                    "generator {name} is not hyperbolic"
                )));
            }
            names.push(name);
            mats.push(m);
        }
        let inverses = mats.iter().map(Isometry::inverse).collect();
        Ok(FuchsianGroup {
            names,
            generators: mats,
            inverses,
        })
    }

    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn generators(&self) -> &[Isometry] {
        &self.generators
    }

    pub fn letter_matrix(&self, l: Letter) -> &Isometry {
        if l.inverse {
            &self.inverses[l.generator]
        } else {
            &self.generators[l.generator]
        }
    }

    pub fn parse_word(&self, text: &str) -> Result<Word> {
        Word::parse(text, &self.names)
    }

    pub fn format_word(&self, w: &Word) -> String {
        if w.is_empty() {
            "1".to_string()
        } else {
            w.format(&self.names)
        }
    }

    /// Ordered product of the letter matrices, renormalized at every step.
    pub fn evaluate(&self, w: &Word) -> Result<Isometry> {
        w.letters().iter().try_fold(Isometry::IDENTITY, |acc, &l| {
            if l.generator >= self.rank() {
                Err(Error::validation(format!(
                    "generator index {} out of range for rank {}",
                    l.generator,
                    self.rank()
                )))
            } else {
                Ok(acc.compose(self.letter_matrix(l)))
            }
        })
    }

    /// Every generator conjugated by `g`; the result describes the same
    /// abstract group acting through a moved picture.
    pub fn conjugated_by(&self, g: &Isometry) -> Self {
        let generators: Vec<Isometry> = self.generators.iter().map(|m| g.conjugate(m)).collect();
        let inverses = generators.iter().map(Isometry::inverse).collect();
        FuchsianGroup {
            names: self.names.clone(),
            generators,
            inverses,
        }
    }
}

/// Evaluates a word in a group. Free function form of [`FuchsianGroup::evaluate`].
pub fn evaluate_word(group: &FuchsianGroup, w: &Word) -> Result<Isometry> {
    group.evaluate(w)
}

/// An automorphism of the free group given by images of the generators,
/// together with a claimed inverse substitution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FreeAutomorphism {
    forward: Vec<Word>,
    inverse: Vec<Word>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AutomorphismReport {
    pub ok: bool,
    /// Generators whose round trip does not reduce back to themselves.
    pub failing_generators: Vec<usize>,
}

fn substitute(images: &[Word], w: &Word, budget: usize) -> Result<Word> {
    let mut out: Vec<Letter> = Vec::new();
    for l in w.letters() {
        let image = images.get(l.generator).ok_or_else(|| {
            Error::validation(format!("generator index {} has no image", l.generator))
        })?;
        if l.inverse {
            for &x in image.letters().iter().rev() {
                push_reduced(&mut out, x.inverted());
            }
        } else {
            for &x in image.letters() {
                push_reduced(&mut out, x);
            }
        }
        if out.len() > budget {
            return Err(Error::Budget {
                what: "word length",
                needed: out.len() as u128,
                limit: budget as u128,
            });
        }
    }
    Ok(Word(out))
}

impl FreeAutomorphism {
    pub fn new(forward: Vec<Word>, inverse: Vec<Word>) -> Result<Self> {
        if forward.len() != inverse.len() {
            return Err(Error::validation(
                "forward and inverse substitutions have different ranks",
            ));
        }
        let rank = forward.len();
        for w in forward.iter().chain(inverse.iter()) {
            if w.letters().iter().any(|l| l.generator >= rank) {
                return Err(Error::validation("substitution uses an unknown generator"));
            }
        }
        Ok(FreeAutomorphism { forward, inverse })
    }

    pub fn identity(rank: usize) -> Self {
        let ids: Vec<Word> = (0..rank).map(|g| Word::letter(Letter::gen(g))).collect();
        FreeAutomorphism {
            forward: ids.clone(),
            inverse: ids,
        }
    }

    /// Inner automorphism `x -> c x c^-1`.
    pub fn inner(rank: usize, c: &Word) -> Self {
        let ci = c.inverse();
        let forward = (0..rank)
            .map(|g| c.conjugate(&Word::letter(Letter::gen(g))))
            .collect();
        let inverse = (0..rank)
            .map(|g| ci.conjugate(&Word::letter(Letter::gen(g))))
            .collect();
        FreeAutomorphism { forward, inverse }
    }

    pub fn rank(&self) -> usize {
        self.forward.len()
    }

    pub fn forward(&self) -> &[Word] {
        &self.forward
    }

    pub fn inverse(&self) -> &[Word] {
        &self.inverse
    }

    /// The `n`-fold substitution (negative `n` uses the inverse images),
    /// freely reduced after each pass.
    pub fn apply(&self, w: &Word, n: i64, budget: usize) -> Result<Word> {
        let images = if n >= 0 { &self.forward } else { &self.inverse };
        let mut cur = w.clone();
        for _ in 0..n.unsigned_abs() {
            cur = substitute(images, &cur, budget)?;
        }
        Ok(cur)
    }

    pub fn verify(&self) -> AutomorphismReport {
        let failing_generators: Vec<usize> = (0..self.rank())
            .filter(|&g| {
                let x = Word::letter(Letter::gen(g));
                let there = substitute(&self.forward, &x, usize::MAX)
                    .and_then(|y| substitute(&self.inverse, &y, usize::MAX));
                let back = substitute(&self.inverse, &x, usize::MAX)
                    .and_then(|y| substitute(&self.forward, &y, usize::MAX));
                !(there.as_ref() == Ok(&x) && back.as_ref() == Ok(&x))
            })
            .collect();
        AutomorphismReport {
            ok: failing_generators.is_empty(),
            failing_generators,
        }
    }
}

pub fn apply_automorphism(phi: &FreeAutomorphism, w: &Word, n: i64) -> Result<Word> {
    phi.apply(w, n, DEFAULT_WORD_BUDGET)
}

pub fn verify_automorphism(phi: &FreeAutomorphism) -> AutomorphismReport {
    phi.verify()
}

/// Number of reduced words of length at most `k` in a free group of rank `r`.
pub fn ball_size(rank: usize, k: usize) -> u128 {
    let r = rank as u128;
    if r == 0 {
        return 1;
    }
    let mut total: u128 = 1;
    let mut sphere: u128 = 2 * r;
    for _ in 1..=k {
        total = total.saturating_add(sphere);
        sphere = sphere.saturating_mul(2 * r - 1);
    }
    total
}

/// All reduced words of length at most `k` in shortlex order, with their
/// isometries.
pub fn enumerate_ball(group: &FuchsianGroup, k: usize) -> Result<Vec<(Word, Isometry)>> {
    enumerate_ball_with_budget(group, k, DEFAULT_BALL_BUDGET)
}

pub fn enumerate_ball_with_budget(
    group: &FuchsianGroup,
    k: usize,
    budget: u128,
) -> Result<Vec<(Word, Isometry)>> {
    let needed = ball_size(group.rank(), k);
    if needed > budget {
        return Err(Error::Budget {
            what: "ball enumeration",
            needed,
            limit: budget,
        });
    }
    let alphabet: Vec<Letter> = (0..group.rank())
        .flat_map(|g| [Letter::gen(g), Letter::inv(g)])
        .collect();
    let mut out = vec![(Word::identity(), Isometry::IDENTITY)];
    let mut frontier = 0..1;
    for _ in 0..k {
        let start = out.len();
        for idx in frontier.clone() {
            let (w, m) = out[idx].clone();
            for &l in &alphabet {
                if w.letters().last() == Some(&l.inverted()) {
                    continue;
                }
                let mut letters = w.letters().to_vec();
                letters.push(l);
                out.push((Word(letters), m.compose(group.letter_matrix(l))));
            }
        }
        frontier = start..out.len();
    }
    Ok(out)
}

/// Sampled picture of the limit set: an orbit of a base point together with
/// the fixed points of short hyperbolic words.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimitSetSample {
    pub depth: usize,
    pub orbit: Vec<DiskPoint>,
    pub fixed_points: Vec<IdealPoint>,
}

impl LimitSetSample {
    /// Smallest Euclidean distance from an orbit point to the boundary circle.
    pub fn min_boundary_gap(&self) -> f64 {
        self.orbit
            .iter()
            .map(|p| 1.0 - p.norm())
            .fold(f64::INFINITY, f64::min)
    }
}

pub fn limit_set_sample(group: &FuchsianGroup, base: &HPoint, k: usize) -> Result<LimitSetSample> {
    limit_set_sample_with(group, base, k, DEFAULT_BALL_BUDGET, EPS_TRACE)
}

pub fn limit_set_sample_with(
    group: &FuchsianGroup,
    base: &HPoint,
    k: usize,
    budget: u128,
    eps_trace: f64,
) -> Result<LimitSetSample> {
    let ball = enumerate_ball_with_budget(group, k, budget)?;
    let mut orbit = Vec::with_capacity(ball.len());
    let mut fixed_points = Vec::new();
    for (w, m) in &ball {
        orbit.push(apply_isometry(m, base)?.to_disk());
        if w.is_empty() {
            continue;
        }
        if let Ok(ax) = axis_with(m, eps_trace) {
            fixed_points.push(ax.start());
            fixed_points.push(ax.end());
        }
    }
    Ok(LimitSetSample {
        depth: k,
        orbit,
        fixed_points,
    })
}
