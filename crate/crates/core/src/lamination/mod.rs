//! Finite-horizon approximations of the laminations.
//!
//! Junctures are iterated by the free-group automorphism and spread around by
//! a ball of conjugators; each (juncture, conjugator) pair gives a chain of
//! axes indexed by the iterate. Chains that converge give limit leaves. Leaves
//! accumulated by negative junctures approximate the positive lamination and
//! vice versa.

mod axioms;
mod escape;
mod extract;
mod index;
mod orbit;

pub use axioms::{
    assess_axioms, axiom_report, sign_family, AxiomCheck, AxiomInputs, AxiomReport, AxiomStatus,
    LaminationSummary, Laminations, FINITE_CAVEAT,
};
pub use escape::{classify_lengths, escape_test, EscapeIterate, EscapeReport, EscapeVerdict};
pub use extract::{
    crossing_audit, extract_limit_leaves, transversal_intersections, Certificate, ChainDiagnostic,
    ChainKey, CrossingViolation, IntersectionPoint, LaminationApprox, LimitSource,
    MeagerInvariantSet, SkipReason, MIN_CHAIN_ITERATES, NOISE_FLOOR,
};
pub use orbit::{juncture_orbit, FamilyEntry, GeodesicFamily, Provenance};

pub(crate) use index::GeodesicIndex;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{
    FreeAutomorphism, FuchsianGroup, Word, DEFAULT_BALL_BUDGET, DEFAULT_WORD_BUDGET,
};
use crate::hyperbolic::{classify_isometry, IsometryClass, Tolerances};

/// Which end family a juncture belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Positive,
    #[serde(rename = "-")]
    Negative,
}

impl Sign {
    pub fn opposite(self) -> Self {
        match self {
            Sign::Positive => Sign::Negative,
            Sign::Negative => Sign::Positive,
        }
    }

    /// Iteration direction in which junctures of this sign accumulate:
    /// negative junctures accumulate forward, positive ones backward.
    pub fn accumulation_direction(self) -> i64 {
        match self {
            Sign::Negative => 1,
            Sign::Positive => -1,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Sign::Positive => "+",
            Sign::Negative => "-",
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// The group together with the automorphism that encodes the map on the
/// fundamental group.
#[derive(Debug, Clone, PartialEq)]
pub struct Presentation {
    pub group: FuchsianGroup,
    pub automorphism: FreeAutomorphism,
}

impl Presentation {
    pub fn new(group: FuchsianGroup, automorphism: FreeAutomorphism) -> Result<Self> {
        if automorphism.rank() != group.rank() {
            return Err(Error::validation(format!(
                "automorphism has rank {} but the group has {} generators",
                automorphism.rank(),
                group.rank()
            )));
        }
        let report = automorphism.verify();
        if let Some(&g) = report.failing_generators.first() {
            return Err(Error::validation(format!(
                "automorphism round trip fails at generator {}",
                group.names()[g]
            )));
        }
        Ok(Presentation {
            group,
            automorphism,
        })
    }
}

/// One juncture component: its end, sign, conjugacy class and period.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JunctureSpec {
    pub end: String,
    pub sign: Sign,
    pub word: Word,
    pub period: u32,
}

impl JunctureSpec {
    pub fn new(end: impl Into<String>, sign: Sign, word: Word, period: u32) -> Result<Self> {
        if word.is_empty() {
            return Err(Error::validation("juncture word is empty"));
        }
        if period == 0 {
            return Err(Error::validation("juncture period must be positive"));
        }
        Ok(JunctureSpec {
            end: end.into(),
            sign,
            word,
            period,
        })
    }

    /// Checks the word against the group: valid letters and a hyperbolic value.
    pub fn validate(&self, group: &FuchsianGroup, eps_trace: f64) -> Result<()> {
        let m = group.evaluate(&self.word)?;
        if classify_isometry(&m, eps_trace) != IsometryClass::Hyperbolic {
            return Err(Error::validation(format!(
                "juncture word \"{}\" does not evaluate to a hyperbolic isometry",
                group.format_word(&self.word)
            )));
        }
        Ok(())
    }
}

/// Budgets and tolerances for the approximation pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Params {
    /// Iterates run over `-horizon..=horizon`.
    pub horizon: u32,
    /// Conjugator ball radius.
    pub ball: usize,
    /// Convergence tolerance for limit chains.
    pub tol: f64,
    pub tolerances: Tolerances,
    pub growth_ratio: f64,
    pub word_budget: usize,
    pub ball_budget: u128,
}

impl Default for Params {
    fn default() -> Self {
        Params {
            horizon: 12,
            ball: 3,
            tol: 1e-6,
            tolerances: Tolerances::default(),
            growth_ratio: 1.5,
            word_budget: DEFAULT_WORD_BUDGET,
            ball_budget: DEFAULT_BALL_BUDGET,
        }
    }
}

impl Params {
    pub fn iterate_range(&self) -> std::ops::RangeInclusive<i64> {
        let h = i64::from(self.horizon);
        -h..=h
    }
}
