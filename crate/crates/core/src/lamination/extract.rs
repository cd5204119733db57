use std::collections::BTreeMap;
use std::f64::consts::{PI, TAU};

use serde::Serialize;

use super::{GeodesicFamily, GeodesicIndex, Provenance, Sign};
use crate::group::Word;
use crate::hyperbolic::{
    geodesic_intersection, geodesic_relation, DiskPoint, Geodesic, GeodesicRelation, HPoint,
    IdealPoint,
};

/// Gaps at or below this are indistinguishable from rounding noise; a chain
/// certificate stops at the first such gap.
pub const NOISE_FLOOR: f64 = 1e-12;
/// A chain needs this many consecutive iterates (four gaps) to be certified.
pub const MIN_CHAIN_ITERATES: usize = 5;
const CERTIFIED_GAPS: usize = 4;

/// A sequence of lifts: one juncture, one conjugator, iterates running in the
/// accumulation direction of the juncture's sign.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ChainKey {
    pub juncture: usize,
    pub conjugator: Word,
    pub direction: i64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LimitSource {
    /// Aitken extrapolation of the last three iterates.
    Extrapolated,
    /// The chain reached the noise floor; its last iterate is the limit.
    LastIterate,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Certificate {
    pub chain: ChainKey,
    /// Successive endpoint gaps, cut at the first gap below the noise floor.
    pub gaps: Vec<f64>,
    pub iterates: usize,
    pub source: LimitSource,
}

impl Certificate {
    pub fn last_gap(&self) -> f64 {
        self.gaps.last().copied().unwrap_or(0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SkipReason {
    /// Fewer than [`MIN_CHAIN_ITERATES`] consecutive iterates.
    TooShort,
    /// Gaps decrease but have not dropped below the tolerance.
    NotConverged,
    /// Gaps fail to decrease: not a Cauchy sequence at this horizon.
    Oscillating,
    /// Both endpoints converge to the same ideal point (the chain escapes).
    Degenerate,
    /// The chain is eventually constant, so its limit is a juncture.
    AttainedByJuncture,
    /// The limit coincides with a juncture axis from another chain.
    MatchesJuncture,
    /// Another chain already produced this leaf.
    Duplicate,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainDiagnostic {
    pub chain: ChainKey,
    pub reason: SkipReason,
    pub last_gap: Option<f64>,
}

/// Finite approximation of one lamination: leaves with convergence
/// certificates, in chain order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LaminationApprox {
    /// `Positive` for the lamination accumulated by negative junctures.
    pub sign: Sign,
    pub leaves: Vec<Geodesic>,
    pub certificates: Vec<Certificate>,
    pub skipped: Vec<ChainDiagnostic>,
}

impl LaminationApprox {
    /// An uncertified approximation, for audits of hand-built leaf sets.
    pub fn from_leaves(sign: Sign, leaves: Vec<Geodesic>) -> Self {
        LaminationApprox {
            sign,
            leaves,
            certificates: Vec::new(),
            skipped: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.leaves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.leaves.is_empty()
    }
}

/// Angle of `x` unwrapped to lie within pi of `reference`.
fn unwrap_near(x: f64, reference: f64) -> f64 {
    let mut d = (x - reference).rem_euclid(TAU);
    if d > PI {
        d -= TAU;
    }
    reference + d
}

fn aitken(x0: f64, x1: f64, x2: f64) -> Option<f64> {
    let (x0, x1) = (unwrap_near(x0, x2), unwrap_near(x1, x2));
    let d1 = x1 - x0;
    let d2 = x2 - x1;
    let denom = d2 - d1;
    let ratio = d2 / d1;
    if d1 == 0.0 || !(0.0..1.0).contains(&ratio) || denom.abs() < f64::MIN_POSITIVE {
        return None;
    }
    Some(x2 - d2 * d2 / denom)
}

fn extrapolate(chain: &[Geodesic], eps_theta: f64) -> Option<Geodesic> {
    let n = chain.len();
    let [g0, g1, g2] = [chain[n - 3], chain[n - 2], chain[n - 1]];
    let s = aitken(g0.start().angle(), g1.start().angle(), g2.start().angle())?;
    let e = aitken(g0.end().angle(), g1.end().angle(), g2.end().angle())?;
    let candidate = Geodesic::new(
        IdealPoint::from_angle(s),
        IdealPoint::from_angle(e),
        eps_theta,
    )
    .ok()?;
    // Reject extrapolations that overshoot past the observed tail.
    (candidate.endpoint_gap(&g2) <= g1.endpoint_gap(&g2)).then_some(candidate)
}

enum ChainOutcome {
    Leaf(Geodesic, Certificate),
    Skip(SkipReason, Option<f64>),
}

fn assess_chain(key: &ChainKey, chain: &[Geodesic], tol: f64, eps_theta: f64) -> ChainOutcome {
    if chain.len() < MIN_CHAIN_ITERATES {
        return ChainOutcome::Skip(SkipReason::TooShort, None);
    }
    let gaps: Vec<f64> = chain.windows(2).map(|w| w[0].endpoint_gap(&w[1])).collect();
    let last = gaps.last().copied();
    let cut = gaps.iter().position(|&g| g <= NOISE_FLOOR);
    let cert: Vec<f64> = match cut {
        Some(i) => gaps[..=i].to_vec(),
        None => gaps.clone(),
    };
    if cert.len() < CERTIFIED_GAPS {
        let reason = if cut.is_some() {
            SkipReason::AttainedByJuncture
        } else {
            SkipReason::TooShort
        };
        return ChainOutcome::Skip(reason, last);
    }
    let tail = &cert[cert.len() - CERTIFIED_GAPS..];
    let decreasing = tail.windows(2).all(|w| w[1] < w[0]);
    let settled = cut.is_none_or(|i| gaps[i..].iter().all(|&g| g <= tol));
    if !decreasing || !settled {
        return ChainOutcome::Skip(SkipReason::Oscillating, last);
    }
    if cert[cert.len() - 1] >= tol {
        return ChainOutcome::Skip(SkipReason::NotConverged, last);
    }
    let tail_end = chain[chain.len() - 1];
    let (limit, source) = match cut {
        Some(_) => (tail_end, LimitSource::LastIterate),
        None => match extrapolate(chain, eps_theta) {
            Some(g) => (g, LimitSource::Extrapolated),
            None => (tail_end, LimitSource::LastIterate),
        },
    };
    if limit.start().approx_eq(&limit.end(), eps_theta) {
        return ChainOutcome::Skip(SkipReason::Degenerate, last);
    }
    ChainOutcome::Leaf(
        limit,
        Certificate {
            chain: key.clone(),
            gaps: cert,
            iterates: chain.len(),
            source,
        },
    )
}

/// Groups family members into chains and keeps the longest run of
/// consecutive iterates starting at zero in the accumulation direction.
fn chains(fam: &GeodesicFamily) -> BTreeMap<ChainKey, Vec<Geodesic>> {
    let direction = fam.sign.accumulation_direction();
    let mut by_key: BTreeMap<ChainKey, BTreeMap<i64, Geodesic>> = BTreeMap::new();
    for (p, g) in fam.members() {
        if p.iterate * direction < 0 {
            continue;
        }
        let key = ChainKey {
            juncture: p.juncture,
            conjugator: p.conjugator.clone(),
            direction,
        };
        by_key
            .entry(key)
            .or_default()
            .insert(p.iterate * direction, *g);
    }
    by_key
        .into_iter()
        .map(|(k, steps)| {
            let mut run: Vec<Geodesic> = Vec::new();
            for (expected, (step, g)) in steps.into_iter().enumerate() {
                if step != expected as i64 {
                    break;
                }
                // Deduplicated entries may carry either orientation.
                let g = match run.last() {
                    Some(prev) if prev.endpoint_gap(&g.reversed()) < prev.endpoint_gap(&g) => {
                        g.reversed()
                    }
                    _ => g,
                };
                run.push(g);
            }
            (k, run)
        })
        .collect()
}

/// Certifies convergent chains and returns their limits.
pub fn extract_limit_leaves(fam: &GeodesicFamily, tol: f64) -> LaminationApprox {
    let eps = fam.eps_theta;
    let mut out = LaminationApprox {
        sign: fam.sign.opposite(),
        leaves: Vec::new(),
        certificates: Vec::new(),
        skipped: Vec::new(),
    };
    let mut leaf_index = GeodesicIndex::new(eps);
    for (key, chain) in chains(fam) {
        match assess_chain(&key, &chain, tol, eps) {
            ChainOutcome::Skip(reason, last_gap) => out.skipped.push(ChainDiagnostic {
                chain: key,
                reason,
                last_gap,
            }),
            ChainOutcome::Leaf(leaf, cert) => {
                let own = |p: &Provenance| {
                    p.juncture == key.juncture
                        && p.conjugator == key.conjugator
                        && p.iterate * key.direction >= 0
                };
                let foreign_match = fam.find(&leaf).is_some_and(|i| {
                    let e = &fam.entries[i];
                    !std::iter::once(&e.provenance).chain(&e.aliases).all(own)
                });
                let reason = if foreign_match {
                    Some(SkipReason::MatchesJuncture)
                } else if leaf_index.find(&leaf).is_some() {
                    Some(SkipReason::Duplicate)
                } else {
                    None
                };
                match reason {
                    Some(reason) => out.skipped.push(ChainDiagnostic {
                        chain: key,
                        reason,
                        last_gap: Some(cert.last_gap()),
                    }),
                    None => {
                        leaf_index.insert(leaf);
                        out.leaves.push(leaf);
                        out.certificates.push(cert);
                    }
                }
            }
        }
    }
    out
}

/// A pair of leaves of one lamination that cross each other.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossingViolation {
    pub first: usize,
    pub second: usize,
    pub first_leaf: Geodesic,
    pub second_leaf: Geodesic,
}

/// All crossing pairs within one lamination; empty means the leaves are
/// pairwise non-crossing.
pub fn crossing_audit(lam: &LaminationApprox, eps_theta: f64) -> Vec<CrossingViolation> {
    let mut out = Vec::new();
    for (i, a) in lam.leaves.iter().enumerate() {
        for (j, b) in lam.leaves.iter().enumerate().skip(i + 1) {
            if geodesic_relation(a, b, eps_theta) == GeodesicRelation::Cross {
                out.push(CrossingViolation {
                    first: i,
                    second: j,
                    first_leaf: *a,
                    second_leaf: *b,
                });
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntersectionPoint {
    pub plus: usize,
    pub minus: usize,
    pub point: HPoint,
    pub disk: DiskPoint,
}

/// Crossings of positive with negative leaves: the finite shadow of the
/// invariant set where the two laminations meet.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeagerInvariantSet {
    pub points: Vec<IntersectionPoint>,
    /// Positive leaves that meet no negative leaf.
    pub uncovered_plus: Vec<usize>,
    /// Negative leaves that meet no positive leaf.
    pub uncovered_minus: Vec<usize>,
    /// Crossing pairs whose intersection could not be computed stably.
    pub unresolved: Vec<(usize, usize)>,
}

impl MeagerInvariantSet {
    pub fn coverage_plus(&self, leaves: usize) -> f64 {
        coverage(leaves, self.uncovered_plus.len())
    }

    pub fn coverage_minus(&self, leaves: usize) -> f64 {
        coverage(leaves, self.uncovered_minus.len())
    }
}

fn coverage(total: usize, uncovered: usize) -> f64 {
    if total == 0 {
        0.0
    } else {
        (total - uncovered) as f64 / total as f64
    }
}

pub fn transversal_intersections(
    plus: &LaminationApprox,
    minus: &LaminationApprox,
    eps_theta: f64,
) -> MeagerInvariantSet {
    let mut points = Vec::new();
    let mut unresolved = Vec::new();
    let mut hit_plus = vec![false; plus.leaves.len()];
    let mut hit_minus = vec![false; minus.leaves.len()];
    for (i, p) in plus.leaves.iter().enumerate() {
        for (j, m) in minus.leaves.iter().enumerate() {
            if geodesic_relation(p, m, eps_theta) != GeodesicRelation::Cross {
                continue;
            }
            hit_plus[i] = true;
            hit_minus[j] = true;
            match geodesic_intersection(p, m, eps_theta) {
                Ok(point) => points.push(IntersectionPoint {
                    plus: i,
                    minus: j,
                    point,
                    disk: point.to_disk(),
                }),
                Err(_) => unresolved.push((i, j)),
            }
        }
    }
    let uncovered = |hits: Vec<bool>| {
        hits.iter()
            .enumerate()
            .filter(|(_, h)| !**h)
            .map(|(i, _)| i)
            .collect()
    };
    MeagerInvariantSet {
        points,
        uncovered_plus: uncovered(hit_plus),
        uncovered_minus: uncovered(hit_minus),
        unresolved,
    }
}
