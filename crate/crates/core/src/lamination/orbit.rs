use std::ops::RangeInclusive;

use serde::Serialize;

use super::{GeodesicIndex, JunctureSpec, Params, Presentation, Sign};
use crate::error::{Error, Result};
use crate::group::{enumerate_ball_with_budget, Word};
use crate::hyperbolic::{axis_with, Geodesic};

/// Where a family member came from: axis of `g * phi^n(w) * g^-1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Provenance {
    pub juncture: usize,
    pub iterate: i64,
    pub conjugator: Word,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FamilyEntry {
    pub geodesic: Geodesic,
    pub provenance: Provenance,
    /// Other provenances that produced the same geodesic.
    pub aliases: Vec<Provenance>,
}

/// Deduplicated juncture axes of one sign.
#[derive(Debug, Clone, Serialize)]
pub struct GeodesicFamily {
    pub sign: Sign,
    pub eps_theta: f64,
    pub entries: Vec<FamilyEntry>,
    #[serde(skip)]
    index: GeodesicIndex,
}

impl PartialEq for GeodesicFamily {
    fn eq(&self, other: &Self) -> bool {
        self.sign == other.sign
            && self.eps_theta == other.eps_theta
            && self.entries == other.entries
    }
}

impl GeodesicFamily {
    pub fn new(sign: Sign, eps_theta: f64) -> Self {
        GeodesicFamily {
            sign,
            eps_theta,
            entries: Vec::new(),
            index: GeodesicIndex::new(eps_theta),
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn geodesics(&self) -> impl Iterator<Item = &Geodesic> {
        self.entries.iter().map(|e| &e.geodesic)
    }

    /// Adds a geodesic, merging it into an equal entry when present.
    pub fn insert(&mut self, geodesic: Geodesic, provenance: Provenance) {
        match self.index.find(&geodesic) {
            Some(i) => self.entries[i].aliases.push(provenance),
            None => {
                self.index.insert(geodesic);
                self.entries.push(FamilyEntry {
                    geodesic,
                    provenance,
                    aliases: Vec::new(),
                });
            }
        }
    }

    /// Index of the entry equal to `g`, if any.
    pub fn find(&self, g: &Geodesic) -> Option<usize> {
        self.index.find(g)
    }

    pub fn merge(&mut self, other: GeodesicFamily) {
        for e in other.entries {
            self.insert(e.geodesic, e.provenance);
            for p in e.aliases {
                self.insert(e.geodesic, p);
            }
        }
    }

    /// Every (provenance, geodesic) pair, aliases included.
    pub fn members(&self) -> impl Iterator<Item = (&Provenance, &Geodesic)> {
        self.entries.iter().flat_map(|e| {
            std::iter::once(&e.provenance)
                .chain(e.aliases.iter())
                .map(move |p| (p, &e.geodesic))
        })
    }
}

/// Axes of `g * phi^n(w) * g^-1` for `n` in `range` and `g` in the ball of
/// radius `k`, deduplicated.
pub fn juncture_orbit(
    pres: &Presentation,
    juncture: &JunctureSpec,
    juncture_id: usize,
    range: RangeInclusive<i64>,
    k: usize,
    params: &Params,
) -> Result<GeodesicFamily> {
    let eps = params.tolerances;
    let ball = enumerate_ball_with_budget(&pres.group, k, params.ball_budget)?;
    let mut family = GeodesicFamily::new(juncture.sign, eps.eps_theta);

    // Iterates are built outward from n = 0 so each costs one substitution.
    let (lo, hi) = (*range.start(), *range.end());
    let mut iterates: Vec<(i64, Word)> = Vec::new();
    let mut push_side = |step: i64, count: i64| -> Result<()> {
        let mut cur = juncture.word.clone();
        for i in 1..=count {
            cur = pres.automorphism.apply(&cur, step, params.word_budget)?;
            iterates.push((step * i, cur.clone()));
        }
        Ok(())
    };
    push_side(-1, (-lo).max(0))?;
    push_side(1, hi.max(0))?;
    iterates.push((0, juncture.word.clone()));
    iterates.retain(|(n, _)| range.contains(n));
    iterates.sort_by_key(|(n, _)| *n);

    for (n, w) in iterates {
        // axis(u v u^-1) = u . axis(v); the cyclic core keeps entries small.
        let (u, core) = w.cyclic_decompose();
        let m = pres.group.evaluate(&core)?;
        let ax = axis_with(&m, eps.eps_trace).map_err(|e| match e {
            Error::NotHyperbolic { .. } => Error::validation(format!(
                "iterate {n} of juncture {juncture_id} (\"{}\") is not hyperbolic",
                pres.group.format_word(&w)
            )),
            other => other,
        })?;
        let ax = ax.transform(&pres.group.evaluate(&u)?);
        for (g, gm) in &ball {
            family.insert(
                ax.transform(gm),
                Provenance {
                    juncture: juncture_id,
                    iterate: n,
                    conjugator: g.clone(),
                },
            );
        }
    }
    Ok(family)
}
