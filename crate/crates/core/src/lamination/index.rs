use std::collections::HashMap;
use std::f64::consts::TAU;

use crate::hyperbolic::{geodesic_relation, Geodesic, GeodesicRelation};

/// Grid lookup of unoriented geodesics up to the ideal-point tolerance.
#[derive(Debug, Clone)]
pub(crate) struct GeodesicIndex {
    eps: f64,
    cell: f64,
    ncell: i64,
    buckets: HashMap<(i64, i64), Vec<usize>>,
    items: Vec<Geodesic>,
}

impl GeodesicIndex {
    pub(crate) fn new(eps: f64) -> Self {
        let cell = (4.0 * eps).max(1e-12);
        let ncell = (TAU / cell).ceil() as i64;
        GeodesicIndex {
            eps,
            cell,
            ncell,
            buckets: HashMap::new(),
            items: Vec::new(),
        }
    }

    pub(crate) fn from_geodesics<'a>(eps: f64, it: impl IntoIterator<Item = &'a Geodesic>) -> Self {
        let mut idx = Self::new(eps);
        for g in it {
            idx.insert(*g);
        }
        idx
    }

    fn cell_of(&self, theta: f64) -> i64 {
        ((theta / self.cell).floor() as i64).rem_euclid(self.ncell)
    }

    fn key(a: i64, b: i64) -> (i64, i64) {
        (a.min(b), a.max(b))
    }

    pub(crate) fn find(&self, g: &Geodesic) -> Option<usize> {
        let (s, e) = g.to_disk();
        let (cs, ce) = (self.cell_of(s), self.cell_of(e));
        let mut best: Option<usize> = None;
        for ds in -1..=1 {
            for de in -1..=1 {
                let k = Self::key(
                    (cs + ds).rem_euclid(self.ncell),
                    (ce + de).rem_euclid(self.ncell),
                );
                if let Some(ids) = self.buckets.get(&k) {
                    for &i in ids {
                        if geodesic_relation(&self.items[i], g, self.eps) == GeodesicRelation::Equal
                        {
                            best = Some(best.map_or(i, |b: usize| b.min(i)));
                        }
                    }
                }
            }
        }
        best
    }

    pub(crate) fn insert(&mut self, g: Geodesic) -> usize {
        let (s, e) = g.to_disk();
        let k = Self::key(self.cell_of(s), self.cell_of(e));
        let id = self.items.len();
        self.items.push(g);
        self.buckets.entry(k).or_default().push(id);
        id
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_across_the_angle_seam() {
        let mut idx = GeodesicIndex::new(1e-9);
        let g = Geodesic::from_angles(TAU - 1e-10, 2.0).unwrap();
        idx.insert(g);
        let h = Geodesic::from_angles(2.0 + 1e-10, 1e-10).unwrap();
        assert_eq!(idx.find(&h), Some(0));
        assert_eq!(idx.find(&h.reversed()), Some(0));
        let far = Geodesic::from_angles(2.0 + 1e-8, 1e-10).unwrap();
        assert_eq!(idx.find(&far), None);
    }
}
