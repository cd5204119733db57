use lamina_core::markov::{
    admissible_words, build_matrix_a, build_matrix_b, coding_consistency, entropy,
    invariant_measures, perron, shift, to_f64, CrossingTable, Degeneracy, Rect4Gon, PERRON_MAXITER,
    PERRON_TOL,
};
use ndarray::Array2;
use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use proptest::prelude::*;

fn matrix(max_n: usize, max_entry: u64) -> impl Strategy<Value = Array2<u64>> {
    (1..=max_n).prop_flat_map(move |n| {
        prop::collection::vec(0..=max_entry, n * n)
            .prop_map(move |v| Array2::from_shape_vec((n, n), v).unwrap())
    })
}

fn rects(n: usize) -> Vec<Rect4Gon> {
    (0..n)
        .map(|i| Rect4Gon::new(format!("R{i}"), Degeneracy::Full))
        .collect()
}

/// Brute force over all n^m sequences.
fn brute_count(a: &Array2<u64>, m: usize) -> u128 {
    let n = a.nrows();
    let mut count = 0;
    let mut seq = vec![0usize; m];
    loop {
        if seq.windows(2).all(|p| a[[p[0], p[1]]] > 0) {
            count += 1;
        }
        let mut k = 0;
        loop {
            if k == m {
                return count;
            }
            seq[k] += 1;
            if seq[k] < n {
                break;
            }
            seq[k] = 0;
            k += 1;
        }
    }
}

fn power_sum(a: &Array2<u64>, k: usize) -> u128 {
    let n = a.nrows();
    let mut p: Array2<u128> = Array2::eye(n);
    let a = a.mapv(u128::from);
    for _ in 0..k {
        p = p.dot(&a);
    }
    p.sum()
}

fn ratio(num: &BigUint, den: &BigUint) -> f64 {
    let scale = BigUint::from(10u64).pow(30);
    (num * &scale / den).to_f64().unwrap() / 1e30
}

/// Collatz-Wielandt bounds on the spectral radius from the exact vector
/// `(M + I)^k 1`.
fn cw_bounds(m: &Array2<u64>, k: usize) -> (f64, f64) {
    let n = m.nrows();
    let mut x: Vec<BigUint> = vec![BigUint::from(1u8); n];
    let apply = |x: &[BigUint], shift: bool| -> Vec<BigUint> {
        (0..n)
            .map(|i| {
                let mut s = if shift { x[i].clone() } else { BigUint::zero() };
                for j in 0..n {
                    s += &x[j] * m[[i, j]];
                }
                s
            })
            .collect()
    };
    for _ in 0..k {
        x = apply(&x, true);
    }
    let y = apply(&x, false);
    let r: Vec<f64> = y.iter().zip(&x).map(|(a, b)| ratio(a, b)).collect();
    (
        r.iter().cloned().fold(f64::INFINITY, f64::min),
        r.iter().cloned().fold(0.0, f64::max),
    )
}

proptest! {
    #[test]
    fn matrix_b_equals_a_for_markov_families(a in matrix(6, 1)) {
        let t = CrossingTable::from_counts(&a).unwrap();
        let ma = build_matrix_a(&rects(a.nrows()), &t).unwrap();
        prop_assert_eq!(ma.0, build_matrix_b(&t).0);
    }

    #[test]
    fn admissible_counts_are_matrix_power_sums(a in matrix(4, 1), m in 1usize..=14) {
        let w = admissible_words(&a, m, 0).unwrap();
        prop_assert_eq!(w.count, power_sum(&a, m - 1));
        if m <= 7 {
            prop_assert_eq!(w.count, brute_count(&a, m));
        }
    }

    #[test]
    fn listed_words_are_admissible_and_shift_stably(a in matrix(3, 1), m in 2usize..=6) {
        let w = admissible_words(&a, m, 10_000).unwrap();
        let words = w.words.unwrap();
        prop_assert_eq!(words.len() as u128, w.count);
        prop_assert!(words.windows(2).all(|p| p[0] < p[1]));
        for word in &words {
            prop_assert!(word.is_admissible(&a));
            prop_assert!(shift(word).unwrap().is_admissible(&a));
        }
    }

    #[test]
    fn perron_is_monotone(m in matrix(4, 5).prop_filter("4x4", |m| m.nrows() == 4),
                          i in 0usize..4, j in 0usize..4, bump in 1u64..=3) {
        let mut bigger = m.clone();
        bigger[[i, j]] += bump;
        prop_assume!(m.sum() > 0);
        let k0 = perron(&to_f64(&m), PERRON_TOL, PERRON_MAXITER).unwrap();
        let k1 = perron(&to_f64(&bigger), PERRON_TOL, PERRON_MAXITER).unwrap();
        prop_assert!(k1.kappa >= k0.kappa - 1e-9, "{} < {}", k1.kappa, k0.kappa);
        // The exact rerun brackets the spectral radius from both sides.
        for (mat, p) in [(&m, &k0), (&bigger, &k1)] {
            let (lo, hi) = cw_bounds(mat, 200);
            if p.converged && hi - lo < 1e-9 {
                prop_assert!(p.kappa >= lo - 1e-9 && p.kappa <= hi + 1e-9);
            }
        }
    }

    #[test]
    fn measures_have_small_residuals(b in matrix(8, 10)) {
        prop_assume!(b.sum() > 0);
        let m = invariant_measures(&b, PERRON_TOL, PERRON_MAXITER).unwrap();
        prop_assert!(m.plus.residual <= 1e-9, "{:?}", m.plus);
        prop_assert!(m.minus.residual <= 1e-9, "{:?}", m.minus);
        prop_assert!(m.kappa_gap <= 1e-9);
        for p in [&m.plus, &m.minus] {
            prop_assert!(p.y.iter().all(|&v| v >= 0.0));
            prop_assert!((p.y.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn entropy_scales_with_powers(a in matrix(5, 1), k in 1usize..=4) {
        prop_assume!(a.sum() > 0);
        let mut p = a.clone();
        for _ in 1..k {
            p = p.dot(&a);
        }
        prop_assume!(p.sum() > 0);
        let h = entropy(&a).unwrap();
        let hk = entropy(&p).unwrap();
        prop_assert!((hk - k as f64 * h).abs() <= 1e-6, "{hk} vs {}", k as f64 * h);
    }

    #[test]
    fn coding_counts_match(a in matrix(4, 1), d in 2usize..=8) {
        let r = coding_consistency(&a, d).unwrap();
        prop_assert!(r.counts_match && r.extensions_match);
        let dead: Vec<usize> = (0..a.nrows()).filter(|&i| a.row(i).sum() == 0).map(|i| i + 1).collect();
        prop_assert_eq!(r.dead_ends, dead);
    }
}

#[test]
fn golden_words_follow_fibonacci() {
    let a = ndarray::array![[1u64, 1], [1, 0]];
    let (mut f0, mut f1) = (2u128, 3u128);
    for m in 2..=14 {
        assert_eq!(admissible_words(&a, m, 0).unwrap().count, f1);
        (f0, f1) = (f1, f0 + f1);
    }
}
