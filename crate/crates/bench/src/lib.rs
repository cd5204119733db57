//! Fixtures shared by the benchmarks.

use lamina_core::group::{FuchsianGroup, Word};
use lamina_core::lamination::{JunctureSpec, Presentation};
use lamina_core::scene::{parse_scene, Scene};
use ndarray::Array2;

const SCHOTTKY_AB: &str = include_str!("../../../scenes/schottky_ab.json");

pub fn schottky_scene() -> Scene {
    parse_scene(SCHOTTKY_AB).expect("shipped scene parses")
}

pub fn schottky_group() -> FuchsianGroup {
    schottky_scene().group().expect("scene has a group").clone()
}

pub fn presentation() -> (Presentation, Vec<JunctureSpec>) {
    let s = schottky_scene();
    (
        s.presentation().expect("scene has an automorphism"),
        s.junctures,
    )
}

/// `a b^n`, the word whose axes converge to a limit leaf.
pub fn transvected_word(group: &FuchsianGroup, n: usize) -> Word {
    let text = std::iter::once("a")
        .chain(std::iter::repeat_n("b", n))
        .collect::<Vec<_>>()
        .join(" ");
    group.parse_word(&text).expect("word over a, b")
}

/// Dense nonnegative matrix with a deterministic pattern of zeros.
pub fn pattern_matrix(n: usize) -> Array2<u64> {
    Array2::from_shape_fn((n, n), |(i, j)| ((i * 7 + j * 3) % 5) as u64)
}
