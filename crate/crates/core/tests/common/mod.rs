#![allow(dead_code)]

use std::f64::consts::FRAC_PI_2;

use lamina_core::group::{FreeAutomorphism, FuchsianGroup, Word};
use lamina_core::hyperbolic::Isometry;
use lamina_core::lamination::{JunctureSpec, Presentation, Sign};

pub fn names() -> Vec<String> {
    vec!["a".to_string(), "b".to_string()]
}

/// `a = diag(4, 1/4)` and `b`, its conjugate by a quarter turn of the disk.
pub fn schottky() -> FuchsianGroup {
    let a = Isometry::new([[4.0, 0.0], [0.0, 0.25]]).unwrap();
    let r = Isometry::disk_rotation(FRAC_PI_2);
    let b = r.conjugate(&a);
    FuchsianGroup::new(vec![("a".into(), a), ("b".into(), b)]).unwrap()
}

pub fn word(text: &str) -> Word {
    Word::parse(text, &names()).unwrap()
}

pub fn automorphism(forward: [&str; 2], inverse: [&str; 2]) -> FreeAutomorphism {
    FreeAutomorphism::new(
        forward.iter().map(|t| word(t)).collect(),
        inverse.iter().map(|t| word(t)).collect(),
    )
    .unwrap()
}

/// `a -> a b`, `b -> b`.
pub fn transvection() -> FreeAutomorphism {
    automorphism(["a b", "b"], ["a b^-1", "b"])
}

pub fn presentation(phi: FreeAutomorphism) -> Presentation {
    Presentation::new(schottky(), phi).unwrap()
}

pub fn juncture(sign: Sign, w: &str) -> JunctureSpec {
    JunctureSpec::new(
        if sign == Sign::Negative { "e1" } else { "e2" },
        sign,
        word(w),
        1,
    )
    .unwrap()
}

pub fn shipped_junctures() -> Vec<JunctureSpec> {
    vec![
        juncture(Sign::Negative, "a"),
        juncture(Sign::Positive, "a a b"),
    ]
}

/// Plain 2x2 product, independent of the library's normalization.
pub fn mul(x: [[f64; 2]; 2], y: [[f64; 2]; 2]) -> [[f64; 2]; 2] {
    [
        [
            x[0][0] * y[0][0] + x[0][1] * y[1][0],
            x[0][0] * y[0][1] + x[0][1] * y[1][1],
        ],
        [
            x[1][0] * y[0][0] + x[1][1] * y[1][0],
            x[1][0] * y[0][1] + x[1][1] * y[1][1],
        ],
    ]
}

/// Fixed points of `t -> (a t + b)/(c t + d)` on the real line as
/// (repelling, attracting); `None` stands for infinity.
pub fn fixed_points(m: [[f64; 2]; 2]) -> (Option<f64>, Option<f64>) {
    let [[a, b], [c, d]] = m;
    if c == 0.0 {
        let finite = b / (d - a);
        return if a.abs() > d.abs() {
            (Some(finite), None)
        } else {
            (None, Some(finite))
        };
    }
    let disc = ((a - d) * (a - d) + 4.0 * b * c).sqrt();
    let t1 = (a - d + disc) / (2.0 * c);
    let t2 = (a - d - disc) / (2.0 * c);
    // The attracting point has derivative 1/(c t + d)^2 below one.
    if (c * t1 + d).abs() > (c * t2 + d).abs() {
        (Some(t2), Some(t1))
    } else {
        (Some(t1), Some(t2))
    }
}

/// Disk angle of a real boundary point (or infinity) via the Cayley map.
pub fn disk_angle(t: Option<f64>) -> f64 {
    match t {
        None => 0.0,
        Some(t) => {
            let (re, im) = ((t * t - 1.0) / (t * t + 1.0), -2.0 * t / (t * t + 1.0));
            im.atan2(re).rem_euclid(std::f64::consts::TAU)
        }
    }
}

pub fn angle_gap(x: f64, y: f64) -> f64 {
    let d = (x - y).rem_euclid(std::f64::consts::TAU);
    d.min(std::f64::consts::TAU - d)
}
