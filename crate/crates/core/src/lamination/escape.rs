use serde::Serialize;

use super::{JunctureSpec, Params, Presentation};
use crate::error::{Error, Result};
use crate::hyperbolic::translation_length_with;

/// Relative step below which consecutive lengths count as equal.
const GROWTH_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EscapeVerdict {
    Escaping,
    NonEscaping,
    Inconclusive,
}

impl EscapeVerdict {
    pub fn label(self) -> &'static str {
        match self {
            EscapeVerdict::Escaping => "escaping",
            EscapeVerdict::NonEscaping => "non-escaping",
            EscapeVerdict::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EscapeIterate {
    pub n: i64,
    pub translation_length: f64,
    pub word_length: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EscapeReport {
    pub juncture: usize,
    pub horizon: u32,
    /// +1 for forward iterates, -1 for backward.
    pub direction: i64,
    pub growth_ratio: f64,
    pub iterates: Vec<EscapeIterate>,
    pub verdict: EscapeVerdict,
    /// Why the run stopped early, if it did.
    pub note: Option<String>,
}

impl EscapeReport {
    pub fn lengths(&self) -> Vec<f64> {
        self.iterates
            .iter()
            .map(|it| it.translation_length)
            .collect()
    }
}

/// Verdict for `lengths[0..=N]`.
///
/// Escaping: every length within a factor `rho` of the first and no sustained
/// growth at the end. Non-escaping: the last length exceeds `rho` times the
/// first and the lengths strictly increase over the last `ceil(N/2)` steps.
pub fn classify_lengths(lengths: &[f64], rho: f64) -> Result<EscapeVerdict> {
    if lengths.len() < 4 {
        return Err(Error::validation(
            "escape test needs a horizon of at least 3",
        ));
    }
    if !(rho > 1.0) {
        return Err(Error::validation("growth ratio must exceed 1"));
    }
    if lengths.iter().any(|l| !(l.is_finite() && *l > 0.0)) {
        return Ok(EscapeVerdict::Inconclusive);
    }
    let n = lengths.len() - 1;
    let l0 = lengths[0];
    let tail = &lengths[n - n.div_ceil(2)..];
    let growing = tail.windows(2).all(|w| w[1] > w[0] * (1.0 + GROWTH_EPS));
    let bounded = lengths.iter().all(|&l| l <= rho * l0 && l >= l0 / rho);
    if lengths[n] > rho * l0 && growing {
        Ok(EscapeVerdict::NonEscaping)
    } else if bounded && !growing {
        Ok(EscapeVerdict::Escaping)
    } else {
        Ok(EscapeVerdict::Inconclusive)
    }
}

/// Translation lengths of `phi^(d*n)(w)` for `n = 0..=horizon`, where `d` is
/// the accumulation direction of the juncture's sign.
pub fn escape_test(
    pres: &Presentation,
    juncture: &JunctureSpec,
    juncture_id: usize,
    horizon: u32,
    params: &Params,
) -> Result<EscapeReport> {
    if horizon < 3 {
        return Err(Error::validation(
            "escape test needs a horizon of at least 3",
        ));
    }
    let direction = juncture.sign.accumulation_direction();
    let mut iterates = Vec::new();
    let mut note = None;
    let mut w = juncture.word.clone();
    for n in 0..=i64::from(horizon) {
        if n > 0 {
            match pres.automorphism.apply(&w, direction, params.word_budget) {
                Ok(next) => w = next,
                Err(e) => {
                    note = Some(format!("stopped at iterate {}: {e}", direction * n));
                    break;
                }
            }
        }
        // Translation length is a conjugacy invariant; the cyclic core avoids
        // cancellation in the trace.
        let length = pres
            .group
            .evaluate(&w.cyclic_decompose().1)
            .and_then(|m| translation_length_with(&m, params.tolerances.eps_trace));
        match length {
            Ok(l) if l.is_finite() => iterates.push(EscapeIterate {
                n: direction * n,
                translation_length: l,
                word_length: w.len(),
            }),
            Ok(_) => {
                note = Some(format!("iterate {} overflowed", direction * n));
                break;
            }
            Err(e) => {
                note = Some(format!("iterate {}: {e}", direction * n));
                break;
            }
        }
    }
    let verdict = if note.is_some() {
        EscapeVerdict::Inconclusive
    } else {
        classify_lengths(
            &iterates
                .iter()
                .map(|i| i.translation_length)
                .collect::<Vec<_>>(),
            params.growth_ratio,
        )?
    };
    Ok(EscapeReport {
        juncture: juncture_id,
        horizon,
        direction,
        growth_ratio: params.growth_ratio,
        iterates,
        verdict,
        note,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_lengths_escape() {
        let v = classify_lengths(&[2.0; 6], 1.5).unwrap();
        assert_eq!(v, EscapeVerdict::Escaping);
    }

    #[test]
    fn linear_growth_does_not_escape() {
        let lengths: Vec<f64> = (0..=10).map(|n| 1.0 + n as f64).collect();
        assert_eq!(
            classify_lengths(&lengths, 1.5).unwrap(),
            EscapeVerdict::NonEscaping
        );
    }

    #[test]
    fn noisy_short_run_is_inconclusive() {
        let v = classify_lengths(&[1.0, 0.6, 1.1, 1.2], 1.5).unwrap();
        assert_eq!(v, EscapeVerdict::Inconclusive);
    }

    #[test]
    fn early_growth_inside_the_band_is_inconclusive() {
        let v = classify_lengths(&[1.0, 1.1, 1.2, 1.4], 1.5).unwrap();
        assert_eq!(v, EscapeVerdict::Inconclusive);
    }

    #[test]
    fn growth_that_stalls_is_inconclusive() {
        let v = classify_lengths(&[1.0, 2.0, 3.0, 3.0, 3.0], 1.5).unwrap();
        assert_eq!(v, EscapeVerdict::Inconclusive);
    }

    #[test]
    fn short_horizon_is_rejected() {
        assert!(classify_lengths(&[1.0, 1.0, 1.0], 1.5).is_err());
        assert!(classify_lengths(&[1.0; 5], 1.0).is_err());
    }
}
