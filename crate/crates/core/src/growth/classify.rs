//! Windowed polynomial-vs-exponential classification.
//!
//! Both models regress `ln v(r)`: against `ln r` for polynomial growth (slope
//! = degree) and against `r` for exponential growth (slope = rate). The model
//! whose RMS residual is smaller by more than `margin` wins; otherwise the
//! verdict is inconclusive.

use serde::{Deserialize, Serialize};

use super::series::GrowthSeries;
use crate::error::{Error, Result};

/// Below this RMS residual a fit counts as exact.
const EXACT_FIT: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClassifierParams {
    pub min_points: usize,
    pub margin: f64,
    /// Inclusive radius window; defaults to the upper half of the radii.
    pub window: Option<(u32, u32)>,
}

impl Default for ClassifierParams {
    fn default() -> Self {
        ClassifierParams {
            min_points: 4,
            margin: 2.0,
            window: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum GrowthKind {
    Polynomial,
    Exponential,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthVerdict {
    pub kind: GrowthKind,
    /// Degree for polynomial verdicts, rate for exponential ones.
    pub estimate: Option<f64>,
    pub degree_fit: f64,
    pub rate_fit: f64,
    pub polynomial_residual: f64,
    pub exponential_residual: f64,
    pub window: (u32, u32),
    pub points: usize,
}

/// Least-squares slope and RMS residual.
fn fit(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let sse: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let r = y - (slope * x + intercept);
            r * r
        })
        .sum();
    (slope, (sse / n).sqrt())
}

pub fn classify_growth(series: &GrowthSeries, params: &ClassifierParams) -> Result<GrowthVerdict> {
    let needed = params.min_points.max(3);
    let (lo, hi) = match (params.window, series.min_radius(), series.max_radius()) {
        (Some(w), _, _) => w,
        (None, Some(a), Some(b)) => ((a + b + 1) / 2, b),
        _ => return Err(Error::TooFewPoints { needed, got: 0 }),
    };
    let pts: Vec<(f64, f64)> = series
        .points()
        .iter()
        .filter(|&&(r, v)| r >= lo && r <= hi && r >= 1 && v >= 1)
        .map(|&(r, v)| (f64::from(r), (v as f64).ln()))
        .collect();
    if pts.len() < needed {
        return Err(Error::TooFewPoints {
            needed,
            got: pts.len(),
        });
    }
    let ys: Vec<f64> = pts.iter().map(|p| p.1).collect();
    let rs: Vec<f64> = pts.iter().map(|p| p.0).collect();
    let log_rs: Vec<f64> = rs.iter().map(|r| r.ln()).collect();
    let (degree, poly_res) = fit(&log_rs, &ys);
    let (rate, exp_res) = fit(&rs, &ys);

    let (kind, estimate) = if poly_res.max(exp_res) < EXACT_FIT {
        // both models exact: only a constant series fits both
        if degree.abs() < 1e-9 {
            (GrowthKind::Polynomial, Some(0.0))
        } else {
            (GrowthKind::Inconclusive, None)
        }
    } else if exp_res > params.margin * poly_res {
        (GrowthKind::Polynomial, Some(degree))
    } else if poly_res > params.margin * exp_res {
        (GrowthKind::Exponential, Some(rate))
    } else {
        (GrowthKind::Inconclusive, None)
    };
    Ok(GrowthVerdict {
        kind,
        estimate,
        degree_fit: degree,
        rate_fit: rate,
        polynomial_residual: poly_res,
        exponential_residual: exp_res,
        window: (lo, hi),
        points: pts.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn classify(series: &GrowthSeries) -> GrowthVerdict {
        classify_growth(series, &ClassifierParams::default()).unwrap()
    }

    #[test]
    fn linear_is_polynomial_degree_one() {
        let s = GrowthSeries::from_fn(8..=64, |r| 2 * u64::from(r) + 1).unwrap();
        let v = classify(&s);
        assert_eq!(v.kind, GrowthKind::Polynomial);
        assert!((v.estimate.unwrap() - 1.0).abs() < 0.2);
        assert_eq!(v.window, (36, 64));
    }

    #[test]
    fn free_group_is_exponential() {
        let s = GrowthSeries::from_fn(3..=10, |r| 2 * 3u64.pow(r) - 1).unwrap();
        let v = classify(&s);
        assert_eq!(v.kind, GrowthKind::Exponential);
        let rate = v.estimate.unwrap();
        assert!((rate - 3f64.ln()).abs() < 0.1 * 3f64.ln());
    }

    #[test]
    fn constant_is_degree_zero() {
        let s = GrowthSeries::from_fn(0..=20, |_| 1).unwrap();
        let v = classify(&s);
        assert_eq!(v.kind, GrowthKind::Polynomial);
        assert_eq!(v.estimate, Some(0.0));
    }

    #[test]
    fn quadratic_degree() {
        let s = GrowthSeries::from_fn(0..=80, |r| {
            let r = u64::from(r);
            2 * r * r + 2 * r + 1
        })
        .unwrap();
        let v = classify(&s);
        assert_eq!(v.kind, GrowthKind::Polynomial);
        assert!((v.estimate.unwrap() - 2.0).abs() < 0.2);
    }

    #[test]
    fn too_few_points() {
        let s = GrowthSeries::from_fn(0..=3, |r| u64::from(r) + 1).unwrap();
        assert!(matches!(
            classify_growth(&s, &ClassifierParams::default()),
            Err(Error::TooFewPoints { needed: 4, .. })
        ));
    }

    #[test]
    fn ambiguous_data_is_inconclusive() {
        // a wide margin forces an inconclusive verdict on a clean series
        let s = GrowthSeries::from_fn(8..=64, |r| 2 * u64::from(r) + 1).unwrap();
        let params = ClassifierParams {
            margin: 1e6,
            ..ClassifierParams::default()
        };
        let v = classify_growth(&s, &params).unwrap();
        assert_eq!(v.kind, GrowthKind::Inconclusive);
        assert_eq!(v.estimate, None);
    }

    proptest! {
        #[test]
        fn rescaling_preserves_verdict(k in 1u64..1000, exponential in any::<bool>()) {
            let s = if exponential {
                GrowthSeries::from_fn(0..=12, |r| 2 * 3u64.pow(r) - 1).unwrap()
            } else {
                GrowthSeries::from_fn(0..=40, |r| u64::from(r * r + 1)).unwrap()
            };
            let a = classify(&s);
            let b = classify(&s.scaled(k));
            prop_assert_eq!(a.kind, b.kind);
            prop_assert!((a.estimate.unwrap() - b.estimate.unwrap()).abs() < 1e-9);
        }

        #[test]
        fn doubling_spheres_classify_exponential(q in 2.0f64..3.0, depth in 8usize..=14) {
            let mut sphere = 1.0f64;
            let mut total = 1u64;
            let mut counts = vec![1usize];
            for _ in 0..depth {
                sphere = (sphere * q).ceil();
                total += sphere as u64;
                counts.push(total as usize);
            }
            let v = classify(&GrowthSeries::from_counts(&counts).unwrap());
            prop_assert_eq!(v.kind, GrowthKind::Exponential);
        }
    }
}
