use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use super::series::GrowthSeries;

/// Constants `(a, b, c, d)` of the domination `u(r) ≤ a·v(b·r + c) + d`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Constants {
    #[serde(with = "crate::text")]
    pub a: BigRational,
    #[serde(with = "crate::text")]
    pub b: BigRational,
    #[serde(with = "crate::text")]
    pub c: BigRational,
    #[serde(with = "crate::text")]
    pub d: BigRational,
}

impl Constants {
    pub fn integers(a: i64, b: i64, c: i64, d: i64) -> Constants {
        let q = |n: i64| BigRational::from_integer(n.into());
        Constants {
            a: q(a),
            b: q(b),
            c: q(c),
            d: q(d),
        }
    }

    /// Constants of the composed domination: if `u ≼ v` by `self` and
    /// `v ≼ w` by `then`, then `u ≼ w` by the result.
    pub fn compose(&self, then: &Constants) -> Constants {
        Constants {
            a: &self.a * &then.a,
            b: &self.b * &then.b,
            c: &then.b * &self.c + &then.c,
            d: &self.a * &then.d + &self.d,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "kebab-case")]
pub enum DominationOutcome {
    /// Held at every radius whose transformed radius lies in range.
    Holds { checked: usize },
    Fails {
        radius: u32,
        lhs: u64,
        #[serde(with = "crate::text")]
        rhs: BigRational,
    },
    /// No radius of `u` maps into the range of `v`.
    Inapplicable,
}

impl DominationOutcome {
    pub fn holds(&self) -> bool {
        matches!(self, DominationOutcome::Holds { .. })
    }
}

/// Checks `u(r) ≤ a·v(b·r + c) + d` at every radius `r` of `u` for which
/// `b·r + c` lies within the radii of `v`. `v` is read by step
/// interpolation at `⌊b·r + c⌋`; other radii are skipped.
pub fn check_domination(u: &GrowthSeries, v: &GrowthSeries, k: &Constants) -> DominationOutcome {
    let (Some(lo), Some(hi)) = (v.min_radius(), v.max_radius()) else {
        return DominationOutcome::Inapplicable;
    };
    let lo = BigRational::from_integer(lo.into());
    let hi = BigRational::from_integer(hi.into());
    let mut checked = 0;
    for &(r, value) in u.points() {
        let t = &k.b * BigRational::from_integer(r.into()) + &k.c;
        if t < lo || t > hi {
            continue;
        }
        let at = t.floor().to_integer().to_u32().expect("within v's radii");
        let rhs = &k.a * BigRational::from_integer(v.value_at(at).unwrap_or(0).into()) + &k.d;
        let lhs = BigRational::from_integer(BigInt::from(value));
        if lhs > rhs {
            return DominationOutcome::Fails {
                radius: r,
                lhs: value,
                rhs,
            };
        }
        checked += 1;
    }
    if checked == 0 {
        DominationOutcome::Inapplicable
    } else {
        DominationOutcome::Holds { checked }
    }
}

/// Candidate values for each constant; searched in lexicographic order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DominationGrid {
    pub a: Vec<BigRational>,
    pub b: Vec<BigRational>,
    pub c: Vec<BigRational>,
    pub d: Vec<BigRational>,
}

impl Default for DominationGrid {
    fn default() -> Self {
        let q = |xs: &[i64]| -> Vec<BigRational> {
            xs.iter().map(|&n| BigRational::from_integer(n.into())).collect()
        };
        DominationGrid {
            a: q(&[1, 2, 3, 4, 8]),
            b: q(&[1, 2, 3, 4, 8]),
            c: q(&[0, 1, 2, 4, 8]),
            d: q(&[0, 1, 2, 4, 8]),
        }
    }
}

/// First grid tuple for which [`check_domination`] holds.
pub fn search_domination(
    u: &GrowthSeries,
    v: &GrowthSeries,
    grid: &DominationGrid,
) -> Option<Constants> {
    let mut a_sorted = grid.a.clone();
    let mut b_sorted = grid.b.clone();
    let mut c_sorted = grid.c.clone();
    let mut d_sorted = grid.d.clone();
    for xs in [&mut a_sorted, &mut b_sorted, &mut c_sorted, &mut d_sorted] {
        xs.sort();
        xs.dedup();
    }
    for a in &a_sorted {
        for b in &b_sorted {
            for c in &c_sorted {
                for d in &d_sorted {
                    let k = Constants {
                        a: a.clone(),
                        b: b.clone(),
                        c: c.clone(),
                        d: d.clone(),
                    };
                    if check_domination(u, v, &k).holds() {
                        return Some(k);
                    }
                }
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn linear(k: u64, m: u64, radii: std::ops::RangeInclusive<u32>) -> GrowthSeries {
        GrowthSeries::from_fn(radii, |r| k * u64::from(r) + m).unwrap()
    }

    fn exponential() -> GrowthSeries {
        GrowthSeries::from_fn(0..=10, |r| 2 * 3u64.pow(r) - 1).unwrap()
    }

    #[test]
    fn reflexive() {
        let s = exponential();
        assert_eq!(
            check_domination(&s, &s, &Constants::integers(1, 1, 0, 0)),
            DominationOutcome::Holds { checked: 11 }
        );
        assert_eq!(
            search_domination(&s, &s, &DominationGrid::default()),
            Some(Constants::integers(1, 1, 0, 0))
        );
    }

    #[test]
    fn linear_vs_linear() {
        let u = linear(2, 1, 0..=50);
        let v = linear(1, 1, 0..=50);
        assert!(check_domination(&u, &v, &Constants::integers(2, 1, 0, 0)).holds());
        assert!(!check_domination(&u, &v, &Constants::integers(1, 1, 0, 0)).holds());
        let found = search_domination(&u, &v, &DominationGrid::default()).unwrap();
        assert_eq!(found, Constants::integers(1, 2, 0, 0));
    }

    #[test]
    fn rational_constants() {
        let u = linear(1, 0, 0..=20);
        let v = linear(2, 0, 0..=20);
        let half = BigRational::new(1.into(), 2.into());
        let k = Constants {
            a: half,
            ..Constants::integers(1, 1, 0, 0)
        };
        assert!(check_domination(&u, &v, &k).holds());
    }

    #[test]
    fn exponential_does_not_dominate_linear() {
        // v is tabulated far enough that every grid tuple reaches r ≤ 10
        let u = exponential();
        let v = linear(2, 1, 0..=88);
        let outcome = check_domination(&u, &v, &Constants::integers(8, 8, 8, 8));
        assert!(matches!(outcome, DominationOutcome::Fails { .. }));
        assert_eq!(search_domination(&u, &v, &DominationGrid::default()), None);
    }

    #[test]
    fn out_of_range_is_inapplicable() {
        let u = linear(1, 1, 0..=3);
        let v = linear(1, 1, 0..=5);
        let outcome = check_domination(&u, &v, &Constants::integers(1, 1, 8, 0));
        assert_eq!(outcome, DominationOutcome::Inapplicable);
        // only r = 0, 1 land in range when c = 4
        assert_eq!(
            check_domination(&u, &v, &Constants::integers(1, 1, 4, 0)),
            DominationOutcome::Holds { checked: 2 }
        );
    }

    fn series_strategy() -> impl Strategy<Value = Vec<u64>> {
        proptest::collection::vec(0u64..5, 1..=800).prop_map(|steps| {
            steps
                .iter()
                .scan(1u64, |acc, s| {
                    let out = *acc;
                    *acc += s;
                    Some(out)
                })
                .collect()
        })
    }

    proptest! {
        #[test]
        fn transitive_on_checked_windows(
            w in series_strategy(),
            k1 in (1i64..4, 1i64..4, 0i64..4, 0i64..4),
            k2 in (1i64..4, 1i64..4, 0i64..4, 0i64..4),
            slack in 0u64..3,
        ) {
            let w = GrowthSeries::from_counts(&w.iter().map(|&x| x as usize).collect::<Vec<_>>()).unwrap();
            let first = Constants::integers(k1.0, k1.1, k1.2, k1.3);
            let second = Constants::integers(k2.0, k2.1, k2.2, k2.3);
            // v and u are built to satisfy both dominations
            let wmax = w.max_radius().unwrap();
            let eval = |s: &GrowthSeries, k: &Constants, r: u32| -> Option<u64> {
                let t = (&k.b * BigRational::from_integer(r.into()) + &k.c).to_integer().to_u32()?;
                if t > s.max_radius()? {
                    return None;
                }
                (&k.a * BigRational::from_integer(s.value_at(t)?.into()) + &k.d).to_integer().to_u64()
            };
            let vr: Vec<(u32, u64)> = (0..=wmax)
                .map_while(|r| eval(&w, &second, r).map(|x| (r, x.saturating_sub(slack))))
                .collect();
            prop_assume!(!vr.is_empty());
            let v = GrowthSeries::new(
                vr.iter().scan(0u64, |m, &(r, x)| { *m = (*m).max(x); Some((r, *m)) }).collect()
            ).unwrap();
            let ur: Vec<(u32, u64)> = (0..=v.max_radius().unwrap())
                .map_while(|r| eval(&v, &first, r).map(|x| (r, x.saturating_sub(slack))))
                .collect();
            prop_assume!(!ur.is_empty());
            let u = GrowthSeries::new(
                ur.iter().scan(0u64, |m, &(r, x)| { *m = (*m).max(x); Some((r, *m)) }).collect()
            ).unwrap();
            let uv = check_domination(&u, &v, &first);
            let vw = check_domination(&v, &w, &second);
            prop_assume!(uv.holds() && vw.holds());
            let uw = check_domination(&u, &w, &first.compose(&second));
            prop_assert!(!matches!(uw, DominationOutcome::Fails { .. }), "{:?}", uw);
        }
    }
}
