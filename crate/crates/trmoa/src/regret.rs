//! The two-sided regret model.
//!
//! For an advertiser with demand `d > 0`, payment `p`, and achieved influence
//! `a`, the provider's regret is
//!
//! ```text
//! R = p * (1 - delta * a / d)    if d > a      (unsatisfied)
//! R = p * (a - d) / d            otherwise     (excessive; zero at a == d)
//! ```
//!
//! The branch condition is the strict comparison `d > a` on the computed
//! influence value, with no epsilon band: the objective is deliberately
//! discontinuous at `a == d` whenever `delta < 1`, and widening the boundary
//! would silently change it.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::influence::{influence, ExposureIndex};
use crate::model::{Allocation, Instance, SlotId, TagId};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RegretError {
    #[error("demand must be positive, got {0}")]
    NonPositiveDemand(f64),
    #[error("penalty ratio must lie in [0, 1], got {0}")]
    InvalidDelta(f64),
    #[error("allocation has {got} advertiser entries, instance has {want}")]
    AdvertiserCountMismatch { got: usize, want: usize },
}

/// Penalty ratio for unsatisfied demand.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegretParams {
    pub delta: f64,
}

impl RegretParams {
    pub fn new(delta: f64) -> Result<Self, RegretError> {
        if !(0.0..=1.0).contains(&delta) || delta.is_nan() {
            return Err(RegretError::InvalidDelta(delta));
        }
        Ok(RegretParams { delta })
    }
}

impl Default for RegretParams {
    fn default() -> Self {
        RegretParams { delta: 0.5 }
    }
}

/// Which side of the regret function an advertiser landed on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegretKind {
    Unsatisfied,
    Excessive,
    Zero,
}

impl RegretKind {
    pub fn as_str(self) -> &'static str {
        match self {
            RegretKind::Unsatisfied => "unsatisfied",
            RegretKind::Excessive => "excessive",
            RegretKind::Zero => "zero",
        }
    }
}

/// Core evaluation, assuming `demand > 0`.
#[inline]
pub(crate) fn eval(achieved: f64, demand: f64, payment: f64, delta: f64) -> (f64, RegretKind) {
    if demand > achieved {
        (payment * (1.0 - delta * achieved / demand), RegretKind::Unsatisfied)
    } else if achieved > demand {
        (payment * (achieved - demand) / demand, RegretKind::Excessive)
    } else {
        (0.0, RegretKind::Zero)
    }
}

/// Regret of a single advertiser given its achieved influence.
pub fn advertiser_regret(
    achieved: f64,
    demand: f64,
    payment: f64,
    params: &RegretParams,
) -> Result<(f64, RegretKind), RegretError> {
    if !(demand > 0.0) {
        return Err(RegretError::NonPositiveDemand(demand));
    }
    Ok(eval(achieved, demand, payment, params.delta))
}

/// One advertiser's line in a [`RegretReport`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdvertiserOutcome {
    pub achieved: f64,
    pub regret: f64,
    pub kind: RegretKind,
}

/// Per-advertiser regret breakdown plus totals.
#[derive(Debug, Clone, PartialEq)]
pub struct RegretReport {
    pub per_advertiser: Vec<AdvertiserOutcome>,
    pub total: f64,
    pub excessive_total: f64,
    pub unsatisfied_total: f64,
    /// Advertisers whose achieved influence met their demand.
    pub satisfied_count: usize,
}

impl RegretReport {
    pub fn from_outcomes(per_advertiser: Vec<AdvertiserOutcome>) -> Self {
        let mut total = 0.0;
        let mut excessive_total = 0.0;
        let mut unsatisfied_total = 0.0;
        let mut satisfied_count = 0;
        for o in &per_advertiser {
            total += o.regret;
            match o.kind {
                RegretKind::Unsatisfied => unsatisfied_total += o.regret,
                RegretKind::Excessive => {
                    excessive_total += o.regret;
                    satisfied_count += 1;
                }
                RegretKind::Zero => satisfied_count += 1,
            }
        }
        RegretReport {
            per_advertiser,
            total,
            excessive_total,
            unsatisfied_total,
            satisfied_count,
        }
    }
}

/// Evaluates every advertiser's achieved influence under its refined tag set
/// and aggregates the regret. Advertisers are processed in book order so the
/// floating-point totals are reproducible.
pub fn total_regret(
    alloc: &Allocation,
    instance: &Instance,
    tag_selections: &[Vec<TagId>],
    params: &RegretParams,
    index: &ExposureIndex,
) -> Result<RegretReport, RegretError> {
    if alloc.per_adv.len() != instance.advertiser_count() {
        return Err(RegretError::AdvertiserCountMismatch {
            got: alloc.per_adv.len(),
            want: instance.advertiser_count(),
        });
    }
    let mut outcomes = Vec::with_capacity(instance.advertiser_count());
    for (i, adv) in instance.book.advertisers.iter().enumerate() {
        if !(adv.demand > 0.0) {
            return Err(RegretError::NonPositiveDemand(adv.demand));
        }
        let tags: &[TagId] = tag_selections.get(i).map(Vec::as_slice).unwrap_or(&[]);
        let slots: &BTreeSet<SlotId> = &alloc.per_adv[i].slots;
        let achieved = influence(slots.iter().copied(), tags, index, &instance.db.affinities);
        let (regret, kind) = eval(achieved, adv.demand, adv.payment, params.delta);
        outcomes.push(AdvertiserOutcome {
            achieved,
            regret,
            kind,
        });
    }
    Ok(RegretReport::from_outcomes(outcomes))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(delta: f64) -> RegretParams {
        RegretParams::new(delta).unwrap()
    }

    #[test]
    fn exact_satisfaction_is_zero_regret() {
        let (r, kind) = advertiser_regret(7.0, 7.0, 12.0, &params(0.5)).unwrap();
        assert_eq!(r, 0.0);
        assert_eq!(kind, RegretKind::Zero);
    }

    #[test]
    fn excessive_golden_value() {
        // u = 12, d = 7, achieved = 8 -> 12 * (8 - 7) / 7.
        let (r, kind) = advertiser_regret(8.0, 7.0, 12.0, &params(0.5)).unwrap();
        assert_eq!(r, 12.0 / 7.0);
        assert_eq!(kind, RegretKind::Excessive);
    }

    #[test]
    fn unsatisfied_golden_value() {
        // u = 18, d = 8, achieved = 6, delta = 0.5 -> 18 * (1 - 0.5 * 6/8).
        let (r, kind) = advertiser_regret(6.0, 8.0, 18.0, &params(0.5)).unwrap();
        assert_eq!(r, 11.25);
        assert_eq!(kind, RegretKind::Unsatisfied);
    }

    #[test]
    fn zero_achieved_forfeits_whole_payment() {
        let (r, kind) = advertiser_regret(0.0, 8.0, 18.0, &params(0.5)).unwrap();
        assert_eq!(r, 18.0);
        assert_eq!(kind, RegretKind::Unsatisfied);
    }

    #[test]
    fn zero_demand_is_rejected() {
        assert!(advertiser_regret(1.0, 0.0, 5.0, &params(0.5)).is_err());
    }

    #[test]
    fn boundary_is_discontinuous_for_delta_below_one() {
        // Just below the demand the unsatisfied branch applies and its limit
        // is u * (1 - delta) > 0; at the demand the regret is exactly 0.
        let demand = 7.0_f64;
        let below = demand.next_down();
        let (at, kind_at) = advertiser_regret(demand, demand, 12.0, &params(0.5)).unwrap();
        let (near, kind_near) = advertiser_regret(below, demand, 12.0, &params(0.5)).unwrap();
        assert_eq!(at, 0.0);
        assert_eq!(kind_at, RegretKind::Zero);
        assert_eq!(kind_near, RegretKind::Unsatisfied);
        assert!((near - 12.0 * 0.5).abs() < 1e-9, "got {near}");
    }

    #[test]
    fn delta_one_has_no_jump_from_the_left() {
        let demand = 7.0_f64;
        let below = demand.next_down();
        let (near, _) = advertiser_regret(below, demand, 12.0, &params(1.0)).unwrap();
        assert!(near > 0.0);
        assert!(near < 1e-12);
    }

    #[test]
    fn branches_are_monotone_in_achieved() {
        let p = params(0.75);
        let mut last_unsat = f64::INFINITY;
        for step in 0..=10 {
            let achieved = step as f64 * 0.99; // stays below demand 10
            let (r, _) = advertiser_regret(achieved, 10.0, 6.0, &p).unwrap();
            assert!(r <= last_unsat);
            last_unsat = r;
        }
        let mut last_exc = -1.0;
        for step in 0..=10 {
            let achieved = 10.0 + step as f64;
            let (r, _) = advertiser_regret(achieved, 10.0, 6.0, &p).unwrap();
            assert!(r >= last_exc);
            last_exc = r;
        }
    }

    #[test]
    fn report_totals_split_by_kind() {
        let report = RegretReport::from_outcomes(vec![
            AdvertiserOutcome { achieved: 6.0, regret: 0.0, kind: RegretKind::Zero },
            AdvertiserOutcome { achieved: 8.0, regret: 12.0 / 7.0, kind: RegretKind::Excessive },
            AdvertiserOutcome { achieved: 6.0, regret: 11.25, kind: RegretKind::Unsatisfied },
        ]);
        assert_eq!(report.total, 12.0 / 7.0 + 11.25);
        assert_eq!(report.excessive_total, 12.0 / 7.0);
        assert_eq!(report.unsatisfied_total, 11.25);
        assert_eq!(report.satisfied_count, 2);
    }
}
