//! Adaptive greedy tag-subset selection.
//!
//! Given an advertiser's candidate tags, the selection grows a tag set
//! greedily by user-level influence `I(T') = sum_u Pr(u | T')` — no slot
//! gating is involved, only trajectory-database affinities. Each round adds
//! the tag with the largest marginal gain and stops once the best gain drops
//! below an `omega` fraction of the current influence, so negligible tags
//! never enter the set. A best gain of zero (or less) also stops the loop:
//! the fractional threshold alone would never terminate at `I(T') = 0`.

use crate::model::{AffinityTable, TagId};

/// Stopping fraction for the adaptive threshold. Must lie in `(0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TagSelectionParams {
    pub omega: f64,
}

impl TagSelectionParams {
    pub fn new(omega: f64) -> Result<Self, InvalidOmega> {
        if !(omega > 0.0 && omega < 1.0) {
            return Err(InvalidOmega(omega));
        }
        Ok(TagSelectionParams { omega })
    }
}

impl Default for TagSelectionParams {
    fn default() -> Self {
        TagSelectionParams { omega: 0.01 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
#[error("omega must lie in (0, 1), got {0}")]
pub struct InvalidOmega(pub f64);

/// Greedily selects influential tags from `candidates`, in insertion order.
///
/// Ties in the argmax break toward the smallest tag id, so the result is
/// deterministic. Duplicate candidates are considered once.
pub fn aits(
    candidates: &[TagId],
    affinities: &AffinityTable,
    params: &TagSelectionParams,
) -> Vec<TagId> {
    let mut remaining: Vec<TagId> = candidates.to_vec();
    remaining.sort_unstable();
    remaining.dedup();

    let user_count = affinities.user_count();
    let mut survival = vec![1.0_f64; user_count];
    let mut current = 0.0_f64;
    let mut selected = Vec::new();

    while !remaining.is_empty() {
        let mut best: Option<(f64, usize)> = None;
        for (i, &tag) in remaining.iter().enumerate() {
            let gain: f64 = affinities
                .users_of_tag(tag)
                .iter()
                .map(|&(u, p)| survival[u.index()] * p)
                .sum();
            // `remaining` is sorted, so the first strict maximum is already
            // the smallest tag id among ties.
            let better = match best {
                None => true,
                Some((best_gain, _)) => gain > best_gain,
            };
            if better {
                best = Some((gain, i));
            }
        }
        let (gain, at) = best.expect("remaining is non-empty");
        if gain <= 0.0 || gain < params.omega * current {
            break;
        }
        let tag = remaining.remove(at);
        for &(u, p) in affinities.users_of_tag(tag) {
            survival[u.index()] *= 1.0 - p;
        }
        current += gain;
        selected.push(tag);
    }
    selected
}
