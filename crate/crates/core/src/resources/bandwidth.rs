use serde::Serialize;

use crate::scalar::Real;

/// A vessel served by one UAV or the BS, with its transmit power and channel gain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ServedVessel<S> {
    pub vessel: usize,
    pub power: S,
    pub gain: S,
}

/// Bandwidth (Hz) of each vessel served by one access node.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BandwidthPlan<S> {
    pub shares: Vec<(usize, S)>,
}

impl<S: Real> BandwidthPlan<S> {
    pub fn get(&self, vessel: usize) -> S {
        self.shares
            .iter()
            .find(|(v, _)| *v == vessel)
            .map_or(S::zero(), |&(_, b)| b)
    }

    pub fn total(&self) -> S {
        self.shares.iter().map(|&(_, b)| b).sum()
    }
}

/// Rate-sum maximizing split of `total` Hz: each vessel gets bandwidth in proportion
/// to `P_v h_v`, which equalizes `P_v h_v / (N0 B_v)` across the served set.
///
/// Falls back to an equal split when every `P_v h_v` is zero.
pub fn allocate_bandwidth<S: Real>(served: &[ServedVessel<S>], total: S) -> BandwidthPlan<S> {
    if served.is_empty() {
        return BandwidthPlan { shares: Vec::new() };
    }
    let weights: Vec<S> = served
        .iter()
        .map(|s| (s.power * s.gain).max(S::zero()))
        .collect();
    let sum: S = weights.iter().copied().sum();
    let shares = if sum > S::zero() && sum.is_finite() {
        served
            .iter()
            .zip(&weights)
            .map(|(s, &w)| (s.vessel, w / sum * total))
            .collect()
    } else {
        let each = total / S::lit(served.len() as f64);
        served.iter().map(|s| (s.vessel, each)).collect()
    };
    BandwidthPlan { shares }
}
