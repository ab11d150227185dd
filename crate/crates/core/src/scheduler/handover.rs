//! Anticipatory handover: blended satellite state inside the pre-handover window.

use serde::Serialize;

use crate::model::{SatellitePair, SlotClock};
use crate::scalar::Real;

/// Satellite capacity and per-vessel backlog the scheduler should act on.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JointSatelliteState<S> {
    /// `F̃_s(n)`, cycles per slot.
    pub compute: S,
    /// `Q̃_{v,s}(n)` per vessel.
    pub backlog: Vec<S>,
    /// Weight on the current satellite, `(T_s − T(n)) / τ_hand` clamped to `[0, 1]`.
    pub weight: S,
    /// True only inside the pre-handover window.
    pub active: bool,
}

/// Weight on the serving satellite at time `now`, or `None` outside `(T_s − τ_hand, T_s]`.
pub fn window_weight(sat: &SatellitePair, now: f64) -> Option<f64> {
    if now > sat.handover_time || now <= sat.window_start() {
        return None;
    }
    Some(((sat.handover_time - now) / sat.window).clamp(0.0, 1.0))
}

/// `w a + (1 − w) b` with exact endpoints at `w = 0` and `w = 1`.
pub fn blend<S: Real>(weight: S, current: S, incoming: S) -> S {
    weight * current + (S::one() - weight) * incoming
}

/// Blended satellite compute and backlog for slot `clock`.
///
/// `current_backlog[v]` is `Q_{v,s}` and `incoming_backlog[v]` is `Q_{v,s'}`.
/// Outside the window the serving satellite's state is returned unchanged.
pub fn joint_satellite_state<S: Real>(
    sat: &SatellitePair,
    current_backlog: &[S],
    incoming_backlog: &[S],
    clock: &SlotClock,
) -> JointSatelliteState<S> {
    let current = S::lit(sat.current_compute);
    match window_weight(sat, clock.time()) {
        None => JointSatelliteState {
            compute: current,
            backlog: current_backlog.to_vec(),
            weight: S::one(),
            active: false,
        },
        Some(w) => {
            let w = S::lit(w);
            JointSatelliteState {
                compute: blend(w, current, S::lit(sat.incoming_compute)),
                backlog: current_backlog
                    .iter()
                    .zip(incoming_backlog)
                    .map(|(&a, &b)| blend(w, a, b))
                    .collect(),
                weight: w,
                active: true,
            }
        }
    }
}
