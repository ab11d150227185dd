//! Backpressure offloading: pressure indices over per-vessel graphs and the
//! layer-wise vessel, UAV and HAP decisions.

pub mod graph;
pub mod handover;

use serde::Serialize;

pub use graph::{DistanceScope, GraphNode, GraphRates, OffloadGraph};
pub use handover::{joint_satellite_state, JointSatelliteState};

use crate::model::Server;
use crate::queueing::Indicators;
use crate::scalar::Real;

/// Pressure indices `J = Q + w^min` of one vessel's data, indexed by queue column.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PressureState<S> {
    pub index: Vec<S>,
    /// `ΔJ_{v→i}` for each UAV then the BS (unclamped).
    pub to_access: Vec<S>,
    /// `ΔJ_{v,u→h}` for each UAV (clamped at zero).
    pub uav_to_hap: Vec<S>,
    /// `ΔJ_{v,h→s}` (clamped at zero).
    pub hap_to_sat: S,
}

fn diff<S: Real>(a: S, b: S) -> S {
    if a.is_finite() && b.is_finite() {
        a - b
    } else if b.is_infinite() {
        S::neg_infinity()
    } else {
        S::infinity()
    }
}

impl<S: Real> PressureState<S> {
    /// Pressures from a solved graph and the vessel's backlog row (satellite entry
    /// already replaced by the blended backlog when the handover window is active).
    pub fn new(graph: &OffloadGraph<S>, backlog: &[S]) -> Self {
        let nu = graph.num_uavs;
        let index: Vec<S> = backlog
            .iter()
            .zip(&graph.to_sink)
            .map(|(&q, &w)| q + w)
            .collect();
        let j0 = index[0];
        let to_access = (0..nu)
            .map(Server::Uav)
            .chain([Server::Bs])
            .map(|s| diff(j0, index[s.column(nu)]))
            .collect();
        let jh = index[Server::Hap.column(nu)];
        let uav_to_hap = (0..nu)
            .map(|k| clamp_pd(diff(index[Server::Uav(k).column(nu)], jh)))
            .collect();
        let hap_to_sat = clamp_pd(diff(jh, index[Server::Sat.column(nu)]));
        Self {
            index,
            to_access,
            uav_to_hap,
            hap_to_sat,
        }
    }
}

fn clamp_pd<S: Real>(x: S) -> S {
    if x.is_nan() {
        S::zero()
    } else {
        x.max(S::zero())
    }
}

/// Index of the largest score; ties and all-undefined inputs go to the lowest index.
pub fn argmax_lowest<S: Real>(scores: &[S]) -> Option<usize> {
    let mut best: Option<(usize, S)> = None;
    for (i, &s) in scores.iter().enumerate() {
        if s.is_nan() {
            continue;
        }
        match best {
            Some((_, b)) if s <= b => {}
            _ => best = Some((i, s)),
        }
    }
    best.map(|(i, _)| i)
        .or(if scores.is_empty() { None } else { Some(0) })
}

/// Vessel association score `ΔJ_{v→i} r_{v,i}`; unusable links score `−∞`.
pub fn access_scores<S: Real>(pressure: &PressureState<S>, access_rates: &[S]) -> Vec<S> {
    pressure
        .to_access
        .iter()
        .zip(access_rates)
        .map(|(&dj, &r)| {
            if r > S::zero() && dj.is_finite() {
                dj * r
            } else {
                S::neg_infinity()
            }
        })
        .collect()
}

/// Chooses the UAV or BS a vessel offloads to this slot (exactly one).
pub fn vessel_decision<S: Real>(pressure: &PressureState<S>, access_rates: &[S]) -> Server {
    let nu = access_rates.len() - 1;
    match argmax_lowest(&access_scores(pressure, access_rates)) {
        Some(k) if k < nu => Server::Uav(k),
        _ => Server::Bs,
    }
}

/// Chooses which vessel a relay forwards, given each vessel's clamped pressure
/// differential and whether the relay holds any of that vessel's data.
pub fn relay_decision<S: Real>(differentials: &[S], holds_data: &[bool]) -> Option<usize> {
    let mut best: Option<(usize, S)> = None;
    for (v, (&pd, &held)) in differentials.iter().zip(holds_data).enumerate() {
        if !held || !(pd > S::zero()) {
            continue;
        }
        match best {
            Some((_, b)) if pd <= b => {}
            _ => best = Some((v, pd)),
        }
    }
    best.map(|(v, _)| v)
}

/// Everything the scheduler observes in one slot.
#[derive(Debug, Clone)]
pub struct SlotView<S> {
    /// Per-vessel graph rates (satellite compute edge already uses `F̃_s / C_v` when blending).
    pub rates: Vec<GraphRates<S>>,
    /// Per-vessel backlog rows, satellite entry already blended.
    pub backlog: Vec<Vec<S>>,
    pub scope: DistanceScope,
}

/// Output of one scheduling pass.
#[derive(Debug, Clone, PartialEq)]
pub struct Schedule<S> {
    pub indicators: Indicators,
    pub graphs: Vec<OffloadGraph<S>>,
    pub pressures: Vec<PressureState<S>>,
    /// Number of candidate scores evaluated.
    pub evaluations: usize,
}

/// Layer-wise decisions for all vessels, UAVs and the HAP.
pub fn schedule_slot<S: Real>(view: &SlotView<S>) -> Schedule<S> {
    let nv = view.rates.len();
    let nu = view.rates.first().map_or(0, |r| r.num_uavs());
    let graphs: Vec<OffloadGraph<S>> = view
        .rates
        .iter()
        .map(|r| OffloadGraph::build(r, view.scope))
        .collect();
    let pressures: Vec<PressureState<S>> = graphs
        .iter()
        .zip(&view.backlog)
        .map(|(g, q)| PressureState::new(g, q))
        .collect();
    let mut evaluations = 0;
    let targets = pressures
        .iter()
        .zip(&view.rates)
        .map(|(p, r)| {
            evaluations += r.access.len();
            vessel_decision(p, &r.access)
        })
        .collect();
    let uav_relay = (0..nu)
        .map(|k| {
            evaluations += nv;
            let col = Server::Uav(k).column(nu);
            let pds: Vec<S> = pressures.iter().map(|p| p.uav_to_hap[k]).collect();
            let held: Vec<bool> = view.backlog.iter().map(|q| q[col] > S::zero()).collect();
            relay_decision(&pds, &held)
        })
        .collect();
    evaluations += nv;
    let hap_col = Server::Hap.column(nu);
    let pds: Vec<S> = pressures.iter().map(|p| p.hap_to_sat).collect();
    let held: Vec<bool> = view
        .backlog
        .iter()
        .map(|q| q[hap_col] > S::zero())
        .collect();
    let hap_relay = relay_decision(&pds, &held);
    Schedule {
        indicators: Indicators {
            targets,
            uav_relay,
            hap_relay,
        },
        graphs,
        pressures,
        evaluations,
    }
}
