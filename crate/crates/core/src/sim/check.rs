//! Standalone checker for the per-slot constraints.
//!
//! Rates and limits are recomputed here from raw geometry and capacities rather
//! than taken from the optimizers, so a bookkeeping error in the engine shows up
//! as a violation.

use serde::Serialize;

use crate::model::{Server, Vec2};
use crate::queueing::{QueueMatrix, SlotFlows};
use crate::scalar::Amount;
use crate::sim::state::{NetworkState, Topology};

/// Decision variables of one slot.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SlotDecision {
    pub slot: u64,
    pub indicators: crate::queueing::Indicators,
    /// `B_{v,k}` in Hz over the `U + 1` access nodes.
    pub bandwidth: Vec<Vec<f64>>,
    /// `F_{v,i}` in cycles, indexed `[v][column − 1]`.
    pub compute_cycles: Vec<Vec<f64>>,
    /// `W_u(n)`.
    pub positions: Vec<Vec2<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub slot: u64,
    pub constraint: &'static str,
    pub detail: String,
}

const REL: f64 = 1e-9;

fn exceeds(x: f64, limit: f64) -> bool {
    x > limit * (1.0 + REL) + 1e-6
}

fn access_rate_bits(
    topo: &Topology,
    state: &NetworkState,
    positions: &[Vec2<f64>],
    v: usize,
    k: usize,
    b: f64,
) -> f64 {
    if b <= 0.0 {
        return 0.0;
    }
    let vessel = state.vessels[v].position;
    let (xy, h) = if k < topo.num_uavs {
        (positions[k], topo.uav_height)
    } else {
        (topo.bs.position, topo.bs.height)
    };
    let dx = xy.x - vessel.x;
    let dy = xy.y - vessel.y;
    let gain =
        topo.fading.ref_path_loss / (h * h + dx * dx + dy * dy).max(1e-6) * state.small_scale[v][k];
    let snr = topo.vessel_power * gain / (topo.fading.noise_psd * b);
    b * (1.0 + snr).log2() * topo.tau
}

/// Checks one slot. `state` carries this slot's capacities and fading; `previous`
/// is `W_u(n−1)`; `queues` is the start-of-slot backlog.
#[allow(clippy::too_many_arguments)]
pub fn check_slot<A: Amount>(
    topo: &Topology,
    state: &NetworkState,
    previous: &[Vec2<f64>],
    densities: &[f64],
    queues: &QueueMatrix<A>,
    decision: &SlotDecision,
    flows: &SlotFlows<A>,
) -> Vec<Violation> {
    let slot = decision.slot;
    let nv = topo.num_vessels;
    let nu = topo.num_uavs;
    let mut out = Vec::new();
    let mut fail = |constraint: &'static str, detail: String| {
        out.push(Violation {
            slot,
            constraint,
            detail,
        })
    };
    let ind = &decision.indicators;

    // (1a)-(1b): one access target per vessel, relays pick at most one valid vessel
    if ind.targets.len() != nv {
        fail(
            "1b",
            format!("{} targets for {nv} vessels", ind.targets.len()),
        );
        return out;
    }
    for (v, t) in ind.targets.iter().enumerate() {
        match t {
            Server::Uav(k) if *k < nu => {}
            Server::Bs => {}
            other => fail("1b", format!("vessel {v} targets {other:?}")),
        }
    }
    for (k, r) in ind.uav_relay.iter().enumerate() {
        if let Some(v) = r {
            if *v >= nv {
                fail("1a", format!("UAV {k} relays unknown vessel {v}"));
            }
        }
    }
    if let Some(v) = ind.hap_relay {
        if v >= nv {
            fail("1a", format!("HAP relays unknown vessel {v}"));
        }
    }

    // (1c)-(1d): bandwidth
    for k in 0..=nu {
        let mut sum = 0.0;
        for v in 0..nv {
            let b = decision.bandwidth[v][k];
            if b < 0.0 || b.is_nan() {
                fail("1d", format!("B[{v}][{k}] = {b}"));
            }
            let served = topo.access_index(ind.targets[v]) == k;
            if !served && b != 0.0 {
                fail(
                    "1d",
                    format!("vessel {v} holds {b} Hz at unserving node {k}"),
                );
            }
            sum += b;
        }
        if exceeds(sum, state.bandwidth[k]) {
            fail(
                "1c",
                format!("node {k} allocates {sum} Hz of {}", state.bandwidth[k]),
            );
        }
    }

    // (1e)-(1h): transmissions
    for v in 0..nv {
        let sent = flows.access_bits[v].to_f64();
        let k = topo.access_index(ind.targets[v]);
        let cap = access_rate_bits(
            topo,
            state,
            &decision.positions,
            v,
            k,
            decision.bandwidth[v][k],
        );
        if exceeds(sent, cap) {
            fail(
                "1e",
                format!("vessel {v} sends {sent} bits over a {cap}-bit link"),
            );
        }
        if exceeds(sent, queues.local(v).to_f64()) {
            fail(
                "1e",
                format!("vessel {v} sends {sent} bits holding {}", queues.local(v)),
            );
        }
    }
    for (k, r) in flows.uav_relay.iter().enumerate() {
        if let Some((v, bits)) = *r {
            if ind.uav_relay[k] != Some(v) {
                fail(
                    "1a",
                    format!("UAV {k} relays vessel {v} without an indicator"),
                );
            }
            let cap = state.u2h_bits(topo, k, &decision.positions).unwrap_or(0.0);
            let held = queues.at(v, Server::Uav(k)).to_f64();
            if exceeds(bits.to_f64(), cap.min(held)) {
                fail(
                    "1h",
                    format!("UAV {k} relays {bits} bits (cap {cap}, held {held})"),
                );
            }
        }
    }
    if let Some((v, bits)) = flows.hap_relay {
        if ind.hap_relay != Some(v) {
            fail("1a", format!("HAP relays vessel {v} without an indicator"));
        }
        let cap = state.h2s_bits(topo).unwrap_or(0.0);
        let held = queues.at(v, Server::Hap).to_f64();
        if exceeds(bits.to_f64(), cap.min(held)) {
            fail(
                "1h",
                format!("HAP relays {bits} bits (cap {cap}, held {held})"),
            );
        }
    }

    // (1f)-(1g), (11a)-(11b): computation
    for server in Server::all(nu) {
        let c = server.column(nu) - 1;
        let mut used = 0.0;
        for v in 0..nv {
            let f = decision.compute_cycles[v][c];
            let done = flows.compute[v][c].to_f64();
            let received = if matches!(server, Server::Uav(_) | Server::Bs) {
                if ind.targets[v] == server {
                    flows.access_bits[v].to_f64()
                } else {
                    0.0
                }
            } else if server == Server::Hap {
                flows
                    .uav_relay
                    .iter()
                    .flatten()
                    .filter(|(w, _)| *w == v)
                    .map(|(_, b)| b.to_f64())
                    .sum()
            } else {
                flows
                    .hap_relay
                    .filter(|(w, _)| *w == v)
                    .map_or(0.0, |(_, b)| b.to_f64())
            };
            let relayed = match server {
                Server::Uav(k) => flows.uav_relay[k]
                    .filter(|(w, _)| *w == v)
                    .map_or(0.0, |(_, b)| b.to_f64()),
                Server::Hap => flows
                    .hap_relay
                    .filter(|(w, _)| *w == v)
                    .map_or(0.0, |(_, b)| b.to_f64()),
                _ => 0.0,
            };
            let available = queues.at(v, server).to_f64() + received - relayed;
            let tag = if relayed > 0.0 { "1f" } else { "1g" };
            if exceeds(done, available.max(0.0)) {
                fail(
                    tag,
                    format!("vessel {v} computes {done} bits at {server:?} holding {available}"),
                );
            }
            if exceeds(done * densities[v], f) {
                fail(
                    tag,
                    format!("vessel {v} computes {done} bits at {server:?} with {f} cycles"),
                );
            }
            if f < 0.0 || f.is_nan() {
                fail("11b", format!("F[{v}][{server:?}] = {f}"));
            }
            if exceeds(f, densities[v] * available.max(0.0)) {
                fail(
                    "11b",
                    format!(
                        "vessel {v} granted {f} cycles at {server:?}, needs at most {}",
                        densities[v] * available
                    ),
                );
            }
            used += f;
        }
        if exceeds(used, state.compute[c]) {
            fail(
                "11a",
                format!("{server:?} grants {used} of {} cycles", state.compute[c]),
            );
        }
    }

    // (1i)-(1j): UAV motion
    for (k, (now, before)) in decision.positions.iter().zip(previous).enumerate() {
        let d = now.dist(*before);
        if exceeds(d, topo.uav_max_step) {
            fail(
                "1i",
                format!("UAV {k} moves {d} m (limit {})", topo.uav_max_step),
            );
        }
    }
    for a in 0..decision.positions.len() {
        for b in a + 1..decision.positions.len() {
            let d = decision.positions[a].dist(decision.positions[b]);
            if d < topo.safe_distance * (1.0 - REL) {
                fail("1j", format!("UAVs {a} and {b} are {d} m apart"));
            }
        }
    }
    out
}
