//! Comparison schedulers: the no-handover ablation and a one-shot scheduling proxy.
//!
//! The proxy plans each task once, at arrival, from a snapshot of rates and
//! capacities: one access node, fixed split fractions along the access, HAP and
//! satellite path, an equal bandwidth share and frozen per-server compute
//! reservations. Later slots follow the frozen plan; capacity drops shrink what
//! the plan can use, capacity gains cannot be exploited, and reservations left
//! by finished vessels are not redistributed.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Server, VesselTask};
use crate::queueing::{
    clamp_compute, clamp_transmissions, Indicators, LinkBudget, QueueMatrix, SlotFlows,
};
use crate::scalar::Amount;
use crate::sim::check::SlotDecision;
use crate::sim::state::{NetworkState, Topology};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SchedulerVariant {
    Dash,
    DashNoHo,
    OneShotProxy,
}

impl SchedulerVariant {
    pub const ALL: [SchedulerVariant; 3] = [Self::Dash, Self::DashNoHo, Self::OneShotProxy];

    pub fn label(self) -> &'static str {
        match self {
            Self::Dash => "DASH",
            Self::DashNoHo => "DASH_NO_HO",
            Self::OneShotProxy => "ONE_SHOT_PROXY",
        }
    }

    /// Whether the blended satellite state is used inside the pre-handover window.
    pub fn anticipates_handover(self) -> bool {
        self == Self::Dash
    }
}

impl fmt::Display for SchedulerVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for SchedulerVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_uppercase().replace('-', "_");
        Self::ALL
            .into_iter()
            .find(|v| v.label() == norm)
            .ok_or_else(|| Error::input("variant", format!("unknown variant `{s}`")))
    }
}

/// The immutable plan of one task.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrozenPlan {
    pub vessel: usize,
    pub arrival_slot: u64,
    pub access: Server,
    /// Servers on the path: `[access]` or `[UAV, HAP, satellite]`.
    pub path: Vec<Server>,
    /// Share of `D_v` computed at each path server.
    pub fractions: Vec<f64>,
    pub bandwidth_hz: f64,
    /// `B_k` at planning time.
    pub bandwidth_snapshot: f64,
    /// Cycles per slot reserved at each path server.
    pub reservation: Vec<f64>,
    /// `F_i` at planning time for each path server.
    pub compute_snapshot: Vec<f64>,
}

/// Remaining per-task data quotas, consumed as the plan executes.
#[derive(Debug, Clone, PartialEq)]
struct Quotas<A> {
    forward_access: A,
    forward_hap: A,
    local: Vec<A>,
}

/// Split of one unit along a path in proportion to the given capacities.
pub fn split_fractions(capacities: &[f64]) -> Vec<f64> {
    let total: f64 = capacities.iter().sum();
    if total > 0.0 {
        capacities.iter().map(|c| c / total).collect()
    } else {
        let mut f = vec![0.0; capacities.len()];
        if let Some(first) = f.first_mut() {
            *first = 1.0;
        }
        f
    }
}

/// Frozen plans and their execution state for every vessel.
#[derive(Debug, Clone, Default)]
pub struct OneShotState<A> {
    plans: Vec<Option<FrozenPlan>>,
    quotas: Vec<Option<Quotas<A>>>,
}

impl<A: Amount> OneShotState<A> {
    pub fn new(num_vessels: usize) -> Self {
        Self {
            plans: vec![None; num_vessels],
            quotas: vec![None; num_vessels],
        }
    }

    pub fn plan(&self, vessel: usize) -> Option<&FrozenPlan> {
        self.plans[vessel].as_ref()
    }

    /// Plans the tasks of `arriving` vessels from the current snapshot.
    pub fn schedule_arrivals(
        &mut self,
        arriving: &[usize],
        tasks: &[VesselTask],
        amounts: &[A],
        state: &NetworkState,
        topo: &Topology,
    ) -> Result<()> {
        let plans = one_shot_schedule(arriving, tasks, state, topo, &self.plans)?;
        for (plan, &v) in plans.into_iter().zip(arriving) {
            let d = amounts[v];
            let f = &plan.fractions;
            let (forward_access, forward_hap) = if plan.path.len() == 3 {
                let fa = A::from_f64_floor(d.to_f64() * (f[1] + f[2])).min_of(d);
                let fh = A::from_f64_floor(d.to_f64() * f[2]).min_of(fa);
                (fa, fh)
            } else {
                (A::ZERO, A::ZERO)
            };
            let mut local = vec![d.saturating_sub(forward_access)];
            if plan.path.len() == 3 {
                local.push(forward_access.saturating_sub(forward_hap));
                local.push(forward_hap);
            }
            self.quotas[v] = Some(Quotas {
                forward_access,
                forward_hap,
                local,
            });
            self.plans[v] = Some(plan);
        }
        Ok(())
    }

    /// Decisions and clamped flows that follow the frozen plans in this slot.
    pub fn slot_flows(
        &self,
        state: &NetworkState,
        topo: &Topology,
        queues: &QueueMatrix<A>,
        densities: &[f64],
    ) -> Result<(SlotDecision, SlotFlows<A>)> {
        let nv = topo.num_vessels;
        let nu = topo.num_uavs;
        let positions = &state.uavs;

        let mut targets = vec![Server::Bs; nv];
        let mut bandwidth = vec![vec![0.0; nu + 1]; nv];
        for (v, plan) in self.plans.iter().enumerate() {
            if let Some(p) = plan {
                targets[v] = p.access;
                let k = topo.access_index(p.access);
                bandwidth[v][k] =
                    p.bandwidth_hz * ratio(state.access_bandwidth(k), p.bandwidth_snapshot);
            }
        }
        for k in 0..=nu {
            let sum: f64 = bandwidth.iter().map(|row| row[k]).sum();
            let cap = state.access_bandwidth(k);
            if sum > cap && sum > 0.0 {
                bandwidth.iter_mut().for_each(|row| row[k] *= cap / sum);
            }
        }

        let uav_relay: Vec<Option<usize>> = (0..nu)
            .map(|k| {
                (0..nv).find(|&v| {
                    targets[v] == Server::Uav(k)
                        && self.quotas[v]
                            .as_ref()
                            .is_some_and(|q| q.forward_access > A::ZERO)
                        && queues.at(v, Server::Uav(k)) > A::ZERO
                })
            })
            .collect();
        let hap_relay = (0..nv).find(|&v| {
            self.quotas[v]
                .as_ref()
                .is_some_and(|q| q.forward_hap > A::ZERO)
                && queues.at(v, Server::Hap) > A::ZERO
        });
        let indicators = Indicators {
            targets: targets.clone(),
            uav_relay,
            hap_relay,
        };
        let budget = LinkBudget {
            access: (0..nv)
                .map(|v| {
                    let k = topo.access_index(targets[v]);
                    state.access_bits(topo, v, k, bandwidth[v][k], positions)
                })
                .collect::<Result<_>>()?,
            uav_to_hap: (0..nu)
                .map(|k| state.u2h_bits(topo, k, positions))
                .collect::<Result<_>>()?,
            hap_to_sat: state.h2s_bits(topo)?,
        };
        let mut flows = clamp_transmissions(&indicators, &budget, queues)?;
        for r in flows.uav_relay.iter_mut().flatten() {
            if let Some(q) = &self.quotas[r.0] {
                r.1 = r.1.min_of(q.forward_access);
            }
        }
        if let Some(r) = flows.hap_relay.as_mut() {
            if let Some(q) = &self.quotas[r.0] {
                r.1 = r.1.min_of(q.forward_hap);
            }
        }

        // frozen reservations, scaled by any capacity drop and never above F_i(n)
        let mut cycles = vec![vec![0.0; nu + 3]; nv];
        for (v, plan) in self.plans.iter().enumerate() {
            if let Some(p) = plan {
                for (j, s) in p.path.iter().enumerate() {
                    let c = s.column(nu) - 1;
                    cycles[v][c] =
                        p.reservation[j] * ratio(state.compute[c], p.compute_snapshot[j]);
                }
            }
        }
        for c in 0..nu + 3 {
            let sum: f64 = cycles.iter().map(|row| row[c]).sum();
            if sum > state.compute[c] && sum > 0.0 {
                let scale = state.compute[c] / sum;
                cycles.iter_mut().for_each(|row| row[c] *= scale);
            }
        }
        let mut requested = vec![vec![A::ZERO; nu + 3]; nv];
        for (v, plan) in self.plans.iter().enumerate() {
            if let (Some(p), Some(q)) = (plan, &self.quotas[v]) {
                for (j, s) in p.path.iter().enumerate() {
                    let c = s.column(nu) - 1;
                    requested[v][c] =
                        A::from_f64_floor(cycles[v][c] / densities[v]).min_of(q.local[j]);
                }
            }
        }
        clamp_compute(&mut flows, &requested, queues)?;
        let used: Vec<Vec<f64>> = flows
            .compute
            .iter()
            .zip(densities)
            .map(|(row, &c)| row.iter().map(|b| b.to_f64() * c).collect())
            .collect();
        let decision = SlotDecision {
            slot: state.clock.index,
            indicators,
            bandwidth,
            compute_cycles: used,
            positions: positions.clone(),
        };
        Ok((decision, flows))
    }

    /// Consumes quotas for applied flows.
    pub fn record(&mut self, flows: &SlotFlows<A>, num_uavs: usize) {
        for (v, q) in self.quotas.iter_mut().enumerate() {
            let (Some(q), Some(p)) = (q.as_mut(), self.plans[v].as_ref()) else {
                continue;
            };
            q.forward_access = q.forward_access.saturating_sub(flows.relayed(v, p.access));
            q.forward_hap = q.forward_hap.saturating_sub(flows.relayed(v, Server::Hap));
            for (j, s) in p.path.iter().enumerate() {
                let done = flows.compute[v][s.column(num_uavs) - 1];
                q.local[j] = q.local[j].saturating_sub(done);
            }
        }
    }
}

fn ratio(now: f64, snapshot: f64) -> f64 {
    if snapshot > 0.0 {
        (now / snapshot).min(1.0)
    } else {
        0.0
    }
}

/// Frozen plans for the arriving vessels, given plans already in force.
pub fn one_shot_schedule(
    arriving: &[usize],
    tasks: &[VesselTask],
    state: &NetworkState,
    topo: &Topology,
    existing: &[Option<FrozenPlan>],
) -> Result<Vec<FrozenPlan>> {
    let nu = topo.num_uavs;
    let mut users = vec![0usize; nu + 1];
    for p in existing.iter().flatten() {
        users[topo.access_index(p.access)] += 1;
    }
    // greedy in vessel order: best snapshot rate given the users already placed
    let mut access = Vec::with_capacity(arriving.len());
    for &v in arriving {
        let mut best = (nu, f64::NEG_INFINITY);
        for k in 0..=nu {
            let share = state.access_bandwidth(k) / (users[k] + 1) as f64;
            let r = state.access_bits(topo, v, k, share, &state.uavs)?;
            if r > best.1 {
                best = (k, r);
            }
        }
        users[best.0] += 1;
        access.push(topo.access_server(best.0));
    }

    let mut plans: Vec<FrozenPlan> = arriving
        .iter()
        .zip(&access)
        .map(|(&v, &s)| {
            let path = match s {
                Server::Uav(_) => vec![s, Server::Hap, Server::Sat],
                _ => vec![s],
            };
            let snapshot: Vec<f64> = path
                .iter()
                .map(|p| state.compute[p.column(nu) - 1])
                .collect();
            let k = topo.access_index(s);
            FrozenPlan {
                vessel: v,
                arrival_slot: state.clock.index,
                access: s,
                fractions: split_fractions(&snapshot),
                bandwidth_hz: state.access_bandwidth(k) / users[k] as f64,
                bandwidth_snapshot: state.access_bandwidth(k),
                reservation: vec![0.0; path.len()],
                compute_snapshot: snapshot,
                path,
            }
        })
        .collect();

    // reservations in proportion to planned cycles at each server
    let mut demand = vec![0.0; nu + 3];
    let planned = |p: &FrozenPlan, j: usize| {
        tasks[p.vessel].data_bits * p.fractions[j] * tasks[p.vessel].density
    };
    for p in existing.iter().flatten().chain(plans.iter()) {
        for (j, s) in p.path.iter().enumerate() {
            demand[s.column(nu) - 1] += planned(p, j);
        }
    }
    for p in &mut plans {
        for j in 0..p.path.len() {
            let c = p.path[j].column(nu) - 1;
            let want = planned(p, j);
            p.reservation[j] = if demand[c] > 0.0 {
                state.compute[c] * want / demand[c]
            } else {
                0.0
            };
        }
    }
    Ok(plans)
}
