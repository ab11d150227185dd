//! Per-vessel backlog bookkeeping at the vessel and every server.
//!
//! Each vessel owns one row of the [`QueueMatrix`]: column 0 is data still on
//! the vessel, the remaining columns follow [`Server::column`]. Within a slot,
//! transmissions are clamped against start-of-slot backlog and link budgets
//! first; computation is clamped afterwards and may consume same-slot arrivals.
//! Data relayed into a node is never forwarded again in the same slot.

use serde::Serialize;

use crate::channel::isl_delay_slots;
use crate::error::{Error, Result};
use crate::model::{SatellitePair, Server, SlotClock};
use crate::scalar::Amount;

/// Backlog handed over between satellites, unavailable until `release_slot`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InFlight<A> {
    pub bits: A,
    pub release_slot: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QueueMatrix<A> {
    num_uavs: usize,
    rows: Vec<Vec<A>>,
    in_flight: Vec<Vec<InFlight<A>>>,
    computed: Vec<A>,
    arrived: Vec<A>,
}

impl<A: Amount> QueueMatrix<A> {
    pub fn new(num_vessels: usize, num_uavs: usize) -> Self {
        Self {
            num_uavs,
            rows: vec![vec![A::ZERO; num_uavs + 4]; num_vessels],
            in_flight: vec![Vec::new(); num_vessels],
            computed: vec![A::ZERO; num_vessels],
            arrived: vec![A::ZERO; num_vessels],
        }
    }

    /// Matrix with `Q_{v,0} = D_v` and empty servers.
    pub fn with_tasks(data: &[A], num_uavs: usize) -> Self {
        let mut q = Self::new(data.len(), num_uavs);
        for (v, &d) in data.iter().enumerate() {
            q.arrive(v, d);
        }
        q
    }

    pub fn num_vessels(&self) -> usize {
        self.rows.len()
    }

    pub fn num_uavs(&self) -> usize {
        self.num_uavs
    }

    /// New task data appears on the vessel.
    pub fn arrive(&mut self, vessel: usize, bits: A) {
        self.rows[vessel][0] = self.rows[vessel][0].add(bits);
        self.arrived[vessel] = self.arrived[vessel].add(bits);
    }

    /// `Q_{v,0}`.
    pub fn local(&self, vessel: usize) -> A {
        self.rows[vessel][0]
    }

    /// `Q_{v,i}`.
    pub fn at(&self, vessel: usize, server: Server) -> A {
        self.rows[vessel][server.column(self.num_uavs)]
    }

    pub fn set(&mut self, vessel: usize, server: Server, bits: A) {
        let c = server.column(self.num_uavs);
        self.rows[vessel][c] = bits;
    }

    pub fn row(&self, vessel: usize) -> &[A] {
        &self.rows[vessel]
    }

    pub fn in_flight(&self, vessel: usize) -> A {
        self.in_flight[vessel]
            .iter()
            .fold(A::ZERO, |acc, f| acc.add(f.bits))
    }

    pub fn computed(&self, vessel: usize) -> A {
        self.computed[vessel]
    }

    pub fn arrived(&self, vessel: usize) -> A {
        self.arrived[vessel]
    }

    /// All data of the vessel not yet computed, including in-flight handover data.
    pub fn total(&self, vessel: usize) -> A {
        self.rows[vessel]
            .iter()
            .fold(self.in_flight(vessel), |acc, &q| acc.add(q))
    }

    pub fn total_all(&self) -> f64 {
        (0..self.num_vessels())
            .map(|v| self.total(v).to_f64())
            .sum()
    }

    /// `Σ_v Q_{v,s}` on the serving satellite.
    pub fn satellite_backlog(&self) -> A {
        (0..self.num_vessels()).fold(A::ZERO, |acc, v| acc.add(self.at(v, Server::Sat)))
    }

    /// `|Q_{v,0} + Σ_i Q_{v,i} + in_flight_v + computed_v − arrived_v|` in bits.
    pub fn conservation_residual(&self, vessel: usize) -> f64 {
        let held = self.total(vessel).add(self.computed[vessel]);
        (held.to_f64() - self.arrived[vessel].to_f64()).abs()
    }

    /// Moves in-flight data whose release slot has come onto the serving satellite.
    pub fn release_in_flight(&mut self, slot: u64) {
        let col = Server::Sat.column(self.num_uavs);
        for (row, pending) in self.rows.iter_mut().zip(self.in_flight.iter_mut()) {
            pending.retain(|f| {
                if f.release_slot <= slot {
                    row[col] = row[col].add(f.bits);
                    false
                } else {
                    true
                }
            });
        }
    }

    /// Applies clamped flows in place following the slot recursions.
    pub fn apply(&mut self, flows: &SlotFlows<A>, slot: u64) -> Result<()> {
        let u = self.num_uavs;
        let fail = |detail: String| Error::Invariant { slot, detail };
        if flows.targets.len() != self.num_vessels() {
            return Err(fail("flow vector does not match vessel count".into()));
        }
        // transmissions, debited from start-of-slot backlog
        for v in 0..self.num_vessels() {
            let sent = flows.access_bits[v];
            self.rows[v][0] = self.rows[v][0]
                .checked_sub(sent)
                .ok_or_else(|| fail(format!("vessel {v} sent more than its backlog")))?;
        }
        let mut relay_out = vec![vec![A::ZERO; u + 4]; self.num_vessels()];
        for (k, r) in flows.uav_relay.iter().enumerate() {
            if let Some((v, bits)) = *r {
                relay_out[v][Server::Uav(k).column(u)] = bits;
            }
        }
        if let Some((v, bits)) = flows.hap_relay {
            relay_out[v][Server::Hap.column(u)] = bits;
        }
        for v in 0..self.num_vessels() {
            for c in 1..u + 4 {
                let out = relay_out[v][c];
                if out > A::ZERO {
                    self.rows[v][c] = self.rows[v][c].checked_sub(out).ok_or_else(|| {
                        fail(format!("relay of vessel {v} exceeds backlog at column {c}"))
                    })?;
                }
            }
        }
        for v in 0..self.num_vessels() {
            let c = flows.targets[v].column(u);
            self.rows[v][c] = self.rows[v][c].add(flows.access_bits[v]);
        }
        for r in &flows.uav_relay {
            if let Some((v, bits)) = *r {
                let c = Server::Hap.column(u);
                self.rows[v][c] = self.rows[v][c].add(bits);
            }
        }
        if let Some((v, bits)) = flows.hap_relay {
            let c = Server::Sat.column(u);
            self.rows[v][c] = self.rows[v][c].add(bits);
        }
        // computation
        for v in 0..self.num_vessels() {
            for c in 1..u + 4 {
                let done = flows.compute[v][c - 1];
                if done > A::ZERO {
                    self.rows[v][c] = self.rows[v][c].checked_sub(done).ok_or_else(|| {
                        fail(format!("vessel {v} computed more than held at column {c}"))
                    })?;
                    self.computed[v] = self.computed[v].add(done);
                }
            }
        }
        Ok(())
    }
}

/// Offloading indicators for one slot.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Indicators {
    /// The single UAV or BS each vessel offloads to.
    pub targets: Vec<Server>,
    /// Vessel each UAV relays to the HAP, if any.
    pub uav_relay: Vec<Option<usize>>,
    /// Vessel the HAP relays to the satellite, if any.
    pub hap_relay: Option<usize>,
}

impl Indicators {
    pub fn idle(num_vessels: usize, num_uavs: usize) -> Self {
        Self {
            targets: vec![Server::Bs; num_vessels],
            uav_relay: vec![None; num_uavs],
            hap_relay: None,
        }
    }
}

/// Per-slot link budgets in bits.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkBudget {
    /// Capacity of each vessel's link to its chosen target.
    pub access: Vec<f64>,
    /// Capacity of each UAV-to-HAP link.
    pub uav_to_hap: Vec<f64>,
    pub hap_to_sat: f64,
}

/// Clamped data movements of one slot.
#[derive(Debug, Clone, PartialEq)]
pub struct SlotFlows<A> {
    pub targets: Vec<Server>,
    /// `D^tx_{v,i}` for each vessel's chosen target.
    pub access_bits: Vec<A>,
    /// `(v, D^tx_{v,u,h})` per UAV.
    pub uav_relay: Vec<Option<(usize, A)>>,
    /// `(v, D^tx_{v,h,s})`.
    pub hap_relay: Option<(usize, A)>,
    /// `D^comp_{v,i}` indexed `[v][column − 1]`.
    pub compute: Vec<Vec<A>>,
}

impl<A: Amount> SlotFlows<A> {
    /// Bits of vessel `v` arriving at `server` this slot.
    pub fn received(&self, v: usize, server: Server) -> A {
        match server {
            Server::Uav(_) | Server::Bs => {
                if self.targets[v] == server {
                    self.access_bits[v]
                } else {
                    A::ZERO
                }
            }
            Server::Hap => self
                .uav_relay
                .iter()
                .flatten()
                .filter(|(w, _)| *w == v)
                .fold(A::ZERO, |acc, (_, b)| acc.add(*b)),
            Server::Sat => match self.hap_relay {
                Some((w, b)) if w == v => b,
                _ => A::ZERO,
            },
        }
    }

    /// Bits of vessel `v` relayed out of `server` this slot.
    pub fn relayed(&self, v: usize, server: Server) -> A {
        match server {
            Server::Uav(k) => match self.uav_relay.get(k).copied().flatten() {
                Some((w, b)) if w == v => b,
                _ => A::ZERO,
            },
            Server::Hap => match self.hap_relay {
                Some((w, b)) if w == v => b,
                _ => A::ZERO,
            },
            _ => A::ZERO,
        }
    }

    /// Upper bound on `D^comp_{v,i}`: `Q + D^tx − D^tx_relay`.
    pub fn computable(&self, queues: &QueueMatrix<A>, v: usize, server: Server) -> A {
        queues
            .at(v, server)
            .add(self.received(v, server))
            .saturating_sub(self.relayed(v, server))
    }

    pub fn compute_at(&self, v: usize, server: Server) -> A {
        self.compute[v][server.column(self.uav_relay.len()) - 1]
    }

    pub fn total_transmitted(&self) -> f64 {
        let access: f64 = self.access_bits.iter().map(|b| b.to_f64()).sum();
        let relays: f64 = self
            .uav_relay
            .iter()
            .flatten()
            .chain(self.hap_relay.iter())
            .map(|(_, b)| b.to_f64())
            .sum();
        access + relays
    }

    pub fn total_computed(&self) -> f64 {
        self.compute.iter().flatten().map(|b| b.to_f64()).sum()
    }
}

fn check_budget(name: &'static str, x: f64) -> Result<()> {
    if x.is_nan() || x < 0.0 {
        Err(Error::input(name, format!("negative or NaN budget {x}")))
    } else {
        Ok(())
    }
}

/// Clamps transmissions to link budgets and start-of-slot backlog. Computation is left at zero.
pub fn clamp_transmissions<A: Amount>(
    indicators: &Indicators,
    budget: &LinkBudget,
    queues: &QueueMatrix<A>,
) -> Result<SlotFlows<A>> {
    let nv = queues.num_vessels();
    let nu = queues.num_uavs();
    if indicators.targets.len() != nv || budget.access.len() != nv {
        return Err(Error::input("indicators", "vessel count mismatch"));
    }
    if indicators.uav_relay.len() != nu || budget.uav_to_hap.len() != nu {
        return Err(Error::input("indicators", "UAV count mismatch"));
    }
    budget
        .access
        .iter()
        .try_for_each(|&b| check_budget("access", b))?;
    budget
        .uav_to_hap
        .iter()
        .try_for_each(|&b| check_budget("uav_to_hap", b))?;
    check_budget("hap_to_sat", budget.hap_to_sat)?;
    for t in &indicators.targets {
        if !t.is_access() {
            return Err(Error::input(
                "targets",
                format!("{t:?} is not an access node"),
            ));
        }
    }

    let access_bits = (0..nv)
        .map(|v| queues.local(v).min_of(A::from_f64_floor(budget.access[v])))
        .collect();
    let uav_relay = indicators
        .uav_relay
        .iter()
        .enumerate()
        .map(|(k, r)| {
            r.map(|v| {
                let held = queues.at(v, Server::Uav(k));
                (v, held.min_of(A::from_f64_floor(budget.uav_to_hap[k])))
            })
        })
        .collect();
    let hap_relay = indicators.hap_relay.map(|v| {
        let held = queues.at(v, Server::Hap);
        (v, held.min_of(A::from_f64_floor(budget.hap_to_sat)))
    });
    Ok(SlotFlows {
        targets: indicators.targets.clone(),
        access_bits,
        uav_relay,
        hap_relay,
        compute: vec![vec![A::ZERO; nu + 3]; nv],
    })
}

/// Clamps requested computation `[v][column − 1]` against the per-node limits.
pub fn clamp_compute<A: Amount>(
    flows: &mut SlotFlows<A>,
    requested: &[Vec<A>],
    queues: &QueueMatrix<A>,
) -> Result<()> {
    let nu = queues.num_uavs();
    if requested.len() != queues.num_vessels() {
        return Err(Error::input("requested", "vessel count mismatch"));
    }
    for (v, row) in requested.iter().enumerate() {
        for server in Server::all(nu) {
            let c = server.column(nu) - 1;
            let want = row.get(c).copied().unwrap_or(A::ZERO);
            flows.compute[v][c] = want.min_of(flows.computable(queues, v, server));
        }
    }
    Ok(())
}

/// Transmissions then computation, each clamped.
pub fn clamp_flows<A: Amount>(
    indicators: &Indicators,
    budget: &LinkBudget,
    requested_compute: &[Vec<A>],
    queues: &QueueMatrix<A>,
) -> Result<SlotFlows<A>> {
    let mut flows = clamp_transmissions(indicators, budget, queues)?;
    clamp_compute(&mut flows, requested_compute, queues)?;
    Ok(flows)
}

/// Functional form of [`QueueMatrix::apply`].
pub fn apply_slot<A: Amount>(
    queues: &QueueMatrix<A>,
    flows: &SlotFlows<A>,
    slot: u64,
) -> Result<QueueMatrix<A>> {
    let mut next = queues.clone();
    next.apply(flows, slot)?;
    Ok(next)
}

/// Moves every `Q_{v,s}` into the ISL buffer, released `ceil(T_p / tau)` slots later.
///
/// Returns the number of bits handed over. Zero-delay transfers land on the new
/// satellite immediately.
pub fn handover_transfer<A: Amount>(
    queues: &mut QueueMatrix<A>,
    sat: &SatellitePair,
    clock: &SlotClock,
) -> A {
    let release_slot = clock.index + isl_delay_slots(sat.isl_delay, clock.tau);
    let mut moved = A::ZERO;
    for v in 0..queues.num_vessels() {
        let bits = queues.at(v, Server::Sat);
        if bits > A::ZERO {
            queues.set(v, Server::Sat, A::ZERO);
            queues.in_flight[v].push(InFlight { bits, release_slot });
            moved = moved.add(bits);
        }
    }
    queues.release_in_flight(clock.index);
    moved
}

/// Completion time of one vessel's task.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Completion {
    /// `(N_v + 1) tau` seconds.
    Done(f64),
    /// Still backlogged at the horizon, which is reported in seconds.
    Unfinished(f64),
}

impl Completion {
    pub fn seconds(self) -> f64 {
        match self {
            Completion::Done(t) | Completion::Unfinished(t) => t,
        }
    }

    pub fn is_done(self) -> bool {
        matches!(self, Completion::Done(_))
    }
}

/// `T_v = (N_v + 1) tau` from per-slot total backlog, `history[n]` taken at the start of slot `n`.
pub fn completion_delay(history: &[f64], tau: f64) -> Completion {
    match history.iter().rposition(|&b| b > 0.0) {
        None => Completion::Done(0.0),
        Some(n) if n + 1 == history.len() => Completion::Unfinished(history.len() as f64 * tau),
        Some(n) => Completion::Done((n + 1) as f64 * tau),
    }
}

/// Incremental form of [`completion_delay`] that keeps only the last positive slot.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompletionTracker {
    last_positive: Option<u64>,
    observed: u64,
}

impl CompletionTracker {
    pub fn observe(&mut self, slot: u64, total: f64) {
        if total > 0.0 {
            self.last_positive = Some(slot);
        }
        self.observed = slot + 1;
    }

    pub fn is_clear(&self) -> bool {
        match self.last_positive {
            None => true,
            Some(n) => n + 1 < self.observed,
        }
    }

    /// Delay measured from `origin_slot` (the task arrival).
    pub fn completion(&self, tau: f64, origin_slot: u64) -> Completion {
        match self.last_positive {
            None => Completion::Done(0.0),
            Some(n) if n + 1 >= self.observed => {
                Completion::Unfinished(self.observed.saturating_sub(origin_slot) as f64 * tau)
            }
            Some(n) => Completion::Done((n + 1).saturating_sub(origin_slot) as f64 * tau),
        }
    }
}
