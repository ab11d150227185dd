//! The slot loop: state update, backpressure scheduling, block-coordinate
//! resource optimization, flow application and metrics.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::baselines::{FrozenPlan, OneShotState, SchedulerVariant};
use crate::error::{Error, Result};
use crate::model::{Server, Vec2, VesselTask};
use crate::queueing::{
    clamp_compute, clamp_transmissions, handover_transfer, Completion, CompletionTracker,
    Indicators, LinkBudget, QueueMatrix, SlotFlows,
};
use crate::resources::{
    allocate_bandwidth, allocate_compute, optimize_trajectories_from, AssociatedLink,
    PendingVessel, ServedVessel, TrajectoryProblem,
};
use crate::scalar::Amount;
use crate::scheduler::{
    joint_satellite_state, schedule_slot, GraphRates, JointSatelliteState, Schedule, SlotView,
};
use crate::sim::check::{check_slot, SlotDecision, Violation};
use crate::sim::config::{ArrivalMode, HandoverMode, ScenarioConfig};
use crate::sim::state::{NetworkState, Topology};

/// Optional outputs and checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimOptions {
    pub trace_queues: bool,
    pub dump_pressure: bool,
    pub opt_trace: bool,
    /// Run the standalone constraint checker on every slot.
    pub check_constraints: bool,
}

impl Default for SimOptions {
    fn default() -> Self {
        Self {
            trace_queues: false,
            dump_pressure: false,
            opt_trace: false,
            check_constraints: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QueueTraceRow {
    pub slot: u64,
    pub vessel: usize,
    pub node: String,
    pub bits: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PressureRow {
    pub slot: u64,
    pub vessel: usize,
    pub quantity: &'static str,
    pub link: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptTraceRow {
    pub slot: u64,
    pub bcd_iteration: usize,
    pub objective_bits: f64,
    pub accepted: bool,
    pub sca_iterations: usize,
    pub rate_sum_bps: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HandoverSnapshot {
    pub slot: u64,
    pub bits: f64,
}

/// Everything measured during one run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricsRecord {
    pub variant: SchedulerVariant,
    pub seed: u64,
    pub delays: Vec<Completion>,
    /// Total backlog (all vessels, all nodes, in flight) at the start of each slot.
    pub slot_backlog: Vec<f64>,
    pub handovers: Vec<HandoverSnapshot>,
    /// BCD iterations per slot (zero for the one-shot proxy).
    pub bcd_iterations: Vec<usize>,
    pub flagged_slots: usize,
    pub max_conservation_residual: f64,
    pub violations: Vec<Violation>,
    pub queue_trace: Vec<QueueTraceRow>,
    pub pressure_trace: Vec<PressureRow>,
    pub opt_trace: Vec<OptTraceRow>,
}

impl MetricsRecord {
    pub fn slots_run(&self) -> usize {
        self.slot_backlog.len()
    }

    /// `Σ_v T_v`, counting unfinished tasks at the horizon.
    pub fn total_delay_s(&self) -> f64 {
        self.delays.iter().map(|d| d.seconds()).sum()
    }

    pub fn mean_delay_s(&self) -> f64 {
        if self.delays.is_empty() {
            0.0
        } else {
            self.total_delay_s() / self.delays.len() as f64
        }
    }

    pub fn unfinished(&self) -> usize {
        self.delays.iter().filter(|d| !d.is_done()).count()
    }

    /// Satellite backlog moved at the first handover (zero if none happened).
    pub fn handover_backlog_bits(&self) -> f64 {
        self.handovers.first().map_or(0.0, |h| h.bits)
    }
}

/// What one executed slot decided and moved.
#[derive(Debug, Clone)]
pub struct SlotOutcome<A> {
    pub decision: SlotDecision,
    pub flows: SlotFlows<A>,
    /// Accepted BCD objective values (bits moved or computed).
    pub objective_trace: Vec<f64>,
}

struct Evaluated<A> {
    flows: SlotFlows<A>,
    cycles: Vec<Vec<f64>>,
    bandwidth: Vec<Vec<f64>>,
    positions: Vec<Vec2<f64>>,
    objective: f64,
}

/// One simulation run, generic over the bit representation.
pub struct Simulation<A: Amount> {
    config: ScenarioConfig,
    variant: SchedulerVariant,
    options: SimOptions,
    topo: Topology,
    state: NetworkState,
    rng: ChaCha8Rng,
    tasks: Vec<VesselTask>,
    densities: Vec<f64>,
    queues: QueueMatrix<A>,
    trackers: Vec<CompletionTracker>,
    first_arrival: Vec<Option<u64>>,
    last_bandwidth: Option<(Vec<Server>, Vec<Vec<f64>>)>,
    proxy: OneShotState<A>,
    metrics: MetricsRecord,
}

impl<A: Amount> Simulation<A> {
    pub fn new(
        config: &ScenarioConfig,
        variant: SchedulerVariant,
        options: SimOptions,
    ) -> Result<Self> {
        config.validate()?;
        if variant == SchedulerVariant::OneShotProxy
            && config.arrivals.mode == ArrivalMode::Periodic
        {
            return Err(Error::Config(vec![
                "arrivals.mode: periodic arrivals are not supported by ONE_SHOT_PROXY".into(),
            ]));
        }
        let topo = Topology::new(config)?;
        let mut rng = ChaCha8Rng::seed_from_u64(config.simulation.seed);
        let (state, tasks) = NetworkState::initial(config, &topo, &mut rng);
        let nv = topo.num_vessels;
        let densities = tasks.iter().map(|t| t.density).collect();
        Ok(Self {
            variant,
            options,
            queues: QueueMatrix::new(nv, topo.num_uavs),
            trackers: vec![CompletionTracker::default(); nv],
            first_arrival: vec![None; nv],
            last_bandwidth: None,
            proxy: OneShotState::new(nv),
            metrics: MetricsRecord {
                variant,
                seed: config.simulation.seed,
                delays: Vec::new(),
                slot_backlog: Vec::new(),
                handovers: Vec::new(),
                bcd_iterations: Vec::new(),
                flagged_slots: 0,
                max_conservation_residual: 0.0,
                violations: Vec::new(),
                queue_trace: Vec::new(),
                pressure_trace: Vec::new(),
                opt_trace: Vec::new(),
            },
            config: config.clone(),
            topo,
            state,
            rng,
            tasks,
            densities,
        })
    }

    pub fn state(&self) -> &NetworkState {
        &self.state
    }

    pub fn queues(&self) -> &QueueMatrix<A> {
        &self.queues
    }

    pub fn tasks(&self) -> &[VesselTask] {
        &self.tasks
    }

    pub fn topology(&self) -> &Topology {
        &self.topo
    }

    pub fn metrics(&self) -> &MetricsRecord {
        &self.metrics
    }

    /// Frozen plan of vessel `v`'s task (one-shot proxy only).
    pub fn proxy_plan(&self, v: usize) -> Option<&FrozenPlan> {
        self.proxy.plan(v)
    }

    fn more_arrivals_after(&self, slot: u64) -> bool {
        match self.config.arrivals.mode {
            ArrivalMode::Periodic => true,
            _ => self.tasks.iter().any(|t| t.arrival_slot > slot),
        }
    }

    /// Handover, arrivals, mobility and random draws for the current slot.
    /// Returns false once every task has cleared and none is still to come.
    pub fn begin_slot(&mut self) -> Result<bool> {
        let n = self.state.clock.index;
        let now = self.state.clock.time();
        if let Some(t) = self.state.next_handover {
            if now >= t - 1e-9 {
                self.state.satellite.isl_delay = self.config.handover.isl_delay_s;
                let moved =
                    handover_transfer(&mut self.queues, &self.state.satellite, &self.state.clock);
                self.metrics.handovers.push(HandoverSnapshot {
                    slot: n,
                    bits: moved.to_f64(),
                });
                self.state.serving_nominal = self.topo.incoming_compute;
                self.state.next_handover = match self.config.handover.mode {
                    HandoverMode::Periodic => Some(t + self.config.handover.time_s),
                    _ => None,
                };
            }
        }
        self.queues.release_in_flight(n);

        let mut arriving = Vec::new();
        for v in 0..self.tasks.len() {
            if self.tasks[v].arrival_slot == n {
                arriving.push(v);
            }
        }
        if self.config.arrivals.mode == ArrivalMode::Periodic
            && n > 0
            && n.is_multiple_of(self.config.arrivals.period_slots)
        {
            let [lo, hi] = self.config.vessels.data_bits;
            for v in 0..self.tasks.len() {
                let d = if hi > lo {
                    self.rng.random_range(lo..=hi)
                } else {
                    lo
                };
                self.queues.arrive(v, A::from_f64_floor(d));
            }
        }
        let mut amounts = vec![A::ZERO; self.tasks.len()];
        for &v in &arriving {
            amounts[v] = A::from_f64_floor(self.tasks[v].data_bits);
            self.queues.arrive(v, amounts[v]);
            self.first_arrival[v].get_or_insert(n);
        }

        if n > 0 {
            self.state.advance_vessels(&self.topo);
        }
        self.state
            .draw_slot(&self.config, &self.topo, &mut self.rng);

        if self.variant == SchedulerVariant::OneShotProxy {
            let planned: Vec<usize> = arriving
                .into_iter()
                .filter(|&v| amounts[v] > A::ZERO)
                .collect();
            if !planned.is_empty() {
                self.proxy.schedule_arrivals(
                    &planned,
                    &self.tasks,
                    &amounts,
                    &self.state,
                    &self.topo,
                )?;
            }
        }

        let mut total = 0.0;
        for v in 0..self.tasks.len() {
            let q = self.queues.total(v).to_f64();
            total += q;
            if self.first_arrival[v].is_some() {
                self.trackers[v].observe(n, q);
            }
        }
        if total == 0.0 && !self.more_arrivals_after(n) {
            return Ok(false);
        }
        self.metrics.slot_backlog.push(total);
        if self.options.trace_queues {
            self.trace_queues(n);
        }
        Ok(true)
    }

    fn trace_queues(&mut self, n: u64) {
        let nu = self.topo.num_uavs;
        for v in 0..self.tasks.len() {
            let row = self.queues.row(v);
            for (c, q) in row.iter().enumerate() {
                let node = if c == 0 {
                    "vessel".to_string()
                } else {
                    Server::from_column(c, nu).map_or_else(|| format!("col{c}"), |s| s.label())
                };
                self.metrics.queue_trace.push(QueueTraceRow {
                    slot: n,
                    vessel: v,
                    node,
                    bits: q.to_f64(),
                });
            }
            self.metrics.queue_trace.push(QueueTraceRow {
                slot: n,
                vessel: v,
                node: "isl".into(),
                bits: self.queues.in_flight(v).to_f64(),
            });
        }
    }

    /// Decides and applies one slot; call after [`Self::begin_slot`] returned true.
    pub fn execute_slot(&mut self) -> Result<SlotOutcome<A>> {
        let n = self.state.clock.index;
        let previous = self.state.uavs.clone();
        let (decision, flows, trace, iterations) = match self.variant {
            SchedulerVariant::OneShotProxy => {
                let (d, f) = self.proxy.slot_flows(
                    &self.state,
                    &self.topo,
                    &self.queues,
                    &self.densities,
                )?;
                (d, f, Vec::new(), 0)
            }
            _ => self.dash_slot()?,
        };
        self.metrics.bcd_iterations.push(iterations);

        if self.options.check_constraints {
            let found = check_slot(
                &self.topo,
                &self.state,
                &previous,
                &self.densities,
                &self.queues,
                &decision,
                &flows,
            );
            self.metrics.violations.extend(found);
        }
        self.queues.apply(&flows, n)?;
        if self.variant == SchedulerVariant::OneShotProxy {
            self.proxy.record(&flows, self.topo.num_uavs);
        }
        for v in 0..self.tasks.len() {
            let r = self.queues.conservation_residual(v);
            let arrived = self.queues.arrived(v).to_f64();
            self.metrics.max_conservation_residual = self.metrics.max_conservation_residual.max(r);
            if r > 1e-6 * arrived.max(1.0) {
                return Err(Error::Invariant {
                    slot: n,
                    detail: format!("vessel {v} conservation residual {r} bits"),
                });
            }
        }
        self.state.uavs = decision.positions.clone();
        self.last_bandwidth = Some((
            decision.indicators.targets.clone(),
            decision.bandwidth.clone(),
        ));
        self.state.clock.tick();
        Ok(SlotOutcome {
            decision,
            flows,
            objective_trace: trace,
        })
    }

    /// Bandwidth assumed when scoring access candidates before this slot's allocation.
    fn candidate_bandwidth(&self) -> Vec<Vec<f64>> {
        let nv = self.topo.num_vessels;
        let nu = self.topo.num_uavs;
        let mut out = vec![vec![0.0; nu + 1]; nv];
        match &self.last_bandwidth {
            None => {
                for row in &mut out {
                    for (k, b) in row.iter_mut().enumerate() {
                        *b = self.state.access_bandwidth(k) / nv as f64;
                    }
                }
            }
            Some((targets, plan)) => {
                let mut users = vec![0usize; nu + 1];
                for t in targets {
                    users[self.topo.access_index(*t)] += 1;
                }
                for v in 0..nv {
                    let mine = self.topo.access_index(targets[v]);
                    for k in 0..=nu {
                        let total = self.state.access_bandwidth(k);
                        out[v][k] = if k == mine {
                            plan[v][k].min(total)
                        } else {
                            total / (users[k] + 1) as f64
                        };
                    }
                }
            }
        }
        out
    }

    fn joint_state(&self, backlog: &[f64]) -> JointSatelliteState<f64> {
        let inactive = || JointSatelliteState {
            compute: self.state.satellite.current_compute,
            backlog: backlog.to_vec(),
            weight: 1.0,
            active: false,
        };
        if !self.variant.anticipates_handover() || self.state.next_handover.is_none() {
            return inactive();
        }
        let incoming = vec![self.config.handover.incoming_backlog_bits; backlog.len()];
        joint_satellite_state(&self.state.satellite, backlog, &incoming, &self.state.clock)
    }

    fn schedule(&self, previous: &[Vec2<f64>]) -> Result<Schedule<f64>> {
        let nv = self.topo.num_vessels;
        let nu = self.topo.num_uavs;
        let sat_col = Server::Sat.column(nu);
        let rows: Vec<Vec<f64>> = (0..nv)
            .map(|v| self.queues.row(v).iter().map(|q| q.to_f64()).collect())
            .collect();
        let sat_backlog: Vec<f64> = rows.iter().map(|r| r[sat_col]).collect();
        let joint = self.joint_state(&sat_backlog);
        let cand = self.candidate_bandwidth();
        let u2h: Vec<f64> = (0..nu)
            .map(|k| self.state.u2h_bits(&self.topo, k, previous))
            .collect::<Result<_>>()?;
        let h2s = self.state.h2s_bits(&self.topo)?;
        let mut rates = Vec::with_capacity(nv);
        let mut backlog = Vec::with_capacity(nv);
        for v in 0..nv {
            let access = (0..=nu)
                .map(|k| {
                    self.state
                        .access_bits(&self.topo, v, k, cand[v][k], previous)
                })
                .collect::<Result<Vec<f64>>>()?;
            let c_v = self.densities[v];
            let mut compute: Vec<f64> = self.state.compute.iter().map(|f| f / c_v).collect();
            let mut row = rows[v].clone();
            if joint.active {
                compute[sat_col - 1] = joint.compute / c_v;
                row[sat_col] = joint.backlog[v];
            }
            rates.push(GraphRates {
                access,
                uav_to_hap: u2h.clone(),
                hap_to_sat: h2s,
                compute,
            });
            backlog.push(row);
        }
        Ok(schedule_slot(&SlotView {
            rates,
            backlog,
            scope: self.config.scheduler.distance_scope,
        }))
    }

    fn dump_pressure(&mut self, schedule: &Schedule<f64>) {
        let n = self.state.clock.index;
        let nu = self.topo.num_uavs;
        let label = |c: usize| {
            if c == 0 {
                "vessel".to_string()
            } else {
                Server::from_column(c, nu).map_or_else(|| format!("col{c}"), |s| s.label())
            }
        };
        for (v, p) in schedule.pressures.iter().enumerate() {
            for (c, &j) in p.index.iter().enumerate() {
                self.metrics.pressure_trace.push(PressureRow {
                    slot: n,
                    vessel: v,
                    quantity: "J",
                    link: label(c),
                    value: j,
                });
            }
            for (k, &d) in p.to_access.iter().enumerate() {
                let to = self.topo.access_server(k).label();
                self.metrics.pressure_trace.push(PressureRow {
                    slot: n,
                    vessel: v,
                    quantity: "dJ",
                    link: format!("vessel->{to}"),
                    value: d,
                });
            }
            for (k, &d) in p.uav_to_hap.iter().enumerate() {
                self.metrics.pressure_trace.push(PressureRow {
                    slot: n,
                    vessel: v,
                    quantity: "dJ",
                    link: format!("{}->{}", Server::Uav(k).label(), Server::Hap.label()),
                    value: d,
                });
            }
            self.metrics.pressure_trace.push(PressureRow {
                slot: n,
                vessel: v,
                quantity: "dJ",
                link: format!("{}->{}", Server::Hap.label(), Server::Sat.label()),
                value: p.hap_to_sat,
            });
        }
    }

    fn allocate_bandwidth(&self, targets: &[Server], positions: &[Vec2<f64>]) -> Vec<Vec<f64>> {
        let nv = self.topo.num_vessels;
        let nu = self.topo.num_uavs;
        let mut out = vec![vec![0.0; nu + 1]; nv];
        for k in 0..=nu {
            let served: Vec<ServedVessel<f64>> = (0..nv)
                .filter(|&v| self.topo.access_index(targets[v]) == k)
                .map(|v| ServedVessel {
                    vessel: v,
                    power: self.topo.vessel_power,
                    gain: self.state.access_gain(&self.topo, v, k, positions),
                })
                .collect();
            let plan = allocate_bandwidth(&served, self.state.access_bandwidth(k));
            for (v, b) in plan.shares {
                out[v][k] = b;
            }
        }
        out
    }

    fn trajectory_problem(
        &self,
        targets: &[Server],
        bandwidth: &[Vec<f64>],
        previous: &[Vec2<f64>],
    ) -> TrajectoryProblem<f64> {
        let f = &self.topo.fading;
        let links = targets
            .iter()
            .enumerate()
            .filter_map(|(v, t)| match *t {
                Server::Uav(k) => Some(AssociatedLink::new(
                    k,
                    self.state.vessels[v].position,
                    bandwidth[v][k],
                    self.topo.vessel_power,
                    f.ref_path_loss,
                    self.state.small_scale[v][k],
                    f.noise_psd,
                )),
                _ => None,
            })
            .collect();
        TrajectoryProblem {
            previous: previous.to_vec(),
            height: self.topo.uav_height,
            max_step: self.topo.uav_max_step,
            safe_distance: self.topo.safe_distance,
            links,
        }
    }

    /// Clamped flows and Algorithm-1 computing for a bandwidth plan and UAV positions.
    fn evaluate(
        &self,
        indicators: &Indicators,
        positions: Vec<Vec2<f64>>,
        bandwidth: Vec<Vec<f64>>,
    ) -> Result<Evaluated<A>> {
        let nv = self.topo.num_vessels;
        let nu = self.topo.num_uavs;
        let budget = LinkBudget {
            access: (0..nv)
                .map(|v| {
                    let k = self.topo.access_index(indicators.targets[v]);
                    self.state
                        .access_bits(&self.topo, v, k, bandwidth[v][k], &positions)
                })
                .collect::<Result<_>>()?,
            uav_to_hap: (0..nu)
                .map(|k| self.state.u2h_bits(&self.topo, k, &positions))
                .collect::<Result<_>>()?,
            hap_to_sat: self.state.h2s_bits(&self.topo)?,
        };
        let mut flows = clamp_transmissions(indicators, &budget, &self.queues)?;
        let mut cycles = vec![vec![0.0; nu + 3]; nv];
        let mut requested = vec![vec![A::ZERO; nu + 3]; nv];
        for server in Server::all(nu) {
            let c = server.column(nu) - 1;
            let capacity = self.state.compute[c];
            let pending: Vec<PendingVessel<f64>> = (0..nv)
                .filter_map(|v| {
                    let avail = flows.computable(&self.queues, v, server).to_f64();
                    (avail > 0.0).then(|| PendingVessel {
                        vessel: v,
                        backlog: self.queues.at(v, server).to_f64(),
                        compute_rate: capacity / self.densities[v],
                        cap: self.densities[v] * avail,
                    })
                })
                .collect();
            if pending.is_empty() {
                continue;
            }
            let plan = allocate_compute(&pending, capacity);
            for (v, f) in plan.cycles {
                cycles[v][c] = f;
                requested[v][c] = A::from_f64_floor(f / self.densities[v]);
            }
        }
        clamp_compute(&mut flows, &requested, &self.queues)?;
        let objective = flows.total_transmitted() + flows.total_computed();
        Ok(Evaluated {
            flows,
            cycles,
            bandwidth,
            positions,
            objective,
        })
    }

    fn dash_slot(&mut self) -> Result<(SlotDecision, SlotFlows<A>, Vec<f64>, usize)> {
        let n = self.state.clock.index;
        let previous = self.state.uavs.clone();
        let schedule = self.schedule(&previous)?;
        if self.options.dump_pressure {
            self.dump_pressure(&schedule);
        }
        let indicators = schedule.indicators;
        let sc = &self.config.scheduler;
        let (max_iters, tol, sca_iters, sca_tol) =
            (sc.bcd_max_iters, sc.bcd_tol, sc.sca_max_iters, sc.sca_tol);

        let mut best: Option<Evaluated<A>> = None;
        let mut trace = Vec::new();
        let mut iterations = 0;
        let mut flagged = false;
        let mut positions = previous.clone();
        for j in 1..=max_iters {
            iterations = j;
            let bandwidth = self.allocate_bandwidth(&indicators.targets, &positions);
            let problem = self.trajectory_problem(&indicators.targets, &bandwidth, &previous);
            let traj = optimize_trajectories_from(&problem, positions.clone(), sca_iters, sca_tol);
            flagged |= traj.flagged;
            let rate_sum = traj.objective_trace.last().copied().unwrap_or(0.0);
            let sca_count = traj.iterations;
            let candidate = self.evaluate(&indicators, traj.positions, bandwidth)?;
            let objective = candidate.objective;
            let (accept, converged) = match &best {
                None => (true, false),
                Some(b) => (
                    objective >= b.objective,
                    (objective - b.objective).abs() <= tol * b.objective.abs(),
                ),
            };
            if self.options.opt_trace {
                self.metrics.opt_trace.push(OptTraceRow {
                    slot: n,
                    bcd_iteration: j,
                    objective_bits: objective,
                    accepted: accept,
                    sca_iterations: sca_count,
                    rate_sum_bps: rate_sum,
                });
            }
            if !accept {
                break;
            }
            trace.push(objective);
            positions = candidate.positions.clone();
            best = Some(candidate);
            if converged {
                break;
            }
        }
        if flagged {
            self.metrics.flagged_slots += 1;
        }
        let best = best.expect("at least one BCD iteration");
        let decision = SlotDecision {
            slot: n,
            indicators,
            bandwidth: best.bandwidth,
            compute_cycles: best.cycles,
            positions: best.positions,
        };
        Ok((decision, best.flows, trace, iterations))
    }

    /// Runs slots until every task has cleared or the horizon is reached.
    pub fn run(mut self) -> Result<MetricsRecord> {
        let horizon = self.config.simulation.horizon_slots;
        while self.state.clock.index < horizon {
            if !self.begin_slot()? {
                break;
            }
            self.execute_slot()?;
        }
        Ok(self.finish())
    }

    fn finish(mut self) -> MetricsRecord {
        let tau = self.topo.tau;
        self.metrics.delays = (0..self.tasks.len())
            .map(|v| {
                if self.tasks[v].data_bits <= 0.0
                    && self.config.arrivals.mode != ArrivalMode::Periodic
                {
                    return Completion::Done(0.0);
                }
                match self.first_arrival[v] {
                    None => Completion::Unfinished(0.0),
                    Some(origin) => self.trackers[v].completion(tau, origin),
                }
            })
            .collect();
        self.metrics
    }
}

/// Runs one scenario in fluid-bit or whole-bit mode as configured.
pub fn run_scenario(
    config: &ScenarioConfig,
    variant: SchedulerVariant,
    options: SimOptions,
) -> Result<MetricsRecord> {
    if config.simulation.integer_bits {
        Simulation::<u64>::new(config, variant, options)?.run()
    } else {
        Simulation::<f64>::new(config, variant, options)?.run()
    }
}
