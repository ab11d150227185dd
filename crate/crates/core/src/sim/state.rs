//! Per-slot realization of the network: positions, fluctuated capacities and fading.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::channel::{
    db_to_linear, h2s_gain, rician_power, sample_scatter, shannon_rate, FadingParams,
    FreeSpaceLoss, LossModel,
};
use crate::error::Result;
use crate::model::{
    advance_vessel_positions, grid_positions, Area, NodeGeometry, SatellitePair, Server, SlotClock,
    Vec2, VesselMotion, VesselTask,
};
use crate::sim::config::{HandoverMode, ScenarioConfig};

/// `F_i(n) = F_i^nom (1 + range z)` with `z ~ U(−1, 1)` drawn per entry, clamped at 0.
///
/// One draw is consumed per entry even when `range` is zero, so runs that differ
/// only in fluctuation range see the same downstream random numbers.
pub fn apply_fluctuation<R: Rng + ?Sized>(nominal: &[f64], range: f64, rng: &mut R) -> Vec<f64> {
    nominal
        .iter()
        .map(|&f| {
            let z: f64 = rng.random_range(-1.0..=1.0);
            (f * (1.0 + range * z)).max(0.0)
        })
        .collect()
}

/// Scenario constants derived once from the configuration, in linear units.
#[derive(Debug, Clone)]
pub struct Topology {
    pub num_vessels: usize,
    pub num_uavs: usize,
    pub area: Area,
    pub tau: f64,
    pub bs: NodeGeometry<f64>,
    pub hap: NodeGeometry<f64>,
    pub uav_height: f64,
    /// `S_max τ`.
    pub uav_max_step: f64,
    pub safe_distance: f64,
    pub fading: FadingParams<f64>,
    pub u2h_loss: FreeSpaceLoss,
    pub h2s_loss: FreeSpaceLoss,
    pub vessel_power: f64,
    pub uav_power: f64,
    pub hap_power: f64,
    pub uav_gain: f64,
    pub hap_gain: f64,
    pub sat_gain: f64,
    /// Nominal compute per queue column minus one (UAVs, BS, HAP, satellite).
    pub nominal_compute: Vec<f64>,
    /// Nominal bandwidth: `B_u` per UAV, `B_b`, `B_h`, `B_s`.
    pub nominal_bandwidth: Vec<f64>,
    pub incoming_compute: f64,
}

impl Topology {
    pub fn new(config: &ScenarioConfig) -> Result<Self> {
        let nu = config.uav.count;
        let area = config.area();
        let hap_xy = config
            .hap
            .position_m
            .map_or_else(|| area.center(), |[x, y]| Vec2::new(x, y));
        let fading = FadingParams::from_db(
            config.channel.ref_path_loss_db,
            config.channel.rician_k,
            config.channel.noise_dbm_per_hz,
        )?;
        let mut nominal_compute = vec![config.uav.compute_cycles; nu];
        nominal_compute.extend([
            config.bs.compute_cycles,
            config.hap.compute_cycles,
            config.satellite.compute_cycles,
        ]);
        let mut nominal_bandwidth = vec![config.uav.bandwidth_hz; nu];
        nominal_bandwidth.extend([
            config.bs.bandwidth_hz,
            config.hap.bandwidth_hz,
            config.satellite.bandwidth_hz,
        ]);
        Ok(Self {
            num_vessels: config.vessels.count,
            num_uavs: nu,
            area,
            tau: config.simulation.tau_s,
            bs: NodeGeometry::fixed(
                Vec2::new(config.bs.position_m[0], config.bs.position_m[1]),
                config.bs.height_m,
            ),
            hap: NodeGeometry::fixed(hap_xy, config.hap.height_m),
            uav_height: config.uav.height_m,
            uav_max_step: config.uav.max_speed_mps * config.simulation.tau_s,
            safe_distance: config.uav.safe_distance_m,
            fading,
            u2h_loss: FreeSpaceLoss {
                carrier_hz: config.channel.carrier_hz.u2h,
                excess_db: config.channel.excess_loss_db,
                fixed_distance: None,
            },
            h2s_loss: FreeSpaceLoss {
                carrier_hz: config.channel.carrier_hz.h2s,
                excess_db: config.channel.excess_loss_db,
                fixed_distance: Some(config.satellite.distance_m),
            },
            vessel_power: config.vessels.tx_power_w,
            uav_power: config.uav.tx_power_w,
            hap_power: config.hap.tx_power_w,
            uav_gain: db_to_linear(config.uav.antenna_gain_dbi),
            hap_gain: db_to_linear(config.hap.antenna_gain_dbi),
            sat_gain: db_to_linear(config.satellite.antenna_gain_dbi),
            nominal_compute,
            nominal_bandwidth,
            incoming_compute: config.satellite.compute_cycles
                * (1.0 - config.handover.incoming_deficit),
        })
    }

    /// Geometry of access node `k` (UAV `k < U`, BS at `k = U`).
    pub fn access_geometry(&self, k: usize, uavs: &[Vec2<f64>]) -> NodeGeometry<f64> {
        if k < self.num_uavs {
            NodeGeometry::fixed(uavs[k], self.uav_height)
        } else {
            self.bs
        }
    }

    /// Index of an access server among the `U + 1` access candidates.
    pub fn access_index(&self, server: Server) -> usize {
        match server {
            Server::Uav(k) => k,
            _ => self.num_uavs,
        }
    }

    pub fn access_server(&self, k: usize) -> Server {
        if k < self.num_uavs {
            Server::Uav(k)
        } else {
            Server::Bs
        }
    }
}

/// Everything that changes from slot to slot.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkState {
    pub clock: SlotClock,
    pub vessels: Vec<VesselMotion>,
    /// `W_u(n−1)` entering a slot, `W_u(n)` after it.
    pub uavs: Vec<Vec2<f64>>,
    /// `F_i(n)` per queue column minus one.
    pub compute: Vec<f64>,
    /// `B_u(n)` per UAV, `B_b(n)`, `B_h(n)`, `B_s(n)`.
    pub bandwidth: Vec<f64>,
    pub satellite: SatellitePair,
    /// `|h^R_{v,k}|²` for each vessel and access node.
    pub small_scale: Vec<Vec<f64>>,
    /// Nominal compute of the serving satellite (changes at handover).
    pub serving_nominal: f64,
    /// Time of the next handover, if any.
    pub next_handover: Option<f64>,
}

impl NetworkState {
    /// Initial state; consumes the per-vessel draws from `rng` and returns the tasks.
    pub fn initial(
        config: &ScenarioConfig,
        topo: &Topology,
        rng: &mut ChaCha8Rng,
    ) -> (Self, Vec<VesselTask>) {
        let v = &config.vessels;
        let mut vessels = Vec::with_capacity(v.count);
        let mut tasks = Vec::with_capacity(v.count);
        for k in 0..v.count {
            let x = rng.random_range(0.0..=topo.area.width);
            let y = rng.random_range(0.0..=topo.area.height);
            let speed = uniform(rng, v.speed_mps);
            let heading = rng.random_range(0.0..std::f64::consts::TAU);
            let data = uniform(rng, v.data_bits);
            let density = uniform(rng, v.density_cycles_per_bit);
            vessels.push(VesselMotion {
                position: Vec2::new(x, y),
                speed,
                heading,
            });
            let arrival_slot = match config.arrivals.mode {
                crate::sim::config::ArrivalMode::Staggered => {
                    k as u64 * config.arrivals.spacing_slots
                }
                _ => 0,
            };
            tasks.push(VesselTask {
                data_bits: data,
                density,
                arrival_slot,
            });
        }
        let ho = &config.handover;
        let next_handover = (ho.mode != HandoverMode::None).then_some(ho.time_s);
        let state = Self {
            clock: SlotClock::new(topo.tau),
            vessels,
            uavs: grid_positions(topo.num_uavs, &topo.area),
            compute: topo.nominal_compute.clone(),
            bandwidth: topo.nominal_bandwidth.clone(),
            satellite: SatellitePair {
                current_compute: config.satellite.compute_cycles,
                incoming_compute: topo.incoming_compute,
                handover_time: ho.time_s,
                window: ho.window_s,
                isl_delay: ho.isl_delay_s,
            },
            small_scale: vec![vec![1.0; topo.num_uavs + 1]; v.count],
            serving_nominal: config.satellite.compute_cycles,
            next_handover,
        };
        (state, tasks)
    }

    /// Draws this slot's capacities and fading, in a fixed order.
    pub fn draw_slot(&mut self, config: &ScenarioConfig, topo: &Topology, rng: &mut ChaCha8Rng) {
        let mut nominal = topo.nominal_compute.clone();
        *nominal.last_mut().expect("satellite column") = self.serving_nominal;
        nominal.push(topo.incoming_compute);
        let mut compute = apply_fluctuation(&nominal, config.fluctuation.compute, rng);
        let incoming = compute.pop().expect("incoming satellite entry");
        self.compute = compute;
        self.bandwidth =
            apply_fluctuation(&topo.nominal_bandwidth, config.fluctuation.bandwidth, rng);
        self.satellite.current_compute = *self.compute.last().expect("satellite column");
        self.satellite.incoming_compute = incoming;
        if let Some(t) = self.next_handover {
            self.satellite.handover_time = t;
        }
        let k0 = topo.fading.rician_k;
        for row in &mut self.small_scale {
            for h in row.iter_mut() {
                *h = rician_power(k0, sample_scatter::<f64, _>(rng));
            }
        }
    }

    pub fn advance_vessels(&mut self, topo: &Topology) {
        advance_vessel_positions(&mut self.vessels, &topo.area, &self.clock);
    }

    /// `h_{v,k}` with UAVs at `uavs`.
    pub fn access_gain(&self, topo: &Topology, v: usize, k: usize, uavs: &[Vec2<f64>]) -> f64 {
        let target = topo.access_geometry(k, uavs);
        let d2 = target.slant_sq(&self.vessels[v].geometry()).max(1e-6);
        topo.fading.ref_path_loss / d2 * self.small_scale[v][k]
    }

    /// Access link capacity in bits per slot for a given bandwidth.
    pub fn access_bits(
        &self,
        topo: &Topology,
        v: usize,
        k: usize,
        bandwidth: f64,
        uavs: &[Vec2<f64>],
    ) -> Result<f64> {
        let h = self.access_gain(topo, v, k, uavs);
        Ok(shannon_rate(bandwidth, topo.vessel_power, h, topo.fading.noise_psd)? * topo.tau)
    }

    /// UAV `k` to HAP capacity in bits per slot.
    pub fn u2h_bits(&self, topo: &Topology, k: usize, uavs: &[Vec2<f64>]) -> Result<f64> {
        let uav = NodeGeometry::fixed(uavs[k], topo.uav_height);
        let loss = topo.u2h_loss.loss_db(&uav, &topo.hap, self.clock.index);
        let gain = topo.uav_gain * topo.hap_gain * db_to_linear(-loss);
        let b = self.bandwidth[topo.num_uavs + 1];
        Ok(shannon_rate(b, topo.uav_power, gain, topo.fading.noise_psd)? * topo.tau)
    }

    /// HAP to satellite capacity in bits per slot.
    pub fn h2s_bits(&self, topo: &Topology) -> Result<f64> {
        let eta = topo
            .h2s_loss
            .loss_db(&topo.hap, &topo.hap, self.clock.index);
        let gain = h2s_gain(topo.fading.rician_k, eta, topo.hap_gain, topo.sat_gain);
        let b = self.bandwidth[topo.num_uavs + 2];
        Ok(shannon_rate(b, topo.hap_power, gain, topo.fading.noise_psd)? * topo.tau)
    }

    /// Total access bandwidth `B_i(n)` of access node `k`.
    pub fn access_bandwidth(&self, k: usize) -> f64 {
        self.bandwidth[k]
    }
}

fn uniform<R: Rng + ?Sized>(rng: &mut R, [lo, hi]: [f64; 2]) -> f64 {
    if hi > lo {
        rng.random_range(lo..=hi)
    } else {
        lo
    }
}
