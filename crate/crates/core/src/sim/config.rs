//! Scenario description, loaded from TOML and validated before a run.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scheduler::DistanceScope;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
#[derive(Default)]
pub struct ScenarioConfig {
    pub simulation: SimulationSection,
    pub vessels: VesselSection,
    pub arrivals: ArrivalSection,
    pub area: AreaSection,
    pub uav: UavSection,
    pub bs: BsSection,
    pub hap: HapSection,
    pub satellite: SatelliteSection,
    pub channel: ChannelSection,
    pub fluctuation: FluctuationSection,
    pub handover: HandoverSection,
    pub scheduler: SchedulerSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulationSection {
    pub tau_s: f64,
    pub horizon_slots: u64,
    pub seed: u64,
    /// Track whole bits instead of fluid bits.
    pub integer_bits: bool,
}

impl Default for SimulationSection {
    fn default() -> Self {
        Self {
            tau_s: 0.1,
            horizon_slots: 2000,
            seed: 1,
            integer_bits: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VesselSection {
    pub count: usize,
    /// Uniform range of `D_v` in bits.
    pub data_bits: [f64; 2],
    /// Uniform range of `C_v` in cycles per bit.
    pub density_cycles_per_bit: [f64; 2],
    pub speed_mps: [f64; 2],
    pub tx_power_w: f64,
}

impl Default for VesselSection {
    fn default() -> Self {
        Self {
            count: 10,
            data_bits: [2e6, 10e6],
            density_cycles_per_bit: [100.0, 2000.0],
            speed_mps: [5.0, 15.0],
            tx_power_w: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ArrivalMode {
    /// Every task arrives at slot 0.
    #[default]
    AtStart,
    /// Vessel `v`'s single task arrives at slot `v * spacing_slots`.
    Staggered,
    /// Every vessel receives a fresh `D_v` every `period_slots`, starting at slot 0.
    Periodic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ArrivalSection {
    pub mode: ArrivalMode,
    pub spacing_slots: u64,
    pub period_slots: u64,
}

impl Default for ArrivalSection {
    fn default() -> Self {
        Self {
            mode: ArrivalMode::AtStart,
            spacing_slots: 1,
            period_slots: 100,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AreaSection {
    pub width_m: f64,
    pub height_m: f64,
}

impl Default for AreaSection {
    fn default() -> Self {
        Self {
            width_m: 2000.0,
            height_m: 2000.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct UavSection {
    pub count: usize,
    pub height_m: f64,
    pub compute_cycles: f64,
    pub bandwidth_hz: f64,
    pub tx_power_w: f64,
    pub antenna_gain_dbi: f64,
    pub max_speed_mps: f64,
    pub safe_distance_m: f64,
}

impl Default for UavSection {
    fn default() -> Self {
        Self {
            count: 6,
            height_m: 100.0,
            compute_cycles: 1e8,
            bandwidth_hz: 10e6,
            tx_power_w: 1.5,
            antenna_gain_dbi: 25.0,
            max_speed_mps: 15.0,
            safe_distance_m: 5.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BsSection {
    pub position_m: [f64; 2],
    pub height_m: f64,
    pub compute_cycles: f64,
    pub bandwidth_hz: f64,
}

impl Default for BsSection {
    fn default() -> Self {
        Self {
            position_m: [0.0, 1000.0],
            height_m: 30.0,
            compute_cycles: 3e8,
            bandwidth_hz: 20e6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HapSection {
    /// Defaults to the area centre.
    pub position_m: Option<[f64; 2]>,
    pub height_m: f64,
    pub compute_cycles: f64,
    /// `B_h`, bandwidth of each UAV-to-HAP link.
    pub bandwidth_hz: f64,
    pub tx_power_w: f64,
    pub antenna_gain_dbi: f64,
}

impl Default for HapSection {
    fn default() -> Self {
        Self {
            position_m: None,
            height_m: 20_000.0,
            compute_cycles: 3e8,
            bandwidth_hz: 20e6,
            tx_power_w: 2.5,
            antenna_gain_dbi: 30.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SatelliteSection {
    pub distance_m: f64,
    pub compute_cycles: f64,
    /// `B_s`, bandwidth of the HAP-to-satellite link.
    pub bandwidth_hz: f64,
    pub antenna_gain_dbi: f64,
}

impl Default for SatelliteSection {
    fn default() -> Self {
        Self {
            distance_m: 784e3,
            compute_cycles: 10e8,
            bandwidth_hz: 50e6,
            antenna_gain_dbi: 35.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum LossModelKind {
    #[default]
    FreeSpace,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CarrierSection {
    pub u2h: f64,
    pub h2s: f64,
}

impl Default for CarrierSection {
    fn default() -> Self {
        Self {
            u2h: 2e9,
            h2s: 20e9,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChannelSection {
    pub ref_path_loss_db: f64,
    pub rician_k: f64,
    pub noise_dbm_per_hz: f64,
    pub loss_model: LossModelKind,
    pub excess_loss_db: f64,
    pub carrier_hz: CarrierSection,
}

impl Default for ChannelSection {
    fn default() -> Self {
        Self {
            ref_path_loss_db: -30.0,
            rician_k: 10.0,
            noise_dbm_per_hz: -174.0,
            loss_model: LossModelKind::FreeSpace,
            excess_loss_db: 0.0,
            carrier_hz: CarrierSection::default(),
        }
    }
}

/// Half-widths of the uniform per-slot capacity fluctuation, as fractions of nominal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct FluctuationSection {
    pub compute: f64,
    pub bandwidth: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum HandoverMode {
    None,
    /// One handover at `time_s`.
    #[default]
    Single,
    /// A handover every `time_s` seconds, each to a fresh satellite.
    Periodic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HandoverSection {
    pub mode: HandoverMode,
    /// `T_s`.
    pub time_s: f64,
    /// `τ_hand`.
    pub window_s: f64,
    /// `T_p`.
    pub isl_delay_s: f64,
    /// Fractional compute gap of each incoming satellite, `1 − F_s' / F_s`.
    pub incoming_deficit: f64,
    /// `Q_{v,s'}` assumed on the incoming satellite before handover.
    pub incoming_backlog_bits: f64,
}

impl Default for HandoverSection {
    fn default() -> Self {
        Self {
            mode: HandoverMode::Single,
            time_s: 2.0,
            window_s: 1.0,
            isl_delay_s: 0.02,
            incoming_deficit: 0.0,
            incoming_backlog_bits: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SchedulerSection {
    pub distance_scope: DistanceScope,
    pub bcd_max_iters: usize,
    pub bcd_tol: f64,
    pub sca_max_iters: usize,
    pub sca_tol: f64,
}

impl Default for SchedulerSection {
    fn default() -> Self {
        Self {
            distance_scope: DistanceScope::default(),
            bcd_max_iters: 10,
            bcd_tol: 1e-3,
            sca_max_iters: 10,
            sca_tol: 1e-3,
        }
    }
}

/// A value outside the reference parameter ranges; the run can still proceed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Warning {
    pub key: String,
    pub message: String,
}

impl std::fmt::Display for Warning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.key, self.message)
    }
}

struct Checker {
    errors: Vec<String>,
    warnings: Vec<Warning>,
}

impl Checker {
    fn error(&mut self, key: &str, reason: impl std::fmt::Display) {
        self.errors.push(format!("{key}: {reason}"));
    }

    fn warn(&mut self, key: &str, message: impl Into<String>) {
        self.warnings.push(Warning {
            key: key.to_string(),
            message: message.into(),
        });
    }

    fn finite(&mut self, key: &str, x: f64) -> bool {
        if x.is_finite() {
            true
        } else {
            self.error(key, format!("must be finite (got {x})"));
            false
        }
    }

    fn positive(&mut self, key: &str, x: f64) {
        if self.finite(key, x) && x <= 0.0 {
            self.error(key, format!("must be positive (got {x})"));
        }
    }

    fn non_negative(&mut self, key: &str, x: f64) {
        if self.finite(key, x) && x < 0.0 {
            self.error(key, format!("must be non-negative (got {x})"));
        }
    }

    fn fraction(&mut self, key: &str, x: f64) {
        if self.finite(key, x) && !(0.0..=1.0).contains(&x) {
            self.error(key, format!("must lie in [0, 1] (got {x})"));
        }
    }

    fn range(&mut self, key: &str, r: [f64; 2], strictly_positive: bool) {
        let [lo, hi] = r;
        if !(self.finite(key, lo) && self.finite(key, hi)) {
            return;
        }
        if lo > hi {
            self.error(key, format!("lower bound {lo} exceeds upper bound {hi}"));
        }
        if strictly_positive && lo <= 0.0 {
            self.error(key, format!("must be positive (got {lo})"));
        } else if lo < 0.0 {
            self.error(key, format!("must be non-negative (got {lo})"));
        }
    }

    fn soft_range(&mut self, key: &str, r: [f64; 2], lo: f64, hi: f64) {
        if r[0] < lo || r[1] > hi {
            self.warn(key, format!("outside reference range [{lo}, {hi}]"));
        }
    }

    fn reference(&mut self, key: &str, x: f64, reference: f64) {
        if (x - reference).abs() > 1e-9 * reference.abs().max(1.0) {
            self.warn(
                key,
                format!("differs from reference value {reference} (got {x})"),
            );
        }
    }
}

impl ScenarioConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(vec![e.to_string()]))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml(&text)
    }

    /// Range-checks every parameter. Physical impossibilities are errors; values
    /// outside the reference ranges are returned as warnings.
    pub fn validate(&self) -> Result<Vec<Warning>> {
        let mut c = Checker {
            errors: Vec::new(),
            warnings: Vec::new(),
        };
        let s = &self.simulation;
        c.positive("simulation.tau_s", s.tau_s);
        c.reference("simulation.tau_s", s.tau_s, 0.1);

        let v = &self.vessels;
        if v.count == 0 {
            c.error("vessels.count", "must be at least 1");
        } else if !(10..=30).contains(&v.count) {
            c.warn("vessels.count", "outside reference range [10, 30]");
        }
        c.range("vessels.data_bits", v.data_bits, false);
        c.soft_range("vessels.data_bits", v.data_bits, 2e6, 10e6);
        c.range(
            "vessels.density_cycles_per_bit",
            v.density_cycles_per_bit,
            true,
        );
        c.soft_range(
            "vessels.density_cycles_per_bit",
            v.density_cycles_per_bit,
            100.0,
            2000.0,
        );
        c.range("vessels.speed_mps", v.speed_mps, false);
        c.soft_range("vessels.speed_mps", v.speed_mps, 5.0, 15.0);
        c.non_negative("vessels.tx_power_w", v.tx_power_w);

        let a = &self.arrivals;
        if a.mode == ArrivalMode::Periodic && a.period_slots == 0 {
            c.error(
                "arrivals.period_slots",
                "must be at least 1 in periodic mode",
            );
        }

        c.positive("area.width_m", self.area.width_m);
        c.positive("area.height_m", self.area.height_m);

        let u = &self.uav;
        if u.count != 6 {
            c.warn(
                "uav.count",
                format!("reference scenario uses 6 UAVs (got {})", u.count),
            );
        }
        c.positive("uav.height_m", u.height_m);
        c.non_negative("uav.compute_cycles", u.compute_cycles);
        c.non_negative("uav.bandwidth_hz", u.bandwidth_hz);
        c.non_negative("uav.tx_power_w", u.tx_power_w);
        c.finite("uav.antenna_gain_dbi", u.antenna_gain_dbi);
        c.non_negative("uav.max_speed_mps", u.max_speed_mps);
        c.non_negative("uav.safe_distance_m", u.safe_distance_m);
        if u.count > 0 && self.area.width_m > 0.0 && self.area.height_m > 0.0 {
            let grid = crate::model::grid_positions(u.count, &self.area());
            let closest = grid
                .iter()
                .enumerate()
                .flat_map(|(i, p)| grid[i + 1..].iter().map(move |q| p.dist(*q)))
                .fold(f64::INFINITY, f64::min);
            if closest < u.safe_distance_m {
                c.error(
                    "uav.safe_distance_m",
                    format!("initial UAV grid spacing {closest:.3} m is below the safe distance"),
                );
            }
        }

        let b = &self.bs;
        c.finite("bs.position_m", b.position_m[0]);
        c.finite("bs.position_m", b.position_m[1]);
        c.non_negative("bs.height_m", b.height_m);
        c.non_negative("bs.compute_cycles", b.compute_cycles);
        c.non_negative("bs.bandwidth_hz", b.bandwidth_hz);

        let h = &self.hap;
        c.positive("hap.height_m", h.height_m);
        c.non_negative("hap.compute_cycles", h.compute_cycles);
        c.non_negative("hap.bandwidth_hz", h.bandwidth_hz);
        c.non_negative("hap.tx_power_w", h.tx_power_w);
        c.finite("hap.antenna_gain_dbi", h.antenna_gain_dbi);

        let sat = &self.satellite;
        c.positive("satellite.distance_m", sat.distance_m);
        c.non_negative("satellite.compute_cycles", sat.compute_cycles);
        c.non_negative("satellite.bandwidth_hz", sat.bandwidth_hz);
        c.finite("satellite.antenna_gain_dbi", sat.antenna_gain_dbi);

        let ch = &self.channel;
        c.finite("channel.ref_path_loss_db", ch.ref_path_loss_db);
        c.non_negative("channel.rician_k", ch.rician_k);
        c.finite("channel.noise_dbm_per_hz", ch.noise_dbm_per_hz);
        c.finite("channel.excess_loss_db", ch.excess_loss_db);
        c.positive("channel.carrier_hz.u2h", ch.carrier_hz.u2h);
        c.positive("channel.carrier_hz.h2s", ch.carrier_hz.h2s);

        c.fraction("fluctuation.compute", self.fluctuation.compute);
        c.fraction("fluctuation.bandwidth", self.fluctuation.bandwidth);

        let ho = &self.handover;
        if ho.mode != HandoverMode::None {
            c.positive("handover.time_s", ho.time_s);
            c.positive("handover.window_s", ho.window_s);
            if ho.window_s >= ho.time_s {
                c.error(
                    "handover.window_s",
                    format!(
                        "must be shorter than handover.time_s ({} >= {})",
                        ho.window_s, ho.time_s
                    ),
                );
            }
        }
        c.non_negative("handover.isl_delay_s", ho.isl_delay_s);
        c.fraction("handover.incoming_deficit", ho.incoming_deficit);
        c.non_negative("handover.incoming_backlog_bits", ho.incoming_backlog_bits);

        let sc = &self.scheduler;
        if sc.bcd_max_iters == 0 {
            c.error("scheduler.bcd_max_iters", "must be at least 1");
        }
        c.positive("scheduler.bcd_tol", sc.bcd_tol);
        c.positive("scheduler.sca_tol", sc.sca_tol);

        if c.errors.is_empty() {
            Ok(c.warnings)
        } else {
            Err(Error::Config(c.errors))
        }
    }

    pub fn area(&self) -> crate::model::Area {
        crate::model::Area {
            width: self.area.width_m,
            height: self.area.height_m,
        }
    }
}
