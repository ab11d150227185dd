//! Channel gains and achievable link rates.
//!
//! Vessel access links (V2U, V2B) combine distance path loss with Rician
//! small-scale fading. The UAV-to-HAP and HAP-to-satellite links take their
//! large-scale loss from a pluggable [`LossModel`]. All runtime math is linear;
//! dB values are converted once when parameters are built.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{NodeGeometry, Server};
use crate::scalar::Real;

const SPEED_OF_LIGHT: f64 = 299_792_458.0;

pub fn db_to_linear<S: Real>(db: S) -> S {
    S::lit(10.0).powf(db / S::lit(10.0))
}

pub fn linear_to_db<S: Real>(x: S) -> S {
    S::lit(10.0) * x.log10()
}

/// dBm/Hz to W/Hz.
pub fn dbm_to_watts<S: Real>(dbm: S) -> S {
    db_to_linear(dbm - S::lit(30.0))
}

/// Reference path loss, Rician factor and noise density, all linear.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FadingParams<S> {
    pub ref_path_loss: S,
    pub rician_k: S,
    /// W/Hz.
    pub noise_psd: S,
}

impl<S: Real> FadingParams<S> {
    pub fn from_db(ref_path_loss_db: S, rician_k: S, noise_dbm_per_hz: S) -> Result<Self> {
        let p = Self {
            ref_path_loss: db_to_linear(ref_path_loss_db),
            rician_k,
            noise_psd: dbm_to_watts(noise_dbm_per_hz),
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.ref_path_loss > S::zero()) {
            return Err(Error::input("ref_path_loss", "must be positive"));
        }
        if !(self.rician_k >= S::zero()) {
            return Err(Error::input("rician_k", "must be non-negative"));
        }
        if !(self.noise_psd > S::zero()) {
            return Err(Error::input("noise_psd", "must be positive"));
        }
        Ok(())
    }
}

/// Large-scale loss in dB between two endpoints.
pub trait LossModel: Send + Sync {
    fn loss_db(&self, tx: &NodeGeometry<f64>, rx: &NodeGeometry<f64>, slot: u64) -> f64;
}

/// Free-space path loss at a carrier frequency plus a constant excess term.
///
/// With `fixed_distance` set, the endpoint geometry is ignored (used for the
/// HAP-to-satellite hop whose range is a configured constant).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FreeSpaceLoss {
    pub carrier_hz: f64,
    pub excess_db: f64,
    pub fixed_distance: Option<f64>,
}

impl FreeSpaceLoss {
    pub fn fspl_db(distance_m: f64, carrier_hz: f64) -> f64 {
        20.0 * (4.0 * std::f64::consts::PI * distance_m * carrier_hz / SPEED_OF_LIGHT).log10()
    }
}

impl LossModel for FreeSpaceLoss {
    fn loss_db(&self, tx: &NodeGeometry<f64>, rx: &NodeGeometry<f64>, _slot: u64) -> f64 {
        let d = self
            .fixed_distance
            .unwrap_or_else(|| tx.slant_sq(rx).sqrt())
            .max(1.0);
        (Self::fspl_db(d, self.carrier_hz) + self.excess_db).max(0.0)
    }
}

/// Gain of one vessel access link in one slot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelGain<S> {
    pub vessel: usize,
    pub target: Server,
    pub gain: S,
    pub slot: u64,
}

/// Distance-dependent part `L0 / (H^2 + ‖W_i − W_v‖^2)`.
pub fn path_loss_gain<S: Real>(
    vessel: &NodeGeometry<S>,
    target: &NodeGeometry<S>,
    params: &FadingParams<S>,
) -> Result<S> {
    let d2 = target.slant_sq(vessel);
    if !(d2 > S::zero()) {
        return Err(Error::InvalidGeometry(
            "vessel coincides with access node".into(),
        ));
    }
    Ok(params.ref_path_loss / d2)
}

/// `|h^R|^2` for a given complex scattering sample `o = (re, im)`.
pub fn rician_power<S: Real>(rician_k: S, o: (S, S)) -> S {
    if rician_k.is_infinite() {
        return S::one();
    }
    let one = S::one();
    let los = (rician_k / (one + rician_k)).sqrt();
    let nlos = (one / (one + rician_k)).sqrt();
    let re = los + nlos * o.0;
    let im = nlos * o.1;
    re * re + im * im
}

/// Draws `o ~ CN(0, 1)`.
pub fn sample_scatter<S: Real, R: Rng + ?Sized>(rng: &mut R) -> (S, S) {
    let half = std::f64::consts::FRAC_1_SQRT_2;
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    (S::lit(re * half), S::lit(im * half))
}

/// V2U/V2B gain `h = h^L |h^R|^2` for a given scattering sample.
pub fn v2x_gain_with<S: Real>(
    vessel: &NodeGeometry<S>,
    target: &NodeGeometry<S>,
    params: &FadingParams<S>,
    scatter: (S, S),
) -> Result<S> {
    Ok(path_loss_gain(vessel, target, params)? * rician_power(params.rician_k, scatter))
}

/// V2U/V2B gain with a freshly drawn small-scale fading sample.
pub fn v2x_gain<S: Real, R: Rng + ?Sized>(
    vessel: &NodeGeometry<S>,
    target: &NodeGeometry<S>,
    params: &FadingParams<S>,
    rng: &mut R,
) -> Result<S> {
    let o = sample_scatter(rng);
    v2x_gain_with(vessel, target, params, o)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LinkKind {
    V2U,
    V2B,
    U2H,
    H2S,
}

/// How the received power of a link is described.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LinkGain<S> {
    /// Linear power gain (V2U, V2B, and the H2S `h_{h,s}`).
    Channel(S),
    /// Antenna gains (linear) and a total path loss in dB (U2H).
    AntennaLoss { tx_gain: S, rx_gain: S, loss_db: S },
}

impl<S: Real> LinkGain<S> {
    pub fn linear(&self) -> S {
        match *self {
            LinkGain::Channel(h) => h,
            LinkGain::AntennaLoss {
                tx_gain,
                rx_gain,
                loss_db,
            } => tx_gain * rx_gain * db_to_linear(-loss_db),
        }
    }
}

/// `h_{h,s} = K0 · 10^(−η/10) · G_h · G_s`.
pub fn h2s_gain<S: Real>(rician_k: S, large_scale_db: S, hap_gain: S, sat_gain: S) -> S {
    rician_k * db_to_linear(-large_scale_db) * hap_gain * sat_gain
}

/// `B log2(1 + P h / (N0 B))` in bits per second; zero for zero bandwidth.
pub fn shannon_rate<S: Real>(bandwidth: S, tx_power: S, gain: S, noise_psd: S) -> Result<S> {
    if !(bandwidth >= S::zero()) {
        return Err(Error::input("bandwidth", "must be non-negative"));
    }
    if !(tx_power >= S::zero()) {
        return Err(Error::input("tx_power", "must be non-negative"));
    }
    if !(gain >= S::zero()) {
        return Err(Error::input("gain", "must be non-negative"));
    }
    if bandwidth == S::zero() || gain == S::zero() || tx_power == S::zero() {
        return Ok(S::zero());
    }
    let snr = tx_power * gain / (noise_psd * bandwidth);
    Ok(bandwidth * snr.ln_1p() / S::LN_2())
}

/// Achievable rate (bits/s) of a V2U, V2B, U2H or H2S link.
pub fn link_rate<S: Real>(
    kind: LinkKind,
    bandwidth: S,
    tx_power: S,
    gain: LinkGain<S>,
    params: &FadingParams<S>,
) -> Result<S> {
    match (kind, &gain) {
        (LinkKind::U2H, LinkGain::AntennaLoss { .. }) | (_, LinkGain::Channel(_)) => {}
        _ => {
            return Err(Error::input(
                "gain",
                format!("{kind:?} expects a linear channel gain"),
            ))
        }
    }
    shannon_rate(bandwidth, tx_power, gain.linear(), params.noise_psd)
}

/// Slots during which handed-over backlog is in transit: `ceil(T_p / tau)`.
pub fn isl_delay_slots(propagation_delay: f64, tau: f64) -> u64 {
    assert!(tau > 0.0 && propagation_delay >= 0.0);
    let ratio = propagation_delay / tau;
    // 0.2 / 0.1 evaluates slightly above 2
    let snapped = (ratio - ratio.round()).abs() < 1e-9;
    if snapped {
        ratio.round() as u64
    } else {
        ratio.ceil() as u64
    }
}
