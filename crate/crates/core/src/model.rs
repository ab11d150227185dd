//! Domain types for nodes, geometry, tasks and time.

use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::scalar::Real;

/// Horizontal position or displacement in meters.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec2<S> {
    pub x: S,
    pub y: S,
}

impl<S: Real> Vec2<S> {
    pub fn new(x: S, y: S) -> Self {
        Self { x, y }
    }

    pub fn zero() -> Self {
        Self::new(S::zero(), S::zero())
    }

    pub fn dot(self, other: Self) -> S {
        self.x * other.x + self.y * other.y
    }

    pub fn norm_sq(self) -> S {
        self.dot(self)
    }

    pub fn norm(self) -> S {
        self.x.hypot(self.y)
    }

    pub fn dist(self, other: Self) -> S {
        (self - other).norm()
    }

    pub fn dist_sq(self, other: Self) -> S {
        (self - other).norm_sq()
    }
}

impl<S: Real> Add for Vec2<S> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.x + o.x, self.y + o.y)
    }
}

impl<S: Real> AddAssign for Vec2<S> {
    fn add_assign(&mut self, o: Self) {
        self.x += o.x;
        self.y += o.y;
    }
}

impl<S: Real> Sub for Vec2<S> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.x - o.x, self.y - o.y)
    }
}

impl<S: Real> Neg for Vec2<S> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y)
    }
}

impl<S: Real> Mul<S> for Vec2<S> {
    type Output = Self;
    fn mul(self, k: S) -> Self {
        Self::new(self.x * k, self.y * k)
    }
}

/// Discrete time: slot index `n`, slot length `tau` seconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlotClock {
    pub index: u64,
    pub tau: f64,
}

impl SlotClock {
    pub fn new(tau: f64) -> Self {
        assert!(tau > 0.0, "slot length must be positive");
        Self { index: 0, tau }
    }

    pub fn at(index: u64, tau: f64) -> Self {
        Self {
            index,
            ..Self::new(tau)
        }
    }

    /// `T(n) = n * tau`.
    pub fn time(&self) -> f64 {
        self.index as f64 * self.tau
    }

    pub fn tick(&mut self) {
        self.index += 1;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NodeKind {
    Vessel,
    Uav,
    Bs,
    Hap,
    Satellite,
}

/// A computing server that can hold vessel data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Server {
    Uav(usize),
    Bs,
    Hap,
    Sat,
}

impl Server {
    /// Column of this server in a per-vessel queue row; column 0 is the vessel itself.
    pub fn column(self, num_uavs: usize) -> usize {
        match self {
            Server::Uav(u) => 1 + u,
            Server::Bs => num_uavs + 1,
            Server::Hap => num_uavs + 2,
            Server::Sat => num_uavs + 3,
        }
    }

    pub fn from_column(col: usize, num_uavs: usize) -> Option<Self> {
        match col {
            0 => None,
            c if c <= num_uavs => Some(Server::Uav(c - 1)),
            c if c == num_uavs + 1 => Some(Server::Bs),
            c if c == num_uavs + 2 => Some(Server::Hap),
            c if c == num_uavs + 3 => Some(Server::Sat),
            _ => None,
        }
    }

    /// All servers in column order.
    pub fn all(num_uavs: usize) -> impl Iterator<Item = Server> {
        (0..num_uavs)
            .map(Server::Uav)
            .chain([Server::Bs, Server::Hap, Server::Sat])
    }

    pub fn kind(self) -> NodeKind {
        match self {
            Server::Uav(_) => NodeKind::Uav,
            Server::Bs => NodeKind::Bs,
            Server::Hap => NodeKind::Hap,
            Server::Sat => NodeKind::Satellite,
        }
    }

    /// Offloading target a vessel may associate with.
    pub fn is_access(self) -> bool {
        matches!(self, Server::Uav(_) | Server::Bs)
    }

    pub fn label(self) -> String {
        match self {
            Server::Uav(u) => format!("uav{u}"),
            Server::Bs => "bs".into(),
            Server::Hap => "hap".into(),
            Server::Sat => "sat".into(),
        }
    }
}

/// Position, fixed height and speed bound of a node.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NodeGeometry<S> {
    pub position: Vec2<S>,
    pub height: S,
    /// Zero for static nodes.
    pub max_speed: S,
}

impl<S: Real> NodeGeometry<S> {
    pub fn fixed(position: Vec2<S>, height: S) -> Self {
        Self {
            position,
            height,
            max_speed: S::zero(),
        }
    }

    pub fn mobile(position: Vec2<S>, height: S, max_speed: S) -> Self {
        Self {
            position,
            height,
            max_speed,
        }
    }

    /// Squared 3-D distance to `other`.
    pub fn slant_sq(&self, other: &Self) -> S {
        let dh = self.height - other.height;
        dh * dh + self.position.dist_sq(other.position)
    }
}

/// `‖W_u(n) − W_u(n−1)‖` for one UAV.
pub fn displacement<S: Real>(now: &NodeGeometry<S>, prev: &NodeGeometry<S>) -> S {
    now.position.dist(prev.position)
}

/// A vessel's offloading task.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VesselTask {
    pub data_bits: f64,
    /// CPU cycles per bit.
    pub density: f64,
    pub arrival_slot: u64,
}

/// Per-slot resources of one server.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ServerCapacity {
    /// Cycles per slot before fluctuation.
    pub nominal_compute: f64,
    /// Cycles per slot available this slot.
    pub compute: f64,
    /// Hz before fluctuation.
    pub nominal_bandwidth: f64,
    /// Hz available this slot (access bandwidth for UAV/BS, uplink for HAP/satellite).
    pub bandwidth: f64,
    /// Transmit power in W (UAV to HAP, HAP to satellite; zero elsewhere).
    pub tx_power: f64,
    /// Linear antenna gain.
    pub antenna_gain: f64,
}

impl ServerCapacity {
    pub fn new(compute: f64, bandwidth: f64, tx_power: f64, antenna_gain: f64) -> Self {
        Self {
            nominal_compute: compute,
            compute,
            nominal_bandwidth: bandwidth,
            bandwidth,
            tx_power,
            antenna_gain,
        }
    }
}

/// Current and incoming satellite with the handover timing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SatellitePair {
    /// Cycles per slot of the serving satellite this slot.
    pub current_compute: f64,
    /// Cycles per slot of the incoming satellite this slot.
    pub incoming_compute: f64,
    /// Handover instant `T_s` in seconds.
    pub handover_time: f64,
    /// Pre-handover window length in seconds.
    pub window: f64,
    /// ISL propagation delay in seconds.
    pub isl_delay: f64,
}

impl SatellitePair {
    /// Start of the pre-handover window.
    pub fn window_start(&self) -> f64 {
        self.handover_time - self.window
    }
}

/// Rectangular service area `[0, width] x [0, height]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Area {
    pub width: f64,
    pub height: f64,
}

impl Area {
    pub fn contains(&self, p: Vec2<f64>) -> bool {
        (0.0..=self.width).contains(&p.x) && (0.0..=self.height).contains(&p.y)
    }

    pub fn center(&self) -> Vec2<f64> {
        Vec2::new(self.width / 2.0, self.height / 2.0)
    }
}

/// A vessel's kinematic state: straight-line motion at a constant speed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VesselMotion {
    pub position: Vec2<f64>,
    pub speed: f64,
    /// Radians, counter-clockwise from the +x axis.
    pub heading: f64,
}

impl VesselMotion {
    pub fn geometry(&self) -> NodeGeometry<f64> {
        NodeGeometry::mobile(self.position, 0.0, self.speed)
    }
}

/// Fold a 1-D coordinate back into `[0, len]`, returning whether the direction flipped.
fn reflect(mut x: f64, len: f64) -> (f64, bool) {
    if len <= 0.0 {
        return (0.0, false);
    }
    let period = 2.0 * len;
    x = x.rem_euclid(period);
    if x > len {
        (period - x, true)
    } else {
        (x, false)
    }
}

/// Moves every vessel `speed * tau` along its heading, reflecting off the area walls.
pub fn advance_vessel_positions(vessels: &mut [VesselMotion], area: &Area, clock: &SlotClock) {
    for v in vessels.iter_mut() {
        let step = v.speed * clock.tau;
        if step == 0.0 {
            continue;
        }
        let (dx, dy) = (v.heading.cos() * step, v.heading.sin() * step);
        let (x, flip_x) = reflect(v.position.x + dx, area.width);
        let (y, flip_y) = reflect(v.position.y + dy, area.height);
        let (mut hx, mut hy) = (v.heading.cos(), v.heading.sin());
        if flip_x {
            hx = -hx;
        }
        if flip_y {
            hy = -hy;
        }
        v.position = Vec2::new(x, y);
        v.heading = hy.atan2(hx);
    }
}

/// Cell-centre grid placement of `count` nodes over the area.
pub fn grid_positions(count: usize, area: &Area) -> Vec<Vec2<f64>> {
    if count == 0 {
        return Vec::new();
    }
    let cols = (count as f64).sqrt().ceil() as usize;
    let rows = count.div_ceil(cols);
    (0..count)
        .map(|k| {
            let (r, c) = (k / cols, k % cols);
            Vec2::new(
                (2 * c + 1) as f64 * area.width / (2 * cols) as f64,
                (2 * r + 1) as f64 * area.height / (2 * rows) as f64,
            )
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const AREA: Area = Area {
        width: 2000.0,
        height: 2000.0,
    };

    #[test]
    fn clock_time_is_index_times_tau() {
        let mut c = SlotClock::new(0.1);
        assert_eq!(c.time(), 0.0);
        c.tick();
        c.tick();
        assert!((c.time() - 0.2).abs() < 1e-15);
    }

    #[test]
    fn vessel_moves_speed_times_tau() {
        let mut v = [VesselMotion {
            position: AREA.center(),
            speed: 10.0,
            heading: 0.7,
        }];
        advance_vessel_positions(&mut v, &AREA, &SlotClock::new(0.1));
        assert!((v[0].position.dist(AREA.center()) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn stationary_vessel_stays() {
        let start = Vec2::new(13.0, 17.0);
        let mut v = [VesselMotion {
            position: start,
            speed: 0.0,
            heading: 1.0,
        }];
        advance_vessel_positions(&mut v, &AREA, &SlotClock::new(0.1));
        assert_eq!(v[0].position, start);
    }

    #[test]
    fn vessel_reflects_off_east_wall() {
        let mut v = [VesselMotion {
            position: Vec2::new(1999.5, 1000.0),
            speed: 10.0,
            heading: 0.0,
        }];
        advance_vessel_positions(&mut v, &AREA, &SlotClock::new(0.1));
        assert!((v[0].position.x - 1999.5).abs() < 1e-9);
        assert!((v[0].position.y - 1000.0).abs() < 1e-9);
        // now heading west
        assert!(v[0].heading.cos() < -0.999);
    }

    #[test]
    fn displacement_examples() {
        let g = |x: f64, y: f64| NodeGeometry::mobile(Vec2::new(x, y), 100.0, 15.0);
        assert_eq!(displacement(&g(3.0, 4.0), &g(0.0, 0.0)), 5.0);
        assert_eq!(displacement(&g(1.0, 1.0), &g(1.0, 1.0)), 0.0);
        let d = displacement(&g(1.0, 1.0 + 15.0 * 0.1), &g(1.0, 1.0));
        assert!((d - 1.5).abs() < 1e-12);
    }

    #[test]
    fn server_columns_round_trip() {
        for s in Server::all(6) {
            assert_eq!(Server::from_column(s.column(6), 6), Some(s));
        }
        assert_eq!(Server::from_column(0, 6), None);
        assert_eq!(Server::from_column(10, 6), None);
    }

    #[test]
    fn six_uav_grid_is_three_by_two() {
        let p = grid_positions(6, &AREA);
        assert_eq!(p.len(), 6);
        assert!((p[0].x - 2000.0 / 6.0).abs() < 1e-9);
        assert!((p[0].y - 500.0).abs() < 1e-9);
        assert!((p[5].y - 1500.0).abs() < 1e-9);
    }

    proptest::proptest! {
        #[test]
        fn vessels_stay_inside(x in 0.0..2000.0f64, y in 0.0..2000.0f64,
                               speed in 0.0..500.0f64, heading in 0.0..6.3f64, steps in 1usize..50) {
            let mut v = [VesselMotion { position: Vec2::new(x, y), speed, heading }];
            for _ in 0..steps {
                advance_vessel_positions(&mut v, &AREA, &SlotClock::new(0.1));
                proptest::prop_assert!(AREA.contains(v[0].position));
            }
        }
    }
}
