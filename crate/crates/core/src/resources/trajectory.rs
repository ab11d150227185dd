//! UAV trajectory planning by successive convex approximation.
//!
//! Each access rate `R(φ) = B log2(1 + g / (H² + φ))` is convex and decreasing in
//! the squared horizontal distance `φ = ‖W_u − W_v‖²`, so its tangent at `φ^k`
//! is a global lower bound. Maximizing the sum of tangents is equivalent to
//! minimizing `Σ |∇R| ‖W_u − W_v‖²`, a weighted least-squares problem whose
//! solution is the projection of the weighted centroids onto the feasible set
//! (speed balls intersected with linearized separation half-planes) in the
//! metric induced by the per-UAV weights. The projection is computed with
//! Dykstra's alternating projections.

use serde::Serialize;

use crate::model::Vec2;
use crate::scalar::Real;

const MAX_SWEEPS: usize = 2000;

/// One vessel associated with a UAV in the current slot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AssociatedLink<S> {
    pub uav: usize,
    pub vessel_position: Vec2<S>,
    /// Allocated bandwidth `B_{v,u}` (Hz).
    pub bandwidth: S,
    /// `g = P_v L0 |h^R|² / (N0 B_{v,u})`, so that the SNR is `g / (H² + φ)`.
    pub snr_coeff: S,
}

impl<S: Real> AssociatedLink<S> {
    pub fn new(
        uav: usize,
        vessel_position: Vec2<S>,
        bandwidth: S,
        tx_power: S,
        ref_path_loss: S,
        small_scale: S,
        noise_psd: S,
    ) -> Self {
        let snr_coeff = if bandwidth > S::zero() {
            tx_power * ref_path_loss * small_scale / (noise_psd * bandwidth)
        } else {
            S::zero()
        };
        AssociatedLink {
            uav,
            vessel_position,
            bandwidth,
            snr_coeff,
        }
    }

    /// `R(φ)` in bits per second.
    pub fn rate(&self, height_sq: S, phi: S) -> S {
        if self.bandwidth <= S::zero() || self.snr_coeff <= S::zero() {
            return S::zero();
        }
        self.bandwidth * (self.snr_coeff / (height_sq + phi)).ln_1p() / S::LN_2()
    }

    /// `dR/dφ = −B g / (ln2 (H² + φ)(H² + φ + g))`.
    pub fn rate_gradient(&self, height_sq: S, phi: S) -> S {
        if self.bandwidth <= S::zero() || self.snr_coeff <= S::zero() {
            return S::zero();
        }
        let d = height_sq + phi;
        -self.bandwidth * self.snr_coeff / (S::LN_2() * d * (d + self.snr_coeff))
    }

    /// First-order expansion of `R` around `phi_k`, evaluated at `phi`.
    pub fn rate_lower_bound(&self, height_sq: S, phi_k: S, phi: S) -> S {
        self.rate(height_sq, phi_k) + self.rate_gradient(height_sq, phi_k) * (phi - phi_k)
    }
}

/// `‖ψ‖² + 2ψᵀ(Δ − ψ)`: the tangent lower bound of `‖Δ‖²` at `ψ`.
pub fn separation_lower_bound<S: Real>(psi: Vec2<S>, delta: Vec2<S>) -> S {
    psi.norm_sq() + S::lit(2.0) * psi.dot(delta - psi)
}

/// Trajectory subproblem for one slot.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryProblem<S> {
    /// `W_u(n−1)`.
    pub previous: Vec<Vec2<S>>,
    /// UAV altitude `H_u`.
    pub height: S,
    /// `S_max τ`.
    pub max_step: S,
    pub safe_distance: S,
    pub links: Vec<AssociatedLink<S>>,
}

impl<S: Real> TrajectoryProblem<S> {
    pub fn num_uavs(&self) -> usize {
        self.previous.len()
    }

    /// Sum of access rates (bits/s) with UAVs at `positions`.
    pub fn objective(&self, positions: &[Vec2<S>]) -> S {
        let h2 = self.height * self.height;
        self.links
            .iter()
            .map(|l| l.rate(h2, positions[l.uav].dist_sq(l.vessel_position)))
            .sum()
    }

    /// Checks the speed bound and the pairwise separation for `positions`.
    pub fn is_feasible(&self, positions: &[Vec2<S>]) -> bool {
        let step_tol = self.max_step * S::lit(1e-9) + S::lit(1e-9);
        let speed_ok = positions
            .iter()
            .zip(&self.previous)
            .all(|(p, q)| p.dist(*q) <= self.max_step + step_tol);
        speed_ok && min_separation(positions).is_none_or(|d| d >= self.safe_distance)
    }
}

fn min_separation<S: Real>(positions: &[Vec2<S>]) -> Option<S> {
    let mut best: Option<S> = None;
    for (i, p) in positions.iter().enumerate() {
        for q in &positions[i + 1..] {
            let d = p.dist(*q);
            best = Some(best.map_or(d, |b| b.min(d)));
        }
    }
    best
}

/// An SCA iterate with its linearization points.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrajectoryIterate<S> {
    pub positions: Vec<Vec2<S>>,
    /// `φ^k` per link, in the order of `TrajectoryProblem::links`.
    pub phi: Vec<S>,
    /// `ψ^k_{u,u'} = W_u − W_{u'}` for every pair `u < u'`.
    pub psi: Vec<((usize, usize), Vec2<S>)>,
    pub k: usize,
    /// True objective at `positions`.
    pub objective: S,
}

impl<S: Real> TrajectoryIterate<S> {
    pub fn at(problem: &TrajectoryProblem<S>, positions: Vec<Vec2<S>>, k: usize) -> Self {
        let phi = problem
            .links
            .iter()
            .map(|l| positions[l.uav].dist_sq(l.vessel_position))
            .collect();
        let mut psi = Vec::new();
        for u in 0..positions.len() {
            for w in u + 1..positions.len() {
                psi.push(((u, w), positions[u] - positions[w]));
            }
        }
        let objective = problem.objective(&positions);
        TrajectoryIterate {
            positions,
            phi,
            psi,
            k,
            objective,
        }
    }
}

/// Result of one convexified step.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaStep<S> {
    pub iterate: TrajectoryIterate<S>,
    /// Set when the surrogate could not be solved to a feasible point; the
    /// incumbent positions are returned unchanged.
    pub flagged: bool,
    pub sweeps: usize,
}

#[derive(Debug, Clone, Copy)]
enum Constraint<S> {
    Ball {
        uav: usize,
        center: Vec2<S>,
        radius: S,
    },
    /// `gᵀ(W_a − W_b) ≥ rhs`.
    Half {
        a: usize,
        b: usize,
        g: Vec2<S>,
        rhs: S,
    },
}

impl<S: Real> Constraint<S> {
    fn blocks(&self) -> (usize, Option<usize>) {
        match *self {
            Constraint::Ball { uav, .. } => (uav, None),
            Constraint::Half { a, b, .. } => (a, Some(b)),
        }
    }

    /// Projection in the metric `Σ_u w_u ‖·‖²`, written in place.
    fn project(&self, x: &mut [Vec2<S>], w: &[S]) {
        match *self {
            Constraint::Ball {
                uav,
                center,
                radius,
            } => {
                let d = x[uav] - center;
                let n = d.norm();
                if n > radius {
                    x[uav] = center + d * (radius / n);
                }
            }
            Constraint::Half { a, b, g, rhs } => {
                let slack = g.dot(x[a] - x[b]) - rhs;
                if slack < S::zero() {
                    let lambda = -slack / (g.norm_sq() * (S::one() / w[a] + S::one() / w[b]));
                    x[a] += g * (lambda / w[a]);
                    x[b] = x[b] - g * (lambda / w[b]);
                }
            }
        }
    }

    fn violation(&self, x: &[Vec2<S>]) -> S {
        match *self {
            Constraint::Ball {
                uav,
                center,
                radius,
            } => (x[uav].dist(center) - radius).max(S::zero()),
            Constraint::Half { a, b, g, rhs } => {
                ((rhs - g.dot(x[a] - x[b])) / g.norm()).max(S::zero())
            }
        }
    }
}

/// Solves the convex surrogate built at `iterate` and returns the new iterate.
pub fn sca_step<S: Real>(
    problem: &TrajectoryProblem<S>,
    iterate: &TrajectoryIterate<S>,
) -> ScaStep<S> {
    let u_count = problem.num_uavs();
    let h2 = problem.height * problem.height;
    let two = S::lit(2.0);

    let mut weight = vec![S::zero(); u_count];
    let mut pull = vec![Vec2::zero(); u_count];
    for (l, &phi) in problem.links.iter().zip(&iterate.phi) {
        let c = -l.rate_gradient(h2, phi);
        weight[l.uav] += c;
        pull[l.uav] += l.vessel_position * c;
    }
    let heaviest = weight.iter().copied().fold(S::zero(), S::max);
    if heaviest <= S::zero() {
        return ScaStep {
            iterate: iterate.clone(),
            flagged: false,
            sweeps: 0,
        };
    }
    // UAVs without vessels are held near their incumbent by a negligible weight.
    let anchor = heaviest * S::lit(1e-9);
    let target: Vec<Vec2<S>> = (0..u_count)
        .map(|u| {
            if weight[u] > S::zero() {
                pull[u] * (S::one() / weight[u])
            } else {
                weight[u] = anchor;
                iterate.positions[u]
            }
        })
        .collect();

    let mut constraints: Vec<Constraint<S>> = (0..u_count)
        .map(|u| Constraint::Ball {
            uav: u,
            center: problem.previous[u],
            radius: problem.max_step,
        })
        .collect();
    let margin = S::lit(1e-6) * (S::one() + problem.safe_distance);
    let d_lin = problem.safe_distance + margin;
    let reach = S::lit(4.0) * problem.max_step;
    let skip_beyond = reach + (reach * reach + d_lin * d_lin).sqrt();
    for &((a, b), psi) in &iterate.psi {
        if problem.safe_distance > S::zero() && psi.norm() <= skip_beyond {
            constraints.push(Constraint::Half {
                a,
                b,
                g: psi * two,
                rhs: d_lin * d_lin + psi.norm_sq(),
            });
        }
    }

    let mut x = target;
    let mut incr = vec![[Vec2::zero(); 2]; constraints.len()];
    let scale = problem.max_step.max(S::one());
    let tol = (S::lit(1e-10) * scale).powi(2);
    let total_weight: S = weight.iter().copied().sum();
    let mut sweeps = 0;
    while sweeps < MAX_SWEEPS {
        sweeps += 1;
        let mut moved = S::zero();
        for (c, p) in constraints.iter().zip(incr.iter_mut()) {
            let (a, b) = c.blocks();
            let before_a = x[a];
            let before_b = b.map(|b| x[b]);
            x[a] += p[0];
            if let Some(b) = b {
                x[b] += p[1];
            }
            let ya = x[a];
            let yb = b.map(|b| x[b]);
            c.project(&mut x, &weight);
            p[0] = ya - x[a];
            moved += weight[a] * x[a].dist_sq(before_a);
            if let (Some(b), Some(yb), Some(bb)) = (b, yb, before_b) {
                p[1] = yb - x[b];
                moved += weight[b] * x[b].dist_sq(bb);
            }
        }
        if moved <= tol * total_weight {
            break;
        }
    }

    let eps = S::lit(1e-9) * scale;
    let feasible = constraints.iter().all(|c| c.violation(&x) <= eps);
    if !feasible {
        return ScaStep {
            iterate: iterate.clone(),
            flagged: true,
            sweeps,
        };
    }
    ScaStep {
        iterate: TrajectoryIterate::at(problem, x, iterate.k + 1),
        flagged: false,
        sweeps,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrajectoryOutcome<S> {
    pub positions: Vec<Vec2<S>>,
    /// Accepted SCA iterations.
    pub iterations: usize,
    /// True objective at the start and after each accepted iteration.
    pub objective_trace: Vec<S>,
    pub flagged: bool,
}

/// Runs SCA from the previous positions until the relative improvement of the
/// true objective drops below `tol` or `max_iters` steps have been taken.
///
/// A step is accepted only if it does not lower the true objective and the
/// result satisfies the speed bound and the true separation constraint.
pub fn optimize_trajectories<S: Real>(
    problem: &TrajectoryProblem<S>,
    max_iters: usize,
    tol: S,
) -> TrajectoryOutcome<S> {
    optimize_trajectories_from(problem, problem.previous.clone(), max_iters, tol)
}

/// Like [`optimize_trajectories`] but starting from a given feasible point.
pub fn optimize_trajectories_from<S: Real>(
    problem: &TrajectoryProblem<S>,
    start: Vec<Vec2<S>>,
    max_iters: usize,
    tol: S,
) -> TrajectoryOutcome<S> {
    let start = if problem.is_feasible(&start) {
        start
    } else {
        problem.previous.clone()
    };
    let mut current = TrajectoryIterate::at(problem, start, 0);
    let mut trace = vec![current.objective];
    let mut flagged = false;
    if problem.links.is_empty() {
        return TrajectoryOutcome {
            positions: current.positions,
            iterations: 0,
            objective_trace: trace,
            flagged,
        };
    }
    for _ in 0..max_iters {
        let step = sca_step(problem, &current);
        if step.flagged {
            flagged = true;
            break;
        }
        let next = step.iterate;
        if next.objective < current.objective || !problem.is_feasible(&next.positions) {
            break;
        }
        let gain = next.objective - current.objective;
        let converged = gain <= tol * current.objective.abs();
        current = next;
        trace.push(current.objective);
        if converged {
            break;
        }
    }
    TrajectoryOutcome {
        positions: current.positions,
        iterations: trace.len() - 1,
        objective_trace: trace,
        flagged,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn link(uav: usize, x: f64, y: f64) -> AssociatedLink<f64> {
        AssociatedLink::new(uav, Vec2::new(x, y), 1e6, 1.0, 1e-3, 1.0, 10f64.powf(-20.4))
    }

    fn problem(
        previous: Vec<Vec2<f64>>,
        links: Vec<AssociatedLink<f64>>,
    ) -> TrajectoryProblem<f64> {
        TrajectoryProblem {
            previous,
            height: 100.0,
            max_step: 1.5,
            safe_distance: 5.0,
            links,
        }
    }

    #[test]
    fn reaches_nearby_vessel() {
        let p = problem(vec![Vec2::new(0.0, 0.0)], vec![link(0, 0.6, 0.8)]);
        let it = TrajectoryIterate::at(&p, p.previous.clone(), 0);
        let step = sca_step(&p, &it);
        assert!(step.iterate.positions[0].dist(Vec2::new(0.6, 0.8)) < 1e-9);
    }

    #[test]
    fn speed_bound_binds_along_line() {
        let p = problem(vec![Vec2::new(0.0, 0.0)], vec![link(0, 300.0, 400.0)]);
        let out = optimize_trajectories(&p, 10, 1e-3);
        let w = out.positions[0];
        assert!((w.norm() - 1.5).abs() < 1e-9);
        assert!((w.x - 0.9).abs() < 1e-9 && (w.y - 1.2).abs() < 1e-9);
    }

    #[test]
    fn no_links_no_motion() {
        let p = problem(vec![Vec2::new(3.0, 4.0), Vec2::new(50.0, 0.0)], vec![]);
        let out = optimize_trajectories(&p, 10, 1e-3);
        assert_eq!(out.positions, p.previous);
        assert_eq!(out.iterations, 0);
    }

    #[test]
    fn overhead_is_fixed_point() {
        let p = problem(vec![Vec2::new(10.0, 10.0)], vec![link(0, 10.0, 10.0)]);
        let out = optimize_trajectories(&p, 10, 1e-3);
        assert_eq!(out.positions[0], Vec2::new(10.0, 10.0));
        assert!(out.iterations <= 1);
    }

    #[test]
    fn separation_holds_when_converging() {
        let p = problem(
            vec![Vec2::new(-3.0, 0.0), Vec2::new(3.0, 0.0)],
            vec![link(0, 0.0, 0.0), link(1, 0.0, 0.0)],
        );
        let out = optimize_trajectories(&p, 10, 1e-6);
        let d = out.positions[0].dist(out.positions[1]);
        assert!((5.0..5.01).contains(&d), "separation {d}");
        assert!(out.objective_trace.windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn tangent_bounds() {
        let l = link(0, 0.0, 0.0);
        let h2 = 1e4;
        for k in [0.0, 10.0, 1e3, 1e5] {
            for i in 0..50 {
                let phi = i as f64 * 1e3;
                assert!(l.rate_lower_bound(h2, k, phi) <= l.rate(h2, phi) + 1e-6);
            }
        }
        let psi = Vec2::new(3.0, -1.0);
        let delta = Vec2::new(-2.0, 7.0);
        assert!(separation_lower_bound(psi, delta) <= delta.norm_sq());
        assert_eq!(separation_lower_bound(psi, psi), psi.norm_sq());
    }
}
