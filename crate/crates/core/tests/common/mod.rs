//! Independent reference implementations used by the oracle and acceptance tests.
#![allow(dead_code)]

use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sagsin::model::{Server, Vec2};
use sagsin::resources::{AssociatedLink, PendingVessel, ServedVessel, TrajectoryProblem};
use sagsin::scheduler::{DistanceScope, GraphRates};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

// ---------- bandwidth ----------

/// `Σ B_v log2(1 + a_v / B_v)` with `a_v = P_v h_v / N0`.
pub fn rate_sum(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(&a, &b)| {
            if b > 0.0 {
                b * (a / b).ln_1p() / std::f64::consts::LN_2
            } else {
                0.0
            }
        })
        .sum()
}

fn rate_sum_grad(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter()
        .zip(b)
        .map(|(&a, &b)| {
            let x = a / b;
            ((x).ln_1p() - x / (1.0 + x)) / std::f64::consts::LN_2
        })
        .collect()
}

/// Euclidean projection onto `{b : Σ b = total, b ≥ lo}`.
fn project_simplex(y: &[f64], total: f64, lo: f64) -> Vec<f64> {
    let n = y.len();
    let budget = total - lo * n as f64;
    let z: Vec<f64> = y.iter().map(|v| v - lo).collect();
    let mut s = z.clone();
    s.sort_by(|a, b| b.total_cmp(a));
    let mut cum = 0.0;
    let mut theta = 0.0;
    for (i, v) in s.iter().enumerate() {
        cum += v;
        let t = (cum - budget) / (i + 1) as f64;
        if v - t > 0.0 {
            theta = t;
        }
    }
    z.iter().map(|v| (v - theta).max(0.0) + lo).collect()
}

/// Projected-gradient ascent with backtracking for the bandwidth split.
pub fn projected_gradient_bandwidth(a: &[f64], total: f64) -> Vec<f64> {
    let n = a.len();
    let lo = total * 1e-12;
    let mut b = vec![total / n as f64; n];
    let mut f = rate_sum(a, &b);
    let mut step = total / n as f64;
    for _ in 0..5000 {
        let g = rate_sum_grad(a, &b);
        let mut improved = false;
        while step > total * 1e-18 {
            let cand: Vec<f64> = b.iter().zip(&g).map(|(x, gi)| x + step * gi).collect();
            let cand = project_simplex(&cand, total, lo);
            let fc = rate_sum(a, &cand);
            if fc > f {
                let moved: f64 = cand.iter().zip(&b).map(|(x, y)| (x - y).abs()).sum();
                b = cand;
                let gain = fc - f;
                f = fc;
                step *= 2.0;
                improved = moved > total * 1e-15 && gain > f * 1e-16;
                break;
            }
            step *= 0.5;
        }
        if !improved {
            break;
        }
    }
    b
}

pub fn random_served(rng: &mut ChaCha8Rng, n: usize) -> Vec<ServedVessel<f64>> {
    (0..n)
        .map(|v| {
            let d2: f64 = rng.random_range(100.0f64..1500.0).powi(2) + 100.0f64.powi(2);
            let fading: f64 = rng.random_range(0.2..2.0);
            ServedVessel {
                vessel: v,
                power: rng.random_range(0.5..2.0),
                gain: 1e-3 / d2 * fading,
            }
        })
        .collect()
}

// ---------- computing allocation ----------

/// Water-filling with caps: grant `min(cap_v, λ w_v)` with the level `λ` that uses
/// `min(F, Σ_{w_v > 0} cap_v)`, found by sorting the cap-to-weight ratios.
pub fn water_fill(
    pending: &[PendingVessel<BigRational>],
    capacity: &BigRational,
) -> Vec<BigRational> {
    let n = pending.len();
    let w: Vec<BigRational> = pending
        .iter()
        .map(|p| {
            if p.compute_rate.is_positive() {
                p.backlog.clone() / p.compute_rate.clone()
            } else {
                BigRational::zero()
            }
        })
        .collect();
    let mut active: Vec<usize> = (0..n).filter(|&k| w[k].is_positive()).collect();
    active.sort_by(|&i, &j| {
        (pending[i].cap.clone() / w[i].clone()).cmp(&(pending[j].cap.clone() / w[j].clone()))
    });
    let mut out = vec![BigRational::zero(); n];
    let mut left = capacity.clone();
    let mut wsum: BigRational = active
        .iter()
        .fold(BigRational::zero(), |s, &k| s + w[k].clone());
    for (pos, &k) in active.iter().enumerate() {
        if !left.is_positive() || !wsum.is_positive() {
            break;
        }
        let level = left.clone() / wsum.clone();
        if pending[k].cap <= level.clone() * w[k].clone() {
            out[k] = pending[k].cap.clone();
            left -= pending[k].cap.clone();
            wsum -= w[k].clone();
        } else {
            for &j in &active[pos..] {
                out[j] = level.clone() * w[j].clone();
            }
            break;
        }
    }
    out
}

pub fn random_pending(
    rng: &mut ChaCha8Rng,
    n: usize,
) -> (Vec<PendingVessel<BigRational>>, BigRational) {
    let r = |x: i64, y: i64| BigRational::new(x.into(), y.into());
    let pending = (0..n)
        .map(|v| PendingVessel {
            vessel: v,
            backlog: r(rng.random_range(1..1_000_000), rng.random_range(1..100)),
            compute_rate: r(rng.random_range(1..100_000), rng.random_range(1..100)),
            cap: r(rng.random_range(0..50_000_000), rng.random_range(1..100)),
        })
        .collect();
    let capacity = r(rng.random_range(1..200_000_000), rng.random_range(1..10));
    (pending, capacity)
}

// ---------- trajectory ----------

pub fn random_link(rng: &mut ChaCha8Rng, uav: usize) -> AssociatedLink<f64> {
    AssociatedLink::new(
        uav,
        Vec2::new(rng.random_range(0.0..2000.0), rng.random_range(0.0..2000.0)),
        rng.random_range(0.5e6..10e6),
        1.0,
        1e-3,
        rng.random_range(0.3..2.0),
        10f64.powf(-17.4) * 1e-3,
    )
}

/// Best objective over a lattice of `spacing` metres inside each UAV's speed disk,
/// subject to the separation constraint.
pub fn lattice_search(p: &TrajectoryProblem<f64>, spacing: f64) -> f64 {
    let m = (p.max_step / spacing).floor() as i64;
    let offsets: Vec<Vec2<f64>> = (-m..=m)
        .flat_map(|i| (-m..=m).map(move |j| Vec2::new(i as f64 * spacing, j as f64 * spacing)))
        .filter(|o| o.norm() <= p.max_step)
        .collect();
    assert_eq!(p.num_uavs(), 2);
    let mut best = f64::NEG_INFINITY;
    for a in &offsets {
        for b in &offsets {
            let pos = vec![p.previous[0] + *a, p.previous[1] + *b];
            if pos[0].dist(pos[1]) < p.safe_distance {
                continue;
            }
            best = best.max(p.objective(&pos));
        }
    }
    best
}

// ---------- scheduler ----------

/// Exhaustive access argmax: highest `ΔJ r` among links with positive rate, lowest index on ties;
/// index 0 when no link is usable.
pub fn brute_vessel_choice(dj: &[f64], rates: &[f64]) -> usize {
    let mut best: Option<(usize, f64)> = None;
    for k in 0..dj.len() {
        if rates[k].is_nan() || rates[k] <= 0.0 || !dj[k].is_finite() {
            continue;
        }
        let s = dj[k] * rates[k];
        if best.is_none_or(|(_, b)| s > b) {
            best = Some((k, s));
        }
    }
    // every link dead: all scores tie at minus infinity, lowest index wins
    best.map_or(0, |(k, _)| k)
}

/// Exhaustive relay argmax over clamped differentials of vessels holding data.
pub fn brute_relay_choice(pd: &[f64], held: &[bool]) -> Option<usize> {
    let clamped: Vec<f64> = pd
        .iter()
        .map(|&x| if x.is_nan() { 0.0 } else { x.max(0.0) })
        .collect();
    let mut best: Option<usize> = None;
    for v in 0..pd.len() {
        if !held[v] || clamped[v] <= 0.0 {
            continue;
        }
        match best {
            Some(b) if clamped[v] <= clamped[b] => {}
            _ => best = Some(v),
        }
    }
    best
}

/// Shortest distance to the sink from every node by enumerating all simple paths.
pub fn brute_distances(rates: &GraphRates<f64>, scope: DistanceScope) -> Vec<f64> {
    let nu = rates.uav_to_hap.len();
    let sink = nu + 4;
    let mut edges: Vec<(usize, usize, f64, bool)> = Vec::new();
    for k in 0..nu {
        edges.push((0, Server::Uav(k).column(nu), rates.access[k], false));
        edges.push((
            Server::Uav(k).column(nu),
            Server::Hap.column(nu),
            rates.uav_to_hap[k],
            false,
        ));
    }
    edges.push((0, Server::Bs.column(nu), rates.access[nu], false));
    edges.push((
        Server::Hap.column(nu),
        Server::Sat.column(nu),
        rates.hap_to_sat,
        false,
    ));
    for (c, &r) in rates.compute.iter().enumerate() {
        edges.push((c + 1, sink, r, true));
    }
    edges.retain(|e| e.2 > 0.0 && e.2.is_finite());
    let scoped: Vec<f64> = edges
        .iter()
        .filter(|e| scope == DistanceScope::AllEdges || e.3)
        .map(|e| e.2)
        .collect();
    let mean = scoped.iter().sum::<f64>() / scoped.len().max(1) as f64;
    let max = scoped.iter().copied().fold(0.0, f64::max);
    let dist: Vec<(usize, usize, f64)> =
        edges.iter().map(|e| (e.0, e.1, mean * max / e.2)).collect();

    fn walk(
        node: usize,
        sink: usize,
        dist: &[(usize, usize, f64)],
        seen: &mut Vec<usize>,
        acc: f64,
        best: &mut f64,
    ) {
        if node == sink {
            *best = best.min(acc);
            return;
        }
        for &(a, b, w) in dist {
            if a == node && !seen.contains(&b) {
                seen.push(b);
                walk(b, sink, dist, seen, acc + w, best);
                seen.pop();
            }
        }
    }
    (0..=sink)
        .map(|start| {
            let mut best = f64::INFINITY;
            walk(start, sink, &dist, &mut vec![start], 0.0, &mut best);
            best
        })
        .collect()
}

pub fn random_rates(rng: &mut ChaCha8Rng, nu: usize, zero_prob: f64) -> GraphRates<f64> {
    let mut draw = |lo: f64, hi: f64| {
        if rng.random_bool(zero_prob) {
            0.0
        } else {
            10f64.powf(rng.random_range(lo..hi))
        }
    };
    GraphRates {
        access: (0..=nu).map(|_| draw(5.0, 7.5)).collect(),
        uav_to_hap: (0..nu).map(|_| draw(6.5, 7.8)).collect(),
        hap_to_sat: draw(7.0, 7.8),
        compute: (0..nu + 3).map(|_| draw(4.5, 6.5)).collect(),
    }
}
