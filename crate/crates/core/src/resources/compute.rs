//! Demand-driven computing allocation at one server.
//!
//! Capacity is shared in proportion to each vessel's remaining completion time
//! `Q_{v,i} / r^c_{v,i}`. Vessels whose share exceeds what they can use are
//! capped, and the leftover is redistributed among the rest.
//!
//! Generic over any ordered field so the same routine runs on `f64` and on
//! exact rationals.

use num_traits::Num;
use serde::Serialize;

#[derive(Debug, Clone, PartialEq)]
pub struct PendingVessel<T> {
    pub vessel: usize,
    /// `Q_{v,i}(n)`, bits already on the server.
    pub backlog: T,
    /// `r^c_{v,i} = F_i / C_v`, bits per slot.
    pub compute_rate: T,
    /// `F^max_{v,i}`, cycles the vessel can use this slot.
    pub cap: T,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComputePlan<T> {
    /// Cycles granted to each vessel, in input order.
    pub cycles: Vec<(usize, T)>,
    /// Proportional-allocation rounds executed.
    pub rounds: usize,
}

impl<T: Num + Clone> ComputePlan<T> {
    pub fn total(&self) -> T {
        self.cycles
            .iter()
            .fold(T::zero(), |acc, (_, c)| acc + c.clone())
    }
}

/// Allocates `capacity` cycles among `pending` vessels.
pub fn allocate_compute<T>(pending: &[PendingVessel<T>], capacity: T) -> ComputePlan<T>
where
    T: Num + Clone + PartialOrd,
{
    let n = pending.len();
    let weights: Vec<T> = pending
        .iter()
        .map(|p| {
            if p.compute_rate > T::zero() {
                p.backlog.clone() / p.compute_rate.clone()
            } else {
                T::zero()
            }
        })
        .collect();
    let mut grant: Vec<T> = vec![T::zero(); n];
    let mut open: Vec<usize> = (0..n).collect();
    let mut assigned = T::zero();
    let mut rounds = 0;
    while !open.is_empty() {
        rounds += 1;
        let remaining = capacity.clone() - assigned.clone();
        let weight_sum = open
            .iter()
            .fold(T::zero(), |acc, &k| acc + weights[k].clone());
        if !(weight_sum > T::zero()) || !(remaining > T::zero()) {
            for &k in &open {
                grant[k] = T::zero();
            }
            break;
        }
        for &k in &open {
            grant[k] = weights[k].clone() * remaining.clone() / weight_sum.clone();
        }
        let over: Vec<usize> = open
            .iter()
            .copied()
            .filter(|&k| grant[k] > pending[k].cap)
            .collect();
        if over.is_empty() {
            break;
        }
        for k in over {
            grant[k] = pending[k].cap.clone();
            assigned = assigned + grant[k].clone();
            open.retain(|&j| j != k);
        }
    }
    ComputePlan {
        cycles: pending.iter().map(|p| p.vessel).zip(grant).collect(),
        rounds,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: usize, q: f64, r: f64, cap: f64) -> PendingVessel<f64> {
        PendingVessel {
            vessel: v,
            backlog: q,
            compute_rate: r,
            cap,
        }
    }

    #[test]
    fn saturates_when_demand_fits() {
        let plan = allocate_compute(&[p(0, 4.0, 1.0, 2.0), p(1, 1.0, 1.0, 3.0)], 10.0);
        assert_eq!(plan.cycles, vec![(0, 2.0), (1, 3.0)]);
    }

    #[test]
    fn hand_traced_two_rounds() {
        // weights Q / r^c = Q C / F with F = 10: choose Q C = (8, 2)
        let plan = allocate_compute(&[p(0, 8.0, 10.0, 3.0), p(1, 2.0, 10.0, 20.0)], 10.0);
        assert_eq!(plan.cycles, vec![(0, 3.0), (1, 7.0)]);
        assert_eq!(plan.rounds, 2);
    }

    #[test]
    fn single_vessel_cap_binds() {
        let plan = allocate_compute(&[p(0, 1.0, 1.0, 5.0)], 10.0);
        assert_eq!(plan.cycles, vec![(0, 5.0)]);
    }

    #[test]
    fn zero_backlog_gets_nothing() {
        let plan = allocate_compute(&[p(0, 0.0, 1.0, 5.0), p(1, 0.0, 2.0, 5.0)], 10.0);
        assert_eq!(plan.total(), 0.0);
    }

    #[test]
    fn exact_with_rationals() {
        use num_rational::Ratio;
        let r = |a: i64, b: i64| Ratio::new(a, b);
        let pending = vec![
            PendingVessel {
                vessel: 0,
                backlog: r(1, 1),
                compute_rate: r(3, 1),
                cap: r(1, 10),
            },
            PendingVessel {
                vessel: 1,
                backlog: r(2, 1),
                compute_rate: r(3, 1),
                cap: r(100, 1),
            },
        ];
        let plan = allocate_compute(&pending, r(1, 1));
        assert_eq!(plan.cycles, vec![(0, r(1, 10)), (1, r(9, 10))]);
    }
}
