//! Offloading graph with one virtual sink per vessel.
//!
//! Real links carry `R τ` bits per slot; each server's virtual computation link
//! to the sink carries `F_i / C_v` bits per slot. Link distances are
//! `w_e = r̄ r_max / r_e`, so a fast link is short and a slow link is long, and
//! every node's shortest distance to the sink feeds its pressure index.

use petgraph::algo::dijkstra;
use petgraph::graph::{DiGraph, NodeIndex};
use serde::{Deserialize, Serialize};

use crate::model::Server;
use crate::scalar::Real;

/// Which edges define `r̄` and `r_max`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistanceScope {
    /// Every positive-rate edge of the vessel's graph, real and virtual.
    #[default]
    AllEdges,
    /// Only the virtual computation edges.
    ComputeEdges,
}

/// Per-slot edge rates of one vessel's graph, all in bits per slot.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphRates<S> {
    /// Vessel to each UAV, then vessel to BS (`U + 1` entries).
    pub access: Vec<S>,
    /// Each UAV to the HAP.
    pub uav_to_hap: Vec<S>,
    pub hap_to_sat: S,
    /// Virtual computation rate of each server in column order (`U + 3` entries).
    pub compute: Vec<S>,
}

impl<S: Real> GraphRates<S> {
    pub fn num_uavs(&self) -> usize {
        self.uav_to_hap.len()
    }
}

/// Node indices follow the queue columns: 0 is the vessel, then servers, then the sink.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GraphNode {
    Vessel,
    Server(Server),
    Sink,
}

impl GraphNode {
    pub fn index(self, num_uavs: usize) -> usize {
        match self {
            GraphNode::Vessel => 0,
            GraphNode::Server(s) => s.column(num_uavs),
            GraphNode::Sink => num_uavs + 4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge<S> {
    pub from: GraphNode,
    pub to: GraphNode,
    pub rate: S,
    pub distance: S,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OffloadGraph<S> {
    pub num_uavs: usize,
    pub edges: Vec<Edge<S>>,
    /// `r̄`.
    pub mean_rate: S,
    /// `r_max`.
    pub max_rate: S,
    /// Shortest distance from each node (indexed by [`GraphNode::index`]) to the sink; infinite if unreachable.
    pub to_sink: Vec<S>,
}

impl<S: Real> OffloadGraph<S> {
    /// Builds the graph, drops zero-rate edges, and solves shortest distances to the sink.
    pub fn build(rates: &GraphRates<S>, scope: DistanceScope) -> Self {
        let nu = rates.num_uavs();
        let mut raw: Vec<(GraphNode, GraphNode, S, bool)> = Vec::with_capacity(3 * nu + 8);
        for (k, &r) in rates.access.iter().enumerate() {
            let to = if k < nu { Server::Uav(k) } else { Server::Bs };
            raw.push((GraphNode::Vessel, GraphNode::Server(to), r, false));
        }
        for (k, &r) in rates.uav_to_hap.iter().enumerate() {
            raw.push((
                GraphNode::Server(Server::Uav(k)),
                GraphNode::Server(Server::Hap),
                r,
                false,
            ));
        }
        raw.push((
            GraphNode::Server(Server::Hap),
            GraphNode::Server(Server::Sat),
            rates.hap_to_sat,
            false,
        ));
        for (s, &r) in Server::all(nu).zip(&rates.compute) {
            raw.push((GraphNode::Server(s), GraphNode::Sink, r, true));
        }
        raw.retain(|&(_, _, r, _)| r > S::zero() && r.is_finite());

        let scoped = raw
            .iter()
            .filter(|e| scope == DistanceScope::AllEdges || e.3)
            .map(|e| e.2);
        let (mut sum, mut count, mut max_rate) = (S::zero(), 0usize, S::zero());
        for r in scoped {
            sum += r;
            count += 1;
            max_rate = max_rate.max(r);
        }
        let mean_rate = if count > 0 {
            sum / S::lit(count as f64)
        } else {
            S::zero()
        };
        let scale = mean_rate * max_rate;
        let edges: Vec<Edge<S>> = raw
            .into_iter()
            .map(|(from, to, rate, _)| Edge {
                from,
                to,
                rate,
                distance: scale / rate,
            })
            .collect();
        let to_sink = shortest_to_sink(nu, &edges);
        Self {
            num_uavs: nu,
            edges,
            mean_rate,
            max_rate,
            to_sink,
        }
    }

    /// `w^min` of a node.
    pub fn distance(&self, node: GraphNode) -> S {
        self.to_sink[node.index(self.num_uavs)]
    }

    pub fn edge(&self, from: GraphNode, to: GraphNode) -> Option<&Edge<S>> {
        self.edges.iter().find(|e| e.from == from && e.to == to)
    }
}

/// Dijkstra from the sink over reversed edges.
fn shortest_to_sink<S: Real>(num_uavs: usize, edges: &[Edge<S>]) -> Vec<S> {
    let n = num_uavs + 5;
    let mut g: DiGraph<(), S> = DiGraph::with_capacity(n, edges.len());
    let nodes: Vec<NodeIndex> = (0..n).map(|_| g.add_node(())).collect();
    for e in edges {
        g.add_edge(
            nodes[e.to.index(num_uavs)],
            nodes[e.from.index(num_uavs)],
            e.distance,
        );
    }
    let sink = nodes[GraphNode::Sink.index(num_uavs)];
    let found = dijkstra(&g, sink, None, |e| *e.weight());
    nodes
        .iter()
        .map(|ix| found.get(ix).copied().unwrap_or_else(S::infinity))
        .collect()
}
