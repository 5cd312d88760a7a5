//! Shortest travel times over the network.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::roadnet::{NodeId, RoadNetwork};

/// Min-heap entry; ties broken by the lower node index for determinism.
struct HeapEntry {
    time: f64,
    node: usize,
}

impl PartialEq for HeapEntry {
    fn eq(&self, other: &Self) -> bool {
        self.time == other.time && self.node == other.node
    }
}
impl Eq for HeapEntry {}

impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        // Reversed: BinaryHeap is a max-heap.
        other
            .time
            .total_cmp(&self.time)
            .then_with(|| other.node.cmp(&self.node))
    }
}
impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Dijkstra travel times in seconds from `source` to every node.
pub fn single_source_times(net: &RoadNetwork, source: NodeId) -> Result<Vec<f64>> {
    if source.0 >= net.node_count() {
        return Err(Error::UnknownNode(format!("#{}", source.0)));
    }
    let mut times = vec![f64::INFINITY; net.node_count()];
    let mut settled = vec![false; net.node_count()];
    let mut heap = BinaryHeap::new();
    times[source.0] = 0.0;
    heap.push(HeapEntry {
        time: 0.0,
        node: source.0,
    });
    while let Some(HeapEntry { time, node }) = heap.pop() {
        if settled[node] {
            continue;
        }
        settled[node] = true;
        for &edge_id in net.outgoing(NodeId(node)) {
            let edge = net.edge(edge_id);
            let next = edge.target.0;
            let candidate = time + edge.weight;
            if candidate < times[next] {
                times[next] = candidate;
                heap.push(HeapEntry {
                    time: candidate,
                    node: next,
                });
            }
        }
    }
    Ok(times)
}

/// Dense matrix of travel times; row `r` is `single_source_times` from node `r`.
pub fn all_pairs_node_times(net: &RoadNetwork) -> Result<Vec<Vec<f64>>> {
    (0..net.node_count())
        .into_par_iter()
        .map(|r| single_source_times(net, NodeId(r)))
        .collect()
}
