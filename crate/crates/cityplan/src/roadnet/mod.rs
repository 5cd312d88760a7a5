//! Directed road-network graph with travel-time edge weights.
//!
//! Networks come from OSM XML extracts or from the native fixture format.
//! After parsing, [`ensure_strong_connectivity`] inserts synthetic reverse
//! edges (wrong-way travel at the slow off-network speed `v0`) so that every
//! node can reach every other.

mod native;
mod osm;
mod paths;

pub use native::parse_native;
pub use osm::parse_osm_xml;
pub use paths::{all_pairs_node_times, single_source_times};

use std::collections::{BTreeSet, HashSet};

use crate::error::{Error, Result};
use crate::geometry::{polyline_length, Point};

/// Index of a node within its network.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(pub usize);

/// Index of an edge within its network.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeId(pub usize);

#[derive(Debug, Clone)]
pub struct RoadNode {
    /// Identifier from the source data, kept for error messages.
    pub id: String,
    /// Planar position in meters.
    pub position: Point,
}

#[derive(Debug, Clone)]
pub struct RoadEdge {
    pub source: NodeId,
    pub target: NodeId,
    /// Polyline from the source position to the target position.
    pub geometry: Vec<Point>,
    /// Arc length of the geometry, meters.
    pub length: f64,
    /// Travel speed on this edge, m/s.
    pub speed: f64,
    /// Travel time `length / speed`, seconds.
    pub weight: f64,
    /// True for reverse edges added by the connectivity repair.
    pub synthetic: bool,
}

/// Parsing and repair options.
#[derive(Debug, Clone)]
pub struct NetworkConfig {
    /// Off-network and wrong-way speed, m/s.
    pub v0: f64,
    /// Speed assumed for ways without a usable maxspeed, m/s.
    pub default_speed: f64,
    /// Accepted values of the OSM `highway` tag.
    pub drivable_tags: BTreeSet<String>,
}

pub const KMH: f64 = 1.0 / 3.6;

impl Default for NetworkConfig {
    fn default() -> Self {
        let mut tags = BTreeSet::new();
        for base in [
            "motorway",
            "trunk",
            "primary",
            "secondary",
            "tertiary",
            "residential",
            "unclassified",
            "service",
        ] {
            tags.insert(base.to_string());
            tags.insert(format!("{base}_link"));
        }
        NetworkConfig {
            v0: 5.0 * KMH,
            default_speed: 40.0 * KMH,
            drivable_tags: tags,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RoadNetwork {
    nodes: Vec<RoadNode>,
    edges: Vec<RoadEdge>,
    /// Outgoing edge ids per node.
    out_edges: Vec<Vec<EdgeId>>,
    /// Off-network speed, m/s.
    pub v0: f64,
}

impl RoadNetwork {
    pub fn new(v0: f64) -> Self {
        RoadNetwork {
            nodes: Vec::new(),
            edges: Vec::new(),
            out_edges: Vec::new(),
            v0,
        }
    }

    pub fn add_node(&mut self, id: String, position: Point) -> NodeId {
        debug_assert!(position.is_finite());
        self.nodes.push(RoadNode { id, position });
        self.out_edges.push(Vec::new());
        NodeId(self.nodes.len() - 1)
    }

    /// Adds an edge with the given polyline. Weight is `length / speed`.
    pub fn add_edge(
        &mut self,
        source: NodeId,
        target: NodeId,
        geometry: Vec<Point>,
        speed: f64,
        synthetic: bool,
    ) -> EdgeId {
        debug_assert!(speed > 0.0);
        let length = polyline_length(&geometry);
        debug_assert!(length > 0.0);
        let id = EdgeId(self.edges.len());
        self.edges.push(RoadEdge {
            source,
            target,
            geometry,
            length,
            speed,
            weight: length / speed,
            synthetic,
        });
        self.out_edges[source.0].push(id);
        id
    }

    pub fn node(&self, id: NodeId) -> &RoadNode {
        &self.nodes[id.0]
    }

    pub fn edge(&self, id: EdgeId) -> &RoadEdge {
        &self.edges[id.0]
    }

    pub fn nodes(&self) -> &[RoadNode] {
        &self.nodes
    }

    pub fn edges(&self) -> &[RoadEdge] {
        &self.edges
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn outgoing(&self, node: NodeId) -> &[EdgeId] {
        &self.out_edges[node.0]
    }

    /// Bounding box over node positions and non-synthetic edge geometry.
    pub fn bounding_box(&self) -> Option<(Point, Point)> {
        let mut min = Point::new(f64::INFINITY, f64::INFINITY);
        let mut max = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        let mut any = false;
        let mut grow = |p: &Point| {
            min.x = min.x.min(p.x);
            min.y = min.y.min(p.y);
            max.x = max.x.max(p.x);
            max.y = max.y.max(p.y);
        };
        for node in &self.nodes {
            grow(&node.position);
            any = true;
        }
        for edge in self.edges.iter().filter(|e| !e.synthetic) {
            for p in &edge.geometry {
                grow(p);
            }
        }
        any.then_some((min, max))
    }
}

/// Strongly connected components, largest first. Iterative Tarjan.
pub fn strongly_connected_components(net: &RoadNetwork) -> Vec<Vec<NodeId>> {
    let n = net.node_count();
    let mut index = vec![usize::MAX; n];
    let mut lowlink = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<usize> = Vec::new();
    let mut next_index = 0usize;
    let mut components: Vec<Vec<NodeId>> = Vec::new();

    // Explicit call stack of (node, next outgoing edge offset).
    let mut call: Vec<(usize, usize)> = Vec::new();
    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        call.push((root, 0));
        while let Some(&mut (v, ref mut offset)) = call.last_mut() {
            if *offset == 0 {
                index[v] = next_index;
                lowlink[v] = next_index;
                next_index += 1;
                stack.push(v);
                on_stack[v] = true;
            }
            let mut advanced = false;
            while *offset < net.out_edges[v].len() {
                let edge = &net.edges[net.out_edges[v][*offset].0];
                let w = edge.target.0;
                *offset += 1;
                if index[w] == usize::MAX {
                    call.push((w, 0));
                    advanced = true;
                    break;
                } else if on_stack[w] {
                    lowlink[v] = lowlink[v].min(index[w]);
                }
            }
            if advanced {
                continue;
            }
            if lowlink[v] == index[v] {
                let mut component = Vec::new();
                loop {
                    let w = stack.pop().expect("tarjan stack underflow");
                    on_stack[w] = false;
                    component.push(NodeId(w));
                    if w == v {
                        break;
                    }
                }
                component.sort();
                components.push(component);
            }
            call.pop();
            if let Some(&mut (parent, _)) = call.last_mut() {
                lowlink[parent] = lowlink[parent].min(lowlink[v]);
            }
        }
    }
    components.sort_by(|a, b| b.len().cmp(&a.len()).then(a[0].cmp(&b[0])));
    components
}

/// Adds a reverse edge at speed `v0` for every directed node pair that lacks
/// one, then verifies the result is strongly connected. The repair allows
/// wrong-way travel; it never bridges disconnected components.
pub fn ensure_strong_connectivity(mut net: RoadNetwork) -> Result<RoadNetwork> {
    if net.node_count() == 0 {
        return Err(Error::EmptyNetwork);
    }
    let mut pairs: HashSet<(usize, usize)> = HashSet::new();
    for edge in &net.edges {
        pairs.insert((edge.source.0, edge.target.0));
    }
    let mut missing: Vec<EdgeId> = Vec::new();
    for (i, edge) in net.edges.iter().enumerate() {
        let reverse = (edge.target.0, edge.source.0);
        if !pairs.contains(&reverse) {
            pairs.insert(reverse);
            missing.push(EdgeId(i));
        }
    }
    let v0 = net.v0;
    for id in missing {
        let edge = net.edge(id);
        let mut geometry = edge.geometry.clone();
        geometry.reverse();
        let (source, target) = (edge.target, edge.source);
        net.add_edge(source, target, geometry, v0, true);
    }
    let components = strongly_connected_components(&net);
    if components.len() > 1 {
        return Err(Error::NotStronglyConnected {
            sizes: components.iter().map(|c| c.len()).collect(),
        });
    }
    Ok(net)
}
