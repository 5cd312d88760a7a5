//! Native fixture format: a TOML document with `nodes` and `edges` arrays.
//!
//! ```toml
//! [[nodes]]
//! id = "A"
//! x = 0.0
//! y = 0.0
//!
//! [[edges]]
//! source = "A"
//! target = "B"
//! speed = 10.0                      # m/s
//! geometry = [[0.0, 0.0], [1000.0, 0.0]]   # optional polyline
//! ```

use std::collections::HashMap;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::roadnet::{NetworkConfig, RoadNetwork};

#[derive(Deserialize)]
struct Document {
    #[serde(default)]
    nodes: Vec<NodeDecl>,
    #[serde(default)]
    edges: Vec<EdgeDecl>,
}

#[derive(Deserialize)]
struct NodeDecl {
    id: String,
    x: f64,
    y: f64,
}

#[derive(Deserialize)]
struct EdgeDecl {
    source: String,
    target: String,
    /// m/s
    speed: f64,
    geometry: Option<Vec<[f64; 2]>>,
}

/// Parses the native fixture format. Missing geometry becomes a straight
/// segment from source to target.
pub fn parse_native(bytes: &[u8], cfg: &NetworkConfig) -> Result<RoadNetwork> {
    let text = std::str::from_utf8(bytes)
        .map_err(|e| Error::Fixture(format!("not valid utf-8: {e}")))?;
    let doc: Document = toml::from_str(text).map_err(|e| Error::Fixture(e.to_string()))?;

    let mut net = RoadNetwork::new(cfg.v0);
    let mut by_id = HashMap::new();
    for decl in &doc.nodes {
        let p = Point::new(decl.x, decl.y);
        if !p.is_finite() {
            return Err(Error::Fixture(format!("node {} has non-finite position", decl.id)));
        }
        let id = net.add_node(decl.id.clone(), p);
        if by_id.insert(decl.id.clone(), id).is_some() {
            return Err(Error::DuplicateNode(decl.id.clone()));
        }
    }
    for decl in &doc.edges {
        let edge_name = format!("{}->{}", decl.source, decl.target);
        let lookup = |key: &String| {
            by_id.get(key).copied().ok_or_else(|| Error::DanglingNode {
                edge: edge_name.clone(),
                node: key.clone(),
            })
        };
        let source = lookup(&decl.source)?;
        let target = lookup(&decl.target)?;
        if decl.speed <= 0.0 {
            return Err(Error::Fixture(format!("edge {edge_name} has non-positive speed")));
        }
        let geometry = match &decl.geometry {
            Some(points) => {
                let pts: Vec<Point> = points.iter().map(|[x, y]| Point::new(*x, *y)).collect();
                if pts.len() < 2 {
                    return Err(Error::Fixture(format!("edge {edge_name} geometry needs >= 2 points")));
                }
                let endpoints_ok = pts[0].distance(&net.node(source).position) < 1e-6
                    && pts[pts.len() - 1].distance(&net.node(target).position) < 1e-6;
                if !endpoints_ok {
                    return Err(Error::Fixture(format!(
                        "edge {edge_name} geometry does not run from source to target"
                    )));
                }
                pts
            }
            None => vec![net.node(source).position, net.node(target).position],
        };
        if crate::geometry::polyline_length(&geometry) <= 0.0 {
            return Err(Error::Fixture(format!("edge {edge_name} has zero length")));
        }
        net.add_edge(source, target, geometry, decl.speed, false);
    }
    Ok(net)
}
