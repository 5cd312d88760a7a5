//! OSM XML ingestion: `<node>` elements plus `<way>` elements carrying
//! `highway`, `maxspeed` and `oneway` tags.

use std::collections::HashMap;

use quick_xml::events::{BytesStart, Event};
use quick_xml::Reader;

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::roadnet::{NetworkConfig, RoadNetwork};

const EARTH_RADIUS_M: f64 = 6_371_000.0;

struct RawNode {
    lat: f64,
    lon: f64,
}

struct RawWay {
    refs: Vec<i64>,
    highway: Option<String>,
    maxspeed: Option<String>,
    oneway: bool,
}

/// Parses an OSM XML extract into a road network.
///
/// Only ways whose `highway` tag is listed in `cfg.drivable_tags` are kept.
/// Positions are projected to local meters with an equirectangular projection
/// about the centroid of the node bounding box.
pub fn parse_osm_xml(bytes: &[u8], cfg: &NetworkConfig) -> Result<RoadNetwork> {
    let mut reader = Reader::from_reader(bytes);
    reader.config_mut().trim_text(true);

    let mut nodes: HashMap<i64, RawNode> = HashMap::new();
    let mut ways: Vec<RawWay> = Vec::new();
    let mut current_way: Option<RawWay> = None;

    let line_of = |pos: u64| 1 + bytes[..pos as usize].iter().filter(|&&b| b == b'\n').count();
    let mut buf = Vec::new();
    loop {
        let event = reader.read_event_into(&mut buf).map_err(|e| Error::XmlParse {
            line: line_of(reader.buffer_position()),
            message: e.to_string(),
        })?;
        match event {
            Event::Start(ref el) | Event::Empty(ref el) => {
                let position = reader.buffer_position();
                handle_element(el, &mut nodes, &mut ways, &mut current_way, matches!(event, Event::Empty(_)))
                    .map_err(|message| Error::XmlParse {
                        line: line_of(position),
                        message,
                    })?;
            }
            Event::End(ref el) => {
                if el.name().as_ref() == b"way" {
                    if let Some(way) = current_way.take() {
                        ways.push(way);
                    }
                }
            }
            Event::Eof => break,
            _ => {}
        }
        buf.clear();
    }

    build_network(&nodes, &ways, cfg)
}

fn handle_element(
    el: &BytesStart,
    nodes: &mut HashMap<i64, RawNode>,
    ways: &mut Vec<RawWay>,
    current_way: &mut Option<RawWay>,
    self_closing: bool,
) -> std::result::Result<(), String> {
    let attr = |el: &BytesStart, name: &[u8]| -> std::result::Result<Option<String>, String> {
        for a in el.attributes() {
            let a = a.map_err(|e| e.to_string())?;
            if a.key.as_ref() == name {
                return Ok(Some(
                    String::from_utf8_lossy(a.value.as_ref()).into_owned(),
                ));
            }
        }
        Ok(None)
    };
    match el.name().as_ref() {
        b"node" => {
            let id: i64 = attr(el, b"id")?
                .ok_or("node without id")?
                .parse()
                .map_err(|e| format!("bad node id: {e}"))?;
            let lat: f64 = attr(el, b"lat")?
                .ok_or("node without lat")?
                .parse()
                .map_err(|e| format!("bad lat: {e}"))?;
            let lon: f64 = attr(el, b"lon")?
                .ok_or("node without lon")?
                .parse()
                .map_err(|e| format!("bad lon: {e}"))?;
            nodes.insert(id, RawNode { lat, lon });
        }
        b"way" => {
            let way = RawWay {
                refs: Vec::new(),
                highway: None,
                maxspeed: None,
                oneway: false,
            };
            if self_closing {
                ways.push(way);
            } else {
                *current_way = Some(way);
            }
        }
        b"nd" => {
            if let Some(way) = current_way.as_mut() {
                let r: i64 = attr(el, b"ref")?
                    .ok_or("nd without ref")?
                    .parse()
                    .map_err(|e| format!("bad nd ref: {e}"))?;
                way.refs.push(r);
            }
        }
        b"tag" => {
            if let Some(way) = current_way.as_mut() {
                let k = attr(el, b"k")?.unwrap_or_default();
                let v = attr(el, b"v")?.unwrap_or_default();
                match k.as_str() {
                    "highway" => way.highway = Some(v),
                    "maxspeed" => way.maxspeed = Some(v),
                    "oneway" => way.oneway = v == "yes",
                    _ => {}
                }
            }
        }
        _ => {}
    }
    Ok(())
}

/// `maxspeed` values: plain number means km/h, `N mph` converts at 1.609.
/// Anything unparseable falls back to the configured default.
fn parse_maxspeed(value: Option<&str>, cfg: &NetworkConfig) -> f64 {
    let Some(raw) = value else {
        return cfg.default_speed;
    };
    let raw = raw.trim();
    if let Some(stripped) = raw.strip_suffix("mph") {
        if let Ok(v) = stripped.trim().parse::<f64>() {
            if v > 0.0 {
                return v * 1.609 / 3.6;
            }
        }
        return cfg.default_speed;
    }
    match raw.parse::<f64>() {
        Ok(v) if v > 0.0 => v / 3.6,
        _ => cfg.default_speed,
    }
}

fn build_network(
    nodes: &HashMap<i64, RawNode>,
    ways: &[RawWay],
    cfg: &NetworkConfig,
) -> Result<RoadNetwork> {
    let drivable: Vec<&RawWay> = ways
        .iter()
        .filter(|w| {
            w.highway
                .as_deref()
                .is_some_and(|h| cfg.drivable_tags.contains(h))
        })
        .collect();
    if drivable.is_empty() {
        return Err(Error::EmptyNetwork);
    }

    // Projection about the node bounding-box centroid.
    let mut lat_min = f64::INFINITY;
    let mut lat_max = f64::NEG_INFINITY;
    let mut lon_min = f64::INFINITY;
    let mut lon_max = f64::NEG_INFINITY;
    for node in nodes.values() {
        lat_min = lat_min.min(node.lat);
        lat_max = lat_max.max(node.lat);
        lon_min = lon_min.min(node.lon);
        lon_max = lon_max.max(node.lon);
    }
    let lat0 = 0.5 * (lat_min + lat_max);
    let lon0 = 0.5 * (lon_min + lon_max);
    let project = |node: &RawNode| {
        let x = EARTH_RADIUS_M * (node.lon - lon0).to_radians() * lat0.to_radians().cos();
        let y = EARTH_RADIUS_M * (node.lat - lat0).to_radians();
        Point::new(x, y)
    };

    let mut net = RoadNetwork::new(cfg.v0);
    let mut dense: HashMap<i64, crate::roadnet::NodeId> = HashMap::new();
    for way in &drivable {
        let speed = parse_maxspeed(way.maxspeed.as_deref(), cfg);
        for pair in way.refs.windows(2) {
            let (Some(a), Some(b)) = (nodes.get(&pair[0]), nodes.get(&pair[1])) else {
                continue; // refs outside the extract
            };
            let pa = project(a);
            let pb = project(b);
            if pa.distance(&pb) == 0.0 {
                continue;
            }
            let ia = *dense
                .entry(pair[0])
                .or_insert_with(|| net.add_node(pair[0].to_string(), pa));
            let ib = *dense
                .entry(pair[1])
                .or_insert_with(|| net.add_node(pair[1].to_string(), pb));
            net.add_edge(ia, ib, vec![pa, pb], speed, false);
            if !way.oneway {
                net.add_edge(ib, ia, vec![pb, pa], speed, false);
            }
        }
    }
    if net.edge_count() == 0 {
        return Err(Error::EmptyNetwork);
    }
    Ok(net)
}
