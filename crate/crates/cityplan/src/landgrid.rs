//! Square-cell discretization of the terrain around a road network.
//!
//! Every cell is assigned to its nearest (non-synthetic) street edge, giving
//! the partition used by the accessibility decomposition. Cells intersected
//! by pavement become immutable streets; the remaining near-road cells are
//! the developable sites.

use rayon::prelude::*;

use crate::accessibility::AccessibilityField;
use crate::error::{Error, Result};
use crate::geometry::{project_onto_polyline, segment_intersects_rect, Point};
use crate::roadnet::{EdgeId, RoadNetwork};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LandUse {
    Undeveloped,
    Street,
    Residential,
    Commercial,
    Industrial,
    Recreational,
}

impl LandUse {
    pub fn code(self) -> char {
        match self {
            LandUse::Undeveloped => 'U',
            LandUse::Street => 'S',
            LandUse::Residential => 'H',
            LandUse::Commercial => 'C',
            LandUse::Industrial => 'I',
            LandUse::Recreational => 'R',
        }
    }

    pub fn from_code(c: char) -> Option<LandUse> {
        Some(match c {
            'U' => LandUse::Undeveloped,
            'S' => LandUse::Street,
            'H' => LandUse::Residential,
            'C' => LandUse::Commercial,
            'I' => LandUse::Industrial,
            'R' => LandUse::Recreational,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone)]
pub struct Cell {
    pub index: (usize, usize),
    pub center: Point,
    /// Nearest non-synthetic edge.
    pub nearest_edge: EdgeId,
    /// Closest point on that edge's geometry.
    pub projection: Point,
    /// Arc length along the edge geometry from its source to `projection`.
    pub arc_from_source: f64,
    /// Distance from `center` to `projection`, meters.
    pub d_n: f64,
    pub land_use: LandUse,
}

#[derive(Debug, Clone)]
pub struct GridConfig {
    /// Cell side, meters. The default 20 m gives 400 m2 plots.
    pub cell_size: f64,
    /// Empty cells added around the network bounding box.
    pub margin_cells: usize,
    /// Development is allowed up to this distance from the network, meters.
    pub develop_max_distance: f64,
    /// Hard cap on rows*cols.
    pub max_cells: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            cell_size: 20.0,
            margin_cells: 2,
            develop_max_distance: 50.0,
            max_cells: 200_000,
        }
    }
}

#[derive(Debug, Clone)]
pub struct CellGrid {
    pub cell_size: f64,
    /// Position of the lower-left grid corner.
    pub origin: Point,
    pub rows: usize,
    pub cols: usize,
    cells: Vec<Cell>,
    /// Cell indices per edge id; empty for synthetic edges.
    partition: Vec<Vec<usize>>,
}

impl CellGrid {
    pub fn cell_count(&self) -> usize {
        self.cells.len()
    }

    pub fn cell(&self, idx: usize) -> &Cell {
        &self.cells[idx]
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn index_of(&self, row: usize, col: usize) -> usize {
        debug_assert!(row < self.rows && col < self.cols);
        row * self.cols + col
    }

    pub fn row_col(&self, idx: usize) -> (usize, usize) {
        (idx / self.cols, idx % self.cols)
    }

    pub fn land_use(&self, idx: usize) -> LandUse {
        self.cells[idx].land_use
    }

    /// Streets are immutable; re-zoning a street is a caller bug.
    pub fn set_land_use(&mut self, idx: usize, use_: LandUse) {
        assert!(
            self.cells[idx].land_use != LandUse::Street,
            "street cells are immutable"
        );
        self.cells[idx].land_use = use_;
    }

    /// Cells whose nearest edge is `edge`.
    pub fn partition_of(&self, edge: EdgeId) -> &[usize] {
        &self.partition[edge.0]
    }

    pub fn partition_len(&self) -> usize {
        self.partition.len()
    }

    /// Grid state as structured text: header plus one row of land-use codes
    /// per line, row-major.
    pub fn state_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("cell_size = {}\n", self.cell_size));
        out.push_str(&format!("origin = {} {}\n", self.origin.x, self.origin.y));
        out.push_str(&format!("rows = {}\n", self.rows));
        out.push_str(&format!("cols = {}\n", self.cols));
        for row in 0..self.rows {
            out.push_str("row = ");
            for col in 0..self.cols {
                out.push(self.cells[self.index_of(row, col)].land_use.code());
            }
            out.push('\n');
        }
        out
    }

    /// Applies land uses parsed by [`GridState::parse`]; dimensions must match.
    pub fn apply_state(&mut self, state: &GridState) -> Result<()> {
        if state.rows != self.rows || state.cols != self.cols {
            return Err(Error::GridState(format!(
                "dimension mismatch: grid is {}x{}, state is {}x{}",
                self.rows, self.cols, state.rows, state.cols
            )));
        }
        for (cell, use_) in self.cells.iter_mut().zip(&state.uses) {
            cell.land_use = *use_;
        }
        Ok(())
    }
}

/// Parsed grid state file.
#[derive(Debug, Clone)]
pub struct GridState {
    pub cell_size: f64,
    pub origin: Point,
    pub rows: usize,
    pub cols: usize,
    pub uses: Vec<LandUse>,
}

impl GridState {
    pub fn parse(text: &str) -> Result<GridState> {
        let mut cell_size = None;
        let mut origin = None;
        let mut rows = None;
        let mut cols = None;
        let mut uses = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let bad = |msg: &str| Error::GridState(format!("line {}: {msg}", n + 1));
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| bad("expected `key = value`"))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "cell_size" => cell_size = Some(value.parse().map_err(|_| bad("bad cell_size"))?),
                "origin" => {
                    let mut it = value.split_whitespace();
                    let x = it.next().and_then(|v| v.parse().ok());
                    let y = it.next().and_then(|v| v.parse().ok());
                    match (x, y) {
                        (Some(x), Some(y)) => origin = Some(Point::new(x, y)),
                        _ => return Err(bad("bad origin")),
                    }
                }
                "rows" => rows = Some(value.parse().map_err(|_| bad("bad rows"))?),
                "cols" => cols = Some(value.parse().map_err(|_| bad("bad cols"))?),
                "row" => {
                    for c in value.chars() {
                        uses.push(LandUse::from_code(c).ok_or_else(|| bad("unknown land-use code"))?);
                    }
                }
                _ => return Err(bad("unknown key")),
            }
        }
        let (rows, cols) = match (rows, cols) {
            (Some(r), Some(c)) => (r, c),
            _ => return Err(Error::GridState("missing rows/cols".into())),
        };
        if uses.len() != rows * cols {
            return Err(Error::GridState(format!(
                "expected {} cells, found {}",
                rows * cols,
                uses.len()
            )));
        }
        Ok(GridState {
            cell_size: cell_size.ok_or_else(|| Error::GridState("missing cell_size".into()))?,
            origin: origin.ok_or_else(|| Error::GridState("missing origin".into()))?,
            rows,
            cols,
            uses,
        })
    }
}

/// Builds the grid over the network bounding box plus margin and assigns each
/// cell to its nearest non-synthetic edge by exact point-to-polyline distance.
pub fn build_grid(net: &RoadNetwork, cfg: &GridConfig) -> Result<CellGrid> {
    let (min, max) = net.bounding_box().ok_or(Error::EmptyNetwork)?;
    let s = cfg.cell_size;
    let span_cells = |extent: f64| ((extent / s).ceil() as usize).max(1);
    let cols = span_cells(max.x - min.x) + 2 * cfg.margin_cells;
    let rows = span_cells(max.y - min.y) + 2 * cfg.margin_cells;
    if rows * cols > cfg.max_cells {
        return Err(Error::GridTooLarge {
            rows,
            cols,
            budget: cfg.max_cells,
        });
    }
    let origin = Point::new(
        min.x - cfg.margin_cells as f64 * s,
        min.y - cfg.margin_cells as f64 * s,
    );

    let street_edges: Vec<EdgeId> = net
        .edges()
        .iter()
        .enumerate()
        .filter(|(_, e)| !e.synthetic)
        .map(|(i, _)| EdgeId(i))
        .collect();
    if street_edges.is_empty() {
        return Err(Error::EmptyNetwork);
    }

    let cells: Vec<Cell> = (0..rows * cols)
        .into_par_iter()
        .map(|idx| {
            let (row, col) = (idx / cols, idx % cols);
            let center = Point::new(
                origin.x + (col as f64 + 0.5) * s,
                origin.y + (row as f64 + 0.5) * s,
            );
            // Brute-force nearest segment; ties keep the lowest edge id.
            let mut best_edge = street_edges[0];
            let mut best = project_onto_polyline(center, &net.edge(best_edge).geometry);
            for &eid in &street_edges[1..] {
                let proj = project_onto_polyline(center, &net.edge(eid).geometry);
                if proj.distance < best.distance {
                    best = proj;
                    best_edge = eid;
                }
            }
            Cell {
                index: (row, col),
                center,
                nearest_edge: best_edge,
                projection: best.point,
                arc_from_source: best.arc,
                d_n: best.distance,
                land_use: LandUse::Undeveloped,
            }
        })
        .collect();

    let mut partition = vec![Vec::new(); net.edge_count()];
    for (idx, cell) in cells.iter().enumerate() {
        partition[cell.nearest_edge.0].push(idx);
    }

    Ok(CellGrid {
        cell_size: s,
        origin,
        rows,
        cols,
        cells,
        partition,
    })
}

/// Marks every cell whose square touches a non-synthetic edge as street.
/// Idempotent.
pub fn mark_streets(grid: &mut CellGrid, net: &RoadNetwork) {
    let half = grid.cell_size / 2.0;
    for idx in 0..grid.cell_count() {
        let center = grid.cells[idx].center;
        let lo = Point::new(center.x - half, center.y - half);
        let hi = Point::new(center.x + half, center.y + half);
        let touched = net.edges().iter().filter(|e| !e.synthetic).any(|e| {
            e.geometry
                .windows(2)
                .any(|w| segment_intersects_rect(w[0], w[1], lo, hi))
        });
        if touched {
            grid.cells[idx].land_use = LandUse::Street;
        }
    }
}

/// Non-street cells within `develop_max_distance` of the network, most
/// accessible first; ties broken by (row, col).
pub fn developable_cells(
    grid: &CellGrid,
    field: &AccessibilityField,
    cfg: &GridConfig,
) -> Vec<usize> {
    let mut cells: Vec<usize> = (0..grid.cell_count())
        .filter(|&i| grid.cells[i].land_use != LandUse::Street)
        .filter(|&i| grid.cells[i].d_n <= cfg.develop_max_distance)
        .collect();
    cells.sort_by(|&a, &b| {
        field.normalized[b]
            .total_cmp(&field.normalized[a])
            .then_with(|| grid.cells[a].index.cmp(&grid.cells[b].index))
    });
    cells
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::roadnet::{parse_native, NetworkConfig};

    pub(crate) fn single_street_net() -> RoadNetwork {
        let doc = r#"
            [[nodes]]
            id = "A"
            x = 0.0
            y = 0.0
            [[nodes]]
            id = "B"
            x = 1000.0
            y = 0.0
            [[edges]]
            source = "A"
            target = "B"
            speed = 10.0
            [[edges]]
            source = "B"
            target = "A"
            speed = 10.0
        "#;
        parse_native(doc.as_bytes(), &NetworkConfig::default()).unwrap()
    }

    #[test]
    fn grid_covers_bbox_plus_margin() {
        let net = single_street_net();
        let grid = build_grid(&net, &GridConfig::default()).unwrap();
        assert_eq!(grid.cols, 54); // ceil(1000/20) + 2*2
        assert_eq!(grid.rows, 5); // degenerate height occupies one cell + margins
        assert_eq!(grid.origin, Point::new(-40.0, -40.0));
    }

    #[test]
    fn cell_projection_and_distance() {
        let net = single_street_net();
        let grid = build_grid(&net, &GridConfig::default()).unwrap();
        // Row 0 centers sit at y = -30; the street runs along y = 0.
        let idx = grid.index_of(0, 2);
        let cell = grid.cell(idx);
        assert!((cell.d_n - 30.0).abs() < 1e-9);
        assert!((cell.projection.y - 0.0).abs() < 1e-12);
        assert!((cell.projection.x - cell.center.x).abs() < 1e-9);
        assert!((cell.arc_from_source - cell.center.x).abs() < 1e-9);
    }

    #[test]
    fn projection_clamps_to_endpoints() {
        let net = single_street_net();
        let grid = build_grid(&net, &GridConfig::default()).unwrap();
        // Column 0 centers sit at x = -30, beyond the source node.
        let cell = grid.cell(grid.index_of(2, 0));
        assert!((cell.projection.x - 0.0).abs() < 1e-12);
        assert_eq!(cell.arc_from_source, 0.0);
        // Center (-30, 10): clamp to (0,0) gives sqrt(900+100).
        assert!((cell.d_n - (900.0f64 + 100.0).sqrt()).abs() < 1e-9);
    }

    #[test]
    fn partition_is_a_partition() {
        let net = single_street_net();
        let grid = build_grid(&net, &GridConfig::default()).unwrap();
        let total: usize = (0..grid.partition_len())
            .map(|e| grid.partition_of(EdgeId(e)).len())
            .sum();
        assert_eq!(total, grid.cell_count());
        let mut seen = vec![false; grid.cell_count()];
        for e in 0..grid.partition_len() {
            for &i in grid.partition_of(EdgeId(e)) {
                assert!(!seen[i], "cell {i} in two partition blocks");
                seen[i] = true;
            }
        }
        assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn nearest_edge_matches_brute_force_rescan() {
        let doc = r#"
            [[nodes]]
            id = "A"
            x = 0.0
            y = 0.0
            [[nodes]]
            id = "B"
            x = 300.0
            y = 0.0
            [[nodes]]
            id = "C"
            x = 300.0
            y = 240.0
            [[edges]]
            source = "A"
            target = "B"
            speed = 10.0
            [[edges]]
            source = "B"
            target = "C"
            speed = 10.0
        "#;
        let net = parse_native(doc.as_bytes(), &NetworkConfig::default()).unwrap();
        let grid = build_grid(&net, &GridConfig::default()).unwrap();
        for cell in grid.cells() {
            let mut best_d = f64::INFINITY;
            let mut best_e = 0;
            for (i, edge) in net.edges().iter().enumerate() {
                if edge.synthetic {
                    continue;
                }
                let d = project_onto_polyline(cell.center, &edge.geometry).distance;
                if d < best_d {
                    best_d = d;
                    best_e = i;
                }
            }
            assert_eq!(cell.nearest_edge, EdgeId(best_e));
            assert!((cell.d_n - best_d).abs() < 1e-12);
        }
    }

    #[test]
    fn equidistant_edges_pick_lowest_index() {
        // Two parallel streets; the middle row is equidistant.
        let doc = r#"
            [[nodes]]
            id = "A"
            x = 0.0
            y = 0.0
            [[nodes]]
            id = "B"
            x = 200.0
            y = 0.0
            [[nodes]]
            id = "C"
            x = 0.0
            y = 40.0
            [[nodes]]
            id = "D"
            x = 200.0
            y = 40.0
            [[edges]]
            source = "A"
            target = "B"
            speed = 10.0
            [[edges]]
            source = "C"
            target = "D"
            speed = 10.0
        "#;
        let net = parse_native(doc.as_bytes(), &NetworkConfig::default()).unwrap();
        let grid = build_grid(&net, &GridConfig::default()).unwrap();
        for cell in grid.cells() {
            if (cell.center.y - 20.0).abs() < 1e-12 && cell.center.x >= 0.0 && cell.center.x <= 200.0
            {
                assert_eq!(cell.nearest_edge, EdgeId(0));
            }
        }
    }

    #[test]
    fn streets_marked_along_edge_and_idempotent() {
        let net = single_street_net();
        let mut grid = build_grid(&net, &GridConfig::default()).unwrap();
        mark_streets(&mut grid, &net);
        // The street runs along y=0, the boundary between rows 1 and 2.
        for col in 2..52 {
            assert_eq!(grid.land_use(grid.index_of(1, col)), LandUse::Street);
            assert_eq!(grid.land_use(grid.index_of(2, col)), LandUse::Street);
        }
        // Cells 30 m away are not streets (half-diagonal is ~14.14 m).
        assert_eq!(grid.land_use(grid.index_of(0, 5)), LandUse::Undeveloped);
        let before: Vec<LandUse> = grid.cells().iter().map(|c| c.land_use).collect();
        mark_streets(&mut grid, &net);
        let after: Vec<LandUse> = grid.cells().iter().map(|c| c.land_use).collect();
        assert_eq!(before, after);
    }

    #[test]
    fn corner_clip_is_street() {
        // Diagonal street through cell corners.
        let doc = r#"
            [[nodes]]
            id = "A"
            x = 0.0
            y = 0.0
            [[nodes]]
            id = "B"
            x = 200.0
            y = 200.0
            [[edges]]
            source = "A"
            target = "B"
            speed = 10.0
        "#;
        let net = parse_native(doc.as_bytes(), &NetworkConfig::default()).unwrap();
        let mut grid = build_grid(&net, &GridConfig::default()).unwrap();
        mark_streets(&mut grid, &net);
        // The diagonal passes exactly through shared corners of off-diagonal
        // neighbors, e.g. the cell centered at (30, 10) has corner (20, 20)
        // on the line.
        let row = grid
            .cells()
            .iter()
            .position(|c| (c.center.x - 30.0).abs() < 1e-9 && (c.center.y - 10.0).abs() < 1e-9)
            .unwrap();
        assert_eq!(grid.land_use(row), LandUse::Street);
    }

    #[test]
    fn state_text_round_trips() {
        let net = single_street_net();
        let mut grid = build_grid(&net, &GridConfig::default()).unwrap();
        mark_streets(&mut grid, &net);
        grid.set_land_use(0, LandUse::Residential);
        grid.set_land_use(1, LandUse::Commercial);
        let text = grid.state_text();
        let state = GridState::parse(&text).unwrap();
        assert_eq!(state.rows, grid.rows);
        assert_eq!(state.cols, grid.cols);
        for (i, cell) in grid.cells().iter().enumerate() {
            assert_eq!(state.uses[i], cell.land_use);
        }
    }

    #[test]
    fn oversized_grid_is_rejected() {
        let net = single_street_net();
        let cfg = GridConfig {
            max_cells: 10,
            ..GridConfig::default()
        };
        match build_grid(&net, &cfg) {
            Err(Error::GridTooLarge { .. }) => {}
            other => panic!("expected size error, got {other:?}"),
        }
    }
}
