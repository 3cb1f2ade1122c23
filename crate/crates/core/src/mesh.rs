//! Undirected simple-graph model of square, hexagonal and triangular meshes.
//!
//! Every TBU sits on a lattice edge between two cells (one of which may be a
//! notional cell just outside the mesh). Its four ports are the corners of the
//! two faces it borders at its two ends. Ports that lie inside a mesh cell are
//! identified with the port of the other TBU bounding the same cell corner;
//! ports facing the outside are floating nodes of degree one.
//!
//! All three families share one construction: a family only has to say which
//! polygons tile the plane around the mesh. Vertices live on an integer layout
//! grid (see [`Family::layout_scale`] for the mapping to real coordinates).

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::MeshError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Square,
    HexParallelogram,
    TriParallelogram,
}

impl Family {
    /// Number of TBU edges around one cell.
    pub fn cell_sides(self) -> u64 {
        match self {
            Family::Square => 4,
            Family::HexParallelogram => 6,
            Family::TriParallelogram => 3,
        }
    }

    /// Multipliers mapping integer layout coordinates to real coordinates
    /// with unit edge length.
    pub fn layout_scale(self) -> (f64, f64) {
        let half_root3 = 3f64.sqrt() / 2.0;
        match self {
            Family::Square => (1.0, 1.0),
            Family::HexParallelogram => (half_root3, 0.5),
            Family::TriParallelogram => (0.5, half_root3),
        }
    }

    fn tag(self) -> &'static str {
        match self {
            Family::Square => "square",
            Family::HexParallelogram => "hex",
            Family::TriParallelogram => "tri",
        }
    }
}

/// Mesh family and dimensions. Owns every closed-form count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MeshSpec {
    family: Family,
    rows: u32,
    cols: u32,
}

impl MeshSpec {
    pub fn new(family: Family, rows: u32, cols: u32) -> Result<Self, MeshError> {
        if rows == 0 || cols == 0 {
            return Err(MeshError::InvalidSpec(format!(
                "dimensions must be positive, got {rows}x{cols}"
            )));
        }
        if family == Family::TriParallelogram && !cols.is_multiple_of(2) {
            return Err(MeshError::InvalidSpec(format!(
                "triangular meshes need an even column count, got {cols}"
            )));
        }
        Ok(Self { family, rows, cols })
    }

    pub fn square(rows: u32, cols: u32) -> Result<Self, MeshError> {
        Self::new(Family::Square, rows, cols)
    }

    pub fn hex(rows: u32, cols: u32) -> Result<Self, MeshError> {
        Self::new(Family::HexParallelogram, rows, cols)
    }

    pub fn tri(rows: u32, cols: u32) -> Result<Self, MeshError> {
        Self::new(Family::TriParallelogram, rows, cols)
    }

    pub fn family(&self) -> Family {
        self.family
    }

    /// N
    pub fn rows(&self) -> u32 {
        self.rows
    }

    /// M
    pub fn cols(&self) -> u32 {
        self.cols
    }

    fn nm(&self) -> (u64, u64) {
        (self.rows as u64, self.cols as u64)
    }

    pub fn cell_count(&self) -> u64 {
        let (n, m) = self.nm();
        n * m
    }

    pub fn peripheral_count(&self) -> u64 {
        let (n, m) = self.nm();
        match self.family {
            Family::Square => 2 * n + 2 * m,
            Family::HexParallelogram => 4 * n + 4 * m - 2,
            Family::TriParallelogram => 2 * n + m,
        }
    }

    pub fn non_peripheral_count(&self) -> u64 {
        let (n, m) = (self.rows as i64, self.cols as i64);
        let count = match self.family {
            Family::Square => 2 * n * m - n - m,
            Family::HexParallelogram => 3 * n * m - 2 * n - 2 * m + 1,
            Family::TriParallelogram => (3 * n - 1) * m / 2 - n,
        };
        count as u64
    }

    pub fn tbu_count(&self) -> u64 {
        self.peripheral_count() + self.non_peripheral_count()
    }

    pub fn floating_count(&self) -> u64 {
        2 * self.peripheral_count()
    }

    pub fn non_floating_count(&self) -> u64 {
        self.family.cell_sides() * self.cell_count()
    }

    /// Undirected optical paths in any configuration.
    pub fn path_count(&self) -> u64 {
        self.floating_count() / 2
    }

    /// The same dimensions with rows and columns swapped (square only makes
    /// geometric sense; other families keep their own orientation).
    pub fn transposed(&self) -> Self {
        Self {
            family: self.family,
            rows: self.cols,
            cols: self.rows,
        }
    }
}

impl fmt::Display for MeshSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}x{}", self.family.tag(), self.rows, self.cols)
    }
}

impl FromStr for MeshSpec {
    type Err = MeshError;

    /// Parses `square:2x3`, `hex:1x1`, `tri:1x2`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || MeshError::InvalidSpec(format!("cannot parse mesh spec {s:?}"));
        let (tag, dims) = s.split_once(':').ok_or_else(bad)?;
        let family = match tag.trim().to_ascii_lowercase().as_str() {
            "square" | "sq" => Family::Square,
            "hex" | "hexagonal" => Family::HexParallelogram,
            "tri" | "triangular" => Family::TriParallelogram,
            _ => return Err(bad()),
        };
        let (n, m) = dims
            .trim()
            .split_once(['x', 'X'])
            .ok_or_else(bad)?;
        let n = n.trim().parse().map_err(|_| bad())?;
        let m = m.trim().parse().map_err(|_| bad())?;
        Self::new(family, n, m)
    }
}

/// Lattice vertex in integer layout coordinates. For square meshes `(y, x)`
/// is the `(row, col)` of the lattice vertex, row 0 at the top.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Point {
    pub y: i32,
    pub x: i32,
}

impl Point {
    pub fn new(x: i32, y: i32) -> Self {
        Self { y, x }
    }
}

/// A lattice cell. Cells with row 0 / N+1 or col 0 / M+1 (col -1 / M+2 for
/// triangular meshes) are notional cells outside the mesh.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Cell {
    pub row: i32,
    pub col: i32,
}

impl Cell {
    pub fn new(row: i32, col: i32) -> Self {
        Self { row, col }
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.row, self.col)
    }
}

/// TBU identifier: the unordered pair of cells it separates, stored sorted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TbuId {
    a: Cell,
    b: Cell,
}

impl TbuId {
    pub fn new(x: Cell, y: Cell) -> Self {
        if x <= y {
            Self { a: x, b: y }
        } else {
            Self { a: y, b: x }
        }
    }

    pub fn between(r1: i32, c1: i32, r2: i32, c2: i32) -> Self {
        Self::new(Cell::new(r1, c1), Cell::new(r2, c2))
    }

    pub fn cells(&self) -> (Cell, Cell) {
        (self.a, self.b)
    }
}

impl fmt::Display for TbuId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TBU{}-{}", self.a, self.b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    Horizontal,
    Vertical,
    /// Edge direction slot for hexagonal/triangular lattices.
    Slot(u8),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Quadrant {
    NW,
    NE,
    SW,
    SE,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Wedge {
    Quadrant(Quadrant),
    /// Angular index of the face around the vertex (hex 0..3, tri 0..6).
    Index(u8),
}

/// Boundary label of a floating node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SideLabel {
    Left,
    Right,
    Top,
    Bottom,
    /// Position along the perimeter for hexagonal/triangular meshes.
    Boundary(u32),
}

impl SideLabel {
    pub fn opposite(self) -> Option<SideLabel> {
        match self {
            SideLabel::Left => Some(SideLabel::Right),
            SideLabel::Right => Some(SideLabel::Left),
            SideLabel::Top => Some(SideLabel::Bottom),
            SideLabel::Bottom => Some(SideLabel::Top),
            SideLabel::Boundary(_) => None,
        }
    }

    pub fn is_horizontal_boundary(self) -> bool {
        matches!(self, SideLabel::Top | SideLabel::Bottom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct NodeId(pub u32);

impl NodeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// One TBU port: `end` indexes [`Tbu::ends`], `side` indexes [`Tbu::faces`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Port {
    pub tbu: u32,
    pub end: u8,
    pub side: u8,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Node {
    pub vertex: Point,
    pub wedge: Wedge,
    /// Face the port sits in (a mesh cell, or a notional cell when floating).
    pub face: Cell,
    /// Set exactly for floating nodes.
    pub side: Option<SideLabel>,
    ports: [Option<Port>; 2],
}

impl Node {
    pub fn degree(&self) -> usize {
        self.ports.iter().flatten().count()
    }

    pub fn is_floating(&self) -> bool {
        self.side.is_some()
    }

    pub fn ports(&self) -> impl Iterator<Item = Port> + '_ {
        self.ports.iter().flatten().copied()
    }

    /// The port on this node that is not `p` (degree-2 nodes only).
    pub fn other_port(&self, p: Port) -> Option<Port> {
        match self.ports {
            [Some(a), Some(b)] if a == p => Some(b),
            [Some(a), Some(b)] if b == p => Some(a),
            _ => None,
        }
    }

    /// Short stable label, e.g. `r0c0SW` (square) or `x3y-2w1`.
    pub fn label(&self) -> String {
        match self.wedge {
            Wedge::Quadrant(q) => format!("r{}c{}{:?}", self.vertex.y, self.vertex.x, q),
            Wedge::Index(i) => format!("x{}y{}w{}", self.vertex.x, self.vertex.y, i),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TbuClass {
    Peripheral,
    NonPeripheral,
}

#[derive(Debug, Clone)]
pub struct Tbu {
    pub id: TbuId,
    /// Lattice endpoints, `ends[0] < ends[1]`.
    pub ends: [Point; 2],
    /// `[id.a, id.b]`.
    pub faces: [Cell; 2],
    pub orientation: Orientation,
    pub peripheral: bool,
    ports: [[NodeId; 2]; 2],
}

impl Tbu {
    /// Node at `(end, side)`.
    pub fn port_node(&self, end: usize, side: usize) -> NodeId {
        self.ports[end][side]
    }

    pub fn class(&self) -> TbuClass {
        if self.peripheral {
            TbuClass::Peripheral
        } else {
            TbuClass::NonPeripheral
        }
    }
}

/// Immutable graph representation of a mesh.
#[derive(Debug, Clone)]
pub struct MeshGraph {
    spec: MeshSpec,
    tbus: Vec<Tbu>,
    nodes: Vec<Node>,
    cells: Vec<Cell>,
    tbu_index: HashMap<TbuId, usize>,
    floating: Vec<NodeId>,
}

pub fn build_mesh(spec: MeshSpec) -> MeshGraph {
    MeshGraph::build(spec)
}

fn is_mesh_cell(spec: &MeshSpec, c: Cell) -> bool {
    c.row >= 1 && c.row <= spec.rows as i32 && c.col >= 1 && c.col <= spec.cols as i32
}

fn cell_corners(family: Family, c: Cell) -> Vec<Point> {
    match family {
        Family::Square => {
            let (i, j) = (c.row, c.col);
            vec![
                Point::new(j - 1, i - 1),
                Point::new(j, i - 1),
                Point::new(j, i),
                Point::new(j - 1, i),
            ]
        }
        Family::HexParallelogram => {
            let cx = 2 * c.col + c.row;
            let cy = 3 * c.row;
            vec![
                Point::new(cx, cy - 2),
                Point::new(cx + 1, cy - 1),
                Point::new(cx + 1, cy + 1),
                Point::new(cx, cy + 2),
                Point::new(cx - 1, cy + 1),
                Point::new(cx - 1, cy - 1),
            ]
        }
        Family::TriParallelogram => {
            // Rhombus (r, k) of the underlying parallelogram grid is split along
            // its short diagonal into a down-pointing cell 2k-1 and an up-pointing
            // cell 2k.
            let r = c.row;
            let vertex = |vr: i32, vc: i32| Point::new(2 * vc + vr, vr);
            if c.col.rem_euclid(2) == 1 {
                let k = (c.col + 1).div_euclid(2);
                vec![vertex(r - 1, k - 1), vertex(r - 1, k), vertex(r, k - 1)]
            } else {
                let k = c.col.div_euclid(2);
                vec![vertex(r - 1, k), vertex(r, k), vertex(r, k - 1)]
            }
        }
    }
}

fn extended_cells(spec: &MeshSpec) -> Vec<Cell> {
    let (n, m) = (spec.rows as i32, spec.cols as i32);
    let (c0, c1) = match spec.family {
        Family::TriParallelogram => (-1, m + 2),
        _ => (0, m + 1),
    };
    let mut out = Vec::new();
    for row in 0..=n + 1 {
        for col in c0..=c1 {
            out.push(Cell::new(row, col));
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum PortKey {
    Interior(Point, Cell),
    Floating(usize, u8),
}

impl MeshGraph {
    pub fn build(spec: MeshSpec) -> Self {
        let family = spec.family;
        let (sx, sy) = family.layout_scale();
        let real = |p: Point| (p.x as f64 * sx, p.y as f64 * sy);
        let centroid = |c: Cell| {
            let corners = cell_corners(family, c);
            let k = corners.len() as f64;
            let (x, y) = corners
                .iter()
                .map(|&p| real(p))
                .fold((0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
            (x / k, y / k)
        };

        let ext = extended_cells(&spec);
        let mut edge_faces: BTreeMap<(Point, Point), Vec<Cell>> = BTreeMap::new();
        let mut vertex_faces: HashMap<Point, Vec<Cell>> = HashMap::new();
        for &c in &ext {
            let corners = cell_corners(family, c);
            for (i, &p) in corners.iter().enumerate() {
                let q = corners[(i + 1) % corners.len()];
                let key = if p < q { (p, q) } else { (q, p) };
                edge_faces.entry(key).or_default().push(c);
                vertex_faces.entry(p).or_default().push(c);
            }
        }

        // TBU edges: every lattice edge touching a mesh cell.
        let mut raw: Vec<(TbuId, [Point; 2])> = edge_faces
            .iter()
            .filter(|(_, faces)| faces.iter().any(|&c| is_mesh_cell(&spec, c)))
            .map(|(&(p, q), faces)| {
                assert_eq!(faces.len(), 2, "edge {p:?}-{q:?} must border two faces");
                (TbuId::new(faces[0], faces[1]), [p, q])
            })
            .collect();
        // Canonical order: row-major by edge midpoint.
        raw.sort_by_key(|(_, [p, q])| (p.y + q.y, p.x + q.x));

        let wedge_of = |v: Point, face: Cell| -> Wedge {
            match family {
                Family::Square => {
                    let south = face.row == v.y + 1;
                    let east = face.col == v.x + 1;
                    Wedge::Quadrant(match (south, east) {
                        (false, false) => Quadrant::NW,
                        (false, true) => Quadrant::NE,
                        (true, false) => Quadrant::SW,
                        (true, true) => Quadrant::SE,
                    })
                }
                _ => {
                    let (vx, vy) = real(v);
                    let angle = |c: Cell| {
                        let (cx, cy) = centroid(c);
                        (cy - vy).atan2(cx - vx)
                    };
                    let mut around = vertex_faces[&v].clone();
                    around.sort_by(|a, b| angle(*a).total_cmp(&angle(*b)));
                    let idx = around.iter().position(|&c| c == face).expect("face at vertex");
                    Wedge::Index(idx as u8)
                }
            }
        };

        // Collect every port and its node key.
        let mut keyed: BTreeMap<PortKey, Vec<Port>> = BTreeMap::new();
        for (t, (id, ends)) in raw.iter().enumerate() {
            let faces = [id.a, id.b];
            for (e, &v) in ends.iter().enumerate() {
                for (s, &face) in faces.iter().enumerate() {
                    let key = if is_mesh_cell(&spec, face) {
                        PortKey::Interior(v, face)
                    } else {
                        PortKey::Floating(t, e as u8)
                    };
                    keyed.entry(key).or_default().push(Port {
                        tbu: t as u32,
                        end: e as u8,
                        side: s as u8,
                    });
                }
            }
        }

        let mesh_center = {
            let cells: Vec<_> = ext.iter().filter(|&&c| is_mesh_cell(&spec, c)).collect();
            let k = cells.len() as f64;
            let (x, y) = cells
                .iter()
                .map(|&&c| centroid(c))
                .fold((0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
            (x / k, y / k)
        };

        struct Draft {
            vertex: Point,
            wedge: Wedge,
            face: Cell,
            floating: bool,
            order_tbu: usize,
            ports: Vec<Port>,
        }
        let mut drafts: Vec<Draft> = keyed
            .into_values()
            .map(|ports| {
                let p0 = ports[0];
                let (id, ends) = &raw[p0.tbu as usize];
                let vertex = ends[p0.end as usize];
                let face = [id.a, id.b][p0.side as usize];
                Draft {
                    vertex,
                    wedge: wedge_of(vertex, face),
                    face,
                    floating: !is_mesh_cell(&spec, face),
                    order_tbu: ports.iter().map(|p| p.tbu as usize).min().unwrap(),
                    ports,
                }
            })
            .collect();
        drafts.sort_by_key(|d| (d.vertex, d.wedge, d.order_tbu));

        // Perimeter ordinal for hex/tri floating nodes, by angle about the centre.
        let mut ordinal: HashMap<usize, u32> = HashMap::new();
        if family != Family::Square {
            let mut fl: Vec<(f64, usize)> = drafts
                .iter()
                .enumerate()
                .filter(|(_, d)| d.floating)
                .map(|(i, d)| {
                    let (vx, vy) = real(d.vertex);
                    let (fx, fy) = centroid(d.face);
                    let (px, py) = (vx + 0.25 * (fx - vx), vy + 0.25 * (fy - vy));
                    ((py - mesh_center.1).atan2(px - mesh_center.0), i)
                })
                .collect();
            fl.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            for (rank, (_, i)) in fl.into_iter().enumerate() {
                ordinal.insert(i, rank as u32);
            }
        }

        let (n, m) = (spec.rows as i32, spec.cols as i32);
        let mut nodes = Vec::with_capacity(drafts.len());
        let mut port_node: HashMap<(u32, u8, u8), NodeId> = HashMap::new();
        for (i, d) in drafts.into_iter().enumerate() {
            let side = if !d.floating {
                None
            } else if family == Family::Square {
                Some(if d.face.row == 0 {
                    SideLabel::Top
                } else if d.face.row == n + 1 {
                    SideLabel::Bottom
                } else if d.face.col == 0 {
                    SideLabel::Left
                } else {
                    debug_assert_eq!(d.face.col, m + 1);
                    SideLabel::Right
                })
            } else {
                Some(SideLabel::Boundary(ordinal[&i]))
            };
            let mut ports = [None, None];
            for (slot, p) in d.ports.iter().enumerate() {
                ports[slot] = Some(*p);
                port_node.insert((p.tbu, p.end, p.side), NodeId(i as u32));
            }
            nodes.push(Node {
                vertex: d.vertex,
                wedge: d.wedge,
                face: d.face,
                side,
                ports,
            });
        }

        let tbus: Vec<Tbu> = raw
            .iter()
            .enumerate()
            .map(|(t, (id, ends))| {
                let t = t as u32;
                let ports = [
                    [port_node[&(t, 0, 0)], port_node[&(t, 0, 1)]],
                    [port_node[&(t, 1, 0)], port_node[&(t, 1, 1)]],
                ];
                let peripheral = ports.iter().flatten().any(|&n| nodes[n.index()].is_floating());
                let (dx, dy) = (ends[1].x - ends[0].x, ends[1].y - ends[0].y);
                let orientation = match family {
                    Family::Square if dy == 0 => Orientation::Horizontal,
                    Family::Square => Orientation::Vertical,
                    Family::HexParallelogram if dx == 0 => Orientation::Slot(0),
                    Family::TriParallelogram if dy == 0 => Orientation::Slot(0),
                    _ if dx > 0 => Orientation::Slot(1),
                    _ => Orientation::Slot(2),
                };
                Tbu {
                    id: *id,
                    ends: *ends,
                    faces: [id.a, id.b],
                    orientation,
                    peripheral,
                    ports,
                }
            })
            .collect();

        let tbu_index = tbus.iter().enumerate().map(|(i, t)| (t.id, i)).collect();
        let floating = nodes
            .iter()
            .enumerate()
            .filter(|(_, nd)| nd.is_floating())
            .map(|(i, _)| NodeId(i as u32))
            .collect();
        let mut cells: Vec<Cell> = ext.into_iter().filter(|&c| is_mesh_cell(&spec, c)).collect();
        cells.sort();

        Self {
            spec,
            tbus,
            nodes,
            cells,
            tbu_index,
            floating,
        }
    }

    pub fn spec(&self) -> &MeshSpec {
        &self.spec
    }

    pub fn family(&self) -> Family {
        self.spec.family
    }

    /// TBUs in canonical order (the bit order of configurations).
    pub fn tbus(&self) -> &[Tbu] {
        &self.tbus
    }

    pub fn tbu(&self, index: usize) -> &Tbu {
        &self.tbus[index]
    }

    pub fn tbu_count(&self) -> usize {
        self.tbus.len()
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id.index()]
    }

    pub fn floating_nodes(&self) -> &[NodeId] {
        &self.floating
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn contains_cell(&self, c: Cell) -> bool {
        is_mesh_cell(&self.spec, c)
    }

    pub fn tbu_index(&self, id: &TbuId) -> Option<usize> {
        self.tbu_index.get(id).copied()
    }

    /// Canonical index of the TBU between two cells.
    pub fn tbu_between(&self, a: Cell, b: Cell) -> Option<usize> {
        self.tbu_index(&TbuId::new(a, b))
    }

    pub fn classify_tbu(&self, id: &TbuId) -> Result<TbuClass, MeshError> {
        self.tbu_index(id)
            .map(|i| self.tbus[i].class())
            .ok_or(MeshError::UnknownTbu(*id))
    }

    /// TBUs bordering `cell`, in canonical order.
    pub fn cell_tbus(&self, cell: Cell) -> Vec<usize> {
        self.tbus
            .iter()
            .enumerate()
            .filter(|(_, t)| t.faces.contains(&cell))
            .map(|(i, _)| i)
            .collect()
    }

    pub fn side(&self, id: NodeId) -> Option<SideLabel> {
        self.nodes[id.index()].side
    }

    /// Real-plane position of a lattice vertex (unit edge length).
    pub fn point_position(&self, p: Point) -> (f64, f64) {
        let (sx, sy) = self.family().layout_scale();
        (p.x as f64 * sx, p.y as f64 * sy)
    }

    pub fn cell_corners(&self, c: Cell) -> Vec<Point> {
        cell_corners(self.family(), c)
    }

    pub fn cell_centroid(&self, c: Cell) -> (f64, f64) {
        let corners = self.cell_corners(c);
        let k = corners.len() as f64;
        let (x, y) = corners
            .iter()
            .map(|&p| self.point_position(p))
            .fold((0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
        (x / k, y / k)
    }

    /// Drawing position of a node: its vertex pulled a fraction into its face.
    pub fn node_position(&self, id: NodeId) -> (f64, f64) {
        let nd = &self.nodes[id.index()];
        let (vx, vy) = self.point_position(nd.vertex);
        let (fx, fy) = self.cell_centroid(nd.face);
        (vx + 0.22 * (fx - vx), vy + 0.22 * (fy - vy))
    }
}
