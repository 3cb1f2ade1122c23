//! Explicit configurations for requested path lengths.
//!
//! Square and hexagonal meshes use the ring-merging recipe: crossing the TBUs
//! between consecutive cells of a connected run of `k` cells fuses their
//! rings into one closed loop of `sides·k`. Crossing one peripheral TBU of
//! that run opens the loop into a path of `sides·k + 1`; crossing two splits
//! it into two paths whose lengths sum to `sides·k + 2`.

use serde::Serialize;

use crate::config::{Configuration, EnumerationLimit};
use crate::error::ConstructError;
use crate::mesh::{Cell, Family, MeshGraph, MeshSpec, NodeId, TbuId};
use crate::oracle::{oracle_realizable_lengths, OracleOptions};
use crate::theory::{single_path_realizable, WitnessSet};
use crate::trace::trace;

/// Which recipe produced a configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Recipe {
    AllBar,
    /// Open ring: one peripheral TBU crossed.
    OpenRing,
    /// Ring split by two peripheral TBUs at the top-left corner.
    CornerSplit,
    /// Ring split by the left TBU of the first cell and the top TBU of the second.
    OffsetSplit,
    /// Ring covering at least the first row, split at both ends of that row.
    RowSpan,
    /// Ring split at two peripheral TBUs found by scanning pairs.
    PairScan,
    /// First witness of an exhaustive sweep.
    Oracle,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConstructedPath {
    #[serde(skip)]
    pub config: Configuration,
    pub bits: String,
    pub length: u64,
    pub start: NodeId,
    pub end: NodeId,
    pub recipe: Recipe,
    /// The crossed TBUs; every other TBU is bar.
    pub cross: Vec<TbuId>,
}

/// Cells in consumption order: rows top to bottom, alternating direction.
pub fn zigzag_order(spec: &MeshSpec) -> Vec<Cell> {
    let (n, m) = (spec.rows() as i32, spec.cols() as i32);
    let mut out = Vec::with_capacity(spec.cell_count() as usize);
    for r in 1..=n {
        if r % 2 == 1 {
            out.extend((1..=m).map(|c| Cell::new(r, c)));
        } else {
            out.extend((1..=m).rev().map(|c| Cell::new(r, c)));
        }
    }
    out
}

/// Row-major order, used where the zigzag does not keep prefixes connected.
fn row_major_order(spec: &MeshSpec) -> Vec<Cell> {
    let (n, m) = (spec.rows() as i32, spec.cols() as i32);
    (1..=n)
        .flat_map(|r| (1..=m).map(move |c| Cell::new(r, c)))
        .collect()
}

fn consumption_order(spec: &MeshSpec) -> Vec<Cell> {
    match spec.family() {
        Family::TriParallelogram => row_major_order(spec),
        _ => zigzag_order(spec),
    }
}

/// TBUs joining the first `k` cells of the consumption order into a tree:
/// each cell links to its predecessor, or to its earliest earlier neighbour.
fn tree_edges(mesh: &MeshGraph, k: usize) -> Vec<usize> {
    let order = consumption_order(mesh.spec());
    let mut out = Vec::new();
    for i in 1..k {
        let link = mesh
            .tbu_between(order[i - 1], order[i])
            .or_else(|| order[..i].iter().find_map(|&c| mesh.tbu_between(c, order[i])))
            .expect("consumption prefixes are connected");
        out.push(link);
    }
    out
}

fn tbu(mesh: &MeshGraph, r1: i32, c1: i32, r2: i32, c2: i32) -> usize {
    mesh.tbu_index(&TbuId::between(r1, c1, r2, c2))
        .expect("recipe names an existing TBU")
}

fn finish(mesh: &MeshGraph, cross: Vec<usize>, x: u64, recipe: Recipe) -> Option<ConstructedPath> {
    let config = Configuration::with_cross(mesh, cross);
    let t = trace(mesh, &config);
    let p = t.paths.iter().find(|p| p.length as u64 == x)?;
    Some(ConstructedPath {
        bits: config.to_bits(),
        cross: config.cross_indices().iter().map(|&i| mesh.tbu(i).id).collect(),
        length: x,
        start: p.start,
        end: p.end,
        recipe,
        config,
    })
}

/// Square recipe in the mesh's own coordinates, or `None` when it needs the
/// transposed mesh.
fn square_cross_set(mesh: &MeshGraph, x: u64) -> Option<(Vec<usize>, Recipe)> {
    let spec = mesh.spec();
    let m = spec.cols() as i32;
    let cells = spec.cell_count();
    let left = tbu(mesh, 1, 0, 1, 1);
    let with_tree = |k: u64, extra: &[usize]| {
        let mut v = tree_edges(mesh, k as usize);
        v.extend_from_slice(extra);
        v
    };
    match x % 4 {
        _ if x == 1 => Some((Vec::new(), Recipe::AllBar)),
        1 => Some((with_tree((x - 1) / 4, &[left]), Recipe::OpenRing)),
        0 => Some((with_tree(x / 4, &[left, tbu(mesh, 0, 1, 1, 1)]), Recipe::CornerSplit)),
        2 if x == 2 => Some((vec![left, tbu(mesh, 0, 1, 1, 1)], Recipe::CornerSplit)),
        2 => {
            if m < 2 {
                return None;
            }
            let k = (x + 2) / 4;
            Some((with_tree(k, &[left, tbu(mesh, 0, 2, 1, 2)]), Recipe::OffsetSplit))
        }
        _ => {
            if m % 2 == 0 || x < 2 * m as u64 + 1 {
                return None;
            }
            let k = (x + 2 * m as u64 - 1) / 4;
            (k <= cells).then(|| (with_tree(k, &[left, tbu(mesh, 1, m, 1, m + 1)]), Recipe::RowSpan))
        }
    }
}

fn transpose_id(id: TbuId) -> TbuId {
    let (a, b) = id.cells();
    TbuId::new(Cell::new(a.col, a.row), Cell::new(b.col, b.row))
}

fn construct_square(mesh: &MeshGraph, x: u64, witness: WitnessSet) -> Result<ConstructedPath, ConstructError> {
    let direct = if witness == WitnessSet::GammaN {
        None
    } else {
        square_cross_set(mesh, x)
    };
    let (cross, recipe) = match direct {
        Some(found) => found,
        None => {
            let tmesh = MeshGraph::build(mesh.spec().transposed());
            let (tcross, recipe) =
                square_cross_set(&tmesh, x).ok_or(ConstructError::UnsupportedFamily(Family::Square))?;
            let cross = tcross
                .into_iter()
                .map(|i| {
                    mesh.tbu_index(&transpose_id(tmesh.tbu(i).id))
                        .expect("transposed TBU exists")
                })
                .collect();
            (cross, recipe)
        }
    };
    finish(mesh, cross, x, recipe).ok_or(ConstructError::UnsupportedFamily(Family::Square))
}

fn peripheral_tbus_of(mesh: &MeshGraph, cells: &[Cell]) -> Vec<usize> {
    let mut v: Vec<usize> = cells
        .iter()
        .flat_map(|&c| mesh.cell_tbus(c))
        .filter(|&i| mesh.tbu(i).peripheral)
        .collect();
    v.sort_unstable();
    v.dedup();
    v
}

fn construct_ring_scan(mesh: &MeshGraph, x: u64) -> Option<ConstructedPath> {
    let sides = mesh.family().cell_sides();
    let order = consumption_order(mesh.spec());
    if x == 1 {
        return finish(mesh, Vec::new(), 1, Recipe::AllBar);
    }
    if x % sides == 1 {
        let k = ((x - 1) / sides) as usize;
        let first = peripheral_tbus_of(mesh, &order[..1])[0];
        let mut cross = tree_edges(mesh, k);
        cross.push(first);
        return finish(mesh, cross, x, Recipe::OpenRing);
    }
    let k_min = x.div_ceil(sides).max(1) as usize;
    for k in k_min..=order.len() {
        let tree = tree_edges(mesh, k);
        let candidates = peripheral_tbus_of(mesh, &order[..k]);
        for (i, &a) in candidates.iter().enumerate() {
            for &b in &candidates[i + 1..] {
                let mut cross = tree.clone();
                cross.extend([a, b]);
                if let Some(found) = finish(mesh, cross, x, Recipe::PairScan) {
                    return Some(found);
                }
            }
        }
    }
    None
}

fn construct_by_oracle(mesh: &MeshGraph, x: u64) -> Result<ConstructedPath, ConstructError> {
    let opts = OracleOptions {
        limit: EnumerationLimit::default(),
        jobs: None,
    };
    let lengths = oracle_realizable_lengths(mesh, &opts)
        .map_err(|_| ConstructError::UnsupportedFamily(mesh.family()))?;
    let w = lengths
        .witness(x as u32)
        .ok_or(ConstructError::UnsupportedFamily(mesh.family()))?;
    let config = Configuration::from_index(mesh, w.index);
    finish(mesh, config.cross_indices(), x, Recipe::Oracle)
        .ok_or(ConstructError::UnsupportedFamily(mesh.family()))
}

/// A configuration containing a path of length exactly `x`.
///
/// Triangular meshes have no closed-form recipe; they are served by an
/// exhaustive sweep and fail with `UnsupportedFamily` above the enumeration cap.
pub fn construct_single_path(mesh: &MeshGraph, x: u64) -> Result<ConstructedPath, ConstructError> {
    let r = single_path_realizable(mesh.spec(), x);
    let Some(witness) = r.witness.filter(|_| r.realizable) else {
        return Err(ConstructError::NotRealizable { x, reason: r.reason });
    };
    match mesh.family() {
        Family::Square => construct_square(mesh, x, witness),
        Family::HexParallelogram => {
            construct_ring_scan(mesh, x).ok_or(ConstructError::UnsupportedFamily(mesh.family()))
        }
        Family::TriParallelogram => construct_by_oracle(mesh, x),
    }
}

/// One path of `sides·k0 + 1`, all others of length 1.
pub fn construct_extremal(mesh: &MeshGraph, k0: u64) -> Result<Configuration, ConstructError> {
    let max = mesh.spec().cell_count();
    if k0 > max {
        return Err(ConstructError::OutOfRange { k0, max });
    }
    if k0 == 0 {
        return Ok(Configuration::all_bar(mesh));
    }
    let order = consumption_order(mesh.spec());
    let mut cross = tree_edges(mesh, k0 as usize);
    cross.push(peripheral_tbus_of(mesh, &order[..1])[0]);
    Ok(Configuration::with_cross(mesh, cross))
}

/// The longest-path snake on a square mesh: the left TBU of cell (1,1), every
/// non-peripheral vertical TBU, and the row links alternating right/left.
pub fn construct_max_snake(mesh: &MeshGraph) -> Result<Configuration, ConstructError> {
    if mesh.family() != Family::Square {
        return Err(ConstructError::UnsupportedFamily(mesh.family()));
    }
    let spec = mesh.spec();
    let mut cross = tree_edges(mesh, spec.cell_count() as usize);
    cross.push(tbu(mesh, 1, 0, 1, 1));
    Ok(Configuration::with_cross(mesh, cross))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SnakeModification {
    /// Also cross the top TBU of cell (1,1): length `4NM`, type A.
    TopLeftHorizontal,
    /// Also cross the right TBU of cell (2,M): length `4NM+1-2M`, type O.
    SecondRightVertical,
}

pub fn construct_modified_snake(
    mesh: &MeshGraph,
    modification: SnakeModification,
) -> Result<Configuration, ConstructError> {
    let mut c = construct_max_snake(mesh)?;
    let m = mesh.spec().cols() as i32;
    let idx = match modification {
        SnakeModification::TopLeftHorizontal => tbu(mesh, 0, 1, 1, 1),
        SnakeModification::SecondRightVertical => {
            if mesh.spec().rows() < 2 {
                return Err(ConstructError::UnsupportedFamily(Family::Square));
            }
            tbu(mesh, 2, m, 2, m + 1)
        }
    };
    c.set(idx, crate::config::TbuState::Cross);
    Ok(c)
}
