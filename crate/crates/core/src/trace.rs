//! Tracing optical paths and untraveled loops through a configured mesh.
//!
//! Every non-floating node has degree exactly two, so a walk from a floating
//! node is forced: leave through the node's single port, follow the TBU arm
//! selected by the TBU's state, arrive at the next node, leave through its
//! other port. Arms never visited by any path form closed loops.

use num_rational::Ratio;
use serde::Serialize;

use crate::config::{Configuration, TbuState};
use crate::error::TraceError;
use crate::mesh::{Family, MeshGraph, MeshSpec, NodeId, Port, SideLabel};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TracedPath {
    /// Node sequence, `length + 1` entries, canonical orientation.
    pub nodes: Vec<NodeId>,
    /// TBU index of each traversed edge.
    pub tbus: Vec<u32>,
    pub length: u32,
    pub start: NodeId,
    pub end: NodeId,
    pub start_side: SideLabel,
    pub end_side: SideLabel,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClosedLoop {
    /// Node cycle; the first node is not repeated at the end.
    pub nodes: Vec<NodeId>,
    pub tbus: Vec<u32>,
    pub length: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum PathType {
    /// Same side.
    S,
    /// Adjacent sides.
    A,
    /// Opposite sides.
    O,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    pub paths: Vec<TracedPath>,
    pub loops: Vec<ClosedLoop>,
}

impl Trace {
    pub fn path_sum(&self) -> u64 {
        self.paths.iter().map(|p| p.length as u64).sum()
    }

    pub fn loop_sum(&self) -> u64 {
        self.loops.iter().map(|l| l.length as u64).sum()
    }

    pub fn lengths(&self) -> Vec<u32> {
        self.paths.iter().map(|p| p.length).collect()
    }
}

#[inline]
fn step(states: &[TbuState], from: Port) -> (Port, usize) {
    let t = from.tbu as usize;
    let end = 1 - from.end;
    let side = match states[t] {
        TbuState::Bar => from.side,
        TbuState::Cross => 1 - from.side,
    };
    // Arms are numbered by the side they occupy at end 0.
    let arm = if from.end == 0 { from.side } else { side };
    (
        Port {
            tbu: from.tbu,
            end,
            side,
        },
        2 * t + arm as usize,
    )
}

fn arrive(mesh: &MeshGraph, p: Port) -> NodeId {
    mesh.tbu(p.tbu as usize).port_node(p.end as usize, p.side as usize)
}

/// Reusable scratch space for repeated tracing (enumeration sweeps).
pub struct Tracer<'m> {
    mesh: &'m MeshGraph,
    visited: Vec<bool>,
}

impl<'m> Tracer<'m> {
    pub fn new(mesh: &'m MeshGraph) -> Self {
        Self {
            mesh,
            visited: vec![false; 2 * mesh.tbu_count()],
        }
    }

    /// Lengths of all paths, in order of their first floating node.
    pub fn path_lengths(&mut self, states: &[TbuState], out: &mut Vec<u32>) {
        let mesh = self.mesh;
        self.visited.iter_mut().for_each(|v| *v = false);
        out.clear();
        for &f in mesh.floating_nodes() {
            let start = mesh.node(f);
            let p0 = start.ports().next().expect("floating node has a port");
            let (_, arm0) = step(states, p0);
            if self.visited[arm0] {
                continue;
            }
            let mut p = p0;
            let mut len = 0;
            loop {
                let (q, arm) = step(states, p);
                self.visited[arm] = true;
                len += 1;
                let n = mesh.node(arrive(mesh, q));
                match n.other_port(q) {
                    Some(next) => p = next,
                    None => break,
                }
            }
            out.push(len);
        }
    }

    /// Lengths of untraveled loops. Must follow `path_lengths` on the same states.
    pub fn loop_lengths(&mut self, states: &[TbuState], out: &mut Vec<u32>) {
        let mesh = self.mesh;
        out.clear();
        for t in 0..mesh.tbu_count() {
            for arm in 0..2u8 {
                if self.visited[2 * t + arm as usize] {
                    continue;
                }
                let mut p = Port {
                    tbu: t as u32,
                    end: 0,
                    side: arm,
                };
                let mut len = 0;
                loop {
                    let (q, a) = step(states, p);
                    if self.visited[a] {
                        break;
                    }
                    self.visited[a] = true;
                    len += 1;
                    let n = mesh.node(arrive(mesh, q));
                    p = n.other_port(q).expect("loop nodes have degree two");
                }
                out.push(len);
            }
        }
    }
}

/// Traces every undirected path and closed loop of `config`.
pub fn trace(mesh: &MeshGraph, config: &Configuration) -> Trace {
    let states = config.states();
    let mut visited = vec![false; 2 * mesh.tbu_count()];
    let mut paths = Vec::with_capacity(mesh.spec().path_count() as usize);
    for &f in mesh.floating_nodes() {
        let p0 = mesh.node(f).ports().next().expect("floating node has a port");
        if visited[step(states, p0).1] {
            continue;
        }
        let mut nodes = vec![f];
        let mut tbus = Vec::new();
        let mut p = p0;
        loop {
            let (q, arm) = step(states, p);
            visited[arm] = true;
            tbus.push(q.tbu);
            let id = arrive(mesh, q);
            nodes.push(id);
            match mesh.node(id).other_port(q) {
                Some(next) => p = next,
                None => break,
            }
        }
        let (start, end) = (nodes[0], *nodes.last().unwrap());
        if end < start {
            nodes.reverse();
            tbus.reverse();
        }
        let (start, end) = (nodes[0], *nodes.last().unwrap());
        paths.push(TracedPath {
            length: tbus.len() as u32,
            start_side: mesh.side(start).expect("path starts at a floating node"),
            end_side: mesh.side(end).expect("path ends at a floating node"),
            nodes,
            tbus,
            start,
            end,
        });
    }
    paths.sort_by_key(|p| p.start);

    let mut loops = Vec::new();
    for t in 0..mesh.tbu_count() {
        for arm in 0..2u8 {
            if visited[2 * t + arm as usize] {
                continue;
            }
            let mut p = Port {
                tbu: t as u32,
                end: 0,
                side: arm,
            };
            let mut nodes = vec![arrive(mesh, p)];
            let mut tbus = Vec::new();
            loop {
                let (q, a) = step(states, p);
                if visited[a] {
                    break;
                }
                visited[a] = true;
                tbus.push(q.tbu);
                let id = arrive(mesh, q);
                nodes.push(id);
                p = mesh.node(id).other_port(q).expect("loop nodes have degree two");
            }
            nodes.pop();
            loops.push(ClosedLoop {
                length: tbus.len() as u32,
                nodes,
                tbus,
            });
        }
    }
    Trace { paths, loops }
}

pub fn trace_all_paths(mesh: &MeshGraph, config: &Configuration) -> Vec<TracedPath> {
    trace(mesh, config).paths
}

pub fn closed_loops(mesh: &MeshGraph, config: &Configuration) -> Vec<ClosedLoop> {
    trace(mesh, config).loops
}

pub fn classify_sides(start: SideLabel, end: SideLabel) -> Option<PathType> {
    if matches!(start, SideLabel::Boundary(_)) || matches!(end, SideLabel::Boundary(_)) {
        return None;
    }
    Some(if start == end {
        PathType::S
    } else if start.opposite() == Some(end) {
        PathType::O
    } else {
        PathType::A
    })
}

pub fn classify_path(mesh: &MeshGraph, path: &TracedPath) -> Result<PathType, TraceError> {
    if mesh.family() != Family::Square {
        return Err(TraceError::UnsupportedFamily(mesh.family()));
    }
    Ok(classify_sides(path.start_side, path.end_side).expect("square sides are labelled"))
}

/// Whether consecutive TBUs along the path alternate between vertical and
/// horizontal orientation (always true on square meshes).
pub fn alternates_orientation(mesh: &MeshGraph, path: &TracedPath) -> bool {
    path.tbus
        .windows(2)
        .all(|w| mesh.tbu(w[0] as usize).orientation != mesh.tbu(w[1] as usize).orientation)
}

/// Path-sum decomposition and moments of one configuration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathStats {
    /// Path lengths, ascending.
    pub lengths: Vec<u32>,
    pub sum: u64,
    /// Consumed cells: `sum = base + step * k0`.
    pub k0: u64,
    pub mean: Ratio<i64>,
    /// Population variance.
    pub variance: Ratio<i64>,
    pub max: u32,
}

/// `(base, step)` of the path-sum format for a family.
pub fn sum_format(spec: &MeshSpec) -> (u64, u64) {
    (spec.path_count(), spec.family().cell_sides())
}

pub fn path_stats(paths: &[TracedPath], spec: &MeshSpec) -> Result<PathStats, TraceError> {
    lengths_stats(&paths.iter().map(|p| p.length).collect::<Vec<_>>(), spec)
}

pub fn lengths_stats(lengths: &[u32], spec: &MeshSpec) -> Result<PathStats, TraceError> {
    let (base, step) = sum_format(spec);
    let sum: u64 = lengths.iter().map(|&l| l as u64).sum();
    if sum < base || !(sum - base).is_multiple_of(step) {
        return Err(TraceError::MalformedSum { sum, base, step });
    }
    let k0 = (sum - base) / step;
    let count = lengths.len() as i64;
    let mean = Ratio::new(sum as i64, count);
    let variance = lengths
        .iter()
        .map(|&l| {
            let d = Ratio::from_integer(l as i64) - mean;
            d * d
        })
        .fold(Ratio::from_integer(0), |a, b| a + b)
        / count;
    let mut sorted = lengths.to_vec();
    sorted.sort_unstable();
    Ok(PathStats {
        max: sorted.last().copied().unwrap_or(0),
        lengths: sorted,
        sum,
        k0,
        mean,
        variance,
    })
}
