//! Rooted K4/W4 minors: every simple 3-connected graph with two disjoint
//! marked edges has a K4 minor using both (nonadjacent) or a W4 minor with
//! both as opposite rim edges.

use std::collections::{BTreeSet, HashSet, VecDeque};

use serde::Serialize;
use thiserror::Error;

use crate::graph::Multigraph;
use crate::subset;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RootedError {
    #[error("graph must be simple")]
    NotSimple,
    #[error("graph must be 3-connected")]
    NotThreeConnected,
    #[error("marked edges must exist and have four distinct endpoints")]
    BadMarkedEdges,
    #[error("no witness found; this contradicts the rooted-minor lemma")]
    NoWitness,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum MinorOp {
    Delete(String),
    Contract(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TerminalKind {
    K4,
    W4,
}

#[derive(Debug, Clone, Serialize)]
pub struct RootedMinorWitness {
    pub operations: Vec<MinorOp>,
    pub terminal: TerminalKind,
    pub e1_image: String,
    pub e2_image: String,
}

pub fn is_simple(g: &Multigraph) -> bool {
    let mut seen = BTreeSet::new();
    for e in g.edges() {
        if e.is_loop() {
            return false;
        }
        if !seen.insert((e.u.min(e.v), e.u.max(e.v))) {
            return false;
        }
    }
    true
}

/// Vertex 3-connectivity by brute force: at least four vertices, connected,
/// and no cut set of size one or two.
pub fn is_three_connected(g: &Multigraph) -> bool {
    let n = g.vertex_count();
    if n < 4 || !g.is_connected() {
        return false;
    }
    for a in 0..n {
        if !g.delete_vertex(a).is_connected() {
            return false;
        }
    }
    for a in 0..n {
        for b in (a + 1)..n {
            // delete the larger index first so the smaller stays valid
            if !g.delete_vertex(b).delete_vertex(a).is_connected() {
                return false;
            }
        }
    }
    true
}

/// Normalize to a simple graph: drop loops, collapse parallel classes
/// (keeping marked edges), suppress degree-2 vertices, drop isolated
/// vertices. Returns `None` when a marked edge degenerates.
fn normalize(
    mut g: Multigraph,
    e1: &str,
    e2: &str,
    ops: &mut Vec<MinorOp>,
) -> Option<Multigraph> {
    loop {
        // loops
        if let Some(i) = (0..g.edge_count()).find(|&i| g.edge(i).is_loop()) {
            let id = g.edge(i).id.clone();
            if id == e1 || id == e2 {
                return None;
            }
            ops.push(MinorOp::Delete(id));
            g = g.delete_edges(subset::bit(i));
            continue;
        }
        // parallel pairs
        let mut parallel: Option<usize> = None;
        'outer: for i in 0..g.edge_count() {
            for j in (i + 1)..g.edge_count() {
                let (a, b) = (g.edge(i), g.edge(j));
                if (a.u.min(a.v), a.u.max(a.v)) == (b.u.min(b.v), b.u.max(b.v)) {
                    let marked = |id: &str| id == e1 || id == e2;
                    if marked(&a.id) && marked(&b.id) {
                        return None; // markers became parallel
                    }
                    parallel = Some(if marked(&a.id) { j } else { i });
                    break 'outer;
                }
            }
        }
        if let Some(i) = parallel {
            ops.push(MinorOp::Delete(g.edge(i).id.clone()));
            g = g.delete_edges(subset::bit(i));
            continue;
        }
        // degree-2 suppression: contract one incident edge that is unmarked
        let mut suppressed = false;
        for v in 0..g.vertex_count() {
            let incident: Vec<usize> = (0..g.edge_count())
                .filter(|&i| {
                    let e = g.edge(i);
                    e.u == v || e.v == v
                })
                .collect();
            if incident.len() != 2 {
                continue;
            }
            let pick = incident
                .iter()
                .find(|&&i| g.edge(i).id != e1 && g.edge(i).id != e2);
            match pick {
                Some(&i) => {
                    ops.push(MinorOp::Contract(g.edge(i).id.clone()));
                    g = g.contract_edge(i);
                    suppressed = true;
                    break;
                }
                None => return None, // both marked: the markers are in series
            }
        }
        if suppressed {
            continue;
        }
        // isolated vertices
        if let Some(v) = (0..g.vertex_count())
            .find(|&v| (0..g.edge_count()).all(|i| g.edge(i).u != v && g.edge(i).v != v))
        {
            g = g.delete_vertex(v);
            continue;
        }
        return Some(g);
    }
}

fn degrees(g: &Multigraph) -> Vec<usize> {
    (0..g.vertex_count())
        .map(|v| g.degree_in(g.full_edge_mask(), v))
        .collect()
}

fn terminal_kind(g: &Multigraph, e1: &str, e2: &str) -> Option<TerminalKind> {
    let i1 = g.edge_index(e1)?;
    let i2 = g.edge_index(e2)?;
    let (a, b) = (g.edge(i1), g.edge(i2));
    let disjoint = a.u != b.u && a.u != b.v && a.v != b.u && a.v != b.v;
    if !disjoint {
        return None;
    }
    let deg = degrees(g);
    if g.vertex_count() == 4 && g.edge_count() == 6 && deg.iter().all(|&d| d == 3) {
        return Some(TerminalKind::K4);
    }
    if g.vertex_count() == 5 && g.edge_count() == 8 {
        let mut sorted = deg.clone();
        sorted.sort_unstable();
        if sorted == [3, 3, 3, 3, 4]
            && [a.u, a.v, b.u, b.v].iter().all(|&v| deg[v] == 3)
        {
            return Some(TerminalKind::W4);
        }
    }
    None
}

/// Canonical key of a marked graph under vertex relabeling.
fn canonical_key(g: &Multigraph, e1: &str, e2: &str) -> String {
    let n = g.vertex_count();
    let mut perms: Vec<Vec<usize>> = vec![(0..n).collect()];
    {
        let mut out = Vec::new();
        let mut cur: Vec<usize> = (0..n).collect();
        fn heap(k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if k <= 1 {
                out.push(cur.clone());
                return;
            }
            for i in 0..k {
                heap(k - 1, cur, out);
                if k % 2 == 0 {
                    cur.swap(i, k - 1);
                } else {
                    cur.swap(0, k - 1);
                }
            }
        }
        heap(n, &mut cur, &mut out);
        perms = out;
    }
    let mut best: Option<Vec<(usize, usize, u8)>> = None;
    for p in &perms {
        let mut rows: Vec<(usize, usize, u8)> = g
            .edges()
            .iter()
            .map(|e| {
                let (u, v) = (p[e.u].min(p[e.v]), p[e.u].max(p[e.v]));
                let mark = if e.id == e1 {
                    1
                } else if e.id == e2 {
                    2
                } else {
                    0
                };
                (u, v, mark)
            })
            .collect();
        rows.sort_unstable();
        // marks 1 and 2 are interchangeable
        let mut alt: Vec<(usize, usize, u8)> = rows
            .iter()
            .map(|&(u, v, m)| (u, v, if m == 0 { 0 } else { 3 - m }))
            .collect();
        alt.sort_unstable();
        for cand in [rows, alt] {
            if best.as_ref().is_none_or(|b| cand < *b) {
                best = Some(cand);
            }
        }
    }
    format!("{:?}", best.unwrap())
}

/// Breadth-first search over graph minors keeping the two marked edges,
/// with degree-2 suppression folded into normalization.
pub fn rooted_k4_w4_minor(
    g: &Multigraph,
    e1: &str,
    e2: &str,
) -> Result<RootedMinorWitness, RootedError> {
    if !is_simple(g) {
        return Err(RootedError::NotSimple);
    }
    if !is_three_connected(g) {
        return Err(RootedError::NotThreeConnected);
    }
    let (i1, i2) = match (g.edge_index(e1), g.edge_index(e2)) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(RootedError::BadMarkedEdges),
    };
    {
        let (a, b) = (g.edge(i1), g.edge(i2));
        let mut ends = BTreeSet::new();
        for v in [a.u, a.v, b.u, b.v] {
            ends.insert(v);
        }
        if ends.len() != 4 {
            return Err(RootedError::BadMarkedEdges);
        }
    }

    let mut queue: VecDeque<(Multigraph, Vec<MinorOp>)> = VecDeque::new();
    let mut seen: HashSet<String> = HashSet::new();
    queue.push_back((g.clone(), Vec::new()));
    seen.insert(canonical_key(g, e1, e2));
    while let Some((cur, ops)) = queue.pop_front() {
        if let Some(kind) = terminal_kind(&cur, e1, e2) {
            return Ok(RootedMinorWitness {
                operations: ops,
                terminal: kind,
                e1_image: e1.to_string(),
                e2_image: e2.to_string(),
            });
        }
        for i in 0..cur.edge_count() {
            let id = cur.edge(i).id.clone();
            if id == e1 || id == e2 {
                continue;
            }
            for op in [MinorOp::Delete(id.clone()), MinorOp::Contract(id.clone())] {
                let mut next_ops = ops.clone();
                next_ops.push(op.clone());
                let applied = match op {
                    MinorOp::Delete(_) => cur.delete_edges(subset::bit(i)),
                    MinorOp::Contract(_) => cur.contract_edge(i),
                };
                if let Some(next) = normalize(applied, e1, e2, &mut next_ops) {
                    if next.edge_index(e1).is_none() || next.edge_index(e2).is_none() {
                        continue;
                    }
                    let key = canonical_key(&next, e1, e2);
                    if seen.insert(key) {
                        queue.push_back((next, next_ops));
                    }
                }
            }
        }
    }
    Err(RootedError::NoWitness)
}

/// Replay a witness from the input graph: apply each operation, then
/// normalize implicitly via the recorded operations only.
pub fn replay(g: &Multigraph, ops: &[MinorOp]) -> Option<Multigraph> {
    let mut cur = g.clone();
    for op in ops {
        match op {
            MinorOp::Delete(id) => {
                let i = cur.edge_index(id)?;
                cur = cur.delete_edges(subset::bit(i));
            }
            MinorOp::Contract(id) => {
                let i = cur.edge_index(id)?;
                cur = cur.contract_edge(i);
            }
        }
    }
    // drop isolated vertices for shape comparison
    loop {
        match (0..cur.vertex_count())
            .find(|&v| (0..cur.edge_count()).all(|i| cur.edge(i).u != v && cur.edge(i).v != v))
        {
            Some(v) => cur = cur.delete_vertex(v),
            None => return Some(cur),
        }
    }
}

/// All simple 3-connected graphs on up to `max_vertices` vertices, up to
/// isomorphism, with vertices `v0..`.
pub fn small_three_connected_graphs(max_vertices: usize) -> Vec<Multigraph> {
    let mut out: Vec<Multigraph> = Vec::new();
    let mut seen: HashSet<String> = HashSet::new();
    for n in 4..=max_vertices {
        let pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|u| ((u + 1)..n).map(move |v| (u, v)))
            .collect();
        for mask in 0u64..(1 << pairs.len()) {
            if (mask.count_ones() as usize) < 3 * n / 2 {
                continue; // 3-connected needs minimum degree 3
            }
            let edges: Vec<(String, usize, usize)> = subset::members(mask)
                .enumerate()
                .map(|(k, p)| (format!("e{k}"), pairs[p].0, pairs[p].1))
                .collect();
            let g = Multigraph::from_indexed(n, edges);
            if !is_three_connected(&g) {
                continue;
            }
            let key = canonical_key(&g, "", "");
            if seen.insert(key) {
                out.push(g);
            }
        }
    }
    out
}
