//! The frame matroid of a biased graph, and the transformations that
//! preserve it: pinch/split, roll-up/unroll, twisted flips, loop- and
//! link-sums, and biseparation classification.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::biased::{BiasError, BiasedGraph};
use crate::graph::{GraphError, Multigraph};
use crate::matroid::{Matroid, MatroidError};
use crate::subset::{self, Mask};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FrameError {
    #[error(transparent)]
    Bias(#[from] BiasError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Matroid(#[from] MatroidError),
    #[error("the two vertices must be distinct")]
    SameVertex,
    #[error("not a signed graph: a block at the balancing vertex has more than two b-classes")]
    NotSignedGraph,
    #[error("vertex {0:?} is not balancing")]
    NotBalancing(String),
    #[error("edge set is not a b-class at the vertex")]
    NotABClass,
    #[error("edge {0:?} has the wrong kind for this sum")]
    WrongEdgeKind(String),
    #[error("link-sum requires a balanced first argument")]
    LinkSumFirstArgUnbalanced,
    #[error("twisted-flip condition {condition} violated{}", .edge.as_ref().map(|e| format!(" at edge {e:?}")).unwrap_or_default())]
    FlipConditionViolated { condition: u8, edge: Option<String> },
    #[error("not a 2-separation of the frame matroid")]
    NotA2Separation,
    #[error("biseparation is not of type 1 or 2")]
    NotType1Or2,
    #[error("edge ids overlap across the summands: {0:?}")]
    GroundOverlap(String),
}

/// Circuits of the frame matroid: balanced cycles, tight and loose
/// handcuffs, and contrabalanced thetas, with edge ids as the ground set.
pub fn frame_matroid(omega: &BiasedGraph) -> Result<Matroid, FrameError> {
    let circuits = frame_circuits(omega)?;
    Ok(Matroid::from_circuit_masks(
        omega.graph().edge_ids(),
        circuits,
    )?)
}

pub fn frame_circuits(omega: &BiasedGraph) -> Result<Vec<Mask>, FrameError> {
    let g = omega.graph();
    let mut out: BTreeSet<Mask> = BTreeSet::new();
    let cycles = omega.cycles();
    let balanced: Vec<bool> = cycles
        .iter()
        .map(|&c| omega.cycle_balanced_mask(c).unwrap())
        .collect();

    for (i, &c) in cycles.iter().enumerate() {
        if balanced[i] {
            out.insert(c);
        }
    }

    // handcuffs from pairs of edge-disjoint unbalanced cycles
    for i in 0..cycles.len() {
        if balanced[i] {
            continue;
        }
        for j in (i + 1)..cycles.len() {
            if balanced[j] || cycles[i] & cycles[j] != 0 {
                continue;
            }
            let (c1, c2) = (cycles[i], cycles[j]);
            let shared = g.vertices_of(c1) & g.vertices_of(c2);
            match shared.count_ones() {
                1 => {
                    out.insert(c1 | c2);
                }
                0 => {
                    for path in connecting_paths(g, c1, c2) {
                        out.insert(c1 | c2 | path);
                    }
                }
                _ => {}
            }
        }
    }

    // contrabalanced thetas
    for t in omega.theta_triples() {
        if t.iter().all(|&k| !balanced[k]) {
            out.insert(cycles[t[0]] | cycles[t[1]]);
        }
    }
    Ok(out.into_iter().collect())
}

/// All minimal paths between the vertex sets of two vertex-disjoint cycles,
/// with interior vertices avoiding both.
fn connecting_paths(g: &Multigraph, c1: Mask, c2: Mask) -> Vec<Mask> {
    let v1 = g.vertices_of(c1);
    let v2 = g.vertices_of(c2);
    let mut out = BTreeSet::new();
    fn dfs(
        g: &Multigraph,
        cur: usize,
        v1: Mask,
        v2: Mask,
        used: Mask,
        visited: Mask,
        out: &mut BTreeSet<Mask>,
    ) {
        for (i, e) in g.edges().iter().enumerate() {
            if e.is_loop() || subset::contains(used, i) || (e.u != cur && e.v != cur) {
                continue;
            }
            let w = e.other_end(cur);
            if subset::contains(visited, w) || subset::contains(v1, w) {
                continue;
            }
            if subset::contains(v2, w) {
                out.insert(used | subset::bit(i));
            } else {
                dfs(
                    g,
                    w,
                    v1,
                    v2,
                    used | subset::bit(i),
                    visited | subset::bit(w),
                    out,
                );
            }
        }
    }
    for a in subset::members(v1) {
        dfs(g, a, v1, v2, 0, v1, &mut out);
    }
    out.into_iter().collect()
}

/// Rank of an edge set by the frame formula `|V(X)| - b(X)`; the second
/// route of the circuit/rank cross-check.
pub fn frame_rank(omega: &BiasedGraph, x: Mask) -> u32 {
    omega.graph().vertices_of(x).count_ones() - omega.balanced_component_count(x) as u32
}

/// Frame matroid computed from the rank formula instead of circuit shapes:
/// circuits are the minimal sets with `|X| > |V(X)| - b(X)`.
pub fn frame_matroid_by_rank(omega: &BiasedGraph) -> Result<Matroid, FrameError> {
    Ok(Matroid::from_independence(
        omega.graph().edge_ids(),
        |x| frame_rank(omega, x) == x.count_ones(),
    )?)
}

/// Identify two vertices of a graph; the result is a signed graph whose
/// frame matroid equals the cycle matroid of the input.
pub fn pinch(h: &Multigraph, u: usize, v: usize) -> Result<BiasedGraph, FrameError> {
    if u == v {
        return Err(FrameError::SameVertex);
    }
    let keep = u.min(v);
    let gone = u.max(v);
    let names = h.vertex_names();
    let new_names: Vec<String> = names
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != gone)
        .map(|(_, s)| s.clone())
        .collect();
    let remap = |w: usize| {
        let w = if w == gone { keep } else { w };
        if w > gone {
            w - 1
        } else {
            w
        }
    };
    let edges: Vec<(String, String, String)> = h
        .edges()
        .iter()
        .map(|e| {
            (
                e.id.clone(),
                new_names[remap(e.u)].clone(),
                new_names[remap(e.v)].clone(),
            )
        })
        .collect();
    let g = Multigraph::new(new_names, edges)?;
    let sigma: Mask = h
        .links_at(u)
        .into_iter()
        .map(subset::bit)
        .fold(0, |a, b| a | b);
    let out = BiasedGraph::signed_masks(g, vec![sigma])?;
    debug_assert!(frame_matroid(&out)
        .unwrap()
        .same_labeled(&Matroid::cycle_matroid(h).unwrap()));
    Ok(out)
}

/// Split a balancing vertex of a signed graph into two, yielding a graph
/// whose cycle matroid equals the frame matroid of the input.
pub fn split(omega: &BiasedGraph, u: usize) -> Result<Multigraph, FrameError> {
    let g = omega.graph();
    let loops_at_u: Mask = g.loops_at(u).into_iter().map(subset::bit).fold(0, |a, b| a | b);
    let mut unbalanced_loops: Mask = 0;
    for i in subset::members(loops_at_u) {
        if !omega.cycle_balanced_mask(subset::bit(i)).unwrap() {
            unbalanced_loops |= subset::bit(i);
        }
    }
    let reduced = omega.delete_edges(unbalanced_loops)?;
    let ru = u; // vertices unchanged by edge deletion
    if !reduced.is_balancing(ru) {
        return Err(FrameError::NotBalancing(g.vertex_name(u).to_string()));
    }
    let classes = reduced.b_classes(ru)?;
    // each block of the graph may contain at most two b-classes
    let blocks = reduced.graph().blocks();
    let mut sigma: Mask = 0;
    for blk in &blocks {
        let mut in_block: Vec<Mask> = Vec::new();
        for &cls in &classes {
            // translate class mask (reduced indices) to block comparison
            if cls & blk != 0 {
                in_block.push(cls & blk);
            }
        }
        match in_block.len() {
            0 | 1 => {}
            2 => sigma |= in_block[0],
            _ => return Err(FrameError::NotSignedGraph),
        }
    }
    // translate sigma from reduced indices back to original edge ids
    let mut sigma_ids: Vec<String> = Vec::new();
    for i in subset::members(sigma) {
        sigma_ids.push(reduced.graph().edge(i).id.clone());
    }

    let base = g.vertex_name(u);
    let mut prime = format!("{base}.1");
    let mut second = format!("{base}.2");
    while g.vertex_index(&prime).is_some() {
        prime.push('x');
    }
    while g.vertex_index(&second).is_some() || second == prime {
        second.push('x');
    }
    let mut names: Vec<String> = Vec::new();
    for (i, nm) in g.vertex_names().iter().enumerate() {
        if i == u {
            names.push(prime.clone());
        } else {
            names.push(nm.clone());
        }
    }
    names.push(second.clone());

    let mut edges = Vec::new();
    for (i, e) in g.edges().iter().enumerate() {
        let id = e.id.clone();
        if subset::contains(unbalanced_loops, i) {
            edges.push((id, prime.clone(), second.clone()));
        } else if e.is_loop() && e.u == u {
            edges.push((id, prime.clone(), prime.clone()));
        } else if !e.is_loop() && (e.u == u || e.v == u) {
            let other = names[e.other_end(u)].clone();
            if sigma_ids.contains(&id) {
                edges.push((id, prime.clone(), other));
            } else {
                edges.push((id, second.clone(), other));
            }
        } else {
            edges.push((id, names[e.u].clone(), names[e.v].clone()));
        }
    }
    let h = Multigraph::new(names, edges)?;
    let check = Matroid::cycle_matroid(&h)?;
    assert!(
        check.same_labeled(&frame_matroid(omega)?),
        "splitting a balancing vertex must preserve the matroid"
    );
    Ok(h)
}

/// Replace the links of one b-class at a balancing vertex by unbalanced
/// loops at their far endpoints. The frame matroid is unchanged (checked).
pub fn roll_up(omega: &BiasedGraph, u: usize, cls: Mask) -> Result<BiasedGraph, FrameError> {
    let g = omega.graph();
    let mut unbalanced_loops: Mask = 0;
    for i in g.loops_at(u) {
        if !omega.cycle_balanced_mask(subset::bit(i)).unwrap() {
            unbalanced_loops |= subset::bit(i);
        }
    }
    let reduced = omega.delete_edges(unbalanced_loops)?;
    if !reduced.is_balancing(u) {
        return Err(FrameError::NotBalancing(g.vertex_name(u).to_string()));
    }
    // cls is given in original edge indices; translate into reduced indices
    let reduced_cls: Mask = subset::members(cls)
        .map(|i| {
            reduced
                .graph()
                .edge_index(&g.edge(i).id)
                .map(subset::bit)
                .unwrap_or(0)
        })
        .fold(0, |a, b| a | b);
    if reduced_cls.count_ones() != cls.count_ones()
        || !reduced.b_classes(u)?.contains(&reduced_cls)
    {
        return Err(FrameError::NotABClass);
    }

    let names = g.vertex_names().to_vec();
    let mut edges = Vec::new();
    for (i, e) in g.edges().iter().enumerate() {
        if subset::contains(cls, i) {
            let far = names[e.other_end(u)].clone();
            edges.push((e.id.clone(), far.clone(), far));
        } else {
            edges.push((e.id.clone(), names[e.u].clone(), names[e.v].clone()));
        }
    }
    let new_graph = Multigraph::new(names, edges)?;
    let rolled = rebuild_bias(omega, new_graph, |old_mask, new_single| {
        if let Some(i) = new_single {
            if subset::contains(cls, i) {
                return Some(false); // rolled-up loops are unbalanced
            }
        }
        let _ = old_mask;
        None
    })?;
    let before = frame_matroid(omega)?;
    let after = frame_matroid(&rolled)?;
    assert!(
        before.same_labeled(&after),
        "roll-up must preserve the frame matroid"
    );
    Ok(rolled)
}

/// Reverse of roll-up: unbalanced loops become links at `u`, and the bias
/// becomes the k-signed signature of the b-classes plus the old loop set.
pub fn unroll(omega: &BiasedGraph, u: usize) -> Result<BiasedGraph, FrameError> {
    let g = omega.graph();
    let mut loops: Mask = 0;
    for (i, _) in g.edges().iter().enumerate() {
        if g.edge(i).is_loop() && !omega.cycle_balanced_mask(subset::bit(i)).unwrap() {
            loops |= subset::bit(i);
        }
    }
    let reduced = omega.delete_edges(loops)?;
    if !reduced.is_balancing(u) {
        return Err(FrameError::NotBalancing(g.vertex_name(u).to_string()));
    }
    let classes = reduced.b_classes(u)?;

    let names = g.vertex_names().to_vec();
    let mut edges = Vec::new();
    for (i, e) in g.edges().iter().enumerate() {
        if subset::contains(loops, i) {
            edges.push((e.id.clone(), names[u].clone(), names[e.u].clone()));
        } else {
            edges.push((e.id.clone(), names[e.u].clone(), names[e.v].clone()));
        }
    }
    let new_graph = Multigraph::new(names, edges)?;
    // signature sets carry over by id: indices are unchanged by rebuild
    let mut sigma: Vec<Mask> = Vec::new();
    for cls in classes {
        let translated: Mask = subset::members(cls)
            .map(|ri| {
                let id = &reduced.graph().edge(ri).id;
                subset::bit(new_graph.edge_index(id).unwrap())
            })
            .fold(0, |a, b| a | b);
        sigma.push(translated);
    }
    sigma.push(loops);
    let out = BiasedGraph::signed_masks(new_graph, sigma)?;
    let before = frame_matroid(omega)?;
    let after = frame_matroid(&out)?;
    assert!(
        before.same_labeled(&after),
        "unroll must preserve the frame matroid"
    );
    Ok(out)
}

/// Rebuild a biased graph on `new_graph` (same edge ids as `omega`):
/// `special` may answer the bias of single-edge cycles; everything else is
/// translated by edge id, defaulting to unbalanced for cycles that do not
/// correspond to old cycles.
fn rebuild_bias<F>(
    omega: &BiasedGraph,
    new_graph: Multigraph,
    special: F,
) -> Result<BiasedGraph, FrameError>
where
    F: Fn(Mask, Option<usize>) -> Option<bool>,
{
    let mut old_index = Vec::with_capacity(new_graph.edge_count());
    for e in new_graph.edges() {
        old_index.push(omega.graph().edge_index(&e.id).expect("ids preserved"));
    }
    let mut balanced = BTreeSet::new();
    for &c in new_graph.cycles()?.iter() {
        let old_mask: Mask = subset::members(c)
            .map(|i| subset::bit(old_index[i]))
            .fold(0, |a, b| a | b);
        let single = if c.count_ones() == 1 {
            subset::members(c).next()
        } else {
            None
        };
        let flag = match special(old_mask, single) {
            Some(f) => f,
            None => omega.cycle_balanced_mask(old_mask).unwrap_or(false),
        };
        if flag {
            balanced.insert(c);
        }
    }
    Ok(BiasedGraph::explicit_masks(new_graph, &balanced)?)
}

/// Input data for a twisted flip: a hub vertex, edge-disjoint lobes with
/// attachment vertices, a signature, and a lobe-to-signature assignment.
#[derive(Debug, Clone)]
pub struct FlipData {
    pub hub: usize,
    pub core: Mask,
    pub lobes: Vec<Mask>,
    pub attachments: Vec<usize>,
    pub sigma: Vec<Mask>,
    pub assignment: Vec<usize>,
}

impl FlipData {
    fn validate(&self, omega: &BiasedGraph) -> Result<(), FrameError> {
        let g = omega.graph();
        let m = self.lobes.len();
        if self.attachments.len() != m || self.assignment.len() != m {
            return Err(FrameError::FlipConditionViolated {
                condition: 3,
                edge: None,
            });
        }
        // lobes and core must be pairwise edge-disjoint
        let mut seen: Mask = self.core;
        for &l in &self.lobes {
            if l & seen != 0 {
                let i = subset::members(l & seen).next().unwrap();
                return Err(FrameError::FlipConditionViolated {
                    condition: 1,
                    edge: Some(g.edge(i).id.clone()),
                });
            }
            seen |= l;
        }
        // condition 1: leftovers are loops at the hub; no lobe or core edge
        // is a loop at the hub
        for (i, e) in g.edges().iter().enumerate() {
            let in_pieces = subset::contains(seen, i);
            let hub_loop = e.is_loop() && e.u == self.hub;
            if !in_pieces && !hub_loop {
                return Err(FrameError::FlipConditionViolated {
                    condition: 1,
                    edge: Some(e.id.clone()),
                });
            }
            if in_pieces && hub_loop {
                return Err(FrameError::FlipConditionViolated {
                    condition: 1,
                    edge: Some(e.id.clone()),
                });
            }
        }
        // condition 2: core edges avoid the signature
        for &s in &self.sigma {
            if self.core & s != 0 {
                let i = subset::members(self.core & s).next().unwrap();
                return Err(FrameError::FlipConditionViolated {
                    condition: 2,
                    edge: Some(g.edge(i).id.clone()),
                });
            }
        }
        // condition 3: lobes pairwise meet only in {hub, x_i}
        for i in 0..m {
            if self.attachments[i] == self.hub
                || !subset::contains(g.vertices_of(self.lobes[i]), self.attachments[i])
            {
                return Err(FrameError::FlipConditionViolated {
                    condition: 3,
                    edge: None,
                });
            }
            let mut others = self.core;
            for (j, &l) in self.lobes.iter().enumerate() {
                if j != i {
                    others |= l;
                }
            }
            let shared = g.vertices_of(self.lobes[i]) & g.vertices_of(others);
            let allowed = subset::bit(self.hub) | subset::bit(self.attachments[i]);
            if shared & !allowed != 0 {
                return Err(FrameError::FlipConditionViolated {
                    condition: 3,
                    edge: None,
                });
            }
        }
        // condition 4: each lobe's edges appear only in its assigned set
        for i in 0..m {
            if self.assignment[i] >= self.sigma.len() {
                return Err(FrameError::FlipConditionViolated {
                    condition: 4,
                    edge: None,
                });
            }
            for (j, &s) in self.sigma.iter().enumerate() {
                if j != self.assignment[i] && self.lobes[i] & s != 0 {
                    let k = subset::members(self.lobes[i] & s).next().unwrap();
                    return Err(FrameError::FlipConditionViolated {
                        condition: 4,
                        edge: Some(g.edge(k).id.clone()),
                    });
                }
            }
        }
        // condition 5: signature edges inside a lobe are incident with x_i
        for i in 0..m {
            let s = self.sigma[self.assignment[i]];
            for k in subset::members(self.lobes[i] & s) {
                let e = g.edge(k);
                if e.u != self.attachments[i] && e.v != self.attachments[i] {
                    return Err(FrameError::FlipConditionViolated {
                        condition: 5,
                        edge: Some(e.id.clone()),
                    });
                }
            }
        }
        // the signature must reproduce the bias
        for &c in omega.cycles() {
            let parity = self.sigma.iter().all(|&s| (c & s).count_ones() % 2 == 0);
            if parity != omega.cycle_balanced_mask(c).unwrap() {
                return Err(FrameError::FlipConditionViolated {
                    condition: 0,
                    edge: None,
                });
            }
        }
        Ok(())
    }
}

/// Perform a twisted flip. Within each lobe, unmarked hub edges swing to the
/// attachment vertex and enter the signature, while marked attachment edges
/// swing to the hub and leave it. The frame matroid is preserved (checked).
pub fn twisted_flip(omega: &BiasedGraph, data: &FlipData) -> Result<BiasedGraph, FrameError> {
    data.validate(omega)?;
    let g = omega.graph();
    let names = g.vertex_names().to_vec();
    let hub = data.hub;

    let mut new_sigma: Vec<Mask> = data
        .sigma
        .iter()
        .map(|&s| {
            // keep only memberships of edges outside all lobes (hub loops)
            let mut kept = s;
            for &l in &data.lobes {
                kept &= !l;
            }
            kept &= !data.core;
            kept
        })
        .collect();

    let mut endpoints: Vec<(usize, usize)> = g.edges().iter().map(|e| (e.u, e.v)).collect();
    for (i, &lobe) in data.lobes.iter().enumerate() {
        let x = data.attachments[i];
        let s = data.sigma[data.assignment[i]];
        for k in subset::members(lobe) {
            let e = g.edge(k);
            let marked = subset::contains(s, k);
            if !marked && !e.is_loop() && (e.u == hub || e.v == hub) {
                let y = e.other_end(hub);
                endpoints[k] = (y, x);
                new_sigma[data.assignment[i]] |= subset::bit(k);
            } else if marked {
                if (e.u == x && e.v == hub) || (e.v == x && e.u == hub) {
                    // x_i-hub edge in the signature: unchanged, stays marked
                    new_sigma[data.assignment[i]] |= subset::bit(k);
                } else {
                    // y-x_i edge in the signature, y != hub: swing to hub
                    let y = e.other_end(x);
                    endpoints[k] = (y, hub);
                }
            }
        }
    }
    let edges: Vec<(String, String, String)> = g
        .edges()
        .iter()
        .enumerate()
        .map(|(k, e)| {
            (
                e.id.clone(),
                names[endpoints[k].0].clone(),
                names[endpoints[k].1].clone(),
            )
        })
        .collect();
    let new_graph = Multigraph::new(names, edges)?;
    let out = BiasedGraph::signed_masks(new_graph, new_sigma)?;
    let before = frame_matroid(omega)?;
    let after = frame_matroid(&out)?;
    assert!(
        before.same_labeled(&after),
        "twisted flip must preserve the frame matroid"
    );
    Ok(out)
}

fn fresh_ids(taken: &[String], count: usize) -> Vec<String> {
    let mut out = Vec::new();
    let mut k = 1;
    while out.len() < count {
        let cand = format!("p{k}");
        if !taken.contains(&cand) && !out.contains(&cand) {
            out.push(cand);
        }
        k += 1;
    }
    out
}

fn check_disjoint_ids(
    o1: &BiasedGraph,
    skip1: usize,
    o2: &BiasedGraph,
    skip2: usize,
) -> Result<(), FrameError> {
    for (i, e) in o1.graph().edges().iter().enumerate() {
        if i == skip1 {
            continue;
        }
        if let Some(j) = o2.graph().edge_index(&e.id) {
            if j != skip2 {
                return Err(FrameError::GroundOverlap(e.id.clone()));
            }
        }
    }
    Ok(())
}

/// Loop-sum: glue two biased graphs at the endpoints of unbalanced loops
/// `e1`, `e2`, which disappear. Realizes the 2-sum of the frame matroids.
pub fn loop_sum(
    o1: &BiasedGraph,
    e1: &str,
    o2: &BiasedGraph,
    e2: &str,
) -> Result<BiasedGraph, FrameError> {
    let i1 = o1
        .graph()
        .edge_index(e1)
        .ok_or_else(|| FrameError::WrongEdgeKind(e1.to_string()))?;
    let i2 = o2
        .graph()
        .edge_index(e2)
        .ok_or_else(|| FrameError::WrongEdgeKind(e2.to_string()))?;
    for (o, i, id) in [(o1, i1, e1), (o2, i2, e2)] {
        if !o.graph().edge(i).is_loop() || o.cycle_balanced_mask(subset::bit(i)).unwrap() {
            return Err(FrameError::WrongEdgeKind(id.to_string()));
        }
    }
    check_disjoint_ids(o1, i1, o2, i2)?;
    let (v1, v2) = (o1.graph().edge(i1).u, o2.graph().edge(i2).u);

    let name_of = |side: usize, o: &BiasedGraph, v: usize, joined: usize| {
        if v == joined {
            "w".to_string()
        } else {
            format!("{}.{}", if side == 1 { "a" } else { "b" }, o.graph().vertex_name(v))
        }
    };
    let mut names: Vec<String> = Vec::new();
    for v in 0..o1.graph().vertex_count() {
        names.push(name_of(1, o1, v, v1));
    }
    for v in 0..o2.graph().vertex_count() {
        if v != v2 {
            names.push(name_of(2, o2, v, v2));
        }
    }
    let mut edges = Vec::new();
    for (i, e) in o1.graph().edges().iter().enumerate() {
        if i != i1 {
            edges.push((
                e.id.clone(),
                name_of(1, o1, e.u, v1),
                name_of(1, o1, e.v, v1),
            ));
        }
    }
    for (i, e) in o2.graph().edges().iter().enumerate() {
        if i != i2 {
            edges.push((
                e.id.clone(),
                name_of(2, o2, e.u, v2),
                name_of(2, o2, e.v, v2),
            ));
        }
    }
    let g = Multigraph::new(names, edges)?;
    let balanced = translated_balance_union(&g, &[(o1, None), (o2, None)])?;
    let out = BiasedGraph::explicit_masks(g, &balanced)?;
    let expect = Matroid::two_sum(&frame_matroid(o1)?, e1, &frame_matroid(o2)?, e2)?;
    assert!(
        frame_matroid(&out)?.same_labeled(&expect),
        "loop-sum must realize the 2-sum of the frame matroids"
    );
    Ok(out)
}

/// Collect balanced cycles of `g` by translating each cycle back into one
/// of the summands by edge id; cycles that are not a single summand's cycle
/// are left to the caller (returned unbalanced here).
fn translated_balance_union(
    g: &Multigraph,
    sides: &[(&BiasedGraph, Option<Mask>)],
) -> Result<BTreeSet<Mask>, FrameError> {
    let mut balanced = BTreeSet::new();
    for &c in g.cycles()?.iter() {
        for &(o, _) in sides {
            let mut mask: Mask = 0;
            let mut all = true;
            for i in subset::members(c) {
                match o.graph().edge_index(&g.edge(i).id) {
                    Some(j) => mask |= subset::bit(j),
                    None => {
                        all = false;
                        break;
                    }
                }
            }
            if all {
                if o.cycle_balanced_mask(mask) == Ok(true) {
                    balanced.insert(c);
                }
                break;
            }
        }
    }
    Ok(balanced)
}

/// Link-sum: glue a balanced biased graph and another biased graph along
/// the endpoints of links `e1`, `e2`, which disappear. Crossing cycles are
/// balanced when both halves close to balanced cycles.
pub fn link_sum(
    o1: &BiasedGraph,
    e1: &str,
    o2: &BiasedGraph,
    e2: &str,
) -> Result<BiasedGraph, FrameError> {
    if !o1.is_balanced() {
        return Err(FrameError::LinkSumFirstArgUnbalanced);
    }
    let i1 = o1
        .graph()
        .edge_index(e1)
        .ok_or_else(|| FrameError::WrongEdgeKind(e1.to_string()))?;
    let i2 = o2
        .graph()
        .edge_index(e2)
        .ok_or_else(|| FrameError::WrongEdgeKind(e2.to_string()))?;
    if o1.graph().edge(i1).is_loop() {
        return Err(FrameError::WrongEdgeKind(e1.to_string()));
    }
    if o2.graph().edge(i2).is_loop() {
        return Err(FrameError::WrongEdgeKind(e2.to_string()));
    }
    check_disjoint_ids(o1, i1, o2, i2)?;
    let (u1, v1) = (o1.graph().edge(i1).u, o1.graph().edge(i1).v);
    let (u2, v2) = (o2.graph().edge(i2).u, o2.graph().edge(i2).v);

    let name_of = |side: usize, o: &BiasedGraph, v: usize| {
        let (us, vs) = if side == 1 { (u1, v1) } else { (u2, v2) };
        if v == us {
            "x".to_string()
        } else if v == vs {
            "y".to_string()
        } else {
            format!("{}.{}", if side == 1 { "a" } else { "b" }, o.graph().vertex_name(v))
        }
    };
    let mut names: Vec<String> = Vec::new();
    for v in 0..o1.graph().vertex_count() {
        names.push(name_of(1, o1, v));
    }
    for v in 0..o2.graph().vertex_count() {
        if v != u2 && v != v2 {
            names.push(name_of(2, o2, v));
        }
    }
    let mut edges = Vec::new();
    for (i, e) in o1.graph().edges().iter().enumerate() {
        if i != i1 {
            edges.push((e.id.clone(), name_of(1, o1, e.u), name_of(1, o1, e.v)));
        }
    }
    for (i, e) in o2.graph().edges().iter().enumerate() {
        if i != i2 {
            edges.push((e.id.clone(), name_of(2, o2, e.u), name_of(2, o2, e.v)));
        }
    }
    let g = Multigraph::new(names, edges)?;

    let mut balanced = BTreeSet::new();
    for &c in g.cycles()?.iter() {
        let mut m1: Mask = 0;
        let mut m2: Mask = 0;
        for i in subset::members(c) {
            let id = &g.edge(i).id;
            if let Some(j) = o1.graph().edge_index(id) {
                m1 |= subset::bit(j);
            } else {
                m2 |= subset::bit(o2.graph().edge_index(id).unwrap());
            }
        }
        let flag = match (m1 == 0, m2 == 0) {
            (false, true) => o1.cycle_balanced_mask(m1) == Ok(true),
            (true, false) => o2.cycle_balanced_mask(m2) == Ok(true),
            (false, false) => {
                let c1 = m1 | subset::bit(i1);
                let c2 = m2 | subset::bit(i2);
                o1.cycle_balanced_mask(c1) == Ok(true) && o2.cycle_balanced_mask(c2) == Ok(true)
            }
            (true, true) => unreachable!("cycles are nonempty"),
        };
        if flag {
            balanced.insert(c);
        }
    }
    let out = BiasedGraph::explicit_masks(g, &balanced)?;
    let expect = Matroid::two_sum(&frame_matroid(o1)?, e1, &frame_matroid(o2)?, e2)?;
    assert!(
        frame_matroid(&out)?.same_labeled(&expect),
        "link-sum must realize the 2-sum of the frame matroids"
    );
    Ok(out)
}

/// One connected part of one side of a biseparation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BiseparationPart {
    pub edges: Mask,
    pub in_side_a: bool,
    pub balanced: bool,
    pub shared_vertex_count: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BiseparationCase {
    A,
    B,
    C,
    D,
    E,
    Other,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BiseparationType {
    Type1,
    Type2,
    Type3Like,
    Other,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BiseparationReport {
    pub side_a: Mask,
    pub side_b: Mask,
    pub shared_vertices: Mask,
    pub parts: Vec<BiseparationPart>,
    pub case: BiseparationCase,
    pub kind: BiseparationType,
    pub neutral_parts: Vec<Mask>,
}

/// Classify a 2-separation of the frame matroid as seen in the biased graph.
pub fn classify_biseparation(
    omega: &BiasedGraph,
    side_a: Mask,
) -> Result<BiseparationReport, FrameError> {
    let m = frame_matroid(omega)?;
    let full = omega.graph().full_edge_mask();
    if side_a == 0 || side_a == full {
        return Err(FrameError::NotA2Separation);
    }
    let side_b = full & !side_a;
    if side_a.count_ones() < 2
        || side_b.count_ones() < 2
        || m.connectivity_lambda(side_a) != 2
    {
        return Err(FrameError::NotA2Separation);
    }
    let g = omega.graph();
    let shared = g.vertices_of(side_a) & g.vertices_of(side_b);

    let mut parts = Vec::new();
    for (mask, in_a) in [(side_a, true), (side_b, false)] {
        for comp in g.components_of(mask) {
            parts.push(BiseparationPart {
                edges: comp,
                in_side_a: in_a,
                balanced: omega.is_balanced_subset(comp),
                shared_vertex_count: (g.vertices_of(comp) & shared).count_ones() as usize,
            });
        }
    }

    // accounting identity for connected unbalanced host graphs
    if g.is_connected() && !omega.is_balanced() {
        let sum: i64 = parts
            .iter()
            .map(|p| p.shared_vertex_count as i64 - if p.balanced { 2 } else { 0 })
            .sum();
        assert_eq!(sum, 2, "biseparation part accounting must total 2");
    }

    let neutral: Vec<Mask> = parts
        .iter()
        .filter(|p| p.balanced && p.shared_vertex_count == 2)
        .map(|p| p.edges)
        .collect();
    let rest: Vec<&BiseparationPart> = parts
        .iter()
        .filter(|p| !(p.balanced && p.shared_vertex_count == 2))
        .collect();

    let count = |bal: bool, s: usize| {
        rest.iter()
            .filter(|p| p.balanced == bal && p.shared_vertex_count == s)
            .count()
    };
    let case = if rest.len() == 2 && count(false, 1) == 2 {
        BiseparationCase::A
    } else if rest.len() == 1 && count(false, 2) == 1 {
        BiseparationCase::B
    } else if rest.len() == 2 && count(true, 3) == 1 && count(false, 1) == 1 {
        BiseparationCase::C
    } else if rest.len() == 2 && count(true, 3) == 2 {
        BiseparationCase::D
    } else if rest.len() == 1 && count(true, 4) == 1 {
        BiseparationCase::E
    } else {
        BiseparationCase::Other
    };

    let a_connected = g.components_of(side_a).len() == 1;
    let b_connected = g.components_of(side_b).len() == 1;
    let a_balanced = omega.is_balanced_subset(side_a);
    let b_balanced = omega.is_balanced_subset(side_b);
    let kind = if shared.count_ones() == 1 && a_connected && b_connected && !a_balanced && !b_balanced
    {
        BiseparationType::Type1
    } else if shared.count_ones() == 2
        && a_connected
        && b_connected
        && (a_balanced ^ b_balanced)
    {
        BiseparationType::Type2
    } else if shared.count_ones() == 3 {
        BiseparationType::Type3Like
    } else {
        BiseparationType::Other
    };

    Ok(BiseparationReport {
        side_a,
        side_b,
        shared_vertices: shared,
        parts,
        case,
        kind,
        neutral_parts: neutral,
    })
}

/// For a type-1 or type-2 biseparation, produce the two biased summands
/// whose loop- or link-sum reconstructs the graph.
pub fn extract_summands(
    omega: &BiasedGraph,
    side_a: Mask,
) -> Result<(BiasedGraph, String, BiasedGraph, String), FrameError> {
    let report = classify_biseparation(omega, side_a)?;
    let g = omega.graph();
    let ids = fresh_ids(&g.edge_ids(), 2);
    let (p1, p2) = (ids[0].clone(), ids[1].clone());

    let build_side = |side: Mask, extra: &str, extra_ends: (usize, usize), unbalanced_extra: bool, crossing_balance: &dyn Fn(Mask) -> bool| -> Result<BiasedGraph, FrameError> {
        let keep_vertices: Mask =
            g.vertices_of(side) | subset::bit(extra_ends.0) | subset::bit(extra_ends.1);
        let vert_list: Vec<usize> = subset::members(keep_vertices).collect();
        let names: Vec<String> = vert_list
            .iter()
            .map(|&v| g.vertex_name(v).to_string())
            .collect();
        let mut edges = Vec::new();
        for i in subset::members(side) {
            let e = g.edge(i);
            edges.push((
                e.id.clone(),
                g.vertex_name(e.u).to_string(),
                g.vertex_name(e.v).to_string(),
            ));
        }
        edges.push((
            extra.to_string(),
            g.vertex_name(extra_ends.0).to_string(),
            g.vertex_name(extra_ends.1).to_string(),
        ));
        let sub = Multigraph::new(names, edges)?;
        let extra_idx = sub.edge_index(extra).unwrap();
        let mut balanced = BTreeSet::new();
        for &c in sub.cycles()?.iter() {
            let flag = if subset::contains(c, extra_idx) {
                if c.count_ones() == 1 {
                    !unbalanced_extra
                } else {
                    let old: Mask = subset::members(c)
                        .filter(|&i| i != extra_idx)
                        .map(|i| subset::bit(g.edge_index(&sub.edge(i).id).unwrap()))
                        .fold(0, |a, b| a | b);
                    crossing_balance(old)
                }
            } else {
                let old: Mask = subset::members(c)
                    .map(|i| subset::bit(g.edge_index(&sub.edge(i).id).unwrap()))
                    .fold(0, |a, b| a | b);
                omega.cycle_balanced_mask(old) == Ok(true)
            };
            if flag {
                balanced.insert(c);
            }
        }
        Ok(BiasedGraph::explicit_masks(sub, &balanced)?)
    };

    let (o1, o2) = match report.kind {
        BiseparationType::Type1 => {
            let w = subset::members(report.shared_vertices).next().unwrap();
            let o1 = build_side(report.side_a, &p1, (w, w), true, &|_| false)?;
            let o2 = build_side(report.side_b, &p2, (w, w), true, &|_| false)?;
            (o1, o2)
        }
        BiseparationType::Type2 => {
            let mut it = subset::members(report.shared_vertices);
            let x = it.next().unwrap();
            let y = it.next().unwrap();
            let a_balanced = omega.is_balanced_subset(report.side_a);
            let (bal_side, unb_side) = if a_balanced {
                (report.side_a, report.side_b)
            } else {
                (report.side_b, report.side_a)
            };
            // the balanced summand: everything balanced, including cycles
            // through the replacement link
            let o1 = build_side(bal_side, &p1, (x, y), false, &|_| true)?;
            // the unbalanced summand: a crossing cycle closes to balanced
            // iff rerouting through the balanced side gives a balanced cycle
            let paths = connecting_paths_between(g, bal_side, x, y);
            assert!(
                !paths.is_empty(),
                "balanced side of a type-2 biseparation joins the shared vertices"
            );
            let probe = paths[0];
            let crossing = |half: Mask| -> bool {
                let candidate = half | probe;
                omega.cycle_balanced_mask(candidate) == Ok(true)
            };
            if paths.len() > 1 {
                let q2 = paths[1];
                let o2_probe = build_side(unb_side, &p2, (x, y), false, &crossing)?;
                let crossing2 =
                    |half: Mask| -> bool { omega.cycle_balanced_mask(half | q2) == Ok(true) };
                let o2_check = build_side(unb_side, &p2, (x, y), false, &crossing2)?;
                assert_eq!(
                    o2_probe, o2_check,
                    "replacement-link bias must not depend on the rerouting path"
                );
            }
            let o2 = build_side(unb_side, &p2, (x, y), false, &crossing)?;
            (o1, o2)
        }
        _ => return Err(FrameError::NotType1Or2),
    };

    // the summands' frame matroids must 2-sum back to the original
    let expect = Matroid::two_sum(&frame_matroid(&o1)?, &p1, &frame_matroid(&o2)?, &p2)?;
    assert!(
        expect.same_labeled(&frame_matroid(omega)?),
        "extracted summands must recompose to the original frame matroid"
    );
    Ok((o1, p1, o2, p2))
}

/// All x-y paths inside the edge set `within`.
fn connecting_paths_between(g: &Multigraph, within: Mask, x: usize, y: usize) -> Vec<Mask> {
    let mut out = BTreeSet::new();
    fn dfs(
        g: &Multigraph,
        within: Mask,
        cur: usize,
        target: usize,
        used: Mask,
        visited: Mask,
        out: &mut BTreeSet<Mask>,
    ) {
        if cur == target {
            if used != 0 {
                out.insert(used);
            }
            return;
        }
        for i in subset::members(within) {
            let e = g.edge(i);
            if e.is_loop() || subset::contains(used, i) || (e.u != cur && e.v != cur) {
                continue;
            }
            let w = e.other_end(cur);
            if subset::contains(visited, w) {
                continue;
            }
            dfs(
                g,
                within,
                w,
                target,
                used | subset::bit(i),
                visited | subset::bit(w),
                out,
            );
        }
    }
    dfs(g, within, x, y, 0, subset::bit(x), &mut out);
    out.into_iter().collect()
}
