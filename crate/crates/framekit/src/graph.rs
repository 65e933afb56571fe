//! Multigraphs with loops and parallel edges, plus cycle enumeration.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::subset::{self, Mask};

/// Edge count above which cycle enumeration refuses to run.
pub const MAX_CYCLE_EDGES: usize = 24;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("duplicate edge id {0:?}")]
    DuplicateEdgeId(String),
    #[error("duplicate vertex name {0:?}")]
    DuplicateVertex(String),
    #[error("unknown vertex {0:?}")]
    UnknownVertex(String),
    #[error("unknown edge {0:?}")]
    UnknownEdge(String),
    #[error("size limit exceeded: {what} has {actual}, limit {limit}")]
    SizeLimitExceeded {
        what: &'static str,
        actual: usize,
        limit: usize,
    },
    #[error("malformed edge {0:?}: expected one or two endpoints")]
    MalformedEdge(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeRec {
    pub id: String,
    pub u: usize,
    pub v: usize,
}

impl EdgeRec {
    pub fn is_loop(&self) -> bool {
        self.u == self.v
    }

    pub fn other_end(&self, w: usize) -> usize {
        if w == self.u {
            self.v
        } else {
            self.u
        }
    }
}

/// A finite multigraph. Vertices and edges keep their insertion order;
/// edge index doubles as the ground-set index of the matroids built on top.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Multigraph {
    vertices: Vec<String>,
    edges: Vec<EdgeRec>,
}

impl Multigraph {
    pub fn new<V, E>(vertices: V, edges: E) -> Result<Self, GraphError>
    where
        V: IntoIterator<Item = String>,
        E: IntoIterator<Item = (String, String, String)>,
    {
        let vertices: Vec<String> = vertices.into_iter().collect();
        if vertices.len() > subset::MAX_GROUND {
            return Err(GraphError::SizeLimitExceeded {
                what: "vertices",
                actual: vertices.len(),
                limit: subset::MAX_GROUND,
            });
        }
        let mut seen = BTreeSet::new();
        for v in &vertices {
            if !seen.insert(v.clone()) {
                return Err(GraphError::DuplicateVertex(v.clone()));
            }
        }
        let index: BTreeMap<&str, usize> = vertices
            .iter()
            .enumerate()
            .map(|(i, v)| (v.as_str(), i))
            .collect();
        let mut recs = Vec::new();
        let mut ids = BTreeSet::new();
        for (id, a, b) in edges {
            if !ids.insert(id.clone()) {
                return Err(GraphError::DuplicateEdgeId(id));
            }
            let u = *index
                .get(a.as_str())
                .ok_or_else(|| GraphError::UnknownVertex(a.clone()))?;
            let v = *index
                .get(b.as_str())
                .ok_or_else(|| GraphError::UnknownVertex(b.clone()))?;
            recs.push(EdgeRec { id, u, v });
        }
        if recs.len() > subset::MAX_GROUND {
            return Err(GraphError::SizeLimitExceeded {
                what: "edges",
                actual: recs.len(),
                limit: subset::MAX_GROUND,
            });
        }
        Ok(Multigraph {
            vertices,
            edges: recs,
        })
    }

    /// Build from indexed edge records with generated vertex names `v0..`.
    pub fn from_indexed(n_vertices: usize, edges: Vec<(String, usize, usize)>) -> Self {
        let vertices = (0..n_vertices).map(|i| format!("v{i}")).collect();
        let edges = edges
            .into_iter()
            .map(|(id, u, v)| EdgeRec { id, u, v })
            .collect();
        Multigraph { vertices, edges }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertex_name(&self, i: usize) -> &str {
        &self.vertices[i]
    }

    pub fn vertex_names(&self) -> &[String] {
        &self.vertices
    }

    pub fn vertex_index(&self, name: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v == name)
    }

    pub fn edges(&self) -> &[EdgeRec] {
        &self.edges
    }

    pub fn edge(&self, i: usize) -> &EdgeRec {
        &self.edges[i]
    }

    pub fn edge_index(&self, id: &str) -> Option<usize> {
        self.edges.iter().position(|e| e.id == id)
    }

    pub fn edge_ids(&self) -> Vec<String> {
        self.edges.iter().map(|e| e.id.clone()).collect()
    }

    pub fn full_edge_mask(&self) -> Mask {
        subset::full(self.edges.len())
    }

    /// Links (non-loop edges) incident with `v`, as edge indices.
    pub fn links_at(&self, v: usize) -> Vec<usize> {
        self.edges
            .iter()
            .enumerate()
            .filter(|(_, e)| !e.is_loop() && (e.u == v || e.v == v))
            .map(|(i, _)| i)
            .collect()
    }

    pub fn loops_at(&self, v: usize) -> Vec<usize> {
        self.edges
            .iter()
            .enumerate()
            .filter(|(_, e)| e.is_loop() && e.u == v)
            .map(|(i, _)| i)
            .collect()
    }

    /// Vertex set touched by the edges in `x`, as a vertex mask.
    pub fn vertices_of(&self, x: Mask) -> Mask {
        let mut m = 0;
        for i in subset::members(x) {
            let e = &self.edges[i];
            m |= subset::bit(e.u) | subset::bit(e.v);
        }
        m
    }

    /// Degree of `v` inside the edge set `x`; loops count twice.
    pub fn degree_in(&self, x: Mask, v: usize) -> usize {
        let mut d = 0;
        for i in subset::members(x) {
            let e = &self.edges[i];
            if e.u == v {
                d += 1;
            }
            if e.v == v {
                d += 1;
            }
        }
        d
    }

    /// Connected components of the edge-induced subgraph, as edge masks.
    pub fn components_of(&self, x: Mask) -> Vec<Mask> {
        let mut parent: Vec<usize> = (0..self.vertices.len()).collect();
        fn find(parent: &mut Vec<usize>, mut a: usize) -> usize {
            while parent[a] != a {
                parent[a] = parent[parent[a]];
                a = parent[a];
            }
            a
        }
        for i in subset::members(x) {
            let e = &self.edges[i];
            let (ra, rb) = (find(&mut parent, e.u), find(&mut parent, e.v));
            if ra != rb {
                parent[ra] = rb;
            }
        }
        let mut comps: BTreeMap<usize, Mask> = BTreeMap::new();
        for i in subset::members(x) {
            let r = find(&mut parent, self.edges[i].u);
            *comps.entry(r).or_insert(0) |= subset::bit(i);
        }
        comps.into_values().collect()
    }

    /// Whether the edge-induced subgraph on `x` is connected (vacuously true for empty `x`).
    pub fn is_edge_connected(&self, x: Mask) -> bool {
        self.components_of(x).len() <= 1
    }

    /// Whole-graph connectivity: every vertex in one component, counting isolated vertices.
    pub fn is_connected(&self) -> bool {
        if self.vertices.is_empty() {
            return true;
        }
        let mut seen = vec![false; self.vertices.len()];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for e in &self.edges {
                for w in [e.u, e.v] {
                    let o = e.other_end(w);
                    if w == v && !seen[o] {
                        seen[o] = true;
                        stack.push(o);
                    }
                }
            }
        }
        seen.into_iter().all(|b| b)
    }

    /// All cycles as edge masks, sorted: loops, parallel 2-cycles and longer
    /// cycles alike. Each cycle appears once.
    pub fn cycles(&self) -> Result<Vec<Mask>, GraphError> {
        if self.edges.len() > MAX_CYCLE_EDGES {
            return Err(GraphError::SizeLimitExceeded {
                what: "edges (cycle enumeration)",
                actual: self.edges.len(),
                limit: MAX_CYCLE_EDGES,
            });
        }
        let mut out: BTreeSet<Mask> = BTreeSet::new();
        for (i, e) in self.edges.iter().enumerate() {
            if e.is_loop() {
                out.insert(subset::bit(i));
            }
        }
        // Cycles of length >= 2: grow simple paths from the minimum vertex.
        let n = self.vertices.len();
        let mut incident: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (i, e) in self.edges.iter().enumerate() {
            if !e.is_loop() {
                incident[e.u].push(i);
                incident[e.v].push(i);
            }
        }
        fn dfs(
            g: &Multigraph,
            incident: &[Vec<usize>],
            start: usize,
            cur: usize,
            used: Mask,
            visited: Mask,
            out: &mut BTreeSet<Mask>,
        ) {
            for &ei in &incident[cur] {
                if subset::contains(used, ei) {
                    continue;
                }
                let w = g.edges[ei].other_end(cur);
                if w == start {
                    if used.count_ones() >= 1 {
                        out.insert(used | subset::bit(ei));
                    }
                } else if w > start && !subset::contains(visited, w) {
                    dfs(
                        g,
                        incident,
                        start,
                        w,
                        used | subset::bit(ei),
                        visited | subset::bit(w),
                        out,
                    );
                }
            }
        }
        for s in 0..n {
            dfs(self, &incident, s, s, 0, subset::bit(s), &mut out);
        }
        Ok(out.into_iter().collect())
    }

    /// Blocks (biconnected components) as edge masks; every loop is its own block.
    pub fn blocks(&self) -> Vec<Mask> {
        struct Ctx<'a> {
            g: &'a Multigraph,
            num: Vec<usize>,
            low: Vec<usize>,
            counter: usize,
            stack: Vec<usize>,
            out: Vec<Mask>,
        }
        fn visit(ctx: &mut Ctx, v: usize, parent_edge: Option<usize>) {
            ctx.num[v] = ctx.counter;
            ctx.low[v] = ctx.counter;
            ctx.counter += 1;
            for ei in 0..ctx.g.edges.len() {
                let e = &ctx.g.edges[ei];
                if e.is_loop() || (e.u != v && e.v != v) || Some(ei) == parent_edge {
                    continue;
                }
                let w = e.other_end(v);
                if ctx.num[w] == usize::MAX {
                    ctx.stack.push(ei);
                    visit(ctx, w, Some(ei));
                    ctx.low[v] = ctx.low[v].min(ctx.low[w]);
                    if ctx.low[w] >= ctx.num[v] {
                        let mut blk = 0;
                        while let Some(&top) = ctx.stack.last() {
                            ctx.stack.pop();
                            blk |= subset::bit(top);
                            if top == ei {
                                break;
                            }
                        }
                        ctx.out.push(blk);
                    }
                } else if ctx.num[w] < ctx.num[v] {
                    ctx.stack.push(ei);
                    ctx.low[v] = ctx.low[v].min(ctx.num[w]);
                }
            }
        }
        let mut ctx = Ctx {
            g: self,
            num: vec![usize::MAX; self.vertices.len()],
            low: vec![0; self.vertices.len()],
            counter: 0,
            stack: Vec::new(),
            out: Vec::new(),
        };
        for v in 0..self.vertices.len() {
            if ctx.num[v] == usize::MAX {
                visit(&mut ctx, v, None);
            }
        }
        let mut blocks = ctx.out;
        for (i, e) in self.edges.iter().enumerate() {
            if e.is_loop() {
                blocks.push(subset::bit(i));
            }
        }
        blocks.sort_unstable();
        blocks
    }

    /// Delete the edges in `mask`; vertices are kept.
    pub fn delete_edges(&self, mask: Mask) -> Multigraph {
        let edges = self
            .edges
            .iter()
            .enumerate()
            .filter(|(i, _)| !subset::contains(mask, *i))
            .map(|(_, e)| e.clone())
            .collect();
        Multigraph {
            vertices: self.vertices.clone(),
            edges,
        }
    }

    /// Delete a vertex and all incident edges.
    pub fn delete_vertex(&self, v: usize) -> Multigraph {
        let vertices: Vec<String> = self
            .vertices
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != v)
            .map(|(_, s)| s.clone())
            .collect();
        let remap = |w: usize| if w > v { w - 1 } else { w };
        let edges = self
            .edges
            .iter()
            .filter(|e| e.u != v && e.v != v)
            .map(|e| EdgeRec {
                id: e.id.clone(),
                u: remap(e.u),
                v: remap(e.v),
            })
            .collect();
        Multigraph { vertices, edges }
    }

    /// Contract a link: its endpoints merge into the lower-indexed vertex,
    /// which keeps its name. The contracted edge disappears; parallel edges
    /// become loops. Contracting a loop just deletes it.
    pub fn contract_edge(&self, ei: usize) -> Multigraph {
        let e = &self.edges[ei];
        if e.is_loop() {
            return self.delete_edges(subset::bit(ei));
        }
        let keep = e.u.min(e.v);
        let gone = e.u.max(e.v);
        let vertices: Vec<String> = self
            .vertices
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
        let edges = self
            .edges
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != ei)
            .map(|(_, f)| EdgeRec {
                id: f.id.clone(),
                u: remap(f.u),
                v: remap(f.v),
            })
            .collect();
        Multigraph { vertices, edges }
    }

    /// Canonical traversal of a cycle given by its edge mask: the edge-id
    /// sequence minimal over rotation and reflection.
    pub fn cycle_sequence(&self, cycle: Mask) -> Vec<String> {
        let idxs: Vec<usize> = subset::members(cycle).collect();
        if idxs.len() == 1 {
            return vec![self.edges[idxs[0]].id.clone()];
        }
        // Walk the cycle once to get a cyclic order of edge indices.
        let mut order = Vec::with_capacity(idxs.len());
        let mut used: Mask = 0;
        let first = idxs[0];
        order.push(first);
        used |= subset::bit(first);
        let mut cur = self.edges[first].v;
        while order.len() < idxs.len() {
            let next = idxs
                .iter()
                .find(|&&j| {
                    !subset::contains(used, j)
                        && (self.edges[j].u == cur || self.edges[j].v == cur)
                })
                .copied()
                .expect("edge mask is a cycle");
            cur = self.edges[next].other_end(cur);
            used |= subset::bit(next);
            order.push(next);
        }
        let seqs = rotations_and_reflections(&order);
        let best = seqs
            .into_iter()
            .min_by(|a, b| {
                let sa: Vec<&str> = a.iter().map(|&i| self.edges[i].id.as_str()).collect();
                let sb: Vec<&str> = b.iter().map(|&i| self.edges[i].id.as_str()).collect();
                sa.cmp(&sb)
            })
            .unwrap();
        best.into_iter()
            .map(|i| self.edges[i].id.clone())
            .collect()
    }
}

fn rotations_and_reflections(order: &[usize]) -> Vec<Vec<usize>> {
    let n = order.len();
    let mut out = Vec::with_capacity(2 * n);
    for r in 0..n {
        let rot: Vec<usize> = (0..n).map(|i| order[(i + r) % n]).collect();
        let mut rev = rot.clone();
        rev.reverse();
        out.push(rot);
        out.push(rev);
    }
    out
}

/// On-disk form of a multigraph (also the base of the biased-graph format).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GraphDoc {
    pub vertices: Vec<String>,
    pub edges: Vec<EdgeDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub simple: Option<bool>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EdgeDoc {
    pub id: String,
    pub ends: Vec<String>,
}

impl Multigraph {
    pub fn to_doc(&self) -> GraphDoc {
        GraphDoc {
            vertices: self.vertices.clone(),
            edges: self
                .edges
                .iter()
                .map(|e| EdgeDoc {
                    id: e.id.clone(),
                    ends: if e.is_loop() {
                        vec![self.vertices[e.u].clone()]
                    } else {
                        vec![self.vertices[e.u].clone(), self.vertices[e.v].clone()]
                    },
                })
                .collect(),
            simple: None,
        }
    }

    pub fn from_doc(doc: &GraphDoc) -> Result<Self, GraphError> {
        let edges: Result<Vec<_>, GraphError> = doc
            .edges
            .iter()
            .map(|e| match e.ends.as_slice() {
                [a] => Ok((e.id.clone(), a.clone(), a.clone())),
                [a, b] => Ok((e.id.clone(), a.clone(), b.clone())),
                _ => Err(GraphError::MalformedEdge(e.id.clone())),
            })
            .collect();
        Multigraph::new(doc.vertices.clone(), edges?)
    }
}

/// K4 with vertices `1..4` and edge ids `"12".."34"`, used across unit tests.
#[cfg(test)]
pub(crate) fn k4_test_graph() -> Multigraph {
    let vs: Vec<String> = (1..=4).map(|i| i.to_string()).collect();
    let mut edges = Vec::new();
    for i in 1..=4u8 {
        for j in (i + 1)..=4 {
            edges.push((format!("{i}{j}"), i.to_string(), j.to_string()));
        }
    }
    Multigraph::new(vs, edges).unwrap()
}
