//! Biased graphs: a multigraph plus a theta-respecting set of balanced cycles.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{GraphError, Multigraph};
use crate::matroid::Matroid;
use crate::subset::{self, Mask};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BiasError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("edge set is not a cycle of the graph")]
    NotACycle,
    #[error("edge labels do not match the matroid ground set")]
    LabelMismatch,
    #[error("theta property violated: theta with exactly two balanced cycles")]
    ThetaViolation(ThetaWitness),
    #[error("vertex {0:?} is not balancing")]
    NotBalancing(String),
    #[error("graph is not connected")]
    NotConnected,
    #[error("unknown edge {0:?}")]
    UnknownEdge(String),
    #[error("parse error: {0}")]
    Parse(String),
}

/// A theta subgraph found during validation: its three cycles as edge masks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ThetaWitness {
    pub cycles: [Mask; 3],
    pub balanced_flags: [bool; 3],
}

/// How the bias was specified; `Signature` values are compiled to an
/// explicit balanced set on construction but remembered for serialization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BiasSpec {
    Explicit,
    Signature(Vec<Mask>),
}

/// A multigraph together with its balanced-cycle set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BiasedGraph {
    graph: Multigraph,
    cycles: Vec<Mask>,
    balanced: Vec<bool>,
    spec: BiasSpec,
}

impl BiasedGraph {
    /// Explicit bias from cycle edge masks. Every listed mask must be a
    /// cycle, and the theta property must hold.
    pub fn explicit_masks(graph: Multigraph, balanced: &BTreeSet<Mask>) -> Result<Self, BiasError> {
        let cycles = graph.cycles()?;
        for &b in balanced {
            if cycles.binary_search(&b).is_err() {
                return Err(BiasError::NotACycle);
            }
        }
        let flags: Vec<bool> = cycles.iter().map(|c| balanced.contains(c)).collect();
        let bg = BiasedGraph {
            graph,
            cycles,
            balanced: flags,
            spec: BiasSpec::Explicit,
        };
        if let Some(w) = bg.theta_violation() {
            return Err(BiasError::ThetaViolation(w));
        }
        Ok(bg)
    }

    /// Explicit bias from lists of edge ids.
    pub fn explicit<I, C, S>(graph: Multigraph, balanced: I) -> Result<Self, BiasError>
    where
        I: IntoIterator<Item = C>,
        C: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut masks = BTreeSet::new();
        for cyc in balanced {
            let mut m = 0;
            for id in cyc {
                let i = graph
                    .edge_index(id.as_ref())
                    .ok_or_else(|| BiasError::UnknownEdge(id.as_ref().to_string()))?;
                m |= subset::bit(i);
            }
            masks.insert(m);
        }
        Self::explicit_masks(graph, &masks)
    }

    /// k-signed bias: a cycle is balanced iff it meets every signature set
    /// in an even number of edges. The theta property holds by construction.
    pub fn signed_masks(graph: Multigraph, sigma: Vec<Mask>) -> Result<Self, BiasError> {
        let cycles = graph.cycles()?;
        let balanced = cycles
            .iter()
            .map(|&c| sigma.iter().all(|&s| (c & s).count_ones() % 2 == 0))
            .collect();
        let bg = BiasedGraph {
            graph,
            cycles,
            balanced,
            spec: BiasSpec::Signature(sigma),
        };
        debug_assert!(bg.theta_violation().is_none());
        Ok(bg)
    }

    pub fn signed<I, C, S>(graph: Multigraph, sigma: I) -> Result<Self, BiasError>
    where
        I: IntoIterator<Item = C>,
        C: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut masks = Vec::new();
        for set in sigma {
            let mut m = 0;
            for id in set {
                let i = graph
                    .edge_index(id.as_ref())
                    .ok_or_else(|| BiasError::UnknownEdge(id.as_ref().to_string()))?;
                m |= subset::bit(i);
            }
            masks.push(m);
        }
        Self::signed_masks(graph, masks)
    }

    pub fn all_balanced(graph: Multigraph) -> Result<Self, BiasError> {
        Self::signed_masks(graph, Vec::new())
    }

    pub fn contrabalanced(graph: Multigraph) -> Result<Self, BiasError> {
        Self::explicit_masks(graph, &BTreeSet::new())
    }

    /// The bias induced by a matroid on an edge-labeled graph: balanced
    /// cycles are exactly the cycles whose edge set is a circuit. `None`
    /// when that set violates the theta property.
    pub fn derived(graph: Multigraph, m: &Matroid) -> Result<Option<Self>, BiasError> {
        if graph.edge_count() != m.n() {
            return Err(BiasError::LabelMismatch);
        }
        let mut translate = vec![usize::MAX; graph.edge_count()];
        for (i, e) in graph.edges().iter().enumerate() {
            match m.element_index(&e.id) {
                Some(j) => translate[i] = j,
                None => return Err(BiasError::LabelMismatch),
            }
        }
        let cycles = graph.cycles()?;
        let mut balanced = BTreeSet::new();
        for &c in &cycles {
            let ground_mask: Mask = subset::members(c)
                .map(|i| subset::bit(translate[i]))
                .fold(0, |a, b| a | b);
            if m.circuits().contains(&ground_mask) {
                balanced.insert(c);
            }
        }
        match Self::explicit_masks(graph, &balanced) {
            Ok(bg) => Ok(Some(bg)),
            Err(BiasError::ThetaViolation(_)) => Ok(None),
            Err(e) => Err(e),
        }
    }

    pub fn graph(&self) -> &Multigraph {
        &self.graph
    }

    pub fn spec(&self) -> &BiasSpec {
        &self.spec
    }

    pub fn cycles(&self) -> &[Mask] {
        &self.cycles
    }

    pub fn balanced_cycles(&self) -> impl Iterator<Item = Mask> + '_ {
        self.cycles
            .iter()
            .zip(&self.balanced)
            .filter(|(_, &b)| b)
            .map(|(&c, _)| c)
    }

    pub fn cycle_balanced_mask(&self, cycle: Mask) -> Result<bool, BiasError> {
        match self.cycles.binary_search(&cycle) {
            Ok(i) => Ok(self.balanced[i]),
            Err(_) => Err(BiasError::NotACycle),
        }
    }

    pub fn cycle_balanced<I: IntoIterator<Item = S>, S: AsRef<str>>(
        &self,
        cycle: I,
    ) -> Result<bool, BiasError> {
        let mut mask = 0;
        for id in cycle {
            let i = self
                .graph
                .edge_index(id.as_ref())
                .ok_or_else(|| BiasError::UnknownEdge(id.as_ref().to_string()))?;
            mask |= subset::bit(i);
        }
        self.cycle_balanced_mask(mask)
    }

    /// All theta subgraphs, as sorted triples of cycle indices.
    pub fn theta_triples(&self) -> Vec<[usize; 3]> {
        let mut out = BTreeSet::new();
        for i in 0..self.cycles.len() {
            for j in (i + 1)..self.cycles.len() {
                let (c1, c2) = (self.cycles[i], self.cycles[j]);
                if c1 & c2 == 0 {
                    continue;
                }
                let union = c1 | c2;
                if !self.is_theta_shape(union) {
                    continue;
                }
                let third = c1 ^ c2;
                if let Ok(k) = self.cycles.binary_search(&third) {
                    let mut t = [i, j, k];
                    t.sort_unstable();
                    out.insert(t);
                }
            }
        }
        out.into_iter().collect()
    }

    /// A theta has exactly two vertices of degree 3 and the rest of degree 2.
    fn is_theta_shape(&self, union: Mask) -> bool {
        let mut deg3 = 0;
        for v in subset::members(self.graph.vertices_of(union)) {
            match self.graph.degree_in(union, v) {
                2 => {}
                3 => deg3 += 1,
                _ => return false,
            }
        }
        deg3 == 2
    }

    /// First theta subgraph with exactly two balanced cycles, if any.
    pub fn theta_violation(&self) -> Option<ThetaWitness> {
        for t in self.theta_triples() {
            let flags = [
                self.balanced[t[0]],
                self.balanced[t[1]],
                self.balanced[t[2]],
            ];
            if flags.iter().filter(|&&b| b).count() == 2 {
                return Some(ThetaWitness {
                    cycles: [self.cycles[t[0]], self.cycles[t[1]], self.cycles[t[2]]],
                    balanced_flags: flags,
                });
            }
        }
        None
    }

    /// Number of balanced components of the subgraph induced by `x`.
    pub fn balanced_component_count(&self, x: Mask) -> usize {
        let comps = self.graph.components_of(x);
        let mut unbalanced = vec![false; comps.len()];
        for (i, &c) in self.cycles.iter().enumerate() {
            if !self.balanced[i] && subset::is_subset(c, x) {
                for (k, &comp) in comps.iter().enumerate() {
                    if subset::is_subset(c, comp) {
                        unbalanced[k] = true;
                        break;
                    }
                }
            }
        }
        unbalanced.iter().filter(|&&u| !u).count()
    }

    pub fn is_balanced_subset(&self, x: Mask) -> bool {
        self.cycles
            .iter()
            .zip(&self.balanced)
            .all(|(&c, &b)| b || !subset::is_subset(c, x))
    }

    pub fn is_balanced(&self) -> bool {
        self.balanced.iter().all(|&b| b)
    }

    pub fn is_contrabalanced(&self) -> bool {
        self.balanced.iter().all(|&b| !b)
    }

    /// Graph connectivity order of the partition (x, complement):
    /// the number of shared vertices.
    pub fn lambda(&self, x: Mask) -> usize {
        let full = self.graph.full_edge_mask();
        assert!(x != 0 && x != full, "both sides must be nonempty");
        let y = full & !x;
        (self.graph.vertices_of(x) & self.graph.vertices_of(y)).count_ones() as usize
    }

    /// Vertices whose removal leaves the graph balanced.
    pub fn balancing_vertices(&self) -> Vec<usize> {
        (0..self.graph.vertex_count())
            .filter(|&v| self.is_balancing(v))
            .collect()
    }

    pub fn is_balancing(&self, v: usize) -> bool {
        self.cycles
            .iter()
            .zip(&self.balanced)
            .all(|(&c, &b)| b || subset::contains(self.graph.vertices_of(c), v))
    }

    /// Partition of the links at a balancing vertex into b-classes:
    /// two links are equivalent when a balanced cycle contains both.
    /// Transitivity of the underlying relation is checked.
    pub fn b_classes(&self, v: usize) -> Result<Vec<Mask>, BiasError> {
        if !self.is_balancing(v) {
            return Err(BiasError::NotBalancing(
                self.graph.vertex_name(v).to_string(),
            ));
        }
        let links = self.graph.links_at(v);
        let k = links.len();
        let mut related = vec![vec![false; k]; k];
        for (i, &e) in links.iter().enumerate() {
            related[i][i] = true;
            for (j, &f) in links.iter().enumerate().skip(i + 1) {
                let pair = subset::bit(e) | subset::bit(f);
                let joined = self
                    .cycles
                    .iter()
                    .zip(&self.balanced)
                    .any(|(&c, &b)| b && subset::is_subset(pair, c));
                related[i][j] = joined;
                related[j][i] = joined;
            }
        }
        for a in 0..k {
            for b in 0..k {
                for c in 0..k {
                    assert!(
                        !(related[a][b] && related[b][c]) || related[a][c],
                        "b-class relation must be transitive at a balancing vertex"
                    );
                }
            }
        }
        let mut seen = vec![false; k];
        let mut classes = Vec::new();
        for i in 0..k {
            if seen[i] {
                continue;
            }
            let mut mask = 0;
            for j in 0..k {
                if related[i][j] {
                    seen[j] = true;
                    mask |= subset::bit(links[j]);
                }
            }
            classes.push(mask);
        }
        classes.sort_unstable();
        Ok(classes)
    }

    /// Try to realize the bias as a single signature built from a spanning
    /// tree; an obstruction is a contrabalanced theta.
    pub fn signature_from_tree(&self) -> Result<TreeSignature, BiasError> {
        if !self.graph.is_connected() {
            return Err(BiasError::NotConnected);
        }
        // spanning tree over links
        let n = self.graph.vertex_count();
        let mut in_tree: Mask = 0;
        let mut reach = vec![false; n];
        if n > 0 {
            reach[0] = true;
        }
        let mut grew = true;
        while grew {
            grew = false;
            for (i, e) in self.graph.edges().iter().enumerate() {
                if e.is_loop() {
                    continue;
                }
                if reach[e.u] != reach[e.v] {
                    in_tree |= subset::bit(i);
                    reach[e.u] = true;
                    reach[e.v] = true;
                    grew = true;
                }
            }
        }
        let mut sigma: Mask = 0;
        for (i, _) in self.graph.edges().iter().enumerate() {
            if subset::contains(in_tree, i) {
                continue;
            }
            let fundamental = self.fundamental_cycle(in_tree, i);
            if !self.cycle_balanced_mask(fundamental)? {
                sigma |= subset::bit(i);
            }
        }
        // verify over all cycles
        for (k, &c) in self.cycles.iter().enumerate() {
            let parity_balanced = (c & sigma).count_ones() % 2 == 0;
            if parity_balanced != self.balanced[k] {
                let witness = self
                    .theta_triples()
                    .into_iter()
                    .find(|t| t.iter().all(|&i| !self.balanced[i]))
                    .map(|t| ThetaWitness {
                        cycles: [self.cycles[t[0]], self.cycles[t[1]], self.cycles[t[2]]],
                        balanced_flags: [false; 3],
                    })
                    .expect("a signature mismatch implies a contrabalanced theta");
                return Ok(TreeSignature::Obstructed(witness));
            }
        }
        Ok(TreeSignature::Found(sigma))
    }

    fn fundamental_cycle(&self, tree: Mask, extra: usize) -> Mask {
        let e = self.graph.edge(extra);
        if e.is_loop() {
            return subset::bit(extra);
        }
        let path = self
            .tree_path(tree, e.u, e.v)
            .expect("spanning tree connects all vertices");
        path | subset::bit(extra)
    }

    fn tree_path(&self, tree: Mask, from: usize, to: usize) -> Option<Mask> {
        fn go(
            g: &Multigraph,
            tree: Mask,
            cur: usize,
            to: usize,
            used: Mask,
            visited: Mask,
        ) -> Option<Mask> {
            if cur == to {
                return Some(used);
            }
            for i in subset::members(tree) {
                let e = g.edge(i);
                if subset::contains(used, i) || (e.u != cur && e.v != cur) {
                    continue;
                }
                let w = e.other_end(cur);
                if subset::contains(visited, w) {
                    continue;
                }
                if let Some(p) = go(
                    g,
                    tree,
                    w,
                    to,
                    used | subset::bit(i),
                    visited | subset::bit(w),
                ) {
                    return Some(p);
                }
            }
            None
        }
        go(&self.graph, tree, from, to, 0, subset::bit(from))
    }

    /// Biased minor: delete `delete`, then contract the edges of `contract`
    /// one at a time in ascending ground order.
    pub fn minor(&self, delete: Mask, contract: Mask) -> Result<BiasedGraph, BiasError> {
        assert_eq!(delete & contract, 0, "delete and contract must be disjoint");
        let mut cur = self.delete_edges(delete)?;
        let contract_ids: Vec<String> = subset::members(contract)
            .map(|i| self.graph.edge(i).id.clone())
            .collect();
        for id in contract_ids {
            let idx = cur
                .graph
                .edge_index(&id)
                .ok_or_else(|| BiasError::UnknownEdge(id.clone()))?;
            cur = cur.contract_edge(idx)?;
        }
        Ok(cur)
    }

    pub fn minor_by_names(
        &self,
        delete: &[&str],
        contract: &[&str],
    ) -> Result<BiasedGraph, BiasError> {
        let mut d = 0;
        for id in delete {
            d |= subset::bit(
                self.graph
                    .edge_index(id)
                    .ok_or_else(|| BiasError::UnknownEdge(id.to_string()))?,
            );
        }
        let mut c = 0;
        for id in contract {
            c |= subset::bit(
                self.graph
                    .edge_index(id)
                    .ok_or_else(|| BiasError::UnknownEdge(id.to_string()))?,
            );
        }
        self.minor(d, c)
    }

    pub fn delete_edges(&self, delete: Mask) -> Result<BiasedGraph, BiasError> {
        let g = self.graph.delete_edges(delete);
        let balanced = self.translate_balanced(&g, |old_mask| {
            self.cycles
                .binary_search(&old_mask)
                .ok()
                .map(|k| self.balanced[k])
        })?;
        BiasedGraph::explicit_masks(g, &balanced)
    }

    /// Contract a single edge, by current edge index.
    pub fn contract_edge(&self, ei: usize) -> Result<BiasedGraph, BiasError> {
        let e = self.graph.edge(ei);
        if e.is_loop() {
            let loop_mask = subset::bit(ei);
            if self.cycle_balanced_mask(loop_mask)? {
                // balanced loop: contraction equals deletion
                return self.delete_edges(loop_mask);
            }
            return self.contract_unbalanced_loop(ei);
        }
        let g = self.graph.contract_edge(ei);
        let ebit = subset::bit(ei);
        let balanced = self.translate_balanced(&g, |old_mask| {
            let direct = self
                .cycles
                .binary_search(&old_mask)
                .ok()
                .map(|k| self.balanced[k]);
            let extended = self
                .cycles
                .binary_search(&(old_mask | ebit))
                .ok()
                .map(|k| self.balanced[k]);
            Some(direct.unwrap_or(false) || extended.unwrap_or(false))
        })?;
        BiasedGraph::explicit_masks(g, &balanced)
    }

    fn contract_unbalanced_loop(&self, ei: usize) -> Result<BiasedGraph, BiasError> {
        let u = self.graph.edge(ei).u;
        let names = self.graph.vertex_names().to_vec();
        let mut edges = Vec::new();
        for (i, e) in self.graph.edges().iter().enumerate() {
            if i == ei {
                continue;
            }
            let (a, b) = if !e.is_loop() && (e.u == u || e.v == u) {
                let other = e.other_end(u);
                (other, other) // link at u becomes a loop at the far end
            } else {
                (e.u, e.v)
            };
            edges.push((e.id.clone(), names[a].clone(), names[b].clone()));
        }
        let g = Multigraph::new(names, edges)?;
        let balanced = self.translate_balanced(&g, |old_mask| {
            if old_mask.count_ones() == 1 {
                let i = subset::members(old_mask).next().unwrap();
                let e = self.graph.edge(i);
                if e.is_loop() && e.u == u {
                    return Some(true); // sibling loops become balanced
                }
                if !e.is_loop() && (e.u == u || e.v == u) {
                    return Some(false); // transformed links are unbalanced loops
                }
                return self.cycle_balanced_mask(old_mask).ok();
            }
            self.cycles
                .binary_search(&old_mask)
                .ok()
                .map(|k| self.balanced[k])
        })?;
        BiasedGraph::explicit_masks(g, &balanced)
    }

    /// Compute which cycles of `g` are balanced, mapping each cycle of `g`
    /// to an edge mask of `self` by id and asking `balance_of`.
    fn translate_balanced<F>(
        &self,
        g: &Multigraph,
        balance_of: F,
    ) -> Result<BTreeSet<Mask>, BiasError>
    where
        F: Fn(Mask) -> Option<bool>,
    {
        let mut old_index = Vec::with_capacity(g.edge_count());
        for e in g.edges() {
            old_index.push(
                self.graph
                    .edge_index(&e.id)
                    .ok_or_else(|| BiasError::UnknownEdge(e.id.clone()))?,
            );
        }
        let mut balanced = BTreeSet::new();
        for &c in g.cycles()?.iter() {
            let old_mask: Mask = subset::members(c)
                .map(|i| subset::bit(old_index[i]))
                .fold(0, |a, b| a | b);
            if balance_of(old_mask).unwrap_or(false) {
                balanced.insert(c);
            }
        }
        Ok(balanced)
    }

    /// Graph isomorphism carrying balanced cycles to balanced cycles, as a
    /// (vertex map, edge map) pair of index vectors.
    pub fn isomorphic_to(&self, other: &BiasedGraph) -> Option<(Vec<usize>, Vec<usize>)> {
        iso::biased_isomorphism(self, other)
    }

    pub fn to_doc(&self) -> BiasedGraphDoc {
        let mut doc = BiasedGraphDoc {
            vertices: self.graph.vertex_names().to_vec(),
            edges: self.graph.to_doc().edges,
            balanced_cycles: None,
            signature: None,
        };
        match &self.spec {
            BiasSpec::Signature(sigma) => {
                doc.signature = Some(
                    sigma
                        .iter()
                        .map(|&s| {
                            subset::members(s)
                                .map(|i| self.graph.edge(i).id.clone())
                                .collect()
                        })
                        .collect(),
                );
            }
            BiasSpec::Explicit => {
                let mut cycles: Vec<Vec<String>> = self
                    .balanced_cycles()
                    .map(|c| self.graph.cycle_sequence(c))
                    .collect();
                cycles.sort();
                doc.balanced_cycles = Some(cycles);
            }
        }
        doc
    }

    pub fn from_doc(doc: &BiasedGraphDoc) -> Result<Self, BiasError> {
        let g = Multigraph::from_doc(&crate::graph::GraphDoc {
            vertices: doc.vertices.clone(),
            edges: doc.edges.clone(),
            simple: None,
        })?;
        match (&doc.balanced_cycles, &doc.signature) {
            (Some(cycles), None) => BiasedGraph::explicit(g, cycles.iter().map(|c| c.iter())),
            (None, Some(sigma)) => BiasedGraph::signed(g, sigma.iter().map(|s| s.iter())),
            (None, None) => BiasedGraph::all_balanced(g),
            (Some(_), Some(_)) => Err(BiasError::Parse(
                "document has both balanced_cycles and signature".into(),
            )),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_doc()).expect("biased-graph docs serialize")
    }

    pub fn from_json(text: &str) -> Result<Self, BiasError> {
        let doc: BiasedGraphDoc =
            serde_json::from_str(text).map_err(|e| BiasError::Parse(e.to_string()))?;
        Self::from_doc(&doc)
    }
}

/// Outcome of the spanning-tree signature construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TreeSignature {
    Found(Mask),
    Obstructed(ThetaWitness),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BiasedGraphDoc {
    pub vertices: Vec<String>,
    pub edges: Vec<crate::graph::EdgeDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub balanced_cycles: Option<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub signature: Option<Vec<Vec<String>>>,
}

mod iso {
    use super::BiasedGraph;
    use crate::subset::{self, Mask};

    /// Backtracking biased-graph isomorphism. Vertices are matched by
    /// degree/loop profile, then edges within parallel classes, and every
    /// cycle's bias must be preserved.
    pub fn biased_isomorphism(
        a: &BiasedGraph,
        b: &BiasedGraph,
    ) -> Option<(Vec<usize>, Vec<usize>)> {
        let (ga, gb) = (a.graph(), b.graph());
        if ga.vertex_count() != gb.vertex_count()
            || ga.edge_count() != gb.edge_count()
            || a.cycles().len() != b.cycles().len()
        {
            return None;
        }
        if a.balanced_cycles().count() != b.balanced_cycles().count() {
            return None;
        }
        let nv = ga.vertex_count();
        let mut vmap = vec![usize::MAX; nv];
        let mut used = vec![false; nv];
        backtrack_vertices(a, b, &mut vmap, &mut used, 0)
    }

    fn profile(bg: &BiasedGraph, v: usize) -> (usize, usize) {
        (bg.graph().links_at(v).len(), bg.graph().loops_at(v).len())
    }

    fn backtrack_vertices(
        a: &BiasedGraph,
        b: &BiasedGraph,
        vmap: &mut Vec<usize>,
        used: &mut Vec<bool>,
        depth: usize,
    ) -> Option<(Vec<usize>, Vec<usize>)> {
        let nv = a.graph().vertex_count();
        if depth == nv {
            return match_edges(a, b, vmap);
        }
        for img in 0..nv {
            if used[img] || profile(a, depth) != profile(b, img) {
                continue;
            }
            // multiplicities toward already-mapped vertices must agree
            let ok = (0..depth).all(|w| {
                let cnt = |g: &crate::graph::Multigraph, x: usize, y: usize| {
                    g.edges()
                        .iter()
                        .filter(|e| {
                            !e.is_loop() && ((e.u == x && e.v == y) || (e.v == x && e.u == y))
                        })
                        .count()
                };
                cnt(a.graph(), depth, w) == cnt(b.graph(), img, vmap[w])
            });
            if !ok {
                continue;
            }
            vmap[depth] = img;
            used[img] = true;
            if let Some(res) = backtrack_vertices(a, b, vmap, used, depth + 1) {
                return Some(res);
            }
            vmap[depth] = usize::MAX;
            used[img] = false;
        }
        None
    }

    fn match_edges(
        a: &BiasedGraph,
        b: &BiasedGraph,
        vmap: &[usize],
    ) -> Option<(Vec<usize>, Vec<usize>)> {
        let ne = a.graph().edge_count();
        let mut emap = vec![usize::MAX; ne];
        let mut used = vec![false; ne];
        backtrack_edges(a, b, vmap, &mut emap, &mut used, 0)
    }

    fn backtrack_edges(
        a: &BiasedGraph,
        b: &BiasedGraph,
        vmap: &[usize],
        emap: &mut Vec<usize>,
        used: &mut Vec<bool>,
        depth: usize,
    ) -> Option<(Vec<usize>, Vec<usize>)> {
        let ne = a.graph().edge_count();
        if depth == ne {
            return if bias_preserved(a, b, emap) {
                Some((vmap.to_vec(), emap.clone()))
            } else {
                None
            };
        }
        let ea = a.graph().edge(depth);
        let target = if ea.is_loop() {
            (vmap[ea.u], vmap[ea.u])
        } else {
            let (x, y) = (vmap[ea.u], vmap[ea.v]);
            (x.min(y), x.max(y))
        };
        for img in 0..ne {
            if used[img] {
                continue;
            }
            let eb = b.graph().edge(img);
            let have = if eb.is_loop() {
                (eb.u, eb.u)
            } else {
                (eb.u.min(eb.v), eb.u.max(eb.v))
            };
            if have != target {
                continue;
            }
            emap[depth] = img;
            used[img] = true;
            if let Some(res) = backtrack_edges(a, b, vmap, emap, used, depth + 1) {
                return Some(res);
            }
            emap[depth] = usize::MAX;
            used[img] = false;
        }
        None
    }

    fn bias_preserved(a: &BiasedGraph, b: &BiasedGraph, emap: &[usize]) -> bool {
        for &c in a.cycles().iter() {
            let image: Mask = subset::members(c)
                .map(|e| subset::bit(emap[e]))
                .fold(0, |x, y| x | y);
            match b.cycle_balanced_mask(image) {
                Ok(flag) => {
                    if flag != a.cycle_balanced_mask(c).unwrap() {
                        return false;
                    }
                }
                Err(_) => return false,
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn theta2() -> Multigraph {
        Multigraph::new(
            ["u", "v"].map(String::from),
            [
                ("a".into(), "u".into(), "v".into()),
                ("b".into(), "u".into(), "v".into()),
                ("c".into(), "u".into(), "v".into()),
            ],
        )
        .unwrap()
    }

    fn triangle() -> Multigraph {
        Multigraph::new(
            ["u", "v", "w"].map(String::from),
            [
                ("a".into(), "u".into(), "v".into()),
                ("b".into(), "v".into(), "w".into()),
                ("c".into(), "w".into(), "u".into()),
            ],
        )
        .unwrap()
    }

    #[test]
    fn all_balanced_and_contrabalanced_are_valid() {
        let g = crate::graph::k4_test_graph();
        assert!(BiasedGraph::all_balanced(g.clone()).is_ok());
        assert!(BiasedGraph::contrabalanced(g).is_ok());
    }

    #[test]
    fn two_balanced_in_a_theta_is_rejected() {
        let g = theta2();
        let err = BiasedGraph::explicit(g, [vec!["a", "b"], vec!["a", "c"]]).unwrap_err();
        assert!(matches!(err, BiasError::ThetaViolation(_)));
    }

    #[test]
    fn theta_brute_force_agreement() {
        // Oracle: on the 2-vertex theta every pair of distinct cycles forms
        // the theta, so a bias is valid iff it balances 0, 1, or 3 cycles.
        let g = theta2();
        let cycles = g.cycles().unwrap();
        assert_eq!(cycles.len(), 3);
        for pick in 0..(1u32 << 3) {
            let balanced: BTreeSet<Mask> = cycles
                .iter()
                .enumerate()
                .filter(|(i, _)| pick >> i & 1 == 1)
                .map(|(_, &c)| c)
                .collect();
            let want_valid = pick.count_ones() != 2;
            let got = BiasedGraph::explicit_masks(g.clone(), &balanced);
            assert_eq!(got.is_ok(), want_valid, "pick={pick:03b}");
        }
    }

    #[test]
    fn signature_parity_balance() {
        let g = theta2();
        let all = BiasedGraph::signed(g.clone(), Vec::<Vec<&str>>::new()).unwrap();
        assert!(all.is_balanced());
        let s = BiasedGraph::signed(g, [vec!["a"]]).unwrap();
        assert!(!s.cycle_balanced(["a", "b"]).unwrap());
        assert!(!s.cycle_balanced(["a", "c"]).unwrap());
        assert!(s.cycle_balanced(["b", "c"]).unwrap());
    }

    #[test]
    fn k4_two_balanced_quadrilaterals_is_valid() {
        // the three 4-cycles of K4 pairwise union to all of K4, which is not
        // a theta, so two of them may be balanced while all triangles are
        // unbalanced
        let g = crate::graph::k4_test_graph();
        let cycles = g.cycles().unwrap();
        let quads: Vec<Mask> = cycles
            .iter()
            .copied()
            .filter(|c| c.count_ones() == 4)
            .collect();
        assert_eq!(quads.len(), 3);
        let balanced: BTreeSet<Mask> = quads[..2].iter().copied().collect();
        assert!(BiasedGraph::explicit_masks(g, &balanced).is_ok());
    }

    #[test]
    fn balanced_component_count_cases() {
        let bg = BiasedGraph::all_balanced(triangle()).unwrap();
        assert_eq!(bg.balanced_component_count(0b111), 1);

        let l = Multigraph::new(
            ["u"].map(String::from),
            [("l".into(), "u".into(), "u".into())],
        )
        .unwrap();
        let bl = BiasedGraph::contrabalanced(l).unwrap();
        assert_eq!(bl.balanced_component_count(0b1), 0);

        // disjoint union: balanced triangle + contrabalanced theta -> 1
        let both = Multigraph::new(
            ["u", "v", "w", "x", "y"].map(String::from),
            [
                ("a".into(), "u".into(), "v".into()),
                ("b".into(), "v".into(), "w".into()),
                ("c".into(), "w".into(), "u".into()),
                ("p".into(), "x".into(), "y".into()),
                ("q".into(), "x".into(), "y".into()),
                ("r".into(), "x".into(), "y".into()),
            ],
        )
        .unwrap();
        let bias = BiasedGraph::explicit(both, [vec!["a", "b", "c"]]).unwrap();
        assert_eq!(bias.balanced_component_count(0b111111), 1);
    }

    #[test]
    fn lambda_counts_shared_vertices() {
        let g = Multigraph::new(
            ["a", "b", "c", "d"].map(String::from),
            [
                ("1".into(), "a".into(), "b".into()),
                ("2".into(), "b".into(), "c".into()),
                ("3".into(), "c".into(), "d".into()),
                ("4".into(), "d".into(), "a".into()),
            ],
        )
        .unwrap();
        let bg = BiasedGraph::all_balanced(g).unwrap();
        assert_eq!(bg.lambda(0b0011), 2);
        assert_eq!(bg.lambda(0b0101), 4);
    }

    #[test]
    fn balancing_vertices_and_b_classes() {
        let bg = BiasedGraph::contrabalanced(theta2()).unwrap();
        assert_eq!(bg.balancing_vertices(), vec![0, 1]);
        assert_eq!(bg.b_classes(0).unwrap(), vec![0b001, 0b010, 0b100]);

        let all = BiasedGraph::all_balanced(theta2()).unwrap();
        assert_eq!(all.balancing_vertices(), vec![0, 1]);
        assert_eq!(all.b_classes(0).unwrap(), vec![0b111]);
    }

    #[test]
    fn non_balancing_vertex_rejected() {
        let g = Multigraph::new(
            ["u", "v", "w", "x"].map(String::from),
            [
                ("a".into(), "u".into(), "v".into()),
                ("b".into(), "v".into(), "w".into()),
                ("c".into(), "w".into(), "u".into()),
                ("d".into(), "u".into(), "x".into()),
            ],
        )
        .unwrap();
        let bg = BiasedGraph::contrabalanced(g).unwrap();
        assert!(matches!(bg.b_classes(3), Err(BiasError::NotBalancing(_))));
    }

    #[test]
    fn signature_from_tree_cases() {
        let all = BiasedGraph::all_balanced(crate::graph::k4_test_graph()).unwrap();
        assert_eq!(all.signature_from_tree().unwrap(), TreeSignature::Found(0));

        let contra = BiasedGraph::contrabalanced(theta2()).unwrap();
        assert!(matches!(
            contra.signature_from_tree().unwrap(),
            TreeSignature::Obstructed(_)
        ));

        let g = Multigraph::new(
            ["u", "v"].map(String::from),
            [
                ("a".into(), "u".into(), "v".into()),
                ("b".into(), "u".into(), "v".into()),
            ],
        )
        .unwrap();
        let bg = BiasedGraph::contrabalanced(g).unwrap();
        match bg.signature_from_tree().unwrap() {
            TreeSignature::Found(sigma) => assert_eq!(sigma.count_ones(), 1),
            other => panic!("expected a signature, got {other:?}"),
        }
    }

    #[test]
    fn signature_from_tree_reproduces_bias_on_signed_k4() {
        let g = crate::graph::k4_test_graph();
        for sigma_bits in 0..(1u64 << 6) {
            let bg = BiasedGraph::signed_masks(g.clone(), vec![sigma_bits]).unwrap();
            match bg.signature_from_tree().unwrap() {
                TreeSignature::Found(sigma) => {
                    let again = BiasedGraph::signed_masks(g.clone(), vec![sigma]).unwrap();
                    for &c in bg.cycles() {
                        assert_eq!(
                            again.cycle_balanced_mask(c).unwrap(),
                            bg.cycle_balanced_mask(c).unwrap()
                        );
                    }
                }
                TreeSignature::Obstructed(_) => panic!("signed graphs are never obstructed"),
            }
        }
    }

    #[test]
    fn minor_delete_triangle_edge() {
        let bg = BiasedGraph::all_balanced(triangle()).unwrap();
        let m = bg.minor(0b001, 0).unwrap();
        assert!(m.cycles().is_empty());
    }

    #[test]
    fn contract_balanced_loop_equals_delete() {
        let g = Multigraph::new(
            ["u", "v"].map(String::from),
            [
                ("l".into(), "u".into(), "u".into()),
                ("a".into(), "u".into(), "v".into()),
            ],
        )
        .unwrap();
        let bg = BiasedGraph::explicit(g, [vec!["l"]]).unwrap();
        let contracted = bg.contract_edge(0).unwrap();
        let deleted = bg.delete_edges(0b01).unwrap();
        assert_eq!(contracted, deleted);
    }

    #[test]
    fn contract_unbalanced_loop_transforms_neighbours() {
        let g = Multigraph::new(
            ["u", "v"].map(String::from),
            [
                ("e".into(), "u".into(), "u".into()),
                ("f".into(), "u".into(), "v".into()),
                ("g".into(), "u".into(), "u".into()),
            ],
        )
        .unwrap();
        let bg = BiasedGraph::contrabalanced(g).unwrap();
        let m = bg.contract_edge(0).unwrap();
        let fi = m.graph().edge_index("f").unwrap();
        let gi = m.graph().edge_index("g").unwrap();
        assert!(m.graph().edge(fi).is_loop());
        assert_eq!(m.graph().edge(fi).u, m.graph().vertex_index("v").unwrap());
        assert!(!m.cycle_balanced_mask(subset::bit(fi)).unwrap());
        assert!(m.cycle_balanced_mask(subset::bit(gi)).unwrap());
    }

    #[test]
    fn contract_link_rebalances() {
        let bg = BiasedGraph::all_balanced(triangle()).unwrap();
        let m = bg.contract_edge(0).unwrap();
        assert_eq!(m.cycles().len(), 1);
        assert!(m.cycle_balanced_mask(m.cycles()[0]).unwrap());
    }

    #[test]
    fn biased_iso_distinguishes_bias() {
        let t = theta2();
        let contra = BiasedGraph::contrabalanced(t.clone()).unwrap();
        let relabeled = {
            let g = Multigraph::new(
                ["x", "y"].map(String::from),
                [
                    ("p".into(), "x".into(), "y".into()),
                    ("q".into(), "x".into(), "y".into()),
                    ("r".into(), "x".into(), "y".into()),
                ],
            )
            .unwrap();
            BiasedGraph::contrabalanced(g).unwrap()
        };
        assert!(contra.isomorphic_to(&relabeled).is_some());
        let all = BiasedGraph::all_balanced(t).unwrap();
        assert!(contra.isomorphic_to(&all).is_none());
    }

    #[test]
    fn doc_roundtrip_explicit_and_signature() {
        let bg = BiasedGraph::explicit(theta2(), [vec!["a", "b"]]).unwrap();
        let back = BiasedGraph::from_doc(&bg.to_doc()).unwrap();
        assert_eq!(
            back.balanced_cycles().collect::<Vec<_>>(),
            bg.balanced_cycles().collect::<Vec<_>>()
        );

        let sg = BiasedGraph::signed(theta2(), [vec!["a"]]).unwrap();
        let back = BiasedGraph::from_doc(&sg.to_doc()).unwrap();
        assert_eq!(back, sg);
    }

    #[test]
    fn derived_bias_examples() {
        let t = Multigraph::new(
            ["u", "v", "w"].map(String::from),
            [
                ("e1".into(), "u".into(), "v".into()),
                ("e2".into(), "v".into(), "w".into()),
                ("e3".into(), "w".into(), "u".into()),
            ],
        )
        .unwrap();
        let u23 = crate::matroid::uniform(2, 3);
        let bal = BiasedGraph::derived(t, &u23).unwrap().unwrap();
        assert!(bal.is_balanced());

        let theta = Multigraph::new(
            ["u", "v"].map(String::from),
            [
                ("e1".into(), "u".into(), "v".into()),
                ("e2".into(), "u".into(), "v".into()),
                ("e3".into(), "u".into(), "v".into()),
            ],
        )
        .unwrap();
        let contra = BiasedGraph::derived(theta, &u23).unwrap().unwrap();
        assert!(contra.is_contrabalanced());

        // free matroid on a triangle: bias exists (nothing balanced) but the
        // frame matroid will differ; the caller must still compare
        let t2 = Multigraph::new(
            ["u", "v", "w"].map(String::from),
            [
                ("e1".into(), "u".into(), "v".into()),
                ("e2".into(), "v".into(), "w".into()),
                ("e3".into(), "w".into(), "u".into()),
            ],
        )
        .unwrap();
        let free = crate::matroid::uniform(3, 3);
        let derived = BiasedGraph::derived(t2, &free).unwrap().unwrap();
        assert!(derived.is_contrabalanced());
    }
}
