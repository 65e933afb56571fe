//! Exhaustive search for biased-graph representations: every element of the
//! target matroid is placed as a loop or link on a fixed number of vertices,
//! the bias is forced (balanced cycles must be circuits), and candidates are
//! pruned by rank comparisons and accepted only in canonical vertex labeling.

use std::collections::HashSet;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::Arc;
use std::time::Instant;

use crate::biased::{BiasError, BiasedGraph};
use crate::frame::frame_circuits;
use crate::graph::Multigraph;
use crate::matroid::Matroid;
use crate::subset::{self, Mask};

use super::SearchLimits;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Placement {
    Loop(u8),
    Link(u8, u8),
}

pub(crate) struct SearchSpec<'a> {
    pub m: &'a Matroid,
    pub nv: usize,
    /// every cycle must be a circuit (representation must be balanced)
    pub balanced_only: bool,
    pub forced_loops: Mask,
    pub forced_links: Mask,
}

#[derive(Debug, Default, Clone)]
pub struct SearchStats {
    pub nodes: u64,
    pub leaves: u64,
    pub raw_witnesses: u64,
    pub leaf_searches: u64,
}

impl SearchStats {
    pub fn absorb(&mut self, other: &SearchStats) {
        self.nodes += other.nodes;
        self.leaves += other.leaves;
        self.raw_witnesses += other.raw_witnesses;
        self.leaf_searches += other.leaf_searches;
    }
}

pub(crate) struct SearchOutcome {
    pub exhausted: bool,
    pub witnesses: Vec<BiasedGraph>,
    pub stats: SearchStats,
}

struct Ctx<'a> {
    spec: &'a SearchSpec<'a>,
    order: Vec<usize>,
    circuit_set: HashSet<Mask>,
    circuits_with: Vec<Vec<Mask>>,
    nodes: Arc<AtomicU64>,
    blown: Arc<AtomicBool>,
    node_budget: u64,
    deadline: Instant,
    perms: Vec<Vec<u8>>,
}

#[derive(Clone)]
struct State {
    ends: Vec<(u8, u8)>,
    placed: Mask,
    used: usize,
    cycles: Vec<(Mask, bool)>,
}

impl State {
    fn new(n: usize) -> State {
        State {
            ends: vec![(u8::MAX, u8::MAX); n],
            placed: 0,
            used: 0,
            cycles: Vec::new(),
        }
    }
}

fn permutations(n: usize) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    let mut cur: Vec<u8> = (0..n as u8).collect();
    fn heap(k: usize, cur: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
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
    out
}

pub(crate) fn run(spec: &SearchSpec<'_>, limits: &SearchLimits) -> SearchOutcome {
    let n = spec.m.n();
    debug_assert!(n > 0);
    let mut order: Vec<usize> = (0..n).collect();
    let degree = |e: usize| {
        spec.m
            .circuits()
            .iter()
            .filter(|&&c| subset::contains(c, e))
            .count()
    };
    let forced = |e: usize| {
        subset::contains(spec.forced_loops, e) || subset::contains(spec.forced_links, e)
    };
    order.sort_by_key(|&e| (!forced(e), std::cmp::Reverse(degree(e)), e));

    let mut circuits_with = vec![Vec::new(); n];
    for &c in spec.m.circuits() {
        for e in subset::members(c) {
            circuits_with[e].push(c);
        }
    }
    let ctx = Ctx {
        spec,
        order,
        circuit_set: spec.m.circuits().iter().copied().collect(),
        circuits_with,
        nodes: Arc::new(AtomicU64::new(0)),
        blown: Arc::new(AtomicBool::new(false)),
        node_budget: limits.node_budget,
        deadline: Instant::now() + limits.time_budget,
        perms: permutations(spec.nv),
    };

    // split the tree at a shallow depth and process branches independently
    let split_depth = n.min(2);
    let mut prefixes: Vec<Vec<(usize, Placement)>> = Vec::new();
    let mut st = State::new(n);
    collect_prefixes(&ctx, &mut st, 0, split_depth, &mut Vec::new(), &mut prefixes);

    let results = crate::par::map_items(prefixes, limits.parallel, |prefix| {
        let mut st = State::new(n);
        for &(e, pos) in &prefix {
            let placed = try_place(&ctx, &mut st, e, pos);
            debug_assert!(placed.is_some(), "prefixes were reachable when collected");
        }
        let mut local = SearchStats::default();
        let mut found = Vec::new();
        extend(&ctx, &mut st, prefix.len(), &mut found, &mut local);
        (found, local)
    });

    let mut stats = SearchStats::default();
    stats.leaf_searches = 1;
    let mut witnesses = Vec::new();
    for (found, local) in results {
        stats.absorb(&local);
        witnesses.extend(found);
    }
    stats.nodes = ctx.nodes.load(Ordering::Relaxed);
    stats.raw_witnesses = witnesses.len() as u64;
    SearchOutcome {
        exhausted: !ctx.blown.load(Ordering::Relaxed),
        witnesses,
        stats,
    }
}

fn collect_prefixes(
    ctx: &Ctx<'_>,
    st: &mut State,
    depth: usize,
    split_depth: usize,
    cur: &mut Vec<(usize, Placement)>,
    out: &mut Vec<Vec<(usize, Placement)>>,
) {
    if depth == split_depth {
        out.push(cur.clone());
        return;
    }
    let e = ctx.order[depth];
    for pos in positions(ctx, st, e) {
        if let Some(undo) = try_place(ctx, st, e, pos) {
            cur.push((e, pos));
            collect_prefixes(ctx, st, depth + 1, split_depth, cur, out);
            cur.pop();
            unplace(st, e, undo);
        }
    }
}

fn positions(ctx: &Ctx<'_>, st: &State, e: usize) -> Vec<Placement> {
    let nv = ctx.spec.nv;
    let used = st.used;
    let mut out = Vec::new();
    let loops_ok = !subset::contains(ctx.spec.forced_links, e);
    let links_ok = !subset::contains(ctx.spec.forced_loops, e);
    if loops_ok {
        for v in 0..=used.min(nv.saturating_sub(1)) {
            if v < nv {
                out.push(Placement::Loop(v as u8));
            }
        }
    }
    if links_ok {
        for u in 0..used.min(nv) {
            for v in (u + 1)..used.min(nv) {
                out.push(Placement::Link(u as u8, v as u8));
            }
        }
        if used < nv {
            for u in 0..used {
                out.push(Placement::Link(u as u8, used as u8));
            }
            if used + 1 < nv {
                out.push(Placement::Link(used as u8, used as u8 + 1));
            }
        }
    }
    out
}

fn try_place(ctx: &Ctx<'_>, st: &mut State, e: usize, pos: Placement) -> Option<Undo> {
    let (a, b) = match pos {
        Placement::Loop(v) => (v, v),
        Placement::Link(u, v) => (u, v),
    };
    let new_cycles: Vec<(Mask, bool)> = match pos {
        Placement::Loop(_) => {
            let mask = subset::bit(e);
            vec![(mask, ctx.circuit_set.contains(&mask))]
        }
        Placement::Link(u, v) => {
            let mut cycles = Vec::new();
            for path in paths_between(st, u as usize, v as usize) {
                let mask = path | subset::bit(e);
                cycles.push((mask, ctx.circuit_set.contains(&mask)));
            }
            cycles
        }
    };
    if ctx.spec.balanced_only && new_cycles.iter().any(|&(_, bal)| !bal) {
        return None;
    }
    let added_cycles = new_cycles.len();
    st.cycles.extend(new_cycles);
    st.ends[e] = (a, b);
    st.placed |= subset::bit(e);
    let old_used = st.used;
    st.used = st.used.max(a as usize + 1).max(b as usize + 1);

    // prune: circuits of the target fully inside the placement must have
    // frame rank |C| - 1, and the placed prefix must match the target rank
    let mut ok = true;
    for &c in &ctx.circuits_with[e] {
        if subset::is_subset(c, st.placed) && frame_rank(st, c) != c.count_ones() - 1 {
            ok = false;
            break;
        }
    }
    if ok && frame_rank(st, st.placed) != ctx.spec.m.rank(st.placed) {
        ok = false;
    }
    if !ok {
        st.cycles.truncate(st.cycles.len() - added_cycles);
        st.ends[e] = (u8::MAX, u8::MAX);
        st.placed &= !subset::bit(e);
        st.used = old_used;
        return None;
    }
    Some(Undo {
        added_cycles,
        old_used,
    })
}

struct Undo {
    added_cycles: usize,
    old_used: usize,
}

fn unplace(st: &mut State, e: usize, undo: Undo) {
    st.cycles.truncate(st.cycles.len() - undo.added_cycles);
    st.ends[e] = (u8::MAX, u8::MAX);
    st.placed &= !subset::bit(e);
    st.used = undo.old_used;
}

/// Simple paths between two distinct placed vertices, as element masks.
fn paths_between(st: &State, from: usize, to: usize) -> Vec<Mask> {
    let mut out = Vec::new();
    let n = st.ends.len();
    fn dfs(
        st: &State,
        n: usize,
        cur: usize,
        to: usize,
        used: Mask,
        visited: Mask,
        out: &mut Vec<Mask>,
    ) {
        if cur == to {
            out.push(used);
            return;
        }
        for e in 0..n {
            if !subset::contains(st.placed, e) || subset::contains(used, e) {
                continue;
            }
            let (a, b) = st.ends[e];
            if a == b {
                continue; // loops never occur on paths
            }
            let (a, b) = (a as usize, b as usize);
            let next = if a == cur {
                b
            } else if b == cur {
                a
            } else {
                continue;
            };
            if subset::contains(visited, next) {
                continue;
            }
            dfs(
                st,
                n,
                next,
                to,
                used | subset::bit(e),
                visited | subset::bit(next),
                out,
            );
        }
    }
    if from == to {
        return out;
    }
    dfs(st, n, from, to, 0, subset::bit(from), &mut out);
    out
}

/// `|V(sub)| - b(sub)` for a subset of placed elements.
fn frame_rank(st: &State, sub: Mask) -> u32 {
    let mut verts: Mask = 0;
    for e in subset::members(sub) {
        let (a, b) = st.ends[e];
        verts |= subset::bit(a as usize) | subset::bit(b as usize);
    }
    let nvert = verts.count_ones();
    // union-find over the touched vertices
    let mut parent = [0usize; 64];
    for v in subset::members(verts) {
        parent[v] = v;
    }
    fn find(parent: &mut [usize; 64], mut a: usize) -> usize {
        while parent[a] != a {
            parent[a] = parent[parent[a]];
            a = parent[a];
        }
        a
    }
    for e in subset::members(sub) {
        let (a, b) = st.ends[e];
        let (ra, rb) = (find(&mut parent, a as usize), find(&mut parent, b as usize));
        if ra != rb {
            parent[ra] = rb;
        }
    }
    let mut comp_roots: Mask = 0;
    for v in subset::members(verts) {
        comp_roots |= subset::bit(find(&mut parent, v));
    }
    let mut unbalanced_roots: Mask = 0;
    for &(cmask, bal) in &st.cycles {
        if !bal && subset::is_subset(cmask, sub) {
            let e = subset::members(cmask).next().unwrap();
            let root = find(&mut parent, st.ends[e].0 as usize);
            unbalanced_roots |= subset::bit(root);
        }
    }
    let balanced_comps = (comp_roots & !unbalanced_roots).count_ones();
    nvert - balanced_comps
}

fn extend(
    ctx: &Ctx<'_>,
    st: &mut State,
    depth: usize,
    found: &mut Vec<BiasedGraph>,
    stats: &mut SearchStats,
) {
    if ctx.blown.load(Ordering::Relaxed) {
        return;
    }
    let nodes = ctx.nodes.fetch_add(1, Ordering::Relaxed) + 1;
    if nodes > ctx.node_budget || (nodes % 4096 == 0 && Instant::now() > ctx.deadline) {
        ctx.blown.store(true, Ordering::Relaxed);
        return;
    }
    if depth == ctx.order.len() {
        stats.leaves += 1;
        if let Some(w) = leaf_witness(ctx, st) {
            found.push(w);
        }
        return;
    }
    let e = ctx.order[depth];
    for pos in positions(ctx, st, e) {
        if let Some(undo) = try_place(ctx, st, e, pos) {
            extend(ctx, st, depth + 1, found, stats);
            unplace(st, e, undo);
        }
    }
}

fn leaf_witness(ctx: &Ctx<'_>, st: &State) -> Option<BiasedGraph> {
    let nv = ctx.spec.nv;
    if st.used != nv {
        return None;
    }
    // connectivity over all vertices
    {
        let mut parent = [0usize; 64];
        for v in 0..nv {
            parent[v] = v;
        }
        fn find(parent: &mut [usize; 64], mut a: usize) -> usize {
            while parent[a] != a {
                parent[a] = parent[parent[a]];
                a = parent[a];
            }
            a
        }
        for e in subset::members(st.placed) {
            let (a, b) = st.ends[e];
            let (ra, rb) = (find(&mut parent, a as usize), find(&mut parent, b as usize));
            if ra != rb {
                parent[ra] = rb;
            }
        }
        let root = find(&mut parent, 0);
        for v in 1..nv {
            if find(&mut parent, v) != root {
                return None;
            }
        }
    }
    if !is_canonical(ctx, st) {
        return None;
    }
    // build the candidate and make the full comparison
    let n = st.ends.len();
    let edges: Vec<(String, usize, usize)> = (0..n)
        .map(|e| {
            let (a, b) = st.ends[e];
            (
                ctx.spec.m.ground()[e].clone(),
                a as usize,
                b as usize,
            )
        })
        .collect();
    let graph = Multigraph::from_indexed(nv, edges);
    let balanced: std::collections::BTreeSet<Mask> = st
        .cycles
        .iter()
        .filter(|&&(_, bal)| bal)
        .map(|&(c, _)| c)
        .collect();
    let omega = match BiasedGraph::explicit_masks(graph, &balanced) {
        Ok(o) => o,
        Err(BiasError::ThetaViolation(_)) => return None,
        Err(e) => panic!("leaf construction failed unexpectedly: {e}"),
    };
    let circuits = frame_circuits(&omega).ok()?;
    if circuits.as_slice() == ctx.spec.m.circuits() {
        Some(omega)
    } else {
        None
    }
}

/// Accept only the lexicographically minimal placement sequence over all
/// vertex relabelings.
fn is_canonical(ctx: &Ctx<'_>, st: &State) -> bool {
    let seq: Vec<(u8, u8)> = ctx
        .order
        .iter()
        .map(|&e| {
            let (a, b) = st.ends[e];
            (a.min(b), a.max(b))
        })
        .collect();
    for perm in &ctx.perms {
        for (k, &(a, b)) in seq.iter().enumerate() {
            let (pa, pb) = (perm[a as usize], perm[b as usize]);
            let mapped = (pa.min(pb), pa.max(pb));
            match mapped.cmp(&seq[k]) {
                std::cmp::Ordering::Less => return false,
                std::cmp::Ordering::Greater => break,
                std::cmp::Ordering::Equal => {}
            }
        }
    }
    true
}

/// Reference search without symmetry breaking or rank pruning: every
/// placement of every element is tried and the full comparison decides.
/// Exponential; intended for cross-checking the pruned search on tiny
/// instances.
pub fn reference_search(
    m: &Matroid,
    nv: usize,
    forced_loops: Mask,
    limits: &SearchLimits,
) -> Option<Vec<BiasedGraph>> {
    let n = m.n();
    let mut positions: Vec<Placement> = Vec::new();
    for v in 0..nv {
        positions.push(Placement::Loop(v as u8));
    }
    for u in 0..nv {
        for v in (u + 1)..nv {
            positions.push(Placement::Link(u as u8, v as u8));
        }
    }
    let total = (positions.len() as f64).powi(n as i32);
    if total > limits.node_budget as f64 {
        return None;
    }
    let circuit_set: HashSet<Mask> = m.circuits().iter().copied().collect();
    let mut witnesses: Vec<BiasedGraph> = Vec::new();
    let mut ends = vec![(0u8, 0u8); n];
    fn rec(
        m: &Matroid,
        nv: usize,
        positions: &[Placement],
        circuit_set: &HashSet<Mask>,
        forced_loops: Mask,
        ends: &mut Vec<(u8, u8)>,
        depth: usize,
        witnesses: &mut Vec<BiasedGraph>,
    ) {
        if depth == ends.len() {
            let edges: Vec<(String, usize, usize)> = (0..ends.len())
                .map(|e| (m.ground()[e].clone(), ends[e].0 as usize, ends[e].1 as usize))
                .collect();
            let graph = Multigraph::from_indexed(nv, edges);
            if !graph.is_connected() {
                return;
            }
            let cycles = match graph.cycles() {
                Ok(c) => c,
                Err(_) => return,
            };
            let balanced: std::collections::BTreeSet<Mask> = cycles
                .iter()
                .copied()
                .filter(|c| circuit_set.contains(c))
                .collect();
            let omega = match BiasedGraph::explicit_masks(graph, &balanced) {
                Ok(o) => o,
                Err(_) => return,
            };
            if let Ok(circuits) = frame_circuits(&omega) {
                if circuits.as_slice() == m.circuits() {
                    witnesses.push(omega);
                }
            }
            return;
        }
        for &pos in positions {
            if subset::contains(forced_loops, depth) && !matches!(pos, Placement::Loop(_)) {
                continue;
            }
            ends[depth] = match pos {
                Placement::Loop(v) => (v, v),
                Placement::Link(u, v) => (u, v),
            };
            rec(
                m,
                nv,
                positions,
                circuit_set,
                forced_loops,
                ends,
                depth + 1,
                witnesses,
            );
        }
    }
    rec(
        m,
        nv,
        &positions,
        &circuit_set,
        forced_loops,
        &mut ends,
        0,
        &mut witnesses,
    );
    Some(witnesses)
}
