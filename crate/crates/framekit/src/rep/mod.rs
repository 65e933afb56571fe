//! Frame representability: exhaustive L-biased search for small matroids,
//! with a recursive 2-sum decomposition for matroids of connectivity 2 and
//! a persistent verdict cache.

mod cache;
mod search;

pub use cache::{Cache, CachedStatus, CACHE_FORMAT};
pub use search::{reference_search, SearchStats};

use std::time::Duration;

use crate::biased::BiasedGraph;
use crate::frame::{self, frame_matroid, BiseparationType};
use crate::graph::Multigraph;
use crate::matroid::{Matroid, Separation};
use crate::subset::{self, Mask};

/// Budgets for a representability search.
#[derive(Debug, Clone)]
pub struct SearchLimits {
    pub max_vertices: usize,
    pub node_budget: u64,
    pub time_budget: Duration,
    pub parallel: bool,
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits {
            max_vertices: 8,
            node_budget: 100_000_000,
            time_budget: Duration::from_secs(600),
            parallel: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RepStatus {
    /// A representation was found; witnesses are attached.
    Frame,
    /// The search space was exhausted without a representation.
    NotFrame,
    /// A budget was exceeded before the question was settled.
    Inconclusive,
}

#[derive(Debug, Clone)]
pub struct RepVerdict {
    pub status: RepStatus,
    /// Witnesses up to biased-graph isomorphism (for direct enumeration) or
    /// a single composed witness (for the decomposition route).
    pub witnesses: Vec<BiasedGraph>,
    pub stats: SearchStats,
}

impl RepVerdict {
    fn inconclusive(stats: SearchStats) -> RepVerdict {
        RepVerdict {
            status: RepStatus::Inconclusive,
            witnesses: Vec::new(),
            stats,
        }
    }
}

/// Enumerate the L-biased representations of a connected loopless matroid:
/// unbalanced candidates on `rank` vertices and, when `l` is empty,
/// balanced candidates on `rank + 1` vertices. Witnesses are reported up to
/// biased isomorphism; `stats.raw_witnesses` counts labeled placements up
/// to vertex relabeling.
pub fn enumerate_l_biased(m: &Matroid, l: Mask, limits: &SearchLimits) -> RepVerdict {
    let (raw, exhausted, stats) = enumerate_raw(m, l, 0, limits);
    let witnesses = dedupe_classes(raw);
    let status = if !witnesses.is_empty() {
        RepStatus::Frame
    } else if exhausted {
        RepStatus::NotFrame
    } else {
        RepStatus::Inconclusive
    };
    RepVerdict {
        status,
        witnesses,
        stats,
    }
}

fn dedupe_classes(raw: Vec<BiasedGraph>) -> Vec<BiasedGraph> {
    let mut classes: Vec<BiasedGraph> = Vec::new();
    for w in raw {
        if !classes.iter().any(|c| c.isomorphic_to(&w).is_some()) {
            classes.push(w);
        }
    }
    classes
}

fn enumerate_raw(
    m: &Matroid,
    forced_loops: Mask,
    forced_links: Mask,
    limits: &SearchLimits,
) -> (Vec<BiasedGraph>, bool, SearchStats) {
    assert!(m.is_connected(), "enumeration requires a connected matroid");
    assert!(
        m.circuits().iter().all(|c| c.count_ones() > 1),
        "loops must be stripped before enumeration"
    );
    let mut stats = SearchStats::default();
    if m.n() == 0 {
        let empty = BiasedGraph::all_balanced(Multigraph::from_indexed(0, Vec::new())).unwrap();
        return (vec![empty], true, stats);
    }
    let r = m.rank_full() as usize;
    let mut candidates = Vec::new();
    if r >= 1 {
        candidates.push((r, false));
    }
    if forced_loops == 0 {
        candidates.push((r + 1, true));
    }
    let mut exhausted = true;
    let mut raw = Vec::new();
    for (nv, balanced_only) in candidates {
        if nv > limits.max_vertices || nv > 63 {
            exhausted = false;
            continue;
        }
        let spec = search::SearchSpec {
            m,
            nv,
            balanced_only,
            forced_loops,
            forced_links,
        };
        let outcome = search::run(&spec, limits);
        stats.absorb(&outcome.stats);
        exhausted &= outcome.exhausted;
        raw.extend(outcome.witnesses);
    }
    stats.raw_witnesses = raw.len() as u64;
    (raw, exhausted, stats)
}

/// Is the matroid graphic? Searches balanced representations only.
pub fn is_graphic(m: &Matroid, limits: &SearchLimits, cache: &Cache) -> RepVerdict {
    let mut stats = SearchStats::default();
    if m.n() == 0 || m.circuits().is_empty() {
        // free matroids are cycle matroids of trees
        let nv = m.n() + 1;
        let edges = (0..m.n())
            .map(|e| (m.ground()[e].clone(), 0, e + 1))
            .collect();
        let w = BiasedGraph::all_balanced(Multigraph::from_indexed(nv, edges)).unwrap();
        return RepVerdict {
            status: RepStatus::Frame,
            witnesses: vec![w],
            stats,
        };
    }
    if !m.is_connected() {
        // graphic iff every component is graphic; glue trees of components
        let mut parts = Vec::new();
        for comp in m.components() {
            let sub = m.restrict(comp);
            let v = is_graphic(&sub, limits, cache);
            stats.absorb(&v.stats);
            match v.status {
                RepStatus::Frame => parts.push(v.witnesses[0].clone()),
                RepStatus::NotFrame => {
                    return RepVerdict {
                        status: RepStatus::NotFrame,
                        witnesses: Vec::new(),
                        stats,
                    }
                }
                RepStatus::Inconclusive => return RepVerdict::inconclusive(stats),
            }
        }
        let union = disjoint_union(&parts);
        return RepVerdict {
            status: RepStatus::Frame,
            witnesses: vec![union],
            stats,
        };
    }
    if let Some((status, witness)) = cache.lookup("graphic", m, 0) {
        return RepVerdict {
            status: match status {
                CachedStatus::Frame => RepStatus::Frame,
                CachedStatus::NotFrame => RepStatus::NotFrame,
            },
            witnesses: witness.into_iter().collect(),
            stats,
        };
    }
    // graphic matroids are binary: a cheap prefilter when the size allows
    if m.n() <= 14 {
        if let Ok(false) = m.is_binary() {
            cache.store("graphic", m, 0, CachedStatus::NotFrame, None);
            return RepVerdict {
                status: RepStatus::NotFrame,
                witnesses: Vec::new(),
                stats,
            };
        }
    }
    let r = m.rank_full() as usize;
    let nv = r + 1;
    if nv > limits.max_vertices {
        return RepVerdict::inconclusive(stats);
    }
    let spec = search::SearchSpec {
        m,
        nv,
        balanced_only: true,
        forced_loops: 0,
        forced_links: 0,
    };
    let outcome = search::run(&spec, limits);
    stats.absorb(&outcome.stats);
    let witnesses = dedupe_classes(outcome.witnesses);
    let status = if !witnesses.is_empty() {
        cache.store("graphic", m, 0, CachedStatus::Frame, Some(&witnesses[0]));
        RepStatus::Frame
    } else if outcome.exhausted {
        cache.store("graphic", m, 0, CachedStatus::NotFrame, None);
        RepStatus::NotFrame
    } else {
        RepStatus::Inconclusive
    };
    RepVerdict {
        status,
        witnesses,
        stats,
    }
}

/// Decide whether the matroidal `(m, l)` is frame: is there a biased graph
/// representing `m` in which every element of `l` is an unbalanced loop?
///
/// Matroid loops are stripped and re-attached as balanced loops.
/// Disconnected matroids split into components. Connected matroids with a
/// 2-separation decompose: the 2-sum is frame iff both summands are frame
/// with the basepoint forced into L (loop-sum route), or one side has empty
/// L-part and is graphic while the other side's matroidal is frame
/// (link-sum route). Three-connected or inseparable leaves are settled by
/// exhaustive search.
pub fn is_frame_matroidal(m: &Matroid, l: Mask, limits: &SearchLimits, cache: &Cache) -> RepVerdict {
    let mut stats = SearchStats::default();
    // matroid loops: an element of l that is a loop can never be an
    // unbalanced loop (wrong rank); other loops become balanced loops
    let loops: Mask = m
        .circuits()
        .iter()
        .filter(|c| c.count_ones() == 1)
        .fold(0, |a, &b| a | b);
    if loops & l != 0 {
        return RepVerdict {
            status: RepStatus::NotFrame,
            witnesses: Vec::new(),
            stats,
        };
    }
    if loops != 0 {
        let stripped = m.minor(loops, 0).expect("deleting loops is a valid minor");
        let inner_l: Mask = subset::members(l)
            .map(|i| subset::bit(stripped.element_index(&m.ground()[i]).unwrap()))
            .fold(0, |a, b| a | b);
        let mut v = is_frame_matroidal(&stripped, inner_l, limits, cache);
        if v.status == RepStatus::Frame {
            let loop_names: Vec<String> = m.names_of(loops);
            v.witnesses = vec![attach_balanced_loops(&v.witnesses[0], &loop_names)];
        }
        return v;
    }
    let comps = m.components();
    if comps.len() > 1 {
        let mut parts = Vec::new();
        let mut status = RepStatus::Frame;
        for comp in comps {
            let sub = m.restrict(comp);
            let sub_l: Mask = subset::members(l & comp)
                .map(|i| subset::bit(sub.element_index(&m.ground()[i]).unwrap()))
                .fold(0, |a, b| a | b);
            let v = is_frame_matroidal(&sub, sub_l, limits, cache);
            stats.absorb(&v.stats);
            match v.status {
                RepStatus::Frame => parts.push(v.witnesses[0].clone()),
                RepStatus::NotFrame => {
                    return RepVerdict {
                        status: RepStatus::NotFrame,
                        witnesses: Vec::new(),
                        stats,
                    }
                }
                RepStatus::Inconclusive => status = RepStatus::Inconclusive,
            }
        }
        if status == RepStatus::Inconclusive {
            return RepVerdict::inconclusive(stats);
        }
        let union = disjoint_union(&parts);
        return RepVerdict {
            status: RepStatus::Frame,
            witnesses: vec![union],
            stats,
        };
    }

    if let Some((status, witness)) = cache.lookup("frame", m, l) {
        return RepVerdict {
            status: match status {
                CachedStatus::Frame => RepStatus::Frame,
                CachedStatus::NotFrame => RepStatus::NotFrame,
            },
            witnesses: witness.into_iter().collect(),
            stats,
        };
    }

    let seps = m.two_separations();
    let verdict = if seps.is_empty() {
        let (raw, exhausted, search_stats) = enumerate_raw(m, l, 0, limits);
        stats.absorb(&search_stats);
        let witnesses = dedupe_classes(raw);
        let status = if !witnesses.is_empty() {
            RepStatus::Frame
        } else if exhausted {
            RepStatus::NotFrame
        } else {
            RepStatus::Inconclusive
        };
        RepVerdict {
            status,
            witnesses,
            stats: stats.clone(),
        }
    } else {
        let sep = choose_separation(m, &seps);
        decide_by_decomposition(m, l, &sep, limits, cache, &mut stats)
    };

    match verdict.status {
        RepStatus::Frame => cache.store(
            "frame",
            m,
            l,
            CachedStatus::Frame,
            Some(&verdict.witnesses[0]),
        ),
        RepStatus::NotFrame => cache.store("frame", m, l, CachedStatus::NotFrame, None),
        RepStatus::Inconclusive => {}
    }
    verdict
}

/// Is the matroid frame? The matroidal question with empty `l`.
pub fn is_frame(m: &Matroid, limits: &SearchLimits, cache: &Cache) -> RepVerdict {
    is_frame_matroidal(m, 0, limits, cache)
}

/// Prefer separations with a 3-circuit side (these split off uniform
/// summands), then minimal sides, always deterministically.
fn choose_separation(m: &Matroid, seps: &[Separation]) -> Separation {
    let is_triangle_side = |mask: Mask| mask.count_ones() == 3 && m.circuits().contains(&mask);
    let score = |s: &Separation| {
        let tri = is_triangle_side(s.side_a) || is_triangle_side(s.side_b);
        let min_side = s.side_a.count_ones().min(s.side_b.count_ones());
        (!tri, min_side, s.side_a.min(s.side_b))
    };
    *seps
        .iter()
        .min_by_key(|s| score(s))
        .expect("nonempty separation list")
}

fn decide_by_decomposition(
    m: &Matroid,
    l: Mask,
    sep: &Separation,
    limits: &SearchLimits,
    cache: &Cache,
    stats: &mut SearchStats,
) -> RepVerdict {
    let (m1, p1, m2, p2) = m
        .decompose_two_sum(sep)
        .expect("a 2-separation of a connected matroid decomposes");
    let l1 = translate_l(m, l & sep.side_a, &m1);
    let l2 = translate_l(m, l & sep.side_b, &m2);
    let p1_bit = subset::bit(m1.element_index(&p1).unwrap());
    let p2_bit = subset::bit(m2.element_index(&p2).unwrap());

    // loop-sum route: both summands frame with the basepoint as a loop
    let a1 = is_frame_matroidal(&m1, l1 | p1_bit, limits, cache);
    stats.absorb(&a1.stats);
    let a2 = is_frame_matroidal(&m2, l2 | p2_bit, limits, cache);
    stats.absorb(&a2.stats);
    if a1.status == RepStatus::Frame && a2.status == RepStatus::Frame {
        let w = frame::loop_sum(&a1.witnesses[0], &p1, &a2.witnesses[0], &p2)
            .expect("forced-loop witnesses loop-sum cleanly");
        let composed = finish_composed(m, w);
        return RepVerdict {
            status: RepStatus::Frame,
            witnesses: vec![composed],
            stats: stats.clone(),
        };
    }

    // link-sum route, in both orientations
    let mut any_inconclusive =
        a1.status == RepStatus::Inconclusive || a2.status == RepStatus::Inconclusive;
    for (gm, gl, gp, om, ol, op, oa) in [
        (&m1, l1, &p1, &m2, l2, &p2, &a2),
        (&m2, l2, &p2, &m1, l1, &p1, &a1),
    ] {
        if gl != 0 {
            continue;
        }
        let g = is_graphic(gm, limits, cache);
        stats.absorb(&g.stats);
        if g.status == RepStatus::Inconclusive {
            any_inconclusive = true;
            continue;
        }
        if g.status == RepStatus::NotFrame {
            continue;
        }
        // other side: plain frame-matroidal; reuse the loop-forced answer
        let other = if oa.status == RepStatus::Frame {
            oa.clone()
        } else {
            let v = is_frame_matroidal(om, ol, limits, cache);
            stats.absorb(&v.stats);
            v
        };
        match other.status {
            RepStatus::Inconclusive => {
                any_inconclusive = true;
                continue;
            }
            RepStatus::NotFrame => continue,
            RepStatus::Frame => {}
        }
        let ow = &other.witnesses[0];
        let op_idx = ow.graph().edge_index(op).expect("witness carries the basepoint");
        let w = if ow.graph().edge(op_idx).is_loop() {
            // basepoint sits as an unbalanced loop: pinch the graphic side
            // at the basepoint's endpoints and loop-sum
            let h = g.witnesses[0].graph();
            let gp_idx = h.edge_index(gp).unwrap();
            let (u, v) = (h.edge(gp_idx).u, h.edge(gp_idx).v);
            let pinched = frame::pinch(h, u, v).expect("basepoints are links in graphs");
            frame::loop_sum(&pinched, gp, ow, op).expect("pinched basepoint loop-sums")
        } else {
            frame::link_sum(&g.witnesses[0], gp, ow, op).expect("graphic side link-sums")
        };
        let composed = finish_composed(m, w);
        return RepVerdict {
            status: RepStatus::Frame,
            witnesses: vec![composed],
            stats: stats.clone(),
        };
    }

    if any_inconclusive {
        RepVerdict::inconclusive(stats.clone())
    } else {
        RepVerdict {
            status: RepStatus::NotFrame,
            witnesses: Vec::new(),
            stats: stats.clone(),
        }
    }
}

fn translate_l(m: &Matroid, l_part: Mask, summand: &Matroid) -> Mask {
    subset::members(l_part)
        .map(|i| subset::bit(summand.element_index(&m.ground()[i]).unwrap()))
        .fold(0, |a, b| a | b)
}

/// Composed witnesses must represent the original matroid exactly.
fn finish_composed(m: &Matroid, w: BiasedGraph) -> BiasedGraph {
    let f = frame_matroid(&w).expect("composed witnesses are small");
    assert!(
        f.same_labeled(m),
        "composed witness must represent the decomposed matroid"
    );
    w
}

fn attach_balanced_loops(w: &BiasedGraph, loop_names: &[String]) -> BiasedGraph {
    let g = w.graph();
    let mut names = g.vertex_names().to_vec();
    if names.is_empty() {
        names.push("v0".to_string());
    }
    let anchor = names[0].clone();
    let mut edges: Vec<(String, String, String)> = g
        .edges()
        .iter()
        .map(|e| {
            (
                e.id.clone(),
                g.vertex_name(e.u).to_string(),
                g.vertex_name(e.v).to_string(),
            )
        })
        .collect();
    for name in loop_names {
        edges.push((name.clone(), anchor.clone(), anchor.clone()));
    }
    let graph = Multigraph::new(names, edges).expect("loop attachment is well-formed");
    let mut balanced: std::collections::BTreeSet<Mask> = Default::default();
    for c in w.balanced_cycles() {
        // edge indices of original edges are unchanged
        balanced.insert(c);
    }
    for name in loop_names {
        balanced.insert(subset::bit(graph.edge_index(name).unwrap()));
    }
    BiasedGraph::explicit_masks(graph, &balanced).expect("balanced loops keep theta validity")
}

fn disjoint_union(parts: &[BiasedGraph]) -> BiasedGraph {
    let mut names = Vec::new();
    let mut edges = Vec::new();
    for (k, part) in parts.iter().enumerate() {
        let g = part.graph();
        for v in g.vertex_names() {
            names.push(format!("c{k}.{v}"));
        }
        for e in g.edges() {
            edges.push((
                e.id.clone(),
                format!("c{k}.{}", g.vertex_name(e.u)),
                format!("c{k}.{}", g.vertex_name(e.v)),
            ));
        }
    }
    let graph = Multigraph::new(names, edges).expect("disjoint union is well-formed");
    let mut balanced: std::collections::BTreeSet<Mask> = Default::default();
    for part in parts {
        for c in part.balanced_cycles() {
            let translated: Mask = subset::members(c)
                .map(|i| {
                    let id = &part.graph().edge(i).id;
                    subset::bit(graph.edge_index(id).unwrap())
                })
                .fold(0, |a, b| a | b);
            balanced.insert(translated);
        }
    }
    BiasedGraph::explicit_masks(graph, &balanced).expect("disjoint unions keep theta validity")
}

/// Outcome of looking for a representation taming a given 2-separation.
#[derive(Debug)]
pub enum RetameOutcome {
    /// An L-biased representation in which the separation is type 1 or 2.
    Witness(Box<BiasedGraph>),
    /// The search was exhaustive and no such representation exists. A
    /// frame input always admits one, so this outcome is an alarm.
    TheoremViolationAlarm(SearchStats),
    Inconclusive(SearchStats),
}

/// Among all L-biased representations, find one in which the biseparation
/// `(side_a, complement)` is type 1 or type 2.
pub fn retame(m: &Matroid, l: Mask, side_a: Mask, limits: &SearchLimits) -> RetameOutcome {
    let (raw, exhausted, stats) = enumerate_raw(m, l, 0, limits);
    for w in &raw {
        if let Ok(report) = frame::classify_biseparation(w, side_a) {
            if matches!(
                report.kind,
                BiseparationType::Type1 | BiseparationType::Type2
            ) {
                return RetameOutcome::Witness(Box::new(w.clone()));
            }
        }
    }
    if exhausted {
        RetameOutcome::TheoremViolationAlarm(stats)
    } else {
        RetameOutcome::Inconclusive(stats)
    }
}

/// Reference enumeration (no pruning, no symmetry breaking) of the same
/// witness classes; `None` when the unpruned space exceeds the node budget.
pub fn reference_enumerate_l_biased(
    m: &Matroid,
    l: Mask,
    limits: &SearchLimits,
) -> Option<Vec<BiasedGraph>> {
    let r = m.rank_full() as usize;
    let mut raw = Vec::new();
    let mut vertex_counts = vec![r];
    if l == 0 {
        vertex_counts.push(r + 1);
    }
    for nv in vertex_counts {
        if nv == 0 {
            continue;
        }
        raw.extend(reference_search(m, nv, l, limits)?);
    }
    Some(dedupe_classes(raw))
}
