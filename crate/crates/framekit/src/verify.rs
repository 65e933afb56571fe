//! Verification campaigns: excluded-minor checks for matroids and
//! matroidals, enumeration of excluded matroidals by exhaustive search over
//! biased graphs, and the full two-family campaign.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::biased::{BiasedGraph, BiasedGraphDoc};
use crate::graph::Multigraph;
use crate::matroid::{self, Matroid};
use crate::named;
use crate::rep::{self, Cache, RepStatus, SearchLimits};
use crate::subset::{self, Mask};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ClaimStatus {
    Confirmed,
    Refuted,
    Partial,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClaimResult {
    pub claim: String,
    pub status: ClaimStatus,
    pub detail: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<BiasedGraphDoc>,
    pub nodes: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub subject: String,
    pub overall: ClaimStatus,
    pub claims: Vec<ClaimResult>,
    pub runtime_ms: u128,
}

impl VerificationReport {
    pub fn new(subject: String, claims: Vec<ClaimResult>, runtime_ms: u128) -> Self {
        let overall = aggregate(claims.iter().map(|c| c.status));
        VerificationReport {
            subject,
            overall,
            claims,
            runtime_ms,
        }
    }

    /// Byte-stable form: identical inputs and limits yield identical bytes.
    /// Wall-clock runtime and node counters are zeroed; they vary with
    /// machine speed and cache warmth.
    pub fn canonical_json(&self) -> String {
        let mut clone = self.clone();
        clone.runtime_ms = 0;
        for c in &mut clone.claims {
            c.nodes = 0;
        }
        serde_json::to_string_pretty(&clone).expect("reports serialize")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("subject: {}\n", self.subject));
        out.push_str(&format!("overall: {:?}\n", self.overall));
        for c in &self.claims {
            out.push_str(&format!("  [{:?}] {} — {}\n", c.status, c.claim, c.detail));
        }
        out
    }
}

pub fn aggregate<I: IntoIterator<Item = ClaimStatus>>(statuses: I) -> ClaimStatus {
    let mut overall = ClaimStatus::Confirmed;
    for s in statuses {
        match s {
            ClaimStatus::Refuted => return ClaimStatus::Refuted,
            ClaimStatus::Partial => overall = ClaimStatus::Partial,
            ClaimStatus::Confirmed => {}
        }
    }
    overall
}

pub fn exit_code(status: ClaimStatus) -> i32 {
    match status {
        ClaimStatus::Confirmed => 0,
        ClaimStatus::Refuted => 2,
        ClaimStatus::Partial => 3,
    }
}

fn expect_status(
    claim: String,
    verdict: &rep::RepVerdict,
    expect_frame: bool,
) -> ClaimResult {
    let (status, detail) = match (verdict.status, expect_frame) {
        (RepStatus::Frame, true) => (ClaimStatus::Confirmed, "frame, witness recorded".to_string()),
        (RepStatus::NotFrame, false) => {
            (ClaimStatus::Confirmed, "not frame (exhaustive)".to_string())
        }
        (RepStatus::Frame, false) => (ClaimStatus::Refuted, "unexpectedly frame".to_string()),
        (RepStatus::NotFrame, true) => {
            (ClaimStatus::Refuted, "unexpectedly not frame".to_string())
        }
        (RepStatus::Inconclusive, _) => {
            (ClaimStatus::Partial, "budget exhausted".to_string())
        }
    };
    ClaimResult {
        claim,
        status,
        detail,
        witness: verdict.witnesses.first().map(|w| w.to_doc()),
        nodes: verdict.stats.nodes,
    }
}

fn predicate_claim(claim: &str, holds: bool) -> ClaimResult {
    ClaimResult {
        claim: claim.to_string(),
        status: if holds {
            ClaimStatus::Confirmed
        } else {
            ClaimStatus::Refuted
        },
        detail: if holds { "holds" } else { "fails" }.to_string(),
        witness: None,
        nodes: 0,
    }
}

/// Check that `m` is an excluded minor for the class of frame matroids:
/// connected, simple, cosimple, not frame, and every single-element
/// deletion and contraction frame (with witnesses).
pub fn verify_excluded_minor(
    subject: &str,
    m: &Matroid,
    limits: &SearchLimits,
    cache: &Cache,
) -> VerificationReport {
    let start = std::time::Instant::now();
    let mut claims = vec![
        predicate_claim("connected", m.is_connected()),
        predicate_claim("simple", m.is_simple()),
        predicate_claim("cosimple", m.is_cosimple()),
    ];
    let not_frame = rep::is_frame(m, limits, cache);
    claims.push(expect_status("not-frame".to_string(), &not_frame, false));

    let mut items: Vec<(String, Matroid)> = Vec::new();
    for e in 0..m.n() {
        let name = &m.ground()[e];
        items.push((
            format!("minor-frame del:{name}"),
            m.minor(subset::bit(e), 0).expect("deletion is a minor"),
        ));
        items.push((
            format!("minor-frame con:{name}"),
            m.minor(0, subset::bit(e)).expect("contraction is a minor"),
        ));
    }
    let minor_claims = crate::par::map_items(items, limits.parallel, |(claim, minor)| {
        let v = rep::is_frame(&minor, limits, cache);
        expect_status(claim, &v, true)
    });
    claims.extend(minor_claims);
    VerificationReport::new(subject.to_string(), claims, start.elapsed().as_millis())
}

/// Check that the matroidal `(n, l)` is an excluded minor for the class of
/// frame matroidals: not frame, while deleting or contracting any element
/// outside `l` and dropping any element of `l` give frame matroidals.
pub fn verify_excluded_matroidal(
    subject: &str,
    n: &Matroid,
    l: &[String],
    limits: &SearchLimits,
    cache: &Cache,
) -> VerificationReport {
    let start = std::time::Instant::now();
    let l_mask = n
        .mask_of(l.iter().map(|s| s.as_str()))
        .expect("l must be a subset of the ground set");
    let mut claims = Vec::new();
    let not_frame = rep::is_frame_matroidal(n, l_mask, limits, cache);
    claims.push(expect_status(
        "not-frame-matroidal".to_string(),
        &not_frame,
        false,
    ));

    let mut items: Vec<(String, Matroid, Mask)> = Vec::new();
    for e in 0..n.n() {
        let name = n.ground()[e].clone();
        if subset::contains(l_mask, e) {
            items.push((format!("matroidal-minor drop:{name}"), n.clone(), l_mask & !subset::bit(e)));
        } else {
            let del = n.minor(subset::bit(e), 0).expect("deletion is a minor");
            let del_l = translate_mask(n, l_mask, &del);
            items.push((format!("matroidal-minor del:{name}"), del, del_l));
            let con = n.minor(0, subset::bit(e)).expect("contraction is a minor");
            let con_l = translate_mask(n, l_mask, &con);
            items.push((format!("matroidal-minor con:{name}"), con, con_l));
        }
    }
    let minor_claims = crate::par::map_items(items, limits.parallel, |(claim, minor, ml)| {
        let v = rep::is_frame_matroidal(&minor, ml, limits, cache);
        expect_status(claim, &v, true)
    });
    claims.extend(minor_claims);
    VerificationReport::new(subject.to_string(), claims, start.elapsed().as_millis())
}

fn translate_mask(from: &Matroid, mask: Mask, to: &Matroid) -> Mask {
    subset::members(mask)
        .filter_map(|i| to.element_index(&from.ground()[i]))
        .map(subset::bit)
        .fold(0, |a, b| a | b)
}

/// One isomorphism class of excluded matroidals found by enumeration.
#[derive(Debug, Clone)]
pub struct MatroidalClass {
    pub matroid: Matroid,
    pub l: Vec<String>,
}

/// All theta-respecting biases of a multigraph, as sets of balanced cycle
/// masks. Cycles listed in `forced_unbalanced` are never balanced.
pub fn all_biases(g: &Multigraph, forced_unbalanced: &dyn Fn(Mask) -> bool) -> Vec<BTreeSet<Mask>> {
    let cycles = g.cycles().expect("bias enumeration needs small graphs");
    let probe = BiasedGraph::contrabalanced(g.clone()).expect("contrabalanced is valid");
    let triples = probe.theta_triples();
    // triples indexed by their maximal cycle index for incremental checking
    let mut by_max: Vec<Vec<[usize; 3]>> = vec![Vec::new(); cycles.len().max(1)];
    for t in triples {
        by_max[t[2]].push(t);
    }
    let mut out = Vec::new();
    let mut flags: Vec<bool> = Vec::with_capacity(cycles.len());
    fn rec(
        cycles: &[Mask],
        by_max: &[Vec<[usize; 3]>],
        forced: &dyn Fn(Mask) -> bool,
        flags: &mut Vec<bool>,
        out: &mut Vec<BTreeSet<Mask>>,
    ) {
        let k = flags.len();
        if k == cycles.len() {
            out.push(
                cycles
                    .iter()
                    .zip(flags.iter())
                    .filter(|(_, &b)| b)
                    .map(|(&c, _)| c)
                    .collect(),
            );
            return;
        }
        'choice: for value in [false, true] {
            if value && forced(cycles[k]) {
                continue;
            }
            flags.push(value);
            for t in &by_max[k] {
                let count = t.iter().filter(|&&i| flags[i]).count();
                if count == 2 {
                    flags.pop();
                    continue 'choice;
                }
            }
            rec(cycles, by_max, forced, flags, out);
            flags.pop();
        }
    }
    rec(&cycles, &by_max, forced_unbalanced, &mut flags, &mut out);
    out
}

/// Multigraphs on exactly `nv` vertices with `min_e..=max_e` edges,
/// connected, using every vertex, with at most one loop per vertex. Edge
/// ids are `x1..xk`.
fn candidate_multigraphs(nv: usize, min_e: usize, max_e: usize) -> Vec<Multigraph> {
    let pairs: Vec<(usize, usize)> = (0..nv)
        .flat_map(|u| ((u + 1)..nv).map(move |v| (u, v)))
        .collect();
    let slots = pairs.len() + nv; // parallel-class sizes then loop flags
    let mut out = Vec::new();
    let mut counts = vec![0usize; slots];
    fn rec(
        nv: usize,
        pairs: &[(usize, usize)],
        counts: &mut Vec<usize>,
        slot: usize,
        total: usize,
        min_e: usize,
        max_e: usize,
        out: &mut Vec<Multigraph>,
    ) {
        if total > max_e {
            return;
        }
        if slot == counts.len() {
            if total < min_e {
                return;
            }
            let mut edges = Vec::new();
            for (p, &(u, v)) in pairs.iter().enumerate() {
                for _ in 0..counts[p] {
                    edges.push((format!("x{}", edges.len() + 1), u, v));
                }
            }
            for v in 0..nv {
                if counts[pairs.len() + v] > 0 {
                    edges.push((format!("x{}", edges.len() + 1), v, v));
                }
            }
            let g = Multigraph::from_indexed(nv, edges);
            if g.is_connected()
                && (0..nv).all(|v| g.degree_in(g.full_edge_mask(), v) > 0)
            {
                out.push(g);
            }
            return;
        }
        let cap = if slot < pairs.len() { max_e - total } else { 1 };
        for c in 0..=cap {
            counts[slot] = c;
            rec(nv, pairs, counts, slot + 1, total + c, min_e, max_e, out);
        }
        counts[slot] = 0;
    }
    rec(nv, &pairs, &mut counts, 0, 0, min_e, max_e, &mut out);
    out
}

/// Enumerate the frame matroids of the given rank on at most `max_elems`
/// elements (as frame matroids of biased graphs on `rank` vertices, or of
/// graphs on `rank + 1` vertices when `graphic_only`), keep the
/// 3-connected simple ones, and return every `(n, L)` class with `|L| = 2`
/// that is a confirmed excluded matroidal.
pub fn enumerate_excluded_matroidals(
    rank: usize,
    max_elems: usize,
    graphic_only: bool,
    limits: &SearchLimits,
    cache: &Cache,
) -> Vec<MatroidalClass> {
    // candidate 3-connected frame matroids, deduplicated by isomorphism
    let mut candidates: Vec<Matroid> = Vec::new();
    let mut push_candidate = |m: Matroid| {
        if m.rank_full() as usize != rank
            || !m.is_simple()
            || !m.is_k_connected(3)
            || !m.is_connected()
        {
            return;
        }
        if candidates
            .iter()
            .any(|c| matroid::is_isomorphic(c, &m).is_some())
        {
            return;
        }
        candidates.push(m);
    };

    if graphic_only {
        for g in graphs_on(rank + 1, max_elems) {
            if let Ok(m) = Matroid::cycle_matroid(&g) {
                push_candidate(m);
            }
        }
    } else {
        for g in candidate_multigraphs(rank, rank + 1, max_elems) {
            // simplicity of the frame matroid forbids balanced loops and
            // balanced 2-cycles outright
            let forced = |c: Mask| c.count_ones() <= 2;
            for balanced in all_biases(&g, &forced) {
                let omega = BiasedGraph::explicit_masks(g.clone(), &balanced)
                    .expect("enumerated biases satisfy the theta property");
                if let Ok(m) = crate::frame::frame_matroid(&omega) {
                    push_candidate(m);
                }
            }
        }
    }

    // for each candidate, try every 2-element L up to automorphism
    let mut classes: Vec<MatroidalClass> = Vec::new();
    for n in &candidates {
        let autos = matroid::automorphisms(n);
        let mut orbit_reps: Vec<(usize, usize)> = Vec::new();
        let mut seen: BTreeSet<(usize, usize)> = BTreeSet::new();
        for i in 0..n.n() {
            for j in (i + 1)..n.n() {
                if seen.contains(&(i, j)) {
                    continue;
                }
                orbit_reps.push((i, j));
                for a in &autos {
                    let (x, y) = (a[i].min(a[j]), a[i].max(a[j]));
                    seen.insert((x, y));
                }
            }
        }
        let confirmed = crate::par::map_items(orbit_reps, limits.parallel, |(i, j)| {
            let l = vec![n.ground()[i].clone(), n.ground()[j].clone()];
            let report = verify_excluded_matroidal("candidate", n, &l, limits, cache);
            (l, report.overall)
        });
        for (l, overall) in confirmed {
            if overall == ClaimStatus::Confirmed {
                classes.push(MatroidalClass {
                    matroid: n.clone(),
                    l,
                });
            }
        }
    }
    classes
}

/// Simple graphs on exactly `nv` vertices with at most `max_e` edges, all
/// vertices used, connected.
fn graphs_on(nv: usize, max_e: usize) -> Vec<Multigraph> {
    let pairs: Vec<(usize, usize)> = (0..nv)
        .flat_map(|u| ((u + 1)..nv).map(move |v| (u, v)))
        .collect();
    let mut out = Vec::new();
    for mask in 0u64..(1 << pairs.len()) {
        if (mask.count_ones() as usize) > max_e {
            continue;
        }
        let edges: Vec<(String, usize, usize)> = subset::members(mask)
            .enumerate()
            .map(|(k, p)| (format!("x{}", k + 1), pairs[p].0, pairs[p].1))
            .collect();
        let g = Multigraph::from_indexed(nv, edges);
        if g.is_connected() && (0..nv).all(|v| g.degree_in(g.full_edge_mask(), v) > 0) {
            out.push(g);
        }
    }
    out
}

/// The members of the full family: the nine 2-sums of duals, plus the nine
/// compositions of excluded matroidals with `U24`s (the first of which is
/// the 3-circuit member).
pub struct EFamily {
    pub members: Vec<(String, Matroid)>,
    pub matroidals: Vec<(String, MatroidalClass)>,
}

/// Build the family from enumeration output (rank-3 classes and the rank-4
/// graphic class). Classes are ordered deterministically.
pub fn build_e_family(
    rank3: &[MatroidalClass],
    rank4_graphic: &[MatroidalClass],
) -> EFamily {
    let mut members = named::build_e0();
    let mut matroidals: Vec<(String, MatroidalClass)> = Vec::new();

    // the 3-circuit matroidal: a U24 summed on one element, the rest as L
    let u23 = crate::matroid::uniform(2, 3);
    let m0 = named::glue_u24s(&u23, &["e3".to_string()]);
    matroidals.push((
        "M0".to_string(),
        MatroidalClass {
            l: vec!["e1".to_string(), "e2".to_string()],
            matroid: m0,
        },
    ));
    let mut rank3_sorted: Vec<&MatroidalClass> = rank3.iter().collect();
    rank3_sorted.sort_by_key(|c| {
        let mut sizes: Vec<u32> = c.matroid.circuits().iter().map(|x| x.count_ones()).collect();
        sizes.sort_unstable();
        (c.matroid.n(), sizes, c.l.clone())
    });
    for (k, class) in rank3_sorted.iter().enumerate() {
        matroidals.push((format!("M{}", k + 1), (*class).clone()));
    }
    for class in rank4_graphic {
        matroidals.push((format!("M{}", matroidals.len()), class.clone()));
    }

    for (name, class) in &matroidals {
        let member = named::glue_u24s(&class.matroid, &class.l);
        members.push((format!("{name}+L"), member));
    }
    EFamily {
        members,
        matroidals,
    }
}

#[derive(Debug, Serialize)]
pub struct EFamilySummary {
    pub overall: ClaimStatus,
    pub family_claims: Vec<ClaimResult>,
    pub member_reports: Vec<VerificationReport>,
}

impl EFamilySummary {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("summaries serialize")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("overall: {:?}\n", self.overall));
        for c in &self.family_claims {
            out.push_str(&format!("  [{:?}] {} — {}\n", c.status, c.claim, c.detail));
        }
        for r in &self.member_reports {
            out.push_str(&format!(
                "member {}: {:?} ({} claims)\n",
                r.subject,
                r.overall,
                r.claims.len()
            ));
        }
        out
    }
}

/// Verify the full family: pairwise non-isomorphic members, each one a
/// confirmed excluded minor, and the 2-sum/matroidal equivalence on every
/// composed member.
pub fn verify_e_family(
    family: &EFamily,
    limits: &SearchLimits,
    cache: &Cache,
) -> EFamilySummary {
    let mut family_claims = Vec::new();

    family_claims.push(predicate_claim(
        "family has 18 members",
        family.members.len() == 18,
    ));
    let mut distinct = true;
    for i in 0..family.members.len() {
        for j in (i + 1)..family.members.len() {
            if matroid::is_isomorphic(&family.members[i].1, &family.members[j].1).is_some() {
                distinct = false;
            }
        }
    }
    family_claims.push(predicate_claim("members pairwise non-isomorphic", distinct));

    // 2-sum/matroidal equivalence on every composed member
    for (name, class) in &family.matroidals {
        let composed = named::glue_u24s(&class.matroid, &class.l);
        let l_mask = class
            .matroid
            .mask_of(class.l.iter().map(|s| s.as_str()))
            .unwrap();
        let whole = rep::is_frame(&composed, limits, cache);
        let part = rep::is_frame_matroidal(&class.matroid, l_mask, limits, cache);
        let status = match (whole.status, part.status) {
            (RepStatus::Inconclusive, _) | (_, RepStatus::Inconclusive) => ClaimStatus::Partial,
            (a, b) if a == b => ClaimStatus::Confirmed,
            _ => ClaimStatus::Refuted,
        };
        family_claims.push(ClaimResult {
            claim: format!("2-sum/matroidal equivalence for {name}"),
            status,
            detail: format!("composed: {:?}, matroidal: {:?}", whole.status, part.status),
            witness: None,
            nodes: whole.stats.nodes + part.stats.nodes,
        });
    }

    let member_reports: Vec<VerificationReport> = family
        .members
        .iter()
        .map(|(name, m)| verify_excluded_minor(name, m, limits, cache))
        .collect();

    let overall = aggregate(
        family_claims
            .iter()
            .map(|c| c.status)
            .chain(member_reports.iter().map(|r| r.overall)),
    );
    EFamilySummary {
        overall,
        family_claims,
        member_reports,
    }
}
