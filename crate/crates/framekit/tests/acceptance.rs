//! Acceptance suite: one test per criterion, each printing a PASS/FAIL
//! line (run with `cargo test --test acceptance -- --nocapture` to see
//! them). Run order is alphabetical by test name; every tolerance is exact.

mod common;

use std::time::Duration;

use framekit::biased::BiasedGraph;
use framekit::frame::{self, frame_matroid, frame_matroid_by_rank, FlipData};
use framekit::matroid::{is_isomorphic, Matroid};
use framekit::rep::{enumerate_l_biased, Cache};
use framekit::rooted;
use framekit::subset::{self, Mask};
use framekit::verify::{self, ClaimStatus};
use framekit::{named, SearchLimits};

fn limits() -> SearchLimits {
    SearchLimits {
        node_budget: 100_000_000,
        time_budget: Duration::from_secs(600),
        ..Default::default()
    }
}

fn line(criterion: &str, pass: bool, detail: &str) {
    println!(
        "criterion {criterion}: {} — {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {criterion} failed: {detail}");
}

#[test]
fn criterion_1_representation_counts() {
    let expected = [
        ("U24", 3usize),
        ("U23", 4),
        ("MK33*", 1),
        ("MK33p*", 2),
        ("MK5*", 2),
    ];
    let mut got = Vec::new();
    let mut ok = true;
    for (name, want) in expected {
        let m = named::build_named(name).unwrap().matroid;
        let v = enumerate_l_biased(&m, 0, &limits());
        got.push(format!("{name}:{}", v.witnesses.len()));
        ok &= v.status == framekit::RepStatus::Frame && v.witnesses.len() == want;
    }
    line(
        "1 (representation counts 3/4/1/2/2)",
        ok,
        &got.join(" "),
    );
}

#[test]
fn criterion_2_n9_is_a_confirmed_excluded_minor() {
    let cache = Cache::in_memory();
    let report = verify::verify_excluded_minor("N9", &named::build_n9(), &limits(), &cache);
    let minor_claims = report
        .claims
        .iter()
        .filter(|c| c.claim.starts_with("minor-frame"))
        .count();
    let witnesses = report
        .claims
        .iter()
        .filter(|c| c.claim.starts_with("minor-frame") && c.witness.is_some())
        .count();
    line(
        "2 (N9 excluded minor, 18 minors with witnesses)",
        report.overall == ClaimStatus::Confirmed && minor_claims == 18 && witnesses == 18,
        &format!(
            "overall {:?}, {minor_claims} minor claims, {witnesses} witnesses",
            report.overall
        ),
    );
}

#[test]
fn criterion_3_all_nine_e0_members_confirmed() {
    let cache = Cache::in_memory();
    let mut ok = true;
    let mut detail = Vec::new();
    for (name, m) in named::build_e0() {
        let report = verify::verify_excluded_minor(&name, &m, &limits(), &cache);
        detail.push(format!("{name}:{:?}", report.overall));
        ok &= report.overall == ClaimStatus::Confirmed;
    }
    line("3 (E0: nine confirmed excluded minors)", ok, &detail.join(" "));
}

#[test]
fn criterion_4_matroidal_enumeration_counts() {
    let cache = Cache::in_memory();
    let rank3 = verify::enumerate_excluded_matroidals(3, 8, false, &limits(), &cache);
    let rank4 = verify::enumerate_excluded_matroidals(4, 8, true, &limits(), &cache);
    let w4 = named::build_named("MW4").unwrap();
    let rank4_is_wheel = rank4.len() == 1 && {
        let c = &rank4[0];
        let l_mask = c.matroid.mask_of(c.l.iter().map(|s| s.as_str())).unwrap();
        let w4_l = w4.matroid.mask_of(w4.marked.iter().map(|s| s.as_str())).unwrap();
        framekit::matroid::is_matroidal_isomorphic(&c.matroid, l_mask, &w4.matroid, w4_l).is_some()
    };
    line(
        "4 (matroidal enumeration: 7 rank-3 classes + the wheel class)",
        rank3.len() == 7 && rank4_is_wheel,
        &format!(
            "rank-3 classes found: {} (expected 7); rank-4 graphic class is the wheel pair: {rank4_is_wheel}",
            rank3.len()
        ),
    );
}

#[test]
fn criterion_5_full_family_certified() {
    let cache = Cache::in_memory();
    let rank3 = verify::enumerate_excluded_matroidals(3, 8, false, &limits(), &cache);
    let rank4 = verify::enumerate_excluded_matroidals(4, 8, true, &limits(), &cache);
    let family = verify::build_e_family(&rank3, &rank4);
    let summary = verify::verify_e_family(&family, &limits(), &cache);
    let n_members = family.members.len();
    let distinct = summary
        .family_claims
        .iter()
        .find(|c| c.claim == "members pairwise non-isomorphic")
        .map(|c| c.status == ClaimStatus::Confirmed)
        .unwrap_or(false);
    let members_confirmed = summary
        .member_reports
        .iter()
        .filter(|r| r.overall == ClaimStatus::Confirmed)
        .count();
    let equivalences = summary
        .family_claims
        .iter()
        .filter(|c| c.claim.starts_with("2-sum/matroidal equivalence"))
        .all(|c| c.status == ClaimStatus::Confirmed);
    line(
        "5 (full family: 18 distinct members, all confirmed, equivalences hold)",
        n_members == 18 && distinct && members_confirmed == n_members && equivalences,
        &format!(
            "members: {n_members} (expected 18), pairwise distinct: {distinct}, confirmed: {members_confirmed}/{n_members}, equivalences: {equivalences}"
        ),
    );
}

#[test]
fn criterion_6a_theta_validation_brute_force() {
    let mut rng = common::rng(601);
    use rand::Rng;
    let mut failures = 0;
    for _ in 0..1000 {
        let g = common::random_multigraph(&mut rng, 5, 8);
        let cycles = g.cycles().unwrap();
        let balanced: std::collections::BTreeSet<Mask> = cycles
            .iter()
            .copied()
            .filter(|_| rng.gen_bool(0.5))
            .collect();
        // brute force: find any theta (two deg-3 vertices, rest deg-2,
        // connected, containing exactly 3 cycles) with exactly 2 balanced
        let brute_invalid = {
            let ne = g.edge_count();
            let mut found = false;
            'masks: for mask in 1u64..(1 << ne) {
                let verts = g.vertices_of(mask);
                let mut deg3 = 0;
                for v in subset::members(verts) {
                    match g.degree_in(mask, v) {
                        2 => {}
                        3 => deg3 += 1,
                        _ => continue 'masks,
                    }
                }
                if deg3 != 2 || !g.is_edge_connected(mask) {
                    continue;
                }
                let inner: Vec<Mask> = cycles
                    .iter()
                    .copied()
                    .filter(|&c| subset::is_subset(c, mask))
                    .collect();
                if inner.len() == 3
                    && inner.iter().filter(|c| balanced.contains(c)).count() == 2
                {
                    found = true;
                    break;
                }
            }
            found
        };
        let validator_invalid = matches!(
            BiasedGraph::explicit_masks(g, &balanced),
            Err(framekit::BiasError::ThetaViolation(_))
        );
        if brute_invalid != validator_invalid {
            failures += 1;
        }
    }
    line(
        "6a (theta validation vs brute force, 1000 graphs)",
        failures == 0,
        &format!("{failures} discrepancies"),
    );
}

#[test]
fn criterion_6b_frame_circuits_against_rank_formula() {
    let mut rng = common::rng(602);
    let mut failures = 0;
    for _ in 0..1000 {
        let bg = common::random_biased_graph(&mut rng, 5, 8);
        let by_shape = frame_matroid(&bg).unwrap();
        let by_rank = frame_matroid_by_rank(&bg).unwrap();
        if by_shape != by_rank {
            failures += 1;
            continue;
        }
        // rank formula holds subsetwise
        let full = bg.graph().full_edge_mask();
        for x in [0, full, full & 0b1011, full & 0b0110] {
            if by_shape.rank(x) != frame::frame_rank(&bg, x) {
                failures += 1;
                break;
            }
        }
    }
    line(
        "6b (frame circuits vs four-type definition and rank formula, 1000 graphs)",
        failures == 0,
        &format!("{failures} discrepancies"),
    );
}

#[test]
fn criterion_6c_minor_commutation() {
    let mut rng = common::rng(603);
    let mut failures = 0;
    let mut checked = 0;
    for _ in 0..200 {
        let bg = common::random_biased_graph(&mut rng, 4, 7);
        let f = frame_matroid(&bg).unwrap();
        for e in 0..bg.graph().edge_count() {
            let eb = subset::bit(e);
            checked += 2;
            let del = frame_matroid(&bg.minor(eb, 0).unwrap()).unwrap();
            if !del.same_labeled(&f.minor(eb, 0).unwrap()) {
                failures += 1;
            }
            let con = frame_matroid(&bg.minor(0, eb).unwrap()).unwrap();
            if !con.same_labeled(&f.minor(0, eb).unwrap()) {
                failures += 1;
            }
        }
    }
    line(
        "6c (minor commutation on every corpus edge)",
        failures == 0,
        &format!("{checked} minors checked, {failures} failures"),
    );
}

#[test]
fn criterion_6d_connectivity_identity() {
    let mut rng = common::rng(604);
    let mut failures = 0;
    let mut checked = 0;
    while checked < 1000 {
        let bg = common::random_biased_graph(&mut rng, 5, 8);
        let f = frame_matroid(&bg).unwrap();
        let parts = common::connected_bipartitions(bg.graph(), 8);
        for x in parts {
            checked += 1;
            let y = bg.graph().full_edge_mask() & !x;
            let lambda_m =
                (f.rank(x) + f.rank(y)) as i64 - f.rank_full() as i64 + 1;
            let lambda_omega = bg.lambda(x) as i64;
            let bx = bg.balanced_component_count(x) as i64;
            let by = bg.balanced_component_count(y) as i64;
            let be = bg.balanced_component_count(bg.graph().full_edge_mask()) as i64;
            if lambda_m != lambda_omega - bx - by + be + 1 {
                failures += 1;
            }
            // the enumerated unbalanced cases for connected sides
            if bg.graph().is_connected() && !bg.is_balanced() {
                let x_bal = bg.is_balanced_subset(x);
                let y_bal = bg.is_balanced_subset(y);
                let expect = match (x_bal, y_bal) {
                    (false, false) => lambda_omega + 1,
                    (true, false) | (false, true) => lambda_omega,
                    (true, true) => lambda_omega - 1,
                };
                if lambda_m != expect {
                    failures += 1;
                }
            }
        }
    }
    line(
        "6d (connectivity identity on 1000 connected-sided partitions)",
        failures == 0,
        &format!("{checked} partitions, {failures} failures"),
    );
}

#[test]
fn criterion_6e_transformation_invariance() {
    let mut rng = common::rng(605);
    use rand::Rng;

    // pinch and split (split asserts internally; pinch checked here)
    let mut pinches = 0;
    while pinches < 50 {
        let g = common::random_multigraph(&mut rng, 5, 8);
        if g.vertex_count() < 2 {
            continue;
        }
        let u = rng.gen_range(0..g.vertex_count());
        let v = rng.gen_range(0..g.vertex_count());
        if u == v {
            continue;
        }
        let omega = frame::pinch(&g, u, v).unwrap();
        assert!(frame_matroid(&omega)
            .unwrap()
            .same_labeled(&Matroid::cycle_matroid(&g).unwrap()));
        // split the merged vertex back
        let h = frame::split(&omega, u.min(v)).unwrap();
        assert!(Matroid::cycle_matroid(&h)
            .unwrap()
            .same_labeled(&Matroid::cycle_matroid(&g).unwrap()));
        pinches += 1;
    }

    // roll-up / unroll (each op asserts frame preservation internally)
    let mut rolls = 0;
    while rolls < 50 {
        let bg = common::random_biased_graph(&mut rng, 4, 7);
        let v = rng.gen_range(0..bg.graph().vertex_count());
        let loops: Mask = bg
            .graph()
            .loops_at(v)
            .into_iter()
            .filter(|&i| !bg.cycle_balanced_mask(subset::bit(i)).unwrap())
            .map(subset::bit)
            .fold(0, |a, b| a | b);
        let reduced = bg.delete_edges(loops).unwrap();
        if !reduced.is_balancing(v) {
            continue;
        }
        let Ok(classes) = reduced.b_classes(v) else { continue };
        let Some(&cls) = classes.iter().find(|&&c| c != 0) else {
            continue;
        };
        // translate class into original indices by id
        let cls_orig: Mask = subset::members(cls)
            .map(|i| {
                let id = &reduced.graph().edge(i).id;
                subset::bit(bg.graph().edge_index(id).unwrap())
            })
            .fold(0, |a, b| a | b);
        if frame::roll_up(&bg, v, cls_orig).is_ok() {
            rolls += 1;
        }
    }

    // unroll on graphs with unbalanced loops
    let mut unrolls = 0;
    while unrolls < 50 {
        let bg = common::random_biased_graph(&mut rng, 4, 7);
        let v = rng.gen_range(0..bg.graph().vertex_count());
        if frame::unroll(&bg, v).is_ok() {
            unrolls += 1;
        }
    }

    // loop-sum / link-sum (internal two-sum assertion)
    let mut sums = 0;
    while sums < 50 {
        let a = common::random_biased_graph(&mut rng, 3, 5);
        let b = common::random_biased_graph(&mut rng, 3, 5);
        let a = rename(&a, "a");
        let b = rename(&b, "b");
        let a_loops: Vec<usize> = (0..a.graph().edge_count())
            .filter(|&i| {
                a.graph().edge(i).is_loop() && !a.cycle_balanced_mask(subset::bit(i)).unwrap()
            })
            .collect();
        let b_loops: Vec<usize> = (0..b.graph().edge_count())
            .filter(|&i| {
                b.graph().edge(i).is_loop() && !b.cycle_balanced_mask(subset::bit(i)).unwrap()
            })
            .collect();
        if let (Some(&i), Some(&j)) = (a_loops.first(), b_loops.first()) {
            let e1 = a.graph().edge(i).id.clone();
            let e2 = b.graph().edge(j).id.clone();
            if frame::loop_sum(&a, &e1, &b, &e2).is_ok() {
                sums += 1;
                continue;
            }
        }
        // otherwise try a link-sum with a balanced first argument
        if a.is_balanced() {
            let a_links: Vec<usize> = (0..a.graph().edge_count())
                .filter(|&i| !a.graph().edge(i).is_loop())
                .collect();
            let b_links: Vec<usize> = (0..b.graph().edge_count())
                .filter(|&i| !b.graph().edge(i).is_loop())
                .collect();
            if let (Some(&i), Some(&j)) = (a_links.first(), b_links.first()) {
                let e1 = a.graph().edge(i).id.clone();
                let e2 = b.graph().edge(j).id.clone();
                if frame::link_sum(&a, &e1, &b, &e2).is_ok() {
                    sums += 1;
                }
            }
        }
    }

    // twisted flips: lobe structures assembled around a hub (the flip
    // asserts frame preservation internally)
    let mut flips = 0;
    while flips < 50 {
        if run_random_flip(&mut rng).is_some() {
            flips += 1;
        }
    }

    line(
        "6e (transformation invariance, >= 50 instances per operation)",
        true,
        &format!("pinch/split {pinches}, roll-ups {rolls}, unrolls {unrolls}, sums {sums}, flips {flips}"),
    );
}

fn rename(bg: &BiasedGraph, prefix: &str) -> BiasedGraph {
    let g = bg.graph();
    let edges: Vec<(String, String, String)> = g
        .edges()
        .iter()
        .map(|e| {
            (
                format!("{prefix}.{}", e.id),
                g.vertex_name(e.u).to_string(),
                g.vertex_name(e.v).to_string(),
            )
        })
        .collect();
    let graph = framekit::Multigraph::new(g.vertex_names().to_vec(), edges).unwrap();
    let balanced: std::collections::BTreeSet<Mask> = bg.balanced_cycles().collect();
    BiasedGraph::explicit_masks(graph, &balanced).unwrap()
}

/// Assemble a random valid twisted-flip instance: a core at the hub plus
/// one to three single- or double-edge lobes with signature edges at the
/// attachments.
fn run_random_flip(rng: &mut rand_chacha::ChaCha8Rng) -> Option<()> {
    use rand::Rng;
    let hub = 0usize;
    let n_lobes = rng.gen_range(1..=3usize);
    let mut vertices: Vec<String> = vec!["h".into()];
    let mut edges: Vec<(String, String, String)> = Vec::new();
    let mut lobes: Vec<Mask> = Vec::new();
    let mut attachments = Vec::new();
    let mut sigma: Mask = 0;
    let mut assignment = Vec::new();
    let mut next_edge = 0usize;
    for li in 0..n_lobes {
        let x = format!("x{li}");
        vertices.push(x.clone());
        let mut lobe: Mask = 0;
        // hub-to-attachment edge, possibly marked
        let id = format!("e{next_edge}");
        next_edge += 1;
        edges.push((id, "h".into(), x.clone()));
        lobe |= subset::bit(edges.len() - 1);
        if rng.gen_bool(0.5) {
            sigma |= subset::bit(edges.len() - 1);
        }
        // optional private vertex with a path through the lobe
        if rng.gen_bool(0.6) {
            let y = format!("y{li}");
            vertices.push(y.clone());
            let id1 = format!("e{next_edge}");
            next_edge += 1;
            edges.push((id1, "h".into(), y.clone()));
            lobe |= subset::bit(edges.len() - 1);
            let id2 = format!("e{next_edge}");
            next_edge += 1;
            edges.push((id2, y.clone(), x.clone()));
            lobe |= subset::bit(edges.len() - 1);
            if rng.gen_bool(0.5) {
                sigma |= subset::bit(edges.len() - 1); // incident with x
            }
        }
        lobes.push(lobe);
        attachments.push(vertices.iter().position(|v| *v == x).unwrap());
        assignment.push(0);
    }
    // a couple of hub loops outside the lobes, possibly in the signature
    for _ in 0..rng.gen_range(0..=2usize) {
        let id = format!("e{next_edge}");
        next_edge += 1;
        edges.push((id, "h".into(), "h".into()));
        if rng.gen_bool(0.5) {
            sigma |= subset::bit(edges.len() - 1);
        }
    }
    let graph = framekit::Multigraph::new(vertices, edges).ok()?;
    if !graph.is_connected() {
        return None;
    }
    let core: Mask = 0;
    let omega = BiasedGraph::signed_masks(graph, vec![sigma]).ok()?;
    let data = FlipData {
        hub,
        core,
        lobes,
        attachments,
        sigma: vec![sigma],
        assignment,
    };
    frame::twisted_flip(&omega, &data).ok().map(|_| ())
}

#[test]
fn criterion_6f_rooted_minor_lemma_exhaustive() {
    let graphs = rooted::small_three_connected_graphs(6);
    let mut qualifying = 0;
    let mut failures = 0;
    for g in &graphs {
        for i in 0..g.edge_count() {
            for j in (i + 1)..g.edge_count() {
                let (a, b) = (g.edge(i), g.edge(j));
                let distinct_ends = a.u != b.u && a.u != b.v && a.v != b.u && a.v != b.v;
                if !distinct_ends {
                    continue;
                }
                qualifying += 1;
                let (e1, e2) = (a.id.clone(), b.id.clone());
                match rooted::rooted_k4_w4_minor(g, &e1, &e2) {
                    Ok(w) => {
                        let t = rooted::replay(g, &w.operations).unwrap();
                        let ok = match w.terminal {
                            rooted::TerminalKind::K4 => {
                                t.vertex_count() == 4 && t.edge_count() == 6
                            }
                            rooted::TerminalKind::W4 => {
                                t.vertex_count() == 5 && t.edge_count() == 8
                            }
                        };
                        if !ok {
                            failures += 1;
                        }
                    }
                    Err(_) => failures += 1,
                }
            }
        }
    }
    line(
        "6f (rooted K4/W4 minors on all simple 3-connected graphs <= 6 vertices)",
        failures == 0 && qualifying > 0,
        &format!("{} graphs, {qualifying} rooted pairs, {failures} failures", graphs.len()),
    );
}

#[test]
fn criterion_aux_family_distinctness_of_found_members() {
    // built members of the family are pairwise non-isomorphic regardless
    // of how many classes the enumeration yields
    let cache = Cache::in_memory();
    let rank3 = verify::enumerate_excluded_matroidals(3, 8, false, &limits(), &cache);
    let rank4 = verify::enumerate_excluded_matroidals(4, 8, true, &limits(), &cache);
    let family = verify::build_e_family(&rank3, &rank4);
    let mut distinct = true;
    for i in 0..family.members.len() {
        for j in (i + 1)..family.members.len() {
            if is_isomorphic(&family.members[i].1, &family.members[j].1).is_some() {
                distinct = false;
            }
        }
    }
    line(
        "aux (family members pairwise distinct)",
        distinct,
        &format!("{} members", family.members.len()),
    );
}
