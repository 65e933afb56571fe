//! Harness-level properties: named family shapes, rooted minors, the
//! 2-sum/matroidal equivalence, and the separation-disjointness fact.

mod common;

use std::time::Duration;

use framekit::matroid::{is_isomorphic, uniform, Matroid};
use framekit::rep::{is_frame, is_frame_matroidal, Cache, RepStatus};
use framekit::rooted::{
    is_three_connected, replay, rooted_k4_w4_minor, small_three_connected_graphs, RootedError,
    TerminalKind,
};
use framekit::subset;
use framekit::verify::{self, ClaimStatus};
use framekit::{named, SearchLimits};

fn limits() -> SearchLimits {
    SearchLimits {
        node_budget: 50_000_000,
        time_budget: Duration::from_secs(300),
        ..Default::default()
    }
}

#[test]
fn e0_members_pairwise_non_isomorphic() {
    let e0 = named::build_e0();
    for i in 0..e0.len() {
        for j in (i + 1)..e0.len() {
            assert!(
                is_isomorphic(&e0[i].1, &e0[j].1).is_none(),
                "{} vs {}",
                e0[i].0,
                e0[j].0
            );
        }
    }
}

#[test]
fn two_sum_matroidal_equivalence_on_small_corpus() {
    // frame(N with U24s glued on L) == frame-matroidal(N, L)
    let cache = Cache::in_memory();
    let mut cases: Vec<(Matroid, Vec<String>)> = vec![
        (uniform(2, 3), vec!["e1".into(), "e2".into(), "e3".into()]),
        (uniform(2, 3), vec!["e1".into()]),
        (uniform(2, 4), vec!["e1".into(), "e2".into()]),
        (uniform(3, 5), vec!["e1".into()]),
    ];
    let w4 = named::build_named("MW4").unwrap();
    cases.push((w4.matroid.clone(), w4.marked.clone()));
    for (n, l) in cases {
        let composed = named::glue_u24s(&n, &l);
        let whole = is_frame(&composed, &limits(), &cache);
        let l_mask = n.mask_of(l.iter().map(|s| s.as_str())).unwrap();
        let part = is_frame_matroidal(&n, l_mask, &limits(), &cache);
        assert_eq!(whole.status, part.status, "n={} l={l:?}", n.n());
        assert_ne!(whole.status, RepStatus::Inconclusive);
    }
}

#[test]
fn u23_with_all_elements_is_the_only_large_l_excluded_matroidal_in_bounds() {
    // scan |L| = 3 over small 3-connected candidates; the only confirmed
    // excluded matroidal must be the 3-circuit with everything marked
    let cache = Cache::in_memory();
    let u23 = uniform(2, 3);
    let mut confirmed: Vec<(Matroid, Vec<String>)> = Vec::new();
    let mut candidates: Vec<Matroid> = vec![u23.clone(), uniform(2, 4), uniform(3, 5)];
    candidates.push(
        Matroid::cycle_matroid(&framekit::Multigraph::from_indexed(
            4,
            vec![
                ("a".into(), 0, 1),
                ("b".into(), 0, 2),
                ("c".into(), 0, 3),
                ("d".into(), 1, 2),
                ("e".into(), 1, 3),
                ("f".into(), 2, 3),
            ],
        ))
        .unwrap(),
    );
    for m in &candidates {
        for a in 0..m.n() {
            for b in (a + 1)..m.n() {
                for c in (b + 1)..m.n() {
                    let l: Vec<String> = [a, b, c].iter().map(|&i| m.ground()[i].clone()).collect();
                    let report = verify::verify_excluded_matroidal("scan", m, &l, &limits(), &cache);
                    if report.overall == ClaimStatus::Confirmed {
                        confirmed.push((m.clone(), l));
                    }
                }
            }
        }
    }
    assert_eq!(confirmed.len(), 1, "exactly the 3-circuit case");
    assert!(is_isomorphic(&confirmed[0].0, &u23).is_some());
}

#[test]
fn three_circuit_sides_are_equal_or_disjoint() {
    // on members built purely from U24 sums, every 2-separation has a
    // 3-circuit side, and those sides never partially overlap
    for m in [named::build_n9(), {
        let base = uniform(3, 5);
        named::glue_u24s(&base, &["e1".to_string(), "e2".to_string()])
    }] {
        if m.n() < 6 {
            continue;
        }
        let mut sides: Vec<u64> = Vec::new();
        for sep in m.two_separations() {
            for side in [sep.side_a, sep.side_b] {
                if side.count_ones() == 3 && m.circuits().contains(&side) {
                    sides.push(side);
                }
            }
        }
        assert!(!sides.is_empty());
        for i in 0..sides.len() {
            for j in (i + 1)..sides.len() {
                let inter = sides[i] & sides[j];
                assert!(
                    inter == 0 || sides[i] == sides[j],
                    "3-circuit sides must be equal or disjoint"
                );
            }
        }
    }
}

#[test]
fn rooted_minor_witnesses_replay_correctly() {
    let graphs = small_three_connected_graphs(5);
    for g in &graphs {
        for i in 0..g.edge_count() {
            for j in (i + 1)..g.edge_count() {
                let (e1, e2) = (g.edge(i).id.clone(), g.edge(j).id.clone());
                match rooted_k4_w4_minor(g, &e1, &e2) {
                    Ok(w) => {
                        let t = replay(g, &w.operations).unwrap();
                        match w.terminal {
                            TerminalKind::K4 => {
                                assert_eq!(t.vertex_count(), 4);
                                assert_eq!(t.edge_count(), 6);
                            }
                            TerminalKind::W4 => {
                                assert_eq!(t.vertex_count(), 5);
                                assert_eq!(t.edge_count(), 8);
                            }
                        }
                        assert!(t.edge_index(&e1).is_some());
                        assert!(t.edge_index(&e2).is_some());
                    }
                    Err(RootedError::BadMarkedEdges) => {} // adjacent pair
                    Err(e) => panic!("unexpected: {e}"),
                }
            }
        }
    }
}

#[test]
fn three_connectivity_test_matches_known_graphs() {
    let graphs = small_three_connected_graphs(5);
    assert_eq!(graphs.len(), 4); // K4, W4, K5 minus an edge, K5
    for g in &graphs {
        assert!(is_three_connected(g));
    }
    let path = framekit::Multigraph::from_indexed(3, vec![("a".into(), 0, 1), ("b".into(), 1, 2)]);
    assert!(!is_three_connected(&path));
}

#[test]
fn verification_reports_aggregate_and_serialize() {
    let cache = Cache::in_memory();
    let report =
        verify::verify_excluded_minor("N9", &named::build_n9(), &limits(), &cache);
    assert_eq!(report.overall, ClaimStatus::Confirmed);
    let json = report.to_json();
    assert!(json.contains("\"subject\": \"N9\""));
    assert!(json.contains("not-frame"));
    // every minor claim carries a witness
    for c in report.claims.iter().filter(|c| c.claim.starts_with("minor-frame")) {
        assert!(c.witness.is_some(), "{}", c.claim);
    }
    let _ = subset::full(1);
}
