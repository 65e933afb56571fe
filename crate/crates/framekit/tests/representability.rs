//! Representability invariants: witness soundness, pruned-vs-reference
//! completeness, decomposition agreement, and retaming.

mod common;

use std::time::Duration;

use framekit::frame::{classify_biseparation, frame_matroid, BiseparationType};
use framekit::matroid::{uniform, Matroid};
use framekit::named;
use framekit::rep::{
    enumerate_l_biased, is_frame, is_frame_matroidal, is_graphic, reference_enumerate_l_biased,
    retame, Cache, RepStatus, RetameOutcome,
};
use framekit::subset::{self, Mask};
use framekit::SearchLimits;

fn limits() -> SearchLimits {
    SearchLimits {
        node_budget: 50_000_000,
        time_budget: Duration::from_secs(300),
        ..Default::default()
    }
}

#[test]
fn witness_soundness_on_small_corpus() {
    let cases: Vec<(Matroid, Mask)> = vec![
        (uniform(2, 3), 0),
        (uniform(2, 3), 0b011),
        (uniform(2, 4), 0),
        (uniform(2, 4), 0b0001),
        (uniform(3, 5), 0),
        (named::build_named("MK33*").unwrap().matroid, 0),
    ];
    for (m, l) in cases {
        let v = enumerate_l_biased(&m, l, &limits());
        for w in &v.witnesses {
            // identity labeling
            let f = frame_matroid(w).unwrap();
            assert!(f.same_labeled(&m));
            // forced loops are unbalanced loops
            for i in subset::members(l) {
                let ei = w.graph().edge_index(&m.ground()[i]).unwrap();
                assert!(w.graph().edge(ei).is_loop());
                assert!(!w.cycle_balanced_mask(subset::bit(ei)).unwrap());
            }
            // theta validity is enforced by construction; re-check loudly
            assert!(w.theta_violation().is_none());
        }
    }
}

#[test]
fn pruned_and_reference_searches_agree_on_witness_classes() {
    // instances small enough that the unpruned reference fits the budget
    let cases: Vec<(Matroid, Mask)> = vec![
        (uniform(2, 3), 0),
        (uniform(2, 3), 0b111),
        (uniform(2, 4), 0),
        (uniform(2, 4), 0b0011),
        (uniform(1, 4), 0),
        (uniform(3, 4), 0),
        (uniform(3, 5), 0),
        (Matroid::cycle_matroid(&framekit::Multigraph::from_indexed(
            4,
            vec![
                ("a".into(), 0, 1),
                ("b".into(), 1, 2),
                ("c".into(), 2, 3),
                ("d".into(), 3, 0),
                ("e".into(), 0, 2),
            ],
        ))
        .unwrap(), 0),
        (
            Matroid::two_sum(
                &uniform(2, 4).relabel(|s| format!("a{s}")).unwrap(),
                "ae1",
                &uniform(2, 4).relabel(|s| format!("b{s}")).unwrap(),
                "be1",
            )
            .unwrap(),
            0,
        ),
    ];
    for (m, l) in cases {
        let pruned = enumerate_l_biased(&m, l, &limits());
        let reference = reference_enumerate_l_biased(&m, l, &limits()).expect("fits budget");
        assert_eq!(
            pruned.witnesses.len(),
            reference.len(),
            "witness classes must match for n={} l={l:b}",
            m.n()
        );
        // and each pruned witness is isomorphic to some reference witness
        for w in &pruned.witnesses {
            assert!(reference.iter().any(|r| r.isomorphic_to(w).is_some()));
        }
    }
}

#[test]
fn decomposition_and_direct_search_verdicts_agree() {
    let cache = Cache::in_memory();
    let mut corpus: Vec<Matroid> = Vec::new();
    for (a, b) in [(2usize, 3usize), (2, 4), (3, 5)] {
        let x = uniform(2, a + 1).relabel(|s| format!("a{s}")).unwrap();
        let y = uniform(2, b).relabel(|s| format!("b{s}")).unwrap();
        corpus.push(Matroid::two_sum(&x, "ae1", &y, "be1").unwrap());
    }
    for m in &corpus {
        for l in [0u64, 1, 3] {
            let l = l & m.full_mask();
            let direct = enumerate_l_biased(m, l, &limits());
            let recursive = is_frame_matroidal(m, l, &limits(), &cache);
            assert_eq!(direct.status, recursive.status, "n={} l={l:b}", m.n());
        }
    }
}

#[test]
fn graphic_checks() {
    let cache = Cache::in_memory();
    let mk4 = Matroid::cycle_matroid(&framekit::Multigraph::from_indexed(
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
    .unwrap();
    assert_eq!(is_graphic(&mk4, &limits(), &cache).status, RepStatus::Frame);
    assert_eq!(
        is_graphic(&uniform(2, 4), &limits(), &cache).status,
        RepStatus::NotFrame
    );
    let mk5s = named::build_named("MK5*").unwrap().matroid;
    assert_eq!(
        is_graphic(&mk5s, &limits(), &cache).status,
        RepStatus::NotFrame
    );
}

#[test]
fn frame_checks_on_named_matroids() {
    let cache = Cache::in_memory();
    // the two rank-3/4 projective cases are not frame
    for name in ["F7", "F7*"] {
        let m = named::build_named(name).unwrap().matroid;
        let v = is_frame(&m, &limits(), &cache);
        assert_eq!(v.status, RepStatus::NotFrame, "{name}");
    }
    // duals of the graphic excluded minors are frame
    for name in ["MK5*", "MK33*", "MK33p*"] {
        let m = named::build_named(name).unwrap().matroid;
        let v = is_frame(&m, &limits(), &cache);
        assert_eq!(v.status, RepStatus::Frame, "{name}");
    }
    // no representation of a dual has a loop
    let mk5s = named::build_named("MK5*").unwrap().matroid;
    let v = is_frame_matroidal(&mk5s, 0b1, &limits(), &cache);
    assert_eq!(v.status, RepStatus::NotFrame);
}

#[test]
fn rank2_matroidals_with_two_loops_are_frame_even_with_parallels() {
    let cache = Cache::in_memory();
    // uniform rank-2 cases
    for n in 3..=6 {
        let m = uniform(2, n);
        let v = is_frame_matroidal(&m, 0b11, &limits(), &cache);
        assert_eq!(v.status, RepStatus::Frame, "U(2,{n})");
    }
    // with parallel elements, including a parallel pair inside L
    let with_parallel = Matroid::from_circuits(
        ["a", "b", "c", "d"].map(String::from),
        vec![
            vec!["a".to_string(), "b".to_string()],
            vec!["a".to_string(), "c".to_string(), "d".to_string()],
            vec!["b".to_string(), "c".to_string(), "d".to_string()],
        ],
    )
    .unwrap();
    let l_parallel = with_parallel.mask_of(["a", "b"]).unwrap();
    let v = is_frame_matroidal(&with_parallel, l_parallel, &limits(), &cache);
    assert_eq!(v.status, RepStatus::Frame, "parallel pair inside L");
    let l_split = with_parallel.mask_of(["a", "c"]).unwrap();
    let v = is_frame_matroidal(&with_parallel, l_split, &limits(), &cache);
    assert_eq!(v.status, RepStatus::Frame, "split pair");
}

#[test]
fn retame_finds_type1_or_2_and_respects_budget_semantics() {
    let m = Matroid::two_sum(
        &uniform(2, 4).relabel(|s| format!("a{s}")).unwrap(),
        "ae1",
        &uniform(2, 4).relabel(|s| format!("b{s}")).unwrap(),
        "be1",
    )
    .unwrap();
    let side = m.mask_of(["ae2", "ae3", "ae4"]).unwrap();
    match retame(&m, 0, side, &limits()) {
        RetameOutcome::Witness(w) => {
            let r = classify_biseparation(&w, side).unwrap();
            assert!(matches!(r.kind, BiseparationType::Type1 | BiseparationType::Type2));
        }
        other => panic!("expected witness, got {other:?}"),
    }
    // a tiny budget degrades to inconclusive rather than guessing
    let strangled = SearchLimits {
        node_budget: 1,
        ..limits()
    };
    match retame(&m, 0, side, &strangled) {
        RetameOutcome::Inconclusive(_) => {}
        other => panic!("expected inconclusive under a one-node budget, got {other:?}"),
    }
}

#[test]
fn loops_in_l_are_never_frame_and_loops_outside_attach_as_balanced() {
    let cache = Cache::in_memory();
    let with_loop = Matroid::from_circuits(
        ["a", "b", "c"].map(String::from),
        vec![vec!["a".to_string()], vec!["b".to_string(), "c".to_string()]],
    )
    .unwrap();
    let la = with_loop.mask_of(["a"]).unwrap();
    assert_eq!(
        is_frame_matroidal(&with_loop, la, &limits(), &cache).status,
        RepStatus::NotFrame
    );
    let v = is_frame(&with_loop, &limits(), &cache);
    assert_eq!(v.status, RepStatus::Frame);
    let w = &v.witnesses[0];
    let ai = w.graph().edge_index("a").unwrap();
    assert!(w.graph().edge(ai).is_loop());
    assert!(w.cycle_balanced_mask(subset::bit(ai)).unwrap());
}
