//! Named matroids and the two excluded-minor families built from them.

use crate::graph::Multigraph;
use crate::matroid::{Matroid, MatroidError};
use crate::subset;

/// A named matroid plus any distinguished elements it carries (the extra
/// edge of K33', or the opposite rim pair of the rank-4 wheel).
#[derive(Debug, Clone)]
pub struct NamedMatroid {
    pub name: String,
    pub matroid: Matroid,
    pub marked: Vec<String>,
}

pub const NAMES: &[&str] = &["U24", "U23", "MK5*", "MK33*", "MK33p*", "MW4", "F7", "F7*"];

fn complete_graph(n: u8) -> Multigraph {
    let vs: Vec<String> = (1..=n).map(|i| i.to_string()).collect();
    let mut edges = Vec::new();
    for i in 1..=n {
        for j in (i + 1)..=n {
            edges.push((format!("{i}{j}"), i.to_string(), j.to_string()));
        }
    }
    Multigraph::new(vs, edges).unwrap()
}

fn k33_plus() -> Multigraph {
    // parts {a,b,c} and {x,y,z}; "ep" joins the nonadjacent pair a,b
    let vs = ["a", "b", "c", "x", "y", "z"].map(String::from);
    let mut edges = Vec::new();
    for p in ["a", "b", "c"] {
        for q in ["x", "y", "z"] {
            edges.push((format!("{p}{q}"), p.to_string(), q.to_string()));
        }
    }
    edges.push(("ep".to_string(), "a".to_string(), "b".to_string()));
    Multigraph::new(vs, edges).unwrap()
}

fn k33() -> Multigraph {
    let g = k33_plus();
    let ep = g.edge_index("ep").unwrap();
    g.delete_edges(subset::bit(ep))
}

/// The wheel on four spokes: hub `h`, rim `1-2-3-4`. The marked elements
/// are the opposite rim edges `r12`, `r34`.
fn w4() -> Multigraph {
    let vs = ["h", "1", "2", "3", "4"].map(String::from);
    let edges = vec![
        ("s1".to_string(), "h".to_string(), "1".to_string()),
        ("s2".to_string(), "h".to_string(), "2".to_string()),
        ("s3".to_string(), "h".to_string(), "3".to_string()),
        ("s4".to_string(), "h".to_string(), "4".to_string()),
        ("r12".to_string(), "1".to_string(), "2".to_string()),
        ("r23".to_string(), "2".to_string(), "3".to_string()),
        ("r34".to_string(), "3".to_string(), "4".to_string()),
        ("r41".to_string(), "4".to_string(), "1".to_string()),
    ];
    Multigraph::new(vs, edges).unwrap()
}

/// The seven nonzero vectors of GF(2)^3 as elements `1..7`; independence is
/// linear independence over GF(2).
fn fano() -> Matroid {
    let ground: Vec<String> = (1..=7).map(|i| i.to_string()).collect();
    Matroid::from_independence(ground, |mask| {
        let mut basis: Vec<u8> = Vec::new();
        for i in subset::members(mask) {
            let mut v = (i + 1) as u8;
            for &b in &basis {
                let high = 7 - v.leading_zeros() as u8;
                let bh = 7 - b.leading_zeros() as u8;
                if high == bh {
                    v ^= b;
                }
            }
            if v == 0 {
                return false;
            }
            basis.push(v);
            basis.sort_unstable_by_key(|x| std::cmp::Reverse(*x));
        }
        true
    })
    .expect("the Fano matroid satisfies the axioms")
}

pub fn build_named(name: &str) -> Result<NamedMatroid, MatroidError> {
    let canonical = NAMES
        .iter()
        .find(|n| n.eq_ignore_ascii_case(name))
        .ok_or_else(|| MatroidError::UnknownElement(format!("unknown matroid name {name:?}")))?;
    let (matroid, marked) = match *canonical {
        "U24" => (crate::matroid::uniform(2, 4), vec![]),
        "U23" => (crate::matroid::uniform(2, 3), vec![]),
        "MK5*" => (
            Matroid::cycle_matroid(&complete_graph(5))?.dual()?,
            vec![],
        ),
        "MK33*" => (Matroid::cycle_matroid(&k33())?.dual()?, vec![]),
        "MK33p*" => (
            Matroid::cycle_matroid(&k33_plus())?.dual()?,
            vec!["ep".to_string()],
        ),
        "MW4" => (
            Matroid::cycle_matroid(&w4())?,
            vec!["r12".to_string(), "r34".to_string()],
        ),
        "F7" => (fano(), vec![]),
        "F7*" => (fano().dual()?, vec![]),
        _ => unreachable!(),
    };
    Ok(NamedMatroid {
        name: canonical.to_string(),
        matroid,
        marked,
    })
}

/// 2-sum two named matroids on deterministic basepoints: the marked element
/// when one exists (the K33' rule), otherwise the first ground element.
/// Sides are relabeled with `a.`/`b.` prefixes.
fn family_two_sum(m1: &NamedMatroid, m2: &NamedMatroid) -> Matroid {
    let base = |nm: &NamedMatroid| {
        nm.marked
            .first()
            .cloned()
            .unwrap_or_else(|| nm.matroid.ground()[0].clone())
    };
    let (b1, b2) = (base(m1), base(m2));
    let a = m1.matroid.relabel(|s| format!("a.{s}")).unwrap();
    let b = m2.matroid.relabel(|s| format!("b.{s}")).unwrap();
    Matroid::two_sum(&a, &format!("a.{b1}"), &b, &format!("b.{b2}"))
        .expect("family sums are well-formed")
}

/// The nine 2-sum family members: `U24` summed with each dual, plus all
/// unordered pairs of duals; sums on `ep` whenever a side is `MK33p*`.
pub fn build_e0() -> Vec<(String, Matroid)> {
    let u24 = build_named("U24").unwrap();
    let duals: Vec<NamedMatroid> = ["MK5*", "MK33*", "MK33p*"]
        .iter()
        .map(|n| build_named(n).unwrap())
        .collect();
    let mut out = Vec::new();
    for d in &duals {
        out.push((
            format!("U24+{}", d.name),
            family_two_sum(&u24, d),
        ));
    }
    for (i, d1) in duals.iter().enumerate() {
        for d2 in &duals[i..] {
            out.push((
                format!("{}+{}", d1.name, d2.name),
                family_two_sum(d1, d2),
            ));
        }
    }
    out
}

/// The 3-circuit with a `U24` summed onto every element: nine elements,
/// rank five.
pub fn build_n9() -> Matroid {
    let mut m = crate::matroid::uniform(2, 3);
    for (i, prefix) in ["a", "b", "c"].iter().enumerate() {
        let u = crate::matroid::uniform(2, 4)
            .relabel(|s| format!("{prefix}{}", &s[1..]))
            .unwrap();
        let base = format!("e{}", i + 1);
        m = Matroid::two_sum(&m, &base, &u, &format!("{prefix}1")).unwrap();
    }
    m
}

/// Sum a fresh `U24` onto each element of `l`; the remaining three elements
/// of the i-th copy are `name.u2`..`name.u4` for `name` in `l`.
pub fn glue_u24s(m: &Matroid, l: &[String]) -> Matroid {
    let mut cur = m.clone();
    for name in l {
        let u = crate::matroid::uniform(2, 4)
            .relabel(|s| format!("{name}.u{}", &s[1..]))
            .unwrap();
        cur = Matroid::two_sum(&cur, name, &u, &format!("{name}.u1")).unwrap();
    }
    cur
}
