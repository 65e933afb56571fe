//! Matroid isomorphism by invariant-profile pruning plus backtracking.

use std::collections::HashSet;

use super::Matroid;
use crate::subset::{self, Mask};

/// Per-element invariant: how many circuits of each size contain it.
fn profiles(m: &Matroid) -> Vec<Vec<u32>> {
    let max_size = subset::MAX_GROUND + 1;
    let mut out = vec![vec![0u32; max_size]; m.n()];
    for &c in m.circuits() {
        let s = c.count_ones() as usize;
        for e in subset::members(c) {
            out[e][s] += 1;
        }
    }
    out
}

struct Search<'a> {
    m1: &'a Matroid,
    candidates: Vec<Vec<usize>>,
    order: Vec<usize>,
    circuits2: HashSet<Mask>,
    /// circuits of m1 indexed by element
    by_element: Vec<Vec<usize>>,
    want_all: bool,
    found: Vec<Vec<usize>>,
}

impl<'a> Search<'a> {
    fn run(&mut self, mapping: &mut Vec<Option<usize>>, used: &mut Vec<bool>, depth: usize) -> bool {
        if depth == self.order.len() {
            let map: Vec<usize> = mapping.iter().map(|x| x.unwrap()).collect();
            self.found.push(map);
            return !self.want_all;
        }
        let e = self.order[depth];
        let cands = self.candidates[e].clone();
        for img in cands {
            if used[img] {
                continue;
            }
            mapping[e] = Some(img);
            used[img] = true;
            if self.consistent(mapping, e) && self.run(mapping, used, depth + 1) {
                return true;
            }
            mapping[e] = None;
            used[img] = false;
        }
        false
    }

    /// Every m1 circuit through `e` that is now fully mapped must land on an
    /// m2 circuit.
    fn consistent(&self, mapping: &[Option<usize>], e: usize) -> bool {
        'circ: for &ci in &self.by_element[e] {
            let c = self.m1.circuits()[ci];
            let mut image: Mask = 0;
            for x in subset::members(c) {
                match mapping[x] {
                    Some(y) => image |= subset::bit(y),
                    None => continue 'circ,
                }
            }
            if !self.circuits2.contains(&image) {
                return false;
            }
        }
        true
    }
}

fn search(m1: &Matroid, m2: &Matroid, fixed: Option<(Mask, Mask)>, all: bool) -> Vec<Vec<usize>> {
    if m1.n() != m2.n() || m1.circuits().len() != m2.circuits().len() {
        return Vec::new();
    }
    let mut sizes1: Vec<u32> = m1.circuits().iter().map(|c| c.count_ones()).collect();
    let mut sizes2: Vec<u32> = m2.circuits().iter().map(|c| c.count_ones()).collect();
    sizes1.sort_unstable();
    sizes2.sort_unstable();
    if sizes1 != sizes2 {
        return Vec::new();
    }
    let p1 = profiles(m1);
    let p2 = profiles(m2);
    let mut sp1 = p1.clone();
    let mut sp2 = p2.clone();
    sp1.sort_unstable();
    sp2.sort_unstable();
    if sp1 != sp2 {
        return Vec::new();
    }

    let n = m1.n();
    let mut candidates: Vec<Vec<usize>> = vec![Vec::new(); n];
    for e in 0..n {
        for f in 0..n {
            if p1[e] != p2[f] {
                continue;
            }
            if let Some((l1, l2)) = fixed {
                if subset::contains(l1, e) != subset::contains(l2, f) {
                    continue;
                }
            }
            candidates[e].push(f);
        }
        if candidates[e].is_empty() {
            return Vec::new();
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&e| candidates[e].len());

    let mut by_element = vec![Vec::new(); n];
    for (i, &c) in m1.circuits().iter().enumerate() {
        for e in subset::members(c) {
            by_element[e].push(i);
        }
    }
    let mut s = Search {
        m1,
        candidates,
        order,
        circuits2: m2.circuits().iter().copied().collect(),
        by_element,
        want_all: all,
        found: Vec::new(),
    };
    let mut mapping = vec![None; n];
    let mut used = vec![false; n];
    s.run(&mut mapping, &mut used, 0);
    s.found
}

/// A circuit-preserving bijection from `m1`'s ground to `m2`'s (by index),
/// or `None`.
pub fn is_isomorphic(m1: &Matroid, m2: &Matroid) -> Option<Vec<usize>> {
    search(m1, m2, None, false).into_iter().next()
}

/// Isomorphism of matroidals: the bijection must carry `l1` onto `l2`.
pub fn is_matroidal_isomorphic(
    m1: &Matroid,
    l1: Mask,
    m2: &Matroid,
    l2: Mask,
) -> Option<Vec<usize>> {
    if l1.count_ones() != l2.count_ones() {
        return None;
    }
    search(m1, m2, Some((l1, l2)), false).into_iter().next()
}

/// All automorphisms of `m`, as index maps.
pub fn automorphisms(m: &Matroid) -> Vec<Vec<usize>> {
    search(m, m, None, true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matroid::uniform;

    #[test]
    fn relabeled_uniform_is_isomorphic() {
        let m = uniform(2, 4);
        let r = m.relabel(|s| format!("x{s}")).unwrap();
        let map = is_isomorphic(&m, &r).unwrap();
        assert_eq!(map.len(), 4);
    }

    #[test]
    fn different_circuit_profiles_reject_fast() {
        let m1 = uniform(2, 4);
        let m2 = uniform(3, 4);
        assert!(is_isomorphic(&m1, &m2).is_none());
    }

    #[test]
    fn u24_has_full_symmetric_automorphism_group() {
        let m = uniform(2, 4);
        assert_eq!(automorphisms(&m).len(), 24);
    }

    #[test]
    fn mk4_automorphism_group_size() {
        let m = Matroid::cycle_matroid(&crate::graph::k4_test_graph()).unwrap();
        // Aut(M(K4)) = S4 acting on vertices: 24 maps.
        assert_eq!(automorphisms(&m).len(), 24);
    }

    #[test]
    fn matroidal_iso_respects_l() {
        let m = uniform(2, 4);
        // l = {e1,e2} vs {e3,e4} are related by an automorphism
        assert!(is_matroidal_isomorphic(&m, 0b0011, &m, 0b1100).is_some());
        assert!(is_matroidal_isomorphic(&m, 0b0011, &m, 0b0111).is_none());
    }

    #[test]
    fn circuit_preservation_is_bidirectional() {
        let m1 = uniform(2, 4);
        let m2 = m1.relabel(|s| format!("y{s}")).unwrap();
        let map = is_isomorphic(&m1, &m2).unwrap();
        for &c in m1.circuits() {
            let image: u64 = crate::subset::members(c)
                .map(|i| crate::subset::bit(map[i]))
                .fold(0, |a, b| a | b);
            assert!(m2.circuits().contains(&image));
        }
        assert_eq!(
            m1.circuits().len(),
            m2.circuits().len(),
            "equal counts make the map onto"
        );
    }
}
