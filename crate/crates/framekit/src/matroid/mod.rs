//! Finite matroids over small ground sets, stored by their circuit families.

mod io;
mod iso;
mod ops;

pub use io::MatroidDoc;
pub use iso::{automorphisms, is_isomorphic, is_matroidal_isomorphic};
pub use ops::Separation;

use std::collections::BTreeSet;
use std::fmt;
use std::sync::OnceLock;

use thiserror::Error;

use crate::subset::{self, Mask};

/// Ground-set size up to which a full subset-indexed rank table is built.
pub const RANK_TABLE_MAX: usize = 18;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MatroidError {
    #[error("circuit axiom violated ({axiom}): witness {witness:?}")]
    CircuitAxiomViolation {
        axiom: &'static str,
        witness: Vec<Vec<String>>,
    },
    #[error("unknown element {0:?}")]
    UnknownElement(String),
    #[error("duplicate element {0:?}")]
    DuplicateElement(String),
    #[error("ground set too large: {actual} elements, limit {limit}")]
    GroundTooLarge { actual: usize, limit: usize },
    #[error("delete and contract sets overlap")]
    OverlappingSets,
    #[error("basepoint {0:?} missing from ground set")]
    BasepointMissing(String),
    #[error("ground sets overlap on {0:?}")]
    GroundOverlap(String),
    #[error("not a 2-separation")]
    NotA2Separation,
    #[error("matroid is not connected")]
    NotConnected,
    #[error("size limit exceeded for {what}: {actual} > {limit}")]
    SizeLimitExceeded {
        what: &'static str,
        actual: usize,
        limit: usize,
    },
    #[error("parse error: {0}")]
    Parse(String),
}

/// A matroid given by its ground set and circuit family.
///
/// Circuits are bit-indexed subsets of the ordered ground set. The circuit
/// axioms are checked on every construction path.
#[derive(Clone)]
pub struct Matroid {
    ground: Vec<String>,
    circuits: Vec<Mask>,
    rank_table: OnceLock<Vec<u8>>,
}

impl PartialEq for Matroid {
    fn eq(&self, other: &Self) -> bool {
        self.ground == other.ground && self.circuits == other.circuits
    }
}
impl Eq for Matroid {}

impl fmt::Debug for Matroid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Matroid")
            .field("ground", &self.ground)
            .field("circuits", &self.named_circuits())
            .finish()
    }
}

impl Matroid {
    /// Build and validate a matroid from named circuits.
    pub fn from_circuits<G, C, S>(ground: G, circuits: C) -> Result<Self, MatroidError>
    where
        G: IntoIterator<Item = String>,
        C: IntoIterator<Item = S>,
        S: IntoIterator<Item = String>,
    {
        let ground: Vec<String> = ground.into_iter().collect();
        let mut masks = Vec::new();
        for circuit in circuits {
            let mut mask = 0;
            for name in circuit {
                let i = ground
                    .iter()
                    .position(|g| *g == name)
                    .ok_or(MatroidError::UnknownElement(name))?;
                mask |= subset::bit(i);
            }
            masks.push(mask);
        }
        Self::from_circuit_masks(ground, masks)
    }

    /// Build and validate from circuit bitmasks over the given ground order.
    pub fn from_circuit_masks(
        ground: Vec<String>,
        mut circuits: Vec<Mask>,
    ) -> Result<Self, MatroidError> {
        if ground.len() > subset::MAX_GROUND {
            return Err(MatroidError::GroundTooLarge {
                actual: ground.len(),
                limit: subset::MAX_GROUND,
            });
        }
        let mut names = BTreeSet::new();
        for g in &ground {
            if !names.insert(g.clone()) {
                return Err(MatroidError::DuplicateElement(g.clone()));
            }
        }
        circuits.sort_unstable();
        circuits.dedup();
        let m = Matroid {
            ground,
            circuits,
            rank_table: OnceLock::new(),
        };
        m.check_axioms()?;
        Ok(m)
    }

    /// Circuits as the minimal dependent sets of an independence oracle.
    ///
    /// Enumerates all subsets, so the ground set must be small (<= 20).
    pub fn from_independence<F>(ground: Vec<String>, indep: F) -> Result<Self, MatroidError>
    where
        F: Fn(Mask) -> bool,
    {
        let n = ground.len();
        if n > 20 {
            return Err(MatroidError::SizeLimitExceeded {
                what: "independence-oracle enumeration",
                actual: n,
                limit: 20,
            });
        }
        let mut by_size: Vec<Vec<Mask>> = vec![Vec::new(); n + 1];
        for mask in 0..(1u64 << n) {
            by_size[mask.count_ones() as usize].push(mask);
        }
        let mut circuits: Vec<Mask> = Vec::new();
        for size in 1..=n {
            for &mask in &by_size[size] {
                if circuits.iter().any(|&c| subset::is_subset(c, mask)) {
                    continue;
                }
                if !indep(mask) {
                    circuits.push(mask);
                }
            }
        }
        Self::from_circuit_masks(ground, circuits)
    }

    /// The cycle matroid of a multigraph: circuits are the edge sets of cycles.
    pub fn cycle_matroid(g: &crate::graph::Multigraph) -> Result<Self, MatroidError> {
        let cycles = g.cycles().map_err(|_| MatroidError::SizeLimitExceeded {
            what: "cycle enumeration",
            actual: g.edge_count(),
            limit: crate::graph::MAX_CYCLE_EDGES,
        })?;
        Self::from_circuit_masks(g.edge_ids(), cycles)
    }

    fn check_axioms(&self) -> Result<(), MatroidError> {
        for &c in &self.circuits {
            if c == 0 {
                return Err(MatroidError::CircuitAxiomViolation {
                    axiom: "no circuit is empty",
                    witness: vec![vec![]],
                });
            }
        }
        for (i, &c1) in self.circuits.iter().enumerate() {
            for &c2 in &self.circuits[i + 1..] {
                if subset::is_subset(c1, c2) || subset::is_subset(c2, c1) {
                    return Err(MatroidError::CircuitAxiomViolation {
                        axiom: "minimality",
                        witness: vec![self.names_of(c1), self.names_of(c2)],
                    });
                }
            }
        }
        for (i, &c1) in self.circuits.iter().enumerate() {
            for &c2 in &self.circuits[i + 1..] {
                let inter = c1 & c2;
                if inter == 0 {
                    continue;
                }
                let union = c1 | c2;
                for e in subset::members(inter) {
                    let target = union & !subset::bit(e);
                    if !self
                        .circuits
                        .iter()
                        .any(|&c| subset::is_subset(c, target))
                    {
                        return Err(MatroidError::CircuitAxiomViolation {
                            axiom: "circuit elimination",
                            witness: vec![
                                self.names_of(c1),
                                self.names_of(c2),
                                vec![self.ground[e].clone()],
                            ],
                        });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.ground.len()
    }

    pub fn ground(&self) -> &[String] {
        &self.ground
    }

    pub fn circuits(&self) -> &[Mask] {
        &self.circuits
    }

    pub fn full_mask(&self) -> Mask {
        subset::full(self.ground.len())
    }

    pub fn element_index(&self, name: &str) -> Option<usize> {
        self.ground.iter().position(|g| g == name)
    }

    pub fn names_of(&self, mask: Mask) -> Vec<String> {
        subset::members(mask).map(|i| self.ground[i].clone()).collect()
    }

    pub fn mask_of<'a, I: IntoIterator<Item = &'a str>>(
        &self,
        names: I,
    ) -> Result<Mask, MatroidError> {
        let mut m = 0;
        for name in names {
            let i = self
                .element_index(name)
                .ok_or_else(|| MatroidError::UnknownElement(name.to_string()))?;
            m |= subset::bit(i);
        }
        Ok(m)
    }

    pub fn named_circuits(&self) -> Vec<Vec<String>> {
        self.circuits.iter().map(|&c| self.names_of(c)).collect()
    }

    /// True when no circuit is contained in `x`.
    pub fn is_independent(&self, x: Mask) -> bool {
        !self.circuits.iter().any(|&c| subset::is_subset(c, x))
    }

    /// Matroid rank of the subset `x`.
    pub fn rank(&self, x: Mask) -> u32 {
        debug_assert!(subset::is_subset(x, self.full_mask()));
        if self.n() <= RANK_TABLE_MAX {
            self.rank_table()[x as usize] as u32
        } else {
            self.rank_greedy(x)
        }
    }

    pub fn rank_full(&self) -> u32 {
        self.rank(self.full_mask())
    }

    fn rank_greedy(&self, x: Mask) -> u32 {
        let mut cur: Mask = 0;
        let mut r = 0;
        for e in subset::members(x) {
            let cand = cur | subset::bit(e);
            let dependent = self
                .circuits
                .iter()
                .any(|&c| subset::contains(c, e) && subset::is_subset(c, cand));
            if !dependent {
                cur = cand;
                r += 1;
            }
        }
        r
    }

    fn rank_table(&self) -> &[u8] {
        self.rank_table.get_or_init(|| {
            let n = self.n();
            let size = 1usize << n;
            let mut dep = vec![false; size];
            for &c in &self.circuits {
                dep[c as usize] = true;
            }
            let mut table = vec![0u8; size];
            for x in 1..size {
                let mask = x as Mask;
                let mut is_dep = dep[x];
                let mut best = 0u8;
                for e in subset::members(mask) {
                    let sub = x & !(1usize << e);
                    if dep[sub] {
                        is_dep = true;
                    }
                    best = best.max(table[sub]);
                }
                if is_dep {
                    dep[x] = true;
                    table[x] = best;
                } else {
                    table[x] = mask.count_ones() as u8;
                }
            }
            table
        })
    }

    /// The restriction of the matroid to `keep`.
    pub fn restrict(&self, keep: Mask) -> Matroid {
        self.minor(self.full_mask() & !keep, 0)
            .expect("restriction is always a valid minor")
    }

    /// Relabel the ground set through `f`, preserving order.
    pub fn relabel<F: Fn(&str) -> String>(&self, f: F) -> Result<Matroid, MatroidError> {
        let ground = self.ground.iter().map(|g| f(g)).collect();
        Self::from_circuit_masks(ground, self.circuits.clone())
    }

    /// Equality as labeled matroids, ignoring ground order.
    pub fn same_labeled(&self, other: &Matroid) -> bool {
        if self.n() != other.n() {
            return false;
        }
        let mut map = Vec::with_capacity(self.n());
        for name in &self.ground {
            match other.element_index(name) {
                Some(j) => map.push(j),
                None => return false,
            }
        }
        let mut translated: Vec<Mask> = self
            .circuits
            .iter()
            .map(|&c| subset::members(c).fold(0, |m, i| m | subset::bit(map[i])))
            .collect();
        translated.sort_unstable();
        translated == other.circuits
    }
}

/// The uniform matroid `U_{r,n}` on elements `e1..en`.
pub fn uniform(r: usize, n: usize) -> Matroid {
    let ground: Vec<String> = (1..=n).map(|i| format!("e{i}")).collect();
    let mut circuits = Vec::new();
    if r < n {
        // all (r+1)-subsets
        let size = r + 1;
        let full: Vec<usize> = (0..n).collect();
        let mut pick = vec![0usize; size];
        fn rec(
            full: &[usize],
            pick: &mut Vec<usize>,
            depth: usize,
            start: usize,
            out: &mut Vec<Mask>,
        ) {
            if depth == pick.len() {
                out.push(subset::from_indices(pick.iter().copied()));
                return;
            }
            for i in start..full.len() {
                pick[depth] = full[i];
                rec(full, pick, depth + 1, i + 1, out);
            }
        }
        if size >= 1 {
            rec(&full, &mut pick, 0, 0, &mut circuits);
        }
    }
    Matroid::from_circuit_masks(ground, circuits).expect("uniform matroids are valid")
}
