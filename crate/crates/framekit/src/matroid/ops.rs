//! Derived matroid operations: duality, minors, 2-sums, connectivity,
//! series/parallel structure, and the binary (U24-minor) test.

use super::{Matroid, MatroidError};
use crate::subset::{self, Mask};

/// A 2-sided separation of a matroid's ground set, with its order
/// `r(A) + r(B) - r(E) + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Separation {
    pub side_a: Mask,
    pub side_b: Mask,
    pub order: u32,
}

impl Separation {
    pub fn new(m: &Matroid, side_a: Mask) -> Result<Self, MatroidError> {
        let full = m.full_mask();
        if side_a == 0 || side_a == full || !subset::is_subset(side_a, full) {
            return Err(MatroidError::NotA2Separation);
        }
        let side_b = full & !side_a;
        Ok(Separation {
            side_a,
            side_b,
            order: m.rank(side_a) + m.rank(side_b) - m.rank_full() + 1,
        })
    }

    /// Both sides have at least `order` elements, making this a k-separation
    /// for k = order.
    pub fn is_exact(&self) -> bool {
        self.side_a.count_ones() >= self.order && self.side_b.count_ones() >= self.order
    }
}

impl Matroid {
    /// Dual matroid: circuits are the minimal sets whose removal drops rank.
    pub fn dual(&self) -> Result<Matroid, MatroidError> {
        if self.n() > super::RANK_TABLE_MAX {
            return Err(MatroidError::SizeLimitExceeded {
                what: "dual (cocircuit enumeration)",
                actual: self.n(),
                limit: super::RANK_TABLE_MAX,
            });
        }
        let full = self.full_mask();
        let r = self.rank_full();
        Matroid::from_independence(self.ground().to_vec(), |x| self.rank(full & !x) == r)
    }

    /// Minor by deleting `delete` and contracting `contract`.
    ///
    /// Circuits are the minimal nonempty traces `C \ contract` of circuits
    /// avoiding `delete`, re-indexed to the surviving ground elements.
    pub fn minor(&self, delete: Mask, contract: Mask) -> Result<Matroid, MatroidError> {
        if delete & contract != 0 {
            return Err(MatroidError::OverlappingSets);
        }
        let keep = self.full_mask() & !delete & !contract;
        let keep_list: Vec<usize> = subset::members(keep).collect();
        let ground: Vec<String> = keep_list.iter().map(|&i| self.ground()[i].clone()).collect();
        let mut traces: Vec<Mask> = self
            .circuits()
            .iter()
            .filter(|&&c| c & delete == 0)
            .map(|&c| c & !contract)
            .filter(|&t| t != 0)
            .collect();
        traces.sort_unstable_by_key(|t| t.count_ones());
        let mut minimal: Vec<Mask> = Vec::new();
        for t in traces {
            if !minimal.iter().any(|&m| subset::is_subset(m, t)) {
                minimal.push(t);
            }
        }
        // re-index into the reduced ground set
        let mut pos = vec![usize::MAX; self.n()];
        for (new, &old) in keep_list.iter().enumerate() {
            pos[old] = new;
        }
        let circuits = minimal
            .into_iter()
            .map(|t| subset::members(t).fold(0, |m, i| m | subset::bit(pos[i])))
            .collect();
        Matroid::from_circuit_masks(ground, circuits)
    }

    pub fn minor_by_names(
        &self,
        delete: &[&str],
        contract: &[&str],
    ) -> Result<Matroid, MatroidError> {
        let d = self.mask_of(delete.iter().copied())?;
        let c = self.mask_of(contract.iter().copied())?;
        self.minor(d, c)
    }

    /// 2-sum on basepoints `e1`, `e2`. Grounds must otherwise be disjoint.
    pub fn two_sum(
        m1: &Matroid,
        e1: &str,
        m2: &Matroid,
        e2: &str,
    ) -> Result<Matroid, MatroidError> {
        let i1 = m1
            .element_index(e1)
            .ok_or_else(|| MatroidError::BasepointMissing(e1.to_string()))?;
        let i2 = m2
            .element_index(e2)
            .ok_or_else(|| MatroidError::BasepointMissing(e2.to_string()))?;
        for g in m1.ground() {
            if g != e1 && g != e2 && m2.element_index(g).is_some() {
                return Err(MatroidError::GroundOverlap(g.clone()));
            }
        }
        let keep1: Vec<usize> = (0..m1.n()).filter(|&i| i != i1).collect();
        let keep2: Vec<usize> = (0..m2.n()).filter(|&i| i != i2).collect();
        let mut ground: Vec<String> = keep1.iter().map(|&i| m1.ground()[i].clone()).collect();
        ground.extend(keep2.iter().map(|&i| m2.ground()[i].clone()));

        let off = keep1.len();
        let remap1 = |c: Mask| -> Mask {
            subset::members(c)
                .map(|i| keep1.iter().position(|&k| k == i).unwrap())
                .fold(0, |m, i| m | subset::bit(i))
        };
        let remap2 = |c: Mask| -> Mask {
            subset::members(c)
                .map(|i| off + keep2.iter().position(|&k| k == i).unwrap())
                .fold(0, |m, i| m | subset::bit(i))
        };

        let mut circuits = Vec::new();
        for &c in m1.circuits() {
            if !subset::contains(c, i1) {
                circuits.push(remap1(c));
            }
        }
        for &c in m2.circuits() {
            if !subset::contains(c, i2) {
                circuits.push(remap2(c));
            }
        }
        for &c1 in m1.circuits().iter().filter(|&&c| subset::contains(c, i1)) {
            for &c2 in m2.circuits().iter().filter(|&&c| subset::contains(c, i2)) {
                circuits
                    .push(remap1(c1 & !subset::bit(i1)) | remap2(c2 & !subset::bit(i2)));
            }
        }
        Matroid::from_circuit_masks(ground, circuits)
    }

    /// Split a connected matroid at a 2-separation into two strictly smaller
    /// summands whose 2-sum reconstructs it (checked). Fresh basepoints get
    /// the first unused names of the form `p1`, `p2`, ...
    pub fn decompose_two_sum(
        &self,
        sep: &Separation,
    ) -> Result<(Matroid, String, Matroid, String), MatroidError> {
        if !self.is_connected() {
            return Err(MatroidError::NotConnected);
        }
        if sep.order != 2
            || sep.side_a.count_ones() < 2
            || sep.side_b.count_ones() < 2
            || sep.side_a | sep.side_b != self.full_mask()
            || sep.side_a & sep.side_b != 0
        {
            return Err(MatroidError::NotA2Separation);
        }
        let mut fresh = Vec::new();
        let mut k = 1;
        while fresh.len() < 2 {
            let name = format!("p{k}");
            if self.element_index(&name).is_none() {
                fresh.push(name);
            }
            k += 1;
        }
        let (p1, p2) = (fresh[0].clone(), fresh[1].clone());
        let m1 = self.summand(sep.side_a, &p1);
        let m2 = self.summand(sep.side_b, &p2);
        let recomposed = Matroid::two_sum(&m1, &p1, &m2, &p2)?;
        if !recomposed.same_labeled(self) {
            return Err(MatroidError::NotA2Separation);
        }
        Ok((m1, p1, m2, p2))
    }

    /// Summand on `side` plus a fresh basepoint: circuits inside the side,
    /// plus minimal crossing traces closed up with the basepoint.
    fn summand(&self, side: Mask, basepoint: &str) -> Matroid {
        let side_list: Vec<usize> = subset::members(side).collect();
        let mut ground: Vec<String> =
            side_list.iter().map(|&i| self.ground()[i].clone()).collect();
        let bp = ground.len();
        ground.push(basepoint.to_string());
        let remap = |c: Mask| -> Mask {
            subset::members(c)
                .map(|i| side_list.iter().position(|&k| k == i).unwrap())
                .fold(0, |m, i| m | subset::bit(i))
        };
        let mut circuits = Vec::new();
        for &c in self.circuits() {
            if subset::is_subset(c, side) {
                circuits.push(remap(c));
            }
        }
        let mut traces: Vec<Mask> = self
            .circuits()
            .iter()
            .filter(|&&c| c & side != 0 && c & !side != 0)
            .map(|&c| c & side)
            .collect();
        traces.sort_unstable_by_key(|t| t.count_ones());
        let mut minimal: Vec<Mask> = Vec::new();
        for t in traces {
            if !minimal.iter().any(|&m| subset::is_subset(m, t)) {
                minimal.push(t);
            }
        }
        circuits.extend(minimal.into_iter().map(|t| remap(t) | subset::bit(bp)));
        Matroid::from_circuit_masks(ground, circuits)
            .expect("summand of a 2-separation satisfies the circuit axioms")
    }

    /// Order of the separation (x, E\x).
    pub fn connectivity_lambda(&self, x: Mask) -> u32 {
        assert!(x != 0 && x != self.full_mask(), "separation sides must be nonempty");
        self.rank(x) + self.rank(self.full_mask() & !x) - self.rank_full() + 1
    }

    /// No l-separation exists with l < k.
    pub fn is_k_connected(&self, k: u32) -> bool {
        let n = self.n();
        if n < 2 {
            return true;
        }
        for x in 1..(1u64 << (n - 1)) {
            // fix the top element on side B to halve the scan
            let a = x;
            let b = self.full_mask() & !a;
            let order = self.rank(a) + self.rank(b) - self.rank_full() + 1;
            if order < k && a.count_ones() >= order && b.count_ones() >= order {
                return false;
            }
        }
        true
    }

    /// Least k admitting a k-separation; `None` means no separation exists
    /// at all (infinite connectivity).
    pub fn connectivity(&self) -> Option<u32> {
        let n = self.n();
        if n < 2 {
            return None;
        }
        let mut best: Option<u32> = None;
        for x in 1..(1u64 << (n - 1)) {
            let a = x;
            let b = self.full_mask() & !a;
            let order = self.rank(a) + self.rank(b) - self.rank_full() + 1;
            if a.count_ones() >= order && b.count_ones() >= order {
                best = Some(best.map_or(order, |v| v.min(order)));
            }
        }
        best
    }

    /// All 2-separations, one mask per separation (side not containing the
    /// last element), sorted.
    pub fn two_separations(&self) -> Vec<Separation> {
        let n = self.n();
        let mut out = Vec::new();
        if n < 4 {
            return out;
        }
        for x in 1..(1u64 << (n - 1)) {
            let a = x;
            let b = self.full_mask() & !a;
            if a.count_ones() < 2 || b.count_ones() < 2 {
                continue;
            }
            let order = self.rank(a) + self.rank(b) - self.rank_full() + 1;
            if order == 2 {
                out.push(Separation {
                    side_a: a,
                    side_b: b,
                    order,
                });
            }
        }
        out
    }

    /// Connected components of the matroid as ground masks: transitive
    /// closure of sharing a circuit; untouched elements are singletons.
    pub fn components(&self) -> Vec<Mask> {
        let n = self.n();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut Vec<usize>, mut a: usize) -> usize {
            while p[a] != a {
                p[a] = p[p[a]];
                a = p[a];
            }
            a
        }
        for &c in self.circuits() {
            let mut it = subset::members(c);
            if let Some(first) = it.next() {
                for e in it {
                    let (ra, rb) = (find(&mut parent, first), find(&mut parent, e));
                    if ra != rb {
                        parent[ra] = rb;
                    }
                }
            }
        }
        let mut comps = std::collections::BTreeMap::new();
        for i in 0..n {
            let r = find(&mut parent, i);
            *comps.entry(r).or_insert(0u64) |= subset::bit(i);
        }
        comps.into_values().collect()
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1
    }

    /// Parallel classes: union-find over 2-circuits, with all loops in one
    /// class and everything else a singleton.
    pub fn parallel_classes(&self) -> Vec<Mask> {
        let n = self.n();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut Vec<usize>, mut a: usize) -> usize {
            while p[a] != a {
                p[a] = p[p[a]];
                a = p[a];
            }
            a
        }
        let mut first_loop = None;
        for &c in self.circuits() {
            match c.count_ones() {
                1 => {
                    let l = subset::members(c).next().unwrap();
                    match first_loop {
                        None => first_loop = Some(l),
                        Some(f) => {
                            let (ra, rb) = (find(&mut parent, f), find(&mut parent, l));
                            if ra != rb {
                                parent[ra] = rb;
                            }
                        }
                    }
                }
                2 => {
                    let mut it = subset::members(c);
                    let (a, b) = (it.next().unwrap(), it.next().unwrap());
                    let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                    if ra != rb {
                        parent[ra] = rb;
                    }
                }
                _ => {}
            }
        }
        let mut classes = std::collections::BTreeMap::new();
        for i in 0..n {
            let r = find(&mut parent, i);
            *classes.entry(r).or_insert(0u64) |= subset::bit(i);
        }
        classes.into_values().collect()
    }

    /// Series classes are the parallel classes of the dual: unions of
    /// 2-cocircuits, with all coloops (dual loops) in one class. Computed
    /// from corank directly.
    pub fn series_classes(&self) -> Vec<Mask> {
        let n = self.n();
        let full = self.full_mask();
        let r = self.rank_full();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut Vec<usize>, mut a: usize) -> usize {
            while p[a] != a {
                p[a] = p[p[a]];
                a = p[a];
            }
            a
        }
        let coloop = |e: usize| self.rank(full & !subset::bit(e)) < r;
        let mut first_coloop = None;
        for a in 0..n {
            if coloop(a) {
                match first_coloop {
                    None => first_coloop = Some(a),
                    Some(f) => {
                        let (ra, rb) = (find(&mut parent, f), find(&mut parent, a));
                        if ra != rb {
                            parent[ra] = rb;
                        }
                    }
                }
                continue;
            }
            for b in (a + 1)..n {
                if coloop(b) {
                    continue;
                }
                if self.rank(full & !subset::bit(a) & !subset::bit(b)) < r {
                    let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                    if ra != rb {
                        parent[ra] = rb;
                    }
                }
            }
        }
        let mut classes = std::collections::BTreeMap::new();
        for i in 0..n {
            let r = find(&mut parent, i);
            *classes.entry(r).or_insert(0u64) |= subset::bit(i);
        }
        classes.into_values().collect()
    }

    /// No loops, no 2-circuits.
    pub fn is_simple(&self) -> bool {
        self.circuits().iter().all(|c| c.count_ones() > 2)
    }

    /// No coloops, no 2-cocircuits.
    pub fn is_cosimple(&self) -> bool {
        let full = self.full_mask();
        let r = self.rank_full();
        let n = self.n();
        for a in 0..n {
            if self.rank(full & !subset::bit(a)) < r {
                return false;
            }
        }
        for a in 0..n {
            for b in (a + 1)..n {
                if self.rank(full & !subset::bit(a) & !subset::bit(b)) < r {
                    return false;
                }
            }
        }
        true
    }

    /// True iff the matroid has no U24 minor, by brute force over
    /// four-element minors.
    pub fn is_binary(&self) -> Result<bool, MatroidError> {
        const LIMIT: usize = 14;
        let n = self.n();
        if n > LIMIT {
            return Err(MatroidError::SizeLimitExceeded {
                what: "binary test",
                actual: n,
                limit: LIMIT,
            });
        }
        let full = self.full_mask();
        // choose 4 kept elements Q and a contraction set Z disjoint from Q;
        // everything else is deleted. The minor is U24 iff singles have rank
        // 1, pairs rank 2, and Q has rank 2 (relative to Z).
        let quads = choose_masks(n, 4);
        for &q in &quads {
            let rest = full & !q;
            let singles: Vec<Mask> = subset::members(q).map(subset::bit).collect();
            'z: for z in subset::submasks(rest) {
                let rz = self.rank(z);
                if self.rank(q | z) - rz != 2 {
                    continue;
                }
                for &s in &singles {
                    if self.rank(s | z) - rz != 1 {
                        continue 'z;
                    }
                }
                for i in 0..4 {
                    for j in (i + 1)..4 {
                        if self.rank(singles[i] | singles[j] | z) - rz != 2 {
                            continue 'z;
                        }
                    }
                }
                return Ok(false);
            }
        }
        Ok(true)
    }
}

fn choose_masks(n: usize, k: usize) -> Vec<Mask> {
    let mut out = Vec::new();
    fn rec(n: usize, k: usize, start: usize, cur: Mask, out: &mut Vec<Mask>) {
        if k == 0 {
            out.push(cur);
            return;
        }
        for i in start..n {
            rec(n, k - 1, i + 1, cur | subset::bit(i), out);
        }
    }
    if k <= n {
        rec(n, k, 0, 0, &mut out);
    }
    out
}
