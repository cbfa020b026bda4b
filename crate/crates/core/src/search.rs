//! Extension search from seeds to complete perfect 1-factorisations, and
//! screening of the results into isomorphism classes.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::canon::{canonize, ColourMode, ColouredGraph};
use crate::error::{Error, Result};
use crate::factor::{perfect_pair_unchecked, standard_prefix, OneFactor, Opf, MAX_ORDER};
use crate::order::MinimalityTester;
use crate::seeds::SeedSet;

/// All 1-factors `t`, in lexicographic order, such that `p ∥ t` is perfect.
pub fn perfect_extensions(p: &Opf) -> Vec<OneFactor> {
    let n = p.order();
    let inv: Vec<OneFactor> = p.factors().iter().map(|f| f.inverse()).collect();
    let k = inv.len();
    // For each factor g, the partial permutation x -> g^-1(t(x)) as a set of
    // paths: head_of[tail] and tail_of[head].
    let mut ident = [0u8; MAX_ORDER];
    for (x, slot) in ident.iter_mut().enumerate().take(n) {
        *slot = x as u8;
    }
    let mut st = ExtState {
        n,
        inv: inv.iter().map(|f| f.image().to_vec()).collect(),
        head_of: vec![ident; k],
        tail_of: vec![ident; k],
        cur: [0; MAX_ORDER],
        out: Vec::new(),
    };
    st.dfs(0, 0);
    st.out
}

struct ExtState {
    n: usize,
    inv: Vec<Vec<u8>>,
    head_of: Vec<[u8; MAX_ORDER]>,
    tail_of: Vec<[u8; MAX_ORDER]>,
    cur: [u8; MAX_ORDER],
    out: Vec<OneFactor>,
}

impl ExtState {
    fn dfs(&mut self, i: usize, used: u64) {
        let n = self.n;
        if i == n {
            self.out.push(OneFactor::from_vec_unchecked(self.cur[..n].to_vec()));
            return;
        }
        let last = i + 1 == n;
        let mut undo: [Option<(u8, u8, u8, u8)>; MAX_ORDER] = [None; MAX_ORDER];
        for y in 0..n {
            if used >> y & 1 == 1 {
                continue;
            }
            // the edge i -> g^-1(y) must not close a short cycle
            let mut ok = true;
            let mut done = 0;
            for g in 0..self.inv.len() {
                done = g + 1;
                undo[g] = None;
                let j = self.inv[g][y];
                let h = self.head_of[g][i];
                if h == j {
                    ok = last;
                    if !ok {
                        break;
                    }
                    continue;
                }
                let t = self.tail_of[g][j as usize];
                undo[g] = Some((t, self.head_of[g][t as usize], h, self.tail_of[g][h as usize]));
                self.head_of[g][t as usize] = h;
                self.tail_of[g][h as usize] = t;
            }
            if ok {
                self.cur[i] = y as u8;
                self.dfs(i + 1, used | 1 << y);
            }
            for g in (0..done).rev() {
                if let Some((t, ht, h, th)) = undo[g] {
                    self.head_of[g][t as usize] = ht;
                    self.tail_of[g][h as usize] = th;
                }
            }
        }
    }
}

/// A candidate set `T` for extending some OPF, as indices into a shared
/// arena, with the number of members containing each edge.
#[derive(Clone, Debug)]
pub struct CompatibleSet<'a> {
    n: usize,
    arena: &'a [OneFactor],
    members: Vec<u32>,
    counts: Vec<u32>,
}

impl<'a> CompatibleSet<'a> {
    pub fn new(n: usize, arena: &'a [OneFactor], members: Vec<u32>) -> Self {
        let mut s = Self {
            n,
            arena,
            members,
            counts: Vec::new(),
        };
        s.counts = s.recount();
        s
    }

    /// Every arena member.
    pub fn full(n: usize, arena: &'a [OneFactor]) -> Self {
        Self::new(n, arena, (0..arena.len() as u32).collect())
    }

    /// Edge occurrence counts computed from scratch, indexed `i * n + j`.
    pub fn recount(&self) -> Vec<u32> {
        let n = self.n;
        let mut counts = vec![0u32; n * n];
        for &m in &self.members {
            for (i, &j) in self.arena[m as usize].image().iter().enumerate() {
                counts[i * n + j as usize] += 1;
            }
        }
        counts
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> impl Iterator<Item = &OneFactor> + '_ {
        self.members.iter().map(|&m| &self.arena[m as usize])
    }

    /// Number of members containing the edge `u_i v_j`.
    pub fn count(&self, i: usize, j: usize) -> u32 {
        self.counts[i * self.n + j]
    }

    /// `T*`: the members forming a perfect pair with arena member `m`.
    fn compatible_with(&self, m: u32) -> Self {
        let t = self.arena[m as usize].image();
        let members = self
            .members
            .iter()
            .copied()
            .filter(|&x| x != m && perfect_pair_unchecked(t, self.arena[x as usize].image()))
            .collect();
        Self::new(self.n, self.arena, members)
    }
}

/// Counters of one search run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub nodes: u64,
    pub outputs: u64,
    pub max_depth: usize,
    pub wall: Duration,
}

impl SearchStats {
    pub fn merge(&mut self, other: &SearchStats) {
        self.nodes += other.nodes;
        self.outputs += other.outputs;
        self.max_depth = self.max_depth.max(other.max_depth);
        self.wall += other.wall;
    }
}

/// The uncovered edge in fewest members of `t`, least `(i, j)` on ties.
/// `None` when every edge is covered.
pub fn branching_edge(covered: &[u64], t: &CompatibleSet<'_>) -> Option<(usize, usize, u32)> {
    let n = t.n;
    let mut best: Option<(usize, usize, u32)> = None;
    for (i, &mask) in covered.iter().enumerate() {
        for j in 0..n {
            if mask >> j & 1 == 1 {
                continue;
            }
            let c = t.count(i, j);
            if best.is_none_or(|(_, _, b)| c < b) {
                best = Some((i, j, c));
            }
        }
    }
    best
}

/// Extends `p` by members of `t` in every way that completes it, passing
/// each complete perfect 1-factorisation to `sink`.
pub fn add_factor<F: FnMut(Opf)>(p: &Opf, t: &CompatibleSet<'_>, stats: &mut SearchStats, sink: &mut F) {
    let start = Instant::now();
    let mut factors = p.factors().to_vec();
    let covered = p.covered_masks();
    recurse(p.order(), &mut factors, covered, t, 0, stats, sink);
    stats.wall += start.elapsed();
}

fn recurse<F: FnMut(Opf)>(
    n: usize,
    factors: &mut Vec<OneFactor>,
    covered: Vec<u64>,
    t: &CompatibleSet<'_>,
    depth: usize,
    stats: &mut SearchStats,
    sink: &mut F,
) {
    stats.nodes += 1;
    stats.max_depth = stats.max_depth.max(depth);
    if factors.len() == n {
        stats.outputs += 1;
        sink(Opf::from_parts_unchecked(n, factors.clone()));
        return;
    }
    if t.len() < n - factors.len() {
        return;
    }
    let Some((i, j, c)) = branching_edge(&covered, t) else {
        return;
    };
    if c == 0 {
        return;
    }
    for &m in &t.members {
        let f = &t.arena[m as usize];
        if f.get(i) != j {
            continue;
        }
        let next = t.compatible_with(m);
        let mut cov = covered.clone();
        for (x, &y) in f.image().iter().enumerate() {
            cov[x] |= 1 << y;
        }
        factors.push(f.clone());
        recurse(n, factors, cov, &next, depth + 1, stats, sink);
        factors.pop();
    }
}

/// The initial candidate arena for a seed: every `t` with `seed ∥ t`
/// perfect and minimal.
pub fn seed_candidates(seed: &Opf, tester: &MinimalityTester) -> Vec<OneFactor> {
    filter_candidates(seed, perfect_extensions(seed), tester)
}

/// As [`seed_candidates`], drawing from `pool`, a list of perfect
/// extensions of the seed's first two factors.
pub fn seed_candidates_from(seed: &Opf, pool: &[OneFactor], tester: &MinimalityTester) -> Vec<OneFactor> {
    let rest: Vec<&[u8]> = seed.factors()[2..].iter().map(|f| f.image()).collect();
    let ext = pool
        .iter()
        .filter(|t| rest.iter().all(|g| perfect_pair_unchecked(t.image(), g)))
        .cloned()
        .collect();
    filter_candidates(seed, ext, tester)
}

fn filter_candidates(seed: &Opf, ext: Vec<OneFactor>, tester: &MinimalityTester) -> Vec<OneFactor> {
    let base: Vec<&[u8]> = seed.factors().iter().map(|f| f.image()).collect();
    ext.into_iter()
        .filter(|t| {
            let mut raw = base.clone();
            raw.push(t.image());
            tester.is_minimal_raw(&raw)
        })
        .collect()
}

/// Every complete perfect 1-factorisation the search reaches from `seed`.
pub fn search_seed(seed: &Opf, tester: &MinimalityTester) -> (Vec<Opf>, SearchStats) {
    search_from_arena(seed, seed_candidates(seed, tester))
}

fn search_from_arena(seed: &Opf, arena: Vec<OneFactor>) -> (Vec<Opf>, SearchStats) {
    let t = CompatibleSet::full(seed.order(), &arena);
    let mut out = Vec::new();
    let mut stats = SearchStats::default();
    add_factor(seed, &t, &mut stats, &mut |f| out.push(f));
    (out, stats)
}

/// Per-order context shared by every seed search.
pub struct SeedSearcher {
    tester: MinimalityTester,
    pool: Vec<OneFactor>,
}

impl SeedSearcher {
    pub fn new(n: usize) -> Result<Self> {
        Ok(Self {
            tester: MinimalityTester::for_order(n)?,
            pool: perfect_extensions(&standard_prefix(n)?),
        })
    }

    /// Search and screen from one seed, whose first two factors must be
    /// the standard pair.
    pub fn run(&self, seed: &Opf) -> (Screen, SearchStats) {
        let start = Instant::now();
        let arena = seed_candidates_from(seed, &self.pool, &self.tester);
        let (found, mut stats) = search_from_arena(seed, arena);
        let mut screen = Screen::new();
        for f in found {
            screen.insert(&f);
        }
        stats.wall = start.elapsed();
        (screen, stats)
    }
}

/// One isomorphism class of complete perfect 1-factorisations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassRecord {
    pub digest: String,
    pub representative: Opf,
    pub automorphisms: u128,
    pub direct_automorphisms: u128,
}

/// Digest of the isomorphism class of a (partial) factorisation, with
/// factors unordered and sides interchangeable.
pub fn class_digest(f: &Opf) -> String {
    canonize(&ColouredGraph::from_opf(f, ColourMode::P1f)).form.digest()
}

/// Dedup store keyed by class digest. Keeps the least factor-sorted
/// member seen for each class, so the result does not depend on
/// insertion order.
#[derive(Clone, Debug, Default)]
pub struct Screen {
    classes: BTreeMap<String, Opf>,
}

impl Screen {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns true if the class is new.
    pub fn insert(&mut self, f: &Opf) -> bool {
        self.insert_with_digest(class_digest(f), f.sorted())
    }

    pub fn insert_with_digest(&mut self, digest: String, f: Opf) -> bool {
        let f = f.sorted();
        match self.classes.get_mut(&digest) {
            Some(cur) => {
                if f < *cur {
                    *cur = f;
                }
                false
            }
            None => {
                self.classes.insert(digest, f);
                true
            }
        }
    }

    pub fn merge(&mut self, other: Screen) {
        for (d, f) in other.classes {
            self.insert_with_digest(d, f);
        }
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn digests(&self) -> impl Iterator<Item = &String> {
        self.classes.keys()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&String, &Opf)> {
        self.classes.iter()
    }

    /// Class records sorted by digest, with automorphism group orders.
    pub fn finish(self) -> Vec<ClassRecord> {
        let items: Vec<(String, Opf)> = self.classes.into_iter().collect();
        items
            .into_par_iter()
            .map(|(digest, f)| ClassRecord {
                automorphisms: canonize(&ColouredGraph::from_opf(&f, ColourMode::P1f)).group_order,
                direct_automorphisms: canonize(&ColouredGraph::from_opf(&f, ColourMode::P1fDirect))
                    .group_order,
                digest,
                representative: f,
            })
            .collect()
    }
}

/// Result of a full enumeration.
#[derive(Clone, Debug)]
pub struct Enumeration {
    pub n: usize,
    pub classes: Vec<ClassRecord>,
    pub stats: SearchStats,
}

/// Searches every seed and screens all output into isomorphism classes.
pub fn gen_p1fs(seeds: &SeedSet) -> Result<Enumeration> {
    let n = seeds.order();
    let searcher = SeedSearcher::new(n)?;
    let parts: Vec<(Screen, SearchStats)> = seeds.seeds().par_iter().map(|s| searcher.run(&s.opf)).collect();
    let mut screen = Screen::new();
    let mut stats = SearchStats::default();
    for (s, st) in parts {
        screen.merge(s);
        stats.merge(&st);
    }
    Ok(Enumeration {
        n,
        classes: screen.finish(),
        stats,
    })
}

/// Number of classes for each (direct automorphisms, automorphisms) pair,
/// ordered by group orders.
pub fn automorphism_histogram(classes: &[ClassRecord]) -> Vec<(u128, u128, usize)> {
    let mut h: BTreeMap<(u128, u128), usize> = BTreeMap::new();
    for c in classes {
        *h.entry((c.direct_automorphisms, c.automorphisms)).or_default() += 1;
    }
    h.into_iter().map(|((d, a), k)| (d, a, k)).collect()
}

/// Exhaustive search without seeds or minimality: every set of perfect
/// extensions of the standard pair that completes it, screened.
pub fn naive_classes(n: usize) -> Result<Screen> {
    let prefix = standard_prefix(n)?;
    if n > 9 {
        return Err(Error::OrderTooLarge(n, 9));
    }
    let cands = perfect_extensions(&prefix);
    let need = n - 2;
    let mut screen = Screen::new();
    let mut chosen: Vec<usize> = Vec::new();
    let all: Vec<usize> = (0..cands.len()).collect();
    clique(&cands, &all, need, &mut chosen, &mut |set: &[usize]| {
        let mut fs = prefix.factors().to_vec();
        fs.extend(set.iter().map(|&k| cands[k].clone()));
        screen.insert(&Opf::from_parts_unchecked(n, fs));
    });
    Ok(screen)
}

fn clique<F: FnMut(&[usize])>(
    cands: &[OneFactor],
    avail: &[usize],
    need: usize,
    chosen: &mut Vec<usize>,
    emit: &mut F,
) {
    if chosen.len() == need {
        emit(chosen);
        return;
    }
    if avail.len() < need - chosen.len() {
        return;
    }
    for (k, &a) in avail.iter().enumerate() {
        let next: Vec<usize> = avail[k + 1..]
            .iter()
            .copied()
            .filter(|&b| perfect_pair_unchecked(cands[a].image(), cands[b].image()))
            .collect();
        chosen.push(a);
        clique(cands, &next, need, chosen, emit);
        chosen.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::factor::is_perfect;

    fn brute_extensions(p: &Opf) -> Vec<OneFactor> {
        let n = p.order();
        let mut out = Vec::new();
        let mut perm: Vec<usize> = (0..n).collect();
        loop {
            let f = OneFactor::from_slice(&perm).unwrap();
            if let Ok(q) = p.append(f.clone()) {
                if is_perfect(&q) {
                    out.push(f);
                }
            }
            // next permutation
            let Some(i) = (0..n - 1).rev().find(|&i| perm[i] < perm[i + 1]) else {
                break;
            };
            let j = (i + 1..n).rev().find(|&j| perm[j] > perm[i]).unwrap();
            perm.swap(i, j);
            perm[i + 1..].reverse();
        }
        out
    }

    #[test]
    fn extensions_match_brute_force() {
        for n in [3, 5, 7] {
            let p = standard_prefix(n).unwrap();
            assert_eq!(perfect_extensions(&p), brute_extensions(&p), "n={n}");
            assert_eq!(perfect_extensions(&p.prefix(1)), brute_extensions(&p.prefix(1)));
            assert_eq!(perfect_extensions(&Opf::empty(n)).len(), (1..=n).product::<usize>());
        }
        // the cyclic square of order 7 leaves no room
        let c = crate::latin::LatinSquare::cyclic(7).to_opf();
        assert!(perfect_extensions(&c.prefix(6)).len() == 1);
    }

    #[test]
    fn counts_match_recount() {
        let p = standard_prefix(7).unwrap();
        let arena = perfect_extensions(&p);
        let t = CompatibleSet::full(7, &arena);
        let next = t.compatible_with(0);
        assert_eq!(next.counts, next.recount());
        assert!(next.members().all(|f| f.is_disjoint(&arena[0])));
    }

    #[test]
    fn complete_input_is_emitted() {
        let c = crate::latin::LatinSquare::cyclic(5).to_opf();
        let arena: Vec<OneFactor> = Vec::new();
        let t = CompatibleSet::full(5, &arena);
        let mut got = Vec::new();
        add_factor(&c, &t, &mut SearchStats::default(), &mut |f| got.push(f));
        assert_eq!(got, vec![c.clone()]);
        let mut got = Vec::new();
        add_factor(&c.prefix(3), &t, &mut SearchStats::default(), &mut |f| got.push(f));
        assert!(got.is_empty());
    }

    #[test]
    fn naive_small_counts() {
        assert_eq!(naive_classes(3).unwrap().len(), 1);
        assert_eq!(naive_classes(5).unwrap().len(), 1);
    }
}
