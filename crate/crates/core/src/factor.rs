//! 1-factors of `K_{n,n}`, ordered partial 1-factorisations, and
//! 1-factorisations of complete graphs `K_{2m}`.
//!
//! A 1-factor of `K_{n,n}` is stored as the permutation `image` with
//! `image[i] = j` meaning the edge `u_i v_j`. Indices are 0-based in memory
//! and 1-based in the text formats.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Largest supported order. Edge sets are kept in `u64` row masks.
pub const MAX_ORDER: usize = 64;

/// A perfect matching of `K_{n,n}`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OneFactor {
    image: Vec<u8>,
}

impl OneFactor {
    pub fn new(image: Vec<u8>) -> Result<Self> {
        let n = image.len();
        if n > MAX_ORDER {
            return Err(Error::OrderTooLarge(n, MAX_ORDER));
        }
        let mut seen = 0u64;
        for &x in &image {
            let x = x as usize;
            if x >= n || seen & (1 << x) != 0 {
                return Err(Error::NotPermutation {
                    n,
                    detail: format!("{image:?}"),
                });
            }
            seen |= 1 << x;
        }
        Ok(Self { image })
    }

    /// Builds a factor from usize images, validating as [`OneFactor::new`].
    pub fn from_slice(image: &[usize]) -> Result<Self> {
        if image.len() > MAX_ORDER || image.iter().any(|&x| x >= MAX_ORDER) {
            return Err(Error::OrderTooLarge(image.len(), MAX_ORDER));
        }
        Self::new(image.iter().map(|&x| x as u8).collect())
    }

    pub(crate) fn from_vec_unchecked(image: Vec<u8>) -> Self {
        debug_assert!(Self::new(image.clone()).is_ok());
        Self { image }
    }

    pub fn identity(n: usize) -> Self {
        Self::shift(n, 0)
    }

    /// The factor `u_i v_{i+k mod n}`.
    pub fn shift(n: usize, k: usize) -> Self {
        Self {
            image: (0..n).map(|i| ((i + k) % n) as u8).collect(),
        }
    }

    pub fn order(&self) -> usize {
        self.image.len()
    }

    pub fn image(&self) -> &[u8] {
        &self.image
    }

    #[inline]
    pub fn get(&self, i: usize) -> usize {
        self.image[i] as usize
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0u8; self.image.len()];
        for (i, &j) in self.image.iter().enumerate() {
            inv[j as usize] = i as u8;
        }
        Self { image: inv }
    }

    pub fn is_disjoint(&self, other: &OneFactor) -> bool {
        self.image.len() == other.image.len()
            && self.image.iter().zip(&other.image).all(|(a, b)| a != b)
    }

    pub fn contains_edge(&self, u: usize, v: usize) -> bool {
        self.image[u] as usize == v
    }
}

impl fmt::Debug for OneFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "OneFactor{:?}", self.image)
    }
}

/// Writes the 1-based image line.
impl fmt::Display for OneFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, &x) in self.image.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{}", x as usize + 1)?;
        }
        Ok(())
    }
}

impl FromStr for OneFactor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut image = Vec::new();
        for tok in s.split_whitespace() {
            let x: usize = tok.parse().map_err(|_| Error::Parse {
                line: 0,
                msg: format!("bad integer {tok:?}"),
            })?;
            if x == 0 || x > MAX_ORDER {
                return Err(Error::Parse {
                    line: 0,
                    msg: format!("vertex index {x} out of range"),
                });
            }
            image.push((x - 1) as u8);
        }
        Self::new(image)
    }
}

fn check_pair(f: &OneFactor, g: &OneFactor) -> Result<()> {
    if f.order() != g.order() {
        return Err(Error::OrderMismatch(f.order(), g.order()));
    }
    if let Some(i) = (0..f.order()).find(|&i| f.image[i] == g.image[i]) {
        return Err(Error::SharedEdge(i + 1));
    }
    Ok(())
}

/// Cycle lengths of the 2-regular graph `f ∪ g`, in decreasing order.
pub fn union_cycle_lengths(f: &OneFactor, g: &OneFactor) -> Result<Vec<usize>> {
    check_pair(f, g)?;
    let n = f.order();
    let g_inv = g.inverse();
    let mut seen = vec![false; n];
    let mut lengths = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            len += 1;
            i = g_inv.get(f.get(i));
        }
        lengths.push(2 * len);
    }
    lengths.sort_unstable_by(|a, b| b.cmp(a));
    Ok(lengths)
}

/// True iff `f ∪ g` is a Hamiltonian cycle of `K_{n,n}`.
pub fn is_perfect_pair(f: &OneFactor, g: &OneFactor) -> Result<bool> {
    check_pair(f, g)?;
    Ok(perfect_pair_unchecked(f.image(), g.image()))
}

/// Single-cycle test on raw images, assuming equal order and disjointness.
/// Walks the cycle through `u_0` and exits as soon as it closes.
#[inline]
pub(crate) fn perfect_pair_unchecked(f: &[u8], g: &[u8]) -> bool {
    let n = f.len();
    let mut g_inv = [0u8; MAX_ORDER];
    for (i, &j) in g.iter().enumerate() {
        g_inv[j as usize] = i as u8;
    }
    let mut i = 0usize;
    for step in 1..=n {
        i = g_inv[f[i] as usize] as usize;
        if i == 0 {
            return step == n;
        }
    }
    false
}

/// An ordered list of pairwise edge-disjoint 1-factors of `K_{n,n}`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Opf {
    n: usize,
    factors: Vec<OneFactor>,
}

impl Opf {
    pub fn empty(n: usize) -> Self {
        Self {
            n,
            factors: Vec::new(),
        }
    }

    pub fn new(n: usize, factors: Vec<OneFactor>) -> Result<Self> {
        if n > MAX_ORDER {
            return Err(Error::OrderTooLarge(n, MAX_ORDER));
        }
        if factors.len() > n {
            return Err(Error::Length {
                got: factors.len(),
                need: n,
            });
        }
        for (k, f) in factors.iter().enumerate() {
            if f.order() != n {
                return Err(Error::OrderMismatch(n, f.order()));
            }
            for g in &factors[..k] {
                check_pair(f, g)?;
            }
        }
        Ok(Self { n, factors })
    }

    pub(crate) fn from_parts_unchecked(n: usize, factors: Vec<OneFactor>) -> Self {
        debug_assert!(Self::new(n, factors.clone()).is_ok());
        Self { n, factors }
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn is_complete(&self) -> bool {
        self.factors.len() == self.n
    }

    pub fn factors(&self) -> &[OneFactor] {
        &self.factors
    }

    pub fn factor(&self, k: usize) -> &OneFactor {
        &self.factors[k]
    }

    /// `self ∥ f`.
    pub fn append(&self, f: OneFactor) -> Result<Self> {
        let mut factors = self.factors.clone();
        factors.push(f);
        Self::new(self.n, factors)
    }

    /// The first `i` factors.
    pub fn prefix(&self, i: usize) -> Self {
        Self {
            n: self.n,
            factors: self.factors[..i.min(self.factors.len())].to_vec(),
        }
    }

    /// Same factors in lexicographic order of their images.
    pub fn sorted(&self) -> Self {
        let mut factors = self.factors.clone();
        factors.sort();
        Self { n: self.n, factors }
    }

    /// Applies `map` to every factor, keeping positions.
    pub fn relabel(&self, map: &VertexMap) -> Self {
        Self {
            n: self.n,
            factors: self.factors.iter().map(|f| map.apply(f)).collect(),
        }
    }

    /// Reorders factors: position `k` of the result holds `self[order[k]]`.
    pub fn reorder(&self, order: &[usize]) -> Self {
        Self {
            n: self.n,
            factors: order.iter().map(|&k| self.factors[k].clone()).collect(),
        }
    }

    /// `u` rows already covered by some factor, as bit masks over `v`.
    pub fn covered_masks(&self) -> Vec<u64> {
        let mut masks = vec![0u64; self.n];
        for f in &self.factors {
            for (i, &j) in f.image.iter().enumerate() {
                masks[i] |= 1 << j;
            }
        }
        masks
    }
}

impl fmt::Debug for Opf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Opf")
            .field("n", &self.n)
            .field("factors", &self.factors)
            .finish()
    }
}

/// Header `n a` followed by one 1-based factor per line.
impl fmt::Display for Opf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} {}", self.n, self.factors.len())?;
        for factor in &self.factors {
            writeln!(f, "{factor}")?;
        }
        Ok(())
    }
}

impl FromStr for Opf {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut lines = s
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'));
        let (hline, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            msg: "missing header".into(),
        })?;
        let (n, a) = parse_header(header).ok_or_else(|| Error::Parse {
            line: hline + 1,
            msg: format!("bad header {header:?}"),
        })?;
        let mut factors = Vec::with_capacity(a);
        for _ in 0..a {
            let (ln, line) = lines.next().ok_or(Error::Parse {
                line: hline + 1,
                msg: format!("expected {a} factor lines"),
            })?;
            let f: OneFactor = line.parse().map_err(|e: Error| Error::Parse {
                line: ln + 1,
                msg: e.to_string(),
            })?;
            factors.push(f);
        }
        if let Some((ln, _)) = lines.next() {
            return Err(Error::Parse {
                line: ln + 1,
                msg: "trailing data".into(),
            });
        }
        Opf::new(n, factors)
    }
}

impl Opf {
    /// Parses consecutive records, each a header followed by its factor
    /// lines. Blank lines and `#` comments between records are skipped.
    pub fn parse_many(s: &str) -> Result<Vec<Opf>> {
        let mut lines = s
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'));
        let mut out = Vec::new();
        while let Some((hline, header)) = lines.next() {
            let (n, a) = parse_header(header).ok_or_else(|| Error::Parse {
                line: hline + 1,
                msg: format!("bad header {header:?}"),
            })?;
            let mut factors = Vec::with_capacity(a);
            for _ in 0..a {
                let (ln, line) = lines.next().ok_or(Error::Parse {
                    line: hline + 1,
                    msg: format!("expected {a} factor lines"),
                })?;
                let f: OneFactor = line.parse().map_err(|e: Error| Error::Parse {
                    line: ln + 1,
                    msg: e.to_string(),
                })?;
                factors.push(f);
            }
            out.push(Opf::new(n, factors).map_err(|e| Error::Parse {
                line: hline + 1,
                msg: e.to_string(),
            })?);
        }
        Ok(out)
    }
}

pub(crate) fn parse_header(line: &str) -> Option<(usize, usize)> {
    let mut it = line.split_whitespace().map(|t| t.parse::<usize>());
    let n = it.next()?.ok()?;
    let a = it.next()?.ok()?;
    it.next().is_none().then_some((n, a))
}

/// True iff every pair of factors is perfect (vacuous for fewer than two).
pub fn is_perfect(p: &Opf) -> bool {
    let fs = p.factors();
    (0..fs.len()).all(|i| (0..i).all(|j| perfect_pair_unchecked(fs[i].image(), fs[j].image())))
}

/// `[f_1, f_2]` with `f_1` the identity and `f_2` the shift by one.
pub fn standard_prefix(n: usize) -> Result<Opf> {
    if n < 3 || n % 2 == 0 {
        return Err(Error::BadOrder(n, 3));
    }
    if n > MAX_ORDER {
        return Err(Error::OrderTooLarge(n, MAX_ORDER));
    }
    Ok(Opf {
        n,
        factors: vec![OneFactor::identity(n), OneFactor::shift(n, 1)],
    })
}

/// A permutation of the vertices of `K_{n,n}`, possibly exchanging sides.
///
/// Direct (`swap == false`): `u_i -> u_{u[i]}` and `v_j -> v_{v[j]}`.
/// Indirect (`swap == true`): `u_i -> v_{u[i]}` and `v_j -> u_{v[j]}`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct VertexMap {
    pub swap: bool,
    pub u: Vec<u8>,
    pub v: Vec<u8>,
}

impl VertexMap {
    pub fn identity(n: usize) -> Self {
        let id: Vec<u8> = (0..n as u8).collect();
        Self {
            swap: false,
            u: id.clone(),
            v: id,
        }
    }

    pub fn order(&self) -> usize {
        self.u.len()
    }

    /// Image of a factor.
    pub fn apply(&self, f: &OneFactor) -> OneFactor {
        let n = f.order();
        let mut out = vec![0u8; n];
        if self.swap {
            for i in 0..n {
                out[self.v[f.get(i)] as usize] = self.u[i];
            }
        } else {
            for i in 0..n {
                out[self.u[i] as usize] = self.v[f.get(i)];
            }
        }
        OneFactor::from_vec_unchecked(out)
    }

    /// As a permutation of `0..2n` with `u_i = i` and `v_j = n + j`.
    pub fn to_vertex_perm(&self) -> Vec<usize> {
        let n = self.order();
        let (uo, vo) = if self.swap { (n, 0) } else { (0, n) };
        let mut p = Vec::with_capacity(2 * n);
        p.extend(self.u.iter().map(|&x| x as usize + uo));
        p.extend(self.v.iter().map(|&x| x as usize + vo));
        p
    }

    /// Inverse of [`VertexMap::to_vertex_perm`]; `None` if `perm` does not
    /// respect the bipartition.
    pub fn from_vertex_perm(perm: &[usize]) -> Option<Self> {
        let n = perm.len() / 2;
        if perm.len() != 2 * n {
            return None;
        }
        let swap = perm[0] >= n;
        let mut u = Vec::with_capacity(n);
        let mut v = Vec::with_capacity(n);
        for &x in &perm[..n] {
            if (x >= n) != swap {
                return None;
            }
            u.push((x % n) as u8);
        }
        for &x in &perm[n..] {
            if (x < n) != swap {
                return None;
            }
            v.push((x % n) as u8);
        }
        Some(Self { swap, u, v })
    }

    /// `other ∘ self`: apply `self` first.
    pub fn then(&self, other: &VertexMap) -> Self {
        let a = self.to_vertex_perm();
        let b = other.to_vertex_perm();
        let c: Vec<usize> = a.iter().map(|&x| b[x]).collect();
        Self::from_vertex_perm(&c).expect("composition of bipartite maps")
    }

    pub fn inverse(&self) -> Self {
        let a = self.to_vertex_perm();
        let mut inv = vec![0usize; a.len()];
        for (i, &x) in a.iter().enumerate() {
            inv[x] = i;
        }
        Self::from_vertex_perm(&inv).expect("inverse of bipartite map")
    }
}

/// A 1-factorisation candidate of the complete graph `K_{2m}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneralOneFactorisation {
    vertices: usize,
    factors: Vec<Vec<(usize, usize)>>,
}

impl GeneralOneFactorisation {
    /// Validates that every factor is a perfect matching of `0..vertices`.
    pub fn new(vertices: usize, factors: Vec<Vec<(usize, usize)>>) -> Result<Self> {
        let bad = |detail: String| Error::NotFactorisation { vertices, detail };
        if vertices == 0 || vertices % 2 != 0 {
            return Err(bad("vertex count must be even and positive".into()));
        }
        for (k, f) in factors.iter().enumerate() {
            let mut seen = vec![false; vertices];
            for &(a, b) in f {
                if a >= vertices || b >= vertices || a == b || seen[a] || seen[b] {
                    return Err(bad(format!("factor {k} is not a matching")));
                }
                seen[a] = true;
                seen[b] = true;
            }
            if seen.iter().any(|s| !s) {
                return Err(bad(format!("factor {k} does not cover every vertex")));
            }
        }
        Ok(Self { vertices, factors })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices
    }

    pub fn factors(&self) -> &[Vec<(usize, usize)>] {
        &self.factors
    }

    /// Partner of every vertex in factor `k`.
    pub fn mates(&self, k: usize) -> Vec<usize> {
        let mut m = vec![0; self.vertices];
        for &(a, b) in &self.factors[k] {
            m[a] = b;
            m[b] = a;
        }
        m
    }

    /// Index of the factor containing edge `ab`.
    pub fn factor_of(&self, a: usize, b: usize) -> Option<usize> {
        self.factors
            .iter()
            .position(|f| f.iter().any(|&(x, y)| (x, y) == (a, b) || (x, y) == (b, a)))
    }

    /// Checks that the factors partition the edge set of `K_{2m}`.
    pub fn check_partition(&self) -> Result<()> {
        let v = self.vertices;
        if self.factors.len() != v - 1 {
            return Err(Error::NotFactorisation {
                vertices: v,
                detail: format!("{} factors, expected {}", self.factors.len(), v - 1),
            });
        }
        let mut seen = vec![false; v * v];
        for f in &self.factors {
            for &(a, b) in f {
                let (a, b) = (a.min(b), a.max(b));
                if seen[a * v + b] {
                    return Err(Error::NotFactorisation {
                        vertices: v,
                        detail: format!("edge {a}-{b} repeated"),
                    });
                }
                seen[a * v + b] = true;
            }
        }
        Ok(())
    }
}

/// True iff every two factors form a Hamiltonian cycle. Rejects inputs whose
/// factors do not partition the edges of `K_{2m}`.
pub fn general_is_perfect(f: &GeneralOneFactorisation) -> Result<bool> {
    f.check_partition()?;
    let v = f.vertex_count();
    let mates: Vec<Vec<usize>> = (0..f.factors().len()).map(|k| f.mates(k)).collect();
    for i in 0..mates.len() {
        for j in 0..i {
            // alternate i, j edges starting at vertex 0
            let mut x = 0;
            let mut len = 0;
            loop {
                x = mates[j][mates[i][x]];
                len += 2;
                if x == 0 {
                    break;
                }
            }
            if len != v {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn of(v: &[usize]) -> OneFactor {
        OneFactor::from_slice(v).unwrap()
    }

    #[test]
    fn cycle_lengths_small_examples() {
        assert_eq!(
            union_cycle_lengths(&of(&[0, 1, 2, 3]), &of(&[1, 0, 3, 2])).unwrap(),
            vec![4, 4]
        );
        assert_eq!(
            union_cycle_lengths(&of(&[0, 1, 2, 3, 4]), &of(&[1, 2, 0, 4, 3])).unwrap(),
            vec![6, 4]
        );
        let p = standard_prefix(11).unwrap();
        assert_eq!(union_cycle_lengths(p.factor(0), p.factor(1)).unwrap(), vec![22]);
    }

    #[test]
    fn perfect_pair_examples_and_errors() {
        let p = standard_prefix(11).unwrap();
        assert!(is_perfect_pair(p.factor(0), p.factor(1)).unwrap());
        assert!(!is_perfect_pair(&of(&[0, 1, 2, 3]), &of(&[1, 0, 3, 2])).unwrap());
        let id = OneFactor::identity(5);
        assert_eq!(is_perfect_pair(&id, &id), Err(Error::SharedEdge(1)));
        assert!(matches!(
            is_perfect_pair(&id, &OneFactor::shift(7, 1)),
            Err(Error::OrderMismatch(5, 7))
        ));
    }

    #[test]
    fn opf_perfection() {
        assert!(is_perfect(&standard_prefix(11).unwrap()));
        assert!(is_perfect(&Opf::empty(4)));
        let p = Opf::new(4, vec![of(&[0, 1, 2, 3]), of(&[1, 0, 3, 2])]).unwrap();
        assert!(!is_perfect(&p));
    }

    #[test]
    fn standard_prefix_shapes() {
        let p = standard_prefix(5).unwrap();
        assert_eq!(p.factor(0).image(), &[0, 1, 2, 3, 4]);
        assert_eq!(p.factor(1).image(), &[1, 2, 3, 4, 0]);
        let p = standard_prefix(3).unwrap();
        assert_eq!(p.factor(1).image(), &[1, 2, 0]);
        assert_eq!(standard_prefix(6), Err(Error::BadOrder(6, 3)));
    }

    #[test]
    fn opf_rejects_shared_edges() {
        assert!(Opf::new(3, vec![of(&[0, 1, 2]), of(&[0, 2, 1])]).is_err());
        assert!(OneFactor::from_slice(&[0, 0, 1]).is_err());
    }

    #[test]
    fn text_round_trip() {
        let p = standard_prefix(5).unwrap();
        let s = p.to_string();
        assert_eq!(s, "5 2\n1 2 3 4 5\n2 3 4 5 1\n");
        assert_eq!(s.parse::<Opf>().unwrap(), p);
        assert!("5 2\n1 2 3 4 5\n".parse::<Opf>().is_err());
        assert!("5 1\n1 2 3 4 0\n".parse::<Opf>().is_err());
    }

    #[test]
    fn vertex_map_composition() {
        let m = VertexMap {
            swap: true,
            u: vec![2, 0, 1],
            v: vec![1, 2, 0],
        };
        let f = of(&[1, 2, 0]);
        let id = VertexMap::identity(3);
        assert_eq!(m.then(&m.inverse()), id);
        assert_eq!(m.inverse().apply(&m.apply(&f)), f);
        assert_eq!(m.then(&m).apply(&f), m.apply(&m.apply(&f)));
    }

    #[test]
    fn k4_and_k8_factorisations() {
        let k4 = GeneralOneFactorisation::new(
            4,
            vec![vec![(0, 1), (2, 3)], vec![(0, 2), (1, 3)], vec![(0, 3), (1, 2)]],
        )
        .unwrap();
        assert!(general_is_perfect(&k4).unwrap());

        // F_a = {x, x ^ a}: any two factors close 4-cycles
        let k8 = GeneralOneFactorisation::new(
            8,
            (1..8)
                .map(|a| (0..8).filter(|&x| x < x ^ a).map(|x| (x, x ^ a)).collect())
                .collect(),
        )
        .unwrap();
        assert!(!general_is_perfect(&k8).unwrap());

        let partial = GeneralOneFactorisation::new(4, vec![vec![(0, 1), (2, 3)]]).unwrap();
        assert!(general_is_perfect(&partial).is_err());
    }
}
