//! Classical constructions: bordered diagonally cyclic squares, the
//! factorisation GA_2p of K_2p, and Latin squares built from a rooted
//! perfect 1-factorisation of a complete graph.

use crate::error::{Error, Result};
use crate::factor::{general_is_perfect, GeneralOneFactorisation};
use crate::latin::LatinSquare;

/// Symbols `Z_m` followed by `b` fixed points `∞_1..∞_b`, encoded as
/// `m..m+b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BorderedIndexSet {
    pub m: usize,
    pub b: usize,
}

impl BorderedIndexSet {
    pub fn len(&self) -> usize {
        self.m + self.b
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn succ(&self, z: usize) -> usize {
        if z < self.m {
            (z + 1) % self.m
        } else {
            z
        }
    }

    pub fn is_infinite(&self, z: usize) -> bool {
        z >= self.m
    }
}

/// Parses a first row such as `0,10,4,inf,...`; `inf`, `∞` and `∞1` name
/// the single bordered symbol. Returns the symbols with `∞` encoded as `m`.
pub fn parse_first_row(s: &str) -> Result<(Vec<usize>, BorderedIndexSet)> {
    let toks: Vec<&str> = s
        .split(|c: char| c == ',' || c.is_whitespace())
        .map(|t| t.trim_matches(|c| c == '(' || c == ')'))
        .filter(|t| !t.is_empty())
        .collect();
    let b = toks
        .iter()
        .filter(|t| matches!(**t, "inf" | "∞" | "∞1" | "∞₁" | "inf1"))
        .count();
    let m = toks.len() - b;
    let mut row = Vec::with_capacity(toks.len());
    for t in toks {
        if matches!(t, "inf" | "∞" | "∞1" | "∞₁" | "inf1") {
            row.push(m);
        } else {
            let z: usize = t
                .parse()
                .map_err(|_| Error::BadFirstRow(format!("bad symbol {t:?}")))?;
            row.push(z);
        }
    }
    Ok((row, BorderedIndexSet { m, b }))
}

/// The bordered diagonally cyclic Latin square with the given first row.
///
/// Rows and columns are indexed `0..m` then `∞`; `first_row[j]` is the
/// symbol in row 0, column `j`.
pub fn bdcls_from_first_row(first_row: &[usize], set: BorderedIndexSet) -> Result<LatinSquare> {
    let (m, b) = (set.m, set.b);
    if b > 1 {
        return Err(Error::BadFirstRow(format!(
            "{b} bordered symbols; at most one is supported"
        )));
    }
    let n = m + b;
    if m == 0 || first_row.len() != n {
        return Err(Error::BadFirstRow(format!(
            "expected {n} symbols, got {}",
            first_row.len()
        )));
    }
    let mut seen = vec![false; n];
    for &z in first_row {
        if z >= n || std::mem::replace(&mut seen[z], true) {
            return Err(Error::BadFirstRow(format!("{z} repeated or out of range")));
        }
    }
    let shift = |z: usize, k: usize| if z < m { (z + k) % m } else { z };
    let mut rows = vec![vec![usize::MAX; n]; n];
    for i in 0..m {
        for j in 0..n {
            rows[i][shift(j, i)] = shift(first_row[j], i);
        }
    }
    if b == 1 {
        // row ∞ holds, in each finite column, the symbol that column lacks
        for j in 0..m {
            let mut present = vec![false; n];
            for row in rows.iter().take(m) {
                present[row[j]] = true;
            }
            let missing: Vec<usize> = (0..n).filter(|&z| !present[z]).collect();
            if missing.len() != 1 {
                return Err(Error::BadFirstRow(format!("column {j} repeats a symbol")));
            }
            rows[m][j] = missing[0];
        }
        rows[m][m] = m;
    }
    let l = LatinSquare::from_rows(&rows).map_err(|e| Error::BadFirstRow(e.to_string()))?;
    debug_assert!(is_bdcls(&l, set));
    Ok(l)
}

/// True iff every entry `(i, j, k)` has `(i⁺, j⁺, k⁺)` as an entry.
pub fn is_bdcls(l: &LatinSquare, set: BorderedIndexSet) -> bool {
    l.order() == set.len()
        && l.entries()
            .all(|[i, j, k]| l.get(set.succ(i), set.succ(j)) == set.succ(k))
}

pub fn is_odd_prime(p: usize) -> bool {
    p >= 3 && p % 2 == 1 && (3..).step_by(2).take_while(|d| d * d <= p).all(|d| p % d != 0)
}

/// Vertex `(x, part)` of `Z_p × {1, 2}`, numbered `(part - 1) p + x`.
pub fn ga_vertex(p: usize, x: i64, part: usize) -> usize {
    (part - 1) * p + x.rem_euclid(p as i64) as usize
}

/// `GA_2p`: factors `f_0..f_{p-1}` then `g_1..g_{p-1}`.
pub fn ga_factorisation(p: usize) -> Result<GeneralOneFactorisation> {
    if !is_odd_prime(p) {
        return Err(Error::NotOddPrime(p));
    }
    let pi = p as i64;
    let mut factors = Vec::with_capacity(2 * p - 1);
    for i in 0..pi {
        let mut f = vec![(ga_vertex(p, i, 1), ga_vertex(p, i, 2))];
        for j in 1..=(pi - 1) / 2 {
            for part in [1, 2] {
                f.push((ga_vertex(p, i + j, part), ga_vertex(p, i - j, part)));
            }
        }
        factors.push(f);
    }
    for i in 1..pi {
        factors.push((0..pi).map(|j| (ga_vertex(p, j, 1), ga_vertex(p, i + j, 2))).collect());
    }
    GeneralOneFactorisation::new(2 * p, factors)
}

/// `L(F, v)`: indices are the vertices other than `root`, in increasing
/// order. `L[i][i] = i`; otherwise `L[i][j]` is the vertex joined to `root`
/// in the factor through `ij`.
pub fn root_square(f: &GeneralOneFactorisation, root: usize) -> Result<LatinSquare> {
    let nv = f.vertex_count();
    if root >= nv {
        return Err(Error::NotFactorisation {
            vertices: nv,
            detail: format!("root {root} is not a vertex"),
        });
    }
    if !general_is_perfect(f)? {
        return Err(Error::NotPerfect);
    }
    let idx = |w: usize| if w < root { w } else { w - 1 };
    let others: Vec<usize> = (0..nv).filter(|&w| w != root).collect();
    let mates: Vec<Vec<usize>> = (0..f.factors().len()).map(|k| f.mates(k)).collect();
    let mut rows = vec![vec![0usize; nv - 1]; nv - 1];
    for &i in &others {
        for &j in &others {
            rows[idx(i)][idx(j)] = if i == j {
                idx(i)
            } else {
                let k = f.factor_of(i, j).expect("complete factorisation");
                idx(mates[k][root])
            };
        }
    }
    LatinSquare::from_rows(&rows)
}

/// The explicit form of `L(GA_2p, (-1, 2))`, on indices `(x, z)` numbered
/// as in [`ga_vertex`] (the root is the last vertex, so removing it leaves
/// the numbering unchanged).
pub fn l_p_square(p: usize) -> Result<LatinSquare> {
    if !is_odd_prime(p) {
        return Err(Error::NotOddPrime(p));
    }
    let pi = p as i64;
    let cells: Vec<(i64, usize)> = (1..=2)
        .flat_map(|z| (0..pi).map(move |x| (x, z)))
        .filter(|&(x, z)| !(z == 2 && x == pi - 1))
        .collect();
    let v = |x: i64, z: usize| ga_vertex(p, x, z);
    let mut rows = vec![vec![0usize; 2 * p - 1]; 2 * p - 1];
    for &(x, z) in &cells {
        for &(y, w) in &cells {
            let sym = if (x, z) == (y, w) {
                v(x, z)
            } else if z == w {
                if (x + y + 2).rem_euclid(pi) != 0 {
                    v(x + y + 1, 2)
                } else {
                    v(-1, 1)
                }
            } else if x == y {
                v(2 * x + 1, 2)
            } else if z == 1 {
                v(x - y - 1, 1)
            } else {
                v(y - x - 1, 1)
            };
            rows[v(x, z)][v(y, w)] = sym;
        }
    }
    LatinSquare::from_rows(&rows)
}

/// The ten entries, as `((x, z), (y, w), (s, t))`, that form a row cycle of
/// length 5 in `l_p_square(p)` for `p >= 5`.
pub const GA_TEN_TRIPLES: [[(i64, usize); 3]; 10] = [
    [(0, 1), (0, 1), (0, 1)],
    [(0, 1), (0, 2), (1, 2)],
    [(0, 1), (-1, 1), (0, 2)],
    [(0, 1), (1, 2), (-2, 1)],
    [(0, 1), (1, 1), (2, 2)],
    [(0, 2), (0, 1), (1, 2)],
    [(0, 2), (0, 2), (0, 2)],
    [(0, 2), (-1, 1), (-2, 1)],
    [(0, 2), (1, 2), (2, 2)],
    [(0, 2), (1, 1), (0, 1)],
];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GaReport {
    pub p: usize,
    pub perfect: bool,
    pub nu: usize,
    pub expected_nu: usize,
    /// `l_p_square(p)` equals the root square of `GA_2p` at `(-1, 2)`.
    pub explicit_form_matches: bool,
    /// For `p >= 5`: the ten triples are entries and form a row cycle of
    /// length 5.
    pub short_row_cycle: Option<bool>,
}

impl GaReport {
    pub fn holds(&self) -> bool {
        self.perfect
            && self.nu == self.expected_nu
            && self.explicit_form_matches
            && self.short_row_cycle.unwrap_or(true)
    }
}

/// True iff the triples are entries of `l` and their cells form a single
/// row cycle of length `triples.len() / 2` between two rows.
pub fn is_row_cycle(l: &LatinSquare, triples: &[[usize; 3]]) -> bool {
    if !triples.iter().all(|&e| l.contains(e)) {
        return false;
    }
    let mut rows: Vec<usize> = triples.iter().map(|e| e[0]).collect();
    rows.sort_unstable();
    rows.dedup();
    let [r, s] = rows[..] else {
        return false;
    };
    let cols = |row: usize| -> Vec<usize> {
        let mut c: Vec<usize> = triples.iter().filter(|e| e[0] == row).map(|e| e[1]).collect();
        c.sort_unstable();
        c
    };
    let cs = cols(r);
    if cs != cols(s) || cs.len() * 2 != triples.len() {
        return false;
    }
    // walk r -> s within the chosen columns
    let col_in_r = |sym: usize| cs.iter().copied().find(|&c| l.get(r, c) == sym);
    let mut c = cs[0];
    for step in 1..=cs.len() {
        match col_in_r(l.get(s, c)) {
            Some(next) => c = next,
            None => return false,
        }
        if c == cs[0] {
            return step == cs.len();
        }
    }
    false
}

pub fn verify_ga_theorem(p: usize) -> Result<GaReport> {
    let ga = ga_factorisation(p)?;
    let perfect = general_is_perfect(&ga)?;
    let root = ga_vertex(p, -1, 2);
    let lp = l_p_square(p)?;
    let explicit_form_matches = perfect && root_square(&ga, root)? == lp;
    let short_row_cycle = (p >= 5).then(|| {
        let triples: Vec<[usize; 3]> = GA_TEN_TRIPLES
            .iter()
            .map(|t| t.map(|(x, z)| ga_vertex(p, x, z)))
            .collect();
        is_row_cycle(&lp, &triples)
    });
    Ok(GaReport {
        p,
        perfect,
        nu: lp.nu(),
        expected_nu: if p == 3 { 6 } else { 2 },
        explicit_form_matches,
        short_row_cycle,
    })
}

/// First rows of the four order-11 bordered diagonally cyclic squares
/// with `ν = 4`.
pub const NU4_FIRST_ROWS: [&str; 4] = [
    "0,10,4,8,7,6,1,3,5,2,9",
    "0,2,6,8,7,inf,3,5,4,1,9",
    "0,3,7,9,8,inf,4,6,5,2,1",
    "inf,1,9,7,5,3,8,6,4,2,0",
];

/// First row of the order-11 diagonally cyclic square with autotopism
/// group of order 22.
pub const DCLS22_FIRST_ROW: &str = "0,2,8,5,7,1,10,4,6,3,9";

pub fn bdcls_from_str(first_row: &str) -> Result<LatinSquare> {
    let (row, set) = parse_first_row(first_row)?;
    bdcls_from_first_row(&row, set)
}

/// Eight symmetric row-Hamiltonian squares of order 11 with `ν = 4`,
/// trivial autotopism group and autoparatopism group of order 2.
pub fn symmetric_nu4_squares() -> Vec<LatinSquare> {
    LatinSquare::parse_many(include_str!("../fixtures/symmetric_nu4.txt"))
        .expect("bundled fixture parses")
}

/// A row-Hamiltonian square of order 11 with dihedral autotopism group of
/// order 10.
pub fn dihedral10_square() -> LatinSquare {
    include_str!("../fixtures/dihedral10.txt")
        .parse()
        .expect("bundled fixture parses")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primes() {
        let got: Vec<usize> = (0..40).filter(|&p| is_odd_prime(p)).collect();
        assert_eq!(got, vec![3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37]);
    }

    #[test]
    fn cyclic_first_row() {
        // L[i][j] = 2j - i
        let l = bdcls_from_str("0,2,1").unwrap();
        assert!(l.is_isotopic(&LatinSquare::cyclic(3)));
        // the identity row cannot be closed diagonally
        assert!(bdcls_from_str("0,1,2").is_err());
    }

    #[test]
    fn bad_first_rows() {
        assert!(bdcls_from_str("0,1,1").is_err());
        assert!(bdcls_from_str("0,inf,inf,1").is_err());
        assert!(bdcls_from_str("0,1,2,3").is_err());
        assert!(bdcls_from_str("0,x,1").is_err());
    }

    #[test]
    fn ga_shape() {
        for p in [3, 5, 7] {
            let ga = ga_factorisation(p).unwrap();
            assert_eq!(ga.factors().len(), 2 * p - 1);
            assert!(ga.factors().iter().all(|f| f.len() == p));
            assert!(general_is_perfect(&ga).unwrap());
        }
        assert_eq!(ga_factorisation(4).unwrap_err(), Error::NotOddPrime(4));
        assert!(ga_factorisation(9).is_err());
    }

    #[test]
    fn l3_is_root_square() {
        let ga = ga_factorisation(3).unwrap();
        let l = root_square(&ga, ga_vertex(3, -1, 2)).unwrap();
        assert_eq!(l, l_p_square(3).unwrap());
        assert!(l.is_symmetric());
        for i in 0..5 {
            assert_eq!(l.get(i, i), i);
        }
    }

    #[test]
    fn fixtures_load() {
        assert_eq!(symmetric_nu4_squares().len(), 8);
        assert_eq!(dihedral10_square().order(), 11);
    }
}
