//! Latin squares, conjugates, row cycles and species invariants.

use std::fmt;
use std::str::FromStr;

use crate::canon::{automorphism_group_order, latin_form, ColourMode, ColouredGraph};
use crate::error::{Error, Result};
use crate::factor::{OneFactor, Opf, MAX_ORDER};

/// Latin square with rows, columns and symbols in `0..n`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatinSquare {
    n: usize,
    grid: Vec<u8>,
}

/// A role arrangement of (row, column, symbol), written in one-line
/// notation: conjugate `abc` puts coordinate `a` of each entry first, `b`
/// second and `c` third.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Conjugate([u8; 3]);

impl Conjugate {
    pub const ALL: [Conjugate; 6] = [
        Conjugate([0, 1, 2]),
        Conjugate([0, 2, 1]),
        Conjugate([1, 0, 2]),
        Conjugate([1, 2, 0]),
        Conjugate([2, 0, 1]),
        Conjugate([2, 1, 0]),
    ];
    pub const IDENTITY: Conjugate = Conjugate([0, 1, 2]);
    pub const ROW_INVERSE: Conjugate = Conjugate([0, 2, 1]);
    pub const TRANSPOSE: Conjugate = Conjugate([1, 0, 2]);

    pub fn inverse(self) -> Self {
        let mut out = [0u8; 3];
        for (k, &x) in self.0.iter().enumerate() {
            out[x as usize] = k as u8;
        }
        Conjugate(out)
    }

    pub fn label(self) -> String {
        self.0.iter().map(|&x| char::from(b'1' + x)).collect()
    }
}

impl FromStr for Conjugate {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().trim_start_matches('(').trim_end_matches(')');
        let b = s.as_bytes();
        if b.len() != 3 {
            return Err(Error::BadConjugate(s.to_string()));
        }
        let mut out = [0u8; 3];
        for (k, &c) in b.iter().enumerate() {
            if !(b'1'..=b'3').contains(&c) {
                return Err(Error::BadConjugate(s.to_string()));
            }
            out[k] = c - b'1';
        }
        let mut seen = [false; 3];
        for &x in &out {
            if std::mem::replace(&mut seen[x as usize], true) {
                return Err(Error::BadConjugate(s.to_string()));
            }
        }
        Ok(Conjugate(out))
    }
}

impl fmt::Display for Conjugate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl LatinSquare {
    pub fn from_rows(rows: &[Vec<usize>]) -> Result<Self> {
        let n = rows.len();
        if n > MAX_ORDER {
            return Err(Error::OrderTooLarge(n, MAX_ORDER));
        }
        let mut grid = Vec::with_capacity(n * n);
        for (r, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::NotLatin(format!(
                    "row {r} has {} entries, expected {n}",
                    row.len()
                )));
            }
            for &x in row {
                if x >= n {
                    return Err(Error::NotLatin(format!("symbol {x} out of range in row {r}")));
                }
                grid.push(x as u8);
            }
        }
        let l = Self { n, grid };
        l.validate()?;
        Ok(l)
    }

    fn validate(&self) -> Result<()> {
        let n = self.n;
        for r in 0..n {
            let mut seen = 0u64;
            for c in 0..n {
                let bit = 1u64 << self.get(r, c);
                if seen & bit != 0 {
                    return Err(Error::NotLatin(format!(
                        "symbol {} repeated in row {r}",
                        self.get(r, c)
                    )));
                }
                seen |= bit;
            }
        }
        for c in 0..n {
            let mut seen = 0u64;
            for r in 0..n {
                let bit = 1u64 << self.get(r, c);
                if seen & bit != 0 {
                    return Err(Error::NotLatin(format!(
                        "symbol {} repeated in column {c}",
                        self.get(r, c)
                    )));
                }
                seen |= bit;
            }
        }
        Ok(())
    }

    /// The Cayley table of Z_n.
    pub fn cyclic(n: usize) -> Self {
        assert!(n <= MAX_ORDER);
        let grid = (0..n * n).map(|k| ((k / n + k % n) % n) as u8).collect();
        Self { n, grid }
    }

    pub fn order(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> usize {
        self.grid[r * self.n + c] as usize
    }

    pub fn row(&self, r: usize) -> &[u8] {
        &self.grid[r * self.n..(r + 1) * self.n]
    }

    pub fn rows(&self) -> Vec<Vec<usize>> {
        (0..self.n)
            .map(|r| self.row(r).iter().map(|&x| x as usize).collect())
            .collect()
    }

    /// All entries as (row, column, symbol).
    pub fn entries(&self) -> impl Iterator<Item = [usize; 3]> + '_ {
        (0..self.n * self.n).map(move |k| [k / self.n, k % self.n, self.grid[k] as usize])
    }

    pub fn contains(&self, e: [usize; 3]) -> bool {
        e.iter().all(|&x| x < self.n) && self.get(e[0], e[1]) == e[2]
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|r| (0..r).all(|c| self.get(r, c) == self.get(c, r)))
    }

    /// Row `i` becomes the 1-factor joining column `j` to symbol `L[i][j]`.
    pub fn to_opf(&self) -> Opf {
        let factors = (0..self.n)
            .map(|r| OneFactor::from_vec_unchecked(self.row(r).to_vec()))
            .collect();
        Opf::from_parts_unchecked(self.n, factors)
    }

    pub fn from_opf(f: &Opf) -> Result<Self> {
        if !f.is_complete() {
            return Err(Error::Length {
                got: f.len(),
                need: f.order(),
            });
        }
        let n = f.order();
        let grid = f.factors().iter().flat_map(|g| g.image().iter().copied()).collect();
        Ok(Self { n, grid })
    }

    /// The isotope with row `r` moved to `rows[r]`, column `c` to
    /// `cols[c]` and symbol `s` renamed `syms[s]`.
    pub fn isotope(&self, rows: &[usize], cols: &[usize], syms: &[usize]) -> Self {
        let n = self.n;
        let mut grid = vec![0u8; n * n];
        for [r, c, s] in self.entries() {
            grid[rows[r] * n + cols[c]] = syms[s] as u8;
        }
        Self { n, grid }
    }

    pub fn conjugate(&self, x: Conjugate) -> Self {
        let n = self.n;
        let mut grid = vec![0u8; n * n];
        for e in self.entries() {
            let [a, b, c] = x.0.map(|k| e[k as usize]);
            grid[a * n + b] = c as u8;
        }
        Self { n, grid }
    }

    pub fn transpose(&self) -> Self {
        self.conjugate(Conjugate::TRANSPOSE)
    }

    pub fn row_inverse(&self) -> Self {
        self.conjugate(Conjugate::ROW_INVERSE)
    }

    /// Cycle lengths, descending, of the permutation taking row `r` to
    /// row `s`.
    pub fn row_cycle_lengths(&self, r: usize, s: usize) -> Result<Vec<usize>> {
        if r == s {
            return Err(Error::SameRow(r, s));
        }
        if r >= self.n || s >= self.n {
            return Err(Error::NotLatin(format!("row index out of range: {r}, {s}")));
        }
        let mut out = self.row_cycles_unchecked(r, s);
        out.sort_unstable_by(|a, b| b.cmp(a));
        Ok(out)
    }

    fn row_cycles_unchecked(&self, r: usize, s: usize) -> Vec<usize> {
        let n = self.n;
        let mut col_of = [0u8; MAX_ORDER];
        for c in 0..n {
            col_of[self.get(r, c)] = c as u8;
        }
        let mut seen = 0u64;
        let mut out = Vec::new();
        for start in 0..n {
            if seen >> start & 1 == 1 {
                continue;
            }
            let mut len = 0;
            let mut c = start;
            while seen >> c & 1 == 0 {
                seen |= 1 << c;
                len += 1;
                c = col_of[self.get(s, c)] as usize;
            }
            out.push(len);
        }
        out
    }

    fn row_pair_hamiltonian(&self, r: usize, s: usize) -> bool {
        let n = self.n;
        let mut col_of = [0u8; MAX_ORDER];
        for c in 0..n {
            col_of[self.get(r, c)] = c as u8;
        }
        let mut c = col_of[self.get(s, 0)] as usize;
        let mut len = 1;
        while c != 0 {
            c = col_of[self.get(s, c)] as usize;
            len += 1;
        }
        len == n
    }

    /// Every pair of rows forms a single row cycle.
    pub fn is_row_hamiltonian(&self) -> bool {
        (0..self.n).all(|r| (r + 1..self.n).all(|s| self.row_pair_hamiltonian(r, s)))
    }

    /// Number of the six conjugates that are row-Hamiltonian.
    pub fn nu(&self) -> usize {
        Conjugate::ALL
            .iter()
            .filter(|&&x| self.conjugate(x).is_row_hamiltonian())
            .count()
    }

    pub fn is_atomic(&self) -> bool {
        self.nu() == 6
    }

    /// Number of transversals.
    pub fn transversal_count(&self) -> u64 {
        let n = self.n;
        if n == 0 {
            return 1;
        }
        let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        let mut count = 0;
        self.transversals_from(full, full, full, &mut count);
        count
    }

    /// Picks the free row with the fewest usable cells, then branches on
    /// them.
    fn transversals_from(&self, rows: u64, cols: u64, syms: u64, count: &mut u64) {
        if rows == 0 {
            *count += 1;
            return;
        }
        let mut best_row = usize::MAX;
        let mut best_opts = 0u64;
        let mut best_n = u32::MAX;
        let mut rs = rows;
        while rs != 0 {
            let r = rs.trailing_zeros() as usize;
            rs &= rs - 1;
            let mut opts = 0u64;
            let mut cs = cols;
            while cs != 0 {
                let c = cs.trailing_zeros() as usize;
                cs &= cs - 1;
                if syms >> self.get(r, c) & 1 == 1 {
                    opts |= 1 << c;
                }
            }
            let k = opts.count_ones();
            if k == 0 {
                return;
            }
            if k < best_n {
                best_n = k;
                best_row = r;
                best_opts = opts;
            }
        }
        let mut cs = best_opts;
        while cs != 0 {
            let c = cs.trailing_zeros() as usize;
            cs &= cs - 1;
            let s = self.get(best_row, c);
            self.transversals_from(rows & !(1 << best_row), cols & !(1 << c), syms & !(1 << s), count);
        }
    }

    /// In-degrees of the train, as (in-degree, multiplicity) pairs in
    /// increasing order of in-degree.
    pub fn train_indegree_sequence(&self) -> Vec<(u32, u64)> {
        let n = self.n;
        // col_of[a][c]: column of symbol c in row a; row_of[b][c]: row of symbol c in column b
        let mut col_of = vec![0usize; n * n];
        let mut row_of = vec![0usize; n * n];
        for [r, c, s] in self.entries() {
            col_of[r * n + s] = c;
            row_of[c * n + s] = r;
        }
        let mut indeg = vec![0u32; n * n * n];
        for a in 0..n {
            for b in 0..n {
                let z = self.get(a, b);
                for c in 0..n {
                    let y = col_of[a * n + c];
                    let x = row_of[b * n + c];
                    indeg[(x * n + y) * n + z] += 1;
                }
            }
        }
        indeg.sort_unstable();
        let mut out: Vec<(u32, u64)> = Vec::new();
        for d in indeg {
            match out.last_mut() {
                Some((v, k)) if *v == d => *k += 1,
                _ => out.push((d, 1)),
            }
        }
        out
    }

    /// All row-cycle lengths over every pair of rows, ascending.
    pub fn all_row_cycle_lengths(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for r in 0..self.n {
            for s in r + 1..self.n {
                out.extend(self.row_cycles_unchecked(r, s));
            }
        }
        out.sort_unstable();
        out
    }

    /// `C`: sorted row, column and symbol cycle lengths together. `S`: the
    /// three per-role sorted lists, themselves sorted so the value is a
    /// multiset.
    pub fn cycle_invariants(&self) -> (Vec<usize>, Vec<Vec<usize>>) {
        let rows = self.all_row_cycle_lengths();
        let cols = self.transpose().all_row_cycle_lengths();
        let syms = self.conjugate(Conjugate([2, 1, 0])).all_row_cycle_lengths();
        let mut c: Vec<usize> = rows.iter().chain(&cols).chain(&syms).copied().collect();
        c.sort_unstable();
        let mut s = vec![rows, cols, syms];
        s.sort();
        (c, s)
    }

    pub fn invariants(&self) -> InvariantRecord {
        let (c, s) = self.cycle_invariants();
        InvariantRecord {
            transversals: self.transversal_count(),
            train: self.train_indegree_sequence(),
            cycles: c,
            cycle_lists: s,
            nu: self.nu(),
        }
    }

    pub fn autotopism_group_order(&self) -> u128 {
        automorphism_group_order(&ColouredGraph::from_latin(self, ColourMode::LsIsotopy))
    }

    pub fn autoparatopism_group_order(&self) -> u128 {
        automorphism_group_order(&ColouredGraph::from_latin(self, ColourMode::LsSpecies))
    }

    pub fn is_isotopic(&self, other: &LatinSquare) -> bool {
        self.n == other.n
            && latin_form(self, ColourMode::LsIsotopy) == latin_form(other, ColourMode::LsIsotopy)
    }

    pub fn same_species(&self, other: &LatinSquare) -> bool {
        self.n == other.n
            && latin_form(self, ColourMode::LsSpecies) == latin_form(other, ColourMode::LsSpecies)
    }

    /// Parses a sequence of squares separated by blank lines. Lines
    /// starting with `#` are ignored.
    pub fn parse_many(text: &str) -> Result<Vec<LatinSquare>> {
        let mut out = Vec::new();
        let mut rows: Vec<Vec<usize>> = Vec::new();
        let mut first_line = 0;
        let flush = |rows: &mut Vec<Vec<usize>>, line: usize, out: &mut Vec<LatinSquare>| -> Result<()> {
            if !rows.is_empty() {
                let l = LatinSquare::from_rows(rows).map_err(|e| Error::Parse {
                    line,
                    msg: e.to_string(),
                })?;
                out.push(l);
                rows.clear();
            }
            Ok(())
        };
        for (k, line) in text.lines().enumerate() {
            let t = line.trim();
            if t.starts_with('#') {
                continue;
            }
            if t.is_empty() {
                flush(&mut rows, first_line, &mut out)?;
                continue;
            }
            if rows.is_empty() {
                first_line = k + 1;
            }
            let row = t
                .split_whitespace()
                .map(|w| {
                    w.parse::<usize>().map_err(|_| Error::Parse {
                        line: k + 1,
                        msg: format!("bad symbol {w:?}"),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
        flush(&mut rows, first_line, &mut out)?;
        Ok(out)
    }
}

impl fmt::Debug for LatinSquare {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "LatinSquare(n={})", self.n)?;
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for LatinSquare {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.n {
            let row: Vec<String> = self.row(r).iter().map(|x| x.to_string()).collect();
            writeln!(f, "{}", row.join(" "))?;
        }
        Ok(())
    }
}

impl FromStr for LatinSquare {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let mut all = Self::parse_many(s)?;
        match all.len() {
            1 => Ok(all.pop().unwrap()),
            k => Err(Error::Parse {
                line: 0,
                msg: format!("expected one square, found {k}"),
            }),
        }
    }
}

/// Species invariants of a Latin square.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct InvariantRecord {
    /// `N`
    pub transversals: u64,
    /// `I`, run-length encoded
    pub train: Vec<(u32, u64)>,
    /// `C`
    pub cycles: Vec<usize>,
    /// `S`
    pub cycle_lists: Vec<Vec<usize>>,
    pub nu: usize,
}

/// Cycle positions of the Hamiltonian cycle `f ∪ g`: `pos[x]` for `u_x`,
/// `pos[n + y]` for `v_y`.
fn cycle_positions(f: &[u8], g_inv: &[u8]) -> Vec<u32> {
    let n = f.len();
    let mut pos = vec![u32::MAX; 2 * n];
    let mut x = 0usize;
    for step in 0..n {
        pos[x] = 2 * step as u32;
        let y = f[x] as usize;
        pos[n + y] = 2 * step as u32 + 1;
        x = g_inv[y] as usize;
    }
    pos
}

/// `P`: over pairs `i < j` and each other factor `k`, the product of the
/// distances in the cycle `f_i ∪ f_j` between the ends of each edge of
/// `f_k`, summed.
pub fn p_invariant(f: &Opf) -> Result<u128> {
    if !f.is_complete() {
        return Err(Error::Length {
            got: f.len(),
            need: f.order(),
        });
    }
    if !crate::factor::is_perfect(f) {
        return Err(Error::NotPerfect);
    }
    let n = f.order();
    let inv: Vec<OneFactor> = f.factors().iter().map(|g| g.inverse()).collect();
    let mut total: u128 = 0;
    for i in 0..n {
        for j in i + 1..n {
            let pos = cycle_positions(f.factor(i).image(), inv[j].image());
            for k in (0..n).filter(|&k| k != i && k != j) {
                let mut prod: u128 = 1;
                for (x, &y) in f.factor(k).image().iter().enumerate() {
                    let d = pos[x].abs_diff(pos[n + y as usize]);
                    let d = d.min(2 * n as u32 - d) as u128;
                    prod = prod.checked_mul(d).ok_or(Error::Overflow("P invariant"))?;
                }
                total = total.checked_add(prod).ok_or(Error::Overflow("P invariant"))?;
            }
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sq(rows: &[&[usize]]) -> LatinSquare {
        LatinSquare::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn rejects_non_latin() {
        assert!(LatinSquare::from_rows(&[vec![0, 1], vec![0, 1]]).is_err());
        assert!(LatinSquare::from_rows(&[vec![0, 0], vec![1, 1]]).is_err());
        assert!(LatinSquare::from_rows(&[vec![0, 2], vec![1, 0]]).is_err());
        assert!(LatinSquare::from_rows(&[vec![0, 1], vec![1]]).is_err());
    }

    #[test]
    fn conjugate_labels() {
        let l = sq(&[&[0, 2, 1], &[2, 1, 0], &[1, 0, 2]]);
        assert_eq!(l.conjugate(Conjugate::IDENTITY), l);
        let t = l.conjugate(Conjugate::TRANSPOSE);
        for r in 0..3 {
            for c in 0..3 {
                assert_eq!(t.get(r, c), l.get(c, r));
            }
        }
        let ri = l.row_inverse();
        for [r, c, s] in l.entries() {
            assert_eq!(ri.get(r, s), c);
        }
        for x in Conjugate::ALL {
            assert_eq!(l.conjugate(x).conjugate(x.inverse()), l, "{x}");
            assert_eq!(x.label().parse::<Conjugate>().unwrap(), x);
        }
        assert!("112".parse::<Conjugate>().is_err());
        assert!("1234".parse::<Conjugate>().is_err());
        assert!("124".parse::<Conjugate>().is_err());
    }

    #[test]
    fn row_cycles() {
        let c5 = LatinSquare::cyclic(5);
        for r in 0..5 {
            for s in 0..5 {
                if r != s {
                    assert_eq!(c5.row_cycle_lengths(r, s).unwrap(), vec![5]);
                }
            }
        }
        assert_eq!(LatinSquare::cyclic(4).row_cycle_lengths(0, 2).unwrap(), vec![2, 2]);
        assert_eq!(c5.row_cycle_lengths(1, 1), Err(Error::SameRow(1, 1)));
    }

    #[test]
    fn nu_of_cyclic_squares() {
        assert_eq!(LatinSquare::cyclic(5).nu(), 6);
        assert_eq!(LatinSquare::cyclic(4).nu(), 0);
        assert_eq!(LatinSquare::cyclic(3).nu(), 6);
    }

    #[test]
    fn transversals_small() {
        assert_eq!(LatinSquare::cyclic(3).transversal_count(), 3);
        assert_eq!(LatinSquare::cyclic(4).transversal_count(), 0);
        assert_eq!(LatinSquare::cyclic(5).transversal_count(), 15);
        assert_eq!(LatinSquare::cyclic(7).transversal_count(), 133);
    }

    #[test]
    fn train_fixes_entries() {
        let l = LatinSquare::cyclic(5);
        let seq = l.train_indegree_sequence();
        assert_eq!(seq.iter().map(|&(_, k)| k).sum::<u64>(), 125);
        assert_eq!(seq.iter().map(|&(d, k)| d as u64 * k).sum::<u64>(), 125);
    }

    #[test]
    fn cycle_invariants_of_cyclic() {
        let (c, s) = LatinSquare::cyclic(5).cycle_invariants();
        assert_eq!(c, vec![5; 30]);
        assert_eq!(s, vec![vec![5; 10]; 3]);
    }

    #[test]
    fn opf_round_trip() {
        let l = LatinSquare::cyclic(7);
        let f = l.to_opf();
        assert_eq!(LatinSquare::from_opf(&f).unwrap(), l);
        assert!(LatinSquare::from_opf(&f.prefix(3)).is_err());
    }

    #[test]
    fn text_round_trip() {
        let l = LatinSquare::cyclic(6);
        let back: LatinSquare = l.to_string().parse().unwrap();
        assert_eq!(back, l);
        let two = format!("# two\n{}\n{}", l, LatinSquare::cyclic(3));
        assert_eq!(LatinSquare::parse_many(&two).unwrap().len(), 2);
        assert!("0 1\n1 1\n".parse::<LatinSquare>().is_err());
    }

    #[test]
    fn cyclic_symmetry_groups() {
        assert_eq!(LatinSquare::cyclic(5).autotopism_group_order(), 100);
        assert_eq!(LatinSquare::cyclic(5).autoparatopism_group_order(), 600);
    }

    #[test]
    fn p_invariant_cyclic() {
        // the third factor of K_{3,3} joins antipodes of the 6-cycle
        assert_eq!(p_invariant(&LatinSquare::cyclic(3).to_opf()).unwrap(), 81);
        assert_eq!(p_invariant(&LatinSquare::cyclic(4).to_opf()), Err(Error::NotPerfect));
    }
}
