//! The prefix order on ordered partial 1-factorisations and the minimality
//! test used for isomorph rejection.

use crate::error::{Error, Result};
use crate::factor::{is_perfect, standard_prefix, OneFactor, Opf, VertexMap, MAX_ORDER};

/// Outcome of [`compare_prefix`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PrefixComparison {
    Less,
    Greater,
    Equal,
    Incomparable,
}

impl PrefixComparison {
    pub fn reverse(self) -> Self {
        match self {
            Self::Less => Self::Greater,
            Self::Greater => Self::Less,
            other => other,
        }
    }
}

/// Compares two ordered partial factorisations. Only a first difference in
/// one of the first three factors is decisive; there the factors are compared
/// as sequences of `v`-indices.
pub fn compare_prefix(f: &Opf, e: &Opf) -> Result<PrefixComparison> {
    if f.order() != e.order() {
        return Err(Error::OrderMismatch(f.order(), e.order()));
    }
    let common = f.len().min(e.len());
    let first_diff = (0..common).find(|&j| f.factor(j) != e.factor(j));
    Ok(match first_diff {
        None if f.len() == e.len() => PrefixComparison::Equal,
        None => PrefixComparison::Incomparable,
        Some(j) if j >= 3 => PrefixComparison::Incomparable,
        Some(j) => match f.factor(j).image().cmp(e.factor(j).image()) {
            std::cmp::Ordering::Less => PrefixComparison::Less,
            std::cmp::Ordering::Greater => PrefixComparison::Greater,
            std::cmp::Ordering::Equal => unreachable!("factors differ"),
        },
    })
}

/// One symmetry of the standard pair `(f_1, f_2)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabiliserElement {
    pub map: VertexMap,
    /// The map sends `f_1 -> f_2` and `f_2 -> f_1`.
    pub swaps_factors: bool,
}

/// All vertex maps of `K_{n,n}` sending `{f_1, f_2}` to itself.
#[derive(Clone, Debug)]
pub struct PairStabiliser {
    n: usize,
    elements: Vec<StabiliserElement>,
}

impl PairStabiliser {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn elements(&self) -> &[StabiliserElement] {
        &self.elements
    }

    /// Elements fixing `f_1` and `f_2` individually.
    pub fn fixing(&self) -> impl Iterator<Item = &VertexMap> {
        self.elements
            .iter()
            .filter(|e| !e.swaps_factors)
            .map(|e| &e.map)
    }
}

/// Symmetries of the Hamiltonian cycle `f_1 ∪ f_2`, each checked against the
/// pair. Every vertex of `K_{n,n}` lies on the cycle, so these are all of them.
pub fn pair_stabiliser(n: usize) -> Result<PairStabiliser> {
    let std = standard_prefix(n)?;
    let (f1, f2) = (std.factor(0), std.factor(1));
    // walk the cycle: u_i -f1- v_i -f2- u_{i-1}
    let mut seq = Vec::with_capacity(2 * n);
    let mut i = 0usize;
    for _ in 0..n {
        seq.push(i);
        seq.push(n + f1.get(i));
        i = (f1.get(i) + n - 1) % n;
    }
    let len = 2 * n;
    let mut elements = Vec::with_capacity(2 * len);
    for reflect in [false, true] {
        for r in 0..len {
            let mut perm = vec![0usize; len];
            for (k, &x) in seq.iter().enumerate() {
                let t = if reflect { (r + len - k) % len } else { (r + k) % len };
                perm[x] = seq[t];
            }
            let map = VertexMap::from_vertex_perm(&perm).expect("cycle symmetry is bipartite");
            let (g1, g2) = (map.apply(f1), map.apply(f2));
            let swaps_factors = if (&g1, &g2) == (f1, f2) {
                false
            } else if (&g1, &g2) == (f2, f1) {
                true
            } else {
                continue;
            };
            elements.push(StabiliserElement { map, swaps_factors });
        }
    }
    Ok(PairStabiliser { n, elements })
}

/// A direct map sending the perfect pair `(g, h)` to `(f_1, f_2)`, or `None`
/// if the pair is not perfect.
pub fn transporter(g: &OneFactor, h: &OneFactor) -> Option<VertexMap> {
    let n = g.order();
    let (alpha, beta) = transporter_raw(g.image(), h.image())?;
    Some(VertexMap {
        swap: false,
        u: alpha[..n].to_vec(),
        v: beta[..n].to_vec(),
    })
}

type Row = [u8; MAX_ORDER];

fn transporter_raw(g: &[u8], h: &[u8]) -> Option<(Row, Row)> {
    let n = g.len();
    let mut g_inv = [0u8; MAX_ORDER];
    for (i, &j) in g.iter().enumerate() {
        g_inv[j as usize] = i as u8;
    }
    // alpha conjugates c = g^-1 h onto the shift: alpha(c^k(0)) = k
    let mut alpha = [0u8; MAX_ORDER];
    let mut x = 0usize;
    for k in 0..n {
        if k > 0 && x == 0 {
            return None;
        }
        alpha[x] = k as u8;
        x = g_inv[h[x] as usize] as usize;
    }
    if x != 0 {
        return None;
    }
    let mut beta = [0u8; MAX_ORDER];
    for j in 0..n {
        beta[j] = alpha[g_inv[j] as usize];
    }
    Some((alpha, beta))
}

#[derive(Clone, Debug)]
struct FixingElement {
    u: Row,
    v_inv: Row,
    u_inv: Row,
    v: Row,
    swap: bool,
}

/// Minimality test context for a fixed order.
#[derive(Clone, Debug)]
pub struct MinimalityTester {
    n: usize,
    fixing: Vec<FixingElement>,
}

impl MinimalityTester {
    pub fn new(stab: &PairStabiliser) -> Self {
        let n = stab.n();
        let fixing = stab
            .fixing()
            .map(|m| {
                let mut e = FixingElement {
                    u: [0; MAX_ORDER],
                    v: [0; MAX_ORDER],
                    u_inv: [0; MAX_ORDER],
                    v_inv: [0; MAX_ORDER],
                    swap: m.swap,
                };
                for i in 0..n {
                    e.u[i] = m.u[i];
                    e.v[i] = m.v[i];
                    e.u_inv[m.u[i] as usize] = i as u8;
                    e.v_inv[m.v[i] as usize] = i as u8;
                }
                e
            })
            .collect();
        Self { n, fixing }
    }

    pub fn for_order(n: usize) -> Result<Self> {
        Ok(Self::new(&pair_stabiliser(n)?))
    }

    /// Minimality of a perfect OPF whose first two factors are standard.
    /// No validation; see [`is_minimal`].
    pub fn is_minimal_raw(&self, factors: &[&[u8]]) -> bool {
        let n = self.n;
        let a = factors.len();
        let third = factors[2];
        let mut img = [0u8; MAX_ORDER];
        let mut img_inv = [0u8; MAX_ORDER];
        for g in 0..a {
            for h in 0..a {
                if g == h {
                    continue;
                }
                let Some((alpha, beta)) = transporter_raw(factors[g], factors[h]) else {
                    return false;
                };
                let mut alpha_inv = [0u8; MAX_ORDER];
                for i in 0..n {
                    alpha_inv[alpha[i] as usize] = i as u8;
                }
                for (k, f) in factors.iter().enumerate() {
                    if k == g || k == h {
                        continue;
                    }
                    // image under the transporter, then under each element
                    // of the stabiliser of the standard pair
                    for x in 0..n {
                        let y = beta[f[alpha_inv[x] as usize] as usize];
                        img[x] = y;
                        img_inv[y as usize] = x as u8;
                    }
                    for e in &self.fixing {
                        for x in 0..n {
                            let y = if e.swap {
                                e.u[img_inv[e.v_inv[x] as usize] as usize]
                            } else {
                                e.v[img[e.u_inv[x] as usize] as usize]
                            };
                            if y != third[x] {
                                if y < third[x] {
                                    return false;
                                }
                                break;
                            }
                        }
                    }
                }
            }
        }
        true
    }
}

/// True iff no isomorphic re-presentation of `f` has a smaller 3-prefix.
///
/// Requires a perfect OPF with at least three factors. If the first two
/// factors are not the standard pair the answer is `false`, since mapping
/// them onto it gives a smaller prefix.
pub fn is_minimal(f: &Opf) -> Result<bool> {
    if f.len() < 3 {
        return Err(Error::Length {
            got: f.len(),
            need: 3,
        });
    }
    if !is_perfect(f) {
        return Err(Error::NotPerfect);
    }
    if f.prefix(2) != standard_prefix(f.order())? {
        return Ok(false);
    }
    let tester = MinimalityTester::for_order(f.order())?;
    let raw: Vec<&[u8]> = f.factors().iter().map(|x| x.image()).collect();
    Ok(tester.is_minimal_raw(&raw))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::factor::is_perfect_pair;

    fn of(v: &[usize]) -> OneFactor {
        OneFactor::from_slice(v).unwrap()
    }

    #[test]
    fn compare_examples() {
        let n = 5;
        let f = Opf::new(n, vec![OneFactor::identity(n), OneFactor::shift(n, 1)]).unwrap();
        let e = Opf::new(n, vec![OneFactor::identity(n), OneFactor::shift(n, 2)]).unwrap();
        assert_eq!(compare_prefix(&f, &f).unwrap(), PrefixComparison::Equal);
        assert_eq!(compare_prefix(&f, &e).unwrap(), PrefixComparison::Less);
        assert_eq!(compare_prefix(&e, &f).unwrap(), PrefixComparison::Greater);
        let short = f.prefix(1);
        assert_eq!(compare_prefix(&f, &short).unwrap(), PrefixComparison::Incomparable);
        let other = Opf::new(7, vec![OneFactor::identity(7)]).unwrap();
        assert!(compare_prefix(&f, &other).is_err());
    }

    #[test]
    fn difference_after_third_factor_is_incomparable() {
        let n = 5;
        let base = vec![
            OneFactor::identity(n),
            OneFactor::shift(n, 1),
            OneFactor::shift(n, 2),
        ];
        let mut a = base.clone();
        a.push(OneFactor::shift(n, 3));
        let mut b = base;
        b.push(OneFactor::shift(n, 4));
        let (a, b) = (Opf::new(n, a).unwrap(), Opf::new(n, b).unwrap());
        assert_eq!(compare_prefix(&a, &b).unwrap(), PrefixComparison::Incomparable);
    }

    #[test]
    fn stabiliser_has_cycle_symmetry_order() {
        for n in [3, 5, 7, 9, 11] {
            let s = pair_stabiliser(n).unwrap();
            assert_eq!(s.order(), 4 * n);
            assert_eq!((8 * n) % s.order(), 0);
            assert!(s.elements().iter().any(|e| e.map == VertexMap::identity(n)));
            assert_eq!(s.fixing().count(), 2 * n);
        }
    }

    #[test]
    fn stabiliser_matches_brute_force_at_three() {
        // all 2 * (3!)^2 vertex maps of K_{3,3}
        let n = 3;
        let std = standard_prefix(n).unwrap();
        let perms: Vec<Vec<u8>> = vec![
            vec![0, 1, 2],
            vec![0, 2, 1],
            vec![1, 0, 2],
            vec![1, 2, 0],
            vec![2, 0, 1],
            vec![2, 1, 0],
        ];
        let mut count = 0;
        for swap in [false, true] {
            for u in &perms {
                for v in &perms {
                    let m = VertexMap {
                        swap,
                        u: u.clone(),
                        v: v.clone(),
                    };
                    let (a, b) = (m.apply(std.factor(0)), m.apply(std.factor(1)));
                    let fixes = (&a, &b) == (std.factor(0), std.factor(1))
                        || (&a, &b) == (std.factor(1), std.factor(0));
                    if fixes {
                        count += 1;
                    }
                }
            }
        }
        assert_eq!(count, pair_stabiliser(n).unwrap().order());
        assert_eq!(24 % count, 0);
    }

    #[test]
    fn stabiliser_closed_under_composition() {
        let s = pair_stabiliser(5).unwrap();
        let maps: Vec<&VertexMap> = s.elements().iter().map(|e| &e.map).collect();
        for a in &maps {
            for b in &maps {
                assert!(maps.contains(&&a.then(b)));
            }
        }
    }

    #[test]
    fn transporter_sends_pair_to_standard() {
        let g = of(&[2, 0, 4, 1, 3]);
        let h = of(&[4, 3, 1, 0, 2]);
        assert!(is_perfect_pair(&g, &h).unwrap());
        let t = transporter(&g, &h).unwrap();
        let std = standard_prefix(5).unwrap();
        assert_eq!(&t.apply(&g), std.factor(0));
        assert_eq!(&t.apply(&h), std.factor(1));
        assert!(transporter(&of(&[0, 1, 2, 3]), &of(&[1, 0, 3, 2])).is_none());
    }

    #[test]
    fn minimality_requires_three_factors() {
        assert!(is_minimal(&standard_prefix(5).unwrap()).is_err());
    }
}
