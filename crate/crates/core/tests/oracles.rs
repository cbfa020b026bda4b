//! Cross-checks against slow independent computations.

use std::collections::{BTreeSet, VecDeque};

use p1f_core::factor::{is_perfect_pair, standard_prefix};
use p1f_core::families::{
    bdcls_from_str, ga_factorisation, ga_vertex, l_p_square, root_square, symmetric_nu4_squares, NU4_FIRST_ROWS,
};
use p1f_core::latin::p_invariant;
use p1f_core::order::is_minimal;
use p1f_core::search::{class_digest, perfect_extensions};
use p1f_core::seeds::gen_seeds;
use p1f_core::{Conjugate, LatinSquare, OneFactor, Opf};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for k in 0..n {
            let mut q = p.clone();
            q.insert(k, n - 1);
            out.push(q);
        }
    }
    out
}

fn image(f: &[u8], a: &[usize], b: &[usize], swap: bool) -> Vec<u8> {
    let mut g = vec![0u8; f.len()];
    for (x, &y) in f.iter().enumerate() {
        let (s, t) = if swap { (y as usize, x) } else { (x, y as usize) };
        g[a[s]] = b[t] as u8;
    }
    g
}

/// Minimal iff no map and choice of three factors gives a smaller
/// prefix.
fn brute_minimal(f: &Opf, perms: &[Vec<usize>]) -> bool {
    let fs: Vec<&[u8]> = f.factors().iter().map(|g| g.image()).collect();
    let own: Vec<&[u8]> = fs[..3].to_vec();
    for swap in [false, true] {
        for a in perms {
            for b in perms {
                let imgs: Vec<Vec<u8>> = fs.iter().map(|g| image(g, a, b, swap)).collect();
                for i in 0..fs.len() {
                    for j in 0..fs.len() {
                        for k in 0..fs.len() {
                            if i == j || j == k || i == k {
                                continue;
                            }
                            let cand = [imgs[i].as_slice(), imgs[j].as_slice(), imgs[k].as_slice()];
                            if cand.as_slice() < own.as_slice() {
                                return false;
                            }
                        }
                    }
                }
            }
        }
    }
    true
}

#[test]
fn minimality_matches_brute_force_at_five() {
    let n = 5;
    let perms = permutations(n);
    let prefix = standard_prefix(n).unwrap();
    let ext = perfect_extensions(&prefix);
    let mut checked = 0;
    let mut minimal = 0;
    for t in &ext {
        let p3 = prefix.append(t.clone()).unwrap();
        let m = is_minimal(&p3).unwrap();
        assert_eq!(m, brute_minimal(&p3, &perms), "{p3}");
        checked += 1;
        minimal += usize::from(m);
        for u in perfect_extensions(&p3) {
            let p4 = p3.append(u).unwrap();
            assert_eq!(is_minimal(&p4).unwrap(), brute_minimal(&p4, &perms), "{p4}");
            checked += 1;
        }
    }
    assert!(minimal > 0 && minimal < ext.len());
    assert!(checked > ext.len());
}

/// Classes of perfect 4-sets, each represented with the standard pair.
fn four_set_classes(n: usize) -> BTreeSet<String> {
    let prefix = standard_prefix(n).unwrap();
    let ext = perfect_extensions(&prefix);
    let mut out = BTreeSet::new();
    for (i, t) in ext.iter().enumerate() {
        for u in &ext[i + 1..] {
            if t.is_disjoint(u) && is_perfect_pair(t, u).unwrap() {
                let f = prefix.append(t.clone()).unwrap().append(u.clone()).unwrap();
                out.insert(class_digest(&f));
            }
        }
    }
    out
}

#[test]
fn seeds_cover_every_four_set_class() {
    for (n, want) in [(5, 2), (7, 30)] {
        let oracle = four_set_classes(n);
        let seeds = gen_seeds(n).unwrap();
        let got: BTreeSet<String> = seeds.seeds().iter().map(|s| s.digest.clone()).collect();
        assert_eq!(got, oracle, "n={n}");
        assert_eq!(seeds.len(), want);
    }
}

#[test]
fn seed_count_at_nine() {
    assert_eq!(gen_seeds(9).unwrap().len(), 26743);
}

/// `P` from breadth-first distances in each union cycle.
fn p_by_bfs(f: &Opf) -> u128 {
    let n = f.order();
    let fs: Vec<&[u8]> = f.factors().iter().map(|g| g.image()).collect();
    let mut total = 0u128;
    for i in 0..fs.len() {
        for j in i + 1..fs.len() {
            let mut adj = vec![Vec::new(); 2 * n];
            for g in [fs[i], fs[j]] {
                for (x, &y) in g.iter().enumerate() {
                    adj[x].push(n + y as usize);
                    adj[n + y as usize].push(x);
                }
            }
            for (k, g) in fs.iter().enumerate() {
                if k == i || k == j {
                    continue;
                }
                let mut prod = 1u128;
                for (x, &y) in g.iter().enumerate() {
                    let mut dist = vec![usize::MAX; 2 * n];
                    let mut q = VecDeque::from([x]);
                    dist[x] = 0;
                    while let Some(w) = q.pop_front() {
                        for &z in &adj[w] {
                            if dist[z] == usize::MAX {
                                dist[z] = dist[w] + 1;
                                q.push_back(z);
                            }
                        }
                    }
                    let d = dist[n + y as usize];
                    assert_eq!(d % 2, 1, "edge ends lie an odd distance apart");
                    prod *= d as u128;
                }
                total += prod;
            }
        }
    }
    total
}

#[test]
fn p_matches_bfs_and_is_isomorphism_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for l in [LatinSquare::cyclic(5), LatinSquare::cyclic(7), l_p_square(5).unwrap().conjugate("321".parse().unwrap())] {
        let f = l.to_opf();
        let want = p_by_bfs(&f);
        assert_eq!(p_invariant(&f).unwrap(), want);
        let n = f.order();
        for _ in 0..20 {
            let mut a: Vec<usize> = (0..n).collect();
            let mut b = a.clone();
            a.shuffle(&mut rng);
            b.shuffle(&mut rng);
            let mut fs: Vec<OneFactor> = f
                .factors()
                .iter()
                .map(|g| OneFactor::new(image(g.image(), &a, &b, false)).unwrap())
                .collect();
            fs.shuffle(&mut rng);
            let g = Opf::new(n, fs).unwrap();
            assert_eq!(p_invariant(&g).unwrap(), want);
            assert_eq!(p_by_bfs(&g), want);
        }
    }
}

/// Isomorphism classes of the factorisations given by the row-Hamiltonian
/// conjugates of a square.
fn factorisation_classes(l: &LatinSquare) -> usize {
    Conjugate::ALL
        .iter()
        .map(|&x| l.conjugate(x))
        .filter(|c| c.is_row_hamiltonian())
        .map(|c| class_digest(&c.to_opf()))
        .collect::<BTreeSet<_>>()
        .len()
}

#[test]
fn bordered_squares_and_their_factorisations() {
    let classes: Vec<usize> = NU4_FIRST_ROWS
        .iter()
        .map(|r| factorisation_classes(&bdcls_from_str(r).unwrap()))
        .collect();
    assert_eq!(classes, [1, 1, 1, 2]);
    for l in symmetric_nu4_squares() {
        assert_eq!(factorisation_classes(&l), 1);
    }
}

#[test]
fn root_choice_does_not_change_nu() {
    let p = 5;
    let ga = ga_factorisation(p).unwrap();
    let nus: BTreeSet<usize> = (0..2 * p).map(|v| root_square(&ga, v).unwrap().nu()).collect();
    assert_eq!(nus, BTreeSet::from([2]));
}

#[test]
fn explicit_square_is_root_square() {
    for p in [3, 5, 7, 11] {
        let ga = ga_factorisation(p).unwrap();
        assert_eq!(root_square(&ga, ga_vertex(p, -1, 2)).unwrap(), l_p_square(p).unwrap(), "p={p}");
    }
}
