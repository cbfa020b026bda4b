use std::sync::OnceLock;

use p1f_core::canon::{canonize, latin_form, opf_digest};
use p1f_core::factor::union_cycle_lengths;
use p1f_core::families::{
    bdcls_from_str, dihedral10_square, is_bdcls, l_p_square, parse_first_row, symmetric_nu4_squares, NU4_FIRST_ROWS,
};
use p1f_core::search::naive_classes;
use p1f_core::{ColouredGraph, ColourMode, Conjugate, LatinSquare, OneFactor, Opf, VertexMap};
use proptest::prelude::*;
use proptest::sample::Index;

/// Squares of several orders with varied symmetry.
fn pool() -> &'static [LatinSquare] {
    static POOL: OnceLock<Vec<LatinSquare>> = OnceLock::new();
    POOL.get_or_init(|| {
        let mut v: Vec<LatinSquare> = [3, 4, 5, 6, 7, 9].iter().map(|&n| LatinSquare::cyclic(n)).collect();
        v.extend(naive_classes(7).unwrap().entries().map(|(_, f)| LatinSquare::from_opf(f).unwrap()));
        v.push(l_p_square(5).unwrap());
        v.push(dihedral10_square());
        v.extend(symmetric_nu4_squares().into_iter().take(2));
        v.extend(NU4_FIRST_ROWS.iter().take(2).map(|r| bdcls_from_str(r).unwrap()));
        v
    })
}

fn perm_of(n: usize, keys: &[u64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by_key(|&i| (keys[i % keys.len()].rotate_left(i as u32), i));
    idx
}

prop_compose! {
    fn square()(k in any::<Index>(), keys in prop::collection::vec(any::<u64>(), 3 * 12), x in 0..6usize) -> LatinSquare {
        let l = &pool()[k.index(pool().len())];
        let n = l.order();
        l.isotope(&perm_of(n, &keys[..12]), &perm_of(n, &keys[12..24]), &perm_of(n, &keys[24..]))
            .conjugate(Conjugate::ALL[x])
    }
}

prop_compose! {
    fn paratopism()(keys in prop::collection::vec(any::<u64>(), 36), x in 0..6usize) -> (Vec<u64>, Conjugate) {
        (keys, Conjugate::ALL[x])
    }
}

fn apply(l: &LatinSquare, (keys, x): &(Vec<u64>, Conjugate)) -> LatinSquare {
    let n = l.order();
    l.isotope(&perm_of(n, &keys[..12]), &perm_of(n, &keys[12..24]), &perm_of(n, &keys[24..]))
        .conjugate(*x)
}

fn vertex_map(n: usize, keys: &[u64], swap: bool) -> VertexMap {
    VertexMap {
        swap,
        u: perm_of(n, &keys[..12]).into_iter().map(|x| x as u8).collect(),
        v: perm_of(n, &keys[12..]).into_iter().map(|x| x as u8).collect(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn union_cycles_cover_all_vertices(l in square(), r in any::<Index>(), s in any::<Index>()) {
        let n = l.order();
        let (r, s) = (r.index(n), s.index(n));
        prop_assume!(r != s);
        let f = OneFactor::new(l.row(r).to_vec()).unwrap();
        let g = OneFactor::new(l.row(s).to_vec()).unwrap();
        let lens = union_cycle_lengths(&f, &g).unwrap();
        prop_assert_eq!(lens.iter().sum::<usize>(), 2 * n);
        prop_assert!(lens.iter().all(|c| c % 2 == 0 && *c >= 4));
    }

    #[test]
    fn opf_digest_is_isomorphism_invariant(
        l in square(),
        take in 1..12usize,
        keys in prop::collection::vec(any::<u64>(), 24),
        order in prop::collection::vec(any::<u64>(), 12),
        swap in any::<bool>(),
    ) {
        let n = l.order();
        let f = Opf::new(n, (0..take.min(n)).map(|r| OneFactor::new(l.row(r).to_vec()).unwrap()).collect()).unwrap();
        let g = f.relabel(&vertex_map(n, &keys, swap)).reorder(&perm_of(f.len(), &order));
        prop_assert_eq!(opf_digest(&f, ColourMode::P1f), opf_digest(&g, ColourMode::P1f));
        if !swap {
            prop_assert_eq!(opf_digest(&f, ColourMode::P1fDirect), opf_digest(&g, ColourMode::P1fDirect));
        }
        let a = canonize(&ColouredGraph::from_opf(&f, ColourMode::P1f)).group_order;
        let b = canonize(&ColouredGraph::from_opf(&g, ColourMode::P1f)).group_order;
        prop_assert_eq!(a, b);
    }

    #[test]
    fn latin_forms_follow_paratopy(l in square(), t in paratopism()) {
        let m = apply(&l, &t);
        prop_assert_eq!(latin_form(&l, ColourMode::LsSpecies), latin_form(&m, ColourMode::LsSpecies));
        prop_assert_eq!(l.autoparatopism_group_order(), m.autoparatopism_group_order());
        let iso = l.isotope(&perm_of(l.order(), &t.0[..12]), &perm_of(l.order(), &t.0[12..24]), &perm_of(l.order(), &t.0[24..]));
        prop_assert_eq!(latin_form(&l, ColourMode::LsIsotopy), latin_form(&iso, ColourMode::LsIsotopy));
        prop_assert!(l.same_species(&m));
    }

    #[test]
    fn nu_and_invariants_follow_paratopy(l in square(), t in paratopism()) {
        let m = apply(&l, &t);
        prop_assert_eq!(l.nu(), m.nu());
        prop_assert_eq!(l.invariants(), m.invariants());
    }

    #[test]
    fn row_inverse_preserves_row_cycles(l in square()) {
        let r = l.row_inverse();
        prop_assert_eq!(l.is_row_hamiltonian(), r.is_row_hamiltonian());
        prop_assert_eq!(l.all_row_cycle_lengths(), r.all_row_cycle_lengths());
    }

    #[test]
    fn conjugates_compose_and_invert(l in square(), x in 0..6usize, y in 0..6usize) {
        let (x, y) = (Conjugate::ALL[x], Conjugate::ALL[y]);
        prop_assert_eq!(l.conjugate(x).conjugate(x.inverse()), l.clone());
        let twice = l.conjugate(x).conjugate(y);
        prop_assert!(Conjugate::ALL.iter().any(|&z| l.conjugate(z) == twice));
        prop_assert_eq!(x.label().parse::<Conjugate>().unwrap(), x);
    }

    #[test]
    fn text_round_trips(l in square()) {
        prop_assert_eq!(l.to_string().parse::<LatinSquare>().unwrap(), l.clone());
        let f = l.to_opf();
        prop_assert_eq!(f.to_string().parse::<Opf>().unwrap(), f.clone());
        prop_assert_eq!(LatinSquare::from_opf(&f).unwrap(), l);
    }
}

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

prop_compose! {
    fn small_graph()(nv in 1..=7usize)(
        nv in Just(nv),
        colours in prop::collection::vec(0..3u32, nv),
        bits in prop::collection::vec(any::<bool>(), nv * (nv - 1) / 2),
    ) -> ColouredGraph {
        let pairs: Vec<(usize, usize)> = (0..nv).flat_map(|a| (a + 1..nv).map(move |b| (a, b))).collect();
        let edges: Vec<(usize, usize)> = pairs.into_iter().zip(bits).filter(|(_, on)| *on).map(|(e, _)| e).collect();
        ColouredGraph::new(colours, &edges)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn engine_matches_brute_force_on_small_graphs(g in small_graph(), h in small_graph()) {
        let nv = g.vertex_count();
        let perms = permutations(nv);
        let aut = perms.iter().filter(|p| g.is_automorphism(p)).count() as u128;
        let c = canonize(&g);
        prop_assert_eq!(c.group_order, aut);
        for gen in &c.generators {
            prop_assert!(g.is_automorphism(gen));
        }
        let iso = h.vertex_count() == nv
            && perms.iter().any(|p| {
                (0..nv).all(|v| g.colour(v) == h.colour(p[v]))
                    && g.edge_count() == h.edge_count()
                    && g.edges().all(|(a, b)| h.has_edge(p[a], p[b]))
            });
        prop_assert_eq!(c.form == canonize(&h).form, iso);
        let q = &perms[perms.len() / 2];
        prop_assert_eq!(canonize(&g.relabel(q)).form, c.form);
    }
}

#[test]
fn bordered_construction_is_closed() {
    for r in NU4_FIRST_ROWS.iter().chain(["0,2,1", "0,2,8,5,7,1,10,4,6,3,9"].iter()) {
        let (row, set) = parse_first_row(r).unwrap();
        let l = p1f_core::families::bdcls_from_first_row(&row, set).unwrap();
        assert!(is_bdcls(&l, set), "{r}");
    }
    let (_, set) = parse_first_row("0,2,1").unwrap();
    let twisted = LatinSquare::cyclic(3).isotope(&[0, 1, 2], &[1, 0, 2], &[0, 1, 2]);
    assert!(!is_bdcls(&twisted, set) || twisted == bdcls_from_str("0,2,1").unwrap());
}
