use std::collections::HashSet;

use proptest::prelude::*;
use quadgenus::constructions::{embed_cube, embed_cube_cycle};
use quadgenus::embedding::{
    euler_genus, genus_lower_bound, trace_faces, validate, Dart, Embedding,
};
use quadgenus::family::{parse_family_expr, Atom, FamilyExpr};
use quadgenus::graph::{
    cartesian_product, is_bipartite, make_any_cycle, make_complete_bipartite, make_path, Graph,
};
use quadgenus::surgery::{apply_handle, Pairing, QuadFace};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Connected graph on `n` vertices: a random tree plus extra edges.
fn random_connected(n: usize, extra: usize, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = HashSet::new();
    for v in 1..n {
        let u = rng.gen_range(0..v);
        edges.insert((u, v));
    }
    for _ in 0..extra {
        let a = rng.gen_range(0..n);
        let b = rng.gen_range(0..n);
        if a != b {
            edges.insert((a.min(b), a.max(b)));
        }
    }
    let mut edges: Vec<_> = edges.into_iter().collect();
    edges.sort();
    Graph::from_edges(n, edges).unwrap()
}

fn random_rotation(g: &Graph, seed: u64) -> Embedding {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rot = g
        .vertices()
        .map(|v| {
            let mut r = g.neighbors(v).to_vec();
            r.shuffle(&mut rng);
            r
        })
        .collect();
    Embedding::new(g.clone(), rot).unwrap()
}

fn factor(kind: u8, a: usize, b: usize) -> Graph {
    match kind % 4 {
        0 => make_path(a + 1).unwrap(),
        1 => make_any_cycle(2 * a + 2).unwrap(),
        2 => make_any_cycle(2 * a + 1).unwrap(),
        _ => make_complete_bipartite(a, b).unwrap(),
    }
}

fn atom() -> impl Strategy<Value = Atom> {
    prop_oneof![
        (1u32..9, 1u32..9).prop_map(|(s, t)| Atom::K(s, t)),
        (3u32..20).prop_map(Atom::C),
        (2u32..20).prop_map(Atom::P),
        (1u32..4, 1u32..9).prop_map(|(i, t)| Atom::Q(i, t)),
    ]
}

fn euler_char(e: &Embedding) -> i64 {
    let g = e.graph();
    g.n() as i64 - g.m() as i64 + trace_faces(e).unwrap().len() as i64
}

proptest! {
    #[test]
    fn product_counts_and_bipartiteness(k1 in any::<u8>(), a1 in 1usize..6, b1 in 1usize..5,
                                        k2 in any::<u8>(), a2 in 1usize..6, b2 in 1usize..5) {
        let g = factor(k1, a1, b1);
        let h = factor(k2, a2, b2);
        let p = cartesian_product(&g, &h).unwrap();
        prop_assert_eq!(p.n(), g.n() * h.n());
        prop_assert_eq!(p.m(), g.m() * h.n() + g.n() * h.m());
        prop_assert_eq!(
            is_bipartite(&p).is_some(),
            is_bipartite(&g).is_some() && is_bipartite(&h).is_some()
        );
        for (x, y) in p.edges() {
            let (lx, ly) = (p.label(x).unwrap(), p.label(y).unwrap());
            let diffs = lx.iter().zip(ly).filter(|(a, b)| a != b).count();
            prop_assert_eq!(diffs, 1);
        }
    }

    #[test]
    fn faces_partition_the_darts(n in 2usize..10, extra in 0usize..15, seed in any::<u64>()) {
        let g = random_connected(n, extra, seed);
        let e = random_rotation(&g, seed ^ 0x5eed);
        prop_assert!(validate(&e).is_empty());
        let fs = trace_faces(&e).unwrap();
        prop_assert_eq!(fs.total_length(), 2 * g.m());
        let mut seen = HashSet::new();
        for f in fs.iter() {
            for d in f.darts() {
                prop_assert!(seen.insert(d));
            }
        }
        prop_assert_eq!(seen.len(), 2 * g.m());
        let least: Vec<Dart> = fs.iter().map(|f| f.least_dart()).collect();
        prop_assert!(least.windows(2).all(|w| w[0] < w[1]));
        prop_assert!(fs.iter().all(|f| f.walk[0] == f.least_dart().tail));

        let twice = 2 - g.n() as i64 + g.m() as i64 - fs.len() as i64;
        prop_assert!(twice >= 0 && twice % 2 == 0);
        let cert = euler_genus(&e).unwrap();
        prop_assert_eq!(cert.genus as i64 * 2, twice);
        if is_bipartite(&g).is_some() {
            prop_assert!(genus_lower_bound(&g).unwrap() <= cert.genus);
        }
        prop_assert!(cert.lower_bound <= cert.genus);
    }

    #[test]
    fn mirror_reverses_faces(n in 2usize..10, extra in 0usize..15, seed in any::<u64>()) {
        let g = random_connected(n, extra, seed);
        let e = random_rotation(&g, seed.rotate_left(7));
        let m = e.mirror();
        prop_assert_eq!(&m.mirror(), &e);
        let a = trace_faces(&e).unwrap();
        let b = trace_faces(&m).unwrap();
        prop_assert_eq!(a.len(), b.len());
        let mut la = a.lengths();
        let mut lb = b.lengths();
        la.sort();
        lb.sort();
        prop_assert_eq!(la, lb);
        for f in a.iter() {
            let ids: HashSet<usize> = f.darts().map(|d| b.face_of(d.reversed()).unwrap()).collect();
            prop_assert_eq!(ids.len(), 1);
            let id = *ids.iter().next().unwrap();
            prop_assert_eq!(b.faces()[id].len(), f.len());
        }
        prop_assert_eq!(euler_genus(&e).unwrap().genus, euler_genus(&m).unwrap().genus);
    }

    #[test]
    fn expressions_round_trip(atoms in prop::collection::vec(atom(), 1..6)) {
        let expr = FamilyExpr::from_atoms(atoms.clone()).unwrap();
        let text = expr.to_string();
        prop_assert_eq!(parse_family_expr(&text).unwrap(), expr.clone());
        let squeezed: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        prop_assert_eq!(parse_family_expr(&squeezed).unwrap(), expr);
    }

    #[test]
    fn handles_on_random_face_pairs(seed in any::<u64>(), count in 1usize..12) {
        let base = if seed % 2 == 0 { embed_cube(2, 1) } else { embed_cube_cycle(1, 2, 2) };
        let mut e = base.unwrap().embedding;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut done = 0;
        for _ in 0..count * 20 {
            if done == count {
                break;
            }
            let fs = trace_faces(&e).unwrap();
            let quads: Vec<QuadFace> = fs
                .iter()
                .filter(|f| f.len() == 4)
                .map(|f| QuadFace::new(f.walk.as_slice().try_into().unwrap()))
                .collect();
            let f1 = quads.choose(&mut rng).unwrap();
            let f2 = quads.choose(&mut rng).unwrap();
            let pairing = Pairing::opposite(rng.gen_range(0..4));
            let (chi, m, nq) = (euler_char(&e), e.graph().m(), quads.len() as i64);
            let mut next = e.clone();
            let Ok(rec) = apply_handle(&mut next, f1, f2, pairing) else {
                continue;
            };
            let quads_after = trace_faces(&next).unwrap().iter().filter(|f| f.len() == 4).count() as i64;
            prop_assert_eq!(euler_char(&next) - chi, -2);
            prop_assert_eq!(next.graph().m() - m, 4);
            prop_assert_eq!(quads_after - nq, 2);
            prop_assert_eq!(rec.delta_chi, -2);
            prop_assert_eq!(rec.delta_quad_faces, 2);
            prop_assert!(rec.all_quadrilateral);
            prop_assert!(validate(&next).is_empty());
            e = next;
            done += 1;
        }
        prop_assert!(done > 0);
    }
}
