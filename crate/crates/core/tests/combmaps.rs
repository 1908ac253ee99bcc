use iwp::combmaps::{
    automorphism_count, build_base_sphere, build_cyclic_cover, build_s312, is_automorphism,
    is_isomorphic, octahedron, orbits, order, power, quotient_by, vertex_rotation, CombMap,
    Orientation,
};
use iwp::flat_hyperbolic::retile_equilateral;
use iwp::Error;
use proptest::prelude::*;

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// `pi sigma pi^-1`, `pi alpha pi^-1`.
fn relabel(m: &CombMap, pi: &[usize]) -> CombMap {
    let n = m.n_darts();
    let mut sigma = vec![0; n];
    let mut alpha = vec![0; n];
    for d in 0..n {
        sigma[pi[d]] = pi[m.sigma()[d]];
        alpha[pi[d]] = pi[m.alpha()[d]];
    }
    CombMap::new(sigma, alpha).unwrap()
}

fn shuffle(n: usize, keys: &[u64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by_key(|&i| {
        (
            keys[i % keys.len()].wrapping_mul(i as u64 + 1) ^ (i as u64 * 2654435761),
            i,
        )
    });
    let mut pi = vec![0; n];
    for (new, &old) in idx.iter().enumerate() {
        pi[old] = new;
    }
    pi
}

#[test]
fn theorem_chain_end_to_end() {
    let cover = build_cyclic_cover(&build_base_sphere(), [1, 4, 7], 12).unwrap();
    assert_eq!(cover.map.euler(), -6);
    let retiled = retile_equilateral(&cover).unwrap();
    let s = build_s312();
    let (_, orientation) =
        is_isomorphic(&retiled, &s.map).expect("re-tiling is the polyhedral map");
    assert_eq!(orientation, Orientation::Preserving);
    let op = automorphism_count(&s.map, true);
    assert_eq!(op, 72);
    // Platonic: the rotation group acts simply transitively on darts.
    assert_eq!(op, s.map.n_darts());
    assert_eq!(automorphism_count(&s.map, false), 144);
    let g = vertex_rotation(&s.map, 5).unwrap();
    assert_eq!(order(&g), 12);
    let q = quotient_by(&s.map, &power(&g, 4)).unwrap();
    assert!(is_isomorphic(&q, &octahedron()).is_some());
    assert!(matches!(
        quotient_by(&s.map, &power(&g, 3)),
        Err(Error::WrongOrder {
            expected: 3,
            found: 4
        })
    ));
}

#[test]
fn riemann_hurwitz_for_the_fixed_cover() {
    // 12 sheets over a sphere with three branch points: chi = 12 * 2 - sum (12 - fiber).
    let c = build_cyclic_cover(&build_base_sphere(), [1, 4, 7], 12).unwrap();
    let fibers = c.fiber_sizes();
    let deficiency: usize = fibers.iter().map(|f| 12 - f).sum();
    assert_eq!(24 - deficiency as i64, c.map.euler());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cyclic_covers_obey_riemann_hurwitz(n in 2usize..16, d1 in 0usize..16, d2 in 0usize..16) {
        let (d1, d2) = (d1 % n, d2 % n);
        let d3 = (2 * n - d1 - d2) % n;
        match build_cyclic_cover(&build_base_sphere(), [d1, d2, d3], n) {
            Ok(c) => {
                let fibers = [d1, d2, d3].map(|d| gcd(d, n));
                prop_assert_eq!(c.fiber_sizes(), fibers);
                let chi = 2 * n as i64 - fibers.iter().map(|f| (n - f) as i64).sum::<i64>();
                prop_assert_eq!(c.map.euler(), chi);
                prop_assert_eq!(c.map.euler(), 2 - 2 * c.map.genus());
                prop_assert_eq!(c.map.faces().len(), 2 * n);
                prop_assert_eq!(c.map.edges().len(), 3 * n);
            }
            Err(Error::DisconnectedCover { components }) => {
                prop_assert_eq!(components, gcd(gcd(gcd(d1, d2), d3), n));
            }
            Err(e) => prop_assert!(false, "unexpected {e:?}"),
        }
    }

    #[test]
    fn relabelled_maps_are_isomorphic(keys in prop::collection::vec(any::<u64>(), 1..8)) {
        let m = octahedron();
        let pi = shuffle(m.n_darts(), &keys);
        let r = relabel(&m, &pi);
        let (iso, orientation) = is_isomorphic(&m, &r).unwrap();
        prop_assert_eq!(orientation, Orientation::Preserving);
        prop_assert_eq!(automorphism_count(&r, true), 24);
        for d in 0..m.n_darts() {
            prop_assert_eq!(r.sigma()[iso[d]], iso[m.sigma()[d]]);
            prop_assert_eq!(r.alpha()[iso[d]], iso[m.alpha()[d]]);
        }
    }

    #[test]
    fn flips_preserve_counts_and_automorphisms_compose(d in 0usize..72, k in 1usize..12) {
        let s = build_s312();
        let f = s.map.flip(d).unwrap();
        prop_assert_eq!(f.edges().len(), 36);
        prop_assert_eq!(f.faces().len(), 24);
        prop_assert_eq!(f.euler(), -6);
        prop_assert!(f.is_triangulation());
        let g = vertex_rotation(&s.map, d).unwrap();
        prop_assert!(is_automorphism(&s.map, &power(&g, k)));
        prop_assert_eq!(orbits(&g).len(), 72 / 12);
    }
}
