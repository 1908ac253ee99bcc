use std::sync::OnceLock;

use iwp::quadrature::IntegrationOptions;
use iwp::surface_mesh::{
    conformality_error, dodecagon_potentials, export, extend_by_reflections, fit_plane,
    hexagon_patch, normal_deviation, read_obj, MeshFormat, Patch, TreeOrder,
};
use iwp::weierstrass::BonnetAngle;
use proptest::prelude::*;

fn patch() -> &'static Patch {
    static P: OnceLock<Patch> = OnceLock::new();
    P.get_or_init(|| dodecagon_potentials(6, &IntegrationOptions::default()).unwrap())
}

fn scale(points: &[[f64; 3]]) -> f64 {
    points
        .iter()
        .map(|p| p.iter().map(|x| x.abs()).fold(0.0, f64::max))
        .fold(1.0, f64::max)
}

#[test]
fn spanning_trees_give_the_same_potentials() {
    let opts = IntegrationOptions::default();
    let p = dodecagon_potentials(10, &opts).unwrap();
    let dfs = p.compute_potentials(TreeOrder::DepthFirst, &opts).unwrap();
    let tol = 10.0
        * opts.rtol
        * p.potentials
            .iter()
            .flatten()
            .map(|z| z.norm())
            .fold(1.0, f64::max);
    for (a, b) in p.potentials.iter().zip(&dfs) {
        for i in 0..3 {
            assert!((a[i] - b[i]).norm() < tol);
        }
    }
}

#[test]
fn dodecagon_counts() {
    for n in [2, 4, 8] {
        let m = dodecagon_potentials(n, &IntegrationOptions::default())
            .unwrap()
            .mesh(BonnetAngle::new(0.0));
        m.validate().unwrap();
        assert_eq!(m.triangles.len(), 6 * n * n);
        assert_eq!(m.boundary_arcs.len(), 12);
        // Disk: V - E + F = 1.
        let e = (3 * m.triangles.len() + m.boundary_edges().len()) / 2;
        assert_eq!(
            m.vertices.len() as i64 - e as i64 + m.triangles.len() as i64,
            1
        );
    }
}

#[test]
fn normals_and_conformality_at_sixteen() {
    let p = dodecagon_potentials(16, &IntegrationOptions::default()).unwrap();
    let m = p.mesh(BonnetAngle::new(0.0));
    assert!(normal_deviation(&p, &m) < 0.02);
    assert!(conformality_error(&p, &m) < 0.05);
}

#[test]
fn reflected_copies_fit_together() {
    let m = hexagon_patch(BonnetAngle::new(0.0), 6).unwrap();
    let e = extend_by_reflections(&m, 1).unwrap();
    e.validate().unwrap();
    for arc in &m.boundary_arcs {
        let fit = fit_plane(&arc.iter().map(|&i| m.point(i)).collect::<Vec<_>>()).unwrap();
        assert!(fit.max_deviation < 1e-8 * m.diameter(), "{fit:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn half_turn_negates(theta in 0.0..std::f64::consts::TAU) {
        let a = patch().positions(BonnetAngle::new(theta));
        let b = patch().positions(BonnetAngle::new(theta + std::f64::consts::PI));
        let s = scale(&a);
        for (p, q) in a.iter().zip(&b) {
            for i in 0..3 {
                prop_assert!((p[i] + q[i]).abs() < 1e-12 * s);
            }
        }
    }

    #[test]
    fn family_is_a_rotation_of_two_members(theta in 0.0..std::f64::consts::TAU) {
        let f0 = patch().positions(BonnetAngle::new(0.0));
        let f90 = patch().positions(BonnetAngle::from_degrees(90.0));
        let ft = patch().positions(BonnetAngle::new(theta));
        let s = scale(&f0);
        for v in 0..ft.len() {
            for i in 0..3 {
                let want = theta.cos() * f0[v][i] + theta.sin() * f90[v][i];
                prop_assert!((ft[v][i] - want).abs() < 1e-12 * s);
            }
        }
    }

    #[test]
    fn obj_round_trip_is_bitwise(theta in -360.0..360.0f64) {
        let m = patch().mesh(BonnetAngle::from_degrees(theta));
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.obj");
        export(&m, MeshFormat::Obj, &path).unwrap();
        let (v, t) = read_obj(&path).unwrap();
        prop_assert_eq!(v, m.vertices.clone());
        prop_assert_eq!(t, m.triangles.clone());
        let ply = dir.path().join("m.ply");
        export(&m, MeshFormat::Ply, &ply).unwrap();
        let text = std::fs::read_to_string(&ply).unwrap();
        let header = format!("element vertex {}", m.vertices.len());
        prop_assert!(text.contains(&header));
        prop_assert_eq!(text.lines().count(), 9 + m.vertices.len() + m.triangles.len());
    }
}
