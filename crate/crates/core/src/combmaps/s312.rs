use std::collections::{BTreeMap, HashMap, VecDeque};

use super::CombMap;

/// Points are stored in quarter units so that the 1:3 division of cube edges is
/// exact.
type P = [i64; 3];

const CELL: i64 = 4;

/// A regular octahedron with vertices at the 1:3 points of the edges of the unit
/// cube, minus the two faces cutting off the corners `(0,0,0)` and `(1,1,1)`.
const OCTAHEDRON: [P; 6] = [
    [0, 0, 3],
    [0, 3, 0],
    [3, 0, 0],
    [1, 4, 4],
    [4, 1, 4],
    [4, 4, 1],
];
const REMOVED: [[usize; 3]; 2] = [[0, 1, 2], [3, 4, 5]];

/// The polyhedral surface `3^12` modulo its translation lattice.
#[derive(Debug, Clone)]
pub struct S312 {
    pub map: CombMap,
    /// Position of each map vertex in one fundamental domain (unit cube edge = 1).
    pub vertices: Vec<[f64; 3]>,
    /// Corner positions of each face, following the face's dart order.
    pub faces: Vec<[[f64; 3]; 3]>,
    /// The twelve edge lengths of the annulus in the cube `[0, 1]^3`.
    pub annulus_edges: Vec<f64>,
    /// The six triangles of that annulus.
    pub annulus: Vec<[[f64; 3]; 3]>,
}

fn dist2(a: P, b: P) -> i64 {
    (0..3).map(|i| (a[i] - b[i]).pow(2)).sum()
}

fn unit(p: P) -> [f64; 3] {
    p.map(|x| x as f64 / CELL as f64)
}

/// Lateral faces of the antiprism.
fn annulus_faces() -> Vec<[usize; 3]> {
    let edge = dist2(OCTAHEDRON[0], OCTAHEDRON[1]);
    let mut out = Vec::new();
    for i in 0..6 {
        for j in i + 1..6 {
            for k in j + 1..6 {
                let t = [i, j, k];
                let regular = [(i, j), (j, k), (i, k)]
                    .iter()
                    .all(|&(a, b)| dist2(OCTAHEDRON[a], OCTAHEDRON[b]) == edge);
                if regular && !REMOVED.contains(&t) {
                    out.push(t);
                }
            }
        }
    }
    out
}

/// Lattice generated by `2 e_i` and `(1, 1, 1)`, in quarter units.
fn reduce(p: P) -> P {
    let m = 2 * CELL;
    let a = p.map(|x| x.rem_euclid(m));
    let b = p.map(|x| (x + CELL).rem_euclid(m));
    a.min(b)
}

fn shift(p: P, from: P, to: P) -> P {
    [
        p[0] + to[0] - from[0],
        p[1] + to[1] - from[1],
        p[2] + to[2] - from[2],
    ]
}

/// Lattice class of an ordered segment.
fn ordered_key(p: P, q: P) -> (P, P) {
    let r = reduce(p);
    (r, shift(q, p, r))
}

fn edge_key(p: P, q: P) -> (P, P) {
    ordered_key(p, q).min(ordered_key(q, p))
}

fn triangle_key(t: [P; 3]) -> [P; 3] {
    (0..3)
        .map(|a| {
            let r = reduce(t[a]);
            let mut s = t.map(|x| shift(x, t[a], r));
            s.sort();
            s
        })
        .min()
        .expect("three anchors")
}

fn reflect(p: P, s: [bool; 3]) -> P {
    [0, 1, 2].map(|i| if s[i] { 2 * CELL - p[i] } else { p[i] })
}

pub fn build_s312() -> S312 {
    let base = annulus_faces();
    let mut lateral: Vec<[P; 3]> = Vec::new();
    for mask in 0..8u8 {
        let s = [mask & 1 != 0, mask & 2 != 0, mask & 4 != 0];
        for t in &base {
            lateral.push(t.map(|i| reflect(OCTAHEDRON[i], s)));
        }
    }
    let mut classes: BTreeMap<[P; 3], [P; 3]> = BTreeMap::new();
    for t in &lateral {
        classes.entry(triangle_key(*t)).or_insert(*t);
    }
    let mut tris: Vec<[P; 3]> = classes.into_values().collect();

    let mut by_edge: HashMap<(P, P), Vec<usize>> = HashMap::new();
    for (f, t) in tris.iter().enumerate() {
        for k in 0..3 {
            by_edge
                .entry(edge_key(t[k], t[(k + 1) % 3]))
                .or_default()
                .push(f);
        }
    }
    // Orient by propagation: neighbours must traverse a shared edge oppositely.
    let contains =
        |t: &[P; 3], key: (P, P)| (0..3).any(|k| ordered_key(t[k], t[(k + 1) % 3]) == key);
    let mut done = vec![false; tris.len()];
    done[0] = true;
    let mut queue = VecDeque::from([0]);
    while let Some(f) = queue.pop_front() {
        for k in 0..3 {
            let (p, q) = (tris[f][k], tris[f][(k + 1) % 3]);
            for &g in &by_edge[&edge_key(p, q)] {
                if g == f {
                    continue;
                }
                let want = ordered_key(q, p);
                if done[g] {
                    assert!(contains(&tris[g], want), "surface is not orientable");
                    continue;
                }
                if !contains(&tris[g], want) {
                    tris[g].swap(1, 2);
                }
                done[g] = true;
                queue.push_back(g);
            }
        }
    }

    let mut dart_of: HashMap<(P, P), usize> = HashMap::new();
    for (f, t) in tris.iter().enumerate() {
        for k in 0..3 {
            let prev = dart_of.insert(ordered_key(t[k], t[(k + 1) % 3]), 3 * f + k);
            assert!(prev.is_none(), "directed edge used twice");
        }
    }
    let alpha: Vec<usize> = (0..3 * tris.len())
        .map(|d| {
            let t = tris[d / 3];
            let k = d % 3;
            dart_of[&ordered_key(t[(k + 1) % 3], t[k])]
        })
        .collect();
    let faces: Vec<Vec<usize>> = (0..tris.len())
        .map(|f| vec![3 * f, 3 * f + 1, 3 * f + 2])
        .collect();
    let map = CombMap::from_faces(&faces, alpha).expect("quotient triangulation is a map");

    let vertex = map.vertex_of();
    let mut vertices = vec![[0.0; 3]; map.vertices().len()];
    for (d, &v) in vertex.iter().enumerate() {
        vertices[v] = unit(reduce(tris[d / 3][d % 3]));
    }

    let annulus: Vec<[P; 3]> = base.iter().map(|t| t.map(|i| OCTAHEDRON[i])).collect();
    let mut edges: BTreeMap<(P, P), f64> = BTreeMap::new();
    for t in &annulus {
        for k in 0..3 {
            let (p, q) = (t[k].min(t[(k + 1) % 3]), t[k].max(t[(k + 1) % 3]));
            edges.insert((p, q), (dist2(p, q) as f64).sqrt() / CELL as f64);
        }
    }
    S312 {
        map,
        vertices,
        faces: tris.iter().map(|t| t.map(unit)).collect(),
        annulus_edges: edges.into_values().collect(),
        annulus: annulus.iter().map(|t| t.map(unit)).collect(),
    }
}
