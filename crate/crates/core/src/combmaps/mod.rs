//! Maps on oriented surfaces as pairs of dart permutations.
//!
//! `sigma` rotates a dart around its vertex, `alpha` swaps the two darts of an
//! edge, and `sigma . alpha` walks around a face.

mod cover;
mod s312;

pub use cover::{build_base_sphere, build_cyclic_cover, CyclicCover};
pub use s312::{build_s312, S312};

use std::collections::VecDeque;

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CombMap {
    sigma: Vec<usize>,
    alpha: Vec<usize>,
}

fn is_permutation(p: &[usize]) -> bool {
    let mut seen = vec![false; p.len()];
    p.iter()
        .all(|&x| x < p.len() && !std::mem::replace(&mut seen[x], true))
}

fn inverse(p: &[usize]) -> Vec<usize> {
    let mut q = vec![0; p.len()];
    for (i, &x) in p.iter().enumerate() {
        q[x] = i;
    }
    q
}

pub fn orbits(p: &[usize]) -> Vec<Vec<usize>> {
    let mut seen = vec![false; p.len()];
    let mut out = Vec::new();
    for s in 0..p.len() {
        if seen[s] {
            continue;
        }
        let mut cycle = Vec::new();
        let mut d = s;
        while !seen[d] {
            seen[d] = true;
            cycle.push(d);
            d = p[d];
        }
        out.push(cycle);
    }
    out
}

/// Order of a permutation as the lcm of its cycle lengths.
pub fn order(p: &[usize]) -> usize {
    fn gcd(a: usize, b: usize) -> usize {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }
    orbits(p)
        .iter()
        .fold(1, |acc, c| acc / gcd(acc, c.len()) * c.len())
}

impl CombMap {
    pub fn new(sigma: Vec<usize>, alpha: Vec<usize>) -> Result<CombMap> {
        if sigma.len() != alpha.len() || !is_permutation(&sigma) || !is_permutation(&alpha) {
            return Err(Error::InvalidArgument(
                "sigma and alpha must be permutations of the same darts".into(),
            ));
        }
        if alpha
            .iter()
            .enumerate()
            .any(|(d, &e)| e == d || alpha[e] != d)
        {
            return Err(Error::InvalidArgument(
                "alpha must be a fixed-point-free involution".into(),
            ));
        }
        Ok(CombMap { sigma, alpha })
    }

    /// Builds the map whose faces are the given dart cycles; `alpha` pairs darts
    /// along edges. Darts are numbered in order of appearance.
    pub fn from_faces(faces: &[Vec<usize>], alpha: Vec<usize>) -> Result<CombMap> {
        let mut phi = vec![usize::MAX; alpha.len()];
        for f in faces {
            for (k, &d) in f.iter().enumerate() {
                if d >= phi.len() || phi[d] != usize::MAX {
                    return Err(Error::InvalidArgument(format!(
                        "dart {d} is listed twice or out of range"
                    )));
                }
                phi[d] = f[(k + 1) % f.len()];
            }
        }
        if phi.contains(&usize::MAX) {
            return Err(Error::InvalidArgument("some darts lie on no face".into()));
        }
        let sigma = alpha.iter().map(|&a| phi[a]).collect();
        CombMap::new(sigma, alpha)
    }

    /// Oriented triangles on labelled vertices, without repeated edges. The dart
    /// `3 f + k` runs from corner `k` to corner `k + 1` of triangle `f`.
    pub fn from_triangles(tris: &[[usize; 3]]) -> Result<CombMap> {
        let mut by_edge = std::collections::HashMap::new();
        for (f, t) in tris.iter().enumerate() {
            for k in 0..3 {
                if by_edge.insert((t[k], t[(k + 1) % 3]), 3 * f + k).is_some() {
                    return Err(Error::InvalidArgument(format!(
                        "directed edge {:?} repeated",
                        (t[k], t[(k + 1) % 3])
                    )));
                }
            }
        }
        let mut alpha = vec![0; 3 * tris.len()];
        for (&(u, v), &d) in &by_edge {
            alpha[d] = *by_edge.get(&(v, u)).ok_or_else(|| {
                Error::InvalidArgument(format!("edge {:?} has no opposite", (u, v)))
            })?;
        }
        let faces: Vec<Vec<usize>> = (0..tris.len())
            .map(|f| vec![3 * f, 3 * f + 1, 3 * f + 2])
            .collect();
        CombMap::from_faces(&faces, alpha)
    }

    pub fn n_darts(&self) -> usize {
        self.sigma.len()
    }

    pub fn sigma(&self) -> &[usize] {
        &self.sigma
    }

    pub fn alpha(&self) -> &[usize] {
        &self.alpha
    }

    /// Face successor `sigma . alpha`.
    pub fn phi(&self) -> Vec<usize> {
        self.alpha.iter().map(|&a| self.sigma[a]).collect()
    }

    pub fn vertices(&self) -> Vec<Vec<usize>> {
        orbits(&self.sigma)
    }

    pub fn edges(&self) -> Vec<Vec<usize>> {
        orbits(&self.alpha)
    }

    pub fn faces(&self) -> Vec<Vec<usize>> {
        orbits(&self.phi())
    }

    /// Vertex index of every dart, in the order of [`Self::vertices`].
    pub fn vertex_of(&self) -> Vec<usize> {
        let mut out = vec![0; self.n_darts()];
        for (v, orbit) in self.vertices().iter().enumerate() {
            for &d in orbit {
                out[d] = v;
            }
        }
        out
    }

    pub fn euler(&self) -> i64 {
        self.vertices().len() as i64 - self.edges().len() as i64 + self.faces().len() as i64
    }

    pub fn genus(&self) -> i64 {
        (2 - self.euler()) / 2
    }

    pub fn is_connected(&self) -> bool {
        self.components() == 1
    }

    pub fn components(&self) -> usize {
        let mut seen = vec![false; self.n_darts()];
        let mut count = 0;
        for s in 0..self.n_darts() {
            if seen[s] {
                continue;
            }
            count += 1;
            seen[s] = true;
            let mut queue = vec![s];
            while let Some(d) = queue.pop() {
                for e in [self.sigma[d], self.alpha[d]] {
                    if !seen[e] {
                        seen[e] = true;
                        queue.push(e);
                    }
                }
            }
        }
        count
    }

    pub fn is_triangulation(&self) -> bool {
        self.faces().iter().all(|f| f.len() == 3)
    }

    /// Replaces the edge of dart `d` by the other diagonal of the quadrilateral
    /// formed by its two triangles. Dart ids are kept; `d` and `alpha(d)` become
    /// the new edge.
    pub fn flip(&self, d: usize) -> Result<CombMap> {
        let phi = self.phi();
        let e = self.alpha[d];
        let (d1, d2) = (phi[d], phi[phi[d]]);
        let (e1, e2) = (phi[e], phi[phi[e]]);
        if phi[d2] != d || phi[e2] != e {
            return Err(Error::PairingFailure);
        }
        if [d1, d2].contains(&e) || [e1, e2].contains(&d) {
            return Err(Error::PairingFailure);
        }
        // Triangles (a b c) and (b a x) become (c a x) and (x b c).
        let mut next = phi;
        next[d2] = e1;
        next[e1] = d;
        next[d] = d2;
        next[e2] = d1;
        next[d1] = e;
        next[e] = e2;
        let sigma = self.alpha.iter().map(|&a| next[a]).collect();
        CombMap::new(sigma, self.alpha.clone())
    }

    /// `{"sigma": [...], "alpha": [...]}`.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("plain integer vectors serialize")
    }

    /// Graphviz description of the vertex-edge graph.
    pub fn to_dot(&self) -> String {
        let vertex = self.vertex_of();
        let mut out = String::from("graph map {\n");
        for edge in self.edges() {
            out.push_str(&format!(
                "  v{} -- v{} [label=\"e{}\"];\n",
                vertex[edge[0]], vertex[edge[1]], edge[0]
            ));
        }
        out.push_str("}\n");
        out
    }
}

/// Extends `from -> to` to a map `m1 -> m2` commuting with `alpha` and with
/// `sigma` (or conjugating `sigma` to its inverse when `reverse` is set).
fn propagate(
    m1: &CombMap,
    m2: &CombMap,
    from: usize,
    to: usize,
    reverse: bool,
) -> Option<Vec<usize>> {
    let n = m1.n_darts();
    if m2.n_darts() != n {
        return None;
    }
    let sigma2 = if reverse {
        inverse(&m2.sigma)
    } else {
        m2.sigma.clone()
    };
    let mut f = vec![usize::MAX; n];
    let mut used = vec![false; n];
    f[from] = to;
    used[to] = true;
    let mut queue = VecDeque::from([from]);
    while let Some(d) = queue.pop_front() {
        for (a, b) in [(m1.sigma[d], sigma2[f[d]]), (m1.alpha[d], m2.alpha[f[d]])] {
            if f[a] == usize::MAX {
                if used[b] {
                    return None;
                }
                f[a] = b;
                used[b] = true;
                queue.push_back(a);
            } else if f[a] != b {
                return None;
            }
        }
    }
    if f.contains(&usize::MAX) {
        return None;
    }
    Some(f)
}

/// Orientation of an isomorphism found by [`is_isomorphic`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Orientation {
    Preserving,
    Reversing,
}

/// A dart bijection `m1 -> m2` respecting the map structure, preferring an
/// orientation-preserving one.
pub fn is_isomorphic(m1: &CombMap, m2: &CombMap) -> Option<(Vec<usize>, Orientation)> {
    if m1.n_darts() != m2.n_darts() || m1.n_darts() == 0 || !m1.is_connected() {
        return None;
    }
    for (reverse, kind) in [
        (false, Orientation::Preserving),
        (true, Orientation::Reversing),
    ] {
        for to in 0..m2.n_darts() {
            if let Some(f) = propagate(m1, m2, 0, to, reverse) {
                return Some((f, kind));
            }
        }
    }
    None
}

/// All automorphisms; orientation-reversing ones are included unless
/// `orientation_preserving` is set.
pub fn automorphisms(m: &CombMap, orientation_preserving: bool) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let kinds: &[bool] = if orientation_preserving {
        &[false]
    } else {
        &[false, true]
    };
    for &reverse in kinds {
        for to in 0..m.n_darts() {
            if let Some(f) = propagate(m, m, 0, to, reverse) {
                out.push(f);
            }
        }
    }
    out
}

pub fn automorphism_count(m: &CombMap, orientation_preserving: bool) -> usize {
    automorphisms(m, orientation_preserving).len()
}

pub fn is_automorphism(m: &CombMap, a: &[usize]) -> bool {
    a.len() == m.n_darts()
        && is_permutation(a)
        && (0..m.n_darts())
            .all(|d| a[m.sigma[d]] == m.sigma[a[d]] && a[m.alpha[d]] == m.alpha[a[d]])
}

/// The rotation about the vertex of `d` by one dart, if the map has it.
pub fn vertex_rotation(m: &CombMap, d: usize) -> Option<Vec<usize>> {
    propagate(m, m, d, m.sigma[d], false)
}

pub fn compose(a: &[usize], b: &[usize]) -> Vec<usize> {
    b.iter().map(|&x| a[x]).collect()
}

pub fn power(a: &[usize], k: usize) -> Vec<usize> {
    let mut out: Vec<usize> = (0..a.len()).collect();
    for _ in 0..k {
        out = compose(a, &out);
    }
    out
}

/// The map on orbits of an order-3 automorphism acting freely on darts.
pub fn quotient_by(m: &CombMap, a: &[usize]) -> Result<CombMap> {
    if !is_automorphism(m, a) {
        return Err(Error::NotAutomorphism);
    }
    let found = order(a);
    if found != 3 {
        return Err(Error::WrongOrder { expected: 3, found });
    }
    if (0..a.len()).any(|d| a[d] == d) {
        return Err(Error::NotFree);
    }
    let classes = orbits(a);
    let mut class_of = vec![0; a.len()];
    for (c, orbit) in classes.iter().enumerate() {
        for &d in orbit {
            class_of[d] = c;
        }
    }
    let reps: Vec<usize> = classes.iter().map(|c| c[0]).collect();
    let sigma: Vec<usize> = reps.iter().map(|&d| class_of[m.sigma[d]]).collect();
    let alpha: Vec<usize> = reps.iter().map(|&d| class_of[m.alpha[d]]).collect();
    if alpha.iter().enumerate().any(|(c, &e)| c == e) {
        return Err(Error::NotFree);
    }
    CombMap::new(sigma, alpha)
}

/// The octahedron with outward-oriented faces.
pub fn octahedron() -> CombMap {
    // Vertices: +x, -x, +y, -y, +z, -z.
    let (px, nx, py, ny, pz, nz) = (0, 1, 2, 3, 4, 5);
    let tris = [
        [px, py, pz],
        [py, nx, pz],
        [nx, ny, pz],
        [ny, px, pz],
        [py, px, nz],
        [nx, py, nz],
        [ny, nx, nz],
        [px, ny, nz],
    ];
    CombMap::from_triangles(&tris).expect("octahedron faces close up")
}
