use super::CombMap;
use crate::error::{Error, Result};

/// Dart ids of the doubled triangle. `a` joins `p1` and `p2`, `b` joins `p2` and
/// `p3`, `c` joins `p3` and `p1`; the suffix names the vertex of the dart.
const A1: usize = 0;
const A2: usize = 1;
const B2: usize = 2;
const B3: usize = 3;
const C3: usize = 4;
const C1: usize = 5;

/// Vertex class of each base dart.
const BASE_CLASS: [usize; 6] = [0, 1, 1, 2, 2, 0];

/// The sphere as two triangles `p1 p2 p3` glued along their boundary.
pub fn build_base_sphere() -> CombMap {
    let mut alpha = vec![0; 6];
    let mut sigma = vec![0; 6];
    for (x, y) in [(A1, A2), (B2, B3), (C3, C1)] {
        alpha[x] = y;
        alpha[y] = x;
    }
    for (x, y) in [(A1, C1), (B2, A2), (C3, B3)] {
        sigma[x] = y;
        sigma[y] = x;
    }
    CombMap::new(sigma, alpha).expect("doubled triangle is a valid map")
}

/// A cyclic branched cover of the doubled triangle together with its projection.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CyclicCover {
    pub map: CombMap,
    pub monodromy: [usize; 3],
    pub sheets: usize,
    /// The base dart below each dart.
    pub base_dart: Vec<usize>,
    /// The sheet of each dart.
    pub sheet: Vec<usize>,
}

impl CyclicCover {
    /// Which of `p1, p2, p3` the vertex of dart `d` lies over.
    pub fn vertex_class(&self, d: usize) -> usize {
        BASE_CLASS[self.base_dart[d]]
    }

    /// Number of cover vertices over each base vertex.
    pub fn fiber_sizes(&self) -> [usize; 3] {
        let mut out = [0; 3];
        for orbit in self.map.vertices() {
            out[self.vertex_class(orbit[0])] += 1;
        }
        out
    }

    /// Whether `d` lies over one of the two base triangles; `true` for `(p1 p2 p3)`.
    pub fn over_first_face(&self, d: usize) -> bool {
        [A1, B2, C3].contains(&self.base_dart[d])
    }

    /// Darts over the edge `p_i p_{i+1}` (indices mod 3).
    pub fn over_edge(&self, d: usize) -> usize {
        self.base_dart[d] / 2
    }
}

/// The `n`-sheeted cyclic cover branched over the three vertices of
/// [`build_base_sphere`], where winding once around `p_j` raises the sheet by
/// `monodromy[j]`.
pub fn build_cyclic_cover(base: &CombMap, monodromy: [usize; 3], n: usize) -> Result<CyclicCover> {
    if *base != build_base_sphere() {
        return Err(Error::InvalidArgument(
            "cyclic covers are built over the doubled triangle only".into(),
        ));
    }
    if n == 0 {
        return Err(Error::InvalidArgument(
            "a cover needs at least one sheet".into(),
        ));
    }
    if monodromy.iter().sum::<usize>() % n != 0 {
        return Err(Error::InconsistentMonodromy(n));
    }
    let dart = |d: usize, i: usize| 6 * (i % n) + d;
    let mut sigma = vec![0; 6 * n];
    let mut alpha = vec![0; 6 * n];
    for i in 0..n {
        for d in 0..6 {
            // The cut runs through the first triangle: leaving it around a vertex
            // changes sheet.
            let shift = if [A1, B2, C3].contains(&d) {
                monodromy[BASE_CLASS[d]]
            } else {
                0
            };
            sigma[dart(d, i)] = dart(base.sigma()[d], i + shift);
            alpha[dart(d, i)] = dart(base.alpha()[d], i);
        }
    }
    let map = CombMap::new(sigma, alpha)?;
    let components = map.components();
    if components != 1 {
        return Err(Error::DisconnectedCover { components });
    }
    Ok(CyclicCover {
        map,
        monodromy,
        sheets: n,
        base_dart: (0..6 * n).map(|x| x % 6).collect(),
        sheet: (0..6 * n).map(|x| x / 6).collect(),
    })
}
