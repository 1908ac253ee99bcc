use num_complex::Complex64;
use std::collections::{HashMap, VecDeque};
use std::f64::consts::PI;

use super::hexmap::HexagonMap;
use super::{Mesh, MeshMeta};
use crate::curve::{from_disk, principal_cbrt, CurvePoint, Disk, DiskPoint, Extended};
use crate::error::{Error, Result};
use crate::quadrature::{adaptive, IntegrationOptions};
use crate::weierstrass::BonnetAngle;

/// Which lifted domain a [`Patch`] covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum Domain {
    /// The preimage of `|z| >= 1`: twelve sectors of the upper disk around the point over infinity.
    Dodecagon,
    /// Two sectors of the upper disk glued to two sectors of the lower disk;
    /// its six boundary edges lie on symmetry lines of the surface.
    Hexagon,
}

impl Domain {
    pub fn name(self) -> &'static str {
        match self {
            Domain::Dodecagon => "dodecagon",
            Domain::Hexagon => "hexagon",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TreeOrder {
    BreadthFirst,
    DepthFirst,
}

/// A triangulated domain on the curve together with the complex Weierstrass
/// potentials of its vertices. Positions for any Bonnet angle are
/// `Re(e^{i theta} I)`.
#[derive(Debug, Clone)]
pub struct Patch {
    pub domain: Domain,
    pub n: usize,
    /// One disk parameter per vertex.
    pub params: Vec<DiskPoint>,
    pub triangles: Vec<[usize; 3]>,
    pub tri_disk: Vec<Disk>,
    pub corner_t: Vec<[Complex64; 3]>,
    pub boundary_arcs: Vec<Vec<usize>>,
    pub root: usize,
    pub potentials: Vec<[Complex64; 3]>,
}

/// Parameter of the base point `z0 = e^{i pi/4}` on the principal sheet.
pub fn base_parameter() -> DiskPoint {
    DiskPoint::upper(Complex64::from_polar(1.0, -0.75 * PI))
}

fn zeta12(k: usize) -> Complex64 {
    Complex64::from_polar(1.0, k as f64 * PI / 6.0)
}

/// Index `k` if `t` is the boundary branch point `e^{i k pi/6}`.
fn boundary_branch(t: Complex64) -> Option<usize> {
    if (t.norm() - 1.0).abs() > 1e-12 {
        return None;
    }
    let k = (t.im.atan2(t.re).rem_euclid(2.0 * PI) / (PI / 6.0)).round() as usize % 12;
    ((t - zeta12(k)).norm() < 1e-12).then_some(k)
}

fn numerator(disk: Disk, t: Complex64) -> ([Complex64; 3], f64) {
    let t3 = t * t * t;
    let t6 = t3 * t3;
    let i = Complex64::i();
    match disk {
        Disk::Upper => ([t6 - 1.0, i * (t6 + 1.0), 2.0 * t3], -3.0),
        Disk::Lower => ([1.0 - t6, i * (1.0 + t6), 2.0 * t3], 3.0),
    }
}

/// `theta = 0` Weierstrass integrand against `dt` in a disk chart.
pub fn disk_integrand(disk: Disk, t: Complex64) -> [Complex64; 3] {
    let (num, c) = numerator(disk, t);
    let rho = principal_cbrt(1.0 - t.powu(12));
    let f = c / (rho * rho);
    num.map(|v| v * f)
}

/// Integral of the `theta = 0` integrand along the straight segment from `a` to `b` in a disk.
///
/// Either endpoint may be a boundary branch point; the integral towards it is
/// regularized with `t = b + (a - b)(1 - s)^3`.
pub fn integrate_disk_segment(
    disk: Disk,
    a: Complex64,
    b: Complex64,
    opts: &IntegrationOptions,
) -> Result<[Complex64; 3]> {
    match (boundary_branch(a), boundary_branch(b)) {
        (Some(_), Some(_)) => Err(Error::InvalidArgument(
            "segment joins two branch points".into(),
        )),
        (None, None) => {
            let d = b - a;
            let (v, _) = adaptive(
                |s| Ok(disk_integrand(disk, a + d * s).map(|x| x * d)),
                0.0,
                1.0,
                opts,
            )?;
            Ok(v)
        }
        (None, Some(kb)) => regularized(disk, a, kb, opts),
        (Some(ka), None) => Ok(regularized(disk, b, ka, opts)?.map(|x| -x)),
    }
}

fn regularized(
    disk: Disk,
    a: Complex64,
    kb: usize,
    opts: &IntegrationOptions,
) -> Result<[Complex64; 3]> {
    let b = zeta12(kb);
    let ab = a - b;
    let f = |s: f64| {
        let tau = 1.0 - s;
        let delta = ab * (tau * tau * tau);
        let t = b + delta;
        // 1 - t^12 = -(t - b) prod_{j != kb} (t - zeta12^j), with t - b known exactly.
        let mut p = -delta;
        for j in (0..12).filter(|j| *j != kb) {
            p *= t - zeta12(j);
        }
        let rho_hat = principal_cbrt(p) / tau;
        let (num, c) = numerator(disk, t);
        let g = c * (-3.0) * ab / (rho_hat * rho_hat);
        Ok(num.map(|v| v * g))
    };
    Ok(adaptive(f, 0.0, 1.0, opts)?.0)
}

type VertexKey = (Disk, usize, i64, i64);

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Exact key of the grid point on ring `i` at angle `pi * num / den`.
fn key(disk: Disk, i: usize, num: i64, den: i64) -> VertexKey {
    if i == 0 {
        return (disk, 0, 0, 1);
    }
    let num = num.rem_euclid(2 * den);
    let g = gcd(num, den).max(1);
    (disk, i, num / g, den / g)
}

struct Builder {
    n: usize,
    /// Lattice points of the first 60 degree sector, when vertices are placed
    /// through the hexagon map instead of on polar rings.
    hex: Option<Vec<Vec<Complex64>>>,
    ids: HashMap<VertexKey, usize>,
    params: Vec<DiskPoint>,
    triangles: Vec<[usize; 3]>,
    tri_disk: Vec<Disk>,
    corner_t: Vec<[Complex64; 3]>,
}

impl Builder {
    fn new(n: usize) -> Self {
        Builder {
            n,
            hex: None,
            ids: HashMap::new(),
            params: Vec::new(),
            triangles: Vec::new(),
            tri_disk: Vec::new(),
            corner_t: Vec::new(),
        }
    }

    fn hexagonal(n: usize, opts: &IntegrationOptions) -> Result<Self> {
        let map = HexagonMap::new(opts)?;
        let table = (0..=n)
            .map(|i| {
                (0..=i)
                    .map(|m| map.point(0, i, m, n))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?;
        Ok(Builder {
            hex: Some(table),
            ..Builder::new(n)
        })
    }

    fn vertex(&mut self, k: VertexKey, t: Complex64) -> usize {
        if let Some(&id) = self.ids.get(&k) {
            return id;
        }
        let id = self.params.len();
        self.params.push(DiskPoint { disk: k.0, t });
        self.ids.insert(k, id);
        id
    }

    /// Grid point `m` of ring `i` in the sector between angles `a pi/12` and `b pi/12`.
    fn grid(&mut self, disk: Disk, a: i64, b: i64, i: usize, m: usize) -> (usize, Complex64) {
        let (num, den) = (a * i as i64 + (b - a) * m as i64, 12 * i.max(1) as i64);
        let t = match &self.hex {
            _ if i == 0 => Complex64::new(0.0, 0.0),
            Some(table) => Complex64::from_polar(1.0, a as f64 * PI / 12.0) * table[i][m],
            None => Complex64::from_polar(i as f64 / self.n as f64, PI * num as f64 / den as f64),
        };
        (self.vertex(key(disk, i, num, den), t), t)
    }

    fn sector(&mut self, disk: Disk, a: i64, b: i64) {
        let n = self.n;
        for i in 1..=n {
            let inner: Vec<_> = (0..i).map(|m| self.grid(disk, a, b, i - 1, m)).collect();
            let outer: Vec<_> = (0..=i).map(|m| self.grid(disk, a, b, i, m)).collect();
            let inner_at = |m: usize| if i == 1 { inner[0] } else { inner[m] };
            for m in 0..i {
                self.push(disk, [inner_at(m), outer[m], outer[m + 1]]);
                if m + 1 < i {
                    self.push(disk, [inner_at(m), outer[m + 1], inner_at(m + 1)]);
                }
            }
        }
    }

    fn push(&mut self, disk: Disk, corners: [(usize, Complex64); 3]) {
        self.triangles.push(corners.map(|c| c.0));
        self.tri_disk.push(disk);
        self.corner_t.push(corners.map(|c| c.1));
    }

    fn ray(
        &mut self,
        disk: Disk,
        a: i64,
        b: i64,
        m_of_ring: impl Fn(usize) -> usize,
        outward: bool,
    ) -> Vec<usize> {
        let mut ids: Vec<usize> = (0..=self.n)
            .map(|i| self.grid(disk, a, b, i, m_of_ring(i)).0)
            .collect();
        if !outward {
            ids.reverse();
        }
        ids
    }

    fn outer_arc(&mut self, disk: Disk, a: i64, b: i64) -> Vec<usize> {
        let n = self.n;
        (0..=n).map(|m| self.grid(disk, a, b, n, m).0).collect()
    }
}

impl Patch {
    fn assemble(
        domain: Domain,
        b: Builder,
        boundary_arcs: Vec<Vec<usize>>,
        opts: &IntegrationOptions,
    ) -> Result<Patch> {
        let root = b.ids[&key(Disk::Upper, 0, 0, 1)];
        let mut patch = Patch {
            domain,
            n: b.n,
            params: b.params,
            triangles: b.triangles,
            tri_disk: b.tri_disk,
            corner_t: b.corner_t,
            boundary_arcs,
            root,
            potentials: Vec::new(),
        };
        patch.potentials = patch.compute_potentials(TreeOrder::BreadthFirst, opts)?;
        Ok(patch)
    }

    fn edge_table(
        &self,
    ) -> (
        HashMap<(usize, usize), (Disk, Complex64, Complex64)>,
        Vec<Vec<usize>>,
    ) {
        let mut edges = HashMap::new();
        let mut adj = vec![Vec::new(); self.params.len()];
        for (f, tri) in self.triangles.iter().enumerate() {
            for k in 0..3 {
                let (u, v) = (tri[k], tri[(k + 1) % 3]);
                let (tu, tv) = (self.corner_t[f][k], self.corner_t[f][(k + 1) % 3]);
                let entry = if u < v {
                    (self.tri_disk[f], tu, tv)
                } else {
                    (self.tri_disk[f], tv, tu)
                };
                if edges.insert((u.min(v), u.max(v)), entry).is_none() {
                    adj[u].push(v);
                    adj[v].push(u);
                }
            }
        }
        for list in adj.iter_mut() {
            list.sort_unstable();
        }
        (edges, adj)
    }

    /// Integrates the potentials along a spanning tree of mesh edges grown from the root.
    pub fn compute_potentials(
        &self,
        order: TreeOrder,
        opts: &IntegrationOptions,
    ) -> Result<Vec<[Complex64; 3]>> {
        let (edges, adj) = self.edge_table();
        let zero = Complex64::new(0.0, 0.0);
        let mut pot: Vec<Option<[Complex64; 3]>> = vec![None; self.params.len()];
        pot[self.root] = Some(integrate_disk_segment(
            Disk::Upper,
            base_parameter().t,
            zero,
            opts,
        )?);
        let mut frontier = VecDeque::from([self.root]);
        while let Some(u) = match order {
            TreeOrder::BreadthFirst => frontier.pop_front(),
            TreeOrder::DepthFirst => frontier.pop_back(),
        } {
            let pu = pot[u].expect("frontier vertices are assigned");
            for &v in &adj[u] {
                if pot[v].is_some() {
                    continue;
                }
                let (disk, t_lo, t_hi) = edges[&(u.min(v), u.max(v))];
                let (ta, tb) = if u < v { (t_lo, t_hi) } else { (t_hi, t_lo) };
                let d = integrate_disk_segment(disk, ta, tb, opts)?;
                pot[v] = Some([pu[0] + d[0], pu[1] + d[1], pu[2] + d[2]]);
                frontier.push_back(v);
            }
        }
        pot.into_iter()
            .map(|p| p.ok_or(Error::InvalidArgument("patch is not connected".into())))
            .collect()
    }

    pub fn positions(&self, theta: BonnetAngle) -> Vec<[f64; 3]> {
        let phase = theta.phase();
        self.potentials
            .iter()
            .map(|p| [(phase * p[0]).re, (phase * p[1]).re, (phase * p[2]).re])
            .collect()
    }

    pub fn mesh(&self, theta: BonnetAngle) -> Mesh {
        Mesh {
            vertices: self.positions(theta),
            triangles: self.triangles.clone(),
            boundary_arcs: self.boundary_arcs.clone(),
            meta: MeshMeta {
                theta,
                domain: self.domain.name().into(),
                n: self.n,
            },
        }
    }

    pub fn curve_point(&self, v: usize) -> CurvePoint {
        from_disk(&self.params[v])
    }

    pub fn gauss_value(&self, v: usize) -> Extended {
        let t = self.params[v].t;
        match self.params[v].disk {
            Disk::Upper if t.norm() == 0.0 => Extended::Infinity,
            Disk::Upper => Extended::Finite((t * t * t).inv()),
            Disk::Lower => Extended::Finite(t * t * t),
        }
    }

    /// Vertices whose parameter is a boundary branch point.
    pub fn is_branch_vertex(&self, v: usize) -> bool {
        boundary_branch(self.params[v].t).is_some()
    }
}

/// Complex potentials on the dodecagon at resolution `n`, rounded up to even.
pub fn dodecagon_potentials(n: usize, opts: &IntegrationOptions) -> Result<Patch> {
    if n < 2 {
        return Err(Error::ResolutionTooLow(n));
    }
    // Six 60 degree sectors of one triangular lattice on the hexagon.
    let n = n + n % 2;
    let mut b = Builder::hexagonal(n, opts)?;
    for k in 0..6 {
        b.sector(Disk::Upper, 4 * k, 4 * k + 4);
    }
    let mut arcs = Vec::with_capacity(12);
    for k in 0..6 {
        let ring = b.outer_arc(Disk::Upper, 4 * k, 4 * k + 4);
        arcs.push(ring[..=n / 2].to_vec());
        arcs.push(ring[n / 2..].to_vec());
    }
    Patch::assemble(Domain::Dodecagon, b, arcs, opts)
}

/// The dodecagon patch: the preimage of `|z| >= 1`, centred on the point over infinity.
pub fn dodecagon_patch(theta: BonnetAngle, n: usize) -> Result<Mesh> {
    Ok(dodecagon_potentials(n, &IntegrationOptions::default())?.mesh(theta))
}

/// Complex potentials on the hexagon at resolution `n`.
pub fn hexagon_potentials(n: usize, opts: &IntegrationOptions) -> Result<Patch> {
    if n < 2 {
        return Err(Error::ResolutionTooLow(n));
    }
    let mut b = Builder::new(n);
    b.sector(Disk::Upper, 0, 2);
    b.sector(Disk::Upper, 2, 3);
    // The upper arc [0, pi/6] is glued to the lower arc [pi/2, 2pi/3], reversing direction.
    for m in 0..=n {
        let (id, _) = b.grid(Disk::Upper, 0, 2, n, m);
        b.ids.insert(
            key(Disk::Lower, n, 8 * n as i64 - 2 * m as i64, 12 * n as i64),
            id,
        );
    }
    b.sector(Disk::Lower, 6, 8);
    b.sector(Disk::Lower, 8, 9);
    let arcs = vec![
        b.ray(Disk::Upper, 0, 2, |_| 0, true),
        b.outer_arc(Disk::Lower, 8, 9),
        b.ray(Disk::Lower, 8, 9, |i| i, false),
        b.ray(Disk::Lower, 6, 8, |_| 0, true),
        b.outer_arc(Disk::Upper, 2, 3),
        b.ray(Disk::Upper, 2, 3, |i| i, false),
    ];
    Patch::assemble(Domain::Hexagon, b, arcs, opts)
}

pub fn hexagon_patch(theta: BonnetAngle, n: usize) -> Result<Mesh> {
    Ok(hexagon_potentials(n, &IntegrationOptions::default())?.mesh(theta))
}
