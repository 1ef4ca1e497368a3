//! Qudit placement, metric and neighborhoods.
//!
//! Two geometries are supported. Lattice models live on a flat d-torus with
//! the Euclidean quotient metric. Qudits laid on a triangulation sit at the
//! midpoints of the edges of an iterated barycentric subdivision, with the
//! graph metric of its 1-skeleton (unit edge length, so `a = 1`).

use std::collections::VecDeque;
use std::sync::{Arc, OnceLock};

use log::warn;

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::gf2::BitVector;
use crate::simplicial::{barycentric_subdivide, SimplicialComplex};

/// Qudit sets are bit vectors indexed by qudit id.
pub type QuditSet = BitVector;

pub const DEFAULT_DENSITY_CAP: usize = 64;

const EPS: f64 = 1e-9;

/// Largest mesh (in vertices) whose hop diameter is computed exactly.
pub const EXACT_DIAMETER_LIMIT: usize = 20_000;

/// Which lattice cells of the cubic torus carry qudits.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SiteKind {
    /// One qudit per edge, index `d·v + axis`.
    Edges,
    /// Edges along axes 0 and 1 only, index `2·v + axis` (stacked planar layers).
    PlanarEdges,
    /// `k` qudits per vertex, index `k·v + s`.
    Vertices(usize),
}

/// Index helper for the periodic cubic lattice `Z_L^d`.
#[derive(Clone, Copy, Debug)]
pub struct CubicLattice {
    pub dim: usize,
    pub size: usize,
}

impl CubicLattice {
    pub fn new(dim: usize, size: usize) -> Self {
        Self { dim, size }
    }

    pub fn n_vertices(&self) -> usize {
        self.size.pow(self.dim as u32)
    }

    pub fn coords(&self, mut v: usize) -> Vec<usize> {
        let mut c = Vec::with_capacity(self.dim);
        for _ in 0..self.dim {
            c.push(v % self.size);
            v /= self.size;
        }
        c
    }

    pub fn vertex(&self, coords: &[isize]) -> usize {
        let l = self.size as isize;
        coords
            .iter()
            .rev()
            .fold(0usize, |acc, &x| acc * self.size + x.rem_euclid(l) as usize)
    }

    /// The vertex displaced from `v` by `delta`.
    pub fn shift(&self, v: usize, delta: &[isize]) -> usize {
        let c: Vec<isize> = self
            .coords(v)
            .iter()
            .zip(delta)
            .map(|(&x, &d)| x as isize + d)
            .collect();
        self.vertex(&c)
    }

    pub fn edge(&self, v: usize, axis: usize) -> usize {
        self.dim * v + axis
    }
}

#[derive(Clone, Debug)]
pub struct FlatTorus {
    dim: usize,
    period: f64,
    positions: Vec<f64>,
}

impl FlatTorus {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn position(&self, q: usize) -> &[f64] {
        &self.positions[q * self.dim..(q + 1) * self.dim]
    }

    fn axis_gap(&self, a: f64, b: f64) -> f64 {
        let d = (a - b).abs() % self.period;
        d.min(self.period - d)
    }

    fn distance(&self, p: usize, q: usize) -> f64 {
        self.position(p)
            .iter()
            .zip(self.position(q))
            .map(|(&a, &b)| self.axis_gap(a, b).powi(2))
            .sum::<f64>()
            .sqrt()
    }
}

/// Qudits on the edges of a subdivided triangulation.
#[derive(Clone, Debug)]
pub struct MeshGraph {
    base_id: u64,
    base_dim: usize,
    refine: usize,
    complex: Arc<SimplicialComplex>,
    /// Per vertex of the refined complex, the base simplex `(dim, index)` containing it in its interior.
    vertex_carrier: Vec<(u8, u32)>,
    qudit_carrier: Vec<(u8, u32)>,
    edges: Vec<[u32; 2]>,
    adj_start: Vec<u32>,
    adj: Vec<u32>,
    inc_start: Vec<u32>,
    inc: Vec<u32>,
}

impl MeshGraph {
    pub fn base_id(&self) -> u64 {
        self.base_id
    }

    pub fn base_dim(&self) -> usize {
        self.base_dim
    }

    pub fn refine(&self) -> usize {
        self.refine
    }

    pub fn complex(&self) -> &Arc<SimplicialComplex> {
        &self.complex
    }

    pub fn n_vertices(&self) -> usize {
        self.vertex_carrier.len()
    }

    pub fn vertex_carrier(&self, v: usize) -> (usize, usize) {
        let (d, i) = self.vertex_carrier[v];
        (d as usize, i as usize)
    }

    /// Base simplex whose interior contains the midpoint of qudit `q`.
    pub fn qudit_carrier(&self, q: usize) -> (usize, usize) {
        let (d, i) = self.qudit_carrier[q];
        (d as usize, i as usize)
    }

    pub fn endpoints(&self, q: usize) -> [usize; 2] {
        self.edges[q].map(|v| v as usize)
    }

    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.adj[self.adj_start[v] as usize..self.adj_start[v + 1] as usize]
    }

    pub fn incident(&self, v: usize) -> &[u32] {
        &self.inc[self.inc_start[v] as usize..self.inc_start[v + 1] as usize]
    }

    /// Hop distances from a set of vertices, explored up to `max_depth`.
    /// Unreached vertices get `u32::MAX`.
    pub fn bfs(&self, sources: impl IntoIterator<Item = usize>, max_depth: u32) -> Vec<u32> {
        let mut dist = vec![u32::MAX; self.n_vertices()];
        let mut queue = VecDeque::new();
        for s in sources {
            if dist[s] != 0 {
                dist[s] = 0;
                queue.push_back(s);
            }
        }
        while let Some(v) = queue.pop_front() {
            let dv = dist[v];
            if dv >= max_depth {
                continue;
            }
            for &w in self.neighbors(v) {
                let w = w as usize;
                if dist[w] == u32::MAX {
                    dist[w] = dv + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    fn eccentricity(&self, v: usize) -> u32 {
        self.bfs([v], u32::MAX)
            .into_iter()
            .filter(|&d| d != u32::MAX)
            .max()
            .unwrap_or(0)
    }

    /// Lower bound on the hop diameter from repeated farthest-vertex sweeps.
    pub fn sweep_diameter(&self, sweeps: usize) -> u32 {
        let mut v = 0;
        let mut best = 0;
        for _ in 0..sweeps.max(1) {
            let dist = self.bfs([v], u32::MAX);
            let (far, d) = dist
                .iter()
                .enumerate()
                .filter(|(_, &x)| x != u32::MAX)
                .max_by_key(|&(i, &x)| (x, std::cmp::Reverse(i)))
                .map(|(i, &x)| (i, x))
                .unwrap_or((0, 0));
            best = best.max(d);
            v = far;
        }
        best
    }

    fn distance(&self, p: usize, q: usize) -> f64 {
        if p == q {
            return 0.0;
        }
        let dist = self.bfs(self.endpoints(p), u32::MAX);
        let [a, b] = self.endpoints(q);
        1.0 + dist[a].min(dist[b]) as f64
    }
}

#[derive(Clone, Debug)]
pub enum Geometry {
    FlatTorus(FlatTorus),
    Mesh(MeshGraph),
}

/// Qudits with positions, a metric, the lattice spacing `a` and linear size `L`.
#[derive(Clone, Debug)]
pub struct QuditLayout {
    geometry: Geometry,
    n: usize,
    a: f64,
    local_dim: u32,
    density_cap: usize,
    size: OnceLock<f64>,
}

impl QuditLayout {
    /// Qudits at explicit positions on the flat torus `[0, period)^dim`, with `a = 1`.
    pub fn flat_torus(dim: usize, period: f64, positions: Vec<f64>, density_cap: usize) -> Result<Self> {
        if dim == 0 || positions.len() % dim != 0 {
            return Err(Error::Input("positions must be a multiple of the dimension".into()));
        }
        if period <= 0.0 {
            return Err(Error::Input("period must be positive".into()));
        }
        let n = positions.len() / dim;
        let layout = Self {
            geometry: Geometry::FlatTorus(FlatTorus { dim, period, positions }),
            n,
            a: 1.0,
            local_dim: 2,
            density_cap,
            size: OnceLock::from(period),
        };
        layout.check_density()?;
        if period < 10.0 * layout.a {
            warn!("linear size {period} is below 10a; lattice effects dominate");
        }
        Ok(layout)
    }

    pub fn geometry(&self) -> &Geometry {
        &self.geometry
    }

    pub fn mesh(&self) -> Option<&MeshGraph> {
        match &self.geometry {
            Geometry::Mesh(m) => Some(m),
            _ => None,
        }
    }

    pub fn flat(&self) -> Option<&FlatTorus> {
        match &self.geometry {
            Geometry::FlatTorus(t) => Some(t),
            _ => None,
        }
    }

    pub fn n_qudits(&self) -> usize {
        self.n
    }

    /// Lattice spacing.
    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn local_dim(&self) -> u32 {
        self.local_dim
    }

    pub fn density_cap(&self) -> usize {
        self.density_cap
    }

    /// Linear size `L`: the period of a flat torus, or for a mesh one plus the
    /// hop diameter of the vertex graph (which bounds every qudit distance).
    /// Meshes above [`EXACT_DIAMETER_LIMIT`] vertices use a four-sweep lower bound.
    pub fn size(&self) -> f64 {
        *self.size.get_or_init(|| match &self.geometry {
            Geometry::FlatTorus(t) => t.period,
            Geometry::Mesh(m) if m.n_vertices() <= EXACT_DIAMETER_LIMIT => {
                let ecc = Exec::default().map_range(m.n_vertices(), |v| m.eccentricity(v));
                1.0 + ecc.into_iter().max().unwrap_or(0) as f64
            }
            Geometry::Mesh(m) => 1.0 + m.sweep_diameter(4) as f64,
        })
    }

    pub fn empty_set(&self) -> QuditSet {
        BitVector::zeros(self.n)
    }

    pub fn full_set(&self) -> QuditSet {
        BitVector::ones(self.n)
    }

    pub fn distance(&self, p: usize, q: usize) -> f64 {
        match &self.geometry {
            Geometry::FlatTorus(t) => t.distance(p, q),
            Geometry::Mesh(m) => m.distance(p, q),
        }
    }

    /// All qudits within distance `r` of some qudit of `s`.
    pub fn neighborhood(&self, s: &QuditSet, r: f64) -> QuditSet {
        self.neighborhood_with(s, r, Exec::default())
    }

    pub fn neighborhood_with(&self, s: &QuditSet, r: f64, exec: Exec) -> QuditSet {
        assert_eq!(s.len(), self.n, "qudit set of wrong length");
        match &self.geometry {
            Geometry::FlatTorus(t) => {
                let members: Vec<usize> = s.iter_ones().collect();
                let hit = exec.map_range(self.n, |q| {
                    s.get(q) || members.iter().any(|&p| t.distance(p, q) <= r + EPS)
                });
                BitVector::from_bools(&hit)
            }
            Geometry::Mesh(m) => {
                let mut out = s.clone();
                if r + EPS < 1.0 {
                    return out;
                }
                let depth = (r - 1.0 + EPS).floor() as u32;
                let dist = m.bfs(s.iter_ones().flat_map(|q| m.endpoints(q)), depth);
                for (v, &d) in dist.iter().enumerate() {
                    if d <= depth {
                        for &q in m.incident(v) {
                            out.set(q as usize, true);
                        }
                    }
                }
                out
            }
        }
    }

    /// Qudits within distance `r` of qudit `q`.
    pub fn ball(&self, q: usize, r: f64) -> QuditSet {
        self.neighborhood(&BitVector::from_indices(self.n, [q]), r)
    }

    fn check_density(&self) -> Result<()> {
        let counts: Vec<usize> = match &self.geometry {
            Geometry::FlatTorus(t) => Exec::default().map_range(self.n, |p| {
                (0..self.n).filter(|&q| t.distance(p, q) <= self.a + EPS).count()
            }),
            Geometry::Mesh(m) => (0..self.n)
                .map(|q| {
                    let [u, v] = m.endpoints(q);
                    m.incident(u).len() + m.incident(v).len() - 1
                })
                .collect(),
        };
        if let Some((q, &c)) = counts.iter().enumerate().find(|&(_, &c)| c > self.density_cap) {
            return Err(Error::Input(format!(
                "{c} qudits within distance a of qudit {q} exceed the density cap {}",
                self.density_cap
            )));
        }
        Ok(())
    }
}

/// Qudits on the cubic lattice of the flat d-torus of period `size`, with `a = 1`.
pub fn torus_lattice_layout(dim: usize, size: usize, kind: SiteKind) -> Result<QuditLayout> {
    if dim < 2 || size < 2 {
        return Err(Error::Input(format!("need d ≥ 2 and L ≥ 2, got d={dim}, L={size}")));
    }
    if kind == SiteKind::PlanarEdges && dim != 3 {
        return Err(Error::Input("planar-edge layout is three-dimensional".into()));
    }
    let lat = CubicLattice::new(dim, size);
    let mut pos = Vec::new();
    for v in 0..lat.n_vertices() {
        let c: Vec<f64> = lat.coords(v).into_iter().map(|x| x as f64).collect();
        let mut push_edge = |axis: usize| {
            for (i, &x) in c.iter().enumerate() {
                pos.push(if i == axis { x + 0.5 } else { x });
            }
        };
        match kind {
            SiteKind::Edges => (0..dim).for_each(&mut push_edge),
            SiteKind::PlanarEdges => (0..2).for_each(&mut push_edge),
            SiteKind::Vertices(k) => {
                for _ in 0..k {
                    pos.extend_from_slice(&c);
                }
            }
        }
    }
    QuditLayout::flat_torus(dim, size as f64, pos, DEFAULT_DENSITY_CAP)
}

/// One qudit per edge of the `refine`-times subdivided complex.
pub fn layout_from_complex(k: &Arc<SimplicialComplex>, refine: usize) -> Result<QuditLayout> {
    layout_from_complex_with_cap(k, refine, DEFAULT_DENSITY_CAP)
}

pub fn layout_from_complex_with_cap(
    base: &Arc<SimplicialComplex>,
    refine: usize,
    density_cap: usize,
) -> Result<QuditLayout> {
    let mut current = Arc::clone(base);
    let mut carrier: Vec<(u8, u32)> = (0..base.count(0)).map(|i| (0u8, i as u32)).collect();
    for level in 0..refine {
        let (child, map) = barycentric_subdivide(&current);
        let labels = current.vertex_labels();
        let next: Vec<(u8, u32)> = child
            .vertex_labels()
            .iter()
            .map(|&v| {
                let (k, i) = map.parent_of_vertex(v);
                if level == 0 {
                    return (k as u8, i as u32);
                }
                // vertices of a deeper simplex have nested carriers; the largest wins
                current
                    .simplex(k, i)
                    .iter()
                    .map(|u| carrier[labels.binary_search(u).expect("vertex")])
                    .max_by_key(|c| c.0)
                    .expect("nonempty simplex")
            })
            .collect();
        carrier = next;
        current = Arc::new(child);
    }
    let labels = current.vertex_labels();
    let nv = labels.len();
    let vidx = |v: &u32| labels.binary_search(v).expect("vertex") as u32;
    let edges: Vec<[u32; 2]> = current.simplices(1).map(|e| [vidx(&e[0]), vidx(&e[1])]).collect();
    let qudit_carrier: Vec<(u8, u32)> = edges
        .iter()
        .enumerate()
        .map(|(q, &[u, v])| {
            if refine == 0 {
                (1, q as u32)
            } else {
                let (cu, cv) = (carrier[u as usize], carrier[v as usize]);
                if cu.0 >= cv.0 { cu } else { cv }
            }
        })
        .collect();

    let mut deg = vec![0u32; nv + 1];
    for &[u, v] in &edges {
        deg[u as usize] += 1;
        deg[v as usize] += 1;
    }
    let mut start = vec![0u32; nv + 1];
    for v in 0..nv {
        start[v + 1] = start[v] + deg[v];
    }
    let mut fill = start.clone();
    let mut adj = vec![0u32; 2 * edges.len()];
    let mut inc = vec![0u32; 2 * edges.len()];
    for (q, &[u, v]) in edges.iter().enumerate() {
        for (x, y) in [(u, v), (v, u)] {
            let slot = fill[x as usize] as usize;
            adj[slot] = y;
            inc[slot] = q as u32;
            fill[x as usize] += 1;
        }
    }
    let n = edges.len();
    let mesh = MeshGraph {
        base_id: base.id(),
        base_dim: base.dim(),
        refine,
        complex: current,
        vertex_carrier: carrier,
        qudit_carrier,
        edges,
        adj_start: start.clone(),
        adj,
        inc_start: start,
        inc,
    };
    let lower = mesh.sweep_diameter(2);
    let layout = QuditLayout {
        geometry: Geometry::Mesh(mesh),
        n,
        a: 1.0,
        local_dim: 2,
        density_cap,
        size: OnceLock::new(),
    };
    layout.check_density()?;
    if (lower as f64 + 1.0) < 10.0 {
        warn!("mesh diameter is about {} edge lengths, below 10a", lower + 1);
    }
    Ok(layout)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifolds;
    use proptest::prelude::*;

    #[test]
    fn torus_lattice_counts() {
        assert_eq!(torus_lattice_layout(2, 4, SiteKind::Edges).unwrap().n_qudits(), 32);
        assert_eq!(torus_lattice_layout(3, 3, SiteKind::Edges).unwrap().n_qudits(), 81);
        assert_eq!(torus_lattice_layout(3, 4, SiteKind::PlanarEdges).unwrap().n_qudits(), 128);
        assert_eq!(torus_lattice_layout(3, 2, SiteKind::Vertices(2)).unwrap().n_qudits(), 16);
        assert!(torus_lattice_layout(1, 4, SiteKind::Edges).is_err());
        assert!(torus_lattice_layout(2, 1, SiteKind::Edges).is_err());
    }

    /// Brute-force enumeration of edge midpoints near an edge midpoint on the 4×4 torus.
    #[test]
    fn edge_neighborhood_small_radii() {
        let lay = torus_lattice_layout(2, 4, SiteKind::Edges).unwrap();
        let q = 0; // horizontal edge at (0.5, 0)
        let mut expected = Vec::new();
        for p in 0..32 {
            let v = p / 2;
            let (x, y) = ((v % 4) as f64, (v / 4) as f64);
            let (px, py) = if p % 2 == 0 { (x + 0.5, y) } else { (x, y + 0.5) };
            let dx = (px - 0.5).abs().min(4.0 - (px - 0.5).abs());
            let dy = py.abs().min(4.0 - py.abs());
            if p != q && (dx * dx + dy * dy).sqrt() <= 0.6 {
                expected.push(p);
            }
        }
        let got: Vec<usize> = lay.ball(q, 0.6).iter_ones().filter(|&p| p != q).collect();
        assert_eq!(got, expected);
        // the nearest other midpoints are the four touching perpendicular edges at √0.5
        assert!(got.is_empty());
        assert_eq!(lay.ball(q, 0.75).weight(), 5);
        // at r = 1 the collinear and the parallel horizontal neighbours join
        assert_eq!(lay.ball(q, 1.0).weight(), 9);
    }

    #[test]
    fn tetrahedron_mesh_layout() {
        let k = Arc::new(manifolds::sphere());
        let lay = layout_from_complex(&k, 0).unwrap();
        assert_eq!(lay.n_qudits(), 6);
        let m = lay.mesh().unwrap();
        // K4: every pair of edges shares a vertex or is opposite
        assert_eq!(lay.distance(0, 0), 0.0);
        for p in 0..6 {
            for q in 0..6 {
                let [a, b] = m.endpoints(p);
                let [c, d] = m.endpoints(q);
                let share = a == c || a == d || b == c || b == d;
                let want = if p == q { 0.0 } else if share { 1.0 } else { 2.0 };
                assert_eq!(lay.distance(p, q), want);
            }
        }
        assert_eq!(lay.size(), 2.0);
    }

    #[test]
    fn refined_layout_counts_and_carriers() {
        let k = Arc::new(manifolds::torus());
        let lay = layout_from_complex(&k, 1).unwrap();
        assert_eq!(lay.n_qudits(), 21 * 2 + 14 * 6);
        let m = lay.mesh().unwrap();
        let dims: Vec<usize> = (0..lay.n_qudits()).map(|q| m.qudit_carrier(q).0).collect();
        assert_eq!(dims.iter().filter(|&&d| d == 1).count(), 42);
        assert_eq!(dims.iter().filter(|&&d| d == 2).count(), 84);
    }

    #[test]
    fn neighborhood_edge_cases() {
        let lay = torus_lattice_layout(2, 4, SiteKind::Edges).unwrap();
        let s = BitVector::from_indices(32, [3, 17]);
        assert_eq!(lay.neighborhood(&s, 0.0), s);
        assert_eq!(lay.neighborhood(&s, lay.size()), lay.full_set());

        let k = Arc::new(manifolds::torus());
        let mesh = layout_from_complex(&k, 1).unwrap();
        let s = BitVector::from_indices(mesh.n_qudits(), [5]);
        assert_eq!(mesh.neighborhood(&s, 0.0), s);
        assert_eq!(mesh.neighborhood(&s, mesh.size()), mesh.full_set());
    }

    #[test]
    fn density_cap_enforced() {
        let err = QuditLayout::flat_torus(2, 4.0, vec![0.0; 2 * 10], 5).unwrap_err();
        assert!(matches!(err, Error::Input(_)));
    }

    #[test]
    fn mesh_neighborhood_matches_pairwise_distances() {
        let k = Arc::new(manifolds::projective_plane());
        let lay = layout_from_complex_with_cap(&k, 1, 256).unwrap();
        for r in [0.0, 1.0, 2.0, 3.5] {
            let s = BitVector::from_indices(lay.n_qudits(), [0, 9]);
            let nb = lay.neighborhood(&s, r);
            for q in 0..lay.n_qudits() {
                let d = lay.distance(0, q).min(lay.distance(9, q));
                assert_eq!(nb.get(q), d <= r, "q={q} r={r} d={d}");
            }
        }
    }

    fn layouts() -> Vec<QuditLayout> {
        vec![
            torus_lattice_layout(2, 5, SiteKind::Edges).unwrap(),
            torus_lattice_layout(3, 3, SiteKind::Edges).unwrap(),
            layout_from_complex_with_cap(&Arc::new(manifolds::torus()), 1, 256).unwrap(),
        ]
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn metric_axioms(which in 0usize..3, a in any::<usize>(), b in any::<usize>(), c in any::<usize>()) {
            let lay = &layouts()[which];
            let n = lay.n_qudits();
            let (a, b, c) = (a % n, b % n, c % n);
            prop_assert_eq!(lay.distance(a, a), 0.0);
            prop_assert!((lay.distance(a, b) - lay.distance(b, a)).abs() < 1e-12);
            prop_assert!(lay.distance(a, c) <= lay.distance(a, b) + lay.distance(b, c) + 1e-9);
            if a != b { prop_assert!(lay.distance(a, b) > 0.0); }
        }

        #[test]
        fn neighborhoods_nest(which in 0usize..3, members in proptest::collection::vec(any::<usize>(), 1..4), r1 in 0.0f64..3.0, r2 in 0.0f64..3.0) {
            let lay = &layouts()[which];
            let n = lay.n_qudits();
            let s = BitVector::from_indices(n, members.iter().map(|m| m % n).collect::<std::collections::BTreeSet<_>>());
            let (lo, hi) = if r1 <= r2 { (r1, r2) } else { (r2, r1) };
            let a = lay.neighborhood(&s, lo);
            let b = lay.neighborhood(&s, hi);
            prop_assert_eq!(a.and(&b), a.clone());
            // composition stays inside the neighborhood of the summed radius
            let twice = lay.neighborhood(&a, hi);
            let joint = lay.neighborhood(&s, lo + hi);
            prop_assert_eq!(twice.and(&joint), twice);
        }
    }

    #[test]
    fn density_within_cap_on_builtin_lattices() {
        for lay in layouts().iter().take(2) {
            for q in 0..lay.n_qudits() {
                assert!(lay.ball(q, lay.a()).weight() <= lay.density_cap());
            }
        }
    }
}
