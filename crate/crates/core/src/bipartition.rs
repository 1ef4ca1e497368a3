//! Red/blue cellulations and the `A ⊔ B ⊔ C` qudit partition.
//!
//! General path: for a closed manifold `K`, let `M′ = sd K` and `M″ = sd M′`.
//! The defect chain `N = Δ″ + 𝖡(Δ′)` is a boundary, `N = ∂P`. Every top
//! simplex of `M″` has exactly one face in `𝖡(Δ′)`, which pairs it with a
//! partner; `P` is a union of such pairs, which become the red cells.
//!
//! Tori also get the cubical checkerboard, with cells tagged as cubes.

use std::collections::{HashSet, VecDeque};
use std::fmt::{self, Write as _};
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::gf2::BitVector;
use crate::layout::{CubicLattice, QuditLayout};
use crate::simplicial::{barycentric_subdivide, Chain, SimplicialComplex, SubdivisionMap};

const EPS: f64 = 1e-9;
const NO_CELL: u32 = u32::MAX;

/// Above this many matrix entries the top boundary solve switches to dual-graph propagation.
pub const DENSE_SOLVE_LIMIT: usize = 1 << 26;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Color {
    Red,
    Blue,
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Color::Red => "red",
            Color::Blue => "blue",
        })
    }
}

impl Color {
    pub fn flipped(self) -> Self {
        match self {
            Color::Red => Color::Blue,
            Color::Blue => Color::Red,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Cell {
    /// Two top simplices glued along `face`.
    Pair { simplices: [u32; 2], face: u32 },
    Simplex(u32),
    /// A block of the cubical checkerboard, by block coordinates.
    Cube(Vec<u32>),
}

#[derive(Clone, Debug)]
pub enum CellBase {
    Complex(Arc<SimplicialComplex>),
    TorusBlocks { dim: usize, blocks: usize },
}

#[derive(Clone, Debug)]
pub struct Cellulation {
    base: CellBase,
    cells: Vec<Cell>,
    colors: Vec<Color>,
    cell_of_top: Vec<u32>,
    /// For pair cells: the chain whose faces may glue a pair.
    glue_faces: Option<BitVector>,
}

impl Cellulation {
    pub fn base(&self) -> &CellBase {
        &self.base
    }

    pub fn complex(&self) -> Option<&Arc<SimplicialComplex>> {
        match &self.base {
            CellBase::Complex(k) => Some(k),
            CellBase::TorusBlocks { .. } => None,
        }
    }

    pub fn dim(&self) -> usize {
        match &self.base {
            CellBase::Complex(k) => k.dim(),
            CellBase::TorusBlocks { dim, .. } => *dim,
        }
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn n_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn color(&self, cell: usize) -> Color {
        self.colors[cell]
    }

    pub fn count(&self, color: Color) -> usize {
        self.colors.iter().filter(|&&c| c == color).count()
    }

    /// Cell containing top simplex `j` of a complex base.
    pub fn cell_of_top(&self, j: usize) -> Option<usize> {
        self.cell_of_top.get(j).filter(|&&c| c != NO_CELL).map(|&c| c as usize)
    }

    /// The same cellulation with one cell recolored.
    pub fn with_color(&self, cell: usize, color: Color) -> Self {
        let mut out = self.clone();
        out.colors[cell] = color;
        out
    }

    /// Number of k-cells of the (d−2)-skeleton, for k = 0..=d−2.
    pub fn skeleton_counts(&self) -> Vec<usize> {
        let d = self.dim();
        match &self.base {
            CellBase::Complex(k) => (0..=d - 2).map(|i| k.count(i)).collect(),
            CellBase::TorusBlocks { dim, blocks } => (0..=dim - 2)
                .map(|k| binomial(*dim, k) * blocks.pow(*dim as u32))
                .collect(),
        }
    }

    /// FNV-1a over the base, cells and colors.
    pub fn fingerprint(&self) -> u64 {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        let mut eat = |x: u64| {
            for b in x.to_le_bytes() {
                h ^= b as u64;
                h = h.wrapping_mul(0x0100_0000_01b3);
            }
        };
        match &self.base {
            CellBase::Complex(k) => eat(k.id()),
            CellBase::TorusBlocks { dim, blocks } => {
                eat(*dim as u64);
                eat(*blocks as u64);
            }
        }
        for (cell, color) in self.cells.iter().zip(&self.colors) {
            match cell {
                Cell::Pair { simplices, face } => {
                    eat(1);
                    eat(simplices[0] as u64);
                    eat(simplices[1] as u64);
                    eat(*face as u64);
                }
                Cell::Simplex(s) => {
                    eat(2);
                    eat(*s as u64);
                }
                Cell::Cube(c) => {
                    eat(3);
                    c.iter().for_each(|&x| eat(x as u64));
                }
            }
            eat(matches!(color, Color::Red) as u64);
        }
        h
    }

    fn describe_base(&self) -> String {
        match &self.base {
            CellBase::Complex(k) => format!("complex dim={} counts={:?}", k.dim(), k.counts()),
            CellBase::TorusBlocks { dim, blocks } => format!("torus_blocks dim={dim} blocks={blocks}"),
        }
    }
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// `N = Δ″ + 𝖡(Δ′)` on the child complex.
pub fn defect_chain(m1: &SimplicialComplex, m2: &SimplicialComplex, sub: &SubdivisionMap) -> Result<Chain> {
    if sub.parent_id() != m1.id() || sub.child_id() != m2.id() {
        return Err(Error::Input("subdivision map does not relate these complexes".into()));
    }
    let d = m1.dim();
    let image = delta_image(m1, sub)?;
    m2.full_skeleton_chain(d - 1)?.add(&image)
}

/// `𝖡(Δ′)`: the image of the full (d−1)-skeleton chain of the parent.
pub fn delta_image(m1: &SimplicialComplex, sub: &SubdivisionMap) -> Result<Chain> {
    sub.push_chain(&m1.full_skeleton_chain(m1.dim() - 1)?)
}

/// A fixed-point-free involution on top simplices, with the gluing face of each.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matching {
    pub partner: Vec<u32>,
    pub face: Vec<u32>,
}

impl Matching {
    pub fn n_pairs(&self) -> usize {
        self.partner.len() / 2
    }

    pub fn is_perfect(&self) -> bool {
        self.partner
            .iter()
            .enumerate()
            .all(|(s, &t)| t as usize != s && self.partner[t as usize] as usize == s && self.face[s] == self.face[t as usize])
    }
}

/// Pair every top simplex with the neighbour across its unique face in `image`.
pub fn partner_matching(m2: &SimplicialComplex, image: &Chain) -> Result<Matching> {
    m2.check_chain(image)?;
    let d = m2.dim();
    if image.degree() + 1 != d {
        return Err(Error::Dimension(format!("need a {}-chain, got degree {}", d - 1, image.degree())));
    }
    let n = m2.count(d);
    let mut partner = vec![0u32; n];
    let mut face = vec![0u32; n];
    for s in 0..n {
        let mut hits = m2.faces_of(d, s).iter().filter(|&&f| image.contains(f as usize));
        let (Some(&f), None) = (hits.next(), hits.next()) else {
            let count = m2.faces_of(d, s).iter().filter(|&&f| image.contains(f as usize)).count();
            return Err(Error::Structural(format!(
                "top simplex {:?} has {count} faces in the gluing chain, expected 1",
                m2.simplex(d, s)
            )));
        };
        let [a, b] = m2.ridge_cofaces(f as usize);
        partner[s] = if a == s { b } else { a } as u32;
        face[s] = f;
    }
    Ok(Matching { partner, face })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveMethod {
    Dense,
    DualGraph,
}

impl fmt::Display for SolveMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SolveMethod::Dense => "dense",
            SolveMethod::DualGraph => "dual_graph",
        })
    }
}

/// Solve `∂_d P = rhs`. Picks the dense eliminator when the matrix is small.
pub fn solve_top_boundary(k: &SimplicialComplex, rhs: &Chain, exec: Exec) -> Result<(Option<Chain>, SolveMethod)> {
    let d = k.dim();
    let method = if k.count(d) * k.count(d - 1) <= DENSE_SOLVE_LIMIT {
        SolveMethod::Dense
    } else {
        SolveMethod::DualGraph
    };
    Ok((solve_top_boundary_with(k, rhs, method, exec)?, method))
}

/// Every ridge of a closed manifold has two cofaces, so `∂_dᵀ` is the incidence
/// matrix of the dual graph and `∂P = rhs` reads `P_s + P_t = rhs_f` per ridge.
pub fn solve_top_boundary_with(
    k: &SimplicialComplex,
    rhs: &Chain,
    method: SolveMethod,
    exec: Exec,
) -> Result<Option<Chain>> {
    k.check_chain(rhs)?;
    let d = k.dim();
    if rhs.degree() + 1 != d {
        return Err(Error::Dimension(format!("need a {}-chain, got degree {}", d - 1, rhs.degree())));
    }
    let b = rhs.support();
    let solution = match method {
        SolveMethod::Dense => k.boundary_matrix(d)?.solve_with(b, exec)?,
        SolveMethod::DualGraph => {
            let n = k.count(d);
            let mut val = vec![u8::MAX; n];
            let mut queue = VecDeque::new();
            let mut consistent = true;
            'roots: for root in 0..n {
                if val[root] != u8::MAX {
                    continue;
                }
                val[root] = 0;
                queue.push_back(root);
                while let Some(s) = queue.pop_front() {
                    for &f in k.faces_of(d, s) {
                        let [a, c] = k.ridge_cofaces(f as usize);
                        let t = if a == s { c } else { a };
                        let want = val[s] ^ b.get(f as usize) as u8;
                        if val[t] == u8::MAX {
                            val[t] = want;
                            queue.push_back(t);
                        } else if val[t] != want {
                            consistent = false;
                            break 'roots;
                        }
                    }
                }
            }
            consistent.then(|| BitVector::from_bools(&val.iter().map(|&v| v == 1).collect::<Vec<_>>()))
        }
    };
    solution.map(|x| k.chain(d, x)).transpose()
}

/// Outcome of a two-coloring: the cellulation plus the data that justifies it.
#[derive(Clone, Debug)]
pub struct TwoColoring {
    pub cellulation: Cellulation,
    pub p: Chain,
    pub method: SolveMethod,
    pub boundary_verified: bool,
    pub closure_violations: usize,
}

/// Solve `∂P = N`, check `P` is a union of matched pairs, color those pairs red.
pub fn two_color(m2: &Arc<SimplicialComplex>, n: &Chain, matching: &Matching) -> Result<TwoColoring> {
    two_color_with(m2, n, matching, Exec::default())
}

pub fn two_color_with(
    m2: &Arc<SimplicialComplex>,
    n: &Chain,
    matching: &Matching,
    exec: Exec,
) -> Result<TwoColoring> {
    let d = m2.dim();
    if matching.partner.len() != m2.count(d) || !matching.is_perfect() {
        return Err(Error::Structural("matching is not a perfect matching of top simplices".into()));
    }
    let (p, method) = solve_top_boundary(m2, n, exec)?;
    let p = p.ok_or(Error::NotNullHomologous)?;
    let boundary_verified = &m2.boundary(&p)? == n;
    if !boundary_verified {
        return Err(Error::Structural("solver returned P with ∂P ≠ N".into()));
    }
    let closure_violations = (0..m2.count(d))
        .filter(|&s| p.contains(s) != p.contains(matching.partner[s] as usize))
        .count();
    if closure_violations > 0 {
        return Err(Error::Structural(format!(
            "{closure_violations} top simplices are colored apart from their partner"
        )));
    }
    let mut cells = Vec::with_capacity(matching.n_pairs());
    let mut colors = Vec::with_capacity(matching.n_pairs());
    let mut cell_of_top = vec![NO_CELL; m2.count(d)];
    for s in 0..m2.count(d) {
        let t = matching.partner[s] as usize;
        if s < t {
            cell_of_top[s] = cells.len() as u32;
            cell_of_top[t] = cells.len() as u32;
            cells.push(Cell::Pair { simplices: [s as u32, t as u32], face: matching.face[s] });
            colors.push(if p.contains(s) { Color::Red } else { Color::Blue });
        }
    }
    let glue: BitVector = {
        let mut g = BitVector::zeros(m2.count(d - 1));
        matching.face.iter().for_each(|&f| g.set(f as usize, true));
        g
    };
    Ok(TwoColoring {
        cellulation: Cellulation {
            base: CellBase::Complex(Arc::clone(m2)),
            cells,
            colors,
            cell_of_top,
            glue_faces: Some(glue),
        },
        p,
        method,
        boundary_verified,
        closure_violations,
    })
}

/// Orientable shortcut: solve `∂P = Δ′` on `M′` and use single simplices as cells.
pub fn two_color_orientable(m1: &Arc<SimplicialComplex>) -> Result<TwoColoring> {
    let d = m1.dim();
    let delta = m1.full_skeleton_chain(d - 1)?;
    let (p, method) = solve_top_boundary(m1, &delta, Exec::default())?;
    let p = p.ok_or(Error::NotNullHomologous)?;
    let boundary_verified = m1.boundary(&p)? == delta;
    if !boundary_verified {
        return Err(Error::Structural("solver returned P with ∂P ≠ Δ′".into()));
    }
    let n = m1.count(d);
    Ok(TwoColoring {
        cellulation: Cellulation {
            base: CellBase::Complex(Arc::clone(m1)),
            cells: (0..n as u32).map(Cell::Simplex).collect(),
            colors: (0..n).map(|s| if p.contains(s) { Color::Red } else { Color::Blue }).collect(),
            cell_of_top: (0..n as u32).collect(),
            glue_faces: None,
        },
        p,
        method,
        boundary_verified,
        closure_violations: 0,
    })
}

/// Every stage of the general path, kept for reporting.
#[derive(Clone, Debug)]
pub struct GeneralCellulation {
    pub k: Arc<SimplicialComplex>,
    pub m1: Arc<SimplicialComplex>,
    pub m2: Arc<SimplicialComplex>,
    pub map1: SubdivisionMap,
    pub map2: SubdivisionMap,
    pub defect: Chain,
    pub image: Chain,
    pub matching: Matching,
    pub coloring: TwoColoring,
}

impl GeneralCellulation {
    pub fn cellulation(&self) -> &Cellulation {
        &self.coloring.cellulation
    }

    pub fn facts(&self, manifold: &str) -> PipelineFacts {
        let d = self.k.dim();
        PipelineFacts {
            manifold: manifold.to_string(),
            path: "general".into(),
            counts_k: self.k.counts(),
            counts_m1: self.m1.counts(),
            counts_m2: self.m2.counts(),
            defect_weight: self.defect.weight(),
            defect_is_cycle: true,
            image_weight: self.image.weight(),
            pairs: self.matching.n_pairs(),
            matching_perfect: self.matching.is_perfect() && 2 * self.matching.n_pairs() == self.m2.count(d),
            solver: self.coloring.method,
            boundary_verified: self.coloring.boundary_verified,
            p_weight: self.coloring.p.weight(),
            closure_violations: self.coloring.closure_violations,
        }
    }
}

/// Triangulate → subdivide twice → defect chain → matching → two-coloring.
pub fn cellulate_general(k: &SimplicialComplex) -> Result<GeneralCellulation> {
    let (m1, map1) = barycentric_subdivide(k);
    let (m2, map2) = barycentric_subdivide(&m1);
    let defect = defect_chain(&m1, &m2, &map2)?;
    if !m2.boundary(&defect)?.is_zero() {
        return Err(Error::Structural("defect chain is not a cycle".into()));
    }
    let image = delta_image(&m1, &map2)?;
    let matching = partner_matching(&m2, &image)?;
    let m2 = Arc::new(m2);
    let coloring = two_color(&m2, &defect, &matching)?;
    Ok(GeneralCellulation {
        k: Arc::new(k.clone()),
        m1: Arc::new(m1),
        m2,
        map1,
        map2,
        defect,
        image,
        matching,
        coloring,
    })
}

/// Checkerboard of cubes on the d-torus, colored by coordinate parity.
pub fn torus_checkerboard(dim: usize, blocks: usize) -> Result<Cellulation> {
    if dim < 2 {
        return Err(Error::Input(format!("checkerboard needs d ≥ 2, got {dim}")));
    }
    if blocks == 0 || blocks % 2 == 1 {
        return Err(Error::Input(format!(
            "blocks per axis must be even for the coloring to close up, got {blocks}"
        )));
    }
    let lat = CubicLattice::new(dim, blocks);
    let (cells, colors) = (0..lat.n_vertices())
        .map(|v| {
            let c = lat.coords(v);
            let color = if c.iter().sum::<usize>() % 2 == 0 { Color::Red } else { Color::Blue };
            (Cell::Cube(c.into_iter().map(|x| x as u32).collect()), color)
        })
        .unzip();
    Ok(Cellulation {
        base: CellBase::TorusBlocks { dim, blocks },
        cells,
        colors,
        cell_of_top: Vec::new(),
        glue_faces: None,
    })
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub passed: bool,
    pub violations: usize,
    pub examples: Vec<String>,
}

impl CheckOutcome {
    const SHOWN: usize = 8;

    fn from_violations(v: Vec<String>) -> Self {
        Self {
            passed: v.is_empty(),
            violations: v.len(),
            examples: v.into_iter().take(Self::SHOWN).collect(),
        }
    }
}

/// Facts from the general or orientable path, attached to a report.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PipelineFacts {
    pub manifold: String,
    pub path: String,
    pub counts_k: Vec<usize>,
    pub counts_m1: Vec<usize>,
    pub counts_m2: Vec<usize>,
    pub defect_weight: usize,
    pub defect_is_cycle: bool,
    pub image_weight: usize,
    pub pairs: usize,
    pub matching_perfect: bool,
    pub solver: SolveMethod,
    pub boundary_verified: bool,
    pub p_weight: usize,
    pub closure_violations: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CellulationReport {
    pub base: String,
    pub dim: usize,
    pub cells: usize,
    pub red_cells: usize,
    pub blue_cells: usize,
    pub skeleton_counts: Vec<usize>,
    pub qudits: usize,
    pub layout_size: f64,
    pub a: f64,
    pub r_skel: f64,
    pub r_sep: f64,
    pub cells_well_formed: CheckOutcome,
    pub no_same_color_faces: CheckOutcome,
    pub separation: CheckOutcome,
    pub components_red: usize,
    pub components_blue: usize,
    pub a_size: usize,
    pub b_size: usize,
    pub c_size: usize,
    pub c_covers_all: bool,
    pub fingerprint: String,
    pub pipeline: Option<PipelineFacts>,
}

impl CellulationReport {
    pub fn passed(&self) -> bool {
        self.cells_well_formed.passed
            && self.no_same_color_faces.passed
            && self.separation.passed
            && self
                .pipeline
                .as_ref()
                .is_none_or(|p| p.boundary_verified && p.matching_perfect && p.closure_violations == 0)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "cellulation report");
        if let Some(p) = &self.pipeline {
            let _ = writeln!(s, "manifold: {}", p.manifold);
            let _ = writeln!(s, "path: {}", p.path);
            let _ = writeln!(s, "counts_k: {:?}", p.counts_k);
            let _ = writeln!(s, "counts_m1: {:?}", p.counts_m1);
            let _ = writeln!(s, "counts_m2: {:?}", p.counts_m2);
            let _ = writeln!(s, "defect_weight: {}", p.defect_weight);
            let _ = writeln!(s, "defect_is_cycle: {}", p.defect_is_cycle);
            let _ = writeln!(s, "gluing_chain_weight: {}", p.image_weight);
            let _ = writeln!(s, "pairs: {}", p.pairs);
            let _ = writeln!(s, "matching_perfect: {}", p.matching_perfect);
            let _ = writeln!(s, "solver: {}", p.solver);
            let _ = writeln!(s, "boundary_P_equals_N: {}", p.boundary_verified);
            let _ = writeln!(s, "P_weight: {}", p.p_weight);
            let _ = writeln!(s, "pair_closure_violations: {}", p.closure_violations);
        }
        let _ = writeln!(s, "base: {}", self.base);
        let _ = writeln!(s, "dim: {}", self.dim);
        let _ = writeln!(s, "cells: {} (red {}, blue {})", self.cells, self.red_cells, self.blue_cells);
        let _ = writeln!(s, "skeleton_counts: {:?}", self.skeleton_counts);
        let _ = writeln!(s, "qudits: {}", self.qudits);
        let _ = writeln!(s, "L: {}", self.layout_size);
        let _ = writeln!(s, "a: {}", self.a);
        let _ = writeln!(s, "r_skel: {}", self.r_skel);
        let _ = writeln!(s, "r_sep: {}", self.r_sep);
        for (name, c) in [
            ("check_cells", &self.cells_well_formed),
            ("check_faces", &self.no_same_color_faces),
            ("check_separation", &self.separation),
        ] {
            let _ = writeln!(s, "{name}: {} ({} violations)", if c.passed { "pass" } else { "FAIL" }, c.violations);
            for e in &c.examples {
                let _ = writeln!(s, "  {e}");
            }
        }
        let _ = writeln!(s, "components: red {}, blue {}", self.components_red, self.components_blue);
        let _ = writeln!(s, "|A|: {}", self.a_size);
        let _ = writeln!(s, "|B|: {}", self.b_size);
        let _ = writeln!(s, "|C|: {}", self.c_size);
        let _ = writeln!(s, "C_covers_all: {}", self.c_covers_all);
        let _ = writeln!(s, "fingerprint: {}", self.fingerprint);
        let _ = writeln!(s, "verdict: {}", if self.passed() { "pass" } else { "FAIL" });
        s
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Which cell each qudit belongs to, and which qudits sit near the skeleton.
struct Assignment {
    cell: Vec<u32>,
    on_skeleton: BitVector,
    c: BitVector,
}

fn assign(c: &Cellulation, layout: &QuditLayout, r_skel: f64) -> Result<Assignment> {
    let n = layout.n_qudits();
    match &c.base {
        CellBase::TorusBlocks { dim, blocks } => {
            let t = layout
                .flat()
                .filter(|t| t.dim() == *dim)
                .ok_or_else(|| Error::Input(format!("checkerboard needs a flat {dim}-torus layout")))?;
            let bs = t.period() / *blocks as f64;
            let lat = CubicLattice::new(*dim, *blocks);
            let b = *blocks as isize;
            let per_qudit = Exec::default().map_range(n, |q| {
                let pos = t.position(q);
                let mut gaps = Vec::with_capacity(*dim);
                let mut choices: Vec<Vec<isize>> = Vec::with_capacity(*dim);
                for &x in pos {
                    let u = x / bs;
                    let nearest = u.round();
                    let gap = (x - nearest * bs).abs();
                    gaps.push(gap);
                    if gap < EPS {
                        choices.push(vec![nearest as isize - 1, nearest as isize]);
                    } else {
                        choices.push(vec![u.floor() as isize]);
                    }
                }
                let interfaces = choices.iter().filter(|c| c.len() > 1).count();
                // first red candidate in lexicographic order, else the first candidate
                let mut best: Option<usize> = None;
                let total: usize = choices.iter().map(Vec::len).product();
                for m in 0..total {
                    let mut rem = m;
                    let coords: Vec<isize> = choices
                        .iter()
                        .map(|c| {
                            let v = c[rem % c.len()];
                            rem /= c.len();
                            v.rem_euclid(b)
                        })
                        .collect();
                    let cell = lat.vertex(&coords);
                    if best.is_none() {
                        best = Some(cell);
                    }
                    if c.colors[cell] == Color::Red {
                        best = Some(cell);
                        break;
                    }
                }
                gaps.sort_by(f64::total_cmp);
                let dist = (gaps[0] * gaps[0] + gaps[1] * gaps[1]).sqrt();
                (best.expect("at least one candidate") as u32, interfaces >= 2, dist <= r_skel + EPS)
            });
            Ok(Assignment {
                cell: per_qudit.iter().map(|x| x.0).collect(),
                on_skeleton: BitVector::from_bools(&per_qudit.iter().map(|x| x.1).collect::<Vec<_>>()),
                c: BitVector::from_bools(&per_qudit.iter().map(|x| x.2).collect::<Vec<_>>()),
            })
        }
        CellBase::Complex(k) => {
            let m = layout
                .mesh()
                .filter(|m| m.base_id() == k.id())
                .ok_or_else(|| Error::Input("layout does not live on the cellulation base complex".into()))?;
            let d = k.dim();
            let mut cell = vec![NO_CELL; n];
            let mut on_skeleton = BitVector::zeros(n);
            for (q, slot) in cell.iter_mut().enumerate() {
                let (kd, i) = m.qudit_carrier(q);
                if kd == d {
                    *slot = c.cell_of_top[i];
                } else if kd == d - 1 {
                    let [s, t] = k.ridge_cofaces(i);
                    let (cs, ct) = (c.cell_of_top[s], c.cell_of_top[t]);
                    *slot = if c.colors[ct as usize] == Color::Red && c.colors[cs as usize] != Color::Red {
                        ct
                    } else {
                        cs
                    };
                } else {
                    on_skeleton.set(q, true);
                }
            }
            // a qudit sits at an edge midpoint, half an edge from either endpoint
            let skel_vertices = (0..m.n_vertices()).filter(|&v| m.vertex_carrier(v).0 + 2 <= d);
            let depth = (r_skel - 0.5 + EPS).floor().max(0.0) as u32;
            let hops = m.bfs(skel_vertices, depth);
            let cset = BitVector::from_bools(
                &(0..n)
                    .map(|q| {
                        let [u, v] = m.endpoints(q);
                        let h = hops[u].min(hops[v]);
                        h != u32::MAX && 0.5 + h as f64 <= r_skel + EPS
                    })
                    .collect::<Vec<_>>(),
            );
            Ok(Assignment { cell, on_skeleton, c: cset })
        }
    }
}

struct UnionFind(Vec<u32>);

impl UnionFind {
    fn new(n: usize) -> Self {
        Self((0..n as u32).collect())
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] as usize != x {
            self.0[x] = self.0[self.0[x] as usize];
            x = self.0[x] as usize;
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.0[hi] = lo as u32;
        }
    }
}

/// Pairs of candidate qudits closer than `r_sep`.
fn close_pairs(layout: &QuditLayout, candidates: &[usize], r_sep: f64) -> Vec<(usize, usize)> {
    match layout.mesh() {
        None => {
            let per = Exec::default().map_range(candidates.len(), |i| {
                let p = candidates[i];
                candidates[i + 1..]
                    .iter()
                    .filter(|&&q| layout.distance(p, q) < r_sep - EPS)
                    .map(|&q| (p, q))
                    .collect::<Vec<_>>()
            });
            per.into_iter().flatten().collect()
        }
        Some(m) => {
            // qudit distance is 1 + hops between nearest endpoints
            if r_sep <= 1.0 + EPS {
                return Vec::new();
            }
            let max_hops = ((r_sep - 1.0 - EPS).ceil() as u32).saturating_sub(1);
            let is_cand: HashSet<usize> = candidates.iter().copied().collect();
            let per = Exec::default().map_range(candidates.len(), |i| {
                let p = candidates[i];
                let mut seen: HashSet<usize> = m.endpoints(p).into_iter().collect();
                let mut frontier: Vec<usize> = seen.iter().copied().collect();
                for _ in 0..max_hops {
                    let mut next = Vec::new();
                    for v in frontier {
                        for &w in m.neighbors(v) {
                            if seen.insert(w as usize) {
                                next.push(w as usize);
                            }
                        }
                    }
                    frontier = next;
                }
                let mut out: Vec<(usize, usize)> = seen
                    .iter()
                    .flat_map(|&v| m.incident(v).iter().map(|&q| q as usize))
                    .filter(|&q| q > p && is_cand.contains(&q))
                    .map(|q| (p, q))
                    .collect();
                out.sort_unstable();
                out.dedup();
                out
            });
            per.into_iter().flatten().collect()
        }
    }
}

fn check_cells(c: &Cellulation) -> Vec<String> {
    let mut bad = Vec::new();
    match &c.base {
        CellBase::TorusBlocks { dim, blocks } => {
            if c.cells.len() != blocks.pow(*dim as u32) {
                bad.push(format!("expected {} cubes, found {}", blocks.pow(*dim as u32), c.cells.len()));
            }
            for (i, cell) in c.cells.iter().enumerate() {
                match cell {
                    Cell::Cube(x) if x.len() == *dim && x.iter().all(|&v| (v as usize) < *blocks) => {}
                    other => bad.push(format!("cell {i} is not a block of the grid: {other:?}")),
                }
            }
        }
        CellBase::Complex(k) => {
            let d = k.dim();
            let mut owner = vec![0u32; k.count(d)];
            for (i, cell) in c.cells.iter().enumerate() {
                match *cell {
                    Cell::Pair { simplices: [s, t], face } => {
                        owner[s as usize] += 1;
                        owner[t as usize] += 1;
                        let mut cof = k.ridge_cofaces(face as usize);
                        cof.sort_unstable();
                        let mut st = [s as usize, t as usize];
                        st.sort_unstable();
                        if cof != st {
                            bad.push(format!("cell {i}: simplices {s},{t} are not glued along face {face}"));
                        }
                        if c.glue_faces.as_ref().is_some_and(|g| !g.get(face as usize)) {
                            bad.push(format!("cell {i}: gluing face {:?} is not in the gluing chain", k.simplex(d - 1, face as usize)));
                        }
                    }
                    Cell::Simplex(s) => owner[s as usize] += 1,
                    Cell::Cube(_) => bad.push(format!("cell {i}: cube cell on a simplicial base")),
                }
            }
            for (s, &o) in owner.iter().enumerate() {
                if o != 1 {
                    bad.push(format!("top simplex {:?} lies in {o} cells", k.simplex(d, s)));
                }
            }
        }
    }
    bad
}

fn check_faces(c: &Cellulation) -> Vec<String> {
    let mut bad = Vec::new();
    match &c.base {
        CellBase::TorusBlocks { dim, blocks } => {
            let lat = CubicLattice::new(*dim, *blocks);
            for v in 0..lat.n_vertices() {
                for axis in 0..*dim {
                    let delta: Vec<isize> = (0..*dim).map(|i| (i == axis) as isize).collect();
                    let w = lat.shift(v, &delta);
                    if w != v && c.colors[v] == c.colors[w] {
                        bad.push(format!(
                            "blocks {:?} and {:?} share a face along axis {axis} (both {})",
                            lat.coords(v),
                            lat.coords(w),
                            c.colors[v]
                        ));
                    }
                }
            }
        }
        CellBase::Complex(k) => {
            let d = k.dim();
            for f in 0..k.count(d - 1) {
                let [s, t] = k.ridge_cofaces(f);
                let (cs, ct) = (c.cell_of_top[s], c.cell_of_top[t]);
                if cs != ct && cs != NO_CELL && ct != NO_CELL && c.colors[cs as usize] == c.colors[ct as usize] {
                    bad.push(format!(
                        "face {:?} joins cells {cs} and {ct} (both {})",
                        k.simplex(d - 1, f),
                        c.colors[cs as usize]
                    ));
                }
            }
        }
    }
    bad
}

/// Checks (i) cells well formed, (ii) no same-color face adjacency, (iii) outside
/// the `r_skel`-neighborhood of the skeleton, same-color qudits closer than
/// `r_sep` always share a cell.
pub fn verify_cellulation(c: &Cellulation, layout: &QuditLayout, r_skel: f64, r_sep: f64) -> Result<CellulationReport> {
    if r_skel < 0.0 || r_sep < 0.0 {
        return Err(Error::Input("radii must be nonnegative".into()));
    }
    let asg = assign(c, layout, r_skel)?;
    let n = layout.n_qudits();

    let mut sep_bad = Vec::new();
    for q in asg.on_skeleton.iter_ones() {
        if !asg.c.get(q) {
            sep_bad.push(format!("qudit {q} lies on the skeleton but outside C"));
        }
    }
    let mut components = [0usize; 2];
    for (ci, color) in [Color::Red, Color::Blue].into_iter().enumerate() {
        let cand: Vec<usize> = (0..n)
            .filter(|&q| !asg.c.get(q) && asg.cell[q] != NO_CELL && c.colors[asg.cell[q] as usize] == color)
            .collect();
        let mut uf = UnionFind::new(n);
        for (p, q) in close_pairs(layout, &cand, r_sep) {
            uf.union(p, q);
        }
        let mut first_cell: std::collections::BTreeMap<usize, (u32, usize)> = Default::default();
        let mut reported = HashSet::new();
        for &q in &cand {
            let root = uf.find(q);
            let (cell0, q0) = *first_cell.entry(root).or_insert((asg.cell[q], q));
            if cell0 != asg.cell[q] && reported.insert(root) {
                sep_bad.push(format!(
                    "{color} component spans cells {cell0} and {} (qudits {q0} and {q})",
                    asg.cell[q]
                ));
            }
        }
        components[ci] = first_cell.len();
    }

    let (mut a_size, mut b_size) = (0, 0);
    for q in 0..n {
        if !asg.c.get(q) && asg.cell[q] != NO_CELL {
            match c.colors[asg.cell[q] as usize] {
                Color::Red => a_size += 1,
                Color::Blue => b_size += 1,
            }
        }
    }
    let c_size = asg.c.weight();
    Ok(CellulationReport {
        base: c.describe_base(),
        dim: c.dim(),
        cells: c.n_cells(),
        red_cells: c.count(Color::Red),
        blue_cells: c.count(Color::Blue),
        skeleton_counts: c.skeleton_counts(),
        qudits: n,
        layout_size: layout.size(),
        a: layout.a(),
        r_skel,
        r_sep,
        cells_well_formed: CheckOutcome::from_violations(check_cells(c)),
        no_same_color_faces: CheckOutcome::from_violations(check_faces(c)),
        separation: CheckOutcome::from_violations(sep_bad),
        components_red: components[0],
        components_blue: components[1],
        a_size,
        b_size,
        c_size,
        c_covers_all: c_size == n,
        fingerprint: format!("{:016x}", c.fingerprint()),
        pipeline: None,
    })
}

/// The three regions, as qudit sets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    pub a: BitVector,
    pub b: BitVector,
    pub c: BitVector,
}

impl Partition {
    /// Checks that the three sets are disjoint and cover `n` qudits.
    pub fn new(a: BitVector, b: BitVector, c: BitVector) -> Result<Self> {
        let n = a.len();
        if b.len() != n || c.len() != n {
            return Err(Error::Input("regions have different lengths".into()));
        }
        let overlap = !a.and(&b).is_zero() || !a.and(&c).is_zero() || !b.and(&c).is_zero();
        let cover = a.weight() + b.weight() + c.weight() == n;
        if overlap || !cover {
            return Err(Error::Input("A, B, C must partition the qudits".into()));
        }
        Ok(Self { a, b, c })
    }

    pub fn sizes(&self) -> (usize, usize, usize) {
        (self.a.weight(), self.b.weight(), self.c.weight())
    }
}

/// `C` = skeleton neighborhood, `A` = red qudits outside `C`, `B` = blue qudits outside `C`.
pub fn abc_partition(
    c: &Cellulation,
    layout: &QuditLayout,
    r_skel: f64,
    report: &CellulationReport,
) -> Result<Partition> {
    if !report.passed() {
        return Err(Error::Contract("cellulation did not pass verification".into()));
    }
    if report.fingerprint != format!("{:016x}", c.fingerprint())
        || report.qudits != layout.n_qudits()
        || (report.r_skel - r_skel).abs() > EPS
    {
        return Err(Error::Contract("verification report was produced for different inputs".into()));
    }
    let asg = assign(c, layout, r_skel)?;
    let n = layout.n_qudits();
    let mut a = BitVector::zeros(n);
    let mut b = BitVector::zeros(n);
    for q in 0..n {
        if asg.c.get(q) || asg.cell[q] == NO_CELL {
            continue;
        }
        match c.colors[asg.cell[q] as usize] {
            Color::Red => a.set(q, true),
            Color::Blue => b.set(q, true),
        }
    }
    Partition::new(a, b, asg.c)
}
