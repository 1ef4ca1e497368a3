//! Generator sets for the lattice models and a few small textbook codes.

use std::fmt;
use std::str::FromStr;

use super::{PauliOp, StabilizerCode};
use crate::error::{Error, Result};
use crate::layout::{layout_from_complex, torus_lattice_layout, CubicLattice, QuditLayout, SiteKind};
use crate::simplicial::SimplicialComplex;

/// Cube terms of the cubic code with two qubits per vertex.
///
/// Each row is `(Pauli, qubit slot, corner offsets)`: the term anchored at
/// vertex `v` acts with that Pauli on slot `s` of `v + offset` for each offset.
pub const CUBIC1_TABLE: [(char, usize, [[isize; 3]; 4]); 4] = [
    ('X', 0, [[0, 0, 0], [1, 1, 0], [0, 1, 1], [1, 0, 1]]),
    ('X', 1, [[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1]]),
    ('Z', 0, [[1, 1, 0], [0, 1, 1], [1, 0, 1], [1, 1, 1]]),
    ('Z', 1, [[1, 0, 0], [0, 1, 0], [0, 0, 1], [1, 1, 1]]),
];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FractonModel {
    Cubic1,
    XCube,
    Checkerboard,
}

impl fmt::Display for FractonModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FractonModel::Cubic1 => "cubic1",
            FractonModel::XCube => "xcube",
            FractonModel::Checkerboard => "checkerboard_model",
        })
    }
}

impl FromStr for FractonModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cubic1" => Ok(FractonModel::Cubic1),
            "xcube" => Ok(FractonModel::XCube),
            "checkerboard_model" | "checkerboard" => Ok(FractonModel::Checkerboard),
            other => Err(Error::Input(format!("unknown fracton model {other:?}"))),
        }
    }
}

fn unit(axis: usize, dim: usize, sign: isize) -> Vec<isize> {
    (0..dim).map(|i| if i == axis { sign } else { 0 }).collect()
}

fn add(a: &[isize], b: &[isize]) -> Vec<isize> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

/// Star (X) and plaquette (Z) terms on the edges of `Z_L^dim`.
pub fn toric_code(dim: usize, size: usize) -> Result<(StabilizerCode, QuditLayout)> {
    if !(2..=3).contains(&dim) {
        return Err(Error::Input(format!("toric code dimension must be 2 or 3, got {dim}")));
    }
    let layout = torus_lattice_layout(dim, size, SiteKind::Edges)?;
    let lat = CubicLattice::new(dim, size);
    let n = layout.n_qudits();
    let mut gens = Vec::new();
    for v in 0..lat.n_vertices() {
        let star = (0..dim).flat_map(|i| [lat.edge(v, i), lat.edge(lat.shift(v, &unit(i, dim, -1)), i)]);
        gens.push(PauliOp::x_on(n, star));
    }
    for v in 0..lat.n_vertices() {
        for i in 0..dim {
            for j in i + 1..dim {
                gens.push(PauliOp::z_on(n, plaquette(&lat, v, i, j)));
            }
        }
    }
    let code = StabilizerCode::build_named(format!("toric{dim}(L={size})"), n, gens)?;
    Ok((code, layout))
}

fn plaquette(lat: &CubicLattice, v: usize, i: usize, j: usize) -> [usize; 4] {
    let d = lat.dim;
    [
        lat.edge(v, i),
        lat.edge(lat.shift(v, &unit(i, d, 1)), j),
        lat.edge(lat.shift(v, &unit(j, d, 1)), i),
        lat.edge(v, j),
    ]
}

/// Homological code on a closed surface: X star per vertex, Z per triangle, qubits on edges.
pub fn surface_code_on_complex(k: &SimplicialComplex) -> Result<(StabilizerCode, QuditLayout)> {
    if k.dim() != 2 {
        return Err(Error::Input(format!("surface code needs a 2-complex, got dimension {}", k.dim())));
    }
    let layout = layout_from_complex(&std::sync::Arc::new(k.clone()), 0)?;
    let n = k.count(1);
    let labels = k.vertex_labels();
    let mut stars = vec![Vec::new(); labels.len()];
    for (e, s) in k.simplices(1).enumerate() {
        for v in s {
            stars[labels.binary_search(v).expect("vertex")].push(e);
        }
    }
    let mut gens: Vec<PauliOp> = stars.into_iter().map(|s| PauliOp::x_on(n, s)).collect();
    for t in 0..k.count(2) {
        gens.push(PauliOp::z_on(n, k.faces_of(2, t).iter().map(|&e| e as usize)));
    }
    let code = StabilizerCode::build_named("surface", n, gens)?;
    Ok((code, layout))
}

pub fn fracton_code(model: FractonModel, size: usize) -> Result<(StabilizerCode, QuditLayout)> {
    match model {
        FractonModel::XCube => xcube(size),
        FractonModel::Cubic1 => cubic1(size),
        FractonModel::Checkerboard => checkerboard_model(size),
    }
}

fn xcube(size: usize) -> Result<(StabilizerCode, QuditLayout)> {
    let layout = torus_lattice_layout(3, size, SiteKind::Edges)?;
    let lat = CubicLattice::new(3, size);
    let n = layout.n_qudits();
    let mut gens = Vec::new();
    for v in 0..lat.n_vertices() {
        let mut edges = Vec::with_capacity(12);
        for axis in 0..3 {
            let (j, k) = ((axis + 1) % 3, (axis + 2) % 3);
            for (a, b) in [(0, 0), (1, 0), (0, 1), (1, 1)] {
                let off = add(&unit(j, 3, a), &unit(k, 3, b));
                edges.push(lat.edge(lat.shift(v, &off), axis));
            }
        }
        gens.push(PauliOp::x_on(n, edges));
    }
    for v in 0..lat.n_vertices() {
        for (i, j) in [(0, 1), (1, 2), (0, 2)] {
            let legs = [i, j].into_iter().flat_map(|a| [lat.edge(v, a), lat.edge(lat.shift(v, &unit(a, 3, -1)), a)]);
            gens.push(PauliOp::z_on(n, legs));
        }
    }
    let code = StabilizerCode::build_named(format!("xcube(L={size})"), n, gens)?;
    Ok((code, layout))
}

fn cube_corners(lat: &CubicLattice, v: usize) -> Vec<usize> {
    (0..8)
        .map(|m| lat.shift(v, &[(m & 1) as isize, (m >> 1 & 1) as isize, (m >> 2 & 1) as isize]))
        .collect()
}

fn checkerboard_model(size: usize) -> Result<(StabilizerCode, QuditLayout)> {
    if size % 2 == 1 {
        return Err(Error::Input(format!("checkerboard model needs even L, got {size}")));
    }
    let layout = torus_lattice_layout(3, size, SiteKind::Vertices(1))?;
    let lat = CubicLattice::new(3, size);
    let n = layout.n_qudits();
    let black: Vec<usize> = (0..lat.n_vertices())
        .filter(|&v| lat.coords(v).iter().sum::<usize>() % 2 == 0)
        .collect();
    let mut gens: Vec<PauliOp> = black.iter().map(|&v| PauliOp::x_on(n, cube_corners(&lat, v))).collect();
    gens.extend(black.iter().map(|&v| PauliOp::z_on(n, cube_corners(&lat, v))));
    let code = StabilizerCode::build_named(format!("checkerboard_model(L={size})"), n, gens)?;
    Ok((code, layout))
}

fn cubic1(size: usize) -> Result<(StabilizerCode, QuditLayout)> {
    let layout = torus_lattice_layout(3, size, SiteKind::Vertices(2))?;
    let lat = CubicLattice::new(3, size);
    let n = layout.n_qudits();
    let mut gens = Vec::new();
    for pauli in ['X', 'Z'] {
        for v in 0..lat.n_vertices() {
            let qubits = CUBIC1_TABLE
                .iter()
                .filter(|row| row.0 == pauli)
                .flat_map(|&(_, slot, offs)| offs.map(|o| 2 * lat.shift(v, &o) + slot));
            gens.push(match pauli {
                'X' => PauliOp::x_on(n, qubits),
                _ => PauliOp::z_on(n, qubits),
            });
        }
    }
    let code = StabilizerCode::build_named(format!("cubic1(L={size})"), n, gens)?;
    Ok((code, layout))
}

/// `L` independent 2D toric codes in the xy-planes of `Z_L^3`.
pub fn stacked_layers(size: usize) -> Result<(StabilizerCode, QuditLayout)> {
    let layout = torus_lattice_layout(3, size, SiteKind::PlanarEdges)?;
    let lat = CubicLattice::new(3, size);
    let n = layout.n_qudits();
    let e = |v: usize, axis: usize| 2 * v + axis;
    let mut gens = Vec::new();
    for v in 0..lat.n_vertices() {
        let star = (0..2).flat_map(|a| [e(v, a), e(lat.shift(v, &unit(a, 3, -1)), a)]);
        gens.push(PauliOp::x_on(n, star));
    }
    for v in 0..lat.n_vertices() {
        let (vx, vy) = (lat.shift(v, &[1, 0, 0]), lat.shift(v, &[0, 1, 0]));
        gens.push(PauliOp::z_on(n, [e(v, 0), e(vx, 1), e(vy, 0), e(v, 1)]));
    }
    let code = StabilizerCode::build_named(format!("stacked(L={size})"), n, gens)?;
    Ok((code, layout))
}

/// A control code with one logical qubit stored on qubit 0: `Z` on every other qubit.
pub fn planted_code(n: usize) -> StabilizerCode {
    let gens = (1..n).map(|q| PauliOp::z_on(n, [q])).collect();
    StabilizerCode::build_named("planted", n, gens).expect("single-qubit Z terms commute")
}

pub fn five_qubit_code() -> StabilizerCode {
    let gens = ["XZZXI", "IXZZX", "XIXZZ", "ZXIXZ"]
        .iter()
        .map(|s| s.parse().expect("valid Pauli"))
        .collect();
    StabilizerCode::build_named("five_qubit", 5, gens).expect("perfect code commutes")
}

/// Bit-flip repetition code `Z_i Z_{i+1}`.
pub fn repetition_code(n: usize) -> StabilizerCode {
    let gens = (0..n.saturating_sub(1)).map(|i| PauliOp::z_on(n, [i, i + 1])).collect();
    StabilizerCode::build_named(format!("repetition{n}"), n, gens).expect("Z terms commute")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifolds;

    #[test]
    fn toric_degeneracies() {
        let (c, lay) = toric_code(2, 4).unwrap();
        assert_eq!((c.n(), c.rank(), c.degeneracy()), (32, 30, 2));
        assert_eq!(lay.n_qudits(), 32);
        assert_eq!(toric_code(3, 3).unwrap().0.degeneracy(), 3);
        assert_eq!(toric_code(2, 6).unwrap().0.degeneracy(), 2);
        assert!(toric_code(4, 3).is_err());
    }

    #[test]
    fn toric_logicals_wrap() {
        let (c, _) = toric_code(2, 4).unwrap();
        let l = c.logical_generators();
        assert_eq!(l.len(), 4);
        // every logical must have weight at least L
        assert!(l.iter().all(|p| p.weight() >= 4));
    }

    #[test]
    fn surface_codes_match_betti_numbers() {
        for k in [
            manifolds::sphere(),
            manifolds::torus(),
            manifolds::genus_surface(2).unwrap(),
            manifolds::klein_bottle(),
            manifolds::projective_plane(),
        ] {
            let (c, _) = surface_code_on_complex(&k).unwrap();
            assert_eq!(c.degeneracy(), k.betti_numbers()[1]);
        }
        assert_eq!(surface_code_on_complex(&manifolds::sphere()).unwrap().0.degeneracy(), 0);
        assert!(surface_code_on_complex(&manifolds::torus3()).is_err());
    }

    #[test]
    fn xcube_degeneracy_is_6l_minus_3() {
        for l in [2, 3, 4] {
            assert_eq!(fracton_code(FractonModel::XCube, l).unwrap().0.degeneracy(), 6 * l - 3);
        }
    }

    #[test]
    fn checkerboard_parity() {
        assert!(fracton_code(FractonModel::Checkerboard, 3).is_err());
        let (c, lay) = fracton_code(FractonModel::Checkerboard, 4).unwrap();
        assert_eq!(lay.n_qudits(), 64);
        assert!(c.degeneracy() > 0);
    }

    #[test]
    fn cubic1_builds_with_positive_degeneracy() {
        for l in [2, 3, 4] {
            let (c, lay) = fracton_code(FractonModel::Cubic1, l).unwrap();
            assert_eq!(lay.n_qudits(), 2 * l * l * l);
            assert!(c.degeneracy() >= 1);
        }
    }

    #[test]
    fn stacked_is_two_per_layer() {
        for l in 2..=5 {
            let (c, _) = stacked_layers(l).unwrap();
            assert_eq!(c.degeneracy(), 2 * l);
            let toric = toric_code(2, l).unwrap().0.degeneracy();
            assert_eq!(c.degeneracy(), l * toric);
        }
    }

    #[test]
    fn small_codes() {
        assert_eq!(five_qubit_code().degeneracy(), 1);
        assert_eq!(repetition_code(3).degeneracy(), 1);
        assert_eq!(planted_code(6).degeneracy(), 1);
    }

    #[test]
    fn model_names() {
        assert_eq!("xcube".parse::<FractonModel>().unwrap(), FractonModel::XCube);
        assert_eq!(FractonModel::Checkerboard.to_string(), "checkerboard_model");
        assert!("haah".parse::<FractonModel>().is_err());
    }
}
