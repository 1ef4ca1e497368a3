//! Built-in triangulations of closed manifolds.

use std::fmt;

use crate::error::{Error, Result};
use crate::simplicial::SimplicialComplex;

/// The manifold families the pipeline ships with.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Manifold {
    Sphere,
    Torus,
    Torus3,
    GenusSurface(usize),
    KleinBottle,
    ProjectivePlane,
}

impl Manifold {
    pub fn triangulate(self) -> Result<SimplicialComplex> {
        match self {
            Manifold::Sphere => Ok(sphere()),
            Manifold::Torus => Ok(torus()),
            Manifold::Torus3 => Ok(torus3()),
            Manifold::GenusSurface(g) => genus_surface(g),
            Manifold::KleinBottle => Ok(klein_bottle()),
            Manifold::ProjectivePlane => Ok(projective_plane()),
        }
    }

    pub fn is_orientable(self) -> bool {
        !matches!(self, Manifold::KleinBottle | Manifold::ProjectivePlane)
    }

    pub fn dim(self) -> usize {
        match self {
            Manifold::Torus3 => 3,
            _ => 2,
        }
    }
}

impl fmt::Display for Manifold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Manifold::Sphere => write!(f, "sphere"),
            Manifold::Torus => write!(f, "torus"),
            Manifold::Torus3 => write!(f, "torus3"),
            Manifold::GenusSurface(g) => write!(f, "genus_surface({g})"),
            Manifold::KleinBottle => write!(f, "klein_bottle"),
            Manifold::ProjectivePlane => write!(f, "projective_plane"),
        }
    }
}

fn build(tops: Vec<Vec<u32>>) -> SimplicialComplex {
    SimplicialComplex::build(&tops).expect("built-in triangulation is a closed manifold")
}

/// Boundary of the tetrahedron.
pub fn sphere() -> SimplicialComplex {
    build(vec![vec![0, 1, 2], vec![0, 1, 3], vec![0, 2, 3], vec![1, 2, 3]])
}

fn torus7_triangles() -> Vec<Vec<u32>> {
    (0..7u32)
        .flat_map(|i| [vec![i, (i + 1) % 7, (i + 3) % 7], vec![i, (i + 2) % 7, (i + 3) % 7]])
        .collect()
}

/// The 7-vertex (Möbius–Császár) torus.
pub fn torus() -> SimplicialComplex {
    build(torus7_triangles())
}

/// Six-vertex real projective plane (hemi-icosahedron).
pub fn projective_plane() -> SimplicialComplex {
    build(vec![
        vec![0, 1, 2],
        vec![0, 2, 3],
        vec![0, 3, 4],
        vec![0, 4, 5],
        vec![0, 5, 1],
        vec![1, 2, 4],
        vec![2, 3, 5],
        vec![3, 4, 1],
        vec![4, 5, 2],
        vec![5, 1, 3],
    ])
}

/// Square grid on `Z_m × Z_n` with each square cut along its diagonal.
/// Wrapping `j → j + n` maps column `i` to `flip(i)`.
fn grid_surface(m: u32, n: u32, flip: impl Fn(u32) -> u32) -> SimplicialComplex {
    let v = |i: u32, j: u32| -> u32 {
        let (i, j) = if j >= n { (flip(i % m), j - n) } else { (i, j) };
        (i % m) + m * j
    };
    let mut tops = Vec::new();
    for j in 0..n {
        for i in 0..m {
            let (a, b, c, d) = (v(i, j), v(i + 1, j), v(i, j + 1), v(i + 1, j + 1));
            tops.push(vec![a, b, d]);
            tops.push(vec![a, c, d]);
        }
    }
    build(tops)
}

/// A 4×4-grid Klein bottle (16 vertices, 32 triangles).
pub fn klein_bottle() -> SimplicialComplex {
    grid_surface(4, 4, |i| (4 - i) % 4)
}

/// Freudenthal triangulation of the 3-torus on a periodic `n³` grid (6 tetrahedra per cube).
pub fn cubical_torus3(n: u32) -> Result<SimplicialComplex> {
    if n < 3 {
        return Err(Error::Input(format!("3-torus grid needs n ≥ 3, got {n}")));
    }
    let idx = |x: u32, y: u32, z: u32| (x % n) + n * (y % n) + n * n * (z % n);
    let mut tops = Vec::new();
    let perms = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    for z in 0..n {
        for y in 0..n {
            for x in 0..n {
                for p in perms {
                    let mut c = [x, y, z];
                    let mut t = vec![idx(c[0], c[1], c[2])];
                    for axis in p {
                        c[axis] += 1;
                        t.push(idx(c[0], c[1], c[2]));
                    }
                    tops.push(t);
                }
            }
        }
    }
    SimplicialComplex::build(&tops)
}

/// The coarse 3-torus used by the pipeline: `cubical_torus3(3)`.
pub fn torus3() -> SimplicialComplex {
    cubical_torus3(3).expect("n = 3 is valid")
}

/// Connected sum of `g` copies of the 7-vertex torus.
///
/// Summand `i` drops triangle `{0,1,3}` to glue to summand `i − 1` and the
/// vertex-disjoint triangle `{2,4,5}` to glue to summand `i + 1`, so every
/// summand contributes a fixed number of new simplices.
pub fn genus_surface(g: usize) -> Result<SimplicialComplex> {
    if g == 0 {
        return Err(Error::Input("genus must be at least 1".into()));
    }
    const BACK: [u32; 3] = [0, 1, 3];
    const FRONT: [u32; 3] = [2, 4, 5];
    let base = torus7_triangles();
    let mut tops: Vec<Vec<u32>> = Vec::new();
    let mut next_label = 0u32;
    let mut prev_front: Option<[u32; 3]> = None;
    for s in 0..g {
        // relabel this summand's 7 vertices
        let mut label = [u32::MAX; 7];
        if let Some(pf) = prev_front {
            for (k, &v) in BACK.iter().enumerate() {
                label[v as usize] = pf[k];
            }
        }
        for l in label.iter_mut().filter(|l| **l == u32::MAX) {
            *l = next_label;
            next_label += 1;
        }
        let has_back = s > 0;
        let has_front = s + 1 < g;
        for t in &base {
            let mut sorted = t.clone();
            sorted.sort_unstable();
            if (has_back && sorted == BACK) || (has_front && sorted == FRONT) {
                continue;
            }
            tops.push(t.iter().map(|&v| label[v as usize]).collect());
        }
        prev_front = Some(FRONT.map(|v| label[v as usize]));
    }
    SimplicialComplex::build(&tops)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn torus3_homology() {
        let t = torus3();
        assert_eq!(t.counts(), vec![27, 189, 324, 162]);
        assert_eq!(t.betti_numbers(), vec![1, 3, 3, 1]);
    }

    #[test]
    fn small_cubical_torus_rejected() {
        assert!(cubical_torus3(2).is_err());
    }

    #[test]
    fn genus_two_surface() {
        let s = genus_surface(2).unwrap();
        assert_eq!(s.euler_characteristic(), -2);
        assert_eq!(s.betti_numbers(), vec![1, 4, 1]);
    }

    #[test]
    fn genus_counts_are_affine() {
        let c: Vec<Vec<usize>> = (1..=4).map(|g| genus_surface(g).unwrap().counts()).collect();
        for g in 1..=4usize {
            let expect = vec![4 * g + 3, 18 * g + 3, 12 * g + 2];
            assert_eq!(c[g - 1], expect);
        }
        assert_eq!(genus_surface(1).unwrap(), torus());
    }

    #[test]
    fn genus_zero_rejected() {
        assert!(matches!(genus_surface(0), Err(Error::Input(_))));
    }

    #[test]
    fn klein_bottle_and_rp2() {
        let k = klein_bottle();
        assert_eq!(k.euler_characteristic(), 0);
        let p = projective_plane();
        assert_eq!(p.counts(), vec![6, 15, 10]);
    }

    #[test]
    fn display_names() {
        assert_eq!(Manifold::GenusSurface(3).to_string(), "genus_surface(3)");
        assert_eq!(Manifold::ProjectivePlane.to_string(), "projective_plane");
    }
}
