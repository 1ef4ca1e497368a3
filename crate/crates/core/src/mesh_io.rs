//! Mesh text input and OFF export.
//!
//! Mesh text: one top simplex per line as whitespace-separated vertex
//! indices. Blank lines and lines starting with `#` are ignored.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::simplicial::{SimplicialComplex, SubdivisionMap};

pub fn parse_mesh(text: &str) -> Result<SimplicialComplex> {
    let mut tops = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let simplex = line
            .split_whitespace()
            .map(|tok| {
                tok.parse::<u32>().map_err(|e| Error::Parse {
                    line: lineno + 1,
                    msg: format!("bad vertex index {tok:?}: {e}"),
                })
            })
            .collect::<Result<Vec<u32>>>()?;
        if let Some(first) = tops.first().map(Vec::len) {
            if first != simplex.len() {
                return Err(Error::Parse {
                    line: lineno + 1,
                    msg: format!("expected {first} vertices, found {}", simplex.len()),
                });
            }
        }
        tops.push(simplex);
    }
    SimplicialComplex::build(&tops)
}

pub fn write_mesh(k: &SimplicialComplex) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# {}-dimensional mesh, {} top simplices", k.dim(), k.count(k.dim()));
    for s in k.simplices(k.dim()) {
        let line: Vec<String> = s.iter().map(u32::to_string).collect();
        let _ = writeln!(out, "{}", line.join(" "));
    }
    out
}

/// Deterministic placeholder coordinates: vertices spread on the unit sphere.
///
/// Combinatorial inputs carry no geometry; this is only for viewing.
pub fn spread_positions(n: usize) -> Vec<[f64; 3]> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|i| {
            let y = 1.0 - 2.0 * (i as f64 + 0.5) / n as f64;
            let r = (1.0 - y * y).sqrt();
            let t = golden * i as f64;
            [r * t.cos(), y, r * t.sin()]
        })
        .collect()
}

/// Positions for a subdivision: each new vertex sits at the barycenter of its parent simplex.
pub fn subdivided_positions(
    parent: &SimplicialComplex,
    parent_pos: &[[f64; 3]],
    child: &SimplicialComplex,
    map: &SubdivisionMap,
) -> Vec<[f64; 3]> {
    let labels = parent.vertex_labels();
    child
        .vertex_labels()
        .iter()
        .map(|&v| {
            let (k, i) = map.parent_of_vertex(v);
            let s = parent.simplex(k, i);
            let mut p = [0.0; 3];
            for u in s {
                let ui = labels.binary_search(u).expect("parent vertex");
                for a in 0..3 {
                    p[a] += parent_pos[ui][a];
                }
            }
            p.map(|x| x / s.len() as f64)
        })
        .collect()
}

/// OFF with one colored polygon per triangle; `face_color` gives RGB in `[0,1]`.
pub fn write_off(
    k: &SimplicialComplex,
    positions: &[[f64; 3]],
    face_color: impl Fn(usize) -> [f32; 3],
) -> Result<String> {
    if k.dim() > 3 || k.dim() < 2 {
        return Err(Error::Input(format!("OFF export needs dimension 2 or 3, got {}", k.dim())));
    }
    if positions.len() != k.count(0) {
        return Err(Error::Dimension("one position per vertex required".into()));
    }
    let labels = k.vertex_labels();
    let mut out = String::from("OFF\n");
    let _ = writeln!(out, "{} {} 0", k.count(0), k.count(2));
    for p in positions {
        let _ = writeln!(out, "{:.6} {:.6} {:.6}", p[0], p[1], p[2]);
    }
    for (i, t) in k.simplices(2).enumerate() {
        let idx: Vec<usize> = t
            .iter()
            .map(|v| labels.binary_search(v).expect("vertex"))
            .collect();
        let [r, g, b] = face_color(i);
        let _ = writeln!(out, "3 {} {} {} {:.3} {:.3} {:.3}", idx[0], idx[1], idx[2], r, g, b);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifolds;
    use crate::simplicial::barycentric_subdivide;

    #[test]
    fn parse_with_comments() {
        let text = "# tetrahedron\n0 1 2\n\n0 1 3\n 0 2 3\n1 2 3\n";
        let k = parse_mesh(text).unwrap();
        assert_eq!(k.counts(), vec![4, 6, 4]);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        assert_eq!(
            parse_mesh("0 1 2\n0 x 3\n").unwrap_err(),
            Error::Parse { line: 2, msg: "bad vertex index \"x\": invalid digit found in string".into() }
        );
        assert!(matches!(parse_mesh("0 1 2\n0 1\n"), Err(Error::Parse { line: 2, .. })));
    }

    #[test]
    fn mesh_text_roundtrip() {
        let k = manifolds::klein_bottle();
        assert_eq!(parse_mesh(&write_mesh(&k)).unwrap(), k);
    }

    #[test]
    fn off_export_shape() {
        let k = manifolds::torus();
        let (child, map) = barycentric_subdivide(&k);
        let pos = subdivided_positions(&k, &spread_positions(7), &child, &map);
        let off = write_off(&child, &pos, |_| [1.0, 0.0, 0.0]).unwrap();
        let mut lines = off.lines();
        assert_eq!(lines.next(), Some("OFF"));
        assert_eq!(lines.next(), Some("42 84 0"));
        assert_eq!(off.lines().count(), 2 + 42 + 84);
    }
}
