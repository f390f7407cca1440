//! Plain-text mesh files.
//!
//! ```text
//! smesh <dim> <nv> <nt>
//! <x> <y> [<z>]          (nv lines)
//! <v0> <v1> <v2> [<v3>]  (nt lines, 0-based, positively oriented)
//! ```

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::complex::Orient;
use super::{MeshError, SimplicialComplex};

pub fn write_mesh_string(k: &SimplicialComplex) -> String {
    let dim = k.dim();
    let mut out = String::new();
    let _ = writeln!(out, "smesh {} {} {}", dim, k.count(0), k.count(dim));
    for p in k.vertices() {
        let coords: Vec<String> = p[..dim].iter().map(|x| format!("{x:.16e}")).collect();
        let _ = writeln!(out, "{}", coords.join(" "));
    }
    for s in k.simplices(dim) {
        let idx: Vec<String> = s.iter().map(|v| v.to_string()).collect();
        let _ = writeln!(out, "{}", idx.join(" "));
    }
    out
}

pub fn write_mesh(k: &SimplicialComplex, path: impl AsRef<Path>) -> Result<(), MeshError> {
    fs::write(path, write_mesh_string(k))?;
    Ok(())
}

pub fn read_mesh(path: impl AsRef<Path>) -> Result<SimplicialComplex, MeshError> {
    let text = fs::read_to_string(path)?;
    read_mesh_str(&text)
}

/// Parses and validates a mesh. Orientation is checked, never repaired.
pub fn read_mesh_str(text: &str) -> Result<SimplicialComplex, MeshError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());
    let (_, header) = lines
        .next()
        .ok_or_else(|| MeshError::MalformedHeader("empty file".into()))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 4 || fields[0] != "smesh" {
        return Err(MeshError::MalformedHeader(format!(
            "expected `smesh <dim> <nv> <nt>`, got `{header}`"
        )));
    }
    let num = |s: &str, what: &str| {
        s.parse::<usize>()
            .map_err(|_| MeshError::MalformedHeader(format!("bad {what} `{s}`")))
    };
    let dim = num(fields[1], "dimension")?;
    let nv = num(fields[2], "vertex count")?;
    let nt = num(fields[3], "simplex count")?;
    if !(2..=3).contains(&dim) {
        return Err(MeshError::MalformedHeader(format!(
            "unsupported dimension {dim}"
        )));
    }

    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (ln, l) = lines.next().ok_or_else(|| MeshError::MalformedData {
            line: 0,
            msg: "unexpected end of file in vertex block".into(),
        })?;
        let xs: Vec<f64> = l
            .split_whitespace()
            .map(|t| t.parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|e| MeshError::MalformedData {
                line: ln,
                msg: e.to_string(),
            })?;
        if xs.len() != dim || xs.iter().any(|x| !x.is_finite()) {
            return Err(MeshError::MalformedData {
                line: ln,
                msg: format!("expected {dim} finite coordinates"),
            });
        }
        let mut p = [0.0; 3];
        p[..dim].copy_from_slice(&xs);
        vertices.push(p);
    }
    let mut tops = Vec::with_capacity(nt);
    for _ in 0..nt {
        let (ln, l) = lines.next().ok_or_else(|| MeshError::MalformedData {
            line: 0,
            msg: "unexpected end of file in simplex block".into(),
        })?;
        let s: Vec<usize> = l
            .split_whitespace()
            .map(|t| t.parse::<usize>())
            .collect::<Result<_, _>>()
            .map_err(|e| MeshError::MalformedData {
                line: ln,
                msg: e.to_string(),
            })?;
        if s.len() != dim + 1 {
            return Err(MeshError::MalformedData {
                line: ln,
                msg: format!("expected {} vertex indices", dim + 1),
            });
        }
        tops.push(s);
    }
    if let Some((ln, _)) = lines.next() {
        return Err(MeshError::MalformedData {
            line: ln,
            msg: "trailing data".into(),
        });
    }
    SimplicialComplex::build(dim, vertices, tops, Orient::Require, true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{generate, DomainSpec, Family};

    #[test]
    fn round_trip_is_byte_identical() {
        let k = generate(&DomainSpec::new(Family::Ball, 1)).unwrap();
        let s = write_mesh_string(&k);
        let k2 = read_mesh_str(&s).unwrap();
        assert_eq!(write_mesh_string(&k2), s);
        for d in 0..=3 {
            assert_eq!(
                k.simplices(d).collect::<Vec<_>>(),
                k2.simplices(d).collect::<Vec<_>>()
            );
        }
    }

    #[test]
    fn distinct_errors() {
        assert!(matches!(
            read_mesh_str("mesh 3 0 0"),
            Err(MeshError::MalformedHeader(_))
        ));

        let tet = "0 0 0\n1 0 0\n0 1 0\n0 0 1\n";
        let inverted = format!("smesh 3 4 1\n{tet}0 2 1 3\n");
        assert!(matches!(
            read_mesh_str(&inverted),
            Err(MeshError::Inverted { .. })
        ));

        // Three tetrahedra hanging off the same triangle (0,1,2).
        let fan = "smesh 3 6 3\n0 0 0\n1 0 0\n0 1 0\n0 0 1\n1 1 1\n0.3 0.3 -1\n\
                   0 1 2 3\n0 1 2 4\n0 2 1 5\n";
        let k = read_mesh_str(fan);
        assert!(
            matches!(k, Err(MeshError::NonManifold { count: 3, .. })),
            "{k:?}"
        );
    }
}
