//! The `MORSEMESH 1` mesh-and-field text format plus serialization helpers.
//!
//! ```text
//! MORSEMESH 1
//! # comment
//! vertices
//! v <id> <value p/q> [x y z]
//! simplices
//! s <id> <id> ...
//! ```

use std::fmt::Write as _;

use serde::Serializer;

use crate::chains::SimplicialComplex;
use crate::error::{Error, Result};
use crate::scalarfield::{fmt_rat, parse_rat, Rat, ScalarField};

pub const HEADER: &str = "MORSEMESH 1";

pub(crate) fn ser_rats<S: Serializer>(rs: &[Rat], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(rs.iter().map(fmt_rat))
}

/// A parsed mesh file: the field plus optional vertex coordinates.
#[derive(Clone, Debug)]
pub struct MeshFile {
    pub field: ScalarField,
    pub coordinates: Option<Vec<[Rat; 3]>>,
}

#[derive(PartialEq)]
enum Section {
    None,
    Vertices,
    Simplices,
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

/// Parses `MORSEMESH 1` text. Faces of the listed simplices are added
/// automatically.
pub fn parse_mesh(text: &str) -> Result<MeshFile> {
    let mut header_seen = false;
    let mut section = Section::None;
    let mut vertices: Vec<(usize, u32, Rat, Option<[Rat; 3]>)> = Vec::new();
    let mut simplices: Vec<(usize, Vec<u32>)> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if !header_seen {
            if line.split_whitespace().collect::<Vec<_>>() != ["MORSEMESH", "1"] {
                return Err(parse_err(line_no, format!("expected header {HEADER:?}")));
            }
            header_seen = true;
            continue;
        }
        let mut tokens = line.split_whitespace();
        let head = tokens.next().unwrap_or_default();
        let rest: Vec<&str> = tokens.collect();
        match head {
            "vertices" if rest.is_empty() => section = Section::Vertices,
            "simplices" if rest.is_empty() => section = Section::Simplices,
            "v" => {
                if section != Section::Vertices {
                    return Err(parse_err(line_no, "vertex line outside the vertices section"));
                }
                if rest.len() != 2 && rest.len() != 5 {
                    return Err(parse_err(line_no, "expected `v <id> <value> [x y z]`"));
                }
                let id: u32 = rest[0].parse().map_err(|_| parse_err(line_no, format!("bad vertex id {:?}", rest[0])))?;
                let value = parse_rat(rest[1]).map_err(|e| parse_err(line_no, e.to_string()))?;
                let coords = if rest.len() == 5 {
                    let c = rest[2..]
                        .iter()
                        .map(|s| parse_rat(s).map_err(|e| parse_err(line_no, e.to_string())))
                        .collect::<Result<Vec<_>>>()?;
                    Some([c[0].clone(), c[1].clone(), c[2].clone()])
                } else {
                    None
                };
                vertices.push((line_no, id, value, coords));
            }
            "s" => {
                if section != Section::Simplices {
                    return Err(parse_err(line_no, "simplex line outside the simplices section"));
                }
                if rest.is_empty() {
                    return Err(parse_err(line_no, "empty simplex"));
                }
                let ids = rest
                    .iter()
                    .map(|s| s.parse::<u32>().map_err(|_| parse_err(line_no, format!("bad vertex id {s:?}"))))
                    .collect::<Result<Vec<_>>>()?;
                simplices.push((line_no, ids));
            }
            other => return Err(parse_err(line_no, format!("unexpected token {other:?}"))),
        }
    }
    if !header_seen {
        return Err(parse_err(1, format!("missing header {HEADER:?}")));
    }
    let n = vertices.len();
    let mut values: Vec<Option<Rat>> = vec![None; n];
    let mut coords: Vec<Option<[Rat; 3]>> = vec![None; n];
    for (line_no, id, value, c) in vertices.iter().cloned() {
        let slot = values
            .get_mut(id as usize)
            .ok_or_else(|| parse_err(line_no, format!("vertex ids must be contiguous from 0; got {id} with {n} vertices")))?;
        if slot.replace(value).is_some() {
            return Err(parse_err(line_no, format!("duplicate vertex id {id}")));
        }
        coords[id as usize] = c;
    }
    let values: Vec<Rat> = values.into_iter().map(|v| v.expect("every id assigned")).collect();
    let with_coords = coords.iter().filter(|c| c.is_some()).count();
    if with_coords != 0 && with_coords != n {
        return Err(parse_err(1, "coordinates must be given for all vertices or none"));
    }
    for (line_no, ids) in &simplices {
        if let Some(&bad) = ids.iter().find(|&&v| v as usize >= n) {
            return Err(parse_err(*line_no, format!("unknown vertex {bad}")));
        }
    }
    let complex = SimplicialComplex::from_facets(n, simplices.into_iter().map(|(_, ids)| ids))
        .map_err(|e| parse_err(0, e.to_string()))?;
    let field = ScalarField::new(complex, values).map_err(|e| parse_err(0, e.to_string()))?;
    let coordinates = (with_coords == n && n > 0).then(|| coords.into_iter().map(Option::unwrap).collect());
    Ok(MeshFile { field, coordinates })
}

/// Writes a field in `MORSEMESH 1` format, listing maximal simplices.
pub fn write_mesh(sf: &ScalarField, coordinates: Option<&[[Rat; 3]]>) -> String {
    let mut out = format!("{HEADER}\n");
    out.push_str("vertices\n");
    for (i, v) in sf.values.iter().enumerate() {
        let _ = write!(out, "v {i} {}", fmt_rat(v));
        if let Some(c) = coordinates {
            let _ = write!(out, " {} {} {}", fmt_rat(&c[i][0]), fmt_rat(&c[i][1]), fmt_rat(&c[i][2]));
        }
        out.push('\n');
    }
    out.push_str("simplices\n");
    for facet in sf.complex.facets() {
        let ids: Vec<String> = facet.iter().map(u32::to_string).collect();
        let _ = writeln!(out, "s {}", ids.join(" "));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{build, Resolution, SURFACE_NAMES};

    #[test]
    fn round_trip_every_fixture() {
        for name in SURFACE_NAMES {
            let sf = build(name, Resolution::default()).unwrap();
            let text = write_mesh(&sf, None);
            let back = parse_mesh(&text).unwrap().field;
            assert_eq!(back.values, sf.values, "{name}");
            assert_eq!(back.complex.facets(), sf.complex.facets(), "{name}");
            assert_eq!(write_mesh(&back, None), text);
        }
    }

    #[test]
    fn parses_comments_and_coordinates() {
        let text = "# a triangle\nMORSEMESH 1\nvertices\nv 0 0 0 0 0\nv 1 1/2 1 0 0 # right\nv 2 -3 0 1 0\n\nsimplices\ns 0 1 2\n";
        let m = parse_mesh(text).unwrap();
        assert_eq!(m.field.complex.count(1), 3);
        assert_eq!(fmt_rat(&m.field.values[1]), "1/2");
        assert_eq!(m.coordinates.unwrap()[2][1], Rat::from_integer(1.into()));
    }

    #[test]
    fn reports_line_numbers() {
        let cases = [
            ("MORSEMESH 2\n", 1),
            ("MORSEMESH 1\nvertices\nv 0 x\n", 3),
            ("MORSEMESH 1\nvertices\nv 0 0\nsimplices\ns 0 7\n", 5),
            ("MORSEMESH 1\nvertices\nv 0 0\nv 0 1\n", 4),
            ("MORSEMESH 1\ns 0\n", 2),
            ("MORSEMESH 1\nvertices\nv 1 0\n", 3),
        ];
        for (text, line) in cases {
            match parse_mesh(text) {
                Err(Error::Parse { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
                other => panic!("{text:?}: {other:?}"),
            }
        }
    }
}
