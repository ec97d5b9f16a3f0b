//! ASCII Gmsh MSH reader (versions 2.2 and 4.1) and a v2.2 writer.
//!
//! Accepted element types: 4-node (4) and 10-node (11) tetrahedra as cells;
//! points (15), lines (1, 8) and triangles (2, 9) are skipped as boundary
//! decoration. Any other type is rejected.
//!
//! Gmsh numbers the tet10 mid-edge nodes as
//! `4:(0,1) 5:(1,2) 6:(0,2) 7:(0,3) 8:(2,3) 9:(1,3)`; internally they follow
//! the reference edge order `(0,1) (0,2) (0,3) (1,2) (1,3) (2,3)`, so internal
//! node `4 + e` is Gmsh node `GMSH_TET10_EDGE_NODES[e]`.

use super::Mesh;
use crate::{Error, Result, Vec3};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

pub const GMSH_TET10_EDGE_NODES: [usize; 6] = [4, 6, 7, 5, 9, 8];

const DECORATION_TYPES: [i64; 5] = [15, 1, 8, 2, 9];

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    section: String,
    line: usize,
}

impl<'a> Lines<'a> {
    fn err(&self, message: impl Into<String>) -> Error {
        Error::Parse {
            section: self.section.clone(),
            line: self.line,
            message: message.into(),
        }
    }

    fn next_line(&mut self) -> Result<&'a str> {
        match self.inner.next() {
            Some((i, l)) => {
                self.line = i + 1;
                Ok(l.trim())
            }
            None => Err(self.err("unexpected end of file")),
        }
    }

    fn tokens<T: std::str::FromStr>(&mut self) -> Result<Vec<T>> {
        let l = self.next_line()?;
        l.split_whitespace()
            .map(|t| t.parse::<T>().map_err(|_| self.err(format!("cannot parse '{t}'"))))
            .collect()
    }

    fn expect_end(&mut self, name: &str) -> Result<()> {
        let l = self.next_line()?;
        if l != format!("$End{name}") {
            return Err(self.err(format!("expected $End{name}, found '{l}'")));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Version {
    V2,
    V4,
}

pub fn read_gmsh(path: impl AsRef<Path>) -> Result<Mesh> {
    let text = std::fs::read_to_string(path)?;
    read_gmsh_str(&text)
}

pub fn read_gmsh_str(text: &str) -> Result<Mesh> {
    let mut lines = Lines {
        inner: text.lines().enumerate(),
        section: "header".into(),
        line: 0,
    };
    let mut version = None;
    let mut nodes: BTreeMap<u64, Vec3> = BTreeMap::new();
    let mut tets: Vec<(i64, Vec<u64>)> = Vec::new();

    while let Some((i, raw)) = lines.inner.next() {
        lines.line = i + 1;
        let l = raw.trim();
        if l.is_empty() {
            continue;
        }
        if !l.starts_with('$') {
            return Err(lines.err(format!("unexpected content '{l}' outside a section")));
        }
        let name = l[1..].to_string();
        lines.section = name.clone();
        match name.as_str() {
            "MeshFormat" => {
                let t: Vec<String> = lines.tokens()?;
                if t.len() < 3 {
                    return Err(lines.err("expected 'version file-type data-size'"));
                }
                version = Some(match t[0].as_str() {
                    "2.2" => Version::V2,
                    "4.1" => Version::V4,
                    v => return Err(lines.err(format!("unsupported MSH version {v}"))),
                });
                if t[1] != "0" {
                    return Err(lines.err("binary MSH files are not supported"));
                }
                lines.expect_end("MeshFormat")?;
            }
            "Nodes" => {
                let v = version.ok_or_else(|| lines.err("$Nodes before $MeshFormat"))?;
                read_nodes(&mut lines, v, &mut nodes)?;
                lines.expect_end("Nodes")?;
            }
            "Elements" => {
                let v = version.ok_or_else(|| lines.err("$Elements before $MeshFormat"))?;
                read_elements(&mut lines, v, &mut tets)?;
                lines.expect_end("Elements")?;
            }
            _ => {
                // skip unknown section
                let end = format!("$End{name}");
                loop {
                    if lines.next_line()? == end {
                        break;
                    }
                }
            }
        }
    }
    if version.is_none() {
        lines.section = "header".into();
        return Err(lines.err("missing $MeshFormat section"));
    }
    build_mesh(&nodes, &tets)
}

fn read_nodes(lines: &mut Lines, v: Version, nodes: &mut BTreeMap<u64, Vec3>) -> Result<()> {
    let mut insert = |lines: &Lines, tag: u64, xyz: &[f64]| -> Result<()> {
        if xyz.len() < 3 {
            return Err(lines.err("node needs three coordinates"));
        }
        if nodes.insert(tag, Vec3::new(xyz[0], xyz[1], xyz[2])).is_some() {
            return Err(lines.err(format!("duplicate node tag {tag}")));
        }
        Ok(())
    };
    match v {
        Version::V2 => {
            let n: Vec<usize> = lines.tokens()?;
            let n = *n.first().ok_or_else(|| lines.err("missing node count"))?;
            for _ in 0..n {
                let t: Vec<f64> = lines.tokens()?;
                if t.len() != 4 {
                    return Err(lines.err("expected 'tag x y z'"));
                }
                insert(lines, t[0] as u64, &t[1..])?;
            }
        }
        Version::V4 => {
            let head: Vec<usize> = lines.tokens()?;
            if head.len() != 4 {
                return Err(lines.err("expected 'numEntityBlocks numNodes minTag maxTag'"));
            }
            for _ in 0..head[0] {
                let b: Vec<usize> = lines.tokens()?;
                if b.len() != 4 {
                    return Err(lines.err("expected 'entityDim entityTag parametric numNodes'"));
                }
                let count = b[3];
                let mut tags = Vec::with_capacity(count);
                for _ in 0..count {
                    let t: Vec<u64> = lines.tokens()?;
                    if t.len() != 1 {
                        return Err(lines.err("expected a single node tag"));
                    }
                    tags.push(t[0]);
                }
                for tag in tags {
                    let xyz: Vec<f64> = lines.tokens()?;
                    insert(lines, tag, &xyz)?;
                }
            }
        }
    }
    Ok(())
}

fn element_nodes(lines: &Lines, ty: i64) -> Result<Option<usize>> {
    match ty {
        4 => Ok(Some(4)),
        11 => Ok(Some(10)),
        t if DECORATION_TYPES.contains(&t) => Ok(None),
        t => {
            let _ = lines;
            Err(Error::UnsupportedElementType(t))
        }
    }
}

fn read_elements(lines: &mut Lines, v: Version, tets: &mut Vec<(i64, Vec<u64>)>) -> Result<()> {
    match v {
        Version::V2 => {
            let n: Vec<usize> = lines.tokens()?;
            let n = *n.first().ok_or_else(|| lines.err("missing element count"))?;
            for _ in 0..n {
                let t: Vec<i64> = lines.tokens()?;
                if t.len() < 3 {
                    return Err(lines.err("truncated element line"));
                }
                let ty = t[1];
                let ntags = t[2] as usize;
                let Some(nn) = element_nodes(lines, ty)? else {
                    continue;
                };
                let start = 3 + ntags;
                if t.len() != start + nn {
                    return Err(lines.err(format!(
                        "element {} of type {ty} lists {} nodes, expected {nn}",
                        t[0],
                        t.len().saturating_sub(start)
                    )));
                }
                tets.push((ty, t[start..].iter().map(|&x| x as u64).collect()));
            }
        }
        Version::V4 => {
            let head: Vec<usize> = lines.tokens()?;
            if head.len() != 4 {
                return Err(lines.err("expected 'numEntityBlocks numElements minTag maxTag'"));
            }
            for _ in 0..head[0] {
                let b: Vec<i64> = lines.tokens()?;
                if b.len() != 4 {
                    return Err(lines.err("expected 'entityDim entityTag elementType numElements'"));
                }
                let ty = b[2];
                let nn = element_nodes(lines, ty)?;
                for _ in 0..b[3] {
                    let t: Vec<u64> = lines.tokens()?;
                    if let Some(nn) = nn {
                        if t.len() != nn + 1 {
                            return Err(lines.err(format!(
                                "element {} lists {} nodes, expected {nn}",
                                t.first().copied().unwrap_or(0),
                                t.len().saturating_sub(1)
                            )));
                        }
                        tets.push((ty, t[1..].to_vec()));
                    }
                }
            }
        }
    }
    Ok(())
}

fn build_mesh(nodes: &BTreeMap<u64, Vec3>, tets: &[(i64, Vec<u64>)]) -> Result<Mesh> {
    if tets.is_empty() {
        return Err(Error::InvalidMesh("file contains no tetrahedra".into()));
    }
    let ty = tets[0].0;
    if tets.iter().any(|t| t.0 != ty) {
        return Err(Error::InvalidMesh(
            "mixing 4-node and 10-node tetrahedra is not supported".into(),
        ));
    }
    let order = if ty == 4 { 1 } else { 2 };
    // compact to referenced nodes, keeping tag order
    let mut used: BTreeMap<u64, usize> = BTreeMap::new();
    for (_, conn) in tets {
        for tag in conn {
            if !nodes.contains_key(tag) {
                return Err(Error::InvalidMesh(format!("element references unknown node {tag}")));
            }
            used.insert(*tag, 0);
        }
    }
    let mut coords = Vec::with_capacity(used.len());
    for (i, (tag, slot)) in used.iter_mut().enumerate() {
        *slot = i;
        coords.push(nodes[tag]);
    }
    let mut cells = Vec::with_capacity(tets.len());
    for (_, conn) in tets {
        let g: Vec<usize> = conn.iter().map(|t| used[t]).collect();
        let mut cell = g[..4].to_vec();
        if order == 2 {
            cell.extend(GMSH_TET10_EDGE_NODES.iter().map(|&i| g[i]));
        }
        let [a, b, c, d] = [0, 1, 2, 3].map(|i| coords[cell[i]]);
        if (b - a).cross(&(c - a)).dot(&(d - a)) < 0.0 {
            // swap local vertices 1 and 2: edges (0,1)<->(0,2), (1,3)<->(2,3)
            cell.swap(1, 2);
            if order == 2 {
                cell.swap(4, 5);
                cell.swap(8, 9);
            }
        }
        cells.push(cell);
    }
    Mesh::new(order, coords, cells)
}

/// Serialize as ASCII MSH 2.2 (tetrahedra only).
pub fn write_gmsh_string(mesh: &Mesh) -> String {
    let mut s = String::new();
    s.push_str("$MeshFormat\n2.2 0 8\n$EndMeshFormat\n$Nodes\n");
    let _ = writeln!(s, "{}", mesh.num_nodes());
    for (i, p) in mesh.nodes().iter().enumerate() {
        let _ = writeln!(s, "{} {:?} {:?} {:?}", i + 1, p[0], p[1], p[2]);
    }
    s.push_str("$EndNodes\n$Elements\n");
    let _ = writeln!(s, "{}", mesh.num_cells());
    let ty = if mesh.order() == 1 { 4 } else { 11 };
    for c in 0..mesh.num_cells() {
        let cell = mesh.cell_nodes(c);
        let mut gm = cell[..4].to_vec();
        if mesh.order() == 2 {
            let mut extra = [0usize; 6];
            for (e, &g) in GMSH_TET10_EDGE_NODES.iter().enumerate() {
                extra[g - 4] = cell[4 + e];
            }
            gm.extend(extra);
        }
        let _ = write!(s, "{} {ty} 2 1 1", c + 1);
        for n in gm {
            let _ = write!(s, " {}", n + 1);
        }
        s.push('\n');
    }
    s.push_str("$EndElements\n");
    s
}

pub fn write_gmsh(mesh: &Mesh, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, write_gmsh_string(mesh))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reference::ReferenceTet;

    const ONE_TET4: &str = "$MeshFormat\n2.2 0 8\n$EndMeshFormat\n$Nodes\n4\n1 0 0 0\n2 1 0 0\n3 0 1 0\n4 0 0 1\n$EndNodes\n$Elements\n1\n1 4 2 1 1 1 2 3 4\n$EndElements\n";

    fn tet10_text(version: &str) -> String {
        // straight tet10 with mid-edge nodes at Gmsh positions
        let v = (0..4).map(ReferenceTet::vertex).collect::<Vec<_>>();
        let gm_edges = [(0, 1), (1, 2), (0, 2), (0, 3), (2, 3), (1, 3)];
        let mut pts = v.clone();
        for (a, b) in gm_edges {
            pts.push((v[a] + v[b]) * 0.5);
        }
        let mut s = format!("$MeshFormat\n{version} 0 8\n$EndMeshFormat\n");
        if version == "2.2" {
            s.push_str("$Nodes\n10\n");
            for (i, p) in pts.iter().enumerate() {
                s.push_str(&format!("{} {} {} {}\n", i + 1, p[0], p[1], p[2]));
            }
            s.push_str("$EndNodes\n$Elements\n2\n1 2 2 0 1 1 2 3\n2 11 2 0 1 1 2 3 4 5 6 7 8 9 10\n$EndElements\n");
        } else {
            s.push_str("$Entities\n0 0 0 1\n1 0 0 0 1 1 1 0 0\n$EndEntities\n");
            s.push_str("$Nodes\n1 10 1 10\n3 1 0 10\n");
            for i in 0..10 {
                s.push_str(&format!("{}\n", i + 1));
            }
            for p in &pts {
                s.push_str(&format!("{} {} {}\n", p[0], p[1], p[2]));
            }
            s.push_str("$EndNodes\n$Elements\n2 2 1 2\n2 1 2 1\n1 1 2 3\n3 1 11 1\n2 1 2 3 4 5 6 7 8 9 10\n$EndElements\n");
        }
        s
    }

    #[test]
    fn single_tet4() {
        let m = read_gmsh_str(ONE_TET4).unwrap();
        assert_eq!(m.num_cells(), 1);
        assert_eq!(m.num_nodes(), 4);
        assert_eq!(m.order(), 1);
    }

    #[test]
    fn straight_tet10_matches_tet4_in_both_versions() {
        let m4 = read_gmsh_str(ONE_TET4).unwrap();
        for v in ["2.2", "4.1"] {
            let m10 = read_gmsh_str(&tet10_text(v)).unwrap();
            assert_eq!(m10.order(), 2);
            let a = m4.element_map(0).unwrap();
            let b = m10.element_map(0).unwrap();
            // mid-edge nodes land at true midpoints only if the permutation is right
            assert!(b.is_affine(), "version {v}");
            for x in [Vec3::new(0.1, 0.2, 0.3), Vec3::new(0.5, 0.0, 0.25)] {
                assert!((a.point(&x) - b.point(&x)).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn hexahedron_rejected() {
        let text = ONE_TET4.replace("1 4 2 1 1 1 2 3 4", "1 5 2 1 1 1 2 3 4 1 2 3 4");
        match read_gmsh_str(&text) {
            Err(e @ Error::UnsupportedElementType(5)) => {
                assert!(e.to_string().contains("unsupported element type"))
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn malformed_section_has_context() {
        let text = ONE_TET4.replace("2 1 0 0", "2 1 zero 0");
        match read_gmsh_str(&text) {
            Err(Error::Parse { section, line, .. }) => {
                assert_eq!(section, "Nodes");
                assert_eq!(line, 7);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(read_gmsh_str(&ONE_TET4.replace("2.2 0 8", "3.0 0 8")).is_err());
        assert!(read_gmsh_str(&ONE_TET4.replace("2.2 0 8", "2.2 1 8")).is_err());
    }

    #[test]
    fn negative_orientation_is_repaired() {
        let text = ONE_TET4.replace("1 1 2 3 4\n", "1 1 3 2 4\n");
        let m = read_gmsh_str(&text).unwrap();
        assert!(m.skeleton_volume(0) > 0.0);
    }

    #[test]
    fn round_trip_curved_ball() {
        let m = crate::mesh::generate_ball_mesh(1, 2).unwrap();
        let again = read_gmsh_str(&write_gmsh_string(&m)).unwrap();
        assert_eq!(m, again);
    }
}
