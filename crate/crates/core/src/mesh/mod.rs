//! Tetrahedral meshes with straight (order 1) or quadratic (order 2) cells.
//!
//! Cells store 4 vertex nodes followed, for order 2, by 6 mid-edge nodes in
//! reference edge order. Edges and faces are numbered by sorting their
//! ascending vertex tuples, so the numbering depends only on the cell list.

mod ball;
mod cube;
pub mod gmsh;
mod map;
mod quality;

pub use ball::{generate_ball_mesh, MAX_BALL_LEVEL};
pub use cube::{generate_cube_mesh, MAX_CUBE_LEVEL};
pub use gmsh::{read_gmsh, read_gmsh_str, write_gmsh, write_gmsh_string};
pub use map::{adjugate, GeometricMap, MapPoint};
pub use quality::{quality_check, MeshQualityReport};
pub(crate) use quality::spectral_norm;

use crate::reference::{quadrature, ReferenceTet};
use crate::{Error, Result, Vec3};

/// Marker for a missing neighbour in [`Mesh::face_cells`].
pub const NO_CELL: usize = usize::MAX;

#[derive(Clone, Debug, PartialEq)]
pub struct Mesh {
    order: usize,
    nodes: Vec<Vec3>,
    cells: Vec<[usize; 10]>,
    edges: Vec<[usize; 2]>,
    faces: Vec<[usize; 3]>,
    cell_edges: Vec<[usize; 6]>,
    cell_faces: Vec<[usize; 4]>,
    face_cells: Vec<[usize; 2]>,
    boundary_face: Vec<bool>,
    boundary_edge: Vec<bool>,
    boundary_node: Vec<bool>,
    h: f64,
}

fn sorted2(a: usize, b: usize) -> [usize; 2] {
    if a < b {
        [a, b]
    } else {
        [b, a]
    }
}

fn sorted3(mut t: [usize; 3]) -> [usize; 3] {
    t.sort_unstable();
    t
}

impl Mesh {
    /// Build a mesh from node coordinates and per-cell node lists (4 nodes for
    /// order 1, 10 for order 2). Topology is derived; orientation is not changed.
    pub fn new(order: usize, nodes: Vec<Vec3>, cells: Vec<Vec<usize>>) -> Result<Mesh> {
        let per_cell = match order {
            1 => 4,
            2 => 10,
            _ => return Err(Error::UnsupportedOrder(order)),
        };
        if cells.is_empty() {
            return Err(Error::InvalidMesh("mesh has no cells".into()));
        }
        let mut packed = Vec::with_capacity(cells.len());
        for (c, cell) in cells.iter().enumerate() {
            if cell.len() != per_cell {
                return Err(Error::InvalidMesh(format!(
                    "cell {c} has {} nodes, expected {per_cell}",
                    cell.len()
                )));
            }
            if let Some(&bad) = cell.iter().find(|&&n| n >= nodes.len()) {
                return Err(Error::InvalidMesh(format!(
                    "cell {c} references missing node {bad}"
                )));
            }
            let mut v = [cell[0], cell[1], cell[2], cell[3]];
            v.sort_unstable();
            if v.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidMesh(format!("cell {c} repeats a vertex")));
            }
            let mut arr = [usize::MAX; 10];
            arr[..per_cell].copy_from_slice(cell);
            packed.push(arr);
        }
        check_duplicate_nodes(&nodes)?;

        let mut edges: Vec<[usize; 2]> = Vec::with_capacity(packed.len() * 2);
        let mut faces: Vec<[usize; 3]> = Vec::with_capacity(packed.len() * 2);
        for cell in &packed {
            for [a, b] in ReferenceTet::EDGES {
                edges.push(sorted2(cell[a], cell[b]));
            }
            for f in ReferenceTet::FACES {
                faces.push(sorted3(f.map(|i| cell[i])));
            }
        }
        edges.sort_unstable();
        edges.dedup();
        faces.sort_unstable();
        faces.dedup();

        let mut cell_edges = Vec::with_capacity(packed.len());
        let mut cell_faces = Vec::with_capacity(packed.len());
        let mut face_cells = vec![[NO_CELL; 2]; faces.len()];
        for (c, cell) in packed.iter().enumerate() {
            let ce = ReferenceTet::EDGES
                .map(|[a, b]| edges.binary_search(&sorted2(cell[a], cell[b])).unwrap());
            let cf = ReferenceTet::FACES.map(|f| faces.binary_search(&sorted3(f.map(|i| cell[i]))).unwrap());
            for &f in &cf {
                let slot = &mut face_cells[f];
                if slot[0] == NO_CELL {
                    slot[0] = c;
                } else if slot[1] == NO_CELL {
                    slot[1] = c;
                } else {
                    return Err(Error::InvalidMesh(format!(
                        "face {:?} is shared by more than two cells",
                        faces[f]
                    )));
                }
            }
            cell_edges.push(ce);
            cell_faces.push(cf);
        }

        let boundary_face: Vec<bool> = face_cells.iter().map(|fc| fc[1] == NO_CELL).collect();
        let mut boundary_edge = vec![false; edges.len()];
        let mut boundary_node = vec![false; nodes.len()];
        for (c, cell) in packed.iter().enumerate() {
            for (lf, &f) in cell_faces[c].iter().enumerate() {
                if !boundary_face[f] {
                    continue;
                }
                let fv = ReferenceTet::FACES[lf];
                for &v in &fv {
                    boundary_node[cell[v]] = true;
                }
                for (le, [a, b]) in ReferenceTet::EDGES.iter().enumerate() {
                    if fv.contains(a) && fv.contains(b) {
                        boundary_edge[cell_edges[c][le]] = true;
                        if order == 2 {
                            boundary_node[cell[4 + le]] = true;
                        }
                    }
                }
            }
        }

        let h = packed
            .iter()
            .map(|cell| {
                ReferenceTet::EDGES
                    .iter()
                    .map(|[a, b]| (nodes[cell[*a]] - nodes[cell[*b]]).norm())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);

        Ok(Mesh {
            order,
            nodes,
            cells: packed,
            edges,
            faces,
            cell_edges,
            cell_faces,
            face_cells,
            boundary_face,
            boundary_edge,
            boundary_node,
            h,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn num_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn num_faces(&self) -> usize {
        self.faces.len()
    }

    pub fn nodes(&self) -> &[Vec3] {
        &self.nodes
    }

    pub fn node(&self, i: usize) -> Vec3 {
        self.nodes[i]
    }

    /// Node indices of a cell (4 or 10 entries).
    pub fn cell_nodes(&self, c: usize) -> &[usize] {
        let n = if self.order == 1 { 4 } else { 10 };
        &self.cells[c][..n]
    }

    pub fn cell_vertices(&self, c: usize) -> [usize; 4] {
        let cell = &self.cells[c];
        [cell[0], cell[1], cell[2], cell[3]]
    }

    /// Edges as ascending vertex node pairs.
    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }

    /// Faces as ascending vertex node triples.
    pub fn faces(&self) -> &[[usize; 3]] {
        &self.faces
    }

    pub fn cell_edges(&self, c: usize) -> &[usize; 6] {
        &self.cell_edges[c]
    }

    pub fn cell_faces(&self, c: usize) -> &[usize; 4] {
        &self.cell_faces[c]
    }

    /// The one or two cells adjacent to a face; the second is [`NO_CELL`] on the boundary.
    pub fn face_cells(&self, f: usize) -> [usize; 2] {
        self.face_cells[f]
    }

    pub fn is_boundary_face(&self, f: usize) -> bool {
        self.boundary_face[f]
    }

    pub fn is_boundary_edge(&self, e: usize) -> bool {
        self.boundary_edge[e]
    }

    pub fn is_boundary_node(&self, n: usize) -> bool {
        self.boundary_node[n]
    }

    pub fn boundary_faces(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.faces.len()).filter(|&f| self.boundary_face[f])
    }

    /// Maximum cell diameter, measured on the straight vertex skeleton.
    pub fn h(&self) -> f64 {
        self.h
    }

    /// Local face index of global face `f` within cell `c`.
    pub fn local_face(&self, c: usize, f: usize) -> Option<usize> {
        self.cell_faces[c].iter().position(|&g| g == f)
    }

    pub fn element_map(&self, c: usize) -> Result<GeometricMap> {
        if c >= self.cells.len() {
            return Err(Error::InvalidInput(format!(
                "cell index {c} out of range ({} cells)",
                self.cells.len()
            )));
        }
        Ok(self.map_unchecked(c))
    }

    pub(crate) fn map_unchecked(&self, c: usize) -> GeometricMap {
        let mut pts = [Vec3::zeros(); 10];
        for (p, &n) in pts.iter_mut().zip(self.cell_nodes(c)) {
            *p = self.nodes[n];
        }
        GeometricMap::new(c, self.order, pts)
    }

    /// Signed volume of the straight tetrahedron spanned by the cell vertices.
    pub fn skeleton_volume(&self, c: usize) -> f64 {
        let [a, b, cc, d] = self.cell_vertices(c).map(|i| self.nodes[i]);
        (b - a).cross(&(cc - a)).dot(&(d - a)) / 6.0
    }

    /// Fail with the first cell whose Jacobian determinant is not positive at
    /// the nodes or at the points of a degree-5 rule.
    pub fn check_positive_jacobians(&self) -> Result<()> {
        let rule = quadrature(5)?;
        let shapes = crate::reference::geometric_shapes(self.order)?;
        let mut samples: Vec<Vec3> = (0..rule.len()).map(|i| rule.point(i)).collect();
        samples.extend((0..shapes.num_nodes()).map(|i| shapes.node(i)));
        for c in 0..self.num_cells() {
            let map = self.map_unchecked(c);
            for x in &samples {
                let det = map.jacobian(x).determinant();
                if !(det > 0.0) {
                    return Err(Error::NonPositiveJacobian { cell: c, det });
                }
            }
        }
        Ok(())
    }

    /// Number of edges not lying on the boundary.
    pub fn num_interior_edges(&self) -> usize {
        self.boundary_edge.iter().filter(|b| !**b).count()
    }
}

fn check_duplicate_nodes(nodes: &[Vec3]) -> Result<()> {
    let mut keys: Vec<([u64; 3], usize)> = nodes
        .iter()
        .enumerate()
        .map(|(i, p)| ([p[0].to_bits(), p[1].to_bits(), p[2].to_bits()], i))
        .collect();
    keys.sort_unstable();
    for w in keys.windows(2) {
        if w[0].0 == w[1].0 {
            return Err(Error::InvalidMesh(format!(
                "nodes {} and {} coincide",
                w[0].1, w[1].1
            )));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn reference_cell_mesh() -> Mesh {
        let nodes = (0..4).map(ReferenceTet::vertex).collect();
        Mesh::new(1, nodes, vec![vec![0, 1, 2, 3]]).unwrap()
    }

    #[test]
    fn single_cell_topology() {
        let m = reference_cell_mesh();
        assert_eq!(m.num_edges(), 6);
        assert_eq!(m.num_faces(), 4);
        assert!((0..4).all(|f| m.is_boundary_face(f)));
        assert!((m.h() - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn two_cells_share_a_face() {
        let mut nodes: Vec<Vec3> = (0..4).map(ReferenceTet::vertex).collect();
        nodes.push(Vec3::new(1.0, 1.0, 1.0));
        let m = Mesh::new(1, nodes, vec![vec![0, 1, 2, 3], vec![1, 2, 3, 4]]).unwrap();
        assert_eq!(m.num_edges(), 9);
        assert_eq!(m.num_faces(), 7);
        assert_eq!(m.boundary_faces().count(), 6);
    }

    #[test]
    fn rejects_degenerate_input() {
        assert!(Mesh::new(1, vec![], vec![]).is_err());
        let nodes = vec![Vec3::zeros(), Vec3::zeros(), Vec3::x(), Vec3::y()];
        assert!(matches!(
            Mesh::new(1, nodes, vec![vec![0, 1, 2, 3]]),
            Err(Error::InvalidMesh(_))
        ));
        let nodes = (0..4).map(ReferenceTet::vertex).collect();
        assert!(Mesh::new(1, nodes, vec![vec![0, 1, 2, 4]]).is_err());
    }

    #[test]
    fn three_cells_on_one_face_rejected() {
        let mut nodes: Vec<Vec3> = (0..4).map(ReferenceTet::vertex).collect();
        nodes.push(Vec3::new(1.0, 1.0, 1.0));
        nodes.push(Vec3::new(2.0, 1.0, 1.0));
        let r = Mesh::new(
            1,
            nodes,
            vec![vec![0, 1, 2, 3], vec![1, 2, 3, 4], vec![1, 2, 3, 5]],
        );
        assert!(matches!(r, Err(Error::InvalidMesh(_))));
    }
}
