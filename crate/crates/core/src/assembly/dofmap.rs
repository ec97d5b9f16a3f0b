use crate::mesh::Mesh;
use crate::reference::ReferenceTet;
use crate::{Error, Result};

/// Global numbering of Nedelec degrees of freedom.
///
/// Numbering is entity-major: the `k` DOFs of every edge in edge order, then
/// (for k = 2) the two DOFs of every face in face order. Global edge moments
/// run from the lower to the higher global vertex; global face moments use
/// the tangents `B - A`, `C - A` of the face vertices sorted by global index.
///
/// Local DOFs `l` of a cell relate to the global DOFs `g` of its entities
/// through `l = T g`, where `T` is block diagonal with
/// * a sign for each k = 1 edge;
/// * `[[0, -1], [-1, 0]]` for a reversed k = 2 edge (the two moments swap);
/// * an integer 2x2 matrix with determinant ±1 for each k = 2 face.
#[derive(Clone, Debug)]
pub struct DofMap {
    degree: usize,
    local_dim: usize,
    ndofs: usize,
    num_edge_dofs: usize,
    slots: Vec<usize>,
    orient: Vec<CellOrientation>,
    boundary: Vec<bool>,
}

/// Orientation of the entities of one cell relative to their global
/// orientation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CellOrientation {
    /// Local edge runs against the global edge direction.
    pub edge_reversed: [bool; 6],
    /// Row-major `P` with local face tangents `t_j = sum_i P[j][i] T_i`.
    pub face_transform: [[i8; 4]; 4],
}

/// Position of global rank `r` in the global face frame.
const FRAME: [[i8; 2]; 3] = [[0, 0], [1, 0], [0, 1]];

fn face_transform(globals: [usize; 3]) -> [i8; 4] {
    let rank = |i: usize| globals.iter().filter(|&&g| g < globals[i]).count();
    let c0 = FRAME[rank(0)];
    let c1 = FRAME[rank(1)];
    let c2 = FRAME[rank(2)];
    [c1[0] - c0[0], c1[1] - c0[1], c2[0] - c0[0], c2[1] - c0[1]]
}

/// Inverse of an integer 2x2 matrix with determinant ±1.
fn invert_unimodular(p: [i8; 4]) -> [i8; 4] {
    let det = p[0] * p[3] - p[1] * p[2];
    debug_assert!(det == 1 || det == -1);
    [p[3] * det, -p[1] * det, -p[2] * det, p[0] * det]
}

impl CellOrientation {
    fn of(vertices: [usize; 4]) -> Self {
        let edge_reversed = ReferenceTet::EDGES.map(|[a, b]| vertices[a] > vertices[b]);
        let face_transform = ReferenceTet::FACES.map(|f| face_transform(f.map(|v| vertices[v])));
        CellOrientation {
            edge_reversed,
            face_transform,
        }
    }
}

impl DofMap {
    pub fn new(mesh: &Mesh, degree: usize) -> Result<Self> {
        if !(1..=2).contains(&degree) {
            return Err(Error::UnsupportedDegree(degree));
        }
        let per_face = if degree == 2 { 2 } else { 0 };
        let local_dim = 6 * degree + 4 * per_face;
        let num_edge_dofs = degree * mesh.num_edges();
        let ndofs = num_edge_dofs + per_face * mesh.num_faces();
        let mut slots = Vec::with_capacity(local_dim * mesh.num_cells());
        let mut orient = Vec::with_capacity(mesh.num_cells());
        for c in 0..mesh.num_cells() {
            for &e in mesh.cell_edges(c) {
                for j in 0..degree {
                    slots.push(degree * e + j);
                }
            }
            for &f in mesh.cell_faces(c).iter().take(if per_face > 0 { 4 } else { 0 }) {
                for j in 0..per_face {
                    slots.push(num_edge_dofs + per_face * f + j);
                }
            }
            orient.push(CellOrientation::of(mesh.cell_vertices(c)));
        }
        let mut boundary = vec![false; ndofs];
        for e in 0..mesh.num_edges() {
            if mesh.is_boundary_edge(e) {
                for j in 0..degree {
                    boundary[degree * e + j] = true;
                }
            }
        }
        for f in 0..mesh.num_faces() {
            if mesh.is_boundary_face(f) {
                for j in 0..per_face {
                    boundary[num_edge_dofs + per_face * f + j] = true;
                }
            }
        }
        Ok(DofMap {
            degree,
            local_dim,
            ndofs,
            num_edge_dofs,
            slots,
            orient,
            boundary,
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn ndofs(&self) -> usize {
        self.ndofs
    }

    pub fn local_dim(&self) -> usize {
        self.local_dim
    }

    pub fn num_cells(&self) -> usize {
        self.orient.len()
    }

    /// Global DOF of each local slot of cell `c`.
    pub fn cell_dofs(&self, c: usize) -> &[usize] {
        &self.slots[c * self.local_dim..(c + 1) * self.local_dim]
    }

    pub fn orientation(&self, c: usize) -> &CellOrientation {
        &self.orient[c]
    }

    /// `±1` per local edge DOF of a k = 1 cell.
    pub fn signs(&self, c: usize) -> [f64; 6] {
        self.orient[c]
            .edge_reversed
            .map(|r| if r { -1.0 } else { 1.0 })
    }

    pub fn is_boundary(&self, dof: usize) -> bool {
        self.boundary[dof]
    }

    pub fn boundary(&self) -> &[bool] {
        &self.boundary
    }

    pub fn num_boundary(&self) -> usize {
        self.boundary.iter().filter(|b| **b).count()
    }

    /// True when `dof` belongs to an edge.
    pub fn is_edge_dof(&self, dof: usize) -> bool {
        dof < self.num_edge_dofs
    }

    /// Nonzero entries `(local, slot, value)` of the cell transform `T`.
    pub fn transform(&self, c: usize) -> Vec<(usize, usize, f64)> {
        let o = &self.orient[c];
        let mut out = Vec::with_capacity(2 * self.local_dim);
        for (e, &rev) in o.edge_reversed.iter().enumerate() {
            match (self.degree, rev) {
                (1, r) => out.push((e, e, if r { -1.0 } else { 1.0 })),
                (_, false) => {
                    out.push((2 * e, 2 * e, 1.0));
                    out.push((2 * e + 1, 2 * e + 1, 1.0));
                }
                (_, true) => {
                    out.push((2 * e, 2 * e + 1, -1.0));
                    out.push((2 * e + 1, 2 * e, -1.0));
                }
            }
        }
        if self.degree == 2 {
            for (f, p) in o.face_transform.iter().enumerate() {
                let base = 12 + 2 * f;
                for j in 0..2 {
                    for i in 0..2 {
                        let v = p[2 * j + i];
                        if v != 0 {
                            out.push((base + j, base + i, v as f64));
                        }
                    }
                }
            }
        }
        out
    }

    /// Local coefficients `T g` of cell `c` from a global vector.
    pub fn to_local<T>(&self, c: usize, global: &[T]) -> Vec<T>
    where
        T: Copy + Default + std::ops::AddAssign + std::ops::Mul<f64, Output = T>,
    {
        let slots = self.cell_dofs(c);
        let mut out = vec![T::default(); self.local_dim];
        for (j, m, v) in self.transform(c) {
            out[j] += global[slots[m]] * v;
        }
        out
    }

    /// `T^T b` for a local vector `b`, indexed by slot.
    pub fn vector_to_slots<T>(&self, c: usize, local: &[T]) -> Vec<T>
    where
        T: Copy + Default + std::ops::AddAssign + std::ops::Mul<f64, Output = T>,
    {
        let mut out = vec![T::default(); self.local_dim];
        for (j, m, v) in self.transform(c) {
            out[m] += local[j] * v;
        }
        out
    }

    /// `T^T A T` for a row-major local matrix, indexed by slot.
    pub fn matrix_to_slots<T>(&self, c: usize, local: &[T]) -> Vec<T>
    where
        T: Copy + Default + std::ops::AddAssign + std::ops::Mul<f64, Output = T>,
    {
        let n = self.local_dim;
        let t = self.transform(c);
        let mut half = vec![T::default(); n * n];
        // half = A T
        for row in 0..n {
            for &(j, m, v) in &t {
                half[row * n + m] += local[row * n + j] * v;
            }
        }
        let mut out = vec![T::default(); n * n];
        for &(j, m, v) in &t {
            for col in 0..n {
                out[m * n + col] += half[j * n + col] * v;
            }
        }
        out
    }

    /// Global DOFs of the entity block starting at local DOF `j`, solved
    /// from the local values of that block: `g = T_block^{-1} l`.
    pub(crate) fn block_to_global<T>(&self, c: usize, first: usize, l: &[T]) -> Vec<(usize, T)>
    where
        T: Copy + Default + std::ops::AddAssign + std::ops::Mul<f64, Output = T> + std::ops::Neg<Output = T>,
    {
        let o = &self.orient[c];
        let slots = self.cell_dofs(c);
        if first < 6 * self.degree {
            let e = first / self.degree;
            if self.degree == 1 {
                let s = if o.edge_reversed[e] { -1.0 } else { 1.0 };
                return vec![(slots[first], l[0] * s)];
            }
            if o.edge_reversed[e] {
                return vec![(slots[first], -l[1]), (slots[first + 1], -l[0])];
            }
            return vec![(slots[first], l[0]), (slots[first + 1], l[1])];
        }
        let f = (first - 12) / 2;
        let q = invert_unimodular(o.face_transform[f]);
        (0..2)
            .map(|i| {
                let mut acc = T::default();
                for j in 0..2 {
                    acc += l[j] * q[2 * i + j] as f64;
                }
                (slots[first + i], acc)
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Vec3;

    fn tet(cells: Vec<Vec<usize>>, nodes: Vec<Vec3>) -> Mesh {
        Mesh::new(1, nodes, cells).unwrap()
    }

    fn unit_nodes() -> Vec<Vec3> {
        (0..4).map(ReferenceTet::vertex).collect()
    }

    #[test]
    fn single_tet_counts() {
        let mesh = tet(vec![vec![0, 1, 2, 3]], unit_nodes());
        let d1 = DofMap::new(&mesh, 1).unwrap();
        assert_eq!(d1.ndofs(), 6);
        assert_eq!(d1.num_boundary(), 6);
        let d2 = DofMap::new(&mesh, 2).unwrap();
        assert_eq!(d2.ndofs(), 20);
        assert!(matches!(DofMap::new(&mesh, 3), Err(Error::UnsupportedDegree(3))));
    }

    #[test]
    fn two_tets_share_nine_edges() {
        let mut nodes = unit_nodes();
        nodes.push(Vec3::new(1.0, 1.0, 1.0));
        let mesh = tet(vec![vec![0, 1, 2, 3], vec![4, 2, 1, 3]], nodes);
        let d = DofMap::new(&mesh, 1).unwrap();
        assert_eq!(d.ndofs(), 9);
        let mut refs = vec![0; 9];
        for c in 0..2 {
            for &g in d.cell_dofs(c) {
                refs[g] += 1;
            }
        }
        assert!(refs.iter().all(|&r| r >= 1));
        assert_eq!(refs.iter().filter(|&&r| r == 2).count(), 3);
    }

    #[test]
    fn face_transforms_are_unimodular_and_identity_when_sorted() {
        assert_eq!(face_transform([3, 7, 9]), [1, 0, 0, 1]);
        for g in [[5, 1, 3], [2, 9, 4], [8, 6, 1], [1, 3, 2]] {
            let p = face_transform(g);
            let q = invert_unimodular(p);
            let prod = [
                p[0] * q[0] + p[1] * q[2],
                p[0] * q[1] + p[1] * q[3],
                p[2] * q[0] + p[3] * q[2],
                p[2] * q[1] + p[3] * q[3],
            ];
            assert_eq!(prod, [1, 0, 0, 1]);
        }
        // Face (a, b, c) with global order b < c < a: a sits at C, b at A, c at B.
        // t1 = b - a = A - C = -T2, t2 = c - a = B - C = T1 - T2.
        assert_eq!(face_transform([9, 2, 5]), [0, -1, 1, -1]);
    }

    #[test]
    fn slot_transforms_round_trip() {
        let nodes = unit_nodes();
        let mesh = tet(vec![vec![3, 1, 0, 2]], nodes);
        let d = DofMap::new(&mesh, 2).unwrap();
        let g: Vec<f64> = (0..20).map(|i| i as f64 + 0.5).collect();
        let l = d.to_local(0, &g);
        let mut back = vec![0.0; 20];
        for first in (0..20).step_by(2) {
            for (dof, v) in d.block_to_global(0, first, &l[first..first + 2]) {
                back[dof] = v;
            }
        }
        assert_eq!(back, g);
    }
}
