//! Exact meshes of the unit cube: `2^level` sub-cubes per direction, each
//! split into the six Kuhn tetrahedra sharing its main diagonal.

use super::Mesh;
use crate::{Error, Result, Vec3};

pub const MAX_CUBE_LEVEL: usize = 5;

pub fn generate_cube_mesh(level: usize, order: usize) -> Result<Mesh> {
    if order != 1 {
        return Err(Error::UnsupportedOrder(order));
    }
    if level > MAX_CUBE_LEVEL {
        return Err(Error::InvalidInput(format!(
            "cube level {level} exceeds the supported maximum {MAX_CUBE_LEVEL}"
        )));
    }
    let n = 1usize << level;
    let idx = |i: usize, j: usize, k: usize| (k * (n + 1) + j) * (n + 1) + i;
    let mut nodes = Vec::with_capacity((n + 1).pow(3));
    for k in 0..=n {
        for j in 0..=n {
            for i in 0..=n {
                nodes.push(Vec3::new(i as f64, j as f64, k as f64) / n as f64);
            }
        }
    }
    const PERMS: [[usize; 3]; 6] = [
        [0, 1, 2],
        [0, 2, 1],
        [1, 0, 2],
        [1, 2, 0],
        [2, 0, 1],
        [2, 1, 0],
    ];
    let mut cells = Vec::with_capacity(6 * n * n * n);
    for k in 0..n {
        for j in 0..n {
            for i in 0..n {
                for perm in PERMS {
                    let mut c = [i, j, k];
                    let mut tet = vec![idx(c[0], c[1], c[2])];
                    for axis in perm {
                        c[axis] += 1;
                        tet.push(idx(c[0], c[1], c[2]));
                    }
                    let [a, b, cc, d] = [0, 1, 2, 3].map(|t| nodes[tet[t]]);
                    if (b - a).cross(&(cc - a)).dot(&(d - a)) < 0.0 {
                        tet.swap(1, 2);
                    }
                    cells.push(tet);
                }
            }
        }
    }
    Mesh::new(1, nodes, cells)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn level_zero() {
        let m = generate_cube_mesh(0, 1).unwrap();
        assert_eq!(m.num_cells(), 6);
        assert_eq!(m.num_nodes(), 8);
    }

    #[test]
    fn volumes_cover_the_cube() {
        for level in 0..3 {
            let m = generate_cube_mesh(level, 1).unwrap();
            let vol: f64 = (0..m.num_cells()).map(|c| m.skeleton_volume(c)).sum();
            assert!((vol - 1.0).abs() < 1e-12);
            assert!((0..m.num_cells()).all(|c| m.skeleton_volume(c) > 0.0));
        }
    }

    #[test]
    fn boundary_faces_lie_on_cube_faces() {
        let m = generate_cube_mesh(2, 1).unwrap();
        for f in m.boundary_faces() {
            let p = m.faces()[f].map(|v| m.node(v));
            let on_plane = (0..3).any(|d| {
                [0.0, 1.0]
                    .iter()
                    .any(|&s| p.iter().all(|q| (q[d] - s).abs() < 1e-14))
            });
            assert!(on_plane);
        }
    }

    #[test]
    fn only_order_one() {
        assert!(generate_cube_mesh(1, 2).is_err());
        assert!(generate_cube_mesh(6, 1).is_err());
    }
}
