//! Unit-ball meshes by uniform refinement of an icosahedral seed.
//!
//! The seed consists of 20 tetrahedra joining the origin to the faces of an
//! icosahedron inscribed in the unit sphere. Each refinement splits every
//! cell into eight (shortest interior diagonal for the inner octahedron) and
//! radially projects new boundary vertices onto the sphere. For order 2 the
//! mid-edge nodes of boundary edges are projected as well; interior mid-edge
//! nodes stay at the straight midpoints.

use super::Mesh;
use crate::reference::ReferenceTet;
use crate::{Error, Result, Vec3};
use std::collections::HashMap;

/// Finest level accepted by [`generate_ball_mesh`].
pub const MAX_BALL_LEVEL: usize = 5;

fn icosahedron() -> (Vec<Vec3>, Vec<[usize; 3]>) {
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let mut v = Vec::new();
    for &a in &[-1.0, 1.0] {
        for &b in &[-phi, phi] {
            v.push(Vec3::new(0.0, a, b));
            v.push(Vec3::new(a, b, 0.0));
            v.push(Vec3::new(b, 0.0, a));
        }
    }
    let v: Vec<Vec3> = v.into_iter().map(|p| p.normalize()).collect();
    let mut min_edge = f64::INFINITY;
    for i in 0..12 {
        for j in i + 1..12 {
            min_edge = min_edge.min((v[i] - v[j]).norm());
        }
    }
    let close = |i: usize, j: usize| (v[i] - v[j]).norm() < min_edge * 1.0001;
    let mut faces = Vec::new();
    for i in 0..12 {
        for j in i + 1..12 {
            for k in j + 1..12 {
                if close(i, j) && close(j, k) && close(i, k) {
                    faces.push([i, j, k]);
                }
            }
        }
    }
    debug_assert_eq!(faces.len(), 20);
    (v, faces)
}

fn signed_volume(p: &[Vec3], t: &[usize; 4]) -> f64 {
    let [a, b, c, d] = t.map(|i| p[i]);
    (b - a).cross(&(c - a)).dot(&(d - a))
}

fn orient(p: &[Vec3], mut t: [usize; 4]) -> [usize; 4] {
    if signed_volume(p, &t) < 0.0 {
        t.swap(1, 2);
    }
    t
}

fn sorted3(mut t: [usize; 3]) -> [usize; 3] {
    t.sort_unstable();
    t
}

/// Boundary faces (faces with a single incident tet) as sorted triples.
fn boundary_faces(tets: &[[usize; 4]]) -> Vec<[usize; 3]> {
    let mut faces: Vec<[usize; 3]> = tets
        .iter()
        .flat_map(|t| ReferenceTet::FACES.map(|f| sorted3(f.map(|i| t[i]))))
        .collect();
    faces.sort_unstable();
    let mut out = Vec::new();
    let mut i = 0;
    while i < faces.len() {
        let mut j = i + 1;
        while j < faces.len() && faces[j] == faces[i] {
            j += 1;
        }
        if j - i == 1 {
            out.push(faces[i]);
        }
        i = j;
    }
    out
}

fn refine(points: &mut Vec<Vec3>, tets: &[[usize; 4]]) -> Vec<[usize; 4]> {
    let mut boundary_edges = std::collections::HashSet::new();
    for f in boundary_faces(tets) {
        boundary_edges.insert((f[0], f[1]));
        boundary_edges.insert((f[0], f[2]));
        boundary_edges.insert((f[1], f[2]));
    }
    let mut mids: HashMap<(usize, usize), usize> = HashMap::new();
    let mut out = Vec::with_capacity(tets.len() * 8);
    for t in tets {
        let mut m = [0usize; 6];
        for (e, [a, b]) in ReferenceTet::EDGES.iter().enumerate() {
            let key = if t[*a] < t[*b] { (t[*a], t[*b]) } else { (t[*b], t[*a]) };
            m[e] = *mids.entry(key).or_insert_with(|| {
                let mut p = (points[key.0] + points[key.1]) * 0.5;
                if boundary_edges.contains(&key) {
                    p = p.normalize();
                }
                points.push(p);
                points.len() - 1
            });
        }
        // m: 01 02 03 12 13 23
        let [v0, v1, v2, v3] = *t;
        let [m01, m02, m03, m12, m13, m23] = m;
        for c in [
            [v0, m01, m02, m03],
            [m01, v1, m12, m13],
            [m02, m12, v2, m23],
            [m03, m13, m23, v3],
        ] {
            out.push(orient(points, c));
        }
        // inner octahedron: opposite pairs (01,23) (02,13) (03,12)
        let pairs = [(m01, m23), (m02, m13), (m03, m12)];
        let d = pairs
            .iter()
            .enumerate()
            .map(|(i, (a, b))| (i, (points[*a] - points[*b]).norm()))
            .fold((0, f64::INFINITY), |best, cur| if cur.1 < best.1 { cur } else { best })
            .0;
        let (p, q) = pairs[d];
        let (a, a2) = pairs[(d + 1) % 3];
        let (b, b2) = pairs[(d + 2) % 3];
        let ring = [a, b, a2, b2];
        for i in 0..4 {
            out.push(orient(points, [p, q, ring[i], ring[(i + 1) % 4]]));
        }
    }
    out
}

/// Mesh of the unit ball at refinement `level` with geometric `order` 1 or 2.
pub fn generate_ball_mesh(level: usize, order: usize) -> Result<Mesh> {
    if order != 1 && order != 2 {
        return Err(Error::UnsupportedOrder(order));
    }
    if level > MAX_BALL_LEVEL {
        return Err(Error::InvalidInput(format!(
            "ball level {level} exceeds the supported maximum {MAX_BALL_LEVEL}"
        )));
    }
    let (ico, faces) = icosahedron();
    let mut points = vec![Vec3::zeros()];
    points.extend(ico);
    let mut tets: Vec<[usize; 4]> = faces
        .iter()
        .map(|f| orient(&points, [0, f[0] + 1, f[1] + 1, f[2] + 1]))
        .collect();
    for _ in 0..level {
        tets = refine(&mut points, &tets);
    }
    check_star_shaped(&points, &tets)?;

    let cells: Vec<Vec<usize>> = if order == 1 {
        tets.iter().map(|t| t.to_vec()).collect()
    } else {
        let bedges: std::collections::HashSet<(usize, usize)> = boundary_faces(&tets)
            .iter()
            .flat_map(|f| [(f[0], f[1]), (f[0], f[2]), (f[1], f[2])])
            .collect();
        let mut mids: HashMap<(usize, usize), usize> = HashMap::new();
        let mut cells = Vec::with_capacity(tets.len());
        for t in &tets {
            let mut c = t.to_vec();
            for [a, b] in ReferenceTet::EDGES {
                let key = if t[a] < t[b] { (t[a], t[b]) } else { (t[b], t[a]) };
                let idx = *mids.entry(key).or_insert_with(|| {
                    let mut p = (points[key.0] + points[key.1]) * 0.5;
                    if bedges.contains(&key) {
                        p = p.normalize();
                    }
                    points.push(p);
                    points.len() - 1
                });
                c.push(idx);
            }
            cells.push(c);
        }
        cells
    };
    let mesh = Mesh::new(order, points, cells)?;
    mesh.check_positive_jacobians()?;
    Ok(mesh)
}

/// Every boundary face must see the origin strictly on its inner side.
fn check_star_shaped(points: &[Vec3], tets: &[[usize; 4]]) -> Result<()> {
    let bf: std::collections::HashSet<[usize; 3]> = boundary_faces(tets).into_iter().collect();
    for t in tets {
        for (lf, f) in ReferenceTet::FACES.iter().enumerate() {
            let key = sorted3(f.map(|i| t[i]));
            if !bf.contains(&key) {
                continue;
            }
            let [a, b, c] = f.map(|i| points[t[i]]);
            let mut n = (b - a).cross(&(c - a));
            if n.dot(&(points[t[lf]] - a)) > 0.0 {
                n = -n;
            }
            if !(n.dot(&a) > 0.0) {
                return Err(Error::InvalidMesh(format!(
                    "boundary face {key:?} does not see the origin on its inner side"
                )));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seed_counts() {
        let m = generate_ball_mesh(0, 1).unwrap();
        assert_eq!(m.num_cells(), 20);
        assert_eq!(m.num_nodes(), 13);
        assert_eq!(generate_ball_mesh(1, 1).unwrap().num_cells(), 160);
    }

    #[test]
    fn boundary_nodes_on_sphere() {
        for (level, order) in [(0, 1), (1, 1), (2, 1), (1, 2), (2, 2)] {
            let m = generate_ball_mesh(level, order).unwrap();
            let mut count = 0;
            for i in 0..m.num_nodes() {
                if m.is_boundary_node(i) {
                    assert!((m.node(i).norm() - 1.0).abs() < 1e-12);
                    count += 1;
                }
            }
            assert!(count > 0);
        }
    }

    #[test]
    fn mesh_size_halves() {
        let h1 = generate_ball_mesh(1, 1).unwrap().h();
        let h2 = generate_ball_mesh(2, 1).unwrap().h();
        assert!((h2 / h1 - 0.5).abs() < 0.1, "{}", h2 / h1);
    }

    #[test]
    fn interior_faces_have_two_cells() {
        let m = generate_ball_mesh(2, 2).unwrap();
        let mut interior = 0;
        for f in 0..m.num_faces() {
            let [a, b] = m.face_cells(f);
            assert_ne!(a, super::super::NO_CELL);
            if b != super::super::NO_CELL {
                interior += 1;
            }
        }
        // 4 C = 2 F_int + F_bnd
        assert_eq!(4 * m.num_cells(), 2 * interior + m.boundary_faces().count());
    }

    #[test]
    fn curved_level_one_has_positive_jacobians() {
        let m = generate_ball_mesh(1, 2).unwrap();
        let rule = crate::reference::quadrature(5).unwrap();
        let mut min_det = f64::INFINITY;
        for c in 0..m.num_cells() {
            let map = m.element_map(c).unwrap();
            for i in 0..rule.len() {
                min_det = min_det.min(map.det(&rule.point(i)));
            }
        }
        assert!(min_det > 0.0);
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(matches!(generate_ball_mesh(0, 3), Err(Error::UnsupportedOrder(3))));
        assert!(generate_ball_mesh(MAX_BALL_LEVEL + 1, 1).is_err());
    }
}
