//! Constructors for polytopes whose face lattice is known in closed form.

use nalgebra::DVector;

use super::polytope::{Face, FaceId, Polytope};

/// The standard `d`-simplex `[0, e_1, …, e_d]` in `R^d`.
pub fn simplex(d: usize) -> Polytope {
    let mut pts = vec![vec![0.0; d]];
    for i in 0..d {
        let mut e = vec![0.0; d];
        e[i] = 1.0;
        pts.push(e);
    }
    simplex_with_vertices(pts)
}

/// A simplex with the given (affinely independent) vertices. Every nonempty
/// vertex subset is a face; faces are numbered by their bit mask.
pub fn simplex_with_vertices(points: Vec<Vec<f64>>) -> Polytope {
    let n = points.len();
    assert!(n >= 1 && n < usize::BITS as usize, "simplex needs 1..63 vertices");
    let masks: Vec<usize> = (1..(1usize << n)).collect();
    let id_of = |mask: usize| mask - 1;
    let faces: Vec<Face> = masks
        .iter()
        .map(|&mask| {
            let vertex_ids: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
            let dim = vertex_ids.len() - 1;
            let facet_ids = if dim == 0 {
                Vec::new()
            } else {
                vertex_ids.iter().map(|&i| id_of(mask & !(1 << i))).collect()
            };
            Face { id: id_of(mask), vertex_ids, dim, facet_ids }
        })
        .collect();
    let verts = points.into_iter().map(DVector::from_vec).collect();
    let top = id_of((1 << n) - 1);
    let mut faces = faces;
    for f in &mut faces {
        f.facet_ids.sort_unstable();
    }
    Polytope::from_parts(verts, faces, top)
}

/// The unit cube `[0, 1]^d`. Vertex `i` has coordinate `j` equal to bit `j` of `i`.
pub fn cube(d: usize) -> Polytope {
    combinatorial_cube(d, |bits| bits.iter().map(|&b| b as f64).collect())
}

/// A polytope combinatorially equivalent to the `d`-cube; `coords` maps the
/// bit pattern of a vertex (bit `j` = `j`-th cube coordinate) to its position.
pub fn combinatorial_cube(d: usize, coords: impl Fn(&[u8]) -> Vec<f64>) -> Polytope {
    let nv = 1usize << d;
    let verts: Vec<DVector<f64>> = (0..nv)
        .map(|i| {
            let bits: Vec<u8> = (0..d).map(|j| (i >> j & 1) as u8).collect();
            DVector::from_vec(coords(&bits))
        })
        .collect();

    // a face is a pattern in {0, 1, free}^d, encoded in base 3 (digit 2 = free)
    let nf = 3usize.pow(d as u32);
    let digits = |code: usize| -> Vec<usize> {
        let mut c = code;
        (0..d)
            .map(|_| {
                let r = c % 3;
                c /= 3;
                r
            })
            .collect()
    };
    let encode = |ds: &[usize]| -> usize { ds.iter().rev().fold(0, |acc, &x| acc * 3 + x) };
    let faces: Vec<Face> = (0..nf)
        .map(|code| {
            let ds = digits(code);
            let vertex_ids: Vec<usize> = (0..nv)
                .filter(|&v| (0..d).all(|j| ds[j] == 2 || (v >> j & 1) == ds[j]))
                .collect();
            let dim = ds.iter().filter(|&&x| x == 2).count();
            let mut facet_ids = Vec::new();
            for j in 0..d {
                if ds[j] == 2 {
                    for fixed in 0..2 {
                        let mut e = ds.clone();
                        e[j] = fixed;
                        facet_ids.push(encode(&e));
                    }
                }
            }
            facet_ids.sort_unstable();
            Face { id: code, vertex_ids, dim, facet_ids }
        })
        .collect();
    Polytope::from_parts(verts, faces, nf - 1)
}

/// A convex polygon from vertices listed in cyclic order.
pub fn polygon(points: Vec<Vec<f64>>) -> Polytope {
    let n = points.len();
    assert!(n >= 3, "polygon needs at least three vertices");
    let mut faces: Vec<Face> = (0..n)
        .map(|i| Face { id: i, vertex_ids: vec![i], dim: 0, facet_ids: vec![] })
        .collect();
    for i in 0..n {
        let j = (i + 1) % n;
        let mut vs = vec![i, j];
        vs.sort_unstable();
        let mut fs = vs.clone();
        fs.sort_unstable();
        faces.push(Face { id: n + i, vertex_ids: vs, dim: 1, facet_ids: fs });
    }
    faces.push(Face {
        id: 2 * n,
        vertex_ids: (0..n).collect(),
        dim: 2,
        facet_ids: (n..2 * n).collect(),
    });
    let verts = points.into_iter().map(DVector::from_vec).collect();
    Polytope::from_parts(verts, faces, 2 * n)
}

/// The double pyramid (octahedron) over the square `v0 v1 v2 v3` in the
/// plane `y = 0`, with apices `v4 = (0, 1, 0)` and `v5 = (0, -1, 0)`.
pub fn double_pyramid() -> Polytope {
    let pts = vec![
        vec![-1.0, 0.0, 0.0],
        vec![0.0, 0.0, 1.0],
        vec![1.0, 0.0, 0.0],
        vec![0.0, 0.0, -1.0],
        vec![0.0, 1.0, 0.0],
        vec![0.0, -1.0, 0.0],
    ];
    let mut faces: Vec<Face> = (0..6)
        .map(|i| Face { id: i, vertex_ids: vec![i], dim: 0, facet_ids: vec![] })
        .collect();
    let mut edges: Vec<[usize; 2]> = Vec::new();
    for i in 0..4 {
        let j = (i + 1) % 4;
        edges.push([i.min(j), i.max(j)]);
    }
    for i in 0..4 {
        edges.push([i, 4]);
        edges.push([i, 5]);
    }
    let edge_id = |a: usize, b: usize, edges: &[[usize; 2]]| -> FaceId {
        let key = [a.min(b), a.max(b)];
        6 + edges.iter().position(|e| *e == key).unwrap()
    };
    for (k, e) in edges.iter().enumerate() {
        faces.push(Face { id: 6 + k, vertex_ids: e.to_vec(), dim: 1, facet_ids: e.to_vec() });
    }
    let mut tri_ids = Vec::new();
    for apex in [4, 5] {
        for i in 0..4 {
            let j = (i + 1) % 4;
            let mut vs = vec![i, j, apex];
            vs.sort_unstable();
            let mut fs = vec![edge_id(i, j, &edges), edge_id(i, apex, &edges), edge_id(j, apex, &edges)];
            fs.sort_unstable();
            let id = faces.len();
            tri_ids.push(id);
            faces.push(Face { id, vertex_ids: vs, dim: 2, facet_ids: fs });
        }
    }
    let top = faces.len();
    faces.push(Face { id: top, vertex_ids: (0..6).collect(), dim: 3, facet_ids: tri_ids });
    let verts = pts.into_iter().map(DVector::from_vec).collect();
    Polytope::from_parts(verts, faces, top)
}

/// `P_x × P_y` together with the index maps back to the factors.
#[derive(Debug, Clone)]
pub struct ProductPolytope {
    pub poly: Polytope,
    nvy: usize,
    nfy: usize,
}

impl ProductPolytope {
    pub fn vertex_id(&self, ix: usize, iy: usize) -> usize {
        ix * self.nvy + iy
    }

    pub fn split_vertex(&self, v: usize) -> (usize, usize) {
        (v / self.nvy, v % self.nvy)
    }

    pub fn face_id(&self, fx: FaceId, fy: FaceId) -> FaceId {
        fx * self.nfy + fy
    }

    pub fn split_face(&self, f: FaceId) -> (FaceId, FaceId) {
        (f / self.nfy, f % self.nfy)
    }
}

/// Cartesian product. Vertex `(i, j)` gets id `i·n_y + j`, face `(F, G)` gets
/// id `F·f_y + G`; the facets of `F × G` are `F' × G` and `F × G'`.
pub fn cartesian_product(px: &Polytope, py: &Polytope) -> ProductPolytope {
    let nvy = py.num_vertices();
    let nfy = py.faces().len();
    let mut verts = Vec::with_capacity(px.num_vertices() * nvy);
    for a in px.vertices() {
        for b in py.vertices() {
            let mut c = Vec::with_capacity(a.len() + b.len());
            c.extend(a.iter());
            c.extend(b.iter());
            verts.push(DVector::from_vec(c));
        }
    }
    let mut faces = Vec::with_capacity(px.faces().len() * nfy);
    for fx in px.faces() {
        for fy in py.faces() {
            let mut vertex_ids = Vec::with_capacity(fx.vertex_ids.len() * fy.vertex_ids.len());
            for &i in &fx.vertex_ids {
                for &j in &fy.vertex_ids {
                    vertex_ids.push(i * nvy + j);
                }
            }
            let mut facet_ids: Vec<FaceId> = fx
                .facet_ids
                .iter()
                .map(|&g| g * nfy + fy.id)
                .chain(fy.facet_ids.iter().map(|&g| fx.id * nfy + g))
                .collect();
            facet_ids.sort_unstable();
            faces.push(Face { id: fx.id * nfy + fy.id, vertex_ids, dim: fx.dim + fy.dim, facet_ids });
        }
    }
    let top = px.top() * nfy + py.top();
    ProductPolytope { poly: Polytope::from_parts(verts, faces, top), nvy, nfy }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builders_pass_validation() {
        for d in 0..5 {
            simplex(d).validate().unwrap();
        }
        for d in 1..5 {
            cube(d).validate().unwrap();
        }
        double_pyramid().validate().unwrap();
        polygon(vec![vec![0.0, 0.0], vec![2.0, 0.0], vec![1.5, 1.0], vec![0.0, 1.0]])
            .validate()
            .unwrap();
    }

    #[test]
    fn f_vectors() {
        assert_eq!(simplex(3).f_vector(), vec![4, 6, 4, 1]);
        assert_eq!(cube(3).f_vector(), vec![8, 12, 6, 1]);
        assert_eq!(double_pyramid().f_vector(), vec![6, 12, 8, 1]);
    }

    #[test]
    fn segment_times_segment_is_square() {
        let s = simplex(1);
        let p = cartesian_product(&s, &s);
        p.poly.validate().unwrap();
        assert_eq!(p.poly.f_vector(), vec![4, 4, 1]);
    }

    #[test]
    fn product_facet_counts() {
        let t = simplex(2);
        let p = cartesian_product(&t, &t);
        p.poly.validate().unwrap();
        assert_eq!(p.poly.top_face().facet_ids.len(), 6);
        assert_eq!(p.poly.num_vertices(), 9);

        let q = polygon(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![1.0, 1.0], vec![0.0, 1.0]]);
        let p = cartesian_product(&t, &q);
        p.poly.validate().unwrap();
        assert_eq!(p.poly.top_face().facet_ids.len(), 7);
        let (fx, fy) = p.split_face(p.poly.top());
        assert_eq!((fx, fy), (t.top(), q.top()));
        assert_eq!(p.split_vertex(p.vertex_id(2, 3)), (2, 3));
    }
}
