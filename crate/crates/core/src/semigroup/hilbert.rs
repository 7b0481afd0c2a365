//! Pointed rational cones, their Hilbert bases, and the vertex-cone test for
//! very-ampleness.
//!
//! Hilbert bases are computed by triangulating the cone (pulling from the
//! first ray), collecting the lattice points of every simplicial piece's
//! half-open fundamental parallelepiped together with the rays, and keeping
//! the candidates that are irreducible in the full cone.

use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, IntMatrix, RationalVector};
use crate::polytope::{for_each_subset, LatticePolytope, Point, PointSet};

/// Full-dimensional pointed cone, stored by its primitive extreme rays and
/// inward facet normals (`n . x >= 0` on the cone).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cone {
    dim: usize,
    rays: Vec<Point>,
    facets: Vec<Point>,
}

impl Cone {
    /// Cone generated by `generators`; they are primitivized and reduced to
    /// extreme rays, keeping the order of first appearance.
    pub fn new(dim: usize, generators: &[Point]) -> Result<Self> {
        let mut gens: Vec<Point> = Vec::new();
        for g in generators {
            if g.len() != dim {
                return Err(Error::DimensionMismatch(format!("generator {g:?} not in Z^{dim}")));
            }
            if g.iter().all(|&x| x == 0) {
                continue;
            }
            let g = linalg::primitive(g)?;
            if !gens.contains(&g) {
                gens.push(g);
            }
        }
        if gens.is_empty() || linalg::rank(&IntMatrix::from_rows(&gens)?) != dim {
            return Err(Error::InvalidCone("generators do not span the ambient space".into()));
        }
        let mut facets: Vec<Point> = Vec::new();
        for_each_subset(gens.len(), dim - 1, |idx| {
            let rows: Vec<Point> = idx.iter().map(|&i| gens[i].clone()).collect();
            let Ok(n) = linalg::cofactor_normal(&rows) else { return };
            if n.iter().all(|&x| x == 0) {
                return;
            }
            let mut n = linalg::primitive(&n).expect("nonzero");
            let signs: Vec<i64> = gens.iter().map(|g| linalg::dot(&n, g).signum()).collect();
            if signs.contains(&1) && signs.contains(&-1) {
                return;
            }
            if signs.contains(&-1) {
                n.iter_mut().for_each(|x| *x = -*x);
            }
            if !facets.contains(&n) {
                facets.push(n);
            }
        });
        if facets.is_empty() || linalg::rank(&IntMatrix::from_rows(&facets)?) != dim {
            return Err(Error::InvalidCone("cone is not pointed".into()));
        }
        facets.sort();
        let rays = gens
            .into_iter()
            .filter(|g| {
                let tight: Vec<&Point> = facets.iter().filter(|n| linalg::dot(n, g) == 0).collect();
                let r = if tight.is_empty() {
                    0
                } else {
                    linalg::rank(&IntMatrix::from_rows(&tight).expect("uniform rows"))
                };
                r == dim - 1
            })
            .collect();
        Ok(Self { dim, rays, facets })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rays(&self) -> &[Point] {
        &self.rays
    }

    pub fn facet_normals(&self) -> &[Point] {
        &self.facets
    }

    pub fn is_simplicial(&self) -> bool {
        self.rays.len() == self.dim
    }

    pub fn contains(&self, x: &[i64]) -> bool {
        self.facets.iter().all(|n| linalg::dot(n, x) >= 0)
    }

    fn ray_rank(&self, idx: &[usize]) -> usize {
        if idx.is_empty() {
            return 0;
        }
        let rows: Vec<&Point> = idx.iter().map(|&i| &self.rays[i]).collect();
        linalg::rank(&IntMatrix::from_rows(&rows).expect("uniform rows"))
    }

    /// Ray index sets of the facets of the face spanned by `face`.
    fn facets_of_face(&self, face: &[usize]) -> Vec<Vec<usize>> {
        let r = self.ray_rank(face);
        let mut out: Vec<Vec<usize>> = Vec::new();
        for n in &self.facets {
            let sub: Vec<usize> =
                face.iter().copied().filter(|&i| linalg::dot(n, &self.rays[i]) == 0).collect();
            if sub.len() == face.len() || self.ray_rank(&sub) + 1 != r {
                continue;
            }
            if !out.contains(&sub) {
                out.push(sub);
            }
        }
        out
    }

    /// Pulling triangulation from the first ray of each face.
    fn triangulate(&self, face: &[usize]) -> Vec<Vec<usize>> {
        if self.ray_rank(face) == face.len() {
            return vec![face.to_vec()];
        }
        let apex = face[0];
        let mut out = Vec::new();
        for sub in self.facets_of_face(face) {
            if sub.contains(&apex) {
                continue;
            }
            for mut simplex in self.triangulate(&sub) {
                simplex.insert(0, apex);
                out.push(simplex);
            }
        }
        out
    }

    /// Simplicial cones (as ray lists) covering this cone.
    pub fn triangulation(&self) -> Vec<Vec<Point>> {
        let all: Vec<usize> = (0..self.rays.len()).collect();
        self.triangulate(&all)
            .into_iter()
            .map(|s| s.into_iter().map(|i| self.rays[i].clone()).collect())
            .collect()
    }
}

/// Nonzero lattice points of the half-open parallelepiped spanned by
/// linearly independent `rays`, plus the rays themselves.
fn parallelepiped_candidates(rays: &[Point]) -> Result<Vec<Point>> {
    let d = rays.len();
    let w = IntMatrix::from_rows(rays)?;
    if !w.is_square() {
        return Err(Error::InvalidCone("simplicial cone needs exactly d rays".into()));
    }
    let det = linalg::determinant(&w)?;
    if det.is_zero() {
        return Err(Error::InvalidCone("rays are linearly dependent".into()));
    }
    let (h, _) = linalg::hermite_normal_form(&w);
    let pivots: Vec<i64> = (0..d).map(|i| h[(i, i)].to_i64().ok_or(Error::Overflow)).collect::<Result<_>>()?;
    let wt = w.transpose();
    let mut out: Vec<Point> = rays.to_vec();
    // coset representatives of Z^d / (row lattice of W): the box [0, h_ii)
    let mut x = vec![0i64; d];
    loop {
        if x.iter().any(|&c| c != 0) {
            let lambda = linalg::solve_rational(&wt, &RationalVector::from_integers(&x))?
                .ok_or_else(|| Error::InvariantViolation("nonsingular system unsolved".into()))?;
            let mut p = vec![num_rational::BigRational::zero(); d];
            for (l, ray) in lambda.0.iter().zip(rays) {
                let frac = l - l.floor();
                for (pj, &rj) in p.iter_mut().zip(ray) {
                    *pj += &frac * num_rational::BigRational::from_integer(rj.into());
                }
            }
            let p: Point = p
                .iter()
                .map(|c| {
                    debug_assert!(c.is_integer());
                    c.to_integer().to_i64().ok_or(Error::Overflow)
                })
                .collect::<Result<_>>()?;
            if p.iter().any(|&c| c != 0) {
                out.push(p);
            }
        }
        let mut j = d;
        loop {
            if j == 0 {
                out.sort();
                out.dedup();
                return Ok(out);
            }
            j -= 1;
            if x[j] + 1 < pivots[j] {
                x[j] += 1;
                break;
            }
            x[j] = 0;
        }
    }
}

/// Keeps the candidates that are not `g + (nonzero cone point)` for another
/// candidate `g`. Correct whenever the candidates generate the semigroup.
fn irreducible(cone: &Cone, mut candidates: Vec<Point>) -> Vec<Point> {
    candidates.sort();
    candidates.dedup();
    let keep: Vec<bool> = candidates
        .iter()
        .map(|c| {
            !candidates.iter().any(|g| {
                g != c && {
                    let diff: Point = c.iter().zip(g).map(|(a, b)| a - b).collect();
                    cone.contains(&diff)
                }
            })
        })
        .collect();
    candidates.into_iter().zip(keep).filter_map(|(c, k)| k.then_some(c)).collect()
}

/// Hilbert basis of a simplicial cone spanned by `rays`.
pub fn hilbert_basis_simplicial(rays: &[Point]) -> Result<PointSet> {
    let d = rays.first().map_or(0, Vec::len);
    if rays.len() != d {
        return Err(Error::InvalidCone(format!("{} rays in dimension {d}", rays.len())));
    }
    let cone = Cone::new(d, rays)?;
    if !cone.is_simplicial() {
        return Err(Error::InvalidCone("rays are linearly dependent".into()));
    }
    let candidates = parallelepiped_candidates(cone.rays())?;
    Ok(PointSet::new(1, irreducible(&cone, candidates)))
}

/// Hilbert basis of an arbitrary pointed full-dimensional cone.
pub fn hilbert_basis(cone: &Cone) -> Result<PointSet> {
    let mut candidates = Vec::new();
    for simplex in cone.triangulation() {
        candidates.extend(parallelepiped_candidates(&simplex)?);
    }
    Ok(PointSet::new(1, irreducible(cone, candidates)))
}

/// `cone(P - v)` for a vertex `v`.
pub fn vertex_cone(p: &LatticePolytope, v: &[i64]) -> Result<Cone> {
    if p.vertex_index(v).is_none() {
        return Err(Error::NotAVertex(v.to_vec()));
    }
    let gens: Vec<Point> = p
        .vertices()
        .iter()
        .filter(|w| w.as_slice() != v)
        .map(|w| w.iter().zip(v).map(|(a, b)| a - b).collect())
        .collect();
    Cone::new(p.dim(), &gens)
}

/// Hilbert basis elements `h` of the cone at `vertex` with `vertex + h ∉ P`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexWitness {
    pub vertex: Point,
    pub missing: Vec<Point>,
}

/// Very ample iff every vertex cone's Hilbert basis lies in `(P∩M) - v`.
pub fn is_very_ample(p: &LatticePolytope) -> Result<(bool, Vec<VertexWitness>)> {
    let mut witnesses = Vec::new();
    for v in p.vertices() {
        let hb = hilbert_basis(&vertex_cone(p, v)?)?;
        let missing: Vec<Point> = hb
            .iter()
            .filter(|h| {
                let x: Point = h.iter().zip(v).map(|(a, b)| a + b).collect();
                !p.contains(&x, 1)
            })
            .cloned()
            .collect();
        if !missing.is_empty() {
            witnesses.push(VertexWitness { vertex: v.clone(), missing });
        }
    }
    Ok((witnesses.is_empty(), witnesses))
}

/// Positive grading on a pointed cone: the sum of its facet normals.
pub fn grading(cone: &Cone) -> Point {
    let mut g = vec![0i64; cone.dim];
    for n in &cone.facets {
        for (gj, nj) in g.iter_mut().zip(n) {
            *gj += nj;
        }
    }
    g
}

/// Index of a simplicial cone: `|det(rays)|`.
pub fn simplicial_index(rays: &[Point]) -> Result<u64> {
    let det = linalg::determinant(&IntMatrix::from_rows(rays)?)?;
    det.abs().to_u64().ok_or(Error::Overflow)
}
