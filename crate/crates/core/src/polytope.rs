//! Lattice polytopes given by their vertices, with a derived facet
//! description, lattice point enumeration of dilations, and the pyramid and
//! dilation constructors.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::cache::{self, CacheKey, SetKind};
use crate::error::{Error, Result};
use crate::linalg::{self, IntMatrix, RationalVector};

/// A point of the lattice `Z^d`.
pub type Point = Vec<i64>;

/// Lattice points in canonical (lexicographic, duplicate-free) order,
/// together with the dilation factor they belong to.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PointSet {
    pub k: u64,
    points: Vec<Point>,
}

impl PointSet {
    pub fn new(k: u64, mut points: Vec<Point>) -> Self {
        points.sort_unstable();
        points.dedup();
        Self { k, points }
    }

    /// `points` must already be sorted and duplicate-free.
    pub(crate) fn from_sorted(k: u64, points: Vec<Point>) -> Self {
        debug_assert!(points.windows(2).all(|w| w[0] < w[1]));
        Self { k, points }
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn into_points(self) -> Vec<Point> {
        self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn contains(&self, p: &[i64]) -> bool {
        self.points.binary_search_by(|q| q.as_slice().cmp(p)).is_ok()
    }

    pub fn is_subset(&self, other: &PointSet) -> bool {
        self.points.iter().all(|p| other.contains(p))
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Point> {
        self.points.iter()
    }
}

/// One inequality `normal . x <= offset`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Facet {
    pub normal: Point,
    pub offset: i64,
}

impl Facet {
    /// `offset - normal . x`; zero on the facet, positive inside.
    pub fn slack(&self, x: &[i64], k: i64) -> i128 {
        let nx: i128 = self.normal.iter().zip(x).map(|(&a, &b)| a as i128 * b as i128).sum();
        self.offset as i128 * k as i128 - nx
    }
}

/// Irredundant facet description. Normals are primitive.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HalfspaceRep {
    pub facets: Vec<Facet>,
}

impl HalfspaceRep {
    pub fn contains(&self, x: &[i64], k: i64) -> bool {
        self.facets.iter().all(|f| f.slack(x, k) >= 0)
    }

    pub fn contains_strictly(&self, x: &[i64], k: i64) -> bool {
        self.facets.iter().all(|f| f.slack(x, k) > 0)
    }
}

#[derive(Clone)]
pub struct LatticePolytope {
    dim: usize,
    vertices: Vec<Point>,
    name: Option<String>,
    hrep: Arc<HalfspaceRep>,
}

impl PartialEq for LatticePolytope {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.vertices == other.vertices && self.name == other.name
    }
}

impl Eq for LatticePolytope {}

impl fmt::Debug for LatticePolytope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LatticePolytope")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("vertices", &self.vertices)
            .finish()
    }
}

impl LatticePolytope {
    /// Validates and builds a polytope from an irredundant vertex list.
    pub fn new(dim: usize, vertices: Vec<Point>, name: Option<String>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidPolytope("ambient dimension must be positive".into()));
        }
        if let Some(v) = vertices.iter().find(|v| v.len() != dim) {
            return Err(Error::DimensionMismatch(format!(
                "vertex {v:?} does not live in Z^{dim}"
            )));
        }
        if vertices.len() < dim + 1 {
            return Err(Error::InvalidPolytope(format!(
                "{} vertices cannot span a {dim}-polytope",
                vertices.len()
            )));
        }
        let mut sorted = vertices.clone();
        sorted.sort();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidPolytope("duplicate vertex".into()));
        }
        let hrep = facets_of_points(dim, &vertices)?;
        for v in &vertices {
            if !is_extreme(dim, &hrep, v) {
                return Err(Error::InvalidPolytope(format!("{v:?} is not a vertex")));
            }
        }
        Ok(Self { dim, vertices, name, hrep: Arc::new(hrep) })
    }

    /// Convex hull of arbitrary lattice points; non-extreme points are
    /// dropped, remaining order is preserved.
    pub fn from_points(dim: usize, points: &[Point], name: Option<String>) -> Result<Self> {
        let mut pts: Vec<Point> = Vec::new();
        for p in points {
            if !pts.contains(p) {
                pts.push(p.clone());
            }
        }
        let hrep = facets_of_points(dim, &pts)?;
        let vertices = pts.into_iter().filter(|v| is_extreme(dim, &hrep, v)).collect();
        Self::new(dim, vertices, name)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn label(&self) -> String {
        self.name.clone().unwrap_or_else(|| format!("{:?}", self.vertices))
    }

    pub fn facet_inequalities(&self) -> &HalfspaceRep {
        &self.hrep
    }

    pub fn is_simplex(&self) -> bool {
        self.vertices.len() == self.dim + 1
    }

    pub fn vertex_index(&self, v: &[i64]) -> Option<usize> {
        self.vertices.iter().position(|w| w.as_slice() == v)
    }

    pub fn contains(&self, x: &[i64], k: u64) -> bool {
        self.hrep.contains(x, k as i64)
    }

    /// Integer points of `kP`, memoized. Dilations of one polytope share
    /// entries: `(cQ, k)` and `(Q, ck)` hit the same key.
    pub fn lattice_points(&self, k: u64) -> Arc<PointSet> {
        assert!(k >= 1, "dilation factor must be positive");
        let (vertices, scale) = self.dilation_base();
        let key = CacheKey { kind: SetKind::Lattice, vertices, k: k * scale };
        relabel(cache::get_or_compute(key, || PointSet::from_sorted(k, scan(self, k, false))), k)
    }

    /// Integer points of the interior of `kP`.
    pub fn interior_lattice_points(&self, k: u64) -> Arc<PointSet> {
        assert!(k >= 1, "dilation factor must be positive");
        let (vertices, scale) = self.dilation_base();
        let key = CacheKey { kind: SetKind::Interior, vertices, k: k * scale };
        relabel(cache::get_or_compute(key, || PointSet::from_sorted(k, scan(self, k, true))), k)
    }

    pub(crate) fn cache_key(&self, kind: SetKind, k: u64) -> CacheKey {
        CacheKey { kind, vertices: self.vertices.clone(), k }
    }

    fn dilation_base(&self) -> (Vec<Point>, u64) {
        let g = self.vertices.iter().fold(0i64, |g, v| num_integer::gcd(g, linalg::gcd_slice(v)));
        let g = g.max(1);
        let base = self.vertices.iter().map(|v| v.iter().map(|x| x / g).collect()).collect();
        (base, g as u64)
    }

    pub fn is_hollow(&self) -> bool {
        self.interior_lattice_points(1).is_empty()
    }

    /// Interior lattice points are exactly the origin and every vertex is
    /// primitive.
    pub fn is_fano(&self) -> bool {
        let interior = self.interior_lattice_points(1);
        interior.len() == 1
            && interior.points()[0].iter().all(|&x| x == 0)
            && self.vertices.iter().all(|v| linalg::gcd_slice(v) == 1)
    }

    /// `l`-fold standard pyramid `conv(0, P x {1})`, iterated.
    pub fn pyramid(&self, l: usize) -> Result<Self> {
        if l == 0 {
            return Ok(self.clone());
        }
        let dim = self.dim + 1;
        let mut vertices = vec![vec![0; dim]];
        vertices.extend(self.vertices.iter().map(|v| {
            let mut w = v.clone();
            w.push(1);
            w
        }));
        let name = self.name.as_ref().map(|n| format!("pyr({n})"));
        Self::new(dim, vertices, name)?.pyramid(l - 1)
    }

    pub fn dilate(&self, c: u64) -> Result<Self> {
        if c == 0 {
            return Err(Error::InvalidArgument("dilation factor must be positive".into()));
        }
        if c == 1 {
            return Ok(self.clone());
        }
        let c = i64::try_from(c).map_err(|_| Error::Overflow)?;
        let vertices = self
            .vertices
            .iter()
            .map(|v| v.iter().map(|x| x.checked_mul(c).ok_or(Error::Overflow)).collect())
            .collect::<Result<Vec<Point>>>()?;
        let name = self.name.as_ref().map(|n| format!("{c}{n}"));
        Ok(Self { dim: self.dim, vertices, name, hrep: Arc::new(scale_hrep(&self.hrep, c)) })
    }

    fn edge_matrix(&self) -> Result<IntMatrix> {
        let v0 = &self.vertices[0];
        let rows: Vec<Point> =
            self.vertices[1..].iter().map(|v| v.iter().zip(v0).map(|(a, b)| a - b).collect()).collect();
        IntMatrix::from_rows(&rows)
    }

    /// `|det(v_1 - v_0, ..., v_d - v_0)|`.
    pub fn normalized_volume_simplex(&self) -> Result<u64> {
        if !self.is_simplex() {
            return Err(Error::NotSimplex);
        }
        let det = linalg::determinant(&self.edge_matrix()?)?;
        det.abs().to_u64().ok_or(Error::Overflow)
    }

    /// Barycentric coordinates of `x` with respect to the vertices of a
    /// simplex; they sum to 1.
    pub fn barycentric(&self, x: &[i64]) -> Result<RationalVector> {
        if !self.is_simplex() {
            return Err(Error::NotSimplex);
        }
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch(format!("point {x:?} not in Z^{}", self.dim)));
        }
        // columns v_i - v_0, solve for lambda_1..lambda_d
        let a = self.edge_matrix()?.transpose();
        let v0 = &self.vertices[0];
        let rhs: Vec<i64> = x.iter().zip(v0).map(|(a, b)| a - b).collect();
        let tail = linalg::solve_rational(&a, &RationalVector::from_integers(&rhs))?
            .ok_or_else(|| Error::InvariantViolation("simplex with singular edge matrix".into()))?;
        let lead = num_rational::BigRational::from_integer(BigInt::from(1)) - tail.sum();
        let mut all = vec![lead];
        all.extend(tail.0);
        Ok(RationalVector(all))
    }
}

fn relabel(set: Arc<PointSet>, k: u64) -> Arc<PointSet> {
    if set.k == k {
        set
    } else {
        Arc::new(PointSet { k, points: set.points.clone() })
    }
}

fn scale_hrep(h: &HalfspaceRep, c: i64) -> HalfspaceRep {
    HalfspaceRep {
        facets: h
            .facets
            .iter()
            .map(|f| Facet { normal: f.normal.clone(), offset: f.offset * c })
            .collect(),
    }
}

fn is_extreme(dim: usize, hrep: &HalfspaceRep, v: &[i64]) -> bool {
    let tight: Vec<&Point> =
        hrep.facets.iter().filter(|f| f.slack(v, 1) == 0).map(|f| &f.normal).collect();
    tight.len() >= dim && IntMatrix::from_rows(&tight).map(|m| linalg::rank(&m)) == Ok(dim)
}

/// Calls `f` on every `size`-element index subset of `0..n` in
/// lexicographic order.
pub(crate) fn for_each_subset(n: usize, size: usize, mut f: impl FnMut(&[usize])) {
    fn rec(start: usize, n: usize, size: usize, cur: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
        if cur.len() == size {
            f(cur);
            return;
        }
        for i in start..n {
            if n - i < size - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, size, cur, f);
            cur.pop();
        }
    }
    rec(0, n, size, &mut Vec::with_capacity(size), &mut f);
}

/// Facets of `conv(points)` by scanning every `dim`-subset of points that
/// spans a supporting hyperplane. Points need not be extreme.
pub(crate) fn facets_of_points(dim: usize, points: &[Point]) -> Result<HalfspaceRep> {
    let n = points.len();
    if n == 0 {
        return Err(Error::InvalidPolytope("no points".into()));
    }
    let diffs: Vec<Point> =
        points[1..].iter().map(|p| p.iter().zip(&points[0]).map(|(a, b)| a - b).collect()).collect();
    if diffs.len() < dim || linalg::rank(&IntMatrix::from_rows(&diffs)?) != dim {
        return Err(Error::NotFullDimensional);
    }
    let mut facets: Vec<Facet> = Vec::new();
    let mut err = None;
    for_each_subset(n, dim, |idx| {
        if err.is_some() {
            return;
        }
        let base = &points[idx[0]];
        let rows: Vec<Point> = idx[1..]
            .iter()
            .map(|&i| points[i].iter().zip(base).map(|(a, b)| a - b).collect())
            .collect();
        let normal = match linalg::cofactor_normal(&rows) {
            Ok(n) => n,
            Err(e) => {
                err = Some(e);
                return;
            }
        };
        if normal.iter().all(|&x| x == 0) {
            return;
        }
        let mut normal = linalg::primitive(&normal).expect("nonzero normal");
        let mut offset = linalg::dot(&normal, base);
        let (mut below, mut above) = (false, false);
        for p in points {
            match linalg::dot(&normal, p).cmp(&offset) {
                std::cmp::Ordering::Less => below = true,
                std::cmp::Ordering::Greater => above = true,
                std::cmp::Ordering::Equal => {}
            }
        }
        if below && above {
            return;
        }
        if above {
            normal.iter_mut().for_each(|x| *x = -*x);
            offset = -offset;
        }
        let facet = Facet { normal, offset };
        if !facets.contains(&facet) {
            facets.push(facet);
        }
    });
    if let Some(e) = err {
        return Err(e);
    }
    facets.sort();
    Ok(HalfspaceRep { facets })
}

/// Bounding-box scan of `kP` (or its interior). The last coordinate is
/// solved exactly from the inequalities instead of scanned. Output is in
/// lexicographic order.
fn scan(p: &LatticePolytope, k: u64, strict: bool) -> Vec<Point> {
    let d = p.dim;
    let k = k as i64;
    let facets = &p.hrep.facets;
    let lo: Vec<i64> =
        (0..d).map(|j| p.vertices.iter().map(|v| v[j]).min().expect("vertices") * k).collect();
    let hi: Vec<i64> =
        (0..d).map(|j| p.vertices.iter().map(|v| v[j]).max().expect("vertices") * k).collect();
    let mut out = Vec::new();
    let mut x = lo.clone();
    // partial[f] = normal_f . x restricted to the first d-1 coordinates
    loop {
        let mut last_lo = lo[d - 1] as i128;
        let mut last_hi = hi[d - 1] as i128;
        for f in facets {
            let partial: i128 =
                f.normal[..d - 1].iter().zip(&x[..d - 1]).map(|(&a, &b)| a as i128 * b as i128).sum();
            let mut rhs = f.offset as i128 * k as i128 - partial;
            if strict {
                rhs -= 1;
            }
            let a = f.normal[d - 1] as i128;
            match a.signum() {
                0 => {
                    if rhs < 0 {
                        last_hi = last_lo - 1;
                        break;
                    }
                }
                1 => last_hi = last_hi.min(rhs.div_euclid(a)),
                _ => last_lo = last_lo.max(-(rhs.div_euclid(-a))),
            }
        }
        let mut t = last_lo;
        while t <= last_hi {
            x[d - 1] = t as i64;
            out.push(x.clone());
            t += 1;
        }
        // advance the odometer over the first d-1 coordinates
        let mut j = d - 1;
        loop {
            if j == 0 {
                return out;
            }
            j -= 1;
            if x[j] < hi[j] {
                x[j] += 1;
                break;
            }
            x[j] = lo[j];
        }
    }
}

/// JSON shape shared by the CLI and the family generators.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PolytopeJson {
    #[serde(default)]
    pub name: Option<String>,
    pub dim: usize,
    pub vertices: Vec<Point>,
}

impl From<&LatticePolytope> for PolytopeJson {
    fn from(p: &LatticePolytope) -> Self {
        PolytopeJson { name: p.name.clone(), dim: p.dim, vertices: p.vertices.clone() }
    }
}

impl TryFrom<PolytopeJson> for LatticePolytope {
    type Error = Error;

    fn try_from(j: PolytopeJson) -> Result<Self> {
        LatticePolytope::new(j.dim, j.vertices, j.name)
    }
}

impl Serialize for LatticePolytope {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PolytopeJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for LatticePolytope {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = PolytopeJson::deserialize(d)?;
        LatticePolytope::try_from(j).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(vs: &[&[i64]]) -> LatticePolytope {
        let d = vs[0].len();
        LatticePolytope::new(d, vs.iter().map(|v| v.to_vec()).collect(), None).unwrap()
    }

    fn delta2() -> LatticePolytope {
        poly(&[&[0, 0], &[1, 0], &[0, 1]])
    }

    fn t22() -> LatticePolytope {
        poly(&[&[0, 0], &[2, 0], &[0, 2]])
    }

    fn t21() -> LatticePolytope {
        poly(&[&[0, 0], &[2, 0], &[0, 1]])
    }

    fn bg4() -> LatticePolytope {
        poly(&[
            &[0, 0, 0],
            &[1, 0, 0],
            &[0, 1, 0],
            &[0, 0, 1],
            &[1, 0, 1],
            &[0, 1, 1],
            &[1, 1, 4],
            &[1, 1, 5],
        ])
    }

    /// Independent membership oracle: brute force over the bounding box with
    /// barycentric coordinates (simplices only).
    fn oracle_count(p: &LatticePolytope, k: i64, strict: bool) -> usize {
        let d = p.dim();
        let lo: Vec<i64> = (0..d).map(|j| p.vertices().iter().map(|v| v[j]).min().unwrap() * k).collect();
        let hi: Vec<i64> = (0..d).map(|j| p.vertices().iter().map(|v| v[j]).max().unwrap() * k).collect();
        let kp = p.dilate(k as u64).unwrap();
        let mut count = 0;
        let mut x = lo.clone();
        loop {
            let lam = kp.barycentric(&x).unwrap();
            let zero = num_rational::BigRational::from_integer(0.into());
            let ok = if strict { lam.0.iter().all(|l| *l > zero) } else { lam.0.iter().all(|l| *l >= zero) };
            if ok {
                count += 1;
            }
            let mut j = d;
            loop {
                if j == 0 {
                    return count;
                }
                j -= 1;
                if x[j] < hi[j] {
                    x[j] += 1;
                    break;
                }
                x[j] = lo[j];
            }
        }
    }

    #[test]
    fn facets_of_small_triangles() {
        let h = delta2().facet_inequalities().clone();
        let expect = vec![
            Facet { normal: vec![-1, 0], offset: 0 },
            Facet { normal: vec![0, -1], offset: 0 },
            Facet { normal: vec![1, 1], offset: 1 },
        ];
        assert_eq!(h.facets, expect);
        let h = t22().facet_inequalities().clone();
        assert_eq!(h.facets[2], Facet { normal: vec![1, 1], offset: 2 });
        assert_eq!(h.facets.len(), 3);
    }

    #[test]
    fn bruns_gubeladze_vertex_recovery() {
        let p = bg4();
        let pts = p.lattice_points(1);
        let hull = LatticePolytope::from_points(3, pts.points(), None).unwrap();
        let mut a = hull.vertices().to_vec();
        let mut b = p.vertices().to_vec();
        a.sort();
        b.sort();
        assert_eq!(a, b);
        assert_eq!(pts.len(), 8);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            LatticePolytope::new(2, vec![vec![0, 0], vec![1, 1], vec![2, 2]], None),
            Err(Error::NotFullDimensional)
        ));
        assert!(matches!(
            LatticePolytope::new(2, vec![vec![0, 0], vec![2, 0], vec![0, 2], vec![1, 0]], None),
            Err(Error::InvalidPolytope(_))
        ));
        assert!(LatticePolytope::new(2, vec![vec![0, 0], vec![1, 0]], None).is_err());
        assert!(LatticePolytope::new(2, vec![vec![0, 0], vec![1, 0], vec![0]], None).is_err());
        assert!(LatticePolytope::new(2, vec![vec![0, 0], vec![1, 0], vec![0, 0]], None).is_err());
    }

    #[test]
    fn lattice_point_counts() {
        assert_eq!(delta2().lattice_points(1).len(), 3);
        assert_eq!(delta2().lattice_points(2).len(), 6);
        assert_eq!(t21().lattice_points(2).len(), 9);
        assert_eq!(oracle_count(&t21(), 2, false), 9);
        assert_eq!(oracle_count(&delta2(), 2, false), 6);
    }

    #[test]
    fn interior_points() {
        assert!(delta2().interior_lattice_points(1).is_empty());
        assert_eq!(delta2().interior_lattice_points(3).points(), &[vec![1, 1]]);
        assert!(t22().interior_lattice_points(1).is_empty());
        assert!(delta2().is_hollow());
        assert!(t22().is_hollow());
        assert!(!delta2().dilate(3).unwrap().is_hollow());
    }

    #[test]
    fn fano_predicate() {
        let cross = poly(&[&[1, 0], &[0, 1], &[-1, 0], &[0, -1]]);
        assert!(cross.is_fano());
        assert!(!delta2().is_fano());
        assert!(!cross.dilate(2).unwrap().is_fano());
    }

    #[test]
    fn pyramids() {
        let seg = LatticePolytope::new(1, vec![vec![0], vec![1]], None).unwrap();
        let tri = seg.pyramid(1).unwrap();
        assert_eq!(tri.vertices(), &[vec![0, 0], vec![0, 1], vec![1, 1]]);
        assert_eq!(tri.normalized_volume_simplex().unwrap(), 1);

        let q = t22().pyramid(1).unwrap();
        assert_eq!(q.vertices(), &[vec![0, 0, 0], vec![0, 0, 1], vec![2, 0, 1], vec![0, 2, 1]]);
        assert_eq!(t22().pyramid(0).unwrap(), t22());
    }

    #[test]
    fn dilations_and_volumes() {
        assert_eq!(delta2().dilate(2).unwrap().vertices(), &[vec![0, 0], vec![2, 0], vec![0, 2]]);
        assert_eq!(delta2().dilate(1).unwrap(), delta2());
        assert_eq!(delta2().normalized_volume_simplex().unwrap(), 1);
        assert_eq!(t22().normalized_volume_simplex().unwrap(), 4);
        let d3 = poly(&[&[0, 0, 0], &[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]);
        assert_eq!(d3.dilate(2).unwrap().normalized_volume_simplex().unwrap(), 8);
        assert_eq!(bg4().normalized_volume_simplex(), Err(Error::NotSimplex));
        assert!(delta2().dilate(0).is_err());
    }

    #[test]
    fn json_round_trip() {
        let p = bg4().with_name("P_4");
        let s = serde_json::to_string(&p).unwrap();
        assert!(s.starts_with("{\"name\":\"P_4\",\"dim\":3,\"vertices\":[[0,0,0]"));
        let q: LatticePolytope = serde_json::from_str(&s).unwrap();
        assert_eq!(p, q);
        assert!(serde_json::from_str::<LatticePolytope>(r#"{"dim":2,"vertices":[[0,0],[1,1]]}"#).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn simplex(d: usize) -> impl Strategy<Value = LatticePolytope> {
            proptest::collection::vec(proptest::collection::vec(-3i64..=3, d), d + 1)
                .prop_filter_map("degenerate", move |vs| LatticePolytope::new(d, vs, None).ok())
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(48))]

            #[test]
            fn scan_matches_barycentric_oracle(p in (2usize..=3).prop_flat_map(simplex), k in 1i64..=2) {
                prop_assert_eq!(p.lattice_points(k as u64).len(), oracle_count(&p, k, false));
                prop_assert_eq!(p.interior_lattice_points(k as u64).len(), oracle_count(&p, k, true));
            }

            #[test]
            fn pyramid_adds_only_the_apex(p in (2usize..=3).prop_flat_map(simplex)) {
                let q = p.pyramid(1).unwrap();
                prop_assert_eq!(q.lattice_points(1).len(), p.lattice_points(1).len() + 1);
            }

            #[test]
            fn dilation_commutes_with_counting(p in simplex(2), c in 1u64..=3, k in 1u64..=3) {
                let q = p.dilate(c).unwrap();
                let (a, b) = (q.lattice_points(k), p.lattice_points(c * k));
                prop_assert_eq!(a.points(), b.points());
            }

            #[test]
            fn vertex_recovery(p in (2usize..=3).prop_flat_map(simplex)) {
                let hull = LatticePolytope::from_points(p.dim(), p.lattice_points(1).points(), None).unwrap();
                let mut a = hull.vertices().to_vec();
                let mut b = p.vertices().to_vec();
                a.sort();
                b.sort();
                prop_assert_eq!(a, b);
            }
        }
    }
}
