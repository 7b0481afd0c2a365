//! Explicit decompositions `target = u_1 + ... + u_{2k-1}` with every
//! `u_j ∈ P∩M`, for very ample simplices.
//!
//! [`ogata_decompose`] realizes `x + (k-1) v_i` by exhaustive multiset search.
//! [`weighted_decompose`] realizes `sum a_i v_i + x` by induction on `k`:
//! it decomposes `x + (k-1) v_i` for some `i` with `a_i > 0`, then either
//! pairs the parts up (each pair summing to a point of `P - v_i`) or peels
//! off a pair whose sum leaves `P - v_i` and recurses on the rest, which
//! lies in `(k-1)P`.

use std::cell::Cell;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polytope::{LatticePolytope, Point};

pub const DEFAULT_NODE_BUDGET: u64 = 5_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecompositionCertificate {
    pub polytope: LatticePolytope,
    pub k: u64,
    pub target: Point,
    pub parts: Vec<Point>,
}

/// Checks the part count, membership of every part in `P∩M`, and the sum.
pub fn verify_certificate(c: &DecompositionCertificate) -> bool {
    let d = c.polytope.dim();
    if c.k == 0 || c.parts.len() as u64 != 2 * c.k - 1 || c.target.len() != d {
        return false;
    }
    if c.parts.iter().any(|u| u.len() != d || !c.polytope.contains(u, 1)) {
        return false;
    }
    let mut sum = vec![0i64; d];
    for u in &c.parts {
        for (s, x) in sum.iter_mut().zip(u) {
            *s += x;
        }
    }
    sum == c.target
}

fn add(a: &[i64], b: &[i64]) -> Point {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn sub(a: &[i64], b: &[i64]) -> Point {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn scaled(v: &[i64], c: i64) -> Point {
    v.iter().map(|x| x * c).collect()
}

struct Search<'a> {
    p: &'a LatticePolytope,
    points: Vec<Point>,
    nodes: Cell<u64>,
    budget: u64,
}

impl<'a> Search<'a> {
    fn new(p: &'a LatticePolytope, budget: u64) -> Self {
        Self { p, points: p.lattice_points(1).points().to_vec(), nodes: Cell::new(0), budget }
    }

    /// Multiset of `n` points of P∩M summing to `target`, parts in
    /// nondecreasing lexicographic order. The residual after each choice must
    /// lie in (remaining)P.
    fn find(&self, target: &[i64], n: usize) -> Result<Option<Vec<Point>>> {
        let mut chosen = Vec::with_capacity(n);
        self.dfs(target.to_vec(), n, 0, &mut chosen)
    }

    fn dfs(
        &self,
        residual: Point,
        remaining: usize,
        start: usize,
        chosen: &mut Vec<Point>,
    ) -> Result<Option<Vec<Point>>> {
        let n = self.nodes.get() + 1;
        self.nodes.set(n);
        if n > self.budget {
            return Err(Error::Inconclusive(format!("decomposition search exceeded {} nodes", self.budget)));
        }
        if remaining == 0 {
            return Ok(residual.iter().all(|&x| x == 0).then(|| chosen.clone()));
        }
        if !self.p.contains(&residual, remaining as u64) {
            return Ok(None);
        }
        for idx in start..self.points.len() {
            let u = &self.points[idx];
            chosen.push(u.clone());
            let found = self.dfs(sub(&residual, u), remaining - 1, idx, chosen)?;
            chosen.pop();
            if found.is_some() {
                return Ok(found);
            }
        }
        Ok(None)
    }

    fn ogata(&self, x: &[i64], i: usize, k: u64) -> Result<Vec<Point>> {
        let v = &self.p.vertices()[i];
        let target = add(x, &scaled(v, k as i64 - 1));
        self.find(&target, (2 * k - 1) as usize)?.ok_or_else(|| {
            Error::SearchExhausted(format!(
                "no {} points of P∩M sum to {target:?} in {}",
                2 * k - 1,
                self.p.label()
            ))
        })
    }

    fn weighted(&self, x: &[i64], a: &[u64], k: u64) -> Result<Vec<Point>> {
        if k == 1 {
            return Ok(vec![x.to_vec()]);
        }
        let i = a.iter().position(|&c| c > 0).expect("coefficients sum to k-1 > 0");
        let v = self.p.vertices()[i].clone();
        let u = self.ogata(x, i, k)?;
        // translated so that v sits at the origin, u_j - v ∈ P - v; a pair
        // (u_j, u_l) "fits" when u_j + u_l - v ∈ P.
        let fits = |j: usize, l: usize| self.p.contains(&sub(&add(&u[j], &u[l]), &v), 1);
        let pairs = (k - 1) as usize;
        let broken = (0..pairs).find(|&j| !fits(2 * j, 2 * j + 1));
        let mut parts = Vec::with_capacity((2 * k - 1) as usize);
        match broken {
            None => {
                for j in 0..pairs {
                    parts.push(sub(&add(&u[2 * j], &u[2 * j + 1]), &v));
                }
                parts.push(u[2 * pairs].clone());
                for (vertex, &c) in self.p.vertices().iter().zip(a) {
                    parts.extend(std::iter::repeat_n(vertex.clone(), c as usize));
                }
            }
            Some(j) => {
                let (ja, jb) = (2 * j, 2 * j + 1);
                let mut y = scaled(&v, -(k as i64 - 2));
                for (l, ul) in u.iter().enumerate() {
                    if l != ja && l != jb {
                        y = add(&y, ul);
                    }
                }
                if !self.p.contains(&y, k - 1) {
                    return Err(Error::InvariantViolation(format!(
                        "remainder {y:?} not in {}P for {}",
                        k - 1,
                        self.p.label()
                    )));
                }
                let mut a_rest = a.to_vec();
                a_rest[i] -= 1;
                parts.push(u[ja].clone());
                parts.push(u[jb].clone());
                parts.extend(self.weighted(&y, &a_rest, k - 1)?);
            }
        }
        Ok(parts)
    }
}

fn check_inputs(p: &LatticePolytope, x: &[i64], k: u64) -> Result<()> {
    if !p.is_simplex() {
        return Err(Error::NotSimplex);
    }
    if k == 0 {
        return Err(Error::InvalidArgument("k must be positive".into()));
    }
    if x.len() != p.dim() {
        return Err(Error::DimensionMismatch(format!("point {x:?} not in Z^{}", p.dim())));
    }
    if !p.contains(x, k) {
        return Err(Error::InvalidArgument(format!("{x:?} is not in {k}P")));
    }
    Ok(())
}

fn certificate(p: &LatticePolytope, k: u64, target: Point, mut parts: Vec<Point>) -> Result<DecompositionCertificate> {
    parts.sort();
    let c = DecompositionCertificate { polytope: p.clone(), k, target, parts };
    if !verify_certificate(&c) {
        return Err(Error::InvariantViolation(format!("produced an invalid certificate {c:?}")));
    }
    Ok(c)
}

/// Writes `x + (k-1) v_i` as a sum of `2k - 1` points of `P∩M`.
pub fn ogata_decompose(
    p: &LatticePolytope,
    x: &[i64],
    i: usize,
    k: u64,
    budget: u64,
) -> Result<DecompositionCertificate> {
    check_inputs(p, x, k)?;
    if i >= p.vertices().len() {
        return Err(Error::InvalidArgument(format!("vertex index {i} out of range")));
    }
    let search = Search::new(p, budget);
    let parts = search.ogata(x, i, k)?;
    let target = add(x, &scaled(&p.vertices()[i], k as i64 - 1));
    certificate(p, k, target, parts)
}

/// Writes `sum a_i v_i + x` as a sum of `2k - 1` points of `P∩M`, where the
/// `a_i` are nonnegative with `sum a_i = k - 1`.
pub fn weighted_decompose(
    p: &LatticePolytope,
    x: &[i64],
    a: &[u64],
    k: u64,
    budget: u64,
) -> Result<DecompositionCertificate> {
    check_inputs(p, x, k)?;
    if a.len() != p.vertices().len() {
        return Err(Error::DimensionMismatch(format!(
            "{} coefficients for {} vertices",
            a.len(),
            p.vertices().len()
        )));
    }
    if a.iter().sum::<u64>() != k - 1 {
        return Err(Error::InvalidArgument(format!("coefficients must sum to k - 1 = {}", k - 1)));
    }
    let search = Search::new(p, budget);
    let parts = search.weighted(x, a, k)?;
    let mut target = x.to_vec();
    for (v, &c) in p.vertices().iter().zip(a) {
        target = add(&target, &scaled(v, c as i64));
    }
    certificate(p, k, target, parts)
}
