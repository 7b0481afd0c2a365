//! Sumsets of lattice point sets and the k-normality invariants built on
//! them: `k_P`, `d_P` and `nu_P`, plus very-ampleness through Hilbert bases of
//! vertex cones (see [`hilbert`]).

pub mod hilbert;

use std::collections::{BTreeMap, HashSet};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::cache::{self, SetKind};
use crate::error::{Error, Result};
use crate::polytope::{LatticePolytope, Point, PointSet};

pub use hilbert::{hilbert_basis, hilbert_basis_simplicial, is_very_ample, vertex_cone, Cone, VertexWitness};

/// Dense grids above this many cells fall back to hashing.
const MAX_GRID_CELLS: u128 = 1 << 27;

/// `{a + b : a ∈ A, b ∈ B}` in canonical order. The dilation label of the
/// result is `a.k + b.k`.
pub fn sumset(a: &PointSet, b: &PointSet) -> PointSet {
    let k = a.k + b.k;
    if a.is_empty() || b.is_empty() {
        return PointSet::new(k, Vec::new());
    }
    let d = a.points()[0].len();
    let bounds = |s: &PointSet, j: usize| {
        let it = s.iter().map(|p| p[j]);
        (it.clone().min().expect("nonempty"), it.max().expect("nonempty"))
    };
    let lo: Vec<i64> = (0..d).map(|j| bounds(a, j).0 + bounds(b, j).0).collect();
    let hi: Vec<i64> = (0..d).map(|j| bounds(a, j).1 + bounds(b, j).1).collect();
    let cells = lo.iter().zip(&hi).map(|(l, h)| (h - l + 1) as u128).product::<u128>();
    if cells <= MAX_GRID_CELLS {
        grid_sumset(k, a, b, &lo, &hi)
    } else {
        let mut out = HashSet::with_capacity(a.len() * b.len());
        for x in a.iter() {
            for y in b.iter() {
                out.insert(add(x, y));
            }
        }
        PointSet::new(k, out.into_iter().collect())
    }
}

fn add(x: &[i64], y: &[i64]) -> Point {
    x.iter().zip(y).map(|(a, b)| a.checked_add(*b).expect("lattice overflow")).collect()
}

/// Marks sums in a row-major bitmap over the bounding box. Row-major order
/// with the first coordinate most significant is lexicographic order, so the
/// decoded points come out sorted.
fn grid_sumset(k: u64, a: &PointSet, b: &PointSet, lo: &[i64], hi: &[i64]) -> PointSet {
    let d = lo.len();
    let mut strides = vec![1usize; d];
    for j in (0..d.saturating_sub(1)).rev() {
        strides[j] = strides[j + 1] * (hi[j + 1] - lo[j + 1] + 1) as usize;
    }
    let cells = strides[0] * (hi[0] - lo[0] + 1) as usize;
    let offset = |p: &[i64], base: &[i64]| -> usize {
        p.iter().zip(base).zip(&strides).map(|((x, l), s)| (x - l) as usize * s).sum()
    };
    // index(x + y) = offset(x, lo_a) + offset(y, lo_b) with lo = lo_a + lo_b
    let lo_a: Vec<i64> = (0..d).map(|j| a.iter().map(|p| p[j]).min().expect("nonempty")).collect();
    let lo_b: Vec<i64> = lo.iter().zip(&lo_a).map(|(l, la)| l - la).collect();
    let ia: Vec<usize> = a.iter().map(|p| offset(p, &lo_a)).collect();
    let ib: Vec<usize> = b.iter().map(|p| offset(p, &lo_b)).collect();
    let mut mark = vec![false; cells];
    let mut count = 0usize;
    for &x in &ia {
        for &y in &ib {
            let cell = &mut mark[x + y];
            if !*cell {
                *cell = true;
                count += 1;
            }
        }
    }
    let mut points = Vec::with_capacity(count);
    for (idx, _) in mark.iter().enumerate().filter(|(_, &m)| m) {
        let mut rest = idx;
        let p: Point = (0..d)
            .map(|j| {
                let q = rest / strides[j];
                rest %= strides[j];
                lo[j] + q as i64
            })
            .collect();
        points.push(p);
    }
    PointSet::from_sorted(k, points)
}

/// `S_k = P∩M + ... + P∩M` (k summands), memoized.
pub fn k_fold_points(p: &LatticePolytope, k: u64) -> Arc<PointSet> {
    assert!(k >= 1, "k must be positive");
    if k == 1 {
        return p.lattice_points(1);
    }
    cache::get_or_compute(p.cache_key(SetKind::KFold, k), || {
        sumset(&k_fold_points(p, k - 1), &p.lattice_points(1))
    })
}

/// Whether the k-fold sumset of `P∩M` covers `kP∩M`.
pub fn is_k_normal(p: &LatticePolytope, k: u64) -> bool {
    let sums = k_fold_points(p, k);
    let full = p.lattice_points(k);
    debug_assert!(sums.is_subset(&full));
    sums.len() == full.len()
}

/// `(k+1)P∩M = P∩M + kP∩M`
fn d_identity(p: &LatticePolytope, k: u64) -> bool {
    sumset(&p.lattice_points(1), &p.lattice_points(k)).len() == p.lattice_points(k + 1).len()
}

/// `(k+1)P∩M = V + kP∩M`
fn nu_identity(p: &LatticePolytope, k: u64) -> bool {
    let vertices = PointSet::new(1, p.vertices().to_vec());
    sumset(&vertices, &p.lattice_points(k)).len() == p.lattice_points(k + 1).len()
}

/// Smallest `t >= 1` with `(k+1)P∩M = P∩M + kP∩M` for all `k >= t`.
///
/// The identity always holds for `k >= d - 1`, so scanning `[1, d-1]` decides
/// the answer; the range up to `cap` is re-checked and a failure there is an
/// internal error.
pub fn d_invariant(p: &LatticePolytope, cap: u64) -> Result<u64> {
    let guaranteed = (p.dim() as u64).saturating_sub(1).max(1);
    let upper = guaranteed.max(cap);
    let mut last_failure = 0;
    for k in 1..=upper {
        if !d_identity(p, k) {
            if k >= guaranteed {
                return Err(Error::InvariantViolation(format!(
                    "(k+1)P∩M ≠ P∩M + kP∩M at k = {k} >= d-1 for {}",
                    p.label()
                )));
            }
            last_failure = k;
        }
    }
    Ok(last_failure + 1)
}

/// Smallest `t` with `(k+1)P∩M = V + kP∩M` for all examined `k >= t`.
///
/// For simplices the identity holds for every `k >= d` (some barycentric
/// coordinate of a point of `(k+1)P` is at least 1), so the answer is exact.
/// For other polytopes the scan runs up to `max(d, cap)` and the result is
/// `None` unless the identity holds at the end of that window.
pub fn nu_invariant(p: &LatticePolytope, cap: u64) -> Result<Option<u64>> {
    let d = p.dim() as u64;
    let upper = d.max(cap);
    let mut last_failure = 0;
    for k in 1..=upper {
        if !nu_identity(p, k) {
            if p.is_simplex() && k >= d {
                return Err(Error::InvariantViolation(format!(
                    "(k+1)P∩M ≠ V + kP∩M at k = {k} >= d for simplex {}",
                    p.label()
                )));
            }
            last_failure = k;
        }
    }
    if last_failure == upper {
        return Ok(None);
    }
    Ok(Some(last_failure + 1))
}

/// Result of the k-normality scan.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThresholdScan {
    pub k_p: Option<u64>,
    pub per_k_normal: BTreeMap<u64, bool>,
}

/// Scans `j = 1, 2, ...` until some `j >= d_P` is j-normal; from there every
/// larger dilation is normal too, because `(j+1)P∩M = P∩M + jP∩M` for
/// `j >= d_P`. Gives `None` when no such `j <= cap` exists.
pub fn threshold_scan(p: &LatticePolytope, d_p: u64, cap: u64) -> ThresholdScan {
    let mut per_k_normal = BTreeMap::new();
    let mut last_failure = 0;
    for j in 1..=cap {
        let normal = is_k_normal(p, j);
        per_k_normal.insert(j, normal);
        if !normal {
            last_failure = j;
        } else if j >= d_p {
            return ThresholdScan { k_p: Some(last_failure + 1), per_k_normal };
        }
    }
    ThresholdScan { k_p: None, per_k_normal }
}

/// `k_P`: smallest k with P j-normal for all `j >= k`, or `None` if the scan
/// up to `cap` does not stabilize.
pub fn k_normality_threshold(p: &LatticePolytope, cap: u64) -> Result<Option<u64>> {
    if cap < p.dim() as u64 {
        return Err(Error::InvalidArgument(format!("cap {cap} below dimension {}", p.dim())));
    }
    let d_p = d_invariant(p, 1)?;
    Ok(threshold_scan(p, d_p, cap).k_p)
}

pub fn is_normal(p: &LatticePolytope) -> Result<bool> {
    Ok(k_normality_threshold(p, (p.dim() as u64).max(1))? == Some(1))
}

/// Scan limits. `k_cap` bounds the k-normality scan and the `nu_P` window
/// for non-simplices; `invariant_cap` bounds the re-check range of `d_P` and
/// of `nu_P` for simplices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Caps {
    pub k_cap: u64,
    pub invariant_cap: u64,
}

impl Caps {
    pub fn for_dim(d: usize) -> Self {
        let d = d as u64;
        Self { k_cap: (2 * d).max(12), invariant_cap: d }
    }

    pub fn with_k_cap(mut self, k_cap: Option<u64>) -> Self {
        if let Some(k) = k_cap {
            self.k_cap = k;
        }
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormalityProfile {
    pub per_k_normal: BTreeMap<u64, bool>,
    pub k_p: Option<u64>,
    pub d_p: Option<u64>,
    pub nu_p: Option<u64>,
    pub very_ample: bool,
    pub hilbert_witnesses: Vec<VertexWitness>,
}

impl NormalityProfile {
    pub fn is_normal(&self) -> bool {
        self.k_p == Some(1)
    }
}

pub fn normality_profile(p: &LatticePolytope, caps: Caps) -> Result<NormalityProfile> {
    let d = p.dim() as u64;
    let k_cap = caps.k_cap.max(d);
    let d_p = d_invariant(p, caps.invariant_cap)?;
    let nu_cap = if p.is_simplex() { caps.invariant_cap } else { k_cap };
    let nu_p = nu_invariant(p, nu_cap)?;
    let scan = threshold_scan(p, d_p, k_cap);
    let (very_ample, hilbert_witnesses) = is_very_ample(p)?;
    let profile = NormalityProfile {
        per_k_normal: scan.per_k_normal,
        k_p: scan.k_p,
        d_p: Some(d_p),
        nu_p,
        very_ample,
        hilbert_witnesses,
    };
    if let Some(k_p) = profile.k_p {
        let consistent = profile.per_k_normal.iter().all(|(&j, &n)| j < k_p || n)
            && (k_p == 1 || profile.per_k_normal.get(&(k_p - 1)) == Some(&false));
        if !consistent {
            return Err(Error::InvariantViolation(format!(
                "k_P = {k_p} inconsistent with per-k verdicts for {}",
                p.label()
            )));
        }
    }
    if let Some(nu) = nu_p {
        if d_p > nu {
            return Err(Error::InvariantViolation(format!(
                "d_P = {d_p} > nu_P = {nu} for {}",
                p.label()
            )));
        }
    }
    Ok(profile)
}
