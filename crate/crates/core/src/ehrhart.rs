//! Ehrhart counting, the `h*`-vector, polytope degree and normalized volume.

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polytope::LatticePolytope;

/// Numerator coefficients `h*_0, ..., h*_d` of the Ehrhart series.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct HStarVector(Vec<u64>);

impl HStarVector {
    pub fn new(coefficients: Vec<u64>) -> Result<Self> {
        if coefficients.first() != Some(&1) {
            return Err(Error::InvariantViolation(format!(
                "h*_0 must be 1, got {coefficients:?}"
            )));
        }
        Ok(Self(coefficients))
    }

    pub fn coefficients(&self) -> &[u64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len() - 1
    }

    pub fn volume(&self) -> u64 {
        self.0.iter().sum()
    }

    /// Index of the last nonzero coefficient.
    pub fn degree(&self) -> usize {
        self.0.iter().rposition(|&h| h != 0).unwrap_or(0)
    }

    /// Evaluates `ehr(k) = sum_i h*_i C(k - i + d, d)`.
    pub fn ehrhart_value(&self, k: u64) -> BigInt {
        let d = self.dim() as u64;
        self.0
            .iter()
            .enumerate()
            .filter(|&(i, _)| k + d >= i as u64)
            .map(|(i, &h)| BigInt::from(h) * binomial(k + d - i as u64, d))
            .sum()
    }
}

fn binomial(n: u64, r: u64) -> BigInt {
    if r > n {
        return BigInt::zero();
    }
    let r = r.min(n - r);
    (0..r).fold(BigInt::from(1), |acc, i| acc * (n - i) / (i + 1))
}

/// `[ehr(0), ehr(1), ..., ehr(upto)]` by direct enumeration.
pub fn ehrhart_counts(p: &LatticePolytope, upto: u64) -> Vec<u64> {
    std::iter::once(1)
        .chain((1..=upto).map(|k| p.lattice_points(k).len() as u64))
        .collect()
}

/// Binomial transform of the first `d + 1` Ehrhart counts.
pub fn h_star(p: &LatticePolytope) -> Result<HStarVector> {
    let d = p.dim() as u64;
    let counts = ehrhart_counts(p, d);
    let mut coefficients = Vec::with_capacity(d as usize + 1);
    for i in 0..=d {
        let mut h = BigInt::zero();
        for j in 0..=i {
            let term = binomial(d + 1, j) * counts[(i - j) as usize];
            if j % 2 == 0 {
                h += term;
            } else {
                h -= term;
            }
        }
        let h = h.to_u64().ok_or_else(|| {
            Error::InvariantViolation(format!("negative h*_{i} = {h} for {}", p.label()))
        })?;
        coefficients.push(h);
    }
    HStarVector::new(coefficients)
}

/// Degree of `P` from the interior lattice points of its dilations:
/// `d + 1 - min{k : (kP)^0 ∩ M ≠ ∅}`.
pub fn degree_from_interiors(p: &LatticePolytope) -> Result<usize> {
    let d = p.dim();
    (1..=d + 1)
        .find(|&k| !p.interior_lattice_points(k as u64).is_empty())
        .map(|k| d + 1 - k)
        .ok_or_else(|| {
            Error::InvariantViolation(format!("(d+1)P has no interior point for {}", p.label()))
        })
}

/// Degree of the `h*`-polynomial, cross-checked against the interior-point
/// characterization.
pub fn degree(p: &LatticePolytope) -> Result<usize> {
    let from_h = h_star(p)?.degree();
    let from_interiors = degree_from_interiors(p)?;
    if from_h != from_interiors {
        return Err(Error::InvariantViolation(format!(
            "degree mismatch for {}: h* gives {from_h}, interiors give {from_interiors}",
            p.label()
        )));
    }
    Ok(from_h)
}

/// Sum of the `h*`-vector; for simplices also checked against the determinant.
pub fn normalized_volume(p: &LatticePolytope) -> Result<u64> {
    let vol = h_star(p)?.volume();
    if p.is_simplex() {
        let det = p.normalized_volume_simplex()?;
        if det != vol {
            return Err(Error::InvariantViolation(format!(
                "h* sum {vol} differs from determinant {det} for {}",
                p.label()
            )));
        }
    }
    Ok(vol)
}

/// Checks `h*_0 = 1`, `h*_1 = |P∩M| - d - 1`, `h*_d = |P^0∩M|` and, for
/// simplices, `sum h* = Vol`.
pub fn check_h_star_identities(p: &LatticePolytope, h: &HStarVector) -> Result<()> {
    let d = p.dim();
    let c = h.coefficients();
    let n = p.lattice_points(1).len() as u64;
    let interior = p.interior_lattice_points(1).len() as u64;
    let fail = |what: &str| {
        Err(Error::InvariantViolation(format!("{what} fails for {} (h* = {c:?})", p.label())))
    };
    if c.len() != d + 1 || c[0] != 1 {
        return fail("h*_0 = 1");
    }
    if c[1] + d as u64 + 1 != n {
        return fail("h*_1 = |P∩M| - d - 1");
    }
    if c[d] != interior {
        return fail("h*_d = |P^0∩M|");
    }
    if p.is_simplex() && h.volume() != p.normalized_volume_simplex()? {
        return fail("sum h* = Vol");
    }
    Ok(())
}

/// Newton forward-difference interpolation through `ehr(0..=d)`, evaluated
/// at `k`.
pub fn interpolate(counts: &[u64], k: u64) -> BigInt {
    let mut diffs: Vec<BigInt> = counts.iter().map(|&c| BigInt::from(c)).collect();
    let mut leading = Vec::with_capacity(counts.len());
    while !diffs.is_empty() {
        leading.push(diffs[0].clone());
        diffs = diffs.windows(2).map(|w| &w[1] - &w[0]).collect();
    }
    leading
        .iter()
        .enumerate()
        .map(|(j, delta)| delta * binomial(k, j as u64))
        .sum()
}

/// The degree-`d` polynomial through `ehr(0..=d)` reproduces direct counts up
/// to `upto`; also checks the `h*` evaluation formula.
pub fn check_interpolation(p: &LatticePolytope, upto: u64) -> Result<()> {
    let d = p.dim();
    let counts = ehrhart_counts(p, upto.max(d as u64));
    let h = h_star(p)?;
    for (k, &c) in counts.iter().enumerate() {
        let k = k as u64;
        let by_newton = interpolate(&counts[..=d], k);
        let by_h_star = h.ehrhart_value(k);
        if by_newton != BigInt::from(c) || by_h_star != BigInt::from(c) {
            return Err(Error::InvariantViolation(format!(
                "ehr({k}) = {c} but interpolation gives {by_newton} / {by_h_star} for {}",
                p.label()
            )));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Point;

    fn poly(vs: &[&[i64]]) -> LatticePolytope {
        let vs: Vec<Point> = vs.iter().map(|v| v.to_vec()).collect();
        LatticePolytope::new(vs[0].len(), vs, None).unwrap()
    }

    fn std_simplex(d: usize) -> LatticePolytope {
        let mut vs = vec![vec![0; d]];
        for i in 0..d {
            let mut e = vec![0; d];
            e[i] = 1;
            vs.push(e);
        }
        LatticePolytope::new(d, vs, None).unwrap()
    }

    #[test]
    fn counts() {
        assert_eq!(ehrhart_counts(&std_simplex(2), 2), vec![1, 3, 6]);
        assert_eq!(ehrhart_counts(&poly(&[&[0, 0], &[2, 0], &[0, 2]]), 2), vec![1, 6, 15]);
        assert_eq!(ehrhart_counts(&poly(&[&[0, 0], &[2, 0], &[0, 1]]), 2), vec![1, 4, 9]);
    }

    #[test]
    fn h_star_examples() {
        assert_eq!(h_star(&std_simplex(2)).unwrap().coefficients(), &[1, 0, 0]);
        let t22 = poly(&[&[0, 0], &[2, 0], &[0, 2]]);
        assert_eq!(h_star(&t22).unwrap().coefficients(), &[1, 3, 0]);
        let t21 = poly(&[&[0, 0], &[2, 0], &[0, 1]]);
        assert_eq!(h_star(&t21).unwrap().coefficients(), &[1, 1, 0]);
    }

    #[test]
    fn degree_examples() {
        assert_eq!(degree(&std_simplex(4).dilate(2).unwrap()).unwrap(), 2);
        for d in 2..=6u64 {
            // h*(2Δ_d)_i = C(d+1, 2i)
            let expect: Vec<u64> =
                (0..=d).map(|i| binomial(d + 1, 2 * i).to_u64().unwrap()).collect();
            let p = std_simplex(d as usize).dilate(2).unwrap();
            assert_eq!(h_star(&p).unwrap().coefficients(), expect.as_slice());
            assert_eq!(degree(&p).unwrap(), (d as usize).div_ceil(2));
            assert_eq!(degree(&std_simplex(d as usize)).unwrap(), 0);
        }
        assert_eq!(degree(&poly(&[&[0, 0], &[2, 0], &[0, 2]])).unwrap(), 1);
        assert_eq!(degree(&std_simplex(2).dilate(3).unwrap()).unwrap(), 2);
    }

    #[test]
    fn volumes() {
        assert_eq!(normalized_volume(&std_simplex(3)).unwrap(), 1);
        assert_eq!(normalized_volume(&poly(&[&[0, 0], &[2, 0], &[0, 2]])).unwrap(), 4);
        let square = poly(&[&[0, 0], &[1, 0], &[0, 1], &[1, 1]]);
        assert_eq!(normalized_volume(&square).unwrap(), 2);
    }

    #[test]
    fn segment_identities() {
        let seg = poly(&[&[0], &[3]]);
        let h = h_star(&seg).unwrap();
        assert_eq!(h.coefficients(), &[1, 2]);
        check_h_star_identities(&seg, &h).unwrap();
    }

    #[test]
    fn interpolation_reproduces_counts() {
        let t = poly(&[&[0, 0, 0], &[1, 0, 0], &[0, 1, 0], &[1, 1, 3]]);
        check_interpolation(&t, 8).unwrap();
        assert_eq!(interpolate(&[1, 3, 6], 3), BigInt::from(10));
    }

    #[test]
    fn pyramid_preserves_h_star() {
        let t22 = poly(&[&[0, 0], &[2, 0], &[0, 2]]);
        let h = h_star(&t22).unwrap();
        let hp = h_star(&t22.pyramid(1).unwrap()).unwrap();
        let mut padded = h.coefficients().to_vec();
        padded.push(0);
        assert_eq!(hp.coefficients(), padded.as_slice());
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(4, 2), BigInt::from(6));
        assert_eq!(binomial(2, 3), BigInt::zero());
        assert_eq!(binomial(10, 0), BigInt::from(1));
    }
}
