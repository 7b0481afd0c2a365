//! Named polytope families and seeded random simplex corpora.
//!
//! A [`FamilySpec`] is written inline as `name:key=val,key=val` (values may be
//! inclusive ranges `a..b`), e.g. `bruns_gubeladze:s=4..8,l=1`, or nested as
//! `pyramid_of:l=2:rabinowitz_T:p=3`. The same spec has a JSON form
//! `{"family": "...", "params": {...}, "base": {...}}`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polytope::{LatticePolytope, Point};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    #[serde(rename = "standard_simplex")]
    StandardSimplex,
    #[serde(rename = "dilated_simplex")]
    DilatedSimplex,
    #[serde(rename = "rabinowitz_T")]
    RabinowitzT,
    #[serde(rename = "bruns_gubeladze")]
    BrunsGubeladze,
    #[serde(rename = "pyramid_of")]
    PyramidOf,
    #[serde(rename = "random_hnf_simplex")]
    RandomHnfSimplex,
}

impl Family {
    pub const ALL: [Family; 6] = [
        Family::StandardSimplex,
        Family::DilatedSimplex,
        Family::RabinowitzT,
        Family::BrunsGubeladze,
        Family::PyramidOf,
        Family::RandomHnfSimplex,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::StandardSimplex => "standard_simplex",
            Family::DilatedSimplex => "dilated_simplex",
            Family::RabinowitzT => "rabinowitz_T",
            Family::BrunsGubeladze => "bruns_gubeladze",
            Family::PyramidOf => "pyramid_of",
            Family::RandomHnfSimplex => "random_hnf_simplex",
        }
    }

    /// (required keys, optional keys with defaults)
    fn schema(self) -> (&'static [&'static str], &'static [(&'static str, u64)]) {
        match self {
            Family::StandardSimplex => (&["d"], &[("l", 0)]),
            Family::DilatedSimplex => (&["d", "c"], &[("l", 0)]),
            Family::RabinowitzT => (&["p"], &[("q", 1), ("l", 0)]),
            Family::BrunsGubeladze => (&["s"], &[("l", 0)]),
            Family::PyramidOf => (&["l"], &[]),
            Family::RandomHnfSimplex => (&["d", "max_det"], &[("seed", 0), ("count", 1), ("l", 0)]),
        }
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::InvalidFamily(format!("unknown family '{s}'")))
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Inclusive integer range; a single value has `lo == hi`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ParamRange {
    pub lo: u64,
    pub hi: u64,
}

impl ParamRange {
    pub fn single(v: u64) -> Self {
        Self { lo: v, hi: v }
    }
}

impl FromStr for ParamRange {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let num = |t: &str| {
            t.trim().parse::<u64>().map_err(|_| Error::InvalidFamily(format!("bad parameter value '{s}'")))
        };
        let range = match s.split_once("..") {
            Some((a, b)) => Self { lo: num(a)?, hi: num(b.strip_prefix('=').unwrap_or(b))? },
            None => Self::single(num(s)?),
        };
        if range.lo > range.hi {
            return Err(Error::InvalidFamily(format!("empty range '{s}'")));
        }
        Ok(range)
    }
}

impl fmt::Display for ParamRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.lo == self.hi {
            write!(f, "{}", self.lo)
        } else {
            write!(f, "{}..{}", self.lo, self.hi)
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum ParamRepr {
    Int(u64),
    Str(String),
}

impl Serialize for ParamRange {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.lo == self.hi {
            ParamRepr::Int(self.lo).serialize(s)
        } else {
            ParamRepr::Str(self.to_string()).serialize(s)
        }
    }
}

impl<'de> Deserialize<'de> for ParamRange {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        match ParamRepr::deserialize(d)? {
            ParamRepr::Int(v) => Ok(Self::single(v)),
            ParamRepr::Str(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilySpec {
    pub family: Family,
    #[serde(default)]
    pub params: BTreeMap<String, ParamRange>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base: Option<Box<FamilySpec>>,
}

/// A generated polytope with the seed that reproduces it, if random.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    pub polytope: LatticePolytope,
    pub seed: Option<u64>,
}

impl FamilySpec {
    pub fn new(family: Family, params: &[(&str, u64)]) -> Result<Self> {
        let spec = Self {
            family,
            params: params.iter().map(|&(k, v)| (k.to_string(), ParamRange::single(v))).collect(),
            base: None,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn pyramid_of(l: u64, base: FamilySpec) -> Result<Self> {
        let spec = Self {
            family: Family::PyramidOf,
            params: BTreeMap::from([("l".to_string(), ParamRange::single(l))]),
            base: Some(Box::new(base)),
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Accepts the inline syntax or a JSON object.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        let spec: Self = if s.starts_with('{') { serde_json::from_str(s)? } else { parse_inline(s)? };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let (required, optional) = self.family.schema();
        for key in self.params.keys() {
            if !required.contains(&key.as_str()) && !optional.iter().any(|(k, _)| k == key) {
                return Err(Error::InvalidFamily(format!("unknown key '{key}' for {}", self.family)));
            }
        }
        for key in required {
            if !self.params.contains_key(*key) {
                return Err(Error::InvalidFamily(format!("{} requires '{key}'", self.family)));
            }
        }
        match (self.family, &self.base) {
            (Family::PyramidOf, None) => {
                return Err(Error::InvalidFamily("pyramid_of requires a base family".into()));
            }
            (Family::PyramidOf, Some(base)) => base.validate()?,
            (_, Some(_)) => {
                return Err(Error::InvalidFamily(format!("{} takes no base family", self.family)));
            }
            _ => {}
        }
        Ok(())
    }

    /// Every assignment of the (possibly ranged) parameters, in key order.
    fn assignments(&self) -> Vec<BTreeMap<&'static str, u64>> {
        let (required, optional) = self.family.schema();
        let mut out = vec![BTreeMap::new()];
        let keys = required.iter().copied().map(|k| (k, None)).chain(optional.iter().map(|&(k, v)| (k, Some(v))));
        for (key, default) in keys {
            let range = match (self.params.get(key), default) {
                (Some(r), _) => *r,
                (None, Some(v)) => ParamRange::single(v),
                (None, None) => unreachable!("validated"),
            };
            out = out
                .into_iter()
                .flat_map(|m| {
                    (range.lo..=range.hi).map(move |v| {
                        let mut m = m.clone();
                        m.insert(key, v);
                        m
                    })
                })
                .collect();
        }
        out
    }
}

fn parse_params(s: &str) -> Result<BTreeMap<String, ParamRange>> {
    let mut params = BTreeMap::new();
    for item in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| Error::InvalidFamily(format!("expected key=value, got '{item}'")))?;
        if params.insert(k.trim().to_string(), v.parse()?).is_some() {
            return Err(Error::InvalidFamily(format!("duplicate key '{k}'")));
        }
    }
    Ok(params)
}

fn parse_inline(s: &str) -> Result<FamilySpec> {
    let (name, rest) = s.split_once(':').unwrap_or((s, ""));
    let family: Family = name.trim().parse()?;
    if family == Family::PyramidOf {
        let (params, base) = rest
            .split_once(':')
            .ok_or_else(|| Error::InvalidFamily("expected pyramid_of:l=N:<base family>".into()))?;
        return Ok(FamilySpec { family, params: parse_params(params)?, base: Some(Box::new(parse_inline(base)?)) });
    }
    if rest.contains(':') {
        return Err(Error::InvalidFamily(format!("unexpected ':' in '{s}'")));
    }
    Ok(FamilySpec { family, params: parse_params(rest)?, base: None })
}

impl FromStr for FamilySpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let params: Vec<String> = self.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
        write!(f, "{}:{}", self.family, params.join(","))?;
        if let Some(base) = &self.base {
            write!(f, ":{base}")?;
        }
        Ok(())
    }
}

fn unit(d: usize, i: usize) -> Point {
    let mut e = vec![0; d];
    e[i] = 1;
    e
}

pub fn standard_simplex(d: usize) -> Result<LatticePolytope> {
    if d < 1 {
        return Err(Error::InvalidFamily("standard_simplex requires d >= 1".into()));
    }
    let mut vertices = vec![vec![0; d]];
    vertices.extend((0..d).map(|i| unit(d, i)));
    LatticePolytope::new(d, vertices, Some(format!("Delta_{d}")))
}

pub fn dilated_simplex(d: usize, c: u64) -> Result<LatticePolytope> {
    if c < 1 {
        return Err(Error::InvalidFamily("dilated_simplex requires c >= 1".into()));
    }
    standard_simplex(d)?.dilate(c)
}

/// `T_{p,1} = conv(0, (p,0), (0,1))` or `T_{2,2} = conv(0, (2,0), (0,2))`.
pub fn rabinowitz_t(p: u64, q: u64) -> Result<LatticePolytope> {
    let valid = (p >= 1 && q == 1) || (p == 2 && q == 2);
    if !valid {
        return Err(Error::InvalidFamily(format!("rabinowitz_T needs q = 1 or p = q = 2, got ({p}, {q})")));
    }
    let p = i64::try_from(p).map_err(|_| Error::Overflow)?;
    let q = q as i64;
    LatticePolytope::new(2, vec![vec![0, 0], vec![p, 0], vec![0, q]], Some(format!("T_{{{p},{q}}}")))
}

/// The 3-polytope with vertices `0, e1, e2, e3, e1+e3, e2+e3, (1,1,s), (1,1,s+1)`.
pub fn bruns_gubeladze(s: u64) -> Result<LatticePolytope> {
    if s < 4 {
        return Err(Error::InvalidFamily(format!("bruns_gubeladze requires s >= 4, got {s}")));
    }
    let s = i64::try_from(s).map_err(|_| Error::Overflow)?;
    let vertices = vec![
        vec![0, 0, 0],
        vec![1, 0, 0],
        vec![0, 1, 0],
        vec![0, 0, 1],
        vec![1, 0, 1],
        vec![0, 1, 1],
        vec![1, 1, s],
        vec![1, 1, s + 1],
    ];
    LatticePolytope::new(3, vertices, Some(format!("P_{s}")))
}

fn divisors(n: u64) -> Vec<u64> {
    (1..=n).filter(|&k| n.is_multiple_of(k)).collect()
}

/// `conv(0, rows of H)` for a random lower-triangular Hermite normal form `H`
/// with `det H <= max_det`: the determinant is drawn uniformly from
/// `[1, max_det]`, split into an ordered factorization along the diagonal,
/// and each entry left of a pivot is drawn from `[0, pivot of its column)`.
pub fn random_hnf_simplex(d: usize, max_det: u64, seed: u64) -> Result<LatticePolytope> {
    if d < 2 || max_det < 1 {
        return Err(Error::InvalidFamily("random_hnf_simplex requires d >= 2 and max_det >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut remaining = rng.random_range(1..=max_det);
    let mut pivots = Vec::with_capacity(d);
    for _ in 0..d - 1 {
        let ds = divisors(remaining);
        let p = ds[rng.random_range(0..ds.len())];
        pivots.push(p);
        remaining /= p;
    }
    pivots.push(remaining);
    let mut rows = Vec::with_capacity(d);
    for r in 0..d {
        let mut row = vec![0i64; d];
        for c in 0..r {
            row[c] = rng.random_range(0..pivots[c]) as i64;
        }
        row[r] = pivots[r] as i64;
        rows.push(row);
    }
    let mut vertices = vec![vec![0; d]];
    vertices.extend(rows);
    LatticePolytope::new(d, vertices, Some(format!("hnf(d={d},max_det={max_det},seed={seed})")))
}

fn usize_of(v: u64) -> Result<usize> {
    usize::try_from(v).map_err(|_| Error::Overflow)
}

pub fn generate_instances(spec: &FamilySpec) -> Result<Vec<Instance>> {
    spec.validate()?;
    let mut out = Vec::new();
    for a in spec.assignments() {
        let plain = |p: LatticePolytope| Instance { polytope: p, seed: None };
        let mut batch = match spec.family {
            Family::StandardSimplex => vec![plain(standard_simplex(usize_of(a["d"])?)?)],
            Family::DilatedSimplex => vec![plain(dilated_simplex(usize_of(a["d"])?, a["c"])?)],
            Family::RabinowitzT => vec![plain(rabinowitz_t(a["p"], a["q"])?)],
            Family::BrunsGubeladze => vec![plain(bruns_gubeladze(a["s"])?)],
            Family::PyramidOf => generate_instances(spec.base.as_deref().expect("validated"))?,
            Family::RandomHnfSimplex => (0..a["count"])
                .map(|i| {
                    let seed = a["seed"].wrapping_add(i);
                    let polytope = random_hnf_simplex(usize_of(a["d"])?, a["max_det"], seed)?;
                    Ok(Instance { polytope, seed: Some(seed) })
                })
                .collect::<Result<_>>()?,
        };
        let l = usize_of(a["l"])?;
        if l > 0 {
            for inst in &mut batch {
                inst.polytope = inst.polytope.pyramid(l)?;
            }
        }
        out.extend(batch);
    }
    Ok(out)
}

pub fn generate(spec: &FamilySpec) -> Result<Vec<LatticePolytope>> {
    Ok(generate_instances(spec)?.into_iter().map(|i| i.polytope).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ehrhart;
    use crate::semigroup::{normality_profile, Caps};

    #[test]
    fn simplices() {
        let seg = standard_simplex(1).unwrap();
        assert_eq!(seg.vertices(), &[vec![0], vec![1]]);
        assert_eq!(standard_simplex(4).unwrap().vertices().len(), 5);
        assert!(standard_simplex(0).is_err());
        let p = generate(&FamilySpec::parse("dilated_simplex:d=4,c=2").unwrap()).unwrap();
        assert_eq!(p.len(), 1);
        assert_eq!(p[0].name(), Some("2Delta_4"));
        assert_eq!(p[0].vertices()[4], vec![0, 0, 0, 2]);
    }

    #[test]
    fn rabinowitz() {
        assert_eq!(rabinowitz_t(1, 1).unwrap().vertices(), standard_simplex(2).unwrap().vertices());
        let t31 = rabinowitz_t(3, 1).unwrap();
        assert_eq!(t31.lattice_points(1).len(), 5);
        assert_eq!(t31.normalized_volume_simplex().unwrap(), 3);
        let t22 = rabinowitz_t(2, 2).unwrap();
        assert!(t22.is_hollow());
        assert_eq!(t22.normalized_volume_simplex().unwrap(), 4);
        assert!(rabinowitz_t(3, 2).is_err());
        assert!(rabinowitz_t(0, 1).is_err());
    }

    #[test]
    fn bg_family() {
        let p = bruns_gubeladze(5).unwrap();
        assert_eq!(p.vertices()[7], vec![1, 1, 6]);
        assert!(!p.is_simplex());
        assert!(bruns_gubeladze(3).is_err());
        let pyr = generate(&FamilySpec::parse("bruns_gubeladze:s=4,l=1").unwrap()).unwrap();
        assert_eq!(pyr[0].dim(), 4);
        assert_eq!(pyr[0].vertices().len(), 9);
        assert_eq!(pyr[0].vertices()[0], vec![0, 0, 0, 0]);
        assert_eq!(pyr[0].vertices()[8], vec![1, 1, 5, 1]);
    }

    #[test]
    fn inline_syntax() {
        let s = FamilySpec::parse("pyramid_of:l=2:rabinowitz_T:p=3").unwrap();
        assert_eq!(s.family, Family::PyramidOf);
        assert_eq!(s.base.as_ref().unwrap().family, Family::RabinowitzT);
        let ps = generate(&s).unwrap();
        assert_eq!(ps[0].dim(), 4);
        assert_eq!(ps[0].name(), Some("pyr(pyr(T_{3,1}))"));
        assert_eq!(s.to_string(), "pyramid_of:l=2:rabinowitz_T:p=3");
        assert_eq!(FamilySpec::parse(&s.to_string()).unwrap(), s);

        let range = FamilySpec::parse("bruns_gubeladze:s=4..8").unwrap();
        assert_eq!(generate(&range).unwrap().len(), 5);

        for bad in [
            "bruns_gubeladze:s=4,t=1",
            "bruns_gubeladze",
            "nonsense:d=1",
            "standard_simplex:d=x",
            "standard_simplex:d=3..2",
            "pyramid_of:l=1",
            "standard_simplex:d=2:extra",
        ] {
            assert!(matches!(FamilySpec::parse(bad), Err(Error::InvalidFamily(_))), "{bad}");
        }
        assert!(generate(&FamilySpec::parse("bruns_gubeladze:s=3").unwrap()).is_err());
    }

    #[test]
    fn json_syntax() {
        let s = FamilySpec::parse(r#"{"family":"pyramid_of","params":{"l":1},"base":{"family":"bruns_gubeladze","params":{"s":"4..5"}}}"#)
            .unwrap();
        assert_eq!(s.to_string(), "pyramid_of:l=1:bruns_gubeladze:s=4..5");
        let back: FamilySpec = serde_json::from_str(&serde_json::to_string(&s).unwrap()).unwrap();
        assert_eq!(back, s);
        assert!(FamilySpec::parse(r#"{"family":"standard_simplex","params":{"d":2,"x":1}}"#).is_err());
    }

    #[test]
    fn random_simplices() {
        let a = random_hnf_simplex(3, 30, 7).unwrap();
        assert_eq!(a, random_hnf_simplex(3, 30, 7).unwrap());
        let u = random_hnf_simplex(2, 1, 99).unwrap();
        assert_eq!(u.normalized_volume_simplex().unwrap(), 1);
        for seed in 0..200 {
            let p = random_hnf_simplex(4, 30, seed).unwrap();
            let pivots: u64 = (1..=4).map(|i| p.vertices()[i][i - 1] as u64).product();
            assert!(pivots <= 30);
            assert_eq!(p.normalized_volume_simplex().unwrap(), pivots);
            assert_eq!(ehrhart::normalized_volume(&p).unwrap(), pivots);
        }
        let spec = FamilySpec::parse("random_hnf_simplex:d=3,max_det=20,seed=5,count=4").unwrap();
        let inst = generate_instances(&spec).unwrap();
        assert_eq!(inst.iter().map(|i| i.seed).collect::<Vec<_>>(), vec![Some(5), Some(6), Some(7), Some(8)]);
        assert_eq!(inst[2].polytope, random_hnf_simplex(3, 20, 7).unwrap());
    }

    #[test]
    fn hollow_pyramids_are_normal() {
        for base in [rabinowitz_t(3, 1).unwrap(), rabinowitz_t(2, 2).unwrap()] {
            let vol = base.normalized_volume_simplex().unwrap();
            for l in 1..=2 {
                let p = base.pyramid(l).unwrap();
                assert!(p.is_hollow());
                assert_eq!(ehrhart::normalized_volume(&p).unwrap(), vol);
                let prof = normality_profile(&p, Caps::for_dim(p.dim())).unwrap();
                assert!(prof.very_ample && prof.is_normal());
            }
        }
    }
}
