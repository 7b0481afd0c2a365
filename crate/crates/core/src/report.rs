//! Full analysis of a polytope, the bound checks relating its invariants, and
//! batch runs over family corpora.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ehrhart::{self, HStarVector};
use crate::error::{Error, Result};
use crate::families::{generate_instances, FamilySpec, Instance};
use crate::polytope::{LatticePolytope, Point};
use crate::semigroup::{normality_profile, Caps, VertexWitness};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum BoundId {
    /// reg ≤ deg_X − codim_X + 1 (an open question; recorded, never asserted)
    EgConj,
    /// reg ≤ deg_X − codim_X + ⌊d/2⌋
    ThmMain,
    /// k_P ≤ ν_P + d_P − 1
    PropKpNuD,
    /// k_P ≤ Vol − |P∩M| + d + ⌊d/2⌋
    PropKpFloor,
    /// deg(P) ≤ Vol − |P∩M| + d + 1
    Hkn,
    /// ν_P ≤ deg(P)
    NuLeDeg,
    /// reg ≤ deg_X − codim_X + 1 for non-hollow simplices
    NonhollowEg,
    /// 2 ≤ h*_1 ≤ h*_i for 1 ≤ i ≤ d − 1
    Hibi,
}

impl BoundId {
    pub const ALL: [BoundId; 8] = [
        BoundId::EgConj,
        BoundId::ThmMain,
        BoundId::PropKpNuD,
        BoundId::PropKpFloor,
        BoundId::Hkn,
        BoundId::NuLeDeg,
        BoundId::NonhollowEg,
        BoundId::Hibi,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            BoundId::EgConj => "EG_CONJ",
            BoundId::ThmMain => "THM_MAIN",
            BoundId::PropKpNuD => "PROP_KP_NU_D",
            BoundId::PropKpFloor => "PROP_KP_FLOOR",
            BoundId::Hkn => "HKN",
            BoundId::NuLeDeg => "NU_LE_DEG",
            BoundId::NonhollowEg => "NONHOLLOW_EG",
            BoundId::Hibi => "HIBI",
        }
    }

    /// Observations are reported but a failure is not a violation.
    pub fn is_observation(self) -> bool {
        self == BoundId::EgConj
    }
}

impl fmt::Display for BoundId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One bound evaluation. `lhs`/`rhs` are recorded whenever their inputs are
/// defined; `holds` only when the bound is applicable.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub id: BoundId,
    pub applicable: bool,
    pub holds: Option<bool>,
    pub lhs: Option<i64>,
    pub rhs: Option<i64>,
}

impl BoundCheck {
    pub fn verdict(&self) -> &'static str {
        match self.holds {
            Some(true) => "holds",
            Some(false) => "fails",
            None => "NA",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub name: String,
    pub vertices: Vec<Point>,
    pub seed: Option<u64>,
    pub d: usize,
    pub n_points: u64,
    pub n_interior: u64,
    pub vol: u64,
    pub h_star: HStarVector,
    pub degree: usize,
    pub hollow: bool,
    pub fano: bool,
    pub simplex: bool,
    pub very_ample: bool,
    pub d_p: Option<u64>,
    pub nu_p: Option<u64>,
    pub k_p: Option<u64>,
    /// `max{k_P, deg(P)} + 1`
    pub reg: Option<u64>,
    pub deg_x: u64,
    pub codim_x: u64,
    /// `reg − (deg_X − codim_X + 1)`
    pub eg_gap: Option<i64>,
    pub per_k_normal: BTreeMap<u64, bool>,
    pub witnesses: Vec<VertexWitness>,
    pub caps: Caps,
    pub bounds: Vec<BoundCheck>,
}

impl AnalysisReport {
    pub fn is_normal(&self) -> bool {
        self.k_p == Some(1)
    }

    pub fn bound(&self, id: BoundId) -> &BoundCheck {
        self.bounds.iter().find(|b| b.id == id).expect("every bound is evaluated")
    }

    /// Applicable, non-observational bounds that fail.
    pub fn violations(&self) -> Vec<&BoundCheck> {
        self.bounds.iter().filter(|b| b.holds == Some(false) && !b.id.is_observation()).collect()
    }
}

fn as_i64(x: u64) -> i64 {
    i64::try_from(x).expect("invariant fits in i64")
}

pub fn analyze(p: &LatticePolytope, caps: Caps) -> Result<AnalysisReport> {
    analyze_with_seed(p, caps, None)
}

pub fn analyze_instance(inst: &Instance, caps: Caps) -> Result<AnalysisReport> {
    analyze_with_seed(&inst.polytope, caps, inst.seed)
}

pub fn analyze_with_seed(p: &LatticePolytope, caps: Caps, seed: Option<u64>) -> Result<AnalysisReport> {
    let d = p.dim();
    let h = ehrhart::h_star(p)?;
    ehrhart::check_h_star_identities(p, &h)?;
    ehrhart::check_interpolation(p, 2 * d as u64 + 2)?;
    let degree = ehrhart::degree(p)?;
    let vol = ehrhart::normalized_volume(p)?;
    let n_points = p.lattice_points(1).len() as u64;
    let n_interior = p.interior_lattice_points(1).len() as u64;
    let profile = normality_profile(p, caps)?;
    let codim_x = n_points
        .checked_sub(d as u64 + 1)
        .ok_or_else(|| Error::InvariantViolation(format!("|P∩M| < d + 1 for {}", p.label())))?;
    let reg = profile.k_p.map(|k| k.max(degree as u64) + 1);
    let eg_gap = reg.map(|r| as_i64(r) - (as_i64(vol) - as_i64(codim_x) + 1));
    let mut report = AnalysisReport {
        name: p.label(),
        vertices: p.vertices().to_vec(),
        seed,
        d,
        n_points,
        n_interior,
        vol,
        h_star: h,
        degree,
        hollow: n_interior == 0,
        fano: p.is_fano(),
        simplex: p.is_simplex(),
        very_ample: profile.very_ample,
        d_p: profile.d_p,
        nu_p: profile.nu_p,
        k_p: profile.k_p,
        reg,
        deg_x: vol,
        codim_x,
        eg_gap,
        per_k_normal: profile.per_k_normal,
        witnesses: profile.hilbert_witnesses,
        caps,
        bounds: Vec::new(),
    };
    report.bounds = check_bounds(&report);
    Ok(report)
}

fn check(id: BoundId, applicable: bool, lhs: Option<i64>, rhs: Option<i64>) -> BoundCheck {
    let (applicable, holds) = match (lhs, rhs) {
        (Some(l), Some(r)) if applicable => (true, Some(l <= r)),
        _ => (false, None),
    };
    BoundCheck { id, applicable, holds, lhs, rhs }
}

pub fn check_bounds(r: &AnalysisReport) -> Vec<BoundCheck> {
    let d = as_i64(r.d as u64);
    let vol = as_i64(r.vol);
    let n = as_i64(r.n_points);
    let deg = as_i64(r.degree as u64);
    let half = d / 2;
    let k_p = r.k_p.map(as_i64);
    let reg = r.reg.map(as_i64);
    let eg_rhs = as_i64(r.deg_x) - as_i64(r.codim_x) + 1;
    let va_simplex = r.very_ample && r.simplex;
    let h = r.h_star.coefficients();

    let hibi = {
        let h1 = h.get(1).copied().map(as_i64);
        let min_rest = h[1..(r.d).max(2)].iter().copied().min().map(as_i64);
        let applicable = !r.hollow && n >= d + 3;
        let holds = match (h1, min_rest) {
            (Some(l), Some(m)) if applicable => Some(2 <= l && l <= m),
            _ => None,
        };
        BoundCheck { id: BoundId::Hibi, applicable, holds, lhs: h1, rhs: min_rest }
    };

    vec![
        check(BoundId::EgConj, true, reg, Some(eg_rhs)),
        check(BoundId::ThmMain, va_simplex, reg, Some(as_i64(r.deg_x) - as_i64(r.codim_x) + half)),
        check(BoundId::PropKpNuD, va_simplex, k_p, r.nu_p.zip(r.d_p).map(|(nu, dp)| as_i64(nu) + as_i64(dp) - 1)),
        check(BoundId::PropKpFloor, va_simplex, k_p, Some(vol - n + d + half)),
        check(BoundId::Hkn, true, Some(deg), Some(vol - n + d + 1)),
        check(BoundId::NuLeDeg, r.simplex && r.vol > 1, r.nu_p.map(as_i64), Some(deg)),
        check(BoundId::NonhollowEg, va_simplex && !r.hollow, reg, Some(eg_rhs)),
        hibi,
    ]
}

fn opt<T: fmt::Display>(v: &Option<T>) -> String {
    v.as_ref().map_or_else(|| "undefined".to_string(), T::to_string)
}

fn join<T: fmt::Display>(xs: &[T], sep: &str) -> String {
    xs.iter().map(T::to_string).collect::<Vec<_>>().join(sep)
}

fn point(p: &[i64]) -> String {
    format!("({})", join(p, ","))
}

/// Plain-text rendering carrying every field of the JSON form.
pub fn render_human(r: &AnalysisReport) -> String {
    let mut s = String::new();
    let vertices: Vec<String> = r.vertices.iter().map(|v| point(v)).collect();
    let per_k: Vec<String> = r.per_k_normal.iter().map(|(k, n)| format!("{k}:{}", if *n { "yes" } else { "no" })).collect();
    let _ = writeln!(s, "name          {}", r.name);
    let _ = writeln!(s, "vertices      {}", vertices.join(" "));
    let _ = writeln!(s, "seed          {}", opt(&r.seed));
    let _ = writeln!(s, "d             {}", r.d);
    let _ = writeln!(s, "|P∩M|         {}", r.n_points);
    let _ = writeln!(s, "|P°∩M|        {}", r.n_interior);
    let _ = writeln!(s, "Vol           {}", r.vol);
    let _ = writeln!(s, "h*            ({})", join(r.h_star.coefficients(), ","));
    let _ = writeln!(s, "deg(P)        {}", r.degree);
    let _ = writeln!(s, "hollow        {}", r.hollow);
    let _ = writeln!(s, "fano          {}", r.fano);
    let _ = writeln!(s, "simplex       {}", r.simplex);
    let _ = writeln!(s, "very_ample    {}", r.very_ample);
    let _ = writeln!(s, "d_P           {}", opt(&r.d_p));
    let _ = writeln!(s, "nu_P          {}", opt(&r.nu_p));
    let _ = writeln!(s, "k_P           {}", opt(&r.k_p));
    let _ = writeln!(s, "reg           {}", opt(&r.reg));
    let _ = writeln!(s, "deg_X         {}", r.deg_x);
    let _ = writeln!(s, "codim_X       {}", r.codim_x);
    let _ = writeln!(s, "eg_gap        {}", opt(&r.eg_gap));
    let _ = writeln!(s, "k-normal      {}", per_k.join(" "));
    let _ = writeln!(s, "caps          k_cap={} invariant_cap={}", r.caps.k_cap, r.caps.invariant_cap);
    for w in &r.witnesses {
        let missing: Vec<String> = w.missing.iter().map(|m| point(m)).collect();
        let _ = writeln!(s, "witness       vertex {} missing {}", point(&w.vertex), missing.join(" "));
    }
    let _ = writeln!(s, "bounds");
    for b in &r.bounds {
        let _ = writeln!(
            s,
            "  {:<14} applicable={:<5} {:<5} lhs={} rhs={}",
            b.id.as_str(),
            b.applicable,
            b.verdict(),
            opt(&b.lhs),
            opt(&b.rhs)
        );
    }
    s
}

pub fn csv_header() -> Vec<String> {
    let mut h: Vec<String> = [
        "name", "vertices", "seed", "d", "n_points", "n_interior", "vol", "h_star", "degree", "hollow", "fano",
        "simplex", "very_ample", "d_p", "nu_p", "k_p", "reg", "deg_x", "codim_x", "eg_gap", "per_k_normal",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    h.extend(BoundId::ALL.iter().map(|b| b.as_str().to_string()));
    h
}

pub fn csv_record(r: &AnalysisReport) -> Vec<String> {
    let na = |v: &Option<u64>| v.map_or_else(String::new, |x| x.to_string());
    let mut row = vec![
        r.name.clone(),
        serde_json::to_string(&r.vertices).expect("serializable"),
        na(&r.seed),
        r.d.to_string(),
        r.n_points.to_string(),
        r.n_interior.to_string(),
        r.vol.to_string(),
        join(r.h_star.coefficients(), " "),
        r.degree.to_string(),
        r.hollow.to_string(),
        r.fano.to_string(),
        r.simplex.to_string(),
        r.very_ample.to_string(),
        na(&r.d_p),
        na(&r.nu_p),
        na(&r.k_p),
        na(&r.reg),
        r.deg_x.to_string(),
        r.codim_x.to_string(),
        r.eg_gap.map_or_else(String::new, |x| x.to_string()),
        r.per_k_normal.iter().map(|(k, n)| format!("{k}:{}", u8::from(*n))).collect::<Vec<_>>().join(" "),
    ];
    row.extend(BoundId::ALL.iter().map(|&id| r.bound(id).verdict().to_string()));
    row
}

/// Header plus one row per report.
pub fn write_csv<W: Write>(reports: &[AnalysisReport], w: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(w);
    let io = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(csv_header()).map_err(io)?;
    for r in reports {
        w.write_record(csv_record(r)).map_err(io)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RowFormat {
    /// One JSON report per line.
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerdictCounts {
    pub holds: u64,
    pub fails: u64,
    pub not_applicable: u64,
}

/// Enough to regenerate and re-analyze an instance.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Replay {
    pub name: String,
    pub vertices: Vec<Point>,
    pub seed: Option<u64>,
    pub spec: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub bound: BoundId,
    pub lhs: Option<i64>,
    pub rhs: Option<i64>,
    pub replay: Replay,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Failure {
    pub error: String,
    pub invariant_violation: bool,
    pub inconclusive: bool,
    pub replay: Replay,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BatchSummary {
    pub instances: u64,
    pub analyzed: u64,
    pub counts: BTreeMap<BoundId, VerdictCounts>,
    pub violations: Vec<Violation>,
    /// Failures of observational bounds (EG_CONJ).
    pub observations: Vec<Violation>,
    pub failures: Vec<Failure>,
}

impl BatchSummary {
    fn record(&mut self, spec: &str, inst: &Instance, result: &Result<AnalysisReport>) {
        let replay = || Replay {
            name: inst.polytope.label(),
            vertices: inst.polytope.vertices().to_vec(),
            seed: inst.seed,
            spec: spec.to_string(),
        };
        match result {
            Ok(r) => {
                self.analyzed += 1;
                for b in &r.bounds {
                    let c = self.counts.entry(b.id).or_default();
                    match b.holds {
                        Some(true) => c.holds += 1,
                        Some(false) => c.fails += 1,
                        None => c.not_applicable += 1,
                    }
                    if b.holds == Some(false) {
                        let v = Violation { bound: b.id, lhs: b.lhs, rhs: b.rhs, replay: replay() };
                        if b.id.is_observation() {
                            self.observations.push(v);
                        } else {
                            self.violations.push(v);
                        }
                    }
                }
            }
            Err(e) => self.failures.push(Failure {
                error: e.to_string(),
                invariant_violation: matches!(e, Error::InvariantViolation(_)),
                inconclusive: matches!(e, Error::Inconclusive(_)),
                replay: replay(),
            }),
        }
    }
}

#[derive(Debug, thiserror::Error)]
#[error("{error} (after {} of {} instances)", .partial.analyzed + .partial.failures.len() as u64, .partial.instances)]
pub struct BatchError {
    pub error: Error,
    pub partial: Box<BatchSummary>,
}

#[derive(Clone, Copy, Debug)]
pub struct BatchOptions {
    pub k_cap: Option<u64>,
    pub workers: usize,
    pub format: RowFormat,
}

/// Analyzes every instance of every spec, streaming one row per instance to
/// `sink` in input order. Analysis errors are recorded in the summary;
/// spec and I/O errors abort with the progress so far.
pub fn batch_run(specs: &[FamilySpec], opts: BatchOptions, sink: &mut dyn Write) -> Result<BatchSummary, BatchError> {
    let mut summary = BatchSummary::default();
    let mut jobs = Vec::new();
    for spec in specs {
        match generate_instances(spec) {
            Ok(instances) => jobs.extend(instances.into_iter().map(|i| (spec.to_string(), i))),
            Err(error) => return Err(BatchError { error, partial: Box::new(summary) }),
        }
    }
    summary.instances = jobs.len() as u64;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.workers.max(1))
        .build()
        .map_err(|e| Error::InvalidArgument(e.to_string()));
    let pool = match pool {
        Ok(p) => p,
        Err(error) => return Err(BatchError { error, partial: Box::new(summary) }),
    };
    let csv = opts.format == RowFormat::Csv;
    // chunks keep memory bounded; results inside a chunk come back in order
    let chunk = opts.workers.max(1) * 4;
    for (n, batch) in jobs.chunks(chunk).enumerate() {
        let results: Vec<Result<AnalysisReport>> = pool.install(|| {
            batch
                .par_iter()
                .map(|(_, inst)| {
                    let caps = Caps::for_dim(inst.polytope.dim()).with_k_cap(opts.k_cap);
                    analyze_instance(inst, caps)
                })
                .collect()
        });
        let mut bytes = Vec::new();
        {
            let mut w = csv::WriterBuilder::new().from_writer(&mut bytes);
            if csv && n == 0 {
                w.write_record(csv_header()).expect("in-memory write");
            }
            for ((spec, inst), result) in batch.iter().zip(&results) {
                summary.record(spec, inst, result);
                if let (true, Ok(r)) = (csv, result) {
                    w.write_record(csv_record(r)).expect("in-memory write");
                }
            }
            w.flush().expect("in-memory write");
        }
        if !csv {
            for r in results.iter().flatten() {
                bytes.extend(serde_json::to_vec(r).expect("serializable"));
                bytes.push(b'\n');
            }
        }
        if let Err(e) = sink.write_all(&bytes).and_then(|_| sink.flush()) {
            return Err(BatchError { error: e.into(), partial: Box::new(summary) });
        }
    }
    Ok(summary)
}
