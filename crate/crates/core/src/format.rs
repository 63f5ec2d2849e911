//! File formats: the JSON graph input, JSON reports and CSV tables.
//!
//! JSON numbers are written in the shortest form that parses back to the same
//! `f64`, so re-reading a report reproduces it exactly. CSV values use 17
//! significant digits.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::conemap::{ConeMapCount, ConeMapSingularReport, EndpointVerdict};
use crate::error::{Error, Result};
use crate::euclid::{DegreeKind, DegreeSpectrum, EigenCurves, SingularReport};
use crate::graph::{ConeGraph, EdgeSpec};
use crate::kpod::{ArcCertificate, KPodDegree, PHarmonicBound};
use crate::oracle::{OracleDegree, OracleResult};
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeRecord {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    pub u: String,
    pub v: String,
    pub theta: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<f64>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphOptions {
    #[serde(default)]
    pub allow_wide_angles: bool,
}

/// `{"vertices": [...], "edges": [{"u", "v", "theta", "phi"?, "id"?}], "options": {...}}`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphFile {
    pub vertices: Vec<String>,
    pub edges: Vec<EdgeRecord>,
    #[serde(default)]
    pub options: GraphOptions,
}

impl GraphFile {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        to_json(self)
    }

    /// Builds and validates the graph. With `degrees`, every angle is read in
    /// degrees and converted to radians. `allow_wide_angles` is combined with
    /// the file option.
    pub fn to_graph<T: Real>(&self, degrees: bool, allow_wide_angles: bool) -> Result<ConeGraph<T>> {
        let scale = if degrees { std::f64::consts::PI / 180.0 } else { 1.0 };
        let specs = self
            .edges
            .iter()
            .map(|e| EdgeSpec {
                id: e.id.clone(),
                u: e.u.clone(),
                v: e.v.clone(),
                theta: T::lit(e.theta * scale),
                phi: e.phi.map(|p| T::lit(p * scale)),
            })
            .collect();
        ConeGraph::new(
            self.vertices.iter().cloned(),
            specs,
            allow_wide_angles || self.options.allow_wide_angles,
        )
    }

    pub fn from_graph<T: Real>(g: &ConeGraph<T>) -> Self {
        GraphFile {
            vertices: g.vertex_ids().to_vec(),
            edges: g
                .edges()
                .iter()
                .map(|e| EdgeRecord {
                    id: Some(e.id.clone()),
                    u: g.vertex_id(e.tail).to_string(),
                    v: g.vertex_id(e.head).to_string(),
                    theta: e.theta.as_f64(),
                    phi: e.phi.map(|p| p.as_f64()),
                })
                .collect(),
            options: GraphOptions {
                allow_wide_angles: g.allow_wide_angles(),
            },
        }
    }
}

/// Pretty JSON with a trailing newline.
pub fn to_json<S: Serialize>(value: &S) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

pub fn from_json<'a, D: Deserialize<'a>>(text: &'a str) -> Result<D> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

fn vec_f64<T: Real>(v: &[T]) -> Vec<f64> {
    v.iter().map(|x| x.as_f64()).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegreeRecord {
    pub alpha: f64,
    pub multiplicity: usize,
    pub kind: DegreeKind,
    pub kernel: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub admissible: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SigmaEdgeRecord {
    pub edge: String,
    pub multiple: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorRecord {
    /// Values on `subdivided_vertices`.
    pub rho: Vec<f64>,
    /// Coefficients of `sin(αθ)` on `sigma`, in order.
    pub c2: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingularRecord {
    pub alpha: f64,
    pub sigma_edges: Vec<SigmaEdgeRecord>,
    pub subdivided_vertices: Vec<String>,
    /// Edges of the subdivided graph forming `Σ`.
    pub sigma: Vec<String>,
    pub b_dim: usize,
    pub balanced_dim: usize,
    pub generators: Vec<GeneratorRecord>,
}

impl SingularRecord {
    pub fn from_report<T: Real>(g: &ConeGraph<T>, r: &SingularReport<T>) -> Self {
        SingularRecord {
            alpha: r.alpha.as_f64(),
            sigma_edges: r
                .sigma_edges
                .iter()
                .map(|&(e, k)| SigmaEdgeRecord {
                    edge: g.edge(e).id.clone(),
                    multiple: k,
                })
                .collect(),
            subdivided_vertices: r.subdivided.vertex_ids().to_vec(),
            sigma: r.sigma.iter().map(|&k| r.subdivided.edge(k).id.clone()).collect(),
            b_dim: r.b_basis.len(),
            balanced_dim: r.balanced_dim,
            generators: r
                .generators
                .iter()
                .map(|gen| GeneratorRecord {
                    rho: vec_f64(&gen.rho),
                    c2: vec_f64(&gen.c2),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EndpointRecord {
    pub alpha: f64,
    pub sigma_edges: Vec<String>,
    pub free_vertices: Vec<String>,
    pub nullspace_dim: usize,
    #[serde(flatten)]
    pub verdict: EndpointVerdict<f64>,
}

impl EndpointRecord {
    pub fn from_report<T: Real>(g: &ConeGraph<T>, r: &ConeMapSingularReport<T>) -> Self {
        let verdict = match &r.verdict {
            EndpointVerdict::TrivialOnly => EndpointVerdict::TrivialOnly,
            EndpointVerdict::Undetermined => EndpointVerdict::Undetermined,
            EndpointVerdict::FeasibleWitness { rho, nu } => EndpointVerdict::FeasibleWitness {
                rho: vec_f64(rho),
                nu: vec_f64(nu),
            },
        };
        EndpointRecord {
            alpha: r.alpha.as_f64(),
            sigma_edges: r.sigma_edges.iter().map(|&k| g.edge(k).id.clone()).collect(),
            free_vertices: r.free_vertices.iter().map(|&v| g.vertex_id(v).to_string()).collect(),
            nullspace_dim: r.nullspace_dim,
            verdict,
        }
    }
}

/// Degree report shared by the Euclidean and cone-map scans.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub vertices: Vec<String>,
    pub interval: (f64, f64),
    pub degrees: Vec<DegreeRecord>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub singular: Vec<SingularRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub endpoint: Option<EndpointRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub count: Option<ConeMapCount>,
}

impl SpectrumReport {
    pub fn new<T: Real>(g: &ConeGraph<T>, s: &DegreeSpectrum<T>) -> Self {
        SpectrumReport {
            vertices: g.vertex_ids().to_vec(),
            interval: (s.interval.0.as_f64(), s.interval.1.as_f64()),
            degrees: s
                .entries
                .iter()
                .map(|e| DegreeRecord {
                    alpha: e.alpha.as_f64(),
                    multiplicity: e.multiplicity,
                    kind: e.kind,
                    kernel: e.kernel.iter().map(|v| vec_f64(v)).collect(),
                    admissible: e.admissible,
                })
                .collect(),
            singular: Vec::new(),
            endpoint: None,
            count: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KPodReport {
    pub total_angle: f64,
    pub degrees: Vec<KPodDegree<f64>>,
    /// Arc partition for each entry of `degrees`, when one exists.
    pub certificates: Vec<Option<ArcCertificate<f64>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PHarmonicReport {
    pub p: f64,
    pub theta0: f64,
    pub alpha: f64,
    pub kpod_bound: PHarmonicBound<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub m: usize,
    pub alpha_max: f64,
    pub zero_multiplicity: usize,
    pub eigenvalues: Vec<f64>,
    pub extrapolated: Vec<f64>,
    pub error_estimates: Vec<f64>,
    pub degrees: Vec<OracleDegree<f64>>,
}

impl OracleReport {
    pub fn new(r: &OracleResult<f64>, alpha_max: f64) -> Self {
        OracleReport {
            m: r.m,
            alpha_max,
            zero_multiplicity: r.zero_multiplicity,
            eigenvalues: r.eigenvalues.clone(),
            extrapolated: r.extrapolated.clone(),
            error_estimates: r.error_estimates.clone(),
            degrees: r.degrees.clone(),
        }
    }
}

/// One row of the scanner/oracle comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyRow {
    pub alpha_scan: Option<f64>,
    pub alpha_oracle: Option<f64>,
    pub delta: Option<f64>,
    pub multiplicity_scan: usize,
    pub multiplicity_oracle: usize,
    pub kind: Option<DegreeKind>,
    pub matched: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub m: usize,
    pub alpha_max: f64,
    pub tolerance: f64,
    pub matched: bool,
    pub rows: Vec<VerifyRow>,
}

impl VerifyReport {
    /// Pairs scanned degrees `(α, multiplicity, kind)` with oracle degrees
    /// `(α, multiplicity)` in increasing order; a pair matches when the degrees
    /// differ by at most `tolerance` and the multiplicities agree. The oracle
    /// list may extend to `alpha_max + tolerance`; its unpaired entries above
    /// `alpha_max` are dropped.
    pub fn build(
        scan: &[(f64, usize, DegreeKind)],
        oracle: &[(f64, usize)],
        m: usize,
        alpha_max: f64,
        tolerance: f64,
    ) -> Self {
        let mut rows = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < scan.len() || j < oracle.len() {
            let s = scan.get(i);
            let o = oracle.get(j);
            let row = match (s, o) {
                (Some(&(a, ms, kind)), Some(&(b, mo))) if (a - b).abs() <= tolerance => {
                    i += 1;
                    j += 1;
                    VerifyRow {
                        alpha_scan: Some(a),
                        alpha_oracle: Some(b),
                        delta: Some((a - b).abs()),
                        multiplicity_scan: ms,
                        multiplicity_oracle: mo,
                        kind: Some(kind),
                        matched: ms == mo,
                    }
                }
                (Some(&(a, ms, kind)), o) if o.map_or(true, |&(b, _)| a < b) => {
                    i += 1;
                    VerifyRow {
                        alpha_scan: Some(a),
                        alpha_oracle: None,
                        delta: None,
                        multiplicity_scan: ms,
                        multiplicity_oracle: 0,
                        kind: Some(kind),
                        matched: false,
                    }
                }
                (_, Some(&(b, mo))) => {
                    j += 1;
                    VerifyRow {
                        alpha_scan: None,
                        alpha_oracle: Some(b),
                        delta: None,
                        multiplicity_scan: 0,
                        multiplicity_oracle: mo,
                        kind: None,
                        matched: false,
                    }
                }
                (_, None) => unreachable!("loop condition"),
            };
            let beyond = row.alpha_scan.is_none() && row.alpha_oracle.map_or(false, |b| b > alpha_max);
            if !beyond {
                rows.push(row);
            }
        }
        VerifyReport {
            m,
            alpha_max,
            tolerance,
            matched: rows.iter().all(|r| r.matched),
            rows,
        }
    }
}

fn push_value(out: &mut String, x: f64) {
    write!(out, "{x:.16e}").expect("writing to a string");
}

/// `alpha,lambda_1,...,lambda_n`, one row per sample.
pub fn curves_csv<T: Real>(c: &EigenCurves<T>) -> String {
    let n = c.values.first().map_or(0, Vec::len);
    let mut out = String::from("alpha");
    for k in 1..=n {
        write!(out, ",lambda_{k}").expect("writing to a string");
    }
    out.push('\n');
    for (a, row) in c.alphas.iter().zip(&c.values) {
        push_value(&mut out, a.as_f64());
        for v in row {
            out.push(',');
            push_value(&mut out, v.as_f64());
        }
        out.push('\n');
    }
    out
}

/// `edge_id,s,rho` rows from `(edge id, arclength, value)` samples.
pub fn eigenfunction_csv<T: Real>(samples: &[(String, T, T)]) -> String {
    let mut out = String::from("edge_id,s,rho\n");
    for (id, s, v) in samples {
        out.push_str(id);
        out.push(',');
        push_value(&mut out, s.as_f64());
        out.push(',');
        push_value(&mut out, v.as_f64());
        out.push('\n');
    }
    out
}
