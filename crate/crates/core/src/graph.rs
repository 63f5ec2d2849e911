//! Cone graphs: finite multigraphs with an edge angle `θ(e)` and an optional
//! target angle `φ(e)` per edge.
//!
//! Vertices carry user-supplied string ids; dense indices follow sorted id
//! order. Edges keep their input order and are oriented `tail → head` as given.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::{pi, Real};

/// Raw edge description, referencing vertices by id.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeSpec<T> {
    pub id: Option<String>,
    pub u: String,
    pub v: String,
    pub theta: T,
    pub phi: Option<T>,
}

impl<T> EdgeSpec<T> {
    pub fn new(u: impl Into<String>, v: impl Into<String>, theta: T) -> Self {
        Self {
            id: None,
            u: u.into(),
            v: v.into(),
            theta,
            phi: None,
        }
    }

    pub fn with_phi(mut self, phi: T) -> Self {
        self.phi = Some(phi);
        self
    }

    pub fn with_id(mut self, id: impl Into<String>) -> Self {
        self.id = Some(id.into());
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Edge<T> {
    pub id: String,
    pub tail: usize,
    pub head: usize,
    pub theta: T,
    pub phi: Option<T>,
}

impl<T> Edge<T> {
    /// The endpoint opposite to `v`.
    pub fn other(&self, v: usize) -> usize {
        if v == self.tail {
            self.head
        } else {
            self.tail
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    NoVertices,
    NoEdges,
    DuplicateVertex { vertex: String },
    DuplicateEdge { edge: String },
    UnknownVertex { edge: String, vertex: String },
    SelfLoop { edge: String },
    ThetaOutOfRange { edge: String, theta: f64, allow_wide_angles: bool },
    PhiOutOfRange { edge: String, phi: f64 },
    Disconnected { components: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoVertices => write!(f, "graph has no vertices"),
            Violation::NoEdges => write!(f, "graph has no edges"),
            Violation::DuplicateVertex { vertex } => write!(f, "duplicate vertex id {vertex}"),
            Violation::DuplicateEdge { edge } => write!(f, "duplicate edge id {edge}"),
            Violation::UnknownVertex { edge, vertex } => {
                write!(f, "edge {edge} references unknown vertex {vertex}")
            }
            Violation::SelfLoop { edge } => write!(f, "edge {edge} is a self-loop"),
            Violation::ThetaOutOfRange {
                edge,
                theta,
                allow_wide_angles,
            } => {
                if *allow_wide_angles {
                    write!(f, "edge {edge} has theta = {theta}, expected a finite positive angle")
                } else {
                    write!(f, "edge {edge} has theta = {theta} outside (0, pi)")
                }
            }
            Violation::PhiOutOfRange { edge, phi } => {
                write!(f, "edge {edge} has phi = {phi} outside (0, pi)")
            }
            Violation::Disconnected { components } => {
                write!(f, "graph is disconnected ({components} components)")
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn is_disconnected(&self) -> bool {
        self.violations
            .iter()
            .any(|v| matches!(v, Violation::Disconnected { .. }))
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.violations.iter().map(ToString::to_string).collect();
        write!(f, "{}", parts.join("; "))
    }
}

fn theta_ok<T: Real>(theta: T, wide: bool) -> bool {
    theta.is_finite() && theta > T::zero() && (wide || theta < pi())
}

fn phi_ok<T: Real>(phi: T) -> bool {
    phi.is_finite() && phi > T::zero() && phi < pi()
}

/// Checks a raw graph description without building it.
pub fn validate_spec<T: Real>(vertices: &[String], edges: &[EdgeSpec<T>], allow_wide_angles: bool) -> ValidationReport {
    let mut violations = Vec::new();
    if vertices.is_empty() {
        violations.push(Violation::NoVertices);
    }
    if edges.is_empty() {
        violations.push(Violation::NoEdges);
    }
    let mut seen = HashSet::new();
    for v in vertices {
        if !seen.insert(v.as_str()) {
            violations.push(Violation::DuplicateVertex { vertex: v.clone() });
        }
    }
    let mut sorted: Vec<&String> = vertices.iter().collect();
    sorted.sort();
    sorted.dedup();
    let index: HashMap<&str, usize> = sorted.iter().enumerate().map(|(i, v)| (v.as_str(), i)).collect();
    let mut edge_ids = HashSet::new();
    let mut resolved = Vec::new();
    let mut referential_ok = true;
    for (k, e) in edges.iter().enumerate() {
        let id = edge_id(e, k);
        if !edge_ids.insert(id.clone()) {
            violations.push(Violation::DuplicateEdge { edge: id.clone() });
        }
        let a = index.get(e.u.as_str()).copied();
        let b = index.get(e.v.as_str()).copied();
        for (endpoint, found) in [(&e.u, a), (&e.v, b)] {
            if found.is_none() {
                referential_ok = false;
                violations.push(Violation::UnknownVertex {
                    edge: id.clone(),
                    vertex: endpoint.clone(),
                });
            }
        }
        if e.u == e.v {
            violations.push(Violation::SelfLoop { edge: id.clone() });
        }
        if !theta_ok(e.theta, allow_wide_angles) {
            violations.push(Violation::ThetaOutOfRange {
                edge: id.clone(),
                theta: e.theta.as_f64(),
                allow_wide_angles,
            });
        }
        if let Some(phi) = e.phi {
            if !phi_ok(phi) {
                violations.push(Violation::PhiOutOfRange {
                    edge: id.clone(),
                    phi: phi.as_f64(),
                });
            }
        }
        if let (Some(a), Some(b)) = (a, b) {
            resolved.push((a, b));
        }
    }
    if referential_ok && !sorted.is_empty() {
        let c = component_labels(sorted.len(), &resolved).1;
        if c > 1 {
            violations.push(Violation::Disconnected { components: c });
        }
    }
    ValidationReport { violations }
}

fn edge_id<T>(e: &EdgeSpec<T>, k: usize) -> String {
    e.id.clone().unwrap_or_else(|| format!("e{k}"))
}

/// Connected-component label per vertex and the number of components.
pub(crate) fn component_labels(n: usize, edges: &[(usize, usize)]) -> (Vec<usize>, usize) {
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut label = vec![usize::MAX; n];
    let mut count = 0;
    for s in 0..n {
        if label[s] != usize::MAX {
            continue;
        }
        label[s] = count;
        let mut queue = VecDeque::from([s]);
        while let Some(x) = queue.pop_front() {
            for &y in &adj[x] {
                if label[y] == usize::MAX {
                    label[y] = count;
                    queue.push_back(y);
                }
            }
        }
        count += 1;
    }
    (label, count)
}

/// Combinatorial data of one connected piece of an edge set.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Component {
    pub vertices: Vec<usize>,
    pub edges: Vec<usize>,
    pub bipartite: bool,
    pub cycle_rank: usize,
}

/// Components spanned by the edges `subset` of `edges` (vertices not touched by
/// the subset are ignored).
pub(crate) fn edge_components(n: usize, edges: &[(usize, usize)], subset: &[usize]) -> Vec<Component> {
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    let mut touched = vec![false; n];
    for &k in subset {
        let (a, b) = edges[k];
        adj[a].push((b, k));
        adj[b].push((a, k));
        touched[a] = true;
        touched[b] = true;
    }
    let mut color = vec![u8::MAX; n];
    let mut out = Vec::new();
    for s in 0..n {
        if !touched[s] || color[s] != u8::MAX {
            continue;
        }
        color[s] = 0;
        let mut verts = vec![s];
        let mut comp_edges = HashSet::new();
        let mut bipartite = true;
        let mut queue = VecDeque::from([s]);
        while let Some(x) = queue.pop_front() {
            for &(y, k) in &adj[x] {
                comp_edges.insert(k);
                if color[y] == u8::MAX {
                    color[y] = 1 - color[x];
                    verts.push(y);
                    queue.push_back(y);
                } else if color[y] == color[x] {
                    bipartite = false;
                }
            }
        }
        verts.sort_unstable();
        let mut es: Vec<usize> = comp_edges.into_iter().collect();
        es.sort_unstable();
        let cycle_rank = es.len() + 1 - verts.len();
        out.push(Component {
            vertices: verts,
            edges: es,
            bipartite,
            cycle_rank,
        });
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GraphStructure<T> {
    pub bipartite: bool,
    pub has_odd_cycle: bool,
    pub cycle_rank: usize,
    pub components: usize,
    pub is_complete: bool,
    pub max_theta: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SingularWitness {
    pub edge: usize,
    pub k: u64,
}

/// A value `α = kπ/θ(e)` together with every `(edge, k)` realizing it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SingularDegree<T> {
    pub alpha: T,
    pub witnesses: Vec<SingularWitness>,
}

/// Provenance of one subdivided edge.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Subdivision<T> {
    pub parent_edge: String,
    pub parent_theta: T,
    pub child_edges: Vec<String>,
    pub inserted_vertices: Vec<String>,
    /// Angular interval `[start, end]` of each child inside the parent, measured from the parent tail.
    pub offsets: Vec<(T, T)>,
}

impl<T: Real> Subdivision<T> {
    pub fn child_angle_sum(&self) -> T {
        self.offsets.iter().map(|&(a, b)| b - a).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConeGraph<T> {
    vertex_ids: Vec<String>,
    edges: Vec<Edge<T>>,
    allow_wide_angles: bool,
}

pub(crate) fn vertex_label(i: usize) -> String {
    format!("v{i:03}")
}

impl<T: Real> ConeGraph<T> {
    /// Builds a validated cone graph. Any violation is returned as [`Error::Validation`].
    pub fn new<S: Into<String>>(
        vertices: impl IntoIterator<Item = S>,
        edges: Vec<EdgeSpec<T>>,
        allow_wide_angles: bool,
    ) -> Result<Self> {
        let vertices: Vec<String> = vertices.into_iter().map(Into::into).collect();
        let report = validate_spec(&vertices, &edges, allow_wide_angles);
        if !report.is_ok() {
            return Err(Error::Validation(report));
        }
        Ok(Self::assemble(vertices, edges, allow_wide_angles))
    }

    /// Builds without checking angles or connectivity; references must resolve.
    pub(crate) fn assemble(mut vertices: Vec<String>, edges: Vec<EdgeSpec<T>>, allow_wide_angles: bool) -> Self {
        vertices.sort();
        let index: HashMap<&str, usize> = vertices.iter().enumerate().map(|(i, v)| (v.as_str(), i)).collect();
        let edges = edges
            .into_iter()
            .enumerate()
            .map(|(k, e)| Edge {
                id: edge_id(&e, k),
                tail: index[e.u.as_str()],
                head: index[e.v.as_str()],
                theta: e.theta,
                phi: e.phi,
            })
            .collect();
        Self {
            vertex_ids: vertices,
            edges,
            allow_wide_angles,
        }
    }

    /// Graph on vertices `v000, v001, …` from index pairs and angles.
    pub fn from_edge_list(n: usize, edges: &[(usize, usize, T)]) -> Result<Self> {
        let specs = edges
            .iter()
            .map(|&(a, b, t)| EdgeSpec::new(vertex_label(a), vertex_label(b), t))
            .collect();
        Self::new((0..n).map(vertex_label), specs, false)
    }

    /// Like [`from_edge_list`](Self::from_edge_list) with target angles.
    pub fn from_edge_list_with_phi(n: usize, edges: &[(usize, usize, T, T)]) -> Result<Self> {
        let specs = edges
            .iter()
            .map(|&(a, b, t, p)| EdgeSpec::new(vertex_label(a), vertex_label(b), t).with_phi(p))
            .collect();
        Self::new((0..n).map(vertex_label), specs, false)
    }

    pub fn cycle(n: usize, theta: T) -> Result<Self> {
        let e: Vec<_> = (0..n).map(|i| (i, (i + 1) % n, theta)).collect();
        Self::from_edge_list(n, &e)
    }

    pub fn complete(n: usize, theta: T) -> Result<Self> {
        let mut e = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                e.push((i, j, theta));
            }
        }
        Self::from_edge_list(n, &e)
    }

    pub fn path(n: usize, theta: T) -> Result<Self> {
        let e: Vec<_> = (0..n.saturating_sub(1)).map(|i| (i, i + 1, theta)).collect();
        Self::from_edge_list(n, &e)
    }

    /// Copy with `φ(e) = phi` on every edge.
    pub fn with_constant_phi(&self, phi: T) -> Result<Self> {
        let mut g = self.clone();
        for e in &mut g.edges {
            e.phi = Some(phi);
        }
        g.ensure_valid()?;
        Ok(g)
    }

    /// Copy with every angle replaced by `f(edge index, θ)`.
    pub fn map_thetas(&self, mut f: impl FnMut(usize, T) -> T) -> Result<Self> {
        let mut g = self.clone();
        for (k, e) in g.edges.iter_mut().enumerate() {
            e.theta = f(k, e.theta);
        }
        g.ensure_valid()?;
        Ok(g)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_ids.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertex_ids(&self) -> &[String] {
        &self.vertex_ids
    }

    pub fn vertex_id(&self, i: usize) -> &str {
        &self.vertex_ids[i]
    }

    pub fn vertex_index(&self, id: &str) -> Option<usize> {
        self.vertex_ids.binary_search_by(|v| v.as_str().cmp(id)).ok()
    }

    pub fn edges(&self) -> &[Edge<T>] {
        &self.edges
    }

    pub fn edge(&self, k: usize) -> &Edge<T> {
        &self.edges[k]
    }

    pub fn edge_index(&self, id: &str) -> Option<usize> {
        self.edges.iter().position(|e| e.id == id)
    }

    pub fn allow_wide_angles(&self) -> bool {
        self.allow_wide_angles
    }

    pub(crate) fn endpoint_pairs(&self) -> Vec<(usize, usize)> {
        self.edges.iter().map(|e| (e.tail, e.head)).collect()
    }

    /// `(edge index, neighbour)` for every edge incident to `v`.
    pub fn incident(&self, v: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges
            .iter()
            .enumerate()
            .filter(move |(_, e)| e.tail == v || e.head == v)
            .map(move |(k, e)| (k, e.other(v)))
    }

    pub fn degree(&self, v: usize) -> usize {
        self.incident(v).count()
    }

    pub fn theta_max(&self) -> T {
        self.edges.iter().fold(T::zero(), |m, e| m.max(e.theta))
    }

    pub fn theta_min(&self) -> T {
        self.edges.iter().fold(T::infinity(), |m, e| m.min(e.theta))
    }

    pub fn total_angle(&self) -> T {
        self.edges.iter().map(|e| e.theta).sum()
    }

    /// The common angle if all `θ(e)` agree to relative tolerance `rel`.
    pub fn constant_theta(&self, rel: T) -> Option<T> {
        let t0 = self.edges.first()?.theta;
        self.edges
            .iter()
            .all(|e| (e.theta - t0).abs() <= rel * t0)
            .then_some(t0)
    }

    pub fn has_phi(&self) -> bool {
        self.edges.iter().all(|e| e.phi.is_some())
    }

    pub(crate) fn require_phi(&self) -> Result<()> {
        match self.edges.iter().find(|e| e.phi.is_none()) {
            Some(e) => Err(Error::MissingPhi(e.id.clone())),
            None => Ok(()),
        }
    }

    /// Re-checks angle ranges and connectivity.
    pub fn validate(&self) -> ValidationReport {
        validate_spec(&self.vertex_ids, &self.specs(), self.allow_wide_angles)
    }

    pub(crate) fn ensure_valid(&self) -> Result<()> {
        let r = self.validate();
        if r.is_ok() {
            Ok(())
        } else {
            Err(Error::Validation(r))
        }
    }

    /// Analyses other than the k-pod tools need every `θ(e) < π`.
    pub(crate) fn ensure_standard(&self) -> Result<()> {
        let r = validate_spec(&self.vertex_ids, &self.specs(), false);
        if r.is_ok() {
            Ok(())
        } else {
            Err(Error::Validation(r))
        }
    }

    /// Raw edge descriptions of this graph.
    pub fn specs(&self) -> Vec<EdgeSpec<T>> {
        self.edges
            .iter()
            .map(|e| EdgeSpec {
                id: Some(e.id.clone()),
                u: self.vertex_ids[e.tail].clone(),
                v: self.vertex_ids[e.head].clone(),
                theta: e.theta,
                phi: e.phi,
            })
            .collect()
    }

    /// Number of parallel edges between each vertex pair.
    pub fn adjacency_counts(&self) -> Vec<Vec<usize>> {
        let n = self.vertex_count();
        let mut a = vec![vec![0; n]; n];
        for e in &self.edges {
            a[e.tail][e.head] += 1;
            a[e.head][e.tail] += 1;
        }
        a
    }

    pub fn structure(&self) -> GraphStructure<T> {
        let n = self.vertex_count();
        let pairs = self.endpoint_pairs();
        let (_, components) = component_labels(n, &pairs);
        let all: Vec<usize> = (0..pairs.len()).collect();
        let bipartite = edge_components(n, &pairs, &all).iter().all(|c| c.bipartite);
        let adj = self.adjacency_counts();
        let is_complete = (0..n).all(|i| (0..n).all(|j| i == j || adj[i][j] > 0));
        GraphStructure {
            bipartite,
            has_odd_cycle: !bipartite,
            cycle_rank: pairs.len() + components - n,
            components,
            is_complete,
            max_theta: self.theta_max(),
        }
    }

    /// All `α = kπ/θ(e)` in `(0, alpha_max]`, ascending, merged at relative tolerance `1e-12`.
    pub fn singular_degrees(&self, alpha_max: T) -> Vec<SingularDegree<T>> {
        let mut raw: Vec<(T, SingularWitness)> = Vec::new();
        for (k_edge, e) in self.edges.iter().enumerate() {
            let step = pi::<T>() / e.theta;
            let mut k = 1u64;
            loop {
                let a = T::lit(k as f64) * step;
                if a > alpha_max * (T::one() + T::tol(1e-12)) {
                    break;
                }
                raw.push((a, SingularWitness { edge: k_edge, k }));
                k += 1;
            }
        }
        raw.sort_by(|x, y| x.0.partial_cmp(&y.0).expect("finite"));
        let rel = T::tol(1e-12);
        let mut out: Vec<SingularDegree<T>> = Vec::new();
        for (a, w) in raw {
            match out.last_mut() {
                Some(last) if (a - last.alpha).abs() <= rel * a => last.witnesses.push(w),
                _ => out.push(SingularDegree {
                    alpha: a,
                    witnesses: vec![w],
                }),
            }
        }
        out
    }

    /// Closest value `kπ/θ(e)` (`k ≥ 1`) to `alpha`: `(value, edge, k)`.
    pub fn nearest_singular(&self, alpha: T) -> Option<(T, usize, u64)> {
        let mut best: Option<(T, usize, u64)> = None;
        for (k_edge, e) in self.edges.iter().enumerate() {
            let step = pi::<T>() / e.theta;
            let k = (alpha / step).round().max(T::one());
            let a = k * step;
            if best.map_or(true, |(b, _, _)| (a - alpha).abs() < (b - alpha).abs()) {
                best = Some((a, k_edge, k.to_u64().unwrap_or(u64::MAX)));
            }
        }
        best
    }

    /// Edges with `α θ(e)` within `tol` (in `α`) of a positive multiple of `π`, with that multiple.
    pub fn singular_edges_at(&self, alpha: T, tol: T) -> Vec<(usize, u64)> {
        self.edges
            .iter()
            .enumerate()
            .filter_map(|(k_edge, e)| {
                let step = pi::<T>() / e.theta;
                let k = (alpha / step).round();
                (k >= T::one() && (alpha - k * step).abs() <= tol).then(|| (k_edge, k.to_u64().unwrap_or(0)))
            })
            .collect()
    }

    /// Splits one edge by `fractions` (positive, summing to 1 within `1e-12`).
    pub fn subdivide_edge(&self, edge_id: &str, fractions: &[T]) -> Result<(ConeGraph<T>, Subdivision<T>)> {
        let k = self
            .edge_index(edge_id)
            .ok_or_else(|| Error::UnknownEdge(edge_id.to_string()))?;
        let (g, mut subs) = self.subdivide_edges(&[(k, fractions.to_vec())])?;
        Ok((g, subs.remove(0)))
    }

    /// Splits several edges at once; edges not listed are copied unchanged.
    pub fn subdivide_edges(&self, splits: &[(usize, Vec<T>)]) -> Result<(ConeGraph<T>, Vec<Subdivision<T>>)> {
        let mut plan: BTreeMap<usize, &Vec<T>> = BTreeMap::new();
        for (k, f) in splits {
            if *k >= self.edges.len() {
                return Err(Error::UnknownEdge(format!("#{k}")));
            }
            if f.is_empty() || f.iter().any(|&x| !(x > T::zero()) || !x.is_finite()) {
                return Err(Error::InvalidArgument("fractions must be positive".into()));
            }
            let s: T = f.iter().copied().sum();
            if (s - T::one()).abs() > T::tol(1e-12) {
                return Err(Error::InvalidArgument(format!("fractions sum to {s}, expected 1")));
            }
            if plan.insert(*k, f).is_some() {
                return Err(Error::InvalidArgument("edge listed twice".into()));
            }
        }
        let mut taken: HashSet<String> = self.vertex_ids.iter().cloned().collect();
        let mut edge_taken: HashSet<String> = self.edges.iter().map(|e| e.id.clone()).collect();
        let fresh = |base: String, taken: &mut HashSet<String>| {
            let mut id = base;
            while taken.contains(&id) {
                id.push('\'');
            }
            taken.insert(id.clone());
            id
        };
        let mut vertices = self.vertex_ids.clone();
        let mut specs = Vec::new();
        let mut subs = Vec::new();
        for (k, e) in self.edges.iter().enumerate() {
            let Some(fractions) = plan.get(&k) else {
                specs.push(EdgeSpec {
                    id: Some(e.id.clone()),
                    u: self.vertex_ids[e.tail].clone(),
                    v: self.vertex_ids[e.head].clone(),
                    theta: e.theta,
                    phi: e.phi,
                });
                continue;
            };
            let n = fractions.len();
            let mut nodes = vec![self.vertex_ids[e.tail].clone()];
            let mut inserted = Vec::new();
            for j in 1..n {
                let id = fresh(format!("{}#{j}", e.id), &mut taken);
                vertices.push(id.clone());
                inserted.push(id.clone());
                nodes.push(id);
            }
            nodes.push(self.vertex_ids[e.head].clone());
            let mut child_edges = Vec::new();
            let mut offsets = Vec::new();
            let mut start = T::zero();
            for j in 0..n {
                let end = if j + 1 == n { e.theta } else { start + fractions[j] * e.theta };
                let cid = if n == 1 { e.id.clone() } else { fresh(format!("{}.{j}", e.id), &mut edge_taken) };
                specs.push(EdgeSpec {
                    id: Some(cid.clone()),
                    u: nodes[j].clone(),
                    v: nodes[j + 1].clone(),
                    theta: end - start,
                    phi: e.phi.map(|p| p * fractions[j]),
                });
                child_edges.push(cid);
                offsets.push((start, end));
                start = end;
            }
            subs.push(Subdivision {
                parent_edge: e.id.clone(),
                parent_theta: e.theta,
                child_edges,
                inserted_vertices: inserted,
                offsets,
            });
        }
        Ok((ConeGraph::assemble(vertices, specs, self.allow_wide_angles), subs))
    }

    /// Converts every angle to another scalar type.
    pub fn cast<U: Real>(&self) -> ConeGraph<U> {
        ConeGraph {
            vertex_ids: self.vertex_ids.clone(),
            edges: self
                .edges
                .iter()
                .map(|e| Edge {
                    id: e.id.clone(),
                    tail: e.tail,
                    head: e.head,
                    theta: U::lit(e.theta.as_f64()),
                    phi: e.phi.map(|p| U::lit(p.as_f64())),
                })
                .collect(),
            allow_wide_angles: self.allow_wide_angles,
        }
    }

    /// Checks that `alpha` keeps its distance `guard` from every singular degree.
    pub(crate) fn ensure_nonsingular(&self, alpha: T, guard: T) -> Result<()> {
        if let Some((s, k_edge, _)) = self.nearest_singular(alpha) {
            if (s - alpha).abs() < guard {
                return Err(Error::SingularAlpha {
                    alpha: alpha.as_f64(),
                    singular: s.as_f64(),
                    guard: guard.as_f64(),
                    edge: self.edges[k_edge].id.clone(),
                });
            }
        }
        Ok(())
    }
}
