//! Frameworks: a graph with typed members, an embedding, and the
//! squared-length constraint polynomials
//!
//! ```text
//! g_ij(x) = Σ_k (x_ik - x_jk)^2 - ℓ²_ij
//! ```
//!
//! which must vanish for bars, be non-positive for cables and non-negative
//! for struts.
//!
//! Node indices are 0-based in memory and 1-based in documents and reports.

use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use nalgebra::DVector;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default tolerance for the member feasibility flags.
pub const DEFAULT_FEASIBILITY_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MemberKind {
    Bar,
    Cable,
    Strut,
}

impl fmt::Display for MemberKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            MemberKind::Bar => "bar",
            MemberKind::Cable => "cable",
            MemberKind::Strut => "strut",
        };
        f.write_str(s)
    }
}

/// A member joining nodes `i < j` (0-based).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Member {
    pub i: usize,
    pub j: usize,
    pub kind: MemberKind,
}

impl Member {
    /// 1-based label such as `(1, 4)`.
    pub fn label(&self) -> String {
        format!("({}, {})", self.i + 1, self.j + 1)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FrameworkGraph {
    n: usize,
    d: usize,
    members: Vec<Member>,
}

impl FrameworkGraph {
    /// Validates `1 ≤ i < j ≤ n` (0-based here) and the absence of duplicates.
    pub fn new(n: usize, d: usize, members: Vec<Member>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Malformed("framework needs at least one node".into()));
        }
        if d == 0 {
            return Err(Error::Malformed("dimension must be positive".into()));
        }
        let mut seen = HashSet::with_capacity(members.len());
        for m in &members {
            for idx in [m.i, m.j] {
                if idx >= n {
                    return Err(Error::IndexOutOfRange { index: idx + 1, n });
                }
            }
            if m.i >= m.j {
                return Err(Error::InvalidMember { i: m.i + 1, j: m.j + 1 });
            }
            if !seen.insert((m.i, m.j)) {
                return Err(Error::DuplicateMember { i: m.i + 1, j: m.j + 1 });
            }
        }
        Ok(Self { n, d, members })
    }

    /// Convenience constructor from 1-based pairs, all bars.
    pub fn from_edges(n: usize, d: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let members = edges
            .iter()
            .map(|&(i, j)| {
                if i == 0 || j == 0 {
                    return Err(Error::IndexOutOfRange { index: 0, n });
                }
                Ok(Member { i: i - 1, j: j - 1, kind: MemberKind::Bar })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(n, d, members)
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn dimension(&self) -> usize {
        self.d
    }

    pub fn member_count(&self) -> usize {
        self.members.len()
    }

    pub fn members(&self) -> &[Member] {
        &self.members
    }

    /// Number of configuration-space coordinates, `n·d`.
    pub fn coordinate_count(&self) -> usize {
        self.n * self.d
    }

    /// Same graph with every member turned into a bar.
    pub fn all_bars(&self) -> Self {
        let members = self
            .members
            .iter()
            .map(|m| Member { kind: MemberKind::Bar, ..*m })
            .collect();
        Self { n: self.n, d: self.d, members }
    }
}

/// Node coordinates, stored node-major: `(x_11, …, x_1d, x_21, …)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Configuration {
    n: usize,
    d: usize,
    coords: Vec<f64>,
}

impl Configuration {
    pub fn new(n: usize, d: usize, coords: Vec<f64>) -> Result<Self> {
        if coords.len() != n * d {
            return Err(Error::ShapeMismatch {
                expected: format!("{n}x{d} = {} coordinates", n * d),
                found: format!("{} coordinates", coords.len()),
            });
        }
        if let Some(k) = coords.iter().position(|c| !c.is_finite()) {
            return Err(Error::NonFinite(format!(
                "node {} coordinate {}",
                k / d + 1,
                k % d + 1
            )));
        }
        Ok(Self { n, d, coords })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let d = rows.first().map_or(0, Vec::len);
        if n == 0 || d == 0 {
            return Err(Error::Malformed("configuration needs at least one coordinate".into()));
        }
        if let Some(bad) = rows.iter().position(|r| r.len() != d) {
            return Err(Error::ShapeMismatch {
                expected: format!("{d} coordinates per node"),
                found: format!("{} coordinates at node {}", rows[bad].len(), bad + 1),
            });
        }
        Self::new(n, d, rows.concat())
    }

    /// Coordinates drawn i.i.d. uniform on `[-1, 1]`.
    pub fn random<R: Rng + ?Sized>(n: usize, d: usize, rng: &mut R) -> Self {
        let coords = (0..n * d).map(|_| rng.random_range(-1.0..=1.0)).collect();
        Self { n, d, coords }
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn dimension(&self) -> usize {
        self.d
    }

    pub fn node(&self, i: usize) -> &[f64] {
        &self.coords[i * self.d..(i + 1) * self.d]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.coords
    }

    pub fn to_vector(&self) -> DVector<f64> {
        DVector::from_column_slice(&self.coords)
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.coords.chunks(self.d).map(<[f64]>::to_vec).collect()
    }

    pub fn squared_distance(&self, i: usize, j: usize) -> f64 {
        self.node(i)
            .iter()
            .zip(self.node(j))
            .map(|(a, b)| (a - b) * (a - b))
            .sum()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self { n: self.n, d: self.d, coords: self.coords.iter().map(|c| c * factor).collect() }
    }

    /// Adds `v` (length `n·d`) to the coordinates.
    pub fn displaced(&self, v: &[f64]) -> Result<Self> {
        self.check_len(v.len())?;
        let coords = self.coords.iter().zip(v).map(|(a, b)| a + b).collect();
        Self::new(self.n, self.d, coords)
    }

    pub(crate) fn check_shape(&self, n: usize, d: usize) -> Result<()> {
        if self.n != n || self.d != d {
            return Err(Error::ShapeMismatch {
                expected: format!("{n}x{d} configuration"),
                found: format!("{}x{}", self.n, self.d),
            });
        }
        Ok(())
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.coords.len() {
            return Err(Error::ShapeMismatch {
                expected: format!("vector of length {}", self.coords.len()),
                found: format!("length {len}"),
            });
        }
        Ok(())
    }
}

/// The member constraints `g_ij` of a graph with fixed rest lengths.
#[derive(Clone, Debug)]
pub struct MemberConstraintSystem {
    graph: Arc<FrameworkGraph>,
    rest_sq_lengths: Vec<f64>,
}

impl MemberConstraintSystem {
    pub fn new(graph: Arc<FrameworkGraph>, rest_sq_lengths: Vec<f64>) -> Result<Self> {
        if rest_sq_lengths.len() != graph.member_count() {
            return Err(Error::ShapeMismatch {
                expected: format!("{} rest lengths", graph.member_count()),
                found: format!("{}", rest_sq_lengths.len()),
            });
        }
        for (m, &l2) in graph.members().iter().zip(&rest_sq_lengths) {
            if !l2.is_finite() {
                return Err(Error::NonFinite(format!("rest length of member {}", m.label())));
            }
            if l2 <= 0.0 {
                return Err(Error::NonPositiveLength { i: m.i + 1, j: m.j + 1, value: l2 });
            }
        }
        Ok(Self { graph, rest_sq_lengths })
    }

    /// Rest lengths read off an embedding, so that `g(p) = 0`.
    pub fn from_embedding(graph: Arc<FrameworkGraph>, p: &Configuration) -> Result<Self> {
        p.check_shape(graph.node_count(), graph.dimension())?;
        let rest = graph.members().iter().map(|m| p.squared_distance(m.i, m.j)).collect();
        Self::new(graph, rest)
    }

    pub fn graph(&self) -> &FrameworkGraph {
        &self.graph
    }

    pub fn shared_graph(&self) -> Arc<FrameworkGraph> {
        Arc::clone(&self.graph)
    }

    pub fn rest_sq_lengths(&self) -> &[f64] {
        &self.rest_sq_lengths
    }

    /// Raw residuals `g(x)`.
    pub fn residuals(&self, x: &Configuration) -> Result<Vec<f64>> {
        x.check_shape(self.graph.node_count(), self.graph.dimension())?;
        Ok(self
            .graph
            .members()
            .iter()
            .zip(&self.rest_sq_lengths)
            .map(|(m, l2)| x.squared_distance(m.i, m.j) - l2)
            .collect())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MemberEvaluation {
    pub residuals: Vec<f64>,
    pub feasible: Vec<bool>,
}

impl MemberEvaluation {
    pub fn all_feasible(&self) -> bool {
        self.feasible.iter().all(|&f| f)
    }

    pub fn max_abs_residual(&self) -> f64 {
        self.residuals.iter().fold(0.0, |acc, r| acc.max(r.abs()))
    }
}

/// Residuals and per-member feasibility: `g = 0` for bars, `g ≤ 0` for
/// cables, `g ≥ 0` for struts, each up to `tol`.
pub fn evaluate_members(
    sys: &MemberConstraintSystem,
    x: &Configuration,
    tol: f64,
) -> Result<MemberEvaluation> {
    let residuals = sys.residuals(x)?;
    let feasible = sys
        .graph()
        .members()
        .iter()
        .zip(&residuals)
        .map(|(m, &r)| match m.kind {
            MemberKind::Bar => r.abs() <= tol,
            MemberKind::Cable => r <= tol,
            MemberKind::Strut => r >= -tol,
        })
        .collect();
    Ok(MemberEvaluation { residuals, feasible })
}

/// A loaded framework: graph, embedding `p` and its constraint system.
#[derive(Clone, Debug)]
pub struct Framework {
    pub graph: Arc<FrameworkGraph>,
    pub embedding: Configuration,
    pub system: MemberConstraintSystem,
}

impl Framework {
    /// Builds the constraint system from the embedding.
    pub fn from_embedding(graph: FrameworkGraph, embedding: Configuration) -> Result<Self> {
        let graph = Arc::new(graph);
        let system = MemberConstraintSystem::from_embedding(Arc::clone(&graph), &embedding)?;
        Ok(Self { graph, embedding, system })
    }

    /// Same framework with the embedding replaced and rest lengths kept.
    pub fn with_embedding(&self, embedding: Configuration) -> Result<Self> {
        embedding.check_shape(self.graph.node_count(), self.graph.dimension())?;
        Ok(Self { graph: Arc::clone(&self.graph), embedding, system: self.system.clone() })
    }

    pub fn to_document(&self) -> FrameworkDocument {
        FrameworkDocument {
            dimension: self.graph.dimension(),
            nodes: self.embedding.rows(),
            members: self
                .graph
                .members()
                .iter()
                .zip(self.system.rest_sq_lengths())
                .map(|(m, &l2)| MemberDocument {
                    i: m.i + 1,
                    j: m.j + 1,
                    kind: m.kind,
                    rest_sq_length: Some(l2),
                })
                .collect(),
        }
    }
}

/// On-disk JSON form. Node indices are 1-based.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FrameworkDocument {
    pub dimension: usize,
    pub nodes: Vec<Vec<f64>>,
    pub members: Vec<MemberDocument>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MemberDocument {
    pub i: usize,
    pub j: usize,
    pub kind: MemberKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rest_sq_length: Option<f64>,
}

impl FrameworkDocument {
    pub fn into_framework(self) -> Result<Framework> {
        let d = self.dimension;
        if d == 0 {
            return Err(Error::Malformed("dimension must be positive".into()));
        }
        if let Some(bad) = self.nodes.iter().position(|r| r.len() != d) {
            return Err(Error::ShapeMismatch {
                expected: format!("{d} coordinates per node"),
                found: format!("{} coordinates at node {}", self.nodes[bad].len(), bad + 1),
            });
        }
        let embedding = Configuration::from_rows(&self.nodes)?;
        let n = embedding.node_count();
        let mut members = Vec::with_capacity(self.members.len());
        for m in &self.members {
            for idx in [m.i, m.j] {
                if idx == 0 || idx > n {
                    return Err(Error::IndexOutOfRange { index: idx, n });
                }
            }
            members.push(Member { i: m.i - 1, j: m.j - 1, kind: m.kind });
        }
        let graph = Arc::new(FrameworkGraph::new(n, d, members)?);
        let rest = graph
            .members()
            .iter()
            .zip(&self.members)
            .map(|(m, doc)| match doc.rest_sq_length {
                Some(l2) => Ok(l2),
                None => {
                    let l2 = embedding.squared_distance(m.i, m.j);
                    if l2 == 0.0 {
                        Err(Error::DegenerateMember { i: m.i + 1, j: m.j + 1 })
                    } else {
                        Ok(l2)
                    }
                }
            })
            .collect::<Result<Vec<_>>>()?;
        let system = MemberConstraintSystem::new(Arc::clone(&graph), rest)?;
        Ok(Framework { graph, embedding, system })
    }
}

/// Parses and validates a framework JSON document.
pub fn load_framework(source: &str) -> Result<Framework> {
    let doc: FrameworkDocument =
        serde_json::from_str(source).map_err(|e| Error::Malformed(e.to_string()))?;
    doc.into_framework()
}
