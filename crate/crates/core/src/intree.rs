//! The in-tree (directed forest) built by linking every point to its nearest
//! lower-potential neighbor, plus the edge-level mutations used by cutting.
//!
//! Roots are encoded as self-loops carrying no weight. Every non-root vertex
//! `i` has `target[i] != i` and `weight[i] = Some(d[i][target[i]])`.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::DistanceMatrix;
use crate::potential::PotentialField;

/// Which cutting method produced a cut.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CutMethod {
    K,
    Supervised,
    Kdcc,
    Interactive,
    IntDcc,
}

impl CutMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            CutMethod::K => "k",
            CutMethod::Supervised => "supervised",
            CutMethod::Kdcc => "kdcc",
            CutMethod::Interactive => "interactive",
            CutMethod::IntDcc => "int-dcc",
        }
    }
}

impl fmt::Display for CutMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CutMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "k" => Ok(CutMethod::K),
            "supervised" => Ok(CutMethod::Supervised),
            "kdcc" => Ok(CutMethod::Kdcc),
            "interactive" => Ok(CutMethod::Interactive),
            "int-dcc" => Ok(CutMethod::IntDcc),
            other => Err(Error::InvalidParameter(format!("unknown cut method `{other}`"))),
        }
    }
}

/// One applied cut: the vertex whose outgoing edge was removed and what it pointed at.
#[derive(Debug, Clone, PartialEq)]
pub struct CutRecord {
    pub vertex: usize,
    pub prev_target: usize,
    pub prev_weight: f64,
    pub method: CutMethod,
    pub restored: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InTree {
    target: Vec<usize>,
    weight: Vec<Option<f64>>,
    cut_log: Vec<CutRecord>,
}

/// Links every point to the nearest member of its candidate set
///
/// `J_i = { j : p[j] < p[i] } ∪ { j : p[j] == p[i], j < i }`,
///
/// breaking distance ties toward the smaller index. The single point with an
/// empty candidate set becomes the root. Potential ties use exact equality.
pub fn build_intree(d: &DistanceMatrix, pf: &PotentialField) -> Result<InTree> {
    let n = d.len();
    if pf.len() != n {
        return Err(Error::Dimension(format!(
            "{} potentials for a {n}-point distance matrix",
            pf.len()
        )));
    }
    let p = pf.values();
    let links: Vec<Option<(usize, f64)>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let pi = p[i];
            let row = d.row(i);
            let mut best: Option<(usize, f64)> = None;
            for (j, (&pj, &dij)) in p.iter().zip(row).enumerate() {
                let candidate = pj < pi || (pj == pi && j < i);
                if candidate && best.is_none_or(|(_, bd)| dij < bd) {
                    best = Some((j, dij));
                }
            }
            best
        })
        .collect();

    let mut target = Vec::with_capacity(n);
    let mut weight = Vec::with_capacity(n);
    for (i, link) in links.into_iter().enumerate() {
        match link {
            Some((j, w)) => {
                target.push(j);
                weight.push(Some(w));
            }
            None => {
                target.push(i);
                weight.push(None);
            }
        }
    }
    Ok(InTree {
        target,
        weight,
        cut_log: Vec::new(),
    })
}

impl InTree {
    /// Assembles a tree from raw parts without checking it; run
    /// [`validate_intree`] before trusting the result.
    pub fn from_parts(target: Vec<usize>, weight: Vec<Option<f64>>, cut_log: Vec<CutRecord>) -> Result<Self> {
        if target.len() != weight.len() {
            return Err(Error::Dimension(format!(
                "{} targets but {} weights",
                target.len(),
                weight.len()
            )));
        }
        if target.is_empty() {
            return Err(Error::Empty);
        }
        Ok(Self {
            target,
            weight,
            cut_log,
        })
    }

    pub fn len(&self) -> usize {
        self.target.len()
    }

    pub fn is_empty(&self) -> bool {
        self.target.is_empty()
    }

    #[inline]
    pub fn target(&self, i: usize) -> usize {
        self.target[i]
    }

    #[inline]
    pub fn weight(&self, i: usize) -> Option<f64> {
        self.weight[i]
    }

    pub fn targets(&self) -> &[usize] {
        &self.target
    }

    pub fn weights(&self) -> &[Option<f64>] {
        &self.weight
    }

    pub fn cut_log(&self) -> &[CutRecord] {
        &self.cut_log
    }

    #[inline]
    pub fn is_root(&self, i: usize) -> bool {
        self.target[i] == i
    }

    pub fn roots(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.is_root(i)).collect()
    }

    pub fn root_count(&self) -> usize {
        (0..self.len()).filter(|&i| self.is_root(i)).count()
    }

    /// Cuts that have not been restored.
    pub fn active_cut_count(&self) -> usize {
        self.cut_log.iter().filter(|c| !c.restored).count()
    }

    /// `(start, end, weight)` of every edge that is still present.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.weight
            .iter()
            .enumerate()
            .filter_map(|(i, w)| w.map(|w| (i, self.target[i], w)))
    }

    /// Removes the outgoing edge of `i`, making it a root.
    pub fn cut_edge(&mut self, i: usize, method: CutMethod) -> Result<()> {
        self.check_index(i)?;
        let Some(w) = self.weight[i].filter(|_| self.target[i] != i) else {
            return Err(Error::AlreadyRoot(i + 1));
        };
        self.cut_log.push(CutRecord {
            vertex: i,
            prev_target: self.target[i],
            prev_weight: w,
            method,
            restored: false,
        });
        self.target[i] = i;
        self.weight[i] = None;
        Ok(())
    }

    /// Puts back the pre-cut edge of `i` and marks its latest active cut as restored.
    pub fn restore_edge(&mut self, i: usize) -> Result<()> {
        self.check_index(i)?;
        let entry = self
            .cut_log
            .iter_mut()
            .rev()
            .find(|c| c.vertex == i && !c.restored)
            .filter(|_| self.target[i] == i)
            .ok_or(Error::NotCut(i + 1))?;
        entry.restored = true;
        self.target[i] = entry.prev_target;
        self.weight[i] = Some(entry.prev_weight);
        Ok(())
    }

    /// Reverts the most recent active cut and drops it from the log, returning
    /// the vertex whose edge came back.
    pub fn undo_last_cut(&mut self) -> Option<usize> {
        let pos = self.cut_log.iter().rposition(|c| !c.restored)?;
        let entry = self.cut_log.remove(pos);
        self.target[entry.vertex] = entry.prev_target;
        self.weight[entry.vertex] = Some(entry.prev_weight);
        Some(entry.vertex)
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if i >= self.len() {
            return Err(Error::IndexOutOfRange {
                index: i + 1,
                len: self.len(),
            });
        }
        Ok(())
    }
}

/// The four structural conditions of an in-tree forest.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Condition {
    /// (a) one weightless self-loop root per tree: root count equals 1 + active cuts.
    SingleRoot,
    /// (b) every other vertex has exactly one outgoing, in-range, weighted edge.
    OutDegree,
    /// (c) no cycles among non-root edges.
    Acyclic,
    /// (d) weakly connected component count equals root count.
    Connected,
}

impl Condition {
    pub fn label(self) -> char {
        match self {
            Condition::SingleRoot => 'a',
            Condition::OutDegree => 'b',
            Condition::Acyclic => 'c',
            Condition::Connected => 'd',
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub condition: Condition,
    /// Offending vertices (0-based).
    pub vertices: Vec<usize>,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let shown: Vec<String> = self.vertices.iter().take(10).map(|v| (v + 1).to_string()).collect();
        let more = if self.vertices.len() > 10 { ", ..." } else { "" };
        write!(
            f,
            "({}) {} [vertices {}{}]",
            self.condition.label(),
            self.detail,
            shown.join(", "),
            more
        )
    }
}

/// Reports every way `t` fails to be an in-tree forest; empty when it is one.
pub fn validate_intree(t: &InTree) -> Vec<Violation> {
    let n = t.len();
    let mut violations = Vec::new();

    let mut bad_degree = Vec::new();
    for i in 0..n {
        let ok = match (t.target[i], t.weight[i]) {
            (j, _) if j >= n => false,
            (j, None) => j == i,
            (j, Some(w)) => j != i && w.is_finite() && w >= 0.0,
        };
        if !ok {
            bad_degree.push(i);
        }
    }
    if !bad_degree.is_empty() {
        violations.push(Violation {
            condition: Condition::OutDegree,
            vertices: bad_degree,
            detail: "vertex lacks a single valid outgoing edge or has a weighted self-loop".into(),
        });
    }

    let roots = t.roots();
    let expected_roots = 1 + t.active_cut_count();
    if roots.len() != expected_roots {
        violations.push(Violation {
            condition: Condition::SingleRoot,
            vertices: roots.clone(),
            detail: format!("{} roots but {} expected from the cut log", roots.len(), expected_roots),
        });
    }

    // Walk the functional graph; a walk that re-enters its own path closes a cycle.
    const NEW: u8 = 0;
    const ON_PATH: u8 = 1;
    const DONE: u8 = 2;
    let mut state = vec![NEW; n];
    let mut on_cycle = Vec::new();
    let mut path = Vec::new();
    for start in 0..n {
        let mut v = start;
        path.clear();
        while v < n && state[v] == NEW {
            state[v] = ON_PATH;
            path.push(v);
            let next = t.target[v];
            if next == v {
                break;
            }
            v = next;
        }
        if v < n && state[v] == ON_PATH && t.target[v] != v {
            let at = path.iter().position(|&u| u == v).expect("vertex on current path");
            on_cycle.extend_from_slice(&path[at..]);
        }
        for &u in &path {
            state[u] = DONE;
        }
    }
    if !on_cycle.is_empty() {
        on_cycle.sort_unstable();
        violations.push(Violation {
            condition: Condition::Acyclic,
            vertices: on_cycle,
            detail: "directed cycle among non-root edges".into(),
        });
    }

    let mut uf = UnionFind::new(n);
    for i in 0..n {
        if t.target[i] < n {
            uf.union(i, t.target[i]);
        }
    }
    let mut has_root = vec![false; n];
    for &r in &roots {
        has_root[uf.find(r)] = true;
    }
    let rootless: Vec<usize> = (0..n).filter(|&i| uf.find(i) == i && !has_root[i]).collect();
    let components = (0..n).filter(|&i| uf.find(i) == i).count();
    if components != roots.len() {
        violations.push(Violation {
            condition: Condition::Connected,
            vertices: rootless,
            detail: format!("{components} components but {} roots", roots.len()),
        });
    }

    violations
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}
