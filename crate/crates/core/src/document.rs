//! Serialized forms: the tree JSON document, the decision-graph export and the
//! assignment CSV. All indices in these formats are 1-based.

use serde::{Deserialize, Serialize};

use crate::cutting::DecisionGraphPoint;
use crate::error::{Error, Result};
use crate::intree::{validate_intree, CutMethod, CutRecord, InTree};
use crate::potential::PotentialField;
use crate::rootfind::ClusterAssignment;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeEntry {
    pub from: usize,
    pub to: usize,
    pub w: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CutEntry {
    pub from: usize,
    pub prev_to: usize,
    pub prev_w: f64,
    pub method: CutMethod,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub restored: bool,
}

/// `{ n, sigma, coords, potentials, edges, roots, cut_log }`, roots omitted from `edges`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeDocument {
    pub n: usize,
    pub sigma: f64,
    pub coords: Option<Vec<[f64; 2]>>,
    pub potentials: Vec<f64>,
    pub edges: Vec<EdgeEntry>,
    pub roots: Vec<usize>,
    pub cut_log: Vec<CutEntry>,
}

impl TreeDocument {
    pub fn new(tree: &InTree, potentials: &PotentialField, coords: Option<Vec<[f64; 2]>>) -> Self {
        Self {
            n: tree.len(),
            sigma: potentials.sigma(),
            coords,
            potentials: potentials.values().to_vec(),
            edges: tree
                .edges()
                .map(|(from, to, w)| EdgeEntry {
                    from: from + 1,
                    to: to + 1,
                    w,
                })
                .collect(),
            roots: tree.roots().into_iter().map(|r| r + 1).collect(),
            cut_log: tree
                .cut_log()
                .iter()
                .map(|c| CutEntry {
                    from: c.vertex + 1,
                    prev_to: c.prev_target + 1,
                    prev_w: c.prev_weight,
                    method: c.method,
                    restored: c.restored,
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("tree document serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse {
            row: e.line(),
            message: format!("tree JSON: {e}"),
        })
    }

    /// Rebuilds the in-tree and potential field, rejecting documents that are
    /// inconsistent or do not describe an in-tree forest.
    pub fn to_parts(&self) -> Result<(InTree, PotentialField)> {
        let n = self.n;
        let index = |v: usize, what: &str| -> Result<usize> {
            if v == 0 || v > n {
                return Err(Error::InvalidTree(format!("{what} index {v} outside 1..={n}")));
            }
            Ok(v - 1)
        };
        if self.potentials.len() != n {
            return Err(Error::InvalidTree(format!(
                "{} potentials for n = {n}",
                self.potentials.len()
            )));
        }
        if let Some(c) = &self.coords {
            if c.len() != n {
                return Err(Error::InvalidTree(format!("{} coordinates for n = {n}", c.len())));
            }
        }
        let mut target: Vec<Option<usize>> = vec![None; n];
        let mut weight: Vec<Option<f64>> = vec![None; n];
        for e in &self.edges {
            let from = index(e.from, "edge start")?;
            let to = index(e.to, "edge end")?;
            if target[from].replace(to).is_some() {
                return Err(Error::InvalidTree(format!("vertex {} has two edges", e.from)));
            }
            weight[from] = Some(e.w);
        }
        let mut roots = vec![false; n];
        for &r in &self.roots {
            let r = index(r, "root")?;
            if target[r].is_some() {
                return Err(Error::InvalidTree(format!("root {} also has an edge", r + 1)));
            }
            roots[r] = true;
            target[r] = Some(r);
        }
        let target = target
            .into_iter()
            .enumerate()
            .map(|(i, t)| t.ok_or_else(|| Error::InvalidTree(format!("vertex {} has neither edge nor root", i + 1))))
            .collect::<Result<Vec<_>>>()?;
        let cut_log = self
            .cut_log
            .iter()
            .map(|c| {
                Ok(CutRecord {
                    vertex: index(c.from, "cut")?,
                    prev_target: index(c.prev_to, "cut target")?,
                    prev_weight: c.prev_w,
                    method: c.method,
                    restored: c.restored,
                })
            })
            .collect::<Result<Vec<_>>>()?;

        let tree = InTree::from_parts(target, weight, cut_log)?;
        let violations = validate_intree(&tree);
        if let Some(v) = violations.first() {
            return Err(Error::InvalidTree(v.to_string()));
        }
        let potentials = PotentialField::from_values(self.potentials.clone(), self.sigma)?;
        Ok((tree, potentials))
    }
}

/// Decision-graph export entry; `w` is null for roots.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionGraphEntry {
    pub index: usize,
    #[serde(rename = "absP")]
    pub abs_p: f64,
    pub w: Option<f64>,
}

pub fn decision_graph_entries(dg: &[DecisionGraphPoint]) -> Vec<DecisionGraphEntry> {
    dg.iter()
        .map(|p| DecisionGraphEntry {
            index: p.index + 1,
            abs_p: p.abs_potential,
            w: p.edge_weight,
        })
        .collect()
}

/// `index,root` rows (plus `cluster_label` when any cluster carries a label), 1-based.
pub fn assignment_csv(a: &ClusterAssignment) -> String {
    let labeled = !a.cluster_labels().is_empty();
    let mut out = String::from(if labeled {
        "index,root,cluster_label\n"
    } else {
        "index,root\n"
    });
    for (i, &r) in a.root_of().iter().enumerate() {
        if labeled {
            out.push_str(&format!(
                "{},{},{}\n",
                i + 1,
                r + 1,
                a.label_of_cluster(r).unwrap_or("")
            ));
        } else {
            out.push_str(&format!("{},{}\n", i + 1, r + 1));
        }
    }
    out
}

/// Reads an assignment CSV back into 0-based root indices.
pub fn parse_assignment_csv(text: &str) -> Result<Vec<usize>> {
    let mut roots = Vec::new();
    for (row, line) in text.lines().enumerate().skip(1) {
        if line.trim().is_empty() {
            continue;
        }
        let mut cells = line.split(',');
        let parse = |cell: Option<&str>| -> Result<usize> {
            cell.and_then(|c| c.trim().parse::<usize>().ok())
                .filter(|&v| v > 0)
                .ok_or(Error::Parse {
                    row,
                    message: "expected positive integer index and root".into(),
                })
        };
        let index = parse(cells.next())?;
        let root = parse(cells.next())?;
        if index != roots.len() + 1 {
            return Err(Error::Parse {
                row,
                message: format!("index {index} out of sequence"),
            });
        }
        roots.push(root - 1);
    }
    if roots.is_empty() {
        return Err(Error::Empty);
    }
    if let Some(&r) = roots.iter().find(|&&r| r >= roots.len()) {
        return Err(Error::IndexOutOfRange {
            index: r + 1,
            len: roots.len(),
        });
    }
    Ok(roots)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::Dataset;
    use crate::intree::build_intree;
    use crate::metrics::euclidean_distance_matrix;
    use crate::potential::compute_potentials;
    use crate::rootfind::find_roots_doubling;

    fn d1() -> (InTree, PotentialField) {
        let ds = Dataset::from_numeric_rows([0.0, 1.0, 2.0, 10.0, 11.0].iter().map(|&x| vec![x]).collect()).unwrap();
        let d = euclidean_distance_matrix(&ds).unwrap();
        let pf = compute_potentials(&d, 1.0).unwrap();
        (build_intree(&d, &pf).unwrap(), pf)
    }

    #[test]
    fn d1_document_shape() {
        let (mut t, pf) = d1();
        t.cut_edge(3, CutMethod::K).unwrap();
        let doc = TreeDocument::new(&t, &pf, None);
        let json: serde_json::Value = serde_json::from_str(&doc.to_json()).unwrap();
        assert_eq!(json["n"], 5);
        assert_eq!(json["roots"], serde_json::json!([2, 4]));
        assert_eq!(json["edges"][0], serde_json::json!({"from": 1, "to": 2, "w": 1.0}));
        assert_eq!(json["coords"], serde_json::Value::Null);
        assert_eq!(
            json["cut_log"][0],
            serde_json::json!({"from": 4, "prev_to": 3, "prev_w": 8.0, "method": "k"})
        );
        let (t2, pf2) = TreeDocument::from_json(&doc.to_json()).unwrap().to_parts().unwrap();
        assert_eq!(t2, t);
        assert_eq!(pf2, pf);
    }

    #[test]
    fn restored_flag_round_trips() {
        let (mut t, pf) = d1();
        t.cut_edge(3, CutMethod::Supervised).unwrap();
        t.restore_edge(3).unwrap();
        let json = TreeDocument::new(&t, &pf, None).to_json();
        assert!(json.contains("\"restored\": true"));
        let (t2, _) = TreeDocument::from_json(&json).unwrap().to_parts().unwrap();
        assert_eq!(t2, t);
    }

    #[test]
    fn rejects_broken_documents() {
        let (t, pf) = d1();
        let good = TreeDocument::new(&t, &pf, None);

        let mut cyclic = good.clone();
        cyclic.roots.clear();
        cyclic.edges.push(EdgeEntry { from: 2, to: 1, w: 1.0 });
        assert!(matches!(cyclic.to_parts(), Err(Error::InvalidTree(_))));

        let mut missing = good.clone();
        missing.edges.pop();
        assert!(missing.to_parts().is_err());

        let mut zero = good.clone();
        zero.edges[0].to = 0;
        assert!(zero.to_parts().is_err());

        let mut short = good;
        short.potentials.pop();
        assert!(short.to_parts().is_err());

        assert!(TreeDocument::from_json("{").is_err());
    }

    #[test]
    fn assignment_csv_round_trip() {
        let (mut t, _) = d1();
        t.cut_edge(3, CutMethod::K).unwrap();
        let a = find_roots_doubling(&t).unwrap();
        let csv = assignment_csv(&a);
        assert_eq!(csv, "index,root\n1,2\n2,2\n3,2\n4,4\n5,4\n");
        assert_eq!(parse_assignment_csv(&csv).unwrap(), a.root_of());
        assert!(parse_assignment_csv("index,root\n1,9\n").is_err());
        assert!(parse_assignment_csv("index,root\n").is_err());
    }

    #[test]
    fn decision_graph_nulls_roots() {
        let (t, pf) = d1();
        let dg = crate::cutting::decision_graph(&t, &pf).unwrap();
        let json = serde_json::to_value(decision_graph_entries(&dg)).unwrap();
        assert_eq!(json[1]["w"], serde_json::Value::Null);
        assert_eq!(json[1]["index"], 2);
        assert_eq!(json[3]["w"], 8.0);
        assert!(json[0]["absP"].as_f64().unwrap() > 1.5);
    }
}
