//! Methods for removing inter-cluster edges from an in-tree.
//!
//! * K-Cut: the longest edges until a requested cluster count is reached.
//! * Sup-Cut: longest edges until differently labeled points have different roots.
//! * Int-Cut: the edge designated by a click, via the smallest deflection angle.
//! * Int-DCC-Cut: edges starting at points boxed in the (|P|, W) decision graph.
//! * K-DCC-Cut: edges starting at the points with the largest `W * |P|`.
//!
//! Automatic methods break equal-key ties toward the smaller start vertex.

use std::cmp::Ordering;
use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::intree::{CutMethod, InTree};
use crate::potential::PotentialField;
use crate::rootfind::find_root_sequential;
use crate::supervision::SupervisionSet;

/// Start vertices of the present edges, longest first.
fn longest_first(t: &InTree) -> Vec<usize> {
    let mut edges: Vec<(usize, f64)> = t.edges().map(|(i, _, w)| (i, w)).collect();
    edges.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    edges.into_iter().map(|(i, _)| i).collect()
}

fn cuts_needed(t: &InTree, k_clusters: usize) -> Result<usize> {
    let n = t.len();
    let roots = t.root_count();
    if k_clusters == 0 || k_clusters > n {
        return Err(Error::InvalidParameter(format!(
            "cluster count {k_clusters} outside 1..={n}"
        )));
    }
    if k_clusters < roots {
        return Err(Error::InvalidParameter(format!(
            "cluster count {k_clusters} below the current {roots} roots"
        )));
    }
    Ok(k_clusters - roots)
}

/// Cuts the longest edges until the tree has `k_clusters` roots. Returns the
/// start vertices of the removed edges in cut order.
pub fn cut_k_longest(t: &mut InTree, k_clusters: usize) -> Result<Vec<usize>> {
    let m = cuts_needed(t, k_clusters)?;
    let chosen: Vec<usize> = longest_first(t).into_iter().take(m).collect();
    for &i in &chosen {
        t.cut_edge(i, CutMethod::K)?;
    }
    Ok(chosen)
}

/// True when no two supervised points with different labels share a root.
pub fn labels_separated(t: &InTree, sup: &SupervisionSet) -> Result<bool> {
    let mut owner: HashMap<usize, &str> = HashMap::new();
    for (i, label) in sup.entries() {
        let root = find_root_sequential(t, *i)?;
        match owner.get(&root) {
            Some(l) if *l != label => return Ok(false),
            Some(_) => {}
            None => {
                owner.insert(root, label);
            }
        }
    }
    Ok(true)
}

/// Cuts the longest remaining edge until every pair of differently labeled
/// supervised points sits under different roots. Roots of the labeled points
/// are re-derived by chasing targets after each cut.
pub fn supervised_cut(t: &mut InTree, sup: &SupervisionSet) -> Result<Vec<usize>> {
    let mut cuts = Vec::new();
    let mut queue = longest_first(t).into_iter();
    while !labels_separated(t, sup)? {
        // Exhausting the edges leaves every point its own root, which always separates.
        let i = queue.next().ok_or(Error::NoEdges)?;
        t.cut_edge(i, CutMethod::Supervised)?;
        cuts.push(i);
    }
    Ok(cuts)
}

/// A user click in data coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClickPoint {
    pub x: f64,
    pub y: f64,
}

/// Angle in `[0, pi]` between `click - start` and `end - click`; zero when
/// either vector vanishes. Clicks beside the segment give small angles, clicks
/// on its extension give large ones.
pub fn deflection_angle(start: [f64; 2], end: [f64; 2], click: ClickPoint) -> f64 {
    let a = [click.x - start[0], click.y - start[1]];
    let b = [end[0] - click.x, end[1] - click.y];
    if (a[0] == 0.0 && a[1] == 0.0) || (b[0] == 0.0 && b[1] == 0.0) {
        return 0.0;
    }
    let cross = a[0] * b[1] - a[1] * b[0];
    let dot = a[0] * b[0] + a[1] * b[1];
    cross.abs().atan2(dot)
}

/// Start vertex of the present edge with the smallest deflection angle for `click`.
pub fn identify_edge_by_click(t: &InTree, positions: &[[f64; 2]], click: ClickPoint) -> Result<usize> {
    if positions.len() != t.len() {
        return Err(Error::Dimension(format!(
            "{} positions for {} vertices",
            positions.len(),
            t.len()
        )));
    }
    if !click.x.is_finite() || !click.y.is_finite() {
        return Err(Error::InvalidParameter("click coordinates must be finite".into()));
    }
    let mut best: Option<(usize, f64)> = None;
    for (u, v, _) in t.edges() {
        let theta = deflection_angle(positions[u], positions[v], click);
        if best.is_none_or(|(_, b)| theta < b) {
            best = Some((u, theta));
        }
    }
    best.map(|(u, _)| u).ok_or(Error::NoEdges)
}

/// One vertex of the decision graph: its |P|, its edge weight, and their product.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecisionGraphPoint {
    pub index: usize,
    pub abs_potential: f64,
    pub edge_weight: Option<f64>,
    pub gamma: Option<f64>,
}

pub fn decision_graph(t: &InTree, pf: &PotentialField) -> Result<Vec<DecisionGraphPoint>> {
    if pf.len() != t.len() {
        return Err(Error::Dimension(format!(
            "{} potentials for {} vertices",
            pf.len(),
            t.len()
        )));
    }
    Ok((0..t.len())
        .map(|i| {
            let abs_potential = pf.get(i).abs();
            let edge_weight = t.weight(i);
            DecisionGraphPoint {
                index: i,
                abs_potential,
                edge_weight,
                gamma: edge_weight.map(|w| w * abs_potential),
            }
        })
        .collect())
}

/// Closed rectangle in the (|P|, W) plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelectionBox {
    p_min: f64,
    p_max: f64,
    w_min: f64,
    w_max: f64,
}

impl SelectionBox {
    pub fn new(p_min: f64, p_max: f64, w_min: f64, w_max: f64) -> Result<Self> {
        if [p_min, p_max, w_min, w_max].iter().any(|v| v.is_nan()) || p_min > p_max || w_min > w_max {
            return Err(Error::InvalidParameter(format!(
                "box needs pMin <= pMax and wMin <= wMax, got [{p_min}, {p_max}] x [{w_min}, {w_max}]"
            )));
        }
        Ok(Self {
            p_min,
            p_max,
            w_min,
            w_max,
        })
    }

    /// The whole plane.
    pub fn everything() -> Self {
        Self {
            p_min: f64::NEG_INFINITY,
            p_max: f64::INFINITY,
            w_min: f64::NEG_INFINITY,
            w_max: f64::INFINITY,
        }
    }

    pub fn contains(&self, abs_potential: f64, weight: f64) -> bool {
        (self.p_min..=self.p_max).contains(&abs_potential) && (self.w_min..=self.w_max).contains(&weight)
    }
}

/// Non-root vertices whose decision-graph point lies inside `bx`, ascending.
pub fn int_dcc_cut_select(dg: &[DecisionGraphPoint], bx: &SelectionBox) -> Vec<usize> {
    dg.iter()
        .filter_map(|pt| {
            let w = pt.edge_weight?;
            bx.contains(pt.abs_potential, w).then_some(pt.index)
        })
        .collect()
}

/// Cuts every edge selected by [`int_dcc_cut_select`].
pub fn int_dcc_cut(t: &mut InTree, pf: &PotentialField, bx: &SelectionBox) -> Result<Vec<usize>> {
    let chosen = int_dcc_cut_select(&decision_graph(t, pf)?, bx);
    for &i in &chosen {
        t.cut_edge(i, CutMethod::IntDcc)?;
    }
    Ok(chosen)
}

/// Cuts the edges of the vertices with the largest `W * |P|` until the tree has
/// `k_clusters` roots. Existing roots count as already-chosen centers.
pub fn k_dcc_cut(t: &mut InTree, pf: &PotentialField, k_clusters: usize) -> Result<Vec<usize>> {
    let m = cuts_needed(t, k_clusters)?;
    let mut ranked: Vec<(usize, f64)> = decision_graph(t, pf)?
        .into_iter()
        .filter_map(|pt| pt.gamma.map(|g| (pt.index, g)))
        .collect();
    ranked.sort_by(|a, b| match b.1.total_cmp(&a.1) {
        Ordering::Equal => a.0.cmp(&b.0),
        o => o,
    });
    let chosen: Vec<usize> = ranked.into_iter().take(m).map(|(i, _)| i).collect();
    for &i in &chosen {
        t.cut_edge(i, CutMethod::Kdcc)?;
    }
    Ok(chosen)
}

#[cfg(test)]
#[allow(clippy::excessive_precision)]
mod tests {
    use super::*;
    use crate::dataset::Dataset;
    use crate::intree::build_intree;
    use crate::metrics::euclidean_distance_matrix;
    use crate::potential::compute_potentials;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn d1() -> (InTree, PotentialField) {
        let ds = Dataset::from_numeric_rows([0.0, 1.0, 2.0, 10.0, 11.0].iter().map(|&x| vec![x]).collect()).unwrap();
        let d = euclidean_distance_matrix(&ds).unwrap();
        let pf = compute_potentials(&d, 1.0).unwrap();
        (build_intree(&d, &pf).unwrap(), pf)
    }

    fn sup(entries: &[(usize, &str)]) -> SupervisionSet {
        SupervisionSet::new(entries.iter().map(|(i, l)| (*i, l.to_string())).collect(), 5).unwrap()
    }

    #[test]
    fn k_cut_two_and_three() {
        let (mut t, _) = d1();
        assert_eq!(cut_k_longest(&mut t, 2).unwrap(), vec![3]);
        assert_eq!(t.roots(), vec![1, 3]);

        let (mut t, _) = d1();
        assert_eq!(cut_k_longest(&mut t, 3).unwrap(), vec![3, 0]);
        assert_eq!(t.roots(), vec![0, 1, 3]);
    }

    #[test]
    fn k_cut_bounds() {
        let (mut t, _) = d1();
        let before = t.clone();
        assert!(cut_k_longest(&mut t, 1).unwrap().is_empty());
        assert_eq!(t, before);
        assert!(cut_k_longest(&mut t, 6).is_err());
        assert!(cut_k_longest(&mut t, 0).is_err());
        cut_k_longest(&mut t, 3).unwrap();
        assert!(cut_k_longest(&mut t, 2).is_err());
        assert_eq!(cut_k_longest(&mut t, 5).unwrap().len(), 2);
    }

    #[test]
    fn supervised_single_and_double_iteration() {
        let (mut t, _) = d1();
        assert_eq!(supervised_cut(&mut t, &sup(&[(0, "A"), (4, "B")])).unwrap(), vec![3]);
        assert_eq!(t.root_count(), 2);
        assert!(t.cut_log().iter().all(|c| c.method == CutMethod::Supervised));

        let (mut t, _) = d1();
        assert_eq!(supervised_cut(&mut t, &sup(&[(0, "A"), (2, "B")])).unwrap(), vec![3, 0]);
        assert_eq!(t.root_count(), 3);
    }

    #[test]
    fn supervised_single_label_is_noop() {
        let (mut t, _) = d1();
        assert!(supervised_cut(&mut t, &sup(&[(0, "A"), (4, "A")])).unwrap().is_empty());
        assert!(supervised_cut(&mut t, &SupervisionSet::default()).unwrap().is_empty());
    }

    #[test]
    fn click_examples() {
        let positions = [[0.0, 0.0], [2.0, 0.0], [0.0, 1.0], [0.0, 3.0]];
        let t = InTree::from_parts(vec![1, 1, 3, 3], vec![Some(2.0), None, Some(2.0), None], vec![]).unwrap();
        let on = ClickPoint { x: 1.0, y: 0.0 };
        assert_eq!(identify_edge_by_click(&t, &positions, on).unwrap(), 0);
        assert_eq!(deflection_angle(positions[0], positions[1], on), 0.0);

        let ext = ClickPoint { x: 3.0, y: 0.0 };
        assert_eq!(deflection_angle(positions[0], positions[1], ext), PI);
        assert_eq!(identify_edge_by_click(&t, &positions, ext).unwrap(), 2);

        let beside = ClickPoint { x: 1.0, y: 0.1 };
        assert_relative_eq!(
            deflection_angle(positions[0], positions[1], beside),
            2.0 * 0.1f64.atan(),
            max_relative = 1e-14
        );
        assert_eq!(identify_edge_by_click(&t, &positions, beside).unwrap(), 0);
    }

    #[test]
    fn click_on_endpoint_and_errors() {
        let positions = [[0.0, 0.0], [2.0, 0.0]];
        let at_start = ClickPoint { x: 0.0, y: 0.0 };
        assert_eq!(deflection_angle(positions[0], positions[1], at_start), 0.0);
        let roots_only = InTree::from_parts(vec![0, 1], vec![None, None], vec![]).unwrap();
        assert_eq!(
            identify_edge_by_click(&roots_only, &positions, at_start),
            Err(Error::NoEdges)
        );
        let t = InTree::from_parts(vec![1, 1], vec![Some(2.0), None], vec![]).unwrap();
        assert!(identify_edge_by_click(&t, &positions[..1], at_start).is_err());
    }

    #[test]
    fn decision_graph_box_selection() {
        let (t, pf) = d1();
        let dg = decision_graph(&t, &pf).unwrap();
        assert_eq!(dg[1].edge_weight, None);
        assert_eq!(dg[1].gamma, None);
        assert_relative_eq!(dg[3].gamma.unwrap(), 10.947069708265551983, max_relative = 1e-14);

        let around_p4 = SelectionBox::new(1.36, 1.37, 7.5, 8.5).unwrap();
        assert_eq!(int_dcc_cut_select(&dg, &around_p4), vec![3]);
        let empty = SelectionBox::new(100.0, 200.0, 0.0, 1.0).unwrap();
        assert!(int_dcc_cut_select(&dg, &empty).is_empty());
        assert_eq!(int_dcc_cut_select(&dg, &SelectionBox::everything()), vec![0, 2, 3, 4]);
        assert!(SelectionBox::new(2.0, 1.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn k_dcc_matches_k_cut_on_d1() {
        let (mut a, pf) = d1();
        let (mut b, _) = d1();
        assert_eq!(k_dcc_cut(&mut a, &pf, 2).unwrap(), vec![3]);
        cut_k_longest(&mut b, 2).unwrap();
        assert_eq!(a.targets(), b.targets());
        assert!(k_dcc_cut(&mut a, &pf, 2).unwrap().is_empty());
        assert_eq!(a.cut_log()[0].method, CutMethod::Kdcc);
    }
}
