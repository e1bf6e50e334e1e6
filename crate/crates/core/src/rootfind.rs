//! Root finding by successor doubling.
//!
//! Each round replaces every target by its target's target, reading only the
//! previous round's map. A vertex `h` hops from its root reaches it after
//! `ceil(log2 h)` such rounds, so the whole forest converges in
//! `ceil(log2 H)` rounds where `H` is the tree height.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::intree::InTree;

#[derive(Debug, Clone, PartialEq)]
pub struct ClusterAssignment {
    root_of: Vec<usize>,
    clusters: BTreeMap<usize, Vec<usize>>,
    cluster_label: BTreeMap<usize, String>,
    rounds_used: usize,
}

impl ClusterAssignment {
    /// Groups points by the root each one maps to.
    pub fn from_root_map(root_of: Vec<usize>, rounds_used: usize) -> Self {
        let mut clusters: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (i, &r) in root_of.iter().enumerate() {
            clusters.entry(r).or_default().push(i);
        }
        Self {
            root_of,
            clusters,
            cluster_label: BTreeMap::new(),
            rounds_used,
        }
    }

    pub fn with_labels(mut self, labels: BTreeMap<usize, String>) -> Self {
        self.cluster_label = labels;
        self
    }

    pub fn root_of(&self) -> &[usize] {
        &self.root_of
    }

    pub fn clusters(&self) -> &BTreeMap<usize, Vec<usize>> {
        &self.clusters
    }

    pub fn cluster_labels(&self) -> &BTreeMap<usize, String> {
        &self.cluster_label
    }

    pub fn label_of_cluster(&self, root: usize) -> Option<&str> {
        self.cluster_label.get(&root).map(String::as_str)
    }

    pub fn cluster_count(&self) -> usize {
        self.clusters.len()
    }

    pub fn rounds_used(&self) -> usize {
        self.rounds_used
    }

    pub fn len(&self) -> usize {
        self.root_of.len()
    }

    pub fn is_empty(&self) -> bool {
        self.root_of.is_empty()
    }

    /// Cluster sizes, largest first.
    pub fn sizes(&self) -> Vec<usize> {
        let mut s: Vec<usize> = self.clusters.values().map(Vec::len).collect();
        s.sort_unstable_by(|a, b| b.cmp(a));
        s
    }
}

fn ceil_log2(n: usize) -> usize {
    n.max(1).next_power_of_two().trailing_zeros() as usize
}

fn check_targets(t: &InTree) -> Result<()> {
    let n = t.len();
    match t.targets().iter().position(|&j| j >= n) {
        Some(i) => Err(Error::InvalidTree(format!("vertex {} points outside the tree", i + 1))),
        None => Ok(()),
    }
}

/// Converges every vertex to its root by parallel successor doubling.
///
/// `rounds_used` counts the doubling rounds that changed the map; the final
/// pass that detects no change is not counted.
pub fn find_roots_doubling(t: &InTree) -> Result<ClusterAssignment> {
    check_targets(t)?;
    let n = t.len();
    let bound = ceil_log2(n) + 1;
    let mut current = t.targets().to_vec();
    let mut next = vec![0usize; n];
    let mut rounds = 0;
    loop {
        next.par_iter_mut()
            .enumerate()
            .for_each(|(i, slot)| *slot = current[current[i]]);
        let changed = next.par_iter().zip(current.par_iter()).any(|(a, b)| a != b);
        if !changed {
            break;
        }
        rounds += 1;
        if rounds > bound {
            let v = (0..n).find(|&i| next[i] != current[i]).unwrap_or(0);
            return Err(Error::Cycle(v + 1));
        }
        std::mem::swap(&mut current, &mut next);
    }
    // Doubling also settles on cycles whose length is a power of two.
    if let Some(&r) = current.iter().find(|&&r| !t.is_root(r)) {
        return Err(Error::Cycle(r + 1));
    }
    Ok(ClusterAssignment::from_root_map(current, rounds))
}

/// Follows targets from `i` one hop at a time until reaching a self-loop.
pub fn find_root_sequential(t: &InTree, i: usize) -> Result<usize> {
    let n = t.len();
    if i >= n {
        return Err(Error::IndexOutOfRange { index: i + 1, len: n });
    }
    let mut v = i;
    for _ in 0..=n {
        let next = t.target(v);
        if next >= n {
            return Err(Error::InvalidTree(format!("vertex {} points outside the tree", v + 1)));
        }
        if next == v {
            return Ok(v);
        }
        v = next;
    }
    Err(Error::Cycle(i + 1))
}

/// Largest hop count from any vertex to its root.
pub fn compute_tree_height(t: &InTree) -> Result<usize> {
    check_targets(t)?;
    let n = t.len();
    const UNKNOWN: usize = usize::MAX;
    const VISITING: usize = usize::MAX - 1;
    let mut depth = vec![UNKNOWN; n];
    let mut path = Vec::new();
    for start in 0..n {
        let mut v = start;
        path.clear();
        while depth[v] == UNKNOWN {
            if t.is_root(v) {
                depth[v] = 0;
                break;
            }
            depth[v] = VISITING;
            path.push(v);
            v = t.target(v);
        }
        if depth[v] == VISITING {
            return Err(Error::Cycle(v + 1));
        }
        let mut d = depth[v];
        for &u in path.iter().rev() {
            d += 1;
            depth[u] = d;
        }
    }
    Ok(depth.into_iter().max().unwrap_or(0))
}

/// Re-attaches every singleton cluster whose lone member was cut, using its
/// pre-cut edge, and repeats until no singleton can be re-attached. Singletons
/// are restored in ascending vertex order within a pass. Never-cut roots stay.
pub fn merge_singletons(t: &InTree, a: &ClusterAssignment) -> Result<(InTree, ClusterAssignment)> {
    let mut tree = t.clone();
    let mut assignment = a.clone();
    loop {
        let restorable: Vec<usize> = assignment
            .clusters()
            .iter()
            .filter(|(&root, members)| {
                members.len() == 1
                    && tree.is_root(root)
                    && tree.cut_log().iter().any(|c| c.vertex == root && !c.restored)
            })
            .map(|(&root, _)| root)
            .collect();
        if restorable.is_empty() {
            break;
        }
        for root in restorable {
            tree.restore_edge(root)?;
        }
        assignment = find_roots_doubling(&tree)?;
    }
    Ok((tree, assignment))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::intree::CutMethod;

    fn path(vertices: usize) -> InTree {
        // 0 is the root; vertex k points at k - 1.
        let target = (0..vertices).map(|k| k.saturating_sub(1)).collect();
        let weight = (0..vertices).map(|k| (k > 0).then_some(1.0)).collect();
        InTree::from_parts(target, weight, vec![]).unwrap()
    }

    fn star(vertices: usize) -> InTree {
        let target = vec![0; vertices];
        let weight = (0..vertices).map(|k| (k > 0).then_some(1.0)).collect();
        InTree::from_parts(target, weight, vec![]).unwrap()
    }

    fn d1_cut() -> InTree {
        let mut t = InTree::from_parts(
            vec![1, 1, 1, 2, 3],
            vec![Some(1.0), None, Some(1.0), Some(8.0), Some(1.0)],
            vec![],
        )
        .unwrap();
        t.cut_edge(3, CutMethod::K).unwrap();
        t
    }

    #[test]
    fn path_of_nine() {
        let t = path(9);
        assert_eq!(compute_tree_height(&t).unwrap(), 8);
        let a = find_roots_doubling(&t).unwrap();
        assert_eq!(a.rounds_used(), 3);
        assert!(a.root_of().iter().all(|&r| r == 0));
    }

    #[test]
    fn path_of_height_seven_needs_three_rounds() {
        let t = path(8);
        assert_eq!(compute_tree_height(&t).unwrap(), 7);
        assert_eq!(find_roots_doubling(&t).unwrap().rounds_used(), 3);
    }

    #[test]
    fn star_is_already_converged() {
        let t = star(6);
        assert_eq!(compute_tree_height(&t).unwrap(), 1);
        let a = find_roots_doubling(&t).unwrap();
        assert_eq!(a.rounds_used(), 0);
        assert_eq!(a.cluster_count(), 1);
    }

    #[test]
    fn all_roots_have_height_zero() {
        let t = InTree::from_parts(vec![0, 1, 2], vec![None; 3], vec![]).unwrap();
        assert_eq!(compute_tree_height(&t).unwrap(), 0);
        assert_eq!(find_roots_doubling(&t).unwrap().cluster_count(), 3);
    }

    #[test]
    fn cut_d1_roots() {
        let t = d1_cut();
        let a = find_roots_doubling(&t).unwrap();
        assert_eq!(a.root_of(), &[1, 1, 1, 3, 3]);
        assert_eq!(find_root_sequential(&t, 4).unwrap(), 3);
        assert_eq!(find_root_sequential(&t, 1).unwrap(), 1);
        assert_eq!(a.clusters()[&1], vec![0, 1, 2]);
        assert_eq!(a.sizes(), vec![3, 2]);
    }

    #[test]
    fn cycles_are_rejected() {
        let two = InTree::from_parts(vec![1, 0], vec![Some(1.0); 2], vec![]).unwrap();
        assert!(matches!(find_roots_doubling(&two), Err(Error::Cycle(_))));
        assert!(matches!(find_root_sequential(&two, 0), Err(Error::Cycle(1))));
        assert!(matches!(compute_tree_height(&two), Err(Error::Cycle(_))));

        let three = InTree::from_parts(vec![0, 2, 3, 1], vec![None, Some(1.0), Some(1.0), Some(1.0)], vec![]).unwrap();
        assert!(matches!(find_roots_doubling(&three), Err(Error::Cycle(_))));
        assert!(matches!(compute_tree_height(&three), Err(Error::Cycle(_))));

        let outside = InTree::from_parts(vec![0, 5], vec![None, Some(1.0)], vec![]).unwrap();
        assert!(matches!(find_roots_doubling(&outside), Err(Error::InvalidTree(_))));
    }

    #[test]
    fn merge_singletons_d1_k3() {
        let mut t = d1_cut();
        t.cut_edge(0, CutMethod::K).unwrap();
        let a = find_roots_doubling(&t).unwrap();
        assert_eq!(a.cluster_count(), 3);
        let (t2, a2) = merge_singletons(&t, &a).unwrap();
        assert_eq!(a2.cluster_count(), 2);
        assert_eq!(a2.root_of(), &[1, 1, 1, 3, 3]);
        assert_eq!(t2.target(0), 1);
    }

    #[test]
    fn merge_without_singletons_is_identity() {
        let t = d1_cut();
        let a = find_roots_doubling(&t).unwrap();
        let (t2, a2) = merge_singletons(&t, &a).unwrap();
        assert_eq!(t2, t);
        assert_eq!(a2, a);
    }

    #[test]
    fn original_singleton_root_stays() {
        // Vertex 0 is the never-cut global root and is alone.
        let t = InTree::from_parts(vec![0, 1, 1], vec![None, None, Some(1.0)], vec![]).unwrap();
        let a = find_roots_doubling(&t).unwrap();
        let (_, a2) = merge_singletons(&t, &a).unwrap();
        assert_eq!(a2.cluster_count(), 2);
    }

    #[test]
    fn ceil_log2_values() {
        let got: Vec<usize> = [1, 2, 3, 4, 5, 8, 9, 165].iter().map(|&n| ceil_log2(n)).collect();
        assert_eq!(got, vec![0, 1, 2, 2, 3, 3, 4, 8]);
    }
}
