//! End-to-end runs: distances, potentials, in-tree, cutting, root finding,
//! optional merging, and evaluation against ground truth.

use std::collections::{BTreeMap, HashMap};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cutting::{
    cut_k_longest, identify_edge_by_click, int_dcc_cut, k_dcc_cut, supervised_cut, ClickPoint, SelectionBox,
};
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::intree::{build_intree, CutMethod, InTree};
use crate::metrics::{
    categorical_distance_matrix_with, euclidean_distance_matrix, mixed_distance_matrix, CategoricalRule, DistanceMatrix,
};
use crate::potential::{compute_potentials, PotentialField};
use crate::rootfind::{compute_tree_height, find_roots_doubling, merge_singletons, ClusterAssignment};
use crate::supervision::SupervisionSet;

/// Kernel bandwidth, or `Auto` for the mean off-diagonal distance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Sigma {
    Value(f64),
    Auto,
}

impl Sigma {
    /// Resolves `Auto` against a distance matrix. Falls back to 1 when the mean
    /// distance is zero (a single point, or all points coincident), where every
    /// bandwidth yields the same field.
    pub fn resolve(self, d: &DistanceMatrix) -> f64 {
        match self {
            Sigma::Value(s) => s,
            Sigma::Auto => {
                let mean = d.mean_off_diagonal();
                if mean > 0.0 {
                    mean
                } else {
                    1.0
                }
            }
        }
    }
}

impl std::str::FromStr for Sigma {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("auto") {
            return Ok(Sigma::Auto);
        }
        let v: f64 = s
            .parse()
            .map_err(|_| Error::InvalidParameter(format!("sigma `{s}` is neither a number nor `auto`")))?;
        if v.is_nan() || v <= 0.0 || v.is_infinite() {
            return Err(Error::InvalidParameter(format!("sigma must be positive, got {v}")));
        }
        Ok(Sigma::Value(v))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CutStrategy {
    K {
        k_clusters: usize,
    },
    Supervised,
    KDcc {
        k_clusters: usize,
    },
    /// Replays recorded clicks; the dataset must be 2-D numeric.
    Interactive {
        clicks: Vec<ClickPoint>,
    },
    IntDcc {
        selection: SelectionBox,
    },
}

impl CutStrategy {
    pub fn method(&self) -> CutMethod {
        match self {
            CutStrategy::K { .. } => CutMethod::K,
            CutStrategy::Supervised => CutMethod::Supervised,
            CutStrategy::KDcc { .. } => CutMethod::Kdcc,
            CutStrategy::Interactive { .. } => CutMethod::Interactive,
            CutStrategy::IntDcc { .. } => CutMethod::IntDcc,
        }
    }
}

/// Where supervised labels come from.
#[derive(Debug, Clone, PartialEq)]
pub enum Supervision {
    Given(SupervisionSet),
    /// Draw this many points uniformly from the dataset's truth labels using the run seed.
    Sample(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub sigma: Sigma,
    pub cut: CutStrategy,
    pub supervision: Option<Supervision>,
    pub merge_singletons: bool,
    pub merge_by_label: bool,
    pub seed: u64,
    pub categorical_rule: CategoricalRule,
}

impl RunConfig {
    pub fn new(sigma: Sigma, cut: CutStrategy) -> Self {
        Self {
            sigma,
            cut,
            supervision: None,
            merge_singletons: false,
            merge_by_label: false,
            seed: 0,
            categorical_rule: CategoricalRule::Mismatch,
        }
    }

    pub fn with_supervision(mut self, supervision: Supervision) -> Self {
        self.supervision = Some(supervision);
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn merging_singletons(mut self, on: bool) -> Self {
        self.merge_singletons = on;
        self
    }

    pub fn merging_by_label(mut self, on: bool) -> Self {
        self.merge_by_label = on;
        self
    }
}

/// Distance matrix with the metric implied by the schema: Euclidean for
/// numeric data, mismatch count for categorical data, their sum for mixed data.
pub fn distances_for(ds: &Dataset, rule: CategoricalRule) -> Result<DistanceMatrix> {
    if ds.is_all_numeric() {
        euclidean_distance_matrix(ds)
    } else if ds.is_all_categorical() {
        categorical_distance_matrix_with(ds, rule)
    } else {
        Ok(mixed_distance_matrix(ds))
    }
}

/// The cut-independent part of a run: distances, potentials and the initial in-tree.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub distances: DistanceMatrix,
    pub potentials: PotentialField,
    pub tree: InTree,
}

impl Prepared {
    pub fn new(distances: DistanceMatrix, sigma: Sigma) -> Result<Self> {
        let potentials = compute_potentials(&distances, sigma.resolve(&distances))?;
        let tree = build_intree(&distances, &potentials)?;
        Ok(Self {
            distances,
            potentials,
            tree,
        })
    }

    pub fn from_dataset(ds: &Dataset, sigma: Sigma, rule: CategoricalRule) -> Result<Self> {
        Self::new(distances_for(ds, rule)?, sigma)
    }

    pub fn sigma(&self) -> f64 {
        self.potentials.sigma()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClusterSummary {
    /// 1-based root index.
    pub root: usize,
    pub size: usize,
    pub label: Option<String>,
    /// Whether `label` came from supervision rather than the majority vote.
    pub supervised: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub cluster_count: usize,
    pub error_rate: f64,
    pub unassigned_fraction: f64,
    pub per_cluster: Vec<ClusterSummary>,
    pub rounds_used: usize,
    pub height: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub tree: InTree,
    pub potentials: PotentialField,
    pub assignment: ClusterAssignment,
    pub supervision: Option<SupervisionSet>,
    /// Height of the cut forest that root finding ran on.
    pub height: usize,
    pub report: Option<EvalReport>,
}

fn resolve_supervision(ds: &Dataset, cfg: &RunConfig) -> Result<Option<SupervisionSet>> {
    match &cfg.supervision {
        None => Ok(None),
        Some(Supervision::Given(s)) => {
            if let Some((i, _)) = s.entries().iter().find(|(i, _)| *i >= ds.len()) {
                return Err(Error::IndexOutOfRange {
                    index: i + 1,
                    len: ds.len(),
                });
            }
            Ok(Some(s.clone()))
        }
        Some(Supervision::Sample(count)) => {
            let truth = ds
                .truth_labels()
                .ok_or_else(|| Error::InvalidParameter("sampling supervision needs truth labels".into()))?;
            Ok(Some(SupervisionSet::sample(truth, *count, cfg.seed)?))
        }
    }
}

/// Runs every step for `ds`, reusing a precomputed [`Prepared`] stage. `cfg.sigma`
/// is ignored here; the prepared potentials fix the bandwidth.
pub fn run_prepared(ds: &Dataset, prepared: &Prepared, cfg: &RunConfig) -> Result<RunOutput> {
    if prepared.tree.len() != ds.len() {
        return Err(Error::Dimension(format!(
            "prepared stage has {} points, dataset {}",
            prepared.tree.len(),
            ds.len()
        )));
    }
    let supervision = resolve_supervision(ds, cfg)?;
    if cfg.merge_by_label && supervision.is_none() {
        return Err(Error::InvalidParameter("merging by label needs supervision".into()));
    }

    let mut tree = prepared.tree.clone();
    match &cfg.cut {
        CutStrategy::K { k_clusters } => {
            cut_k_longest(&mut tree, *k_clusters)?;
        }
        CutStrategy::KDcc { k_clusters } => {
            k_dcc_cut(&mut tree, &prepared.potentials, *k_clusters)?;
        }
        CutStrategy::Supervised => {
            let sup = supervision
                .as_ref()
                .ok_or_else(|| Error::InvalidParameter("supervised cutting needs supervision".into()))?;
            supervised_cut(&mut tree, sup)?;
        }
        CutStrategy::Interactive { clicks } => {
            let coords = ds
                .coords_2d()
                .ok_or_else(|| Error::Schema("click cutting needs 2-D numeric data".into()))?;
            for &click in clicks {
                let u = identify_edge_by_click(&tree, &coords, click)?;
                tree.cut_edge(u, CutMethod::Interactive)?;
            }
        }
        CutStrategy::IntDcc { selection } => {
            int_dcc_cut(&mut tree, &prepared.potentials, selection)?;
        }
    }

    let height = compute_tree_height(&tree)?;
    let mut assignment = find_roots_doubling(&tree)?;
    if cfg.merge_singletons {
        let (merged_tree, merged) = merge_singletons(&tree, &assignment)?;
        tree = merged_tree;
        assignment = merged;
    }
    if cfg.merge_by_label {
        assignment = merge_by_label(&assignment, supervision.as_ref().expect("checked above"))?;
    }

    let report = ds.truth_labels().map(|truth| {
        let mut r = evaluate(&assignment, truth, supervision.as_ref());
        r.height = Some(height);
        r
    });

    Ok(RunOutput {
        tree,
        potentials: prepared.potentials.clone(),
        assignment,
        supervision,
        height,
        report,
    })
}

/// Full pipeline for one dataset and configuration. Deterministic in
/// `(row order, cfg, cfg.seed)`.
pub fn run(ds: &Dataset, cfg: &RunConfig) -> Result<RunOutput> {
    let prepared = Prepared::from_dataset(ds, cfg.sigma, cfg.categorical_rule)?;
    run_prepared(ds, &prepared, cfg)
}

/// Unions clusters that hold the same supervised label. The merged cluster keeps
/// the smallest of its roots as representative and carries the label.
pub fn merge_by_label(a: &ClusterAssignment, sup: &SupervisionSet) -> Result<ClusterAssignment> {
    let mut label_of_root: BTreeMap<usize, &str> = BTreeMap::new();
    for (i, label) in sup.entries() {
        let root = *a.root_of().get(*i).ok_or(Error::IndexOutOfRange {
            index: i + 1,
            len: a.len(),
        })?;
        match label_of_root.get(&root) {
            Some(existing) if *existing != label => {
                let (first, second) = if *existing < label.as_str() {
                    (existing.to_string(), label.clone())
                } else {
                    (label.clone(), existing.to_string())
                };
                return Err(Error::LabelConflict {
                    root: root + 1,
                    first,
                    second,
                });
            }
            _ => {
                label_of_root.insert(root, label);
            }
        }
    }

    // BTreeMap iteration is ascending, so the first root seen per label is the smallest.
    let mut representative: HashMap<&str, usize> = HashMap::new();
    let mut remap: HashMap<usize, usize> = HashMap::new();
    for (&root, &label) in &label_of_root {
        let rep = *representative.entry(label).or_insert(root);
        remap.insert(root, rep);
    }
    let root_of = a
        .root_of()
        .iter()
        .map(|r| remap.get(r).copied().unwrap_or(*r))
        .collect();
    let labels = representative
        .into_iter()
        .map(|(label, rep)| (rep, label.to_string()))
        .collect();
    Ok(ClusterAssignment::from_root_map(root_of, a.rounds_used()).with_labels(labels))
}

/// Scores an assignment against truth labels.
///
/// A cluster's predicted label is its attached label (from [`merge_by_label`]),
/// else the label of a supervised member, else the majority truth label of its
/// members with ties going to the lexicographically smallest. Every point is
/// assigned under this convention, so `unassigned_fraction` is 0.
pub fn evaluate(a: &ClusterAssignment, truth: &[String], sup: Option<&SupervisionSet>) -> EvalReport {
    let n = a.len();
    assert_eq!(truth.len(), n, "truth labels must cover every point");
    let supervised_label: HashMap<usize, &str> = sup
        .map(|s| s.entries().iter().map(|(i, l)| (*i, l.as_str())).collect())
        .unwrap_or_default();

    let mut wrong = 0usize;
    let mut per_cluster = Vec::with_capacity(a.cluster_count());
    for (&root, members) in a.clusters() {
        let from_supervision = a.label_of_cluster(root).map(str::to_string).or_else(|| {
            let mut labels: Vec<&str> = members
                .iter()
                .filter_map(|m| supervised_label.get(m).copied())
                .collect();
            labels.sort_unstable();
            labels.first().map(|l| l.to_string())
        });
        let supervised = from_supervision.is_some();
        let predicted = from_supervision.unwrap_or_else(|| majority_label(members.iter().map(|&m| truth[m].as_str())));
        wrong += members.iter().filter(|&&m| truth[m] != predicted).count();
        per_cluster.push(ClusterSummary {
            root: root + 1,
            size: members.len(),
            label: Some(predicted),
            supervised,
        });
    }
    per_cluster.sort_by(|x, y| y.size.cmp(&x.size).then(x.root.cmp(&y.root)));

    EvalReport {
        cluster_count: a.cluster_count(),
        error_rate: if n == 0 { 0.0 } else { wrong as f64 / n as f64 },
        unassigned_fraction: 0.0,
        per_cluster,
        rounds_used: a.rounds_used(),
        height: None,
    }
}

fn majority_label<'a>(labels: impl Iterator<Item = &'a str>) -> String {
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for l in labels {
        *counts.entry(l).or_default() += 1;
    }
    // Strictly-greater keeps the lexicographically smallest label among ties.
    let mut best: Option<(&str, usize)> = None;
    for (l, c) in counts {
        if best.is_none_or(|(_, bc)| c > bc) {
            best = Some((l, c));
        }
    }
    best.map(|(l, _)| l.to_string()).unwrap_or_default()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialResult {
    pub trial: usize,
    pub disagreement: f64,
    pub cluster_count: usize,
    pub distinct_potentials: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PermutationStats {
    pub trials: Vec<TrialResult>,
    /// Mean and sample standard deviation over trials after the benchmark (0 for a single trial).
    pub mean: f64,
    pub sd: f64,
}

impl PermutationStats {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("trial,disagreement,cluster_count,distinct_potentials\n");
        for t in &self.trials {
            out.push_str(&format!(
                "{},{},{},{}\n",
                t.trial + 1,
                t.disagreement,
                t.cluster_count,
                t.distinct_potentials
            ));
        }
        out
    }
}

/// Fraction of points whose cluster in `other` maps (by majority overlap) to a
/// benchmark cluster different from their own benchmark cluster. Both
/// assignments are given as per-point cluster ids over the same point order.
pub fn partition_disagreement(benchmark: &[usize], other: &[usize]) -> f64 {
    assert_eq!(benchmark.len(), other.len());
    if benchmark.is_empty() {
        return 0.0;
    }
    let mut overlap: HashMap<usize, BTreeMap<usize, usize>> = HashMap::new();
    for (&b, &o) in benchmark.iter().zip(other) {
        *overlap.entry(o).or_default().entry(b).or_default() += 1;
    }
    let mapping: HashMap<usize, usize> = overlap
        .into_iter()
        .map(|(o, counts)| {
            let mut best = (usize::MAX, 0);
            for (b, c) in counts {
                if c > best.1 {
                    best = (b, c);
                }
            }
            (o, best.0)
        })
        .collect();
    let wrong = benchmark.iter().zip(other).filter(|(b, o)| mapping[*o] != **b).count();
    wrong as f64 / benchmark.len() as f64
}

/// Reruns the pipeline on `trials` random row orders and measures how far each
/// partition strays from the first one, after mapping rows back to their
/// original positions.
///
/// Trials run one after another; every trial's N² kernels are already parallel
/// and each holds a full distance matrix.
pub fn permutation_experiment(ds: &Dataset, cfg: &RunConfig, trials: usize) -> Result<PermutationStats> {
    if !matches!(cfg.cut, CutStrategy::K { .. }) {
        return Err(Error::InvalidParameter("permutation experiment uses K-Cut".into()));
    }
    if trials == 0 {
        return Err(Error::InvalidParameter("at least one trial is required".into()));
    }
    let n = ds.len();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut benchmark: Option<Vec<usize>> = None;
    let mut results = Vec::with_capacity(trials);
    for trial in 0..trials {
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut rng);
        let permuted = ds.permuted(&order)?;
        let out = run(&permuted, cfg)?;
        // Row `pos` of the permuted data is original row `order[pos]`; label clusters
        // by the original index of their root so ids are comparable across trials.
        let mut clusters = vec![0usize; n];
        for (pos, &orig) in order.iter().enumerate() {
            clusters[orig] = order[out.assignment.root_of()[pos]];
        }
        let disagreement = match &benchmark {
            None => 0.0,
            Some(b) => partition_disagreement(b, &clusters),
        };
        if benchmark.is_none() {
            benchmark = Some(clusters);
        }
        results.push(TrialResult {
            trial,
            disagreement,
            cluster_count: out.assignment.cluster_count(),
            distinct_potentials: out.potentials.distinct_count(),
        });
    }
    let tail: Vec<f64> = results.iter().skip(1).map(|t| t.disagreement).collect();
    let (mean, sd) = mean_sd(&tail);
    Ok(PermutationStats {
        trials: results,
        mean,
        sd,
    })
}

fn mean_sd(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (0.0, 0.0);
    }
    let mean = xs.iter().sum::<f64>() / xs.len() as f64;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (xs.len() - 1) as f64;
    (mean, var.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d1() -> Dataset {
        Dataset::from_csv_str("num:x,label:truth\n0,A\n1,A\n2,A\n10,B\n11,B\n").unwrap()
    }

    fn strings(xs: &[&str]) -> Vec<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn d1_k2_run() {
        let cfg = RunConfig::new(Sigma::Value(1.0), CutStrategy::K { k_clusters: 2 });
        let out = run(&d1(), &cfg).unwrap();
        assert_eq!(out.assignment.root_of(), &[1, 1, 1, 3, 3]);
        assert_eq!(out.height, 1);
        let report = out.report.unwrap();
        assert_eq!(report.error_rate, 0.0);
        assert_eq!(report.cluster_count, 2);
        assert_eq!(report.height, Some(1));
    }

    #[test]
    fn full_dismemberment_has_no_error() {
        let ds = d1();
        let cfg = RunConfig::new(Sigma::Value(1.0), CutStrategy::K { k_clusters: ds.len() });
        let out = run(&ds, &cfg).unwrap();
        assert_eq!(out.assignment.cluster_count(), 5);
        assert_eq!(out.report.unwrap().error_rate, 0.0);
    }

    #[test]
    fn supervised_requires_labels() {
        let cfg = RunConfig::new(Sigma::Value(1.0), CutStrategy::Supervised);
        assert!(run(&d1(), &cfg).is_err());
        let cfg = RunConfig::new(Sigma::Value(1.0), CutStrategy::K { k_clusters: 2 }).merging_by_label(true);
        assert!(run(&d1(), &cfg).is_err());
    }

    #[test]
    fn interactive_needs_2d() {
        let cfg = RunConfig::new(
            Sigma::Value(1.0),
            CutStrategy::Interactive {
                clicks: vec![ClickPoint { x: 5.0, y: 0.0 }],
            },
        );
        assert!(matches!(run(&d1(), &cfg), Err(Error::Schema(_))));
    }

    #[test]
    fn sigma_parsing_and_auto() {
        assert_eq!("auto".parse::<Sigma>().unwrap(), Sigma::Auto);
        assert_eq!("2.5".parse::<Sigma>().unwrap(), Sigma::Value(2.5));
        assert!("0".parse::<Sigma>().is_err());
        assert!("x".parse::<Sigma>().is_err());
        let d = distances_for(&d1(), CategoricalRule::Mismatch).unwrap();
        assert!((Sigma::Auto.resolve(&d) - 6.2).abs() < 1e-12);
        let single = distances_for(
            &Dataset::from_numeric_rows(vec![vec![1.0]]).unwrap(),
            CategoricalRule::Mismatch,
        )
        .unwrap();
        assert_eq!(Sigma::Auto.resolve(&single), 1.0);
    }

    #[test]
    fn merge_by_label_examples() {
        let a = ClusterAssignment::from_root_map(vec![0, 0, 2, 2, 4], 1);
        let sup = SupervisionSet::new(vec![(1, "A".into()), (3, "A".into())], 5).unwrap();
        let m = merge_by_label(&a, &sup).unwrap();
        assert_eq!(m.cluster_count(), 2);
        assert_eq!(m.root_of(), &[0, 0, 0, 0, 4]);
        assert_eq!(m.label_of_cluster(0), Some("A"));
        assert_eq!(m.label_of_cluster(4), None);

        let sup = SupervisionSet::new(vec![(0, "A".into()), (2, "B".into())], 5).unwrap();
        let m = merge_by_label(&a, &sup).unwrap();
        assert_eq!(m.cluster_count(), 3);
        assert_eq!(m.label_of_cluster(2), Some("B"));

        let bad = SupervisionSet::new(vec![(0, "A".into()), (1, "B".into())], 5).unwrap();
        assert!(matches!(
            merge_by_label(&a, &bad),
            Err(Error::LabelConflict { root: 1, .. })
        ));
    }

    #[test]
    fn evaluate_counts_errors() {
        let truth = strings(&["A", "A", "B", "B"]);
        let perfect = ClusterAssignment::from_root_map(vec![0, 0, 2, 2], 0);
        assert_eq!(evaluate(&perfect, &truth, None).error_rate, 0.0);

        let mut t100: Vec<String> = vec!["A".into(); 50];
        t100.extend(vec!["B".to_string(); 50]);
        let mut roots: Vec<usize> = vec![0; 50];
        roots.extend(vec![50; 50]);
        roots[10] = 50;
        let one_off = ClusterAssignment::from_root_map(roots, 0);
        assert!((evaluate(&one_off, &t100, None).error_rate - 0.01).abs() < 1e-15);
    }

    #[test]
    fn supervised_label_overrides_majority() {
        let truth = strings(&["A", "B", "B"]);
        let a = ClusterAssignment::from_root_map(vec![0, 0, 0], 0);
        let sup = SupervisionSet::new(vec![(0, "A".into())], 3).unwrap();
        let r = evaluate(&a, &truth, Some(&sup));
        assert!((r.error_rate - 2.0 / 3.0).abs() < 1e-15);
        assert!(r.per_cluster[0].supervised);
        let r = evaluate(&a, &truth, None);
        assert!((r.error_rate - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn majority_ties_go_to_smallest_label() {
        assert_eq!(majority_label(["b", "a", "b", "a"].into_iter()), "a");
        assert_eq!(majority_label(["b", "a", "b"].into_iter()), "b");
    }

    #[test]
    fn disagreement_metric() {
        assert_eq!(partition_disagreement(&[0, 0, 1, 1], &[7, 7, 9, 9]), 0.0);
        assert_eq!(partition_disagreement(&[0, 0, 0, 1], &[5, 5, 6, 6]), 0.25);
        assert_eq!(partition_disagreement(&[0, 0, 1, 1], &[3, 3, 3, 3]), 0.5);
    }

    #[test]
    fn single_trial_is_zero() {
        let cfg = RunConfig::new(Sigma::Value(1.0), CutStrategy::K { k_clusters: 2 });
        let stats = permutation_experiment(&d1(), &cfg, 1).unwrap();
        assert_eq!(stats.trials.len(), 1);
        assert_eq!(stats.mean, 0.0);
        assert_eq!(stats.sd, 0.0);
        assert!(stats.to_csv().starts_with("trial,disagreement"));
        let sup = RunConfig::new(Sigma::Value(1.0), CutStrategy::Supervised);
        assert!(permutation_experiment(&d1(), &sup, 3).is_err());
    }
}
