//! In-tree clustering.
//!
//! Points get a potential from an exponential kernel over pairwise distances,
//! each point links to its nearest neighbor of lower potential (ties resolved
//! by index), and the resulting in-tree is split into clusters by cutting its
//! undesired edges. Every point then finds its root by successor doubling.
//!
//! ```
//! use itc_core::prelude::*;
//!
//! let ds = Dataset::from_csv_str("num:x\n0\n1\n2\n10\n11\n").unwrap();
//! let cfg = RunConfig::new(Sigma::Value(1.0), CutStrategy::K { k_clusters: 2 });
//! let out = run(&ds, &cfg).unwrap();
//! assert_eq!(out.assignment.root_of(), &[1, 1, 1, 3, 3]);
//! ```

pub mod cutting;
pub mod dataset;
pub mod document;
pub mod error;
pub mod intree;
pub mod metrics;
pub mod pipeline;
pub mod potential;
pub mod rootfind;
pub mod supervision;

pub use error::{Error, Result};

pub mod prelude {
    pub use crate::cutting::{
        cut_k_longest, decision_graph, deflection_angle, identify_edge_by_click, int_dcc_cut, int_dcc_cut_select,
        k_dcc_cut, labels_separated, supervised_cut, ClickPoint, DecisionGraphPoint, SelectionBox,
    };
    pub use crate::dataset::{Attribute, AttributeKind, Dataset, Value};
    pub use crate::document::TreeDocument;
    pub use crate::error::{Error, Result};
    pub use crate::intree::{build_intree, validate_intree, Condition, CutMethod, InTree, Violation};
    pub use crate::metrics::{
        categorical_distance_matrix, categorical_distance_matrix_with, euclidean_distance_matrix,
        mixed_distance_matrix, CategoricalRule, DistanceMatrix,
    };
    pub use crate::pipeline::{
        evaluate, merge_by_label, permutation_experiment, run, run_prepared, CutStrategy, EvalReport, Prepared,
        RunConfig, RunOutput, Sigma, Supervision,
    };
    pub use crate::potential::{compute_potentials, PotentialField};
    pub use crate::rootfind::{
        compute_tree_height, find_root_sequential, find_roots_doubling, merge_singletons, ClusterAssignment,
    };
    pub use crate::supervision::SupervisionSet;
}
