//! Discrete-dataset active learning with multiplicative error guarantees:
//! threshold (stump) and decision-tree hypothesis classes over finite point
//! sets, exact disagreement-coefficient computation, LB/UB confidence
//! machinery, two query-efficient learning engines, and a deterministic
//! experiment harness.

pub mod active;
pub mod bounds;
pub mod dataset;
pub mod disagreement;
pub mod error;
pub mod experiments;
pub mod hypotheses;
pub mod labeling;

pub use active::{
    brute_force_optimal, brute_force_optimal_stump, general_active, stump_active,
    stump_population_err, GeneralRun, IterationTrace, RunConfig, RunRecord, RunStats, StumpRun,
    Termination, ThetaMode,
};
pub use bounds::{
    achievable_width, bound_pair, sample_size, vc_dimension, width_sample_size, BoundPair,
    ClassComplexity,
};
pub use dataset::{
    make_diagonal, make_grid, make_grid_with_budget, make_label_source, make_sorted1d,
    make_sorted1d_range, sample_without_replacement, DatasetDescriptor, DatasetKind, GridDataset,
    LabelSource, WeightedDataset,
};
pub use disagreement::{
    ball, dis_region, radius, theta_class, theta_of, weighted_distance, weighted_theta, Budget,
    DisagreementReport, RadiusRow,
};
pub use error::{Error, Result};
pub use experiments::{
    run_experiment, run_label_complexity, run_success_grid, run_theta_scaling, trial_seed,
    ComplexityRow, ExperimentConfig, GridCell, LabelComplexityConfig, RunManifest, ScalingClass,
    SuccessGridConfig, ThetaCenter, ThetaRow, ThetaScalingConfig,
};
pub use hypotheses::{
    distance, enumerate_line_trees, enumerate_stumps, enumerate_trees, err, line_trees_of,
    ClassKind, DecisionTree, Hypothesis, HypothesisClass, LineTree, Stump, TreeNode,
};
pub use labeling::Labeling;
