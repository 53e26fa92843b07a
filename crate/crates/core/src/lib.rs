//! Mixed-type tabular missing-data toolkit.
//!
//! The pieces, bottom to top:
//!
//! - [`table`]: mixed-type tables with explicit missing masks, CSV + schema
//!   sidecar I/O, missingness accounting, list-wise deletion.
//! - [`missingness`]: MCAR/MAR/MNAR amputation, a correlated synthetic data
//!   generator, and row partitioning into tracks.
//! - [`learners`]: from-scratch CART trees, random forests, logistic
//!   regression, naive Bayes, and HEOM nearest-neighbor search.
//! - [`imputers`]: mean/mode, random-draw, KNN, MICE, EM, and missForest
//!   imputation behind one deterministic contract.
//! - [`cross`]: union-schema track alignment and cross-dataset imputation.
//! - [`eval`]: stratified k-fold benchmark harness, NRMSE/PFC imputation
//!   error, and report rendering.
//!
//! Everything stochastic is a pure function of its inputs and a seed; results
//! do not depend on thread count or scheduling.

pub mod cross;
pub mod error;
pub mod eval;
pub mod imputers;
pub mod learners;
pub mod missingness;
pub mod rng;
pub mod table;

pub use error::{Error, Result};

// re-exported for callers that build matrices for the EM helpers
pub use nalgebra;
