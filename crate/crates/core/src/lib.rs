//! Benefits-dependency-network (BDN) models for value-driven software
//! process improvement.
//!
//! A model links adoptable practices (with AND-OR prerequisite groups) to the
//! benefits they promise, and benefits to components of a Software Value Map
//! taxonomy. On top of that structure the crate provides:
//!
//! * [`model`]: parsing and validation diagnostics,
//! * [`graph`]: enabled sets, layering, minimal prerequisite closures and
//!   value tracing,
//! * [`assessment`]: benefit realization, value attainment, plans and
//!   next-step recommendations,
//! * [`merge`]: matching and merging models of different origin, and
//!   evidence-driven evolution of realization edges,
//! * [`io`]: canonical JSON, DOT export and report rendering.
//!
//! With the default `parallel` feature, batch work (what-if evaluation,
//! batch assessment) runs on the rayon thread pool; see [`exec`].

pub mod assessment;
pub mod error;
pub mod exec;
pub mod fixtures;
pub mod graph;
mod index;
pub mod io;
pub mod key;
pub mod merge;
pub mod model;
pub mod taxonomy;

pub use assessment::{
    AdoptionState, AdoptionStatus, AssessmentConfig, AssessmentReport, BenefitStatus, PlanMode, PlanStep,
    RealizationStatus,
};
pub use error::{Error, Result};
pub use key::canonical_key;
pub use model::{BdnModel, Diagnostic, Origin};
pub use taxonomy::{SvmPath, SvmTaxonomy};
