//! High-density anomaly detection on mixed numeric/categorical data.
//!
//! The two frameworks, [`ipp`] and [`hmdh`], combine a general anomaly score
//! (detector run on all attributes) with a density score (same detector on
//! the numeric attributes only). Scores are oriented so that lower means more
//! anomalous.

pub mod data;
pub mod datagen;
pub mod detectors;
pub mod error;
pub mod eval;
pub mod hmdh;
pub mod ipp;
pub mod secoda;

pub use data::{load_dataset, write_dataset, Column, ColumnKind, Dataset, EncodedMatrix, Schema, ScoreVector};
pub use detectors::{run_detector, Algorithm, DetectorSpec, Scope};
pub use error::{Error, Result};
pub use hmdh::{hmdh, HmdhConfig, WeightCorrection};
pub use ipp::{ipp, IppConfig, Qfb};
pub use secoda::Discretization;
