//! Multivariate skew-normal and skew-t distributions in two formulations
//! (a latent-skewing construction with a vector slant, and a diagonal-matrix
//! skewing construction), with moment and Mardia-measure machinery, finite
//! mixture fitting by ECM, and an all-subsets benchmarking harness.

pub mod ari;
pub mod dataset;
pub mod density;
pub mod error;
pub mod experiment;
pub mod mixture;
pub mod moments;
pub mod mvn;
pub mod mvt;
pub mod optim;
pub mod par;
pub mod params;
pub mod sample;
pub mod spd;
pub mod special;

pub use error::{Result, SkewError};
