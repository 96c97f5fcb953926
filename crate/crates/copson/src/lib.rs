//! Embeddings of Copson-Lorentz spaces into Lorentz spaces.
//!
//! The library evaluates the explicit integral conditions characterizing when
//! `CL^{m,p}(u,v)` embeds into `Lambda^q(w)`, builds the discretizing
//! sequences behind those conditions, computes associated-space norms, and
//! cross-checks everything with a brute-force optimizer over nonincreasing
//! step functions.

pub mod associated;
pub mod conditions;
pub mod discretization;
pub mod error;
pub mod ext;
pub mod fundamental;
pub mod grid;
pub mod oracle;
pub mod parse;
pub mod quad;
pub mod step;
pub mod weights;

pub use error::{Error, Result};
pub use step::StepFunction;
pub use weights::WeightExpr;
