//! Physical data of the coupled matrix-fracture model and the closed-form
//! solution family used for convergence studies.

mod case;
pub mod jet;

pub use case::{make_case, subdomain_at, AnalyticCase, CaseKind, ProblemData, Region};
pub use jet::Jet;
