//! Sparse storage, ILUT factorization and preconditioned GMRes.

mod csr;
mod gmres;
mod ilut;

pub use csr::Csr;
pub use gmres::{gmres, GmresOptions, GmresResult, Preconditioner};
pub use ilut::{ilut_factor, IlutFactors};

/// Identity preconditioner.
pub struct Identity;

impl Preconditioner for Identity {
    fn apply(&self, r: &[f64], z: &mut [f64]) {
        z.copy_from_slice(r);
    }
}
