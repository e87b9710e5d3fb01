//! Continuous-time quantum walks on finite graphs by the spectral-distribution
//! method.
//!
//! The adjacency operator is tridiagonalized by Lanczos from the start
//! vertex; the resulting Jacobi matrix yields a discrete spectral measure
//! (atoms and Gauss weights) from which the stratum amplitudes
//! q_k(t) = ⟨φ_k|e^{−iAt}|φ₀⟩ and vertex amplitudes follow. The `oracle`
//! module holds dense reference computations used for verification.

pub mod graph;
pub mod io;
pub mod lanczos;
pub mod oracle;
pub mod spectral;
pub mod stratify;
mod tridiag;
pub mod walk;

pub use graph::{Graph, GraphError, KiteLayout};
pub use lanczos::{JacobiCoefficients, LanczosError, OrthonormalBasis};
pub use oracle::OracleError;
pub use spectral::{Atom, SpectralError, SpectralMeasure};
pub use stratify::Stratification;
pub use walk::{AmplitudeSeries, GqdCertificate, GqdStatus, SpectralWalk, WalkError};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Lanczos(#[from] LanczosError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Walk(#[from] WalkError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

impl Error {
    /// True for failures of the numerics rather than of the input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Spectral(SpectralError::NoConvergence | SpectralError::PoleAtAtom(_))
                | Error::Walk(WalkError::Spectral(SpectralError::NoConvergence))
                | Error::Oracle(OracleError::NoConvergence)
                | Error::Lanczos(LanczosError::InvalidCoefficients(_))
        )
    }
}
