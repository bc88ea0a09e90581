//! Ergotropic volume: energetic certification of genuine multipartite
//! entanglement for pure states, with exact, collective-spin, free-fermion
//! and circuit backends.

pub mod analysis;
pub mod dicke;
pub mod ergotropy;
pub mod error;
pub mod freefermion;
pub mod gme;
pub mod hilbert;
pub mod models;
pub mod optim;
pub mod qcircuit;

pub use ergotropy::{
    enumerate_bipartitions, ergotropic_volume, exact_volume, quenched_gap, Backend, BipartitionMode, Cut, ErgotropyReport,
    GapEntry, LocalSpectrum,
};
pub use error::{Error, Result};
pub use hilbert::{Bipartition, CMatrix, CVector, DensityOperator, PureState, SubsystemDims, C64};
pub use models::{Boundary, HamiltonianSpec};
pub use optim::{OptResult, OptimizerConfig};

/// Crate version, recorded in output headers.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
