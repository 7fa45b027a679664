pub mod density;
pub mod io;
pub mod error;
pub mod operator;
pub mod space;
pub mod state;

pub use density::DensityMatrix;
pub use error::{Error, Result};
pub use operator::SparseOperator;
pub use space::{HilbertSpace, ModeDescriptor, ModeLabel, Polarization};
pub use state::StateVector;
pub mod analysis;
pub mod measure;
pub mod optics;
pub mod protocols;
pub mod states;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/fock-space.md")]
    mod fock_space {}
    #[doc = include_str!("../../../book/src/optics.md")]
    mod optics {}
    #[doc = include_str!("../../../book/src/heralding.md")]
    mod heralding {}
    #[doc = include_str!("../../../book/src/generation.md")]
    mod generation {}
    #[doc = include_str!("../../../book/src/swapping.md")]
    mod swapping {}
    #[doc = include_str!("../../../book/src/teleportation.md")]
    mod teleportation {}
    #[doc = include_str!("../../../book/src/phase-space.md")]
    mod phase_space {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
    #[doc = include_str!("../../../book/src/conventions.md")]
    mod conventions {}
}
