//! Particles in two distant quantum wells coupled through a common continuum.
//!
//! The crate covers the wide-band one-particle dynamics ([`single`]), the
//! dark/bright basis ([`basis`]), many-fermion and many-boson asymptotics
//! ([`fermion`], [`boson`]) and a discretized-reservoir oracle ([`oracle`])
//! used to check all of them. [`scenario`] drives runs and sweeps from a
//! config file.

pub mod basis;
pub mod boson;
pub mod error;
pub mod fermion;
pub mod io;
pub mod model;
pub mod oracle;
pub mod scenario;
pub mod single;

pub use error::{Error, Result};
pub use model::{ParallelWellPair, Parity, Well, WellPair};
