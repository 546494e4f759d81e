//! Trajectory-level engines for qubit registers under continuously monitored
//! Pauli and depolarizing noise, together with the bridge-driven stochastic
//! processes that reverse them.
//!
//! The crate covers six layers:
//!
//! * dense linear algebra on small registers ([`operator`], [`state`],
//!   [`density`]) and fast Pauli-word actions ([`pauli`]),
//! * closed-form exponentials of Pauli generators ([`expm`]),
//! * counter-based Gaussian noise, measurement records with Lévy areas, and
//!   Brownian bridges ([`noise`], [`record`], [`bridge`]),
//! * forward/reverse diffusion for a single monitored Pauli channel
//!   ([`channel`]) and the matching density-matrix flow ([`sme`]),
//! * the three-channel depolarizing analogue with its second-order Magnus
//!   surrogate ([`depol`]),
//! * applications: diffusion-driven gates ([`gate`]) and a measurement-based
//!   protocol that realises the non-unitary reverse drift ([`teleport`]).
//!
//! Everything is `no_std` + `alloc`; IO, parallel ensembles, and the CLI live
//! in the companion `qrev-sim` crate.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod bridge;
pub mod channel;
pub mod density;
pub mod depol;
pub mod error;
pub mod expm;
pub mod gate;
pub mod noise;
pub mod operator;
pub mod pauli;
pub mod record;
pub mod sme;
pub mod state;
pub mod teleport;

pub use bridge::BridgeState;
pub use channel::{ChannelConfig, CycleResult, Stepper, TrajectoryResult};
pub use density::DensityMatrix;
pub use depol::DepolarizingConfig;
pub use error::{CoreError, Result};
pub use gate::{GateConfig, ThetaSampler};
pub use noise::{NoiseStream, StreamId};
pub use operator::Operator;
pub use pauli::{Axis, Mode, PauliString};
pub use record::{LevyAreas, MeasurementRecord};
pub use state::{fidelity, QuantumState};
pub use teleport::ResourceBudget;

pub use num_complex::Complex64;

/// The imaginary unit as a `Complex64`.
pub const IM: Complex64 = Complex64::new(0.0, 1.0);
