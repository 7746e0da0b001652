//! Coherent, squeezed and non-Gaussian states of a charged particle in a
//! uniform magnetic field.
//!
//! The same states are available as truncated Fock vectors ([`fock`]), as
//! sampled wave functions ([`wavefields`]) and, for Gaussian states, through
//! their covariance dynamics ([`gdyn`], [`minpacket`]).

pub mod config;
pub mod fock;
pub mod gdyn;
pub mod minpacket;
pub mod ode;
pub mod sparse;
pub mod special;
pub mod wavefields;

pub use config::{Gauge, PhysicalConfig};

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Config(#[from] config::ConfigError),
    #[error(transparent)]
    Fock(#[from] fock::FockError),
    #[error(transparent)]
    Wave(#[from] wavefields::WaveError),
    #[error(transparent)]
    Dynamics(#[from] gdyn::DynError),
    #[error(transparent)]
    Packet(#[from] minpacket::MinPacketError),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
