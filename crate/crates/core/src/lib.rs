//! Simulation core for a geometric entangling gate between two logical qubits
//! held in fiber-linked optical cavities.
//!
//! Each cavity contains two three-level atoms (ground levels `|0>`, `|1>`,
//! excited level `|e>`); a short fiber couples the two cavity modes, and the
//! resulting one-excitation sector is described by three delocalized field
//! modes.  A logical qubit lives in the single-atom-flipped subspace of each
//! cavity pair, which is insensitive to collective dephasing.  Driving both
//! atoms of each cavity with far-detuned classical fields displaces the three
//! field modes along closed loops in phase space; when every loop closes, the
//! state picks up a purely geometric phase that depends on the logical basis
//! state, realizing a controlled-phase gate without populating the excited
//! atomic levels.
//!
//! The crate is split by level of description:
//!
//! * [`model`]: system parameters and the dispersive effective couplings
//!   (per-mode displacement rates, mode detunings, regime diagnostics).
//! * [`gatephase`]: phase-space trajectories, geometric/dynamic phase
//!   accounting, loop-closure search, and the assembled gate.
//! * [`fullsim`]: numerically exact integration of the driven multilevel
//!   Hamiltonian on a truncated Fock space, used to validate the effective
//!   model.
//!
//! Unit conventions, used everywhere without exception: frequencies are
//! cyclic (values are `omega / 2 pi`) in MHz, times are in microseconds, and
//! phases are in radians.  A factor `2 pi` therefore appears wherever a
//! frequency multiplies a time.
//!
//! The crate is `no_std`-compatible (with `alloc`); the default `std` feature
//! only forwards to the numeric dependencies.

#![cfg_attr(not(feature = "std"), no_std)]
#![deny(unsafe_code)]

extern crate alloc;

pub mod fullsim;
pub mod gatephase;
pub mod model;

pub use num_complex::Complex64;
