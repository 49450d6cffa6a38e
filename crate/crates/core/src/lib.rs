//! Interaction force estimation for actuators coupled to an unknown
//! environment.
//!
//! A super-twisting robust exact differentiator runs on the measured
//! position `sigma`. Once it has converged, its switching term
//! `K2 sign(e)` carries, on average, the full acceleration of the actuator.
//! Subtracting the nominal dynamics `f = (u - gamma sign(x2_hat)) / m`
//! leaves the environmental disturbance as seen through the coupling shaper
//! `S12`, and the causal filter `g` of `G(s) = m / S12(s)` turns it back
//! into a force:
//!
//! ```text
//! F2_hat = g[K2 sign(e) - f(u, x2_hat)]
//! ```
//!
//! Modules:
//!
//! * [`signal`]: sampled series, CSV tables, transfer functions and the
//!   lead-lag shaper.
//! * [`sta`] and [`fir`]: the differentiator, injection extraction and the
//!   optional chattering low-pass.
//! * [`shaping`]: bilinear discretization and the `g` filter.
//! * [`plant`]: a synthetic actuator producing datasets with ground truth.
//! * [`estimate`] and [`identify`]: the estimator, and identification of
//!   `L` and of the shaper with the friction level.
//! * [`scenario`], [`plot`] and [`cli`]: JSON scenarios, SVG overlays and
//!   the `eoi-force` command.
//!
//! ```
//! use eoi_force::plant::{rig_coupling, simulate_with, ControlSpec, LoadProfile, PlantParams, Reference, TrackingLaw};
//! use eoi_force::estimate::{estimate_force, force_metrics, EstimatorConfig, NominalModel};
//! use eoi_force::signal::SamplingConfig;
//!
//! let plant = PlantParams { noise_std: 1e-4, ..PlantParams::default() };
//! let control = ControlSpec::Tracking(TrackingLaw {
//!     kp: 5e4,
//!     kd: 300.0,
//!     deriv_tau: 5e-3,
//!     reference: Reference { v0: 0.5, amplitude: 0.2, period: 5.0 },
//! });
//! let load = LoadProfile::saw(5000.0, 6.0, 1000.0).with_ramps(1.5, 0.6);
//! let data = simulate_with(&plant, &control, &load, &SamplingConfig::new(1e-3, 10.0, 1)?)?;
//!
//! let nominal = NominalModel { m: 1.7, gamma: 160.0 };
//! let config = EstimatorConfig::new(150.0, nominal, &rig_coupling(), 1e-3)?;
//! let est = estimate_force(&data, &config)?;
//! let m = force_metrics(&est.f2_hat, data.f2_ref.as_ref().unwrap(), est.skip)?;
//! assert!(m.relative_rmse < 0.05);
//! # Ok::<(), eoi_force::Error>(())
//! ```

pub mod cli;
pub mod error;
pub mod estimate;
pub mod fir;
pub mod identify;
pub mod plant;
pub mod plot;
pub mod scenario;
pub mod shaping;
pub mod signal;
pub mod simplex;
pub mod sta;

pub use error::{Error, ExitStatus, Result};
