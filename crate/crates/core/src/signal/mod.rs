//! Shared numerical vocabulary: sampled signals, rational transfer
//! functions and the product-form lead-lag shaper.

pub mod poly;
mod series;
mod shaper;
mod table;
mod tf;

pub use series::{mean, rms, rmse, same_dt, sign, SamplingConfig, TimeSeries, DEFAULT_DT};
pub use shaper::{LeadLagShaper, Stage};
pub use table::{format_sig9, SignalTable};
pub use tf::{Factor, Factored, RationalTF};
