//! Numeric tolerances.
//!
//! The validation tolerance used by state and measurement constructors is a
//! single global knob: it defaults to 1e-10, can be overridden by the
//! `RED_SIM_TOLERANCE` environment variable at first use, and can be set
//! programmatically with [`set_global`]. The remaining constants are contract
//! thresholds fixed by the operations that use them.

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::OnceLock;

/// Default validation tolerance.
pub const DEFAULT: f64 = 1e-10;

/// Completeness deviation allowed for a Kraus set.
pub const KRAUS_COMPLETENESS: f64 = 1e-9;

/// Allowed deviation of outcome probabilities from a total of 1.
pub const PROBABILITY_SUM: f64 = 1e-8;

/// Outcomes with probability below this are omitted from distributions.
pub const ZERO_PROBABILITY: f64 = 1e-12;

/// Singular values below this are treated as zero Schmidt rank contributions.
pub const SCHMIDT_RANK_CUTOFF: f64 = 1e-12;

/// Entrywise tolerance for density-matrix reconstruction checks.
pub const ENTRYWISE: f64 = 1e-8;

static GLOBAL: OnceLock<AtomicU64> = OnceLock::new();

fn cell() -> &'static AtomicU64 {
    GLOBAL.get_or_init(|| {
        let initial = std::env::var("RED_SIM_TOLERANCE")
            .ok()
            .and_then(|v| v.parse::<f64>().ok())
            .filter(|t| t.is_finite() && *t > 0.0)
            .unwrap_or(DEFAULT);
        AtomicU64::new(initial.to_bits())
    })
}

/// Current global validation tolerance.
pub fn global() -> f64 {
    f64::from_bits(cell().load(Ordering::Relaxed))
}

/// Override the global validation tolerance for this process.
pub fn set_global(tol: f64) {
    assert!(tol.is_finite() && tol > 0.0, "tolerance must be positive");
    cell().store(tol.to_bits(), Ordering::Relaxed);
}
