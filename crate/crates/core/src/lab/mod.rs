//! Instance families, the verifier battery and sweep reporting.

mod battery;
mod config;
mod instance;
mod sweep;

pub use battery::{
    verify_all, BatteryOptions, BatteryReport, CheckOutcome, B_LIMIT, CHECKS, COMMUTATOR_TRIPLES,
    CONCENTRATION_BUDGET, COVER_SET_LIMIT, MAX_B_TUPLES, ORACLE_BUDGET, ORACLE_SAMPLES,
    PRODUCT_BUDGET, SERIES_LIMIT, STAB_SAMPLES,
};
pub use config::{BatteryConfig, Caps, Family, InstanceConfig, SweepFile, CAP_ENV, SCHEMA_VERSION};
pub use instance::{gen_instance, Instance, OrbitSummary, MAX_DRAWS};
pub use sweep::{run_sweep, SweepResult, SweepRow};
