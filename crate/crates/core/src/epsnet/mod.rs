//! Shatter functions, VC dimension and sampled epsilon-nets with bounded
//! multiplicity over finite hypergraphs.

mod calibration;
mod instances;
mod sample;
mod shatter;

pub use calibration::{
    calibrate, pass_rate_bounded, pass_rate_low, CalibratedConstants, CalibrationProtocol,
    CALIBRATED,
};
pub use instances::{interval_instance, strip_instance, REWEIGHT_BOUND};
pub use sample::{
    bounded_net_parameters, edge_counts, low_multiplicity_target, sample_bounded_net,
    sample_low_multiplicity, Multiset, NetReport, NetVariant, MEASURE_TOL,
};
pub use shatter::{sauer_shelah, shatter_function, vc_dimension, MAX_GROUND};
