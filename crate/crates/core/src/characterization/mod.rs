//! Characterization from pulse tests: rest-voltage extrapolation, the OCV
//! and hysteresis map, and the hysteresis-parameter fit.

pub mod map;
pub mod plett;
pub mod pulse;
pub mod relaxation;

pub use map::{build_hysteresis_map, rest_points, HysteresisMap, MissingNode, RestPoint};
pub use plett::{fit_plett, map_from_params, PlettFit, PlettFitConfig};
pub use pulse::{find_rests, minor_loop_targets, pulse_protocol, pulse_sequence, PulsePlan, Rest, Side};
pub use relaxation::{fit_relaxation, RelaxationFit};
