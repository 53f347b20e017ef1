//! Parameter vectors, temperature scaling, open-circuit data and time-series
//! containers shared by the models and the identification pipeline.

pub mod arrhenius;
pub mod cell;
pub mod curves;
pub mod ecm_params;
pub mod pbm_params;
pub mod series;

pub use arrhenius::SegmentedArrhenius;
pub use cell::{max_c_rate, CellSpec};
pub use curves::{OcpCurve, OcvSurface, Table1d, Table2d};
pub use ecm_params::{EcmParams, RcLookup, ECM_SOC_GRID, ECM_TEMP_GRID_C};
pub use pbm_params::{soc_from_bulk_concentration, PbmConstants, PbmParams, PbmProperties, PbmTransport};
pub use series::{Dataset, ProfileKind, Role, TimeSeries};
