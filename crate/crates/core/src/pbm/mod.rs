//! Reduced-order physics-based model: Padé solid diffusion, polynomial
//! electrolyte, Butler–Volmer kinetics with an intercalation term, and the
//! shared hysteresis submodel.

pub mod electrolyte;
pub mod engine;
pub mod kinetics;
pub mod solid;
pub mod voltage;

pub use electrolyte::{ElectrolyteRom, ElectrolyteRomState};
pub use engine::{init_pbm_state, simulate_pbm, PbmEngine, PbmState, PbmStepOutput};
pub use kinetics::{effective_diffusivity, exchange_current, kinetic_overpotential, KineticConstants, Overpotential};
pub use solid::{solid_step, Particle, SolidRomState};
pub use voltage::{assemble, CellSnapshot, VoltageTerms};
