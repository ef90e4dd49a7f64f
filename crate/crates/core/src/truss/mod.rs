//! Planar truss statics for the four-bay case study.

mod model;
mod statics;

pub use model::{
    bottom, build_four_bay_truss, top, Member, TrussConfig, TrussModel, ALUMINIUM_MODULUS, ALUMINIUM_YIELD,
    BAY, FAILED_MODULUS, GRAVITY, MEMBER_AREA, PRELOAD_MASS,
};
pub use statics::{measured_strains, member_moduli, solve_statics, Assembly, LoadCase, StaticsSolution};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TrussError {
    #[error("invalid truss model: {0}")]
    Model(String),
    #[error("invalid truss config: {0}")]
    Config(String),
    #[error("invalid load case: {0}")]
    Load(String),
    #[error("stiffness matrix is singular (condition estimate {condition:.3e})")]
    Singular { condition: f64 },
}
