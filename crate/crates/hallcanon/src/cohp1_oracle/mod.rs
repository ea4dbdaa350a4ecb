//! Brute-force Hall algebra of coherent sheaves on `P^1` over `F_q`.

mod aut;
mod hall;
mod kclass;
mod local;
mod psi;
mod sheaf;

use thiserror::Error;

pub use aut::{aut_count, aut_count_bruteforce, ext_dim, hom_dim, torsion_aut, vb_aut};
pub use hall::{
    coprime_form_pairs, coprime_form_pairs_bruteforce, extensions, green_coproduct, hall_number, hall_product,
    invert_value, jordan_hall_number, normalize_value, v_power, CoproductFn, HallFn, ProductConvention, Twist,
};
pub use kclass::{euler_form, symmetric_form, KClass};
pub use psi::{
    calibrate, vb_partition_pair_count, Calibration, Psi, VPower, DEFAULT_GOLDEN,
};
pub use sheaf::{
    bundles, enumerate_sheaves, enumerate_sheaves_in_window, points_up_to, torsion_sheaves, ClosedPoint, PointKind,
    SheafIso,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error(transparent)]
    Field(#[from] crate::ff::FieldError),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("calibration failed: {0}")]
    Calibration(String),
    #[error("golden file: {0}")]
    Golden(String),
    #[error("internal: {0}")]
    Internal(String),
}
