//! Exact computer algebra for the Drinfeld positive half of quantum affine
//! `sl_2`, realized through coherent sheaves on the projective line.
pub mod canonical;
pub mod cohp1_oracle;
pub mod cyclic_quiver;
pub mod exactalg;
pub mod ff;
pub mod loopalg;
pub mod principal;
pub mod suites;
pub mod symfunc;
