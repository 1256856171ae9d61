//! Equivariant singularity theory on jet spaces.
//!
//! Germs are represented by truncated Taylor polynomials ([`poly::Jet`]),
//! symmetry by diagonal sign groups ([`group::SignAction`]). On top of those
//! sit codimension and determinacy ([`local_algebra`]), unfoldings and
//! transversality ([`unfolding`]), the Z2 classification tables
//! ([`classify`]), and the mean-field pressure models ([`meanfield`]).

pub mod classify;
pub mod formats;
pub mod group;
pub mod linalg;
pub mod local_algebra;
pub mod meanfield;
pub mod poly;
pub mod unfolding;
