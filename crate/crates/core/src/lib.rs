//! Exact homological algebra over prime fields.

pub mod algebra;
pub mod bicomplex;
pub mod comparison;
pub mod complexes;
pub mod grothendieck;
pub mod groupcoh;
pub mod hopf;
pub mod injective;
pub mod linalg;
pub mod spectral;
