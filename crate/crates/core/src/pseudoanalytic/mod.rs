//! Generating pairs, `(F,G)`-integration and formal powers on a radial
//! quadrature lattice centered at `z0 = 0`.

mod integral;
mod lattice;
mod pair;
mod powers;

pub use integral::{fg_integral, FgIntegral};
pub use lattice::{RayLattice, DEFAULT_RAYS, DEFAULT_RAY_NODES};
pub use pair::{
    build_pair, characteristic_coefficients, characteristic_coefficients_of, fg_derivative,
    lattice_vekua_residual, transform_solution_to_w, vekua_residual, wirtinger,
    CharacteristicCoefficients, GeneratingPairField, PairProfile, Parity,
};
pub use powers::{
    formal_powers, formal_powers_with_coefficient, Coefficient, FormalPowerSet, Retain,
};
