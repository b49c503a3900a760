//! Exact densities of new roots and their integrated masses.

mod closed;
mod f2;
mod generic;
mod value;

pub use closed::{
    alpha_moment, attainable_distance, dist_moment_integrals, generator_constant,
    prime_degree_dist_moment, prime_degree_terms, quadratic_class_integral, quadratic_terms,
    rho_base, rho_mass_prime_minimal, rho_mass_quadratic, rho_mass_quadratic_integrated,
    rho_prime_degree_minimal, rho_quadratic, rho_unramified_generator, unit_ball_norm_integral,
};
pub use f2::{
    covariance_disjoint_balls, f2_cell_integral, f2_constants, rho_f2, rho_f2_mass,
    second_moment_nested, BallCovariance,
};
pub use generic::{
    lattice_norm_integral, lattice_norm_integral_capped, rho_at, rho_generic, DEFAULT_CELL_CAP,
    DEFAULT_LATTICE_DEPTH,
};
pub use value::{q_pow, rat, serde_rational, DensityValue, QPow, RationalRepr};
