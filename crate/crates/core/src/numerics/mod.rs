//! Special functions, sphere quadrature and root finding.

mod bessel;
mod quadrature;
mod roots;

pub use bessel::{bessel_deriv, bessel_j, bessel_y, BesselKind, MAX_ARGUMENT, MAX_ORDER};
pub(crate) use bessel::bessel_j_signed;
pub use quadrature::{
    gauss_legendre, make_sphere_grid, SphereGrid, SphereNode, DEFAULT_PHI_NODES, DEFAULT_THETA_NODES,
    MIN_PHI_NODES, MIN_THETA_NODES,
};
pub use roots::{find_root_bracketed, first_root_in};
