//! Totally real number fields: exact arithmetic, certified embeddings,
//! orbit matrices and real quadratic units.

mod element;
mod field;
mod orbit;
mod unit;

pub use element::{embed, field_norm, AlgebraicNumber};
pub use field::{make_field, TotallyRealField, MAX_DEGREE};
pub use orbit::{orbit_det_squared, orbit_matrix, rescale_basis, OrbitMatrix};
pub use unit::{fundamental_unit_quadratic, module_unit_d2, orbit_period_d2, quadratic_field, regulator};
