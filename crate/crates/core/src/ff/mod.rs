//! Exact linear algebra over prime fields.

mod field;
mod matrix;

pub use field::{field_inverse, is_prime, next_prime, PrimeField, MAX_MODULUS};
pub use matrix::{
    cauchy_matrix, deserialize_rows, rowspace_intersection, serialize_rows, FieldMatrix,
    Intersection, RowEchelon,
};
