//! Lagrange finite elements on triangles.

pub mod assembly;
pub mod basis;
pub mod field;
pub mod quadrature;
pub mod recovery;
pub mod space;
pub mod transfer;

pub use assembly::{
    assemble_constraint, assemble_cross, assemble_mass, assemble_stiffness, interpolate, interpolate_scalar, load_vector,
    norms, Norms,
};
pub use basis::LagrangeBasis;
pub use field::Field;
pub use quadrature::TriangleQuadrature;
pub use recovery::gradient_recovery;
pub use space::{FeSpace, Geometry};
pub use transfer::transfer;
