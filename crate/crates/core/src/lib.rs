pub mod derham;
pub mod error;
pub mod geometry;
pub mod gkz;
pub mod homology;
pub mod lattice;
pub mod linalg;
pub mod nondegeneracy;
pub mod pipeline;
pub mod rational;
pub mod semigroup;
pub mod series;
pub mod sparse;
