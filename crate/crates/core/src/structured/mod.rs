//! Analytic eigenstructure of the cube, the vertex substitution and the
//! cube-cycle product.

pub mod cartesian;
pub mod cube;
pub mod substitution;

pub use cartesian::{
    cartesian_dims, cartesian_pq_spectrum, cartesian_pw_basis, cartesian_pw_eigenbasis, cycle_fourier_basis,
    dirichlet_kernel, normalized_dirichlet_kernel, CartesianComponent, CartesianPwDecomposition, NormIdentity,
};
pub use cube::{binomial, cube_pw_dim, dirichlet_basis, hadamard_by_index, hadamard_vector, neumann_vector};
pub use substitution::{
    augmented_laplacian, neumann_type_eigen, substitution_eigenbasis, substitution_pw_basis, substitution_spectrum,
    AugmentedLaplacian, ModeKind, ModeTag, NeumannTypeEigen, SubstitutionBasis,
};
