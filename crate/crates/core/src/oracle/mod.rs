//! Independent numerical cross-checks of the closed forms: finite-difference
//! diagonalization of the radial operator and dense diagonalization of the
//! angular grid operator.

pub mod angular;
pub mod radial;
pub mod tridiag;

pub use angular::{angular_eig, compare_angular_spectrum, AngularComparison, AngularEigResult};
pub use radial::{
    compare_radial_spectrum, flux_shift_report, radial_convergence, radial_operator, FluxShiftReport,
    LevelComparison, RadialComparison, RadialGrid,
};
pub use tridiag::{eig_sym_tridiagonal, lowest_eigenvalues, sturm_count, SymTridiagonal, SymmetricEigenResult};
