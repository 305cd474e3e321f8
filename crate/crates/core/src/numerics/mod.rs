//! Shared numerical substrate: meshes, banded solves, damped Newton,
//! quadrature, interpolation, line fits and symmetric eigenpairs.

pub mod banded;
pub mod eigen;
pub mod fd;
pub mod fit;
pub mod grid;
pub mod interp;
pub mod newton;
pub mod quadrature;

pub use banded::{solve_banded, BandedLu, BandedMatrix, BandedSystem};
pub use eigen::{lowest_eigenpairs, EigenPair, EigenSettings};
pub use fit::{fit_loglog, OrderFit};
pub use grid::{make_grid, Grading, Grid};
pub use newton::{newton_solve, NewtonOutcome, NewtonSettings};
pub use quadrature::quadrature;
