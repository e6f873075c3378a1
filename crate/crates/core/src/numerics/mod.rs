//! Numerical kernels shared by the transformers, models and statistics.

mod linalg;
mod rng;
mod special;

pub use linalg::{cholesky_solve, least_squares, sym_eigen, LeastSquares, Matrix, SymEigen};
pub(crate) use linalg::dot;
pub use rng::RngStream;
pub use special::{
    beta_reg, beta_reg_pair, ln_beta, ln_gamma, mean, pearson_p, pearson_r, std_dev, t_sf,
    variance,
};
