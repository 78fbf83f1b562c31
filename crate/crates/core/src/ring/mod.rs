//! Exact arithmetic in `A[x, 1/x][y_1..y_m, z_1..z_n]` with `A = Q[u_1..u_p]`.

mod context;
mod jacobian;
mod parse;
mod poly;

pub use context::{ContextSpec, RingContext};
pub use jacobian::{determinant, JacobianReport};
pub use parse::parse_poly;
pub use poly::{poly_arith, ArithOp, Monomial, Poly, XOrder};

/// The rational `num / den`.
pub fn rat(num: i64, den: i64) -> num_rational::BigRational {
    num_rational::BigRational::new(num.into(), den.into())
}
