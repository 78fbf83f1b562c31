use std::sync::Arc;

use super::context::RingContext;
use super::poly::Poly;

/// Jacobian matrix of a tuple of images with respect to `(y_1..y_m, z_1..z_n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct JacobianReport {
    pub matrix: Vec<Vec<Poly>>,
    pub determinant: Poly,
}

impl JacobianReport {
    pub fn of_images(ctx: &Arc<RingContext>, images: &[Poly]) -> JacobianReport {
        let matrix: Vec<Vec<Poly>> = images
            .iter()
            .map(|f| {
                (0..ctx.dim())
                    .map(|s| f.derivative(ctx.slot_index(s)))
                    .collect()
            })
            .collect();
        let determinant = determinant(ctx, &matrix);
        JacobianReport {
            matrix,
            determinant,
        }
    }

    /// Determinant as a nonzero rational constant, if it is one.
    pub fn unit_constant(&self) -> Option<num_rational::BigRational> {
        use num_traits::Zero;
        self.determinant.as_constant().filter(|c| !c.is_zero())
    }
}

/// Cofactor expansion along the first row; the matrices here are at most a handful wide.
pub fn determinant(ctx: &Arc<RingContext>, matrix: &[Vec<Poly>]) -> Poly {
    let n = matrix.len();
    let cols: Vec<usize> = (0..n).collect();
    det_minor(ctx, matrix, 0, &cols)
}

fn det_minor(ctx: &Arc<RingContext>, matrix: &[Vec<Poly>], row: usize, cols: &[usize]) -> Poly {
    if cols.is_empty() {
        return Poly::one(ctx);
    }
    if cols.len() == 1 {
        return matrix[row][cols[0]].clone();
    }
    let mut acc = Poly::zero(ctx);
    for (i, &c) in cols.iter().enumerate() {
        let entry = &matrix[row][c];
        if entry.is_zero() {
            continue;
        }
        let rest: Vec<usize> = cols.iter().copied().filter(|&k| k != c).collect();
        let term = entry * &det_minor(ctx, matrix, row + 1, &rest);
        acc = if i % 2 == 0 {
            &acc + &term
        } else {
            &acc - &term
        };
    }
    acc
}
