//! The two-variable reduction: repeatedly strip the `x`-free part of the
//! `z`-tail until the map is defined over `R`.

use crate::error::{Error, Result};
use crate::group::{Automorphism, Generator, GeneratorWord, Slot};
use crate::ring::{Poly, XOrder};

#[derive(Debug, Clone)]
pub struct N2Reduction {
    /// `corrections o phi`, defined over `R`.
    pub theta: Automorphism,
    /// The elementaries `(y, z - x^{-t} P_0(y))`, outermost first.
    pub corrections: GeneratorWord,
    /// The value of `t` at the start of each iteration.
    pub t_trace: Vec<i64>,
}

/// Reduce `phi = (y + xQ, z + x^{-t} P)` (one `y`, one `z`) to an automorphism over `R`
/// with the same `y`-component.
pub fn n2_reduce(phi: &Automorphism) -> Result<N2Reduction> {
    let ctx = phi.ctx().clone();
    if ctx.m() != 1 || ctx.n() != 1 {
        return Err(Error::InvalidContext(format!(
            "expected m = n = 1, got m = {}, n = {}",
            ctx.m(),
            ctx.n()
        )));
    }
    let e = phi.try_endo().ok_or_else(|| {
        Error::ExpressionSwell(format!(
            "phi exceeds {} terms",
            crate::group::EXPANSION_LIMIT
        ))
    })?;
    let jac = e.jacobian();
    if jac.unit_constant().is_none() {
        return Err(Error::JacobianNotUnit(jac.determinant.to_string()));
    }
    let y = Poly::y(&ctx, 0);
    let z = Poly::z(&ctx, 0);
    if !(e.y_image(0) - &y).divisible_by_x() {
        return Err(Error::PreconditionFailed(format!(
            "y-image {} is not y + xQ",
            e.y_image(0)
        )));
    }
    let zi = ctx.z_index(0);
    let mut current = e.clone();
    let mut gens: Vec<Generator> = Vec::new();
    let mut t_trace = Vec::new();
    loop {
        let tail = current.z_image(0) - &z;
        let t = match tail.x_order() {
            XOrder::Finite(o) if o < 0 => -o,
            _ => break,
        };
        if let Some(&prev) = t_trace.last() {
            if t >= prev {
                return Err(Error::NonTermination(format!(
                    "t did not decrease: {prev} -> {t}"
                )));
            }
        }
        t_trace.push(t);
        let p0 = tail.shift_x(t).mod_x()?;
        if p0.involves(zi) {
            return Err(Error::SplitFailure(format!(
                "x-free part {p0} of the z-tail involves z"
            )));
        }
        let g = Generator::elementary(Slot::Z(0), -p0.shift_x(-t))?;
        current = g.to_endo(&ctx).compose(&current);
        gens.push(g);
    }
    gens.reverse();
    let corrections = GeneratorWord::new(&ctx, gens)?;
    let theta = Automorphism::from_parts(corrections.then(phi.word()), current);
    Ok(N2Reduction {
        theta,
        corrections,
        t_trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::Endo;
    use crate::ring::{parse_poly, RingContext};

    fn aut(ctx: &std::sync::Arc<RingContext>, gens: &[(Slot, &str)]) -> Automorphism {
        let gens = gens
            .iter()
            .map(|(s, p)| Generator::elementary(*s, parse_poly(p, ctx).unwrap()).unwrap())
            .collect();
        Automorphism::from_word(GeneratorWord::new(ctx, gens).unwrap())
    }

    #[test]
    fn over_r_is_unchanged() {
        let ctx = RingContext::new(1, 1, 0).unwrap();
        let phi = aut(&ctx, &[(Slot::Y(0), "x*z^2")]);
        let out = n2_reduce(&phi).unwrap();
        assert!(out.corrections.is_empty());
        assert_eq!(out.theta, phi);
    }

    #[test]
    fn single_iteration_to_identity() {
        let ctx = RingContext::new(1, 1, 0).unwrap();
        let phi = aut(&ctx, &[(Slot::Z(0), "y^2/x")]);
        let out = n2_reduce(&phi).unwrap();
        assert!(out.theta.is_identity());
        assert_eq!(out.t_trace, vec![1]);
    }

    #[test]
    fn nagata_conjugate() {
        let ctx = RingContext::new(1, 1, 0).unwrap();
        let phi = aut(
            &ctx,
            &[
                (Slot::Z(0), "y^2/x"),
                (Slot::Y(0), "x^2*z"),
                (Slot::Z(0), "-y^2/x"),
            ],
        );
        let out = n2_reduce(&phi).unwrap();
        assert!(out.theta.endo().is_over_r());
        assert_eq!(out.theta.endo().y_image(0), phi.endo().y_image(0));
        assert!(out.theta.inverse_endo().is_over_r());
    }

    #[test]
    fn rejects_non_unit_jacobian() {
        let ctx = RingContext::new(1, 1, 0).unwrap();
        let e = Endo::from_images(
            &ctx,
            vec![
                parse_poly("y", &ctx).unwrap(),
                parse_poly("z^2", &ctx).unwrap(),
            ],
        )
        .unwrap();
        let phi = Automorphism::from_parts(GeneratorWord::empty(&ctx), e);
        assert!(matches!(n2_reduce(&phi), Err(Error::JacobianNotUnit(_))));
    }
}
