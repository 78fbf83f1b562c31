//! Named constructions used as golden tests and CLI presets.

use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::group::{Automorphism, Endo, Generator, GeneratorWord, Slot};
use crate::ring::{parse_poly, Poly, RingContext};
use crate::weights::{a_tau_member, WeightVector};

#[derive(Debug, Clone)]
pub struct NamedExample {
    pub id: String,
    pub ctx: Arc<RingContext>,
    /// The full composite as a word.
    pub word: GeneratorWord,
    /// The full expected map, when known in closed form.
    pub expected: Option<Endo>,
    pub expected_y: Poly,
    /// Inputs `(alpha, Phi_0 .. Phi_q)` of the elementary-word pipeline.
    pub alpha: Option<Automorphism>,
    pub elementaries: Option<GeneratorWord>,
    pub description: String,
}

impl NamedExample {
    /// Evaluate the word and compare against the stored expectation.
    pub fn check(&self) -> bool {
        let e = self.word.to_endo();
        let y_ok = e.y_image(0) == &self.expected_y;
        y_ok && self.expected.as_ref().is_none_or(|x| x == &e)
    }

    /// `(alpha, word)` for the elementary-word pipeline.
    pub fn at2_inputs(&self) -> Option<(Automorphism, GeneratorWord)> {
        Some((self.alpha.clone()?, self.elementaries.clone()?))
    }
}

fn poly(s: &str, ctx: &Arc<RingContext>) -> Poly {
    parse_poly(s, ctx).unwrap_or_else(|e| panic!("catalog polynomial `{s}`: {e}"))
}

fn elem(ctx: &Arc<RingContext>, slot: Slot, s: &str) -> Generator {
    Generator::elementary(slot, poly(s, ctx)).expect("catalog generator")
}

fn word(ctx: &Arc<RingContext>, gens: Vec<Generator>) -> GeneratorWord {
    GeneratorWord::new(ctx, gens).expect("catalog word")
}

fn endo(ctx: &Arc<RingContext>, images: &[&str]) -> Endo {
    Endo::from_images(ctx, images.iter().map(|s| poly(s, ctx)).collect()).expect("catalog endo")
}

/// `(y, z + y^2/x) o (y + x^2 z, z) o (y, z - y^2/x)`.
pub fn nagata() -> NamedExample {
    let ctx = RingContext::new(1, 1, 0).expect("context");
    let alpha = elem(&ctx, Slot::Y(0), "x^2*z");
    let phi0 = elem(&ctx, Slot::Z(0), "-y^2/x");
    NamedExample {
        id: "nagata".into(),
        word: word(
            &ctx,
            vec![elem(&ctx, Slot::Z(0), "y^2/x"), alpha.clone(), phi0.clone()],
        ),
        expected: Some(endo(
            &ctx,
            &["y + x*(x*z - y^2)", "z + 2*y*(x*z - y^2) + x*(x*z - y^2)^2"],
        )),
        expected_y: poly("y + x*(x*z - y^2)", &ctx),
        alpha: Some(Automorphism::from_generator(&ctx, alpha)),
        elementaries: Some(GeneratorWord::single(&ctx, phi0)),
        description: "Nagata automorphism as a conjugate of (y + x^2 z, z)".into(),
        ctx,
    }
}

/// Anick's automorphism over `Q[t]`.
pub fn anick() -> NamedExample {
    let ctx = RingContext::with_names(1, 1, 1, vec!["t".into(), "y".into(), "z".into()])
        .expect("context");
    let alpha = elem(&ctx, Slot::Y(0), "x^2*z");
    let phi0 = elem(&ctx, Slot::Z(0), "y*t/x");
    NamedExample {
        id: "anick".into(),
        word: word(
            &ctx,
            vec![
                elem(&ctx, Slot::Z(0), "-y*t/x"),
                alpha.clone(),
                phi0.clone(),
            ],
        ),
        expected: Some(endo(&ctx, &["y + x*(x*z + y*t)", "z - t*(x*z + y*t)"])),
        expected_y: poly("y + x*(x*z + y*t)", &ctx),
        alpha: Some(Automorphism::from_generator(&ctx, alpha)),
        elementaries: Some(GeneratorWord::single(&ctx, phi0)),
        description: "Anick's automorphism, parameter t in the base ring".into(),
        ctx,
    }
}

/// Context `(y; z, u, t)` of the three-variable examples.
pub fn venereau_context() -> Arc<RingContext> {
    RingContext::with_names(1, 3, 0, ["y", "z", "u", "t"].map(String::from).to_vec())
        .expect("context")
}

/// Placeholder context `(w1, w2)` in which `Q` is written.
pub fn venereau_q_context() -> Arc<RingContext> {
    RingContext::with_names(0, 2, 0, vec!["w1".into(), "w2".into()]).expect("context")
}

/// The five elementaries `Phi_0 .. Phi_4` of the Venereau word.
///
/// `Phi_3 o Phi_4` is the inverse of `Phi_0 o Phi_1`.
pub fn venereau_word() -> GeneratorWord {
    let ctx = venereau_context();
    word(
        &ctx,
        vec![
            elem(&ctx, Slot::Z(0), "y*t"),
            elem(&ctx, Slot::Z(1), "-2*z*t - y*t^2"),
            elem(&ctx, Slot::Z(2), "(y*u + z^2)/x"),
            elem(&ctx, Slot::Z(0), "-y*t"),
            elem(&ctx, Slot::Z(1), "2*z*t - y*t^2"),
        ],
    )
}

/// `alpha o Phi_0 o .. o Phi_4` with `alpha = (y + xQ(xz, x^2 u), z, u, t)`.
///
/// `Q` lives in [`venereau_q_context`] and must be defined over `R`.
pub fn venereau_type(q: &Poly) -> Result<NamedExample> {
    let qctx = q.ctx();
    if qctx.m() != 0 || qctx.n() != 2 || qctx.p() != 0 {
        return Err(Error::InvalidContext(
            "Q must be written in two placeholder variables w1, w2".into(),
        ));
    }
    if !q.is_over_r() {
        return Err(Error::QNotInASigma0(format!(
            "Q = {q} has negative powers of x"
        )));
    }
    let ctx = venereau_context();
    let subst = |a: &str, b: &str| q.map_into(&ctx, &[poly(a, &ctx), poly(b, &ctx)], &[]);
    let alpha_tail = subst("x*z", "x^2*u")?.shift_x(1);
    let v = "(y*u + z^2)";
    let theta_tail = subst(
        &format!("x*z + y*{v}"),
        &format!("x^2*u - 2*x*z*{v} - y*{v}^2"),
    )?
    .shift_x(1);
    let alpha = Generator::elementary(Slot::Y(0), alpha_tail)?;
    let phis = venereau_word();
    let mut gens = vec![alpha.clone()];
    gens.extend(phis.generators().iter().cloned());
    Ok(NamedExample {
        id: "venereau-type".into(),
        word: word(&ctx, gens),
        expected: None,
        expected_y: &Poly::y(&ctx, 0) + &theta_tail,
        alpha: Some(Automorphism::from_generator(&ctx, alpha)),
        elementaries: Some(phis),
        description: format!("Venereau-type polynomial with Q(w1, w2) = {q}"),
        ctx,
    })
}

/// The Venereau polynomial `y + x(xz + y(yu + z^2))`, i.e. `Q = w1`.
pub fn venereau() -> NamedExample {
    let q = Poly::var(&venereau_q_context(), 0);
    let mut ex = venereau_type(&q).expect("Q = w1 is over R");
    ex.id = "venereau".into();
    ex.description = "Venereau polynomial y + x(xz + y(yu + z^2))".into();
    ex
}

/// `(y + lambda x^s z, z) o (y, z + lambda^{-1} x^{1-s} f(x, y))`.
pub fn russell(f: &Poly, s: u32, lambda: &BigRational) -> Result<NamedExample> {
    let ctx = f.ctx().clone();
    if ctx.m() != 1 || ctx.n() != 1 {
        return Err(Error::InvalidContext(format!(
            "expected m = n = 1, got m = {}, n = {}",
            ctx.m(),
            ctx.n()
        )));
    }
    if lambda.is_zero() {
        return Err(Error::PreconditionFailed("lambda must be nonzero".into()));
    }
    if !f.is_over_r() || f.involves(ctx.z_index(0)) {
        return Err(Error::PreconditionFailed(format!(
            "f = {f} is not in A[x, y]"
        )));
    }
    let s = i64::from(s);
    let z = Poly::z(&ctx, 0);
    let a_tail = z.shift_x(s).scale(lambda);
    let phi_tail = f.shift_x(1 - s).scale(&(BigRational::one() / lambda));
    let alpha = Generator::elementary(Slot::Y(0), a_tail.clone())?;
    let phi0 = Generator::elementary(Slot::Z(0), phi_tail.clone())?;
    let expected_y = &(&Poly::y(&ctx, 0) + &f.shift_x(1)) + &a_tail;
    let expected = Endo::from_images(&ctx, vec![expected_y.clone(), &z + &phi_tail])?;
    Ok(NamedExample {
        id: "russell".into(),
        word: word(&ctx, vec![alpha.clone(), phi0.clone()]),
        expected: Some(expected),
        expected_y,
        alpha: Some(Automorphism::from_generator(&ctx, alpha)),
        elementaries: Some(GeneratorWord::single(&ctx, phi0)),
        description: format!("Russell-type coordinate with f = {f}, s = {s}, lambda = {lambda}"),
        ctx,
    })
}

/// Three-variable data showing that a triangular map can send an `A_tau` element
/// outside `x A_tau` while its images of the weighted generators stay over `R`.
#[derive(Debug, Clone)]
pub struct CrucialDifficulty {
    /// `omega` as a word, with `expected` the map itself.
    pub example: NamedExample,
    pub tau: WeightVector,
    pub p: Poly,
    /// `omega(P)`.
    pub value: Poly,
    /// The variant with `+` and `-` exchanged in the third component.
    pub omega_sign_swapped: Endo,
    pub value_sign_swapped: Poly,
}

impl CrucialDifficulty {
    /// `P` lies in `A_tau` but not in `x A_tau`.
    pub fn p_membership(&self) -> (bool, bool) {
        (
            a_tau_member(&self.p, &self.tau),
            a_tau_member(&self.p.shift_x(-1), &self.tau),
        )
    }
}

pub fn crucial_difficulty_example() -> CrucialDifficulty {
    let ctx = RingContext::new(1, 3, 0).expect("context");
    let g3 = elem(&ctx, Slot::Z(2), "2*z1*z2/x + y*z1^2/x^2");
    let g2 = elem(&ctx, Slot::Z(1), "-y*z1/x");
    let omega = endo(
        &ctx,
        &["y", "z1", "z2 - y*z1/x", "z3 + 2*z2*z1/x - y*z1^2/x^2"],
    );
    let swapped = endo(
        &ctx,
        &["y", "z1", "z2 - y*z1/x", "z3 - 2*z2*z1/x - y*z1^2/x^2"],
    );
    let p = poly("y*x^2*z3 + x^2*z2^2", &ctx);
    let value = omega.apply(&p).expect("same context");
    let value_sign_swapped = swapped.apply(&p).expect("same context");
    CrucialDifficulty {
        example: NamedExample {
            id: "crucial-difficulty".into(),
            word: word(&ctx, vec![g3, g2]),
            expected: Some(omega),
            expected_y: Poly::y(&ctx, 0),
            alpha: None,
            elementaries: None,
            description: "triangular map with tau = (0,1,2) that does not preserve x A_tau".into(),
            ctx,
        },
        tau: WeightVector::new(vec![0, 1, 2]),
        p,
        value,
        omega_sign_swapped: swapped,
        value_sign_swapped,
    }
}

/// Names accepted by [`by_name`].
pub const PRESETS: &[&str] = &["nagata", "anick", "venereau", "crucial-difficulty"];

/// Parameter-free presets.
pub fn by_name(name: &str) -> Option<NamedExample> {
    match name {
        "nagata" => Some(nagata()),
        "anick" => Some(anick()),
        "venereau" => Some(venereau()),
        "crucial-difficulty" => Some(crucial_difficulty_example().example),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::rat;
    use crate::weights::sigma_sequence;

    #[test]
    fn stored_expectations_hold() {
        for name in PRESETS {
            assert!(by_name(name).unwrap().check(), "{name}");
        }
    }

    #[test]
    fn nagata_jacobian_and_mod_x() {
        let ex = nagata();
        let e = ex.word.to_endo();
        assert_eq!(e.jacobian().unit_constant(), Some(BigRational::one()));
        assert_eq!(e.y_image(0).mod_x().unwrap(), Poly::y(&ex.ctx, 0));
    }

    #[test]
    fn anick_mod_x() {
        let ex = anick();
        let e = ex.word.to_endo();
        assert!(!e.is_identity_mod_x());
        assert_eq!(e.mod_x().unwrap(), endo(&ex.ctx, &["y", "z - y*t^2"]));
    }

    #[test]
    fn venereau_sigma_sequence() {
        let seq = sigma_sequence(&venereau_word()).unwrap();
        let want: Vec<WeightVector> = [[1, 2, 1], [0, 2, 1], [0, 0, 1], [0, 0, 0], [0, 0, 0]]
            .iter()
            .map(|t| WeightVector::new(t.to_vec()))
            .collect();
        assert_eq!(seq.sigmas, want);
    }

    #[test]
    fn venereau_type_cases() {
        let qctx = venereau_q_context();
        let ctx = venereau_context();
        assert!(venereau().check());
        assert_eq!(
            venereau().expected_y,
            parse_poly("y + x*(x*z + y*(y*u + z^2))", &ctx).unwrap()
        );
        let zero = venereau_type(&Poly::zero(&qctx)).unwrap();
        assert_eq!(zero.expected_y, Poly::y(&ctx, 0));
        let w2 = venereau_type(&Poly::var(&qctx, 1)).unwrap();
        assert!(w2.check());
        assert_eq!(
            w2.expected_y,
            parse_poly("y + x*(x^2*u - 2*x*z*(y*u + z^2) - y*(y*u + z^2)^2)", &ctx).unwrap()
        );
        let bad = parse_poly("w1/x", &qctx).unwrap();
        assert!(matches!(venereau_type(&bad), Err(Error::QNotInASigma0(_))));
    }

    #[test]
    fn russell_cases() {
        let ctx = RingContext::new(1, 1, 0).unwrap();
        let f = parse_poly("y^2", &ctx).unwrap();
        let ex = russell(&f, 1, &rat(1, 1)).unwrap();
        assert!(ex.check());
        assert_eq!(ex.expected_y, parse_poly("y + x*y^2 + x*z", &ctx).unwrap());
        let ex0 = russell(&f, 0, &rat(-2, 3)).unwrap();
        assert!(ex0.check());
        assert_eq!(
            ex0.expected_y,
            parse_poly("y + x*y^2 - 2/3*z", &ctx).unwrap()
        );
        let none = russell(&Poly::zero(&ctx), 3, &rat(5, 1)).unwrap();
        assert_eq!(none.expected_y, parse_poly("y + 5*x^3*z", &ctx).unwrap());
        assert!(russell(&f, 1, &rat(0, 1)).is_err());
        assert!(russell(&parse_poly("z", &ctx).unwrap(), 1, &rat(1, 1)).is_err());
    }

    #[test]
    fn crucial_difficulty_values() {
        let cd = crucial_difficulty_example();
        let ctx = &cd.example.ctx;
        assert!(cd.example.check());
        assert_eq!(cd.value, parse_poly("x^2*(y*z3 + z2^2)", ctx).unwrap());
        assert_eq!(cd.value.x_order().finite(), Some(2));
        assert_eq!(
            cd.value_sign_swapped,
            parse_poly("x^2*y*z3 + x^2*z2^2 - 4*x*y*z1*z2", ctx).unwrap()
        );
        assert_eq!(cd.p_membership(), (true, false));
        let omega = cd.example.expected.as_ref().unwrap();
        for s in ["x*z2", "x^2*z3"] {
            let img = omega.apply(&parse_poly(s, ctx).unwrap()).unwrap();
            assert!(img.is_over_r() && !img.divisible_by_x(), "{s} -> {img}");
        }
    }
}
