//! Per-instance invariant checks, shared by the property suite and the acceptance run.

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rescoord::group::{is_in_ia_tau, Automorphism, Endo, Generator, GeneratorWord};
use rescoord::mt2::{mt2_stages, technical_conditions};
use rescoord::reduce::{alpha_push, ia_evidence, same_map, strong_ia_reduce, taylor_gap};
use rescoord::ring::{Poly, RingContext};
use rescoord::weights::{a_tau_member, maps_a_tau_into, rho_apply_tau, WeightVector};

pub type Check = Result<(), String>;

/// Instance size: `(m, n, p, seed)`.
pub type Shape = (usize, usize, usize, u64);

fn setup((m, n, p, seed): Shape) -> (Arc<RingContext>, ChaCha8Rng) {
    (
        RingContext::new(m, n, p).expect("context"),
        ChaCha8Rng::seed_from_u64(seed),
    )
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Check {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

pub fn taylor(shape: Shape, len: usize) -> Check {
    let (ctx, mut rng) = setup(shape);
    let tau = super::weight(&mut rng, ctx.n(), 3);
    let alpha = super::ia_element(&mut rng, &ctx, &tau, len);
    let poly = super::a_tau_poly(&mut rng, &ctx, &tau, 3, 4, None);
    let gap = taylor_gap(&alpha, &poly, &tau).map_err(|e| e.to_string())?;
    ensure(a_tau_member(&gap, &tau), || {
        format!("gap {gap} not in A_{tau}")
    })?;
    let image = alpha.apply(&poly).map_err(|e| e.to_string())?;
    ensure(&poly + &gap.shift_x(1) == image, || {
        "alpha(P) != P + x gap".into()
    })
}

pub fn alpha_push_closure(shape: Shape, len: usize) -> Check {
    let (ctx, mut rng) = setup(shape);
    let tau = super::weight(&mut rng, ctx.n(), 3);
    let alpha = super::ia_element(&mut rng, &ctx, &tau, len);
    let gens = (0..len)
        .map(|_| super::ea_generator(&mut rng, &ctx, &tau))
        .collect();
    let phi = Automorphism::from_word(GeneratorWord::new(&ctx, gens).expect("word"));
    let pushed = alpha_push(&alpha, &phi, &tau).map_err(|e| e.to_string())?;
    ia_evidence(&pushed, &tau).map_err(|e| format!("pushed not in IA^{tau}: {e}"))?;
    same_map(&phi.compose(&pushed), &alpha.compose(&phi))
        .map(|_| ())
        .map_err(|e| format!("alpha o phi != phi o alpha': {e}"))
}

pub fn strong_box(shape: Shape) -> Check {
    let (ctx, mut rng) = setup(shape);
    let tau = super::weight(&mut rng, ctx.n(), 3);
    let alpha = super::ia_element(&mut rng, &ctx, &tau, 1);
    let red = strong_ia_reduce(&alpha, &tau).map_err(|e| e.to_string())?;
    for sigma in tau.box_points() {
        let member = match red.beta.try_endo() {
            Some(beta) => is_in_ia_tau(beta, &sigma),
            None => ia_evidence(&red.beta, &sigma).is_ok(),
        };
        ensure(member, || format!("beta not in IA^{sigma}"))?;
    }
    same_map(&red.beta, &red.phi.compose(&alpha))
        .map(|_| ())
        .map_err(|e| format!("beta != phi o alpha: {e}"))
}

pub fn rho_generators(shape: Shape) -> Check {
    let (ctx, mut rng) = setup(shape);
    let tau = super::weight(&mut rng, ctx.n(), 3);
    let rho = super::genperm(&mut rng, &tau);
    let image = rho_apply_tau(&rho, &tau);
    ensure(image.is_natural(), || format!("rho(tau) = {image}"))?;
    let fwd = Generator::GenPerm(rho.clone()).to_endo(&ctx);
    let back = Generator::GenPerm(rho.inverse()).to_endo(&ctx);
    ensure(maps_a_tau_into(&fwd, &tau, &image), || {
        format!("rho(A_{tau}) not in A_{image}")
    })?;
    ensure(maps_a_tau_into(&back, &image, &tau), || {
        format!("rho^-1(A_{image}) not in A_{tau}")
    })
}

pub fn chain_rule(shape: Shape) -> Check {
    let (ctx, mut rng) = setup(shape);
    let zero = WeightVector::zero(ctx.n());
    let mut random_endo = || {
        let images: Vec<Poly> = (0..ctx.dim())
            .map(|_| super::a_tau_poly(&mut rng, &ctx, &zero, 3, 2, None))
            .collect();
        Endo::from_images(&ctx, images).expect("endo")
    };
    let a = random_endo();
    let b = random_endo();
    let lhs = a.compose(&b).jacobian().determinant;
    let rhs =
        &b.apply(&a.jacobian().determinant).expect("same context") * &b.jacobian().determinant;
    ensure(lhs == rhs, || {
        format!("J(a o b) = {lhs}, b(J a) J b = {rhs}")
    })
}

pub fn word_inverse(shape: Shape, len: usize) -> Check {
    let (ctx, mut rng) = setup(shape);
    let gens = (0..len)
        .map(|_| super::any_generator(&mut rng, &ctx))
        .collect();
    let w = GeneratorWord::new(&ctx, gens).expect("word");
    ensure(w.then(&w.inverse()).to_endo().is_identity(), || {
        format!("{w} o inverse is not the identity")
    })?;
    ensure(w.inverse().then(&w).to_endo().is_identity(), || {
        format!("inverse o {w} is not the identity")
    })
}

pub fn technical(seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (ctx, inputs) = super::mt2_instance(&mut rng);
    let stages = mt2_stages(&ctx, &inputs).map_err(|e| e.to_string())?;
    let report = technical_conditions(&stages).map_err(|e| e.to_string())?;
    ensure(report.all_equivalent && report.consequences_hold, || {
        format!("{:?}", report.rows)
    })
}
