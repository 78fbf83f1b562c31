//! Random instances shared by the integration suites.

#![allow(dead_code)]

pub mod checks;

use std::sync::Arc;

use rand::Rng;
use rescoord::group::{Automorphism, GenPerm, Generator, GeneratorWord, Slot};
use rescoord::ring::{rat, Monomial, Poly, RingContext};
use rescoord::weights::WeightVector;

pub fn coefficient(rng: &mut (impl Rng + ?Sized)) -> num_rational::BigRational {
    let num = loop {
        let c = rng.gen_range(-3i64..=3);
        if c != 0 {
            break c;
        }
    };
    rat(num, rng.gen_range(1..=2))
}

/// Random element of `A_tau` with up to `terms` terms of total degree at most
/// `max_deg`, not involving the variable `skip`.
pub fn a_tau_poly(
    rng: &mut impl Rng,
    ctx: &Arc<RingContext>,
    tau: &WeightVector,
    terms: usize,
    max_deg: u32,
    skip: Option<usize>,
) -> Poly {
    let mut out = Poly::zero(ctx);
    for _ in 0..rng.gen_range(1..=terms) {
        let mut exps = vec![0u32; ctx.nvars()];
        let deg = rng.gen_range(0..=max_deg);
        for _ in 0..deg {
            let v = rng.gen_range(0..ctx.nvars());
            if Some(v) != skip {
                exps[v] += 1;
            }
        }
        let weight: i64 = (0..ctx.n())
            .map(|k| tau.entries()[k] * i64::from(exps[ctx.z_index(k)]))
            .sum();
        let x = weight + rng.gen_range(0..=1);
        out = &out + &Poly::monomial(ctx, coefficient(rng), Monomial::new(x, exps));
    }
    out
}

pub fn weight(rng: &mut impl Rng, n: usize, max: i64) -> WeightVector {
    WeightVector::new((0..n).map(|_| rng.gen_range(0..=max)).collect())
}

/// One generator of `IA^tau`: `y_j + x F` or `z_k + x^{1 - t_k} G` with `F, G` in `A_tau`.
pub fn ia_generator(rng: &mut impl Rng, ctx: &Arc<RingContext>, tau: &WeightVector) -> Generator {
    let m = ctx.m();
    let pos = rng.gen_range(0..m + ctx.n());
    let slot = Slot::from_position(ctx, pos);
    let tail = a_tau_poly(rng, ctx, tau, 2, 3, Some(slot.var_index(ctx)));
    let shift = match slot {
        Slot::Y(_) => 1,
        Slot::Z(k) => 1 - tau.entries()[k],
    };
    Generator::elementary(slot, tail.shift_x(shift)).expect("elementary")
}

pub fn ia_element(
    rng: &mut impl Rng,
    ctx: &Arc<RingContext>,
    tau: &WeightVector,
    len: usize,
) -> Automorphism {
    let gens = (0..len).map(|_| ia_generator(rng, ctx, tau)).collect();
    Automorphism::from_word(GeneratorWord::new(ctx, gens).expect("word"))
}

/// `z_k + x^{-t_k} P` with `P` in `A_tau` free of `z_k`: an element of `EA^tau`.
pub fn ea_generator(rng: &mut impl Rng, ctx: &Arc<RingContext>, tau: &WeightVector) -> Generator {
    let k = rng.gen_range(0..ctx.n());
    let tail = a_tau_poly(rng, ctx, tau, 2, 3, Some(ctx.z_index(k)));
    Generator::z_elementary(k, tail.shift_x(-tau.entries()[k])).expect("elementary")
}

/// A generalized permutation `rho` with `rho(tau)` natural.
pub fn genperm(rng: &mut impl Rng, tau: &WeightVector) -> GenPerm {
    let n = tau.len();
    let mut perm: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        perm.swap(i, rng.gen_range(0..=i));
    }
    let mut inv = vec![0; n];
    for (i, &p) in perm.iter().enumerate() {
        inv[p] = i;
    }
    let lambda = (0..n).map(|_| coefficient(rng)).collect();
    let r = (0..n)
        .map(|i| rng.gen_range(-tau.entries()[inv[i]]..=2))
        .collect();
    GenPerm::new(perm, lambda, r).expect("genperm")
}

/// Any invertible generator over `S`: elementary, generalized permutation or linear.
pub fn any_generator(rng: &mut impl Rng, ctx: &Arc<RingContext>) -> Generator {
    let n = ctx.n();
    match rng.gen_range(0..4) {
        0 if n > 0 => Generator::GenPerm(genperm(rng, &WeightVector::zero(n))),
        1 if n > 1 => {
            let mut rows = vec![vec![Poly::zero(ctx); n]; n];
            for (i, row) in rows.iter_mut().enumerate() {
                row[i] = Poly::one(ctx);
            }
            rows[0][1] = Poly::constant(ctx, coefficient(rng)).shift_x(rng.gen_range(-1..=1));
            Generator::linear(ctx, rows).expect("unipotent matrix")
        }
        _ => {
            let pos = rng.gen_range(0..ctx.m() + n);
            let slot = Slot::from_position(ctx, pos);
            let zero = WeightVector::zero(n);
            let tail = a_tau_poly(rng, ctx, &zero, 2, 3, Some(slot.var_index(ctx)));
            Generator::elementary(slot, tail.shift_x(rng.gen_range(-2..=1))).expect("elementary")
        }
    }
}

/// A random two-variable input for the rewriting pipeline in the context `(y; z1, z2)`.
///
/// `z1`-elementaries have tails in `y`, `z2`-elementaries in `(y, z1)`, and each
/// `alpha_i = (y + x F, z1, z2)` has `F` in `A_{tau_i}` over `(y, z1)`. The `(y, z1)`
/// part of the composite is therefore an automorphism in one `z`-variable on its own.
pub fn mt2_instance(rng: &mut impl Rng) -> (Arc<RingContext>, Vec<rescoord::mt2::Mt2Input>) {
    use rescoord::mt2::{mt2_stages, Mt2Input};
    let ctx = RingContext::new(1, 2, 0).expect("context");
    let (y, z1) = (ctx.y_index(0), ctx.z_index(0));
    let laurent = |rng: &mut dyn rand::RngCore, vars: &[usize]| {
        let mut out = Poly::zero(&ctx);
        for _ in 0..rng.gen_range(1..=2) {
            let mut exps = vec![0u32; ctx.nvars()];
            for &v in vars {
                exps[v] = rng.gen_range(0..=2);
            }
            exps[y] = exps[y].max(1);
            let x = -rng.gen_range(0..=2);
            out = &out + &Poly::monomial(&ctx, coefficient(rng), Monomial::new(x, exps));
        }
        out
    };
    let len = rng.gen_range(2..=4);
    let mut inputs: Vec<Mt2Input> = (0..len)
        .map(|_| {
            let g = if rng.gen_bool(0.7) {
                Generator::z_elementary(0, laurent(rng, &[y]))
            } else {
                Generator::z_elementary(1, laurent(rng, &[y, z1]))
            };
            Mt2Input::bare(&ctx, g.expect("elementary"))
        })
        .collect();
    let stages = mt2_stages(&ctx, &inputs).expect("bare stages expand");
    let mut touched = false;
    for (i, st) in stages.iter().enumerate() {
        if touched && rng.gen_bool(0.5) {
            continue;
        }
        touched = true;
        let tau = WeightVector::new(vec![st.tau.entries()[0], 0]);
        let mut f = a_tau_poly(rng, &ctx, &tau, 2, 2, Some(y));
        f = f.without_var(ctx.z_index(1));
        if f.is_zero() {
            f = Poly::z(&ctx, 0).shift_x(tau.entries()[0]);
        }
        let alpha = Generator::elementary(Slot::Y(0), f.shift_x(1)).expect("elementary");
        inputs[i].alpha = Automorphism::from_generator(&ctx, alpha);
    }
    (ctx, inputs)
}

/// The `(y, z1)` part of an instance from [`mt2_instance`] as a word in one `z`-variable.
pub fn project_to_one_z(inputs: &[rescoord::mt2::Mt2Input]) -> GeneratorWord {
    let one = RingContext::with_names(1, 1, 0, vec!["y".into(), "z1".into()]).expect("context");
    let mut gens = Vec::new();
    for inp in inputs {
        for g in inp.word().generators() {
            if let Generator::Elementary { slot, poly } = g {
                if *slot == Slot::Z(1) {
                    continue;
                }
                let p = rescoord::ring::parse_poly(&poly.to_string(), &one).expect("(y, z1) poly");
                gens.push(Generator::elementary(*slot, p).expect("elementary"));
            }
        }
    }
    GeneratorWord::new(&one, gens).expect("word")
}
