//! The per-lemma operations on `IA^tau`: Taylor gaps, pushing past `GA^tau`,
//! the strong reduction, and the crucial reduction.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::group::probe::{sampled_equal, sampled_ia_tau, Evidence, Sampler};
use crate::group::{
    canonical_ia_form, fixes_y, preserves_a_tau, Automorphism, Endo, GenPerm, Generator,
    GeneratorWord, Slot, WORKING_LIMIT,
};
use crate::ring::Poly;
use crate::weights::{a_tau_leading, a_tau_member, rho_apply_tau, WeightVector};

/// Largest box that is checked exhaustively.
pub const BOX_EXHAUSTIVE_LIMIT: u128 = 4096;
/// Random interior points checked when the box is larger.
pub const BOX_SAMPLES: usize = 64;

/// Membership of `alpha` in `IA^tau`: exact when `alpha` expands, sampled otherwise.
pub fn ia_evidence(
    alpha: &Automorphism,
    tau: &WeightVector,
) -> std::result::Result<Evidence, String> {
    match alpha.try_endo() {
        Some(e) => canonical_ia_form(e, tau)
            .map(|_| Evidence::Exact)
            .map_err(|e| e.to_string()),
        None => {
            sampled_ia_tau(alpha.word(), tau, &mut Sampler::default()).map_err(|e| e.to_string())
        }
    }
}

fn ensure_ia(
    alpha: &Automorphism,
    tau: &WeightVector,
    err: fn(String) -> Error,
) -> Result<Evidence> {
    ia_evidence(alpha, tau).map_err(|e| err(format!("{alpha:?} for tau = {tau}: {e}")))
}

/// Whether two automorphisms are the same map: exact when both expand, sampled otherwise.
pub fn same_map(a: &Automorphism, b: &Automorphism) -> std::result::Result<Evidence, String> {
    match (a.try_endo(), b.try_endo()) {
        (Some(x), Some(y)) if x == y => Ok(Evidence::Exact),
        (Some(_), Some(_)) => Err("expanded maps differ".into()),
        _ => sampled_equal(a.word(), b.word(), &mut Sampler::default()).map_err(|e| e.to_string()),
    }
}

fn swell(what: &str) -> Error {
    Error::ExpressionSwell(format!("{what} exceeds {WORKING_LIMIT} terms"))
}

/// `(alpha(P) - P) / x`, checked to lie in `A_tau`.
pub fn taylor_gap(alpha: &Automorphism, p: &Poly, tau: &WeightVector) -> Result<Poly> {
    ensure_ia(alpha, tau, Error::NotInIATau)?;
    if !a_tau_member(p, tau) {
        return Err(Error::PreconditionFailed(format!(
            "{p} is not in A_tau for tau = {tau}"
        )));
    }
    let image = alpha.apply_limited(p).ok_or_else(|| swell("alpha(P)"))?;
    let gap = (&image - p).shift_x(-1);
    if !a_tau_member(&gap, tau) {
        return Err(Error::MembershipViolation(format!(
            "taylor gap {gap} for tau = {tau}"
        )));
    }
    Ok(gap)
}

/// Whether `phi` fixes `y` and maps `A_tau` onto itself.
pub fn check_ga_tau(phi: &Automorphism, tau: &WeightVector) -> Result<()> {
    let (Some(fwd), Some(inv)) = (phi.try_endo(), phi.try_inverse_endo()) else {
        return Err(Error::ExpressionSwell(format!(
            "phi exceeds {} terms",
            crate::group::EXPANSION_LIMIT
        )));
    };
    if !fixes_y(fwd) {
        return Err(Error::PreconditionFailed(format!(
            "{phi:?} moves a y-variable"
        )));
    }
    if !preserves_a_tau(fwd, inv, tau) {
        return Err(Error::PreconditionFailed(format!(
            "{phi:?} does not preserve A_tau for tau = {tau}"
        )));
    }
    Ok(())
}

/// `alpha' = phi^{-1} o alpha o phi`, so that `alpha o phi = phi o alpha'`.
pub fn alpha_push(
    alpha: &Automorphism,
    phi: &Automorphism,
    tau: &WeightVector,
) -> Result<Automorphism> {
    ensure_ia(alpha, tau, Error::NotInIATau)?;
    check_ga_tau(phi, tau)?;
    let pushed = phi.inverse().compose(alpha).compose(phi).simplified();
    same_map(&phi.compose(&pushed), &alpha.compose(phi))
        .map_err(|e| Error::InternalContradiction(format!("alpha o phi != phi o alpha': {e}")))?;
    ensure_ia(&pushed, tau, Error::ConjugateEscapesIATau)?;
    Ok(pushed)
}

/// Output of [`strong_ia_reduce`]: `beta = phi o alpha`.
#[derive(Debug, Clone)]
pub struct StrongReduction {
    pub phi: Automorphism,
    pub beta: Automorphism,
    /// Weight vectors at which `beta` was checked.
    pub checked: Vec<WeightVector>,
    pub evidence: Evidence,
}

/// Raise `sigma'` from `0` to `target`, one unit at a time, left to right.
///
/// The result satisfies `beta in IA^sigma` for every `tau - target <= sigma <= tau`.
/// Only the images of `beta` that a later step reads are expanded.
pub fn strong_ia_reduce_to(
    alpha: &Automorphism,
    tau: &WeightVector,
    target: &WeightVector,
) -> Result<StrongReduction> {
    let ctx = alpha.ctx().clone();
    tau.ensure_len(ctx.n())?;
    target.ensure_len(ctx.n())?;
    tau.ensure_natural()?;
    if !target.is_natural() || !target.le(tau) {
        return Err(Error::PreconditionFailed(format!(
            "target {target} is not between 0 and {tau}"
        )));
    }
    ensure_ia(alpha, tau, Error::PreconditionFailed)?;
    let t = tau.entries();
    let m = ctx.m();
    // Current images of beta; `None` when not yet expanded or out of date.
    let mut images: Vec<Option<Poly>> = match alpha.cached_endo() {
        Some(e) => e.images().iter().cloned().map(Some).collect(),
        None => vec![None; ctx.dim()],
    };
    let mut steps: Vec<Generator> = Vec::new();
    let image = |images: &mut Vec<Option<Poly>>, steps: &[Generator], pos: usize| -> Result<Poly> {
        if let Some(p) = &images[pos] {
            return Ok(p.clone());
        }
        let var = Poly::var(&ctx, ctx.slot_index(pos));
        let current =
            GeneratorWord::new(&ctx, steps.iter().rev().cloned().collect())?.then(alpha.word());
        let p = current
            .apply_limited(&var, WORKING_LIMIT)
            .ok_or_else(|| swell("an image of beta"))?;
        images[pos] = Some(p.clone());
        Ok(p)
    };
    for k in 0..ctx.n() {
        let zk = ctx.z_index(k);
        for s in 0..target.entries()[k] {
            let img = image(&mut images, &steps, m + k)?;
            let d = &img - &Poly::z(&ctx, k);
            let p = d.shift_x(t[k] - s - 1).without_var(zk);
            if !a_tau_member(&p, tau) {
                return Err(Error::MembershipViolation(format!(
                    "z{}-free tail {p} at s = {s} is not in A_tau for tau = {tau}",
                    k + 1
                )));
            }
            // Only the part outside x A_tau needs a correction; the rest already has the next form.
            let p = a_tau_leading(&p, tau);
            if p.is_zero() {
                continue;
            }
            let poly = -p.shift_x(-t[k] + s + 1);
            images[m + k] = None;
            if s + 1 < target.entries()[k] {
                let mut sub = vec![None; ctx.dim()];
                for (pos, slot) in sub.iter_mut().enumerate() {
                    if poly.involves(ctx.slot_index(pos)) {
                        *slot = Some(image(&mut images, &steps, pos)?);
                    }
                }
                let moved = poly
                    .substitute_limited(&sub, WORKING_LIMIT)
                    .ok_or_else(|| swell("a correction"))?;
                images[m + k] = Some(&img + &moved);
            }
            steps.push(Generator::Elementary {
                slot: Slot::Z(k),
                poly,
            });
        }
    }
    steps.reverse();
    let phi = Automorphism::from_word(GeneratorWord::new(&ctx, steps)?.simplified());
    let word = phi.word().then(alpha.word());
    let beta = match images.into_iter().collect::<Option<Vec<Poly>>>() {
        Some(imgs) => Automorphism::from_parts(word, Endo::from_images(&ctx, imgs)?),
        None => Automorphism::from_word(word),
    };
    let lower = tau.sub(target);
    let (checked, evidence) = box_check(&beta, &lower, tau)?;
    Ok(StrongReduction {
        phi,
        beta,
        checked,
        evidence,
    })
}

/// Full strong reduction: `beta in IA^sigma` for every `0 <= sigma <= tau`.
pub fn strong_ia_reduce(alpha: &Automorphism, tau: &WeightVector) -> Result<StrongReduction> {
    strong_ia_reduce_to(alpha, tau, tau)
}

/// Check `beta in IA^sigma` for `lower <= sigma <= upper`; exhaustive on small boxes,
/// corners plus seeded samples otherwise.
pub fn box_check(
    beta: &Automorphism,
    lower: &WeightVector,
    upper: &WeightVector,
) -> Result<(Vec<WeightVector>, Evidence)> {
    let span = upper.sub(lower);
    let points: Vec<WeightVector> = if span.box_size() <= BOX_EXHAUSTIVE_LIMIT {
        span.box_points().iter().map(|p| lower.add(p)).collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        let n = span.len();
        let mut pts: Vec<WeightVector> = (0..(1u32 << n))
            .map(|mask| {
                WeightVector::new(
                    (0..n)
                        .map(|k| {
                            if mask >> k & 1 == 1 {
                                upper.entries()[k]
                            } else {
                                lower.entries()[k]
                            }
                        })
                        .collect(),
                )
            })
            .collect();
        for _ in 0..BOX_SAMPLES {
            let v = (0..n)
                .map(|k| {
                    let choices: Vec<i64> = (lower.entries()[k]..=upper.entries()[k]).collect();
                    *choices.choose(&mut rng).expect("nonempty range")
                })
                .collect();
            pts.push(WeightVector::new(v));
        }
        pts
    };
    let mut evidence = Evidence::Exact;
    for sigma in &points {
        let e = ia_evidence(beta, sigma)
            .map_err(|e| Error::MembershipViolation(format!("{beta:?} not in IA^{sigma}: {e}")))?;
        evidence = evidence.and(e);
    }
    Ok((points, evidence))
}

/// `alpha = beta o phi` with `beta in IA^sigma` and `phi` a word of elementaries in `EA^tau`.
///
/// When `tau - sigma` is supported on one coordinate, `phi` is a single elementary.
pub fn ia_reduce(
    alpha: &Automorphism,
    tau: &WeightVector,
    sigma: &WeightVector,
) -> Result<(Automorphism, Automorphism)> {
    if !sigma.le(tau) || !sigma.is_natural() {
        return Err(Error::IncomparableWeights(format!(
            "sigma = {sigma}, tau = {tau}"
        )));
    }
    ensure_ia(alpha, tau, Error::NotInIATau)?;
    let inv = alpha.inverse();
    let red = strong_ia_reduce_to(&inv, tau, &tau.sub(sigma))?;
    let phi = red.phi;
    let beta = alpha.compose(&phi.inverse()).simplified();
    same_map(&beta.compose(&phi), alpha)
        .map_err(|e| Error::InternalContradiction(format!("alpha != beta o phi: {e}")))?;
    ensure_ia(&beta, sigma, Error::MembershipViolation)?;
    Ok((beta, phi))
}

/// Output of [`crucial_reduce`]: `theta = phi_tilde o alpha o phi`.
#[derive(Debug, Clone)]
pub struct CrucialReduction {
    /// `phi^{-1} o alpha o phi`, before the strong reduction.
    pub conjugate: Automorphism,
    pub phi_tilde: Automorphism,
    pub theta: Automorphism,
    pub tame: bool,
    /// How `theta in IA^sigma` was established across the box.
    pub evidence: Evidence,
}

pub fn crucial_reduce(
    alpha: &Automorphism,
    phi: &Automorphism,
    tau: &WeightVector,
) -> Result<CrucialReduction> {
    let conj = alpha_push(alpha, phi, tau)?;
    let red = strong_ia_reduce(&conj, tau)?;
    let phi_tilde = red.phi.compose(&phi.inverse());
    let word = phi_tilde.word().then(alpha.word()).then(phi.word());
    let theta = match red.beta.cached_endo() {
        Some(e) => Automorphism::from_parts(word, e.clone()),
        None => Automorphism::from_word(word),
    };
    let tame = theta.word().is_tame();
    Ok(CrucialReduction {
        conjugate: conj,
        phi_tilde,
        theta,
        tame,
        evidence: red.evidence,
    })
}

/// `rho^{-1} o alpha o rho`, an element of `IA^{rho(tau)}`.
pub fn ia_rho_conjugate(
    alpha: &Automorphism,
    rho: &GenPerm,
    tau: &WeightVector,
) -> Result<Automorphism> {
    let target = rho_apply_tau(rho, tau);
    if !target.is_natural() {
        return Err(Error::RhoTauNotNatural(format!("rho(tau) = {target}")));
    }
    ensure_ia(alpha, tau, Error::NotInIATau)?;
    if rho.is_identity() {
        return Ok(alpha.clone());
    }
    let ctx = alpha.ctx();
    let r = Automorphism::from_generator(ctx, Generator::GenPerm(rho.clone()));
    let out = r.inverse().compose(alpha).compose(&r);
    ensure_ia(&out, &target, Error::MembershipViolation)?;
    Ok(out)
}
