//! Rewriting of two-variable words `alpha_0 o rho_0 o Phi_0 o ... o alpha_q o rho_q o Phi_q`
//! until the weights `tau_i` become monotone, followed by the first main pipeline.
//!
//! Every rewrite is checked to preserve the evaluated map. A check that fails
//! where the theory guarantees success is reported as [`Error::InternalContradiction`]
//! carrying the words involved, so the failure can be replayed.

use std::cmp::Ordering;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::group::probe::Evidence;
use crate::group::{
    as_elementary, validate_elementary_tau, Automorphism, Endo, GenPerm, Generator, GeneratorWord,
    Slot, WORKING_LIMIT,
};
use crate::reduce::{
    alpha_push, ia_evidence, ia_reduce, ia_rho_conjugate, mt1_pipeline, same_map, Certificate,
    Mt1Stage, ReductionStep, StepKind,
};
use crate::ring::{Poly, RingContext, XOrder};
use crate::weights::{a_tau_leading, maps_a_tau_into_r, minimal_tau, rho_apply_tau, WeightVector};

/// Upper bound on rewrite rounds before the pipeline gives up.
pub const MAX_ROUNDS: usize = 256;

/// One input stage `alpha o rho o Phi` with `Phi` a `z`-elementary.
#[derive(Debug, Clone)]
pub struct Mt2Input {
    pub alpha: Automorphism,
    pub rho: GenPerm,
    pub phi: Generator,
}

impl Mt2Input {
    pub fn new(alpha: Automorphism, rho: GenPerm, phi: Generator) -> Self {
        Mt2Input { alpha, rho, phi }
    }

    /// A stage consisting of the elementary alone.
    pub fn bare(ctx: &Arc<RingContext>, phi: Generator) -> Self {
        Mt2Input {
            alpha: Automorphism::identity(ctx),
            rho: GenPerm::identity(ctx.n()),
            phi,
        }
    }

    pub fn word(&self) -> GeneratorWord {
        let mut w = self.alpha.word().clone();
        if !self.rho.is_identity() {
            w.push(Generator::GenPerm(self.rho.clone()));
        }
        w.push(self.phi.clone());
        w
    }

    fn is_bare(&self) -> bool {
        self.alpha.word().is_empty() && self.rho.is_identity()
    }
}

/// A stage with its suffix map `omega_i` and minimal weight `tau_i`.
#[derive(Debug, Clone)]
pub struct Mt2Stage {
    pub alpha: Automorphism,
    pub rho: GenPerm,
    pub phi: Generator,
    /// Minimal `tau` with `omega(A_tau)` over `R`.
    pub tau: WeightVector,
    /// `alpha_i o rho_i o Phi_i o ... o alpha_q o rho_q o Phi_q`, expanded.
    pub omega: Endo,
}

impl Mt2Stage {
    /// `omega_i(x^{t_k} z_k)` for each `k`.
    pub fn scaled_z_images(&self) -> Vec<Poly> {
        scaled_images(&self.omega, &self.tau)
    }
}

fn scaled_images(e: &Endo, tau: &WeightVector) -> Vec<Poly> {
    (0..e.ctx().n())
        .map(|k| e.z_image(k).shift_x(tau.entries()[k]))
        .collect()
}

fn swell(what: &str) -> Error {
    Error::ExpressionSwell(format!("{what} exceeds {WORKING_LIMIT} terms"))
}

fn perm_endo(ctx: &Arc<RingContext>, rho: &GenPerm) -> Endo {
    Generator::GenPerm(rho.clone()).to_endo(ctx)
}

fn perm_aut(ctx: &Arc<RingContext>, rho: &GenPerm) -> Automorphism {
    if rho.is_identity() {
        Automorphism::identity(ctx)
    } else {
        Automorphism::from_generator(ctx, Generator::GenPerm(rho.clone()))
    }
}

fn gen_aut(ctx: &Arc<RingContext>, g: &Generator) -> Automorphism {
    if g.is_identity() {
        Automorphism::identity(ctx)
    } else {
        Automorphism::from_generator(ctx, g.clone())
    }
}

fn compose_exact(a: &Endo, b: &Endo, what: &str) -> Result<Endo> {
    a.compose_limited(b, WORKING_LIMIT)
        .ok_or_else(|| swell(what))
}

fn z_slot(g: &Generator) -> Option<(usize, &Poly)> {
    match g {
        Generator::Elementary {
            slot: Slot::Z(k),
            poly,
        } => Some((*k, poly)),
        _ => None,
    }
}

fn identity_elementary(ctx: &Arc<RingContext>, k: usize) -> Generator {
    Generator::Elementary {
        slot: Slot::Z(k),
        poly: Poly::zero(ctx),
    }
}

fn ensure_n2(ctx: &RingContext) -> Result<()> {
    if ctx.n() == 2 {
        Ok(())
    } else {
        Err(Error::PreconditionFailed(format!(
            "n = {}, but this step holds only for two z-variables",
            ctx.n()
        )))
    }
}

fn ensure_z_elementary(g: &Generator) -> Result<(usize, &Poly)> {
    z_slot(g).ok_or_else(|| Error::PreconditionFailed(format!("{g} is not a z-elementary")))
}

/// Check `lhs = rhs` as maps, reporting both words on failure.
fn verify(lhs: &Automorphism, rhs: &Automorphism, what: &str) -> Result<Evidence> {
    same_map(lhs, rhs).map_err(|e| {
        Error::InternalContradiction(format!(
            "{what}: {e}; lhs = {}, rhs = {}",
            lhs.word(),
            rhs.word()
        ))
    })
}

fn is_fixed_by(rho: &GenPerm, tau: &WeightVector) -> bool {
    &rho_apply_tau(rho, tau) == tau
}

/// Sum of `Σ t_k b_k - a` over the terms `x^a z^b` of `poly`; the exponent `r` with
/// `poly = x^{-r} P(x^t z)`, `P` over `R` and not divisible by `x`.
fn tail_exponent(poly: &Poly, tau: &WeightVector) -> Option<i64> {
    let ctx = poly.ctx();
    poly.terms()
        .map(|(m, _)| {
            let w: i64 = (0..ctx.n())
                .map(|k| tau.entries()[k] * m.exps()[ctx.z_index(k)] as i64)
                .sum();
            w - m.x_exp()
        })
        .max()
}

/// Whether an elementary `z_j -> z_j + poly` is linear: every term has degree one in the
/// other `z`-variable.
fn is_linear_elementary(g: &Generator) -> bool {
    match z_slot(g) {
        Some((j, poly)) => {
            let ctx = poly.ctx();
            poly.terms().all(|(m, _)| {
                (0..ctx.n())
                    .map(|k| if k == j { 0 } else { m.exps()[ctx.z_index(k)] })
                    .sum::<u32>()
                    == 1
            })
        }
        None => false,
    }
}

/// Every term has total `z`-degree one.
fn is_z_linear(p: &Poly) -> bool {
    let ctx = p.ctx();
    p.terms()
        .all(|(m, _)| (0..ctx.n()).map(|k| m.exps()[ctx.z_index(k)]).sum::<u32>() == 1)
}

fn merge_same_variable(a: &Generator, b: &Generator) -> Option<Generator> {
    let (j, p) = z_slot(a)?;
    let (k, q) = z_slot(b)?;
    if a.is_identity() {
        return Some(b.clone());
    }
    if b.is_identity() {
        return Some(a.clone());
    }
    (j == k).then(|| Generator::Elementary {
        slot: Slot::Z(j),
        poly: p + q,
    })
}

/// Suffix maps and minimal weights for a list of stages.
pub fn mt2_stages(ctx: &Arc<RingContext>, inputs: &[Mt2Input]) -> Result<Vec<Mt2Stage>> {
    let mut omega = Endo::identity(ctx);
    let mut out = Vec::with_capacity(inputs.len());
    for (i, inp) in inputs.iter().enumerate().rev() {
        RingContext::ensure_same(ctx, inp.alpha.ctx())?;
        let alpha = inp.alpha.try_endo().ok_or_else(|| swell("alpha"))?;
        let head = compose_exact(alpha, &perm_endo(ctx, &inp.rho), "alpha o rho")?;
        let head = compose_exact(&head, &inp.phi.to_endo(ctx), "alpha o rho o Phi")?;
        omega = compose_exact(&head, &omega, "omega").map_err(|e| e.at(i))?;
        let tau = minimal_tau(&omega).map_err(|e| e.at(i))?;
        out.push(Mt2Stage {
            alpha: inp.alpha.clone(),
            rho: inp.rho.clone(),
            phi: inp.phi.clone(),
            tau,
            omega: omega.clone(),
        });
    }
    out.reverse();
    Ok(out)
}

/// Split a word into stages: each `z`-elementary closes a stage, generalized permutations
/// become `rho`, everything else accumulates into `alpha`.
pub fn stages_from_word(word: &GeneratorWord) -> Result<Vec<Mt2Input>> {
    let ctx = word.ctx();
    let mut out = Vec::new();
    let mut alpha = GeneratorWord::empty(ctx);
    let mut rho = GenPerm::identity(ctx.n());
    for g in word.generators() {
        match g {
            Generator::Elementary {
                slot: Slot::Z(_), ..
            } => {
                out.push(Mt2Input::new(
                    Automorphism::from_word(std::mem::replace(
                        &mut alpha,
                        GeneratorWord::empty(ctx),
                    )),
                    std::mem::replace(&mut rho, GenPerm::identity(ctx.n())),
                    g.clone(),
                ));
            }
            Generator::GenPerm(p) => rho = rho.compose(p),
            _ if !rho.is_identity() => {
                return Err(Error::PreconditionFailed(format!(
                    "{g} follows a permutation before the next z-elementary"
                )))
            }
            _ => alpha.push(g.clone()),
        }
    }
    if !alpha.is_empty() || !rho.is_identity() {
        out.push(Mt2Input::new(
            Automorphism::from_word(alpha),
            rho,
            identity_elementary(ctx, 0),
        ));
    }
    Ok(out)
}

/// `phi' = rho^{-1} o phi o rho`, generator by generator, so that `phi o rho = rho o phi'`.
pub fn rho_push(phi: &GeneratorWord, rho: &GenPerm, tau: &WeightVector) -> Result<GeneratorWord> {
    let ctx = phi.ctx();
    let target = rho_apply_tau(rho, tau);
    if !target.is_natural() {
        return Err(Error::RhoTauNotNatural(format!("rho(tau) = {target}")));
    }
    for g in phi.generators() {
        validate_elementary_tau(g, tau)?;
    }
    if rho.is_identity() {
        return Ok(phi.clone());
    }
    let fwd = perm_endo(ctx, rho);
    let back = perm_endo(ctx, &rho.inverse());
    let mut out = Vec::with_capacity(phi.len());
    for g in phi.generators() {
        let e = back.compose(&g.to_endo(ctx)).compose(&fwd);
        let h = as_elementary(&e)
            .filter(|h| z_slot(h).is_some())
            .ok_or_else(|| {
                Error::InternalContradiction(format!("conjugate of {g} by {rho:?} is {e}"))
            })?;
        validate_elementary_tau(&h, &target)?;
        out.push(h);
    }
    let pushed = GeneratorWord::new(ctx, out)?;
    let r = perm_aut(ctx, rho);
    verify(
        &Automorphism::from_word(phi.clone()).compose(&r),
        &r.compose(&Automorphism::from_word(pushed.clone())),
        "phi o rho != rho o phi'",
    )?;
    Ok(pushed)
}

/// Decide whether `Phi` lies in `EA^tau` given that `Phi o omega` maps `A_sigma` into `R`.
///
/// Returns `false` only when the exponent `r` of `Phi = (z_j + x^{-r} P(x^t z))` exceeds
/// `t_j`, which the preconditions rule out.
pub fn phi_ea_tau_check(
    phi: &Generator,
    sigma: &WeightVector,
    tau: &WeightVector,
    omega: &Endo,
) -> Result<bool> {
    let ctx = omega.ctx();
    ensure_n2(ctx)?;
    let (j, poly) = ensure_z_elementary(phi)?;
    sigma.ensure_len(2)?;
    tau.ensure_len(2)?;
    if !sigma.le(tau) {
        return Err(Error::PreconditionFailed(format!(
            "sigma = {sigma} is not <= tau = {tau}"
        )));
    }
    for (k, img) in scaled_images(omega, tau).iter().enumerate() {
        if !img.is_over_r() {
            return Err(Error::PreconditionFailed(format!(
                "omega(x^{} z{}) = {img} is not over R",
                tau.entries()[k],
                k + 1
            )));
        }
        if img.divisible_by_x() {
            return Err(Error::PreconditionFailed(format!(
                "omega(x^{} z{}) = {img} is divisible by x",
                tau.entries()[k],
                k + 1
            )));
        }
    }
    let composite = compose_exact(&phi.to_endo(ctx), omega, "Phi o omega")?;
    if !maps_a_tau_into_r(&composite, sigma) {
        return Err(Error::PreconditionFailed(format!(
            "(Phi o omega)(A_sigma) is not over R for sigma = {sigma}"
        )));
    }
    Ok(tail_exponent(poly, tau).is_none_or(|r| r <= tau.entries()[j]))
}

/// Read `e = rho o Phi'` off a linear-in-row-`o` map: `e(z_o)` must be a single unit term.
fn split_on_row(e: &Endo, o: usize) -> Option<(GenPerm, Generator)> {
    let ctx = e.ctx();
    let (lam_o, r_o, idx) = e.z_image(o).as_scaled_var()?;
    let k = (0..2).find(|&k| ctx.z_index(k) == idx)?;
    let (j, kp) = (1 - o, 1 - k);
    let coeff = e.z_image(j).coefficients_in(ctx.z_index(kp)).remove(&1)?;
    let (lam_j, r_j) = coeff.as_unit_monomial()?;
    let mut perm = vec![0; 2];
    let mut lambda = vec![lam_o.clone(); 2];
    let mut r = vec![0; 2];
    perm[o] = k;
    perm[j] = kp;
    lambda[k] = lam_o;
    r[k] = r_o;
    lambda[kp] = lam_j;
    r[kp] = r_j;
    let rho = GenPerm::new(perm, lambda, r).ok()?;
    let rest = perm_endo(ctx, &rho.inverse()).compose(e);
    let phi = as_elementary(&rest).filter(|g| z_slot(g).is_some())?;
    Some((rho, phi))
}

fn acnonzero_endo(
    phi: &Generator,
    beta: &Endo,
    tau: &WeightVector,
) -> Result<(GenPerm, Generator)> {
    let ctx = beta.ctx();
    ensure_n2(ctx)?;
    let (j, _) = ensure_z_elementary(phi)?;
    validate_elementary_tau(phi, tau)?;
    let o = 1 - j;
    if beta.z_image(o).as_scaled_var().is_none() {
        return Err(Error::PatternMismatch(format!(
            "Phi moves z{}, but beta(z{}) = {} has no vanishing entry",
            j + 1,
            o + 1,
            beta.z_image(o)
        )));
    }
    let e = compose_exact(&phi.to_endo(ctx), beta, "Phi o beta")?;
    let (rho, phi2) = split_on_row(&e, o).ok_or_else(|| {
        Error::PatternMismatch(format!("Phi o beta = {e} does not split as rho o Phi'"))
    })?;
    if !is_fixed_by(&rho, tau) {
        return Err(Error::MembershipViolation(format!(
            "{rho:?} does not fix tau = {tau}"
        )));
    }
    validate_elementary_tau(&phi2, tau)?;
    let lhs = compose_exact(&phi.to_endo(ctx), beta, "Phi o beta")?;
    let rhs = perm_endo(ctx, &rho).compose(&phi2.to_endo(ctx));
    if lhs != rhs {
        return Err(Error::InternalContradiction(format!(
            "Phi o beta != rho o Phi' for Phi = {phi}, beta = {beta}"
        )));
    }
    Ok((rho, phi2))
}

/// `Phi o beta = rho o Phi'` for a linear `beta` with the vanishing entry the factorization
/// needs: the row of `beta` for the variable `Phi` does not move must be a single term.
pub fn acnonzero_factor(
    phi: &Generator,
    beta: &Generator,
    tau: &WeightVector,
) -> Result<(GenPerm, Generator)> {
    match beta {
        Generator::Linear { .. } | Generator::GenPerm(_) => {}
        Generator::Elementary { .. } if is_linear_elementary(beta) || beta.is_identity() => {}
        _ => {
            return Err(Error::PatternMismatch(format!("{beta} is not linear")));
        }
    }
    let ctx = match phi {
        Generator::Elementary { poly, .. } => poly.ctx().clone(),
        _ => {
            return Err(Error::PreconditionFailed(format!(
                "{phi} is not elementary"
            )))
        }
    };
    acnonzero_endo(phi, &beta.to_endo(&ctx), tau)
}

/// The image of `Phi` modulo `x` in the `tau`-scaled coordinates, lifted back.
pub fn eabar(g: &Generator, tau: &WeightVector) -> Result<Generator> {
    let (j, poly) = ensure_z_elementary(g)?;
    let t = tau.entries()[j];
    let lead = a_tau_leading(&poly.shift_x(t), tau).shift_x(-t);
    Generator::z_elementary(j, lead)
}

/// `Phi_1 o ... o Phi_q = alpha o Phi~_1 o ... o Phi~_q` with each `Phi~_i` the
/// reduction of `Phi_i` and `alpha` in `IA^tau`.
pub fn eabar_factor(
    ws: &[Generator],
    tau: &WeightVector,
) -> Result<(Automorphism, Vec<Generator>)> {
    let ctx = match ws.first().and_then(z_slot) {
        Some((_, p)) => p.ctx().clone(),
        None if ws.is_empty() => {
            return Err(Error::PreconditionFailed(
                "empty list of elementaries".into(),
            ))
        }
        None => {
            return Err(Error::PreconditionFailed(format!(
                "{} is not a z-elementary",
                ws[0]
            )))
        }
    };
    for g in ws {
        validate_elementary_tau(g, tau)?;
    }
    let mut alpha = Automorphism::identity(&ctx);
    let mut prefix = Automorphism::identity(&ctx);
    let mut bars = Vec::with_capacity(ws.len());
    for g in ws {
        let bar = eabar(g, tau)?;
        let gap = gen_aut(&ctx, g).compose(&gen_aut(&ctx, &bar).inverse());
        ia_evidence(&gap, tau).map_err(|e| {
            Error::InternalContradiction(format!("Phi o Phibar^-1 not in IA^{tau} for {g}: {e}"))
        })?;
        let pushed = if prefix.word().is_empty() {
            gap
        } else {
            alpha_push(&gap, &prefix.inverse(), tau)?
        };
        alpha = alpha.compose(&pushed).simplified();
        prefix = prefix.compose(&gen_aut(&ctx, &bar));
        bars.push(bar);
    }
    let lhs = Automorphism::from_word(GeneratorWord::new(&ctx, ws.to_vec())?);
    let rhs = alpha.compose(&Automorphism::from_word(GeneratorWord::new(
        &ctx,
        bars.clone(),
    )?));
    verify(&lhs, &rhs, "eabar factorization")?;
    ia_evidence(&alpha, tau)
        .map_err(|e| Error::InternalContradiction(format!("alpha not in IA^{tau}: {e}")))?;
    Ok((alpha, bars))
}

/// Degrees of `F'_i`, `G'_i` modulo `x` for one processed elementary.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeRecord {
    pub index: usize,
    /// The variable the elementary moves.
    pub variable: usize,
    pub linear: bool,
    /// `None` stands for the zero polynomial.
    pub deg_f: Option<u64>,
    pub deg_g: Option<u64>,
}

#[derive(Debug, Clone)]
#[allow(clippy::large_enum_variant)]
pub enum OnlyOnePhi {
    SameVariable,
    Factored {
        alpha: Automorphism,
        rho: GenPerm,
        phi: Generator,
        degrees: Vec<DegreeRecord>,
    },
}

fn mod_x_degree(p: &Poly) -> Result<Option<u64>> {
    Ok(p.mod_x()?.total_degree_yz())
}

fn product_endo(ctx: &Arc<RingContext>, gens: &[Generator], tail: &Endo) -> Result<Endo> {
    gens.iter().rev().try_fold(tail.clone(), |acc, g| {
        compose_exact(&g.to_endo(ctx), &acc, "product of elementaries")
    })
}

fn classify(p: &Poly) -> (bool, bool) {
    (p.is_over_r(), p.is_over_r() && p.divisible_by_x())
}

/// Factor `Phi_1 o ... o Phi_q` (all in `EA^tau`) as `alpha o rho o Phi` with `Phi` linear,
/// given the three assumptions on `omega` and the suffixes `Phi_i o ... o Phi_q o omega`.
pub fn only_one_phi_factor(
    ws: &[Generator],
    tau: &WeightVector,
    omega: &Endo,
) -> Result<OnlyOnePhi> {
    let ctx = omega.ctx().clone();
    ensure_n2(&ctx)?;
    tau.ensure_len(2)?;
    if ws.is_empty() {
        return Err(Error::PreconditionFailed(
            "empty list of elementaries".into(),
        ));
    }
    for g in ws {
        ensure_z_elementary(g)?;
        validate_elementary_tau(g, tau)?;
    }
    let fg = scaled_images(omega, tau);
    let (f_r, f_x) = classify(&fg[0]);
    let (g_r, g_x) = classify(&fg[1]);
    if !(f_r && g_r && f_x != g_x) {
        return Err(Error::PreconditionFailed(format!(
            "assumption 1: exactly one of omega(x^t z) = {}, {} must be divisible by x",
            fg[0], fg[1]
        )));
    }
    let mut suffixes = vec![omega.clone(); ws.len() + 1];
    for i in (0..ws.len()).rev() {
        suffixes[i] = compose_exact(&ws[i].to_endo(&ctx), &suffixes[i + 1], "suffix")?;
    }
    for (i, s) in suffixes.iter().enumerate().take(ws.len()).skip(1) {
        for (k, img) in scaled_images(s, tau).iter().enumerate() {
            if !img.is_over_r() || img.divisible_by_x() {
                return Err(Error::PreconditionFailed(format!(
                    "assumption 2: omega_{}(x^{} z{}) = {img} is not in R \\ xR",
                    i + 1,
                    tau.entries()[k],
                    k + 1
                )));
            }
        }
    }
    let (j0, _) = ensure_z_elementary(&ws[0])?;
    let first = &scaled_images(&suffixes[0], tau)[j0];
    if !first.is_over_r() || !first.divisible_by_x() {
        return Err(Error::PreconditionFailed(format!(
            "assumption 3: omega_1(x^{} z{}) = {first} is not in xR",
            tau.entries()[j0],
            j0 + 1
        )));
    }
    let vars: Vec<usize> = ws
        .iter()
        .filter(|g| !g.is_identity())
        .filter_map(|g| z_slot(g).map(|(k, _)| k))
        .collect();
    if vars.windows(2).all(|w| w[0] == w[1]) {
        return Ok(OnlyOnePhi::SameVariable);
    }
    // alpha o rho o Phi reduces to a linear map in the scaled coordinates modulo x.
    let scaled = product_endo(&ctx, ws, &Endo::identity(&ctx))?.conjugate_by(&tau.neg());
    let reduced = scaled.mod_x()?;
    if !(0..ctx.n()).all(|k| is_z_linear(reduced.z_image(k))) {
        return Err(Error::PatternMismatch(format!(
            "no factorization alpha o rho o Phi with Phi linear: the product reduces modulo x to {reduced}, which is not linear in z; word = {}",
            GeneratorWord::new(&ctx, ws.to_vec())?
        )));
    }

    let mut merged: Vec<Generator> = Vec::new();
    for g in ws.iter().filter(|g| !g.is_identity()) {
        match merged.last().and_then(|h| merge_same_variable(h, g)) {
            Some(m) => *merged.last_mut().expect("nonempty") = m,
            None => merged.push(g.clone()),
        }
    }
    let (alpha, mut tail) = eabar_factor(&merged, tau)?;
    let mut rho_acc = GenPerm::identity(2);
    let mut degrees = Vec::new();
    let mut i = tail.len() - 1;
    while i >= 1 {
        if !is_linear_elementary(&tail[i]) {
            let (var, _) = ensure_z_elementary(&tail[i])?;
            let next = (i + 1..tail.len())
                .find(|&k| !is_linear_elementary(&tail[k]))
                .unwrap_or(tail.len());
            if next > i + 1 {
                let beta = product_endo(&ctx, &tail[i + 1..next], &Endo::identity(&ctx))?;
                if beta.z_image(1 - var).as_scaled_var().is_some() {
                    let (rho, g) = acnonzero_endo(&tail[i], &beta, tau)?;
                    let front = GeneratorWord::new(&ctx, tail[..i].to_vec())?;
                    let pushed = rho_push(&front, &rho, tau)?;
                    let mut rebuilt = pushed.into_generators();
                    rebuilt.push(g);
                    rebuilt.extend_from_slice(&tail[next..]);
                    tail = rebuilt;
                    rho_acc = rho_acc.compose(&rho);
                }
            }
            let suffix = product_endo(&ctx, &tail[i..], omega)?;
            let imgs = scaled_images(&suffix, tau);
            let record = DegreeRecord {
                index: i,
                variable: var,
                linear: is_linear_elementary(&tail[i]),
                deg_f: mod_x_degree(&imgs[0])?,
                deg_g: mod_x_degree(&imgs[1])?,
            };
            let ordered = match var {
                0 => record.deg_f > record.deg_g,
                _ => record.deg_f < record.deg_g,
            };
            if !record.linear && !ordered {
                return Err(Error::InternalContradiction(format!(
                    "degree bookkeeping fails at elementary {} = {}: deg F = {:?}, deg G = {:?}; word = {}",
                    i,
                    tail[i],
                    record.deg_f,
                    record.deg_g,
                    GeneratorWord::new(&ctx, tail.clone())?
                )));
            }
            degrees.push(record);
        }
        i = i.min(tail.len()) - 1;
    }
    if let Some(bad) = tail
        .iter()
        .find(|g| !is_linear_elementary(g) && !g.is_identity())
    {
        return Err(Error::InternalContradiction(format!(
            "elementary {bad} stays nonlinear; word = {}",
            GeneratorWord::new(&ctx, tail.clone())?
        )));
    }
    let b = product_endo(&ctx, &tail, &Endo::identity(&ctx))?;
    let (j1, _) = ensure_z_elementary(&tail[0])?;
    let (rho_b, phi) = split_on_row(&b, j1).ok_or_else(|| {
        Error::InternalContradiction(format!(
            "linear product {b} has no vanishing entry in row z{}",
            j1 + 1
        ))
    })?;
    let rho = rho_acc.compose(&rho_b);
    if !is_fixed_by(&rho, tau) {
        return Err(Error::InternalContradiction(format!(
            "{rho:?} does not fix tau = {tau}"
        )));
    }
    validate_elementary_tau(&phi, tau)?;
    let lhs = Automorphism::from_word(GeneratorWord::new(&ctx, ws.to_vec())?);
    let rhs = alpha
        .compose(&perm_aut(&ctx, &rho))
        .compose(&gen_aut(&ctx, &phi));
    verify(&lhs, &rhs, "Phi_1 o ... o Phi_q != alpha o rho o Phi")?;
    Ok(OnlyOnePhi::Factored {
        alpha,
        rho,
        phi,
        degrees,
    })
}

/// Output of [`no_alpha_no_rho`].
#[derive(Debug, Clone)]
pub struct Consolidated {
    pub alpha: Automorphism,
    pub rho: GenPerm,
    /// `phi'_0, ..., phi'_{q-1}, phi_q`.
    pub phis: Vec<GeneratorWord>,
    pub evidence: Evidence,
}

fn hyp(stage: usize, msg: impl Into<String>) -> Error {
    Error::HypothesisViolation {
        stage,
        msg: msg.into(),
    }
}

/// Rewrite `alpha_0 o rho_0 o phi_0 o ... o alpha_q o rho_q o phi_q` as
/// `alpha' o (rho_0 o ... o rho_q) o phi'_0 o ... o phi'_{q-1} o phi_q`.
///
/// `taus[i]` is `tau_i`; the hypotheses are `alpha_i in IA^{tau_i}`, and for `i < q`,
/// `rho_i(tau_i) <= tau_{i+1}` and `phi_i` in `EA^{tau_{i+1}}`.
pub fn no_alpha_no_rho(
    stages: &[(Automorphism, GenPerm, GeneratorWord)],
    taus: &[WeightVector],
) -> Result<Consolidated> {
    let Some(last) = stages.last() else {
        return Err(Error::PreconditionFailed("no stages".into()));
    };
    if taus.len() != stages.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} stages but {} weights",
            stages.len(),
            taus.len()
        )));
    }
    let ctx = last.0.ctx().clone();
    let q = stages.len() - 1;
    let mut evidence = Evidence::Exact;
    for (i, (alpha, rho, phi)) in stages.iter().enumerate() {
        let e = ia_evidence(alpha, &taus[i])
            .map_err(|e| hyp(i, format!("alpha not in IA^{}: {e}", taus[i])))?;
        evidence = evidence.and(e);
        if i < q {
            let rt = rho_apply_tau(rho, &taus[i]);
            if !rt.le(&taus[i + 1]) {
                return Err(hyp(i, format!("rho(tau) = {rt} is not <= {}", taus[i + 1])));
            }
            for g in phi.generators() {
                validate_elementary_tau(g, &taus[i + 1])
                    .map_err(|e| hyp(i, format!("phi not in EA^{}: {e}", taus[i + 1])))?;
            }
        }
    }
    let (mut alpha, mut rho, mut phis) = (last.0.clone(), last.1.clone(), vec![last.2.clone()]);
    for i in (0..q).rev() {
        let (alpha_i, rho_i, phi_i) = &stages[i];
        let next = &taus[i + 1];
        let phi_aut = Automorphism::from_word(phi_i.clone());
        let tilde = alpha_push(&alpha, &phi_aut.inverse(), next).map_err(|e| e.at(i))?;
        let back = rho_i.inverse();
        let conj = ia_rho_conjugate(&tilde, &back, next).map_err(|e| e.at(i))?;
        let sigma = rho_apply_tau(&back, next);
        let (beta, phi_t) = ia_reduce(&conj, &sigma, &taus[i]).map_err(|e| e.at(i))?;
        let phi_p = rho_push(phi_t.word(), rho_i, &sigma).map_err(|e| e.at(i))?;
        let phi_0 = rho_push(&phi_p.then(phi_i), &rho, next).map_err(|e| e.at(i))?;
        alpha = alpha_i.compose(&beta).simplified();
        rho = rho_i.compose(&rho);
        phis.insert(0, phi_0);
    }
    let lhs = stages
        .iter()
        .fold(Automorphism::identity(&ctx), |acc, (a, r, p)| {
            acc.compose(a)
                .compose(&perm_aut(&ctx, r))
                .compose(&Automorphism::from_word(p.clone()))
        });
    let rhs = phis
        .iter()
        .fold(alpha.compose(&perm_aut(&ctx, &rho)), |acc, p| {
            acc.compose(&Automorphism::from_word(p.clone()))
        });
    evidence = evidence.and(verify(&lhs, &rhs, "consolidation")?);
    Ok(Consolidated {
        alpha,
        rho,
        phis,
        evidence,
    })
}

/// `alpha_1 o rho_1 o alpha_2 o rho_2 = alpha' o rho' o Phi` when
/// `tau_2 - rho_1(tau_1)` is supported on one coordinate.
pub fn alpharho_merge(
    alpha1: &Automorphism,
    rho1: &GenPerm,
    alpha2: &Automorphism,
    rho2: &GenPerm,
    tau1: &WeightVector,
    tau2: &WeightVector,
) -> Result<(Automorphism, GenPerm, Generator)> {
    let ctx = alpha1.ctx().clone();
    let gap = tau2.sub(&rho_apply_tau(rho1, tau1));
    let (k, delta) = gap
        .as_rank_one()
        .filter(|&(_, d)| d >= 0)
        .ok_or_else(|| Error::GapNotRankOne(format!("tau_2 - rho_1(tau_1) = {gap}")))?;
    let back = rho1.inverse();
    let sigma = rho_apply_tau(&back, tau2);
    let conj = ia_rho_conjugate(alpha2, &back, tau2)?;
    let (beta, phi_t) = ia_reduce(&conj, &sigma, tau1)?;
    let phi_1 = rho_push(phi_t.word(), rho1, &sigma)?;
    let phi = rho_push(&phi_1, rho2, tau2)?;
    let phi = match phi.generators() {
        [] => identity_elementary(&ctx, k),
        [g] => g.clone(),
        gens => {
            return Err(Error::InternalContradiction(format!(
                "gap {delta} e_{} produced {} elementaries",
                k + 1,
                gens.len()
            )))
        }
    };
    let alpha = alpha1.compose(&beta).simplified();
    let rho = rho1.compose(rho2);
    let lhs = alpha1
        .compose(&perm_aut(&ctx, rho1))
        .compose(alpha2)
        .compose(&perm_aut(&ctx, rho2));
    let rhs = alpha
        .compose(&perm_aut(&ctx, &rho))
        .compose(&gen_aut(&ctx, &phi));
    verify(&lhs, &rhs, "alpha rho alpha rho != alpha' rho' Phi")?;
    Ok((alpha, rho, phi))
}

/// Per-stage evaluation of the four minimality formulations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TechnicalRow {
    pub index: usize,
    /// Minimal for `omega_i`.
    pub tau_omega: WeightVector,
    /// Minimal with `(Phi_i o omega_{i+1})(A_{rho_i(tau)})` over `R`.
    pub tau_phi: WeightVector,
    /// Minimal for `rho_i o Phi_i o omega_{i+1}`.
    pub tau_rho_phi: WeightVector,
    /// Minimal for `Phi'_i o rho_i o omega_{i+1}` with `Phi'_i = rho_i Phi_i rho_i^{-1}`.
    pub tau_conjugate: WeightVector,
    pub equivalent: bool,
    /// The variable `Phi_i` moves and `delta_i` with `rho_i(tau_i) - tau_{i+1} = delta_i e_j`.
    pub variable: usize,
    pub delta: Option<i64>,
    /// `(rho_i o omega_{i+1})(x^{t_k} z_k)` lies in `R \ xR` for the variables `Phi'_i` fixes.
    pub fixed_images_primitive: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TechnicalReport {
    pub rows: Vec<TechnicalRow>,
    pub all_equivalent: bool,
    pub consequences_hold: bool,
}

fn tau_through_rho(e: &Endo, rho: &GenPerm) -> WeightVector {
    let ctx = e.ctx();
    let inv = rho.inverse_perm();
    let mut t = vec![0; ctx.n()];
    for k in 0..ctx.n() {
        let need = match e.z_image(k).x_order() {
            XOrder::Finite(o) => (-o).max(0),
            XOrder::Infinite => 0,
        };
        t[inv[k]] = (need - rho.r()[k]).max(0);
    }
    WeightVector::new(t)
}

/// Evaluate the four equivalent minimality conditions and their consequences.
///
/// Inequivalence is reported, not raised: it would contradict the theory.
pub fn technical_conditions(stages: &[Mt2Stage]) -> Result<TechnicalReport> {
    let mut rows = Vec::with_capacity(stages.len());
    for (i, st) in stages.iter().enumerate() {
        let ctx = st.omega.ctx().clone();
        let next_omega = stages
            .get(i + 1)
            .map_or_else(|| Endo::identity(&ctx), |s| s.omega.clone());
        let next_tau = stages
            .get(i + 1)
            .map_or_else(|| WeightVector::zero(ctx.n()), |s| s.tau.clone());
        let rho = perm_endo(&ctx, &st.rho);
        let phi = st.phi.to_endo(&ctx);
        let phi_omega = compose_exact(&phi, &next_omega, "Phi o omega")?;
        let rho_phi = compose_exact(&rho, &phi_omega, "rho o Phi o omega")?;
        let conj = rho
            .compose(&phi)
            .compose(&perm_endo(&ctx, &st.rho.inverse()));
        let rho_omega = compose_exact(&rho, &next_omega, "rho o omega")?;
        let conj_full = compose_exact(&conj, &rho_omega, "Phi' o rho o omega")?;
        let tau_omega = minimal_tau(&st.omega)?;
        let tau_phi = tau_through_rho(&phi_omega, &st.rho);
        let tau_rho_phi = minimal_tau(&rho_phi)?;
        let tau_conjugate = minimal_tau(&conj_full)?;
        let equivalent =
            tau_omega == tau_phi && tau_phi == tau_rho_phi && tau_rho_phi == tau_conjugate;
        let (variable, _) = ensure_z_elementary(&st.phi)?;
        let gap = rho_apply_tau(&st.rho, &st.tau).sub(&next_tau);
        let delta = match gap.as_rank_one() {
            Some((_, 0)) => Some(0),
            Some((k, d)) if k == variable => Some(d),
            _ => None,
        };
        let moved = as_elementary(&conj).and_then(|g| z_slot(&g).map(|(k, _)| k));
        let fixed_images_primitive = (0..ctx.n())
            .filter(|&k| Some(k) != moved || conj.is_identity())
            .all(|k| {
                let img = rho_omega.z_image(k).shift_x(st.tau.entries()[k]);
                img.is_over_r() && !img.divisible_by_x()
            });
        rows.push(TechnicalRow {
            index: i,
            tau_omega,
            tau_phi,
            tau_rho_phi,
            tau_conjugate,
            equivalent,
            variable,
            delta,
            fixed_images_primitive,
        });
    }
    let all_equivalent = rows.iter().all(|r| r.equivalent);
    let consequences_hold = rows.iter().all(|r| r.delta.is_some());
    Ok(TechnicalReport {
        rows,
        all_equivalent,
        consequences_hold,
    })
}

fn stage_word(ctx: &Arc<RingContext>, stages: &[Mt2Input]) -> GeneratorWord {
    stages
        .iter()
        .fold(GeneratorWord::empty(ctx), |w, s| w.then(&s.word()))
}

fn elementary_count(stages: &[Mt2Input]) -> usize {
    stages.len()
}

/// First index `a` (from the right) with `rho_a(tau_a) < tau_{a+1}`.
fn find_inversion(stages: &[Mt2Stage]) -> Result<Option<(usize, usize)>> {
    let n = stages.first().map_or(0, |s| s.tau.len());
    let next = |i: usize| {
        stages
            .get(i + 1)
            .map_or_else(|| WeightVector::zero(n), |s| s.tau.clone())
    };
    let mut a = None;
    for i in (0..stages.len()).rev() {
        let rt = rho_apply_tau(&stages[i].rho, &stages[i].tau);
        match rt.compare(&next(i)) {
            Some(Ordering::Less) => {
                a = Some(i);
                break;
            }
            Some(_) => {}
            None => {
                return Err(Error::InternalContradiction(format!(
                    "rho_{i}(tau_{i}) = {rt} and tau_{} = {} are incomparable",
                    i + 1,
                    next(i)
                )))
            }
        }
    }
    let Some(a) = a else { return Ok(None) };
    let b = (a + 1..stages.len())
        .find(|&i| {
            rho_apply_tau(&stages[i].rho, &stages[i].tau).compare(&next(i))
                == Some(Ordering::Greater)
        })
        .ok_or_else(|| {
            Error::InternalContradiction(format!(
                "inversion at {a} is not followed by a strict drop"
            ))
        })?;
    Ok(Some((a, b)))
}

fn rewrite_step(tau: &WeightVector, input: String, output: String, note: String) -> ReductionStep {
    ReductionStep {
        kind: StepKind::Rewrite,
        tau: tau.clone(),
        input,
        output,
        witnesses: vec![note],
    }
}

/// Rewrite a two-variable stage list until `rho_i(tau_i) >= tau_{i+1}` everywhere, then
/// run the first main pipeline; `theta(y_j)` matches the input's `y_j`-image.
pub fn mt2_pipeline(ctx: &Arc<RingContext>, inputs: &[Mt2Input]) -> Result<Certificate> {
    ensure_n2(ctx)?;
    for (i, s) in inputs.iter().enumerate() {
        ensure_z_elementary(&s.phi).map_err(|e| e.at(i))?;
    }
    let original = stage_word(ctx, inputs);
    let mut cur: Vec<Mt2Input> = inputs.to_vec();
    let mut trace = Vec::new();
    let mut steps = Vec::new();
    let mut consolidated_last = false;
    for round in 0..MAX_ROUNDS {
        let stages = mt2_stages(ctx, &cur)?;
        for (i, st) in stages.iter().enumerate() {
            ia_evidence(&st.alpha, &st.tau)
                .map_err(|e| hyp(i, format!("alpha not in IA^{}: {e}", st.tau)))?;
        }
        let Some((a, b)) = find_inversion(&stages)? else {
            trace.push(format!(
                "round {round}: weights monotone ({}), hand-off to the first pipeline",
                stages
                    .iter()
                    .map(|s| s.tau.to_string())
                    .collect::<Vec<_>>()
                    .join(" ")
            ));
            return finish(ctx, &original, &stages, trace, steps);
        };
        let omega_next = |i: usize| {
            stages
                .get(i + 1)
                .map_or_else(|| Endo::identity(ctx), |s| s.omega.clone())
        };
        let sigma = rho_apply_tau(&stages[a].rho, &stages[a].tau);
        let tau_next = stages[a + 1].tau.clone();
        if !phi_ea_tau_check(&stages[a].phi, &sigma, &tau_next, &omega_next(a))
            .map_err(|e| e.at(a))?
        {
            return Err(Error::InternalContradiction(format!(
                "Phi_{a} = {} is not in EA^{tau_next}",
                stages[a].phi
            ))
            .at(a));
        }
        trace.push(format!(
            "round {round}: inversion at a = {a}, drop at b = {b}; Phi_{a} in EA^{tau_next}"
        ));
        if cur[a + 1..=b].iter().any(|s| !s.is_bare()) {
            if consolidated_last {
                return Err(Error::NonTermination(format!(
                    "consolidation repeated at a = {a}, b = {b}"
                )));
            }
            let segment: Vec<_> = cur[a..=b]
                .iter()
                .map(|s| {
                    (
                        s.alpha.clone(),
                        s.rho.clone(),
                        GeneratorWord::single(ctx, s.phi.clone()),
                    )
                })
                .collect();
            let taus: Vec<_> = stages[a..=b].iter().map(|s| s.tau.clone()).collect();
            let out = no_alpha_no_rho(&segment, &taus).map_err(|e| e.at(a))?;
            let mut gens: Vec<Generator> = out
                .phis
                .iter()
                .flat_map(|w| w.generators().iter().cloned())
                .collect();
            if gens.is_empty() {
                gens.push(identity_elementary(ctx, 0));
            }
            let mut replaced = vec![Mt2Input::new(out.alpha, out.rho, gens.remove(0))];
            replaced.extend(gens.into_iter().map(|g| Mt2Input::bare(ctx, g)));
            steps.push(rewrite_step(
                &stages[a].tau,
                stage_word(ctx, &cur[a..=b]).to_string(),
                stage_word(ctx, &replaced).to_string(),
                format!("consolidate alphas and rhos; evidence: {}", out.evidence),
            ));
            trace.push(format!(
                "round {round}: consolidated stages {a}..={b} into {} stages, weights recomputed",
                replaced.len()
            ));
            cur.splice(a..=b, replaced);
            consolidated_last = true;
            continue;
        }
        consolidated_last = false;
        let tb = stages[b].tau.clone();
        if let Some((i, s)) = stages
            .iter()
            .enumerate()
            .take(b + 1)
            .skip(a + 1)
            .find(|(_, s)| s.tau != tb)
        {
            return Err(Error::InternalContradiction(format!(
                "tau_{i} = {} differs from tau_{b} = {tb}",
                s.tau
            ))
            .at(i));
        }
        let ws: Vec<Generator> = stages[a..=b].iter().map(|s| s.phi.clone()).collect();
        for (off, g) in ws.iter().enumerate() {
            validate_elementary_tau(g, &tb).map_err(|e| e.at(a + off))?;
        }
        let before = elementary_count(&cur);
        let head = &cur[a];
        let new_stages = match only_one_phi_factor(&ws, &tb, &omega_next(b)).map_err(|e| e.at(a))? {
            OnlyOnePhi::SameVariable => {
                let phi = ws
                    .iter()
                    .skip(1)
                    .try_fold(ws[0].clone(), |acc, g| merge_same_variable(&acc, g))
                    .ok_or_else(|| {
                        Error::InternalContradiction("same-variable merge failed".into()).at(a)
                    })?;
                trace.push(format!(
                    "round {round}: Phi_{a}..Phi_{b} share a variable, merged"
                ));
                vec![Mt2Input::new(head.alpha.clone(), head.rho.clone(), phi)]
            }
            OnlyOnePhi::Factored {
                alpha, rho, phi, ..
            } => {
                let (alpha_p, rho_p, phi_p) = alpharho_merge(
                    &head.alpha,
                    &head.rho,
                    &alpha,
                    &rho,
                    &stages[a].tau,
                    &tau_next,
                )
                .map_err(|e| e.at(a))?;
                if let Some(m) = merge_same_variable(&phi_p, &phi) {
                    trace.push(format!(
                        "round {round}: factored Phi_{a}..Phi_{b}, merged in one variable"
                    ));
                    vec![Mt2Input::new(alpha_p, rho_p, m)]
                } else {
                    match acnonzero_endo(&phi_p, &phi.to_endo(ctx), &tau_next) {
                        Ok((rho_t, phi_t)) => {
                            trace.push(format!(
                                "round {round}: factored Phi_{a}..Phi_{b}, split through a permutation"
                            ));
                            vec![Mt2Input::new(alpha_p, rho_p.compose(&rho_t), phi_t)]
                        }
                        Err(Error::PatternMismatch(msg)) if b > a + 1 => {
                            trace.push(format!(
                                "round {round}: factored Phi_{a}..Phi_{b}, kept two elementaries ({msg})"
                            ));
                            vec![
                                Mt2Input::new(alpha_p, rho_p, phi_p),
                                Mt2Input::bare(ctx, phi),
                            ]
                        }
                        Err(e) => return Err(e.at(a)),
                    }
                }
            }
        };
        let lhs = Automorphism::from_word(stage_word(ctx, &cur[a..=b]));
        let rhs = Automorphism::from_word(stage_word(ctx, &new_stages));
        let evidence = verify(&lhs, &rhs, "segment rewrite").map_err(|e| e.at(a))?;
        steps.push(rewrite_step(
            &tau_next,
            lhs.word().to_string(),
            rhs.word().to_string(),
            format!("evidence: {evidence}"),
        ));
        cur.splice(a..=b, new_stages);
        let after = elementary_count(&cur);
        if after >= before {
            return Err(Error::NonTermination(format!(
                "elementary count went from {before} to {after}"
            )));
        }
    }
    Err(Error::NonTermination(format!(
        "no monotone form after {MAX_ROUNDS} rounds"
    )))
}

fn finish(
    ctx: &Arc<RingContext>,
    original: &GeneratorWord,
    stages: &[Mt2Stage],
    trace: Vec<String>,
    mut steps: Vec<ReductionStep>,
) -> Result<Certificate> {
    let mt1: Vec<Mt1Stage> = stages
        .iter()
        .map(|s| {
            Mt1Stage::new(
                s.alpha.clone(),
                s.rho.clone(),
                gen_aut(ctx, &s.phi),
                s.tau.clone(),
            )
        })
        .collect();
    let inner = mt1_pipeline(ctx, &mt1)?;
    steps.extend(inner.steps);
    let mut cert = Certificate::build(original.clone(), inner.sigma_sequence, inner.theta, steps);
    cert.conjugates = inner.conjugates;
    cert.rewrite_trace = Some(trace);
    cert.into_verified()
}
