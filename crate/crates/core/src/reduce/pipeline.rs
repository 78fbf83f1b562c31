use std::sync::Arc;

use super::certificate::{Certificate, ReductionStep, StepKind};
use super::ia_ops::{check_ga_tau, crucial_reduce, ia_evidence, ia_rho_conjugate};
use crate::error::{Error, Result};
use crate::group::{validate_elementary_tau, Automorphism, GenPerm, Generator, GeneratorWord};
use crate::ring::RingContext;
use crate::weights::{rho_apply_tau, sigma_sequence, WeightVector};

/// One `(alpha_i, rho_i, Phi_i)` stage together with its weight `tau_i`.
#[derive(Debug, Clone)]
pub struct Mt1Stage {
    pub alpha: Automorphism,
    pub rho: GenPerm,
    pub phi: Automorphism,
    pub tau: WeightVector,
}

impl Mt1Stage {
    pub fn new(alpha: Automorphism, rho: GenPerm, phi: Automorphism, tau: WeightVector) -> Self {
        Mt1Stage {
            alpha,
            rho,
            phi,
            tau,
        }
    }

    /// `alpha o rho o Phi` as a word.
    pub fn word(&self) -> GeneratorWord {
        let mut w = self.alpha.word().clone();
        if !self.rho.is_identity() {
            w.push(Generator::GenPerm(self.rho.clone()));
        }
        w.then(self.phi.word())
    }
}

fn violation(stage: usize, msg: impl Into<String>) -> Error {
    Error::HypothesisViolation {
        stage,
        msg: msg.into(),
    }
}

/// Check the hypotheses of the first main pipeline for every stage.
pub fn check_mt1_hypotheses(ctx: &Arc<RingContext>, stages: &[Mt1Stage]) -> Result<()> {
    for (i, st) in stages.iter().enumerate() {
        st.tau
            .ensure_len(ctx.n())
            .map_err(|e| violation(i, e.to_string()))?;
        if !st.tau.is_natural() {
            return Err(violation(i, format!("tau = {} is not natural", st.tau)));
        }
        let rt = rho_apply_tau(&st.rho, &st.tau);
        if !rt.is_natural() {
            return Err(violation(i, format!("rho(tau) = {rt} is not natural")));
        }
        let next = stages
            .get(i + 1)
            .map_or_else(|| WeightVector::zero(ctx.n()), |s| s.tau.clone());
        if !rt.ge(&next) {
            return Err(violation(
                i,
                format!("rho(tau) = {rt} is not >= tau_next = {next}"),
            ));
        }
        ia_evidence(&st.alpha, &st.tau)
            .map_err(|e| violation(i, format!("alpha not in IA^{}: {e}", st.tau)))?;
        check_ga_tau(&st.phi, &rt).map_err(|e| violation(i, format!("Phi not in GA^{rt}: {e}")))?;
    }
    Ok(())
}

/// Iterate `theta_i = Phi~ o (rho_i^{-1} o theta_{i-1} o alpha_i o rho_i) o Phi_i`.
pub fn mt1_pipeline(ctx: &Arc<RingContext>, stages: &[Mt1Stage]) -> Result<Certificate> {
    check_mt1_hypotheses(ctx, stages)?;
    let mut theta = Automorphism::identity(ctx);
    let mut input = GeneratorWord::empty(ctx);
    let mut steps = Vec::new();
    let mut conjugates = Vec::new();
    for (i, st) in stages.iter().enumerate() {
        input = input.then(&st.word());
        let rt = rho_apply_tau(&st.rho, &st.tau);
        let inner = theta.compose(&st.alpha);
        let conj = ia_rho_conjugate(&inner, &st.rho, &st.tau).map_err(|e| e.at(i))?;
        let red = crucial_reduce(&conj, &st.phi, &rt).map_err(|e| e.at(i))?;
        steps.push(ReductionStep {
            kind: StepKind::Mt1Iterate,
            tau: rt.clone(),
            input: format!("{}", conj.word()),
            output: format!("{}", red.theta.word()),
            witnesses: vec![
                format!("phi~ = {}", red.phi_tilde.word()),
                format!("evidence: {}", red.evidence),
            ],
        });
        let next = stages
            .get(i + 1)
            .map_or_else(|| WeightVector::zero(ctx.n()), |s| s.tau.clone());
        ia_evidence(&red.theta, &next).map_err(|e| {
            Error::MembershipViolation(format!("theta_{i} not in IA^{next}: {e}")).at(i)
        })?;
        conjugates.push(red.conjugate);
        theta = red.theta;
    }
    let taus = stages.iter().map(|s| s.tau.clone()).collect();
    let mut cert = Certificate::build(input, taus, theta, steps);
    cert.conjugates = conjugates;
    cert.into_verified()
}

/// Stages `(alpha, id, Phi_0, sigma_0), (id, id, Phi_i, sigma_i)` for an elementary word.
pub fn at2_stages(alpha: &Automorphism, word: &GeneratorWord) -> Result<Vec<Mt1Stage>> {
    let ctx = word.ctx();
    RingContext::ensure_same(ctx, alpha.ctx())?;
    let seq = sigma_sequence(word)?;
    if word.is_empty() {
        return Ok(if alpha.word().is_empty() {
            Vec::new()
        } else {
            let zero = WeightVector::zero(ctx.n());
            ia_evidence(alpha, &zero).map_err(|e| Error::AlphaNotInIASigma0(e.to_string()))?;
            vec![Mt1Stage::new(
                alpha.clone(),
                GenPerm::identity(ctx.n()),
                Automorphism::identity(ctx),
                zero,
            )]
        });
    }
    ia_evidence(alpha, &seq.sigmas[0])
        .map_err(|e| Error::AlphaNotInIASigma0(format!("sigma_0 = {}: {e}", seq.sigmas[0])))?;
    let mut stages = Vec::with_capacity(word.len());
    for (i, g) in word.generators().iter().enumerate() {
        validate_elementary_tau(g, &seq.sigmas[i]).map_err(|e| Error::ElementaryNotInEASigma {
            index: i,
            msg: e.to_string(),
        })?;
        let a = if i == 0 {
            alpha.clone()
        } else {
            Automorphism::identity(ctx)
        };
        stages.push(Mt1Stage::new(
            a,
            GenPerm::identity(ctx.n()),
            Automorphism::from_generator(ctx, g.clone()),
            seq.sigmas[i].clone(),
        ));
    }
    Ok(stages)
}

/// `theta = alpha o Phi_0 o .. o Phi_q` reduced to a coordinate system over `R`.
pub fn at2_pipeline(alpha: &Automorphism, word: &GeneratorWord) -> Result<Certificate> {
    let stages = at2_stages(alpha, word)?;
    mt1_pipeline(word.ctx(), &stages)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::Slot;
    use crate::ring::parse_poly;

    #[test]
    fn empty_stage_list_gives_identity() {
        let ctx = RingContext::new(1, 2, 0).unwrap();
        let cert = mt1_pipeline(&ctx, &[]).unwrap();
        assert!(cert.theta.is_identity());
        assert!(cert.checks.all_pass());
    }

    #[test]
    fn nagata_through_at2() {
        let ctx = RingContext::new(1, 1, 0).unwrap();
        let alpha = Automorphism::from_generator(
            &ctx,
            Generator::elementary(Slot::Y(0), parse_poly("x^2*z", &ctx).unwrap()).unwrap(),
        );
        let word = GeneratorWord::single(
            &ctx,
            Generator::z_elementary(0, parse_poly("-y^2/x", &ctx).unwrap()).unwrap(),
        );
        let cert = at2_pipeline(&alpha, &word).unwrap();
        assert_eq!(
            cert.theta_y(0),
            &parse_poly("y + x*(x*z - y^2)", &ctx).unwrap()
        );
        assert_eq!(cert.sigma_sequence, vec![WeightVector::new(vec![1])]);
    }

    #[test]
    fn hypothesis_violation_names_stage() {
        let ctx = RingContext::new(1, 1, 0).unwrap();
        let phi = Automorphism::from_generator(
            &ctx,
            Generator::z_elementary(0, parse_poly("y^2/x", &ctx).unwrap()).unwrap(),
        );
        let st = Mt1Stage::new(
            Automorphism::identity(&ctx),
            GenPerm::identity(1),
            phi,
            WeightVector::new(vec![0]),
        );
        assert!(matches!(
            mt1_pipeline(&ctx, &[st]),
            Err(Error::HypothesisViolation { stage: 0, .. })
        ));
    }
}
