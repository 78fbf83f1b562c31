use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use num_traits::Zero;

use crate::group::probe::{
    sampled_ia, sampled_matches, word_jacobian, Evidence, SampleFailure, Sampler,
};
use crate::group::{Automorphism, Endo, GeneratorWord};
use crate::io::{
    check_version, endo_from_strings, word_from_json, word_to_json, GeneratorJson, SCHEMA_VERSION,
};
use crate::ring::{parse_poly, ContextSpec, Poly, RingContext};
use crate::weights::WeightVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StepKind {
    Taylor,
    Push,
    StrongIa,
    Crucial,
    Mt1Iterate,
    Rewrite,
}

/// One logged reduction step; `input` and `output` evaluate to the same map.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionStep {
    pub kind: StepKind,
    pub tau: WeightVector,
    pub input: String,
    pub output: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub witnesses: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Checks {
    pub over_r: bool,
    pub id_mod_x: bool,
    pub inverse_over_r: bool,
    pub y_match: bool,
    pub jacobian_unit: bool,
    /// Hypotheses for stable tameness hold; recorded, not part of `all_pass`.
    pub tame_flag: bool,
}

impl Checks {
    pub fn all_pass(&self) -> bool {
        self.over_r && self.id_mod_x && self.inverse_over_r && self.y_match && self.jacobian_unit
    }

    /// Name of the first failing check.
    pub fn first_failure(&self) -> Option<&'static str> {
        [
            (self.over_r, "over_r"),
            (self.id_mod_x, "id_mod_x"),
            (self.inverse_over_r, "inverse_over_r"),
            (self.y_match, "y_match"),
            (self.jacobian_unit, "jacobian_unit"),
        ]
        .into_iter()
        .find(|(ok, _)| !ok)
        .map(|(_, name)| name)
    }
}

/// Output of a reduction pipeline: `theta` over `R`, `theta = id mod x`, with
/// `theta(y_j)` equal to the input composite's `y_j`-image.
#[derive(Debug, Clone)]
pub struct Certificate {
    pub ctx: Arc<RingContext>,
    pub input_word: GeneratorWord,
    pub sigma_sequence: Vec<WeightVector>,
    pub theta: Automorphism,
    /// `theta(y_j)`, always expanded.
    pub theta_y: Vec<Poly>,
    pub checks: Checks,
    /// How the checks on `theta` were carried out.
    pub evidence: Evidence,
    pub steps: Vec<ReductionStep>,
    pub rewrite_trace: Option<Vec<String>>,
    /// Per stage, the conjugate `Phi^{-1} o a o Phi` handed to the strong reduction.
    pub conjugates: Vec<Automorphism>,
}

/// `w(y_j)` for every `j`, pushed through the generators.
pub fn y_images(w: &GeneratorWord) -> Vec<Poly> {
    let ctx = w.ctx();
    (0..ctx.m()).map(|j| w.apply(&Poly::y(ctx, j))).collect()
}

fn generators_invert(w: &GeneratorWord, inverse: &GeneratorWord) -> bool {
    let ctx = w.ctx();
    w.len() == inverse.len()
        && w.generators()
            .iter()
            .zip(inverse.generators().iter().rev())
            .all(|(g, h)| {
                g.to_endo(ctx).compose(&h.to_endo(ctx)).is_identity()
                    && h.to_endo(ctx).compose(&g.to_endo(ctx)).is_identity()
            })
}

/// Evaluate the five checks for `theta` and its inverse word against the `y`-images
/// of the input composite.
///
/// Expanded maps are checked exactly. Past the expansion limit, `over_r`, `id_mod_x`
/// and `inverse_over_r` are sampled, and the Jacobian follows from the chain rule.
pub fn evaluate_checks(
    theta: &Automorphism,
    theta_inverse: &GeneratorWord,
    composite_y: &[Poly],
    tame: bool,
) -> (Checks, Evidence) {
    let ctx = theta.ctx();
    let mut sampler = Sampler::default();
    let mut evidence = Evidence::Exact;
    let (over_r, id_mod_x, jacobian_unit) = match theta.try_endo() {
        Some(e) => {
            let over = e.is_over_r();
            (
                over,
                over && e.is_identity_mod_x(),
                e.jacobian().unit_constant().is_some(),
            )
        }
        None => {
            let (over, id) = match sampled_ia(theta.word(), &mut sampler) {
                Ok(ev) => {
                    evidence = evidence.and(ev);
                    (true, true)
                }
                Err(SampleFailure::NotIdentityModX(_)) => (true, false),
                Err(_) => (false, false),
            };
            let det = word_jacobian(theta.word());
            (
                over,
                id,
                det.and_then(|d| d.as_constant())
                    .is_some_and(|c| !c.is_zero()),
            )
        }
    };
    let inv = Automorphism::from_word(theta_inverse.clone());
    let inverse_over_r = generators_invert(theta.word(), theta_inverse)
        && match inv.try_endo() {
            Some(e) => e.is_over_r(),
            None => match sampled_ia(theta_inverse, &mut sampler) {
                Ok(ev) => {
                    evidence = evidence.and(ev);
                    true
                }
                Err(SampleFailure::NotIdentityModX(_)) => true,
                Err(_) => false,
            },
        };
    let y_match = composite_y.len() == ctx.m()
        && (0..ctx.m()).all(|j| theta.word().apply(&Poly::y(ctx, j)) == composite_y[j]);
    let checks = Checks {
        over_r,
        id_mod_x,
        inverse_over_r,
        y_match,
        jacobian_unit,
        tame_flag: tame,
    };
    (checks, evidence)
}

impl Certificate {
    pub fn build(
        input_word: GeneratorWord,
        sigma_sequence: Vec<WeightVector>,
        theta: Automorphism,
        steps: Vec<ReductionStep>,
    ) -> Certificate {
        let composite_y = y_images(&input_word);
        let tame = input_word.is_tame() && theta.word().is_tame();
        let (checks, evidence) =
            evaluate_checks(&theta, &theta.word().inverse(), &composite_y, tame);
        let theta_y = y_images(theta.word());
        Certificate {
            ctx: input_word.ctx().clone(),
            input_word,
            sigma_sequence,
            theta,
            theta_y,
            checks,
            evidence,
            steps,
            rewrite_trace: None,
            conjugates: Vec::new(),
        }
    }

    /// The certificate, or the name of the first failing check.
    pub fn into_verified(self) -> Result<Certificate> {
        match self.checks.first_failure() {
            None => Ok(self),
            Some(name) => Err(Error::InternalContradiction(format!(
                "certificate check `{name}` failed"
            ))),
        }
    }

    pub fn theta_y(&self, j: usize) -> &Poly {
        &self.theta_y[j]
    }

    pub fn to_json(&self) -> CertificateJson {
        CertificateJson {
            version: SCHEMA_VERSION,
            context: self.ctx.spec(),
            input_word: word_to_json(&self.input_word),
            sigma_sequence: self.sigma_sequence.clone(),
            theta: self.theta.try_endo().map(Endo::image_strings),
            theta_y: self.theta_y.iter().map(Poly::to_string).collect(),
            theta_inverse_word: word_to_json(&self.theta.word().inverse()),
            checks: self.checks,
            evidence: self.evidence,
            steps: self.steps.clone(),
            rewrite_trace: self.rewrite_trace.clone(),
        }
    }

    pub fn to_json_string(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_json())?)
    }
}

/// Self-contained serialized certificate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateJson {
    pub version: u32,
    pub context: ContextSpec,
    pub input_word: Vec<GeneratorJson>,
    pub sigma_sequence: Vec<WeightVector>,
    /// Images of `theta`; absent when they exceed the expansion limit.
    pub theta: Option<Vec<String>>,
    pub theta_y: Vec<String>,
    pub theta_inverse_word: Vec<GeneratorJson>,
    pub checks: Checks,
    pub evidence: Evidence,
    #[serde(default)]
    pub steps: Vec<ReductionStep>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rewrite_trace: Option<Vec<String>>,
}

/// Result of re-checking a stored certificate.
#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub checks: Checks,
    pub evidence: Evidence,
    /// The stored images and check flags agree with the recomputed ones.
    pub stored_consistent: bool,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.all_pass() && self.stored_consistent
    }
}

impl CertificateJson {
    pub fn from_json_str(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    /// Recompute every check from the stored words using ring and group operations only.
    pub fn verify(&self) -> Result<VerifyReport> {
        check_version(self.version)?;
        let ctx = RingContext::from_spec(&self.context)?;
        let input = word_from_json(&ctx, &self.input_word)?;
        let inverse_word = word_from_json(&ctx, &self.theta_inverse_word)?;
        let theta = Automorphism::from_word(inverse_word.inverse());
        let composite_y = y_images(&input);
        let tame = input.is_tame() && inverse_word.is_tame();
        let (checks, mut evidence) = evaluate_checks(&theta, &inverse_word, &composite_y, tame);
        let stored_y = self
            .theta_y
            .iter()
            .map(|s| parse_poly(s, &ctx))
            .collect::<Result<Vec<_>>>()?;
        let mut consistent = stored_y == composite_y;
        if let Some(images) = &self.theta {
            let stored = endo_from_strings(&ctx, images)?;
            consistent &= match theta.try_endo() {
                Some(e) => *e == stored,
                None => match sampled_matches(theta.word(), &stored, &mut Sampler::default()) {
                    Ok(ev) => {
                        evidence = evidence.and(ev);
                        true
                    }
                    Err(_) => false,
                },
            };
        }
        consistent &= Checks {
            tame_flag: checks.tame_flag,
            ..self.checks
        } == checks;
        Ok(VerifyReport {
            checks,
            evidence,
            stored_consistent: consistent,
        })
    }
}
