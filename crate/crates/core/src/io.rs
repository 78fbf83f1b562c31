//! JSON forms of words, stage lists and endomorphisms (schema version 1).
//!
//! Polynomials are stored as strings in the expression grammar of
//! [`parse_poly`](crate::ring::parse_poly); permutation indices are 0-based.

use std::sync::Arc;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{Automorphism, Endo, GenPerm, Generator, GeneratorWord, Slot};
use crate::ring::{parse_poly, ContextSpec, Poly, RingContext};
use crate::weights::WeightVector;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenPermJson {
    pub perm: Vec<usize>,
    pub lambda: Vec<String>,
    pub r: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum GeneratorJson {
    Elementary {
        slot: String,
        poly: String,
    },
    Linear {
        matrix: Vec<Vec<String>>,
    },
    Genperm(GenPermJson),
    Explicit {
        images: Vec<String>,
        inverse: Vec<String>,
    },
}

/// A single word together with its context.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WordFile {
    pub version: u32,
    pub context: ContextSpec,
    pub word: Vec<GeneratorJson>,
}

/// One `(alpha_i, rho_i, Phi_i)` stage; `tau` is required by the first main pipeline only.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageJson {
    #[serde(default)]
    pub alpha: Vec<GeneratorJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<GenPermJson>,
    #[serde(default)]
    pub phi: Vec<GeneratorJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<WeightVector>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StagesFile {
    pub version: u32,
    pub context: ContextSpec,
    pub stages: Vec<StageJson>,
}

/// Input of the elementary-word pipeline: `theta = alpha o Phi_0 o .. o Phi_q`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct At2File {
    pub version: u32,
    pub context: ContextSpec,
    #[serde(default)]
    pub alpha: Vec<GeneratorJson>,
    pub word: Vec<GeneratorJson>,
}

pub fn check_version(v: u32) -> Result<()> {
    if v == SCHEMA_VERSION {
        Ok(())
    } else {
        Err(Error::Serialization(format!(
            "unsupported schema version {v}"
        )))
    }
}

pub fn parse_rational(s: &str) -> Result<BigRational> {
    s.trim()
        .parse::<BigRational>()
        .map_err(|e| Error::Serialization(format!("bad rational `{s}`: {e}")))
}

fn polys(ctx: &Arc<RingContext>, v: &[String]) -> Result<Vec<Poly>> {
    v.iter().map(|s| parse_poly(s, ctx)).collect()
}

fn strings(v: &[Poly]) -> Vec<String> {
    v.iter().map(|p| p.to_string()).collect()
}

pub fn genperm_to_json(p: &GenPerm) -> GenPermJson {
    GenPermJson {
        perm: p.perm().to_vec(),
        lambda: p.lambda().iter().map(|c| c.to_string()).collect(),
        r: p.r().to_vec(),
    }
}

pub fn genperm_from_json(j: &GenPermJson) -> Result<GenPerm> {
    let lambda = j
        .lambda
        .iter()
        .map(|s| parse_rational(s))
        .collect::<Result<_>>()?;
    GenPerm::new(j.perm.clone(), lambda, j.r.clone())
}

pub fn generator_to_json(ctx: &Arc<RingContext>, g: &Generator) -> GeneratorJson {
    match g {
        Generator::Elementary { slot, poly } => GeneratorJson::Elementary {
            slot: ctx.name(slot.var_index(ctx)).to_string(),
            poly: poly.to_string(),
        },
        Generator::Linear { matrix, .. } => GeneratorJson::Linear {
            matrix: matrix.iter().map(|r| strings(r)).collect(),
        },
        Generator::GenPerm(p) => GeneratorJson::Genperm(genperm_to_json(p)),
        Generator::Explicit { images, inverse } => GeneratorJson::Explicit {
            images: images.image_strings(),
            inverse: inverse.image_strings(),
        },
    }
}

pub fn generator_from_json(ctx: &Arc<RingContext>, j: &GeneratorJson) -> Result<Generator> {
    match j {
        GeneratorJson::Elementary { slot, poly } => {
            let idx = ctx
                .lookup(slot)
                .ok_or_else(|| Error::UnknownVariable(slot.clone()))?;
            if idx < ctx.p() {
                return Err(Error::InvalidGenerator(format!(
                    "`{slot}` is a parameter, not a variable"
                )));
            }
            let slot = Slot::from_position(ctx, idx - ctx.p());
            Generator::elementary(slot, parse_poly(poly, ctx)?)
        }
        GeneratorJson::Linear { matrix } => {
            let m = matrix
                .iter()
                .map(|row| polys(ctx, row))
                .collect::<Result<_>>()?;
            Generator::linear(ctx, m)
        }
        GeneratorJson::Genperm(p) => Ok(Generator::GenPerm(genperm_from_json(p)?)),
        GeneratorJson::Explicit { images, inverse } => Generator::explicit(
            Endo::from_images(ctx, polys(ctx, images)?)?,
            Endo::from_images(ctx, polys(ctx, inverse)?)?,
        ),
    }
}

pub fn word_to_json(w: &GeneratorWord) -> Vec<GeneratorJson> {
    w.generators()
        .iter()
        .map(|g| generator_to_json(w.ctx(), g))
        .collect()
}

pub fn word_from_json(ctx: &Arc<RingContext>, gens: &[GeneratorJson]) -> Result<GeneratorWord> {
    let gens = gens
        .iter()
        .map(|g| generator_from_json(ctx, g))
        .collect::<Result<_>>()?;
    GeneratorWord::new(ctx, gens)
}

pub fn endo_from_strings(ctx: &Arc<RingContext>, images: &[String]) -> Result<Endo> {
    Endo::from_images(ctx, polys(ctx, images)?)
}

impl WordFile {
    pub fn new(w: &GeneratorWord) -> Self {
        WordFile {
            version: SCHEMA_VERSION,
            context: w.ctx().spec(),
            word: word_to_json(w),
        }
    }

    pub fn load(&self) -> Result<GeneratorWord> {
        check_version(self.version)?;
        let ctx = RingContext::from_spec(&self.context)?;
        word_from_json(&ctx, &self.word)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json_string(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// A loaded stage: `(alpha_i, rho_i, Phi_i, tau_i)`.
#[derive(Debug, Clone)]
pub struct LoadedStage {
    pub alpha: Automorphism,
    pub rho: GenPerm,
    pub phi: Automorphism,
    pub tau: Option<WeightVector>,
}

impl StagesFile {
    pub fn load(&self) -> Result<(Arc<RingContext>, Vec<LoadedStage>)> {
        check_version(self.version)?;
        let ctx = RingContext::from_spec(&self.context)?;
        let stages = self
            .stages
            .iter()
            .map(|s| {
                Ok(LoadedStage {
                    alpha: Automorphism::from_word(word_from_json(&ctx, &s.alpha)?),
                    rho: match &s.rho {
                        Some(r) => genperm_from_json(r)?,
                        None => GenPerm::identity(ctx.n()),
                    },
                    phi: Automorphism::from_word(word_from_json(&ctx, &s.phi)?),
                    tau: s.tau.clone(),
                })
            })
            .collect::<Result<_>>()?;
        Ok((ctx, stages))
    }

    pub fn from_stages(ctx: &Arc<RingContext>, stages: &[LoadedStage]) -> Self {
        StagesFile {
            version: SCHEMA_VERSION,
            context: ctx.spec(),
            stages: stages
                .iter()
                .map(|s| StageJson {
                    alpha: word_to_json(s.alpha.word()),
                    rho: (!s.rho.is_identity()).then(|| genperm_to_json(&s.rho)),
                    phi: word_to_json(s.phi.word()),
                    tau: s.tau.clone(),
                })
                .collect(),
        }
    }
}

impl At2File {
    pub fn new(alpha: &GeneratorWord, word: &GeneratorWord) -> Self {
        At2File {
            version: SCHEMA_VERSION,
            context: word.ctx().spec(),
            alpha: word_to_json(alpha),
            word: word_to_json(word),
        }
    }

    pub fn load(&self) -> Result<(Automorphism, GeneratorWord)> {
        check_version(self.version)?;
        let ctx = RingContext::from_spec(&self.context)?;
        Ok((
            Automorphism::from_word(word_from_json(&ctx, &self.alpha)?),
            word_from_json(&ctx, &self.word)?,
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::rat;

    #[test]
    fn word_round_trip() {
        let ctx = RingContext::new(1, 2, 1).unwrap();
        let w = GeneratorWord::new(
            &ctx,
            vec![
                Generator::z_elementary(1, parse_poly("y*u/x - 3/4*z1^2", &ctx).unwrap()).unwrap(),
                Generator::elementary(Slot::Y(0), parse_poly("x^2*z2", &ctx).unwrap()).unwrap(),
                Generator::GenPerm(
                    GenPerm::new(vec![1, 0], vec![rat(2, 3), rat(-1, 1)], vec![1, -2]).unwrap(),
                ),
                Generator::linear(
                    &ctx,
                    vec![
                        vec![Poly::integer(&ctx, 1), parse_poly("y", &ctx).unwrap()],
                        vec![Poly::zero(&ctx), Poly::x_pow(&ctx, 1)],
                    ],
                )
                .unwrap(),
            ],
        )
        .unwrap();
        let file = WordFile::new(&w);
        let text = file.to_json_string().unwrap();
        let back = WordFile::from_json_str(&text).unwrap();
        assert_eq!(back, file);
        assert_eq!(back.load().unwrap(), w);
    }

    #[test]
    fn rejects_bad_version_and_slot() {
        let ctx = RingContext::new(1, 1, 1).unwrap();
        let mut file = WordFile::new(&GeneratorWord::empty(&ctx));
        file.version = 7;
        assert!(file.load().is_err());
        let g = GeneratorJson::Elementary {
            slot: "u".into(),
            poly: "y".into(),
        };
        assert!(generator_from_json(&ctx, &g).is_err());
    }
}
