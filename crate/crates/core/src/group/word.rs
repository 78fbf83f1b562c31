use std::fmt;
use std::sync::{Arc, OnceLock};

use super::endo::Endo;
use super::generator::{Generator, Slot};
use crate::error::Result;
use crate::ring::{Poly, RingContext};
use crate::weights::WeightVector;

/// A finite product `g_1 o g_2 o .. o g_q` of generators.
#[derive(Clone, PartialEq, Eq)]
pub struct GeneratorWord {
    ctx: Arc<RingContext>,
    gens: Vec<Generator>,
}

impl GeneratorWord {
    pub fn new(ctx: &Arc<RingContext>, gens: Vec<Generator>) -> Result<Self> {
        for g in &gens {
            check_generator_ctx(ctx, g)?;
        }
        Ok(GeneratorWord {
            ctx: ctx.clone(),
            gens,
        })
    }

    pub fn empty(ctx: &Arc<RingContext>) -> Self {
        GeneratorWord {
            ctx: ctx.clone(),
            gens: Vec::new(),
        }
    }

    pub fn single(ctx: &Arc<RingContext>, g: Generator) -> Self {
        GeneratorWord {
            ctx: ctx.clone(),
            gens: vec![g],
        }
    }

    pub fn ctx(&self) -> &Arc<RingContext> {
        &self.ctx
    }

    pub fn generators(&self) -> &[Generator] {
        &self.gens
    }

    pub fn into_generators(self) -> Vec<Generator> {
        self.gens
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn push(&mut self, g: Generator) {
        self.gens.push(g);
    }

    pub fn is_tame(&self) -> bool {
        self.gens.iter().all(Generator::is_tame)
    }

    /// Concatenation `self o other`.
    pub fn then(&self, other: &GeneratorWord) -> GeneratorWord {
        let mut gens = self.gens.clone();
        gens.extend(other.gens.iter().cloned());
        GeneratorWord {
            ctx: self.ctx.clone(),
            gens,
        }
    }

    pub fn to_endo(&self) -> Endo {
        self.to_endo_limited(usize::MAX)
            .expect("unbounded evaluation")
    }

    /// Evaluate, or `None` once an image exceeds `limit` terms.
    pub fn to_endo_limited(&self, limit: usize) -> Option<Endo> {
        self.gens
            .iter()
            .try_fold(Endo::identity(&self.ctx), |acc, g| {
                acc.compose_limited(&g.to_endo(&self.ctx), limit)
            })
    }

    /// `self(p)`, pushing `p` through the generators one at a time.
    pub fn apply(&self, p: &Poly) -> Poly {
        self.apply_limited(p, usize::MAX)
            .expect("unbounded application")
    }

    /// As [`GeneratorWord::apply`], or `None` once an intermediate result exceeds `limit` terms.
    pub fn apply_limited(&self, p: &Poly, limit: usize) -> Option<Poly> {
        self.gens.iter().try_fold(p.clone(), |acc, g| {
            g.to_endo(&self.ctx).apply_limited(&acc, limit)
        })
    }

    /// Upper bound on the total degree (in every variable but `x`) of any image.
    pub fn degree_bound_log2(&self) -> f64 {
        self.gens
            .iter()
            .map(|g| (g.to_endo(&self.ctx).degree().max(1) as f64).log2())
            .sum()
    }

    pub fn inverse(&self) -> GeneratorWord {
        GeneratorWord {
            ctx: self.ctx.clone(),
            gens: self.gens.iter().rev().map(Generator::inverse).collect(),
        }
    }

    pub fn conjugate_by(&self, tau: &WeightVector) -> GeneratorWord {
        GeneratorWord {
            ctx: self.ctx.clone(),
            gens: self.gens.iter().map(|g| g.conjugate_by(tau)).collect(),
        }
    }

    /// Drop identity generators and merge adjacent elementaries acting on the same slot.
    pub fn simplified(&self) -> GeneratorWord {
        let mut out: Vec<Generator> = Vec::with_capacity(self.gens.len());
        for g in &self.gens {
            if g.is_identity() {
                continue;
            }
            if let (
                Some(Generator::Elementary { slot: s1, poly: p1 }),
                Generator::Elementary { slot: s2, poly: p2 },
            ) = (out.last_mut(), g)
            {
                if s1 == s2 {
                    *p1 = &*p1 + p2;
                    if p1.is_zero() {
                        out.pop();
                    }
                    continue;
                }
            }
            out.push(g.clone());
        }
        GeneratorWord {
            ctx: self.ctx.clone(),
            gens: out,
        }
    }
}

fn check_generator_ctx(ctx: &Arc<RingContext>, g: &Generator) -> Result<()> {
    match g {
        Generator::Elementary { poly, .. } => RingContext::ensure_same(ctx, poly.ctx()),
        Generator::Linear { matrix, .. } => {
            for e in matrix.iter().flatten() {
                RingContext::ensure_same(ctx, e.ctx())?;
            }
            Ok(())
        }
        Generator::GenPerm(p) => {
            if p.n() == ctx.n() {
                Ok(())
            } else {
                Err(crate::error::Error::InvalidGenerator(format!(
                    "permutation on {} variables in a context with n = {}",
                    p.n(),
                    ctx.n()
                )))
            }
        }
        Generator::Explicit { images, .. } => RingContext::ensure_same(ctx, images.ctx()),
    }
}

impl fmt::Display for GeneratorWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.gens.is_empty() {
            return write!(f, "id");
        }
        for (i, g) in self.gens.iter().enumerate() {
            if i > 0 {
                write!(f, " o ")?;
            }
            write!(f, "[{g}]")?;
        }
        Ok(())
    }
}

impl fmt::Debug for GeneratorWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Largest image size, in terms, that an [`Automorphism`] expands to on demand.
pub const EXPANSION_LIMIT: usize = 2_000;

/// Largest intermediate, in terms, that a reduction step computes explicitly when it
/// has to read coefficients. Larger than [`EXPANSION_LIMIT`] because such a step has no
/// sampled fallback.
pub const WORKING_LIMIT: usize = 20_000;

/// An automorphism carried as a generator word, so its inverse is exact.
///
/// The expanded form is computed lazily. [`Automorphism::try_endo`] gives up past
/// [`EXPANSION_LIMIT`] terms; callers then fall back to the word itself.
#[derive(Clone)]
pub struct Automorphism {
    word: GeneratorWord,
    forward: OnceLock<Option<Endo>>,
    inverse: OnceLock<Option<Endo>>,
}

impl Automorphism {
    pub fn from_word(word: GeneratorWord) -> Self {
        Automorphism {
            word,
            forward: OnceLock::new(),
            inverse: OnceLock::new(),
        }
    }

    pub fn identity(ctx: &Arc<RingContext>) -> Self {
        Self::from_word(GeneratorWord::empty(ctx))
    }

    pub fn from_generator(ctx: &Arc<RingContext>, g: Generator) -> Self {
        Self::from_word(GeneratorWord::single(ctx, g))
    }

    /// Pair a word with its already-evaluated form.
    pub(crate) fn from_parts(word: GeneratorWord, forward: Endo) -> Self {
        debug_assert!(RingContext::same(word.ctx(), forward.ctx()));
        let out = Self::from_word(word);
        let _ = out.forward.set(Some(forward));
        out
    }

    pub fn ctx(&self) -> &Arc<RingContext> {
        self.word.ctx()
    }

    pub fn word(&self) -> &GeneratorWord {
        &self.word
    }

    /// The expanded map, unless it exceeds [`EXPANSION_LIMIT`] terms.
    pub fn try_endo(&self) -> Option<&Endo> {
        self.forward
            .get_or_init(|| self.word.to_endo_limited(EXPANSION_LIMIT))
            .as_ref()
    }

    pub fn try_inverse_endo(&self) -> Option<&Endo> {
        self.inverse
            .get_or_init(|| self.word.inverse().to_endo_limited(EXPANSION_LIMIT))
            .as_ref()
    }

    /// The expanded map.
    ///
    /// Panics if it exceeds [`EXPANSION_LIMIT`] terms; use [`Automorphism::try_endo`] for
    /// maps that may not be small.
    pub fn endo(&self) -> &Endo {
        self.try_endo()
            .unwrap_or_else(|| panic!("expansion exceeds {EXPANSION_LIMIT} terms"))
    }

    pub fn inverse_endo(&self) -> &Endo {
        self.try_inverse_endo()
            .unwrap_or_else(|| panic!("expansion exceeds {EXPANSION_LIMIT} terms"))
    }

    /// The expanded map if it has already been computed.
    pub fn cached_endo(&self) -> Option<&Endo> {
        self.forward.get().and_then(Option::as_ref)
    }

    /// Whether the expanded map fits in [`EXPANSION_LIMIT`] terms.
    pub fn is_expandable(&self) -> bool {
        self.try_endo().is_some()
    }

    pub fn inverse(&self) -> Automorphism {
        Automorphism {
            word: self.word.inverse(),
            forward: self.inverse.clone(),
            inverse: self.forward.clone(),
        }
    }

    /// `self o other`.
    pub fn compose(&self, other: &Automorphism) -> Automorphism {
        let out = Self::from_word(self.word.then(&other.word));
        if let (Some(Some(a)), Some(Some(b))) = (self.forward.get(), other.forward.get()) {
            let _ = out.forward.set(a.compose_limited(b, EXPANSION_LIMIT));
        }
        out
    }

    pub fn conjugate_by(&self, tau: &WeightVector) -> Automorphism {
        let conj = |e: &OnceLock<Option<Endo>>| {
            let out = OnceLock::new();
            if let Some(Some(e)) = e.get() {
                let _ = out.set(Some(e.conjugate_by(tau)));
            }
            out
        };
        Automorphism {
            word: self.word.conjugate_by(tau),
            forward: conj(&self.forward),
            inverse: conj(&self.inverse),
        }
    }

    pub fn simplified(&self) -> Automorphism {
        Automorphism {
            word: self.word.simplified(),
            forward: self.forward.clone(),
            inverse: self.inverse.clone(),
        }
    }

    /// `self(p)`, computed through the word when the expansion is not at hand.
    pub fn apply(&self, p: &Poly) -> Result<Poly> {
        RingContext::ensure_same(self.ctx(), p.ctx())?;
        match self.forward.get() {
            Some(Some(e)) => e.apply(p),
            _ => Ok(self.word.apply(p)),
        }
    }

    /// `self(p)`, or `None` once an intermediate result exceeds [`EXPANSION_LIMIT`] terms.
    pub fn apply_limited(&self, p: &Poly) -> Option<Poly> {
        match self.forward.get() {
            Some(Some(e)) => e.apply_limited(p, EXPANSION_LIMIT),
            _ => self.word.apply_limited(p, EXPANSION_LIMIT),
        }
    }

    /// Image of the acted-on variable at position `pos`, without expanding the others.
    pub fn image_limited(&self, pos: usize) -> Option<Poly> {
        match self.forward.get() {
            Some(Some(e)) => Some(e.image(pos).clone()),
            _ => self.word.apply_limited(
                &Poly::var(self.ctx(), self.ctx().slot_index(pos)),
                EXPANSION_LIMIT,
            ),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.word.simplified().is_empty() || self.try_endo().is_some_and(Endo::is_identity)
    }
}

impl PartialEq for Automorphism {
    /// Equality of the expanded maps; words too large to expand compare by their generators.
    fn eq(&self, other: &Self) -> bool {
        match (self.try_endo(), other.try_endo()) {
            (Some(a), Some(b)) => a == b,
            _ => self.word.simplified() == other.word.simplified(),
        }
    }
}

impl fmt::Debug for Automorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.forward.get() {
            Some(Some(e)) => write!(f, "{e}"),
            _ => write!(f, "{}", self.word),
        }
    }
}

/// Recognise an endomorphism that moves exactly one variable `v` by a `v`-free summand.
pub fn as_elementary(e: &Endo) -> Option<Generator> {
    let ctx = e.ctx();
    let mut found = None;
    for pos in 0..ctx.dim() {
        let var = Poly::var(ctx, ctx.slot_index(pos));
        let d = e.image(pos) - &var;
        if d.is_zero() {
            continue;
        }
        if found.is_some() || d.involves(ctx.slot_index(pos)) {
            return None;
        }
        found = Some(Generator::Elementary {
            slot: Slot::from_position(ctx, pos),
            poly: d,
        });
    }
    Some(found.unwrap_or(Generator::Elementary {
        slot: Slot::Z(0),
        poly: Poly::zero(ctx),
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::parse_poly;

    fn p(ctx: &Arc<RingContext>, s: &str) -> Poly {
        parse_poly(s, ctx).unwrap()
    }

    #[test]
    fn nagata_from_three_elementaries() {
        let ctx = RingContext::new(1, 1, 0).unwrap();
        let w = GeneratorWord::new(
            &ctx,
            vec![
                Generator::z_elementary(0, p(&ctx, "y^2/x")).unwrap(),
                Generator::elementary(Slot::Y(0), p(&ctx, "x^2*z")).unwrap(),
                Generator::z_elementary(0, p(&ctx, "-y^2/x")).unwrap(),
            ],
        )
        .unwrap();
        let e = w.to_endo();
        assert_eq!(e.image(0), &p(&ctx, "y + x*(x*z - y^2)"));
        assert_eq!(
            e.image(1),
            &p(&ctx, "z + 2*y*(x*z - y^2) + x*(x*z - y^2)^2")
        );
        let inv = w.inverse().to_endo();
        assert!(e.compose(&inv).is_identity());
    }

    #[test]
    fn simplify_merges_same_slot() {
        let ctx = RingContext::new(1, 1, 0).unwrap();
        let w = GeneratorWord::new(
            &ctx,
            vec![
                Generator::z_elementary(0, p(&ctx, "y")).unwrap(),
                Generator::z_elementary(0, p(&ctx, "y^2")).unwrap(),
                Generator::z_elementary(0, p(&ctx, "-y - y^2")).unwrap(),
            ],
        )
        .unwrap();
        assert!(w.simplified().is_empty());
    }

    #[test]
    fn recognises_elementary() {
        let ctx = RingContext::new(1, 1, 0).unwrap();
        let e = Generator::z_elementary(0, p(&ctx, "y^3"))
            .unwrap()
            .to_endo(&ctx);
        assert_eq!(
            as_elementary(&e),
            Some(Generator::z_elementary(0, p(&ctx, "y^3")).unwrap())
        );
        let f = Endo::from_images(&ctx, vec![p(&ctx, "y + z"), p(&ctx, "z + y")]).unwrap();
        assert_eq!(as_elementary(&f), None);
    }
}
