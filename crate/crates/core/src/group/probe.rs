//! Randomized checks for words whose expansion is too large to write down.
//!
//! Every variable except `x` is specialized at a uniform point of `(Z/p)^k` for a
//! random prime `p` in `[2^61, 2^62)`, and the word is evaluated one generator at a
//! time in `(Z/p)[x, 1/x]`. A nonzero polynomial of degree at most `D` mod `p`
//! vanishes at such a point with probability at most `D/p`. The bound assumes the
//! polynomial under test stays nonzero mod `p`, which fails only for the finitely
//! many primes dividing its content.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::endo::Endo;
use super::generator::Generator;
use super::word::GeneratorWord;
use crate::ring::{Poly, RingContext};
use crate::weights::WeightVector;

/// Independent points, each with its own prime, per sampled check.
pub const PROBE_POINTS: u32 = 3;
const SEED: u64 = 0x0c0f_f1c1_e475;

/// How a check was carried out.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum Evidence {
    /// On the expanded polynomials.
    Exact,
    /// At random points; a false pass has probability at most `2^log2_error`.
    Sampled { points: u32, log2_error: f64 },
}

impl Evidence {
    pub fn is_exact(&self) -> bool {
        matches!(self, Evidence::Exact)
    }

    /// The weaker of two pieces of evidence, with error bounds added.
    pub fn and(self, other: Evidence) -> Evidence {
        match (self, other) {
            (Evidence::Exact, e) | (e, Evidence::Exact) => e,
            (
                Evidence::Sampled {
                    points: p,
                    log2_error: a,
                },
                Evidence::Sampled {
                    points: q,
                    log2_error: b,
                },
            ) => {
                let hi = a.max(b);
                let lo = a.min(b);
                Evidence::Sampled {
                    points: p.max(q),
                    log2_error: hi + (1.0 + (lo - hi).exp2()).log2(),
                }
            }
        }
    }
}

impl fmt::Display for Evidence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Evidence::Exact => write!(f, "exact"),
            Evidence::Sampled { points, log2_error } => {
                write!(f, "sampled at {points} points, error <= 2^{log2_error:.0}")
            }
        }
    }
}

/// Why a sampled check failed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SampleFailure {
    NotOverR(String),
    NotIdentityModX(String),
    Differs(String),
}

impl fmt::Display for SampleFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SampleFailure::NotOverR(v) => {
                write!(f, "image of {v} has negative x-order at a sample point")
            }
            SampleFailure::NotIdentityModX(v) => write!(
                f,
                "image of {v} is not the identity mod x at a sample point"
            ),
            SampleFailure::Differs(v) => write!(f, "images of {v} differ at a sample point"),
        }
    }
}

type Sampled = std::result::Result<Evidence, SampleFailure>;

/// Arithmetic modulo a prime below `2^62`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Field {
    p: u64,
}

impl Field {
    pub fn new(p: u64) -> Self {
        debug_assert!(is_prime(p) && p < 1 << 62);
        Field { p }
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    fn mul(&self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.p as u128) as u64
    }

    fn pow(&self, mut a: u64, mut e: u64) -> u64 {
        let mut r = 1;
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        r
    }

    fn reduce(&self, n: &BigInt) -> u64 {
        let r = n.mod_floor(&BigInt::from(self.p));
        r.to_u64().expect("residue fits in u64")
    }

    /// The image of `c`, or `None` when `p` divides its denominator.
    fn rational(&self, c: &BigRational) -> Option<u64> {
        let d = self.reduce(c.denom());
        (d != 0).then(|| self.mul(self.reduce(c.numer()), self.pow(d, self.p - 2)))
    }
}

fn mul_mod64(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for b in BASES {
        if n.is_multiple_of(b) {
            return n == b;
        }
    }
    let (mut d, mut r) = (n - 1, 0);
    while d % 2 == 0 {
        d /= 2;
        r += 1;
    }
    'outer: for a in BASES {
        let mut x = 1u64;
        let (mut base, mut e) = (a % n, d);
        while e > 0 {
            if e & 1 == 1 {
                x = mul_mod64(x, base, n);
            }
            base = mul_mod64(base, base, n);
            e >>= 1;
        }
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..r {
            x = mul_mod64(x, x, n);
            if x == n - 1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

/// A Laurent polynomial in `x` over `Z/p`, stored densely from its lowest power.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ModLaurent {
    low: i64,
    coeffs: Vec<u64>,
}

impl ModLaurent {
    fn constant(c: u64) -> Self {
        if c == 0 {
            ModLaurent::default()
        } else {
            ModLaurent {
                low: 0,
                coeffs: vec![c],
            }
        }
    }

    /// Lowest power of `x`, `None` for zero.
    pub fn order(&self) -> Option<i64> {
        (!self.coeffs.is_empty()).then_some(self.low)
    }

    pub fn coefficient(&self, e: i64) -> u64 {
        usize::try_from(e - self.low)
            .ok()
            .and_then(|i| self.coeffs.get(i).copied())
            .unwrap_or(0)
    }

    fn trim(&mut self) {
        while self.coeffs.last() == Some(&0) {
            self.coeffs.pop();
        }
        let lead = self.coeffs.iter().take_while(|&&c| c == 0).count();
        if lead > 0 {
            self.coeffs.drain(..lead);
            self.low += lead as i64;
        }
        if self.coeffs.is_empty() {
            self.low = 0;
        }
    }

    /// `self += k x^shift other`.
    fn add_scaled(&mut self, other: &ModLaurent, shift: i64, k: u64, f: &Field) {
        if other.coeffs.is_empty() || k == 0 {
            return;
        }
        let olow = other.low + shift;
        if self.coeffs.is_empty() {
            self.low = olow;
        }
        let low = self.low.min(olow);
        let high = (self.low + self.coeffs.len() as i64).max(olow + other.coeffs.len() as i64);
        if low < self.low {
            let pad = (self.low - low) as usize;
            self.coeffs.splice(0..0, std::iter::repeat_n(0, pad));
            self.low = low;
        }
        self.coeffs.resize((high - low) as usize, 0);
        let off = (olow - low) as usize;
        for (i, &c) in other.coeffs.iter().enumerate() {
            self.coeffs[off + i] = f.add(self.coeffs[off + i], f.mul(c, k));
        }
        self.trim();
    }

    fn mul(&self, other: &ModLaurent, f: &Field) -> ModLaurent {
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return ModLaurent::default();
        }
        let mut acc = vec![0u128; self.coeffs.len() + other.coeffs.len() - 1];
        let p = f.p as u128;
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                let s = acc[i + j] + a as u128 * b as u128;
                acc[i + j] = if s >= p * p { s - p * p } else { s };
            }
        }
        let mut out = ModLaurent {
            low: self.low + other.low,
            coeffs: acc.into_iter().map(|c| (c % p) as u64).collect(),
        };
        out.trim();
        out
    }
}

/// Evaluate `p` with variable `i` (in context order) set to `vals[i]`; `None` when a
/// coefficient's denominator vanishes mod `p`.
fn eval(p: &Poly, vals: &[ModLaurent], f: &Field) -> Option<ModLaurent> {
    let one = ModLaurent::constant(1);
    let mut powers: Vec<Vec<ModLaurent>> =
        vals.iter().map(|v| vec![one.clone(), v.clone()]).collect();
    let mut out = ModLaurent::default();
    for (m, c) in p.terms() {
        let mut t = one.clone();
        for (i, &e) in m.exps().iter().enumerate() {
            if e == 0 {
                continue;
            }
            let cache = &mut powers[i];
            while cache.len() <= e as usize {
                let next = cache.last().expect("nonempty").mul(&vals[i], f);
                cache.push(next);
            }
            t = t.mul(&cache[e as usize], f);
        }
        out.add_scaled(&t, m.x_exp(), f.rational(c)?, f);
    }
    Some(out)
}

fn apply_generator(
    ctx: &Arc<RingContext>,
    g: &Generator,
    vals: &[ModLaurent],
    f: &Field,
) -> Option<Vec<ModLaurent>> {
    let mut out = vals.to_vec();
    match g {
        Generator::Elementary { slot, poly } => {
            let idx = slot.var_index(ctx);
            out[idx].add_scaled(&eval(poly, vals, f)?, 0, 1, f);
        }
        _ => {
            let e: Endo = g.to_endo(ctx);
            for pos in 0..ctx.dim() {
                out[ctx.slot_index(pos)] = eval(e.image(pos), vals, f)?;
            }
        }
    }
    Some(out)
}

/// Values of all variables after applying `word` to the point `vals`.
pub fn eval_word(word: &GeneratorWord, vals: &[ModLaurent], f: &Field) -> Option<Vec<ModLaurent>> {
    let ctx = word.ctx();
    word.generators()
        .iter()
        .rev()
        .try_fold(vals.to_vec(), |acc, g| apply_generator(ctx, g, &acc, f))
}

/// A random prime modulus and a point with every variable but `x` specialized.
#[derive(Debug, Clone)]
pub struct SamplePoint {
    pub field: Field,
    pub vals: Vec<ModLaurent>,
}

impl SamplePoint {
    fn eval_word(&self, word: &GeneratorWord) -> Option<Vec<ModLaurent>> {
        eval_word(word, &self.vals, &self.field)
    }

    fn eval(&self, p: &Poly) -> Option<ModLaurent> {
        eval(p, &self.vals, &self.field)
    }
}

/// Deterministic source of sample points.
pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Default for Sampler {
    fn default() -> Self {
        Sampler {
            rng: ChaCha8Rng::seed_from_u64(SEED),
        }
    }
}

impl Sampler {
    pub fn with_seed(seed: u64) -> Self {
        Sampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    fn prime(&mut self) -> u64 {
        loop {
            let c = (self.rng.next_u64() >> 2) | (1 << 61) | 1;
            if is_prime(c) {
                return c;
            }
        }
    }

    /// A fresh prime `p` in `[2^61, 2^62)` and a uniform point of `(Z/p)^k`.
    pub fn point(&mut self, ctx: &RingContext) -> SamplePoint {
        let field = Field::new(self.prime());
        let vals = (0..ctx.nvars())
            .map(|_| ModLaurent::constant(self.rng.next_u64() % field.p))
            .collect();
        SamplePoint { field, vals }
    }

    /// Evaluate at fresh points until every coefficient involved is defined mod `p`.
    fn eval_with<T>(
        &mut self,
        ctx: &RingContext,
        run: impl Fn(&SamplePoint) -> Option<T>,
    ) -> (SamplePoint, T) {
        loop {
            let pt = self.point(ctx);
            if let Some(out) = run(&pt) {
                return (pt, out);
            }
        }
    }
}

/// Error bound for checks on words of the given degree bound: each point misses a
/// nonzero polynomial mod `p` with probability at most `D / 2^61`.
fn plan(log2_degree: f64) -> Evidence {
    Evidence::Sampled {
        points: PROBE_POINTS,
        log2_error: ((log2_degree - 61.0) * PROBE_POINTS as f64).min(0.0),
    }
}

fn var_name(ctx: &RingContext, pos: usize) -> String {
    ctx.name(ctx.slot_index(pos)).to_string()
}

/// Sampled test that `word` is over `R` and the identity modulo `x`.
pub fn sampled_ia(word: &GeneratorWord, sampler: &mut Sampler) -> Sampled {
    let ctx = word.ctx();
    for _ in 0..PROBE_POINTS {
        let (pt, img) = sampler.eval_with(ctx, |pt| pt.eval_word(word));
        for pos in 0..ctx.dim() {
            let idx = ctx.slot_index(pos);
            let v = &img[idx];
            if v.order().is_some_and(|o| o < 0) {
                return Err(SampleFailure::NotOverR(var_name(ctx, pos)));
            }
            if v.coefficient(0) != pt.vals[idx].coefficient(0) {
                return Err(SampleFailure::NotIdentityModX(var_name(ctx, pos)));
            }
        }
    }
    Ok(plan(word.degree_bound_log2()))
}

/// Sampled test of membership in `IA^tau`, through the conjugate by `(y, x^{-t} z)`.
pub fn sampled_ia_tau(word: &GeneratorWord, tau: &WeightVector, sampler: &mut Sampler) -> Sampled {
    sampled_ia(&word.conjugate_by(&tau.neg()), sampler)
}

/// Sampled test that two words define the same map.
pub fn sampled_equal(a: &GeneratorWord, b: &GeneratorWord, sampler: &mut Sampler) -> Sampled {
    let ctx = a.ctx();
    for _ in 0..PROBE_POINTS {
        let (_, (ia, ib)) = sampler.eval_with(ctx, |pt| Some((pt.eval_word(a)?, pt.eval_word(b)?)));
        for pos in 0..ctx.dim() {
            let idx = ctx.slot_index(pos);
            if ia[idx] != ib[idx] {
                return Err(SampleFailure::Differs(var_name(ctx, pos)));
            }
        }
    }
    Ok(plan(a.degree_bound_log2().max(b.degree_bound_log2())))
}

/// Sampled test that `word(v) = images[v]` for every acted-on variable.
pub fn sampled_matches(word: &GeneratorWord, images: &Endo, sampler: &mut Sampler) -> Sampled {
    let ctx = word.ctx();
    for _ in 0..PROBE_POINTS {
        let (_, (iw, ie)) = sampler.eval_with(ctx, |pt| {
            let iw = pt.eval_word(word)?;
            let ie = (0..ctx.dim())
                .map(|pos| pt.eval(images.image(pos)))
                .collect::<Option<Vec<_>>>()?;
            Some((iw, ie))
        });
        for (pos, v) in ie.iter().enumerate() {
            if &iw[ctx.slot_index(pos)] != v {
                return Err(SampleFailure::Differs(var_name(ctx, pos)));
            }
        }
    }
    Ok(plan(
        word.degree_bound_log2()
            .max((images.degree().max(1) as f64).log2()),
    ))
}

/// Jacobian determinant by the chain rule: the product of the generators'
/// determinants, when each is a unit monomial `c x^r`.
pub fn word_jacobian(word: &GeneratorWord) -> Option<Poly> {
    let ctx = word.ctx();
    let mut det = Poly::one(ctx);
    for g in word.generators() {
        let d = match g {
            Generator::Elementary { .. } => continue,
            _ => g.to_endo(ctx).jacobian().determinant,
        };
        d.as_unit_monomial()?;
        det = &det * &d;
    }
    Some(det)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::Slot;
    use crate::group::{canonical_ia_form, Automorphism};
    use crate::ring::parse_poly;

    fn elem(ctx: &std::sync::Arc<RingContext>, slot: Slot, s: &str) -> Generator {
        Generator::elementary(slot, parse_poly(s, ctx).unwrap()).unwrap()
    }

    #[test]
    fn sampled_agrees_with_exact_membership() {
        let ctx = RingContext::new(1, 2, 0).unwrap();
        let words = [
            vec![
                elem(&ctx, Slot::Z(0), "-y^2/x"),
                elem(&ctx, Slot::Y(0), "x^2*z1"),
                elem(&ctx, Slot::Z(0), "y^2/x"),
            ],
            vec![
                elem(&ctx, Slot::Z(1), "y*z1/x + y^2/x"),
                elem(&ctx, Slot::Y(0), "x*z1"),
            ],
            vec![
                elem(&ctx, Slot::Z(0), "y/x^2"),
                elem(&ctx, Slot::Z(1), "z1^2*x"),
            ],
            vec![elem(&ctx, Slot::Z(1), "z1^2/x")],
        ];
        let mut s = Sampler::default();
        for gens in words {
            let word = GeneratorWord::new(&ctx, gens).unwrap();
            let e = Automorphism::from_word(word.clone());
            for tau in WeightVector::new(vec![2, 2]).box_points() {
                let exact = canonical_ia_form(e.endo(), &tau).is_ok();
                assert_eq!(
                    sampled_ia_tau(&word, &tau, &mut s).is_ok(),
                    exact,
                    "{word} at {tau}"
                );
            }
        }
    }

    #[test]
    fn sampled_equality() {
        let ctx = RingContext::new(1, 1, 0).unwrap();
        let a = GeneratorWord::new(
            &ctx,
            vec![elem(&ctx, Slot::Z(0), "y"), elem(&ctx, Slot::Z(0), "y^2")],
        )
        .unwrap();
        let b = GeneratorWord::new(&ctx, vec![elem(&ctx, Slot::Z(0), "y + y^2")]).unwrap();
        let c = GeneratorWord::new(&ctx, vec![elem(&ctx, Slot::Z(0), "y + y^3")]).unwrap();
        let mut s = Sampler::default();
        assert!(matches!(
            sampled_equal(&a, &b, &mut s),
            Ok(Evidence::Sampled { .. })
        ));
        assert!(sampled_equal(&a, &c, &mut s).is_err());
        assert!(sampled_matches(&a, &b.to_endo(), &mut s).is_ok());
    }

    #[test]
    fn chain_rule_jacobian() {
        let ctx = RingContext::new(1, 1, 0).unwrap();
        let word = GeneratorWord::new(
            &ctx,
            vec![
                elem(&ctx, Slot::Z(0), "y^2/x"),
                elem(&ctx, Slot::Y(0), "x^2*z"),
            ],
        )
        .unwrap();
        assert!(word_jacobian(&word).unwrap().is_one());
    }

    #[test]
    fn evidence_combines() {
        let a = Evidence::Sampled {
            points: 2,
            log2_error: -80.0,
        };
        assert_eq!(Evidence::Exact.and(a), a);
        let Evidence::Sampled { log2_error, .. } = a.and(a) else {
            panic!()
        };
        assert!((log2_error + 79.0).abs() < 1e-9);
    }
}
