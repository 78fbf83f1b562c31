use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::context::RingContext;
use crate::error::{Error, Result};

/// Exponent vector: `x^x * prod var_i^exps[i]` with `exps` in `(u.., y.., z..)` order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial {
    pub(crate) x: i64,
    pub(crate) exps: Box<[u32]>,
}

impl Monomial {
    pub fn new(x: i64, exps: Vec<u32>) -> Self {
        Monomial {
            x,
            exps: exps.into_boxed_slice(),
        }
    }

    pub fn one(nvars: usize) -> Self {
        Monomial {
            x: 0,
            exps: vec![0; nvars].into_boxed_slice(),
        }
    }

    pub fn x_exp(&self) -> i64 {
        self.x
    }

    pub fn exps(&self) -> &[u32] {
        &self.exps
    }

    pub fn degree(&self) -> u64 {
        self.exps.iter().map(|&e| e as u64).sum()
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        Monomial {
            x: self.x + other.x,
            exps: self
                .exps
                .iter()
                .zip(other.exps.iter())
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

/// Graded-lex on the `(u, y, z)` exponents, `x` as the final key.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.exps.cmp(&other.exps))
            .then_with(|| self.x.cmp(&other.x))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Order of vanishing in `x`; the zero polynomial has order `Infinite`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum XOrder {
    Finite(i64),
    Infinite,
}

impl XOrder {
    pub fn finite(self) -> Option<i64> {
        match self {
            XOrder::Finite(v) => Some(v),
            XOrder::Infinite => None,
        }
    }
}

impl fmt::Display for XOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            XOrder::Finite(v) => write!(f, "{v}"),
            XOrder::Infinite => write!(f, "+inf"),
        }
    }
}

/// Exact polynomial over `Q[u][x, 1/x][y, z]`, stored sparsely in canonical term order.
#[derive(Clone)]
pub struct Poly {
    ctx: Arc<RingContext>,
    terms: BTreeMap<Monomial, BigRational>,
}

impl PartialEq for Poly {
    fn eq(&self, other: &Self) -> bool {
        RingContext::same(&self.ctx, &other.ctx) && self.terms == other.terms
    }
}

impl Eq for Poly {}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({self})")
    }
}

/// Arithmetic selector for [`poly_arith`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
}

/// Checked ring arithmetic; rejects operands from different contexts.
pub fn poly_arith(op: ArithOp, a: &Poly, b: &Poly) -> Result<Poly> {
    RingContext::ensure_same(&a.ctx, &b.ctx)?;
    Ok(match op {
        ArithOp::Add => a + b,
        ArithOp::Sub => a - b,
        ArithOp::Mul => a * b,
    })
}

impl Poly {
    pub fn zero(ctx: &Arc<RingContext>) -> Self {
        Poly {
            ctx: ctx.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn one(ctx: &Arc<RingContext>) -> Self {
        Self::constant(ctx, BigRational::one())
    }

    pub fn constant(ctx: &Arc<RingContext>, c: BigRational) -> Self {
        Self::monomial(ctx, c, Monomial::one(ctx.nvars()))
    }

    pub fn integer(ctx: &Arc<RingContext>, c: i64) -> Self {
        Self::constant(ctx, BigRational::from_integer(c.into()))
    }

    pub fn monomial(ctx: &Arc<RingContext>, c: BigRational, m: Monomial) -> Self {
        debug_assert_eq!(m.exps.len(), ctx.nvars());
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Poly {
            ctx: ctx.clone(),
            terms,
        }
    }

    /// The variable with exponent index `idx`.
    pub fn var(ctx: &Arc<RingContext>, idx: usize) -> Self {
        let mut exps = vec![0; ctx.nvars()];
        exps[idx] = 1;
        Self::monomial(ctx, BigRational::one(), Monomial::new(0, exps))
    }

    pub fn y(ctx: &Arc<RingContext>, j: usize) -> Self {
        Self::var(ctx, ctx.y_index(j))
    }

    pub fn z(ctx: &Arc<RingContext>, k: usize) -> Self {
        Self::var(ctx, ctx.z_index(k))
    }

    /// `c * x^e`.
    pub fn x_pow(ctx: &Arc<RingContext>, e: i64) -> Self {
        Self::monomial(
            ctx,
            BigRational::one(),
            Monomial::new(e, vec![0; ctx.nvars()]),
        )
    }

    fn from_map(ctx: &Arc<RingContext>, map: HashMap<Monomial, BigRational>) -> Self {
        let terms = map.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        Poly {
            ctx: ctx.clone(),
            terms,
        }
    }

    pub fn ctx(&self) -> &Arc<RingContext> {
        &self.ctx
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .iter()
                .next()
                .is_some_and(|(m, c)| c.is_one() && m.x == 0 && m.degree() == 0)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    /// Nonzero rational constant, if the polynomial is one.
    pub fn as_constant(&self) -> Option<BigRational> {
        if self.is_zero() {
            return Some(BigRational::zero());
        }
        if self.terms.len() != 1 {
            return None;
        }
        let (m, c) = self.terms.iter().next()?;
        (m.x == 0 && m.degree() == 0).then(|| c.clone())
    }

    /// `(c, r)` when the polynomial is a unit `c * x^r` of `Q[x, 1/x]`.
    pub fn as_unit_monomial(&self) -> Option<(BigRational, i64)> {
        if self.terms.len() != 1 {
            return None;
        }
        let (m, c) = self.terms.iter().next()?;
        (m.degree() == 0).then(|| (c.clone(), m.x))
    }

    /// `(c, r, idx)` when the polynomial is `c * x^r * v` for a single variable `v`.
    pub fn as_scaled_var(&self) -> Option<(BigRational, i64, usize)> {
        if self.terms.len() != 1 {
            return None;
        }
        let (m, c) = self.terms.iter().next()?;
        if m.degree() != 1 {
            return None;
        }
        let idx = m.exps.iter().position(|&e| e == 1)?;
        Some((c.clone(), m.x, idx))
    }

    pub fn scale(&self, c: &BigRational) -> Poly {
        if c.is_zero() {
            return Poly::zero(&self.ctx);
        }
        let terms = self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect();
        Poly {
            ctx: self.ctx.clone(),
            terms,
        }
    }

    /// Multiply by `x^k` (any sign).
    pub fn shift_x(&self, k: i64) -> Poly {
        if k == 0 {
            return self.clone();
        }
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| {
                (
                    Monomial {
                        x: m.x + k,
                        exps: m.exps.clone(),
                    },
                    c.clone(),
                )
            })
            .collect();
        Poly {
            ctx: self.ctx.clone(),
            terms,
        }
    }

    /// Substitute `z_k -> x^{w_k} z_k` for every z-variable (a monomial relabelling).
    pub fn scale_z(&self, w: &[i64]) -> Poly {
        let ctx = &self.ctx;
        debug_assert_eq!(w.len(), ctx.n());
        if w.iter().all(|&t| t == 0) {
            return self.clone();
        }
        let base = ctx.z_index(0);
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| {
                let shift: i64 = w
                    .iter()
                    .enumerate()
                    .map(|(k, &t)| t * m.exps[base + k] as i64)
                    .sum();
                (
                    Monomial {
                        x: m.x + shift,
                        exps: m.exps.clone(),
                    },
                    c.clone(),
                )
            })
            .collect();
        Poly {
            ctx: ctx.clone(),
            terms,
        }
    }

    pub fn x_order(&self) -> XOrder {
        self.terms
            .keys()
            .map(|m| m.x)
            .min()
            .map_or(XOrder::Infinite, XOrder::Finite)
    }

    pub fn is_over_r(&self) -> bool {
        self.terms.keys().all(|m| m.x >= 0)
    }

    /// Whether the polynomial lies in `x R^{[m+n]}`.
    pub fn divisible_by_x(&self) -> bool {
        self.terms.keys().all(|m| m.x >= 1)
    }

    /// Image modulo `x`; requires the polynomial to be over `R`.
    pub fn mod_x(&self) -> Result<Poly> {
        if !self.is_over_r() {
            return Err(Error::NotOverR);
        }
        let terms = self
            .terms
            .iter()
            .filter(|(m, _)| m.x == 0)
            .map(|(m, c)| (m.clone(), c.clone()))
            .collect();
        Ok(Poly {
            ctx: self.ctx.clone(),
            terms,
        })
    }

    pub fn degree_in(&self, idx: usize) -> u32 {
        self.terms.keys().map(|m| m.exps[idx]).max().unwrap_or(0)
    }

    pub fn involves(&self, idx: usize) -> bool {
        self.terms.keys().any(|m| m.exps[idx] > 0)
    }

    pub fn involves_x(&self) -> bool {
        self.terms.keys().any(|m| m.x != 0)
    }

    /// Terms that do not involve variable `idx`.
    pub fn without_var(&self, idx: usize) -> Poly {
        self.filter_terms(|m, _| m.exps[idx] == 0)
    }

    /// The terms for which `keep` holds.
    pub fn filter_terms(&self, keep: impl Fn(&Monomial, &BigRational) -> bool) -> Poly {
        let terms = self
            .terms
            .iter()
            .filter(|(m, c)| keep(m, c))
            .map(|(m, c)| (m.clone(), c.clone()))
            .collect();
        Poly {
            ctx: self.ctx.clone(),
            terms,
        }
    }

    /// Coefficients with respect to variable `idx`: `P = sum_e c_e * v^e`.
    pub fn coefficients_in(&self, idx: usize) -> BTreeMap<u32, Poly> {
        let mut out: BTreeMap<u32, BTreeMap<Monomial, BigRational>> = BTreeMap::new();
        for (m, c) in &self.terms {
            let e = m.exps[idx];
            let mut exps = m.exps.clone();
            exps[idx] = 0;
            out.entry(e)
                .or_default()
                .insert(Monomial { x: m.x, exps }, c.clone());
        }
        out.into_iter()
            .map(|(e, t)| {
                (
                    e,
                    Poly {
                        ctx: self.ctx.clone(),
                        terms: t,
                    },
                )
            })
            .collect()
    }

    /// Total degree in the `(y, z)` variables; `None` for zero.
    pub fn total_degree_yz(&self) -> Option<u64> {
        let lo = self.ctx.p();
        self.terms
            .keys()
            .map(|m| m.exps[lo..].iter().map(|&e| e as u64).sum())
            .max()
    }

    /// Partial derivative with respect to variable `idx` (`x` and `u` are scalars).
    pub fn derivative(&self, idx: usize) -> Poly {
        let mut terms = BTreeMap::new();
        for (m, c) in &self.terms {
            let e = m.exps[idx];
            if e == 0 {
                continue;
            }
            let mut exps = m.exps.clone();
            exps[idx] -= 1;
            terms.insert(
                Monomial { x: m.x, exps },
                c * BigRational::from_integer(BigInt::from(e)),
            );
        }
        Poly {
            ctx: self.ctx.clone(),
            terms,
        }
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut result = Poly::one(&self.ctx);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// Power with a signed exponent; negative exponents require a unit `c x^r`.
    pub fn pow_signed(&self, e: i64) -> Result<Poly> {
        if e >= 0 {
            return Ok(self.pow(e as u32));
        }
        let inv = self.unit_inverse().ok_or(Error::NegativePower(e))?;
        Ok(inv.pow((-e) as u32))
    }

    /// Inverse of a unit `c x^r`.
    pub fn unit_inverse(&self) -> Option<Poly> {
        let (c, r) = self.as_unit_monomial()?;
        Some(Poly::monomial(
            &self.ctx,
            c.recip(),
            Monomial::new(-r, vec![0; self.ctx.nvars()]),
        ))
    }

    /// Exact division by a unit `c x^r`.
    pub fn div_unit(&self, unit: &Poly) -> Result<Poly> {
        let (c, r) = unit.as_unit_monomial().ok_or(Error::NonUnitDivision)?;
        Ok(self.shift_x(-r).scale(&c.recip()))
    }

    /// Ring homomorphism fixing `x` and the `u`'s; `images[i]` is the image of
    /// the acted-on variable `i` (`y`'s then `z`'s), `None` meaning "fixed".
    pub fn substitute(&self, images: &[Option<Poly>]) -> Result<Poly> {
        let ctx = &self.ctx;
        if images.len() != ctx.dim() {
            return Err(Error::MissingImage(images.len()));
        }
        for img in images.iter().flatten() {
            RingContext::ensure_same(ctx, img.ctx())?;
        }
        Ok(self.substitute_unchecked(images))
    }

    pub(crate) fn substitute_unchecked(&self, images: &[Option<Poly>]) -> Poly {
        self.substitute_limited(images, usize::MAX)
            .expect("unbounded substitution")
    }

    /// As [`Poly::substitute`], giving up (`None`) once an intermediate result exceeds `limit` terms.
    pub fn substitute_limited(&self, images: &[Option<Poly>], limit: usize) -> Option<Poly> {
        let ctx = &self.ctx;
        let p = ctx.p();
        let moved: Vec<usize> = (0..images.len()).filter(|&i| images[i].is_some()).collect();
        if moved.is_empty() || self.is_zero() {
            return Some(self.clone());
        }
        // Group terms by the exponents of moved variables.
        let mut groups: BTreeMap<Vec<u32>, BTreeMap<Monomial, BigRational>> = BTreeMap::new();
        for (m, c) in &self.terms {
            let key: Vec<u32> = moved.iter().map(|&i| m.exps[p + i]).collect();
            let mut exps = m.exps.clone();
            for &i in &moved {
                exps[p + i] = 0;
            }
            groups
                .entry(key)
                .or_default()
                .insert(Monomial { x: m.x, exps }, c.clone());
        }
        let mut powers: Vec<Vec<Poly>> = moved.iter().map(|_| vec![Poly::one(ctx)]).collect();
        let mut acc: HashMap<Monomial, BigRational> = HashMap::new();
        for (key, rest) in groups {
            let mut factor = Poly::one(ctx);
            for (slot, &e) in key.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let img = images[moved[slot]]
                    .as_ref()
                    .expect("moved variable has an image");
                let cache = &mut powers[slot];
                while cache.len() <= e as usize {
                    let next = cache.last().expect("nonempty").mul_limited(img, limit)?;
                    cache.push(next);
                }
                factor = factor.mul_limited(&cache[e as usize], limit)?;
            }
            let rest = Poly {
                ctx: ctx.clone(),
                terms: rest,
            };
            if !mul_into(&mut acc, &rest, &factor, limit) {
                return None;
            }
        }
        Some(Poly::from_map(ctx, acc))
    }

    /// Product, or `None` once it exceeds `limit` terms.
    pub fn mul_limited(&self, rhs: &Poly, limit: usize) -> Option<Poly> {
        check_ctx(self, rhs);
        if self.is_zero() || rhs.is_zero() {
            return Some(Poly::zero(&self.ctx));
        }
        let mut acc = HashMap::with_capacity((self.len() * rhs.len()).min(1 << 16));
        mul_into(&mut acc, self, rhs, limit).then(|| Poly::from_map(&self.ctx, acc))
    }

    /// Re-express in another context: acted-on variables map to `images`,
    /// parameters `u_i` map to `u_images[i]`, and `x` to `x`.
    pub fn map_into(
        &self,
        target: &Arc<RingContext>,
        images: &[Poly],
        u_images: &[Poly],
    ) -> Result<Poly> {
        let ctx = &self.ctx;
        if images.len() != ctx.dim() || u_images.len() != ctx.p() {
            return Err(Error::MissingImage(images.len()));
        }
        for img in images.iter().chain(u_images) {
            RingContext::ensure_same(target, img.ctx())?;
        }
        let mut out = Poly::zero(target);
        let all: Vec<&Poly> = u_images.iter().chain(images.iter()).collect();
        for (m, c) in &self.terms {
            let mut t = Poly::monomial(
                target,
                c.clone(),
                Monomial::new(m.x, vec![0; target.nvars()]),
            );
            for (i, &e) in m.exps.iter().enumerate() {
                if e > 0 {
                    t = &t * &all[i].pow(e);
                }
            }
            out = &out + &t;
        }
        Ok(out)
    }

    fn add_assign_ref(&mut self, other: &Poly, sign: bool) {
        for (m, c) in &other.terms {
            match self.terms.get_mut(m) {
                Some(v) => {
                    if sign {
                        *v += c;
                    } else {
                        *v -= c;
                    }
                    if v.is_zero() {
                        self.terms.remove(m);
                    }
                }
                None => {
                    self.terms
                        .insert(m.clone(), if sign { c.clone() } else { -c.clone() });
                }
            }
        }
    }
}

/// Accumulate `a * b`; `false` once `acc` holds more than `limit` terms.
fn mul_into(acc: &mut HashMap<Monomial, BigRational>, a: &Poly, b: &Poly, limit: usize) -> bool {
    for (ma, ca) in &a.terms {
        if acc.len() > limit {
            return false;
        }
        for (mb, cb) in &b.terms {
            let m = ma.mul(mb);
            let c = ca * cb;
            match acc.get_mut(&m) {
                Some(v) => *v += c,
                None => {
                    acc.insert(m, c);
                }
            }
        }
    }
    acc.len() <= limit
}

fn check_ctx(a: &Poly, b: &Poly) {
    assert!(
        RingContext::same(&a.ctx, &b.ctx),
        "polynomials from different contexts"
    );
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        check_ctx(self, rhs);
        let (mut big, small) = if self.len() >= rhs.len() {
            (self.clone(), rhs)
        } else {
            (rhs.clone(), self)
        };
        big.add_assign_ref(small, true);
        big
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        check_ctx(self, rhs);
        let mut out = self.clone();
        out.add_assign_ref(rhs, false);
        out
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        check_ctx(self, rhs);
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero(&self.ctx);
        }
        self.mul_limited(rhs, usize::MAX)
            .expect("unbounded product")
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| (m.clone(), -c.clone()))
            .collect();
        Poly {
            ctx: self.ctx.clone(),
            terms,
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $f:ident) => {
        impl $tr for Poly {
            type Output = Poly;
            fn $f(self, rhs: Poly) -> Poly {
                (&self).$f(&rhs)
            }
        }
        impl $tr<&Poly> for Poly {
            type Output = Poly;
            fn $f(self, rhs: &Poly) -> Poly {
                (&self).$f(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

fn fmt_rational(c: &BigRational) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            match (i, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let mut factors = Vec::new();
            match m.x {
                0 => {}
                1 => factors.push("x".to_string()),
                e => factors.push(format!("x^{e}")),
            }
            for (idx, &e) in m.exps.iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(self.ctx.name(idx).to_string()),
                    e => factors.push(format!("{}^{e}", self.ctx.name(idx))),
                }
            }
            if factors.is_empty() {
                write!(f, "{}", fmt_rational(&abs))?;
            } else if abs.is_one() {
                write!(f, "{}", factors.join("*"))?;
            } else {
                write!(f, "{}*{}", fmt_rational(&abs), factors.join("*"))?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::parse_poly;

    fn ctx() -> Arc<RingContext> {
        RingContext::new(1, 1, 0).unwrap()
    }

    #[test]
    fn expands_square() {
        let c = ctx();
        let a = parse_poly("x*z - y^2", &c).unwrap();
        let expected = parse_poly("x^2*z^2 - 2*x*y^2*z + y^4", &c).unwrap();
        assert_eq!(a.pow(2), expected);
        assert_eq!(&a + &Poly::zero(&c), a);
        let y = Poly::y(&c, 0);
        assert_eq!(&y * &y, parse_poly("y^2", &c).unwrap());
    }

    #[test]
    fn x_order_cases() {
        let c = RingContext::new(1, 3, 0).unwrap();
        assert_eq!(
            parse_poly("x^2*(y*z3 + z2^2)", &c).unwrap().x_order(),
            XOrder::Finite(2)
        );
        assert_eq!(Poly::zero(&c).x_order(), XOrder::Infinite);
        assert_eq!(
            parse_poly("y + z1/x", &c).unwrap().x_order(),
            XOrder::Finite(-1)
        );
    }

    #[test]
    fn mod_x_cases() {
        let c = RingContext::with_names(
            1,
            3,
            0,
            vec!["y".into(), "z".into(), "u".into(), "t".into()],
        )
        .unwrap();
        let f = parse_poly("y + x*(x*z + y*(y*u + z^2))", &c).unwrap();
        assert_eq!(f.mod_x().unwrap(), Poly::y(&c, 0));
        assert!(parse_poly("x*(y + z)", &c)
            .unwrap()
            .mod_x()
            .unwrap()
            .is_zero());
        assert_eq!(
            parse_poly("y + x*y^2", &c).unwrap().mod_x().unwrap(),
            Poly::y(&c, 0)
        );
        assert_eq!(parse_poly("y/x", &c).unwrap().mod_x(), Err(Error::NotOverR));
    }

    #[test]
    fn substitution_example() {
        let c = ctx();
        let p = parse_poly("y^2", &c).unwrap();
        let img = parse_poly("y + x^2*z", &c).unwrap();
        let out = p.substitute(&[Some(img), None]).unwrap();
        assert_eq!(out, parse_poly("y^2 + 2*x^2*y*z + x^4*z^2", &c).unwrap());
        assert_eq!(p.substitute(&[None, None]).unwrap(), p);
    }

    #[test]
    fn checked_arith_rejects_mismatch() {
        let a = Poly::one(&ctx());
        let b = Poly::one(&RingContext::new(2, 1, 0).unwrap());
        assert_eq!(
            poly_arith(ArithOp::Add, &a, &b),
            Err(Error::ContextMismatch)
        );
        assert!(Poly::y(&ctx(), 0).pow_signed(-1).is_err());
        assert_eq!(
            Poly::x_pow(&ctx(), 2).pow_signed(-1).unwrap(),
            Poly::x_pow(&ctx(), -2)
        );
    }
}
