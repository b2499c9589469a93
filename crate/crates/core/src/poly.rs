//! Dense polynomials over truncated Z_p.
//!
//! Coefficients share one [`PadicContext`]; index equals degree and the
//! leading coefficient is never a zero residue (the zero polynomial has no
//! coefficients at all). A coefficient counts as zero exactly when its
//! residue is zero at its own precision; there are no epsilon heuristics.
//!
//! The gcd runs a content-stripping pseudo-remainder loop: every remainder
//! is formed without division (scaling by the divisor's leading coefficient
//! instead) and then divided by its content power of p, which keeps all
//! coefficients inside Z_p and bounds the precision loss. Plain Q_p[x]
//! division would shed digits at every step.

use num_bigint::BigInt;
use num_integer::Integer as _;
use num_rational::BigRational;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::padic::{PadicApprox, PadicContext, ResidueInt, Valuation};

/// Default bound on primes accepted by [`Poly::roots_mod_p`].
pub const ROOT_ENUM_LIMIT: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly<I: ResidueInt> {
    ctx: PadicContext<I>,
    coeffs: Vec<PadicApprox<I>>,
}

impl<I: ResidueInt> Poly<I> {
    pub fn zero(ctx: &PadicContext<I>) -> Self {
        Poly {
            ctx: ctx.clone(),
            coeffs: Vec::new(),
        }
    }

    /// Builds from coefficients, constant term first; trims leading zero
    /// residues into canonical form.
    pub fn from_elements(ctx: &PadicContext<I>, coeffs: Vec<PadicApprox<I>>) -> Result<Self> {
        for c in &coeffs {
            if c.context() != ctx {
                return Err(Error::ContextMismatch);
            }
        }
        let mut poly = Poly {
            ctx: ctx.clone(),
            coeffs,
        };
        poly.trim();
        Ok(poly)
    }

    pub fn from_int_coeffs(ctx: &PadicContext<I>, coeffs: &[i64]) -> Self {
        let elements = coeffs.iter().map(|&c| ctx.int(c)).collect();
        Poly::from_elements(ctx, elements).expect("shared context")
    }

    fn trim(&mut self) {
        while matches!(self.coeffs.last(), Some(c) if c.is_zero_residue()) {
            self.coeffs.pop();
        }
    }

    pub fn context(&self) -> &PadicContext<I> {
        &self.ctx
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[PadicApprox<I>] {
        &self.coeffs
    }

    pub fn leading(&self) -> Option<&PadicApprox<I>> {
        self.coeffs.last()
    }

    /// Horner evaluation; precision propagates through the ring operations.
    pub fn eval(&self, x: &PadicApprox<I>) -> Result<PadicApprox<I>> {
        if x.context() != &self.ctx {
            return Err(Error::ContextMismatch);
        }
        let mut acc = self.ctx.zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(x)?.add(c)?;
        }
        Ok(acc)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.ctx != other.ctx {
            return Err(Error::ContextMismatch);
        }
        let mut coeffs = Vec::with_capacity(self.coeffs.len().max(other.coeffs.len()));
        for i in 0..self.coeffs.len().max(other.coeffs.len()) {
            let c = match (self.coeffs.get(i), other.coeffs.get(i)) {
                (Some(a), Some(b)) => a.add(b)?,
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => unreachable!(),
            };
            coeffs.push(c);
        }
        Poly::from_elements(&self.ctx, coeffs)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale_neg())
    }

    fn scale_neg(&self) -> Self {
        let coeffs = self.coeffs.iter().map(|c| c.neg()).collect();
        Poly {
            ctx: self.ctx.clone(),
            coeffs,
        }
    }

    /// Coefficient-wise product with a single element.
    pub fn scale(&self, k: &PadicApprox<I>) -> Result<Self> {
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        for c in &self.coeffs {
            coeffs.push(c.mul(k)?);
        }
        Poly::from_elements(&self.ctx, coeffs)
    }

    /// Multiplication by `x^k`.
    pub fn shifted(&self, k: usize) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut coeffs = vec![self.ctx.zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        Poly {
            ctx: self.ctx.clone(),
            coeffs,
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.ctx != other.ctx {
            return Err(Error::ContextMismatch);
        }
        if self.is_zero() || other.is_zero() {
            return Ok(Poly::zero(&self.ctx));
        }
        let mut coeffs = vec![self.ctx.zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] = coeffs[i + j].add(&a.mul(b)?)?;
            }
        }
        Poly::from_elements(&self.ctx, coeffs)
    }

    /// Formal derivative of the given order (1 through 3).
    pub fn derivative(&self, order: u32) -> Self {
        assert!((1..=3).contains(&order), "derivative order must be 1..=3");
        let mut cur = self.clone();
        for _ in 0..order {
            let coeffs: Vec<_> = cur
                .coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c.mul(&cur.ctx.int(k as i64)).expect("shared context"))
                .collect();
            cur = Poly::from_elements(&cur.ctx, coeffs).expect("shared context");
        }
        cur
    }

    /// `g(x) = f(a + p^s * x)`, by Horner composition with the linear
    /// substitution.
    pub fn taylor_shift(&self, a: &PadicApprox<I>, scale_exp: u32) -> Result<Self> {
        if a.context() != &self.ctx {
            return Err(Error::ContextMismatch);
        }
        let linear = Poly::from_elements(
            &self.ctx,
            vec![a.clone(), self.ctx.element(self.ctx.pow(scale_exp))],
        )?;
        let mut acc = Poly::zero(&self.ctx);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(&linear)?;
            acc = acc.add(&Poly::from_elements(&self.ctx, vec![c.clone()])?)?;
        }
        Ok(acc)
    }

    /// Minimum decided coefficient valuation (the exponent of the content
    /// power of p).
    pub fn content_exp(&self) -> Result<u32> {
        if self.is_zero() {
            return Err(Error::Precondition("content of the zero polynomial"));
        }
        let mut min_finite: Option<u32> = None;
        for c in &self.coeffs {
            if let Valuation::Finite(v) = c.valuation() {
                min_finite = Some(min_finite.map_or(v, |m| m.min(v)));
            }
        }
        min_finite.ok_or_else(|| {
            Error::PrecisionExhausted("every coefficient is a zero residue; content undecidable".into())
        })
    }

    /// Divides out the content power of p, returning the primitive part and
    /// the exponent removed.
    pub fn strip_content(&self) -> Result<(Self, u32)> {
        let m = self.content_exp()?;
        if m == 0 {
            return Ok((self.clone(), 0));
        }
        let divisor = self.ctx.element(self.ctx.pow(m));
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        for c in &self.coeffs {
            let stripped = c.div(&divisor).map_err(|e| match e {
                Error::DivisionByHigherValuation => Error::PrecisionExhausted(
                    "coefficient valuation undecidable at the content exponent".into(),
                ),
                other => other,
            })?;
            coeffs.push(stripped);
        }
        Ok((Poly::from_elements(&self.ctx, coeffs)?, m))
    }

    /// Classical division with remainder. Each quotient coefficient divides
    /// by the divisor's leading coefficient, so the quotient must stay in
    /// Z_p[x] for the call to succeed.
    pub fn div_rem(&self, divisor: &Self) -> Result<(Self, Self)> {
        if divisor.is_zero() {
            return Err(Error::Precondition("division by the zero polynomial"));
        }
        let lead = divisor.leading().expect("nonzero divisor");
        let deg_d = divisor.degree().expect("nonzero divisor");
        let mut rem = self.clone();
        let mut quot = Poly::zero(&self.ctx);
        while let Some(deg_r) = rem.degree() {
            if deg_r < deg_d {
                break;
            }
            let qc = rem.leading().expect("nonzero").div(lead)?;
            let shift = deg_r - deg_d;
            let term = Poly::from_elements(&self.ctx, vec![qc])?.shifted(shift);
            quot = quot.add(&term)?;
            let next = rem.sub(&divisor.mul(&term)?)?;
            debug_assert!(next.degree().is_none_or(|d| d < deg_r));
            rem = next;
        }
        Ok((quot, rem))
    }

    /// Pseudo-remainder: eliminates leading terms by scaling with the
    /// divisor's leading coefficient instead of dividing, so everything
    /// stays in Z_p[x].
    fn pseudo_rem(&self, divisor: &Self) -> Result<Self> {
        let lead = divisor.leading().expect("nonzero divisor");
        let deg_d = divisor.degree().expect("nonzero divisor");
        let mut rem = self.clone();
        while let Some(deg_r) = rem.degree() {
            if deg_r < deg_d {
                break;
            }
            let lr = rem.leading().expect("nonzero").clone();
            let term = divisor.shifted(deg_r - deg_d).scale(&lr)?;
            let next = rem.scale(lead)?.sub(&term)?;
            debug_assert!(next.degree().is_none_or(|d| d < deg_r));
            rem = next;
        }
        Ok(rem)
    }

    /// Monic if the leading coefficient is a unit, otherwise unit content.
    fn normalize_assoc(&self) -> Result<Self> {
        if self.is_zero() {
            return Ok(self.clone());
        }
        match self.leading().expect("nonzero").valuation() {
            Valuation::Finite(0) => {
                let inv = self.leading().expect("nonzero").invert()?;
                self.scale(&inv)
            }
            _ => Ok(self.strip_content()?.0),
        }
    }

    /// A greatest common divisor, correct whenever intermediate leading
    /// coefficients stay decidably nonzero at the working precision.
    pub fn gcd(&self, other: &Self) -> Result<Self> {
        if self.is_zero() && other.is_zero() {
            return Err(Error::Precondition("gcd of two zero polynomials"));
        }
        if self.is_zero() {
            return other.normalize_assoc();
        }
        if other.is_zero() {
            return self.normalize_assoc();
        }
        let mut a = self.strip_content()?.0;
        let mut b = other.strip_content()?.0;
        if a.degree() < b.degree() {
            std::mem::swap(&mut a, &mut b);
        }
        while !b.is_zero() {
            let mut r = a.pseudo_rem(&b)?;
            if !r.is_zero() {
                r = r.strip_content()?.0;
            }
            a = b;
            b = r;
        }
        a.normalize_assoc()
    }

    /// `f / gcd(f, f')`: shares the roots of `f`, all simple.
    pub fn squarefree_part(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::Precondition("squarefree part of the zero polynomial"));
        }
        let g = self.gcd(&self.derivative(1))?;
        if g.degree() == Some(0) {
            return Ok(self.clone());
        }
        let (quot, rem) = self.div_rem(&g)?;
        if !rem.is_zero() {
            return Err(Error::PrecisionExhausted(
                "division by gcd(f, f') left a nonzero remainder".into(),
            ));
        }
        Ok(quot)
    }

    /// All residues `a` in `[0, p)` with `f(a) = 0 mod p`, by exhaustive
    /// trial.
    pub fn roots_mod_p(&self) -> Result<Vec<u64>> {
        self.roots_mod_p_with_limit(ROOT_ENUM_LIMIT)
    }

    pub fn roots_mod_p_with_limit(&self, limit: u64) -> Result<Vec<u64>> {
        let p = self.ctx.prime_u64();
        if p >= limit {
            return Err(Error::PrimeTooLargeForEnumeration { p, limit });
        }
        let reduced: Vec<u64> = self
            .coeffs
            .iter()
            .map(|c| {
                c.value()
                    .mod_floor(self.ctx.prime())
                    .to_u64()
                    .expect("residue below p fits u64")
            })
            .collect();
        let mut roots = Vec::new();
        for a in 0..p {
            let mut acc = 0u64;
            for &c in reduced.iter().rev() {
                acc = (acc * a + c) % p;
            }
            if acc == 0 {
                roots.push(a);
            }
        }
        Ok(roots)
    }
}

/// Parses a comma-separated coefficient list, constant term first. Entries
/// are integers or `num/den` fractions whose reduced denominator must be a
/// p-adic unit.
pub fn parse_rational_coeffs(input: &str) -> Result<Vec<BigRational>> {
    let mut out = Vec::new();
    for (idx, raw) in input.split(',').enumerate() {
        let item = raw.trim();
        if item.is_empty() {
            return Err(Error::Parse(format!("empty coefficient at position {idx}")));
        }
        let ratio = match item.split_once('/') {
            Some((n, d)) => {
                let num: BigInt = n
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad numerator `{n}`")))?;
                let den: BigInt = d
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad denominator `{d}`")))?;
                if den.is_zero() {
                    return Err(Error::Parse(format!("zero denominator in `{item}`")));
                }
                BigRational::new(num, den)
            }
            None => {
                let n: BigInt = item
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad coefficient `{item}`")))?;
                BigRational::from_integer(n)
            }
        };
        out.push(ratio);
    }
    Ok(out)
}

impl Poly<BigInt> {
    /// Instantiates exact rational coefficients in a context.
    pub fn from_rationals(ctx: &PadicContext<BigInt>, coeffs: &[BigRational]) -> Result<Self> {
        let p = BigInt::from(ctx.prime_u64());
        let mut elements = Vec::with_capacity(coeffs.len());
        for c in coeffs {
            if c.denom().mod_floor(&p).is_zero() {
                return Err(Error::Parse(format!(
                    "coefficient {c} has a non-unit denominator at p = {}",
                    ctx.prime_u64()
                )));
            }
            elements.push(ctx.rational(c.numer().clone(), c.denom().clone())?);
        }
        Poly::from_elements(ctx, elements)
    }

    /// Parses the CLI text format (e.g. `-2,0,1` for x^2 - 2) into a
    /// polynomial over the given context.
    pub fn parse(ctx: &PadicContext<BigInt>, input: &str) -> Result<Self> {
        let coeffs = parse_rational_coeffs(input)?;
        Poly::from_rationals(ctx, &coeffs)
    }
}
