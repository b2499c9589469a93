//! Truncated p-adic integer arithmetic with explicit precision tracking.
//!
//! An element is a residue `value mod p^prec` together with its absolute
//! precision `prec`: the underlying p-adic integer is known to agree with
//! `value` modulo `p^prec` and nothing more. Operations propagate precision
//! by the usual fixed-point rules:
//!
//! ```text
//! (a + O(p^i)) + (b + O(p^j))  known mod p^min(i, j)
//! (a + O(p^i)) * (b + O(p^j))  known mod p^min(i + v(b), j + v(a), N)
//! (a + O(p^i)) / (b + O(p^j))  known mod p^(min(i, j) - v(b))
//! ```
//!
//! where `v` is the p-adic valuation and `N` the working precision of the
//! shared context. A residue that is zero mod `p^prec` has an undetermined
//! valuation, reported as [`Valuation::AtLeast`]; comparisons that such a
//! bound cannot decide return an error instead of guessing.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{FromPrimitive, Signed, ToPrimitive};

use crate::error::{Error, Result};

/// Backing integer for residues.
///
/// `BigInt` is the default; `i128` or `i64` work for desk-scale parameters
/// as long as `p^(2 * work_prec)` fits the type (products are reduced only
/// after they are formed).
pub trait ResidueInt:
    Integer + Signed + Clone + FromPrimitive + ToPrimitive + fmt::Debug + fmt::Display + 'static
{
}

impl<T> ResidueInt for T where
    T: Integer + Signed + Clone + FromPrimitive + ToPrimitive + fmt::Debug + fmt::Display + 'static
{
}

fn mul_mod_u64(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod_u64(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod_u64(acc, base, m);
        }
        base = mul_mod_u64(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin; the listed bases decide primality for all u64.
pub(crate) fn is_prime_u64(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &q in &BASES {
        if n == q {
            return true;
        }
        if n.is_multiple_of(q) {
            return false;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'bases: for &a in &BASES {
        let mut x = pow_mod_u64(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod_u64(x, x, n);
            if x == n - 1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

/// A p-adic valuation that may only be known as a lower bound.
///
/// `Finite(v)` is exact. `AtLeast(k)` arises from a residue that is zero mod
/// `p^k`: the true valuation is `>= k`, possibly infinite.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Valuation {
    Finite(u32),
    AtLeast(u32),
}

impl Valuation {
    pub fn is_finite(&self) -> bool {
        matches!(self, Valuation::Finite(_))
    }

    pub fn finite(&self) -> Option<u32> {
        match *self {
            Valuation::Finite(v) => Some(v),
            Valuation::AtLeast(_) => None,
        }
    }

    /// The provable lower bound on the valuation.
    pub fn lower_bound(&self) -> u32 {
        match *self {
            Valuation::Finite(v) | Valuation::AtLeast(v) => v,
        }
    }

    /// Provably `>= bound` (an `AtLeast` answer may simply lack precision).
    pub fn known_ge(&self, bound: u32) -> bool {
        self.lower_bound() >= bound
    }

    /// Decides `self > bound`, erring when the bound information is too weak.
    pub fn try_gt(&self, bound: u32) -> Result<bool> {
        match *self {
            Valuation::Finite(v) => Ok(v > bound),
            Valuation::AtLeast(k) if k > bound => Ok(true),
            Valuation::AtLeast(_) => Err(Error::PrecisionExhausted(
                "valuation comparison undecidable at working precision".into(),
            )),
        }
    }

    /// Total comparison where possible; errors when the order is undecidable.
    pub fn try_cmp(&self, other: &Valuation) -> Result<Ordering> {
        use Valuation::*;
        match (*self, *other) {
            (Finite(a), Finite(b)) => Ok(a.cmp(&b)),
            (AtLeast(a), Finite(b)) if a > b => Ok(Ordering::Greater),
            (Finite(a), AtLeast(b)) if b > a => Ok(Ordering::Less),
            _ => Err(Error::PrecisionExhausted(
                "valuation comparison undecidable at working precision".into(),
            )),
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::AtLeast(k) => write!(f, ">={k}"),
        }
    }
}

struct ContextInner<I> {
    p: I,
    p_u64: u64,
    work_prec: u32,
}

/// Shared parameters of a truncated-Z_p computation: the prime and the
/// working precision `N` (elements are carried mod `p^N` at most).
///
/// Cheap to clone; immutable after construction.
pub struct PadicContext<I: ResidueInt>(Arc<ContextInner<I>>);

impl<I: ResidueInt> Clone for PadicContext<I> {
    fn clone(&self) -> Self {
        PadicContext(Arc::clone(&self.0))
    }
}

impl<I: ResidueInt> PartialEq for PadicContext<I> {
    fn eq(&self, other: &Self) -> bool {
        self.0.p_u64 == other.0.p_u64 && self.0.work_prec == other.0.work_prec
    }
}

impl<I: ResidueInt> Eq for PadicContext<I> {}

impl<I: ResidueInt> fmt::Debug for PadicContext<I> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Z_{} mod {}^{}", self.0.p_u64, self.0.p_u64, self.0.work_prec)
    }
}

impl<I: ResidueInt> PadicContext<I> {
    /// Primality is checked deterministically; `work_prec` must be positive.
    pub fn new(p: u64, work_prec: u32) -> Result<Self> {
        if !is_prime_u64(p) {
            return Err(Error::NotPrime(p));
        }
        if work_prec == 0 {
            return Err(Error::ZeroPrecision);
        }
        let p_int = I::from_u64(p).expect("prime fits the residue type");
        Ok(PadicContext(Arc::new(ContextInner {
            p: p_int,
            p_u64: p,
            work_prec,
        })))
    }

    pub fn prime_u64(&self) -> u64 {
        self.0.p_u64
    }

    pub fn prime(&self) -> &I {
        &self.0.p
    }

    pub fn work_prec(&self) -> u32 {
        self.0.work_prec
    }

    /// `p^k`.
    pub fn pow(&self, k: u32) -> I {
        num_traits::pow(self.0.p.clone(), k as usize)
    }

    /// An element from an integer, known to full working precision.
    pub fn element(&self, n: I) -> PadicApprox<I> {
        let modulus = self.pow(self.0.work_prec);
        PadicApprox {
            ctx: self.clone(),
            value: n.mod_floor(&modulus),
            prec: self.0.work_prec,
        }
    }

    pub fn int(&self, n: i64) -> PadicApprox<I> {
        self.element(I::from_i64(n).expect("i64 fits the residue type"))
    }

    pub fn zero(&self) -> PadicApprox<I> {
        self.element(I::zero())
    }

    pub fn one(&self) -> PadicApprox<I> {
        self.element(I::one())
    }

    pub fn rational_i64(&self, num: i64, den: i64) -> Result<PadicApprox<I>> {
        self.rational(
            I::from_i64(num).expect("i64 fits the residue type"),
            I::from_i64(den).expect("i64 fits the residue type"),
        )
    }

    /// `num/den` as an element of Z_p, to full working precision.
    ///
    /// Common powers of p cancel exactly first; what remains must have a
    /// unit denominator, otherwise the quotient lies outside Z_p.
    pub fn rational(&self, num: I, den: I) -> Result<PadicApprox<I>> {
        if den.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        if num.is_zero() {
            return Ok(self.zero());
        }
        let p = &self.0.p;
        let mut num = num;
        let mut den = den;
        while num.mod_floor(p).is_zero() && den.mod_floor(p).is_zero() {
            num = num.div_floor(p);
            den = den.div_floor(p);
        }
        if den.mod_floor(p).is_zero() {
            return Err(Error::DenominatorNotDividing);
        }
        let den_el = self.element(den);
        self.element(num).mul(&den_el.invert()?)
    }
}

/// A truncated p-adic integer: `value mod p^prec` in canonical form
/// (`0 <= value < p^prec`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PadicApprox<I: ResidueInt> {
    ctx: PadicContext<I>,
    value: I,
    prec: u32,
}

impl<I: ResidueInt> fmt::Display for PadicApprox<I> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + O({}^{})", self.value, self.ctx.prime_u64(), self.prec)
    }
}

impl<I: ResidueInt> PadicApprox<I> {
    pub fn context(&self) -> &PadicContext<I> {
        &self.ctx
    }

    pub fn value(&self) -> &I {
        &self.value
    }

    /// Absolute precision: the element is known mod `p^prec`.
    pub fn prec(&self) -> u32 {
        self.prec
    }

    /// The residue is zero at this precision (valuation at least `prec`).
    pub fn is_zero_residue(&self) -> bool {
        self.value.is_zero()
    }

    fn check_ctx(&self, other: &Self) -> Result<()> {
        if self.ctx == other.ctx {
            Ok(())
        } else {
            Err(Error::ContextMismatch)
        }
    }

    fn make(ctx: &PadicContext<I>, value: I, prec: u32) -> Self {
        debug_assert!(prec >= 1 && prec <= ctx.work_prec());
        let modulus = ctx.pow(prec);
        PadicApprox {
            ctx: ctx.clone(),
            value: value.mod_floor(&modulus),
            prec,
        }
    }

    /// Largest `v` with `p^v | value`, capped as `AtLeast(prec)` for the
    /// zero residue.
    pub fn valuation(&self) -> Valuation {
        if self.value.is_zero() {
            return Valuation::AtLeast(self.prec);
        }
        let p = self.ctx.prime();
        let mut v = 0u32;
        let mut rest = self.value.clone();
        loop {
            let (q, r) = rest.div_rem(p);
            if !r.is_zero() {
                break;
            }
            v += 1;
            rest = q;
        }
        debug_assert!(v < self.prec);
        Valuation::Finite(v)
    }

    /// `|x|_p = p^(-v)` as a rational, using the provable lower bound on the
    /// valuation (an upper bound on the norm for zero residues).
    pub fn norm(&self) -> Ratio<I> {
        let v = self.valuation().lower_bound();
        Ratio::new(I::one(), self.ctx.pow(v))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_ctx(other)?;
        let prec = self.prec.min(other.prec);
        Ok(Self::make(&self.ctx, self.value.clone() + other.value.clone(), prec))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_ctx(other)?;
        let prec = self.prec.min(other.prec);
        Ok(Self::make(&self.ctx, self.value.clone() - other.value.clone(), prec))
    }

    pub fn neg(&self) -> Self {
        Self::make(&self.ctx, -self.value.clone(), self.prec)
    }

    /// Product with the fixed-point precision rule: operand valuations add
    /// to the partner's precision, capped at the working precision.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_ctx(other)?;
        let va = self.valuation().lower_bound();
        let vb = other.valuation().lower_bound();
        let n = self.ctx.work_prec();
        let prec = (self.prec.saturating_add(vb))
            .min(other.prec.saturating_add(va))
            .min(n);
        Ok(Self::make(&self.ctx, self.value.clone() * other.value.clone(), prec))
    }

    /// Inverse of a unit, mod `p^prec`.
    pub fn invert(&self) -> Result<Self> {
        match self.valuation() {
            Valuation::Finite(0) => {}
            v => return Err(Error::NotAUnit(v)),
        }
        let modulus = self.ctx.pow(self.prec);
        let gcd = self.value.extended_gcd(&modulus);
        debug_assert!(gcd.gcd.is_one());
        Ok(Self::make(&self.ctx, gcd.x, self.prec))
    }

    /// Quotient in Z_p. The divisor must have a decided valuation not
    /// exceeding the dividend's; the result loses `v(divisor)` digits of
    /// absolute precision.
    pub fn div(&self, other: &Self) -> Result<Self> {
        self.check_ctx(other)?;
        let vb = match other.valuation() {
            Valuation::Finite(v) => v,
            v @ Valuation::AtLeast(_) => return Err(Error::NotAUnit(v)),
        };
        if self.valuation().lower_bound() < vb {
            return Err(Error::DivisionByHigherValuation);
        }
        let prec = self.prec.min(other.prec);
        if prec <= vb {
            return Err(Error::PrecisionExhausted(
                "quotient would have no certified digits".into(),
            ));
        }
        let prec = prec - vb;
        let shift = self.ctx.pow(vb);
        let a = self.value.div_floor(&shift);
        let b = other.value.div_floor(&shift);
        let b_unit = Self::make(&self.ctx, b, prec);
        let inv = b_unit.invert()?;
        Ok(Self::make(&self.ctx, a * inv.value, prec))
    }

    /// First `k` base-p digits, little-endian.
    pub fn digits(&self, k: u32) -> Result<Vec<u64>> {
        if k > self.prec {
            return Err(Error::InsufficientPrecision {
                needed: k,
                have: self.prec,
            });
        }
        let p = self.ctx.prime();
        let mut out = Vec::with_capacity(k as usize);
        let mut rest = self.value.clone();
        for _ in 0..k {
            let (q, r) = rest.div_rem(p);
            out.push(r.to_u64().expect("digit below p fits u64"));
            rest = q;
        }
        Ok(out)
    }

    /// The same element viewed at a lower precision.
    pub fn truncate(&self, k: u32) -> Result<Self> {
        if k > self.prec || k == 0 {
            return Err(Error::InsufficientPrecision {
                needed: k,
                have: self.prec,
            });
        }
        Ok(Self::make(&self.ctx, self.value.clone(), k))
    }

    /// Whether the two elements agree mod `p^k`.
    pub fn congruent_to(&self, other: &Self, k: u32) -> Result<bool> {
        self.check_ctx(other)?;
        if k > self.prec.min(other.prec) {
            return Err(Error::InsufficientPrecision {
                needed: k,
                have: self.prec.min(other.prec),
            });
        }
        let modulus = self.ctx.pow(k);
        Ok(self.value.mod_floor(&modulus) == other.value.mod_floor(&modulus))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn ctx(p: u64, n: u32) -> PadicContext<BigInt> {
        PadicContext::new(p, n).unwrap()
    }

    #[test]
    fn primality_check_at_construction() {
        assert!(PadicContext::<BigInt>::new(7, 4).is_ok());
        assert_eq!(PadicContext::<BigInt>::new(6, 4), Err(Error::NotPrime(6)));
        assert_eq!(PadicContext::<BigInt>::new(1, 4), Err(Error::NotPrime(1)));
        assert_eq!(PadicContext::<BigInt>::new(7, 0), Err(Error::ZeroPrecision));
        // a couple of larger cases for the Miller-Rabin path
        assert!(is_prime_u64(1_000_000_007));
        assert!(!is_prime_u64(1_000_000_007u64 * 3));
    }

    #[test]
    fn from_integer_examples() {
        let z = ctx(7, 4).int(0);
        assert_eq!(z.valuation(), Valuation::AtLeast(4));

        let x = ctx(5, 6).int(750);
        assert_eq!(x.valuation(), Valuation::Finite(3));

        let y = ctx(7, 2).int(-7);
        assert_eq!(y.value(), &BigInt::from(42));
        assert_eq!(y.valuation(), Valuation::Finite(1));
    }

    #[test]
    fn from_rational_examples() {
        let c = ctx(7, 2);
        let x = c.rational(BigInt::from(11), BigInt::from(6)).unwrap();
        assert_eq!(x.value(), &BigInt::from(10));
        assert_eq!(x.prec(), 2);

        let c3 = ctx(7, 3);
        let z = c3.rational(BigInt::from(0), BigInt::from(5)).unwrap();
        assert_eq!(z.valuation(), Valuation::AtLeast(3));

        let a = c3.rational(BigInt::from(7), BigInt::from(14)).unwrap();
        let b = c3.rational(BigInt::from(1), BigInt::from(2)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.value(), &BigInt::from(172)); // (343 + 1) / 2

        assert_eq!(
            c3.rational(BigInt::from(1), BigInt::from(7)),
            Err(Error::DenominatorNotDividing)
        );
        assert_eq!(
            c3.rational(BigInt::from(1), BigInt::from(0)),
            Err(Error::ZeroDenominator)
        );
    }

    #[test]
    fn ring_op_examples() {
        let c = ctx(7, 4);
        let x = c.int(123);
        assert_eq!(x.add(&c.zero()).unwrap(), x);

        let seven = c.int(7);
        assert_eq!(seven.mul(&seven).unwrap().valuation(), Valuation::Finite(2));

        let c2 = ctx(7, 2);
        let d = c2.int(3).sub(&c2.int(10)).unwrap();
        assert_eq!(d.value(), &BigInt::from(42));
        assert_eq!(d.valuation(), Valuation::Finite(1));
    }

    #[test]
    fn invert_examples() {
        let c = ctx(7, 2);
        assert_eq!(c.one().invert().unwrap(), c.one());
        assert_eq!(c.int(6).invert().unwrap().value(), &BigInt::from(41));
        assert_eq!(
            c.int(7).invert(),
            Err(Error::NotAUnit(Valuation::Finite(1)))
        );
        assert_eq!(
            c.int(0).invert(),
            Err(Error::NotAUnit(Valuation::AtLeast(2)))
        );
    }

    #[test]
    fn div_examples() {
        let c = ctx(7, 4);
        // 49c / 7 has valuation v(c) + 1
        let x = c.int(49 * 3).div(&c.int(7)).unwrap();
        assert_eq!(x.valuation(), Valuation::Finite(1));
        assert_eq!(x.value(), &BigInt::from(21));

        let c3 = ctx(7, 3);
        let q = c3.int(7).div(&c3.int(6)).unwrap();
        assert_eq!(q, c3.int(7).mul(&c3.int(6).invert().unwrap()).unwrap());
        assert_eq!(q.valuation(), Valuation::Finite(1));
        assert_eq!(q.prec(), 3);

        assert_eq!(
            c3.int(7).div(&c3.int(49)),
            Err(Error::DivisionByHigherValuation)
        );
    }

    #[test]
    fn division_precision_drops_by_divisor_valuation() {
        let c = ctx(7, 4);
        let q = c.int(49).div(&c.int(7)).unwrap();
        assert_eq!(q.prec(), 3);

        let lifted = c.int(1).truncate(1).unwrap().mul(&c.int(7)).unwrap();
        assert_eq!(lifted.prec(), 2);
        assert_eq!(lifted.div(&c.int(7)).unwrap().prec(), 1);

        // dividing away every certified digit is an error
        let one_digit = c.int(14).truncate(1).unwrap();
        assert!(matches!(
            one_digit.div(&c.int(7)),
            Err(Error::PrecisionExhausted(_))
        ));
    }

    #[test]
    fn valuation_norm_digit_examples() {
        let c = ctx(7, 4);
        assert_eq!(c.int(98).valuation(), Valuation::Finite(2));
        assert_eq!(c.int(0).valuation(), Valuation::AtLeast(4));
        assert_eq!(c.int(14).norm(), Ratio::new(BigInt::from(1), BigInt::from(7)));

        assert_eq!(c.int(10).digits(2).unwrap(), vec![3, 1]);
        assert_eq!(c.int(2166).digits(4).unwrap(), vec![3, 1, 2, 6]);
        assert_eq!(c.int(0).digits(3).unwrap(), vec![0, 0, 0]);
        assert_eq!(
            c.int(1).digits(5),
            Err(Error::InsufficientPrecision { needed: 5, have: 4 })
        );
    }

    #[test]
    fn valuation_comparisons_refuse_to_guess() {
        use Valuation::*;
        assert_eq!(Finite(1).try_cmp(&Finite(3)).unwrap(), Ordering::Less);
        assert_eq!(AtLeast(4).try_cmp(&Finite(2)).unwrap(), Ordering::Greater);
        assert!(AtLeast(2).try_cmp(&Finite(2)).is_err());
        assert!(AtLeast(2).try_cmp(&AtLeast(9)).is_err());
        assert!(Finite(1).try_gt(0).unwrap());
        assert!(AtLeast(3).try_gt(2).unwrap());
        assert!(AtLeast(3).try_gt(3).is_err());
    }

    #[test]
    fn context_mismatch_is_detected() {
        let a = ctx(7, 4).int(1);
        let b = ctx(5, 4).int(1);
        assert_eq!(a.add(&b), Err(Error::ContextMismatch));
        // equal parameters interoperate even across separately built contexts
        let c = ctx(7, 4).int(2);
        assert_eq!(a.add(&c).unwrap(), ctx(7, 4).int(3));
    }

    #[test]
    fn small_integer_lane_matches_bigint_lane() {
        let cb = ctx(7, 8);
        let cs = PadicContext::<i128>::new(7, 8).unwrap();
        let xb = cb.int(2166).mul(&cb.int(-5)).unwrap();
        let xs = cs.int(2166).mul(&cs.int(-5)).unwrap();
        assert_eq!(xb.value().to_i128().unwrap(), *xs.value());
        assert_eq!(xb.valuation(), xs.valuation());
    }
}
