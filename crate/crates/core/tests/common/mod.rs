//! Independent oracles for the integration tests. Everything here works on
//! plain `BigInt`/`BigRational` values so it shares no arithmetic with the
//! library code it checks.
#![allow(dead_code)]

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// p-adic valuation of an exact integer; `None` for zero.
pub fn vp_int(n: &BigInt, p: u64) -> Option<u32> {
    if n.is_zero() {
        return None;
    }
    let p = BigInt::from(p);
    let mut v = 0;
    let mut rest = n.clone();
    loop {
        let (q, r) = rest.div_rem(&p);
        if !r.is_zero() {
            return Some(v);
        }
        v += 1;
        rest = q;
    }
}

pub fn pow_int(p: u64, k: u32) -> BigInt {
    BigInt::from(p).pow(k)
}

/// Exact rational reduced mod p^k via extended Euclid; the reduced
/// denominator must be a unit.
pub fn rational_mod_pk(r: &BigRational, p: u64, k: u32) -> BigInt {
    let modulus = pow_int(p, k);
    let num = r.numer().mod_floor(&modulus);
    let den = r.denom().mod_floor(&modulus);
    assert!(
        !den.mod_floor(&BigInt::from(p)).is_zero(),
        "denominator must be a p-adic unit"
    );
    let gcd = den.extended_gcd(&modulus);
    assert!(gcd.gcd.is_one());
    (num * gcd.x).mod_floor(&modulus)
}

pub fn eval_int_poly(coeffs: &[i64], x: &BigInt) -> BigInt {
    let mut acc = BigInt::zero();
    for &c in coeffs.iter().rev() {
        acc = acc * x + BigInt::from(c);
    }
    acc
}

fn derive_int(coeffs: &[i64]) -> Vec<i64> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, &c)| k as i64 * c)
        .collect()
}

/// Digit-by-digit Hensel lifting of a simple residue root: returns the
/// unique root mod p^digits above `r0`. Requires `f'(r0)` to be a unit
/// mod p.
pub fn lift_root_digitwise(coeffs: &[i64], p: u64, r0: u64, digits: u32) -> BigInt {
    let deriv = derive_int(coeffs);
    let p_big = BigInt::from(p);
    let fp = eval_int_poly(&deriv, &BigInt::from(r0)).mod_floor(&p_big);
    assert!(!fp.is_zero(), "oracle needs a unit derivative");
    let inv = fp.extended_gcd(&p_big).x.mod_floor(&p_big);

    let mut root = BigInt::from(r0);
    for k in 1..digits {
        let pk = pow_int(p, k);
        let value = eval_int_poly(coeffs, &root).mod_floor(&pow_int(p, k + 1));
        let carry = (value / &pk).mod_floor(&p_big);
        let digit = (-&carry * &inv).mod_floor(&p_big);
        root += digit * pk;
    }
    let modulus = pow_int(p, digits);
    let root = root.mod_floor(&modulus);
    assert!(eval_int_poly(coeffs, &root).mod_floor(&modulus).is_zero());
    root
}

fn eval_rat(coeffs: &[BigRational], x: &BigRational) -> BigRational {
    let mut acc = BigRational::zero();
    for c in coeffs.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

fn derive_rat(coeffs: &[BigRational]) -> Vec<BigRational> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| c * BigRational::from_integer(BigInt::from(k)))
        .collect()
}

pub fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn rat_coeffs(coeffs: &[i64]) -> Vec<BigRational> {
    coeffs.iter().map(|&c| rat(c)).collect()
}

/// One exact-rational Newton step.
pub fn newton_step_rational(coeffs: &[BigRational], x: &BigRational) -> BigRational {
    let d1 = derive_rat(coeffs);
    x - eval_rat(coeffs, x) / eval_rat(&d1, x)
}

/// One exact-rational Olver step.
pub fn olver_step_rational(coeffs: &[BigRational], x: &BigRational) -> BigRational {
    let d1 = derive_rat(coeffs);
    let d2 = derive_rat(&d1);
    let v = eval_rat(coeffs, x);
    let d = eval_rat(&d1, x);
    let s = eval_rat(&d2, x);
    x - &v / &d - BigRational::new(1.into(), 2.into()) * &v * &v * s / (&d * &d * &d)
}

/// One exact-rational step of the fourth-order iteration.
pub fn sjm_step_rational(coeffs: &[BigRational], x: &BigRational) -> BigRational {
    let d1 = derive_rat(coeffs);
    let d2 = derive_rat(&d1);
    let d3 = derive_rat(&d2);
    let v = eval_rat(coeffs, x);
    let d = eval_rat(&d1, x);
    let s = eval_rat(&d2, x);
    let t = eval_rat(&d3, x);
    let den = rat(-6) * &d * &d * &d + rat(6) * &v * &d * s - rat(2) * &v * &v * t;
    x - BigRational::new(1.into(), 2.into()) * &v / &d + rat(3) * &v * &d * &d / den
}

/// All residues r in [0, p^k) with f(r) = 0 mod p^k, by brute force.
pub fn brute_roots_mod_pk(coeffs: &[i64], p: u64, k: u32) -> Vec<BigInt> {
    let modulus = pow_int(p, k);
    let mut out = Vec::new();
    let mut r = BigInt::zero();
    while r < modulus {
        if eval_int_poly(coeffs, &r).mod_floor(&modulus).is_zero() {
            out.push(r.clone());
        }
        r += 1;
    }
    out
}
