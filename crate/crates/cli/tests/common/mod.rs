//! Shared helpers for the CLI and acceptance tests: an independent
//! digit-lifting oracle over plain integers, brute-force enumeration, and a
//! deterministic corpus of admissible instances.
#![allow(dead_code)]

use std::process::{Command, Output};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use padic_roots::poly::Poly;
use padic_roots::solver::{hensel_condition, HenselDecision};
use padic_roots::ZpContext;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_padic-roots")
}

pub fn run_cli(args: &[&str]) -> Output {
    Command::new(bin())
        .args(args)
        .output()
        .expect("binary runs")
}

pub fn stdout_json(out: &Output) -> serde_json::Value {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("valid json")
}

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

pub fn eval_int_poly(coeffs: &[i64], x: &BigInt) -> BigInt {
    let mut acc = BigInt::zero();
    for &c in coeffs.iter().rev() {
        acc = acc * x + BigInt::from(c);
    }
    acc
}

pub fn derive_int(coeffs: &[i64]) -> Vec<i64> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, &c)| k as i64 * c)
        .collect()
}

/// Digit-by-digit lifting of a simple residue root (unit derivative),
/// independent of the library arithmetic.
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

pub fn modinv(a: &BigInt, modulus: &BigInt) -> BigInt {
    let g = a.mod_floor(modulus).extended_gcd(modulus);
    assert!(g.gcd.is_one());
    g.x.mod_floor(modulus)
}

/// An admissible instance of the admission test, with the seed's
/// derivative valuation recorded.
#[derive(Debug, Clone)]
pub struct Instance {
    pub p: u64,
    pub coeffs: Vec<i64>,
    pub seed: i64,
    pub v_fprime: u32,
}

pub const CORPUS_PRIMES: [u64; 4] = [5, 7, 11, 13];

/// Deterministic corpus mixing unit-derivative seeds with weak seeds that
/// are double roots of the mod-p reduction.
pub fn corpus(minimum: usize) -> Vec<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_cafe);
    let mut out = Vec::new();

    // unit-derivative seeds from random polynomials
    'outer: for round in 0..400 {
        let p = CORPUS_PRIMES[round % CORPUS_PRIMES.len()];
        let degree = rng.gen_range(2..=6);
        let mut coeffs: Vec<i64> = (0..=degree).map(|_| rng.gen_range(-40..=40)).collect();
        let last = coeffs.last_mut().unwrap();
        if last.rem_euclid(p as i64) == 0 {
            *last += 1;
        }
        let ctx = ZpContext::new(p, 30).unwrap();
        let f = Poly::from_int_coeffs(&ctx, &coeffs);
        if f.degree().is_none_or(|d| d < 2) {
            continue;
        }
        for a in 0..p {
            if let Ok(HenselDecision::Accepted { v_fprime, .. }) =
                hensel_condition(&f, &ctx.int(a as i64))
            {
                out.push(Instance {
                    p,
                    coeffs: coeffs.clone(),
                    seed: a as i64,
                    v_fprime,
                });
                if out.len() >= minimum {
                    break 'outer;
                }
                break; // one seed per polynomial keeps the corpus varied
            }
        }
    }

    // weak seeds: f = (x - a)(x - b) with a = b mod p, seed a + p^2 t
    for round in 0..(minimum / 3).max(8) {
        let p = CORPUS_PRIMES[round % CORPUS_PRIMES.len()] as i64;
        let a = rng.gen_range(1..30i64);
        let mut u = rng.gen_range(1..10i64);
        if u.rem_euclid(p) == 0 {
            u += 1;
        }
        let b = a + p * u;
        let t = rng.gen_range(0..5i64);
        let coeffs = vec![a * b, -(a + b), 1];
        let seed = a + p * p * t;
        // v(f(seed)) = v(seed-a) + v(seed-b) >= 2 + 1, v(f'(seed)) = 1
        out.push(Instance {
            p: p as u64,
            coeffs,
            seed,
            v_fprime: 1,
        });
    }
    assert!(out.len() >= minimum, "corpus generation fell short");
    out
}
