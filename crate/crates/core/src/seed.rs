//! Admissible-seed search by digit chains.
//!
//! When a residue root `a` of `f mod p` fails the admission inequality
//! `v(f(a)) > 2 v(f'(a))`, the substitution `F_{i+1}(x) = F_i(a_i + p x) / p^m`
//! (with `p^m` the coefficient content) walks one digit deeper: roots of
//! `F_{i+1}` are exactly `(gamma - a_i)/p` for roots `gamma` of `F_i` in the
//! residue class of `a_i`. On squarefree input every branch either dies
//! (no residue root extends the digits) or reaches a polynomial whose
//! residue root has a unit derivative, where the admission test trivially
//! holds.
//!
//! A node with `v(F'(a)) = 0` is a complete stop: its Hensel disc covers
//! the whole residue class. A node with `v(F'(a)) > 0` must keep expanding
//! even if the admission test already holds, because the disc
//! `v(x - a) > v(F'(a))` then misses part of the class and other roots may
//! hide there; such a node emits an early admissible seed when its value
//! valuation is decided, and the duplicate recoveries are removed at the
//! end.

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::padic::{PadicApprox, PadicContext, ResidueInt, Valuation};
use crate::poly::Poly;
use crate::solver::{self, Method, RootRecord};

/// Default cap on the chain depth; squarefree inputs terminate long before
/// this, the cap guards implementation bugs.
pub const DEFAULT_MAX_DEPTH: usize = 32;

/// An admissible leaf of the search tree: `poly` is the chain polynomial at
/// `depth`, `residue` its admissible residue root, `digits` the committed
/// digits `a_0 .. a_{depth-1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdmissibleSeed<I: ResidueInt> {
    pub depth: usize,
    pub poly: Poly<I>,
    pub residue: u64,
    pub digits: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SeedResult<I: ResidueInt> {
    Admissible(AdmissibleSeed<I>),
    /// The digit prefix cannot be extended: no residue root of the next
    /// chain polynomial exists.
    DeadEnd { digits: Vec<u64> },
    /// The depth cap fired before the branch resolved.
    DepthExceeded { digits: Vec<u64> },
}

/// `G(x) = F(a + p x) / p^m` with `m` the content exponent of the shifted
/// polynomial.
pub fn thurston_transform<I: ResidueInt>(f: &Poly<I>, a: u64) -> Result<Poly<I>> {
    let ctx = f.context();
    let residue = ctx.int(a as i64);
    let value = f.eval(&residue)?;
    if !value.valuation().known_ge(1) {
        return Err(Error::Precondition("a must be a root of F mod p"));
    }
    let shifted = f.taylor_shift(&residue, 1)?;
    Ok(shifted.strip_content()?.0)
}

/// Depth-first digit-chain search below the residue root `a0` of `f mod p`.
///
/// Requires squarefree input (checked through the gcd); every leaf is
/// reported, dead ends and depth overruns included.
pub fn thurston_search<I: ResidueInt>(
    f: &Poly<I>,
    a0: u64,
    max_depth: usize,
) -> Result<Vec<SeedResult<I>>> {
    let gcd = f.gcd(&f.derivative(1))?;
    if gcd.degree() != Some(0) {
        return Err(Error::NotSquarefree);
    }
    let ctx = f.context();
    if !f
        .eval(&ctx.int(a0 as i64))?
        .valuation()
        .known_ge(1)
    {
        return Err(Error::Precondition("a0 must be a root of f mod p"));
    }
    let mut out = Vec::new();
    explore(f, a0, Vec::new(), max_depth, &mut out)?;
    Ok(out)
}

fn explore<I: ResidueInt>(
    poly: &Poly<I>,
    residue: u64,
    digits: Vec<u64>,
    max_depth: usize,
    out: &mut Vec<SeedResult<I>>,
) -> Result<()> {
    let ctx = poly.context();
    let at = ctx.int(residue as i64);
    let v_fprime = poly.derivative(1).eval(&at)?.valuation();
    let v_f = poly.eval(&at)?.valuation();

    if v_fprime == Valuation::Finite(0) {
        // unit derivative: the Hensel disc is the whole residue class
        out.push(SeedResult::Admissible(AdmissibleSeed {
            depth: digits.len(),
            poly: poly.clone(),
            residue,
            digits,
        }));
        return Ok(());
    }

    // positive derivative valuation: the disc is a proper subset of the
    // class, so the chain keeps digging; a decided value valuation that
    // already satisfies the admission test yields an early seed as well
    if let (Valuation::Finite(vf), Valuation::Finite(vp)) = (v_f, v_fprime) {
        if vf > 2 * vp {
            out.push(SeedResult::Admissible(AdmissibleSeed {
                depth: digits.len(),
                poly: poly.clone(),
                residue,
                digits: digits.clone(),
            }));
        }
    }

    let mut digits = digits;
    digits.push(residue);
    if digits.len() > max_depth {
        out.push(SeedResult::DepthExceeded { digits });
        return Ok(());
    }
    let next = thurston_transform(poly, residue)?;
    let roots = next.roots_mod_p()?;
    if roots.is_empty() {
        out.push(SeedResult::DeadEnd { digits });
        return Ok(());
    }
    for r in roots {
        explore(&next, r, digits.clone(), max_depth, out)?;
    }
    Ok(())
}

/// A ready-to-solve subproblem together with its digit reassembly.
#[derive(Debug, Clone)]
pub struct SeedProblem<I: ResidueInt> {
    pub poly: Poly<I>,
    pub x1: PadicApprox<I>,
    pub digits: Vec<u64>,
}

impl<I: ResidueInt> SeedProblem<I> {
    /// `gamma = sum digits[i] p^i + gamma_n p^n`.
    pub fn reassemble(&self, gamma_n: &PadicApprox<I>) -> Result<PadicApprox<I>> {
        let ctx = self.poly.context();
        let mut acc = gamma_n.clone();
        for &d in self.digits.iter().rev() {
            acc = acc
                .mul(&ctx.element(ctx.pow(1)))?
                .add(&ctx.int(d as i64))?;
        }
        Ok(acc)
    }

    /// The digit approximation the subproblem seed corresponds to, as an
    /// element: `sum digits[i] p^i + residue p^n`.
    pub fn seed_element(&self) -> Result<PadicApprox<I>> {
        self.reassemble(&self.x1)
    }
}

pub fn recover_seed<I: ResidueInt>(seed: &AdmissibleSeed<I>) -> SeedProblem<I> {
    let ctx = seed.poly.context();
    SeedProblem {
        poly: seed.poly.clone(),
        x1: ctx.int(seed.residue as i64),
        digits: seed.digits.clone(),
    }
}

/// A branch the all-roots pipeline could not resolve.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BranchIssue {
    DepthExceeded { digits: Vec<u64> },
    Failed { digits: Vec<u64>, error: Error },
}

#[derive(Debug, Clone)]
pub struct RootsOutcome<I: ResidueInt> {
    pub roots: Vec<RootRecord<I>>,
    pub issues: Vec<BranchIssue>,
}

/// All simple-root liftings of `f` in Z_p, certified to `target_prec`.
///
/// Reduces to the squarefree part, walks the digit chain below every
/// residue root, solves each admissible leaf with the Jarratt iteration and
/// reassembles. Roots agreeing mod `p^target_prec` are deduplicated; the
/// result is sorted by residue.
pub fn find_all_roots<I: ResidueInt>(f: &Poly<I>, target_prec: u32) -> Result<RootsOutcome<I>> {
    find_all_roots_with_depth(f, target_prec, DEFAULT_MAX_DEPTH)
}

pub fn find_all_roots_with_depth<I: ResidueInt>(
    f: &Poly<I>,
    target_prec: u32,
    max_depth: usize,
) -> Result<RootsOutcome<I>> {
    let ctx = f.context();
    if ctx.prime_u64() <= 3 {
        return Err(Error::PrimeTooSmall(ctx.prime_u64()));
    }
    let reduced = f.squarefree_part()?;
    let f1 = reduced.derivative(1);
    let mut found: Vec<RootRecord<I>> = Vec::new();
    let mut issues = Vec::new();

    for a0 in reduced.roots_mod_p()? {
        for leaf in thurston_search(&reduced, a0, max_depth)? {
            let seed = match leaf {
                SeedResult::Admissible(seed) => seed,
                SeedResult::DeadEnd { .. } => continue,
                SeedResult::DepthExceeded { digits } => {
                    issues.push(BranchIssue::DepthExceeded { digits });
                    continue;
                }
            };
            let problem = recover_seed(&seed);
            let mut digits_with_residue = problem.digits.clone();
            digits_with_residue.push(seed.residue);
            match lift_leaf(&reduced, &f1, &problem, target_prec) {
                Ok(record) => found.push(record),
                Err(error) => issues.push(BranchIssue::Failed {
                    digits: digits_with_residue,
                    error,
                }),
            }
        }
    }

    // duplicates arise from early seeds whose disc the deeper leaves
    // revisit; sorting by the target-precision residue makes them adjacent
    let modulus = ctx.pow(target_prec);
    found.sort_by_key(|r| r.gamma.value().mod_floor(&modulus));
    let mut roots: Vec<RootRecord<I>> = Vec::new();
    for rec in found {
        let dup = match roots.last() {
            Some(prev) => prev.gamma.congruent_to(&rec.gamma, target_prec)?,
            None => false,
        };
        if !dup {
            roots.push(rec);
        }
    }
    Ok(RootsOutcome { roots, issues })
}

/// Solves one admissible leaf and re-certifies the reassembled root against
/// the squarefree polynomial.
fn lift_leaf<I: ResidueInt>(
    reduced: &Poly<I>,
    f1: &Poly<I>,
    problem: &SeedProblem<I>,
    target_prec: u32,
) -> Result<RootRecord<I>> {
    let sub = solver::solve(&problem.poly, &problem.x1, Method::Sjm, target_prec)?;
    let gamma = problem.reassemble(&sub.gamma)?;
    let seed = problem.seed_element()?;

    let certified = reduced.eval(&gamma)?.valuation();
    if !certified.known_ge(target_prec) {
        return Err(Error::PrecisionExhausted(
            "reassembled root missed the requested certificate".into(),
        ));
    }
    let v_fprime_at_root = match f1.eval(&gamma)?.valuation() {
        Valuation::Finite(v) => v,
        Valuation::AtLeast(_) => {
            return Err(Error::PrecisionExhausted(
                "f'(gamma) is indistinguishable from zero at working precision".into(),
            ))
        }
    };
    Ok(RootRecord {
        gamma,
        prec_certified: certified.lower_bound(),
        v_fprime_at_root,
        seed,
        trace: sub.trace,
    })
}

/// All-roots from exact rational coefficients with automatic working
/// precision, doubling the guard while precision errors persist.
pub fn all_roots_adaptive(
    coeffs: &[BigRational],
    p: u64,
    target_prec: u32,
    max_depth: usize,
) -> Result<RootsOutcome<BigInt>> {
    let mut guard = 16u32;
    let mut last = Error::PrecisionExhausted("adaptive retries exhausted".into());
    for _ in 0..solver::PRECISION_RETRIES {
        let ctx = PadicContext::<BigInt>::new(p, target_prec.saturating_add(guard))?;
        let f = Poly::from_rationals(&ctx, coeffs)?;
        match find_all_roots_with_depth(&f, target_prec, max_depth) {
            Err(e @ Error::PrecisionExhausted(_)) => {
                last = e;
                guard = guard.saturating_mul(2);
            }
            Ok(outcome)
                if outcome
                    .issues
                    .iter()
                    .any(|i| matches!(i, BranchIssue::Failed { error: Error::PrecisionExhausted(_), .. })) =>
            {
                last = Error::PrecisionExhausted("branch ran out of precision".into());
                guard = guard.saturating_mul(2);
            }
            other => return other,
        }
    }
    Err(last)
}
