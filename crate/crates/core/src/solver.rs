//! The p-adic iterations and the solve driver.
//!
//! Three methods lift an admissible seed to a root: Newton (order 2),
//! Olver (order 3) and a simplified Jarratt iteration
//!
//! ```text
//! x' = x - (1/2) f/f' + 3 f f'^2 / (-6 f'^3 + 6 f f' f'' - 2 f^2 f''')
//! ```
//!
//! of order 4. A seed `x1` is admissible when `|f(x1)|_p < |f'(x1)|_p^2`,
//! i.e. `v(f(x1)) > 2 v(f'(x1))`; that is weaker than requiring `x1` to be
//! a simple root of `f mod p`, so multiple roots of the congruence are
//! acceptable starting points. The driver certifies the generalized Hensel
//! properties of the result: the root stays inside the disc
//! `v(gamma - x1) > v(f'(x1))` and `v(f'(gamma)) = v(f'(x1))`.

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::Float;

use crate::error::{Error, Result};
use crate::padic::{PadicApprox, PadicContext, ResidueInt, Valuation};
use crate::poly::Poly;

/// Hard step budget; the quartic digit growth makes this unreachable except
/// on bugs.
pub const MAX_STEPS: u32 = 64;

/// Retry budget of the adaptive drivers.
pub const PRECISION_RETRIES: u32 = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Newton,
    Olver,
    Sjm,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::Newton => "newton",
            Method::Olver => "olver",
            Method::Sjm => "sjm",
        }
    }

    /// Exponent base of the per-step value-valuation growth. Proven for the
    /// Jarratt iteration; a monitoring heuristic for the other two.
    pub fn exponent_base(&self) -> u32 {
        match self {
            Method::Newton => 2,
            Method::Olver => 3,
            Method::Sjm => 4,
        }
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "newton" => Ok(Method::Newton),
            "olver" => Ok(Method::Olver),
            "sjm" => Ok(Method::Sjm),
            other => Err(Error::Parse(format!(
                "unknown method `{other}` (expected newton, olver or sjm)"
            ))),
        }
    }
}

/// One accepted iterate with the valuations observed at it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceEntry<I: ResidueInt> {
    pub n: usize,
    pub x: PadicApprox<I>,
    pub v_f: Valuation,
    pub v_fprime: u32,
    /// Valuation of `x - gamma`, filled once the root is known.
    pub v_e: Option<Valuation>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IterationTrace<I: ResidueInt> {
    pub method: Method,
    pub entries: Vec<TraceEntry<I>>,
    /// `v(f(x1)) - 2 v(f'(x1))`, at least 1 for an accepted seed.
    pub t_v: u32,
}

impl<I: ResidueInt> IterationTrace<I> {
    /// Fills the post-hoc error valuations against a known root.
    pub fn fill_error_valuations(&mut self, gamma: &PadicApprox<I>) -> Result<()> {
        for entry in &mut self.entries {
            entry.v_e = Some(entry.x.sub(gamma)?.valuation());
        }
        Ok(())
    }
}

/// A certified root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootRecord<I: ResidueInt> {
    pub gamma: PadicApprox<I>,
    /// `f(gamma)` has valuation at least this.
    pub prec_certified: u32,
    pub v_fprime_at_root: u32,
    pub seed: PadicApprox<I>,
    pub trace: IterationTrace<I>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HenselDecision {
    Accepted { t_v: u32, v_fprime: u32 },
    Rejected { v_f: Valuation, v_fprime: u32 },
}

/// The admission test `v(f(x1)) > 2 v(f'(x1))`.
///
/// An exact-zero residue for `f(x1)` accepts whenever its precision bound
/// exceeds `2 v(f')`; a bound too weak to decide is a precision error, not
/// a rejection.
pub fn hensel_condition<I: ResidueInt>(
    f: &Poly<I>,
    x1: &PadicApprox<I>,
) -> Result<HenselDecision> {
    let fx = f.eval(x1)?;
    let f1x = f.derivative(1).eval(x1)?;
    let v_fprime = match f1x.valuation() {
        Valuation::Finite(v) => v,
        Valuation::AtLeast(_) => {
            return Err(Error::PrecisionExhausted(
                "f'(x1) is indistinguishable from zero at working precision".into(),
            ))
        }
    };
    let v_f = fx.valuation();
    if v_f.try_gt(2 * v_fprime)? {
        Ok(HenselDecision::Accepted {
            t_v: v_f.lower_bound() - 2 * v_fprime,
            v_fprime,
        })
    } else {
        Ok(HenselDecision::Rejected { v_f, v_fprime })
    }
}

pub fn newton_step<I: ResidueInt>(
    f: &Poly<I>,
    x: &PadicApprox<I>,
) -> Result<PadicApprox<I>> {
    let fx = f.eval(x)?;
    let f1x = f.derivative(1).eval(x)?;
    x.sub(&fx.div(&f1x)?)
}

/// `x - f/f' - (1/2) f^2 f'' / f'^3`.
pub fn olver_step<I: ResidueInt>(
    f: &Poly<I>,
    x: &PadicApprox<I>,
) -> Result<PadicApprox<I>> {
    let ctx = f.context();
    let fx = f.eval(x)?;
    let f1x = f.derivative(1).eval(x)?;
    let f2x = f.derivative(2).eval(x)?;
    let half = ctx.rational_i64(1, 2)?;
    let cube = f1x.mul(&f1x)?.mul(&f1x)?;
    let correction = half.mul(&fx.mul(&fx)?.mul(&f2x)?.div(&cube)?)?;
    x.sub(&fx.div(&f1x)?)?.sub(&correction)
}

/// One simplified Jarratt step.
///
/// The denominator must have valuation exactly `3 v(f'(x))`; under the
/// admission inequality its `-6 f'^3` term strictly dominates the others,
/// so any other outcome signals exhausted precision or a violated
/// precondition.
pub fn sjm_step<I: ResidueInt>(f: &Poly<I>, x: &PadicApprox<I>) -> Result<PadicApprox<I>> {
    let ctx = f.context();
    if ctx.prime_u64() <= 3 {
        return Err(Error::PrimeTooSmall(ctx.prime_u64()));
    }
    let fx = f.eval(x)?;
    let f1x = f.derivative(1).eval(x)?;
    let f2x = f.derivative(2).eval(x)?;
    let f3x = f.derivative(3).eval(x)?;

    let v_fprime = match f1x.valuation() {
        Valuation::Finite(v) => v,
        Valuation::AtLeast(_) => {
            return Err(Error::PrecisionExhausted(
                "f'(x) is indistinguishable from zero at working precision".into(),
            ))
        }
    };

    let f1_sq = f1x.mul(&f1x)?;
    let f1_cu = f1_sq.mul(&f1x)?;
    let den = ctx
        .int(-6)
        .mul(&f1_cu)?
        .add(&ctx.int(6).mul(&fx)?.mul(&f1x)?.mul(&f2x)?)?
        .add(&ctx.int(-2).mul(&fx)?.mul(&fx)?.mul(&f3x)?)?;

    let expected = 3 * v_fprime;
    match den.valuation() {
        Valuation::Finite(v) if v == expected => {}
        found => {
            return Err(Error::DenominatorValuationUnexpected { expected, found });
        }
    }

    let half_quot = ctx.rational_i64(1, 2)?.mul(&fx.div(&f1x)?)?;
    let last = ctx.int(3).mul(&fx)?.mul(&f1_sq)?.div(&den)?;
    x.sub(&half_quot)?.add(&last)
}

fn step<I: ResidueInt>(
    f: &Poly<I>,
    x: &PadicApprox<I>,
    method: Method,
) -> Result<PadicApprox<I>> {
    match method {
        Method::Newton => newton_step(f, x),
        Method::Olver => olver_step(f, x),
        Method::Sjm => sjm_step(f, x),
    }
}

/// Checks the increment bound `|B|_p <= |f(A)/f'(A)|_p`, with `B` built
/// from the Taylor form
///
/// ```text
/// M = f'(A) - (2/3) (f/f') f'' + (2/9) (f/f')^2 f'''
/// B = -(1/2) f/f' + 3 f / (f' - 3M)
/// ```
///
/// Requires `p > 3` and `v(f(A)) > 2 v(f'(A))`. A correct implementation
/// always returns `true`; the boolean is exposed so the property is a
/// direct transcription of the bound.
pub fn increment_bound_check<I: ResidueInt>(f: &Poly<I>, a: &PadicApprox<I>) -> Result<bool> {
    let ctx = f.context();
    if ctx.prime_u64() <= 3 {
        return Err(Error::PrimeTooSmall(ctx.prime_u64()));
    }
    let fx = f.eval(a)?;
    let f1x = f.derivative(1).eval(a)?;
    let f2x = f.derivative(2).eval(a)?;
    let f3x = f.derivative(3).eval(a)?;

    let v_fprime = match f1x.valuation() {
        Valuation::Finite(v) => v,
        Valuation::AtLeast(_) => {
            return Err(Error::PrecisionExhausted(
                "f'(A) is indistinguishable from zero at working precision".into(),
            ))
        }
    };
    if !fx.valuation().try_gt(2 * v_fprime)? {
        return Err(Error::Precondition("|f(A)/f'(A)^2|_p < 1 required"));
    }

    let quot = fx.div(&f1x)?;
    let m = f1x
        .sub(&ctx.rational_i64(2, 3)?.mul(&quot)?.mul(&f2x)?)?
        .add(&ctx.rational_i64(2, 9)?.mul(&quot.mul(&quot)?)?.mul(&f3x)?)?;
    let den = f1x.sub(&ctx.int(3).mul(&m)?)?;
    let b = ctx
        .int(3)
        .mul(&fx)?
        .div(&den)?
        .sub(&ctx.rational_i64(1, 2)?.mul(&quot)?)?;

    let bound = fx.valuation().lower_bound() - v_fprime;
    match b.valuation() {
        v if v.known_ge(bound) => Ok(true),
        Valuation::Finite(_) => Ok(false),
        Valuation::AtLeast(_) => Err(Error::PrecisionExhausted(
            "increment valuation undecidable against the bound".into(),
        )),
    }
}

/// Lifts an admissible seed to a root with `v(f(gamma)) >= target_prec`.
///
/// Stops when the value valuation reaches the target or the iterate goes
/// stationary mod `p^target_prec`; verifies the generalized Hensel
/// certificate before returning.
pub fn solve<I: ResidueInt>(
    f: &Poly<I>,
    x1: &PadicApprox<I>,
    method: Method,
    target_prec: u32,
) -> Result<RootRecord<I>> {
    let ctx = f.context();
    if target_prec == 0 {
        return Err(Error::ZeroPrecision);
    }
    if target_prec > ctx.work_prec() {
        return Err(Error::PrecisionExhausted(format!(
            "working precision {} cannot certify target {}",
            ctx.work_prec(),
            target_prec
        )));
    }
    if method != Method::Newton && ctx.prime_u64() <= 3 {
        return Err(Error::PrimeTooSmall(ctx.prime_u64()));
    }

    let (t_v, v1) = match hensel_condition(f, x1)? {
        HenselDecision::Accepted { t_v, v_fprime } => (t_v, v_fprime),
        HenselDecision::Rejected { v_f, v_fprime } => {
            return Err(Error::SeedRejected { v_f, v_fprime })
        }
    };

    let f1 = f.derivative(1);
    let mut entries = Vec::new();
    let mut x = x1.clone();
    let mut gamma = None;

    for n in 1..=MAX_STEPS {
        let v_f = f.eval(&x)?.valuation();
        let v_fprime = match f1.eval(&x)?.valuation() {
            Valuation::Finite(v) => v,
            Valuation::AtLeast(_) => {
                return Err(Error::PrecisionExhausted(
                    "f'(x_n) is indistinguishable from zero at working precision".into(),
                ))
            }
        };
        entries.push(TraceEntry {
            n: n as usize,
            x: x.clone(),
            v_f,
            v_fprime,
            v_e: None,
        });
        if v_f.known_ge(target_prec) {
            gamma = Some(x);
            break;
        }
        let next = step(f, &x, method)?;
        if next.prec() >= target_prec
            && x.prec() >= target_prec
            && next.congruent_to(&x, target_prec)?
        {
            // stationary without a certificate: the remaining digits are
            // beyond what this working precision can reach
            if !f.eval(&next)?.valuation().known_ge(target_prec) {
                return Err(Error::PrecisionExhausted(
                    "iteration went stationary below the requested certificate".into(),
                ));
            }
        }
        x = next;
    }

    let gamma = gamma.ok_or(Error::NonConvergence(MAX_STEPS))?;

    // generalized Hensel certificate
    if !gamma.sub(x1)?.valuation().try_gt(v1)? {
        return Err(Error::InvariantViolated {
            step: entries.len(),
            what: format!("v(gamma - x1) must exceed v(f'(x1)) = {v1}"),
        });
    }
    match f1.eval(&gamma)?.valuation() {
        Valuation::Finite(v) if v == v1 => {}
        found => {
            return Err(Error::InvariantViolated {
                step: entries.len(),
                what: format!("v(f'(gamma)) = {found}, expected {v1}"),
            })
        }
    }
    let prec_certified = entries.last().expect("nonempty trace").v_f.lower_bound();

    Ok(RootRecord {
        gamma,
        prec_certified,
        v_fprime_at_root: v1,
        seed: x1.clone(),
        trace: IterationTrace {
            method,
            entries,
            t_v,
        },
    })
}

/// Outcome of replaying the per-step value and derivative conditions on a trace.
///
/// Condition (2) is `v(f'(x_n)) = v(f'(x_1))`; condition (3) is
/// `v(f(x_n)) >= 2 v(f'(x_1)) + base^(n-1) * t_v` with base 4 for the
/// Jarratt iteration (bases 2 and 3 for Newton/Olver are heuristics, not
/// guarantees). Comparisons the working precision cannot decide are listed
/// as undecided rather than counted as violations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvariantReport {
    /// Iterates are representable elements of Z_p by construction.
    pub cond1: bool,
    pub exponent_base: u32,
    pub heuristic: bool,
    pub cond2_violations: Vec<usize>,
    pub cond2_undecided: Vec<usize>,
    pub cond3_violations: Vec<usize>,
    pub cond3_undecided: Vec<usize>,
}

impl InvariantReport {
    pub fn cond2_ok(&self) -> bool {
        self.cond2_violations.is_empty()
    }

    pub fn cond3_ok(&self) -> bool {
        self.cond3_violations.is_empty()
    }

    pub fn ok(&self) -> bool {
        self.cond2_ok() && self.cond3_ok()
    }

    /// First decided violation as an error.
    pub fn check(&self) -> Result<()> {
        if let Some(&n) = self.cond2_violations.first() {
            return Err(Error::InvariantViolated {
                step: n,
                what: "v(f'(x_n)) differs from v(f'(x_1))".into(),
            });
        }
        if let Some(&n) = self.cond3_violations.first() {
            return Err(Error::InvariantViolated {
                step: n,
                what: "v(f(x_n)) fell below 2 v(f'(x_1)) + base^(n-1) t_v".into(),
            });
        }
        Ok(())
    }
}

/// Re-evaluates `f` and `f'` at every recorded iterate and checks the
/// per-step conditions against the trace's `t_v`.
pub fn monitor_invariants<I: ResidueInt>(
    trace: &IterationTrace<I>,
    f: &Poly<I>,
) -> Result<InvariantReport> {
    let first = trace.entries.first().ok_or(Error::InsufficientTrace)?;
    let f1 = f.derivative(1);
    let v1 = match f1.eval(&first.x)?.valuation() {
        Valuation::Finite(v) => v,
        Valuation::AtLeast(_) => {
            return Err(Error::PrecisionExhausted(
                "f'(x_1) is indistinguishable from zero at working precision".into(),
            ))
        }
    };
    let base = trace.method.exponent_base() as u64;
    let mut report = InvariantReport {
        cond1: true,
        exponent_base: trace.method.exponent_base(),
        heuristic: trace.method != Method::Sjm,
        cond2_violations: Vec::new(),
        cond2_undecided: Vec::new(),
        cond3_violations: Vec::new(),
        cond3_undecided: Vec::new(),
    };
    for entry in &trace.entries {
        match f1.eval(&entry.x)?.valuation() {
            Valuation::Finite(v) if v == v1 => {}
            Valuation::Finite(_) => report.cond2_violations.push(entry.n),
            // a zero residue bounded above v1 is a decided difference
            Valuation::AtLeast(k) if k > v1 => report.cond2_violations.push(entry.n),
            Valuation::AtLeast(_) => report.cond2_undecided.push(entry.n),
        }
        let growth = base
            .checked_pow(entry.n.saturating_sub(1) as u32)
            .unwrap_or(u64::MAX)
            .saturating_mul(trace.t_v as u64);
        let bound = (2 * v1 as u64).saturating_add(growth);
        match f.eval(&entry.x)?.valuation() {
            Valuation::Finite(v) if (v as u64) >= bound => {}
            Valuation::Finite(_) => report.cond3_violations.push(entry.n),
            Valuation::AtLeast(k) if (k as u64) >= bound => {}
            Valuation::AtLeast(_) => report.cond3_undecided.push(entry.n),
        }
    }
    Ok(report)
}

/// Last decidable ratio `v(e_{n+1}) / v(e_n)` along the trace.
pub fn order_estimate<I: ResidueInt>(
    trace: &IterationTrace<I>,
    gamma: &PadicApprox<I>,
) -> Result<Ratio<u64>> {
    let mut finite = Vec::new();
    for entry in &trace.entries {
        match entry.x.sub(gamma)?.valuation() {
            Valuation::Finite(v) => finite.push(v as u64),
            // iterates indistinguishable from the root end the usable prefix
            Valuation::AtLeast(_) => break,
        }
    }
    if finite.len() < 3 {
        return Err(Error::InsufficientTrace);
    }
    let last = finite[finite.len() - 1];
    let prev = finite[finite.len() - 2];
    if prev == 0 {
        return Err(Error::InsufficientTrace);
    }
    Ok(Ratio::new(last, prev))
}

/// Asymptotic constant of the real-number order-4 limit:
/// `rho = (9 c3 c2 - 6 c2^3 - 5 c4) / 2` with
/// `c_k = f^(k)(gamma) / (k! f'(gamma))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RhoConstant<F> {
    pub c2: F,
    pub c3: F,
    pub c4: F,
    pub rho: F,
}

impl<F: Float> RhoConstant<F> {
    pub fn new(c2: F, c3: F, c4: F) -> Self {
        let f = |x: f64| F::from(x).expect("small constant fits");
        let rho = (f(9.0) * c3 * c2 - f(6.0) * c2 * c2 * c2 - f(5.0) * c4) / f(2.0);
        RhoConstant { c2, c3, c4, rho }
    }

    /// From the derivative values `f'(gamma) .. f''''(gamma)`.
    pub fn from_derivatives(f1: F, f2: F, f3: F, f4: F) -> Self {
        let f = |x: f64| F::from(x).expect("small constant fits");
        Self::new(f2 / (f(2.0) * f1), f3 / (f(6.0) * f1), f4 / (f(24.0) * f1))
    }
}

/// Recommended working precision for a target certificate.
pub fn plan_work_prec(target_prec: u32, v_fprime: u32) -> u32 {
    target_prec + 6 * v_fprime + 8
}

/// Solves from exact rational coefficients, sizing the working precision
/// automatically and retrying with a doubled guard when precision runs out.
pub fn solve_adaptive(
    coeffs: &[BigRational],
    p: u64,
    seed: &BigInt,
    method: Method,
    target_prec: u32,
) -> Result<RootRecord<BigInt>> {
    let mut guard = 8u32;
    let probe_ctx = PadicContext::<BigInt>::new(p, target_prec.saturating_add(guard))?;
    let probe_poly = Poly::from_rationals(&probe_ctx, coeffs)?;
    let probe_seed = probe_ctx.element(seed.clone());
    if let Ok(HenselDecision::Accepted { v_fprime, .. }) =
        hensel_condition(&probe_poly, &probe_seed)
    {
        guard = plan_work_prec(0, v_fprime).max(guard);
    }

    let mut last = Error::PrecisionExhausted("adaptive retries exhausted".into());
    for _ in 0..PRECISION_RETRIES {
        let ctx = PadicContext::<BigInt>::new(p, target_prec.saturating_add(guard))?;
        let f = Poly::from_rationals(&ctx, coeffs)?;
        let x1 = ctx.element(seed.clone());
        match solve(&f, &x1, method, target_prec) {
            Err(e @ Error::PrecisionExhausted(_)) => {
                last = e;
                guard = guard.saturating_mul(2);
            }
            other => return other,
        }
    }
    Err(last)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use crate::poly::Poly;

    fn ctx(p: u64, n: u32) -> PadicContext<BigInt> {
        PadicContext::new(p, n).unwrap()
    }

    fn sqrt2_poly(c: &PadicContext<BigInt>) -> Poly<BigInt> {
        Poly::from_int_coeffs(c, &[-2, 0, 1])
    }

    #[test]
    fn hensel_examples() {
        let c5 = ctx(5, 12);
        let f = Poly::from_int_coeffs(&c5, &[6, -7, 1]);
        assert_eq!(
            hensel_condition(&f, &c5.int(31)).unwrap(),
            HenselDecision::Accepted { t_v: 1, v_fprime: 1 }
        );
        assert_eq!(
            hensel_condition(&f, &c5.int(11)).unwrap(),
            HenselDecision::Rejected {
                v_f: Valuation::Finite(2),
                v_fprime: 1
            }
        );

        let c7 = ctx(7, 6);
        let x = Poly::from_int_coeffs(&c7, &[0, 1]);
        assert_eq!(
            hensel_condition(&x, &c7.int(0)).unwrap(),
            HenselDecision::Accepted { t_v: 6, v_fprime: 0 }
        );
    }

    #[test]
    fn newton_step_examples() {
        let c = ctx(7, 8);
        let f = sqrt2_poly(&c);
        let x2 = newton_step(&f, &c.int(3)).unwrap();
        assert!(x2.congruent_to(&c.int(10), 2).unwrap());
        // 3 - 7/6 = 11/6, exactly
        assert_eq!(x2, c.rational_i64(11, 6).unwrap());

        let lin = Poly::from_int_coeffs(&c, &[-9, 1]);
        let hit = newton_step(&lin, &c.int(3)).unwrap();
        assert!(hit.congruent_to(&c.int(9), 8).unwrap());
    }

    #[test]
    fn olver_step_examples() {
        let c = ctx(7, 8);
        let f = sqrt2_poly(&c);
        let x2 = olver_step(&f, &c.int(3)).unwrap();
        // exact rational value 347/216
        assert_eq!(x2, c.rational_i64(347, 216).unwrap());
        assert!(x2.congruent_to(&c.int(108), 3).unwrap());

        let lin = Poly::from_int_coeffs(&c, &[-9, 1]);
        assert!(olver_step(&lin, &c.int(3))
            .unwrap()
            .congruent_to(&c.int(9), 8)
            .unwrap());

        let c5 = ctx(5, 12);
        let g = Poly::from_int_coeffs(&c5, &[6, -7, 1]);
        let y = olver_step(&g, &c5.int(31)).unwrap();
        assert!(y.congruent_to(&c5.int(6), 3).unwrap());
    }

    #[test]
    fn sjm_step_examples() {
        let c = ctx(7, 8);
        let f = sqrt2_poly(&c);
        let x2 = sjm_step(&f, &c.int(3)).unwrap();
        // exact rational value 193/132, four correct digits of sqrt(2)
        assert_eq!(x2, c.rational_i64(193, 132).unwrap());
        assert!(x2.congruent_to(&c.int(2166), 4).unwrap());

        let lin = Poly::from_int_coeffs(&c, &[-9, 1]);
        assert!(sjm_step(&lin, &c.int(3))
            .unwrap()
            .congruent_to(&c.int(9), 7)
            .unwrap());

        // v(f'(gamma)) = 1 here, so the error contracts by 4 v(e) - 3
        let c5 = ctx(5, 14);
        let g = Poly::from_int_coeffs(&c5, &[6, -7, 1]);
        let x2 = sjm_step(&g, &c5.int(31)).unwrap();
        let e2 = x2.sub(&c5.int(6)).unwrap();
        assert_eq!(e2.valuation(), Valuation::Finite(5));
    }

    #[test]
    fn sjm_denominator_valuation_is_three_v_fprime() {
        let c5 = ctx(5, 14);
        let g = Poly::from_int_coeffs(&c5, &[6, -7, 1]);
        // seed with v(f') = 1: denominator valuation must be exactly 3
        let fx = g.eval(&c5.int(31)).unwrap();
        assert_eq!(fx.valuation(), Valuation::Finite(3));
        assert!(sjm_step(&g, &c5.int(31)).is_ok());

        // rejected seed violates the dominance and the step reports it
        let bad = sjm_step(&g, &c5.int(11));
        assert!(matches!(
            bad,
            Err(Error::DenominatorValuationUnexpected { expected: 3, .. })
        ));
    }

    #[test]
    fn sjm_rejects_small_primes() {
        let c3 = ctx(3, 8);
        let f = Poly::from_int_coeffs(&c3, &[-4, 0, 1]);
        assert_eq!(sjm_step(&f, &c3.int(1)), Err(Error::PrimeTooSmall(3)));
    }

    #[test]
    fn increment_bound_examples() {
        let c = ctx(7, 10);
        assert!(increment_bound_check(&sqrt2_poly(&c), &c.int(3)).unwrap());

        let c5 = ctx(5, 12);
        let g = Poly::from_int_coeffs(&c5, &[6, -7, 1]);
        assert!(increment_bound_check(&g, &c5.int(31)).unwrap());

        let lin = Poly::from_int_coeffs(&c, &[-9, 1]);
        assert!(increment_bound_check(&lin, &c.int(9 + 7)).unwrap());

        assert_eq!(
            increment_bound_check(&g, &c5.int(11)),
            Err(Error::Precondition("|f(A)/f'(A)^2|_p < 1 required"))
        );
    }

    #[test]
    fn solve_sqrt2_examples() {
        let c = ctx(7, 24);
        let f = sqrt2_poly(&c);
        let rec = solve(&f, &c.int(3), Method::Sjm, 4).unwrap();
        assert!(rec.gamma.congruent_to(&c.int(2166), 4).unwrap());
        assert_eq!(rec.trace.entries.len(), 2); // seed plus one step
        assert!(rec.prec_certified >= 4);

        let rec16 = solve(&f, &c.int(3), Method::Sjm, 16).unwrap();
        assert_eq!(rec16.trace.entries.len(), 3); // two steps for 16 digits
        assert!(rec16.gamma.congruent_to(&rec.gamma, 4).unwrap());
    }

    #[test]
    fn solve_weak_seed_example() {
        let c5 = ctx(5, 24);
        let g = Poly::from_int_coeffs(&c5, &[6, -7, 1]);
        let rec = solve(&g, &c5.int(31), Method::Sjm, 10).unwrap();
        assert!(rec.gamma.congruent_to(&c5.int(6), 10).unwrap());
        assert_eq!(rec.v_fprime_at_root, 1);
        assert_eq!(
            rec.gamma.sub(&rec.seed).unwrap().valuation(),
            Valuation::Finite(2)
        );
    }

    #[test]
    fn solve_rejects_inadmissible_seed() {
        let c5 = ctx(5, 24);
        let g = Poly::from_int_coeffs(&c5, &[6, -7, 1]);
        assert!(matches!(
            solve(&g, &c5.int(11), Method::Sjm, 10),
            Err(Error::SeedRejected { .. })
        ));
    }

    #[test]
    fn solve_i_in_z5_with_newton() {
        let c5 = ctx(5, 20);
        let f = Poly::from_int_coeffs(&c5, &[1, 0, 1]);
        let rec = solve(&f, &c5.int(2), Method::Newton, 12).unwrap();
        let sq = rec.gamma.mul(&rec.gamma).unwrap();
        assert!(sq.congruent_to(&c5.int(-1), 12).unwrap());
    }

    #[test]
    fn monitor_examples() {
        let c = ctx(7, 24);
        let f = sqrt2_poly(&c);
        let rec = solve(&f, &c.int(3), Method::Sjm, 16).unwrap();
        let report = monitor_invariants(&rec.trace, &f).unwrap();
        assert!(report.ok());
        assert!(report.check().is_ok());
        // v(f(x_2)) >= 0 + 4 * 1
        assert!(rec.trace.entries[1].v_f.known_ge(4));

        // length-1 trace passes vacuously
        let short = IterationTrace {
            method: Method::Sjm,
            entries: vec![rec.trace.entries[0].clone()],
            t_v: rec.trace.t_v,
        };
        assert!(monitor_invariants(&short, &f).unwrap().ok());

        // corrupting an iterate breaks condition (3) and monitoring sees it
        let mut bad = rec.trace.clone();
        bad.entries[1].x = bad.entries[1].x.add(&c.int(7)).unwrap();
        let report = monitor_invariants(&bad, &f).unwrap();
        assert_eq!(report.cond3_violations, vec![2]);
        assert!(matches!(
            report.check(),
            Err(Error::InvariantViolated { step: 2, .. })
        ));
    }

    #[test]
    fn order_estimate_examples() {
        let c = ctx(7, 90);
        let f = sqrt2_poly(&c);
        let rec = solve(&f, &c.int(3), Method::Sjm, 64).unwrap();
        let ratio = order_estimate(&rec.trace, &rec.gamma).unwrap();
        assert!(ratio >= Ratio::new(4, 1));

        let newton = solve(&f, &c.int(3), Method::Newton, 64).unwrap();
        let newton_ratio = order_estimate(&newton.trace, &newton.gamma).unwrap();
        assert_eq!(newton_ratio, Ratio::new(2, 1));
        assert!(ratio > newton_ratio);

        let short = IterationTrace::<BigInt> {
            method: Method::Sjm,
            entries: rec.trace.entries[..2].to_vec(),
            t_v: 1,
        };
        assert_eq!(
            order_estimate(&short, &rec.gamma),
            Err(Error::InsufficientTrace)
        );
    }

    #[test]
    fn trace_error_valuations_fill() {
        let c = ctx(7, 40);
        let f = sqrt2_poly(&c);
        let mut rec = solve(&f, &c.int(3), Method::Sjm, 16).unwrap();
        let gamma = rec.gamma.clone();
        rec.trace.fill_error_valuations(&gamma).unwrap();
        assert_eq!(rec.trace.entries[0].v_e, Some(Valuation::Finite(1)));
        assert_eq!(rec.trace.entries[1].v_e, Some(Valuation::Finite(4)));
    }

    #[test]
    fn rho_constant_formula() {
        // f = x^2 - 2 at gamma = sqrt(2): c2 = 1/(2 sqrt 2), c3 = c4 = 0
        let s = 2f64.sqrt();
        let rho = RhoConstant::from_derivatives(2.0 * s, 2.0, 0.0, 0.0);
        assert!((rho.c2 - 1.0 / (2.0 * s)).abs() < 1e-15);
        assert!((rho.rho.abs() - 3.0 / (2.0 * s).powi(3)).abs() < 1e-15);
    }

    #[test]
    fn solve_adaptive_resizes_precision() {
        let coeffs = crate::poly::parse_rational_coeffs("-2,0,1").unwrap();
        let rec = solve_adaptive(&coeffs, 7, &BigInt::from(3), Method::Sjm, 40).unwrap();
        assert!(rec.prec_certified >= 40);
        let sq = rec.gamma.mul(&rec.gamma).unwrap();
        assert!(sq.congruent_to(&rec.gamma.context().int(2), 40).unwrap());
    }
}
