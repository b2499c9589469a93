//! Real-number reference for the order-4 iteration.
//!
//! The step functions mirror the p-adic formulas over a floating-point
//! scalar, with derivatives supplied analytically as closures. Order
//! measurement fits the slope of `log|e_{n+1}|` against `log|e_n|`.
//!
//! Double precision can certify at most two quartic contractions: once the
//! error drops below `|gamma| * epsilon`, the subtraction `x_n - gamma`
//! cancels to rounding noise. [`measure_order`] therefore reports
//! [`Error::UnderflowTooFast`] when fewer than two reliable ratio samples
//! survive, and [`measure_order_exact`] reruns polynomial instances in
//! exact rational arithmetic against a root refined to hundreds of digits,
//! which is what the CLI uses for its verdicts.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Float, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::solver::RhoConstant;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RealMethod {
    Newton,
    Olver,
    Sjm,
    Jarratt,
}

impl RealMethod {
    pub fn name(&self) -> &'static str {
        match self {
            RealMethod::Newton => "newton",
            RealMethod::Olver => "olver",
            RealMethod::Sjm => "sjm",
            RealMethod::Jarratt => "jarratt",
        }
    }

    /// Classical order of convergence on simple real roots.
    pub fn order(&self) -> u32 {
        match self {
            RealMethod::Newton => 2,
            RealMethod::Olver => 3,
            RealMethod::Sjm | RealMethod::Jarratt => 4,
        }
    }
}

impl std::str::FromStr for RealMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "newton" => Ok(RealMethod::Newton),
            "olver" => Ok(RealMethod::Olver),
            "sjm" => Ok(RealMethod::Sjm),
            "jarratt" => Ok(RealMethod::Jarratt),
            other => Err(Error::Parse(format!(
                "unknown method `{other}` (expected newton, olver, sjm or jarratt)"
            ))),
        }
    }
}

fn cast<F: Float>(x: f64) -> F {
    F::from(x).expect("small constant fits the float type")
}

pub fn newton_step_real<F: Float>(f: impl Fn(F) -> F, f1: impl Fn(F) -> F, x: F) -> Result<F> {
    let d = f1(x);
    if d.is_zero() {
        return Err(Error::ZeroDenominator);
    }
    Ok(x - f(x) / d)
}

pub fn olver_step_real<F: Float>(
    f: impl Fn(F) -> F,
    f1: impl Fn(F) -> F,
    f2: impl Fn(F) -> F,
    x: F,
) -> Result<F> {
    let d = f1(x);
    if d.is_zero() {
        return Err(Error::ZeroDenominator);
    }
    let v = f(x);
    Ok(x - v / d - cast::<F>(0.5) * v * v * f2(x) / (d * d * d))
}

/// `x - (1/2) f/f' + 3 f f'^2 / (-6 f'^3 + 6 f f' f'' - 2 f^2 f''')`.
pub fn sjm_step_real<F: Float>(
    f: impl Fn(F) -> F,
    f1: impl Fn(F) -> F,
    f2: impl Fn(F) -> F,
    f3: impl Fn(F) -> F,
    x: F,
) -> Result<F> {
    let v = f(x);
    let d = f1(x);
    if d.is_zero() {
        return Err(Error::ZeroDenominator);
    }
    let six = cast::<F>(6.0);
    let den = six * (v * d * f2(x) - d * d * d) - cast::<F>(2.0) * v * v * f3(x);
    if den.is_zero() {
        return Err(Error::ZeroDenominator);
    }
    Ok(x - cast::<F>(0.5) * v / d + cast::<F>(3.0) * v * d * d / den)
}

/// The original two-point form: `x - (1/2) f/f' + f / (f' - 3 f'(x - (2/3) f/f'))`.
pub fn jarratt_step_real<F: Float>(
    f: impl Fn(F) -> F,
    f1: impl Fn(F) -> F,
    x: F,
) -> Result<F> {
    let v = f(x);
    let d = f1(x);
    if d.is_zero() {
        return Err(Error::ZeroDenominator);
    }
    let shifted = f1(x - cast::<F>(2.0 / 3.0) * v / d);
    let den = d - cast::<F>(3.0) * shifted;
    if den.is_zero() {
        return Err(Error::ZeroDenominator);
    }
    Ok(x - cast::<F>(0.5) * v / d + v / den)
}

fn step_real<F: Float>(
    method: RealMethod,
    f: &impl Fn(F) -> F,
    f1: &impl Fn(F) -> F,
    f2: &impl Fn(F) -> F,
    f3: &impl Fn(F) -> F,
    x: F,
) -> Result<F> {
    match method {
        RealMethod::Newton => newton_step_real(f, f1, x),
        RealMethod::Olver => olver_step_real(f, f1, f2, x),
        RealMethod::Sjm => sjm_step_real(f, f1, f2, f3, x),
        RealMethod::Jarratt => jarratt_step_real(f, f1, x),
    }
}

/// Result of an order measurement.
#[derive(Debug, Clone)]
pub struct RealIterationReport<F> {
    pub iterates: Vec<F>,
    pub errors: Vec<F>,
    /// `|e_{n+1}| / |e_n|^q` for the method's order `q`, one per reliable
    /// consecutive pair.
    pub ratios: Vec<F>,
    pub rho_predicted: F,
    /// Least-squares slope of `log|e_{n+1}|` against `log|e_n|`; `None`
    /// when the run converged exactly.
    pub order_slope: Option<F>,
    pub exact: bool,
}

impl<F: Float> RealIterationReport<F> {
    pub fn last_ratio(&self) -> Option<F> {
        self.ratios.last().copied()
    }
}

fn lsq_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        num += (x - mx) * (y - my);
        den += (x - mx) * (x - mx);
    }
    num / den
}

/// Runs the iteration in the given float type and fits the order from the
/// reliable error pairs.
///
/// Reliability demands `|e_n|` above both the quartic underflow guard and
/// the cancellation floor `|gamma| * epsilon`; a first step that lands on
/// the root exactly is reported as exact convergence instead of an order.
#[allow(clippy::too_many_arguments)]
pub fn measure_order<F: Float>(
    f: impl Fn(F) -> F,
    f1: impl Fn(F) -> F,
    f2: impl Fn(F) -> F,
    f3: impl Fn(F) -> F,
    x1: F,
    gamma: F,
    rho: RhoConstant<F>,
    method: RealMethod,
) -> Result<RealIterationReport<F>> {
    let rel_floor = gamma.abs().max(F::one()) * F::epsilon() * cast(64.0);
    let abs_floor = F::min_positive_value().powf(cast(0.25));
    let floor = rel_floor.max(abs_floor);

    let mut iterates = vec![x1];
    let mut errors = vec![(x1 - gamma).abs()];
    let mut exact = false;
    for _ in 0..16 {
        let x = *iterates.last().expect("nonempty");
        let next = step_real(method, &f, &f1, &f2, &f3, x)?;
        if !next.is_finite() {
            break;
        }
        let e = (next - gamma).abs();
        iterates.push(next);
        errors.push(e);
        if e.is_zero() {
            exact = iterates.len() == 2;
            break;
        }
        if e <= floor {
            break;
        }
    }

    let reliable: Vec<F> = errors.iter().copied().take_while(|e| *e > floor).collect();
    let pairs = reliable.len().saturating_sub(1);
    if exact {
        return Ok(RealIterationReport {
            iterates,
            errors,
            ratios: Vec::new(),
            rho_predicted: rho.rho,
            order_slope: None,
            exact: true,
        });
    }
    if pairs < 2 {
        return Err(Error::UnderflowTooFast);
    }

    let logs: Vec<f64> = reliable
        .iter()
        .map(|e| e.to_f64().expect("float converts").ln())
        .collect();
    let xs = &logs[..logs.len() - 1];
    let ys = &logs[1..];
    let slope = lsq_slope(xs, ys);

    let q = method.order() as i32;
    let ratios = reliable
        .windows(2)
        .map(|w| w[1] / w[0].powi(q))
        .collect();

    Ok(RealIterationReport {
        iterates,
        errors,
        ratios,
        rho_predicted: rho.rho,
        order_slope: Some(cast(slope)),
        exact: false,
    })
}

/// Dense polynomial with exact rational coefficients, constant term first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalPoly {
    coeffs: Vec<BigRational>,
}

impl RationalPoly {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while matches!(coeffs.last(), Some(c) if c.is_zero()) {
            coeffs.pop();
        }
        RationalPoly { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        RationalPoly::new(
            coeffs
                .iter()
                .map(|&c| BigRational::from_integer(BigInt::from(c)))
                .collect(),
        )
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for c in self.coeffs.iter().rev() {
            acc = acc * x + ratio_to_f64(c);
        }
        acc
    }

    pub fn derivative(&self) -> RationalPoly {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| c * BigRational::from_integer(BigInt::from(k)))
            .collect();
        RationalPoly::new(coeffs)
    }
}

fn ln_abs_bigint(n: &BigInt) -> f64 {
    debug_assert!(!n.is_zero());
    let bits = n.bits();
    if bits <= 63 {
        n.to_f64().expect("small int converts").abs().ln()
    } else {
        let shift = bits - 63;
        let top = n.abs() >> shift;
        top.to_f64().expect("63-bit int converts").ln() + shift as f64 * std::f64::consts::LN_2
    }
}

/// Natural log of `|r|`, robust for magnitudes far outside f64 range.
pub fn ln_abs_ratio(r: &BigRational) -> f64 {
    ln_abs_bigint(r.numer()) - ln_abs_bigint(r.denom())
}

/// f64 approximation that survives huge numerators and denominators.
pub fn ratio_to_f64(r: &BigRational) -> f64 {
    if r.is_zero() {
        return 0.0;
    }
    if r.numer().bits() <= 900 && r.denom().bits() <= 900 {
        return r.numer().to_f64().expect("in f64 range")
            / r.denom().to_f64().expect("in f64 range");
    }
    let sign = if r.is_negative() { -1.0 } else { 1.0 };
    sign * ln_abs_ratio(r).exp()
}

fn round_decimals(x: &BigRational, k: u32) -> BigRational {
    let scale = BigInt::from(10u32).pow(k);
    let scaled = x * BigRational::from_integer(scale.clone());
    BigRational::new(scaled.round().to_integer(), scale)
}

fn step_exact(
    method: RealMethod,
    f: &RationalPoly,
    f1: &RationalPoly,
    f2: &RationalPoly,
    f3: &RationalPoly,
    x: &BigRational,
) -> Result<BigRational> {
    let v = f.eval(x);
    let d = f1.eval(x);
    if d.is_zero() {
        return Err(Error::ZeroDenominator);
    }
    match method {
        RealMethod::Newton => Ok(x - v / d),
        RealMethod::Olver => {
            let half = BigRational::new(BigInt::from(1), BigInt::from(2));
            Ok(x - &v / &d - half * &v * &v * f2.eval(x) / (&d * &d * &d))
        }
        RealMethod::Sjm => {
            let six = BigRational::from_integer(BigInt::from(6));
            let two = BigRational::from_integer(BigInt::from(2));
            let den = six * (&v * &d * f2.eval(x) - &d * &d * &d) - two * &v * &v * f3.eval(x);
            if den.is_zero() {
                return Err(Error::ZeroDenominator);
            }
            let half = BigRational::new(BigInt::from(1), BigInt::from(2));
            let three = BigRational::from_integer(BigInt::from(3));
            Ok(x - half * &v / &d + three * &v * &d * &d / den)
        }
        RealMethod::Jarratt => {
            let two_thirds = BigRational::new(BigInt::from(2), BigInt::from(3));
            let shifted = f1.eval(&(x - two_thirds * &v / &d));
            let den = &d - BigRational::from_integer(BigInt::from(3)) * shifted;
            if den.is_zero() {
                return Err(Error::ZeroDenominator);
            }
            let half = BigRational::new(BigInt::from(1), BigInt::from(2));
            Ok(x - half * &v / &d + &v / den)
        }
    }
}

/// Refines a bracketed simple real root of `poly` to `digits` decimal
/// digits: bisection to a safe basin, then Newton with rounding to keep the
/// rationals small.
pub fn refine_real_root(
    poly: &RationalPoly,
    lo: &BigRational,
    hi: &BigRational,
    digits: u32,
) -> Result<BigRational> {
    let f_lo = poly.eval(lo);
    let f_hi = poly.eval(hi);
    if f_lo.is_zero() {
        return Ok(lo.clone());
    }
    if f_hi.is_zero() {
        return Ok(hi.clone());
    }
    if f_lo.is_negative() == f_hi.is_negative() {
        return Err(Error::Precondition("interval must bracket a sign change"));
    }
    let mut lo = lo.clone();
    let mut hi = hi.clone();
    let mut neg_at_lo = f_lo.is_negative();
    let half = BigRational::new(BigInt::from(1), BigInt::from(2));
    for _ in 0..64 {
        let mid = round_decimals(&((&lo + &hi) * &half), 24);
        let fm = poly.eval(&mid);
        if fm.is_zero() {
            return Ok(mid);
        }
        if fm.is_negative() == neg_at_lo {
            lo = mid;
        } else {
            hi = mid;
            neg_at_lo = poly.eval(&lo).is_negative();
        }
    }

    let deriv = poly.derivative();
    let mut x = (&lo + &hi) * &half;
    let mut acc: u32 = 12; // bisection of a unit interval gives ~19 digits
    while acc < digits + 10 {
        let d = deriv.eval(&x);
        if d.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        x = &x - poly.eval(&x) / d;
        acc = acc.saturating_mul(2);
        x = round_decimals(&x, acc.min(digits + 20) + 10);
    }
    Ok(round_decimals(&x, digits))
}

/// Exact-rational rerun of [`measure_order`] for polynomial instances.
///
/// `gamma` must be accurate to `gamma_digits` decimal digits; errors are
/// trusted only while they stay a comfortable margin above that accuracy,
/// so every reported pair is genuine.
pub fn measure_order_exact(
    poly: &RationalPoly,
    x1: &BigRational,
    gamma: &BigRational,
    gamma_digits: u32,
    method: RealMethod,
) -> Result<RealIterationReport<f64>> {
    let f1 = poly.derivative();
    let f2 = f1.derivative();
    let f3 = f2.derivative();
    let f4 = f3.derivative();

    let floor_ln = -((gamma_digits.saturating_sub(20)) as f64) * std::f64::consts::LN_10;
    let round_to = gamma_digits + 40;

    let mut iterates_exact = vec![x1.clone()];
    let mut ln_errors = Vec::new();
    let mut exact = false;

    let e1 = x1 - gamma;
    if e1.is_zero() {
        return Err(Error::Precondition("x1 must differ from the root"));
    }
    ln_errors.push(ln_abs_ratio(&e1));

    for _ in 0..8 {
        let x = iterates_exact.last().expect("nonempty").clone();
        let next = round_decimals(&step_exact(method, poly, &f1, &f2, &f3, &x)?, round_to);
        let e = &next - gamma;
        iterates_exact.push(next);
        if e.is_zero() {
            exact = iterates_exact.len() == 2;
            break;
        }
        let ln_e = ln_abs_ratio(&e);
        if ln_e < floor_ln {
            break;
        }
        ln_errors.push(ln_e);
    }

    let rho_predicted = {
        let d1 = ratio_to_f64(&f1.eval(gamma));
        let d2 = ratio_to_f64(&f2.eval(gamma));
        let d3 = ratio_to_f64(&f3.eval(gamma));
        let d4 = ratio_to_f64(&f4.eval(gamma));
        RhoConstant::from_derivatives(d1, d2, d3, d4).rho
    };

    let iterates = iterates_exact.iter().map(ratio_to_f64).collect();
    let errors: Vec<f64> = ln_errors.iter().map(|l| l.exp()).collect();

    if exact {
        return Ok(RealIterationReport {
            iterates,
            errors,
            ratios: Vec::new(),
            rho_predicted,
            order_slope: None,
            exact: true,
        });
    }
    if ln_errors.len() < 3 {
        return Err(Error::UnderflowTooFast);
    }

    let xs = &ln_errors[..ln_errors.len() - 1];
    let ys = &ln_errors[1..];
    let slope = lsq_slope(xs, ys);
    let q = method.order() as f64;
    let ratios = ln_errors
        .windows(2)
        .map(|w| (w[1] - q * w[0]).exp())
        .collect();

    Ok(RealIterationReport {
        iterates,
        errors,
        ratios,
        rho_predicted,
        order_slope: Some(slope),
        exact: false,
    })
}
