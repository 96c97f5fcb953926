//! Symbolic weights on `(0, inf)` with exact antiderivatives where possible
//! and adaptive quadrature elsewhere.
//!
//! A weight is a nonnegative measurable function on `(0, inf)`. The expression
//! tree below covers power laws, exponentials, piecewise constants and their
//! sums, products and restrictions. Integration returns `inf` as a value when
//! the integral diverges; divergence is always decided from leaf asymptotics,
//! never by quadrature timeout.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum WeightExpr {
    /// `c * t^alpha`
    PowerLaw { coeff: f64, exponent: f64 },
    /// `c * e^{rate * t}`
    Exponential { coeff: f64, rate: f64 },
    /// Constant on `[0,k_1), [k_1,k_2), ...`; the last value extends to `inf`.
    PiecewiseConstant { knots: Vec<f64>, values: Vec<f64> },
    Sum(Vec<WeightExpr>),
    Product(Box<WeightExpr>, Box<WeightExpr>),
    /// Child on `[lo, hi)`, zero elsewhere. `hi` may be infinite.
    Restrict {
        child: Box<WeightExpr>,
        lo: f64,
        hi: f64,
    },
}

/// Leading behavior `coeff * t^alpha * e^{rate t}` at an endpoint of `(0, inf)`.
/// `coeff == 0` means the weight vanishes in a neighborhood of the endpoint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Asym {
    pub coeff: f64,
    pub alpha: f64,
    pub rate: f64,
}

impl Asym {
    const ZERO: Asym = Asym {
        coeff: 0.0,
        alpha: 0.0,
        rate: 0.0,
    };
}

impl WeightExpr {
    pub fn power(coeff: f64, exponent: f64) -> Self {
        assert!(coeff >= 0.0, "weight coefficient must be nonnegative");
        WeightExpr::PowerLaw { coeff, exponent }
    }

    pub fn exponential(coeff: f64, rate: f64) -> Self {
        assert!(coeff >= 0.0, "weight coefficient must be nonnegative");
        WeightExpr::Exponential { coeff, rate }
    }

    pub fn constant(c: f64) -> Self {
        Self::power(c, 0.0)
    }

    pub fn zero() -> Self {
        Self::power(0.0, 0.0)
    }

    pub fn piecewise(knots: Vec<f64>, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), knots.len() + 1, "need one value per piece");
        assert!(
            knots.windows(2).all(|w| w[0] < w[1]) && knots.first().map_or(true, |&k| k > 0.0),
            "knots must be strictly increasing and positive"
        );
        assert!(values.iter().all(|&v| v >= 0.0));
        WeightExpr::PiecewiseConstant { knots, values }
    }

    pub fn sum(children: Vec<WeightExpr>) -> Self {
        WeightExpr::Sum(children)
    }

    pub fn product(a: WeightExpr, b: WeightExpr) -> Self {
        WeightExpr::Product(Box::new(a), Box::new(b))
    }

    pub fn restrict(child: WeightExpr, lo: f64, hi: f64) -> Self {
        assert!(lo >= 0.0 && hi > lo);
        WeightExpr::Restrict {
            child: Box::new(child),
            lo,
            hi,
        }
    }

    /// Scale by a nonnegative constant. The constant is pushed into the
    /// expression so the closed-form integration paths stay available.
    pub fn scaled(&self, c: f64) -> WeightExpr {
        assert!(c >= 0.0);
        match self {
            WeightExpr::PowerLaw { coeff, exponent } => WeightExpr::PowerLaw {
                coeff: c * coeff,
                exponent: *exponent,
            },
            WeightExpr::Exponential { coeff, rate } => WeightExpr::Exponential {
                coeff: c * coeff,
                rate: *rate,
            },
            WeightExpr::PiecewiseConstant { knots, values } => WeightExpr::PiecewiseConstant {
                knots: knots.clone(),
                values: values.iter().map(|&v| c * v).collect(),
            },
            WeightExpr::Sum(terms) => WeightExpr::Sum(terms.iter().map(|t| t.scaled(c)).collect()),
            WeightExpr::Product(a, b) => {
                WeightExpr::Product(Box::new(a.scaled(c)), b.clone())
            }
            WeightExpr::Restrict { child, lo, hi } => WeightExpr::Restrict {
                child: Box::new(child.scaled(c)),
                lo: *lo,
                hi: *hi,
            },
        }
    }

    /// Pointwise value at `t > 0`.
    pub fn eval(&self, t: f64) -> f64 {
        match self {
            WeightExpr::PowerLaw { coeff, exponent } => {
                if *coeff == 0.0 {
                    0.0
                } else if *exponent == 0.0 {
                    *coeff
                } else {
                    coeff * t.powf(*exponent)
                }
            }
            WeightExpr::Exponential { coeff, rate } => {
                if *coeff == 0.0 {
                    0.0
                } else {
                    coeff * (rate * t).exp()
                }
            }
            WeightExpr::PiecewiseConstant { knots, values } => {
                let idx = knots.partition_point(|&k| k <= t);
                values[idx]
            }
            WeightExpr::Sum(children) => children.iter().map(|c| c.eval(t)).sum(),
            WeightExpr::Product(a, b) => {
                let va = a.eval(t);
                if va == 0.0 {
                    0.0
                } else {
                    va * b.eval(t)
                }
            }
            WeightExpr::Restrict { child, lo, hi } => {
                if t >= *lo && t < *hi {
                    child.eval(t)
                } else {
                    0.0
                }
            }
        }
    }

    /// True if the expression is structurally the zero weight.
    pub fn is_zero(&self) -> bool {
        match self {
            WeightExpr::PowerLaw { coeff, .. } | WeightExpr::Exponential { coeff, .. } => {
                *coeff == 0.0
            }
            WeightExpr::PiecewiseConstant { values, .. } => values.iter().all(|&v| v == 0.0),
            WeightExpr::Sum(children) => children.iter().all(|c| c.is_zero()),
            WeightExpr::Product(a, b) => a.is_zero() || b.is_zero(),
            WeightExpr::Restrict { child, .. } => child.is_zero(),
        }
    }

    /// Leading behavior as `t -> 0+`.
    pub fn asym_zero(&self) -> Asym {
        match self {
            WeightExpr::PowerLaw { coeff, exponent } => Asym {
                coeff: *coeff,
                alpha: *exponent,
                rate: 0.0,
            },
            WeightExpr::Exponential { coeff, .. } => Asym {
                coeff: *coeff,
                alpha: 0.0,
                rate: 0.0,
            },
            WeightExpr::PiecewiseConstant { values, .. } => Asym {
                coeff: values[0],
                alpha: 0.0,
                rate: 0.0,
            },
            WeightExpr::Sum(children) => {
                let mut best = Asym::ZERO;
                for c in children {
                    let a = c.asym_zero();
                    if a.coeff == 0.0 {
                        continue;
                    }
                    if best.coeff == 0.0 || a.alpha < best.alpha {
                        best = a;
                    } else if a.alpha == best.alpha {
                        best.coeff += a.coeff;
                    }
                }
                best
            }
            WeightExpr::Product(a, b) => {
                let (x, y) = (a.asym_zero(), b.asym_zero());
                if x.coeff == 0.0 || y.coeff == 0.0 {
                    Asym::ZERO
                } else {
                    Asym {
                        coeff: x.coeff * y.coeff,
                        alpha: x.alpha + y.alpha,
                        rate: 0.0,
                    }
                }
            }
            WeightExpr::Restrict { child, lo, .. } => {
                if *lo > 0.0 {
                    Asym::ZERO
                } else {
                    child.asym_zero()
                }
            }
        }
    }

    /// Leading behavior as `t -> inf`.
    pub fn asym_inf(&self) -> Asym {
        match self {
            WeightExpr::PowerLaw { coeff, exponent } => Asym {
                coeff: *coeff,
                alpha: *exponent,
                rate: 0.0,
            },
            WeightExpr::Exponential { coeff, rate } => Asym {
                coeff: *coeff,
                alpha: 0.0,
                rate: *rate,
            },
            WeightExpr::PiecewiseConstant { values, .. } => Asym {
                coeff: *values.last().unwrap(),
                alpha: 0.0,
                rate: 0.0,
            },
            WeightExpr::Sum(children) => {
                let mut best = Asym::ZERO;
                for c in children {
                    let a = c.asym_inf();
                    if a.coeff == 0.0 {
                        continue;
                    }
                    if best.coeff == 0.0
                        || a.rate > best.rate
                        || (a.rate == best.rate && a.alpha > best.alpha)
                    {
                        best = a;
                    } else if a.rate == best.rate && a.alpha == best.alpha {
                        best.coeff += a.coeff;
                    }
                }
                best
            }
            WeightExpr::Product(a, b) => {
                let (x, y) = (a.asym_inf(), b.asym_inf());
                if x.coeff == 0.0 || y.coeff == 0.0 {
                    Asym::ZERO
                } else {
                    Asym {
                        coeff: x.coeff * y.coeff,
                        alpha: x.alpha + y.alpha,
                        rate: x.rate + y.rate,
                    }
                }
            }
            WeightExpr::Restrict { child, hi, .. } => {
                if hi.is_finite() {
                    Asym::ZERO
                } else {
                    child.asym_inf()
                }
            }
        }
    }

    /// Is `int_0^eps w` finite?
    pub fn integrable_at_zero(&self) -> bool {
        let a = self.asym_zero();
        a.coeff == 0.0 || a.alpha > -1.0
    }

    /// Is `int_T^inf w` divergent?
    pub fn tail_diverges(&self) -> bool {
        let a = self.asym_inf();
        a.coeff > 0.0 && (a.rate > 0.0 || (a.rate == 0.0 && a.alpha >= -1.0))
    }

    /// `int_a^b w` within relative tolerance `tol`. `b` may be `inf`.
    /// Returns `inf` when the integral diverges at the upper end.
    pub fn integrate(&self, a: f64, b: f64, tol: f64) -> Result<f64> {
        assert!(a >= 0.0 && b >= a);
        if a == b {
            return Ok(0.0);
        }
        if a == 0.0 && !self.integrable_at_zero() {
            return Err(Error::NonIntegrableNearZero);
        }
        if b.is_infinite() {
            if self.tail_diverges() {
                return Ok(f64::INFINITY);
            }
            if let Some(v) = self.closed_integral(a, b) {
                return Ok(v.max(0.0));
            }
            let split = a.max(1.0);
            let head = self.integrate(a, split, tol)?;
            let tail = quad::integrate_to_inf(&|t| self.eval(t), split, tol);
            return Ok((head + tail).max(0.0));
        }
        if let Some(v) = self.closed_integral(a, b) {
            return Ok(v.max(0.0));
        }
        Ok(self.integrate_quadrature(a, b, tol).max(0.0))
    }

    /// `int_{t-x}^{t} self`, computed as a smooth function of the gap `x`.
    ///
    /// Forming `s = t - x` and recovering `t - s` quantizes the gap at
    /// `eps * t`; for integrands like `U(s,t)^e` near `s = t` that jitter
    /// stalls adaptive quadrature, so the closed forms here keep `x` exact.
    pub fn integrate_back(&self, t: f64, x: f64, tol: f64) -> f64 {
        debug_assert!(t > 0.0 && x >= 0.0 && x <= t);
        if x == 0.0 {
            return 0.0;
        }
        match self {
            WeightExpr::PowerLaw { coeff, exponent } => {
                if *coeff == 0.0 {
                    return 0.0;
                }
                let lg = (-x / t).ln_1p();
                if *exponent == -1.0 {
                    -coeff * lg
                } else {
                    let e = exponent + 1.0;
                    -coeff * t.powf(e) * (e * lg).exp_m1() / e
                }
            }
            WeightExpr::Exponential { coeff, rate } => {
                if *rate == 0.0 {
                    coeff * x
                } else {
                    -coeff * (rate * t).exp() * (-rate * x).exp_m1() / rate
                }
            }
            WeightExpr::Sum(children) => children.iter().map(|c| c.integrate_back(t, x, tol)).sum(),
            WeightExpr::PiecewiseConstant { knots, values } => {
                // constant across the whole gap: exactly that value times x
                let i = knots.partition_point(|&k| k <= t - x);
                let hi = knots.get(i).copied().unwrap_or(f64::INFINITY);
                if t <= hi {
                    values.get(i).copied().unwrap_or(0.0) * x
                } else {
                    self.integrate((t - x).max(0.0), t, tol)
                        .unwrap_or(f64::INFINITY)
                }
            }
            WeightExpr::Restrict { child, lo, hi } => {
                if t <= *hi && t - x >= *lo {
                    child.integrate_back(t, x, tol)
                } else {
                    self.integrate((t - x).max(0.0), t, tol)
                        .unwrap_or(f64::INFINITY)
                }
            }
            WeightExpr::Product(..) => self
                .integrate((t - x).max(0.0), t, tol)
                .unwrap_or(f64::INFINITY),
        }
    }

    /// Pure-quadrature path, bypassing closed forms (test hook; also the
    /// fallback used by `integrate`). Finite `b` only.
    pub fn integrate_quadrature(&self, a: f64, b: f64, tol: f64) -> f64 {
        let f = |t: f64| self.eval(t);
        let singular = a == 0.0 && {
            let z = self.asym_zero();
            z.coeff > 0.0 && z.alpha < 0.0
        };
        if singular {
            quad::integrate_singular_lo(&f, a, b, tol)
        } else {
            quad::integrate(&f, a, b, tol)
        }
    }

    /// Exact antiderivative-based integral over `[a, b]` when available.
    /// Assumes integrability at the endpoints has been vetted.
    fn closed_integral(&self, a: f64, b: f64) -> Option<f64> {
        match self {
            WeightExpr::PowerLaw { coeff, exponent } => {
                Some(power_integral(*coeff, *exponent, a, b))
            }
            WeightExpr::Exponential { coeff, rate } => Some(exp_integral(*coeff, *rate, a, b)),
            WeightExpr::PiecewiseConstant { knots, values } => {
                let mut total = 0.0;
                let mut lo = 0.0f64;
                for (i, &v) in values.iter().enumerate() {
                    let hi = if i < knots.len() {
                        knots[i]
                    } else {
                        f64::INFINITY
                    };
                    let s = lo.max(a);
                    let e = hi.min(b);
                    if e > s {
                        if e.is_infinite() {
                            if v != 0.0 {
                                return Some(f64::INFINITY);
                            }
                        } else {
                            total += v * (e - s);
                        }
                    }
                    lo = hi;
                }
                Some(total)
            }
            WeightExpr::Sum(children) => {
                let mut total = 0.0;
                for c in children {
                    total += c.closed_integral(a, b)?;
                    if total.is_infinite() {
                        return Some(total);
                    }
                }
                Some(total)
            }
            WeightExpr::Restrict { child, lo, hi } => {
                let s = a.max(*lo);
                let e = b.min(*hi);
                if e <= s {
                    Some(0.0)
                } else {
                    child.closed_integral(s, e)
                }
            }
            WeightExpr::Product(x, y) => product_closed_integral(x, y, a, b),
        }
    }
}

fn power_integral(c: f64, alpha: f64, a: f64, b: f64) -> f64 {
    if c == 0.0 {
        return 0.0;
    }
    if b.is_infinite() {
        // caller vetted convergence: alpha < -1
        return -c * a.powf(alpha + 1.0) / (alpha + 1.0);
    }
    if alpha == -1.0 {
        return if a > 0.0 {
            // ln(b/a) via ln1p to stay smooth when b - a << a
            c * ((b - a) / a).ln_1p()
        } else {
            f64::INFINITY
        };
    }
    let e = alpha + 1.0;
    if a > 0.0 {
        // b^e - a^e = a^e expm1(e ln(b/a)); the naive difference cancels
        // catastrophically when b - a << a and poisons adaptive quadrature
        c * a.powf(e) * (e * ((b - a) / a).ln_1p()).exp_m1() / e
    } else {
        c * b.powf(e) / e
    }
}

fn exp_integral(c: f64, rate: f64, a: f64, b: f64) -> f64 {
    if c == 0.0 {
        return 0.0;
    }
    if rate == 0.0 {
        return if b.is_infinite() {
            f64::INFINITY
        } else {
            c * (b - a)
        };
    }
    if b.is_infinite() {
        // caller vetted convergence: rate < 0
        return -c * (rate * a).exp() / rate;
    }
    // e^{rb} - e^{ra} = e^{ra} expm1(r (b - a)), smooth as b -> a
    c * (rate * a).exp() * (rate * (b - a)).exp_m1() / rate
}

/// `int_a^b c t^n e^{r t} dt` for integer `n >= 0` via the antiderivative
/// `e^{r t} sum_{j=0}^{n} (-1)^j (n!/(n-j)!) t^{n-j} / r^{j+1}`.
fn power_exp_integral(c: f64, n: u32, rate: f64, a: f64, b: f64) -> f64 {
    if c == 0.0 {
        return 0.0;
    }
    let anti = |t: f64| -> f64 {
        let mut sum = 0.0;
        let mut fall = 1.0; // n! / (n-j)!
        for j in 0..=n {
            let term = fall * t.powi((n - j) as i32) / rate.powi(j as i32 + 1);
            sum += if j % 2 == 0 { term } else { -term };
            fall *= (n - j) as f64;
        }
        (rate * t).exp() * sum
    };
    if b.is_infinite() {
        // rate < 0 vetted by the caller; antiderivative vanishes at infinity
        return -c * anti(a);
    }
    c * (anti(b) - anti(a))
}

fn product_closed_integral(x: &WeightExpr, y: &WeightExpr, a: f64, b: f64) -> Option<f64> {
    use WeightExpr::*;
    match (x, y) {
        (PowerLaw { coeff, exponent }, other) | (other, PowerLaw { coeff, exponent })
            if *exponent == 0.0 =>
        {
            Some(coeff * other.closed_integral(a, b)?)
        }
        (
            PowerLaw {
                coeff: c1,
                exponent: e1,
            },
            PowerLaw {
                coeff: c2,
                exponent: e2,
            },
        ) => Some(power_integral(c1 * c2, e1 + e2, a, b)),
        (
            Exponential {
                coeff: c1,
                rate: r1,
            },
            Exponential {
                coeff: c2,
                rate: r2,
            },
        ) => Some(exp_integral(c1 * c2, r1 + r2, a, b)),
        (PowerLaw { coeff: cp, exponent }, Exponential { coeff: ce, rate })
        | (Exponential { coeff: ce, rate }, PowerLaw { coeff: cp, exponent })
            if exponent.fract() == 0.0 && *exponent >= 0.0 && *rate != 0.0 =>
        {
            Some(power_exp_integral(cp * ce, *exponent as u32, *rate, a, b))
        }
        (PiecewiseConstant { knots, values }, other)
        | (other, PiecewiseConstant { knots, values }) => {
            let mut total = 0.0;
            let mut lo = 0.0f64;
            for (i, &v) in values.iter().enumerate() {
                let hi = if i < knots.len() {
                    knots[i]
                } else {
                    f64::INFINITY
                };
                let s = lo.max(a);
                let e = hi.min(b);
                if e > s && v != 0.0 {
                    total += v * other.closed_integral(s, e)?;
                    if total.is_infinite() {
                        return Some(total);
                    }
                }
                lo = hi;
            }
            Some(total)
        }
        (Sum(children), other) | (other, Sum(children)) => {
            let mut total = 0.0;
            for c in children {
                total += product_closed_integral(c, other, a, b)?;
                if total.is_infinite() {
                    return Some(total);
                }
            }
            Some(total)
        }
        (Restrict { child, lo, hi }, other) | (other, Restrict { child, lo, hi }) => {
            let s = a.max(*lo);
            let e = b.min(*hi);
            if e <= s {
                Some(0.0)
            } else {
                product_closed_integral(child, other, s, e)
            }
        }
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eval_examples() {
        assert_eq!(WeightExpr::power(1.0, 2.0).eval(3.0), 9.0);
        let e = WeightExpr::exponential(1.0, 1.0).eval(0.5);
        assert!((e - 0.5f64.exp()).abs() < 1e-14);
        let s = WeightExpr::sum(vec![WeightExpr::power(1.0, 0.0), WeightExpr::power(2.0, 1.0)]);
        assert_eq!(s.eval(2.0), 5.0);
    }

    #[test]
    fn integrate_examples() {
        let tol = 1e-10;
        assert!((WeightExpr::power(1.0, 0.0).integrate(0.0, 2.0, tol).unwrap() - 2.0).abs() < 1e-12);
        let t = 1.3f64;
        let v = WeightExpr::exponential(1.0, 1.0).integrate(0.0, t, tol).unwrap();
        assert!((v - (t.exp() - 1.0)).abs() < 1e-12);
        assert!((WeightExpr::power(1.0, 1.0).integrate(1.0, 3.0, tol).unwrap() - 4.0).abs() < 1e-12);
        let d = WeightExpr::exponential(1.0, -1.0)
            .integrate(0.0, f64::INFINITY, tol)
            .unwrap();
        assert!((d - 1.0).abs() < 1e-12);
    }

    #[test]
    fn divergence_is_symbolic() {
        assert_eq!(
            WeightExpr::power(1.0, 0.0)
                .integrate(0.0, f64::INFINITY, 1e-10)
                .unwrap(),
            f64::INFINITY
        );
        assert_eq!(
            WeightExpr::power(1.0, -2.0).integrate(0.0, 1.0, 1e-10),
            Err(Error::NonIntegrableNearZero)
        );
        assert_eq!(
            WeightExpr::exponential(2.0, 0.5)
                .integrate(1.0, f64::INFINITY, 1e-10)
                .unwrap(),
            f64::INFINITY
        );
    }

    #[test]
    fn power_times_exp_closed_form() {
        // int_0^inf t^2 e^{-t} dt = 2
        let w = WeightExpr::product(WeightExpr::power(1.0, 2.0), WeightExpr::exponential(1.0, -1.0));
        let v = w.integrate(0.0, f64::INFINITY, 1e-10).unwrap();
        assert!((v - 2.0).abs() < 1e-12, "got {v}");
    }

    #[test]
    fn piecewise_exact() {
        let w = WeightExpr::piecewise(vec![1.0, 2.0], vec![3.0, 1.0, 0.5]);
        assert_eq!(w.eval(0.5), 3.0);
        assert_eq!(w.eval(1.0), 1.0);
        assert_eq!(w.eval(5.0), 0.5);
        let v = w.integrate(0.5, 3.0, 1e-10).unwrap();
        assert!((v - (0.5 * 3.0 + 1.0 + 0.5)).abs() < 1e-13);
        assert_eq!(w.integrate(0.0, f64::INFINITY, 1e-10).unwrap(), f64::INFINITY);
    }

    #[test]
    fn quadrature_matches_closed_form() {
        let w = WeightExpr::power(2.0, -0.5);
        for k in 0..20 {
            let a = 0.1 + 0.3 * k as f64;
            let b = a + 1.0 + 0.2 * k as f64;
            let exact = w.closed_integral(a, b).unwrap();
            let q = w.integrate_quadrature(a, b, 1e-11);
            assert!((q - exact).abs() <= 1e-9 * exact, "a={a} b={b}");
        }
    }
}
