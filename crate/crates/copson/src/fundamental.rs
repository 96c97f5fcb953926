//! The fundamental function `phi(t) = (int_0^t v(s) U(s,t)^{p/m} ds)^{1/p}`
//! with `U(s,t) = int_s^t u`, its a.e. derivative, admissibility of the weight
//! pair and mean-value level solves.

use std::collections::BTreeMap;
use std::sync::RwLock;

use crate::error::{Error, Result};
use crate::ext::xpow;
use crate::quad;
use crate::weights::WeightExpr;

/// Outcome of the admissibility probe: `phi` must stay in `(0, inf)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Admissibility {
    Admissible,
    /// `phi(t) = 0` at the witness point.
    DegenerateZero(f64),
    /// `phi(t) = inf` at the witness point.
    DegenerateInfinite(f64),
}

/// Which monotone functional a level solve targets.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LevelKind {
    /// `phi^p(t)`
    PhiP,
    /// `V(t) = int_0^t v`
    V,
}

pub struct FundamentalFunction {
    pub u: WeightExpr,
    pub v: WeightExpr,
    pub m: f64,
    pub p: f64,
    // cache of phi^p samples keyed by the bit pattern of t; phi^p is what the
    // recursions consume, phi is a root extraction on demand
    memo: RwLock<BTreeMap<u64, f64>>,
}

impl FundamentalFunction {
    pub fn new(u: WeightExpr, v: WeightExpr, m: f64, p: f64) -> Self {
        assert!(m > 0.0 && p > 0.0);
        FundamentalFunction {
            u,
            v,
            m,
            p,
            memo: RwLock::new(BTreeMap::new()),
        }
    }

    /// `V(t) = int_0^t v`.
    pub fn big_v(&self, t: f64, tol: f64) -> Result<f64> {
        self.v.integrate(0.0, t, tol)
    }

    /// `U(a, b) = int_a^b u`.
    pub fn u_between(&self, a: f64, b: f64, tol: f64) -> Result<f64> {
        self.u.integrate(a, b, tol)
    }

    /// `phi^p(t)`, memoized. `t` may be infinite. Divergence is reported as
    /// the value `inf`, never as an error.
    pub fn phi_p(&self, t: f64, tol: f64) -> Result<f64> {
        if t <= 0.0 {
            return Ok(0.0);
        }
        let key = t.to_bits();
        if let Some(&v) = self.memo.read().unwrap().get(&key) {
            return Ok(v);
        }
        let val = nested_vu_integral(&self.v, &self.u, self.p / self.m, t, tol)?;
        self.memo.write().unwrap().insert(key, val);
        Ok(val)
    }

    pub fn phi(&self, t: f64, tol: f64) -> Result<f64> {
        Ok(xpow(self.phi_p(t, tol)?, 1.0 / self.p))
    }

    /// `phi'(t)` per the closed formula
    /// `(1/m) phi^{1-p}(t) u(t) int_0^t v(s) U(s,t)^{p/m-1} ds`,
    /// with the vanishing-weight conventions applied. The coefficient comes
    /// from `(phi^p)'(t) = (p/m) u(t) int_0^t v U^{p/m-1}` and the chain rule.
    pub fn phi_prime(&self, t: f64, tol: f64) -> Result<f64> {
        assert!(t > 0.0 && t.is_finite());
        let ut = self.u.eval(t);
        if ut == 0.0 {
            return Ok(0.0);
        }
        let ph = self.phi(t, tol)?;
        if ph == 0.0 && self.p > 1.0 {
            return Err(Error::DegenerateAtPoint(t));
        }
        let coef = 1.0 / self.m;
        let inner = nested_vu_integral(&self.v, &self.u, self.p / self.m - 1.0, t, tol)?;
        Ok(coef * xpow(ph, 1.0 - self.p) * ut * inner)
    }

    /// Probe `phi` on the grid `2^{-probe_depth} .. 2^{probe_depth}` plus the
    /// symbolic endpoint checks inside `phi_p` and report the first failure
    /// of `0 < phi(t) < inf`.
    pub fn is_admissible(&self, probe_depth: u32, tol: f64) -> Admissibility {
        let d = probe_depth as i32;
        for k in -d..=d {
            let t = 2f64.powi(k);
            match self.phi_p(t, tol) {
                Err(_) => return Admissibility::DegenerateInfinite(t),
                Ok(val) => {
                    if val == 0.0 {
                        return Admissibility::DegenerateZero(t);
                    }
                    if val.is_infinite() {
                        return Admissibility::DegenerateInfinite(t);
                    }
                }
            }
        }
        Admissibility::Admissible
    }

    /// Solve `value(t) = target` for the monotone nondecreasing functional
    /// picked by `kind`, by bisection inside `bracket`.
    pub fn solve_level(
        &self,
        kind: LevelKind,
        target: f64,
        bracket: (f64, f64),
        tol: f64,
    ) -> Result<f64> {
        assert!(target > 0.0 && target.is_finite());
        let (mut lo, mut hi) = bracket;
        assert!(lo > 0.0 && hi > lo);
        let eval = |t: f64| -> Result<f64> {
            match kind {
                LevelKind::PhiP => self.phi_p(t, tol),
                LevelKind::V => self.big_v(t, tol),
            }
        };
        let flo = eval(lo)?;
        let fhi = eval(hi)?;
        if !(flo <= target && target <= fhi) {
            return Err(Error::TargetNotBracketed {
                target,
                lo: flo,
                hi: fhi,
            });
        }
        let mut best = hi;
        let mut best_res = (fhi - target).abs();
        for _ in 0..200 {
            let mid = if lo.min(hi) > 0.0 && hi / lo > 4.0 {
                (lo * hi).sqrt()
            } else {
                0.5 * (lo + hi)
            };
            if mid <= lo || mid >= hi {
                break;
            }
            let fm = eval(mid)?;
            let res = (fm - target).abs();
            if res < best_res {
                best = mid;
                best_res = res;
            }
            if res <= 1e-9 * target {
                return Ok(mid);
            }
            if fm < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        if best_res <= 1e-6 * target {
            Ok(best)
        } else {
            Err(Error::LevelSolveFailed(format!(
                "residual {best_res:.3e} at t = {best:.6e} for target {target:.6e}"
            )))
        }
    }
}

/// `int_0^t v(s) (int_s^t u)^e ds` with symbolic divergence detection at the
/// endpoints. `t` may be infinite only when `e > 0`. Divergence is the value
/// `inf`; the error path is reserved for a non-integrable `v` paired with a
/// vanishing `u` where the integral is genuinely `0 * inf` at every scale.
pub fn nested_vu_integral(
    v: &WeightExpr,
    u: &WeightExpr,
    e: f64,
    t: f64,
    tol: f64,
) -> Result<f64> {
    if v.is_zero() {
        return Ok(0.0);
    }
    if u.is_zero() {
        // U == 0 everywhere: integrand is v * 0^e
        return match e.partial_cmp(&0.0).unwrap() {
            std::cmp::Ordering::Greater => Ok(0.0),
            std::cmp::Ordering::Equal => v.integrate(0.0, t, tol),
            std::cmp::Ordering::Less => Ok(f64::INFINITY),
        };
    }
    if let Some(inf) = diverges_near_zero(v, u, e, t) {
        if inf {
            return Ok(f64::INFINITY);
        }
    }
    if t.is_infinite() {
        assert!(e > 0.0, "semi-infinite nested integral needs e > 0");
        if u.tail_diverges() {
            // U(s, inf) = inf for every s; v has positive mass somewhere
            return Ok(f64::INFINITY);
        }
        if tail_diverges_at_inf(v, u, e) {
            return Ok(f64::INFINITY);
        }
        let f = |s: f64| {
            let us = u.integrate(s, f64::INFINITY, tol / 10.0).unwrap_or(0.0);
            let vv = v.eval(s);
            if vv == 0.0 {
                0.0
            } else {
                vv * xpow(us, e)
            }
        };
        let head = quad::integrate_singular_lo(&f, 0.0, 1.0, tol);
        let tail = quad::integrate_to_inf(&f, 1.0, tol);
        return Ok((head + tail).max(0.0));
    }
    let f = |s: f64| {
        let us = u.integrate(s, t, tol / 10.0).unwrap_or(f64::INFINITY);
        let vv = v.eval(s);
        if vv == 0.0 {
            0.0
        } else {
            vv * xpow(us, e)
        }
    };
    // the integrand may be singular both at s = 0 (weights, or U blowing up)
    // and at s = t (U -> 0 raised to a negative power); peel shells at both.
    // The upper half runs in the gap variable x = t - s with U taken from
    // `integrate_back`, which stays smooth in x where `integrate(t - x, t)`
    // would quantize the gap at eps * t and stall the quadrature.
    let half = 0.5 * t;
    let head = quad::integrate_singular_lo(&f, 0.0, half, tol);
    let g = |x: f64| {
        let us = u.integrate_back(t, x, tol / 10.0);
        let vv = v.eval(t - x);
        if vv == 0.0 {
            0.0
        } else {
            vv * xpow(us, e)
        }
    };
    let tail = quad::integrate_singular_lo(&g, 0.0, half, tol);
    Ok((head + tail).max(0.0))
}

/// Certain divergence of `int_0 v(s) (c int_s u)^e ds` near `s = 0` by leaf
/// asymptotics; bounded positive factors on the inner integral do not change
/// the answer, so callers may use it for integrands of the same shape.
pub(crate) fn nested_diverges_near_zero(v: &WeightExpr, u: &WeightExpr, e: f64, t: f64) -> bool {
    diverges_near_zero(v, u, e, t) == Some(true)
}

/// Decide divergence of `int_0 v(s) U(s,t)^e ds` near `s = 0` from the leaf
/// asymptotics. Returns `Some(true)` on certain divergence, `Some(false)` or
/// `None` otherwise.
fn diverges_near_zero(v: &WeightExpr, u: &WeightExpr, e: f64, t: f64) -> Option<bool> {
    let av = v.asym_zero();
    if av.coeff == 0.0 {
        return Some(false);
    }
    let au = u.asym_zero();
    // growth exponent b of U(s,t) as s -> 0: s^{a+1} blowup when u is not
    // integrable at 0, a positive constant otherwise (log case a = -1 kept
    // as b = 0 with a logarithmic correction)
    let (b, logpow) = if au.coeff > 0.0 && au.alpha < -1.0 {
        (au.alpha + 1.0, 0.0)
    } else if au.coeff > 0.0 && au.alpha == -1.0 {
        (0.0, e)
    } else {
        // U(s,t) -> int_0^t u, a finite constant; zero limit means the
        // integrand vanishes near 0 for e > 0
        let l0 = u.integrate(0.0, t.min(1.0), 1e-6).unwrap_or(f64::INFINITY);
        if l0 == 0.0 {
            return Some(e < 0.0 && av.alpha <= -1.0);
        }
        (0.0, 0.0)
    };
    let a_eff = av.alpha + e * b;
    if a_eff < -1.0 {
        Some(true)
    } else if a_eff == -1.0 {
        // s^{-1} log^{logpow}: integrable at 0 only for logpow < -1
        Some(logpow >= -1.0)
    } else {
        Some(false)
    }
}

/// Divergence of `int^inf v(s) (int_s^inf u)^e ds` (`e > 0`, `int^inf u`
/// finite) from leaf asymptotics.
fn tail_diverges_at_inf(v: &WeightExpr, u: &WeightExpr, e: f64) -> bool {
    let av = v.asym_inf();
    if av.coeff == 0.0 {
        return false;
    }
    let au = u.asym_inf();
    if au.coeff == 0.0 {
        // u vanishes near inf, so U(s, inf) = 0 eventually
        return false;
    }
    // leading behavior of the tail integral int_s^inf u
    let (ta, tr) = if au.rate < 0.0 {
        (au.alpha, au.rate)
    } else {
        // rate 0 and alpha < -1 (caller already excluded a divergent tail)
        (au.alpha + 1.0, 0.0)
    };
    let rate = av.rate + e * tr;
    let alpha = av.alpha + e * ta;
    rate > 0.0 || (rate == 0.0 && alpha >= -1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flat() -> FundamentalFunction {
        FundamentalFunction::new(WeightExpr::constant(1.0), WeightExpr::constant(1.0), 1.0, 1.0)
    }

    #[test]
    fn phi_flat_weights() {
        // phi(t) = t^2/2
        let f = flat();
        let v = f.phi(2.0, 1e-10).unwrap();
        assert!((v - 2.0).abs() < 1e-8, "got {v}");
    }

    #[test]
    fn phi_exponential_v() {
        // u = 1, v = e^t: phi(t) = e^t - t - 1
        let f = FundamentalFunction::new(
            WeightExpr::constant(1.0),
            WeightExpr::exponential(1.0, 1.0),
            1.0,
            1.0,
        );
        let v = f.phi(1.0, 1e-10).unwrap();
        assert!((v - (1f64.exp() - 2.0)).abs() < 1e-8, "got {v}");
    }

    #[test]
    fn phi_singular_weights() {
        // u = t^{-1/2}, v = t^{-3/4}: phi(t) = (16/3) t^{3/4}
        let f = FundamentalFunction::new(
            WeightExpr::power(1.0, -0.5),
            WeightExpr::power(1.0, -0.75),
            1.0,
            1.0,
        );
        let v = f.phi(1.0, 1e-10).unwrap();
        assert!((v - 16.0 / 3.0).abs() < 1e-6, "got {v}");
        let v8 = f.phi(16.0, 1e-10).unwrap();
        assert!((v8 - 16.0 / 3.0 * 8.0).abs() < 1e-5, "got {v8}");
    }

    #[test]
    fn phi_prime_examples() {
        let f = flat();
        let v = f.phi_prime(3.0, 1e-10).unwrap();
        assert!((v - 3.0).abs() < 1e-8, "got {v}");

        let g = FundamentalFunction::new(
            WeightExpr::constant(1.0),
            WeightExpr::exponential(1.0, 1.0),
            1.0,
            1.0,
        );
        let d = g.phi_prime(1.0, 1e-10).unwrap();
        assert!((d - (1f64.exp() - 1.0)).abs() < 1e-8, "got {d}");
    }

    #[test]
    fn phi_prime_matches_finite_difference() {
        let f = FundamentalFunction::new(
            WeightExpr::power(1.0, -0.5),
            WeightExpr::constant(1.0),
            1.0,
            2.0,
        );
        let t = 1.7;
        let h = 1e-5;
        let fd = (f.phi(t + h, 1e-12).unwrap() - f.phi(t - h, 1e-12).unwrap()) / (2.0 * h);
        let an = f.phi_prime(t, 1e-12).unwrap();
        assert!((an - fd).abs() <= 1e-6 * fd.abs(), "analytic {an} fd {fd}");
    }

    #[test]
    fn admissibility_variants() {
        assert_eq!(flat().is_admissible(8, 1e-8), Admissibility::Admissible);

        let zero_u = FundamentalFunction::new(
            WeightExpr::zero(),
            WeightExpr::constant(1.0),
            1.0,
            1.0,
        );
        assert!(matches!(
            zero_u.is_admissible(8, 1e-8),
            Admissibility::DegenerateZero(_)
        ));

        // v = t^{-2} not integrable near 0 while U(s,t) stays bounded below
        let bad_v = FundamentalFunction::new(
            WeightExpr::constant(1.0),
            WeightExpr::power(1.0, -2.0),
            1.0,
            1.0,
        );
        assert!(matches!(
            bad_v.is_admissible(8, 1e-8),
            Admissibility::DegenerateInfinite(_)
        ));
    }

    #[test]
    fn phi_at_infinity() {
        // u = v = e^{-t}: phi(inf) finite
        let f = FundamentalFunction::new(
            WeightExpr::exponential(1.0, -1.0),
            WeightExpr::exponential(1.0, -1.0),
            1.0,
            1.0,
        );
        let v = f.phi_p(f64::INFINITY, 1e-10).unwrap();
        // int_0^inf e^{-s} e^{-s} ds = 1/2
        assert!((v - 0.5).abs() < 1e-8, "got {v}");

        assert_eq!(flat().phi_p(f64::INFINITY, 1e-10).unwrap(), f64::INFINITY);
    }

    #[test]
    fn level_solves() {
        let f = flat();
        // phi^p(t) = t^2/2; target 2 -> t = 2
        let t = f.solve_level(LevelKind::PhiP, 2.0, (1e-6, 1e6), 1e-10).unwrap();
        assert!((t - 2.0).abs() < 1e-6, "got {t}");
        let t = f.solve_level(LevelKind::V, 1.0, (1e-6, 1e6), 1e-10).unwrap();
        assert!((t - 1.0).abs() < 1e-6, "got {t}");

        let g = FundamentalFunction::new(
            WeightExpr::constant(1.0),
            WeightExpr::exponential(1.0, 1.0),
            1.0,
            1.0,
        );
        let t = g
            .solve_level(LevelKind::V, 1f64.exp() - 1.0, (1e-6, 1e3), 1e-10)
            .unwrap();
        assert!((t - 1.0).abs() < 1e-6, "got {t}");

        assert!(matches!(
            f.solve_level(LevelKind::V, 1.0, (2.0, 3.0), 1e-10),
            Err(Error::TargetNotBracketed { .. })
        ));
    }
}
