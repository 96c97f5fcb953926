//! Discretizing sequences: construction by mean-value level solves, residual
//! verification of their defining inequalities, the covering estimates they
//! satisfy, and the discretized form of the Copson-Lorentz functional.

use serde::Serialize;
use serde_json::json;

use crate::error::{Error, Result};
use crate::ext::xpow;
use crate::fundamental::{Admissibility, FundamentalFunction, LevelKind};
use crate::quad;
use crate::step::StepFunction;

/// Whether the index set is `{k <= 0}` (`Zero`) or all of `Z` (`Infinite`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum KKind {
    Zero,
    Infinite,
}

/// Which of the two level equations held with equality at index k: `InK1`
/// marks the V-equation, `InK2` the phi^p-equation. Ties go to `InK1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Label {
    InK1,
    InK2,
}

/// A truncated window of a discretizing sequence. `points[i]` is `t_k` for
/// `k = k_min + i`; when `k_kind == Zero` the last stored point is `t_0 = inf`.
/// `labels[i]` tags index `k = k_min + i` (the step from `t_{k-1}` to `t_k`);
/// the step below `k_min` was solved during construction solely to label it.
#[derive(Debug, Clone)]
pub struct DiscretizingSequence {
    pub k_kind: KKind,
    pub k_min: i64,
    pub points: Vec<f64>,
    pub labels: Vec<Label>,
    pub t0_is_infinity: bool,
}

impl DiscretizingSequence {
    pub fn k_max(&self) -> i64 {
        self.k_min + self.points.len() as i64 - 1
    }

    pub fn t(&self, k: i64) -> Result<f64> {
        if k < self.k_min || k > self.k_max() {
            return Err(Error::IndexOutOfWindow(k));
        }
        Ok(self.points[(k - self.k_min) as usize])
    }

    pub fn label(&self, k: i64) -> Result<Label> {
        if k < self.k_min || k > self.k_max() {
            return Err(Error::IndexOutOfWindow(k));
        }
        Ok(self.labels[(k - self.k_min) as usize])
    }

    /// JSON dump as an array of `{k, t_k, label}`.
    pub fn dump_json(&self) -> serde_json::Value {
        let entries: Vec<serde_json::Value> = (self.k_min..=self.k_max())
            .map(|k| {
                let t = self.t(k).unwrap();
                json!({
                    "k": k,
                    "t_k": if t.is_finite() { json!(t) } else { json!("inf") },
                    "label": format!("{:?}", self.label(k).unwrap()),
                })
            })
            .collect();
        json!({
            "K": match self.k_kind { KKind::Zero => "zero", KKind::Infinite => "infinite" },
            "t0": if self.t0_is_infinity { json!("inf") } else { json!(self.t(0).ok()) },
            "points": entries,
        })
    }
}

/// The doubling base `2^{p/m+1}` of the level recursions.
fn ratio_base(f: &FundamentalFunction) -> f64 {
    2f64.powf(f.p / f.m + 1.0)
}

/// Solve `g(x) = target` for the nondecreasing level functional `kind`, with
/// the bracket grown geometrically around `seed`. An infinite target means
/// the equation has no finite solution and yields `inf`.
fn solve_grown(
    f: &FundamentalFunction,
    kind: LevelKind,
    target: f64,
    seed: f64,
    upward: bool,
    tol: f64,
) -> Result<f64> {
    if target.is_infinite() {
        return Ok(f64::INFINITY);
    }
    let eval = |t: f64| -> Result<f64> {
        match kind {
            LevelKind::PhiP => f.phi_p(t, tol),
            LevelKind::V => f.big_v(t, tol),
        }
    };
    let (mut lo, mut hi);
    if upward {
        lo = seed;
        hi = seed * 2.0;
        let mut grow = 0;
        while eval(hi)? < target {
            hi *= 2.0;
            grow += 1;
            if grow > 2000 || !hi.is_finite() {
                return Err(Error::LevelSolveFailed(format!(
                    "level {target:.3e} not reached below t = {hi:.3e}"
                )));
            }
        }
    } else {
        hi = if seed.is_finite() {
            seed
        } else {
            // t_0 = inf: find any finite point above the target level first
            let mut h = 1.0;
            let mut grow = 0;
            while eval(h)? < target {
                h *= 2.0;
                grow += 1;
                if grow > 2000 {
                    return Err(Error::LevelSolveFailed(format!(
                        "level {target:.3e} not reached at any finite point"
                    )));
                }
            }
            h
        };
        lo = hi * 0.5;
        let mut shrink = 0;
        while eval(lo)? > target {
            lo *= 0.5;
            shrink += 1;
            if shrink > 2000 || lo < 1e-300 {
                return Err(Error::LevelSolveFailed(format!(
                    "level {target:.3e} not undercut above t = {lo:.3e}"
                )));
            }
        }
    }
    f.solve_level(kind, target, (lo, hi), tol)
}

/// Build a discretizing sequence truncated to `depth` indices in each
/// available direction.
pub fn build_sequence(
    f: &FundamentalFunction,
    depth: u32,
    tol: f64,
) -> Result<DiscretizingSequence> {
    if f.is_admissible(8, tol) != Admissibility::Admissible {
        return Err(Error::NotAdmissible);
    }
    let r = ratio_base(f);
    let v_total = f.big_v(f64::INFINITY, tol)?;
    let phi_total = f.phi_p(f64::INFINITY, tol)?;
    let zero_kind = v_total.is_finite() || phi_total.is_finite();

    // one step: from t_k go down to t_{k-1} = min(x_k, y_k) and label k
    let step_down = |t_k: f64| -> Result<(f64, Label)> {
        let tv = f.big_v(t_k, tol)? / r;
        let tp = f.phi_p(t_k, tol)? / r;
        let x = solve_grown(f, LevelKind::V, tv, t_k, false, tol)?;
        let y = solve_grown(f, LevelKind::PhiP, tp, t_k, false, tol)?;
        let lbl = if x <= y { Label::InK1 } else { Label::InK2 };
        Ok((x.min(y), lbl))
    };
    // one step: from t_{k-1} go up to t_k = max(z_k, s_k) and label k
    let step_up = |t_km1: f64| -> Result<(f64, Label)> {
        let tv = r * f.big_v(t_km1, tol)?;
        let tp = r * f.phi_p(t_km1, tol)?;
        let z = solve_grown(f, LevelKind::V, tv, t_km1, true, tol)?;
        let s = solve_grown(f, LevelKind::PhiP, tp, t_km1, true, tol)?;
        let lbl = if z >= s { Label::InK1 } else { Label::InK2 };
        Ok((z.max(s), lbl))
    };

    let t0 = if zero_kind { f64::INFINITY } else { 1.0 };
    // downward: step k produces t_{k-1} from t_k and labels k; the step below
    // the window runs solely to label k_min
    let mut pts = vec![t0];
    let mut lbls = Vec::new();
    let mut cur = t0;
    for _ in 0..depth {
        let (t, lbl) = step_down(cur)?;
        lbls.push(lbl);
        pts.push(t);
        cur = t;
    }
    let (_, lbl_min) = step_down(cur)?;
    lbls.push(lbl_min);
    pts.reverse(); // t_{-depth} .. t_0
    lbls.reverse(); // labels for k = -depth .. 0
    let k_min = -(depth as i64);

    if !zero_kind {
        let mut cur = pts[pts.len() - 1]; // t_0 = 1
        for _ in 1..=depth {
            let (t, lbl) = step_up(cur)?;
            pts.push(t);
            lbls.push(lbl);
            cur = t;
        }
    }

    Ok(DiscretizingSequence {
        k_kind: if zero_kind { KKind::Zero } else { KKind::Infinite },
        k_min,
        points: pts,
        labels: lbls,
        t0_is_infinity: zero_kind,
    })
}

/// Maximal relative violations of the four defining relations over the
/// stored window (inequalities for every step, equalities where labeled).
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SequenceReport {
    pub v_growth: f64,
    pub phi_growth: f64,
    pub v_equality: f64,
    pub phi_equality: f64,
}

pub fn verify_sequence(
    seq: &DiscretizingSequence,
    f: &FundamentalFunction,
    tol: f64,
) -> Result<SequenceReport> {
    let r = ratio_base(f);
    let mut rep = SequenceReport {
        v_growth: 0.0,
        phi_growth: 0.0,
        v_equality: 0.0,
        phi_equality: 0.0,
    };
    // relative shortfall of value >= goal; equality residual |value/goal - 1|
    let shortfall = |value: f64, goal: f64| -> f64 {
        if goal == 0.0 || value.is_infinite() {
            0.0
        } else {
            ((goal - value) / goal).max(0.0)
        }
    };
    let eq_res = |value: f64, goal: f64| -> f64 {
        if value.is_infinite() && goal.is_infinite() {
            0.0
        } else if goal == 0.0 || goal.is_infinite() || value.is_infinite() {
            f64::INFINITY
        } else {
            (value / goal - 1.0).abs()
        }
    };
    for k in (seq.k_min + 1)..=seq.k_max() {
        let t_km1 = seq.t(k - 1)?;
        let t_k = seq.t(k)?;
        let (v0, v1) = (f.big_v(t_km1, tol)?, f.big_v(t_k, tol)?);
        let (p0, p1) = (f.phi_p(t_km1, tol)?, f.phi_p(t_k, tol)?);
        rep.v_growth = rep.v_growth.max(shortfall(v1, r * v0));
        rep.phi_growth = rep.phi_growth.max(shortfall(p1, r * p0));
        match seq.label(k)? {
            Label::InK1 => rep.v_equality = rep.v_equality.max(eq_res(v1, r * v0)),
            Label::InK2 => rep.phi_equality = rep.phi_equality.max(eq_res(p1, r * p0)),
        }
    }
    Ok(rep)
}

/// Both sides of the two covering estimates at index `k` and `t` inside
/// `[t_{k-1}, t_k]`. The second estimate reaches back to `t_{k-3}`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CoveringEstimates {
    pub v_lhs: f64,
    pub v_rhs: f64,
    pub phi_lhs: f64,
    pub phi_rhs: f64,
}

pub fn covering_estimates(
    seq: &DiscretizingSequence,
    f: &FundamentalFunction,
    k: i64,
    t: f64,
    tol: f64,
) -> Result<CoveringEstimates> {
    let r = ratio_base(f);
    let e = f.p / f.m;
    let t_k = seq.t(k)?;
    let t_km1 = seq.t(k - 1)?;
    let t_km2 = seq.t(k - 2)?;
    let t_km3 = seq.t(k - 3)?;
    assert!(t >= t_km1 && t <= t_k, "t must lie in [t_(k-1), t_k]");

    let v_lhs = f.big_v(t_k, tol)?;
    let v_rhs = r / (r - 1.0) * (f.big_v(t_k, tol)? - f.big_v(t_km1, tol)?);

    let phi_lhs = f.phi_p(t, tol)?;
    let c1 = 2f64.powf(3.0 * f.p / f.m + 3.0) / (r - 1.0);
    let c2 = 2f64.powf(f.p / f.m + 2.0);
    let c3 = 3.0 * 2f64.powf(2.0 * f.p / f.m + 1.0) / (r - 1.0);
    let term1 = c1
        * (f.big_v(t_km2, tol)? - f.big_v(t_km3, tol)?)
        * xpow(f.u_between(t_km2, t_km1, tol)?, e);
    let mid = quad::integrate(
        &|s: f64| {
            let vv = f.v.eval(s);
            if vv == 0.0 {
                0.0
            } else {
                vv * xpow(f.u.integrate(s, t_km1, tol / 10.0).unwrap_or(f64::INFINITY), e)
            }
        },
        t_km2,
        t_km1,
        tol,
    );
    let term2 = c2 * mid;
    let term3 = c3
        * (f.big_v(t_km1, tol)? - f.big_v(t_km2, tol)?)
        * xpow(f.u_between(t_km1, t, tol)?, e);
    Ok(CoveringEstimates {
        v_lhs,
        v_rhs,
        phi_lhs,
        phi_rhs: term1 + term2 + term3,
    })
}

/// The continuous Copson-Lorentz functional of `h`:
/// `int_0^inf v(t) (int_t^inf u(s) (int_s^inf h)^m ds)^{p/m} dt`.
/// Divergence is returned as `inf`.
pub fn continuous_functional(f: &FundamentalFunction, h: &StepFunction, tol: f64) -> Result<f64> {
    if h.is_zero() {
        return Ok(0.0);
    }
    let support = h.support_end();
    let e = f.p / f.m;
    // the tail H = int_s^inf h vanishes beyond the support, so the inner
    // integral is over (t, support) and the outer over (0, support); near
    // t = 0 the integrand behaves like v(t) (c int_t u)^{p/m}, the same
    // shape as phi^p, so the same symbolic divergence test applies
    if crate::fundamental::nested_diverges_near_zero(&f.v, &f.u, e, support) {
        return Ok(f64::INFINITY);
    }
    let inner = |t: f64| -> f64 {
        if t >= support {
            return 0.0;
        }
        quad::integrate(
            &|s: f64| {
                let us = f.u.eval(s);
                if us == 0.0 {
                    0.0
                } else {
                    us * h.tail_integral(s).powf(f.m)
                }
            },
            t,
            support,
            tol,
        )
    };
    let outer = |t: f64| {
        let vv = f.v.eval(t);
        if vv == 0.0 {
            0.0
        } else {
            vv * xpow(inner(t), e)
        }
    };
    Ok(quad::integrate_singular_lo(&outer, 0.0, support, tol).max(0.0))
}

/// Which discrete form of the functional to evaluate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DiscretizedForm {
    /// Sum of cell integrals against the phi^m kernel.
    PhiKernel,
    /// Split form: phi^p head terms plus the phi-derivative cell integrals.
    Split,
}

/// The discrete sum approximating the continuous functional over the stored
/// window. The region below `t_{k_min}` is silently truncated (it vanishes
/// as depth grows); support escaping above the window is an error.
pub fn discretized_functional(
    seq: &DiscretizingSequence,
    f: &FundamentalFunction,
    h: &StepFunction,
    form: DiscretizedForm,
    tol: f64,
) -> Result<f64> {
    if h.is_zero() {
        return Ok(0.0);
    }
    let support = h.support_end();
    let top = seq.t(seq.k_max())?;
    if top.is_finite() && support > top * (1.0 + 1e-12) {
        return Err(Error::SupportNotCovered(top));
    }
    let e = f.p / f.m;
    let mut total = 0.0;
    for k in (seq.k_min + 1)..=seq.k_max() {
        let lo = seq.t(k - 1)?;
        let t_k = seq.t(k)?;
        let hi = t_k.min(support);
        if hi <= lo {
            continue;
        }
        // int_y^{t_k} h = int_y^{min(t_k, support)} h for y in the cell
        let h_to = |y: f64| h.integral_to(hi) - h.integral_to(y);
        match form {
            DiscretizedForm::PhiKernel => {
                let cell = if f.m == 1.0 {
                    // summand reduces to (int phi h)^p over the cell
                    quad::integrate(
                        &|y: f64| {
                            let hy = h.eval(y);
                            if hy == 0.0 {
                                0.0
                            } else {
                                f.phi(y, tol).unwrap_or(f64::INFINITY) * hy
                            }
                        },
                        lo,
                        hi,
                        tol,
                    )
                } else {
                    quad::integrate(
                        &|y: f64| {
                            let hy = h.eval(y);
                            if hy == 0.0 {
                                return 0.0;
                            }
                            let ph = f.phi(y, tol).unwrap_or(f64::INFINITY);
                            xpow(ph, f.m) * xpow(h_to(y), f.m - 1.0) * hy
                        },
                        lo,
                        hi,
                        tol,
                    )
                };
                total += xpow(cell.max(0.0), e);
            }
            DiscretizedForm::Split => {
                let mass = h.integral_to(hi) - h.integral_to(lo);
                total += f.phi_p(lo, tol)? * mass.powf(f.p);
                let cell = quad::integrate(
                    &|y: f64| {
                        let tail = h_to(y);
                        if tail == 0.0 {
                            return 0.0;
                        }
                        let ph = f.phi(y, tol).unwrap_or(f64::INFINITY);
                        let dph = f.phi_prime(y, tol).unwrap_or(f64::INFINITY);
                        if dph == 0.0 {
                            return 0.0;
                        }
                        xpow(ph, f.m - 1.0) * dph * tail.powf(f.m)
                    },
                    lo,
                    hi,
                    tol,
                );
                total += xpow(cell.max(0.0), e);
            }
        }
    }
    Ok(total)
}
