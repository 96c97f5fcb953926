//! Integral conditions characterizing the embedding of `CL^{m,p}(u,v)` into
//! `Lambda^q(w)`, split into four exponent regimes. Two formula sets exist:
//! the general-m set (names A7..A12) and an independently written m=1 set
//! (names A1..A6); they compute the same objects at m=1 and serve as
//! cross-checks against exponent transcription mistakes.

use rayon::prelude::*;
use serde_json::json;

use crate::error::{Error, Result};
use crate::ext::{xmul, xpow};
use crate::fundamental::{nested_vu_integral, Admissibility, FundamentalFunction};
use crate::grid::{log_trapezoid_with_tails, sup_grid_only, sup_refine, Grid};
use crate::weights::WeightExpr;

/// The four exponent regimes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Case {
    I,
    II,
    III,
    IV,
}

impl Case {
    pub fn name(&self) -> &'static str {
        match self {
            Case::I => "I",
            Case::II => "II",
            Case::III => "III",
            Case::IV => "IV",
        }
    }
}

/// Exponent triple with the derived quantities the conditions use.
#[derive(Debug, Clone, Copy)]
pub struct Exponents {
    pub m: f64,
    pub p: f64,
    pub q: f64,
    /// `pq/(p-q)`, defined when p != q.
    pub r: Option<f64>,
    pub case: Case,
}

/// Case selection: I when m <= q and p <= q; II when m <= q < p; III when
/// p <= q < m; IV when q < m and q < p. Total and single-valued.
pub fn classify(m: f64, p: f64, q: f64) -> Exponents {
    assert!(m > 0.0 && p > 0.0 && q > 0.0);
    let case = if m <= q {
        if p <= q {
            Case::I
        } else {
            Case::II
        }
    } else if p <= q {
        Case::III
    } else {
        Case::IV
    };
    let r = if p != q { Some(p * q / (p - q)) } else { None };
    Exponents { m, p, q, r, case }
}

/// Grid-sampled quantities shared by every condition evaluator.
pub struct CondGrid {
    pub pts: Vec<f64>,
    /// `W(t) = int_0^t w`; identically `inf` when w is not integrable at 0.
    pub w_cum: Vec<f64>,
    pub v_cum: Vec<f64>,
    /// `int_{pts[0]}^{pts[i]} u`; differences give U between grid points.
    pub u_cum: Vec<f64>,
    pub u_at: Vec<f64>,
    pub v_at: Vec<f64>,
    /// `phi^p` at the grid points.
    pub phi_p: Vec<f64>,
    /// `psi(y) = int_0^y v(s) U^{p/m-1}(s,y) ds`.
    pub psi: Vec<f64>,
    pub w_total: f64,
    pub phi_p_inf: f64,
}

pub fn build_cond_grid(
    f: &FundamentalFunction,
    w: &WeightExpr,
    grid: &Grid,
) -> Result<CondGrid> {
    let pts = grid.points();
    let tol = grid.tol;
    let n = pts.len();

    let cum = |wt: &WeightExpr, from_zero: bool| -> Vec<f64> {
        let mut out = Vec::with_capacity(n);
        let head = if from_zero {
            wt.integrate(0.0, pts[0], tol).unwrap_or(f64::INFINITY)
        } else {
            0.0
        };
        out.push(head);
        for i in 1..n {
            let seg = wt.integrate(pts[i - 1], pts[i], tol).unwrap_or(f64::INFINITY);
            let prev = out[i - 1];
            out.push(prev + seg);
        }
        out
    };
    let w_cum = cum(w, true);
    let v_cum = cum(&f.v, true);
    let u_cum = cum(&f.u, false);
    let u_at: Vec<f64> = pts.iter().map(|&t| f.u.eval(t)).collect();
    let v_at: Vec<f64> = pts.iter().map(|&t| f.v.eval(t)).collect();

    let phi_p: Vec<f64> = pts
        .par_iter()
        .map(|&t| f.phi_p(t, tol).unwrap_or(f64::INFINITY))
        .collect();
    let e_psi = f.p / f.m - 1.0;
    let psi: Vec<f64> = pts
        .par_iter()
        .map(|&t| nested_vu_integral(&f.v, &f.u, e_psi, t, tol).unwrap_or(f64::INFINITY))
        .collect();

    let w_total = w.integrate(0.0, f64::INFINITY, tol).unwrap_or(f64::INFINITY);
    let phi_p_inf = f.phi_p(f64::INFINITY, tol)?;

    Ok(CondGrid {
        pts,
        w_cum,
        v_cum,
        u_cum,
        u_at,
        v_at,
        phi_p,
        psi,
        w_total,
        phi_p_inf,
    })
}

/// `sup_t W(t)^{1/q} phi^p(t)^{-1/p}` (the case-I condition), with one
/// golden-section refinement around the grid argmax.
pub fn condition_a7(
    f: &FundamentalFunction,
    w: &WeightExpr,
    ex: &Exponents,
    cg: &CondGrid,
) -> f64 {
    let (p, q) = (ex.p, ex.q);
    let vals: Vec<f64> = (0..cg.pts.len())
        .map(|i| xmul(xpow(cg.w_cum[i], 1.0 / q), xpow(cg.phi_p[i], -1.0 / p)))
        .collect();
    let live = |t: f64| {
        let wt = w.integrate(0.0, t, cg_tol()).unwrap_or(f64::INFINITY);
        let ph = f.phi_p(t, cg_tol()).unwrap_or(f64::INFINITY);
        xmul(xpow(wt, 1.0 / q), xpow(ph, -1.0 / p))
    };
    sup_refine(&cg.pts, &vals, &live).value
}

fn cg_tol() -> f64 {
    1e-10
}

/// Pointwise part of the sup-over-y expression in the case-II condition:
/// `W(y)^{ratio} / phi^p(y)^{ratio}`.
pub(crate) fn case2_kernel(cg: &CondGrid, ratio: f64) -> Vec<f64> {
    (0..cg.pts.len())
        .map(|i| xmul(xpow(cg.w_cum[i], ratio), xpow(cg.phi_p[i], -ratio)))
        .collect()
}

/// Case-II shape: `( int v(t) sup_{y>t} U(t,y)^{uexp} k(y) dt )^{oexp}`.
pub(crate) fn integral_of_sup(cg: &CondGrid, uexp: f64, kernel: &[f64], oexp: f64) -> f64 {
    let n = cg.pts.len();
    let outer: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut best = 0.0f64;
            for j in i..n {
                let uij = (cg.u_cum[j] - cg.u_cum[i]).max(0.0);
                let val = xmul(xpow(uij, uexp), kernel[j]);
                if val > best {
                    best = val;
                }
            }
            xmul(cg.v_at[i], best)
        })
        .collect();
    xpow(log_trapezoid_with_tails(&cg.pts, &outer), oexp)
}

/// `( int_0^inf v(t) sup_{y>t} U^{p/m}(t,y) W(y)^{p/(p-q)} phi^p(y)^{-p/(p-q)} dt )^{(p-q)/(pq)}`
/// (the case-II condition).
pub fn condition_a8(ex: &Exponents, cg: &CondGrid) -> f64 {
    let (m, p, q) = (ex.m, ex.p, ex.q);
    let ratio = p / (p - q);
    integral_of_sup(cg, p / m, &case2_kernel(cg, ratio), (p - q) / (p * q))
}

/// Per-point factor `W^{wexp} u psi / phi^p^{dexp}` of the tail integrands.
pub(crate) fn tail_base(cg: &CondGrid, wexp: f64, dexp: f64) -> Vec<f64> {
    (0..cg.pts.len())
        .map(|i| {
            let a = xmul(xpow(cg.w_cum[i], wexp), cg.u_at[i]);
            let b = xmul(a, cg.psi[i]);
            xmul(b, xpow(cg.phi_p[i], -dexp))
        })
        .collect()
}

/// Tail integral `int_{t_i}^inf base(y) U(t_i, y)^{uexp} dy` for every grid
/// index i, by log-trapezoid over the window plus power-law extrapolation of
/// the last segment. `uexp == 0` reduces to one backward accumulation.
pub(crate) fn tail_integrals(cg: &CondGrid, base: &[f64], uexp: f64) -> Vec<f64> {
    let n = cg.pts.len();
    let pts = &cg.pts;
    let right_tail = |g_prev: f64, g_last: f64| -> f64 {
        if g_last <= 0.0 {
            return 0.0;
        }
        if g_prev <= 0.0 {
            return f64::INFINITY;
        }
        let s = ((g_last * pts[n - 1]) / (g_prev * pts[n - 2])).ln()
            / (pts[n - 1] / pts[n - 2]).ln();
        if s >= -1e-4 {
            f64::INFINITY
        } else {
            g_last * pts[n - 1] / (-s)
        }
    };
    if uexp == 0.0 {
        let mut out = vec![0.0f64; n];
        let mut acc = right_tail(base[n - 2], base[n - 1]);
        out[n - 1] = acc;
        for i in (0..n - 1).rev() {
            let dln = (pts[i + 1] / pts[i]).ln();
            acc += 0.5 * (base[i] * pts[i] + base[i + 1] * pts[i + 1]) * dln;
            out[i] = acc;
        }
        return out;
    }
    (0..n)
        .into_par_iter()
        .map(|i| {
            let mut acc = 0.0f64;
            let g = |j: usize| {
                let uij = (cg.u_cum[j] - cg.u_cum[i]).max(0.0);
                xmul(xpow(uij, uexp), base[j])
            };
            let mut prev = g(i);
            for j in i + 1..n {
                let cur = g(j);
                if cur.is_infinite() || prev.is_infinite() {
                    return f64::INFINITY;
                }
                let dln = (pts[j] / pts[j - 1]).ln();
                acc += 0.5 * (prev * pts[j - 1] + cur * pts[j]) * dln;
                prev = cur;
            }
            if i + 1 < n {
                acc += right_tail(g(n - 2), g(n - 1));
            } else {
                acc += right_tail(base[n - 2].min(prev), prev);
            }
            acc
        })
        .collect()
}

/// Case-III conditions: the pair of suprema plus the endpoint quotient.
/// Denominator power `2 + mq/(p(m-q))` per the printed formulas.
pub fn condition_a9_a10_a11(ex: &Exponents, cg: &CondGrid) -> (f64, f64, f64) {
    let (m, p, q) = (ex.m, ex.p, ex.q);
    let wexp = m / (m - q);
    let dexp = 2.0 + m * q / (p * (m - q));
    let sup_exp = (m - q) / (m * q);
    let base = tail_base(cg, wexp, dexp);

    let t9 = tail_integrals(cg, &base, p / m);
    let vals9: Vec<f64> = (0..cg.pts.len())
        .map(|i| xpow(xmul(cg.v_cum[i], t9[i]), sup_exp))
        .collect();
    let a9 = sup_grid_only(&cg.pts, &vals9).value;

    let t10 = tail_integrals(cg, &base, 0.0);
    let vals10: Vec<f64> = (0..cg.pts.len())
        .map(|i| xpow(xmul(cg.phi_p[i], t10[i]), sup_exp))
        .collect();
    let a10 = sup_grid_only(&cg.pts, &vals10).value;

    let a11 = condition_a11(ex, cg);
    (a9, a10, a11)
}

/// `W(inf)^{1/q} phi(inf)^{-1}` with the extended-value conventions
/// (in particular `inf * 0 = 0` when phi(inf) diverges).
pub fn condition_a11(ex: &Exponents, cg: &CondGrid) -> f64 {
    xmul(
        xpow(cg.w_total, 1.0 / ex.q),
        xpow(cg.phi_p_inf, -1.0 / ex.p),
    )
}

/// The case-IV integral condition, with `U^{(p-q)/(m-q)}(t,y)` inside and
/// denominator power `1 + m/(m-q)`.
pub fn condition_a12(ex: &Exponents, cg: &CondGrid) -> f64 {
    let (m, p, q) = (ex.m, ex.p, ex.q);
    let base = tail_base(cg, m / (m - q), 1.0 + m / (m - q));
    let t = tail_integrals(cg, &base, (p - q) / (m - q));
    let inner_pow = p * (m - q) / (m * (p - q));
    let outer: Vec<f64> = (0..cg.pts.len())
        .map(|i| xmul(cg.v_at[i], xpow(t[i], inner_pow)))
        .collect();
    xpow(
        log_trapezoid_with_tails(&cg.pts, &outer),
        (p - q) / (p * q),
    )
}

/// Per-case condition values, their names, and the resulting estimate of the
/// optimal embedding constant.
#[derive(Debug, Clone)]
pub struct ConditionReport {
    pub case: Case,
    pub conditions: Vec<(String, f64)>,
    pub c_estimate: f64,
    pub embedding_holds: bool,
}

impl ConditionReport {
    fn from_values(case: Case, conditions: Vec<(String, f64)>) -> Self {
        let c_estimate: f64 = conditions.iter().map(|(_, v)| *v).sum();
        let embedding_holds = c_estimate.is_finite();
        ConditionReport {
            case,
            conditions,
            c_estimate,
            embedding_holds,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let jval = |v: f64| {
            if v.is_finite() {
                json!(v)
            } else {
                json!("inf")
            }
        };
        let conds: serde_json::Map<String, serde_json::Value> = self
            .conditions
            .iter()
            .map(|(k, v)| (k.clone(), jval(*v)))
            .collect();
        json!({
            "case": self.case.name(),
            "conditions": conds,
            "C_estimate": jval(self.c_estimate),
            "embedding_holds": self.embedding_holds,
        })
    }
}

/// Evaluate the conditions of the regime of (m, p, q) and estimate the
/// optimal constant of the embedding.
pub fn embedding_constant(
    u: &WeightExpr,
    v: &WeightExpr,
    w: &WeightExpr,
    m: f64,
    p: f64,
    q: f64,
    grid: &Grid,
) -> Result<ConditionReport> {
    let f = FundamentalFunction::new(u.clone(), v.clone(), m, p);
    if f.is_admissible(8, grid.tol) != Admissibility::Admissible {
        return Err(Error::NotAdmissible);
    }
    let ex = classify(m, p, q);
    let cg = build_cond_grid(&f, w, grid)?;
    let conditions = match ex.case {
        Case::I => vec![("A7".to_string(), condition_a7(&f, w, &ex, &cg))],
        Case::II => vec![("A8".to_string(), condition_a8(&ex, &cg))],
        Case::III => {
            let (a9, a10, a11) = condition_a9_a10_a11(&ex, &cg);
            vec![
                ("A9".to_string(), a9),
                ("A10".to_string(), a10),
                ("A11".to_string(), a11),
            ]
        }
        Case::IV => {
            let a11 = condition_a11(&ex, &cg);
            let a12 = condition_a12(&ex, &cg);
            vec![("A11".to_string(), a11), ("A12".to_string(), a12)]
        }
    };
    Ok(ConditionReport::from_values(ex.case, conditions))
}

/// The m = 1 formula set, written with the conjugate exponent `q' = q/(q-1)`
/// and `r = pq/(p-q)` exactly as printed, as an independent cross-check of
/// the general-m set. Requires `m == 1` semantics: the caller supplies the
/// same grid data built for m = 1.
pub fn embedding_constant_m1(
    u: &WeightExpr,
    v: &WeightExpr,
    w: &WeightExpr,
    p: f64,
    q: f64,
    grid: &Grid,
) -> Result<ConditionReport> {
    let f = FundamentalFunction::new(u.clone(), v.clone(), 1.0, p);
    if f.is_admissible(8, grid.tol) != Admissibility::Admissible {
        return Err(Error::NotAdmissible);
    }
    let cg = build_cond_grid(&f, w, grid)?;
    let ex = classify(1.0, p, q);

    let qp = q / (q - 1.0); // q', negative for q < 1
    let conditions = if q >= 1.0 && p <= q {
        // sup W^{1/q} (int v U^p)^{-1/p}
        let vals: Vec<f64> = (0..cg.pts.len())
            .map(|i| xmul(xpow(cg.w_cum[i], 1.0 / q), xpow(cg.phi_p[i], -1.0 / p)))
            .collect();
        let live = |t: f64| {
            let wt = w.integrate(0.0, t, grid.tol).unwrap_or(f64::INFINITY);
            let ph = f.phi_p(t, grid.tol).unwrap_or(f64::INFINITY);
            xmul(xpow(wt, 1.0 / q), xpow(ph, -1.0 / p))
        };
        vec![(
            "A1".to_string(),
            sup_refine(&cg.pts, &vals, &live).value,
        )]
    } else if q >= 1.0 {
        // ( int v(t) sup_y U^p(t,y) W^{r/q} / phi^p(y)^{r/q} dt )^{1/r}
        let r = p * q / (p - q);
        let val = integral_of_sup(&cg, p, &case2_kernel(&cg, r / q), 1.0 / r);
        vec![("A2".to_string(), val)]
    } else if p <= q {
        // two suprema with W^{1-q'} and denominator power 2 - q'/p, plus the
        // endpoint quotient
        let base = tail_base(&cg, 1.0 - qp, 2.0 - qp / p);
        let sup_exp = -1.0 / qp;
        let t3 = tail_integrals(&cg, &base, p);
        let vals3: Vec<f64> = (0..cg.pts.len())
            .map(|i| xpow(xmul(cg.v_cum[i], t3[i]), sup_exp))
            .collect();
        let a3 = sup_grid_only(&cg.pts, &vals3).value;
        let t4 = tail_integrals(&cg, &base, 0.0);
        let vals4: Vec<f64> = (0..cg.pts.len())
            .map(|i| xpow(xmul(cg.phi_p[i], t4[i]), sup_exp))
            .collect();
        let a4 = sup_grid_only(&cg.pts, &vals4).value;
        let a5 = xmul(xpow(cg.w_total, 1.0 / q), xpow(cg.phi_p_inf, -1.0 / p));
        vec![
            ("A3".to_string(), a3),
            ("A4".to_string(), a4),
            ("A5".to_string(), a5),
        ]
    } else {
        let r = p * q / (p - q);
        let a5 = xmul(xpow(cg.w_total, 1.0 / q), xpow(cg.phi_p_inf, -1.0 / p));
        let base = tail_base(&cg, 1.0 - qp, 2.0 - qp);
        let t = tail_integrals(&cg, &base, (p - q) / (1.0 - q));
        let inner_pow = -r / qp;
        let outer: Vec<f64> = (0..cg.pts.len())
            .map(|i| xmul(cg.v_at[i], xpow(t[i], inner_pow)))
            .collect();
        let a6 = xpow(log_trapezoid_with_tails(&cg.pts, &outer), 1.0 / r);
        vec![("A5".to_string(), a5), ("A6".to_string(), a6)]
    };
    Ok(ConditionReport::from_values(ex.case, conditions))
}
