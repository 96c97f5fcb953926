//! Associated-space norm of `CL^{m,p}(u,v)`: the value of
//! `sup { int f* g* : ||f||_CL <= 1 }`, equal to the optimal constant of the
//! embedding into `Lambda^1(g*)`, evaluated through the closed per-quadrant
//! formulas written with the conjugate exponents `m' = m/(m-1)` and
//! `p' = p/(p-1)`.
//!
//! `g` enters only through its nonincreasing rearrangement `g*` and the
//! cumulative `G(t) = int_0^t g*`, both exact for step functions, so the
//! input is a [`StepFunction`] rearranged internally.

use crate::conditions::{
    build_cond_grid, case2_kernel, integral_of_sup, tail_base, tail_integrals,
};
use crate::ext::{xmul, xpow};
use crate::fundamental::{Admissibility, FundamentalFunction};
use crate::grid::{sup_grid_only, sup_refine, Grid};
use crate::step::StepFunction;
use crate::weights::WeightExpr;
use crate::{grid, Error, Result};

/// Associated norm of `g` with respect to `CL^{m,p}(u,v)`.
///
/// Dispatches on the `(m, p)` quadrant:
/// both exponents at most 1 give a single weighted supremum of `g**`; the
/// remaining quadrants add the endpoint quotient `||g||_1 / phi(inf)` and
/// integral or supremum terms in the conjugate exponents.
pub fn associated_norm(
    u: &WeightExpr,
    v: &WeightExpr,
    m: f64,
    p: f64,
    g: &StepFunction,
    grid: &Grid,
) -> Result<f64> {
    assert!(m > 0.0 && p > 0.0);
    let f = FundamentalFunction::new(u.clone(), v.clone(), m, p);
    if f.is_admissible(8, grid.tol) != Admissibility::Admissible {
        return Err(Error::NotAdmissible);
    }
    let gs = g.rearrange();
    if gs.is_zero() {
        return Ok(0.0);
    }
    let w = gs.to_weight();
    let cg = build_cond_grid(&f, &w, grid)?;
    let n = cg.pts.len();

    let value = if m <= 1.0 && p <= 1.0 {
        // sup_t g**(t) t phi(t)^{-1} = sup_t G(t) (int_0^t v U^{p/m})^{-1/p}
        let vals: Vec<f64> = (0..n)
            .map(|i| xmul(cg.w_cum[i], xpow(cg.phi_p[i], -1.0 / p)))
            .collect();
        let live = |t: f64| {
            let ph = f.phi_p(t, grid.tol).unwrap_or(f64::INFINITY);
            xmul(gs.integral_to(t), xpow(ph, -1.0 / p))
        };
        sup_refine(&cg.pts, &vals, &live).value
    } else if m <= 1.0 {
        // ( int v(t) sup_{y>t} U^{p/m}(t,y) G(y)^{p'} phi^p(y)^{-p'} dt )^{1/p'}
        let pp = p / (p - 1.0);
        integral_of_sup(&cg, p / m, &case2_kernel(&cg, pp), 1.0 / pp)
    } else if p <= 1.0 {
        // ||g||_1 / phi(inf) plus two suprema in the m' exponents with
        // denominator power 2 + m'/p
        let mp = m / (m - 1.0);
        let endpoint = xmul(cg.w_total, xpow(cg.phi_p_inf, -1.0 / p));
        let base = tail_base(&cg, mp, 2.0 + mp / p);
        let t1 = tail_integrals(&cg, &base, p / m);
        let vals1: Vec<f64> = (0..n)
            .map(|i| xpow(xmul(cg.v_cum[i], t1[i]), 1.0 / mp))
            .collect();
        let s1 = sup_grid_only(&cg.pts, &vals1).value;
        let t2 = tail_integrals(&cg, &base, 0.0);
        let vals2: Vec<f64> = (0..n)
            .map(|i| xpow(xmul(cg.phi_p[i], t2[i]), 1.0 / mp))
            .collect();
        let s2 = sup_grid_only(&cg.pts, &vals2).value;
        endpoint + s1 + s2
    } else {
        // ||g||_1 / phi(inf) plus the integral form with U^{(p-1)/(m-1)},
        // denominator power 1 + m', inner power p(m-1)/(m(p-1)), outer 1/p'
        let mp = m / (m - 1.0);
        let pp = p / (p - 1.0);
        let endpoint = xmul(cg.w_total, xpow(cg.phi_p_inf, -1.0 / p));
        let base = tail_base(&cg, mp, 1.0 + mp);
        let tails = tail_integrals(&cg, &base, (p - 1.0) / (m - 1.0));
        let inner = p * (m - 1.0) / (m * (p - 1.0));
        let outer: Vec<f64> = (0..n)
            .map(|i| xmul(cg.v_at[i], xpow(tails[i], inner)))
            .collect();
        endpoint + xpow(grid::log_trapezoid_with_tails(&cg.pts, &outer), 1.0 / pp)
    };
    Ok(value)
}
