//! Brute-force validation machinery: empirical optimal embedding constants by
//! ratio maximization over nonincreasing step functions, Hardy-inequality
//! condition values with explicit saturators, and checkers for the discrete
//! sequence inequalities. Nothing here trusts the analytic condition
//! evaluators; agreement between the two is what the test suites certify.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::ext::{xdiv, xmul, xpow};
use crate::fundamental::{Admissibility, FundamentalFunction};
use crate::quad;
use crate::step::StepFunction;
use crate::weights::WeightExpr;
use crate::{Error, Result};

/// Search effort knobs for the empirical optimizer. Deterministic for a
/// fixed seed; enlarging `candidates` or `local_steps` can only increase the
/// reported constant (greedy max over a superset of evaluations).
#[derive(Debug, Clone, Copy)]
pub struct OptimizerBudget {
    pub candidates: usize,
    pub local_steps: usize,
    pub seed: u64,
    pub knot_count: usize,
}

impl Default for OptimizerBudget {
    fn default() -> Self {
        OptimizerBudget {
            candidates: 256,
            local_steps: 64,
            seed: 0,
            knot_count: 8,
        }
    }
}

/// Window in which candidate knots are sampled (log-uniform), matching the
/// default evaluation window of the analytic modules.
const KNOT_LO_EXP: f64 = -40.0;
const KNOT_HI_EXP: f64 = 40.0;

/// Quadrature tolerance of the norm evaluations inside the optimizer.
const NORM_TOL: f64 = 1e-8;

/// `|| f ||_{Lambda^q(w)}` for a nonincreasing step function: exact
/// piece-by-piece integration of `w` against `f^q`.
pub fn lambda_norm(w: &WeightExpr, q: f64, f: &StepFunction, tol: f64) -> f64 {
    let mut total = 0.0;
    let mut lo = 0.0f64;
    for (i, &val) in f.values().iter().enumerate() {
        let hi = f.knots()[i];
        if val != 0.0 {
            let seg = w.integrate(lo, hi, tol).unwrap_or(f64::INFINITY);
            total += xmul(val.powf(q), seg);
        }
        lo = hi;
    }
    xpow(total, 1.0 / q)
}

/// `|| f ||_{CL^{m,p}(u,v)}` for a nonincreasing step function.
///
/// The inner Copson integral `I(t) = int_t^inf u f^m` is exact at the knots;
/// within each piece it is `I(knot) + f_i^m U(t, knot)` and the outer
/// `int v I^{p/m}` is integrated by adaptive quadrature, with the upper half
/// of every piece handled in the gap variable so that `U(t, knot)` stays
/// smooth as `t` approaches the knot.
pub fn cl_norm(u: &WeightExpr, v: &WeightExpr, m: f64, p: f64, f: &StepFunction, tol: f64) -> f64 {
    if f.is_zero() {
        return 0.0;
    }
    let n = f.values().len();
    // u-mass of each bounded piece; the first one (down to 0) is unused
    let mut lo = 0.0f64;
    let mut u_seg = Vec::with_capacity(n);
    for i in 0..n {
        let hi = f.knots()[i];
        u_seg.push(if i == 0 {
            0.0
        } else {
            u.integrate(lo, hi, tol).unwrap_or(f64::INFINITY)
        });
        lo = hi;
    }
    // tail constants: I at the right edge of piece i
    let mut i_right = vec![0.0f64; n];
    for i in (0..n - 1).rev() {
        i_right[i] = i_right[i + 1] + f.values()[i + 1].powf(m) * u_seg[i + 1];
    }

    let mut outer = 0.0f64;
    let mut lo = 0.0f64;
    for i in 0..n {
        let hi = f.knots()[i];
        let fi = f.values()[i];
        if fi == 0.0 && i_right[i] == 0.0 {
            lo = hi;
            continue;
        }
        let fm = fi.powf(m);
        let inner = |t: f64| i_right[i] + fm * u.integrate(t, hi, tol).unwrap_or(f64::INFINITY);
        let integrand = |t: f64| {
            let vv = v.eval(t);
            if vv == 0.0 {
                0.0
            } else {
                vv * xpow(inner(t), p / m)
            }
        };
        let mid = 0.5 * (lo + hi);
        // the lower half may inherit a singularity of v (or of U) at 0, and
        // a piece spanning many decades can hide the support of v far below
        // its midpoint; the geometric shell peeler handles both
        outer += quad::integrate_singular_lo(&integrand, lo, mid, tol);
        let gap = |x: f64| {
            let vv = v.eval(hi - x);
            if vv == 0.0 {
                0.0
            } else {
                vv * xpow(i_right[i] + fm * u.integrate_back(hi, x, tol), p / m)
            }
        };
        outer += quad::integrate_singular_lo(&gap, 0.0, hi - mid, tol);
        lo = hi;
        if outer.is_infinite() {
            return f64::INFINITY;
        }
    }
    xpow(outer, 1.0 / p)
}

/// Result of the empirical ratio maximization.
#[derive(Debug, Clone)]
pub struct EmpiricalResult {
    /// Largest observed `||f||_Lambda / ||f||_CL`; a lower bound on the
    /// optimal embedding constant by construction.
    pub c_emp: f64,
    pub best: StepFunction,
    /// Candidates whose `CL` norm degenerated to 0 (skipped).
    pub skipped: usize,
}

fn ratio(
    u: &WeightExpr,
    v: &WeightExpr,
    w: &WeightExpr,
    m: f64,
    p: f64,
    q: f64,
    f: &StepFunction,
) -> Option<f64> {
    let den = cl_norm(u, v, m, p, f, NORM_TOL);
    if den == 0.0 {
        return None;
    }
    Some(xdiv(lambda_norm(w, q, f, NORM_TOL), den))
}

/// One random nonincreasing candidate: knots log-uniform in the window,
/// values sorted standard exponentials. Every fourth candidate is a single
/// block `c * chi_{[0,T)}`, which keeps indicator-shaped optima (and window
/// divergences) reachable at small budgets.
fn candidate(rng: &mut ChaCha8Rng, knot_count: usize) -> StepFunction {
    let span = KNOT_HI_EXP - KNOT_LO_EXP;
    let sample_knot = |rng: &mut ChaCha8Rng| 2f64.powf(KNOT_LO_EXP + span * rng.gen::<f64>());
    let count = knot_count.max(1);
    let mut knots: Vec<f64> = (0..count).map(|_| sample_knot(rng)).collect();
    knots.sort_by(f64::total_cmp);
    knots.dedup();
    let mut values: Vec<f64> = (0..knots.len())
        .map(|_| -(1.0 - rng.gen::<f64>()).ln())
        .collect();
    values.sort_by(|a, b| b.total_cmp(a));
    StepFunction::new(knots, values)
}

fn single_block(rng: &mut ChaCha8Rng) -> StepFunction {
    let span = KNOT_HI_EXP - KNOT_LO_EXP;
    let t = 2f64.powf(KNOT_LO_EXP + span * rng.gen::<f64>());
    StepFunction::block(-(1.0 - rng.gen::<f64>()).ln(), t)
}

/// Annealed multiplicative step size; depends only on the step index so that
/// a longer run revisits the identical prefix of moves.
fn anneal(step: usize) -> f64 {
    (0.5 * 0.93f64.powi(step as i32)).max(0.01)
}

/// Greedy coordinate-wise multiplicative refinement of a candidate's knots
/// and values; moves breaking monotonicity or knot ordering are rejected.
fn refine<R: Fn(&StepFunction) -> Option<f64>>(
    rate: &R,
    mut f: StepFunction,
    mut best: f64,
    local_steps: usize,
) -> (StepFunction, f64) {
    let n = f.values().len();
    for step in 0..local_steps {
        let delta = anneal(step);
        let coord = step % (2 * n);
        for dir in [delta, -delta] {
            let factor = dir.exp();
            let mut knots = f.knots().to_vec();
            let mut values = f.values().to_vec();
            if coord < n {
                values[coord] *= factor;
                let ok = values.windows(2).all(|w| w[0] >= w[1]);
                if !ok {
                    continue;
                }
            } else {
                let i = coord - n;
                knots[i] *= factor;
                let ok = knots.windows(2).all(|w| w[0] < w[1]) && knots[0] > 0.0;
                if !ok {
                    continue;
                }
            }
            let trial = StepFunction::new(knots, values);
            if let Some(r) = rate(&trial) {
                if r > best {
                    best = r;
                    f = trial;
                    break;
                }
            }
        }
    }
    (f, best)
}

/// Empirical optimal constant of `CL^{m,p}(u,v) -> Lambda^q(w)`: the maximum
/// ratio of norms over randomly seeded, greedily refined nonincreasing step
/// functions. Deterministic given the seed; candidates run in parallel with
/// per-index RNG streams so the result is scheduling-independent.
pub fn empirical_embedding_constant(
    u: &WeightExpr,
    v: &WeightExpr,
    w: &WeightExpr,
    m: f64,
    p: f64,
    q: f64,
    budget: &OptimizerBudget,
) -> Result<EmpiricalResult> {
    let fun = FundamentalFunction::new(u.clone(), v.clone(), m, p);
    if fun.is_admissible(8, NORM_TOL) != Admissibility::Admissible {
        return Err(Error::NotAdmissible);
    }
    let rate = |f: &StepFunction| ratio(u, v, w, m, p, q, f);

    let runs: Vec<(f64, StepFunction, bool)> = (0..budget.candidates)
        .into_par_iter()
        .map(|idx| {
            let mut rng = ChaCha8Rng::seed_from_u64(
                budget
                    .seed
                    .wrapping_add((idx as u64).wrapping_mul(0x9e3779b97f4a7c15)),
            );
            let f = if idx % 4 == 3 {
                single_block(&mut rng)
            } else {
                candidate(&mut rng, budget.knot_count)
            };
            match rate(&f) {
                None => (0.0, f, true),
                Some(r) => {
                    let (bf, br) = refine(&rate, f, r, budget.local_steps);
                    (br, bf, false)
                }
            }
        })
        .collect();

    let skipped = runs.iter().filter(|r| r.2).count();
    let mut c_emp = 0.0f64;
    let mut best = StepFunction::zero();
    for (r, f, skip) in runs {
        if !skip && r > c_emp {
            c_emp = r;
            best = f;
        }
    }
    Ok(EmpiricalResult {
        c_emp,
        best,
        skipped,
    })
}

/// Comparison of the empirical constants at `(m, p, q)` and at the rescaled
/// exponents `(1, p/m, q/m)`, which describe the same embedding with the
/// optimal constant raised to the power `m`.
#[derive(Debug, Clone)]
pub struct RescaleReport {
    pub c_emp: f64,
    pub c_rescaled: f64,
    /// `c_rescaled^{1/m}`, the value `c_emp` should reproduce.
    pub expected: f64,
    /// `c_emp / expected`.
    pub ratio: f64,
}

pub fn rescale_equivalence_check(
    u: &WeightExpr,
    v: &WeightExpr,
    w: &WeightExpr,
    m: f64,
    p: f64,
    q: f64,
    budget: &OptimizerBudget,
) -> Result<RescaleReport> {
    let base = empirical_embedding_constant(u, v, w, m, p, q, budget)?;
    let resc = empirical_embedding_constant(u, v, w, 1.0, p / m, q / m, budget)?;
    let expected = xpow(resc.c_emp, 1.0 / m);
    Ok(RescaleReport {
        c_emp: base.c_emp,
        c_rescaled: resc.c_emp,
        expected,
        ratio: xdiv(base.c_emp, expected),
    })
}

/// Weighted Hardy inequality data on an interval `(a, b)`: the inequality
/// `( int_a^b (int_t^b h)^q rho dt )^{1/q} <= C int_a^b h eta`.
#[derive(Debug, Clone)]
pub struct HardyProblem {
    pub a: f64,
    pub b: f64,
    pub rho: WeightExpr,
    pub eta: WeightExpr,
    pub q: f64,
}

impl HardyProblem {
    pub fn new(a: f64, b: f64, rho: WeightExpr, eta: WeightExpr, q: f64) -> Self {
        assert!(a >= 0.0 && a < b && q > 0.0);
        HardyProblem { a, b, rho, eta, q }
    }
}

/// Sample points of `(a, b)`: uniform in the bulk with dyadic accumulation
/// at both endpoints (log-spaced when `b` is infinite).
fn hardy_points(a: f64, b: f64) -> Vec<f64> {
    let mut pts: Vec<f64> = Vec::new();
    if b.is_infinite() {
        let base = if a == 0.0 { 1.0 } else { a };
        for k in -120..=120 {
            let t = a + base * 2f64.powf(k as f64 / 4.0);
            pts.push(t);
        }
    } else {
        let len = b - a;
        for j in 1..256 {
            pts.push(a + len * j as f64 / 256.0);
        }
        for k in 1..45 {
            let off = len * 2f64.powi(-k);
            pts.push(a + off);
            pts.push(b - off);
        }
    }
    pts.retain(|&t| t > a && t < b && t.is_finite());
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}

/// The printed optimal-constant expression of the Hardy inequality:
/// `sup (int_a^t rho)^{1/q} / eta(t)` for `q >= 1`, and the integral form in
/// the conjugate exponent `q' = q/(q-1) < 0` for `q < 1`, with the
/// `ess sup` over `(t, b)` realized as a backward running maximum.
pub fn hardy_condition(hp: &HardyProblem, tol: f64) -> f64 {
    let pts = hardy_points(hp.a, hp.b);
    let n = pts.len();
    let mut rho_cum = Vec::with_capacity(n);
    let mut acc = 0.0f64;
    let mut lo = hp.a;
    for &t in &pts {
        acc += hp.rho.integrate(lo, t, tol).unwrap_or(f64::INFINITY);
        rho_cum.push(acc);
        lo = t;
    }
    if hp.q >= 1.0 {
        let mut best = 0.0f64;
        for i in 0..n {
            let val = xdiv(xpow(rho_cum[i], 1.0 / hp.q), hp.eta.eval(pts[i]));
            if val > best {
                best = val;
            }
        }
        return best;
    }
    let qp = hp.q / (hp.q - 1.0); // negative
    // backward running max of eta^{q'} over (t, b)
    let mut sup_tail = vec![0.0f64; n];
    let mut run = 0.0f64;
    for i in (0..n).rev() {
        let e = xpow(hp.eta.eval(pts[i]), qp);
        if e > run {
            run = e;
        }
        sup_tail[i] = run;
    }
    // trapezoid of rho(t) (int_a^t rho)^{-q'} sup_tail(t) over the samples
    let mut total = 0.0f64;
    let mut prev = xmul(
        xmul(hp.rho.eval(pts[0]), xpow(rho_cum[0], -qp)),
        sup_tail[0],
    );
    for i in 1..n {
        let cur = xmul(
            xmul(hp.rho.eval(pts[i]), xpow(rho_cum[i], -qp)),
            sup_tail[i],
        );
        if prev.is_finite() && cur.is_finite() {
            total += 0.5 * (prev + cur) * (pts[i] - pts[i - 1]);
        } else {
            total = f64::INFINITY;
        }
        prev = cur;
    }
    xpow(total, -1.0 / qp)
}

/// Left-hand side `( int_a^b (int_t^b g)^q rho dt )^{1/q}` of the Hardy
/// inequality for a step function `g`.
pub fn hardy_lhs(hp: &HardyProblem, g: &StepFunction, tol: f64) -> f64 {
    let f = |t: f64| {
        let tail = g.tail_integral(t);
        xmul(hp.rho.eval(t), xpow(tail, hp.q))
    };
    let b_eff = if hp.b.is_infinite() {
        g.support_end().max(hp.a * 2.0).max(1.0)
    } else {
        hp.b
    };
    let total = quad::integrate_singular_lo(&f, hp.a, b_eff, tol)
        + if hp.b.is_infinite() {
            quad::integrate_to_inf(&f, b_eff, tol)
        } else {
            0.0
        };
    xpow(total, 1.0 / hp.q)
}

/// A saturating test function for the Hardy inequality: normalized so that
/// `int g eta = 1` (exactly), shaped to make `hardy_lhs` comparable to
/// `hardy_condition`.
#[derive(Debug, Clone)]
pub struct HardySaturator {
    pub g: StepFunction,
    pub achieved: f64,
    /// `achieved / condition`; the attainable value in a finite knot budget
    /// is an empirical quantity.
    pub ratio: f64,
}

pub fn hardy_saturator(hp: &HardyProblem, knot_count: usize, tol: f64) -> Result<HardySaturator> {
    let cond = hardy_condition(hp, tol);
    if !cond.is_finite() {
        return Err(Error::ConditionInfinite);
    }
    if cond == 0.0 {
        return Err(Error::ConditionInfinite);
    }
    let pts = hardy_points(hp.a, hp.b);
    let g = if hp.q >= 1.0 {
        // all mass just above the argmax of the condition ratio
        let mut best = (0usize, 0.0f64);
        let mut acc = 0.0f64;
        let mut lo = hp.a;
        for (i, &t) in pts.iter().enumerate() {
            acc += hp.rho.integrate(lo, t, tol).unwrap_or(f64::INFINITY);
            lo = t;
            let val = xdiv(xpow(acc, 1.0 / hp.q), hp.eta.eval(t));
            if val > best.1 {
                best = (i, val);
            }
        }
        let t_star = pts[best.0];
        let upper = if hp.b.is_infinite() {
            t_star * 2.0
        } else {
            hp.b
        };
        // a thin spike just above the argmax, widened until it carries
        // eta-mass
        let mut t1 = t_star;
        let mut t2 = t_star + (upper - t_star) / knot_count.max(2) as f64;
        let mut eta_mass = hp.eta.integrate(t1.max(hp.a), t2, tol).unwrap_or(0.0);
        while eta_mass <= 0.0 && t2 < upper {
            t2 = (t2 * 2.0).min(upper);
            eta_mass = hp.eta.integrate(t1.max(hp.a), t2, tol).unwrap_or(0.0);
        }
        if eta_mass <= 0.0 || !eta_mass.is_finite() {
            t1 = hp.a;
            t2 = upper;
            eta_mass = hp.eta.integrate(t1, t2, tol).unwrap_or(f64::INFINITY);
        }
        let c = 1.0 / eta_mass;
        if t1 <= hp.a {
            StepFunction::new(vec![t2], vec![c])
        } else {
            StepFunction::new(vec![t1, t2], vec![0.0, c])
        }
    } else {
        // spread mass proportionally to the condition integrand
        let qp = hp.q / (hp.q - 1.0);
        let n = pts.len();
        let mut rho_cum = Vec::with_capacity(n);
        let mut acc = 0.0f64;
        let mut lo = hp.a;
        for &t in &pts {
            acc += hp.rho.integrate(lo, t, tol).unwrap_or(f64::INFINITY);
            rho_cum.push(acc);
            lo = t;
        }
        let mut sup_tail = vec![0.0f64; n];
        let mut run = 0.0f64;
        for i in (0..n).rev() {
            let e = xpow(hp.eta.eval(pts[i]), qp);
            if e > run {
                run = e;
            }
            sup_tail[i] = run;
        }
        // cells on a coarse subgrid; raw value on a cell = its share of the
        // condition integrand divided by the cell's eta-mass
        let cells = knot_count.max(2).min(n - 1);
        let step = n / cells;
        let mut knots = Vec::new();
        let mut values = Vec::new();
        let mut lo = hp.a;
        let mut start = 0usize;
        for c in 0..cells {
            let end = if c + 1 == cells { n - 1 } else { start + step };
            let hi = pts[end];
            let mut mass = 0.0f64;
            for i in start..end {
                let d0 = xmul(
                    xmul(hp.rho.eval(pts[i]), xpow(rho_cum[i], -qp)),
                    sup_tail[i],
                );
                let d1 = xmul(
                    xmul(hp.rho.eval(pts[i + 1]), xpow(rho_cum[i + 1], -qp)),
                    sup_tail[i + 1],
                );
                if d0.is_finite() && d1.is_finite() {
                    mass += 0.5 * (d0 + d1) * (pts[i + 1] - pts[i]);
                }
            }
            let width = hi - lo;
            if width > 0.0 && mass > 0.0 {
                knots.push(hi);
                values.push(mass / width);
            } else if width > 0.0 {
                knots.push(hi);
                values.push(0.0);
            }
            lo = hi;
            start = end;
        }
        if values.iter().all(|&v| v == 0.0) {
            return Err(Error::ConditionInfinite);
        }
        let raw = StepFunction::new(knots, values);
        // exact normalization against eta
        let mut eta_dot = 0.0f64;
        let mut lo = 0.0f64;
        for (i, &v) in raw.values().iter().enumerate() {
            let hi = raw.knots()[i];
            if v != 0.0 {
                eta_dot += v * hp.eta.integrate(lo.max(hp.a), hi, tol).unwrap_or(0.0);
            }
            lo = hi;
        }
        if eta_dot <= 0.0 || !eta_dot.is_finite() {
            return Err(Error::ConditionInfinite);
        }
        raw.scaled(1.0 / eta_dot)
    };
    let achieved = hardy_lhs(hp, &g, tol);
    Ok(HardySaturator {
        g,
        achieved,
        ratio: achieved / cond,
    })
}

/// Which discrete inequality to test: the three displays of the
/// geometric-growth lemma (tail sums) and of the geometric-decay lemma
/// (prefix sums).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LemmaVariant {
    GrowthSum,
    GrowthSupInner,
    GrowthSupSup,
    DecaySum,
    DecaySupInner,
    DecaySupSup,
}

/// Smallest constant making the chosen inequality hold for these sequences:
/// the LHS/RHS ratio. `b` must grow (growth variants) or decay (decay
/// variants) geometrically; the inferred ratio `D` must exceed 1.
pub fn discrete_lemma_constant(
    b: &[f64],
    c: &[f64],
    alpha: f64,
    variant: LemmaVariant,
) -> Result<f64> {
    assert!(b.len() == c.len() && b.len() >= 2 && alpha > 0.0);
    let growth = matches!(
        variant,
        LemmaVariant::GrowthSum | LemmaVariant::GrowthSupInner | LemmaVariant::GrowthSupSup
    );
    let mut d = f64::INFINITY;
    for k in 0..b.len() - 1 {
        let r = if growth {
            xdiv(b[k + 1], b[k])
        } else {
            xdiv(b[k], b[k + 1])
        };
        if r < d {
            d = r;
        }
    }
    if !(d > 1.0) {
        return Err(Error::NotGeometric(d));
    }
    let n = b.len();
    // inner aggregate at index k: tail (growth) or prefix (decay)
    let agg: Vec<f64> = match variant {
        LemmaVariant::GrowthSum => {
            let mut out = vec![0.0; n];
            let mut acc = 0.0;
            for k in (0..n).rev() {
                acc += c[k];
                out[k] = acc;
            }
            out
        }
        LemmaVariant::GrowthSupInner => {
            let mut out = vec![0.0; n];
            let mut acc = 0.0f64;
            for k in (0..n).rev() {
                acc = acc.max(c[k]);
                out[k] = acc;
            }
            out
        }
        LemmaVariant::DecaySum => {
            let mut out = vec![0.0; n];
            let mut acc = 0.0;
            for k in 0..n {
                acc += c[k];
                out[k] = acc;
            }
            out
        }
        LemmaVariant::DecaySupInner => {
            let mut out = vec![0.0; n];
            let mut acc = 0.0f64;
            for k in 0..n {
                acc = acc.max(c[k]);
                out[k] = acc;
            }
            out
        }
        LemmaVariant::GrowthSupSup => {
            let mut out = vec![0.0; n];
            let mut acc = 0.0;
            for k in (0..n).rev() {
                acc += c[k];
                out[k] = acc;
            }
            out
        }
        LemmaVariant::DecaySupSup => {
            let mut out = vec![0.0; n];
            let mut acc = 0.0;
            for k in 0..n {
                acc += c[k];
                out[k] = acc;
            }
            out
        }
    };
    let sup_form = matches!(
        variant,
        LemmaVariant::GrowthSupSup | LemmaVariant::DecaySupSup
    );
    let (lhs, rhs) = if sup_form {
        let lhs = (0..n)
            .map(|k| xmul(xpow(agg[k], alpha), b[k]))
            .fold(0.0f64, f64::max);
        let rhs = (0..n)
            .map(|k| xmul(xpow(c[k], alpha), b[k]))
            .fold(0.0f64, f64::max);
        (lhs, rhs)
    } else {
        let lhs = (0..n).map(|k| xmul(xpow(agg[k], alpha), b[k])).sum();
        let rhs = (0..n).map(|k| xmul(xpow(c[k], alpha), b[k])).sum();
        (lhs, rhs)
    };
    Ok(xdiv(lhs, rhs))
}

/// The sequence attaining equality in the discrete Hoelder inequality:
/// `c_k = b_k^{1/(p-q)} / (sum b^{p/(p-q)})^{1/p}`, normalized so that
/// `sum c^p = 1` and `(sum c^q b)^{1/q} = (sum b^{p/(p-q)})^{(p-q)/(pq)}`.
pub fn holder_saturator(b: &[f64], p: f64, q: f64) -> Result<Vec<f64>> {
    assert!(0.0 < q && q < p);
    if b.iter().all(|&x| x == 0.0) {
        return Err(Error::DegenerateB);
    }
    let s: f64 = b.iter().map(|&x| x.powf(p / (p - q))).sum();
    if !s.is_finite() || s <= 0.0 {
        return Err(Error::DegenerateB);
    }
    let norm = s.powf(1.0 / p);
    Ok(b.iter().map(|&x| x.powf(1.0 / (p - q)) / norm).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one() -> WeightExpr {
        WeightExpr::power(1.0, 0.0)
    }

    fn small_budget() -> OptimizerBudget {
        OptimizerBudget {
            candidates: 32,
            local_steps: 24,
            seed: 7,
            knot_count: 6,
        }
    }

    #[test]
    fn fubini_identity_ratio_is_one() {
        // u = v = 1, w(t) = t, m = p = q = 1: the two norms coincide for
        // every f, so every candidate attains exactly 1
        let w = WeightExpr::power(1.0, 1.0);
        let r =
            empirical_embedding_constant(&one(), &one(), &w, 1.0, 1.0, 1.0, &small_budget())
                .unwrap();
        assert!((r.c_emp - 1.0).abs() < 1e-6, "got {}", r.c_emp);
    }

    #[test]
    fn zero_target_weight() {
        let r = empirical_embedding_constant(
            &one(),
            &one(),
            &WeightExpr::zero(),
            1.0,
            1.0,
            1.0,
            &small_budget(),
        )
        .unwrap();
        assert_eq!(r.c_emp, 0.0);
    }

    #[test]
    fn unbounded_ratio_detected() {
        // u = v = w = 1: the ratio along chi_[0,t) is 2/t, so the window
        // bottom should push the empirical constant far beyond 10^3
        let r =
            empirical_embedding_constant(&one(), &one(), &one(), 1.0, 1.0, 1.0, &small_budget())
                .unwrap();
        assert!(r.c_emp > 1e3, "got {}", r.c_emp);
    }

    #[test]
    fn determinism_and_budget_monotonicity() {
        let w = WeightExpr::power(1.0, 0.5);
        let b1 = small_budget();
        let r1 =
            empirical_embedding_constant(&one(), &one(), &w, 1.0, 2.0, 1.0, &b1).unwrap();
        let r2 =
            empirical_embedding_constant(&one(), &one(), &w, 1.0, 2.0, 1.0, &b1).unwrap();
        assert_eq!(r1.c_emp.to_bits(), r2.c_emp.to_bits());
        let b2 = OptimizerBudget {
            candidates: 48,
            local_steps: 40,
            ..b1
        };
        let r3 = empirical_embedding_constant(&one(), &one(), &w, 1.0, 2.0, 1.0, &b2).unwrap();
        assert!(r3.c_emp >= r1.c_emp);
    }

    #[test]
    fn hardy_condition_examples() {
        let hp = HardyProblem::new(0.0, 1.0, one(), one(), 1.0);
        let c = hardy_condition(&hp, 1e-9);
        assert!((c - 1.0).abs() < 1e-6, "got {c}");
        // homogeneity in eta
        let hp2 = HardyProblem::new(0.0, 1.0, one(), WeightExpr::power(4.0, 0.0), 1.0);
        let c2 = hardy_condition(&hp2, 1e-9);
        assert!((c2 - 0.25).abs() < 1e-6, "got {c2}");
        // q = 1/2: q' = -1, condition = (int_0^1 t dt)^1 = 1/2
        let hp3 = HardyProblem::new(0.0, 1.0, one(), one(), 0.5);
        let c3 = hardy_condition(&hp3, 1e-9);
        assert!((c3 - 0.5).abs() < 1e-4, "got {c3}");
    }

    #[test]
    fn hardy_saturators() {
        let hp = HardyProblem::new(0.0, 1.0, one(), one(), 1.0);
        let s = hardy_saturator(&hp, 64, 1e-9).unwrap();
        // normalization is exact
        let mut eta_dot = 0.0;
        let mut lo = 0.0;
        for (i, &v) in s.g.values().iter().enumerate() {
            eta_dot += v * (s.g.knots()[i] - lo);
            lo = s.g.knots()[i];
        }
        assert!((eta_dot - 1.0).abs() < 1e-12, "got {eta_dot}");
        assert!(s.ratio >= 0.9, "ratio {}", s.ratio);

        let hp3 = HardyProblem::new(0.0, 1.0, one(), one(), 0.5);
        let s3 = hardy_saturator(&hp3, 64, 1e-9).unwrap();
        assert!(s3.ratio >= 0.5, "ratio {}", s3.ratio);
    }

    #[test]
    fn discrete_lemma_hand_case() {
        // b = (1,2,4), c = (1,1,1), alpha = 1, growth-sum: 11/7
        let c = discrete_lemma_constant(
            &[1.0, 2.0, 4.0],
            &[1.0, 1.0, 1.0],
            1.0,
            LemmaVariant::GrowthSum,
        )
        .unwrap();
        assert!((c - 11.0 / 7.0).abs() < 1e-12, "got {c}");
        // single nonzero c: sup variants have equal sides
        let c = discrete_lemma_constant(
            &[1.0, 2.0, 4.0],
            &[0.0, 1.0, 0.0],
            2.0,
            LemmaVariant::GrowthSupSup,
        )
        .unwrap();
        assert!((c - 1.0).abs() < 1e-12, "got {c}");
        let err = discrete_lemma_constant(
            &[1.0, 1.0, 1.0],
            &[1.0, 1.0, 1.0],
            1.0,
            LemmaVariant::GrowthSum,
        );
        assert!(matches!(err, Err(Error::NotGeometric(_))));
    }

    #[test]
    fn holder_saturator_equality() {
        let b = [1.0, 1.0];
        let c = holder_saturator(&b, 2.0, 1.0).unwrap();
        assert!((c[0] - 1.0 / 2f64.sqrt()).abs() < 1e-12);
        let lhs: f64 = c.iter().zip(&b).map(|(&ck, &bk)| ck * bk).sum();
        assert!((lhs - 2f64.sqrt()).abs() < 1e-12);
        let cp: f64 = c.iter().map(|&ck| ck * ck).sum();
        assert!((cp - 1.0).abs() < 1e-14);
        assert!(matches!(
            holder_saturator(&[0.0, 0.0], 2.0, 1.0),
            Err(Error::DegenerateB)
        ));
    }
}
