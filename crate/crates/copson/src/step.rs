//! Step functions on `(0, inf)` with compactly supported nonzero part.
//!
//! These play the role of test functions: nonincreasing rearrangements,
//! running averages and all integrals are exact.

use serde::{Deserialize, Serialize};

use crate::weights::WeightExpr;

/// Piecewise constant function: `values[i]` on `[knot_{i}, knot_{i+1})` with
/// an implicit knot at 0, and identically 0 on `[knots.last(), inf)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepFunction {
    knots: Vec<f64>,
    values: Vec<f64>,
}

impl StepFunction {
    /// `values[i]` lives on the i-th piece; the final piece `[knots[n-1], inf)`
    /// carries the value 0.
    pub fn new(knots: Vec<f64>, values: Vec<f64>) -> Self {
        assert_eq!(knots.len(), values.len(), "one value per bounded piece");
        assert!(
            knots.windows(2).all(|w| w[0] < w[1])
                && knots.first().map_or(true, |&k| k > 0.0)
                && knots.iter().all(|k| k.is_finite()),
            "knots must be finite, strictly increasing and positive"
        );
        StepFunction { knots, values }
    }

    pub fn zero() -> Self {
        StepFunction {
            knots: vec![1.0],
            values: vec![0.0],
        }
    }

    /// Indicator-style constructor: `c` on `[0, t)`.
    pub fn block(c: f64, t: f64) -> Self {
        StepFunction::new(vec![t], vec![c])
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn eval(&self, t: f64) -> f64 {
        if t < 0.0 {
            return 0.0;
        }
        let idx = self.knots.partition_point(|&k| k <= t);
        if idx < self.values.len() {
            self.values[idx]
        } else {
            0.0
        }
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    /// Supremum of the support of the nonzero part (0 if identically zero).
    pub fn support_end(&self) -> f64 {
        for i in (0..self.values.len()).rev() {
            if self.values[i] != 0.0 {
                return self.knots[i];
            }
        }
        0.0
    }

    /// `int_0^t` of the function, exact.
    pub fn integral_to(&self, t: f64) -> f64 {
        let mut total = 0.0;
        let mut lo = 0.0;
        for (i, &v) in self.values.iter().enumerate() {
            let hi = self.knots[i];
            let e = hi.min(t);
            if e <= lo {
                break;
            }
            total += v * (e - lo);
            lo = hi;
        }
        total
    }

    /// `int_t^inf`, exact (finite because the nonzero part is bounded).
    pub fn tail_integral(&self, t: f64) -> f64 {
        self.total() - self.integral_to(t)
    }

    pub fn total(&self) -> f64 {
        let last = *self.knots.last().unwrap();
        self.integral_to(last)
    }

    /// Nonincreasing rearrangement: sort `|values|` descending while keeping
    /// each level set's measure. Exact for steps.
    pub fn rearrange(&self) -> StepFunction {
        let mut pieces: Vec<(f64, f64)> = Vec::with_capacity(self.values.len());
        let mut lo = 0.0;
        for (i, &v) in self.values.iter().enumerate() {
            let hi = self.knots[i];
            if v != 0.0 {
                pieces.push((v.abs(), hi - lo));
            }
            lo = hi;
        }
        if pieces.is_empty() {
            return StepFunction::zero();
        }
        pieces.sort_by(|a, b| b.0.total_cmp(&a.0));
        let mut knots = Vec::with_capacity(pieces.len());
        let mut values = Vec::with_capacity(pieces.len());
        let mut edge = 0.0;
        for (v, len) in pieces {
            edge += len;
            // merge adjacent equal values to keep knots strictly increasing
            if values.last() == Some(&v) {
                *knots.last_mut().unwrap() = edge;
            } else {
                knots.push(edge);
                values.push(v);
            }
        }
        StepFunction { knots, values }
    }

    /// `(1/t) int_0^t` of the function; callers use it on rearranged input.
    pub fn running_average(&self, t: f64) -> f64 {
        assert!(t > 0.0);
        self.integral_to(t) / t
    }

    pub fn scaled(&self, c: f64) -> StepFunction {
        StepFunction {
            knots: self.knots.clone(),
            values: self.values.iter().map(|v| c * v).collect(),
        }
    }

    /// View as a weight expression (the trailing zero piece is explicit).
    pub fn to_weight(&self) -> WeightExpr {
        let mut values: Vec<f64> = self.values.iter().map(|v| v.abs()).collect();
        values.push(0.0);
        WeightExpr::piecewise(self.knots.clone(), values)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eval_and_integrals() {
        let h = StepFunction::new(vec![1.0, 2.0, 4.0], vec![3.0, 1.0, 0.5]);
        assert_eq!(h.eval(0.5), 3.0);
        assert_eq!(h.eval(2.0), 0.5);
        assert_eq!(h.eval(4.0), 0.0);
        assert_eq!(h.total(), 3.0 + 1.0 + 1.0);
        assert_eq!(h.integral_to(1.5), 3.5);
        assert_eq!(h.tail_integral(1.5), 1.5);
        assert_eq!(h.support_end(), 4.0);
    }

    #[test]
    fn rearrange_sorts() {
        let g = StepFunction::new(vec![1.0, 2.0, 3.0], vec![1.0, 3.0, 2.0]);
        let r = g.rearrange();
        assert_eq!(r.values(), &[3.0, 2.0, 1.0]);
        assert_eq!(r.knots(), &[1.0, 2.0, 3.0]);
        // idempotent on sorted input
        assert_eq!(r.rearrange(), r);
    }

    #[test]
    fn rearrange_takes_modulus() {
        let g = StepFunction::new(vec![0.5, 1.5], vec![-2.0, 1.0]);
        let r = g.rearrange();
        assert_eq!(r.values(), &[2.0, 1.0]);
        assert_eq!(r.knots(), &[0.5, 1.5]);
    }

    #[test]
    fn running_average_examples() {
        let g = StepFunction::block(1.0, 1.0);
        assert_eq!(g.running_average(2.0), 0.5);
        assert_eq!(g.running_average(0.5), 1.0);
        let c = StepFunction::block(3.0, 10.0);
        assert_eq!(c.running_average(7.0), 3.0);
    }

    #[test]
    fn weight_view_matches() {
        let h = StepFunction::new(vec![1.0, 2.0], vec![2.0, 0.5]);
        let w = h.to_weight();
        for &t in &[0.3, 1.5, 2.5, 10.0] {
            assert_eq!(w.eval(t), h.eval(t));
        }
        let v = w.integrate(0.0, f64::INFINITY, 1e-12).unwrap();
        assert_eq!(v, h.total());
    }
}
