//! Bernstein-polynomial mollification of piecewise-linear functions.
//!
//! Each kink of a [`PiecewiseLinear`] at `c` is replaced on `[c - eps, c + eps]`
//! by a Bernstein polynomial whose control points are fixed by matching value
//! and slope of the two neighbouring lines at the interval ends. With degree 2
//! the middle control point is forced by both slope conditions at once; for
//! higher degrees the interior points are spaced linearly between the two
//! slope-fixed neighbours, which keeps a monotone control polygon monotone.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Absolute gap tolerated between two lines that are supposed to meet.
pub const CONTINUITY_TOL: f64 = 1e-9;

/// `C(n, k)` as a float.
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Bernstein basis polynomial `b_{k,n}(t) = C(n,k) t^k (1-t)^(n-k)`.
pub fn bernstein_basis(k: usize, n: usize, t: f64) -> Result<f64> {
    if k > n {
        return Err(invalid(alloc::format!(
            "basis index k = {k} exceeds degree n = {n}"
        )));
    }
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::OutOfDomain {
            value: t,
            lo: 0.0,
            hi: 1.0,
        });
    }
    Ok(binomial(n, k) * libm::pow(t, k as f64) * libm::pow(1.0 - t, (n - k) as f64))
}

/// De Casteljau evaluation of `sum_k beta_k b_{k,n}(t)`.
pub fn de_casteljau(control_points: &[f64], t: f64) -> f64 {
    let mut work: Vec<f64> = control_points.to_vec();
    let s = 1.0 - t;
    for level in (1..work.len()).rev() {
        for i in 0..level {
            work[i] = s * work[i] + t * work[i + 1];
        }
    }
    work.first().copied().unwrap_or(0.0)
}

/// A Bernstein transition polynomial on `[center - epsilon, center + epsilon]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BernsteinTransition {
    pub center: f64,
    pub epsilon: f64,
    pub degree: usize,
    pub control_points: Vec<f64>,
}

impl BernsteinTransition {
    pub fn contains(&self, x: f64) -> bool {
        x >= self.center - self.epsilon && x <= self.center + self.epsilon
    }

    /// Local coordinate `t(x) = (x - center + eps) / (2 eps)`.
    #[inline]
    pub fn local(&self, x: f64) -> f64 {
        ((x - self.center + self.epsilon) / (2.0 * self.epsilon)).clamp(0.0, 1.0)
    }

    fn check(&self, x: f64) -> Result<()> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(Error::OutOfDomain {
                value: x,
                lo: self.center - self.epsilon,
                hi: self.center + self.epsilon,
            })
        }
    }

    pub fn value(&self, x: f64) -> Result<f64> {
        self.check(x)?;
        Ok(de_casteljau(&self.control_points, self.local(x)))
    }

    /// First derivative in `x`: the degree `n-1` hodograph scaled by `n / (2 eps)`.
    pub fn derivative(&self, x: f64) -> Result<f64> {
        self.check(x)?;
        let n = self.degree as f64;
        let diffs: Vec<f64> = self
            .control_points
            .windows(2)
            .map(|w| w[1] - w[0])
            .collect();
        Ok(n / (2.0 * self.epsilon) * de_casteljau(&diffs, self.local(x)))
    }
}

/// Solves the control points of a transition joining two lines.
///
/// `left_value` is the left line's value at `center - epsilon` and
/// `right_value` the right line's value at `center + epsilon`; these become
/// the end control points. The lines must meet at `center`.
pub fn solve_transition(
    left_slope: f64,
    right_slope: f64,
    left_value: f64,
    right_value: f64,
    center: f64,
    epsilon: f64,
    degree: usize,
) -> Result<BernsteinTransition> {
    let inputs = [
        left_slope,
        right_slope,
        left_value,
        right_value,
        center,
        epsilon,
    ];
    if let Some(index) = inputs.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite {
            index,
            value: inputs[index],
        });
    }
    if degree < 2 {
        return Err(invalid(alloc::format!(
            "transition degree must be >= 2, got {degree}"
        )));
    }
    if epsilon <= 0.0 {
        return Err(invalid(alloc::format!(
            "epsilon must be > 0, got {epsilon}"
        )));
    }
    let left_at_center = left_value + left_slope * epsilon;
    let right_at_center = right_value - right_slope * epsilon;
    let gap = (left_at_center - right_at_center).abs();
    if gap >= CONTINUITY_TOL {
        return Err(Error::Discontinuous { center, gap });
    }

    let n = degree;
    let step = 2.0 * epsilon / n as f64;
    let first = left_value + step * left_slope;
    let last = right_value - step * right_slope;
    let mut beta = Vec::with_capacity(n + 1);
    beta.push(left_value);
    if n == 2 {
        // both slope conditions land on the middle point; they agree to within
        // the continuity tolerance, so split the difference
        beta.push(0.5 * (first + last));
    } else {
        let span = (n - 2) as f64;
        for k in 1..n {
            let w = (k - 1) as f64 / span;
            beta.push(first + w * (last - first));
        }
    }
    beta.push(right_value);

    Ok(BernsteinTransition {
        center,
        epsilon,
        degree,
        control_points: beta,
    })
}

/// Continuous piecewise-linear function given by its slopes and its value at zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPiecewiseLinear", into = "RawPiecewiseLinear")]
pub struct PiecewiseLinear {
    breakpoints: Vec<f64>,
    slopes: Vec<f64>,
    value_at_zero: f64,
    // value at each breakpoint
    knot_values: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPiecewiseLinear {
    breakpoints: Vec<f64>,
    slopes: Vec<f64>,
    value_at_zero: f64,
}

impl TryFrom<RawPiecewiseLinear> for PiecewiseLinear {
    type Error = Error;

    fn try_from(raw: RawPiecewiseLinear) -> Result<Self> {
        PiecewiseLinear::new(raw.breakpoints, raw.slopes, raw.value_at_zero)
    }
}

impl From<PiecewiseLinear> for RawPiecewiseLinear {
    fn from(p: PiecewiseLinear) -> Self {
        RawPiecewiseLinear {
            breakpoints: p.breakpoints,
            slopes: p.slopes,
            value_at_zero: p.value_at_zero,
        }
    }
}

impl PiecewiseLinear {
    pub fn new(breakpoints: Vec<f64>, slopes: Vec<f64>, value_at_zero: f64) -> Result<Self> {
        if slopes.is_empty() {
            return Err(invalid(
                "piecewise-linear function needs at least one slope",
            ));
        }
        if slopes.len() != breakpoints.len() + 1 {
            return Err(invalid(alloc::format!(
                "expected {} slopes for {} breakpoints, got {}",
                breakpoints.len() + 1,
                breakpoints.len(),
                slopes.len()
            )));
        }
        let all = breakpoints
            .iter()
            .chain(&slopes)
            .chain(core::iter::once(&value_at_zero));
        if let Some((index, &value)) = all.enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite { index, value });
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid("breakpoints must be strictly increasing"));
        }
        let mut pwl = Self {
            breakpoints,
            slopes,
            value_at_zero,
            knot_values: Vec::new(),
        };
        pwl.knot_values = pwl
            .breakpoints
            .iter()
            .map(|&b| value_at_zero + pwl.integral_from_zero(b))
            .collect();
        Ok(pwl)
    }

    /// `max(alpha x, x)`-style leaky rectifier with a single kink at zero.
    pub fn leaky_relu(alpha: f64) -> Self {
        Self::new(alloc::vec![0.0], alloc::vec![alpha, 1.0], 0.0).unwrap()
    }

    pub fn identity() -> Self {
        Self::new(Vec::new(), alloc::vec![1.0], 0.0).unwrap()
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn slopes(&self) -> &[f64] {
        &self.slopes
    }

    pub fn value_at_zero(&self) -> f64 {
        self.value_at_zero
    }

    fn integral_from_zero(&self, x: f64) -> f64 {
        let (lo, hi, sign) = if x >= 0.0 {
            (0.0, x, 1.0)
        } else {
            (x, 0.0, -1.0)
        };
        let mut total = 0.0;
        for (i, &s) in self.slopes.iter().enumerate() {
            let seg_lo = if i == 0 {
                f64::NEG_INFINITY
            } else {
                self.breakpoints[i - 1]
            };
            let seg_hi = self.breakpoints.get(i).copied().unwrap_or(f64::INFINITY);
            let overlap = hi.min(seg_hi) - lo.max(seg_lo);
            if overlap > 0.0 {
                total += s * overlap;
            }
        }
        sign * total
    }

    fn segment(&self, x: f64) -> usize {
        self.breakpoints.partition_point(|&b| b <= x)
    }

    /// Slope of segment `i` (segment 0 lies left of the first breakpoint).
    pub fn slope(&self, i: usize) -> f64 {
        self.slopes[i]
    }

    /// Value of the line carrying segment `i`, extended to any `x`.
    pub fn line(&self, i: usize, x: f64) -> f64 {
        if self.breakpoints.is_empty() {
            self.value_at_zero + self.slopes[0] * x
        } else if i == 0 {
            self.knot_values[0] + self.slopes[0] * (x - self.breakpoints[0])
        } else {
            self.knot_values[i - 1] + self.slopes[i] * (x - self.breakpoints[i - 1])
        }
    }

    pub fn value(&self, x: f64) -> f64 {
        self.line(self.segment(x), x)
    }

    /// Right-hand derivative.
    pub fn derivative(&self, x: f64) -> f64 {
        self.slopes[self.segment(x)]
    }

    fn min_gap(&self) -> Option<f64> {
        self.breakpoints
            .windows(2)
            .map(|w| w[1] - w[0])
            .reduce(f64::min)
    }
}

/// A piecewise-linear function with every kink replaced by a Bernstein transition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmoothedActivation {
    pub base: PiecewiseLinear,
    pub transitions: Vec<BernsteinTransition>,
}

impl SmoothedActivation {
    fn transition_at(&self, x: f64) -> Option<&BernsteinTransition> {
        let i = self
            .transitions
            .partition_point(|t| t.center + t.epsilon < x);
        self.transitions.get(i).filter(|t| t.contains(x))
    }

    pub fn value(&self, x: f64) -> f64 {
        match self.transition_at(x) {
            Some(tr) => de_casteljau(&tr.control_points, tr.local(x)),
            None => self.base.value(x),
        }
    }

    pub fn derivative(&self, x: f64) -> f64 {
        match self.transition_at(x) {
            Some(tr) => tr.derivative(x).unwrap_or_else(|_| self.base.derivative(x)),
            None => self.base.derivative(x),
        }
    }
}

/// Replaces every breakpoint of `pwl` by a degree-`degree` Bernstein transition of radius `epsilon`.
pub fn mollify(pwl: &PiecewiseLinear, epsilon: f64, degree: usize) -> Result<SmoothedActivation> {
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(invalid(alloc::format!(
            "epsilon must be finite and > 0, got {epsilon}"
        )));
    }
    if let Some(gap) = pwl.min_gap() {
        if 2.0 * epsilon >= gap {
            return Err(Error::OverlappingTransitions {
                width: 2.0 * epsilon,
                gap,
            });
        }
    }
    let transitions = pwl
        .breakpoints()
        .iter()
        .enumerate()
        .map(|(i, &c)| {
            solve_transition(
                pwl.slope(i),
                pwl.slope(i + 1),
                pwl.line(i, c - epsilon),
                pwl.line(i + 1, c + epsilon),
                c,
                epsilon,
                degree,
            )
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SmoothedActivation {
        base: pwl.clone(),
        transitions,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::activations::BerLUParams;

    fn direct_sum(beta: &[f64], t: f64) -> f64 {
        let n = beta.len() - 1;
        beta.iter()
            .enumerate()
            .map(|(k, b)| b * bernstein_basis(k, n, t).unwrap())
            .sum()
    }

    #[test]
    fn basis_examples() {
        assert_eq!(bernstein_basis(0, 2, 0.0).unwrap(), 1.0);
        assert!((bernstein_basis(1, 2, 0.5).unwrap() - 0.5).abs() < 1e-15);
        // 6 * 0.09 * 0.49
        assert!((bernstein_basis(2, 4, 0.3).unwrap() - 0.2646).abs() < 1e-15);
    }

    #[test]
    fn basis_rejects_out_of_range() {
        assert!(bernstein_basis(3, 2, 0.5).is_err());
        assert!(bernstein_basis(0, 2, -0.1).is_err());
        assert!(bernstein_basis(0, 2, 1.1).is_err());
    }

    #[test]
    fn leaky_relu_control_points() {
        let alpha = 0.01;
        let eps = 0.01;
        let tr = solve_transition(alpha, 1.0, -alpha * eps, eps, 0.0, eps, 2).unwrap();
        let want = [-1e-4, 0.0, 1e-2];
        for (got, want) in tr.control_points.iter().zip(want) {
            assert!((got - want).abs() < 1e-15, "{:?}", tr.control_points);
        }
    }

    #[test]
    fn absolute_value_and_identity_control_points() {
        let abs = solve_transition(-1.0, 1.0, 1.0, 1.0, 0.0, 1.0, 2).unwrap();
        assert_eq!(abs.control_points, alloc::vec![1.0, 0.0, 1.0]);
        let id = solve_transition(1.0, 1.0, -1.0, 1.0, 0.0, 1.0, 2).unwrap();
        assert_eq!(id.control_points, alloc::vec![-1.0, 0.0, 1.0]);
        for x in [-1.0, -0.3, 0.0, 0.7, 1.0] {
            assert!((id.value(x).unwrap() - x).abs() < 1e-15);
        }
    }

    #[test]
    fn solve_rejects_bad_inputs() {
        assert!(matches!(
            solve_transition(0.0, 1.0, 0.0, 2.0, 0.0, 1.0, 2),
            Err(Error::Discontinuous { .. })
        ));
        assert!(matches!(
            solve_transition(f64::NAN, 1.0, 0.0, 1.0, 0.0, 1.0, 2),
            Err(Error::NonFinite { .. })
        ));
        assert!(solve_transition(0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 1).is_err());
        assert!(solve_transition(0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 2).is_err());
    }

    #[test]
    fn eval_transition_examples() {
        let tr = BernsteinTransition {
            center: 0.0,
            epsilon: 0.01,
            degree: 2,
            control_points: alloc::vec![-1e-4, 0.0, 1e-2],
        };
        assert!((tr.value(0.0).unwrap() - 0.002475).abs() < 1e-15);
        let id = BernsteinTransition {
            center: 0.0,
            epsilon: 1.0,
            degree: 2,
            control_points: alloc::vec![-1.0, 0.0, 1.0],
        };
        assert_eq!(id.value(1.0).unwrap(), 1.0);
        let abs = BernsteinTransition {
            center: 0.0,
            epsilon: 1.0,
            degree: 2,
            control_points: alloc::vec![1.0, 0.0, 1.0],
        };
        assert_eq!(abs.value(0.0).unwrap(), 0.5);
        assert!(matches!(abs.value(1.5), Err(Error::OutOfDomain { .. })));
    }

    #[test]
    fn transition_matches_berlu_closed_form() {
        for &(alpha, eps) in &[(0.01, 0.01), (0.25, 1.0), (-0.7, 0.3)] {
            let p = BerLUParams::with_any_alpha(alpha, eps).unwrap();
            let tr = solve_transition(alpha, 1.0, -alpha * eps, eps, 0.0, eps, 2).unwrap();
            for i in 0..=1000 {
                let x = -eps + 2.0 * eps * i as f64 / 1000.0;
                assert!((tr.value(x).unwrap() - p.value(x)).abs() < 1e-12);
                assert!((tr.derivative(x).unwrap() - p.dx(x)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn higher_degree_matches_slopes_at_ends() {
        for n in 3..=8 {
            let tr = solve_transition(0.1, 1.0, -0.05, 0.5, 0.0, 0.5, n).unwrap();
            assert_eq!(tr.control_points.len(), n + 1);
            assert!((tr.derivative(-0.5).unwrap() - 0.1).abs() < 1e-12);
            assert!((tr.derivative(0.5).unwrap() - 1.0).abs() < 1e-12);
            assert!(tr.control_points.windows(2).all(|w| w[1] >= w[0]));
        }
    }

    #[test]
    fn de_casteljau_agrees_with_direct_sum() {
        let beta = [0.3, -1.2, 2.5, 0.1, -0.4, 1.9, 0.0, 0.8, -2.2];
        for n in 0..=8 {
            let b = &beta[..=n];
            for i in 0..=64 {
                let t = i as f64 / 64.0;
                assert!((de_casteljau(b, t) - direct_sum(b, t)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn pwl_reconstruction() {
        // 2 - |x - 1| style tent plus a tail
        let pwl = PiecewiseLinear::new(
            alloc::vec![-1.0, 1.0, 3.0],
            alloc::vec![0.5, 1.0, -1.0, 0.0],
            1.0,
        )
        .unwrap();
        assert_eq!(pwl.value(0.0), 1.0);
        assert_eq!(pwl.value(1.0), 2.0);
        assert_eq!(pwl.value(3.0), 0.0);
        assert_eq!(pwl.value(10.0), 0.0);
        assert_eq!(pwl.value(-1.0), 0.0);
        assert_eq!(pwl.value(-3.0), -1.0);
        assert_eq!(pwl.derivative(1.0), -1.0);
    }

    #[test]
    fn pwl_rejects_malformed() {
        assert!(PiecewiseLinear::new(alloc::vec![], alloc::vec![], 0.0).is_err());
        assert!(PiecewiseLinear::new(alloc::vec![0.0], alloc::vec![1.0], 0.0).is_err());
        assert!(
            PiecewiseLinear::new(alloc::vec![1.0, 0.0], alloc::vec![1.0, 1.0, 1.0], 0.0).is_err()
        );
        assert!(
            PiecewiseLinear::new(alloc::vec![0.0, 0.0], alloc::vec![1.0, 1.0, 1.0], 0.0).is_err()
        );
    }

    #[test]
    fn mollify_examples() {
        let id = mollify(&PiecewiseLinear::identity(), 0.5, 2).unwrap();
        assert!(id.transitions.is_empty());
        assert_eq!(id.value(3.25), 3.25);

        let relu = mollify(&PiecewiseLinear::leaky_relu(0.0), 1.0, 2).unwrap();
        assert!((relu.value(0.0) - 0.25).abs() < 1e-15);

        let tight =
            PiecewiseLinear::new(alloc::vec![0.0, 1.0], alloc::vec![0.0, 1.0, 0.0], 0.0).unwrap();
        assert!(matches!(
            mollify(&tight, 0.5, 2),
            Err(Error::OverlappingTransitions { .. })
        ));
        assert!(mollify(&tight, 0.49, 2).is_ok());
    }

    #[test]
    fn mollify_leaky_relu_equals_berlu() {
        let p = BerLUParams::new(0.01, 0.01).unwrap();
        let sm = mollify(&PiecewiseLinear::leaky_relu(0.01), 0.01, 2).unwrap();
        let n = 100_000;
        let mut worst = 0.0f64;
        for i in 0..=n {
            let x = -0.05 + 0.1 * i as f64 / n as f64;
            worst = worst.max((sm.value(x) - p.value(x)).abs());
        }
        assert!(worst < 1e-12, "max diff {worst}");
    }

    #[test]
    fn mollified_multi_kink_is_c1() {
        let pwl = PiecewiseLinear::new(
            alloc::vec![-1.0, 0.5, 2.0],
            alloc::vec![-0.2, 1.5, 0.3, 2.0],
            0.4,
        )
        .unwrap();
        for degree in [2, 3, 5] {
            let eps = 0.2;
            let sm = mollify(&pwl, eps, degree).unwrap();
            for tr in &sm.transitions {
                for seam in [tr.center - eps, tr.center + eps] {
                    let h = 1e-7;
                    let left = (sm.value(seam) - sm.value(seam - h)) / h;
                    let right = (sm.value(seam + h) - sm.value(seam)) / h;
                    // one-sided quotients on a C1 function differ by O(h f'')
                    assert!(
                        (left - right).abs() < 1e-5,
                        "degree {degree} seam {seam}: {left} vs {right}"
                    );
                    let analytic_in = tr.derivative(seam).unwrap();
                    let analytic_out =
                        pwl.derivative(seam + if seam > tr.center { 1e-12 } else { -1e-12 });
                    assert!(
                        (analytic_in - analytic_out).abs() <= 1e-8 * analytic_out.abs().max(1.0)
                    );
                }
            }
        }
    }
}
