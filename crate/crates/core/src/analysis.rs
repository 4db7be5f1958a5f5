//! Verification instruments: Lipschitz estimation, finite-difference gradient
//! checks, critical initialization and the depth-correlation probe.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::activations::{ActivationSpec, NumericBuffer};
use crate::error::{invalid, Error, Result};

/// Denominator floor for relative gradient errors.
pub const REL_ERROR_FLOOR: f64 = 1e-8;

const INV_GOLDEN: f64 = 0.618_033_988_749_894_9;

/// Central difference `(f(x+h) - f(x-h)) / 2h`.
pub fn central_difference(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (f(x + h) - f(x - h)) / (2.0 * h)
}

/// Which side of `x` a one-sided difference samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Five-point one-sided derivative, exact for polynomials up to degree four.
pub fn one_sided_derivative(f: impl Fn(f64) -> f64, x: f64, h: f64, side: Side) -> f64 {
    let s = match side {
        Side::Right => h,
        Side::Left => -h,
    };
    let v: [f64; 5] = core::array::from_fn(|k| f(x + s * k as f64));
    (-25.0 * v[0] + 48.0 * v[1] - 36.0 * v[2] + 16.0 * v[3] - 3.0 * v[4]) / (12.0 * s)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchGrid {
    pub lo: f64,
    pub hi: f64,
    pub coarse_points: usize,
    pub refine_iters: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LipschitzReport {
    pub spec: ActivationSpec,
    /// Numerical supremum of `|f'|` over the grid.
    pub estimate: f64,
    /// Closed-form constant, when one is known.
    pub exact: Option<f64>,
    pub argmax_x: f64,
    pub grid: SearchGrid,
    /// Set when a slope parameter has left `[-1, 1]`, where the unit stops being non-expansive.
    pub alpha_outside_unit: bool,
}

/// Closed-form Lipschitz constant of the families where it is elementary.
pub fn exact_lipschitz(spec: &ActivationSpec) -> Option<f64> {
    match *spec {
        ActivationSpec::BerLU(p) => Some(p.alpha().abs().max(1.0)),
        ActivationSpec::LeakyReLU { alpha } | ActivationSpec::PReLU { alpha } => {
            Some(alpha.abs().max(1.0))
        }
        ActivationSpec::ReLU | ActivationSpec::Identity | ActivationSpec::CELU { .. } => Some(1.0),
        ActivationSpec::ELU { scale } => Some(scale.max(1.0)),
        _ => None,
    }
}

/// Grid search of `|f'|` over `range`, refined by golden-section search
/// around the coarse maximiser.
pub fn estimate_lipschitz(
    spec: &ActivationSpec,
    range: (f64, f64),
    coarse_points: usize,
    refine_iters: usize,
) -> Result<LipschitzReport> {
    spec.validate()?;
    let (lo, hi) = range;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(invalid(alloc::format!("invalid search range [{lo}, {hi}]")));
    }
    if coarse_points < 1000 {
        return Err(invalid(alloc::format!(
            "coarse_points must be >= 1000, got {coarse_points}"
        )));
    }
    let slope = |x: f64| spec.dx(x).abs();
    let step = (hi - lo) / (coarse_points - 1) as f64;
    let at = |i: usize| {
        if i + 1 == coarse_points {
            hi
        } else {
            lo + step * i as f64
        }
    };

    let (mut best_i, mut best) = (0, slope(lo));
    for i in 1..coarse_points {
        let v = slope(at(i));
        if v > best {
            best = v;
            best_i = i;
        }
    }
    let mut argmax_x = at(best_i);

    let mut a = at(best_i.saturating_sub(1));
    let mut b = at((best_i + 1).min(coarse_points - 1));
    let mut c = b - INV_GOLDEN * (b - a);
    let mut d = a + INV_GOLDEN * (b - a);
    let (mut fc, mut fd) = (slope(c), slope(d));
    for _ in 0..refine_iters {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_GOLDEN * (b - a);
            fc = slope(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_GOLDEN * (b - a);
            fd = slope(d);
        }
    }
    for (x, v) in [(c, fc), (d, fd)] {
        if v > best {
            best = v;
            argmax_x = x;
        }
    }

    Ok(LipschitzReport {
        spec: *spec,
        estimate: best,
        exact: exact_lipschitz(spec),
        argmax_x,
        grid: SearchGrid {
            lo,
            hi,
            coarse_points,
            refine_iters,
        },
        alpha_outside_unit: spec.alpha().is_some_and(|a| a.abs() > 1.0),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GradCheckReport {
    pub spec: ActivationSpec,
    pub max_rel_error: f64,
    pub worst_x: f64,
    pub step: f64,
}

/// Compares the analytic derivative against central differences at every point of `xs`.
pub fn grad_check(spec: &ActivationSpec, xs: &NumericBuffer, step: f64) -> Result<GradCheckReport> {
    spec.validate()?;
    if !(step > 0.0 && step <= 1e-2) {
        return Err(invalid(alloc::format!(
            "step must lie in (0, 1e-2], got {step}"
        )));
    }
    xs.check_finite()?;
    let mut report = GradCheckReport {
        spec: *spec,
        max_rel_error: 0.0,
        worst_x: 0.0,
        step,
    };
    for &x in xs.iter() {
        let analytic = spec.dx(x);
        let numeric = central_difference(|v| spec.forward(v), x, step);
        let err = (analytic - numeric).abs() / analytic.abs().max(REL_ERROR_FLOOR);
        if err > report.max_rel_error {
            report.max_rel_error = err;
            report.worst_x = x;
        }
    }
    Ok(report)
}

/// `n` evenly spaced points in `[lo, hi]`, dropping those within `margin` of a seam of `spec`.
pub fn grid_away_from_seams(
    spec: &ActivationSpec,
    lo: f64,
    hi: f64,
    n: usize,
    margin: f64,
) -> NumericBuffer {
    let seams = spec.seams();
    NumericBuffer::linspace(lo, hi, n)
        .into_vec()
        .into_iter()
        .filter(|x| seams.iter().all(|s| (x - s).abs() > margin))
        .collect::<Vec<_>>()
        .into()
}

/// Nodes and weights of `n`-point Gauss–Hermite quadrature for the weight `exp(-x^2)`.
pub fn gauss_hermite(n: usize) -> (Vec<f64>, Vec<f64>) {
    // Newton iteration on orthonormal Hermite polynomials, seeded with the
    // classical asymptotic guesses for the largest roots.
    const PIM4: f64 = 0.751_125_544_464_942_5;
    let mut x = alloc::vec![0.0; n];
    let mut w = alloc::vec![0.0; n];
    let nf = n as f64;
    let mut z = 0.0;
    for i in 0..n.div_ceil(2) {
        z = match i {
            0 => libm::sqrt(2.0 * nf + 1.0) - 1.855_75 * libm::pow(2.0 * nf + 1.0, -0.166_67),
            1 => z - 1.14 * libm::pow(nf, 0.426) / z,
            2 => 1.86 * z - 0.86 * x[0],
            3 => 1.91 * z - 0.91 * x[1],
            _ => 2.0 * z - x[i - 2],
        };
        let mut pp = 0.0;
        for _ in 0..100 {
            let mut p1 = PIM4;
            let mut p2 = 0.0;
            for j in 1..=n {
                let jf = j as f64;
                let p3 = p2;
                p2 = p1;
                p1 = z * libm::sqrt(2.0 / jf) * p2 - libm::sqrt((jf - 1.0) / jf) * p3;
            }
            pp = libm::sqrt(2.0 * nf) * p2;
            let z1 = z;
            z = z1 - p1 / pp;
            if (z - z1).abs() <= 1e-15 * z.abs().max(1.0) {
                break;
            }
        }
        x[i] = z;
        x[n - 1 - i] = -z;
        w[i] = 2.0 / (pp * pp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// `E[g(Z)]`, `Z ~ N(0, 1)`, by 64-node Gauss–Hermite quadrature.
pub fn gaussian_expectation(g: impl Fn(f64) -> f64) -> f64 {
    let (x, w) = gauss_hermite(64);
    let sum: f64 = x
        .iter()
        .zip(&w)
        .map(|(&xi, &wi)| wi * g(core::f64::consts::SQRT_2 * xi))
        .sum();
    sum / libm::sqrt(core::f64::consts::PI)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalInit {
    pub weight_var: f64,
    pub bias_var: f64,
}

/// Weight variance on the edge of chaos with zero bias: `sigma_w^2 E[f'(sqrt(q) Z)^2] = 1`.
pub fn find_critical_init(spec: &ActivationSpec, target_q: f64) -> Result<CriticalInit> {
    spec.validate()?;
    if !(target_q.is_finite() && target_q > 0.0) {
        return Err(invalid(alloc::format!(
            "target_q must be > 0, got {target_q}"
        )));
    }
    let sq = libm::sqrt(target_q);
    let gain = gaussian_expectation(|z| {
        let d = spec.dx(sq * z);
        d * d
    });
    let residual = |s: f64| s * gain - 1.0;
    let (mut lo, mut hi) = (1e-3, 1e2);
    if residual(lo) > 0.0 || residual(hi) < 0.0 {
        return Err(Error::NoRoot { lo, hi });
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if residual(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    Ok(CriticalInit {
        weight_var: 0.5 * (lo + hi),
        bias_var: 0.0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbeInit {
    pub weight_var: f64,
    pub bias_var: f64,
    pub target_q: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationTrace {
    pub depth: usize,
    /// `1 - c_l` for layers `1..=depth`.
    pub one_minus_c: Vec<f64>,
    pub width: usize,
    pub trials: usize,
    pub init: ProbeInit,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbeConfig {
    pub depth: usize,
    pub width: usize,
    pub trials: usize,
    pub c0: f64,
    pub target_q: f64,
    pub seed: u64,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        Self {
            depth: 64,
            width: 1024,
            trials: 32,
            c0: 0.5,
            target_q: 1.0,
            seed: 0,
        }
    }
}

/// Propagates two correlated inputs through random dense layers at critical
/// initialization and records the pre-activation correlation per layer.
pub fn correlation_probe(spec: &ActivationSpec, cfg: &ProbeConfig) -> Result<CorrelationTrace> {
    let init = find_critical_init(spec, cfg.target_q)?;
    correlation_probe_with(spec, cfg, init.weight_var)
}

/// [`correlation_probe`] with an explicit weight variance.
pub fn correlation_probe_with(
    spec: &ActivationSpec,
    cfg: &ProbeConfig,
    weight_var: f64,
) -> Result<CorrelationTrace> {
    check_probe(spec, cfg, weight_var)?;
    let trials = (0..cfg.trials as u64)
        .map(|t| probe_trial(spec, cfg, weight_var, t))
        .collect::<Result<Vec<_>>>()?;
    Ok(aggregate_trials(cfg, weight_var, &trials))
}

/// Rejects probe settings too small to resolve the decay, or out of domain.
pub fn check_probe(spec: &ActivationSpec, cfg: &ProbeConfig, weight_var: f64) -> Result<()> {
    spec.validate()?;
    let &ProbeConfig {
        depth,
        width,
        trials,
        c0,
        target_q,
        ..
    } = cfg;
    if depth < 16 || width < 256 || trials < 8 {
        return Err(invalid(alloc::format!(
            "probe needs depth >= 16, width >= 256, trials >= 8; got {depth}, {width}, {trials}"
        )));
    }
    if !(c0 > 0.0 && c0 < 1.0) {
        return Err(invalid(alloc::format!("c0 must lie in (0, 1), got {c0}")));
    }
    if !(target_q > 0.0 && weight_var > 0.0) {
        return Err(invalid("target_q and weight_var must be > 0"));
    }
    Ok(())
}

/// Averages per-trial correlations in trial order, so any scheduling of
/// [`probe_trial`] calls gives the same trace.
pub fn aggregate_trials(
    cfg: &ProbeConfig,
    weight_var: f64,
    trials: &[Vec<f64>],
) -> CorrelationTrace {
    let mut sum_c = alloc::vec![0.0; cfg.depth];
    for cs in trials {
        for (acc, c) in sum_c.iter_mut().zip(cs) {
            *acc += c;
        }
    }
    let n = trials.len() as f64;
    CorrelationTrace {
        depth: cfg.depth,
        one_minus_c: sum_c
            .iter()
            .map(|s| (1.0 - s / n).clamp(0.0, 2.0))
            .collect(),
        width: cfg.width,
        trials: trials.len(),
        init: ProbeInit {
            weight_var,
            bias_var: 0.0,
            target_q: cfg.target_q,
        },
    }
}

/// One independent trial: pre-activation correlation at layers `1..=depth`.
/// Trial `t` draws from stream `t` of the seeded generator.
pub fn probe_trial(
    spec: &ActivationSpec,
    cfg: &ProbeConfig,
    weight_var: f64,
    trial: u64,
) -> Result<Vec<f64>> {
    let width = cfg.width;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(trial);

    let mut u: Vec<f64> = (0..width).map(|_| rng.sample(StandardNormal)).collect();
    let mut v: Vec<f64> = (0..width).map(|_| rng.sample(StandardNormal)).collect();
    normalize(&mut u);
    let proj = dot(&u, &v);
    v.iter_mut().zip(&u).for_each(|(vi, ui)| *vi -= proj * ui);
    normalize(&mut v);

    let radius = libm::sqrt(cfg.target_q * width as f64);
    let ortho = libm::sqrt(1.0 - cfg.c0 * cfg.c0);
    let mut a: Vec<f64> = u.iter().map(|ui| radius * ui).collect();
    let mut b: Vec<f64> = u
        .iter()
        .zip(&v)
        .map(|(ui, vi)| radius * (cfg.c0 * ui + ortho * vi))
        .collect();

    let std = libm::sqrt(weight_var / width as f64);
    let mut row = alloc::vec![0.0; width];
    let mut ha = alloc::vec![0.0; width];
    let mut hb = alloc::vec![0.0; width];
    let mut out = Vec::with_capacity(cfg.depth);
    for layer in 0..cfg.depth {
        for i in 0..width {
            for r in row.iter_mut() {
                *r = std * rng.sample::<f64, _>(StandardNormal);
            }
            ha[i] = dot(&row, &a);
            hb[i] = dot(&row, &b);
        }
        let c = dot(&ha, &hb) / libm::sqrt(dot(&ha, &ha) * dot(&hb, &hb));
        if !c.is_finite() {
            return Err(Error::NumericalOverflow { layer: layer + 1 });
        }
        out.push(c.clamp(-1.0, 1.0));
        for (dst, &h) in a.iter_mut().zip(&ha) {
            *dst = spec.forward(h);
        }
        for (dst, &h) in b.iter_mut().zip(&hb) {
            *dst = spec.forward(h);
        }
    }
    Ok(out)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn normalize(v: &mut [f64]) {
    let n = libm::sqrt(dot(v, v));
    v.iter_mut().for_each(|x| *x /= n);
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    /// `p` in `1 - c_l ~ coefficient * l^(-p)`.
    pub exponent: f64,
    pub coefficient: f64,
    pub fit_range: (usize, usize),
    pub r_squared: f64,
}

/// Log-log least-squares fit of `1 - c_l` over the inclusive layer range.
pub fn fit_decay(trace: &CorrelationTrace, fit_range: (usize, usize)) -> Result<DecayFit> {
    let (lo, hi) = fit_range;
    if lo < 1 || hi > trace.one_minus_c.len() || lo > hi {
        return Err(invalid(alloc::format!(
            "fit range [{lo}, {hi}] outside [1, {}]",
            trace.one_minus_c.len()
        )));
    }
    if hi - lo + 1 < 8 {
        return Err(invalid(alloc::format!(
            "fit range [{lo}, {hi}] has fewer than 8 layers"
        )));
    }
    let mut xs = Vec::with_capacity(hi - lo + 1);
    let mut ys = Vec::with_capacity(hi - lo + 1);
    for layer in lo..=hi {
        let v = trace.one_minus_c[layer - 1];
        if v <= 0.0 {
            return Err(Error::SaturatedCorrelation { layer, value: v });
        }
        xs.push(libm::log(layer as f64));
        ys.push(libm::log(v));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r_squared = if syy == 0.0 {
        1.0
    } else {
        sxy * sxy / (sxx * syy)
    };
    Ok(DecayFit {
        exponent: -slope,
        coefficient: libm::exp(intercept),
        fit_range,
        r_squared,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn synthetic(values: impl Fn(f64) -> f64, depth: usize) -> CorrelationTrace {
        CorrelationTrace {
            depth,
            one_minus_c: (1..=depth).map(|l| values(l as f64)).collect(),
            width: 0,
            trials: 0,
            init: ProbeInit {
                weight_var: 1.0,
                bias_var: 0.0,
                target_q: 1.0,
            },
        }
    }

    #[test]
    fn quadrature_moments() {
        let (x, w) = gauss_hermite(64);
        let pi = core::f64::consts::PI;
        assert!((w.iter().sum::<f64>() - libm::sqrt(pi)).abs() < 1e-12);
        assert!(x.windows(2).all(|p| p[0] > p[1]));
        assert!((gaussian_expectation(|z| z * z) - 1.0).abs() < 1e-12);
        assert!((gaussian_expectation(|z| z * z * z * z) - 3.0).abs() < 1e-11);
        assert!(gaussian_expectation(|z| z).abs() < 1e-13);
    }

    #[test]
    fn one_sided_is_exact_on_quartics() {
        let f = |x: f64| 3.0 * x * x * x * x - x * x + 2.0;
        let d = |x: f64| 12.0 * x * x * x - 2.0 * x;
        for side in [Side::Left, Side::Right] {
            assert!((one_sided_derivative(f, 0.7, 1e-3, side) - d(0.7)).abs() < 1e-9);
        }
    }

    #[test]
    fn lipschitz_identity_and_berlu() {
        let id = estimate_lipschitz(&ActivationSpec::Identity, (-10.0, 10.0), 1000, 50).unwrap();
        assert_eq!(id.estimate, 1.0);
        let b = estimate_lipschitz(
            &ActivationSpec::berlu(0.01, 0.01).unwrap(),
            (-10.0, 10.0),
            2001,
            60,
        )
        .unwrap();
        assert!((b.estimate - 1.0).abs() < 1e-12);
        assert_eq!(b.exact, Some(1.0));
        assert!(!b.alpha_outside_unit);
    }

    #[test]
    fn lipschitz_flags_large_alpha() {
        let spec = ActivationSpec::BerLU(crate::BerLUParams::with_any_alpha(-1.5, 0.01).unwrap());
        let r = estimate_lipschitz(&spec, (-10.0, 10.0), 1000, 40).unwrap();
        assert!(r.alpha_outside_unit);
        assert!((r.estimate - 1.5).abs() < 1e-12);
    }

    #[test]
    fn lipschitz_rejects_bad_grid() {
        assert!(estimate_lipschitz(&ActivationSpec::GELU, (-1.0, 1.0), 999, 10).is_err());
        assert!(estimate_lipschitz(&ActivationSpec::GELU, (1.0, -1.0), 1000, 10).is_err());
        assert!(estimate_lipschitz(&ActivationSpec::GELU, (f64::NAN, 1.0), 1000, 10).is_err());
    }

    #[test]
    fn grad_check_identity() {
        let xs = NumericBuffer::linspace(-3.0, 7.0, 101);
        let r = grad_check(&ActivationSpec::Identity, &xs, 1e-5).unwrap();
        assert!(r.max_rel_error < 1e-10);
        assert!(grad_check(&ActivationSpec::Identity, &xs, 0.0).is_err());
        assert!(grad_check(&ActivationSpec::Identity, &xs, 0.1).is_err());
    }

    #[test]
    fn grid_drops_seam_neighbourhoods() {
        let spec = ActivationSpec::berlu(0.01, 0.01).unwrap();
        let xs = grid_away_from_seams(&spec, -1.0, 1.0, 10_001, 1e-4);
        assert!(xs.iter().all(|x| (x.abs() - 0.01).abs() > 1e-4));
        assert!(xs.len() < 10_001 && xs.len() > 9_900);
    }

    #[test]
    fn critical_init_examples() {
        let relu = find_critical_init(&ActivationSpec::ReLU, 1.0).unwrap();
        assert!((relu.weight_var - 2.0).abs() < 1e-3);
        let id = find_critical_init(&ActivationSpec::Identity, 1.0).unwrap();
        assert!((id.weight_var - 1.0).abs() < 1e-9);
        let b = find_critical_init(&ActivationSpec::berlu(0.01, 0.01).unwrap(), 1.0).unwrap();
        // E[f'^2] = (1 + alpha^2)/2 up to the O(eps) transition
        assert!((b.weight_var - 2.0 / 1.0001).abs() < 1e-2);
        assert!(find_critical_init(&ActivationSpec::ReLU, 0.0).is_err());
    }

    #[test]
    fn critical_init_no_root() {
        // E[f'^2] = (1 + 50^2) / 2 would need sigma_w^2 < 1e-3
        let steep = ActivationSpec::LeakyReLU { alpha: 50.0 };
        assert!(matches!(
            find_critical_init(&steep, 1.0),
            Err(Error::NoRoot { .. })
        ));
        let ok = find_critical_init(&ActivationSpec::LeakyReLU { alpha: 40.0 }, 1.0).unwrap();
        assert!((ok.weight_var - 2.0 / 1601.0).abs() < 1e-12);
    }

    #[test]
    fn fit_exact_power_laws() {
        let t = synthetic(|l| 1.0 / (l * l), 32);
        let f = fit_decay(&t, (1, 32)).unwrap();
        assert!((f.exponent - 2.0).abs() < 1e-6);
        assert!((f.coefficient - 1.0).abs() < 1e-6);
        let t = synthetic(|l| 0.3 / l, 32);
        let f = fit_decay(&t, (4, 32)).unwrap();
        assert!((f.exponent - 1.0).abs() < 1e-6);
        assert!((f.coefficient - 0.3).abs() < 1e-6);
        assert!((f.r_squared - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fit_rejects_bad_ranges() {
        let mut t = synthetic(|l| 1.0 / l, 32);
        assert!(fit_decay(&t, (1, 7)).is_err());
        assert!(fit_decay(&t, (0, 10)).is_err());
        assert!(fit_decay(&t, (1, 33)).is_err());
        t.one_minus_c[20] = 0.0;
        assert!(matches!(
            fit_decay(&t, (8, 32)),
            Err(Error::SaturatedCorrelation { layer: 21, .. })
        ));
    }

    #[test]
    fn probe_validates_and_is_reproducible() {
        let spec = ActivationSpec::ReLU;
        let cfg = ProbeConfig {
            depth: 16,
            width: 256,
            trials: 8,
            c0: 0.5,
            target_q: 1.0,
            seed: 7,
        };
        let a = correlation_probe(&spec, &cfg).unwrap();
        let b = correlation_probe(&spec, &cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.one_minus_c.len(), 16);
        assert!(a.one_minus_c.iter().all(|v| (0.0..=2.0).contains(v)));
        // correlations climb towards one with depth
        assert!(a.one_minus_c[15] < a.one_minus_c[0]);
        let other = correlation_probe(&spec, &ProbeConfig { seed: 8, ..cfg }).unwrap();
        assert_ne!(a, other);
        assert!(correlation_probe(&spec, &ProbeConfig { depth: 15, ..cfg }).is_err());
        assert!(correlation_probe(&spec, &ProbeConfig { c0: 1.0, ..cfg }).is_err());
    }

    #[test]
    fn probe_reports_overflow_layer() {
        let cfg = ProbeConfig {
            depth: 16,
            width: 256,
            trials: 8,
            c0: 0.5,
            target_q: 1.0,
            seed: 1,
        };
        let err = correlation_probe_with(&ActivationSpec::Identity, &cfg, 1e300).unwrap_err();
        assert!(matches!(err, Error::NumericalOverflow { .. }), "{err:?}");
    }
}
