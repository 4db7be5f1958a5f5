//! Closed-form activations and their derivatives.
//!
//! Every activation is exposed through [`ActivationSpec`], which carries exactly
//! the parameters of its family. Scalar evaluation lives on the spec itself;
//! the buffer functions ([`eval_forward`], [`eval_dx`], [`eval_dalpha`]) validate
//! their input and apply the scalar path element by element, so buffer and
//! scalar results are bit-identical.
//!
//! Derivatives of the piecewise baselines use the right-hand value at their
//! kink, so `ReLU'(0) = 1`.

use alloc::vec::Vec;
use core::f64::consts::{FRAC_1_SQRT_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Default mollification radius.
pub const DEFAULT_EPSILON: f64 = 1e-2;
/// Initial value of the learnable negative slope.
pub const DEFAULT_ALPHA: f64 = 1e-2;

/// Parameters of the Bernstein Linear Unit.
///
/// The quadratic transition coefficients are precomputed at construction, so
/// a value is immutable once built; a new slope means a new `BerLUParams`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawBerLU", into = "RawBerLU")]
pub struct BerLUParams {
    alpha: f64,
    epsilon: f64,
    // (1 - alpha) / (4 epsilon)
    quad: f64,
    // (1 + alpha) / 2
    lin: f64,
    // (1 - alpha) epsilon / 4
    constant: f64,
}

#[derive(Serialize, Deserialize)]
struct RawBerLU {
    alpha: f64,
    epsilon: f64,
}

impl TryFrom<RawBerLU> for BerLUParams {
    type Error = Error;

    fn try_from(raw: RawBerLU) -> Result<Self> {
        BerLUParams::with_any_alpha(raw.alpha, raw.epsilon)
    }
}

impl From<BerLUParams> for RawBerLU {
    fn from(p: BerLUParams) -> Self {
        RawBerLU {
            alpha: p.alpha,
            epsilon: p.epsilon,
        }
    }
}

impl BerLUParams {
    /// Builds parameters in the supported regime `|alpha| <= 1`, `epsilon > 0`.
    pub fn new(alpha: f64, epsilon: f64) -> Result<Self> {
        if alpha.is_finite() && alpha.abs() > 1.0 {
            return Err(invalid(alloc::format!(
                "BerLU alpha must satisfy |alpha| <= 1, got {alpha}"
            )));
        }
        Self::with_any_alpha(alpha, epsilon)
    }

    /// Builds parameters for any finite slope.
    ///
    /// Training leaves `alpha` unconstrained, and the `|alpha| > 1` regime is
    /// still well defined (its Lipschitz constant becomes `|alpha|`), so this
    /// constructor only checks finiteness and `epsilon > 0`.
    pub fn with_any_alpha(alpha: f64, epsilon: f64) -> Result<Self> {
        if !alpha.is_finite() {
            return Err(invalid(alloc::format!(
                "BerLU alpha must be finite, got {alpha}"
            )));
        }
        if !(epsilon.is_finite() && epsilon > 0.0) {
            return Err(invalid(alloc::format!(
                "BerLU epsilon must be finite and > 0, got {epsilon}"
            )));
        }
        Ok(Self {
            alpha,
            epsilon,
            quad: (1.0 - alpha) / (4.0 * epsilon),
            lin: (1.0 + alpha) / 2.0,
            constant: (1.0 - alpha) * epsilon / 4.0,
        })
    }

    #[inline]
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    #[inline]
    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// `true` when the slope lies in the regime where the unit is non-expansive.
    pub fn is_nonexpansive(&self) -> bool {
        self.alpha.abs() <= 1.0
    }

    /// Bernstein control points `[-alpha*eps, 0, eps]` of the quadratic transition.
    pub fn control_points(&self) -> [f64; 3] {
        [-self.alpha * self.epsilon, 0.0, self.epsilon]
    }

    #[inline]
    pub fn value(&self, x: f64) -> f64 {
        if x < -self.epsilon {
            self.alpha * x
        } else if x > self.epsilon {
            x
        } else {
            (self.quad * x + self.lin) * x + self.constant
        }
    }

    #[inline]
    pub fn dx(&self, x: f64) -> f64 {
        if x < -self.epsilon {
            self.alpha
        } else if x > self.epsilon {
            1.0
        } else {
            2.0 * self.quad * x + self.lin
        }
    }

    /// Sensitivity of the output to the negative slope.
    #[inline]
    pub fn dalpha(&self, x: f64) -> f64 {
        if x < -self.epsilon {
            x
        } else if x > self.epsilon {
            0.0
        } else {
            let d = x - self.epsilon;
            -d * d / (4.0 * self.epsilon)
        }
    }
}

impl Default for BerLUParams {
    fn default() -> Self {
        Self::with_any_alpha(DEFAULT_ALPHA, DEFAULT_EPSILON).unwrap()
    }
}

/// An activation family together with its parameters.
#[allow(clippy::upper_case_acronyms)]
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ActivationSpec {
    #[serde(rename = "berlu")]
    BerLU(BerLUParams),
    #[serde(rename = "leaky_relu")]
    LeakyReLU { alpha: f64 },
    #[serde(rename = "relu")]
    ReLU,
    #[serde(rename = "prelu")]
    PReLU { alpha: f64 },
    #[serde(rename = "gelu")]
    GELU,
    #[serde(rename = "elu")]
    ELU { scale: f64 },
    #[serde(rename = "celu")]
    CELU { scale: f64 },
    #[serde(rename = "silu")]
    SiLU,
    #[serde(rename = "mish")]
    Mish,
    #[serde(rename = "identity")]
    Identity,
}

impl ActivationSpec {
    /// Canonical lowercase names, in the order [`ActivationSpec::all_defaults`] uses.
    pub const NAMES: [&'static str; 10] = [
        "berlu",
        "leaky_relu",
        "relu",
        "prelu",
        "gelu",
        "elu",
        "celu",
        "silu",
        "mish",
        "identity",
    ];

    pub fn berlu(alpha: f64, epsilon: f64) -> Result<Self> {
        BerLUParams::new(alpha, epsilon).map(Self::BerLU)
    }

    /// One instance of every shipped family with its default parameters.
    pub fn all_defaults() -> Vec<Self> {
        Self::NAMES
            .iter()
            .map(|n| Self::from_name(n).unwrap())
            .collect()
    }

    /// The default-parameter instance of a family, by canonical name.
    pub fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "berlu" => Self::BerLU(BerLUParams::default()),
            "leaky_relu" => Self::LeakyReLU {
                alpha: DEFAULT_ALPHA,
            },
            "relu" => Self::ReLU,
            "prelu" => Self::PReLU {
                alpha: DEFAULT_ALPHA,
            },
            "gelu" => Self::GELU,
            "elu" => Self::ELU { scale: 1.0 },
            "celu" => Self::CELU { scale: 1.0 },
            "silu" => Self::SiLU,
            "mish" => Self::Mish,
            "identity" => Self::Identity,
            _ => return None,
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::BerLU(_) => "berlu",
            Self::LeakyReLU { .. } => "leaky_relu",
            Self::ReLU => "relu",
            Self::PReLU { .. } => "prelu",
            Self::GELU => "gelu",
            Self::ELU { .. } => "elu",
            Self::CELU { .. } => "celu",
            Self::SiLU => "silu",
            Self::Mish => "mish",
            Self::Identity => "identity",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::LeakyReLU { alpha } | Self::PReLU { alpha } if !alpha.is_finite() => {
                Err(invalid(alloc::format!(
                    "{} alpha must be finite, got {alpha}",
                    self.name()
                )))
            }
            Self::ELU { scale } | Self::CELU { scale } if !(scale.is_finite() && scale > 0.0) => {
                Err(invalid(alloc::format!(
                    "{} scale must be finite and > 0, got {scale}",
                    self.name()
                )))
            }
            _ => Ok(()),
        }
    }

    /// The slope parameter of the parametric families.
    pub fn alpha(&self) -> Option<f64> {
        match self {
            Self::BerLU(p) => Some(p.alpha()),
            Self::LeakyReLU { alpha } | Self::PReLU { alpha } => Some(*alpha),
            _ => None,
        }
    }

    /// Whether the slope is trained jointly with the weights.
    pub fn is_learnable(&self) -> bool {
        matches!(self, Self::BerLU(_) | Self::PReLU { .. })
    }

    /// A copy of this spec with its slope replaced.
    pub fn with_alpha(&self, alpha: f64) -> Result<Self> {
        match self {
            Self::BerLU(p) => BerLUParams::with_any_alpha(alpha, p.epsilon()).map(Self::BerLU),
            Self::LeakyReLU { .. } => Ok(Self::LeakyReLU { alpha }),
            Self::PReLU { .. } => Ok(Self::PReLU { alpha }),
            _ => Err(invalid(alloc::format!(
                "{} has no slope parameter",
                self.name()
            ))),
        }
    }

    /// Points where the derivative (or, for BerLU, the second derivative) jumps.
    pub fn seams(&self) -> Vec<f64> {
        match *self {
            Self::BerLU(p) => alloc::vec![-p.epsilon(), p.epsilon()],
            Self::LeakyReLU { .. } | Self::PReLU { .. } | Self::ReLU => alloc::vec![0.0],
            Self::ELU { scale } if scale != 1.0 => alloc::vec![0.0],
            _ => Vec::new(),
        }
    }

    #[inline]
    pub fn forward(&self, x: f64) -> f64 {
        match *self {
            Self::BerLU(ref p) => p.value(x),
            Self::LeakyReLU { alpha } | Self::PReLU { alpha } => leaky(x, alpha),
            Self::ReLU => leaky(x, 0.0),
            Self::GELU => x * normal_cdf(x),
            Self::ELU { scale } => {
                if x >= 0.0 {
                    x
                } else {
                    scale * libm::expm1(x)
                }
            }
            Self::CELU { scale } => {
                if x >= 0.0 {
                    x
                } else {
                    scale * libm::expm1(x / scale)
                }
            }
            Self::SiLU => x * sigmoid(x),
            Self::Mish => x * libm::tanh(softplus(x)),
            Self::Identity => x,
        }
    }

    #[inline]
    pub fn dx(&self, x: f64) -> f64 {
        match *self {
            Self::BerLU(ref p) => p.dx(x),
            Self::LeakyReLU { alpha } | Self::PReLU { alpha } => {
                if x >= 0.0 {
                    1.0
                } else {
                    alpha
                }
            }
            Self::ReLU => {
                if x >= 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Self::GELU => normal_cdf(x) + x * normal_pdf(x),
            Self::ELU { scale } => {
                if x >= 0.0 {
                    1.0
                } else {
                    scale * libm::exp(x)
                }
            }
            Self::CELU { scale } => {
                if x >= 0.0 {
                    1.0
                } else {
                    libm::exp(x / scale)
                }
            }
            Self::SiLU => {
                let s = sigmoid(x);
                s * (1.0 + x * (1.0 - s))
            }
            Self::Mish => {
                let t = libm::tanh(softplus(x));
                t + x * (1.0 - t * t) * sigmoid(x)
            }
            Self::Identity => 1.0,
        }
    }

    /// Derivative with respect to the slope parameter, for families that have one.
    #[inline]
    pub fn dalpha(&self, x: f64) -> Option<f64> {
        match *self {
            Self::BerLU(ref p) => Some(p.dalpha(x)),
            Self::LeakyReLU { .. } | Self::PReLU { .. } => Some(if x >= 0.0 { 0.0 } else { x }),
            _ => None,
        }
    }

    /// Applies the activation to `xs`, writing into `out`.
    ///
    /// No finiteness check; the dispatch is hoisted out of the loop so this is
    /// the kernel the benchmarks time.
    pub fn forward_into(&self, xs: &[f64], out: &mut [f64]) {
        assert_eq!(xs.len(), out.len(), "forward_into: length mismatch");
        macro_rules! map {
            ($f:expr) => {
                for (o, &x) in out.iter_mut().zip(xs) {
                    *o = $f(x);
                }
            };
        }
        match *self {
            Self::BerLU(ref p) => map!(|x| p.value(x)),
            Self::Identity => out.copy_from_slice(xs),
            Self::ReLU => map!(|x| leaky(x, 0.0)),
            Self::GELU => map!(|x: f64| x * normal_cdf(x)),
            _ => map!(|x| self.forward(x)),
        }
    }

    /// Derivative counterpart of [`ActivationSpec::forward_into`].
    pub fn dx_into(&self, xs: &[f64], out: &mut [f64]) {
        assert_eq!(xs.len(), out.len(), "dx_into: length mismatch");
        match *self {
            Self::BerLU(ref p) => {
                for (o, &x) in out.iter_mut().zip(xs) {
                    *o = p.dx(x);
                }
            }
            _ => {
                for (o, &x) in out.iter_mut().zip(xs) {
                    *o = self.dx(x);
                }
            }
        }
    }
}

#[inline]
fn leaky(x: f64, alpha: f64) -> f64 {
    if x >= 0.0 {
        x
    } else {
        alpha * x
    }
}

#[inline]
pub(crate) fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x * FRAC_1_SQRT_2)
}

#[inline]
pub(crate) fn normal_pdf(x: f64) -> f64 {
    libm::exp(-0.5 * x * x) / libm::sqrt(2.0 * PI)
}

#[inline]
fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + libm::exp(-x))
    } else {
        let z = libm::exp(x);
        z / (1.0 + z)
    }
}

#[inline]
fn softplus(x: f64) -> f64 {
    x.max(0.0) + libm::log1p(libm::exp(-x.abs()))
}

/// A dense, owned buffer of 64-bit values.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NumericBuffer(Vec<f64>);

impl NumericBuffer {
    pub fn new(data: Vec<f64>) -> Self {
        Self(data)
    }

    /// `n` evenly spaced points covering `[lo, hi]` inclusive.
    pub fn linspace(lo: f64, hi: f64, n: usize) -> Self {
        match n {
            0 => Self::default(),
            1 => Self(alloc::vec![lo]),
            _ => {
                let step = (hi - lo) / (n - 1) as f64;
                Self(
                    (0..n)
                        .map(|i| if i + 1 == n { hi } else { lo + step * i as f64 })
                        .collect(),
                )
            }
        }
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    /// Fails with the first non-finite entry.
    pub fn check_finite(&self) -> Result<()> {
        match self.0.iter().position(|v| !v.is_finite()) {
            Some(index) => Err(Error::NonFinite {
                index,
                value: self.0[index],
            }),
            None => Ok(()),
        }
    }

    fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self(self.0.iter().map(|&x| f(x)).collect())
    }
}

impl From<Vec<f64>> for NumericBuffer {
    fn from(v: Vec<f64>) -> Self {
        Self(v)
    }
}

impl core::ops::Deref for NumericBuffer {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

fn check_scalar(x: f64) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFinite { index: 0, value: x })
    }
}

/// BerLU value with input validation.
pub fn berlu_forward(x: f64, p: &BerLUParams) -> Result<f64> {
    check_scalar(x)?;
    Ok(p.value(x))
}

/// BerLU input gradient with input validation.
pub fn berlu_dx(x: f64, p: &BerLUParams) -> Result<f64> {
    check_scalar(x)?;
    Ok(p.dx(x))
}

/// BerLU slope gradient with input validation.
pub fn berlu_dalpha(x: f64, p: &BerLUParams) -> Result<f64> {
    check_scalar(x)?;
    Ok(p.dalpha(x))
}

pub fn eval_forward(spec: &ActivationSpec, xs: &NumericBuffer) -> Result<NumericBuffer> {
    spec.validate()?;
    xs.check_finite()?;
    Ok(xs.map(|x| spec.forward(x)))
}

pub fn eval_dx(spec: &ActivationSpec, xs: &NumericBuffer) -> Result<NumericBuffer> {
    spec.validate()?;
    xs.check_finite()?;
    Ok(xs.map(|x| spec.dx(x)))
}

/// Slope gradients, or `None` for families without a slope.
pub fn eval_dalpha(spec: &ActivationSpec, xs: &NumericBuffer) -> Result<Option<NumericBuffer>> {
    spec.validate()?;
    xs.check_finite()?;
    if spec.alpha().is_none() {
        return Ok(None);
    }
    Ok(Some(xs.map(|x| spec.dalpha(x).unwrap_or(0.0))))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(alpha: f64, eps: f64) -> BerLUParams {
        BerLUParams::with_any_alpha(alpha, eps).unwrap()
    }

    fn central(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
        (f(x + h) - f(x - h)) / (2.0 * h)
    }

    #[test]
    fn forward_examples() {
        let q = p(0.01, 0.01);
        assert_eq!(berlu_forward(1.0, &q).unwrap(), 1.0);
        assert!((berlu_forward(-1.0, &q).unwrap() + 0.01).abs() < 1e-15);
        // Bernstein sum at t = 1/2 with beta = [-1e-4, 0, 1e-2]
        let oracle = 0.25 * -1e-4 + 0.5 * 0.0 + 0.25 * 1e-2;
        assert!((berlu_forward(0.0, &q).unwrap() - oracle).abs() < 1e-15);
        assert!((oracle - 0.002475).abs() < 1e-15);
    }

    #[test]
    fn dx_examples() {
        let q = p(0.01, 0.01);
        assert_eq!(berlu_dx(0.02, &q).unwrap(), 1.0);
        assert_eq!(berlu_dx(-0.02, &q).unwrap(), 0.01);
        let fd = central(|x| q.value(x), 0.0, 1e-6);
        let an = berlu_dx(0.0, &q).unwrap();
        assert!((an - fd).abs() / an < 1e-6);
        assert!((an - 0.505).abs() < 1e-15);
    }

    #[test]
    fn dalpha_examples() {
        let fd_alpha = |x: f64| {
            let h = 1e-6;
            (p(0.01 + h, 0.01).value(x) - p(0.01 - h, 0.01).value(x)) / (2.0 * h)
        };
        let q = p(0.01, 0.01);
        assert_eq!(berlu_dalpha(0.02, &q).unwrap(), 0.0);
        assert!((berlu_dalpha(-0.02, &q).unwrap() + 0.02).abs() < 1e-15);
        assert!((fd_alpha(-0.02) + 0.02).abs() < 1e-9);
        assert!((berlu_dalpha(0.0, &q).unwrap() + 0.0025).abs() < 1e-15);
        assert!((fd_alpha(0.0) + 0.0025).abs() < 1e-9);
    }

    #[test]
    fn dalpha_is_continuous_at_seams() {
        let q = p(0.3, 0.5);
        assert!((q.dalpha(-0.5) + 0.5).abs() < 1e-15);
        assert!((q.dalpha(-0.5 - 1e-12) + 0.5).abs() < 1e-11);
        assert_eq!(q.dalpha(0.5), 0.0);
    }

    #[test]
    fn rejects_bad_params() {
        assert!(BerLUParams::new(0.01, 0.0).is_err());
        assert!(BerLUParams::new(0.01, -1.0).is_err());
        assert!(BerLUParams::new(f64::NAN, 0.1).is_err());
        assert!(BerLUParams::new(1.5, 0.1).is_err());
        assert!(BerLUParams::with_any_alpha(1.5, 0.1).is_ok());
        assert!(ActivationSpec::ELU { scale: 0.0 }.validate().is_err());
        assert!(ActivationSpec::CELU {
            scale: f64::INFINITY
        }
        .validate()
        .is_err());
        assert!(ActivationSpec::PReLU { alpha: f64::NAN }
            .validate()
            .is_err());
    }

    #[test]
    fn rejects_non_finite_scalar() {
        assert!(berlu_forward(f64::NAN, &BerLUParams::default()).is_err());
        assert!(berlu_dx(f64::INFINITY, &BerLUParams::default()).is_err());
    }

    #[test]
    fn buffer_examples() {
        let xs = NumericBuffer::new(alloc::vec![-1.0, 0.0, 2.0]);
        assert_eq!(
            eval_forward(&ActivationSpec::Identity, &xs)
                .unwrap()
                .as_slice(),
            &[-1.0, 0.0, 2.0]
        );
        assert_eq!(
            eval_forward(&ActivationSpec::ReLU, &xs).unwrap().as_slice(),
            &[0.0, 0.0, 2.0]
        );
        let zero = NumericBuffer::new(alloc::vec![0.0]);
        assert_eq!(
            eval_forward(&ActivationSpec::SiLU, &zero)
                .unwrap()
                .as_slice(),
            &[0.0]
        );
        assert_eq!(
            eval_dx(&ActivationSpec::ReLU, &zero).unwrap().as_slice(),
            &[1.0]
        );
        let g = eval_dx(&ActivationSpec::GELU, &zero).unwrap()[0];
        assert!((g - 0.5).abs() < 1e-15);
        let fd = central(|x| ActivationSpec::GELU.forward(x), 0.0, 1e-5);
        assert!((fd - 0.5).abs() < 1e-9);
        let b = eval_dx(&ActivationSpec::berlu(0.01, 0.01).unwrap(), &zero).unwrap()[0];
        assert!((b - 0.505).abs() < 1e-15);
    }

    #[test]
    fn empty_and_non_finite_buffers() {
        let empty = NumericBuffer::default();
        assert!(eval_forward(&ActivationSpec::Mish, &empty)
            .unwrap()
            .is_empty());
        let bad = NumericBuffer::new(alloc::vec![0.0, 1.0, f64::NAN, f64::INFINITY]);
        for result in [
            eval_forward(&ActivationSpec::Mish, &bad),
            eval_dx(&ActivationSpec::GELU, &bad),
        ] {
            match result {
                Err(Error::NonFinite { index, value }) => {
                    assert_eq!(index, 2);
                    assert!(value.is_nan());
                }
                other => panic!("unexpected {other:?}"),
            }
        }
    }

    #[test]
    fn right_hand_convention_at_kinks() {
        for spec in [
            ActivationSpec::ReLU,
            ActivationSpec::LeakyReLU { alpha: 0.2 },
            ActivationSpec::PReLU { alpha: -0.3 },
            ActivationSpec::ELU { scale: 2.0 },
        ] {
            assert_eq!(spec.dx(0.0), 1.0, "{}", spec.name());
        }
    }

    #[test]
    fn gelu_is_exact_erf_form() {
        // Phi(1) from the erf tables
        let phi1 = 0.841_344_746_068_542_9;
        assert!((ActivationSpec::GELU.forward(1.0) - phi1).abs() < 1e-15);
    }

    #[test]
    fn elu_celu_mish_silu_known_values() {
        let e = core::f64::consts::E;
        assert!((ActivationSpec::ELU { scale: 1.0 }.forward(-1.0) - (1.0 / e - 1.0)).abs() < 1e-15);
        assert!(
            (ActivationSpec::CELU { scale: 2.0 }.forward(-2.0) - 2.0 * (1.0 / e - 1.0)).abs()
                < 1e-15
        );
        assert!((ActivationSpec::SiLU.forward(1.0) - 1.0 / (1.0 + 1.0 / e)).abs() < 1e-15);
        let sp = libm::log(1.0 + e);
        assert!((ActivationSpec::Mish.forward(1.0) - libm::tanh(sp)).abs() < 1e-15);
    }

    #[test]
    fn with_alpha_replaces_only_slope() {
        let spec = ActivationSpec::berlu(0.01, 0.5).unwrap();
        let next = spec.with_alpha(1.7).unwrap();
        match next {
            ActivationSpec::BerLU(q) => {
                assert_eq!(q.alpha(), 1.7);
                assert_eq!(q.epsilon(), 0.5);
                assert!(!q.is_nonexpansive());
            }
            _ => unreachable!(),
        }
        assert!(ActivationSpec::GELU.with_alpha(0.1).is_err());
    }

    #[test]
    fn names_round_trip() {
        for spec in ActivationSpec::all_defaults() {
            assert_eq!(ActivationSpec::from_name(spec.name()), Some(spec));
        }
        assert_eq!(ActivationSpec::from_name("swish"), None);
    }
}
