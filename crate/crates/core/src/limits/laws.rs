//! Moments, densities and distribution functions of the limit laws.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

fn factorial(k: u64) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// `E[N^k N*^l]` for a standard complex Gaussian (`E|N|^2 = 1`): `k!` if
/// `k == l`, else 0.
pub fn complex_gaussian_mixed_moment(k: u64, l: u64) -> f64 {
    if k == l {
        factorial(k)
    } else {
        0.0
    }
}

/// Moments of the symmetrized Rayleigh law with density `|x| e^{-x^2}`:
/// 0 for odd `p`, `(p/2)!` for even `p`.
pub fn rayleigh_moment(p: u64) -> f64 {
    if p % 2 == 1 {
        0.0
    } else {
        factorial(p / 2)
    }
}

pub fn rayleigh_pdf(x: f64) -> f64 {
    x.abs() * (-x * x).exp()
}

pub fn rayleigh_cdf(x: f64) -> f64 {
    let tail = 0.5 * (-x * x).exp();
    if x < 0.0 {
        tail
    } else {
        1.0 - tail
    }
}

/// Inverse of [`rayleigh_cdf`] on `(0, 1)`.
pub fn rayleigh_quantile(u: f64) -> f64 {
    if u < 0.5 {
        -(-(2.0 * u).ln()).sqrt()
    } else {
        (-(2.0 * (1.0 - u)).ln()).sqrt()
    }
}

/// Standard Gaussian moments: 0 for odd `p`, `(p-1)!!` for even `p`.
pub fn gaussian_moment(p: u64) -> f64 {
    if p % 2 == 1 {
        0.0
    } else {
        (1..p).step_by(2).map(|i| i as f64).product()
    }
}

/// CDF of `N(0, variance)`.
pub fn normal_cdf(x: f64, variance: f64) -> f64 {
    0.5 * (1.0 + libm::erf(x / (2.0 * variance).sqrt()))
}

pub fn normal_pdf(x: f64, variance: f64) -> f64 {
    (-x * x / (2.0 * variance)).exp() / (2.0 * std::f64::consts::PI * variance).sqrt()
}

/// `E[exp(i theta k U)]` for `U ~ Uniform(0, 1)`: `(e^{i u} - 1) / (i u)`
/// with `u = theta k`, and 1 at `u = 0`.
pub fn arc_moment(theta: f64, k: i64) -> Complex64 {
    unit_interval_exp(theta * k as f64)
}

/// `int_0^1 e^{i u x} dx`.
pub fn unit_interval_exp(u: f64) -> Complex64 {
    if u.abs() < 1e-8 {
        // Series keeps full precision near zero.
        return Complex64::new(1.0 - u * u / 6.0, u / 2.0);
    }
    (Complex64::from_polar(1.0, u) - 1.0) / Complex64::new(0.0, u)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum LimitLaw {
    StandardComplexGaussian,
    StandardGaussian,
    SymmetrizedRayleigh,
    /// Law of `exp(i theta U)`; its one-dimensional functions act on the angle.
    ArcOnCircle { theta: f64 },
    /// Centered Gaussian on the plane with covariance `diag(1/2, 1/2)`;
    /// its one-dimensional functions describe either marginal.
    BivariateGaussianHalf,
}

impl LimitLaw {
    /// `E[X^p]` for real laws, `E[X^p]` of the complex variable for
    /// the complex ones (zero by rotation invariance unless `p = 0`).
    pub fn moment(&self, p: u64) -> Complex64 {
        let re = |x: f64| Complex64::new(x, 0.0);
        match *self {
            Self::StandardGaussian => re(gaussian_moment(p)),
            Self::SymmetrizedRayleigh => re(rayleigh_moment(p)),
            Self::ArcOnCircle { theta } => arc_moment(theta, p as i64),
            Self::StandardComplexGaussian | Self::BivariateGaussianHalf => {
                re(if p == 0 { 1.0 } else { 0.0 })
            }
        }
    }

    /// `E[X^k conj(X)^l]`.
    pub fn mixed_moment(&self, k: u64, l: u64) -> Complex64 {
        match *self {
            Self::StandardComplexGaussian | Self::BivariateGaussianHalf => {
                Complex64::new(complex_gaussian_mixed_moment(k, l), 0.0)
            }
            Self::ArcOnCircle { theta } => arc_moment(theta, k as i64 - l as i64),
            _ => self.moment(k + l),
        }
    }

    pub fn pdf(&self, x: f64) -> Option<f64> {
        match *self {
            Self::StandardGaussian => Some(normal_pdf(x, 1.0)),
            Self::SymmetrizedRayleigh => Some(rayleigh_pdf(x)),
            Self::BivariateGaussianHalf => Some(normal_pdf(x, 0.5)),
            Self::ArcOnCircle { theta } => {
                let (lo, hi) = angle_range(theta);
                Some(if x >= lo && x <= hi && hi > lo { 1.0 / (hi - lo) } else { 0.0 })
            }
            Self::StandardComplexGaussian => None,
        }
    }

    pub fn cdf(&self, x: f64) -> Option<f64> {
        match *self {
            Self::StandardGaussian => Some(normal_cdf(x, 1.0)),
            Self::SymmetrizedRayleigh => Some(rayleigh_cdf(x)),
            Self::BivariateGaussianHalf => Some(normal_cdf(x, 0.5)),
            Self::ArcOnCircle { theta } => {
                let (lo, hi) = angle_range(theta);
                Some(if hi <= lo {
                    if x >= lo { 1.0 } else { 0.0 }
                } else {
                    ((x - lo) / (hi - lo)).clamp(0.0, 1.0)
                })
            }
            Self::StandardComplexGaussian => None,
        }
    }
}

fn angle_range(theta: f64) -> (f64, f64) {
    if theta >= 0.0 {
        (0.0, theta)
    } else {
        (theta, 0.0)
    }
}
