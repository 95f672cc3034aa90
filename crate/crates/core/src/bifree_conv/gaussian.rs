use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use super::quintuple::LKQuintupleGeneral;
use crate::bifree_r::{OmegaDomain, PartialRTransform, Reconstructible};
use crate::error::{Error, Result};
use crate::measure::{Axis, Measure1D};
use crate::rtransform1d::{FreeLKPair, MarginalComponent, MarginalRModel, MarginalSolution};
use crate::transform2d::{off_axis, CauchyTransform2D, Provenance, Semicircle};

/// Bi-free Gaussian parameters: means `γ`, variances `a`, `b` and covariance `c`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaussianParams {
    pub gamma1: f64,
    pub gamma2: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl GaussianParams {
    /// Requires `a, b ≥ 0` and `|c| ≤ √(ab)`.
    pub fn new(gamma1: f64, gamma2: f64, a: f64, b: f64, c: f64) -> Result<Self> {
        if ![gamma1, gamma2, a, b, c].iter().all(|v| v.is_finite()) {
            return Err(Error::invalid("Gaussian parameters must be finite"));
        }
        if a < 0.0 || b < 0.0 {
            return Err(Error::invalid(format!("variances ({a}, {b}) must be non-negative")));
        }
        if c * c > a * b {
            return Err(Error::invalid(format!(
                "covariance {c} exceeds √(ab) = {}",
                (a * b).sqrt()
            )));
        }
        Ok(GaussianParams {
            gamma1,
            gamma2,
            a,
            b,
            c,
        })
    }

    pub fn standard(c: f64) -> Result<Self> {
        Self::new(0.0, 0.0, 1.0, 1.0, c)
    }

    pub fn quintuple(&self) -> LKQuintupleGeneral {
        LKQuintupleGeneral::gaussian(self.gamma1, self.gamma2, self.a, self.b, self.c).expect("validated parameters")
    }

    /// Whether the law is absolutely continuous, so that a density exists.
    pub fn has_density(&self) -> bool {
        self.a > 0.0 && self.b > 0.0 && self.c * self.c < self.a * self.b
    }
}

/// Density of the standard bi-free Gaussian with correlation `c`, `|c| < 1`.
pub fn standard_density(s: f64, t: f64, c: f64) -> f64 {
    if s.abs() >= 2.0 || t.abs() >= 2.0 {
        return 0.0;
    }
    let q = 1.0 - c * c;
    let num = q * (4.0 - s * s).sqrt() * (4.0 - t * t).sqrt();
    let den = 4.0 * PI * PI * (q * q - c * (1.0 + c * c) * s * t + c * c * (s * s + t * t));
    num / den
}

/// Closed-form evaluators for a bi-free Gaussian law.
#[derive(Clone, Debug)]
pub struct GaussianClosedForm {
    pub params: GaussianParams,
    marginals: [MarginalRModel; 2],
}

impl GaussianClosedForm {
    pub fn new(params: GaussianParams) -> Self {
        let model = |gamma: f64, var: f64| {
            let pair = FreeLKPair::new(gamma, Measure1D::from_positive([(0.0, var)])).expect("finite mean");
            MarginalRModel::new(vec![MarginalComponent::FreeLk(pair)]).expect("no measure part")
        };
        GaussianClosedForm {
            params,
            marginals: [model(params.gamma1, params.a), model(params.gamma2, params.b)],
        }
    }

    /// `γ₁z + γ₂w + az² + bw² + czw`.
    pub fn r(&self, z: C64, w: C64) -> C64 {
        let p = &self.params;
        p.gamma1 * z + p.gamma2 * w + p.a * z * z + p.b * w * w + p.c * z * w
    }

    /// Density at `(s, t)`; unavailable for singular laws.
    pub fn density(&self, s: f64, t: f64) -> Result<f64> {
        let p = &self.params;
        if !p.has_density() {
            return Err(Error::Degenerate(format!(
                "law with a = {}, b = {}, c = {} is singular to Lebesgue measure",
                p.a, p.b, p.c
            )));
        }
        let (sa, sb) = (p.a.sqrt(), p.b.sqrt());
        Ok(standard_density((s - p.gamma1) / sa, (t - p.gamma2) / sb, p.c / (sa * sb)) / (sa * sb))
    }

    /// Marginal Cauchy transform, a rescaled semicircle (or a point mass when the variance is 0).
    pub fn marginal_g(&self, axis: Axis, lambda: C64) -> C64 {
        let (gamma, var) = match axis {
            Axis::First => (self.params.gamma1, self.params.a),
            Axis::Second => (self.params.gamma2, self.params.b),
        };
        if var == 0.0 {
            return 1.0 / (lambda - gamma);
        }
        let sd = var.sqrt();
        Semicircle::g((lambda - gamma) / sd) / sd
    }

    /// Half-width about the mean containing the support on each axis.
    pub fn spread(&self) -> [f64; 2] {
        [2.0 * self.params.a.sqrt(), 2.0 * self.params.b.sqrt()]
    }
}

impl CauchyTransform2D for GaussianClosedForm {
    /// `G₁G₂ / (1 − c G₁G₂)`.
    fn eval(&self, z: C64, w: C64) -> Result<C64> {
        off_axis(z, "z")?;
        off_axis(w, "w")?;
        let p = self.marginal_g(Axis::First, z) * self.marginal_g(Axis::Second, w);
        Ok(p / (1.0 - self.params.c * p))
    }

    fn provenance(&self) -> Provenance {
        Provenance::ClosedForm
    }
}

impl PartialRTransform for GaussianClosedForm {
    fn eval(&self, z: C64, w: C64) -> Result<C64> {
        Ok(self.r(z, w))
    }

    fn marginal(&self, axis: Axis, z: C64) -> Result<C64> {
        Ok(match axis {
            Axis::First => self.params.gamma1 + self.params.a * z,
            Axis::Second => self.params.gamma2 + self.params.b * z,
        })
    }

    fn provenance(&self) -> Provenance {
        Provenance::FreeLevyKhintchine
    }

    fn domain(&self) -> OmegaDomain {
        OmegaDomain::for_radius(self.support_radius().unwrap_or(0.0))
    }

    fn support_radius(&self) -> Option<f64> {
        let s = self.spread();
        Some((self.params.gamma1.abs() + s[0]).max(self.params.gamma2.abs() + s[1]))
    }
}

impl Reconstructible for GaussianClosedForm {
    fn marginal_model(&self, axis: Axis) -> &MarginalRModel {
        &self.marginals[(axis.index() - 1) as usize]
    }

    fn coupling(&self, a: &MarginalSolution, b: &MarginalSolution) -> Result<C64> {
        Ok(self.params.c * a.g * b.g)
    }
}
