use num_complex::Complex64 as C64;

use super::quintuple::{lk_r_general, lk_validate, LKQuintupleGeneral};
use crate::bifree_r::{
    extract_cumulants, partial_r, CumulantTable, MeasureR, OmegaDomain, PartialRTransform, ReconstructedG,
    Reconstructible, TransformR,
};
use crate::error::{Error, Result};
use crate::measure::{Axis, Measure2D, PlanarMeasure};
use crate::rtransform1d::{FreeLKPair, MarginalComponent, MarginalRModel, MarginalSolution};
use crate::transform2d::{g2, invert2d, CauchyTransform1D, GridDensity2D, GridSpec, Provenance};

/// Highest total degree checked for cumulant additivity.
pub const ADDITIVITY_DEGREE: usize = 4;
pub const ADDITIVITY_TOL: f64 = 1e-6;

/// `−λ + λ Σ wᵢ / ((1 − z sᵢ)(1 − w tᵢ))`.
pub fn compound_poisson_r(lambda: f64, jump: &Measure2D, z: C64, w: C64) -> Result<C64> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::invalid(format!("rate λ = {lambda} must be positive")));
    }
    if !jump.is_probability() {
        return Err(Error::invalid("jump law must be a probability measure"));
    }
    let mut acc = C64::new(0.0, 0.0);
    for a in jump.atoms() {
        let d = (1.0 - z * a.s) * (1.0 - w * a.t);
        if (1.0 - z * a.s).norm() <= 1e-14 || (1.0 - w * a.t).norm() <= 1e-14 {
            return Err(Error::Pole(format!("({}, {}) with arguments ({z}, {w})", a.s, a.t)));
        }
        acc += a.w / d;
    }
    Ok(lambda * (acc - 1.0))
}

/// One additive piece of the R-transform of a [`BifreeLaw`].
#[derive(Clone, Debug, PartialEq)]
pub enum LawComponent {
    /// `power · R_μ` for a compactly supported probability `μ`, `power ≥ 1`.
    Atomic { mu: Measure2D, power: f64 },
    /// A bi-freely infinitely divisible law in Lévy-Khintchine form.
    Lk(LKQuintupleGeneral),
}

/// Law whose partial R-transform is a finite sum of [`LawComponent`]s.
#[derive(Clone, Debug)]
pub struct BifreeLaw {
    components: Vec<LawComponent>,
    marginals: [MarginalRModel; 2],
    support_radius: f64,
}

impl BifreeLaw {
    pub fn new(components: Vec<LawComponent>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::invalid("a law needs at least one component"));
        }
        let mut parts: [Vec<MarginalComponent>; 2] = [Vec::new(), Vec::new()];
        for comp in &components {
            match comp {
                LawComponent::Atomic { mu, power } => {
                    if !mu.is_probability() {
                        return Err(Error::invalid("atomic components must be probability laws"));
                    }
                    for axis in [Axis::First, Axis::Second] {
                        parts[(axis.index() - 1) as usize].push(MarginalComponent::Measure {
                            sigma: mu.marginal(axis),
                            scale: *power,
                        });
                    }
                }
                LawComponent::Lk(q) => {
                    let rep = lk_validate(q);
                    if !rep.is_valid() {
                        return Err(Error::invalid(format!(
                            "Lévy-Khintchine component violates the admissibility system (residual {:.3e})",
                            rep.max_residual
                        )));
                    }
                    parts[0].push(MarginalComponent::FreeLk(FreeLKPair::new(
                        q.gamma[0],
                        q.rho1.marginal(Axis::First),
                    )?));
                    parts[1].push(MarginalComponent::FreeLk(FreeLKPair::new(
                        q.gamma[1],
                        q.rho2.marginal(Axis::Second),
                    )?));
                }
            }
        }
        let [p1, p2] = parts;
        let marginals = [MarginalRModel::new(p1)?, MarginalRModel::new(p2)?];
        let support_radius = marginals[0]
            .support_radius_bound()
            .max(marginals[1].support_radius_bound());
        Ok(BifreeLaw {
            components,
            marginals,
            support_radius,
        })
    }

    pub fn atomic(mu: Measure2D) -> Result<Self> {
        Self::new(vec![LawComponent::Atomic { mu, power: 1.0 }])
    }

    pub fn lk(q: LKQuintupleGeneral) -> Result<Self> {
        Self::new(vec![LawComponent::Lk(q)])
    }

    pub fn components(&self) -> &[LawComponent] {
        &self.components
    }

    /// `self ⊞⊞ other`.
    pub fn plus(&self, other: &BifreeLaw) -> Result<Self> {
        let mut c = self.components.clone();
        c.extend(other.components.iter().cloned());
        Self::new(c)
    }

    pub fn means(&self) -> [f64; 2] {
        [self.marginals[0].mean(), self.marginals[1].mean()]
    }

    /// A 101×101 grid covering the support bound about the means.
    pub fn default_grid(&self, y: f64) -> GridSpec {
        let m = self.means();
        let half = |i: usize| (self.marginals[i].support_radius_bound() - m[i].abs()).max(1e-3);
        GridSpec::around((m[0], m[1]), half(0), half(1), y)
    }

    /// Cauchy transform rebuilt from the R-transform.
    pub fn cauchy(&self) -> ReconstructedG<'_, Self> {
        ReconstructedG::new(self)
    }

    /// Partial R-transform read back from the reconstructed Cauchy transform.
    pub fn read_back<'a>(&'a self, g: &'a ReconstructedG<'a, Self>) -> TransformR<'a> {
        TransformR {
            g,
            marginals: [&self.marginals[0] as &dyn CauchyTransform1D, &self.marginals[1]],
            means: self.means(),
            domain: PartialRTransform::domain(self),
            support_radius: Some(self.support_radius),
        }
    }
}

impl PartialRTransform for BifreeLaw {
    fn eval(&self, z: C64, w: C64) -> Result<C64> {
        let mut acc = C64::new(0.0, 0.0);
        for comp in &self.components {
            acc += match comp {
                LawComponent::Atomic { mu, power } => *power * partial_r(mu, z, w)?,
                LawComponent::Lk(q) => lk_r_general(q, z, w)?,
            };
        }
        Ok(acc)
    }

    fn marginal(&self, axis: Axis, z: C64) -> Result<C64> {
        self.marginals[(axis.index() - 1) as usize].r(z)
    }

    fn provenance(&self) -> Provenance {
        if self.components.iter().all(|c| matches!(c, LawComponent::Lk(_))) {
            Provenance::FreeLevyKhintchine
        } else {
            Provenance::FromMeasure
        }
    }

    fn domain(&self) -> OmegaDomain {
        OmegaDomain::for_radius(self.support_radius)
    }

    fn support_radius(&self) -> Option<f64> {
        Some(self.support_radius)
    }
}

impl Reconstructible for BifreeLaw {
    fn marginal_model(&self, axis: Axis) -> &MarginalRModel {
        &self.marginals[(axis.index() - 1) as usize]
    }

    fn coupling(&self, a: &MarginalSolution, b: &MarginalSolution) -> Result<C64> {
        let (z, w) = (a.g, b.g);
        let mut acc = C64::new(0.0, 0.0);
        let mut k = 0;
        for comp in &self.components {
            match comp {
                LawComponent::Atomic { mu, power } => {
                    let g = g2(mu, a.omegas[k], b.omegas[k])?;
                    if g.norm() < 1e-300 {
                        return Err(Error::Degenerate(format!(
                            "component Cauchy transform vanishes at ({}, {})",
                            a.omegas[k], b.omegas[k]
                        )));
                    }
                    acc += *power * (1.0 - z * w / g);
                    k += 1;
                }
                LawComponent::Lk(q) => acc += q.coupling(z, w)?,
            }
        }
        Ok(acc)
    }
}

/// Output of [`bifree_convolve`].
#[derive(Clone, Debug)]
pub struct Convolution {
    pub law: BifreeLaw,
    pub density: GridDensity2D,
    pub cumulants: CumulantTable,
    /// Largest `|κ_out − κ₁ − κ₂|` over the checked degrees.
    pub additivity_residual: f64,
}

/// `μ₁ ⊞⊞ μ₂` for compactly supported probability laws: density on `grid`
/// (default: [`BifreeLaw::default_grid`] at `y = 0.05`) and bi-free cumulants.
pub fn bifree_convolve(mu1: &Measure2D, mu2: &Measure2D, grid: Option<GridSpec>) -> Result<Convolution> {
    let law = BifreeLaw::new(vec![
        LawComponent::Atomic {
            mu: mu1.clone(),
            power: 1.0,
        },
        LawComponent::Atomic {
            mu: mu2.clone(),
            power: 1.0,
        },
    ])?;
    let spec = grid.unwrap_or_else(|| law.default_grid(0.05));
    let g = law.cauchy();
    let density = invert2d(&g, &spec).map_err(|e| e.at_stage("density inversion"))?;
    let cumulants = extract_cumulants(&law.read_back(&g), ADDITIVITY_DEGREE, None)
        .map_err(|e| e.at_stage("cumulant extraction"))?;
    let rad = Some(cumulants.radius);
    let k1 = extract_cumulants(&MeasureR::new(mu1.clone())?, ADDITIVITY_DEGREE, rad)
        .map_err(|e| e.at_stage("input cumulants"))?;
    let k2 = extract_cumulants(&MeasureR::new(mu2.clone())?, ADDITIVITY_DEGREE, rad)
        .map_err(|e| e.at_stage("input cumulants"))?;
    let mut residual: f64 = 0.0;
    for (m, n, k) in cumulants.entries() {
        residual = residual.max((k - k1.get(m, n) - k2.get(m, n)).abs());
    }
    if residual > ADDITIVITY_TOL {
        return Err(Error::Degenerate(format!(
            "output cumulants differ from the summed input cumulants by {residual:.3e}"
        ))
        .at_stage("cumulant additivity"));
    }
    Ok(Convolution {
        law,
        density,
        cumulants,
        additivity_residual: residual,
    })
}
