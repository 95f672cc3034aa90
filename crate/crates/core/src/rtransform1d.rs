//! One-dimensional R-transforms: Newton inversion of Cauchy transforms, the
//! free Lévy-Khintchine formula and free convolution powers.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::measure::{LineMeasure, Measure1D};
use crate::transform2d::{g1_with_derivative, linspace, off_axis, CauchyTransform1D, GridDensity1D, Provenance};

pub const MAX_ITERATIONS: usize = 100;
/// Residual target `|G(K) − z|` for functional inversion.
pub const INVERSION_TOL: f64 = 1e-13;

/// Truncated Stolz angle `Δ = {x+iy : y < 0, |x| < −αy, y > −β}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StolzAngle {
    pub alpha: f64,
    pub beta: f64,
}

impl StolzAngle {
    pub const DEFAULT_ALPHA: f64 = 2.0;

    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha > 0.0 && beta > 0.0) || !alpha.is_finite() || !beta.is_finite() {
            return Err(Error::invalid(format!(
                "Stolz angle needs α, β > 0 (got {alpha}, {beta})"
            )));
        }
        Ok(StolzAngle { alpha, beta })
    }

    /// Angle sized from a support radius: `β = 1/(4ρ+4)`.
    pub fn for_radius(rho: f64) -> Self {
        StolzAngle {
            alpha: Self::DEFAULT_ALPHA,
            beta: 1.0 / (4.0 * rho + 4.0),
        }
    }

    pub fn for_measure(sigma: &impl LineMeasure) -> Self {
        Self::for_radius(sigma.support_radius())
    }

    /// Membership in `Δ` itself (lower half-plane).
    pub fn contains_lower(&self, z: C64) -> bool {
        z.im < 0.0 && z.re.abs() < -self.alpha * z.im && z.im > -self.beta
    }

    /// Membership in `Δ ∪ Δ̄`.
    pub fn contains(&self, z: C64) -> bool {
        self.contains_lower(z) || self.contains_lower(z.conj())
    }
}

/// Solves `G(K) = z` by damped Newton from `k0`, for `z` in the lower half-plane.
///
/// The step is halved whenever it would leave the upper half-plane or fail to
/// reduce the residual.
pub(crate) fn invert_lower(g: impl Fn(C64) -> Result<(C64, C64)>, z: C64, k0: C64, stage: &'static str) -> Result<C64> {
    debug_assert!(z.im < 0.0);
    let tol = INVERSION_TOL * z.norm().clamp(1e-3, 1.0);
    let mut k = if k0.im > 0.0 {
        k0
    } else {
        C64::new(k0.re, k0.im.abs().max(1e-3))
    };
    let (mut gk, mut dk) = g(k)?;
    let mut res = (gk - z).norm();
    for it in 0..MAX_ITERATIONS {
        if res <= tol {
            // A couple of full steps squeeze out the last digits.
            for _ in 0..2 {
                let cand = k - (gk - z) / dk;
                if cand.im <= 0.0 {
                    break;
                }
                let (gc, dc) = g(cand)?;
                let rc = (gc - z).norm();
                if rc >= res {
                    break;
                }
                k = cand;
                gk = gc;
                dk = dc;
                res = rc;
            }
            return Ok(k);
        }
        let step = -(gk - z) / dk;
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..60 {
            let cand = k + step * t;
            if cand.im > 0.0 && cand.re.is_finite() {
                let (gc, dc) = g(cand)?;
                let rc = (gc - z).norm();
                if rc < res {
                    k = cand;
                    gk = gc;
                    dk = dc;
                    res = rc;
                    accepted = true;
                    break;
                }
            }
            t *= 0.5;
        }
        if !accepted {
            return Err(Error::NonConvergence {
                stage,
                iterations: it,
                residual: res,
                at: format!("z = {z}"),
            });
        }
    }
    if res <= tol {
        return Ok(k);
    }
    Err(Error::NonConvergence {
        stage,
        iterations: MAX_ITERATIONS,
        residual: res,
        at: format!("z = {z}"),
    })
}

/// Generic inverse with conjugation for the upper half-plane.
pub(crate) fn invert(g: impl Fn(C64) -> Result<(C64, C64)>, z: C64, k0: C64, stage: &'static str) -> Result<C64> {
    off_axis(z, "z")?;
    if z.im < 0.0 {
        invert_lower(g, z, k0, stage)
    } else {
        let k = invert_lower(
            |k| g(k.conj()).map(|(a, b)| (a.conj(), b.conj())),
            z.conj(),
            k0.conj(),
            stage,
        )?;
        Ok(k.conj())
    }
}

/// `R_σ(z) = K(z) − 1/z` where `G_σ(K(z)) = z`.
///
/// Evaluated wherever the Newton iteration started at `1/z + m₁` converges;
/// [`StolzAngle::for_measure`] gives the region where this is guaranteed.
pub fn r1_from_measure(sigma: &Measure1D, z: C64) -> Result<C64> {
    let mass = sigma.mass();
    if !(mass > 0.0) {
        return Err(Error::invalid("R-transform needs a measure of positive mass"));
    }
    let m1 = sigma.moment(1)? / mass;
    let k0 = mass / z + m1;
    let k = invert(|k| Ok(g1_with_derivative(sigma, k)), z, k0, "R-transform inversion")?;
    Ok(k - 1.0 / z)
}

/// `R(z) = K(z) − 1/z` for an arbitrary Cauchy transform; `mean` seeds the iteration.
pub fn r1_from_cauchy(g: &(impl CauchyTransform1D + ?Sized), z: C64, mean: f64) -> Result<C64> {
    let k0 = 1.0 / z + mean;
    let k = invert(|k| g.eval_with_derivative(k), z, k0, "R-transform inversion")?;
    Ok(k - 1.0 / z)
}

/// Free Lévy-Khintchine pair `(γ, σ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct FreeLKPair {
    pub gamma: f64,
    pub sigma: Measure1D,
}

impl FreeLKPair {
    pub fn new(gamma: f64, sigma: Measure1D) -> Result<Self> {
        if !gamma.is_finite() {
            return Err(Error::invalid("γ must be finite"));
        }
        Ok(FreeLKPair { gamma, sigma })
    }

    /// First free cumulant `R(0) = γ + ∫x dσ`.
    pub fn mean(&self) -> f64 {
        self.gamma + self.sigma.atoms().iter().map(|a| a.w * a.x).sum::<f64>()
    }

    /// Second free cumulant `R'(0) = ∫(1+x²) dσ`.
    pub fn variance(&self) -> f64 {
        self.sigma.atoms().iter().map(|a| a.w * (1.0 + a.x * a.x)).sum()
    }
}

fn lk_pole_check(z: C64, x: f64) -> Result<C64> {
    let den = 1.0 - z * x;
    if den.norm() <= 1e-14 {
        return Err(Error::Pole(format!("x = {x} (z = {z})")));
    }
    Ok(den)
}

/// `γ + Σ w (z + x)/(1 − z x)`.
pub fn free_lk_r(p: &FreeLKPair, z: C64) -> Result<C64> {
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::Domain(format!("z = {z} is not finite")));
    }
    let mut acc = C64::new(p.gamma, 0.0);
    for a in p.sigma.atoms() {
        let den = lk_pole_check(z, a.x)?;
        acc += a.w * (z + a.x) / den;
    }
    Ok(acc)
}

/// `(R, R')` with `R' = Σ w (1 + x²)/(1 − z x)²`.
pub(crate) fn free_lk_r_with_derivative(p: &FreeLKPair, z: C64) -> Result<(C64, C64)> {
    let mut r = C64::new(p.gamma, 0.0);
    let mut d = C64::new(0.0, 0.0);
    for a in p.sigma.atoms() {
        let den = lk_pole_check(z, a.x)?;
        r += a.w * (z + a.x) / den;
        d += a.w * (1.0 + a.x * a.x) / (den * den);
    }
    Ok((r, d))
}

/// One additive piece of a marginal R-transform.
#[derive(Clone, Debug, PartialEq)]
pub enum MarginalComponent {
    /// `scale · R_σ` for a probability measure `σ` and `scale ≥ 1`.
    Measure {
        sigma: Measure1D,
        scale: f64,
    },
    FreeLk(FreeLKPair),
}

/// Marginal law given by a sum of R-transforms, `R = Σ cᵢ R_{σᵢ} + Σ R_LK`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct MarginalRModel {
    components: Vec<MarginalComponent>,
}

/// Cauchy transform of a [`MarginalRModel`] at one point with its subordination data.
#[derive(Clone, Debug, PartialEq)]
pub struct MarginalSolution {
    pub lambda: C64,
    /// `G(λ)`.
    pub g: C64,
    /// `G'(λ)`.
    pub dg: C64,
    /// One point `ωᵢ` per measure component, with `G_{σᵢ}(ωᵢ) = G(λ)`.
    pub omegas: Vec<C64>,
}

impl MarginalSolution {
    fn conj(self) -> Self {
        MarginalSolution {
            lambda: self.lambda.conj(),
            g: self.g.conj(),
            dg: self.dg.conj(),
            omegas: self.omegas.into_iter().map(|w| w.conj()).collect(),
        }
    }
}

struct Residual {
    e0: C64,
    ei: Vec<C64>,
    di: Vec<C64>,
    j0: C64,
    merit: f64,
}

impl MarginalRModel {
    pub fn new(components: Vec<MarginalComponent>) -> Result<Self> {
        for c in &components {
            if let MarginalComponent::Measure { sigma, scale } = c {
                if !sigma.is_probability() {
                    return Err(Error::invalid("measure components must be probability laws"));
                }
                if !(*scale >= 1.0) || !scale.is_finite() {
                    return Err(Error::invalid(format!("convolution power {scale} must be at least 1")));
                }
            }
        }
        Ok(MarginalRModel { components })
    }

    pub fn components(&self) -> &[MarginalComponent] {
        &self.components
    }

    pub fn push(&mut self, c: MarginalComponent) -> Result<()> {
        let mut all = std::mem::take(&mut self.components);
        all.push(c);
        *self = MarginalRModel::new(all)?;
        Ok(())
    }

    /// `R(z)` summed over components, each evaluated near the origin.
    pub fn r(&self, z: C64) -> Result<C64> {
        let mut acc = C64::new(0.0, 0.0);
        for c in &self.components {
            acc += match c {
                MarginalComponent::Measure { sigma, scale } => *scale * r1_from_measure(sigma, z)?,
                MarginalComponent::FreeLk(p) => free_lk_r(p, z)?,
            };
        }
        Ok(acc)
    }

    /// First free cumulant.
    pub fn mean(&self) -> f64 {
        self.components
            .iter()
            .map(|c| match c {
                MarginalComponent::Measure { sigma, scale } => scale * sigma.moment(1).unwrap_or(0.0),
                MarginalComponent::FreeLk(p) => p.mean(),
            })
            .sum()
    }

    /// Second free cumulant.
    pub fn variance(&self) -> f64 {
        self.components
            .iter()
            .map(|c| match c {
                MarginalComponent::Measure { sigma, scale } => {
                    let m1 = sigma.moment(1).unwrap_or(0.0);
                    scale * (sigma.moment(2).unwrap_or(0.0) - m1 * m1)
                }
                MarginalComponent::FreeLk(p) => p.variance(),
            })
            .sum()
    }

    /// Radius of a centered interval that contains the support.
    pub fn support_radius_bound(&self) -> f64 {
        let jumps = self
            .components
            .iter()
            .map(|c| match c {
                MarginalComponent::Measure { sigma, .. } => sigma.support_radius(),
                MarginalComponent::FreeLk(p) => p.sigma.support_radius(),
            })
            .fold(0.0, f64::max);
        self.mean().abs() + 2.0 * self.variance().max(0.0).sqrt() + jumps
    }

    fn n_measures(&self) -> usize {
        self.components
            .iter()
            .filter(|c| matches!(c, MarginalComponent::Measure { .. }))
            .count()
    }

    fn residual(&self, lam: C64, z: C64, om: &[C64]) -> Result<Residual> {
        let mut csum = 0.0;
        let mut e0 = -lam;
        let mut j0 = C64::new(0.0, 0.0);
        let mut ei = Vec::with_capacity(om.len());
        let mut di = Vec::with_capacity(om.len());
        let mut k = 0;
        let mut rel: f64 = 0.0;
        for c in &self.components {
            match c {
                MarginalComponent::Measure { sigma, scale } => {
                    let (g, d) = g1_with_derivative(sigma, om[k]);
                    csum += scale;
                    e0 += *scale * om[k];
                    ei.push(g - z);
                    di.push(d);
                    rel = rel.max((g - z).norm() / z.norm());
                    k += 1;
                }
                MarginalComponent::FreeLk(p) => {
                    let (r, d) = free_lk_r_with_derivative(p, z)?;
                    e0 += r;
                    j0 += d;
                }
            }
        }
        e0 += (1.0 - csum) / z;
        j0 -= (1.0 - csum) / (z * z);
        rel = rel.max((e0 * z).norm());
        Ok(Residual {
            e0,
            ei,
            di,
            j0,
            merit: rel,
        })
    }

    fn scales(&self) -> Vec<f64> {
        self.components
            .iter()
            .filter_map(|c| match c {
                MarginalComponent::Measure { scale, .. } => Some(*scale),
                _ => None,
            })
            .collect()
    }

    /// Newton on `(z, ω)` at fixed `λ` in the upper half-plane.
    fn newton(&self, lam: C64, z0: C64, om0: &[C64]) -> Result<(C64, Vec<C64>, C64)> {
        let scales = self.scales();
        let valid = |z: C64, om: &[C64]| z.im < 0.0 && om.iter().all(|w| w.im > 0.0);
        let mut z = z0;
        let mut om = om0.to_vec();
        if !valid(z, &om) {
            return Err(Error::Domain("invalid continuation seed".into()));
        }
        let mut r = self.residual(lam, z, &om)?;
        let mut polish = 0;
        for it in 0..MAX_ITERATIONS {
            let den = r.j0 + scales.iter().zip(&r.di).map(|(c, d)| *c / d).sum::<C64>();
            if r.merit <= INVERSION_TOL {
                polish += 1;
                if polish > 2 {
                    return Ok((z, om, 1.0 / den));
                }
            }
            let num = -r.e0
                + scales
                    .iter()
                    .zip(r.ei.iter().zip(&r.di))
                    .map(|(c, (e, d))| *c * e / d)
                    .sum::<C64>();
            let dz = num / den;
            let dom: Vec<C64> = r.ei.iter().zip(&r.di).map(|(e, d)| (dz - e) / d).collect();
            let mut t = 1.0;
            let mut accepted = false;
            for _ in 0..50 {
                let zc = z + dz * t;
                let oc: Vec<C64> = om.iter().zip(&dom).map(|(o, d)| o + d * t).collect();
                if valid(zc, &oc) {
                    if let Ok(rc) = self.residual(lam, zc, &oc) {
                        if rc.merit < r.merit || (polish > 0 && rc.merit <= INVERSION_TOL) {
                            z = zc;
                            om = oc;
                            r = rc;
                            accepted = true;
                            break;
                        }
                    }
                }
                t *= 0.5;
            }
            if !accepted {
                if r.merit <= INVERSION_TOL {
                    return Ok((z, om, 1.0 / den));
                }
                return Err(Error::NonConvergence {
                    stage: "marginal Cauchy transform",
                    iterations: it,
                    residual: r.merit,
                    at: format!("λ = {lam}"),
                });
            }
        }
        if r.merit <= INVERSION_TOL {
            let den = r.j0 + scales.iter().zip(&r.di).map(|(c, d)| *c / d).sum::<C64>();
            return Ok((z, om, 1.0 / den));
        }
        Err(Error::NonConvergence {
            stage: "marginal Cauchy transform",
            iterations: MAX_ITERATIONS,
            residual: r.merit,
            at: format!("λ = {lam}"),
        })
    }

    fn seed(&self, lam: C64) -> (C64, Vec<C64>) {
        let z = 1.0 / (lam - self.mean());
        let om = self
            .components
            .iter()
            .filter_map(|c| match c {
                MarginalComponent::Measure { sigma, .. } => Some(1.0 / z + sigma.moment(1).unwrap_or(0.0)),
                _ => None,
            })
            .collect();
        (z, om)
    }

    fn solve_upper(&self, lam: C64) -> Result<MarginalSolution> {
        let scale = 1.0 + self.support_radius_bound();
        let mut top = lam.im.max(4.0 * scale);
        let mut start = None;
        for _ in 0..8 {
            let lt = C64::new(lam.re, top);
            let (z0, om0) = self.seed(lt);
            if let Ok(s) = self.newton(lt, z0, &om0) {
                start = Some(s);
                break;
            }
            top *= 4.0;
        }
        let (mut z, mut om, mut dg) = start.ok_or_else(|| Error::NonConvergence {
            stage: "marginal Cauchy transform",
            iterations: MAX_ITERATIONS,
            residual: f64::NAN,
            at: format!("λ = {lam} (continuation start)"),
        })?;
        let mut cur = top;
        let mut ratio: f64 = 0.5;
        while cur > lam.im {
            let next = (cur * ratio).max(lam.im);
            let lt = C64::new(lam.re, next);
            // First-order predictor along the path.
            let dl = C64::new(0.0, next - cur);
            let zp = z + dg * dl;
            let seed_z = if zp.im < 0.0 { zp } else { z };
            match self.newton(lt, seed_z, &om).or_else(|_| self.newton(lt, z, &om)) {
                Ok((zn, on, dn)) => {
                    z = zn;
                    om = on;
                    dg = dn;
                    cur = next;
                    ratio = (ratio * ratio).max(0.1);
                }
                Err(e) => {
                    ratio = 0.5 * (1.0 + ratio);
                    if ratio > 1.0 - 1e-9 {
                        return Err(e);
                    }
                }
            }
        }
        Ok(MarginalSolution {
            lambda: lam,
            g: z,
            dg,
            omegas: om,
        })
    }

    /// `G(λ)` with subordination points, by continuation down from `Im λ` large.
    pub fn solve(&self, lam: C64) -> Result<MarginalSolution> {
        off_axis(lam, "λ")?;
        if self.n_measures() == 0 && self.components.is_empty() {
            let g = 1.0 / lam;
            return Ok(MarginalSolution {
                lambda: lam,
                g,
                dg: -g * g,
                omegas: Vec::new(),
            });
        }
        if lam.im > 0.0 {
            self.solve_upper(lam)
        } else {
            Ok(self.solve_upper(lam.conj())?.conj())
        }
    }
}

impl CauchyTransform1D for MarginalRModel {
    fn eval(&self, z: C64) -> Result<C64> {
        Ok(self.solve(z)?.g)
    }

    fn derivative(&self, z: C64) -> Result<C64> {
        Ok(self.solve(z)?.dg)
    }

    fn provenance(&self) -> Provenance {
        Provenance::FromReconstruction
    }

    fn eval_with_derivative(&self, z: C64) -> Result<(C64, C64)> {
        let s = self.solve(z)?;
        Ok((s.g, s.dg))
    }
}

/// Free cumulants `κ₁..κₙ` from moments `m₁..mₙ`.
pub fn free_cumulants(moments: &[f64]) -> Vec<f64> {
    let n = moments.len();
    let mut kappa = vec![0.0; n];
    for order in 1..=n {
        let mut acc = moments[order - 1];
        for s in 1..order {
            acc -= kappa[s - 1] * power_coefficient(moments, s, order - s);
        }
        kappa[order - 1] = acc;
    }
    kappa
}

/// Moments `m₁..mₙ` from free cumulants `κ₁..κₙ`.
pub fn free_moments(kappa: &[f64]) -> Vec<f64> {
    let n = kappa.len();
    let mut m = Vec::with_capacity(n);
    for order in 1..=n {
        let mut acc = kappa[order - 1];
        for s in 1..order {
            acc += kappa[s - 1] * power_coefficient(&m, s, order - s);
        }
        m.push(acc);
    }
    m
}

// [x^deg] (1 + m₁x + m₂x² + …)^s
fn power_coefficient(moments: &[f64], s: usize, deg: usize) -> f64 {
    let mut series = vec![0.0; deg + 1];
    series[0] = 1.0;
    for _ in 0..s {
        let mut next = vec![0.0; deg + 1];
        for (i, &a) in series.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            for j in 0..=(deg - i) {
                let b = if j == 0 {
                    1.0
                } else {
                    moments.get(j - 1).copied().unwrap_or(0.0)
                };
                next[i + j] += a * b;
            }
        }
        series = next;
    }
    series[deg]
}

/// Uniform 1-D grid with a smoothing height.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec1D {
    pub range: (f64, f64),
    pub n: usize,
    pub y: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FreePower {
    pub density: GridDensity1D,
    /// Exact moments `m₁..m₄` from the scaled free cumulants.
    pub moments: [f64; 4],
    /// The same moments as Riemann sums of the smoothed density.
    pub grid_moments: [f64; 4],
}

/// `σ^{⊞k}` for `k ≥ 1`: density `−Im G(x+iy)/π` on the grid and its first four moments.
pub fn free_convolve_power(sigma: &Measure1D, k: f64, grid: &GridSpec1D) -> Result<FreePower> {
    if !(k >= 1.0) || !k.is_finite() {
        return Err(Error::invalid(format!("power k = {k} must be at least 1")));
    }
    if !sigma.is_probability() {
        return Err(Error::invalid("free convolution power needs a probability law"));
    }
    if !(grid.y > 0.0) || grid.n < 2 || !(grid.range.0 < grid.range.1) {
        return Err(Error::invalid("bad 1-D grid"));
    }
    let model = MarginalRModel::new(vec![MarginalComponent::Measure {
        sigma: sigma.clone(),
        scale: k,
    }])?;
    let xs = linspace(grid.range.0, grid.range.1, grid.n);
    let values = xs
        .par_iter()
        .map(|&x| Ok((-model.solve(C64::new(x, grid.y))?.g.im / PI).max(0.0)))
        .collect::<Result<Vec<f64>>>()?;
    let density = GridDensity1D { xs, values, y: grid.y };
    let raw: Vec<f64> = (1..=4).map(|j| sigma.moment(j)).collect::<Result<_>>()?;
    let kappa: Vec<f64> = free_cumulants(&raw).into_iter().map(|c| k * c).collect();
    let m = free_moments(&kappa);
    Ok(FreePower {
        moments: [m[0], m[1], m[2], m[3]],
        grid_moments: [1, 2, 3, 4].map(|j| density.moment(j) / density.moment(0)),
        density,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transform2d::Semicircle;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn bernoulli() -> Measure1D {
        Measure1D::new([(-1.0, 0.5), (1.0, 0.5)]).unwrap()
    }

    #[test]
    fn stolz_membership() {
        let d = StolzAngle::new(1.0, 0.1).unwrap();
        assert!(d.contains(c(0.0, -0.05)));
        assert!(d.contains(c(0.0, 0.05)));
        assert!(!d.contains(c(0.05, -0.05)));
        assert!(!d.contains(c(0.0, -0.2)));
        assert!(!d.contains(c(0.1, 0.0)));
        assert!(StolzAngle::for_radius(1.0).contains(c(0.05, -0.05)));
        assert!(StolzAngle::new(0.0, 1.0).is_err());
    }

    #[test]
    fn point_mass_r_is_constant() {
        for a in [-2.0, 0.0, 1.5] {
            for z in [c(0.01, -0.05), c(-0.02, 0.1), c(0.0, -0.001)] {
                let r = r1_from_measure(&Measure1D::dirac(a), z).unwrap();
                assert!((r - a).norm() < 1e-9, "{r} vs {a}");
            }
        }
    }

    #[test]
    fn semicircle_r_is_identity() {
        let z = c(0.0, -0.3);
        let r = r1_from_cauchy(&Semicircle, z, 0.0).unwrap();
        assert!((r - z).norm() < 1e-10);
        for k in 0..10 {
            let th = -PI / 2.0 + 0.15 * (k as f64 - 4.5);
            let z = 0.2 * (1.0 + 0.1 * k as f64) * C64::from_polar(1.0, th);
            let r = r1_from_cauchy(&Semicircle, z, 0.0).unwrap();
            assert!((r - z).norm() < 1e-10, "{z}: {r}");
        }
    }

    #[test]
    fn bernoulli_r_matches_quadratic() {
        // K solves z K² − K − z... from G(K) = K/(K²−1) = z.
        for z in [c(0.02, -0.1), c(-0.05, -0.08), c(0.0, 0.1), c(0.03, 0.04)] {
            let r = r1_from_measure(&bernoulli(), z).unwrap();
            let expect = ((1.0 + 4.0 * z * z).sqrt() - 1.0) / (2.0 * z);
            assert!((r - expect).norm() < 1e-11, "{r} vs {expect}");
        }
    }

    #[test]
    fn small_z_limits() {
        let sigma = Measure1D::new([(-1.0, 0.2), (0.5, 0.5), (2.0, 0.3)]).unwrap();
        let m1 = sigma.moment(1).unwrap();
        let mut prev = f64::INFINITY;
        let mut prev_zr = f64::INFINITY;
        for k in 1..=4 {
            let z = c(0.0, -(10f64).powi(-k));
            let r = r1_from_measure(&sigma, z).unwrap();
            let e = (r - m1).norm();
            assert!(e < prev);
            prev = e;
            let zr = (z * r).norm();
            assert!(zr < prev_zr);
            prev_zr = zr;
        }
        assert!(prev_zr < 1e-3);
    }

    #[test]
    fn real_point_is_rejected() {
        assert!(matches!(
            r1_from_measure(&bernoulli(), c(0.1, 0.0)),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn free_lk_examples() {
        let semi = FreeLKPair::new(0.0, Measure1D::dirac(0.0)).unwrap();
        let z = c(0.3, -0.2);
        assert!((free_lk_r(&semi, z).unwrap() - z).norm() < 1e-15);

        let lam = 2.5;
        let pois = FreeLKPair::new(0.0, Measure1D::new([(1.0, lam)]).unwrap()).unwrap();
        let expect = lam * (z + 1.0) / (1.0 - z);
        assert!((free_lk_r(&pois, z).unwrap() - expect).norm() < 1e-14);

        let shift = FreeLKPair::new(2.0, Measure1D::zero()).unwrap();
        assert_eq!(free_lk_r(&shift, z).unwrap(), c(2.0, 0.0));
        assert_eq!(free_lk_r(&pois, c(0.0, 0.0)).unwrap(), c(lam, 0.0));

        assert!(matches!(free_lk_r(&pois, c(1.0, 0.0)), Err(Error::Pole(_))));
    }

    #[test]
    fn free_lk_gaussian_component_is_linear() {
        let p = FreeLKPair::new(0.7, Measure1D::new([(0.0, 1.3)]).unwrap()).unwrap();
        for z in [c(0.1, 0.2), c(-1.0, -3.0)] {
            assert_eq!(free_lk_r(&p, z).unwrap(), 0.7 + 1.3 * z);
        }
    }

    #[test]
    fn model_matches_closed_forms() {
        let semi = MarginalRModel::new(vec![MarginalComponent::FreeLk(
            FreeLKPair::new(0.0, Measure1D::dirac(0.0)).unwrap(),
        )])
        .unwrap();
        for lam in [c(0.0, 1.0), c(1.9, 0.01), c(-2.5, 0.05), c(0.3, -0.2)] {
            let s = semi.solve(lam).unwrap();
            assert!((s.g - Semicircle::g(lam)).norm() < 1e-12, "{lam}");
            let d = Semicircle.derivative(lam).unwrap();
            assert!((s.dg - d).norm() < 1e-9);
        }
        let arcsine = MarginalRModel::new(vec![MarginalComponent::Measure {
            sigma: bernoulli(),
            scale: 2.0,
        }])
        .unwrap();
        for lam in [c(0.0, 0.5), c(1.99, 0.01), c(-0.5, 0.001), c(3.0, -0.1)] {
            let s = arcsine.solve(lam).unwrap();
            let oracle = 1.0 / ((lam - 2.0).sqrt() * (lam + 2.0).sqrt());
            assert!((s.g - oracle).norm() < 1e-10, "{lam}: {} vs {oracle}", s.g);
        }
    }

    #[test]
    fn free_power_of_point_mass() {
        let grid = GridSpec1D {
            range: (-1.0, 3.0),
            n: 401,
            y: 0.02,
        };
        let out = free_convolve_power(&Measure1D::dirac(0.7), 2.0, &grid).unwrap();
        assert!((out.moments[0] - 1.4).abs() < 1e-12);
        let peak = out
            .density
            .xs
            .iter()
            .zip(&out.density.values)
            .max_by(|a, b| a.1.total_cmp(b.1))
            .unwrap();
        assert!((peak.0 - 1.4).abs() < 1e-9);
    }

    #[test]
    fn arcsine_density_at_origin() {
        let grid = GridSpec1D {
            range: (-3.0, 3.0),
            n: 601,
            y: 0.01,
        };
        let out = free_convolve_power(&bernoulli(), 2.0, &grid).unwrap();
        let v = out.density.at(0.0);
        assert!((v - 1.0 / (2.0 * PI)).abs() < 2e-3, "{v}");
    }

    #[test]
    fn variance_adds_under_powers() {
        let grid = GridSpec1D {
            range: (-6.0, 6.0),
            n: 64,
            y: 0.1,
        };
        for n in [1.0, 2.0, 3.0, 5.0] {
            let out = free_convolve_power(&bernoulli(), n, &grid).unwrap();
            assert!((out.moments[1] - n).abs() < 1e-12);
        }
        assert!(free_convolve_power(&bernoulli(), 0.5, &grid).is_err());
    }

    #[test]
    fn cumulant_moment_round_trip() {
        // Semicircle: κ₂ = 1, moments 0,1,0,2. Bernoulli: 0,1,0,1 → κ₄ = −1.
        assert_eq!(free_moments(&[0.0, 1.0, 0.0, 0.0]), vec![0.0, 1.0, 0.0, 2.0]);
        assert_eq!(free_cumulants(&[0.0, 1.0, 0.0, 1.0]), vec![0.0, 1.0, 0.0, -1.0]);
        let m = [0.3, 1.2, -0.4, 2.5];
        let back = free_moments(&free_cumulants(&m));
        for (a, b) in m.iter().zip(&back) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn additivity_round_trip() {
        let sigma = Measure1D::new([(-1.0, 0.25), (0.5, 0.5), (1.5, 0.25)]).unwrap();
        let model = MarginalRModel::new(vec![MarginalComponent::Measure {
            sigma: sigma.clone(),
            scale: 2.0,
        }])
        .unwrap();
        let mean = model.mean();
        for k in 0..10 {
            let th = -PI / 2.0 + 0.1 * (k as f64 - 4.5);
            let z = C64::from_polar(0.05, th);
            let z = if k % 2 == 0 { z } else { z.conj() };
            let round = r1_from_cauchy(&model, z, mean).unwrap();
            let direct = 2.0 * r1_from_measure(&sigma, z).unwrap();
            assert!((round - direct).norm() < 1e-9, "{z}: {round} vs {direct}");
        }
    }

    fn arb_law() -> impl Strategy<Value = Measure1D> {
        prop::collection::vec((-2.0f64..2.0, 0.05f64..1.0), 1..5).prop_map(|v| {
            let s: f64 = v.iter().map(|p| p.1).sum();
            Measure1D::new(v.into_iter().map(|(x, w)| (x, w / s))).unwrap()
        })
    }

    proptest! {
        #[test]
        fn r_symmetry(sigma in arb_law(), frac in -0.9f64..0.9, depth in 0.1f64..0.9) {
            let d = StolzAngle::for_measure(&sigma);
            let y = -depth * d.beta;
            let z = C64::new(frac * d.alpha * -y, y);
            prop_assert!(d.contains(z));
            let a = r1_from_measure(&sigma, z.conj()).unwrap();
            let b = r1_from_measure(&sigma, z).unwrap().conj();
            prop_assert!((a - b).norm() <= 1e-12);
        }

        #[test]
        fn model_g_is_nevanlinna(sigma in arb_law(), k in 1.0f64..4.0, re in -5.0f64..5.0, im in 0.01f64..2.0) {
            let model = MarginalRModel::new(vec![MarginalComponent::Measure { sigma, scale: k }]).unwrap();
            let s = model.solve(C64::new(re, im)).unwrap();
            prop_assert!(s.g.im < 0.0);
        }
    }
}
