//! The bi-free partial R-transform: assembly from a two-variable Cauchy
//! transform, algebraic reconstruction of `G`, marginal limits and cumulants.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::measure::{Axis, Measure1D, Measure2D, PlanarMeasure};
use crate::rtransform1d::{r1_from_cauchy, r1_from_measure, MarginalRModel, MarginalSolution, StolzAngle};
use crate::transform2d::{g2_unchecked, off_axis, CauchyTransform1D, CauchyTransform2D, Provenance};

/// `|h|` below this is treated as a vanishing denominator.
pub const H_ZERO_TOL: f64 = 1e-10;

/// Nodes per circle for torus coefficient extraction.
pub const TORUS_NODES: usize = 64;

/// Product domain `Ω = (Δ ∪ Δ̄)²` with one Stolz angle for both variables.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OmegaDomain {
    pub angle: StolzAngle,
}

impl OmegaDomain {
    pub fn new(angle: StolzAngle) -> Self {
        OmegaDomain { angle }
    }

    pub fn for_radius(rho: f64) -> Self {
        OmegaDomain {
            angle: StolzAngle::for_radius(rho),
        }
    }

    pub fn for_measure(mu: &impl PlanarMeasure) -> Self {
        Self::for_radius(mu.support_radius())
    }

    pub fn contains(&self, z: C64, w: C64) -> bool {
        self.angle.contains(z) && self.angle.contains(w)
    }
}

/// A bi-free partial R-transform together with its marginal R-transforms.
pub trait PartialRTransform: Sync {
    fn eval(&self, z: C64, w: C64) -> Result<C64>;

    /// `R_j` of the marginal on `axis`.
    fn marginal(&self, axis: Axis, z: C64) -> Result<C64>;

    fn provenance(&self) -> Provenance;

    fn domain(&self) -> OmegaDomain;

    /// Support radius of the underlying law, `None` when it is not compactly supported.
    fn support_radius(&self) -> Option<f64>;

    /// Values on `zs × ws`, row-major in `zs`.
    fn eval_tensor(&self, zs: &[C64], ws: &[C64]) -> Result<Vec<C64>> {
        let rows: Vec<Vec<C64>> = zs
            .par_iter()
            .map(|&z| ws.iter().map(|&w| self.eval(z, w)).collect::<Result<Vec<_>>>())
            .collect::<Result<_>>()?;
        Ok(rows.into_iter().flatten().collect())
    }
}

fn kernel_points(z: C64, w: C64, r1: C64, r2: C64) -> (C64, C64) {
    (1.0 / z + r1, 1.0 / w + r2)
}

fn assemble(z: C64, w: C64, r1: C64, r2: C64, g: C64) -> Result<C64> {
    let h = g / (z * w);
    if h.norm() < H_ZERO_TOL {
        return Err(Error::Degenerate(format!(
            "h = {h:.3e} vanishes at (z, w) = ({z}, {w}); shrink the domain"
        )));
    }
    Ok(z * r1 + w * r2 + 1.0 - 1.0 / h)
}

/// `R_μ(z, w) = z R₁(z) + w R₂(w) + 1 − 1/h` with `h = G_μ(K₁(z), K₂(w)) / (zw)`.
pub fn partial_r(mu: &Measure2D, z: C64, w: C64) -> Result<C64> {
    MeasureR::new(mu.clone())?.eval(z, w)
}

/// Partial R-transform of a compactly supported atomic probability law.
#[derive(Clone, Debug)]
pub struct MeasureR {
    mu: Measure2D,
    marginals: [Measure1D; 2],
}

impl MeasureR {
    pub fn new(mu: Measure2D) -> Result<Self> {
        if !mu.is_probability() {
            return Err(Error::invalid("partial R-transform needs a probability law"));
        }
        let marginals = [mu.marginal(Axis::First), mu.marginal(Axis::Second)];
        Ok(MeasureR { mu, marginals })
    }

    pub fn measure(&self) -> &Measure2D {
        &self.mu
    }

    fn finish(&self, z: C64, w: C64, r1: C64, r2: C64) -> Result<C64> {
        let (k1, k2) = kernel_points(z, w, r1, r2);
        off_axis(k1, "K₁(z)")?;
        off_axis(k2, "K₂(w)")?;
        assemble(z, w, r1, r2, g2_unchecked(&self.mu, k1, k2))
    }
}

impl PartialRTransform for MeasureR {
    fn eval(&self, z: C64, w: C64) -> Result<C64> {
        let r1 = r1_from_measure(&self.marginals[0], z)?;
        let r2 = r1_from_measure(&self.marginals[1], w)?;
        self.finish(z, w, r1, r2)
    }

    fn marginal(&self, axis: Axis, z: C64) -> Result<C64> {
        r1_from_measure(&self.marginals[(axis.index() - 1) as usize], z)
    }

    fn provenance(&self) -> Provenance {
        Provenance::FromMeasure
    }

    fn domain(&self) -> OmegaDomain {
        OmegaDomain::for_measure(&self.mu)
    }

    fn support_radius(&self) -> Option<f64> {
        Some(self.mu.support_radius())
    }

    fn eval_tensor(&self, zs: &[C64], ws: &[C64]) -> Result<Vec<C64>> {
        let r1: Vec<C64> = zs
            .par_iter()
            .map(|&z| r1_from_measure(&self.marginals[0], z))
            .collect::<Result<_>>()?;
        let r2: Vec<C64> = ws
            .par_iter()
            .map(|&w| r1_from_measure(&self.marginals[1], w))
            .collect::<Result<_>>()?;
        let rows: Vec<Vec<C64>> = (0..zs.len())
            .into_par_iter()
            .map(|i| {
                (0..ws.len())
                    .map(|j| self.finish(zs[i], ws[j], r1[i], r2[j]))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?;
        Ok(rows.into_iter().flatten().collect())
    }
}

/// Partial R-transform assembled from a joint Cauchy transform and its marginals.
pub struct TransformR<'a> {
    pub g: &'a (dyn CauchyTransform2D + 'a),
    pub marginals: [&'a (dyn CauchyTransform1D + 'a); 2],
    /// Marginal means, used to seed the inversions.
    pub means: [f64; 2],
    pub domain: OmegaDomain,
    pub support_radius: Option<f64>,
}

impl PartialRTransform for TransformR<'_> {
    fn eval(&self, z: C64, w: C64) -> Result<C64> {
        let r1 = r1_from_cauchy(self.marginals[0], z, self.means[0])?;
        let r2 = r1_from_cauchy(self.marginals[1], w, self.means[1])?;
        let (k1, k2) = kernel_points(z, w, r1, r2);
        let g = self.g.eval(k1, k2)?;
        assemble(z, w, r1, r2, g)
    }

    fn marginal(&self, axis: Axis, z: C64) -> Result<C64> {
        let i = (axis.index() - 1) as usize;
        r1_from_cauchy(self.marginals[i], z, self.means[i])
    }

    fn provenance(&self) -> Provenance {
        self.g.provenance()
    }

    fn domain(&self) -> OmegaDomain {
        self.domain
    }

    fn support_radius(&self) -> Option<f64> {
        self.support_radius
    }

    fn eval_tensor(&self, zs: &[C64], ws: &[C64]) -> Result<Vec<C64>> {
        let r1: Vec<C64> = zs
            .par_iter()
            .map(|&z| r1_from_cauchy(self.marginals[0], z, self.means[0]))
            .collect::<Result<_>>()?;
        let r2: Vec<C64> = ws
            .par_iter()
            .map(|&w| r1_from_cauchy(self.marginals[1], w, self.means[1]))
            .collect::<Result<_>>()?;
        let k1: Vec<C64> = zs.iter().zip(&r1).map(|(z, r)| 1.0 / z + r).collect();
        let k2: Vec<C64> = ws.iter().zip(&r2).map(|(w, r)| 1.0 / w + r).collect();
        let g = self.g.eval_tensor(&k1, &k2)?;
        let mut out = Vec::with_capacity(g.len());
        for i in 0..zs.len() {
            for j in 0..ws.len() {
                out.push(assemble(zs[i], ws[j], r1[i], r2[j], g[i * ws.len() + j])?);
            }
        }
        Ok(out)
    }
}

/// `R` assembled from a joint Cauchy transform `g` and marginal transforms.
pub fn partial_r_from_parts(
    g: &(dyn CauchyTransform2D + '_),
    g1: &(dyn CauchyTransform1D + '_),
    g2: &(dyn CauchyTransform1D + '_),
    means: [f64; 2],
    z: C64,
    w: C64,
) -> Result<C64> {
    TransformR {
        g,
        marginals: [g1, g2],
        means,
        domain: OmegaDomain::for_radius(0.0),
        support_radius: None,
    }
    .eval(z, w)
}

/// `G(K₁(z), K₂(w)) = zw / (1 + z R₁(z) + w R₂(w) − R(z, w))`.
pub fn reconstruct_g(r: &(impl PartialRTransform + ?Sized), z: C64, w: C64) -> Result<C64> {
    let r1 = r.marginal(Axis::First, z)?;
    let r2 = r.marginal(Axis::Second, w)?;
    let den = 1.0 + z * r1 + w * r2 - r.eval(z, w)?;
    if den.norm() < H_ZERO_TOL * (z * w).norm() {
        return Err(Error::Degenerate(format!(
            "reconstruction denominator vanishes at ({z}, {w}); domain too large"
        )));
    }
    Ok(z * w / den)
}

/// A law whose Cauchy transform can be rebuilt from its R-transform away from
/// the origin, through the marginal inverses.
pub trait Reconstructible: PartialRTransform {
    fn marginal_model(&self, axis: Axis) -> &MarginalRModel;

    /// `R − zR₁ − wR₂` at `(z, w) = (G₁(λ₁), G₂(λ₂))`, given the marginal solutions.
    fn coupling(&self, a: &MarginalSolution, b: &MarginalSolution) -> Result<C64>;
}

/// Joint Cauchy transform rebuilt from a [`Reconstructible`] law:
/// `G(λ₁, λ₂) = zw / (1 − D(z, w))` with `z = G₁(λ₁)`, `w = G₂(λ₂)`.
pub struct ReconstructedG<'a, L: ?Sized> {
    law: &'a L,
}

impl<'a, L: Reconstructible + ?Sized> ReconstructedG<'a, L> {
    pub fn new(law: &'a L) -> Self {
        ReconstructedG { law }
    }

    fn combine(&self, a: &MarginalSolution, b: &MarginalSolution) -> Result<C64> {
        let d = self.law.coupling(a, b)?;
        let den = 1.0 - d;
        if den.norm() < 1e-14 {
            return Err(Error::Degenerate(format!(
                "reconstruction denominator vanishes at ({}, {})",
                a.lambda, b.lambda
            )));
        }
        Ok(a.g * b.g / den)
    }
}

impl<L: Reconstructible + ?Sized> CauchyTransform2D for ReconstructedG<'_, L> {
    fn eval(&self, z: C64, w: C64) -> Result<C64> {
        let a = self.law.marginal_model(Axis::First).solve(z)?;
        let b = self.law.marginal_model(Axis::Second).solve(w)?;
        self.combine(&a, &b)
    }

    fn provenance(&self) -> Provenance {
        Provenance::FromReconstruction
    }

    fn eval_tensor(&self, zs: &[C64], ws: &[C64]) -> Result<Vec<C64>> {
        let m1 = self.law.marginal_model(Axis::First);
        let m2 = self.law.marginal_model(Axis::Second);
        let a: Vec<MarginalSolution> = zs
            .par_iter()
            .map(|&z| m1.solve(z))
            .collect::<Result<_>>()
            .map_err(|e| e.at_stage("marginal inversion, axis 1"))?;
        let b: Vec<MarginalSolution> = ws
            .par_iter()
            .map(|&w| m2.solve(w))
            .collect::<Result<_>>()
            .map_err(|e| e.at_stage("marginal inversion, axis 2"))?;
        let rows: Vec<Vec<C64>> = a
            .par_iter()
            .map(|ai| b.iter().map(|bj| self.combine(ai, bj)).collect::<Result<Vec<_>>>())
            .collect::<Result<_>>()
            .map_err(|e| e.at_stage("joint reconstruction"))?;
        Ok(rows.into_iter().flatten().collect())
    }
}

/// Coefficients `κ_{m,n}` of `R(z, w) = Σ κ_{m,n} zᵐ wⁿ` for `m + n ≤ maxdeg`.
#[derive(Clone, Debug, PartialEq)]
pub struct CumulantTable {
    pub maxdeg: usize,
    pub radius: f64,
    /// Largest discarded imaginary part.
    pub max_imag: f64,
    kappa: Vec<Vec<f64>>,
}

impl CumulantTable {
    pub fn new(maxdeg: usize, radius: f64, max_imag: f64, kappa: Vec<Vec<f64>>) -> Self {
        CumulantTable {
            maxdeg,
            radius,
            max_imag,
            kappa,
        }
    }

    /// `κ_{m,n}`, zero above `maxdeg`.
    pub fn get(&self, m: usize, n: usize) -> f64 {
        if m + n > self.maxdeg {
            0.0
        } else {
            self.kappa[m][n]
        }
    }

    /// `(m, n, κ_{m,n})` in order of increasing degree.
    pub fn entries(&self) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::new();
        for d in 0..=self.maxdeg {
            for m in (0..=d).rev() {
                out.push((m, d - m, self.kappa[m][d - m]));
            }
        }
        out
    }

    pub fn covariance(&self) -> f64 {
        self.get(1, 1)
    }
}

/// Default extraction radius `1/(8ρ)`, with `ρ` floored at 1/8.
pub fn default_radius(support_radius: f64) -> f64 {
    1.0 / (8.0 * support_radius.max(0.125))
}

/// Torus averaging of `R` over `|z| = |w| = r` with half-shifted nodes.
pub fn extract_cumulants(
    r: &(impl PartialRTransform + ?Sized),
    maxdeg: usize,
    radius: Option<f64>,
) -> Result<CumulantTable> {
    let rho = r
        .support_radius()
        .ok_or_else(|| Error::invalid("cumulant extraction needs a compactly supported law"))?;
    if maxdeg >= TORUS_NODES / 2 {
        return Err(Error::invalid(format!(
            "maxdeg {maxdeg} too large for {TORUS_NODES} nodes"
        )));
    }
    let rad = radius.unwrap_or_else(|| default_radius(rho));
    if !(rad > 0.0) || !rad.is_finite() {
        return Err(Error::invalid(format!("radius {rad} must be positive")));
    }
    let n = TORUS_NODES;
    let nodes: Vec<C64> = (0..n)
        .map(|j| C64::from_polar(rad, 2.0 * PI * (j as f64 + 0.5) / n as f64))
        .collect();
    let vals = r.eval_tensor(&nodes, &nodes)?;
    let mut kappa = vec![vec![0.0; maxdeg + 1]; maxdeg + 1];
    let mut max_imag: f64 = 0.0;
    #[allow(clippy::needless_range_loop)]
    for m in 0..=maxdeg {
        for k in 0..=(maxdeg - m) {
            let mut acc = C64::new(0.0, 0.0);
            for (i, zi) in nodes.iter().enumerate() {
                let zm = (zi / rad).powi(-(m as i32));
                let mut row = C64::new(0.0, 0.0);
                for (j, wj) in nodes.iter().enumerate() {
                    row += vals[i * n + j] * (wj / rad).powi(-(k as i32));
                }
                acc += zm * row;
            }
            let c = acc / (n * n) as f64 / rad.powi((m + k) as i32);
            max_imag = max_imag.max(c.im.abs());
            kappa[m][k] = c.re;
        }
    }
    if max_imag > 1e-6 {
        return Err(Error::Degenerate(format!(
            "imaginary cumulant residue {max_imag:.3e} at radius {rad}; shrink the radius"
        )));
    }
    Ok(CumulantTable::new(maxdeg, rad, max_imag, kappa))
}

/// `R(z, −iε)` (axis 1) or `R(−iε, z)` (axis 2), which tends to `z R_j(z)` as `ε ↓ 0`.
pub fn marginal_r_limit(r: &(impl PartialRTransform + ?Sized), z: C64, axis: Axis, eps: f64) -> Result<C64> {
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(Error::invalid(format!("ε = {eps} must be positive")));
    }
    let small = C64::new(0.0, -eps);
    match axis {
        Axis::First => r.eval(z, small),
        Axis::Second => r.eval(small, z),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transform2d::{FnTransform2D, Semicircle};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn probes() -> Vec<(C64, C64)> {
        let pts = [c(0.0, -0.05), c(0.02, 0.04), c(-0.03, -0.06)];
        pts.iter().flat_map(|&z| pts.iter().map(move |&w| (z, w))).collect()
    }

    fn test_laws() -> Vec<Measure2D> {
        vec![
            Measure2D::new([(1.0, 0.0, 0.25), (-1.0, 0.0, 0.25), (0.0, 1.0, 0.25), (0.0, -1.0, 0.25)]).unwrap(),
            Measure2D::new([(1.0, 1.0, 0.5), (-1.0, -0.5, 0.3), (0.5, -1.0, 0.2)]).unwrap(),
            Measure2D::new([(0.3, 0.2, 0.6), (-0.7, 0.9, 0.4)]).unwrap(),
        ]
    }

    #[test]
    fn point_mass_is_linear() {
        let (a, b) = (0.7, -1.3);
        let mu = Measure2D::dirac(a, b);
        for (z, w) in probes() {
            let r = partial_r(&mu, z, w).unwrap();
            assert!((r - (a * z + b * w)).norm() < 1e-10, "{r}");
        }
    }

    #[test]
    fn gaussian_from_closed_form_g() {
        let cc = 0.5;
        let g = FnTransform2D::new(
            move |z, w| {
                let p = Semicircle::g(z) * Semicircle::g(w);
                Ok(p / (1.0 - cc * p))
            },
            Provenance::ClosedForm,
        );
        for (z, w) in probes() {
            let r = partial_r_from_parts(&g, &Semicircle, &Semicircle, [0.0, 0.0], z, w).unwrap();
            let expect = z * z + w * w + cc * z * w;
            assert!((r - expect).norm() < 1e-6, "{r} vs {expect}");
        }
    }

    #[test]
    fn marginal_r_is_the_limit_at_infinity() {
        let mu = &test_laws()[1];
        let mr = MeasureR::new(mu.clone()).unwrap();
        let z = c(0.01, -0.05);
        let target = z * mr.marginal(Axis::First, z).unwrap();
        let mut prev = f64::INFINITY;
        for eps in [1e-2, 1e-4, 1e-6] {
            let v = marginal_r_limit(&mr, z, Axis::First, eps).unwrap();
            let e = (v - target).norm();
            assert!(e < prev);
            prev = e;
        }
        assert!(prev < 1e-5);
        let w = c(0.0, 0.04);
        let t2 = w * mr.marginal(Axis::Second, w).unwrap();
        assert!((marginal_r_limit(&mr, w, Axis::Second, 1e-6).unwrap() - t2).norm() < 1e-5);
    }

    #[test]
    fn r_vanishes_at_origin() {
        for mu in test_laws() {
            let mr = MeasureR::new(mu).unwrap();
            let mut prev = f64::INFINITY;
            for eps in [1e-2, 1e-3, 1e-4] {
                let v = mr.eval(c(0.0, -eps), c(0.0, -eps)).unwrap().norm();
                assert!(v < prev);
                prev = v;
            }
            assert!(prev < 1e-3);
        }
    }

    #[test]
    fn point_mass_reconstruction_is_trivial() {
        let mr = MeasureR::new(Measure2D::dirac(0.4, -0.2)).unwrap();
        let (z, w) = (c(0.01, -0.05), c(0.0, 0.05));
        let g = reconstruct_g(&mr, z, w).unwrap();
        assert!((g - z * w).norm() < 1e-14);
    }

    #[test]
    fn round_trip_through_reconstruction() {
        for mu in test_laws() {
            let mr = MeasureR::new(mu.clone()).unwrap();
            for (z, w) in probes() {
                let r = mr.eval(z, w).unwrap();
                let g = reconstruct_g(&mr, z, w).unwrap();
                let k1 = 1.0 / z + mr.marginal(Axis::First, z).unwrap();
                let k2 = 1.0 / w + mr.marginal(Axis::Second, w).unwrap();
                let direct = crate::transform2d::g2(&mu, k1, k2).unwrap();
                assert!((g - direct).norm() < 1e-8 * direct.norm());
                // and back to R through the same formula
                let r_back = 1.0 + z * mr.marginal(Axis::First, z).unwrap() + w * mr.marginal(Axis::Second, w).unwrap()
                    - z * w / g;
                assert!((r_back - r).norm() < 1e-8);
            }
        }
    }

    #[test]
    fn conjugation_symmetry_of_r() {
        for mu in test_laws() {
            let mr = MeasureR::new(mu).unwrap();
            for (z, w) in probes() {
                let a = mr.eval(z.conj(), w.conj()).unwrap();
                let b = mr.eval(z, w).unwrap().conj();
                assert!((a - b).norm() <= 1e-12);
            }
        }
    }

    #[test]
    fn distinct_laws_separate() {
        let mu = Measure2D::new([(1.0, 0.0, 0.25), (-1.0, 0.0, 0.25), (0.0, 1.0, 0.25), (0.0, -1.0, 0.25)]).unwrap();
        let nu = Measure2D::new([
            (1.0, 1.0, 0.25),
            (-1.0, -1.0, 0.25),
            (1.0, -1.0, 0.25),
            (-1.0, 1.0, 0.25),
        ])
        .unwrap();
        let (a, b) = (MeasureR::new(mu.clone()).unwrap(), MeasureR::new(nu).unwrap());
        let dom = a.domain();
        let mut worst: f64 = 0.0;
        for i in 0..5 {
            for j in 0..5 {
                let z = c(0.01 * (i as f64 - 2.0), -0.02 - 0.01 * i as f64);
                let w = c(0.01 * (j as f64 - 2.0), 0.02 + 0.01 * j as f64);
                assert!(dom.contains(z, w));
                worst = worst.max((a.eval(z, w).unwrap() - b.eval(z, w).unwrap()).norm());
            }
        }
        assert!(worst > 1e-6, "{worst}");
    }

    #[test]
    fn cumulants_of_a_point_mass() {
        let mr = MeasureR::new(Measure2D::dirac(0.6, -0.4)).unwrap();
        let t = extract_cumulants(&mr, 4, None).unwrap();
        for (m, n, v) in t.entries() {
            let expect = match (m, n) {
                (1, 0) => 0.6,
                (0, 1) => -0.4,
                _ => 0.0,
            };
            assert!((v - expect).abs() < 1e-10, "κ{m}{n} = {v}");
        }
        assert!(t.max_imag <= 1e-8);
    }

    // Free cumulants of a line law from its moments, written out to degree 4.
    fn free_cumulants_oracle(m: [f64; 4]) -> [f64; 4] {
        let [m1, m2, m3, m4] = m;
        [
            m1,
            m2 - m1 * m1,
            m3 - 3.0 * m1 * m2 + 2.0 * m1.powi(3),
            m4 - 4.0 * m1 * m3 - 2.0 * m2 * m2 + 10.0 * m1 * m1 * m2 - 5.0 * m1.powi(4),
        ]
    }

    #[test]
    fn cumulants_of_atomic_laws() {
        for mu in test_laws() {
            let mr = MeasureR::new(mu.clone()).unwrap();
            let t = extract_cumulants(&mr, 4, None).unwrap();
            assert!(t.max_imag <= 1e-8, "{}", t.max_imag);
            assert!(t.get(0, 0).abs() < 1e-12);
            let cov = mu.moment(1, 1).unwrap() - mu.moment(1, 0).unwrap() * mu.moment(0, 1).unwrap();
            assert!((t.covariance() - cov).abs() < 1e-8, "{} vs {cov}", t.covariance());
            for (axis, pick) in [(Axis::First, 0usize), (Axis::Second, 1)] {
                let marg = mu.marginal(axis);
                let mom = [1, 2, 3, 4].map(|k| crate::measure::LineMeasure::moment(&marg, k).unwrap());
                let kap = free_cumulants_oracle(mom);
                for (i, k) in kap.iter().enumerate() {
                    let got = if pick == 0 { t.get(i + 1, 0) } else { t.get(0, i + 1) };
                    assert!((got - k).abs() < 1e-8, "axis {pick} κ{} {got} vs {k}", i + 1);
                }
            }
        }
    }

    #[test]
    fn extraction_guards() {
        let mr = MeasureR::new(Measure2D::dirac(0.0, 0.0)).unwrap();
        assert!(extract_cumulants(&mr, 40, None).is_err());
        assert!(extract_cumulants(&mr, 4, Some(-1.0)).is_err());
        assert!(MeasureR::new(Measure2D::new([(0.0, 0.0, 0.5)]).unwrap()).is_err());
    }
}
