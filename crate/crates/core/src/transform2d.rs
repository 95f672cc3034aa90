//! Cauchy transforms on the line and in the plane, Stieltjes inversion and
//! non-tangential marginal recovery.

use std::f64::consts::PI;
use std::io::{self, Write};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::measure::{Axis, LineMeasure, Measure1D, Measure2D, PlanarMeasure, SignedMeasure2D};

pub type C64 = Complex64;

/// Where an evaluator's values come from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provenance {
    FromMeasure,
    FromReconstruction,
    FreeLevyKhintchine,
    ClosedForm,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::FromMeasure => "from-measure",
            Provenance::FromReconstruction => "from-R-reconstruction",
            Provenance::FreeLevyKhintchine => "free-LK",
            Provenance::ClosedForm => "closed-form",
        }
    }
}

pub(crate) fn off_axis(z: C64, name: &str) -> Result<()> {
    if z.im == 0.0 || !z.im.is_finite() || !z.re.is_finite() {
        Err(Error::Domain(format!("{name} = {z} must have nonzero imaginary part")))
    } else {
        Ok(())
    }
}

/// `Σ w / (z − x)`.
pub fn g1(sigma: &impl LineMeasure, z: C64) -> Result<C64> {
    off_axis(z, "z")?;
    Ok(g1_unchecked(sigma, z))
}

#[inline]
pub(crate) fn g1_unchecked(sigma: &impl LineMeasure, z: C64) -> C64 {
    sigma.atoms().iter().map(|a| a.w / (z - a.x)).sum()
}

/// `(G, G')` in one pass; `G' = −Σ w / (z − x)²`.
#[inline]
pub(crate) fn g1_with_derivative(sigma: &impl LineMeasure, z: C64) -> (C64, C64) {
    let mut g = C64::new(0.0, 0.0);
    let mut d = C64::new(0.0, 0.0);
    for a in sigma.atoms() {
        let r = 1.0 / (z - a.x);
        g += a.w * r;
        d -= a.w * r * r;
    }
    (g, d)
}

/// `Σ w / ((z − s)(w − t))`.
pub fn g2(mu: &impl PlanarMeasure, z: C64, w: C64) -> Result<C64> {
    off_axis(z, "z")?;
    off_axis(w, "w")?;
    Ok(g2_unchecked(mu, z, w))
}

#[inline]
pub(crate) fn g2_unchecked(mu: &impl PlanarMeasure, z: C64, w: C64) -> C64 {
    mu.atoms().iter().map(|a| a.w / ((z - a.s) * (w - a.t))).sum()
}

/// A two-variable Cauchy transform, callable from many threads at once.
pub trait CauchyTransform2D: Sync {
    fn eval(&self, z: C64, w: C64) -> Result<C64>;

    fn provenance(&self) -> Provenance;

    /// Whether the underlying measure is known to be positive.
    fn is_positive(&self) -> bool {
        true
    }

    /// Values on the tensor grid `zs × ws`, row-major in `zs`.
    ///
    /// Implementations with expensive per-coordinate work override this to share it.
    fn eval_tensor(&self, zs: &[C64], ws: &[C64]) -> Result<Vec<C64>> {
        let rows: Vec<Vec<C64>> = zs
            .par_iter()
            .map(|&z| ws.iter().map(|&w| self.eval(z, w)).collect::<Result<Vec<_>>>())
            .collect::<Result<_>>()?;
        Ok(rows.into_iter().flatten().collect())
    }
}

/// A one-variable Cauchy transform with its derivative.
pub trait CauchyTransform1D: Sync {
    fn eval(&self, z: C64) -> Result<C64>;

    fn derivative(&self, z: C64) -> Result<C64>;

    fn provenance(&self) -> Provenance;

    fn eval_with_derivative(&self, z: C64) -> Result<(C64, C64)> {
        Ok((self.eval(z)?, self.derivative(z)?))
    }
}

impl CauchyTransform2D for Measure2D {
    fn eval(&self, z: C64, w: C64) -> Result<C64> {
        g2(self, z, w)
    }

    fn provenance(&self) -> Provenance {
        Provenance::FromMeasure
    }
}

impl CauchyTransform2D for SignedMeasure2D {
    fn eval(&self, z: C64, w: C64) -> Result<C64> {
        g2(self, z, w)
    }

    fn provenance(&self) -> Provenance {
        Provenance::FromMeasure
    }

    fn is_positive(&self) -> bool {
        false
    }
}

impl CauchyTransform1D for Measure1D {
    fn eval(&self, z: C64) -> Result<C64> {
        g1(self, z)
    }

    fn derivative(&self, z: C64) -> Result<C64> {
        off_axis(z, "z")?;
        Ok(g1_with_derivative(self, z).1)
    }

    fn provenance(&self) -> Provenance {
        Provenance::FromMeasure
    }

    fn eval_with_derivative(&self, z: C64) -> Result<(C64, C64)> {
        off_axis(z, "z")?;
        Ok(g1_with_derivative(self, z))
    }
}

/// Standard semicircle law on `[-2, 2]`.
#[derive(Clone, Copy, Debug, Default)]
pub struct Semicircle;

impl Semicircle {
    /// `(λ − √(λ−2)·√(λ+2)) / 2`, the branch with `Im G < 0` on the upper half-plane,
    /// evaluated as `2 / (λ + √(λ−2)·√(λ+2))` to avoid cancellation at large `|λ|`.
    pub fn g(z: C64) -> C64 {
        2.0 / (z + (z - 2.0).sqrt() * (z + 2.0).sqrt())
    }

    pub fn density(x: f64) -> f64 {
        if x.abs() >= 2.0 {
            0.0
        } else {
            (4.0 - x * x).sqrt() / (2.0 * PI)
        }
    }
}

impl CauchyTransform1D for Semicircle {
    fn eval(&self, z: C64) -> Result<C64> {
        off_axis(z, "z")?;
        Ok(Semicircle::g(z))
    }

    fn derivative(&self, z: C64) -> Result<C64> {
        off_axis(z, "z")?;
        let root = (z - 2.0).sqrt() * (z + 2.0).sqrt();
        Ok((1.0 - z / root) * 0.5)
    }

    fn provenance(&self) -> Provenance {
        Provenance::ClosedForm
    }
}

/// Adapter turning a closure into a 2-D evaluator.
pub struct FnTransform2D<F> {
    f: F,
    provenance: Provenance,
    positive: bool,
}

impl<F> FnTransform2D<F>
where
    F: Fn(C64, C64) -> Result<C64> + Sync,
{
    pub fn new(f: F, provenance: Provenance) -> Self {
        FnTransform2D {
            f,
            provenance,
            positive: true,
        }
    }

    pub fn signed(mut self) -> Self {
        self.positive = false;
        self
    }
}

impl<F> CauchyTransform2D for FnTransform2D<F>
where
    F: Fn(C64, C64) -> Result<C64> + Sync,
{
    fn eval(&self, z: C64, w: C64) -> Result<C64> {
        off_axis(z, "z")?;
        off_axis(w, "w")?;
        (self.f)(z, w)
    }

    fn provenance(&self) -> Provenance {
        self.provenance
    }

    fn is_positive(&self) -> bool {
        self.positive
    }
}

/// Rectangular grid plus the smoothing height used for inversion.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    pub x_range: (f64, f64),
    pub u_range: (f64, f64),
    pub n_x: usize,
    pub n_u: usize,
    pub y: f64,
}

impl GridSpec {
    pub fn square(lo: f64, hi: f64, n: usize, y: f64) -> Self {
        GridSpec {
            x_range: (lo, hi),
            u_range: (lo, hi),
            n_x: n,
            n_u: n,
            y,
        }
    }

    /// 101×101 grid over `[-rx, rx] × [-ru, ru]` (shifted by `center`) inflated by `3y`.
    pub fn around(center: (f64, f64), rx: f64, ru: f64, y: f64) -> Self {
        let pad = 3.0 * y;
        GridSpec {
            x_range: (center.0 - rx - pad, center.0 + rx + pad),
            u_range: (center.1 - ru - pad, center.1 + ru + pad),
            n_x: 101,
            n_u: 101,
            y,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.y > 0.0) || !self.y.is_finite() {
            return Err(Error::invalid(format!("smoothing y = {} must be positive", self.y)));
        }
        if self.n_x < 2 || self.n_u < 2 {
            return Err(Error::invalid("grid needs at least 2 points per axis"));
        }
        for (lo, hi) in [self.x_range, self.u_range] {
            if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
                return Err(Error::invalid(format!("bad grid range [{lo}, {hi}]")));
            }
        }
        Ok(())
    }

    pub fn xs(&self) -> Vec<f64> {
        linspace(self.x_range.0, self.x_range.1, self.n_x)
    }

    pub fn us(&self) -> Vec<f64> {
        linspace(self.u_range.0, self.u_range.1, self.n_u)
    }
}

pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let h = (hi - lo) / (n - 1) as f64;
    (0..n).map(|i| lo + h * i as f64).collect()
}

/// Density values on a uniform grid, row-major with `x` as the slow index.
#[derive(Clone, Debug, PartialEq)]
pub struct GridDensity2D {
    pub xs: Vec<f64>,
    pub us: Vec<f64>,
    pub values: Vec<f64>,
    pub y: f64,
    pub clamped: bool,
}

impl GridDensity2D {
    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.us.len() + j]
    }

    pub fn dx(&self) -> f64 {
        self.xs[1] - self.xs[0]
    }

    pub fn du(&self) -> f64 {
        self.us[1] - self.us[0]
    }

    /// Riemann sum `Σ f sᵐ tⁿ dx du` over all grid points.
    pub fn moment(&self, m: i32, n: i32) -> f64 {
        let mut acc = 0.0;
        for (i, &x) in self.xs.iter().enumerate() {
            let xm = x.powi(m);
            let row = &self.values[i * self.us.len()..(i + 1) * self.us.len()];
            acc += xm * row.iter().zip(&self.us).map(|(v, &u)| v * u.powi(n)).sum::<f64>();
        }
        acc * self.dx() * self.du()
    }

    pub fn mass(&self) -> f64 {
        self.moment(0, 0)
    }

    /// Centroid `(E s, E t)` of the grid mass.
    pub fn centroid(&self) -> (f64, f64) {
        let m = self.mass();
        (self.moment(1, 0) / m, self.moment(0, 1) / m)
    }

    /// Largest `|f − g|` against a reference density evaluated at grid points.
    pub fn sup_error(&self, reference: impl Fn(f64, f64) -> f64) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, &x) in self.xs.iter().enumerate() {
            for (j, &u) in self.us.iter().enumerate() {
                worst = worst.max((self.value(i, j) - reference(x, u)).abs());
            }
        }
        worst
    }

    /// CSV with header `x,u,density`, 17 significant digits.
    pub fn write_csv(&self, mut out: impl Write) -> io::Result<()> {
        writeln!(out, "x,u,density")?;
        for (i, &x) in self.xs.iter().enumerate() {
            for (j, &u) in self.us.iter().enumerate() {
                writeln!(out, "{:.16e},{:.16e},{:.16e}", x + 0.0, u + 0.0, self.value(i, j) + 0.0)?;
            }
        }
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("csv is ascii")
    }
}

/// Poisson-smoothed density of the measure behind `g` on the grid of `spec`.
///
/// Values are `−Re[G(x+iy, u+iy) − G(x+iy, u−iy)] / (2π²)`, clamped at zero when
/// `g` reports a positive measure.
pub fn invert2d(g: &(impl CauchyTransform2D + ?Sized), spec: &GridSpec) -> Result<GridDensity2D> {
    spec.validate()?;
    let xs = spec.xs();
    let us = spec.us();
    let y = spec.y;
    let zs: Vec<C64> = xs.iter().map(|&x| C64::new(x, y)).collect();
    let ws: Vec<C64> = us
        .iter()
        .map(|&u| C64::new(u, y))
        .chain(us.iter().map(|&u| C64::new(u, -y)))
        .collect();
    let vals = g.eval_tensor(&zs, &ws)?;
    let nu = us.len();
    let clamp = g.is_positive();
    let scale = 1.0 / (2.0 * PI * PI);
    let mut values = Vec::with_capacity(xs.len() * nu);
    for i in 0..xs.len() {
        let row = &vals[i * 2 * nu..(i + 1) * 2 * nu];
        for j in 0..nu {
            let v = -(row[j] - row[nu + j]).re * scale;
            values.push(if clamp { v.max(0.0) } else { v });
        }
    }
    Ok(GridDensity2D {
        xs,
        us,
        values,
        y,
        clamped: clamp,
    })
}

/// `λ·G(z, λ)` (axis 1) or `λ·G(λ, z)` (axis 2) with `λ = iM`.
pub fn marginal_g_limit(g: &(impl CauchyTransform2D + ?Sized), z: C64, axis: Axis, m: f64) -> Result<C64> {
    if !(m >= 10.0) || !m.is_finite() {
        return Err(Error::invalid(format!("M = {m} must be at least 10")));
    }
    off_axis(z, "z")?;
    let lam = C64::new(0.0, m);
    Ok(match axis {
        Axis::First => lam * g.eval(z, lam)?,
        Axis::Second => lam * g.eval(lam, z)?,
    })
}

/// One-dimensional density on a uniform grid.
#[derive(Clone, Debug, PartialEq)]
pub struct GridDensity1D {
    pub xs: Vec<f64>,
    pub values: Vec<f64>,
    pub y: f64,
}

impl GridDensity1D {
    pub fn moment(&self, k: i32) -> f64 {
        let h = self.xs[1] - self.xs[0];
        self.xs
            .iter()
            .zip(&self.values)
            .map(|(&x, &v)| v * x.powi(k))
            .sum::<f64>()
            * h
    }

    /// Linear interpolation at `x` (clamped to the grid).
    pub fn at(&self, x: f64) -> f64 {
        let n = self.xs.len();
        let h = self.xs[1] - self.xs[0];
        let pos = ((x - self.xs[0]) / h).clamp(0.0, (n - 1) as f64);
        let i = (pos.floor() as usize).min(n - 2);
        let frac = pos - i as f64;
        self.values[i] * (1.0 - frac) + self.values[i + 1] * frac
    }

    pub fn write_csv(&self, mut out: impl Write) -> io::Result<()> {
        writeln!(out, "x,density")?;
        for (x, v) in self.xs.iter().zip(&self.values) {
            writeln!(out, "{:.16e},{:.16e}", x + 0.0, v + 0.0)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn close(a: C64, b: C64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn g2_examples() {
        let d = Measure2D::dirac(1.0, 2.0);
        let v = g2(&d, c(0.0, 1.0), c(0.0, 2.0)).unwrap();
        let expect = 1.0 / ((c(0.0, 1.0) - 1.0) * (c(0.0, 2.0) - 2.0));
        assert!(close(v, expect, 1e-15));
        assert!(close(v, c(0.0, 0.25), 1e-15));

        let z = c(0.3, -1.2);
        let w = c(-2.0, 0.7);
        let o = Measure2D::dirac(0.0, 0.0);
        assert!(close(g2(&o, z, w).unwrap(), 1.0 / (z * w), 1e-15));

        let two = Measure2D::new([(1.0, 0.0, 0.5), (-1.0, 0.0, 0.5)]).unwrap();
        let i = c(0.0, 1.0);
        let expect = 0.5 * (1.0 / ((i - 1.0) * i) + 1.0 / ((i + 1.0) * i));
        assert!(close(g2(&two, i, i).unwrap(), expect, 1e-15));
        assert!(close(expect, c(-0.5, 0.0), 1e-15));

        assert!(matches!(g2(&o, c(1.0, 0.0), w), Err(Error::Domain(_))));
        assert!(matches!(g2(&o, z, c(1.0, 0.0)), Err(Error::Domain(_))));
    }

    #[test]
    fn g1_examples() {
        assert!(close(
            g1(&Measure1D::dirac(0.0), c(0.0, 1.0)).unwrap(),
            c(0.0, -1.0),
            1e-15
        ));
        let z = c(0.4, 0.9);
        assert!(close(g1(&Measure1D::dirac(2.5), z).unwrap(), 1.0 / (z - 2.5), 1e-15));
        let b = Measure1D::new([(-1.0, 0.5), (1.0, 0.5)]).unwrap();
        assert!(close(g1(&b, c(0.0, 2.0)).unwrap(), c(0.0, -0.4), 1e-15));
        assert!(g1(&b, c(0.5, 0.0)).is_err());
    }

    #[test]
    fn semicircle_branch_and_derivative() {
        for z in [c(0.0, 1.0), c(1.5, 0.01), c(-3.0, 0.2), c(0.2, -0.5)] {
            let g = Semicircle::g(z);
            assert!(g.im * z.im < 0.0);
            // G solves G² − λG + 1 = 0.
            assert!((g * g - z * g + 1.0).norm() < 1e-13);
            let h = 1e-6;
            let fd = (Semicircle::g(z + h) - Semicircle::g(z - h)) / (2.0 * h);
            assert!(close(Semicircle.derivative(z).unwrap(), fd, 1e-7));
        }
    }

    #[test]
    fn inversion_peak_of_a_point_mass() {
        let d = Measure2D::dirac(1.0, 2.0);
        let spec = GridSpec {
            x_range: (0.0, 2.0),
            u_range: (1.0, 3.0),
            n_x: 21,
            n_u: 21,
            y: 0.1,
        };
        let dens = invert2d(&d, &spec).unwrap();
        let v = dens.value(10, 10);
        assert!((v - 100.0 / (PI * PI)).abs() < 1e-10, "{v}");
    }

    #[test]
    fn inversion_rejects_bad_spec() {
        let d = Measure2D::dirac(0.0, 0.0);
        assert!(invert2d(&d, &GridSpec::square(-1.0, 1.0, 11, 0.0)).is_err());
        assert!(invert2d(&d, &GridSpec::square(-1.0, 1.0, 1, 0.1)).is_err());
    }

    #[test]
    fn inversion_mass_on_a_wide_grid() {
        let mu = Measure2D::new([(0.5, -0.5, 0.3), (-1.0, 0.2, 0.7)]).unwrap();
        let spec = GridSpec::square(-40.0, 40.0, 1601, 0.05);
        let dens = invert2d(&mu, &spec).unwrap();
        assert!((dens.mass() - 1.0).abs() < 0.02, "{}", dens.mass());
    }

    #[test]
    fn product_semicircle_inversion_at_small_y() {
        let g = FnTransform2D::new(|z, w| Ok(Semicircle::g(z) * Semicircle::g(w)), Provenance::ClosedForm);
        let spec = GridSpec::square(-1.5, 1.5, 13, 1e-3);
        let dens = invert2d(&g, &spec).unwrap();
        let err = dens.sup_error(|x, u| Semicircle::density(x) * Semicircle::density(u));
        assert!(err < 1e-3, "{err}");
    }

    #[test]
    fn moments_converge_at_rate_y() {
        // Fixed window, spacing y/2 so the Lorentzian is resolved.
        let mu = Measure2D::new([(0.5, 0.5, 0.5), (-0.5, -0.5, 0.5)]).unwrap();
        let exact = [
            ((0, 0), 1.0),
            ((1, 0), 0.0),
            ((0, 1), 0.0),
            ((2, 0), 0.25),
            ((1, 1), 0.25),
            ((0, 2), 0.25),
        ];
        let mut errs = Vec::new();
        for y in [0.2, 0.1, 0.05] {
            let spec = GridSpec::square(-10.0, 10.0, 801, y);
            let dens = invert2d(&mu, &spec).unwrap();
            let e = exact
                .iter()
                .map(|&((m, n), v)| (dens.moment(m, n) - v).abs())
                .fold(0.0, f64::max);
            errs.push(e);
        }
        assert!(errs[0] > errs[1] && errs[1] > errs[2], "{errs:?}");
        let order = (errs[1] / errs[2]).log2();
        assert!(order > 0.9, "order {order}");
    }

    #[test]
    fn marginal_limit_of_point_masses() {
        let d = Measure2D::dirac(1.0, 2.0);
        let z = c(0.0, 1.0);
        let v = marginal_g_limit(&d, z, Axis::First, 1e4).unwrap();
        assert!((v - 1.0 / (z - 1.0)).norm() <= 1e-3);

        let o = Measure2D::dirac(0.0, 0.0);
        let z = c(0.7, -0.4);
        for axis in [Axis::First, Axis::Second] {
            let v = marginal_g_limit(&o, z, axis, 1e4).unwrap();
            assert!((v - 1.0 / z).norm() < 1e-12);
        }
        assert!(marginal_g_limit(&o, z, Axis::First, 5.0).is_err());
    }

    #[test]
    fn marginal_limit_error_is_first_order() {
        let mu = Measure2D::new([(0.5, 1.0, 0.5), (-1.0, -0.5, 0.5)]).unwrap();
        let z = c(0.3, 0.8);
        let exact = g1(&mu.marginal(Axis::First), z).unwrap();
        let e1 = (marginal_g_limit(&mu, z, Axis::First, 100.0).unwrap() - exact).norm();
        let e2 = (marginal_g_limit(&mu, z, Axis::First, 200.0).unwrap() - exact).norm();
        let order = (e1 / e2).log2();
        assert!(order >= 0.9, "order {order}");
    }

    #[test]
    fn tight_family_normalization() {
        let mu = Measure2D::new([(1.0, 2.0, 0.25), (-2.0, 0.5, 0.75)]).unwrap();
        let z = c(0.0, 1e4);
        let v = z * z * g2(&mu, z, z).unwrap();
        assert!((v - 1.0).norm() <= 1e-3);
    }

    #[test]
    fn csv_format() {
        let d = GridDensity2D {
            xs: vec![0.0, 1.0],
            us: vec![-1.0, 1.0],
            values: vec![1.0, 2.0, 3.0, 4.0],
            y: 0.1,
            clamped: true,
        };
        let csv = d.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "x,u,density");
        assert_eq!(lines.len(), 5);
        assert_eq!(
            lines[2],
            "0.0000000000000000e0,1.0000000000000000e0,2.0000000000000000e0"
        );
    }

    fn arb_measure() -> impl Strategy<Value = Measure2D> {
        prop::collection::vec((-3.0f64..3.0, -3.0f64..3.0, 0.01f64..1.0), 1..6).prop_map(|v| Measure2D::new(v).unwrap())
    }

    fn arb_off_axis() -> impl Strategy<Value = C64> {
        (-3.0f64..3.0, 0.1f64..3.0, any::<bool>()).prop_map(|(re, im, up)| C64::new(re, if up { im } else { -im }))
    }

    proptest! {
        #[test]
        fn conjugation_symmetry(mu in arb_measure(), z in arb_off_axis(), w in arb_off_axis()) {
            let a = g2(&mu, z.conj(), w.conj()).unwrap();
            let b = g2(&mu, z, w).unwrap().conj();
            prop_assert!((a - b).norm() <= 1e-12);
        }

        #[test]
        fn total_variation_bound(mu in arb_measure(), z in arb_off_axis(), w in arb_off_axis()) {
            let v = g2(&mu, z, w).unwrap();
            prop_assert!(v.norm() <= mu.total_variation() / (z.im.abs() * w.im.abs()) * (1.0 + 1e-12));
        }

        #[test]
        fn cauchy_riemann_residual(mu in arb_measure(), re in -3.0f64..3.0, im in 0.5f64..2.0, re2 in -3.0f64..3.0) {
            let z = C64::new(re, im);
            let w = C64::new(re2, -im);
            let h = 1e-5;
            let f = |z, w| g2(&mu, z, w).unwrap();
            let dx = (f(z + h, w) - f(z - h, w)) / (2.0 * h);
            let dy = (f(z + C64::new(0.0, h), w) - f(z - C64::new(0.0, h), w)) / (2.0 * h);
            // holomorphic in z: ∂f/∂y = i ∂f/∂x
            prop_assert!((dy - C64::i() * dx).norm() <= 1e-6);
            let dxw = (f(z, w + h) - f(z, w - h)) / (2.0 * h);
            let dyw = (f(z, w + C64::new(0.0, h)) - f(z, w - C64::new(0.0, h))) / (2.0 * h);
            prop_assert!((dyw - C64::i() * dxw).norm() <= 1e-6);
        }
    }
}
