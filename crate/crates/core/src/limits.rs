//! Finite-n diagnostics for bi-free limit theorems: triangular arrays, the
//! D-functional, convergence reports, the functional equation and the
//! infinitesimal derivative probe.

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::bifree_conv::{compound_poisson_r, lk_decompose, BifreeLaw, GaussianClosedForm, LKQuintupleGeneral};
use crate::bifree_r::{MeasureR, OmegaDomain, PartialRTransform};
use crate::error::{Error, Result};
use crate::measure::{weight_transform, Axis, LineMeasure, Measure2D, PlanarMeasure, SignedMeasure2D, WeightKernel};
use crate::transform2d::{invert2d, CauchyTransform1D, CauchyTransform2D, GridSpec};

/// Moments of `ρ_n` reported per row, in this order.
pub const RHO_MOMENTS: [(u32, u32); 6] = [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)];

/// Radius used for the infinitesimality column.
pub const TAIL_RADIUS: f64 = 0.1;

/// `k Σ wᵢ zw sᵢtᵢ / ((1 − z sᵢ)(1 − w tᵢ))`.
pub fn d_functional(mu: &impl PlanarMeasure, k: f64, z: C64, w: C64) -> Result<C64> {
    let mut acc = C64::new(0.0, 0.0);
    for a in mu.atoms() {
        let (d1, d2) = (1.0 - z * a.s, 1.0 - w * a.t);
        if d1.norm() <= 1e-14 || d2.norm() <= 1e-14 {
            return Err(Error::Pole(format!("({}, {}) with arguments ({z}, {w})", a.s, a.t)));
        }
        acc += a.w * a.s * a.t / (d1 * d2);
    }
    Ok(k * z * w * acc)
}

/// Law of `(√((1+c)/2n) Z₁ − √((1−c)/2n) Z₂, √((1+c)/2n) Z₁ + √((1−c)/2n) Z₂)`
/// for independent signs `Z₁, Z₂`.
pub fn clt_sequence(c: f64, n: u64) -> Result<Measure2D> {
    if !(c.abs() <= 1.0) {
        return Err(Error::invalid(format!("correlation c = {c} must lie in [-1, 1]")));
    }
    if n == 0 {
        return Err(Error::invalid("n must be at least 1"));
    }
    let p = ((1.0 + c) / (2.0 * n as f64)).sqrt();
    let q = ((1.0 - c) / (2.0 * n as f64)).sqrt();
    let mut atoms = Vec::with_capacity(4);
    for z1 in [-1.0, 1.0] {
        for z2 in [-1.0, 1.0] {
            atoms.push((p * z1 - q * z2, p * z1 + q * z2, 0.25));
        }
    }
    Measure2D::new(atoms)
}

/// `(1 − λ/n) δ₀ + (λ/n) jump`.
pub fn poisson_sequence(lambda: f64, jump: &Measure2D, n: u64) -> Result<Measure2D> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::invalid(format!("rate λ = {lambda} must be positive")));
    }
    if !((n as f64) > lambda) {
        return Err(Error::invalid(format!("n = {n} must exceed λ = {lambda}")));
    }
    if !jump.is_probability() {
        return Err(Error::invalid("jump law must be a probability measure"));
    }
    let p = lambda / n as f64;
    Ok(Measure2D::dirac(0.0, 0.0).scaled(1.0 - p)?.add(&jump.scaled(p)?))
}

/// Rows `μ_n` with scaling constants `k_n`, optionally with a known limit.
pub trait TriangularArray: Sync {
    fn row(&self, n: u64) -> Result<Measure2D>;

    fn k(&self, n: u64) -> f64 {
        n as f64
    }

    /// Lévy-Khintchine data of the limit law, when known.
    fn limit(&self) -> Option<LKQuintupleGeneral> {
        None
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CltArray {
    pub c: f64,
}

impl TriangularArray for CltArray {
    fn row(&self, n: u64) -> Result<Measure2D> {
        clt_sequence(self.c, n)
    }

    fn limit(&self) -> Option<LKQuintupleGeneral> {
        LKQuintupleGeneral::gaussian(0.0, 0.0, 1.0, 1.0, self.c).ok()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PoissonArray {
    pub lambda: f64,
    pub jump: Measure2D,
}

impl TriangularArray for PoissonArray {
    fn row(&self, n: u64) -> Result<Measure2D> {
        poisson_sequence(self.lambda, &self.jump, n)
    }

    fn limit(&self) -> Option<LKQuintupleGeneral> {
        LKQuintupleGeneral::compound_poisson(self.lambda, &self.jump).ok()
    }
}

/// Array given by closures.
pub struct FnArray<R, K> {
    pub row: R,
    pub k: K,
    pub limit: Option<LKQuintupleGeneral>,
}

impl<R, K> TriangularArray for FnArray<R, K>
where
    R: Fn(u64) -> Result<Measure2D> + Sync,
    K: Fn(u64) -> f64 + Sync,
{
    fn row(&self, n: u64) -> Result<Measure2D> {
        (self.row)(n)
    }

    fn k(&self, n: u64) -> f64 {
        (self.k)(n)
    }

    fn limit(&self) -> Option<LKQuintupleGeneral> {
        self.limit.clone()
    }
}

/// The nine points `{−0.1i, −0.05i, 0.05−0.05i}²`.
pub fn default_probes() -> Vec<(C64, C64)> {
    let pts = [C64::new(0.0, -0.1), C64::new(0.0, -0.05), C64::new(0.05, -0.05)];
    pts.iter().flat_map(|&z| pts.iter().map(move |&w| (z, w))).collect()
}

/// Diagnostics for one row of the array.
#[derive(Clone, Debug, PartialEq)]
pub struct LimitRow {
    pub n: u64,
    pub k: f64,
    /// `k_n R_{μ_n}` per probe; `None` where the evaluation failed.
    pub scaled_r: Vec<Option<C64>>,
    pub d: Vec<C64>,
    /// Moments of `ρ_n` in the order of [`RHO_MOMENTS`].
    pub rho_moments: [f64; 6],
    /// `γ_{jn} = k_n ∫ x/(1+x²) dμ_n^{(j)}`.
    pub gamma: [f64; 2],
    /// Total masses of `σ_{jn}`.
    pub sigma_mass: [f64; 2],
    pub tail_mass: f64,
    /// `max |k_n R_{μ_n} − R_{ν_{k_n, μ_n}}|` over the probes.
    pub accompaniment: f64,
    /// `max |k_n (R − zR₁ − wR₂) − D_n|` over the probes.
    pub cross_rd: f64,
    /// `max |D_n − zw Σ (moment expansion of ρ_n)|` over the probes.
    pub cross_d_rho: f64,
    pub outside_domain: Vec<bool>,
    pub failures: Vec<String>,
}

/// Three numbers, one per convergence indicator (scaled R, D-functional, ρ moments).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Indicators<T> {
    pub r: T,
    pub d: T,
    pub rho: T,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LimitReport {
    pub probes: Vec<(C64, C64)>,
    pub rows: Vec<LimitRow>,
    /// Distances between consecutive rows, one entry per consecutive pair.
    pub cauchy: Vec<Indicators<f64>>,
    /// Distances to the known limit, one entry per row.
    pub reference_error: Option<Vec<Indicators<f64>>>,
    /// Fitted power of `n` in the error decay.
    pub order: Indicators<Option<f64>>,
    /// First-order Richardson extrapolation from the last two rows.
    pub extrapolated_r: Vec<Option<C64>>,
    pub extrapolated_d: Vec<C64>,
    pub extrapolated_rho: [f64; 6],
    pub converged: Indicators<bool>,
    /// Set when the indicators disagree about convergence.
    pub equivalence_violation: bool,
}

/// Tolerance for declaring an indicator numerically stable.
pub const STABILITY_TOL: f64 = 1e-2;

fn rho_row(mu: &Measure2D, k: f64) -> Result<(SignedMeasure2D, [f64; 6])> {
    let rho = weight_transform(mu, WeightKernel::Rho, k)?
        .measure()
        .expect("kernel yields a measure");
    let mut m = [0.0; 6];
    for (slot, &(a, b)) in m.iter_mut().zip(RHO_MOMENTS.iter()) {
        *slot = rho.moment(a, b)?;
    }
    Ok((rho, m))
}

fn moment_expansion(m: &[f64; 6], z: C64, w: C64) -> C64 {
    z * w * (m[0] + z * m[1] + w * m[2] + (z * z + 0.5) * m[3] + z * w * m[4] + (w * w + 0.5) * m[5])
}

fn evaluate_row(array: &(impl TriangularArray + ?Sized), n: u64, probes: &[(C64, C64)]) -> Result<LimitRow> {
    let mu = array.row(n)?;
    if !mu.is_probability() {
        return Err(Error::invalid(format!("row {n} is not a probability law")));
    }
    let k = array.k(n);
    let rt = MeasureR::new(mu.clone())?;
    let domain = OmegaDomain::for_measure(&mu);
    let (_, rho_moments) = rho_row(&mu, k)?;
    let scalar = |kern| -> Result<f64> { Ok(weight_transform(&mu, kern, k)?.scalar().unwrap_or(0.0)) };
    let mass = |kern| -> Result<f64> {
        Ok(weight_transform(&mu, kern, k)?
            .measure()
            .map(|m| m.mass())
            .unwrap_or(0.0))
    };
    let mut row = LimitRow {
        n,
        k,
        scaled_r: Vec::with_capacity(probes.len()),
        d: Vec::with_capacity(probes.len()),
        rho_moments,
        gamma: [scalar(WeightKernel::Gamma1)?, scalar(WeightKernel::Gamma2)?],
        sigma_mass: [mass(WeightKernel::Sigma1)?, mass(WeightKernel::Sigma2)?],
        tail_mass: mu.tail_mass(TAIL_RADIUS)?,
        accompaniment: 0.0,
        cross_rd: 0.0,
        cross_d_rho: 0.0,
        outside_domain: Vec::with_capacity(probes.len()),
        failures: Vec::new(),
    };
    for &(z, w) in probes {
        row.outside_domain.push(!domain.contains(z, w));
        let d = d_functional(&mu, k, z, w)?;
        row.d.push(d);
        row.cross_d_rho = row.cross_d_rho.max((d - moment_expansion(&rho_moments, z, w)).norm());
        let r = (|| -> Result<(C64, C64)> {
            let r = rt.eval(z, w)?;
            let coupling = r - z * rt.marginal(Axis::First, z)? - w * rt.marginal(Axis::Second, w)?;
            Ok((k * r, k * coupling))
        })();
        match r {
            Ok((kr, kc)) => {
                row.scaled_r.push(Some(kr));
                row.cross_rd = row.cross_rd.max((kc - d).norm());
                let cp = compound_poisson_r(k, &mu, z, w)?;
                row.accompaniment = row.accompaniment.max((kr - cp).norm());
            }
            Err(e) => {
                row.scaled_r.push(None);
                row.failures.push(format!("probe ({z}, {w}): {e}"));
            }
        }
    }
    Ok(row)
}

fn max_diff_opt(a: &[Option<C64>], b: &[Option<C64>]) -> f64 {
    a.iter()
        .zip(b)
        .filter_map(|(x, y)| Some((x.as_ref()? - y.as_ref()?).norm()))
        .fold(0.0, f64::max)
}

fn max_diff(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn max_diff_real(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Least-squares slope of `−log e` against `log n`, ignoring exact zeros.
pub fn fitted_order(ns: &[f64], errs: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = ns
        .iter()
        .zip(errs)
        .filter(|(_, e)| **e > 0.0 && e.is_finite())
        .map(|(n, e)| (n.ln(), -e.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let m = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), p| (a + p.0, b + p.1));
    let (mx, my) = (sx / m, sy / m);
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

fn richardson(n1: f64, a1: C64, n2: f64, a2: C64) -> C64 {
    (n2 * a2 - n1 * a1) / (n2 - n1)
}

/// Runs `array` through the rows in `ns` (strictly increasing) and reports
/// convergence of the three equivalent indicators on `probes`.
pub fn check_limit_theorem(
    array: &(impl TriangularArray + ?Sized),
    probes: &[(C64, C64)],
    ns: &[u64],
) -> Result<LimitReport> {
    if ns.is_empty() || ns.windows(2).any(|p| p[0] >= p[1]) {
        return Err(Error::invalid("n-list must be non-empty and strictly increasing"));
    }
    if probes.is_empty() {
        return Err(Error::invalid("probe grid is empty"));
    }
    let rows: Vec<LimitRow> = ns
        .par_iter()
        .map(|&n| evaluate_row(array, n, probes).map_err(|e| e.at_stage("array row")))
        .collect::<Result<_>>()?;

    let cauchy: Vec<Indicators<f64>> = rows
        .windows(2)
        .map(|p| Indicators {
            r: max_diff_opt(&p[0].scaled_r, &p[1].scaled_r),
            d: max_diff(&p[0].d, &p[1].d),
            rho: max_diff_real(&p[0].rho_moments, &p[1].rho_moments),
        })
        .collect();

    let reference_error = match array.limit() {
        Some(q) => {
            let r_lim: Vec<C64> = probes
                .iter()
                .map(|&(z, w)| crate::bifree_conv::lk_r_general(&q, z, w))
                .collect::<Result<_>>()?;
            let d_lim: Vec<C64> = probes.iter().map(|&(z, w)| q.coupling(z, w)).collect::<Result<_>>()?;
            let mut rho_lim = [0.0; 6];
            for (slot, &(a, b)) in rho_lim.iter_mut().zip(RHO_MOMENTS.iter()) {
                *slot = q.rho.moment(a, b)?;
            }
            let r_lim: Vec<Option<C64>> = r_lim.into_iter().map(Some).collect();
            Some(
                rows.iter()
                    .map(|row| Indicators {
                        r: max_diff_opt(&row.scaled_r, &r_lim),
                        d: max_diff(&row.d, &d_lim),
                        rho: max_diff_real(&row.rho_moments, &rho_lim),
                    })
                    .collect::<Vec<_>>(),
            )
        }
        None => None,
    };

    let nsf: Vec<f64> = ns.iter().map(|&n| n as f64).collect();
    let order = match &reference_error {
        Some(errs) => Indicators {
            r: fitted_order(&nsf, &errs.iter().map(|e| e.r).collect::<Vec<_>>()),
            d: fitted_order(&nsf, &errs.iter().map(|e| e.d).collect::<Vec<_>>()),
            rho: fitted_order(&nsf, &errs.iter().map(|e| e.rho).collect::<Vec<_>>()),
        },
        None => {
            let mid = &nsf[..nsf.len().saturating_sub(1)];
            Indicators {
                r: fitted_order(mid, &cauchy.iter().map(|e| e.r).collect::<Vec<_>>()),
                d: fitted_order(mid, &cauchy.iter().map(|e| e.d).collect::<Vec<_>>()),
                rho: fitted_order(mid, &cauchy.iter().map(|e| e.rho).collect::<Vec<_>>()),
            }
        }
    };

    let last = rows.last().expect("non-empty");
    let (extrapolated_r, extrapolated_d, extrapolated_rho) = if rows.len() >= 2 {
        let prev = &rows[rows.len() - 2];
        let (n1, n2) = (prev.k, last.k);
        (
            prev.scaled_r
                .iter()
                .zip(&last.scaled_r)
                .map(|(a, b)| Some(richardson(n1, (*a)?, n2, (*b)?)))
                .collect(),
            prev.d
                .iter()
                .zip(&last.d)
                .map(|(a, b)| richardson(n1, *a, n2, *b))
                .collect(),
            std::array::from_fn(|i| richardson(n1, prev.rho_moments[i].into(), n2, last.rho_moments[i].into()).re),
        )
    } else {
        (last.scaled_r.clone(), last.d.clone(), last.rho_moments)
    };

    let stable = |series: &mut dyn Iterator<Item = f64>| -> bool {
        let v: Vec<f64> = series.collect();
        match (v.first(), v.last()) {
            (Some(&first), Some(&lastv)) => lastv <= STABILITY_TOL && lastv <= first,
            _ => false,
        }
    };
    let converged = match &reference_error {
        Some(errs) => Indicators {
            r: stable(&mut errs.iter().map(|e| e.r)),
            d: stable(&mut errs.iter().map(|e| e.d)),
            rho: stable(&mut errs.iter().map(|e| e.rho)),
        },
        None => Indicators {
            r: stable(&mut cauchy.iter().map(|e| e.r)),
            d: stable(&mut cauchy.iter().map(|e| e.d)),
            rho: stable(&mut cauchy.iter().map(|e| e.rho)),
        },
    };
    let equivalence_violation = !(converged.r == converged.d && converged.d == converged.rho);
    Ok(LimitReport {
        probes: probes.to_vec(),
        rows,
        cauchy,
        reference_error,
        order,
        extrapolated_r,
        extrapolated_d,
        extrapolated_rho,
        converged,
        equivalence_violation,
    })
}

/// Residuals of `G(z,w)[1 − D(G₁(z), G₂(w))] = G₁(z) G₂(w)` per probe.
#[derive(Clone, Debug, PartialEq)]
pub struct FunctionalEqReport {
    /// `None` where a marginal Cauchy transform vanished.
    pub residuals: Vec<Option<f64>>,
    pub skipped: Vec<usize>,
    pub max_residual: f64,
}

pub fn verify_functional_eq(
    g: &(impl CauchyTransform2D + ?Sized),
    marginals: [&(dyn CauchyTransform1D + '_); 2],
    rho: &SignedMeasure2D,
    points: &[(C64, C64)],
) -> Result<FunctionalEqReport> {
    let mut report = FunctionalEqReport {
        residuals: Vec::with_capacity(points.len()),
        skipped: Vec::new(),
        max_residual: 0.0,
    };
    for (i, &(z, w)) in points.iter().enumerate() {
        let g1 = marginals[0].eval(z)?;
        let g2 = marginals[1].eval(w)?;
        if g1.norm() < 1e-300 || g2.norm() < 1e-300 {
            report.residuals.push(None);
            report.skipped.push(i);
            continue;
        }
        let coupling =
            LKQuintupleGeneral::new([0.0, 0.0], Measure2D::zero(), Measure2D::zero(), rho.clone())?.coupling(g1, g2)?;
        let res = (g.eval(z, w)? * (1.0 - coupling) - g1 * g2).norm();
        report.max_residual = report.max_residual.max(res);
        report.residuals.push(Some(res));
    }
    Ok(report)
}

/// One `ε` of a [`DerivativeReport`].
#[derive(Clone, Debug, PartialEq)]
pub struct DerivativeRow {
    pub eps: f64,
    /// `(G_ε(1/z, 1/w) − zw) / ε`.
    pub quotient: Option<C64>,
    /// `|quotient − zw R(z, w)|`.
    pub deviation: Option<f64>,
    /// Grid proxies `(∫s² dν_ε, ∫t² dν_ε, ∫st dν_ε) / ε`.
    pub rescaled_moments: Option<[f64; 3]>,
    pub flags: Vec<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DerivativeReport {
    pub z: C64,
    pub w: C64,
    /// `zw R(z, w)`.
    pub target: C64,
    /// Masses of `ρ′₁, ρ′₂, ρ′` from the compact form.
    pub moment_targets: [f64; 3],
    pub rows: Vec<DerivativeRow>,
    /// Fitted power of `ε` in the deviation.
    pub order: Option<f64>,
    pub in_domain: bool,
}

enum EpsLaw {
    Gaussian(GaussianClosedForm),
    General(BifreeLaw),
}

impl EpsLaw {
    fn new(q: &LKQuintupleGeneral, eps: f64) -> Result<Self> {
        let qe = q.scaled(eps)?;
        let d = lk_decompose(&qe)?;
        let (p1, p2) = &d.product;
        if d.poisson.is_none() && p1.sigma.atoms().is_empty() && p2.sigma.atoms().is_empty() {
            let mut g = d.gaussian;
            g.gamma1 = p1.gamma;
            g.gamma2 = p2.gamma;
            Ok(EpsLaw::Gaussian(GaussianClosedForm::new(g)))
        } else {
            Ok(EpsLaw::General(BifreeLaw::lk(qe)?))
        }
    }

    fn g(&self, z: C64, w: C64) -> Result<C64> {
        match self {
            EpsLaw::Gaussian(g) => CauchyTransform2D::eval(g, z, w),
            EpsLaw::General(l) => l.cauchy().eval(z, w),
        }
    }

    fn support(&self) -> f64 {
        match self {
            EpsLaw::Gaussian(g) => PartialRTransform::support_radius(g).unwrap_or(0.0),
            EpsLaw::General(l) => l.support_radius().unwrap_or(0.0),
        }
    }

    fn grid_moments(&self) -> Result<[f64; 3]> {
        let bound = self.support();
        let half = if bound > 0.0 { 3.0 * bound } else { 1.0 };
        let spec = GridSpec::square(-half, half, 601, half / 300.0);
        let grid = match self {
            EpsLaw::Gaussian(g) => invert2d(g, &spec)?,
            EpsLaw::General(l) => invert2d(&l.cauchy(), &spec)?,
        };
        Ok([grid.moment(2, 0), grid.moment(0, 2), grid.moment(1, 1)])
    }
}

/// Difference quotients of `ε ↦ G_{ν_ε}(1/z, 1/w)` at `ε = 0⁺`, where `ν_ε` has
/// R-transform `ε R`, compared with `zw R(z, w)`.
pub fn derivative_probe(q: &LKQuintupleGeneral, eps: &[f64], z: C64, w: C64) -> Result<DerivativeReport> {
    if eps.iter().any(|e| !(*e > 0.0) || !e.is_finite()) {
        return Err(Error::invalid("every ε must be positive and finite"));
    }
    let law = BifreeLaw::lk(q.clone())?;
    let target = z * w * crate::bifree_conv::lk_r_general(q, z, w)?;
    let compact = q.to_compact();
    let moment_targets = [compact.rho1.mass(), compact.rho2.mass(), compact.rho.mass()];
    let rows: Vec<DerivativeRow> = eps
        .par_iter()
        .map(|&e| {
            let mut row = DerivativeRow {
                eps: e,
                quotient: None,
                deviation: None,
                rescaled_moments: None,
                flags: Vec::new(),
            };
            match EpsLaw::new(q, e) {
                Ok(l) => {
                    match l.g(1.0 / z, 1.0 / w) {
                        Ok(g) => {
                            let quot = (g - z * w) / e;
                            row.quotient = Some(quot);
                            row.deviation = Some((quot - target).norm());
                        }
                        Err(err) => row.flags.push(format!("beyond the cutoff: {err}")),
                    }
                    match l.grid_moments() {
                        Ok(m) => row.rescaled_moments = Some(m.map(|v| v / e)),
                        Err(err) => row.flags.push(format!("grid moments: {err}")),
                    }
                }
                Err(err) => row.flags.push(err.to_string()),
            }
            row
        })
        .collect();
    let (xs, ys): (Vec<f64>, Vec<f64>) = rows.iter().filter_map(|r| Some((1.0 / r.eps, r.deviation?))).unzip();
    Ok(DerivativeReport {
        z,
        w,
        target,
        moment_targets,
        order: fitted_order(&xs, &ys),
        in_domain: law.domain().contains(z, w),
        rows,
    })
}
