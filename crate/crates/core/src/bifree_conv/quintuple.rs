use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::measure::{Measure2D, PlanarMeasure, SignedMeasure2D};

/// Residual tolerance for atomwise constraint checks.
pub const CONSTRAINT_TOL: f64 = 1e-9;

/// Lévy-Khintchine data `(γ₁, γ₂, ρ₁, ρ₂, ρ)` in the general (bounded-kernel) form.
#[derive(Clone, Debug, PartialEq)]
pub struct LKQuintupleGeneral {
    pub gamma: [f64; 2],
    pub rho1: Measure2D,
    pub rho2: Measure2D,
    pub rho: SignedMeasure2D,
}

/// Lévy-Khintchine data `(κ₁₀, κ₀₁, ρ′₁, ρ′₂, ρ′)` in the compact-support form.
#[derive(Clone, Debug, PartialEq)]
pub struct LKTripleCompact {
    pub kappa: [f64; 2],
    pub rho1: Measure2D,
    pub rho2: Measure2D,
    pub rho: SignedMeasure2D,
}

#[inline]
fn root1p(x: f64) -> f64 {
    (1.0 + x * x).sqrt()
}

fn pole_free(z: C64, x: f64, s: f64, t: f64) -> Result<C64> {
    let d = 1.0 - z * x;
    if d.norm() <= 1e-14 {
        return Err(Error::Pole(format!("({s}, {t}) with argument {z}")));
    }
    Ok(d)
}

impl LKQuintupleGeneral {
    pub fn new(gamma: [f64; 2], rho1: Measure2D, rho2: Measure2D, rho: SignedMeasure2D) -> Result<Self> {
        if !gamma.iter().all(|g| g.is_finite()) {
            return Err(Error::invalid("γ must be finite"));
        }
        Ok(LKQuintupleGeneral { gamma, rho1, rho2, rho })
    }

    /// The law `δ_(0,0)`.
    pub fn zero() -> Self {
        LKQuintupleGeneral {
            gamma: [0.0, 0.0],
            rho1: Measure2D::zero(),
            rho2: Measure2D::zero(),
            rho: SignedMeasure2D::zero(),
        }
    }

    /// Bi-free Gaussian `(γ₁, γ₂, aδ₀, bδ₀, cδ₀)`. Not validated, so that
    /// inadmissible covariances can be fed to [`lk_validate`].
    pub fn gaussian(gamma1: f64, gamma2: f64, a: f64, b: f64, c: f64) -> Result<Self> {
        if !(a >= 0.0 && b >= 0.0) {
            return Err(Error::invalid("Gaussian variances must be non-negative"));
        }
        Self::new(
            [gamma1, gamma2],
            Measure2D::from_positive([(0.0, 0.0, a)]),
            Measure2D::from_positive([(0.0, 0.0, b)]),
            SignedMeasure2D::new([(0.0, 0.0, c)])?,
        )
    }

    /// Bi-free compound Poisson law with rate `λ` and jump law `jump`.
    pub fn compound_poisson(lambda: f64, jump: &Measure2D) -> Result<Self> {
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::invalid(format!("rate λ = {lambda} must be positive")));
        }
        if !jump.is_probability() {
            return Err(Error::invalid("jump law must be a probability measure"));
        }
        let at = jump.atoms();
        let g1: f64 = at.iter().map(|a| lambda * a.w * a.s / (1.0 + a.s * a.s)).sum();
        let g2: f64 = at.iter().map(|a| lambda * a.w * a.t / (1.0 + a.t * a.t)).sum();
        let rho1 = Measure2D::from_positive(
            at.iter()
                .map(|a| (a.s, a.t, lambda * a.w * a.s * a.s / (1.0 + a.s * a.s))),
        );
        let rho2 = Measure2D::from_positive(
            at.iter()
                .map(|a| (a.s, a.t, lambda * a.w * a.t * a.t / (1.0 + a.t * a.t))),
        );
        let rho = SignedMeasure2D::from_finite(at.iter().map(|a| {
            (
                a.s,
                a.t,
                lambda * a.w * a.s * a.t / ((1.0 + a.s * a.s) * (1.0 + a.t * a.t)).sqrt(),
            )
        }));
        Self::new([g1, g2], rho1, rho2, rho)
    }

    /// Product of two free infinitely divisible laws, one per axis.
    pub fn product(p1: &crate::rtransform1d::FreeLKPair, p2: &crate::rtransform1d::FreeLKPair) -> Result<Self> {
        use crate::measure::LineMeasure;
        Self::new(
            [p1.gamma, p2.gamma],
            Measure2D::from_positive(p1.sigma.atoms().iter().map(|a| (a.x, 0.0, a.w))),
            Measure2D::from_positive(p2.sigma.atoms().iter().map(|a| (0.0, a.x, a.w))),
            SignedMeasure2D::zero(),
        )
    }

    /// Componentwise `t · q`.
    pub fn scaled(&self, t: f64) -> Result<Self> {
        if !(t >= 0.0) || !t.is_finite() {
            return Err(Error::invalid(format!("scale t = {t} must be non-negative")));
        }
        Ok(LKQuintupleGeneral {
            gamma: [t * self.gamma[0], t * self.gamma[1]],
            rho1: self.rho1.scaled(t)?,
            rho2: self.rho2.scaled(t)?,
            rho: self.rho.scaled(t),
        })
    }

    pub fn plus(&self, other: &Self) -> Self {
        LKQuintupleGeneral {
            gamma: [self.gamma[0] + other.gamma[0], self.gamma[1] + other.gamma[1]],
            rho1: self.rho1.add(&other.rho1),
            rho2: self.rho2.add(&other.rho2),
            rho: self.rho.add(&other.rho),
        }
    }

    /// Largest `max(|s|, |t|)` over all three measures.
    pub fn support_radius(&self) -> f64 {
        self.rho1
            .support_radius()
            .max(self.rho2.support_radius())
            .max(self.rho.support_radius())
    }

    /// `D(z, w) = ∫ zw √(1+s²)√(1+t²) / ((1−zs)(1−wt)) dρ`.
    pub fn coupling(&self, z: C64, w: C64) -> Result<C64> {
        let mut acc = C64::new(0.0, 0.0);
        for a in self.rho.atoms() {
            let d1 = pole_free(z, a.s, a.s, a.t)?;
            let d2 = pole_free(w, a.t, a.s, a.t)?;
            acc += a.w * root1p(a.s) * root1p(a.t) / (d1 * d2);
        }
        Ok(acc * z * w)
    }
}

/// `R(z, w)` from the general Lévy-Khintchine formula.
pub fn lk_r_general(q: &LKQuintupleGeneral, z: C64, w: C64) -> Result<C64> {
    let mut acc = q.gamma[0] * z + q.gamma[1] * w;
    for a in q.rho1.atoms() {
        let d = pole_free(z, a.s, a.s, a.t)?;
        acc += a.w * (z * z + z * a.s) / d;
    }
    for a in q.rho2.atoms() {
        let d = pole_free(w, a.t, a.s, a.t)?;
        acc += a.w * (w * w + w * a.t) / d;
    }
    Ok(acc + q.coupling(z, w)?)
}

/// `R(z, w)` from the compact-support Lévy-Khintchine formula.
pub fn lk_r_compact(c: &LKTripleCompact, z: C64, w: C64) -> Result<C64> {
    let mut acc = c.kappa[0] * z + c.kappa[1] * w;
    for a in c.rho1.atoms() {
        acc += a.w * z * z / pole_free(z, a.s, a.s, a.t)?;
    }
    for a in c.rho2.atoms() {
        acc += a.w * w * w / pole_free(w, a.t, a.s, a.t)?;
    }
    for a in c.rho.atoms() {
        acc += a.w * z * w / (pole_free(z, a.s, a.s, a.t)? * pole_free(w, a.t, a.s, a.t)?);
    }
    Ok(acc)
}

/// One failed identity in a validation report.
#[derive(Clone, Debug, PartialEq)]
pub struct Violation {
    pub check: &'static str,
    pub location: Option<(f64, f64)>,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ValidationReport {
    pub checks: usize,
    pub max_residual: f64,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Either parametrization, for [`lk_validate`].
pub enum LkParams<'a> {
    General(&'a LKQuintupleGeneral),
    Compact(&'a LKTripleCompact),
}

impl<'a> From<&'a LKQuintupleGeneral> for LkParams<'a> {
    fn from(q: &'a LKQuintupleGeneral) -> Self {
        LkParams::General(q)
    }
}

impl<'a> From<&'a LKTripleCompact> for LkParams<'a> {
    fn from(c: &'a LKTripleCompact) -> Self {
        LkParams::Compact(c)
    }
}

fn locations(m1: &Measure2D, m2: &Measure2D, m: &SignedMeasure2D) -> Vec<(f64, f64)> {
    let all = SignedMeasure2D::from_finite(
        m1.atoms()
            .iter()
            .chain(m2.atoms())
            .chain(m.atoms())
            .map(|a| (a.s, a.t, 1.0)),
    );
    all.atoms().iter().map(|a| (a.s, a.t)).collect()
}

/// Atomwise check of the admissibility system.
pub fn lk_validate<'a>(params: impl Into<LkParams<'a>>) -> ValidationReport {
    let (rho1, rho2, rho, kernel): (_, _, _, fn(f64) -> f64) = match params.into() {
        LkParams::General(q) => (&q.rho1, &q.rho2, &q.rho, |x| x / root1p(x)),
        LkParams::Compact(c) => (&c.rho1, &c.rho2, &c.rho, |x| x),
    };
    let mut report = ValidationReport {
        checks: 0,
        max_residual: 0.0,
        violations: Vec::new(),
    };
    let mut record = |check: &'static str, location: Option<(f64, f64)>, residual: f64| {
        report.checks += 1;
        report.max_residual = report.max_residual.max(residual);
        if residual > CONSTRAINT_TOL {
            report.violations.push(Violation {
                check,
                location,
                residual,
            });
        }
    };
    for (s, t) in locations(rho1, rho2, rho) {
        let (w1, w2, w) = (rho1.weight_at(s, t), rho2.weight_at(s, t), rho.weight_at(s, t));
        record(
            "t-kernel·rho1 = s-kernel·rho",
            Some((s, t)),
            (kernel(t) * w1 - kernel(s) * w).abs(),
        );
        record(
            "s-kernel·rho2 = t-kernel·rho",
            Some((s, t)),
            (kernel(s) * w2 - kernel(t) * w).abs(),
        );
    }
    let (o1, o2, o) = (
        rho1.weight_at(0.0, 0.0),
        rho2.weight_at(0.0, 0.0),
        rho.weight_at(0.0, 0.0),
    );
    record(
        "|rho(0,0)|² ≤ rho1(0,0)·rho2(0,0)",
        Some((0.0, 0.0)),
        (o * o - o1 * o2).max(0.0),
    );
    report
}

/// `t₁ q₁ + t₂ q₂`, requiring both inputs admissible.
pub fn lambda_combine(
    q1: &LKQuintupleGeneral,
    q2: &LKQuintupleGeneral,
    t1: f64,
    t2: f64,
) -> Result<LKQuintupleGeneral> {
    if !(t1 >= 0.0 && t2 >= 0.0) {
        return Err(Error::invalid(format!("weights ({t1}, {t2}) must be non-negative")));
    }
    for (i, q) in [q1, q2].into_iter().enumerate() {
        let rep = lk_validate(q);
        if !rep.is_valid() {
            return Err(Error::invalid(format!(
                "quintuple {} violates the admissibility system (residual {:.3e})",
                i + 1,
                rep.max_residual
            )));
        }
    }
    let out = q1.scaled(t1)?.plus(&q2.scaled(t2)?);
    let rep = lk_validate(&out);
    if !rep.is_valid() {
        return Err(Error::invalid(format!(
            "combination violates the admissibility system (residual {:.3e})",
            rep.max_residual
        )));
    }
    Ok(out)
}

impl LKTripleCompact {
    pub fn new(kappa: [f64; 2], rho1: Measure2D, rho2: Measure2D, rho: SignedMeasure2D) -> Result<Self> {
        if !kappa.iter().all(|k| k.is_finite()) {
            return Err(Error::invalid("κ must be finite"));
        }
        Ok(LKTripleCompact { kappa, rho1, rho2, rho })
    }

    /// Compact form to general form.
    pub fn to_general(&self) -> LKQuintupleGeneral {
        let rho1 = Measure2D::from_positive(self.rho1.atoms().iter().map(|a| (a.s, a.t, a.w / (1.0 + a.s * a.s))));
        let rho2 = Measure2D::from_positive(self.rho2.atoms().iter().map(|a| (a.s, a.t, a.w / (1.0 + a.t * a.t))));
        let rho = SignedMeasure2D::from_finite(
            self.rho
                .atoms()
                .iter()
                .map(|a| (a.s, a.t, a.w / (root1p(a.s) * root1p(a.t)))),
        );
        let g1 = self.kappa[0] - rho1.atoms().iter().map(|a| a.w * a.s).sum::<f64>();
        let g2 = self.kappa[1] - rho2.atoms().iter().map(|a| a.w * a.t).sum::<f64>();
        LKQuintupleGeneral {
            gamma: [g1, g2],
            rho1,
            rho2,
            rho,
        }
    }
}

impl LKQuintupleGeneral {
    /// General form to compact form; atomic data always has compact support.
    pub fn to_compact(&self) -> LKTripleCompact {
        let k1 = self.gamma[0] + self.rho1.atoms().iter().map(|a| a.w * a.s).sum::<f64>();
        let k2 = self.gamma[1] + self.rho2.atoms().iter().map(|a| a.w * a.t).sum::<f64>();
        LKTripleCompact {
            kappa: [k1, k2],
            rho1: Measure2D::from_positive(self.rho1.atoms().iter().map(|a| (a.s, a.t, a.w * (1.0 + a.s * a.s)))),
            rho2: Measure2D::from_positive(self.rho2.atoms().iter().map(|a| (a.s, a.t, a.w * (1.0 + a.t * a.t)))),
            rho: SignedMeasure2D::from_finite(
                self.rho
                    .atoms()
                    .iter()
                    .map(|a| (a.s, a.t, a.w * root1p(a.s) * root1p(a.t))),
            ),
        }
    }
}

/// Both directions of the substitution between the two parametrizations.
pub fn lk_convert(c: &LKTripleCompact) -> LKQuintupleGeneral {
    c.to_general()
}
