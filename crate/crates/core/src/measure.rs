//! Finitely atomic measures on the line and in the plane.

use std::collections::HashMap;

use crate::error::{Error, Result};

/// Tolerance used to decide whether a measure has unit mass.
pub const NORMALIZATION_TOL: f64 = 1e-12;

/// Largest total degree accepted by [`PlanarMeasure::moment`].
pub const MAX_MOMENT_DEGREE: u32 = 20;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Atom2 {
    pub s: f64,
    pub t: f64,
    pub w: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Atom1 {
    pub x: f64,
    pub w: f64,
}

/// Coordinate axis of the plane, `First` is the `s` (left) variable.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Axis {
    First,
    Second,
}

impl Axis {
    pub fn from_index(i: u8) -> Result<Axis> {
        match i {
            1 => Ok(Axis::First),
            2 => Ok(Axis::Second),
            _ => Err(Error::invalid(format!("axis must be 1 or 2, got {i}"))),
        }
    }

    pub fn index(self) -> u8 {
        match self {
            Axis::First => 1,
            Axis::Second => 2,
        }
    }

    #[inline]
    pub fn pick(self, s: f64, t: f64) -> f64 {
        match self {
            Axis::First => s,
            Axis::Second => t,
        }
    }
}

// -0.0 and 0.0 must land on the same atom.
#[inline]
fn key(v: f64) -> u64 {
    if v == 0.0 {
        0
    } else {
        v.to_bits()
    }
}

#[inline]
fn canon(v: f64) -> f64 {
    if v == 0.0 {
        0.0
    } else {
        v
    }
}

fn merge2(atoms: impl IntoIterator<Item = (f64, f64, f64)>) -> Vec<Atom2> {
    let mut index: HashMap<(u64, u64), usize> = HashMap::new();
    let mut out: Vec<Atom2> = Vec::new();
    for (s, t, w) in atoms {
        let k = (key(s), key(t));
        match index.get(&k) {
            Some(&i) => out[i].w += w,
            None => {
                index.insert(k, out.len());
                out.push(Atom2 {
                    s: canon(s),
                    t: canon(t),
                    w,
                });
            }
        }
    }
    out.retain(|a| a.w != 0.0);
    out
}

fn merge1(atoms: impl IntoIterator<Item = (f64, f64)>) -> Vec<Atom1> {
    let mut index: HashMap<u64, usize> = HashMap::new();
    let mut out: Vec<Atom1> = Vec::new();
    for (x, w) in atoms {
        match index.get(&key(x)) {
            Some(&i) => out[i].w += w,
            None => {
                index.insert(key(x), out.len());
                out.push(Atom1 { x: canon(x), w });
            }
        }
    }
    out.retain(|a| a.w != 0.0);
    out
}

fn check_finite(vals: &[f64], what: &str) -> Result<()> {
    if vals.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::invalid(format!("non-finite value in {what}")))
    }
}

/// Read access shared by every planar measure representation.
pub trait PlanarMeasure {
    fn atoms(&self) -> &[Atom2];

    fn mass(&self) -> f64 {
        self.atoms().iter().map(|a| a.w).sum()
    }

    fn total_variation(&self) -> f64 {
        self.atoms().iter().map(|a| a.w.abs()).sum()
    }

    /// `max(|s|, |t|)` over the atoms; zero for the zero measure.
    fn support_radius(&self) -> f64 {
        self.atoms()
            .iter()
            .map(|a| a.s.abs().max(a.t.abs()))
            .fold(0.0, f64::max)
    }

    /// `Σ w sᵐ tⁿ`.
    fn moment(&self, m: u32, n: u32) -> Result<f64> {
        if m + n > MAX_MOMENT_DEGREE {
            return Err(Error::invalid(format!(
                "moment degree {} exceeds {MAX_MOMENT_DEGREE}",
                m + n
            )));
        }
        Ok(self
            .atoms()
            .iter()
            .map(|a| a.w * a.s.powi(m as i32) * a.t.powi(n as i32))
            .sum())
    }

    /// `|μ|` of the complement of the square `[-m, m]²`.
    fn tail_mass(&self, m: f64) -> Result<f64> {
        if !(m > 0.0) {
            return Err(Error::invalid("tail radius must be positive"));
        }
        Ok(self
            .atoms()
            .iter()
            .filter(|a| a.s.abs() > m || a.t.abs() > m)
            .map(|a| a.w.abs())
            .sum())
    }
}

pub trait LineMeasure {
    fn atoms(&self) -> &[Atom1];

    fn mass(&self) -> f64 {
        self.atoms().iter().map(|a| a.w).sum()
    }

    fn total_variation(&self) -> f64 {
        self.atoms().iter().map(|a| a.w.abs()).sum()
    }

    fn support_radius(&self) -> f64 {
        self.atoms().iter().map(|a| a.x.abs()).fold(0.0, f64::max)
    }

    fn moment(&self, k: u32) -> Result<f64> {
        if k > MAX_MOMENT_DEGREE {
            return Err(Error::invalid(format!("moment degree {k} exceeds {MAX_MOMENT_DEGREE}")));
        }
        Ok(self.atoms().iter().map(|a| a.w * a.x.powi(k as i32)).sum())
    }
}

/// Positive, finitely atomic planar measure.
#[derive(Clone, Debug, PartialEq)]
pub struct Measure2D {
    atoms: Vec<Atom2>,
    probability: bool,
}

impl Measure2D {
    /// Builds a positive measure, merging atoms that share a location.
    ///
    /// Rejects an empty list, negative weights and non-finite numbers.
    pub fn new(atoms: impl IntoIterator<Item = (f64, f64, f64)>) -> Result<Self> {
        let raw: Vec<(f64, f64, f64)> = atoms.into_iter().collect();
        if raw.is_empty() {
            return Err(Error::invalid("measure needs at least one atom"));
        }
        for &(s, t, w) in &raw {
            check_finite(&[s, t, w], "atom")?;
            if w < 0.0 {
                return Err(Error::invalid(format!("negative weight {w} at ({s}, {t})")));
            }
        }
        Ok(Self::from_merged(merge2(raw)))
    }

    /// The zero measure.
    pub fn zero() -> Self {
        Measure2D {
            atoms: Vec::new(),
            probability: false,
        }
    }

    pub fn dirac(s: f64, t: f64) -> Self {
        Self::from_merged(merge2([(s, t, 1.0)]))
    }

    fn from_merged(atoms: Vec<Atom2>) -> Self {
        let mass: f64 = atoms.iter().map(|a| a.w).sum();
        Measure2D {
            atoms,
            probability: (mass - 1.0).abs() <= NORMALIZATION_TOL,
        }
    }

    /// Caller guarantees non-negative finite weights.
    pub(crate) fn from_positive(atoms: impl IntoIterator<Item = (f64, f64, f64)>) -> Self {
        Self::from_merged(merge2(atoms))
    }

    pub fn is_probability(&self) -> bool {
        self.probability
    }

    pub fn scaled(&self, k: f64) -> Result<Self> {
        if !(k >= 0.0) || !k.is_finite() {
            return Err(Error::invalid(format!("scale factor {k} must be finite and ≥ 0")));
        }
        Ok(Self::from_positive(self.atoms.iter().map(|a| (a.s, a.t, k * a.w))))
    }

    /// Sum of two positive measures.
    pub fn add(&self, other: &Measure2D) -> Self {
        Self::from_positive(self.atoms.iter().chain(other.atoms.iter()).map(|a| (a.s, a.t, a.w)))
    }

    /// Push-forward under the projection onto `axis`.
    pub fn marginal(&self, axis: Axis) -> Measure1D {
        Measure1D::from_positive(self.atoms.iter().map(|a| (axis.pick(a.s, a.t), a.w)))
    }

    pub fn to_signed(&self) -> SignedMeasure2D {
        SignedMeasure2D {
            atoms: self.atoms.clone(),
        }
    }

    /// Restriction to the atoms accepted by `keep`.
    pub fn restrict(&self, keep: impl Fn(f64, f64) -> bool) -> Self {
        Self::from_positive(self.atoms.iter().filter(|a| keep(a.s, a.t)).map(|a| (a.s, a.t, a.w)))
    }

    /// Weight of the atom at `(s, t)`, zero if absent.
    pub fn weight_at(&self, s: f64, t: f64) -> f64 {
        weight_at(&self.atoms, s, t)
    }
}

impl PlanarMeasure for Measure2D {
    fn atoms(&self) -> &[Atom2] {
        &self.atoms
    }
}

fn weight_at(atoms: &[Atom2], s: f64, t: f64) -> f64 {
    atoms
        .iter()
        .find(|a| key(a.s) == key(s) && key(a.t) == key(t))
        .map_or(0.0, |a| a.w)
}

/// Finitely atomic planar measure with real weights of any sign.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SignedMeasure2D {
    atoms: Vec<Atom2>,
}

impl SignedMeasure2D {
    /// Builds a signed measure; atoms whose merged weight is exactly zero are dropped.
    pub fn new(atoms: impl IntoIterator<Item = (f64, f64, f64)>) -> Result<Self> {
        let raw: Vec<(f64, f64, f64)> = atoms.into_iter().collect();
        for &(s, t, w) in &raw {
            check_finite(&[s, t, w], "atom")?;
        }
        Ok(SignedMeasure2D { atoms: merge2(raw) })
    }

    pub fn zero() -> Self {
        SignedMeasure2D { atoms: Vec::new() }
    }

    pub(crate) fn from_finite(atoms: impl IntoIterator<Item = (f64, f64, f64)>) -> Self {
        SignedMeasure2D { atoms: merge2(atoms) }
    }

    pub fn is_zero(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn scaled(&self, k: f64) -> Self {
        Self::from_finite(self.atoms.iter().map(|a| (a.s, a.t, k * a.w)))
    }

    pub fn add(&self, other: &SignedMeasure2D) -> Self {
        Self::from_finite(self.atoms.iter().chain(other.atoms.iter()).map(|a| (a.s, a.t, a.w)))
    }

    pub fn marginal(&self, axis: Axis) -> SignedMeasure1D {
        SignedMeasure1D {
            atoms: merge1(self.atoms.iter().map(|a| (axis.pick(a.s, a.t), a.w))),
        }
    }

    /// Jordan decomposition `(μ⁺, μ⁻)` with `μ = μ⁺ − μ⁻`.
    pub fn jordan(&self) -> (Measure2D, Measure2D) {
        let pos = self.atoms.iter().filter(|a| a.w > 0.0).map(|a| (a.s, a.t, a.w));
        let neg = self.atoms.iter().filter(|a| a.w < 0.0).map(|a| (a.s, a.t, -a.w));
        (Measure2D::from_positive(pos), Measure2D::from_positive(neg))
    }

    /// The measure itself when all weights are non-negative.
    pub fn to_positive(&self) -> Option<Measure2D> {
        if self.atoms.iter().all(|a| a.w >= 0.0) {
            Some(Measure2D::from_positive(self.atoms.iter().map(|a| (a.s, a.t, a.w))))
        } else {
            None
        }
    }

    pub fn restrict(&self, keep: impl Fn(f64, f64) -> bool) -> Self {
        Self::from_finite(self.atoms.iter().filter(|a| keep(a.s, a.t)).map(|a| (a.s, a.t, a.w)))
    }

    pub fn weight_at(&self, s: f64, t: f64) -> f64 {
        weight_at(&self.atoms, s, t)
    }
}

impl PlanarMeasure for SignedMeasure2D {
    fn atoms(&self) -> &[Atom2] {
        &self.atoms
    }
}

impl From<&Measure2D> for SignedMeasure2D {
    fn from(m: &Measure2D) -> Self {
        m.to_signed()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Measure1D {
    atoms: Vec<Atom1>,
    probability: bool,
}

impl Measure1D {
    pub fn new(atoms: impl IntoIterator<Item = (f64, f64)>) -> Result<Self> {
        let raw: Vec<(f64, f64)> = atoms.into_iter().collect();
        if raw.is_empty() {
            return Err(Error::invalid("measure needs at least one atom"));
        }
        for &(x, w) in &raw {
            check_finite(&[x, w], "atom")?;
            if w < 0.0 {
                return Err(Error::invalid(format!("negative weight {w} at {x}")));
            }
        }
        Ok(Self::from_positive(raw))
    }

    pub fn zero() -> Self {
        Measure1D {
            atoms: Vec::new(),
            probability: false,
        }
    }

    pub fn dirac(x: f64) -> Self {
        Self::from_positive([(x, 1.0)])
    }

    pub(crate) fn from_positive(atoms: impl IntoIterator<Item = (f64, f64)>) -> Self {
        let atoms = merge1(atoms);
        let mass: f64 = atoms.iter().map(|a| a.w).sum();
        Measure1D {
            atoms,
            probability: (mass - 1.0).abs() <= NORMALIZATION_TOL,
        }
    }

    pub fn is_probability(&self) -> bool {
        self.probability
    }

    pub fn scaled(&self, k: f64) -> Result<Self> {
        if !(k >= 0.0) || !k.is_finite() {
            return Err(Error::invalid(format!("scale factor {k} must be finite and ≥ 0")));
        }
        Ok(Self::from_positive(self.atoms.iter().map(|a| (a.x, k * a.w))))
    }

    pub fn add(&self, other: &Measure1D) -> Self {
        Self::from_positive(self.atoms.iter().chain(other.atoms.iter()).map(|a| (a.x, a.w)))
    }

    pub fn weight_at(&self, x: f64) -> f64 {
        self.atoms.iter().find(|a| key(a.x) == key(x)).map_or(0.0, |a| a.w)
    }
}

impl LineMeasure for Measure1D {
    fn atoms(&self) -> &[Atom1] {
        &self.atoms
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SignedMeasure1D {
    atoms: Vec<Atom1>,
}

impl SignedMeasure1D {
    pub fn new(atoms: impl IntoIterator<Item = (f64, f64)>) -> Result<Self> {
        let raw: Vec<(f64, f64)> = atoms.into_iter().collect();
        for &(x, w) in &raw {
            check_finite(&[x, w], "atom")?;
        }
        Ok(SignedMeasure1D { atoms: merge1(raw) })
    }

    pub fn jordan(&self) -> (Measure1D, Measure1D) {
        let pos = self.atoms.iter().filter(|a| a.w > 0.0).map(|a| (a.x, a.w));
        let neg = self.atoms.iter().filter(|a| a.w < 0.0).map(|a| (a.x, -a.w));
        (Measure1D::from_positive(pos), Measure1D::from_positive(neg))
    }
}

impl LineMeasure for SignedMeasure1D {
    fn atoms(&self) -> &[Atom1] {
        &self.atoms
    }
}

/// `σ ⊗ τ`: all pairs of atoms with multiplied weights.
pub fn product_measure(sigma: &Measure1D, tau: &Measure1D) -> Measure2D {
    Measure2D::from_positive(
        sigma
            .atoms
            .iter()
            .flat_map(|a| tau.atoms.iter().map(move |b| (a.x, b.x, a.w * b.w))),
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WeightKernel {
    /// `st / (√(1+s²) √(1+t²))`
    Rho,
    /// `s² / (1+s²)`
    Sigma1,
    /// `t² / (1+t²)`
    Sigma2,
    /// `s / (1+s²)`, integrated to a scalar
    Gamma1,
    /// `t / (1+t²)`, integrated to a scalar
    Gamma2,
}

impl WeightKernel {
    #[inline]
    pub fn eval(self, s: f64, t: f64) -> f64 {
        match self {
            WeightKernel::Rho => s * t / ((1.0 + s * s).sqrt() * (1.0 + t * t).sqrt()),
            WeightKernel::Sigma1 => s * s / (1.0 + s * s),
            WeightKernel::Sigma2 => t * t / (1.0 + t * t),
            WeightKernel::Gamma1 => s / (1.0 + s * s),
            WeightKernel::Gamma2 => t / (1.0 + t * t),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Weighted {
    Measure(SignedMeasure2D),
    Scalar(f64),
}

impl Weighted {
    pub fn measure(self) -> Option<SignedMeasure2D> {
        match self {
            Weighted::Measure(m) => Some(m),
            Weighted::Scalar(_) => None,
        }
    }

    pub fn scalar(self) -> Option<f64> {
        match self {
            Weighted::Scalar(v) => Some(v),
            Weighted::Measure(_) => None,
        }
    }
}

/// `k · kernel · dμ`, as a measure for `Rho`/`Sigma*` and as a scalar for `Gamma*`.
pub fn weight_transform(mu: &impl PlanarMeasure, kernel: WeightKernel, k: f64) -> Result<Weighted> {
    if !(k > 0.0) || !k.is_finite() {
        return Err(Error::invalid(format!("scale k = {k} must be positive")));
    }
    let weighted = mu.atoms().iter().map(|a| (a.s, a.t, k * a.w * kernel.eval(a.s, a.t)));
    Ok(match kernel {
        WeightKernel::Gamma1 | WeightKernel::Gamma2 => Weighted::Scalar(weighted.map(|(_, _, w)| w).sum()),
        _ => Weighted::Measure(SignedMeasure2D::from_finite(weighted)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn four_point() -> Measure2D {
        Measure2D::new([(1.0, 0.0, 0.25), (-1.0, 0.0, 0.25), (0.0, 1.0, 0.25), (0.0, -1.0, 0.25)]).unwrap()
    }

    #[test]
    fn point_mass_and_dedup() {
        let d = Measure2D::new([(0.0, 0.0, 1.0)]).unwrap();
        assert_eq!(d.atoms().len(), 1);
        assert_eq!(d.mass(), 1.0);
        assert!(d.is_probability());

        let m = Measure2D::new([(1.0, 1.0, 0.5), (1.0, 1.0, 0.5)]).unwrap();
        assert_eq!(m.atoms(), &[Atom2 { s: 1.0, t: 1.0, w: 1.0 }]);

        let z = Measure2D::new([(0.0, -0.0, 0.5), (-0.0, 0.0, 0.5)]).unwrap();
        assert_eq!(z.atoms().len(), 1);
    }

    #[test]
    fn four_point_law_is_normalized() {
        let m = four_point();
        let total: f64 = m.atoms().iter().map(|a| a.w).sum();
        assert_eq!(total, 1.0);
        assert!(m.is_probability());
    }

    #[test]
    fn constructor_rejects_bad_input() {
        assert!(Measure2D::new([(0.0, 0.0, -0.1)]).is_err());
        assert!(Measure2D::new(Vec::<(f64, f64, f64)>::new()).is_err());
        assert!(Measure2D::new([(f64::NAN, 0.0, 1.0)]).is_err());
        assert!(Measure1D::new([(0.0, f64::INFINITY)]).is_err());
    }

    #[test]
    fn marginals() {
        let d = Measure2D::dirac(1.0, 2.0);
        assert_eq!(d.marginal(Axis::First), Measure1D::dirac(1.0));

        let sigma = Measure1D::new([(-1.0, 0.3), (2.0, 0.7)]).unwrap();
        let tau = Measure1D::new([(0.5, 0.4), (3.0, 0.6)]).unwrap();
        let p = product_measure(&sigma, &tau);
        let m2 = p.marginal(Axis::Second);
        for a in tau.atoms() {
            assert!((m2.weight_at(a.x) - a.w).abs() < 1e-15);
        }

        let m = Measure2D::new([(1.0, 1.0, 0.5), (1.0, -1.0, 0.5)]).unwrap();
        let m1 = m.marginal(Axis::First);
        assert_eq!(m1.atoms(), &[Atom1 { x: 1.0, w: 1.0 }]);
    }

    #[test]
    fn signed_marginal_keeps_sign() {
        let m = SignedMeasure2D::new([(1.0, 2.0, -0.5), (1.0, 3.0, 0.25)]).unwrap();
        let m1 = m.marginal(Axis::First);
        assert_eq!(m1.atoms(), &[Atom1 { x: 1.0, w: -0.25 }]);
    }

    #[test]
    fn moments() {
        let d = Measure2D::dirac(3.0, -2.0);
        assert_eq!(d.moment(1, 1).unwrap(), -6.0);
        let m = Measure2D::new([(1.0, 1.0, 0.5), (-1.0, -1.0, 0.5)]).unwrap();
        assert_eq!(m.moment(1, 1).unwrap(), 1.0);
        assert_eq!(four_point().moment(0, 0).unwrap(), 1.0);
        assert!(m.moment(11, 10).is_err());
    }

    #[test]
    fn weight_transform_examples() {
        let d = Measure2D::dirac(1.0, 1.0);
        let rho = weight_transform(&d, WeightKernel::Rho, 2.0).unwrap().measure().unwrap();
        assert_eq!(rho.atoms().len(), 1);
        assert!((rho.atoms()[0].w - 1.0).abs() < 1e-15);

        let origin = Measure2D::dirac(0.0, 0.0);
        let rho0 = weight_transform(&origin, WeightKernel::Rho, 5.0)
            .unwrap()
            .measure()
            .unwrap();
        assert!(rho0.is_zero());

        let g = weight_transform(&Measure2D::dirac(1.0, 0.0), WeightKernel::Gamma1, 2.0)
            .unwrap()
            .scalar()
            .unwrap();
        assert!((g - 1.0).abs() < 1e-15);

        assert!(weight_transform(&d, WeightKernel::Sigma1, 0.0).is_err());
        assert!(weight_transform(&d, WeightKernel::Sigma1, -1.0).is_err());
    }

    #[test]
    fn products() {
        assert_eq!(
            product_measure(&Measure1D::dirac(2.0), &Measure1D::dirac(-1.0)),
            Measure2D::dirac(2.0, -1.0)
        );
        let b = Measure1D::new([(-1.0, 0.5), (1.0, 0.5)]).unwrap();
        let p = product_measure(&b, &b);
        assert_eq!(p.atoms().len(), 4);
        assert!(p.atoms().iter().all(|a| a.w == 0.25));
        let e = product_measure(&b, &Measure1D::dirac(0.0));
        assert!(e.atoms().iter().all(|a| a.t == 0.0));
        assert_eq!(e.marginal(Axis::First), b);
    }

    #[test]
    fn tails() {
        assert_eq!(Measure2D::dirac(3.0, 0.0).tail_mass(2.0).unwrap(), 1.0);
        assert_eq!(Measure2D::dirac(0.0, 0.0).tail_mass(1e-9).unwrap(), 0.0);
        assert_eq!(four_point().tail_mass(0.5).unwrap(), 1.0);
        assert!(four_point().tail_mass(0.0).is_err());
    }

    #[test]
    fn jordan_parts() {
        let m = SignedMeasure2D::new([(1.0, 1.0, -0.5), (0.0, 2.0, 0.25)]).unwrap();
        let (p, n) = m.jordan();
        assert_eq!(p.mass(), 0.25);
        assert_eq!(n.mass(), 0.5);
        assert_eq!(m.total_variation(), 0.75);
    }

    fn arb_measure() -> impl Strategy<Value = Measure2D> {
        prop::collection::vec((-3.0f64..3.0, -3.0f64..3.0, 0.0f64..1.0), 1..8).prop_map(|v| Measure2D::new(v).unwrap())
    }

    proptest! {
        #[test]
        fn marginal_mass_is_preserved(mu in arb_measure()) {
            for axis in [Axis::First, Axis::Second] {
                let m = mu.marginal(axis);
                prop_assert!((m.moment(0).unwrap() - mu.moment(0, 0).unwrap()).abs() <= 1e-12);
            }
        }

        #[test]
        fn marginal_moments_agree(mu in arb_measure()) {
            let m1 = mu.marginal(Axis::First);
            let m2 = mu.marginal(Axis::Second);
            for k in 0..=10u32 {
                let a = mu.moment(k, 0).unwrap();
                let b = mu.moment(0, k).unwrap();
                prop_assert!((a - m1.moment(k).unwrap()).abs() <= 1e-12 * a.abs().max(1.0));
                prop_assert!((b - m2.moment(k).unwrap()).abs() <= 1e-12 * b.abs().max(1.0));
            }
        }

        #[test]
        fn rho_obeys_cauchy_schwarz(mu in arb_measure(), k in 0.1f64..10.0) {
            let tv = weight_transform(&mu, WeightKernel::Rho, k).unwrap().measure().unwrap().total_variation();
            let s1 = weight_transform(&mu, WeightKernel::Sigma1, k).unwrap().measure().unwrap().mass();
            let s2 = weight_transform(&mu, WeightKernel::Sigma2, k).unwrap().measure().unwrap().mass();
            prop_assert!(tv <= (s1 * s2).sqrt() + 1e-12);
        }

        #[test]
        fn product_marginals_reproduce_factors(
            a in prop::collection::vec((-3.0f64..3.0, 0.01f64..1.0), 1..5),
            b in prop::collection::vec((-3.0f64..3.0, 0.01f64..1.0), 1..5),
        ) {
            let sa: f64 = a.iter().map(|p| p.1).sum();
            let sb: f64 = b.iter().map(|p| p.1).sum();
            let sigma = Measure1D::new(a.iter().map(|&(x, w)| (x, w / sa))).unwrap();
            let tau = Measure1D::new(b.iter().map(|&(x, w)| (x, w / sb))).unwrap();
            let p = product_measure(&sigma, &tau);
            let m1 = p.marginal(Axis::First);
            let m2 = p.marginal(Axis::Second);
            for at in sigma.atoms() {
                prop_assert!((m1.weight_at(at.x) - at.w).abs() <= 1e-12);
            }
            for at in tau.atoms() {
                prop_assert!((m2.weight_at(at.x) - at.w).abs() <= 1e-12);
            }
        }
    }
}
