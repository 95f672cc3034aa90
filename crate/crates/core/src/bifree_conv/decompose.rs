use num_complex::Complex64 as C64;

use super::gaussian::GaussianParams;
use super::law::compound_poisson_r;
use super::quintuple::{lk_validate, LKQuintupleGeneral, CONSTRAINT_TOL};
use crate::error::{Error, Result};
use crate::measure::{Axis, Measure2D, PlanarMeasure};
use crate::rtransform1d::{free_lk_r, FreeLKPair};

/// Off-axis part of a Lévy-Khintchine quintuple as a shifted compound Poisson law.
#[derive(Clone, Debug, PartialEq)]
pub struct PoissonPart {
    pub lambda: f64,
    pub jump: Measure2D,
    /// Drift correction `(a, b)` added to the compound Poisson R-transform.
    pub shift: [f64; 2],
}

impl PoissonPart {
    pub fn r(&self, z: C64, w: C64) -> Result<C64> {
        Ok(compound_poisson_r(self.lambda, &self.jump, z, w)? + self.shift[0] * z + self.shift[1] * w)
    }

    /// The same law as a quintuple.
    pub fn quintuple(&self) -> Result<LKQuintupleGeneral> {
        let mut q = LKQuintupleGeneral::compound_poisson(self.lambda, &self.jump)?;
        q.gamma[0] += self.shift[0];
        q.gamma[1] += self.shift[1];
        Ok(q)
    }
}

/// Gaussian ⊞⊞ product ⊞⊞ compound Poisson splitting of a quintuple.
#[derive(Clone, Debug, PartialEq)]
pub struct Decomposition {
    /// Centred Gaussian built from the atoms at the origin.
    pub gaussian: GaussianParams,
    /// Free infinitely divisible laws carried by the two punctured axes, with the drift.
    pub product: (FreeLKPair, FreeLKPair),
    pub poisson: Option<PoissonPart>,
}

impl Decomposition {
    pub fn r(&self, z: C64, w: C64) -> Result<C64> {
        let g = &self.gaussian;
        let mut acc = g.a * z * z + g.b * w * w + g.c * z * w;
        acc += z * free_lk_r(&self.product.0, z)? + w * free_lk_r(&self.product.1, w)?;
        if let Some(p) = &self.poisson {
            acc += p.r(z, w)?;
        }
        Ok(acc)
    }

    /// The three parts as quintuples, in the order Gaussian, product, Poisson.
    pub fn parts(&self) -> Result<Vec<LKQuintupleGeneral>> {
        let g = &self.gaussian;
        let mut out = vec![
            LKQuintupleGeneral::gaussian(0.0, 0.0, g.a, g.b, g.c)?,
            LKQuintupleGeneral::product(&self.product.0, &self.product.1)?,
        ];
        if let Some(p) = &self.poisson {
            out.push(p.quintuple()?);
        }
        Ok(out)
    }
}

/// Splits the atoms of `q` by location class: origin, punctured `s`-axis,
/// punctured `t`-axis and the open quadrants.
pub fn lk_decompose(q: &LKQuintupleGeneral) -> Result<Decomposition> {
    let report = lk_validate(q);
    if !report.is_valid() {
        return Err(Error::invalid(format!(
            "quintuple violates the admissibility system at {} location(s), max residual {:.3e}",
            report.violations.len(),
            report.max_residual
        )));
    }
    let gaussian = GaussianParams::new(
        0.0,
        0.0,
        q.rho1.weight_at(0.0, 0.0),
        q.rho2.weight_at(0.0, 0.0),
        q.rho.weight_at(0.0, 0.0),
    )?;

    let on_s = q.rho1.restrict(|s, t| t == 0.0 && s != 0.0);
    let on_t = q.rho2.restrict(|s, t| s == 0.0 && t != 0.0);
    let product = (
        FreeLKPair::new(q.gamma[0], on_s.marginal(Axis::First))?,
        FreeLKPair::new(q.gamma[1], on_t.marginal(Axis::Second))?,
    );

    let off = |s: f64, t: f64| s != 0.0 && t != 0.0;
    let u1 = q.rho1.restrict(off);
    let u2 = q.rho2.restrict(off);
    let mut tau = Vec::new();
    for a in u1.atoms() {
        let via1 = a.w * (1.0 + a.s * a.s) / (a.s * a.s);
        let via2 = u2.weight_at(a.s, a.t) * (1.0 + a.t * a.t) / (a.t * a.t);
        if (via1 - via2).abs() > CONSTRAINT_TOL * via1.max(1.0) {
            return Err(Error::invalid(format!(
                "Lévy measure at ({}, {}) is {via1} from ρ₁ but {via2} from ρ₂",
                a.s, a.t
            )));
        }
        tau.push((a.s, a.t, via1));
    }
    if u2.atoms().len() != tau.len() {
        return Err(Error::invalid("ρ₂ carries off-axis atoms absent from ρ₁"));
    }
    let poisson = if tau.is_empty() {
        None
    } else {
        let lambda: f64 = tau.iter().map(|a| a.2).sum();
        let shift = [
            -tau.iter().map(|&(s, _, w)| w * s / (1.0 + s * s)).sum::<f64>(),
            -tau.iter().map(|&(_, t, w)| w * t / (1.0 + t * t)).sum::<f64>(),
        ];
        let jump = Measure2D::from_positive(tau.iter().map(|&(s, t, w)| (s, t, w / lambda)));
        Some(PoissonPart { lambda, jump, shift })
    };
    Ok(Decomposition {
        gaussian,
        product,
        poisson,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bifree_conv::quintuple::lk_r_general;
    use crate::measure::{LineMeasure, Measure1D, SignedMeasure2D};
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn origin_only_is_gaussian() {
        let q = LKQuintupleGeneral::gaussian(0.3, -0.2, 1.0, 2.0, 0.5).unwrap();
        let d = lk_decompose(&q).unwrap();
        assert_eq!(d.gaussian, GaussianParams::new(0.0, 0.0, 1.0, 2.0, 0.5).unwrap());
        assert!(d.poisson.is_none());
        assert!(d.product.0.sigma.atoms().is_empty() && d.product.1.sigma.atoms().is_empty());
        assert_eq!((d.product.0.gamma, d.product.1.gamma), (0.3, -0.2));
    }

    #[test]
    fn single_quadrant_atom() {
        let q = LKQuintupleGeneral::new(
            [0.0, 0.0],
            Measure2D::new([(1.0, 1.0, 0.5)]).unwrap(),
            Measure2D::new([(1.0, 1.0, 0.5)]).unwrap(),
            SignedMeasure2D::new([(1.0, 1.0, 0.5)]).unwrap(),
        )
        .unwrap();
        let d = lk_decompose(&q).unwrap();
        let p = d.poisson.clone().unwrap();
        assert!((p.lambda - 1.0).abs() < 1e-15);
        assert_eq!(p.jump, Measure2D::dirac(1.0, 1.0));
        assert_eq!(p.shift, [-0.5, -0.5]);
        let (z, w) = (c(0.2, -0.3), c(-0.1, 0.4));
        assert!((d.r(z, w).unwrap() - lk_r_general(&q, z, w).unwrap()).norm() < 1e-12);
    }

    #[test]
    fn axis_atom_goes_to_the_product() {
        let q = LKQuintupleGeneral::new(
            [0.0, 0.0],
            Measure2D::new([(1.0, 0.0, 1.0)]).unwrap(),
            Measure2D::zero(),
            SignedMeasure2D::zero(),
        )
        .unwrap();
        let d = lk_decompose(&q).unwrap();
        assert_eq!(d.product.0.sigma, Measure1D::dirac(1.0));
        assert!(d.poisson.is_none());
        let (z, w) = (c(0.1, -0.2), c(0.3, 0.3));
        let expect = z * (z + 1.0) / (1.0 - z);
        assert!((d.r(z, w).unwrap() - expect).norm() < 1e-14);
    }

    #[test]
    fn invalid_input_is_rejected() {
        let bad = LKQuintupleGeneral::gaussian(0.0, 0.0, 1.0, 1.0, 1.2).unwrap();
        assert!(lk_decompose(&bad).unwrap_err().is_input_error());
    }

    fn arb_valid() -> impl Strategy<Value = LKQuintupleGeneral> {
        let atoms = prop::collection::vec((-2i32..3, -2i32..3, 0.05f64..1.0), 1..6);
        (
            atoms,
            -1.0f64..1.0,
            -1.0f64..1.0,
            0.0f64..2.0,
            0.0f64..2.0,
            -1.0f64..1.0,
            0.1f64..3.0,
        )
            .prop_map(|(at, g1, g2, a, b, r, lam)| {
                let mass: f64 = at.iter().map(|x| x.2).sum();
                let jump = Measure2D::new(
                    at.into_iter()
                        .map(|(s, t, w)| (s as f64 * 0.7, t as f64 * 0.7, w / mass)),
                )
                .unwrap();
                LKQuintupleGeneral::compound_poisson(lam, &jump)
                    .unwrap()
                    .plus(&LKQuintupleGeneral::gaussian(g1, g2, a, b, r * (a * b).sqrt()).unwrap())
            })
    }

    proptest! {
        #[test]
        fn parts_resum_to_the_input(q in arb_valid(), x in -1.0f64..1.0, y in 0.05f64..1.0, u in -1.0f64..1.0, v in 0.05f64..1.0) {
            let d = lk_decompose(&q).unwrap();
            let (z, w) = (c(x, -y), c(u, v));
            let whole = lk_r_general(&q, z, w).unwrap();
            prop_assert!((d.r(z, w).unwrap() - whole).norm() <= 1e-10 * whole.norm().max(1.0));
            let mut sum = C64::new(0.0, 0.0);
            for p in d.parts().unwrap() {
                prop_assert!(lk_validate(&p).is_valid());
                sum += lk_r_general(&p, z, w).unwrap();
            }
            prop_assert!((sum - whole).norm() <= 1e-10 * whole.norm().max(1.0));
        }
    }
}
