//! JSON and text formats: measures, quintuples, complex literals, point
//! lists and report serialization.

use num_complex::Complex64 as C64;
use serde::Deserialize;
use serde_json::{json, Value};

use crate::bifree_conv::{Decomposition, LKQuintupleGeneral, LKTripleCompact, ValidationReport};
use crate::bifree_r::CumulantTable;
use crate::error::{Error, Result};
use crate::limits::{DerivativeReport, FunctionalEqReport, Indicators, LimitReport, RHO_MOMENTS};
use crate::measure::{LineMeasure, Measure1D, Measure2D, PlanarMeasure, SignedMeasure2D};

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MeasureDoc {
    atoms: Vec<Vec<f64>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct QuintupleDoc {
    gamma: Option<[f64; 2]>,
    kappa: Option<[f64; 2]>,
    rho1: MeasureDoc,
    rho2: MeasureDoc,
    rho: MeasureDoc,
}

/// A measure read from JSON; the kind is inferred from atom arity and signs.
#[derive(Clone, Debug, PartialEq)]
pub enum ParsedMeasure {
    Planar(Measure2D),
    Signed(SignedMeasure2D),
    Line(Measure1D),
}

impl ParsedMeasure {
    pub fn into_planar(self) -> Result<Measure2D> {
        match self {
            ParsedMeasure::Planar(m) => Ok(m),
            ParsedMeasure::Signed(_) => Err(Error::invalid("expected a positive measure, found negative weights")),
            ParsedMeasure::Line(_) => Err(Error::invalid("expected planar atoms [s, t, w]")),
        }
    }

    pub fn into_signed(self) -> Result<SignedMeasure2D> {
        match self {
            ParsedMeasure::Planar(m) => Ok(m.to_signed()),
            ParsedMeasure::Signed(m) => Ok(m),
            ParsedMeasure::Line(_) => Err(Error::invalid("expected planar atoms [s, t, w]")),
        }
    }
}

fn triples(doc: &MeasureDoc) -> Result<Vec<(f64, f64, f64)>> {
    doc.atoms
        .iter()
        .map(|a| match a.as_slice() {
            [s, t, w] => Ok((*s, *t, *w)),
            _ => Err(Error::invalid(format!("planar atom needs 3 numbers, got {}", a.len()))),
        })
        .collect()
}

fn positive_or_zero(doc: &MeasureDoc, name: &str) -> Result<Measure2D> {
    let atoms = triples(doc)?;
    if atoms.is_empty() {
        return Ok(Measure2D::zero());
    }
    Measure2D::new(atoms).map_err(|e| Error::invalid(format!("{name}: {e}")))
}

/// Parses `{"atoms": [[s, t, w], ...]}` or `{"atoms": [[x, w], ...]}`.
pub fn parse_measure(text: &str) -> Result<ParsedMeasure> {
    let doc: MeasureDoc = serde_json::from_str(text)?;
    let arity = doc.atoms.first().map(Vec::len).unwrap_or(0);
    match arity {
        2 => {
            let pairs = doc
                .atoms
                .iter()
                .map(|a| match a.as_slice() {
                    [x, w] => Ok((*x, *w)),
                    _ => Err(Error::invalid("mixed atom arities")),
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(ParsedMeasure::Line(Measure1D::new(pairs)?))
        }
        3 => {
            let atoms = triples(&doc)?;
            if atoms.iter().any(|a| a.2 < 0.0) {
                let m = SignedMeasure2D::new(atoms)?;
                Ok(ParsedMeasure::Signed(m))
            } else {
                Ok(ParsedMeasure::Planar(Measure2D::new(atoms)?))
            }
        }
        0 => Err(Error::invalid("measure needs at least one atom")),
        n => Err(Error::invalid(format!("atoms must have 2 or 3 entries, got {n}"))),
    }
}

fn atoms_json(m: &impl PlanarMeasure) -> Value {
    json!({ "atoms": m.atoms().iter().map(|a| json!([a.s, a.t, a.w])).collect::<Vec<_>>() })
}

pub fn measure_json(m: &impl PlanarMeasure) -> Value {
    atoms_json(m)
}

pub fn line_measure_json(m: &impl LineMeasure) -> Value {
    json!({ "atoms": m.atoms().iter().map(|a| json!([a.x, a.w])).collect::<Vec<_>>() })
}

/// A quintuple in general form, or a compact triple when `kappa` is given instead of `gamma`.
#[derive(Clone, Debug, PartialEq)]
pub enum ParsedLk {
    General(LKQuintupleGeneral),
    Compact(LKTripleCompact),
}

impl ParsedLk {
    pub fn into_general(self) -> LKQuintupleGeneral {
        match self {
            ParsedLk::General(q) => q,
            ParsedLk::Compact(c) => c.to_general(),
        }
    }
}

pub fn parse_lk(text: &str) -> Result<ParsedLk> {
    let doc: QuintupleDoc = serde_json::from_str(text)?;
    let rho1 = positive_or_zero(&doc.rho1, "rho1")?;
    let rho2 = positive_or_zero(&doc.rho2, "rho2")?;
    let rho = SignedMeasure2D::new(triples(&doc.rho)?)?;
    match (doc.gamma, doc.kappa) {
        (Some(g), None) => Ok(ParsedLk::General(LKQuintupleGeneral::new(g, rho1, rho2, rho)?)),
        (None, Some(k)) => Ok(ParsedLk::Compact(LKTripleCompact::new(k, rho1, rho2, rho)?)),
        _ => Err(Error::invalid("give exactly one of \"gamma\" and \"kappa\"")),
    }
}

/// Parses `{"gamma": [γ₁, γ₂], "rho1": {...}, "rho2": {...}, "rho": {...}}`.
pub fn parse_quintuple(text: &str) -> Result<LKQuintupleGeneral> {
    Ok(parse_lk(text)?.into_general())
}

pub fn quintuple_json(q: &LKQuintupleGeneral) -> Value {
    json!({
        "gamma": q.gamma,
        "rho1": atoms_json(&q.rho1),
        "rho2": atoms_json(&q.rho2),
        "rho": atoms_json(&q.rho),
    })
}

pub fn compact_json(c: &LKTripleCompact) -> Value {
    json!({
        "kappa": c.kappa,
        "rho1": atoms_json(&c.rho1),
        "rho2": atoms_json(&c.rho2),
        "rho": atoms_json(&c.rho),
    })
}

pub fn validation_json(r: &ValidationReport) -> Value {
    json!({
        "valid": r.is_valid(),
        "checks": r.checks,
        "max_residual": r.max_residual,
        "violations": r.violations.iter().map(|v| json!({
            "check": v.check,
            "location": v.location.map(|(s, t)| vec![s, t]),
            "residual": v.residual,
        })).collect::<Vec<_>>(),
    })
}

pub fn cumulants_json(t: &CumulantTable) -> Value {
    json!({
        "maxdeg": t.maxdeg,
        "radius": t.radius,
        "max_imag": t.max_imag,
        "kappa": t.entries().into_iter().map(|(m, n, v)| json!({"m": m, "n": n, "value": v})).collect::<Vec<_>>(),
    })
}

pub fn decomposition_json(d: &Decomposition) -> Value {
    let g = &d.gaussian;
    json!({
        "gaussian": {"a": g.a, "b": g.b, "c": g.c},
        "product": [
            {"gamma": d.product.0.gamma, "sigma": line_measure_json(&d.product.0.sigma)},
            {"gamma": d.product.1.gamma, "sigma": line_measure_json(&d.product.1.sigma)},
        ],
        "poisson": d.poisson.as_ref().map(|p| json!({
            "lambda": p.lambda,
            "jump": atoms_json(&p.jump),
            "shift": p.shift,
        })),
    })
}

fn clean(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x
    }
}

/// Shortest round-trip decimal, exponent form only for very small or large magnitudes.
pub fn format_real(x: f64) -> String {
    let s = format!("{:?}", clean(x));
    match s.strip_suffix(".0") {
        Some(t) => t.to_string(),
        None => s,
    }
}

/// `a+bi` with shortest round-trip digits, e.g. `-1+0i`.
pub fn format_complex(z: C64) -> String {
    let im = clean(z.im);
    if im < 0.0 {
        format!("{}-{}i", format_real(z.re), format_real(-im))
    } else {
        format!("{}+{}i", format_real(z.re), format_real(im))
    }
}

pub fn complex_json(z: C64) -> Value {
    json!([clean(z.re), clean(z.im)])
}

fn parse_real(s: &str, whole: &str) -> Result<f64> {
    let v: f64 = s
        .parse()
        .map_err(|_| Error::invalid(format!("malformed complex literal {whole:?}")))?;
    if !v.is_finite() {
        return Err(Error::invalid(format!("non-finite complex literal {whole:?}")));
    }
    Ok(v)
}

/// Parses `a`, `bi`, `a+bi`, `a-bi` (also with `j`), e.g. `0.05-0.05i`, `-i`, `1e-3+2i`.
pub fn parse_complex(text: &str) -> Result<C64> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err(Error::invalid("empty complex literal"));
    }
    let body = match s.strip_suffix(['i', 'j']) {
        None => return Ok(C64::new(parse_real(&s, text)?, 0.0)),
        Some(b) => b,
    };
    // split at the last sign that is not the leading one and not part of an exponent
    let bytes = body.as_bytes();
    let mut split = None;
    for k in (1..bytes.len()).rev() {
        if (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E') {
            split = Some(k);
            break;
        }
    }
    let (re, im) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("", body),
    };
    let re = if re.is_empty() { 0.0 } else { parse_real(re, text)? };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        x => parse_real(x, text)?,
    };
    Ok(C64::new(re, im))
}

/// One `z w` pair per line, separated by whitespace or a comma; `#` starts a comment.
pub fn parse_points(text: &str) -> Result<Vec<(C64, C64)>> {
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|f| !f.is_empty())
            .collect();
        if fields.len() != 2 {
            return Err(Error::invalid(format!(
                "line {}: expected two complex numbers, found {}",
                lineno + 1,
                fields.len()
            )));
        }
        let z = parse_complex(fields[0]).map_err(|e| Error::invalid(format!("line {}: {e}", lineno + 1)))?;
        let w = parse_complex(fields[1]).map_err(|e| Error::invalid(format!("line {}: {e}", lineno + 1)))?;
        out.push((z, w));
    }
    if out.is_empty() {
        return Err(Error::invalid("point list is empty"));
    }
    Ok(out)
}

fn indicators_json(i: &Indicators<f64>) -> Value {
    json!({"r": i.r, "d": i.d, "rho": i.rho})
}

fn opt_complex(z: &Option<C64>) -> Value {
    z.map(complex_json).unwrap_or(Value::Null)
}

pub fn limit_report_json(r: &LimitReport) -> Value {
    json!({
        "probes": r.probes.iter().map(|&(z, w)| json!([complex_json(z), complex_json(w)])).collect::<Vec<_>>(),
        "rho_moment_orders": RHO_MOMENTS,
        "rows": r.rows.iter().map(|row| json!({
            "n": row.n,
            "k": row.k,
            "scaled_r": row.scaled_r.iter().map(opt_complex).collect::<Vec<_>>(),
            "d": row.d.iter().map(|&d| complex_json(d)).collect::<Vec<_>>(),
            "rho_moments": row.rho_moments,
            "gamma": row.gamma,
            "sigma_mass": row.sigma_mass,
            "tail_mass": row.tail_mass,
            "accompaniment": row.accompaniment,
            "cross_r_d": row.cross_rd,
            "cross_d_rho": row.cross_d_rho,
            "outside_domain": row.outside_domain,
            "failures": row.failures,
        })).collect::<Vec<_>>(),
        "cauchy": r.cauchy.iter().map(indicators_json).collect::<Vec<_>>(),
        "reference_error": r.reference_error.as_ref().map(|v| v.iter().map(indicators_json).collect::<Vec<_>>()),
        "order": {"r": r.order.r, "d": r.order.d, "rho": r.order.rho},
        "extrapolated": {
            "r": r.extrapolated_r.iter().map(opt_complex).collect::<Vec<_>>(),
            "d": r.extrapolated_d.iter().map(|&d| complex_json(d)).collect::<Vec<_>>(),
            "rho_moments": r.extrapolated_rho,
        },
        "converged": {"r": r.converged.r, "d": r.converged.d, "rho": r.converged.rho},
        "equivalence_violation": r.equivalence_violation,
    })
}

pub fn functional_eq_json(r: &FunctionalEqReport) -> Value {
    json!({"residuals": r.residuals, "skipped": r.skipped, "max_residual": r.max_residual})
}

pub fn derivative_report_json(r: &DerivativeReport) -> Value {
    json!({
        "z": complex_json(r.z),
        "w": complex_json(r.w),
        "target": complex_json(r.target),
        "moment_targets": r.moment_targets,
        "order": r.order,
        "in_domain": r.in_domain,
        "rows": r.rows.iter().map(|row| json!({
            "eps": row.eps,
            "quotient": opt_complex(&row.quotient),
            "deviation": row.deviation,
            "rescaled_moments": row.rescaled_moments,
            "flags": row.flags,
        })).collect::<Vec<_>>(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bifree_conv::lk_validate;
    use proptest::prelude::*;

    #[test]
    fn measure_examples() {
        let m = parse_measure(r#"{"atoms": [[0,0,1]]}"#).unwrap().into_planar().unwrap();
        assert_eq!(m, Measure2D::dirac(0.0, 0.0));
        let m = parse_measure(r#"{"atoms": [[1,1,0.5],[-1,-1,0.5]]}"#)
            .unwrap()
            .into_planar()
            .unwrap();
        assert!(m.is_probability());
        match parse_measure(r#"{"atoms": [[1,1,-0.5]]}"#).unwrap() {
            ParsedMeasure::Signed(s) => assert_eq!(s.total_variation(), 0.5),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            parse_measure(r#"{"atoms": [[0.5, 1]]}"#).unwrap(),
            ParsedMeasure::Line(_)
        ));
    }

    #[test]
    fn malformed_measures_are_input_errors() {
        for bad in [
            r#"{"atoms": []}"#,
            r#"{"atoms": [[1,2,3,4]]}"#,
            r#"{"atoms": [[1,2,3],[1,2]]}"#,
            r#"{"atoms": [[1e999,0,1]]}"#,
            r#"{"atom": [[0,0,1]]}"#,
            r#"[1,2,3]"#,
            "",
        ] {
            let err = parse_measure(bad).unwrap_err();
            assert!(err.is_input_error(), "{bad}: {err}");
        }
        assert!(parse_measure(r#"{"atoms": [[0,0,-1]]}"#)
            .unwrap()
            .into_planar()
            .is_err());
    }

    #[test]
    fn measure_round_trip() {
        let m = Measure2D::new([(0.1, -0.3, 0.25), (1.0 / 3.0, 2.0, 0.75)]).unwrap();
        let text = measure_json(&m).to_string();
        assert_eq!(parse_measure(&text).unwrap().into_planar().unwrap(), m);
    }

    #[test]
    fn quintuple_round_trip_and_validation() {
        let text = r#"{"gamma": [0, 0], "rho1": {"atoms": [[0,0,1]]}, "rho2": {"atoms": [[0,0,1]]}, "rho": {"atoms": [[0,0,1.2]]}}"#;
        let q = parse_quintuple(text).unwrap();
        let rep = lk_validate(&q);
        assert!(!rep.is_valid());
        let v = validation_json(&rep);
        assert_eq!(v["valid"], false);
        assert_eq!(v["violations"][0]["location"], json!([0.0, 0.0]));
        let back = parse_quintuple(&quintuple_json(&q).to_string()).unwrap();
        assert_eq!(back, q);
        let empty = r#"{"gamma": [1, 2], "rho1": {"atoms": []}, "rho2": {"atoms": []}, "rho": {"atoms": []}}"#;
        assert_eq!(parse_quintuple(empty).unwrap().gamma, [1.0, 2.0]);
    }

    #[test]
    fn compact_input_is_converted() {
        let text = r#"{"kappa": [0, 0], "rho1": {"atoms": [[1,1,0.5]]}, "rho2": {"atoms": []}, "rho": {"atoms": []}}"#;
        let q = parse_quintuple(text).unwrap();
        assert_eq!(q.rho1.weight_at(1.0, 1.0), 0.25);
        let both =
            r#"{"gamma": [0, 0], "kappa": [0, 0], "rho1": {"atoms": []}, "rho2": {"atoms": []}, "rho": {"atoms": []}}"#;
        assert!(parse_quintuple(both).is_err());
    }

    #[test]
    fn complex_literals() {
        let cases = [
            ("1", C64::new(1.0, 0.0)),
            ("i", C64::new(0.0, 1.0)),
            ("-i", C64::new(0.0, -1.0)),
            ("0.05-0.05i", C64::new(0.05, -0.05)),
            ("-0.1i", C64::new(0.0, -0.1)),
            ("1e-3+2.5e-1j", C64::new(1e-3, 0.25)),
            ("-2E+1-3e-2i", C64::new(-20.0, -0.03)),
            (" 3 + 4i ", C64::new(3.0, 4.0)),
            ("+2-i", C64::new(2.0, -1.0)),
        ];
        for (text, z) in cases {
            assert_eq!(parse_complex(text).unwrap(), z, "{text}");
        }
        for bad in ["", "abc", "1+2", "1++2i", "inf", "nani", "1e400i"] {
            assert!(parse_complex(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn complex_display() {
        assert_eq!(format_complex(C64::new(-1.0, -0.0)), "-1+0i");
        assert_eq!(format_complex(C64::new(0.5, -0.25)), "0.5-0.25i");
        assert_eq!(
            parse_complex(&format_complex(C64::new(0.1, 1e-300))).unwrap(),
            C64::new(0.1, 1e-300)
        );
    }

    #[test]
    fn point_lists() {
        let pts = parse_points("# probes\n-0.1i, -0.05i\n0.05-0.05i 1+i  # trailing\n\n").unwrap();
        assert_eq!(pts.len(), 2);
        assert_eq!(pts[1].1, C64::new(1.0, 1.0));
        assert!(parse_points("1i 2i 3i").is_err());
        assert!(parse_points("# nothing").is_err());
    }

    proptest! {
        #[test]
        fn complex_display_round_trips(re in -1e6f64..1e6, im in -1e6f64..1e6) {
            let z = C64::new(re, im);
            prop_assert_eq!(parse_complex(&format_complex(z)).unwrap(), z);
        }

        #[test]
        fn parsers_never_panic(s in ".{0,40}") {
            let _ = parse_complex(&s);
            let _ = parse_points(&s);
            let _ = parse_measure(&s);
            let _ = parse_quintuple(&s);
        }
    }
}
