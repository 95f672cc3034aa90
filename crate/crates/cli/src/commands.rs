use std::fmt::Write as _;

use bifree::bifree_conv::{
    bifree_convolve, compound_poisson_r, lk_decompose, lk_r_general, lk_validate, BifreeLaw, GaussianClosedForm,
    GaussianParams, LKQuintupleGeneral, LawComponent,
};
use bifree::bifree_r::{MeasureR, PartialRTransform};
use bifree::io::{
    cumulants_json, decomposition_json, format_complex, format_real, limit_report_json, parse_lk, parse_measure,
    parse_points, parse_quintuple, validation_json, ParsedLk, ParsedMeasure,
};
use bifree::limits::{check_limit_theorem, default_probes, CltArray, LimitReport, PoissonArray, TriangularArray};
use bifree::measure::{Measure2D, PlanarMeasure};
use bifree::transform2d::{invert2d, CauchyTransform2D, GridDensity2D, GridSpec};
use bifree::Complex64 as C64;
use serde::Serialize;
use serde_json::{json, Value};

use crate::output::{emit, envelope, header, invalid, read, CliResult, Fallback};
use crate::{
    Command, ConvolveArgs, DemoArgs, DensityMethod, EvalArgs, GaussianArgs, GridArgs, InvertArgs, LkEvalArgs,
    LkFileArgs, PointArgs, PoissonArgs, SemigroupArgs,
};

/// `(z, w, value, inside Ω)`; the flag is absent where no domain applies.
type Row = (C64, C64, C64, Option<bool>);

pub fn run(cmd: Command) -> CliResult<()> {
    let name = cmd.name();
    match &cmd {
        Command::EvalG(a) => eval_g(name, a),
        Command::EvalR(a) => eval_r(name, a),
        Command::Convolve(a) => convolve(name, a),
        Command::Invert(a) => invert(name, a),
        Command::Gaussian(a) => gaussian(name, a),
        Command::Poisson(a) => poisson(name, a),
        Command::LkValidate(a) => lk_validate_cmd(name, a),
        Command::LkDecompose(a) => lk_decompose_cmd(name, a),
        Command::LkEval(a) => lk_eval(name, a),
        Command::CltDemo(a) => {
            let array = CltArray { c: a.c };
            demo(name, a, &array, &a.demo)
        }
        Command::PoissonDemo(a) => {
            let jump = match &a.jump {
                Some(p) => parse_measure(&read(p)?)?.into_planar()?,
                None => Measure2D::dirac(1.0, 1.0),
            };
            let array = PoissonArray { lambda: a.lambda, jump };
            array
                .limit()
                .ok_or_else(|| invalid("rate and jump law do not define a compound Poisson law"))?;
            demo(name, a, &array, &a.demo)
        }
        Command::Semigroup(a) => semigroup(name, a),
    }
}

fn points(p: &PointArgs) -> CliResult<Vec<(C64, C64)>> {
    let mut out = Vec::new();
    if let Some(path) = &p.points {
        out.extend(parse_points(&read(path)?)?);
    }
    for line in &p.at {
        out.extend(parse_points(line)?);
    }
    if out.is_empty() {
        return Err(invalid("no evaluation points; give --points FILE or --at \"Z W\""));
    }
    Ok(out)
}

fn has_points(p: &PointArgs) -> bool {
    p.points.is_some() || !p.at.is_empty()
}

/// `default` resized to the requested node count and, when given, the requested window.
fn grid(args: &GridArgs, default: GridSpec) -> CliResult<GridSpec> {
    let mut spec = default;
    spec.n_x = args.grid;
    spec.n_u = args.grid;
    spec.y = args.y;
    match (args.lo, args.hi) {
        (Some(lo), Some(hi)) => {
            spec.x_range = (lo, hi);
            spec.u_range = (lo, hi);
        }
        (None, None) => {}
        _ => return Err(invalid("--lo and --hi go together")),
    }
    spec.validate()?;
    Ok(spec)
}

fn csv(command: &str, params: &impl Serialize, d: &GridDensity2D) -> String {
    header(command, params) + &d.to_csv()
}

fn value_lines(command: &str, params: &impl Serialize, rows: &[Row]) -> String {
    let mut s = header(command, params);
    let flagged = rows.iter().any(|r| r.3.is_some());
    s.push_str(if flagged {
        "# z\tw\tvalue\tdomain\n"
    } else {
        "# z\tw\tvalue\n"
    });
    for &(z, w, v, inside) in rows {
        let _ = write!(s, "{}\t{}\t{}", format_complex(z), format_complex(w), format_complex(v));
        if let Some(inside) = inside {
            s.push_str(if inside { "\tinside" } else { "\toutside" });
        }
        s.push('\n');
    }
    s
}

fn r_rows(r: &dyn PartialRTransform, pts: &[(C64, C64)]) -> CliResult<Vec<Row>> {
    let dom = r.domain();
    pts.iter()
        .map(|&(z, w)| Ok((z, w, r.eval(z, w)?, Some(dom.contains(z, w)))))
        .collect()
}

fn eval_g(name: &str, a: &EvalArgs) -> CliResult<()> {
    let pts = points(&a.points)?;
    let g: Box<dyn CauchyTransform2D> = match parse_measure(&read(&a.measure)?)? {
        ParsedMeasure::Planar(m) => Box::new(m),
        ParsedMeasure::Signed(m) => Box::new(m),
        ParsedMeasure::Line(_) => return Err(invalid("eval-g needs a planar measure (atoms [s, t, w])")),
    };
    let rows = pts
        .iter()
        .map(|&(z, w)| Ok((z, w, g.eval(z, w)?, None)))
        .collect::<CliResult<Vec<_>>>()?;
    emit(a.out.as_deref(), Fallback::Stdout, &value_lines(name, a, &rows))
}

fn eval_r(name: &str, a: &EvalArgs) -> CliResult<()> {
    let pts = points(&a.points)?;
    let mu = parse_measure(&read(&a.measure)?)?.into_planar()?;
    let r = MeasureR::new(mu)?;
    let rows = r_rows(&r, &pts)?;
    emit(a.out.as_deref(), Fallback::Stdout, &value_lines(name, a, &rows))
}

fn convolve(name: &str, a: &ConvolveArgs) -> CliResult<()> {
    let mu1 = parse_measure(&read(&a.first)?)?.into_planar()?;
    let mu2 = parse_measure(&read(&a.second)?)?.into_planar()?;
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
    let spec = grid(&a.grid, law.default_grid(a.grid.y))?;
    let conv = bifree_convolve(&mu1, &mu2, Some(spec))?;
    emit(a.out.as_deref(), Fallback::Stdout, &csv(name, a, &conv.density))?;
    let (cx, cu) = conv.density.centroid();
    let result = json!({
        "cumulants": cumulants_json(&conv.cumulants),
        "additivity_residual": conv.additivity_residual,
        "grid_mass": conv.density.mass(),
        "grid_centroid": [cx, cu],
    });
    emit(a.report.as_deref(), Fallback::Stderr, &envelope(name, a, result))
}

fn invert(name: &str, a: &InvertArgs) -> CliResult<()> {
    let text = read(&a.input)?;
    let doc: Value = serde_json::from_str(&text).map_err(bifree::Error::from)?;
    let is_measure = doc.as_object().is_some_and(|o| o.contains_key("atoms"));
    let density = if is_measure {
        let g: Box<dyn CauchyTransform2D> = match parse_measure(&text)? {
            ParsedMeasure::Planar(m) => Box::new(m),
            ParsedMeasure::Signed(m) => Box::new(m),
            ParsedMeasure::Line(_) => return Err(invalid("invert needs a planar measure (atoms [s, t, w])")),
        };
        let half = g_support(&text)? + 1.0;
        let spec = grid(&a.grid, GridSpec::around((0.0, 0.0), half, half, a.grid.y))?;
        invert2d(g.as_ref(), &spec)?
    } else {
        let law = BifreeLaw::lk(parse_quintuple(&text)?)?;
        let spec = grid(&a.grid, law.default_grid(a.grid.y))?;
        invert2d(&law.cauchy(), &spec)?
    };
    emit(a.out.as_deref(), Fallback::Stdout, &csv(name, a, &density))
}

fn g_support(text: &str) -> CliResult<f64> {
    Ok(match parse_measure(text)? {
        ParsedMeasure::Planar(m) => m.support_radius(),
        ParsedMeasure::Signed(m) => m.support_radius(),
        ParsedMeasure::Line(_) => 0.0,
    })
}

fn gaussian(name: &str, a: &GaussianArgs) -> CliResult<()> {
    let params = GaussianParams::new(a.gamma1, a.gamma2, a.a, a.b, a.c)?;
    let law = GaussianClosedForm::new(params);
    let default = GridSpec::around((a.gamma1, a.gamma2), 2.0 * a.a.sqrt(), 2.0 * a.b.sqrt(), a.grid.y);
    let spec = grid(&a.grid, default)?;
    let closed = match a.method {
        DensityMethod::Auto => params.has_density(),
        DensityMethod::Closed => true,
        DensityMethod::Inverted => false,
    };
    let density = if closed {
        let (xs, us) = (spec.xs(), spec.us());
        let mut values = Vec::with_capacity(xs.len() * us.len());
        for &x in &xs {
            for &u in &us {
                values.push(law.density(x, u)?);
            }
        }
        GridDensity2D {
            xs,
            us,
            values,
            y: 0.0,
            clamped: false,
        }
    } else {
        invert2d(&law, &spec)?
    };
    emit(a.out.as_deref(), Fallback::Stdout, &csv(name, a, &density))?;
    if has_points(&a.points) {
        let rows = r_rows(&law, &points(&a.points)?)?;
        emit(a.report.as_deref(), Fallback::Stderr, &value_lines(name, a, &rows))?;
    }
    Ok(())
}

fn poisson(name: &str, a: &PoissonArgs) -> CliResult<()> {
    if !has_points(&a.points) && a.density.is_none() {
        return Err(invalid("nothing to do; give evaluation points and/or --density FILE"));
    }
    let jump = parse_measure(&read(&a.jump)?)?.into_planar()?;
    let law = BifreeLaw::lk(LKQuintupleGeneral::compound_poisson(a.lambda, &jump)?)?;
    if has_points(&a.points) {
        let dom = law.domain();
        let rows = points(&a.points)?
            .into_iter()
            .map(|(z, w)| {
                Ok((
                    z,
                    w,
                    compound_poisson_r(a.lambda, &jump, z, w)?,
                    Some(dom.contains(z, w)),
                ))
            })
            .collect::<CliResult<Vec<_>>>()?;
        emit(a.out.as_deref(), Fallback::Stdout, &value_lines(name, a, &rows))?;
    }
    if let Some(path) = &a.density {
        let spec = grid(&a.grid, law.default_grid(a.grid.y))?;
        let density = invert2d(&law.cauchy(), &spec)?;
        emit(Some(path), Fallback::Stdout, &csv(name, a, &density))?;
    }
    Ok(())
}

fn lk_validate_cmd(name: &str, a: &LkFileArgs) -> CliResult<()> {
    let report = match parse_lk(&read(&a.quintuple)?)? {
        ParsedLk::General(q) => lk_validate(&q),
        ParsedLk::Compact(c) => lk_validate(&c),
    };
    let verdict = if report.is_valid() { "VALID" } else { "INVALID" };
    let result = json!({"verdict": verdict, "report": validation_json(&report)});
    emit(a.out.as_deref(), Fallback::Stdout, &envelope(name, a, result))
}

fn lk_decompose_cmd(name: &str, a: &LkFileArgs) -> CliResult<()> {
    let q = parse_quintuple(&read(&a.quintuple)?)?;
    let d = lk_decompose(&q)?;
    emit(
        a.out.as_deref(),
        Fallback::Stdout,
        &envelope(name, a, decomposition_json(&d)),
    )
}

fn lk_eval(name: &str, a: &LkEvalArgs) -> CliResult<()> {
    let pts = points(&a.points)?;
    let law = BifreeLaw::lk(parse_quintuple(&read(&a.quintuple)?)?)?;
    let rows = r_rows(&law, &pts)?;
    emit(a.out.as_deref(), Fallback::Stdout, &value_lines(name, a, &rows))
}

fn semigroup(name: &str, a: &SemigroupArgs) -> CliResult<()> {
    let pts = points(&a.points)?;
    let q = parse_quintuple(&read(&a.quintuple)?)?;
    if !lk_validate(&q).is_valid() {
        return Err(invalid("quintuple violates the admissibility system"));
    }
    let mut s = header(name, a);
    s.push_str("# t\tz\tw\tvalue\n");
    for &t in &a.ts {
        if !t.is_finite() || t <= 0.0 {
            return Err(invalid(format!("semigroup time t = {t} must be positive")));
        }
        let qt = q.scaled(t)?;
        for &(z, w) in &pts {
            let v = lk_r_general(&qt, z, w)?;
            let _ = writeln!(
                s,
                "{}\t{}\t{}\t{}",
                format_real(t),
                format_complex(z),
                format_complex(w),
                format_complex(v)
            );
        }
    }
    emit(a.out.as_deref(), Fallback::Stdout, &s)
}

fn demo(name: &str, params: &impl Serialize, array: &dyn TriangularArray, d: &DemoArgs) -> CliResult<()> {
    let probes = match &d.probes {
        Some(p) => parse_points(&read(p)?)?,
        None => default_probes(),
    };
    let report = check_limit_theorem(array, &probes, &d.ns)?;
    if let Some(path) = &d.report {
        emit(
            Some(path),
            Fallback::Stdout,
            &envelope(name, params, limit_report_json(&report)),
        )?;
    }
    emit(d.out.as_deref(), Fallback::Stdout, &summary(name, params, &report))
}

fn sci(x: f64) -> String {
    // adding zero turns -0 into +0
    format!("{:.16e}", x + 0.0)
}

fn opt(x: Option<f64>) -> String {
    x.map_or_else(|| "-".to_string(), sci)
}

/// Plain-text table: one line per row, then the fitted orders and verdicts.
fn summary(name: &str, params: &impl Serialize, r: &LimitReport) -> String {
    let mut s = header(name, params);
    let _ = writeln!(
        s,
        "{:>8} {:>23} {:>23} {:>23} {:>23} {:>23} {:>23} {:>23}",
        "n", "err_r", "err_d", "err_rho", "accompaniment", "cross_r_d", "cross_d_rho", "tail_mass"
    );
    for (i, row) in r.rows.iter().enumerate() {
        let e = r.reference_error.as_ref().map(|v| v[i]);
        let _ = writeln!(
            s,
            "{:>8} {:>23} {:>23} {:>23} {:>23} {:>23} {:>23} {:>23}",
            row.n,
            opt(e.map(|e| e.r)),
            opt(e.map(|e| e.d)),
            opt(e.map(|e| e.rho)),
            sci(row.accompaniment),
            sci(row.cross_rd),
            sci(row.cross_d_rho),
            sci(row.tail_mass),
        );
    }
    let _ = writeln!(
        s,
        "order: r {} d {} rho {}",
        opt(r.order.r),
        opt(r.order.d),
        opt(r.order.rho)
    );
    let _ = writeln!(
        s,
        "converged: r {} d {} rho {}",
        r.converged.r, r.converged.d, r.converged.rho
    );
    let _ = writeln!(
        s,
        "indicators agree: {}",
        if r.equivalence_violation { "no" } else { "yes" }
    );
    let failures: usize = r.rows.iter().map(|row| row.failures.len()).sum();
    if failures > 0 {
        let _ = writeln!(s, "probe failures: {failures}");
    }
    s
}
