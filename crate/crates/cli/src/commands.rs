//! Subcommand implementations. Each returns whether its theorem-level checks
//! passed; errors abort with exit status 2.

use std::path::{Path, PathBuf};

use num_rational::BigRational;
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use smtkit::algebra::parse::{parse_rational, ParseError};
use smtkit::algebra::{HomPoly, PolyLiteral};
use smtkit::bounds::{compute_truncation_levels, sweep, BoundsError, SWEEP_HEADER};
use smtkit::filtration::{build_filtration, construct_psi_basis, FiltrationError};
use smtkit::io::{self, InputError};
use smtkit::nevanlinna::exppoly::MeroFn;
use smtkit::nevanlinna::smt::{algebraic_nondegeneracy, defect_estimate, DefectEstimate};
use smtkit::nevanlinna::wronskian::{divisor_bound_check, wronskian, wronskian_mrat};
use smtkit::nevanlinna::{
    admissible_derivative_set, jensen_check, log_derivative_diagnostic, radius_grid, smt_verify, EntireCurve,
    NevanlinnaError, SmtOptions,
};
use smtkit::resultant::{
    is_admissible, macaulay_resultant_seeded, power_certificate, power_certificates, sylvester_resultant,
    HypersurfaceFamily, ResultantError,
};
use smtkit::selftest::{self, CriterionOutcome};

use crate::output::{emit, envelope_json, write_atomic, RunConfig};
use crate::svg::{line_chart, Series};
use crate::{Cli, Command, Format};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Input(#[from] InputError),
    #[error("--{option}: {source}")]
    Option {
        option: &'static str,
        #[source]
        source: ParseError,
    },
    #[error("resultant: {0}")]
    Resultant(#[from] ResultantError),
    #[error("filtration: {0}")]
    Filtration(#[from] FiltrationError),
    #[error("bounds: {0}")]
    Bounds(#[from] BoundsError),
    #[error("nevanlinna: {0}")]
    Nevanlinna(#[from] NevanlinnaError),
    #[error("{0}")]
    Usage(String),
}

type Outcome = Result<bool, CliError>;

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn load_system(path: &Path) -> Result<HypersurfaceFamily, CliError> {
    Ok(io::read_system(&read(path)?, &path.display().to_string())?)
}

fn load_curve(path: &Path) -> Result<EntireCurve, CliError> {
    Ok(io::read_curve(&read(path)?, &path.display().to_string())?)
}

fn rational_option(option: &'static str, s: &str) -> Result<BigRational, CliError> {
    parse_rational(s).map_err(|source| CliError::Option { option, source })
}

fn path_str(p: &Option<PathBuf>) -> Vec<String> {
    p.iter().map(|x| x.display().to_string()).collect()
}

struct Ctx<'a> {
    cli: &'a Cli,
}

impl Ctx<'_> {
    fn config(&self, subcommand: &'static str, inputs: Vec<String>, options: Value) -> RunConfig {
        RunConfig {
            subcommand,
            inputs,
            options,
            format: match self.cli.format {
                Format::Json => "json".into(),
                Format::Csv => "csv".into(),
            },
            seed: self.cli.seed,
            quad_tol_override: std::env::var("SMTKIT_QUAD_TOL").ok(),
        }
    }

    fn emit(&self, text: &str) -> Result<(), CliError> {
        emit(self.cli.output.as_deref(), text).map_err(|source| CliError::Io {
            path: self
                .cli
                .output
                .as_ref()
                .map_or("<stdout>".into(), |p| p.display().to_string()),
            source,
        })
    }

    fn report<T: Serialize>(&self, config: &RunConfig, passed: bool, result: T) -> Outcome {
        if self.cli.format == Format::Csv {
            return Err(CliError::Usage(format!("{} has no CSV output", config.subcommand)));
        }
        self.emit(&envelope_json(config, passed, result))?;
        Ok(passed)
    }

    /// CSV with the configuration as a leading comment line.
    fn csv(&self, config: &RunConfig, header: &str, rows: &[String]) -> Result<(), CliError> {
        let mut s = format!(
            "# {} {} config={}\n{header}\n",
            crate::output::TOOL,
            crate::output::VERSION,
            serde_json::to_string(config).expect("config serializes")
        );
        for r in rows {
            s.push_str(r);
            s.push('\n');
        }
        self.emit(&s)
    }

    fn schema(&self, subcommand: &str, inputs: Value) -> Outcome {
        let doc = json!({"subcommand": subcommand, "inputs": inputs});
        self.emit(&(serde_json::to_string_pretty(&doc).unwrap() + "\n"))?;
        Ok(true)
    }
}

pub fn run(cli: &Cli) -> Outcome {
    let ctx = Ctx { cli };
    match &cli.command {
        Command::Resultant(a) => resultant(&ctx, a),
        Command::Admissible(a) => admissible(&ctx, a),
        Command::Certificate(a) => certificate(&ctx, a),
        Command::Filtration(a) => filtration(&ctx, a),
        Command::Bounds(a) => bounds(&ctx, a),
        Command::Jensen(a) => jensen(&ctx, a),
        Command::Wronskian(a) => wronskian_cmd(&ctx, a),
        Command::Defects(a) => defects(&ctx, a),
        Command::SmtVerify(a) => smt(&ctx, a),
        Command::Selftest(a) => selftest_cmd(&ctx, a),
    }
}

fn system_inputs() -> Value {
    json!({"system": io::system_schema()})
}

fn pick_forms(fam: &HypersurfaceFamily, subset: &Option<Vec<usize>>) -> Result<(Vec<usize>, Vec<HomPoly>), CliError> {
    let subset = subset.clone().unwrap_or_else(|| (0..=fam.n()).collect());
    if subset.len() != fam.n() + 1 {
        return Err(CliError::Usage(format!(
            "--subset needs n+1 = {} indices, got {}",
            fam.n() + 1,
            subset.len()
        )));
    }
    fam.select(&subset)?;
    let raised = fam.raised();
    let forms = subset.iter().map(|&j| raised[j].clone()).collect();
    Ok((subset, forms))
}

fn resultant(ctx: &Ctx, a: &crate::ResultantArgs) -> Outcome {
    if a.sys.schema.schema {
        return ctx.schema("resultant", system_inputs());
    }
    let path = a.sys.system.as_ref().unwrap();
    let fam = load_system(path)?;
    let (subset, forms) = pick_forms(&fam, &a.subset)?;
    let r = macaulay_resultant_seeded(&forms, ctx.cli.seed)?;
    let sylvester = if fam.n() == 1 {
        Some(sylvester_resultant(&forms[0], &forms[1])?)
    } else {
        None
    };
    let agrees = sylvester.as_ref().map(|s| s == &r || s == &-&r);
    let config = ctx.config(
        "resultant",
        path_str(&a.sys.system),
        json!({"subset": subset}),
    );
    ctx.report(
        &config,
        agrees != Some(false),
        json!({
            "subset": subset,
            "degree": fam.common_degree(),
            "resultant": r.to_string(),
            "is_zero": r.is_zero(),
            "sylvester": sylvester.map(|s| s.to_string()),
            "agrees_up_to_sign": agrees,
        }),
    )
}

fn admissible(ctx: &Ctx, a: &crate::SystemArgs) -> Outcome {
    if a.schema.schema {
        return ctx.schema("admissible", system_inputs());
    }
    let path = a.system.as_ref().unwrap();
    let fam = load_system(path)?;
    let verdict = is_admissible(&fam)?;
    let config = ctx.config("admissible", path_str(&a.system), json!({}));
    // a negative verdict is an answer, not a failed check
    ctx.report(&config, true, verdict)
}

#[derive(Serialize)]
struct CertificateOut {
    index: usize,
    s: u32,
    resultant: String,
    cofactors: Vec<PolyLiteral>,
    verified: bool,
}

fn certificate(ctx: &Ctx, a: &crate::CertificateArgs) -> Outcome {
    if a.sys.schema.schema {
        return ctx.schema("certificate", system_inputs());
    }
    let path = a.sys.system.as_ref().unwrap();
    let fam = load_system(path)?;
    let (subset, forms) = pick_forms(&fam, &a.subset)?;
    let certs = match a.index {
        Some(i) => vec![power_certificate(&forms, i)?],
        None => power_certificates(&forms)?.0,
    };
    let n = fam.n() as u32;
    let d = fam.common_degree();
    let bound = (n + 1) * (d - 1) + 1;
    let out: Vec<CertificateOut> = certs
        .iter()
        .map(|c| CertificateOut {
            index: c.index,
            s: c.s,
            resultant: c.resultant.to_string(),
            cofactors: c.cofactors.iter().map(HomPoly::to_literal).collect(),
            verified: c.verify(&forms),
        })
        .collect();
    let common_s = certs.iter().map(|c| c.s).max().unwrap_or(d);
    let passed = out.iter().all(|c| c.verified) && common_s <= bound;
    let config = ctx.config(
        "certificate",
        path_str(&a.sys.system),
        json!({"subset": subset, "index": a.index}),
    );
    ctx.report(
        &config,
        passed,
        json!({"subset": subset, "common_s": common_s, "s_bound": bound, "certificates": out}),
    )
}

fn filtration(ctx: &Ctx, a: &crate::FiltrationArgs) -> Outcome {
    if a.sys.schema.schema {
        return ctx.schema("filtration", system_inputs());
    }
    let path = a.sys.system.as_ref().unwrap();
    let fam = load_system(path)?;
    let subset = a.subset.clone().unwrap();
    let big_n = a.big_n.unwrap();
    let table = build_filtration(&fam, &subset, big_n)?;
    let mut passed = table.checks.all();
    let psi = if a.psi {
        let b = construct_psi_basis(&fam, &subset, big_n)?;
        let ok = b.exponent_sums.iter().all(|&x| x == table.a);
        passed &= ok;
        Some(json!({
            "rank": b.rank,
            "block_sizes": b.block_sizes,
            "exponent_sums": b.exponent_sums,
            "exponent_sums_equal_A": ok,
        }))
    } else {
        None
    };
    let config = ctx.config(
        "filtration",
        path_str(&a.sys.system),
        json!({"subset": subset, "N": big_n, "psi": a.psi}),
    );
    let mut result = serde_json::to_value(&table).expect("table serializes");
    result["psi_basis"] = psi.unwrap_or(Value::Null);
    ctx.report(&config, passed, result)
}

fn bounds(ctx: &Ctx, a: &crate::BoundsArgs) -> Outcome {
    if a.schema.schema {
        return ctx.schema(
            "bounds",
            json!({"options": {
                "type": "object",
                "required": ["n", "q", "eps", "degrees"],
                "properties": {
                    "n": {"type": "integer", "minimum": 1},
                    "q": {"type": "integer", "description": "at least n+1"},
                    "eps": {"type": "string", "description": "exact rational in (0, 1], e.g. \"1/2\""},
                    "degrees": {"type": "array", "items": {"type": "integer", "minimum": 1}},
                    "fixed": {"type": "boolean"},
                    "csv": {"type": "boolean"}
                }
            }}),
        );
    }
    let (n, q) = (a.n.unwrap(), a.q.unwrap());
    let eps_text = a.eps.clone().unwrap();
    let eps = rational_option("eps", &eps_text)?;
    let degrees = a.degrees.clone().unwrap();
    let config = ctx.config(
        "bounds",
        vec![],
        json!({"n": n, "q": q, "eps": eps.to_string(), "degrees": degrees, "fixed": a.fixed, "csv": a.csv}),
    );
    if a.csv || ctx.cli.format == Format::Csv {
        let d = degrees.iter().copied().max().unwrap_or(1);
        let rows = sweep(n, q, d, &eps, a.fixed)?;
        let passed = rows.iter().all(|r| r.report.margin_ok);
        ctx.csv(&config, SWEEP_HEADER, &rows.iter().map(|r| r.csv()).collect::<Vec<_>>())?;
        return Ok(passed);
    }
    let rep = compute_truncation_levels(n, q, &eps, &degrees, a.fixed)?;
    let passed = rep.margin_ok && rep.p_selection_ok != Some(false);
    ctx.report(&config, passed, rep)
}

fn jensen(ctx: &Ctx, a: &crate::JensenArgs) -> Outcome {
    if a.schema.schema {
        return ctx.schema("jensen", json!({"function": io::function_schema()}));
    }
    let path = a.function.as_ref().unwrap();
    let phi = io::read_function(&read(path)?, &path.display().to_string())?;
    let reports = a
        .radii
        .iter()
        .map(|&r| jensen_check(&phi, r))
        .collect::<Result<Vec<_>, _>>()?;
    let worst = reports.iter().map(|r| r.residual).fold(0.0, f64::max);
    let config = ctx.config("jensen", path_str(&a.function), json!({"radii": a.radii, "tol": a.tol}));
    ctx.report(
        &config,
        worst <= a.tol,
        json!({"function": phi.to_string(), "max_residual": worst, "radii": reports}),
    )
}

fn wronskian_cmd(ctx: &Ctx, a: &crate::WronskianArgs) -> Outcome {
    if a.schema.schema {
        return ctx.schema(
            "wronskian",
            json!({"curve": io::curve_schema(), "functions": io::functions_schema()}),
        );
    }
    if let Some(path) = &a.functions {
        let fs = io::read_functions(&read(path)?, &path.display().to_string())?;
        let set = admissible_derivative_set(&fs)?;
        let w = wronskian_mrat(&fs, &set.alpha);
        let config = ctx.config("wronskian", path_str(&a.functions), json!({}));
        return ctx.report(
            &config,
            !w.is_zero(),
            json!({"functions": fs.iter().map(|f| f.to_string()).collect::<Vec<_>>(),
                   "admissible_set": set, "wronskian": w.to_string()}),
        );
    }
    let path = a.curve.as_ref().unwrap();
    let curve = load_curve(path)?;
    let fs: Vec<MeroFn> = curve.components().iter().cloned().map(MeroFn::from_exppoly).collect();
    let w = wronskian(&fs);
    if w.is_zero() {
        return Err(NevanlinnaError::DependentInputs.into());
    }
    let config = ctx.config("wronskian", path_str(&a.curve), json!({"r": a.r}));
    let (divisor, passed) = match curve.polys() {
        Some(ps) => {
            let rep = divisor_bound_check(&ps, a.r)?;
            let ok = rep.violations == 0;
            (Some(rep), ok)
        }
        None => (None, true),
    };
    ctx.report(
        &config,
        passed,
        json!({"wronskian": w.to_string(), "divisor_bound": divisor}),
    )
}

#[derive(Serialize)]
struct DefectRow {
    index: usize,
    target: String,
    estimate: DefectEstimate,
}

fn smt_inputs() -> Value {
    json!({"curve": io::curve_schema(), "system": io::system_schema()})
}

fn defects(ctx: &Ctx, a: &crate::DefectsArgs) -> Outcome {
    if a.schema.schema {
        return ctx.schema("defects", smt_inputs());
    }
    let (cp, sp) = (a.curve.as_ref().unwrap(), a.system.as_ref().unwrap());
    let curve = load_curve(cp)?;
    let fam = load_system(sp)?;
    if fam.n() != curve.n() {
        return Err(NevanlinnaError::DimensionMismatch {
            curve: curve.n(),
            target: fam.n(),
        }
        .into());
    }
    let radii = radius_grid(a.grid.rmin, a.grid.rmax, a.grid.steps)?;
    let rows = fam
        .forms()
        .iter()
        .enumerate()
        .map(|(index, q)| {
            Ok(DefectRow {
                index,
                target: q.to_string(),
                estimate: defect_estimate(&curve, q, &radii, a.level)?,
            })
        })
        .collect::<Result<Vec<_>, NevanlinnaError>>()?;
    let mut inputs = path_str(&a.curve);
    inputs.extend(path_str(&a.system));
    let config = ctx.config(
        "defects",
        inputs,
        json!({"rmin": a.grid.rmin, "rmax": a.grid.rmax, "steps": a.grid.steps, "level": a.level}),
    );
    if ctx.cli.format == Format::Csv {
        let mut lines = Vec::new();
        for row in &rows {
            for (r, v) in &row.estimate.series {
                lines.push(format!("{},{r},{v}", row.index));
            }
        }
        ctx.csv(&config, "target,r,one_minus_ratio", &lines)?;
        return Ok(true);
    }
    let sum: f64 = rows.iter().map(|r| r.estimate.value).sum();
    ctx.report(&config, true, json!({"defects": rows, "defect_sum": sum}))
}

fn smt(ctx: &Ctx, a: &crate::SmtArgs) -> Outcome {
    if a.schema.schema {
        return ctx.schema("smt-verify", smt_inputs());
    }
    let (cp, sp) = (a.curve.as_ref().unwrap(), a.system.as_ref().unwrap());
    let curve = load_curve(cp)?;
    let fam = load_system(sp)?;
    let eps = rational_option("eps", a.eps.as_ref().unwrap())?;
    let radii = radius_grid(a.grid.rmin, a.grid.rmax, a.grid.steps)?;
    let opts = SmtOptions {
        nondegeneracy_degree: a.nondegeneracy_degree,
        seed: ctx.cli.seed,
        levels: a.levels.clone(),
    };
    let mut inputs = path_str(&a.curve);
    inputs.extend(path_str(&a.system));
    let config = ctx.config(
        "smt-verify",
        inputs,
        json!({
            "eps": eps.to_string(), "rmin": a.grid.rmin, "rmax": a.grid.rmax, "steps": a.grid.steps,
            "plot": a.plot.as_ref().map(|p| p.display().to_string()),
            "levels": a.levels, "nondegeneracy_degree": a.nondegeneracy_degree,
            "log_derivative": a.log_derivative,
        }),
    );
    let rep = match smt_verify(&curve, &fam, &eps, &radii, &opts) {
        Ok(r) => r,
        // a degenerate curve is a reportable verdict
        Err(NevanlinnaError::Degenerate { degree }) => {
            let nd = algebraic_nondegeneracy(&curve, a.nondegeneracy_degree, ctx.cli.seed);
            return ctx.report(
                &config,
                false,
                json!({"verdict": false, "reason": format!("degenerate in degree {degree}"), "nondegeneracy": nd}),
            );
        }
        Err(e) => return Err(e.into()),
    };
    if let Some(plot) = &a.plot {
        let svg = line_chart(
            "Second Main Theorem: both sides",
            "r",
            &[
                Series {
                    label: "(q-n-1-eps) T(r)",
                    color: "#c0392b",
                    points: rep.rows.iter().map(|x| (x.r, x.lhs)).collect(),
                },
                Series {
                    label: "sum N(r)/d_j",
                    color: "#2471a3",
                    points: rep.rows.iter().map(|x| (x.r, x.rhs)).collect(),
                },
            ],
        );
        write_atomic(plot, &svg).map_err(|source| CliError::Io {
            path: plot.display().to_string(),
            source,
        })?;
    }
    if ctx.cli.format == Format::Csv {
        let lines: Vec<String> = rep
            .rows
            .iter()
            .map(|x| format!("{},{},{},{},{}", x.r, x.characteristic, x.lhs, x.rhs, x.margin))
            .collect();
        ctx.csv(&config, "r,T,lhs,rhs,margin", &lines)?;
        return Ok(rep.verdict);
    }
    let diag = if a.log_derivative {
        Some(log_derivative_diagnostic(&curve, &radii)?)
    } else {
        None
    };
    let verdict = rep.verdict;
    let mut result = serde_json::to_value(&rep).expect("report serializes");
    result["log_derivative"] = serde_json::to_value(diag).unwrap();
    ctx.report(&config, verdict, result)
}

#[derive(Serialize)]
struct MatrixRow<'a> {
    id: u32,
    title: &'a str,
    passed: bool,
    detail: &'a str,
    budget_seconds: Option<f64>,
}

fn selftest_cmd(ctx: &Ctx, a: &crate::SelftestArgs) -> Outcome {
    if a.schema.schema {
        return ctx.schema(
            "selftest",
            json!({"options": {"type": "object", "properties": {
                "only": {"type": "array", "items": {"type": "integer", "minimum": 1, "maximum": 10}}
            }}}),
        );
    }
    let ids: Vec<u32> = a.only.clone().unwrap_or_else(|| (1..=10).collect());
    if let Some(bad) = ids.iter().find(|&&i| !(1..=10).contains(&i)) {
        return Err(CliError::Usage(format!("no criterion {bad}; valid ids are 1 to 10")));
    }
    let mut outcomes: Vec<CriterionOutcome> = Vec::new();
    for id in ids.iter().copied() {
        let o = selftest::criterion(id, ctx.cli.seed).expect("valid id");
        // progress goes to stderr so stdout stays the report
        eprintln!("{}", o.line());
        outcomes.push(o);
    }
    let passed = outcomes.iter().all(|o| o.passed);
    let config = ctx.config("selftest", vec![], json!({"only": a.only}));
    // timings stay out of the report so it is reproducible
    let rows: Vec<MatrixRow> = outcomes
        .iter()
        .map(|o| MatrixRow {
            id: o.id,
            title: o.title,
            passed: o.passed,
            detail: &o.detail,
            budget_seconds: o.budget_seconds,
        })
        .collect();
    if ctx.cli.format == Format::Csv {
        let lines: Vec<String> = rows
            .iter()
            .map(|r| format!("{},\"{}\",{}", r.id, r.title, if r.passed { "PASS" } else { "FAIL" }))
            .collect();
        ctx.csv(&config, "id,title,result", &lines)?;
        return Ok(passed);
    }
    ctx.report(&config, passed, json!({"criteria": rows, "all_passed": passed}))
}
