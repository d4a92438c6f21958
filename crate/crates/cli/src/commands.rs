use std::io::Write;

use mellin_core::asymptotics::{koszul_reduce, KoszulOptions};
use mellin_core::mellin::{inverse_mellin_op, mellin_op};
use mellin_core::numerics::expansion::{
    annihilation_check, bound_verdict, default_t_grid, parameter_expansion, reconstruction_check, Contour,
    ExpansionTable, DEFAULT_NODES,
};
use mellin_core::numerics::plane::{epsilon_commutation_check, moment_table, stokes_identity_check, MomentTable};
use mellin_core::numerics::ray::{verify_commutation, SGrid};
use mellin_core::numerics::report::{CheckVerdict, ResidualReport};
use mellin_core::opparse::{parse_with, ParseOptions};
use mellin_core::ore::{Algebra, OreOperator};
use mellin_core::{Error, Result};
use num_complex::Complex64;
use serde::Serialize;

use crate::config::RunConfig;
use crate::functions::{expansion_family, plane_function, ray_function};
use crate::{exit, Cli, Command};

#[derive(Serialize)]
struct Report<'a, T: Serialize> {
    command: &'a str,
    config: &'a RunConfig,
    verdict: CheckVerdict,
    result: T,
}

fn emit<T: Serialize>(command: &str, config: &RunConfig, verdict: CheckVerdict, result: T) -> Result<u8> {
    let report = Report { command, config, verdict, result };
    let mut text = serde_json::to_string_pretty(&report)
        .map_err(|e| Error::InvalidInput(format!("cannot serialize report: {e}")))?;
    text.push('\n');
    match &config.output {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Error::InvalidInput(format!("cannot write {}: {e}", path.display())))?,
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Error::InvalidInput(format!("cannot write report: {e}")))?,
    }
    Ok(if verdict.passed() { exit::PASS } else { exit::FAIL })
}

fn parse_directions(text: &str) -> Result<Vec<usize>> {
    text.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<usize>()
                .ok()
                .filter(|&d| d >= 1)
                .ok_or_else(|| Error::InvalidInput(format!("bad direction '{s}'")))
        })
        .collect()
}

fn parse_in(text: &str, algebra: Algebra) -> Result<OreOperator> {
    parse_with(text, ParseOptions { algebra: Some(algebra), arity: None })
}

#[derive(Serialize)]
struct TermRecord {
    coefficient: String,
    t: Vec<i64>,
    theta: Vec<u32>,
    tau: Vec<i64>,
    s: Vec<u32>,
}

#[derive(Serialize)]
struct ParsedOperator {
    algebra: Algebra,
    arity: usize,
    canonical: String,
    terms: Vec<TermRecord>,
}

#[derive(Serialize)]
struct MomentsResult {
    function: String,
    table: MomentTable,
    stokes: Vec<ResidualReport>,
    epsilon: ResidualReport,
}

#[derive(Serialize)]
struct ExpandResult {
    function: String,
    table: ExpansionTable,
    bound: CheckVerdict,
    reconstruction: ResidualReport,
    annihilation: Option<ResidualReport>,
}

pub fn run(cli: Cli) -> Result<u8> {
    let mut config = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if cli.output.is_some() {
        config.output = cli.output.clone();
    }
    match cli.command {
        Command::Transform { expr, inverse } => {
            let q = if inverse {
                inverse_mellin_op(&parse_in(&expr, Algebra::S)?)?
            } else {
                mellin_op(&parse_in(&expr, Algebra::D)?)?
            };
            println!("{q}");
            Ok(exit::PASS)
        }
        Command::Parse { expr, algebra, arity, json } => {
            let p = parse_with(&expr, ParseOptions { algebra: algebra.map(Into::into), arity })?;
            if json {
                let parsed = ParsedOperator {
                    algebra: p.algebra(),
                    arity: p.arity(),
                    canonical: p.to_string(),
                    terms: p
                        .terms()
                        .iter()
                        .map(|(m, c)| TermRecord {
                            coefficient: c.to_string(),
                            t: m.t.clone(),
                            theta: m.theta.clone(),
                            tau: m.tau.clone(),
                            s: m.s.clone(),
                        })
                        .collect(),
                };
                let text = serde_json::to_string_pretty(&parsed)
                    .map_err(|e| Error::InvalidInput(format!("cannot serialize: {e}")))?;
                println!("{text}");
            } else {
                println!("{p}");
            }
            Ok(exit::PASS)
        }
        Command::Koszul { i, j, n, degree_bound, samples, seed } => {
            if let Some(n) = n {
                config.truncation = n;
            }
            if let Some(d) = degree_bound {
                config.degree_bound = d;
            }
            if let Some(s) = samples {
                config.samples = s;
            }
            config.validate()?;
            let mut opts = KoszulOptions::new(parse_directions(&i)?, parse_directions(&j)?, config.truncation);
            opts.degree_bound = config.degree_bound;
            opts.samples = config.samples;
            if let Some(seed) = seed {
                opts.seed = seed;
            }
            let report = koszul_reduce(&opts)?;
            let verdict = CheckVerdict::from_bool(report.matches_prediction);
            emit("koszul", &config, verdict, report)
        }
        Command::Verify { operator, function, start, stop, count, offset, tolerance } => {
            if function.is_some() {
                config.function = function;
            }
            let g = &mut config.grid;
            g.start = start.unwrap_or(g.start);
            g.stop = stop.unwrap_or(g.stop);
            g.count = count.unwrap_or(g.count);
            g.offset = offset.unwrap_or(g.offset);
            config.tolerance = tolerance.or(config.tolerance).or(Some(1e-8));
            config.validate()?;
            let name = config.function.clone().unwrap_or_else(|| "exponential".into());
            config.function = Some(name.clone());
            let f = ray_function(&name, &config)?;
            let p = parse_in(&operator, Algebra::D)?;
            let grid = SGrid::new(config.grid.start, config.grid.stop, config.grid.count, config.grid.offset)?;
            let report = verify_commutation(&p, &f, &name, &grid, config.tolerance.unwrap_or(1e-8))?;
            emit("verify", &config, report.verdict, report)
        }
        Command::Moments { function, k, s, s_im, tolerance } => {
            if function.is_some() {
                config.function = function;
            }
            config.tolerance = tolerance.or(config.tolerance).or(Some(1e-6));
            config.validate()?;
            if k < 0 {
                return Err(Error::InvalidInput("k must be non-negative".into()));
            }
            let name = config
                .function
                .clone()
                .ok_or_else(|| Error::InvalidInput("moments needs a function".into()))?;
            let f = plane_function(&name, &config)?;
            let s = Complex64::new(s, s_im);
            let tol = config.tolerance.unwrap_or(1e-6);
            let q = &config.quadrature;
            let table = moment_table(&f, k, s, q)?;
            let stokes = (0..=k).map(|kk| stokes_identity_check(&f, kk, s, q, tol)).collect::<Result<Vec<_>>>()?;
            let epsilon = epsilon_commutation_check(&f, s, k, q, tol)?;
            let ok = stokes.iter().all(|r| r.passed()) && epsilon.passed();
            emit("moments", &config, CheckVerdict::from_bool(ok), MomentsResult { function: name, table, stokes, epsilon })
        }
        Command::Expand { function, t0, radius, alpha_max, rho, tolerance } => {
            if function.is_some() {
                config.function = function;
            }
            config.tolerance = tolerance.or(config.tolerance).or(Some(1e-8));
            config.validate()?;
            let name = config.function.clone().unwrap_or_else(|| "geometric".into());
            config.function = Some(name.clone());
            let family = expansion_family(&name)?;
            let tol = config.tolerance.unwrap_or(1e-8);
            let contour = Contour::new(Complex64::new(t0, 0.0), radius, DEFAULT_NODES)?;
            let table = parameter_expansion(&*family.eval, &contour, alpha_max, &default_t_grid())?;
            let rho = rho.unwrap_or(radius / 2.0);
            let reconstruction = reconstruction_check(&*family.eval, &table, rho, 16, tol)?;
            let annihilation = family
                .euler_exponent
                .map(|c| annihilation_check(&*family.eval, &table, Complex64::new(c, 0.0), tol))
                .transpose()?;
            let bound = bound_verdict(&table);
            let ok = bound.passed() && reconstruction.passed() && annihilation.as_ref().is_none_or(|r| r.passed());
            emit(
                "expand",
                &config,
                CheckVerdict::from_bool(ok),
                ExpandResult { function: name, table, bound, reconstruction, annihilation },
            )
        }
    }
}
