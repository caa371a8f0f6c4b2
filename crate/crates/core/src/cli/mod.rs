//! Scenario files, check execution and report emission for the
//! `bergman-lab` binary.

pub mod checks;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::deck::{deck_group, format_group};
use crate::error::{LabError, Result};
use crate::maps::{list_catalog, parse_complex, parse_map, ProperMap};
use crate::spaces::parse_kernel;
pub use checks::{run_check, Check, CheckContext, Outcome, Table};

fn default_cap() -> usize {
    4
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    pub map: String,
    pub checks: Vec<String>,
    #[serde(default = "default_cap")]
    pub degree_cap: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quadrature_level: Option<usize>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Scenario> {
        serde_json::from_str(text).map_err(|e| LabError::Parse(format!("scenario: {e}")))
    }

    pub fn load(path: &Path) -> Result<Scenario> {
        Scenario::from_json(&std::fs::read_to_string(path)?)
    }

    /// Parsed map and checks; rejects unknown names, caps below 1,
    /// non-positive tolerances and checks that do not apply to the map.
    pub fn validate(&self) -> Result<(ProperMap, Vec<Check>)> {
        let f = parse_map(&self.map)?;
        let checks: Vec<Check> = self.checks.iter().map(|c| Check::parse(c)).collect::<Result<_>>()?;
        if self.degree_cap < 1 || self.quadrature_level == Some(0) {
            return Err(LabError::InvalidScenario("caps must be at least 1".into()));
        }
        for (name, tol) in &self.tolerances {
            Check::parse(name)?;
            if tol.is_nan() || *tol <= 0.0 {
                return Err(LabError::InvalidScenario(format!("tolerance for {name} must be positive")));
            }
        }
        if let Some(c) = checks.iter().find(|c| !c.applies_to(&f)) {
            return Err(LabError::CheckNotApplicable { check: c.name().into(), map: f.name().into() });
        }
        Ok((f, checks))
    }

    pub fn tolerance(&self, check: Check) -> f64 {
        self.tolerances.get(check.name()).copied().unwrap_or_else(|| check.default_tolerance())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckReport {
    pub check: String,
    pub pass: bool,
    pub max_residual: f64,
    pub tolerance: f64,
    pub seed: u64,
    pub details: String,
    pub tables: Vec<String>,
    pub wall_time_s: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub scenario: Scenario,
    pub all_pass: bool,
    pub checks: Vec<CheckReport>,
}

impl Report {
    /// JSON with every wall-time field removed, for determinism comparisons.
    pub fn without_timings(&self) -> serde_json::Value {
        let mut v = serde_json::to_value(self).expect("report serializes");
        if let Some(checks) = v["checks"].as_array_mut() {
            for c in checks {
                c.as_object_mut().map(|o| o.remove("wall_time_s"));
            }
        }
        v
    }
}

/// Runs every check of the scenario, writing `report.json` and the CSV
/// tables into `out`. Numerical failures inside a check are recorded as a
/// failed check rather than aborting the run.
pub fn run(scenario: &Scenario, out: &Path, parallel: bool) -> Result<Report> {
    let (f, checks) = scenario.validate()?;
    std::fs::create_dir_all(out)?;
    let ctx = CheckContext { degree_cap: scenario.degree_cap, quadrature_level: scenario.quadrature_level, seed: scenario.seed };
    let execute = |check: &Check| {
        let start = Instant::now();
        let outcome = run_check(*check, &f, &ctx);
        (*check, outcome, start.elapsed().as_secs_f64())
    };
    let results: Vec<(Check, Result<Outcome>, f64)> = if parallel {
        checks.par_iter().map(execute).collect()
    } else {
        checks.iter().map(execute).collect()
    };
    let mut reports = Vec::new();
    for (check, outcome, wall) in results {
        let tolerance = scenario.tolerance(check);
        let (max_residual, details, tables) = match outcome {
            Ok(o) => {
                let mut names = Vec::new();
                for t in &o.tables {
                    let file = format!("{}.csv", t.name);
                    write_table(&out.join(&file), t)?;
                    names.push(file);
                }
                (o.max_residual, o.details, names)
            }
            Err(e) => (f64::MAX, format!("error: {e}"), Vec::new()),
        };
        reports.push(CheckReport {
            check: check.name().into(),
            pass: max_residual < tolerance,
            max_residual,
            tolerance,
            seed: scenario.seed,
            details,
            tables,
            wall_time_s: wall,
        });
    }
    let report = Report { scenario: scenario.clone(), all_pass: reports.iter().all(|r| r.pass), checks: reports };
    let text = serde_json::to_string_pretty(&report).map_err(|e| LabError::IoFailure(e.to_string()))?;
    std::fs::write(out.join("report.json"), text + "\n")?;
    Ok(report)
}

pub fn write_table(path: &Path, table: &Table) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| LabError::IoFailure(e.to_string()))?;
    w.write_record(&table.header).map_err(|e| LabError::IoFailure(e.to_string()))?;
    for row in &table.rows {
        w.write_record(row).map_err(|e| LabError::IoFailure(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

/// `"z1;z2,w1;w2"` into two points.
pub fn parse_point_pair(text: &str) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    let (z, w) = text
        .split_once(',')
        .ok_or_else(|| LabError::Parse(format!("expected \"z,w\", found {text:?}")))?;
    let point = |s: &str| s.split(';').map(|c| parse_complex(c.trim())).collect::<Result<Vec<_>>>();
    Ok((point(z)?, point(w)?))
}

#[derive(Debug, Parser)]
#[command(name = "bergman-lab", version, about = "Bergman-space checks for proper holomorphic maps")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the checks of a scenario file.
    Run {
        scenario: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        parallel: bool,
        /// Also write the source and target quadrature rules as CSV.
        #[arg(long)]
        dump_rule: bool,
    },
    /// List the map catalog.
    List,
    /// Print the deck group of a map and its JSON report.
    Deck { map: String },
    /// Evaluate a kernel model at a point pair.
    Kernel {
        /// kernel:disc, kernel:polydisc:<d>, kernel:symdisc:<d> or pullback:<map>.
        name: String,
        /// Points as "z1;z2,w1;w2".
        #[arg(long)]
        at: String,
    },
}

/// Executes a parsed command line; returns the process exit code.
pub fn execute(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Run { scenario, out, seed, parallel, dump_rule } => {
            let mut s = Scenario::load(&scenario)?;
            if let Some(seed) = seed {
                s.seed = seed;
            }
            let report = run(&s, &out, parallel)?;
            if dump_rule {
                let f = parse_map(&s.map)?;
                let level = s.quadrature_level.unwrap_or(s.degree_cap);
                checks::scenario_rule(f.source(), level).dump_csv(&out.join("rule_source.csv"))?;
                checks::scenario_rule(f.target(), level).dump_csv(&out.join("rule_target.csv"))?;
            }
            for c in &report.checks {
                let verdict = if c.pass { "PASS" } else { "FAIL" };
                println!("{verdict} {} max_residual {:.3e} tolerance {:.1e} ({})", c.check, c.max_residual, c.tolerance, c.details);
            }
            Ok(if report.all_pass { 0 } else { 1 })
        }
        Command::List => {
            print!("{}", list_catalog());
            Ok(0)
        }
        Command::Deck { map } => {
            let g = deck_group(&parse_map(&map)?)?;
            print!("{}", format_group(&g));
            let json = serde_json::to_string_pretty(&g.report()).map_err(|e| LabError::IoFailure(e.to_string()))?;
            println!("{json}");
            Ok(0)
        }
        Command::Kernel { name, at } => {
            let model = parse_kernel(&name)?;
            let (z, w) = parse_point_pair(&at)?;
            for p in [&z, &w] {
                if p.len() == model.domain().dim() && !model.domain().contains(p)? {
                    return Err(LabError::OutsideDomain);
                }
            }
            println!("{}", checks::complex_cell(model.eval(&z, &w)?));
            Ok(0)
        }
    }
}
