//! The `run` subcommand.

use std::io::Write;
use std::path::PathBuf;

use nash_approx::approx::{ProblemJson, ProblemMode, ResultJson};
use nash_approx::{approximate_into_variety, verify_result, ApproxError};

use crate::Exit;

/// Options of one run. Unset fields keep the values of the problem file.
#[derive(Clone, Debug, Default)]
pub struct RunConfig {
    pub problem: PathBuf,
    pub order: Option<u32>,
    pub nu: Option<Vec<u32>>,
    pub seed: Option<u64>,
    pub precision: Option<usize>,
    pub tolerance: Option<f64>,
    pub max_tries: Option<usize>,
    pub max_depth: Option<usize>,
    pub mode: Option<ProblemMode>,
    /// Report destination; standard output when unset.
    pub out: Option<PathBuf>,
    /// Where to write the result JSON, if anywhere.
    pub result_out: Option<PathBuf>,
    pub verbose: bool,
}

impl RunConfig {
    /// Applies the overrides to a parsed problem.
    pub fn apply(&self, p: &mut ProblemJson) {
        if self.order.is_some() {
            p.order = self.order;
        }
        if self.nu.is_some() {
            p.nu = self.nu.clone();
        }
        if self.mode.is_some() {
            p.mode = self.mode;
        }
        let mut cfg = p.config();
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(b) = self.precision {
            cfg.precision = b;
        }
        if let Some(t) = self.tolerance {
            cfg.tolerance = t;
        }
        if let Some(t) = self.max_tries {
            cfg.max_tries = t;
        }
        if let Some(d) = self.max_depth {
            cfg.max_depth = d;
        }
        p.config = Some(cfg);
    }
}

fn input_error(err: &mut dyn Write, msg: impl std::fmt::Display) -> Exit {
    let _ = writeln!(err, "input error: {msg}");
    Exit::Input
}

fn approx_error(err: &mut dyn Write, e: &ApproxError) -> Exit {
    if e.is_input() {
        let _ = writeln!(err, "{e}");
        return Exit::Input;
    }
    let _ = writeln!(err, "pipeline error: {e}");
    let trace = e.stage_trace();
    if !trace.is_empty() {
        let stages: Vec<String> = trace.iter().map(|s| s.to_string()).collect();
        let _ = writeln!(err, "stage trace: {}", stages.join(" > "));
    }
    Exit::Pipeline
}

/// Solves, verifies and reports. The report is computed from the result as
/// serialized, so it can be reproduced from the written files alone.
pub fn run(cfg: &RunConfig, out: &mut dyn Write, err: &mut dyn Write) -> Exit {
    let text = match std::fs::read_to_string(&cfg.problem) {
        Ok(t) => t,
        Err(e) => return input_error(err, format!("{}: {e}", cfg.problem.display())),
    };
    let mut pj = match ProblemJson::parse(&text) {
        Ok(p) => p,
        Err(e) => return approx_error(err, &e),
    };
    cfg.apply(&mut pj);
    let problem = match pj.build() {
        Ok(p) => p,
        Err(e) => return approx_error(err, &e),
    };
    if cfg.verbose {
        let _ = writeln!(
            err,
            "{} mode, {} source variables, {} ambient coordinates, order {}, nu {:?}",
            if problem.graph_dims > 0 { "theorem" } else { "variety" },
            problem.source_dim(),
            problem.variety.nvars(),
            problem.order(),
            problem.nu_list
        );
    }
    let result = match approximate_into_variety(&problem) {
        Ok(r) => r,
        Err(e) => return approx_error(err, &e),
    };
    let result_text = ResultJson::from_result(&result).to_text();
    let parsed = serde_json::from_str::<ResultJson>(&result_text)
        .map_err(|e| e.to_string())
        .and_then(|js| js.to_result(problem.config.jet_ctx()));
    let parsed = match parsed {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(err, "pipeline error: the result does not survive serialization: {e}");
            return Exit::Pipeline;
        }
    };
    let report = verify_result(&problem, &parsed);
    if let Some(path) = &cfg.result_out {
        if let Err(e) = std::fs::write(path, &result_text) {
            return input_error(err, format!("{}: {e}", path.display()));
        }
    }
    let report_text = report.to_json();
    match &cfg.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, format!("{report_text}\n")) {
                return input_error(err, format!("{}: {e}", path.display()));
            }
        }
        None => {
            let _ = writeln!(out, "{report_text}");
        }
    }
    if cfg.verbose {
        let _ = write!(err, "{}", report.to_text());
    }
    if report.passed {
        Exit::Pass
    } else {
        for (nu, v) in report.failures() {
            let at = nu.map(|n| format!(" at nu = {n}")).unwrap_or_default();
            let _ = writeln!(err, "failed: {}{at}", v.check);
        }
        Exit::VerifyFailed
    }
}
