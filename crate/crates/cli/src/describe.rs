//! The `describe` subcommand.

use std::io::Write;
use std::path::Path;

use nash_approx::approx::ProblemJson;

use crate::{Exit, SUITES};

const USAGE: &str = "\
Exit codes:
  0  every check passed
  2  verification failed
  3  a pipeline stage failed
  4  invalid input, or an output file could not be written

Problem JSON:
  {\"mode\": \"theorem\" | \"variety\",
   \"x_vars\": [...], \"y_vars\": [...],
   \"Q\": [\"polynomial\", ...] or {\"base_vars\", \"fiber_vars\", \"declared_dim\", \"generators\"},
   \"jet\": {\"name\": {\"nvars\", \"order\", \"terms\": [{\"exp\", \"re\", \"im\"}]}},
   \"declared_dim\": m, \"nu\": [...], \"order\": D, \"config\": {...}}
";

/// Describes the problem at `path`, or the formats and exit codes.
pub fn describe(path: Option<&Path>, out: &mut dyn Write, err: &mut dyn Write) -> Exit {
    let Some(path) = path else {
        let _ = write!(out, "{USAGE}");
        let _ = writeln!(out, "\nSelftest suites: {}", SUITES.join(", "));
        return Exit::Pass;
    };
    let parsed = std::fs::read_to_string(path)
        .map_err(|e| format!("{}: {e}", path.display()))
        .and_then(|t| ProblemJson::parse(&t).map_err(|e| e.to_string()));
    let pj = match parsed {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(err, "input error: {e}");
            return Exit::Input;
        }
    };
    let problem = match pj.build() {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(err, "{}: {e}", if e.is_input() { "input error" } else { "pipeline error" });
            return if e.is_input() { Exit::Input } else { Exit::Pipeline };
        }
    };
    let v = &problem.variety;
    let _ = writeln!(out, "mode: {}", serde_json::to_string(&pj.mode()).unwrap_or_default().trim_matches('"'));
    let _ = writeln!(out, "source variables: {}", problem.source_names.join(", "));
    let _ = writeln!(out, "ambient coordinates: {}", v.names().join(", "));
    let _ = writeln!(out, "base coordinates: {}", v.base_names().join(", "));
    let _ = writeln!(out, "declared dimension: {}", v.declared_dim());
    for g in v.generators() {
        let _ = writeln!(out, "generator: {}", nash_approx::poly::format_poly(g, v.names()));
    }
    let _ = writeln!(out, "outputs: {}", problem.output_names().join(", "));
    let _ = writeln!(out, "jet order: {}", problem.order());
    let _ = writeln!(out, "nu: {:?}", problem.nu_list);
    let _ = writeln!(out, "config: {}", serde_json::to_string(&problem.config).unwrap_or_default());
    Exit::Pass
}
