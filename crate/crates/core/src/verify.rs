//! Independent verification of approximation results.
//!
//! Every verdict is recomputed from the problem and the result's jets and
//! polynomials; the pipeline's own diagnostics are only used as inputs to
//! recomputations (the reassembled root and its defect), never as verdicts.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::approx::{ApproxProblem, ApproxResult};
use crate::elim::projection_eliminant;
use crate::jet::{eval_poly_at_jets_like, polydisc_samples, sup_on_samples, tougeron_correct, Jet, ZPoly};
use crate::poly::{GaussRat, MultiPoly, UniOverPoly};

/// Relative slack for ties in the convergence check.
const TIE_SLACK: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub check: String,
    pub passed: bool,
    /// Measured quantity (largest residual, largest violation, …).
    pub value: f64,
    pub threshold: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Verdict {
    fn at_most(check: &str, value: f64, threshold: f64) -> Verdict {
        Verdict { check: check.into(), passed: value <= threshold, value, threshold, detail: None }
    }

    fn flag(check: &str, passed: bool, detail: Option<String>) -> Verdict {
        Verdict { check: check.into(), passed, value: if passed { 0.0 } else { 1.0 }, threshold: 0.0, detail }
    }

    fn failed(check: &str, detail: String) -> Verdict {
        Verdict::flag(check, false, Some(detail))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NuReport {
    pub nu: u32,
    pub variety_residual: f64,
    pub annihilator_residuals: Vec<f64>,
    pub degrees: Vec<usize>,
    pub valid_orders: Vec<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub key_identity_residual: Option<f64>,
    /// `2·sup|c·A'(α)| − sup|b − α|` on the sample points.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tougeron_margin: Option<f64>,
    pub verdicts: Vec<Verdict>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub nu: u32,
    /// Largest coefficient modulus of output minus reference, per component.
    pub errors: Vec<f64>,
    pub max_error: f64,
    /// Weighted polydisc norm `Σ|c_α| r^{|α|}` of the largest difference.
    pub weighted_error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub source_names: Vec<String>,
    pub component_names: Vec<String>,
    pub order: u32,
    pub tolerance: f64,
    pub radius: f64,
    pub composed: bool,
    pub per_nu: Vec<NuReport>,
    pub convergence: Vec<ConvergenceRow>,
    pub degree_table: Vec<Vec<usize>>,
    pub verdicts: Vec<Verdict>,
    pub passed: bool,
}

impl Report {
    /// Failed verdicts as `(ν or None, verdict)`.
    pub fn failures(&self) -> Vec<(Option<u32>, &Verdict)> {
        let mut out: Vec<(Option<u32>, &Verdict)> = Vec::new();
        for r in &self.per_nu {
            out.extend(r.verdicts.iter().filter(|v| !v.passed).map(|v| (Some(r.nu), v)));
        }
        out.extend(self.verdicts.iter().filter(|v| !v.passed).map(|v| (None, v)));
        out
    }

    /// Whether every verdict with the given name passed.
    pub fn check_passed(&self, check: &str) -> bool {
        self.per_nu.iter().flat_map(|r| &r.verdicts).chain(&self.verdicts).filter(|v| v.check == check).all(|v| v.passed)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports are always serializable")
    }

    /// Plain-text tables.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "components: {}", self.component_names.join(", "));
        let _ = writeln!(s, "order {}  tolerance {:e}  radius {}", self.order, self.tolerance, self.radius);
        let _ = writeln!(s, "{:>4}  {:>12}  {:>12}  {:>12}  {:>12}  degrees", "nu", "variety", "annihilator", "key", "max error");
        for (r, c) in self.per_nu.iter().zip(&self.convergence) {
            let ann = r.annihilator_residuals.iter().cloned().fold(0.0, f64::max);
            let key = r.key_identity_residual.map(|k| format!("{k:12.3e}")).unwrap_or_else(|| format!("{:>12}", "-"));
            let _ = writeln!(
                s,
                "{:>4}  {:12.3e}  {:12.3e}  {}  {:12.3e}  {:?}",
                r.nu, r.variety_residual, ann, key, c.max_error, r.degrees
            );
        }
        for (nu, v) in self.failures() {
            let at = nu.map(|n| format!(" at nu = {n}")).unwrap_or_default();
            let _ = writeln!(s, "FAIL {}{at}: {:e} > {:e}{}", v.check, v.value, v.threshold, v.detail.as_ref().map(|d| format!(" ({d})")).unwrap_or_default());
        }
        let _ = writeln!(s, "{}", if self.passed { "all checks passed" } else { "verification failed" });
        s
    }
}

fn max_of(v: impl IntoIterator<Item = f64>) -> f64 {
    v.into_iter().fold(0.0, |a, b| if b.is_nan() || a.is_nan() { f64::NAN } else { a.max(b) })
}

fn residual_of(p: &MultiPoly, args: &[Jet], shape: &Jet) -> f64 {
    eval_poly_at_jets_like(p, args, shape).max_abs()
}

fn annihilator_residual(p: &UniOverPoly, branch: &Jet) -> f64 {
    let n = branch.nvars();
    let mut args: Vec<Jet> = (0..n).map(|i| Jet::var(n, branch.order(), branch.ctx(), i)).collect();
    args.push(branch.clone());
    residual_of(&p.to_multi(), &args, branch)
}

/// Per ν and component, distance of the outputs from `reference`.
pub fn convergence_table(result: &ApproxResult, reference: &[Jet], radius: f64) -> Result<Vec<ConvergenceRow>, String> {
    let mut rows = Vec::with_capacity(result.approximations.len());
    for a in &result.approximations {
        if a.functions.len() != reference.len() {
            return Err(format!("{} outputs against {} reference jets", a.functions.len(), reference.len()));
        }
        let mut errors = Vec::with_capacity(reference.len());
        let mut weighted: f64 = 0.0;
        for (f, r) in a.functions.iter().zip(reference) {
            if f.branch.nvars() != r.nvars() || f.branch.order() != r.order() {
                return Err("output and reference jets differ in shape".into());
            }
            let diff = &f.branch - r;
            errors.push(diff.max_abs());
            weighted = weighted.max(diff.weighted_norm(radius));
        }
        rows.push(ConvergenceRow { nu: a.nu, max_error: max_of(errors.iter().cloned()), errors, weighted_error: weighted });
    }
    Ok(rows)
}

/// Recomputes every checked property of `result` for `problem`.
pub fn verify_result(problem: &ApproxProblem, result: &ApproxResult) -> Report {
    let cfg = &problem.config;
    let tol = cfg.tolerance;
    let offset = result.output_offset;
    let mut per_nu = Vec::with_capacity(result.approximations.len());
    let mut global = Vec::new();

    let shape_ok = result.approximations.iter().all(|a| {
        a.functions.len() + offset == problem.variety.nvars()
            && a.functions.iter().all(|f| f.branch.nvars() == problem.source_dim() && f.branch.order() == problem.order())
    });
    global.push(Verdict::flag("shape", shape_ok, (!shape_ok).then(|| "outputs do not match the problem".to_string())));
    let nus_ok = result.nu_list() == problem.nu_list;
    global.push(Verdict::flag("nu_list", nus_ok, (!nus_ok).then(|| "indices differ from the request".to_string())));
    if !shape_ok {
        return finish(problem, result, per_nu, global, Vec::new());
    }

    for (k, a) in result.approximations.iter().enumerate() {
        let ambient = result.ambient_values(k);
        let mut verdicts = Vec::new();
        let variety_residual = max_of(problem.variety.generators().iter().map(|g| residual_of(g, &ambient, &ambient[0])));
        verdicts.push(Verdict::at_most("variety_residual", variety_residual, tol));
        let annihilator_residuals: Vec<f64> =
            a.functions.iter().map(|f| annihilator_residual(&f.annihilator, &f.branch)).collect();
        verdicts.push(Verdict::at_most("annihilator_residual", max_of(annihilator_residuals.iter().cloned()), tol));
        let monic = a.functions.iter().all(|f| f.annihilator.is_monic() && f.annihilator.nvars() == problem.source_dim() + 1);
        verdicts.push(Verdict::flag("unitary", monic, None));
        let mut report = NuReport {
            nu: a.nu,
            variety_residual,
            annihilator_residuals,
            degrees: a.functions.iter().map(|f| f.degree()).collect(),
            valid_orders: a.functions.iter().map(|f| f.valid_order()).collect(),
            key_identity_residual: None,
            tougeron_margin: None,
            verdicts,
        };
        if !result.composed {
            top_level_checks(problem, result, k, &ambient, &mut report);
        }
        per_nu.push(report);
    }

    let reference = &problem.solution_jet[offset..];
    let convergence = match convergence_table(result, reference, cfg.radius) {
        Ok(rows) => rows,
        Err(e) => {
            global.push(Verdict::failed("convergence_monotone", e));
            Vec::new()
        }
    };
    let worst = convergence
        .windows(2)
        .map(|w| w[1].max_error - w[0].max_error * (1.0 + TIE_SLACK))
        .fold(0.0, f64::max);
    if !convergence.is_empty() {
        global.push(Verdict::at_most("convergence_monotone", worst, 0.0));
    }
    let stable = result.degrees_stable();
    global.push(Verdict::flag("degree_stability", stable, (!stable).then(|| format!("{:?}", result.degree_table()))));
    finish(problem, result, per_nu, global, convergence)
}

fn finish(
    problem: &ApproxProblem,
    result: &ApproxResult,
    per_nu: Vec<NuReport>,
    verdicts: Vec<Verdict>,
    convergence: Vec<ConvergenceRow>,
) -> Report {
    let passed = per_nu.iter().flat_map(|r| &r.verdicts).chain(&verdicts).all(|v| v.passed);
    Report {
        source_names: result.source_names.clone(),
        component_names: result.component_names.clone(),
        order: problem.order(),
        tolerance: problem.config.tolerance,
        radius: problem.config.radius,
        composed: result.composed,
        per_nu,
        convergence,
        degree_table: result.degree_table(),
        verdicts,
        passed,
    }
}

/// Checks tied to the top level of the recursion: the annihilators are
/// re-eliminated, and the corrected root is recomputed from the reassembled
/// root and its defect and compared with the outputs.
fn top_level_checks(problem: &ApproxProblem, result: &ApproxResult, k: usize, ambient: &[Jet], report: &mut NuReport) {
    let tol = problem.config.tolerance;
    let trace = &result.trace;
    let a = &result.approximations[k];
    let diag = &a.diagnostics;
    let (m, n) = (trace.base_dim, problem.source_dim());
    let big_n = ambient.len();
    let working = trace.ambient_change.forward_values(ambient);
    let shape = &ambient[0];

    if diag.base_annihilators.len() != m {
        report.verdicts.push(Verdict::failed("annihilator_reproduction", "missing base annihilators".into()));
        return;
    }
    let base_res = max_of(diag.base_annihilators.iter().zip(&working).map(|(p, j)| annihilator_residual(p, j)));
    report.verdicts.push(Verdict::at_most("base_annihilator_residual", base_res, tol));

    // Re-elimination in (x, z), original coordinates.
    let total = n + big_n;
    let zs: Vec<usize> = (n..total).collect();
    let mut gens: Vec<MultiPoly> = Vec::new();
    let mut ok = true;
    for g in trace.working_variety.generators() {
        match trace.ambient_change.backward_poly(g) {
            Ok(p) => gens.push(p.remap(total, &zs)),
            Err(_) => ok = false,
        }
    }
    for (i, p) in diag.base_annihilators.iter().enumerate() {
        let mut form = MultiPoly::zero(total);
        for (c, coeff) in trace.ambient_change.inverse[i].iter().enumerate() {
            form = &form + &MultiPoly::var(total, n + c).scale(&GaussRat::from_rational(coeff.clone()));
        }
        let mut args: Vec<MultiPoly> = (0..n).map(|v| MultiPoly::var(total, v)).collect();
        args.push(form);
        let e = p.to_multi().compose(&args);
        if !e.is_zero() && !gens.contains(&e) {
            gens.push(e);
        }
    }
    let base_vars: Vec<usize> = (0..n).collect();
    let mut mismatch = Vec::new();
    for (c, f) in a.functions.iter().enumerate() {
        let comp = c + result.output_offset;
        let expected = if trace.ambient_change.is_identity() && comp < m {
            Ok(diag.base_annihilators[comp].clone())
        } else {
            projection_eliminant(total, &gens, &base_vars, n + comp).map_err(|e| e.to_string())
        };
        match expected {
            Ok(p) if p == f.annihilator => {}
            Ok(_) => mismatch.push(format!("component {comp} differs")),
            Err(e) => mismatch.push(format!("component {comp}: {e}")),
        }
    }
    let passed = ok && mismatch.is_empty();
    report.verdicts.push(Verdict::flag("annihilator_reproduction", passed, (!passed).then(|| mismatch.join("; "))));

    // Key identity and correction, from the base outputs and the reassembled root.
    let optimal = trace.optimal_polynomial.to_multi();
    let a_poly = ZPoly::from_multipoly_like(&optimal, m, &working[..m], shape);
    let alpha = &diag.approximate_root;
    let defect = &diag.defect;
    let slope = a_poly.derivative().eval(alpha);
    let key = &a_poly.eval(alpha) - &(defect * &(&slope * &slope));
    let valid = alpha.valid_order().min(defect.valid_order()).min(working[..m].iter().map(|j| j.valid_order()).min().unwrap_or(u32::MAX));
    let key_res = key.max_abs_upto(valid);
    report.key_identity_residual = Some(key_res);
    report.verdicts.push(Verdict::at_most("key_identity", key_res, tol));

    let cfg = &problem.config;
    match tougeron_correct(&a_poly, alpha, defect, &cfg.tougeron()) {
        Ok(out) => {
            let fiber = &working[m..];
            let mut lw = Jet::zero(shape.nvars(), shape.order(), shape.ctx());
            for (c, j) in trace.linear_form.iter().zip(fiber) {
                lw = &lw + &j.scale_gauss(c);
            }
            // Compared through the full order: the outputs are computed from this root.
            let gap = (&out.b - &lw).max_abs();
            report.verdicts.push(Verdict::at_most("tougeron_root", gap, tol));
            let samples = polydisc_samples(n, cfg.radius, cfg.samples);
            let shift = sup_on_samples(&(&out.b - alpha), &samples);
            let bound = 2.0 * sup_on_samples(&(defect * &slope), &samples);
            report.tougeron_margin = Some(bound - shift);
            report.verdicts.push(Verdict::at_most("tougeron_bound", shift - bound, 0.0));
        }
        Err(e) => report.verdicts.push(Verdict::failed("tougeron_root", e.to_string())),
    }
}
