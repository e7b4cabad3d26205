//! JSON forms of problems and results.
//!
//! Problem: `{"mode": "theorem"|"variety", "x_vars": […], "y_vars": […],
//! "Q": ["poly", …] or a variety object, "jet": {name: jet}, "declared_dim": m,
//! "nu": […], "order": D, "config": {…}}`. Polynomials are text, jets use the
//! jet JSON form. Results carry no timings, so equal runs serialize identically.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::elim::{VarietyJson, VarietySpec};
use crate::genericity::ChangeRecord;
use crate::jet::{jet_from_json, jet_to_json, Jet, JetCtx, JetJson};
use crate::poly::{parse_poly, GaussRat, UniOverPoly};

use super::solution::graph_problem;
use super::{
    ApproxConfig, ApproxError, ApproxProblem, ApproxResult, LevelTrace, NashFunction, NuApproximation,
    NuDiagnostics, TougeronSummary,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProblemMode {
    /// Solutions `y = f(x)` of `Q(x, y) = 0`.
    Theorem,
    /// A map from the source into a given variety.
    Variety,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TargetJson {
    Polynomials(Vec<String>),
    Variety(VarietyJson),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<ProblemMode>,
    pub x_vars: Vec<String>,
    #[serde(default)]
    pub y_vars: Vec<String>,
    /// Missing means no equations.
    #[serde(rename = "Q", alias = "variety", default, skip_serializing_if = "Option::is_none")]
    pub target: Option<TargetJson>,
    pub jet: BTreeMap<String, JetJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub declared_dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu: Option<Vec<u32>>,
    /// Jets are truncated to this order when given.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config: Option<ApproxConfig>,
}

impl ProblemJson {
    pub fn parse(text: &str) -> Result<Self, ApproxError> {
        serde_json::from_str(text).map_err(|e| ApproxError::input(format!("malformed problem: {e}")))
    }

    /// The declared mode, else `variety` for a variety object and `theorem` otherwise.
    pub fn mode(&self) -> ProblemMode {
        self.mode.unwrap_or(match self.target {
            Some(TargetJson::Variety(_)) => ProblemMode::Variety,
            _ => ProblemMode::Theorem,
        })
    }

    pub fn config(&self) -> ApproxConfig {
        self.config.clone().unwrap_or_default()
    }

    pub fn build(&self) -> Result<ApproxProblem, ApproxError> {
        let cfg = self.config();
        cfg.validate()?;
        let nu = self.nu.clone().ok_or_else(|| ApproxError::input("no approximation indices given"))?;
        let n = self.x_vars.len();
        let names_of_jets: Vec<String> = match self.mode() {
            ProblemMode::Theorem => self.y_vars.clone(),
            ProblemMode::Variety => match &self.target {
                Some(TargetJson::Variety(v)) => v.base_vars.iter().chain(&v.fiber_vars).cloned().collect(),
                _ => return Err(ApproxError::input("variety mode needs a variety object")),
            },
        };
        let jets = self.jets(&names_of_jets, n, cfg.jet_ctx())?;
        match self.mode() {
            ProblemMode::Theorem => {
                let all: Vec<String> = self.x_vars.iter().chain(&self.y_vars).cloned().collect();
                let q = match &self.target {
                    None => Vec::new(),
                    Some(TargetJson::Polynomials(ps)) => ps
                        .iter()
                        .map(|t| parse_poly(t, &all))
                        .collect::<Result<Vec<_>, _>>()
                        .map_err(|e| ApproxError::input(e.to_string()))?,
                    Some(TargetJson::Variety(_)) => {
                        return Err(ApproxError::input("theorem mode takes a list of polynomials"))
                    }
                };
                graph_problem(&q, &self.x_vars, &self.y_vars, &jets, self.declared_dim, nu, cfg)
            }
            ProblemMode::Variety => {
                let Some(TargetJson::Variety(v)) = &self.target else { unreachable!("checked above") };
                let mut v = v.clone();
                if let Some(d) = self.declared_dim {
                    v.declared_dim = d;
                }
                let variety = VarietySpec::from_json(&v).map_err(|e| ApproxError::input(e.to_string()))?;
                ApproxProblem::new(variety, self.x_vars.clone(), jets, nu, cfg)
            }
        }
    }

    fn jets(&self, names: &[String], n: usize, ctx: JetCtx) -> Result<Vec<Jet>, ApproxError> {
        if let Some(extra) = self.jet.keys().find(|k| !names.contains(k)) {
            return Err(ApproxError::input(format!("jet given for unknown component '{extra}'")));
        }
        let mut out = Vec::with_capacity(names.len());
        for name in names {
            let js = self.jet.get(name).ok_or_else(|| ApproxError::input(format!("no jet for '{name}'")))?;
            if js.nvars != n {
                return Err(ApproxError::input(format!("jet for '{name}' has {} variables, expected {n}", js.nvars)));
            }
            let j = jet_from_json(js, ctx).map_err(|e| ApproxError::input(format!("jet for '{name}': {e}")))?;
            let j = match self.order {
                Some(d) if d > j.order() => {
                    return Err(ApproxError::input(format!("jet for '{name}' has order {} below {d}", j.order())))
                }
                Some(d) => j.with_order(d),
                None => j,
            };
            out.push(j);
        }
        Ok(out)
    }
}

/// A name for the dependent variable of annihilators not clashing with `names`.
pub fn dependent_name(names: &[String]) -> String {
    let mut z = "z".to_string();
    while names.contains(&z) {
        z.push('_');
    }
    z
}

fn with_dependent(names: &[String]) -> Vec<String> {
    let mut all = names.to_vec();
    all.push(dependent_name(names));
    all
}

fn uni_text(p: &UniOverPoly, names: &[String]) -> String {
    p.to_multi().to_text(&with_dependent(names))
}

fn parse_uni(text: &str, names: &[String]) -> Result<UniOverPoly, String> {
    let p = parse_poly(text, &with_dependent(names)).map_err(|e| e.to_string())?;
    UniOverPoly::from_multi(&p, names.len()).map_err(|e| e.to_string())
}

fn parse_gauss(text: &str) -> Result<GaussRat, String> {
    let p = parse_poly(text, &[]).map_err(|e| e.to_string())?;
    Ok(p.constant_term())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FunctionJson {
    pub name: String,
    /// In the source variables and the dependent variable.
    pub annihilator: String,
    pub degree: usize,
    pub valid_order: u32,
    pub branch: JetJson,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsJson {
    pub approximate_root: JetJson,
    pub approximate_root_valid_order: u32,
    pub defect: JetJson,
    pub defect_valid_order: u32,
    /// In the source variables and the dependent variable.
    pub base_annihilators: Vec<String>,
    pub key_identity_residual: f64,
    pub tougeron: TougeronSummary,
    pub newton_iterations: usize,
    pub newton_residual: f64,
    pub variety_residual: f64,
    pub annihilator_residuals: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NuJson {
    pub nu: u32,
    pub functions: Vec<FunctionJson>,
    pub diagnostics: DiagnosticsJson,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelTraceJson {
    pub depth: usize,
    pub source_dim: usize,
    pub base_dim: usize,
    pub fiber_dim: usize,
    pub descents: Vec<String>,
    pub ambient_change: ChangeRecord,
    pub source_change: ChangeRecord,
    pub linear_form: Vec<String>,
    pub fiber_count: usize,
    /// In the base variables of the working variety and the dependent variable.
    pub optimal_polynomial: String,
    pub discriminant: String,
    pub weierstrass_degree: usize,
    pub working_variety: VarietyJson,
    pub division_equations: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub recursion: Option<Box<LevelTraceJson>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultJson {
    pub source_names: Vec<String>,
    pub component_names: Vec<String>,
    pub output_offset: usize,
    pub composed: bool,
    pub approximations: Vec<NuJson>,
    pub trace: LevelTraceJson,
}

impl LevelTraceJson {
    pub fn from_trace(t: &LevelTrace) -> Self {
        let names = t.working_variety.names();
        let base = with_dependent(&names[..t.base_dim]);
        LevelTraceJson {
            depth: t.depth,
            source_dim: t.source_dim,
            base_dim: t.base_dim,
            fiber_dim: t.fiber_dim,
            descents: t.descents.iter().map(|p| p.to_text(names)).collect(),
            ambient_change: t.ambient_change.clone(),
            source_change: t.source_change.clone(),
            linear_form: t.linear_form.iter().map(|c| c.to_string()).collect(),
            fiber_count: t.fiber_count,
            optimal_polynomial: t.optimal_polynomial.to_multi().to_text(&base),
            discriminant: t.discriminant.to_text(&base),
            weierstrass_degree: t.weierstrass_degree,
            working_variety: t.working_variety.to_json(),
            division_equations: t.division_equations,
            recursion: t.recursion.as_ref().map(|r| Box::new(LevelTraceJson::from_trace(r))),
        }
    }

    pub fn to_trace(&self) -> Result<LevelTrace, String> {
        let working_variety = VarietySpec::from_json(&self.working_variety).map_err(|e| e.to_string())?;
        let names = working_variety.names().to_vec();
        let base_names = names[..self.base_dim].to_vec();
        let base = with_dependent(&base_names);
        let parse = |t: &str, vars: &[String]| parse_poly(t, vars).map_err(|e| e.to_string());
        Ok(LevelTrace {
            depth: self.depth,
            source_dim: self.source_dim,
            ambient_names: names.clone(),
            base_dim: self.base_dim,
            fiber_dim: self.fiber_dim,
            descents: self.descents.iter().map(|t| parse(t, &names)).collect::<Result<_, _>>()?,
            ambient_change: self.ambient_change.clone(),
            source_change: self.source_change.clone(),
            linear_form: self.linear_form.iter().map(|t| parse_gauss(t)).collect::<Result<_, _>>()?,
            fiber_count: self.fiber_count,
            optimal_polynomial: parse_uni(&self.optimal_polynomial, &base_names)?,
            discriminant: parse(&self.discriminant, &base)?,
            weierstrass_degree: self.weierstrass_degree,
            working_variety,
            division_equations: self.division_equations,
            recursion: self.recursion.as_ref().map(|r| r.to_trace().map(Box::new)).transpose()?,
            timings: Vec::new(),
        })
    }
}

impl ResultJson {
    pub fn from_result(r: &ApproxResult) -> Self {
        let src = &r.source_names;
        let approximations = r
            .approximations
            .iter()
            .map(|a| NuJson {
                nu: a.nu,
                functions: a
                    .functions
                    .iter()
                    .zip(&r.component_names)
                    .map(|(f, name)| FunctionJson {
                        name: name.clone(),
                        annihilator: uni_text(&f.annihilator, src),
                        degree: f.degree(),
                        valid_order: f.valid_order(),
                        branch: jet_to_json(&f.branch),
                    })
                    .collect(),
                diagnostics: {
                    let d = &a.diagnostics;
                    DiagnosticsJson {
                        approximate_root: jet_to_json(&d.approximate_root),
                        approximate_root_valid_order: d.approximate_root.valid_order(),
                        defect: jet_to_json(&d.defect),
                        defect_valid_order: d.defect.valid_order(),
                        base_annihilators: d.base_annihilators.iter().map(|p| uni_text(p, src)).collect(),
                        key_identity_residual: d.key_identity_residual,
                        tougeron: d.tougeron.clone(),
                        newton_iterations: d.newton_iterations,
                        newton_residual: d.newton_residual,
                        variety_residual: d.variety_residual,
                        annihilator_residuals: d.annihilator_residuals.clone(),
                    }
                },
            })
            .collect();
        ResultJson {
            source_names: src.clone(),
            component_names: r.component_names.clone(),
            output_offset: r.output_offset,
            composed: r.composed,
            approximations,
            trace: LevelTraceJson::from_trace(&r.trace),
        }
    }

    pub fn to_result(&self, ctx: JetCtx) -> Result<ApproxResult, String> {
        let src = &self.source_names;
        let jet = |js: &JetJson, valid: u32| jet_from_json(js, ctx).map(|j| j.with_valid_order(valid));
        let mut approximations = Vec::with_capacity(self.approximations.len());
        for a in &self.approximations {
            let functions = a
                .functions
                .iter()
                .map(|f| Ok(NashFunction::new(parse_uni(&f.annihilator, src)?, jet(&f.branch, f.valid_order)?)))
                .collect::<Result<Vec<_>, String>>()?;
            let d = &a.diagnostics;
            let diagnostics = NuDiagnostics {
                approximate_root: jet(&d.approximate_root, d.approximate_root_valid_order)?,
                defect: jet(&d.defect, d.defect_valid_order)?,
                base_annihilators: d.base_annihilators.iter().map(|t| parse_uni(t, src)).collect::<Result<_, _>>()?,
                key_identity_residual: d.key_identity_residual,
                tougeron: d.tougeron.clone(),
                newton_iterations: d.newton_iterations,
                newton_residual: d.newton_residual,
                variety_residual: d.variety_residual,
                annihilator_residuals: d.annihilator_residuals.clone(),
            };
            approximations.push(NuApproximation { nu: a.nu, functions, diagnostics });
        }
        Ok(ApproxResult {
            component_names: self.component_names.clone(),
            source_names: src.clone(),
            output_offset: self.output_offset,
            approximations,
            trace: self.trace.to_trace()?,
            composed: self.composed,
        })
    }

    /// Pretty-printed, deterministic text.
    pub fn to_text(&self) -> String {
        serde_json::to_string_pretty(self).expect("result JSON is always serializable")
    }
}

/// Exact polynomial text in the given variable names, with the dependent variable appended.
pub fn annihilator_text(p: &UniOverPoly, source_names: &[String]) -> String {
    uni_text(p, source_names)
}

/// Inverse of [`annihilator_text`].
pub fn parse_annihilator(text: &str, source_names: &[String]) -> Result<UniOverPoly, String> {
    parse_uni(text, source_names)
}
