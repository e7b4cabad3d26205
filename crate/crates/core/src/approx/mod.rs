//! Approximation of a holomorphic map into an algebraic set by Nash maps.
//!
//! A level of the recursion reduces the target to a hypersurface with proper
//! projection, divides the data by the square of a Weierstrass polynomial,
//! approximates the division coefficients one dimension lower, reassembles
//! approximate roots, corrects them to exact roots and attaches annihilators.

mod annihilate;
mod assemble;
mod division;
mod json;
mod reduce;
mod solution;
pub mod tsystem;

use std::fmt;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::elim::{ElimError, VarietySpec};
use crate::genericity::{ChangeRecord, GenericityError};
use crate::jet::{eval_poly_at_jets_like, Jet, JetCtx, JetError, NewtonConfig, TougeronConfig};
use crate::poly::{GaussRat, MultiPoly, PolyError, UniOverPoly};

pub use annihilate::{closure_annihilator, compute_annihilators, Annihilated, AnnihilatorData};
pub use assemble::{assemble_candidates, correct_and_lift, Candidates, LiftSystem, Lifted};
pub use division::{prepare_division_data, recurse_or_base, CoefficientApprox, DivisionData};
pub use json::{
    annihilator_text, dependent_name, parse_annihilator, DiagnosticsJson, FunctionJson, LevelTraceJson, NuJson,
    ProblemJson, ProblemMode, ResultJson, TargetJson,
};
pub use reduce::{reduce_to_hypersurface, Reduction};
pub use solution::{approximate_solution, graph_problem, invert_jet_map};
pub use tsystem::{build_t_system, TSystem};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ApproxConfig {
    /// Working precision of jet coefficients, in bits.
    pub precision: usize,
    /// Threshold for every "vanishes as a jet" test and for admission.
    pub tolerance: f64,
    /// Stopping threshold of the correction fixed-point iteration.
    pub tougeron_tolerance: f64,
    /// Coefficients below this modulus are dropped from jets.
    pub hard_zero: f64,
    pub seed: u64,
    /// Attempts per randomized choice.
    pub max_tries: usize,
    pub max_depth: usize,
    /// Polydisc radius for sup-norm estimates.
    pub radius: f64,
    /// Sample points on the polydisc torus.
    pub samples: usize,
}

impl Default for ApproxConfig {
    fn default() -> Self {
        ApproxConfig {
            precision: 128,
            tolerance: 1e-9,
            tougeron_tolerance: 1e-12,
            hard_zero: 1e-30,
            seed: 0,
            max_tries: 64,
            max_depth: 4,
            radius: 0.5,
            samples: 128,
        }
    }
}

impl ApproxConfig {
    pub fn validate(&self) -> Result<(), ApproxError> {
        if self.precision < 64 {
            return Err(ApproxError::input("precision must be at least 64 bits"));
        }
        let positive = [self.tolerance, self.tougeron_tolerance, self.hard_zero, self.radius];
        if positive.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(ApproxError::input("tolerances and radius must be positive"));
        }
        if self.max_tries == 0 {
            return Err(ApproxError::input("max_tries must be positive"));
        }
        if self.samples < 100 {
            return Err(ApproxError::input("at least 100 sample points are required"));
        }
        Ok(())
    }

    pub fn jet_ctx(&self) -> JetCtx {
        JetCtx::new(self.precision, self.hard_zero)
    }

    pub fn tougeron(&self) -> TougeronConfig {
        TougeronConfig {
            radius: self.radius,
            tolerance: self.tougeron_tolerance,
            samples: self.samples,
            ..TougeronConfig::default()
        }
    }

    pub fn newton(&self) -> NewtonConfig {
        let floor = 2f64.powi(16 - self.precision as i32);
        NewtonConfig { tol: 1e-28_f64.max(floor), accept: self.tolerance * 1e-2, ..NewtonConfig::default() }
    }
}

/// Pipeline stage, used to label errors and timings.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Admission,
    Reduction,
    Preparation,
    DivisionSystem,
    Recursion,
    Assembly,
    Correction,
    Lift,
    Annihilators,
    Inversion,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Stage::Admission => "admission",
            Stage::Reduction => "reduction",
            Stage::Preparation => "preparation",
            Stage::DivisionSystem => "division system",
            Stage::Recursion => "recursion",
            Stage::Assembly => "assembly",
            Stage::Correction => "correction",
            Stage::Lift => "lift",
            Stage::Annihilators => "annihilators",
            Stage::Inversion => "inversion",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ApproxError {
    #[error("invalid input: {0}")]
    Input(String),
    #[error("{stage} failed at depth {depth}: {message}")]
    Stage { stage: Stage, depth: usize, message: String, trace: Vec<Stage> },
    #[error("internal inconsistency: {0}")]
    Internal(String),
}

impl ApproxError {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        ApproxError::Input(msg.into())
    }

    pub(crate) fn internal(msg: impl Into<String>) -> Self {
        ApproxError::Internal(msg.into())
    }

    pub(crate) fn at(stage: Stage, depth: usize, msg: impl fmt::Display) -> Self {
        ApproxError::Stage { stage, depth, message: msg.to_string(), trace: vec![stage] }
    }

    pub fn is_input(&self) -> bool {
        matches!(self, ApproxError::Input(_))
    }

    /// Stages from the outermost level down to the failing one.
    pub fn stage_trace(&self) -> Vec<Stage> {
        match self {
            ApproxError::Stage { trace, .. } => trace.clone(),
            _ => Vec::new(),
        }
    }
}

trait AtStage<T> {
    fn at(self, stage: Stage, depth: usize) -> Result<T, ApproxError>;
}

macro_rules! at_stage {
    ($($err:ty),*) => {$(
        impl<T> AtStage<T> for Result<T, $err> {
            fn at(self, stage: Stage, depth: usize) -> Result<T, ApproxError> {
                self.map_err(|e| ApproxError::at(stage, depth, e))
            }
        }
    )*};
}
at_stage!(ElimError, GenericityError, JetError, PolyError);

impl<T> AtStage<T> for Result<T, ApproxError> {
    fn at(self, stage: Stage, depth: usize) -> Result<T, ApproxError> {
        self.map_err(|e| {
            let mut trace = vec![stage];
            trace.extend(e.stage_trace());
            ApproxError::Stage { stage, depth, message: e.to_string(), trace }
        })
    }
}

/// A target set together with the jet of a map into it.
#[derive(Clone, Debug, PartialEq)]
pub struct ApproxProblem {
    pub variety: VarietySpec,
    pub source_names: Vec<String>,
    /// One jet per ambient coordinate of the variety, all at the same order.
    pub solution_jet: Vec<Jet>,
    pub nu_list: Vec<u32>,
    pub config: ApproxConfig,
    /// Number of leading ambient coordinates that equal the source coordinates
    /// (graph problems); they are never moved and are not reported as outputs.
    pub graph_dims: usize,
}

impl ApproxProblem {
    pub fn new(
        variety: VarietySpec,
        source_names: Vec<String>,
        solution_jet: Vec<Jet>,
        nu_list: Vec<u32>,
        config: ApproxConfig,
    ) -> Result<Self, ApproxError> {
        let p = ApproxProblem { variety, source_names, solution_jet, nu_list, config, graph_dims: 0 };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), ApproxError> {
        self.config.validate()?;
        let n = self.source_names.len();
        if n == 0 {
            return Err(ApproxError::input("at least one source variable is required"));
        }
        if self.solution_jet.len() != self.variety.nvars() {
            return Err(ApproxError::input(format!(
                "{} jets for {} ambient coordinates",
                self.solution_jet.len(),
                self.variety.nvars()
            )));
        }
        let order = self.order();
        if order < 2 {
            return Err(ApproxError::input("jet order must be at least 2"));
        }
        for j in &self.solution_jet {
            if j.nvars() != n || j.order() != order {
                return Err(ApproxError::input("all jets need the source variables and one common order"));
            }
        }
        if self.nu_list.is_empty() {
            return Err(ApproxError::input("the list of approximation indices is empty"));
        }
        if self.nu_list[0] == 0 || self.nu_list.windows(2).any(|w| w[0] >= w[1]) {
            return Err(ApproxError::input("approximation indices must be positive and strictly ascending"));
        }
        if self.graph_dims > self.variety.declared_dim() || self.graph_dims > n {
            return Err(ApproxError::input("graph coordinates exceed the declared dimension"));
        }
        Ok(())
    }

    pub fn order(&self) -> u32 {
        self.solution_jet.first().map(|j| j.order()).unwrap_or(0)
    }

    pub fn source_dim(&self) -> usize {
        self.source_names.len()
    }

    /// Largest generator residual on the solution jet, up to its valid order.
    pub fn admission_residual(&self) -> f64 {
        generator_residual(self.variety.generators(), &self.solution_jet)
    }

    /// Names of the reported components.
    pub fn output_names(&self) -> &[String] {
        &self.variety.names()[self.graph_dims..]
    }
}

/// Largest coefficient of the generators on `jets`, through the full order.
pub(crate) fn generator_residual(gens: &[MultiPoly], jets: &[Jet]) -> f64 {
    gens.iter()
        .map(|g| eval_poly_at_jets_like(g, jets, &jets[0]).max_abs())
        .fold(0.0, f64::max)
}

/// A branch jet with a polynomial, monic in its last variable `z`, vanishing on it.
#[derive(Clone, Debug, PartialEq)]
pub struct NashFunction {
    pub annihilator: UniOverPoly,
    pub branch: Jet,
}

impl NashFunction {
    pub fn new(annihilator: UniOverPoly, branch: Jet) -> Self {
        NashFunction { annihilator, branch }
    }

    pub fn degree(&self) -> usize {
        self.annihilator.degree()
    }

    pub fn valid_order(&self) -> u32 {
        self.branch.valid_order()
    }

    pub fn is_unitary(&self) -> bool {
        self.annihilator.is_monic()
    }

    /// Largest coefficient of `P(x, branch)`, through the full order.
    pub fn residual(&self) -> f64 {
        annihilator_residual(&self.annihilator, &self.branch)
    }
}

pub(crate) fn annihilator_residual(p: &UniOverPoly, branch: &Jet) -> f64 {
    let n = branch.nvars();
    let mut args: Vec<Jet> = (0..n).map(|i| Jet::var(n, branch.order(), branch.ctx(), i)).collect();
    args.push(branch.clone());
    eval_poly_at_jets_like(&p.to_multi(), &args, branch).max_abs()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TougeronSummary {
    pub iterations: usize,
    pub residual: f64,
    pub hypothesis_residual: f64,
    pub sup_shift: f64,
    pub sup_bound: f64,
    pub bound_holds: bool,
    pub contraction_estimate: f64,
}

/// Per-ν data of the top level, in working coordinates: the ambient coordinates
/// after the recorded change, the source coordinates as given.
#[derive(Clone, Debug, PartialEq)]
pub struct NuDiagnostics {
    /// Reassembled approximate root `f̄^ν` before correction.
    pub approximate_root: Jet,
    /// Defect `R^ν` with `P_L(f^ν, f̄^ν) = R^ν·(∂P_L/∂z(f^ν, f̄^ν))²`.
    pub defect: Jet,
    /// Annihilators of the base components.
    pub base_annihilators: Vec<UniOverPoly>,
    pub key_identity_residual: f64,
    pub tougeron: TougeronSummary,
    pub newton_iterations: usize,
    pub newton_residual: f64,
    pub variety_residual: f64,
    pub annihilator_residuals: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NuApproximation {
    pub nu: u32,
    /// One entry per reported component, in original coordinates.
    pub functions: Vec<NashFunction>,
    pub diagnostics: NuDiagnostics,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StageTiming {
    pub stage: Stage,
    pub seconds: f64,
}

/// What one level of the recursion decided.
#[derive(Clone, Debug, PartialEq)]
pub struct LevelTrace {
    pub depth: usize,
    pub source_dim: usize,
    pub ambient_names: Vec<String>,
    pub base_dim: usize,
    pub fiber_dim: usize,
    /// Discriminants added by descent, in the coordinates current at the time.
    pub descents: Vec<MultiPoly>,
    pub ambient_change: ChangeRecord,
    pub source_change: ChangeRecord,
    pub linear_form: Vec<GaussRat>,
    pub fiber_count: usize,
    pub optimal_polynomial: UniOverPoly,
    pub discriminant: MultiPoly,
    pub weierstrass_degree: usize,
    /// The variety after changes and descents, in working coordinates.
    pub working_variety: VarietySpec,
    pub division_equations: usize,
    pub recursion: Option<Box<LevelTrace>>,
    pub timings: Vec<StageTiming>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ApproxResult {
    pub component_names: Vec<String>,
    pub source_names: Vec<String>,
    /// Index of the first reported ambient component.
    pub output_offset: usize,
    pub approximations: Vec<NuApproximation>,
    pub trace: LevelTrace,
    /// Whether the source components had to be inverted and composed away.
    pub composed: bool,
}

impl ApproxResult {
    /// `degrees[k][i]`: annihilator degree of component `i` at the `k`-th ν.
    pub fn degree_table(&self) -> Vec<Vec<usize>> {
        self.approximations.iter().map(|a| a.functions.iter().map(|f| f.degree()).collect()).collect()
    }

    pub fn degrees_stable(&self) -> bool {
        self.degree_table().windows(2).all(|w| w[0] == w[1])
    }

    pub fn nu_list(&self) -> Vec<u32> {
        self.approximations.iter().map(|a| a.nu).collect()
    }

    /// Branch jets of all ambient components at the `k`-th ν (source components
    /// of graph problems are the coordinate functions).
    pub fn ambient_values(&self, k: usize) -> Vec<Jet> {
        let funcs = &self.approximations[k].functions;
        let shape = &funcs[0].branch;
        let n = shape.nvars();
        let mut out: Vec<Jet> = (0..self.output_offset).map(|i| Jet::var(n, shape.order(), shape.ctx(), i)).collect();
        out.extend(funcs.iter().map(|f| f.branch.clone()));
        out
    }
}

/// Per-ν output of one level, before reporting.
#[derive(Clone, Debug)]
pub(crate) struct LevelNu {
    pub nu: u32,
    /// All ambient components, original coordinates.
    pub values: Vec<Jet>,
    pub annihilators: Vec<UniOverPoly>,
    /// Generators in `(x, z)` vanishing on the graph of `values`.
    pub ideal: Vec<MultiPoly>,
    pub diagnostics: NuDiagnostics,
}

#[derive(Clone, Debug)]
pub(crate) struct LevelOutput {
    pub per_nu: Vec<LevelNu>,
    pub trace: LevelTrace,
}

struct Clock {
    start: Instant,
    timings: Vec<StageTiming>,
}

impl Clock {
    fn new() -> Self {
        Clock { start: Instant::now(), timings: Vec::new() }
    }

    fn lap(&mut self, stage: Stage) {
        let now = Instant::now();
        self.timings.push(StageTiming { stage, seconds: (now - self.start).as_secs_f64() });
        self.start = now;
    }
}

/// Runs the whole pipeline on `problem`; outputs every ambient component
/// except the leading graph coordinates.
pub fn approximate_into_variety(problem: &ApproxProblem) -> Result<ApproxResult, ApproxError> {
    problem.validate()?;
    let level = solve_level(
        &problem.variety,
        &problem.source_names,
        &problem.solution_jet,
        &problem.nu_list,
        &problem.config,
        0,
        problem.graph_dims,
    )?;
    let offset = problem.graph_dims;
    let mut composed = false;
    let mut per_nu = level.per_nu;
    if offset > 0 {
        for l in &mut per_nu {
            composed |= solution::normalize_graph(l, problem)?;
        }
    }
    let approximations = per_nu
        .into_iter()
        .map(|l| NuApproximation {
            nu: l.nu,
            functions: l
                .annihilators
                .into_iter()
                .zip(l.values)
                .skip(offset)
                .map(|(a, v)| NashFunction::new(a, v))
                .collect(),
            diagnostics: l.diagnostics,
        })
        .collect();
    Ok(ApproxResult {
        component_names: problem.output_names().to_vec(),
        source_names: problem.source_names.clone(),
        output_offset: offset,
        approximations,
        trace: level.trace,
        composed,
    })
}

/// One level: admission, reduction, division, recursion, and per-ν assembly.
/// `keep` leading ambient coordinates are never moved by coordinate changes.
pub(crate) fn solve_level(
    variety: &VarietySpec,
    source_names: &[String],
    jets: &[Jet],
    nus: &[u32],
    cfg: &ApproxConfig,
    depth: usize,
    keep: usize,
) -> Result<LevelOutput, ApproxError> {
    if depth > cfg.max_depth {
        return Err(ApproxError::at(Stage::Recursion, depth, format!("recursion depth {} exceeded", cfg.max_depth)));
    }
    let mut clock = Clock::new();
    let residual = generator_residual(variety.generators(), jets);
    if residual > cfg.tolerance {
        return Err(ApproxError::at(
            Stage::Admission,
            depth,
            format!("generators leave a residual of {residual:e} on the jet (tolerance {:e})", cfg.tolerance),
        ));
    }
    clock.lap(Stage::Admission);
    let red = reduce_to_hypersurface(variety, jets, cfg, depth, keep)?;
    clock.lap(Stage::Reduction);
    let div = prepare_division_data(&red.optimal, &red.jets, &red.form, cfg, depth)?;
    clock.lap(Stage::Preparation);
    let m = red.variety.base_count();
    let sys = TSystem::build(&red.optimal, m, div.d).at(Stage::DivisionSystem, depth)?;
    clock.lap(Stage::DivisionSystem);
    let coeffs = recurse_or_base(&sys, &div, nus, cfg, depth)?;
    clock.lap(Stage::Recursion);
    let annihilator_data = AnnihilatorData::new(&red, &div).at(Stage::Annihilators, depth)?;
    let lift = LiftSystem::new(&red).at(Stage::Lift, depth)?;
    let mut per_nu = Vec::with_capacity(nus.len());
    for (k, &nu) in nus.iter().enumerate() {
        let cand = assemble_candidates(&sys, &div, &coeffs.values[k], nu, cfg, depth)?;
        let lifted = correct_and_lift(&red, &div, &cand, &lift, cfg, depth)?;
        let Annihilated { values, annihilators, base_annihilators: base, ideal } =
            compute_annihilators(&red, &div, &coeffs.annihilators[k], &cand, &lifted, &annihilator_data, depth)?;
        let annihilator_residuals = annihilators.iter().zip(&values).map(|(p, v)| annihilator_residual(p, v)).collect();
        let diagnostics = NuDiagnostics {
            approximate_root: div.source_change.backward_jet(&cand.approximate_root),
            defect: div.source_change.backward_jet(&cand.defect),
            base_annihilators: base,
            key_identity_residual: cand.key_identity_residual,
            tougeron: lifted.tougeron.clone(),
            newton_iterations: lifted.newton_iterations,
            newton_residual: lifted.newton_residual,
            variety_residual: generator_residual(variety.generators(), &values),
            annihilator_residuals,
        };
        per_nu.push(LevelNu { nu, values, annihilators, ideal, diagnostics });
    }
    clock.lap(Stage::Annihilators);
    let trace = LevelTrace {
        depth,
        source_dim: source_names.len(),
        ambient_names: variety.names().to_vec(),
        base_dim: m,
        fiber_dim: red.variety.fiber_count(),
        descents: red.descents.clone(),
        ambient_change: red.change.clone(),
        source_change: div.source_change.clone(),
        linear_form: red.form.clone(),
        fiber_count: red.fiber_count,
        optimal_polynomial: red.optimal.clone(),
        discriminant: red.discriminant.clone(),
        weierstrass_degree: div.d,
        working_variety: red.variety.clone(),
        division_equations: sys.equations().len(),
        recursion: coeffs.trace.map(Box::new),
        timings: clock.timings,
    };
    Ok(LevelOutput { per_nu, trace })
}
