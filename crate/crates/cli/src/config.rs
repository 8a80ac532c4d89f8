//! Run configuration: JSON schema, defaults, and exhaustive validation.
//!
//! Validation collects every violated constraint with its field path rather
//! than stopping at the first, so a bad configuration is fixable in one
//! round trip.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use pbe_core::grid::InitialProfile;
use pbe_core::kernels::{
    BreakageSpec, CoagulationSpec, KernelSystem, SelectionSpec, Table1, Table2, TruncationParams,
};
use pbe_core::solver::IntegratorConfig;
use pbe_core::{DensityState64, GeometricGrid64, KernelSystem64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    #[default]
    Single,
    TruncationStudy,
    VerifyOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CoagulationFormId {
    Zero,
    Constant,
    Sum,
    Smoluchowski,
    Eke,
    Granulation,
    ShearLinear,
    ShearNonlinear,
    CustomTabulated,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum SelectionFormId {
    #[default]
    Zero,
    Constant,
    Power,
    Custom,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum BreakageFormId {
    #[default]
    BinaryUniform,
    TernaryUniform,
    Parabolic,
    Custom,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum ProfileId {
    #[default]
    Exponential,
    Monodisperse,
    Zero,
    CustomTabulated,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoagulationConfig {
    pub form: CoagulationFormId,
    /// Fractal dimension for the smoluchowski form (default 3).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    /// CSV path for the custom-tabulated form (three columns: x, y, rate).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<PathBuf>,
    /// Bound constants; catalog defaults are filled when omitted, the
    /// custom form requires them explicitly.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SelectionConfig {
    #[serde(default)]
    pub form: SelectionFormId,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    /// CSV path for the custom form (two columns: x, rate).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<PathBuf>,
}

impl Default for SelectionConfig {
    fn default() -> Self {
        Self { form: SelectionFormId::Zero, s0: None, alpha: None, table: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BreakageConfig {
    #[serde(default)]
    pub form: BreakageFormId,
    /// Fragment-count cap N.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_max: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b_bar: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y_threshold: Option<f64>,
    /// CSV path for the custom form (three columns: x, y, rate).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<PathBuf>,
}

impl Default for BreakageConfig {
    fn default() -> Self {
        Self {
            form: BreakageFormId::BinaryUniform,
            n_max: None,
            gamma: None,
            n0: None,
            b_bar: None,
            y_threshold: None,
            table: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelConfig {
    pub coagulation: CoagulationConfig,
    #[serde(default)]
    pub selection: SelectionConfig,
    #[serde(default)]
    pub breakage: BreakageConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub x_min: f64,
    pub x_max: f64,
    pub cells: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self { x_min: 1e-6, x_max: 1e3, cells: 180 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialConfig {
    #[serde(default)]
    pub profile: ProfileId,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mean: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cell: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amount: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<PathBuf>,
}

impl Default for InitialConfig {
    fn default() -> Self {
        Self { profile: ProfileId::Exponential, mean: None, cell: None, amount: None, table: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorSettings {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub t_end: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt_init: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt_max: Option<f64>,
}

impl Default for IntegratorSettings {
    fn default() -> Self {
        Self { rel_tol: 1e-8, abs_tol: 1e-12, t_end: 1.0, dt_init: None, dt_max: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TruncationConfig {
    pub n: u32,
    #[serde(default = "default_ramp")]
    pub ramp: f64,
}

fn default_ramp() -> f64 {
    TruncationParams::<f64>::DEFAULT_RAMP
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StudyConfig {
    pub n_list: Vec<u32>,
    pub omega_r1: f64,
    pub omega_r2: f64,
}

impl Default for StudyConfig {
    fn default() -> Self {
        Self { n_list: vec![4, 16, 64, 256], omega_r1: 2.0, omega_r2: 0.5 }
    }
}

/// Full run configuration; every field except the kernel declaration has a
/// documented default.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfiguration {
    pub kernel: KernelConfig,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub initial: InitialConfig,
    #[serde(default)]
    pub integrator: IntegratorSettings,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncation: Option<TruncationConfig>,
    #[serde(default)]
    pub mode: Mode,
    #[serde(default)]
    pub study: StudyConfig,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default = "default_snapshots")]
    pub snapshots: usize,
    #[serde(default = "default_strip")]
    pub envelope_strip: (f64, f64),
    #[serde(default)]
    pub dump_operator_tables: bool,
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("pbe_out")
}

fn default_snapshots() -> usize {
    20
}

fn default_strip() -> (f64, f64) {
    (0.1, 10.0)
}

/// A single violated constraint with its field path.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub path: String,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

/// Every violated constraint found while parsing/validating a document.
#[derive(Debug)]
pub struct ConfigErrors(pub Vec<Violation>);

impl fmt::Display for ConfigErrors {
    fmt_violations!();
}

macro_rules! fmt_violations {
    () => {
        fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            for v in &self.0 {
                writeln!(f, "{v}")?;
            }
            Ok(())
        }
    };
}
use fmt_violations;

impl std::error::Error for ConfigErrors {}

/// Parses a JSON document into a validated configuration.  Structural JSON
/// errors surface immediately; constraint violations are collected and
/// reported together.
pub fn parse_config(document: &str) -> Result<RunConfiguration, ConfigErrors> {
    let config: RunConfiguration = serde_json::from_str(document).map_err(|e| {
        ConfigErrors(vec![Violation { path: "<document>".into(), message: e.to_string() }])
    })?;
    let violations = validate(&config);
    if violations.is_empty() {
        Ok(config)
    } else {
        Err(ConfigErrors(violations))
    }
}

/// Fully built double-precision simulation components.
pub struct Built {
    pub system: KernelSystem64,
    pub grid: GeometricGrid64,
    pub initial: DensityState64,
    pub integrator: IntegratorConfig<f64>,
}

/// Validates without touching the filesystem (table paths are checked for
/// existence only).
pub fn validate(config: &RunConfiguration) -> Vec<Violation> {
    let mut v = Vec::new();
    match build(config) {
        Ok(_) => {}
        Err(mut errs) => v.append(&mut errs),
    }
    v
}

/// Builds the core objects, accumulating every violation instead of
/// stopping at the first.
pub fn build(config: &RunConfiguration) -> Result<Built, Vec<Violation>> {
    let mut errs: Vec<Violation> = Vec::new();
    let mut push = |path: &str, message: String, errs: &mut Vec<Violation>| {
        errs.push(Violation { path: path.into(), message });
    };

    let coagulation = build_coagulation(&config.kernel.coagulation, &mut errs);
    let selection = build_selection(&config.kernel.selection, &mut errs);
    let breakage = build_breakage(&config.kernel.breakage, &mut errs);

    let mut system: Option<KernelSystem64> = None;
    if let (Some(c), Some(s), Some(b)) = (coagulation, selection, breakage) {
        match KernelSystem::new(c, s, b) {
            Ok(sys) => {
                let sys = match &config.truncation {
                    None => Some(sys),
                    Some(t) => match TruncationParams::new(t.n, t.ramp) {
                        Ok(params) => Some(sys.truncate(params)),
                        Err(e) => {
                            push("truncation", e.to_string(), &mut errs);
                            None
                        }
                    },
                };
                system = sys;
            }
            Err(e) => push("kernel", e.to_string(), &mut errs),
        }
    }

    let grid = match pbe_core::build_grid(config.grid.x_min, config.grid.x_max, config.grid.cells)
    {
        Ok(g) => Some(g),
        Err(e) => {
            push("grid", e.to_string(), &mut errs);
            None
        }
    };

    let initial = grid.as_ref().and_then(|g| match build_profile(&config.initial, &mut errs) {
        Some(profile) => match pbe_core::project_initial(&profile, g) {
            Ok(state) => Some(state),
            Err(e) => {
                push("initial", e.to_string(), &mut errs);
                None
            }
        },
        None => None,
    });

    let it = &config.integrator;
    let mut integrator = IntegratorConfig::with_horizon(it.t_end.max(f64::MIN_POSITIVE));
    integrator.rel_tol = it.rel_tol;
    integrator.abs_tol = it.abs_tol;
    integrator.t_end = it.t_end;
    if let Some(dt) = it.dt_init {
        integrator.dt_init = dt;
    }
    if let Some(dt) = it.dt_max {
        integrator.dt_max = dt;
    }
    if let Err(e) = integrator.validate() {
        push("integrator", e.to_string(), &mut errs);
    }

    if config.snapshots == 0 {
        push("snapshots", "need at least one snapshot interval".into(), &mut errs);
    }
    let (x1, x2) = config.envelope_strip;
    if !(x1 > 0.0 && x2 > x1) {
        push("envelope_strip", "strip must satisfy 0 < X1 < X2".into(), &mut errs);
    }
    if config.study.n_list.is_empty() {
        push("study.n_list", "study needs at least one truncation index".into(), &mut errs);
    }
    if config.study.n_list.windows(2).any(|w| w[1] <= w[0]) {
        push("study.n_list", "truncation indices must increase strictly".into(), &mut errs);
    }
    if config.study.omega_r1 < 1.0 {
        push("study.omega_r1", "omega norm requires r1 >= 1".into(), &mut errs);
    }
    if !(config.study.omega_r2 > 0.0 && config.study.omega_r2 < 1.0) {
        push("study.omega_r2", "omega norm requires r2 in (0,1)".into(), &mut errs);
    }

    match (system, grid, initial) {
        (Some(system), Some(grid), Some(initial)) if errs.is_empty() => {
            Ok(Built { system, grid, initial, integrator })
        }
        _ => Err(errs),
    }
}

fn load_table2(path: &Path, field: &str, errs: &mut Vec<Violation>) -> Option<Table2<f64>> {
    match Table2::from_csv_path(path) {
        Ok(t) => Some(t),
        Err(e) => {
            errs.push(Violation { path: field.into(), message: e.to_string() });
            None
        }
    }
}

fn load_table1(path: &Path, field: &str, errs: &mut Vec<Violation>) -> Option<Table1<f64>> {
    match Table1::from_csv_path(path) {
        Ok(t) => Some(t),
        Err(e) => {
            errs.push(Violation { path: field.into(), message: e.to_string() });
            None
        }
    }
}

fn require<T: Copy>(
    value: Option<T>,
    field: &str,
    what: &str,
    errs: &mut Vec<Violation>,
) -> Option<T> {
    if value.is_none() {
        errs.push(Violation {
            path: field.into(),
            message: format!("{what} is required for this form"),
        });
    }
    value
}

fn build_coagulation(
    c: &CoagulationConfig,
    errs: &mut Vec<Violation>,
) -> Option<CoagulationSpec<f64>> {
    const P: &str = "kernel.coagulation";
    let mut spec = match c.form {
        CoagulationFormId::Zero => CoagulationSpec::zero(),
        CoagulationFormId::Constant => CoagulationSpec::constant(),
        CoagulationFormId::Sum => CoagulationSpec::sum(),
        CoagulationFormId::Smoluchowski => CoagulationSpec::smoluchowski(c.a.unwrap_or(3.0)),
        CoagulationFormId::Eke => CoagulationSpec::equipartition_kinetic_energy(),
        CoagulationFormId::Granulation => CoagulationSpec::granulation(),
        CoagulationFormId::ShearLinear => CoagulationSpec::shear_linear(),
        CoagulationFormId::ShearNonlinear => CoagulationSpec::shear_nonlinear(),
        CoagulationFormId::CustomTabulated => {
            let path = require(c.table.as_deref(), &format!("{P}.table"), "a CSV path", errs);
            let k = require(c.k, &format!("{P}.k"), "the bound constant k", errs);
            let sigma = require(c.sigma, &format!("{P}.sigma"), "the bound constant sigma", errs);
            let lambda =
                require(c.lambda, &format!("{P}.lambda"), "the bound constant lambda", errs);
            let table = path.and_then(|p| load_table2(p, &format!("{P}.table"), errs));
            match (table, k, sigma, lambda) {
                (Some(t), Some(k), Some(s), Some(l)) => CoagulationSpec::tabulated(t, k, s, l),
                _ => return None,
            }
        }
    };
    if let Some(k) = c.k {
        spec.k = k;
    }
    if let Some(s) = c.sigma {
        spec.sigma = s;
    }
    if let Some(l) = c.lambda {
        spec.lambda = l;
    }
    match spec.validate() {
        Ok(()) => Some(spec),
        Err(e) => {
            let field = e.to_string();
            let path = if field.contains("sigma") {
                format!("{P}.sigma")
            } else if field.contains("lambda") {
                format!("{P}.lambda")
            } else if field.contains("fractal") {
                format!("{P}.a")
            } else {
                format!("{P}.k")
            };
            errs.push(Violation { path, message: strip_prefix(&field) });
            None
        }
    }
}

fn build_selection(s: &SelectionConfig, errs: &mut Vec<Violation>) -> Option<SelectionSpec<f64>> {
    const P: &str = "kernel.selection";
    let spec = match s.form {
        SelectionFormId::Zero => SelectionSpec::zero(),
        SelectionFormId::Constant => SelectionSpec::constant(s.s0.unwrap_or(1.0)),
        SelectionFormId::Power => {
            let mut spec = SelectionSpec::power(s.s0.unwrap_or(1.0), s.alpha.unwrap_or(1.0));
            if let Some(a) = s.alpha {
                spec.alpha = a;
            }
            spec
        }
        SelectionFormId::Custom => {
            let path = require(s.table.as_deref(), &format!("{P}.table"), "a CSV path", errs);
            let s0 = require(s.s0, &format!("{P}.s0"), "the bound constant S0", errs);
            let alpha = require(s.alpha, &format!("{P}.alpha"), "the bound exponent alpha", errs);
            let table = path.and_then(|p| load_table1(p, &format!("{P}.table"), errs));
            match (table, s0, alpha) {
                (Some(t), Some(s0), Some(alpha)) => SelectionSpec::tabulated(t, s0, alpha),
                _ => return None,
            }
        }
    };
    match spec.validate() {
        Ok(()) => Some(spec),
        Err(e) => {
            let msg = strip_prefix(&e.to_string());
            let path =
                if msg.contains("alpha") { format!("{P}.alpha") } else { format!("{P}.s0") };
            errs.push(Violation { path, message: msg });
            None
        }
    }
}

fn build_breakage(b: &BreakageConfig, errs: &mut Vec<Violation>) -> Option<BreakageSpec<f64>> {
    const P: &str = "kernel.breakage";
    let gamma = b.gamma.unwrap_or(0.5);
    let mut spec = match b.form {
        BreakageFormId::BinaryUniform => BreakageSpec::binary_uniform_with_gamma(gamma),
        BreakageFormId::TernaryUniform => BreakageSpec::ternary_uniform_with_gamma(gamma),
        BreakageFormId::Parabolic => BreakageSpec::parabolic_with_gamma(gamma),
        BreakageFormId::Custom => {
            let path = require(b.table.as_deref(), &format!("{P}.table"), "a CSV path", errs);
            let n_max = require(b.n_max, &format!("{P}.n_max"), "the fragment cap N", errs);
            let n0 = require(b.n0, &format!("{P}.n0"), "the negative-moment constant N0", errs);
            let b_bar = require(b.b_bar, &format!("{P}.b_bar"), "the supremum bound", errs);
            let y = require(b.y_threshold, &format!("{P}.y_threshold"), "the threshold Y", errs);
            let table = path.and_then(|p| load_table2(p, &format!("{P}.table"), errs));
            match (table, n_max, n0, b_bar, y) {
                (Some(t), Some(n), Some(n0), Some(bb), Some(y)) => {
                    BreakageSpec::tabulated(t, n, gamma, n0, bb, y)
                }
                _ => return None,
            }
        }
    };
    if let Some(n) = b.n_max {
        spec.fragment_cap = n;
    }
    if let Some(n0) = b.n0 {
        spec.n0 = n0;
    }
    if let Some(bb) = b.b_bar {
        spec.b_bar = bb;
    }
    if let Some(y) = b.y_threshold {
        spec.y_threshold = y;
    }
    Some(spec)
}

fn build_profile(i: &InitialConfig, errs: &mut Vec<Violation>) -> Option<InitialProfile<f64>> {
    const P: &str = "initial";
    match i.profile {
        ProfileId::Zero => Some(InitialProfile::Zero),
        ProfileId::Exponential => Some(InitialProfile::Exponential { mean: i.mean.unwrap_or(1.0) }),
        ProfileId::Monodisperse => {
            let cell = require(i.cell, &format!("{P}.cell"), "a cell index", errs);
            let amount = require(i.amount, &format!("{P}.amount"), "an amount", errs);
            match (cell, amount) {
                (Some(cell), Some(amount)) => Some(InitialProfile::Monodisperse { cell, amount }),
                _ => None,
            }
        }
        ProfileId::CustomTabulated => {
            let path = require(i.table.as_deref(), &format!("{P}.table"), "a CSV path", errs)?;
            load_table1(path, &format!("{P}.table"), errs).map(InitialProfile::Tabulated)
        }
    }
}

fn strip_prefix(msg: &str) -> String {
    msg.strip_prefix("invalid configuration: ").unwrap_or(msg).to_string()
}
