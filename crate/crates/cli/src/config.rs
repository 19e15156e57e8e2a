//! TOML scenario configuration.

use serde::{Deserialize, Serialize};

use dpp_core::domain::Shape;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default)]
    pub kind: ScenarioKind,
    #[serde(default)]
    pub domain: Option<DomainConfig>,
    #[serde(default)]
    pub operator: Option<OperatorConfig>,
    #[serde(default)]
    pub solve: SolveConfig,
    #[serde(default)]
    pub verify: VerifyConfig,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub consistency: Option<ConsistencyConfig>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioKind {
    #[default]
    Stationary,
    ParabolicConsistency,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct DomainConfig {
    pub shape: ShapeConfig,
    pub h: f64,
    pub epsilon: f64,
    pub collar: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct ShapeConfig {
    pub kind: String,
    #[serde(default)]
    pub a: f64,
    #[serde(default = "one")]
    pub b: f64,
    #[serde(default)]
    pub min: [f64; 2],
    #[serde(default = "ones")]
    pub max: [f64; 2],
    #[serde(default = "one")]
    pub radius: f64,
}

fn one() -> f64 {
    1.0
}

fn ones() -> [f64; 2] {
    [1.0, 1.0]
}

impl ShapeConfig {
    pub fn to_shape(&self) -> Result<Shape, String> {
        match self.kind.as_str() {
            "interval" => Ok(Shape::Interval { a: self.a, b: self.b }),
            "rectangle" => Ok(Shape::Rectangle { min: self.min, max: self.max }),
            "disk" => Ok(Shape::Disk { radius: self.radius }),
            other => Err(format!("unknown shape kind '{other}'")),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct OperatorConfig {
    pub kind: String,
    #[serde(default)]
    pub drift: f64,
    #[serde(default)]
    pub exponent: f64,
    #[serde(default = "default_directions")]
    pub direction_samples: usize,
    #[serde(default)]
    pub boundary_shift: f64,
    #[serde(default)]
    pub boundary: BoundaryConfig,
    #[serde(default)]
    pub payoff: PayoffConfig,
}

fn default_directions() -> usize {
    dpp_core::operators::DEFAULT_DIRECTION_SAMPLES
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct BoundaryConfig {
    #[serde(default = "zero_kind")]
    pub kind: String,
    #[serde(default)]
    pub value: f64,
    /// Coefficients of the affine form c[0]*x + c[1]*y + offset.
    #[serde(default)]
    pub coefficients: [f64; 2],
    #[serde(default)]
    pub offset: f64,
    #[serde(default = "one")]
    pub amplitude: f64,
}

fn zero_kind() -> String {
    "zero".into()
}

impl Default for BoundaryConfig {
    fn default() -> Self {
        Self {
            kind: zero_kind(),
            value: 0.0,
            coefficients: [0.0, 0.0],
            offset: 0.0,
            amplitude: 1.0,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct PayoffConfig {
    #[serde(default = "none_kind")]
    pub kind: String,
    #[serde(default)]
    pub value: f64,
}

fn none_kind() -> String {
    "none".into()
}

impl Default for PayoffConfig {
    fn default() -> Self {
        Self { kind: none_kind(), value: 0.0 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct SolveConfig {
    #[serde(default = "default_direction")]
    pub direction: String,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    #[serde(default = "default_max_iterations")]
    pub max_iterations: usize,
    /// Seed barrier override: constant-sub, constant-super, biased-tow-exp,
    /// mcf-annular or eikonal-layer. Omitted: picked per operator.
    #[serde(default)]
    pub seed_barrier: Option<String>,
}

fn default_direction() -> String {
    "from-below".into()
}

fn default_tolerance() -> f64 {
    1e-10
}

fn default_max_iterations() -> usize {
    1_000_000
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self {
            direction: default_direction(),
            tolerance: default_tolerance(),
            max_iterations: default_max_iterations(),
            seed_barrier: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct VerifyConfig {
    /// Check names, or ["standard"] for the full applicable matrix;
    /// empty disables verification.
    #[serde(default)]
    pub checks: Vec<String>,
    #[serde(default = "default_trials")]
    pub trials: u32,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_shifts")]
    pub translation_shifts: Vec<f64>,
    #[serde(default = "default_lambda")]
    pub lambda: f64,
}

fn default_trials() -> u32 {
    100
}

fn default_seed() -> u64 {
    7
}

fn default_shifts() -> Vec<f64> {
    vec![0.0, 0.5, 3.0]
}

fn default_lambda() -> f64 {
    2.0
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            checks: Vec::new(),
            trials: default_trials(),
            seed: default_seed(),
            translation_shifts: default_shifts(),
            lambda: default_lambda(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "default_fields")]
    pub fields: String,
    #[serde(default)]
    pub dump_domain: bool,
}

fn default_fields() -> String {
    "csv".into()
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { fields: default_fields(), dump_domain: false }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct ConsistencyConfig {
    #[serde(default = "default_phi")]
    pub phi: String,
    #[serde(default = "default_slope")]
    pub slope: f64,
    #[serde(default = "default_nonlinearity")]
    pub nonlinearity: String,
    #[serde(default = "default_ladder")]
    pub ladder: Vec<f64>,
    #[serde(default = "default_scale")]
    pub resolution_scale: u32,
    #[serde(default)]
    pub check_doubling: bool,
}

fn default_phi() -> String {
    "half-square".into()
}

fn default_slope() -> f64 {
    0.75
}

fn default_nonlinearity() -> String {
    "heat".into()
}

fn default_ladder() -> Vec<f64> {
    vec![0.2, 0.1, 0.05]
}

fn default_scale() -> u32 {
    1
}
