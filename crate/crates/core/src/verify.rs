//! Numerical checks of the structural axioms behind the fixed-point theory:
//! sub/supersolution predicates, strict slack, monotonicity, translation,
//! scaling, comparison against strict barriers, two-sided agreement and the
//! maximum principle. Failing checks always carry a witness point.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::barriers;
use crate::domain::DiscreteDomain;
use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::operators::{OperatorKind, OperatorSpec};
use crate::solver::{self, SolveOptions};

/// Tolerance for algebraic identities (max/min/affine compositions).
pub const ALGEBRA_TOL: f64 = 1e-12;
/// Tolerance for assertions downstream of an iterative solve.
pub const SOLVE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub passed: bool,
    /// Smallest margin observed; negative means the inequality failed.
    pub worst_slack: f64,
    pub witness: Option<usize>,
    pub trials: u32,
    pub seed: Option<u64>,
}

impl CheckRecord {
    fn new(name: impl Into<String>, passed: bool, worst_slack: f64, witness: Option<usize>) -> Self {
        Self { name: name.into(), passed, worst_slack, witness, trials: 0, seed: None }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct VerificationReport {
    pub checks: Vec<CheckRecord>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn push(&mut self, record: CheckRecord) {
        self.checks.push(record);
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization")
    }
}

/// min over X of (Tu - u); nonnegative up to `tol` makes u a subsolution.
pub fn is_subsolution(
    domain: &DiscreteDomain,
    spec: &OperatorSpec,
    u: &ScalarField,
    tol: f64,
) -> Result<(bool, f64)> {
    let tu = spec.apply(domain, u)?;
    let (_, slack) = tu.min_difference(u);
    Ok((slack >= -tol, slack))
}

/// min over X of (u - Tu); nonnegative up to `tol` makes u a supersolution.
pub fn is_supersolution(
    domain: &DiscreteDomain,
    spec: &OperatorSpec,
    u: &ScalarField,
    tol: f64,
) -> Result<(bool, f64)> {
    let tu = spec.apply(domain, u)?;
    let (_, slack) = u.min_difference(&tu);
    Ok((slack >= -tol, slack))
}

/// Uniform strictness margin min over X of (v - Tv) with its witness point.
pub fn strict_slack(
    domain: &DiscreteDomain,
    spec: &OperatorSpec,
    v: &ScalarField,
) -> Result<(f64, usize)> {
    let tv = spec.apply(domain, v)?;
    let (witness, slack) = v.min_difference(&tv);
    Ok((slack, witness))
}

/// Uniform random field in [-amplitude, amplitude].
pub fn random_field(len: usize, amplitude: f64, rng: &mut impl Rng) -> ScalarField {
    ScalarField::from_fn(len, |_| rng.gen_range(-amplitude..amplitude))
}

/// Monotonicity: for random pairs u <= u + noise the outputs stay ordered.
pub fn check_monotonicity(
    domain: &DiscreteDomain,
    spec: &OperatorSpec,
    trials: u32,
    seed: u64,
) -> Result<CheckRecord> {
    let apply = |u: &ScalarField| spec.apply(domain, u);
    let mut record = check_monotonicity_of(apply, domain.len(), trials, seed)?;
    record.name = format!("monotonicity[{}]", spec.kind.name());
    Ok(record)
}

/// Monotonicity of an arbitrary field map; used directly by tests to confirm
/// the check catches corrupted operators.
pub fn check_monotonicity_of(
    apply: impl Fn(&ScalarField) -> Result<ScalarField>,
    len: usize,
    trials: u32,
    seed: u64,
) -> Result<CheckRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = f64::INFINITY;
    let mut witness = None;
    let mut passed = true;
    for _ in 0..trials {
        let u = random_field(len, 1.0, &mut rng);
        let noise = ScalarField::from_fn(len, |_| rng.gen_range(0.0..1.0));
        let v = ScalarField::from_fn(len, |i| u[i] + noise[i]);
        let tu = apply(&u)?;
        let tv = apply(&v)?;
        let (arg, slack) = tv.min_difference(&tu);
        if slack < worst {
            worst = slack;
            witness = Some(arg);
        }
        if slack < -ALGEBRA_TOL {
            passed = false;
        }
    }
    let mut record = CheckRecord::new("monotonicity", passed, worst, witness);
    record.trials = trials;
    record.seed = Some(seed);
    Ok(record)
}

/// Translation bound T(u+c) <= Tu + c for c >= 0, with equality on interior
/// rows and the exact pin T(u+c) = Tu on boundary rows.
pub fn check_translation(
    domain: &DiscreteDomain,
    spec: &OperatorSpec,
    u: &ScalarField,
    c: f64,
) -> Result<CheckRecord> {
    if c < 0.0 {
        return Err(Error::InvalidParameter {
            reason: format!("translation constant {c} < 0; boundary rows pin to g"),
        });
    }
    let tu = spec.apply(domain, u)?;
    let tuc = spec.apply(domain, &u.plus(c))?;
    let mut worst = f64::INFINITY;
    let mut witness = None;
    let mut passed = true;
    for i in 0..domain.len() {
        let slack = tu[i] + c - tuc[i];
        if slack < worst {
            worst = slack;
            witness = Some(i);
        }
        if slack < -ALGEBRA_TOL {
            passed = false;
        }
        if domain.is_interior(i) {
            if slack.abs() > ALGEBRA_TOL {
                passed = false;
                witness = Some(i);
            }
        } else if (tuc[i] - tu[i]).abs() > ALGEBRA_TOL {
            passed = false;
            witness = Some(i);
        }
    }
    let name = format!("translation[{}, c={c}]", spec.kind.name());
    Ok(CheckRecord::new(name, passed, worst, witness))
}

/// Scaling margin sigma = min over X of (lambda*Tu - T(lambda*u)) for
/// lambda > 1 and u >= 0. Positive sigma is the engine of uniqueness; it
/// fails by design when the running payoff has zeros.
pub fn check_scaling(
    domain: &DiscreteDomain,
    spec: &OperatorSpec,
    u: &ScalarField,
    lambda: f64,
) -> Result<CheckRecord> {
    if lambda < 1.0 {
        return Err(Error::InvalidParameter { reason: format!("lambda {lambda} < 1") });
    }
    if u.min() < 0.0 {
        return Err(Error::InvalidParameter { reason: "scaling check needs u >= 0".into() });
    }
    let min_boundary_row = domain
        .boundary_indices()
        .iter()
        .map(|&b| spec.boundary_data[b as usize] + spec.boundary_shift)
        .fold(f64::INFINITY, f64::min);
    if min_boundary_row <= 0.0 {
        return Err(Error::ShiftTooSmall {
            shift: spec.boundary_shift,
            min_after: min_boundary_row,
        });
    }
    let tu = spec.apply(domain, u)?;
    let tlu = spec.apply(domain, &u.scaled(lambda))?;
    let scaled_tu = tu.scaled(lambda);
    let (witness, sigma) = scaled_tu.min_difference(&tlu);
    let name = format!("scaling[{}, lambda={lambda}]", spec.kind.name());
    let passed = if lambda == 1.0 { sigma.abs() <= ALGEBRA_TOL } else { sigma > 0.0 };
    Ok(CheckRecord::new(name, passed, sigma, Some(witness)))
}

/// Comparison: a subsolution never exceeds a strict supersolution. A failure
/// here indicates an operator bug, not an unlucky instance.
pub fn check_comparison(
    domain: &DiscreteDomain,
    spec: &OperatorSpec,
    sub: &ScalarField,
    strict_super: &ScalarField,
) -> Result<CheckRecord> {
    let (is_sub, sub_slack) = is_subsolution(domain, spec, sub, ALGEBRA_TOL)?;
    if !is_sub {
        return Err(Error::NotASubsolution { slack: sub_slack, index: 0 });
    }
    let (sigma, witness) = strict_slack(domain, spec, strict_super)?;
    if sigma <= 0.0 {
        return Err(Error::NotASupersolution { slack: sigma, index: witness });
    }
    let (arg, margin) = strict_super.min_difference(sub);
    let passed = margin >= -ALGEBRA_TOL;
    let name = format!("comparison[{}]", spec.kind.name());
    Ok(CheckRecord::new(name, passed, margin, Some(arg)))
}

/// Max-norm gap between the descending and ascending Perron limits. The gap
/// is data: zero (up to solver tolerance) certifies uniqueness on this
/// instance, a positive gap exhibits the open regime.
pub fn check_two_sided_gap(
    domain: &DiscreteDomain,
    spec: &OperatorSpec,
    tolerance: f64,
) -> Result<(f64, CheckRecord)> {
    let options = SolveOptions { tolerance, max_iterations: 10_000_000 };
    let below_seed = barriers::default_subsolution(domain, spec)?;
    let above_seed = barriers::default_supersolution(domain, spec)?;
    let (below, _) = solver::perron_solve_from_below(domain, spec, &below_seed, options)?;
    let (above, _) = solver::perron_solve_from_above(domain, spec, &above_seed, options)?;
    let gap = below.sup_distance(&above);
    let name = format!("two-sided-gap[{}]", spec.kind.name());
    Ok((gap, CheckRecord::new(name, true, gap, None)))
}

/// Discrete maximum principle for solved fields: the solution range is
/// trapped by the boundary row range.
pub fn check_max_principle(
    domain: &DiscreteDomain,
    spec: &OperatorSpec,
    u: &ScalarField,
) -> Result<CheckRecord> {
    domain.validate_chain_reachability()?;
    let (res, _) = solver::residual(domain, spec, u)?;
    if res > SOLVE_TOL {
        return Err(Error::InvalidParameter {
            reason: format!("max principle checked on a non-solution (residual {res:.3e})"),
        });
    }
    let mut gmax = f64::NEG_INFINITY;
    let mut gmin = f64::INFINITY;
    for &b in domain.boundary_indices() {
        let row = spec.boundary_data[b as usize] + spec.boundary_shift;
        gmax = gmax.max(row);
        gmin = gmin.min(row);
    }
    let upper = gmax + SOLVE_TOL - u.max();
    let lower = u.min() - (gmin - SOLVE_TOL);
    let worst = upper.min(lower);
    let passed = worst >= 0.0;
    let witness = (0..domain.len()).find(|&i| u[i] > gmax + SOLVE_TOL || u[i] < gmin - SOLVE_TOL);
    let name = format!("max-principle[{}]", spec.kind.name());
    Ok(CheckRecord::new(name, passed, worst, witness))
}

/// Runs the full applicable check matrix for one operator instance.
pub fn standard_matrix(
    domain: &DiscreteDomain,
    spec: &OperatorSpec,
    trials: u32,
    seed: u64,
    translation_shifts: &[f64],
    lambda: f64,
) -> Result<VerificationReport> {
    let mut report = VerificationReport::default();
    report.push(check_monotonicity(domain, spec, trials, seed)?);

    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x75ca_11ed);
    let u = random_field(domain.len(), 1.0, &mut rng);
    for &c in translation_shifts {
        report.push(check_translation(domain, spec, &u, c)?);
    }

    if let Some((barrier, _)) = barriers::default_strict_supersolution(domain, spec)? {
        let sub = barriers::default_subsolution(domain, spec)?;
        report.push(check_comparison(domain, spec, &sub, &barrier)?);
    }

    let payoff_min = spec.running_payoff.as_ref().map(|f| f.min()).unwrap_or(0.0);
    let scalable = matches!(
        spec.kind,
        OperatorKind::Eikonal | OperatorKind::BiasedTugOfWar { .. }
    ) && payoff_min > 0.0;
    if scalable {
        let min_g = domain
            .boundary_indices()
            .iter()
            .map(|&b| spec.boundary_data[b as usize])
            .fold(f64::INFINITY, f64::min);
        let shift = (1.0 - min_g).max(0.0);
        let shifted = spec.with_shift(domain, shift)?;
        let nonneg = ScalarField::from_fn(domain.len(), |_| rng.gen_range(0.0..1.0));
        report.push(check_scaling(domain, &shifted, &nonneg, lambda)?);
    }

    let (_, gap_record) = check_two_sided_gap(domain, spec, 1e-11)?;
    report.push(gap_record);

    let payoff_free = spec.running_payoff.as_ref().map(|f| f.max() == 0.0).unwrap_or(true);
    if matches!(spec.kind, OperatorKind::TugOfWar | OperatorKind::BiasedTugOfWar { .. })
        && payoff_free
    {
        let seed_field = barriers::default_subsolution(domain, spec)?;
        let (solved, _) = solver::perron_solve_from_below(
            domain,
            spec,
            &seed_field,
            SolveOptions::with_tolerance(1e-11),
        )?;
        report.push(check_max_principle(domain, spec, &solved)?);
    }
    Ok(report)
}
