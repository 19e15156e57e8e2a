//! Constructive Perron iteration: monotone fixed-point sweeps from a
//! subsolution (nondecreasing) or a supersolution (nonincreasing).
//!
//! On a finite point set a monotone operator maps a subsolution to a larger
//! subsolution, so the iterate sequence climbs toward the extremal fixed point
//! above the seed; the descent case mirrors it. The iteration is plain operator
//! application with a monotonicity audit on every sweep.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::barriers;
use crate::domain::DiscreteDomain;
use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::operators::OperatorSpec;

/// Slack allowed before a seed fails the sub/supersolution precheck or an
/// iterate counts as a monotonicity violation.
pub const AUDIT_TOL: f64 = 1e-12;

const BRUTE_FORCE_LIMIT: usize = 500;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveDirection {
    FromBelow,
    FromAbove,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SolveOptions {
    /// Convergence threshold on both the successive difference and the
    /// residual of the returned iterate.
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self { tolerance: 1e-10, max_iterations: 1_000_000 }
    }
}

impl SolveOptions {
    pub fn with_tolerance(tolerance: f64) -> Self {
        Self { tolerance, ..Self::default() }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolveReport {
    pub direction: SolveDirection,
    pub iterations: usize,
    pub final_residual: f64,
    /// Count of audited pointwise drops (rises for descent). Successful runs
    /// always report zero; a violation aborts with an error instead.
    pub monotone_violations: usize,
    pub elapsed_seconds: f64,
}

/// Signed residual Tu - u and its max norm.
pub fn residual(
    domain: &DiscreteDomain,
    spec: &OperatorSpec,
    u: &ScalarField,
) -> Result<(f64, ScalarField)> {
    let tu = spec.apply(domain, u)?;
    let signed = ScalarField::from_fn(u.len(), |i| tu[i] - u[i]);
    let max_norm = signed.iter().map(f64::abs).fold(0.0, f64::max);
    Ok((max_norm, signed))
}

/// Ascending Perron iteration from a subsolution.
pub fn perron_solve_from_below(
    domain: &DiscreteDomain,
    spec: &OperatorSpec,
    seed: &ScalarField,
    options: SolveOptions,
) -> Result<(ScalarField, SolveReport)> {
    perron_solve_from_below_with(domain, spec, seed, options, |_, _| {})
}

/// Ascending iteration with an observer called as `(iteration, iterate)`.
pub fn perron_solve_from_below_with(
    domain: &DiscreteDomain,
    spec: &OperatorSpec,
    seed: &ScalarField,
    options: SolveOptions,
    observer: impl FnMut(usize, &ScalarField),
) -> Result<(ScalarField, SolveReport)> {
    perron_iterate(domain, spec, seed, options, SolveDirection::FromBelow, observer)
}

/// Descending Perron iteration from a supersolution.
pub fn perron_solve_from_above(
    domain: &DiscreteDomain,
    spec: &OperatorSpec,
    seed: &ScalarField,
    options: SolveOptions,
) -> Result<(ScalarField, SolveReport)> {
    perron_solve_from_above_with(domain, spec, seed, options, |_, _| {})
}

pub fn perron_solve_from_above_with(
    domain: &DiscreteDomain,
    spec: &OperatorSpec,
    seed: &ScalarField,
    options: SolveOptions,
    observer: impl FnMut(usize, &ScalarField),
) -> Result<(ScalarField, SolveReport)> {
    perron_iterate(domain, spec, seed, options, SolveDirection::FromAbove, observer)
}

fn perron_iterate(
    domain: &DiscreteDomain,
    spec: &OperatorSpec,
    seed: &ScalarField,
    options: SolveOptions,
    direction: SolveDirection,
    mut observer: impl FnMut(usize, &ScalarField),
) -> Result<(ScalarField, SolveReport)> {
    domain.check_field(seed)?;
    let start = Instant::now();

    let mut cur = seed.clone();
    let mut next = spec.apply(domain, &cur)?;

    // Seed must already sit on the right side of the operator.
    let (arg, slack) = match direction {
        SolveDirection::FromBelow => next.min_difference(&cur),
        SolveDirection::FromAbove => cur.min_difference(&next),
    };
    if slack < -AUDIT_TOL {
        return Err(match direction {
            SolveDirection::FromBelow => Error::NotASubsolution { slack, index: arg },
            SolveDirection::FromAbove => Error::NotASupersolution { slack, index: arg },
        });
    }

    let mut iterations = 0;
    loop {
        iterations += 1;
        observer(iterations, &next);

        let (arg, worst) = match direction {
            SolveDirection::FromBelow => next.min_difference(&cur),
            SolveDirection::FromAbove => cur.min_difference(&next),
        };
        if worst < -AUDIT_TOL {
            return Err(Error::MonotoneViolation {
                iteration: iterations,
                index: arg,
                drop: -worst,
            });
        }

        let delta = next.sup_distance(&cur);
        if delta <= options.tolerance {
            // delta is exactly the residual of `cur`.
            let report = SolveReport {
                direction,
                iterations,
                final_residual: delta,
                monotone_violations: 0,
                elapsed_seconds: start.elapsed().as_secs_f64(),
            };
            return Ok((cur, report));
        }
        if iterations >= options.max_iterations {
            return Err(Error::MaxIterations { iterations, residual: delta });
        }
        cur = next;
        next = spec.apply(domain, &cur)?;
    }
}

/// Independent two-sided solve on small instances: iterates from the default
/// sub- and supersolution seeds at a tiny tolerance and insists both limits
/// agree. Disagreement flags possible non-uniqueness.
pub fn brute_force_fixed_point(
    domain: &DiscreteDomain,
    spec: &OperatorSpec,
    tolerance: f64,
) -> Result<ScalarField> {
    if domain.len() > BRUTE_FORCE_LIMIT {
        return Err(Error::TooManyPoints { points: domain.len(), limit: BRUTE_FORCE_LIMIT });
    }
    let options = SolveOptions { tolerance, max_iterations: 10_000_000 };
    let below_seed = barriers::default_subsolution(domain, spec)?;
    let above_seed = barriers::default_supersolution(domain, spec)?;
    let (below, _) = perron_solve_from_below(domain, spec, &below_seed, options)?;
    let (above, _) = perron_solve_from_above(domain, spec, &above_seed, options)?;
    let gap = below.sup_distance(&above);
    if gap > 10.0 * tolerance {
        return Err(Error::NonUnique { gap });
    }
    Ok(below)
}
