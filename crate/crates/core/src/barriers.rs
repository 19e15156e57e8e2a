//! Explicit sub- and supersolutions: seeds for Perron iteration and the
//! bounded strict supersolutions behind the boundedness and comparison
//! arguments.

use serde::{Deserialize, Serialize};

use crate::domain::{AnnularPartition, DiscreteDomain, LayerPartition};
use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::operators::{OperatorKind, OperatorSpec};
use crate::parabolic::{Nonlinearity, SpaceTimeField, SymMatrix, TorusGrid};

/// Barrier families bundled with the solver kit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BarrierKind {
    ConstantSub,
    ConstantSuper,
    BiasedTowExp,
    McfAnnular,
    EikonalLayer,
    ParabolicLinear,
    ParabolicSub,
}

impl BarrierKind {
    /// Builds the barrier for a stationary operator, computing the partitions
    /// it needs. The two space-time kinds live on a different lattice; build
    /// them through [`parabolic_barriers`].
    pub fn build(self, domain: &DiscreteDomain, spec: &OperatorSpec) -> Result<ScalarField> {
        match self {
            BarrierKind::ConstantSub => Ok(constant_subsolution(domain, spec)),
            BarrierKind::ConstantSuper => Ok(constant_supersolution(domain, spec)),
            BarrierKind::BiasedTowExp => {
                let layers = domain.layer_partition()?;
                Ok(biased_tow_barrier_auto(domain, &layers, spec)?.1)
            }
            BarrierKind::McfAnnular => {
                let annuli = domain.annular_partition()?;
                Ok(mcf_barrier(domain, &annuli))
            }
            BarrierKind::EikonalLayer => {
                let layers = domain.layer_partition()?;
                Ok(eikonal_layer_barrier(domain, &layers, spec))
            }
            BarrierKind::ParabolicLinear | BarrierKind::ParabolicSub => {
                Err(Error::InvalidParameter {
                    reason: "space-time barriers are built by parabolic_barriers".into(),
                })
            }
        }
    }
}

fn boundary_min(domain: &DiscreteDomain, g: &ScalarField) -> f64 {
    domain.boundary_indices().iter().map(|&b| g[b as usize]).fold(f64::INFINITY, f64::min)
}

fn boundary_max(domain: &DiscreteDomain, g: &ScalarField) -> f64 {
    domain.boundary_indices().iter().map(|&b| g[b as usize]).fold(f64::NEG_INFINITY, f64::max)
}

/// min g on the interior, g on the boundary.
pub fn constant_subsolution(domain: &DiscreteDomain, spec: &OperatorSpec) -> ScalarField {
    let g = &spec.boundary_data;
    let low = boundary_min(domain, g);
    ScalarField::from_fn(domain.len(), |i| if domain.is_interior(i) { low } else { g[i] })
}

/// max g on the interior, g on the boundary.
pub fn constant_supersolution(domain: &DiscreteDomain, spec: &OperatorSpec) -> ScalarField {
    let g = &spec.boundary_data;
    let high = boundary_max(domain, g);
    ScalarField::from_fn(domain.len(), |i| if domain.is_interior(i) { high } else { g[i] })
}

/// Exponential layer barrier for the (biased) tug-of-war operator:
/// v = -a(e^(-k*eps) - 1) + max g + 1 on layer k, with k = 0 on the boundary.
pub fn biased_tow_barrier(
    domain: &DiscreteDomain,
    layers: &LayerPartition,
    spec: &OperatorSpec,
    amplitude: f64,
) -> ScalarField {
    let eps = domain.epsilon();
    let top = boundary_max(domain, &spec.boundary_data) + 1.0;
    ScalarField::from_fn(domain.len(), |i| {
        let k = layers.index(i) as f64;
        -amplitude * ((-k * eps).exp() - 1.0) + top
    })
}

/// Doubles the amplitude until the measured slack min(v - Tv) exceeds
/// eps^2 * max f (or zero without payoff). Returns the amplitude used.
pub fn biased_tow_barrier_auto(
    domain: &DiscreteDomain,
    layers: &LayerPartition,
    spec: &OperatorSpec,
) -> Result<(f64, ScalarField)> {
    let eps = domain.epsilon();
    let max_f = spec.running_payoff.as_ref().map(|f| f.max().max(0.0)).unwrap_or(0.0);
    let drift = match spec.kind {
        OperatorKind::BiasedTugOfWar { drift } => drift,
        _ => 0.0,
    };
    let diameter = match domain.shape() {
        Some(shape) => shape.diameter(),
        None => domain.diameter_with_collar(),
    };
    let target = eps * eps * max_f;
    // Leading slack term is a*e^(-D)*((c+1)/2)*eps^2; start so it covers the
    // payoff term with margin.
    let mut amplitude = 2.0 * diameter.exp() * (max_f + 1.0) * 2.0 / (drift + 1.0);
    for _ in 0..60 {
        let v = biased_tow_barrier(domain, layers, spec, amplitude);
        let tv = spec.apply(domain, &v)?;
        let (_, slack) = v.min_difference(&tv);
        if slack > target {
            return Ok((amplitude, v));
        }
        amplitude *= 2.0;
    }
    Err(Error::AmplitudeSearch { doublings: 60 })
}

/// Annular barrier for the curvature operator: v = 2(K+1-k)*eps^2 on annulus
/// k. Every point of X lies in annuli 1..K, so v >= 2*eps^2 everywhere and
/// boundary rows keep a slack of at least 2*eps^2 over g = 0.
pub fn mcf_barrier(domain: &DiscreteDomain, annuli: &AnnularPartition) -> ScalarField {
    let eps2 = domain.epsilon() * domain.epsilon();
    let top = annuli.count() as f64 + 1.0;
    ScalarField::from_fn(domain.len(), |i| 2.0 * (top - annuli.index(i) as f64) * eps2)
}

/// Layer barrier for the Eikonal operator: v = 2k(max f + 1) on interior
/// layer k and v = 1 on the boundary, so the slack is uniformly positive
/// across all of X.
pub fn eikonal_layer_barrier(
    domain: &DiscreteDomain,
    layers: &LayerPartition,
    spec: &OperatorSpec,
) -> ScalarField {
    let max_f = spec.running_payoff.as_ref().map(|f| f.max()).unwrap_or(0.0);
    ScalarField::from_fn(domain.len(), |i| {
        if domain.is_interior(i) {
            2.0 * layers.index(i) as f64 * (max_f + 1.0)
        } else {
            1.0
        }
    })
}

/// Space-time barriers: the descending-linear subsolution
/// u1 = -C_F*t + min g and the strict supersolution
/// v = (sigma + C2)*t + max g + sigma*eps^2.
pub fn parabolic_barriers(
    torus: &TorusGrid,
    epsilon: f64,
    levels: usize,
    g: &[f64],
    nonlinearity: &Nonlinearity,
    sigma: f64,
) -> Result<(SpaceTimeField, SpaceTimeField)> {
    if g.len() != torus.len() {
        return Err(Error::FieldLength { expected: torus.len(), got: g.len() });
    }
    if sigma <= 0.0 {
        return Err(Error::InvalidParameter { reason: format!("sigma {sigma} <= 0") });
    }
    let zero = SymMatrix::zero(torus.dim());
    let c_f = (0..torus.len())
        .map(|i| nonlinearity.eval(torus.point(i), [0.0, 0.0], &zero).abs())
        .fold(0.0, f64::max);
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for &v in g {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    let eps2 = epsilon * epsilon;
    let growth = nonlinearity.growth;
    let sub = SpaceTimeField::from_fn(torus.clone(), epsilon, levels, |_, t| -c_f * t + lo);
    let super_ = SpaceTimeField::from_fn(torus.clone(), epsilon, levels, |_, t| {
        (sigma + growth) * t + hi + sigma * eps2
    });
    Ok((sub, super_))
}

/// Subsolution seed for Perron iteration; fails if the constant candidate is
/// not actually a subsolution (negative running payoff).
pub fn default_subsolution(domain: &DiscreteDomain, spec: &OperatorSpec) -> Result<ScalarField> {
    let u = constant_subsolution(domain, spec);
    let tu = spec.apply(domain, &u)?;
    let (index, slack) = tu.min_difference(&u);
    if slack < -crate::solver::AUDIT_TOL {
        return Err(Error::NotASubsolution { slack, index });
    }
    Ok(u)
}

/// Supersolution seed for Perron iteration: the constant where it works, the
/// operator's barrier where a running payoff or the curvature gain rules
/// constants out.
pub fn default_supersolution(domain: &DiscreteDomain, spec: &OperatorSpec) -> Result<ScalarField> {
    let payoff_max = spec.running_payoff.as_ref().map(|f| f.max()).unwrap_or(0.0);
    let v = match spec.kind {
        OperatorKind::TugOfWar
        | OperatorKind::MeanValueP { .. }
        | OperatorKind::PeresSheffield2D { .. } => constant_supersolution(domain, spec),
        OperatorKind::BiasedTugOfWar { .. } => {
            if payoff_max <= 0.0 {
                constant_supersolution(domain, spec)
            } else {
                let layers = domain.layer_partition()?;
                biased_tow_barrier_auto(domain, &layers, spec)?.1
            }
        }
        OperatorKind::Eikonal => {
            if payoff_max <= 0.0 {
                constant_supersolution(domain, spec)
            } else {
                let layers = domain.layer_partition()?;
                eikonal_layer_barrier(domain, &layers, spec)
            }
        }
        OperatorKind::MeanCurvature2D { .. } => {
            let annuli = domain.annular_partition()?;
            mcf_barrier(domain, &annuli)
        }
    };
    let tv = spec.apply(domain, &v)?;
    let (index, slack) = v.min_difference(&tv);
    if slack < -crate::solver::AUDIT_TOL {
        return Err(Error::NotASupersolution { slack, index });
    }
    Ok(v)
}

/// The bundled *strict* supersolution for operators that have one, with its
/// measured slack. Mean-value and orthogonal-sphere operators have none.
pub fn default_strict_supersolution(
    domain: &DiscreteDomain,
    spec: &OperatorSpec,
) -> Result<Option<(ScalarField, f64)>> {
    let v = match spec.kind {
        OperatorKind::TugOfWar | OperatorKind::BiasedTugOfWar { .. } => {
            let layers = domain.layer_partition()?;
            biased_tow_barrier_auto(domain, &layers, spec)?.1
        }
        OperatorKind::Eikonal => {
            let layers = domain.layer_partition()?;
            eikonal_layer_barrier(domain, &layers, spec)
        }
        OperatorKind::MeanCurvature2D { .. } => {
            let annuli = domain.annular_partition()?;
            mcf_barrier(domain, &annuli)
        }
        OperatorKind::MeanValueP { .. } | OperatorKind::PeresSheffield2D { .. } => {
            return Ok(None)
        }
    };
    let tv = spec.apply(domain, &v)?;
    let (index, slack) = v.min_difference(&tv);
    if slack <= 0.0 {
        return Err(Error::NotASupersolution { slack, index });
    }
    Ok(Some((v, slack)))
}
