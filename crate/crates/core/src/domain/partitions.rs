//! Layer and annular partitions used by the barrier constructions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::{DiscreteDomain, Shape};

/// Ceiling of a ratio, robust against float noise at integer values: a true
/// value sitting exactly on k stays in layer k.
fn robust_ceil(t: f64) -> u32 {
    ((t - 1e-9).ceil().max(1.0)) as u32
}

/// Interior layers by distance to the domain boundary: layer k collects the
/// points with (k-1)*eps < dist <= k*eps. Boundary points carry index 0.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LayerPartition {
    layer_index: Vec<u32>,
    layer_count: u32,
}

impl LayerPartition {
    pub fn index(&self, i: usize) -> u32 {
        self.layer_index[i]
    }

    pub fn count(&self) -> u32 {
        self.layer_count
    }
}

/// Annuli of a disk partition: annulus k collects points with
/// 2(k-1)*eps^2 < |x|^2 <= 2k*eps^2 (the origin counts as annulus 1). The
/// partition disk is the outer extent of X (domain radius plus collar), and
/// admissibility requires its squared radius to equal 2K*eps^2 exactly, so
/// annuli 1..K cover every point of X.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AnnularPartition {
    annulus_index: Vec<u32>,
    annulus_count: u32,
    partition_radius: f64,
}

impl AnnularPartition {
    pub fn index(&self, i: usize) -> u32 {
        self.annulus_index[i]
    }

    pub fn count(&self) -> u32 {
        self.annulus_count
    }

    pub fn partition_radius(&self) -> f64 {
        self.partition_radius
    }
}

impl DiscreteDomain {
    /// Partitions interior points into distance layers of width epsilon.
    pub fn layer_partition(&self) -> Result<LayerPartition> {
        let eps = self.epsilon();
        let mut layer_index = vec![0u32; self.len()];
        let mut layer_count = 0;
        for &i in self.interior_indices() {
            let d = self.boundary_distance(i as usize)?;
            let k = robust_ceil(d / eps);
            layer_index[i as usize] = k;
            layer_count = layer_count.max(k);
        }
        Ok(LayerPartition { layer_index, layer_count })
    }

    /// Annular partition of a disk domain. The admissible outer radius
    /// R = radius + collar_width must satisfy R^2 = 2K*eps^2 for an integer K.
    pub fn annular_partition(&self) -> Result<AnnularPartition> {
        let radius = match self.shape() {
            Some(Shape::Disk { radius }) => radius,
            _ => return Err(Error::NotADisk),
        };
        let eps = self.epsilon();
        let outer = radius + self.collar_width();
        let k_real = outer * outer / (2.0 * eps * eps);
        let k_round = k_real.round().max(1.0);
        if (k_real - k_round).abs() > 1e-9 * k_round {
            let suggested = (2.0 * k_round * eps * eps).sqrt() - self.collar_width();
            return Err(Error::InadmissibleRadius { outer, suggested });
        }
        let count = k_round as u32;
        let two_eps2 = 2.0 * eps * eps;
        let annulus_index = self
            .points()
            .iter()
            .map(|p| {
                let r2 = p[0] * p[0] + p[1] * p[1];
                if r2 == 0.0 {
                    1
                } else {
                    robust_ceil(r2 / two_eps2).min(count)
                }
            })
            .collect();
        Ok(AnnularPartition { annulus_index, annulus_count: count, partition_radius: outer })
    }
}

/// Layer invariant check: k(x)*eps >= dist(x) > (k(x)-1)*eps for interior x.
pub fn layer_bounds_hold(domain: &DiscreteDomain, layers: &LayerPartition) -> Result<bool> {
    let eps = domain.epsilon();
    let tol = 1e-9 * eps;
    for &i in domain.interior_indices() {
        let d = domain.boundary_distance(i as usize)?;
        let k = layers.index(i as usize) as f64;
        if !(d <= k * eps + tol && d > (k - 1.0) * eps - tol) {
            return Ok(false);
        }
    }
    Ok(true)
}
