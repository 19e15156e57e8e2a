//! Control sets and nonlinearities for the space-time max-min operator.

use std::sync::Arc;

use rand::Rng;

use crate::error::{Error, Result};

/// Symmetric matrix in dimension 1 or 2 (xx, yy, xy; the off-diagonal and yy
/// entries are zero in dimension 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymMatrix {
    pub dim: usize,
    pub xx: f64,
    pub yy: f64,
    pub xy: f64,
}

impl SymMatrix {
    pub fn zero(dim: usize) -> Self {
        Self { dim, xx: 0.0, yy: 0.0, xy: 0.0 }
    }

    pub fn diagonal(dim: usize, xx: f64, yy: f64) -> Self {
        Self { dim, xx, yy, xy: 0.0 }
    }

    /// Spectral norm (largest absolute eigenvalue).
    pub fn op_norm(&self) -> f64 {
        if self.dim == 1 {
            self.xx.abs()
        } else {
            let mean = 0.5 * (self.xx + self.yy);
            let spread = (0.25 * (self.xx - self.yy).powi(2) + self.xy * self.xy).sqrt();
            (mean + spread).abs().max((mean - spread).abs())
        }
    }

    pub fn trace(&self) -> f64 {
        if self.dim == 1 {
            self.xx
        } else {
            self.xx + self.yy
        }
    }

    /// Quadratic form w . (A w).
    pub fn quad(&self, w: [f64; 2]) -> f64 {
        if self.dim == 1 {
            self.xx * w[0] * w[0]
        } else {
            self.xx * w[0] * w[0] + 2.0 * self.xy * w[0] * w[1] + self.yy * w[1] * w[1]
        }
    }

    /// Smallest eigenvalue; nonnegative means positive semidefinite.
    pub fn min_eigenvalue(&self) -> f64 {
        if self.dim == 1 {
            self.xx
        } else {
            let mean = 0.5 * (self.xx + self.yy);
            let spread = (0.25 * (self.xx - self.yy).powi(2) + self.xy * self.xy).sqrt();
            mean - spread
        }
    }
}

type EvalFn = dyn Fn([f64; 2], [f64; 2], &SymMatrix) -> f64 + Send + Sync;

/// A fully nonlinear right-hand side F(x, p, Gamma) with its structure
/// constants: Lipschitz bound in (p, Gamma), growth bound
/// |F| <= growth*(1 + |p|^q + |Gamma|^r), and the powers q, r.
#[derive(Clone)]
pub struct Nonlinearity {
    pub label: String,
    eval: Arc<EvalFn>,
    pub lipschitz: f64,
    pub growth: f64,
    pub grad_power: f64,
    pub hess_power: f64,
}

impl std::fmt::Debug for Nonlinearity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Nonlinearity")
            .field("label", &self.label)
            .field("lipschitz", &self.lipschitz)
            .field("growth", &self.growth)
            .field("grad_power", &self.grad_power)
            .field("hess_power", &self.hess_power)
            .finish()
    }
}

impl Nonlinearity {
    pub fn new(
        label: impl Into<String>,
        eval: impl Fn([f64; 2], [f64; 2], &SymMatrix) -> f64 + Send + Sync + 'static,
        lipschitz: f64,
        growth: f64,
        grad_power: f64,
        hess_power: f64,
    ) -> Self {
        Self {
            label: label.into(),
            eval: Arc::new(eval),
            lipschitz,
            growth,
            grad_power,
            hess_power,
        }
    }

    /// F identically zero.
    pub fn zero() -> Self {
        Self::new("zero", |_, _, _| 0.0, 0.0, 1.0, 1.0, 1.0)
    }

    /// Heat flow: F = -trace(Gamma), elliptic with q = r = 1.
    pub fn heat(dim: usize) -> Self {
        let n = dim as f64;
        Self::new("heat", |_, _, g| -g.trace(), n, n, 1.0, 1.0)
    }

    /// Eikonal-type first-order term: F = |p|, q = 1.
    pub fn gradient_norm() -> Self {
        Self::new(
            "gradient-norm",
            |_, p, _| (p[0] * p[0] + p[1] * p[1]).sqrt(),
            1.0,
            1.0,
            1.0,
            1.0,
        )
    }

    pub fn eval(&self, x: [f64; 2], p: [f64; 2], gamma: &SymMatrix) -> f64 {
        (self.eval)(x, p, gamma)
    }

    /// Spot-checks degenerate ellipticity, F(x,p,A) <= F(x,p,B) for A >= B,
    /// on random matrix pairs.
    pub fn spot_check_ellipticity(&self, dim: usize, trials: usize, rng: &mut impl Rng) -> bool {
        for _ in 0..trials {
            let x = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
            let p = [rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)];
            let b = random_sym(dim, 2.0, rng);
            let bump = random_psd(dim, 2.0, rng);
            let a = SymMatrix {
                dim,
                xx: b.xx + bump.xx,
                yy: b.yy + bump.yy,
                xy: b.xy + bump.xy,
            };
            if self.eval(x, p, &a) > self.eval(x, p, &b) + 1e-12 {
                return false;
            }
        }
        true
    }

    /// Spot-checks the Lipschitz and growth bounds on random samples.
    pub fn spot_check_bounds(&self, dim: usize, trials: usize, rng: &mut impl Rng) -> bool {
        for _ in 0..trials {
            let x = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
            let p1: [f64; 2] = [rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)];
            let p2: [f64; 2] = [rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)];
            let g1 = random_sym(dim, 2.0, rng);
            let g2 = random_sym(dim, 2.0, rng);
            let dp = ((p1[0] - p2[0]).powi(2) + (p1[1] - p2[1]).powi(2)).sqrt();
            let dg = SymMatrix {
                dim,
                xx: g1.xx - g2.xx,
                yy: g1.yy - g2.yy,
                xy: g1.xy - g2.xy,
            }
            .op_norm();
            let lhs = (self.eval(x, p1, &g1) - self.eval(x, p2, &g2)).abs();
            if lhs > self.lipschitz * (dp + dg) + 1e-12 {
                return false;
            }
            let pn = (p1[0] * p1[0] + p1[1] * p1[1]).sqrt();
            let bound = self.growth
                * (1.0 + pn.powf(self.grad_power) + g1.op_norm().powf(self.hess_power));
            if self.eval(x, p1, &g1).abs() > bound + 1e-12 {
                return false;
            }
        }
        true
    }
}

fn random_sym(dim: usize, scale: f64, rng: &mut impl Rng) -> SymMatrix {
    if dim == 1 {
        SymMatrix { dim, xx: rng.gen_range(-scale..scale), yy: 0.0, xy: 0.0 }
    } else {
        SymMatrix {
            dim,
            xx: rng.gen_range(-scale..scale),
            yy: rng.gen_range(-scale..scale),
            xy: rng.gen_range(-scale..scale),
        }
    }
}

fn random_psd(dim: usize, scale: f64, rng: &mut impl Rng) -> SymMatrix {
    if dim == 1 {
        SymMatrix { dim, xx: rng.gen_range(0.0..scale), yy: 0.0, xy: 0.0 }
    } else {
        // c*v v^T + d*I
        let v = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
        let c = rng.gen_range(0.0..scale);
        let d = rng.gen_range(0.0..scale);
        SymMatrix {
            dim,
            xx: c * v[0] * v[0] + d,
            yy: c * v[1] * v[1] + d,
            xy: c * v[0] * v[1],
        }
    }
}

/// Checks the admissible relations between the control-window exponents and
/// the growth powers (q, r) of the nonlinearity.
pub fn validate_exponents(alpha: f64, beta: f64, gamma: f64, q: f64, r: f64) -> Result<()> {
    let checks: [(&str, bool); 7] = [
        ("alpha + beta < 1", alpha + beta < 1.0),
        ("2*alpha + gamma < 2", 2.0 * alpha + gamma < 2.0),
        ("max(beta*q, gamma*r) < 2", (beta * q).max(gamma * r) < 2.0),
        ("gamma < 1 - alpha", gamma < 1.0 - alpha),
        ("beta*(q - 1) < alpha + 1", beta * (q - 1.0) < alpha + 1.0),
        ("gamma*(r - 1) < 2*alpha", gamma * (r - 1.0) < 2.0 * alpha),
        ("gamma*r < 1 + alpha", gamma * r < 1.0 + alpha),
    ];
    for (name, ok) in checks {
        if !ok {
            return Err(Error::ExponentConstraint { constraint: name.into() });
        }
    }
    Ok(())
}

/// Per-axis sample counts for the three control families.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ControlResolution {
    pub w: usize,
    pub p: usize,
    pub gamma: usize,
}

/// Sampled control sets: moves w with |w| <= eps^-alpha, slopes p with
/// |p| <= eps^-beta, symmetric matrices Gamma with |Gamma| <= eps^-gamma.
/// Every family contains zero.
#[derive(Debug, Clone)]
pub struct ControlGrid {
    pub dim: usize,
    pub epsilon: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub w_samples: Vec<[f64; 2]>,
    pub p_samples: Vec<[f64; 2]>,
    pub gamma_samples: Vec<SymMatrix>,
}

fn odd(n: usize) -> usize {
    if n.is_multiple_of(2) {
        n + 1
    } else {
        n
    }
}

fn linspace(bound: f64, count: usize) -> Vec<f64> {
    let count = odd(count.max(3));
    let step = 2.0 * bound / (count - 1) as f64;
    (0..count).map(|k| -bound + k as f64 * step).collect()
}

/// Vectors on the per-axis grid with norm at most `bound`.
fn vector_samples(dim: usize, bound: f64, count: usize) -> Vec<[f64; 2]> {
    let axis = linspace(bound, count);
    let cut = bound * bound * (1.0 + 1e-12);
    let mut out = Vec::new();
    if dim == 1 {
        for &x in &axis {
            out.push([x, 0.0]);
        }
    } else {
        for &x in &axis {
            for &y in &axis {
                if x * x + y * y <= cut {
                    out.push([x, y]);
                }
            }
        }
    }
    out
}

impl ControlGrid {
    /// Validates the exponent relations against the powers (q, r) of the
    /// nonlinearity this grid will serve, then samples the three families.
    #[allow(clippy::too_many_arguments)]
    pub fn build(
        dim: usize,
        epsilon: f64,
        alpha: f64,
        beta: f64,
        gamma: f64,
        q: f64,
        r: f64,
        resolution: ControlResolution,
    ) -> Result<Self> {
        if dim == 0 || dim > 2 {
            return Err(Error::UnsupportedDimension { dim });
        }
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::InvalidParameter {
                reason: format!("epsilon {epsilon} outside (0, 1)"),
            });
        }
        for (name, v) in [("alpha", alpha), ("beta", beta), ("gamma", gamma)] {
            if v <= 0.0 {
                return Err(Error::ExponentConstraint { constraint: format!("{name} > 0") });
            }
        }
        validate_exponents(alpha, beta, gamma, q, r)?;

        let w_bound = epsilon.powf(-alpha);
        let p_bound = epsilon.powf(-beta);
        let g_bound = epsilon.powf(-gamma);
        let w_samples = vector_samples(dim, w_bound, resolution.w);
        let p_samples = vector_samples(dim, p_bound, resolution.p);

        let mut gamma_samples = Vec::new();
        if dim == 1 {
            for &xx in &linspace(g_bound, resolution.gamma) {
                gamma_samples.push(SymMatrix { dim, xx, yy: 0.0, xy: 0.0 });
            }
        } else {
            let axis = linspace(g_bound, resolution.gamma);
            for &xx in &axis {
                for &yy in &axis {
                    for &xy in &axis {
                        let m = SymMatrix { dim, xx, yy, xy };
                        if m.op_norm() <= g_bound * (1.0 + 1e-12) {
                            gamma_samples.push(m);
                        }
                    }
                }
            }
        }

        let grid = Self { dim, epsilon, alpha, beta, gamma, w_samples, p_samples, gamma_samples };
        debug_assert!(grid.w_samples.iter().any(|w| w[0] == 0.0 && w[1] == 0.0));
        debug_assert!(grid.p_samples.iter().any(|p| p[0] == 0.0 && p[1] == 0.0));
        debug_assert!(grid.gamma_samples.iter().any(|g| g.op_norm() == 0.0));
        Ok(grid)
    }

    /// Per-axis counts that grow as epsilon shrinks: ceil(eps^-(1+exponent))
    /// per axis, doubled for the slope and curvature families.
    pub fn default_resolution(
        epsilon: f64,
        alpha: f64,
        beta: f64,
        gamma: f64,
    ) -> ControlResolution {
        let rule = |e: f64| -> usize { (epsilon.powf(-(1.0 + e))).ceil() as usize };
        ControlResolution { w: rule(alpha), p: 2 * rule(beta), gamma: 2 * rule(gamma) }
    }
}
