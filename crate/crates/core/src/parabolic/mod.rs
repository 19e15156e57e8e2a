//! Space-time max-min operator for fully nonlinear parabolic problems.
//!
//! One step applies, at each spatial point,
//!
//! S[x, phi] = max over (p, Gamma) of min over w of
//!             [ phi(x + eps*w) - eps*p.w - (eps^2/2)*Gamma w.w - eps^2*F(x, p, Gamma) ]
//!
//! over the sampled control windows. The space-time operator writes the
//! initial data on the first time level and S of the previous level
//! elsewhere. For smooth phi the one-step gain expands as
//! S[x, phi] - phi(x) = -eps^2 * F(x, grad phi, hess phi) + o(eps^2),
//! so the fixed-point recursion marches u_t + F = 0 forward in time.

mod controls;

pub use controls::{validate_exponents, ControlGrid, ControlResolution, Nonlinearity, SymMatrix};

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const PAR_THRESHOLD: usize = 2048;

/// Periodic lattice on [-half_side, half_side)^dim.
#[derive(Debug, Clone, PartialEq)]
pub struct TorusGrid {
    dim: usize,
    half_side: f64,
    per_axis: usize,
    spacing: f64,
}

impl TorusGrid {
    pub fn new(dim: usize, half_side: f64, per_axis: usize) -> Result<Self> {
        if dim == 0 || dim > 2 {
            return Err(Error::UnsupportedDimension { dim });
        }
        if !half_side.is_finite() || half_side <= 0.0 || per_axis < 2 {
            return Err(Error::InvalidParameter {
                reason: format!("torus half_side {half_side}, per_axis {per_axis}"),
            });
        }
        let spacing = 2.0 * half_side / per_axis as f64;
        Ok(Self { dim, half_side, per_axis, spacing })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn len(&self) -> usize {
        if self.dim == 1 {
            self.per_axis
        } else {
            self.per_axis * self.per_axis
        }
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn point(&self, index: usize) -> [f64; 2] {
        let coord = |k: usize| -self.half_side + k as f64 * self.spacing;
        if self.dim == 1 {
            [coord(index), 0.0]
        } else {
            [coord(index % self.per_axis), coord(index / self.per_axis)]
        }
    }

    /// Nearest lattice point with periodic wrapping.
    pub fn nearest_index(&self, y: [f64; 2]) -> usize {
        let m = self.per_axis as i64;
        let fold = |v: f64| -> usize {
            let k = ((v + self.half_side) / self.spacing).round() as i64;
            k.rem_euclid(m) as usize
        };
        if self.dim == 1 {
            fold(y[0])
        } else {
            fold(y[0]) + self.per_axis * fold(y[1])
        }
    }
}

/// Values indexed by (spatial point, time level t_m = m*eps^2).
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceTimeField {
    torus: TorusGrid,
    epsilon: f64,
    levels: usize,
    values: Vec<f64>,
}

impl SpaceTimeField {
    pub fn from_fn(
        torus: TorusGrid,
        epsilon: f64,
        levels: usize,
        f: impl Fn([f64; 2], f64) -> f64,
    ) -> Self {
        let eps2 = epsilon * epsilon;
        let n = torus.len();
        let values = (0..levels * n)
            .map(|idx| {
                let (m, i) = (idx / n, idx % n);
                f(torus.point(i), m as f64 * eps2)
            })
            .collect();
        Self { torus, epsilon, levels, values }
    }

    pub fn torus(&self) -> &TorusGrid {
        &self.torus
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn time(&self, level: usize) -> f64 {
        level as f64 * self.epsilon * self.epsilon
    }

    pub fn row(&self, level: usize) -> &[f64] {
        let n = self.torus.len();
        &self.values[level * n..(level + 1) * n]
    }

    pub fn sup_distance(&self, other: &Self) -> f64 {
        debug_assert_eq!(self.values.len(), other.values.len());
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Minimum of self - other over all (point, level) entries.
    pub fn min_difference(&self, other: &Self) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a - b)
            .fold(f64::INFINITY, f64::min)
    }

    /// Writes `t,index,value` rows.
    pub fn write_csv(&self, mut w: impl std::io::Write) -> Result<()> {
        writeln!(w, "t,index,value")?;
        let n = self.torus.len();
        for m in 0..self.levels {
            let t = self.time(m);
            for (i, v) in self.row(m).iter().enumerate() {
                writeln!(w, "{t},{i},{v}")?;
            }
        }
        let _ = n;
        Ok(())
    }
}

/// Precomputed payoff tables for repeated S evaluations over one grid.
struct STables<'g> {
    grid: &'g ControlGrid,
    // 0.5*eps^2 * Gamma w.w, laid out [gamma_index * n_w + w_index]
    quads: Vec<f64>,
    // eps * p.w, laid out [p_index * n_w + w_index]
    pw: Vec<f64>,
}

impl<'g> STables<'g> {
    fn new(grid: &'g ControlGrid) -> Self {
        let eps = grid.epsilon;
        let e2 = eps * eps;
        let n_w = grid.w_samples.len();
        let mut quads = Vec::with_capacity(grid.gamma_samples.len() * n_w);
        for g in &grid.gamma_samples {
            for w in &grid.w_samples {
                quads.push(0.5 * e2 * g.quad(*w));
            }
        }
        let mut pw = Vec::with_capacity(grid.p_samples.len() * n_w);
        for p in &grid.p_samples {
            for w in &grid.w_samples {
                pw.push(eps * (p[0] * w[0] + p[1] * w[1]));
            }
        }
        Self { grid, quads, pw }
    }

    fn value(&self, x: [f64; 2], phi: impl Fn([f64; 2]) -> f64, f: &Nonlinearity) -> f64 {
        let eps = self.grid.epsilon;
        let e2 = eps * eps;
        let n_w = self.grid.w_samples.len();
        let phi_w: Vec<f64> = self
            .grid
            .w_samples
            .iter()
            .map(|w| phi([x[0] + eps * w[0], x[1] + eps * w[1]]))
            .collect();
        let mut best = f64::NEG_INFINITY;
        let mut diff = vec![0.0; n_w];
        for (pi, p) in self.grid.p_samples.iter().enumerate() {
            let pw_row = &self.pw[pi * n_w..(pi + 1) * n_w];
            for k in 0..n_w {
                diff[k] = phi_w[k] - pw_row[k];
            }
            for (gi, g) in self.grid.gamma_samples.iter().enumerate() {
                let quad_row = &self.quads[gi * n_w..(gi + 1) * n_w];
                let mut inner = f64::INFINITY;
                for k in 0..n_w {
                    inner = inner.min(diff[k] - quad_row[k]);
                }
                let value = inner - e2 * f.eval(x, *p, g);
                best = best.max(value);
            }
        }
        best
    }
}

/// One-step operator value at `x` for an arbitrary spatial function.
pub fn s_operator(
    x: [f64; 2],
    phi: impl Fn([f64; 2]) -> f64,
    nonlinearity: &Nonlinearity,
    grid: &ControlGrid,
) -> Result<f64> {
    validate_exponents(
        grid.alpha,
        grid.beta,
        grid.gamma,
        nonlinearity.grad_power,
        nonlinearity.hess_power,
    )?;
    Ok(STables::new(grid).value(x, phi, nonlinearity))
}

/// One-step operator value at torus point `index` for a lattice row; the
/// spatial function is the row read at the nearest wrapped lattice point.
pub fn s_operator_on_row(
    index: usize,
    row: &[f64],
    torus: &TorusGrid,
    nonlinearity: &Nonlinearity,
    grid: &ControlGrid,
) -> Result<f64> {
    if row.len() != torus.len() {
        return Err(Error::FieldLength { expected: torus.len(), got: row.len() });
    }
    s_operator(torus.point(index), |y| row[torus.nearest_index(y)], nonlinearity, grid)
}

fn check_pairing(u: &SpaceTimeField, grid: &ControlGrid, f: &Nonlinearity) -> Result<()> {
    if grid.dim != u.torus.dim() {
        return Err(Error::UnsupportedDimension { dim: grid.dim });
    }
    if (grid.epsilon - u.epsilon).abs() > 1e-15 * u.epsilon {
        return Err(Error::InvalidParameter {
            reason: format!("grid epsilon {} differs from field epsilon {}", grid.epsilon, u.epsilon),
        });
    }
    validate_exponents(grid.alpha, grid.beta, grid.gamma, f.grad_power, f.hess_power)
}

/// Full space-time image: the first level is the initial data, level m >= 1
/// is S applied to level m-1 of the *input*. A fixed point of this map solves
/// the one-step recursion.
pub fn apply_parabolic(
    u: &SpaceTimeField,
    nonlinearity: &Nonlinearity,
    grid: &ControlGrid,
    initial: &[f64],
) -> Result<SpaceTimeField> {
    check_pairing(u, grid, nonlinearity)?;
    let n = u.torus.len();
    if initial.len() != n {
        return Err(Error::FieldLength { expected: n, got: initial.len() });
    }
    let tables = STables::new(grid);
    let mut values = Vec::with_capacity(u.levels * n);
    values.extend_from_slice(initial);
    for m in 1..u.levels {
        let prev = u.row(m - 1);
        let step = |i: usize| {
            tables.value(u.torus.point(i), |y| prev[u.torus.nearest_index(y)], nonlinearity)
        };
        let row: Vec<f64> = if n >= PAR_THRESHOLD {
            (0..n).into_par_iter().map(step).collect()
        } else {
            (0..n).map(step).collect()
        };
        values.extend(row);
    }
    Ok(SpaceTimeField { torus: u.torus.clone(), epsilon: u.epsilon, levels: u.levels, values })
}

/// Solves the recursion directly by forward substitution: level m is S of the
/// already-computed level m-1. The result is the unique fixed point of
/// [`apply_parabolic`] with the same data.
pub fn solve_parabolic(
    torus: &TorusGrid,
    epsilon: f64,
    levels: usize,
    initial: &[f64],
    nonlinearity: &Nonlinearity,
    grid: &ControlGrid,
) -> Result<SpaceTimeField> {
    let n = torus.len();
    if initial.len() != n {
        return Err(Error::FieldLength { expected: n, got: initial.len() });
    }
    let seed = SpaceTimeField::from_fn(torus.clone(), epsilon, levels, |_, _| 0.0);
    check_pairing(&seed, grid, nonlinearity)?;
    let tables = STables::new(grid);
    let mut values = Vec::with_capacity(levels * n);
    values.extend_from_slice(initial);
    for m in 1..levels {
        let prev = &values[(m - 1) * n..m * n];
        let step =
            |i: usize| tables.value(torus.point(i), |y| prev[torus.nearest_index(y)], nonlinearity);
        let row: Vec<f64> = if n >= PAR_THRESHOLD {
            (0..n).into_par_iter().map(step).collect()
        } else {
            (0..n).map(step).collect()
        };
        values.extend(row);
    }
    Ok(SpaceTimeField { torus: torus.clone(), epsilon, levels, values })
}

/// A smooth one-dimensional test function with its derivatives.
#[derive(Clone)]
pub struct TestFunction {
    pub label: String,
    value: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    derivative: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    second_derivative: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl TestFunction {
    pub fn new(
        label: impl Into<String>,
        value: impl Fn(f64) -> f64 + Send + Sync + 'static,
        derivative: impl Fn(f64) -> f64 + Send + Sync + 'static,
        second_derivative: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            label: label.into(),
            value: Arc::new(value),
            derivative: Arc::new(derivative),
            second_derivative: Arc::new(second_derivative),
        }
    }

    /// phi(x) = x^2 / 2.
    pub fn half_square() -> Self {
        Self::new("half-square", |x| 0.5 * x * x, |x| x, |_| 1.0)
    }

    /// phi(x) = a*x.
    pub fn linear(a: f64) -> Self {
        Self::new(format!("linear({a})"), move |x| a * x, move |_| a, |_| 0.0)
    }

    /// phi identically zero.
    pub fn zero() -> Self {
        Self::new("zero", |_| 0.0, |_| 0.0, |_| 0.0)
    }

    pub fn value(&self, x: f64) -> f64 {
        (self.value)(x)
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ConsistencyRow {
    pub epsilon: f64,
    pub max_error: f64,
}

/// True when the error column strictly decreases along the ladder.
pub fn column_is_decreasing(rows: &[ConsistencyRow]) -> bool {
    rows.windows(2).all(|w| w[1].max_error < w[0].max_error)
}

const CONSISTENCY_ALPHA: f64 = 0.25;
const CONSISTENCY_BETA: f64 = 0.5;
const CONSISTENCY_GAMMA: f64 = 0.5;

/// Sample points for the consistency sweep, aligned with the slope grid.
fn consistency_x_samples() -> Vec<f64> {
    (-4..=4).map(|k| k as f64 * 0.25).collect()
}

/// Quarter-integer multiples within [-bound, bound], refined by `scale`.
fn aligned_samples(bound: f64, base_step: f64, scale: u32) -> Vec<f64> {
    let step = base_step / scale as f64;
    let kmax = (bound / step).floor() as i64;
    (-kmax..=kmax).map(|k| k as f64 * step).collect()
}

/// Control windows for the consistency sweep. The slope grid sits on
/// quarter-integers so the sample points carry their exact optimal slope; the
/// curvature grid is dense at scale 0.05*eps; refinement by `scale` nests.
///
/// Besides the uniform moves, the w family carries phase-sweep clusters at 0
/// and at the window edges: consecutive cluster targets advance the spatial
/// quantization phase by 1/(64*scale) of a cell, so the minimizing player
/// always reaches the extremal quantization error and the measured column
/// stays stable under resolution doubling.
fn consistency_grid(epsilon: f64, scale: u32) -> ControlGrid {
    let w_bound = epsilon.powf(-CONSISTENCY_ALPHA);
    let p_bound = epsilon.powf(-CONSISTENCY_BETA);
    let g_bound = epsilon.powf(-CONSISTENCY_GAMMA);
    let base_w = {
        let n = (epsilon.powf(-(1.0 + CONSISTENCY_ALPHA))).ceil() as usize;
        let n = if n.is_multiple_of(2) { n + 1 } else { n };
        (n - 1) * scale as usize + 1
    };
    let step_w = 2.0 * w_bound / (base_w - 1) as f64;
    let mut w_samples: Vec<[f64; 2]> =
        (0..base_w).map(|k| [-w_bound + k as f64 * step_w, 0.0]).collect();
    let cluster = 64 * scale as usize;
    // One spatial quantization period (eps^3) split into `cluster` phases.
    let phase_step = epsilon * epsilon / cluster as f64;
    for j in 1..cluster {
        let offset = j as f64 * phase_step;
        w_samples.push([offset, 0.0]);
        w_samples.push([w_bound - offset, 0.0]);
        w_samples.push([-w_bound + offset, 0.0]);
    }
    let p_samples = aligned_samples(p_bound, 0.25, scale).into_iter().map(|p| [p, 0.0]).collect();
    let gamma_samples = aligned_samples(g_bound, 0.05 * epsilon, scale)
        .into_iter()
        .map(|xx| SymMatrix { dim: 1, xx, yy: 0.0, xy: 0.0 })
        .collect();
    ControlGrid {
        dim: 1,
        epsilon,
        alpha: CONSISTENCY_ALPHA,
        beta: CONSISTENCY_BETA,
        gamma: CONSISTENCY_GAMMA,
        w_samples,
        p_samples,
        gamma_samples,
    }
}

/// One-step consistency sweep on a one-dimensional torus: for each epsilon,
/// the maximal deviation of (S[x, phi] - phi(x)) / eps^2 from
/// -F(x, phi'(x), phi''(x)) over the sample points. Spatial evaluation is
/// quantized at step eps^3, so the quantization term dominates the sampled
/// control gaps and the column shrinks linearly with epsilon.
pub fn consistency_table(
    phi: &TestFunction,
    nonlinearity: &Nonlinearity,
    ladder: &[f64],
    resolution_scale: u32,
) -> Result<Vec<ConsistencyRow>> {
    if resolution_scale == 0 {
        return Err(Error::InvalidParameter { reason: "resolution scale must be >= 1".into() });
    }
    validate_exponents(
        CONSISTENCY_ALPHA,
        CONSISTENCY_BETA,
        CONSISTENCY_GAMMA,
        nonlinearity.grad_power,
        nonlinearity.hess_power,
    )?;
    let xs = consistency_x_samples();
    let mut rows = Vec::with_capacity(ladder.len());
    for &eps in ladder {
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::InvalidParameter { reason: format!("epsilon {eps} outside (0,1)") });
        }
        let grid = consistency_grid(eps, resolution_scale);
        let tables = STables::new(&grid);
        let quant = eps * eps * eps;
        let e2 = eps * eps;
        let max_error = xs
            .par_iter()
            .map(|&x| {
                let phi_q = |y: [f64; 2]| phi.value((y[0] / quant).round() * quant);
                let s = tables.value([x, 0.0], phi_q, nonlinearity);
                let dphi = (phi.derivative)(x);
                let d2phi = (phi.second_derivative)(x);
                let gamma = SymMatrix { dim: 1, xx: d2phi, yy: 0.0, xy: 0.0 };
                let target = -nonlinearity.eval([x, 0.0], [dphi, 0.0], &gamma);
                ((s - phi.value(x)) / e2 - target).abs()
            })
            .reduce(|| 0.0, f64::max);
        rows.push(ConsistencyRow { epsilon: eps, max_error });
    }
    Ok(rows)
}

/// Writes `epsilon,max_error` rows.
pub fn write_consistency_csv(rows: &[ConsistencyRow], mut w: impl std::io::Write) -> Result<()> {
    writeln!(w, "epsilon,max_error")?;
    for r in rows {
        writeln!(w, "{},{}", r.epsilon, r.max_error)?;
    }
    Ok(())
}
