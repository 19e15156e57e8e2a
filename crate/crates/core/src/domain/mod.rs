//! Finite discretizations of a bounded domain with a boundary collar.
//!
//! The point set X realizes the closure of a domain plus a collar band of
//! configurable width carrying extended boundary data. Operators jump up to
//! their reach (epsilon, or sqrt(2)*epsilon for the curvature stencil), so
//! every interior point must see its whole ball inside X.

mod partitions;

pub use partitions::{layer_bounds_hold, AnnularPartition, LayerPartition};

use std::collections::HashMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::ScalarField;

/// Relative margin on squared distances for the strict-ball test. Lattice
/// points at distance exactly epsilon must stay excluded under float noise.
pub(crate) const BALL_EDGE_MARGIN: f64 = 1e-9;

const GEOM_TOL: f64 = 1e-12;

/// Built-in shapes with analytic boundary distance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Shape {
    Interval { a: f64, b: f64 },
    Rectangle { min: [f64; 2], max: [f64; 2] },
    Disk { radius: f64 },
}

impl Shape {
    pub fn dim(&self) -> usize {
        match self {
            Shape::Interval { .. } => 1,
            _ => 2,
        }
    }

    fn scale(&self) -> f64 {
        match self {
            Shape::Interval { a, b } => a.abs().max(b.abs()).max(1.0),
            Shape::Rectangle { min, max } => min
                .iter()
                .chain(max.iter())
                .fold(1.0f64, |m, v| m.max(v.abs())),
            Shape::Disk { radius } => radius.max(1.0),
        }
    }

    /// Strict membership in the open domain.
    fn contains_strict(&self, p: [f64; 2]) -> bool {
        let tol = GEOM_TOL * self.scale();
        match *self {
            Shape::Interval { a, b } => p[0] > a + tol && p[0] < b - tol,
            Shape::Rectangle { min, max } => {
                (0..2).all(|k| p[k] > min[k] + tol && p[k] < max[k] - tol)
            }
            Shape::Disk { radius } => p[0] * p[0] + p[1] * p[1] < radius * radius * (1.0 - GEOM_TOL),
        }
    }

    /// Distance from `p` to the closed domain (0 inside).
    fn exterior_distance(&self, p: [f64; 2]) -> f64 {
        match *self {
            Shape::Interval { a, b } => (a - p[0]).max(p[0] - b).max(0.0),
            Shape::Rectangle { min, max } => {
                let dx = (min[0] - p[0]).max(p[0] - max[0]).max(0.0);
                let dy = (min[1] - p[1]).max(p[1] - max[1]).max(0.0);
                (dx * dx + dy * dy).sqrt()
            }
            Shape::Disk { radius } => (norm(p) - radius).max(0.0),
        }
    }

    /// Distance from an interior point to the domain boundary.
    fn interior_distance(&self, p: [f64; 2]) -> f64 {
        match *self {
            Shape::Interval { a, b } => (p[0] - a).min(b - p[0]),
            Shape::Rectangle { min, max } => (0..2)
                .map(|k| (p[k] - min[k]).min(max[k] - p[k]))
                .fold(f64::INFINITY, f64::min),
            Shape::Disk { radius } => radius - norm(p),
        }
    }

    /// Nearest boundary point; used to extend boundary data over the collar.
    pub fn project_to_boundary(&self, p: [f64; 2]) -> [f64; 2] {
        match *self {
            Shape::Interval { a, b } => {
                let mid = 0.5 * (a + b);
                if p[0] <= mid {
                    [a, 0.0]
                } else {
                    [b, 0.0]
                }
            }
            Shape::Rectangle { min, max } => {
                let c = [
                    p[0].clamp(min[0], max[0]),
                    p[1].clamp(min[1], max[1]),
                ];
                if self.contains_strict(c) {
                    // Interior point: push the closest coordinate onto a face.
                    let mut best = (f64::INFINITY, c);
                    for k in 0..2 {
                        for side in [min[k], max[k]] {
                            let d = (c[k] - side).abs();
                            if d < best.0 {
                                let mut q = c;
                                q[k] = side;
                                best = (d, q);
                            }
                        }
                    }
                    best.1
                } else {
                    c
                }
            }
            Shape::Disk { radius } => {
                let n = norm(p);
                if n == 0.0 {
                    [radius, 0.0]
                } else {
                    [p[0] * radius / n, p[1] * radius / n]
                }
            }
        }
    }

    /// Diameter of the closed domain (without collar).
    pub fn diameter(&self) -> f64 {
        match *self {
            Shape::Interval { a, b } => b - a,
            Shape::Rectangle { min, max } => {
                let d = [max[0] - min[0], max[1] - min[1]];
                (d[0] * d[0] + d[1] * d[1]).sqrt()
            }
            Shape::Disk { radius } => 2.0 * radius,
        }
    }
}

fn norm(p: [f64; 2]) -> f64 {
    (p[0] * p[0] + p[1] * p[1]).sqrt()
}

fn dist2(p: [f64; 2], q: [f64; 2]) -> f64 {
    let dx = p[0] - q[0];
    let dy = p[1] - q[1];
    dx * dx + dy * dy
}

/// Point role. Boundary covers the collar band outside the open domain,
/// including lattice points sitting exactly on the domain boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Role {
    Interior,
    Boundary,
}

#[derive(Debug, Clone)]
struct LatticeIndex {
    anchor: [f64; 2],
    inv_h: f64,
    cells: HashMap<(i64, i64), u32>,
}

/// A finite point set with roles, step scale epsilon and precomputed
/// strict-ball neighbor lists for interior points.
#[derive(Debug, Clone)]
pub struct DiscreteDomain {
    dim: usize,
    points: Vec<[f64; 2]>,
    roles: Vec<Role>,
    epsilon: f64,
    spacing: f64,
    collar_width: f64,
    neighbors: Vec<Vec<u32>>,
    interior: Vec<u32>,
    boundary: Vec<u32>,
    shape: Option<Shape>,
    boundary_distance: Option<Vec<f64>>,
    lattice: Option<LatticeIndex>,
}

/// Builds a uniform lattice of spacing `h` covering the shape plus a collar of
/// the given width. Points strictly inside the shape become interior; points
/// within `collar_width` of the closed shape (boundary included) become
/// boundary carriers.
pub fn build_grid(shape: Shape, h: f64, epsilon: f64, collar_width: f64) -> Result<DiscreteDomain> {
    if !(h > 0.0 && epsilon > 0.0 && h < epsilon) {
        return Err(Error::InvalidSpacing { h, epsilon });
    }
    if collar_width < epsilon {
        return Err(Error::CollarTooNarrow { required: epsilon, got: collar_width });
    }

    let dim = shape.dim();
    let (anchor, lo, hi) = match shape {
        Shape::Interval { a, b } => ([a, 0.0], [a, 0.0], [b, 0.0]),
        Shape::Rectangle { min, max } => (min, min, max),
        Shape::Disk { radius } => ([0.0, 0.0], [-radius, -radius], [radius, radius]),
    };

    let range = |k: usize| -> (i64, i64) {
        if k >= dim {
            return (0, 0);
        }
        let lo_i = ((lo[k] - collar_width - anchor[k]) / h).floor() as i64 - 1;
        let hi_i = ((hi[k] + collar_width - anchor[k]) / h).ceil() as i64 + 1;
        (lo_i, hi_i)
    };
    let (i0, i1) = range(0);
    let (j0, j1) = range(1);

    let mut points = Vec::new();
    let mut roles = Vec::new();
    let mut cells = HashMap::new();
    let collar_tol = collar_width + GEOM_TOL * shape.scale();
    for i in i0..=i1 {
        for j in j0..=j1 {
            let p = [anchor[0] + i as f64 * h, anchor[1] + j as f64 * h];
            let role = if shape.contains_strict(p) {
                Role::Interior
            } else if shape.exterior_distance(p) <= collar_tol {
                Role::Boundary
            } else {
                continue;
            };
            cells.insert((i, j), points.len() as u32);
            points.push(p);
            roles.push(role);
        }
    }

    if !roles.contains(&Role::Interior) {
        return Err(Error::EmptyInterior { h });
    }

    let neighbors = lattice_neighbors(&points, &roles, &cells, anchor, h, epsilon, dim);
    let mut domain = DiscreteDomain {
        dim,
        points,
        roles,
        epsilon,
        spacing: h,
        collar_width,
        neighbors,
        interior: Vec::new(),
        boundary: Vec::new(),
        shape: Some(shape),
        boundary_distance: None,
        lattice: Some(LatticeIndex { anchor, inv_h: 1.0 / h, cells }),
    };
    domain.rebuild_role_lists();
    Ok(domain)
}

fn lattice_neighbors(
    points: &[[f64; 2]],
    roles: &[Role],
    cells: &HashMap<(i64, i64), u32>,
    anchor: [f64; 2],
    h: f64,
    epsilon: f64,
    dim: usize,
) -> Vec<Vec<u32>> {
    let reach = (epsilon / h).ceil() as i64 + 1;
    let cut = epsilon * epsilon * (1.0 - BALL_EDGE_MARGIN);
    points
        .iter()
        .enumerate()
        .map(|(idx, p)| {
            if roles[idx] != Role::Interior {
                return Vec::new();
            }
            let ci = ((p[0] - anchor[0]) / h).round() as i64;
            let cj = ((p[1] - anchor[1]) / h).round() as i64;
            let mut list = Vec::new();
            for di in -reach..=reach {
                let jr = if dim == 1 { 0..=0 } else { -reach..=reach };
                for dj in jr {
                    if let Some(&other) = cells.get(&(ci + di, cj + dj)) {
                        if dist2(*p, points[other as usize]) < cut {
                            list.push(other);
                        }
                    }
                }
            }
            list.sort_unstable();
            list
        })
        .collect()
}

impl DiscreteDomain {
    /// Builds a domain from an explicit point list. Neighbor lists are
    /// computed by brute force; boundary distances must be supplied when layer
    /// partitions are wanted.
    pub fn from_points(
        dim: usize,
        points: Vec<[f64; 2]>,
        roles: Vec<Role>,
        epsilon: f64,
        spacing: f64,
        collar_width: f64,
        boundary_distance: Option<Vec<f64>>,
    ) -> Result<Self> {
        if !(spacing > 0.0 && epsilon > 0.0 && spacing < epsilon) {
            return Err(Error::InvalidSpacing { h: spacing, epsilon });
        }
        if dim == 0 || dim > 2 {
            return Err(Error::UnsupportedDimension { dim });
        }
        if points.len() != roles.len() {
            return Err(Error::FieldLength { expected: points.len(), got: roles.len() });
        }
        if let Some(d) = &boundary_distance {
            if d.len() != points.len() {
                return Err(Error::FieldLength { expected: points.len(), got: d.len() });
            }
        }
        if !roles.contains(&Role::Interior) {
            return Err(Error::EmptyInterior { h: spacing });
        }
        let cut = epsilon * epsilon * (1.0 - BALL_EDGE_MARGIN);
        let neighbors: Vec<Vec<u32>> = points
            .iter()
            .enumerate()
            .map(|(i, p)| {
                if roles[i] != Role::Interior {
                    return Vec::new();
                }
                (0..points.len() as u32)
                    .filter(|&j| dist2(*p, points[j as usize]) < cut)
                    .collect()
            })
            .collect();
        let mut domain = Self {
            dim,
            points,
            roles,
            epsilon,
            spacing,
            collar_width,
            neighbors,
            interior: Vec::new(),
            boundary: Vec::new(),
            shape: None,
            boundary_distance,
            lattice: None,
        };
        domain.rebuild_role_lists();
        Ok(domain)
    }

    fn rebuild_role_lists(&mut self) {
        self.interior = (0..self.len() as u32)
            .filter(|&i| self.roles[i as usize] == Role::Interior)
            .collect();
        self.boundary = (0..self.len() as u32)
            .filter(|&i| self.roles[i as usize] == Role::Boundary)
            .collect();
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn collar_width(&self) -> f64 {
        self.collar_width
    }

    pub fn shape(&self) -> Option<Shape> {
        self.shape
    }

    pub fn point(&self, i: usize) -> [f64; 2] {
        self.points[i]
    }

    pub fn points(&self) -> &[[f64; 2]] {
        &self.points
    }

    pub fn role(&self, i: usize) -> Role {
        self.roles[i]
    }

    pub fn is_interior(&self, i: usize) -> bool {
        self.roles[i] == Role::Interior
    }

    pub fn interior_indices(&self) -> &[u32] {
        &self.interior
    }

    pub fn boundary_indices(&self) -> &[u32] {
        &self.boundary
    }

    /// Strict-ball neighbor list of an interior point (includes the point).
    pub fn neighbors(&self, i: usize) -> &[u32] {
        &self.neighbors[i]
    }

    /// Distance from an interior point to the domain boundary.
    pub fn boundary_distance(&self, i: usize) -> Result<f64> {
        if let Some(d) = &self.boundary_distance {
            return Ok(d[i]);
        }
        match self.shape {
            Some(shape) => Ok(shape.interior_distance(self.points[i])),
            None => Err(Error::MissingDistances),
        }
    }

    /// Diameter of X (domain plus collar band).
    pub fn diameter_with_collar(&self) -> f64 {
        match self.shape {
            Some(shape) => shape.diameter() + 2.0 * self.collar_width,
            None => {
                let mut d2max = 0.0f64;
                for (i, p) in self.points.iter().enumerate() {
                    for q in &self.points[i + 1..] {
                        d2max = d2max.max(dist2(*p, *q));
                    }
                }
                d2max.sqrt()
            }
        }
    }

    /// Checks that `field` matches this domain.
    pub fn check_field(&self, field: &ScalarField) -> Result<()> {
        if field.len() != self.len() {
            return Err(Error::FieldLength { expected: self.len(), got: field.len() });
        }
        Ok(())
    }

    /// Recomputes one neighbor list from coordinates (the stored lists must
    /// reproduce this exactly).
    pub fn recompute_neighbors(&self, i: usize) -> Vec<u32> {
        let cut = self.epsilon * self.epsilon * (1.0 - BALL_EDGE_MARGIN);
        if self.roles[i] != Role::Interior {
            return Vec::new();
        }
        (0..self.len() as u32)
            .filter(|&j| dist2(self.points[i], self.points[j as usize]) < cut)
            .collect()
    }

    /// Nearest point of X to an arbitrary target, ties broken by the
    /// lexicographically smallest coordinate pair. Off-lattice stencil
    /// evaluations resolve through this, so the selection is fixed geometry,
    /// independent of any field.
    pub fn nearest_point(&self, target: [f64; 2]) -> usize {
        if let Some(lat) = &self.lattice {
            let bi = ((target[0] - lat.anchor[0]) * lat.inv_h).round() as i64;
            let bj = ((target[1] - lat.anchor[1]) * lat.inv_h).round() as i64;
            let mut best: Option<(f64, [f64; 2], u32)> = None;
            let mut ring = 0i64;
            loop {
                let mut candidate = |i: i64, j: i64| {
                    if let Some(&idx) = lat.cells.get(&(i, j)) {
                        let p = self.points[idx as usize];
                        let d = dist2(target, p);
                        let better = match &best {
                            None => true,
                            Some((bd, bp, _)) => {
                                d < *bd || (d == *bd && (p[0], p[1]) < (bp[0], bp[1]))
                            }
                        };
                        if better {
                            best = Some((d, p, idx));
                        }
                    }
                };
                if ring == 0 {
                    candidate(bi, bj);
                } else {
                    for t in -ring..=ring {
                        candidate(bi - ring, bj + t);
                        candidate(bi + ring, bj + t);
                        if t.abs() < ring {
                            candidate(bi + t, bj - ring);
                            candidate(bi + t, bj + ring);
                        }
                    }
                }
                if let Some((d, _, idx)) = best {
                    // No cell beyond this ring can beat the current best.
                    let ring_floor = (ring as f64 - 0.5) * self.spacing;
                    if ring_floor > 0.0 && d.sqrt() <= ring_floor {
                        return idx as usize;
                    }
                }
                ring += 1;
                debug_assert!(ring < 1_000_000, "nearest_point ring search diverged");
            }
        } else {
            let mut best = (f64::INFINITY, [f64::INFINITY; 2], 0usize);
            for (i, p) in self.points.iter().enumerate() {
                let d = dist2(target, *p);
                if d < best.0 || (d == best.0 && (p[0], p[1]) < (best.1[0], best.1[1])) {
                    best = (d, *p, i);
                }
            }
            best.2
        }
    }

    /// Multi-source BFS hop count from the boundary set through neighbor
    /// lists. Errors with a witness if some interior point is unreachable,
    /// which would void any maximum-principle reasoning on this domain.
    pub fn validate_chain_reachability(&self) -> Result<usize> {
        let n = self.len();
        let mut reverse: Vec<Vec<u32>> = vec![Vec::new(); n];
        for &i in &self.interior {
            for &j in &self.neighbors[i as usize] {
                if j != i {
                    reverse[j as usize].push(i);
                }
            }
        }
        let mut hops = vec![usize::MAX; n];
        let mut queue = std::collections::VecDeque::new();
        for &b in &self.boundary {
            hops[b as usize] = 0;
            queue.push_back(b);
        }
        while let Some(j) = queue.pop_front() {
            let next = hops[j as usize] + 1;
            for &i in &reverse[j as usize] {
                if hops[i as usize] == usize::MAX {
                    hops[i as usize] = next;
                    queue.push_back(i);
                }
            }
        }
        let mut max_hops = 0;
        for &i in &self.interior {
            if hops[i as usize] == usize::MAX {
                return Err(Error::UnreachableInterior { index: i as usize });
            }
            max_hops = max_hops.max(hops[i as usize]);
        }
        Ok(max_hops)
    }

    /// Extends boundary data over X: boundary points evaluate `g` at their
    /// projection onto the domain boundary, interior points get zero.
    pub fn extend_boundary_values(&self, g: impl Fn([f64; 2]) -> f64) -> Result<ScalarField> {
        let mut values = vec![0.0; self.len()];
        for &b in &self.boundary {
            let p = self.points[b as usize];
            let q = match self.shape {
                Some(shape) => shape.project_to_boundary(p),
                None => p,
            };
            values[b as usize] = g(q);
        }
        ScalarField::from_vec(values)
    }

    /// Writes `index,x[,y],role,layer,annulus` rows.
    pub fn write_csv(
        &self,
        mut w: impl Write,
        layers: Option<&LayerPartition>,
        annuli: Option<&AnnularPartition>,
    ) -> Result<()> {
        if self.dim == 1 {
            writeln!(w, "index,x,role,layer,annulus")?;
        } else {
            writeln!(w, "index,x,y,role,layer,annulus")?;
        }
        for i in 0..self.len() {
            let p = self.points[i];
            let role = match self.roles[i] {
                Role::Interior => "interior",
                Role::Boundary => "boundary",
            };
            let layer = layers
                .map(|l| l.index(i).to_string())
                .unwrap_or_default();
            let annulus = annuli
                .map(|a| a.index(i).to_string())
                .unwrap_or_default();
            if self.dim == 1 {
                writeln!(w, "{i},{},{role},{layer},{annulus}", p[0])?;
            } else {
                writeln!(w, "{i},{},{},{role},{layer},{annulus}", p[0], p[1])?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn coords_1d(domain: &DiscreteDomain, role: Role) -> Vec<f64> {
        let mut v: Vec<f64> = (0..domain.len())
            .filter(|&i| domain.role(i) == role)
            .map(|i| domain.point(i)[0])
            .collect();
        v.sort_by(f64::total_cmp);
        v
    }

    #[test]
    fn unit_interval_lattice_roles() {
        let d = build_grid(Shape::Interval { a: 0.0, b: 1.0 }, 0.25, 0.3, 0.3).unwrap();
        assert_eq!(coords_1d(&d, Role::Interior), vec![0.25, 0.5, 0.75]);
        assert_eq!(coords_1d(&d, Role::Boundary), vec![-0.25, 0.0, 1.0, 1.25]);
    }

    #[test]
    fn unit_interval_strict_ball_neighbors() {
        let d = build_grid(Shape::Interval { a: 0.0, b: 1.0 }, 0.25, 0.3, 0.3).unwrap();
        let mid = (0..d.len()).find(|&i| d.point(i)[0] == 0.5).unwrap();
        let mut ns: Vec<f64> = d.neighbors(mid).iter().map(|&j| d.point(j as usize)[0]).collect();
        ns.sort_by(f64::total_cmp);
        assert_eq!(ns, vec![0.25, 0.5, 0.75]);
    }

    #[test]
    fn unit_disk_roles() {
        let d = build_grid(Shape::Disk { radius: 1.0 }, 0.5, 0.6, 0.6).unwrap();
        for want in [[0.0, 0.0], [0.5, 0.0], [0.0, 0.5], [-0.5, 0.0], [0.0, -0.5]] {
            assert!((0..d.len()).any(|i| d.point(i) == want && d.is_interior(i)));
        }
        for i in 0..d.len() {
            let p = d.point(i);
            if (p[0] * p[0] + p[1] * p[1]).sqrt() >= 1.0 {
                assert_eq!(d.role(i), Role::Boundary, "point {p:?}");
            }
        }
    }

    #[test]
    fn stored_neighbors_match_recomputation() {
        let d = build_grid(Shape::Disk { radius: 0.5 }, 0.1, 0.25, 0.25).unwrap();
        for i in 0..d.len() {
            assert_eq!(d.neighbors(i), d.recompute_neighbors(i).as_slice());
            if d.is_interior(i) {
                assert!(d.neighbors(i).contains(&(i as u32)), "self-membership at {i}");
            }
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(matches!(
            build_grid(Shape::Interval { a: 0.0, b: 1.0 }, 0.3, 0.25, 0.3),
            Err(Error::InvalidSpacing { .. })
        ));
        assert!(matches!(
            build_grid(Shape::Interval { a: 0.0, b: 1.0 }, 0.1, 0.25, 0.2),
            Err(Error::CollarTooNarrow { .. })
        ));
        assert!(matches!(
            build_grid(Shape::Interval { a: 0.0, b: 0.03 }, 0.04, 0.25, 0.25),
            Err(Error::EmptyInterior { .. })
        ));
    }

    #[test]
    fn chain_hops_on_fine_interval() {
        let d = build_grid(Shape::Interval { a: 0.0, b: 1.0 }, 0.05, 0.25, 0.25).unwrap();
        assert_eq!(d.validate_chain_reachability().unwrap(), 3);
    }

    #[test]
    fn single_interior_point_has_one_hop() {
        let d = DiscreteDomain::from_points(
            1,
            vec![[0.0, 0.0], [0.5, 0.0]],
            vec![Role::Boundary, Role::Interior],
            0.6,
            0.5,
            0.6,
            None,
        )
        .unwrap();
        assert_eq!(d.validate_chain_reachability().unwrap(), 1);
    }

    #[test]
    fn disconnected_island_is_rejected_with_witness() {
        let d = DiscreteDomain::from_points(
            1,
            vec![[0.0, 0.0], [0.5, 0.0], [10.0, 0.0]],
            vec![Role::Boundary, Role::Interior, Role::Interior],
            0.6,
            0.5,
            0.6,
            None,
        )
        .unwrap();
        match d.validate_chain_reachability() {
            Err(Error::UnreachableInterior { index }) => assert_eq!(index, 2),
            other => panic!("expected unreachable interior, got {other:?}"),
        }
    }

    #[test]
    fn hop_bound_from_diameter() {
        for (shape, h, eps) in [
            (Shape::Interval { a: 0.0, b: 1.0 }, 0.05, 0.25),
            (Shape::Disk { radius: 0.5 }, 0.05, 0.2),
        ] {
            let d = build_grid(shape, h, eps, eps).unwrap();
            let hops = d.validate_chain_reachability().unwrap();
            let bound = (d.diameter_with_collar() / eps).ceil() as usize + 1;
            assert!(hops <= bound, "{hops} > {bound}");
        }
    }

    #[test]
    fn nearest_point_resolves_ties_lexicographically() {
        let d = build_grid(Shape::Interval { a: 0.0, b: 1.0 }, 0.25, 0.3, 0.3).unwrap();
        // 0.375 is equidistant from 0.25 and 0.5.
        let idx = d.nearest_point([0.375, 0.0]);
        assert_eq!(d.point(idx)[0], 0.25);
        let idx = d.nearest_point([0.6, 0.0]);
        assert_eq!(d.point(idx)[0], 0.5);
    }

    #[test]
    fn boundary_extension_projects_collar_points() {
        let d = build_grid(Shape::Interval { a: 0.0, b: 1.0 }, 0.25, 0.3, 0.3).unwrap();
        let g = d.extend_boundary_values(|p| p[0]).unwrap();
        for i in 0..d.len() {
            match d.point(i)[0] {
                x if x <= 0.0 => assert_eq!(g[i], 0.0),
                x if x >= 1.0 => assert_eq!(g[i], 1.0),
                _ => assert_eq!(g[i], 0.0),
            }
        }
    }
}
