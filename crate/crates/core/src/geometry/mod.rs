//! Rasterized planar domains and their geometric functionals.
//!
//! A [`GridDomain`] is a uniform grid of nodes with spacing `h`; a node belongs to `Ω`
//! iff its center lies in the open set being rasterized. Every grid keeps a border of
//! at least one exterior node, so all stencils and distance computations can treat
//! "outside the mask" and "outside the grid" the same way.
//!
//! Geometric quantities follow the discrete Dirichlet problem: the homogeneous boundary
//! data sit on the exterior nodes, so distances (inradius, distance function) are
//! measured to the nearest exterior node.

mod circle;
mod edt;
pub mod io;
mod perimeter;

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use io::DomainSpec;

pub(crate) const NONE: u32 = u32::MAX;

/// Grid margin (in nodes) placed around the bounding box of every constructed shape.
const MARGIN: usize = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
}

/// A cell face between two horizontally or vertically adjacent nodes.
///
/// `lo`/`hi` are interior indices of the nodes on the negative/positive side, or
/// [`NONE`] for an exterior node. At least one side is interior.
#[derive(Clone, Copy, Debug)]
pub struct Face {
    pub lo: u32,
    pub hi: u32,
    pub axis: Axis,
}

impl Face {
    pub fn lo(&self) -> Option<usize> {
        (self.lo != NONE).then_some(self.lo as usize)
    }

    pub fn hi(&self) -> Option<usize> {
        (self.hi != NONE).then_some(self.hi as usize)
    }

    pub fn is_boundary(&self) -> bool {
        self.lo == NONE || self.hi == NONE
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeometricSummary {
    pub area: f64,
    pub perimeter: f64,
    pub inradius: f64,
    pub centroid: [f64; 2],
    pub circumradius: f64,
}

/// A rasterized bounded open set.
#[derive(Debug)]
pub struct GridDomain {
    h: f64,
    origin: [f64; 2],
    nx: usize,
    ny: usize,
    mask: Vec<bool>,
    convex: bool,
    // node (row-major, j * nx + i) -> interior index
    index: Vec<u32>,
    nodes: Vec<(u32, u32)>,
    // interior neighbours in the order -x, +x, -y, +y
    neighbors: Vec<[u32; 4]>,
    faces: Vec<Face>,
    // face indices in the order -x, +x, -y, +y
    node_faces: Vec<[u32; 4]>,
    summary: OnceLock<GeometricSummary>,
    distance: OnceLock<Vec<f64>>,
    depth: OnceLock<Vec<u32>>,
}

impl GridDomain {
    /// Builds a domain from an explicit node mask (`mask[j * nx + i]`, row `j` = `y` index).
    pub fn from_mask(
        h: f64,
        origin: [f64; 2],
        nx: usize,
        ny: usize,
        mask: Vec<bool>,
        convex: bool,
    ) -> Result<Self> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::Domain(format!(
                "grid spacing must be positive, got {h}"
            )));
        }
        if !origin.iter().all(|c| c.is_finite()) {
            return Err(Error::Domain("origin must be finite".into()));
        }
        if nx < 3 || ny < 3 {
            return Err(Error::Domain(format!("grid {nx}x{ny} is too small")));
        }
        if mask.len() != nx * ny {
            return Err(Error::Domain(format!(
                "mask has {} entries, expected {}",
                mask.len(),
                nx * ny
            )));
        }
        for i in 0..nx {
            if mask[i] || mask[(ny - 1) * nx + i] {
                return Err(Error::Domain("interior node on the grid border".into()));
            }
        }
        for j in 0..ny {
            if mask[j * nx] || mask[j * nx + nx - 1] {
                return Err(Error::Domain("interior node on the grid border".into()));
            }
        }

        let mut index = vec![NONE; nx * ny];
        let mut nodes = Vec::new();
        for j in 0..ny {
            for i in 0..nx {
                if mask[j * nx + i] {
                    index[j * nx + i] = nodes.len() as u32;
                    nodes.push((i as u32, j as u32));
                }
            }
        }
        if nodes.is_empty() {
            return Err(Error::Domain("no interior nodes".into()));
        }

        let neighbors = nodes
            .iter()
            .map(|&(i, j)| {
                let (i, j) = (i as usize, j as usize);
                [
                    index[j * nx + i - 1],
                    index[j * nx + i + 1],
                    index[(j - 1) * nx + i],
                    index[(j + 1) * nx + i],
                ]
            })
            .collect::<Vec<_>>();

        let mut faces = Vec::new();
        let mut node_faces = vec![[NONE; 4]; nodes.len()];
        for (k, &(i, j)) in nodes.iter().enumerate() {
            let (i, j) = (i as usize, j as usize);
            // -x face is owned by this node unless the left neighbour is interior.
            let left = index[j * nx + i - 1];
            if left == NONE {
                node_faces[k][0] = faces.len() as u32;
                faces.push(Face {
                    lo: NONE,
                    hi: k as u32,
                    axis: Axis::X,
                });
            }
            node_faces[k][1] = faces.len() as u32;
            let right = index[j * nx + i + 1];
            faces.push(Face {
                lo: k as u32,
                hi: right,
                axis: Axis::X,
            });
            if right != NONE {
                node_faces[right as usize][0] = node_faces[k][1];
            }

            let below = index[(j - 1) * nx + i];
            if below == NONE {
                node_faces[k][2] = faces.len() as u32;
                faces.push(Face {
                    lo: NONE,
                    hi: k as u32,
                    axis: Axis::Y,
                });
            }
            node_faces[k][3] = faces.len() as u32;
            let above = index[(j + 1) * nx + i];
            faces.push(Face {
                lo: k as u32,
                hi: above,
                axis: Axis::Y,
            });
            if above != NONE {
                node_faces[above as usize][2] = node_faces[k][3];
            }
        }
        debug_assert!(node_faces.iter().flatten().all(|&f| f != NONE));

        Ok(Self {
            h,
            origin,
            nx,
            ny,
            mask,
            convex,
            index,
            nodes,
            neighbors,
            faces,
            node_faces,
            summary: OnceLock::new(),
            distance: OnceLock::new(),
            depth: OnceLock::new(),
        })
    }

    /// Open rectangle `(0, width) × (0, height)`.
    pub fn rectangle(width: f64, height: f64, h: f64) -> Result<Self> {
        if !(width > 0.0 && height > 0.0 && h > 0.0) {
            return Err(Error::Domain(format!(
                "rectangle needs positive dimensions, got {width}x{height}, h = {h}"
            )));
        }
        check_resolution(width.min(height), h)?;
        let (origin, nx, ny) = layout([0.0, 0.0], [width, height], h);
        let eps = 1e-9 * h;
        let mask = raster(origin, nx, ny, h, |x, y| {
            x > eps && x < width - eps && y > eps && y < height - eps
        });
        Self::from_mask(h, origin, nx, ny, mask, true)
    }

    /// Open disk of the given radius centred at the origin.
    pub fn disk(radius: f64, h: f64) -> Result<Self> {
        if !(radius > 0.0 && h > 0.0) {
            return Err(Error::Domain(format!(
                "disk needs positive radius and spacing, got r = {radius}, h = {h}"
            )));
        }
        check_resolution(2.0 * radius, h)?;
        let (origin, nx, ny) = layout([-radius, -radius], [radius, radius], h);
        let r2 = radius * radius * (1.0 - 1e-12);
        let mask = raster(origin, nx, ny, h, |x, y| x * x + y * y < r2);
        Self::from_mask(h, origin, nx, ny, mask, true)
    }

    /// Interior of a simple polygon; the convexity flag is derived from the vertices.
    pub fn polygon(vertices: &[[f64; 2]], h: f64) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(Error::Domain(format!(
                "polygon needs at least 3 vertices, got {}",
                vertices.len()
            )));
        }
        if !(h > 0.0) {
            return Err(Error::Domain(format!(
                "grid spacing must be positive, got {h}"
            )));
        }
        if vertices.iter().flatten().any(|c| !c.is_finite()) {
            return Err(Error::Domain("polygon vertex is not finite".into()));
        }
        if polygon_area(vertices).abs() == 0.0 {
            return Err(Error::Domain("degenerate polygon".into()));
        }
        if self_intersects(vertices) {
            return Err(Error::Domain("polygon is self-intersecting".into()));
        }
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for v in vertices {
            for a in 0..2 {
                lo[a] = lo[a].min(v[a]);
                hi[a] = hi[a].max(v[a]);
            }
        }
        check_resolution((hi[0] - lo[0]).min(hi[1] - lo[1]), h)?;
        let (origin, nx, ny) = layout(lo, hi, h);
        let tol = 1e-9 * h;
        let mask = raster(origin, nx, ny, h, |x, y| {
            strictly_inside(vertices, [x, y], tol)
        });
        Self::from_mask(h, origin, nx, ny, mask, is_convex(vertices))
    }

    /// L-shaped hexagon `[0,2s]² \ [s,2s]²`.
    pub fn l_shape(side: f64, h: f64) -> Result<Self> {
        let s = side;
        Self::polygon(
            &[
                [0.0, 0.0],
                [2.0 * s, 0.0],
                [2.0 * s, s],
                [s, s],
                [s, 2.0 * s],
                [0.0, 2.0 * s],
            ],
            h,
        )
    }

    /// Same mask with the origin moved by a whole number of cells.
    pub fn translated(&self, cells: [i64; 2]) -> Result<Self> {
        let origin = [
            self.origin[0] + cells[0] as f64 * self.h,
            self.origin[1] + cells[1] as f64 * self.h,
        ];
        Self::from_mask(
            self.h,
            origin,
            self.nx,
            self.ny,
            self.mask.clone(),
            self.convex,
        )
    }

    /// New domain containing the interior nodes of `self` that satisfy `keep`.
    pub fn restricted(&self, keep: impl Fn(f64, f64) -> bool) -> Result<Self> {
        let mask = (0..self.nx * self.ny)
            .map(|k| {
                let (i, j) = (k % self.nx, k / self.nx);
                let [x, y] = self.node_position(i, j);
                self.mask[k] && keep(x, y)
            })
            .collect();
        Self::from_mask(self.h, self.origin, self.nx, self.ny, mask, false)
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn origin(&self) -> [f64; 2] {
        self.origin
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn is_convex(&self) -> bool {
        self.convex
    }

    /// Number of interior nodes.
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn contains_node(&self, i: usize, j: usize) -> bool {
        i < self.nx && j < self.ny && self.mask[j * self.nx + i]
    }

    pub fn interior_index(&self, i: usize, j: usize) -> Option<usize> {
        if i >= self.nx || j >= self.ny {
            return None;
        }
        let k = self.index[j * self.nx + i];
        (k != NONE).then_some(k as usize)
    }

    /// Grid coordinates `(i, j)` of interior node `k`.
    pub fn node(&self, k: usize) -> (usize, usize) {
        let (i, j) = self.nodes[k];
        (i as usize, j as usize)
    }

    pub fn node_position(&self, i: usize, j: usize) -> [f64; 2] {
        [
            self.origin[0] + i as f64 * self.h,
            self.origin[1] + j as f64 * self.h,
        ]
    }

    /// Physical position of interior node `k`.
    pub fn position(&self, k: usize) -> [f64; 2] {
        let (i, j) = self.node(k);
        self.node_position(i, j)
    }

    pub fn positions(&self) -> impl Iterator<Item = [f64; 2]> + '_ {
        (0..self.len()).map(|k| self.position(k))
    }

    /// Interior neighbours of node `k` in the order `-x, +x, -y, +y`.
    pub fn neighbors(&self, k: usize) -> [Option<usize>; 4] {
        self.neighbors[k].map(|n| (n != NONE).then_some(n as usize))
    }

    pub(crate) fn raw_neighbors(&self) -> &[[u32; 4]] {
        &self.neighbors
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    /// Face indices of node `k` in the order `-x, +x, -y, +y`.
    pub fn node_faces(&self, k: usize) -> [usize; 4] {
        self.node_faces[k].map(|f| f as usize)
    }

    /// Chebyshev distance, in cells, from every interior node to the nearest exterior
    /// node; `1` on the layer adjacent to the boundary.
    pub fn depth(&self) -> &[u32] {
        self.depth.get_or_init(|| {
            let (nx, ny) = (self.nx, self.ny);
            let mut depth = vec![u32::MAX; nx * ny];
            let mut queue = std::collections::VecDeque::new();
            for k in 0..nx * ny {
                if !self.mask[k] {
                    depth[k] = 0;
                    queue.push_back(k);
                }
            }
            while let Some(k) = queue.pop_front() {
                let (i, j) = ((k % nx) as i64, (k / nx) as i64);
                for dj in -1..=1 {
                    for di in -1..=1 {
                        let (ii, jj) = (i + di, j + dj);
                        if ii < 0 || jj < 0 || ii >= nx as i64 || jj >= ny as i64 {
                            continue;
                        }
                        let m = jj as usize * nx + ii as usize;
                        if depth[m] == u32::MAX {
                            depth[m] = depth[k] + 1;
                            queue.push_back(m);
                        }
                    }
                }
            }
            self.nodes
                .iter()
                .map(|&(i, j)| depth[j as usize * nx + i as usize])
                .collect()
        })
    }

    /// Euclidean distance from every interior node to the nearest exterior node.
    pub fn distance_field(&self) -> &[f64] {
        self.distance.get_or_init(|| {
            let sq = edt::squared_distance_to_exterior(&self.mask, self.nx, self.ny);
            self.nodes
                .iter()
                .map(|&(i, j)| (sq[j as usize * self.nx + i as usize] as f64).sqrt() * self.h)
                .collect()
        })
    }

    pub fn summary(&self) -> GeometricSummary {
        *self.summary.get_or_init(|| self.compute_summary())
    }

    fn compute_summary(&self) -> GeometricSummary {
        let h2 = self.h * self.h;
        let area = self.len() as f64 * h2;
        let perimeter = perimeter::marching_squares_length(&self.mask, self.nx, self.ny) * self.h;
        let inradius = self.distance_field().iter().copied().fold(0.0, f64::max);
        let mut c = [0.0; 2];
        for p in self.positions() {
            c[0] += p[0];
            c[1] += p[1];
        }
        let n = self.len() as f64;
        let centroid = [c[0] / n, c[1] / n];

        // Interior nodes together with the exterior nodes carrying the boundary data.
        let mut points = Vec::new();
        for (k, &(i, j)) in self.nodes.iter().enumerate() {
            let (i, j) = (i as usize, j as usize);
            let nb = self.neighbors[k];
            if nb.iter().all(|&n| n != NONE) {
                continue;
            }
            points.push(self.node_position(i, j));
            for (slot, (di, dj)) in [(-1i64, 0i64), (1, 0), (0, -1), (0, 1)].iter().enumerate() {
                if nb[slot] == NONE {
                    points.push(
                        self.node_position((i as i64 + di) as usize, (j as i64 + dj) as usize),
                    );
                }
            }
        }
        let circumradius = circle::min_enclosing_radius(&points);
        GeometricSummary {
            area,
            perimeter,
            inradius,
            centroid,
            circumradius,
        }
    }

    /// `Σ |x − x0|^p h²` over interior nodes.
    pub fn moment(&self, p: f64, x0: [f64; 2]) -> f64 {
        let h2 = self.h * self.h;
        self.positions()
            .map(|[x, y]| {
                let r = ((x - x0[0]).powi(2) + (y - x0[1]).powi(2)).sqrt();
                r.powf(p)
            })
            .sum::<f64>()
            * h2
    }

    /// Minimizes [`moment`](Self::moment) over the reference point by compass search
    /// started at the centroid.
    pub fn min_moment(&self, p: f64) -> Result<(f64, [f64; 2])> {
        if !(p >= 1.0 && p.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "moment exponent must be >= 1, got {p}"
            )));
        }
        let s = self.summary();
        let mut x = s.centroid;
        let mut best = self.moment(p, x);
        let mut step = 0.25 * s.circumradius.max(self.h);
        let min_step = 1e-4 * self.h;
        let mut trace = vec![x];
        let max_iter = 10_000;
        for _ in 0..max_iter {
            if step < min_step {
                return Ok((best, x));
            }
            let mut moved = false;
            for d in [[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]] {
                let cand = [x[0] + step * d[0], x[1] + step * d[1]];
                let val = self.moment(p, cand);
                if val < best {
                    best = val;
                    x = cand;
                    moved = true;
                    break;
                }
            }
            if moved {
                trace.push(x);
            } else {
                step *= 0.5;
            }
        }
        let tail: Vec<String> = trace
            .iter()
            .rev()
            .take(5)
            .map(|p| format!("({:.6}, {:.6})", p[0], p[1]))
            .collect();
        Err(Error::Stalled(format!(
            "min_moment(p = {p}) hit {max_iter} iterations; last iterates {}",
            tail.join(", ")
        )))
    }
}

fn check_resolution(extent: f64, h: f64) -> Result<()> {
    if h > extent / 8.0 {
        return Err(Error::Domain(format!(
            "grid spacing {h} too coarse for extent {extent} (need h <= extent/8)"
        )));
    }
    Ok(())
}

fn layout(lo: [f64; 2], hi: [f64; 2], h: f64) -> ([f64; 2], usize, usize) {
    let origin = [lo[0] - MARGIN as f64 * h, lo[1] - MARGIN as f64 * h];
    let count = |a: usize| ((hi[a] - lo[a]) / h - 1e-9).ceil() as usize + 1 + 2 * MARGIN;
    (origin, count(0), count(1))
}

fn raster(
    origin: [f64; 2],
    nx: usize,
    ny: usize,
    h: f64,
    inside: impl Fn(f64, f64) -> bool,
) -> Vec<bool> {
    let mut mask = vec![false; nx * ny];
    for j in 1..ny - 1 {
        for i in 1..nx - 1 {
            mask[j * nx + i] = inside(origin[0] + i as f64 * h, origin[1] + j as f64 * h);
        }
    }
    mask
}

fn polygon_area(v: &[[f64; 2]]) -> f64 {
    let n = v.len();
    (0..n)
        .map(|i| {
            let (a, b) = (v[i], v[(i + 1) % n]);
            a[0] * b[1] - a[1] * b[0]
        })
        .sum::<f64>()
        / 2.0
}

fn cross(o: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

fn is_convex(v: &[[f64; 2]]) -> bool {
    let n = v.len();
    let sign = polygon_area(v).signum();
    (0..n).all(|i| cross(v[i], v[(i + 1) % n], v[(i + 2) % n]) * sign >= 0.0)
}

fn segments_intersect(p1: [f64; 2], p2: [f64; 2], q1: [f64; 2], q2: [f64; 2]) -> bool {
    let d1 = cross(q1, q2, p1);
    let d2 = cross(q1, q2, p2);
    let d3 = cross(p1, p2, q1);
    let d4 = cross(p1, p2, q2);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    let on = |a: [f64; 2], b: [f64; 2], p: [f64; 2], d: f64| {
        d == 0.0
            && p[0] >= a[0].min(b[0])
            && p[0] <= a[0].max(b[0])
            && p[1] >= a[1].min(b[1])
            && p[1] <= a[1].max(b[1])
    };
    on(q1, q2, p1, d1) || on(q1, q2, p2, d2) || on(p1, p2, q1, d3) || on(p1, p2, q2, d4)
}

fn self_intersects(v: &[[f64; 2]]) -> bool {
    let n = v.len();
    for i in 0..n {
        for j in i + 1..n {
            // adjacent edges share a vertex
            if j == i + 1 || (i == 0 && j == n - 1) {
                continue;
            }
            if segments_intersect(v[i], v[(i + 1) % n], v[j], v[(j + 1) % n]) {
                return true;
            }
        }
    }
    false
}

fn distance_to_segment(p: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    let ab = [b[0] - a[0], b[1] - a[1]];
    let ap = [p[0] - a[0], p[1] - a[1]];
    let len2 = ab[0] * ab[0] + ab[1] * ab[1];
    let t = ((ap[0] * ab[0] + ap[1] * ab[1]) / len2).clamp(0.0, 1.0);
    let d = [ap[0] - t * ab[0], ap[1] - t * ab[1]];
    (d[0] * d[0] + d[1] * d[1]).sqrt()
}

fn strictly_inside(v: &[[f64; 2]], p: [f64; 2], tol: f64) -> bool {
    let n = v.len();
    let mut inside = false;
    for i in 0..n {
        let (a, b) = (v[i], v[(i + 1) % n]);
        if distance_to_segment(p, a, b) <= tol {
            return false;
        }
        if (a[1] > p[1]) != (b[1] > p[1]) {
            let x = a[0] + (p[1] - a[1]) / (b[1] - a[1]) * (b[0] - a[0]);
            if p[0] < x {
                inside = !inside;
            }
        }
    }
    inside
}
