//! One-dimensional meshes.
//!
//! Graded meshes use the map `x(s) = center + width * sinh(s)` with `s`
//! uniform, so the spacing grows like `sqrt(width^2 + (x - center)^2)` away
//! from the center. Neighbouring cells of such a mesh differ in length by at
//! most a factor `exp(ds)`; the width is widened when needed to keep that
//! factor below [`MAX_CELL_RATIO`].

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

pub const MIN_NODES: usize = 16;
pub const MAX_CELL_RATIO: f64 = 1.2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Grading {
    Uniform,
    Graded { center: f64, width: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    nodes: Vec<f64>,
    grading: Grading,
}

pub fn make_grid(a: f64, b: f64, n: usize, grading: Grading) -> Result<Grid> {
    if !(a.is_finite() && b.is_finite()) || a >= b {
        return invalid(format!("grid interval [{a}, {b}] is empty"));
    }
    if n < MIN_NODES {
        return invalid(format!("grid needs at least {MIN_NODES} nodes, got {n}"));
    }
    match grading {
        Grading::Uniform => {
            let nodes = mapped_nodes(a, b, n, |t| a + (b - a) * t);
            Ok(Grid { nodes, grading })
        }
        Grading::Graded { center, width } => {
            if !(a..=b).contains(&center) {
                return invalid(format!("grading center {center} outside [{a}, {b}]"));
            }
            if !(width > 0.0) {
                return invalid("grading width must be positive");
            }
            let width = admissible_width(a, b, n, center, width);
            let (sa, sb) = (((a - center) / width).asinh(), ((b - center) / width).asinh());
            let nodes = mapped_nodes(a, b, n, |t| center + width * (sa + (sb - sa) * t).sinh());
            Ok(Grid { nodes, grading: Grading::Graded { center, width } })
        }
    }
}

/// Smallest width >= `width` whose mesh keeps the adjacent-cell ratio bounded.
fn admissible_width(a: f64, b: f64, n: usize, center: f64, width: f64) -> f64 {
    let ds_max = MAX_CELL_RATIO.ln() * 0.999;
    let ds = |w: f64| (((b - center) / w).asinh() - ((a - center) / w).asinh()) / (n - 1) as f64;
    if ds(width) <= ds_max {
        return width;
    }
    // ds decreases monotonically in w; for w >> b - a the map is nearly affine.
    let (mut lo, mut hi) = (width, width);
    while ds(hi) > ds_max {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if ds(mid) > ds_max {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

/// Nodes `map(k / (n-1))`, mirrored exactly when the map is symmetric about
/// the midpoint of `[a, b]` so that `x_k + x_{n-1-k} == a + b` holds bitwise.
fn mapped_nodes(a: f64, b: f64, n: usize, map: impl Fn(f64) -> f64) -> Vec<f64> {
    let mut nodes: Vec<f64> = (0..n).map(|k| map(k as f64 / (n - 1) as f64)).collect();
    nodes[0] = a;
    nodes[n - 1] = b;
    let mid = 0.5 * (a + b);
    let symmetric = (map(0.25) - mid + (map(0.75) - mid)).abs() <= 1e-12 * (b - a);
    if symmetric {
        for k in 0..n / 2 {
            nodes[n - 1 - k] = 2.0 * mid - nodes[k];
        }
        if n % 2 == 1 {
            nodes[n / 2] = mid;
        }
    }
    nodes
}

impl Grid {
    /// Wraps nodes produced by an affine image of an existing grid.
    pub(crate) fn from_mapped_nodes(nodes: Vec<f64>, grading: Grading) -> Grid {
        debug_assert!(nodes.windows(2).all(|w| w[0] < w[1]));
        Grid { nodes, grading }
    }

    /// Wraps tabulated nodes, e.g. read from a file. The grading is recorded
    /// as uniform, so [`Grid::refined`] of the result is a uniform mesh.
    pub fn from_nodes(nodes: Vec<f64>) -> Result<Grid> {
        if nodes.len() < MIN_NODES {
            return invalid(format!("grid needs at least {MIN_NODES} nodes, got {}", nodes.len()));
        }
        if nodes.iter().any(|x| !x.is_finite()) || nodes.windows(2).any(|w| w[1] <= w[0]) {
            return invalid("grid nodes must be finite and strictly increasing");
        }
        Ok(Grid { nodes, grading: Grading::Uniform })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn grading(&self) -> Grading {
        self.grading
    }

    pub fn start(&self) -> f64 {
        self.nodes[0]
    }

    pub fn end(&self) -> f64 {
        self.nodes[self.nodes.len() - 1]
    }

    /// Length of cell `[x_k, x_{k+1}]`.
    pub fn spacing(&self, k: usize) -> f64 {
        self.nodes[k + 1] - self.nodes[k]
    }

    pub fn min_spacing(&self) -> f64 {
        self.nodes.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min)
    }

    pub fn max_cell_ratio(&self) -> f64 {
        self.nodes
            .windows(3)
            .map(|w| {
                let (h0, h1) = (w[1] - w[0], w[2] - w[1]);
                (h1 / h0).max(h0 / h1)
            })
            .fold(1.0, f64::max)
    }

    /// Control-volume length attached to node `k` (half cells at the ends).
    pub fn node_weight(&self, k: usize) -> f64 {
        let n = self.nodes.len();
        let left = if k > 0 { self.spacing(k - 1) } else { 0.0 };
        let right = if k + 1 < n { self.spacing(k) } else { 0.0 };
        0.5 * (left + right)
    }

    /// Mesh with `2n - 1` nodes under the same map; node `k` of `self` is
    /// node `2k` of the result.
    pub fn refined(&self) -> Grid {
        make_grid(self.start(), self.end(), 2 * self.len() - 1, self.grading)
            .expect("refinement of a valid grid is valid")
    }

    /// Index `k` with `x_k <= x < x_{k+1}`, clamped to the valid cells.
    pub fn locate(&self, x: f64) -> usize {
        let n = self.nodes.len();
        match self.nodes.partition_point(|&node| node <= x) {
            0 => 0,
            p if p >= n => n - 2,
            p => p - 1,
        }
    }

    /// Index of the node closest to `x`.
    pub fn nearest(&self, x: f64) -> usize {
        let k = self.locate(x);
        if (x - self.nodes[k]).abs() <= (self.nodes[k + 1] - x).abs() {
            k
        } else {
            k + 1
        }
    }
}
