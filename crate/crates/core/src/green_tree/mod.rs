//! Green's functions of trees, weighted extensions of finite balls, and
//! the scalar recursions for truncated trees.

mod local_law;

use std::collections::{hash_map::Entry, HashMap, VecDeque};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Ball;
use crate::laws::{m_d_unchecked, m_sc_unchecked};

pub use local_law::{local_law_grid, local_law_report, LocalLawConfig, LocalLawReport, ALL_PAIRS_UP_TO, SAMPLED_PAIRS};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TreeKind {
    /// The infinite d-regular tree.
    Regular,
    /// The infinite (d-1)-ary tree: every vertex has d-1 children, so the
    /// root has degree d-1.
    Ary,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TreeGreenQuery {
    pub d: usize,
    pub z: Complex64,
    pub kind: TreeKind,
    pub dist: usize,
    /// Depth of the closest common ancestor (needed for `Ary`).
    pub anc: Option<usize>,
}

/// Closed-form tree Green's function entry.
///
/// Regular tree: `m_d (-m_sc / sqrt(d-1))^dist`. Ary tree:
/// `m_d (1 - (-m_sc / sqrt(d-1))^{2 anc + 2}) (-m_sc / sqrt(d-1))^dist`.
pub fn tree_green(q: &TreeGreenQuery) -> Result<Complex64> {
    if q.d < 3 {
        return Err(Error::BadParams(format!("degree must be >= 3, got {}", q.d)));
    }
    if !(q.z.im > 0.0) {
        return Err(Error::BadParams(format!(
            "tree Green's function needs Im z > 0, got {}",
            q.z
        )));
    }
    let ms = m_sc_unchecked(q.z);
    let md = m_d_unchecked(q.d, q.z);
    let r = -ms / ((q.d - 1) as f64).sqrt();
    let decay = r.powu(q.dist as u32);
    match q.kind {
        TreeKind::Regular => Ok(md * decay),
        TreeKind::Ary => {
            let anc = q.anc.ok_or(Error::MissingAnc)?;
            Ok(md * (1.0 - r.powu(2 * anc as u32 + 2)) * decay)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightConvention {
    /// `-Delta` on the vertices at maximal distance from the centers only.
    BoundaryOnly,
    /// `-(d - deg_i) Delta / (d - 1)` on every vertex.
    DegreeDeficit,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtensionWeightSpec {
    pub delta: Complex64,
    pub convention: WeightConvention,
    /// Spectral parameter `w`.
    pub w: Complex64,
}

/// `(A/sqrt(d-1) - w - weights)^{-1}` on a ball, with some vertices removed.
#[derive(Clone, Debug)]
pub struct PMatrix {
    /// Original ids of the rows.
    pub vertices: Vec<usize>,
    pub p: DMatrix<Complex64>,
}

impl PMatrix {
    pub fn entry(&self, i: usize, j: usize) -> Option<Complex64> {
        let a = self.vertices.binary_search(&i).ok()?;
        let b = self.vertices.binary_search(&j).ok()?;
        Some(self.p[(a, b)])
    }
}

/// Distances inside the ball from its centers.
fn depths(ball: &Ball) -> HashMap<usize, usize> {
    let mut adj: HashMap<usize, Vec<usize>> = HashMap::new();
    for &(u, v) in &ball.edges {
        adj.entry(u).or_default().push(v);
        adj.entry(v).or_default().push(u);
    }
    let mut dist = HashMap::new();
    let mut queue = VecDeque::new();
    for &c in &ball.centers {
        if ball.contains(c) && !dist.contains_key(&c) {
            dist.insert(c, 0);
            queue.push_back(c);
        }
    }
    while let Some(x) = queue.pop_front() {
        let dx = dist[&x];
        for &y in adj.get(&x).map(|v| v.as_slice()).unwrap_or(&[]) {
            if let Entry::Vacant(e) = dist.entry(y) {
                e.insert(dx + 1);
                queue.push_back(y);
            }
        }
    }
    dist
}

/// Weighted extension `P(T, w, Delta)` of a ball.
pub fn p_extension(ball: &Ball, d: usize, spec: &ExtensionWeightSpec, removed: &[usize]) -> Result<PMatrix> {
    if d < 3 {
        return Err(Error::BadParams(format!("degree must be >= 3, got {d}")));
    }
    let vertices: Vec<usize> = ball.vertices.iter().copied().filter(|v| !removed.contains(v)).collect();
    let m = vertices.len();
    if m == 0 {
        return Err(Error::Empty);
    }
    let pos = |v: usize| vertices.binary_search(&v).ok();
    let degrees = ball.inner_degrees();
    let depth = match spec.convention {
        WeightConvention::BoundaryOnly => {
            if ball.centers.is_empty() {
                return Err(Error::BadParams("boundary-only weights need ball centers".into()));
            }
            depths(ball)
        }
        WeightConvention::DegreeDeficit => HashMap::new(),
    };
    let s = 1.0 / ((d - 1) as f64).sqrt();
    let mut a = DMatrix::<Complex64>::zeros(m, m);
    for (k, &v) in ball.vertices.iter().enumerate() {
        let Some(r) = pos(v) else { continue };
        let weight = match spec.convention {
            WeightConvention::DegreeDeficit => spec.delta * (d as f64 - degrees[k] as f64) / (d - 1) as f64,
            WeightConvention::BoundaryOnly => {
                if depth.get(&v) == Some(&ball.radius) {
                    spec.delta
                } else {
                    Complex64::new(0.0, 0.0)
                }
            }
        };
        a[(r, r)] = -spec.w - weight;
    }
    for &(u, v) in &ball.edges {
        if let (Some(i), Some(j)) = (pos(u), pos(v)) {
            a[(i, j)] = Complex64::new(s, 0.0);
            a[(j, i)] = Complex64::new(s, 0.0);
        }
    }
    let p = a.lu().try_inverse().ok_or(Error::SingularSystem)?;
    Ok(PMatrix { vertices, p })
}

/// Forward-mode value with derivatives in `Delta` and `w`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Dual {
    pub value: Complex64,
    pub d_delta: Complex64,
    pub d_w: Complex64,
}

/// `1 / (-w - b)` and its derivatives given those of `b`.
fn step(w: Complex64, b: Dual) -> Dual {
    let f = 1.0 / (-w - b.value);
    let f2 = f * f;
    Dual {
        value: f,
        d_delta: f2 * b.d_delta,
        d_w: f2 * (1.0 + b.d_w),
    }
}

fn leaf(delta: Complex64) -> Dual {
    Dual {
        value: delta,
        d_delta: Complex64::new(1.0, 0.0),
        d_w: Complex64::new(0.0, 0.0),
    }
}

/// `a_1` of the recursion as a dual number (`ell >= 1`).
fn a_one(ell: usize, delta: Complex64, w: Complex64) -> Dual {
    let mut a = step(w, leaf(delta));
    for _ in 1..ell {
        a = step(w, a);
    }
    a
}

/// `Y_ell` with derivatives.
pub fn y_ell_dual(ell: usize, delta: Complex64, w: Complex64) -> Dual {
    if ell == 0 {
        return step(w, leaf(delta));
    }
    step(w, a_one(ell, delta, w))
}

/// `Y_ell(Delta, w)`: root entry of the truncated (d-1)-ary tree of depth
/// `ell` with weight `-Delta` on the leaves and none on the root.
pub fn y_ell(_d: usize, ell: usize, delta: Complex64, w: Complex64) -> Complex64 {
    y_ell_dual(ell, delta, w).value
}

/// `X_ell` with derivatives.
pub fn x_ell_dual(d: usize, ell: usize, delta: Complex64, w: Complex64) -> Dual {
    let c = d as f64 / (d - 1) as f64;
    let inner = if ell == 0 { leaf(delta) } else { a_one(ell, delta, w) };
    let scaled = Dual {
        value: c * inner.value,
        d_delta: c * inner.d_delta,
        d_w: c * inner.d_w,
    };
    step(w, scaled)
}

/// `X_ell(Delta, w)`: root entry of the radius-`ell` ball in the d-regular
/// tree with degree-deficit weights.
pub fn x_ell(d: usize, ell: usize, delta: Complex64, w: Complex64) -> Complex64 {
    x_ell_dual(d, ell, delta, w).value
}

/// Quadratic coefficient of `Y_ell` in `Delta - m_sc`, in its displayed
/// form `m^{2l+2} m_d ((1 - m^{2l+2})/(d-1) + (d-2)/(d-1) (1 - m^{2l+2})/(1 - m^2))`.
pub fn y_quadratic_coefficient(d: usize, ell: usize, z: Complex64) -> Complex64 {
    let m = m_sc_unchecked(z);
    let md = m_d_unchecked(d, z);
    let p = m.powu(2 * ell as u32 + 2);
    let df = (d - 1) as f64;
    p * md * ((1.0 - p) / df + (d as f64 - 2.0) / df * (1.0 - p) / (1.0 - m * m))
}

/// `m^2 + m^4 + ... + m^{2l+2}`.
pub fn y_w_coefficient(ell: usize, z: Complex64) -> Complex64 {
    let m2 = m_sc_unchecked(z).powu(2);
    (1..=ell + 1).map(|k| m2.powu(k as u32)).sum()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpansionReport {
    pub d: usize,
    pub ell: usize,
    pub z: Complex64,
    /// Central-difference estimate of `dY/dDelta` at `(m_sc, z)`.
    pub linear_fd: Complex64,
    /// `m_sc^{2l+2}`.
    pub linear_expected: Complex64,
    pub linear_rel_err: f64,
    pub w_linear_fd: Complex64,
    pub w_linear_expected: Complex64,
    pub w_linear_rel_err: f64,
    /// Residuals after subtracting the linear and quadratic `Delta` terms,
    /// one per `Delta` offset (with `w = z`).
    pub delta_residuals: Vec<f64>,
    /// Residuals after subtracting the linear `w` term, one per `w`
    /// offset (with `Delta = m_sc`); these are second order.
    pub w_residuals: Vec<f64>,
    /// `|dY/dDelta|`, `|dY/dw|` at `(m_sc, z)` by forward mode.
    pub d_delta: f64,
    pub d_w: f64,
    /// Residual at `Delta = m_sc`, `w = z`.
    pub fixed_point_residual: f64,
}

/// Numerical check of the expansion of `Y_ell` around `(m_sc(z), z)`.
/// Offsets are complex increments; each must satisfy `ell^2 |offset| < 1`.
pub fn expansion_check(
    d: usize,
    ell: usize,
    z: Complex64,
    delta_offsets: &[Complex64],
    w_offsets: &[Complex64],
) -> Result<ExpansionReport> {
    if !(z.im > 0.0) {
        return Err(Error::BadParams(format!("expansion needs Im z > 0, got {z}")));
    }
    let l2 = (ell.max(1) * ell.max(1)) as f64;
    for o in delta_offsets.iter().chain(w_offsets) {
        if l2 * o.norm() >= 1.0 {
            return Err(Error::OffsetsTooLarge(format!("ell^2 |{o}| >= 1 at ell = {ell}")));
        }
    }
    let m = m_sc_unchecked(z);
    let y = |delta: Complex64, w: Complex64| y_ell(d, ell, delta, w);
    let lin = m.powu(2 * ell as u32 + 2);
    let quad = y_quadratic_coefficient(d, ell, z);
    let wlin = y_w_coefficient(ell, z);
    let h = 1e-5;
    let linear_fd = (y(m + h, z) - y(m - h, z)) / (2.0 * h);
    let w_linear_fd = (y(m, z + h) - y(m, z - h)) / (2.0 * h);
    let delta_residuals = delta_offsets
        .iter()
        .map(|&e| (y(m + e, z) - m - lin * e - quad * e * e).norm())
        .collect();
    let w_residuals = w_offsets.iter().map(|&e| (y(m, z + e) - m - wlin * e).norm()).collect();
    let dual = y_ell_dual(ell, m, z);
    Ok(ExpansionReport {
        d,
        ell,
        z,
        linear_fd,
        linear_expected: lin,
        linear_rel_err: (linear_fd - lin).norm() / lin.norm(),
        w_linear_fd,
        w_linear_expected: wlin,
        w_linear_rel_err: (w_linear_fd - wlin).norm() / wlin.norm(),
        delta_residuals,
        w_residuals,
        d_delta: dual.d_delta.norm(),
        d_w: dual.d_w.norm(),
        fixed_point_residual: (y(m, z) - m).norm(),
    })
}

/// Truncated trees used as matrix oracles.
pub mod trees {
    use crate::graph::Ball;

    /// The (d-1)-ary tree of depth `ell` rooted at 0, as a ball centered
    /// at the root, plus the depth of every vertex.
    pub fn ary_tree(d: usize, ell: usize) -> (Ball, Vec<usize>) {
        build(d, ell, d - 1)
    }

    /// The radius-`ell` ball of the d-regular tree rooted at 0.
    pub fn regular_tree(d: usize, ell: usize) -> (Ball, Vec<usize>) {
        build(d, ell, d)
    }

    fn build(d: usize, ell: usize, root_children: usize) -> (Ball, Vec<usize>) {
        let mut depth = vec![0usize];
        let mut edges = Vec::new();
        let mut frontier = vec![0usize];
        for level in 1..=ell {
            let mut next = Vec::new();
            for &p in &frontier {
                let kids = if p == 0 { root_children } else { d - 1 };
                for _ in 0..kids {
                    let v = depth.len();
                    depth.push(level);
                    edges.push((p, v));
                    next.push(v);
                }
            }
            frontier = next;
        }
        let n = depth.len();
        let mut ball = Ball::from_parts((0..n).collect(), edges);
        ball.centers = vec![0];
        ball.radius = ell;
        (ball, depth)
    }
}

#[cfg(test)]
mod tests;
