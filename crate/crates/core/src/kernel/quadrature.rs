//! Graded tensor-product Gauss–Legendre quadrature around a point singularity at the
//! origin and a line-type weight singularity on `u_n = 0`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Nodes and weights on `[-1, 1]` by Newton iteration on `P_p`.
pub(crate) fn gauss_legendre(p: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; p];
    let mut weights = vec![0.0; p];
    for i in 0..p.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (p as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            // three-term recurrence for P_p(x) and P_{p-1}(x)
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=p {
                let k = k as f64;
                let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            let (pp, pm) = if p == 1 { (x, 1.0) } else { (p1, p0) };
            dp = p as f64 * (x * pp - pm) / (x * x - 1.0);
            let step = pp / dp;
            x -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[p - 1 - i] = x;
        weights[i] = w;
        weights[p - 1 - i] = w;
    }
    (nodes, weights)
}

/// Mesh controls. Level `L` uses `base_layers + L * layers_per_level` geometric layers
/// toward each singular hyperplane and `base_order + L * order_per_level` Gauss points
/// per axis and cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadratureControls {
    /// Refinement level used for the reported value; the estimate compares with level - 1.
    pub refinement: u32,
    /// Radius of the geometrically graded zone around each singular hyperplane.
    pub split_radius: f64,
    /// Ratio between consecutive graded layers.
    pub grading: f64,
    pub base_layers: u32,
    pub layers_per_level: u32,
    pub base_order: u32,
    pub order_per_level: u32,
    /// Largest cell edge outside the graded zone at level 0; halves with each level.
    pub bulk_size: f64,
    /// Relative error-estimate threshold for [`super::kernel_eval`].
    pub tolerance: f64,
}

impl Default for QuadratureControls {
    fn default() -> Self {
        QuadratureControls {
            refinement: 3,
            split_radius: 0.5,
            grading: 0.25,
            base_layers: 4,
            layers_per_level: 2,
            base_order: 6,
            order_per_level: 2,
            bulk_size: 0.5,
            tolerance: 1e-6,
        }
    }
}

/// Tensor mesh; `cells` lists per-axis interval indices in a fixed order.
pub(crate) struct Mesh {
    axes: Vec<Vec<f64>>,
    order: usize,
}

/// Breakpoints of `[lo, hi]` (which must contain 0), graded toward 0 on both sides.
fn axis_breaks(lo: f64, hi: f64, c: &QuadratureControls, level: u32) -> Vec<f64> {
    let layers = c.base_layers + level * c.layers_per_level;
    let bulk = c.bulk_size / f64::from(1u32 << level.min(20));
    let side = |s: f64| -> Vec<f64> {
        if s <= 0.0 {
            return Vec::new();
        }
        let d = c.split_radius.min(s);
        let mut pts: Vec<f64> = (0..=layers).rev().map(|k| d * c.grading.powi(k as i32)).collect();
        let pieces = ((s - d) / bulk).ceil() as usize;
        pts.extend((1..pieces).map(|i| d + (s - d) * i as f64 / pieces as f64));
        if pieces > 0 {
            pts.push(s);
        }
        pts
    };
    let mut out: Vec<f64> = side(-lo).into_iter().rev().map(|x| -x).collect();
    out.push(0.0);
    out.extend(side(hi));
    out
}

impl Mesh {
    /// Mesh of the box `Π [lo_k, hi_k]` extended to contain the origin.
    pub(crate) fn new(lo: &[f64], hi: &[f64], c: &QuadratureControls, level: u32) -> Mesh {
        let axes = lo.iter().zip(hi).map(|(&a, &b)| axis_breaks(a.min(0.0), b.max(0.0), c, level)).collect();
        Mesh { axes, order: (c.base_order + level * c.order_per_level) as usize }
    }

    pub(crate) fn num_cells(&self) -> usize {
        self.axes.iter().map(|a| a.len() - 1).product()
    }

    fn cell_index(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.axes.len()];
        for (k, axis) in self.axes.iter().enumerate().rev() {
            let m = axis.len() - 1;
            idx[k] = flat % m;
            flat /= m;
        }
        idx
    }

    /// Integrates `m` functionals at once: `g(u, out)` adds the integrand values at `u`
    /// into `out`. Cells are summed in index order, so the result does not depend on
    /// thread scheduling. `skip` lets the caller drop cells known to give zero.
    pub(crate) fn integrate<G, S>(&self, m: usize, g: G, skip: S) -> Vec<f64>
    where
        G: Fn(&[f64], &mut [f64]) + Sync,
        S: Fn(&[f64], &[f64]) -> bool + Sync,
    {
        let (nodes, weights) = gauss_legendre(self.order);
        let dim = self.axes.len();
        let p = self.order;
        let per_cell: Vec<Vec<f64>> = (0..self.num_cells())
            .into_par_iter()
            .map(|flat| {
                let idx = self.cell_index(flat);
                let lo: Vec<f64> = (0..dim).map(|k| self.axes[k][idx[k]]).collect();
                let hi: Vec<f64> = (0..dim).map(|k| self.axes[k][idx[k] + 1]).collect();
                let mut acc = vec![0.0; m];
                if skip(&lo, &hi) {
                    return acc;
                }
                let half: Vec<f64> = (0..dim).map(|k| 0.5 * (hi[k] - lo[k])).collect();
                let mid: Vec<f64> = (0..dim).map(|k| 0.5 * (hi[k] + lo[k])).collect();
                let jac: f64 = half.iter().product();
                let mut u = vec![0.0; dim];
                let mut vals = vec![0.0; m];
                let mut counter = vec![0usize; dim];
                loop {
                    let mut w = jac;
                    for k in 0..dim {
                        u[k] = mid[k] + half[k] * nodes[counter[k]];
                        w *= weights[counter[k]];
                    }
                    vals.iter_mut().for_each(|v| *v = 0.0);
                    g(&u, &mut vals);
                    for (a, v) in acc.iter_mut().zip(&vals) {
                        *a += w * v;
                    }
                    let mut k = dim;
                    loop {
                        if k == 0 {
                            return acc;
                        }
                        k -= 1;
                        counter[k] += 1;
                        if counter[k] < p {
                            break;
                        }
                        counter[k] = 0;
                    }
                }
            })
            .collect();
        per_cell.iter().fold(vec![0.0; m], |mut tot, c| {
            tot.iter_mut().zip(c).for_each(|(t, x)| *t += x);
            tot
        })
    }
}
