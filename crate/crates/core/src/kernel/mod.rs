//! Numerical evaluation of the integral symmetry breaking operator
//!
//! ```text
//! (A_{λ,ν} f)(y) = ∫_{R^n} |x_n|^{λ+ν-n} (|x'-y|² + x_n²)^{-ν} f(x', x_n) dx' dx_n
//! ```
//!
//! in the range `λ > ν`, `λ + ν > n - 1` where the integral converges for compactly
//! supported `f`. The integral is taken in the shifted variable `u = (x' - y, x_n)`, so
//! the kernel singularity sits at the origin and the quadrature nodes do not move with
//! `y`; the mesh is graded toward `u = 0` and toward `u_n = 0`.

mod bump;
mod quadrature;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use bump::{vector_field, BumpSpec, TestFunction};
pub use quadrature::QuadratureControls;

use crate::conformal::{subalgebra_basis, ConfGenerator};
use crate::error::{Error, Result};
use crate::rational::Rational;
use bump::{CompiledPoly, CompiledTestFunction};
use quadrature::Mesh;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelConfig {
    pub n: usize,
    pub lambda: f64,
    pub nu: f64,
    #[serde(default)]
    pub quadrature: QuadratureControls,
}

impl KernelConfig {
    pub fn new(n: usize, lambda: f64, nu: f64) -> Self {
        KernelConfig { n, lambda, nu, quadrature: QuadratureControls::default() }
    }

    /// The integrability conditions `λ > ν` and `λ + ν > n - 1`.
    pub fn check(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::DimensionTooSmall(self.n));
        }
        let (l, v) = (self.lambda, self.nu);
        if !l.is_finite() || !v.is_finite() {
            return Err(Error::InvalidArgument("lambda and nu must be finite".into()));
        }
        if l <= v {
            return Err(Error::Divergent(format!("need lambda > nu, got lambda = {l}, nu = {v}")));
        }
        if l + v <= self.n as f64 - 1.0 {
            return Err(Error::Divergent(format!("need lambda + nu > n - 1 = {}, got {}", self.n - 1, l + v)));
        }
        let q = &self.quadrature;
        if !(q.grading > 0.0 && q.grading < 1.0) || q.split_radius <= 0.0 || q.bulk_size <= 0.0 || q.base_order == 0 {
            return Err(Error::InvalidArgument("quadrature controls out of range".into()));
        }
        Ok(())
    }

    fn weight(&self, u: &[f64]) -> f64 {
        let n = u.len();
        let r2: f64 = u.iter().map(|x| x * x).sum();
        u[n - 1].abs().powf(self.lambda + self.nu - n as f64) * r2.powf(-self.nu)
    }
}

/// Result of one kernel evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KernelValue {
    pub value: f64,
    /// `|Q_L - Q_{L-1}|` for refinement level `L`.
    pub error_estimate: f64,
    pub cells: usize,
}

fn check_point(cfg: &KernelConfig, y: &[f64]) -> Result<()> {
    if y.len() + 1 != cfg.n {
        return Err(Error::InvalidArgument(format!("y has {} coordinates, expected {}", y.len(), cfg.n - 1)));
    }
    Ok(())
}

/// Integrates `(A f_i)(y_i)` for every task `(f_i, y_i)` on one shared mesh.
fn integrate_tasks(cfg: &KernelConfig, tasks: &[(&CompiledTestFunction, Vec<f64>)], support: &(Vec<f64>, f64), level: u32) -> (Vec<f64>, usize) {
    let n = cfg.n;
    let (c, r) = support;
    let mut lo: Vec<f64> = vec![f64::INFINITY; n];
    let mut hi: Vec<f64> = vec![f64::NEG_INFINITY; n];
    for (_, y) in tasks {
        for k in 0..n {
            let shift = if k + 1 < n { y[k] } else { 0.0 };
            lo[k] = lo[k].min(c[k] - r - shift);
            hi[k] = hi[k].max(c[k] + r - shift);
        }
    }
    let mesh = Mesh::new(&lo, &hi, &cfg.quadrature, level);
    let values = mesh.integrate(
        tasks.len(),
        |u, out| {
            let w = cfg.weight(u);
            let mut x = u.to_vec();
            for (o, (f, y)) in out.iter_mut().zip(tasks) {
                for k in 0..n - 1 {
                    x[k] = u[k] + y[k];
                }
                *o = w * f.eval(&x);
            }
        },
        |a, b| {
            // skip cells that miss every shifted support ball
            tasks.iter().all(|(_, y)| {
                let d2: f64 = (0..n)
                    .map(|k| {
                        let ck = c[k] - if k + 1 < n { y[k] } else { 0.0 };
                        let gap = (a[k] - ck).max(ck - b[k]).max(0.0);
                        gap * gap
                    })
                    .sum();
                d2 >= r * r
            })
        },
    );
    (values, mesh.num_cells())
}

/// Quadrature values `Q_0, ..., Q_levels` of `(A f)(y)`.
pub fn refinement_sequence(cfg: &KernelConfig, f: &TestFunction, y: &[f64], levels: u32) -> Result<Vec<f64>> {
    cfg.check()?;
    check_point(cfg, y)?;
    let compiled = f.compile();
    let support = f.support();
    Ok((0..=levels).map(|l| integrate_tasks(cfg, &[(&compiled, y.to_vec())], &support, l).0[0]).collect())
}

/// `(A_{λ,ν} f)(y)` at refinement level `cfg.quadrature.refinement`.
pub fn kernel_eval(cfg: &KernelConfig, f: &TestFunction, y: &[f64]) -> Result<KernelValue> {
    cfg.check()?;
    check_point(cfg, y)?;
    if f.dim() != cfg.n {
        return Err(Error::InvalidArgument(format!("test function lives on R^{}, expected R^{}", f.dim(), cfg.n)));
    }
    let level = cfg.quadrature.refinement.max(1);
    let compiled = f.compile();
    let support = f.support();
    let (fine, cells) = integrate_tasks(cfg, &[(&compiled, y.to_vec())], &support, level);
    let (coarse, _) = integrate_tasks(cfg, &[(&compiled, y.to_vec())], &support, level - 1);
    let value = fine[0];
    let error_estimate = (fine[0] - coarse[0]).abs();
    let threshold = cfg.quadrature.tolerance * value.abs();
    if error_estimate > threshold && error_estimate > f64::MIN_POSITIVE {
        return Err(Error::NoConvergence { estimate: error_estimate, threshold });
    }
    Ok(KernelValue { value, error_estimate, cells })
}

/// Factors `1/(Γ(a)Γ(b))` and `1/Γ(a)` with `a = (λ+ν-n+1)/2`, `b = (λ-ν)/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Normalization {
    pub tilde_factor: f64,
    pub renorm_factor: f64,
}

/// `1/Γ(x)`, exactly zero at the poles `x ∈ {0, -1, -2, ...}`.
pub fn rgamma(x: f64) -> f64 {
    if x <= 0.0 && x == x.round() {
        0.0
    } else {
        1.0 / statrs::function::gamma::gamma(x)
    }
}

pub fn normalization(lambda: f64, nu: f64, n: usize) -> Normalization {
    let a = rgamma((lambda + nu - n as f64 + 1.0) / 2.0);
    let b = rgamma((lambda - nu) / 2.0);
    Normalization { tilde_factor: a * b, renorm_factor: a }
}

/// Same as [`normalization`], with poles decided exactly.
pub fn normalization_exact(lambda: &Rational, nu: &Rational, n: usize) -> Normalization {
    let half = Rational::new(1, 2);
    let a = &(&(lambda + nu) - &Rational::from_int(n as i64 - 1)) * &half;
    let b = &(lambda - nu) * &half;
    let rg = |x: &Rational| if x.is_integer() && *x <= 0 { 0.0 } else { rgamma(x.to_f64()) };
    let (ra, rb) = (rg(&a), rg(&b));
    Normalization { tilde_factor: ra * rb, renorm_factor: ra }
}

/// Sample points for the equivariance check: the origin and `±0.2`, `±0.4` along each axis.
pub fn sample_points(dim: usize) -> Vec<Vec<f64>> {
    let mut out = vec![vec![0.0; dim]];
    for k in 0..dim {
        for s in [-0.4, -0.2, 0.2, 0.4] {
            let mut y = vec![0.0; dim];
            y[k] = s;
            out.push(y);
        }
    }
    out
}

/// Finite-difference step on the `y`-grid.
pub const FD_STEP: f64 = 1e-2;

/// Relative residuals `max_y |A(dπ_λ(X) f) - dπ'_ν(X)(A f)| / max_y |A f|` for each `X`.
///
/// `dπ_λ(X) f` is exact; `dπ'_ν(X)` acts on `A f` through five-point differences.
pub fn numeric_equivariance_many(cfg: &KernelConfig, xs: &[ConfGenerator], f: &TestFunction) -> Result<Vec<f64>> {
    cfg.check()?;
    let n = cfg.n;
    let allowed = subalgebra_basis(n)?;
    if let Some(x) = xs.iter().find(|x| !allowed.contains(x)) {
        return Err(Error::GeneratorOutOfRange { generator: x.to_string(), n: n - 1 });
    }
    if f.is_zero() {
        return Ok(vec![0.0; xs.len()]);
    }
    let lambda = Rational::from_f64(cfg.lambda).ok_or_else(|| Error::InvalidArgument("lambda".into()))?;
    let nu = Rational::from_f64(cfg.nu).ok_or_else(|| Error::InvalidArgument("nu".into()))?;
    let level = cfg.quadrature.refinement;
    let support = f.support();
    let base = f.compile();
    let acted: Vec<CompiledTestFunction> = xs.iter().map(|&x| f.dpi(x, &lambda).map(|g| g.compile())).collect::<Result<_>>()?;
    let fields: Vec<(Vec<CompiledPoly>, CompiledPoly)> = xs
        .iter()
        .map(|&x| vector_field(x, n - 1, &nu).map(|(a, b)| (a.iter().map(CompiledPoly::new).collect(), CompiledPoly::new(&b))))
        .collect::<Result<_>>()?;

    let h = FD_STEP;
    let offsets = [-2.0, -1.0, 1.0, 2.0];
    let per_point: Vec<(f64, Vec<f64>)> = sample_points(n - 1)
        .into_par_iter()
        .map(|y| {
            // tasks: A f at y, the stencil around y, then A(dπ(X) f) at y
            let mut tasks: Vec<(&CompiledTestFunction, Vec<f64>)> = vec![(&base, y.clone())];
            for k in 0..n - 1 {
                for o in offsets {
                    let mut z = y.clone();
                    z[k] += o * h;
                    tasks.push((&base, z));
                }
            }
            tasks.extend(acted.iter().map(|g| (g, y.clone())));
            let (v, _) = integrate_tasks(cfg, &tasks, &support, level);
            let af = v[0];
            let grad: Vec<f64> = (0..n - 1)
                .map(|k| {
                    let s = &v[1 + 4 * k..5 + 4 * k];
                    (s[0] - 8.0 * s[1] + 8.0 * s[2] - s[3]) / (12.0 * h)
                })
                .collect();
            let lhs = &v[1 + 4 * (n - 1)..];
            let diffs = fields
                .iter()
                .zip(lhs)
                .map(|((a, b), l)| {
                    let rhs = b.eval(&y) * af + a.iter().zip(&grad).map(|(ak, gk)| ak.eval(&y) * gk).sum::<f64>();
                    (l - rhs).abs()
                })
                .collect();
            (af.abs(), diffs)
        })
        .collect();
    let scale = per_point.iter().map(|p| p.0).fold(0.0, f64::max);
    if scale == 0.0 {
        return Ok(vec![0.0; xs.len()]);
    }
    Ok((0..xs.len()).map(|i| per_point.iter().map(|p| p.1[i]).fold(0.0, f64::max) / scale).collect())
}

pub fn numeric_equivariance(cfg: &KernelConfig, x: ConfGenerator, f: &TestFunction) -> Result<f64> {
    Ok(numeric_equivariance_many(cfg, &[x], f)?[0])
}
