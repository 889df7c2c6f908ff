//! Compactly supported smooth test functions with exact first-order calculus.
//!
//! A test function is `Σ_k Q_k(x) ψ_k(s)` with `s = |x - c|²/r²` and
//! `ψ_k(s) = exp(-1/(1-s)) (1-s)^{-k}` on `s < 1`, zero elsewhere. Since
//! `ψ_k' = k ψ_{k+1} - ψ_{k+2}`, this family is closed under first-order operators
//! with polynomial coefficients, so `dπ_λ(X) f` is again exact data.

use serde::{Deserialize, Serialize};

use crate::conformal::{conf_act, coord_vars, ConfGenerator};
use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::rational::Rational;

/// JSON description of a modulated bump.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BumpSpec {
    /// Center; defaults to the origin.
    #[serde(default)]
    pub center: Option<Vec<Rational>>,
    #[serde(default = "one")]
    pub radius: Rational,
    /// Polynomial modulation in `x1..xn`; defaults to 1.
    #[serde(default)]
    pub modulation: Option<Poly<Rational>>,
}

fn one() -> Rational {
    Rational::one()
}

impl Default for BumpSpec {
    fn default() -> Self {
        BumpSpec { center: None, radius: one(), modulation: None }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TestFunction {
    center: Vec<Rational>,
    radius_sq: Rational,
    /// `parts[k]` multiplies `ψ_k`.
    parts: Vec<Poly<Rational>>,
}

impl TestFunction {
    /// `P(x) ψ_0(|x-c|²/r²)`.
    pub fn bump(center: Vec<Rational>, radius: Rational, modulation: Poly<Rational>) -> Result<Self> {
        let n = center.len();
        if radius <= 0 {
            return Err(Error::InvalidArgument(format!("bump radius must be positive, got {radius}")));
        }
        if modulation.nvars() != n && modulation.nvars() != 0 {
            return Err(Error::VarMismatch { left: modulation.vars().to_vec(), right: coord_vars(n).to_vec() });
        }
        let modulation = if modulation.nvars() == 0 {
            Poly::constant_in(coord_vars(n), modulation.as_constant().unwrap_or_else(Rational::zero))
        } else {
            modulation
        };
        Ok(TestFunction { center, radius_sq: &radius * &radius, parts: vec![modulation] })
    }

    /// Unit-radius, unmodulated bump centered at the origin.
    pub fn unit(n: usize) -> Self {
        Self::bump(vec![Rational::zero(); n], Rational::one(), Poly::one_in(coord_vars(n))).unwrap()
    }

    pub fn from_spec(n: usize, spec: &BumpSpec) -> Result<Self> {
        let center = spec.center.clone().unwrap_or_else(|| vec![Rational::zero(); n]);
        if center.len() != n {
            return Err(Error::InvalidArgument(format!("bump center has {} coordinates, expected {n}", center.len())));
        }
        let modulation = spec.modulation.clone().unwrap_or_else(|| Poly::one_in(coord_vars(n)));
        Self::bump(center, spec.radius.clone(), modulation)
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn is_zero(&self) -> bool {
        self.parts.iter().all(Poly::is_zero)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        TestFunction { parts: self.parts.iter().map(|p| p.scale(c)).collect(), ..self.clone() }
    }

    /// Center and radius in floating point, for support tests.
    pub fn support(&self) -> (Vec<f64>, f64) {
        (self.center.iter().map(Rational::to_f64).collect(), self.radius_sq.to_f64().sqrt())
    }

    /// `Σ_j a_j ∂_j f + b f`.
    fn first_order(&self, a: &[Poly<Rational>], b: &Poly<Rational>) -> Self {
        let n = self.dim();
        let vars = coord_vars(n);
        let mut parts = vec![Poly::zero_in(vars.clone()); self.parts.len() + 2];
        let rinv = self.radius_sq.recip();
        for (k, q) in self.parts.iter().enumerate() {
            if q.is_zero() {
                continue;
            }
            parts[k] = &parts[k] + &(b * q);
            for (j, aj) in a.iter().enumerate() {
                if aj.is_zero() {
                    continue;
                }
                parts[k] = &parts[k] + &(aj * &q.diff_index(j, 1));
                // ∂_j s = 2 (x_j - c_j) / r²
                let shifted = &Poly::var_in(vars.clone(), &vars[j]).unwrap() - &Poly::constant_in(vars.clone(), self.center[j].clone());
                let ds = shifted.scale(&(&rinv * &Rational::from_int(2)));
                let g = &(aj * &ds) * q;
                if k > 0 {
                    parts[k + 1] = &parts[k + 1] + &g.scale(&Rational::from_int(k as i64));
                }
                parts[k + 2] = &parts[k + 2] - &g;
            }
        }
        while parts.len() > 1 && parts.last().is_some_and(Poly::is_zero) {
            parts.pop();
        }
        TestFunction { parts, ..self.clone() }
    }

    /// `∂_j f` (0-based index).
    pub fn derivative(&self, j: usize) -> Self {
        let n = self.dim();
        let mut a = vec![Poly::zero_in(coord_vars(n)); n];
        a[j] = Poly::one_in(coord_vars(n));
        self.first_order(&a, &Poly::zero_in(coord_vars(n)))
    }

    /// `dπ_λ(X) f`, with the coefficients of the vector field read off [`conf_act`].
    pub fn dpi(&self, x: ConfGenerator, lambda: &Rational) -> Result<Self> {
        let (a, b) = vector_field(x, self.dim(), lambda)?;
        Ok(self.first_order(&a, &b))
    }

    pub(crate) fn compile(&self) -> CompiledTestFunction {
        let (center, _) = self.support();
        CompiledTestFunction {
            center,
            inv_radius_sq: self.radius_sq.recip().to_f64(),
            parts: self.parts.iter().map(CompiledPoly::new).collect(),
        }
    }

    /// Floating-point value at `x`.
    pub fn eval(&self, x: &[f64]) -> f64 {
        self.compile().eval(x)
    }
}

/// `dπ_λ(X) = Σ_j a_j ∂_j + b`, recovered from the action on `1` and on `x_j`.
pub fn vector_field(x: ConfGenerator, n: usize, lambda: &Rational) -> Result<(Vec<Poly<Rational>>, Poly<Rational>)> {
    let vars = coord_vars(n);
    let b = conf_act(x, n, lambda, &Poly::one_in(vars.clone()))?;
    let mut a = Vec::with_capacity(n);
    for j in 0..n {
        let xj = Poly::var_in(vars.clone(), &vars[j])?;
        a.push(&conf_act(x, n, lambda, &xj)? - &(&b * &xj));
    }
    Ok((a, b))
}

/// A polynomial flattened to floating-point terms.
#[derive(Debug, Clone)]
pub(crate) struct CompiledPoly {
    terms: Vec<(f64, Vec<i32>)>,
}

impl CompiledPoly {
    pub(crate) fn new(p: &Poly<Rational>) -> Self {
        CompiledPoly { terms: p.terms().map(|(e, c)| (c.to_f64(), e.iter().map(|&k| k as i32).collect())).collect() }
    }

    pub(crate) fn eval(&self, x: &[f64]) -> f64 {
        self.terms.iter().map(|(c, e)| c * e.iter().zip(x).map(|(&k, &xi)| xi.powi(k)).product::<f64>()).sum()
    }
}

#[derive(Debug, Clone)]
pub(crate) struct CompiledTestFunction {
    center: Vec<f64>,
    inv_radius_sq: f64,
    parts: Vec<CompiledPoly>,
}

impl CompiledTestFunction {
    pub(crate) fn eval(&self, x: &[f64]) -> f64 {
        let s: f64 = x.iter().zip(&self.center).map(|(a, c)| (a - c) * (a - c)).sum::<f64>() * self.inv_radius_sq;
        if s >= 1.0 {
            return 0.0;
        }
        let t = 1.0 / (1.0 - s);
        let phi = (-t).exp();
        let mut tk = 1.0;
        let mut acc = 0.0;
        for q in &self.parts {
            if !q.terms.is_empty() {
                acc += q.eval(x) * tk;
            }
            tk *= t;
        }
        acc * phi
    }
}
