//! Infinitesimal action of o(n+1,1) on polynomials on `R^n` (the N-picture of the
//! spherical principal series `I(λ)`), and the subalgebra o(n,1) preserving `x_n = 0`.
//!
//! ```text
//! T_j    ↦ ∂_j
//! R_ij   ↦ x_i ∂_j - x_j ∂_i
//! D      ↦ E + λ                          (E = Σ x_k ∂_k)
//! C_j    ↦ |x|² ∂_j - 2 x_j E - 2 λ x_j
//! ```
//!
//! The structure constants are not hard-coded: they are read off a matrix model of
//! o(n+1,1) on `R^{n+2}` with the form `2 x₊ x₋ + Σ x_k²` (see [`AbstractAlgebra`]).

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::poly::{Poly, Ring};
use crate::rational::Rational;
use crate::report::Report;

/// Basis element of o(n+1,1); indices are 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ConfGenerator {
    Translation(usize),
    Rotation(usize, usize),
    Dilation,
    SpecialConformal(usize),
}

use ConfGenerator::*;

impl ConfGenerator {
    fn validate(&self, n: usize) -> Result<()> {
        let ok = match *self {
            Translation(j) | SpecialConformal(j) => (1..=n).contains(&j),
            Rotation(i, j) => i >= 1 && i < j && j <= n,
            Dilation => true,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::GeneratorOutOfRange { generator: self.to_string(), n })
        }
    }
}

impl fmt::Display for ConfGenerator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Translation(j) => write!(f, "T{j}"),
            SpecialConformal(j) => write!(f, "C{j}"),
            Dilation => write!(f, "D"),
            Rotation(i, j) if i < 10 && j < 10 => write!(f, "R{i}{j}"),
            Rotation(i, j) => write!(f, "R{i},{j}"),
        }
    }
}

impl FromStr for ConfGenerator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("not a generator tag: {s:?}"));
        let idx = |t: &str| t.parse::<usize>().map_err(|_| bad());
        match s.split_at_checked(1).ok_or_else(bad)? {
            ("D", "") => Ok(Dilation),
            ("T", rest) => Ok(Translation(idx(rest)?)),
            ("C", rest) => Ok(SpecialConformal(idx(rest)?)),
            ("R", rest) => {
                let (i, j) = match rest.split_once(',') {
                    Some((i, j)) => (idx(i)?, idx(j)?),
                    None if rest.len() == 2 => (idx(&rest[..1])?, idx(&rest[1..])?),
                    None => return Err(bad()),
                };
                Ok(Rotation(i, j))
            }
            _ => Err(bad()),
        }
    }
}

impl Serialize for ConfGenerator {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for ConfGenerator {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Coordinate names `x1..xn`.
pub fn coords(n: usize) -> Vec<String> {
    (1..=n).map(|k| format!("x{k}")).collect()
}

pub fn coord_vars(n: usize) -> Arc<Vec<String>> {
    Arc::new(coords(n))
}

/// All `(n+1)(n+2)/2` generators of o(n+1,1).
pub fn full_basis(n: usize) -> Vec<ConfGenerator> {
    let mut out: Vec<ConfGenerator> = (1..=n).map(Translation).collect();
    for i in 1..=n {
        for j in i + 1..=n {
            out.push(Rotation(i, j));
        }
    }
    out.push(Dilation);
    out.extend((1..=n).map(SpecialConformal));
    out
}

/// Generators of the subalgebra o(n,1) that preserves the hyperplane `x_n = 0`.
pub fn subalgebra_basis(n: usize) -> Result<Vec<ConfGenerator>> {
    if n < 2 {
        return Err(Error::DimensionTooSmall(n));
    }
    Ok(full_basis(n - 1))
}

/// Euler operator `Σ x_k ∂_k` applied to `f`.
fn euler<C: Ring>(f: &Poly<C>) -> Poly<C> {
    let mut out = Poly::zero_in(f.vars_arc().clone());
    for k in 0..f.nvars() {
        out = &out + &f.diff_index(k, 1).mul_var_power(k, 1);
    }
    out
}

/// `dπ_λ(X) f` for `f` a polynomial in `x1..xn`.
pub fn conf_act<C: Ring>(x: ConfGenerator, n: usize, lambda: &C, f: &Poly<C>) -> Result<Poly<C>> {
    x.validate(n)?;
    if f.nvars() != n {
        return Err(Error::VarMismatch { left: f.vars().to_vec(), right: coords(n) });
    }
    let two = Rational::from_int(2);
    Ok(match x {
        Translation(j) => f.diff_index(j - 1, 1),
        Rotation(i, j) => &f.diff_index(j - 1, 1).mul_var_power(i - 1, 1) - &f.diff_index(i - 1, 1).mul_var_power(j - 1, 1),
        Dilation => &euler(f) + &f.scale(lambda),
        SpecialConformal(j) => {
            let dj = f.diff_index(j - 1, 1);
            let mut sq = Poly::zero_in(f.vars_arc().clone());
            for k in 0..n {
                sq = &sq + &dj.mul_var_power(k, 2);
            }
            let shifted = (&euler(f) + &f.scale(lambda)).mul_var_power(j - 1, 1).scale_rational(&two);
            &sq - &shifted
        }
    })
}

/// Square matrix over the rationals, row-major.
#[derive(Debug, Clone, PartialEq)]
struct Mat {
    dim: usize,
    a: Vec<Rational>,
}

impl Mat {
    fn zero(dim: usize) -> Self {
        Mat { dim, a: vec![Rational::zero(); dim * dim] }
    }

    fn at(&self, i: usize, j: usize) -> &Rational {
        &self.a[i * self.dim + j]
    }

    fn add_unit(&mut self, i: usize, j: usize, c: i64) {
        let k = i * self.dim + j;
        self.a[k] = &self.a[k] + &Rational::from_int(c);
    }

    fn mul(&self, o: &Mat) -> Mat {
        let d = self.dim;
        let mut m = Mat::zero(d);
        for i in 0..d {
            for k in 0..d {
                let x = self.at(i, k);
                if x.is_zero() {
                    continue;
                }
                for j in 0..d {
                    let y = o.at(k, j);
                    if !y.is_zero() {
                        m.a[i * d + j] = &m.a[i * d + j] + &(x * y);
                    }
                }
            }
        }
        m
    }

    fn sub(&self, o: &Mat) -> Mat {
        Mat { dim: self.dim, a: self.a.iter().zip(&o.a).map(|(x, y)| x - y).collect() }
    }

    fn scaled(&self, c: &Rational) -> Mat {
        Mat { dim: self.dim, a: self.a.iter().map(|x| x * c).collect() }
    }

    fn add(&self, o: &Mat) -> Mat {
        Mat { dim: self.dim, a: self.a.iter().zip(&o.a).map(|(x, y)| x + y).collect() }
    }

    fn transpose(&self) -> Mat {
        let d = self.dim;
        let mut m = Mat::zero(d);
        for i in 0..d {
            for j in 0..d {
                m.a[j * d + i] = self.at(i, j).clone();
            }
        }
        m
    }
}

/// Matrix model of o(n+1,1) used as the reference for structure constants.
///
/// Basis of `R^{n+2}`: index 0 is `e₊`, indices `1..=n` the coordinates, `n+1` is `e₋`;
/// the invariant form is `2 x₊ x₋ + Σ x_k²`.
#[derive(Debug, Clone)]
pub struct AbstractAlgebra {
    n: usize,
}

impl AbstractAlgebra {
    pub fn new(n: usize) -> Self {
        AbstractAlgebra { n }
    }

    fn form(&self) -> Mat {
        let d = self.n + 2;
        let mut j = Mat::zero(d);
        j.add_unit(0, d - 1, 1);
        j.add_unit(d - 1, 0, 1);
        for k in 1..=self.n {
            j.add_unit(k, k, 1);
        }
        j
    }

    fn matrix(&self, x: ConfGenerator) -> Mat {
        let m = self.n + 1;
        let mut a = Mat::zero(self.n + 2);
        match x {
            Translation(j) => {
                a.add_unit(j, 0, 1);
                a.add_unit(m, j, -1);
            }
            Dilation => {
                a.add_unit(0, 0, 1);
                a.add_unit(m, m, -1);
            }
            SpecialConformal(j) => {
                a.add_unit(j, m, -2);
                a.add_unit(0, j, 2);
            }
            Rotation(i, j) => {
                a.add_unit(i, j, 1);
                a.add_unit(j, i, -1);
            }
        }
        a
    }

    /// Whether the matrix of `x` preserves the invariant form.
    pub fn preserves_form(&self, x: ConfGenerator) -> bool {
        let a = self.matrix(x);
        let j = self.form();
        let s = a.transpose().mul(&j).add(&j.mul(&a));
        s.a.iter().all(Rational::is_zero)
    }

    /// `[X, Y]` expanded in [`full_basis`]; `None` if the commutator leaves the span.
    pub fn bracket(&self, x: ConfGenerator, y: ConfGenerator) -> Option<Vec<(ConfGenerator, Rational)>> {
        let (a, b) = (self.matrix(x), self.matrix(y));
        let c = a.mul(&b).sub(&b.mul(&a));
        let mut out = Vec::new();
        for g in full_basis(self.n) {
            let coef = match g {
                Translation(j) => c.at(j, 0).clone(),
                Dilation => c.at(0, 0).clone(),
                SpecialConformal(j) => c.at(0, j) / &Rational::from_int(2),
                Rotation(i, j) => c.at(i, j).clone(),
            };
            if !coef.is_zero() {
                out.push((g, coef));
            }
        }
        let rebuilt = out.iter().fold(Mat::zero(self.n + 2), |acc, (g, k)| acc.add(&self.matrix(*g).scaled(k)));
        (rebuilt == c).then_some(out)
    }
}

fn monomials(n: usize, max_degree: u32) -> Vec<Vec<u32>> {
    fn rec(n: usize, budget: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if prefix.len() == n {
            out.push(prefix.clone());
            return;
        }
        for k in 0..=budget {
            prefix.push(k);
            rec(n, budget - k, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, max_degree, &mut Vec::new(), &mut out);
    out
}

/// All monomials `x^e` in `n` variables with `|e| <= max_degree`.
pub fn monomial_basis(n: usize, max_degree: u32) -> Vec<Vec<u32>> {
    monomials(n, max_degree)
}

/// Checks `[dπ(X), dπ(Y)] = dπ([X, Y])` for all generator pairs on monomials of degree `<= max_degree`.
pub fn check_brackets_conf<C: Ring>(n: usize, lambda: &C, max_degree: u32) -> Result<Report> {
    if n < 2 {
        return Err(Error::DimensionTooSmall(n));
    }
    let alg = AbstractAlgebra::new(n);
    let basis = full_basis(n);
    let vars = coord_vars(n);
    let mons: Vec<Poly<C>> = monomials(n, max_degree).into_iter().map(|e| Poly::monomial_in(vars.clone(), e, C::one())).collect();
    let mut report = Report::default();
    for (ix, &x) in basis.iter().enumerate() {
        for &y in &basis[ix + 1..] {
            let Some(xy) = alg.bracket(x, y) else {
                report.record(false, || format!("[{x}, {y}] leaves the matrix algebra"));
                continue;
            };
            for m in &mons {
                let lhs = &conf_act(x, n, lambda, &conf_act(y, n, lambda, m)?)? - &conf_act(y, n, lambda, &conf_act(x, n, lambda, m)?)?;
                let mut rhs = Poly::zero_in(vars.clone());
                for (g, k) in &xy {
                    rhs = &rhs + &conf_act(*g, n, lambda, m)?.scale_rational(k);
                }
                report.record(lhs == rhs, || format!("[{x}, {y}] on {m}: {lhs} != {rhs}"));
            }
        }
    }
    Ok(report)
}

/// Checks `rest_{x_n=0} ∘ dπ_λ(X) = dπ'_λ(X) ∘ rest_{x_n=0}` for every `X` of the subalgebra.
pub fn check_restriction<C: Ring>(n: usize, lambda: &C, max_degree: u32) -> Result<Report> {
    let sub = subalgebra_basis(n)?;
    let vars = coord_vars(n);
    let last = format!("x{n}");
    let mut report = Report::default();
    for e in monomials(n, max_degree) {
        let m = Poly::monomial_in(vars.clone(), e, C::one());
        let rm = m.substitute_value(&last, &C::zero())?;
        for &x in &sub {
            let lhs = conf_act(x, n, lambda, &m)?.substitute_value(&last, &C::zero())?;
            let rhs = conf_act(x, n - 1, lambda, &rm)?;
            report.record(lhs == rhs, || format!("{x} on {m}: {lhs} != {rhs}"));
        }
    }
    Ok(report)
}
