//! Sparse multivariate polynomials over an exact coefficient ring.
//!
//! One generic type serves three roles:
//!
//! * [`ParamPoly`] = `Poly<Rational>` over formal parameters (`l1`, `l2`, `lambda`, `alpha`, ...),
//! * `Poly<Rational>` over spatial variables (`z`, `z1`, `z2`, `x1`..`xn`, `u`, `v`, `t`),
//! * `Poly<ParamPoly>` over spatial variables with parameter-dependent coefficients.
//!
//! Terms live in a `BTreeMap` keyed by exponent vectors, so iteration (and therefore
//! serialization) is in lexicographic exponent order. Zero coefficients are never stored.
//!
//! A polynomial with an *empty* variable list is a pure constant and combines with a
//! polynomial over any variable list. Any other mismatch of variable lists is an error
//! for the `checked_*` methods and a panic for the operator impls.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rational::Rational;

/// Exact commutative coefficient ring.
pub trait Ring: Clone + PartialEq + fmt::Debug + fmt::Display + Send + Sync + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    fn from_rational(r: &Rational) -> Self;
    fn is_zero(&self) -> bool;
    fn radd(&self, other: &Self) -> Self;
    fn rsub(&self, other: &Self) -> Self;
    fn rmul(&self, other: &Self) -> Self;
    fn rneg(&self) -> Self;

    fn from_int(n: i64) -> Self {
        Self::from_rational(&Rational::from_int(n))
    }

    fn scale(&self, r: &Rational) -> Self {
        self.rmul(&Self::from_rational(r))
    }

    /// Whether the value needs parentheses when printed as a factor.
    fn is_compound(&self) -> bool {
        false
    }
}

impl Ring for Rational {
    fn zero() -> Self {
        Rational::zero()
    }
    fn one() -> Self {
        Rational::one()
    }
    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }
    fn is_zero(&self) -> bool {
        Rational::is_zero(self)
    }
    fn radd(&self, other: &Self) -> Self {
        self + other
    }
    fn rsub(&self, other: &Self) -> Self {
        self - other
    }
    fn rmul(&self, other: &Self) -> Self {
        self * other
    }
    fn rneg(&self) -> Self {
        -self
    }
    fn scale(&self, r: &Rational) -> Self {
        self * r
    }
}

/// Polynomial in formal parameters with rational coefficients.
pub type ParamPoly = Poly<Rational>;

/// Exponent vector, one entry per declared variable.
pub type Exponents = Vec<u32>;

#[derive(Clone)]
pub struct Poly<C> {
    vars: Arc<Vec<String>>,
    terms: BTreeMap<Exponents, C>,
}

fn var_list(names: &[&str]) -> Arc<Vec<String>> {
    Arc::new(names.iter().map(|s| s.to_string()).collect())
}

impl<C: Ring> Poly<C> {
    pub fn zero(vars: &[&str]) -> Self {
        Self::zero_in(var_list(vars))
    }

    pub fn zero_in(vars: Arc<Vec<String>>) -> Self {
        Poly { vars, terms: BTreeMap::new() }
    }

    /// A constant with no variables; combines with polynomials over any variable list.
    pub fn scalar(c: C) -> Self {
        let mut p = Self::zero_in(Arc::new(Vec::new()));
        p.add_term(Vec::new(), c);
        p
    }

    pub fn constant(vars: &[&str], c: C) -> Self {
        Self::constant_in(var_list(vars), c)
    }

    pub fn constant_in(vars: Arc<Vec<String>>, c: C) -> Self {
        let n = vars.len();
        let mut p = Self::zero_in(vars);
        p.add_term(vec![0; n], c);
        p
    }

    pub fn one_in(vars: Arc<Vec<String>>) -> Self {
        Self::constant_in(vars, C::one())
    }

    /// The polynomial consisting of the single variable `name`.
    pub fn var(vars: &[&str], name: &str) -> Result<Self> {
        Self::var_in(var_list(vars), name)
    }

    pub fn var_in(vars: Arc<Vec<String>>, name: &str) -> Result<Self> {
        let i = index_of(&vars, name)?;
        let mut exps = vec![0; vars.len()];
        exps[i] = 1;
        Ok(Self::monomial_in(vars, exps, C::one()))
    }

    pub fn monomial(vars: &[&str], exps: &[u32], c: C) -> Self {
        Self::monomial_in(var_list(vars), exps.to_vec(), c)
    }

    pub fn monomial_in(vars: Arc<Vec<String>>, exps: Exponents, c: C) -> Self {
        assert_eq!(exps.len(), vars.len(), "exponent vector length");
        let mut p = Self::zero_in(vars);
        p.add_term(exps, c);
        p
    }

    /// Builds a polynomial from `(exponents, coefficient)` pairs, merging repeats.
    pub fn from_terms(vars: &[&str], terms: impl IntoIterator<Item = (Exponents, C)>) -> Self {
        let mut p = Self::zero(vars);
        for (e, c) in terms {
            assert_eq!(e.len(), p.nvars(), "exponent vector length");
            p.add_term(e, c);
        }
        p
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn vars_arc(&self) -> &Arc<Vec<String>> {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn var_index(&self, name: &str) -> Result<usize> {
        index_of(&self.vars, name)
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Exponents, &C)> + ExactSizeIterator {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, exps: &[u32]) -> C {
        self.terms.get(exps).cloned().unwrap_or_else(C::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The constant term's coefficient when the polynomial has no other terms.
    pub fn as_constant(&self) -> Option<C> {
        match self.terms.len() {
            0 => Some(C::zero()),
            1 => {
                let (e, c) = self.terms.iter().next().unwrap();
                e.iter().all(|&k| k == 0).then(|| c.clone())
            }
            _ => None,
        }
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    pub fn degree_in(&self, var: &str) -> Result<Option<u32>> {
        let i = self.var_index(var)?;
        Ok(self.terms.keys().map(|e| e[i]).max())
    }

    fn add_term(&mut self, exps: Exponents, c: C) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(exps) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                let s = o.get().radd(&c);
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    fn promoted(&self, vars: &Arc<Vec<String>>) -> Self {
        debug_assert!(self.vars.is_empty());
        let n = vars.len();
        Poly {
            vars: vars.clone(),
            terms: self.terms.values().map(|c| (vec![0; n], c.clone())).collect(),
        }
    }

    /// Brings two operands onto a common variable list.
    fn unify<'a>(&'a self, other: &'a Self) -> Result<(std::borrow::Cow<'a, Self>, std::borrow::Cow<'a, Self>)> {
        use std::borrow::Cow;
        if Arc::ptr_eq(&self.vars, &other.vars) || self.vars == other.vars {
            Ok((Cow::Borrowed(self), Cow::Borrowed(other)))
        } else if self.vars.is_empty() {
            Ok((Cow::Owned(self.promoted(&other.vars)), Cow::Borrowed(other)))
        } else if other.vars.is_empty() {
            Ok((Cow::Borrowed(self), Cow::Owned(other.promoted(&self.vars))))
        } else {
            Err(Error::VarMismatch { left: self.vars.to_vec(), right: other.vars.to_vec() })
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        let (a, b) = self.unify(other)?;
        let mut out = a.into_owned();
        for (e, c) in b.terms.iter() {
            out.add_term(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        let (a, b) = self.unify(other)?;
        let mut out = a.into_owned();
        for (e, c) in b.terms.iter() {
            out.add_term(e.clone(), c.rneg());
        }
        Ok(out)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        let (a, b) = self.unify(other)?;
        let mut out = Self::zero_in(a.vars.clone());
        for (ea, ca) in a.terms.iter() {
            for (eb, cb) in b.terms.iter() {
                let e: Exponents = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                out.add_term(e, ca.rmul(cb));
            }
        }
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        Poly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c.rneg())).collect(),
        }
    }

    /// Multiplies every coefficient by `c`.
    pub fn scale(&self, c: &C) -> Self {
        let mut out = Self::zero_in(self.vars.clone());
        for (e, x) in self.terms.iter() {
            out.add_term(e.clone(), x.rmul(c));
        }
        out
    }

    pub fn scale_rational(&self, r: &Rational) -> Self {
        let mut out = Self::zero_in(self.vars.clone());
        for (e, x) in self.terms.iter() {
            out.add_term(e.clone(), x.scale(r));
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = Self::one_in(self.vars.clone());
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    /// Multiplies by `x_i^k`.
    pub fn mul_var_power(&self, i: usize, k: u32) -> Self {
        Poly {
            vars: self.vars.clone(),
            terms: self
                .terms
                .iter()
                .map(|(e, c)| {
                    let mut e2 = e.clone();
                    e2[i] += k;
                    (e2, c.clone())
                })
                .collect(),
        }
    }

    /// Partial derivative of the given order with respect to `var`.
    pub fn diff(&self, var: &str, order: u32) -> Result<Self> {
        let i = self.var_index(var)?;
        Ok(self.diff_index(i, order))
    }

    pub fn diff_index(&self, i: usize, order: u32) -> Self {
        if order == 0 {
            return self.clone();
        }
        let mut out = Self::zero_in(self.vars.clone());
        for (e, c) in self.terms.iter() {
            if e[i] < order {
                continue;
            }
            // falling factorial e[i] (e[i]-1) ... (e[i]-order+1)
            let mut f: i64 = 1;
            for j in 0..order {
                f *= (e[i] - j) as i64;
            }
            let mut e2 = e.clone();
            e2[i] -= order;
            out.add_term(e2, c.scale(&Rational::from_int(f)));
        }
        out
    }

    /// Applies the constant-coefficient monomial derivative `∂^orders`.
    pub fn diff_multi(&self, orders: &[u32]) -> Self {
        assert_eq!(orders.len(), self.nvars(), "derivative order vector length");
        let mut out = self.clone();
        for (i, &k) in orders.iter().enumerate() {
            if k > 0 {
                out = out.diff_index(i, k);
            }
        }
        out
    }

    /// Substitutes a constant for `var` and removes it from the variable list.
    pub fn substitute_value(&self, var: &str, value: &C) -> Result<Self> {
        let i = self.var_index(var)?;
        let vars: Vec<String> = self.vars.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, v)| v.clone()).collect();
        let mut out = Self::zero_in(Arc::new(vars));
        let zero_value = value.is_zero();
        for (e, c) in self.terms.iter() {
            let k = e[i];
            if zero_value && k > 0 {
                continue;
            }
            let mut factor = c.clone();
            for _ in 0..k {
                factor = factor.rmul(value);
            }
            let mut e2 = e.clone();
            e2.remove(i);
            out.add_term(e2, factor);
        }
        Ok(out)
    }

    /// Rewrites exponent vectors into a new variable list via `map`, merging collisions.
    pub fn remap(&self, vars: &[&str], map: impl Fn(&[u32]) -> Exponents) -> Self {
        let mut out = Self::zero(vars);
        for (e, c) in self.terms.iter() {
            let e2 = map(e);
            assert_eq!(e2.len(), out.nvars(), "remapped exponent length");
            out.add_term(e2, c.clone());
        }
        out
    }

    /// Substitutes `images[i]` (polynomials over a common variable list) for variable `i`.
    pub fn compose(&self, images: &[Poly<C>]) -> Result<Self> {
        if images.len() != self.nvars() {
            return Err(Error::InvalidArgument(format!(
                "compose needs {} images, got {}",
                self.nvars(),
                images.len()
            )));
        }
        let target = images.first().map(|p| p.vars.clone()).unwrap_or_else(|| Arc::new(Vec::new()));
        let mut out = Self::zero_in(target.clone());
        for (e, c) in self.terms.iter() {
            let mut t = Self::constant_in(target.clone(), c.clone());
            for (img, &k) in images.iter().zip(e) {
                if k > 0 {
                    t = t.checked_mul(&img.pow(k))?;
                }
            }
            out = out.checked_add(&t)?;
        }
        Ok(out)
    }

    /// Maps every coefficient into another ring, dropping those that become zero.
    pub fn map_coeffs<D: Ring>(&self, f: impl Fn(&C) -> D) -> Poly<D> {
        let mut out = Poly::<D>::zero_in(self.vars.clone());
        for (e, c) in self.terms.iter() {
            out.add_term(e.clone(), f(c));
        }
        out
    }

    /// Coefficients in lexicographic exponent order (for linear-algebra checks).
    pub fn coefficient_vector(&self, basis: &[Exponents]) -> Vec<C> {
        basis.iter().map(|e| self.coeff(e)).collect()
    }
}

impl ParamPoly {
    /// Evaluates at a point given as one value per declared parameter.
    pub fn evaluate(&self, point: &[Rational]) -> Rational {
        assert_eq!(point.len(), self.nvars(), "point dimension");
        let mut acc = Rational::zero();
        for (e, c) in self.terms.iter() {
            let mut t = c.clone();
            for (x, &k) in point.iter().zip(e) {
                if k > 0 {
                    t = &t * &x.pow(k);
                }
            }
            acc = &acc + &t;
        }
        acc
    }

    /// Evaluates with named values; names missing from `values` are an error.
    pub fn evaluate_named(&self, values: &[(&str, Rational)]) -> Result<Rational> {
        let point = self
            .vars
            .iter()
            .map(|v| {
                values
                    .iter()
                    .find(|(n, _)| n == v)
                    .map(|(_, x)| x.clone())
                    .ok_or_else(|| Error::UnknownVariable(v.clone()))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(self.evaluate(&point))
    }
}

impl<C: Ring> Poly<Poly<C>> {
    /// Evaluates every coefficient polynomial with `f`.
    pub fn eval_coeffs(&self, f: impl Fn(&Poly<C>) -> C) -> Poly<C> {
        self.map_coeffs(f)
    }
}

/// Rising factorial `base (base+1) ... (base+k-1)`; `poch(b, 0) = 1`.
pub fn poch<C: Ring>(base: &C, k: u32) -> C {
    let mut out = C::one();
    for i in 0..k {
        out = out.rmul(&base.radd(&C::from_int(i as i64)));
    }
    out
}

fn index_of(vars: &[String], name: &str) -> Result<usize> {
    vars.iter().position(|v| v == name).ok_or_else(|| Error::UnknownVariable(name.to_string()))
}

impl<C: Ring> PartialEq for Poly<C> {
    fn eq(&self, other: &Self) -> bool {
        match self.unify(other) {
            Ok((a, b)) => a.terms == b.terms,
            Err(_) => false,
        }
    }
}

impl<C: Ring> fmt::Debug for Poly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly[{}]({})", self.vars.join(","), self)
    }
}

impl<C: Ring> fmt::Display for Poly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        // highest exponents first
        for (idx, (e, c)) in self.terms.iter().rev().enumerate() {
            let mono: Vec<String> = e
                .iter()
                .zip(self.vars.iter())
                .filter(|(k, _)| **k > 0)
                .map(|(k, v)| if *k == 1 { v.clone() } else { format!("{v}^{k}") })
                .collect();
            let mut cs = c.to_string();
            let negative = !c.is_compound() && cs.starts_with('-');
            if negative {
                cs.remove(0);
            }
            if idx == 0 {
                if negative {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if negative { '-' } else { '+' })?;
            }
            let cs = if c.is_compound() { format!("({cs})") } else { cs };
            if mono.is_empty() {
                write!(f, "{cs}")?;
            } else if cs == "1" {
                write!(f, "{}", mono.join("*"))?;
            } else {
                write!(f, "{cs}*{}", mono.join("*"))?;
            }
        }
        Ok(())
    }
}

impl<C: Ring> Ring for Poly<C> {
    fn zero() -> Self {
        Poly::zero_in(Arc::new(Vec::new()))
    }
    fn one() -> Self {
        Poly::scalar(C::one())
    }
    fn from_rational(r: &Rational) -> Self {
        Poly::scalar(C::from_rational(r))
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    fn radd(&self, other: &Self) -> Self {
        self + other
    }
    fn rsub(&self, other: &Self) -> Self {
        self - other
    }
    fn rmul(&self, other: &Self) -> Self {
        self * other
    }
    fn rneg(&self) -> Self {
        self.neg()
    }
    fn scale(&self, r: &Rational) -> Self {
        self.scale_rational(r)
    }
    fn is_compound(&self) -> bool {
        self.terms.len() > 1
    }
}

macro_rules! poly_binop {
    ($tr:ident, $method:ident, $checked:ident) => {
        impl<'a, C: Ring> $tr<&'a Poly<C>> for &'a Poly<C> {
            type Output = Poly<C>;
            fn $method(self, rhs: &'a Poly<C>) -> Poly<C> {
                self.$checked(rhs).unwrap_or_else(|e| panic!("{e}"))
            }
        }
        impl<C: Ring> $tr for Poly<C> {
            type Output = Poly<C>;
            fn $method(self, rhs: Poly<C>) -> Poly<C> {
                (&self).$method(&rhs)
            }
        }
    };
}

poly_binop!(Add, add, checked_add);
poly_binop!(Sub, sub, checked_sub);
poly_binop!(Mul, mul, checked_mul);

impl<C: Ring> Neg for &Poly<C> {
    type Output = Poly<C>;
    fn neg(self) -> Poly<C> {
        Poly::neg(self)
    }
}

#[derive(Serialize, Deserialize)]
struct TermRepr<C> {
    coeff: C,
    exps: Exponents,
}

#[derive(Serialize, Deserialize)]
struct PolyRepr<C> {
    vars: Vec<String>,
    terms: Vec<TermRepr<C>>,
}

impl<C: Ring + Serialize> Serialize for Poly<C> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let repr = PolyRepr {
            vars: self.vars.to_vec(),
            terms: self.terms.iter().map(|(e, c)| TermRepr { coeff: c.clone(), exps: e.clone() }).collect(),
        };
        repr.serialize(serializer)
    }
}

impl<'de, C: Ring + Deserialize<'de>> Deserialize<'de> for Poly<C> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = PolyRepr::<C>::deserialize(deserializer)?;
        let n = repr.vars.len();
        let mut p = Poly::zero_in(Arc::new(repr.vars));
        for t in repr.terms {
            if t.exps.len() != n {
                return Err(D::Error::custom(format!("exponent vector {:?} has wrong length (expected {n})", t.exps)));
            }
            p.add_term(t.exps, t.coeff);
        }
        Ok(p)
    }
}
