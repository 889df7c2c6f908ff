//! Infinitesimal sl(2) action on the polynomial model of `π_λ` and on tensor products.
//!
//! With `(π_λ(g) f)(z) = (cz+d)^{-λ} f((az+b)/(cz+d))` for `g^{-1} = (a b; c d)`,
//! differentiating along one-parameter subgroups gives
//!
//! ```text
//! dπ_λ(e) = -∂_z
//! dπ_λ(h) = -λ - 2 z ∂_z
//! dπ_λ(f) =  λ z + z² ∂_z
//! ```

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::poly::{Poly, Ring};
use crate::rational::Rational;
use crate::report::Report;

/// Element `c_e e + c_h h + c_f f` of sl(2) in the standard basis.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Sl2Element {
    pub e: Rational,
    pub h: Rational,
    pub f: Rational,
}

impl Sl2Element {
    pub fn new(e: Rational, h: Rational, f: Rational) -> Self {
        Sl2Element { e, h, f }
    }

    pub fn e() -> Self {
        Self::new(Rational::one(), Rational::zero(), Rational::zero())
    }

    pub fn h() -> Self {
        Self::new(Rational::zero(), Rational::one(), Rational::zero())
    }

    pub fn f() -> Self {
        Self::new(Rational::zero(), Rational::zero(), Rational::one())
    }

    pub fn basis() -> [Sl2Element; 3] {
        [Self::e(), Self::h(), Self::f()]
    }

    /// `[[h, e], [f, -h]]`
    fn matrix(&self) -> [[Rational; 2]; 2] {
        [[self.h.clone(), self.e.clone()], [self.f.clone(), -&self.h]]
    }

    /// Lie bracket, computed as a matrix commutator.
    pub fn bracket(&self, other: &Sl2Element) -> Sl2Element {
        let (a, b) = (self.matrix(), other.matrix());
        let prod = |x: &[[Rational; 2]; 2], y: &[[Rational; 2]; 2]| {
            let mut m: [[Rational; 2]; 2] = Default::default();
            for i in 0..2 {
                for j in 0..2 {
                    m[i][j] = &(&x[i][0] * &y[0][j]) + &(&x[i][1] * &y[1][j]);
                }
            }
            m
        };
        let (ab, ba) = (prod(&a, &b), prod(&b, &a));
        Sl2Element::new(&ab[0][1] - &ba[0][1], &ab[0][0] - &ba[0][0], &ab[1][0] - &ba[1][0])
    }
}

impl fmt::Display for Sl2Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}e + {}h + {}f", self.e, self.h, self.f)
    }
}

/// `dπ_λ(X)` acting in the `i`-th variable of `p`.
fn act_in<C: Ring>(x: &Sl2Element, lambda: &C, p: &Poly<C>, i: usize) -> Poly<C> {
    let dp = p.diff_index(i, 1);
    let mut out = Poly::zero_in(p.vars_arc().clone());
    if !x.e.is_zero() {
        out = &out - &dp.scale_rational(&x.e);
    }
    if !x.h.is_zero() {
        let t = &p.scale(lambda) + &dp.mul_var_power(i, 1).scale_rational(&Rational::from_int(2));
        out = &out - &t.scale_rational(&x.h);
    }
    if !x.f.is_zero() {
        let t = &p.mul_var_power(i, 1).scale(lambda) + &dp.mul_var_power(i, 2);
        out = &out + &t.scale_rational(&x.f);
    }
    out
}

/// `dπ_λ(X) F` for `F` in the one-variable model.
pub fn act<C: Ring>(x: &Sl2Element, lambda: &C, f: &Poly<C>) -> Result<Poly<C>> {
    if f.nvars() != 1 {
        return Err(Error::VarMismatch { left: f.vars().to_vec(), right: vec!["z".into()] });
    }
    Ok(act_in(x, lambda, f, 0))
}

/// `(dπ_{λ₁}(X) ⊗ 1 + 1 ⊗ dπ_{λ₂}(X)) F` for `F` in the two-variable model.
pub fn tensor_act<C: Ring>(x: &Sl2Element, l1: &C, l2: &C, f: &Poly<C>) -> Result<Poly<C>> {
    if f.nvars() != 2 {
        return Err(Error::VarMismatch { left: f.vars().to_vec(), right: vec!["z1".into(), "z2".into()] });
    }
    Ok(&act_in(x, l1, f, 0) + &act_in(x, l2, f, 1))
}

/// Checks `[dπ(A), dπ(B)] = dπ([A, B])` for all pairs of basis elements on `z^k`, `k <= max_degree`.
pub fn check_brackets_sl2<C: Ring>(lambda: &C, max_degree: u32) -> Report {
    let basis = Sl2Element::basis();
    let names = ["e", "h", "f"];
    let mut report = Report::default();
    for i in 0..3 {
        for j in i + 1..3 {
            let (a, b) = (&basis[i], &basis[j]);
            let ab = a.bracket(b);
            for k in 0..=max_degree {
                let m = Poly::<C>::monomial(&["z"], &[k], C::one());
                let lhs = &act_in(a, lambda, &act_in(b, lambda, &m, 0), 0) - &act_in(b, lambda, &act_in(a, lambda, &m, 0), 0);
                let rhs = act_in(&ab, lambda, &m, 0);
                report.record(lhs == rhs, || format!("[{}, {}] on z^{k}: {lhs} != {rhs}", names[i], names[j]));
            }
        }
    }
    report
}
