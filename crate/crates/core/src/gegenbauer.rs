//! Gegenbauer polynomials, their renormalization, and the two-variable inflation.
//!
//! ```text
//! C_l^α(t) = Σ_k (-1)^k (α)_{l-k} / ((l-2k)! k!) (2t)^{l-2k}
//! C̃_l^α(t) = C_l^α(t) / (α)_m,        m = ⌊(l+1)/2⌋
//!          = Σ_k (-1)^k (α+m)_{l-k-m} / ((l-2k)! k!) (2t)^{l-2k}
//! ```
//!
//! The second form has no denominators in `α`, so `C̃` is defined for every `α`.

use serde::Serialize;

use crate::poly::{poch, ParamPoly, Poly, Ring};
use crate::rational::Rational;

/// Name of the formal Gegenbauer parameter.
pub const ALPHA: &str = "alpha";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GegenbauerPoly<C: Ring> {
    pub degree: u32,
    pub renormalized: bool,
    /// Polynomial in `t`.
    pub poly: Poly<C>,
}

impl<C: Ring> GegenbauerPoly<C> {
    /// Actual degree in `t` (may be below `degree`, or absent when the polynomial vanishes).
    pub fn actual_degree(&self) -> Option<u32> {
        self.poly.degree()
    }

    pub fn is_zero(&self) -> bool {
        self.poly.is_zero()
    }
}

/// `⌊(l+1)/2⌋`, the Pochhammer length removed by the renormalization.
pub fn renorm_length(l: u32) -> u32 {
    l.div_ceil(2)
}

fn scalar_part(l: u32, k: u32) -> Rational {
    let fact = |n: u32| (1..=n as i64).fold(Rational::one(), |acc, i| &acc * &Rational::from_int(i));
    let sign = if k.is_multiple_of(2) { Rational::one() } else { Rational::from_int(-1) };
    let pow2 = Rational::from_int(2).pow(l - 2 * k);
    &(&sign * &pow2) / &(&fact(l - 2 * k) * &fact(k))
}

/// The classical `C_l^α`.
pub fn gegenbauer<C: Ring>(l: u32, alpha: &C) -> GegenbauerPoly<C> {
    let terms = (0..=l / 2).map(|k| (vec![l - 2 * k], poch(alpha, l - k).scale(&scalar_part(l, k))));
    GegenbauerPoly { degree: l, renormalized: false, poly: Poly::from_terms(&["t"], terms) }
}

/// The renormalized `C̃_l^α = Γ(α)/Γ(α+⌊(l+1)/2⌋) C_l^α`.
pub fn gegenbauer_renorm<C: Ring>(l: u32, alpha: &C) -> GegenbauerPoly<C> {
    let m = renorm_length(l);
    let shifted = alpha.radd(&C::from_int(m as i64));
    let terms = (0..=l / 2).map(|k| (vec![l - 2 * k], poch(&shifted, l - k - m).scale(&scalar_part(l, k))));
    GegenbauerPoly { degree: l, renormalized: true, poly: Poly::from_terms(&["t"], terms) }
}

/// `u^{l/2} G(v/√u)`: each `t^{l-2k}` becomes `u^k v^{l-2k}`.
pub fn inflate_poly<C: Ring>(g: &GegenbauerPoly<C>) -> Poly<C> {
    let l = g.degree;
    g.poly.remap(&["u", "v"], |e| vec![(l - e[0]) / 2, e[0]])
}

/// The inflated renormalized polynomial `C̃_l^α(u, v)`.
pub fn inflate<C: Ring>(l: u32, alpha: &C) -> Poly<C> {
    inflate_poly(&gegenbauer_renorm(l, alpha))
}

/// Formal `α` as a parameter polynomial.
pub fn alpha_symbol() -> ParamPoly {
    ParamPoly::var(&[ALPHA], ALPHA).unwrap()
}
