//! Juhl's conformally covariant differential operators `C̃_{λ,ν}: I(λ) → J(ν)` and the
//! multiplicity data for `O(n+1,1) ⊃ O(n,1)`.
//!
//! For `ν - λ = 2l`, `C̃_{λ,ν} = rest_{x_n=0} ∘ C̃_{2l}^{λ-(n-1)/2}(-Δ_{R^{n-1}}, ∂_n)`.
//! Constant-coefficient operators are stored as their symbols: a polynomial in
//! `d1..dn` where the monomial `d^k` stands for `∂^k`.

use std::sync::Arc;

use serde::ser::SerializeStruct;
use serde::{Deserialize, Serialize, Serializer};

use crate::conformal::{conf_act, coord_vars, monomial_basis, subalgebra_basis};
use crate::error::{Error, Result};
use crate::gegenbauer::inflate;
use crate::poly::{Poly, Ring};
use crate::rational::Rational;
use crate::report::Report;

/// Symbol variable names `d1..dn`.
pub fn symbol_vars(n: usize) -> Arc<Vec<String>> {
    Arc::new((1..=n).map(|k| format!("d{k}")).collect())
}

/// Half the order, `l = (ν - λ)/2`, when `(λ, ν)` lies on the differential locus.
pub fn half_order(lambda: &Rational, nu: &Rational) -> Option<u32> {
    let gap = nu - lambda;
    if !gap.is_even_natural() {
        return None;
    }
    gap.to_i64().and_then(|g| u32::try_from(g / 2).ok())
}

/// Whether `H(λ, ν)` contains a nonzero differential operator: `ν - λ ∈ {0, 2, 4, ...}`.
pub fn diff_locus(lambda: &Rational, nu: &Rational) -> bool {
    half_order(lambda, nu).is_some()
}

/// `(λ, ν) ∈ L_even`: integers with `λ <= ν <= 0` and `λ ≡ ν mod 2`.
pub fn in_l_even(lambda: &Rational, nu: &Rational) -> bool {
    lambda.is_integer() && nu.is_integer() && lambda <= nu && *nu <= 0 && (nu - lambda).is_even_natural()
}

/// `dim H(λ, ν)`: 2 on `L_even`, 1 everywhere else.
pub fn sbo_dim_conf(lambda: &Rational, nu: &Rational) -> u32 {
    if in_l_even(lambda, nu) {
        2
    } else {
        1
    }
}

/// Symbol of `C̃_{2l}^{λ-(n-1)/2}(-Δ', ∂_n)` for any coefficient ring.
pub fn juhl_symbol<C: Ring>(n: usize, lambda: &C, l: u32) -> Result<Poly<C>> {
    if n < 2 {
        return Err(Error::DimensionTooSmall(n));
    }
    let alpha = lambda.rsub(&C::from_rational(&Rational::new(n as i64 - 1, 2)));
    let gegen = inflate(2 * l, &alpha);
    let vars = symbol_vars(n);
    let mut minus_lap = Poly::zero_in(vars.clone());
    for j in 0..n - 1 {
        let mut e = vec![0; n];
        e[j] = 2;
        minus_lap = &minus_lap - &Poly::monomial_in(vars.clone(), e, C::one());
    }
    let mut e = vec![0; n];
    e[n - 1] = 1;
    let dn = Poly::monomial_in(vars, e, C::one());
    gegen.compose(&[minus_lap, dn])
}

/// Applies a constant-coefficient operator given by its symbol, without restriction.
pub fn apply_symbol<C: Ring>(symbol: &Poly<C>, f: &Poly<C>) -> Poly<C> {
    let mut out = Poly::zero_in(f.vars_arc().clone());
    for (orders, c) in symbol.terms() {
        let d = f.diff_multi(orders);
        if !d.is_zero() {
            out = &out + &d.scale(c);
        }
    }
    out
}

/// Applies the symbol and then restricts to `x_n = 0`.
pub fn apply_restricted<C: Ring>(symbol: &Poly<C>, f: &Poly<C>) -> Result<Poly<C>> {
    if f.nvars() != symbol.nvars() {
        return Err(Error::VarMismatch { left: f.vars().to_vec(), right: crate::conformal::coords(symbol.nvars()) });
    }
    let last = f.vars()[f.nvars() - 1].clone();
    apply_symbol(symbol, f).substitute_value(&last, &C::zero())
}

/// The operator `C̃_{λ,ν}` at rational parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct JuhlOp {
    pub n: usize,
    pub lambda: Rational,
    pub nu: Rational,
    /// Symbol in `d1..dn`.
    pub symbol: Poly<Rational>,
}

impl JuhlOp {
    /// Highest total derivative order actually present (`None` for the zero operator).
    pub fn order(&self) -> Option<u32> {
        self.symbol.degree()
    }
}

/// Constructs `C̃_{λ,ν}`; requires `ν - λ ∈ {0, 2, 4, ...}`.
pub fn juhl_operator(n: usize, lambda: &Rational, nu: &Rational) -> Result<JuhlOp> {
    let l = half_order(lambda, nu).ok_or_else(|| Error::NotDifferentialLocus((nu - lambda).to_string()))?;
    Ok(JuhlOp { n, lambda: lambda.clone(), nu: nu.clone(), symbol: juhl_symbol(n, lambda, l)? })
}

/// `C̃_{λ,ν} f`, a polynomial in `x1..x_{n-1}`.
pub fn juhl_apply(op: &JuhlOp, f: &Poly<Rational>) -> Result<Poly<Rational>> {
    apply_restricted(&op.symbol, f)
}

#[derive(Serialize, Deserialize)]
struct TermRepr {
    coeff: Rational,
    orders: Vec<u32>,
}

impl Serialize for JuhlOp {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let terms: Vec<TermRepr> = self.symbol.terms().map(|(e, c)| TermRepr { coeff: c.clone(), orders: e.clone() }).collect();
        let mut s = serializer.serialize_struct("JuhlOp", 5)?;
        s.serialize_field("n", &self.n)?;
        s.serialize_field("lambda", &self.lambda)?;
        s.serialize_field("nu", &self.nu)?;
        s.serialize_field("terms", &terms)?;
        s.serialize_field("restrict", "x_n=0")?;
        s.end()
    }
}

impl<'de> Deserialize<'de> for JuhlOp {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        #[derive(Deserialize)]
        struct Repr {
            n: usize,
            lambda: Rational,
            nu: Rational,
            terms: Vec<TermRepr>,
            restrict: String,
        }
        let r = Repr::deserialize(deserializer)?;
        if r.restrict != "x_n=0" {
            return Err(D::Error::custom(format!("unsupported restriction {:?}", r.restrict)));
        }
        let vars = symbol_vars(r.n);
        let mut symbol = Poly::zero_in(vars.clone());
        for t in r.terms {
            if t.orders.len() != r.n {
                return Err(D::Error::custom("order vector length differs from n"));
            }
            symbol = &symbol + &Poly::monomial_in(vars.clone(), t.orders, t.coeff);
        }
        Ok(JuhlOp { n: r.n, lambda: r.lambda, nu: r.nu, symbol })
    }
}

/// Checks `C̃ ∘ dπ_λ(X) = dπ'_ν(X) ∘ C̃` for all `X` in o(n,1) on monomials of degree `<= max_degree`.
pub fn verify_juhl_equivariance(n: usize, lambda: &Rational, nu: &Rational, max_degree: u32) -> Result<Report> {
    let l = half_order(lambda, nu).ok_or_else(|| Error::NotDifferentialLocus((nu - lambda).to_string()))?;
    verify_equivariance_with(n, lambda, l, max_degree)
}

/// Same check for any coefficient ring, e.g. with `λ` formal; `ν = λ + 2l`.
pub fn verify_equivariance_with<C: Ring>(n: usize, lambda: &C, l: u32, max_degree: u32) -> Result<Report> {
    let sub = subalgebra_basis(n)?;
    let symbol = juhl_symbol(n, lambda, l)?;
    let nu = lambda.radd(&C::from_int(2 * l as i64));
    let vars = coord_vars(n);
    let mut report = Report::default();
    for e in monomial_basis(n, max_degree) {
        let m = Poly::monomial_in(vars.clone(), e, C::one());
        let image = apply_restricted(&symbol, &m)?;
        for &x in &sub {
            let lhs = apply_restricted(&symbol, &conf_act(x, n, lambda, &m)?)?;
            let rhs = conf_act(x, n - 1, &nu, &image)?;
            report.record(lhs == rhs, || format!("{x} on {m}: {lhs} != {rhs}"));
        }
    }
    Ok(report)
}

/// `dim Hom(A_q(i)|_{G'}, A_q'(j))` where it is determined; other cases stay open.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AqHomDim {
    Zero,
    One,
    Unspecified,
}

impl Serialize for AqHomDim {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            AqHomDim::Zero => serializer.serialize_u32(0),
            AqHomDim::One => serializer.serialize_u32(1),
            AqHomDim::Unspecified => serializer.serialize_str("unspecified"),
        }
    }
}

pub fn aq_hom_dim(i: u32, j: u32) -> AqHomDim {
    let same_parity = i % 2 == j % 2;
    match (i >= j, same_parity) {
        (true, true) => AqHomDim::One,
        (false, false) => AqHomDim::Zero,
        _ => AqHomDim::Unspecified,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::ParamPoly;

    fn q(n: i64) -> Rational {
        Rational::from_int(n)
    }

    fn x(n: usize, e: &[u32]) -> Poly<Rational> {
        Poly::monomial_in(coord_vars(n), e.to_vec(), q(1))
    }

    #[test]
    fn locus_and_dims() {
        assert!(diff_locus(&q(1), &q(3)));
        assert!(!diff_locus(&q(3), &q(1)));
        assert!(!diff_locus(&q(0), &q(1)));
        assert_eq!(sbo_dim_conf(&q(0), &q(0)), 2);
        assert_eq!(sbo_dim_conf(&q(-2), &q(0)), 2);
        assert_eq!(sbo_dim_conf(&q(1), &q(1)), 1);
        assert_eq!(sbo_dim_conf(&q(-3), &q(0)), 1);
        assert_eq!(sbo_dim_conf(&Rational::new(-1, 2), &Rational::new(-1, 2)), 1);
    }

    #[test]
    fn aq_cases() {
        assert_eq!(aq_hom_dim(4, 2), AqHomDim::One);
        assert_eq!(aq_hom_dim(1, 2), AqHomDim::Zero);
        assert_eq!(aq_hom_dim(3, 2), AqHomDim::Unspecified);
        assert_eq!(aq_hom_dim(0, 2), AqHomDim::Unspecified);
        assert_eq!(serde_json::to_string(&aq_hom_dim(3, 2)).unwrap(), r#""unspecified""#);
    }

    #[test]
    fn operator_examples() {
        let r = juhl_operator(3, &q(2), &q(2)).unwrap();
        assert_eq!(r.symbol, Poly::one_in(symbol_vars(3)));

        // ν = λ + 2: 2(α+1) ∂_n² + Δ', α = λ - (n-1)/2
        let lam = Rational::new(1, 2);
        let op = juhl_operator(3, &lam, &(&lam + &q(2))).unwrap();
        let alpha = &lam - &q(1);
        let c = &(&alpha + &q(1)) * &q(2);
        let expected = Poly::from_terms(&["d1", "d2", "d3"], vec![(vec![0, 0, 2], c), (vec![2, 0, 0], q(1)), (vec![0, 2, 0], q(1))]);
        assert_eq!(op.symbol, expected);

        let op = juhl_operator(3, &q(1), &q(3)).unwrap();
        let expected = Poly::from_terms(&["d1", "d2", "d3"], vec![(vec![0, 0, 2], q(2)), (vec![2, 0, 0], q(1)), (vec![0, 2, 0], q(1))]);
        assert_eq!(op.symbol, expected);
        assert_eq!(op.order(), Some(2));
    }

    #[test]
    fn locus_violation_rejected() {
        assert!(matches!(juhl_operator(3, &q(1), &q(2)), Err(Error::NotDifferentialLocus(_))));
        assert!(matches!(juhl_operator(3, &q(3), &q(1)), Err(Error::NotDifferentialLocus(_))));
        assert!(verify_juhl_equivariance(2, &q(0), &q(1), 2).is_err());
    }

    #[test]
    fn apply_examples() {
        let id = juhl_operator(2, &q(0), &q(0)).unwrap();
        assert!(juhl_apply(&id, &x(2, &[0, 1])).unwrap().is_zero());
        assert_eq!(juhl_apply(&id, &x(2, &[2, 0])).unwrap(), Poly::monomial_in(coord_vars(1), vec![2], q(1)));

        let op = juhl_operator(3, &q(1), &q(3)).unwrap();
        assert_eq!(juhl_apply(&op, &x(3, &[0, 0, 2])).unwrap(), Poly::constant_in(coord_vars(2), q(4)));
        assert!(juhl_apply(&op, &x(2, &[0, 2])).is_err());
    }

    #[test]
    fn equivariance_examples() {
        assert!(verify_juhl_equivariance(2, &q(3), &q(3), 5).unwrap().passed());
        let r = verify_juhl_equivariance(3, &q(1), &q(3), 6).unwrap();
        assert!(r.passed(), "{:?}", &r.failures[..r.failures.len().min(3)]);
        assert!(verify_juhl_equivariance(3, &q(-2), &q(0), 6).unwrap().passed());
    }

    #[test]
    fn symbolic_lambda_equivariance() {
        let lam = ParamPoly::var(&["lambda"], "lambda").unwrap();
        for l in 0..=2 {
            let r = verify_equivariance_with(3, &lam, l, 5).unwrap();
            assert!(r.passed(), "l={l}: {:?}", &r.failures[..r.failures.len().min(2)]);
        }
    }

    #[test]
    fn wrong_target_is_detected() {
        // same operator, but checked against ν shifted by 2
        let lam = q(1);
        let symbol = juhl_symbol(3, &lam, 1).unwrap();
        let m = x(3, &[1, 0, 2]);
        let lhs = apply_restricted(&symbol, &conf_act(crate::conformal::ConfGenerator::Dilation, 3, &lam, &m).unwrap()).unwrap();
        let rhs = conf_act(crate::conformal::ConfGenerator::Dilation, 2, &q(5), &apply_restricted(&symbol, &m).unwrap()).unwrap();
        assert_ne!(lhs, rhs);
    }

    #[test]
    fn json_round_trip() {
        let op = juhl_operator(2, &Rational::new(1, 2), &Rational::new(5, 2)).unwrap();
        let s = serde_json::to_string(&op).unwrap();
        assert!(s.starts_with(r#"{"n":2,"lambda":"1/2","nu":"5/2","terms":[{"coeff":"#));
        assert!(s.ends_with(r#""restrict":"x_n=0"}"#));
        let back: JuhlOp = serde_json::from_str(&s).unwrap();
        assert_eq!(back, op);
    }
}
