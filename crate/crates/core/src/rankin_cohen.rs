//! Rankin–Cohen bidifferential operators and the classification of
//! symmetry breaking operators `π_{λ₁} ⊗ π_{λ₂} → π_{λ₃}`.
//!
//! A [`BiDiffOp`] of order `a` is `Σ_l c_l ∂_{z₁}^{a-l} ∂_{z₂}^l` followed by restriction
//! to the diagonal `z₁ = z₂ = z`. The Rankin–Cohen coefficients are
//!
//! ```text
//! c_l = (-1)^l / (l! (a-l)!) · (λ₁+a-l)_l · (λ₂+l)_{a-l}
//! ```
//!
//! with `(x)_k` the rising factorial, which is the Gamma-ratio form written as a
//! polynomial in `(λ₁, λ₂)`. It is therefore defined (and exact) at every parameter.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize};

use crate::error::{Error, Result};
use crate::linalg::RationalMatrix;
use crate::poly::{poch, ParamPoly, Poly, Ring};
use crate::rational::Rational;
use crate::report::Report;
use crate::sl2::{act, tensor_act, Sl2Element};

/// Names of the formal parameters used by symbolic Rankin–Cohen operators.
pub const PARAMS: [&str; 2] = ["l1", "l2"];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BiDiffOp<C> {
    pub a: u32,
    /// `coeffs[l]` multiplies `∂_{z₁}^{a-l} ∂_{z₂}^l`.
    pub coeffs: Vec<C>,
}

impl<'de, C: Ring + Deserialize<'de>> Deserialize<'de> for BiDiffOp<C> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr<C> {
            a: u32,
            coeffs: Vec<C>,
        }
        let r = Repr::<C>::deserialize(deserializer)?;
        if r.coeffs.len() != r.a as usize + 1 {
            return Err(D::Error::custom(format!("order a = {} needs {} coefficients, got {}", r.a, r.a + 1, r.coeffs.len())));
        }
        Ok(BiDiffOp { a: r.a, coeffs: r.coeffs })
    }
}

impl<C: Ring> BiDiffOp<C> {
    pub fn new(coeffs: Vec<C>) -> Self {
        assert!(!coeffs.is_empty(), "a bidifferential operator needs at least one coefficient");
        BiDiffOp { a: coeffs.len() as u32 - 1, coeffs }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Ring::is_zero)
    }

    /// `Σ_l c_l f₁^{(a-l)} f₂^{(l)}` for one-variable polynomials.
    pub fn apply_pair(&self, f1: &Poly<C>, f2: &Poly<C>) -> Result<Poly<C>> {
        for f in [f1, f2] {
            if f.nvars() != 1 {
                return Err(Error::VarMismatch { left: f.vars().to_vec(), right: vec!["z".into()] });
            }
        }
        let mut out = Poly::zero(&["z"]);
        for (l, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let l = l as u32;
            let t = f1.diff_index(0, self.a - l).checked_mul(&f2.diff_index(0, l))?;
            out = out.checked_add(&t.scale(c))?;
        }
        Ok(out)
    }

    /// Applies the operator to `F(z₁, z₂)` and restricts to the diagonal.
    pub fn apply(&self, f: &Poly<C>) -> Result<Poly<C>> {
        if f.nvars() != 2 {
            return Err(Error::VarMismatch { left: f.vars().to_vec(), right: vec!["z1".into(), "z2".into()] });
        }
        let mut acc = Poly::zero_in(f.vars_arc().clone());
        for (l, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let l = l as u32;
            acc = &acc + &f.diff_multi(&[self.a - l, l]).scale(c);
        }
        Ok(acc.remap(&["z"], |e| vec![e[0] + e[1]]))
    }

    /// `self ∘ (∂_{z₁}^k ⊗ id)`, flattened.
    pub fn after_left_derivative(&self, k: u32) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.extend((0..k).map(|_| C::zero()));
        BiDiffOp::new(coeffs)
    }

    /// `self ∘ (id ⊗ ∂_{z₂}^k)`, flattened.
    pub fn after_right_derivative(&self, k: u32) -> Self {
        let mut coeffs: Vec<C> = (0..k).map(|_| C::zero()).collect();
        coeffs.extend(self.coeffs.iter().cloned());
        BiDiffOp::new(coeffs)
    }
}

impl BiDiffOp<ParamPoly> {
    /// Coefficientwise partial derivative in a formal parameter.
    pub fn diff_param(&self, name: &str) -> Result<Self> {
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| if c.nvars() == 0 { Ok(<ParamPoly as Ring>::zero()) } else { c.diff(name, 1) })
            .collect::<Result<Vec<_>>>()?;
        Ok(BiDiffOp { a: self.a, coeffs })
    }

    pub fn evaluate(&self, values: &[(&str, Rational)]) -> Result<BiDiffOp<Rational>> {
        let coeffs = self.coeffs.iter().map(|c| c.evaluate_named(values)).collect::<Result<Vec<_>>>()?;
        Ok(BiDiffOp { a: self.a, coeffs })
    }
}

impl BiDiffOp<Rational> {
    pub fn to_param(&self) -> BiDiffOp<ParamPoly> {
        BiDiffOp { a: self.a, coeffs: self.coeffs.iter().map(|c| ParamPoly::scalar(c.clone())).collect() }
    }
}

/// The Rankin–Cohen operator `RC^{λ₁+λ₂+2a}_{λ₁,λ₂}`.
pub fn rc_operator<C: Ring>(l1: &C, l2: &C, a: u32) -> BiDiffOp<C> {
    let mut fact = vec![Rational::one()];
    for k in 1..=a as i64 {
        let next = &fact[k as usize - 1] * &Rational::from_int(k);
        fact.push(next);
    }
    let coeffs = (0..=a)
        .map(|l| {
            let sign = if l % 2 == 0 { Rational::one() } else { Rational::from_int(-1) };
            let scalar = &sign / &(&fact[l as usize] * &fact[(a - l) as usize]);
            let p1 = poch(&l1.radd(&C::from_int((a - l) as i64)), l);
            let p2 = poch(&l2.radd(&C::from_int(l as i64)), a - l);
            p1.rmul(&p2).scale(&scalar)
        })
        .collect();
    BiDiffOp { a, coeffs }
}

/// `RC` with formal `(λ₁, λ₂)` named by [`PARAMS`].
pub fn rc_symbolic(a: u32) -> BiDiffOp<ParamPoly> {
    let l1 = ParamPoly::var(&PARAMS, PARAMS[0]).unwrap();
    let l2 = ParamPoly::var(&PARAMS, PARAMS[1]).unwrap();
    rc_operator(&l1, &l2, a)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OmegaClass {
    NotInOmega,
    OmegaGeneric,
    OmegaSingular,
}

/// The Rankin–Cohen order `a = (λ₃ - λ₁ - λ₂)/2` when the parameters lie in Ω.
pub fn rc_order(l1: &Rational, l2: &Rational, l3: &Rational) -> Option<u32> {
    let gap = &(l3 - l1) - l2;
    if !gap.is_even_natural() {
        return None;
    }
    gap.to_i64().and_then(|g| u32::try_from(g / 2).ok())
}

pub fn omega_classify(l1: &Rational, l2: &Rational, l3: &Rational) -> OmegaClass {
    if rc_order(l1, l2, l3).is_none() {
        return OmegaClass::NotInOmega;
    }
    let integral = l1.is_integer() && l2.is_integer() && l3.is_integer();
    let lower = l3 - &(l1 - l2).abs();
    let sum = &(l1 + l2) + l3;
    if integral && lower >= 2 && sum <= 2 {
        OmegaClass::OmegaSingular
    } else {
        OmegaClass::OmegaGeneric
    }
}

/// Dimension of the space of symmetry breaking operators.
pub fn sbo_dim_sl2(l1: &Rational, l2: &Rational, l3: &Rational) -> u32 {
    match omega_classify(l1, l2, l3) {
        OmegaClass::NotInOmega => 0,
        OmegaClass::OmegaGeneric => 1,
        OmegaClass::OmegaSingular => 2,
    }
}

fn require_singular(l1: &Rational, l2: &Rational, l3: &Rational) -> Result<u32> {
    if omega_classify(l1, l2, l3) != OmegaClass::OmegaSingular {
        return Err(Error::NotSingular { l1: l1.to_string(), l2: l2.to_string(), l3: l3.to_string() });
    }
    Ok(rc_order(l1, l2, l3).expect("singular points lie in Omega"))
}

/// The composed basis `RC_{2-λ₁,λ₂} ∘ (∂_{z₁}^{1-λ₁} ⊗ id)` and its mirror, flattened.
///
/// On the singular set `λ₁, λ₂ <= 0`, so both derivative orders are positive and the
/// inner Rankin–Cohen orders `a + λᵢ - 1` are non-negative.
pub fn singular_basis(l1: &Rational, l2: &Rational, l3: &Rational) -> Result<[BiDiffOp<Rational>; 2]> {
    let a = require_singular(l1, l2, l3)? as i64;
    let (i1, i2) = match (l1.to_i64(), l2.to_i64()) {
        (Some(x), Some(y)) if x <= 0 && y <= 0 && a + x >= 1 && a + y >= 1 => (x, y),
        _ => {
            return Err(Error::InvalidArgument(format!(
                "singular point ({l1}, {l2}, {l3}) outside the range of the composed basis"
            )))
        }
    };
    let two = Rational::from_int(2);
    let first = rc_operator(&(&two - l1), l2, (a + i1 - 1) as u32).after_left_derivative((1 - i1) as u32);
    let second = rc_operator(l1, &(&two - l2), (a + i2 - 1) as u32).after_right_derivative((1 - i2) as u32);
    Ok([first, second])
}

/// `{∂RC/∂λ₁, ∂RC/∂λ₂}` evaluated at a singular point.
pub fn derivative_basis(l1: &Rational, l2: &Rational, l3: &Rational) -> Result<[BiDiffOp<Rational>; 2]> {
    let a = require_singular(l1, l2, l3)?;
    let rc = rc_symbolic(a);
    let at = [(PARAMS[0], l1.clone()), (PARAMS[1], l2.clone())];
    Ok([rc.diff_param(PARAMS[0])?.evaluate(&at)?, rc.diff_param(PARAMS[1])?.evaluate(&at)?])
}

/// Exact check of `op ∘ (dπ_{λ₁} ⊗ dπ_{λ₂})(X) = dπ_{λ₃}(X) ∘ op` on all `z₁^i z₂^j`, `i + j <= max_degree`.
pub fn verify_intertwining<C: Ring>(op: &BiDiffOp<C>, l1: &C, l2: &C, l3: &C, max_degree: u32) -> Result<Report> {
    let gap = l3.rsub(l1).rsub(l2);
    if gap != C::from_int(2 * op.a as i64) {
        return Err(Error::OrderMismatch { a: op.a, expected: format!("({gap})/2") });
    }
    let names = ["e", "h", "f"];
    let mut report = Report::default();
    for (x, name) in Sl2Element::basis().iter().zip(names) {
        for d in 0..=max_degree {
            for i in 0..=d {
                let m = Poly::<C>::monomial(&["z1", "z2"], &[i, d - i], C::one());
                let lhs = op.apply(&tensor_act(x, l1, l2, &m)?)?;
                let rhs = act(x, l3, &op.apply(&m)?)?;
                report.record(lhs == rhs, || format!("{name} on z1^{i} z2^{}: {lhs} != {rhs}", d - i));
            }
        }
    }
    Ok(report)
}

/// Rank of a family of operators of a common order, as coefficient vectors.
pub fn operator_rank(ops: &[BiDiffOp<Rational>]) -> usize {
    let width = ops.iter().map(|o| o.coeffs.len()).max().unwrap_or(0);
    let rows = ops
        .iter()
        .map(|o| {
            let mut row = o.coeffs.clone();
            row.resize(width, Rational::zero());
            row
        })
        .collect();
    RationalMatrix::from_rows(rows).rank()
}

/// One summand `Pol_{m+n-2a}` of `Pol_m ⊗ Pol_n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CgComponent {
    pub a: u32,
    pub projector: BiDiffOp<Rational>,
    pub target_dim: u32,
}

/// Clebsch–Gordan projectors `RC_{-m,-n}` of orders `a = 0..=min(m, n)`.
pub fn cg_decompose(m: u32, n: u32) -> Vec<CgComponent> {
    let (lm, ln) = (Rational::from_int(-(m as i64)), Rational::from_int(-(n as i64)));
    (0..=m.min(n))
        .map(|a| CgComponent { a, projector: rc_operator(&lm, &ln, a), target_dim: m + n - 2 * a + 1 })
        .collect()
}

/// Image ranks of the projectors on `Pol_m ⊗ Pol_n`, and the rank of their joint map.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CgRanks {
    pub image_ranks: Vec<usize>,
    pub joint_rank: usize,
}

pub fn cg_ranks(m: u32, n: u32) -> CgRanks {
    let comps = cg_decompose(m, n);
    let basis: Vec<Poly<Rational>> = (0..=m)
        .flat_map(|i| (0..=n).map(move |j| Poly::monomial(&["z1", "z2"], &[i, j], Rational::one())))
        .collect();
    let mut blocks: Vec<Vec<Vec<Rational>>> = Vec::new();
    for c in &comps {
        let top = m + n - 2 * c.a;
        let exps: Vec<Vec<u32>> = (0..=top).map(|k| vec![k]).collect();
        let rows: Vec<Vec<Rational>> = basis
            .iter()
            .map(|b| c.projector.apply(b).expect("two-variable input").coefficient_vector(&exps))
            .collect();
        blocks.push(rows);
    }
    let image_ranks = blocks.iter().map(|rows| RationalMatrix::from_rows(rows.clone()).rank()).collect();
    let joint: Vec<Vec<Rational>> = (0..basis.len()).map(|r| blocks.iter().flat_map(|b| b[r].iter().cloned()).collect()).collect();
    CgRanks { image_ranks, joint_rank: RationalMatrix::from_rows(joint).rank() }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> Rational {
        Rational::from_int(n)
    }

    fn pvar(name: &str) -> ParamPoly {
        ParamPoly::var(&PARAMS, name).unwrap()
    }

    #[test]
    fn classify_examples() {
        assert_eq!(omega_classify(&q(2), &q(2), &q(5)), OmegaClass::NotInOmega);
        assert_eq!(omega_classify(&q(0), &q(0), &q(2)), OmegaClass::OmegaSingular);
        assert_eq!(omega_classify(&q(1), &q(1), &q(2)), OmegaClass::OmegaGeneric);
        assert_eq!(omega_classify(&q(1), &q(1), &q(0)), OmegaClass::NotInOmega);
        let half = Rational::new(1, 2);
        assert_eq!(omega_classify(&half, &half, &q(1)), OmegaClass::OmegaGeneric);
        assert_eq!(omega_classify(&half, &q(0), &q(1)), OmegaClass::NotInOmega);
    }

    #[test]
    fn dim_examples() {
        assert_eq!(sbo_dim_sl2(&q(2), &q(2), &q(4)), 1);
        assert_eq!(sbo_dim_sl2(&q(0), &q(0), &q(2)), 2);
        assert_eq!(sbo_dim_sl2(&q(2), &q(2), &q(5)), 0);
    }

    #[test]
    fn rc_low_orders() {
        let rc0 = rc_symbolic(0);
        assert_eq!(rc0.coeffs, vec![ParamPoly::one()]);
        let rc1 = rc_symbolic(1);
        assert_eq!(rc1.coeffs, vec![pvar("l2"), pvar("l1").neg()]);
        assert!(rc_operator(&q(0), &q(0), 1).is_zero());
    }

    #[test]
    fn rc_apply_examples() {
        let op = rc_symbolic(1);
        let z = Poly::<ParamPoly>::monomial(&["z"], &[1], ParamPoly::one());
        let one = Poly::<ParamPoly>::constant(&["z"], ParamPoly::one());
        assert_eq!(op.apply_pair(&z, &one).unwrap(), Poly::constant(&["z"], pvar("l2")));
        assert_eq!(op.apply_pair(&z, &z).unwrap(), z.scale(&(&pvar("l2") - &pvar("l1"))));
        let zero = Poly::<ParamPoly>::zero(&["z"]);
        assert!(rc_symbolic(3).apply_pair(&zero, &z).unwrap().is_zero());
    }

    #[test]
    fn swap_symmetry() {
        for a in 0..=6u32 {
            let rc = rc_symbolic(a);
            let swapped = rc_operator(&pvar("l2"), &pvar("l1"), a);
            let sign = if a % 2 == 0 { q(1) } else { q(-1) };
            for l in 0..=a as usize {
                assert_eq!(swapped.coeffs[a as usize - l], rc.coeffs[l].scale(&sign), "a={a} l={l}");
            }
        }
    }

    #[test]
    fn intertwining_generic_and_trivial() {
        let op = rc_symbolic(1);
        let (l1, l2) = (pvar("l1"), pvar("l2"));
        let l3 = &(&l1 + &l2) + &ParamPoly::from_int(2);
        assert!(verify_intertwining(&op, &l1, &l2, &l3, 5).unwrap().passed());

        let mult = BiDiffOp::new(vec![q(1)]);
        assert!(verify_intertwining(&mult, &q(3), &q(-1), &q(2), 5).unwrap().passed());

        let zero = BiDiffOp::new(vec![q(0), q(0)]);
        assert!(verify_intertwining(&zero, &q(3), &q(-1), &q(4), 3).unwrap().passed());
    }

    #[test]
    fn intertwining_rejects_wrong_target() {
        let op = rc_operator(&q(2), &q(3), 1);
        assert!(matches!(verify_intertwining(&op, &q(2), &q(3), &q(6), 2), Err(Error::OrderMismatch { .. })));
    }

    #[test]
    fn non_intertwiner_is_reported() {
        let bogus = BiDiffOp::new(vec![q(1), q(1)]);
        let r = verify_intertwining(&bogus, &q(2), &q(3), &q(7), 3).unwrap();
        assert!(!r.passed());
        assert!(r.checked > r.failures.len());
    }

    #[test]
    fn singular_and_derivative_bases_at_origin() {
        let [d1, d2] = derivative_basis(&q(0), &q(0), &q(2)).unwrap();
        assert_eq!(d1.coeffs, vec![q(0), q(-1)]);
        assert_eq!(d2.coeffs, vec![q(1), q(0)]);

        let [s1, s2] = singular_basis(&q(0), &q(0), &q(2)).unwrap();
        assert_eq!(s1.a, 1);
        assert!(!s1.is_zero() && !s2.is_zero());
        assert_eq!(operator_rank(&[s1.clone(), s2.clone()]), 2);
        assert_eq!(operator_rank(&[s1, s2, d1, d2]), 2);
    }

    #[test]
    fn bases_require_singular_point() {
        assert!(matches!(singular_basis(&q(1), &q(1), &q(2)), Err(Error::NotSingular { .. })));
        assert!(matches!(derivative_basis(&q(2), &q(2), &q(5)), Err(Error::NotSingular { .. })));
    }

    #[test]
    fn cg_examples() {
        let dims: Vec<u32> = cg_decompose(1, 1).iter().map(|c| c.target_dim).collect();
        assert_eq!(dims, vec![3, 1]);
        let dims: Vec<u32> = cg_decompose(2, 1).iter().map(|c| c.target_dim).collect();
        assert_eq!(dims, vec![4, 2]);
        let single = cg_decompose(4, 0);
        assert_eq!(single.len(), 1);
        assert_eq!(single[0].projector.coeffs, vec![q(1)]);
        let r = cg_ranks(2, 1);
        assert_eq!(r.image_ranks, vec![4, 2]);
        assert_eq!(r.joint_rank, 6);
    }

    #[test]
    fn json_shape() {
        let op = rc_operator(&q(2), &q(3), 1);
        let s = serde_json::to_string(&op).unwrap();
        assert_eq!(s, r#"{"a":1,"coeffs":["3","-2"]}"#);
        let back: BiDiffOp<Rational> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, op);
        assert!(serde_json::from_str::<BiDiffOp<Rational>>(r#"{"a":2,"coeffs":["1"]}"#).is_err());
    }
}
