//! Classification tables for symmetric pairs: finite multiplicity (families A–H),
//! uniformly bounded multiplicity (A, B, F1–F5), and the complex simple algebras whose
//! minimal nilpotent orbit misses a real form.
//!
//! The tables are data (`data/pair_tables.json`, overridable via `SBO_TABLE_PATH`);
//! matching is syntactic on normalized descriptors, so isomorphisms beyond the rewrites
//! in [`descriptor`] are not recognized.

pub mod descriptor;

use std::collections::BTreeMap;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
pub use descriptor::{normalize_descriptor, Algebra, LinExpr, Pair, Term};

const BUILTIN: &str = include_str!("../../data/pair_tables.json");

/// Environment variable naming an alternative table file.
pub const TABLE_PATH_ENV: &str = "SBO_TABLE_PATH";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    Trivial,
    Abelian,
    Compact,
    Riemannian,
    Template,
    GroupCompact,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairRecord {
    pub tag: String,
    pub kind: FamilyKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g_prime: Option<String>,
    pub params: Vec<String>,
    pub constraints: Vec<String>,
    pub finite_mult: bool,
    pub bounded_mult: bool,
    pub description: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Op {
    Ge,
    Le,
    Gt,
    Lt,
    Eq,
    Ne,
}

#[derive(Debug, Clone)]
struct Constraint {
    lhs: LinExpr,
    op: Op,
    rhs: LinExpr,
}

impl Constraint {
    fn parse(s: &str) -> Result<Self> {
        for (tok, op) in [(">=", Op::Ge), ("<=", Op::Le), ("!=", Op::Ne), ("==", Op::Eq), (">", Op::Gt), ("<", Op::Lt)] {
            if let Some((l, r)) = s.split_once(tok) {
                return Ok(Constraint { lhs: LinExpr::parse(l)?, op, rhs: LinExpr::parse(r)? });
            }
        }
        Err(Error::Table(format!("bad constraint {s:?}")))
    }

    fn holds(&self, env: &BTreeMap<String, i64>) -> bool {
        let (Ok(l), Ok(r)) = (self.lhs.eval(env), self.rhs.eval(env)) else { return false };
        match self.op {
            Op::Ge => l >= r,
            Op::Le => l <= r,
            Op::Gt => l > r,
            Op::Lt => l < r,
            Op::Eq => l == r,
            Op::Ne => l != r,
        }
    }
}

/// A parametrized algebra (or pair) with side conditions.
#[derive(Debug, Clone)]
struct Template<T> {
    shape: T,
    params: Vec<String>,
    constraints: Vec<Constraint>,
}

trait Shape: Sized + PartialEq {
    fn instantiate_normalized(&self, env: &BTreeMap<String, i64>) -> Result<Self>;
}

impl Shape for Algebra {
    fn instantiate_normalized(&self, env: &BTreeMap<String, i64>) -> Result<Self> {
        Ok(self.instantiate(env)?.normalize())
    }
}

impl Shape for Pair {
    fn instantiate_normalized(&self, env: &BTreeMap<String, i64>) -> Result<Self> {
        Ok(self.instantiate(env)?.normalize())
    }
}

impl<T: Shape> Template<T> {
    /// All parameter values in `0..=bound` satisfying the constraints whose normalized
    /// instance equals `target`.
    fn solutions(&self, target: &T, bound: i64) -> Vec<BTreeMap<String, i64>> {
        let k = self.params.len();
        let mut out = Vec::new();
        let mut vals = vec![0i64; k];
        loop {
            let env: BTreeMap<String, i64> = self.params.iter().cloned().zip(vals.iter().copied()).collect();
            if self.constraints.iter().all(|c| c.holds(&env)) && self.shape.instantiate_normalized(&env).is_ok_and(|s| &s == target) {
                out.push(env);
            }
            let mut i = 0;
            loop {
                if i == k {
                    return out;
                }
                vals[i] += 1;
                if vals[i] <= bound {
                    break;
                }
                vals[i] = 0;
                i += 1;
            }
        }
    }

    fn first_solution(&self, target: &T, bound: i64) -> Option<BTreeMap<String, i64>> {
        // cheap enough at these sizes; keeps one code path
        self.solutions(target, bound).into_iter().next()
    }
}

fn parse_constraints(cs: &[String]) -> Result<Vec<Constraint>> {
    cs.iter().map(|c| Constraint::parse(c)).collect()
}

fn algebra_template(g: &str, constraints: &[String]) -> Result<Template<Algebra>> {
    let shape = Algebra::parse(g)?;
    let mut params = Vec::new();
    shape.params(&mut params);
    Ok(Template { shape, params, constraints: parse_constraints(constraints)? })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFamily {
    tag: String,
    kind: FamilyKind,
    g: Option<String>,
    g_prime: Option<String>,
    #[serde(default)]
    constraints: Vec<String>,
    #[serde(default)]
    bounded: bool,
    description: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAlgebra {
    g: String,
    k: Option<String>,
    #[serde(default)]
    constraints: Vec<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawComplex {
    row: String,
    g: String,
    k: String,
    g_real: String,
    #[serde(default)]
    constraints: Vec<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTables {
    version: String,
    pp: Vec<RawFamily>,
    bb: Vec<String>,
    compact_simple: Vec<RawAlgebra>,
    maximal_compact: Vec<RawAlgebra>,
    complex_forms: Vec<RawComplex>,
}

struct Family {
    record: PairRecord,
    pair: Option<Template<Pair>>,
}

struct ComplexRow {
    row: String,
    g: Template<Algebra>,
    k: Algebra,
    g_real: Algebra,
}

/// Loaded, validated classification tables.
pub struct PairTables {
    pub version: String,
    families: Vec<Family>,
    compact: Vec<Template<Algebra>>,
    maximal_compact: Vec<(Template<Algebra>, Algebra)>,
    complex: Vec<ComplexRow>,
}

/// One direct summand of a matched pair.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComponentMatch {
    pub tag: String,
    pub g: String,
    pub g_prime: String,
    pub params: BTreeMap<String, i64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QueryResult {
    /// Normalized descriptor.
    pub pair: String,
    /// Family tag, or tags joined by `+` for a direct sum; `None` without a match.
    pub matched: Option<String>,
    pub components: Vec<ComponentMatch>,
    pub finite_mult: bool,
    pub bounded_mult: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComplexFormInstance {
    pub params: BTreeMap<String, i64>,
    pub g: String,
    pub k: String,
    pub g_real: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComplexFormRecord {
    pub row: String,
    pub instances: Vec<ComplexFormInstance>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyFilter {
    Pp,
    Bb,
    All,
}

impl FromStr for FamilyFilter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pp" => Ok(FamilyFilter::Pp),
            "bb" => Ok(FamilyFilter::Bb),
            "all" => Ok(FamilyFilter::All),
            _ => Err(Error::InvalidArgument(format!("filter must be pp, bb or all, got {s:?}"))),
        }
    }
}

const MAX_SUMMANDS: usize = 8;
const NO_MATCH: &str = "no match under implemented normalizations";

impl PairTables {
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: RawTables = serde_json::from_str(text).map_err(|e| Error::Table(e.to_string()))?;
        let mut families = Vec::new();
        for f in raw.pp {
            if families.iter().any(|x: &Family| x.record.tag == f.tag) {
                return Err(Error::Table(format!("duplicate family tag {}", f.tag)));
            }
            let pair = match (f.kind, &f.g, &f.g_prime) {
                (FamilyKind::Template | FamilyKind::Abelian, Some(g), Some(h)) => {
                    let shape = Pair::parse(&format!("({g}, {h})"))?;
                    let params = shape.params();
                    Some(Template { shape, params, constraints: parse_constraints(&f.constraints)? })
                }
                (FamilyKind::Template | FamilyKind::Abelian, _, _) => {
                    return Err(Error::Table(format!("family {} needs g and g_prime", f.tag)));
                }
                _ => None,
            };
            let bounded = raw.bb.contains(&f.tag);
            if f.bounded != bounded && f.kind == FamilyKind::Template {
                return Err(Error::Table(format!("family {}: bounded flag disagrees with the bb list", f.tag)));
            }
            families.push(Family {
                record: PairRecord {
                    tag: f.tag,
                    kind: f.kind,
                    g: f.g,
                    g_prime: f.g_prime,
                    params: pair.as_ref().map(|p| p.params.clone()).unwrap_or_default(),
                    constraints: f.constraints,
                    finite_mult: true,
                    bounded_mult: bounded,
                    description: f.description,
                },
                pair,
            });
        }
        if let Some(t) = raw.bb.iter().find(|t| !families.iter().any(|f| &f.record.tag == *t)) {
            return Err(Error::Table(format!("bb tag {t} is not a pp family")));
        }
        families.sort_by(|a, b| a.record.tag.cmp(&b.record.tag));
        let compact = raw.compact_simple.iter().map(|c| algebra_template(&c.g, &c.constraints)).collect::<Result<_>>()?;
        let maximal_compact = raw
            .maximal_compact
            .iter()
            .map(|c| {
                let k = c.k.as_deref().ok_or_else(|| Error::Table(format!("{} lacks k", c.g)))?;
                Ok((algebra_template(&c.g, &c.constraints)?, Algebra::parse(k)?))
            })
            .collect::<Result<_>>()?;
        let complex = raw
            .complex_forms
            .iter()
            .map(|c| {
                Ok(ComplexRow {
                    row: c.row.clone(),
                    g: algebra_template(&c.g, &c.constraints)?,
                    k: Algebra::parse(&c.k)?,
                    g_real: Algebra::parse(&c.g_real)?,
                })
            })
            .collect::<Result<_>>()?;
        Ok(PairTables { version: raw.version, families, compact, maximal_compact, complex })
    }

    pub fn builtin() -> &'static PairTables {
        static TABLES: OnceLock<PairTables> = OnceLock::new();
        TABLES.get_or_init(|| PairTables::from_json(BUILTIN).expect("bundled table is valid"))
    }

    /// Loads the file named by `SBO_TABLE_PATH`, falling back to the bundled table.
    pub fn from_env() -> Result<PairTables> {
        match std::env::var_os(TABLE_PATH_ENV) {
            Some(path) => {
                let text = std::fs::read_to_string(&path).map_err(|e| Error::Table(format!("{}: {e}", path.to_string_lossy())))?;
                PairTables::from_json(&text)
            }
            None => PairTables::from_json(BUILTIN),
        }
    }

    pub fn list_families(&self, filter: FamilyFilter) -> Vec<PairRecord> {
        self.families
            .iter()
            .filter(|f| filter != FamilyFilter::Bb || f.record.bounded_mult)
            .map(|f| f.record.clone())
            .collect()
    }

    fn is_compact_simple(&self, t: &Term, bound: i64) -> bool {
        let a = Algebra(vec![t.clone()]);
        self.compact.iter().any(|c| c.first_solution(&a, bound).is_some())
    }

    /// Tries one family on a candidate summand `(s, t)` of normalized algebras.
    fn match_family(&self, fam: &Family, s: &Algebra, t: &Algebra, bound: i64) -> Option<BTreeMap<String, i64>> {
        let none = BTreeMap::new;
        match fam.record.kind {
            FamilyKind::Trivial => (!s.0.is_empty() && s == t).then(none),
            // a symmetric subalgebra of a compact simple algebra is proper and nonzero
            FamilyKind::Compact => (s.0.len() == 1
                && !t.0.is_empty()
                && s != t
                && !t.0.iter().any(|x| matches!(x, Term::Diag(_)))
                && self.is_compact_simple(&s.0[0], bound))
            .then(none),
            FamilyKind::Riemannian => {
                if s.0.len() != 1 {
                    return None;
                }
                self.maximal_compact.iter().find_map(|(g, k)| {
                    g.solutions(s, bound).into_iter().find(|env| k.instantiate_normalized(env).is_ok_and(|k| &k == t))
                })
            }
            FamilyKind::GroupCompact => match (s.0.as_slice(), t.0.as_slice()) {
                ([a, b], [Term::Diag(d)]) if a == b && **d == *a && self.is_compact_simple(a, bound) => Some(none()),
                _ => None,
            },
            FamilyKind::Template | FamilyKind::Abelian => {
                let target = Pair { g: s.clone(), h: t.clone() };
                fam.pair.as_ref()?.first_solution(&target, bound)
            }
        }
    }

    /// Splits `(g, h)` into summands each matching one of `allowed`.
    fn decompose(&self, g: &[Term], h: &[Term], allowed: &[&Family], bound: i64) -> Option<Vec<ComponentMatch>> {
        if g.is_empty() {
            return h.is_empty().then(Vec::new);
        }
        let rest_g = &g[1..];
        for gmask in 0u32..(1 << rest_g.len()) {
            let mut s = vec![g[0].clone()];
            s.extend(rest_g.iter().enumerate().filter(|(i, _)| gmask >> i & 1 == 1).map(|(_, t)| t.clone()));
            let g_left: Vec<Term> = rest_g.iter().enumerate().filter(|(i, _)| gmask >> i & 1 == 0).map(|(_, t)| t.clone()).collect();
            for hmask in 0u32..(1 << h.len()) {
                let t: Vec<Term> = h.iter().enumerate().filter(|(i, _)| hmask >> i & 1 == 1).map(|(_, t)| t.clone()).collect();
                let h_left: Vec<Term> = h.iter().enumerate().filter(|(i, _)| hmask >> i & 1 == 0).map(|(_, t)| t.clone()).collect();
                let (sa, ta) = (Algebra(s.clone()), Algebra(t));
                for fam in allowed {
                    if let Some(params) = self.match_family(fam, &sa, &ta, bound) {
                        if let Some(mut rest) = self.decompose(&g_left, &h_left, allowed, bound) {
                            rest.insert(0, ComponentMatch { tag: fam.record.tag.clone(), g: sa.to_string(), g_prime: ta.to_string(), params });
                            return Some(rest);
                        }
                    }
                }
            }
        }
        None
    }

    fn parse_query(descriptor: &str, bindings: &BTreeMap<String, i64>) -> Result<Pair> {
        let pair = Pair::parse(descriptor)?.instantiate(bindings)?.normalize();
        if pair.g.0.len() > MAX_SUMMANDS || pair.h.0.len() > MAX_SUMMANDS {
            return Err(Error::Descriptor(format!("more than {MAX_SUMMANDS} summands")));
        }
        Ok(pair)
    }

    fn run(&self, pair: &Pair, bounded_only: bool) -> Option<Vec<ComponentMatch>> {
        let allowed: Vec<&Family> = self.families.iter().filter(|f| !bounded_only || f.record.bounded_mult).collect();
        let bound = pair.g.max_int().max(pair.h.max_int()) + 2;
        self.decompose(&pair.g.0, &pair.h.0, &allowed, bound)
    }

    /// Full query: finite-multiplicity match with components, and the bounded flag.
    pub fn query(&self, descriptor: &str, bindings: &BTreeMap<String, i64>) -> Result<QueryResult> {
        let pair = Self::parse_query(descriptor, bindings)?;
        let components = self.run(&pair, false);
        let bounded = self.run(&pair, true).is_some();
        let matched = components.as_ref().map(|c| c.iter().map(|m| m.tag.as_str()).collect::<Vec<_>>().join("+"));
        Ok(QueryResult {
            pair: pair.to_string(),
            finite_mult: components.is_some(),
            bounded_mult: bounded,
            note: components.is_none().then(|| NO_MATCH.to_string()),
            matched,
            components: components.unwrap_or_default(),
        })
    }

    pub fn pp_query(&self, descriptor: &str) -> Result<(Option<String>, bool)> {
        let r = self.query(descriptor, &BTreeMap::new())?;
        Ok((r.matched, r.finite_mult))
    }

    pub fn bb_query(&self, descriptor: &str) -> Result<bool> {
        let pair = Self::parse_query(descriptor, &BTreeMap::new())?;
        Ok(self.run(&pair, true).is_some())
    }

    pub fn complex_form_lookup(&self, g: &str) -> Result<Option<ComplexFormRecord>> {
        let target = Algebra::parse(g)?.normalize();
        let bound = target.max_int() + 2;
        for row in &self.complex {
            let sols = row.g.solutions(&target, bound);
            if sols.is_empty() {
                continue;
            }
            let instances = sols
                .into_iter()
                .map(|env| {
                    Ok(ComplexFormInstance {
                        g: row.g.shape.instantiate(&env)?.to_string(),
                        k: row.k.instantiate(&env)?.to_string(),
                        g_real: row.g_real.instantiate(&env)?.to_string(),
                        params: env,
                    })
                })
                .collect::<Result<_>>()?;
            return Ok(Some(ComplexFormRecord { row: row.row.clone(), instances }));
        }
        Ok(None)
    }
}

pub fn list_families(filter: FamilyFilter) -> Vec<PairRecord> {
    PairTables::builtin().list_families(filter)
}

pub fn pp_query(descriptor: &str) -> Result<(Option<String>, bool)> {
    PairTables::builtin().pp_query(descriptor)
}

pub fn bb_query(descriptor: &str) -> Result<bool> {
    PairTables::builtin().bb_query(descriptor)
}

pub fn complex_form_lookup(g: &str) -> Result<Option<ComplexFormRecord>> {
    PairTables::builtin().complex_form_lookup(g)
}
