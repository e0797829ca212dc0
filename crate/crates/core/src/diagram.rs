//! Loop-integral data model: propagators, routing, external shifts, masses
//! and the Gram data of the external momenta.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactalg::expr::parse_decimal;
use crate::exactalg::{parse_ratfunc, Alg, ExactError, Poly, RatFunc, Symbol};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DiagramError {
    #[error("schema error: {0}")]
    Schema(String),
    #[error("shape error: {0}")]
    Shape(String),
    #[error("symbol error: {0}")]
    Symbol(String),
    #[error("reduction error: {0}")]
    Reduction(String),
    #[error("cannot read {path}: {msg}")]
    Io { path: String, msg: String },
    #[error("expression error in {context}: {source}")]
    Expr { context: String, source: ExactError },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Dimension {
    Symbolic,
    Int(i64),
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Dimension::Symbolic => f.write_str("d"),
            Dimension::Int(n) => write!(f, "{}", n),
        }
    }
}

impl Dimension {
    pub fn parse(s: &str) -> Option<Dimension> {
        let s = s.trim();
        if s == "d" {
            return Some(Dimension::Symbolic);
        }
        s.parse().ok().map(Dimension::Int)
    }
}

/// Scalar entry in a spec document: a number or an expression string.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScalarSpec {
    Int(i64),
    Float(f64),
    Text(String),
}

impl ScalarSpec {
    fn to_text(&self) -> Option<String> {
        match self {
            ScalarSpec::Int(n) => Some(n.to_string()),
            ScalarSpec::Float(x) => {
                if !x.is_finite() {
                    return None;
                }
                Some(format!("{}", x))
            }
            ScalarSpec::Text(s) => Some(s.clone()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DimensionSpec {
    Int(i64),
    Text(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropagatorSpec {
    pub routing: Vec<i64>,
    #[serde(default)]
    pub shift: BTreeMap<String, ScalarSpec>,
    pub mass_sq: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagramSpec {
    pub name: String,
    pub loops: i64,
    pub dimension: DimensionSpec,
    pub externals: Vec<String>,
    #[serde(default)]
    pub gram: BTreeMap<String, ScalarSpec>,
    #[serde(default)]
    pub masses_sq: BTreeMap<String, ScalarSpec>,
    pub propagators: Vec<PropagatorSpec>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Propagator {
    pub routing: Vec<i64>,
    /// Rational coefficient per external momentum.
    pub shift: Vec<BigRational>,
    pub mass_key: String,
    pub mass_sq: RatFunc,
}

impl Propagator {
    pub fn loops_touched(&self) -> Vec<usize> {
        self.routing
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != 0)
            .map(|(a, _)| a)
            .collect()
    }

    pub fn shift_support(&self) -> Vec<usize> {
        self.shift
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(e, _)| e)
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Diagram {
    pub name: String,
    pub loops: usize,
    pub dimension: Dimension,
    pub externals: Vec<String>,
    /// Symmetric; None marks an undeclared product.
    pub gram: Vec<Vec<Option<RatFunc>>>,
    pub masses: BTreeMap<String, RatFunc>,
    pub propagators: Vec<Propagator>,
}

pub fn is_reserved(name: &str) -> bool {
    if name == "eps" || name == "d" || name == "sqrt" {
        return true;
    }
    if let Some(rest) = name.strip_prefix('t') {
        let mut parts = rest.splitn(2, '_');
        let a = parts.next().unwrap_or("");
        let ok_a = !a.is_empty() && a.bytes().all(|c| c.is_ascii_digit());
        return match parts.next() {
            None => ok_a,
            Some(b) => ok_a && !b.is_empty() && b.bytes().all(|c| c.is_ascii_digit()),
        };
    }
    false
}

/// q_{a,perp}^2 (a == b) or q_{a,perp}.q_{b,perp}, loops 0-based.
pub fn transverse_symbol(a: usize, b: usize) -> Symbol {
    let (a, b) = if a <= b { (a, b) } else { (b, a) };
    if a == b {
        Symbol::new(&format!("t{}", a + 1))
    } else {
        Symbol::new(&format!("t{}_{}", a + 1, b + 1))
    }
}

pub fn eps_symbol() -> Symbol {
    Symbol::new("eps")
}

fn scalar_expr(s: &ScalarSpec, context: &str) -> Result<RatFunc, DiagramError> {
    let text = s
        .to_text()
        .ok_or_else(|| DiagramError::Schema(format!("{}: not a finite number", context)))?;
    if let ScalarSpec::Float(_) = s {
        if let Some(r) = parse_decimal(text.trim_start_matches('-')) {
            let r = if text.starts_with('-') { -r } else { r };
            return Ok(RatFunc::from_rational(r));
        }
    }
    let r = parse_ratfunc(&text).map_err(|e| DiagramError::Expr { context: context.to_string(), source: e })?;
    check_symbols(&r, context)?;
    Ok(r)
}

fn check_symbols(r: &RatFunc, context: &str) -> Result<(), DiagramError> {
    for v in r.vars() {
        if is_reserved(v.name()) {
            return Err(DiagramError::Symbol(format!(
                "{}: '{}' is reserved for transverse or deformation variables",
                context,
                v.name()
            )));
        }
    }
    Ok(())
}

fn rational_entry(s: &ScalarSpec, context: &str) -> Result<BigRational, DiagramError> {
    let r = scalar_expr(s, context)?;
    r.as_constant()
        .ok_or_else(|| DiagramError::Schema(format!("{}: shift coefficients must be rational numbers", context)))
}

impl Diagram {
    pub fn from_spec(spec: &DiagramSpec) -> Result<Diagram, DiagramError> {
        if spec.loops < 1 {
            return Err(DiagramError::Schema("loops must be at least 1".into()));
        }
        let loops = spec.loops as usize;
        let dimension = match &spec.dimension {
            DimensionSpec::Int(n) if *n > 0 => Dimension::Int(*n),
            DimensionSpec::Text(t) if t == "d" => Dimension::Symbolic,
            other => return Err(DiagramError::Schema(format!("dimension must be \"d\" or a positive integer, got {:?}", other))),
        };
        if spec.propagators.is_empty() {
            return Err(DiagramError::Schema("propagator list is empty".into()));
        }
        let mut seen = std::collections::BTreeSet::new();
        for e in &spec.externals {
            if !seen.insert(e.clone()) {
                return Err(DiagramError::Schema(format!("external '{}' declared twice", e)));
            }
            if e.is_empty() || !e.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
                return Err(DiagramError::Symbol(format!("external name '{}' is not an identifier", e)));
            }
        }
        let n = spec.externals.len();
        let index = |name: &str| spec.externals.iter().position(|e| e == name);
        let mut gram: Vec<Vec<Option<RatFunc>>> = vec![vec![None; n]; n];
        for (key, val) in &spec.gram {
            let mut parts = key.split('.');
            let (a, b) = match (parts.next(), parts.next(), parts.next()) {
                (Some(a), Some(b), None) => (a.trim(), b.trim()),
                _ => return Err(DiagramError::Schema(format!("gram key '{}' must look like \"p1.p2\"", key))),
            };
            let ia = index(a).ok_or_else(|| DiagramError::Symbol(format!("gram key '{}': unknown external '{}'", key, a)))?;
            let ib = index(b).ok_or_else(|| DiagramError::Symbol(format!("gram key '{}': unknown external '{}'", key, b)))?;
            let v = scalar_expr(val, &format!("gram[{}]", key))?;
            if let Some(prev) = &gram[ia][ib] {
                if prev != &v {
                    return Err(DiagramError::Schema(format!("gram entry {}.{} declared twice with different values", a, b)));
                }
            }
            gram[ia][ib] = Some(v.clone());
            gram[ib][ia] = Some(v);
        }
        let mut masses = BTreeMap::new();
        for (key, val) in &spec.masses_sq {
            if is_reserved(key) {
                return Err(DiagramError::Symbol(format!("mass key '{}' is reserved", key)));
            }
            masses.insert(key.clone(), scalar_expr(val, &format!("masses_sq[{}]", key))?);
        }
        let mut propagators = Vec::with_capacity(spec.propagators.len());
        for (i, p) in spec.propagators.iter().enumerate() {
            if p.routing.len() != loops {
                return Err(DiagramError::Shape(format!(
                    "propagator {}: routing has length {} but loops = {}",
                    i,
                    p.routing.len(),
                    loops
                )));
            }
            if p.routing.iter().all(|c| *c == 0) {
                return Err(DiagramError::Schema(format!("propagator {}: routing is identically zero", i)));
            }
            let mut shift = vec![BigRational::zero(); n];
            for (e, c) in &p.shift {
                let k = index(e).ok_or_else(|| DiagramError::Symbol(format!("propagator {}: unknown external '{}' in shift", i, e)))?;
                shift[k] = rational_entry(c, &format!("propagator {} shift[{}]", i, e))?;
            }
            let mass_sq = masses
                .get(&p.mass_sq)
                .cloned()
                .ok_or_else(|| DiagramError::Symbol(format!("propagator {}: undeclared mass '{}'", i, p.mass_sq)))?;
            propagators.push(Propagator { routing: p.routing.clone(), shift, mass_key: p.mass_sq.clone(), mass_sq });
        }
        Ok(Diagram { name: spec.name.clone(), loops, dimension, externals: spec.externals.clone(), gram, masses, propagators })
    }

    pub fn to_spec(&self) -> DiagramSpec {
        let mut gram = BTreeMap::new();
        for a in 0..self.externals.len() {
            for b in a..self.externals.len() {
                if let Some(v) = &self.gram[a][b] {
                    gram.insert(format!("{}.{}", self.externals[a], self.externals[b]), ScalarSpec::Text(v.to_string()));
                }
            }
        }
        let masses_sq = self.masses.iter().map(|(k, v)| (k.clone(), ScalarSpec::Text(v.to_string()))).collect();
        let propagators = self
            .propagators
            .iter()
            .map(|p| PropagatorSpec {
                routing: p.routing.clone(),
                shift: p
                    .shift
                    .iter()
                    .enumerate()
                    .filter(|(_, c)| !c.is_zero())
                    .map(|(e, c)| (self.externals[e].clone(), ScalarSpec::Text(c.to_string())))
                    .collect(),
                mass_sq: p.mass_key.clone(),
            })
            .collect();
        DiagramSpec {
            name: self.name.clone(),
            loops: self.loops as i64,
            dimension: match self.dimension {
                Dimension::Symbolic => DimensionSpec::Text("d".into()),
                Dimension::Int(n) => DimensionSpec::Int(n),
            },
            externals: self.externals.clone(),
            gram,
            masses_sq,
            propagators,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_spec()).expect("spec serializes")
    }

    pub fn gram_entry(&self, a: usize, b: usize) -> Result<&RatFunc, DiagramError> {
        self.gram[a][b].as_ref().ok_or_else(|| {
            DiagramError::Reduction(format!("undeclared Gram entry {}.{}", self.externals[a], self.externals[b]))
        })
    }

    pub fn gram_matrix(&self, idx: &[usize]) -> Result<Vec<Vec<RatFunc>>, DiagramError> {
        idx.iter()
            .map(|&a| idx.iter().map(|&b| self.gram_entry(a, b).cloned()).collect())
            .collect()
    }

    /// Invariant symbols appearing in Gram entries and masses.
    pub fn invariant_symbols(&self) -> std::collections::BTreeSet<Symbol> {
        let mut s = std::collections::BTreeSet::new();
        for row in &self.gram {
            for v in row.iter().flatten() {
                s.extend(v.vars());
            }
        }
        for v in self.masses.values() {
            s.extend(v.vars());
        }
        s
    }

    /// Dot product of two external combinations.
    pub fn ext_dot(&self, x: &[Alg], y: &[Alg]) -> Result<Alg, DiagramError> {
        let mut acc = Alg::zero();
        for (a, xa) in x.iter().enumerate() {
            if xa.is_zero() {
                continue;
            }
            for (b, yb) in y.iter().enumerate() {
                if yb.is_zero() {
                    continue;
                }
                let g = Alg::from_ratfunc(self.gram_entry(a, b)?.clone());
                acc = &acc + &(&(xa * yb) * &g);
            }
        }
        Ok(acc)
    }

    /// Replace invariant symbols in Gram entries and masses.
    pub fn substitute(&self, map: &BTreeMap<Symbol, Poly>) -> Result<Diagram, DiagramError> {
        let sub = |r: &RatFunc| {
            r.subst_many(map)
                .ok_or_else(|| DiagramError::Reduction(format!("substitution makes a denominator of {} vanish", r)))
        };
        let mut out = self.clone();
        for row in out.gram.iter_mut() {
            for v in row.iter_mut().flatten() {
                *v = sub(v)?;
            }
        }
        for v in out.masses.values_mut() {
            *v = sub(v)?;
        }
        for p in out.propagators.iter_mut() {
            p.mass_sq = sub(&p.mass_sq)?;
        }
        Ok(out)
    }

    pub fn propagator_momentum(&self, i: usize, q: &[MomentumExpr]) -> MomentumExpr {
        let p = &self.propagators[i];
        let mut m = MomentumExpr::external(p.shift.iter().map(|c| Alg::from_rational(c.clone())).collect(), self.loops);
        for (a, c) in p.routing.iter().enumerate() {
            if *c != 0 {
                m = m.add(&q[a].scale(&Alg::from_int(*c)));
            }
        }
        m
    }
}

pub fn parse_diagram(text: &str) -> Result<Diagram, DiagramError> {
    let trimmed = text.trim_start();
    let spec: DiagramSpec = if trimmed.starts_with('{') {
        serde_json::from_str(text).map_err(|e| DiagramError::Schema(e.to_string()))?
    } else {
        toml::from_str(text).map_err(|e| DiagramError::Schema(e.to_string()))?
    };
    Diagram::from_spec(&spec)
}

/// Fixture directory: `PINCHLAB_FIXTURES` if set, else the repository's
/// `fixtures/`.
pub fn fixtures_dir() -> std::path::PathBuf {
    match std::env::var_os("PINCHLAB_FIXTURES") {
        Some(p) => p.into(),
        None => Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures"),
    }
}

pub fn load_fixture(name: &str) -> Result<Diagram, DiagramError> {
    load_diagram(&fixtures_dir().join(name))
}

pub fn load_diagram(path: &Path) -> Result<Diagram, DiagramError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| DiagramError::Io { path: path.display().to_string(), msg: e.to_string() })?;
    parse_diagram(&text)
}

/// A momentum: raw loop momenta, external momenta and transverse parts.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentumExpr {
    pub loop_coeffs: Vec<Alg>,
    pub external_coeffs: Vec<Alg>,
    /// Coefficient of q_{a,perp} per loop.
    pub transverse: Vec<Alg>,
}

impl MomentumExpr {
    pub fn zero(n_ext: usize, loops: usize) -> Self {
        MomentumExpr {
            loop_coeffs: vec![Alg::zero(); loops],
            external_coeffs: vec![Alg::zero(); n_ext],
            transverse: vec![Alg::zero(); loops],
        }
    }

    pub fn external(coeffs: Vec<Alg>, loops: usize) -> Self {
        MomentumExpr { loop_coeffs: vec![Alg::zero(); loops], external_coeffs: coeffs, transverse: vec![Alg::zero(); loops] }
    }

    /// Parallel part given by `coeffs`, plus q_{a,perp} when `with_perp`.
    pub fn parallel(coeffs: Vec<Alg>, loops: usize, a: usize, with_perp: bool) -> Self {
        let mut m = MomentumExpr::external(coeffs, loops);
        if with_perp {
            m.transverse[a] = Alg::one();
        }
        m
    }

    pub fn raw_loop(n_ext: usize, loops: usize, a: usize) -> Self {
        let mut m = MomentumExpr::zero(n_ext, loops);
        m.loop_coeffs[a] = Alg::one();
        m
    }

    pub fn add(&self, o: &MomentumExpr) -> MomentumExpr {
        let z = |x: &[Alg], y: &[Alg]| x.iter().zip(y.iter()).map(|(a, b)| a + b).collect();
        MomentumExpr {
            loop_coeffs: z(&self.loop_coeffs, &o.loop_coeffs),
            external_coeffs: z(&self.external_coeffs, &o.external_coeffs),
            transverse: z(&self.transverse, &o.transverse),
        }
    }

    pub fn scale(&self, c: &Alg) -> MomentumExpr {
        let s = |x: &[Alg]| x.iter().map(|a| a * c).collect();
        MomentumExpr {
            loop_coeffs: s(&self.loop_coeffs),
            external_coeffs: s(&self.external_coeffs),
            transverse: s(&self.transverse),
        }
    }

    pub fn dot(&self, o: &MomentumExpr, diagram: &Diagram) -> Result<Alg, DiagramError> {
        if self.loop_coeffs.iter().chain(o.loop_coeffs.iter()).any(|c| !c.is_zero()) {
            return Err(DiagramError::Reduction(
                "a raw loop momentum has no invariant reduction; decompose it into parallel and transverse parts".into(),
            ));
        }
        let mut acc = diagram.ext_dot(&self.external_coeffs, &o.external_coeffs)?;
        for (a, x) in self.transverse.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (b, y) in o.transverse.iter().enumerate() {
                if y.is_zero() {
                    continue;
                }
                let t = Alg::from_poly(Poly::var(&transverse_symbol(a, b)));
                acc = &acc + &(&(x * y) * &t);
            }
        }
        Ok(acc)
    }
}

/// D_i(q) with all dot products reduced; the result may contain the
/// transverse symbols t_a, t_a_b.
pub fn expand_propagator(diagram: &Diagram, i: usize, q: &[MomentumExpr]) -> Result<Alg, DiagramError> {
    if i >= diagram.propagators.len() {
        return Err(DiagramError::Shape(format!("propagator index {} out of range", i)));
    }
    if q.len() != diagram.loops {
        return Err(DiagramError::Shape(format!("{} loop momenta given, diagram has {} loops", q.len(), diagram.loops)));
    }
    let k = diagram.propagator_momentum(i, q);
    let sq = k.dot(&k, diagram)?;
    Ok(&sq + &Alg::from_ratfunc(diagram.propagators[i].mass_sq.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;

    const BUBBLE: &str = r#"{
        "name": "bubble", "loops": 1, "dimension": "d", "externals": ["p"],
        "gram": {"p.p": "s"}, "masses_sq": {"m0sq": "m0sq", "m1sq": "m1sq"},
        "propagators": [
            {"routing": [1], "shift": {}, "mass_sq": "m0sq"},
            {"routing": [1], "shift": {"p": "1"}, "mass_sq": "m1sq"}
        ]}"#;

    #[test]
    fn bubble_parses() {
        let d = parse_diagram(BUBBLE).unwrap();
        assert_eq!(d.loops, 1);
        assert_eq!(d.propagators.len(), 2);
    }

    #[test]
    fn transverse_expansion() {
        let d = parse_diagram(BUBBLE).unwrap();
        let q = MomentumExpr::parallel(vec![Alg::zero()], 1, 0, true);
        let v = expand_propagator(&d, 0, &[q]).unwrap();
        assert_eq!(v, crate::exactalg::parse_alg("t1 + m0sq").unwrap());
    }

    #[test]
    fn raw_loop_momentum_is_not_reducible() {
        let d = parse_diagram(BUBBLE).unwrap();
        let q = MomentumExpr::raw_loop(1, 1, 0);
        assert!(matches!(expand_propagator(&d, 0, &[q]), Err(DiagramError::Reduction(_))));
    }

    #[test]
    fn reserved_symbols_rejected() {
        let text = BUBBLE.replace("\"p.p\": \"s\"", "\"p.p\": \"t1\"");
        assert!(matches!(parse_diagram(&text), Err(DiagramError::Symbol(_))));
    }

    #[test]
    fn toml_accepted() {
        let text = r#"
name = "bubble"
loops = 1
dimension = 4
externals = ["p"]
[gram]
"p.p" = "s"
[masses_sq]
m = 1
[[propagators]]
routing = [1]
mass_sq = "m"
[[propagators]]
routing = [1]
shift = { p = "1" }
mass_sq = "m"
"#;
        let d = parse_diagram(text).unwrap();
        assert_eq!(d.dimension, Dimension::Int(4));
    }
}
