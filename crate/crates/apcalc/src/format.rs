//! JSON and CSV file formats.
//!
//! Numbers are written as JSON numbers or as strings holding integers,
//! fractions `p/q` or decimals. In exact mode decimals are read as the
//! rational they spell, so `0.1` is `1/10`.

use std::path::Path;
use std::sync::Arc;

use apcalc_core::calculus::FormalSum;
use apcalc_core::freq::parse_rational;
use apcalc_core::hypoell::PolySymbol;
use apcalc_core::symexpr::{two_pi_bracket_sq, ClassParams};
use apcalc_core::{Basis, Coeff, Complex64, Exact, Frequency, MultiIndex, Rational, SymbolExpr, TrigPoly};
use num_traits::{ToPrimitive, Zero};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Num {
    Int(i64),
    Float(f64),
    Text(String),
}

impl Num {
    pub fn rational(&self) -> Result<Rational, String> {
        match self {
            Num::Int(v) => Ok(Rational::from_integer((*v).into())),
            Num::Float(v) if v.is_finite() => parse_rational(&format!("{v}")).ok_or_else(|| format!("bad number {v}")),
            Num::Float(v) => Err(format!("non-finite number {v}")),
            Num::Text(t) => parse_rational(t).ok_or_else(|| format!("bad number {t:?}")),
        }
    }

    pub fn float(&self) -> Result<f64, String> {
        match self {
            Num::Int(v) => Ok(*v as f64),
            Num::Float(v) => Ok(*v),
            Num::Text(t) => match parse_rational(t) {
                Some(q) => q.to_f64().ok_or_else(|| format!("bad number {t:?}")),
                None => t.trim().parse().map_err(|_| format!("bad number {t:?}")),
            },
        }
    }

    fn from_rational(q: &Rational) -> Num {
        if q.is_integer() {
            if let Some(v) = q.numer().to_i64() {
                return Num::Int(v);
            }
        }
        Num::Text(q.to_string())
    }
}

/// A coefficient: `(re + i·im)·τ^tau`, or a quotient of polynomials in
/// `τ = 2π` given by Gaussian coefficients, lowest power first.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CoeffJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub re: Option<Num>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub im: Option<Num>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<i32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub num: Option<Vec<(Num, Num)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub den: Option<Vec<(Num, Num)>>,
}

impl CoeffJson {
    pub fn real(v: f64) -> Self {
        CoeffJson {
            re: Some(Num::Float(v)),
            ..CoeffJson::default()
        }
    }

    fn is_empty(&self) -> bool {
        self.re.is_none() && self.im.is_none() && self.tau.is_none() && self.num.is_none() && self.den.is_none()
    }
}

/// Coefficient rings readable from and writable to [`CoeffJson`].
pub trait CoeffIo: Coeff {
    const MODE: &'static str;
    fn read(c: &CoeffJson) -> Result<Self, String>;
    fn write(&self) -> CoeffJson;
}

fn pair_list(v: &[(Num, Num)]) -> Result<Vec<(Rational, Rational)>, String> {
    v.iter().map(|(a, b)| Ok((a.rational()?, b.rational()?))).collect()
}

fn rational_or_zero(n: &Option<Num>) -> Result<Rational, String> {
    n.as_ref().map_or(Ok(Rational::zero()), Num::rational)
}

fn float_or_zero(n: &Option<Num>) -> Result<f64, String> {
    n.as_ref().map_or(Ok(0.0), Num::float)
}

impl CoeffIo for Exact {
    const MODE: &'static str = "exact";

    fn read(c: &CoeffJson) -> Result<Self, String> {
        if let Some(num) = &c.num {
            if c.re.is_some() || c.im.is_some() || c.tau.is_some() {
                return Err("give either re/im/tau or num/den".into());
            }
            let den = match &c.den {
                Some(d) => pair_list(d)?,
                None => vec![(Rational::from_integer(1.into()), Rational::zero())],
            };
            return Exact::from_parts_list(&pair_list(num)?, &den).ok_or_else(|| "zero denominator".to_string());
        }
        if c.den.is_some() {
            return Err("den without num".into());
        }
        if c.is_empty() {
            return Err("empty coefficient".into());
        }
        Ok(Exact::gaussian_tau_power(&rational_or_zero(&c.re)?, &rational_or_zero(&c.im)?, c.tau.unwrap_or(0)))
    }

    fn write(&self) -> CoeffJson {
        if let Some((re, im)) = self.as_gaussian() {
            return CoeffJson {
                re: Some(Num::from_rational(&re)),
                im: (!im.is_zero()).then(|| Num::from_rational(&im)),
                ..CoeffJson::default()
            };
        }
        let (num, den) = self.parts();
        let f = |v: Vec<(Rational, Rational)>| v.iter().map(|(a, b)| (Num::from_rational(a), Num::from_rational(b))).collect();
        CoeffJson {
            num: Some(f(num)),
            den: Some(f(den)),
            ..CoeffJson::default()
        }
    }
}

impl CoeffIo for Complex64 {
    const MODE: &'static str = "float";

    fn read(c: &CoeffJson) -> Result<Self, String> {
        let tau = std::f64::consts::TAU;
        let poly = |v: &[(Num, Num)]| -> Result<Complex64, String> {
            let mut acc = Complex64::new(0.0, 0.0);
            for (k, (a, b)) in v.iter().enumerate() {
                acc += Complex64::new(a.float()?, b.float()?) * tau.powi(k as i32);
            }
            Ok(acc)
        };
        if let Some(num) = &c.num {
            if c.re.is_some() || c.im.is_some() || c.tau.is_some() {
                return Err("give either re/im/tau or num/den".into());
            }
            let d = match &c.den {
                Some(d) => poly(d)?,
                None => Complex64::new(1.0, 0.0),
            };
            if d == Complex64::new(0.0, 0.0) {
                return Err("zero denominator".into());
            }
            return Ok(poly(num)? / d);
        }
        if c.den.is_some() {
            return Err("den without num".into());
        }
        if c.is_empty() {
            return Err("empty coefficient".into());
        }
        Ok(Complex64::new(float_or_zero(&c.re)?, float_or_zero(&c.im)?) * tau.powi(c.tau.unwrap_or(0)))
    }

    fn write(&self) -> CoeffJson {
        CoeffJson {
            re: Some(Num::Float(self.re)),
            im: (self.im != 0.0).then_some(Num::Float(self.im)),
            ..CoeffJson::default()
        }
    }
}

fn std_basis_labels() -> Vec<String> {
    vec!["1".into()]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermJson {
    /// `dim × basis.len()` rational coordinates, component-major.
    pub freq: Vec<Num>,
    #[serde(flatten)]
    pub c: CoeffJson,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrigPolyJson {
    pub dim: usize,
    #[serde(default = "std_basis_labels")]
    pub basis: Vec<String>,
    pub terms: Vec<TermJson>,
}

impl TrigPolyJson {
    pub fn to_core<C: CoeffIo>(&self) -> Result<TrigPoly<C>, String> {
        let basis = Arc::new(Basis::parse(&self.basis).map_err(|e| e.to_string())?);
        let width = self.dim * basis.len();
        let mut terms = Vec::with_capacity(self.terms.len());
        for (i, t) in self.terms.iter().enumerate() {
            if t.freq.len() != width {
                return Err(format!("terms[{i}]: frequency needs {width} coordinates, got {}", t.freq.len()));
            }
            let coords = t.freq.iter().map(Num::rational).collect::<Result<Vec<_>, _>>().map_err(|e| format!("terms[{i}]: {e}"))?;
            let c = C::read(&t.c).map_err(|e| format!("terms[{i}]: {e}"))?;
            terms.push((Frequency::from_coords(coords), c));
        }
        TrigPoly::from_terms(self.dim, basis, terms).map_err(|e| e.to_string())
    }

    pub fn from_core<C: CoeffIo>(p: &TrigPoly<C>) -> Self {
        TrigPolyJson {
            dim: p.dim(),
            basis: p.basis().labels(),
            terms: p
                .terms()
                .iter()
                .map(|(xi, c)| TermJson {
                    freq: xi.coords().iter().map(Num::from_rational).collect(),
                    c: c.write(),
                })
                .collect(),
        }
    }
}

/// Symbol expression tree.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case", deny_unknown_fields)]
pub enum SymbolJson {
    /// Constant.
    Const { value: CoeffJson },
    /// `c·ξ^α`.
    Xi {
        alpha: Vec<u32>,
        #[serde(default)]
        coeff: Option<CoeffJson>,
    },
    /// `⟨ξ⟩^m = (1 + |ξ|²)^{m/2}`.
    Bracket { m: Num },
    /// `⟨2πξ⟩² = 1 + 4π²|ξ|²`.
    TwoPiBracketSq,
    /// Trigonometric polynomial in `x`.
    Trig { poly: TrigPolyJson },
    /// Trigonometric polynomial in `y` (amplitudes).
    TrigY { poly: TrigPolyJson },
    Add { args: Vec<SymbolJson> },
    Mul { args: Vec<SymbolJson> },
    Sub { args: (Box<SymbolJson>, Box<SymbolJson>) },
    Neg { arg: Box<SymbolJson> },
    Scale { arg: Box<SymbolJson>, by: CoeffJson },
    Pow { arg: Box<SymbolJson>, n: u32 },
    Div { num: Box<SymbolJson>, den: Box<SymbolJson> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymbolFile {
    pub dim: usize,
    #[serde(default = "std_basis_labels")]
    pub basis: Vec<String>,
    pub expr: SymbolJson,
}

impl SymbolFile {
    pub fn to_core<C: CoeffIo>(&self) -> Result<SymbolExpr<C>, String> {
        let basis = Arc::new(Basis::parse(&self.basis).map_err(|e| e.to_string())?);
        build(&self.expr, self.dim, &basis, "expr")
    }
}

fn build<C: CoeffIo>(e: &SymbolJson, dim: usize, basis: &Arc<Basis>, at: &str) -> Result<SymbolExpr<C>, String> {
    let ctx = |r: apcalc_core::Result<SymbolExpr<C>>| r.map_err(|err| format!("{at}: {err}"));
    let coeff = |c: &CoeffJson| C::read(c).map_err(|err| format!("{at}: {err}"));
    let fold = |args: &[SymbolJson], mul: bool| -> Result<SymbolExpr<C>, String> {
        let mut acc = if mul {
            ctx(SymbolExpr::one(dim, basis.clone()))?
        } else {
            ctx(SymbolExpr::zero(dim, basis.clone()))?
        };
        for (i, a) in args.iter().enumerate() {
            let v = build(a, dim, basis, &format!("{at}.args[{i}]"))?;
            acc = ctx(if mul { acc.mul(&v) } else { acc.add(&v) })?;
        }
        Ok(acc)
    };
    match e {
        SymbolJson::Const { value } => ctx(SymbolExpr::constant(dim, basis.clone(), coeff(value)?)),
        SymbolJson::Xi { alpha, coeff: c } => {
            let c = match c {
                Some(c) => coeff(c)?,
                None => C::one(),
            };
            ctx(SymbolExpr::xi_mono(dim, basis.clone(), MultiIndex(alpha.clone()), c))
        }
        SymbolJson::Bracket { m } => {
            let m = m.rational().map_err(|err| format!("{at}: {err}"))?;
            ctx(SymbolExpr::bracket(dim, basis.clone(), m, C::one()))
        }
        SymbolJson::TwoPiBracketSq => ctx(two_pi_bracket_sq(dim, basis.clone())),
        SymbolJson::Trig { poly } => {
            let p = poly.to_core::<C>().map_err(|err| format!("{at}.poly: {err}"))?;
            check_shape(p.dim(), p.basis(), dim, basis, at)?;
            Ok(SymbolExpr::from_trigpoly(p))
        }
        SymbolJson::TrigY { poly } => {
            let p = poly.to_core::<C>().map_err(|err| format!("{at}.poly: {err}"))?;
            check_shape(p.dim(), p.basis(), dim, basis, at)?;
            ctx(SymbolExpr::from_y_trigpoly(p))
        }
        SymbolJson::Add { args } => fold(args, false),
        SymbolJson::Mul { args } => fold(args, true),
        SymbolJson::Sub { args } => {
            let a = build(&args.0, dim, basis, &format!("{at}.args[0]"))?;
            let b = build(&args.1, dim, basis, &format!("{at}.args[1]"))?;
            ctx(a.sub(&b))
        }
        SymbolJson::Neg { arg } => Ok(build(arg, dim, basis, &format!("{at}.arg"))?.neg()),
        SymbolJson::Scale { arg, by } => Ok(build(arg, dim, basis, &format!("{at}.arg"))?.scale(&coeff(by)?)),
        SymbolJson::Pow { arg, n } => ctx(build(arg, dim, basis, &format!("{at}.arg"))?.pow(*n)),
        SymbolJson::Div { num, den } => {
            let n = build(num, dim, basis, &format!("{at}.num"))?;
            let d = build(den, dim, basis, &format!("{at}.den"))?;
            ctx(n.div(&d))
        }
    }
}

fn check_shape(d: usize, b: &Basis, dim: usize, basis: &Basis, at: &str) -> Result<(), String> {
    if d != dim || b != basis {
        return Err(format!("{at}: polynomial dimension or basis differs from the symbol's"));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonomialJson {
    pub alpha: Vec<u32>,
    #[serde(flatten)]
    pub c: CoeffJson,
}

/// Constant-coefficient polynomial `Σ c_α ξ^α`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolyJson {
    pub dim: usize,
    pub monomials: Vec<MonomialJson>,
}

impl PolyJson {
    pub fn to_core<C: CoeffIo>(&self) -> Result<PolySymbol<C>, String> {
        let mut out = Vec::with_capacity(self.monomials.len());
        for (i, m) in self.monomials.iter().enumerate() {
            if m.alpha.len() != self.dim {
                return Err(format!("monomials[{i}]: alpha needs {} entries", self.dim));
            }
            out.push((MultiIndex(m.alpha.clone()), C::read(&m.c).map_err(|e| format!("monomials[{i}]: {e}"))?));
        }
        PolySymbol::new(self.dim, out).map_err(|e| e.to_string())
    }

    pub fn from_core<C: CoeffIo>(p: &PolySymbol<C>) -> Self {
        PolyJson {
            dim: p.dim(),
            monomials: p
                .monomials()
                .iter()
                .map(|(a, c)| MonomialJson {
                    alpha: a.0.clone(),
                    c: c.write(),
                })
                .collect(),
        }
    }
}

/// Input of `hypo constant-strength`: `p(x, ξ) = Σ_j c_j(x) P_j(ξ)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstantStrengthJson {
    pub coeffs: Vec<TrigPolyJson>,
    pub polys: Vec<PolyJson>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassParamsJson {
    pub m: f64,
    pub rho: f64,
    #[serde(default)]
    pub delta: f64,
    #[serde(default)]
    pub s: Option<f64>,
    #[serde(default)]
    pub c: Option<f64>,
    #[serde(default)]
    pub b: Option<f64>,
}

/// Input of `equiv`: two formal sums sharing class parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquivJson {
    pub dim: usize,
    #[serde(default = "std_basis_labels")]
    pub basis: Vec<String>,
    pub params: ClassParamsJson,
    pub a: Vec<SymbolJson>,
    pub b: Vec<SymbolJson>,
}

impl EquivJson {
    pub fn to_core<C: CoeffIo>(&self) -> Result<(FormalSum<C>, FormalSum<C>), String> {
        let basis = Arc::new(Basis::parse(&self.basis).map_err(|e| e.to_string())?);
        let p = &self.params;
        let s = p.s.unwrap_or(if p.rho > p.delta { (1.0 / (p.rho - p.delta)).max(1.0) } else { 1.0 });
        let mut params = ClassParams::new(self.dim, p.m, p.rho, s);
        params.delta = p.delta;
        params.c = p.c.unwrap_or(params.c);
        params.b = p.b.unwrap_or(params.b);
        let terms = |v: &[SymbolJson], name: &str| -> Result<Vec<SymbolExpr<C>>, String> {
            v.iter().enumerate().map(|(i, e)| build(e, self.dim, &basis, &format!("{name}[{i}]"))).collect()
        };
        Ok((FormalSum::new(terms(&self.a, "a")?, params), FormalSum::new(terms(&self.b, "b")?, params)))
    }
}

/// Reads JSON, reporting the location of a schema error as a JSON pointer.
pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(path.display().to_string(), e))?;
    parse_json(&text).map_err(|(pointer, msg)| CliError::Schema {
        file: path.display().to_string(),
        pointer,
        msg,
    })
}

/// `Err((pointer, message))` on failure.
pub fn parse_json<T: DeserializeOwned>(text: &str) -> Result<T, (String, String)> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| (pointer(e.path()), e.inner().to_string()))
}

fn pointer(path: &serde_path_to_error::Path) -> String {
    use serde_path_to_error::Segment;
    let mut out = String::new();
    for seg in path.iter() {
        out.push('/');
        match seg {
            Segment::Seq { index } => out.push_str(&index.to_string()),
            Segment::Map { key } => out.push_str(&key.replace('~', "~0").replace('/', "~1")),
            Segment::Enum { variant } => out.push_str(variant),
            Segment::Unknown => out.push('?'),
        }
    }
    out
}

/// `(ξ, magnitude)` rows: `dim` frequency columns then the magnitude. A
/// header row is skipped when its first field is not a number.
pub fn read_coeff_csv(path: &Path) -> Result<Vec<(Vec<f64>, f64)>, CliError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        let vals: Result<Vec<f64>, _> = rec.iter().map(str::parse::<f64>).collect();
        match vals {
            Ok(v) if v.len() >= 2 => {
                let (m, xi) = v.split_last().expect("two columns");
                rows.push((xi.to_vec(), *m));
            }
            Ok(_) => return Err(CliError::Input(format!("{}: line {}: need frequency and magnitude columns", path.display(), i + 1))),
            Err(_) if i == 0 => continue,
            Err(e) => return Err(CliError::Input(format!("{}: line {}: {e}", path.display(), i + 1))),
        }
    }
    Ok(rows)
}

/// Rows of frequency vectors, one per line.
pub fn read_points_csv(path: &Path) -> Result<Vec<Vec<f64>>, CliError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        match rec.iter().map(str::parse::<f64>).collect::<Result<Vec<f64>, _>>() {
            Ok(v) => rows.push(v),
            Err(_) if i == 0 => continue,
            Err(e) => return Err(CliError::Input(format!("{}: line {}: {e}", path.display(), i + 1))),
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn exact_coefficients_round_trip() {
        let vals = [
            Exact::from_gaussian(&q(3, 4), &q(-1, 2)),
            Exact::gaussian_tau_power(&q(1, 3), &q(0, 1), 2),
            Exact::one().plus(&Exact::gaussian_tau_power(&q(4, 1), &q(0, 1), 2)).recip().unwrap(),
            Exact::zero(),
        ];
        for v in vals {
            let j = serde_json::to_string(&v.write()).unwrap();
            let back: CoeffJson = serde_json::from_str(&j).unwrap();
            assert_eq!(Exact::read(&back).unwrap(), v, "{j}");
        }
    }

    #[test]
    fn decimals_are_exact_rationals() {
        let c: CoeffJson = serde_json::from_str(r#"{"re": 0.1, "im": "-2/3"}"#).unwrap();
        assert_eq!(Exact::read(&c).unwrap(), Exact::from_gaussian(&q(1, 10), &q(-2, 3)));
        let f = Complex64::read(&c).unwrap();
        assert!((f.re - 0.1).abs() < 1e-16 && (f.im + 2.0 / 3.0).abs() < 1e-16);
        let t: CoeffJson = serde_json::from_str(r#"{"re": 1, "tau": 2}"#).unwrap();
        assert!((Complex64::read(&t).unwrap().re - std::f64::consts::TAU.powi(2)).abs() < 1e-12);
        assert!(Exact::read(&CoeffJson::default()).is_err());
    }

    #[test]
    fn trigpoly_round_trip() {
        let text = r#"{"dim": 1, "basis": ["1", "sqrt(2)"], "terms": [
            {"freq": [1, 0], "re": "1/2"},
            {"freq": ["-1", "3/2"], "re": 2, "im": -1}
        ]}"#;
        let j: TrigPolyJson = serde_json::from_str(text).unwrap();
        assert!(j.to_core::<Exact>().is_err());
        let p = j.to_core::<Complex64>().unwrap();
        assert_eq!(p.len(), 2);
        let again = TrigPolyJson::from_core(&p).to_core::<Complex64>().unwrap();
        assert_eq!(p, again);
        let text = r#"{"dim": 2, "terms": [{"freq": ["1/3", 0], "re": "1/2"}, {"freq": [-1, 2], "im": 3, "tau": -1}]}"#;
        let p = serde_json::from_str::<TrigPolyJson>(text).unwrap().to_core::<Exact>().unwrap();
        let again = TrigPolyJson::from_core(&p).to_core::<Exact>().unwrap();
        assert_eq!(p, again);
    }

    #[test]
    fn symbol_tree() {
        let text = r#"{"dim": 1, "expr": {"op": "add", "args": [
            {"op": "two_pi_bracket_sq"},
            {"op": "trig", "poly": {"dim": 1, "terms": [{"freq": [1], "re": "1/2"}]}}
        ]}}"#;
        let f: SymbolFile = serde_json::from_str(text).unwrap();
        let a = f.to_core::<Exact>().unwrap();
        assert_eq!(a.xi_degree(), Some(2));
        assert!(a.depends_on_x());
    }

    #[test]
    fn schema_errors_carry_pointers() {
        let bad = r#"{"dim": 1, "terms": [{"freq": [1], "re": "1/2"}, {"freq": {}, "re": 1}]}"#;
        let (ptr, _) = parse_json::<TrigPolyJson>(bad).unwrap_err();
        assert_eq!(ptr, "/terms/1/freq");
        let bad = r#"{"dim": 1, "expr": {"op": "nope"}}"#;
        let (ptr, msg) = parse_json::<SymbolFile>(bad).unwrap_err();
        assert!(ptr.starts_with("/expr"), "{ptr}: {msg}");
    }
}
