//! Frequencies, frequency bases and multi-indices.
//!
//! A frequency in `ℝ^d` is stored as exact rational coordinates over a finite
//! list of real basis numbers (for instance `1` and `√2`). Each axis carries
//! one coordinate per basis element, so two frequencies are equal exactly when
//! their coordinate vectors are. With the default basis `[1]` the coordinates
//! are just the rational components.

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use num_bigint::BigInt;
use num_traits::{Float, One, Signed, Zero};

use crate::error::{Error, Result};
use crate::scalar::{rational_to_f64, Rational};

/// One real number of a frequency basis.
#[derive(Clone, Debug, PartialEq)]
pub struct BasisElem {
    pub label: String,
    pub value: f64,
    /// Exact value when the element is rational.
    pub exact: Option<Rational>,
}

impl BasisElem {
    /// Parses labels such as `1`, `-3/2`, `0.25`, `sqrt(2)` or `pi`.
    pub fn parse(label: &str) -> Result<Self> {
        let t = label.trim();
        if let Some(q) = parse_rational(t) {
            return Ok(BasisElem {
                label: t.to_string(),
                value: rational_to_f64(&q),
                exact: Some(q),
            });
        }
        let inner = t
            .strip_prefix("sqrt(")
            .and_then(|r| r.strip_suffix(')'))
            .map(str::trim);
        if let Some(inner) = inner {
            let q = parse_rational(inner)
                .ok_or_else(|| Error::invalid(alloc::format!("bad basis element {t:?}")))?;
            if q.is_negative() {
                return Err(Error::invalid(alloc::format!("negative radicand in {t:?}")));
            }
            let value = Float::sqrt(rational_to_f64(&q));
            // sqrt of a rational square stays rational.
            let exact = rational_sqrt(&q);
            return Ok(BasisElem {
                label: t.to_string(),
                value,
                exact,
            });
        }
        match t {
            "pi" | "π" => Ok(BasisElem {
                label: t.to_string(),
                value: core::f64::consts::PI,
                exact: None,
            }),
            "e" => Ok(BasisElem {
                label: t.to_string(),
                value: core::f64::consts::E,
                exact: None,
            }),
            _ => Err(Error::invalid(alloc::format!("bad basis element {t:?}"))),
        }
    }
}

/// Parses an integer, a fraction `a/b` or a plain decimal exactly.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    if s.is_empty() {
        return None;
    }
    if let Some((n, d)) = s.split_once('/') {
        let n = BigInt::from_str(n.trim()).ok()?;
        let d = BigInt::from_str(d.trim()).ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(Rational::new(n, d));
    }
    if let Ok(n) = BigInt::from_str(s) {
        return Some(Rational::from_integer(n));
    }
    let (mant, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (neg, mant) = match mant.strip_prefix('-') {
        Some(m) => (true, m),
        None => (false, mant.strip_prefix('+').unwrap_or(mant)),
    };
    let (ip, fp) = mant.split_once('.').unwrap_or((mant, ""));
    if ip.is_empty() && fp.is_empty() {
        return None;
    }
    if !ip.chars().chain(fp.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = alloc::format!("{ip}{fp}");
    let n = BigInt::from_str(&digits).ok()?;
    let scale = exp - fp.len() as i32;
    let ten = BigInt::from(10);
    let mut q = if scale >= 0 {
        Rational::from_integer(n * num_traits::pow(ten, scale as usize))
    } else {
        Rational::new(n, num_traits::pow(ten, scale.unsigned_abs() as usize))
    };
    if neg {
        q = -q;
    }
    Some(q)
}

fn rational_sqrt(q: &Rational) -> Option<Rational> {
    let n = q.numer().sqrt();
    let d = q.denom().sqrt();
    if &(&n * &n) == q.numer() && &(&d * &d) == q.denom() {
        Some(Rational::new(n, d))
    } else {
        None
    }
}

/// Finite list of real numbers over which frequency coordinates are taken.
#[derive(Clone, Debug, PartialEq)]
pub struct Basis {
    elems: Vec<BasisElem>,
}

impl Default for Basis {
    fn default() -> Self {
        Basis::standard()
    }
}

impl Basis {
    /// The basis `[1]`: frequencies are rational vectors.
    pub fn standard() -> Self {
        Basis {
            elems: vec![BasisElem {
                label: "1".to_string(),
                value: 1.0,
                exact: Some(Rational::one()),
            }],
        }
    }

    pub fn new(elems: Vec<BasisElem>) -> Result<Self> {
        if elems.is_empty() {
            return Err(Error::invalid("empty frequency basis"));
        }
        Ok(Basis { elems })
    }

    pub fn parse<S: AsRef<str>>(labels: &[S]) -> Result<Self> {
        let elems = labels
            .iter()
            .map(|l| BasisElem::parse(l.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        Basis::new(elems)
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn elems(&self) -> &[BasisElem] {
        &self.elems
    }

    pub fn labels(&self) -> Vec<String> {
        self.elems.iter().map(|e| e.label.clone()).collect()
    }

    /// True when every element has an exact rational value.
    pub fn is_rational(&self) -> bool {
        self.elems.iter().all(|e| e.exact.is_some())
    }
}

/// Frequency vector as exact coordinates: axis `i`, basis element `j` sits at
/// index `i * k + j` where `k` is the basis length.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Frequency {
    coords: Vec<Rational>,
}

impl Frequency {
    pub fn zero(dim: usize, basis_len: usize) -> Self {
        Frequency {
            coords: vec![Rational::zero(); dim * basis_len],
        }
    }

    pub fn from_coords(coords: Vec<Rational>) -> Self {
        Frequency { coords }
    }

    /// Integer frequency over the standard basis.
    pub fn from_ints(xs: &[i64]) -> Self {
        Frequency {
            coords: xs.iter().map(|&x| Rational::from_integer(x.into())).collect(),
        }
    }

    /// Rational frequency over the standard basis.
    pub fn from_ratios(xs: &[(i64, i64)]) -> Self {
        Frequency {
            coords: xs
                .iter()
                .map(|&(n, d)| Rational::new(n.into(), d.into()))
                .collect(),
        }
    }

    pub fn coords(&self) -> &[Rational] {
        &self.coords
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    pub fn add(&self, o: &Self) -> Self {
        Frequency {
            coords: self.coords.iter().zip(&o.coords).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        Frequency {
            coords: self.coords.iter().zip(&o.coords).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn neg(&self) -> Self {
        Frequency {
            coords: self.coords.iter().map(|a| -a).collect(),
        }
    }

    /// Real value of component `i`.
    pub fn component(&self, i: usize, basis: &Basis) -> f64 {
        let k = basis.len();
        basis
            .elems
            .iter()
            .enumerate()
            .map(|(j, e)| rational_to_f64(&self.coords[i * k + j]) * e.value)
            .sum()
    }

    /// Exact value of component `i`, available for rational bases.
    pub fn exact_component(&self, i: usize, basis: &Basis) -> Option<Rational> {
        let k = basis.len();
        let mut acc = Rational::zero();
        for (j, e) in basis.elems.iter().enumerate() {
            acc += &self.coords[i * k + j] * e.exact.as_ref()?;
        }
        Some(acc)
    }

    pub fn to_f64(&self, dim: usize, basis: &Basis) -> Vec<f64> {
        (0..dim).map(|i| self.component(i, basis)).collect()
    }

    /// Euclidean length of the real frequency vector.
    pub fn norm(&self, dim: usize, basis: &Basis) -> f64 {
        Float::sqrt((0..dim).map(|i| self.component(i, basis).powi(2)).sum::<f64>())
    }
}

impl fmt::Display for Frequency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// Multi-index `α ∈ ℕ^d`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct MultiIndex(pub Vec<u32>);

impl MultiIndex {
    pub fn zero(dim: usize) -> Self {
        MultiIndex(vec![0; dim])
    }

    pub fn unit(dim: usize, i: usize) -> Self {
        let mut v = vec![0; dim];
        v[i] = 1;
        MultiIndex(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// `|α|`.
    pub fn order(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&a| a == 0)
    }

    pub fn add(&self, o: &Self) -> Self {
        MultiIndex(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }

    pub fn checked_sub(&self, o: &Self) -> Option<Self> {
        self.0
            .iter()
            .zip(&o.0)
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<Vec<_>>>()
            .map(MultiIndex)
    }

    /// `α!` as a float.
    pub fn factorial(&self) -> f64 {
        self.0.iter().map(|&a| crate::scalar::factorial(a)).product()
    }

    /// `α!` exactly.
    pub fn rational_factorial(&self) -> Rational {
        self.0
            .iter()
            .map(|&a| crate::scalar::rational_factorial(a))
            .fold(Rational::one(), |acc, f| acc * f)
    }

    /// `v^α`.
    pub fn pow(&self, v: &[f64]) -> f64 {
        self.0
            .iter()
            .zip(v)
            .map(|(&a, &x)| x.powi(a as i32))
            .product()
    }

    /// All multi-indices of exact order `n` in `dim` variables, in
    /// lexicographically decreasing order.
    pub fn of_order(dim: usize, n: u32) -> Vec<MultiIndex> {
        let mut out = Vec::new();
        let mut cur = vec![0u32; dim];
        fill(&mut out, &mut cur, 0, n);
        out
    }

    /// All multi-indices with `|α| <= n`, ordered by order.
    pub fn up_to(dim: usize, n: u32) -> Vec<MultiIndex> {
        (0..=n).flat_map(|k| MultiIndex::of_order(dim, k)).collect()
    }

    /// Multi-indices `β <= α` componentwise.
    pub fn below(&self) -> Vec<MultiIndex> {
        let mut out = vec![MultiIndex(Vec::with_capacity(self.dim()))];
        for &a in &self.0 {
            let mut next = Vec::with_capacity(out.len() * (a as usize + 1));
            for m in &out {
                for b in 0..=a {
                    let mut v = m.0.clone();
                    v.push(b);
                    next.push(MultiIndex(v));
                }
            }
            out = next;
        }
        out
    }

    /// Product of binomials `(α choose β)`.
    pub fn binomial(&self, beta: &MultiIndex) -> f64 {
        self.0
            .iter()
            .zip(&beta.0)
            .map(|(&a, &b)| crate::scalar::binomial(a, b))
            .product()
    }
}

fn fill(out: &mut Vec<MultiIndex>, cur: &mut Vec<u32>, i: usize, rem: u32) {
    if cur.is_empty() {
        if rem == 0 {
            out.push(MultiIndex(Vec::new()));
        }
        return;
    }
    if i == cur.len() - 1 {
        cur[i] = rem;
        out.push(MultiIndex(cur.clone()));
        cur[i] = 0;
        return;
    }
    for a in (0..=rem).rev() {
        cur[i] = a;
        fill(out, cur, i + 1, rem - a);
    }
    cur[i] = 0;
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_basis_labels() {
        let b = Basis::parse(&["1", "sqrt(2)", "sqrt(9/4)", "0.25"]).unwrap();
        assert!((b.elems()[1].value - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(b.elems()[1].exact, None);
        assert_eq!(b.elems()[2].exact, Some(Rational::new(3.into(), 2.into())));
        assert_eq!(b.elems()[3].exact, Some(Rational::new(1.into(), 4.into())));
        assert!(!b.is_rational());
        assert!(Basis::parse(&["sqrt(x)"]).is_err());
    }

    #[test]
    fn multi_index_enumeration() {
        assert_eq!(MultiIndex::of_order(2, 2).len(), 3);
        assert_eq!(MultiIndex::of_order(3, 2).len(), 6);
        assert_eq!(MultiIndex::up_to(2, 3).len(), 10);
        assert_eq!(MultiIndex(vec![2, 1]).below().len(), 6);
        assert_eq!(MultiIndex(vec![2, 3]).factorial(), 12.0);
    }

    #[test]
    fn irrational_components() {
        let b = Basis::parse(&["1", "sqrt(2)"]).unwrap();
        let f = Frequency::from_ints(&[1, 1]);
        assert!((f.component(0, &b) - (1.0 + 2f64.sqrt())).abs() < 1e-15);
        assert_eq!(f.exact_component(0, &b), None);
    }
}
