//! Coefficient scalars.
//!
//! Two coefficient types implement [`Coeff`]: `Complex64` for ordinary
//! floating point work, and [`Exact`], the field of rational functions in
//! `τ = 2π` with Gaussian rational coefficients. Every constant produced by
//! differentiating `e^{2πiξ·x}` at rational `ξ`, and every quotient of such
//! constants, lives in that field, so products, derivatives and operator
//! actions can be compared for exact equality.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Float, One, Signed, ToPrimitive, Zero};

use crate::freq::BasisElem;

pub type Rational = BigRational;

/// Gaussian rational coefficients `(re, im)` of a polynomial in `τ`.
pub type GaussianCoeffs = Vec<(Rational, Rational)>;

/// Relative threshold below which float coefficients are pruned.
pub const FLOAT_PRUNE_REL: f64 = 1e-14;

/// Scalar ring used for trigonometric polynomial coefficients and symbol
/// constants.
pub trait Coeff: Clone + PartialEq + fmt::Debug + Send + Sync + 'static {
    /// True when arithmetic is exact.
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn plus(&self, other: &Self) -> Self;
    fn minus(&self, other: &Self) -> Self;
    fn times(&self, other: &Self) -> Self;
    fn negated(&self) -> Self;
    fn conjugate(&self) -> Self;
    /// Multiplicative inverse, `None` for zero.
    fn recip(&self) -> Option<Self>;
    fn from_rational(q: &Rational) -> Self;
    fn from_gaussian(re: &Rational, im: &Rational) -> Self;
    /// Conversion from a float. Exact coefficients take the exact binary value.
    fn from_c64(z: Complex64) -> Option<Self>;
    /// `τ = 2π`.
    fn two_pi() -> Self;
    fn imag_unit() -> Self;
    fn to_c64(&self) -> Complex64;
    /// `self^e` for a rational exponent; exact coefficients only support
    /// integer exponents.
    fn pow_rational(&self, e: &Rational) -> Option<Self>;
    /// `e^{2πi·turns}`; exact coefficients only support quarter turns.
    fn phase(turns: &Rational) -> Option<Self>;
    /// Value of a frequency basis element.
    fn from_basis_elem(elem: &BasisElem) -> Option<Self>;
    /// True when the coefficient may be dropped relative to `scale`.
    fn negligible(&self, scale: f64) -> bool;

    fn abs(&self) -> f64 {
        self.to_c64().norm()
    }

    fn from_i64(v: i64) -> Self {
        Self::from_rational(&Rational::from_integer(BigInt::from(v)))
    }

    fn two_pi_i() -> Self {
        Self::two_pi().times(&Self::imag_unit())
    }

    fn powi(&self, k: i64) -> Option<Self> {
        let base = if k < 0 { self.recip()? } else { self.clone() };
        let mut n = k.unsigned_abs();
        let mut acc = Self::one();
        let mut sq = base;
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.times(&sq);
            }
            n >>= 1;
            if n > 0 {
                sq = sq.times(&sq);
            }
        }
        Some(acc)
    }
}

impl Coeff for Complex64 {
    const EXACT: bool = false;

    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn minus(&self, other: &Self) -> Self {
        self - other
    }
    fn times(&self, other: &Self) -> Self {
        self * other
    }
    fn negated(&self) -> Self {
        -self
    }
    fn conjugate(&self) -> Self {
        self.conj()
    }
    fn recip(&self) -> Option<Self> {
        if Coeff::is_zero(self) {
            None
        } else {
            Some(self.inv())
        }
    }
    fn from_rational(q: &Rational) -> Self {
        Complex64::new(rational_to_f64(q), 0.0)
    }
    fn from_gaussian(re: &Rational, im: &Rational) -> Self {
        Complex64::new(rational_to_f64(re), rational_to_f64(im))
    }
    fn from_c64(z: Complex64) -> Option<Self> {
        Some(z)
    }
    fn two_pi() -> Self {
        Complex64::new(core::f64::consts::TAU, 0.0)
    }
    fn imag_unit() -> Self {
        Complex64::new(0.0, 1.0)
    }
    fn to_c64(&self) -> Complex64 {
        *self
    }
    fn pow_rational(&self, e: &Rational) -> Option<Self> {
        if e.is_integer() {
            let k = e.to_integer().to_i64()?;
            return Coeff::powi(self, k);
        }
        let ef = rational_to_f64(e);
        if self.im == 0.0 && self.re > 0.0 {
            Some(Complex64::new(self.re.powf(ef), 0.0))
        } else {
            Some(self.powf(ef))
        }
    }
    fn phase(turns: &Rational) -> Option<Self> {
        let t = rational_to_f64(&frac_part(turns));
        Some(Complex64::from_polar(1.0, core::f64::consts::TAU * t))
    }
    fn from_basis_elem(elem: &BasisElem) -> Option<Self> {
        Some(Complex64::new(elem.value, 0.0))
    }
    fn negligible(&self, scale: f64) -> bool {
        self.norm() <= FLOAT_PRUNE_REL * scale
    }
}

pub(crate) fn rational_to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

/// Fractional part in `[0, 1)`.
pub(crate) fn frac_part(q: &Rational) -> Rational {
    q - q.floor()
}

pub fn rational_from_f64(v: f64) -> Option<Rational> {
    Rational::from_float(v)
}

// ---------------------------------------------------------------------------
// Exact coefficients

#[derive(Clone, PartialEq, Eq, Debug, Default)]
struct Gauss {
    re: Rational,
    im: Rational,
}

impl Gauss {
    fn zero() -> Self {
        Gauss {
            re: Rational::zero(),
            im: Rational::zero(),
        }
    }
    fn one() -> Self {
        Gauss {
            re: Rational::one(),
            im: Rational::zero(),
        }
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
    fn add(&self, o: &Self) -> Self {
        Gauss {
            re: &self.re + &o.re,
            im: &self.im + &o.im,
        }
    }
    fn sub(&self, o: &Self) -> Self {
        Gauss {
            re: &self.re - &o.re,
            im: &self.im - &o.im,
        }
    }
    fn mul(&self, o: &Self) -> Self {
        Gauss {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }
    fn neg(&self) -> Self {
        Gauss {
            re: -&self.re,
            im: -&self.im,
        }
    }
    fn conj(&self) -> Self {
        Gauss {
            re: self.re.clone(),
            im: -&self.im,
        }
    }
    fn inv(&self) -> Self {
        let n = &self.re * &self.re + &self.im * &self.im;
        Gauss {
            re: &self.re / &n,
            im: -&self.im / &n,
        }
    }
    fn to_c64(&self) -> Complex64 {
        Complex64::new(rational_to_f64(&self.re), rational_to_f64(&self.im))
    }
}

/// Polynomial in `τ` with Gaussian rational coefficients, lowest degree
/// first, no trailing zeros.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
struct TauPoly(Vec<Gauss>);

impl TauPoly {
    fn constant(c: Gauss) -> Self {
        let mut p = TauPoly(vec![c]);
        p.trim();
        p
    }
    fn one() -> Self {
        TauPoly(vec![Gauss::one()])
    }
    fn trim(&mut self) {
        while self.0.last().is_some_and(Gauss::is_zero) {
            self.0.pop();
        }
    }
    fn is_zero(&self) -> bool {
        self.0.is_empty()
    }
    fn is_one(&self) -> bool {
        self.0.len() == 1 && self.0[0] == Gauss::one()
    }
    fn degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }
    fn lead(&self) -> &Gauss {
        self.0.last().expect("lead of zero polynomial")
    }
    fn add(&self, o: &Self) -> Self {
        let n = self.0.len().max(o.0.len());
        let mut v = Vec::with_capacity(n);
        for i in 0..n {
            let a = self.0.get(i);
            let b = o.0.get(i);
            v.push(match (a, b) {
                (Some(a), Some(b)) => a.add(b),
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => Gauss::zero(),
            });
        }
        let mut p = TauPoly(v);
        p.trim();
        p
    }
    fn neg(&self) -> Self {
        TauPoly(self.0.iter().map(Gauss::neg).collect())
    }
    fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return TauPoly::default();
        }
        let mut v = vec![Gauss::zero(); self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.0.iter().enumerate() {
                v[i + j] = v[i + j].add(&a.mul(b));
            }
        }
        let mut p = TauPoly(v);
        p.trim();
        p
    }
    fn scale(&self, c: &Gauss) -> Self {
        let mut p = TauPoly(self.0.iter().map(|a| a.mul(c)).collect());
        p.trim();
        p
    }
    fn conj(&self) -> Self {
        TauPoly(self.0.iter().map(Gauss::conj).collect())
    }
    fn divrem(&self, d: &Self) -> (Self, Self) {
        let mut rem = self.clone();
        if rem.0.len() < d.0.len() {
            return (TauPoly::default(), rem);
        }
        let dl_inv = d.lead().inv();
        let mut q = vec![Gauss::zero(); rem.0.len() - d.0.len() + 1];
        while !rem.is_zero() && rem.0.len() >= d.0.len() {
            let shift = rem.0.len() - d.0.len();
            let c = rem.lead().mul(&dl_inv);
            for (i, b) in d.0.iter().enumerate() {
                rem.0[i + shift] = rem.0[i + shift].sub(&c.mul(b));
            }
            q[shift] = c;
            rem.0.pop();
            rem.trim();
        }
        let mut q = TauPoly(q);
        q.trim();
        (q, rem)
    }
    fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let l = self.lead().inv();
        self.scale(&l)
    }
    fn gcd(&self, o: &Self) -> Self {
        let mut a = self.clone();
        let mut b = o.clone();
        while !b.is_zero() {
            let (_, r) = a.divrem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }
    fn eval(&self, t: f64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for c in self.0.iter().rev() {
            acc = acc * t + c.to_c64();
        }
        acc
    }
}

/// Exact scalar: a rational function of `τ = 2π` with Gaussian rational
/// coefficients, kept in lowest terms with a monic denominator.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Exact {
    num: TauPoly,
    den: TauPoly,
}

impl Exact {
    fn from_parts(num: TauPoly, den: TauPoly) -> Self {
        let mut e = Exact { num, den };
        e.normalize();
        e
    }

    fn normalize(&mut self) {
        if self.num.is_zero() {
            self.den = TauPoly::one();
            return;
        }
        if self.den.degree() > 0 && self.num.degree() > 0 || self.den.degree() > 0 {
            let g = self.num.gcd(&self.den);
            if g.degree() > 0 {
                self.num = self.num.divrem(&g).0;
                self.den = self.den.divrem(&g).0;
            }
        }
        if !self.den.is_one() {
            let l = self.den.lead().inv();
            self.num = self.num.scale(&l);
            self.den = self.den.scale(&l);
        }
    }

    /// `c·τ^k` for a Gaussian rational `c`.
    pub fn gaussian_tau_power(re: &Rational, im: &Rational, k: i32) -> Self {
        let c = Gauss {
            re: re.clone(),
            im: im.clone(),
        };
        let mut mono = vec![Gauss::zero(); k.unsigned_abs() as usize + 1];
        mono[k.unsigned_abs() as usize] = Gauss::one();
        let mono = TauPoly(mono);
        if k >= 0 {
            Exact::from_parts(TauPoly::constant(c).mul(&mono), TauPoly::one())
        } else {
            Exact::from_parts(TauPoly::constant(c), mono)
        }
    }

    /// The value as a Gaussian rational when it does not depend on `τ`.
    pub fn as_gaussian(&self) -> Option<(Rational, Rational)> {
        if !self.den.is_one() {
            return None;
        }
        match self.num.0.len() {
            0 => Some((Rational::zero(), Rational::zero())),
            1 => Some((self.num.0[0].re.clone(), self.num.0[0].im.clone())),
            _ => None,
        }
    }

    /// Numerator and denominator coefficients, lowest power of `τ` first,
    /// as `(re, im)` pairs.
    pub fn parts(&self) -> (GaussianCoeffs, GaussianCoeffs) {
        let f = |p: &TauPoly| p.0.iter().map(|g| (g.re.clone(), g.im.clone())).collect();
        (f(&self.num), f(&self.den))
    }

    pub fn from_parts_list(num: &[(Rational, Rational)], den: &[(Rational, Rational)]) -> Option<Self> {
        let f = |v: &[(Rational, Rational)]| {
            let mut p = TauPoly(
                v.iter()
                    .map(|(re, im)| Gauss {
                        re: re.clone(),
                        im: im.clone(),
                    })
                    .collect(),
            );
            p.trim();
            p
        };
        let den = f(den);
        if den.is_zero() {
            return None;
        }
        Some(Exact::from_parts(f(num), den))
    }
}

impl Coeff for Exact {
    const EXACT: bool = true;

    fn zero() -> Self {
        Exact {
            num: TauPoly::default(),
            den: TauPoly::one(),
        }
    }
    fn one() -> Self {
        Exact {
            num: TauPoly::one(),
            den: TauPoly::one(),
        }
    }
    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
    fn plus(&self, o: &Self) -> Self {
        if self.den == o.den {
            return Exact::from_parts(self.num.add(&o.num), self.den.clone());
        }
        Exact::from_parts(
            self.num.mul(&o.den).add(&o.num.mul(&self.den)),
            self.den.mul(&o.den),
        )
    }
    fn minus(&self, o: &Self) -> Self {
        self.plus(&o.negated())
    }
    fn times(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        if self.den.is_one() && o.den.is_one() {
            return Exact {
                num: self.num.mul(&o.num),
                den: TauPoly::one(),
            };
        }
        Exact::from_parts(self.num.mul(&o.num), self.den.mul(&o.den))
    }
    fn negated(&self) -> Self {
        Exact {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }
    fn conjugate(&self) -> Self {
        // τ is real, so conjugation acts on the coefficients only.
        Exact::from_parts(self.num.conj(), self.den.conj())
    }
    fn recip(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(Exact::from_parts(self.den.clone(), self.num.clone()))
        }
    }
    fn from_rational(q: &Rational) -> Self {
        Exact::from_gaussian(q, &Rational::zero())
    }
    fn from_gaussian(re: &Rational, im: &Rational) -> Self {
        Exact {
            num: TauPoly::constant(Gauss {
                re: re.clone(),
                im: im.clone(),
            }),
            den: TauPoly::one(),
        }
    }
    fn from_c64(z: Complex64) -> Option<Self> {
        Some(Exact::from_gaussian(
            &rational_from_f64(z.re)?,
            &rational_from_f64(z.im)?,
        ))
    }
    fn two_pi() -> Self {
        Exact {
            num: TauPoly(vec![Gauss::zero(), Gauss::one()]),
            den: TauPoly::one(),
        }
    }
    fn imag_unit() -> Self {
        Exact::from_gaussian(&Rational::zero(), &Rational::one())
    }
    fn to_c64(&self) -> Complex64 {
        let t = core::f64::consts::TAU;
        self.num.eval(t) / self.den.eval(t)
    }
    fn pow_rational(&self, e: &Rational) -> Option<Self> {
        if !e.is_integer() {
            return None;
        }
        Coeff::powi(self, e.to_integer().to_i64()?)
    }
    fn phase(turns: &Rational) -> Option<Self> {
        let f = frac_part(turns);
        let four = &f * Rational::from_integer(BigInt::from(4));
        if !four.is_integer() {
            return None;
        }
        let (re, im) = match four.to_integer().to_i64()? {
            0 => (1, 0),
            1 => (0, 1),
            2 => (-1, 0),
            _ => (0, -1),
        };
        Some(Exact::from_gaussian(
            &Rational::from_integer(re.into()),
            &Rational::from_integer(im.into()),
        ))
    }
    fn from_basis_elem(elem: &BasisElem) -> Option<Self> {
        elem.exact.as_ref().map(Exact::from_rational)
    }
    fn negligible(&self, _scale: f64) -> bool {
        self.is_zero()
    }
}

fn fmt_rational(q: &Rational) -> String {
    if q.is_integer() {
        alloc::format!("{}", q.numer())
    } else {
        alloc::format!("{}/{}", q.numer(), q.denom())
    }
}

fn fmt_gauss(g: &Gauss) -> String {
    match (g.re.is_zero(), g.im.is_zero()) {
        (_, true) => fmt_rational(&g.re),
        (true, false) => alloc::format!("{}i", fmt_rational(&g.im)),
        (false, false) => {
            let sign = if g.im.is_negative() { "-" } else { "+" };
            alloc::format!("({} {} {}i)", fmt_rational(&g.re), sign, fmt_rational(&g.im.abs()))
        }
    }
}

fn fmt_tau_poly(p: &TauPoly) -> String {
    if p.is_zero() {
        return String::from("0");
    }
    let mut parts = Vec::new();
    for (k, c) in p.0.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let c = fmt_gauss(c);
        parts.push(match k {
            0 => c,
            1 => alloc::format!("{c}·τ"),
            _ => alloc::format!("{c}·τ^{k}"),
        });
    }
    parts.join(" + ")
}

impl fmt::Display for Exact {
    /// Displays the value with `τ = 2π`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", fmt_tau_poly(&self.num))
        } else {
            write!(f, "({}) / ({})", fmt_tau_poly(&self.num), fmt_tau_poly(&self.den))
        }
    }
}

/// Binomial coefficient as f64.
pub fn binomial(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * f64::from(n - i) / f64::from(i + 1);
    }
    acc
}

/// `ln(n!)`.
pub fn ln_factorial(n: u32) -> f64 {
    (2..=n).map(|k| Float::ln(f64::from(k))).sum()
}

pub fn factorial(n: u32) -> f64 {
    (2..=n).map(f64::from).product()
}

pub fn rational_factorial(n: u32) -> Rational {
    let mut acc = BigInt::one();
    for k in 2..=n {
        acc *= BigInt::from(k);
    }
    Rational::from_integer(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn exact_field_identities() {
        let tau = Exact::two_pi();
        let a = Exact::from_rational(&q(1, 1)).plus(&tau.times(&tau));
        let inv = a.recip().unwrap();
        assert_eq!(a.times(&inv), Exact::one());
        assert_eq!(inv.plus(&inv).minus(&inv), inv);
        let i = Exact::imag_unit();
        assert_eq!(i.times(&i), Exact::from_i64(-1));
        assert_eq!(i.conjugate(), i.negated());
    }

    #[test]
    fn exact_reduces_common_factors() {
        let tau = Exact::two_pi();
        let x = tau.times(&tau).plus(&tau);
        let y = tau.clone();
        let ratio = x.times(&y.recip().unwrap());
        assert_eq!(ratio, tau.plus(&Exact::one()));
    }

    #[test]
    fn exact_numeric_value() {
        let v = Exact::two_pi_i().recip().unwrap().to_c64();
        let expect = Complex64::new(0.0, -1.0 / core::f64::consts::TAU);
        assert!((v - expect).norm() < 1e-16);
        assert_eq!(Exact::phase(&q(3, 4)), Some(Exact::imag_unit().negated()));
        assert_eq!(Exact::phase(&q(1, 3)), None);
    }

    #[test]
    fn float_pruning_threshold() {
        let c = Complex64::new(1e-15, 0.0);
        assert!(c.negligible(1.0));
        assert!(!c.negligible(1e-2));
    }
}
