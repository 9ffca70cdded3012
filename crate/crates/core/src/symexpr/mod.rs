//! Symbols `a(x, ξ)` and amplitudes `a(x, y, ξ)` in a closed normal form.
//!
//! An expression is a sum of terms
//!
//! ```text
//! x-part(x) · y-part(y) · ξ^α · Π (1 + λ²|ξ|²)^{m/2} · Π D^{-k}
//! ```
//!
//! where the x and y parts are trigonometric polynomials, the brackets carry
//! rational exponents and each `D` is itself an expression (shared through an
//! `Arc`). The form is closed under sums, products, quotients and exact
//! differentiation in `x`, `y` and `ξ`. Brackets with an even nonnegative
//! exponent are expanded into polynomials, like terms are merged and a factor
//! equal to a denominator present in every term cancels it. No general
//! rational-function gcd is attempted.

mod class;
mod compiled;

pub use class::{verify_class, ClassParams, ClassReport, OrderStat, SymbolSampler, Witness, MAX_CLASS_ORDER, TREND_TOL};
pub use compiled::CompiledSymbol;

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::freq::{Basis, Frequency, MultiIndex};
use crate::scalar::{Coeff, Rational};
use crate::trigpoly::{xi_component, TrigPoly};

/// Denominators already mapped, as `(original, mapped)`.
type RecipCache<C> = Vec<(Arc<SymbolExpr<C>>, Arc<SymbolExpr<C>>)>;

/// Per-term rewrite used by [`SymbolExpr::map_terms`].
type TermMap<'a, C> = dyn Fn(&SymbolExpr<C>, &Term<C>, Vec<Recip<C>>) -> Result<Vec<Term<C>>> + 'a;

/// `(1 + λ²|ξ|²)^{m/2}`.
#[derive(Clone, Debug)]
pub struct Bracket<C: Coeff> {
    pub m: Rational,
    pub lambda2: C,
}

/// `D^{-power}`.
#[derive(Clone, Debug)]
pub struct Recip<C: Coeff> {
    pub den: Arc<SymbolExpr<C>>,
    pub power: u32,
}

/// One product term of a [`SymbolExpr`].
#[derive(Clone, Debug)]
pub struct Term<C: Coeff> {
    pub x: TrigPoly<C>,
    /// `None` stands for the constant 1. A stored y-part has leading
    /// coefficient 1; scalars live in the x-part.
    pub y: Option<TrigPoly<C>>,
    pub mono: MultiIndex,
    pub brackets: Vec<Bracket<C>>,
    pub recips: Vec<Recip<C>>,
}

/// Differentiation variable.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Var {
    X(usize),
    Y(usize),
    Xi(usize),
}

/// Symbol or amplitude in normal form.
#[derive(Clone, Debug)]
pub struct SymbolExpr<C: Coeff> {
    dim: usize,
    basis: Arc<Basis>,
    amplitude: bool,
    terms: Vec<Term<C>>,
}

fn same_den<C: Coeff>(a: &Arc<SymbolExpr<C>>, b: &Arc<SymbolExpr<C>>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

fn brackets_eq<C: Coeff>(a: &[Bracket<C>], b: &[Bracket<C>]) -> bool {
    a.len() == b.len()
        && a.iter()
            .all(|p| b.iter().any(|q| p.m == q.m && p.lambda2 == q.lambda2))
}

fn recips_eq<C: Coeff>(a: &[Recip<C>], b: &[Recip<C>]) -> bool {
    a.len() == b.len()
        && a.iter()
            .all(|p| b.iter().any(|q| p.power == q.power && same_den(&p.den, &q.den)))
}

impl<C: Coeff> Term<C> {
    fn same_factor(&self, o: &Self) -> bool {
        self.mono == o.mono
            && self.y == o.y
            && brackets_eq(&self.brackets, &o.brackets)
            && recips_eq(&self.recips, &o.recips)
    }

    fn scaled(&self, c: &C) -> Self {
        Term {
            x: self.x.scale(c),
            ..self.clone()
        }
    }

    /// Moves scalars out of the y-part and drops constant y-parts.
    fn normalize_y(mut self) -> Self {
        if let Some(y) = self.y.take() {
            if y.is_zero() {
                self.x = y;
                return self;
            }
            let lead = y.terms().values().next().expect("nonzero").clone();
            if y.is_constant() {
                self.x = self.x.scale(&lead);
            } else {
                let inv = lead.recip().expect("nonzero lead");
                self.x = self.x.scale(&lead);
                self.y = Some(y.scale(&inv));
            }
        }
        self
    }

    fn depends_on_y(&self) -> bool {
        self.y.is_some() || self.recips.iter().any(|r| r.den.depends_on_y())
    }
}

/// Expansion of `(1 + λ²|ξ|²)^k` as `(coefficient, monomial)` pairs.
fn expand_bracket<C: Coeff>(dim: usize, lambda2: &C, k: u32) -> Vec<(C, MultiIndex)> {
    let mut acc: Vec<(C, MultiIndex)> = vec![(C::one(), MultiIndex::zero(dim))];
    for _ in 0..k {
        let mut next: Vec<(C, MultiIndex)> = Vec::new();
        let mut push = |c: C, m: MultiIndex| match next.iter_mut().find(|(_, n)| *n == m) {
            Some((v, _)) => *v = v.plus(&c),
            None => next.push((c, m)),
        };
        for (c, m) in &acc {
            push(c.clone(), m.clone());
            for i in 0..dim {
                let mut e = MultiIndex::zero(dim);
                e.0[i] = 2;
                push(c.times(lambda2), m.add(&e));
            }
        }
        acc = next;
    }
    acc.retain(|(c, _)| !c.is_zero());
    acc
}

fn even_nonneg(m: &Rational) -> Option<u32> {
    if m.is_integer() && !m.is_negative() {
        let k = m.to_integer();
        let two = num_bigint::BigInt::from(2);
        if (&k % &two).is_zero() {
            return u32::try_from(k / two).ok();
        }
    }
    None
}

impl<C: Coeff> SymbolExpr<C> {
    fn empty(dim: usize, basis: Arc<Basis>, amplitude: bool) -> Self {
        SymbolExpr {
            dim,
            basis,
            amplitude,
            terms: Vec::new(),
        }
    }

    fn like(&self, amplitude: bool) -> Self {
        SymbolExpr::empty(self.dim, self.basis.clone(), amplitude)
    }

    /// The zero symbol.
    pub fn zero(dim: usize, basis: Arc<Basis>) -> Result<Self> {
        TrigPoly::<C>::zero(dim, basis.clone())?;
        Ok(SymbolExpr::empty(dim, basis, false))
    }

    pub fn constant(dim: usize, basis: Arc<Basis>, c: C) -> Result<Self> {
        let tp = TrigPoly::constant(dim, basis, c)?;
        Ok(SymbolExpr::from_trigpoly(tp))
    }

    pub fn one(dim: usize, basis: Arc<Basis>) -> Result<Self> {
        SymbolExpr::constant(dim, basis, C::one())
    }

    /// Symbol depending on `x` only.
    pub fn from_trigpoly(x: TrigPoly<C>) -> Self {
        let mut e = SymbolExpr::empty(x.dim(), x.basis().clone(), false);
        let dim = x.dim();
        e.push(Term {
            x,
            y: None,
            mono: MultiIndex::zero(dim),
            brackets: Vec::new(),
            recips: Vec::new(),
        });
        e
    }

    /// Amplitude depending on `y` only.
    pub fn from_y_trigpoly(y: TrigPoly<C>) -> Result<Self> {
        let one = TrigPoly::constant(y.dim(), y.basis().clone(), C::one())?;
        let mut e = SymbolExpr::empty(y.dim(), y.basis().clone(), true);
        let dim = y.dim();
        e.push(
            Term {
                x: one,
                y: Some(y),
                mono: MultiIndex::zero(dim),
                brackets: Vec::new(),
                recips: Vec::new(),
            }
            .normalize_y(),
        );
        Ok(e)
    }

    /// `c·ξ^α`.
    pub fn xi_mono(dim: usize, basis: Arc<Basis>, alpha: MultiIndex, c: C) -> Result<Self> {
        if alpha.dim() != dim {
            return Err(Error::DimensionMismatch {
                left: dim,
                right: alpha.dim(),
            });
        }
        let x = TrigPoly::constant(dim, basis.clone(), c)?;
        let mut e = SymbolExpr::empty(dim, basis, false);
        e.push(Term {
            x,
            y: None,
            mono: alpha,
            brackets: Vec::new(),
            recips: Vec::new(),
        });
        Ok(e)
    }

    /// `(1 + λ²|ξ|²)^{m/2}`; `λ² = 1` gives `⟨ξ⟩^m`.
    pub fn bracket(dim: usize, basis: Arc<Basis>, m: Rational, lambda2: C) -> Result<Self> {
        let x = TrigPoly::constant(dim, basis.clone(), C::one())?;
        let t = Term {
            x,
            y: None,
            mono: MultiIndex::zero(dim),
            brackets: if m.is_zero() {
                Vec::new()
            } else {
                vec![Bracket { m, lambda2 }]
            },
            recips: Vec::new(),
        };
        let mut e = SymbolExpr::empty(dim, basis, false);
        for t in e.expand_term(t) {
            e.push(t);
        }
        Ok(e)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn basis(&self) -> &Arc<Basis> {
        &self.basis
    }

    pub fn is_amplitude(&self) -> bool {
        self.amplitude
    }

    pub fn terms(&self) -> &[Term<C>] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Marks the expression as an amplitude.
    pub fn into_amplitude(mut self) -> Self {
        self.amplitude = true;
        self
    }

    fn push(&mut self, t: Term<C>) {
        if t.x.is_zero() {
            return;
        }
        if let Some(i) = self.terms.iter().position(|u| u.same_factor(&t)) {
            let sum = self.terms[i].x.add(&t.x).expect("compatible terms");
            if sum.is_zero() {
                self.terms.swap_remove(i);
            } else {
                self.terms[i].x = sum;
            }
        } else {
            self.terms.push(t);
        }
    }

    fn compatible(&self, o: &Self) -> Result<()> {
        if self.dim != o.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: o.dim,
            });
        }
        if !Arc::ptr_eq(&self.basis, &o.basis) && *self.basis != *o.basis {
            return Err(Error::BasisMismatch);
        }
        Ok(())
    }

    /// Expands brackets with even nonnegative exponent.
    fn expand_term(&self, mut t: Term<C>) -> Vec<Term<C>> {
        let pos = t.brackets.iter().position(|b| even_nonneg(&b.m).is_some());
        let Some(pos) = pos else {
            return vec![t];
        };
        let b = t.brackets.remove(pos);
        let k = even_nonneg(&b.m).expect("checked");
        let mut out = Vec::new();
        for (c, m) in expand_bracket(self.dim, &b.lambda2, k) {
            let mut u = t.scaled(&c);
            u.mono = u.mono.add(&m);
            out.extend(self.expand_term(u));
        }
        out
    }

    fn mul_terms(&self, a: &Term<C>, b: &Term<C>) -> Vec<Term<C>> {
        let x = a.x.mul(&b.x).expect("compatible terms");
        let y = match (&a.y, &b.y) {
            (None, None) => None,
            (Some(y), None) | (None, Some(y)) => Some(y.clone()),
            (Some(p), Some(q)) => Some(p.mul(q).expect("compatible terms")),
        };
        let mut brackets = a.brackets.clone();
        for q in &b.brackets {
            match brackets.iter_mut().find(|p| p.lambda2 == q.lambda2) {
                Some(p) => p.m = &p.m + &q.m,
                None => brackets.push(q.clone()),
            }
        }
        brackets.retain(|p| !p.m.is_zero());
        let mut recips = a.recips.clone();
        for q in &b.recips {
            match recips.iter_mut().find(|p| same_den(&p.den, &q.den)) {
                Some(p) => p.power += q.power,
                None => recips.push(q.clone()),
            }
        }
        let t = Term {
            x,
            y,
            mono: a.mono.add(&b.mono),
            brackets,
            recips,
        }
        .normalize_y();
        self.expand_term(t)
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        self.compatible(o)?;
        let mut e = self.like(self.amplitude || o.amplitude);
        e.terms = self.terms.clone();
        for t in &o.terms {
            e.push(t.clone());
        }
        Ok(e)
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(&C::one().negated())
    }

    pub fn scale(&self, c: &C) -> Self {
        let mut e = self.like(self.amplitude);
        if c.is_zero() {
            return e;
        }
        e.terms = self.terms.iter().map(|t| t.scaled(c)).collect();
        e.terms.retain(|t| !t.x.is_zero());
        e
    }

    /// Removes one power of `d` when it divides every term.
    fn cancel_den(&self, d: &Self) -> Option<Self> {
        let first = self.terms.first()?;
        for r in &first.recips {
            if r.den.len() != d.len() || *r.den != *d {
                continue;
            }
            let mut out = self.like(self.amplitude || d.amplitude);
            for t in &self.terms {
                let pos = t.recips.iter().position(|q| same_den(&q.den, &r.den))?;
                let mut u = t.clone();
                if u.recips[pos].power == 1 {
                    u.recips.remove(pos);
                } else {
                    u.recips[pos].power -= 1;
                }
                out.push(u);
            }
            return Some(out);
        }
        None
    }

    pub fn mul(&self, o: &Self) -> Result<Self> {
        self.compatible(o)?;
        if let Some(e) = self.cancel_den(o).or_else(|| o.cancel_den(self)) {
            return Ok(e);
        }
        let mut e = self.like(self.amplitude || o.amplitude);
        for a in &self.terms {
            for b in &o.terms {
                for t in self.mul_terms(a, b) {
                    e.push(t);
                }
            }
        }
        Ok(e)
    }

    pub fn pow(&self, n: u32) -> Result<Self> {
        let mut acc = SymbolExpr::one(self.dim, self.basis.clone())?;
        acc.amplitude = self.amplitude;
        for _ in 0..n {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// Inverse of a single term without a ξ monomial, when the x and y parts
    /// are single exponentials.
    fn invert_term(&self, t: &Term<C>) -> Option<Result<Self>> {
        if !t.mono.is_zero() || t.x.len() != 1 {
            return None;
        }
        let inv_tp = |p: &TrigPoly<C>| -> Option<TrigPoly<C>> {
            let (xi, c) = p.terms().iter().next()?;
            TrigPoly::monomial(p.dim(), p.basis().clone(), xi.neg(), c.recip()?).ok()
        };
        let x = inv_tp(&t.x)?;
        let y = match &t.y {
            None => None,
            Some(y) if y.len() == 1 => Some(inv_tp(y)?),
            Some(_) => return None,
        };
        let head = Term {
            x,
            y,
            mono: MultiIndex::zero(self.dim),
            brackets: t
                .brackets
                .iter()
                .map(|b| Bracket {
                    m: -&b.m,
                    lambda2: b.lambda2.clone(),
                })
                .collect(),
            recips: Vec::new(),
        }
        .normalize_y();
        let mut e = self.like(self.amplitude);
        for u in self.expand_term(head) {
            e.push(u);
        }
        let go = || -> Result<Self> {
            let mut acc = e;
            for r in &t.recips {
                acc = acc.mul(&r.den.pow(r.power)?)?;
            }
            Ok(acc)
        };
        Some(go())
    }

    /// `1 / d` as an expression sharing `d`.
    pub fn recip_of(d: Arc<Self>) -> Result<Self> {
        if d.is_zero() {
            return Err(Error::ZeroSymbol);
        }
        if d.terms.len() == 1 {
            if let Some(r) = d.invert_term(&d.terms[0]) {
                return r;
            }
        }
        let x = TrigPoly::constant(d.dim, d.basis.clone(), C::one())?;
        let mut e = d.like(false);
        e.push(Term {
            x,
            y: None,
            mono: MultiIndex::zero(d.dim),
            brackets: Vec::new(),
            recips: vec![Recip { den: d, power: 1 }],
        });
        Ok(e)
    }

    pub fn div(&self, d: &Self) -> Result<Self> {
        self.div_shared(&Arc::new(d.clone()))
    }

    /// Quotient by a shared denominator.
    pub fn div_shared(&self, d: &Arc<Self>) -> Result<Self> {
        self.compatible(d)?;
        if d.is_zero() {
            return Err(Error::ZeroSymbol);
        }
        if self.len() == d.len() && *self == **d {
            let mut one = SymbolExpr::one(self.dim, self.basis.clone())?;
            one.amplitude = self.amplitude || d.amplitude;
            return Ok(one);
        }
        self.mul(&SymbolExpr::recip_of(d.clone())?)
    }

    /// Depends on `y` somewhere.
    pub fn depends_on_y(&self) -> bool {
        self.terms.iter().any(Term::depends_on_y)
    }

    /// Depends on `x` somewhere.
    pub fn depends_on_x(&self) -> bool {
        self.terms
            .iter()
            .any(|t| !t.x.is_constant() || t.recips.iter().any(|r| r.den.depends_on_x()))
    }

    /// Depends on `ξ` somewhere.
    pub fn depends_on_xi(&self) -> bool {
        self.terms.iter().any(|t| {
            !t.mono.is_zero() || !t.brackets.is_empty() || t.recips.iter().any(|r| r.den.depends_on_xi())
        })
    }

    /// ξ-degree when the expression is polynomial in ξ.
    pub fn xi_degree(&self) -> Option<u32> {
        let mut deg = 0;
        for t in &self.terms {
            if !t.brackets.is_empty() || !t.recips.is_empty() {
                return None;
            }
            deg = deg.max(t.mono.order());
        }
        Some(deg)
    }

    /// Sum of the x-parts when the expression is a trigonometric polynomial
    /// in `x` alone.
    pub fn try_trigpoly(&self) -> Option<TrigPoly<C>> {
        let mut acc = TrigPoly::zero(self.dim, self.basis.clone()).ok()?;
        for t in &self.terms {
            if t.y.is_some() || !t.mono.is_zero() || !t.brackets.is_empty() || !t.recips.is_empty() {
                return None;
            }
            acc = acc.add(&t.x).ok()?;
        }
        Some(acc)
    }

    /// Polynomial coefficients `ξ^α ↦ c_α(x)` when the expression is a
    /// symbol polynomial in ξ with trigonometric coefficients.
    pub fn poly_coeffs(&self) -> Option<Vec<(MultiIndex, TrigPoly<C>)>> {
        let mut out: Vec<(MultiIndex, TrigPoly<C>)> = Vec::new();
        for t in &self.terms {
            if t.y.is_some() || !t.brackets.is_empty() || !t.recips.is_empty() {
                return None;
            }
            match out.iter_mut().find(|(m, _)| *m == t.mono) {
                Some((_, p)) => *p = p.add(&t.x).ok()?,
                None => out.push((t.mono.clone(), t.x.clone())),
            }
        }
        out.retain(|(_, p)| !p.is_zero());
        out.sort_by(|a, b| a.0.cmp(&b.0));
        Some(out)
    }

    /// First-order partial derivative.
    pub fn derive(&self, var: Var) -> Result<Self> {
        let mut cache: Vec<(Arc<Self>, Self)> = Vec::new();
        self.derive_cached(var, &mut cache)
    }

    fn derive_cached(&self, var: Var, cache: &mut Vec<(Arc<Self>, Self)>) -> Result<Self> {
        let (Var::X(axis) | Var::Y(axis) | Var::Xi(axis)) = var;
        if axis >= self.dim {
            return Err(Error::invalid("derivative axis out of range"));
        }
        if matches!(var, Var::Y(_)) && !self.amplitude {
            return Ok(self.like(false));
        }
        let e_i = |i: usize| MultiIndex::unit(self.dim, i);
        let mut out = self.like(self.amplitude);
        for t in &self.terms {
            match var {
                Var::X(i) => {
                    out.push(Term {
                        x: t.x.derivative(&e_i(i)),
                        ..t.clone()
                    });
                }
                Var::Y(i) => {
                    if let Some(y) = &t.y {
                        out.push(
                            Term {
                                y: Some(y.derivative(&e_i(i))),
                                ..t.clone()
                            }
                            .normalize_y(),
                        );
                    }
                }
                Var::Xi(i) => {
                    let a = t.mono.0[i];
                    if a > 0 {
                        let mut mono = t.mono.clone();
                        mono.0[i] -= 1;
                        out.push(Term {
                            x: t.x.scale(&C::from_i64(i64::from(a))),
                            mono,
                            ..t.clone()
                        });
                    }
                    for (j, b) in t.brackets.iter().enumerate() {
                        // ∂_i (1+λ²|ξ|²)^{m/2} = m λ² ξ_i (1+λ²|ξ|²)^{(m-2)/2}
                        let mut u = t.clone();
                        u.x = u.x.scale(&C::from_rational(&b.m).times(&b.lambda2));
                        u.mono = u.mono.add(&e_i(i));
                        u.brackets[j].m = &b.m - Rational::from_integer(2.into());
                        if u.brackets[j].m.is_zero() {
                            u.brackets.remove(j);
                        }
                        for v in self.expand_term(u) {
                            out.push(v);
                        }
                    }
                }
            }
            for (j, r) in t.recips.iter().enumerate() {
                let dd = match cache.iter().find(|(k, _)| Arc::ptr_eq(k, &r.den)) {
                    Some((_, v)) => v.clone(),
                    None => {
                        let v = r.den.derive_cached(var, cache)?;
                        cache.push((r.den.clone(), v.clone()));
                        v
                    }
                };
                if dd.is_zero() {
                    continue;
                }
                // ∂ D^{-k} = -k D^{-k-1} ∂D
                let mut u = t.scaled(&C::from_i64(-i64::from(r.power)));
                u.recips[j].power += 1;
                let mut single = self.like(self.amplitude);
                single.push(u);
                let prod = single.mul(&dd)?;
                for v in prod.terms {
                    out.push(v);
                }
            }
        }
        Ok(out)
    }

    fn derive_multi(&self, alpha: &MultiIndex, var: fn(usize) -> Var) -> Result<Self> {
        let mut e = self.clone();
        for (i, &a) in alpha.0.iter().enumerate() {
            for _ in 0..a {
                e = e.derive(var(i))?;
            }
        }
        Ok(e)
    }

    /// `∂_x^β`.
    pub fn dx(&self, beta: &MultiIndex) -> Result<Self> {
        self.derive_multi(beta, Var::X)
    }

    /// `∂_y^γ`.
    pub fn dy(&self, gamma: &MultiIndex) -> Result<Self> {
        self.derive_multi(gamma, Var::Y)
    }

    /// `∂_ξ^α`.
    pub fn dxi(&self, alpha: &MultiIndex) -> Result<Self> {
        self.derive_multi(alpha, Var::Xi)
    }

    /// Applies `f` to every term and to every denominator, sharing results
    /// for shared denominators.
    fn map_terms(
        &self,
        amplitude: bool,
        cache: &mut RecipCache<C>,
        f: &TermMap<'_, C>,
    ) -> Result<Self> {
        let mut out = self.like(amplitude);
        for t in &self.terms {
            let mut recips = Vec::with_capacity(t.recips.len());
            for r in &t.recips {
                let den = match cache.iter().find(|(k, _)| Arc::ptr_eq(k, &r.den)) {
                    Some((_, v)) => v.clone(),
                    None => {
                        let v = Arc::new(r.den.map_terms(amplitude && r.den.amplitude, cache, f)?);
                        cache.push((r.den.clone(), v.clone()));
                        v
                    }
                };
                recips.push(Recip {
                    den,
                    power: r.power,
                });
            }
            for u in f(self, t, recips)? {
                out.push(u);
            }
        }
        Ok(out)
    }

    /// `a(x, -ξ)`.
    pub fn reflect_xi(&self) -> Result<Self> {
        let mut cache = Vec::new();
        self.map_terms(self.amplitude, &mut cache, &|_, t, recips| {
            let x = if t.mono.order() % 2 == 1 {
                t.x.neg()
            } else {
                t.x.clone()
            };
            Ok(vec![Term {
                x,
                recips,
                ..t.clone()
            }])
        })
    }

    /// `a(x, x, ξ)` for an amplitude; the identity on symbols.
    pub fn restrict_diagonal(&self) -> Result<Self> {
        let mut cache = Vec::new();
        self.map_terms(false, &mut cache, &|_, t, recips| {
            let x = match &t.y {
                Some(y) => t.x.mul(y)?,
                None => t.x.clone(),
            };
            Ok(vec![Term {
                x,
                y: None,
                recips,
                ..t.clone()
            }])
        })
    }

    /// `conj(a(y, x, ξ))` as an amplitude: the amplitude of the formal
    /// adjoint of `a(x, D)`.
    pub fn adjoint_amplitude(&self) -> Result<Self> {
        let mut cache = Vec::new();
        self.map_terms(true, &mut cache, &|_, t, recips| {
            let new_y = t.x.conj();
            let new_x = match &t.y {
                Some(y) => y.conj(),
                None => TrigPoly::constant(t.x.dim(), t.x.basis().clone(), C::one())?,
            };
            Ok(vec![Term {
                x: new_x,
                y: Some(new_y),
                mono: t.mono.clone(),
                brackets: t
                    .brackets
                    .iter()
                    .map(|b| Bracket {
                        m: b.m.clone(),
                        lambda2: b.lambda2.conjugate(),
                    })
                    .collect(),
                recips,
            }
            .normalize_y()])
        })
    }

    /// Freezes `ξ = η`, leaving an expression in `x` (and `y` for
    /// amplitudes). Needs exact bracket values in exact mode.
    pub fn at_frequency(&self, eta: &Frequency) -> Result<Self> {
        let expected = self.dim * self.basis.len();
        if eta.len() != expected {
            return Err(Error::FrequencyShape {
                expected,
                got: eta.len(),
            });
        }
        let comps: Vec<C> = (0..self.dim)
            .map(|i| xi_component::<C>(eta, i, &self.basis))
            .collect();
        let norm2 = comps
            .iter()
            .fold(C::zero(), |acc, c| acc.plus(&c.times(c)));
        let mut cache = Vec::new();
        let frozen = self.map_terms(self.amplitude, &mut cache, &|e, t, recips| {
            let mut c = C::one();
            for (i, &a) in t.mono.0.iter().enumerate() {
                c = c.times(&comps[i].powi(i64::from(a)).expect("nonnegative"));
            }
            for b in &t.brackets {
                let base = C::one().plus(&b.lambda2.times(&norm2));
                let half = &b.m / Rational::from_integer(2.into());
                let v = base.pow_rational(&half).ok_or_else(|| {
                    Error::NotExact(alloc::format!("bracket power {} at {}", b.m, eta))
                })?;
                c = c.times(&v);
            }
            let mut u = Term {
                x: t.x.scale(&c),
                y: t.y.clone(),
                mono: MultiIndex::zero(e.dim),
                brackets: Vec::new(),
                recips: Vec::new(),
            };
            // invert denominators that became single exponentials
            let mut rest = Vec::new();
            for r in recips {
                match r.den.try_trigpoly() {
                    Some(p) if p.len() == 1 => {
                        let (xi, v) = p.terms().iter().next().expect("one term");
                        let inv = v.recip().ok_or(Error::ZeroSymbol)?;
                        let q = TrigPoly::monomial(p.dim(), p.basis().clone(), xi.neg(), inv)?
                            .into_power(r.power)?;
                        u.x = u.x.mul(&q)?;
                    }
                    Some(p) if p.is_zero() => {
                        return Err(Error::Domain {
                            x: Vec::new(),
                            xi: eta.to_f64(e.dim, &e.basis),
                        })
                    }
                    _ => rest.push(r),
                }
            }
            u.recips = rest;
            Ok(vec![u.normalize_y()])
        })?;
        Ok(frozen)
    }

    /// Splits an amplitude as `Σ_μ g_μ(x, ξ) e^{2πiμ·y}`.
    pub fn y_components(&self) -> Result<Vec<(Frequency, Self)>> {
        let mut out: Vec<(Frequency, Self)> = Vec::new();
        for t in &self.terms {
            if t.recips.iter().any(|r| r.den.depends_on_y()) {
                return Err(Error::Unsupported(
                    "amplitude whose y-dependence is a trigonometric polynomial".into(),
                ));
            }
            let parts: Vec<(Frequency, C)> = match &t.y {
                None => vec![(Frequency::zero(self.dim, self.basis.len()), C::one())],
                Some(y) => y.terms().iter().map(|(k, v)| (k.clone(), v.clone())).collect(),
            };
            for (mu, c) in parts {
                let u = Term {
                    y: None,
                    ..t.scaled(&c)
                };
                match out.iter_mut().find(|(k, _)| *k == mu) {
                    Some((_, g)) => g.push(u),
                    None => {
                        let mut g = self.like(false);
                        g.push(u);
                        out.push((mu, g));
                    }
                }
            }
        }
        out.retain(|(_, g)| !g.is_zero());
        out.sort_by(|a, b| a.0.cmp(&b.0));
        Ok(out)
    }

    /// Splits a symbol as `Σ_μ e^{2πiμ·x} a_μ(ξ)`. Denominators must not
    /// depend on `x`.
    pub fn x_components(&self) -> Result<Vec<(Frequency, Self)>> {
        if self.amplitude {
            return Err(Error::Unsupported("symbol in (x, ξ)".into()));
        }
        let mut out: Vec<(Frequency, Self)> = Vec::new();
        for t in &self.terms {
            if t.recips.iter().any(|r| r.den.depends_on_x()) {
                return Err(Error::Unsupported(
                    "symbol whose x-dependence is a trigonometric polynomial".into(),
                ));
            }
            for (mu, c) in t.x.terms() {
                let u = Term {
                    x: TrigPoly::constant(self.dim, self.basis.clone(), c.clone())?,
                    ..t.clone()
                };
                match out.iter_mut().find(|(k, _)| k == mu) {
                    Some((_, g)) => g.push(u),
                    None => {
                        let mut g = self.like(false);
                        g.push(u);
                        out.push((mu.clone(), g));
                    }
                }
            }
        }
        out.retain(|(_, g)| !g.is_zero());
        out.sort_by(|a, b| a.0.cmp(&b.0));
        Ok(out)
    }

    /// Frequencies of all x-parts, denominators included, without repeats.
    pub fn x_frequencies(&self) -> Vec<Frequency> {
        let mut out: Vec<Frequency> = Vec::new();
        let mut seen: Vec<*const Self> = Vec::new();
        self.collect_x_frequencies(&mut out, &mut seen);
        out.sort();
        out
    }

    fn collect_x_frequencies(&self, out: &mut Vec<Frequency>, seen: &mut Vec<*const Self>) {
        for t in &self.terms {
            for xi in t.x.frequencies() {
                if !out.contains(xi) {
                    out.push(xi.clone());
                }
            }
            for r in &t.recips {
                let key = Arc::as_ptr(&r.den);
                if !seen.contains(&key) {
                    seen.push(key);
                    r.den.collect_x_frequencies(out, seen);
                }
            }
        }
    }

    /// Converts to float coefficients.
    pub fn to_float(&self) -> SymbolExpr<Complex64> {
        let mut cache: Vec<(*const Self, Arc<SymbolExpr<Complex64>>)> = Vec::new();
        self.to_float_cached(&mut cache)
    }

    fn to_float_cached(
        &self,
        cache: &mut Vec<(*const Self, Arc<SymbolExpr<Complex64>>)>,
    ) -> SymbolExpr<Complex64> {
        let mut out = SymbolExpr::<Complex64>::empty(self.dim, self.basis.clone(), self.amplitude);
        for t in &self.terms {
            let recips = t
                .recips
                .iter()
                .map(|r| {
                    let key = Arc::as_ptr(&r.den);
                    let den = match cache.iter().find(|(k, _)| *k == key) {
                        Some((_, v)) => v.clone(),
                        None => {
                            let v = Arc::new(r.den.to_float_cached(cache));
                            cache.push((key, v.clone()));
                            v
                        }
                    };
                    Recip {
                        den,
                        power: r.power,
                    }
                })
                .collect();
            out.push(Term {
                x: t.x.to_float(),
                y: t.y.as_ref().map(TrigPoly::to_float),
                mono: t.mono.clone(),
                brackets: t
                    .brackets
                    .iter()
                    .map(|b| Bracket {
                        m: b.m.clone(),
                        lambda2: b.lambda2.to_c64(),
                    })
                    .collect(),
                recips,
            });
        }
        out
    }

    /// Flattened evaluator.
    pub fn compile(&self) -> CompiledSymbol {
        CompiledSymbol::new(self)
    }

    /// Value at `(x, ξ)`; amplitudes are evaluated on the diagonal `y = x`.
    pub fn eval(&self, x: &[f64], xi: &[f64]) -> Result<Complex64> {
        self.compile().eval(x, x, xi)
    }

    /// Value of an amplitude at `(x, y, ξ)`.
    pub fn eval_amp(&self, x: &[f64], y: &[f64], xi: &[f64]) -> Result<Complex64> {
        self.compile().eval(x, y, xi)
    }

    /// Number of distinct denominators reachable from this expression.
    pub fn denominator_count(&self) -> usize {
        self.compile().denominator_count()
    }
}

impl<C: Coeff> TrigPoly<C> {
    fn into_power(self, k: u32) -> Result<Self> {
        let mut acc = TrigPoly::constant(self.dim(), self.basis().clone(), C::one())?;
        for _ in 0..k {
            acc = acc.mul(&self)?;
        }
        Ok(acc)
    }
}

impl<C: Coeff> PartialEq for SymbolExpr<C> {
    /// Structural equality of normal forms, as multisets of terms.
    fn eq(&self, o: &Self) -> bool {
        self.dim == o.dim
            && self.terms.len() == o.terms.len()
            && self
                .terms
                .iter()
                .all(|t| o.terms.iter().any(|u| u.same_factor(t) && u.x == t.x))
    }
}

/// `1 + λ²|ξ|²` with `λ² = (2π)²`, i.e. `⟨2πξ⟩²`, as a polynomial.
pub fn two_pi_bracket_sq<C: Coeff>(dim: usize, basis: Arc<Basis>) -> Result<SymbolExpr<C>> {
    let tau = C::two_pi();
    SymbolExpr::bracket(dim, basis, Rational::from_integer(2.into()), tau.times(&tau))
}

/// Rational number from a small fraction.
pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

impl<C: Coeff> SymbolExpr<C> {
    /// Shorthand for symbols over the standard basis.
    pub fn std_basis() -> Arc<Basis> {
        Arc::new(Basis::standard())
    }

    /// `c·ξ^α` over the standard basis.
    pub fn std_mono(alpha: &[u32], c: C) -> Self {
        SymbolExpr::xi_mono(alpha.len(), Self::std_basis(), MultiIndex(alpha.to_vec()), c)
            .expect("well-formed monomial")
    }

    /// `⟨ξ⟩^m` over the standard basis.
    pub fn std_bracket(dim: usize, m: Rational) -> Self {
        SymbolExpr::bracket(dim, Self::std_basis(), m, C::one()).expect("standard bracket")
    }

    /// Trigonometric polynomial with integer frequencies as an x-symbol.
    pub fn std_trig(dim: usize, terms: &[(&[i64], C)]) -> Self {
        SymbolExpr::from_trigpoly(TrigPoly::from_int_terms(dim, terms))
    }

    pub fn is_one(&self) -> bool {
        self.try_trigpoly()
            .is_some_and(|p| p.len() == 1 && p.is_constant() && p.mean_value() == C::one())
    }
}

#[cfg(test)]
mod tests;
