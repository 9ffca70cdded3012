//! Sparse trigonometric polynomials `Σ f̂_ξ e^{2πiξ·x}`.

use alloc::collections::BTreeMap;
use alloc::sync::Arc;
use alloc::vec::Vec;

use num_complex::Complex64;
use num_traits::{Float, Zero};

use crate::error::{Error, Result};
use crate::freq::{Basis, Frequency, MultiIndex};
use crate::scalar::{Coeff, Exact, Rational};

/// Trigonometric polynomial over a frequency basis.
///
/// The term map never stores a zero coefficient. In float mode coefficients
/// below `1e-14` times the largest one are pruned after every operation.
#[derive(Clone, Debug, PartialEq)]
pub struct TrigPoly<C: Coeff> {
    dim: usize,
    basis: Arc<Basis>,
    terms: BTreeMap<Frequency, C>,
}

/// Weight of a coefficient norm.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Weight {
    /// `⟨ξ⟩^{t}`.
    Poly { t: f64 },
    /// `exp(-ε|ξ|^{1/s})`.
    Exp { s: f64, eps: f64 },
}

/// Parameters of the weighted `ℓ^p` coefficient norms.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormParams {
    /// Exponent in `[1, ∞]`.
    pub p: f64,
    pub weight: Weight,
}

impl NormParams {
    pub fn sobolev(p: f64, t: f64) -> Self {
        NormParams {
            p,
            weight: Weight::Poly { t },
        }
    }

    pub fn gevrey(p: f64, s: f64, eps: f64) -> Self {
        NormParams {
            p,
            weight: Weight::Exp { s, eps },
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p >= 1.0) {
            return Err(Error::invalid("norm exponent p must be at least 1"));
        }
        match self.weight {
            Weight::Exp { s, eps } if !(s >= 1.0) || !eps.is_finite() => {
                Err(Error::invalid("Gevrey weight needs s >= 1 and finite eps"))
            }
            Weight::Poly { t } if !t.is_finite() => Err(Error::invalid("weight order must be finite")),
            _ => Ok(()),
        }
    }

    /// Weight factor at a frequency of length `r`, raised to the power one.
    pub fn weight_at(&self, r: f64) -> f64 {
        match self.weight {
            Weight::Poly { t } => Float::powf(1.0 + r * r, 0.5 * t),
            Weight::Exp { s, eps } => Float::exp(-eps * Float::powf(r, 1.0 / s)),
        }
    }

    /// Weighted `ℓ^p` norm of magnitudes given with their frequency lengths.
    pub fn apply(&self, items: impl Iterator<Item = (f64, f64)>) -> f64 {
        if self.p.is_infinite() {
            return items
                .map(|(r, a)| self.weight_at(r) * a)
                .fold(0.0, f64::max);
        }
        let p = self.p;
        let total: f64 = match self.weight {
            // exp(-pε|ξ|^{1/s}) |f̂|^p evaluated in log space to avoid overflow
            Weight::Exp { s, eps } => items
                .filter(|(_, a)| *a > 0.0)
                .map(|(r, a)| Float::exp(p * (Float::ln(a) - eps * Float::powf(r, 1.0 / s))))
                .sum(),
            Weight::Poly { t } => items
                .map(|(r, a)| Float::powf(1.0 + r * r, 0.5 * p * t) * Float::powf(a, p))
                .sum(),
        };
        Float::powf(total, 1.0 / p)
    }
}

/// Lower and upper bounds for the global Gevrey seminorm.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GevreyBounds {
    /// Maximum of `C^{-|α|}(α!)^{-s}|∂^α f(x)|` over the grid and `|α| <= N_max`.
    pub lower: f64,
    /// Same maximum with the supremum in `x` replaced by the `ℓ¹` bound.
    pub upper_truncated: f64,
    /// Bound over all `α`: `Σ |f̂_ξ| exp(s d (2π|ξ|/C)^{1/s})`.
    pub upper_global: f64,
}

fn check_basis<C: Coeff>(basis: &Basis) -> Result<()> {
    if C::EXACT && !basis.is_rational() {
        return Err(Error::NotExact(alloc::format!(
            "exact coefficients need a rational frequency basis, got {:?}",
            basis.labels()
        )));
    }
    Ok(())
}

/// Component `i` of `ξ` as a coefficient.
pub(crate) fn xi_component<C: Coeff>(xi: &Frequency, i: usize, basis: &Basis) -> C {
    if C::EXACT {
        let q = xi
            .exact_component(i, basis)
            .expect("exact mode requires a rational basis");
        C::from_rational(&q)
    } else {
        C::from_c64(Complex64::new(xi.component(i, basis), 0.0)).expect("float conversion")
    }
}

/// `(2πiξ)^α` as a coefficient.
pub(crate) fn fourier_multiplier<C: Coeff>(xi: &Frequency, alpha: &MultiIndex, basis: &Basis) -> C {
    let mut acc = C::two_pi_i()
        .powi(i64::from(alpha.order()))
        .expect("nonnegative power");
    for (i, &a) in alpha.0.iter().enumerate() {
        if a > 0 {
            let c = xi_component::<C>(xi, i, basis);
            acc = acc.times(&c.powi(i64::from(a)).expect("nonnegative power"));
        }
    }
    acc
}

impl<C: Coeff> TrigPoly<C> {
    pub fn zero(dim: usize, basis: Arc<Basis>) -> Result<Self> {
        check_basis::<C>(&basis)?;
        Ok(TrigPoly {
            dim,
            basis,
            terms: BTreeMap::new(),
        })
    }

    /// Builds a polynomial from `(frequency, coefficient)` pairs, summing
    /// repeated frequencies.
    pub fn from_terms(
        dim: usize,
        basis: Arc<Basis>,
        terms: impl IntoIterator<Item = (Frequency, C)>,
    ) -> Result<Self> {
        let mut p = TrigPoly::<C>::zero(dim, basis)?;
        let expected = dim * p.basis.len();
        for (xi, c) in terms {
            if xi.len() != expected {
                return Err(Error::FrequencyShape {
                    expected,
                    got: xi.len(),
                });
            }
            match p.terms.get_mut(&xi) {
                Some(v) => *v = v.plus(&c),
                None => {
                    p.terms.insert(xi, c);
                }
            }
        }
        p.prune();
        Ok(p)
    }

    /// Integer-frequency polynomial over the standard basis.
    pub fn from_int_terms(dim: usize, terms: &[(&[i64], C)]) -> Self {
        let basis = Arc::new(Basis::standard());
        TrigPoly::from_terms(
            dim,
            basis,
            terms
                .iter()
                .map(|(xi, c)| (Frequency::from_ints(xi), c.clone())),
        )
        .expect("well-formed integer terms")
    }

    /// `c·e_ξ`.
    pub fn monomial(dim: usize, basis: Arc<Basis>, xi: Frequency, c: C) -> Result<Self> {
        TrigPoly::from_terms(dim, basis, [(xi, c)])
    }

    /// The constant function `c`.
    pub fn constant(dim: usize, basis: Arc<Basis>, c: C) -> Result<Self> {
        let z = Frequency::zero(dim, basis.len());
        TrigPoly::from_terms(dim, basis, [(z, c)])
    }

    /// `e_ξ` for an integer frequency over the standard basis.
    pub fn exp_int(xi: &[i64]) -> Self {
        TrigPoly::from_int_terms(xi.len(), &[(xi, C::one())])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn basis(&self) -> &Arc<Basis> {
        &self.basis
    }

    pub fn terms(&self) -> &BTreeMap<Frequency, C> {
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

    /// True when the only frequency is zero.
    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Frequency::is_zero)
    }

    /// The frequency set `Λ(f)`.
    pub fn frequencies(&self) -> impl Iterator<Item = &Frequency> {
        self.terms.keys()
    }

    pub fn max_abs(&self) -> f64 {
        self.terms.values().map(Coeff::abs).fold(0.0, f64::max)
    }

    fn prune(&mut self) {
        let scale = if C::EXACT { 0.0 } else { self.max_abs() };
        self.terms.retain(|_, c| !c.is_zero() && !c.negligible(scale));
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

    fn with_terms(&self, terms: BTreeMap<Frequency, C>) -> Self {
        let mut p = TrigPoly {
            dim: self.dim,
            basis: self.basis.clone(),
            terms,
        };
        p.prune();
        p
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        self.compatible(o)?;
        let mut terms = self.terms.clone();
        for (xi, c) in &o.terms {
            match terms.get_mut(xi) {
                Some(v) => *v = v.plus(c),
                None => {
                    terms.insert(xi.clone(), c.clone());
                }
            }
        }
        Ok(self.with_terms(terms))
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(&C::one().negated())
    }

    pub fn scale(&self, c: &C) -> Self {
        self.with_terms(
            self.terms
                .iter()
                .map(|(xi, v)| (xi.clone(), v.times(c)))
                .collect(),
        )
    }

    /// Pointwise product, i.e. convolution of coefficient maps.
    pub fn mul(&self, o: &Self) -> Result<Self> {
        self.compatible(o)?;
        let mut terms: BTreeMap<Frequency, C> = BTreeMap::new();
        for (a, ca) in &self.terms {
            for (b, cb) in &o.terms {
                let xi = a.add(b);
                let v = ca.times(cb);
                match terms.get_mut(&xi) {
                    Some(t) => *t = t.plus(&v),
                    None => {
                        terms.insert(xi, v);
                    }
                }
            }
        }
        Ok(self.with_terms(terms))
    }

    /// Complex conjugate: the coefficient at `ξ` becomes `conj(f̂_{-ξ})`.
    pub fn conj(&self) -> Self {
        self.with_terms(
            self.terms
                .iter()
                .map(|(xi, c)| (xi.neg(), c.conjugate()))
                .collect(),
        )
    }

    /// `∂^α f`: the coefficient at `ξ` is multiplied by `(2πiξ)^α`.
    pub fn derivative(&self, alpha: &MultiIndex) -> Self {
        if alpha.is_zero() {
            return self.clone();
        }
        self.with_terms(
            self.terms
                .iter()
                .map(|(xi, c)| {
                    let m: C = fourier_multiplier(xi, alpha, &self.basis);
                    (xi.clone(), c.times(&m))
                })
                .collect(),
        )
    }

    pub fn mean_value(&self) -> C {
        self.bohr_coeff(&Frequency::zero(self.dim, self.basis.len()))
    }

    pub fn bohr_coeff(&self, xi: &Frequency) -> C {
        self.terms.get(xi).cloned().unwrap_or_else(C::zero)
    }

    /// `(f, g)_B = Σ f̂_ξ conj(ĝ_ξ)`.
    pub fn besicovitch_inner(&self, o: &Self) -> Result<C> {
        self.compatible(o)?;
        let mut acc = C::zero();
        for (xi, c) in &self.terms {
            if let Some(d) = o.terms.get(xi) {
                acc = acc.plus(&c.times(&d.conjugate()));
            }
        }
        Ok(acc)
    }

    /// Mean-value convolution: coefficientwise product.
    pub fn mv_convolution(&self, o: &Self) -> Result<Self> {
        self.compatible(o)?;
        Ok(self.with_terms(
            self.terms
                .iter()
                .filter_map(|(xi, c)| o.terms.get(xi).map(|d| (xi.clone(), c.times(d))))
                .collect(),
        ))
    }

    /// `f(· + τ)` for a translation given in exact coordinates per axis.
    ///
    /// Exact coefficients need every phase `ξ·τ` to be a multiple of a
    /// quarter turn.
    pub fn translate(&self, tau: &[Rational]) -> Result<Self> {
        if tau.len() != self.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: tau.len(),
            });
        }
        let mut terms = BTreeMap::new();
        for (xi, c) in &self.terms {
            let phase = if C::EXACT {
                let mut turns = Rational::zero();
                for (i, t) in tau.iter().enumerate() {
                    let comp = xi
                        .exact_component(i, &self.basis)
                        .ok_or_else(|| Error::NotExact("irrational frequency".into()))?;
                    turns += comp * t;
                }
                C::phase(&turns).ok_or_else(|| {
                    Error::NotExact(alloc::format!("phase of {turns} turns is not a Gaussian rational"))
                })?
            } else {
                let turns: f64 = tau
                    .iter()
                    .enumerate()
                    .map(|(i, t)| xi.component(i, &self.basis) * crate::scalar::rational_to_f64(t))
                    .sum();
                C::from_c64(Complex64::from_polar(1.0, core::f64::consts::TAU * turns))
                    .expect("float phase")
            };
            terms.insert(xi.clone(), c.times(&phase));
        }
        Ok(self.with_terms(terms))
    }

    /// Pointwise value.
    pub fn eval(&self, x: &[f64]) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (xi, c) in &self.terms {
            let dot: f64 = (0..self.dim).map(|i| xi.component(i, &self.basis) * x[i]).sum();
            acc += c.to_c64() * Complex64::from_polar(1.0, core::f64::consts::TAU * dot);
        }
        acc
    }

    /// `(|ξ|, |f̂_ξ|)` pairs.
    pub fn magnitudes(&self) -> Vec<(f64, f64)> {
        self.terms
            .iter()
            .map(|(xi, c)| (xi.norm(self.dim, &self.basis), c.abs()))
            .collect()
    }

    /// Weighted `ℓ^p` norm of the coefficients.
    pub fn norm(&self, params: &NormParams) -> Result<f64> {
        params.validate()?;
        Ok(params.apply(self.magnitudes().into_iter()))
    }

    /// Bounds for `sup_{α,x} C^{-|α|}(α!)^{-s}|∂^α f(x)|`.
    pub fn gevrey_seminorm_lb(
        &self,
        s: f64,
        c: f64,
        n_max: u32,
        grid: &[Vec<f64>],
    ) -> Result<GevreyBounds> {
        if !(c > 0.0) || !(s >= 1.0) {
            return Err(Error::invalid("Gevrey seminorm needs C > 0 and s >= 1"));
        }
        let freqs: Vec<(Vec<f64>, Complex64)> = self
            .terms
            .iter()
            .map(|(xi, v)| (xi.to_f64(self.dim, &self.basis), v.to_c64()))
            .collect();
        let tau = core::f64::consts::TAU;
        let mut lower = 0.0f64;
        let mut upper_truncated = 0.0f64;
        for alpha in MultiIndex::up_to(self.dim, n_max) {
            let scale = Float::powi(c, -(alpha.order() as i32)) * Float::powf(alpha.factorial(), -s);
            // derivative coefficients (2πiξ)^α f̂_ξ
            let coeffs: Vec<(Vec<f64>, Complex64)> = freqs
                .iter()
                .map(|(xi, v)| {
                    let m = Complex64::new(0.0, tau).powu(alpha.order()) * alpha.pow(xi);
                    (xi.clone(), v * m)
                })
                .collect();
            let l1: f64 = coeffs.iter().map(|(_, v)| v.norm()).sum();
            upper_truncated = upper_truncated.max(scale * l1);
            for x in grid {
                let val: Complex64 = coeffs
                    .iter()
                    .map(|(xi, v)| {
                        let dot: f64 = xi.iter().zip(x).map(|(a, b)| a * b).sum();
                        v * Complex64::from_polar(1.0, tau * dot)
                    })
                    .sum();
                lower = lower.max(scale * val.norm());
            }
        }
        let d = self.dim as f64;
        let upper_global = freqs
            .iter()
            .map(|(xi, v)| {
                let r = Float::sqrt(xi.iter().map(|a| a * a).sum::<f64>());
                v.norm() * Float::exp(s * d * Float::powf(tau * r / c, 1.0 / s))
            })
            .sum();
        Ok(GevreyBounds {
            lower,
            upper_truncated,
            upper_global,
        })
    }

    /// Converts coefficients to another coefficient type.
    pub fn try_map<D: Coeff>(&self, f: impl Fn(&C) -> Option<D>) -> Result<TrigPoly<D>> {
        let terms = self
            .terms
            .iter()
            .map(|(xi, c)| {
                f(c).map(|d| (xi.clone(), d))
                    .ok_or_else(|| Error::NotExact("coefficient conversion".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        TrigPoly::from_terms(self.dim, self.basis.clone(), terms)
    }

    pub fn to_float(&self) -> TrigPoly<Complex64> {
        self.try_map(|c| Some(c.to_c64()))
            .expect("float conversion never fails")
    }
}

impl TrigPoly<Complex64> {
    /// Exact copy of a float polynomial using the binary values of its
    /// coefficients.
    pub fn to_exact(&self) -> Result<TrigPoly<Exact>> {
        self.try_map(|c| Exact::from_c64(*c))
    }
}
