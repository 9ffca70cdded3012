//! Strength of constant-coefficient polynomials and sampled
//! hypoellipticity diagnostics.

use alloc::collections::BTreeMap;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use num_traits::Float;

use crate::calculus::top_decade_slope;
use crate::error::{Error, Result};
use crate::freq::{Basis, MultiIndex};
use crate::sampling::{directions, line_fit, log_space, uniform_grid};
use crate::scalar::{rational_to_f64, Coeff, Rational};
use crate::symexpr::{SymbolExpr, SymbolSampler, TREND_TOL};
use crate::trigpoly::TrigPoly;

/// Minimum `R²` of the log-log fits in [`s_hypoelliptic_fit`].
pub const MIN_R2: f64 = 0.98;

/// Values of `|p|` below this fraction of the strength count as zeros.
pub const ZERO_REL: f64 = 1e-12;

/// `Σ_α c_α ξ^α`.
#[derive(Clone, Debug, PartialEq)]
pub struct PolySymbol<C: Coeff> {
    dim: usize,
    monomials: BTreeMap<MultiIndex, C>,
}

impl<C: Coeff> PolySymbol<C> {
    pub fn new(dim: usize, monomials: impl IntoIterator<Item = (MultiIndex, C)>) -> Result<Self> {
        let mut p = PolySymbol {
            dim,
            monomials: BTreeMap::new(),
        };
        for (alpha, c) in monomials {
            if alpha.dim() != dim {
                return Err(Error::DimensionMismatch {
                    left: dim,
                    right: alpha.dim(),
                });
            }
            p.push(alpha, c);
        }
        Ok(p)
    }

    /// Shorthand with integer coefficients.
    pub fn from_ints(dim: usize, terms: &[(&[u32], i64)]) -> Result<Self> {
        PolySymbol::new(
            dim,
            terms.iter().map(|(a, c)| (MultiIndex(a.to_vec()), C::from_i64(*c))),
        )
    }

    fn push(&mut self, alpha: MultiIndex, c: C) {
        let v = match self.monomials.remove(&alpha) {
            Some(old) => old.plus(&c),
            None => c,
        };
        if !v.is_zero() {
            self.monomials.insert(alpha, v);
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn monomials(&self) -> &BTreeMap<MultiIndex, C> {
        &self.monomials
    }

    pub fn is_zero(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.monomials.keys().map(MultiIndex::order).max().unwrap_or(0)
    }

    pub fn coeff(&self, alpha: &MultiIndex) -> C {
        self.monomials.get(alpha).cloned().unwrap_or_else(C::zero)
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        self.same_dim(o)?;
        let mut out = self.clone();
        for (a, c) in &o.monomials {
            out.push(a.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn scale(&self, c: &C) -> Self {
        let mut out = PolySymbol {
            dim: self.dim,
            monomials: BTreeMap::new(),
        };
        for (a, v) in &self.monomials {
            out.push(a.clone(), v.times(c));
        }
        out
    }

    pub fn mul(&self, o: &Self) -> Result<Self> {
        self.same_dim(o)?;
        let mut out = PolySymbol {
            dim: self.dim,
            monomials: BTreeMap::new(),
        };
        for (a, u) in &self.monomials {
            for (b, v) in &o.monomials {
                out.push(a.add(b), u.times(v));
            }
        }
        Ok(out)
    }

    /// Coefficients conjugated: the complex conjugate as a function of real `ξ`.
    pub fn conj(&self) -> Self {
        PolySymbol {
            dim: self.dim,
            monomials: self
                .monomials
                .iter()
                .map(|(a, c)| (a.clone(), c.conjugate()))
                .collect(),
        }
    }

    pub fn derivative(&self, beta: &MultiIndex) -> Self {
        let mut out = PolySymbol {
            dim: self.dim,
            monomials: BTreeMap::new(),
        };
        for (a, c) in &self.monomials {
            let Some(rest) = a.checked_sub(beta) else {
                continue;
            };
            // α!/(α-β)!
            let f = a.rational_factorial() / rest.rational_factorial();
            out.push(rest, c.times(&C::from_rational(&f)));
        }
        out
    }

    pub fn eval(&self, xi: &[f64]) -> Complex64 {
        self.monomials
            .iter()
            .map(|(a, c)| c.to_c64() * a.pow(xi))
            .sum()
    }

    pub fn eval_exact(&self, xi: &[Rational]) -> C {
        let mut acc = C::zero();
        for (a, c) in &self.monomials {
            let mut m = c.clone();
            for (q, &p) in xi.iter().zip(&a.0) {
                for _ in 0..p {
                    m = m.times(&C::from_rational(q));
                }
            }
            acc = acc.plus(&m);
        }
        acc
    }

    pub fn to_symbol(&self, basis: Arc<Basis>) -> Result<SymbolExpr<C>> {
        let mut acc = SymbolExpr::zero(self.dim, basis.clone())?;
        for (a, c) in &self.monomials {
            acc = acc.add(&SymbolExpr::xi_mono(self.dim, basis.clone(), a.clone(), c.clone())?)?;
        }
        Ok(acc)
    }

    /// The polynomial of an x-independent symbol, if it is one.
    pub fn from_symbol(a: &SymbolExpr<C>) -> Option<Self> {
        if a.depends_on_x() || a.is_amplitude() {
            return None;
        }
        let coeffs = a.poly_coeffs()?;
        PolySymbol::new(
            a.dim(),
            coeffs.into_iter().map(|(alpha, p)| (alpha, p.mean_value())),
        )
        .ok()
    }

    fn same_dim(&self, o: &Self) -> Result<()> {
        if self.dim != o.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: o.dim,
            });
        }
        Ok(())
    }
}

/// `P̃² = Σ_α ∂^α P · conj(∂^α P)`.
pub fn strength_sq<C: Coeff>(p: &PolySymbol<C>) -> Result<PolySymbol<C>> {
    let mut acc = PolySymbol::new(p.dim, core::iter::empty())?;
    for alpha in MultiIndex::up_to(p.dim, p.degree()) {
        let d = p.derivative(&alpha);
        if d.is_zero() {
            continue;
        }
        acc = acc.add(&d.mul(&d.conj())?)?;
    }
    Ok(acc)
}

/// Parameters of formally hypoelliptic symbols.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HypoellParams {
    pub m: f64,
    pub m0: f64,
    pub rho: f64,
    pub s: f64,
    /// Radius `A` beyond which the lower bound is required.
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub c1: f64,
}

impl HypoellParams {
    /// `s = max(1, 1/ρ)`, `A = B = C = C₁ = 1`.
    pub fn new(m: f64, m0: f64, rho: f64) -> Self {
        HypoellParams {
            m,
            m0,
            rho,
            s: if rho > 0.0 { (1.0 / rho).max(1.0) } else { 1.0 },
            a: 1.0,
            b: 1.0,
            c: 1.0,
            c1: 1.0,
        }
    }

    pub fn with_radius(mut self, a: f64) -> Self {
        self.a = a;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.m0 <= self.m) {
            return Err(Error::invalid("need m0 <= m"));
        }
        if !(self.rho > 0.0 && self.rho <= 1.0) {
            return Err(Error::invalid("rho must lie in (0, 1]"));
        }
        if !(self.s >= 1.0) || self.s * self.rho < 1.0 - 1e-12 {
            return Err(Error::invalid("need s >= 1 and s·rho >= 1"));
        }
        if !(self.a >= 0.0 && self.b >= 0.0) {
            return Err(Error::invalid("A and B must be nonnegative"));
        }
        if !(self.c > 0.0 && self.c1 > 0.0) {
            return Err(Error::invalid("C and C1 must be positive"));
        }
        Ok(())
    }
}

/// Radii and directions in ξ-space.
#[derive(Clone, Debug, PartialEq)]
pub struct PolySampler {
    pub radii: Vec<f64>,
    pub directions: Vec<Vec<f64>>,
}

impl PolySampler {
    /// 25 log-spaced radii from 1 to 10⁴, the signed axes and 32 seeded
    /// random directions.
    pub fn standard(dim: usize, seed: u64) -> Self {
        PolySampler {
            radii: log_space(1.0, 1e4, 25),
            directions: directions(dim, 32, seed),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct WeakerReport {
    /// Largest sampled `Q̃/P̃`.
    pub c_hat: f64,
    /// Log-slope of the ratio over the top decade of radii.
    pub slope: f64,
    pub pass: bool,
}

/// Samples `Q̃/P̃`; passes when the ratio does not trend upward.
pub fn weaker_check<C: Coeff>(
    q: &PolySymbol<C>,
    p: &PolySymbol<C>,
    sampler: &PolySampler,
) -> Result<WeakerReport> {
    q.same_dim(p)?;
    if p.is_zero() {
        return Err(Error::ZeroSymbol);
    }
    let (qs, ps) = (strength_sq(q)?, strength_sq(p)?);
    let mut c_hat = 0.0f64;
    let mut rows = Vec::with_capacity(sampler.radii.len());
    for &r in &sampler.radii {
        let mut worst = 0.0f64;
        for d in &sampler.directions {
            let xi: Vec<f64> = d.iter().map(|v| v * r).collect();
            let ratio = Float::sqrt(qs.eval(&xi).re.max(0.0) / ps.eval(&xi).re);
            worst = worst.max(ratio);
        }
        c_hat = c_hat.max(worst);
        rows.push((r, worst));
    }
    // ratio at the origin
    let zero = vec![0.0; p.dim];
    c_hat = c_hat.max(Float::sqrt(qs.eval(&zero).re.max(0.0) / ps.eval(&zero).re));
    let slope = top_decade_slope(&rows);
    let slope = if slope.is_finite() { slope } else { 0.0 };
    Ok(WeakerReport {
        c_hat,
        slope,
        pass: slope <= TREND_TOL,
    })
}

/// Log-slope fit for one derivative `∂^β`.
#[derive(Clone, Debug, PartialEq)]
pub struct BetaFit {
    pub beta: MultiIndex,
    /// Slope of `log sup_{|ξ|=r} |∂^β P|/|P|` against `log(1 + r)`.
    pub slope: f64,
    pub r2: f64,
    /// `-slope / |β|`.
    pub rho: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct HypoellReport {
    pub rho_hat: f64,
    pub per_beta: Vec<BetaFit>,
    pub a_used: f64,
    /// Smallest sampled `C` with `|∂^β P| <= C |P| (1+|ξ|)^{-ρ̂|β|}` beyond `A`.
    pub c_hat: f64,
    /// Different derivatives suggest different exponents.
    pub anisotropic: bool,
    pub pass: bool,
    /// Sample points where `P` vanished.
    pub zeros: Vec<Vec<f64>>,
}

/// Estimates the exponent `ρ` in `|∂^β P| <= C |P| (1+|ξ|)^{-ρ|β|}`.
///
/// For every radius the ratio is maximized over the unit sphere: a scan of
/// the sampled directions followed by a local pattern search from the best
/// few.
pub fn s_hypoelliptic_fit<C: Coeff>(p: &PolySymbol<C>, sampler: &PolySampler) -> Result<HypoellReport> {
    let deg = p.degree();
    if deg == 0 {
        return Err(Error::invalid("polynomial must be nonconstant"));
    }
    let dim = p.dim;
    let strength = strength_sq(p)?;
    let is_zero = |xi: &[f64]| -> bool {
        p.eval(xi).norm() <= ZERO_REL * Float::sqrt(strength.eval(xi).re.max(0.0))
    };
    let mut zeros = Vec::new();
    let mut first_clear = None;
    for &r in &sampler.radii {
        let mut clear = true;
        for d in &sampler.directions {
            let xi: Vec<f64> = d.iter().map(|v| v * r).collect();
            if is_zero(&xi) {
                clear = false;
                zeros.push(xi);
            }
        }
        if clear && first_clear.is_none() {
            first_clear = Some(r);
        }
    }
    let Some(r0) = first_clear else {
        return Ok(HypoellReport {
            rho_hat: 0.0,
            per_beta: Vec::new(),
            a_used: f64::INFINITY,
            c_hat: f64::INFINITY,
            anisotropic: false,
            pass: false,
            zeros,
        });
    };
    let a_used = 2.0 * r0;
    let radii: Vec<f64> = sampler.radii.iter().copied().filter(|r| *r >= a_used).collect();
    if radii.len() < 3 {
        return Err(Error::InsufficientData("fewer than three radii beyond A".into()));
    }
    let mut per_beta = Vec::new();
    let mut sups: Vec<(MultiIndex, Vec<f64>)> = Vec::new();
    for beta in MultiIndex::up_to(dim, deg).into_iter().filter(|b| !b.is_zero()) {
        let d = p.derivative(&beta);
        if d.is_zero() {
            continue;
        }
        let ratio = |xi: &[f64]| -> f64 {
            if is_zero(xi) {
                return f64::NAN;
            }
            d.eval(xi).norm() / p.eval(xi).norm()
        };
        let mut vals = Vec::with_capacity(radii.len());
        for &r in &radii {
            vals.push(sphere_sup(&ratio, r, &sampler.directions, &mut zeros));
        }
        let (xs, ys): (Vec<f64>, Vec<f64>) = radii
            .iter()
            .zip(&vals)
            .filter(|(_, v)| **v > 0.0 && v.is_finite())
            .map(|(r, v)| (Float::ln(1.0 + r), Float::ln(*v)))
            .unzip();
        let fit = line_fit(&xs, &ys).ok_or_else(|| Error::InsufficientData("too few points for a line fit".into()))?;
        per_beta.push(BetaFit {
            beta: beta.clone(),
            slope: fit.slope,
            r2: fit.r2,
            rho: -fit.slope / f64::from(beta.order()),
        });
        sups.push((beta, vals));
    }
    let raw = per_beta.iter().map(|b| b.rho).fold(f64::INFINITY, f64::min);
    let rho_hat = raw.clamp(0.0, 1.0);
    let hi = per_beta.iter().map(|b| b.rho.min(1.0)).fold(f64::NEG_INFINITY, f64::max);
    let anisotropic = hi - rho_hat.min(hi) > 0.1;
    let mut c_hat = 0.0f64;
    for (beta, vals) in &sups {
        for (r, v) in radii.iter().zip(vals) {
            if v.is_finite() {
                c_hat = c_hat.max(v * Float::powf(1.0 + r, rho_hat * f64::from(beta.order())));
            }
        }
    }
    let linear = per_beta.iter().all(|b| b.r2 >= MIN_R2);
    Ok(HypoellReport {
        rho_hat,
        per_beta,
        a_used,
        c_hat,
        anisotropic,
        pass: linear && raw > 0.0,
        zeros,
    })
}

/// `sup_{|ξ|=r} f(ξ)`: direction scan, then pattern search from the three
/// best directions. NaN values mark zeros of the denominator; they are
/// skipped and recorded.
fn sphere_sup(f: &dyn Fn(&[f64]) -> f64, r: f64, dirs: &[Vec<f64>], zeros: &mut Vec<Vec<f64>>) -> f64 {
    let at = |d: &[f64]| -> (f64, Vec<f64>) {
        let xi: Vec<f64> = d.iter().map(|v| v * r).collect();
        (f(&xi), xi)
    };
    let mut scored: Vec<(f64, Vec<f64>)> = Vec::with_capacity(dirs.len());
    for d in dirs {
        let (v, xi) = at(d);
        if v.is_nan() {
            zeros.push(xi);
            continue;
        }
        scored.push((v, d.clone()));
    }
    scored.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut best = scored.first().map_or(0.0, |s| s.0);
    let dim = dirs.first().map_or(0, Vec::len);
    for (v0, d0) in scored.into_iter().take(3) {
        let (mut v, mut d) = (v0, d0);
        let mut h = 0.25;
        while h > 1e-9 {
            let mut moved = false;
            for i in 0..dim {
                for sign in [1.0, -1.0] {
                    let mut e = d.clone();
                    e[i] += sign * h;
                    let n = Float::sqrt(e.iter().map(|x| x * x).sum::<f64>());
                    if n < 1e-12 {
                        continue;
                    }
                    e.iter_mut().for_each(|x| *x /= n);
                    let (w, _) = at(&e);
                    if w > v {
                        v = w;
                        d = e;
                        moved = true;
                    }
                }
            }
            if !moved {
                h *= 0.5;
            }
        }
        best = best.max(v);
    }
    best
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConstantStrengthReport {
    /// `min |p(x, ξ)| / |P₀(ξ)|` over the sample.
    pub eps_hat: f64,
    /// Log-slope of the per-radius minimum over the top decade.
    pub trend: f64,
    /// `Σ_{|α|=m} |a_α(x)|² > 0` at every sampled `x`.
    pub leading_ok: bool,
    pub pass: bool,
    /// `(x, ξ)` attaining `eps_hat`.
    pub witness: (Vec<f64>, Vec<f64>),
}

/// Lower bound below which `ε̂` counts as zero.
pub const EPS_FLOOR: f64 = 1e-10;

/// Checks `|p(x, ξ)| >= ε |P₀(ξ)|` for `p = Σ c_j(x) P_j(ξ)` and the
/// nondegeneracy of the top-order coefficients.
pub fn constant_strength_check<C: Coeff>(
    c: &[TrigPoly<C>],
    polys: &[PolySymbol<C>],
    sampler: &PolySampler,
    radius: f64,
    x_points: &[Vec<f64>],
) -> Result<ConstantStrengthReport> {
    if c.is_empty() || c.len() != polys.len() {
        return Err(Error::invalid("need one coefficient per polynomial"));
    }
    let dim = polys[0].dim;
    if polys.iter().any(|p| p.dim != dim) || c.iter().any(|f| f.dim() != dim) {
        return Err(Error::invalid("dimension mismatch among inputs"));
    }
    let m = polys.iter().map(PolySymbol::degree).max().unwrap_or(0);
    // top-order coefficients a_α(x) = Σ_j c_j(x) coeff_α(P_j)
    let mut leading_ok = true;
    // sup |c_j| <= Σ |ĉ_j|
    let bounds: Vec<f64> = c
        .iter()
        .map(|f| f.terms().values().map(|v| v.abs()).sum())
        .collect();
    let mut scale = 0.0f64;
    for alpha in MultiIndex::of_order(dim, m) {
        let s: f64 = bounds.iter().zip(polys).map(|(b, p)| b * p.coeff(&alpha).abs()).sum();
        scale += s * s;
    }
    for x in x_points {
        let cx: Vec<Complex64> = c.iter().map(|f| f.eval(x)).collect();
        let mut total = 0.0;
        for alpha in MultiIndex::of_order(dim, m) {
            let mut v = Complex64::new(0.0, 0.0);
            for (cj, p) in cx.iter().zip(polys) {
                v += cj * p.coeff(&alpha).to_c64();
            }
            total += v.norm_sqr();
        }
        if total <= EPS_FLOOR * scale.max(1e-300) {
            leading_ok = false;
        }
    }
    let mut eps_hat = f64::INFINITY;
    let mut witness = (Vec::new(), Vec::new());
    let mut rows = Vec::new();
    for &r in sampler.radii.iter().filter(|r| **r >= radius) {
        let mut row_min = f64::INFINITY;
        for d in &sampler.directions {
            let xi: Vec<f64> = d.iter().map(|v| v * r).collect();
            let p0 = polys[0].eval(&xi).norm();
            if p0 == 0.0 {
                continue;
            }
            let vals: Vec<Complex64> = polys.iter().map(|p| p.eval(&xi)).collect();
            for x in x_points {
                let v: Complex64 = c.iter().zip(&vals).map(|(f, pv)| f.eval(x) * pv).sum();
                let ratio = v.norm() / p0;
                if ratio < eps_hat {
                    eps_hat = ratio;
                    witness = (x.clone(), xi.clone());
                }
                row_min = row_min.min(ratio);
            }
        }
        if row_min.is_finite() {
            rows.push((r, row_min));
        }
    }
    if !eps_hat.is_finite() {
        return Err(Error::InsufficientData("no sample point with P₀(ξ) ≠ 0".into()));
    }
    let trend = top_decade_slope(&rows);
    let trend = if trend.is_finite() { trend } else { 0.0 };
    Ok(ConstantStrengthReport {
        eps_hat,
        trend,
        leading_ok,
        pass: eps_hat > EPS_FLOOR && trend >= -TREND_TOL && leading_ok,
        witness,
    })
}

/// `x` grid for coefficient functions: one common period when all
/// frequencies are rational, otherwise `[0, 16)`.
pub fn x_grid_for<C: Coeff>(c: &[TrigPoly<C>], per_unit: usize) -> Vec<Vec<f64>> {
    let dim = c.first().map_or(1, TrigPoly::dim);
    let mut period = 1.0f64;
    let mut rational = true;
    for f in c {
        for xi in f.frequencies() {
            for i in 0..dim {
                match xi.exact_component(i, f.basis()) {
                    Some(q) => period = lcm_f64(period, rational_to_f64(&Rational::from(q.denom().clone()))),
                    None => rational = false,
                }
            }
        }
    }
    let len = if rational && period <= 64.0 { period } else { 16.0 };
    let n = ((len * per_unit as f64) as usize).max(per_unit);
    uniform_grid(dim, n, len)
}

fn lcm_f64(a: f64, b: f64) -> f64 {
    let (mut x, mut y) = (a as u64, b as u64);
    let p = x * y;
    while y != 0 {
        (x, y) = (y, x % y);
    }
    (p / x) as f64
}

/// Sampled check of the lower bound `|a| >= C₁⟨ξ⟩^{m₀}` on `|ξ| >= A` and of
/// `|∂_x^α ∂_ξ^β a / a| <= C^{|α|+|β|} (α!)^{sρ} β! ⟨ξ⟩^{-ρ|β|}` on
/// `|ξ| >= max(A, B|β|^s)`.
#[derive(Clone, Debug, PartialEq)]
pub struct AphsReport {
    /// Largest sampled `C₁`.
    pub c1_hat: f64,
    /// Smallest sampled `C`.
    pub c_hat: f64,
    /// `C₁ / c1_hat`; at most 1 when the declared `C₁` holds.
    pub lower_ratio: f64,
    /// Largest ratio to the derivative bound at the declared `C`.
    pub worst_ratio: f64,
    /// Log-slope of `|a|/⟨ξ⟩^{m₀}` over the top decade.
    pub lower_trend: f64,
    /// Largest log-slope of any derivative ratio over the top decade.
    pub max_trend: f64,
    pub pass: bool,
    pub witness: Option<(Vec<f64>, Vec<f64>)>,
}

/// Passes when `c1_hat > 0`, the lower bound does not decay and no
/// derivative ratio grows against its weight.
pub fn aphs_check<C: Coeff>(
    a: &SymbolExpr<C>,
    hp: &HypoellParams,
    max_order: u32,
    sampler: &SymbolSampler,
) -> Result<AphsReport> {
    hp.validate()?;
    if a.is_amplitude() {
        return Err(Error::Unsupported("symbol in (x, ξ)".into()));
    }
    let dim = a.dim();
    let fa = a.compile();
    let mut c1_hat = f64::INFINITY;
    let mut witness = None;
    let mut low_rows = Vec::new();
    for &r in sampler.radii.iter().filter(|r| **r >= hp.a) {
        let jb = Float::sqrt(1.0 + r * r);
        let mut row = f64::INFINITY;
        for d in &sampler.directions {
            let xi: Vec<f64> = d.iter().map(|v| v * r).collect();
            for x in &sampler.x_points {
                let v = match fa.eval(x, x, &xi) {
                    Ok(v) => v.norm() / Float::powf(jb, hp.m0),
                    Err(Error::Domain { .. }) => 0.0,
                    Err(e) => return Err(e),
                };
                if v < c1_hat {
                    c1_hat = v;
                    witness = Some((x.clone(), xi.clone()));
                }
                row = row.min(v);
            }
        }
        low_rows.push((jb, row));
    }
    if !c1_hat.is_finite() {
        return Err(Error::InsufficientData("no sample radius beyond A".into()));
    }
    let lower_trend = finite_or_zero(top_decade_slope(&low_rows));
    let mut c_hat = 0.0f64;
    let mut worst_ratio = 0.0f64;
    let mut max_trend = f64::NEG_INFINITY;
    if c1_hat > 0.0 {
        for beta in MultiIndex::up_to(dim, max_order) {
            let db = a.dxi(&beta)?;
            for alpha in MultiIndex::up_to(dim, max_order - beta.order()) {
                let n = alpha.order() + beta.order();
                if n == 0 {
                    continue;
                }
                let d = db.dx(&alpha)?;
                if d.is_zero() {
                    continue;
                }
                let fd = d.compile();
                let fact = Float::powf(alpha.factorial(), hp.s * hp.rho) * beta.factorial();
                let cpow = Float::powi(hp.c, n as i32);
                let rmin = hp.a.max(hp.b * Float::powf(f64::from(beta.order()), hp.s));
                let mut rows = Vec::new();
                for &r in sampler.radii.iter().filter(|r| **r >= rmin) {
                    let jb = Float::sqrt(1.0 + r * r);
                    let weight = fact * Float::powf(jb, -hp.rho * f64::from(beta.order()));
                    let mut row = 0.0f64;
                    for dir in &sampler.directions {
                        let xi: Vec<f64> = dir.iter().map(|v| v * r).collect();
                        for x in &sampler.x_points {
                            let v = (fd.eval(x, x, &xi)? / fa.eval(x, x, &xi)?).norm() / weight;
                            row = row.max(v);
                        }
                    }
                    c_hat = c_hat.max(Float::powf(row, 1.0 / f64::from(n)));
                    worst_ratio = worst_ratio.max(row / cpow);
                    rows.push((jb, row));
                }
                max_trend = max_trend.max(top_decade_slope(&rows));
            }
        }
    }
    let max_trend = finite_or_zero(max_trend);
    let pass = c1_hat > 0.0 && lower_trend >= -TREND_TOL && max_trend <= TREND_TOL;
    Ok(AphsReport {
        c1_hat,
        c_hat,
        lower_ratio: if c1_hat > 0.0 { hp.c1 / c1_hat } else { f64::INFINITY },
        worst_ratio,
        lower_trend,
        max_trend,
        pass,
        witness,
    })
}

fn finite_or_zero(v: f64) -> f64 {
    if v.is_finite() {
        v
    } else {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Exact;
    use crate::symexpr::{ratio, two_pi_bracket_sq};
    use core::f64::consts::PI;

    type PE = PolySymbol<Exact>;
    type PF = PolySymbol<Complex64>;

    fn xi2_plus_1() -> PE {
        PE::from_ints(1, &[(&[2], 1), (&[0], 1)]).unwrap()
    }

    #[test]
    fn strength_examples() {
        let s = strength_sq(&xi2_plus_1()).unwrap();
        // (ξ²+1)² + 4ξ² + 4
        let expect = PE::from_ints(1, &[(&[4], 1), (&[2], 6), (&[0], 5)]).unwrap();
        assert_eq!(s, expect);
        assert_eq!(s.eval_exact(&[ratio(0, 1)]), Exact::from_i64(5));
        let c = PE::from_ints(2, &[(&[0, 0], 3)]).unwrap();
        assert_eq!(strength_sq(&c).unwrap(), PE::from_ints(2, &[(&[0, 0], 9)]).unwrap());
        let x1 = PE::from_ints(2, &[(&[1, 0], 1)]).unwrap();
        assert_eq!(strength_sq(&x1).unwrap(), PE::from_ints(2, &[(&[2, 0], 1), (&[0, 0], 1)]).unwrap());
        // complex coefficients: |i ξ + 1|² + |i|²
        let p = PF::new(1, [(MultiIndex(vec![1]), Complex64::new(0.0, 1.0)), (MultiIndex(vec![0]), Complex64::new(1.0, 0.0))]).unwrap();
        let s = strength_sq(&p).unwrap();
        assert!((s.eval(&[2.0]) - Complex64::new(6.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn strength_dominates_modulus() {
        let p = PF::new(2, [
            (MultiIndex(vec![2, 1]), Complex64::new(1.0, -2.0)),
            (MultiIndex(vec![0, 2]), Complex64::new(0.5, 0.0)),
            (MultiIndex(vec![1, 0]), Complex64::new(0.0, 3.0)),
        ])
        .unwrap();
        let s = strength_sq(&p).unwrap();
        let sampler = PolySampler::standard(2, 5);
        for r in [0.3, 1.0, 7.0, 50.0] {
            for d in &sampler.directions {
                let xi: Vec<f64> = d.iter().map(|v| v * r).collect();
                assert!(s.eval(&xi).re >= p.eval(&xi).norm_sqr() * (1.0 - 1e-12));
            }
        }
    }

    #[test]
    fn weaker_examples() {
        let sampler = PolySampler::standard(1, 1);
        let one = PE::from_ints(1, &[(&[0], 1)]).unwrap();
        let xi2 = PE::from_ints(1, &[(&[2], 1)]).unwrap();
        let xi4 = PE::from_ints(1, &[(&[4], 1)]).unwrap();
        let p = xi2_plus_1();
        assert!(weaker_check(&one, &p, &sampler).unwrap().pass);
        assert!(weaker_check(&xi2, &p, &sampler).unwrap().pass);
        assert!(weaker_check(&p, &xi2, &sampler).unwrap().pass);
        let r = weaker_check(&xi4, &p, &sampler).unwrap();
        assert!(!r.pass && (r.slope - 2.0).abs() < 0.05, "{r:?}");
        // reflexive, and transitive with the product of constants
        let rr = weaker_check(&p, &p, &sampler).unwrap();
        assert!(rr.pass && (rr.c_hat - 1.0).abs() < 1e-12);
        let a = weaker_check(&one, &xi2, &sampler).unwrap();
        let b = weaker_check(&xi2, &p, &sampler).unwrap();
        let ab = weaker_check(&one, &p, &sampler).unwrap();
        assert!(a.pass && b.pass && ab.pass && ab.c_hat <= a.c_hat * b.c_hat * (1.0 + 1e-12));
        let zero = PE::new(1, core::iter::empty()).unwrap();
        assert!(matches!(weaker_check(&one, &zero, &sampler), Err(Error::ZeroSymbol)));
    }

    fn heat() -> PF {
        // P(τ, ξ) = 2πiτ + 4π²ξ²
        PF::new(2, [
            (MultiIndex(vec![1, 0]), Complex64::new(0.0, 2.0 * PI)),
            (MultiIndex(vec![0, 2]), Complex64::new(4.0 * PI * PI, 0.0)),
        ])
        .unwrap()
    }

    #[test]
    fn hypoelliptic_exponents() {
        let e = PF::new(1, [(MultiIndex(vec![0]), Complex64::new(1.0, 0.0)), (MultiIndex(vec![2]), Complex64::new(4.0 * PI * PI, 0.0))]).unwrap();
        let r = s_hypoelliptic_fit(&e, &PolySampler::standard(1, 7)).unwrap();
        assert!(r.pass && (r.rho_hat - 1.0).abs() <= 0.05, "{r:?}");
        let r = s_hypoelliptic_fit(&heat(), &PolySampler::standard(2, 7)).unwrap();
        assert!(r.pass && (r.rho_hat - 0.5).abs() <= 0.05, "{r:?}");
        assert!(r.anisotropic);
        let x1 = PF::new(2, [(MultiIndex(vec![1, 0]), Complex64::new(1.0, 0.0))]).unwrap();
        let r = s_hypoelliptic_fit(&x1, &PolySampler::standard(2, 7)).unwrap();
        assert!(!r.pass && !r.zeros.is_empty());
    }

    #[test]
    fn fit_is_scale_invariant() {
        let s = PolySampler::standard(2, 9);
        let a = s_hypoelliptic_fit(&heat(), &s).unwrap();
        let b = s_hypoelliptic_fit(&heat().scale(&Complex64::new(-3.0, 2.0)), &s).unwrap();
        assert!((a.rho_hat - b.rho_hat).abs() < 1e-9);
        // P̃/|P| stays bounded beyond the fitted constant
        let st = strength_sq(&heat()).unwrap();
        let mut top = 0.0f64;
        for &r in s.radii.iter().filter(|r| **r > a.c_hat.max(a.a_used)) {
            for d in &s.directions {
                let xi: Vec<f64> = d.iter().map(|v| v * r).collect();
                top = top.max(st.eval(&xi).re.sqrt() / heat().eval(&xi).norm());
            }
        }
        assert!(top < 10.0, "{top}");
    }

    #[test]
    fn constant_strength_examples() {
        let s = PolySampler::standard(1, 3);
        let p0 = xi2_plus_1();
        let grid = uniform_grid(1, 16, 1.0);
        let one = TrigPoly::<Exact>::from_int_terms(1, &[(&[0], Exact::one())]);
        let r = constant_strength_check(&[one], &[p0.clone()], &s, 1.0, &grid).unwrap();
        assert!(r.pass && (r.eps_hat - 1.0).abs() < 1e-12);
        let half = Exact::from_rational(&ratio(1, 2));
        let two_cos = TrigPoly::<Exact>::from_int_terms(1, &[(&[0], Exact::from_i64(2)), (&[1], half.clone()), (&[-1], half.clone())]);
        let r = constant_strength_check(&[two_cos], &[p0.clone()], &s, 1.0, &grid).unwrap();
        assert!(r.pass && (r.eps_hat - 1.0).abs() < 1e-9, "{r:?}");
        let cos = TrigPoly::<Exact>::from_int_terms(1, &[(&[1], half.clone()), (&[-1], half)]);
        let r = constant_strength_check(&[cos.clone()], &[p0], &s, 1.0, &x_grid_for(&[cos], 16)).unwrap();
        assert!(!r.pass && !r.leading_ok);
        assert!((r.witness.0[0] - 0.25).abs() < 1e-12 || (r.witness.0[0] - 0.75).abs() < 1e-12);
    }

    #[test]
    fn aphs_examples() {
        let sampler = SymbolSampler::standard(1, 2);
        let a = two_pi_bracket_sq::<Complex64>(1, SymbolExpr::<Complex64>::std_basis()).unwrap();
        let hp = HypoellParams::new(2.0, 2.0, 1.0);
        let r = aphs_check(&a, &hp, 3, &sampler).unwrap();
        assert!(r.pass, "{r:?}");
        let pert = a.add(&SymbolExpr::std_trig(1, &[(&[1], Complex64::new(0.5, 0.0))])).unwrap();
        let r = aphs_check(&pert, &hp, 3, &sampler).unwrap();
        assert!(r.pass && r.c1_hat > 1.0, "{r:?}");
        let e = SymbolExpr::std_trig(1, &[(&[1], Complex64::new(1.0, 0.0))]);
        let r = aphs_check(&e, &HypoellParams::new(0.0, 0.0, 1.0), 3, &sampler).unwrap();
        assert!(r.pass && (r.c1_hat - 1.0).abs() < 1e-12 && r.lower_ratio <= 1.0 + 1e-12, "{r:?}");
        // ξ vanishes at the origin only, but is not bounded below by ⟨ξ⟩²
        let xi = SymbolExpr::std_mono(&[1], Complex64::new(1.0, 0.0));
        let r = aphs_check(&xi, &hp, 2, &sampler).unwrap();
        assert!(!r.pass);
    }
}
