//! Formal sums of symbols: products, amplitude and transpose reductions,
//! cutoff summation, equivalence checks and the parametrix recursion.

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

use num_complex::Complex64;
use num_traits::Float;

use crate::error::{Error, Result};
use crate::freq::MultiIndex;
use crate::hypoell::{aphs_check, HypoellParams};
use crate::sampling::{gauss_legendre01, line_fit, LineFit};
use crate::scalar::Coeff;
use crate::symexpr::{verify_class, ClassParams, ClassReport, CompiledSymbol, SymbolExpr, SymbolSampler, TREND_TOL};

/// Largest parametrix order.
pub const MAX_PARAMETRIX_ORDER: usize = 5;

/// `Σ_j a_j`, with term `j` one step `ρ - δ` lower in order than term `j - 1`.
#[derive(Clone, Debug)]
pub struct FormalSum<C: Coeff> {
    pub terms: Vec<SymbolExpr<C>>,
    pub params: ClassParams,
}

impl<C: Coeff> FormalSum<C> {
    pub fn new(terms: Vec<SymbolExpr<C>>, params: ClassParams) -> Self {
        FormalSum { terms, params }
    }

    /// A symbol as the formal sum `a + 0 + 0 + ...`.
    pub fn single(a: SymbolExpr<C>, params: ClassParams) -> Self {
        FormalSum {
            terms: alloc::vec![a],
            params,
        }
    }

    pub fn order_drop(&self) -> f64 {
        self.params.rho - self.params.delta
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// `Σ_{j<n} a_j`.
    pub fn partial_sum(&self, n: usize) -> Result<SymbolExpr<C>> {
        let first = self
            .terms
            .first()
            .ok_or_else(|| Error::invalid("empty formal sum"))?;
        let mut acc = SymbolExpr::zero(first.dim(), first.basis().clone())?;
        for t in self.terms.iter().take(n) {
            acc = acc.add(t)?;
        }
        Ok(acc)
    }

    pub fn to_float(&self) -> FormalSum<Complex64> {
        FormalSum {
            terms: self.terms.iter().map(SymbolExpr::to_float).collect(),
            params: self.params,
        }
    }

    /// Class check of term `j` at the shifted order `m - (ρ - δ)j`.
    pub fn check_term(&self, j: usize, max_order: u32, sampler: &SymbolSampler) -> Result<ClassReport> {
        let t = self
            .terms
            .get(j)
            .ok_or_else(|| Error::invalid(format!("no term {j}")))?;
        let mut p = self.params;
        p.m -= self.order_drop() * j as f64;
        verify_class(t, &p, max_order, sampler)
    }
}

/// `(α!)^{-1} (2πi)^{-|α|}`.
fn leibniz_weight<C: Coeff>(alpha: &MultiIndex) -> Result<C> {
    let k = C::two_pi_i()
        .powi(-i64::from(alpha.order()))
        .ok_or_else(|| Error::invalid("power of 2πi"))?;
    Ok(C::from_rational(&alpha.rational_factorial().recip()).times(&k))
}

fn zero_like<C: Coeff>(a: &SymbolExpr<C>) -> Result<SymbolExpr<C>> {
    SymbolExpr::zero(a.dim(), a.basis().clone())
}

/// Term `c_j` of the product `(Σ a_k) ∘ (Σ b_l)`:
/// `Σ_{|α|+k+l=j} (α!)^{-1} (2πi)^{-|α|} ∂_ξ^α a_k ∂_x^α b_l`.
pub fn symbol_product_term<C: Coeff>(
    a: &[SymbolExpr<C>],
    b: &[SymbolExpr<C>],
    j: usize,
) -> Result<SymbolExpr<C>> {
    let first = a.first().or(b.first()).ok_or_else(|| Error::invalid("empty formal sums"))?;
    let dim = first.dim();
    let mut acc = zero_like(first)?;
    for (k, ak) in a.iter().enumerate().take(j + 1) {
        for (l, bl) in b.iter().enumerate().take(j + 1 - k) {
            let n = (j - k - l) as u32;
            for alpha in MultiIndex::of_order(dim, n) {
                let da = ak.dxi(&alpha)?;
                if da.is_zero() {
                    continue;
                }
                let db = bl.dx(&alpha)?;
                if db.is_zero() {
                    continue;
                }
                acc = acc.add(&da.mul(&db)?.scale(&leibniz_weight::<C>(&alpha)?))?;
            }
        }
    }
    Ok(acc)
}

/// `c_0, ..., c_n` of `(Σ a_k) ∘ (Σ b_l)`.
pub fn symbol_product<C: Coeff>(
    a: &[SymbolExpr<C>],
    b: &[SymbolExpr<C>],
    n: usize,
) -> Result<Vec<SymbolExpr<C>>> {
    (0..=n).map(|j| symbol_product_term(a, b, j)).collect()
}

/// Term `j` of the symbol of an amplitude operator:
/// `(2πi)^{-j} Σ_{|α|=j} (α!)^{-1} ∂_y^α ∂_ξ^α a(x, y, ξ)|_{y=x}`.
pub fn amplitude_reduce<C: Coeff>(a: &SymbolExpr<C>, j: u32) -> Result<SymbolExpr<C>> {
    let mut acc = zero_like(a)?;
    for alpha in MultiIndex::of_order(a.dim(), j) {
        let d = a.dxi(&alpha)?.dy(&alpha)?;
        if d.is_zero() {
            continue;
        }
        acc = acc.add(&d.restrict_diagonal()?.scale(&leibniz_weight::<C>(&alpha)?))?;
    }
    Ok(acc)
}

/// Term `j` of the transposed symbol:
/// `(-2πi)^{-j} Σ_{|α|=j} (α!)^{-1} (∂_ξ^α ∂_x^α b)(x, -ξ)`.
pub fn transpose_expansion<C: Coeff>(b: &SymbolExpr<C>, j: u32) -> Result<SymbolExpr<C>> {
    let mut acc = zero_like(b)?;
    for alpha in MultiIndex::of_order(b.dim(), j) {
        let d = b.dxi(&alpha)?.dx(&alpha)?;
        if d.is_zero() {
            continue;
        }
        acc = acc.add(&d.scale(&leibniz_weight::<C>(&alpha)?))?;
    }
    let acc = acc.reflect_xi()?;
    Ok(if j % 2 == 1 { acc.neg() } else { acc })
}

/// `Σ_{j<=n}` of [`transpose_expansion`].
pub fn transpose_sum<C: Coeff>(b: &SymbolExpr<C>, n: u32) -> Result<SymbolExpr<C>> {
    let mut acc = zero_like(b)?;
    for j in 0..=n {
        acc = acc.add(&transpose_expansion(b, j)?)?;
    }
    Ok(acc)
}

/// Left parametrix terms `b_0, ..., b_N` with `Σ b_k ∘ a ~ 1`.
#[derive(Clone, Debug)]
pub struct Parametrix<C: Coeff> {
    pub terms: FormalSum<C>,
    /// Terms are only used where `|ξ| >= A`.
    pub validity_radius: f64,
    pub warnings: Vec<String>,
}

impl<C: Coeff> Parametrix<C> {
    pub fn order(&self) -> usize {
        self.terms.len() - 1
    }

    /// `b_{(N)} = Σ_{k<=N} b_k`.
    pub fn sum(&self) -> Result<SymbolExpr<C>> {
        self.terms.partial_sum(self.terms.len())
    }

    /// Runs the hypoellipticity check on `a` and the class check on `b_0`,
    /// recording failures as warnings.
    pub fn check(
        &mut self,
        a: &SymbolExpr<C>,
        hp: &HypoellParams,
        max_order: u32,
        sampler: &SymbolSampler,
    ) -> Result<()> {
        let rep = aphs_check(a, hp, max_order, sampler)?;
        if !rep.pass {
            self.warnings.push(format!(
                "hypoellipticity check failed (lower-bound ratio {:.3e}, derivative ratio {:.3e})",
                rep.lower_ratio, rep.worst_ratio
            ));
        }
        let order = max_order.min(3);
        let fit = self.terms.check_term(0, order, sampler)?;
        let params = self.terms.params.with_c(fit.fitted_c);
        if !verify_class(&self.terms.terms[0], &params, order, sampler)?.pass {
            self.warnings.push("b_0 fails the class check at its fitted constant".into());
        }
        Ok(())
    }
}

/// Builds `b_0 = 1/a` and, for `1 <= n <= N`,
/// `b_n = -(1/a) Σ_{k<n} Σ_{|α|=n-k} (α!)^{-1} (2πi)^{-|α|} ∂_ξ^α b_k ∂_x^α a`.
pub fn parametrix<C: Coeff>(a: &SymbolExpr<C>, hp: &HypoellParams, n: usize) -> Result<Parametrix<C>> {
    hp.validate()?;
    if n > MAX_PARAMETRIX_ORDER {
        return Err(Error::invalid(format!(
            "parametrix order {n} exceeds {MAX_PARAMETRIX_ORDER}"
        )));
    }
    if a.is_zero() {
        return Err(Error::ZeroSymbol);
    }
    if a.is_amplitude() {
        return Err(Error::Unsupported("symbol in (x, ξ)".into()));
    }
    let dim = a.dim();
    let den = Arc::new(a.clone());
    let one = SymbolExpr::one(dim, a.basis().clone())?;
    let mut terms = alloc::vec![one.div_shared(&den)?];
    // ∂_x^α a, reused across steps
    let mut dxa: Vec<(MultiIndex, SymbolExpr<C>)> = Vec::new();
    for order in 1..=n as u32 {
        for alpha in MultiIndex::of_order(dim, order) {
            let d = a.dx(&alpha)?;
            if !d.is_zero() {
                dxa.push((alpha, d));
            }
        }
    }
    for step in 1..=n {
        let mut acc = zero_like(a)?;
        for (k, bk) in terms.iter().enumerate() {
            let order = (step - k) as u32;
            for (alpha, da) in dxa.iter().filter(|(al, _)| al.order() == order) {
                let db = bk.dxi(alpha)?;
                if db.is_zero() {
                    continue;
                }
                acc = acc.add(&db.mul(da)?.scale(&leibniz_weight::<C>(alpha)?))?;
            }
        }
        terms.push(acc.div_shared(&den)?.neg());
    }
    let params = ClassParams {
        m: -hp.m0,
        rho: hp.rho,
        delta: 0.0,
        s: hp.s,
        c: hp.c,
        b: hp.b,
        big_m: dim as u32 / 2 + 1,
    };
    Ok(Parametrix {
        terms: FormalSum::new(terms, params),
        validity_radius: hp.a,
        warnings: Vec::new(),
    })
}

type DerivTable = Vec<(f64, Vec<u32>, CompiledSymbol)>;

/// Evaluates `r_N(x, ξ) = σ(b_{(N)}(x, D) a(x, D))(x, ξ) - 1` for a symbol
/// `a = Σ_μ a_μ(ξ) e^{2πiμ·x}`.
///
/// The composite symbol is `Σ_μ a_μ(ξ) e^{2πiμ·x} b_{(N)}(x, ξ + μ)`. Its
/// first `N + 1` Leibniz terms sum to 1, so `r_N` equals the Taylor tails
/// `Σ_μ a_μ e_μ Σ_k R_{N-k}[b_k](x; ξ, μ)` with integral remainders
/// `R_n[b] = Σ_{|α|=n+1} (n+1)/α! μ^α ∫_0^1 (1-t)^n ∂_ξ^α b(x, ξ + tμ) dt`.
/// This avoids the cancellation in `σ - 1`.
pub struct ParametrixResidual {
    dim: usize,
    comps: Vec<(Vec<f64>, CompiledSymbol)>,
    /// per k: remainder order and `(n+1)/α!`, α, `∂_ξ^α b_k`
    tails: Vec<(u32, DerivTable)>,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl ParametrixResidual {
    pub fn new<C: Coeff>(a: &SymbolExpr<C>, b: &[SymbolExpr<C>]) -> Result<Self> {
        let dim = a.dim();
        let n = b.len().checked_sub(1).ok_or_else(|| Error::invalid("empty parametrix"))?;
        let comps = a
            .x_components()?
            .into_iter()
            .map(|(mu, g)| (mu.to_f64(dim, a.basis()), g.compile()))
            .collect();
        let mut tails = Vec::with_capacity(b.len());
        for (k, bk) in b.iter().enumerate() {
            let order = (n - k) as u32;
            let mut table = Vec::new();
            for alpha in MultiIndex::of_order(dim, order + 1) {
                let d = bk.dxi(&alpha)?;
                if d.is_zero() {
                    continue;
                }
                table.push((f64::from(order + 1) / alpha.factorial(), alpha.0.clone(), d.compile()));
            }
            tails.push((order, table));
        }
        let (nodes, weights) = gauss_legendre01(24);
        Ok(ParametrixResidual {
            dim,
            comps,
            tails,
            nodes,
            weights,
        })
    }

    pub fn eval(&self, x: &[f64], xi: &[f64]) -> Result<Complex64> {
        let mut total = Complex64::new(0.0, 0.0);
        let mut point = alloc::vec![0.0; self.dim];
        for (mu, amu) in &self.comps {
            if mu.iter().all(|v| *v == 0.0) {
                continue;
            }
            let dot: f64 = mu.iter().zip(x).map(|(m, y)| m * y).sum();
            let pref = amu.eval(x, x, xi)? * Complex64::from_polar(1.0, core::f64::consts::TAU * dot);
            let mut tail = Complex64::new(0.0, 0.0);
            for (order, table) in &self.tails {
                for (c, alpha, f) in table {
                    let mono: f64 = alpha
                        .iter()
                        .zip(mu)
                        .map(|(&p, &m)| Float::powi(m, p as i32))
                        .product();
                    if mono == 0.0 {
                        continue;
                    }
                    let mut integral = Complex64::new(0.0, 0.0);
                    for (t, w) in self.nodes.iter().zip(&self.weights) {
                        for i in 0..self.dim {
                            point[i] = xi[i] + t * mu[i];
                        }
                        integral += f.eval(x, x, &point)? * (w * Float::powi(1.0 - t, *order as i32));
                    }
                    tail += integral * (c * mono);
                }
            }
            total += pref * tail;
        }
        Ok(total)
    }
}

/// Log-log decay of `max_x |r_N(x, r·ω)|` along one ray.
#[derive(Clone, Debug, PartialEq)]
pub struct DecayReport {
    /// `(r, max_x |r_N|)`.
    pub samples: Vec<(f64, f64)>,
    pub fit: LineFit,
}

pub fn residual_decay(
    res: &ParametrixResidual,
    direction: &[f64],
    radii: &[f64],
    x_points: &[Vec<f64>],
) -> Result<DecayReport> {
    let mut samples = Vec::with_capacity(radii.len());
    for &r in radii {
        let xi: Vec<f64> = direction.iter().map(|v| v * r).collect();
        let mut worst = 0.0f64;
        for x in x_points {
            worst = worst.max(res.eval(x, &xi)?.norm());
        }
        samples.push((r, worst));
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = samples
        .iter()
        .filter(|s| s.1 > 0.0)
        .map(|s| (Float::ln(s.0), Float::ln(s.1)))
        .unzip();
    let fit = line_fit(&xs, &ys).ok_or_else(|| Error::InsufficientData("too few points for a line fit".into()))?;
    Ok(DecayReport { samples, fit })
}

/// Smooth cutoffs `φ_j(ξ) = h((|ξ| - 2R(j+1)^s) / (R(j+1)^s))` with
/// `h(t) = G(t) / (G(t) + G(1-t))`, `G(t) = exp(-1/t)` for `t > 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CutoffFamily {
    pub r: f64,
    pub s: f64,
    /// Derivative bounds hold for `|γ| <= K(j+1)`.
    pub k: u32,
}

fn g_exp(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else {
        Float::exp(-1.0 / t)
    }
}

/// Smooth step, 0 for `t <= 0` and 1 for `t >= 1`.
pub fn smooth_step(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        let (a, b) = (g_exp(t), g_exp(1.0 - t));
        a / (a + b)
    }
}

impl CutoffFamily {
    pub fn new(r: f64, s: f64) -> Result<Self> {
        if !(r > 0.0) || !(s >= 1.0) {
            return Err(Error::invalid("need R > 0 and s >= 1"));
        }
        Ok(CutoffFamily { r, s, k: 3 })
    }

    /// `R = 4`, `K = 3`.
    pub fn with_defaults(s: f64) -> Result<Self> {
        CutoffFamily::new(4.0, s)
    }

    /// `R(j+1)^s`.
    pub fn scale(&self, j: usize) -> f64 {
        self.r * Float::powf((j + 1) as f64, self.s)
    }

    /// `φ_j` at `|ξ| = r`.
    pub fn phi(&self, j: usize, r: f64) -> f64 {
        let w = self.scale(j);
        smooth_step((r - 2.0 * w) / w)
    }
}

/// `(x, ξ) ↦ Σ_{j<=N} φ_j(ξ) a_j(x, ξ)`.
pub struct CutoffSum {
    cutoffs: CutoffFamily,
    terms: Vec<CompiledSymbol>,
}

pub fn sum_formal<C: Coeff>(f: &FormalSum<C>, cutoffs: CutoffFamily, n_trunc: usize) -> CutoffSum {
    CutoffSum {
        cutoffs,
        terms: f.terms.iter().take(n_trunc + 1).map(|t| t.compile()).collect(),
    }
}

impl CutoffSum {
    pub fn eval(&self, x: &[f64], xi: &[f64]) -> Result<Complex64> {
        let r = Float::sqrt(xi.iter().map(|v| v * v).sum::<f64>());
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, t) in self.terms.iter().enumerate() {
            let p = self.cutoffs.phi(j, r);
            if p == 0.0 {
                // later cutoffs have larger support radii
                break;
            }
            acc += t.eval(x, x, xi)? * p;
        }
        Ok(acc)
    }
}

/// Fitted constants of the partial-difference bounds.
#[derive(Clone, Debug, PartialEq)]
pub struct EquivalenceReport {
    /// Smallest sampled `C` for `N = 1, ..., N_max`.
    pub c_of_n: Vec<f64>,
    /// Largest log-slope against `⟨ξ⟩` of any ratio to its weight.
    pub slope: f64,
    pub pass: bool,
}

/// Samples `|∂_x^α ∂_ξ^β Σ_{j<N} (a_j - b_j)|` against
/// `(N! α!)^{s(ρ-δ)} β! ⟨ξ⟩^{m-ρ|β|+δ|α|-(ρ-δ)N}` on `⟨ξ⟩ >= B(N+|β|)^s`
/// for `|α| + |β| <= 2`. Passes when no ratio trends upward.
pub fn equivalence_check<C: Coeff>(
    a: &FormalSum<C>,
    b: &FormalSum<C>,
    n_max: usize,
    sampler: &SymbolSampler,
) -> Result<EquivalenceReport> {
    let p = a.params;
    if p != b.params {
        return Err(Error::invalid("formal sums with different class parameters"));
    }
    let dim = a.terms.first().map(|t| t.dim()).ok_or_else(|| Error::invalid("empty formal sum"))?;
    p.validate(dim)?;
    let rd = p.rho - p.delta;
    let mut c_of_n = Vec::with_capacity(n_max);
    let mut slope = f64::NEG_INFINITY;
    let mut diff = SymbolExpr::zero(dim, a.terms[0].basis().clone())?;
    for n in 1..=n_max {
        let zero = zero_like(&diff)?;
        let aj = a.terms.get(n - 1).unwrap_or(&zero);
        let bj = b.terms.get(n - 1).unwrap_or(&zero);
        diff = diff.add(&aj.sub(bj)?)?;
        let mut c_fit = 0.0f64;
        let nf = n as f64;
        let n_fact = crate::scalar::factorial(n as u32);
        for beta in MultiIndex::up_to(dim, 2) {
            let db = diff.dxi(&beta)?;
            for alpha in MultiIndex::up_to(dim, 2 - beta.order()) {
                let d = db.dx(&alpha)?;
                if d.is_zero() {
                    continue;
                }
                let f = d.compile();
                let (na, nb) = (f64::from(alpha.order()), f64::from(beta.order()));
                let fact = Float::powf(n_fact * alpha.factorial(), p.s * rd) * beta.factorial();
                let order = p.m - p.rho * nb + p.delta * na - rd * nf;
                let threshold = p.b * Float::powf(nf + nb, p.s);
                let power = 1.0 + na + nb + nf;
                let mut rows = Vec::new();
                for &r in &sampler.radii {
                    let jb = Float::sqrt(1.0 + r * r);
                    if jb < threshold {
                        continue;
                    }
                    let weight = fact * Float::powf(jb, order);
                    let mut worst = 0.0f64;
                    for dir in &sampler.directions {
                        let xi: Vec<f64> = dir.iter().map(|v| v * r).collect();
                        for x in &sampler.x_points {
                            worst = worst.max(f.eval(x, x, &xi)?.norm() / weight);
                        }
                    }
                    c_fit = c_fit.max(Float::powf(worst, 1.0 / power));
                    rows.push((jb, worst));
                }
                slope = slope.max(top_decade_slope(&rows));
            }
        }
        c_of_n.push(c_fit);
    }
    if slope == f64::NEG_INFINITY {
        slope = 0.0;
    }
    Ok(EquivalenceReport {
        c_of_n,
        slope,
        pass: slope <= TREND_TOL,
    })
}

/// Log-slope over the top decade of `⟨ξ⟩`, ignoring zero values.
pub(crate) fn top_decade_slope(rows: &[(f64, f64)]) -> f64 {
    let Some(top) = rows.iter().map(|r| r.0).reduce(f64::max) else {
        return f64::NEG_INFINITY;
    };
    let (xs, ys): (Vec<f64>, Vec<f64>) = rows
        .iter()
        .filter(|r| r.0 >= top / 10.0 * (1.0 - 1e-12) && r.1 > 0.0)
        .map(|r| (Float::ln(r.0), Float::ln(r.1)))
        .unzip();
    if xs.len() < 3 {
        return f64::NEG_INFINITY;
    }
    line_fit(&xs, &ys).map_or(f64::NEG_INFINITY, |f| f.slope)
}

#[cfg(test)]
mod tests;
