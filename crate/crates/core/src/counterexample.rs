//! The compactly supported Gevrey bump `ψ(x) = g_s(x) g_s(1-x)`,
//! `g_s(x) = exp(-x^{-1/(s-1)})`, and the limit periodic function
//! `f = Σ n^{-1/4} φ_n` built from its rescaled periodizations. Numerical
//! witness that `f` has no global Gevrey constant.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_traits::{Float, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::sampling::{chebyshev_points, gauss_legendre01, lin_space};
use crate::scalar::{ln_factorial, Rational};

/// Highest derivative order accepted.
pub const MAX_DERIVATIVE: u32 = 40;

/// Highest block index accepted by [`growth_witness`]: the block
/// `[2^n, 2^n + 1/n]` stays resolvable in `f64` (ulp of `2^n` below `1/(1000 n)`).
pub const MAX_BLOCK: u32 = 40;

/// `Σ_k c_k x^{q_k} exp(-x^{-p})` with `p = 1/(s-1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct GsTerm {
    p: Rational,
    terms: BTreeMap<Rational, f64>,
}

impl GsTerm {
    /// `g_s` itself.
    pub fn base(s: &Rational) -> Result<Self> {
        if *s <= Rational::one() {
            return Err(Error::invalid("g_s needs s > 1"));
        }
        let p = (s - Rational::one()).recip();
        let mut terms = BTreeMap::new();
        terms.insert(Rational::zero(), 1.0);
        Ok(GsTerm { p, terms })
    }

    /// Exponent `p` in `exp(-x^{-p})`.
    pub fn p(&self) -> &Rational {
        &self.p
    }

    /// `(q_k, c_k)` in increasing `q`.
    pub fn terms(&self) -> impl Iterator<Item = (&Rational, f64)> {
        self.terms.iter().map(|(q, c)| (q, *c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// `d/dx (c x^q e^{-x^{-p}}) = c q x^{q-1} e^{..} + c p x^{q-p-1} e^{..}`.
    pub fn derivative(&self) -> Self {
        let pf = self.p.to_f64().expect("finite exponent");
        let one = Rational::one();
        let mut out: BTreeMap<Rational, f64> = BTreeMap::new();
        for (q, c) in &self.terms {
            if !q.is_zero() {
                *out.entry(q - &one).or_insert(0.0) += c * q.to_f64().expect("finite exponent");
            }
            *out.entry(q - &self.p - &one).or_insert(0.0) += c * pf;
        }
        out.retain(|_, c| *c != 0.0);
        GsTerm { p: self.p.clone(), terms: out }
    }

    /// `(sign, ln|value|)`; sign 0 means the value is exactly zero.
    pub fn eval_log(&self, x: f64) -> (f64, f64) {
        if !(x > 0.0) || self.terms.is_empty() {
            return (0.0, f64::NEG_INFINITY);
        }
        let lx = Float::ln(x);
        let damp = -Float::exp(-self.p.to_f64().expect("finite exponent") * lx);
        let logs: Vec<(f64, f64)> = self
            .terms
            .iter()
            .map(|(q, c)| (c.signum(), Float::ln(c.abs()) + q.to_f64().expect("finite exponent") * lx + damp))
            .collect();
        signed_log_sum(&logs)
    }

    /// Zero for `x <= 0`.
    pub fn eval(&self, x: f64) -> f64 {
        let (sg, l) = self.eval_log(x);
        sg * Float::exp(l)
    }
}

/// `Σ sign_i exp(l_i)` as `(sign, ln|sum|)`.
fn signed_log_sum(items: &[(f64, f64)]) -> (f64, f64) {
    let top = items.iter().map(|t| t.1).fold(f64::NEG_INFINITY, f64::max);
    if top == f64::NEG_INFINITY {
        return (0.0, f64::NEG_INFINITY);
    }
    let acc: f64 = items.iter().map(|(sg, l)| sg * Float::exp(l - top)).sum();
    if acc == 0.0 {
        (0.0, f64::NEG_INFINITY)
    } else {
        (acc.signum(), top + Float::ln(acc.abs()))
    }
}

/// `∂^j g_s`.
pub fn gs_derivative(s: &Rational, j: u32) -> Result<GsTerm> {
    if j > MAX_DERIVATIVE {
        return Err(Error::TooManyTerms(alloc::format!(
            "derivative order {j} exceeds {MAX_DERIVATIVE}; use a lower j"
        )));
    }
    let mut g = GsTerm::base(s)?;
    for _ in 0..j {
        g = g.derivative();
    }
    Ok(g)
}

/// Sample grid for suprema over `[0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SupGrid {
    /// Chebyshev points on `[0, 1]`.
    pub points: usize,
    /// Extra uniform points between the neighbours of the argmax.
    pub refine: usize,
}

impl Default for SupGrid {
    fn default() -> Self {
        SupGrid { points: 2049, refine: 257 }
    }
}

/// `∂^i g_s` for `i = 0..=j_max`, the shared input of all `ψ` derivatives.
///
/// The monomial sums of `∂^i g_s` cancel near `x = 1`; beyond `j ≈ 25`
/// the suprema lose digits.
#[derive(Clone, Debug)]
pub struct PsiDerivatives {
    s: f64,
    g: Vec<GsTerm>,
    binom: Vec<Vec<f64>>,
}

impl PsiDerivatives {
    pub fn new(s: &Rational, j_max: u32) -> Result<Self> {
        if j_max > MAX_DERIVATIVE {
            return Err(Error::TooManyTerms(alloc::format!(
                "derivative order {j_max} exceeds {MAX_DERIVATIVE}; use a lower j"
            )));
        }
        let mut g = alloc::vec![GsTerm::base(s)?];
        for i in 0..j_max as usize {
            let next = g[i].derivative();
            g.push(next);
        }
        let mut binom: Vec<Vec<f64>> = alloc::vec![alloc::vec![1.0]];
        for n in 1..=j_max as usize {
            let prev = &binom[n - 1];
            let row = (0..=n)
                .map(|k| if k == 0 || k == n { 1.0 } else { prev[k - 1] + prev[k] })
                .collect();
            binom.push(row);
        }
        Ok(PsiDerivatives {
            s: s.to_f64().expect("finite s"),
            g,
            binom,
        })
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn j_max(&self) -> u32 {
        (self.g.len() - 1) as u32
    }

    /// `∂^j ψ(x)` via Leibniz over `g_s(x) g_s(1-x)`, as `(sign, ln|·|)`.
    pub fn eval_log(&self, j: u32, x: f64) -> (f64, f64) {
        if !(x > 0.0 && x < 1.0) {
            return (0.0, f64::NEG_INFINITY);
        }
        let j = j as usize;
        let left: Vec<(f64, f64)> = (0..=j).map(|i| self.g[i].eval_log(x)).collect();
        let right: Vec<(f64, f64)> = (0..=j).map(|i| self.g[i].eval_log(1.0 - x)).collect();
        let items: Vec<(f64, f64)> = (0..=j)
            .filter(|&i| left[i].0 != 0.0 && right[j - i].0 != 0.0)
            .map(|i| {
                // d/dx g(1-x) brings (-1)^{j-i}
                let sign = left[i].0 * right[j - i].0 * if (j - i).is_multiple_of(2) { 1.0 } else { -1.0 };
                (sign, Float::ln(self.binom[j][i]) + left[i].1 + right[j - i].1)
            })
            .collect();
        signed_log_sum(&items)
    }

    pub fn eval(&self, j: u32, x: f64) -> f64 {
        let (sg, l) = self.eval_log(j, x);
        sg * Float::exp(l)
    }

    /// `(ln sup|∂^j ψ|, argmax)` over the grid, refined once near the argmax.
    pub fn sup_log(&self, j: u32, grid: SupGrid) -> (f64, f64) {
        let pts = chebyshev_points(0.0, 1.0, grid.points.max(3));
        let mut best = (f64::NEG_INFINITY, 0.5);
        let mut at = 0;
        for (i, &x) in pts.iter().enumerate() {
            let l = self.eval_log(j, x).1;
            if l > best.0 {
                best = (l, x);
                at = i;
            }
        }
        if grid.refine > 0 {
            let lo = pts[at.saturating_sub(1)];
            let hi = pts[(at + 1).min(pts.len() - 1)];
            for x in lin_space(lo, hi, grid.refine) {
                let l = self.eval_log(j, x).1;
                if l > best.0 {
                    best = (l, x);
                }
            }
        }
        best
    }
}

/// `sup_x |∂^j ψ(x)|` over the grid.
pub fn psi_derivative_sup(s: &Rational, j: u32, grid: SupGrid) -> Result<f64> {
    let t = PsiDerivatives::new(s, j)?;
    Ok(Float::exp(t.sup_log(j, grid).0))
}

#[derive(Clone, Debug, PartialEq)]
pub struct C0Estimate {
    /// Lower bound `max_{1<=j<=j_max} (sup|∂^j ψ| / (j!)^s)^{1/j}`.
    pub c0_lb: f64,
    /// Running maximum after each `j = 1..=j_max`.
    pub running: Vec<f64>,
    /// `(sup|∂^j ψ| / (j!)^s)^{1/j}` for each `j`.
    pub per_j: Vec<f64>,
    pub argmax_j: u32,
}

/// Lower bound of `C₀ = sup_{x, j>=1} (|∂^j ψ(x)| (j!)^{-s})^{1/j}`.
pub fn c0_estimate(s: &Rational, j_max: u32, grid: SupGrid) -> Result<C0Estimate> {
    if j_max == 0 {
        return Err(Error::invalid("j_max must be at least 1"));
    }
    let t = PsiDerivatives::new(s, j_max)?;
    c0_from_table(&t, grid)
}

pub fn c0_from_table(t: &PsiDerivatives, grid: SupGrid) -> Result<C0Estimate> {
    let mut per_j = Vec::new();
    let mut running = Vec::new();
    let mut best = (0.0f64, 1u32);
    for j in 1..=t.j_max() {
        let l = t.sup_log(j, grid).0;
        let v = Float::exp((l - t.s() * ln_factorial(j)) / j as f64);
        per_j.push(v);
        if v > best.0 {
            best = (v, j);
        }
        running.push(best.0);
    }
    if !(best.0 > 0.0) {
        return Err(Error::NonFinite { point: alloc::vec![] });
    }
    Ok(C0Estimate {
        c0_lb: best.0,
        running,
        per_j,
        argmax_j: best.1,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct GrowthWitness {
    pub n: u32,
    pub m_n: f64,
    /// Order attaining `M_n`.
    pub j: u32,
    /// `n^{1/4}`.
    pub threshold: f64,
    /// `n > (C/C₀)²`: the regime in which `M_n > n^{1/4}` is guaranteed.
    pub in_regime: bool,
}

/// `M_n = max_{j<=j_max, 0<=x<=1/n} n^{-1/4} C^{-j} (j!)^{-s} |∂^j ψ_n(x)|`.
///
/// On `[2^n, 2^n + 1/n]` every block but `φ_n` vanishes and
/// `∂^j ψ_n(x) = n^j (∂^j ψ)(nx)`, so the maximum only needs the suprema of
/// `∂^j ψ` over `[0, 1]`.
pub fn growth_witness(t: &PsiDerivatives, c: f64, c0: f64, n: u32, grid: SupGrid) -> Result<GrowthWitness> {
    if n == 0 || n > MAX_BLOCK {
        return Err(Error::invalid(alloc::format!("block index must be in 1..={MAX_BLOCK}")));
    }
    if !(c > 0.0) {
        return Err(Error::invalid("C must be positive"));
    }
    let sups: Vec<f64> = (0..=t.j_max()).map(|j| t.sup_log(j, grid).0).collect();
    Ok(witness_from_sups(&sups, t.s(), c, c0, n))
}

/// [`growth_witness`] from precomputed `ln sup|∂^j ψ|`, `j = 0, 1, ...`.
pub fn witness_from_sups(log_sups: &[f64], s: f64, c: f64, c0: f64, n: u32) -> GrowthWitness {
    let ln_n = Float::ln(n as f64);
    let mut best = (f64::NEG_INFINITY, 0u32);
    for (j, l) in log_sups.iter().enumerate() {
        let v = (j as f64 - 0.25) * ln_n - j as f64 * Float::ln(c) - s * ln_factorial(j as u32) + l;
        if v > best.0 {
            best = (v, j as u32);
        }
    }
    GrowthWitness {
        n,
        m_n: Float::exp(best.0),
        j: best.1,
        threshold: Float::powf(n as f64, 0.25),
        in_regime: (n as f64) > (c / c0) * (c / c0),
    }
}

/// `φ_n(x) = Σ_k ψ(n(x - 2^n(1+2k)))`, period `2^{n+1}`.
pub fn phi_block(t: &PsiDerivatives, n: u32, x: f64) -> f64 {
    let period = Float::powi(2.0, n as i32 + 1);
    let y = (x - period / 2.0).rem_euclid(period);
    t.eval(0, n as f64 * y)
}

/// Partial sum `f_N = Σ_{n<=N} n^{-1/4} φ_n`.
pub fn f_partial(t: &PsiDerivatives, n_max: u32, x: f64) -> f64 {
    (1..=n_max)
        .map(|n| Float::powf(n as f64, -0.25) * phi_block(t, n, x))
        .sum()
}

/// `∫_0^1 ψ` by composite Gauss–Legendre.
pub fn psi_integral(t: &PsiDerivatives) -> f64 {
    let (nodes, weights) = gauss_legendre01(24);
    let panels = 64;
    let h = 1.0 / panels as f64;
    let mut acc = 0.0;
    for p in 0..panels {
        for (u, w) in nodes.iter().zip(&weights) {
            acc += w * h * t.eval(0, (p as f64 + u) * h);
        }
    }
    acc
}

/// Mean value of `f_N`: `φ_n` has mean `∫ψ / (n 2^{n+1})`.
pub fn f_partial_mean(t: &PsiDerivatives, n_max: u32) -> f64 {
    let i = psi_integral(t);
    (1..=n_max)
        .map(|n| Float::powf(n as f64, -0.25) * i / (n as f64 * Float::powi(2.0, n as i32 + 1)))
        .sum()
}

/// `s` given as a decimal or `p/q` string.
pub fn parse_s(text: &str) -> Result<Rational> {
    let bad = || Error::invalid(alloc::format!("cannot read s from {text:?}"));
    let text = text.trim();
    if let Some((a, b)) = text.split_once('/') {
        let a: num_bigint::BigInt = a.trim().parse().map_err(|_| bad())?;
        let b: num_bigint::BigInt = b.trim().parse().map_err(|_| bad())?;
        if b.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(a, b));
    }
    let (int, frac) = text.split_once('.').unwrap_or((text, ""));
    let digits = alloc::format!("{int}{frac}");
    let num: num_bigint::BigInt = digits.parse().map_err(|_| bad())?;
    let den = num_traits::pow(num_bigint::BigInt::from(10), frac.len());
    let r = Rational::new(num, den);
    if r.is_negative() {
        return Err(bad());
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two() -> Rational {
        Rational::from_integer(2.into())
    }

    #[test]
    fn closed_forms_at_s2() {
        let g1 = gs_derivative(&two(), 1).unwrap();
        let g2 = gs_derivative(&two(), 2).unwrap();
        for x in [0.05, 0.3, 0.7, 2.0] {
            let e = (-1.0 / x).exp();
            assert!((g1.eval(x) - x.powi(-2) * e).abs() <= 1e-14 * (x.powi(-2) * e));
            let want = (x.powi(-4) - 2.0 * x.powi(-3)) * e;
            assert!((g2.eval(x) - want).abs() <= 1e-13 * want.abs().max(1e-300));
        }
        assert_eq!(gs_derivative(&two(), 0).unwrap(), GsTerm::base(&two()).unwrap());
        assert_eq!(g2.eval(0.0), 0.0);
        assert_eq!(g2.eval(-1.0), 0.0);
        assert!(g2.eval(1e-3).abs() < 1e-300);
    }

    #[test]
    fn guards() {
        assert!(matches!(gs_derivative(&two(), 41), Err(Error::TooManyTerms(_))));
        assert!(GsTerm::base(&Rational::one()).is_err());
        assert!(parse_s("3/2").unwrap() == Rational::new(3.into(), 2.into()));
        assert!(parse_s("1.25").unwrap() == Rational::new(5.into(), 4.into()));
        assert!(parse_s("x").is_err());
    }

    /// Fornberg weights for the `j`-th derivative on `x + k h`, `|k| <= half`.
    fn central_difference(f: impl Fn(f64) -> f64, x: f64, j: u32, h: f64) -> f64 {
        let half = j as i64 / 2 + 6;
        let nodes: Vec<f64> = (-half..=half).map(|k| k as f64).collect();
        let n = nodes.len();
        let m = j as usize;
        let mut c = vec![vec![0.0; m + 1]; n];
        c[0][0] = 1.0;
        let mut c1 = 1.0;
        for i in 1..n {
            let mut c2 = 1.0;
            for k in 0..i {
                let c3 = nodes[i] - nodes[k];
                c2 *= c3;
                for d in (0..=m.min(i)).rev() {
                    let prev_i = if d > 0 { c[i - 1][d - 1] } else { 0.0 };
                    if k == i - 1 {
                        c[i][d] = c1 * (d as f64 * prev_i - nodes[i - 1] * c[i - 1][d]) / c2;
                    }
                    let prev_k = if d > 0 { c[k][d - 1] } else { 0.0 };
                    c[k][d] = (nodes[i] * c[k][d] - d as f64 * prev_k) / c3;
                }
            }
            c1 = c2;
        }
        let acc: f64 = (0..n).map(|i| c[i][m] * f(x + nodes[i] * h)).sum();
        acc / h.powi(j as i32)
    }

    #[test]
    fn finite_difference_cross_check() {
        for s in [two(), Rational::new(3.into(), 2.into()), Rational::new(5.into(), 2.into())] {
            let g = GsTerm::base(&s).unwrap();
            for j in 1..=6u32 {
                let d = gs_derivative(&s, j).unwrap();
                for x in [0.3, 0.5, 0.8] {
                    let fd = central_difference(|y| g.eval(y), x, j, (0.01 + 0.005 * j as f64) * x);
                    let ex = d.eval(x);
                    // exact zeros occur (s = 2, j = 2, x = 1/2): measure against the term sizes
                    let scale: f64 = d.terms().map(|(q, c)| c.abs() * x.powf(q.to_f64().unwrap())).sum::<f64>() * g.eval(x);
                    assert!((fd - ex).abs() <= 1e-5 * ex.abs().max(1e-3 * scale), "s={s} j={j} x={x}: {fd} vs {ex}");
                }
            }
        }
    }

    #[test]
    fn matches_cauchy_integral_at_high_order() {
        // g_s(z) = exp(-1/z) is analytic off 0; ∂^j g(x) = j!/(2π r^j) ∫ g(x+re^{iθ}) e^{-ijθ} dθ
        let d = gs_derivative(&two(), 20).unwrap();
        for x in [0.4, 0.7] {
            let r = 0.5 * x;
            let m = 512;
            let mut acc = 0.0;
            for k in 0..m {
                let th = core::f64::consts::TAU * k as f64 / m as f64;
                let z = num_complex::Complex64::new(x + r * th.cos(), r * th.sin());
                let g = (-z.inv()).exp();
                acc += (g * num_complex::Complex64::from_polar(1.0, -20.0 * th)).re;
            }
            let want = acc / m as f64 * (ln_factorial(20) - 20.0 * r.ln()).exp();
            let got = d.eval(x);
            assert!((got - want).abs() <= 1e-6 * want.abs(), "x={x}: {got} vs {want}");
        }
    }

    #[test]
    fn psi_sup_examples() {
        let t = PsiDerivatives::new(&two(), 2).unwrap();
        let (l, at) = t.sup_log(0, SupGrid::default());
        assert!((l + 4.0).abs() < 1e-9 && (at - 0.5).abs() < 1e-3);
        // unimodal on the grid
        let xs = lin_space(0.0, 1.0, 1001);
        let v: Vec<f64> = xs.iter().map(|&x| t.eval(0, x)).collect();
        assert!(v[..=500].windows(2).all(|w| w[1] >= w[0]));
        assert!(v[500..].windows(2).all(|w| w[1] <= w[0]));
        let (l1, at1) = t.sup_log(1, SupGrid::default());
        assert!(l1.is_finite() && (at1 - 0.5).abs() > 0.05);
        // ψ' is odd about 1/2
        assert!((t.eval(1, 0.3) + t.eval(1, 0.7)).abs() < 1e-15);
    }

    #[test]
    fn leibniz_agrees_with_difference_of_psi() {
        let t = PsiDerivatives::new(&two(), 4).unwrap();
        for j in 1..=4u32 {
            for x in [0.3, 0.5, 0.8] {
                let fd = central_difference(|y| t.eval(0, y), x, j, (0.01 + 0.005 * j as f64) * x.min(1.0 - x));
                let ex = t.eval(j, x);
                assert!((fd - ex).abs() <= 1e-5 * ex.abs().max(1e-4), "j={j} x={x}: {fd} vs {ex}");
            }
        }
    }

    #[test]
    fn c0_is_positive_monotone_and_bounds_sups() {
        let est = c0_estimate(&two(), 20, SupGrid::default()).unwrap();
        assert!(est.c0_lb > 0.0);
        assert!(est.running.windows(2).all(|w| w[1] >= w[0]));
        let t = PsiDerivatives::new(&two(), 20).unwrap();
        // sups at j = 15 and 20 against the Cauchy integral of ψ
        for j in [15u32, 20] {
            let (l, x) = t.sup_log(j, SupGrid::default());
            let r = 0.5 * x.min(1.0 - x);
            let m = 2048;
            let mut acc = 0.0;
            for k in 0..m {
                let th = core::f64::consts::TAU * k as f64 / m as f64;
                let z = num_complex::Complex64::new(x + r * th.cos(), r * th.sin());
                let psi = (-z.inv() - (1.0 - z).inv()).exp();
                acc += (psi * num_complex::Complex64::from_polar(1.0, -(j as f64) * th)).re;
            }
            let want = (acc / m as f64).abs().ln() + ln_factorial(j) - j as f64 * r.ln();
            assert!((l - want).abs() < 1e-4, "j={j}: {l} vs {want}");
        }
        for j in 1..=20u32 {
            let sup = t.sup_log(j, SupGrid::default()).0;
            assert!(sup <= j as f64 * est.c0_lb.ln() + 2.0 * ln_factorial(j) + 1e-9);
        }
    }

    #[test]
    fn witness_grows() {
        let t = PsiDerivatives::new(&two(), 12).unwrap();
        let c0 = c0_from_table(&t, SupGrid::default()).unwrap().c0_lb;
        let ms: Vec<GrowthWitness> = [4, 8, 16, 32]
            .iter()
            .map(|&n| growth_witness(&t, 0.9 * c0, c0, n, SupGrid::default()).unwrap())
            .collect();
        assert!(ms.windows(2).all(|w| w[1].m_n > w[0].m_n));
        assert!(ms.iter().all(|w| w.m_n > w.threshold && w.in_regime));
        assert!(growth_witness(&t, c0, c0, MAX_BLOCK + 1, SupGrid::default()).is_err());
        // huge C: outside the regime
        let w = growth_witness(&t, 100.0 * c0, c0, 4, SupGrid::default()).unwrap();
        assert!(!w.in_regime);
    }

    #[test]
    fn blocks_have_disjoint_support() {
        let t = PsiDerivatives::new(&two(), 0).unwrap();
        for n in 1..=4u32 {
            let start = 2f64.powi(n as i32);
            assert!(phi_block(&t, n, start + 0.5 / n as f64) > 0.0);
            assert_eq!(phi_block(&t, n, start + 1.0 / n as f64 + 1e-9), 0.0);
            assert_eq!(phi_block(&t, n, start - 1e-9), 0.0);
            for m in 1..=4u32 {
                if m != n {
                    assert_eq!(phi_block(&t, m, start + 0.5 / n as f64), 0.0);
                }
            }
        }
        let i = psi_integral(&t);
        assert!(i > 0.0 && i < (-4.0f64).exp());
    }
}
