//! Sampled verification of the symbol class estimates.
//!
//! For `|α| + |β| <= max_order` the check compares
//! `|∂_ξ^α ∂_x^β a(x, ξ)|` with
//! `C^{1+|α|+|β|} (β!)^{s(ρ-δ)} α! ⟨ξ⟩^{m-ρ|α|+δ|β|}` where `⟨ξ⟩ >= B|α|^s`,
//! and with the same bound without the `⟨ξ⟩` factor below that radius for
//! `|α| <= 2M`. Because every finite sample is bounded, the check also fits
//! the log-slope of the worst ratio against `⟨ξ⟩` over the top decade of
//! radii and fails on an upward trend.

use alloc::vec::Vec;

use num_traits::Float;

use super::SymbolExpr;
use crate::error::{Error, Result};
use crate::freq::MultiIndex;
use crate::sampling::{directions, line_fit, log_space, uniform_grid};
use crate::scalar::Coeff;

/// Largest allowed total derivative order.
pub const MAX_CLASS_ORDER: u32 = 6;

/// Upward trend (log-slope) tolerated before a bound counts as violated.
pub const TREND_TOL: f64 = 0.05;

/// Parameters `(m, ρ, δ, s, C, B, M)` of a symbol class.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClassParams {
    pub m: f64,
    pub rho: f64,
    pub delta: f64,
    pub s: f64,
    pub c: f64,
    pub b: f64,
    pub big_m: u32,
}

impl ClassParams {
    /// Class of order `m` with `δ = 0`, `C = B = 1` and the smallest
    /// admissible `M`.
    pub fn new(dim: usize, m: f64, rho: f64, s: f64) -> Self {
        ClassParams {
            m,
            rho,
            delta: 0.0,
            s,
            c: 1.0,
            b: 1.0,
            big_m: dim as u32 / 2 + 1,
        }
    }

    pub fn with_c(mut self, c: f64) -> Self {
        self.c = c;
        self
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        if !(self.rho > 0.0 && self.rho <= 1.0) {
            return Err(Error::invalid("rho must lie in (0, 1]"));
        }
        if !(self.rho > self.delta) {
            return Err(Error::invalid("rho must exceed delta"));
        }
        if !(self.s >= 1.0) || self.s * (self.rho - self.delta) < 1.0 - 1e-12 {
            return Err(Error::invalid("need s >= 1 and s(rho - delta) >= 1"));
        }
        if !(self.c > 0.0) || !(self.b > 0.0) {
            return Err(Error::invalid("C and B must be positive"));
        }
        if 2 * self.big_m as usize <= dim {
            return Err(Error::invalid("M must exceed d/2"));
        }
        if !self.m.is_finite() {
            return Err(Error::invalid("order m must be finite"));
        }
        Ok(())
    }
}

/// Sample points: radii along directions in ξ, and a grid in x.
#[derive(Clone, Debug, PartialEq)]
pub struct SymbolSampler {
    pub radii: Vec<f64>,
    pub directions: Vec<Vec<f64>>,
    pub x_points: Vec<Vec<f64>>,
}

impl SymbolSampler {
    /// Log-spaced radii from 1 to 1000, the signed axes plus seeded random
    /// directions, and a uniform x grid over one unit period.
    pub fn standard(dim: usize, seed: u64) -> Self {
        let per_axis = match dim {
            1 => 8,
            2 => 5,
            _ => 3,
        };
        SymbolSampler {
            radii: log_space(1.0, 1000.0, 19),
            directions: directions(dim, 6, seed),
            x_points: uniform_grid(dim, per_axis, 1.0),
        }
    }

    /// Replaces the x grid by `n` points per axis over `[0, period)`.
    pub fn with_x_grid(mut self, dim: usize, n: usize, period: f64) -> Self {
        self.x_points = uniform_grid(dim, n, period);
        self
    }
}

/// Sample point attaining a reported ratio.
#[derive(Clone, Debug, PartialEq)]
pub struct Witness {
    pub alpha: MultiIndex,
    pub beta: MultiIndex,
    pub x: Vec<f64>,
    pub xi: Vec<f64>,
    pub ratio: f64,
}

/// Statistics for one derivative pair `(α, β)`.
#[derive(Clone, Debug, PartialEq)]
pub struct OrderStat {
    pub alpha: MultiIndex,
    pub beta: MultiIndex,
    /// Largest ratio to the bound at the requested `C`.
    pub max_ratio: f64,
    /// Log-slope of the ratio against `⟨ξ⟩` over the top decade.
    pub trend: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClassReport {
    pub worst_ratio: f64,
    /// Smallest `C` for which every sampled ratio is at most 1.
    pub fitted_c: f64,
    pub max_trend: f64,
    pub witness: Option<Witness>,
    pub per_order: Vec<OrderStat>,
    pub pass: bool,
}

/// Checks the class estimates on the sample.
pub fn verify_class<C: Coeff>(
    a: &SymbolExpr<C>,
    params: &ClassParams,
    max_order: u32,
    sampler: &SymbolSampler,
) -> Result<ClassReport> {
    let dim = a.dim();
    params.validate(dim)?;
    if a.is_amplitude() {
        return Err(Error::Unsupported("symbol in (x, ξ)".into()));
    }
    if max_order > MAX_CLASS_ORDER {
        return Err(Error::invalid(alloc::format!(
            "derivative order {max_order} exceeds {MAX_CLASS_ORDER}"
        )));
    }
    let rd = params.rho - params.delta;
    let mut worst_ratio = 0.0f64;
    let mut worst: Option<Witness> = None;
    let mut fitted_c = 0.0f64;
    let mut max_trend = f64::NEG_INFINITY;
    let mut trend_witness: Option<Witness> = None;
    let mut per_order = Vec::new();

    for alpha in MultiIndex::up_to(dim, max_order) {
        let da = a.dxi(&alpha)?;
        for beta in MultiIndex::up_to(dim, max_order - alpha.order()) {
            let d = da.dx(&beta)?;
            if d.is_zero() {
                continue;
            }
            let f = d.compile();
            let n = alpha.order() + beta.order();
            let c_pow = Float::powi(params.c, 1 + n as i32);
            let fact = Float::powf(beta.factorial(), params.s * rd) * alpha.factorial();
            let threshold = params.b * Float::powf(f64::from(alpha.order()), params.s);
            let order = params.m - params.rho * f64::from(alpha.order()) + params.delta * f64::from(beta.order());
            let mut stat_max = 0.0f64;
            // per radius: (⟨ξ⟩, max raw ratio, point)
            let mut per_radius: Vec<(f64, f64, Vec<f64>, Vec<f64>)> = Vec::new();
            for &r in &sampler.radii {
                let jb = Float::sqrt(1.0 + r * r);
                let main = jb >= threshold;
                if !main && alpha.order() > 2 * params.big_m {
                    continue;
                }
                let weight = if main { fact * Float::powf(jb, order) } else { fact };
                let mut best = (0.0f64, Vec::new(), Vec::new());
                for dir in &sampler.directions {
                    let xi: Vec<f64> = dir.iter().map(|v| v * r).collect();
                    for x in &sampler.x_points {
                        let v = f.eval(x, x, &xi)?.norm();
                        let raw = v / weight;
                        if raw > best.0 || best.1.is_empty() {
                            best = (raw, x.clone(), xi.clone());
                        }
                    }
                }
                let raw = best.0;
                fitted_c = fitted_c.max(Float::powf(raw, 1.0 / f64::from(1 + n)));
                let ratio = raw / c_pow;
                stat_max = stat_max.max(ratio);
                if ratio > worst_ratio || worst.is_none() {
                    worst_ratio = worst_ratio.max(ratio);
                    worst = Some(Witness {
                        alpha: alpha.clone(),
                        beta: beta.clone(),
                        x: best.1.clone(),
                        xi: best.2.clone(),
                        ratio,
                    });
                }
                if main {
                    per_radius.push((jb, raw, best.1, best.2));
                }
            }
            let trend = trend_slope(&per_radius);
            if trend > max_trend {
                max_trend = trend;
                if let Some(last) = per_radius.last() {
                    trend_witness = Some(Witness {
                        alpha: alpha.clone(),
                        beta: beta.clone(),
                        x: last.2.clone(),
                        xi: last.3.clone(),
                        ratio: last.1 / c_pow,
                    });
                }
            }
            per_order.push(OrderStat {
                alpha: alpha.clone(),
                beta,
                max_ratio: stat_max,
                trend,
            });
        }
    }
    if max_trend == f64::NEG_INFINITY {
        max_trend = 0.0;
    }
    let ratio_ok = worst_ratio <= 1.0;
    let trend_ok = max_trend <= TREND_TOL;
    let witness = if !ratio_ok {
        worst
    } else if !trend_ok {
        trend_witness
    } else {
        None
    };
    Ok(ClassReport {
        worst_ratio,
        // guard against rounding in the root
        fitted_c: fitted_c * (1.0 + 1e-12),
        max_trend,
        witness,
        per_order,
        pass: ratio_ok && trend_ok,
    })
}

/// Log-slope over the top decade of `⟨ξ⟩`, ignoring zero ratios.
fn trend_slope(rows: &[(f64, f64, Vec<f64>, Vec<f64>)]) -> f64 {
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
