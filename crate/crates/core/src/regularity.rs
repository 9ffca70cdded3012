//! Gevrey-regularity diagnostics from the decay of Bohr–Fourier coefficients.

use alloc::vec::Vec;

use num_traits::Float;

use crate::error::{Error, Result};
use crate::sampling::{line_fit, LineFit};
use crate::scalar::Coeff;
use crate::trigpoly::TrigPoly;

/// Magnitudes below this are dropped from fits.
pub const MIN_MAGNITUDE: f64 = 1e-300;

/// RMS (log units) above which no exponential profile is accepted.
pub const NON_GEVREY_RMS: f64 = 0.5;

/// Fewest usable points for a fit.
pub const MIN_FIT_POINTS: usize = 8;

/// `(ξ, |f̂_ξ|)` pairs with distinct frequencies.
#[derive(Clone, Debug, PartialEq)]
pub struct CoeffData {
    points: Vec<(Vec<f64>, f64)>,
}

impl CoeffData {
    pub fn new(points: Vec<(Vec<f64>, f64)>) -> Result<Self> {
        for (xi, m) in &points {
            if !m.is_finite() || *m < 0.0 || xi.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite { point: xi.clone() });
            }
        }
        let mut sorted: Vec<&Vec<f64>> = points.iter().map(|p| &p.0).collect();
        sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::invalid("repeated frequency in coefficient data"));
        }
        Ok(CoeffData { points })
    }

    /// Samples `|ξ| ↦ m(|ξ|)` at `ξ = k` for `k = 1..=n` (d = 1).
    pub fn from_profile(n: usize, m: impl Fn(f64) -> f64) -> Result<Self> {
        CoeffData::new((1..=n).map(|k| (alloc::vec![k as f64], m(k as f64))).collect())
    }

    pub fn from_trigpoly<C: Coeff>(f: &TrigPoly<C>) -> Result<Self> {
        CoeffData::new(
            f.terms()
                .iter()
                .map(|(xi, c)| (xi.to_f64(f.dim(), f.basis()), c.abs()))
                .collect(),
        )
    }

    pub fn points(&self) -> &[(Vec<f64>, f64)] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// `(|ξ|, |f̂_ξ|)` sorted by radius.
    pub fn radial(&self) -> Vec<(f64, f64)> {
        let mut v: Vec<(f64, f64)> = self
            .points
            .iter()
            .map(|(xi, m)| (Float::sqrt(xi.iter().map(|x| x * x).sum::<f64>()), *m))
            .collect();
        v.sort_by(|a, b| a.0.total_cmp(&b.0));
        v
    }
}

/// Why a fit was flagged as not Gevrey.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NonGevreyReason {
    /// RMS above the threshold for every `s` on the grid.
    LargeResidual,
    /// Best `s` sits at the top of the grid.
    GridEdge,
    /// A power law `C|ξ|^{-k}` fits better than any exponential profile.
    PowerLawFitsBetter,
    /// The fitted `ε` is not positive.
    NoDecay,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GevreyFit {
    pub s_hat: f64,
    pub eps_hat: f64,
    pub c_hat: f64,
    pub rms_residual: f64,
    pub n_points: usize,
    /// RMS of the best power-law fit `log|f̂| ~ -k log|ξ|`.
    pub power_law_rms: f64,
    pub non_gevrey: Option<NonGevreyReason>,
}

/// `1.00, 1.01, ..., 4.00`.
pub fn default_s_grid() -> Vec<f64> {
    (0..=300).map(|i| 1.0 + i as f64 / 100.0).collect()
}

/// For each `s`, least squares of `log|f̂_ξ|` against `-|ξ|^{1/s}` on
/// `|ξ| >= 1`; keeps the `s` with the smallest RMS residual.
pub fn gevrey_fit(data: &CoeffData, s_grid: &[f64]) -> Result<GevreyFit> {
    if s_grid.is_empty() || s_grid.iter().any(|s| !(*s >= 1.0)) {
        return Err(Error::invalid("s grid must be nonempty with s >= 1"));
    }
    let pts: Vec<(f64, f64)> = data
        .radial()
        .into_iter()
        .filter(|(r, m)| *r >= 1.0 && *m > MIN_MAGNITUDE)
        .map(|(r, m)| (r, Float::ln(m)))
        .collect();
    if pts.len() < MIN_FIT_POINTS {
        return Err(Error::InsufficientData(alloc::format!(
            "{} usable coefficients, need {MIN_FIT_POINTS}",
            pts.len()
        )));
    }
    let ys: Vec<f64> = pts.iter().map(|p| p.1).collect();
    let mut best: Option<(f64, LineFit)> = None;
    let mut all_large = true;
    for &s in s_grid {
        let xs: Vec<f64> = pts.iter().map(|p| -Float::powf(p.0, 1.0 / s)).collect();
        let Some(fit) = line_fit(&xs, &ys) else {
            continue;
        };
        if fit.rms <= NON_GEVREY_RMS {
            all_large = false;
        }
        if best.as_ref().is_none_or(|b| fit.rms < b.1.rms) {
            best = Some((s, fit));
        }
    }
    let (s_hat, fit) = best.ok_or_else(|| Error::InsufficientData("all radii coincide".into()))?;
    let logs: Vec<f64> = pts.iter().map(|p| Float::ln(p.0)).collect();
    let power_law_rms = line_fit(&logs, &ys).map_or(f64::INFINITY, |f| f.rms);
    let top = s_grid.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let non_gevrey = if all_large {
        Some(NonGevreyReason::LargeResidual)
    } else if fit.slope <= 0.0 {
        Some(NonGevreyReason::NoDecay)
    } else if s_grid.len() > 1 && s_hat >= top {
        Some(NonGevreyReason::GridEdge)
    } else if power_law_rms < fit.rms {
        Some(NonGevreyReason::PowerLawFitsBetter)
    } else {
        None
    };
    Ok(GevreyFit {
        s_hat,
        eps_hat: fit.slope,
        c_hat: Float::exp(fit.intercept),
        rms_residual: fit.rms,
        n_points: pts.len(),
        power_law_rms,
        non_gevrey,
    })
}

/// `ε = (s/e)(2π/(C d^{1/2}))^{1/s}`, the decay rate implied by a Gevrey
/// constant `C`.
pub fn predicted_eps(s: f64, c: f64, dim: usize) -> f64 {
    s / core::f64::consts::E * Float::powf(core::f64::consts::TAU / (c * Float::sqrt(dim as f64)), 1.0 / s)
}

#[derive(Clone, Debug, PartialEq)]
pub struct MembershipRow {
    pub eps: f64,
    /// `(R, partial norm over |ξ| <= R)`.
    pub partial: Vec<(f64, f64)>,
    pub norm: f64,
    /// Weighted terms decay over the upper half of the data.
    pub converging: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MembershipReport {
    pub s: f64,
    pub p: f64,
    pub rows: Vec<MembershipRow>,
    /// Converging at every tested `ε > 0`.
    pub consistent_with_w_s0: bool,
    /// Converging at some tested `ε < 0`.
    pub consistent_with_w_s0_minus: bool,
}

/// Partial `W^p_{s,ε}` norms, weight `exp(-ε|ξ|^{1/s})`.
///
/// A row counts as converging when the log of the weighted terms has a
/// negative fitted slope against `|ξ|^{1/s}` over the upper half of the data.
pub fn membership_report(data: &CoeffData, s: f64, eps_grid: &[f64], p: f64) -> Result<MembershipReport> {
    if !(s >= 1.0) || !(p >= 1.0) {
        return Err(Error::invalid("need s >= 1 and p >= 1"));
    }
    let radial = data.radial();
    let mut rows = Vec::with_capacity(eps_grid.len());
    for &eps in eps_grid {
        let mut partial = Vec::with_capacity(radial.len());
        let mut acc = 0.0f64;
        let mut logs = Vec::new();
        for (r, m) in &radial {
            let w = Float::exp(-eps * Float::powf(*r, 1.0 / s)) * m;
            if p.is_infinite() {
                acc = acc.max(w);
            } else {
                acc += Float::powf(w, p);
            }
            let norm = if p.is_infinite() { acc } else { Float::powf(acc, 1.0 / p) };
            match partial.last_mut() {
                Some((lr, v)) if *lr == *r => *v = norm,
                _ => partial.push((*r, norm)),
            }
            if *m > MIN_MAGNITUDE {
                logs.push((Float::powf(*r, 1.0 / s), Float::ln(*m) - eps * Float::powf(*r, 1.0 / s)));
            }
        }
        let half = logs.len() / 2;
        let upper = &logs[half..];
        let (xs, ys): (Vec<f64>, Vec<f64>) = upper.iter().copied().unzip();
        let converging = match line_fit(&xs, &ys) {
            Some(f) => f.slope < 0.0,
            // one or two coefficients: a finite sum
            None => true,
        };
        rows.push(MembershipRow {
            eps,
            norm: partial.last().map_or(0.0, |v| v.1),
            partial,
            converging,
        });
    }
    let pos: Vec<&MembershipRow> = rows.iter().filter(|r| r.eps > 0.0).collect();
    Ok(MembershipReport {
        s,
        p,
        consistent_with_w_s0: !pos.is_empty() && pos.iter().all(|r| r.converging),
        consistent_with_w_s0_minus: rows.iter().any(|r| r.eps < 0.0 && r.converging),
        rows,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct FrequencyRow {
    pub eps: f64,
    /// `(R, Σ_{ξ∈Λ, |ξ|<=R} exp(-ε|ξ|^{1/s}))`.
    pub partial: Vec<(f64, f64)>,
    /// Relative tail between `R_max/2` and `R_max`.
    pub tail_ratio: f64,
    pub converged: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FrequencyReport {
    pub s: f64,
    pub rows: Vec<FrequencyRow>,
    pub all_converged: bool,
}

/// Default relative tail tolerance of [`frequency_condition_check`].
pub const TAIL_TOL: f64 = 1e-6;

/// Partial sums of `Σ_{ξ∈Λ} exp(-ε|ξ|^{1/s})` at `R = R_max / 2^k` for
/// `k = steps-1, ..., 0`. `generator(R)` lists `Λ ∩ {|ξ| <= R}`; a bounded
/// set truncated more finely as `R` grows shows up as a non-decaying tail.
pub fn frequency_condition_check(
    generator: &dyn Fn(f64) -> Vec<Vec<f64>>,
    s: f64,
    eps_list: &[f64],
    r_max: f64,
    steps: usize,
    tail_tol: f64,
) -> Result<FrequencyReport> {
    if !(s >= 1.0) || !(r_max > 0.0) || steps < 2 {
        return Err(Error::invalid("need s >= 1, R_max > 0 and at least two radii"));
    }
    if eps_list.iter().any(|e| !(*e > 0.0)) {
        return Err(Error::invalid("the condition is tested for eps > 0"));
    }
    let radii: Vec<f64> = (0..steps)
        .map(|k| r_max / Float::powi(2.0, (steps - 1 - k) as i32))
        .collect();
    let sets: Vec<Vec<Vec<f64>>> = radii.iter().map(|&r| generator(r)).collect();
    let mut rows = Vec::with_capacity(eps_list.len());
    for &eps in eps_list {
        let mut partial = Vec::with_capacity(radii.len());
        for (r, set) in radii.iter().zip(&sets) {
            // sum small terms first
            let mut terms: Vec<f64> = set
                .iter()
                .map(|xi| {
                    let n = Float::sqrt(xi.iter().map(|v| v * v).sum::<f64>());
                    Float::exp(-eps * Float::powf(n, 1.0 / s))
                })
                .collect();
            terms.sort_by(f64::total_cmp);
            partial.push((*r, terms.iter().sum::<f64>()));
        }
        let last = partial[partial.len() - 1].1;
        let prev = partial[partial.len() - 2].1;
        let tail_ratio = if last > 0.0 { (last - prev).abs() / last } else { 0.0 };
        rows.push(FrequencyRow {
            eps,
            partial,
            tail_ratio,
            converged: tail_ratio <= tail_tol,
        });
    }
    Ok(FrequencyReport {
        s,
        all_converged: rows.iter().all(|r| r.converged),
        rows,
    })
}

/// `ℤ^d ∩ {|ξ| <= r}`.
pub fn lattice_points(dim: usize, r: f64) -> Vec<Vec<f64>> {
    let k = Float::floor(r) as i64;
    let mut out: Vec<Vec<f64>> = alloc::vec![Vec::new()];
    for _ in 0..dim {
        let mut next = Vec::new();
        for p in &out {
            for v in -k..=k {
                let mut q = p.clone();
                q.push(v as f64);
                if q.iter().map(|x| x * x).sum::<f64>() <= r * r {
                    next.push(q);
                }
            }
        }
        out = next;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn synthetic(eps: f64, s: f64, n: usize) -> CoeffData {
        CoeffData::from_profile(n, |k| (-eps * k.powf(1.0 / s)).exp()).unwrap()
    }

    #[test]
    fn recovers_exponential_profiles() {
        let f = gevrey_fit(&synthetic(2.0, 2.0, 50), &default_s_grid()).unwrap();
        assert!((f.s_hat - 2.0).abs() <= 0.05 && (f.eps_hat - 2.0).abs() <= 0.05, "{f:?}");
        assert_eq!(f.non_gevrey, None);
        let f = gevrey_fit(&synthetic(3.0, 1.0, 50), &default_s_grid()).unwrap();
        assert!((f.s_hat - 1.0).abs() <= 0.05 && (f.eps_hat - 3.0).abs() <= 0.05, "{f:?}");
        assert_eq!(f.non_gevrey, None);
    }

    #[test]
    fn flags_polynomial_decay() {
        let d = CoeffData::from_profile(50, |k| (1.0 + k).powi(-4)).unwrap();
        let f = gevrey_fit(&d, &default_s_grid()).unwrap();
        assert!(f.non_gevrey.is_some(), "{f:?}");
    }

    #[test]
    fn too_few_points() {
        let d = CoeffData::from_profile(7, |k| (-k).exp()).unwrap();
        assert!(matches!(gevrey_fit(&d, &default_s_grid()), Err(Error::InsufficientData(_))));
        assert!(CoeffData::new(vec![(vec![1.0], f64::NAN)]).is_err());
        assert!(CoeffData::new(vec![(vec![1.0], 1.0), (vec![1.0], 2.0)]).is_err());
    }

    #[test]
    fn membership_examples() {
        let d = synthetic(2.0, 2.0, 400);
        let r = membership_report(&d, 2.0, &[-2.5, -2.2, -1.5, -0.5, 0.0, 0.5, 1.0], 1.0).unwrap();
        for row in &r.rows {
            assert_eq!(row.converging, row.eps > -2.0, "{row:?}");
        }
        assert!(r.consistent_with_w_s0 && r.consistent_with_w_s0_minus);
        let single = CoeffData::new(vec![(vec![3.0], 0.5)]).unwrap();
        let r = membership_report(&single, 2.0, &[-5.0, 0.0, 5.0], 1.0).unwrap();
        assert!(r.rows.iter().all(|row| row.converging && row.norm.is_finite()));
        let d = synthetic(1.0, 1.0, 20);
        let l1: f64 = d.points().iter().map(|p| p.1).sum();
        let r = membership_report(&d, 1.0, &[0.0], 1.0).unwrap();
        assert!((r.rows[0].norm - l1).abs() < 1e-15);
    }

    #[test]
    fn frequency_condition_examples() {
        let target = 1.0 + 2.0 / (core::f64::consts::E - 1.0);
        let r = frequency_condition_check(&|r| lattice_points(1, r), 1.0, &[1.0], 50.0, 4, TAIL_TOL).unwrap();
        assert!(r.all_converged);
        assert!((r.rows[0].partial.last().unwrap().1 - target).abs() < 1e-9);
        let r = frequency_condition_check(&|r| lattice_points(2, r), 1.0, &[0.5, 1.0, 3.0], 80.0, 4, TAIL_TOL).unwrap();
        assert!(r.all_converged, "{r:?}");
        let bounded = |r: f64| -> Vec<Vec<f64>> {
            (1..=(10.0 * r) as usize).map(|n| vec![1.0 - 1.0 / n as f64]).collect()
        };
        let r = frequency_condition_check(&bounded, 1.0, &[1.0], 50.0, 4, TAIL_TOL).unwrap();
        assert!(!r.all_converged && r.rows[0].tail_ratio > 0.4);
    }

    #[test]
    fn predicted_eps_formula() {
        let v = predicted_eps(2.0, 1.0, 1);
        assert!((v - 2.0 / core::f64::consts::E * core::f64::consts::TAU.sqrt()).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn partial_sums_monotone(seed in any::<u64>()) {
            let mut rng = crate::sampling::SeededRng::new(seed);
            let pts: Vec<(Vec<f64>, f64)> = (1..40).map(|k| (vec![k as f64 + rng.uniform() * 0.5], rng.uniform())).collect();
            let d = CoeffData::new(pts).unwrap();
            let eps = [-1.0, -0.2, 0.0, 0.3, 2.0];
            let r = membership_report(&d, 1.5, &eps, 1.0).unwrap();
            for row in &r.rows {
                prop_assert!(row.partial.windows(2).all(|w| w[1].1 >= w[0].1));
            }
            for w in r.rows.windows(2) {
                prop_assert!(w[1].norm <= w[0].norm);
            }
        }

        #[test]
        fn fit_recovers_random_profiles(s in 1.0f64..3.5, eps in 0.5f64..3.0) {
            // ≥ 30 points over two decades
            let d = CoeffData::new((0..40).map(|i| {
                let r = 10f64.powf(2.0 * i as f64 / 39.0);
                (vec![r], (-eps * r.powf(1.0 / s)).exp())
            }).filter(|p| p.1 > 1e-300).collect()).unwrap();
            prop_assume!(d.len() >= 30);
            let f = gevrey_fit(&d, &default_s_grid()).unwrap();
            prop_assert!((f.s_hat - s).abs() <= 0.05 * s, "{:?}", f);
            prop_assert!((f.eps_hat - eps).abs() <= 0.05 * eps, "{:?}", f);
        }
    }
}
