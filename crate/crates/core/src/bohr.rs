//! Numerical mean values and Bohr–Fourier coefficients of functions given
//! only by evaluation.
//!
//! The mean `lim T^{-d} ∫_{[0,T]^d} f` is approximated on a tensor trapezoid
//! grid for each `T` of a schedule. By default the samples are weighted with
//! a Fejér (triangular) window, which turns the `O(1/T)` oscillatory error of
//! the plain box average into `O(1/T²)`. The error indicator is the spread of
//! the last three estimates; it is a heuristic, not a bound.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use num_traits::Float;

use crate::error::{Error, Result};

/// Largest dimension accepted for black-box quadrature.
pub const MAX_QUAD_DIM: usize = 3;

/// Combination of the per-`T` estimates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Extrapolation {
    /// Use the estimate at the largest `T`.
    None,
    /// Average the estimates at the two largest `T`.
    AverageLastTwo,
}

/// Weight applied to the samples of each cube.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Window {
    /// Plain average over `[0, T]^d`.
    Box,
    /// Triangular weight `Π (1 - |2x_i/T - 1|)`, normalized.
    Fejer,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MeanSchedule {
    pub t_values: Vec<f64>,
    /// Quadrature nodes per unit length along each axis.
    pub points_per_axis: usize,
    pub extrapolation: Extrapolation,
    pub window: Window,
}

impl Default for MeanSchedule {
    fn default() -> Self {
        MeanSchedule {
            t_values: vec![25.0, 50.0, 100.0],
            points_per_axis: 16,
            extrapolation: Extrapolation::None,
            window: Window::Fejer,
        }
    }
}

impl MeanSchedule {
    pub fn new(t_values: Vec<f64>, points_per_axis: usize) -> Result<Self> {
        let s = MeanSchedule {
            t_values,
            points_per_axis,
            ..MeanSchedule::default()
        };
        s.validate()?;
        Ok(s)
    }

    pub fn with_window(mut self, window: Window) -> Self {
        self.window = window;
        self
    }

    pub fn with_extrapolation(mut self, e: Extrapolation) -> Self {
        self.extrapolation = e;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.t_values.is_empty() {
            return Err(Error::invalid("empty T schedule"));
        }
        if self.t_values.iter().any(|t| !(*t > 0.0) || !t.is_finite()) {
            return Err(Error::invalid("T values must be positive and finite"));
        }
        if self.t_values.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid("T values must be strictly increasing"));
        }
        if self.points_per_axis < 16 {
            return Err(Error::invalid("points_per_axis must be at least 16"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MeanEstimate {
    pub estimate: Complex64,
    /// Spread of the last three per-`T` estimates.
    pub error_indicator: f64,
    pub per_t: Vec<(f64, Complex64)>,
}

/// Largest pairwise distance among the last three values.
fn spread(vals: &[Complex64]) -> f64 {
    let tail = &vals[vals.len().saturating_sub(3)..];
    let mut s = 0.0f64;
    for (i, a) in tail.iter().enumerate() {
        for b in &tail[i + 1..] {
            s = s.max((a - b).norm());
        }
    }
    s
}

/// One-dimensional weights on the nodes `0, h, …, T`.
fn axis_weights(t: f64, n: usize, window: Window) -> Vec<f64> {
    let h = t / n as f64;
    (0..=n)
        .map(|k| {
            let trap = if k == 0 || k == n { 0.5 } else { 1.0 };
            let w = match window {
                Window::Box => 1.0 / t,
                Window::Fejer => {
                    let u = k as f64 / n as f64;
                    2.0 / t * (1.0 - (2.0 * u - 1.0).abs())
                }
            };
            trap * h * w
        })
        .collect()
}

fn cube_mean(
    f: &dyn Fn(&[f64]) -> Complex64,
    dim: usize,
    t: f64,
    per_unit: usize,
    window: Window,
) -> Result<Complex64> {
    let n = Float::ceil(t * per_unit as f64) as usize;
    let n = n.max(1);
    let h = t / n as f64;
    let w = axis_weights(t, n, window);
    let mut idx = vec![0usize; dim];
    let mut x = vec![0.0; dim];
    let mut acc = Complex64::new(0.0, 0.0);
    loop {
        let mut weight = 1.0;
        for i in 0..dim {
            x[i] = idx[i] as f64 * h;
            weight *= w[idx[i]];
        }
        if weight != 0.0 {
            let v = f(&x);
            if !v.is_finite() {
                return Err(Error::NonFinite { point: x.clone() });
            }
            acc += v * weight;
        }
        let mut i = 0;
        loop {
            if i == dim {
                return Ok(acc);
            }
            idx[i] += 1;
            if idx[i] <= n {
                break;
            }
            idx[i] = 0;
            i += 1;
        }
    }
}

/// Mean value of a black-box function on `ℝ^d`, `d <= 3`.
pub fn numerical_mean(
    f: &dyn Fn(&[f64]) -> Complex64,
    dim: usize,
    schedule: &MeanSchedule,
) -> Result<MeanEstimate> {
    schedule.validate()?;
    if dim == 0 || dim > MAX_QUAD_DIM {
        return Err(Error::invalid(alloc::format!(
            "quadrature dimension must be between 1 and {MAX_QUAD_DIM}"
        )));
    }
    let mut per_t = Vec::with_capacity(schedule.t_values.len());
    for &t in &schedule.t_values {
        per_t.push((t, cube_mean(f, dim, t, schedule.points_per_axis, schedule.window)?));
    }
    let vals: Vec<Complex64> = per_t.iter().map(|p| p.1).collect();
    let last = vals[vals.len() - 1];
    let estimate = match schedule.extrapolation {
        Extrapolation::AverageLastTwo if vals.len() >= 2 => 0.5 * (last + vals[vals.len() - 2]),
        _ => last,
    };
    Ok(MeanEstimate {
        estimate,
        error_indicator: spread(&vals),
        per_t,
    })
}

/// `𝓜_x(f(x) e^{-2πiξ·x})`.
pub fn numerical_bohr_coeff(
    f: &dyn Fn(&[f64]) -> Complex64,
    xi: &[f64],
    schedule: &MeanSchedule,
) -> Result<MeanEstimate> {
    let g = |x: &[f64]| {
        let dot: f64 = xi.iter().zip(x).map(|(a, b)| a * b).sum();
        f(x) * Complex64::from_polar(1.0, -core::f64::consts::TAU * dot)
    };
    numerical_mean(&g, xi.len(), schedule)
}

/// Mean of pre-sampled data `(x, value)` on a grid over a cube `[0, T]^d`.
///
/// The estimate is the sample average over the full cube; the indicator is
/// the spread of the averages over the sub-cubes of side `T/4`, `T/2`, `T`.
pub fn mean_from_samples(rows: &[(Vec<f64>, Complex64)]) -> Result<MeanEstimate> {
    if rows.is_empty() {
        return Err(Error::InsufficientData("no samples".into()));
    }
    for (x, v) in rows {
        if !v.is_finite() || x.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite { point: x.clone() });
        }
    }
    let t = rows
        .iter()
        .flat_map(|(x, _)| x.iter().copied())
        .fold(0.0f64, f64::max);
    let mut per_t = Vec::new();
    for frac in [0.25, 0.5, 1.0] {
        let side = t * frac;
        let sel: Vec<Complex64> = rows
            .iter()
            .filter(|(x, _)| x.iter().all(|c| *c <= side * (1.0 + 1e-12)))
            .map(|r| r.1)
            .collect();
        if !sel.is_empty() {
            let n = sel.len() as f64;
            per_t.push((side, sel.iter().sum::<Complex64>() / n));
        }
    }
    let vals: Vec<Complex64> = per_t.iter().map(|p| p.1).collect();
    Ok(MeanEstimate {
        estimate: *vals.last().expect("full cube is nonempty"),
        error_indicator: spread(&vals),
        per_t,
    })
}

/// Fourier coefficients of a function periodic with the given period along
/// every axis, from `n` samples per axis. Returns `(k, c_k)` for the
/// frequencies `k / period`, `-n/2 <= k_i < n/2`.
pub fn periodic_spectrum(
    f: &dyn Fn(&[f64]) -> Result<Complex64>,
    dim: usize,
    period: f64,
    n: usize,
) -> Result<Vec<(Vec<i64>, Complex64)>> {
    if dim == 0 || dim > MAX_QUAD_DIM || n == 0 {
        return Err(Error::invalid("bad periodic sampling request"));
    }
    let total = n.pow(dim as u32);
    let mut samples = Vec::with_capacity(total);
    for flat in 0..total {
        let mut rem = flat;
        let x: Vec<f64> = (0..dim)
            .map(|_| {
                let k = rem % n;
                rem /= n;
                period * k as f64 / n as f64
            })
            .collect();
        let v = f(&x)?;
        if !v.is_finite() {
            return Err(Error::NonFinite { point: x });
        }
        samples.push(v);
    }
    // separable DFT, one axis at a time
    let half = (n / 2) as i64;
    let twiddle: Vec<Complex64> = (0..n)
        .map(|j| Complex64::from_polar(1.0, -core::f64::consts::TAU * j as f64 / n as f64))
        .collect();
    let mut data = samples;
    let mut stride = 1;
    for _ in 0..dim {
        let mut out = vec![Complex64::new(0.0, 0.0); total];
        for base in 0..total {
            if (base / stride) % n != 0 {
                continue;
            }
            for kk in 0..n {
                let k = kk as i64 - half;
                let mut acc = Complex64::new(0.0, 0.0);
                for j in 0..n {
                    let e = (k * j as i64).rem_euclid(n as i64) as usize;
                    acc += data[base + j * stride] * twiddle[e];
                }
                out[base + kk * stride] = acc / n as f64;
            }
        }
        data = out;
        stride *= n;
    }
    Ok((0..total)
        .map(|flat| {
            let mut rem = flat;
            let k: Vec<i64> = (0..dim)
                .map(|_| {
                    let v = (rem % n) as i64 - half;
                    rem /= n;
                    v
                })
                .collect();
            (k, data[flat])
        })
        .collect())
}
