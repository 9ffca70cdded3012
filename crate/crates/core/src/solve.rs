//! Approximate solution of `p(x, D)u = f` through the parametrix.

use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::calculus::{parametrix, Parametrix};
use crate::error::{Error, Result};
use crate::hypoell::{aphs_check, AphsReport, HypoellParams};
use crate::operators::{apply_poly_to_ap, apply_symbol, residual_norms, APFunction, ApplyOptions, ResidualReport};
use crate::regularity::{default_s_grid, gevrey_fit, CoeffData, GevreyFit};
use crate::scalar::Coeff;
use crate::symexpr::{SymbolExpr, SymbolSampler};
use crate::trigpoly::{NormParams, TrigPoly};

#[derive(Clone, Debug)]
pub struct SolveOptions {
    pub order: usize,
    pub hp: HypoellParams,
    /// Derivative order of the hypoellipticity check.
    pub check_order: u32,
    /// `t` values of the `W²_t` residual norms.
    pub sobolev_t: Vec<f64>,
    /// `ε` values of the `W¹_{s,ε}` residual norms, `s` taken from `hp`.
    pub gevrey_eps: Vec<f64>,
}

impl SolveOptions {
    pub fn new(order: usize, hp: HypoellParams) -> Self {
        SolveOptions {
            order,
            hp,
            check_order: 2,
            sobolev_t: alloc::vec![0.0, 1.0, 2.0],
            gevrey_eps: alloc::vec![0.1, 0.5, 1.0],
        }
    }

    pub fn norms(&self) -> Vec<NormParams> {
        let mut out: Vec<NormParams> = self.sobolev_t.iter().map(|&t| NormParams::sobolev(2.0, t)).collect();
        out.extend(self.gevrey_eps.iter().map(|&e| NormParams::gevrey(1.0, self.hp.s, e)));
        out
    }
}

#[derive(Clone, Debug)]
pub struct Solution<C: Coeff> {
    pub check: AphsReport,
    pub parametrix: Parametrix<C>,
    /// `u_N = b_{(N)}(x, D) f`.
    pub u: APFunction<C>,
    /// Coefficients of `u_N`, exact when it collapses.
    pub u_spectrum: TrigPoly<Complex64>,
    /// `p(x, D)u_N - f` in the norms of [`SolveOptions::norms`].
    pub residual: ResidualReport,
    pub fit: core::result::Result<GevreyFit, String>,
}

#[derive(Clone, Debug)]
pub enum SolveOutcome<C: Coeff> {
    Solved(Box<Solution<C>>),
    /// `p` failed the hypoellipticity check.
    Refused(AphsReport),
}

/// Checks `p`, builds the order-`N` parametrix `b`, sets `u_N = b(x, D)f` and
/// measures `p(x, D)u_N - f`. `p` must be polynomial in `ξ`.
pub fn solve<C: Coeff>(
    p: &SymbolExpr<C>,
    f: &TrigPoly<C>,
    opts: &SolveOptions,
    sampler: &SymbolSampler,
) -> Result<SolveOutcome<C>> {
    if p.xi_degree().is_none() {
        return Err(Error::Unsupported("solve needs a symbol polynomial in ξ".into()));
    }
    let check = aphs_check(p, &opts.hp, opts.check_order, sampler)?;
    if !check.pass {
        return Ok(SolveOutcome::Refused(check));
    }
    let b = parametrix(p, &opts.hp, opts.order)?;
    let u = apply_symbol(&b.sum()?, f, &ApplyOptions::with_radius(opts.hp.a))?;
    let pu = apply_poly_to_ap(p, &u)?;
    let residual = residual_norms(&pu, f, &opts.norms())?;
    let u_spectrum = match u.collapse() {
        Some(t) => t.to_float(),
        None => u.spectrum()?,
    };
    let fit = CoeffData::from_trigpoly(&u_spectrum)
        .and_then(|d| gevrey_fit(&d, &default_s_grid()))
        .map_err(|e| alloc::format!("{e}"));
    Ok(SolveOutcome::Solved(Box::new(Solution {
        check,
        parametrix: b,
        u,
        u_spectrum,
        residual,
        fit,
    })))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{Exact, Rational};
    use crate::symexpr::{ratio, two_pi_bracket_sq};

    type SE = SymbolExpr<Exact>;

    fn sampler(dim: usize) -> SymbolSampler {
        SymbolSampler::standard(dim, 7)
    }

    #[test]
    fn constant_coefficients_invert_exactly() {
        let a = two_pi_bracket_sq::<Exact>(1, SE::std_basis()).unwrap();
        let f = TrigPoly::from_int_terms(1, &[(&[3], Exact::one()), (&[-7], Exact::from_i64(2)), (&[0], Exact::from_i64(5))]);
        let out = solve(&a, &f, &SolveOptions::new(0, HypoellParams::new(2.0, 2.0, 1.0)), &sampler(1)).unwrap();
        let SolveOutcome::Solved(sol) = out else { panic!("refused") };
        assert!(sol.residual.exact && sol.residual.exact_zero);
        assert!(sol.residual.norms.iter().all(|v| *v == 0.0));
        assert!(sol.fit.is_err());
    }

    #[test]
    fn residual_drops_with_order() {
        let a = two_pi_bracket_sq::<Exact>(1, SE::std_basis())
            .unwrap()
            .add(&SE::std_trig(1, &[(&[1], Exact::from_rational(&ratio(1, 2)))]))
            .unwrap();
        let f = TrigPoly::from_int_terms(1, &[(&[5], Exact::one())]);
        let norm = |n: usize| -> f64 {
            let out = solve(&a, &f, &SolveOptions::new(n, HypoellParams::new(2.0, 2.0, 1.0)), &sampler(1)).unwrap();
            let SolveOutcome::Solved(sol) = out else { panic!("refused") };
            sol.residual.norms[0]
        };
        let (r1, r3) = (norm(1), norm(3));
        assert!(r1 >= 4.0 * r3, "{r1} vs {r3}");
    }

    #[test]
    fn refuses_non_hypoelliptic() {
        let a = SE::std_mono(&[1, 0], Exact::one());
        let f = TrigPoly::from_int_terms(2, &[(&[1, 1], Exact::one())]);
        let out = solve(&a, &f, &SolveOptions::new(0, HypoellParams::new(1.0, 1.0, 1.0)), &sampler(2)).unwrap();
        assert!(matches!(out, SolveOutcome::Refused(r) if !r.pass));
        let q = SE::std_bracket(1, Rational::from_integer((-1).into()));
        assert!(solve(&q, &TrigPoly::from_int_terms(1, &[(&[1], Exact::one())]), &SolveOptions::new(0, HypoellParams::new(-1.0, -1.0, 1.0)), &sampler(1)).is_err());
    }
}
