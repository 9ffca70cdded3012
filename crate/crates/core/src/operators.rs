//! Action of symbols and amplitudes on trigonometric polynomials.
//!
//! On `f = Σ f̂_η e_η` the Kohn–Nirenberg quantization is the finite sum
//! `a(x, D)f = Σ_η f̂_η a(x, η) e_η`, so operators are applied exactly,
//! frequency by frequency. For an amplitude `Σ_μ g_μ(x, ξ) e^{2πiμ·y}`
//! the action is `Σ_η Σ_μ f̂_η g_μ(x, η + μ) e_{η+μ}`.

use alloc::sync::Arc;
use alloc::vec::Vec;

use num_complex::Complex64;
use num_traits::Float;

use crate::bohr::periodic_spectrum;
use crate::error::{Error, Result};
use crate::freq::{Basis, Frequency, MultiIndex};
use crate::scalar::{Coeff, Rational};
use crate::symexpr::SymbolExpr;
use crate::trigpoly::{NormParams, TrigPoly};

/// `Σ g_k(x) e^{2πiξ_k·x}` with coefficient functions depending on `x` only.
#[derive(Clone, Debug)]
pub struct APFunction<C: Coeff> {
    dim: usize,
    basis: Arc<Basis>,
    terms: Vec<(Frequency, SymbolExpr<C>)>,
}

impl<C: Coeff> APFunction<C> {
    pub fn new(dim: usize, basis: Arc<Basis>) -> Self {
        APFunction {
            dim,
            basis,
            terms: Vec::new(),
        }
    }

    pub fn from_trigpoly(f: &TrigPoly<C>) -> Result<Self> {
        let mut g = APFunction::new(f.dim(), f.basis().clone());
        for (xi, c) in f.terms() {
            g.push(xi.clone(), SymbolExpr::constant(f.dim(), f.basis().clone(), c.clone())?)?;
        }
        Ok(g)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn basis(&self) -> &Arc<Basis> {
        &self.basis
    }

    /// Terms sorted by frequency.
    pub fn terms(&self) -> &[(Frequency, SymbolExpr<C>)] {
        &self.terms
    }

    /// Adds `g(x) e_ξ`, merging with an existing term at `ξ`.
    pub fn push(&mut self, xi: Frequency, g: SymbolExpr<C>) -> Result<()> {
        match self.terms.binary_search_by(|(k, _)| k.cmp(&xi)) {
            Ok(i) => {
                let sum = self.terms[i].1.add(&g)?;
                if sum.is_zero() {
                    self.terms.remove(i);
                } else {
                    self.terms[i].1 = sum;
                }
            }
            Err(i) => {
                if !g.is_zero() {
                    self.terms.insert(i, (xi, g));
                }
            }
        }
        Ok(())
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        let mut out = self.clone();
        for (xi, g) in &o.terms {
            out.push(xi.clone(), g.clone())?;
        }
        Ok(out)
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        let mut out = self.clone();
        for (xi, g) in &o.terms {
            out.push(xi.clone(), g.neg())?;
        }
        Ok(out)
    }

    /// The trigonometric polynomial with the same values, when every
    /// coefficient function is one.
    pub fn collapse(&self) -> Option<TrigPoly<C>> {
        let mut acc = TrigPoly::zero(self.dim, self.basis.clone()).ok()?;
        for (xi, g) in &self.terms {
            let p = g.try_trigpoly()?;
            let e = TrigPoly::monomial(self.dim, self.basis.clone(), xi.clone(), C::one()).ok()?;
            acc = acc.add(&p.mul(&e).ok()?).ok()?;
        }
        Some(acc)
    }

    pub fn eval(&self, x: &[f64]) -> Result<Complex64> {
        let zero = alloc::vec![0.0; self.dim];
        let mut acc = Complex64::new(0.0, 0.0);
        for (xi, g) in &self.terms {
            let dot: f64 = (0..self.dim).map(|i| xi.component(i, &self.basis) * x[i]).sum();
            acc += g.eval(x, &zero)? * Complex64::from_polar(1.0, core::f64::consts::TAU * dot);
        }
        Ok(acc)
    }

    /// Bohr–Fourier coefficients: exact when collapsible, otherwise by
    /// sampling each coefficient function over its common period.
    pub fn spectrum(&self) -> Result<TrigPoly<Complex64>> {
        if let Some(p) = self.collapse() {
            return Ok(p.to_float());
        }
        if self.basis.len() != 1 || !self.basis.is_rational() {
            return Err(Error::Unsupported(
                "single rational basis element for sampled coefficient extraction".into(),
            ));
        }
        let unit = self.basis.elems()[0].exact.clone().expect("rational basis");
        let mut out: Vec<(Frequency, Complex64)> = Vec::new();
        for (xi, g) in &self.terms {
            if let Some(p) = g.try_trigpoly() {
                for (k, c) in p.terms() {
                    out.push((xi.add(k), c.to_c64()));
                }
                continue;
            }
            // common period of the coefficient function
            let mut lcm = num_bigint::BigInt::from(1);
            for k in g.x_frequencies() {
                for c in k.coords() {
                    let v = c * &unit;
                    lcm = num_integer::Integer::lcm(&lcm, v.denom());
                }
            }
            let period: u32 = u32::try_from(&lcm)
                .ok()
                .filter(|p| *p <= 64)
                .ok_or_else(|| Error::Unsupported("coefficient period of at most 64".into()))?;
            let n = match self.dim {
                1 => 64,
                2 => 24,
                _ => 12,
            } * period as usize;
            let f = g.compile();
            let zero = alloc::vec![0.0; self.dim];
            let spec = periodic_spectrum(&|x| f.eval(x, x, &zero), self.dim, f64::from(period), n)?;
            let scale = spec.iter().map(|s| s.1.norm()).fold(0.0, f64::max);
            for (k, c) in spec {
                if c.norm() <= 1e-15 * scale.max(1.0) {
                    continue;
                }
                // k / period in basis coordinates
                let shift: Vec<Rational> = k
                    .iter()
                    .map(|&kk| Rational::new(kk.into(), num_bigint::BigInt::from(period)) / &unit)
                    .collect();
                out.push((xi.add(&Frequency::from_coords(shift)), c));
            }
        }
        TrigPoly::from_terms(self.dim, self.basis.clone(), out)
    }
}

/// Validity radius and low-frequency handling for symbols with quotients.
#[derive(Clone, Debug)]
pub struct ApplyOptions<C: Coeff> {
    /// Frequencies with `⟨η⟩ < A` are refused unless a low-frequency symbol
    /// is supplied. Only used when the symbol has denominators.
    pub validity_radius: f64,
    pub low_frequency: Option<SymbolExpr<C>>,
}

impl<C: Coeff> Default for ApplyOptions<C> {
    fn default() -> Self {
        ApplyOptions {
            validity_radius: 0.0,
            low_frequency: None,
        }
    }
}

impl<C: Coeff> ApplyOptions<C> {
    pub fn with_radius(a: f64) -> Self {
        ApplyOptions {
            validity_radius: a,
            low_frequency: None,
        }
    }
}

fn has_quotient<C: Coeff>(a: &SymbolExpr<C>) -> bool {
    a.terms().iter().any(|t| !t.recips.is_empty())
}

fn symbol_for<'a, C: Coeff>(
    a: &'a SymbolExpr<C>,
    eta: &Frequency,
    opts: &'a ApplyOptions<C>,
) -> Result<&'a SymbolExpr<C>> {
    if opts.validity_radius > 0.0 && has_quotient(a) {
        let r = eta.norm(a.dim(), a.basis());
        if Float::sqrt(1.0 + r * r) < opts.validity_radius {
            return opts.low_frequency.as_ref().ok_or_else(|| Error::BelowValidityRadius {
                xi: eta.to_f64(a.dim(), a.basis()),
                radius: opts.validity_radius,
            });
        }
    }
    Ok(a)
}

fn check_dims<C: Coeff>(a: &SymbolExpr<C>, f: &TrigPoly<C>) -> Result<()> {
    if a.dim() != f.dim() {
        return Err(Error::DimensionMismatch {
            left: a.dim(),
            right: f.dim(),
        });
    }
    if **a.basis() != **f.basis() {
        return Err(Error::BasisMismatch);
    }
    Ok(())
}

/// `a(x, D)f = Σ_η f̂_η a(x, η) e_η`.
pub fn apply_symbol<C: Coeff>(
    a: &SymbolExpr<C>,
    f: &TrigPoly<C>,
    opts: &ApplyOptions<C>,
) -> Result<APFunction<C>> {
    check_dims(a, f)?;
    if a.is_amplitude() && a.depends_on_y() {
        return Err(Error::invalid("apply_symbol needs a symbol; use apply_amplitude"));
    }
    let mut out = APFunction::new(f.dim(), f.basis().clone());
    for (eta, c) in f.terms() {
        let s = symbol_for(a, eta, opts)?;
        let g = s.at_frequency(eta).map_err(|e| locate(e, eta, f))?.scale(c);
        out.push(eta.clone(), g)?;
    }
    Ok(out)
}

fn locate<C: Coeff>(e: Error, eta: &Frequency, f: &TrigPoly<C>) -> Error {
    match e {
        Error::Domain { x, .. } => Error::Domain {
            x,
            xi: eta.to_f64(f.dim(), f.basis()),
        },
        other => other,
    }
}

/// Action of an amplitude whose y-dependence is a trigonometric polynomial.
pub fn apply_amplitude<C: Coeff>(
    a: &SymbolExpr<C>,
    f: &TrigPoly<C>,
    opts: &ApplyOptions<C>,
) -> Result<APFunction<C>> {
    check_dims(a, f)?;
    let comps = a.y_components()?;
    let low = match &opts.low_frequency {
        Some(l) => Some(l.y_components()?),
        None => None,
    };
    let mut out = APFunction::new(f.dim(), f.basis().clone());
    for (eta, c) in f.terms() {
        for (k, (mu, g)) in comps.iter().enumerate() {
            let zeta = eta.add(mu);
            let mut g = g;
            if opts.validity_radius > 0.0 && has_quotient(g) {
                let r = zeta.norm(f.dim(), f.basis());
                if Float::sqrt(1.0 + r * r) < opts.validity_radius {
                    let lows = low.as_ref().ok_or_else(|| Error::BelowValidityRadius {
                        xi: zeta.to_f64(f.dim(), f.basis()),
                        radius: opts.validity_radius,
                    })?;
                    match lows.iter().find(|(m, _)| m == mu) {
                        Some((_, l)) => g = l,
                        None => continue,
                    }
                }
            }
            let _ = k;
            let v = g.at_frequency(&zeta).map_err(|e| locate(e, &zeta, f))?.scale(c);
            out.push(zeta, v)?;
        }
    }
    Ok(out)
}

/// `a(x, D)(b(x, D)f)` through the collapsed intermediate polynomial.
pub fn compose_direct<C: Coeff>(
    a: &SymbolExpr<C>,
    b: &SymbolExpr<C>,
    f: &TrigPoly<C>,
) -> Result<APFunction<C>> {
    let g = apply_symbol(b, f, &ApplyOptions::default())?
        .collapse()
        .ok_or_else(|| {
            Error::Unsupported(
                "collapsible intermediate b(x,D)f; compare sampled values instead".into(),
            )
        })?;
    apply_symbol(a, &g, &ApplyOptions::default())
}

/// Applies a symbol polynomial in ξ to `Σ g_k(x) e_{ξ_k}` through the finite
/// Leibniz expansion
/// `p(x, D)(g e_η) = e_η Σ_β (β!)^{-1} (2πi)^{-|β|} ∂_ξ^β p(x, η) ∂_x^β g`.
pub fn apply_poly_to_ap<C: Coeff>(p: &SymbolExpr<C>, u: &APFunction<C>) -> Result<APFunction<C>> {
    let deg = p
        .xi_degree()
        .ok_or_else(|| Error::Unsupported("symbol polynomial in ξ".into()))?;
    if p.is_amplitude() && p.depends_on_y() {
        return Err(Error::invalid("expected a symbol, got an amplitude"));
    }
    let dim = u.dim;
    let mut out = APFunction::new(dim, u.basis.clone());
    let betas = MultiIndex::up_to(dim, deg);
    let derivs: Vec<(MultiIndex, SymbolExpr<C>, C)> = betas
        .into_iter()
        .filter_map(|beta| {
            let d = p.dxi(&beta).ok()?;
            if d.is_zero() {
                return None;
            }
            let k = C::two_pi_i().powi(-i64::from(beta.order()))?;
            let c = C::from_rational(&beta.rational_factorial().recip()).times(&k);
            Some((beta, d, c))
        })
        .collect();
    for (eta, g) in &u.terms {
        let mut acc = SymbolExpr::zero(dim, u.basis.clone())?;
        for (beta, d, c) in &derivs {
            let dg = g.dx(beta)?;
            if dg.is_zero() {
                continue;
            }
            let frozen = d.at_frequency(eta)?;
            acc = acc.add(&frozen.mul(&dg)?.scale(c))?;
        }
        out.push(eta.clone(), acc)?;
    }
    Ok(out)
}

/// Norms of `g - f` for each requested weight.
#[derive(Clone, Debug, PartialEq)]
pub struct ResidualReport {
    pub norms: Vec<f64>,
    /// True when `g` collapsed to a trigonometric polynomial and the
    /// difference was formed exactly.
    pub exact: bool,
    /// True when the exact difference is identically zero.
    pub exact_zero: bool,
    pub residual: TrigPoly<Complex64>,
}

pub fn residual_norms<C: Coeff>(
    g: &APFunction<C>,
    f: &TrigPoly<C>,
    norms: &[NormParams],
) -> Result<ResidualReport> {
    let (residual, exact, exact_zero) = match g.collapse() {
        Some(p) => {
            let d = p.sub(f)?;
            (d.to_float(), true, d.is_zero())
        }
        None => (g.spectrum()?.sub(&f.to_float())?, false, false),
    };
    let values = norms
        .iter()
        .map(|n| residual.norm(n))
        .collect::<Result<Vec<_>>>()?;
    Ok(ResidualReport {
        norms: values,
        exact,
        exact_zero,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::SeededRng;
    use crate::scalar::Exact;

    type SE = SymbolExpr<Exact>;
    type TE = TrigPoly<Exact>;

    fn q(n: i64) -> Exact {
        Exact::from_i64(n)
    }

    fn xi() -> SE {
        SE::std_mono(&[1], Exact::one())
    }

    fn e(k: i64) -> SE {
        SE::std_trig(1, &[(&[k], Exact::one())])
    }

    fn opts() -> ApplyOptions<Exact> {
        ApplyOptions::default()
    }

    #[test]
    fn multipliers_and_modulation() {
        let f = TE::exp_int(&[7]);
        let g = apply_symbol(&xi(), &f, &opts()).unwrap().collapse().unwrap();
        assert_eq!(g, f.scale(&q(7)));
        let g = apply_symbol(&e(1), &f, &opts()).unwrap().collapse().unwrap();
        assert_eq!(g, TE::exp_int(&[8]));
        let f = TE::from_int_terms(1, &[(&[1], q(1)), (&[3], q(2))]);
        let xi2 = SE::std_mono(&[2], Exact::one());
        let g = apply_symbol(&xi2, &f, &opts()).unwrap().collapse().unwrap();
        assert_eq!(g, TE::from_int_terms(1, &[(&[1], q(1)), (&[3], q(18))]));
    }

    #[test]
    fn amplitude_examples() {
        let eta = 4;
        let f = TE::exp_int(&[eta]);
        let a = SE::from_y_trigpoly(TE::exp_int(&[1])).unwrap().mul(&xi()).unwrap();
        let g = apply_amplitude(&a, &f, &opts()).unwrap().collapse().unwrap();
        assert_eq!(g, TE::exp_int(&[eta + 1]).scale(&q(eta + 1)));
        let adj = e(1).adjoint_amplitude().unwrap();
        let g = apply_amplitude(&adj, &f, &opts()).unwrap().collapse().unwrap();
        assert_eq!(g, TE::exp_int(&[eta - 1]));
        let plain = xi().mul(&e(2)).unwrap();
        let a = apply_amplitude(&plain.clone().into_amplitude(), &f, &opts()).unwrap();
        let b = apply_symbol(&plain, &f, &opts()).unwrap();
        assert_eq!(a.collapse(), b.collapse());
    }

    #[test]
    fn closed_form_matches_direct_quadrature() {
        // periodic instance: Σ_ξ e^{2πixξ} ∫_0^1 e^{-2πiyξ} a(x,y,ξ) f(y) dy
        let tp = |t: &[(&[i64], i64)]| TE::from_int_terms(1, &t.iter().map(|(k, c)| (*k, q(*c))).collect::<Vec<_>>());
        let a = SE::from_y_trigpoly(tp(&[(&[1], 1), (&[-2], 3)]))
            .unwrap()
            .mul(&xi())
            .unwrap()
            .add(&SE::from_y_trigpoly(tp(&[(&[-1], 1)])).unwrap().mul(&e(1)).unwrap().mul(&SE::std_mono(&[2], Exact::one())).unwrap())
            .unwrap();
        let f = tp(&[(&[2], 1), (&[-1], 3)]);
        let g = apply_amplitude(&a, &f, &opts()).unwrap();
        let af = a.to_float();
        let ff = f.to_float();
        let n = 32;
        for &x in &[0.1, 0.37, 0.8] {
            let mut direct = Complex64::new(0.0, 0.0);
            for k in -12i64..=12 {
                let kf = k as f64;
                let mut inner = Complex64::new(0.0, 0.0);
                for j in 0..n {
                    let y = j as f64 / n as f64;
                    let ph = Complex64::from_polar(1.0, -core::f64::consts::TAU * y * kf);
                    inner += ph * af.eval_amp(&[x], &[y], &[kf]).unwrap() * ff.eval(&[y]);
                }
                direct += inner / n as f64 * Complex64::from_polar(1.0, core::f64::consts::TAU * x * kf);
            }
            assert!((direct - g.eval(&[x]).unwrap()).norm() < 1e-9);
        }
    }

    #[test]
    fn compose_direct_examples() {
        let eta = 5;
        let f = TE::exp_int(&[eta]);
        let g = compose_direct(&xi(), &e(1), &f).unwrap().collapse().unwrap();
        assert_eq!(g, TE::exp_int(&[eta + 1]).scale(&q(eta + 1)));
        let one = SE::one(1, SE::std_basis()).unwrap();
        assert_eq!(compose_direct(&one, &one, &f).unwrap().collapse().unwrap(), f);
        let g = compose_direct(&xi(), &xi(), &TE::exp_int(&[2])).unwrap().collapse().unwrap();
        assert_eq!(g, TE::exp_int(&[2]).scale(&q(4)));
    }

    #[test]
    fn validity_radius_refusal_and_low_symbol() {
        let a = SE::one(1, SE::std_basis()).unwrap().div(&SE::std_bracket(1, crate::symexpr::ratio(2, 1)).add(&e(1)).unwrap()).unwrap();
        let f = TE::from_int_terms(1, &[(&[0], q(1)), (&[9], q(1))]);
        let o = ApplyOptions::with_radius(3.0);
        match apply_symbol(&a, &f, &o) {
            Err(Error::BelowValidityRadius { xi, radius }) => {
                assert_eq!(xi, alloc::vec![0.0]);
                assert_eq!(radius, 3.0);
            }
            other => panic!("{other:?}"),
        }
        let o = ApplyOptions {
            validity_radius: 3.0,
            low_frequency: Some(SE::one(1, SE::std_basis()).unwrap()),
        };
        let g = apply_symbol(&a, &f, &o).unwrap();
        assert_eq!(g.terms().len(), 2);
    }

    #[test]
    fn residual_examples() {
        let f = TE::from_int_terms(1, &[(&[1], q(2)), (&[4], q(-1))]);
        let g = APFunction::from_trigpoly(&f).unwrap();
        let norms = [NormParams::sobolev(2.0, 2.0), NormParams::gevrey(1.0, 2.0, 0.5)];
        let r = residual_norms(&g, &f, &norms).unwrap();
        assert!(r.exact_zero && r.norms.iter().all(|v| *v == 0.0));
        let delta = Exact::from_rational(&crate::symexpr::ratio(1, 8));
        let g2 = APFunction::from_trigpoly(&f.add(&TE::exp_int(&[9]).scale(&delta)).unwrap()).unwrap();
        let r = residual_norms(&g2, &f, &norms).unwrap();
        assert!((r.norms[1] - 0.125 * (-0.5 * 3.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn sampled_spectrum_of_quotient() {
        // g(x) = 1 / (3 + e_1 + e_{-1}) has a rapidly decaying spectrum
        let den = SE::std_trig(1, &[(&[0], q(3)), (&[1], q(1)), (&[-1], q(1))]);
        let g = SE::one(1, SE::std_basis()).unwrap().div(&den).unwrap();
        let mut u = APFunction::new(1, SE::std_basis());
        u.push(Frequency::from_ints(&[5]), g.clone()).unwrap();
        let spec = u.spectrum().unwrap();
        // mean of g is 1/sqrt(5)
        let c0 = spec.bohr_coeff(&Frequency::from_ints(&[5]));
        assert!((c0.re - 1.0 / 5f64.sqrt()).abs() < 1e-12);
        for x in [0.0, 0.3, 0.71] {
            assert!((spec.eval(&[x]) - u.eval(&[x]).unwrap()).norm() < 1e-12);
        }
    }

    #[test]
    fn leibniz_application_matches_polynomial_case() {
        let p = xi().mul(&xi()).unwrap().add(&e(1).mul(&xi()).unwrap()).unwrap();
        let f = TE::from_int_terms(1, &[(&[2], q(1)), (&[-3], q(2))]);
        let u = APFunction::from_trigpoly(&f).unwrap();
        let a = apply_poly_to_ap(&p, &u).unwrap().collapse().unwrap();
        let b = apply_symbol(&p, &f, &opts()).unwrap().collapse().unwrap();
        assert_eq!(a, b);
        // non-constant coefficient functions
        let mut v = APFunction::new(1, SE::std_basis());
        v.push(Frequency::from_ints(&[3]), e(2).scale(&q(5))).unwrap();
        let a = apply_poly_to_ap(&p, &v).unwrap().collapse().unwrap();
        let b = apply_symbol(&p, &TE::exp_int(&[5]).scale(&q(5)), &opts()).unwrap().collapse().unwrap();
        assert_eq!(a, b);
    }

    fn random_tp(rng: &mut SeededRng, dim: usize, n: usize) -> TE {
        TE::from_terms(
            dim,
            SE::std_basis(),
            (0..n).map(|_| {
                let k: Vec<i64> = (0..dim).map(|_| rng.int_in(-3, 3)).collect();
                (Frequency::from_ints(&k), Exact::from_gaussian(&crate::symexpr::ratio(rng.int_in(-5, 5), 1), &crate::symexpr::ratio(rng.int_in(-5, 5), 2)))
            }),
        )
        .unwrap()
    }

    fn random_diff_symbol(rng: &mut SeededRng, dim: usize) -> SE {
        let mut a = SE::zero(dim, SE::std_basis()).unwrap();
        for alpha in MultiIndex::up_to(dim, 2) {
            let c = SE::from_trigpoly(random_tp(rng, dim, 2));
            a = a.add(&c.mul(&SE::xi_mono(dim, SE::std_basis(), alpha, Exact::one()).unwrap()).unwrap()).unwrap();
        }
        a
    }

    #[test]
    fn linearity_multiplier_and_adjoint() {
        let mut rng = SeededRng::new(42);
        for dim in 1..=2 {
            for _ in 0..5 {
                let a = random_diff_symbol(&mut rng, dim);
                let f = random_tp(&mut rng, dim, 4);
                let g = random_tp(&mut rng, dim, 4);
                let af = apply_symbol(&a, &f, &opts()).unwrap().collapse().unwrap();
                let ag = apply_symbol(&a, &g, &opts()).unwrap().collapse().unwrap();
                let afg = apply_symbol(&a, &f.add(&g).unwrap(), &opts()).unwrap().collapse().unwrap();
                assert_eq!(afg, af.add(&ag).unwrap());
                // formal adjoint through the amplitude conj(a(y, x, ξ))
                let adj = a.adjoint_amplitude().unwrap();
                let a_star_g = apply_amplitude(&adj, &g, &opts()).unwrap().collapse().unwrap();
                assert_eq!(af.besicovitch_inner(&g).unwrap(), f.besicovitch_inner(&a_star_g).unwrap());
            }
            // x-independent symbols act as multipliers
            let m = SE::xi_mono(dim, SE::std_basis(), MultiIndex::unit(dim, 0), q(3)).unwrap();
            let f = random_tp(&mut rng, dim, 5);
            let g = apply_symbol(&m, &f, &opts()).unwrap().collapse().unwrap();
            for (eta, c) in f.terms() {
                let val = m.at_frequency(eta).unwrap().try_trigpoly().unwrap().mean_value();
                assert_eq!(g.bohr_coeff(eta), c.times(&val));
            }
        }
    }
}
