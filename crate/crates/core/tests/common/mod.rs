#![allow(dead_code)]

use apcalc_core::sampling::SeededRng;
use apcalc_core::symexpr::ratio;
use apcalc_core::{Coeff, Exact, Frequency, MultiIndex, SymbolExpr, TrigPoly};

pub type SE = SymbolExpr<Exact>;
pub type TE = TrigPoly<Exact>;

/// Up to `n` integer frequencies in `[-3, 3]^d`, Gaussian rational coefficients.
pub fn random_tp(rng: &mut SeededRng, dim: usize, n: usize) -> TE {
    TE::from_terms(
        dim,
        SE::std_basis(),
        (0..n).map(|_| {
            let k: Vec<i64> = (0..dim).map(|_| rng.int_in(-3, 3)).collect();
            let c = Exact::from_gaussian(&ratio(rng.int_in(-4, 4), rng.int_in(1, 3)), &ratio(rng.int_in(-4, 4), 1));
            (Frequency::from_ints(&k), c)
        }),
    )
    .unwrap()
}

/// `Σ_{|α| <= deg} c_α(x) ξ^α` with random trigonometric coefficients.
pub fn random_diff_symbol(rng: &mut SeededRng, dim: usize, deg: u32, freqs: usize) -> SE {
    let mut a = SE::zero(dim, SE::std_basis()).unwrap();
    for alpha in MultiIndex::up_to(dim, deg) {
        if rng.int_in(0, 3) == 0 {
            continue;
        }
        let c = SE::from_trigpoly(random_tp(rng, dim, freqs));
        let m = SE::xi_mono(dim, SE::std_basis(), alpha, Exact::one()).unwrap();
        a = a.add(&c.mul(&m).unwrap()).unwrap();
    }
    a
}

/// `Σ_{|α| <= deg} c_α(x) d_α(y) ξ^α`.
pub fn random_amplitude(rng: &mut SeededRng, dim: usize, deg: u32) -> SE {
    let mut a = SE::zero(dim, SE::std_basis()).unwrap();
    for alpha in MultiIndex::up_to(dim, deg) {
        let c = SE::from_trigpoly(random_tp(rng, dim, 2));
        let d = SE::from_y_trigpoly(random_tp(rng, dim, 2)).unwrap();
        let m = SE::xi_mono(dim, SE::std_basis(), alpha, Exact::one()).unwrap();
        a = a.add(&c.mul(&d).unwrap().mul(&m).unwrap()).unwrap();
    }
    a
}
