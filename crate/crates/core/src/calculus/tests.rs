use super::*;
use crate::freq::Frequency;
use crate::operators::{apply_amplitude, apply_symbol, compose_direct, ApplyOptions};
use crate::sampling::{log_space, SeededRng};
use crate::scalar::Exact;
use crate::symexpr::{ratio, two_pi_bracket_sq};
use crate::trigpoly::TrigPoly;
use proptest::prelude::*;

type SE = SymbolExpr<Exact>;
type SF = SymbolExpr<Complex64>;
type TE = TrigPoly<Exact>;

fn xi() -> SE {
    SE::std_mono(&[1], Exact::one())
}

fn e(k: i64) -> SE {
    SE::std_trig(1, &[(&[k], Exact::one())])
}

#[test]
fn product_examples() {
    let c = symbol_product(&[xi()], &[e(1)], 3).unwrap();
    assert_eq!(c[0], xi().mul(&e(1)).unwrap());
    assert_eq!(c[1], e(1));
    assert!(c[2].is_zero() && c[3].is_zero());
    let a = SE::std_mono(&[2], Exact::from_i64(3));
    let b = SE::std_bracket(1, ratio(-1, 1));
    let c = symbol_product(&[a.clone()], &[b.clone()], 2).unwrap();
    assert_eq!(c[0], a.mul(&b).unwrap());
    assert!(c[1].is_zero() && c[2].is_zero());
    let c = symbol_product(&[xi()], &[xi()], 2).unwrap();
    assert_eq!(c[0], SE::std_mono(&[2], Exact::one()));
    assert!(c[1].is_zero() && c[2].is_zero());
}

#[test]
fn amplitude_reduction_examples() {
    let b = xi().mul(&e(2)).unwrap();
    assert_eq!(amplitude_reduce(&b, 0).unwrap(), b);
    assert!(amplitude_reduce(&b, 1).unwrap().is_zero());
    let a = SE::from_y_trigpoly(TE::exp_int(&[1])).unwrap().mul(&xi()).unwrap();
    assert_eq!(amplitude_reduce(&a, 0).unwrap(), e(1).mul(&xi()).unwrap());
    assert_eq!(amplitude_reduce(&a, 1).unwrap(), e(1));
    assert!(amplitude_reduce(&a, 2).unwrap().is_zero());
    let adj = e(1).adjoint_amplitude().unwrap();
    assert_eq!(amplitude_reduce(&adj, 0).unwrap(), e(-1));
    // a_0 + a_1 acting through the symbol equals the amplitude action
    let f = TE::from_int_terms(1, &[(&[4], Exact::one()), (&[-2], Exact::from_i64(3))]);
    let s = amplitude_reduce(&a, 0).unwrap().add(&amplitude_reduce(&a, 1).unwrap()).unwrap();
    let o = ApplyOptions::default();
    assert_eq!(
        apply_symbol(&s, &f, &o).unwrap().collapse(),
        apply_amplitude(&a, &f, &o).unwrap().collapse()
    );
}

#[test]
fn transpose_examples() {
    let b = SE::std_mono(&[3], Exact::one()).add(&SE::std_mono(&[2], Exact::one())).unwrap();
    assert_eq!(transpose_expansion(&b, 0).unwrap(), b.reflect_xi().unwrap());
    assert!(transpose_expansion(&b, 1).unwrap().is_zero());
    assert_eq!(transpose_expansion(&e(1), 0).unwrap(), e(1));
    assert!(transpose_expansion(&e(1), 1).unwrap().is_zero());
    let b = e(1).mul(&xi()).unwrap();
    assert_eq!(transpose_expansion(&b, 1).unwrap(), e(1).neg());
}

#[test]
fn transpose_is_the_bilinear_transpose() {
    // M(b(x,D)f · g) = M(f · ᵗb(x,D)g) for differential symbols
    let mut rng = SeededRng::new(8);
    for _ in 0..10 {
        let b = random_diff_symbol(&mut rng, 2, 2);
        let t = transpose_sum(&b, 2).unwrap();
        let f = random_tp(&mut rng, 2, 4);
        let g = random_tp(&mut rng, 2, 4);
        let o = ApplyOptions::default();
        let bf = apply_symbol(&b, &f, &o).unwrap().collapse().unwrap();
        let tg = apply_symbol(&t, &g, &o).unwrap().collapse().unwrap();
        assert_eq!(bf.mul(&g).unwrap().mean_value(), f.mul(&tg).unwrap().mean_value());
    }
}

fn random_tp(rng: &mut SeededRng, dim: usize, n: usize) -> TE {
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

fn random_diff_symbol(rng: &mut SeededRng, dim: usize, deg: u32) -> SE {
    let mut a = SE::zero(dim, SE::std_basis()).unwrap();
    for alpha in MultiIndex::up_to(dim, deg) {
        if rng.int_in(0, 3) == 0 {
            continue;
        }
        let c = SE::from_trigpoly(random_tp(rng, dim, 2));
        let m = SE::xi_mono(dim, SE::std_basis(), alpha, Exact::one()).unwrap();
        a = a.add(&c.mul(&m).unwrap()).unwrap();
    }
    a
}

#[test]
fn full_product_matches_direct_composition() {
    let mut rng = SeededRng::new(1);
    for dim in 1..=2 {
        for _ in 0..4 {
            let a = random_diff_symbol(&mut rng, dim, 2);
            let b = random_diff_symbol(&mut rng, dim, 2);
            let deg = a.xi_degree().unwrap_or(0) as usize;
            let mut c = SE::zero(dim, SE::std_basis()).unwrap();
            for t in symbol_product(&[a.clone()], &[b.clone()], deg).unwrap() {
                c = c.add(&t).unwrap();
            }
            let f = random_tp(&mut rng, dim, 5);
            let lhs = apply_symbol(&c, &f, &ApplyOptions::default()).unwrap().collapse().unwrap();
            let rhs = compose_direct(&a, &b, &f).unwrap().collapse().unwrap();
            assert_eq!(lhs, rhs);
        }
    }
}

#[test]
fn double_transpose_restores_differential_symbols() {
    let mut rng = SeededRng::new(4);
    for dim in 1..=2 {
        for _ in 0..4 {
            let b = random_diff_symbol(&mut rng, dim, 2);
            let tt = transpose_sum(&transpose_sum(&b, 2).unwrap(), 2).unwrap();
            assert_eq!(tt, b);
        }
    }
}

fn perturbed() -> SE {
    // ⟨2πξ⟩² + ½ e^{2πix}
    two_pi_bracket_sq::<Exact>(1, SE::std_basis())
        .unwrap()
        .add(&e(1).scale(&Exact::from_rational(&ratio(1, 2))))
        .unwrap()
}

#[test]
fn parametrix_constant_coefficients() {
    let a = two_pi_bracket_sq::<Exact>(1, SE::std_basis()).unwrap();
    let p = parametrix(&a, &HypoellParams::new(2.0, 2.0, 1.0), 3).unwrap();
    assert!(p.terms.terms[0].mul(&a).unwrap().is_one());
    assert!(p.terms.terms[1..].iter().all(SymbolExpr::is_zero));
    // the truncated product is exactly 1
    let c = symbol_product(&p.terms.terms, &[a.clone()], 3).unwrap();
    assert!(c[0].is_one());
    assert!(c[1..].iter().all(SymbolExpr::is_zero));
    assert!(matches!(
        parametrix(&SE::zero(1, SE::std_basis()).unwrap(), &HypoellParams::new(0.0, 0.0, 1.0), 1),
        Err(Error::ZeroSymbol)
    ));
    assert!(parametrix(&a, &HypoellParams::new(2.0, 2.0, 1.0), 6).is_err());
}

#[test]
fn parametrix_first_step_by_hand() {
    let a = perturbed();
    let p = parametrix(&a, &HypoellParams::new(2.0, 2.0, 1.0), 1).unwrap();
    let b0 = &p.terms.terms[0];
    let hand = b0
        .mul(&b0.dxi(&MultiIndex(vec![1])).unwrap())
        .unwrap()
        .mul(&a.dx(&MultiIndex(vec![1])).unwrap())
        .unwrap()
        .scale(&Exact::two_pi_i().recip().unwrap())
        .neg();
    let fb = p.terms.terms[1].to_float().compile();
    let fh = hand.to_float().compile();
    for &x in &[0.0, 0.2, 0.7] {
        for &k in &[-3.0, 0.5, 4.0, 40.0] {
            let u = fb.eval(&[x], &[x], &[k]).unwrap();
            let v = fh.eval(&[x], &[x], &[k]).unwrap();
            assert!((u - v).norm() <= 1e-13 * v.norm().max(1e-300));
        }
    }
}

#[test]
fn parametrix_recursion_kills_low_order_product_terms() {
    let a = perturbed().to_float();
    let p = parametrix(&a, &HypoellParams::new(2.0, 2.0, 1.0), 3).unwrap();
    let c = symbol_product(&p.terms.terms, &[a.clone()], 3).unwrap();
    let f: Vec<CompiledSymbol> = c.iter().map(SymbolExpr::compile).collect();
    for &x in &[0.1, 0.6] {
        for &k in &[2.0, -7.0, 30.0] {
            assert!((f[0].eval(&[x], &[x], &[k]).unwrap() - 1.0).norm() < 1e-12);
            for g in &f[1..] {
                assert!(g.eval(&[x], &[x], &[k]).unwrap().norm() < 1e-12);
            }
        }
    }
}

#[test]
fn residual_tail_matches_direct_composition() {
    // r_N(x, η) = e_{-η}(x)·(b_(N)(x,D) a(x,D) e_η)(x) - 1
    let a = perturbed();
    for n in 1..=3 {
        let p = parametrix(&a, &HypoellParams::new(2.0, 2.0, 1.0), n).unwrap();
        let b = p.sum().unwrap();
        let res = ParametrixResidual::new(&a.to_float(), &p.terms.to_float().terms).unwrap();
        for eta in [2i64, 5, 9] {
            let f = TE::exp_int(&[eta]);
            let g = compose_direct(&b, &a, &f).unwrap();
            for &x in &[0.0, 0.3, 0.55] {
                let direct = g.eval(&[x]).unwrap() * Complex64::from_polar(1.0, -core::f64::consts::TAU * eta as f64 * x) - 1.0;
                let tail = res.eval(&[x], &[eta as f64]).unwrap();
                assert!((direct - tail).norm() < 1e-12 + 1e-6 * tail.norm(), "n={n} η={eta}: {direct} vs {tail}");
            }
        }
    }
}

#[test]
fn residual_decay_slopes() {
    let a = perturbed().to_float();
    let radii = log_space(10.0, 1000.0, 12);
    let xs = crate::sampling::uniform_grid(1, 8, 1.0);
    for n in 1..=3 {
        let p = parametrix(&a, &HypoellParams::new(2.0, 2.0, 1.0), n).unwrap();
        let res = ParametrixResidual::new(&a, &p.terms.terms).unwrap();
        let rep = residual_decay(&res, &[1.0], &radii, &xs).unwrap();
        assert!(rep.fit.slope <= -(n as f64 + 1.0) + 0.2, "n={n}: {:?}", rep.fit);
    }
}

#[test]
fn parametrix_check_records_warnings() {
    let sampler = SymbolSampler::standard(1, 3);
    let hp = HypoellParams::new(2.0, 2.0, 1.0);
    let a = perturbed().to_float();
    let mut p = parametrix(&a, &hp, 1).unwrap();
    p.check(&a, &hp, 2, &sampler).unwrap();
    assert!(p.warnings.is_empty(), "{:?}", p.warnings);
    let bad = SF::std_mono(&[1], Complex64::new(1.0, 0.0));
    let mut p = parametrix(&bad, &hp, 0).unwrap();
    p.check(&bad, &hp, 2, &sampler).unwrap();
    assert!(!p.warnings.is_empty());
}

#[test]
fn cutoff_support_and_range() {
    let c = CutoffFamily::with_defaults(2.0).unwrap();
    assert_eq!((c.r, c.k), (4.0, 3));
    for j in 0..6 {
        let w = c.scale(j);
        assert_eq!(c.phi(j, 2.0 * w * (1.0 - 1e-15)), 0.0);
        assert_eq!(c.phi(j, 3.0 * w * (1.0 + 1e-15)), 1.0);
        assert_eq!(c.phi(j, 4.0 * w), 1.0);
        for i in 0..200 {
            let v = c.phi(j, 5.0 * w * i as f64 / 200.0);
            assert!((0.0..=1.0).contains(&v));
        }
    }
}

#[test]
fn cutoff_derivative_growth() {
    // sup |φ_j^{(γ)}| · (R (j+1)^{s-1})^γ stays bounded in j
    let c = CutoffFamily::with_defaults(2.0).unwrap();
    let mut per_gamma = [Vec::new(), Vec::new(), Vec::new()];
    for j in 0..6 {
        let w = c.scale(j);
        let h = w * 1e-3;
        let mut sup = [0.0f64; 3];
        for i in 1..400 {
            let r = 2.0 * w + w * i as f64 / 400.0;
            let f = |t: f64| c.phi(j, t);
            let d1 = (f(r + h) - f(r - h)) / (2.0 * h);
            let d2 = (f(r + h) - 2.0 * f(r) + f(r - h)) / (h * h);
            let d3 = (f(r + 2.0 * h) - 2.0 * f(r + h) + 2.0 * f(r - h) - f(r - 2.0 * h)) / (2.0 * h * h * h);
            sup[0] = sup[0].max(d1.abs());
            sup[1] = sup[1].max(d2.abs());
            sup[2] = sup[2].max(d3.abs());
        }
        let unit = c.r * ((j + 1) as f64).powf(c.s - 1.0);
        for g in 0..3 {
            per_gamma[g].push(sup[g] * unit.powi(g as i32 + 1));
        }
    }
    for v in &per_gamma {
        let first = v[0];
        assert!(v.iter().all(|x| *x <= first * 1.01), "{v:?}");
    }
}

#[test]
fn cutoff_sums() {
    let c = CutoffFamily::with_defaults(1.0).unwrap();
    let a0 = SF::std_bracket(1, ratio(2, 1));
    let params = ClassParams::new(1, 2.0, 1.0, 1.0);
    let f = FormalSum::single(a0.clone(), params);
    let s = sum_formal(&f, c, 4);
    for &k in &[0.0, 3.0, 7.9] {
        assert_eq!(s.eval(&[0.2], &[k]).unwrap(), Complex64::new(0.0, 0.0));
    }
    for &k in &[12.5, 40.0] {
        assert_eq!(s.eval(&[0.2], &[k]).unwrap(), a0.eval(&[0.2], &[k]).unwrap());
    }
    // a term whose support has not started contributes nothing
    let f2 = FormalSum::new(vec![a0.clone(), SF::std_bracket(1, ratio(1, 1))], params);
    let s2 = sum_formal(&f2, c, 4);
    assert_eq!(s2.eval(&[0.0], &[15.0]).unwrap(), a0.eval(&[0.0], &[15.0]).unwrap());
    let v = s2.eval(&[0.0], &[30.0]).unwrap();
    assert!((v - a0.eval(&[0.0], &[30.0]).unwrap() - (1.0f64 + 900.0).sqrt()).norm() < 1e-9);
}

#[test]
fn equivalence_examples() {
    let sampler = SymbolSampler::standard(1, 6);
    let params = ClassParams::new(1, 2.0, 1.0, 1.0);
    let a = FormalSum::new(
        vec![
            SF::std_bracket(1, ratio(2, 1)),
            SF::std_bracket(1, ratio(1, 1)).mul(&SF::std_trig(1, &[(&[1], Complex64::new(1.0, 0.0))])).unwrap(),
            SF::std_bracket(1, ratio(0, 1)),
        ],
        params,
    );
    let same = equivalence_check(&a, &a, 4, &sampler).unwrap();
    assert!(same.pass && same.c_of_n.iter().all(|c| *c == 0.0));

    // +p in term 1 and -p in term 2 with p of the order of term 2
    let p = SF::std_bracket(1, ratio(0, 1)).scale(&Complex64::new(3.0, 0.0));
    let mut b = a.clone();
    b.terms[1] = b.terms[1].add(&p).unwrap();
    b.terms[2] = b.terms[2].sub(&p).unwrap();
    let r = equivalence_check(&a, &b, 4, &sampler).unwrap();
    assert!(r.pass, "{r:?}");

    let mut bad = a.clone();
    bad.terms[0] = bad.terms[0].add(&SF::std_bracket(1, ratio(2, 1))).unwrap();
    let r = equivalence_check(&a, &bad, 3, &sampler).unwrap();
    assert!(!r.pass && (r.slope - 3.0).abs() < 0.1, "{r:?}");
}

#[test]
fn formal_sum_term_checks() {
    let sampler = SymbolSampler::standard(1, 6);
    let f = FormalSum::new(
        vec![SF::std_bracket(1, ratio(2, 1)), SF::std_bracket(1, ratio(1, 1))],
        ClassParams::new(1, 2.0, 1.0, 1.0),
    );
    for j in 0..2 {
        let fit = f.check_term(j, 2, &sampler).unwrap();
        assert!(fit.max_trend <= TREND_TOL, "{fit:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn product_with_one_is_identity(seed in any::<u64>()) {
        let mut rng = SeededRng::new(seed);
        let a = random_diff_symbol(&mut rng, 2, 2);
        let one = SE::one(2, SE::std_basis()).unwrap();
        let left = symbol_product(&[one.clone()], &[a.clone()], 2).unwrap();
        let right = symbol_product(&[a.clone()], &[one], 2).unwrap();
        prop_assert_eq!(&left[0], &a);
        prop_assert_eq!(&right[0], &a);
        prop_assert!(left[1..].iter().chain(&right[1..]).all(SymbolExpr::is_zero));
    }
}
