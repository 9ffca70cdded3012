use super::*;
use crate::sampling::SeededRng;
use crate::scalar::Exact;
use proptest::prelude::*;

type S = SymbolExpr<Complex64>;
type SE = SymbolExpr<Exact>;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn e1() -> SE {
    SE::std_trig(1, &[(&[1], Exact::one())])
}

#[test]
fn xi_derivatives() {
    let xi2 = SE::std_mono(&[2], Exact::one());
    assert_eq!(xi2.dxi(&MultiIndex(vec![1])).unwrap(), SE::std_mono(&[1], Exact::from_i64(2)));

    let m = ratio(3, 2);
    let b = SE::std_bracket(2, m.clone());
    let d = b.dxi(&MultiIndex(vec![0, 1])).unwrap();
    let expect = SE::std_mono(&[0, 1], Exact::from_rational(&m))
        .mul(&SE::std_bracket(2, m - ratio(2, 1)))
        .unwrap();
    assert_eq!(d, expect);
}

#[test]
fn x_derivative_of_modulated_xi() {
    let a = e1().mul(&SE::std_mono(&[1], Exact::one())).unwrap();
    let d = a.dx(&MultiIndex(vec![1])).unwrap();
    assert_eq!(d, a.scale(&Exact::two_pi_i()));
}

#[test]
fn evaluation_examples() {
    let p = S::std_mono(&[2], c(1.0, 0.0)).add(&S::constant(1, S::std_basis(), c(1.0, 0.0)).unwrap()).unwrap();
    assert!((p.eval(&[0.0], &[2.0]).unwrap() - c(5.0, 0.0)).norm() < 1e-14);
    let one = S::one(1, S::std_basis()).unwrap();
    let q = one.div(&p).unwrap();
    assert!((q.eval(&[0.0], &[0.0]).unwrap() - c(1.0, 0.0)).norm() < 1e-14);
    let a = S::std_trig(1, &[(&[1], c(1.0, 0.0))]).mul(&S::std_mono(&[1], c(1.0, 0.0))).unwrap();
    assert!((a.eval(&[0.25], &[3.0]).unwrap() - c(0.0, 3.0)).norm() < 1e-14);
}

#[test]
fn vanishing_denominator_is_a_domain_error() {
    let xi = S::std_mono(&[1], c(1.0, 0.0));
    let q = S::one(1, S::std_basis()).unwrap().div(&xi.add(&S::std_trig(1, &[(&[0], c(-2.0, 0.0))])).unwrap()).unwrap();
    match q.eval(&[0.3], &[2.0]) {
        Err(Error::Domain { x, xi }) => {
            assert_eq!(x, vec![0.3]);
            assert_eq!(xi, vec![2.0]);
        }
        other => panic!("expected domain error, got {other:?}"),
    }
}

#[test]
fn brackets_expand_and_cancel() {
    let b2 = SE::std_bracket(1, ratio(2, 1));
    let poly = SE::std_mono(&[2], Exact::one()).add(&SE::one(1, SE::std_basis()).unwrap()).unwrap();
    assert_eq!(b2, poly);
    let prod = SE::std_bracket(1, ratio(1, 1)).mul(&SE::std_bracket(1, ratio(-1, 1))).unwrap();
    assert!(prod.is_one());
    let q = poly.div(&poly).unwrap();
    assert!(q.is_one());
    let r = SE::one(1, SE::std_basis()).unwrap().div(&poly).unwrap();
    assert!(r.mul(&poly).unwrap().is_one());
}

#[test]
fn single_exponential_inverts() {
    let a = SE::std_trig(1, &[(&[2], Exact::from_i64(4))]);
    let inv = SE::one(1, SE::std_basis()).unwrap().div(&a).unwrap();
    assert_eq!(inv.try_trigpoly().unwrap(), TrigPoly::from_int_terms(1, &[(&[-2], Exact::from_rational(&ratio(1, 4)))]));
}

#[test]
fn frozen_frequency_values() {
    let tau = Exact::two_pi();
    let a = two_pi_bracket_sq::<Exact>(1, SE::std_basis()).unwrap();
    let b0 = SE::one(1, SE::std_basis()).unwrap().div(&a).unwrap();
    let v = b0.at_frequency(&Frequency::from_ints(&[3])).unwrap().try_trigpoly().unwrap();
    let expect = Exact::one().plus(&tau.times(&tau).times(&Exact::from_i64(9))).recip().unwrap();
    assert_eq!(v.mean_value(), expect);
    let odd = SE::std_bracket(1, ratio(1, 1));
    assert!(matches!(odd.at_frequency(&Frequency::from_ints(&[1])), Err(Error::NotExact(_))));
    let f = odd.to_float().at_frequency(&Frequency::from_ints(&[1])).unwrap().try_trigpoly().unwrap();
    assert!((f.mean_value() - c(2f64.sqrt(), 0.0)).norm() < 1e-15);
}

#[test]
fn adjoint_and_diagonal() {
    let a = e1();
    let adj = a.adjoint_amplitude().unwrap();
    assert!(adj.is_amplitude());
    let comps = adj.y_components().unwrap();
    assert_eq!(comps.len(), 1);
    assert_eq!(comps[0].0, Frequency::from_ints(&[-1]));
    let diag = adj.restrict_diagonal().unwrap();
    assert_eq!(diag, SE::std_trig(1, &[(&[-1], Exact::one())]));
}

#[test]
fn reflection_flips_odd_monomials() {
    let a = SE::std_mono(&[3], Exact::one()).add(&SE::std_mono(&[2], Exact::one())).unwrap();
    let r = a.reflect_xi().unwrap();
    let expect = SE::std_mono(&[3], Exact::from_i64(-1)).add(&SE::std_mono(&[2], Exact::one())).unwrap();
    assert_eq!(r, expect);
}

#[test]
fn class_of_brackets_and_mismatch() {
    let sampler = SymbolSampler::standard(1, 11);
    let a = S::std_bracket(1, ratio(3, 1));
    let p = ClassParams::new(1, 3.0, 1.0, 1.0);
    let rep = verify_class(&a, &p, 4, &sampler).unwrap();
    let rep2 = verify_class(&a, &p.with_c(rep.fitted_c), 4, &sampler).unwrap();
    assert!(rep2.pass, "{rep2:?}");

    let e = S::std_trig(1, &[(&[1], c(1.0, 0.0))]);
    let p0 = ClassParams::new(1, 0.0, 1.0, 1.0).with_c(core::f64::consts::TAU);
    assert!(verify_class(&e, &p0, 4, &sampler).unwrap().pass);

    let xi = S::std_mono(&[1], c(1.0, 0.0));
    let rep = verify_class(&xi, &p0.with_c(1e6), 3, &sampler).unwrap();
    assert!(!rep.pass);
    let w = rep.witness.expect("witness");
    assert!(w.xi[0].abs() > 100.0);
}

#[test]
fn class_check_monotone_in_c() {
    let sampler = SymbolSampler::standard(1, 3);
    let a = S::std_bracket(1, ratio(-1, 1)).mul(&S::std_trig(1, &[(&[1], c(0.5, 0.0)), (&[0], c(1.0, 0.0))])).unwrap();
    let base = ClassParams::new(1, -1.0, 1.0, 1.0);
    let fit = verify_class(&a, &base, 3, &sampler).unwrap().fitted_c;
    for k in [1.0, 1.5, 4.0] {
        assert!(verify_class(&a, &base.with_c(fit * k), 3, &sampler).unwrap().pass);
    }
    assert!(!verify_class(&a, &base.with_c(fit * 0.5), 3, &sampler).unwrap().pass);
}

fn random_atom(rng: &mut SeededRng, dim: usize) -> SE {
    let q = |rng: &mut SeededRng| Exact::from_rational(&ratio(rng.int_in(-4, 4), rng.int_in(1, 3)));
    match rng.int_in(0, 3) {
        0 => {
            let xi: Vec<i64> = (0..dim).map(|_| rng.int_in(-2, 2)).collect();
            SE::from_trigpoly(TrigPoly::from_int_terms(dim, &[(&xi, q(rng)), (&vec![0; dim], q(rng))]))
        }
        1 => {
            let alpha: Vec<u32> = (0..dim).map(|_| rng.int_in(0, 2) as u32).collect();
            SE::std_mono(&alpha, q(rng))
        }
        2 => SE::std_bracket(dim, ratio(rng.int_in(-3, 3), 1)),
        _ => SE::constant(dim, SE::std_basis(), q(rng)).unwrap(),
    }
}

fn safe_divisor(rng: &mut SeededRng, dim: usize) -> SE {
    match rng.int_in(0, 2) {
        0 => SE::std_bracket(dim, ratio(rng.int_in(1, 3), 1)),
        1 => {
            let mut e = vec![0i64; dim];
            e[0] = 1;
            let mut m = e.clone();
            m[0] = -1;
            SE::from_trigpoly(TrigPoly::from_int_terms(
                dim,
                &[(&vec![0; dim], Exact::from_i64(3)), (&e, Exact::one()), (&m, Exact::one())],
            ))
        }
        _ => {
            let mut a = vec![0u32; dim];
            a[dim - 1] = 2;
            SE::std_mono(&a, Exact::one()).add(&SE::one(dim, SE::std_basis()).unwrap()).unwrap()
        }
    }
}

fn random_expr(rng: &mut SeededRng, dim: usize, depth: u32) -> SE {
    if depth == 0 {
        return random_atom(rng, dim);
    }
    let a = random_expr(rng, dim, depth - 1);
    match rng.int_in(0, 2) {
        0 => a.add(&random_expr(rng, dim, depth - 1)).unwrap(),
        1 => a.mul(&random_atom(rng, dim)).unwrap(),
        _ => a.div(&safe_divisor(rng, dim)).unwrap(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn derivatives_match_finite_differences(seed in any::<u64>(), dim in 1usize..3, depth in 1u32..5) {
        let mut rng = SeededRng::new(seed);
        let a = random_expr(&mut rng, dim, depth);
        let af = a.to_float().compile();
        let vars: Vec<Var> = (0..dim).flat_map(|i| [Var::X(i), Var::Xi(i)]).collect();
        let ders: Vec<CompiledSymbol> = vars.iter().map(|v| a.derive(*v).unwrap().to_float().compile()).collect();
        for _ in 0..50 {
            let x: Vec<f64> = (0..dim).map(|_| rng.uniform()).collect();
            let xi: Vec<f64> = (0..dim).map(|_| rng.uniform() * 6.0 - 3.0).collect();
            let f0 = af.eval(&x, &x, &xi).unwrap();
            for (v, d) in vars.iter().zip(&ders) {
                let h = 1e-5;
                let (mut xp, mut xm, mut kp, mut km) = (x.clone(), x.clone(), xi.clone(), xi.clone());
                match v {
                    Var::X(i) => { xp[*i] += h; xm[*i] -= h; }
                    Var::Xi(i) => { kp[*i] += h; km[*i] -= h; }
                    Var::Y(_) => unreachable!(),
                }
                let fd = (af.eval(&xp, &xp, &kp).unwrap() - af.eval(&xm, &xm, &km).unwrap()) / (2.0 * h);
                let ex = d.eval(&x, &x, &xi).unwrap();
                let tol = 1e-6 * (1.0 + ex.norm() + f0.norm());
                prop_assert!((fd - ex).norm() < tol, "var {:?}: fd {} vs {}", v, fd, ex);
            }
        }
    }

    #[test]
    fn clairaut(seed in any::<u64>(), depth in 1u32..4) {
        let mut rng = SeededRng::new(seed);
        let a = random_expr(&mut rng, 2, depth);
        for (i, j) in [(0usize, 0usize), (0, 1), (1, 0)] {
            let l = a.derive(Var::Xi(i)).unwrap().derive(Var::X(j)).unwrap();
            let r = a.derive(Var::X(j)).unwrap().derive(Var::Xi(i)).unwrap();
            let (lf, rf) = (l.to_float().compile(), r.to_float().compile());
            for _ in 0..10 {
                let x = [rng.uniform(), rng.uniform()];
                let xi = [rng.uniform() * 4.0 - 2.0, rng.uniform() * 4.0 - 2.0];
                let (u, v) = (lf.eval(&x, &x, &xi).unwrap(), rf.eval(&x, &x, &xi).unwrap());
                prop_assert!((u - v).norm() <= 1e-12 * (1.0 + u.norm()));
            }
            prop_assert!(l == r);
        }
    }
}
