//! Command implementations.

use std::path::Path;

use apcalc_core::bohr::{numerical_bohr_coeff, numerical_mean, MeanEstimate, MeanSchedule, Window};
use apcalc_core::calculus::{parametrix, residual_decay, symbol_product_term, ParametrixResidual};
use apcalc_core::counterexample::{c0_from_table, f_partial, f_partial_mean, parse_s, witness_from_sups, PsiDerivatives, SupGrid};
use apcalc_core::freq::parse_rational;
use apcalc_core::hypoell::{
    constant_strength_check, s_hypoelliptic_fit, strength_sq, weaker_check, x_grid_for, AphsReport, HypoellParams, PolySampler,
};
use apcalc_core::operators::{apply_amplitude, apply_symbol, compose_direct, residual_norms, APFunction, ApplyOptions};
use apcalc_core::regularity::{frequency_condition_check, gevrey_fit, lattice_points, membership_report, CoeffData, GevreyFit};
use apcalc_core::sampling::{line_fit, log_space};
use apcalc_core::solve::{solve, SolveOptions, SolveOutcome};
use apcalc_core::symexpr::SymbolSampler;
use apcalc_core::{Coeff, Complex64, Exact, Frequency, NormParams, SymbolExpr, TrigPoly};
use num_traits::ToPrimitive;
use serde_json::{json, Value};

use crate::cli::{Cli, Command, FreqSet, HypoArgs, HypoCommand, Mode, WindowArg};
use crate::error::{CliError, CliResult};
use crate::format::{
    read_coeff_csv, read_json, read_points_csv, CoeffIo, ConstantStrengthJson, EquivJson, PolyJson, SymbolFile, TrigPolyJson,
};
use crate::report::{jnum, num, Report, Table};

/// Parametrix residual slope may exceed `-ρ(N+1)` by this much.
const DECAY_SLACK: f64 = 0.2;

/// Relative coefficient tolerance of float-mode comparisons.
const FLOAT_TOL: f64 = 1e-9;

struct Ctx {
    dim: Option<usize>,
    seed: u64,
}

impl Ctx {
    fn check_dim(&self, d: usize, what: &str) -> CliResult<()> {
        match self.dim {
            Some(e) if e != d => Err(CliError::Input(format!("{what} has dimension {d}, --dim is {e}"))),
            _ => Ok(()),
        }
    }
}

pub fn execute(cli: &Cli) -> CliResult<Report> {
    let ctx = Ctx {
        dim: cli.dim,
        seed: cli.seed,
    };
    match cli.mode {
        Mode::Exact => execute_in::<Exact>(&ctx, &cli.command),
        Mode::Float => execute_in::<Complex64>(&ctx, &cli.command),
    }
}

fn execute_in<C: CoeffIo>(ctx: &Ctx, cmd: &Command) -> CliResult<Report> {
    match cmd {
        Command::Apply { symbol, input, radius } => apply::<C>(ctx, symbol, input, *radius),
        Command::Compose { a, b, input, terms } => compose::<C>(ctx, a, b, input, *terms),
        Command::Parametrix {
            symbol,
            order,
            hp,
            check_order,
        } => parametrix_cmd::<C>(ctx, symbol, *order, hp, *check_order),
        Command::Equiv { input, n_max } => equiv::<C>(ctx, input, *n_max),
        Command::Hypo(h) => hypo::<C>(ctx, h),
        Command::GevreyFit {
            data,
            s_min,
            s_max,
            s_step,
            membership_s,
            eps,
            p,
        } => gevrey(ctx, data, (*s_min, *s_max, *s_step), *membership_s, eps, *p),
        Command::FreqCheck {
            set,
            points,
            s,
            eps,
            r_max,
            steps,
            tol,
        } => freq_check(ctx, *set, points.as_deref(), *s, eps, *r_max, *steps, *tol),
        Command::Counterexample { s, c, n_list, j_max } => counterexample(s, c, n_list, *j_max),
        Command::Mean {
            input,
            partial_sum,
            s,
            xi,
            t_values,
            points_per_unit,
            window,
        } => {
            let mut sched = MeanSchedule::new(t_values.clone(), *points_per_unit)?;
            sched = sched.with_window(match window {
                WindowArg::Box => Window::Box,
                WindowArg::Fejer => Window::Fejer,
            });
            match (input, partial_sum) {
                (Some(path), None) => mean_tp::<C>(ctx, path, xi.as_deref(), &sched),
                (None, Some(n)) => mean_partial_sum(s, *n, &sched),
                _ => Err(CliError::Input("give exactly one of --input and --partial-sum".into())),
            }
        }
        Command::Solve { symbol, input, order, hp } => solve_cmd::<C>(ctx, symbol, input, *order, hp),
        Command::Residual {
            symbol,
            u,
            input,
            sobolev_t,
            gevrey_s,
            gevrey_eps,
        } => {
            let mut norms: Vec<NormParams> = sobolev_t.iter().map(|&t| NormParams::sobolev(2.0, t)).collect();
            norms.extend(gevrey_eps.iter().map(|&e| NormParams::gevrey(1.0, *gevrey_s, e)));
            residual::<C>(ctx, symbol, u, input, &norms)
        }
    }
}

fn load_symbol<C: CoeffIo>(ctx: &Ctx, path: &Path) -> CliResult<SymbolExpr<C>> {
    let f: SymbolFile = read_json(path)?;
    ctx.check_dim(f.dim, &path.display().to_string())?;
    f.to_core().map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn load_tp<C: CoeffIo>(ctx: &Ctx, path: &Path) -> CliResult<TrigPoly<C>> {
    let f: TrigPolyJson = read_json(path)?;
    ctx.check_dim(f.dim, &path.display().to_string())?;
    f.to_core().map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn load_poly<C: CoeffIo>(ctx: &Ctx, path: &Path) -> CliResult<apcalc_core::hypoell::PolySymbol<C>> {
    let f: PolyJson = read_json(path)?;
    ctx.check_dim(f.dim, &path.display().to_string())?;
    f.to_core().map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

/// The result as a trigonometric polynomial, exact when it collapses.
fn ap_json<C: CoeffIo>(u: &APFunction<C>) -> CliResult<(Value, bool)> {
    Ok(match u.collapse() {
        Some(t) => (tp_value(&t), true),
        None => (tp_value(&u.spectrum()?), false),
    })
}

fn tp_value<C: CoeffIo>(t: &TrigPoly<C>) -> Value {
    serde_json::to_value(TrigPolyJson::from_core(t)).expect("polynomials serialize")
}

fn apply_any<C: Coeff>(a: &SymbolExpr<C>, f: &TrigPoly<C>, opts: &ApplyOptions<C>) -> CliResult<APFunction<C>> {
    Ok(if a.is_amplitude() && a.depends_on_y() {
        apply_amplitude(a, f, opts)?
    } else {
        apply_symbol(a, f, opts)?
    })
}

fn apply<C: CoeffIo>(ctx: &Ctx, symbol: &Path, input: &Path, radius: f64) -> CliResult<Report> {
    let a = load_symbol::<C>(ctx, symbol)?;
    let f = load_tp::<C>(ctx, input)?;
    let opts = if radius > 0.0 { ApplyOptions::with_radius(radius) } else { ApplyOptions::default() };
    let u = apply_any(&a, &f, &opts)?;
    let (result, exact) = ap_json(&u)?;
    let mut table = Table::new("apply", &["term", "frequency", "abs"]);
    let spec = u.spectrum()?;
    for (i, (xi, c)) in spec.terms().iter().enumerate() {
        let coords: Vec<String> = xi.coords().iter().map(ToString::to_string).collect();
        table.push(vec![i.to_string(), coords.join(" "), num(c.norm())]);
    }
    Ok(Report::new("apply", true, json!({ "exact": exact, "terms": spec.len(), "result": result })).with_table(table))
}

fn compose<C: CoeffIo>(ctx: &Ctx, a_path: &Path, b_path: &Path, input: &Path, terms: usize) -> CliResult<Report> {
    let a = load_symbol::<C>(ctx, a_path)?;
    let b = load_symbol::<C>(ctx, b_path)?;
    let f = load_tp::<C>(ctx, input)?;
    let direct = compose_direct(&a, &b, &f)?;
    let (ta, tb) = (vec![a.clone()], vec![b.clone()]);
    let mut c = symbol_product_term(&ta, &tb, 0)?;
    for j in 1..=terms {
        c = c.add(&symbol_product_term(&ta, &tb, j)?)?;
    }
    let via_symbol = apply_symbol(&c, &f, &ApplyOptions::default())?;
    // the expansion is exact once ∂_ξ^α a vanishes for |α| > terms
    let terminates = a.xi_degree().is_some_and(|d| d as usize <= terms) || !b.depends_on_x();
    let (exact_equal, rel_diff) = match (direct.collapse(), via_symbol.collapse()) {
        (Some(x), Some(y)) => {
            let d = x.sub(&y)?;
            let scale = x.max_abs().max(y.max_abs()).max(f64::MIN_POSITIVE);
            (Some(d.is_zero()), d.max_abs() / scale)
        }
        _ => {
            let (x, y) = (direct.spectrum()?, via_symbol.spectrum()?);
            let scale = x.max_abs().max(y.max_abs()).max(f64::MIN_POSITIVE);
            (None, x.sub(&y)?.max_abs() / scale)
        }
    };
    let agree = if C::MODE == "exact" {
        exact_equal.unwrap_or(rel_diff <= FLOAT_TOL)
    } else {
        rel_diff <= FLOAT_TOL
    };
    let (result, exact) = ap_json(&direct)?;
    Ok(Report::new(
        "compose",
        !terminates || agree,
        json!({
            "terms": terms,
            "expansion_terminates": terminates,
            "exact_equal": exact_equal,
            "relative_difference": jnum(rel_diff),
            "exact": exact,
            "result": result,
        }),
    ))
}

fn hypo_params<C: Coeff>(a: &SymbolExpr<C>, h: &HypoArgs) -> CliResult<HypoellParams> {
    let m = match h.m {
        Some(m) => m,
        None => a
            .xi_degree()
            .map(f64::from)
            .ok_or_else(|| CliError::Input("--m is required for symbols that are not polynomial in ξ".into()))?,
    };
    let mut hp = HypoellParams::new(m, h.m0.unwrap_or(m), h.rho);
    if let Some(s) = h.s {
        hp.s = s;
    }
    if let Some(a) = h.radius {
        hp.a = a;
    }
    if let Some(c) = h.c {
        hp.c = c;
    }
    if let Some(c1) = h.c1 {
        hp.c1 = c1;
    }
    hp.validate()?;
    Ok(hp)
}

fn aphs_json(r: &AphsReport) -> Value {
    json!({
        "pass": r.pass,
        "c1_hat": jnum(r.c1_hat),
        "c_hat": jnum(r.c_hat),
        "lower_ratio": jnum(r.lower_ratio),
        "worst_ratio": jnum(r.worst_ratio),
        "lower_trend": jnum(r.lower_trend),
        "max_trend": jnum(r.max_trend),
        "witness": r.witness.as_ref().map(|(x, xi)| json!({ "x": x, "xi": xi })),
    })
}

fn parametrix_cmd<C: CoeffIo>(ctx: &Ctx, symbol: &Path, order: usize, h: &HypoArgs, check_order: u32) -> CliResult<Report> {
    let a = load_symbol::<C>(ctx, symbol)?;
    let hp = hypo_params(&a, h)?;
    let sampler = SymbolSampler::standard(a.dim(), ctx.seed);
    let mut par = parametrix(&a, &hp, order)?;
    par.check(&a, &hp, check_order, &sampler)?;
    let res = ParametrixResidual::new(&a, &par.terms.terms)?;
    let r0 = 10.0f64.max(2.0 * par.validity_radius).max(2.0 * hp.a);
    let radii = log_space(r0, 100.0 * r0, 12);
    let mut dir = vec![0.0; a.dim()];
    dir[0] = 1.0;
    let expected = -hp.rho * (order as f64 + 1.0);
    let mut table = Table::new("parametrix_residual", &["radius", "max_abs_residual"]);
    let (slope, decays) = match residual_decay(&res, &dir, &radii, &sampler.x_points) {
        Ok(d) => {
            for (r, v) in &d.samples {
                table.push(vec![num(*r), num(*v)]);
            }
            (Some(d.fit.slope), d.fit.slope <= expected + DECAY_SLACK)
        }
        // every sample vanished: the residual is identically zero on the ray
        Err(apcalc_core::Error::InsufficientData(_)) => (None, true),
        Err(e) => return Err(e.into()),
    };
    let term_sizes: Vec<usize> = par.terms.terms.iter().map(SymbolExpr::len).collect();
    Ok(Report::new(
        "parametrix",
        par.warnings.is_empty() && decays,
        json!({
            "order": order,
            "validity_radius": jnum(par.validity_radius),
            "term_sizes": term_sizes,
            "warnings": par.warnings,
            "residual_slope": slope.map(jnum),
            "expected_slope": expected,
        }),
    )
    .with_table(table))
}

fn equiv<C: CoeffIo>(ctx: &Ctx, input: &Path, n_max: usize) -> CliResult<Report> {
    let j: EquivJson = read_json(input)?;
    ctx.check_dim(j.dim, &input.display().to_string())?;
    let (a, b) = j.to_core::<C>().map_err(|e| CliError::Input(format!("{}: {e}", input.display())))?;
    let sampler = SymbolSampler::standard(j.dim, ctx.seed);
    let r = apcalc_core::calculus::equivalence_check(&a, &b, n_max, &sampler)?;
    let mut table = Table::new("equiv", &["n", "c_hat"]);
    for (n, c) in r.c_of_n.iter().enumerate() {
        table.push(vec![(n + 1).to_string(), num(*c)]);
    }
    Ok(Report::new(
        "equiv",
        r.pass,
        json!({ "c_of_n": r.c_of_n.iter().map(|v| jnum(*v)).collect::<Vec<_>>(), "slope": jnum(r.slope) }),
    )
    .with_table(table))
}

fn hypo<C: CoeffIo>(ctx: &Ctx, h: &HypoCommand) -> CliResult<Report> {
    match h {
        HypoCommand::Fit { poly } => {
            let p = load_poly::<C>(ctx, poly)?;
            let r = s_hypoelliptic_fit(&p, &PolySampler::standard(p.dim(), ctx.seed))?;
            let mut table = Table::new("hypo_fit", &["beta", "slope", "rho"]);
            let per_beta: Vec<Value> = r
                .per_beta
                .iter()
                .map(|b| {
                    let beta: Vec<String> = b.beta.0.iter().map(ToString::to_string).collect();
                    table.push(vec![beta.join(" "), num(b.slope), num(b.rho)]);
                    json!({ "beta": b.beta.0, "slope": jnum(b.slope), "rho": jnum(b.rho) })
                })
                .collect();
            Ok(Report::new(
                "hypo fit",
                r.pass,
                json!({
                    "rho_hat": jnum(r.rho_hat),
                    "s_hat": jnum(if r.rho_hat > 0.0 { (1.0 / r.rho_hat).max(1.0) } else { f64::INFINITY }),
                    "a_used": jnum(r.a_used),
                    "c_hat": jnum(r.c_hat),
                    "anisotropic": r.anisotropic,
                    "per_beta": per_beta,
                    "zeros": r.zeros,
                }),
            )
            .with_table(table))
        }
        HypoCommand::Weaker { q, p } => {
            let q = load_poly::<C>(ctx, q)?;
            let p = load_poly::<C>(ctx, p)?;
            let r = weaker_check(&q, &p, &PolySampler::standard(p.dim(), ctx.seed))?;
            Ok(Report::new("hypo weaker", r.pass, json!({ "c_hat": jnum(r.c_hat), "slope": jnum(r.slope) })))
        }
        HypoCommand::Strength { poly, at } => {
            let p = load_poly::<C>(ctx, poly)?;
            let s = strength_sq(&p)?;
            let value = match at {
                Some(pt) => {
                    if pt.len() != p.dim() {
                        return Err(CliError::Input(format!("--at needs {} coordinates", p.dim())));
                    }
                    let q = pt
                        .iter()
                        .map(|t| parse_rational(t).ok_or_else(|| CliError::Input(format!("bad coordinate {t:?}"))))
                        .collect::<CliResult<Vec<_>>>()?;
                    Some(serde_json::to_value(s.eval_exact(&q).write()).expect("coefficients serialize"))
                }
                None => None,
            };
            Ok(Report::new(
                "hypo strength",
                true,
                json!({ "strength_sq": PolyJson::from_core(&s), "value": value }),
            ))
        }
        HypoCommand::ConstantStrength { input, radius, per_unit } => {
            let j: ConstantStrengthJson = read_json(input)?;
            let err = |e: String| CliError::Input(format!("{}: {e}", input.display()));
            let c = j.coeffs.iter().map(|t| t.to_core::<C>()).collect::<Result<Vec<_>, _>>().map_err(err)?;
            let polys = j.polys.iter().map(|t| t.to_core::<C>()).collect::<Result<Vec<_>, _>>().map_err(err)?;
            let dim = polys.first().map(|p| p.dim()).ok_or_else(|| CliError::Input("no polynomials".into()))?;
            ctx.check_dim(dim, &input.display().to_string())?;
            let xs = x_grid_for(&c, *per_unit);
            let r = constant_strength_check(&c, &polys, &PolySampler::standard(dim, ctx.seed), *radius, &xs)?;
            Ok(Report::new(
                "hypo constant-strength",
                r.pass,
                json!({
                    "eps_hat": jnum(r.eps_hat),
                    "trend": jnum(r.trend),
                    "leading_ok": r.leading_ok,
                    "witness": { "x": r.witness.0, "xi": r.witness.1 },
                }),
            ))
        }
    }
}

fn fit_json(f: &GevreyFit) -> Value {
    json!({
        "s_hat": jnum(f.s_hat),
        "eps_hat": jnum(f.eps_hat),
        "c_hat": jnum(f.c_hat),
        "rms_residual": jnum(f.rms_residual),
        "n_points": f.n_points,
        "power_law_rms": jnum(f.power_law_rms),
        "non_gevrey": f.non_gevrey.map(|r| format!("{r:?}")),
    })
}

fn gevrey(ctx: &Ctx, data: &Path, grid: (f64, f64, f64), membership_s: Option<f64>, eps: &[f64], p: f64) -> CliResult<Report> {
    let rows = read_coeff_csv(data)?;
    if let Some(first) = rows.first() {
        if rows.iter().any(|r| r.0.len() != first.0.len()) {
            return Err(CliError::Input(format!("{}: rows have different numbers of columns", data.display())));
        }
        ctx.check_dim(first.0.len(), &data.display().to_string())?;
    }
    let (lo, hi, step) = grid;
    if !(step > 0.0 && hi >= lo) {
        return Err(CliError::Input("need s-step > 0 and s-max >= s-min".into()));
    }
    let n = ((hi - lo) / step + 1e-9).floor() as usize;
    let s_grid: Vec<f64> = (0..=n).map(|i| lo + i as f64 * step).collect();
    let d = CoeffData::new(rows)?;
    let fit = gevrey_fit(&d, &s_grid)?;
    let s = membership_s.unwrap_or(fit.s_hat);
    let m = membership_report(&d, s, eps, p)?;
    let mut table = Table::new("membership", &["eps", "radius", "partial_norm"]);
    for r in &m.rows {
        for (rad, v) in &r.partial {
            table.push(vec![num(r.eps), num(*rad), num(*v)]);
        }
    }
    let rows: Vec<Value> = m
        .rows
        .iter()
        .map(|r| json!({ "eps": r.eps, "norm": jnum(r.norm), "converging": r.converging }))
        .collect();
    Ok(Report::new(
        "gevrey-fit",
        fit.non_gevrey.is_none(),
        json!({
            "fit": fit_json(&fit),
            "membership": {
                "s": m.s,
                "p": m.p,
                "rows": rows,
                "consistent_with_w_s0": m.consistent_with_w_s0,
                "consistent_with_w_s0_minus": m.consistent_with_w_s0_minus,
            },
        }),
    )
    .with_table(table))
}

#[allow(clippy::too_many_arguments)]
fn freq_check(
    ctx: &Ctx,
    set: FreqSet,
    points: Option<&Path>,
    s: f64,
    eps: &[f64],
    r_max: f64,
    steps: usize,
    tol: f64,
) -> CliResult<Report> {
    let dim = ctx.dim.unwrap_or(1);
    let listed = match (set, points) {
        (FreqSet::Points, Some(p)) => {
            let v = read_points_csv(p)?;
            if v.iter().any(|r| r.len() != dim) {
                return Err(CliError::Input(format!("{}: every row needs {dim} coordinates", p.display())));
            }
            v
        }
        (FreqSet::Points, None) => return Err(CliError::Input("--set points needs --points".into())),
        (_, Some(_)) => return Err(CliError::Input("--points only applies to --set points".into())),
        _ => Vec::new(),
    };
    let generator = |r: f64| -> Vec<Vec<f64>> {
        match set {
            FreqSet::Lattice => lattice_points(dim, r),
            FreqSet::Bounded => (1..=(10.0 * r) as usize)
                .map(|n| {
                    let mut v = vec![0.0; dim];
                    v[0] = 1.0 - 1.0 / n as f64;
                    v
                })
                .collect(),
            FreqSet::Points => listed
                .iter()
                .filter(|x| x.iter().map(|v| v * v).sum::<f64>().sqrt() <= r)
                .cloned()
                .collect(),
        }
    };
    let r = frequency_condition_check(&generator, s, eps, r_max, steps, tol)?;
    let mut table = Table::new("freq_check", &["eps", "radius", "partial_sum"]);
    let rows: Vec<Value> = r
        .rows
        .iter()
        .map(|row| {
            for (rad, v) in &row.partial {
                table.push(vec![num(row.eps), num(*rad), num(*v)]);
            }
            json!({
                "eps": row.eps,
                "sum": row.partial.last().map(|p| jnum(p.1)),
                "tail_ratio": jnum(row.tail_ratio),
                "converged": row.converged,
            })
        })
        .collect();
    let set_name = match set {
        FreqSet::Lattice => "lattice",
        FreqSet::Bounded => "bounded",
        FreqSet::Points => "points",
    };
    Ok(Report::new(
        "freq-check",
        r.all_converged,
        json!({ "set": set_name, "dim": dim, "s": s, "r_max": r_max, "rows": rows }),
    )
    .with_table(table))
}

fn counterexample(s: &str, c: &str, n_list: &[u32], j_max: u32) -> CliResult<Report> {
    let s_q = parse_s(s)?;
    let s_f = s_q.to_f64().ok_or_else(|| CliError::Input(format!("bad s {s:?}")))?;
    if n_list.is_empty() {
        return Err(CliError::Input("--n-list is empty".into()));
    }
    let grid = SupGrid::default();
    let t = PsiDerivatives::new(&s_q, j_max)?;
    let c0 = c0_from_table(&t, grid)?;
    let c_used = if c.trim().eq_ignore_ascii_case("auto") {
        c0.c0_lb
    } else {
        match c.trim().parse::<f64>() {
            Ok(v) if v > 0.0 => v,
            _ => return Err(CliError::Input(format!("--C must be positive or auto, got {c:?}"))),
        }
    };
    let sups: Vec<f64> = (0..=t.j_max()).map(|j| t.sup_log(j, grid).0).collect();
    let mut table = Table::new("counterexample", &["n", "M_n", "j", "threshold", "in_regime"]);
    let mut ws = Vec::with_capacity(n_list.len());
    for &n in n_list {
        if n == 0 || n > apcalc_core::counterexample::MAX_BLOCK {
            return Err(CliError::Input(format!(
                "block index {n} outside 1..={}",
                apcalc_core::counterexample::MAX_BLOCK
            )));
        }
        let w = witness_from_sups(&sups, s_f, c_used, c0.c0_lb, n);
        table.push(vec![n.to_string(), num(w.m_n), w.j.to_string(), num(w.threshold), w.in_regime.to_string()]);
        ws.push(w);
    }
    let above = ws.iter().filter(|w| w.in_regime).all(|w| w.m_n > w.threshold);
    let slope = if ws.len() >= 2 {
        let (xs, ys): (Vec<f64>, Vec<f64>) = ws.iter().map(|w| ((w.n as f64).ln(), w.m_n.ln())).unzip();
        line_fit(&xs, &ys).map(|f| f.slope)
    } else {
        None
    };
    let growing = slope.is_none_or(|v| v >= 0.2);
    let per_j: Vec<Value> = c0.per_j.iter().map(|v| jnum(*v)).collect();
    let witnesses: Vec<Value> = ws
        .iter()
        .map(|w| json!({ "n": w.n, "m_n": jnum(w.m_n), "j": w.j, "threshold": w.threshold, "in_regime": w.in_regime }))
        .collect();
    Ok(Report::new(
        "counterexample",
        above && growing,
        json!({
            "s": s_q.to_string(),
            "j_max": j_max,
            "c0_lb": jnum(c0.c0_lb),
            "c0_per_j": per_j,
            "c_used": jnum(c_used),
            "witnesses": witnesses,
            "log_slope": slope.map(jnum),
            "verdict": if above && growing { "not Gevrey at this C" } else { "inconclusive" },
        }),
    )
    .with_table(table))
}

fn mean_json(e: &MeanEstimate) -> Value {
    json!({
        "estimate": { "re": e.estimate.re, "im": e.estimate.im },
        "error_indicator": jnum(e.error_indicator),
        "per_t": e.per_t.iter().map(|(t, v)| json!({ "t": t, "re": v.re, "im": v.im })).collect::<Vec<_>>(),
    })
}

fn mean_tp<C: CoeffIo>(ctx: &Ctx, path: &Path, xi: Option<&[String]>, sched: &MeanSchedule) -> CliResult<Report> {
    let f = load_tp::<C>(ctx, path)?;
    let width = f.dim() * f.basis().len();
    let freq = match xi {
        Some(v) => {
            if v.len() != width {
                return Err(CliError::Input(format!("--xi needs {width} rational coordinates")));
            }
            let coords = v
                .iter()
                .map(|t| parse_rational(t).ok_or_else(|| CliError::Input(format!("bad coordinate {t:?}"))))
                .collect::<CliResult<Vec<_>>>()?;
            Frequency::from_coords(coords)
        }
        None => Frequency::from_coords(vec![apcalc_core::Rational::from_integer(0.into()); width]),
    };
    let exact = f.bohr_coeff(&freq);
    let g = |x: &[f64]| f.eval(x);
    let est = numerical_bohr_coeff(&g, &freq.to_f64(f.dim(), f.basis()), sched)?;
    let err = (est.estimate - exact.to_c64()).norm();
    let allowed = est.error_indicator.max(1e-9) + 1e-9 * f.max_abs();
    Ok(Report::new(
        "mean",
        err <= allowed,
        json!({
            "xi": freq.coords().iter().map(ToString::to_string).collect::<Vec<_>>(),
            "exact": exact.write(),
            "numerical": mean_json(&est),
            "abs_error": jnum(err),
        }),
    ))
}

fn mean_partial_sum(s: &str, n: u32, sched: &MeanSchedule) -> CliResult<Report> {
    let t = PsiDerivatives::new(&parse_s(s)?, 0)?;
    if n == 0 || n > apcalc_core::counterexample::MAX_BLOCK {
        return Err(CliError::Input("--partial-sum out of range".into()));
    }
    let exact = f_partial_mean(&t, n);
    let f = |x: &[f64]| Complex64::new(f_partial(&t, n, x[0]), 0.0);
    let est = numerical_mean(&f, 1, sched)?;
    let err = (est.estimate.re - exact).abs() + est.estimate.im.abs();
    Ok(Report::new(
        "mean",
        err <= est.error_indicator.max(1e-3 * exact.abs()),
        json!({ "partial_sum": n, "exact": exact, "numerical": mean_json(&est), "abs_error": jnum(err) }),
    ))
}

fn solve_cmd<C: CoeffIo>(ctx: &Ctx, symbol: &Path, input: &Path, order: usize, h: &HypoArgs) -> CliResult<Report> {
    let p = load_symbol::<C>(ctx, symbol)?;
    let f = load_tp::<C>(ctx, input)?;
    let hp = hypo_params(&p, h)?;
    let opts = SolveOptions::new(order, hp);
    let sampler = SymbolSampler::standard(p.dim(), ctx.seed);
    match solve(&p, &f, &opts, &sampler)? {
        SolveOutcome::Refused(check) => Ok(Report::new(
            "solve",
            false,
            json!({ "refused": true, "reason": "symbol failed the hypoellipticity check", "check": aphs_json(&check) }),
        )),
        SolveOutcome::Solved(sol) => {
            let (u, exact) = ap_json(&sol.u)?;
            let names: Vec<String> = opts
                .sobolev_t
                .iter()
                .map(|t| format!("W2_t={t}"))
                .chain(opts.gevrey_eps.iter().map(|e| format!("W1_s={}_eps={e}", hp.s)))
                .collect();
            let mut table = Table::new("solve_residual", &["norm", "value"]);
            for (n, v) in names.iter().zip(&sol.residual.norms) {
                table.push(vec![n.clone(), num(*v)]);
            }
            Ok(Report::new(
                "solve",
                true,
                json!({
                    "refused": false,
                    "check": aphs_json(&sol.check),
                    "order": order,
                    "warnings": sol.parametrix.warnings,
                    "u_exact": exact,
                    "u": u,
                    "residual": {
                        "exact": sol.residual.exact,
                        "exact_zero": sol.residual.exact_zero,
                        "norms": names.iter().zip(&sol.residual.norms).map(|(n, v)| json!({ "norm": n, "value": jnum(*v) })).collect::<Vec<_>>(),
                    },
                    "u_fit": match &sol.fit {
                        Ok(f) => fit_json(f),
                        Err(e) => json!({ "error": e }),
                    },
                }),
            )
            .with_table(table))
        }
    }
}

fn residual<C: CoeffIo>(ctx: &Ctx, symbol: &Path, u_path: &Path, input: &Path, norms: &[NormParams]) -> CliResult<Report> {
    let a = load_symbol::<C>(ctx, symbol)?;
    let u = load_tp::<C>(ctx, u_path)?;
    let f = load_tp::<C>(ctx, input)?;
    let g = apply_any(&a, &u, &ApplyOptions::default())?;
    let r = residual_norms(&g, &f, norms)?;
    Ok(Report::new(
        "residual",
        true,
        json!({
            "exact": r.exact,
            "exact_zero": r.exact_zero,
            "norms": r.norms.iter().map(|v| jnum(*v)).collect::<Vec<_>>(),
            "residual": tp_value(&r.residual),
        }),
    ))
}
