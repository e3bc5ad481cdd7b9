use std::fs;
use std::path::Path;

use num_complex::Complex64 as C;
use periodlab::group_algebra::{
    build_eta_chi, check_unipotent_order, generator_decomposition, GroupPresentation, GroupRingElement,
};
use periodlab::l_functions::{fe_check, form_scale, hat_l_quadrature, hat_l_series};
use periodlab::lewis_transform::{f_from_form, grid_points, invert_bruggeman, lewis_point, summarize_grid, PeriodEvaluator};
use periodlab::maass_forms::{load_fixture, MaassFormData};
use periodlab::modular_group::{matrix_to_word, word_to_matrix, ProjectiveMatrix, Word};
use periodlab::representations::{Representation, RepresentationJson};
use periodlab::scalar::{cvec, GaussianRational, Matrix};
use periodlab::special_functions::on_cut;
use periodlab::transfer_operator::{continue_psi, TransferKind, TransferOperator};
use periodlab::zeta_asymptotics::{
    asymptotic_zeta_eta, predicted_error_power, zeta_eta, zeta_eta_direct, OperatorZetaConfig,
};
use periodlab::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::args::*;
use crate::output::{CliError, CliResult, Outcome, Table};

pub fn run(cmd: &Command, g: &Global) -> CliResult<Outcome> {
    match cmd {
        Command::Rep(RepCmd::Validate { path, q, samples }) => rep_validate(path, *q, *samples, g),
        Command::Maass(MaassCmd::Check { fixture, eta, points, h }) => maass_check(fixture, eta, *points, *h, g),
        Command::Lewis(a) => lewis(a, g),
        Command::Zeta(ZetaCmd::Eval { args, direct_terms }) => zeta_eval(args, *direct_terms, g),
        Command::Zeta(ZetaCmd::Asym { args, m }) => zeta_asym(args, *m, g),
        Command::Transfer(TransferCmd::Residual {
            fixture,
            eta,
            which,
            x,
            n_max,
            order,
            radius,
        }) => transfer_residual(fixture, eta, *which, x, *n_max, *order, *radius, g),
        Command::Transfer(TransferCmd::Continue { fixture, eta, z, n }) => transfer_continue(fixture, eta, z, *n, g),
        Command::Lfun(LfunCmd::Check { fixture, eta, s, quad }) => lfun_check(fixture, eta, s, quad, g),
        Command::Lfun(LfunCmd::Fe { fixture, eta, s, quad }) => lfun_fe(fixture, eta, s, quad, g),
        Command::Algebra(AlgebraCmd::Decompose { word }) => algebra_decompose(word),
        Command::Algebra(AlgebraCmd::Unipotent {
            chi,
            group,
            eta,
            q,
            samples,
        }) => algebra_unipotent(chi.as_deref(), group, eta, *q, *samples, g),
    }
}

fn config(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

fn parse_f64(s: &str) -> CliResult<f64> {
    s.trim().parse().map_err(|_| config(format!("not a number: {s:?}")))
}

/// `re` or `re,im`.
pub fn parse_complex(s: &str) -> CliResult<C> {
    let parts: Vec<&str> = s.split(',').collect();
    match parts.as_slice() {
        [re] => Ok(C::new(parse_f64(re)?, 0.0)),
        [re, im] => Ok(C::new(parse_f64(re)?, parse_f64(im)?)),
        _ => Err(config(format!("expected re or re,im, got {s:?}"))),
    }
}

fn parse_pair(s: &str) -> CliResult<(f64, f64)> {
    let z = parse_complex(s)?;
    if !s.contains(',') {
        return Err(config(format!("expected lo,hi, got {s:?}")));
    }
    Ok((z.re, z.im))
}

fn cx(z: C) -> [f64; 2] {
    [z.re, z.im]
}

fn vec_json(v: &[C]) -> Value {
    json!(v.iter().map(|z| cx(*z)).collect::<Vec<_>>())
}

fn matrix_json(m: &Matrix<C>) -> Value {
    json!(m.rows().iter().map(|r| r.iter().map(|z| cx(*z)).collect::<Vec<_>>()).collect::<Vec<_>>())
}

fn rng(g: &Global) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(g.seed)
}

fn load_eta(a: &EtaArgs) -> CliResult<Representation<C>> {
    match &a.eta_file {
        Some(p) => {
            let j: RepresentationJson = serde_json::from_str(&fs::read_to_string(p)?)?;
            Ok(Representation::from_json(&j)?)
        }
        None => Ok(Representation::preset(&a.eta)?),
    }
}

/// A path to a fixture file, or a bundled fixture name.
fn load_form(s: &str) -> CliResult<MaassFormData> {
    let p = Path::new(s);
    let form = if p.exists() { MaassFormData::load(p)? } else { load_fixture(s)? };
    if form.is_empty() {
        return Err(Error::Domain("empty coefficient list; not a cusp form fixture".into()).into());
    }
    Ok(form)
}

fn psi_header(prefix: &str, dim: usize) -> Vec<String> {
    (0..dim)
        .flat_map(|j| [format!("{prefix}_{j}_re"), format!("{prefix}_{j}_im")])
        .collect()
}

fn push_vec(row: &mut Vec<f64>, v: &[C]) {
    for z in v {
        row.push(z.re);
        row.push(z.im);
    }
}

fn rep_validate(path: &Path, q: Option<usize>, samples: usize, g: &Global) -> CliResult<Outcome> {
    let j: RepresentationJson = serde_json::from_str(&fs::read_to_string(path)?)?;
    let r = Representation::from_json(&j)?;
    let tol = g.tol.unwrap_or(r.default_tol());
    let relations = r.validate(tol);
    let conj = ["S", "TS", "ST", "StST"]
        .iter()
        .map(|w| w.parse::<Word>())
        .collect::<periodlab::Result<Vec<_>>>()?;
    let parabolic = r.parabolic_triviality_check(&[1, 2, -1, 3], &conj, tol);
    let unipotent = q.map(|q| check_unipotent_order(&r, q, samples, tol, &mut rng(g)));
    let pass = relations.pass && parabolic.pass && unipotent.as_ref().map_or(true, |u| u.pass);
    let mut o = Outcome::new(
        pass,
        json!({ "relations": relations, "parabolic": parabolic, "unipotent": unipotent }),
    );
    o = o.line(format!(
        "relations: {} (S^2 {:e}, (ST)^3 {:e}, T^N {:e})",
        verdict(relations.pass),
        relations.s_squared,
        relations.st_cubed,
        relations.t_to_n
    ));
    if !relations.failed.is_empty() {
        o = o.line(format!("failed relations: {}", relations.failed.join(", ")));
    }
    o = o.line(format!(
        "parabolic triviality: {} (deviation {:e})",
        verdict(parabolic.pass),
        parabolic.power_deviation.max(parabolic.conjugate_deviation)
    ));
    if let Some(u) = &unipotent {
        o = o.line(format!("unipotent order q = {}: {} (max norm {:e})", u.q, verdict(u.pass), u.max_norm));
    }
    Ok(o)
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "pass"
    } else {
        "FAIL"
    }
}

fn maass_check(fixture: &str, eta: &EtaArgs, points: usize, h: f64, g: &Global) -> CliResult<Outcome> {
    let form = load_form(fixture)?;
    let eta = load_eta(eta)?;
    let tol = g.tol.unwrap_or(1e-5);
    let mut r = rng(g);
    let zs: Vec<C> = (0..points)
        .map(|_| C::new(r.gen_range(-0.5..0.5), r.gen_range(0.9..1.6)))
        .collect();
    let mut scale = form_scale(&form)?;
    for z in &zs {
        scale = scale.max(cvec::norm(&form.u(*z)?));
    }
    // residual = c h^2 + O(h^4) for an eigenfunction; the extrapolated
    // combination isolates the h-independent part
    let laplace = zs
        .par_iter()
        .map(|z| Ok((form.laplace_residual(*z, h)?, form.laplace_residual(*z, h / 2.0)?)))
        .collect::<periodlab::Result<Vec<(f64, f64)>>>()?;
    let raw_max = laplace.iter().map(|r| r.1).fold(0.0, f64::max) / scale;
    let laplace_max = laplace.iter().map(|(a, b)| ((4.0 * b - a) / 3.0).abs()).fold(0.0, f64::max) / scale;
    let s_res = form.automorphy_residual(&eta, &ProjectiveMatrix::s(), &zs)? / scale;
    let t_res = form.automorphy_residual(&eta, &ProjectiveMatrix::t(), &zs)? / scale;
    let pass = laplace_max <= tol && s_res <= tol && t_res <= tol;
    Ok(Outcome::new(
        pass,
        json!({
            "scale": scale,
            "h": h,
            "points": zs.iter().map(|z| cx(*z)).collect::<Vec<_>>(),
            "laplace_relative": raw_max,
            "laplace_extrapolated": laplace_max,
            "automorphy_s_relative": s_res,
            "automorphy_t_relative": t_res,
            "est_accuracy": form.est_accuracy,
            "tol": tol,
        }),
    )
    .line(format!("laplace residual (relative, h = {}): {raw_max:e}, extrapolated {laplace_max:e}", h / 2.0))
    .line(format!("automorphy under S: {s_res:e}"))
    .line(format!("automorphy under T: {t_res:e}")))
}

fn lewis(a: &LewisArgs, g: &Global) -> CliResult<Outcome> {
    let mut form = load_form(&a.fixture)?;
    if let Some(nu) = &a.nu {
        form = form.with_nu(parse_complex(nu)?);
    }
    let nu = form.nu;
    let eta = load_eta(&a.eta)?;
    let re = parse_pair(&a.re)?;
    let default_im = if a.pipeline == Pipeline::Roundtrip { "0.2,1" } else { "-1,1" };
    let im = parse_pair(a.im.as_deref().unwrap_or(default_im))?;
    if a.n == 0 {
        return Err(config("--n must be positive"));
    }
    let zs = grid_points(re, im, a.n);
    for &z in &zs {
        let bad = match a.pipeline {
            Pipeline::Roundtrip => z.im == 0.0,
            _ => [z, z + 1.0, z / (z + 1.0)].into_iter().any(on_cut),
        };
        if bad {
            return Err(config(format!("grid point {z} is not admissible for this pipeline")));
        }
    }
    let tol = g.tol.unwrap_or(1e-5);
    let psi = PeriodEvaluator::from_form(&form, &eta)?;
    let dim = psi.dim();
    let mut header = vec!["re_z".to_string(), "im_z".to_string()];
    header.extend(psi_header("psi", dim));
    match a.pipeline {
        Pipeline::Transform => {
            header.push("error_estimate".into());
            let evals = zs.par_iter().map(|z| psi.eval(*z)).collect::<periodlab::Result<Vec<_>>>()?;
            let mut t = Table::new(header);
            let mut worst: f64 = 0.0;
            for (z, e) in zs.iter().zip(&evals) {
                let mut row = vec![z.re, z.im];
                push_vec(&mut row, &e.value);
                row.push(e.tail);
                t.rows.push(row);
                worst = worst.max(e.tail / cvec::norm(&e.value).max(1.0));
            }
            Ok(Outcome::new(worst <= tol, json!({ "nu": cx(nu), "max_relative_error": worst, "tol": tol }))
                .line(format!("{} points, max relative error estimate {worst:e}", zs.len()))
                .with_table(t))
        }
        Pipeline::Residual => {
            header.extend(["residual_norm", "relative_residual", "error_estimate"].map(String::from));
            let points = zs
                .par_iter()
                .map(|z| lewis_point(&psi, &eta, nu, *z))
                .collect::<periodlab::Result<Vec<_>>>()?;
            let grid = summarize_grid(points);
            let mut t = Table::new(header);
            for p in &grid.points {
                let mut row = vec![p.z.re, p.z.im];
                push_vec(&mut row, &p.psi);
                row.extend([p.norm, p.relative(), p.error]);
                t.rows.push(row);
            }
            Ok(Outcome::new(
                grid.max_rel <= tol,
                json!({ "nu": cx(nu), "max_abs": grid.max_abs, "max_rel": grid.max_rel, "tol": tol }),
            )
            .line(format!(
                "{} points, max Lewis residual {:e} (relative {:e})",
                grid.points.len(),
                grid.max_abs,
                grid.max_rel
            ))
            .with_table(t))
        }
        Pipeline::Roundtrip => {
            let f = f_from_form(&form)?;
            header.extend(["deviation", "relative_deviation"].map(String::from));
            let rows = zs
                .par_iter()
                .map(|&z| -> periodlab::Result<(Vec<C>, f64, f64)> {
                    let fv = f.value(z)?;
                    let back = invert_bruggeman(&psi, &eta, nu, z)?;
                    Ok((psi.value(z)?, cvec::dist(&fv, &back), cvec::norm(&fv)))
                })
                .collect::<periodlab::Result<Vec<_>>>()?;
            let f_max = rows.iter().map(|r| r.2).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
            let mut t = Table::new(header);
            let mut worst: f64 = 0.0;
            for (z, (p, dev, _)) in zs.iter().zip(&rows) {
                let mut row = vec![z.re, z.im];
                push_vec(&mut row, p);
                row.extend([*dev, dev / f_max]);
                t.rows.push(row);
                worst = worst.max(dev / f_max);
            }
            Ok(Outcome::new(worst <= tol, json!({ "nu": cx(nu), "max_relative_deviation": worst, "tol": tol }))
                .line(format!("{} points, max |invert(psi) - f| / max |f| = {worst:e}", zs.len()))
                .with_table(t))
        }
    }
}

fn zeta_config(a: &ZetaArgs) -> CliResult<(OperatorZetaConfig, C)> {
    let eta = load_eta(&a.eta)?;
    let s = parse_complex(&a.a)?;
    let x = parse_complex(&a.x)?;
    Ok((OperatorZetaConfig::new(&eta, s).primed(a.primed), x))
}

fn zeta_eval(a: &ZetaArgs, direct_terms: Option<usize>, g: &Global) -> CliResult<Outcome> {
    let (cfg, x) = zeta_config(a)?;
    let value = zeta_eta(&cfg, x)?;
    let mut report = json!({ "a": cx(cfg.a), "x": cx(x), "primed": cfg.primed, "value": matrix_json(&value) });
    let mut o_pass = true;
    let mut lines = vec![format!("zeta_eta({}, {}) = {}", cfg.a, x, matrix_json(&value))];
    if let Some(terms) = direct_terms {
        let tol = g.tol.unwrap_or(1e-8);
        let (direct, bound) = zeta_eta_direct(&cfg, x, terms)?;
        let diff = value.sub(&direct).max_abs();
        report["direct"] = json!({ "terms": terms, "value": matrix_json(&direct), "tail_bound": bound, "difference": diff, "tol": tol });
        o_pass = diff <= tol;
        lines.push(format!("direct series ({terms} terms): difference {diff:e}"));
    }
    let mut o = Outcome::new(o_pass, report);
    o.summary = lines;
    Ok(o)
}

fn zeta_asym(a: &ZetaArgs, m: usize, g: &Global) -> CliResult<Outcome> {
    let (cfg, x) = zeta_config(a)?;
    let tol = g.tol.unwrap_or(1e-10);
    let (approx, next_term) = asymptotic_zeta_eta(&cfg, x, m)?;
    let exact = zeta_eta(&cfg, x)?;
    let diff = approx.sub(&exact).max_abs();
    let power = predicted_error_power(&cfg, m);
    Ok(Outcome::new(
        diff <= tol,
        json!({
            "a": cx(cfg.a),
            "x": cx(x),
            "m": m,
            "expansion": matrix_json(&approx),
            "closed_form": matrix_json(&exact),
            "difference": diff,
            "next_term": next_term,
            "predicted_error_power": power,
            "tol": tol,
        }),
    )
    .line(format!("M = {m}: |expansion - closed form| = {diff:e}, next term {next_term:e}"))
    .line(format!("predicted error ~ x^{power}")))
}

fn kind(w: Which) -> TransferKind {
    match w {
        Which::L0 => TransferKind::L0,
        Which::Linf => TransferKind::Linf,
        Which::LinfRemark => TransferKind::LinfRemark,
    }
}

#[allow(clippy::too_many_arguments)]
fn transfer_residual(
    fixture: &str,
    eta: &EtaArgs,
    which: Which,
    xs: &str,
    n_max: usize,
    order: usize,
    radius: f64,
    g: &Global,
) -> CliResult<Outcome> {
    let form = load_form(fixture)?;
    let eta = load_eta(eta)?;
    let xs = xs.split(',').map(parse_f64).collect::<CliResult<Vec<_>>>()?;
    if let Some(x) = xs.iter().find(|x| !(**x > 0.0)) {
        return Err(config(format!("transfer residuals need x > 0, got {x}")));
    }
    let tol = g.tol.unwrap_or(1e-4);
    let psi = PeriodEvaluator::from_form(&form, &eta)?;
    let op = TransferOperator::new(&psi, order, radius)?;
    let rows = xs
        .par_iter()
        .map(|&x| op.residual(x, n_max, kind(which)))
        .collect::<periodlab::Result<Vec<_>>>()?;
    let mut t = Table::new(["x", "residual_norm", "tail_estimate", "n_max"].map(String::from).to_vec());
    for r in &rows {
        t.rows.push(vec![r.x, r.residual_norm, r.tail_estimate, r.n_max as f64]);
    }
    let worst = rows.iter().map(|r| r.residual_norm).fold(0.0, f64::max);
    Ok(Outcome::new(worst <= tol, json!({ "which": format!("{which:?}"), "max_residual": worst, "tol": tol }))
        .line(format!("{which:?}: max residual {worst:e} over {} points", rows.len()))
        .with_table(t))
}

fn transfer_continue(fixture: &str, eta: &EtaArgs, z: &str, n: usize, g: &Global) -> CliResult<Outcome> {
    let form = load_form(fixture)?;
    let eta = load_eta(eta)?;
    let z = parse_complex(z)?;
    let tol = g.tol.unwrap_or(1e-6);
    let psi = PeriodEvaluator::from_form(&form, &eta)?;
    let cont = continue_psi(&psi, &eta, form.nu, z, n)?;
    let direct = psi.value(z)?;
    let dev = cvec::dist(&cont, &direct);
    let rel = dev / cvec::norm(&direct).max(1.0);
    Ok(Outcome::new(
        rel <= tol,
        json!({
            "z": cx(z),
            "n": n,
            "continued": vec_json(&cont),
            "direct": vec_json(&direct),
            "deviation": dev,
            "relative_deviation": rel,
            "tol": tol,
        }),
    )
    .line(format!("continuation with n = {n} at {z}: deviation {dev:e} (relative {rel:e})")))
}

fn parities(p: Parity) -> Vec<u8> {
    match p {
        Parity::Even => vec![0],
        Parity::Odd => vec![1],
        Parity::Both => vec![0, 1],
    }
}

fn lfun_check(fixture: &str, eta: &EtaArgs, s: &str, q: &QuadArgs, g: &Global) -> CliResult<Outcome> {
    let form = load_form(fixture)?;
    let eta = load_eta(eta)?;
    let s = parse_complex(s)?;
    let tol = g.tol.unwrap_or(1e-6);
    let scale0 = form_scale(&form)?;
    let mut t = Table::new(
        ["eps", "difference", "scale", "relative", "series_error", "quadrature_error"]
            .map(String::from)
            .to_vec(),
    );
    let mut worst: f64 = 0.0;
    for eps in parities(q.eps) {
        let a = hat_l_series(&form, s, eps, f64::INFINITY)?;
        let b = hat_l_quadrature(&form, &eta, s, eps, q.y_min.unwrap_or(1e-4), q.y_max)?;
        let scale = cvec::norm(&a.value).max(scale0);
        let d = cvec::dist(&a.value, &b.value);
        let rel = d / scale;
        worst = worst.max(rel);
        t.rows.push(vec![eps as f64, d, scale, rel, a.error_estimate, b.error_estimate]);
    }
    Ok(Outcome::new(worst <= tol, json!({ "s": cx(s), "max_relative": worst, "tol": tol }))
        .line(format!("series vs quadrature at s = {s}: max relative difference {worst:e}"))
        .with_table(t))
}

fn lfun_fe(fixture: &str, eta: &EtaArgs, s: &str, q: &QuadArgs, g: &Global) -> CliResult<Outcome> {
    let form = load_form(fixture)?;
    let eta = load_eta(eta)?;
    let points = s.split(';').map(parse_complex).collect::<CliResult<Vec<_>>>()?;
    let tol = g.tol.unwrap_or(1e-6);
    let jobs: Vec<(C, u8)> = points
        .iter()
        .flat_map(|&s| parities(q.eps).into_iter().map(move |e| (s, e)))
        .collect();
    let reports = jobs
        .par_iter()
        .map(|&(s, eps)| fe_check(&form, &eta, s, eps, q.y_min.unwrap_or(0.3), q.y_max))
        .collect::<periodlab::Result<Vec<_>>>()?;
    let mut t = Table::new(
        ["s_re", "s_im", "eps", "fe_residual", "scale", "relative", "error_estimate"]
            .map(String::from)
            .to_vec(),
    );
    let mut worst: f64 = 0.0;
    for r in &reports {
        let res = r.fe_residual.unwrap_or(f64::NAN);
        let rel = res / r.scale;
        worst = worst.max(rel);
        t.rows.push(vec![r.s[0], r.s[1], r.eps as f64, res, r.scale, rel, r.error_estimate]);
    }
    Ok(Outcome::new(worst <= tol, json!({ "reports": reports, "max_relative": worst, "tol": tol }))
        .line(format!("functional equation at {} points: max relative residual {worst:e}", reports.len()))
        .with_table(t))
}

fn algebra_decompose(word: &str) -> CliResult<Outcome> {
    let w: Word = word.parse()?;
    let gamma = word_to_matrix(&w);
    let d = generator_decomposition::<ProjectiveMatrix, GaussianRational>(&gamma);
    let ok = d.reconstruct() == GroupRingElement::minus_one(gamma.clone());
    let summands: Vec<Value> = d
        .summands
        .iter()
        .map(|(x, s)| json!({ "generator": format!("{s:?}"), "coefficient": x.to_json() }))
        .collect();
    let mut o = Outcome::new(
        ok,
        json!({
            "word": w.to_string(),
            "matrix": gamma.to_json(),
            "normal_form": matrix_to_word(&gamma).to_string(),
            "summands": summands,
            "reconstruction": ok,
        }),
    )
    .line(format!("{} = {}", w, gamma));
    for (x, s) in &d.summands {
        o = o.line(format!("x_{s:?} has {} terms", x.len()));
    }
    Ok(o.line(format!("reconstruction: {}", verdict(ok))))
}

fn parse_rational(s: &str) -> CliResult<GaussianRational> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((p, q)) => (p, q),
        None => (s, "1"),
    };
    let p: i64 = num.trim().parse().map_err(|_| config(format!("bad rational {s:?}")))?;
    let q: i64 = den.trim().parse().map_err(|_| config(format!("bad rational {s:?}")))?;
    if q == 0 {
        return Err(config(format!("zero denominator in {s:?}")));
    }
    Ok(GaussianRational::from_ratio(p, q))
}

fn parse_group(s: &str) -> CliResult<GroupPresentation> {
    if s == "modular" {
        return Ok(GroupPresentation::modular());
    }
    match s.strip_prefix("free:").map(|n| n.parse::<usize>()) {
        Some(Ok(n)) if n > 0 => Ok(GroupPresentation::free(n)),
        _ => Err(config(format!("unknown group {s:?}; use modular or free:n"))),
    }
}

fn algebra_unipotent(
    chi: Option<&str>,
    group: &str,
    eta: &EtaArgs,
    q: usize,
    samples: usize,
    g: &Global,
) -> CliResult<Outcome> {
    let tol = g.tol.unwrap_or(1e-12);
    let report = match chi {
        Some(chi) => {
            let group = parse_group(group)?;
            let values = chi.split(',').map(parse_rational).collect::<CliResult<Vec<_>>>()?;
            let rep = build_eta_chi(&group, &values)?;
            check_unipotent_order(&rep, q, samples, tol, &mut rng(g))
        }
        None => check_unipotent_order(&load_eta(eta)?, q, samples, tol, &mut rng(g)),
    };
    Ok(Outcome::new(report.pass, json!({ "unipotent": report }))
        .line(format!(
            "I^{} killed: {} (sampled max norm {:e}, exact {:?})",
            report.q + 1,
            verdict(report.pass),
            report.max_norm,
            report.exact
        )))
}
