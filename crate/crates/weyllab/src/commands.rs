//! One runner per command: typed parameters from an [`ExperimentConfig`],
//! parallel evaluation, and a [`Report`] in human, tabular and JSON form.

use serde_json::Value;
use weyllab_core::admissibility::{check_direction, grid_directions, report_from};
use weyllab_core::asymptotics::{
    check_critical, check_log_cutoffs, check_pairs, describe_fit, green_fit_report, limit_kernel, log_law_report,
    model_g_constant, pair_distance, rescaled_kernel,
};
use weyllab_core::levelset::TestFunction;
use weyllab_core::oscillatory::DecayProbe;
use weyllab_core::spectra::{default_resolution, kernel_weighted, PowerWeight, SpectralWeight};
use weyllab_core::{
    build_quadrature, decay_slope, dirichlet_kernel, enumerate_band, j_probe, verify_disintegration, weyl_count,
    AdmissibilityReport, Complex64, FitReport, HomogeneousSymbol, KernelRequest, Model,
};

use crate::config::{Command, ExperimentConfig};
use crate::error::{Blame, CliError, CliResult};
use crate::format::{human, human_sig, json_num, json_nums, object, Cell, Table};
use crate::literal::{format_symbol, parse_symbol};
use crate::parallel;

/// Result of a command in every output form.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    /// Human summary, six significant digits.
    pub summary: String,
    pub table: Table,
    pub json: Value,
}

/// Typed view of a config's parameters with defaults applied.
#[derive(Debug, Clone, Copy)]
pub struct Params<'a> {
    config: &'a ExperimentConfig,
}

impl<'a> Params<'a> {
    pub fn new(config: &'a ExperimentConfig) -> Self {
        Params { config }
    }

    pub fn raw(&self, key: &str) -> Option<&'a str> {
        let config = self.config;
        config.get(key).or_else(|| config.command().param(key).and_then(|s| s.default))
    }

    pub fn required(&self, key: &str) -> CliResult<&'a str> {
        self.raw(key).ok_or_else(|| CliError::invalid(key, "missing required parameter"))
    }

    pub fn f64(&self, key: &str) -> CliResult<f64> {
        parse_f64(key, self.required(key)?)
    }

    pub fn opt_f64(&self, key: &str) -> CliResult<Option<f64>> {
        self.raw(key).map(|v| parse_f64(key, v)).transpose()
    }

    pub fn usize(&self, key: &str) -> CliResult<usize> {
        let v = self.required(key)?;
        v.trim().parse().map_err(|_| CliError::invalid(key, format!("`{v}` is not a non-negative integer")))
    }

    pub fn vector(&self, key: &str) -> CliResult<Vec<f64>> {
        parse_vector(key, self.required(key)?)
    }

    pub fn opt_vector(&self, key: &str) -> CliResult<Option<Vec<f64>>> {
        self.raw(key).map(|v| parse_vector(key, v)).transpose()
    }

    /// Multi-index of length `dim`; zeros when absent.
    pub fn multi_index(&self, key: &str, dim: usize) -> CliResult<Vec<u32>> {
        let Some(v) = self.raw(key) else {
            return Ok(vec![0; dim]);
        };
        let idx: Vec<u32> = v
            .split(',')
            .map(|p| p.trim().parse::<u32>())
            .collect::<Result<_, _>>()
            .map_err(|_| CliError::invalid(key, format!("`{v}` is not a comma list of non-negative integers")))?;
        check_len(key, &idx, dim)?;
        Ok(idx)
    }

    pub fn symbol(&self) -> CliResult<HomogeneousSymbol> {
        parse_symbol(self.required("symbol")?)
    }

    pub fn model(&self) -> CliResult<Model> {
        match self.raw("model").unwrap_or("torus") {
            "torus" => Ok(Model::Torus(self.symbol()?)),
            "dirichlet" => {
                if self.config.get("symbol").is_some() {
                    return Err(CliError::invalid("symbol", "the dirichlet model has a fixed symbol"));
                }
                Ok(Model::Dirichlet)
            }
            other => Err(CliError::invalid("model", format!("expected torus or dirichlet, got `{other}`"))),
        }
    }

    pub fn cutoffs(&self, key: &str) -> CliResult<Vec<f64>> {
        parse_cutoffs(key, self.required(key)?)
    }

    pub fn opt_cutoffs(&self, key: &str) -> CliResult<Option<Vec<f64>>> {
        self.raw(key).map(|v| parse_cutoffs(key, v)).transpose()
    }
}

fn check_len<T>(key: &str, v: &[T], dim: usize) -> CliResult<()> {
    if v.len() != dim {
        return Err(CliError::invalid(key, format!("expected {dim} components, got {}", v.len())));
    }
    Ok(())
}

pub fn parse_f64(key: &str, v: &str) -> CliResult<f64> {
    let x: f64 = v.trim().parse().map_err(|_| CliError::invalid(key, format!("`{v}` is not a number")))?;
    if !x.is_finite() {
        return Err(CliError::invalid(key, "must be finite"));
    }
    Ok(x)
}

pub fn parse_vector(key: &str, v: &str) -> CliResult<Vec<f64>> {
    v.split(',').map(|p| parse_f64(key, p)).collect()
}

/// `lo:hi:count` (geometric, endpoints included), `dyadic:lo:hi`
/// (`lo 2^j` below `hi`, then `hi`) or an explicit comma list.
pub fn parse_cutoffs(key: &str, v: &str) -> CliResult<Vec<f64>> {
    let parts: Vec<&str> = v.split(':').map(str::trim).collect();
    let list = match parts.as_slice() {
        ["dyadic", lo, hi] => {
            let (lo, hi) = (parse_f64(key, lo)?, parse_f64(key, hi)?);
            if !(lo > 0.0 && hi > lo) {
                return Err(CliError::invalid(key, "dyadic list needs 0 < lo < hi"));
            }
            dyadic(lo, hi)
        }
        [lo, hi, count] => {
            let (lo, hi) = (parse_f64(key, lo)?, parse_f64(key, hi)?);
            let count: usize =
                count.parse().map_err(|_| CliError::invalid(key, format!("`{count}` is not a count")))?;
            if !(lo > 0.0 && hi > lo && count >= 2) {
                return Err(CliError::invalid(key, "geometric list needs 0 < lo < hi and count >= 2"));
            }
            geometric(lo, hi, count)
        }
        [single] => parse_vector(key, single)?,
        _ => return Err(CliError::invalid(key, format!("cannot parse cutoff list `{v}`"))),
    };
    if list.iter().any(|l| !(*l > 0.0)) {
        return Err(CliError::invalid(key, "cutoffs must be positive"));
    }
    Ok(list)
}

/// `lo, 2 lo, 4 lo, ...` while below `hi`, then `hi`.
pub fn dyadic(lo: f64, hi: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let mut l = lo;
    while l < hi * (1.0 - 1e-12) {
        out.push(l);
        l *= 2.0;
    }
    out.push(hi);
    out
}

/// `count` points from `lo` to `hi` in geometric progression.
pub fn geometric(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    let mut out: Vec<f64> = (0..count).map(|i| lo * (hi / lo).powf(i as f64 / (count - 1) as f64)).collect();
    out[count - 1] = hi;
    out
}

/// Runs the configured command.
pub fn run(config: &ExperimentConfig) -> CliResult<Report> {
    let p = Params::new(config);
    match config.command() {
        Command::Weyl => weyl(p),
        Command::Kernel => kernel(p),
        Command::RescaleScan => rescale_scan(p),
        Command::LogFit => log_fit(p),
        Command::GreenFit => green_fit(p),
        Command::LimitKernel => limit(p),
        Command::OscDecay => osc_decay(p),
        Command::Admissible => admissible(p),
        Command::Disintegration => disintegration(p),
        Command::LinkCheck => link_check(p),
    }
}

fn model_label(model: &Model) -> String {
    match model {
        Model::Torus(sym) => format!("torus {}", format_symbol(sym)),
        Model::Dirichlet => "dirichlet".to_owned(),
    }
}

fn fit_json(fit: &FitReport) -> [(&'static str, Value); 4] {
    [
        ("slope", json_num(fit.slope)),
        ("intercept", json_num(fit.intercept)),
        ("max_abs_residual", json_num(fit.max_abs_residual)),
        ("sample_count", Value::from(fit.sample_count)),
    ]
}

fn weyl(p: Params) -> CliResult<Report> {
    let sym = p.symbol()?;
    let cutoff = p.f64("L")?;
    let w = weyl_count(&sym, cutoff).blame("L")?;
    let rel = w.relative_error();
    let mut table = Table::new(&["L", "count", "prediction", "rel_err"]);
    table.push(vec![cutoff.into(), w.count.into(), w.prediction.into(), rel.into()]);
    Ok(Report {
        summary: format!("count={} prediction={} rel_err={}", w.count, human(w.prediction), human_sig(rel, 3)),
        table,
        json: object([
            ("command", Value::from("weyl")),
            ("symbol", Value::from(format_symbol(&sym))),
            ("L", json_num(cutoff)),
            ("count", Value::from(w.count)),
            ("prediction", json_num(w.prediction)),
            ("rel_err", json_num(rel)),
        ]),
    })
}

fn complex_report(label: &str, v: Complex64, extra: Vec<(&'static str, Value)>) -> Report {
    let mut table = Table::new(&["re", "im", "abs"]);
    table.push(vec![v.re.into(), v.im.into(), v.norm().into()]);
    let mut fields = vec![("command", Value::from(label))];
    fields.extend(extra);
    fields.extend([("re", json_num(v.re)), ("im", json_num(v.im)), ("abs", json_num(v.norm()))]);
    Report {
        summary: format!("re={} im={} abs={}", human(v.re), human(v.im), human(v.norm())),
        table,
        json: object(fields),
    }
}

fn kernel(p: Params) -> CliResult<Report> {
    let model = p.model()?;
    let cutoff = p.f64("L")?;
    let s = p.f64("s")?;
    let s_im = p.f64("s-im")?;
    let n = model.dim();
    let x = p.vector("x")?;
    let y = p.vector("y")?;
    check_len("x", &x, n)?;
    check_len("y", &y, n)?;
    let alpha = p.multi_index("alpha", n)?;
    let beta = p.multi_index("beta", n)?;
    let (value, modes) = match &model {
        Model::Torus(sym) => {
            let band = enumerate_band(sym, cutoff).blame("L")?;
            let req = KernelRequest::weighted(s, x.clone(), y.clone(), cutoff)
                .with_exponent(Complex64::new(-s, -s_im))
                .with_derivatives(alpha, beta);
            (parallel::torus_kernel(&req, &band).blame("L")?, band.len())
        }
        Model::Dirichlet => {
            if s_im != 0.0 || alpha.iter().chain(&beta).any(|a| *a != 0) {
                return Err(CliError::invalid("model", "the dirichlet kernel takes real s and no derivatives"));
            }
            let v = dirichlet_kernel(s, cutoff, x[0], y[0]).blame("x")?;
            (Complex64::new(v, 0.0), cutoff.sqrt().floor() as usize)
        }
    };
    Ok(complex_report(
        "kernel",
        value,
        vec![
            ("model", Value::from(model_label(&model))),
            ("L", json_num(cutoff)),
            ("s", json_num(s)),
            ("s_im", json_num(s_im)),
            ("x", json_nums(&x)),
            ("y", json_nums(&y)),
            ("modes", Value::from(modes)),
        ],
    ))
}

/// Square grid of spacing `step` inside the closed disk of radius `radius`.
pub fn offset_grid(dim: usize, radius: f64, step: f64) -> CliResult<Vec<Vec<f64>>> {
    if !(radius >= 0.0 && step > 0.0) {
        return Err(CliError::invalid("h-step", "need h-max >= 0 and h-step > 0"));
    }
    let k = (radius / step + 1e-9).floor() as i64;
    let side: Vec<f64> = (-k..=k).map(|i| i as f64 * step).collect();
    let mut points = vec![Vec::new()];
    for _ in 0..dim {
        points = points.into_iter().flat_map(|p| side.iter().map(move |c| [p.as_slice(), &[*c]].concat())).collect();
    }
    points.retain(|p| p.iter().map(|c| c * c).sum::<f64>().sqrt() <= radius * (1.0 + 1e-12));
    Ok(points)
}

/// Fixed inputs of a rescale scan; each cutoff gives one row.
#[derive(Debug, Clone, Copy)]
pub struct Scan<'a> {
    pub sym: &'a HomogeneousSymbol,
    pub s: f64,
    pub alpha: &'a [u32],
    pub beta: &'a [u32],
    pub base: &'a [f64],
    pub offsets: &'a [Vec<f64>],
    /// Limit kernel at each offset.
    pub limits: &'a [Complex64],
}

impl Scan<'_> {
    /// `(sup error, index of the worst offset)` at `cutoff`.
    pub fn row(&self, cutoff: f64) -> CliResult<(f64, usize)> {
        let band = enumerate_band(self.sym, cutoff).blame("L-list")?;
        let values = parallel::try_map(self.offsets, |h| {
            rescaled_kernel(self.sym, self.s, self.alpha, self.beta, self.base, h, &band)
        })
        .blame("L-list")?;
        let mut best = (0.0, 0);
        for (j, (value, limit)) in values.iter().zip(self.limits).enumerate() {
            let err = (value - limit).norm();
            if err > best.0 {
                best = (err, j);
            }
        }
        Ok(best)
    }
}

fn rescale_scan(p: Params) -> CliResult<Report> {
    let sym = p.symbol()?;
    let n = sym.dim();
    let s = p.f64("s")?;
    let alpha = p.multi_index("alpha", n)?;
    let beta = p.multi_index("beta", n)?;
    let base = p.opt_vector("w")?.unwrap_or_else(|| vec![0.0; n]);
    check_len("w", &base, n)?;
    let offsets = offset_grid(n, p.f64("h-max")?, p.f64("h-step")?)?;
    let cutoffs = p.cutoffs("L-list")?;
    let quad = build_quadrature(&sym, p.usize("resolution")?).blame("resolution")?;
    let limits = parallel::try_map(&offsets, |h| limit_kernel(&sym, s, &alpha, &beta, h, &quad)).blame("s")?;

    let scan = Scan { sym: &sym, s, alpha: &alpha, beta: &beta, base: &base, offsets: &offsets, limits: &limits };
    let mut header = vec!["L".to_owned(), "sup_error".to_owned()];
    header.extend((1..=n).map(|i| format!("worst_h{i}")));
    let mut table = Table::new(&header);
    let mut rows = Vec::new();
    let mut summary = Vec::new();
    for &cutoff in &cutoffs {
        let (err, at) = scan.row(cutoff)?;
        let mut row = vec![Cell::from(cutoff), Cell::from(err)];
        row.extend(offsets[at].iter().map(|c| Cell::from(*c)));
        table.push(row);
        summary.push(format!("L={} sup_error={}", human(cutoff), human(err)));
        rows.push(object([
            ("L", json_num(cutoff)),
            ("sup_error", json_num(err)),
            ("worst_h", json_nums(&offsets[at])),
        ]));
    }
    Ok(Report {
        summary: summary.join("\n"),
        table,
        json: object([
            ("command", Value::from("rescale-scan")),
            ("symbol", Value::from(format_symbol(&sym))),
            ("s", json_num(s)),
            ("offsets", Value::from(offsets.len())),
            ("rows", Value::Array(rows)),
        ]),
    })
}

/// `K_L^s(x, x)` with the torus reduction spread over the pool.
pub fn diagonal_value(model: &Model, s: f64, x: &[f64], cutoff: f64) -> weyllab_core::Result<f64> {
    match model {
        Model::Torus(sym) => {
            let band = enumerate_band(sym, cutoff)?;
            Ok(parallel::torus_kernel(&KernelRequest::weighted(s, x.to_vec(), x.to_vec(), cutoff), &band)?.re)
        }
        Model::Dirichlet => {
            if x.len() != 1 {
                return Err(weyllab_core::Error::DimensionMismatch { expected: 1, found: x.len() });
            }
            dirichlet_kernel(s, cutoff, x[0], x[0])
        }
    }
}

fn log_fit(p: Params) -> CliResult<Report> {
    let model = p.model()?;
    let s = p.f64("s")?;
    let x = p.vector("x")?;
    check_len("x", &x, model.dim())?;
    let cutoffs = p.cutoffs("L-list")?;
    check_critical(&model, s).blame("s")?;
    check_log_cutoffs(&cutoffs).blame("L-list")?;
    let values = cutoffs.iter().map(|&l| diagonal_value(&model, s, &x, l)).collect::<Result<Vec<_>, _>>().blame("x")?;
    let report = log_law_report(&model, cutoffs.iter().copied().zip(values).collect()).blame("L-list")?;

    let mut table = Table::new(&["L", "K"]);
    for &(l, k) in &report.samples {
        table.push(vec![l.into(), k.into()]);
    }
    let samples = report.samples.iter().map(|(l, k)| object([("L", json_num(*l)), ("K", json_num(*k))])).collect();
    let mut fields = vec![
        ("command", Value::from("log-fit")),
        ("model", Value::from(model_label(&model))),
        ("s", json_num(s)),
        ("x", json_nums(&x)),
    ];
    fields.extend(fit_json(&report.fit));
    fields.extend([
        ("target", json_num(report.slope_target)),
        ("rel_err", json_num(report.relative_error)),
        ("g_estimate", json_num(report.g_estimate)),
        ("g_target", json_num(report.g_target)),
        ("abscissa", Value::from(report.fit.design.label())),
        ("samples", Value::Array(samples)),
    ]);
    Ok(Report {
        summary: format!(
            "slope={} target={} g={} g_target={} rel_err={}",
            human(report.fit.slope),
            human(report.slope_target),
            human(report.g_estimate),
            human(report.g_target),
            human(report.relative_error)
        ),
        table,
        json: object(fields),
    })
}

pub type Pair = (Vec<f64>, Vec<f64>);

fn parse_pairs(v: &str, dim: usize) -> CliResult<Vec<Pair>> {
    v.split('|')
        .map(|pair| {
            let (x, y) = pair
                .split_once(';')
                .ok_or_else(|| CliError::invalid("pairs", format!("`{pair}` is not of the form x;y")))?;
            let (x, y) = (parse_vector("pairs", x)?, parse_vector("pairs", y)?);
            check_len("pairs", &x, dim)?;
            check_len("pairs", &y, dim)?;
            Ok((x, y))
        })
        .collect()
}

fn ray_pairs(p: Params, sym: &HomogeneousSymbol, cutoff: f64, kappa: f64) -> CliResult<Vec<Pair>> {
    let n = sym.dim();
    let base = p.opt_vector("base")?.unwrap_or_else(|| vec![1.0; n]);
    check_len("base", &base, n)?;
    let dir = p.opt_vector("direction")?.unwrap_or_else(|| {
        let mut d = vec![0.0; n];
        d[0] = 1.0;
        d
    });
    check_len("direction", &dir, n)?;
    let norm = dir.iter().map(|c| c * c).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Err(CliError::invalid("direction", "must be nonzero"));
    }
    let d_min = p.opt_f64("d-min")?.unwrap_or(kappa * cutoff.powf(-1.0 / sym.degree()));
    let d_max = p.f64("d-max")?;
    let count = p.usize("count")?;
    if !(d_min > 0.0 && d_max > d_min && count >= 3) {
        return Err(CliError::invalid("d-min", format!("need 0 < d-min < d-max and count >= 3 (d-min = {d_min})")));
    }
    Ok(ray(&base, &dir, d_min, d_max, count))
}

/// `count` pairs `(base, base + d u)` with `d` geometric in `[d_min, d_max]`
/// and `u` the unit vector along `direction`.
pub fn ray(base: &[f64], direction: &[f64], d_min: f64, d_max: f64, count: usize) -> Vec<Pair> {
    let norm = direction.iter().map(|c| c * c).sum::<f64>().sqrt();
    geometric(d_min, d_max, count)
        .into_iter()
        .map(|d| (base.to_vec(), base.iter().zip(direction).map(|(b, u)| b + d * u / norm).collect()))
        .collect()
}

/// Real part of the critical kernel at each pair, evaluated in parallel.
pub fn pair_values(sym: &HomogeneousSymbol, s: f64, pairs: &[Pair], cutoff: f64) -> CliResult<Vec<f64>> {
    let band = enumerate_band(sym, cutoff).blame("L")?;
    parallel::try_map(pairs, |(x, y)| {
        weyllab_core::torus_kernel(&KernelRequest::weighted(s, x.clone(), y.clone(), cutoff), &band).map(|k| k.re)
    })
    .blame("pairs")
}

/// `max_pairs |Q-hat_{L2} - Q-hat_{L1}|`, which equals the largest kernel change.
pub fn spread(sym: &HomogeneousSymbol, s: f64, pairs: &[Pair], cutoffs: [f64; 2]) -> CliResult<f64> {
    let a = pair_values(sym, s, pairs, cutoffs[0])?;
    let b = pair_values(sym, s, pairs, cutoffs[1])?;
    Ok(a.iter().zip(&b).map(|(a, b)| (b - a).abs()).fold(0.0, f64::max))
}

fn spread_pair(p: Params, key: &str) -> CliResult<Option<[f64; 2]>> {
    match p.opt_cutoffs(key)? {
        None => Ok(None),
        Some(v) if v.len() == 2 => Ok(Some([v[0], v[1]])),
        Some(_) => Err(CliError::invalid(key, "expected two cutoffs")),
    }
}

fn green_fit(p: Params) -> CliResult<Report> {
    let sym = p.symbol()?;
    let model = Model::Torus(sym.clone());
    let s = p.f64("s")?;
    let cutoff = p.f64("L")?;
    let kappa = p.f64("kappa")?;
    check_critical(&model, s).blame("s")?;
    let pairs = match p.raw("pairs") {
        Some(v) => parse_pairs(v, sym.dim())?,
        None => ray_pairs(p, &sym, cutoff, kappa)?,
    };
    check_pairs(&sym, &pairs, cutoff, kappa).blame("pairs")?;
    let values = pair_values(&sym, s, &pairs, cutoff)?;
    let distances: Vec<f64> = pairs.iter().map(|(x, y)| pair_distance(x, y)).collect();
    let g = model_g_constant(&model).blame("symbol")?;
    let report = green_fit_report(g, cutoff, distances, values).blame("pairs")?;

    let mut table = Table::new(&["distance", "K", "q_hat"]);
    let mut samples = Vec::new();
    for ((d, k), q) in report.distances.iter().zip(&report.values).zip(&report.q_hat) {
        table.push(vec![(*d).into(), (*k).into(), (*q).into()]);
        samples.push(object([("distance", json_num(*d)), ("K", json_num(*k)), ("q_hat", json_num(*q))]));
    }
    let mut fields = vec![
        ("command", Value::from("green-fit")),
        ("symbol", Value::from(format_symbol(&sym))),
        ("s", json_num(s)),
        ("L", json_num(cutoff)),
        ("kappa", json_num(kappa)),
    ];
    fields.extend(fit_json(&report.fit));
    fields.extend([
        ("target", json_num(report.g_target)),
        ("rel_err", json_num(report.relative_error)),
        ("abscissa", Value::from(report.fit.design.label())),
        ("samples", Value::Array(samples)),
    ]);
    let mut summary = format!(
        "slope={} target={} rel_err={}",
        human(report.fit.slope),
        human(report.g_target),
        human(report.relative_error)
    );
    for key in ["spread-coarse", "spread-fine"] {
        if let Some(pair) = spread_pair(p, key)? {
            let value = spread(&sym, s, &pairs, pair)?;
            summary.push_str(&format!(" {key}={}", human(value)));
            let name = if key == "spread-coarse" { "spread_coarse" } else { "spread_fine" };
            fields.push((name, object([("L", json_nums(&pair)), ("max_q_hat_change", json_num(value))])));
        }
    }
    Ok(Report { summary, table, json: object(fields) })
}

fn limit(p: Params) -> CliResult<Report> {
    let sym = p.symbol()?;
    let n = sym.dim();
    let s = p.f64("s")?;
    let alpha = p.multi_index("alpha", n)?;
    let beta = p.multi_index("beta", n)?;
    let h = p.vector("h")?;
    check_len("h", &h, n)?;
    let quad = build_quadrature(&sym, p.usize("resolution")?).blame("resolution")?;
    let v = limit_kernel(&sym, s, &alpha, &beta, &h, &quad).blame("s")?;
    Ok(complex_report(
        "limit-kernel",
        v,
        vec![("symbol", Value::from(format_symbol(&sym))), ("s", json_num(s)), ("h", json_nums(&h))],
    ))
}

/// Runs a decay probe with the t-evaluations spread over the pool.
pub fn run_probe(
    sym: &HomogeneousSymbol,
    h: &[f64],
    t_min: f64,
    t_max: f64,
    per_decade: usize,
) -> CliResult<DecayProbe> {
    let grid = weyllab_core::oscillatory::geometric_grid(t_min, t_max, per_decade).blame("t-min")?;
    let quad = DecayProbe::quadrature_for(sym, h, t_max).blame("h")?;
    let values = parallel::try_map(&grid, |&t| j_probe(&quad, h, t)).blame("h")?;
    DecayProbe::from_values(sym.clone(), h.to_vec(), grid, values, quad.resolution()).blame("h")
}

fn osc_decay(p: Params) -> CliResult<Report> {
    let sym = p.symbol()?;
    let h = p.vector("h")?;
    check_len("h", &h, sym.dim())?;
    let probe = run_probe(&sym, &h, p.f64("t-min")?, p.f64("t-max")?, p.usize("per-decade")?)?;
    let fit = decay_slope(&probe).blame("t-max")?;
    let mut table = Table::new(&["t", "abs_J", "re_J", "im_J"]);
    for (t, v) in probe.t_grid().iter().zip(probe.values()) {
        table.push(vec![(*t).into(), v.norm().into(), v.re.into(), v.im.into()]);
    }
    let nondegenerate = -((sym.dim() as f64) - 1.0) / 2.0;
    let mut fields = vec![
        ("command", Value::from("osc-decay")),
        ("symbol", Value::from(format_symbol(&sym))),
        ("h", json_nums(&h)),
        ("resolution", Value::from(probe.resolution())),
    ];
    fields.extend(fit_json(&fit));
    fields.extend([
        ("nondegenerate_rate", json_num(nondegenerate)),
        ("envelope_t", json_nums(&probe.envelope().iter().map(|e| e.0).collect::<Vec<_>>())),
        ("samples", table.to_json()),
    ]);
    Ok(Report {
        summary: format!("{} nondegenerate_rate={}", describe_fit(&fit), human(nondegenerate)),
        table,
        json: object(fields),
    })
}

/// Admissibility check with the directions spread over the pool.
pub fn admissibility(
    sym: &HomogeneousSymbol,
    k0: usize,
    resolution: usize,
    threshold: f64,
) -> CliResult<AdmissibilityReport> {
    let directions = grid_directions(sym.dim(), resolution).blame("resolution")?;
    let checks = parallel::try_map(&directions, |omega| check_direction(sym, omega, k0, threshold)).blame("k0")?;
    Ok(report_from(k0, resolution, threshold, checks))
}

fn admissible(p: Params) -> CliResult<Report> {
    let sym = p.symbol()?;
    let k0 = p.usize("k0")?;
    let resolution = p.usize("resolution")?;
    let threshold = p.f64("threshold")?;
    if !(0.0..1.0).contains(&threshold) {
        return Err(CliError::invalid("threshold", "must lie in [0, 1)"));
    }
    let report = admissibility(&sym, k0, resolution, threshold)?;
    let mut header: Vec<String> = (1..=sym.dim()).map(|i| format!("omega{i}")).collect();
    header.extend((2..=k0).map(|k| format!("r{k}")));
    header.push("witness".into());
    let mut table = Table::new(&header);
    for d in &report.per_direction {
        let mut row: Vec<Cell> = d.direction.iter().map(|c| Cell::from(*c)).collect();
        row.extend(d.residuals.iter().map(|r| Cell::from(*r)));
        row.push(d.witness.map_or(Cell::from("none"), Cell::from));
        table.push(row);
    }
    let ok = report.admissible_on_grid();
    let statement = format!("{}admissible-on-grid at resolution {resolution}", if ok { "" } else { "not " });
    let per_direction = report
        .per_direction
        .iter()
        .map(|d| {
            object([
                ("direction", json_nums(&d.direction)),
                ("residuals", json_nums(&d.residuals)),
                ("witness", d.witness.map_or(Value::Null, Value::from)),
            ])
        })
        .collect();
    Ok(Report {
        summary: format!(
            "{statement}; failures={} min_max_residual={} uniform_witness={}",
            report.failures().count(),
            human(report.min_max_residual),
            report.uniform_witness().map_or("none".to_owned(), |k| k.to_string())
        ),
        table,
        json: object([
            ("command", Value::from("admissible")),
            ("symbol", Value::from(format_symbol(&sym))),
            ("k0", Value::from(k0)),
            ("grid_resolution", Value::from(resolution)),
            ("threshold", json_num(threshold)),
            ("admissible_on_grid", Value::from(ok)),
            ("statement", Value::from(statement)),
            ("uniform_witness", report.uniform_witness().map_or(Value::Null, Value::from)),
            ("min_max_residual", json_num(report.min_max_residual)),
            ("per_direction", Value::Array(per_direction)),
        ]),
    })
}

fn disintegration(p: Params) -> CliResult<Report> {
    let sym = p.symbol()?;
    let resolution = match p.raw("resolution") {
        Some(_) => p.usize("resolution")?,
        None => default_resolution(sym.dim()),
    };
    let test = match p.required("test")? {
        "gaussian" => TestFunction::Gaussian,
        "bump" => TestFunction::Bump,
        other => return Err(CliError::invalid("test", format!("expected gaussian or bump, got `{other}`"))),
    };
    let quad = build_quadrature(&sym, resolution).blame("resolution")?;
    let err = verify_disintegration(&sym, &quad, test).blame("test")?;
    let nu = quad.total();
    let mut table = Table::new(&["resolution", "nu", "rel_err"]);
    table.push(vec![resolution.into(), nu.into(), err.into()]);
    Ok(Report {
        summary: format!("nu={} rel_err={}", human(nu), human(err)),
        table,
        json: object([
            ("command", Value::from("disintegration")),
            ("symbol", Value::from(format_symbol(&sym))),
            ("test", Value::from(p.required("test")?)),
            ("resolution", Value::from(resolution)),
            ("nu", json_num(nu)),
            ("rel_err", json_num(err)),
        ]),
    })
}

/// A weight function for the link check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Weight {
    /// `lambda^z`.
    Power(f64),
    /// `exp(-lambda / scale)`.
    Exp(f64),
    /// `ln(1 + lambda)`.
    Log1p,
}

impl Weight {
    pub fn parse(text: &str) -> CliResult<Self> {
        let text = text.trim();
        if text == "log1p" {
            return Ok(Weight::Log1p);
        }
        match text.split_once(':') {
            Some(("power", z)) => Ok(Weight::Power(parse_f64("weights", z)?)),
            Some(("exp", scale)) => {
                let scale = parse_f64("weights", scale)?;
                if !(scale > 0.0) {
                    return Err(CliError::invalid("weights", "exp scale must be positive"));
                }
                Ok(Weight::Exp(scale))
            }
            _ => Err(CliError::invalid("weights", format!("unknown weight `{text}`"))),
        }
    }

    pub fn label(&self) -> String {
        match self {
            Weight::Power(z) => format!("power:{z}"),
            Weight::Exp(scale) => format!("exp:{scale}"),
            Weight::Log1p => "log1p".to_owned(),
        }
    }
}

impl SpectralWeight for Weight {
    fn value(&self, t: f64) -> Complex64 {
        match *self {
            Weight::Power(z) => PowerWeight::real(z).value(t),
            Weight::Exp(scale) => Complex64::new((-t / scale).exp(), 0.0),
            Weight::Log1p => Complex64::new(t.ln_1p(), 0.0),
        }
    }

    fn derivative(&self, t: f64) -> Complex64 {
        match *self {
            Weight::Power(z) => PowerWeight::real(z).derivative(t),
            Weight::Exp(scale) => Complex64::new(-(-t / scale).exp() / scale, 0.0),
            Weight::Log1p => Complex64::new(1.0 / (1.0 + t), 0.0),
        }
    }
}

/// Discrepancy between the two paths, relative to `max(1, |direct|)`.
pub fn link_discrepancy(direct: Complex64, integrated: Complex64) -> f64 {
    (direct - integrated).norm() / direct.norm().max(1.0)
}

fn link_check(p: Params) -> CliResult<Report> {
    let model = p.model()?;
    let cutoff = p.f64("L")?;
    let x = p.vector("x")?;
    let y = p.vector("y")?;
    check_len("x", &x, model.dim())?;
    check_len("y", &y, model.dim())?;
    let weights: Vec<Weight> = p.required("weights")?.split(',').map(Weight::parse).collect::<CliResult<_>>()?;
    let band = model.band(cutoff).blame("L")?;
    let paths = parallel::try_map(&weights, |w| kernel_weighted(w, cutoff, &x, &y, &band)).blame("x")?;

    let mut table = Table::new(&["weight", "direct_re", "direct_im", "integrated_re", "integrated_im", "discrepancy"]);
    let mut rows = Vec::new();
    let mut worst = 0.0f64;
    for (w, path) in weights.iter().zip(&paths) {
        let d = link_discrepancy(path.direct, path.integrated);
        worst = worst.max(d);
        table.push(vec![
            Cell::Text(w.label()),
            path.direct.re.into(),
            path.direct.im.into(),
            path.integrated.re.into(),
            path.integrated.im.into(),
            d.into(),
        ]);
        rows.push(object([
            ("weight", Value::from(w.label())),
            ("direct", json_nums(&[path.direct.re, path.direct.im])),
            ("integrated", json_nums(&[path.integrated.re, path.integrated.im])),
            ("discrepancy", json_num(d)),
        ]));
    }
    Ok(Report {
        summary: format!("weights={} max_discrepancy={}", weights.len(), human(worst)),
        table,
        json: object([
            ("command", Value::from("link-check")),
            ("model", Value::from(model_label(&model))),
            ("L", json_num(cutoff)),
            ("x", json_nums(&x)),
            ("y", json_nums(&y)),
            ("max_discrepancy", json_num(worst)),
            ("weights", Value::Array(rows)),
        ]),
    })
}
