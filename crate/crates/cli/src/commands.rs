//! The single-purpose subcommands.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use anyhow::Context;
use serde::Serialize;

use iterasym::asymseries::{AsymSeries, AsymSeriesJson, CPoly};
use iterasym::extractor::{extract_constant, stability_scan};
use iterasym::matcher::{solve_expansion, ExpansionJson, Finality};
use iterasym::numerics::{format_decimal, format_truncated, precision_for_digits};
use iterasym::orbit::{iterate_map_with_progress, orbit_precision, OrbitJson, OrbitRequest, OrbitResult};
use iterasym::powerseries::{taylor_at_fixed_point, MapSpec};
use iterasym::thron::{dottie, geometric_limit};
use iterasym::BigReal;

use crate::config::{config_error, OutputFormat, RunConfig};

/// Prints `text` (or the JSON, when asked for) and writes the JSON to the
/// output file if one is configured.
pub fn emit(cfg: &RunConfig, text: &str, json: &impl Serialize) -> anyhow::Result<()> {
    let doc = serde_json::to_string_pretty(json)?;
    let shown = match cfg.format() {
        OutputFormat::Text => text.to_string(),
        OutputFormat::Json => format!("{doc}\n"),
    };
    let mut stdout = std::io::stdout().lock();
    match stdout.write_all(shown.as_bytes()).and_then(|()| stdout.flush()) {
        // a closed pipe (`| head`) is not an error
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => return Err(e.into()),
        _ => {}
    }
    if let Some(path) = &cfg.out {
        std::fs::write(path, format!("{doc}\n")).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

/// Decimal rendering without trailing fractional zeros.
pub fn trimmed(x: &BigReal, digits: usize) -> String {
    let s = format_decimal(x, digits);
    if s.contains('.') && !s.contains('e') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

fn map_spec(cfg: &RunConfig, prec: u32) -> anyhow::Result<MapSpec> {
    let desc = cfg.require(&cfg.map, "map")?;
    MapSpec::parse(desc, prec).map_err(|e| config_error(format!("map `{desc}`: {e}")))
}

fn number(cfg_value: &Option<String>, name: &str, prec: u32) -> anyhow::Result<BigReal> {
    let s = cfg_value.as_ref().ok_or_else(|| config_error(format!("missing required setting `{name}`")))?;
    BigReal::parse(s, prec).map_err(|e| config_error(format!("{name}: {e}")))
}

fn cpoly_text(c: &CPoly, digits: usize) -> String {
    let mut out = String::new();
    for (d, coeff) in c.coeffs().iter().enumerate() {
        if coeff.is_zero() {
            continue;
        }
        let v = trimmed(coeff, digits);
        if !out.is_empty() {
            out.push_str(if coeff.is_negative() { " " } else { " +" });
        }
        match d {
            0 => out.push_str(&v),
            1 => write!(out, "{v}·C").unwrap(),
            _ => write!(out, "{v}·C^{d}").unwrap(),
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

pub fn expand(cfg: &RunConfig) -> anyhow::Result<()> {
    let digits = cfg.digits_or(30)?;
    let prec = cfg.precision_or(precision_for_digits(digits))?;
    let cutoff = cfg.cutoff.unwrap_or(8);
    let degree = cfg.degree.unwrap_or(cutoff as usize + 2);
    let spec = map_spec(cfg, prec)?;
    let local = taylor_at_fixed_point(&spec, degree, prec)?;
    let result = solve_expansion(&local, cutoff, prec)?;

    let mut text = format!(
        "map {}  (Taylor degree {degree}, cutoff k^-{cutoff}/2, residual {})\n",
        spec.describe(),
        format_decimal(&result.residual_max, 3)
    );
    for term in result.series.terms() {
        let status = match result.finality.get(&(term.halves, term.logpow)) {
            Some(Finality::Transient) => "*",
            _ => " ",
        };
        writeln!(
            text,
            "{status} k^(-{}/2) ln^{}  {}",
            term.halves,
            term.logpow,
            cpoly_text(&term.coeff, digits as usize)
        )?;
    }
    text.push_str("(* transient: may change with higher map degree)\n");
    emit(cfg, &text, &result.to_json(digits as usize))
}

pub fn orbit(cfg: &RunConfig) -> anyhow::Result<()> {
    let digits = cfg.digits_or(25)?;
    let checkpoints = cfg.checkpoint_list()?;
    let k_max = checkpoints.iter().copied().max().unwrap_or(0);
    let prec = cfg.precision_or(orbit_precision(digits, k_max))?;
    let spec = map_spec(cfg, prec)?;
    let x0 = number(&cfg.x0, "x0", prec)?;
    let req = OrbitRequest::new(spec, x0, checkpoints, prec);
    let verbose = k_max >= 1 << 24;
    let result = iterate_map_with_progress(&req, |k| {
        if verbose {
            eprintln!("progress {k}/{k_max}");
        }
    })?;
    let mut text = String::new();
    for (k, v) in &result.samples {
        writeln!(text, "{k} {}", trimmed(v, digits as usize))?;
    }
    emit(cfg, &text, &result.to_json())
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> anyhow::Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| config_error(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| config_error(format!("{}: {e}", path.display())))
}

/// Accepts either a full expansion document or a bare series.
fn read_series(path: &Path, prec: u32) -> anyhow::Result<AsymSeries> {
    let text = std::fs::read_to_string(path).map_err(|e| config_error(format!("cannot read {}: {e}", path.display())))?;
    let doc: AsymSeriesJson = match serde_json::from_str::<ExpansionJson>(&text) {
        Ok(e) => e.series,
        Err(_) => serde_json::from_str(&text).map_err(|e| config_error(format!("{}: {e}", path.display())))?,
    };
    Ok(AsymSeries::from_json(&doc, prec)?)
}

#[derive(Serialize)]
struct EstimatesJson {
    estimates: Vec<iterasym::extractor::EstimateJson>,
}

pub fn extract(cfg: &RunConfig) -> anyhow::Result<()> {
    let digits = cfg.digits_or(20)? as usize;
    let orbit_doc: OrbitJson = read_json(cfg.require(&cfg.orbit, "orbit")?)?;
    let orbit = OrbitResult::from_json(&orbit_doc)?;
    let prec = cfg.precision_or(orbit.precision_bits)?;
    let series = read_series(cfg.require(&cfg.series, "series")?, prec)?;

    let far: Vec<_> = orbit.samples.iter().filter(|(k, _)| *k >= 100).collect();
    let spans = far.len() >= 3 && far[far.len() - 1].0 >= far[0].0.saturating_mul(100);
    if spans {
        let report = stability_scan(&series, &orbit)?;
        let mut text = String::new();
        for e in &report.estimates {
            writeln!(text, "K = {:<12} C = {}", e.k, format_decimal(&e.c, digits))?;
        }
        for (k, reason) in &report.failures {
            writeln!(text, "K = {k:<12} failed: {reason}")?;
        }
        for (lo, hi, d) in &report.agreed_digits {
            writeln!(text, "K = {lo} vs {hi}: {d} digits agree")?;
        }
        writeln!(text, "verdict: {}", if report.verdict == iterasym::extractor::Verdict::Stable { "stable" } else { "drifting" })?;
        return emit(cfg, &text, &report.to_json(digits));
    }
    let mut text = String::new();
    let mut estimates = Vec::new();
    for (k, v) in far {
        let e = extract_constant(&series, *k, v, prec)?;
        writeln!(text, "K = {:<12} C = {}", k, format_decimal(&e.c, digits))?;
        estimates.push(iterasym::extractor::EstimateJson { k: *k, c: format_decimal(&e.c, digits) });
    }
    if estimates.is_empty() {
        return Err(config_error("orbit has no checkpoint with K ≥ 100"));
    }
    emit(cfg, &text, &EstimatesJson { estimates })
}

pub fn rate(cfg: &RunConfig) -> anyhow::Result<()> {
    let digits = cfg.digits_or(25)?;
    let prec = cfg.precision_or(precision_for_digits(digits))?;
    let spec = map_spec(cfg, prec)?;
    let u0 = number(&cfg.u0, "u0", prec)?;
    let r = geometric_limit(&spec, &u0, digits, prec)?;
    let text = format!(
        "limit {}\nrho   {}\nfactors {}, tail bound {}\n",
        format_decimal(&r.limit, digits as usize),
        trimmed(&r.rho, digits as usize),
        r.factors_used,
        format_decimal(&r.tail_bound, 3)
    );
    emit(cfg, &text, &r.to_json(digits as usize))
}

#[derive(Serialize)]
struct DottieJson {
    theta: String,
}

pub fn dottie_cmd(cfg: &RunConfig) -> anyhow::Result<()> {
    let digits = cfg.digits_or(25)?;
    let prec = cfg.precision_or(precision_for_digits(digits))?;
    // truncated, so every printed digit is a digit of θ
    let theta = format_truncated(&dottie(prec), digits as usize);
    emit(cfg, &format!("{theta}\n"), &DottieJson { theta })
}
