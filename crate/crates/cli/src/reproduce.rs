//! Recomputes every published constant and tabulates digit agreement.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use iterasym::asymseries::asym_reciprocal;
use iterasym::extractor::{extract_constant, stability_scan, Verdict};
use iterasym::matcher::solve_expansion;
use iterasym::numerics::{digits_agreement, format_decimal};
use iterasym::orbit::{closed_form_logistic2, iterate_map, OrbitRequest, OrbitResult};
use iterasym::powerseries::{ps_reversion, taylor_at_fixed_point, MapSpec, Orientation, PowerSeries};
use iterasym::thron::{dottie, geometric_limit};
use iterasym::BigReal;

const REFERENCE_DATA: &str = include_str!("../data/reference_values.toml");

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Reference {
    pub label: String,
    pub what: String,
    pub value: String,
    #[serde(default)]
    pub exact: bool,
    #[serde(default)]
    pub qualitative: bool,
    pub digits: u32,
    pub fast_digits: Option<u32>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ReferenceFile {
    entry: Vec<Reference>,
}

pub fn references() -> Vec<Reference> {
    toml::from_str::<ReferenceFile>(REFERENCE_DATA).expect("embedded reference data parses").entry
}

#[derive(Clone, Copy, Debug)]
pub struct Profile {
    pub fast: bool,
    pub prec: u32,
}

impl Profile {
    fn k_max(&self) -> u64 {
        if self.fast {
            1_000_000
        } else {
            10_000_000
        }
    }
}

/// What a computation produced, and how it is scored.
enum Outcome {
    /// Compared digit by digit with the printed literal.
    Value(BigReal),
    /// Compared by relative error with an independently computed value.
    Against(BigReal, BigReal),
    /// Largest absolute gap between two computations that should agree.
    Gap(BigReal),
    Verdict(&'static str),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EntryReport {
    pub label: String,
    pub description: String,
    pub paper_value: String,
    pub computed: String,
    pub digits_matched: u32,
    pub target_digits: u32,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub runtime_seconds: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReproReport {
    pub profile: &'static str,
    pub precision_bits: u32,
    pub overall: &'static str,
    pub entries: Vec<EntryReport>,
}

impl ReproReport {
    pub fn passed(&self) -> bool {
        self.overall == "pass"
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("reproduce ({} profile, {} bits)\n", self.profile, self.precision_bits);
        for e in &self.entries {
            let timing = e.runtime_seconds.map(|t| format!("  {t:.1}s")).unwrap_or_default();
            writeln!(
                out,
                "{} {:<22} {:>2}/{:<2} computed {}  (published {}){timing}",
                if e.pass { "PASS" } else { "FAIL" },
                e.label,
                e.digits_matched,
                e.target_digits,
                e.computed,
                e.paper_value
            )
            .unwrap();
        }
        writeln!(out, "overall: {}", self.overall).unwrap();
        out
    }
}

/// Errors are kept as their messages so shared inputs can be reused.
type Res<T> = std::result::Result<T, String>;

type Results = BTreeMap<&'static str, (Res<Outcome>, Duration)>;

trait Reason<T> {
    fn reason(self) -> Res<T>;
}

impl<T> Reason<T> for iterasym::Result<T> {
    fn reason(self) -> Res<T> {
        self.map_err(|e| e.to_string())
    }
}

fn timed(results: &mut Results, label: &'static str, f: impl FnOnce() -> Res<Outcome>) {
    let start = Instant::now();
    let outcome = f();
    results.insert(label, (outcome, start.elapsed()));
}

fn orbit(map: MapSpec, x0: BigReal, checkpoints: Vec<u64>, prec: u32) -> iterasym::Result<OrbitResult> {
    iterate_map(&OrbitRequest::new(map, x0, checkpoints, prec))
}

fn sample(o: &OrbitResult, k: u64) -> Res<&BigReal> {
    o.value_at(k).ok_or_else(|| format!("orbit has no sample at {k}"))
}

/// u- or v-orbit constant from the cutoff-8 series of `local`.
fn free_constant(local: &[i64], x0: BigReal, p: Profile) -> Res<Outcome> {
    let prec = p.prec;
    let map = MapSpec::polynomial_ints(local, prec);
    let series = taylor_at_fixed_point(&map, 10, prec).and_then(|m| solve_expansion(&m, 8, prec)).reason()?.series;
    let o = orbit(map, x0, vec![p.k_max()], prec).reason()?;
    let e = extract_constant(&series, p.k_max(), sample(&o, p.k_max())?, prec).reason()?;
    Ok(Outcome::Value(e.c))
}

/// The three entries that share the long popa orbit.
fn popa_group(p: Profile, results: &mut Results) {
    let prec = p.prec;
    let start = Instant::now();
    let checkpoints: Vec<u64> = [10_000u64, 100_000, 1_000_000, 10_000_000].into_iter().filter(|&k| k <= p.k_max()).collect();
    let o = orbit(MapSpec::popa_g(), BigReal::one(prec), checkpoints, prec);
    let orbit_time = start.elapsed();
    let o = match o {
        Ok(o) => o,
        Err(e) => {
            for label in ["popa_C", "popa_reciprocal", "popa_quartic_drift"] {
                results.insert(label, (Err(e.to_string()), orbit_time));
            }
            return;
        }
    };
    let start = Instant::now();
    let septic = taylor_at_fixed_point(&MapSpec::popa_g(), 7, prec).and_then(|m| solve_expansion(&m, 8, prec)).reason();
    let c = septic
        .clone()
        .and_then(|s| Ok(extract_constant(&s.series, p.k_max(), sample(&o, p.k_max())?, prec).reason()?.c));
    results.insert("popa_C", (c.clone().map(Outcome::Value), orbit_time + start.elapsed()));
    timed(results, "popa_reciprocal", || {
        let k = 1_000_000;
        let c = c?;
        let x = asym_reciprocal(&septic?.series).and_then(|r| r.eval(k, &c)).reason()?;
        Ok(Outcome::Against(x, &BigReal::one(prec) / sample(&o, k)?))
    });
    timed(results, "popa_quartic_drift", || {
        let quartic = taylor_at_fixed_point(&MapSpec::popa_g(), 4, prec).and_then(|m| solve_expansion(&m, 3, prec)).reason()?;
        let report = stability_scan(&quartic.series, &o).reason()?;
        Ok(Outcome::Verdict(if report.verdict == Verdict::Stable { "stable" } else { "drifting" }))
    });
}

fn quick_group(p: Profile, results: &mut Results) {
    let prec = p.prec;
    let one = BigReal::one(prec);
    let theta = dottie(prec);
    let rho = &one - &theta.square();
    timed(results, "theta", || Ok(Outcome::Value(theta.clone())));
    timed(results, "one_minus_theta_sq", || Ok(Outcome::Value(rho.clone())));
    let limit = |spec: MapSpec, u0: &BigReal| geometric_limit(&spec, u0, 30, prec).map(|r| r.limit).reason();
    let above = limit(MapSpec::cos_once().double(Orientation::Above), &(&one - &theta));
    let below = limit(MapSpec::cos_once().double(Orientation::Below), &theta);
    timed(results, "dottie_above", || Ok(Outcome::Value(above.clone()?)));
    timed(results, "dottie_below", || Ok(Outcome::Value(below.clone()?)));
    timed(results, "dottie_ratio", || Ok(Outcome::Against(&above? / &below?, rho.sqrt().reason()?)));

    timed(results, "logistic_3_2", || {
        Ok(Outcome::Value(limit(MapSpec::logistic(BigReal::from_ratio(3, 2, prec)), &BigReal::from_ratio(1, 6, prec))?))
    });
    let five_halves = MapSpec::logistic(BigReal::from_ratio(5, 2, prec));
    let up = limit(five_halves.clone().double(Orientation::Above), &BigReal::from_ratio(1, 40, prec));
    let down = limit(five_halves.double(Orientation::Below), &BigReal::from_ratio(1, 10, prec));
    timed(results, "logistic_5_2_above", || Ok(Outcome::Value(up.clone()?)));
    timed(results, "logistic_5_2_below", || Ok(Outcome::Value(down.clone()?)));
    timed(results, "logistic_5_2_ratio", || Ok(Outcome::Against(&up? / &down?, BigReal::from_ratio(1, 2, prec))));

    timed(results, "lambda2_closed_form", || {
        let mut worst = BigReal::zero(prec);
        // fixed starts keep the report deterministic
        for i in 1..=10i64 {
            let x0 = BigReal::from_ratio(i * 97 - 13, 1000, prec);
            let o = orbit(MapSpec::logistic(BigReal::from_int(2, prec)), x0.clone(), (0..=20).collect(), prec).reason()?;
            for (k, v) in &o.samples {
                let gap = (v - &closed_form_logistic2(&x0, *k as u32, prec).reason()?).abs();
                worst = BigReal::max_abs(&worst, &gap).clone();
            }
        }
        Ok(Outcome::Gap(worst))
    });
    timed(results, "u_series_k4_constant", || {
        let map = PowerSeries::from_ints(&[0, 1, 0, -18, -27, 0, 0, 0, 0, 0, 0], prec);
        let r = solve_expansion(&map, 8, prec).reason()?;
        Ok(Outcome::Value(r.coeff(8, 0).coeff(0).cloned().unwrap_or_else(|| BigReal::zero(prec))))
    });
    timed(results, "reversion_x5", || {
        let inv = ps_reversion(&PowerSeries::from_ints(&[0, 1, 0, -18, -27, 0], prec)).reason()?;
        Ok(Outcome::Against(inv.coeff(5), BigReal::from_int(972, prec)))
    });
}

/// Significant digits printed in a decimal literal.
fn printed_digits(s: &str) -> u32 {
    if s.contains('/') {
        return u32::MAX;
    }
    s.trim_start_matches(['-', '0', '.']).chars().filter(char::is_ascii_digit).count() as u32
}

fn relative_digits(x: &BigReal, exact: &BigReal, cap: u32) -> u32 {
    let rel = (&(x / exact).add_int(-1)).abs();
    if rel.is_zero() {
        return cap;
    }
    ((-rel.to_f64().log10()).floor().max(0.0) as u32).min(cap)
}

fn score(r: &Reference, outcome: &Outcome, target: u32, prec: u32) -> (String, u32, u32) {
    let cap = (f64::from(prec) * std::f64::consts::LOG10_2).floor() as u32 - 2;
    debug_assert_eq!(r.exact, matches!(outcome, Outcome::Against(..) | Outcome::Gap(_)), "{}", r.label);
    debug_assert_eq!(r.qualitative, matches!(outcome, Outcome::Verdict(_)), "{}", r.label);
    match outcome {
        Outcome::Value(x) => {
            let printed = BigReal::parse(&r.value, prec).expect("reference literal parses");
            let shown = printed_digits(&r.value).min(target + 5) as usize + 3;
            (format_decimal(x, shown), digits_agreement(x, &printed), target.min(printed_digits(&r.value)))
        }
        Outcome::Against(x, exact) => {
            (format_decimal(x, target as usize + 5), relative_digits(x, exact, cap), target)
        }
        Outcome::Gap(g) => {
            let digits = if g.is_zero() { cap } else { ((-g.to_f64().log10()).floor().max(0.0) as u32).min(cap) };
            (format!("max gap {}", format_decimal(g, 3)), digits, target)
        }
        Outcome::Verdict(v) => (v.to_string(), u32::from(*v == r.value), target),
    }
}

pub fn reproduce(p: Profile, timings: bool) -> ReproReport {
    let mut results = Results::new();
    let (odd, even, popa) = std::thread::scope(|s| {
        let run = |local: &'static [i64], x0: BigReal| {
            move || {
                let start = Instant::now();
                (free_constant(local, x0, p), start.elapsed())
            }
        };
        let odd = s.spawn(run(&[0, 1, 0, -18, -27], BigReal::from_ratio(1, 12, p.prec)));
        let even = s.spawn(run(&[0, 1, 0, -18, 27], BigReal::from_ratio(1, 6, p.prec)));
        let popa = s.spawn(move || {
            let mut r = Results::new();
            popa_group(p, &mut r);
            r
        });
        quick_group(p, &mut results);
        (odd.join().expect("worker"), even.join().expect("worker"), popa.join().expect("worker"))
    });
    results.insert("C_o", odd);
    results.insert("C_e", even);
    results.extend(popa);

    let mut entries = Vec::new();
    for r in references() {
        let target = if p.fast { r.fast_digits.unwrap_or(r.digits) } else { r.digits };
        let (computed, digits, need, runtime) = match results.get(r.label.as_str()) {
            Some((Ok(outcome), t)) => {
                let (c, d, n) = score(&r, outcome, target, p.prec);
                (c, d, n, *t)
            }
            Some((Err(e), t)) => (format!("error: {e}"), 0, target, *t),
            None => ("not computed".into(), 0, target, Duration::ZERO),
        };
        entries.push(EntryReport {
            label: r.label.clone(),
            description: r.what.clone(),
            paper_value: r.value.clone(),
            computed,
            digits_matched: digits,
            target_digits: need,
            pass: digits >= need,
            runtime_seconds: timings.then(|| (runtime.as_secs_f64() * 10.0).round() / 10.0),
        });
    }
    let overall = if entries.iter().all(|e| e.pass) { "pass" } else { "fail" };
    ReproReport { profile: if p.fast { "fast" } else { "full" }, precision_bits: p.prec, overall, entries }
}
