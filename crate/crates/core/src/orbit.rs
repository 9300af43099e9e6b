//! Sequential high-precision iteration with checkpoints.
//!
//! Non-branch maps iterate in original coordinates (`f`, or `f∘f` when
//! double-stepped); branch maps iterate the local map in `s > 0`. The hot
//! loop works on MPFR floats in place.

use rug::{Assign, Float};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::numerics::{format_decimal, BigReal, GUARD_BITS};
use crate::powerseries::{FixedPointTag, MapEvaluator, MapKind, MapSpec};

/// Steps between progress callbacks.
pub const PROGRESS_INTERVAL: u64 = 1 << 20;

#[derive(Clone, Debug)]
pub struct OrbitRequest {
    pub map: MapSpec,
    pub x0: BigReal,
    pub k_max: u64,
    /// Ascending indices in `0..=k_max`.
    pub checkpoints: Vec<u64>,
    pub precision_bits: u32,
}

impl OrbitRequest {
    /// Request sampling at `checkpoints`, iterating up to the last one.
    pub fn new(map: MapSpec, x0: BigReal, checkpoints: Vec<u64>, precision_bits: u32) -> Self {
        let k_max = checkpoints.last().copied().unwrap_or(0);
        OrbitRequest { map, x0, k_max, checkpoints, precision_bits }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OrbitResult {
    pub samples: Vec<(u64, BigReal)>,
    pub precision_bits: u32,
    pub map_description: String,
    pub map_hash: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrbitJson {
    pub map: String,
    pub precision_bits: u32,
    pub samples: Vec<SampleJson>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleJson {
    pub k: u64,
    pub value: String,
}

impl OrbitResult {
    /// Sample at index `k`, if it was a checkpoint.
    pub fn value_at(&self, k: u64) -> Option<&BigReal> {
        self.samples.iter().find(|(i, _)| *i == k).map(|(_, v)| v)
    }

    /// Values rendered with every digit the precision supports.
    pub fn to_json(&self) -> OrbitJson {
        let digits = (f64::from(self.precision_bits) * std::f64::consts::LOG10_2).floor() as usize;
        OrbitJson {
            map: self.map_description.clone(),
            precision_bits: self.precision_bits,
            samples: self
                .samples
                .iter()
                .map(|(k, v)| SampleJson { k: *k, value: format_decimal(v, digits) })
                .collect(),
        }
    }

    pub fn from_json(doc: &OrbitJson) -> Result<Self> {
        let samples = doc
            .samples
            .iter()
            .map(|s| Ok((s.k, BigReal::parse(&s.value, doc.precision_bits)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(OrbitResult {
            samples,
            precision_bits: doc.precision_bits,
            map_hash: description_hash(&doc.map),
            map_description: doc.map.clone(),
        })
    }
}

/// Short SHA-256 fingerprint of a map description.
pub fn description_hash(description: &str) -> String {
    hex::encode(&Sha256::digest(description.as_bytes())[..8])
}

/// Bits for `digits` correct digits after `k_max` steps:
/// `⌈digits·log2 10⌉ + ⌈log2 k_max⌉ + 64`.
pub fn orbit_precision(digits: u32, k_max: u64) -> u32 {
    let log2_k = 64 - k_max.max(1).saturating_sub(1).leading_zeros();
    (f64::from(digits) * std::f64::consts::LOG2_10).ceil() as u32 + log2_k + GUARD_BITS
}

pub fn iterate_map(req: &OrbitRequest) -> Result<OrbitResult> {
    iterate_map_with_progress(req, |_| {})
}

/// Like [`iterate_map`], calling `progress(k)` every [`PROGRESS_INTERVAL`]
/// steps.
pub fn iterate_map_with_progress(req: &OrbitRequest, mut progress: impl FnMut(u64)) -> Result<OrbitResult> {
    req.map.validate()?;
    validate_checkpoints(req)?;
    let prec = req.precision_bits;
    let stepper = Stepper::new(&req.map, prec)?;
    let guard = Guard::for_map(&req.map);
    let x0 = req.x0.with_prec(prec);
    guard.check_start(&x0)?;

    let mut x = x0.as_float().clone();
    let mut scratch = Float::new(prec);
    let mut prev = Float::new(prec);
    let mut samples = Vec::with_capacity(req.checkpoints.len());
    let mut next_checkpoint = req.checkpoints.iter().peekable();
    let mut k = 0u64;
    loop {
        while next_checkpoint.peek() == Some(&&k) {
            samples.push((k, BigReal::from_float(x.clone())?));
            next_checkpoint.next();
        }
        if next_checkpoint.peek().is_none() {
            break;
        }
        prev.assign(&x);
        stepper.apply(&mut x, &mut scratch)?;
        k += 1;
        if !x.is_finite() {
            return Err(Error::Basin { step: k, reason: "non-finite iterate".into() });
        }
        guard.check_step(k, &prev, &x)?;
        if k % PROGRESS_INTERVAL == 0 {
            progress(k);
        }
    }
    let map_description = req.map.describe();
    Ok(OrbitResult {
        samples,
        precision_bits: prec,
        map_hash: description_hash(&map_description),
        map_description,
    })
}

fn validate_checkpoints(req: &OrbitRequest) -> Result<()> {
    if req.checkpoints.is_empty() {
        return Err(Error::Precondition("no checkpoints requested".into()));
    }
    if req.checkpoints.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Precondition("checkpoints must be strictly ascending".into()));
    }
    if *req.checkpoints.last().expect("nonempty") > req.k_max {
        return Err(Error::Precondition(format!("checkpoint beyond K_max = {}", req.k_max)));
    }
    Ok(())
}

/// `(1 − (1 − 2x₀)^(2^k))/2`, the closed form of the `λ = 2` logistic orbit.
pub fn closed_form_logistic2(x0: &BigReal, k: u32, prec: u32) -> Result<BigReal> {
    if !(x0.is_positive() && *x0 < 1) {
        return Err(Error::Precondition("closed form needs 0 < x0 < 1".into()));
    }
    if k > 63 {
        return Err(Error::Unsupported(format!("2^{k} exceeds the supported exponent range")));
    }
    let x0 = x0.with_prec(prec);
    let mut t = (&BigReal::one(prec) - &x0.mul_int(2)).into_float();
    for _ in 0..k {
        t.square_mut();
    }
    let one_minus = Float::with_val(prec, 1 - &t);
    BigReal::from_float(one_minus / 2u32)
}

/// One application of the iterated map on a float, in place.
enum Stepper {
    Polynomial(Vec<Float>),
    Logistic(Float),
    Cos,
    Popa(u32),
    Twice(Box<Stepper>),
    Local(Box<MapEvaluator>),
}

impl Stepper {
    fn new(map: &MapSpec, prec: u32) -> Result<Self> {
        if map.is_branch() {
            return Ok(Stepper::Local(Box::new(map.evaluator(prec)?)));
        }
        let once = match &map.kind {
            MapKind::Polynomial(c) => Stepper::Polynomial(c.iter().map(|v| v.with_prec(prec).into_float()).collect()),
            MapKind::Logistic(l) => Stepper::Logistic(l.with_prec(prec).into_float()),
            MapKind::CosOnce => Stepper::Cos,
            MapKind::PopaG => Stepper::Popa(1),
            MapKind::PopaGEll(ell) => Stepper::Popa(*ell),
        };
        Ok(if map.double_step { Stepper::Twice(Box::new(once)) } else { once })
    }

    fn apply(&self, x: &mut Float, scratch: &mut Float) -> Result<()> {
        match self {
            Stepper::Polynomial(c) => {
                let (last, rest) = c.split_last().expect("validated nonempty");
                scratch.assign(last);
                for coeff in rest.iter().rev() {
                    *scratch *= &*x;
                    *scratch += coeff;
                }
                std::mem::swap(x, scratch);
            }
            Stepper::Logistic(l) => {
                scratch.assign(1);
                *scratch -= &*x;
                *x *= &*scratch;
                *x *= l;
            }
            Stepper::Cos => x.cos_mut(),
            Stepper::Popa(ell) => {
                if *x <= -1 {
                    return Err(Error::Domain("ln(1 + y) at y ≤ −1".into()));
                }
                scratch.assign(&*x);
                scratch.ln_1p_mut();
                for _ in 0..*ell {
                    *scratch *= &*x;
                }
                *scratch += 1;
                *x /= &*scratch;
            }
            Stepper::Twice(inner) => {
                inner.apply(x, scratch)?;
                inner.apply(x, scratch)?;
            }
            Stepper::Local(ev) => {
                let next = ev.local(&BigReal::from_float(x.clone())?)?;
                x.assign(next.as_float());
            }
        }
        Ok(())
    }
}

/// Basin checks: logistic iterates stay in `(0, 1)`; maps contracting to a
/// fixed point at 0 (and branch maps) must decrease strictly while positive.
enum Guard {
    UnitInterval,
    Decreasing,
    None,
}

impl Guard {
    fn for_map(map: &MapSpec) -> Self {
        if map.is_branch() {
            return Guard::Decreasing;
        }
        match (&map.kind, &map.fixed_point) {
            (MapKind::Logistic(_), _) => Guard::UnitInterval,
            (MapKind::Polynomial(_) | MapKind::PopaG | MapKind::PopaGEll(_), FixedPointTag::Zero) => Guard::Decreasing,
            _ => Guard::None,
        }
    }

    fn check_start(&self, x0: &BigReal) -> Result<()> {
        let ok = match self {
            Guard::UnitInterval => x0.is_positive() && *x0 < 1,
            Guard::Decreasing => x0.is_positive(),
            Guard::None => true,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Basin { step: 0, reason: format!("start value {} outside the basin", format_decimal(x0, 12)) })
        }
    }

    fn check_step(&self, step: u64, prev: &Float, x: &Float) -> Result<()> {
        let reason = match self {
            Guard::UnitInterval if !(*x > 0 && *x < 1) => "iterate left (0, 1)",
            Guard::Decreasing if *x <= 0 => "iterate is no longer positive",
            Guard::Decreasing if *x >= *prev => "iterate stopped decreasing",
            _ => return Ok(()),
        };
        Err(Error::Basin { step, reason: reason.into() })
    }
}
