//! Weight sequences stored as natural logarithms, with their elementary views.

use crate::error::{Error, Result};
use crate::numeric::{ln_factorial, ln_factorial_real, Real};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;

pub const DEFAULT_P: usize = 512;
pub const MIN_P: usize = 8;

/// Closed form `ln M_p = log_fact·ln Γ(p+1) + quad·p² + lin·p`, valid for real p ≥ 0.
///
/// Gevrey sequences are `(α, 0, 0)`, q-Gevrey `(0, ln q, 0)`. The form is closed
/// under conjugation, passage to `m`, and factorial shifts.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Generator<T> {
    pub log_fact: T,
    pub quad: T,
    pub lin: T,
}

impl<T: Real> Generator<T> {
    pub fn gevrey(alpha: T) -> Self {
        Generator {
            log_fact: alpha,
            quad: T::zero(),
            lin: T::zero(),
        }
    }

    pub fn qgevrey(q: T) -> Self {
        Generator {
            log_fact: T::zero(),
            quad: q.ln(),
            lin: T::zero(),
        }
    }

    pub fn eval(&self, p: T) -> T {
        let mut v = self.quad * p * p + self.lin * p;
        if self.log_fact != T::zero() {
            v = v + self.log_fact * ln_factorial_real(p);
        }
        v
    }

    /// `ln μ_p = log_fact·ln p + quad·(2p − 1) + lin` for p ≥ 1.
    pub fn log_mu(&self, p: T) -> T {
        let mut v = self.quad * (p + p - T::one()) + self.lin;
        if self.log_fact != T::zero() {
            v = v + self.log_fact * p.ln();
        }
        v
    }

    pub fn conjugate(&self) -> Self {
        Generator {
            log_fact: T::one() - self.log_fact,
            quad: -self.quad,
            lin: -self.lin,
        }
    }

    pub fn shifted(&self, s: T) -> Self {
        Generator {
            log_fact: self.log_fact + s,
            ..*self
        }
    }

    /// Quotients are non-decreasing for every real p ≥ 1.
    pub fn is_log_convex(&self) -> bool {
        self.log_fact >= T::zero() && self.quad >= T::zero()
    }

    /// Quotients tend to infinity.
    pub fn quotients_unbounded(&self) -> bool {
        self.quad > T::zero() || (self.quad == T::zero() && self.log_fact > T::zero())
    }

    pub fn sub(&self, other: &Self) -> Self {
        Generator {
            log_fact: self.log_fact - other.log_fact,
            quad: self.quad - other.quad,
            lin: self.lin - other.lin,
        }
    }
}

/// Finite truncation `M_0..M_P` of a positive sequence, stored as `ln M_p`.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightSeq<T> {
    name: String,
    log_m: Vec<T>,
    generator: Option<Generator<T>>,
    provenance: Vec<String>,
    log_convex: bool,
}

fn quotients_non_decreasing<T: Real>(log_m: &[T]) -> bool {
    let mut log_mu = Vec::with_capacity(log_m.len());
    log_mu.push(T::zero());
    log_mu.extend(log_m.windows(2).map(|w| w[1] - w[0]));
    Quotients { log_mu }.first_decrease().is_none()
}

impl<T: Real> WeightSeq<T> {
    /// Sequence from raw log values; rejects non-finite entries and `P < 8`.
    pub fn from_log_values(name: impl Into<String>, log_m: Vec<T>) -> Result<Self> {
        Self::build(name.into(), log_m, None, Vec::new())
    }

    pub fn from_generator(name: impl Into<String>, generator: Generator<T>, p_max: usize) -> Result<Self> {
        let log_m = (0..=p_max)
            .map(|p| generator.eval(T::from_usize_lossy(p)))
            .collect();
        Self::build(name.into(), log_m, Some(generator), Vec::new())
    }

    fn build(
        name: String,
        log_m: Vec<T>,
        generator: Option<Generator<T>>,
        provenance: Vec<String>,
    ) -> Result<Self> {
        if log_m.len() < MIN_P + 1 {
            return Err(Error::WindowTooSmall(format!(
                "need P >= {MIN_P}, got P = {}",
                log_m.len().saturating_sub(1)
            )));
        }
        if let Some(index) = log_m.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        let log_convex = quotients_non_decreasing(&log_m);
        let provenance = if provenance.is_empty() {
            vec![name.clone()]
        } else {
            provenance
        };
        Ok(WeightSeq {
            name,
            log_m,
            generator,
            provenance,
            log_convex,
        })
    }

    /// Gevrey sequence `G^α = (p!^α)`.
    pub fn gevrey(alpha: T, p_max: usize) -> Result<Self> {
        if !(alpha >= T::zero()) || !alpha.is_finite() {
            return Err(Error::InvalidParameter(format!("gevrey exponent must be >= 0, got {alpha}")));
        }
        Self::from_generator(format!("gevrey:{alpha}"), Generator::gevrey(alpha), p_max)
    }

    /// q-Gevrey sequence `(q^{p²})`.
    pub fn qgevrey(q: T, p_max: usize) -> Result<Self> {
        if !(q > T::one()) || !q.is_finite() {
            return Err(Error::InvalidParameter(format!("q-Gevrey base must be > 1, got {q}")));
        }
        Self::from_generator(format!("qgevrey:{q}"), Generator::qgevrey(q), p_max)
    }

    /// Derived sequence carrying this one's provenance plus `step`.
    pub fn derive(&self, step: &str, log_m: Vec<T>, generator: Option<Generator<T>>) -> Result<Self> {
        let mut provenance = self.provenance.clone();
        provenance.push(step.to_string());
        let name = format!("{}|{}", self.name, step);
        Self::build(name, log_m, generator, provenance)
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn with_provenance(mut self, provenance: Vec<String>) -> Self {
        if !provenance.is_empty() {
            self.provenance = provenance;
        }
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Truncation index P (entries 0..=P).
    pub fn p_max(&self) -> usize {
        self.log_m.len() - 1
    }

    pub fn log_m(&self) -> &[T] {
        &self.log_m
    }

    pub fn generator(&self) -> Option<&Generator<T>> {
        self.generator.as_ref()
    }

    pub fn provenance(&self) -> &[String] {
        &self.provenance
    }

    pub fn is_log_convex(&self) -> bool {
        self.log_convex
    }

    /// `ln M_p`, from the window or the generator beyond it.
    pub fn log_m_at(&self, p: usize) -> Option<T> {
        if p <= self.p_max() {
            Some(self.log_m[p])
        } else {
            self.generator.map(|g| g.eval(T::from_usize_lossy(p)))
        }
    }

    /// `ln μ_p`, from the window or the generator beyond it.
    pub fn log_mu_at(&self, p: usize) -> Option<T> {
        if p == 0 {
            Some(T::zero())
        } else if p <= self.p_max() {
            Some(self.log_m[p] - self.log_m[p - 1])
        } else {
            self.generator.map(|g| g.log_mu(T::from_usize_lossy(p)))
        }
    }

    pub fn quotients(&self) -> Quotients<T> {
        let mut log_mu = Vec::with_capacity(self.log_m.len());
        log_mu.push(T::zero());
        for p in 1..self.log_m.len() {
            log_mu.push(self.log_m[p] - self.log_m[p - 1]);
        }
        Quotients { log_mu }
    }

    /// `m_p = M_p / p!`.
    pub fn little_m(&self) -> Result<Self> {
        self.factorial_shift_named(-T::one(), "m")
    }

    /// `M_p·p!^s`.
    pub fn factorial_shift(&self, s: T) -> Result<Self> {
        self.factorial_shift_named(s, &format!("shift:{s}"))
    }

    fn factorial_shift_named(&self, s: T, step: &str) -> Result<Self> {
        let log_m = self
            .log_m
            .iter()
            .enumerate()
            .map(|(p, &v)| v + s * ln_factorial::<T>(p))
            .collect();
        self.derive(step, log_m, self.generator.map(|g| g.shifted(s)))
    }

    /// `R_p = ∏_{i≤p} M_i^{1/i}`, so the quotients of R are the roots `ρ_p = M_p^{1/p}`.
    pub fn root_sequence(&self) -> Result<Self> {
        let mut log_r = Vec::with_capacity(self.log_m.len());
        log_r.push(T::zero());
        let mut acc = T::zero();
        for p in 1..self.log_m.len() {
            acc = acc + self.log_m[p] / T::from_usize_lossy(p);
            log_r.push(acc);
        }
        self.derive("root", log_r, None)
    }

    /// Pointwise comparison `M_p ≤ N_p` on the common window.
    pub fn le_pointwise(&self, other: &Self) -> bool {
        let tol = T::slack();
        self.log_m
            .iter()
            .zip(&other.log_m)
            .all(|(&a, &b)| a <= b + tol * (T::one() + b.abs()))
    }
}

impl WeightSeq<f64> {
    /// Lossy conversion to single precision.
    pub fn to_f32(&self) -> Result<WeightSeq<f32>> {
        let log_m = self.log_m.iter().map(|&v| v as f32).collect();
        let generator = self.generator.map(|g| Generator {
            log_fact: g.log_fact as f32,
            quad: g.quad as f32,
            lin: g.lin as f32,
        });
        WeightSeq::build(self.name.clone(), log_m, generator, self.provenance.clone())
    }
}

/// `ln μ_p` for p in 0..=P with `ln μ_0 = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct Quotients<T> {
    pub log_mu: Vec<T>,
}

impl<T: Real> Quotients<T> {
    pub fn len(&self) -> usize {
        self.log_mu.len()
    }

    pub fn is_empty(&self) -> bool {
        self.log_mu.is_empty()
    }

    /// Rebuild `ln M` by cumulative sums.
    pub fn to_log_m(&self) -> Vec<T> {
        let mut acc = T::zero();
        self.log_mu
            .iter()
            .enumerate()
            .map(|(p, &v)| {
                if p > 0 {
                    acc = acc + v;
                }
                acc
            })
            .collect()
    }

    /// First index where the quotients decrease, if any.
    ///
    /// Quotients read off long windows carry the absolute rounding of `ln M_p`,
    /// so the slack grows with `|ln M_p|` as well as with `|ln μ_p|`.
    pub fn first_decrease(&self) -> Option<usize> {
        let tol = T::slack();
        let ulp = T::epsilon() * T::lit(8.0);
        let log_m = self.to_log_m();
        (2..self.log_mu.len()).find(|&p| {
            let slack = tol * (T::one() + self.log_mu[p - 1].abs()) + ulp * (log_m[p].abs() + log_m[p - 2].abs());
            self.log_mu[p] < self.log_mu[p - 1] - slack
        })
    }
}

/// Inline or file sequence descriptor.
#[derive(Clone, Debug, PartialEq)]
pub enum FamilySpec {
    Gevrey(f64),
    QGevrey(f64),
    Custom { name: String, log_m: Vec<f64> },
    File(String),
}

impl FamilySpec {
    /// Parse `gevrey:0.5`, `qgevrey:2`, or `file:path`. A `.json` name is read as a file.
    pub fn parse(text: &str) -> Result<Self> {
        if text.ends_with(".json") && !text.starts_with("file:") {
            return Ok(FamilySpec::File(text.to_string()));
        }
        let (kind, arg) = text
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("expected family:param, got '{text}'")))?;
        let num = |s: &str| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("bad number '{s}' in '{text}'")))
        };
        match kind.trim() {
            "gevrey" => Ok(FamilySpec::Gevrey(num(arg)?)),
            "qgevrey" => Ok(FamilySpec::QGevrey(num(arg)?)),
            "file" => Ok(FamilySpec::File(arg.to_string())),
            other => Err(Error::Parse(format!("unknown family '{other}'"))),
        }
    }
}

pub fn make_family(spec: &FamilySpec, p_max: usize) -> Result<WeightSeq<f64>> {
    match spec {
        FamilySpec::Gevrey(a) => WeightSeq::gevrey(*a, p_max),
        FamilySpec::QGevrey(q) => WeightSeq::qgevrey(*q, p_max),
        FamilySpec::Custom { name, log_m } => WeightSeq::from_log_values(name.clone(), log_m.clone()),
        FamilySpec::File(path) => SequenceFile::read(path)?.into_sequence(Some(p_max)),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilyDesc {
    #[serde(rename = "type")]
    pub kind: String,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
}

/// JSON envelope shared by sequence files and coefficient files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SequenceFile {
    pub name: String,
    #[serde(rename = "P")]
    pub p: usize,
    pub family: FamilyDesc,
    #[serde(rename = "logM", default, skip_serializing_if = "Option::is_none")]
    pub log_m: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub provenance: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub role: Option<String>,
}

impl SequenceFile {
    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Envelope for a sequence; builtin families keep their parameters, and the
    /// log values are always written so the file is self-contained.
    pub fn from_sequence(seq: &WeightSeq<f64>) -> Self {
        let mut params = BTreeMap::new();
        let kind = match (seq.generator(), seq.provenance().len()) {
            (Some(g), 1) if g.quad == 0.0 && g.lin == 0.0 => {
                params.insert("alpha".to_string(), g.log_fact);
                "gevrey"
            }
            (Some(g), 1) if g.log_fact == 0.0 && g.lin == 0.0 => {
                params.insert("q".to_string(), g.quad.exp());
                "qgevrey"
            }
            _ => "custom",
        };
        SequenceFile {
            name: seq.name().to_string(),
            p: seq.p_max(),
            family: FamilyDesc {
                kind: kind.to_string(),
                params,
            },
            log_m: Some(seq.log_m().to_vec()),
            provenance: seq.provenance().to_vec(),
            role: None,
        }
    }

    /// Materialize; `p_override` replaces the stored P for builtin families.
    pub fn into_sequence(self, p_override: Option<usize>) -> Result<WeightSeq<f64>> {
        let param = |key: &str| {
            self.family
                .params
                .get(key)
                .copied()
                .ok_or_else(|| Error::Parse(format!("family '{}' needs parameter '{key}'", self.family.kind)))
        };
        let seq = match self.family.kind.as_str() {
            "gevrey" => {
                let p = if self.log_m.is_some() { self.p } else { p_override.unwrap_or(self.p) };
                WeightSeq::gevrey(param("alpha")?, p)?
            }
            "qgevrey" => {
                let p = if self.log_m.is_some() { self.p } else { p_override.unwrap_or(self.p) };
                WeightSeq::qgevrey(param("q")?, p)?
            }
            "custom" => {
                let log_m = self
                    .log_m
                    .clone()
                    .ok_or_else(|| Error::Parse("custom family needs logM".to_string()))?;
                if log_m.len() != self.p + 1 {
                    return Err(Error::Parse(format!(
                        "P = {} but logM has {} entries",
                        self.p,
                        log_m.len()
                    )));
                }
                WeightSeq::from_log_values(self.name.clone(), log_m)?
            }
            other => return Err(Error::Parse(format!("unknown family type '{other}'"))),
        };
        if let (Some(stored), true) = (&self.log_m, self.family.kind != "custom") {
            let tol = 1e-9;
            let ok = stored.len() == seq.log_m().len()
                && stored
                    .iter()
                    .zip(seq.log_m())
                    .all(|(a, b)| (a - b).abs() <= tol * (1.0 + b.abs()));
            if !ok {
                return Err(Error::Parse("logM disagrees with the family parameters".to_string()));
            }
        }
        Ok(seq.renamed(self.name).with_provenance(self.provenance))
    }
}
