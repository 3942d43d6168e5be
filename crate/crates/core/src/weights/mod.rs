//! Associated weights `ω_M`, counting functions `Σ_M`, the growth gauge and the
//! uniform-bound construction.

mod gauge;
mod uniform;

pub use gauge::{build_gauge, divergence_margin, GaugeBound, GaugeRegime, GrowthGauge, MarginReport};
pub use uniform::{uniform_bound_construct, Plateau, SequenceFamily, UniformBound, UniformBoundCheck};

use crate::error::{Error, Result};
use crate::numeric::{search_up_u64, Real, WideReal};
use crate::seqcore::WeightSeq;
use serde::Serialize;

/// Largest index reached by exact integer searches through a generator.
pub const GENERATOR_HORIZON: u64 = 1 << 50;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum OmegaSource {
    /// Maximizer found inside the stored window.
    Window,
    /// Maximizer found past the window through the closed-form generator.
    Generator,
    /// Continuous maximizer of the closed form (argmax beyond exact integer range).
    Asymptotic,
    /// Maximizer sits at the window edge and nothing is known beyond it.
    Censored,
    /// The supremum is infinite (quotients stay bounded by t).
    Unbounded,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OmegaEval<T> {
    pub value: T,
    pub argmax: u64,
    pub trusted: bool,
    pub source: OmegaSource,
}

/// Number of `p` in `1..=P` with `ln μ_p ≤ x` (ties inclusive), for non-decreasing quotients.
fn count_le<T: Real>(log_mu: &[T], x: T) -> usize {
    let tol = T::slack();
    let (mut lo, mut hi) = (1usize, log_mu.len());
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if log_mu[mid] <= x + tol * (T::one() + x.abs()) {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    lo - 1
}

/// `Σ_M(t) = #{p ≥ 1 : μ_p ≤ t}`.
///
/// Arguments above `μ_P` are answered through the generator when present;
/// otherwise they are censored and rejected.
pub fn counting<T: Real>(m: &WeightSeq<T>, t: T) -> Result<u64> {
    if t <= T::zero() {
        return Ok(0);
    }
    let lt = t.ln();
    let q = m.quotients();
    let p_max = m.p_max();
    let tol = T::slack();
    if !m.is_log_convex() {
        let c = (1..=p_max)
            .filter(|&p| q.log_mu[p] <= lt + tol * (T::one() + lt.abs()))
            .count();
        if lt > q.log_mu[p_max] {
            return Err(Error::Truncation(format!("t = {t} exceeds μ_P; count is censored")));
        }
        return Ok(c as u64);
    }
    let c = count_le(&q.log_mu, lt);
    if c < p_max || lt < q.log_mu[p_max] {
        return Ok(c as u64);
    }
    match m.generator() {
        Some(g) if g.is_log_convex() && g.quotients_unbounded() => {
            let first_above = search_up_u64(p_max as u64 + 1, GENERATOR_HORIZON, |j| {
                g.log_mu(T::from_u64(j).unwrap()) > lt + tol * (T::one() + lt.abs())
            })
            .ok_or_else(|| Error::Truncation(format!("count at t = {t} beyond the generator horizon")))?;
            Ok(first_above - 1)
        }
        _ => {
            if lt <= q.log_mu[p_max] + tol {
                Ok(c as u64)
            } else {
                Err(Error::Truncation(format!("t = {t} exceeds μ_P; count is censored")))
            }
        }
    }
}

/// `ω_M(t) = sup_p ln(t^p / M_p)` evaluated on the window, extended through the
/// generator when the maximizer lies beyond it.
pub fn omega<T: Real>(m: &WeightSeq<T>, t: T) -> OmegaEval<T> {
    if t <= T::zero() {
        return OmegaEval {
            value: T::zero(),
            argmax: 0,
            trusted: true,
            source: OmegaSource::Window,
        };
    }
    let lt = t.ln();
    let p_max = m.p_max();
    let lm = m.log_m();
    let term = |p: usize| T::from_usize_lossy(p) * lt - lm[p];
    let (argmax, best) = if m.is_log_convex() {
        // concave in p: the maximizer is the count of quotients ≤ t
        let c = count_le(&m.quotients().log_mu, lt);
        let mut best = (c, term(c));
        if term(0) > best.1 {
            best = (0, term(0));
        }
        best
    } else {
        let mut best = (0usize, term(0));
        for p in 1..=p_max {
            let v = term(p);
            if v > best.1 {
                best = (p, v);
            }
        }
        best
    };
    let clamp = |v: T| if v > T::zero() { v } else { T::zero() };
    if argmax < p_max {
        return OmegaEval {
            value: clamp(best),
            argmax: argmax as u64,
            trusted: true,
            source: OmegaSource::Window,
        };
    }
    let window_result = |source| OmegaEval {
        value: clamp(best),
        argmax: argmax as u64,
        trusted: false,
        source,
    };
    let Some(g) = m.generator() else {
        return window_result(OmegaSource::Censored);
    };
    if !g.is_log_convex() {
        return window_result(OmegaSource::Censored);
    }
    if !g.quotients_unbounded() {
        // constant quotients: ω is 0 for t below them and +∞ above
        return window_result(OmegaSource::Unbounded);
    }
    let tol = T::slack();
    let found = search_up_u64(p_max as u64 + 1, GENERATOR_HORIZON, |j| {
        g.log_mu(T::from_u64(j).unwrap()) > lt + tol * (T::one() + lt.abs())
    });
    match found {
        Some(j) => {
            let p = j - 1;
            let pf = T::from_u64(p).unwrap();
            OmegaEval {
                value: clamp(pf * lt - g.eval(pf)),
                argmax: p,
                trusted: true,
                source: OmegaSource::Generator,
            }
        }
        None => window_result(OmegaSource::Censored),
    }
}

/// `ω_M` at an argument given by its logarithm, for arguments far beyond f64 range.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WideOmega {
    pub value: WideReal,
    pub ln_argmax: f64,
    pub source: OmegaSource,
}

/// `ω_M(e^{ln_t})` for generator-backed log-convex sequences.
///
/// Uses exact integer maximization while the maximizer fits in the generator
/// horizon and the continuous maximizer of the closed form past it; the
/// relative error of the latter is of order `ln p*/p*`.
pub fn omega_wide(m: &WeightSeq<f64>, ln_t: f64) -> Result<WideOmega> {
    if ln_t < 700.0 {
        let e = omega(m, ln_t.exp());
        if e.trusted {
            return Ok(WideOmega {
                value: WideReal::from_f64(e.value),
                ln_argmax: (e.argmax as f64).ln(),
                source: e.source,
            });
        }
        if e.source != OmegaSource::Censored || m.generator().is_none() {
            return Err(Error::Untrusted(format!(
                "ω of '{}' at t = e^{ln_t} is {:?}; enlarge P",
                m.name(),
                e.source
            )));
        }
    }
    let g = m.generator().ok_or_else(|| {
        Error::Untrusted(format!("'{}' has no closed form to evaluate ω at t = e^{ln_t}", m.name()))
    })?;
    if !g.is_log_convex() || !g.quotients_unbounded() {
        return Err(Error::Untrusted(format!("ω of '{}' is unbounded at t = e^{ln_t}", m.name())));
    }
    let (a, b, c) = (g.log_fact, g.quad, g.lin);
    // rough size of the maximizer decides exact or continuous evaluation
    let ln_p_guess = if b > 0.0 {
        ((ln_t - c).max(1.0) / (2.0 * b)).ln()
    } else {
        (ln_t - c) / a
    };
    if ln_p_guess < (GENERATOR_HORIZON as f64).ln() - 1.0 {
        let found = search_up_u64(1, GENERATOR_HORIZON, |j| g.log_mu(j as f64) > ln_t)
            .ok_or_else(|| Error::Horizon("ω maximizer beyond the generator horizon".to_string()))?;
        let p = (found - 1) as f64;
        let v = (p * ln_t - g.eval(p)).max(0.0);
        return Ok(WideOmega {
            value: WideReal::from_f64(v),
            ln_argmax: p.ln(),
            source: OmegaSource::Generator,
        });
    }
    if b > 0.0 {
        return Err(Error::Horizon("quadratic closed form with maximizer beyond 2^50".to_string()));
    }
    // a ψ(p + 1) = ln t − c, with ψ(p + 1) = ln p + 1/(2p) + O(p^-2) at this size
    let ln_p = (ln_t - c) / a;
    let p_inv = (-ln_p).exp();
    // ω = a·(p + 1/2 − ln(2πp)/2) up to O(1/p)
    let corr = (0.5 - 0.5 * (std::f64::consts::TAU.ln() + ln_p)) * p_inv;
    Ok(WideOmega {
        value: WideReal::positive_from_ln(a.ln() + ln_p + corr.ln_1p()),
        ln_argmax: ln_p,
        source: OmegaSource::Asymptotic,
    })
}

/// Exclusive upper end of the arguments whose maximizer lies inside the window.
pub fn valid_to<T: Real>(m: &WeightSeq<T>) -> T {
    m.quotients().log_mu[m.p_max()].exp()
}

/// `|ω_M(t) − Σ_{p: μ_p ≤ t} p·(ln min(μ_{p+1}, t) − ln μ_p)|`, the integral
/// representation evaluated on the exact step structure of `Σ_M`.
pub fn integral_representation_residual<T: Real>(m: &WeightSeq<T>, t: T) -> Result<T> {
    if !m.is_log_convex() {
        let index = m.quotients().first_decrease().unwrap_or(0);
        return Err(Error::NotLogConvex { index });
    }
    let q = m.quotients();
    let p_max = m.p_max();
    if t <= T::zero() {
        return Ok(T::zero());
    }
    let lt = t.ln();
    if lt >= q.log_mu[p_max] {
        return Err(Error::Truncation(format!("t = {t} is not below μ_P")));
    }
    let w = omega(m, t);
    if !w.trusted {
        return Err(Error::Untrusted(format!("ω at t = {t}")));
    }
    let mut integral = T::zero();
    for p in 1..p_max {
        if q.log_mu[p] > lt {
            break;
        }
        let upper = q.log_mu[p + 1].min(lt);
        integral = integral + T::from_usize_lossy(p) * (upper - q.log_mu[p]);
    }
    Ok((w.value - integral).abs())
}

#[derive(Clone, Debug, Serialize)]
pub struct ScalingReport {
    /// Smallest D with `Σ(k^β t) ≤ kΣ(t) + D` on the grid.
    pub d_min: f64,
    /// Grid points where `Σ(k^β t) > kΣ(t)`.
    pub violations: Vec<f64>,
    /// `min ln(μ_{kp}/μ_p) − β ln k` over the second half of the admissible window.
    pub liminf_margin: f64,
    /// `ω(k^β t) ≤ kω(t) + D·ln(t k^β/μ_1)` on the grid points above `μ_1/k^β`.
    pub omega_chain_holds: bool,
}

/// Counting-function scaling `Σ_M(k^β t) ≤ kΣ_M(t) + D` over a grid.
pub fn counting_scaling_residual(m: &WeightSeq<f64>, k: u32, beta: f64, t_grid: &[f64]) -> Result<ScalingReport> {
    if k < 2 {
        return Err(Error::InvalidParameter("k must be at least 2".to_string()));
    }
    if !m.is_log_convex() {
        let index = m.quotients().first_decrease().unwrap_or(0);
        return Err(Error::NotLogConvex { index });
    }
    let kf = f64::from(k);
    let scale = kf.powf(beta);
    let q = m.quotients();
    let p_max = m.p_max();
    let mu_p = q.log_mu[p_max].exp();
    let mut d_min: f64 = 0.0;
    let mut violations = Vec::new();
    let mut pairs = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        if scale * t > mu_p {
            return Err(Error::Truncation(format!("k^β·t = {} exceeds μ_P = {mu_p}", scale * t)));
        }
        let big = counting(m, scale * t)? as f64;
        let small = counting(m, t)? as f64;
        let excess = big - kf * small;
        if excess > 0.0 {
            violations.push(t);
        }
        d_min = d_min.max(excess);
        pairs.push(t);
    }
    let kp = k as usize;
    let hi = p_max / kp;
    let lo = (hi / 2).max(1);
    let liminf_margin = (lo..=hi)
        .map(|p| q.log_mu[kp * p] - q.log_mu[p] - beta * kf.ln())
        .fold(f64::INFINITY, f64::min);
    let mu1 = q.log_mu[1].exp();
    let omega_chain_holds = pairs.iter().all(|&t| {
        if t < mu1 / scale {
            return true;
        }
        let lhs = omega(m, scale * t).value;
        let rhs = kf * omega(m, t).value + d_min * (t * scale / mu1).ln();
        lhs <= rhs + 1e-9 * (1.0 + rhs.abs())
    });
    Ok(ScalingReport {
        d_min,
        violations,
        liminf_margin,
        omega_chain_holds,
    })
}

/// `n` points geometrically spaced from `lo` to `hi` inclusive.
pub fn geometric_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let r = (hi / lo).ln() / (n - 1) as f64;
    (0..n).map(|i| lo * (r * i as f64).exp()).collect()
}

/// Geometric grid with ratio `ratio` from `lo` while below `hi`.
pub fn geometric_ratio_grid(lo: f64, hi: f64, ratio: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let mut t = lo;
    while t < hi {
        out.push(t);
        t *= ratio;
    }
    out
}

/// Default grid: ratio 1.2 from 1 up to the window's trust bound.
pub fn default_grid(m: &WeightSeq<f64>) -> Vec<f64> {
    geometric_ratio_grid(1.0, valid_to(m), 1.2)
}
