//! Sequence-to-sequence constructions: conjugate, dual, bidual, almost-decreasing
//! regularization, head normalization and the log-convex minorant.

use crate::error::{Error, Result};
use crate::numeric::{ln_factorial, lower_hull_values, Real};
use crate::seqcore::{WeightSeq, MIN_P};

/// Default cap on the length of dual outputs (entries `0..=cap`).
pub const DEFAULT_DUAL_CAP: usize = 1 << 22;

/// `M*_p = p!/M_p`.
pub fn conjugate<T: Real>(m: &WeightSeq<T>) -> Result<WeightSeq<T>> {
    let log_m = m
        .log_m()
        .iter()
        .enumerate()
        .map(|(p, &v)| ln_factorial::<T>(p) - v)
        .collect();
    m.derive("conjugate", log_m, m.generator().map(|g| g.conjugate()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DualOptions {
    /// Largest output index kept; longer duals are truncated to this length.
    pub cap: usize,
}

impl Default for DualOptions {
    fn default() -> Self {
        DualOptions { cap: DEFAULT_DUAL_CAP }
    }
}

fn check_dual_input<T: Real>(n: &WeightSeq<T>) -> Result<()> {
    if !n.is_log_convex() {
        let index = n.quotients().first_decrease().unwrap_or(0);
        return Err(Error::NotLogConvex { index });
    }
    let tol = T::slack();
    let lm = n.log_m();
    if lm[0].abs() > tol || lm[1] < -tol {
        return Err(Error::NotNormalized);
    }
    let q = n.quotients();
    let p = n.p_max();
    if !(q.log_mu[p] > q.log_mu[1] + tol) {
        return Err(Error::Truncation(
            "quotients do not grow on the window; the dual needs μ_p → ∞".to_string(),
        ));
    }
    Ok(())
}

/// Dual sequence: `δ_{p+1} = Σ_N(p)` for integers `p ≥ ν_1`, `δ_{p+1} = 1` below.
///
/// The output stops where a count would need quotients beyond the window, so
/// every stored `δ` is an exact, uncensored count.
pub fn dual<T: Real>(n: &WeightSeq<T>) -> Result<WeightSeq<T>> {
    dual_with(n, DualOptions::default())
}

pub fn dual_with<T: Real>(n: &WeightSeq<T>, opts: DualOptions) -> Result<WeightSeq<T>> {
    let counts = dual_quotients(n, opts)?;
    let mut log_d = Vec::with_capacity(counts.len());
    let mut acc = T::zero();
    for (i, &c) in counts.iter().enumerate() {
        if i > 0 {
            acc = acc + T::from_usize_lossy(c).ln();
        }
        log_d.push(acc);
    }
    n.derive("dual", log_d, None)
}

/// Integer quotients `δ_0..δ_{P_D}` of the dual (with `δ_0 = δ_1 = 1`).
pub fn dual_quotients<T: Real>(n: &WeightSeq<T>, opts: DualOptions) -> Result<Vec<usize>> {
    check_dual_input(n)?;
    let q = n.quotients();
    let p_max = n.p_max();
    let tol = T::slack();
    let log_mu_p = q.log_mu[p_max];
    // arguments p ≤ μ_P are uncensored when μ_{P+1} is known to exceed μ_P;
    // otherwise only p < μ_P
    let beyond_known = n
        .log_mu_at(p_max + 1)
        .map(|next| next > log_mu_p + tol)
        .unwrap_or(false);
    let mu_p = log_mu_p.exp().to_f64().unwrap_or(f64::MAX);
    let tol_f = tol.to_f64().unwrap_or(1e-12);
    let limit = (opts.cap.max(MIN_P + 1) - 1) as f64;
    let mut arg_max = if mu_p > limit + 1.0 {
        limit as usize
    } else {
        let f = (mu_p * (1.0 + tol_f)).floor();
        if beyond_known || f.ln() < mu_p.ln() - tol_f {
            f as usize
        } else {
            (f as usize).saturating_sub(1)
        }
    };
    arg_max = arg_max.min(limit as usize);
    if arg_max + 1 < MIN_P {
        return Err(Error::Truncation(format!(
            "dual window too small: μ_P ≈ {mu_p:.3} gives only {} quotients; enlarge P",
            arg_max + 1
        )));
    }
    let mut delta = Vec::with_capacity(arg_max + 2);
    delta.push(1usize);
    let mut j = 1usize;
    for p in 0..=arg_max {
        let lp = if p == 0 { T::neg_infinity() } else { T::from_usize_lossy(p).ln() };
        while j <= p_max && q.log_mu[j] <= lp + tol {
            j += 1;
        }
        delta.push((j - 1).max(1));
    }
    Ok(delta)
}

/// Bidual `E = dual(dual(N))`, with `ε_0 = ε_1 = 1`.
pub fn bidual<T: Real>(n: &WeightSeq<T>) -> Result<WeightSeq<T>> {
    bidual_with(n, DualOptions::default())
}

pub fn bidual_with<T: Real>(n: &WeightSeq<T>, opts: DualOptions) -> Result<WeightSeq<T>> {
    let d = dual_with(n, opts)?;
    let e = dual_with(&d, opts)?;
    let mut provenance = n.provenance().to_vec();
    provenance.push("bidual".to_string());
    Ok(e.renamed(format!("{}|bidual", n.name())).with_provenance(provenance))
}

/// How the tail supremum `sup_{q≥p} μ_q/q` was resolved from finite data.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TailCertificate {
    /// Closed form shows `μ_q/q` non-increasing past the window.
    Generator,
    /// `μ_q/q` non-increasing on `[from, P]` with `from ≤ P/2`.
    MonotoneTail { from: usize },
    /// The upper envelope of `μ_q/q` descends across the last two quartiles.
    DescendingEnvelope,
}

#[derive(Clone, Debug)]
pub struct Regularized<T> {
    pub seq: WeightSeq<T>,
    /// `ln H` computed on the window (a lower bound for the asymptotic constant).
    pub log_h: T,
    /// `ln(λ_p/p)` for p ≥ 1 (index 0 unused).
    pub log_ratio: Vec<T>,
    pub certificate: TailCertificate,
}

fn tail_certificate<T: Real>(m: &WeightSeq<T>, x: &[T]) -> Option<TailCertificate> {
    let p_max = m.p_max();
    let tol = T::slack();
    let window_monotone_from = {
        let mut from = p_max;
        while from > 1 && x[from] <= x[from - 1] + tol * (T::one() + x[from - 1].abs()) {
            from -= 1;
        }
        from
    };
    if let Some(g) = m.generator() {
        let pf = T::from_usize_lossy(p_max);
        let two = T::lit(2.0);
        // d/dq (ln μ_q − ln q) = (a − 1)/q + 2b ≤ 0 for all q ≥ P
        let slope_ok = |q: T| (g.log_fact - T::one()) / q + two * g.quad <= T::zero();
        let ok = if g.quad > T::zero() {
            false
        } else if g.log_fact <= T::one() {
            true
        } else {
            g.quad < T::zero() && slope_ok(pf)
        };
        if ok && window_monotone_from <= p_max {
            return Some(TailCertificate::Generator);
        }
    }
    if window_monotone_from <= p_max / 2 {
        return Some(TailCertificate::MonotoneTail {
            from: window_monotone_from,
        });
    }
    let (h, q3) = (p_max / 2, (3 * p_max) / 4);
    if h >= 1 && q3 > h {
        let max_of = |a: usize, b: usize| x[a..b].iter().copied().fold(T::neg_infinity(), T::max);
        if max_of(q3, p_max + 1) < max_of(h, q3) {
            return Some(TailCertificate::DescendingEnvelope);
        }
    }
    None
}

/// `λ_p = H^{-1}·p·sup_{q≥p} μ_q/q` with `H = sup_{p≤q≤P} (μ_q/q)/(μ_p/p)`.
pub fn regularize_almost_decreasing<T: Real>(m: &WeightSeq<T>) -> Result<Regularized<T>> {
    let p_max = m.p_max();
    let q = m.quotients();
    let mut x = vec![T::zero(); p_max + 1];
    for p in 1..=p_max {
        x[p] = q.log_mu[p] - T::from_usize_lossy(p).ln();
    }
    let certificate = tail_certificate(m, &x).ok_or_else(|| {
        Error::InconclusiveTail("sup of μ_q/q beyond the window cannot be resolved".to_string())
    })?;
    let mut tail = vec![T::neg_infinity(); p_max + 2];
    for p in (1..=p_max).rev() {
        tail[p] = tail[p + 1].max(x[p]);
    }
    let log_h = (1..=p_max).map(|p| tail[p] - x[p]).fold(T::zero(), T::max);
    let mut log_lambda = vec![T::zero(); p_max + 1];
    let mut log_ratio = vec![T::zero(); p_max + 1];
    for p in 1..=p_max {
        log_ratio[p] = tail[p] - log_h;
        let raw = T::from_usize_lossy(p).ln() + log_ratio[p];
        log_lambda[p] = raw.min(q.log_mu[p]).max(q.log_mu[p] - log_h);
    }
    let unchanged = (1..=p_max).all(|p| log_lambda[p] == q.log_mu[p]);
    let seq = if unchanged {
        m.derive("regularize", m.log_m().to_vec(), m.generator().copied())?
    } else {
        let mut acc = T::zero();
        let log_l = log_lambda
            .iter()
            .enumerate()
            .map(|(p, &v)| {
                if p > 0 {
                    acc = acc + v;
                }
                acc
            })
            .collect();
        m.derive("regularize", log_l, None)?
    };
    Ok(Regularized {
        seq,
        log_h,
        log_ratio,
        certificate,
    })
}

#[derive(Clone, Debug)]
pub struct HeadNormalized<T> {
    pub seq: WeightSeq<T>,
    /// Last index set to one (0 when nothing changed).
    pub p0: usize,
    /// `ln c` with `L ≤ L̃ ≤ c·L`.
    pub log_c: T,
}

/// Set `λ̃_p = 1` for `p ≤ p₀`, where `p₀` is minimal with `λ_p ≥ 1` for all `p > p₀`.
pub fn normalize_head<T: Real>(l: &WeightSeq<T>) -> Result<HeadNormalized<T>> {
    if !l.is_log_convex() {
        let index = l.quotients().first_decrease().unwrap_or(0);
        return Err(Error::NotLogConvex { index });
    }
    let q = l.quotients();
    let p_max = l.p_max();
    if q.log_mu[p_max] < T::zero() {
        return Err(Error::Truncation("quotients never reach 1 on the window".to_string()));
    }
    let p0 = (1..=p_max).rev().find(|&p| q.log_mu[p] < T::zero()).unwrap_or(0);
    if p0 == 0 {
        let seq = l.derive("normalize-head", l.log_m().to_vec(), l.generator().copied())?;
        return Ok(HeadNormalized {
            seq,
            p0,
            log_c: T::zero(),
        });
    }
    let mut log_c = T::zero();
    for p in 1..=p0 {
        log_c = log_c + (-q.log_mu[p]).max(T::zero());
    }
    let mut acc = T::zero();
    let mut out = Vec::with_capacity(p_max + 1);
    out.push(T::zero());
    for p in 1..=p_max {
        if p > p0 {
            acc = acc + q.log_mu[p];
        }
        out.push(acc);
    }
    let seq = l.derive("normalize-head", out, None)?;
    Ok(HeadNormalized { seq, p0, log_c })
}

/// Largest log-convex sequence below `M` on the window (lower convex hull of `(p, ln M_p)`).
pub fn log_convex_minorant<T: Real>(m: &WeightSeq<T>) -> Result<WeightSeq<T>> {
    let hull = lower_hull_values(m.log_m());
    let same = hull.iter().zip(m.log_m()).all(|(a, b)| a == b);
    let generator = if same { m.generator().copied() } else { None };
    m.derive("lcm", hull, generator)
}
