use super::{omega, OmegaSource, UniformBound};
use crate::error::{Error, Result};
use crate::numeric::{ln_gamma, LogSum};
use crate::seqcore::WeightSeq;
use serde::Serialize;

/// Peak index up to which `h` is summed term by term.
const DIRECT_PEAK: f64 = 3.0e5;
const DIRECT_MAX_TERMS: u64 = 5_000_000;
/// Terms below this fraction of the running sum past the peak are dropped.
const LN_CUTOFF: f64 = -36.841_361_487_904_734; // ln 1e-16

/// The sequence `a` bounding a family of small sequences.
#[derive(Clone, Debug)]
pub enum GaugeBound {
    /// `a_j = 1/ln(j)^j` for `j ≥ 2`, `a_0 = a_1 = 1`.
    Markin,
    /// `a_j ≡ 1`.
    Unit,
    Uniform(UniformBound),
    /// Explicit `ln a_k` for `k < len`.
    Table(Vec<f64>),
}

impl GaugeBound {
    pub fn name(&self) -> &'static str {
        match self {
            GaugeBound::Markin => "markin",
            GaugeBound::Unit => "unit",
            GaugeBound::Uniform(_) => "uniform",
            GaugeBound::Table(_) => "table",
        }
    }

    pub fn ln_a(&self, k: u64) -> Option<f64> {
        match self {
            GaugeBound::Markin => Some(if k < 2 {
                0.0
            } else {
                let kf = k as f64;
                -kf * kf.ln().ln()
            }),
            GaugeBound::Unit => Some(0.0),
            GaugeBound::Uniform(u) => Some(u.ln_a(k)),
            GaugeBound::Table(t) => t.get(k as usize).copied(),
        }
    }

    /// `r(u) = ln a_j^{1/j}` at `j = e^u` with its first two derivatives, when
    /// the bound is smooth at `u`.
    fn smooth_root(&self, u: f64) -> Option<(f64, f64, f64)> {
        match self {
            GaugeBound::Markin if u > 1.0 => Some((-u.ln(), -1.0 / u, 1.0 / (u * u))),
            GaugeBound::Unit => Some((0.0, 0.0, 0.0)),
            GaugeBound::Uniform(b) => {
                // constant on the open-ended last plateau
                let last = b.plateaus.last()?;
                (u > (last.start as f64).ln() + 2.0).then_some((last.log_root, 0.0, 0.0))
            }
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GaugeRegime {
    Series,
    Laplace,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HEval {
    pub ln_value: f64,
    pub regime: GaugeRegime,
    /// Terms summed (0 for the Laplace regime).
    pub terms: u64,
}

/// Gauge `h_a, f_a, g_a` for a bound `a` with the per-member constants `D`.
#[derive(Clone, Debug)]
pub struct GrowthGauge {
    bound: GaugeBound,
    d_map: Vec<(String, f64)>,
    t0: f64,
}

/// Checks the bound, records `ln D` for every member and locates `t₀`.
pub fn build_gauge(bound: GaugeBound, members: &[WeightSeq<f64>]) -> Result<GrowthGauge> {
    check_root_decay(&bound)?;
    let mut d_map = Vec::with_capacity(members.len());
    for n in members {
        d_map.push((n.name().to_string(), ln_bound_constant(&bound, n)?));
    }
    let mut gauge = GrowthGauge::evaluator(bound);
    gauge.d_map = d_map;
    gauge.t0 = gauge.locate_t0()?;
    Ok(gauge)
}

fn check_root_decay(bound: &GaugeBound) -> Result<()> {
    let root = |k: u64| bound.ln_a(k).map(|v| v / k as f64);
    let probes: Vec<u64> = match bound {
        GaugeBound::Table(t) if t.len() > 16 => {
            let n = t.len() as u64 - 1;
            vec![n / 4, n / 2, n]
        }
        GaugeBound::Table(_) => {
            return Err(Error::WindowTooSmall("gauge table needs more than 16 entries".to_string()))
        }
        _ => vec![256, 512, 1024, 1 << 20],
    };
    let vals: Vec<f64> = probes.iter().map(|&k| root(k).unwrap_or(f64::NAN)).collect();
    let decreasing = vals.windows(2).all(|w| w[1] < w[0]);
    if !decreasing {
        return Err(Error::Hypothesis {
            item: "root decay",
            detail: format!("a_k^(1/k) does not decrease at k = {probes:?} (ln values {vals:?})"),
        });
    }
    Ok(())
}

/// `ln D = max_j (ln n_j − ln a_j)` for the little sequence of a member `N`.
///
/// Decided on the window when the difference already falls over its last
/// quartile. Otherwise the member's closed form is sampled geometrically past
/// the window (ratio 1.005) until the difference has dropped far below its peak.
fn ln_bound_constant(bound: &GaugeBound, member: &WeightSeq<f64>) -> Result<f64> {
    let n = member.little_m()?;
    let p_max = n.p_max();
    let mut diffs = Vec::with_capacity(p_max + 1);
    for j in 0..=p_max {
        match bound.ln_a(j as u64) {
            Some(la) => diffs.push(n.log_m()[j] - la),
            None => break,
        }
    }
    if diffs.len() < 8 {
        return Err(Error::WindowTooSmall(format!("bound covers only {} entries", diffs.len())));
    }
    let last = diffs.len() - 1;
    let q = last - last / 4;
    let tail_decreasing = diffs[q..].windows(2).all(|w| w[1] < w[0]);
    let mut max = diffs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let argmax = diffs.iter().position(|&v| v == max).unwrap_or(0);
    if tail_decreasing && argmax < q {
        return Ok(max);
    }
    let rejected = |j: f64| Error::Hypothesis {
        item: "uniform bound",
        detail: format!("member '{}' is not bounded by a: ln n_j − ln a_j still rising at j ≈ {j:.3e}", member.name()),
    };
    let Some(g) = n.generator() else {
        return Err(rejected(argmax as f64));
    };
    if g.log_fact >= 0.0 || g.quad > 0.0 || !matches!(bound, GaugeBound::Markin | GaugeBound::Uniform(_)) {
        return Err(rejected(argmax as f64));
    }
    let mut u = (p_max as f64).ln();
    let mut falling = 0usize;
    let mut prev = f64::INFINITY;
    while u < 43.0 {
        let j = u.exp().round();
        let d = g.eval(j) - bound.ln_a(j as u64).unwrap_or(f64::INFINITY);
        max = max.max(d);
        falling = if d < prev { falling + 1 } else { 0 };
        prev = d;
        if falling >= 50 && d < max - 50.0 - 1e-6 * max.abs() {
            return Ok(max);
        }
        u += 0.005;
    }
    Err(rejected(u.exp()))
}

impl GrowthGauge {
    /// Evaluator without the bound and member checks.
    pub fn evaluator(bound: GaugeBound) -> Self {
        GrowthGauge {
            bound,
            d_map: Vec::new(),
            t0: 0.0,
        }
    }

    pub fn bound(&self) -> &GaugeBound {
        &self.bound
    }

    /// `(member name, ln D)` pairs.
    pub fn d_map(&self) -> &[(String, f64)] {
        &self.d_map
    }

    /// `g` is non-decreasing beyond this point on the sampled grid.
    pub fn t0(&self) -> f64 {
        self.t0
    }

    /// Solves `δ = −r(S + δ) − r'(S + δ) − e^{−(S+δ)}/2` for the peak `u* = S + δ`
    /// of `k ↦ k·S − k·r(ln k) − ln k!` with `S = ln x`.
    fn peak(&self, ln_x: f64) -> Option<(f64, (f64, f64, f64))> {
        let mut delta = 0.0;
        for _ in 0..200 {
            let u = ln_x + delta;
            let (r, r1, _) = self.bound.smooth_root(u)?;
            let next = -r - r1 - 0.5 * (-u).exp();
            if (next - delta).abs() <= 1e-15 * (1.0 + delta.abs()) {
                delta = next;
                break;
            }
            delta = next;
        }
        let u = ln_x + delta;
        self.bound.smooth_root(u).map(|d| (u, d))
    }

    /// `h(s) = ln Σ_k (s/2)^k/(a_k k!)` given `ln s`.
    pub fn eval_h_ln(&self, ln_s: f64) -> Result<HEval> {
        if ln_s == f64::NEG_INFINITY {
            let a0 = self.bound.ln_a(0).unwrap_or(0.0);
            return Ok(HEval {
                ln_value: (-a0).ln(),
                regime: GaugeRegime::Series,
                terms: 1,
            });
        }
        let ln_x = ln_s - std::f64::consts::LN_2;
        if ln_x > 10.0 {
            if let Some((u, (_, r1, r2))) = self.peak(ln_x) {
                if u > DIRECT_PEAK.ln() {
                    // Laplace: h = e^u (1 + r') + 1/2 − ln(1 + r' + r'')/2
                    let lead = u + r1.ln_1p();
                    let corr = (0.5 - 0.5 * (r1 + r2).ln_1p()) * (-lead).exp();
                    return Ok(HEval {
                        ln_value: lead + corr.ln_1p(),
                        regime: GaugeRegime::Laplace,
                        terms: 0,
                    });
                }
            }
        }
        self.series(ln_x)
    }

    fn series(&self, ln_x: f64) -> Result<HEval> {
        let mut acc = LogSum::<f64>::new();
        let mut prev = f64::NEG_INFINITY;
        let mut past_peak = false;
        for k in 0..DIRECT_MAX_TERMS {
            let la = self.bound.ln_a(k).ok_or_else(|| {
                Error::Truncation(format!("gauge table exhausted at k = {k} before the series converged"))
            })?;
            let kf = k as f64;
            let term = kf * ln_x - la - ln_gamma(kf + 1.0);
            acc.push(term);
            if term < prev {
                past_peak = true;
            }
            if past_peak && term < acc.value() + LN_CUTOFF {
                return Ok(HEval {
                    ln_value: acc.value().ln(),
                    regime: GaugeRegime::Series,
                    terms: k + 1,
                });
            }
            prev = term;
        }
        Err(Error::Horizon(format!("gauge series needs more than {DIRECT_MAX_TERMS} terms")))
    }

    pub fn h(&self, t: f64) -> Result<f64> {
        Ok(self.eval_h_ln(t.ln())?.ln_value.exp())
    }

    /// `ln f(t)` with `f(t) = h(t/2)/t`, given `ln t`.
    pub fn ln_f_at(&self, ln_t: f64) -> Result<f64> {
        let h = self.eval_h_ln(ln_t - std::f64::consts::LN_2)?;
        Ok(h.ln_value - ln_t)
    }

    pub fn f(&self, t: f64) -> Result<f64> {
        Ok(self.ln_f_at(t.ln())?.exp())
    }

    /// `ln g(t) = ln f(t)/2`, given `ln t`.
    pub fn ln_g_at(&self, ln_t: f64) -> Result<f64> {
        Ok(0.5 * self.ln_f_at(ln_t)?)
    }

    pub fn g(&self, t: f64) -> Result<f64> {
        Ok(self.ln_g_at(t.ln())?.exp())
    }

    fn locate_t0(&self) -> Result<f64> {
        let grid = super::geometric_ratio_grid(1e-2, 1e8, 1.25);
        let mut t0 = grid[0];
        let mut prev = f64::NEG_INFINITY;
        for &t in &grid {
            let v = self.ln_g_at(t.ln())?;
            if v < prev - 1e-12 {
                t0 = t;
            }
            prev = prev.max(v);
        }
        Ok(t0)
    }

    /// `(k, ln a_k)` rows for `k ≤ k_max`.
    pub fn dump(&self, k_max: u64) -> Vec<(u64, f64)> {
        (0..=k_max).filter_map(|k| self.bound.ln_a(k).map(|v| (k, v))).collect()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct MarginReport {
    /// `(t, s·ω_N(t/2) − d·g(t)·t)`.
    pub points: Vec<(f64, f64)>,
    /// First grid index from which the margins increase strictly.
    pub increasing_from: Option<usize>,
    /// First grid index from which the margins stay positive.
    pub positive_from: Option<usize>,
}

/// `s·ω_N(t/2) − d·g(t)·t` over a grid.
pub fn divergence_margin(n: &WeightSeq<f64>, gauge: &GrowthGauge, s: f64, d: f64, t_grid: &[f64]) -> Result<MarginReport> {
    if !(s > 0.0 && d > 0.0) {
        return Err(Error::InvalidParameter("s and d must be positive".to_string()));
    }
    ln_bound_constant(&gauge.bound, n)?;
    let mut points = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let w = omega(n, t / 2.0);
        if !w.trusted {
            return Err(Error::Untrusted(format!(
                "ω of '{}' at {} is {:?}",
                n.name(),
                t / 2.0,
                w.source
            )));
        }
        debug_assert!(w.source != OmegaSource::Unbounded);
        points.push((t, s * w.value - d * gauge.g(t)? * t));
    }
    let last_from = |ok: &dyn Fn(usize) -> bool| -> Option<usize> {
        let n = points.len();
        let mut from = n;
        while from > 0 && ok(from - 1) {
            from -= 1;
        }
        (from < n).then_some(from)
    };
    let increasing_from = last_from(&|i| i + 1 >= points.len() || points[i + 1].1 > points[i].1);
    let positive_from = last_from(&|i| points[i].1 > 0.0);
    Ok(MarginReport {
        points,
        increasing_from,
        positive_from,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::geometric_grid;

    #[test]
    fn unit_bound_gives_constant_gauge() {
        let g = GrowthGauge::evaluator(GaugeBound::Unit);
        for t in [0.5, 3.0, 40.0, 1e3, 1e7, 1e12] {
            assert!((g.h(t).unwrap() / (t / 2.0) - 1.0).abs() < 1e-12, "t = {t}");
            assert!((g.g(t).unwrap() - 0.5).abs() < 1e-12);
        }
        assert!(build_gauge(GaugeBound::Unit, &[]).is_err());
    }

    #[test]
    fn markin_regimes_join() {
        let g = GrowthGauge::evaluator(GaugeBound::Markin);
        // around the switch the Laplace form must agree with the series
        let ln_x = 12.0;
        let series = g.series(ln_x).unwrap().ln_value;
        let (u, (_, r1, r2)) = g.peak(ln_x).unwrap();
        let lead = u + r1.ln_1p();
        let laplace = lead + ((0.5 - 0.5 * (r1 + r2).ln_1p()) * (-lead).exp()).ln_1p();
        assert!((series - laplace).abs() < 1e-7, "{series} vs {laplace}");
    }

    #[test]
    fn markin_gauge_grows() {
        let members: Vec<_> = [0.3, 0.5, 0.7]
            .iter()
            .map(|&a| WeightSeq::gevrey(a, 256).unwrap())
            .collect();
        let gauge = build_gauge(GaugeBound::Markin, &members).unwrap();
        assert_eq!(gauge.d_map().len(), 3);
        let (a, b, c) = (gauge.g(1e3).unwrap(), gauge.g(1e4).unwrap(), gauge.g(1e5).unwrap());
        assert!(a < b && b < c);
        assert!(gauge.ln_g_at(1e6).unwrap() > gauge.ln_g_at(1e3).unwrap());
        // big Gevrey members are not bounded
        assert!(build_gauge(GaugeBound::Markin, &[WeightSeq::gevrey(1.5, 256).unwrap()]).is_err());
    }

    #[test]
    fn margin_examples() {
        let gauge = build_gauge(GaugeBound::Markin, &[]).unwrap();
        let n = WeightSeq::gevrey(0.5, 256).unwrap();
        let grid = geometric_grid(1e2, 1e5, 30);
        let r = divergence_margin(&n, &gauge, 1.0, 1.0, &grid).unwrap();
        assert_eq!(r.positive_from, Some(0));
        assert_eq!(r.increasing_from, Some(0));
        let r2 = divergence_margin(&n, &gauge, 1.0, 2.0, &grid).unwrap();
        assert!(r2.points.last().unwrap().1 > 0.0);
        let low = divergence_margin(&n, &gauge, 1.0, 1.0, &[1.5]).unwrap();
        assert!((low.points[0].1 + gauge.g(1.5).unwrap() * 1.5).abs() < 1e-12);
    }
}
