use crate::error::{Error, Result};
use crate::numeric::{ln_gamma, search_up_u64};
use crate::seqcore::WeightSeq;
use crate::transforms::dual;
use serde::Serialize;

/// Search horizon for the breakpoints `j_k`.
const HORIZON: u64 = 1 << 62;
/// Indices up to this value are represented exactly in f64.
const EXACT_LIMIT: u64 = 1 << 53;

/// One-parameter families `β ↦ N^{(β)}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SequenceFamily {
    /// `β ↦ G^{β/(β+1)}`.
    SmallGevrey,
    /// `β ↦ G^β`.
    Gevrey,
    /// `β ↦ dual(G^{1/β})`, no closed form.
    DualGevrey,
}

impl SequenceFamily {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "small-gevrey" => Ok(SequenceFamily::SmallGevrey),
            "gevrey" => Ok(SequenceFamily::Gevrey),
            "dual-gevrey" => Ok(SequenceFamily::DualGevrey),
            _ => Err(Error::Parse(format!("unknown family '{s}'"))),
        }
    }

    /// Gevrey exponent of the member, when it has one.
    pub fn exponent(&self, beta: f64) -> Option<f64> {
        match self {
            SequenceFamily::SmallGevrey => Some(beta / (beta + 1.0)),
            SequenceFamily::Gevrey => Some(beta),
            SequenceFamily::DualGevrey => None,
        }
    }

    pub fn member(&self, beta: f64, p: usize) -> Result<WeightSeq<f64>> {
        if !(beta > 0.0) {
            return Err(Error::InvalidParameter(format!("family parameter must be positive, got {beta}")));
        }
        match self.exponent(beta) {
            Some(s) => WeightSeq::gevrey(s, p),
            None => {
                let d = dual(&WeightSeq::gevrey(1.0 / beta, p)?)?;
                let window = d.p_max().min(p);
                WeightSeq::from_log_values(d.name(), d.log_m()[..=window].to_vec())
                    .map(|s| s.with_provenance(d.provenance().to_vec()))
            }
        }
    }
}

/// `(a_j)^{1/j} = (n^{(k)}_{j_k})^{1/j_k}` on `[start, next start)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Plateau {
    pub k: usize,
    pub start: u64,
    pub log_root: f64,
    /// `start` is below 2^53, so the root was evaluated at the exact index.
    pub exact: bool,
}

/// Bound `a` with `n^{(k)} ≤ D_k a` for every member of a family.
#[derive(Clone, Debug, Serialize)]
pub struct UniformBound {
    pub family: SequenceFamily,
    pub plateaus: Vec<Plateau>,
    pub window: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct UniformBoundCheck {
    pub roots_non_increasing: bool,
    /// `a_P^{1/P}`.
    pub root_at_window_end: f64,
    /// `(k, j_{k+1}, min_j ln(a_j^{1/j}/(n^{(k)}_j)^{1/j}) − ln k)` over the checked points.
    pub ratio_margins: Vec<(usize, u64, f64)>,
    pub ratio_holds: bool,
}

/// `ln (n^{(β)}_j)^{1/j}` for the little sequence `N/j!` of a closed-form member.
fn little_log_root(exponent: f64, j: f64) -> f64 {
    (exponent - 1.0) * ln_gamma(j + 1.0) / j
}

impl UniformBound {
    /// `ln a_j^{1/j}` for `j ≥ 1`.
    pub fn log_root(&self, j: u64) -> f64 {
        let i = self.plateaus.partition_point(|pl| pl.start <= j);
        self.plateaus[i.saturating_sub(1)].log_root
    }

    pub fn ln_a(&self, j: u64) -> f64 {
        if j == 0 {
            0.0
        } else {
            j as f64 * self.log_root(j)
        }
    }

    /// Recorded index `j_{k+1}` from which the ratio against member `k` is at least `k`.
    pub fn breakpoint(&self, k: usize) -> Option<u64> {
        self.plateaus.iter().find(|pl| pl.k == k + 1).map(|pl| pl.start)
    }

    /// The bound on `0..=p` as a log-domain sequence.
    pub fn to_sequence(&self, p: usize) -> Result<WeightSeq<f64>> {
        let vals = (0..=p as u64).map(|j| self.ln_a(j)).collect();
        WeightSeq::from_log_values("uniform-bound", vals)
    }

    /// Checks the three output properties on `1..=p` and at geometric samples
    /// up to sixteen times the last breakpoint.
    pub fn check(&self, p: usize) -> UniformBoundCheck {
        let roots_non_increasing = (1..p as u64).all(|j| self.log_root(j + 1) <= self.log_root(j))
            && self.plateaus.windows(2).all(|w| w[1].log_root <= w[0].log_root);
        let last = self.plateaus.last().map_or(1, |pl| pl.start);
        let mut ratio_margins = Vec::new();
        for pl in self.plateaus.iter().skip(1) {
            let k = pl.k - 1;
            let e = self.family.exponent(k as f64).unwrap_or(f64::NAN);
            let mut points: Vec<u64> = (pl.start..=(p as u64).max(pl.start)).take(p).collect();
            let mut j = pl.start as f64;
            let end = (last as f64) * 16.0;
            while j < end {
                j *= 1.01;
                points.push(j as u64);
            }
            let margin = points
                .iter()
                .map(|&j| self.log_root(j) - little_log_root(e, j as f64) - (k as f64).ln())
                .fold(f64::INFINITY, f64::min);
            ratio_margins.push((k, pl.start, margin));
        }
        let ratio_holds = ratio_margins.iter().all(|&(_, _, m)| m >= -1e-12);
        UniformBoundCheck {
            roots_non_increasing,
            root_at_window_end: self.log_root(p as u64).exp(),
            ratio_margins,
            ratio_holds,
        }
    }
}

/// Builds the bound for members `β = 1..=K+1` of a closed-form family.
///
/// Hypotheses are checked on `0..=p`. Breakpoints are searched through the
/// closed form beyond the window.
pub fn uniform_bound_construct(family: SequenceFamily, k_max: usize, p: usize) -> Result<UniformBound> {
    if k_max == 0 {
        return Err(Error::InvalidParameter("K must be at least 1".to_string()));
    }
    let exps: Vec<f64> = (1..=k_max + 1)
        .map(|k| {
            family.exponent(k as f64).ok_or_else(|| Error::Hypothesis {
                item: "(v)",
                detail: format!("{family:?} has no closed form to certify the growth difference"),
            })
        })
        .collect::<Result<_>>()?;
    let members: Vec<WeightSeq<f64>> = (1..=k_max + 1)
        .map(|k| family.member(k as f64, p).and_then(|m| m.little_m()))
        .collect::<Result<_>>()?;
    check_hypotheses(&members, &exps, p)?;

    let lr = |k: usize, j: u64| little_log_root(exps[k - 1], j as f64);
    let mut plateaus = vec![Plateau {
        k: 1,
        start: 1,
        log_root: lr(1, 1),
        exact: true,
    }];
    for k in 1..=k_max {
        let jk = plateaus[k - 1].start;
        let vk = plateaus[k - 1].log_root;
        let lnk = (k as f64).ln();
        let j1 = search_up_u64(jk + 1, HORIZON, |j| vk > lnk + lr(k + 1, j));
        let j2 = search_up_u64(1, HORIZON, |j| lr(k + 1, j) - lr(k, j) >= lnk);
        let (Some(j1), Some(j2)) = (j1, j2) else {
            return Err(Error::Horizon(format!("no breakpoint j_{} below 2^62", k + 1)));
        };
        let next = j1.max(j2).max(jk + 1);
        plateaus.push(Plateau {
            k: k + 1,
            start: next,
            log_root: lr(k + 1, next),
            exact: next <= EXACT_LIMIT,
        });
    }
    Ok(UniformBound {
        family,
        plateaus,
        window: p,
    })
}

fn check_hypotheses(members: &[WeightSeq<f64>], exps: &[f64], p: usize) -> Result<()> {
    let tol = 1e-12;
    let fail = |item: &'static str, detail: String| Err(Error::Hypothesis { item, detail });
    let root = |m: &WeightSeq<f64>, j: usize| m.log_m()[j] / j as f64;
    for (i, m) in members.iter().enumerate() {
        let k = i + 1;
        if m.log_m()[0] != 0.0 {
            return fail("(i)", format!("member {k} has N_0 ≠ 1"));
        }
        if exps[i] >= 1.0 || root(m, p) >= root(m, p / 2) {
            return fail("(iii)", format!("roots of member {k} do not tend to 0"));
        }
        if let Some(j) = (1..p).find(|&j| root(m, j + 1) > root(m, j) + tol) {
            return fail("(iv)", format!("root of member {k} increases at j = {j}"));
        }
    }
    for (i, w) in members.windows(2).enumerate() {
        let k = i + 1;
        if let Some(j) = (0..=p).find(|&j| w[0].log_m()[j] > w[1].log_m()[j] + tol) {
            return fail("(ii)", format!("member {k} exceeds member {} at j = {j}", k + 1));
        }
        let ratio = |j: usize| root(&w[1], j) - root(&w[0], j);
        if exps[i + 1] <= exps[i] {
            return fail("(v)", format!("no growth difference between members {k} and {}", k + 1));
        }
        if let Some(j) = (1..p).find(|&j| ratio(j + 1) < ratio(j) - tol) {
            return fail("(v)", format!("root ratio of members {k}, {} decreases at j = {j}", k + 1));
        }
    }
    Ok(())
}
