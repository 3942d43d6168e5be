//! Countable diagonal models of a normal operator `A`.
//!
//! Eigenvalues sit on the positive axis, so a vector `f = Σ c_n e_n` belongs
//! to a class exactly when a weighted coefficient sum converges. Indices
//! `k(n)` of the counterexample grow like `e^{4n²}` and are carried through
//! their logarithms.

use crate::analysis::{Status, Verdict, Witness};
use crate::error::{Error, Result};
use crate::numeric::{bisect_increasing, search_up_u64, wide_log_sum, WideReal};
use crate::seqcore::WeightSeq;
use crate::weights::GrowthGauge;
use crate::weights::omega_wide;
use serde::Serialize;
use std::cell::RefCell;
use std::f64::consts::LN_2;

/// Integers up to this bound are stored exactly.
const EXACT_LIMIT: u64 = 1 << 53;
/// Below this index the gauge need not be monotone, so the search is linear.
const LINEAR_SCAN: u64 = 4096;
/// Largest `ln k` the continuous search will consider.
const LN_K_HORIZON: f64 = 1e15;

/// An index `k`, exact while it fits, otherwise through `ln k`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RingIndex {
    pub ln_k: f64,
    pub exact: Option<u64>,
}

impl RingIndex {
    pub fn exact(k: u64) -> Self {
        RingIndex {
            ln_k: (k as f64).ln(),
            exact: Some(k),
        }
    }

    /// `k·x + y`.
    pub fn affine(&self, x: f64, y: f64) -> WideReal {
        match self.exact {
            Some(k) if k <= EXACT_LIMIT => WideReal::from_f64(k as f64 * x + y),
            _ => WideReal::from_f64(x).scale_ln(self.ln_k).add(WideReal::from_f64(y)),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DiagonalOperatorModel {
    /// `k(n)` for `n = 1..=N`.
    pub rings: Vec<RingIndex>,
    /// `λ_n − k(n)`.
    pub shifts: Vec<f64>,
    /// `ln ε_n`; empty for models given by eigenvalues.
    pub ln_eps: Vec<f64>,
    /// `ln g(k(n))`; empty for models given by eigenvalues.
    pub ln_g: Vec<f64>,
    /// `n₀` in `g(k(n)) ≥ n + n₀`.
    pub offset: u64,
}

/// Coefficients `ln |c_n|`, `None` for `c_n = 0`.
#[derive(Clone, Debug, Serialize)]
pub struct SpectralVector {
    pub logc: Vec<Option<WideReal>>,
    /// `c_n = g(k(n))^{-(k(n)+1-ε_n)}` of the paired counterexample model.
    pub canonical: bool,
}

impl SpectralVector {
    pub fn from_log_coefficients(logc: Vec<Option<WideReal>>) -> Self {
        SpectralVector { logc, canonical: false }
    }

    /// Multiplies every coefficient by `e^{ln_s}`.
    pub fn scaled(&self, ln_s: f64) -> Self {
        SpectralVector {
            logc: self.logc.iter().map(|c| c.map(|v| v.add(WideReal::from_f64(ln_s)))).collect(),
            canonical: false,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RingReport {
    pub ring_membership: bool,
    pub k_increasing: bool,
    pub k_at_least_n: bool,
    pub n_at_most_g: bool,
    pub eps_rule: bool,
}

impl DiagonalOperatorModel {
    /// Model with the given increasing positive eigenvalues.
    pub fn from_eigenvalues(lambdas: &[f64]) -> Result<Self> {
        if lambdas.iter().any(|&l| !(l > 0.0) || !l.is_finite()) || lambdas.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParameter("eigenvalues must be positive and increasing".to_string()));
        }
        let rings = lambdas.iter().map(|&l| RingIndex::exact(l.floor() as u64)).collect();
        let shifts = lambdas.iter().map(|&l| l - l.floor()).collect();
        Ok(DiagonalOperatorModel {
            rings,
            shifts,
            ln_eps: Vec::new(),
            ln_g: Vec::new(),
            offset: 0,
        })
    }

    pub fn n_terms(&self) -> usize {
        self.rings.len()
    }

    /// `ln λ_n` for `n = 1..=N` (stored at `n − 1`).
    pub fn ln_lambda(&self, i: usize) -> f64 {
        let r = &self.rings[i];
        match r.exact {
            Some(k) if k <= EXACT_LIMIT => (k as f64 + self.shifts[i]).ln(),
            _ => r.ln_k + (self.shifts[i] * (-r.ln_k).exp()).ln_1p(),
        }
    }

    /// `a·λ_n + b`.
    fn lambda_affine(&self, i: usize, a: f64, b: f64) -> WideReal {
        self.rings[i].affine(a, a * self.shifts[i] + b)
    }

    pub fn check_invariants(&self) -> RingReport {
        let n = self.n_terms();
        let eps = |i: usize| self.ln_eps.get(i).map_or(0.0, |l| l.exp());
        let ring_membership = (0..n).all(|i| self.shifts[i] > -eps(i) && self.shifts[i] < 1.0 - eps(i));
        let k_increasing = self.rings.windows(2).all(|w| match (w[0].exact, w[1].exact) {
            (Some(a), Some(b)) => b > a,
            _ => w[1].ln_k > w[0].ln_k,
        });
        let k_at_least_n = self.rings.iter().enumerate().all(|(i, r)| match r.exact {
            Some(k) => k >= i as u64 + 1,
            None => r.ln_k >= ((i + 1) as f64).ln(),
        });
        let n_at_most_g = self.ln_g.len() == n
            && self
                .ln_g
                .iter()
                .enumerate()
                .all(|(i, &lg)| lg >= ((i as u64 + 1 + self.offset) as f64).ln() - 1e-12);
        let eps_rule = self.ln_eps.len() == n
            && self.ln_eps.iter().enumerate().all(|(i, &le)| {
                let bound = if i == 0 { 1.0f64 } else { (1.0 / (i + 1) as f64).min(self.ln_eps[i - 1].exp()) };
                le.exp() < bound
            });
        RingReport {
            ring_membership,
            k_increasing,
            k_at_least_n,
            n_at_most_g,
            eps_rule,
        }
    }
}

/// Builds the divergent vector of the counterexample.
///
/// `k(n)` is the smallest integer above `k(n−1)` with `k(n) ≥ n` and
/// `g(k(n)) ≥ n + offset`; `ε_1 = 1/4`, `ε_n = min(1/n, ε_{n−1})/2`,
/// `λ_n = k(n) + 1/2` and `c_n = g(k(n))^{-(k(n)+1-ε_n)}`.
pub fn build_counterexample(
    gauge: &GrowthGauge,
    n_terms: usize,
    offset: u64,
) -> Result<(DiagonalOperatorModel, SpectralVector)> {
    if n_terms == 0 {
        return Err(Error::InvalidParameter("N_terms must be positive".to_string()));
    }
    let err = RefCell::new(None::<Error>);
    let ln_g = |ln_k: f64| match gauge.ln_g_at(ln_k) {
        Ok(v) => v,
        Err(e) => {
            err.borrow_mut().get_or_insert(e);
            f64::NAN
        }
    };
    let mut rings: Vec<RingIndex> = Vec::with_capacity(n_terms);
    let mut ln_eps = Vec::with_capacity(n_terms);
    let mut lgs = Vec::with_capacity(n_terms);
    for n in 1..=n_terms as u64 {
        let target = ((n + offset) as f64).ln();
        let prev = rings.last().copied();
        let found = match prev.map(|r| r.exact) {
            None | Some(Some(_)) => {
                let start = prev.and_then(|r| r.exact).map_or(1, |k| k + 1).max(n);
                let ok = |k: u64| ln_g((k as f64).ln()) >= target;
                let linear = (start..LINEAR_SCAN.max(start)).find(|&k| ok(k));
                linear.or_else(|| search_up_u64(LINEAR_SCAN.max(start), EXACT_LIMIT, ok))
            }
            Some(None) => None,
        };
        if let Some(e) = err.borrow_mut().take() {
            return Err(e);
        }
        let ring = match found {
            Some(k) => RingIndex::exact(k),
            None => {
                let lo = prev.map_or(0.0, |r| r.ln_k).max((EXACT_LIMIT as f64).ln());
                let mut hi = lo * 2.0 + 1.0;
                while !(ln_g(hi) >= target) {
                    if let Some(e) = err.borrow_mut().take() {
                        return Err(e);
                    }
                    if hi > LN_K_HORIZON {
                        return Err(Error::Horizon(format!("g stays below {} up to k = e^{hi:e}", n + offset)));
                    }
                    hi *= 2.0;
                }
                let mut ln_k = bisect_increasing(lo, hi, |x| ln_g(x) - target, 1e-15);
                if let Some(p) = prev {
                    if ln_k <= p.ln_k {
                        ln_k = f64::from_bits(p.ln_k.to_bits() + 1);
                    }
                }
                RingIndex { ln_k, exact: None }
            }
        };
        let lg = ln_g(ring.ln_k);
        if let Some(e) = err.borrow_mut().take() {
            return Err(e);
        }
        let le = match ln_eps.last() {
            None => -2.0 * LN_2,
            Some(&p) => (-(n as f64).ln()).min(p) - LN_2,
        };
        rings.push(ring);
        ln_eps.push(le);
        lgs.push(lg);
    }
    let logc = rings
        .iter()
        .zip(&ln_eps)
        .zip(&lgs)
        .map(|((r, &le), &lg)| Some(r.affine(-lg, -(1.0 - le.exp()) * lg)))
        .collect();
    let n = rings.len();
    Ok((
        DiagonalOperatorModel {
            rings,
            shifts: vec![0.5; n],
            ln_eps,
            ln_g: lgs,
            offset,
        },
        SpectralVector { logc, canonical: true },
    ))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SumStatus {
    Converged,
    Diverged,
    Undecided,
}

/// Truncated coefficient sum `Σ e^{L_n}` with its certificates.
#[derive(Clone, Debug, Serialize)]
pub struct SumReport {
    /// `ln` of the partial sum.
    pub ln_partial_sum: WideReal,
    /// `L_n`, `None` for vanishing terms.
    pub log_terms: Vec<Option<WideReal>>,
    pub status: SumStatus,
    /// Largest `L_n − L_{n−1}` over the last quartile.
    pub tail_max_log_ratio: Option<WideReal>,
    /// First `n` (1-based) from which every term is at least 1.
    pub divergent_from: Option<usize>,
}

fn certify(log_terms: Vec<Option<WideReal>>) -> SumReport {
    let n = log_terms.len();
    let q = n - n / 4;
    let mut tail_ok = true;
    let mut tail_max: Option<WideReal> = None;
    for i in q.max(1)..n {
        match (log_terms[i - 1], log_terms[i]) {
            (_, None) => {}
            (None, Some(_)) => tail_ok = false,
            (Some(a), Some(b)) => {
                let r = b.sub(a);
                if !r.le_f64(-LN_2) {
                    tail_ok = false;
                }
                if tail_max.map_or(true, |m| r.cmp_total(m).is_gt()) {
                    tail_max = Some(r);
                }
            }
        }
    }
    let start = log_terms
        .iter()
        .rposition(|l| !l.is_some_and(|v| v.ge_f64(0.0)))
        .map_or(0, |i| i + 1);
    let divergent = start < n && start <= 3 * n / 4;
    let status = match (tail_ok, divergent) {
        (true, false) => SumStatus::Converged,
        (false, true) => SumStatus::Diverged,
        _ => SumStatus::Undecided,
    };
    let present: Vec<WideReal> = log_terms.iter().flatten().copied().collect();
    SumReport {
        ln_partial_sum: if present.is_empty() {
            WideReal::negative_from_ln(f64::INFINITY)
        } else {
            wide_log_sum(&present)
        },
        log_terms,
        status,
        tail_max_log_ratio: tail_max,
        divergent_from: divergent.then_some(start + 1),
    }
}

fn check_pair(model: &DiagonalOperatorModel, f: &SpectralVector) -> Result<()> {
    if model.n_terms() != f.logc.len() || model.n_terms() == 0 {
        return Err(Error::InvalidParameter(format!(
            "model has {} eigenvalues, vector {} coefficients",
            model.n_terms(),
            f.logc.len()
        )));
    }
    Ok(())
}

/// `Σ |c_n|²`, the squared norm of the truncation.
pub fn square_sum(f: &SpectralVector) -> SumReport {
    certify(f.logc.iter().map(|c| c.map(|v| v.scale(2.0))).collect())
}

/// `Σ e^{2 ln|c_n| + 2tλ_n}`, membership in the exponential class `E_{(G¹)}(A)`.
pub fn exponential_class_sum(model: &DiagonalOperatorModel, f: &SpectralVector, t: f64) -> Result<SumReport> {
    check_pair(model, f)?;
    if !(t >= 0.0) {
        return Err(Error::InvalidParameter(format!("t must be non-negative, got {t}")));
    }
    let canonical = f.canonical && model.ln_g.len() == model.n_terms();
    let terms = (0..model.n_terms())
        .map(|i| {
            if canonical {
                // 2tλ − 2(k + 1 − ε) ln g, grouped by powers of k to keep the cancellation exact
                let lg = model.ln_g[i];
                let eps = model.ln_eps[i].exp();
                Some(model.lambda_affine(i, 2.0 * t - 2.0 * lg, -2.0 * (1.0 - eps) * lg))
            } else {
                f.logc[i].map(|c| c.scale(2.0).add(model.lambda_affine(i, 2.0 * t, 0.0)))
            }
        })
        .collect();
    Ok(certify(terms))
}

/// `Σ e^{2 ln|c_n| + 2ω_M(tλ_n)}`, membership in `E_{{M}}(A)` at scale `t`.
pub fn weighted_class_sum(
    model: &DiagonalOperatorModel,
    f: &SpectralVector,
    m: &WeightSeq<f64>,
    t: f64,
) -> Result<SumReport> {
    check_pair(model, f)?;
    if !(t > 0.0) {
        return Err(Error::InvalidParameter(format!("t must be positive, got {t}")));
    }
    let terms = (0..model.n_terms())
        .map(|i| match f.logc[i] {
            None => Ok(None),
            Some(c) => {
                let w = omega_wide(m, t.ln() + model.ln_lambda(i))?;
                Ok(Some(c.scale(2.0).add(w.value.scale(2.0))))
            }
        })
        .collect::<Result<_>>()?;
    Ok(certify(terms))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Roumieu,
    Beurling,
}

impl Mode {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "roumieu" => Ok(Mode::Roumieu),
            "beurling" => Ok(Mode::Beurling),
            _ => Err(Error::Parse(format!("unknown mode '{s}'"))),
        }
    }
}

/// Membership of `f` in `E_{{M}}(A)` (some `t`) or `E_{(M)}(A)` (all `t`) on a grid.
pub fn membership_verdict(
    model: &DiagonalOperatorModel,
    f: &SpectralVector,
    m: &WeightSeq<f64>,
    mode: Mode,
    t_grid: &[f64],
) -> Result<Verdict> {
    if t_grid.is_empty() {
        return Err(Error::InvalidParameter("empty t grid".to_string()));
    }
    let mut statuses = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        statuses.push((t, weighted_class_sum(model, f, m, t)?.status));
    }
    let window = (1, model.n_terms());
    let first = |s: SumStatus| statuses.iter().find(|x| x.1 == s).map(|x| x.0);
    let all = |s: SumStatus| statuses.iter().all(|x| x.1 == s);
    let (status, witness) = match mode {
        Mode::Roumieu => match first(SumStatus::Converged) {
            Some(t) => (Status::Holds, Witness::Constant { value: t }),
            None if all(SumStatus::Diverged) => (Status::Fails, Witness::None),
            None => (Status::Inconclusive, Witness::None),
        },
        Mode::Beurling => match first(SumStatus::Diverged) {
            Some(t) => (Status::Fails, Witness::Constant { value: t }),
            None if all(SumStatus::Converged) => (Status::Holds, Witness::None),
            None => (Status::Inconclusive, Witness::None),
        },
    };
    let notes = statuses
        .iter()
        .map(|(t, s)| format!("t={t}: {s:?}"))
        .collect::<Vec<_>>()
        .join(", ");
    Ok(Verdict::new(status, witness, window, notes))
}

/// One CSV row of a scenario run.
#[derive(Clone, Debug, Serialize)]
pub struct ScenarioRow {
    pub n: usize,
    pub ln_k: f64,
    pub ln_eps: f64,
    pub ln_c: Option<WideReal>,
    /// `ln` of the exponential-class term at each grid `t`.
    pub ln_terms: Vec<Option<WideReal>>,
}

pub fn scenario_rows(model: &DiagonalOperatorModel, f: &SpectralVector, t_grid: &[f64]) -> Result<Vec<ScenarioRow>> {
    let sums = t_grid
        .iter()
        .map(|&t| exponential_class_sum(model, f, t))
        .collect::<Result<Vec<_>>>()?;
    Ok((0..model.n_terms())
        .map(|i| ScenarioRow {
            n: i + 1,
            ln_k: model.rings[i].ln_k,
            ln_eps: model.ln_eps.get(i).copied().unwrap_or(f64::NAN),
            ln_c: f.logc[i],
            ln_terms: sums.iter().map(|s| s.log_terms[i]).collect(),
        })
        .collect())
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundedSolutionReport {
    /// Largest relative gap between `‖y^{(n)}(t)‖` and `‖Aⁿy(t)‖`.
    pub max_rel_err: f64,
    pub derivative_identity_holds: bool,
    /// `C = max |λ|`.
    pub exp_type_constant: f64,
    /// Largest `‖y(z)‖ / (‖y₀‖ e^{C|z|})` over the complex grid.
    pub grid_max_ratio: f64,
    pub exp_type_holds: bool,
    pub grid_points: usize,
}

/// Solution `y(t) = e^{tA}y₀` of `y' = Ay` for diagonal `A`.
pub fn bounded_solution_check(eigs: &[f64], y0: &[f64], t: f64, n_max: u32) -> Result<BoundedSolutionReport> {
    if eigs.len() != y0.len() || eigs.is_empty() {
        return Err(Error::InvalidParameter("eigenvalue and initial vectors differ in length".to_string()));
    }
    let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let yt: Vec<f64> = eigs.iter().zip(y0).map(|(l, y)| (l * t).exp() * y).collect();
    let mut max_rel_err = 0.0f64;
    let mut power = yt.clone();
    for n in 0..=n_max {
        let direct: Vec<f64> = eigs.iter().zip(y0).map(|(l, y)| l.powi(n as i32) * (l * t).exp() * y).collect();
        let (a, b) = (norm(&direct), norm(&power));
        let err = if b == 0.0 { a } else { (a - b).abs() / b };
        max_rel_err = max_rel_err.max(err);
        power.iter_mut().zip(eigs).for_each(|(p, l)| *p *= l);
    }
    let c = eigs.iter().fold(0.0f64, |m, l| m.max(l.abs()));
    let n0 = norm(y0);
    let axis: Vec<f64> = (0..10).map(|i| -2.0 + 4.0 * i as f64 / 9.0).collect();
    let mut grid_max_ratio = 0.0f64;
    for &x in &axis {
        for &y in &axis {
            // |e^{λz}| = e^{λ Re z}
            let yz = eigs.iter().zip(y0).map(|(l, v)| ((l * x).exp() * v).powi(2)).sum::<f64>().sqrt();
            let bound = n0 * (c * x.hypot(y)).exp();
            if bound > 0.0 {
                grid_max_ratio = grid_max_ratio.max(yz / bound);
            }
        }
    }
    Ok(BoundedSolutionReport {
        max_rel_err,
        derivative_identity_holds: max_rel_err <= 1e-9,
        exp_type_constant: c,
        grid_max_ratio,
        exp_type_holds: grid_max_ratio <= 1.0 + 1e-12,
        grid_points: axis.len() * axis.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::GaugeBound;

    fn markin(n: usize, offset: u64) -> (DiagonalOperatorModel, SpectralVector) {
        build_counterexample(&GrowthGauge::evaluator(GaugeBound::Markin), n, offset).unwrap()
    }

    #[test]
    fn counterexample_invariants() {
        let (model, f) = markin(40, 0);
        let r = model.check_invariants();
        assert!(r.ring_membership && r.k_increasing && r.k_at_least_n && r.n_at_most_g && r.eps_rule, "{r:?}");
        assert!((model.ln_eps[2] - (-4.0 * LN_2)).abs() < 1e-15);
        assert_eq!(square_sum(&f).status, SumStatus::Converged);
    }

    #[test]
    fn exponential_sum_small_t() {
        let (model, f) = markin(120, 0);
        for t in [0.0, 0.5, 1.0, 2.0] {
            let s = exponential_class_sum(&model, &f, t).unwrap();
            assert_eq!(s.status, SumStatus::Converged, "t = {t}");
        }
    }

    #[test]
    fn offset_reaches_large_t() {
        let (model, f) = markin(120, 22027);
        for t in [5.0, 10.0] {
            let s = exponential_class_sum(&model, &f, t).unwrap();
            assert_eq!(s.status, SumStatus::Converged, "t = {t}");
        }
    }

    #[test]
    fn weighted_sum_diverges() {
        let (model, f) = markin(120, 0);
        let m = WeightSeq::gevrey(0.5, 256).unwrap();
        let s = weighted_class_sum(&model, &f, &m, 1.0).unwrap();
        assert_eq!(s.status, SumStatus::Diverged);
        assert!(s.divergent_from.unwrap() <= 90);
        let g0 = WeightSeq::gevrey(0.0, 64).unwrap();
        assert!(weighted_class_sum(&model, &f, &g0, 1.0).is_err());
    }

    #[test]
    fn finite_support_holds_in_both_modes() {
        let model = DiagonalOperatorModel::from_eigenvalues(&(1..=40).map(|n| n as f64).collect::<Vec<_>>()).unwrap();
        let mut logc = vec![None; 40];
        logc[0] = Some(WideReal::from_f64(0.0));
        logc[4] = Some(WideReal::from_f64(-1.0));
        let f = SpectralVector::from_log_coefficients(logc);
        let m = WeightSeq::gevrey(0.5, 256).unwrap();
        for mode in [Mode::Roumieu, Mode::Beurling] {
            assert!(membership_verdict(&model, &f, &m, mode, &[0.5, 1.0, 2.0]).unwrap().holds());
        }
    }

    #[test]
    fn scalar_solution() {
        let r = bounded_solution_check(&[2.0], &[1.0], 1.0, 3).unwrap();
        assert!(r.derivative_identity_holds && r.exp_type_holds);
        let r = bounded_solution_check(&[1.0, -1.0], &[1.0, 0.0], 0.0, 12).unwrap();
        assert!(r.max_rel_err < 1e-15);
        assert_eq!(r.exp_type_constant, 1.0);
    }
}
