//! Growth majorants for Taylor extensions, Cauchy-estimate restriction bounds and
//! weighted sup-norms of entire functions given by their coefficients.

use crate::error::{Error, Result};
use crate::numeric::{ln_gamma, LogSum, WideReal};
use crate::seqcore::{FamilyDesc, SequenceFile, WeightSeq};
use crate::transforms::conjugate;
use crate::weights::omega;
use serde::Serialize;
use std::collections::BTreeMap;

const LN_CUTOFF: f64 = -36.841_361_487_904_734; // ln 1e-16
const MAX_TERMS: usize = 10_000_000;
const CIRCLE_POINTS: usize = 64;

/// `F(z) = Σ_k b_k z^k` through `ln|b_k|` (−∞ for zero) and optional signs.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientFunction {
    logc: Vec<f64>,
    signs: Option<Vec<i8>>,
}

impl CoefficientFunction {
    pub fn new(logc: Vec<f64>, signs: Option<Vec<i8>>) -> Result<Self> {
        if logc.len() < 9 {
            return Err(Error::WindowTooSmall("coefficient functions need K ≥ 8".to_string()));
        }
        if let Some(index) = logc.iter().position(|v| v.is_nan() || *v == f64::INFINITY) {
            return Err(Error::NonFinite { index });
        }
        if let Some(s) = &signs {
            if s.len() != logc.len() || s.iter().any(|&x| x != 1 && x != -1) {
                return Err(Error::InvalidParameter("signs must be ±1, one per coefficient".to_string()));
            }
        }
        Ok(CoefficientFunction { logc, signs })
    }

    /// `b_j = 1/M*_j` for `j ≤ K`.
    pub fn reciprocal_of(mstar: &WeightSeq<f64>, k: usize) -> Result<Self> {
        let logc = (0..=k)
            .map(|j| {
                mstar
                    .log_m_at(j)
                    .map(|v| -v)
                    .ok_or_else(|| Error::Truncation(format!("M*_{j} is beyond the window")))
            })
            .collect::<Result<_>>()?;
        Self::new(logc, None)
    }

    /// Only `b_0 = 1`.
    pub fn constant_one(k: usize) -> Result<Self> {
        let mut logc = vec![f64::NEG_INFINITY; k.max(8) + 1];
        logc[0] = 0.0;
        Self::new(logc, None)
    }

    pub fn k(&self) -> usize {
        self.logc.len() - 1
    }

    pub fn logc(&self) -> &[f64] {
        &self.logc
    }

    fn sign(&self, j: usize) -> i8 {
        self.signs.as_ref().map_or(1, |s| s[j])
    }

    /// `ln Σ_k |b_k| t^k`.
    pub fn ln_radial_majorant(&self, t: f64) -> f64 {
        if t == 0.0 {
            return self.logc[0];
        }
        let lt = t.ln();
        let mut acc = LogSum::new();
        for (k, &c) in self.logc.iter().enumerate() {
            acc.push(c + k as f64 * lt);
        }
        acc.value()
    }

    /// `F^{(n)}(x) = Σ_{j≥n} b_j·j!/(j−n)!·x^{j−n}` as a signed wide value.
    pub fn derivative_at(&self, n: usize, x: f64) -> WideReal {
        if n > self.k() {
            return WideReal::ZERO;
        }
        let lx = x.abs().ln();
        let terms: Vec<WideReal> = (n..=self.k())
            .filter(|&j| self.logc[j] > f64::NEG_INFINITY && (j == n || x != 0.0))
            .map(|j| {
                let e = j - n;
                let ln = self.logc[j] + ln_gamma(j as f64 + 1.0) - ln_gamma(e as f64 + 1.0)
                    + if e == 0 { 0.0 } else { e as f64 * lx };
                let negative = (self.sign(j) < 0) ^ (x < 0.0 && e % 2 == 1);
                if negative {
                    WideReal::negative_from_ln(ln)
                } else {
                    WideReal::positive_from_ln(ln)
                }
            })
            .collect();
        terms.into_iter().fold(WideReal::ZERO, WideReal::add)
    }

    /// Envelope with role `coefficients`; all coefficients must be nonzero.
    pub fn to_file(&self, name: &str) -> Result<SequenceFile> {
        if let Some(index) = self.logc.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        if self.signs.is_some() {
            return Err(Error::InvalidParameter("signed coefficients have no file form".to_string()));
        }
        Ok(SequenceFile {
            name: name.to_string(),
            p: self.k(),
            family: FamilyDesc {
                kind: "custom".to_string(),
                params: BTreeMap::new(),
            },
            log_m: Some(self.logc.clone()),
            provenance: Vec::new(),
            role: Some("coefficients".to_string()),
        })
    }

    pub fn from_file(file: &SequenceFile) -> Result<Self> {
        if file.role.as_deref() != Some("coefficients") {
            return Err(Error::Parse("file is not tagged with role 'coefficients'".to_string()));
        }
        let logc = file.log_m.clone().ok_or_else(|| Error::Parse("coefficients need logM".to_string()))?;
        Self::new(logc, None)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MajorantPoint {
    pub z_abs: f64,
    /// `ln(A·Σ_k (h|z|)^k M_k/k!)`.
    pub ln_lhs: f64,
    /// `ln(2A·e^{ω_{M*}(2h|z|)})`.
    pub ln_rhs: f64,
    pub holds: bool,
}

/// Both sides of `A·Σ_k (h|z|)^k M_k/k! ≤ 2A·e^{ω_{M*}(2h|z|)}`.
pub fn taylor_majorant(m: &WeightSeq<f64>, h: f64, a: f64, z_abs: f64) -> Result<MajorantPoint> {
    if !(h > 0.0 && a > 0.0 && z_abs >= 0.0) {
        return Err(Error::InvalidParameter("need h > 0, A > 0, |z| ≥ 0".to_string()));
    }
    let mstar = conjugate(m)?;
    let w = omega(&mstar, 2.0 * h * z_abs);
    if !w.trusted {
        return Err(Error::Untrusted(format!(
            "ω of the conjugate at {} ({:?}); enlarge P beyond {}",
            2.0 * h * z_abs,
            w.source,
            m.p_max()
        )));
    }
    let ln_hz = (h * z_abs).ln();
    let mut acc = LogSum::new();
    let mut prev = f64::NEG_INFINITY;
    let mut past_peak = false;
    let mut k = 0usize;
    loop {
        if k > MAX_TERMS {
            return Err(Error::Horizon("majorant series did not converge".to_string()));
        }
        let lm = mstar.log_m_at(k).ok_or_else(|| {
            Error::Untrusted(format!("series reaches k = {k} beyond the window; enlarge P"))
        })?;
        let term = if k == 0 { -lm } else { k as f64 * ln_hz - lm };
        acc.push(term);
        if z_abs == 0.0 {
            break;
        }
        past_peak |= term < prev;
        if past_peak && term < acc.value() + LN_CUTOFF {
            break;
        }
        prev = term;
        k += 1;
    }
    let ln_lhs = a.ln() + acc.value();
    let ln_rhs = (2.0 * a).ln() + w.value;
    Ok(MajorantPoint {
        z_abs,
        ln_lhs,
        ln_rhs,
        holds: ln_lhs <= ln_rhs + 1e-9f64.ln_1p(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RestrictionRegime {
    /// `μ*_n/(2k) ≥ 2|x|`, Cauchy estimate on the circle of radius `μ*_n/(2k)`.
    LargeN,
    /// Finitely many small `n`, bound carries the extra constant `n₀!·e^{ω_{M*}(2kR)}`.
    FiniteException,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RestrictionReport {
    pub n: usize,
    pub ln_deriv_norm: f64,
    pub ln_bound: f64,
    pub regime: RestrictionRegime,
    /// Radius of the circle used in the large-n regime.
    pub radius: f64,
    /// `n₀` and `ln C` in the finite-exception regime.
    pub n0: usize,
    pub ln_constant: f64,
    pub holds: bool,
}

/// `|F^{(n)}(x)|` against `A·(2k)^n·M_n` (times `C` for the finitely many small `n`),
/// with `M_n = n!/M*_n`.
pub fn cauchy_restriction_bound(
    f: &CoefficientFunction,
    mstar: &WeightSeq<f64>,
    a: f64,
    k: f64,
    x: f64,
    n: usize,
) -> Result<RestrictionReport> {
    if !(a > 0.0 && k > 0.0) {
        return Err(Error::InvalidParameter("need A > 0 and k > 0".to_string()));
    }
    let ln_mstar_n = mstar
        .log_m_at(n)
        .ok_or_else(|| Error::Truncation(format!("M*_{n} is beyond the window")))?;
    let ln_mu_n = mstar
        .log_mu_at(n)
        .ok_or_else(|| Error::Truncation(format!("μ*_{n} is beyond the window")))?;
    let ln_m_n = ln_gamma(n as f64 + 1.0) - ln_mstar_n;
    let base = a.ln() + n as f64 * (2.0 * k).ln() + ln_m_n;
    let deriv = f.derivative_at(n, x);
    let ln_deriv_norm = deriv.ln_abs;
    let r_abs = x.abs();
    let radius = if n == 0 { 0.0 } else { ln_mu_n.exp() / (2.0 * k) };
    let large = n > 0 && radius >= 2.0 * r_abs;
    let (regime, n0, ln_constant) = if large {
        check_growth_on_circle(f, mstar, a, k, x, radius)?;
        (RestrictionRegime::LargeN, 0, 0.0)
    } else {
        let limit = mstar.p_max();
        let n0 = (1..=limit)
            .take_while(|&j| mstar.log_mu_at(j).is_some_and(|l| l.exp() / (2.0 * k) < 2.0 * r_abs))
            .count();
        let w = omega(mstar, 2.0 * k * r_abs);
        if !w.trusted {
            return Err(Error::Untrusted(format!("ω of M* at {}", 2.0 * k * r_abs)));
        }
        (RestrictionRegime::FiniteException, n0, ln_gamma(n0 as f64 + 1.0) + w.value)
    };
    let ln_bound = base + ln_constant;
    Ok(RestrictionReport {
        n,
        ln_deriv_norm,
        ln_bound,
        regime,
        radius,
        n0,
        ln_constant,
        holds: ln_deriv_norm <= ln_bound + 1e-6f64.ln_1p(),
    })
}

/// `|F(z)| ≤ A·e^{ω_{M*}(k|z|)}` through the radial majorant at points of the circle `|z − x| = r`.
fn check_growth_on_circle(f: &CoefficientFunction, mstar: &WeightSeq<f64>, a: f64, k: f64, x: f64, r: f64) -> Result<()> {
    for i in 0..CIRCLE_POINTS {
        let theta = std::f64::consts::TAU * i as f64 / CIRCLE_POINTS as f64;
        let (re, im) = (x + r * theta.cos(), r * theta.sin());
        let t = re.hypot(im);
        let w = omega(mstar, k * t);
        if !w.trusted {
            return Err(Error::Untrusted(format!("ω of M* at {} on the Cauchy circle", k * t)));
        }
        let lhs = f.ln_radial_majorant(t);
        if lhs > a.ln() + w.value + 1e-12 * (1.0 + lhs.abs()) {
            return Err(Error::Certificate(format!(
                "|F(z)| majorant e^{lhs} exceeds A·e^ω = e^{} at |z| = {t}",
                a.ln() + w.value
            )));
        }
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NormReport {
    pub ln_norm: f64,
    pub argmax_t: f64,
    /// Supremum attained at the first or last grid point.
    pub at_boundary: bool,
}

/// `sup_t Σ_k |b_k| t^k · e^{−power·ω_M(c·t)}` over a radius grid.
pub fn weighted_sup_norm(
    f: &CoefficientFunction,
    m: &WeightSeq<f64>,
    c: f64,
    power: f64,
    radius_grid: &[f64],
) -> Result<NormReport> {
    if !(c > 0.0 && power > 0.0) || radius_grid.is_empty() {
        return Err(Error::InvalidParameter("need c > 0, power > 0 and a non-empty grid".to_string()));
    }
    let mut best = (f64::NEG_INFINITY, 0usize);
    for (i, &t) in radius_grid.iter().enumerate() {
        let w = omega(m, c * t);
        if !w.trusted {
            return Err(Error::Untrusted(format!("ω at {} ({:?}); enlarge P", c * t, w.source)));
        }
        let v = f.ln_radial_majorant(t) - power * w.value;
        if v > best.0 {
            best = (v, i);
        }
    }
    Ok(NormReport {
        ln_norm: best.0,
        argmax_t: radius_grid[best.1],
        at_boundary: best.1 == 0 || best.1 + 1 == radius_grid.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::geometric_grid;

    #[test]
    fn majorant_for_constant_sequence() {
        let g0 = WeightSeq::gevrey(0.0, 128).unwrap();
        for z in [1.0, 5.0, 20.0] {
            let pt = taylor_majorant(&g0, 1.0, 3.0, z).unwrap();
            assert!((pt.ln_lhs - (3f64.ln() + z)).abs() < 1e-12);
            assert!(pt.holds);
        }
        let zero = taylor_majorant(&g0, 1.0, 3.0, 0.0).unwrap();
        assert!((zero.ln_lhs - 3f64.ln()).abs() < 1e-15 && (zero.ln_rhs - 6f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn majorant_on_grid() {
        let g = WeightSeq::gevrey(0.5, 128).unwrap();
        for z in geometric_grid(0.5, 50.0, 20) {
            assert!(taylor_majorant(&g, 1.0, 1.0, z).unwrap().holds);
        }
    }

    #[test]
    fn restriction_at_origin_is_exact() {
        let m = WeightSeq::gevrey(0.5, 128).unwrap();
        let mstar = conjugate(&m).unwrap();
        let f = CoefficientFunction::reciprocal_of(&mstar, 100).unwrap();
        let r = cauchy_restriction_bound(&f, &mstar, 2.0, 2.0, 0.0, 10).unwrap();
        assert!((r.ln_deriv_norm - m.log_m()[10]).abs() < 1e-10);
        assert!(r.holds && r.regime == RestrictionRegime::LargeN);
        let r0 = cauchy_restriction_bound(&f, &mstar, 2.0, 2.0, 0.0, 0).unwrap();
        assert_eq!(r0.ln_deriv_norm, 0.0);
        assert!(r0.ln_bound >= 2f64.ln() - 1e-15);
    }

    #[test]
    fn restriction_off_origin() {
        let m = WeightSeq::gevrey(0.25, 128).unwrap();
        let mstar = conjugate(&m).unwrap();
        let f = CoefficientFunction::reciprocal_of(&mstar, 120).unwrap();
        for n in [5, 10, 20] {
            let r = cauchy_restriction_bound(&f, &mstar, 2.0, 2.0, 0.5, n).unwrap();
            assert!(r.holds, "{r:?}");
        }
    }

    #[test]
    fn growth_certificate_rejects_large_coefficients() {
        let mstar = conjugate(&WeightSeq::gevrey(0.5, 64).unwrap()).unwrap();
        let f = CoefficientFunction::new(vec![5.0; 40], None).unwrap();
        assert!(matches!(
            cauchy_restriction_bound(&f, &mstar, 1.0, 1.0, 0.0, 10),
            Err(Error::Certificate(_))
        ));
    }

    #[test]
    fn norm_of_constant_function() {
        let m = WeightSeq::gevrey(0.5, 64).unwrap();
        let f = CoefficientFunction::constant_one(8).unwrap();
        let r = weighted_sup_norm(&f, &m, 2.0, 1.0, &geometric_grid(0.1, 20.0, 30)).unwrap();
        assert_eq!(r.ln_norm, 0.0);
        assert!(r.argmax_t <= 1.0 / 2.0);
    }

    #[test]
    fn signed_derivative() {
        // F(z) = 1 − z + z² − ..., F'(x) at x = 0.5 from the closed form −1/(1+x)² truncated
        let k = 60;
        let signs = (0..=k).map(|j| if j % 2 == 0 { 1 } else { -1 }).collect();
        let f = CoefficientFunction::new(vec![0.0; k + 1], Some(signs)).unwrap();
        let d = f.derivative_at(1, 0.5).to_f64();
        assert!((d + 1.0 / 2.25).abs() < 1e-12, "{d}");
    }

    #[test]
    fn coefficient_file_round_trip() {
        let mstar = conjugate(&WeightSeq::gevrey(0.5, 64).unwrap()).unwrap();
        let f = CoefficientFunction::reciprocal_of(&mstar, 20).unwrap();
        let file = f.to_file("recip").unwrap();
        assert_eq!(CoefficientFunction::from_file(&file).unwrap(), f);
        assert!(CoefficientFunction::constant_one(8).unwrap().to_file("one").is_err());
    }
}
