//! Scalar trait and the log-domain kernels everything else is built on.

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use std::cmp::Ordering;
use std::fmt::{Debug, Display};

/// Floating point scalar the sequence core is generic over (`f32` or `f64`).
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal fits the scalar type")
    }

    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("index fits the scalar type")
    }

    /// Slack used by window predicates: a few hundred ulps, never tighter than 1e-12.
    fn slack() -> Self {
        let eps = Self::epsilon() * Self::lit(256.0);
        if eps > Self::lit(1e-12) {
            eps
        } else {
            Self::lit(1e-12)
        }
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// ln Γ(x) for x > 0.
///
/// Shifts the argument above 20 and uses the Stirling series there.
pub fn ln_gamma<T: Real>(x: T) -> T {
    assert!(x > T::zero(), "ln_gamma needs a positive argument");
    let ten = T::lit(20.0);
    let mut shift = T::zero();
    let mut y = x;
    let mut prod = T::one();
    while y < ten {
        prod = prod * y;
        y = y + T::one();
        // keep the running product away from overflow
        if prod > T::lit(1e30) {
            shift = shift + prod.ln();
            prod = T::one();
        }
    }
    shift = shift + prod.ln();
    let half = T::lit(0.5);
    let inv = y.recip();
    let inv2 = inv * inv;
    let series = inv
        * (T::lit(1.0 / 12.0)
            - inv2
                * (T::lit(1.0 / 360.0)
                    - inv2
                        * (T::lit(1.0 / 1260.0)
                            - inv2 * (T::lit(1.0 / 1680.0) - inv2 * T::lit(1.0 / 1188.0)))));
    (y - half) * y.ln() - y + half * (T::TAU()).ln() + series - shift
}

/// ln p! via [`ln_gamma`], exact zero for p ∈ {0, 1}.
pub fn ln_factorial<T: Real>(p: usize) -> T {
    if p < 2 {
        T::zero()
    } else {
        ln_gamma(T::from_usize_lossy(p + 1))
    }
}

/// ln Γ(x + 1) for real x ≥ 0.
pub fn ln_factorial_real<T: Real>(x: T) -> T {
    if x == T::zero() || x == T::one() {
        T::zero()
    } else {
        ln_gamma(x + T::one())
    }
}

/// Digamma ψ(x) for x > 0 (f64 only, used by the asymptotic evaluators).
pub fn digamma(mut x: f64) -> f64 {
    let mut acc = 0.0;
    while x < 20.0 {
        acc -= 1.0 / x;
        x += 1.0;
    }
    let inv2 = 1.0 / (x * x);
    acc + x.ln() - 0.5 / x
        - inv2 * (1.0 / 12.0 - inv2 * (1.0 / 120.0 - inv2 * (1.0 / 252.0 - inv2 / 240.0)))
}

/// Trigamma ψ'(x) for x > 0.
pub fn trigamma(mut x: f64) -> f64 {
    let mut acc = 0.0;
    while x < 20.0 {
        acc += 1.0 / (x * x);
        x += 1.0;
    }
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    acc + inv + 0.5 * inv2 + inv * inv2 * (1.0 / 6.0 - inv2 * (1.0 / 30.0 - inv2 / 42.0))
}

/// ln(e^a + e^b) without overflow.
pub fn ln_add<T: Real>(a: T, b: T) -> T {
    if a == T::neg_infinity() {
        return b;
    }
    if b == T::neg_infinity() {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// Streaming log-sum-exp accumulator.
#[derive(Clone, Copy, Debug)]
pub struct LogSum<T> {
    max: T,
    scaled: T,
}

impl<T: Real> Default for LogSum<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T: Real> LogSum<T> {
    pub fn new() -> Self {
        LogSum {
            max: T::neg_infinity(),
            scaled: T::zero(),
        }
    }

    pub fn push(&mut self, x: T) {
        if x == T::neg_infinity() {
            return;
        }
        if x <= self.max {
            self.scaled = self.scaled + (x - self.max).exp();
        } else {
            self.scaled = if self.max == T::neg_infinity() {
                T::one()
            } else {
                self.scaled * (self.max - x).exp() + T::one()
            };
            self.max = x;
        }
    }

    /// ln of the accumulated sum (−∞ when empty).
    pub fn value(&self) -> T {
        if self.max == T::neg_infinity() {
            T::neg_infinity()
        } else {
            self.max + self.scaled.ln()
        }
    }
}

pub fn log_sum_exp<T: Real, I: IntoIterator<Item = T>>(xs: I) -> T {
    let mut acc = LogSum::new();
    for x in xs {
        acc.push(x);
    }
    acc.value()
}

/// Indices of the lower convex hull of `(x, y)` points sorted by x.
/// Collinear interior points are kept.
pub fn lower_hull<T: Real>(xs: &[T], ys: &[T]) -> Vec<usize> {
    assert_eq!(xs.len(), ys.len());
    let mut hull: Vec<usize> = Vec::with_capacity(xs.len());
    for i in 0..xs.len() {
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            let cross = (xs[b] - xs[a]) * (ys[i] - ys[a]) - (ys[b] - ys[a]) * (xs[i] - xs[a]);
            if cross < T::zero() {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(i);
    }
    hull
}

/// Lower convex minorant of `ys` on the integer grid 0..n, evaluated at every index.
pub fn lower_hull_values<T: Real>(ys: &[T]) -> Vec<T> {
    let xs: Vec<T> = (0..ys.len()).map(T::from_usize_lossy).collect();
    let hull = lower_hull(&xs, ys);
    let mut out = vec![T::zero(); ys.len()];
    for w in hull.windows(2) {
        let (a, b) = (w[0], w[1]);
        let slope = (ys[b] - ys[a]) / T::from_usize_lossy(b - a);
        for (i, v) in out.iter_mut().enumerate().take(b + 1).skip(a) {
            *v = ys[a] + slope * T::from_usize_lossy(i - a);
        }
    }
    if hull.len() == 1 {
        out[hull[0]] = ys[hull[0]];
    }
    // hull vertices are exact
    for &h in &hull {
        out[h] = ys[h];
    }
    out
}

/// A real number with unbounded exponent range: `sign · e^{ln_abs}`.
///
/// Used where magnitudes like `e^{e^{20}}` appear (ring radii of the diagonal
/// operator model and the exponents built from them).
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct WideReal {
    pub sign: i8,
    pub ln_abs: f64,
}

impl WideReal {
    pub const ZERO: WideReal = WideReal {
        sign: 0,
        ln_abs: f64::NEG_INFINITY,
    };

    pub fn from_f64(x: f64) -> Self {
        if x == 0.0 {
            Self::ZERO
        } else {
            WideReal {
                sign: if x > 0.0 { 1 } else { -1 },
                ln_abs: x.abs().ln(),
            }
        }
    }

    pub fn positive_from_ln(ln_abs: f64) -> Self {
        if ln_abs == f64::NEG_INFINITY {
            Self::ZERO
        } else {
            WideReal { sign: 1, ln_abs }
        }
    }

    pub fn negative_from_ln(ln_abs: f64) -> Self {
        -Self::positive_from_ln(ln_abs)
    }

    /// Nearest f64 (may be ±∞).
    pub fn to_f64(self) -> f64 {
        match self.sign {
            0 => 0.0,
            s => f64::from(s) * self.ln_abs.exp(),
        }
    }

    pub fn is_zero(self) -> bool {
        self.sign == 0
    }

    pub fn is_positive(self) -> bool {
        self.sign > 0
    }

    /// Multiply by a positive f64 scalar given through its logarithm.
    pub fn scale_ln(self, ln_c: f64) -> Self {
        if self.sign == 0 {
            self
        } else {
            WideReal {
                sign: self.sign,
                ln_abs: self.ln_abs + ln_c,
            }
        }
    }

    pub fn scale(self, c: f64) -> Self {
        if c == 0.0 {
            return Self::ZERO;
        }
        let r = self.scale_ln(c.abs().ln());
        if c < 0.0 {
            -r
        } else {
            r
        }
    }

    pub fn add(self, other: Self) -> Self {
        if self.sign == 0 {
            return other;
        }
        if other.sign == 0 {
            return self;
        }
        let (big, small) = if self.ln_abs >= other.ln_abs {
            (self, other)
        } else {
            (other, self)
        };
        let d = small.ln_abs - big.ln_abs;
        if big.sign == small.sign {
            WideReal {
                sign: big.sign,
                ln_abs: big.ln_abs + d.exp().ln_1p(),
            }
        } else if d == 0.0 {
            Self::ZERO
        } else {
            WideReal {
                sign: big.sign,
                ln_abs: big.ln_abs + (-d.exp()).ln_1p(),
            }
        }
    }

    pub fn sub(self, other: Self) -> Self {
        self.add(-other)
    }

    pub fn cmp_total(self, other: Self) -> Ordering {
        match (self.sign, other.sign) {
            (a, b) if a != b => a.cmp(&b),
            (0, 0) => Ordering::Equal,
            (1, 1) => self.ln_abs.total_cmp(&other.ln_abs),
            _ => other.ln_abs.total_cmp(&self.ln_abs),
        }
    }

    pub fn le_f64(self, x: f64) -> bool {
        self.cmp_total(WideReal::from_f64(x)) != Ordering::Greater
    }

    pub fn ge_f64(self, x: f64) -> bool {
        self.cmp_total(WideReal::from_f64(x)) != Ordering::Less
    }
}

impl std::ops::Neg for WideReal {
    type Output = WideReal;
    fn neg(self) -> WideReal {
        WideReal {
            sign: -self.sign,
            ln_abs: self.ln_abs,
        }
    }
}

impl std::fmt::Display for WideReal {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.sign {
            0 => write!(f, "0"),
            s if self.ln_abs < 700.0 => write!(f, "{:e}", f64::from(s) * self.ln_abs.exp()),
            s => write!(f, "{}exp({:e})", if s < 0 { "-" } else { "" }, self.ln_abs),
        }
    }
}

/// Like `Display`, with the precision flag applied to the mantissa or exponent.
impl std::fmt::LowerExp for WideReal {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.sign {
            0 => write!(f, "0"),
            s if self.ln_abs < 700.0 => std::fmt::LowerExp::fmt(&(f64::from(s) * self.ln_abs.exp()), f),
            s => {
                write!(f, "{}exp(", if s < 0 { "-" } else { "" })?;
                std::fmt::LowerExp::fmt(&self.ln_abs, f)?;
                write!(f, ")")
            }
        }
    }
}

/// ln of the sum `Σ e^{x_i}` where each exponent may itself be astronomically large.
pub fn wide_log_sum(xs: &[WideReal]) -> WideReal {
    // only the exponents that fit an f64 window around the largest one matter
    let mut best = None::<WideReal>;
    for &x in xs {
        best = Some(match best {
            None => x,
            Some(b) if x.cmp_total(b) == Ordering::Greater => x,
            Some(b) => b,
        });
    }
    let Some(top) = best else {
        return WideReal::ZERO;
    };
    if top.ln_abs < 700.0 || top.sign <= 0 {
        let top_f = top.to_f64();
        if top_f.is_finite() {
            let mut acc = LogSum::new();
            for &x in xs {
                let v = x.to_f64();
                if v.is_finite() {
                    acc.push(v);
                }
            }
            return WideReal::from_f64(acc.value());
        }
        // every exponent is astronomically negative: the largest dominates
        return top;
    }
    // a positive exponent beyond f64 range dominates every other term
    let mut acc = LogSum::new();
    for &x in xs {
        if x.sign > 0 {
            let gap = (x.sub(top)).to_f64();
            if gap.is_finite() && gap > -745.0 {
                acc.push(gap);
            }
        }
    }
    top.add(WideReal::from_f64(acc.value()))
}

/// Smallest integer in `[lo, hi]` satisfying a monotone predicate, or `None`.
pub fn first_true_u64(mut lo: u64, mut hi: u64, pred: impl Fn(u64) -> bool) -> Option<u64> {
    if lo > hi || !pred(hi) {
        return None;
    }
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if pred(mid) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Some(lo)
}

/// Exponential search for the smallest `j ≥ start` with `pred(j)`, assuming
/// monotonicity past `start`; gives up beyond `limit`.
pub fn search_up_u64(start: u64, limit: u64, pred: impl Fn(u64) -> bool) -> Option<u64> {
    if pred(start) {
        return Some(start);
    }
    let mut lo = start;
    let mut step = 1u64;
    loop {
        let hi = lo.saturating_add(step).min(limit);
        if pred(hi) {
            return first_true_u64(lo + 1, hi, &pred);
        }
        if hi == limit {
            return None;
        }
        lo = hi;
        step = step.saturating_mul(2);
    }
}

/// Bisection for a root of an increasing function on `[lo, hi]`.
pub fn bisect_increasing(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> f64, rel_tol: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) >= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
        if (hi - lo) <= rel_tol * hi.abs().max(1.0) {
            break;
        }
    }
    hi
}
