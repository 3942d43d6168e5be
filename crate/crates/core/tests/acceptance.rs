//! Acceptance battery: one PASS/FAIL line per criterion.
//!
//! Reference values come from oracles written here (direct sums, brute-force
//! counting, closed forms), not from the library under test.

use std::f64::consts::LN_2;
use weightseq::analysis::{
    check_property, conjugate_lc, index_reciprocity_report, mixed_om1_family, root_vs_quotient_lower_index, Property,
    Status, Witness,
};
use weightseq::extension::{cauchy_restriction_bound, taylor_majorant, CoefficientFunction};
use weightseq::operator_lab::{
    bounded_solution_check, build_counterexample, exponential_class_sum, square_sum, weighted_class_sum, SumStatus,
};
use weightseq::transforms::{bidual, conjugate, dual, normalize_head, regularize_almost_decreasing};
use weightseq::weights::{
    counting, geometric_grid, integral_representation_residual, omega, uniform_bound_construct, valid_to,
    GaugeBound, GrowthGauge, SequenceFamily,
};
use weightseq::WeightSequence;

type Check = Result<(bool, String), String>;

const TOL_INVOLUTION: f64 = 1e-10;
const TOL_GEVREY_CONJ: f64 = 1e-9;
const TOL_RECIPROCITY: f64 = 0.15;
const TOL_INTEGRAL: f64 = 1e-9;
const TOL_BETA: f64 = 0.05;
const TOL_MAJORANT: f64 = 1e-9;
const TOL_DERIV: f64 = 1e-9;
const DUAL_RATIO_BOUND: f64 = 0.05;
const ROOT_BOUND: f64 = 0.2;

fn e<T: std::fmt::Display>(x: T) -> String {
    x.to_string()
}

/// `ln p!` for `p = 0..=n` by direct summation.
fn ln_fact_table(n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    let mut acc = 0.0f64;
    out.push(0.0);
    for k in 1..=n {
        acc += (k as f64).ln();
        out.push(acc);
    }
    out
}

fn gevrey_oracle(alpha: f64, n: usize) -> Vec<f64> {
    ln_fact_table(n).into_iter().map(|v| alpha * v).collect()
}

fn max_gap(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn g(alpha: f64, p: usize) -> Result<WeightSequence, String> {
    WeightSequence::gevrey(alpha, p).map_err(e)
}

fn criterion_1() -> Check {
    let p = 512;
    let mut fixtures = Vec::new();
    for a in [0.0, 0.25, 0.5, 0.75, 1.0, 2.0] {
        fixtures.push((g(a, p)?, gevrey_oracle(a, p)));
    }
    let q2: Vec<f64> = (0..=p).map(|j| (j * j) as f64 * LN_2).collect();
    fixtures.push((WeightSequence::qgevrey(2.0, p).map_err(e)?, q2));
    let mut inv = 0.0f64;
    for (m, oracle) in &fixtures {
        // the fixture itself must match its closed form before the algebra means anything
        if max_gap(m.log_m(), oracle) > 1e-9 {
            return Err(format!("fixture {} disagrees with its closed form", m.name()));
        }
        let back = conjugate(&conjugate(m).map_err(e)?).map_err(e)?;
        inv = inv.max(max_gap(back.log_m(), m.log_m()));
    }
    let mut gc = 0.0f64;
    for a in [0.0, 0.25, 0.5] {
        let c = conjugate(&g(a, p)?).map_err(e)?;
        gc = gc.max(max_gap(c.log_m(), &gevrey_oracle(1.0 - a, p)));
    }
    let fixed = max_gap(conjugate(&g(0.5, p)?).map_err(e)?.log_m(), &gevrey_oracle(0.5, p));
    Ok((
        inv <= TOL_INVOLUTION && gc <= TOL_GEVREY_CONJ && fixed <= TOL_GEVREY_CONJ,
        format!("M** vs M {inv:.2e} (≤ {TOL_INVOLUTION:e}); (G^a)* vs G^(1-a) {gc:.2e}; G^0.5 fixed {fixed:.2e}"),
    ))
}

fn criterion_2() -> Check {
    let lf = ln_fact_table(256);
    let mut worst = f64::NEG_INFINITY;
    let mut oracle_gap = 0.0f64;
    for a in [0.0, 0.25, 0.5, 0.75, 1.0] {
        let c = conjugate(&g(a, 256)?).map_err(e)?;
        let l = c.log_m();
        let want: Vec<f64> = lf.iter().map(|v| (1.0 - a) * v).collect();
        oracle_gap = oracle_gap.max(max_gap(l, &want));
        for s in 0..=256usize {
            for q in 0..=s {
                worst = worst.max(l[s] - (s as f64 * LN_2 + l[q] + l[s - q]));
            }
        }
    }
    Ok((
        worst <= 1e-9 && oracle_gap <= 1e-9,
        format!("max ln M*_(p+q) - (p+q)ln2 - ln M*_p - ln M*_q = {worst:.2e}; conjugate vs oracle {oracle_gap:.2e}"),
    ))
}

fn criterion_3() -> Check {
    let g2 = g(2.0, 512)?;
    let d = dual(&g2).map_err(e)?;
    let n = 10_000usize;
    if d.p_max() < n + 1 {
        return Err(format!("dual window {} too short", d.p_max()));
    }
    let lm = d.log_m();
    let delta = |p: usize| (lm[p] - lm[p - 1]).exp().round() as u64;
    // brute force: δ_{p+1} = #{j ≥ 1 : j² ≤ p}
    let mut mismatches = 0;
    for p in 1..=n as u64 {
        let mut count = 0u64;
        let mut j = 1u64;
        while j * j <= p {
            count += 1;
            j += 1;
        }
        if delta(p as usize + 1) != count {
            mismatches += 1;
        }
    }
    let ratio = |p: usize| delta(p) as f64 / p as f64;
    let rises: Vec<usize> = (5..=n).filter(|&p| ratio(p) > ratio(p - 1)).collect();
    let last = ratio(n);
    let bd = bidual(&g2).map_err(e)?;
    let or = gevrey_oracle(2.0, 2000);
    let sup = (16..=2000usize.min(bd.p_max()))
        .map(|p| (bd.log_m()[p] - or[p]).abs() / p as f64)
        .fold(0.0, f64::max);
    let ok = mismatches == 0 && rises.is_empty() && last < DUAL_RATIO_BOUND && sup <= 4f64.ln();
    Ok((
        ok,
        format!(
            "floor(sqrt p) mismatches {mismatches}; δ_p/p rises at {} points beyond 4 (first {:?}); δ_10000/10000 = {last:.4}; bidual sup {sup:.4} ≤ ln 4",
            rises.len(),
            rises.iter().take(3).collect::<Vec<_>>()
        ),
    ))
}

fn criterion_4() -> Check {
    let mut ok = true;
    let mut parts = Vec::new();
    for a in [2.0, 3.0] {
        let r = index_reciprocity_report(&g(a, 10_000)?).map_err(e)?;
        ok &= r.residual_alpha_beta <= TOL_RECIPROCITY && r.residual_beta_alpha <= TOL_RECIPROCITY;
        // closed-form indices: ν ~ p^a, δ ~ p^(1/a)
        parts.push(format!(
            "G^{a}: ν ({:.3}, {:.3}) vs {a}, δ ({:.3}, {:.3}) vs {:.3}, residuals {:.4}/{:.4}",
            r.beta_nu,
            r.alpha_nu,
            r.beta_delta,
            r.alpha_delta,
            1.0 / a,
            r.residual_alpha_beta,
            r.residual_beta_alpha
        ));
    }
    Ok((ok, parts.join("; ")))
}

/// `ω(t) = max_p (p ln t − α ln p!)` by scanning every index of the window.
fn omega_oracle(alpha: f64, lf: &[f64], t: f64) -> f64 {
    lf.iter()
        .enumerate()
        .map(|(p, v)| p as f64 * t.ln() - alpha * v)
        .fold(0.0, f64::max)
}

fn criterion_5() -> Check {
    let mut residual = 0.0f64;
    let mut vs_oracle = 0.0f64;
    let mut zero_ok = true;
    let mut step = 0.0f64;
    for a in [1.0, 2.0] {
        let p = 512;
        let m = g(a, p)?;
        let lf = ln_fact_table(p);
        let hi = valid_to(&m);
        for t in geometric_grid(1.01, hi * 0.99, 60) {
            residual = residual.max(integral_representation_residual(&m, t).map_err(e)?);
            let w = omega(&m, t).value;
            vs_oracle = vs_oracle.max((w - omega_oracle(a, &lf, t)).abs() / (1.0 + w.abs()));
        }
        // μ_1 = 1 for both
        for i in 0..=20 {
            let w = omega(&m, i as f64 / 20.0);
            zero_ok &= w.trusted && w.value == 0.0;
        }
        for r in geometric_grid(1.001, hi * 0.99, 50) {
            // p = #{j : j^a ≤ r}, then e^{ω(r)} = r^p/M_p
            let mut pc = 0usize;
            while ((pc + 1) as f64).powf(a) <= r {
                pc += 1;
            }
            if counting(&m, r).map_err(e)? as usize != pc {
                return Ok((false, format!("counting mismatch at r = {r}")));
            }
            let want = pc as f64 * r.ln() - a * lf[pc];
            step = step.max((omega(&m, r).value - want).abs() / (1.0 + want.abs()));
        }
    }
    let mut beta_ok = true;
    let mut parts = Vec::new();
    for m in [g(0.5, 512)?, g(2.0, 512)?, dual(&g(2.0, 512)?).map_err(e)?] {
        let r = root_vs_quotient_lower_index(&m).map_err(e)?;
        beta_ok &= r.holds;
        parts.push(format!("{} β(ρ) {:.3} β(μ) {:.3}", m.name(), r.beta_rho, r.beta_mu));
    }
    let ok = residual <= TOL_INTEGRAL && vs_oracle <= 1e-12 && zero_ok && step <= 1e-12 && beta_ok;
    Ok((
        ok,
        format!(
            "integral residual {residual:.2e}; ω vs scan {vs_oracle:.2e}; zero below μ_1 {zero_ok}; step identity {step:.2e}; {} (slack {TOL_BETA})",
            parts.join(", ")
        ),
    ))
}

/// SplitMix64, a seeded source independent of the library's generator.
struct SplitMix(u64);

impl SplitMix {
    fn next_unit(&mut self) -> f64 {
        self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^= z >> 31;
        (z >> 11) as f64 / (1u64 << 53) as f64
    }
}

fn perturbed(rng: &mut SplitMix, p: usize, shift: f64) -> Result<WeightSequence, String> {
    let mut mu = f64::NEG_INFINITY;
    let mut acc = 0.0;
    let mut lm = vec![0.0];
    for j in 1..=p {
        let v = 0.5 * (j as f64).ln() + shift + 0.6 * (rng.next_unit() - 0.5);
        mu = mu.max(v);
        acc += mu;
        lm.push(acc);
    }
    WeightSequence::from_log_values("perturbed", lm).map_err(e)
}

fn criterion_6() -> Check {
    let mut rng = SplitMix(20_240_601);
    let mut inputs = vec![dual(&g(2.0, 512)?).map_err(e)?];
    for _ in 0..3 {
        inputs.push(perturbed(&mut rng, 512, 0.0)?);
    }
    let mut ok = true;
    let mut worst_oracle = 0.0f64;
    for m in &inputs {
        let r = regularize_almost_decreasing(m).map_err(e)?;
        let mu = m.quotients().log_mu;
        let p = m.p_max();
        // O(P²) oracle: x_p = ln(μ_p/p), H = max_{q ≥ p} x_q − x_p, λ_p = p·e^{max_{q≥p} x_q − ln H}
        let x: Vec<f64> = (0..=p).map(|j| if j == 0 { 0.0 } else { mu[j] - (j as f64).ln() }).collect();
        let sup = |j: usize| (j..=p).map(|q| x[q]).fold(f64::NEG_INFINITY, f64::max);
        let ln_h = (1..=p).map(|j| sup(j) - x[j]).fold(0.0, f64::max);
        let lam = r.seq.quotients().log_mu;
        for j in 1..=p {
            let want = (j as f64).ln() + sup(j) - ln_h;
            worst_oracle = worst_oracle.max((lam[j] - want).abs());
            ok &= lam[j] <= mu[j] + 1e-9 && lam[j] >= mu[j] - ln_h - 1e-9;
        }
        ok &= (2..=p).all(|j| r.log_ratio[j] <= r.log_ratio[j - 1]);
    }
    ok &= worst_oracle <= 1e-9;
    let mut head_ok = true;
    for _ in 0..3 {
        let l = perturbed(&mut rng, 512, -1.5)?;
        let h = normalize_head(&l).map_err(e)?;
        let lt = h.seq.log_m();
        head_ok &= lt[0] == 0.0 && lt[1] == 0.0;
        head_ok &= (0..=l.p_max()).all(|j| l.log_m()[j] <= lt[j] + 1e-9 && lt[j] <= h.log_c + l.log_m()[j] + 1e-9);
    }
    Ok((
        ok && head_ok,
        format!("λ vs oracle {worst_oracle:.2e}, monotone and sandwiched on 4 inputs; head normalization {head_ok}"),
    ))
}

fn criterion_7() -> Check {
    let mut fails = 0;
    let mut total = 0;
    let mut oracle_gap = 0.0f64;
    let lf = ln_fact_table(4096);
    for a in [0.0, 0.25, 0.5] {
        let m = g(a, 4096)?;
        for h in [0.5, 1.0, 2.0] {
            for z in geometric_grid(0.05, 20.0, 20) {
                let pt = taylor_majorant(&m, h, 1.0, z).map_err(e)?;
                total += 1;
                if pt.ln_lhs > pt.ln_rhs + TOL_MAJORANT.ln_1p() {
                    fails += 1;
                }
                if a == 0.0 {
                    // Σ (hz)^k/k! = e^{hz}; M* = G^1
                    oracle_gap = oracle_gap.max((pt.ln_lhs - h * z).abs());
                    let rhs = 2f64.ln() + omega_oracle(1.0, &lf, 2.0 * h * z);
                    oracle_gap = oracle_gap.max((pt.ln_rhs - rhs).abs());
                }
            }
        }
    }
    let mut cauchy_fail = 0;
    let mut cauchy_total = 0;
    for a in [0.25, 0.5] {
        let m = g(a, 128)?;
        let mstar = conjugate(&m).map_err(e)?;
        let f = CoefficientFunction::reciprocal_of(&mstar, 120).map_err(e)?;
        for x in [0.0, 0.5] {
            for n in [5, 10, 20] {
                let r = cauchy_restriction_bound(&f, &mstar, 2.0, 2.0, x, n).map_err(e)?;
                cauchy_total += 1;
                if !r.holds {
                    cauchy_fail += 1;
                }
                if x == 0.0 {
                    // F^{(n)}(0) = n!/M*_n = M_n
                    oracle_gap = oracle_gap.max((r.ln_deriv_norm - a * ln_fact_table(n)[n]).abs());
                }
            }
        }
    }
    Ok((
        fails == 0 && cauchy_fail == 0 && oracle_gap <= 1e-9,
        format!(
            "majorant {}/{total} within 1e-9; restriction {}/{cauchy_total}; closed-form gap {oracle_gap:.2e}",
            total - fails,
            cauchy_total - cauchy_fail
        ),
    ))
}

fn criterion_8() -> Check {
    let p = 5000usize;
    let b = uniform_bound_construct(SequenceFamily::SmallGevrey, 4, p).map_err(e)?;
    let lf = ln_fact_table(p);
    // member k is G^{k/(k+1)}, so ln (n^(k)_j)^{1/j} = (k/(k+1) − 1) ln j!/j
    let little = |k: usize, j: usize| (k as f64 / (k as f64 + 1.0) - 1.0) * lf[j] / j as f64;
    let roots: Vec<f64> = (1..=p as u64).map(|j| b.log_root(j)).collect();
    let non_increasing = roots.windows(2).all(|w| w[1] <= w[0]);
    let end = roots[p - 1].exp();
    let mut ratio_ok = true;
    for k in 1..=4usize {
        let start = b.breakpoint(k).ok_or("missing breakpoint")?;
        for j in (start as usize).max(1)..=p {
            ratio_ok &= roots[j - 1] - little(k, j) >= (k as f64).ln() - 1e-12;
        }
    }
    let bs = [0.5, 1.0, 2.0, 4.0];
    let pairs: Vec<(f64, f64)> = bs
        .iter()
        .flat_map(|&x| bs.iter().filter(move |&&y| y > x).map(move |&y| (x, y)))
        .collect();
    let mixed = mixed_om1_family(SequenceFamily::SmallGevrey, &pairs, 512).map_err(e)?;
    let mixed_ok = mixed.iter().all(|v| v.status == Status::Holds);
    Ok((
        non_increasing && end <= ROOT_BOUND && ratio_ok && mixed_ok,
        format!(
            "roots non-increasing {non_increasing}; a_5000^(1/5000) = {end:.4} (needs ≤ {ROOT_BOUND}); ratio ≥ k on window {ratio_ok}; breakpoints {:?}; mixed pairs {}/{}",
            b.plateaus.iter().map(|pl| pl.start).collect::<Vec<_>>(),
            mixed.iter().filter(|v| v.status == Status::Holds).count(),
            mixed.len()
        ),
    ))
}

/// `ln g(k)` for the Markin gauge by direct log-domain summation of
/// `h(s) = ln Σ_j (s/2)^j ln(j)^j/j!` with `g(k) = √(h(k/2)/k)`.
fn markin_g_oracle(k: f64) -> f64 {
    let x = k / 4.0;
    let mut best = f64::NEG_INFINITY;
    let mut terms = Vec::new();
    let mut lf = 0.0;
    let mut j = 0u64;
    loop {
        if j > 0 {
            lf += (j as f64).ln();
        }
        let la = if j < 2 { 0.0 } else { -(j as f64) * (j as f64).ln().ln() };
        let t = j as f64 * x.ln() - la - lf;
        terms.push(t);
        best = best.max(t);
        if t < best - 40.0 && j as f64 > x {
            break;
        }
        j += 1;
    }
    let s: f64 = terms.iter().map(|t| (t - best).exp()).sum();
    let h = best + s.ln();
    0.5 * (h.ln() - k.ln())
}

fn criterion_9() -> Check {
    let ts = [0.5, 1.0, 2.0, 5.0, 10.0];
    let gauge = GrowthGauge::evaluator(GaugeBound::Markin);
    // the literal rule g(k(n)) ≥ n, kept for the record
    let (lit_model, lit_f) = build_counterexample(&gauge, 120, 0).map_err(e)?;
    let mut lit_fail = Vec::new();
    for t in ts {
        if exponential_class_sum(&lit_model, &lit_f, t).map_err(e)?.status != SumStatus::Converged {
            lit_fail.push(t);
        }
    }
    let mut oracle_gap = 0.0f64;
    for r in lit_model.rings.iter().take(2) {
        let k = r.exact.ok_or("first indices should be exact")? as f64;
        oracle_gap = oracle_gap.max((markin_g_oracle(k) - gauge.ln_g_at(k.ln()).map_err(e)?).abs());
    }
    let offset = ts[ts.len() - 1].exp().ceil() as u64;
    let (model, f) = build_counterexample(&gauge, 120, offset).map_err(e)?;
    let inv = model.check_invariants();
    let inv_ok = inv.ring_membership && inv.k_increasing && inv.k_at_least_n && inv.n_at_most_g && inv.eps_rule;
    let l2 = square_sum(&f).status == SumStatus::Converged;
    let mut exp_fail = Vec::new();
    for t in ts {
        if exponential_class_sum(&model, &f, t).map_err(e)?.status != SumStatus::Converged {
            exp_fail.push(t);
        }
    }
    let mut missing = Vec::new();
    for i in 1..=9 {
        let alpha = i as f64 / 10.0;
        let m = g(alpha, 512)?;
        for t in [1.0, 2.0] {
            let s = weighted_class_sum(&model, &f, &m, t).map_err(e)?;
            if s.status != SumStatus::Diverged || s.divergent_from.is_none() {
                missing.push((alpha, t));
            }
        }
    }
    Ok((
        inv_ok && l2 && exp_fail.is_empty() && missing.is_empty() && oracle_gap <= 1e-9,
        format!(
            "n0 = {offset}: invariants {inv_ok}, l2 {l2}, unconverged t {exp_fail:?}, weighted without divergence {missing:?}; g vs series oracle {oracle_gap:.2e}; with n0 = 0 unconverged t {lit_fail:?}"
        ),
    ))
}

fn criterion_10() -> Check {
    // scalar case A = 2, y0 = 1: y'''(1) = 8e²
    let r = bounded_solution_check(&[2.0], &[1.0], 1.0, 3).map_err(e)?;
    let scalar = r.derivative_identity_holds && r.exp_type_constant == 2.0;
    let eigs = [1.5, -0.7, 0.3, -2.0, 0.0];
    let y0 = [1.0, -0.5, 2.0, 0.25, 0.75];
    let mut worst = 0.0f64;
    let mut ratio = 0.0f64;
    let mut ok = scalar;
    for t in [0.0, 0.3, 1.0] {
        let r = bounded_solution_check(&eigs, &y0, t, 12).map_err(e)?;
        // independent: ‖y^(n)(t)‖ with λ^n e^{λt} y0 evaluated here
        for n in 0..=12i32 {
            let direct: f64 = eigs
                .iter()
                .zip(&y0)
                .map(|(l, y)| (l.powi(n) * (l * t).exp() * y).powi(2))
                .sum::<f64>()
                .sqrt();
            let mut v: Vec<f64> = eigs.iter().zip(&y0).map(|(l, y)| (l * t).exp() * y).collect();
            for _ in 0..n {
                v.iter_mut().zip(&eigs).for_each(|(x, l)| *x *= l);
            }
            let applied = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            worst = worst.max((direct - applied).abs() / applied.max(f64::MIN_POSITIVE));
        }
        ok &= r.derivative_identity_holds && r.exp_type_holds && r.grid_points == 100 && r.exp_type_constant == 2.0;
        ratio = ratio.max(r.grid_max_ratio);
    }
    Ok((
        ok && worst <= TOL_DERIV,
        format!("relative gap {worst:.2e}; sup ‖y(z)‖/(‖y0‖e^(C|z|)) = {ratio:.4} with C = 2 on 100 points"),
    ))
}

fn criterion_11() -> Check {
    let q2 = WeightSequence::qgevrey(2.0, 512).map_err(e)?;
    let mg = check_property(&q2, Property::Mg);
    // M_{2p}/M_p² = 2^{2p²} is unbounded geometrically, so any witness index must violate it
    let mg_ok = mg.status == Status::Fails && matches!(mg.witness, Witness::IndexValue { .. } | Witness::Index { .. });
    let qr = check_property(&q2, Property::QuotientRatioBound);
    let qr_ok = qr.status == Status::Holds && matches!(qr.witness, Witness::Constant { value } if (value - 4.0).abs() < 1e-9);
    let gm = check_property(&g(2.0, 512)?, Property::Gamma1);
    let fixtures = [
        g(0.0, 256)?,
        g(0.25, 256)?,
        g(0.5, 256)?,
        g(1.0, 256)?,
        g(2.0, 256)?,
        WeightSequence::qgevrey(2.0, 256).map_err(e)?,
    ];
    // m = M/p! is log-concave exactly when the Gevrey exponent is ≤ 1; q-Gevrey is not
    let expected = [true, true, true, true, false, false];
    let mut agree = 0;
    for (m, want) in fixtures.iter().zip(expected) {
        let lhs = conjugate_lc(m).map_err(e)?;
        let rhs = check_property(m, Property::LogConcaveM);
        let want = if want { Status::Holds } else { Status::Fails };
        if lhs.status == want && rhs.status == want {
            agree += 1;
        }
    }
    Ok((
        mg_ok && qr_ok && gm.status == Status::Holds && agree == fixtures.len(),
        format!(
            "qgevrey(2): mg {:?} {:?}, quotient ratio {:?} {:?}; gevrey(2) γ1 {:?}; conjugate LC ⟺ m log-concave {agree}/6",
            mg.status, mg.witness, qr.status, qr.witness, gm.status
        ),
    ))
}

fn main() {
    let criteria: [(&str, fn() -> Check); 11] = [
        ("conjugate algebra", criterion_1),
        ("conjugate moderate growth", criterion_2),
        ("dual structure", criterion_3),
        ("index reciprocity", criterion_4),
        ("omega machinery", criterion_5),
        ("regularization", criterion_6),
        ("extension bounds", criterion_7),
        ("uniform bound", criterion_8),
        ("operator counterexample", criterion_9),
        ("bounded-case solutions", criterion_10),
        ("predicate fixtures", criterion_11),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let (ok, detail) = run().unwrap_or_else(|msg| (false, format!("error: {msg}")));
        if !ok {
            failed += 1;
        }
        println!("criterion {:>2} {} {name}: {detail}", i + 1, if ok { "PASS" } else { "FAIL" });
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
