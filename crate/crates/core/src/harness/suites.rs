use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::Instant;

use num::{BigInt, Integer, Zero};
use serde_json::json;

use crate::arith::{euler_phi, is_prime, lcm, primes_up_to};
use crate::char_ideal::{euler_factor_ideal, frobenius_quotient_char};
use crate::characters::{kronecker, primitive_characters, teichmuller_char, unit_generators, DirichletChar, GaloisChar};
use crate::error::{Error, Result};
use crate::exact::{bernoulli_numbers, gen_bernoulli, CycloInt, CycloRat};
use crate::group_ring::{beta_level, division_level, MAX_GROUP_ORDER};
use crate::l_elements::{
    check_series_char, euler_factor, euler_norm_check, iwasawa_series_batch, lp_eval_series, lp_oracle, smoothed_stickelberger,
    smoothing_element, stickelberger, tower_norm_check, CycloElement, IwasawaSeries,
};
use crate::padic::{embed_cyclo_rat, CoeffRing, PadicApprox};

use super::{exact, prec_label, Case, ScenarioReport};

/// Largest group (Z/f p^k)^* the suites will build for a retry or a scan.
pub const GROUP_CAP: u128 = 100_000_000;

/// Multiplying out h * Theta in the group ring is quadratic; only done on small groups.
const PRODUCT_CHECK_CAP: usize = 3000;

fn group_size(f: u64, p: u64, level: u32) -> u128 {
    euler_phi(f) as u128 * (p - 1) as u128 * (p as u128).pow(level - 1)
}

/// Exponent of (Z/m)^*.
fn unit_exponent(m: u64) -> u64 {
    unit_generators(m).iter().fold(1, |l, &(_, n)| lcm(l, n))
}

/// One ring per degree, so that Frobenius-conjugate characters are batched.
struct Rings {
    p: u64,
    m: u32,
    by_degree: BTreeMap<u64, Arc<CoeffRing>>,
}

impl Rings {
    fn new(p: u64, m: u32) -> Self {
        Rings { p, m, by_degree: BTreeMap::new() }
    }

    fn get(&mut self, d: u64) -> Result<Arc<CoeffRing>> {
        if let Some(r) = self.by_degree.get(&d) {
            return Ok(r.clone());
        }
        let r = CoeffRing::new(self.p, self.m, d)?;
        self.by_degree.insert(d, r.clone());
        Ok(r)
    }
}

/// Odd first-kind characters with conductor at most `bound` whose series is defined over
/// an unramified ring; the rest are counted as skipped.
fn series_characters(p: u64, bound: u64, report: &mut ScenarioReport) -> Vec<DirichletChar> {
    let mut out = Vec::new();
    for c in 1..=bound {
        for chi in primitive_characters(c) {
            if !chi.is_first_kind(p) {
                continue;
            }
            if !chi.is_odd() {
                report.skip("even");
                continue;
            }
            if !chi.values_unramified(p) {
                report.skip("values ramified over Z_p");
                continue;
            }
            out.push(chi);
        }
    }
    out
}

fn batch(chis: &[DirichletChar], rings: &mut Rings, n: usize, level: u32, report: &mut ScenarioReport) -> Result<Vec<IwasawaSeries>> {
    let mut items = Vec::new();
    for chi in chis {
        let ring = rings.get(chi.order())?;
        match check_series_char(chi, &ring) {
            Ok(_) => items.push((chi.clone(), ring)),
            Err(_) => report.skip("chi omega trivial (pole)"),
        }
    }
    iwasawa_series_batch(&items, n, level)
}

pub fn run_interpolation_suite(primes: &[u64], max_conductor: u64, max_k: u32, m: u32) -> Result<ScenarioReport> {
    let start = Instant::now();
    let mut report = ScenarioReport::new(
        "interpolation",
        json!({"primes": primes, "max_conductor": max_conductor, "max_k": max_k, "M": m}),
    );
    for &p in primes {
        check_prime(p)?;
        let n = m.max(2) as usize;
        let chis = series_characters(p, max_conductor, &mut report);
        interpolation_for(p, &chis, max_k, m, n, &mut report)?;
    }
    report.duration = start.elapsed();
    Ok(report)
}

fn interpolation_for(p: u64, chis: &[DirichletChar], max_k: u32, m: u32, n: usize, report: &mut ScenarioReport) -> Result<()> {
    let mut rings = Rings::new(p, m);
    let level = division_level(p, m, n);
    let series = batch(chis, &mut rings, n, level, report)?;
    for s in &series {
        let ring = s.series.ring().clone();
        let theta = s.chi.mul(&teichmuller_char(p, &ring));
        for k in 1..=max_k {
            let key = format!("p={} chi={} k={}", p, s.chi.label(), k);
            let want = lp_oracle(&theta, k, &ring)?;
            let got = match lp_eval_series(s, k, 1) {
                Ok(v) if v.prec() >= m => Ok(v),
                _ => retry_eval(&s.chi, k, &ring, n),
            };
            let case = match got {
                Ok(v) => Case::new(key, v == want, &v, &want, prec_label(p, m, Some(n))).at_level(s.level),
                Err(e) => Case::unreliable(key, e.to_string(), prec_label(p, m, Some(n))),
            };
            report.push(case);
        }
    }
    // pinned values
    if p == 5 {
        let omega = teichmuller_char(5, &rings.get(1)?);
        let chi = chis.iter().find(|c| **c == omega);
        if let Some(s) = chi.and_then(|c| series.iter().find(|s| &s.chi == c)) {
            let v = lp_eval_series(s, 2, 1)?;
            let ok = v.with_prec(2).as_scalar() == Some(17);
            report.push(Case::new("p=5 pinned L_p(-1, omega^2)", ok, v.with_prec(2), "17 mod 5^2", prec_label(5, 2, None)));
        }
    }
    if p == 3 {
        let q = kronecker(-4)?;
        if let Some(s) = series.iter().find(|s| s.chi == q) {
            let v = lp_eval_series(s, 1, 1)?;
            let one = PadicApprox::one(s.series.ring());
            report.push(Case::new("p=3 pinned L_p(0, chi4 omega)", v == one, &v, &one, prec_label(3, m, None)));
        }
    }
    Ok(())
}

/// Precision-limited failure: one retry at doubled M, reduced back into `ring`.
fn retry_eval(chi: &DirichletChar, k: u32, ring: &Arc<CoeffRing>, n: usize) -> Result<PadicApprox> {
    let p = ring.p();
    let m2 = 2 * ring.prec();
    let level = division_level(p, m2, n);
    if group_size(chi.tame_conductor(p), p, level) > GROUP_CAP {
        return Err(Error::precision(format!("retry at M={} needs level {}", m2, level)));
    }
    let wide = CoeffRing::new(p, m2, ring.cyc_order())?;
    let s = iwasawa_series_batch(&[(chi.clone(), wide)], n, level)?;
    let v = lp_eval_series(&s[0], k, 1)?;
    if v.prec() < ring.prec() {
        return Err(Error::precision(format!("only {} digits at doubled precision", v.prec())));
    }
    let q = ring.modulus();
    Ok(PadicApprox::from_raw(ring, v.coeffs().iter().map(|c| c % q).collect(), ring.prec()))
}

fn check_prime(p: u64) -> Result<()> {
    if p < 3 || !is_prime(p) {
        return Err(Error::invalid(format!("p={} must be an odd prime", p)));
    }
    Ok(())
}

fn newton_text(s: &IwasawaSeries) -> String {
    format!("mu={} lambda={}", s.mu(), s.lambda())
}

/// mu(f(T, chi omega)) = 0 at (p^M, T^N), with the series recomputed one level higher.
pub fn run_mu_suite(primes: &[u64], max_conductor: u64, m: u32, n: usize) -> Result<ScenarioReport> {
    let start = Instant::now();
    let mut report = ScenarioReport::new(
        "mu",
        json!({"primes": primes, "max_conductor": max_conductor, "M": m, "N": n}),
    );
    for &p in primes {
        check_prime(p)?;
        let chis = series_characters(p, max_conductor, &mut report);
        mu_for(p, &chis, m, n, &mut report)?;
    }
    report.duration = start.elapsed();
    Ok(report)
}

fn mu_for(p: u64, chis: &[DirichletChar], m: u32, n: usize, report: &mut ScenarioReport) -> Result<()> {
    let level = division_level(p, m, n);
    let mut rings = Rings::new(p, m);
    let series = batch(chis, &mut rings, n, level, report)?;
    let mut retry = Vec::new();
    for s in &series {
        let key = format!("p={} chi={} mu", p, s.chi.label());
        let prec = prec_label(p, m, Some(n));
        if s.newton.reliable {
            report.push(Case::new(key, s.mu() == 0, newton_text(s), "mu=0", prec).at_level(level));
        } else {
            retry.push(s.chi.clone());
        }
    }
    if !retry.is_empty() {
        let m2 = 2 * m;
        let level2 = division_level(p, m2, n);
        let fits = retry.iter().all(|c| group_size(c.tame_conductor(p), p, level2) <= GROUP_CAP);
        let again = if fits {
            batch(&retry, &mut Rings::new(p, m2), n, level2, report)?
        } else {
            vec![]
        };
        for chi in &retry {
            let key = format!("p={} chi={} mu", p, chi.label());
            match again.iter().find(|s| &s.chi == chi) {
                Some(s) if s.newton.reliable => report.push(
                    Case::new(key, s.mu() == 0, newton_text(s), "mu=0", prec_label(p, m2, Some(n)))
                        .at_level(level2)
                        .with_note("retried at doubled M"),
                ),
                _ => report.push(Case::unreliable(key, "no certified unit coefficient", prec_label(p, m2, Some(n)))),
            }
        }
    }
    // consecutive-level stability: level k + 1 must give the same series
    let upper = batch(chis, &mut rings, n, level + 1, &mut ScenarioReport::new("", json!({})))?;
    for (s, t) in series.iter().zip(&upper) {
        debug_assert_eq!(s.chi, t.chi);
        let key = format!("p={} chi={} stability", p, s.chi.label());
        report.push(
            Case::new(key, s.series == t.series, &t.series, &s.series, prec_label(p, m, Some(n)))
                .at_level(level + 1)
                .with_note(format!("level {} vs level {}", level + 1, level)),
        );
    }
    Ok(())
}

pub fn run_compat_suite(fs: &[u64], primes: &[u64], max_k: u32, max_cyclo: u64) -> Result<ScenarioReport> {
    let start = Instant::now();
    let mut report = ScenarioReport::new(
        "compat",
        json!({"f": fs, "primes": primes, "max_k": max_k, "max_cyclo_modulus": max_cyclo}),
    );
    let mut run = || -> Result<()> {
        for &p in primes {
            check_prime(p)?;
            for &f in fs {
                if f == 0 || f % p == 0 {
                    report.skip("f not prime to p");
                    continue;
                }
                let mut lower = stickelberger(f, p, 1)?;
                for k in 1..=max_k {
                    let upper = stickelberger(f, p, k + 1)?;
                    let proj = upper.elem().project(k)?;
                    let ok = &proj == lower.elem();
                    report.push(
                        Case::new(format!("theta tower f={} p={} k={}", f, p, k), ok, ok, true, exact()).at_level(k),
                    );
                    if !ok {
                        return Ok(());
                    }
                    lower = upper;
                }
                for k in 1..=max_k {
                    let key = format!("smoothing f={} p={} k={}", f, p, k);
                    let x = match smoothed_stickelberger(f, p, k) {
                        Ok(x) => x,
                        Err(e) => {
                            report.push(Case::new(key, false, e, "p-integral", exact()).at_level(k));
                            return Ok(());
                        }
                    };
                    let mut ok = x.is_p_integral();
                    let mut note = "denominator ".to_string() + &x.max_abs_denominator().to_string();
                    if x.group().order() <= PRODUCT_CHECK_CAP {
                        let prod = smoothing_element(f, p, k)?.multiply(stickelberger(f, p, k)?.elem())?;
                        ok &= prod == x;
                        note += ", matches the group-ring product";
                    }
                    report.push(Case::new(key, ok, ok, true, exact()).at_level(k).with_note(note));
                    if !ok {
                        return Ok(());
                    }
                }
            }
        }
        for m in 2..=max_cyclo {
            for s in primes_up_to(max_cyclo / m) {
                let check = if m % s == 0 { tower_norm_check(m, s)? } else { euler_norm_check(m, s)? };
                let ok = check.ok;
                report.push(Case::new(check.name, ok, check.lhs, check.rhs, exact()));
                if !ok {
                    return Ok(());
                }
            }
        }
        if max_cyclo >= 12 {
            let n = CycloElement::new(12)?.value.norm_to(4);
            let want = -&CycloInt::zeta_pow(4, 1);
            report.push(Case::new("pinned N(1-xi_12) to Q(xi_4)", n == want, &n, &want, exact()));
        }
        Ok(())
    };
    run()?;
    report.duration = start.elapsed();
    Ok(report)
}

/// CHAR of the Frobenius quotient against the ideal of the Euler factor, per prime l.
pub fn run_euler_suite(primes: &[u64], ls: &[u64], rhos: &[GaloisChar], m: u32, n: usize) -> Result<ScenarioReport> {
    let start = Instant::now();
    let labels: Vec<String> = rhos.iter().map(|r| r.label()).collect();
    let mut report = ScenarioReport::new(
        "euler",
        json!({"primes": primes, "l": ls, "rho": labels, "M": m, "N": n}),
    );
    for &p in primes {
        check_prime(p)?;
        for rho in rhos {
            let f = rho.finite.tame_conductor(p);
            let ring = CoeffRing::new(p, euler_precision(p, f, m, n), lcm(unit_exponent(f * p), rho.finite.order()))?;
            for &l in ls {
                if l == p {
                    report.skip("l = p");
                    continue;
                }
                let key = format!("p={} l={} rho={}", p, l, rho.label());
                report.push(euler_case(key, l, rho, f, &ring, n)?);
            }
        }
    }
    report.duration = start.elapsed();
    Ok(report)
}

fn euler_case(key: String, l: u64, rho: &GaloisChar, f: u64, ring: &Arc<CoeffRing>, n: usize) -> Result<Case> {
    let p = ring.p();
    let prec = prec_label(p, ring.prec(), Some(n));
    let a = frobenius_quotient_char(l, rho, f, None, ring, n);
    let b = euler_factor_ideal(l, rho, f, ring, n);
    let (a, b) = match (a, b) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e @ Error::PrecisionExhausted(_)), _) | (_, Err(e @ Error::PrecisionExhausted(_))) => {
            return Ok(Case::unreliable(key, e.to_string(), prec))
        }
        (Err(e), _) | (_, Err(e)) => return Err(e),
    };
    let ramified = rho.finite.conductor() % l == 0;
    let ok = a == b && (!ramified || (a.is_trivial() && b.is_trivial()));
    let e = euler_factor(l, rho, f, &[], ring)?;
    let zd: Vec<String> = (1..=3).filter(|&k| e.is_zero_divisor(k)).map(|k| k.to_string()).collect();
    let mut note = if ramified { "ramified: both sides (1)".to_string() } else { String::new() };
    if !zd.is_empty() {
        if !note.is_empty() {
            note += "; ";
        }
        note += &format!("zero divisor at levels {} (skipped)", zd.join(","));
    }
    let case = Case::new(key, ok, &a, &b, prec);
    Ok(if note.is_empty() { case } else { case.with_note(note) })
}

/// The group-ring side of the Euler identity is built densely at beta_level; keep it
/// under the dense limit by lowering M if needed.
fn euler_precision(p: u64, f: u64, m: u32, n: usize) -> u32 {
    (1..=m)
        .rev()
        .find(|&mm| group_size(f, p, beta_level(p, mm, n)) <= MAX_GROUP_ORDER as u128)
        .unwrap_or(1)
}

/// Regular means p divides no B_k with k even, 2 <= k <= p - 3.
pub fn irregular_indices(p: u64, bern: &[num::BigRational]) -> Vec<u64> {
    let pb = BigInt::from(p);
    (2..p.saturating_sub(2))
        .step_by(2)
        .filter(|&k| (bern[k as usize].numer() % &pb).is_zero())
        .collect()
}

/// v_p of B_{1, chi} at the ring's prime, or None if it vanishes to the given precision.
pub fn bernoulli_valuation(chi: &DirichletChar, ring: &Arc<CoeffRing>) -> Result<Option<u32>> {
    let b: CycloRat = gen_bernoulli(1, chi.table())?;
    let pb = BigInt::from(ring.p());
    let mut den = b.denom().clone();
    let mut extra = 0;
    while den.is_multiple_of(&pb) {
        den /= &pb;
        extra += 1;
    }
    let wide = ring.at_precision(ring.prec() + extra)?;
    let x = embed_cyclo_rat(&b, &wide)?;
    if x.is_zero() {
        return Ok(None);
    }
    Ok(Some(x.valuation()))
}

/// For each odd chi mod p and the matching series: (a) the mu = 0 verdict, (b) the Euler
/// identity at the primes `ls`, (c) for regular p a unit series.
pub fn mc_specialization(p: u64, chi: &DirichletChar, ls: &[u64], m: u32, n: usize) -> Result<ScenarioReport> {
    let start = Instant::now();
    let mut report = ScenarioReport::new("mc", json!({"p": p, "chi": chi.label(), "l": ls, "M": m, "N": n}));
    mc_for(p, std::slice::from_ref(chi), ls, m, n, &mut report)?;
    report.duration = start.elapsed();
    Ok(report)
}

/// mc_specialization over every odd character mod p.
pub fn run_mc_suite(primes: &[u64], ls: &[u64], m: u32, n: usize) -> Result<ScenarioReport> {
    let start = Instant::now();
    let mut report = ScenarioReport::new("mc", json!({"primes": primes, "l": ls, "M": m, "N": n}));
    for &p in primes {
        check_prime(p)?;
        let ring = CoeffRing::new(p, m, 1)?;
        let omega = teichmuller_char(p, &ring);
        let chis: Vec<DirichletChar> = (1..p - 1).step_by(2).map(|j| omega.pow(j as i64).primitive()).collect();
        mc_for(p, &chis, ls, m, n, &mut report)?;
    }
    report.duration = start.elapsed();
    Ok(report)
}

fn mc_for(p: u64, chis: &[DirichletChar], ls: &[u64], m: u32, n: usize, report: &mut ScenarioReport) -> Result<()> {
    check_prime(p)?;
    let bern = bernoulli_numbers(p as usize);
    let regular = irregular_indices(p, &bern).is_empty();
    let level = division_level(p, m, n);
    let mut good = Vec::new();
    for chi in chis {
        if !chi.is_odd() || !chi.is_first_kind(p) {
            return Err(Error::invalid(format!("{} must be odd and of the first kind", chi.label())));
        }
        if !chi.values_unramified(p) {
            report.skip("values ramified over Z_p");
            continue;
        }
        good.push(chi.clone());
    }
    let mut rings = Rings::new(p, m);
    let series = batch(&good, &mut rings, n, level, report)?;
    for s in &series {
        let chi = &s.chi;
        let prec = prec_label(p, m, Some(n));
        let ring = s.series.ring().clone();
        let f = chi.tame_conductor(p);
        let rho = GaloisChar::finite(chi.clone());
        for &l in ls.iter().filter(|&&l| l != p) {
            let key = format!("p={} chi={} euler l={}", p, chi.label(), l);
            let me = euler_precision(p, f, m, n);
            let wide = CoeffRing::new(p, me, lcm(unit_exponent(f * p), ring.cyc_order()))?;
            report.push(euler_case(key, l, &rho, f, &wide, n)?);
        }
        let key = format!("p={} chi={} series", p, chi.label());
        if !s.newton.reliable {
            report.push(Case::unreliable(key, "no certified unit coefficient", prec));
        } else if regular {
            let unit = s.mu() == 0 && s.lambda() == 0;
            report.push(
                Case::new(key, unit, newton_text(s), "mu=0 lambda=0", prec)
                    .at_level(level)
                    .with_note("regular p: trivial characteristic ideal"),
            );
        } else {
            report.push(
                Case::new(key, s.mu() == 0, newton_text(s), "mu=0", prec)
                    .at_level(level)
                    .with_note("irregular p: unit not predicted"),
            );
        }
    }
    Ok(())
}

/// The largest precision at most `m` whose division level keeps (Z/p^k)^* under the cap.
fn scan_precision(p: u64, m: u32, n: usize) -> u32 {
    (1..=m)
        .rev()
        .find(|&mm| group_size(1, p, division_level(p, mm, n)) <= GROUP_CAP)
        .unwrap_or(1)
}

/// Irregular pairs (p, k) for p <= max_p. For every odd chi = omega^j mod p the series
/// f(T, chi omega) is computed and lambda >= 1 is matched against p | B_{1,chi}; for the
/// pairs (p, k) the character is omega^{k-1}.
pub fn irregular_scan(max_p: u64, m: u32, n: usize) -> Result<ScenarioReport> {
    let start = Instant::now();
    let mut report = ScenarioReport::new("irregular_scan", json!({"max_p": max_p, "M": m, "N": n}));
    let bern = bernoulli_numbers(max_p as usize);
    for p in primes_up_to(max_p).into_iter().filter(|&p| p >= 3) {
        let pairs = irregular_indices(p, &bern);
        let mp = scan_precision(p, m, n);
        let ring = CoeffRing::new(p, mp, 1)?;
        let exact_ring = CoeffRing::new(p, m, 1)?;
        let omega = teichmuller_char(p, &ring);
        let chis: Vec<DirichletChar> = (1..p - 1).step_by(2).map(|j| omega.pow(j as i64).primitive()).collect();
        let level = division_level(p, mp, n);
        let mut rings = Rings::new(p, mp);
        let series = batch(&chis, &mut rings, n, level, &mut report)?;
        let prec = prec_label(p, mp, Some(n));
        let mut units = true;
        let mut consistent = true;
        let mut exceptional = 0;
        for s in &series {
            exceptional += (s.newton.reliable && s.lambda() >= 1) as usize;
            let vb = bernoulli_valuation(&s.chi, &exact_ring)?;
            let lam_pos = s.lambda() >= 1;
            let oracle_pos = vb.map_or(true, |v| v >= 1);
            consistent &= s.newton.reliable && s.mu() == 0 && lam_pos == oracle_pos;
            units &= s.newton.reliable && s.mu() == 0 && s.lambda() == 0;
        }
        for &k in &pairs {
            let j = (k - 1) as i64;
            let chi = omega.pow(j).primitive();
            let key = format!("p={} pair k={}", p, k);
            let s = series.iter().find(|s| s.chi == chi).expect("omega^{k-1} is in the batch");
            let vb = bernoulli_valuation(&chi, &exact_ring)?;
            let v0 = s.series.coeff(0);
            let v0 = if v0.is_zero() { None } else { Some(v0.valuation()) };
            // f(0, chi omega) = -B_{1,chi} for chi of conductor p
            let agree = match (vb, v0) {
                (Some(a), Some(b)) => a == b,
                (Some(a), None) => a >= mp,
                (None, _) => false,
            };
            let ok = s.newton.reliable && s.mu() == 0 && s.lambda() >= 1 && agree;
            let vb_text = vb.map_or("zero".to_string(), |v| v.to_string());
            report.push(
                Case::new(
                    key,
                    ok,
                    format!("{} v(f(0))={}", newton_text(s), v0.map_or(format!(">={}", mp), |v| v.to_string())),
                    format!("v_{}(B_{{1,omega^{}}})={} at {}", p, j, vb_text, prec_label(p, m, None)),
                    prec.clone(),
                )
                .at_level(level),
            );
        }
        report.push(
            Case::new(format!("p={} characters with lambda>0", p), exceptional == pairs.len(), exceptional, pairs.len(), prec.clone())
                .at_level(level)
                .with_note("expected: number of irregular indices"),
        );
        if pairs.is_empty() {
            report.push(Case::new(format!("p={} regular: all series units", p), units, units, true, prec.clone()).at_level(level));
        }
        report.push(
            Case::new(format!("p={} lambda>0 iff p | B_1,chi", p), consistent, consistent, true, prec).at_level(level),
        );
    }
    report.duration = start.elapsed();
    Ok(report)
}
