//! Acceptance criteria, one line each. Runs as a plain binary so the lines are not
//! captured by the test harness.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use iwasawa::char_ideal::{
    alternating_char, base_change, char_of_presentation, determinant, mu_vanishing_check, BaseChange, DetRoute,
    FractionalIdeal, IdealComponent, LambdaTrunc, PresentedModule,
};
use iwasawa::characters::GaloisChar;
use iwasawa::harness::{self, parse_galois, ScenarioReport, Verdict};
use iwasawa::padic::CoeffRing;
use iwasawa::series::PowerSeries;

struct Outcome {
    ok: bool,
    detail: String,
}

fn outcome(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome { ok, detail: detail.into() }
}

fn within(d: Duration, limit_s: u64) -> bool {
    d <= Duration::from_secs(limit_s)
}

fn cases_ok(r: &ScenarioReport, prefix: &str) -> (usize, usize) {
    let sel: Vec<_> = r.cases.iter().filter(|c| c.key.starts_with(prefix)).collect();
    let bad = sel.iter().filter(|c| c.verdict != Verdict::Pass).count();
    (sel.len(), bad)
}

fn first_failure(r: &ScenarioReport) -> String {
    r.sorted_cases()
        .into_iter()
        .find(|c| c.verdict != Verdict::Pass)
        .map(|c| format!("; first failure {}: {} vs {}", c.key, c.computed, c.expected))
        .unwrap_or_default()
}

fn interpolation() -> Outcome {
    let t = Instant::now();
    let r = harness::run_interpolation_suite(&[3, 5, 7], 12, 4, 6).unwrap();
    let pinned = r.cases.iter().filter(|c| c.key.contains("pinned") && c.verdict == Verdict::Pass).count();
    let ok = r.passed() && pinned == 2 && r.cases.len() > 100 && within(t.elapsed(), 120);
    outcome(
        ok,
        format!(
            "{} cases mod p^6, {} pinned, skipped {:?}, {:.1}s{}",
            r.cases.len(),
            pinned,
            r.skipped,
            t.elapsed().as_secs_f64(),
            first_failure(&r)
        ),
    )
}

fn compat() -> (ScenarioReport, Duration) {
    let t = Instant::now();
    let r = harness::run_compat_suite(&[1, 4, 5, 7, 8, 11], &[3, 5, 7], 4, 60).unwrap();
    (r, t.elapsed())
}

fn tower(r: &ScenarioReport, d: Duration) -> Outcome {
    let (n, bad) = cases_ok(r, "theta tower");
    // (f, p) with f prime to p: 6 * 3 - 2, four levels each
    let ok = bad == 0 && n == 16 * 4 && within(d, 60);
    outcome(ok, format!("{} exact projections, {} failed, {:.1}s", n, bad, d.as_secs_f64()))
}

fn smoothing(r: &ScenarioReport) -> Outcome {
    let (n, bad) = cases_ok(r, "smoothing");
    let product = r
        .cases
        .iter()
        .filter(|c| c.key.starts_with("smoothing") && c.note.as_deref().is_some_and(|s| s.contains("group-ring product")))
        .count();
    outcome(bad == 0 && n == 64, format!("{} levels p-integral ({} also via the group-ring product), {} failed", n, product, bad))
}

fn cyclotomic(r: &ScenarioReport) -> Outcome {
    let (n, bad) = cases_ok(r, "N(1-xi");
    let (pn, pbad) = cases_ok(r, "pinned N(1-xi_12)");
    outcome(bad == 0 && pn == 1 && pbad == 0 && n > 50, format!("{} norm relations up to modulus 60, pinned 12 -> 4 ok={}", n, pbad == 0))
}

fn mu_zero() -> Outcome {
    let t = Instant::now();
    let r = harness::run_mu_suite(&[3, 5, 7, 11, 13], 40, 6, 12).unwrap();
    let (n, bad) = cases_ok(&r, "p=");
    let stab = r.cases.iter().filter(|c| c.key.ends_with("stability")).count();
    let ok = r.passed() && stab * 2 == n && within(t.elapsed(), 600);
    outcome(
        ok,
        format!(
            "{} characters mu=0 at (p^6, T^12), {} level-stable, {} failed, skipped {:?}, {:.1}s{}",
            n - stab,
            stab,
            bad,
            r.skipped,
            t.elapsed().as_secs_f64(),
            first_failure(&r)
        ),
    )
}

fn irregular() -> Outcome {
    let r = harness::irregular_scan(37, 6, 4).unwrap();
    let get = |k: &str| r.cases.iter().find(|c| c.key == k);
    let pair = get("p=37 pair k=32");
    let count = get("p=37 characters with lambda>0");
    let regular_ok = [5, 7, 11, 13].iter().all(|p| {
        let key = format!("p={} regular: all series units", p);
        get(&key).is_some_and(|c| c.verdict == Verdict::Pass && c.precision.contains("^6,"))
    });
    let pairs: Vec<_> = r.cases.iter().filter(|c| c.key.contains("pair")).map(|c| c.key.clone()).collect();
    let ok = r.passed()
        && pair.is_some_and(|c| c.computed.contains("lambda=1") && c.expected.contains("=1 "))
        && count.is_some_and(|c| c.computed == "1")
        && regular_ok
        && pairs.len() == 1;
    outcome(
        ok,
        format!(
            "p=37: {} [{}]; one exceptional class: {}; p in 5,7,11,13 units at 6 digits: {}",
            pair.map_or("missing".into(), |c| format!("{} vs {}", c.computed, c.expected)),
            pair.map_or(String::new(), |c| c.precision.clone()),
            count.is_some_and(|c| c.computed == "1"),
            regular_ok
        ),
    )
}

struct Lcg(StdRng);

impl Lcg {
    fn series(&mut self, lam: &LambdaTrunc) -> PowerSeries {
        iwasawa::char_ideal::presentation::random_series(lam, || self.0.gen())
    }

    fn matrix(&mut self, lam: &LambdaTrunc, n: usize) -> Vec<Vec<PowerSeries>> {
        (0..n).map(|_| (0..n).map(|_| self.series(lam)).collect()).collect()
    }

    fn module(&mut self, lam: &LambdaTrunc, n: usize) -> PresentedModule {
        loop {
            if let Ok(m) = PresentedModule::new(lam, self.matrix(lam, n)) {
                return m;
            }
        }
    }
}

/// Both sides of an identity: equal, or both refused. A one-sided precision loss is
/// reported separately; anything else fails.
enum Check {
    Agree,
    Unreliable,
    Differ,
}

fn compare(lhs: iwasawa::Result<FractionalIdeal>, rhs: iwasawa::Result<FractionalIdeal>) -> Check {
    use iwasawa::Error::PrecisionExhausted;
    match (lhs, rhs) {
        (Ok(l), Ok(r)) if l == r => Check::Agree,
        (Err(_), Err(_)) => Check::Agree,
        (Err(PrecisionExhausted(_)), _) | (_, Err(PrecisionExhausted(_))) => Check::Unreliable,
        _ => Check::Differ,
    }
}

fn char_algebra() -> Outcome {
    let t = Instant::now();
    let ring = CoeffRing::new(3, 6, 1).unwrap();
    let lam = LambdaTrunc::new(&ring, 8).unwrap();
    let mut rng = Lcg(StdRng::seed_from_u64(7));
    let reduce = BaseChange::Reduce { prec: 3, trunc: 6 };
    let (mut total, mut fails, mut unreliable, mut rejected) = (0, Vec::new(), 0, 0);
    let mut check = |name: &str, i: usize, c: Check| {
        total += 1;
        match c {
            Check::Agree => {}
            Check::Unreliable => unreliable += 1,
            Check::Differ => fails.push(format!("{} #{}", name, i)),
        }
    };
    // presentations whose CHAR is not certified at this precision are redrawn
    let mut draw = |rng: &mut Lcg, n: usize| loop {
        let m = rng.module(&lam, n);
        if let Ok(c) = char_of_presentation(&m) {
            return (m, c);
        }
        rejected += 1;
    };
    for i in 0..200 {
        let n = 1 + i % 4;
        let (a, ca) = draw(&mut rng, n);

        // independent determinant route
        let elim = determinant(a.entries(), DetRoute::Elimination)
            .and_then(|d| IdealComponent::from_series(&d))
            .map(|c| FractionalIdeal::single("1", c));
        check("elimination", i, compare(elim, Ok(ca.clone())));

        // block triangles
        let m = 1 + (i / 4) % 3;
        let (b, cb) = draw(&mut rng, m);
        let c: Vec<Vec<PowerSeries>> = (0..n).map(|_| (0..m).map(|_| rng.series(&lam)).collect()).collect();
        let blk = PresentedModule::block_triangular(&a, &b, &c).and_then(|x| char_of_presentation(&x));
        check("block", i, compare(blk, ca.mul(&cb)));

        // shift inverts
        let shifted = alternating_char(&[(ca.clone(), -1)]);
        let ok = shifted.as_ref().is_ok_and(|s| ca.mul(s).is_ok_and(|x| x.is_trivial()));
        check("shift", i, compare(shifted, Ok(ca.inverse())));
        check("shift", i, if ok { Check::Agree } else { Check::Differ });

        // base change commutes with CHAR
        let reduced = a.base_change(&reduce).and_then(|x| char_of_presentation(&x));
        check("base change", i, compare(base_change(&ca, &reduce), reduced));
    }
    let ok = fails.is_empty() && unreliable * 10 <= total && within(t.elapsed(), 120);
    outcome(
        ok,
        format!(
            "200 presentations over Lambda/(3^6, T^8) ({} uncertified redrawn), {} checks, {} failed{}, {} lost precision on one side, {:.1}s",
            rejected,
            total,
            fails.len(),
            if fails.is_empty() { String::new() } else { format!(" ({})", fails.iter().take(5).cloned().collect::<Vec<_>>().join(", ")) },
            unreliable,
            t.elapsed().as_secs_f64()
        ),
    )
}

fn euler_identity() -> Outcome {
    let rhos: Vec<GaloisChar> = ["triv", "kappa", "kappa^2*quad:-4"]
        .iter()
        .map(|s| parse_galois(s, None).unwrap())
        .collect();
    let r = harness::run_euler_suite(&[3, 5], &[2, 3, 7, 11], &rhos, 6, 12).unwrap();
    let ramified = r
        .cases
        .iter()
        .filter(|c| c.note.as_deref().is_some_and(|n| n.starts_with("ramified")) && c.verdict == Verdict::Pass)
        .count();
    let ok = r.passed() && r.cases.len() >= 18 && ramified == 2;
    outcome(ok, format!("{} (p, l, rho) ideal equalities, {} ramified with both sides (1){}", r.cases.len(), ramified, first_failure(&r)))
}

/// dim_{F_p} F_p[T] / (T^n, f mod p) from the rank of multiplication by f.
fn quotient_dim(f: &PowerSeries, p: u64, n: usize) -> usize {
    let fbar: Vec<u64> = (0..n).map(|i| f.coeff(i).as_scalar().unwrap() % p).collect();
    // column j = f T^j mod T^n
    let mut rows: Vec<Vec<u64>> = (0..n).map(|i| (0..n).map(|j| if i >= j { fbar[i - j] } else { 0 }).collect()).collect();
    let mut rank = 0;
    for col in 0..n {
        let Some(piv) = (rank..n).find(|&r| rows[r][col] != 0) else { continue };
        rows.swap(rank, piv);
        let inv = (1..p).find(|x| x * rows[rank][col] % p == 1).unwrap();
        for r in 0..n {
            if r != rank && rows[r][col] != 0 {
                let c = rows[r][col] * inv % p;
                for k in 0..n {
                    rows[r][k] = (rows[r][k] + p * p - c * rows[rank][k] % p) % p;
                }
            }
        }
        rank += 1;
    }
    n - rank
}

fn vanishing() -> Outcome {
    let p = 3;
    let ring = CoeffRing::new(p, 6, 1).unwrap();
    let lam = LambdaTrunc::new(&ring, 8).unwrap();
    let mut rng = StdRng::seed_from_u64(11);
    let q = ring.modulus();
    let (mut agree, mut finite) = (0, 0);
    for _ in 0..100 {
        let k = rng.gen_range(1..=3);
        let fs: Vec<PowerSeries> = (0..k)
            .map(|_| {
                let mut v: Vec<i64> = (0..8).map(|_| (rng.gen::<u64>() % q) as i64).collect();
                let j = rng.gen_range(0..2);
                v[j] = 3 * (rng.gen::<i64>() % 1000) + 1 + (rng.gen::<bool>() as i64);
                let mu = if rng.gen_bool(0.3) { 1 } else { 0 };
                let f = lam.from_ints(&v).unwrap();
                if mu == 1 { f.scale(&iwasawa::padic::PadicApprox::from_i64(&ring, 3)) } else { f }
            })
            .collect();
        let m = PresentedModule::elementary(&lam, &fs).unwrap();
        let claim = mu_vanishing_check(&m).unwrap();
        // O-finite iff the F_p-dimension of M / p M stops growing with the truncation
        let brute = fs.iter().all(|f| quotient_dim(f, p, 7) == quotient_dim(f, p, 8));
        finite += brute as usize;
        agree += (claim == brute) as usize;
    }
    outcome(agree == 100 && finite > 10 && finite < 90, format!("{}/100 agree with brute-force quotient dimensions ({} O-finite)", agree, finite))
}

fn main_theorem() -> Outcome {
    let r = harness::run_mc_suite(&[5, 7], &[2, 3, 7], 6, 12).unwrap();
    let series: Vec<_> = r.cases.iter().filter(|c| c.key.ends_with("series")).collect();
    let units = series.iter().filter(|c| c.verdict == Verdict::Pass && c.computed == "mu=0 lambda=0").count();
    // odd chi mod p minus omega^{-1}: 1 + 2 characters
    let ok = r.passed() && units == series.len() && series.len() == 1 + 2;
    outcome(ok, format!("{} odd characters mod 5 and 7 give unit series at 6 digits, omega^-1 skipped{}", units, first_failure(&r)))
}

fn main() -> ExitCode {
    let mut all = true;
    let mut report = |n: u32, o: Outcome| {
        all &= o.ok;
        println!("criterion {:>2}: {} {}", n, if o.ok { "PASS" } else { "FAIL" }, o.detail);
    };
    report(1, interpolation());
    let (c, d) = compat();
    report(2, tower(&c, d));
    report(3, smoothing(&c));
    report(4, mu_zero());
    report(5, irregular());
    report(6, cyclotomic(&c));
    report(7, char_algebra());
    report(8, euler_identity());
    report(9, vanishing());
    report(10, main_theorem());
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
