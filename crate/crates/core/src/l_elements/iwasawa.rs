use std::collections::HashMap;
use std::sync::Arc;

use serde::Serialize;
use serde_json::{json, Value};

use crate::arith::{crt, inv_mod};
use crate::characters::{teichmuller_char, DirichletChar, GaloisChar};
use crate::error::{Error, Result};
use crate::group_ring::division_level;
use crate::padic::{CoeffRing, NewtonInvariants, PadicApprox};
use crate::series::PowerSeries;

use super::kernel::{stream, GroupSpec};
use super::lelement::l_element;

/// f(T, chi omega) modulo (p^M, T^N) with its Newton data.
#[derive(Clone, Debug, Serialize)]
pub struct IwasawaSeries {
    #[serde(skip)]
    pub chi: DirichletChar,
    pub p: u64,
    /// prime-to-p part of the conductor of chi
    pub f: u64,
    pub prec: u32,
    pub trunc: usize,
    pub level: u32,
    #[serde(skip)]
    pub series: PowerSeries,
    pub newton: NewtonInvariants,
}

impl IwasawaSeries {
    fn new(chi: &DirichletChar, f: u64, level: u32, series: PowerSeries) -> Self {
        let ring = series.ring().clone();
        IwasawaSeries {
            chi: chi.clone(),
            p: ring.p(),
            f,
            prec: ring.prec(),
            trunc: series.len(),
            level,
            newton: series.newton(),
            series,
        }
    }

    pub fn mu(&self) -> u32 {
        self.newton.mu
    }

    pub fn lambda(&self) -> u32 {
        self.newton.lambda
    }

    pub fn to_json(&self) -> Value {
        json!({
            "p": self.p,
            "f": self.f,
            "chi": self.chi.label(),
            "M": self.prec,
            "N": self.trunc,
            "coeffs": self.series.digit_strings(),
            "mu": self.newton.mu,
            "lambda": self.newton.lambda,
            "reliable": self.newton.reliable,
        })
    }
}

/// Level used for (p^M, T^N): the smallest one at which the division by T - fp is
/// determined; see `division_level`.
pub fn series_level(p: u64, m: u32, n: usize) -> u32 {
    division_level(p, m, n)
}

/// Validates chi and returns the prime-to-p part f of its conductor.
pub fn check_series_char(chi: &DirichletChar, ring: &Arc<CoeffRing>) -> Result<u64> {
    let p = ring.p();
    if !chi.is_odd() {
        return Err(Error::invalid(format!("{} is even; f(T, chi omega) needs odd chi", chi.label())));
    }
    if !chi.is_first_kind(p) {
        return Err(Error::invalid(format!(
            "{} has conductor {} divisible by p^2 (second kind)",
            chi.label(),
            chi.conductor()
        )));
    }
    if !ring.contains_roots_of_unity(chi.order()) {
        return Err(Error::invalid(format!(
            "the coefficient ring does not contain the values of {}",
            chi.label()
        )));
    }
    let omega = teichmuller_char(p, ring);
    if chi.mul(&omega).is_trivial() {
        return Err(Error::invalid(
            "chi omega is trivial: the p-adic zeta function has a pole".to_string(),
        ));
    }
    Ok(chi.tame_conductor(p))
}

/// f = g (1+T) / (T - fp): asserts the remainder vanishes and keeps N coefficients.
fn divide_out(g: &PowerSeries, f: u64, n: usize) -> Result<PowerSeries> {
    let ring = g.ring().clone();
    let p = ring.p();
    let g1 = g.mul(&PowerSeries::from_ints(&ring, &[1, 1], g.len()));
    let c = PadicApprox::from_i64(&ring, (f * p) as i64);
    let (quot, rem) = g1.div_linear(&c);
    if !rem.is_zero() {
        return Err(Error::NotIntegral(format!(
            "remainder {} after dividing by T - {} does not vanish",
            rem,
            f * p
        )));
    }
    Ok(quot.truncate(n))
}

/// Values chi_f(c) for c mod f and chi_p(zeta_z) for z = 0..p-2, in the ring.
fn split_values(chi: &DirichletChar, f: u64, ring: &Arc<CoeffRing>) -> Result<(Vec<PadicApprox>, Vec<PadicApprox>)> {
    let p = ring.p();
    let chi = chi.primitive();
    let at = |a_f: u64, a_p: u64| -> Result<PadicApprox> {
        let x = if f == 1 { a_p } else { crt(&[(a_f, f), (a_p, p)]) };
        chi.value_in(x as i64, ring)
    };
    let tame = (0..f).map(|c| at(c, 1)).collect::<Result<Vec<_>>>()?;
    let wild = (1..p).map(|a| at(1 % f.max(1), a)).collect::<Result<Vec<_>>>()?;
    Ok((tame, wild))
}

fn push_lanes(table: &mut [u64], row: usize, width: usize, lane: usize, x: &PadicApprox) {
    for (i, &c) in x.coeffs().iter().enumerate() {
        table[row * width + lane + i] = c;
    }
}

/// Lane tables for a group of characters with the same f, each occupying `ring.degree()` lanes.
fn build_group(f: u64, members: &[(&DirichletChar, &Arc<CoeffRing>)], level: u32) -> Result<GroupSpec> {
    let ring0 = members[0].1;
    let p = ring0.p();
    let q = ring0.modulus();
    let pk = p.pow(level);
    let nz = (p - 1) as usize;
    let width: usize = members.iter().map(|(_, r)| r.degree()).sum();
    if f == 1 {
        let rows = (p + 2) as usize;
        let mut wa = vec![0u64; nz * rows * width];
        let mut lane = 0;
        for (chi, ring) in members {
            let (_, wild) = split_values(chi, 1, ring)?;
            for (z, w) in wild.iter().enumerate() {
                for quot in 0..rows {
                    push_lanes(&mut wa, z * rows + quot, width, lane, &w.scale(quot as i64));
                }
            }
            lane += ring.degree();
        }
        return Ok(GroupSpec { f, width, wa });
    }
    let fu = f as usize;
    let finv = inv_mod(f % q, q).unwrap() as i64;
    let mut wa = vec![0u64; nz * fu * width];
    let mut lane = 0;
    for (chi, ring) in members {
        let (tame, wild) = split_values(chi, f, ring)?;
        let finv = PadicApprox::from_i64(ring, finv);
        // T(c) = sum_{t < f} t chi_f(c + t p^k)
        let step = pk % f;
        let tsum: Vec<PadicApprox> = (0..f)
            .map(|c| {
                let mut s = PadicApprox::zero(ring);
                for t in 1..f {
                    let r = ((c + t * step) % f) as usize;
                    s = s.add(&tame[r].scale(t as i64));
                }
                s.mul(&finv)
            })
            .collect();
        for (z, w) in wild.iter().enumerate() {
            for c in 0..fu {
                let a = w.mul(&tsum[c]);
                push_lanes(&mut wa, z * fu + c, width, lane, &a);
            }
        }
        lane += ring.degree();
    }
    Ok(GroupSpec { f, width, wa })
}

/// Batched fast path: f(T, chi omega) for every (chi, ring) at the given level.
/// Frobenius-conjugate characters over the same ring are computed once and
/// conjugated coefficientwise.
pub fn iwasawa_series_batch(
    items: &[(DirichletChar, Arc<CoeffRing>)],
    n: usize,
    level: u32,
) -> Result<Vec<IwasawaSeries>> {
    if items.is_empty() {
        return Ok(vec![]);
    }
    if level == 0 {
        return Err(Error::invalid("level must be at least 1"));
    }
    let p = items[0].1.p();
    let m = items[0].1.prec();
    if items.iter().any(|(_, r)| r.p() != p || r.prec() != m) {
        return Err(Error::Mismatch("all rings in a batch must share p and precision".into()));
    }
    let fs = items
        .iter()
        .map(|(chi, ring)| check_series_char(chi, ring))
        .collect::<Result<Vec<_>>>()?;

    // orbit representatives under chi -> chi^p
    let mut seen: HashMap<(usize, DirichletChar), (usize, u32)> = HashMap::new();
    let mut origin = Vec::with_capacity(items.len());
    let mut reps: Vec<usize> = vec![];
    for (i, (chi, ring)) in items.iter().enumerate() {
        let key = (Arc::as_ptr(ring) as usize, chi.primitive());
        if let Some(&(rep, s)) = seen.get(&key) {
            origin.push((rep, s));
            continue;
        }
        let mut conj = key.1.clone();
        let mut s = 0;
        loop {
            seen.entry((key.0, conj.clone())).or_insert((reps.len(), s));
            conj = conj.pow(p as i64);
            s += 1;
            if conj == key.1 {
                break;
            }
        }
        origin.push((reps.len(), 0));
        reps.push(i);
    }

    // lanes grouped by f
    let mut by_f: Vec<(u64, Vec<usize>)> = vec![];
    for (r, &i) in reps.iter().enumerate() {
        match by_f.iter_mut().find(|(f, _)| *f == fs[i]) {
            Some((_, v)) => v.push(r),
            None => by_f.push((fs[i], vec![r])),
        }
    }
    let len = n + m as usize;
    let specs = by_f
        .iter()
        .map(|(f, rs)| {
            let members: Vec<_> = rs.iter().map(|&r| (&items[reps[r]].0, &items[reps[r]].1)).collect();
            build_group(*f, &members, level)
        })
        .collect::<Result<Vec<_>>>()?;
    let raw = stream(p, level, p.pow(m), len, &specs);

    let mut rep_series: Vec<Option<PowerSeries>> = vec![None; reps.len()];
    for ((f, rs), out) in by_f.iter().zip(&raw) {
        let width: usize = rs.iter().map(|&r| items[reps[r]].1.degree()).sum();
        let mut lane = 0;
        for &r in rs {
            let ring = &items[reps[r]].1;
            let d = ring.degree();
            let coeffs = (0..len)
                .map(|i| PadicApprox::from_raw(ring, out[i * width + lane..i * width + lane + d].to_vec(), m))
                .collect();
            let g = PowerSeries::new(ring, coeffs);
            rep_series[r] = Some(divide_out(&g, *f, n)?);
            lane += d;
        }
    }

    Ok(items
        .iter()
        .zip(&origin)
        .zip(&fs)
        .map(|(((chi, _), &(r, s)), &f)| {
            let mut series = rep_series[r].clone().unwrap();
            for _ in 0..s {
                let ring = series.ring().clone();
                series = PowerSeries::new(&ring, series.coeffs().iter().map(|c| c.frobenius()).collect());
            }
            IwasawaSeries::new(chi, f, level, series)
        })
        .collect())
}

pub fn iwasawa_series_at_level(chi: &DirichletChar, ring: &Arc<CoeffRing>, n: usize, level: u32) -> Result<IwasawaSeries> {
    Ok(iwasawa_series_batch(&[(chi.clone(), ring.clone())], n, level)?.remove(0))
}

/// f(T, chi omega) modulo (p^M, T^N) at the level given by `series_level`.
pub fn iwasawa_series(chi: &DirichletChar, ring: &Arc<CoeffRing>, n: usize) -> Result<IwasawaSeries> {
    iwasawa_series_at_level(chi, ring, n, series_level(ring.p(), ring.prec(), n))
}

/// Reference route through the group ring: the L-element pair (G, H) for psi = chi,
/// beta on both parts, a check that beta(H) (1+T) = T - fp, then the division.
pub fn iwasawa_series_generic(chi: &DirichletChar, ring: &Arc<CoeffRing>, n: usize, level: u32) -> Result<IwasawaSeries> {
    let f = check_series_char(chi, ring)?;
    let p = ring.p();
    let len = n + ring.prec() as usize;
    let psi = GaloisChar::finite(chi.primitive());
    let le = l_element(&psi, f, &[level], ring)?;
    let (g, h) = le.beta_pair(level, len)?;
    let h1 = h.mul(&PowerSeries::from_ints(ring, &[1, 1], len));
    let lin = PowerSeries::from_ints(ring, &[-((f * p) as i64), 1], len);
    if h1 != lin {
        return Err(Error::Mismatch(format!("beta(H) (1+T) = {} is not T - {}", h1, f * p)));
    }
    let series = divide_out(&g, f, n)?;
    Ok(IwasawaSeries::new(chi, f, level, series))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characters::{kronecker, primitive_characters};

    #[test]
    fn chi4_at_three() {
        let ring = CoeffRing::new(3, 6, 1).unwrap();
        let chi = kronecker(-4).unwrap();
        let s = iwasawa_series(&chi, &ring, 6).unwrap();
        assert_eq!(s.series.coeff(0).as_scalar(), Some(1));
        assert_eq!(s.mu(), 0);
        assert_eq!(s.lambda(), 0);
    }

    #[test]
    fn chi4_at_five_trivial_zero() {
        let ring = CoeffRing::new(5, 4, 1).unwrap();
        let chi = kronecker(-4).unwrap();
        let s = iwasawa_series(&chi, &ring, 6).unwrap();
        assert!(s.series.coeff(0).is_zero());
        assert!(s.lambda() >= 1);
    }

    #[test]
    fn fast_matches_group_ring() {
        let mut compared = 0;
        for (p, m, n) in [(3u64, 2u32, 3usize), (5, 2, 3)] {
            let level = series_level(p, m, n);
            for cond in [4u64, p, 4 * p, 7, 3 * p] {
                if cond % (p * p) == 0 {
                    continue;
                }
                for chi in primitive_characters(cond).into_iter().filter(|c| c.is_odd() && c.values_unramified(p)) {
                    let ring = CoeffRing::new(p, m, chi.order()).unwrap();
                    if check_series_char(&chi, &ring).is_err() {
                        continue;
                    }
                    let fast = iwasawa_series_at_level(&chi, &ring, n, level).unwrap();
                    let slow = iwasawa_series_generic(&chi, &ring, n, level).unwrap();
                    assert_eq!(fast.series, slow.series, "p={} {}", p, chi.label());
                    compared += 1;
                }
            }
        }
        assert!(compared >= 6, "only {} characters compared", compared);
    }

    #[test]
    fn conjugates_match_direct() {
        // order-4 characters mod 5 at p = 3 live in a degree-2 ring
        let p = 3;
        let ring = CoeffRing::new(p, 3, 4).unwrap();
        let chis: Vec<_> = primitive_characters(5).into_iter().filter(|c| c.is_odd()).collect();
        assert_eq!(chis.len(), 2);
        let items: Vec<_> = chis.iter().map(|c| (c.clone(), ring.clone())).collect();
        let level = series_level(p, 3, 4);
        let batch = iwasawa_series_batch(&items, 4, level).unwrap();
        for (chi, s) in chis.iter().zip(&batch) {
            let direct = iwasawa_series_at_level(chi, &ring, 4, level).unwrap();
            assert_eq!(direct.series, s.series);
        }
        assert_ne!(batch[0].series, batch[1].series);
    }

    #[test]
    fn rejects_bad_characters() {
        let ring = CoeffRing::new(5, 3, 4).unwrap();
        let omega = teichmuller_char(5, &ring);
        assert!(iwasawa_series(&omega.inverse(), &ring, 4).is_err());
        assert!(iwasawa_series(&DirichletChar::trivial(), &ring, 4).is_err());
    }
}
