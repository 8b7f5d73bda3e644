//! Finite-level group rings O[(Z/fp^k)^*], projections, twists, idempotents and beta.

pub mod elem;
pub mod level;

use std::sync::Arc;

use crate::arith::val;
use crate::characters::{all_characters, DirichletChar};
use crate::error::{Error, Result};
use crate::padic::{CoeffRing, PadicApprox};
use crate::series::PowerSeries;

pub use elem::{Coefficient, GroupRingElem, PadicElem, RatElem, TowerElem};
pub use level::{LevelGroup, MAX_GROUP_ORDER};

/// Smallest level k such that (1+T)^{p^{k-1}} - 1 lies in (p^M, T^N), so that
/// beta at level k is well defined modulo (p^M, T^N).
pub fn beta_level(p: u64, m: u32, n: usize) -> u32 {
    let mut e = 0u32;
    loop {
        let pe = (p as u128).pow(e);
        let ok = pe >= n as u128
            && (1..n as u64).all(|i| i as u128 > pe || e as i64 - val(i, p) as i64 >= m as i64);
        if ok {
            return e + 1;
        }
        e += 1;
    }
}

/// Smallest level k at which dividing beta(x) by T - fp is determined modulo
/// (p^M, T^N): every multiple w of (1+T)^{p^{k-1}} - 1 must satisfy
/// v(w_i) >= M - max(0, i - N), which is checked on the generator.
pub fn division_level(p: u64, m: u32, n: usize) -> u32 {
    let mut e = 0u32;
    loop {
        let pe = (p as u128).pow(e);
        let top_ok = pe >= (n as u128 + m as u128);
        let ok = top_ok
            && (1..(n as u64 + m as u64)).all(|i| {
                if i as u128 >= pe {
                    return true;
                }
                let need = m as i64 - (i as i64 - n as i64).max(0);
                e as i64 - val(i, p) as i64 >= need
            });
        if ok {
            return e + 1;
        }
        e += 1;
    }
}

/// Characters of Delta, i.e. of (Z/fp)^*, with the orthogonal idempotents e_theta at level k.
pub fn idempotents(
    group: &Arc<LevelGroup>,
    ring: &Arc<CoeffRing>,
) -> Result<Vec<(DirichletChar, PadicElem)>> {
    let fp = group.f() * group.p();
    let chars = all_characters(fp);
    let delta: Vec<u64> = group
        .units()
        .iter()
        .enumerate()
        .filter(|(i, _)| group.gamma_exp(*i) == 0)
        .map(|(_, &a)| a)
        .collect();
    let inv_order = PadicApprox::from_i64(ring, delta.len() as i64).inv()?;
    let mut out = Vec::with_capacity(chars.len());
    for theta in chars {
        if !ring.contains_roots_of_unity(theta.order()) {
            return Err(Error::Unsupported(format!(
                "ring lacks the values of {}",
                theta.label()
            )));
        }
        let mut e = PadicElem::padic_zero(group, ring);
        let inv = theta.inverse();
        let mut coeffs = e.coeffs().to_vec();
        for &d in &delta {
            let i = group.index_of(d as i64).unwrap();
            coeffs[i] = inv.value_in(d as i64, ring)?.mul(&inv_order);
        }
        e = PadicElem::from_coeffs(group, coeffs);
        out.push((theta, e));
    }
    Ok(out)
}

/// Gamma-coefficients y_j = sum over Gamma-coset j of theta(a) c_a.
pub fn gamma_components(x: &PadicElem, theta: &DirichletChar) -> Result<Vec<PadicApprox>> {
    let group = x.group();
    let ring = x.ring().clone();
    let fp = group.f() * group.p();
    if fp % theta.conductor() != 0 {
        return Err(Error::invalid(format!(
            "{} is not a character of (Z/{})^*",
            theta.label(),
            fp
        )));
    }
    let theta = theta.primitive();
    let mut y = vec![PadicApprox::zero(&ring); group.gamma_order() as usize];
    for (i, (&a, c)) in group.units().iter().zip(x.coeffs()).enumerate() {
        if c.is_zero() && c.prec() == ring.prec() {
            continue;
        }
        let j = group.gamma_exp(i) as usize;
        let t = theta.value_in(a as i64, &ring)?;
        y[j] = y[j].add(&t.mul(c));
    }
    Ok(y)
}

/// sum_j y_j (1+T)^{-j} modulo T^n, by Horner in (1+T)^{-1}.
pub fn gamma_to_series(y: &[PadicApprox], ring: &Arc<CoeffRing>, n: usize) -> PowerSeries {
    let mut acc = vec![PadicApprox::zero(ring); n];
    for yj in y.iter().rev() {
        // acc <- acc * (1+T)^{-1}
        for i in 1..n {
            let prev = acc[i - 1].clone();
            acc[i] = acc[i].sub(&prev);
        }
        acc[0] = acc[0].add(yj);
    }
    PowerSeries::new(ring, acc)
}

/// beta: applies e_theta, collapses Delta and sends g_{(1+fp)^{-1}} to 1+T.
pub fn beta(x: &PadicElem, theta: &DirichletChar, n: usize) -> Result<PowerSeries> {
    let group = x.group();
    let ring = x.ring();
    let need = beta_level(group.p(), ring.prec(), n);
    if group.k() < need {
        return Err(Error::precision(format!(
            "level {} is too small for truncation (p^{}, T^{}); need level {}",
            group.k(),
            ring.prec(),
            n,
            need
        )));
    }
    let y = gamma_components(x, theta)?;
    Ok(gamma_to_series(&y, ring, n))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn level_bounds() {
        assert_eq!(division_level(5, 6, 12), 8);
        assert_eq!(division_level(3, 6, 12), 9);
        assert_eq!(division_level(7, 6, 12), 8);
        assert_eq!(division_level(11, 6, 12), 8);
        assert_eq!(division_level(13, 6, 12), 7);
        assert_eq!(beta_level(5, 2, 3), 3);
        assert_eq!(beta_level(5, 2, 6), 4);
    }

    #[test]
    fn beta_of_generators() {
        let ring = CoeffRing::new(5, 2, 1).unwrap();
        let k = beta_level(5, 2, 4);
        let g = LevelGroup::new(1, 5, k).unwrap();
        let triv = DirichletChar::trivial();
        let u = g.gamma_generator() as i64;
        let uinv = crate::arith::inv_mod(u as u64, g.modulus()).unwrap() as i64;
        let b = beta(&PadicElem::padic_basis(&g, uinv, &ring).unwrap(), &triv, 4).unwrap();
        assert_eq!(b, PowerSeries::from_ints(&ring, &[1, 1], 4));
        let b = beta(&PadicElem::padic_basis(&g, u, &ring).unwrap(), &triv, 4).unwrap();
        assert_eq!(b, PowerSeries::from_ints(&ring, &[1, -1, 1, -1], 4));
        let one = PadicElem::one(&g, &PadicApprox::zero(&ring));
        assert_eq!(beta(&one, &triv, 4).unwrap(), PowerSeries::one(&ring, 4));
        let small = LevelGroup::new(1, 5, 2).unwrap();
        assert!(beta(&PadicElem::one(&small, &PadicApprox::zero(&ring)), &triv, 4).is_err());
    }
}
