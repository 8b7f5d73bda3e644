//! Unramified p-adic coefficient rings and approximations.

pub mod approx;
mod fp_poly;
pub mod ring;

use std::sync::Arc;

use num::{BigInt, Integer, One, ToPrimitive, Zero};
use serde::Serialize;

pub use approx::{rational_mod, PadicApprox};
pub use ring::{CoeffRing, SeedPolicy};

use crate::arith::val;
use crate::error::{Error, Result};
use crate::exact::{CycloInt, CycloRat};

/// Teichmueller lift of a residue prime to p, as a scalar of the ring.
pub fn teichmuller(a: i64, ring: &Arc<CoeffRing>) -> Result<PadicApprox> {
    let p = ring.p();
    let m = ring.modulus();
    let mut x = a.rem_euclid(m as i64) as u64;
    if x % p == 0 {
        return Err(Error::invalid(format!("{} is not a unit mod {}", a, p)));
    }
    for _ in 0..ring.prec() {
        x = crate::arith::pow_mod(x, p, m);
    }
    Ok(PadicApprox::from_i64(ring, x as i64))
}

/// Newton lift of a simple root of `poly` (lowest degree first) from `seed`.
pub fn hensel_root(poly: &[PadicApprox], seed: &PadicApprox) -> Result<PadicApprox> {
    let ring = seed.ring().clone();
    let eval = |x: &PadicApprox| {
        poly.iter()
            .rev()
            .fold(PadicApprox::zero(&ring), |acc, c| acc.mul(x).add(c))
    };
    let deriv: Vec<PadicApprox> = poly
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c.scale(i as i64))
        .collect();
    let eval_d = |x: &PadicApprox| {
        deriv
            .iter()
            .rev()
            .fold(PadicApprox::zero(&ring), |acc, c| acc.mul(x).add(c))
    };
    if eval(seed).valuation() == 0 {
        return Err(Error::invalid("seed is not a root mod p"));
    }
    if !eval_d(seed).is_unit() {
        return Err(Error::invalid("seed is not a simple root mod p"));
    }
    let mut x = seed.clone();
    for _ in 0..=64 {
        let fx = eval(&x);
        if fx.is_zero() {
            return Ok(x);
        }
        x = x.sub(&fx.div(&eval_d(&x))?);
    }
    Err(Error::precision("Newton iteration did not converge"))
}

/// Image of a cyclotomic integer under zeta_d -> zeta_D^{D/d}.
pub fn embed_cyclo(x: &CycloInt, ring: &Arc<CoeffRing>) -> Result<PadicApprox> {
    let d = x.order();
    let base = PadicApprox::zeta_pow(ring, d, 1)?;
    let mut acc = PadicApprox::zero(ring);
    let mut pw = PadicApprox::one(ring);
    for c in x.coeffs() {
        if !c.is_zero() {
            acc = acc.add(&pw.mul(&PadicApprox::from_bigint(ring, c)));
        }
        pw = pw.mul(&base);
    }
    Ok(acc)
}

/// Image of an element of Q(zeta_d); p in the denominator costs precision.
pub fn embed_cyclo_rat(x: &CycloRat, ring: &Arc<CoeffRing>) -> Result<PadicApprox> {
    let den = x.denom();
    let p = BigInt::from(ring.p());
    let mut k = 0u32;
    let mut unit = den.clone();
    while (&unit % &p).is_zero() {
        unit /= &p;
        k += 1;
    }
    let num = embed_cyclo(x.numer(), ring)?;
    let num = num.div(&PadicApprox::from_bigint(ring, &unit))?;
    num.shift_down(k)
}

/// Weierstrass invariants read off a truncated coefficient vector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct NewtonInvariants {
    pub mu: u32,
    pub lambda: u32,
    /// False when every inspected coefficient is zero at its precision.
    pub reliable: bool,
}

/// mu = least coefficient valuation, lambda = least index attaining it (indices < n).
pub fn newton_invariants(coeffs: &[PadicApprox], n: usize) -> NewtonInvariants {
    let n = n.min(coeffs.len());
    let mut best: Option<(u32, usize)> = None;
    for (i, c) in coeffs[..n].iter().enumerate() {
        let v = c.valuation();
        if v < c.prec() && best.map_or(true, |(bv, _)| v < bv) {
            best = Some((v, i));
        }
    }
    match best {
        None => NewtonInvariants {
            mu: coeffs[..n].iter().map(|c| c.prec()).min().unwrap_or(0),
            lambda: 0,
            reliable: false,
        },
        Some((mu, lambda)) => {
            // a coefficient that vanishes at precision <= mu could hide a smaller valuation
            let reliable = coeffs[..n]
                .iter()
                .all(|c| c.valuation() < c.prec() || c.prec() > mu);
            NewtonInvariants {
                mu,
                lambda: lambda as u32,
                reliable,
            }
        }
    }
}

/// p-adic logarithm of a = 1 mod p, returned modulo p^prec as an integer.
pub fn log_p(a: &BigInt, p: u64, prec: u32) -> Result<BigInt> {
    let pb = BigInt::from(p);
    let x = a - BigInt::one();
    if !(&x % &pb).is_zero() {
        return Err(Error::invalid("log_p needs an argument congruent to 1 mod p"));
    }
    // terms x^n / n with n - v_p(n) >= prec vanish; n <= limit covers all others
    let mut limit = prec as u64 + 1;
    while limit - (limit as f64).log(p as f64).floor() as u64 <= prec as u64 {
        limit += 1;
    }
    let guard = val_ceiling(2 * limit, p) + 1;
    let m = pb.pow(prec + guard);
    let x = x.mod_floor(&m);
    let mut acc = BigInt::zero();
    let mut xn = BigInt::one();
    for n in 1..=limit + guard as u64 {
        xn = (&xn * &x).mod_floor(&m);
        let vn = val(n, p);
        let pv = pb.pow(vn);
        let unit = BigInt::from(n) / &pv;
        let term = (&xn / &pv) * unit.modinv(&m).unwrap();
        if n % 2 == 1 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    Ok(acc.mod_floor(&pb.pow(prec)))
}

fn val_ceiling(n: u64, p: u64) -> u32 {
    let mut k = 0;
    let mut pk = 1u64;
    while pk <= n {
        pk *= p;
        k += 1;
    }
    k
}

/// Integer representative of a scalar approximation.
pub fn scalar_to_bigint(x: &PadicApprox) -> Option<BigInt> {
    x.as_scalar().map(BigInt::from)
}

/// Converts an integer to u64 modulo m.
pub fn bigint_mod_u64(x: &BigInt, m: u64) -> u64 {
    x.mod_floor(&BigInt::from(m)).to_u64().unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn teichmueller_values() {
        let ring = CoeffRing::new(5, 2, 4).unwrap();
        let t = teichmuller(2, &ring).unwrap();
        assert_eq!(t.as_scalar(), Some(7));
        assert_eq!(t.pow(4), PadicApprox::one(&ring));
    }

    #[test]
    fn hensel() {
        let ring = CoeffRing::new(5, 2, 1).unwrap();
        let poly: Vec<PadicApprox> = [1, 0, 1].iter().map(|&c| PadicApprox::from_i64(&ring, c)).collect();
        let r = hensel_root(&poly, &PadicApprox::from_i64(&ring, 2)).unwrap();
        assert_eq!(r.as_scalar(), Some(7));
    }

    #[test]
    fn logarithm() {
        // log_5(6) = 5 - 25/2 + ... ; check log(a b) = log a + log b
        let p = 5;
        let m = BigInt::from(5u64.pow(6));
        let a = log_p(&BigInt::from(6), p, 6).unwrap();
        let b = log_p(&BigInt::from(11), p, 6).unwrap();
        let ab = log_p(&BigInt::from(66), p, 6).unwrap();
        assert_eq!((a + b).mod_floor(&m), ab);
    }

    #[test]
    fn embeddings() {
        let ring = CoeffRing::new(5, 2, 4).unwrap();
        let i = embed_cyclo(&CycloInt::zeta_pow(4, 1), &ring).unwrap();
        assert_eq!(i.as_scalar(), Some(7));
        assert!(embed_cyclo(&CycloInt::zeta_pow(3, 1), &ring).is_err());
    }
}
