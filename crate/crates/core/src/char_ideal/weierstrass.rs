//! Weierstrass preparation in Lambda / (p^M, T^N).

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::padic::{CoeffRing, PadicApprox};
use crate::series::PowerSeries;

/// Truncated Iwasawa algebra O[[T]] / (p^M, T^N).
#[derive(Clone, Debug)]
pub struct LambdaTrunc {
    ring: Arc<CoeffRing>,
    n: usize,
}

impl LambdaTrunc {
    pub fn new(ring: &Arc<CoeffRing>, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("truncation must be at least 1"));
        }
        Ok(LambdaTrunc { ring: ring.clone(), n })
    }

    pub fn ring(&self) -> &Arc<CoeffRing> {
        &self.ring
    }

    pub fn trunc(&self) -> usize {
        self.n
    }

    pub fn zero(&self) -> PowerSeries {
        PowerSeries::zero(&self.ring, self.n)
    }

    pub fn one(&self) -> PowerSeries {
        PowerSeries::one(&self.ring, self.n)
    }

    pub fn t(&self) -> PowerSeries {
        PowerSeries::t(&self.ring, self.n)
    }

    pub fn from_ints(&self, v: &[i64]) -> Result<PowerSeries> {
        if v.len() > self.n {
            return Err(Error::invalid(format!(
                "{} coefficients do not fit below T^{}",
                v.len(),
                self.n
            )));
        }
        Ok(PowerSeries::from_ints(&self.ring, v, self.n))
    }

    /// Element with scalar coordinates: coeffs[i] lists the ring coordinates of a_i.
    pub fn from_coords(&self, coeffs: &[Vec<i64>]) -> Result<PowerSeries> {
        let d = self.ring.degree();
        if coeffs.len() > self.n {
            return Err(Error::invalid(format!(
                "{} coefficients do not fit below T^{}",
                coeffs.len(),
                self.n
            )));
        }
        let q = self.ring.modulus() as i128;
        let mut out = Vec::with_capacity(self.n);
        for i in 0..self.n {
            let c = match coeffs.get(i) {
                None => PadicApprox::zero(&self.ring),
                Some(v) => {
                    if v.len() > d {
                        return Err(Error::invalid(format!(
                            "coefficient with {} coordinates in a ring of degree {}",
                            v.len(),
                            d
                        )));
                    }
                    let mut raw = vec![0u64; d];
                    for (r, &x) in raw.iter_mut().zip(v) {
                        *r = (x as i128).rem_euclid(q) as u64;
                    }
                    PadicApprox::from_raw(&self.ring, raw, self.ring.prec())
                }
            };
            out.push(c);
        }
        Ok(PowerSeries::new(&self.ring, out))
    }

    pub fn is_unit(&self, x: &PowerSeries) -> bool {
        x.is_unit()
    }

    pub fn contains(&self, x: &PowerSeries) -> bool {
        x.len() == self.n && x.ring().compatible(&self.ring) && x.ring().prec() == self.ring.prec()
    }
}

/// f = p^mu P(T) U(T) with P distinguished of degree lambda and U a unit.
#[derive(Clone, Debug)]
pub struct Weierstrass {
    pub mu: u32,
    /// P, monic of degree lambda, lowest coefficient first
    pub dist: Vec<PadicApprox>,
    /// U, known modulo T^{N - lambda}
    pub unit: PowerSeries,
}

impl Weierstrass {
    pub fn lambda(&self) -> usize {
        self.dist.len() - 1
    }
}

/// Weierstrass preparation of a truncated series.
///
/// The coefficients of P are known to min(M - mu, floor(N / lambda) - 1) digits: a
/// change of f above T^N moves P by a multiple of T^N mod P, and T^lambda is
/// divisible by p modulo P.
pub fn weierstrass(f: &PowerSeries) -> Result<Weierstrass> {
    let w = prepare(f)?;
    if w.lambda() > 0 && f.len() / w.lambda() < 2 {
        return Err(Error::precision(format!(
            "lambda = {} leaves no certified digit of the distinguished polynomial below T^{}",
            w.lambda(),
            f.len()
        )));
    }
    Ok(w)
}

/// As `weierstrass`, but P may come back with no certified digits; the unit factor
/// is still usable.
pub(crate) fn prepare(f: &PowerSeries) -> Result<Weierstrass> {
    let nv = f.newton();
    if !nv.reliable {
        return Err(Error::precision(format!(
            "series is zero or has no certified minimal coefficient at precision p^{}, T^{}",
            f.precision(),
            f.len()
        )));
    }
    let ring = f.ring().clone();
    let n = f.len();
    let (mu, lambda) = (nv.mu, nv.lambda as usize);
    let h = f.shift_down(mu)?;
    let m = h.precision();
    if lambda == 0 {
        return Ok(Weierstrass {
            mu,
            dist: vec![PadicApprox::one(&ring)],
            unit: h,
        });
    }
    let len = n - lambda;
    // V = U^{-1} solves (h V)_lambda = 1 and (h V)_i = 0 for lambda < i < N; the
    // p-divisible low part of h makes the iteration contract
    let hl_inv = h.coeff(lambda).inv()?;
    let zero = PadicApprox::zero(&ring);
    let mut v = vec![zero.clone(); len];
    for _ in 0..=m {
        let mut next = v.clone();
        for j in 0..len {
            let mut s = if j == 0 { PadicApprox::one(&ring) } else { zero.clone() };
            for (t, vt) in next.iter().enumerate().take(lambda + j + 1).filter(|&(t, _)| t != j) {
                s = s.sub(&h.coeff(lambda + j - t).mul(vt));
            }
            next[j] = s.mul(&hl_inv);
        }
        if next == v {
            break;
        }
        v = next;
    }
    let vs = PowerSeries::new(&ring, v);
    let hv = h.truncate(len).mul(&vs);
    let digits = m.min((n / lambda) as u32 - 1);
    let mut dist: Vec<PadicApprox> = (0..lambda).map(|i| hv.coeff(i).with_prec(digits)).collect();
    dist.push(PadicApprox::one(&ring));
    let unit = vs.inverse()?;
    Ok(Weierstrass { mu, dist, unit })
}

/// Product of two polynomials given lowest coefficient first.
pub fn poly_mul(a: &[PadicApprox], b: &[PadicApprox]) -> Vec<PadicApprox> {
    let ring = a[0].ring().clone();
    let mut out = vec![PadicApprox::zero(&ring); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] = out[i + j].add(&x.mul(y));
        }
    }
    out
}

/// Division by a monic polynomial: (quotient, remainder).
pub fn poly_divrem(a: &[PadicApprox], b: &[PadicApprox]) -> (Vec<PadicApprox>, Vec<PadicApprox>) {
    let ring = a[0].ring().clone();
    let db = b.len() - 1;
    if a.len() <= db {
        return (vec![PadicApprox::zero(&ring)], a.to_vec());
    }
    let mut r = a.to_vec();
    let mut q = vec![PadicApprox::zero(&ring); a.len() - db];
    for i in (0..q.len()).rev() {
        let c = r[i + db].clone();
        for (j, bj) in b.iter().enumerate() {
            r[i + j] = r[i + j].sub(&c.mul(bj));
        }
        q[i] = c;
    }
    r.truncate(db.max(1));
    if db == 0 {
        r = vec![PadicApprox::zero(&ring)];
    }
    (q, r)
}

/// The series p^mu P as an element of Lambda / (p^M, T^n).
pub fn generator_series(mu: u32, dist: &[PadicApprox], ring: &Arc<CoeffRing>, n: usize) -> PowerSeries {
    let pmu = PadicApprox::from_bigint(ring, &num::BigInt::from(ring.p()).pow(mu));
    let coeffs = (0..n)
        .map(|i| match dist.get(i) {
            Some(c) => c.mul(&pmu),
            None => PadicApprox::zero(ring),
        })
        .collect();
    PowerSeries::new(ring, coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prepares_simple_series() {
        let ring = CoeffRing::new(3, 6, 1).unwrap();
        let lam = LambdaTrunc::new(&ring, 8).unwrap();
        // (T - 3)(1 + T) = -3 - 2T + T^2
        let f = lam.from_ints(&[-3, -2, 1]).unwrap();
        let w = weierstrass(&f).unwrap();
        assert_eq!(w.mu, 0);
        assert_eq!(w.lambda(), 1);
        assert_eq!(w.dist[0], PadicApprox::from_i64(&ring, -3));
        let g = lam.from_ints(&[9, 3, 27]).unwrap();
        let w = weierstrass(&g).unwrap();
        assert_eq!((w.mu, w.lambda()), (1, 1));
        // root of 3 + T + 9T^2 is -84 mod 3^5
        assert_eq!(w.dist[0], PadicApprox::from_i64(&ring, 84).with_prec(5));
    }

    #[test]
    fn reconstructs_input() {
        let ring = CoeffRing::new(5, 5, 1).unwrap();
        let lam = LambdaTrunc::new(&ring, 10).unwrap();
        let f = lam.from_ints(&[25, 10, 5, 7, 1, 3]).unwrap();
        let w = weierstrass(&f).unwrap();
        assert_eq!(w.lambda(), 3);
        let back = generator_series(w.mu, &w.dist, &ring, 10).mul(&w.unit.truncate(10));
        for i in 0..10 - w.lambda() {
            assert_eq!(back.coeff(i), f.coeff(i), "coefficient {}", i);
        }
    }

    #[test]
    fn rejects_zero() {
        let ring = CoeffRing::new(3, 4, 1).unwrap();
        let lam = LambdaTrunc::new(&ring, 4).unwrap();
        assert!(matches!(weierstrass(&lam.zero()), Err(Error::PrecisionExhausted(_))));
    }

    #[test]
    fn poly_division() {
        let ring = CoeffRing::new(3, 4, 1).unwrap();
        let c = |v: &[i64]| v.iter().map(|&x| PadicApprox::from_i64(&ring, x)).collect::<Vec<_>>();
        let a = poly_mul(&c(&[3, 1]), &c(&[-6, 0, 1]));
        let (q, r) = poly_divrem(&a, &c(&[3, 1]));
        assert_eq!(q, c(&[-6, 0, 1]));
        assert!(r.iter().all(|x| x.is_zero()));
    }
}
