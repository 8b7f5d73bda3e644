use std::fmt;
use std::sync::Arc;

use num::{BigInt, BigRational, Integer, ToPrimitive, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::arith::val;
use crate::error::{Error, Result};
use crate::padic::ring::CoeffRing;

/// An element of the coefficient ring known modulo p^prec (prec <= ring precision).
#[derive(Clone)]
pub struct PadicApprox {
    ring: Arc<CoeffRing>,
    coeffs: Vec<u64>,
    prec: u32,
}

fn reduce_to(coeffs: &mut [u64], m: u64) {
    for c in coeffs.iter_mut() {
        *c %= m;
    }
}

impl PadicApprox {
    pub fn from_raw(ring: &Arc<CoeffRing>, mut coeffs: Vec<u64>, prec: u32) -> Self {
        assert_eq!(coeffs.len(), ring.degree(), "coefficient vector has wrong length");
        let prec = prec.min(ring.prec());
        reduce_to(&mut coeffs, ring.p().pow(prec));
        PadicApprox {
            ring: ring.clone(),
            coeffs,
            prec,
        }
    }

    pub fn zero(ring: &Arc<CoeffRing>) -> Self {
        Self::from_raw(ring, ring.raw_scalar(0), ring.prec())
    }

    pub fn one(ring: &Arc<CoeffRing>) -> Self {
        Self::from_raw(ring, ring.raw_scalar(1), ring.prec())
    }

    pub fn from_i64(ring: &Arc<CoeffRing>, n: i64) -> Self {
        let c = n.rem_euclid(ring.modulus() as i64) as u64;
        Self::from_raw(ring, ring.raw_scalar(c), ring.prec())
    }

    pub fn from_bigint(ring: &Arc<CoeffRing>, n: &BigInt) -> Self {
        let m = BigInt::from(ring.modulus());
        let c = n.mod_floor(&m).to_u64().unwrap();
        Self::from_raw(ring, ring.raw_scalar(c), ring.prec())
    }

    /// Image of a rational number; fails when p divides the reduced denominator.
    pub fn from_rational(ring: &Arc<CoeffRing>, r: &BigRational) -> Result<Self> {
        let num = Self::from_bigint(ring, r.numer());
        let den = Self::from_bigint(ring, r.denom());
        num.div(&den)
    }

    /// zeta_d^e for d dividing the ring's root-of-unity order.
    pub fn zeta_pow(ring: &Arc<CoeffRing>, d: u64, e: i64) -> Result<Self> {
        if !ring.contains_roots_of_unity(d) {
            return Err(Error::Unsupported(format!(
                "ring with D = {} does not contain mu_{}",
                ring.cyc_order(),
                d
            )));
        }
        Ok(Self::from_raw(ring, ring.raw_zeta_pow(d, e), ring.prec()))
    }

    pub fn ring(&self) -> &Arc<CoeffRing> {
        &self.ring
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    /// The scalar value when the element lies in Z/p^prec.
    pub fn as_scalar(&self) -> Option<u64> {
        self.coeffs[1..]
            .iter()
            .all(|&c| c == 0)
            .then_some(self.coeffs[0])
    }

    /// Valuation, equal to the precision when the element is zero at precision.
    pub fn valuation(&self) -> u32 {
        let p = self.ring.p();
        self.coeffs
            .iter()
            .filter(|&&c| c != 0)
            .map(|&c| val(c, p))
            .min()
            .unwrap_or(self.prec)
            .min(self.prec)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub fn is_unit(&self) -> bool {
        self.prec > 0 && self.valuation() == 0
    }

    pub fn with_prec(&self, prec: u32) -> Self {
        Self::from_raw(&self.ring, self.coeffs.clone(), prec.min(self.prec))
    }

    fn check(&self, other: &Self) {
        assert!(
            Arc::ptr_eq(&self.ring, &other.ring) || self.ring.compatible(&other.ring) && self.ring.prec() == other.ring.prec(),
            "coefficient ring mismatch"
        );
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check(other);
        Self::from_raw(
            &self.ring,
            self.ring.raw_add(&self.coeffs, &other.coeffs),
            self.prec.min(other.prec),
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.check(other);
        Self::from_raw(
            &self.ring,
            self.ring.raw_sub(&self.coeffs, &other.coeffs),
            self.prec.min(other.prec),
        )
    }

    pub fn neg(&self) -> Self {
        Self::zero(&self.ring).with_prec(self.prec).sub(self)
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.check(other);
        // an error of p^prec in one factor is scaled by the other's valuation
        let prec = (self.prec + other.valuation()).min(other.prec + self.valuation());
        Self::from_raw(
            &self.ring,
            self.ring.raw_mul(&self.coeffs, &other.coeffs),
            prec,
        )
    }

    pub fn scale(&self, k: i64) -> Self {
        self.mul(&Self::from_i64(&self.ring, k))
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut acc = Self::one(&self.ring);
        let mut b = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&b);
            }
            b = b.mul(&b);
            e >>= 1;
        }
        acc
    }

    /// Divides by p^k; the element must be divisible. Precision drops by k.
    pub fn shift_down(&self, k: u32) -> Result<Self> {
        if k == 0 {
            return Ok(self.clone());
        }
        if self.valuation() < k {
            return Err(Error::NotIntegral(format!(
                "{} is not divisible by {}^{}",
                self,
                self.ring.p(),
                k
            )));
        }
        if k > self.prec {
            return Err(Error::precision(format!(
                "cannot divide by {}^{} at precision {}",
                self.ring.p(),
                k,
                self.prec
            )));
        }
        let pk = self.ring.p().pow(k);
        let coeffs = self.coeffs.iter().map(|&c| c / pk).collect();
        Ok(Self::from_raw(&self.ring, coeffs, self.prec - k))
    }

    pub fn inv(&self) -> Result<Self> {
        Self::one(&self.ring).div(self)
    }

    /// Quotient self / other, with precision min(prec) - v(other).
    pub fn div(&self, other: &Self) -> Result<Self> {
        self.check(other);
        let v = other.valuation();
        if v >= other.prec {
            return Err(Error::precision(format!(
                "division by an element that is zero at precision {}",
                other.prec
            )));
        }
        let unit = other.shift_down(v)?;
        let num = self.with_prec(self.prec.min(other.prec)).shift_down(v)?;
        let inv = self
            .ring
            .raw_inv(&unit.coeffs)
            .ok_or_else(|| Error::ZeroDivisor(format!("{} is not invertible", other)))?;
        let inv = Self::from_raw(&self.ring, inv, unit.prec);
        Ok(num.mul(&inv))
    }

    pub fn frobenius(&self) -> Self {
        Self::from_raw(&self.ring, self.ring.raw_frobenius(&self.coeffs), self.prec)
    }
}

impl PartialEq for PadicApprox {
    /// Equality modulo the smaller of the two precisions.
    fn eq(&self, other: &Self) -> bool {
        if !self.ring.compatible(&other.ring) {
            return false;
        }
        let k = self.prec.min(other.prec);
        let m = self.ring.p().pow(k);
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .all(|(&a, &b)| a % m == b % m)
    }
}

impl fmt::Display for PadicApprox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(c) = self.as_scalar() {
            write!(f, "{} mod {}^{}", c, self.ring.p(), self.prec)
        } else {
            write!(f, "{:?} mod {}^{}", self.coeffs, self.ring.p(), self.prec)
        }
    }
}

impl fmt::Debug for PadicApprox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl Serialize for PadicApprox {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("PadicApprox", 3)?;
        st.serialize_field("p", &self.ring.p())?;
        st.serialize_field("prec", &self.prec)?;
        st.serialize_field("coeffs", &self.coeffs)?;
        st.end()
    }
}

/// Leading p-adic digits of an integer image, for cross-checking rationals.
pub fn rational_mod(r: &BigRational, p: u64, prec: u32) -> Option<u64> {
    let m = BigInt::from(p).pow(prec);
    let den = r.denom().mod_floor(&m);
    if den.is_zero() || (r.denom() % BigInt::from(p)).is_zero() {
        return None;
    }
    let inv = den.modpow(&(num::BigInt::from(crate::arith::euler_phi(p.pow(prec)) - 1)), &m);
    (r.numer() * inv).mod_floor(&m).to_u64()
}
