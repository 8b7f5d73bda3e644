//! Truncated power series over a coefficient ring: Lambda / (p^M, T^N).

use std::fmt;
use std::sync::Arc;

use num::{BigInt, One};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::padic::{newton_invariants, CoeffRing, NewtonInvariants, PadicApprox};

/// sum a_i T^i, i < N, each a_i carrying its own precision.
#[derive(Clone)]
pub struct PowerSeries {
    ring: Arc<CoeffRing>,
    coeffs: Vec<PadicApprox>,
}

/// C(e, i) for any integer e.
pub fn binomial(e: &BigInt, i: usize) -> BigInt {
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for t in 0..i {
        num *= e - BigInt::from(t);
        den *= BigInt::from(t + 1);
    }
    num / den
}

impl PowerSeries {
    pub fn new(ring: &Arc<CoeffRing>, coeffs: Vec<PadicApprox>) -> Self {
        assert!(!coeffs.is_empty(), "a truncated series needs at least one coefficient");
        PowerSeries {
            ring: ring.clone(),
            coeffs,
        }
    }

    pub fn from_ints(ring: &Arc<CoeffRing>, v: &[i64], n: usize) -> Self {
        let coeffs = (0..n)
            .map(|i| PadicApprox::from_i64(ring, v.get(i).copied().unwrap_or(0)))
            .collect();
        Self::new(ring, coeffs)
    }

    pub fn from_bigints(ring: &Arc<CoeffRing>, v: &[BigInt], n: usize) -> Self {
        let coeffs = (0..n)
            .map(|i| match v.get(i) {
                Some(c) => PadicApprox::from_bigint(ring, c),
                None => PadicApprox::zero(ring),
            })
            .collect();
        Self::new(ring, coeffs)
    }

    pub fn zero(ring: &Arc<CoeffRing>, n: usize) -> Self {
        Self::new(ring, vec![PadicApprox::zero(ring); n])
    }

    pub fn one(ring: &Arc<CoeffRing>, n: usize) -> Self {
        Self::constant(&PadicApprox::one(ring), n)
    }

    pub fn constant(c: &PadicApprox, n: usize) -> Self {
        let ring = c.ring().clone();
        let mut v = vec![PadicApprox::zero(&ring); n];
        v[0] = c.clone();
        Self::new(&ring, v)
    }

    /// The variable T.
    pub fn t(ring: &Arc<CoeffRing>, n: usize) -> Self {
        Self::from_ints(ring, &[0, 1], n)
    }

    /// (1+T)^e truncated.
    pub fn one_plus_t_pow(ring: &Arc<CoeffRing>, e: i64, n: usize) -> Self {
        let e = BigInt::from(e);
        let v: Vec<BigInt> = (0..n).map(|i| binomial(&e, i)).collect();
        Self::from_bigints(ring, &v, n)
    }

    pub fn ring(&self) -> &Arc<CoeffRing> {
        &self.ring
    }

    /// Truncation N.
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeffs(&self) -> &[PadicApprox] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> PadicApprox {
        self.coeffs
            .get(i)
            .cloned()
            .unwrap_or_else(|| PadicApprox::zero(&self.ring))
    }

    /// Smallest coefficient precision.
    pub fn precision(&self) -> u32 {
        self.coeffs.iter().map(|c| c.prec()).min().unwrap_or(0)
    }

    pub fn truncate(&self, n: usize) -> Self {
        let mut v = self.coeffs.clone();
        v.resize(n, PadicApprox::zero(&self.ring));
        Self::new(&self.ring, v)
    }

    pub fn with_prec(&self, prec: u32) -> Self {
        Self::new(
            &self.ring,
            self.coeffs.iter().map(|c| c.with_prec(prec)).collect(),
        )
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.len().min(o.len());
        Self::new(
            &self.ring,
            (0..n).map(|i| self.coeffs[i].add(&o.coeffs[i])).collect(),
        )
    }

    pub fn sub(&self, o: &Self) -> Self {
        let n = self.len().min(o.len());
        Self::new(
            &self.ring,
            (0..n).map(|i| self.coeffs[i].sub(&o.coeffs[i])).collect(),
        )
    }

    pub fn neg(&self) -> Self {
        Self::new(&self.ring, self.coeffs.iter().map(|c| c.neg()).collect())
    }

    pub fn scale(&self, c: &PadicApprox) -> Self {
        Self::new(&self.ring, self.coeffs.iter().map(|x| x.mul(c)).collect())
    }

    pub fn mul(&self, o: &Self) -> Self {
        let n = self.len().min(o.len());
        let mut out = vec![PadicApprox::zero(&self.ring); n];
        for i in 0..n {
            if self.coeffs[i].is_zero() && self.coeffs[i].prec() == self.ring.prec() {
                continue;
            }
            for j in 0..n - i {
                out[i + j] = out[i + j].add(&self.coeffs[i].mul(&o.coeffs[j]));
            }
        }
        Self::new(&self.ring, out)
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut acc = Self::one(&self.ring, self.len());
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

    pub fn is_unit(&self) -> bool {
        self.coeffs[0].is_unit()
    }

    /// Inverse of a unit series.
    pub fn inverse(&self) -> Result<Self> {
        if !self.is_unit() {
            return Err(Error::ZeroDivisor(
                "series with non-unit constant term".into(),
            ));
        }
        let n = self.len();
        let a0inv = self.coeffs[0].inv()?;
        let mut b = vec![PadicApprox::zero(&self.ring); n];
        b[0] = a0inv.clone();
        for i in 1..n {
            let mut s = PadicApprox::zero(&self.ring);
            for j in 1..=i {
                s = s.add(&self.coeffs[j].mul(&b[i - j]));
            }
            b[i] = s.mul(&a0inv).neg();
        }
        Ok(Self::new(&self.ring, b))
    }

    /// Exact division by p^k of every coefficient.
    pub fn shift_down(&self, k: u32) -> Result<Self> {
        Ok(Self::new(
            &self.ring,
            self.coeffs
                .iter()
                .map(|c| c.shift_down(k))
                .collect::<Result<_>>()?,
        ))
    }

    /// Division by T - c: returns (quotient of length N - 1, remainder).
    ///
    /// Truncation at T^N perturbs quotient coefficient i by terms of valuation
    /// at least (N - 1 - i) v(c); the caller sizes N accordingly.
    pub fn div_linear(&self, c: &PadicApprox) -> (Self, PadicApprox) {
        let n = self.len();
        let mut q = vec![PadicApprox::zero(&self.ring); n.saturating_sub(1).max(1)];
        let mut carry = PadicApprox::zero(&self.ring);
        for i in (1..n).rev() {
            carry = self.coeffs[i].add(&carry.mul(c));
            q[i - 1] = carry.clone();
        }
        let rem = self.coeffs[0].add(&carry.mul(c));
        (Self::new(&self.ring, q), rem)
    }

    /// Evaluates at x with v(x) >= 1; the omitted tail costs precision N v(x).
    pub fn eval(&self, x: &PadicApprox) -> Result<PadicApprox> {
        let v = x.valuation();
        if v == 0 {
            return Err(Error::invalid("evaluation point must lie in p Z_p"));
        }
        let mut acc = PadicApprox::zero(&self.ring);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(x).add(c);
        }
        let tail = (self.len() as u32).saturating_mul(v);
        Ok(acc.with_prec(tail))
    }

    /// The substitution T -> c(1+T) - 1 for c = 1 mod p.
    ///
    /// Coefficient j loses precision to the unknown tail: it is known modulo
    /// p^{(N - j) v(c - 1)}.
    pub fn substitute_twist(&self, c: &PadicApprox) -> Result<Self> {
        let one = PadicApprox::one(&self.ring);
        let d = c.sub(&one);
        let v = d.valuation();
        if v == 0 {
            return Err(Error::invalid("twist constant must be 1 mod p"));
        }
        let n = self.len();
        // lin = d + c T
        let mut lin = Self::zero(&self.ring, n);
        lin.coeffs[0] = d.clone();
        if n > 1 {
            lin.coeffs[1] = c.clone();
        }
        let mut acc = Self::zero(&self.ring, n);
        for a in self.coeffs.iter().rev() {
            acc = acc.mul(&lin);
            acc.coeffs[0] = acc.coeffs[0].add(a);
        }
        let coeffs = acc
            .coeffs
            .iter()
            .enumerate()
            .map(|(j, x)| x.with_prec(((n - j) as u32).saturating_mul(v)))
            .collect();
        Ok(Self::new(&self.ring, coeffs))
    }

    pub fn newton(&self) -> NewtonInvariants {
        newton_invariants(&self.coeffs, self.len())
    }

    /// Coefficients as "value mod p^k" strings.
    pub fn digit_strings(&self) -> Vec<String> {
        self.coeffs.iter().map(|c| c.to_string()).collect()
    }

    /// Scalar coefficients as signed integers in (-p^k/2, p^k/2].
    pub fn to_signed(&self) -> Option<Vec<BigInt>> {
        self.coeffs
            .iter()
            .map(|c| {
                c.as_scalar().map(|x| {
                    let m = BigInt::from(self.ring.p()).pow(c.prec());
                    let x = BigInt::from(x);
                    if &x * 2 > m {
                        x - m
                    } else {
                        x
                    }
                })
            })
            .collect()
    }
}

impl PartialEq for PowerSeries {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs
    }
}

impl fmt::Display for PowerSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let body = match c.as_scalar() {
                Some(x) => {
                    let m = self.ring.p().pow(c.prec());
                    if x * 2 > m {
                        format!("-{}", m - x)
                    } else {
                        x.to_string()
                    }
                }
                None => format!("{:?}", c.coeffs()),
            };
            terms.push(match i {
                0 => body,
                1 => format!("{}*T", body),
                _ => format!("{}*T^{}", body, i),
            });
        }
        if terms.is_empty() {
            terms.push("0".into());
        }
        write!(
            f,
            "{} + O(T^{}) mod {}^{}",
            terms.join(" + "),
            self.len(),
            self.ring.p(),
            self.precision()
        )
    }
}

impl fmt::Debug for PowerSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl Serialize for PowerSeries {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.digit_strings().serialize(s)
    }
}

/// Sign helper used by the CLI output.
pub fn signed_residue(x: u64, m: u64) -> i128 {
    if x as u128 * 2 > m as u128 {
        x as i128 - m as i128
    } else {
        x as i128
    }
}
