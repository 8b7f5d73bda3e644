use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::arith::{gcd, is_prime, lcm, mul_mod, mult_order, pow_mod};
use crate::error::{Error, Result};
use crate::exact::cyclotomic_poly;
use crate::padic::fp_poly;

/// Which residue factor of Phi_D fixes the embedding of zeta_D.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
pub enum SeedPolicy {
    /// Smallest root mod p (degree 1) or lexicographically smallest factor.
    #[default]
    Min,
    /// Largest root mod p or lexicographically largest factor.
    Max,
}

impl std::str::FromStr for SeedPolicy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "min" | "smallest" => Ok(SeedPolicy::Min),
            "max" | "largest" => Ok(SeedPolicy::Max),
            _ => Err(Error::invalid(format!("unknown seed policy '{}'", s))),
        }
    }
}

/// The unramified ring W(F_{p^r})[zeta_D] / p^M = (Z/p^M)[x]/(G).
///
/// G is the Hensel lift of an irreducible factor of Phi_D mod p, so G divides
/// x^D - 1, and zeta_D is a fixed element `zeta`. Every d-th root of unity with
/// d | D is embedded as zeta_D^{D/d}.
pub struct CoeffRing {
    p: u64,
    prec: u32,
    modulus: u64,
    cyc_order: u64,
    degree: usize,
    poly: Vec<u64>,
    zeta: Vec<u64>,
    policy: SeedPolicy,
}

impl fmt::Debug for CoeffRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "CoeffRing(p={}, M={}, D={}, r={})",
            self.p, self.prec, self.cyc_order, self.degree
        )
    }
}

/// Bare arithmetic in (Z/p^M)[x]/(G) on coefficient slices.
struct Raw<'a> {
    modulus: u64,
    poly: &'a [u64],
}

impl Raw<'_> {
    fn r(&self) -> usize {
        self.poly.len() - 1
    }

    fn mul(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let r = self.r();
        let m = self.modulus;
        if r == 1 {
            return vec![mul_mod(a[0], b[0], m)];
        }
        let mut t = vec![0u128; 2 * r - 1];
        let m128 = m as u128;
        for i in 0..r {
            if a[i] == 0 {
                continue;
            }
            for j in 0..r {
                t[i + j] = (t[i + j] + a[i] as u128 * b[j] as u128) % m128;
            }
        }
        for i in (r..2 * r - 1).rev() {
            let c = t[i];
            if c == 0 {
                continue;
            }
            for j in 0..r {
                let s = c * self.poly[j] as u128 % m128;
                t[i - r + j] = (t[i - r + j] + m128 - s) % m128;
            }
        }
        t.truncate(r);
        t.into_iter().map(|x| x as u64).collect()
    }

    fn add(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        a.iter()
            .zip(b)
            .map(|(&x, &y)| ((x as u128 + y as u128) % self.modulus as u128) as u64)
            .collect()
    }

    fn sub(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        a.iter()
            .zip(b)
            .map(|(&x, &y)| ((x as u128 + self.modulus as u128 - y as u128) % self.modulus as u128) as u64)
            .collect()
    }

    fn scalar(&self, c: u64) -> Vec<u64> {
        let mut v = vec![0u64; self.r()];
        v[0] = c % self.modulus;
        v
    }

    fn pow(&self, a: &[u64], mut e: u128) -> Vec<u64> {
        let mut acc = self.scalar(1);
        let mut b = a.to_vec();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &b);
            }
            b = self.mul(&b, &b);
            e >>= 1;
        }
        acc
    }

    /// Inverse of a unit: invert in the residue field, then Newton-lift.
    fn inv(&self, a: &[u64], p: u64, prec: u32) -> Option<Vec<u64>> {
        if a.iter().all(|&c| c % p == 0) {
            return None;
        }
        let q = (p as u128).pow(self.r() as u32);
        let mut b = self.pow(a, q - 2);
        let two = self.scalar(2);
        let mut k = 1u32;
        loop {
            let ab = self.mul(a, &b);
            b = self.mul(&b, &self.sub(&two, &ab));
            k *= 2;
            if k >= prec.max(1) * 2 {
                break;
            }
        }
        let check = self.mul(a, &b);
        if check != self.scalar(1) {
            return None;
        }
        Some(b)
    }

    fn eval_int_poly(&self, coeffs: &[i64], x: &[u64]) -> Vec<u64> {
        let mut acc = self.scalar(0);
        for &c in coeffs.iter().rev() {
            acc = self.mul(&acc, x);
            let cc = c.rem_euclid(self.modulus as i64) as u64;
            acc = self.add(&acc, &self.scalar(cc));
        }
        acc
    }
}

impl CoeffRing {
    /// Builds the ring of precision `prec` containing the d-th roots of unity and mu_{p-1}.
    pub fn new(p: u64, prec: u32, d: u64) -> Result<Arc<CoeffRing>> {
        Self::with_policy(p, prec, d, SeedPolicy::Min)
    }

    pub fn with_policy(p: u64, prec: u32, d: u64, policy: SeedPolicy) -> Result<Arc<CoeffRing>> {
        if !is_prime(p) || p == 2 {
            return Err(Error::invalid(format!("p = {} must be an odd prime", p)));
        }
        if prec == 0 {
            return Err(Error::invalid("precision must be at least 1"));
        }
        if d == 0 || d % p == 0 {
            return Err(Error::Unsupported(format!(
                "roots of unity of order {} need a ramified extension of Z_{}",
                d, p
            )));
        }
        let modulus = p
            .checked_pow(prec)
            .filter(|&m| m < (1u64 << 62))
            .ok_or_else(|| Error::invalid(format!("{}^{} exceeds 62 bits", p, prec)))?;
        let cyc = lcm(d, p - 1);
        let r = mult_order(p % cyc, cyc).max(1) as usize;
        let phi: Vec<u64> = cyclotomic_poly(cyc)
            .iter()
            .map(|c| {
                let c: i64 = c.try_into().expect("small cyclotomic coefficient");
                c.rem_euclid(p as i64) as u64
            })
            .collect();
        let residue_factor = if r == 1 {
            let roots: Vec<u64> = (1..p)
                .filter(|&s| {
                    pow_mod(s, cyc, p) == 1
                        && crate::arith::factorize(cyc)
                            .iter()
                            .all(|&(q, _)| pow_mod(s, cyc / q, p) != 1)
                })
                .collect();
            let s = match policy {
                SeedPolicy::Min => roots[0],
                SeedPolicy::Max => *roots.last().unwrap(),
            };
            vec![(p - s) % p, 1]
        } else {
            let mut fs = fp_poly::equal_degree_factor(&phi, r, p);
            let key = |f: &Vec<u64>| f.iter().rev().cloned().collect::<Vec<_>>();
            fs.sort_by_key(key);
            match policy {
                SeedPolicy::Min => fs.remove(0),
                SeedPolicy::Max => fs.pop().unwrap(),
            }
        };
        // Stage 1: the ring with the naive lift of the residue factor, in which we
        // Newton-lift the root x of Phi_D.
        let phi_int: Vec<i64> = cyclotomic_poly(cyc)
            .iter()
            .map(|c| c.try_into().unwrap())
            .collect();
        let dphi: Vec<i64> = phi_int
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| c * i as i64)
            .collect();
        let naive = Raw {
            modulus,
            poly: &residue_factor,
        };
        let mut z = if r == 1 {
            vec![(p - residue_factor[0]) % p]
        } else {
            let mut v = vec![0u64; r];
            v[1] = 1;
            v
        };
        for round in 0.. {
            let fz = naive.eval_int_poly(&phi_int, &z);
            if fz.iter().all(|&c| c == 0) {
                break;
            }
            if round > 64 {
                return Err(Error::invalid("Newton lift of zeta_D did not converge"));
            }
            let dz = naive.eval_int_poly(&dphi, &z);
            let inv = naive
                .inv(&dz, p, prec)
                .ok_or_else(|| Error::invalid("root of Phi_D is not simple mod p"))?;
            z = naive.sub(&z, &naive.mul(&fz, &inv));
        }
        // Stage 2: G = prod_i (X - z^{p^i}) has coefficients in Z/p^M.
        let (poly, zeta) = if r == 1 {
            (vec![(modulus - z[0]) % modulus, 1], vec![z[0]])
        } else {
            let mut g: Vec<Vec<u64>> = vec![naive.scalar(1)];
            let mut conj = z.clone();
            for _ in 0..r {
                let mut next = vec![naive.scalar(0); g.len() + 1];
                for (i, c) in g.iter().enumerate() {
                    next[i + 1] = naive.add(&next[i + 1], c);
                    let t = naive.mul(c, &conj);
                    next[i] = naive.sub(&next[i], &t);
                }
                g = next;
                conj = naive.pow(&conj, p as u128);
            }
            let mut poly = Vec::with_capacity(r + 1);
            for c in &g {
                if c[1..].iter().any(|&x| x != 0) {
                    return Err(Error::invalid("lifted factor is not defined over Z_p"));
                }
                poly.push(c[0]);
            }
            let mut zeta = vec![0u64; r];
            zeta[1] = 1;
            (poly, zeta)
        };
        Ok(Arc::new(CoeffRing {
            p,
            prec,
            modulus,
            cyc_order: cyc,
            degree: r,
            poly,
            zeta,
            policy,
        }))
    }

    /// The same ring at a different precision.
    pub fn at_precision(&self, prec: u32) -> Result<Arc<CoeffRing>> {
        Self::with_policy(self.p, prec, self.cyc_order, self.policy)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// Order D of the distinguished root of unity.
    pub fn cyc_order(&self) -> u64 {
        self.cyc_order
    }

    /// Residue degree r.
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn policy(&self) -> SeedPolicy {
        self.policy
    }

    /// Defining polynomial G, monic, lowest degree first.
    pub fn defining_poly(&self) -> &[u64] {
        &self.poly
    }

    /// Two rings hold compatible elements when they agree on p, D and the seed policy.
    pub fn compatible(&self, other: &CoeffRing) -> bool {
        self.p == other.p && self.cyc_order == other.cyc_order && self.policy == other.policy
    }

    pub fn contains_roots_of_unity(&self, d: u64) -> bool {
        d > 0 && self.cyc_order % d == 0
    }

    fn raw(&self) -> Raw<'_> {
        Raw {
            modulus: self.modulus,
            poly: &self.poly,
        }
    }

    pub fn raw_mul(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        self.raw().mul(a, b)
    }

    pub fn raw_add(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        self.raw().add(a, b)
    }

    pub fn raw_sub(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        self.raw().sub(a, b)
    }

    pub fn raw_scalar(&self, c: u64) -> Vec<u64> {
        self.raw().scalar(c)
    }

    pub fn raw_pow(&self, a: &[u64], e: u128) -> Vec<u64> {
        self.raw().pow(a, e)
    }

    pub fn raw_inv(&self, a: &[u64]) -> Option<Vec<u64>> {
        self.raw().inv(a, self.p, self.prec)
    }

    /// Coefficients of zeta_d^e (d | D) in the basis 1, x, ..., x^{r-1}.
    pub fn raw_zeta_pow(&self, d: u64, e: i64) -> Vec<u64> {
        assert!(self.contains_roots_of_unity(d), "ring lacks mu_{}", d);
        let k = (e.rem_euclid(d as i64) as u64) * (self.cyc_order / d);
        self.raw().pow(&self.zeta, k as u128)
    }

    /// The Frobenius automorphism (zeta -> zeta^p) on raw coefficients.
    pub fn raw_frobenius(&self, a: &[u64]) -> Vec<u64> {
        if self.degree == 1 {
            return a.to_vec();
        }
        let zp = self.raw().pow(&self.zeta, self.p as u128);
        let mut acc = self.raw_scalar(0);
        let mut pw = self.raw_scalar(1);
        for &c in a {
            let t: Vec<u64> = pw.iter().map(|&x| mul_mod(x, c, self.modulus)).collect();
            acc = self.raw_add(&acc, &t);
            pw = self.raw_mul(&pw, &zp);
        }
        acc
    }

    /// Discrete logarithm base zeta_{p-1} mod p of a unit residue, via brute force.
    pub fn residue_log(&self, a: u64) -> Option<u64> {
        let a = a % self.p;
        if gcd(a, self.p) != 1 {
            return None;
        }
        let g = self.raw_zeta_pow(self.p - 1, 1);
        let g0 = g[0] % self.p;
        debug_assert!(self.degree == 1 || g[1..].iter().all(|&c| c == 0));
        let mut x = 1u64;
        for k in 0..self.p - 1 {
            if x == a {
                return Some(k);
            }
            x = x * g0 % self.p;
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_roots() {
        let r = CoeffRing::new(5, 2, 4).unwrap();
        assert_eq!(r.raw_zeta_pow(4, 1), vec![7]);
        let r = CoeffRing::new(7, 2, 3).unwrap();
        assert_eq!(r.raw_zeta_pow(6, 1), vec![31]);
        assert_eq!(r.raw_zeta_pow(3, 1), vec![30]);
        assert_eq!(r.raw_zeta_pow(2, 1), vec![48]);
    }

    #[test]
    fn unramified_extension() {
        // mu_4 over Z_3 needs the quadratic extension
        let r = CoeffRing::new(3, 4, 4).unwrap();
        assert_eq!(r.degree(), 2);
        let z = r.raw_zeta_pow(4, 1);
        let z4 = r.raw_pow(&z, 4);
        assert_eq!(z4, r.raw_scalar(1));
        let z2 = r.raw_pow(&z, 2);
        assert_eq!(z2, r.raw_scalar(80));
        let inv = r.raw_inv(&r.raw_add(&z, &r.raw_scalar(1))).unwrap();
        assert_eq!(r.raw_mul(&inv, &r.raw_add(&z, &r.raw_scalar(1))), r.raw_scalar(1));
        assert!(CoeffRing::new(3, 4, 3).is_err());
    }
}
