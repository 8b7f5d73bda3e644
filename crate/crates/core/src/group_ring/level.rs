use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::arith::{euler_phi, gcd, is_prime, mul_mod, pow_mod};
use crate::error::{Error, Result};

/// Largest group handled with dense coefficient vectors.
pub const MAX_GROUP_ORDER: u64 = 1_000_000;

/// The group (Z/fp^k)^* = Gal(Q(zeta_{fp^k})/Q), split as Delta x Gamma_k.
///
/// Delta = (Z/f)^* x mu_{p-1} maps isomorphically onto (Z/fp)^*; Gamma_k is cyclic of
/// order p^{k-1}, generated by u = 1 + fp.
#[derive(Debug)]
pub struct LevelGroup {
    f: u64,
    p: u64,
    k: u32,
    modulus: u64,
    units: Vec<u64>,
    index: Vec<u32>,
    gamma: Vec<u32>,
}

impl LevelGroup {
    pub fn new(f: u64, p: u64, k: u32) -> Result<Arc<LevelGroup>> {
        static CACHE: OnceLock<Mutex<HashMap<(u64, u64, u32), Arc<LevelGroup>>>> = OnceLock::new();
        if !is_prime(p) || p == 2 {
            return Err(Error::invalid(format!("p = {} must be an odd prime", p)));
        }
        if f == 0 || gcd(f, p) != 1 {
            return Err(Error::invalid(format!("f = {} must be positive and prime to p", f)));
        }
        if k == 0 {
            return Err(Error::invalid(
                "level k = 0 is excluded: towers start at k = 1",
            ));
        }
        let modulus = p
            .checked_pow(k)
            .and_then(|pk| pk.checked_mul(f))
            .ok_or_else(|| Error::invalid("level modulus overflows"))?;
        if euler_phi(modulus) > MAX_GROUP_ORDER {
            return Err(Error::invalid(format!(
                "group of order {} exceeds the dense limit {}",
                euler_phi(modulus),
                MAX_GROUP_ORDER
            )));
        }
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        if let Some(g) = cache.lock().unwrap().get(&(f, p, k)) {
            return Ok(g.clone());
        }
        let g = Arc::new(Self::build(f, p, k, modulus));
        cache.lock().unwrap().insert((f, p, k), g.clone());
        Ok(g)
    }

    fn build(f: u64, p: u64, k: u32, modulus: u64) -> LevelGroup {
        let pk = p.pow(k);
        let units: Vec<u64> = (1..modulus.max(2)).filter(|&a| gcd(a, modulus) == 1).collect();
        let mut index = vec![u32::MAX; modulus as usize];
        for (i, &a) in units.iter().enumerate() {
            index[a as usize] = i as u32;
        }
        // discrete log to base u on 1 + pZ/p^k
        let u = (1 + f * p) % pk;
        let mut dlog = vec![u32::MAX; pk as usize];
        let mut x = 1 % pk;
        for j in 0..pk / p {
            dlog[x as usize] = j as u32;
            x = mul_mod(x, u, pk);
        }
        let tpow = pk / p;
        let gamma = units
            .iter()
            .map(|&a| {
                let a = a % pk;
                let w = pow_mod(a, tpow, pk);
                let winv = crate::arith::inv_mod(w, pk).unwrap();
                dlog[mul_mod(a, winv, pk) as usize]
            })
            .collect();
        LevelGroup {
            f,
            p,
            k,
            modulus,
            units,
            index,
            gamma,
        }
    }

    pub fn f(&self) -> u64 {
        self.f
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    /// f p^k.
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn order(&self) -> usize {
        self.units.len()
    }

    /// Units in increasing order; position i is the basis element g_{units[i]}.
    pub fn units(&self) -> &[u64] {
        &self.units
    }

    pub fn index_of(&self, a: i64) -> Option<usize> {
        let r = a.rem_euclid(self.modulus as i64) as usize;
        let i = self.index[r];
        (i != u32::MAX).then_some(i as usize)
    }

    /// Exponent j with Gamma-component of units[i] equal to u^j.
    pub fn gamma_exp(&self, i: usize) -> u32 {
        self.gamma[i]
    }

    /// Order of Gamma_k, p^{k-1}.
    pub fn gamma_order(&self) -> u64 {
        self.p.pow(self.k - 1)
    }

    /// Generator u = 1 + fp of Gamma.
    pub fn gamma_generator(&self) -> u64 {
        (1 + self.f * self.p) % self.modulus
    }
}

impl PartialEq for LevelGroup {
    fn eq(&self, other: &Self) -> bool {
        (self.f, self.p, self.k) == (other.f, other.p, other.k)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn splitting() {
        let g = LevelGroup::new(4, 3, 2).unwrap();
        assert_eq!(g.order(), 12);
        let u = g.gamma_generator();
        assert_eq!(u, 13 % 36);
        let i = g.index_of(u as i64).unwrap();
        assert_eq!(g.gamma_exp(i), 1);
        // -1 lies in Delta
        assert_eq!(g.gamma_exp(g.index_of(-1).unwrap()), 0);
        assert!(LevelGroup::new(3, 3, 2).is_err());
        assert!(LevelGroup::new(1, 3, 0).is_err());
    }
}
