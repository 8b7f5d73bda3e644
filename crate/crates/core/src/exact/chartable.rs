use serde::{Deserialize, Serialize};

use crate::arith::{divisors, gcd, lcm};
use crate::error::{Error, Result};
use crate::exact::cyclo::CycloInt;

/// A Dirichlet character as a table of exponents: chi(a) = zeta_order^exps[a].
///
/// Entries are `None` exactly at residues not prime to the modulus. The order is
/// normalised to the exact order of the character.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CharTable {
    modulus: u64,
    order: u64,
    exps: Vec<Option<u64>>,
}

impl CharTable {
    pub fn new(modulus: u64, order: u64, exps: Vec<Option<u64>>) -> Result<Self> {
        if modulus == 0 || order == 0 {
            return Err(Error::invalid("modulus and order must be positive"));
        }
        if exps.len() != modulus as usize {
            return Err(Error::invalid(format!(
                "table has {} entries, expected {}",
                exps.len(),
                modulus
            )));
        }
        for (a, e) in exps.iter().enumerate() {
            let unit = gcd(a as u64, modulus) == 1;
            match e {
                Some(x) if !unit || *x >= order => {
                    return Err(Error::invalid(format!("bad table entry at residue {}", a)))
                }
                None if unit => {
                    return Err(Error::invalid(format!("missing value at unit {}", a)))
                }
                _ => {}
            }
        }
        if exps[(1 % modulus) as usize] != Some(0) {
            return Err(Error::invalid("chi(1) must equal 1"));
        }
        let units: Vec<u64> = (0..modulus).filter(|&a| gcd(a, modulus) == 1).collect();
        for &a in &units {
            for &b in &units {
                let ab = (a * b % modulus) as usize;
                let lhs = exps[ab].unwrap();
                let rhs = (exps[a as usize].unwrap() + exps[b as usize].unwrap()) % order;
                if lhs != rhs {
                    return Err(Error::invalid(format!(
                        "table is not multiplicative at ({}, {})",
                        a, b
                    )));
                }
            }
        }
        Ok(Self::normalised(modulus, order, exps))
    }

    fn normalised(modulus: u64, order: u64, exps: Vec<Option<u64>>) -> Self {
        let g = exps.iter().flatten().fold(order, |g, &e| gcd(g, e));
        let exps = exps.into_iter().map(|e| e.map(|x| x / g)).collect();
        CharTable {
            modulus,
            order: order / g,
            exps,
        }
    }

    pub fn trivial(modulus: u64) -> Self {
        let exps = (0..modulus)
            .map(|a| (gcd(a, modulus) == 1).then_some(0))
            .collect();
        CharTable {
            modulus,
            order: 1,
            exps,
        }
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    /// Exponent e with chi(a) = zeta_order^e, or `None` when gcd(a, modulus) > 1.
    pub fn exp(&self, a: i64) -> Option<u64> {
        self.exps[a.rem_euclid(self.modulus as i64) as usize]
    }

    pub fn value(&self, a: i64) -> Option<CycloInt> {
        self.exp(a)
            .map(|e| CycloInt::zeta_pow(self.order, e as i64))
    }

    pub fn is_trivial(&self) -> bool {
        self.order == 1
    }

    /// +1 for even characters, -1 for odd ones.
    pub fn parity(&self) -> i32 {
        match self.exp(-1) {
            Some(0) => 1,
            _ => -1,
        }
    }

    pub fn is_odd(&self) -> bool {
        self.parity() == -1
    }

    pub fn conductor(&self) -> u64 {
        for d in divisors(self.modulus) {
            let ok = (0..self.modulus)
                .filter(|&a| gcd(a, self.modulus) == 1 && a % d == 1 % d)
                .all(|a| self.exps[a as usize] == Some(0));
            if ok {
                return d;
            }
        }
        self.modulus
    }

    pub fn is_primitive(&self) -> bool {
        self.conductor() == self.modulus
    }

    /// The primitive character inducing this one.
    pub fn primitive(&self) -> Self {
        let c = self.conductor();
        let exps = (0..c)
            .map(|b| {
                if gcd(b, c) != 1 {
                    return None;
                }
                let mut a = b;
                while gcd(a, self.modulus) != 1 {
                    a += c;
                }
                self.exps[(a % self.modulus) as usize]
            })
            .collect();
        CharTable {
            modulus: c,
            order: self.order,
            exps,
        }
    }

    /// The character on (Z/n)^* induced from this one, for a multiple n of the modulus.
    pub fn induce(&self, n: u64) -> Self {
        assert_eq!(n % self.modulus, 0);
        let exps = (0..n)
            .map(|a| {
                if gcd(a, n) == 1 {
                    self.exps[(a % self.modulus) as usize]
                } else {
                    None
                }
            })
            .collect();
        CharTable {
            modulus: n,
            order: self.order,
            exps,
        }
    }

    /// Pointwise product, defined modulo the lcm of the moduli.
    pub fn mul(&self, other: &Self) -> Self {
        let n = lcm(self.modulus, other.modulus);
        let o = lcm(self.order, other.order);
        let (s1, s2) = (o / self.order, o / other.order);
        let exps = (0..n)
            .map(|a| {
                if gcd(a, n) != 1 {
                    return None;
                }
                let e1 = self.exps[(a % self.modulus) as usize]?;
                let e2 = other.exps[(a % other.modulus) as usize]?;
                Some((e1 * s1 + e2 * s2) % o)
            })
            .collect();
        Self::normalised(n, o, exps)
    }

    pub fn pow(&self, k: i64) -> Self {
        let o = self.order as i64;
        let exps = self
            .exps
            .iter()
            .map(|e| e.map(|x| ((x as i64 * k).rem_euclid(o)) as u64))
            .collect();
        Self::normalised(self.modulus, self.order, exps)
    }

    pub fn inverse(&self) -> Self {
        self.pow(-1)
    }

    /// Same character seen with values in mu_n for a multiple n of its order.
    pub fn exps_in(&self, n: u64) -> Vec<Option<u64>> {
        assert_eq!(n % self.order, 0);
        let s = n / self.order;
        self.exps.iter().map(|e| e.map(|x| x * s)).collect()
    }

    /// Primitive characters are compared after passing to their primitive versions.
    pub fn same_primitive(&self, other: &Self) -> bool {
        self.primitive() == other.primitive()
    }
}
