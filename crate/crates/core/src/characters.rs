//! Dirichlet characters, the Teichmueller character and Galois characters kappa^r * chi.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::arith::{crt, euler_phi, factorize, gcd, inv_mod, lcm, pow_mod, primitive_root};
use crate::error::{Error, Result};
use crate::exact::{CharTable, CycloInt};
use crate::padic::{embed_cyclo, CoeffRing, PadicApprox};

/// A root of unity zeta_d^e.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootOfUnity {
    pub e: u64,
    pub d: u64,
}

impl RootOfUnity {
    pub fn new(e: i64, d: u64) -> Self {
        RootOfUnity {
            e: e.rem_euclid(d as i64) as u64,
            d,
        }
    }
}

impl std::str::FromStr for RootOfUnity {
    type Err = Error;
    /// Accepts `1`, `-1`, `i`, `zD` and `zD^E`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "1" => return Ok(RootOfUnity { e: 0, d: 1 }),
            "-1" => return Ok(RootOfUnity { e: 1, d: 2 }),
            "i" => return Ok(RootOfUnity { e: 1, d: 4 }),
            _ => {}
        }
        let bad = || Error::invalid(format!("cannot parse root of unity '{}'", s));
        let rest = s.strip_prefix('z').ok_or_else(bad)?;
        let (d, e) = match rest.split_once('^') {
            Some((d, e)) => (d, e),
            None => (rest, "1"),
        };
        let d: u64 = d.parse().map_err(|_| bad())?;
        let e: i64 = e.parse().map_err(|_| bad())?;
        if d == 0 {
            return Err(bad());
        }
        Ok(RootOfUnity::new(e, d))
    }
}

/// A Dirichlet character with its conductor and parity.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DirichletChar {
    table: CharTable,
    conductor: u64,
    parity: i32,
}

impl DirichletChar {
    pub fn new(table: CharTable) -> Self {
        let conductor = table.conductor();
        let parity = table.parity();
        DirichletChar {
            table,
            conductor,
            parity,
        }
    }

    pub fn trivial() -> Self {
        Self::new(CharTable::trivial(1))
    }

    pub fn table(&self) -> &CharTable {
        &self.table
    }

    pub fn modulus(&self) -> u64 {
        self.table.modulus()
    }

    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    pub fn order(&self) -> u64 {
        self.table.order()
    }

    pub fn parity(&self) -> i32 {
        self.parity
    }

    pub fn is_odd(&self) -> bool {
        self.parity == -1
    }

    pub fn is_trivial(&self) -> bool {
        self.table.is_trivial()
    }

    pub fn is_primitive(&self) -> bool {
        self.conductor == self.modulus()
    }

    pub fn primitive(&self) -> Self {
        Self::new(self.table.primitive())
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self::new(self.table.mul(&other.table))
    }

    pub fn pow(&self, k: i64) -> Self {
        Self::new(self.table.pow(k))
    }

    pub fn inverse(&self) -> Self {
        self.pow(-1)
    }

    pub fn exp(&self, a: i64) -> Option<u64> {
        self.table.exp(a)
    }

    pub fn value(&self, a: i64) -> Option<CycloInt> {
        self.table.value(a)
    }

    /// chi(a) in the coefficient ring, or zero when gcd(a, modulus) > 1.
    pub fn value_in(&self, a: i64, ring: &Arc<CoeffRing>) -> Result<PadicApprox> {
        match self.table.exp(a) {
            None => Ok(PadicApprox::zero(ring)),
            Some(e) => PadicApprox::zeta_pow(ring, self.order(), e as i64),
        }
    }

    /// Conductor divides f p for some f prime to p (a character of the first kind).
    pub fn is_first_kind(&self, p: u64) -> bool {
        self.conductor % (p * p) != 0
    }

    /// Values lie in an unramified extension of Z_p.
    pub fn values_unramified(&self, p: u64) -> bool {
        self.order() % p != 0
    }

    /// Prime-to-p part of the conductor.
    pub fn tame_conductor(&self, p: u64) -> u64 {
        let mut c = self.conductor;
        while c % p == 0 {
            c /= p;
        }
        c
    }

    /// Canonical label listing the values on the standard generators of the modulus.
    pub fn label(&self) -> String {
        let m = self.modulus();
        if self.is_trivial() && m == 1 {
            return "triv".to_string();
        }
        let parts: Vec<String> = unit_generators(m)
            .iter()
            .map(|&(g, _)| {
                let e = self.table.exp(g as i64).unwrap();
                let d = self.order();
                let gg = gcd(e, d);
                let (e, d) = (e / gg.max(1), d / gg.max(1));
                let v = match (e, d) {
                    (0, _) => "1".to_string(),
                    (1, 2) => "-1".to_string(),
                    (1, _) => format!("z{}", d),
                    _ => format!("z{}^{}", d, e),
                };
                format!("{}={}", g, v)
            })
            .collect();
        format!("mod:{}:{}", m, parts.join(","))
    }
}

impl fmt::Display for DirichletChar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label())
    }
}

/// Independent generators of (Z/m)^* with their orders, lifted to residues mod m.
pub fn unit_generators(m: u64) -> Vec<(u64, u64)> {
    let parts = factorize(m);
    let mut out = Vec::new();
    for (i, &(q, e)) in parts.iter().enumerate() {
        let qe = q.pow(e);
        let local: Vec<(u64, u64)> = if q == 2 {
            match e {
                1 => vec![],
                2 => vec![(3, 2)],
                _ => vec![(qe - 1, 2), (5, qe / 4)],
            }
        } else {
            vec![(primitive_root(qe), euler_phi(qe))]
        };
        for (g, n) in local {
            let residues: Vec<(u64, u64)> = parts
                .iter()
                .enumerate()
                .map(|(j, &(q2, e2))| {
                    let m2 = q2.pow(e2);
                    if j == i {
                        (g, m2)
                    } else {
                        (1 % m2, m2)
                    }
                })
                .collect();
            out.push((crt(&residues), n));
        }
    }
    out
}

/// Builds the character with the given values on generators of (Z/m)^*.
pub fn char_from_values(modulus: u64, values: &[(u64, RootOfUnity)]) -> Result<DirichletChar> {
    if modulus == 0 {
        return Err(Error::invalid("modulus must be positive"));
    }
    let order = values.iter().fold(1, |l, (_, v)| lcm(l, v.d));
    let mut exps: Vec<Option<u64>> = vec![None; modulus as usize];
    exps[(1 % modulus) as usize] = Some(0);
    let mut frontier = vec![1 % modulus];
    for &(g, _) in values {
        if gcd(g % modulus, modulus) != 1 {
            return Err(Error::invalid(format!("generator {} is not a unit mod {}", g, modulus)));
        }
    }
    while let Some(a) = frontier.pop() {
        let ea = exps[a as usize].unwrap();
        for &(g, v) in values {
            let b = a * (g % modulus) % modulus;
            let eb = (ea + v.e * (order / v.d)) % order;
            match exps[b as usize] {
                None => {
                    exps[b as usize] = Some(eb);
                    frontier.push(b);
                }
                Some(x) if x != eb => {
                    return Err(Error::invalid(format!(
                        "values are inconsistent: two values at residue {}",
                        b
                    )))
                }
                _ => {}
            }
        }
    }
    for a in 0..modulus {
        if gcd(a, modulus) == 1 && exps[a as usize].is_none() {
            return Err(Error::invalid(format!(
                "given residues do not generate (Z/{})^*",
                modulus
            )));
        }
    }
    Ok(DirichletChar::new(CharTable::new(modulus, order, exps)?))
}

/// Every character modulo m.
pub fn all_characters(m: u64) -> Vec<DirichletChar> {
    let gens = unit_generators(m);
    let order = gens.iter().fold(1, |l, &(_, n)| lcm(l, n));
    // discrete log vectors of every unit
    let mut logs: Vec<Option<Vec<u64>>> = vec![None; m as usize];
    let mut elems = vec![(1 % m, vec![0u64; gens.len()])];
    for (i, &(g, n)) in gens.iter().enumerate() {
        let mut next = Vec::with_capacity(elems.len() * n as usize);
        for (a, v) in &elems {
            let mut x = *a;
            for k in 0..n {
                let mut w = v.clone();
                w[i] = k;
                next.push((x, w));
                x = x * g % m;
            }
        }
        elems = next;
    }
    for (a, v) in elems {
        logs[a as usize] = Some(v);
    }
    let mut choices: Vec<Vec<u64>> = vec![vec![]];
    for &(_, n) in &gens {
        choices = choices
            .into_iter()
            .flat_map(|c| {
                (0..n).map(move |k| {
                    let mut c = c.clone();
                    c.push(k);
                    c
                })
            })
            .collect();
    }
    choices
        .into_iter()
        .map(|c| {
            let exps = logs
                .iter()
                .map(|l| {
                    l.as_ref().map(|v| {
                        v.iter()
                            .zip(&c)
                            .zip(&gens)
                            .map(|((x, a), (_, n))| x * a % n * (order / n))
                            .sum::<u64>()
                            % order
                    })
                })
                .collect();
            DirichletChar::new(CharTable::new(m, order, exps).expect("valid character"))
        })
        .collect()
}

/// Primitive characters of conductor exactly m.
pub fn primitive_characters(m: u64) -> Vec<DirichletChar> {
    all_characters(m)
        .into_iter()
        .filter(|c| c.is_primitive())
        .collect()
}

fn jacobi(mut a: i64, mut n: u64) -> i32 {
    a = a.rem_euclid(n as i64);
    let mut a = a as u64;
    let mut s = 1;
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            if n % 8 == 3 || n % 8 == 5 {
                s = -s;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            s = -s;
        }
        a %= n;
    }
    if n == 1 {
        s
    } else {
        0
    }
}

fn kronecker_symbol(d: i64, mut n: u64) -> i32 {
    let mut s = 1;
    while n % 2 == 0 {
        if d % 2 == 0 {
            return 0;
        }
        if matches!(d.rem_euclid(8), 3 | 5) {
            s = -s;
        }
        n /= 2;
    }
    s * jacobi(d, n)
}

/// The primitive character attached to the Kronecker symbol (d / .), d = 0, 1 mod 4.
pub fn kronecker(d: i64) -> Result<DirichletChar> {
    if !matches!(d.rem_euclid(4), 0 | 1) || d == 0 {
        return Err(Error::invalid(format!("{} is not a discriminant", d)));
    }
    let m = d.unsigned_abs();
    let exps = (0..m)
        .map(|a| {
            if gcd(a, m) != 1 {
                None
            } else {
                Some(if kronecker_symbol(d, a) == 1 { 0 } else { 1 })
            }
        })
        .collect();
    Ok(DirichletChar::new(CharTable::new(m, 2, exps)?).primitive())
}

/// The Teichmueller character omega mod p, relative to the ring's zeta_{p-1}.
pub fn teichmuller_char(p: u64, ring: &Arc<CoeffRing>) -> DirichletChar {
    assert_eq!(ring.p(), p);
    let exps = (0..p).map(|a| ring.residue_log(a)).collect();
    DirichletChar::new(CharTable::new(p, p - 1, exps).expect("omega is a character"))
}

/// A character of G_Q of the form kappa^r * chi, chi a Dirichlet character.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GaloisChar {
    pub kappa: i64,
    pub finite: DirichletChar,
}

impl GaloisChar {
    pub fn new(kappa: i64, finite: DirichletChar) -> Self {
        GaloisChar { kappa, finite }
    }

    pub fn finite(chi: DirichletChar) -> Self {
        GaloisChar { kappa: 0, finite: chi }
    }

    pub fn inverse(&self) -> Self {
        GaloisChar {
            kappa: -self.kappa,
            finite: self.finite.inverse(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        GaloisChar {
            kappa: self.kappa + other.kappa,
            finite: self.finite.mul(&other.finite),
        }
    }

    /// kappa^r chi is odd when chi(-1) (-1)^r = -1, kappa being odd.
    pub fn is_odd(&self) -> bool {
        let s = if self.kappa.rem_euclid(2) == 1 { -1 } else { 1 };
        s * self.finite.parity() == -1
    }

    /// Unramified outside p and the conductor of chi.
    pub fn ramified_at(&self, l: u64, p: u64) -> bool {
        l == p || self.finite.conductor() % l == 0
    }

    pub fn label(&self) -> String {
        match (self.kappa, self.finite.is_trivial()) {
            (0, _) => self.finite.label(),
            (r, true) => format!("kappa^{}", r),
            (r, false) => format!("kappa^{}*{}", r, self.finite.label()),
        }
    }
}

/// rho(F_l) = l^{-r} chi(l) for the geometric Frobenius at l != p.
pub fn eval_galois(rho: &GaloisChar, l: u64, ring: &Arc<CoeffRing>) -> Result<PadicApprox> {
    let p = ring.p();
    if l % p == 0 {
        return Err(Error::invalid(format!("Frobenius at {} is not defined: {} = p", l, l)));
    }
    if gcd(l, rho.finite.modulus()) != 1 {
        return Err(Error::invalid(format!("{} is ramified for {}", l, rho.label())));
    }
    let chi = rho.finite.value_in(l as i64, ring)?;
    let lp = PadicApprox::from_i64(ring, l as i64);
    let k = if rho.kappa >= 0 {
        lp.pow(rho.kappa as u64).inv()?
    } else {
        lp.pow(rho.kappa.unsigned_abs())
    };
    Ok(k.mul(&chi))
}

/// rho(F_a) for a residue a mod f p^k; the kappa part is only known mod p^k.
pub fn eval_galois_at_level(
    rho: &GaloisChar,
    a: u64,
    level: u32,
    ring: &Arc<CoeffRing>,
) -> Result<PadicApprox> {
    let p = ring.p();
    let chi = rho.finite.value_in(a as i64, ring)?;
    if rho.kappa == 0 {
        return Ok(chi);
    }
    let pk = p.pow(level.min(ring.prec()));
    let inv = inv_mod(a % pk, pk).ok_or_else(|| Error::invalid("residue is not a unit"))?;
    let e = rho.kappa.unsigned_abs();
    let v = if rho.kappa > 0 {
        pow_mod(inv, e, pk)
    } else {
        pow_mod(a % pk, e, pk)
    };
    Ok(PadicApprox::from_i64(ring, v as i64)
        .with_prec(level)
        .mul(&chi))
}

/// Embeds a character value given as a cyclotomic integer (used by tests and reports).
pub fn embed_value(x: &CycloInt, ring: &Arc<CoeffRing>) -> Result<PadicApprox> {
    embed_cyclo(x, ring)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumeration_counts() {
        for m in 1..=40u64 {
            let all = all_characters(m);
            assert_eq!(all.len() as u64, euler_phi(m));
        }
        // primitive characters mod 8: two of them
        assert_eq!(primitive_characters(8).len(), 2);
        assert_eq!(primitive_characters(4).len(), 1);
        assert!(primitive_characters(2).is_empty());
    }

    #[test]
    fn from_values() {
        let chi = char_from_values(4, &[(3, "-1".parse().unwrap())]).unwrap();
        assert!(chi.is_odd());
        assert_eq!(chi.conductor(), 4);
        assert!(char_from_values(8, &[(3, "-1".parse().unwrap())]).is_err());
        assert!(char_from_values(5, &[(4, "-1".parse().unwrap()), (2, "1".parse().unwrap())]).is_err());
    }

    #[test]
    fn kronecker_chars() {
        let chi = kronecker(-4).unwrap();
        assert_eq!(chi.conductor(), 4);
        assert!(chi.is_odd());
        let chi = kronecker(-3).unwrap();
        assert_eq!(chi.exp(2), Some(1));
        assert!(kronecker(3).is_err());
    }

    #[test]
    fn teichmueller_table() {
        let ring = CoeffRing::new(5, 3, 1).unwrap();
        let w = teichmuller_char(5, &ring);
        for a in 1..5i64 {
            let v = w.value_in(a, &ring).unwrap();
            assert_eq!(v, crate::padic::teichmuller(a, &ring).unwrap());
        }
        assert!(w.is_odd());
    }

    #[test]
    fn galois_values() {
        let ring = CoeffRing::new(5, 2, 4).unwrap();
        let kappa = GaloisChar::new(1, DirichletChar::trivial());
        assert_eq!(eval_galois(&kappa, 2, &ring).unwrap().as_scalar(), Some(13));
        let chi4 = kronecker(-4).unwrap();
        let rho = GaloisChar::new(2, chi4);
        assert_eq!(eval_galois(&rho, 3, &ring).unwrap().as_scalar(), Some(11));
        assert!(eval_galois(&rho, 2, &ring).is_err());
    }
}
