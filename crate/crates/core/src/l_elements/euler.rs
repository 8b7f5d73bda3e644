use std::collections::BTreeMap;
use std::sync::Arc;

use crate::arith::{gcd, is_prime, mult_order};
use crate::characters::{eval_galois_at_level, DirichletChar, GaloisChar};
use crate::error::{Error, Result};
use crate::group_ring::{beta, beta_level, LevelGroup, PadicElem};
use crate::padic::{CoeffRing, PadicApprox};
use crate::series::PowerSeries;

/// E_l = 1 - psi(F_l) g_l with psi = rho^{-1} kappa, at each requested level of
/// the tower with modulus f p^k. A ramified rho gives the constant 1.
#[derive(Clone, Debug)]
pub struct EulerFactor {
    pub l: u64,
    pub f: u64,
    pub p: u64,
    pub psi: GaloisChar,
    pub ramified: bool,
    levels: BTreeMap<u32, PadicElem>,
}

pub fn euler_factor(
    l: u64,
    rho: &GaloisChar,
    f: u64,
    levels: &[u32],
    ring: &Arc<CoeffRing>,
) -> Result<EulerFactor> {
    let p = ring.p();
    if !is_prime(l) || l == p {
        return Err(Error::invalid(format!("Euler factor needs a prime l != p, got {}", l)));
    }
    let ramified = rho.finite.conductor() % l == 0;
    if !ramified && f % l == 0 {
        return Err(Error::invalid(format!(
            "l={} divides the tame modulus {} but rho is unramified there",
            l, f
        )));
    }
    let psi = rho.inverse().mul(&GaloisChar::new(1, DirichletChar::trivial()));
    let mut out = EulerFactor {
        l,
        f,
        p,
        psi,
        ramified,
        levels: BTreeMap::new(),
    };
    for &k in levels {
        let e = out.build(k, ring)?;
        out.levels.insert(k, e);
    }
    Ok(out)
}

impl EulerFactor {
    fn build(&self, k: u32, ring: &Arc<CoeffRing>) -> Result<PadicElem> {
        let group = LevelGroup::new(self.f, self.p, k)?;
        let one = PadicElem::one(&group, &PadicApprox::zero(ring));
        if self.ramified {
            return Ok(one);
        }
        let m = group.modulus();
        let c = eval_galois_at_level(&self.psi, self.l % m, k, ring)?;
        let g = PadicElem::padic_basis(&group, self.l as i64, ring)?;
        one.sub(&g.scale(&c))
    }

    pub fn level(&self, k: u32) -> Option<&PadicElem> {
        self.levels.get(&k)
    }

    pub fn levels(&self) -> impl Iterator<Item = (&u32, &PadicElem)> {
        self.levels.iter()
    }

    /// Whether the image of E_l in K[(Z/f p^k)^*] (K a field containing the values)
    /// is a zero divisor. The coefficient psi(F_l) = l^{-r} chi(l) is taken exactly:
    /// for r != 0 it has archimedean size l^{-r} and is never a root of unity, so
    /// every component 1 - psi(F_l) theta(l) is nonzero. For r = 0 some component
    /// vanishes iff the order of chi(l) divides the order of l in the group.
    pub fn is_zero_divisor(&self, k: u32) -> bool {
        if self.ramified || self.psi.kappa != 0 {
            return false;
        }
        let m = self.f * self.p.pow(k);
        debug_assert_eq!(gcd(self.l, m), 1);
        let chi = &self.psi.finite;
        let e = chi.exp(self.l as i64).expect("l is prime to the conductor");
        let d = chi.order() / gcd(e, chi.order());
        mult_order(self.l % m, m) % d == 0
    }

    /// beta_theta(E_l) modulo (p^M, T^n), using a level high enough for the truncation.
    pub fn series(&self, theta: &DirichletChar, ring: &Arc<CoeffRing>, n: usize) -> Result<PowerSeries> {
        if self.ramified {
            return Ok(PowerSeries::one(ring, n));
        }
        let k = beta_level(self.p, ring.prec(), n);
        let e = match self.levels.get(&k) {
            Some(e) if e.ring().compatible(ring) => e.clone(),
            _ => self.build(k, ring)?,
        };
        beta(&e, theta, n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characters::{all_characters, kronecker};
    use crate::exact::CycloInt;

    #[test]
    fn kappa_at_two() {
        let ring = CoeffRing::new(5, 2, 1).unwrap();
        let e = euler_factor(2, &GaloisChar::finite(DirichletChar::trivial()), 1, &[2], &ring).unwrap();
        let x = e.level(2).unwrap();
        assert_eq!(x.coeff(1).unwrap().as_scalar(), Some(1));
        assert_eq!(x.coeff(2).unwrap().as_scalar(), Some(25 - 13));
        assert!(!e.is_zero_divisor(2));
    }

    #[test]
    fn ramified_is_one() {
        let ring = CoeffRing::new(3, 3, 4).unwrap();
        let rho = GaloisChar::finite(kronecker(-4).unwrap());
        let e = euler_factor(2, &rho, 4, &[1, 2], &ring).unwrap();
        let g = e.level(2).unwrap();
        assert_eq!(g, &PadicElem::one(g.group(), &PadicApprox::zero(&ring)));
    }

    #[test]
    fn projection_compatible() {
        let ring = CoeffRing::new(3, 4, 4).unwrap();
        let rho = GaloisChar::new(2, kronecker(-4).unwrap());
        let e = euler_factor(7, &rho, 1, &[2, 3], &ring).unwrap();
        let top = e.level(3).unwrap().project(2).unwrap();
        let low = e.level(2).unwrap();
        // the twist at level k is only known mod p^k
        let top2 = top.map(|c| c.with_prec(2));
        let low2 = low.map(|c| c.with_prec(2));
        assert_eq!(top2, low2);
    }

    // brute force: some character theta of (Z/fp^k)^* kills 1 - chi(l) g_l
    fn brute_zero_divisor(chi: &DirichletChar, l: u64, f: u64, p: u64, k: u32) -> bool {
        let m = f * p.pow(k);
        let cl = chi.value(l as i64).unwrap();
        all_characters(m).iter().any(|theta| {
            let t = theta.value(l as i64).unwrap();
            let n = crate::arith::lcm(cl.order(), t.order());
            let prod = &cl.lift(n) * &t.lift(n);
            (&prod - &CycloInt::one(n)).is_zero()
        })
    }

    #[test]
    fn zero_divisor_status_matches_brute_force() {
        let p = 3;
        for chi in all_characters(5).into_iter().chain(all_characters(7)).filter(|c| c.values_unramified(3)) {
            let ring = CoeffRing::new(p, 2, chi.order()).unwrap();
            let rho = GaloisChar::new(1, chi.inverse());
            for l in [2u64, 11, 13] {
                if chi.modulus() % l == 0 {
                    continue;
                }
                for k in 1..=2 {
                    let e = euler_factor(l, &rho, 1, &[k], &ring).unwrap();
                    assert_eq!(e.psi.kappa, 0);
                    assert_eq!(e.is_zero_divisor(k), brute_zero_divisor(&chi, l, 1, p, k), "{} l={} k={}", chi.label(), l, k);
                }
            }
        }
    }
}
