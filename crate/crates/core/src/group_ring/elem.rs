use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num::{BigInt, BigRational, One, Signed, Zero};
use serde_json::{json, Value};

use crate::characters::{eval_galois_at_level, GaloisChar};
use crate::error::{Error, Result};
use crate::group_ring::level::LevelGroup;
use crate::padic::{CoeffRing, PadicApprox};

/// Coefficients of a group ring: exact rationals or p-adic approximations.
pub trait Coefficient: Clone + PartialEq + fmt::Display {
    const MODE: &'static str;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn is_zero(&self) -> bool;
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn half(&self) -> Self;
}

impl Coefficient for BigRational {
    const MODE: &'static str = "rational";
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn zero_like(&self) -> Self {
        BigRational::zero()
    }
    fn one_like(&self) -> Self {
        BigRational::one()
    }
    fn half(&self) -> Self {
        self / BigRational::from_integer(BigInt::from(2))
    }
}

impl Coefficient for PadicApprox {
    const MODE: &'static str = "padic";
    fn add(&self, o: &Self) -> Self {
        PadicApprox::add(self, o)
    }
    fn sub(&self, o: &Self) -> Self {
        PadicApprox::sub(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        PadicApprox::mul(self, o)
    }
    fn is_zero(&self) -> bool {
        PadicApprox::is_zero(self)
    }
    fn zero_like(&self) -> Self {
        PadicApprox::zero(self.ring())
    }
    fn one_like(&self) -> Self {
        PadicApprox::one(self.ring())
    }
    fn half(&self) -> Self {
        self.div(&PadicApprox::from_i64(self.ring(), 2))
            .expect("2 is a unit for odd p")
    }
}

/// An element of C[(Z/fp^k)^*] as a dense coefficient vector over the unit list.
#[derive(Clone)]
pub struct GroupRingElem<C> {
    group: Arc<LevelGroup>,
    coeffs: Vec<C>,
}

pub type RatElem = GroupRingElem<BigRational>;
pub type PadicElem = GroupRingElem<PadicApprox>;

impl<C: Coefficient> PartialEq for GroupRingElem<C> {
    fn eq(&self, other: &Self) -> bool {
        *self.group == *other.group && self.coeffs == other.coeffs
    }
}

impl<C: Coefficient> fmt::Debug for GroupRingElem<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .group
            .units()
            .iter()
            .zip(&self.coeffs)
            .filter(|(_, c)| !c.is_zero())
            .map(|(a, c)| format!("({})g{}", c, a))
            .collect();
        write!(
            f,
            "[{} | f={} p={} k={}]",
            terms.join(" + "),
            self.group.f(),
            self.group.p(),
            self.group.k()
        )
    }
}

impl<C: Coefficient> GroupRingElem<C> {
    pub fn from_fn(group: &Arc<LevelGroup>, mut f: impl FnMut(u64) -> C) -> Self {
        GroupRingElem {
            group: group.clone(),
            coeffs: group.units().iter().map(|&a| f(a)).collect(),
        }
    }

    pub fn from_coeffs(group: &Arc<LevelGroup>, coeffs: Vec<C>) -> Self {
        assert_eq!(coeffs.len(), group.order());
        GroupRingElem {
            group: group.clone(),
            coeffs,
        }
    }

    pub fn zero(group: &Arc<LevelGroup>, zero: &C) -> Self {
        Self::from_fn(group, |_| zero.zero_like())
    }

    pub fn one(group: &Arc<LevelGroup>, zero: &C) -> Self {
        Self::basis(group, 1, zero).unwrap()
    }

    /// The group element g_a.
    pub fn basis(group: &Arc<LevelGroup>, a: i64, zero: &C) -> Result<Self> {
        let i = group
            .index_of(a)
            .ok_or_else(|| Error::invalid(format!("{} is not a unit mod {}", a, group.modulus())))?;
        let mut e = Self::zero(group, zero);
        e.coeffs[i] = zero.one_like();
        Ok(e)
    }

    pub fn group(&self) -> &Arc<LevelGroup> {
        &self.group
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    /// Coefficient at g_a.
    pub fn coeff(&self, a: i64) -> Option<&C> {
        self.group.index_of(a).map(|i| &self.coeffs[i])
    }

    fn same_group(&self, o: &Self) -> Result<()> {
        if *self.group != *o.group {
            return Err(Error::Mismatch(format!(
                "group ({}, {}, {}) vs ({}, {}, {})",
                self.group.f(),
                self.group.p(),
                self.group.k(),
                o.group.f(),
                o.group.p(),
                o.group.k()
            )));
        }
        Ok(())
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        self.same_group(o)?;
        Ok(Self::from_coeffs(
            &self.group,
            self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a.add(b)).collect(),
        ))
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.same_group(o)?;
        Ok(Self::from_coeffs(
            &self.group,
            self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a.sub(b)).collect(),
        ))
    }

    pub fn scale(&self, c: &C) -> Self {
        Self::from_coeffs(&self.group, self.coeffs.iter().map(|a| a.mul(c)).collect())
    }

    /// Convolution product.
    pub fn multiply(&self, o: &Self) -> Result<Self> {
        self.same_group(o)?;
        let units = self.group.units();
        let m = self.group.modulus();
        let mut out: Vec<C> = self.coeffs.iter().map(|c| c.zero_like()).collect();
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                let r = (units[i] as u128 * units[j] as u128 % m as u128) as i64;
                let idx = self.group.index_of(r).unwrap();
                out[idx] = out[idx].add(&a.mul(b));
            }
        }
        Ok(Self::from_coeffs(&self.group, out))
    }

    /// Image under (Z/fp^k)^* -> (Z/f'p^k')^* for f' | f and 1 <= k' <= k.
    pub fn project_to(&self, target: &Arc<LevelGroup>) -> Result<Self> {
        if target.p() != self.group.p()
            || self.group.f() % target.f() != 0
            || target.k() > self.group.k()
        {
            return Err(Error::Mismatch("target is not a quotient of the source group".into()));
        }
        let zero = self.coeffs[0].zero_like();
        let mut out: Vec<C> = vec![zero; target.order()];
        for (a, c) in self.group.units().iter().zip(&self.coeffs) {
            let idx = target.index_of(*a as i64).unwrap();
            out[idx] = out[idx].add(c);
        }
        Ok(Self::from_coeffs(target, out))
    }

    /// Projection to level k (same f); k = 0 is rejected.
    pub fn project(&self, k: u32) -> Result<Self> {
        let target = LevelGroup::new(self.group.f(), self.group.p(), k)?;
        self.project_to(&target)
    }

    /// (pr+ x, pr- x) with pr(+/-) = (1 +/- g_{-1}) / 2.
    pub fn plus_minus(&self) -> (Self, Self) {
        let n = self.coeffs.len();
        let mut plus = Vec::with_capacity(n);
        let mut minus = Vec::with_capacity(n);
        for (i, &a) in self.group.units().iter().enumerate() {
            let j = self.group.index_of(-(a as i64)).unwrap();
            plus.push(self.coeffs[i].add(&self.coeffs[j]).half());
            minus.push(self.coeffs[i].sub(&self.coeffs[j]).half());
        }
        (
            Self::from_coeffs(&self.group, plus),
            Self::from_coeffs(&self.group, minus),
        )
    }

    pub fn map<D: Coefficient>(&self, f: impl FnMut(&C) -> D) -> GroupRingElem<D> {
        GroupRingElem {
            group: self.group.clone(),
            coeffs: self.coeffs.iter().map(f).collect(),
        }
    }

    /// JSON object {f, p, k, mode, coeffs: {residue: value}} over the nonzero coefficients.
    pub fn to_json(&self) -> Value {
        let mut coeffs = serde_json::Map::new();
        for (a, c) in self.group.units().iter().zip(&self.coeffs) {
            if !c.is_zero() {
                coeffs.insert(a.to_string(), Value::String(c.to_string()));
            }
        }
        json!({
            "f": self.group.f(),
            "p": self.group.p(),
            "k": self.group.k(),
            "mode": C::MODE,
            "coeffs": coeffs,
        })
    }
}

impl RatElem {
    pub fn rational_zero(group: &Arc<LevelGroup>) -> Self {
        Self::zero(group, &BigRational::zero())
    }

    pub fn rational_basis(group: &Arc<LevelGroup>, a: i64) -> Result<Self> {
        Self::basis(group, a, &BigRational::zero())
    }

    pub fn is_p_integral(&self) -> bool {
        let p = BigInt::from(self.group.p());
        self.coeffs.iter().all(|c| !(c.denom() % &p).is_zero())
    }

    /// Explicit reduction to p-adic coefficients; fails on a non-integral coefficient.
    pub fn reduce(&self, ring: &Arc<CoeffRing>) -> Result<PadicElem> {
        if ring.p() != self.group.p() {
            return Err(Error::Mismatch("ring prime differs from group prime".into()));
        }
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| {
                PadicApprox::from_rational(ring, c).map_err(|_| {
                    Error::NotIntegral(format!("coefficient {} is not {}-integral", c, ring.p()))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(GroupRingElem::from_coeffs(&self.group, coeffs))
    }

    pub fn max_abs_denominator(&self) -> BigInt {
        self.coeffs
            .iter()
            .map(|c| c.denom().abs())
            .max()
            .unwrap_or_else(BigInt::one)
    }
}

impl PadicElem {
    pub fn padic_zero(group: &Arc<LevelGroup>, ring: &Arc<CoeffRing>) -> Self {
        Self::zero(group, &PadicApprox::zero(ring))
    }

    pub fn padic_basis(group: &Arc<LevelGroup>, a: i64, ring: &Arc<CoeffRing>) -> Result<Self> {
        Self::basis(group, a, &PadicApprox::zero(ring))
    }

    pub fn ring(&self) -> &Arc<CoeffRing> {
        self.coeffs[0].ring()
    }

    /// Tw_rho: g_a -> rho(F_a) g_a.
    pub fn twist(&self, rho: &GaloisChar) -> Result<Self> {
        let m = self.group.modulus();
        if m % rho.finite.conductor() != 0 {
            return Err(Error::invalid(format!(
                "{} does not factor through (Z/{})^*",
                rho.label(),
                m
            )));
        }
        let ring = self.ring().clone();
        let chi = rho.finite.primitive();
        let rho = GaloisChar::new(rho.kappa, chi);
        let k = self.group.k();
        let coeffs = self
            .group
            .units()
            .iter()
            .zip(&self.coeffs)
            .map(|(&a, c)| Ok(eval_galois_at_level(&rho, a, k, &ring)?.mul(c)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_coeffs(&self.group, coeffs))
    }
}

/// A compatible system of elements over consecutive levels.
#[derive(Clone, Debug)]
pub struct TowerElem<C: Coefficient> {
    levels: BTreeMap<u32, GroupRingElem<C>>,
}

impl<C: Coefficient> TowerElem<C> {
    pub fn new(elems: Vec<GroupRingElem<C>>) -> Result<Self> {
        let mut levels = BTreeMap::new();
        for e in elems {
            levels.insert(e.group().k(), e);
        }
        let ks: Vec<u32> = levels.keys().copied().collect();
        for w in ks.windows(2) {
            if w[1] != w[0] + 1 {
                return Err(Error::invalid("tower levels must be contiguous"));
            }
            let upper = &levels[&w[1]];
            if upper.project(w[0])? != levels[&w[0]] {
                return Err(Error::Mismatch(format!(
                    "levels {} and {} are not projection-compatible",
                    w[1], w[0]
                )));
            }
        }
        Ok(TowerElem { levels })
    }

    pub fn level(&self, k: u32) -> Option<&GroupRingElem<C>> {
        self.levels.get(&k)
    }

    pub fn levels(&self) -> impl Iterator<Item = (&u32, &GroupRingElem<C>)> {
        self.levels.iter()
    }

    pub fn top(&self) -> &GroupRingElem<C> {
        self.levels.values().next_back().unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn difference_of_squares() {
        let g = LevelGroup::new(1, 5, 1).unwrap();
        let one = RatElem::rational_basis(&g, 1).unwrap();
        let x = RatElem::rational_basis(&g, 2).unwrap();
        let lhs = one.add(&x).unwrap().multiply(&one.sub(&x).unwrap()).unwrap();
        let x2 = RatElem::rational_basis(&g, 4).unwrap();
        assert_eq!(lhs, one.sub(&x2).unwrap());
    }

    #[test]
    fn norm_absorbs_translation() {
        let g = LevelGroup::new(1, 5, 2).unwrap();
        let norm = RatElem::from_fn(&g, |_| q(1, 1));
        let h = RatElem::rational_basis(&g, 7).unwrap();
        assert_eq!(norm.multiply(&h).unwrap(), norm);
    }

    #[test]
    fn twist_by_teichmueller() {
        let ring = CoeffRing::new(5, 2, 1).unwrap();
        let g = LevelGroup::new(1, 5, 2).unwrap();
        let omega = crate::characters::teichmuller_char(5, &ring);
        let x = PadicElem::padic_basis(&g, 2, &ring).unwrap();
        let t = x.twist(&GaloisChar::finite(omega)).unwrap();
        assert_eq!(t.coeff(2).unwrap().as_scalar(), Some(7));
    }
}
