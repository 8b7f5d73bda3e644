use std::sync::Arc;

use num::{BigInt, BigRational};

use crate::arith::inv_mod;
use crate::error::{Error, Result};
use crate::group_ring::{LevelGroup, RatElem, TowerElem};

/// Theta_{fp^k} = sum_a (a/fp^k - 1/2) g_a over 0 < a < fp^k prime to fp.
#[derive(Clone, Debug, PartialEq)]
pub struct StickelbergerElem {
    elem: RatElem,
}

impl StickelbergerElem {
    pub fn elem(&self) -> &RatElem {
        &self.elem
    }

    pub fn into_elem(self) -> RatElem {
        self.elem
    }

    pub fn group(&self) -> &Arc<LevelGroup> {
        self.elem.group()
    }
}

pub fn stickelberger_coeff(a: u64, m: u64) -> BigRational {
    BigRational::new(BigInt::from(2 * a) - BigInt::from(m), BigInt::from(2 * m))
}

pub fn stickelberger(f: u64, p: u64, k: u32) -> Result<StickelbergerElem> {
    let group = LevelGroup::new(f, p, k)?;
    let m = group.modulus();
    Ok(StickelbergerElem {
        elem: RatElem::from_fn(&group, |a| stickelberger_coeff(a, m)),
    })
}

pub fn stickelberger_tower(f: u64, p: u64, lo: u32, hi: u32) -> Result<TowerElem<BigRational>> {
    let elems = (lo..=hi)
        .map(|k| stickelberger(f, p, k).map(|s| s.elem))
        .collect::<Result<Vec<_>>>()?;
    TowerElem::new(elems)
}

/// h Theta with h = 1 - (1+fp) g_{1+fp}; every coefficient must be p-integral.
pub fn smoothed_stickelberger(f: u64, p: u64, k: u32) -> Result<RatElem> {
    let group = LevelGroup::new(f, p, k)?;
    let m = group.modulus();
    let u = group.gamma_generator();
    let uinv = inv_mod(u, m).unwrap();
    let ur = BigRational::from_integer(BigInt::from(1 + f * p));
    let x = RatElem::from_fn(&group, |a| {
        let b = (a as u128 * uinv as u128 % m as u128) as u64;
        stickelberger_coeff(a, m) - &ur * stickelberger_coeff(b, m)
    });
    if !x.is_p_integral() {
        return Err(Error::NotIntegral(format!(
            "smoothed Stickelberger element at f={}, p={}, k={} has p in a denominator",
            f, p, k
        )));
    }
    Ok(x)
}

/// The smoothing element h = 1 - (1+fp) g_{1+fp} in rational mode.
pub fn smoothing_element(f: u64, p: u64, k: u32) -> Result<RatElem> {
    let group = LevelGroup::new(f, p, k)?;
    let one = RatElem::rational_basis(&group, 1)?;
    let g = RatElem::rational_basis(&group, group.gamma_generator() as i64)?;
    one.sub(&g.scale(&BigRational::from_integer(BigInt::from(1 + f * p))))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn level_two_coefficients() {
        let s = stickelberger(1, 3, 2).unwrap();
        let want = [(1, q(-7, 18)), (2, q(-5, 18)), (4, q(-1, 18)), (5, q(1, 18)), (7, q(5, 18)), (8, q(7, 18))];
        for (a, c) in want {
            assert_eq!(s.elem().coeff(a).unwrap(), &c);
        }
        let h = smoothed_stickelberger(1, 3, 2).unwrap();
        let want = [(1, q(-3, 2)), (2, q(-1, 2)), (4, q(3, 2)), (5, q(-3, 2)), (7, q(1, 2)), (8, q(3, 2))];
        for (a, c) in want {
            assert_eq!(h.coeff(a).unwrap(), &c);
        }
    }

    #[test]
    fn smoothing_matches_product() {
        let s = stickelberger(2, 3, 2).unwrap();
        let h = smoothing_element(2, 3, 2).unwrap();
        let prod = h.multiply(s.elem()).unwrap();
        assert_eq!(prod, smoothed_stickelberger(2, 3, 2).unwrap());
    }

    #[test]
    fn projection() {
        let s3 = stickelberger(1, 3, 3).unwrap();
        let s2 = stickelberger(1, 3, 2).unwrap();
        assert_eq!(s3.elem().project(2).unwrap(), *s2.elem());
        assert_eq!(s2.elem().coeff(1).unwrap(), &q(-7, 18));
        assert!(stickelberger(1, 3, 0).is_err());
    }
}
