use num::{BigInt, BigRational, Integer, One, Zero};

use crate::error::{Error, Result};
use crate::exact::chartable::CharTable;
use crate::exact::cyclo::{CycloInt, CycloRat};

fn binomials(n: usize) -> Vec<BigInt> {
    let mut row = vec![BigInt::one()];
    for k in 0..n {
        let next = &row[k] * BigInt::from(n - k) / BigInt::from(k + 1);
        row.push(next);
    }
    row
}

/// B_0, ..., B_n with the convention B_1 = -1/2.
pub fn bernoulli_numbers(n: usize) -> Vec<BigRational> {
    let mut b: Vec<BigRational> = Vec::with_capacity(n + 1);
    b.push(BigRational::one());
    for m in 1..=n {
        let c = binomials(m + 1);
        let mut s = BigRational::zero();
        for (j, bj) in b.iter().enumerate() {
            s += bj * BigRational::from_integer(c[j].clone());
        }
        b.push(-s / BigRational::from_integer(BigInt::from(m + 1)));
    }
    b
}

pub fn bernoulli(n: usize) -> BigRational {
    bernoulli_numbers(n).pop().unwrap()
}

/// B_k(x) from the table `b` of Bernoulli numbers (length > k).
pub fn bernoulli_poly(k: usize, x: &BigRational, b: &[BigRational]) -> BigRational {
    let c = binomials(k);
    let mut acc = BigRational::zero();
    let mut xp = BigRational::one();
    for j in (0..=k).rev() {
        acc += &b[j] * BigRational::from_integer(c[j].clone()) * &xp;
        xp *= x;
    }
    acc
}

/// B_{k,chi} = f^{k-1} sum_{a=1}^{f} chi(a) B_k(a/f) for a primitive chi of conductor f.
///
/// For the trivial character of conductor 1 this gives B_1(1) = +1/2 at k = 1.
pub fn gen_bernoulli(k: usize, chi: &CharTable) -> Result<CycloRat> {
    if k == 0 {
        return Err(Error::invalid("generalized Bernoulli numbers need k >= 1"));
    }
    if !chi.is_primitive() {
        return Err(Error::NotPrimitive {
            modulus: chi.modulus(),
            conductor: chi.conductor(),
        });
    }
    let f = chi.modulus();
    let d = chi.order();
    let b = bernoulli_numbers(k);
    let mut acc = vec![BigRational::zero(); d as usize];
    let fr = BigInt::from(f);
    for a in 1..=f {
        if let Some(e) = chi.exp(a as i64) {
            let x = BigRational::new(BigInt::from(a), fr.clone());
            acc[e as usize] += bernoulli_poly(k, &x, &b);
        }
    }
    let scale = BigRational::from_integer(num::pow(fr, k - 1));
    let den = acc
        .iter()
        .fold(BigInt::one(), |l, r| l.lcm(r.denom()));
    let coeffs: Vec<BigInt> = acc
        .iter()
        .map(|r| (r * BigRational::from_integer(den.clone())).to_integer())
        .collect();
    let num = CycloInt::from_coeffs(d, coeffs);
    Ok(CycloRat::new(num, den).scale(&scale))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn classical_values() {
        let b = bernoulli_numbers(12);
        assert_eq!(b[1], q(-1, 2));
        assert_eq!(b[2], q(1, 6));
        assert_eq!(b[3], q(0, 1));
        assert_eq!(b[12], q(-691, 2730));
    }

    #[test]
    fn generalized_values() {
        let chi4 = CharTable::new(4, 2, vec![None, Some(0), None, Some(1)]).unwrap();
        assert_eq!(
            gen_bernoulli(1, &chi4).unwrap().as_rational(),
            Some(q(-1, 2))
        );
        let triv = CharTable::trivial(1);
        assert_eq!(gen_bernoulli(1, &triv).unwrap().as_rational(), Some(q(1, 2)));
        assert_eq!(gen_bernoulli(2, &triv).unwrap().as_rational(), Some(q(1, 6)));
        assert!(gen_bernoulli(1, &chi4.induce(8)).is_err());
    }
}
