use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use num::{BigInt, BigRational, Integer, One, Signed, Zero};

use crate::arith::{divisors, gcd, mobius};

/// Data of the cyclotomic field Q(zeta_m): the monic polynomial Phi_m.
#[derive(Debug)]
pub struct Cyclotomic {
    order: u64,
    phi: Vec<BigInt>,
}

fn poly_mul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Quotient of `a` by the monic polynomial `b`; the division must be exact.
fn poly_div_monic(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut rem = a.to_vec();
    let db = b.len() - 1;
    if rem.len() <= db {
        return vec![BigInt::zero()];
    }
    let mut q = vec![BigInt::zero(); rem.len() - db];
    for i in (db..rem.len()).rev() {
        let c = rem[i].clone();
        if c.is_zero() {
            continue;
        }
        q[i - db] = c.clone();
        for (j, bj) in b.iter().enumerate() {
            rem[i - db + j] -= &c * bj;
        }
    }
    debug_assert!(rem.iter().all(|x| x.is_zero()));
    q
}

fn x_pow_minus_one(d: u64) -> Vec<BigInt> {
    let mut v = vec![BigInt::zero(); d as usize + 1];
    v[0] = BigInt::from(-1);
    v[d as usize] = BigInt::one();
    v
}

/// Coefficients of Phi_m, lowest degree first.
pub fn cyclotomic_poly(m: u64) -> Vec<BigInt> {
    let mut num = vec![BigInt::one()];
    let mut den = vec![BigInt::one()];
    for d in divisors(m) {
        match mobius(m / d) {
            1 => num = poly_mul(&num, &x_pow_minus_one(d)),
            -1 => den = poly_mul(&den, &x_pow_minus_one(d)),
            _ => {}
        }
    }
    poly_div_monic(&num, &den)
}

impl Cyclotomic {
    pub fn get(m: u64) -> Arc<Cyclotomic> {
        static CACHE: OnceLock<Mutex<HashMap<u64, Arc<Cyclotomic>>>> = OnceLock::new();
        assert!(m >= 1, "cyclotomic order must be positive");
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = cache.lock().unwrap();
        guard
            .entry(m)
            .or_insert_with(|| {
                Arc::new(Cyclotomic {
                    order: m,
                    phi: cyclotomic_poly(m),
                })
            })
            .clone()
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn degree(&self) -> usize {
        self.phi.len() - 1
    }

    fn reduce(&self, mut v: Vec<BigInt>) -> Vec<BigInt> {
        let d = self.degree();
        if v.len() > d {
            for i in (d..v.len()).rev() {
                let c = std::mem::take(&mut v[i]);
                if c.is_zero() {
                    continue;
                }
                for j in 0..d {
                    v[i - d + j] -= &c * &self.phi[j];
                }
            }
        }
        v.resize(d, BigInt::zero());
        v
    }
}

/// An element of Z[zeta_m], stored in the power basis modulo Phi_m.
#[derive(Clone)]
pub struct CycloInt {
    field: Arc<Cyclotomic>,
    coeffs: Vec<BigInt>,
}

impl PartialEq for CycloInt {
    fn eq(&self, other: &Self) -> bool {
        self.field.order == other.field.order && self.coeffs == other.coeffs
    }
}

impl Eq for CycloInt {}

impl fmt::Debug for CycloInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for CycloInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = self.field.order;
        let mut terms = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            terms.push(match i {
                0 => format!("{}", c),
                1 => format!("{}*z{}", c, m),
                _ => format!("{}*z{}^{}", c, m, i),
            });
        }
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

impl CycloInt {
    pub fn from_coeffs(order: u64, coeffs: Vec<BigInt>) -> Self {
        let field = Cyclotomic::get(order);
        let coeffs = field.reduce(coeffs);
        CycloInt { field, coeffs }
    }

    pub fn from_int(order: u64, n: impl Into<BigInt>) -> Self {
        Self::from_coeffs(order, vec![n.into()])
    }

    pub fn zero(order: u64) -> Self {
        Self::from_int(order, 0)
    }

    pub fn one(order: u64) -> Self {
        Self::from_int(order, 1)
    }

    /// zeta_m^e for any integer e.
    pub fn zeta_pow(order: u64, e: i64) -> Self {
        let e = e.rem_euclid(order as i64) as usize;
        let mut v = vec![BigInt::zero(); e + 1];
        v[e] = BigInt::one();
        Self::from_coeffs(order, v)
    }

    pub fn order(&self) -> u64 {
        self.field.order
    }

    pub fn degree(&self) -> usize {
        self.field.degree()
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// The rational integer this element equals, if it lies in Z.
    pub fn as_integer(&self) -> Option<BigInt> {
        if self.coeffs.iter().skip(1).all(|c| c.is_zero()) {
            Some(self.coeffs[0].clone())
        } else {
            None
        }
    }

    pub fn content(&self) -> BigInt {
        self.coeffs
            .iter()
            .fold(BigInt::zero(), |acc, c| acc.gcd(c))
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        CycloInt {
            field: self.field.clone(),
            coeffs: self.coeffs.iter().map(|c| c * k).collect(),
        }
    }

    /// Divides every coefficient by `k`, which must divide the content.
    pub fn div_scalar(&self, k: &BigInt) -> Option<Self> {
        let mut out = Vec::with_capacity(self.coeffs.len());
        for c in &self.coeffs {
            let (q, r) = c.div_rem(k);
            if !r.is_zero() {
                return None;
            }
            out.push(q);
        }
        Some(CycloInt {
            field: self.field.clone(),
            coeffs: out,
        })
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut acc = Self::one(self.order());
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// The automorphism zeta -> zeta^a, gcd(a, m) = 1.
    pub fn galois(&self, a: u64) -> Self {
        let m = self.order();
        assert!(gcd(a % m, m) == 1, "galois exponent must be a unit");
        let mut v = vec![BigInt::zero(); m as usize];
        for (i, c) in self.coeffs.iter().enumerate() {
            let j = (i as u64 * a % m) as usize;
            v[j] += c;
        }
        Self::from_coeffs(m, v)
    }

    /// Image in Z[zeta_n] for a multiple n of the order.
    pub fn lift(&self, n: u64) -> Self {
        let m = self.order();
        assert_eq!(n % m, 0, "lift target must be a multiple of the order");
        let s = (n / m) as usize;
        let mut v = vec![BigInt::zero(); s * self.coeffs.len().max(1)];
        for (i, c) in self.coeffs.iter().enumerate() {
            v[i * s] += c;
        }
        Self::from_coeffs(n, v)
    }

    /// Writes the element in Z[zeta_m] for a divisor m of the order, if it lies there.
    pub fn descend(&self, m: u64) -> Option<Self> {
        let n = self.order();
        if n % m != 0 {
            return None;
        }
        if n == m {
            return Some(self.clone());
        }
        let small = Cyclotomic::get(m).degree();
        let big = self.degree();
        let cols: Vec<Vec<BigInt>> = (0..small)
            .map(|j| CycloInt::zeta_pow(m, j as i64).lift(n).coeffs)
            .collect();
        // Solve sum_j z_j * cols[j] = self over Q.
        let mut rows: Vec<Vec<BigRational>> = (0..big)
            .map(|i| {
                let mut r: Vec<BigRational> = cols
                    .iter()
                    .map(|c| BigRational::from_integer(c[i].clone()))
                    .collect();
                r.push(BigRational::from_integer(self.coeffs[i].clone()));
                r
            })
            .collect();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..small {
            let Some(pr) = (row..big).find(|&r| !rows[r][col].is_zero()) else {
                continue;
            };
            rows.swap(row, pr);
            let inv = rows[row][col].recip();
            for x in rows[row].iter_mut() {
                *x = &*x * &inv;
            }
            for r in 0..big {
                if r != row && !rows[r][col].is_zero() {
                    let factor = rows[r][col].clone();
                    for c in col..=small {
                        let delta = &factor * &rows[row][c];
                        rows[r][c] -= delta;
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        if rows[row..].iter().any(|r| !r[small].is_zero()) {
            return None;
        }
        let mut z = vec![BigInt::zero(); small];
        for (r, &col) in pivots.iter().enumerate() {
            let v = &rows[r][small];
            if !v.is_integer() {
                return None;
            }
            z[col] = v.to_integer();
        }
        Some(Self::from_coeffs(m, z))
    }

    /// Norm from Q(zeta_n) down to Q(zeta_m), n the order and m | n.
    pub fn norm_to(&self, m: u64) -> Self {
        let n = self.order();
        assert_eq!(n % m, 0, "norm target must divide the order");
        let mut acc = CycloInt::one(n);
        for a in 1..=n {
            if gcd(a, n) == 1 && (a - 1) % m == 0 {
                acc = &acc * &self.galois(a);
            }
        }
        acc.descend(m).expect("norm lies in the subfield")
    }

    /// Absolute norm to Q.
    pub fn norm(&self) -> BigInt {
        self.norm_to(1).coeffs[0].clone()
    }

    /// Exact quotient in Z[zeta_m], if it exists.
    pub fn div_exact(&self, other: &Self) -> Option<Self> {
        assert_eq!(self.order(), other.order());
        if other.is_zero() {
            return None;
        }
        let n = self.order();
        let mut cofactor = CycloInt::one(n);
        for a in 2..n {
            if gcd(a, n) == 1 {
                cofactor = &cofactor * &other.galois(a);
            }
        }
        let norm = (&cofactor * other).as_integer().expect("norm is rational");
        (self * &cofactor).div_scalar(&norm)
    }

    /// Complex value under zeta -> exp(2 pi i k / m).
    pub fn to_complex(&self, k: u64) -> (f64, f64) {
        let m = self.order() as f64;
        let mut re = 0.0;
        let mut im = 0.0;
        for (i, c) in self.coeffs.iter().enumerate() {
            let c: f64 = c.to_string().parse().unwrap();
            let ang = 2.0 * std::f64::consts::PI * (k as f64) * (i as f64) / m;
            re += c * ang.cos();
            im += c * ang.sin();
        }
        (re, im)
    }
}

impl<'a> Add<&'a CycloInt> for &'a CycloInt {
    type Output = CycloInt;
    fn add(self, rhs: &CycloInt) -> CycloInt {
        assert_eq!(self.order(), rhs.order(), "cyclotomic order mismatch");
        CycloInt {
            field: self.field.clone(),
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl<'a> Sub<&'a CycloInt> for &'a CycloInt {
    type Output = CycloInt;
    fn sub(self, rhs: &CycloInt) -> CycloInt {
        assert_eq!(self.order(), rhs.order(), "cyclotomic order mismatch");
        CycloInt {
            field: self.field.clone(),
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl<'a> Mul<&'a CycloInt> for &'a CycloInt {
    type Output = CycloInt;
    fn mul(self, rhs: &CycloInt) -> CycloInt {
        assert_eq!(self.order(), rhs.order(), "cyclotomic order mismatch");
        let v = poly_mul(&self.coeffs, &rhs.coeffs);
        CycloInt {
            field: self.field.clone(),
            coeffs: self.field.reduce(v),
        }
    }
}

impl Neg for &CycloInt {
    type Output = CycloInt;
    fn neg(self) -> CycloInt {
        CycloInt {
            field: self.field.clone(),
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

/// An element of Q(zeta_m) as a cyclotomic integer over a positive denominator.
#[derive(Clone, PartialEq, Eq)]
pub struct CycloRat {
    num: CycloInt,
    den: BigInt,
}

impl fmt::Debug for CycloRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for CycloRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/{}", self.num, self.den)
        }
    }
}

impl CycloRat {
    pub fn new(num: CycloInt, den: BigInt) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        let (mut num, mut den) = if den.is_negative() {
            (-&num, -den)
        } else {
            (num, den)
        };
        let g = num.content().gcd(&den);
        if !g.is_zero() && !g.is_one() {
            num = num.div_scalar(&g).unwrap();
            den /= g;
        }
        if num.is_zero() {
            den = BigInt::one();
        }
        CycloRat { num, den }
    }

    pub fn from_rational(order: u64, r: &BigRational) -> Self {
        Self::new(CycloInt::from_int(order, r.numer().clone()), r.denom().clone())
    }

    pub fn from_int(x: CycloInt) -> Self {
        CycloRat {
            num: x,
            den: BigInt::one(),
        }
    }

    pub fn numer(&self) -> &CycloInt {
        &self.num
    }

    pub fn denom(&self) -> &BigInt {
        &self.den
    }

    pub fn order(&self) -> u64 {
        self.num.order()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn as_rational(&self) -> Option<BigRational> {
        self.num
            .as_integer()
            .map(|n| BigRational::new(n, self.den.clone()))
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        Self::new(self.num.scale(r.numer()), &self.den * r.denom())
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::new(
            &self.num.scale(&other.den) + &other.num.scale(&self.den),
            &self.den * &other.den,
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self::new(
            &self.num.scale(&other.den) - &other.num.scale(&self.den),
            &self.den * &other.den,
        )
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self::new(&self.num * &other.num, &self.den * &other.den)
    }

    pub fn lift(&self, n: u64) -> Self {
        CycloRat {
            num: self.num.lift(n),
            den: self.den.clone(),
        }
    }

    pub fn galois(&self, a: u64) -> Self {
        CycloRat {
            num: self.num.galois(a),
            den: self.den.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn cyclotomic_polynomials() {
        assert_eq!(cyclotomic_poly(1), ints(&[-1, 1]));
        assert_eq!(cyclotomic_poly(4), ints(&[1, 0, 1]));
        assert_eq!(cyclotomic_poly(12), ints(&[1, 0, -1, 0, 1]));
        let p105 = cyclotomic_poly(105);
        assert_eq!(p105.len(), 49);
        assert!(p105.iter().any(|c| *c == BigInt::from(-2)));
    }

    #[test]
    fn zeta_arithmetic() {
        let z = CycloInt::zeta_pow(12, 1);
        assert_eq!(z.pow(12), CycloInt::one(12));
        assert_eq!(z.pow(6), CycloInt::from_int(12, -1));
        assert_eq!(CycloInt::zeta_pow(12, 3), CycloInt::zeta_pow(4, 1).lift(12));
        assert_eq!(
            CycloInt::zeta_pow(12, 3).descend(4),
            Some(CycloInt::zeta_pow(4, 1))
        );
        assert_eq!(CycloInt::zeta_pow(12, 1).descend(4), None);
    }

    #[test]
    fn norms() {
        // N_{Q(zeta_5)/Q}(1 - zeta_5) = 5
        let x = &CycloInt::one(5) - &CycloInt::zeta_pow(5, 1);
        assert_eq!(x.norm(), BigInt::from(5));
        // 1 - zeta_12 has norm 1 down to Q and is a unit
        let y = &CycloInt::one(12) - &CycloInt::zeta_pow(12, 1);
        assert_eq!(y.norm(), BigInt::from(1));
        // 1 + zeta_4 divides 2
        let two = CycloInt::from_int(4, 2);
        let w = &CycloInt::one(4) + &CycloInt::zeta_pow(4, 1);
        let q = two.div_exact(&w).unwrap();
        assert_eq!(&q * &w, two);
        assert!(CycloInt::one(4).div_exact(&w).is_none());
    }

    #[test]
    fn rationals_normalise() {
        let a = CycloRat::new(CycloInt::from_int(3, 4), BigInt::from(-6));
        assert_eq!(a.as_rational(), Some(BigRational::new(BigInt::from(-2), BigInt::from(3))));
    }
}
