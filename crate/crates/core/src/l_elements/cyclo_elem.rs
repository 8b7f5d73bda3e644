use serde::Serialize;

use crate::arith::{factorize, gcd, inv_mod};
use crate::error::{Error, Result};
use crate::exact::CycloInt;

/// 1 - xi_n with xi_n = exp(2 pi i / n), so that xi_{ns}^s = xi_n.
#[derive(Clone, Debug, PartialEq)]
pub struct CycloElement {
    pub modulus: u64,
    pub value: CycloInt,
}

impl CycloElement {
    pub fn new(n: u64) -> Result<Self> {
        if n < 2 {
            return Err(Error::invalid(format!("1 - xi_{} is zero or undefined", n)));
        }
        Ok(CycloElement {
            modulus: n,
            value: &CycloInt::one(n) - &CycloInt::zeta_pow(n, 1),
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CycloCheck {
    pub name: String,
    pub lhs: String,
    pub rhs: String,
    pub ok: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct CycloReport {
    pub modulus: u64,
    pub checks: Vec<CycloCheck>,
}

impl CycloReport {
    pub fn ok(&self) -> bool {
        self.checks.iter().all(|c| c.ok)
    }
}

fn check(name: String, lhs: &CycloInt, rhs: &CycloInt) -> CycloCheck {
    CycloCheck {
        name,
        lhs: lhs.to_string(),
        rhs: rhs.to_string(),
        ok: lhs == rhs,
    }
}

/// N_{Q(xi_{ms})/Q(xi_m)}(1 - xi_{ms}) = 1 - xi_m whenever every prime of s divides m.
pub fn tower_norm_check(m: u64, s: u64) -> Result<CycloCheck> {
    if m < 2 || s < 1 || factorize(s).iter().any(|&(q, _)| m % q != 0) {
        return Err(Error::invalid(format!(
            "tower step {} -> {} must only add primes already dividing {}",
            m * s,
            m,
            m
        )));
    }
    let top = CycloElement::new(m * s)?;
    let lhs = top.value.norm_to(m);
    Ok(check(format!("N(1-xi_{}) = 1-xi_{}", m * s, m), &lhs, &CycloElement::new(m)?.value))
}

/// N_{Q(xi_{ml})/Q(xi_m)}(1 - xi_{ml}) = (1 - xi_m)^{1 - sigma_l^{-1}} for a prime l not
/// dividing m, with sigma_l: xi -> xi^l. Checked multiplicatively as
/// N(1 - xi_{ml}) (1 - xi_m^{l'}) = 1 - xi_m, l l' = 1 mod m.
pub fn euler_norm_check(m: u64, l: u64) -> Result<CycloCheck> {
    if m < 2 || gcd(m, l) != 1 {
        return Err(Error::invalid(format!("need m >= 2 prime to l, got m={}, l={}", m, l)));
    }
    let lhs = CycloElement::new(m * l)?.value.norm_to(m);
    let base = CycloElement::new(m)?.value;
    let linv = inv_mod(l % m, m).unwrap_or(0);
    let conj = base.galois(linv);
    let rhs = base.div_exact(&conj).ok_or_else(|| Error::invalid("division by 1 - xi"))?;
    Ok(check(
        format!("N(1-xi_{}) = (1-xi_{})^(1-sigma_{}^-1)", m * l, m, l),
        &lhs,
        &rhs,
    ))
}

/// Same relation with sigma_l^{-1} replaced by sigma_l; used to pin the Frobenius convention.
pub fn euler_norm_check_arithmetic(m: u64, l: u64) -> Result<CycloCheck> {
    if m < 2 || gcd(m, l) != 1 {
        return Err(Error::invalid(format!("need m >= 2 prime to l, got m={}, l={}", m, l)));
    }
    let lhs = CycloElement::new(m * l)?.value.norm_to(m);
    let base = CycloElement::new(m)?.value;
    let rhs = base.div_exact(&base.galois(l % m)).ok_or_else(|| Error::invalid("division by 1 - xi"))?;
    Ok(check(
        format!("N(1-xi_{}) = (1-xi_{})^(1-sigma_{})", m * l, m, l),
        &lhs,
        &rhs,
    ))
}

/// Exact checks on the system (1 - xi_{f p^k})_k: the tower norm from level k+1, the
/// choice xi_{np}^p = xi_n, and, for each prime l | f, the norm relation after removing l.
pub fn cyclo_element_checks(f: u64, p: u64, k: u32) -> Result<CycloReport> {
    if k == 0 {
        return Err(Error::invalid("cyclotomic elements start at level k = 1"));
    }
    if f == 0 || f % p == 0 {
        return Err(Error::invalid(format!("f={} must be prime to p={}", f, p)));
    }
    let n = f * p.pow(k);
    let mut checks = vec![tower_norm_check(n, p)?];
    let xi = CycloInt::zeta_pow(n * p, 1).pow(p);
    checks.push(check(
        format!("xi_{}^{} = xi_{}", n * p, p, n),
        &xi,
        &CycloInt::zeta_pow(n, 1).lift(n * p),
    ));
    for (l, v) in factorize(f) {
        let m = n / l.pow(v);
        if v > 1 {
            checks.push(tower_norm_check(m * l, l.pow(v - 1))?);
        }
        checks.push(euler_norm_check(m, l)?);
    }
    Ok(CycloReport { modulus: n, checks })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nine_to_three() {
        let c = tower_norm_check(3, 3).unwrap();
        assert!(c.ok, "{:?}", c);
    }

    #[test]
    fn twelve_to_four() {
        let c = euler_norm_check(4, 3).unwrap();
        assert!(c.ok);
        let minus_i = -&CycloInt::zeta_pow(4, 1);
        assert_eq!(CycloElement::new(12).unwrap().value.norm_to(4), minus_i);
    }

    #[test]
    fn frobenius_convention() {
        // m = 4 cannot tell sigma_3 from its inverse; m = 5, l = 2 can.
        assert!(euler_norm_check(5, 2).unwrap().ok);
        assert!(!euler_norm_check_arithmetic(5, 2).unwrap().ok);
    }

    #[test]
    fn report() {
        for (f, p, k) in [(1, 3, 1), (4, 3, 1), (4, 5, 1), (2, 3, 2), (7, 3, 1)] {
            let r = cyclo_element_checks(f, p, k).unwrap();
            assert!(r.ok(), "{:?}", r);
        }
        assert!(cyclo_element_checks(1, 3, 0).is_err());
    }
}
