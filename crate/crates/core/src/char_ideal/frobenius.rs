use std::sync::Arc;

use num::{BigInt, Integer};

use crate::arith::{is_prime, val};
use crate::characters::{all_characters, eval_galois, DirichletChar, GaloisChar};
use crate::error::{Error, Result};
use crate::padic::{log_p, CoeffRing};
use crate::series::{binomial, PowerSeries};

use super::ideal::{FractionalIdeal, IdealComponent};
use super::presentation::{char_of_presentation, PresentedModule};
use super::weierstrass::LambdaTrunc;

/// The characters of Delta = (Z/fp)^* whose values lie in the ring.
pub fn delta_characters(f: u64, p: u64, ring: &Arc<CoeffRing>) -> Vec<DirichletChar> {
    all_characters(f * p)
        .into_iter()
        .filter(|t| ring.contains_roots_of_unity(t.order()) && t.values_unramified(p))
        .collect()
}

/// s in Z_p with <l> = (1+fp)^s, modulo p^digits.
fn gamma_log(l: u64, f: u64, p: u64, digits: u32) -> BigInt {
    let prec = digits + 1;
    let lp = log_p(&BigInt::from(l).pow((p - 1) as u32), p, prec + 1).unwrap();
    let lu = log_p(&BigInt::from(1 + f * p), p, prec + 1).unwrap();
    let m = BigInt::from(p).pow(digits);
    let pb = BigInt::from(p);
    // log l^{p-1} = (p-1) s log(1+fp); both logs are divisible by p exactly once or more
    let a = (&lp / &pb).mod_floor(&m);
    let b = ((&lu / &pb) * BigInt::from(p - 1)).mod_floor(&m);
    let binv = b.modinv(&m).expect("log(1+fp)/p is a unit");
    (a * binv).mod_floor(&m)
}

/// CHAR of O[G/D_l] presented by 1 - psi(F_l) g_l, psi = rho^{-1} kappa, on each
/// character component of Lambda[Delta]. The image of g_l on the theta component is
/// theta(l) (1+T)^{-s} with <l> = (1+fp)^s computed from p-adic logarithms.
///
/// With `level = Some(k)` a zero divisor at level k is reported as an error.
pub fn frobenius_quotient_char(
    l: u64,
    rho: &GaloisChar,
    f: u64,
    level: Option<u32>,
    ring: &Arc<CoeffRing>,
    n: usize,
) -> Result<FractionalIdeal> {
    let p = ring.p();
    if !is_prime(l) || l == p {
        return Err(Error::invalid(format!("need a prime l != p, got {}", l)));
    }
    let thetas = delta_characters(f, p, ring);
    let lam = LambdaTrunc::new(ring, n)?;
    if rho.finite.conductor() % l == 0 {
        let mut out = FractionalIdeal::single(&thetas[0].label(), IdealComponent::unit(ring));
        for t in &thetas[1..] {
            out.components.insert(t.label(), IdealComponent::unit(ring));
        }
        return Ok(out);
    }
    if f % l == 0 {
        return Err(Error::invalid(format!(
            "l={} divides the tame modulus {} but rho is unramified there",
            l, f
        )));
    }
    let psi = rho.inverse().mul(&GaloisChar::new(1, DirichletChar::trivial()));
    if let Some(k) = level {
        if crate::l_elements::euler_factor(l, rho, f, &[], ring)?.is_zero_divisor(k) {
            return Err(Error::ZeroDivisor(format!(
                "1 - {}(F_{}) g_{} is a zero divisor at level {}",
                psi.label(),
                l,
                l,
                k
            )));
        }
    }
    let c = eval_galois(&psi, l, ring)?;
    // binomial(x, i) mod p^M only needs x mod p^{M + v(i!)}
    let fact_val: u32 = (1..n as u64).map(|i| val(i, p)).sum();
    let s = gamma_log(l, f, p, ring.prec() + fact_val);
    let pow: Vec<BigInt> = (0..n).map(|i| binomial(&-&s, i)).collect();
    let g = PowerSeries::from_bigints(ring, &pow, n);
    let mut out: Option<FractionalIdeal> = None;
    for theta in &thetas {
        let tl = theta.value_in(l as i64, ring)?;
        let entry = PowerSeries::one(ring, n).sub(&g.scale(&c.mul(&tl)));
        let m = PresentedModule::with_label(&theta.label(), &lam, vec![vec![entry]])?;
        let part = char_of_presentation(&m)?;
        match out.as_mut() {
            None => out = Some(part),
            Some(o) => o.components.extend(part.components),
        }
    }
    out.ok_or_else(|| Error::invalid("no characters of Delta in this ring"))
}

/// The ideal of the Euler factor from the group-ring side, component by component.
pub fn euler_factor_ideal(
    l: u64,
    rho: &GaloisChar,
    f: u64,
    ring: &Arc<CoeffRing>,
    n: usize,
) -> Result<FractionalIdeal> {
    use crate::l_elements::euler_factor;
    let e = euler_factor(l, rho, f, &[], ring)?;
    let items = delta_characters(f, ring.p(), ring)
        .into_iter()
        .map(|t| Ok((t.label(), e.series(&t, ring, n)?)))
        .collect::<Result<Vec<_>>>()?;
    FractionalIdeal::from_series(&items)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characters::kronecker;

    #[test]
    fn matches_euler_factor_at_five() {
        let ring = CoeffRing::new(5, 4, 4).unwrap();
        let triv = GaloisChar::finite(DirichletChar::trivial());
        for l in [2u64, 3, 7] {
            let a = frobenius_quotient_char(l, &triv, 1, None, &ring, 12).unwrap();
            let b = euler_factor_ideal(l, &triv, 1, &ring, 12).unwrap();
            assert_eq!(a, b, "l={}", l);
        }
    }

    #[test]
    fn matches_euler_factor_twisted() {
        let chi4 = kronecker(-4).unwrap();
        let rhos = [
            GaloisChar::new(1, DirichletChar::trivial()),
            GaloisChar::new(2, chi4.clone()),
        ];
        for p in [3u64, 5] {
            let ring = CoeffRing::new(p, 3, 2).unwrap();
            for rho in &rhos {
                for l in [2u64, 7, 11].into_iter().filter(|&l| l != p) {
                    let a = frobenius_quotient_char(l, rho, 1, None, &ring, 5).unwrap();
                    let b = euler_factor_ideal(l, rho, 1, &ring, 5).unwrap();
                    assert_eq!(a, b, "p={} l={} rho={}", p, l, rho.label());
                }
            }
        }
    }

    #[test]
    fn ramified_gives_unit_ideal() {
        let ring = CoeffRing::new(3, 3, 2).unwrap();
        let rho = GaloisChar::new(2, kronecker(-4).unwrap());
        let a = frobenius_quotient_char(2, &rho, 1, Some(3), &ring, 5).unwrap();
        assert!(a.is_trivial());
        assert!(euler_factor_ideal(2, &rho, 1, &ring, 5).unwrap().is_trivial());
    }

    #[test]
    fn zero_divisor_reported() {
        let ring = CoeffRing::new(5, 3, 4).unwrap();
        let kappa = GaloisChar::new(1, DirichletChar::trivial());
        assert!(matches!(
            frobenius_quotient_char(11, &kappa, 1, Some(1), &ring, 4),
            Err(Error::ZeroDivisor(_))
        ));
        assert!(frobenius_quotient_char(11, &kappa, 1, None, &ring, 4).is_ok());
    }
}
