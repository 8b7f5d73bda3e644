use std::sync::Arc;

use num::{BigInt, BigRational};

use crate::characters::{teichmuller_char, DirichletChar};
use crate::error::{Error, Result};
use crate::exact::{gen_bernoulli, CycloInt, CycloRat};
use crate::padic::{embed_cyclo_rat, CoeffRing, PadicApprox};

use super::iwasawa::{iwasawa_series, IwasawaSeries};

/// L_p(1-k, theta) for an even theta = chi omega from the exact Bernoulli side:
/// -(1 - theta omega^{-k}(p) p^{k-1}) B_{k, theta omega^{-k}} / k.
pub fn lp_oracle(theta: &DirichletChar, k: u32, ring: &Arc<CoeffRing>) -> Result<PadicApprox> {
    if k == 0 {
        return Err(Error::invalid("k must be a positive integer"));
    }
    let p = ring.p();
    let omega = teichmuller_char(p, ring);
    let eta = theta.mul(&omega.pow(-(k as i64))).primitive();
    let d = eta.order();
    let b = gen_bernoulli(k as usize, eta.table())?;
    let euler = match eta.value(p as i64) {
        None => CycloInt::one(d),
        Some(v) => &CycloInt::one(d) - &v.scale(&BigInt::from(p).pow(k - 1)),
    };
    let val = CycloRat::from_int(-&euler)
        .mul(&b)
        .scale(&BigRational::new(BigInt::from(1), BigInt::from(k)));
    // p may split in Q(zeta_d): the denominator can carry p while the value is
    // integral at the embedding's prime, so work with extra digits and divide there.
    let mut extra = 0;
    let mut den = val.denom().clone();
    let pb = BigInt::from(p);
    while (&den % &pb) == BigInt::from(0) {
        den /= &pb;
        extra += 1;
    }
    let wide = ring.at_precision(ring.prec() + extra)?;
    let x = embed_cyclo_rat(&val, &wide).map_err(|_| {
        Error::NotIntegral(format!("L_p(1-{}, {}) is not p-integral", k, theta.label()))
    })?;
    if x.prec() < ring.prec() {
        return Err(Error::NotIntegral(format!("L_p(1-{}, {}) is not p-integral", k, theta.label())));
    }
    let q = ring.modulus();
    Ok(PadicApprox::from_raw(ring, x.coeffs().iter().map(|c| c % q).collect(), ring.prec()))
}

/// The odd character chi = theta omega^{-1} attached to an even theta.
pub fn odd_partner(theta: &DirichletChar, ring: &Arc<CoeffRing>) -> Result<DirichletChar> {
    if theta.is_odd() {
        return Err(Error::invalid(format!(
            "{} is odd; the p-adic L-function needs an even character",
            theta.label()
        )));
    }
    let omega = teichmuller_char(ring.p(), ring);
    Ok(theta.mul(&omega.inverse()).primitive())
}

/// f(T0) at T0 = tau(gamma) (1+fp)^{1-k} - 1, tracked to min(M, N v(T0)).
///
/// `tau_order` is the order of tau(gamma); only the trivial tau (order 1) is
/// available because a nontrivial p-power root of unity needs ramified coefficients.
pub fn lp_eval_series(series: &IwasawaSeries, k: u32, tau_order: u64) -> Result<PadicApprox> {
    if k == 0 {
        return Err(Error::invalid("k must be a positive integer"));
    }
    if tau_order != 1 {
        return Err(Error::Unsupported(format!(
            "tau of order {} takes values outside the unramified coefficient ring",
            tau_order
        )));
    }
    let ring = series.series.ring();
    let u = PadicApprox::from_i64(ring, (1 + series.f * series.p) as i64);
    let t0 = u.pow((k - 1) as u64).inv()?.sub(&PadicApprox::one(ring));
    let v = series.series.eval(&t0)?;
    if v.prec() == 0 {
        return Err(Error::precision(format!(
            "no p-adic digits left evaluating at T0 = {}",
            t0
        )));
    }
    Ok(v)
}

/// L_p(1-k, theta) from the Iwasawa series of chi = theta omega^{-1}.
pub fn lp_eval(theta: &DirichletChar, ring: &Arc<CoeffRing>, n: usize, k: u32, tau_order: u64) -> Result<PadicApprox> {
    let chi = odd_partner(theta, ring)?;
    let s = iwasawa_series(&chi, ring, n)?;
    lp_eval_series(&s, k, tau_order)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characters::kronecker;

    #[test]
    fn pinned_values() {
        let ring = CoeffRing::new(5, 2, 1).unwrap();
        let omega = teichmuller_char(5, &ring);
        let theta = omega.pow(2);
        assert_eq!(lp_oracle(&theta, 2, &ring).unwrap().as_scalar(), Some(17));
        assert_eq!(lp_eval(&theta, &ring, 6, 2, 1).unwrap().as_scalar(), Some(17));

        let ring = CoeffRing::new(3, 4, 1).unwrap();
        let omega = teichmuller_char(3, &ring);
        let theta = kronecker(-4).unwrap().mul(&omega);
        assert_eq!(lp_eval(&theta, &ring, 6, 1, 1).unwrap().as_scalar(), Some(1));
        assert_eq!(lp_oracle(&theta, 1, &ring).unwrap().as_scalar(), Some(1));
    }

    #[test]
    fn rejects() {
        let ring = CoeffRing::new(5, 3, 1).unwrap();
        let omega = teichmuller_char(5, &ring);
        assert!(lp_eval(&omega, &ring, 6, 1, 1).is_err());
        assert!(lp_eval(&omega.pow(2), &ring, 6, 0, 1).is_err());
        assert!(matches!(lp_eval(&omega.pow(2), &ring, 6, 1, 5), Err(Error::Unsupported(_))));
    }

    #[test]
    fn interpolation_sweep() {
        use crate::characters::primitive_characters;
        use super::super::iwasawa::{check_series_char, iwasawa_series};
        let mut checked = 0;
        for p in [3u64, 5, 7] {
            for cond in 1..=12u64 {
                for chi in primitive_characters(cond) {
                    if !chi.is_odd() || !chi.values_unramified(p) || !chi.is_first_kind(p) {
                        continue;
                    }
                    let ring = CoeffRing::new(p, 4, crate::arith::lcm(chi.order(), p - 1)).unwrap();
                    if check_series_char(&chi, &ring).is_err() {
                        continue;
                    }
                    let omega = teichmuller_char(p, &ring);
                    let theta = chi.mul(&omega);
                    let s = iwasawa_series(&chi, &ring, 8).unwrap();
                    for k in 1..=4 {
                        let got = lp_eval_series(&s, k, 1).unwrap();
                        let want = lp_oracle(&theta, k, &ring).unwrap();
                        assert_eq!(got.prec(), 4);
                        assert_eq!(got, want, "p={} {} k={}", p, chi.label(), k);
                        checked += 1;
                    }
                }
            }
        }
        assert!(checked > 100, "{}", checked);
    }
}
