use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::padic::{CoeffRing, PadicApprox};
use crate::series::PowerSeries;

use super::weierstrass::{generator_series, poly_divrem, poly_mul, weierstrass};

/// One component p^mu P / Q of an invertible fractional ideal, P and Q distinguished.
/// A principal ideal of Lambda has Q = 1 and mu >= 0.
#[derive(Clone, Debug)]
pub struct IdealComponent {
    pub mu: i64,
    pub num: Vec<PadicApprox>,
    pub den: Vec<PadicApprox>,
}

impl IdealComponent {
    pub fn unit(ring: &Arc<CoeffRing>) -> Self {
        IdealComponent {
            mu: 0,
            num: vec![PadicApprox::one(ring)],
            den: vec![PadicApprox::one(ring)],
        }
    }

    /// The ideal generated by a series, in canonical form.
    pub fn from_series(f: &PowerSeries) -> Result<Self> {
        let w = weierstrass(f)?;
        Ok(IdealComponent {
            mu: w.mu as i64,
            num: w.dist,
            den: vec![PadicApprox::one(f.ring())],
        })
    }

    pub fn ring(&self) -> &Arc<CoeffRing> {
        self.num[0].ring()
    }

    /// lambda of the numerator minus lambda of the denominator.
    pub fn lambda(&self) -> i64 {
        self.num.len() as i64 - self.den.len() as i64
    }

    pub fn is_integral(&self) -> bool {
        self.mu >= 0 && self.den.len() == 1
    }

    pub fn is_trivial(&self) -> bool {
        self.mu == 0 && self.num.len() == 1 && self.den.len() == 1
    }

    /// Smallest precision among the distinguished coefficients.
    pub fn precision(&self) -> u32 {
        self.num
            .iter()
            .chain(&self.den)
            .map(|c| c.prec())
            .min()
            .unwrap_or(0)
    }

    pub fn mul(&self, o: &Self) -> Self {
        IdealComponent {
            mu: self.mu + o.mu,
            num: poly_mul(&self.num, &o.num),
            den: poly_mul(&self.den, &o.den),
        }
        .reduced()
    }

    pub fn inverse(&self) -> Self {
        IdealComponent {
            mu: -self.mu,
            num: self.den.clone(),
            den: self.num.clone(),
        }
    }

    /// Cancels the denominator against the numerator when one divides the other.
    fn reduced(self) -> Self {
        if self.den.len() == 1 || self.num.len() == 1 {
            return self;
        }
        let (q, r) = poly_divrem(&self.num, &self.den);
        if r.iter().all(|c| c.is_zero()) {
            let ring = self.ring().clone();
            return IdealComponent {
                mu: self.mu,
                num: q,
                den: vec![PadicApprox::one(&ring)],
            };
        }
        let (q, r) = poly_divrem(&self.den, &self.num);
        if r.iter().all(|c| c.is_zero()) {
            let ring = self.ring().clone();
            return IdealComponent {
                mu: self.mu,
                num: vec![PadicApprox::one(&ring)],
                den: q,
            };
        }
        self
    }

    pub fn to_json(&self, chi: &str) -> Value {
        let s = |v: &[PadicApprox]| v.iter().map(|c| c.to_string()).collect::<Vec<_>>();
        let mut out = json!({
            "chi": chi,
            "mu": self.mu,
            "lambda": self.lambda(),
            "distinguished_coeffs": s(&self.num),
            "precision": self.precision(),
        });
        if self.den.len() > 1 {
            out["denominator_coeffs"] = json!(s(&self.den));
        }
        out
    }
}

impl PartialEq for IdealComponent {
    /// p^a P/Q = p^b R/S iff a = b and P S = R Q, at the working precision.
    fn eq(&self, o: &Self) -> bool {
        if self.mu != o.mu || self.lambda() != o.lambda() {
            return false;
        }
        let l = poly_mul(&self.num, &o.den);
        let r = poly_mul(&o.num, &self.den);
        l.len() == r.len() && l.iter().zip(&r).all(|(a, b)| a == b)
    }
}

impl fmt::Display for IdealComponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = self.ring().p();
        let poly = |v: &[PadicApprox]| {
            let mut terms = vec![];
            for (i, c) in v.iter().enumerate().rev() {
                if c.is_zero() && i + 1 != v.len() {
                    continue;
                }
                let c = match c.as_scalar() {
                    Some(x) => crate::series::signed_residue(x, p.pow(c.prec())).to_string(),
                    None => format!("({})", c),
                };
                terms.push(match i {
                    0 => c,
                    _ if i + 1 == v.len() => format!("T^{}", i),
                    _ => format!("{}*T^{}", c, i),
                });
            }
            terms.join(" + ")
        };
        write!(f, "({}^{}", p, self.mu)?;
        if self.num.len() > 1 {
            write!(f, " * ({})", poly(&self.num))?;
        }
        if self.den.len() > 1 {
            write!(f, " / ({})", poly(&self.den))?;
        }
        write!(f, ")")
    }
}

/// An invertible fractional ideal of a product of Iwasawa algebras, one
/// component per character label.
#[derive(Clone, Debug, PartialEq)]
pub struct FractionalIdeal {
    pub components: BTreeMap<String, IdealComponent>,
}

impl FractionalIdeal {
    pub fn single(label: &str, c: IdealComponent) -> Self {
        let mut components = BTreeMap::new();
        components.insert(label.to_string(), c);
        FractionalIdeal { components }
    }

    pub fn from_series(items: &[(String, PowerSeries)]) -> Result<Self> {
        let mut components = BTreeMap::new();
        for (label, f) in items {
            components.insert(label.clone(), IdealComponent::from_series(f)?);
        }
        Ok(FractionalIdeal { components })
    }

    pub fn component(&self, label: &str) -> Option<&IdealComponent> {
        self.components.get(label)
    }

    pub fn is_trivial(&self) -> bool {
        self.components.values().all(|c| c.is_trivial())
    }

    pub fn mul(&self, o: &Self) -> Result<Self> {
        if self.components.keys().ne(o.components.keys()) {
            return Err(Error::Mismatch(format!(
                "ideals live on different components: {:?} vs {:?}",
                self.components.keys().collect::<Vec<_>>(),
                o.components.keys().collect::<Vec<_>>()
            )));
        }
        let components = self
            .components
            .iter()
            .map(|(k, c)| (k.clone(), c.mul(&o.components[k])))
            .collect();
        Ok(FractionalIdeal { components })
    }

    pub fn inverse(&self) -> Self {
        FractionalIdeal {
            components: self.components.iter().map(|(k, c)| (k.clone(), c.inverse())).collect(),
        }
    }

    pub fn to_json(&self) -> Value {
        Value::Array(self.components.iter().map(|(k, c)| c.to_json(k)).collect())
    }
}

impl fmt::Display for FractionalIdeal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.components.iter().map(|(k, c)| format!("{}: {}", k, c)).collect();
        write!(f, "{}", parts.join(", "))
    }
}

/// prod I_i^{e_i} for signs e_i = +1 or -1.
pub fn alternating_char(parts: &[(FractionalIdeal, i32)]) -> Result<FractionalIdeal> {
    let (first, rest) = parts
        .split_first()
        .ok_or_else(|| Error::invalid("alternating product of no ideals"))?;
    let signed = |(i, s): &(FractionalIdeal, i32)| -> Result<FractionalIdeal> {
        match s {
            1 => Ok(i.clone()),
            -1 => Ok(i.inverse()),
            _ => Err(Error::invalid(format!("exponent {} is not +1 or -1", s))),
        }
    };
    let mut acc = signed(first)?;
    for part in rest {
        acc = acc.mul(&signed(part)?)?;
    }
    Ok(acc)
}

/// Ring maps along which ideals are pushed forward.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BaseChange {
    Identity,
    /// projection of the product ring onto one character component
    Component(String),
    /// Lambda / (p^M, T^N) -> Lambda / (p^prec, T^trunc)
    Reduce { prec: u32, trunc: usize },
}

/// cart(phi)(I): the image ideal in canonical form.
pub fn base_change(ideal: &FractionalIdeal, phi: &BaseChange) -> Result<FractionalIdeal> {
    match phi {
        BaseChange::Identity => Ok(ideal.clone()),
        BaseChange::Component(label) => {
            let c = ideal
                .components
                .get(label)
                .ok_or_else(|| Error::invalid(format!("no component {} to project onto", label)))?;
            Ok(FractionalIdeal::single(label, c.clone()))
        }
        BaseChange::Reduce { prec, trunc } => {
            let mut components = BTreeMap::new();
            for (label, c) in &ideal.components {
                let ring = c.ring();
                if *prec > ring.prec() || *prec == 0 || *trunc == 0 {
                    return Err(Error::invalid(format!(
                        "reduction to (p^{}, T^{}) does not extend from precision p^{}",
                        prec,
                        trunc,
                        ring.prec()
                    )));
                }
                let target = ring.at_precision(*prec)?;
                let image = |mu: i64, dist: &[PadicApprox]| -> Result<IdealComponent> {
                    let dist: Vec<PadicApprox> = dist.iter().map(|x| recast(x, &target)).collect();
                    let g = generator_series(mu as u32, &dist, &target, *trunc);
                    IdealComponent::from_series(&g).map_err(|e| match e {
                        Error::PrecisionExhausted(_) if dist.iter().all(|x| x.prec() > 0) => Error::invalid(format!(
                            "component {} maps to a zero divisor modulo (p^{}, T^{})",
                            label, prec, trunc
                        )),
                        e => e,
                    })
                };
                let (num_mu, den_mu) = if c.mu >= 0 { (c.mu, 0) } else { (0, -c.mu) };
                let num = image(num_mu, &c.num)?;
                let den = image(den_mu, &c.den)?;
                components.insert(label.clone(), num.mul(&den.inverse()));
            }
            Ok(FractionalIdeal { components })
        }
    }
}

/// The same p-adic coordinates read in a ring of lower precision.
fn recast(x: &PadicApprox, ring: &Arc<CoeffRing>) -> PadicApprox {
    let q = ring.modulus();
    PadicApprox::from_raw(ring, x.coeffs().iter().map(|c| c % q).collect(), x.prec().min(ring.prec()))
}

/// A series read in a ring of lower precision and truncated.
pub fn recast_series(f: &PowerSeries, ring: &Arc<CoeffRing>, n: usize) -> PowerSeries {
    PowerSeries::new(ring, (0..n).map(|i| recast(&f.coeff(i), ring)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::char_ideal::LambdaTrunc;

    #[test]
    fn cancellation_rules() {
        let ring = CoeffRing::new(3, 6, 1).unwrap();
        let lam = LambdaTrunc::new(&ring, 8).unwrap();
        let pt = FractionalIdeal::single("1", IdealComponent::from_series(&lam.from_ints(&[0, 3]).unwrap()).unwrap());
        let t = FractionalIdeal::single("1", IdealComponent::from_series(&lam.t()).unwrap());
        let p = alternating_char(&[(pt.clone(), 1), (t, -1)]).unwrap();
        let c = p.component("1").unwrap();
        assert_eq!((c.mu, c.lambda()), (1, 0));
        assert!(alternating_char(&[(pt.clone(), 1), (pt, -1)]).unwrap().is_trivial());
    }

    #[test]
    fn unit_multiples_agree() {
        let ring = CoeffRing::new(5, 4, 1).unwrap();
        let lam = LambdaTrunc::new(&ring, 8).unwrap();
        let f = lam.from_ints(&[10, 5, 1, 2]).unwrap();
        let u = lam.from_ints(&[2, 7, 1]).unwrap();
        assert_eq!(
            IdealComponent::from_series(&f).unwrap(),
            IdealComponent::from_series(&f.mul(&u)).unwrap()
        );
    }

    #[test]
    fn reduce_rejects_zero_divisors() {
        let ring = CoeffRing::new(3, 4, 1).unwrap();
        let lam = LambdaTrunc::new(&ring, 6).unwrap();
        let i = FractionalIdeal::single("1", IdealComponent::from_series(&lam.from_ints(&[0, 0, 0, 1]).unwrap()).unwrap());
        assert!(base_change(&i, &BaseChange::Reduce { prec: 2, trunc: 3 }).is_err());
        assert!(base_change(&i, &BaseChange::Reduce { prec: 5, trunc: 3 }).is_err());
        assert!(base_change(&i, &BaseChange::Reduce { prec: 2, trunc: 5 }).is_err());
        let j = base_change(&i, &BaseChange::Reduce { prec: 2, trunc: 6 }).unwrap();
        assert_eq!(j.component("1").unwrap().lambda(), 3);
    }
}
