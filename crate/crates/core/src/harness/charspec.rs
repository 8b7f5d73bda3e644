//! Character syntax shared by the CLI and the suites.
//!
//! `triv`, `quad:D` (Kronecker symbol of discriminant D), `teich:j` (omega^j),
//! `mod:<m>:<g=v,...>` (values on residues generating (Z/m)^*, roots of unity written
//! `1`, `-1`, `i`, `zD` or `zD^E`), products joined by `*`, and `kappa^r` for
//! Galois characters.

use std::sync::Arc;

use crate::characters::{char_from_values, kronecker, teichmuller_char, DirichletChar, GaloisChar, RootOfUnity};
use crate::error::{Error, Result};
use crate::padic::CoeffRing;

fn parse_atom(s: &str, ring: Option<&Arc<CoeffRing>>) -> Result<DirichletChar> {
    let s = s.trim();
    if s == "triv" || s == "1" {
        return Ok(DirichletChar::trivial());
    }
    let (head, rest) = s
        .split_once(':')
        .ok_or_else(|| Error::invalid(format!("unknown character '{}'", s)))?;
    match head {
        "quad" => {
            let d: i64 = rest
                .parse()
                .map_err(|_| Error::invalid(format!("bad discriminant in '{}'", s)))?;
            kronecker(d)
        }
        "teich" => {
            let j: i64 = rest
                .parse()
                .map_err(|_| Error::invalid(format!("bad exponent in '{}'", s)))?;
            let ring = ring.ok_or_else(|| Error::invalid("teich:j needs a prime p"))?;
            Ok(teichmuller_char(ring.p(), ring).pow(j).primitive())
        }
        "mod" => {
            let (m, vals) = rest.split_once(':').unwrap_or((rest, ""));
            let m: u64 = m
                .parse()
                .map_err(|_| Error::invalid(format!("bad modulus in '{}'", s)))?;
            let mut values = Vec::new();
            for part in vals.split(',').filter(|x| !x.trim().is_empty()) {
                let (g, v) = part
                    .split_once('=')
                    .ok_or_else(|| Error::invalid(format!("expected g=value, got '{}'", part)))?;
                let g: u64 = g
                    .trim()
                    .parse()
                    .map_err(|_| Error::invalid(format!("bad residue '{}'", g)))?;
                values.push((g, v.parse::<RootOfUnity>()?));
            }
            Ok(char_from_values(m, &values)?.primitive())
        }
        _ => Err(Error::invalid(format!("unknown character '{}'", s))),
    }
}

/// A Dirichlet character, reduced to its primitive form.
pub fn parse_char(s: &str, ring: Option<&Arc<CoeffRing>>) -> Result<DirichletChar> {
    let g = parse_galois(s, ring)?;
    if g.kappa != 0 {
        return Err(Error::invalid(format!("'{}' is not a Dirichlet character", s)));
    }
    Ok(g.finite)
}

/// kappa^r times a Dirichlet character.
pub fn parse_galois(s: &str, ring: Option<&Arc<CoeffRing>>) -> Result<GaloisChar> {
    let mut out = GaloisChar::finite(DirichletChar::trivial());
    if s.trim().is_empty() {
        return Err(Error::invalid("empty character"));
    }
    for part in s.split('*') {
        let part = part.trim();
        let g = if part == "kappa" {
            GaloisChar::new(1, DirichletChar::trivial())
        } else if let Some(r) = part.strip_prefix("kappa^") {
            let r: i64 = r
                .parse()
                .map_err(|_| Error::invalid(format!("bad kappa exponent in '{}'", part)))?;
            GaloisChar::new(r, DirichletChar::trivial())
        } else {
            GaloisChar::finite(parse_atom(part, ring)?)
        };
        out = out.mul(&g);
    }
    out.finite = out.finite.primitive();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_forms() {
        let ring = CoeffRing::new(5, 3, 4).unwrap();
        let q = parse_char("quad:-4", None).unwrap();
        assert_eq!(q.conductor(), 4);
        assert!(q.is_odd());
        let w = parse_char("teich:1", Some(&ring)).unwrap();
        assert_eq!(w, teichmuller_char(5, &ring));
        assert!(parse_char("teich:4", Some(&ring)).unwrap().is_trivial());
        let m = parse_char("mod:4:3=-1", None).unwrap();
        assert_eq!(m, q);
        let prod = parse_char("quad:-4*quad:-4", None).unwrap();
        assert!(prod.is_trivial());
        let g = parse_galois("kappa^2*quad:-4", None).unwrap();
        assert_eq!(g.kappa, 2);
        assert_eq!(g.finite, q);
        let i = parse_char("mod:5:2=i", None).unwrap();
        assert_eq!(i.order(), 4);
    }

    #[test]
    fn rejects_garbage() {
        for s in ["", "quad:x", "teich:1", "mod:8:3=-1", "foo", "kappa^2"] {
            assert!(parse_char(s, None).is_err(), "{}", s);
        }
    }
}
