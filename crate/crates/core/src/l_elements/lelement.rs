use std::collections::BTreeMap;
use std::sync::Arc;

use crate::characters::{DirichletChar, GaloisChar};
use crate::error::{Error, Result};
use crate::group_ring::{gamma_components, gamma_to_series, PadicElem};
use crate::padic::CoeffRing;
use crate::series::PowerSeries;

use super::stickelberger::{smoothed_stickelberger, smoothing_element};

/// Tw_psi(pr+ - pr- Theta) stored as the pair (G, H) = (Tw(h pr+ - pr- h Theta), Tw(h));
/// the L-element is G / H in the total quotient ring.
#[derive(Clone, Debug)]
pub struct LElement {
    pub psi: GaloisChar,
    pub f: u64,
    levels: BTreeMap<u32, (PadicElem, PadicElem)>,
}

pub fn l_element(psi: &GaloisChar, f: u64, levels: &[u32], ring: &Arc<CoeffRing>) -> Result<LElement> {
    let p = ring.p();
    let mut out = BTreeMap::new();
    for &k in levels {
        let h = smoothing_element(f, p, k)?;
        let h_theta = smoothed_stickelberger(f, p, k)?;
        let (h_plus, _) = h.plus_minus();
        let (_, h_theta_minus) = h_theta.plus_minus();
        let g = h_plus.sub(&h_theta_minus)?;
        let g = g.reduce(ring)?.twist(psi)?;
        let h = h.reduce(ring)?.twist(psi)?;
        out.insert(k, (g, h));
    }
    Ok(LElement {
        psi: psi.clone(),
        f,
        levels: out,
    })
}

impl LElement {
    pub fn level(&self, k: u32) -> Option<&(PadicElem, PadicElem)> {
        self.levels.get(&k)
    }

    pub fn levels(&self) -> impl Iterator<Item = (&u32, &(PadicElem, PadicElem))> {
        self.levels.iter()
    }

    /// (beta(G), beta(H)) on the trivial component of Delta, modulo T^n. The caller
    /// is responsible for the level being large enough for the truncation.
    pub fn beta_pair(&self, k: u32, n: usize) -> Result<(PowerSeries, PowerSeries)> {
        let (g, h) = self
            .levels
            .get(&k)
            .ok_or_else(|| Error::invalid(format!("level {} was not computed", k)))?;
        let triv = DirichletChar::trivial();
        let ring = g.ring();
        let bg = gamma_to_series(&gamma_components(g, &triv)?, ring, n);
        let bh = gamma_to_series(&gamma_components(h, &triv)?, ring, n);
        Ok((bg, bh))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characters::kronecker;

    #[test]
    fn odd_rho_gives_one() {
        // rho = chi_4 is odd, so psi = rho^{-1} kappa is even
        let ring = CoeffRing::new(3, 3, 1).unwrap();
        let rho = GaloisChar::finite(kronecker(-4).unwrap());
        let psi = rho.inverse().mul(&GaloisChar::new(1, DirichletChar::trivial()));
        let le = l_element(&psi, 4, &[4], &ring).unwrap();
        let (g, h) = le.beta_pair(4, 4).unwrap();
        assert_eq!(g, h);
        let (gk, hk) = le.level(4).unwrap();
        assert_ne!(gk, hk);
    }
}
