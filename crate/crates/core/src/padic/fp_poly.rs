//! Polynomials over F_p, lowest degree first, used to pick residue factors of Phi_D.

use crate::arith::{inv_mod, mul_mod};

pub type Poly = Vec<u64>;

pub fn trim(mut a: Poly) -> Poly {
    while a.len() > 1 && *a.last().unwrap() == 0 {
        a.pop();
    }
    if a.is_empty() {
        a.push(0);
    }
    a
}

pub fn is_zero(a: &[u64]) -> bool {
    a.iter().all(|&c| c == 0)
}

pub fn deg(a: &[u64]) -> usize {
    trim(a.to_vec()).len() - 1
}

pub fn sub(a: &[u64], b: &[u64], p: u64) -> Poly {
    let n = a.len().max(b.len());
    let out = (0..n)
        .map(|i| {
            let x = a.get(i).copied().unwrap_or(0);
            let y = b.get(i).copied().unwrap_or(0);
            (x + p - y) % p
        })
        .collect();
    trim(out)
}

pub fn mul(a: &[u64], b: &[u64], p: u64) -> Poly {
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + mul_mod(x, y, p)) % p;
        }
    }
    trim(out)
}

pub fn divrem(a: &[u64], b: &[u64], p: u64) -> (Poly, Poly) {
    let b = trim(b.to_vec());
    let db = b.len() - 1;
    let lead_inv = inv_mod(b[db], p).expect("nonzero leading coefficient");
    let mut r = trim(a.to_vec());
    if r.len() <= db {
        return (vec![0], r);
    }
    let mut q = vec![0u64; r.len() - db];
    for i in (db..r.len()).rev() {
        let c = mul_mod(r[i], lead_inv, p);
        if c == 0 {
            continue;
        }
        q[i - db] = c;
        for (j, &bj) in b.iter().enumerate() {
            let t = mul_mod(c, bj, p);
            r[i - db + j] = (r[i - db + j] + p - t) % p;
        }
    }
    r.truncate(db.max(1));
    (trim(q), trim(r))
}

pub fn monic(a: &[u64], p: u64) -> Poly {
    let a = trim(a.to_vec());
    let inv = inv_mod(*a.last().unwrap(), p).unwrap();
    a.iter().map(|&c| mul_mod(c, inv, p)).collect()
}

pub fn gcd(a: &[u64], b: &[u64], p: u64) -> Poly {
    let mut a = trim(a.to_vec());
    let mut b = trim(b.to_vec());
    while !is_zero(&b) {
        let (_, r) = divrem(&a, &b, p);
        a = b;
        b = r;
    }
    monic(&a, p)
}

pub fn powmod(base: &[u64], mut e: u128, m: &[u64], p: u64) -> Poly {
    let mut acc = vec![1u64];
    let mut b = divrem(base, m, p).1;
    while e > 0 {
        if e & 1 == 1 {
            acc = divrem(&mul(&acc, &b, p), m, p).1;
        }
        b = divrem(&mul(&b, &b, p), m, p).1;
        e >>= 1;
    }
    acc
}

/// Splits a squarefree product of irreducibles of common degree r (odd p).
///
/// Candidates a(x) are enumerated deterministically, so the output is reproducible.
pub fn equal_degree_factor(f: &[u64], r: usize, p: u64) -> Vec<Poly> {
    let f = monic(f, p);
    let n = f.len() - 1;
    if n == r {
        return vec![f];
    }
    let q = (p as u128).pow(r as u32);
    let mut counter: u64 = 1;
    loop {
        // a(x) = x + c with c walking through F_p, then higher-degree probes
        let mut a = Vec::new();
        let mut c = counter;
        while c > 0 {
            a.push(c % p);
            c /= p;
        }
        if a.len() < 2 {
            a.resize(2, 0);
            a[1] = 1;
        }
        counter += 1;
        let a = divrem(&a, &f, p).1;
        if deg(&a) == 0 {
            continue;
        }
        let g = if p == 2 {
            // trace map for characteristic 2
            let mut t = a.clone();
            let mut s = a.clone();
            for _ in 1..r {
                t = divrem(&mul(&t, &t, p), &f, p).1;
                s = sub(&s, &sub(&[0], &t, p), p);
            }
            gcd(&s, &f, p)
        } else {
            let b = powmod(&a, (q - 1) / 2, &f, p);
            gcd(&sub(&b, &[1], p), &f, p)
        };
        let dg = g.len() - 1;
        if dg > 0 && dg < n {
            let h = divrem(&f, &g, p).0;
            let mut out = equal_degree_factor(&g, r, p);
            out.extend(equal_degree_factor(&h, r, p));
            return out;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn splits_x4_plus_1_mod_3() {
        // x^4 + 1 = (x^2 + x + 2)(x^2 + 2x + 2) over F_3
        let mut fs = equal_degree_factor(&[1, 0, 0, 0, 1], 2, 3);
        fs.sort();
        assert_eq!(fs, vec![vec![2, 1, 1], vec![2, 2, 1]]);
    }
}
