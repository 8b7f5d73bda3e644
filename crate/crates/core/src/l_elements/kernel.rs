//! Streaming beta over the Gamma-cosets of (Z/f p^k)^* for many characters at once.
//!
//! Every character contributes `width` lanes (the coordinates of its values in the
//! coefficient ring). All arithmetic is additive mod q = p^M, so a lane never
//! needs to know about the ring multiplication: the per-coset sums are table
//! lookups and beta is Horner's rule in (1+T)^{-1}.

use crate::arith::{inv_mod, pow_mod};

/// Lane tables for all characters sharing the tame conductor f.
pub(crate) struct GroupSpec {
    pub f: u64,
    pub width: usize,
    /// f > 1: row (z, c) holds T(c) chi_p(zeta_z) / f, with T(c) = sum_{t<f} t chi_f(c + t p^k).
    /// f = 1: row (z, Q) holds Q chi_p(zeta_z) for 0 <= Q <= u.
    pub wa: Vec<u64>,
}

// The min trick keeps both reductions branch free: a wrapped difference is
// always larger than the correct representative.
impl Lane for u32 {
    #[inline(always)]
    fn from_u64(x: u64) -> Self {
        x as u32
    }
    #[inline(always)]
    fn to_u64(self) -> u64 {
        self as u64
    }
    #[inline(always)]
    fn add_mod(self, o: Self, q: Self) -> Self {
        let s = self.wrapping_add(o);
        s.min(s.wrapping_sub(q))
    }
    #[inline(always)]
    fn sub_mod(self, o: Self, q: Self) -> Self {
        let d = self.wrapping_sub(o);
        d.min(d.wrapping_add(q))
    }
    // Left to itself the compiler vectorizes short rows across the wrong loop.
    #[cfg(all(target_arch = "x86_64", target_feature = "avx2"))]
    #[inline(always)]
    fn sub_row_blocked(acc: &mut [Self], row: &[Self], q: Self) {
        use std::arch::x86_64::*;
        assert!(acc.len() == row.len() && acc.len() % BLOCK == 0);
        // SAFETY: avx2 is enabled at compile time and every access stays inside the
        // two slices, whose common length is a multiple of 8.
        unsafe {
            let qv = _mm256_set1_epi32(q as i32);
            for i in (0..acc.len()).step_by(BLOCK) {
                let pa = acc.as_mut_ptr().add(i) as *mut __m256i;
                let a = _mm256_loadu_si256(pa);
                let r = _mm256_loadu_si256(row.as_ptr().add(i) as *const __m256i);
                let d = _mm256_sub_epi32(a, r);
                _mm256_storeu_si256(pa, _mm256_min_epu32(d, _mm256_add_epi32(d, qv)));
            }
        }
    }
}

impl Lane for u64 {
    #[inline(always)]
    fn from_u64(x: u64) -> Self {
        x
    }
    #[inline(always)]
    fn to_u64(self) -> u64 {
        self
    }
    #[inline(always)]
    fn add_mod(self, o: Self, q: Self) -> Self {
        let s = self.wrapping_add(o);
        s.min(s.wrapping_sub(q))
    }
    #[inline(always)]
    fn sub_mod(self, o: Self, q: Self) -> Self {
        let d = self.wrapping_sub(o);
        d.min(d.wrapping_add(q))
    }
}

#[inline(always)]
fn add_row<L: Lane>(acc: &mut [L], row: &[L], q: L) {
    for (a, &r) in acc.iter_mut().zip(row) {
        *a = a.add_mod(r, q);
    }
}

/// Family widths are padded to a multiple of this many lanes.
const BLOCK: usize = 8;

pub(crate) trait Lane: Copy + Default {
    fn from_u64(x: u64) -> Self;
    fn to_u64(self) -> u64;
    fn add_mod(self, o: Self, q: Self) -> Self;
    fn sub_mod(self, o: Self, q: Self) -> Self;
    /// acc -= row lanewise; both lengths are the same multiple of BLOCK.
    #[inline(always)]
    fn sub_row_blocked(acc: &mut [Self], row: &[Self], q: Self) {
        for (a, &r) in acc.iter_mut().zip(row) {
            *a = a.sub_mod(r, q);
        }
    }
}

/// Montgomery multiplication modulo an odd m < 2^32 with R = 2^32.
#[derive(Clone, Copy)]
struct Mont {
    m: u64,
    nprime: u32,
}

impl Mont {
    fn new(m: u64) -> Self {
        assert!(m % 2 == 1 && m < 1 << 32);
        let m32 = m as u32;
        let mut inv = m32;
        for _ in 0..5 {
            inv = inv.wrapping_mul(2u32.wrapping_sub(m32.wrapping_mul(inv)));
        }
        Mont {
            m,
            nprime: inv.wrapping_neg(),
        }
    }

    /// c R mod m, so that mul(b, to_mont(c)) = b c mod m.
    fn to_mont(self, c: u64) -> u64 {
        (((c as u128) << 32) % self.m as u128) as u64
    }

    #[inline(always)]
    fn mul(self, a: u64, c: u64) -> u64 {
        let t = a * c;
        let k = (t as u32).wrapping_mul(self.nprime) as u64;
        let km = k * self.m;
        let r = (t >> 32) + (km >> 32) + ((t as u32 != 0) as u64);
        r.min(r.wrapping_sub(self.m))
    }
}

/// Lemire's remainder for a 32-bit numerator and a small divisor.
#[inline(always)]
fn fast_rem(x: u64, magic: u64, d: u64) -> u64 {
    let low = magic.wrapping_mul(x);
    ((low >> 32) * d + (((low & 0xffff_ffff) * d) >> 32)) >> 32
}

fn fast_magic(d: u64) -> u64 {
    assert!(d >= 1 && d < 1 << 16);
    (u64::MAX / d).wrapping_add(1)
}

/// Teichmueller representatives of 1..p-1 modulo p^k.
pub(crate) fn teichmueller_reps(p: u64, k: u32) -> Vec<u64> {
    let pk = p.pow(k);
    (1..p).map(|a| pow_mod(a, p.pow(k - 1), pk)).collect()
}

/// Families of f > 1 groups share one table indexed by b mod lcm(f); merging
/// stops at this modulus or at `FAMILY_CELLS` table entries.
const FAMILY_MODULUS: u64 = 1000;
const FAMILY_CELLS: usize = 1 << 19;

struct Family {
    modulus: u64,
    magic: u64,
    width: usize,
    offset: usize,
    /// 1 when every row is independent of zeta (chi_p trivial), else p - 1
    slices: usize,
    table: Vec<u64>,
    /// (group index, lane offset inside the family)
    members: Vec<(usize, usize)>,
}

fn plan_families(groups: &[GroupSpec], nz: usize, q: u64) -> Vec<Family> {
    let mut order: Vec<usize> = (0..groups.len()).filter(|&g| groups[g].f > 1).collect();
    order.sort_by_key(|&g| std::cmp::Reverse(groups[g].f));
    let slices = |spec: &GroupSpec| {
        let slice = spec.f as usize * spec.width;
        if spec.wa.chunks(slice).all(|s| s == &spec.wa[..slice]) {
            1
        } else {
            nz
        }
    };
    let mut fams: Vec<Family> = vec![];
    for g in order {
        let spec = &groups[g];
        let ns = slices(spec);
        let fits = |fam: &Family| {
            let m = crate::arith::lcm(fam.modulus, spec.f);
            fam.slices == ns && m <= FAMILY_MODULUS && ns * m as usize * (fam.width + spec.width) <= FAMILY_CELLS
        };
        match fams.iter_mut().find(|fam| fits(fam)) {
            Some(fam) => {
                fam.modulus = crate::arith::lcm(fam.modulus, spec.f);
                fam.members.push((g, fam.width));
                fam.width += spec.width;
            }
            None => fams.push(Family {
                modulus: spec.f,
                magic: 0,
                width: spec.width,
                offset: 0,
                slices: ns,
                table: vec![],
                members: vec![(g, 0)],
            }),
        }
    }
    for fam in fams.iter_mut() {
        fam.width = fam.width.div_ceil(BLOCK) * BLOCK;
        let m = fam.modulus as usize;
        fam.magic = fast_magic(fam.modulus);
        fam.table = vec![0; fam.slices * m * fam.width];
        for &(g, off) in &fam.members {
            let spec = &groups[g];
            let f = spec.f as usize;
            for z in 0..fam.slices {
                for c in 0..m {
                    let src = (z * f + c % f) * spec.width;
                    let dst = (z * m + c) * fam.width + off;
                    for l in 0..spec.width {
                        fam.table[dst + l] = 2 * spec.wa[src + l] % q;
                    }
                }
            }
        }
    }
    fams
}

/// The exponent c with (1+fp)^c = 1 + p modulo p^k, found from p-adic logarithms.
fn gamma_exponent(p: u64, f: u64, k: u32) -> u64 {
    use num::{BigInt, ToPrimitive};
    let period = p.pow(k - 1);
    let lg = |a: u64| crate::padic::log_p(&BigInt::from(a), p, k).unwrap().to_u64().unwrap() / p;
    let c = (lg(1 + p) as u128 * inv_mod(lg(1 + f * p) % period, period).unwrap() as u128 % period as u128) as u64;
    assert_eq!(pow_mod(1 + f * p, c, p.pow(k)), (1 + p) % p.pow(k));
    c
}

/// Coefficients of (1+T)^c - 1 raised to the powers 0..len, as a matrix m[k][i] mod q.
fn substitution_matrix(c: u64, q: u64, len: usize) -> Vec<Vec<u64>> {
    use num::{BigInt, Integer, ToPrimitive};
    let qb = BigInt::from(q);
    let mut s = vec![0u64; len];
    let mut binom = BigInt::from(1);
    for (i, si) in s.iter_mut().enumerate() {
        if i > 0 {
            binom = binom * (BigInt::from(c) - BigInt::from(i - 1)) / BigInt::from(i);
            *si = binom.mod_floor(&qb).to_u64().unwrap();
        }
    }
    let mut rows = vec![vec![0u64; len]; len];
    rows[0][0] = 1 % q;
    for k in 1..len {
        for i in 0..len {
            let a = rows[k - 1][i];
            if a == 0 {
                continue;
            }
            for j in 1..len - i {
                rows[k][i + j] = ((rows[k][i + j] as u128 + a as u128 * s[j] as u128) % q as u128) as u64;
            }
        }
    }
    rows
}

/// Returns, per group, the coefficients of g = -beta(h Theta^chi) mod (q, T^len) as a
/// row-major [len][width] array, with h = 1 - (1+fp) F_{1+fp} and beta sending
/// F_{1+fp}^{-1} to 1+T.
///
/// All groups walk the same cosets zeta (1+p)^j. Teichmueller representatives come
/// in pairs zeta_{p-a} = -zeta_a, and for odd chi with f > 1 the cosets x and -x
/// carry the same sum, so those families visit a < p/2 only with doubled tables.
/// For f = 1 the smoothing is done
/// coset by coset; for f > 1 Theta^chi is already integral, so the walk gives
/// beta(Theta^chi) in the variable of 1+p, and the change of variable and the
/// factor beta(h) are applied to the finished series.
pub(crate) fn stream(p: u64, level: u32, q: u64, len: usize, groups: &[GroupSpec]) -> Vec<Vec<u64>> {
    let nz = (p - 1) as usize;
    let fams = plan_families(groups, nz, q);
    let raw = if q < 1 << 31 {
        stream_lanes::<u32>(p, level, q, len, groups, fams)
    } else {
        stream_lanes::<u64>(p, level, q, len, groups, fams)
    };
    groups
        .iter()
        .zip(raw)
        .map(|(g, mut out)| {
            if g.f > 1 {
                change_variable(p, g.f, level, q, len, g.width, &mut out);
            }
            out
        })
        .collect()
}

/// Maps sum_i a_i S^i, S the variable of 1+p, to the variable of 1+fp and multiplies
/// by beta(h) = 1 - (1+fp)(1+T)^{-1}.
fn change_variable(p: u64, f: u64, level: u32, q: u64, len: usize, width: usize, out: &mut [u64]) {
    let mat = substitution_matrix(gamma_exponent(p, f, level), q, len);
    let mulq = |a: u64, b: u64| (a as u128 * b as u128 % q as u128) as u64;
    let mut sub = vec![0u64; len * width];
    for (k, row) in mat.iter().enumerate() {
        for (i, &m) in row.iter().enumerate() {
            if m == 0 {
                continue;
            }
            for l in 0..width {
                let v = &mut sub[i * width + l];
                *v = (*v + mulq(m, out[k * width + l])) % q;
            }
        }
    }
    let u = (1 + f * p) % q;
    // beta(h) = (1 - u) - u sum_{i >= 1} (-1)^i T^i
    let h: Vec<u64> = (0..len)
        .map(|i| match i {
            0 => (1 + q - u) % q,
            _ if i % 2 == 1 => u,
            _ => (q - u) % q,
        })
        .collect();
    out.iter_mut().for_each(|v| *v = 0);
    for i in 0..len {
        for (j, &hj) in h.iter().enumerate().take(len - i) {
            for l in 0..width {
                let v = &mut out[(i + j) * width + l];
                *v = (*v + mulq(hj, sub[i * width + l])) % q;
            }
        }
    }
}

fn stream_lanes<L: Lane>(p: u64, level: u32, q: u64, len: usize, groups: &[GroupSpec], mut fams: Vec<Family>) -> Vec<Vec<u64>> {
    let pk = p.pow(level);
    assert!(pk < 1 << 32, "level too large for the streaming kernel");
    let period = p.pow(level - 1);
    let zetas = teichmueller_reps(p, level);
    let nz = zetas.len();
    let mont = Mont::new(pk);
    let ql = L::from_u64(q);
    let u = (1 + p) % pk;
    let uinv = inv_mod(u, pk).unwrap();
    let cst = mont.to_mont(uinv);
    // exact division by pk via its inverse mod 2^64
    let mut pk_inv = pk;
    for _ in 0..6 {
        pk_inv = pk_inv.wrapping_mul(2u64.wrapping_sub(pk.wrapping_mul(pk_inv)));
    }

    let mut total = 0;
    let mut tables: Vec<Vec<L>> = vec![];
    for fam in fams.iter_mut() {
        fam.offset = total;
        total += fam.width;
        tables.push(fam.table.iter().map(|&v| L::from_u64(v)).collect());
    }
    let one = groups.iter().position(|g| g.f == 1);
    let one_lanes = one.map(|g| {
        let spec = &groups[g];
        let t: Vec<L> = spec.wa.iter().map(|&v| L::from_u64(v)).collect();
        (total, spec.width, t)
    });
    if let Some((_, w, _)) = &one_lanes {
        total += w;
    }

    // b at indices j and j - 1, starting from j = period - 1
    let top = pow_mod(u, period - 1, pk);
    let mut b_cur: Vec<u64> = zetas.iter().map(|&z| (z as u128 * top as u128 % pk as u128) as u64).collect();
    let mut b_prev: Vec<u64> = b_cur.iter().map(|&b| (b as u128 * uinv as u128 % pk as u128) as u64).collect();

    let mut acc = vec![L::default(); len * total];
    for _ in 0..period {
        // acc <- acc (1+S)^{-1} + x_j; new_i = a_i - new_{i-1}
        for i in 1..len {
            let (lo, hi) = acc.split_at_mut(i * total);
            let prev = &lo[(i - 1) * total..];
            for (c, &pv) in hi[..total].iter_mut().zip(prev) {
                *c = c.sub_mod(pv, ql);
            }
        }
        for (fam, table) in fams.iter().zip(&tables) {
            let (m, w) = (fam.modulus as usize, fam.width);
            let stride = if fam.slices == 1 { 0 } else { m * w };
            let row0 = &mut acc[fam.offset..fam.offset + w];
            for (z, &b) in b_cur[..nz / 2].iter().enumerate() {
                let c = fast_rem(b, fam.magic, fam.modulus) as usize;
                let row = z * stride + c * w;
                L::sub_row_blocked(row0, &table[row..row + w], ql);
            }
        }
        if let Some((off, w, table)) = &one_lanes {
            let rows = (p + 2) as usize;
            let row0 = &mut acc[*off..*off + *w];
            for z in 0..nz {
                let quot = (u * b_prev[z]).wrapping_sub(b_cur[z]).wrapping_mul(pk_inv) as usize;
                let row = (z * rows + quot) * w;
                add_row(row0, &table[row..row + w], ql);
            }
        }
        for z in 0..nz {
            b_cur[z] = b_prev[z];
            b_prev[z] = mont.mul(b_prev[z], cst);
        }
    }

    let extract = |off: usize, width: usize| {
        let mut out = Vec::with_capacity(len * width);
        for i in 0..len {
            let row = i * total + off;
            out.extend(acc[row..row + width].iter().map(|v| v.to_u64()));
        }
        out
    };
    let mut res = vec![vec![]; groups.len()];
    for fam in &fams {
        for &(g, off) in &fam.members {
            res[g] = extract(fam.offset + off, groups[g].width);
        }
    }
    if let (Some(g), Some((off, w, _))) = (one, &one_lanes) {
        res[g] = extract(*off, *w);
    }
    res
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn montgomery_and_fastmod() {
        for m in [3u64, 59049, 214358881, 2357947691, 4294967291] {
            let mont = Mont::new(m);
            for (a, c) in [(1u64, 1u64), (m - 1, m - 1), (12345 % m, 67890 % m), (m / 2, m / 3)] {
                assert_eq!(mont.mul(a, mont.to_mont(c)), (a as u128 * c as u128 % m as u128) as u64);
            }
        }
        for d in [1u64, 2, 3, 7, 40, 1000] {
            let magic = fast_magic(d);
            for x in [0u64, 1, 39, 40, 41, 4294967295, 2357947690] {
                assert_eq!(fast_rem(x, magic, d), x % d);
            }
        }
    }

    #[test]
    fn lanes_reduce() {
        let q = 7u32;
        assert_eq!(5u32.add_mod(4, q), 2);
        assert_eq!(2u32.sub_mod(5, q), 4);
        let q = (1u64 << 40) + 15;
        assert_eq!((q - 1).add_mod(q - 1, q), q - 2);
        assert_eq!(0u64.sub_mod(1, q), q - 1);
    }
}
