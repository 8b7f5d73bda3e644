use num::{BigInt, Integer, Zero};
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::padic::{scalar_to_bigint, CoeffRing, PadicApprox};
use crate::series::PowerSeries;

use super::ideal::{recast_series, BaseChange, FractionalIdeal, IdealComponent};
use super::weierstrass::{prepare, LambdaTrunc};

/// Which determinant algorithm to use.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DetRoute {
    /// fraction-free Bareiss elimination over Z[T] on integer lifts
    Bareiss,
    /// elimination in Lambda / (p^M, T^N) with a precision audit of the final division
    Elimination,
}

/// A square presentation Lambda^n -> Lambda^n of a torsion module.
#[derive(Clone, Debug)]
pub struct PresentedModule {
    pub label: String,
    lambda: LambdaTrunc,
    entries: Vec<Vec<PowerSeries>>,
    det: PowerSeries,
}

impl PresentedModule {
    /// Builds the module, rejecting non-square matrices and determinants that are
    /// zero at the working precision.
    pub fn new(lambda: &LambdaTrunc, entries: Vec<Vec<PowerSeries>>) -> Result<Self> {
        Self::with_label("1", lambda, entries)
    }

    pub fn with_label(label: &str, lambda: &LambdaTrunc, entries: Vec<Vec<PowerSeries>>) -> Result<Self> {
        let n = entries.len();
        if n == 0 || entries.iter().any(|r| r.len() != n) {
            return Err(Error::invalid(format!(
                "presentation matrix must be square and nonempty, got {} rows of lengths {:?}",
                n,
                entries.iter().map(|r| r.len()).collect::<Vec<_>>()
            )));
        }
        if entries.iter().flatten().any(|e| !lambda.contains(e)) {
            return Err(Error::Mismatch("matrix entries do not lie in the given Lambda".into()));
        }
        let det = determinant(&entries, default_route(lambda.ring()))?;
        if !det.newton().reliable {
            return Err(Error::precision(format!(
                "determinant vanishes modulo (p^{}, T^{}); the module is not torsion at this precision",
                det.precision(),
                lambda.trunc()
            )));
        }
        Ok(PresentedModule {
            label: label.to_string(),
            lambda: lambda.clone(),
            entries,
            det,
        })
    }

    pub fn size(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[Vec<PowerSeries>] {
        &self.entries
    }

    pub fn det(&self) -> &PowerSeries {
        &self.det
    }

    pub fn lambda(&self) -> &LambdaTrunc {
        &self.lambda
    }

    /// The elementary module (+) Lambda / (f_i).
    pub fn elementary(lambda: &LambdaTrunc, fs: &[PowerSeries]) -> Result<Self> {
        let n = fs.len();
        let entries = (0..n)
            .map(|i| (0..n).map(|j| if i == j { fs[i].clone() } else { lambda.zero() }).collect())
            .collect();
        Self::new(lambda, entries)
    }

    /// Block upper triangular [[A, C], [0, B]].
    pub fn block_triangular(a: &Self, b: &Self, c: &[Vec<PowerSeries>]) -> Result<Self> {
        let (n, m) = (a.size(), b.size());
        if c.len() != n || c.iter().any(|r| r.len() != m) {
            return Err(Error::invalid("off-diagonal block has the wrong shape"));
        }
        let zero = a.lambda.zero();
        let mut entries = vec![vec![zero; n + m]; n + m];
        for i in 0..n {
            for j in 0..n {
                entries[i][j] = a.entries[i][j].clone();
            }
            for j in 0..m {
                entries[i][n + j] = c[i][j].clone();
            }
        }
        for i in 0..m {
            for j in 0..m {
                entries[n + i][n + j] = b.entries[i][j].clone();
            }
        }
        Self::with_label(&a.label, &a.lambda, entries)
    }

    /// phi_* of the presentation for a reduction map.
    pub fn base_change(&self, phi: &BaseChange) -> Result<Self> {
        match phi {
            BaseChange::Identity => Ok(self.clone()),
            BaseChange::Component(l) if *l == self.label => Ok(self.clone()),
            BaseChange::Component(l) => Err(Error::invalid(format!(
                "presentation lives on component {}, not {}",
                self.label, l
            ))),
            BaseChange::Reduce { prec, trunc } => {
                let ring = self.lambda.ring();
                if *prec > ring.prec() || *prec == 0 || *trunc == 0 || *trunc > self.lambda.trunc() {
                    return Err(Error::invalid(format!(
                        "reduction to (p^{}, T^{}) does not extend from (p^{}, T^{})",
                        prec,
                        trunc,
                        ring.prec(),
                        self.lambda.trunc()
                    )));
                }
                let target = ring.at_precision(*prec)?;
                let lam = LambdaTrunc::new(&target, *trunc)?;
                let entries = self
                    .entries
                    .iter()
                    .map(|r| r.iter().map(|e| recast_series(e, &target, *trunc)).collect())
                    .collect();
                Self::with_label(&self.label, &lam, entries)
            }
        }
    }
}

fn default_route(ring: &CoeffRing) -> DetRoute {
    if ring.degree() == 1 {
        DetRoute::Bareiss
    } else {
        DetRoute::Elimination
    }
}

/// Determinant of a square matrix over Lambda / (p^M, T^N).
pub fn determinant(m: &[Vec<PowerSeries>], route: DetRoute) -> Result<PowerSeries> {
    match route {
        DetRoute::Bareiss => det_bareiss(m),
        DetRoute::Elimination => det_elimination(m),
    }
}

/// Exact polynomial arithmetic over Z, lowest coefficient first.
fn zpoly_mul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(out)
}

fn zpoly_sub(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); a.len().max(b.len())];
    for (i, x) in a.iter().enumerate() {
        out[i] += x;
    }
    for (i, x) in b.iter().enumerate() {
        out[i] -= x;
    }
    trim(out)
}

fn trim(mut v: Vec<BigInt>) -> Vec<BigInt> {
    while v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
    v
}

/// a / b in Z[T], which must be exact.
fn zpoly_div_exact(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    if a.is_empty() {
        return vec![];
    }
    let db = b.len() - 1;
    let lc = &b[db];
    let mut r = a.to_vec();
    let mut q = vec![BigInt::zero(); a.len() - db];
    for i in (0..q.len()).rev() {
        let (c, rem) = r[i + db].div_rem(lc);
        assert!(rem.is_zero(), "Bareiss division is exact");
        for (j, bj) in b.iter().enumerate() {
            r[i + j] -= &c * bj;
        }
        q[i] = c;
    }
    assert!(r.iter().all(|c| c.is_zero()), "Bareiss division is exact");
    trim(q)
}

fn det_bareiss(m: &[Vec<PowerSeries>]) -> Result<PowerSeries> {
    let ring = m[0][0].ring().clone();
    if ring.degree() != 1 {
        return Err(Error::Unsupported(
            "fraction-free elimination over Z[T] needs scalar coefficients".into(),
        ));
    }
    let n = m.len();
    let len = m[0][0].len();
    let prec = m.iter().flatten().map(|e| e.precision()).min().unwrap();
    let mut a: Vec<Vec<Vec<BigInt>>> = m
        .iter()
        .map(|r| {
            r.iter()
                .map(|e| trim(e.coeffs().iter().map(|c| scalar_to_bigint(c).unwrap()).collect()))
                .collect()
        })
        .collect();
    let mut sign = 1i64;
    let mut prev = vec![BigInt::from(1)];
    for k in 0..n.saturating_sub(1) {
        if a[k][k].is_empty() {
            match (k + 1..n).find(|&i| !a[i][k].is_empty()) {
                Some(i) => {
                    a.swap(i, k);
                    sign = -sign;
                }
                None => return Ok(PowerSeries::zero(&ring, len).with_prec(prec)),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let x = zpoly_sub(&zpoly_mul(&a[k][k], &a[i][j]), &zpoly_mul(&a[i][k], &a[k][j]));
                a[i][j] = zpoly_div_exact(&x, &prev);
            }
            a[i][k] = vec![];
        }
        prev = a[k][k].clone();
    }
    let d = &a[n - 1][n - 1];
    let q = BigInt::from(ring.p()).pow(prec);
    let coeffs: Vec<BigInt> = (0..len)
        .map(|i| (d.get(i).cloned().unwrap_or_default() * sign).mod_floor(&q))
        .collect();
    Ok(PowerSeries::from_bigints(&ring, &coeffs, len).with_prec(prec))
}

/// Row-reduces with unit pivots where possible; otherwise cross-multiplies rows by
/// the pivot and divides the accumulated factor out of the diagonal product at the
/// end, tracking the precision that division costs.
fn det_elimination(m: &[Vec<PowerSeries>]) -> Result<PowerSeries> {
    let ring = m[0][0].ring().clone();
    let n = m.len();
    let len = m[0][0].len();
    let mut a: Vec<Vec<PowerSeries>> = m.to_vec();
    let mut sign = false;
    let mut scale = PowerSeries::one(&ring, len);
    let key = |x: &PowerSeries| {
        let nv = x.newton();
        if nv.reliable {
            (nv.mu, nv.lambda)
        } else {
            (u32::MAX, u32::MAX)
        }
    };
    for k in 0..n {
        let piv = (k..n).min_by_key(|&i| key(&a[i][k])).unwrap();
        if key(&a[piv][k]).0 == u32::MAX {
            return Ok(PowerSeries::zero(&ring, len));
        }
        if piv != k {
            a.swap(piv, k);
            sign = !sign;
        }
        let p = a[k][k].clone();
        if p.is_unit() {
            let pinv = p.inverse()?;
            for i in k + 1..n {
                let c = a[i][k].mul(&pinv);
                for j in k..n {
                    let t = c.mul(&a[k][j]);
                    a[i][j] = a[i][j].sub(&t);
                }
            }
        } else {
            for i in k + 1..n {
                if key(&a[i][k]).0 == u32::MAX {
                    continue;
                }
                let c = a[i][k].clone();
                for j in k..n {
                    a[i][j] = p.mul(&a[i][j]).sub(&c.mul(&a[k][j]));
                }
                scale = scale.mul(&p);
            }
        }
    }
    let mut d = PowerSeries::one(&ring, len);
    for (k, row) in a.iter().enumerate() {
        d = d.mul(&row[k]);
    }
    if sign {
        d = d.neg();
    }
    divide_audited(&d, &scale)
}

/// g / s for s dividing g in Lambda, known only modulo (p^M, T^N): returns the
/// quotient with the precision that survives.
pub fn divide_audited(g: &PowerSeries, s: &PowerSeries) -> Result<PowerSeries> {
    let ring = g.ring().clone();
    let n = g.len();
    if s.newton().reliable && s.newton().mu == 0 && s.newton().lambda == 0 {
        return Ok(g.mul(&s.inverse()?));
    }
    let w = prepare(s)?;
    let lam = w.lambda();
    let g = g.mul(&w.unit.truncate(n).inverse()?);
    // p^mu
    let gv = g.coeffs().iter().map(|c| c.valuation()).min().unwrap_or(0);
    if gv < w.mu && !g.coeffs().iter().all(|c| c.valuation() >= c.prec()) {
        return Err(Error::NotIntegral(format!(
            "elimination factor p^{} does not divide the diagonal product",
            w.mu
        )));
    }
    let coeffs = g
        .coeffs()
        .iter()
        .map(|c| {
            if c.prec() <= w.mu {
                Ok(PadicApprox::zero(&ring).with_prec(0))
            } else {
                c.shift_down(w.mu)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let g = PowerSeries::new(&ring, coeffs);
    if lam == 0 {
        return Ok(g);
    }
    // g = P h, solved from the top: h_{i - lam} = g_i - sum_{j < lam} P_j h_{i - j}.
    // Unknown h beyond the truncation enter through p-divisible P_j only.
    let out_len = n - lam;
    let mut h: Vec<PadicApprox> = vec![PadicApprox::zero(&ring); out_len];
    for t in (0..out_len).rev() {
        let mut x = g.coeff(t + lam);
        for j in 0..lam {
            let idx = t + lam - j;
            let term = if idx < out_len {
                w.dist[j].mul(&h[idx])
            } else {
                // unknown integral h_idx: only the valuation of P_j is certain
                PadicApprox::zero(&ring).with_prec(w.dist[j].valuation())
            };
            x = x.sub(&term);
        }
        h[t] = x;
    }
    for i in 0..lam {
        let mut r = g.coeff(i);
        for j in 0..=i {
            let term = match h.get(i - j) {
                Some(x) => w.dist[j].mul(x),
                None => PadicApprox::zero(&ring).with_prec(w.dist[j].valuation()),
            };
            r = r.sub(&term);
        }
        if r.valuation() < r.prec() {
            return Err(Error::NotIntegral(format!(
                "distinguished factor leaves remainder {} at T^{}",
                r, i
            )));
        }
    }
    Ok(PowerSeries::new(&ring, h))
}

/// CHAR of a presented torsion module: the principal ideal of its determinant.
pub fn char_of_presentation(m: &PresentedModule) -> Result<FractionalIdeal> {
    Ok(FractionalIdeal::single(&m.label, IdealComponent::from_series(&m.det)?))
}

/// Whether the module vanishes at every height-one prime containing p, i.e. whether
/// its characteristic ideal has mu = 0.
pub fn mu_vanishing_check(m: &PresentedModule) -> Result<bool> {
    let nv = m.det.newton();
    if !nv.reliable {
        return Err(Error::precision(format!(
            "mu of the determinant is not certified at precision p^{}",
            m.det.precision()
        )));
    }
    Ok(nv.mu == 0)
}

/// JSON matrix input {p, M, N, d?, entries: [[coefficient lists]]}; a coefficient
/// is an integer or, for d > 1, a list of ring coordinates.
#[derive(Debug, Deserialize)]
pub struct MatrixInput {
    pub p: u64,
    #[serde(rename = "M")]
    pub m: u32,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(default)]
    pub d: Option<u64>,
    pub entries: Vec<Vec<Vec<Coord>>>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum Coord {
    Int(i64),
    Vec(Vec<i64>),
}

impl Coord {
    fn coords(&self) -> Vec<i64> {
        match self {
            Coord::Int(x) => vec![*x],
            Coord::Vec(v) => v.clone(),
        }
    }
}

impl MatrixInput {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::invalid(format!("matrix JSON: {}", e)))
    }

    pub fn build(&self) -> Result<PresentedModule> {
        let ring = CoeffRing::new(self.p, self.m, self.d.unwrap_or(1))?;
        let lam = LambdaTrunc::new(&ring, self.n)?;
        let entries = self
            .entries
            .iter()
            .map(|row| {
                row.iter()
                    .map(|cell| lam.from_coords(&cell.iter().map(|c| c.coords()).collect::<Vec<_>>()))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        PresentedModule::new(&lam, entries)
    }
}

/// Parses one CSV cell: coefficients separated by spaces or semicolons.
pub fn parse_cell(cell: &str) -> Result<Vec<Vec<i64>>> {
    cell.split(|c: char| c == ';' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<i64>()
                .map(|x| vec![x])
                .map_err(|_| Error::invalid(format!("bad coefficient {:?}", s)))
        })
        .collect()
}

/// A random element of Lambda / (p^M, T^N) with scalar coefficients.
pub fn random_series(lam: &LambdaTrunc, mut next: impl FnMut() -> u64) -> PowerSeries {
    let q = lam.ring().modulus();
    let v: Vec<BigInt> = (0..lam.trunc()).map(|_| BigInt::from(next() % q)).collect();
    PowerSeries::from_bigints(lam.ring(), &v, lam.trunc())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn leibniz(m: &[Vec<PowerSeries>]) -> PowerSeries {
        let n = m.len();
        let ring = m[0][0].ring().clone();
        let len = m[0][0].len();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut total = PowerSeries::zero(&ring, len);
        // Heap's algorithm, tracking the sign
        fn go(k: usize, perm: &mut Vec<usize>, sign: bool, m: &[Vec<PowerSeries>], total: &mut PowerSeries) -> bool {
            if k == 1 {
                let mut t = PowerSeries::one(m[0][0].ring(), m[0][0].len());
                for (i, &j) in perm.iter().enumerate() {
                    t = t.mul(&m[i][j]);
                }
                *total = if sign { total.sub(&t) } else { total.add(&t) };
                return sign;
            }
            let mut s = sign;
            for i in 0..k {
                s = go(k - 1, perm, s, m, total);
                if i + 1 < k {
                    if k % 2 == 0 {
                        perm.swap(i, k - 1);
                    } else {
                        perm.swap(0, k - 1);
                    }
                    s = !s;
                }
            }
            s
        }
        go(n, &mut perm, false, m, &mut total);
        total
    }

    fn agree(a: &PowerSeries, b: &PowerSeries) -> bool {
        a.coeffs().iter().zip(b.coeffs()).all(|(x, y)| x == y)
    }

    fn lam() -> LambdaTrunc {
        LambdaTrunc::new(&CoeffRing::new(3, 6, 1).unwrap(), 8).unwrap()
    }

    #[test]
    fn diagonal_and_triangular() {
        let l = lam();
        let t = l.t();
        let p = l.from_ints(&[3]).unwrap();
        let m = PresentedModule::new(&l, vec![vec![t.clone(), l.zero()], vec![l.zero(), p.clone()]]).unwrap();
        let c = char_of_presentation(&m).unwrap();
        let c = c.component("1").unwrap();
        assert_eq!((c.mu, c.lambda()), (1, 1));
        let m = PresentedModule::new(&l, vec![vec![t.clone(), p], vec![l.zero(), t]]).unwrap();
        let c = char_of_presentation(&m).unwrap();
        let c = c.component("1").unwrap();
        assert_eq!((c.mu, c.lambda()), (0, 2));
        assert!(c.num[0].is_zero() && c.num[1].is_zero());
    }

    #[test]
    fn rejects_bad_shapes() {
        let l = lam();
        assert!(PresentedModule::new(&l, vec![vec![l.t(), l.t()]]).is_err());
        assert!(PresentedModule::new(&l, vec![vec![l.t(), l.t()], vec![l.t(), l.t()]]).is_err());
    }

    #[test]
    fn routes_agree_with_leibniz() {
        let l = lam();
        let mut state = 12345u64;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            state >> 33
        };
        for n in 1..=4 {
            for _ in 0..10 {
                let m: Vec<Vec<PowerSeries>> =
                    (0..n).map(|_| (0..n).map(|_| random_series(&l, &mut next)).collect()).collect();
                let want = leibniz(&m);
                assert_eq!(det_bareiss(&m).unwrap(), want);
                assert!(agree(&det_elimination(&m).unwrap(), &want));
            }
        }
    }

    #[test]
    fn elimination_with_non_unit_pivots() {
        let l = lam();
        let e = |v: &[i64]| l.from_ints(v).unwrap();
        let m = vec![vec![e(&[3, 1]), e(&[0, 1])], vec![e(&[0, 0, 1]), e(&[9, 0, 1])]];
        let want = leibniz(&m);
        let got = det_elimination(&m).unwrap();
        assert!(agree(&got, &want));
        assert!(got.precision() >= 1);
    }

    #[test]
    fn json_input() {
        let m = MatrixInput::parse(r#"{"p": 3, "M": 4, "N": 6, "entries": [[[0, 1], [3]], [[0], [0, 1]]]}"#)
            .unwrap()
            .build()
            .unwrap();
        let c = char_of_presentation(&m).unwrap();
        assert_eq!(c.component("1").unwrap().lambda(), 2);
        assert_eq!(parse_cell("1; 2 3").unwrap(), vec![vec![1], vec![2], vec![3]]);
    }
}
