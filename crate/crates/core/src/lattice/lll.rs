//! LLL reduction of integer bases. Gram–Schmidt data is kept in `f64`,
//! recomputed from the exact integer Gram matrix (L² style); a rational
//! implementation takes over when the floating data degenerates.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};

use crate::interval::ldexp;
use crate::scalar::Rational;

pub const DEFAULT_DELTA: f64 = 0.99;

/// Reduced rows and the unimodular transform `U` with `reduced = U * rows`.
#[derive(Debug, Clone)]
pub struct Reduction {
    pub rows: Vec<Vec<BigInt>>,
    pub transform: Vec<Vec<BigInt>>,
}

fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `x * 2^-shift` as f64 keeping 64 leading bits.
fn scaled_f64(x: &BigInt, shift: i64) -> f64 {
    let bits = x.bits() as i64;
    if bits <= 64 {
        return ldexp(x.to_f64().unwrap_or(0.0), -shift);
    }
    let top = (x >> (bits - 64) as usize).to_f64().unwrap_or(0.0);
    ldexp(top, bits - 64 - shift)
}

fn identity(n: usize) -> Vec<Vec<BigInt>> {
    (0..n).map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect()).collect()
}

struct State {
    rows: Vec<Vec<BigInt>>,
    transform: Vec<Vec<BigInt>>,
    gram: Vec<Vec<BigInt>>,
    shift: i64,
    r: Vec<Vec<f64>>,
    mu: Vec<Vec<f64>>,
}

impl State {
    fn g(&self, i: usize, j: usize) -> f64 {
        scaled_f64(&self.gram[i][j], self.shift)
    }

    fn compute_row(&mut self, k: usize) -> bool {
        for j in 0..=k {
            let mut v = self.g(k, j);
            for t in 0..j {
                v -= self.mu[j][t] * self.r[k][t];
            }
            self.r[k][j] = v;
            if j < k {
                self.mu[k][j] = v / self.r[j][j];
            }
        }
        self.r[k][k].is_finite() && self.r[k][k] > 0.0 && self.mu[k][..k].iter().all(|m| m.is_finite())
    }

    fn refresh_gram_row(&mut self, k: usize) {
        for j in 0..self.rows.len() {
            let v = dot(&self.rows[k], &self.rows[j]);
            self.gram[j][k] = v.clone();
            self.gram[k][j] = v;
        }
    }

    fn swap(&mut self, a: usize, b: usize) {
        self.rows.swap(a, b);
        self.transform.swap(a, b);
        self.gram.swap(a, b);
        for row in self.gram.iter_mut() {
            row.swap(a, b);
        }
    }
}

/// LLL-reduce linearly independent integer rows.
pub fn lll_big(rows: Vec<Vec<BigInt>>, delta: f64) -> Reduction {
    lll_with_start(rows.clone(), identity(rows.len()), delta).unwrap_or_else(|| lll_integral(rows, delta))
}

/// Integral LLL (exact, all quantities kept as integers): `d_i` are the
/// Gram determinants and `lambda_ij = d_{j+1} mu_ij`.
pub fn lll_integral(rows: Vec<Vec<BigInt>>, delta: f64) -> Reduction {
    let n = rows.len();
    let mut b = rows;
    let mut h = identity(n);
    if n <= 1 {
        return Reduction { rows: b, transform: h };
    }
    let dq = Rational::from_float(delta).expect("finite delta");
    let (dnum, dden) = (dq.numer().clone(), dq.denom().clone());
    // 1-based: d[0] = 1, d[i] for vector i; lam[i][j] for j < i
    let mut d = vec![BigInt::zero(); n + 1];
    d[0] = BigInt::one();
    let mut lam = vec![vec![BigInt::zero(); n + 1]; n + 1];
    d[1] = dot(&b[0], &b[0]);
    let mut k = 2;
    let mut kmax = 1;
    let red = |k: usize, l: usize, b: &mut Vec<Vec<BigInt>>, h: &mut Vec<Vec<BigInt>>, lam: &mut Vec<Vec<BigInt>>, d: &[BigInt]| {
        let two_l: BigInt = &lam[k][l] * 2;
        if two_l.abs() > d[l] {
            let q = (&two_l + &d[l]).div_floor(&(&d[l] * 2));
            let (bl, hl) = (b[l - 1].clone(), h[l - 1].clone());
            for (c, v) in b[k - 1].iter_mut().zip(&bl) {
                *c -= &q * v;
            }
            for (c, v) in h[k - 1].iter_mut().zip(&hl) {
                *c -= &q * v;
            }
            let t = &q * &d[l];
            lam[k][l] -= t;
            for i in 1..l {
                let t = &q * &lam[l][i];
                lam[k][i] -= t;
            }
        }
    };
    while k <= n {
        if k > kmax {
            kmax = k;
            for j in 1..=k {
                let mut u = dot(&b[k - 1], &b[j - 1]);
                for i in 1..j {
                    u = (&d[i] * &u - &lam[k][i] * &lam[j][i]) / &d[i - 1];
                }
                if j < k {
                    lam[k][j] = u;
                } else {
                    d[k] = u;
                }
            }
        }
        loop {
            red(k, k - 1, &mut b, &mut h, &mut lam, &d);
            let lhs = &dden * &d[k] * &d[k - 2];
            let rhs = &dnum * &d[k - 1] * &d[k - 1] - &dden * &lam[k][k - 1] * &lam[k][k - 1];
            if lhs >= rhs {
                break;
            }
            // swap k and k-1
            b.swap(k - 1, k - 2);
            h.swap(k - 1, k - 2);
            for j in 1..k - 1 {
                let t = lam[k][j].clone();
                lam[k][j] = lam[k - 1][j].clone();
                lam[k - 1][j] = t;
            }
            let l = lam[k][k - 1].clone();
            let bb = (&d[k - 2] * &d[k] + &l * &l) / &d[k - 1];
            for i in k + 1..=kmax {
                let t = lam[i][k].clone();
                lam[i][k] = (&d[k] * &lam[i][k - 1] - &l * &t) / &d[k - 1];
                lam[i][k - 1] = (&bb * &t + &l * &lam[i][k]) / &d[k];
            }
            d[k - 1] = bb;
            if k > 2 {
                k -= 1;
            }
        }
        for l in (1..k - 1).rev() {
            red(k, l, &mut b, &mut h, &mut lam, &d);
        }
        k += 1;
    }
    Reduction { rows: b, transform: h }
}

fn lll_with_start(rows: Vec<Vec<BigInt>>, transform: Vec<Vec<BigInt>>, delta: f64) -> Option<Reduction> {
    let n = rows.len();
    if n <= 1 {
        return Some(Reduction { rows, transform });
    }
    let gram: Vec<Vec<BigInt>> = rows.iter().map(|a| rows.iter().map(|b| dot(a, b)).collect()).collect();
    let max_bits = gram.iter().flatten().map(|g| g.bits() as i64).max().unwrap_or(0);
    let shift = (max_bits - 900).max(0);
    let mut st = State { rows, transform, gram, shift, r: vec![vec![0.0; n]; n], mu: vec![vec![0.0; n]; n] };
    st.r[0][0] = st.g(0, 0);
    if !(st.r[0][0] > 0.0 && st.r[0][0].is_finite()) {
        return None;
    }
    let mut k = 1;
    let mut steps = 0usize;
    while k < n {
        steps += 1;
        if steps > 200_000 {
            return None;
        }
        let mut rounds = 0;
        loop {
            if !st.compute_row(k) {
                return None;
            }
            let mut mus = st.mu[k][..k].to_vec();
            let mut xs: Vec<f64> = vec![0.0; k];
            let mut changed = false;
            for j in (0..k).rev() {
                let x = mus[j].round();
                if x != 0.0 {
                    changed = true;
                    xs[j] = x;
                    for t in 0..j {
                        mus[t] -= x * st.mu[j][t];
                    }
                }
            }
            if !changed {
                break;
            }
            rounds += 1;
            if rounds > 10_000 {
                return None;
            }
            for (j, &x) in xs.iter().enumerate() {
                if x == 0.0 {
                    continue;
                }
                let xb = BigInt::from_f64(x)?;
                let (bj, uj) = (st.rows[j].clone(), st.transform[j].clone());
                for (c, v) in st.rows[k].iter_mut().zip(&bj) {
                    *c -= &xb * v;
                }
                for (c, v) in st.transform[k].iter_mut().zip(&uj) {
                    *c -= &xb * v;
                }
            }
            st.refresh_gram_row(k);
        }
        // cancellation guard: the float GSO is only trusted when r_kk keeps
        // a healthy fraction of |b_k|^2
        if st.r[k][k] < st.g(k, k) * 1e-9 {
            return None;
        }
        let m = st.mu[k][k - 1];
        let proj = st.r[k][k] + m * m * st.r[k - 1][k - 1];
        if delta * st.r[k - 1][k - 1] > proj {
            st.swap(k - 1, k);
            if k - 1 == 0 {
                st.r[0][0] = st.g(0, 0);
                k = 1;
            } else {
                k -= 1;
            }
        } else {
            k += 1;
        }
    }
    Some(Reduction { rows: st.rows, transform: st.transform })
}

/// Textbook LLL with exact rational Gram–Schmidt.
pub fn lll_rational(rows: Vec<Vec<BigInt>>, delta: f64) -> Reduction {
    let n = rows.len();
    let delta_q = Rational::from_float(delta).expect("finite delta");
    let half = Rational::new(BigInt::one(), BigInt::from(2));
    let mut b = rows;
    let mut u = identity(n);
    let to_q = |v: &[BigInt]| v.iter().map(|x| Rational::from_integer(x.clone())).collect::<Vec<_>>();
    let gso = |b: &[Vec<BigInt>]| {
        let mut star: Vec<Vec<Rational>> = Vec::with_capacity(n);
        let mut norms: Vec<Rational> = Vec::with_capacity(n);
        let mut mu = vec![vec![Rational::zero(); n]; n];
        for i in 0..n {
            let bi = to_q(&b[i]);
            let mut v = bi.clone();
            for j in 0..i {
                let num: Rational = bi.iter().zip(&star[j]).map(|(x, y)| x * y).sum();
                mu[i][j] = num / &norms[j];
                for (c, s) in v.iter_mut().zip(&star[j]) {
                    *c -= &mu[i][j] * s;
                }
            }
            norms.push(v.iter().map(|x| x * x).sum());
            star.push(v);
        }
        (norms, mu)
    };
    let (mut norms, mut mu) = gso(&b);
    let mut k = 1;
    while k < n {
        for j in (0..k).rev() {
            if mu[k][j].abs() > half {
                let x = mu[k][j].round().to_integer();
                let (bj, uj) = (b[j].clone(), u[j].clone());
                for (c, v) in b[k].iter_mut().zip(&bj) {
                    *c -= &x * v;
                }
                for (c, v) in u[k].iter_mut().zip(&uj) {
                    *c -= &x * v;
                }
                (norms, mu) = gso(&b);
            }
        }
        let lhs = &delta_q * &norms[k - 1];
        let rhs = &norms[k] + &mu[k][k - 1] * &mu[k][k - 1] * &norms[k - 1];
        if lhs > rhs {
            b.swap(k - 1, k);
            u.swap(k - 1, k);
            (norms, mu) = gso(&b);
            k = (k - 1).max(1);
        } else {
            k += 1;
        }
    }
    Reduction { rows: b, transform: u }
}

/// `A * B` for integer matrices.
pub fn mat_mul(a: &[Vec<BigInt>], b: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    a.iter().map(|row| (0..b[0].len()).map(|j| row.iter().zip(b).map(|(x, r)| x * &r[j]).sum()).collect()).collect()
}

/// Largest absolute entry, as log2 (0 for the zero matrix).
pub fn max_bits(m: &[Vec<BigInt>]) -> u64 {
    m.iter().flatten().map(|x| x.abs().bits()).max().unwrap_or(0)
}
