use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::interval::{precision_ladder, Interval, MAX_PRECISION_BITS};
use crate::linalg;
use crate::scalar::Rational;

use super::{AlgebraicNumber, TotallyRealField};

/// Rows are the embedding vectors of the basis elements.
#[derive(Debug, Clone)]
pub struct OrbitMatrix {
    entries: Vec<Vec<Interval>>,
    source_basis: Vec<AlgebraicNumber>,
    precision_bits: u32,
}

impl OrbitMatrix {
    pub fn entries(&self) -> &[Vec<Interval>] {
        &self.entries
    }

    pub fn source_basis(&self) -> &[AlgebraicNumber] {
        &self.source_basis
    }

    pub fn precision_bits(&self) -> u32 {
        self.precision_bits
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn field(&self) -> &Arc<TotallyRealField> {
        self.source_basis[0].field()
    }

    pub fn to_f64(&self) -> Vec<Vec<f64>> {
        self.entries.iter().map(|r| r.iter().map(|x| x.to_f64()).collect()).collect()
    }

    /// Recompute the matrix at a higher precision.
    pub fn refined(&self, bits: u32) -> Result<OrbitMatrix> {
        if bits <= self.precision_bits {
            return Ok(self.clone());
        }
        orbit_matrix(&self.source_basis, bits)
    }

    /// Entries as integers `round(x * 2^scale)`, with the entry error bound
    /// below `1` in those units when `scale <= precision_bits`.
    pub fn fixed_point(&self, scale: u32) -> Vec<Vec<BigInt>> {
        self.entries.iter().map(|r| r.iter().map(|x| x.mid().floor_scaled(scale as i64)).collect()).collect()
    }

    /// Permute the rows (reorders the basis of the module).
    pub fn permute_rows(&self, perm: &[usize]) -> OrbitMatrix {
        OrbitMatrix {
            entries: perm.iter().map(|&i| self.entries[i].clone()).collect(),
            source_basis: perm.iter().map(|&i| self.source_basis[i].clone()).collect(),
            precision_bits: self.precision_bits,
        }
    }

    /// Determinant enclosure (Leibniz expansion in interval arithmetic).
    pub fn det_enclosure(&self) -> Interval {
        interval_det(&self.entries, self.precision_bits + 64)
    }
}

pub(crate) fn interval_det(m: &[Vec<Interval>], prec: u32) -> Interval {
    let n = m.len();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut total = Interval::from_int(0);
    permutations(&mut perm, 0, &mut |p| {
        let mut term = Interval::from_int(if parity(p) { -1 } else { 1 });
        for (i, &j) in p.iter().enumerate() {
            term = term.mul(&m[i][j], prec);
        }
        total = total.add(&term, prec);
    });
    total
}

fn permutations(p: &mut Vec<usize>, k: usize, f: &mut impl FnMut(&[usize])) {
    if k == p.len() {
        f(p);
        return;
    }
    for i in k..p.len() {
        p.swap(k, i);
        permutations(p, k + 1, f);
        p.swap(k, i);
    }
}

fn parity(p: &[usize]) -> bool {
    let mut odd = false;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            if p[i] > p[j] {
                odd = !odd;
            }
        }
    }
    odd
}

/// Orbit matrix of a Q-basis of the field, rows `phi(alpha_i)`.
pub fn orbit_matrix(basis: &[AlgebraicNumber], bits: u32) -> Result<OrbitMatrix> {
    let Some(first) = basis.first() else { return Err(Error::NotABasis) };
    let d = first.field().degree();
    if basis.len() != d {
        return Err(Error::NotABasis);
    }
    let coeff_matrix: linalg::RatMatrix = basis.iter().map(|a| a.coeffs().to_vec()).collect();
    if linalg::rank(&coeff_matrix) < d {
        return Err(Error::NotABasis);
    }
    for prec in precision_ladder(bits) {
        let entries: Vec<Vec<Interval>> = basis.iter().map(|a| a.embed(prec)).collect::<Result<_>>()?;
        let m = OrbitMatrix { entries, source_basis: basis.to_vec(), precision_bits: prec };
        if !m.det_enclosure().contains_zero() {
            return Ok(m);
        }
    }
    Err(Error::exhausted(MAX_PRECISION_BITS, "orbit matrix determinant"))
}

/// `m^{i_j} * alpha_j` for each basis element.
pub fn rescale_basis(basis: &[AlgebraicNumber], m: i64, exponents: &[i64]) -> Result<Vec<AlgebraicNumber>> {
    if m == 0 || m == 1 || m == -1 {
        return Err(Error::BadScalar(m));
    }
    if exponents.len() != basis.len() {
        return Err(Error::DegenerateInput(format!("{} exponents for a basis of {}", exponents.len(), basis.len())));
    }
    let mb = BigInt::from(m);
    Ok(basis
        .iter()
        .zip(exponents)
        .map(|(a, &e)| {
            let p = num_traits::pow(mb.clone(), e.unsigned_abs() as usize);
            let s = if e >= 0 { Rational::from_integer(p) } else { Rational::new(BigInt::from(1), p) };
            a.scale(&s)
        })
        .collect())
}

/// Exact squared determinant of the orbit matrix, `det(Tr(a_i a_j))`.
pub fn orbit_det_squared(basis: &[AlgebraicNumber]) -> Rational {
    let gram: linalg::RatMatrix = basis.iter().map(|a| basis.iter().map(|b| (a * b).trace()).collect()).collect();
    let det = linalg::det(&gram);
    debug_assert!(!det.is_negative() || det.is_zero());
    det
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numfield::make_field;

    #[test]
    fn sqrt2_orbit_matrix() {
        let k = make_field(&[-2, 0, 1]).unwrap();
        let basis = vec![k.int(1), k.generator()];
        let g = orbit_matrix(&basis, 128).unwrap();
        let m = g.to_f64();
        assert_eq!(m[0], vec![1.0, 1.0]);
        assert!((m[1][0] + 2f64.sqrt()).abs() < 1e-15 && (m[1][1] - 2f64.sqrt()).abs() < 1e-15);
        let det = g.det_enclosure().to_f64();
        assert!((det.abs() - 2.0 * 2f64.sqrt()).abs() < 1e-14);
        assert_eq!(orbit_det_squared(&basis), Rational::from_integer(8.into()));
    }

    #[test]
    fn dependent_basis_rejected() {
        let k = make_field(&[-2, 0, 1]).unwrap();
        assert!(matches!(orbit_matrix(&[k.int(1), k.int(2)], 64), Err(Error::NotABasis)));
    }

    #[test]
    fn cubic_vandermonde_discriminant() {
        let k = make_field(&[-1, -2, 1, 1]).unwrap();
        let b = k.generator();
        let basis = vec![k.int(1), b.clone(), &b * &b];
        assert_eq!(orbit_det_squared(&basis), Rational::from_integer(49.into()));
        let det = orbit_matrix(&basis, 128).unwrap().det_enclosure().to_f64();
        assert!((det * det - 49.0).abs() < 1e-10);
    }

    #[test]
    fn rescale() {
        let k = make_field(&[-2, 0, 1]).unwrap();
        let basis = vec![k.int(1), k.generator()];
        let r = rescale_basis(&basis, 2, &[0, 3]).unwrap();
        assert_eq!(r[1], AlgebraicNumber::from_ints(&k, &[0, 8]));
        assert_eq!(rescale_basis(&basis, 2, &[0, 0]).unwrap(), basis);
        assert!(matches!(rescale_basis(&basis, -1, &[0, 1]), Err(Error::BadScalar(-1))));
    }
}
