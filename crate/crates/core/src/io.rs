//! Text formats: number rendering, rational parsing, field and basis files.

use std::path::Path;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numfield::{AlgebraicNumber, TotallyRealField};
use crate::scalar::Rational;

/// Shortest round-trip decimal; scientific outside `[1e-5, 1e16)`.
pub fn fmt_f64(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || (1e-5..1e16).contains(&a) || !x.is_finite() {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

/// Exact rational as `"num/den"`.
pub fn fmt_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parses `"a/b"`, integers, decimals (`"0.25"`, `"5e-2"`) and powers (`"3^-2"`).
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Config(format!("cannot parse rational {s:?}"));
    if let Some((n, d)) = s.split_once('/') {
        let n = parse_rational(n)?;
        let d = parse_rational(d)?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(n / d);
    }
    if let Some((b, e)) = s.split_once('^') {
        let b: BigInt = b.trim().parse().map_err(|_| bad())?;
        let e: i32 = e.trim().parse().map_err(|_| bad())?;
        let p = Rational::from_integer(num_traits::pow(b, e.unsigned_abs() as usize));
        return if e >= 0 { Ok(p) } else if p.is_zero() { Err(bad()) } else { Ok(p.recip()) };
    }
    let (mant, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (neg, mant) = match mant.strip_prefix('-') {
        Some(m) => (true, m),
        None => (false, mant.strip_prefix('+').unwrap_or(mant)),
    };
    let (int, frac) = mant.split_once('.').unwrap_or((mant, ""));
    if int.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    let digits = format!("{int}{frac}");
    if !digits.chars().all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let n: BigInt = digits.parse().map_err(|_| bad())?;
    let e10 = exp - frac.len() as i32;
    let ten = BigInt::from(10);
    let scale = Rational::from_integer(num_traits::pow(ten, e10.unsigned_abs() as usize));
    let mut r = Rational::from_integer(n);
    r = if e10 >= 0 { r * scale } else { r / scale };
    Ok(if neg { -r } else { r })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Number {
    Int(i64),
    Float(f64),
    Text(String),
}

impl Number {
    pub fn to_rational(&self) -> Result<Rational> {
        match self {
            Number::Int(i) => Ok(Rational::from_integer((*i).into())),
            Number::Float(f) => Rational::from_float(*f).ok_or_else(|| Error::Config(format!("non-finite number {f}"))),
            Number::Text(s) => parse_rational(s),
        }
    }

    pub fn to_integer(&self) -> Result<BigInt> {
        let r = self.to_rational()?;
        if !r.is_integer() {
            return Err(Error::Config(format!("expected an integer, got {}", fmt_rational(&r))));
        }
        Ok(r.to_integer())
    }
}

/// Field specification file: `min_poly = [c0, ..., cd]`, `identity_root_index = j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldSpec {
    pub min_poly: Vec<Number>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub identity_root_index: Option<usize>,
}

impl FieldSpec {
    pub fn from_str_any(text: &str, path_hint: &str) -> Result<Self> {
        if path_hint.ends_with(".json") || text.trim_start().starts_with('{') {
            serde_json::from_str(text).map_err(|e| Error::Config(format!("{path_hint}: {e}")))
        } else {
            toml::from_str(text).map_err(|e| Error::Config(format!("{path_hint}: {e}")))
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_str_any(&text, &path.display().to_string())
    }

    pub fn build(&self) -> Result<Arc<TotallyRealField>> {
        let coeffs = self.min_poly.iter().map(Number::to_integer).collect::<Result<Vec<_>>>()?;
        TotallyRealField::new(coeffs, self.identity_root_index)
    }
}

/// Basis file: `{"elements": [[c0, c1, ...], ...]}` with power-basis
/// coefficients, numbers or `"num/den"` strings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasisSpec {
    pub elements: Vec<Vec<Number>>,
}

impl BasisSpec {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn build(&self, field: &Arc<TotallyRealField>) -> Result<Vec<AlgebraicNumber>> {
        self.elements
            .iter()
            .map(|e| {
                if e.len() > field.degree() {
                    return Err(Error::Config(format!("element has {} coefficients, field degree {}", e.len(), field.degree())));
                }
                let c = e.iter().map(Number::to_rational).collect::<Result<Vec<_>>>()?;
                Ok(AlgebraicNumber::from_coeffs(field, c))
            })
            .collect()
    }

    pub fn from_elements(elements: &[AlgebraicNumber]) -> Self {
        BasisSpec { elements: elements.iter().map(|a| a.coeffs().iter().map(|c| Number::Text(fmt_rational(c))).collect()).collect() }
    }
}

/// Element as exact `"num/den"` coefficient strings.
pub fn element_to_strings(x: &AlgebraicNumber) -> Vec<String> {
    x.coeffs().iter().map(fmt_rational).collect()
}

/// Row-major matrix of numbers or rational strings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixSpec {
    pub rows: Vec<Vec<Number>>,
}

impl MatrixSpec {
    pub fn to_rational(&self) -> Result<Vec<Vec<Rational>>> {
        self.rows.iter().map(|r| r.iter().map(Number::to_rational).collect()).collect()
    }

    pub fn to_f64(&self) -> Result<Vec<Vec<f64>>> {
        Ok(self.to_rational()?.iter().map(|r| r.iter().map(|x| num_traits::ToPrimitive::to_f64(x).unwrap_or(f64::NAN)).collect()).collect())
    }
}

/// Parses an expression in the field generator `b`: sums and differences of
/// terms `c`, `c*b^k`, `b^k`, `c b`, with rational `c`.
pub fn parse_element(expr: &str, field: &Arc<TotallyRealField>) -> Result<AlgebraicNumber> {
    let bad = |m: &str| Error::Config(format!("cannot parse element {expr:?}: {m}"));
    let s: String = expr.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err(bad("empty"));
    }
    let mut terms = Vec::new();
    let mut start = 0;
    let bytes = s.as_bytes();
    for i in 1..bytes.len() {
        let prev = bytes[i - 1];
        if (bytes[i] == b'+' || bytes[i] == b'-') && prev != b'^' && prev != b'e' && prev != b'E' {
            terms.push(&s[start..i]);
            start = i;
        }
    }
    terms.push(&s[start..]);
    let mut acc = field.int(0);
    let b = field.generator();
    for t in terms {
        let (neg, body) = match t.strip_prefix('-') {
            Some(r) => (true, r),
            None => (false, t.strip_prefix('+').unwrap_or(t)),
        };
        let (coef, power) = match body.find('b') {
            None => (parse_rational(body)?, 0u64),
            Some(i) => {
                let c = body[..i].trim_end_matches('*');
                let c = if c.is_empty() { Rational::one() } else { parse_rational(c)? };
                let rest = &body[i + 1..];
                let k = if rest.is_empty() {
                    1
                } else {
                    rest.strip_prefix('^').ok_or_else(|| bad("expected ^ after b"))?.parse::<u64>().map_err(|_| bad("bad exponent"))?
                };
                (c, k)
            }
        };
        let term = b.pow(power).scale(&coef);
        acc = if neg { &acc - &term } else { &acc + &term };
    }
    Ok(acc)
}

/// Comma-separated list parsing for CLI values.
pub fn parse_list<T: std::str::FromStr>(s: &str) -> Result<Vec<T>> {
    s.split(',')
        .filter(|x| !x.trim().is_empty())
        .map(|x| x.trim().parse::<T>().map_err(|_| Error::Config(format!("cannot parse list item {x:?}"))))
        .collect()
}

/// Joins CSV fields; fields never contain commas in our formats.
pub fn csv_line(fields: &[String]) -> String {
    let mut s = fields.join(",");
    s.push('\n');
    s
}
