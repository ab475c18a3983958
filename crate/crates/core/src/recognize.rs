//! Recognizing algebraic numbers from high-precision approximations.
//!
//! A candidate relation is accepted only if its residual is below `2^{-prec/2}` and it is
//! significant: `-log2(residual) - (d + 1) log2(H) >= prec / 8` for degree `d` and height `H`.
//! A random vector of that size cannot beat the second bound, so false positives need an
//! unreasonably lucky lattice.

use rug::ops::Pow;
use rug::{Complex, Float, Integer, Rational};
use serde::{Serialize, Serializer};

use crate::cyclo::Cyclo;
use crate::mp;

pub const DEFAULT_MAX_HEIGHT: i64 = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Recognized,
    NotFound,
}

#[derive(Clone, Debug, Serialize)]
pub struct RecognitionResult {
    /// Integer coefficients, constant term first.
    #[serde(serialize_with = "ser_ints")]
    pub poly: Vec<Integer>,
    pub residual: f64,
    #[serde(serialize_with = "ser_int")]
    pub height: Integer,
    pub verdict: Verdict,
}

fn ser_ints<S: Serializer>(v: &[Integer], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|x| x.to_string()))
}

fn ser_int<S: Serializer>(v: &Integer, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

impl RecognitionResult {
    pub fn is_recognized(&self) -> bool {
        self.verdict == Verdict::Recognized
    }

    /// The root `-c_0 / c_1` of a recognized linear polynomial.
    pub fn as_rational(&self) -> Option<Rational> {
        if self.poly.len() == 2 && self.is_recognized() && self.poly[1] != 0 {
            Some(Rational::from((-self.poly[0].clone(), self.poly[1].clone())))
        } else {
            None
        }
    }

    fn not_found() -> Self {
        RecognitionResult {
            poly: Vec::new(),
            residual: f64::INFINITY,
            height: Integer::new(),
            verdict: Verdict::NotFound,
        }
    }
}

/// Integral LLL with `delta = 3/4` (exact arithmetic on Gram determinants).
pub fn lll(basis: &mut [Vec<Integer>]) {
    let n = basis.len();
    if n < 2 {
        return;
    }
    let dot = |a: &[Integer], b: &[Integer]| -> Integer {
        a.iter().zip(b).fold(Integer::new(), |acc, (x, y)| acc + Integer::from(x * y))
    };
    // d[i + 1] is the Gram determinant of the first i + 1 vectors, d[0] = 1
    let mut d = vec![Integer::from(1); n + 1];
    let mut lam = vec![vec![Integer::new(); n]; n];
    d[1] = dot(&basis[0], &basis[0]);
    let mut k = 1usize;
    let mut kmax = 0usize;
    while k < n {
        if k > kmax {
            kmax = k;
            for j in 0..=k {
                let mut u = dot(&basis[k], &basis[j]);
                for i in 0..j {
                    u = (Integer::from(&d[i + 1] * &u) - Integer::from(&lam[k][i] * &lam[j][i])) / &d[i];
                }
                if j < k {
                    lam[k][j] = u;
                } else {
                    d[k + 1] = u;
                }
            }
        }
        reduce(basis, &mut lam, &d, k, k - 1);
        let lhs = Integer::from(&d[k + 1] * &d[k - 1]) * 4u32;
        let rhs = Integer::from(d[k].square_ref()) * 3u32 - Integer::from(lam[k][k - 1].square_ref()) * 4u32;
        if lhs < rhs {
            swap(basis, &mut lam, &mut d, k, kmax);
            k = k.max(2) - 1;
        } else {
            for l in (0..k.saturating_sub(1)).rev() {
                reduce(basis, &mut lam, &d, k, l);
            }
            k += 1;
        }
    }
}

fn reduce(basis: &mut [Vec<Integer>], lam: &mut [Vec<Integer>], d: &[Integer], k: usize, l: usize) {
    let twice = Integer::from(&lam[k][l] * 2u32);
    if Integer::from(twice.abs_ref()) <= d[l + 1] {
        return;
    }
    // q = round(lam / d)
    let (q, _) = Integer::from(&twice + &d[l + 1]).div_rem_floor(Integer::from(&d[l + 1] * 2u32));
    let bl = basis[l].clone();
    for (x, y) in basis[k].iter_mut().zip(&bl) {
        *x -= Integer::from(&q * y);
    }
    lam[k][l] -= Integer::from(&q * &d[l + 1]);
    for i in 0..l {
        let t = Integer::from(&q * &lam[l][i]);
        lam[k][i] -= t;
    }
}

fn swap(basis: &mut [Vec<Integer>], lam: &mut [Vec<Integer>], d: &mut [Integer], k: usize, kmax: usize) {
    basis.swap(k, k - 1);
    for j in 0..k.saturating_sub(1) {
        let t = lam[k][j].clone();
        lam[k][j] = lam[k - 1][j].clone();
        lam[k - 1][j] = t;
    }
    let l = lam[k][k - 1].clone();
    let b = (Integer::from(&d[k - 1] * &d[k + 1]) + Integer::from(l.square_ref())) / &d[k];
    for i in k + 1..=kmax {
        let t = lam[i][k].clone();
        lam[i][k] = (Integer::from(&d[k + 1] * &lam[i][k - 1]) - Integer::from(&l * &t)) / &d[k];
        lam[i][k - 1] = (Integer::from(&b * &t) + Integer::from(&l * &lam[i][k])) / &d[k + 1];
    }
    d[k] = b;
}

/// Smallest integer relation among `values` found by LLL, returned with the relation vector.
fn integer_relation(values: &[Complex], prec: u32) -> Vec<Integer> {
    let n = values.len();
    let maxabs = values
        .iter()
        .map(mp::log2_abs)
        .filter(|x| x.is_finite())
        .fold(0f64, f64::max);
    let bits = (prec as f64 - maxabs - 8.0).max(16.0) as u32;
    let scale = Float::with_val(prec + 64, Float::i_exp(1, bits as i32));
    let to_int = |x: &Float| -> Integer {
        Float::with_val(prec + 64, x * &scale).round().to_integer().unwrap_or_default()
    };
    let mut basis: Vec<Vec<Integer>> = (0..n)
        .map(|i| {
            let mut row = vec![Integer::new(); n + 2];
            row[i] = Integer::from(1);
            row[n] = to_int(values[i].real());
            row[n + 1] = to_int(values[i].imag());
            row
        })
        .collect();
    lll(&mut basis);
    basis[0][..n].to_vec()
}

fn height(poly: &[Integer]) -> Integer {
    poly.iter().map(|c| Integer::from(c.abs_ref())).max().unwrap_or_default()
}

/// `|sum c_i v_i| / sum |c_i v_i|`.
fn relation_residual(coeffs: &[Integer], values: &[Complex], prec: u32) -> f64 {
    let mut acc = Complex::new(prec);
    let mut size = Float::new(prec);
    for (c, v) in coeffs.iter().zip(values) {
        let t = Complex::with_val(prec, v * c);
        size += Float::with_val(prec, t.abs_ref());
        acc += t;
    }
    if size.is_zero() {
        return f64::INFINITY;
    }
    (Float::with_val(prec, acc.abs_ref()) / size).to_f64()
}

fn significant(residual: f64, h: &Integer, count: usize, prec: u32, max_height: i64) -> bool {
    if *h == 0 || *h > max_height || !(residual < 2f64.powi(-(prec as i32) / 2)) {
        return false;
    }
    let lr = if residual == 0.0 { prec as f64 } else { -residual.log2() };
    let lh = h.to_f64().log2();
    lr - count as f64 * lh >= prec as f64 / 8.0
}

fn normalize(mut poly: Vec<Integer>) -> Vec<Integer> {
    let g = poly.iter().fold(Integer::new(), |acc, c| acc.gcd(c));
    if g > 1 {
        for c in poly.iter_mut() {
            *c /= &g;
        }
    }
    while poly.len() > 1 && poly.last().map(|c| *c == 0).unwrap_or(false) {
        poly.pop();
    }
    if poly.last().map(|c| *c < 0).unwrap_or(false) {
        for c in poly.iter_mut() {
            *c = Integer::from(-&*c);
        }
    }
    poly
}

/// Best rational approximation `p/q` with `q <= max_den` from the continued fraction of `x`.
pub fn continued_fraction(x: &Float, max_den: &Integer) -> Rational {
    let prec = x.prec();
    let (mut p0, mut q0, mut p1, mut q1) = (Integer::from(0), Integer::from(1), Integer::from(1), Integer::from(0));
    let mut y = x.clone();
    let mut best = Rational::from(0);
    for _ in 0..prec {
        let a = Float::with_val(prec, y.floor_ref()).to_integer().unwrap_or_default();
        let p2 = Integer::from(&a * &p1) + &p0;
        let q2 = Integer::from(&a * &q1) + &q0;
        if q2 > *max_den {
            break;
        }
        best = Rational::from((p2.clone(), q2.clone()));
        let frac = Float::with_val(prec, &y - &a);
        if frac.is_zero() {
            break;
        }
        y = Float::with_val(prec, frac.recip_ref());
        p0 = std::mem::replace(&mut p1, p2);
        q0 = std::mem::replace(&mut q1, q2);
    }
    best
}

/// Searches for a minimal polynomial of degree at most `max_degree` and height at most
/// `max_height` vanishing at `z`.
pub fn recognize_algebraic(z: &Complex, max_degree: usize, max_height: i64, prec: u32) -> RecognitionResult {
    let z = Complex::with_val(prec, z);
    let mut best = RecognitionResult::not_found();
    let imag_small = mp::log2_abs(&Complex::with_val(prec, z.imag())) < mp::log2_abs(&z) - prec as f64 / 2.0
        || z.imag().is_zero();
    if imag_small {
        let r = continued_fraction(z.real(), &Integer::from(max_height));
        let poly = normalize(vec![Integer::from(-r.numer()), r.denom().clone()]);
        let res = relation_residual(&poly, &[Complex::with_val(prec, 1), z.clone()], prec);
        let h = height(&poly);
        let res = if z.is_zero() { 0.0 } else { res };
        let cand = RecognitionResult {
            verdict: if significant(res, &h, 2, prec, max_height) { Verdict::Recognized } else { Verdict::NotFound },
            poly,
            residual: res,
            height: h,
        };
        if cand.is_recognized() {
            return cand;
        }
        best = cand;
    }
    for d in 1..=max_degree {
        let powers: Vec<Complex> = (0..=d).map(|j| mp::complex_pow_int(&z, j as i64, prec)).collect();
        let rel = integer_relation(&powers, prec);
        let poly = normalize(rel);
        if poly.len() < 2 {
            continue;
        }
        let res = relation_residual(&poly, &powers, prec);
        let h = height(&poly);
        let ok = significant(res, &h, d + 1, prec, max_height);
        let cand = RecognitionResult {
            verdict: if ok { Verdict::Recognized } else { Verdict::NotFound },
            poly,
            residual: res,
            height: h,
        };
        if ok {
            return cand;
        }
        if !best.residual.is_finite() || cand.residual < best.residual {
            best = cand;
        }
    }
    best
}

/// Writes `z` as `sum_j c_j zeta_order^j`, `j < phi(order)`, with rational `c_j` of height at
/// most `max_height`.
pub fn recognize_in_field(z: &Complex, order: u32, max_height: i64, prec: u32) -> Option<Cyclo> {
    let deg = Cyclo::degree_of(order);
    let mut values = vec![Complex::with_val(prec, z)];
    for j in 0..deg {
        values.push(mp::root_of_unity(order as i64, j as i64, prec));
    }
    // the integer relation c z = sum c_j zeta^j is c z - sum c_j zeta^j = 0
    let rel = integer_relation(&values, prec);
    let res = relation_residual(&rel, &values, prec);
    let h = height(&rel);
    if rel[0] == 0 || !significant(res, &h, deg + 1, prec, max_height) {
        return None;
    }
    let den = rel[0].clone();
    let coeffs: Vec<Rational> = rel[1..].iter().map(|c| Rational::from((Integer::from(-c), den.clone()))).collect();
    Some(Cyclo::from_poly(order, coeffs))
}

/// `z^e` for a possibly negative integer exponent.
pub fn powi(z: &Complex, e: i64, prec: u32) -> Complex {
    if e >= 0 {
        Complex::with_val(prec, Complex::with_val(prec, z).pow(e as u32))
    } else {
        Complex::with_val(prec, Complex::with_val(prec, z).pow(-e as u32)).recip()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rug::float::Constant;

    #[test]
    fn half_and_sqrt_two() {
        let r = recognize_algebraic(&Complex::with_val(256, 0.5), 1, DEFAULT_MAX_HEIGHT, 256);
        assert!(r.is_recognized());
        assert_eq!(r.poly, vec![Integer::from(-1), Integer::from(2)]);
        let s2 = Complex::with_val(256, Float::with_val(256, 2).sqrt());
        let r = recognize_algebraic(&s2, 4, DEFAULT_MAX_HEIGHT, 256);
        assert!(r.is_recognized());
        assert_eq!(r.poly, vec![Integer::from(-2), Integer::from(0), Integer::from(1)]);
    }

    #[test]
    fn pi_not_found() {
        let pi = Complex::with_val(256, Float::with_val(256, Constant::Pi));
        let r = recognize_algebraic(&pi, 8, DEFAULT_MAX_HEIGHT, 256);
        assert!(!r.is_recognized());
    }

    #[test]
    fn gaussian_element() {
        // (3 - 2i) / 7
        let z = Complex::with_val(256, (Rational::from((3, 7)), Rational::from((-2, 7))));
        let c = recognize_in_field(&z, 4, DEFAULT_MAX_HEIGHT, 256).unwrap();
        assert_eq!(c, Cyclo::from_poly(4, vec![Rational::from((3, 7)), Rational::from((-2, 7))]));
        let r = recognize_algebraic(&z, 2, DEFAULT_MAX_HEIGHT, 256);
        assert!(r.is_recognized());
        assert_eq!(r.poly, vec![Integer::from(13), Integer::from(-42), Integer::from(49)]);
    }

    #[test]
    fn lll_reduces_small_example() {
        let mut b = vec![
            vec![Integer::from(1), Integer::from(1), Integer::from(1)],
            vec![Integer::from(-1), Integer::from(0), Integer::from(2)],
            vec![Integer::from(3), Integer::from(5), Integer::from(6)],
        ];
        lll(&mut b);
        assert_eq!(b[0], vec![Integer::from(0), Integer::from(1), Integer::from(0)]);
    }
}
