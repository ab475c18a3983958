//! Exact arithmetic in cyclotomic fields `Q(zeta_L)`.
//!
//! Elements are stored on the power basis `1, z, ..., z^{phi(L)-1}` with
//! `z = exp(2 pi i / L)`, reduced modulo the cyclotomic polynomial.
//! Operands of different orders are promoted to the lcm of their orders.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use rug::{Complex, Float, Integer, Rational};
use serde::{Deserialize, Serialize};

use crate::arith::{divisors, gcd, lcm};

fn cyclotomic_poly(n: u32) -> Arc<Vec<Integer>> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Arc<Vec<Integer>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(p) = cache.lock().unwrap().get(&n) {
        return p.clone();
    }
    // x^n - 1 divided by Phi_d for every proper divisor d
    let mut num: Vec<Integer> = vec![Integer::new(); n as usize + 1];
    num[0] = Integer::from(-1);
    num[n as usize] = Integer::from(1);
    for d in divisors(n as i64) {
        if d as u32 == n {
            continue;
        }
        let den = cyclotomic_poly(d as u32);
        num = exact_div_monic(&num, &den);
    }
    let p = Arc::new(num);
    cache.lock().unwrap().insert(n, p.clone());
    p
}

fn exact_div_monic(num: &[Integer], den: &[Integer]) -> Vec<Integer> {
    let dn = den.len() - 1;
    let mut rem = num.to_vec();
    let qlen = num.len() - dn;
    let mut q = vec![Integer::new(); qlen];
    for i in (0..qlen).rev() {
        let c = rem[i + dn].clone();
        if c != 0 {
            for (j, dj) in den.iter().enumerate() {
                rem[i + j] -= Integer::from(&c * dj);
            }
        }
        q[i] = c;
    }
    debug_assert!(rem.iter().all(|c| *c == 0));
    q
}

/// An element of the cyclotomic field `Q(zeta_order)`.
#[derive(Clone, Debug)]
pub struct Cyclo {
    order: u32,
    coeffs: Vec<Rational>,
}

impl Cyclo {
    pub fn degree_of(order: u32) -> usize {
        cyclotomic_poly(order).len() - 1
    }

    pub fn zero(order: u32) -> Self {
        let order = order.max(1);
        Cyclo {
            order,
            coeffs: vec![Rational::new(); Self::degree_of(order)],
        }
    }

    pub fn from_rational(order: u32, q: impl Into<Rational>) -> Self {
        let mut z = Self::zero(order);
        z.coeffs[0] = q.into();
        z
    }

    pub fn one(order: u32) -> Self {
        Self::from_rational(order, 1)
    }

    /// `zeta_order^exp`.
    pub fn root_of_unity(order: u32, exp: i64) -> Self {
        let order = order.max(1);
        let e = exp.rem_euclid(order as i64) as usize;
        let mut poly = vec![Rational::new(); e + 1];
        poly[e] = Rational::from(1);
        Self::from_poly(order, poly)
    }

    /// Reduces an arbitrary polynomial in `zeta_order` to normal form.
    pub fn from_poly(order: u32, mut poly: Vec<Rational>) -> Self {
        let order = order.max(1);
        let phi = cyclotomic_poly(order);
        let deg = phi.len() - 1;
        if poly.len() > deg {
            for i in (deg..poly.len()).rev() {
                if poly[i] == 0 {
                    continue;
                }
                let c = std::mem::take(&mut poly[i]);
                for (j, pj) in phi.iter().enumerate().take(deg) {
                    if *pj != 0 {
                        poly[i - deg + j] -= Rational::from(&c * pj);
                    }
                }
            }
            poly.truncate(deg);
        }
        poly.resize(deg, Rational::new());
        Cyclo { order, coeffs: poly }
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == 0)
    }

    /// The rational value, if the element lies in `Q`.
    pub fn as_rational(&self) -> Option<Rational> {
        let lowered = self.lower();
        if lowered.order == 1 || lowered.order == 2 {
            Some(lowered.coeffs[0].clone())
        } else {
            None
        }
    }

    /// Re-expresses the element in `Q(zeta_target)`; `target` must be a multiple of the order.
    pub fn promote(&self, target: u32) -> Self {
        assert!(
            target.is_multiple_of(self.order),
            "cannot embed Q(zeta_{}) into Q(zeta_{})",
            self.order,
            target
        );
        if target == self.order {
            return self.clone();
        }
        let step = (target / self.order) as usize;
        let mut poly = vec![Rational::new(); step * self.coeffs.len().max(1)];
        for (i, c) in self.coeffs.iter().enumerate() {
            poly[i * step] = c.clone();
        }
        Self::from_poly(target, poly)
    }

    /// Moves the element into the smallest `Q(zeta_d)`, d | order, containing it.
    pub fn lower(&self) -> Self {
        for d in divisors(self.order as i64) {
            let d = d as u32;
            if d == self.order {
                break;
            }
            // Candidate: only powers that are multiples of order/d survive after
            // rewriting in the basis of Q(zeta_order); test by projection.
            if let Some(c) = self.try_descend(d) {
                return c;
            }
        }
        self.clone()
    }

    fn try_descend(&self, d: u32) -> Option<Self> {
        // An element lies in Q(zeta_d) iff it is fixed by every sigma_b with b = 1 mod d.
        let n = self.order as i64;
        for b in 1..n {
            if gcd(b, n) == 1 && (b - 1) % d as i64 == 0 && b != 1 && self.conjugate(b) != *self {
                return None;
            }
        }
        // Fixed: recover coordinates in Q(zeta_d) by solving through the trace-free
        // representation: average over the subgroup then read off coefficients.
        let step = (self.order / d) as usize;
        let deg_d = Self::degree_of(d);
        // Build basis images zeta_d^j = z^{j*step} and solve the triangular-ish system
        // by Gaussian elimination over Q.
        let deg_n = self.coeffs.len();
        let mut cols: Vec<Vec<Rational>> = (0..deg_d)
            .map(|j| Cyclo::root_of_unity(self.order, (j * step) as i64).coeffs)
            .collect();
        let mut rhs = self.coeffs.clone();
        // Solve cols * x = rhs (overdetermined, consistent).
        let mut x = vec![Rational::new(); deg_d];
        let mut pivots = Vec::new();
        let mut row = 0;
        let mut mat: Vec<Vec<Rational>> = (0..deg_n)
            .map(|r| cols.iter().map(|c| c[r].clone()).collect())
            .collect();
        for col in 0..deg_d {
            let Some(p) = (row..deg_n).find(|&r| mat[r][col] != 0) else {
                continue;
            };
            mat.swap(row, p);
            rhs.swap(row, p);
            let inv = Rational::from(1) / mat[row][col].clone();
            for c in col..deg_d {
                mat[row][c] *= &inv;
            }
            rhs[row] *= &inv;
            for r in 0..deg_n {
                if r != row && mat[r][col] != 0 {
                    let f = mat[r][col].clone();
                    for c in col..deg_d {
                        let t = Rational::from(&f * &mat[row][c]);
                        mat[r][c] -= t;
                    }
                    let t = Rational::from(&f * &rhs[row]);
                    rhs[r] -= t;
                }
            }
            pivots.push((row, col));
            row += 1;
        }
        cols.clear();
        for (r, c) in pivots {
            x[c] = rhs[r].clone();
        }
        if rhs[row..].iter().any(|v| *v != 0) {
            return None;
        }
        Some(Cyclo {
            order: d,
            coeffs: x,
        })
    }

    fn unify(a: &Cyclo, b: &Cyclo) -> (Cyclo, Cyclo) {
        if a.order == b.order {
            return (a.clone(), b.clone());
        }
        let l = lcm(a.order as i64, b.order as i64) as u32;
        (a.promote(l), b.promote(l))
    }

    pub fn scale(&self, q: &Rational) -> Self {
        Cyclo {
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| Rational::from(c * q)).collect(),
        }
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut acc = Cyclo::one(self.order);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Galois action `sigma_b : zeta_order -> zeta_order^b`; `b` must be a unit mod the order.
    pub fn conjugate(&self, b: i64) -> Self {
        let n = self.order as i64;
        assert_eq!(gcd(b, n), 1, "sigma_{b} is not an automorphism of Q(zeta_{n})");
        let b = b.rem_euclid(n) as usize;
        let mut poly = vec![Rational::new(); (self.coeffs.len().max(1) - 1) * b + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            if *c != 0 {
                let e = (i * b) % n as usize;
                if e >= poly.len() {
                    poly.resize(e + 1, Rational::new());
                }
                poly[e] += c;
            }
        }
        Self::from_poly(self.order, poly)
    }

    /// Complex conjugation.
    pub fn conj(&self) -> Self {
        if self.order <= 2 {
            return self.clone();
        }
        self.conjugate(-1)
    }

    /// Field norm down to `Q`.
    pub fn norm(&self) -> Rational {
        let n = self.order as i64;
        let mut acc = Cyclo::one(self.order);
        for b in 1..=n.max(1) {
            if gcd(b, n) == 1 {
                acc = &acc * &self.conjugate(b);
            }
        }
        acc.as_rational().expect("norm is rational")
    }

    pub fn inverse(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let n = self.order as i64;
        let mut acc = Cyclo::one(self.order);
        for b in 2..n {
            if gcd(b, n) == 1 {
                acc = &acc * &self.conjugate(b);
            }
        }
        let norm = (&acc * self).as_rational().expect("norm is rational");
        Some(acc.scale(&(Rational::from(1) / norm)))
    }

    pub fn div(&self, other: &Cyclo) -> Option<Self> {
        other.inverse().map(|inv| self * &inv)
    }

    /// Complex embedding with `zeta_order = exp(2 pi i / order)`.
    pub fn to_complex(&self, prec: u32) -> Complex {
        let wp = prec + 16;
        let mut acc = Complex::new(wp);
        let zeta = crate::mp::root_of_unity(self.order as i64, 1, wp);
        let mut pw = Complex::with_val(wp, 1);
        for c in &self.coeffs {
            if *c != 0 {
                let term = Complex::with_val(wp, &pw * Float::with_val(wp, c));
                acc += term;
            }
            pw *= &zeta;
        }
        Complex::with_val(prec, acc)
    }

    /// Coefficients rendered as strings `p/q`, for serialization.
    pub fn to_record(&self) -> CycloRecord {
        CycloRecord {
            order: self.order,
            coefficients: self.coeffs.iter().map(|c| c.to_string()).collect(),
        }
    }

    pub fn from_record(rec: &CycloRecord) -> Result<Self, String> {
        let coeffs = rec
            .coefficients
            .iter()
            .map(|s| s.parse::<Rational>().map_err(|e| format!("bad coefficient {s:?}: {e}")))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self::from_poly(rec.order, coeffs))
    }
}

/// Serialized form of a cyclotomic element.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CycloRecord {
    pub order: u32,
    pub coefficients: Vec<String>,
}

impl PartialEq for Cyclo {
    fn eq(&self, other: &Self) -> bool {
        let (a, b) = Cyclo::unify(self, other);
        a.coeffs == b.coeffs
    }
}

impl Eq for Cyclo {}

impl fmt::Display for Cyclo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if *c == 0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})*z{}", self.order)?,
                _ => write!(f, "({c})*z{}^{i}", self.order)?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl Add for &Cyclo {
    type Output = Cyclo;
    fn add(self, rhs: &Cyclo) -> Cyclo {
        let (mut a, b) = Cyclo::unify(self, rhs);
        for (x, y) in a.coeffs.iter_mut().zip(&b.coeffs) {
            *x += y;
        }
        a
    }
}

impl Sub for &Cyclo {
    type Output = Cyclo;
    fn sub(self, rhs: &Cyclo) -> Cyclo {
        let (mut a, b) = Cyclo::unify(self, rhs);
        for (x, y) in a.coeffs.iter_mut().zip(&b.coeffs) {
            *x -= y;
        }
        a
    }
}

impl Neg for &Cyclo {
    type Output = Cyclo;
    fn neg(self) -> Cyclo {
        Cyclo {
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| Rational::from(-c)).collect(),
        }
    }
}

impl Mul for &Cyclo {
    type Output = Cyclo;
    fn mul(self, rhs: &Cyclo) -> Cyclo {
        let (a, b) = Cyclo::unify(self, rhs);
        let n = a.coeffs.len();
        if n == 0 {
            return a;
        }
        let mut poly = vec![Rational::new(); 2 * n - 1];
        for (i, x) in a.coeffs.iter().enumerate() {
            if *x == 0 {
                continue;
            }
            for (j, y) in b.coeffs.iter().enumerate() {
                if *y != 0 {
                    poly[i + j] += Rational::from(x * y);
                }
            }
        }
        Cyclo::from_poly(a.order, poly)
    }
}

impl Add for Cyclo {
    type Output = Cyclo;
    fn add(self, rhs: Cyclo) -> Cyclo {
        &self + &rhs
    }
}

impl Sub for Cyclo {
    type Output = Cyclo;
    fn sub(self, rhs: Cyclo) -> Cyclo {
        &self - &rhs
    }
}

impl Mul for Cyclo {
    type Output = Cyclo;
    fn mul(self, rhs: Cyclo) -> Cyclo {
        &self * &rhs
    }
}

impl Neg for Cyclo {
    type Output = Cyclo;
    fn neg(self) -> Cyclo {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclotomic_polynomials() {
        let p12: Vec<i64> = cyclotomic_poly(12).iter().map(|c| c.to_i64().unwrap()).collect();
        assert_eq!(p12, vec![1, 0, -1, 0, 1]);
        let p7: Vec<i64> = cyclotomic_poly(7).iter().map(|c| c.to_i64().unwrap()).collect();
        assert_eq!(p7, vec![1; 7]);
        assert_eq!(Cyclo::degree_of(1), 1);
        assert_eq!(Cyclo::degree_of(2), 1);
    }

    #[test]
    fn roots_of_unity_multiply() {
        let z = Cyclo::root_of_unity(7, 3);
        let w = Cyclo::root_of_unity(7, 5);
        assert_eq!(&z * &w, Cyclo::root_of_unity(7, 1));
        assert_eq!(z.pow(7), Cyclo::one(7));
        let i = Cyclo::root_of_unity(4, 1);
        assert_eq!(&i * &i, Cyclo::from_rational(4, -1));
    }

    #[test]
    fn mixed_orders_promote() {
        let i = Cyclo::root_of_unity(4, 1);
        let z3 = Cyclo::root_of_unity(3, 1);
        let p = &i * &z3;
        assert_eq!(p.order(), 12);
        assert_eq!(p, Cyclo::root_of_unity(12, 3 + 4));
        assert_eq!(Cyclo::root_of_unity(6, 3), Cyclo::from_rational(1, -1));
    }

    #[test]
    fn inverse_and_norm() {
        let x = &Cyclo::root_of_unity(5, 1) + &Cyclo::from_rational(5, 2);
        let inv = x.inverse().unwrap();
        assert_eq!(&x * &inv, Cyclo::one(5));
        // N(2 + z) over Q(zeta_5) = Phi_5(-2) = 11
        assert_eq!(x.norm(), Rational::from(11));
    }

    #[test]
    fn lower_detects_rational_and_subfields() {
        let z = Cyclo::root_of_unity(8, 1);
        let sqrt2 = &z + &z.conjugate(7);
        let two = &sqrt2 * &sqrt2;
        assert_eq!(two.as_rational(), Some(Rational::from(2)));
        assert!(sqrt2.as_rational().is_none());
        let i = Cyclo::root_of_unity(12, 3);
        assert_eq!(i.lower().order(), 4);
    }

    #[test]
    fn embedding() {
        let i = Cyclo::root_of_unity(4, 1).to_complex(128);
        assert!(i.real().clone().abs() < 1e-30);
        assert!((i.imag().clone() - 1u32).abs() < 1e-30);
    }
}
