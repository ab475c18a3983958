//! Imaginary quadratic fields `K = Q(sqrt(D))`: ideals by norm, splitting of
//! primes, units and the quadratic character `omega_K`.

use std::collections::HashMap;

use serde::Serialize;

use crate::arith::{
    crt, factorize, gcd, is_fundamental_discriminant, is_prime, isqrt, kronecker, modinv,
    sqrt_mod_prime,
};
use crate::dirichlet::DirichletChar;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct QuadField {
    disc: i64,
    class_number: i64,
    unit_count: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Splitting {
    Split,
    Inert,
    Ramified,
}

/// The element `(u + v sqrt(D)) / 2` of the ring of integers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct QuadInt {
    pub u: i64,
    pub v: i64,
}

impl QuadInt {
    pub fn new(u: i64, v: i64) -> Self {
        QuadInt { u, v }
    }

    pub fn from_int(n: i64) -> Self {
        QuadInt { u: 2 * n, v: 0 }
    }

    pub fn norm(&self, disc: i64) -> i64 {
        (self.u * self.u - disc * self.v * self.v) / 4
    }

    pub fn mul(&self, other: &Self, disc: i64) -> Self {
        // ((u1 u2 + D v1 v2) + (u1 v2 + u2 v1) sqrt D) / 4, halved back to the (u, v)/2 form
        QuadInt {
            u: (self.u * other.u + disc * self.v * other.v) / 2,
            v: (self.u * other.v + other.u * self.v) / 2,
        }
    }

    pub fn conj(&self) -> Self {
        QuadInt { u: self.u, v: -self.v }
    }

    pub fn neg(&self) -> Self {
        QuadInt { u: -self.u, v: -self.v }
    }
}

/// An integral ideal `c * [a, (b + sqrt(D))/2]` with the primitive part in
/// Hermite normal form: `a > 0`, `0 <= b < 2a`, `b^2 = D (mod 4a)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct QuadIdeal {
    pub content: i64,
    pub a: i64,
    pub b: i64,
}

impl QuadIdeal {
    pub fn unit(disc: i64) -> Self {
        QuadIdeal { content: 1, a: 1, b: disc.rem_euclid(2) }
    }

    pub fn norm(&self) -> i64 {
        self.content * self.content * self.a
    }

    pub fn is_primitive(&self) -> bool {
        self.content == 1
    }

    pub fn is_unit(&self) -> bool {
        self.content == 1 && self.a == 1
    }

    /// The Galois conjugate ideal.
    pub fn conj(&self) -> Self {
        QuadIdeal {
            content: self.content,
            a: self.a,
            b: (-self.b).rem_euclid(2 * self.a),
        }
    }

    pub fn contains(&self, x: &QuadInt) -> bool {
        // x = c (s a + t (b + sqrt D)/2): t = v / c, s a = (u - v b / ... )
        let c = self.content;
        if x.u % c != 0 || x.v % c != 0 {
            return false;
        }
        let (u, v) = (x.u / c, x.v / c);
        if (u - v * self.b).rem_euclid(2) != 0 {
            return false;
        }
        ((u - v * self.b) / 2).rem_euclid(self.a) == 0
    }
}

impl QuadField {
    pub fn new(disc: i64) -> Result<Self> {
        if disc >= 0 || !is_fundamental_discriminant(disc) {
            return Err(Error::NotFundamental(disc));
        }
        let unit_count = match disc {
            -3 => 6,
            -4 => 4,
            _ => 2,
        };
        Ok(QuadField { disc, class_number: class_number(disc), unit_count })
    }

    pub fn disc(&self) -> i64 {
        self.disc
    }

    pub fn class_number(&self) -> i64 {
        self.class_number
    }

    pub fn unit_count(&self) -> u32 {
        self.unit_count
    }

    pub fn units(&self) -> Vec<QuadInt> {
        match self.disc {
            -4 => vec![QuadInt::new(2, 0), QuadInt::new(0, 1), QuadInt::new(-2, 0), QuadInt::new(0, -1)],
            -3 => vec![
                QuadInt::new(2, 0),
                QuadInt::new(1, 1),
                QuadInt::new(-1, 1),
                QuadInt::new(-2, 0),
                QuadInt::new(-1, -1),
                QuadInt::new(1, -1),
            ],
            _ => vec![QuadInt::new(2, 0), QuadInt::new(-2, 0)],
        }
    }

    pub fn prime_splitting(&self, p: i64) -> Result<Splitting> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(match kronecker(self.disc, p) {
            0 => Splitting::Ramified,
            1 => Splitting::Split,
            _ => Splitting::Inert,
        })
    }

    /// The Kronecker symbol `(D|.)` as a character modulo `|D|`.
    pub fn omega_k(&self) -> DirichletChar {
        DirichletChar::kronecker(self.disc, self.disc.abs()).expect("fundamental discriminant")
    }

    /// All `b` in `[0, 2a)` with `b^2 = D (mod 4a)`.
    fn roots(&self, a: i64, cache: &mut HashMap<(i64, u32), Vec<i64>>) -> Vec<i64> {
        let d = self.disc;
        let mut parts: Vec<(Vec<i64>, i64)> = Vec::new();
        for (p, e) in factorize(a) {
            let local = cache
                .entry((p, e))
                .or_insert_with(|| {
                    if p == 2 {
                        // b mod 2^{e+1} with b^2 = D mod 2^{e+2}
                        let m = 1i64 << (e + 1);
                        let mm = 4 * (1i64 << e);
                        (0..m).filter(|b| (b * b - d).rem_euclid(mm) == 0).collect()
                    } else if d % p != 0 {
                        // two roots mod p, lifted by Newton's iteration
                        let Some(r) = sqrt_mod_prime(d, p) else { return Vec::new() };
                        let q = p.pow(e);
                        let mut rs: Vec<i64> = [r, p - r]
                            .into_iter()
                            .map(|mut b| {
                                let mut pk = p;
                                while pk < q {
                                    pk = (pk * pk).min(q);
                                    let f = ((b as i128 * b as i128 - d as i128).rem_euclid(pk as i128)) as i64;
                                    let inv = modinv(2 * b % pk, pk).unwrap();
                                    b = (b as i128 - f as i128 * inv as i128).rem_euclid(pk as i128) as i64;
                                }
                                b
                            })
                            .collect();
                        rs.sort_unstable();
                        rs.dedup();
                        rs
                    } else {
                        let q = p.pow(e);
                        (0..q).filter(|b| (b * b - d).rem_euclid(q) == 0).collect()
                    }
                })
                .clone();
            let m = if p == 2 { 1i64 << (e + 1) } else { p.pow(e) };
            if local.is_empty() {
                return Vec::new();
            }
            parts.push((local, m));
        }
        if a % 2 == 1 {
            // the 2-part: b = D (mod 2)
            parts.push((vec![d.rem_euclid(2)], 2));
        }
        let mut out = vec![(0i64, 1i64)];
        for (local, m) in parts {
            let mut next = Vec::with_capacity(out.len() * local.len());
            for &(x, mx) in &out {
                for &r in &local {
                    next.push(crt(&[(x, mx), (r, m)]));
                }
            }
            out = next;
        }
        let mut bs: Vec<i64> = out.into_iter().map(|(x, _)| x).collect();
        bs.sort_unstable();
        bs
    }

    /// Primitive ideals of norm `a`.
    pub fn primitive_ideals_of_norm(&self, a: i64) -> Vec<QuadIdeal> {
        let mut cache = HashMap::new();
        self.roots(a, &mut cache)
            .into_iter()
            .map(|b| QuadIdeal { content: 1, a, b })
            .collect()
    }

    /// Every integral ideal of norm at most `bound`, each exactly once, sorted by norm.
    pub fn enumerate_ideals_by_norm(&self, bound: i64) -> Vec<(QuadIdeal, i64)> {
        let mut cache = HashMap::new();
        let mut prim: Vec<Vec<i64>> = vec![Vec::new(); bound.max(0) as usize + 1];
        for a in 1..=bound {
            prim[a as usize] = self.roots(a, &mut cache);
        }
        let mut out = Vec::new();
        for n in 1..=bound {
            let mut c = 1;
            while c * c <= n {
                if n % (c * c) == 0 {
                    let a = n / (c * c);
                    for &b in &prim[a as usize] {
                        out.push((QuadIdeal { content: c, a, b }, n));
                    }
                }
                c += 1;
            }
        }
        out
    }

    pub fn ideals_of_norm(&self, n: i64) -> Vec<QuadIdeal> {
        let mut out = Vec::new();
        let mut c = 1;
        while c * c <= n {
            if n % (c * c) == 0 {
                for mut id in self.primitive_ideals_of_norm(n / (c * c)) {
                    id.content = c;
                    out.push(id);
                }
            }
            c += 1;
        }
        out
    }

    /// A generator of a (necessarily principal) ideal when `h(D) = 1`.
    pub fn generator(&self, ideal: &QuadIdeal) -> Result<QuadInt> {
        if self.class_number != 1 {
            return Err(Error::ClassNumberUnsupported {
                disc: self.disc,
                class_number: self.class_number,
            });
        }
        let a = ideal.a;
        let dabs = self.disc.abs();
        let prim = QuadIdeal { content: 1, ..*ideal };
        let mut v = 0;
        while dabs * v * v <= 4 * a {
            let u2 = 4 * a - dabs * v * v;
            let u = isqrt(u2);
            if u * u == u2 {
                for cand in [QuadInt::new(u, v), QuadInt::new(-u, v)] {
                    if prim.contains(&cand) {
                        let c = ideal.content;
                        return Ok(QuadInt::new(cand.u * c, cand.v * c));
                    }
                }
            }
            v += 1;
        }
        Err(Error::Invalid(format!("no generator found for {ideal:?}")))
    }

    /// Whether `ideal` is coprime to the primitive ideal `f`.
    pub fn coprime(&self, ideal: &QuadIdeal, f: &QuadIdeal) -> bool {
        if f.is_unit() {
            return true;
        }
        // for h = 1 both are principal: compare via generators and residues
        let g = match self.generator(ideal) {
            Ok(g) => g,
            Err(_) => return gcd(ideal.norm(), f.norm()) == 1,
        };
        residue_mod(&g, f).map(|r| gcd(r, f.a) == 1).unwrap_or(false)
    }
}

/// Image of `x` under `O_K -> O_K / f = Z / a` for a primitive ideal `f = [a, (b + sqrt D)/2]`.
pub fn residue_mod(x: &QuadInt, f: &QuadIdeal) -> Option<i64> {
    if !f.is_primitive() {
        return None;
    }
    let t = x.u - x.v * f.b;
    debug_assert!(t.rem_euclid(2) == 0);
    Some((t / 2).rem_euclid(f.a))
}

/// Number of reduced positive definite forms of discriminant `d`.
pub fn class_number(d: i64) -> i64 {
    let mut h = 0;
    let mut a = 1;
    while 3 * a * a <= -d {
        for b in -a + 1..=a {
            let num = b * b - d;
            if num % (4 * a) != 0 {
                continue;
            }
            let c = num / (4 * a);
            if c < a {
                continue;
            }
            if b < 0 && a == c {
                continue;
            }
            if gcd(gcd(a, b), c) == 1 {
                h += 1;
            }
        }
        a += 1;
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn class_numbers() {
        for d in [-3, -4, -7, -8, -11, -19, -43, -67, -163] {
            assert_eq!(class_number(d), 1, "{d}");
        }
        assert_eq!(class_number(-15), 2);
        assert_eq!(class_number(-20), 2);
        assert_eq!(class_number(-23), 3);
        assert_eq!(class_number(-56), 4);
    }

    #[test]
    fn rejects_non_fundamental() {
        assert!(QuadField::new(-12).is_err());
        assert!(QuadField::new(5).is_err());
        assert!(QuadField::new(-1).is_err());
    }

    #[test]
    fn units_and_splitting() {
        let k = QuadField::new(-4).unwrap();
        assert_eq!(k.unit_count(), 4);
        assert!(k.units().iter().all(|u| u.norm(-4) == 1));
        assert_eq!(k.prime_splitting(2).unwrap(), Splitting::Ramified);
        assert_eq!(k.prime_splitting(5).unwrap(), Splitting::Split);
        assert_eq!(k.prime_splitting(3).unwrap(), Splitting::Inert);
        assert!(k.prime_splitting(9).is_err());
        let k3 = QuadField::new(-3).unwrap();
        assert!(k3.units().iter().all(|u| u.norm(-3) == 1));
    }

    #[test]
    fn generators_generate() {
        for d in [-3, -4, -7, -8, -163] {
            let k = QuadField::new(d).unwrap();
            for (id, n) in k.enumerate_ideals_by_norm(60) {
                let g = k.generator(&id).unwrap();
                assert_eq!(g.norm(d), n);
                assert!(id.contains(&g));
            }
        }
    }
}
