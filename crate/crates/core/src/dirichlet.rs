//! Dirichlet characters with exact root-of-unity values, Gauss sums,
//! generalized Bernoulli numbers and critical Dirichlet L-values.
//!
//! # Canonical order
//!
//! The unit group `(Z/N)^x` is written as a product of cyclic factors with
//! fixed generators, in increasing order of the prime: for `2^e` the factors
//! are `<-1>` (when `e >= 2`) and `<5>` (when `e >= 3`); for an odd prime
//! power `p^e` the factor is generated by the least positive primitive root
//! `g` mod `p` that remains primitive mod `p^2`. Each generator is lifted by
//! CRT to be `1` modulo the other prime powers. A character is determined by
//! digits `d_j` with `chi(g_j) = exp(2 pi i d_j / o_j)`, and its index is the
//! mixed-radix number `d_0 + o_0 (d_1 + o_1 (d_2 + ...))`. Index 0 is the
//! principal character.

use rug::ops::Pow;
use rug::{Complex, Rational};

use crate::arith::{crt, euler_phi, factorize, gcd, kronecker, lcm, modpow};
use crate::cyclo::Cyclo;
use crate::mp;
use crate::{Error, Result};

/// Generators of the cyclic factors of `(Z/n)^x` with their orders.
pub fn unit_group_generators(n: i64) -> Vec<(i64, u32)> {
    let fac = factorize(n);
    let mut gens = Vec::new();
    let moduli: Vec<i64> = fac.iter().map(|&(p, e)| p.pow(e)).collect();
    let lift = |g: i64, idx: usize| -> i64 {
        let parts: Vec<(i64, i64)> = moduli
            .iter()
            .enumerate()
            .map(|(j, &m)| if j == idx { (g.rem_euclid(m), m) } else { (1 % m, m) })
            .collect();
        crt(&parts).0
    };
    for (idx, &(p, e)) in fac.iter().enumerate() {
        let q = moduli[idx];
        if p == 2 {
            if e >= 2 {
                gens.push((lift(-1, idx), 2));
            }
            if e >= 3 {
                gens.push((lift(5, idx), 1 << (e - 2)));
            }
        } else {
            let g = primitive_root_prime_power(p);
            gens.push((lift(g, idx), (q / p * (p - 1)) as u32));
        }
    }
    gens
}

fn primitive_root_prime_power(p: i64) -> i64 {
    let phi_fac: Vec<i64> = factorize(p - 1).into_iter().map(|(q, _)| q).collect();
    let mut g = 2;
    loop {
        let is_root = phi_fac.iter().all(|&q| modpow(g, ((p - 1) / q) as u64, p) != 1);
        // primitive mod p^2 iff g^(p-1) != 1 mod p^2
        if is_root && modpow(g, (p - 1) as u64, p * p) != 1 {
            return g;
        }
        g += 1;
    }
}

/// A Dirichlet character with values in the `order`-th roots of unity.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DirichletChar {
    modulus: i64,
    order: u32,
    // exponent e with chi(n) = zeta_order^e, None when gcd(n, modulus) > 1
    table: Vec<Option<u32>>,
}

impl DirichletChar {
    /// Builds a character from exponents `e(n)` with `chi(n) = exp(2 pi i e(n)/order)`,
    /// checking complete multiplicativity.
    pub fn from_exponents(modulus: i64, order: u32, f: impl Fn(i64) -> i64) -> Result<Self> {
        if modulus < 1 || order < 1 {
            return Err(Error::InvalidCharacter(format!("modulus {modulus}, order {order}")));
        }
        let table: Vec<Option<u32>> = (0..modulus)
            .map(|n| {
                if gcd(n, modulus) == 1 {
                    Some(f(n).rem_euclid(order as i64) as u32)
                } else {
                    None
                }
            })
            .collect();
        let chi = Self::normalized(modulus, order, table);
        chi.check_multiplicative()?;
        Ok(chi)
    }

    fn normalized(modulus: i64, order: u32, table: Vec<Option<u32>>) -> Self {
        let g = table
            .iter()
            .flatten()
            .fold(order as i64, |acc, &e| gcd(acc, e as i64)) as u32;
        let table = table.into_iter().map(|e| e.map(|e| e / g)).collect();
        DirichletChar { modulus, order: order / g, table }
    }

    fn check_multiplicative(&self) -> Result<()> {
        let n = self.modulus;
        if self.table[(1 % n) as usize] != Some(0) {
            return Err(Error::InvalidCharacter("chi(1) != 1".into()));
        }
        for a in 1..n {
            let Some(ea) = self.table[a as usize] else { continue };
            for b in a..n {
                let Some(eb) = self.table[b as usize] else { continue };
                let ab = self.table[(a * b % n) as usize].unwrap();
                if (ea + eb) % self.order != ab {
                    return Err(Error::InvalidCharacter(format!(
                        "not multiplicative at {a} * {b} mod {n}"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn trivial(modulus: i64) -> Self {
        let modulus = modulus.max(1);
        let table = (0..modulus)
            .map(|n| (gcd(n, modulus) == 1).then_some(0))
            .collect();
        DirichletChar { modulus, order: 1, table }
    }

    /// The character with the given index in the canonical order.
    pub fn from_index(modulus: i64, index: u64) -> Result<Self> {
        if modulus < 1 {
            return Err(Error::InvalidCharacter(format!("modulus {modulus}")));
        }
        let total = euler_phi(modulus) as u64;
        if index >= total {
            return Err(Error::InvalidCharacter(format!(
                "index {index} out of range: there are {total} characters mod {modulus}"
            )));
        }
        let gens = unit_group_generators(modulus);
        let mut digits = Vec::with_capacity(gens.len());
        let mut rest = index;
        for &(_, o) in &gens {
            digits.push((rest % o as u64) as u32);
            rest /= o as u64;
        }
        Ok(Self::from_digits(modulus, &gens, &digits))
    }

    fn from_digits(modulus: i64, gens: &[(i64, u32)], digits: &[u32]) -> Self {
        let big = gens.iter().fold(1i64, |acc, &(_, o)| lcm(acc, o as i64)) as u32;
        let xs: Vec<u64> = gens
            .iter()
            .zip(digits)
            .map(|(&(_, o), &d)| d as u64 * (big / o) as u64)
            .collect();
        Self::from_generator_exponents(modulus, gens, big, &xs)
    }

    /// The character with `chi(g_j) = exp(2 pi i num_j / den_j)` on the canonical
    /// generators `g_j` of `(Z/modulus)^x`.
    pub fn from_generator_values(modulus: i64, values: &[(i64, i64)]) -> Result<Self> {
        if modulus < 1 {
            return Err(Error::InvalidCharacter(format!("modulus {modulus}")));
        }
        let gens = unit_group_generators(modulus);
        if values.len() != gens.len() {
            return Err(Error::InvalidCharacter(format!(
                "(Z/{modulus})^x has {} canonical generators {:?}, got {} values",
                gens.len(),
                gens.iter().map(|g| g.0).collect::<Vec<_>>(),
                values.len()
            )));
        }
        let mut big = 1i64;
        for &(num, den) in values {
            if den < 1 {
                return Err(Error::InvalidCharacter(format!("root of unity {num}/{den}")));
            }
            big = lcm(big, den);
        }
        let mut xs = Vec::new();
        for (&(g, o), &(num, den)) in gens.iter().zip(values) {
            let x = (num * (big / den)).rem_euclid(big);
            if (x * o as i64) % big != 0 {
                return Err(Error::InvalidCharacter(format!(
                    "value exp(2 pi i {num}/{den}) at generator {g} has order not dividing {o}"
                )));
            }
            xs.push(x as u64);
        }
        Ok(Self::from_generator_exponents(modulus, &gens, big as u32, &xs))
    }

    fn from_generator_exponents(modulus: i64, gens: &[(i64, u32)], big: u32, xs: &[u64]) -> Self {
        let mut table = vec![None; modulus as usize];
        // walk every element of the group as a product of generator powers
        let mut exps = vec![0u32; gens.len()];
        loop {
            let mut elt = 1 % modulus;
            let mut val = 0u64;
            for (j, &(g, _)) in gens.iter().enumerate() {
                elt = elt * modpow(g, exps[j] as u64, modulus) % modulus;
                val += xs[j] * exps[j] as u64;
            }
            table[elt as usize] = Some((val % big as u64) as u32);
            let mut j = 0;
            while j < gens.len() {
                exps[j] += 1;
                if exps[j] < gens[j].1 {
                    break;
                }
                exps[j] = 0;
                j += 1;
            }
            if j == gens.len() {
                break;
            }
        }
        Self::normalized(modulus, big, table)
    }

    /// Position of this character in the canonical order.
    pub fn index(&self) -> u64 {
        let gens = unit_group_generators(self.modulus);
        let mut idx = 0u64;
        for &(g, o) in gens.iter().rev() {
            let e = self.table[g as usize].unwrap() as u64;
            // chi(g) = zeta_order^e = zeta_o^d, with d = e * o / order
            let d = e * o as u64 / self.order as u64;
            idx = idx * o as u64 + d;
        }
        idx
    }

    /// All characters modulo `modulus`, in canonical order.
    pub fn all(modulus: i64) -> Vec<Self> {
        (0..euler_phi(modulus) as u64)
            .map(|i| Self::from_index(modulus, i).unwrap())
            .collect()
    }

    /// The Kronecker symbol `(d|.)` as a character modulo `modulus`.
    pub fn kronecker(d: i64, modulus: i64) -> Result<Self> {
        Self::from_exponents(modulus, 2, |n| if kronecker(d, n) == 1 { 0 } else { 1 }).and_then(|c| {
            if (0..modulus).all(|n| (kronecker(d, n) == 0) == (gcd(n, modulus) != 1)) {
                Ok(c)
            } else {
                Err(Error::InvalidCharacter(format!(
                    "({d}|.) is not a character modulo {modulus}"
                )))
            }
        })
    }

    pub fn modulus(&self) -> i64 {
        self.modulus
    }

    /// Order of the character; values lie in `Q(zeta_order)`.
    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn is_trivial(&self) -> bool {
        self.order == 1
    }

    /// Exponent `e` with `chi(n) = zeta_order^e`, or `None` if `gcd(n, N) > 1`.
    pub fn exponent(&self, n: i64) -> Option<u32> {
        self.table[n.rem_euclid(self.modulus) as usize]
    }

    pub fn value(&self, n: i64) -> Cyclo {
        match self.exponent(n) {
            Some(e) => Cyclo::root_of_unity(self.order, e as i64),
            None => Cyclo::zero(self.order),
        }
    }

    pub fn value_complex(&self, n: i64, prec: u32) -> Complex {
        match self.exponent(n) {
            Some(e) => mp::root_of_unity(self.order as i64, e as i64, prec),
            None => Complex::new(prec),
        }
    }

    /// `nu` with `chi(-1) = (-1)^nu`.
    pub fn parity(&self) -> u8 {
        match self.exponent(-1) {
            Some(0) => 0,
            _ => 1,
        }
    }

    pub fn conductor(&self) -> i64 {
        let n = self.modulus;
        for c in crate::arith::divisors(n) {
            let ok = (0..n / c).all(|j| {
                let m = 1 + j * c;
                gcd(m, n) != 1 || self.table[(m % n) as usize] == Some(0)
            });
            if ok {
                return c;
            }
        }
        n
    }

    pub fn is_primitive(&self) -> bool {
        self.conductor() == self.modulus
    }

    /// The primitive character inducing this one.
    pub fn primitive(&self) -> Self {
        let c = self.conductor();
        if c == self.modulus {
            return self.clone();
        }
        let n = self.modulus;
        let table = (0..c)
            .map(|r| {
                if gcd(r, c) != 1 {
                    return None;
                }
                let m = (0..).map(|j| r + j * c).find(|&m| gcd(m, n) == 1).unwrap();
                self.table[(m % n) as usize]
            })
            .collect();
        Self::normalized(c, self.order, table)
    }

    /// The character modulo `modulus` induced from this one; `modulus` must be a multiple of the conductor.
    pub fn induce(&self, modulus: i64) -> Result<Self> {
        let prim = self.primitive();
        let c = prim.modulus;
        if modulus % c != 0 {
            return Err(Error::InvalidCharacter(format!(
                "cannot induce a character of conductor {c} to modulus {modulus}"
            )));
        }
        let table = (0..modulus)
            .map(|n| if gcd(n, modulus) == 1 { prim.table[(n % c) as usize] } else { None })
            .collect();
        Ok(Self::normalized(modulus, prim.order, table))
    }

    /// Product character on the lcm of the moduli.
    pub fn mul(&self, other: &Self) -> Self {
        let m = lcm(self.modulus, other.modulus);
        let l = lcm(self.order as i64, other.order as i64) as u32;
        let (sa, sb) = (l / self.order, l / other.order);
        let table = (0..m)
            .map(|n| match (self.exponent(n), other.exponent(n)) {
                (Some(a), Some(b)) => Some((a * sa + b * sb) % l),
                _ => None,
            })
            .collect();
        Self::normalized(m, l, table)
    }

    pub fn pow(&self, k: i64) -> Self {
        let o = self.order as i64;
        let table = self
            .table
            .iter()
            .map(|e| e.map(|e| (e as i64 * k).rem_euclid(o) as u32))
            .collect();
        Self::normalized(self.modulus, self.order, table)
    }

    /// Complex conjugate character.
    pub fn conj(&self) -> Self {
        self.pow(-1)
    }

    /// `chi^sigma` for `sigma : zeta -> zeta^b` on the values.
    pub fn conjugate_char(&self, b: i64) -> Result<Self> {
        if gcd(b, self.order as i64) != 1 {
            return Err(Error::NotCoprime { b, order: self.order as i64 });
        }
        Ok(self.pow(b))
    }

    /// Exact Gauss sum `sum_{u mod c} chi_0(u) zeta_c^u` of the primitive part.
    pub fn gauss_sum_exact(&self) -> Cyclo {
        let prim = self.primitive();
        let c = prim.modulus;
        if c == 1 {
            return Cyclo::one(1);
        }
        let l = lcm(c, prim.order as i64);
        let (so, sc) = (l / prim.order as i64, l / c);
        let mut poly = vec![Rational::new(); l as usize];
        for u in 0..c {
            if let Some(e) = prim.table[u as usize] {
                poly[((e as i64 * so + u * sc) % l) as usize] += 1;
            }
        }
        Cyclo::from_poly(l as u32, poly)
    }

    pub fn gauss_sum(&self, prec: u32) -> Complex {
        self.gauss_sum_exact().to_complex(prec)
    }

    /// Generalized Bernoulli number `B_{m,chi} = c^{m-1} sum_{a=1}^{c} chi(a) B_m(a/c)`.
    pub fn bernoulli_gen(&self, m: usize) -> Result<Cyclo> {
        if !self.is_primitive() {
            return Err(Error::NotPrimitive {
                conductor: self.conductor(),
                modulus: self.modulus,
            });
        }
        let c = self.modulus;
        let mut poly = vec![Rational::new(); self.order as usize];
        for a in 1..=c {
            if let Some(e) = self.exponent(a) {
                poly[e as usize] += mp::bernoulli_poly(m, &Rational::from((a, c)));
            }
        }
        let scale = Rational::from(rug::Integer::from(c).pow(m as u32 - 1));
        Ok(Cyclo::from_poly(self.order, poly).scale(&scale))
    }

    /// The exact algebraic number `L_f(m, chi) / ((2 pi i)^m gamma(chi))`, including
    /// the Euler factors at primes dividing the modulus but not the conductor.
    pub fn l_value_quotient(&self, m: u32) -> Result<Cyclo> {
        let nu = self.parity();
        if m == 0 || (m as i64 - nu as i64) % 2 != 0 {
            return Err(Error::NonCriticalParity { m: m as i64, parity: nu });
        }
        let prim = self.primitive();
        if prim.modulus == 1 && m == 1 {
            return Err(Error::Pole("zeta(s) at s = 1".into()));
        }
        let c = prim.modulus;
        let b = prim.conj().bernoulli_gen(m as usize)?;
        let mut fact = rug::Integer::from(1);
        for j in 2..=m {
            fact *= j;
        }
        let den = Rational::from(rug::Integer::from(c).pow(m) * fact * 2u32);
        let sign = if m % 2 == 1 { 1 } else { -1 };
        // (-1)^{1+(m-nu)/2} / (2 i^nu c^m m!) * (2 pi/c)^m ... divided by (2 pi i)^m
        let mut q = b.scale(&(Rational::from(sign) / den));
        for (p, _) in factorize(self.modulus) {
            if c % p != 0 {
                let local = prim.value(p).scale(&Rational::from((1, rug::Integer::from(p).pow(m))));
                q = &q * &(Cyclo::one(local.order()) - local);
            }
        }
        Ok(q)
    }

    /// `L_f(m, chi)` at a critical integer `m`.
    pub fn dirichlet_l(&self, m: u32, prec: u32) -> Result<Complex> {
        let wp = prec + mp::GUARD_BITS;
        let q = self.l_value_quotient(m)?.to_complex(wp);
        let tpi = Complex::with_val(wp, mp::two_pi_i(wp).pow(m));
        let g = self.gauss_sum(wp);
        Ok(Complex::with_val(prec, q * tpi * g))
    }
}

/// Exact `gamma(chi1) gamma(chi2) / gamma(chi1 chi2)`.
pub fn gauss_quotient_exact(chi1: &DirichletChar, chi2: &DirichletChar) -> Cyclo {
    let num = &chi1.gauss_sum_exact() * &chi2.gauss_sum_exact();
    let den = chi1.mul(chi2).gauss_sum_exact();
    num.div(&den).expect("Gauss sums of primitive characters are nonzero").lower()
}

pub fn gauss_quotient(chi1: &DirichletChar, chi2: &DirichletChar, prec: u32) -> Complex {
    gauss_quotient_exact(chi1, chi2).to_complex(prec)
}
