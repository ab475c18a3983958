//! The theta series `phi_chi = sum_a lambda(a) q^{N a}` of a Hecke character.

use rayon::prelude::*;
use rug::ops::Pow;
use rug::{Complex, Rational};

use crate::arith::{factorize, gcd, is_prime};
use crate::cyclo::Cyclo;
use crate::dirichlet::DirichletChar;
use crate::hecke::HeckeChar;
use crate::qfield::Splitting;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CMForm {
    chi: HeckeChar,
}

/// Local factor `1 - a_p X + c_2 X^2` with `c_2 = omega(p) p^{k-1}` at good primes
/// and `c_2 = 0` at primes dividing the level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EulerFactor {
    pub p: i64,
    pub a_p: Cyclo,
    pub c2: Cyclo,
    pub good: bool,
    /// `(alpha_p, beta_p)` when they lie in the value field (split and bad primes).
    pub roots: Option<(Cyclo, Cyclo)>,
}

impl EulerFactor {
    /// Coefficients of `1 - a_p X + c_2 X^2`.
    pub fn poly(&self) -> Vec<Cyclo> {
        vec![Cyclo::one(1), -&self.a_p, self.c2.clone()]
    }
}

impl CMForm {
    pub fn new(chi: HeckeChar) -> Self {
        CMForm { chi }
    }

    pub fn character(&self) -> &HeckeChar {
        &self.chi
    }

    pub fn weight(&self) -> u32 {
        self.chi.weight()
    }

    pub fn level(&self) -> i64 {
        self.chi.level()
    }

    pub fn nebentypus(&self) -> DirichletChar {
        self.chi.nebentypus()
    }

    pub fn is_good(&self, p: i64) -> bool {
        self.level() % p != 0
    }

    /// `a_n` as a sum of `lambda` over ideals of norm `n`.
    pub fn coefficient(&self, n: i64) -> Cyclo {
        let order = self.chi.value_order();
        self.chi
            .field()
            .ideals_of_norm(n)
            .iter()
            .fold(Cyclo::zero(order), |acc, id| &acc + &self.chi.lambda(id))
    }

    /// `a_1, ..., a_bound`.
    pub fn fourier_coeffs(&self, bound: usize) -> Vec<Cyclo> {
        let order = self.chi.value_order();
        let ideals = self.chi.field().enumerate_ideals_by_norm(bound as i64);
        let values: Vec<Cyclo> = ideals.par_iter().map(|(id, _)| self.chi.lambda(id)).collect();
        let mut out = vec![Cyclo::zero(order); bound];
        for ((_, n), v) in ideals.iter().zip(values) {
            let slot = &mut out[*n as usize - 1];
            *slot = &*slot + &v;
        }
        out
    }

    /// Complex embeddings of `a_1, ..., a_bound`, built multiplicatively from prime powers.
    pub fn coeffs_complex(&self, bound: usize, prec: u32) -> Vec<Complex> {
        let primes = crate::arith::primes_below(bound as i64 + 1);
        let prime_powers: Vec<(i64, Vec<Complex>)> = primes
            .par_iter()
            .map(|&p| {
                let mut pows = Vec::new();
                let mut q = p;
                while q <= bound as i64 {
                    pows.push(self.coefficient(q).to_complex(prec));
                    q = match q.checked_mul(p) {
                        Some(v) => v,
                        None => break,
                    };
                }
                (p, pows)
            })
            .collect();
        let mut out = vec![Complex::with_val(prec, 1); bound];
        for (p, pows) in &prime_powers {
            let mut q = *p;
            for v in pows {
                let mut m = q;
                while m <= bound as i64 {
                    if (m / q) % p != 0 {
                        out[m as usize - 1] *= v;
                    }
                    m += q;
                }
                q *= p;
            }
        }
        out
    }

    pub fn euler_factor(&self, p: i64) -> Result<EulerFactor> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        let field = self.chi.field();
        let a_p = self.coefficient(p);
        let good = self.is_good(p);
        let ideals = field.ideals_of_norm(p);
        if !good {
            let roots = Some((a_p.clone(), Cyclo::zero(1)));
            return Ok(EulerFactor { p, a_p, c2: Cyclo::zero(1), good, roots });
        }
        let pk = Rational::from(rug::Integer::from(p).pow(self.chi.infinity_weight()));
        let c2 = self.nebentypus().value(p).scale(&pk);
        let roots = match field.prime_splitting(p)? {
            Splitting::Split => {
                let prim: Vec<_> = ideals.iter().filter(|i| i.is_primitive()).collect();
                Some((self.chi.lambda(prim[0]), self.chi.lambda(prim[1])))
            }
            _ => None,
        };
        Ok(EulerFactor { p, a_p, c2, good, roots })
    }

    /// The form attached to `chi (xi o N)`; requires the conductor of `xi` coprime to the level.
    pub fn twist(&self, xi: &DirichletChar) -> Result<CMForm> {
        let c = xi.conductor();
        if gcd(c, self.level()) != 1 {
            return Err(Error::TwistNotCoprime { twist: c, level: self.level() });
        }
        Ok(CMForm::new(self.chi.twist_by_norm(&xi.primitive())))
    }

    /// Checks `omega_K(n) a_n = a_n` for `n <= bound` coprime to the discriminant.
    pub fn omega_k_self_twist(&self, bound: usize) -> bool {
        let w = self.chi.field().omega_k();
        let d = self.chi.field().disc();
        self.fourier_coeffs(bound).iter().enumerate().all(|(i, a)| {
            let n = i as i64 + 1;
            gcd(n, d) != 1 || &w.value(n) * a == *a
        })
    }

    /// Primes dividing the level.
    pub fn bad_primes(&self) -> Vec<i64> {
        factorize(self.level()).into_iter().map(|(p, _)| p).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hecke::CharSpec;

    fn form(d: i64, k: u32) -> CMForm {
        CMForm::new(HeckeChar::from_spec(&CharSpec::unramified(d, k)).unwrap())
    }

    #[test]
    fn small_coefficients() {
        let f = form(-7, 3);
        let a = f.fourier_coeffs(12);
        assert_eq!(a[0].as_rational(), Some(Rational::from(1)));
        assert_eq!(a[1].as_rational(), Some(Rational::from(-3)));
        assert!(a[2].is_zero());
        assert_eq!(f.level(), 7);
        assert_eq!(f.nebentypus().conductor(), 7);
    }

    #[test]
    fn euler_factor_cases() {
        let f = form(-7, 3);
        let inert = f.euler_factor(3).unwrap();
        assert!(inert.a_p.is_zero());
        assert_eq!(inert.c2.as_rational(), Some(Rational::from(-9)));
        let split = f.euler_factor(2).unwrap();
        let (al, be) = split.roots.clone().unwrap();
        assert_eq!(&al + &be, split.a_p);
        assert_eq!(&al * &be, split.c2);
        let ram = f.euler_factor(7).unwrap();
        assert!(!ram.good && ram.c2.is_zero());
    }

    #[test]
    fn numeric_coefficients_match() {
        let f = form(-7, 3);
        let exact = f.fourier_coeffs(60);
        let num = f.coeffs_complex(60, 128);
        for (e, z) in exact.iter().zip(&num) {
            let d = Complex::with_val(128, &e.to_complex(128) - z);
            assert!(d.abs().real().to_f64() < 1e-30);
        }
    }

    #[test]
    fn twist_restrictions() {
        let f = form(-7, 3);
        let w = f.character().field().omega_k();
        assert!(matches!(f.twist(&w), Err(Error::TwistNotCoprime { .. })));
        assert!(f.twist(&DirichletChar::trivial(1)).unwrap().fourier_coeffs(30) == f.fourier_coeffs(30));
    }
}
