//! Hecke characters of class number one imaginary quadratic fields with
//! infinity type `(z/|z|)^{k-1}`, packaged algebraically as
//! `lambda((alpha)) = eps(alpha mod f) xi(N alpha) alpha^{k-1}`.

use serde::{Deserialize, Serialize};

use crate::arith::{gcd, kronecker, lcm};
use crate::cyclo::Cyclo;
use crate::dirichlet::{unit_group_generators, DirichletChar};
use crate::qfield::{residue_mod, QuadField, QuadIdeal, QuadInt};
use crate::{Error, Result};

/// JSON description of a character.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CharSpec {
    pub disc: i64,
    pub weight_k: u32,
    /// Primitive conductor `[a, b]`, meaning `[a, (b + sqrt D)/2]`. The unit
    /// ideal may be written `[1, 0]` for any `D`.
    #[serde(default = "unit_conductor")]
    pub conductor: [i64; 2],
    /// `[num, den]` per canonical generator of `(Z/a)^x = (O_K/f)^x`, the value
    /// being `exp(2 pi i num/den)`.
    #[serde(default)]
    pub finite_part: Vec<[i64; 2]>,
    /// Optional Dirichlet character `[modulus, index]` composed with the norm.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub norm_twist: Option<[i64; 2]>,
    /// Reserved for values on class group generators (class number > 1).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub class_group_values: Option<serde_json::Value>,
}

fn unit_conductor() -> [i64; 2] {
    [1, 0]
}

impl CharSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Invalid(format!("character spec: {e}")))
    }

    pub fn unramified(disc: i64, weight_k: u32) -> Self {
        CharSpec {
            disc,
            weight_k,
            conductor: [1, disc.rem_euclid(2)],
            finite_part: Vec::new(),
            norm_twist: None,
            class_group_values: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeckeChar {
    field: QuadField,
    weight: u32,
    conductor: QuadIdeal,
    eps: DirichletChar,
    xi: DirichletChar,
    // infinity type conj(z)^{k-1} instead of z^{k-1}
    conjugated: bool,
    sqrt_d: Cyclo,
}

impl HeckeChar {
    pub fn from_spec(spec: &CharSpec) -> Result<Self> {
        let field = QuadField::new(spec.disc)?;
        if field.class_number() != 1 {
            return Err(Error::ClassNumberUnsupported {
                disc: spec.disc,
                class_number: field.class_number(),
            });
        }
        if spec.class_group_values.is_some() {
            return Err(Error::Unsupported(
                "class_group_values: class number one fields only".into(),
            ));
        }
        if spec.weight_k < 2 {
            return Err(Error::Invalid(format!("weight_k = {} must be at least 2", spec.weight_k)));
        }
        let [a, mut b] = spec.conductor;
        // the unit ideal has a single normal form; accept [1, 0] for it too
        if a == 1 && b == 0 {
            b = spec.disc.rem_euclid(2);
        }
        if a < 1 || b < 0 || b >= 2 * a || (b * b - spec.disc).rem_euclid(4 * a) != 0 {
            return Err(Error::Invalid(format!(
                "conductor [{a}, {b}] is not a primitive ideal in normal form for D = {}",
                spec.disc
            )));
        }
        let values: Vec<(i64, i64)> = spec.finite_part.iter().map(|v| (v[0], v[1])).collect();
        let eps = if values.is_empty() && unit_group_generators(a).is_empty() {
            DirichletChar::trivial(a)
        } else {
            DirichletChar::from_generator_values(a, &values)
                .map_err(|e| Error::Invalid(format!("finite_part: {e}")))?
        };
        if eps.conductor() != a {
            return Err(Error::Invalid(format!(
                "finite_part has conductor {}, so [{a}, {b}] is not the conductor",
                eps.conductor()
            )));
        }
        let xi = match spec.norm_twist {
            Some([m, i]) if i >= 0 => DirichletChar::from_index(m, i as u64)
                .map_err(|e| Error::Invalid(format!("norm_twist: {e}")))?,
            Some(_) => return Err(Error::Invalid("norm_twist: negative index".into())),
            None => DirichletChar::trivial(1),
        };
        Self::build(field, spec.weight_k, QuadIdeal { content: 1, a, b }, eps, xi, false)
    }

    /// Assembles a character and checks unit compatibility.
    pub fn build(
        field: QuadField,
        weight: u32,
        conductor: QuadIdeal,
        eps: DirichletChar,
        xi: DirichletChar,
        conjugated: bool,
    ) -> Result<Self> {
        let sqrt_d = field.omega_k().gauss_sum_exact().lower();
        let chi = HeckeChar { field, weight, conductor, eps, xi, conjugated, sqrt_d };
        chi.check_units()?;
        Ok(chi)
    }

    fn check_units(&self) -> Result<()> {
        let d = self.field.disc();
        for u in self.field.units() {
            let r = residue_mod(&u, &self.conductor).unwrap();
            let w = if self.conjugated { u.conj() } else { u };
            let val = &self.eps.value(r) * &self.embed(&w).pow(self.infinity_weight());
            if val != Cyclo::one(1) {
                let name = match (u.u, u.v) {
                    (2, 0) => "1".to_string(),
                    (-2, 0) => "-1".to_string(),
                    (x, y) => format!("({x} + {y} sqrt({d}))/2"),
                };
                return Err(Error::UnitIncompatible { unit: name, value: val.lower().to_string() });
            }
        }
        Ok(())
    }

    pub fn field(&self) -> &QuadField {
        &self.field
    }

    /// Modular weight `k` of the attached form.
    pub fn weight(&self) -> u32 {
        self.weight
    }

    /// Exponent `k - 1` of the infinity type.
    pub fn infinity_weight(&self) -> u32 {
        self.weight - 1
    }

    pub fn conductor(&self) -> &QuadIdeal {
        &self.conductor
    }

    /// The finite part as a Dirichlet character on `O_K/f = Z/a`.
    pub fn finite_part(&self) -> &DirichletChar {
        &self.eps
    }

    pub fn norm_twist(&self) -> &DirichletChar {
        &self.xi
    }

    pub fn is_conjugated(&self) -> bool {
        self.conjugated
    }

    /// Order `L` of the cyclotomic field `Q(zeta_L)` containing all values.
    pub fn value_order(&self) -> u32 {
        let l = lcm(self.sqrt_d.order() as i64, self.eps.order() as i64);
        lcm(l, self.xi.order() as i64) as u32
    }

    /// Order of the field generated by the finite-part values (the coefficient field is inside it).
    pub fn coefficient_order(&self) -> u32 {
        lcm(self.eps.order() as i64, self.xi.order() as i64) as u32
    }

    /// `(u + v sqrt D)/2` inside `Q(zeta_L)`.
    pub fn embed(&self, x: &QuadInt) -> Cyclo {
        let half = rug::Rational::from((1, 2));
        let re = Cyclo::from_rational(1, rug::Rational::from((x.u, 2)));
        &re + &self.sqrt_d.scale(&(half * x.v))
    }

    pub fn sqrt_disc(&self) -> &Cyclo {
        &self.sqrt_d
    }

    /// `lambda` on the principal ideal `(alpha)`, computed from this generator.
    pub fn lambda_element(&self, alpha: &QuadInt) -> Cyclo {
        let order = self.value_order();
        let r = residue_mod(alpha, &self.conductor).unwrap();
        let e = self.eps.value(r);
        if e.is_zero() {
            return Cyclo::zero(order);
        }
        let n = alpha.norm(self.field.disc());
        let x = self.xi.value(n);
        if x.is_zero() {
            return Cyclo::zero(order);
        }
        let a = if self.conjugated { alpha.conj() } else { *alpha };
        let v = &(&e * &x) * &self.embed(&a).pow(self.infinity_weight());
        v.promote(order)
    }

    /// `lambda(a)`, zero for ideals not coprime to the conductor.
    pub fn lambda(&self, ideal: &QuadIdeal) -> Cyclo {
        let g = self.field.generator(ideal).expect("class number one");
        self.lambda_element(&g)
    }

    /// `chi^n`, with the conductor reduced to that of the new finite part.
    pub fn power(&self, n: u32) -> Self {
        let eps_n = self.eps.pow(n as i64);
        let c = eps_n.conductor();
        let conductor = QuadIdeal { content: 1, a: c, b: self.conductor.b.rem_euclid(2 * c) };
        let eps = eps_n.primitive();
        let xi = self.xi.pow(n as i64);
        let weight = n * self.infinity_weight() + 1;
        Self::build(self.field, weight, conductor, eps, xi, self.conjugated)
            .expect("powers of a compatible character are compatible")
    }

    /// `chi' = chi o (complex conjugation)`.
    pub fn galois_conjugate(&self) -> Self {
        HeckeChar {
            conductor: self.conductor.conj(),
            conjugated: !self.conjugated,
            ..self.clone()
        }
    }

    /// `chi^sigma` for `sigma = sigma_b` acting on the values in `Q(zeta_L)`.
    pub fn conjugate_by(&self, b: i64) -> Result<Self> {
        let l = self.value_order() as i64;
        if gcd(b, l) != 1 {
            return Err(Error::NotCoprime { b, order: l });
        }
        let eps = self.eps.pow(b);
        let xi = self.xi.pow(b);
        let moves_k = kronecker(self.field.disc(), b.rem_euclid(l * self.field.disc().abs())) == -1;
        Ok(HeckeChar {
            eps,
            xi,
            conjugated: self.conjugated ^ moves_k,
            ..self.clone()
        })
    }

    /// Compares `lambda(p)` and `lambda(conj p)` on split primes below `bound`.
    pub fn is_galois_invariant(&self, bound: i64) -> bool {
        let conj = self.galois_conjugate();
        crate::arith::primes_below(bound).into_iter().all(|p| {
            self.field
                .ideals_of_norm(p)
                .iter()
                .all(|id| self.lambda(id) == conj.lambda(id))
        })
    }

    /// `chi_Q`: the Dirichlet character with `lambda(a) lambda(conj a) = chi_Q(N a) N(a)^{k-1}`.
    pub fn restrict_to_q(&self) -> DirichletChar {
        self.eps.mul(&self.xi.pow(2))
    }

    /// Nebentypus `omega = chi_Q omega_K` of the attached form.
    pub fn nebentypus(&self) -> DirichletChar {
        self.restrict_to_q().mul(&self.field.omega_k())
    }

    /// Level `|D| N(f) c(xi)^2` (a convention, see the crate README).
    pub fn level(&self) -> i64 {
        let c = self.xi.conductor();
        self.field.disc().abs() * self.conductor.norm() * c * c
    }

    /// The same character with an extra norm twist.
    pub fn twist_by_norm(&self, eta: &DirichletChar) -> Self {
        HeckeChar { xi: self.xi.mul(eta), ..self.clone() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unram(d: i64, k: u32) -> Result<HeckeChar> {
        HeckeChar::from_spec(&CharSpec::unramified(d, k))
    }

    #[test]
    fn unit_compatibility() {
        assert!(unram(-7, 3).is_ok());
        match unram(-4, 3) {
            Err(Error::UnitIncompatible { unit, .. }) => assert!(unit.contains("sqrt(-4)")),
            other => panic!("{other:?}"),
        }
        assert!(unram(-4, 5).is_ok());
        assert!(unram(-3, 7).is_ok());
        assert!(unram(-3, 5).is_err());
        assert!(unram(-7, 2).is_err());
    }

    #[test]
    fn lambda_at_two() {
        let chi = unram(-7, 3).unwrap();
        let k = chi.field();
        let ps = k.ideals_of_norm(2);
        assert_eq!(ps.len(), 2);
        let s = &chi.lambda(&ps[0]) + &chi.lambda(&ps[1]);
        assert_eq!(s.as_rational(), Some(rug::Rational::from(-3)));
    }

    #[test]
    fn spec_json_roundtrip() {
        let text = r#"{"disc": -7, "weight_k": 3, "conductor": [1, 1], "finite_part": []}"#;
        let spec = CharSpec::from_json(text).unwrap();
        assert_eq!(spec, CharSpec::unramified(-7, 3));
        assert!(CharSpec::from_json(r#"{"disc": -7, "weight": 3}"#).is_err());
    }

    #[test]
    fn ramified_character() {
        // D = -4, f = [5, 4] of norm 5, eps of order 4 on (Z/5)^x; eps(i) i^{k-1} = 1
        // with i -> residue (0 - 4)/2 = 3 mod 5
        let spec = CharSpec {
            disc: -4,
            weight_k: 2,
            conductor: [5, 4],
            finite_part: vec![[1, 4]],
            norm_twist: None,
            class_group_values: None,
        };
        let chi = HeckeChar::from_spec(&spec);
        let alt = HeckeChar::from_spec(&CharSpec { finite_part: vec![[3, 4]], ..spec.clone() });
        assert!(chi.is_ok() ^ alt.is_ok());
    }
}
