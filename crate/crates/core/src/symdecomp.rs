//! Symmetric powers of CM forms: local factors, the isobaric decomposition
//! into Hecke and Dirichlet pieces, archimedean data and critical integers.

use rug::ops::Pow;
use rug::{Complex, Float, Integer, Rational};
use serde::Serialize;

use crate::cmform::CMForm;
use crate::cyclo::Cyclo;
use crate::dirichlet::DirichletChar;
use crate::hecke::HeckeChar;
use crate::mp;
use crate::{Error, Result};

/// A polynomial in `X` with cyclotomic coefficients, constant term first.
pub type Poly = Vec<Cyclo>;

pub fn poly_mul(a: &[Cyclo], b: &[Cyclo]) -> Poly {
    let mut out = vec![Cyclo::zero(1); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] = &out[i + j] + &(x * y);
        }
    }
    out
}

pub fn poly_eq(a: &[Cyclo], b: &[Cyclo]) -> bool {
    let n = a.len().max(b.len());
    let zero = Cyclo::zero(1);
    (0..n).all(|i| a.get(i).unwrap_or(&zero) == b.get(i).unwrap_or(&zero))
}

pub fn poly_to_strings(a: &[Cyclo]) -> Vec<String> {
    a.iter().map(|c| c.lower().to_string()).collect()
}

/// Coefficients of `prod (1 - r X)` from the power sums `p_j = sum r^j`, `j = 1..=d`.
fn from_power_sums(p: &[Cyclo], d: usize) -> Poly {
    let mut c = vec![Cyclo::one(1)];
    for i in 1..=d {
        // i c_i = - sum_{j=1}^{i} p_j c_{i-j}
        let mut acc = Cyclo::zero(1);
        for j in 1..=i {
            acc = &acc + &(&p[j - 1] * &c[i - j]);
        }
        c.push(acc.scale(&Rational::from((-1, i as i64))));
    }
    c
}

/// Power sums `alpha^j + beta^j`, `j = 1..=d`, from `e1 = alpha + beta`, `e2 = alpha beta`.
fn pair_power_sums(e1: &Cyclo, e2: &Cyclo, d: usize) -> Vec<Cyclo> {
    let mut s = vec![Cyclo::from_rational(1, 2), e1.clone()];
    for j in 2..=d {
        let next = &(e1 * &s[j - 1]) - &(e2 * &s[j - 2]);
        s.push(next);
    }
    s.remove(0);
    s
}

/// `prod_{i=0}^{n} (1 - alpha^i beta^{n-i} X)` from `a_p` and `omega(p) p^{k-1}`.
pub fn sym_poly(e1: &Cyclo, e2: &Cyclo, n: usize) -> Poly {
    let d = n + 1;
    let s = pair_power_sums(e1, e2, d);
    let mut p = Vec::with_capacity(d);
    for j in 1..=d {
        // h_n(x, y) with x + y = s_j and x y = e2^j
        let sj = &s[j - 1];
        let qj = e2.pow(j as u32);
        let mut h0 = Cyclo::one(1);
        let mut h1 = sj.clone();
        for _ in 2..=n {
            let h2 = &(sj * &h1) - &(&qj * &h0);
            h0 = h1;
            h1 = h2;
        }
        p.push(if n == 0 { h0 } else { h1 });
    }
    from_power_sums(&p, d)
}

pub fn sym_euler_factor(form: &CMForm, p: i64, n: usize) -> Result<Poly> {
    if !form.is_good(p) {
        return Err(Error::BadPrime(p));
    }
    let ef = form.euler_factor(p)?;
    Ok(sym_poly(&ef.a_p, &ef.c2, n))
}

/// `prod_{i,j} (1 - alpha_i beta_j X)` for two degree-two factors.
pub fn rankin_selberg_poly(e1: &Cyclo, e2: &Cyclo, f1: &Cyclo, f2: &Cyclo) -> Poly {
    let a = pair_power_sums(e1, e2, 4);
    let b = pair_power_sums(f1, f2, 4);
    let p: Vec<Cyclo> = a.iter().zip(&b).map(|(x, y)| x * y).collect();
    from_power_sums(&p, 4)
}

/// One summand of the isobaric decomposition of `Sym^n phi_chi`.
#[derive(Clone, Debug)]
pub enum IsobaricComponent {
    /// `L(s - shift, character)`.
    Gl1 { character: DirichletChar, shift: u32, label: String },
    /// `L(s - shift, phi_{chi^power} (x) twist)`.
    Gl2 { chi: HeckeChar, power: u32, twist: DirichletChar, shift: u32, label: String },
}

impl IsobaricComponent {
    pub fn degree(&self) -> usize {
        match self {
            IsobaricComponent::Gl1 { .. } => 1,
            IsobaricComponent::Gl2 { .. } => 2,
        }
    }

    pub fn label(&self) -> &str {
        match self {
            IsobaricComponent::Gl1 { label, .. } | IsobaricComponent::Gl2 { label, .. } => label,
        }
    }

    pub fn shift(&self) -> u32 {
        match self {
            IsobaricComponent::Gl1 { shift, .. } | IsobaricComponent::Gl2 { shift, .. } => *shift,
        }
    }

    /// Local factor at a prime `p` good for the whole decomposition, as a polynomial in `X = p^{-s}`.
    pub fn euler_factor(&self, p: i64) -> Result<Poly> {
        match self {
            IsobaricComponent::Gl1 { character, shift, .. } => {
                let v = character.value(p).scale(&Rational::from(Integer::from(p).pow(*shift)));
                Ok(vec![Cyclo::one(1), -v])
            }
            IsobaricComponent::Gl2 { chi, twist, shift, .. } => {
                let f = CMForm::new(chi.clone());
                let ef = f.euler_factor(p)?;
                if !ef.good {
                    return Err(Error::BadPrime(p));
                }
                let t = twist.value(p);
                let pt = Rational::from(Integer::from(p).pow(*shift));
                let c1 = (&t * &ef.a_p).scale(&pt);
                let c2 = (&(&t * &t) * &ef.c2).scale(&Rational::from(&pt * &pt));
                Ok(vec![Cyclo::one(1), -c1, c2])
            }
        }
    }
}

/// Sym^n decomposition: `AI(chi^{n-a} chi'^a) = phi_{chi^{n-2a}} (x) (omega omega_K)^a` shifted by
/// `a(k-1)`, plus `(omega omega_K)^r` shifted by `r(k-1)` when `n = 2r`.
///
/// `omega omega_K` is `chi_Q` induced to a modulus divisible by `|D|`.
pub fn isobaric_decomposition(chi: &HeckeChar, n: u32) -> Result<Vec<IsobaricComponent>> {
    if n == 0 {
        return Err(Error::Invalid("symmetric power must be positive".into()));
    }
    for m in 1..=n {
        if chi.power(m).is_galois_invariant(60) {
            return Err(Error::GaloisInvariant(m));
        }
    }
    let l = chi.infinity_weight();
    let chi_q = chi.nebentypus().mul(&chi.field().omega_k());
    let r = n / 2;
    let mut out = Vec::new();
    let top = if n.is_multiple_of(2) { r - 1 } else { r };
    for a in 0..=top {
        if n.is_multiple_of(2) && r == 0 {
            break;
        }
        let power = n - 2 * a;
        let label = match a {
            0 => format!("AI(chi^{n})"),
            1 => format!("AI(chi^{} chi')", n - 1),
            _ => format!("AI(chi^{} chi'^{a})", n - a),
        };
        out.push(IsobaricComponent::Gl2 {
            chi: chi.power(power),
            power,
            twist: chi_q.pow(a as i64),
            shift: a * l,
            label,
        });
    }
    if n.is_multiple_of(2) {
        out.push(IsobaricComponent::Gl1 {
            character: chi_q.pow(r as i64),
            shift: r * l,
            label: if r == 1 { "chi_Q".into() } else { format!("chi_Q^{r}") },
        });
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct FactorizationReport {
    pub p: i64,
    pub n: u32,
    pub passed: bool,
    pub lhs: Vec<String>,
    pub rhs: Vec<String>,
}

pub fn product_of_components(comps: &[IsobaricComponent], p: i64) -> Result<Poly> {
    let mut rhs: Poly = vec![Cyclo::one(1)];
    for c in comps {
        rhs = poly_mul(&rhs, &c.euler_factor(p)?);
    }
    Ok(rhs)
}

/// Exact check that the Sym^n local factor equals the product of the component factors.
pub fn factorization_check(chi: &HeckeChar, n: u32, p: i64) -> Result<FactorizationReport> {
    let form = CMForm::new(chi.clone());
    let lhs = sym_euler_factor(&form, p, n as usize)?;
    let comps = isobaric_decomposition(chi, n)?;
    let rhs = product_of_components(&comps, p)?;
    let passed = poly_eq(&lhs, &rhs);
    Ok(FactorizationReport {
        p,
        n,
        passed,
        lhs: poly_to_strings(&lhs),
        rhs: poly_to_strings(&rhs),
    })
}

/// Exact check of `L(s, phi_{chi^n} x phi_chi) = L(s, phi_{chi^{n+1}}) L(s - k + 1, phi_{chi^{n-1}}, omega)`
/// at one good prime.
pub fn rankin_selberg_check(chi: &HeckeChar, n: u32, p: i64) -> Result<FactorizationReport> {
    if n == 0 {
        return Err(Error::Invalid("n must be positive".into()));
    }
    let f = CMForm::new(chi.clone());
    if !f.is_good(p) {
        return Err(Error::BadPrime(p));
    }
    let fa = CMForm::new(chi.power(n)).euler_factor(p)?;
    let fb = f.euler_factor(p)?;
    let lhs = rankin_selberg_poly(&fa.a_p, &fa.c2, &fb.a_p, &fb.c2);
    let up = CMForm::new(chi.power(n + 1)).euler_factor(p)?.poly();
    let down = if n == 1 {
        // phi_{chi^0} is the Eisenstein-type pair 1 + omega_K
        let w = chi.field().omega_k().value(p);
        vec![Cyclo::one(1), -(&Cyclo::one(1) + &w), w]
    } else {
        CMForm::new(chi.power(n - 1)).euler_factor(p)?.poly()
    };
    let omega = f.nebentypus().value(p);
    let pl = Rational::from(Integer::from(p).pow(chi.infinity_weight()));
    let down: Poly = down
        .iter()
        .enumerate()
        .map(|(i, c)| {
            
            (&omega.pow(i as u32) * c).scale(&pl.clone().pow(i as i32))
        })
        .collect();
    let rhs = poly_mul(&up, &down);
    Ok(FactorizationReport {
        p,
        n,
        passed: poly_eq(&lhs, &rhs),
        lhs: poly_to_strings(&lhs),
        rhs: poly_to_strings(&rhs),
    })
}

/// Irreducible representations of the real Weil group, twisted by `|.|^t`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum WRComponent {
    Trivial { t: String },
    Sign { t: String },
    Induced { l: u32, t: String },
}

/// Pole set `{start - step j : j >= 0}` of an archimedean factor.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PoleSet {
    pub start: String,
    pub step: u32,
}

impl WRComponent {
    pub fn trivial(t: Rational) -> Self {
        WRComponent::Trivial { t: t.to_string() }
    }
    pub fn sign(t: Rational) -> Self {
        WRComponent::Sign { t: t.to_string() }
    }
    /// `I(chi_l) |.|^t`, rewritten as `1 + eps` when `l = 0`.
    pub fn induced(l: u32, t: Rational) -> Vec<Self> {
        if l == 0 {
            vec![Self::trivial(t.clone()), Self::sign(t)]
        } else {
            vec![WRComponent::Induced { l, t: t.to_string() }]
        }
    }

    pub fn shift(&self) -> Rational {
        let t = match self {
            WRComponent::Trivial { t } | WRComponent::Sign { t } | WRComponent::Induced { t, .. } => t,
        };
        t.parse().expect("shift is a rational")
    }

    pub fn dim(&self) -> usize {
        match self {
            WRComponent::Induced { .. } => 2,
            _ => 1,
        }
    }

    pub fn with_shift(&self, t: Rational) -> Self {
        match self {
            WRComponent::Trivial { .. } => Self::trivial(t),
            WRComponent::Sign { .. } => Self::sign(t),
            WRComponent::Induced { l, .. } => WRComponent::Induced { l: *l, t: t.to_string() },
        }
    }

    pub fn poles(&self) -> PoleSet {
        let t = self.shift();
        match self {
            WRComponent::Trivial { .. } => PoleSet { start: (-t).to_string(), step: 2 },
            WRComponent::Sign { .. } => PoleSet { start: (-t - 1u32).to_string(), step: 2 },
            WRComponent::Induced { l, .. } => PoleSet {
                start: (-t - Rational::from((*l, 2))).to_string(),
                step: 1,
            },
        }
    }

    pub fn is_pole(&self, s: &Rational) -> bool {
        let ps = self.poles();
        let start: Rational = ps.start.parse().unwrap();
        let d = Rational::from(&start - s);
        if d < 0 {
            return false;
        }
        let q = d / ps.step;
        *q.denom() == 1
    }

    /// The archimedean factor at `s`.
    pub fn factor(&self, s: &Complex, prec: u32) -> Result<Complex> {
        let wp = prec + mp::GUARD_BITS;
        let t = Float::with_val(wp, &self.shift());
        let pi = mp::pi(wp);
        let on_pole = |arg: &Complex| {
            let re = arg.real().to_f64();
            arg.imag().is_zero() && re <= 0.0 && re == re.round()
        };
        let out = match self {
            WRComponent::Trivial { .. } | WRComponent::Sign { .. } => {
                let extra = if matches!(self, WRComponent::Sign { .. }) { 1 } else { 0 };
                let arg = Complex::with_val(wp, Complex::with_val(wp, s + &t) + extra) / 2u32;
                if on_pole(&arg) {
                    return Err(Error::Pole(format!("Gamma({}) in {:?}", arg.real(), self)));
                }
                let pw = Complex::with_val(wp, -&arg);
                let p = Complex::with_val(wp, (&pi, 0)).pow(&pw);
                p * mp::gamma(&arg, wp)
            }
            WRComponent::Induced { l, .. } => {
                let arg = Complex::with_val(wp, s + &t) + Float::with_val(wp, *l) / 2u32;
                if on_pole(&arg) {
                    return Err(Error::Pole(format!("Gamma({}) in {:?}", arg.real(), self)));
                }
                let two_pi = Complex::with_val(wp, (Float::with_val(wp, &pi * 2u32), 0));
                let p = two_pi.pow(&Complex::with_val(wp, -&arg));
                p * mp::gamma(&arg, wp) * 2u32
            }
        };
        Ok(Complex::with_val(prec, out))
    }
}

/// `Sym^n I(chi_{k-1})` as a sum of irreducibles (untwisted).
pub fn sym_infinity_type(k: u32, n: u32) -> Vec<WRComponent> {
    let l = k.saturating_sub(1);
    let r = n / 2;
    let zero = Rational::new();
    let mut out = Vec::new();
    if n % 2 == 1 {
        for a in 0..=r {
            out.extend(WRComponent::induced((2 * a + 1) * l, zero.clone()));
        }
    } else {
        if (r * l).is_multiple_of(2) {
            out.push(WRComponent::trivial(zero.clone()));
        } else {
            out.push(WRComponent::sign(zero.clone()));
        }
        for a in 1..=r {
            out.extend(WRComponent::induced(2 * a * l, zero.clone()));
        }
    }
    out
}

/// `L_infty(s, Sym^n phi)` in the classical normalization: every component shifted
/// by `-n(k-1)/2`.
pub fn sym_gamma_factor(k: u32, n: u32) -> Vec<WRComponent> {
    let t = -Rational::from((n as i64 * k.saturating_sub(1) as i64, 2));
    sym_infinity_type(k, n)
        .into_iter()
        .map(|c| c.with_shift(t.clone()))
        .collect()
}

pub fn archimedean_factor(s: &Complex, comp: &WRComponent, prec: u32) -> Result<Complex> {
    comp.factor(s, prec)
}

fn step_range(lo: i64, hi: i64, step: usize) -> impl Iterator<Item = i64> {
    (lo..=hi).step_by(step)
}

/// Critical integers of `L_f(s, Sym^n phi)` for a weight `k` form, from the closed formulas.
pub fn critical_set(k: u32, n: u32) -> Vec<i64> {
    let k = k as i64;
    let r = (n / 2) as i64;
    let l = k - 1;
    let mut out: Vec<i64> = if n % 2 == 1 {
        (r * l + 1..=(r + 1) * l).collect()
    } else {
        let (a, b, c, d) = match (r % 2 == 1, k % 2 == 0) {
            (true, true) => ((r - 1) * l + 1, r * l, r * l + 1, (r + 1) * l),
            (true, false) => ((r - 1) * l + 1, r * l - 1, r * l + 2, (r + 1) * l),
            (false, true) => ((r - 1) * l + 2, r * l - 1, r * l + 2, (r + 1) * l - 1),
            (false, false) => ((r - 1) * l + 1, r * l - 1, r * l + 2, (r + 1) * l),
        };
        step_range(a, b, 2).chain(step_range(c, d, 2)).collect()
    };
    out.sort_unstable();
    out.dedup();
    out
}

/// Critical integers from Gamma poles: `m` is critical iff neither `L_infty(s)` at `s = m`
/// nor `L_infty(s)` at the dual point `n(k-1) + 1 - m` has a pole.
pub fn critical_set_oracle(k: u32, n: u32) -> Vec<i64> {
    let comps = sym_gamma_factor(k, n);
    let w = n as i64 * k.saturating_sub(1) as i64;
    let regular = |s: i64| comps.iter().all(|c| !c.is_pole(&Rational::from(s)));
    (-w - 4..=2 * w + 4)
        .filter(|&m| regular(m) && regular(w + 1 - m))
        .collect()
}
