//! Shimura periods `u^+-`, the Deligne periods of symmetric powers built from them, and the
//! numerical checks of the period relations.

use rug::ops::Pow;
use rug::{Complex, Float};
use serde::Serialize;

use crate::arith::{gcd, is_fundamental_discriminant};
use crate::cmform::CMForm;
use crate::cyclo::Cyclo;
use crate::dirichlet::DirichletChar;
use crate::hecke::HeckeChar;
use crate::lvalue::{critical_l_value, twisted_form_l};
use crate::mp::{self, GUARD_BITS};
use crate::recognize::{powi, recognize_algebraic, recognize_in_field, RecognitionResult};
use crate::symdecomp::critical_set;
use crate::{Error, Result};

/// Largest conductor tried by the nonvanishing search.
pub const TWIST_SEARCH_BOUND: i64 = 200;

#[derive(Clone, Debug)]
pub struct PeriodPair {
    pub u_plus: Complex,
    pub u_minus: Complex,
    /// Discriminants of the quadratic characters `xi^+`, `xi^-` (1 is the trivial character).
    pub xi_plus: i64,
    pub xi_minus: i64,
    pub point: i64,
    /// `|L_f(point, phi, xi^+-)|`.
    pub certificates: [f64; 2],
    /// Every discriminant examined, with the reason it was skipped.
    pub search_log: Vec<(i64, String)>,
}

#[derive(Clone, Debug)]
pub struct DelignePeriodSet {
    pub n: u32,
    pub d_plus: u32,
    pub d_minus: u32,
    pub c_plus: Complex,
    pub c_minus: Complex,
    pub delta_omega: Complex,
}

/// Real characters by increasing conductor: the trivial one, then Kronecker symbols of
/// fundamental discriminants.
pub fn quadratic_characters(bound: i64) -> Vec<(i64, DirichletChar)> {
    let mut out = vec![(1, DirichletChar::trivial(1))];
    for c in 3..=bound {
        for d in [-c, c] {
            if is_fundamental_discriminant(d) {
                out.push((d, DirichletChar::kronecker(d, c).expect("fundamental")));
            }
        }
    }
    out
}

fn gauss(xi: &DirichletChar, prec: u32) -> Complex {
    xi.gauss_sum(prec)
}

/// `L_f(m, phi, xi) / ((2 pi i)^m gamma(xi))`.
fn normalized_value(chi: &HeckeChar, xi: &DirichletChar, m: i64, prec: u32) -> Result<(Complex, Complex)> {
    let wp = prec + GUARD_BITS;
    let l = twisted_form_l(chi, xi, &Complex::with_val(wp, m), wp)?;
    let den = powi(&mp::two_pi_i(wp), m, wp) * gauss(xi, wp);
    let u = Complex::with_val(prec, &l / den);
    Ok((u, Complex::with_val(prec, l)))
}

/// Shimura's periods with `xi^+-` the real characters of smallest conductor prime to the level
/// having `xi^+(-1) = (-1)^{k-1}`, `xi^-(-1) = (-1)^k` and nonvanishing twisted value.
pub fn shimura_periods(form: &CMForm, prec: u32) -> Result<PeriodPair> {
    let k = form.weight();
    if k < 2 {
        return Err(Error::Invalid("periods need weight at least 2".into()));
    }
    let m = if k >= 3 { k as i64 - 1 } else { 1 };
    let level = form.level();
    let floor = Float::with_val(64, 10f64).pow(-(prec as f64) / 8.0);
    let mut log = Vec::new();
    let mut found: Vec<(i64, Complex, f64)> = Vec::new();
    for sign_parity in [(k as u8 + 1) % 2, k as u8 % 2] {
        let mut hit = None;
        for (d, xi) in quadratic_characters(TWIST_SEARCH_BOUND) {
            if xi.parity() != sign_parity {
                log.push((d, "parity".to_string()));
                continue;
            }
            if gcd(xi.modulus(), level) != 1 {
                log.push((d, "not prime to the level".to_string()));
                continue;
            }
            let (u, l) = normalized_value(form.character(), &xi, m, prec)?;
            let size = Float::with_val(64, l.abs_ref());
            if size > floor {
                hit = Some((d, u, size.to_f64()));
                break;
            }
            log.push((d, format!("|L| = {size:.3e}")));
        }
        match hit {
            Some(h) => found.push(h),
            None => return Err(Error::NoNonvanishingTwist(log.iter().map(|(d, _)| *d).collect())),
        }
    }
    let minus = found.pop().unwrap();
    let plus = found.pop().unwrap();
    Ok(PeriodPair {
        u_plus: plus.1,
        u_minus: minus.1,
        xi_plus: plus.0,
        xi_minus: minus.0,
        point: m,
        certificates: [plus.2, minus.2],
        search_log: log,
    })
}

/// `delta(omega) = (2 pi i)^{1-k} gamma(omega)` for the nebentypus `omega`.
pub fn delta_omega(form: &CMForm, prec: u32) -> Complex {
    let wp = prec + GUARD_BITS;
    let k = form.weight() as i64;
    let g = form.nebentypus().gauss_sum(wp);
    Complex::with_val(prec, powi(&mp::two_pi_i(wp), 1 - k, wp) * g)
}

/// `c^+-(Sym^n phi)` from the periods of `phi`.
pub fn deligne_periods(form: &CMForm, n: u32, pair: &PeriodPair, prec: u32) -> DelignePeriodSet {
    let wp = prec + GUARD_BITS;
    let delta = delta_omega(form, wp);
    let r = (n / 2) as i64;
    let (up, um) = (&pair.u_plus, &pair.u_minus);
    let tri = r * (r + 1) / 2;
    let (d_plus, d_minus, c_plus, c_minus) = if n % 2 == 1 {
        let top = (r + 1) * (r + 2) / 2;
        let cp = powi(up, top, wp) * powi(um, tri, wp) * powi(&delta, tri, wp);
        let cm = powi(um, top, wp) * powi(up, tri, wp) * powi(&delta, tri, wp);
        (r as u32 + 1, r as u32 + 1, cp, cm)
    } else {
        let uu = Complex::with_val(wp, up * um);
        let cp = powi(&uu, tri, wp) * powi(&delta, tri, wp);
        let cm = powi(&uu, tri, wp) * powi(&delta, r * (r - 1) / 2, wp);
        (r as u32 + 1, r as u32, cp, cm)
    };
    DelignePeriodSet {
        n,
        d_plus,
        d_minus,
        c_plus: Complex::with_val(prec, c_plus),
        c_minus: Complex::with_val(prec, c_minus),
        delta_omega: Complex::with_val(prec, delta),
    }
}

/// Recognition caps shared by the verifiers.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Caps {
    /// `None` uses the degree of the coefficient field of the character.
    pub max_degree: Option<usize>,
    pub max_height: i64,
}

impl Default for Caps {
    fn default() -> Self {
        Caps { max_degree: None, max_height: crate::recognize::DEFAULT_MAX_HEIGHT }
    }
}

fn degree_cap(chi: &HeckeChar, caps: &Caps) -> usize {
    caps.max_degree.unwrap_or_else(|| Cyclo::degree_of(chi.coefficient_order()))
}

#[derive(Clone, Debug)]
pub struct RelationCheck {
    pub n: u32,
    pub ratio_plus: Complex,
    pub ratio_minus: Complex,
    pub plus: RecognitionResult,
    pub minus: RecognitionResult,
}

/// `r^+ = u^+(phi_{chi^n}) / u^+(phi_chi)^n` and
/// `r^- = u^-(phi_{chi^n}) / (u^+(phi_chi)^n gamma(omega_K))`.
pub fn period_ratios(chi: &HeckeChar, n: u32, prec: u32) -> Result<(Complex, Complex)> {
    let wp = prec + GUARD_BITS;
    let base = shimura_periods(&CMForm::new(chi.clone()), wp)?;
    let top = shimura_periods(&CMForm::new(chi.power(n)), wp)?;
    let un = powi(&base.u_plus, n as i64, wp);
    let gk = chi.field().omega_k().gauss_sum(wp);
    let rp = Complex::with_val(prec, &top.u_plus / &un);
    let rm = Complex::with_val(prec, &top.u_minus / (un * gk));
    Ok((rp, rm))
}

pub fn verify_period_relation(chi: &HeckeChar, n: u32, prec: u32, caps: &Caps) -> Result<RelationCheck> {
    let (rp, rm) = period_ratios(chi, n, prec)?;
    let d = degree_cap(chi, caps);
    Ok(RelationCheck {
        n,
        plus: recognize_algebraic(&rp, d, caps.max_height, prec),
        minus: recognize_algebraic(&rm, d, caps.max_height, prec),
        ratio_plus: rp,
        ratio_minus: rm,
    })
}

#[derive(Clone, Debug)]
pub struct DeligneCheck {
    pub n: u32,
    pub m: i64,
    pub critical: bool,
    pub value: Complex,
    pub ratio: Complex,
    pub result: RecognitionResult,
}

/// `L_f(m, Sym^n phi_chi) / ((2 pi i)^{m d^+-} c^+-)` with `+- = (-1)^m`.
pub fn verify_deligne(chi: &HeckeChar, n: u32, m: i64, prec: u32, caps: &Caps) -> Result<DeligneCheck> {
    let wp = prec + GUARD_BITS;
    let crit = critical_set(chi.weight(), n);
    if !crit.contains(&m) {
        return Err(Error::OutOfRange { m, range: format!("critical set {crit:?}") });
    }
    let form = CMForm::new(chi.clone());
    let pair = shimura_periods(&form, wp)?;
    let set = deligne_periods(&form, n, &pair, wp);
    let lv = critical_l_value(chi, n, m, &DirichletChar::trivial(1), wp)?;
    let (d, c) = if m % 2 == 0 { (set.d_plus, &set.c_plus) } else { (set.d_minus, &set.c_minus) };
    let den = powi(&mp::two_pi_i(wp), m * d as i64, wp) * c;
    let ratio = Complex::with_val(prec, &lv.value / den);
    Ok(DeligneCheck {
        n,
        m,
        critical: lv.critical,
        value: Complex::with_val(prec, &lv.value),
        result: recognize_algebraic(&ratio, degree_cap(chi, caps), caps.max_height, prec),
        ratio,
    })
}

/// `L_f(m, Sym^2 phi, xi) / ((2 pi i)^{2m+1-k} u^+ u^- gamma(omega xi^2))` for
/// `k <= m <= 2k - 2 - nu`, `m = nu mod 2`.
pub fn sturm_check(chi: &HeckeChar, m: i64, xi: &DirichletChar, prec: u32, caps: &Caps) -> Result<DeligneCheck> {
    let wp = prec + GUARD_BITS;
    let k = chi.weight() as i64;
    let nu = xi.parity() as i64;
    if m < k || m > 2 * k - 2 - nu || (m - nu) % 2 != 0 {
        return Err(Error::OutOfRange {
            m,
            range: format!("{k} <= m <= {}, m = {nu} mod 2", 2 * k - 2 - nu),
        });
    }
    let form = CMForm::new(chi.clone());
    let pair = shimura_periods(&form, wp)?;
    let lv = critical_l_value(chi, 2, m, xi, wp)?;
    let theta = form.nebentypus().mul(&xi.pow(2));
    let uu = Complex::with_val(wp, &pair.u_plus * &pair.u_minus);
    let den = powi(&mp::two_pi_i(wp), 2 * m + 1 - k, wp) * uu * theta.gauss_sum(wp);
    let ratio = Complex::with_val(prec, &lv.value / den);
    Ok(DeligneCheck {
        n: 2,
        m,
        critical: lv.critical,
        value: Complex::with_val(prec, &lv.value),
        result: recognize_algebraic(&ratio, degree_cap(chi, caps), caps.max_height, prec),
        ratio,
    })
}

#[derive(Clone, Debug)]
pub struct EquivarianceCheck {
    pub b: i64,
    pub order: u32,
    /// Recognized `r^+(chi)` and `r^+(chi^sigma)` in `Q(zeta_order)`.
    pub ratio: Option<Cyclo>,
    pub conjugate_ratio: Option<Cyclo>,
    /// `Some(true)` when `sigma_b(r(chi)) = r(chi^sigma)` exactly, `None` if inconclusive.
    pub passed: Option<bool>,
}

/// Compares `sigma_b(u^+(phi_{chi^n}) / u^+(phi_chi)^n)` with the same ratio for `chi^sigma`.
pub fn equivariance_check(chi: &HeckeChar, n: u32, b: i64, prec: u32, caps: &Caps) -> Result<EquivarianceCheck> {
    let order = chi.value_order();
    let conj = chi.conjugate_by(b)?;
    let (r1, _) = period_ratios(chi, n, prec)?;
    let (r2, _) = period_ratios(&conj, n, prec)?;
    let a = recognize_in_field(&r1, order, caps.max_height, prec);
    let c = recognize_in_field(&r2, order, caps.max_height, prec);
    let passed = match (&a, &c) {
        (Some(x), Some(y)) => Some(x.conjugate(b) == *y),
        _ => None,
    };
    Ok(EquivarianceCheck { b, order, ratio: a, conjugate_ratio: c, passed })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_characters_by_conductor() {
        let q: Vec<i64> = quadratic_characters(13).iter().map(|(d, _)| *d).collect();
        assert_eq!(q, vec![1, -3, -4, 5, -7, -8, 8, -11, 12, 13]);
        for (d, x) in quadratic_characters(40) {
            assert_eq!(x.parity(), if d < 0 { 1 } else { 0 });
        }
    }
}
