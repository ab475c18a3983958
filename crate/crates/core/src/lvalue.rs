//! Degree one and two L-functions.
//!
//! A spec describes `Lambda(s) = A^s Gamma(a s + b) L(s)` with `A` built from the
//! conductor, together with the functional equation `Lambda(s) = eps Lambda~(w + 1 - s)`
//! where `Lambda~` has the conjugate coefficients. Values inside the strip come from the
//! smoothed approximate functional equation
//!
//! ```text
//! Lambda(s) = sum a_n x_n^{b-z} Gamma(z, x_n t) + eps sum conj(a_n) x_n^{b-z'} Gamma(z', x_n / t)
//!           + sum_rho R_rho t^{a (s - rho)} / (s - rho)
//! ```
//!
//! with `x_n = (n / A)^{1/a}`, `z = a s + b`, `z' = a (w + 1 - s) + b`, for any `t > 0`.
//! Independence of `t` is what calibration and the residual checks test.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rayon::prelude::*;
use rug::ops::Pow;
use rug::{Complex, Float, Rational};
use serde::Serialize;

use crate::arith::{factorize, gcd};
use crate::cmform::CMForm;
use crate::dirichlet::DirichletChar;
use crate::hecke::HeckeChar;
use crate::mp::{self, GUARD_BITS};
use crate::qfield::QuadField;
use crate::symdecomp::{critical_set, isobaric_decomposition, IsobaricComponent, WRComponent};
use crate::{Error, Result};

/// Largest truncation point `dirichlet_sum` accepts.
pub const MAX_DIRECT_TERMS: usize = 2_000_000;

#[derive(Clone, Debug)]
pub enum Coefficients {
    /// `chi(n)` for a primitive character (conductor 1 is the Riemann zeta function).
    Dirichlet(DirichletChar),
    /// Number of ideals of norm `n`.
    Dedekind(QuadField),
    /// Fourier coefficients of a CM newform.
    Form(CMForm),
}

/// `Gamma_R(s + nu)` for degree one, `Gamma_C(s)` for degree two.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GammaShape {
    Real { nu: u8 },
    Complex,
}

#[derive(Clone, Debug, Serialize)]
pub struct Calibration {
    pub conductor: i64,
    pub conductor_fitted: bool,
    pub root_number: [f64; 2],
    /// `|Lambda(s1; t1) - Lambda(s1; 1)| / |Lambda(s1; 1)|` at the verification point.
    pub residual: f64,
    pub solve_point: [f64; 2],
    pub check_point: [f64; 2],
    pub precision: u32,
}

#[derive(Default)]
struct CoeffCache {
    prec: u32,
    values: Arc<Vec<Complex>>,
}

#[derive(Clone)]
pub struct LSeriesSpec {
    pub coefficients: Coefficients,
    pub gamma: GammaShape,
    pub motivic_weight: u32,
    /// `None` asks calibration to fit it.
    pub conductor: Option<i64>,
    pub root_number: Option<Complex>,
    /// Poles `rho` of `Lambda` with residues.
    pub poles: Vec<(i64, Rational)>,
    pub calibration: Option<Calibration>,
    cache: Arc<Mutex<CoeffCache>>,
}

impl std::fmt::Debug for LSeriesSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("LSeriesSpec")
            .field("coefficients", &self.coefficients)
            .field("gamma", &self.gamma)
            .field("motivic_weight", &self.motivic_weight)
            .field("conductor", &self.conductor)
            .field("root_number", &self.root_number)
            .finish()
    }
}

/// Result of evaluating a calibrated spec.
#[derive(Clone, Debug)]
pub struct LValue {
    pub completed: Complex,
    pub value: Complex,
    pub tail_n: usize,
}

impl LSeriesSpec {
    fn with(coefficients: Coefficients, gamma: GammaShape, w: u32, q: Option<i64>) -> Self {
        LSeriesSpec {
            coefficients,
            gamma,
            motivic_weight: w,
            conductor: q,
            root_number: None,
            poles: Vec::new(),
            calibration: None,
            cache: Arc::new(Mutex::new(CoeffCache::default())),
        }
    }

    /// `L(s, chi_0)` for the primitive character inducing `chi`.
    pub fn dirichlet(chi: &DirichletChar) -> Self {
        let prim = chi.primitive();
        let c = prim.modulus();
        let nu = prim.parity();
        let mut spec = Self::with(Coefficients::Dirichlet(prim), GammaShape::Real { nu }, 0, Some(c));
        if c == 1 {
            spec.poles = vec![(1, Rational::from(1)), (0, Rational::from(-1))];
        }
        spec
    }

    pub fn dedekind(field: QuadField) -> Self {
        let d = field.disc();
        let res = Rational::from((field.class_number(), field.unit_count() as i64));
        let mut spec = Self::with(Coefficients::Dedekind(field), GammaShape::Complex, 0, Some(d.abs()));
        spec.poles = vec![(1, res.clone()), (0, -res)];
        spec
    }

    pub fn form(form: CMForm) -> Self {
        let w = form.weight() - 1;
        let q = form.level();
        Self::with(Coefficients::Form(form), GammaShape::Complex, w, Some(q))
    }

    pub fn degree(&self) -> usize {
        match self.gamma {
            GammaShape::Real { .. } => 1,
            GammaShape::Complex => 2,
        }
    }

    /// Archimedean data in the classical normalization.
    pub fn gamma_components(&self) -> Vec<WRComponent> {
        match self.gamma {
            GammaShape::Real { nu: 0 } => vec![WRComponent::trivial(Rational::new())],
            GammaShape::Real { .. } => vec![WRComponent::sign(Rational::new())],
            GammaShape::Complex => {
                WRComponent::induced(self.motivic_weight, Rational::from((-(self.motivic_weight as i64), 2)))
            }
        }
    }

    fn a_b(&self, wp: u32) -> (Float, Float) {
        match self.gamma {
            GammaShape::Real { nu } => (Float::with_val(wp, 0.5), Float::with_val(wp, nu as f64 / 2.0)),
            GammaShape::Complex => (Float::with_val(wp, 1), Float::new(wp)),
        }
    }

    fn scale(&self, q: i64, wp: u32) -> Float {
        match self.gamma {
            GammaShape::Real { .. } => Float::with_val(wp, Float::with_val(wp, q) / mp::pi(wp)).sqrt(),
            GammaShape::Complex => {
                Float::with_val(wp, q).sqrt() / Float::with_val(wp, mp::pi(wp) * 2u32)
            }
        }
    }

    /// `a_1, ..., a_bound` as complex numbers, cached per spec.
    pub fn coefficients(&self, bound: usize, prec: u32) -> Arc<Vec<Complex>> {
        let mut cache = self.cache.lock().unwrap();
        if cache.values.len() >= bound && cache.prec >= prec {
            return cache.values.clone();
        }
        let bound = bound.max(cache.values.len());
        let prec = prec.max(cache.prec);
        let values: Vec<Complex> = match &self.coefficients {
            Coefficients::Dirichlet(chi) => {
                (1..=bound as i64).map(|n| chi.value_complex(n, prec)).collect()
            }
            Coefficients::Dedekind(field) => {
                let w = field.omega_k();
                let mut counts = vec![0i64; bound + 1];
                for d in 1..=bound {
                    let v = w.value(d as i64).as_rational().map(|r| r.to_f64() as i64).unwrap_or(0);
                    if v != 0 {
                        for m in (d..=bound).step_by(d) {
                            counts[m] += v;
                        }
                    }
                }
                counts[1..].iter().map(|&c| Complex::with_val(prec, c)).collect()
            }
            Coefficients::Form(f) => f.coeffs_complex(bound, prec),
        };
        cache.prec = prec;
        cache.values = Arc::new(values);
        cache.values.clone()
    }

    /// `A^s Gamma(a s + b)`.
    pub fn gamma_factor(&self, s: &Complex, prec: u32) -> Result<Complex> {
        let q = self.conductor.ok_or_else(|| Error::Invalid("conductor not set".into()))?;
        let wp = prec + GUARD_BITS;
        let (a, b) = self.a_b(wp);
        let z = Complex::with_val(wp, s * &a) + &b;
        if near_pole(&z) {
            return Err(Error::Pole(format!("Gamma({z:.6}) at s = {s:.6}")));
        }
        let big_a = self.scale(q, wp);
        let v = mp::real_pow(&big_a, &Complex::with_val(wp, s), wp) * mp::gamma(&z, wp);
        Ok(Complex::with_val(prec, v))
    }

    /// Number of terms after which the tail of one AFE side is below `2^-bits`.
    fn terms_needed(&self, q: i64, z: &Complex, t: f64, bits: u32) -> usize {
        let a = if self.degree() == 1 { 0.5 } else { 1.0 };
        let b = match self.gamma {
            GammaShape::Real { nu } => nu as f64 / 2.0,
            GammaShape::Complex => 0.0,
        };
        let big_a = match self.gamma {
            GammaShape::Real { .. } => (q as f64 / std::f64::consts::PI).sqrt(),
            GammaShape::Complex => (q as f64).sqrt() / (2.0 * std::f64::consts::PI),
        };
        let re_z = z.real().to_f64();
        let abs_z = Float::with_val(53, z.abs_ref()).to_f64();
        let target = -((bits + 16) as f64) * std::f64::consts::LN_2;
        let growth = self.motivic_weight as f64 / 2.0 + 1.0;
        let mut n = 1usize;
        loop {
            let x = (n as f64 / big_a).powf(1.0 / a);
            let xt = x * t;
            let est = growth * (n as f64).ln() + (b - 1.0) * x.ln() + (re_z - 1.0) * t.ln() - xt
                + (abs_z.max(1.0)).ln();
            if xt > abs_z + 2.0 && est < target {
                return n;
            }
            n += 1 + n / 64;
        }
    }

    /// `sum_{n <= N} c_n x_n^{b - z} Gamma(z, x_n t)`.
    fn side(&self, coeffs: &[Complex], conj: bool, q: i64, z: &Complex, t: &Float, wp: u32) -> Complex {
        let (a, b) = self.a_b(wp);
        let big_a = self.scale(q, wp);
        let inv_a = Float::with_val(wp, a.recip_ref());
        let e = Complex::with_val(wp, -z) + &b;
        let terms: Vec<Complex> = coeffs
            .par_iter()
            .enumerate()
            .map(|(i, c)| {
                if c.is_zero() {
                    return Complex::new(wp);
                }
                let n = Float::with_val(wp, (i + 1) as u64);
                let x = Float::with_val(wp, Float::with_val(wp, &n / &big_a).pow(&inv_a));
                let xt = Float::with_val(wp, &x * t);
                let g = mp::gamma_upper(z, &xt, wp);
                let c = if conj { Complex::with_val(wp, c.conj_ref()) } else { Complex::with_val(wp, c) };
                c * mp::real_pow(&x, &e, wp) * g
            })
            .collect();
        let mut acc = Complex::new(wp);
        for term in terms {
            acc += term;
        }
        acc
    }

    fn pole_part(&self, s: &Complex, t: &Float, wp: u32) -> Result<Complex> {
        let (a, _) = self.a_b(wp);
        let mut acc = Complex::new(wp);
        for (rho, r) in &self.poles {
            let d = Complex::with_val(wp, s - *rho);
            if d.is_zero() {
                return Err(Error::Pole(format!("Lambda has a pole at s = {rho}")));
            }
            let e = Complex::with_val(wp, &d * &a);
            let tp = mp::real_pow(t, &e, wp);
            acc += tp * Float::with_val(wp, r) / d;
        }
        Ok(acc)
    }

    /// The three AFE pieces `(S1, S2, P)` at `(s, t)` and the number of terms used.
    fn pieces(&self, s: &Complex, t: &Float, q: i64, wp: u32) -> Result<(Complex, Complex, Complex, usize)> {
        let (a, b) = self.a_b(wp);
        let z = Complex::with_val(wp, s * &a) + &b;
        let reflected = Complex::with_val(wp, (self.motivic_weight + 1) - Complex::with_val(wp, s));
        let zd = Complex::with_val(wp, &reflected * &a) + &b;
        let tf = t.to_f64();
        let n1 = self.terms_needed(q, &z, tf, wp);
        let n2 = self.terms_needed(q, &zd, 1.0 / tf, wp);
        let n = n1.max(n2);
        let coeffs = self.coefficients(n, wp);
        let tinv = Float::with_val(wp, t.recip_ref());
        let s1 = self.side(&coeffs[..n1], false, q, &z, t, wp);
        let s2 = self.side(&coeffs[..n2], true, q, &zd, &tinv, wp);
        let p = self.pole_part(s, t, wp)?;
        Ok((s1, s2, p, n))
    }

    fn lambda_t(&self, s: &Complex, t: &Float, q: i64, eps: &Complex, wp: u32) -> Result<(Complex, usize)> {
        let (s1, s2, p, n) = self.pieces(s, t, q, wp)?;
        Ok((s1 + Complex::with_val(wp, eps * &s2) + p, n))
    }

    fn calibrated(&self) -> Result<(i64, Complex)> {
        match (self.conductor, &self.root_number, &self.calibration) {
            (Some(q), Some(e), Some(_)) => Ok((q, e.clone())),
            _ => Err(Error::Invalid("L-series spec is not calibrated".into())),
        }
    }

    /// Root number solving `Lambda(s0; t1) = Lambda(s0; 1)`, and the residual of the same
    /// identity at `s1`.
    fn solve_root_number(&self, q: i64, prec: u32) -> Result<(Complex, f64)> {
        let wp = prec + GUARD_BITS;
        let (s0, s1) = self.calibration_points(wp);
        let one = Float::with_val(wp, 1);
        let t1 = Float::with_val(wp, 1.25);
        let (a1, a2, ap, _) = self.pieces(&s0, &one, q, wp)?;
        let (b1, b2, bp, _) = self.pieces(&s0, &t1, q, wp)?;
        let num = Complex::with_val(wp, &b1 + &bp) - &a1 - &ap;
        let den = Complex::with_val(wp, &a2 - &b2);
        let eps = num / den;
        let (l1, _) = self.lambda_t(&s1, &one, q, &eps, wp)?;
        let (l2, _) = self.lambda_t(&s1, &t1, q, &eps, wp)?;
        let res = mp::rel_err(&l2, &l1).to_f64();
        Ok((Complex::with_val(prec, eps), res))
    }

    fn calibration_points(&self, wp: u32) -> (Complex, Complex) {
        let c = (self.motivic_weight as f64 + 1.0) / 2.0;
        let s0 = Complex::with_val(wp, (c, 0)) + Complex::with_val(wp, (Rational::from((1, 7)), Rational::from((1, 5))));
        let s1 = Complex::with_val(wp, (c, 0)) + Complex::with_val(wp, (Rational::from((-21, 100)), Rational::from((43, 100))));
        (s0, s1)
    }
}

fn near_pole(z: &Complex) -> bool {
    let re = z.real().to_f64();
    let im = z.imag().to_f64();
    im.abs() < 1e-30 && re <= 0.0 && (re - re.round()).abs() < 1e-30
}

fn to_pair(z: &Complex) -> [f64; 2] {
    [z.real().to_f64(), z.imag().to_f64()]
}

/// Fixes the root number (and the conductor, if needed) from the functional equation.
pub fn calibrate(spec: &LSeriesSpec, prec: u32) -> Result<LSeriesSpec> {
    let threshold = 2f64.powi(-(prec as i32) / 2);
    let mut attempts = Vec::new();
    if let Some(q) = spec.conductor {
        let (eps, res) = spec.solve_root_number(q, prec)?;
        attempts.push((q, res));
        if res < threshold && unit_modulus(&eps, threshold) {
            return Ok(finish(spec, q, false, eps, res, prec));
        }
    }
    let q = fit_conductor(spec, spec.conductor.map(|q| 4 * q).unwrap_or(0).max(200))?;
    let (eps, res) = spec.solve_root_number(q, prec)?;
    if res < threshold && unit_modulus(&eps, threshold) {
        return Ok(finish(spec, q, true, eps, res, prec));
    }
    attempts.push((q, res));
    Err(Error::SpecInconsistent(format!(
        "no conductor/root number pair reaches residual 2^-{}: tried {attempts:?}",
        prec / 2
    )))
}

fn unit_modulus(eps: &Complex, threshold: f64) -> bool {
    let a = Float::with_val(eps.prec().0, eps.abs_ref()) - 1u32;
    a.abs().to_f64() < threshold
}

fn finish(spec: &LSeriesSpec, q: i64, fitted: bool, eps: Complex, res: f64, prec: u32) -> LSeriesSpec {
    let mut out = spec.clone();
    let (s0, s1) = spec.calibration_points(53);
    out.conductor = Some(q);
    out.calibration = Some(Calibration {
        conductor: q,
        conductor_fitted: fitted,
        root_number: to_pair(&eps),
        residual: res,
        solve_point: to_pair(&s0),
        check_point: to_pair(&s1),
        precision: prec,
    });
    out.root_number = Some(eps);
    out
}

/// Conductor in `1..=bound` minimizing the low-precision functional-equation residual.
pub fn fit_conductor(spec: &LSeriesSpec, bound: i64) -> Result<i64> {
    let scores: Vec<(i64, f64)> = (1..=bound)
        .into_par_iter()
        .filter_map(|q| spec.solve_root_number(q, 64).ok().map(|(_, r)| (q, r)))
        .collect();
    scores
        .into_iter()
        .filter(|(_, r)| r.is_finite())
        .min_by(|x, y| x.1.total_cmp(&y.1))
        .map(|(q, _)| q)
        .ok_or_else(|| Error::SpecInconsistent("conductor search found no candidate".into()))
}

/// `Lambda(s)` and `L(s)` from the approximate functional equation.
pub fn completed_l(spec: &LSeriesSpec, s: &Complex, prec: u32) -> Result<LValue> {
    let (q, eps) = spec.calibrated()?;
    let extra = (s.imag().to_f64().abs() * 2.3) as u32 + 16;
    let wp = prec + GUARD_BITS + extra;
    let one = Float::with_val(wp, 1);
    let s = Complex::with_val(wp, s);
    let (lam, tail_n) = spec.lambda_t(&s, &one, q, &eps, wp)?;
    let g = spec.gamma_factor(&s, wp)?;
    let value = Complex::with_val(wp, &lam / &g);
    Ok(LValue {
        completed: Complex::with_val(prec, lam),
        value: Complex::with_val(prec, value),
        tail_n,
    })
}

/// `|Lambda(s) - eps Lambda~(w + 1 - s)| / |Lambda(s)|`, the left side at `t = 5/4` and the
/// right side (the dual AFE at the reflected point) at `t = 1`.
pub fn fe_residual(spec: &LSeriesSpec, s: &Complex, prec: u32) -> Result<f64> {
    let (q, eps) = spec.calibrated()?;
    let wp = prec + GUARD_BITS + (s.imag().to_f64().abs() * 2.3) as u32 + 16;
    let s = Complex::with_val(wp, s);
    let t1 = Float::with_val(wp, 1.25);
    let one = Float::with_val(wp, 1);
    let (lhs, _) = spec.lambda_t(&s, &t1, q, &eps, wp)?;
    let (s1, s2, _, _) = spec.pieces(&s, &one, q, wp)?;
    let reflected = Complex::with_val(wp, (spec.motivic_weight + 1) - &s);
    // the poles in use all belong to self-dual series
    let pd = spec.pole_part(&reflected, &one, wp)?;
    let eps_bar = Complex::with_val(wp, eps.conj_ref());
    let dual = s2 + Complex::with_val(wp, &eps_bar * &s1) + pd;
    let rhs = Complex::with_val(wp, &eps * &dual);
    Ok(mp::rel_err(&rhs, &lhs).to_f64())
}

/// `sum a_n n^{-s}` in the region of absolute convergence, with a certified tail bound
/// from `|a_n| <= d(n) n^{w/2}`. Returns the value and the truncation point
/// (0 when the Hurwitz decomposition was used).
pub fn dirichlet_sum(spec: &LSeriesSpec, s: &Complex, prec: u32) -> Result<(Complex, usize)> {
    let w = spec.motivic_weight as f64;
    let sigma = s.real().to_f64();
    if sigma <= w / 2.0 + 1.0 {
        return Err(Error::OutsideConvergence(format!(
            "Re(s) = {sigma} <= {}; use the completed L-function",
            w / 2.0 + 1.0
        )));
    }
    let wp = prec + GUARD_BITS;
    if let Coefficients::Dirichlet(chi) = &spec.coefficients {
        // L(s, chi) = c^{-s} sum_{r=1}^{c} chi(r) zeta(s, r / c)
        let c = chi.modulus();
        let s = Complex::with_val(wp, s);
        let mut acc = Complex::new(wp);
        for r in 1..=c {
            let v = chi.value_complex(r, wp);
            if v.is_zero() {
                continue;
            }
            let x = Float::with_val(wp, Rational::from((r, c)));
            acc += v * mp::hurwitz_zeta(&s, &x, wp);
        }
        let cs = mp::real_pow(&Float::with_val(wp, c), &Complex::with_val(wp, -&s), wp);
        return Ok((Complex::with_val(prec, acc * cs), 0));
    }
    let sp = sigma - w / 2.0;
    let target = -((prec + GUARD_BITS) as f64) * std::f64::consts::LN_2;
    let tail = |t: f64| -> f64 {
        // sigma' T^{1 - sigma'} ((ln T + 1) / (sigma' - 1) + 1 / (sigma' - 1)^2)
        sp.ln() + (1.0 - sp) * t.ln() + ((t.ln() + 1.0) / (sp - 1.0) + 1.0 / (sp - 1.0).powi(2)).ln()
    };
    let mut n = 16usize;
    while tail(n as f64) > target {
        n = n * 5 / 4 + 1;
        if n > MAX_DIRECT_TERMS {
            return Err(Error::OutsideConvergence(format!(
                "more than {MAX_DIRECT_TERMS} terms needed at Re(s) = {sigma}; use the completed L-function"
            )));
        }
    }
    let coeffs = spec.coefficients(n, wp);
    let s = Complex::with_val(wp, s);
    let neg = Complex::with_val(wp, -&s);
    let terms: Vec<Complex> = coeffs[..n]
        .par_iter()
        .enumerate()
        .map(|(i, a)| {
            if a.is_zero() {
                Complex::new(wp)
            } else {
                Complex::with_val(wp, a * mp::real_pow(&Float::with_val(wp, (i + 1) as u64), &neg, wp))
            }
        })
        .collect();
    let mut acc = Complex::new(wp);
    for t in terms {
        acc += t;
    }
    Ok((Complex::with_val(prec, acc), n))
}

fn calibration_cache() -> &'static Mutex<HashMap<String, LSeriesSpec>> {
    static CACHE: OnceLock<Mutex<HashMap<String, LSeriesSpec>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Calibrated spec of the CM newform attached to `chi`, memoized per character and precision.
pub fn calibrated_form(chi: &HeckeChar, prec: u32) -> Result<LSeriesSpec> {
    let key = format!("{chi:?}/{prec}");
    if let Some(s) = calibration_cache().lock().unwrap().get(&key) {
        return Ok(s.clone());
    }
    let spec = calibrate(&LSeriesSpec::form(CMForm::new(chi.clone())), prec)?;
    calibration_cache().lock().unwrap().insert(key, spec.clone());
    Ok(spec)
}

/// `L(s, chi)` at an integer for a primitive character.
pub fn dirichlet_l_at_integer(chi: &DirichletChar, s: i64, prec: u32) -> Result<Complex> {
    let chi = chi.primitive();
    let parity_match = (s - chi.parity() as i64) % 2 == 0;
    if s >= 1 && parity_match {
        return chi.dirichlet_l(s as u32, prec);
    }
    if s <= 0 {
        // L(1 - j, chi) = -B_{j, chi} / j
        let j = (1 - s) as usize;
        let b = chi.bernoulli_gen(j)?.scale(&Rational::from((-1, j as i64)));
        return Ok(b.to_complex(prec));
    }
    let z = Complex::with_val(prec + GUARD_BITS, s);
    if s >= 2 {
        let spec = LSeriesSpec::dirichlet(&chi);
        return Ok(Complex::with_val(prec, dirichlet_sum(&spec, &z, prec)?.0));
    }
    let spec = calibrate(&LSeriesSpec::dirichlet(&chi), prec)?;
    Ok(completed_l(&spec, &z, prec)?.value)
}

/// `sum_{(n, M) = 1} psi(n) n^{-s}` for a character `psi` modulo `M`.
pub fn imprimitive_dirichlet_l(psi: &DirichletChar, s: i64, prec: u32) -> Result<Complex> {
    let prim = psi.primitive();
    let wp = prec + GUARD_BITS;
    let mut v = dirichlet_l_at_integer(&prim, s, wp)?;
    for (p, _) in factorize(psi.modulus()) {
        if prim.modulus() % p != 0 {
            let ps = Complex::with_val(wp, Float::with_val(wp, p).pow(-s as i32));
            v *= Complex::with_val(wp, 1u32 - prim.value_complex(p, wp) * ps);
        }
    }
    Ok(Complex::with_val(prec, v))
}

/// `sum_{(n, M) = 1} psi(n) a_n n^{-s}` for the form of `chi` and a character `psi` mod `M`.
///
/// Evaluated as the newform of `chi (psi_0 o N)` with the local factors at `p | M`, `p`
/// prime to the conductor of `psi_0`, removed. Needs `psi_0` prime to the level.
pub fn twisted_form_l(chi: &HeckeChar, psi: &DirichletChar, s: &Complex, prec: u32) -> Result<Complex> {
    let prim = psi.primitive();
    let form = CMForm::new(chi.clone());
    if gcd(prim.modulus(), form.level()) != 1 {
        return Err(Error::TwistNotCoprime { twist: prim.modulus(), level: form.level() });
    }
    let twisted = form.twist(&prim)?;
    let wp = prec + GUARD_BITS;
    let spec = calibrated_form(twisted.character(), wp)?;
    let mut v = completed_l(&spec, s, wp)?.value;
    for (p, _) in factorize(psi.modulus()) {
        if prim.modulus() % p == 0 {
            continue;
        }
        let ef = twisted.euler_factor(p)?;
        let x = mp::real_pow(&Float::with_val(wp, p), &Complex::with_val(wp, -s), wp);
        let x2 = Complex::with_val(wp, &x * &x);
        let local = Complex::with_val(wp, 1u32) - ef.a_p.to_complex(wp) * x + ef.c2.to_complex(wp) * x2;
        v *= local;
    }
    Ok(Complex::with_val(prec, v))
}

#[derive(Clone, Debug)]
pub struct PieceValue {
    pub label: String,
    pub point: i64,
    pub value: Complex,
}

#[derive(Clone, Debug)]
pub struct CriticalValue {
    pub value: Complex,
    /// False when `m` is not critical; the value is still computed.
    pub critical: bool,
    pub pieces: Vec<PieceValue>,
}

/// `L_f(m, Sym^n phi_chi (x) twist)` as the product of its degree one and two pieces.
pub fn critical_l_value(
    chi: &HeckeChar,
    n: u32,
    m: i64,
    twist: &DirichletChar,
    prec: u32,
) -> Result<CriticalValue> {
    let critical = critical_set(chi.weight(), n).contains(&m);
    let wp = prec + GUARD_BITS;
    let mut value = Complex::with_val(wp, 1);
    let mut pieces = Vec::new();
    for comp in isobaric_decomposition(chi, n)? {
        let point = m - comp.shift() as i64;
        let v = match &comp {
            IsobaricComponent::Gl1 { character, .. } => {
                imprimitive_dirichlet_l(&character.mul(twist), point, wp)?
            }
            IsobaricComponent::Gl2 { chi: c, twist: t, .. } => {
                twisted_form_l(c, &t.mul(twist), &Complex::with_val(wp, point), wp)?
            }
        };
        value *= &v;
        pieces.push(PieceValue { label: comp.label().to_string(), point, value: Complex::with_val(prec, v) });
    }
    Ok(CriticalValue { value: Complex::with_val(prec, value), critical, pieces })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hecke::CharSpec;

    #[test]
    fn zeta_two() {
        let spec = LSeriesSpec::dirichlet(&DirichletChar::trivial(1));
        let (v, _) = dirichlet_sum(&spec, &Complex::with_val(128, 2), 128).unwrap();
        let pi2 = Float::with_val(128, mp::pi(128).square_ref()) / 6u32;
        assert!(mp::rel_err(&v, &Complex::with_val(128, pi2)) < 1e-35);
    }

    #[test]
    fn zeta_afe() {
        let spec = calibrate(&LSeriesSpec::dirichlet(&DirichletChar::trivial(1)), 128).unwrap();
        let eps = spec.root_number.clone().unwrap();
        assert!(mp::rel_err(&eps, &Complex::with_val(128, 1)) < 1e-30);
        let v = completed_l(&spec, &Complex::with_val(128, 2), 128).unwrap().value;
        let pi2 = Float::with_val(128, mp::pi(128).square_ref()) / 6u32;
        assert!(mp::rel_err(&v, &Complex::with_val(128, pi2)) < 1e-30);
    }

    #[test]
    fn outside_convergence() {
        let f = CMForm::new(HeckeChar::from_spec(&CharSpec::unramified(-7, 3)).unwrap());
        let spec = LSeriesSpec::form(f);
        assert!(matches!(
            dirichlet_sum(&spec, &Complex::with_val(64, 2), 64),
            Err(Error::OutsideConvergence(_))
        ));
    }

    #[test]
    fn form_two_paths() {
        let f = CMForm::new(HeckeChar::from_spec(&CharSpec::unramified(-7, 3)).unwrap());
        let spec = calibrate(&LSeriesSpec::form(f), 128).unwrap();
        let s = Complex::with_val(128, (25.5, 0.75));
        let afe = completed_l(&spec, &s, 128).unwrap().value;
        let (direct, _) = dirichlet_sum(&spec, &s, 128).unwrap();
        assert!(mp::rel_err(&afe, &direct) < 1e-30, "{afe} vs {direct}");
    }
}
