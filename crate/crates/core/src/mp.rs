//! Multiprecision special functions on top of MPFR/MPC.
//!
//! Everything here takes a target precision in bits and works internally
//! with a few guard bits; results are rounded to the requested precision.

use std::sync::{Mutex, OnceLock};

use rug::float::Constant;
use rug::ops::Pow;
use rug::{Complex, Float, Integer, Rational};

pub const GUARD_BITS: u32 = 32;

pub fn pi(prec: u32) -> Float {
    Float::with_val(prec, Constant::Pi)
}

pub fn two_pi_i(prec: u32) -> Complex {
    let two_pi = Float::with_val(prec, pi(prec) * 2u32);
    Complex::with_val(prec, (Float::new(prec), two_pi))
}

/// `exp(2 pi i num / den)`.
pub fn root_of_unity(den: i64, num: i64, prec: u32) -> Complex {
    let den = den.max(1);
    let num = num.rem_euclid(den);
    // exact values for the common small cases keep Gauss sums clean
    match (den, num) {
        (_, 0) => return Complex::with_val(prec, 1),
        (2, 1) => return Complex::with_val(prec, -1),
        (4, 1) => return Complex::with_val(prec, (0, 1)),
        (4, 3) => return Complex::with_val(prec, (0, -1)),
        _ => {}
    }
    let wp = prec + 8;
    let angle = Float::with_val(wp, pi(wp) * 2u32) * Float::with_val(wp, num) / Float::with_val(wp, den);
    let (s, c) = angle.sin_cos(Float::new(wp));
    Complex::with_val(prec, (c, s))
}

/// Bernoulli numbers `B_0..=B_n` with `B_1 = -1/2`.
pub fn bernoulli_numbers(n: usize) -> Vec<Rational> {
    static CACHE: OnceLock<Mutex<Vec<Rational>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(vec![Rational::from(1)]));
    let mut b = cache.lock().unwrap();
    while b.len() <= n {
        let m = b.len();
        // sum_{k=0}^{m} C(m+1, k) B_k = 0
        let mut acc = Rational::new();
        let mut binom = Integer::from(1);
        for (k, bk) in b.iter().enumerate() {
            acc += Rational::from(bk * &binom);
            binom = binom * (m + 1 - k) as u32 / (k + 1) as u32;
        }
        let bm = -acc / Rational::from(m as u32 + 1);
        b.push(bm);
    }
    b[..=n].to_vec()
}

/// Bernoulli polynomial `B_m(x)` at a rational point.
pub fn bernoulli_poly(m: usize, x: &Rational) -> Rational {
    let b = bernoulli_numbers(m);
    let mut acc = Rational::new();
    let mut binom = Integer::from(1);
    for (k, bk) in b.iter().enumerate() {
        // C(m,k) B_k x^{m-k}
        let xp = Rational::from(x.pow((m - k) as u32));
        acc += Rational::from(bk * &binom) * xp;
        binom = binom * (m - k) as u32 / (k + 1) as u32;
    }
    acc
}

/// True if `z` lies within `tol` of a non-positive integer.
fn near_nonpositive_integer(z: &Complex, tol: f64) -> bool {
    let re = z.real().to_f64();
    let im = z.imag().to_f64();
    im.abs() < tol && re < 0.5 && (re - re.round()).abs() < tol
}

/// Complex Gamma function.
pub fn gamma(z: &Complex, prec: u32) -> Complex {
    if z.imag().is_zero() {
        let g = Float::with_val(prec, z.real().gamma_ref());
        return Complex::with_val(prec, (g, 0));
    }
    let wp = prec + GUARD_BITS;
    let z = Complex::with_val(wp, z);
    if *z.real() < 0.5 {
        // reflection: Gamma(z) Gamma(1-z) = pi / sin(pi z)
        let one_minus = Complex::with_val(wp, 1 - &z);
        let g = gamma(&one_minus, wp);
        let s = Complex::with_val(wp, &z * pi(wp)).sin();
        let out = Complex::with_val(wp, pi(wp)) / (s * g);
        return Complex::with_val(prec, out);
    }
    Complex::with_val(prec, ln_gamma_right(&z, wp).exp())
}

/// log Gamma for Re z >= 1/2 by shifted Stirling series (principal branch not guaranteed).
fn ln_gamma_right(z: &Complex, wp: u32) -> Complex {
    let shift_to = (0.15 * wp as f64).max(12.0);
    let mut w = z.clone();
    let mut prod = Complex::with_val(wp, 1);
    while (w.real().to_f64()) < shift_to {
        prod *= &w;
        w += 1u32;
    }
    let half = Float::with_val(wp, 0.5);
    let ln_w = Complex::with_val(wp, w.ln_ref());
    let ln_2pi = Float::with_val(wp, pi(wp) * 2u32).ln();
    let mut acc = Complex::with_val(wp, &w - &half) * &ln_w - &w + Complex::with_val(wp, ln_2pi / 2u32);
    let w2 = Complex::with_val(wp, &w * &w);
    let mut wpow = w.clone();
    let eps = Float::with_val(wp, Float::i_exp(1, -(wp as i32)));
    let mut j = 1usize;
    loop {
        let b = &bernoulli_numbers(2 * j)[2 * j];
        let denom = Rational::from((2 * j * (2 * j - 1)) as u32);
        let coef = Float::with_val(wp, b / denom);
        let term = Complex::with_val(wp, &coef / &wpow);
        let small = Float::with_val(53, term.abs_ref()) < eps;
        acc += term;
        if small || j > 400 {
            break;
        }
        wpow *= &w2;
        j += 1;
    }
    acc - prod.ln()
}

fn exp_neg(x: &Float, prec: u32) -> Float {
    let mut v = Float::with_val(prec, -x);
    v.exp_mut();
    v
}

/// `x^z` for real `x > 0`.
pub fn real_pow(x: &Float, z: &Complex, prec: u32) -> Complex {
    let lx = Float::with_val(prec + 8, x.ln_ref());
    Complex::with_val(prec, (Complex::with_val(prec + 8, z * lx)).exp())
}

/// Upper incomplete Gamma `Gamma(z, x)` for complex `z` and real `x > 0`.
pub fn gamma_upper(z: &Complex, x: &Float, prec: u32) -> Complex {
    assert!(*x > 0, "incomplete gamma needs x > 0");
    let xf = x.to_f64();
    let zabs = Float::with_val(53, z.abs_ref()).to_f64();
    let switch = 30f64.max(zabs + 1.0);
    if xf >= switch || near_nonpositive_integer(z, 0.25) {
        gamma_upper_cf(z, x, prec)
    } else {
        gamma_upper_series(z, x, prec)
    }
}

/// Legendre continued fraction via modified Lentz.
fn gamma_upper_cf(z: &Complex, x: &Float, prec: u32) -> Complex {
    let wp = prec + GUARD_BITS;
    let z = Complex::with_val(wp, z);
    let x = Float::with_val(wp, x);
    let tiny = Float::with_val(wp, Float::i_exp(1, -(4 * wp as i32)));
    let eps = Float::with_val(wp, Float::i_exp(1, -(wp as i32) + 4));
    let fix = |v: Complex| -> Complex {
        if Float::with_val(53, v.abs_ref()) < tiny {
            Complex::with_val(wp, (&tiny, 0))
        } else {
            v
        }
    };
    // f = b0 + a1/(b1 + a2/(b2 + ...)),  b_j = x + 2j + 1 - z,  a_j = -j (j - z)
    let b0 = Complex::with_val(wp, &x + 1u32) - &z;
    let mut f = fix(b0);
    let mut c = f.clone();
    let mut d = Complex::with_val(wp, 0);
    let max_iter = 200_000;
    for j in 1..max_iter {
        let jf = j as u32;
        let a = Complex::with_val(wp, Complex::with_val(wp, jf) - &z) * -(jf as i32);
        let b = Complex::with_val(wp, &x + (2 * jf + 1)) - &z;
        d = fix(Complex::with_val(wp, &a * &d) + &b);
        d = Complex::with_val(wp, d.recip_ref());
        c = fix(Complex::with_val(wp, &a / &c) + &b);
        let delta = Complex::with_val(wp, &c * &d);
        f *= &delta;
        let dev = Float::with_val(53, Complex::with_val(wp, &delta - 1u32).abs_ref());
        if dev < eps {
            break;
        }
    }
    let pref = Complex::with_val(wp, real_pow(&x, &z, wp) * exp_neg(&x, wp));
    Complex::with_val(prec, pref / f)
}

/// Gamma(z) minus the lower incomplete gamma series.
fn gamma_upper_series(z: &Complex, x: &Float, prec: u32) -> Complex {
    // cancellation costs about x / ln 2 bits
    let extra = (x.to_f64() / std::f64::consts::LN_2).ceil() as u32 + 16;
    let wp = prec + GUARD_BITS + extra;
    let z = Complex::with_val(wp, z);
    let x = Float::with_val(wp, x);
    let eps = Float::with_val(wp, Float::i_exp(1, -(wp as i32)));
    let mut term = Complex::with_val(wp, z.recip_ref());
    let mut sum = term.clone();
    let mut k = 1u32;
    loop {
        let denom = Complex::with_val(wp, &z + k);
        term = Complex::with_val(wp, &term * &x) / denom;
        sum += &term;
        let t = Float::with_val(53, term.abs_ref());
        let s = Float::with_val(53, sum.abs_ref());
        if (k as f64) > x.to_f64() && t < Float::with_val(53, &s * &eps) {
            break;
        }
        k += 1;
        if k > 1_000_000 {
            break;
        }
    }
    let lower = Complex::with_val(wp, real_pow(&x, &z, wp) * exp_neg(&x, wp)) * sum;
    let g = gamma(&z, wp);
    Complex::with_val(prec, g - lower)
}

/// Hurwitz zeta `zeta(s, x) = sum_{n >= 0} (n + x)^{-s}` for `Re s > 1`, `x > 0`,
/// by Euler-Maclaurin summation.
pub fn hurwitz_zeta(s: &Complex, x: &Float, prec: u32) -> Complex {
    let wp = prec + GUARD_BITS;
    let s = Complex::with_val(wp, s);
    let x = Float::with_val(wp, x);
    let sabs = Float::with_val(53, s.abs_ref()).to_f64();
    let n_head = (wp as f64 * 0.4 + sabs).ceil() as u32 + 8;
    let mut acc = Complex::new(wp);
    let neg_s = Complex::with_val(wp, -&s);
    for n in 0..n_head {
        let base = Float::with_val(wp, &x + n);
        acc += real_pow(&base, &neg_s, wp);
    }
    let big = Float::with_val(wp, &x + n_head);
    let one_minus = Complex::with_val(wp, 1 - &s);
    acc += real_pow(&big, &one_minus, wp) / Complex::with_val(wp, &s - 1u32);
    let head = real_pow(&big, &neg_s, wp);
    acc += Complex::with_val(wp, &head / 2u32);
    // sum_j B_{2j}/(2j)! s (s+1) ... (s+2j-2) big^{-s-2j+1}
    let big2 = Float::with_val(wp, &big * &big);
    let mut rising = s.clone();
    let mut pw = Complex::with_val(wp, &head / &big);
    let mut fact = Integer::from(2);
    let eps = Float::with_val(wp, Float::i_exp(1, -(wp as i32)));
    let mut j = 1usize;
    loop {
        let b = &bernoulli_numbers(2 * j)[2 * j];
        let coef = Float::with_val(wp, b.clone() / Rational::from(fact.clone()));
        let term = Complex::with_val(wp, &rising * &pw) * coef;
        let small = Float::with_val(53, term.abs_ref()) < Float::with_val(53, acc.abs_ref()) * &eps;
        acc += &term;
        if small || j > 2000 {
            break;
        }
        rising *= Complex::with_val(wp, &s + (2 * j - 1) as u32);
        rising *= Complex::with_val(wp, &s + (2 * j) as u32);
        pw /= &big2;
        fact *= (2 * j + 1) as u32;
        fact *= (2 * j + 2) as u32;
        j += 1;
    }
    Complex::with_val(prec, acc)
}

/// `|a - b| / max(|b|, tiny)` as an f64 in log2 form friendly units.
pub fn rel_err(a: &Complex, b: &Complex) -> Float {
    let p = a.prec().0.max(b.prec().0);
    let diff = Float::with_val(p, Complex::with_val(p, a - b).abs_ref());
    let den = Float::with_val(p, b.abs_ref());
    if den.is_zero() {
        diff
    } else {
        diff / den
    }
}

/// `log2 |z|`, or -inf for zero.
pub fn log2_abs(z: &Complex) -> f64 {
    let a = Float::with_val(z.prec().0.max(64), z.abs_ref());
    if a.is_zero() {
        f64::NEG_INFINITY
    } else {
        a.log2().to_f64()
    }
}

pub fn complex_pow_int(z: &Complex, e: i64, prec: u32) -> Complex {
    let base = Complex::with_val(prec, z);
    if e >= 0 {
        Complex::with_val(prec, base.pow(e as u32))
    } else {
        Complex::with_val(prec, base.pow(-e as u32)).recip()
    }
}
