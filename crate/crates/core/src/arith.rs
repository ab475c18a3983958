//! Small-integer number theory used throughout the crate.

pub fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub fn lcm(a: i64, b: i64) -> i64 {
    if a == 0 || b == 0 {
        return 0;
    }
    (a / gcd(a, b) * b).abs()
}

pub fn modpow(base: i64, mut exp: u64, m: i64) -> i64 {
    if m == 1 {
        return 0;
    }
    let m128 = m as i128;
    let mut b = (base as i128).rem_euclid(m128);
    let mut acc: i128 = 1;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m128;
        }
        b = b * b % m128;
        exp >>= 1;
    }
    acc as i64
}

pub fn is_prime(n: i64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Prime factorization by trial division, as (prime, exponent) pairs in increasing order.
pub fn factorize(n: i64) -> Vec<(i64, u32)> {
    let mut n = n.abs();
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn divisors(n: i64) -> Vec<i64> {
    let mut ds = vec![1i64];
    for (p, e) in factorize(n) {
        let len = ds.len();
        let mut pk = 1;
        for _ in 0..e {
            pk *= p;
            for i in 0..len {
                ds.push(ds[i] * pk);
            }
        }
    }
    ds.sort_unstable();
    ds
}

pub fn primes_below(bound: i64) -> Vec<i64> {
    if bound <= 2 {
        return Vec::new();
    }
    let n = bound as usize;
    let mut sieve = vec![true; n];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i < n {
        if sieve[i] {
            let mut j = i * i;
            while j < n {
                sieve[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    sieve
        .iter()
        .enumerate()
        .filter(|(_, &b)| b)
        .map(|(i, _)| i as i64)
        .collect()
}

pub fn is_squarefree(n: i64) -> bool {
    n != 0 && factorize(n).iter().all(|&(_, e)| e == 1)
}

pub fn euler_phi(n: i64) -> i64 {
    factorize(n)
        .iter()
        .fold(n, |acc, &(p, _)| acc / p * (p - 1))
}

/// Jacobi symbol (a|n) for odd positive n.
pub fn jacobi(a: i64, n: i64) -> i32 {
    debug_assert!(n > 0 && n % 2 == 1);
    let mut a = a.rem_euclid(n);
    let mut n = n;
    let mut t = 1;
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            let r = n % 8;
            if r == 3 || r == 5 {
                t = -t;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            t = -t;
        }
        a %= n;
    }
    if n == 1 {
        t
    } else {
        0
    }
}

/// Kronecker symbol (d|n) for n >= 0.
pub fn kronecker(d: i64, n: i64) -> i32 {
    assert!(n >= 0);
    if n == 0 {
        return if d.abs() == 1 { 1 } else { 0 };
    }
    let mut n = n;
    let mut result = 1;
    let mut twos = 0;
    while n % 2 == 0 {
        n /= 2;
        twos += 1;
    }
    if twos > 0 {
        if d % 2 == 0 {
            return 0;
        }
        let r = d.rem_euclid(8);
        if (r == 3 || r == 5) && twos % 2 == 1 {
            result = -result;
        }
    }
    if n == 1 {
        return result;
    }
    result * jacobi(d, n)
}

/// Kronecker symbol extended to negative arguments: (d|-1) = sign(d).
pub fn kronecker_signed(d: i64, n: i64) -> i32 {
    if n < 0 {
        let s = if d < 0 { -1 } else { 1 };
        s * kronecker(d, -n)
    } else {
        kronecker(d, n)
    }
}

/// Integer square root (floor).
pub fn isqrt(n: i64) -> i64 {
    if n < 0 {
        return -1;
    }
    let mut r = (n as f64).sqrt() as i64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn modinv(a: i64, m: i64) -> Option<i64> {
    let (mut old_r, mut r) = (a.rem_euclid(m), m);
    let (mut old_s, mut s) = (1i64, 0i64);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(m))
}

/// Chinese remainder for pairwise coprime moduli.
pub fn crt(residues: &[(i64, i64)]) -> (i64, i64) {
    let mut x = 0i64;
    let mut m = 1i64;
    for &(r, mi) in residues {
        let inv = modinv(m % mi, mi).expect("moduli must be coprime");
        let t = ((r - x).rem_euclid(mi) as i128 * inv as i128 % mi as i128) as i64;
        x += m * t;
        m *= mi;
        x = x.rem_euclid(m);
    }
    (x, m)
}

/// Square root of `a` modulo an odd prime `p` (Tonelli-Shanks), if `a` is a square.
pub fn sqrt_mod_prime(a: i64, p: i64) -> Option<i64> {
    let a = a.rem_euclid(p);
    if a == 0 {
        return Some(0);
    }
    if p == 2 {
        return Some(a);
    }
    if modpow(a, ((p - 1) / 2) as u64, p) != 1 {
        return None;
    }
    let (mut q, mut s) = (p - 1, 0u32);
    while q % 2 == 0 {
        q /= 2;
        s += 1;
    }
    let z = (2..p).find(|&z| modpow(z, ((p - 1) / 2) as u64, p) == p - 1).unwrap();
    let mul = |x: i64, y: i64| ((x as i128 * y as i128) % p as i128) as i64;
    let mut m = s;
    let mut c = modpow(z, q as u64, p);
    let mut t = modpow(a, q as u64, p);
    let mut r = modpow(a, ((q + 1) / 2) as u64, p);
    while t != 1 {
        let mut i = 0;
        let mut t2 = t;
        while t2 != 1 {
            t2 = mul(t2, t2);
            i += 1;
        }
        let mut b = c;
        for _ in 0..(m - i - 1) {
            b = mul(b, b);
        }
        m = i;
        c = mul(b, b);
        t = mul(t, c);
        r = mul(r, b);
    }
    Some(r)
}

/// Whether `d` is a fundamental discriminant (including 1).
pub fn is_fundamental_discriminant(d: i64) -> bool {
    if d == 1 {
        return true;
    }
    if d == 0 {
        return false;
    }
    match d.rem_euclid(4) {
        1 => is_squarefree(d),
        0 => {
            let m = d / 4;
            let r = m.rem_euclid(4);
            (r == 2 || r == 3) && is_squarefree(m)
        }
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kronecker_matches_euler_criterion() {
        for p in primes_below(60).into_iter().filter(|&p| p > 2) {
            for a in -20..20i64 {
                let e = modpow(a, ((p - 1) / 2) as u64, p);
                let expected = if a.rem_euclid(p) == 0 {
                    0
                } else if e == 1 {
                    1
                } else {
                    -1
                };
                assert_eq!(kronecker(a, p), expected, "({a}|{p})");
            }
        }
    }

    #[test]
    fn kronecker_at_two() {
        assert_eq!(kronecker(-7, 2), 1);
        assert_eq!(kronecker(-3, 2), -1);
        assert_eq!(kronecker(-4, 2), 0);
        assert_eq!(kronecker(5, 2), -1);
    }

    #[test]
    fn fundamental_discriminants() {
        let fund: Vec<i64> = (-30..0).filter(|&d| is_fundamental_discriminant(d)).collect();
        assert_eq!(
            fund,
            vec![-24, -23, -20, -19, -15, -11, -8, -7, -4, -3]
        );
    }

    #[test]
    fn square_roots_mod_p() {
        for p in primes_below(200).into_iter().filter(|&p| p > 2) {
            for a in 0..p {
                match sqrt_mod_prime(a, p) {
                    Some(r) => assert_eq!(r * r % p, a),
                    None => assert_eq!(kronecker(a, p), -1),
                }
            }
        }
    }

    #[test]
    fn crt_and_divisors() {
        assert_eq!(crt(&[(2, 3), (3, 5), (2, 7)]), (23, 105));
        assert_eq!(divisors(12), vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(euler_phi(20), 8);
        assert_eq!(modinv(3, 7), Some(5));
    }
}
