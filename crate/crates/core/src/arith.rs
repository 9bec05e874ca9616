//! Elementary number-theoretic utilities on machine integers: factorization
//! by trial division, Euler's totient, the Moebius function, divisors, and
//! greatest common divisors. Inputs here are desk-scale (indices of
//! cyclotomic fields, ranks), so trial division is entirely adequate.

/// Greatest common divisor of two signed integers (result is non-negative).
pub fn gcd_i64(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.unsigned_abs(), b.unsigned_abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a as i64
}

/// Extended gcd: returns `(g, x, y)` with `a*x + b*y = g = gcd(a, b)`,
/// `g >= 0`.
pub fn egcd_i64(a: i64, b: i64) -> (i64, i64, i64) {
    if b == 0 {
        if a < 0 {
            (-a, -1, 0)
        } else {
            (a, 1, 0)
        }
    } else {
        let (g, x, y) = egcd_i64(b, a.rem_euclid(b));
        (g, y, x - a.div_euclid(b) * y)
    }
}

/// Prime factorization `n = prod p_i^{e_i}` as `(p_i, e_i)` pairs, `n >= 1`.
pub fn factor(mut n: u64) -> Vec<(u64, u32)> {
    assert!(n >= 1, "factor requires n >= 1");
    let mut out = Vec::new();
    let mut p = 2u64;
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

/// Euler's totient.
pub fn euler_phi(n: u64) -> u64 {
    assert!(n >= 1);
    let mut phi = n;
    for (p, _) in factor(n) {
        phi = phi / p * (p - 1);
    }
    phi
}

/// Moebius function: `0` if `n` has a squared prime factor, else
/// `(-1)^{number of prime factors}`.
pub fn moebius(n: u64) -> i64 {
    assert!(n >= 1);
    let f = factor(n);
    if f.iter().any(|&(_, e)| e > 1) {
        0
    } else if f.len() % 2 == 0 {
        1
    } else {
        -1
    }
}

/// All positive divisors of `n`, ascending.
pub fn divisors(n: u64) -> Vec<u64> {
    assert!(n >= 1);
    let mut ds = vec![1u64];
    for (p, e) in factor(n) {
        let prev = ds.clone();
        let mut pk = 1u64;
        for _ in 0..e {
            pk *= p;
            for d in &prev {
                ds.push(d * pk);
            }
        }
    }
    ds.sort_unstable();
    ds
}

/// `true` when `n` is prime.
pub fn is_prime(n: u64) -> bool {
    n >= 2 && factor(n) == vec![(n, 1)]
}
