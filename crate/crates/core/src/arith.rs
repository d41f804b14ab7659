//! Integer substrate: prime tables, Kronecker symbols, squarefree parts,
//! fundamental discriminants and the `omega_Y` counter.

use crate::error::{Error, Result};

/// All primes up to a fixed limit, in increasing order.
#[derive(Debug, Clone)]
pub struct PrimeTable {
    limit: u64,
    primes: Vec<u64>,
}

impl PrimeTable {
    /// Sieve of Eratosthenes up to `limit` inclusive.
    pub fn new(limit: u64) -> Self {
        let n = limit as usize;
        let mut composite = vec![false; n + 1];
        let mut primes = Vec::new();
        for i in 2..=n {
            if composite[i] {
                continue;
            }
            primes.push(i as u64);
            let mut j = i.saturating_mul(i);
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
        PrimeTable { limit, primes }
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    /// Primes strictly below `t`.
    pub fn below(&self, t: u64) -> &[u64] {
        let k = self.primes.partition_point(|&p| p < t);
        &self.primes[..k]
    }

    pub fn contains(&self, n: u64) -> bool {
        self.primes.binary_search(&n).is_ok()
    }

    /// Factor `n` by trial division over the table, falling back to Pollard rho
    /// for a cofactor that survives.
    pub fn factor(&self, n: u64) -> Vec<(u64, u32)> {
        let mut out = Vec::new();
        let mut m = n;
        for &p in &self.primes {
            if p * p > m {
                break;
            }
            if m % p == 0 {
                let mut e = 0;
                while m % p == 0 {
                    m /= p;
                    e += 1;
                }
                out.push((p, e));
            }
        }
        if m > 1 {
            let bound = self.primes.last().copied().unwrap_or(1);
            if bound.saturating_mul(bound) >= m {
                out.push((m, 1));
            } else {
                merge_factors(&mut out, factor(m));
            }
        }
        out.sort_unstable();
        out
    }
}

fn merge_factors(out: &mut Vec<(u64, u32)>, more: Vec<(u64, u32)>) {
    for (p, e) in more {
        match out.iter_mut().find(|(q, _)| *q == p) {
            Some(slot) => slot.1 += e,
            None => out.push((p, e)),
        }
    }
}

/// Smallest-prime-factor table for batched factorization of every n up to a limit.
#[derive(Debug, Clone)]
pub struct SpfSieve {
    spf: Vec<u32>,
}

impl SpfSieve {
    pub fn new(limit: usize) -> Self {
        let mut spf = vec![0u32; limit + 1];
        for i in 2..=limit {
            if spf[i] != 0 {
                continue;
            }
            let mut j = i;
            while j <= limit {
                if spf[j] == 0 {
                    spf[j] = i as u32;
                }
                j += i;
            }
        }
        SpfSieve { spf }
    }

    pub fn limit(&self) -> usize {
        self.spf.len() - 1
    }

    /// Smallest prime factor of `n >= 2`.
    pub fn spf(&self, n: usize) -> u64 {
        self.spf[n] as u64
    }

    pub fn is_prime(&self, n: usize) -> bool {
        n >= 2 && self.spf[n] as usize == n
    }

    pub fn factor(&self, n: usize) -> Vec<(u64, u32)> {
        let mut out: Vec<(u64, u32)> = Vec::new();
        let mut m = n;
        while m > 1 {
            let p = self.spf[m] as usize;
            let mut e = 0;
            while m % p == 0 {
                m /= p;
                e += 1;
            }
            out.push((p as u64, e));
        }
        out
    }
}

pub(crate) fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub(crate) fn gcd_i(a: i128, b: i128) -> i128 {
    gcd(a.unsigned_abs(), b.unsigned_abs()) as i128
}

/// Extended Euclid: returns (g, x, y) with a*x + b*y = g >= 0.
pub(crate) fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut r0, mut r1) = (a, b);
    let (mut s0, mut s1) = (1i128, 0i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0.div_euclid(r1);
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 < 0 {
        (-r0, -s0, -t0)
    } else {
        (r0, s0, t0)
    }
}

/// Floor of the square root.
pub fn isqrt(n: u128) -> u128 {
    if n < 2 {
        return n;
    }
    let mut x = (n as f64).sqrt() as u128;
    while x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}

pub fn is_square(n: i128) -> bool {
    n >= 0 && {
        let r = isqrt(n as u128);
        r * r == n as u128
    }
}

/// Jacobi symbol (a/n) for odd positive n.
pub fn jacobi(a: u64, n: u64) -> i32 {
    debug_assert!(n % 2 == 1);
    let mut a = a % n;
    let mut n = n;
    let mut t = 1;
    while a != 0 {
        let z = a.trailing_zeros();
        a >>= z;
        if z % 2 == 1 && (n % 8 == 3 || n % 8 == 5) {
            t = -t;
        }
        if a % 4 == 3 && n % 4 == 3 {
            t = -t;
        }
        std::mem::swap(&mut a, &mut n);
        a %= n;
    }
    if n == 1 {
        t
    } else {
        0
    }
}

/// Kronecker symbol (a/n), with the standard extension to n even, negative or zero.
pub fn kronecker(a: i64, n: i64) -> i32 {
    if n == 0 {
        return if a == 1 || a == -1 { 1 } else { 0 };
    }
    let mut result = 1;
    let mut m = n.unsigned_abs();
    if n < 0 && a < 0 {
        result = -result;
    }
    let v = m.trailing_zeros();
    if v > 0 {
        if a % 2 == 0 {
            return 0;
        }
        let r = a.rem_euclid(8);
        if v % 2 == 1 && (r == 3 || r == 5) {
            result = -result;
        }
        m >>= v;
    }
    if m == 1 {
        return result;
    }
    result * jacobi(a.rem_euclid(m as i64) as u64, m)
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub(crate) fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

/// Square root of `a` modulo an odd prime `p` (Tonelli-Shanks), if `a` is a residue.
pub(crate) fn sqrt_mod(a: u64, p: u64) -> Option<u64> {
    let a = a % p;
    if a == 0 {
        return Some(0);
    }
    if pow_mod(a, (p - 1) / 2, p) != 1 {
        return None;
    }
    let s = (p - 1).trailing_zeros();
    let q = (p - 1) >> s;
    let mut z = 2;
    while pow_mod(z, (p - 1) / 2, p) != p - 1 {
        z += 1;
    }
    let mut m = s;
    let mut c = pow_mod(z, q, p);
    let mut t = pow_mod(a, q, p);
    let mut r = pow_mod(a, (q + 1) / 2, p);
    while t != 1 {
        let mut i = 0;
        let mut t2 = t;
        while t2 != 1 {
            t2 = mul_mod(t2, t2, p);
            i += 1;
        }
        let b = pow_mod(c, 1 << (m - i - 1), p);
        m = i;
        c = mul_mod(b, b, p);
        t = mul_mod(t, c, p);
        r = mul_mod(r, b, p);
    }
    Some(r)
}

/// Deterministic Miller-Rabin for 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn pollard_brent(n: u64) -> u64 {
    if n % 2 == 0 {
        return 2;
    }
    let mut c = 1u64;
    loop {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut x, mut y, mut g, mut q) = (2u64, 2u64, 1u64, 1u64);
        let mut ys = 2u64;
        let mut r = 1u64;
        const M: u64 = 64;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..M.min(r - k) {
                    y = f(y);
                    q = mul_mod(q, x.abs_diff(y), n);
                }
                g = gcd(q as u128, n as u128) as u64;
                k += M;
            }
            r *= 2;
        }
        if g == n {
            loop {
                ys = f(ys);
                g = gcd(x.abs_diff(ys) as u128, n as u128) as u64;
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return g;
        }
        c += 1;
    }
}

/// Prime factorization of `n >= 1`, sorted by prime.
pub fn factor(n: u64) -> Vec<(u64, u32)> {
    let mut out: Vec<(u64, u32)> = Vec::new();
    let mut m = n;
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47] {
        if m % p == 0 {
            let mut e = 0;
            while m % p == 0 {
                m /= p;
                e += 1;
            }
            out.push((p, e));
        }
    }
    let mut stack = vec![m];
    while let Some(k) = stack.pop() {
        if k == 1 {
            continue;
        }
        if is_prime(k) {
            merge_factors(&mut out, vec![(k, 1)]);
            continue;
        }
        let r = isqrt(k as u128) as u64;
        if r * r == k {
            stack.push(r);
            stack.push(r);
            continue;
        }
        let f = pollard_brent(k);
        stack.push(f);
        stack.push(k / f);
    }
    out.sort_unstable();
    out
}

/// Number of distinct prime divisors of `n != 0`.
pub fn omega(n: i64) -> u32 {
    factor(n.unsigned_abs()).len() as u32
}

/// Write `n = s * f^2` with `s` squarefree and `sign(s) = sign(n)`.
pub fn squarefree_decompose(n: i64) -> Result<(i64, u64)> {
    if n == 0 {
        return Err(Error::Zero);
    }
    let (mut s, mut f) = (1i64, 1u64);
    for (p, e) in factor(n.unsigned_abs()) {
        if e % 2 == 1 {
            s *= p as i64;
        }
        f *= p.pow(e / 2);
    }
    Ok((n.signum() * s, f))
}

/// Squarefree part of a nonzero integer.
pub fn core(n: i64) -> i64 {
    squarefree_decompose(n).map(|(s, _)| s).unwrap_or(0)
}

pub fn is_squarefree(n: i64) -> bool {
    n != 0 && factor(n.unsigned_abs()).iter().all(|&(_, e)| e == 1)
}

/// Discriminant of `Q(sqrt d)`: `d` if `d = 1 mod 4`, else `4d`.
pub fn fundamental_discriminant_of(d: i64) -> Result<i64> {
    if d == 0 || d == 1 {
        return Err(Error::Degenerate(d));
    }
    if !is_squarefree(d) {
        return Err(Error::NotSquarefree(d));
    }
    Ok(if d.rem_euclid(4) == 1 { d } else { 4 * d })
}

/// True iff `D` is the discriminant of a quadratic field (so `D = 1` is excluded).
pub fn is_fundamental(disc: i64) -> bool {
    if disc == 0 || disc == 1 {
        return false;
    }
    match disc.rem_euclid(4) {
        1 => is_squarefree(disc),
        0 => {
            let m = disc / 4;
            matches!(m.rem_euclid(4), 2 | 3) && is_squarefree(m)
        }
        _ => false,
    }
}

/// Squarefree flags for `lo..=hi` via marking multiples of `p^2`.
pub(crate) fn squarefree_block(lo: u64, hi: u64) -> Vec<bool> {
    let mut flags = vec![true; (hi - lo + 1) as usize];
    let r = isqrt(hi as u128) as u64;
    for &p in PrimeTable::new(r).primes() {
        let q = p * p;
        let mut m = lo.div_ceil(q) * q;
        while m <= hi {
            flags[(m - lo) as usize] = false;
            m += q;
        }
    }
    if lo == 0 {
        flags[0] = false;
    }
    flags
}

/// Fundamental discriminants with `lo <= |D| <= hi`, ordered by `|D|`, negative first.
pub fn fundamental_discriminants_between(lo: u64, hi: u64) -> Vec<i64> {
    let lo = lo.max(1);
    if hi < lo {
        return Vec::new();
    }
    // |D| = 4m needs m up to hi/4 inside the same flag block, so sieve from lo/4.
    let base = lo / 4;
    let flags = squarefree_block(base.max(1), hi);
    let sqf = |n: u64| n >= base.max(1) && flags[(n - base.max(1)) as usize];
    let mut out = Vec::new();
    for a in lo..=hi {
        for sign in [-1i64, 1] {
            let disc = sign * a as i64;
            let ok = match disc.rem_euclid(4) {
                1 => sqf(a),
                0 => {
                    let m = disc / 4;
                    matches!(m.rem_euclid(4), 2 | 3) && sqf(a / 4)
                }
                _ => false,
            };
            if ok && disc != 1 {
                out.push(disc);
            }
        }
    }
    out
}

/// Every fundamental discriminant with `0 < |D| <= x`, ordered by `|D|`.
pub fn enumerate_fundamental_discriminants(x: u64) -> Vec<i64> {
    fundamental_discriminants_between(1, x)
}

/// Block boundaries partitioning `1..=x` for independent processing.
pub fn discriminant_blocks(x: u64, block: u64) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    let mut lo = 1;
    while lo <= x {
        let hi = (lo + block - 1).min(x);
        out.push((lo, hi));
        lo = hi + 1;
    }
    out
}

/// Number of distinct primes `p <= y` dividing `d`.
pub fn omega_y(d: i64, y: u64) -> u32 {
    factor(d.unsigned_abs())
        .iter()
        .filter(|&&(p, _)| p <= y)
        .count() as u32
}

/// `omega_y` for many values sharing one list of small primes.
pub(crate) fn omega_y_with(d: i64, small_primes: &[u64]) -> u8 {
    let a = d.unsigned_abs();
    small_primes.iter().filter(|&&p| a % p == 0).count() as u8
}
