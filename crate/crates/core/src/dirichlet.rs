//! Real Dirichlet characters, exact `L(1, chi)` and `L(2, chi)`, and the
//! truncated prime sum for `log L(1, chi)`.
//!
//! Primitive values come from two independent routes: the finite character
//! sums (used for conductors up to [`FINITE_SUM_MAX`]) and the incomplete-gamma
//! expansion of the completed L-function, which needs only `O(sqrt q)` terms.

use std::f64::consts::PI;

use serde::Serialize;

use crate::arith::{factor, gcd, is_fundamental, jacobi, kronecker, PrimeTable};
use crate::error::{Error, Result};
use crate::special::{e1, erfc};

/// Conductors up to this size use the finite character sums for `L(1, chi)`.
pub const FINITE_SUM_MAX: u64 = 200_000;

/// Characters with `L(1, chi)` below this floor are flagged exceptional.
pub const EXCEPTIONAL_FLOOR: f64 = 1e-6;

pub const ZETA2: f64 = PI * PI / 6.0;

/// A real character mod `modulus`, induced from the Kronecker symbol of `conductor`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct QuadChar {
    modulus: u64,
    conductor: i64,
}

impl QuadChar {
    /// The primitive character `(disc / .)` of a fundamental discriminant.
    pub fn primitive(disc: i64) -> Result<Self> {
        if !is_fundamental(disc) {
            return Err(Error::NotFundamental(disc));
        }
        Ok(QuadChar { modulus: disc.unsigned_abs(), conductor: disc })
    }

    /// `(disc / .)` viewed mod `modulus`; `disc = 1` gives the principal character.
    pub fn induced(disc: i64, modulus: u64) -> Result<Self> {
        if disc != 1 && !is_fundamental(disc) {
            return Err(Error::NotFundamental(disc));
        }
        if modulus == 0 || modulus % disc.unsigned_abs() != 0 {
            return Err(Error::Parameter(format!("conductor {disc} does not divide {modulus}")));
        }
        Ok(QuadChar { modulus, conductor: disc })
    }

    pub fn principal(modulus: u64) -> Self {
        QuadChar { modulus: modulus.max(1), conductor: 1 }
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// The fundamental discriminant of the primitive core (1 if principal).
    pub fn conductor(&self) -> i64 {
        self.conductor
    }

    pub fn is_principal(&self) -> bool {
        self.conductor == 1
    }

    pub fn is_primitive(&self) -> bool {
        self.modulus == self.conductor.unsigned_abs()
    }

    pub fn is_even(&self) -> bool {
        self.conductor > 0
    }

    pub fn eval(&self, n: i64) -> i32 {
        if gcd(n.unsigned_abs() as u128, self.modulus as u128) != 1 {
            return 0;
        }
        if self.is_principal() {
            1
        } else {
            kronecker(self.conductor, n)
        }
    }

    /// Primes dividing the modulus but not the conductor.
    pub fn extra_primes(&self) -> Vec<u64> {
        let c = self.conductor.unsigned_abs();
        factor(self.modulus)
            .into_iter()
            .map(|(p, _)| p)
            .filter(|p| c % p != 0)
            .collect()
    }
}

/// All real characters mod a fixed modulus.
#[derive(Debug, Clone, Serialize)]
pub struct CharFamily {
    pub modulus: u64,
    pub members: Vec<QuadChar>,
}

impl CharFamily {
    /// The nonprincipal members.
    pub fn nonprincipal(&self) -> impl Iterator<Item = &QuadChar> {
        self.members.iter().filter(|c| !c.is_principal())
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

fn divisors(n: u64) -> Vec<u64> {
    let mut ds = vec![1u64];
    for (p, e) in factor(n) {
        let mut next = Vec::with_capacity(ds.len() * (e as usize + 1));
        for &d in &ds {
            let mut pk = 1;
            for _ in 0..=e {
                next.push(d * pk);
                pk *= p;
            }
        }
        ds = next;
    }
    ds.sort_unstable();
    ds
}

/// Every real character mod `modulus`, each tagged with its conductor.
pub fn quadratic_characters_mod(modulus: u64) -> Result<CharFamily> {
    if modulus < 3 {
        return Err(Error::Parameter(format!("modulus {modulus} < 3")));
    }
    let mut members = vec![QuadChar::principal(modulus)];
    for g in divisors(modulus).into_iter().skip(1) {
        for s in [-1i64, 1] {
            let disc = s * g as i64;
            if is_fundamental(disc) {
                members.push(QuadChar { modulus, conductor: disc });
            }
        }
    }
    Ok(CharFamily { modulus, members })
}

/// `L(1, chi)` by the finite sums: `-pi/|D|^{3/2} sum chi(a) a` for `D < 0`,
/// `-(1/sqrt D) sum chi(a) log sin(pi a / D)` for `D > 0`.
pub fn l1_finite_sum(disc: i64) -> f64 {
    let q = disc.unsigned_abs();
    if disc < 0 {
        let mut s: i128 = 0;
        for a in 1..q {
            match jacobi_kron(disc, a) {
                1 => s += a as i128,
                -1 => s -= a as i128,
                _ => {}
            }
        }
        -PI * s as f64 / (q as f64).powf(1.5)
    } else {
        let mut terms = Vec::with_capacity(q as usize / 2);
        for a in 1..q.div_ceil(2) {
            let c = jacobi_kron(disc, a);
            if c != 0 {
                terms.push(c as f64 * (PI * a as f64 / q as f64).sin().ln());
            }
        }
        -2.0 * crate::special::pairwise_sum(&terms) / (q as f64).sqrt()
    }
}

fn jacobi_kron(disc: i64, a: u64) -> i32 {
    if a % 2 == 1 {
        jacobi(disc.rem_euclid(a as i64) as u64, a)
    } else {
        kronecker(disc, a as i64)
    }
}

/// `(L(1, chi), L(2, chi))` for the primitive character of `disc` via the
/// incomplete-gamma expansion of the completed L-function (root number 1).
pub fn l_values_theta(disc: i64) -> (f64, f64) {
    let q = disc.unsigned_abs() as f64;
    let sq = q.sqrt();
    let nmax = (40.0 * q / PI).sqrt().ceil() as u64 + 1;
    let even = disc > 0;
    let sqrt_pi = PI.sqrt();
    let (mut l1, mut l2) = (Vec::new(), Vec::new());
    for n in 1..=nmax {
        let c = jacobi_kron(disc, n);
        if c == 0 {
            continue;
        }
        let c = c as f64;
        let nf = n as f64;
        let x = PI * nf * nf / q;
        let sx = x.sqrt();
        let ex = (-x).exp();
        let ec = erfc(sx);
        let ei = e1(x);
        if even {
            l1.push(c * (ec / nf + ei / sq));
            let g = 2.0 * (ex / sx - sqrt_pi * ec);
            l2.push(c * (ex / (nf * nf) + PI.powf(1.5) * nf / q.powf(1.5) * g));
        } else {
            l1.push(c * (ex / nf + PI / sq * ec));
            let g32 = ec + 2.0 / sqrt_pi * sx * ex;
            l2.push(c * (g32 / (nf * nf) + nf * ei * (PI / q).powf(1.5) * 2.0 / sqrt_pi));
        }
    }
    (crate::special::pairwise_sum(&l1), crate::special::pairwise_sum(&l2))
}

/// `L(1, chi_D)` for the primitive character of a fundamental discriminant.
pub fn l1_exact(disc: i64) -> Result<f64> {
    if !is_fundamental(disc) {
        return Err(if disc == 1 { Error::Principal } else { Error::NotFundamental(disc) });
    }
    Ok(if disc.unsigned_abs() <= FINITE_SUM_MAX {
        l1_finite_sum(disc)
    } else {
        l_values_theta(disc).0
    })
}

/// `L(2, chi_D)` for a primitive character; `disc = 1` gives `zeta(2)`.
pub fn l2_exact(disc: i64) -> Result<f64> {
    if disc == 1 {
        return Ok(ZETA2);
    }
    if !is_fundamental(disc) {
        return Err(Error::NotFundamental(disc));
    }
    Ok(l_values_theta(disc).1)
}

/// `L(1, chi)` for a possibly imprimitive nonprincipal character.
pub fn l1_value(chi: &QuadChar) -> Result<f64> {
    if chi.is_principal() {
        return Err(Error::Principal);
    }
    let core = l1_exact(chi.conductor)?;
    Ok(chi
        .extra_primes()
        .iter()
        .fold(core, |acc, &p| acc * (1.0 - kronecker(chi.conductor, p as i64) as f64 / p as f64)))
}

/// `L(2, chi)`; the principal character mod `M` gives `zeta(2) prod_{p|M} (1 - p^-2)`.
pub fn l2_value(chi: &QuadChar) -> Result<f64> {
    let core = l2_exact(chi.conductor)?;
    Ok(chi.extra_primes().iter().fold(core, |acc, &p| {
        let c = if chi.is_principal() { 1.0 } else { kronecker(chi.conductor, p as i64) as f64 };
        acc * (1.0 - c / (p * p) as f64)
    }))
}

/// `sum_{p^k < T} chi(p)^k / (k p^k)`; `primes` must reach `T - 1`.
pub fn log_l1_truncated(chi: &QuadChar, t: u64, primes: &PrimeTable) -> Result<f64> {
    if t < 2 {
        return Err(Error::Parameter("T must be at least 2".into()));
    }
    if primes.limit() + 1 < t {
        return Err(Error::Parameter(format!("prime table ends at {} < T", primes.limit())));
    }
    let mut terms = Vec::new();
    for &p in primes.below(t) {
        let c = chi.eval(p as i64);
        if c == 0 {
            continue;
        }
        let mut pk = p;
        let mut k = 1u32;
        let mut ck = c;
        while pk < t {
            terms.push(ck as f64 / (k as f64 * pk as f64));
            match pk.checked_mul(p) {
                Some(n) => pk = n,
                None => break,
            }
            k += 1;
            ck *= c;
        }
    }
    Ok(crate::special::pairwise_sum(&terms))
}

/// True when an exactly computed `L(1, chi)` falls below `floor`.
pub fn is_exceptional(l1: f64, floor: f64) -> bool {
    l1 < floor
}
