//! Quadratic extensions `L = F(sqrt beta)` of a quadratic field `F`.
//!
//! The general enumerator walks the Kummer square classes directly: every class is
//! `beta0 * s` where `(beta0) = A C^2` for a squarefree ideal `A` whose class is a
//! square, and `s` runs over the 2-Selmer group (units mod squares and generators of
//! `D^2` for `D` in a basis of `Cl[2]`). Each class is produced exactly once.

use std::sync::Arc;

use serde::Serialize;

use crate::arith::{self, factor, fundamental_discriminant_of, isqrt, jacobi, SpfSieve};
use crate::dirichlet::{l1_exact, l2_exact, ZETA2};
use crate::quadfield::{ClassGroup, Ideal, PrimeIdeal, QuadElem, QuadField, QuadInt, Splitting};
use crate::{Error, Result};

/// A value with an error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

/// Default agreement target for the smoothed L-value path.
pub const SMOOTHED_TARGET: f64 = 1e-6;
/// Default ceiling on the number of Dirichlet coefficients in the smoothed path.
pub const SMOOTHED_BUDGET: usize = 1 << 24;

/// A quadratic extension `L = F(sqrt beta)`.
#[derive(Debug, Clone)]
pub struct RelQuadExt {
    base: Arc<QuadField>,
    /// Kummer generator, integral; a rational integer for the biquadratic family.
    pub beta: QuadInt,
    /// Norm of the relative discriminant.
    pub rel_disc_norm: u64,
    /// Number of complex places of `L`.
    pub complex_places: u32,
    /// `(D1, D2)` with `chi_1 chi_2 = chi_F` when `L / Q` is biquadratic.
    pub dirichlet_pair: Option<(i64, i64)>,
}

impl RelQuadExt {
    pub fn base(&self) -> &QuadField {
        &self.base
    }

    pub fn is_biquadratic(&self) -> bool {
        self.dirichlet_pair.is_some()
    }

    /// `D_{L/F} = 1`: no finite prime ramifies.
    pub fn is_finite_unramified(&self) -> bool {
        self.rel_disc_norm == 1
    }

    /// Unramified at every place, finite and infinite.
    pub fn is_unramified(&self) -> bool {
        self.is_finite_unramified() && self.complex_places == 2 * self.base.signature().1
    }

    /// The generator as a rational integer, when it is one.
    pub fn rational_generator(&self) -> Option<i64> {
        (self.beta.y == 0).then_some(self.beta.x as i64)
    }
}

fn fd(m: i64) -> i64 {
    fundamental_discriminant_of(m).expect("squarefree")
}

fn biquadratic_ext(base: &Arc<QuadField>, m: i64) -> RelQuadExt {
    let m2 = arith::core(m * base.d());
    let (d1, d2) = (fd(m), fd(m2));
    let rel = (d1 as i128 * d2 as i128).unsigned_abs() / base.disc().unsigned_abs() as u128;
    RelQuadExt {
        base: Arc::clone(base),
        beta: QuadInt::rational(m as i128),
        rel_disc_norm: rel as u64,
        complex_places: if base.is_real() && m > 0 { 0 } else { 2 },
        dirichlet_pair: Some((d1, d2)),
    }
}

/// Unordered factorizations `d = d1 * d2` into squarefree parts, both different from 1.
pub fn genus_factorizations(base: &QuadField) -> Vec<(i64, i64)> {
    let d = base.d();
    let primes: Vec<i64> = factor(d.unsigned_abs()).into_iter().map(|(p, _)| p as i64).collect();
    let mut out = Vec::new();
    for mask in 0..1u32 << primes.len() {
        let g: i64 = (0..primes.len()).filter(|&i| mask >> i & 1 == 1).map(|i| primes[i]).product();
        for d1 in [g, -g] {
            let d2 = d / d1;
            if d1 != 1 && d2 != 1 && (d1.abs(), d1) < (d2.abs(), d2) {
                out.push((d1, d2));
            }
        }
    }
    out.sort_unstable();
    out
}

/// The extensions `F(sqrt d1) = F(sqrt d2)` attached to the genus factorizations of `d`.
pub fn biquadratic_extensions(base: &Arc<QuadField>) -> Vec<RelQuadExt> {
    genus_factorizations(base).into_iter().map(|(d1, _)| biquadratic_ext(base, d1)).collect()
}

/// Every `L = F(sqrt m)`, `m` rational, with `D_{L/F} <= bound`, ordered by `(D_{L/F}, m)`.
pub fn biquadratic_up_to(base: &Arc<QuadField>, bound: u64) -> Vec<RelQuadExt> {
    let d = base.d();
    let divisors: Vec<i64> = {
        let primes: Vec<i64> = factor(d.unsigned_abs()).into_iter().map(|(p, _)| p as i64).collect();
        (0..1u32 << primes.len())
            .map(|mask| (0..primes.len()).filter(|&i| mask >> i & 1 == 1).map(|i| primes[i]).product())
            .collect()
    };
    // |D1 D2| >= k^2 |d| >= k^2 |D_F| / 4, so k <= 2 sqrt(bound)
    let kmax = 2 * isqrt(bound as u128) as i64 + 2;
    let key = |m: i64| (m.abs(), m);
    let mut out = Vec::new();
    for k in 1..=kmax {
        if !arith::is_squarefree(k) || arith::gcd(k as u128, d.unsigned_abs() as u128) != 1 {
            continue;
        }
        for &g in &divisors {
            for s in [1, -1] {
                let m = s * g * k;
                let m2 = arith::core(m * d);
                if m == 1 || m2 == 1 || key(m) > key(m2) {
                    continue;
                }
                let ext = biquadratic_ext(base, m);
                if ext.rel_disc_norm <= bound {
                    out.push(ext);
                }
            }
        }
    }
    out.sort_by_key(|e| (e.rel_disc_norm, key(e.beta.x as i64)));
    out
}

fn valuation_int(mut n: i128, p: i128) -> u32 {
    if n == 0 {
        return u32::MAX;
    }
    let mut v = 0;
    while n % p == 0 {
        n /= p;
        v += 1;
    }
    v
}

/// Local data at a prime ideal: valuations, square classes, residue symbols.
struct Local<'a> {
    field: &'a QuadField,
    prime: PrimeIdeal,
    /// `w - r` has valuation exactly 1 at the prime (degree-one primes).
    r: i128,
}

impl<'a> Local<'a> {
    fn new(field: &'a QuadField, prime: PrimeIdeal) -> Self {
        let p = prime.p as i128;
        let r = match prime.omega_residue {
            None => 0,
            Some(r) => {
                let r = r as i128;
                let pi = QuadInt::new(-r, 1);
                if valuation_int(field.norm(pi).unwrap(), p) == 1 {
                    r
                } else {
                    r + p
                }
            }
        };
        Local { field, prime, r }
    }

    fn ramification(&self) -> u32 {
        if self.prime.splitting == Splitting::Ramified {
            2
        } else {
            1
        }
    }

    fn valuation(&self, z: QuadInt) -> Result<u32> {
        let p = self.prime.p as i128;
        if z == QuadInt::new(0, 0) {
            return Ok(u32::MAX);
        }
        Ok(match self.prime.splitting {
            Splitting::Inert => valuation_int(z.content(), p),
            Splitting::Ramified => valuation_int(self.field.norm(z)?, p),
            Splitting::Split => {
                let c = valuation_int(z.content(), p);
                let pc = p.pow(c);
                let zp = QuadInt::new(z.x / pc, z.y / pc);
                let r = self.prime.omega_residue.unwrap() as i128;
                if (zp.x + zp.y * r).rem_euclid(p) == 0 {
                    c + valuation_int(self.field.norm(zp)?, p)
                } else {
                    c
                }
            }
        })
    }

    /// Multiply by squares until the valuation is 0 or 1; returns the new element and it.
    fn strip_squares(&self, beta: QuadInt) -> Result<(QuadInt, u32)> {
        let mut v = self.valuation(beta)?;
        let mut b = beta;
        let p = self.prime.p as i128;
        while v >= 2 {
            b = match self.prime.splitting {
                Splitting::Inert => QuadInt::new(b.x / (p * p), b.y / (p * p)),
                _ => {
                    let pib = self.field.conj(QuadInt::new(-self.r, 1));
                    let t = self.field.mul(b, self.field.mul(pib, pib)?)?;
                    debug_assert!(t.x % (p * p) == 0 && t.y % (p * p) == 0);
                    QuadInt::new(t.x / (p * p), t.y / (p * p))
                }
            };
            v -= 2;
        }
        Ok((b, v))
    }

    /// Legendre symbol of a unit at an odd prime.
    fn residue_symbol(&self, u: QuadInt) -> Result<i32> {
        let p = self.prime.p;
        let pi = p as i128;
        let red = match self.prime.splitting {
            Splitting::Inert => self.field.norm(u)?.rem_euclid(pi),
            _ => (u.x + u.y * self.prime.omega_residue.unwrap() as i128).rem_euclid(pi),
        };
        Ok(jacobi(red as u64, p))
    }

    /// `(exponent of the prime in the relative discriminant, character value)`.
    fn analyze(&self, beta: QuadInt) -> Result<(u32, i32)> {
        let (u, v) = self.strip_squares(beta)?;
        let e = self.ramification();
        if v == 1 {
            return Ok(if self.prime.p == 2 { (2 * e + 1, 0) } else { (1, 0) });
        }
        if self.prime.p != 2 {
            return Ok((0, self.residue_symbol(u)?));
        }
        // x ranges over O/8O, enough to decide u = x^2 mod P^(2e+1)
        let cap = 2 * e + 1;
        let mut t = 0;
        'search: for a in 0..8 {
            for b in 0..8 {
                let x = QuadInt::new(a, b);
                let x2 = self.field.mul(x, x)?;
                let diff = QuadInt::new(u.x - x2.x, u.y - x2.y);
                t = t.max(self.valuation(diff)?.min(cap));
                if t == cap {
                    break 'search;
                }
            }
        }
        Ok(if t >= cap {
            (0, 1)
        } else if t == 2 * e {
            (0, -1)
        } else {
            (cap - t, 0)
        })
    }
}

/// A square root of `beta` in `F`, if it has one.
pub fn sqrt_in_field(base: &QuadField, beta: QuadInt) -> Result<Option<QuadInt>> {
    let n = base.norm(beta)?;
    if !arith::is_square(n) {
        return Ok(None);
    }
    let k = isqrt(n as u128) as i128;
    let tr = base.trace(beta);
    let (t, _) = base.omega_poly();
    for s in [1i128, -1] {
        let v = tr + 2 * s * k;
        if !arith::is_square(v) {
            continue;
        }
        let big_t = isqrt(v as u128) as i128;
        // (gamma - conj gamma)^2 = y^2 D = T^2 - 4 N(gamma)
        let y2d = big_t * big_t - 4 * s * k;
        let disc = base.disc() as i128;
        if y2d % disc != 0 || !arith::is_square(y2d / disc) {
            continue;
        }
        let y0 = isqrt((y2d / disc) as u128) as i128;
        for (tt, y) in [(big_t, y0), (big_t, -y0), (-big_t, y0), (-big_t, -y0)] {
            if (tt - y * t) % 2 != 0 {
                continue;
            }
            let g = QuadInt::new((tt - y * t) / 2, y);
            if base.mul(g, g)? == beta {
                return Ok(Some(g));
            }
        }
    }
    Ok(None)
}

/// `m` with `F(sqrt beta) = F(sqrt m)` when the extension is biquadratic over `Q`.
fn rational_class(base: &QuadField, beta: QuadInt) -> Result<Option<i64>> {
    let n = base.norm(beta)?;
    if !arith::is_square(n) {
        return Ok(None);
    }
    let k = isqrt(n as u128) as i128;
    let tr = base.trace(beta);
    for s in [1i128, -1] {
        let v = tr + 2 * s * k;
        if v != 0 {
            let v = i64::try_from(v).map_err(|_| Error::Overflow("rational generator"))?;
            return Ok(Some(arith::core(v)));
        }
    }
    Ok(None)
}

fn odd_part_of_discriminant(base: &QuadField, beta: QuadInt) -> Result<u64> {
    let n = base.norm(beta)?.unsigned_abs();
    let n = u64::try_from(n).map_err(|_| Error::Overflow("generator norm"))?;
    let mut out = 1u64;
    for (p, _) in factor(n) {
        if p == 2 {
            continue;
        }
        for prime in base.primes_above(p) {
            let (exp, _) = Local::new(base, prime).analyze(beta)?;
            out *= prime.norm.pow(exp);
        }
    }
    Ok(out)
}

fn two_part_of_discriminant(base: &QuadField, beta: QuadInt) -> Result<u64> {
    let mut out = 1u64;
    for prime in base.primes_above(2) {
        let (exp, _) = Local::new(base, prime).analyze(beta)?;
        out *= prime.norm.pow(exp);
    }
    Ok(out)
}

/// Norm of the relative discriminant of `F(sqrt beta) / F`.
pub fn relative_discriminant(base: &QuadField, beta: QuadInt) -> Result<u64> {
    if beta == QuadInt::new(0, 0) {
        return Err(Error::Zero);
    }
    if sqrt_in_field(base, beta)?.is_some() {
        return Err(Error::SquareGenerator);
    }
    Ok(odd_part_of_discriminant(base, beta)? * two_part_of_discriminant(base, beta)?)
}

fn complex_places(base: &QuadField, beta: QuadInt) -> Result<u32> {
    if !base.is_real() {
        return Ok(2);
    }
    let (s1, s2) = base.signs(beta)?;
    Ok(u32::from(s1 < 0) + u32::from(s2 < 0))
}

fn make_ext(base: &Arc<QuadField>, beta: QuadInt, rel_disc_norm: u64) -> Result<RelQuadExt> {
    let dirichlet_pair = rational_class(base, beta)?.map(|m| (fd(m), fd(arith::core(m * base.d()))));
    Ok(RelQuadExt {
        base: Arc::clone(base),
        beta,
        rel_disc_norm,
        complex_places: complex_places(base, beta)?,
        dirichlet_pair,
    })
}

/// Extension for an explicit generator.
pub fn extension(base: &Arc<QuadField>, beta: QuadInt) -> Result<RelQuadExt> {
    let rel = relative_discriminant(base, beta)?;
    make_ext(base, beta, rel)
}

fn integral(g: QuadElem) -> QuadInt {
    // num/den has the same square class as num*den
    QuadInt::new(g.num.x * g.den, g.num.y * g.den)
}

/// Generators of `F* / F*^2` modulo the ideal part: units mod squares, then generators
/// of `D^2` for `D` running over a basis of `Cl[2]`.
pub fn selmer_basis(base: &QuadField) -> Result<Vec<QuadInt>> {
    let mut out = vec![if base.d() == -1 { QuadInt::new(0, 1) } else { QuadInt::rational(-1) }];
    if base.is_real() {
        out.push(base.unit().ok_or(Error::Overflow("fundamental unit coordinates"))?);
    }
    let group = base.class_group()?;
    for &c in group.torsion_basis() {
        let rep = group.rep(c);
        let g = group
            .generator(group.mul_ideals(rep, rep)?)?
            .ok_or_else(|| Error::Inconsistent("square of a 2-torsion class is not principal".into()))?;
        out.push(integral(g));
    }
    Ok(out)
}

struct Node {
    /// the squarefree ideal so far is `gamma * [a, b]`
    gamma: QuadElem,
    red: Ideal,
    class: u32,
    odd_norm: u64,
    nonempty: bool,
}

/// Every quadratic extension of `F` with `D_{L/F} <= bound`, ordered by
/// `(D_{L/F}, beta)`.
pub fn enumerate_extensions(base: &Arc<QuadField>, bound: u64) -> Result<Vec<RelQuadExt>> {
    if bound == 0 {
        return Err(Error::Parameter("discriminant bound must be at least 1".into()));
    }
    let group = base.class_group()?;
    let selmer = selmer_basis(base)?;
    let primes: Vec<PrimeIdeal> = base
        .prime_ideals_up_to(bound.max(4))
        .into_iter()
        .filter(|q| q.p == 2 || q.norm <= bound)
        .collect();
    let mut out = Vec::new();
    let root = Node {
        gamma: QuadElem::ONE,
        red: base.one_ideal(),
        class: 0,
        odd_norm: 1,
        nonempty: false,
    };
    let mut stack = vec![(root, 0usize)];
    while let Some((node, next)) = stack.pop() {
        emit(base, group, &selmer, &node, bound, &mut out)?;
        for (i, q) in primes.iter().enumerate().skip(next) {
            let norm = if q.p == 2 { 1 } else { q.norm };
            let Some(odd_norm) = node.odd_norm.checked_mul(norm).filter(|&n| n <= bound) else {
                if q.p != 2 {
                    break;
                }
                continue;
            };
            let child = extend(base, group, &node, q, odd_norm)?;
            stack.push((child, i + 1));
        }
    }
    out.sort_by(|a, b| (a.rel_disc_norm, a.beta).cmp(&(b.rel_disc_norm, b.beta)));
    Ok(out)
}

fn extend(base: &QuadField, group: &ClassGroup, node: &Node, q: &PrimeIdeal, odd_norm: u64) -> Result<Node> {
    let ring = base.ring();
    let id = q.ideal();
    let prod = group.mul_ideals(node.red, Ideal { scale: 1, ..id })?;
    let (a, b, g) = ring.reduce_tracked(prod.a, prod.b)?;
    let scale = QuadElem { num: QuadInt::rational(prod.scale * id.scale), den: 1 };
    let gamma = ring.elem_mul(ring.elem_mul(node.gamma, g)?, scale)?;
    let red = Ideal { scale: 1, a, b };
    let (class, _) = group.class_of(red)?;
    Ok(Node { gamma, red, class, odd_norm, nonempty: true })
}

fn emit(
    base: &Arc<QuadField>,
    group: &ClassGroup,
    selmer: &[QuadInt],
    node: &Node,
    bound: u64,
    out: &mut Vec<RelQuadExt>,
) -> Result<()> {
    let Some(w) = group.half(group.inverse(node.class)) else {
        return Ok(());
    };
    let ring = base.ring();
    let c = group.rep(w);
    let prod = group.mul_ideals(group.mul_ideals(node.red, c)?, c)?;
    let (class, g) = group.class_of(prod)?;
    debug_assert_eq!(class, 0);
    let beta0 = integral(ring.elem_mul(node.gamma, g)?);
    for mask in 0..1u32 << selmer.len() {
        if mask == 0 && !node.nonempty {
            continue;
        }
        let mut beta = beta0;
        for (i, s) in selmer.iter().enumerate() {
            if mask >> i & 1 == 1 {
                beta = ring.mul(beta, *s)?;
            }
        }
        let beta = primitive_part(beta);
        let two = two_part_of_discriminant(base, beta)?;
        let Some(rel) = node.odd_norm.checked_mul(two).filter(|&r| r <= bound) else {
            continue;
        };
        out.push(make_ext(base, beta, rel)?);
    }
    Ok(())
}

/// Divide out the largest square rational factor of the content.
fn primitive_part(beta: QuadInt) -> QuadInt {
    let c = beta.content();
    let (_, s) = arith::squarefree_decompose(c as i64).unwrap_or((c as i64, 1));
    let s = s as i128;
    if s > 1 {
        QuadInt::new(beta.x / (s * s), beta.y / (s * s))
    } else {
        beta
    }
}

/// The quadratic Hecke character of `L / F` at a prime ideal of `F`.
pub fn hecke_char(ext: &RelQuadExt, prime: &PrimeIdeal) -> Result<i32> {
    Ok(Local::new(&ext.base, *prime).analyze(ext.beta)?.1)
}

/// The character on an integral ideal coprime to nothing in particular: the product
/// of its values on the prime factors (0 when a ramified prime divides the ideal).
pub fn hecke_char_ideal(ext: &RelQuadExt, ideal: Ideal) -> Result<i32> {
    let base = &ext.base;
    let (t, _) = base.omega_poly();
    let norm = u64::try_from(ideal.norm()).map_err(|_| Error::Overflow("ideal norm"))?;
    let mut value = 1;
    for (p, _) in factor(norm) {
        let pi = p as i128;
        let vs = valuation_int(ideal.scale, pi);
        let va = valuation_int(ideal.a, pi);
        for prime in base.primes_above(p) {
            let v = match prime.splitting {
                Splitting::Inert => vs,
                Splitting::Ramified => 2 * vs + va,
                Splitting::Split => {
                    let r = ((ideal.b + t) / 2).rem_euclid(pi) as u64;
                    vs + if va > 0 && prime.omega_residue == Some(r) { va } else { 0 }
                }
            };
            if v > 0 {
                value *= hecke_char(ext, &prime)?.pow(v);
            }
        }
    }
    Ok(value)
}

/// Dirichlet coefficients `a(n) = sum_{N A = n} chi(A)` of `L(s, chi_{L/F})` for `n <= limit`.
pub fn hecke_coefficients(ext: &RelQuadExt, limit: usize) -> Result<Vec<i32>> {
    let sieve = SpfSieve::new(limit.max(2));
    let mut a = vec![0i32; limit + 1];
    if limit >= 1 {
        a[1] = 1;
    }
    for n in 2..=limit {
        let p = sieve.spf(n) as usize;
        if p == n {
            let kmax = (limit as f64).log(p as f64).floor() as usize + 1;
            let local = local_coefficients(ext, p as u64, kmax)?;
            let mut pk = p;
            for &c in &local[1..] {
                a[pk] = c;
                match pk.checked_mul(p) {
                    Some(next) if next <= limit => pk = next,
                    _ => break,
                }
            }
            continue;
        }
        let (mut m, mut pe) = (n, 1);
        while m % p == 0 {
            m /= p;
            pe *= p;
        }
        if m != 1 {
            a[n] = a[m] * a[pe];
        }
    }
    Ok(a)
}

/// Coefficients of `prod_{P | p} (1 - chi(P) T^f)^{-1}` up to `T^kmax`.
fn local_coefficients(ext: &RelQuadExt, p: u64, kmax: usize) -> Result<Vec<i32>> {
    let mut coef = vec![0i32; kmax + 1];
    coef[0] = 1;
    for prime in ext.base.primes_above(p) {
        let c = hecke_char(ext, &prime)?;
        let f = if prime.splitting == Splitting::Inert { 2 } else { 1 };
        // multiply by 1/(1 - c T^f)
        for k in f..=kmax {
            coef[k] += c * coef[k - f];
        }
    }
    Ok(coef)
}

fn smoothed_sum(a: &[i32], x: f64) -> f64 {
    let nmax = ((40.0 * x) as usize).min(a.len() - 1);
    let terms: Vec<f64> = (1..=nmax)
        .filter(|&n| a[n] != 0)
        .map(|n| a[n] as f64 * (-(n as f64) / x).exp() / n as f64)
        .collect();
    crate::special::pairwise_sum(&terms)
}

/// `L(1, chi_{L/F})` from `S(X) = sum a(n) e^{-n/X} / n`, Richardson-extrapolated in `X`
/// and doubled until two successive values agree within `target`.
pub fn l1_smoothed(ext: &RelQuadExt, target: f64, budget: usize) -> Result<Estimate> {
    let q = ext.base.disc().unsigned_abs() as f64 * ext.rel_disc_norm as f64;
    let mut x = q.sqrt().max(32.0);
    let mut a = hecke_coefficients(ext, ((160.0 * x) as usize).min(budget))?;
    let mut s = smoothed_sum(&a, x);
    let mut last = (f64::NAN, f64::NAN);
    let mut iterations = 0;
    loop {
        // S(2X) reads coefficients up to 80 X
        let need = (80.0 * x).ceil() as usize;
        if need > budget {
            return Err(Error::NoConvergence { iterations, last });
        }
        if need >= a.len() {
            a = hecke_coefficients(ext, (2 * need).min(budget))?;
        }
        let s2 = smoothed_sum(&a, 2.0 * x);
        let r = 2.0 * s2 - s;
        iterations += 1;
        if iterations > 1 && (r - last.1).abs() <= target {
            return Ok(Estimate { value: r, error: (r - last.1).abs() });
        }
        last = (last.1, r);
        s = s2;
        x *= 2.0;
    }
}

/// `Res zeta_L / Res zeta_F = L(1, chi_{L/F})`.
pub fn residue_ratio(ext: &RelQuadExt, target: f64) -> Result<Estimate> {
    match ext.dirichlet_pair {
        Some((d1, d2)) => Ok(Estimate { value: l1_exact(d1)? * l1_exact(d2)?, error: 1e-12 }),
        None => l1_smoothed(ext, target, SMOOTHED_BUDGET),
    }
}

/// `zeta_L(2) = zeta_F(2) L(2, chi_{L/F})`.
pub fn zeta_l_at_2(ext: &RelQuadExt) -> Result<Estimate> {
    let zf = ZETA2 * l2_exact(ext.base.disc())?;
    if let Some((d1, d2)) = ext.dirichlet_pair {
        return Ok(Estimate { value: zf * l2_exact(d1)? * l2_exact(d2)?, error: 1e-12 });
    }
    let n = 100_000;
    let (l2, tail) = l2_series(ext, n)?;
    Ok(Estimate { value: zf * l2, error: zf * tail })
}

/// Partial sum of `L(2, chi_{L/F})` to `n` and a bound on the omitted tail.
pub fn l2_series(ext: &RelQuadExt, n: usize) -> Result<(f64, f64)> {
    let a = hecke_coefficients(ext, n)?;
    let terms: Vec<f64> = (1..=n).map(|k| a[k] as f64 / (k as f64 * k as f64)).collect();
    Ok((crate::special::pairwise_sum(&terms), ideal_tail(&ext.base, n)))
}

/// `sum_{n > N} r_F(n) / n^2`: explicit to `8N`, then `2 Res / 8N` for the rest.
pub fn ideal_tail(base: &QuadField, n: usize) -> f64 {
    let r = base.ideal_counts(8 * n);
    let head: f64 = (n + 1..=8 * n).map(|k| r[k] as f64 / (k as f64 * k as f64)).sum();
    head + 2.0 * base.residue() / (8 * n) as f64
}
