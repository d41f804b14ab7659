//! Quadratic fields `Q(sqrt d)`: ring arithmetic, ideals, class groups, units.
//!
//! Integral ideals are stored in Hermite form `s * [a, (-b + sqrt D)/2]`, which is the
//! ideal attached to the binary form `(a, b, c)` of discriminant `D` scaled by `s`.
//! Composition and reduction act on the form and keep track of the field element
//! relating the input ideal to the output, so principal ideals come with generators.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::arith::{self, ext_gcd, gcd_i, isqrt, kronecker, sqrt_mod, PrimeTable, SpfSieve};
use crate::dirichlet::l1_exact;
use crate::{Error, Result};

/// Element `x + y*w` of the ring of integers, `w = sqrt d` or `(1 + sqrt d)/2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QuadInt {
    pub x: i128,
    pub y: i128,
}

impl QuadInt {
    pub const ONE: QuadInt = QuadInt { x: 1, y: 0 };

    pub fn new(x: i128, y: i128) -> Self {
        QuadInt { x, y }
    }

    pub fn rational(x: i128) -> Self {
        QuadInt { x, y: 0 }
    }

    pub fn content(&self) -> i128 {
        gcd_i(self.x, self.y)
    }
}

/// Field element `num / den` with `den > 0`, kept in lowest terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuadElem {
    pub num: QuadInt,
    pub den: i128,
}

impl QuadElem {
    pub const ONE: QuadElem = QuadElem { num: QuadInt::ONE, den: 1 };

    fn new(num: QuadInt, den: i128) -> Self {
        let (mut num, mut den) = (num, den);
        if den < 0 {
            num = QuadInt::new(-num.x, -num.y);
            den = -den;
        }
        let g = gcd_i(num.content(), den);
        if g > 1 {
            num = QuadInt::new(num.x / g, num.y / g);
            den /= g;
        }
        QuadElem { num, den }
    }
}

fn ovf(what: &'static str) -> Error {
    Error::Overflow(what)
}

fn cmul(a: i128, b: i128) -> Result<i128> {
    a.checked_mul(b).ok_or(ovf("field element"))
}

fn cadd(a: i128, b: i128) -> Result<i128> {
    a.checked_add(b).ok_or(ovf("field element"))
}

/// Arithmetic in the ring of integers of discriminant `disc`: `w^2 = t*w + n`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Ring {
    pub disc: i128,
    pub t: i128,
    pub n: i128,
    /// floor(sqrt |disc|)
    pub root: i128,
}

impl Ring {
    pub fn new(disc: i64) -> Self {
        let disc = disc as i128;
        let (t, n) = if disc.rem_euclid(4) == 0 { (0, disc / 4) } else { (1, (disc - 1) / 4) };
        Ring { disc, t, n, root: isqrt(disc.unsigned_abs()) as i128 }
    }

    pub fn mul(&self, u: QuadInt, v: QuadInt) -> Result<QuadInt> {
        let yy = cmul(u.y, v.y)?;
        let x = cadd(cmul(u.x, v.x)?, cmul(yy, self.n)?)?;
        let y = cadd(cadd(cmul(u.x, v.y)?, cmul(u.y, v.x)?)?, cmul(yy, self.t)?)?;
        Ok(QuadInt::new(x, y))
    }

    pub fn norm(&self, u: QuadInt) -> Result<i128> {
        let a = cmul(u.x, u.x)?;
        let b = cmul(cmul(u.x, u.y)?, self.t)?;
        let c = cmul(cmul(u.y, u.y)?, self.n)?;
        cadd(cadd(a, b)?, -c)
    }

    pub fn conj(&self, u: QuadInt) -> QuadInt {
        QuadInt::new(u.x + u.y * self.t, -u.y)
    }

    pub fn trace(&self, u: QuadInt) -> i128 {
        2 * u.x + u.y * self.t
    }

    pub fn elem_mul(&self, u: QuadElem, v: QuadElem) -> Result<QuadElem> {
        let num = self.mul(u.num, v.num)?;
        Ok(QuadElem::new(num, cmul(u.den, v.den)?))
    }

    /// `(-b + sqrt D)/2`, the second Hermite basis vector of the ideal `[a, b]`.
    pub fn alpha(&self, b: i128) -> QuadInt {
        QuadInt::new(-(b + self.t) / 2, 1)
    }

    fn c_of(&self, a: i128, b: i128) -> i128 {
        (b * b - self.disc) / (4 * a)
    }

    fn normalize(&self, a: i128, b: i128) -> i128 {
        if self.disc < 0 || a > self.root {
            let r = b.rem_euclid(2 * a);
            if r > a {
                r - 2 * a
            } else {
                r
            }
        } else {
            self.root - (self.root - b).rem_euclid(2 * a)
        }
    }

    fn is_reduced(&self, a: i128, b: i128) -> bool {
        if self.disc < 0 {
            let c = self.c_of(a, b);
            -a < b && b <= a && (a < c || (a == c && b >= 0))
        } else {
            b >= 1 && b <= self.root && 2 * a > self.root - b && 2 * a <= self.root + b
        }
    }

    /// Reduce the ideal `[a, b]`; returns `(a', b', g)` with `[a, b] = g * [a', b']`.
    pub fn reduce_tracked(&self, a: i128, b: i128) -> Result<(i128, i128, QuadElem)> {
        let (mut a, mut b) = (a, self.normalize(a, b));
        let mut g = QuadElem::ONE;
        while !self.is_reduced(a, b) {
            let c = self.c_of(a, b);
            g = self.elem_mul(g, QuadElem::new(self.alpha(b), c))?;
            a = c.abs();
            b = self.normalize(a, -b);
        }
        Ok((a, b, g))
    }

    pub fn reduce(&self, a: i128, b: i128) -> (i128, i128) {
        let (mut a, mut b) = (a, self.normalize(a, b));
        while !self.is_reduced(a, b) {
            let c = self.c_of(a, b);
            a = c.abs();
            b = self.normalize(a, -b);
        }
        (a, b)
    }

    /// Product of primitive ideals: `[a1, b1] [a2, b2] = g * [a3, b3]`; returns `(g, a3, b3)`.
    pub fn compose(&self, f1: (i128, i128), f2: (i128, i128)) -> (i128, i128, i128) {
        let ((a1, b1), (a2, b2)) = if f1.0 > f2.0 { (f2, f1) } else { (f1, f2) };
        let c2 = self.c_of(a2, b2);
        let s = (b1 + b2) / 2;
        let n = b2 - s;
        let (d, y1) = if a2 % a1 == 0 {
            (a1, 0)
        } else {
            let (d, u, _) = ext_gcd(a2, a1);
            (d, u)
        };
        let (d1, x2, y2) = if s % d == 0 {
            (d, 0, -1)
        } else {
            let (d1, u, v) = ext_gcd(s, d);
            (d1, u, -v)
        };
        let v1 = a1 / d1;
        let v2 = a2 / d1;
        let r = (y1 * y2 % v1 * n - x2 * c2).rem_euclid(v1);
        (d1, v1 * v2, self.normalize(v1 * v2, b2 + 2 * v2 * r))
    }

    /// Step to the next ideal on a reduced cycle (real fields).
    fn rho(&self, a: i128, b: i128) -> (i128, i128) {
        let c = self.c_of(a, b).abs();
        (c, self.normalize(c, -b))
    }
}

/// Integral ideal `scale * [a, (-b + sqrt D)/2]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Ideal {
    pub scale: i128,
    pub a: i128,
    pub b: i128,
}

impl Ideal {
    pub fn norm(&self) -> i128 {
        self.scale * self.scale * self.a
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Splitting {
    Split,
    Inert,
    Ramified,
}

/// A prime ideal, with the residue of `w` for degree-one primes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrimeIdeal {
    pub p: u64,
    pub norm: u64,
    pub splitting: Splitting,
    /// `w = r mod P` when the residue field is `F_p`.
    pub omega_residue: Option<u64>,
    b: i128,
}

impl PrimeIdeal {
    pub fn ideal(&self) -> Ideal {
        match self.splitting {
            Splitting::Inert => Ideal { scale: self.p as i128, a: 1, b: self.b },
            _ => Ideal { scale: 1, a: self.p as i128, b: self.b },
        }
    }
}

/// A finite abelian group given by its class representatives.
///
/// Classes are indexed `0..order`, with 0 the principal class. For real fields each
/// class is a cycle of reduced ideals and the first entry of the cycle is the representative.
#[derive(Debug)]
pub struct ClassGroup {
    ring: Ring,
    cycles: Vec<Vec<(i128, i128)>>,
    index: HashMap<(i128, i128), (u32, u32)>,
    square: Vec<u32>,
    half: Vec<Option<u32>>,
    torsion_basis: Vec<u32>,
    invariants: Vec<u64>,
}

impl ClassGroup {
    pub fn order(&self) -> u64 {
        self.cycles.len() as u64
    }

    /// Cyclic factor orders `n1 | n2 | ...`; empty for the trivial group.
    pub fn invariants(&self) -> &[u64] {
        &self.invariants
    }

    pub fn two_torsion(&self) -> u64 {
        1 << self.torsion_basis.len()
    }

    /// Classes forming an F2-basis of the 2-torsion.
    pub fn torsion_basis(&self) -> &[u32] {
        &self.torsion_basis
    }

    /// Reduced representative ideal of a class.
    pub fn rep(&self, class: u32) -> Ideal {
        let (a, b) = self.cycles[class as usize][0];
        Ideal { scale: 1, a, b }
    }

    pub fn square(&self, class: u32) -> u32 {
        self.square[class as usize]
    }

    /// Some class `y` with `y^2 = class`, if there is one.
    pub fn half(&self, class: u32) -> Option<u32> {
        self.half[class as usize]
    }

    pub fn is_square(&self, class: u32) -> bool {
        self.half[class as usize].is_some()
    }

    pub fn inverse(&self, class: u32) -> u32 {
        let (a, b) = self.cycles[class as usize][0];
        let (a, b) = self.ring.reduce(a, -b);
        self.index[&(a, b)].0
    }

    pub fn mul(&self, x: u32, y: u32) -> u32 {
        let (_, a, b) = self.ring.compose(self.cycles[x as usize][0], self.cycles[y as usize][0]);
        let (a, b) = self.ring.reduce(a, b);
        self.index[&(a, b)].0
    }

    fn pow(&self, x: u32, mut e: u64) -> u32 {
        let (mut r, mut base) = (0, x);
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        r
    }

    /// `rep_j = g * rep_0` for the `j`-th ideal on a class cycle.
    fn to_rep(&self, class: u32, pos: u32) -> Result<QuadElem> {
        let cyc = &self.cycles[class as usize];
        let mut g = QuadElem::ONE;
        for &(a, b) in &cyc[pos as usize..] {
            let c = self.ring.c_of(a, b);
            g = self.ring.elem_mul(g, QuadElem::new(self.ring.alpha(b), c))?;
        }
        Ok(g)
    }

    /// Class of an ideal together with `g` such that `I = g * rep(class)`.
    pub fn class_of(&self, id: Ideal) -> Result<(u32, QuadElem)> {
        let (a, b, g) = self.ring.reduce_tracked(id.a, id.b)?;
        let &(class, pos) = self
            .index
            .get(&(a, b))
            .ok_or_else(|| Error::Inconsistent(format!("reduced ideal ({a}, {b}) not in class table")))?;
        let g = if pos == 0 { g } else { self.ring.elem_mul(g, self.to_rep(class, pos)?)? };
        let g = self.ring.elem_mul(g, QuadElem::new(QuadInt::rational(id.scale), 1))?;
        Ok((class, g))
    }

    /// Product of two ideals, reduced: `I1 * I2 = g * rep(class)`.
    pub fn mul_ideals(&self, i1: Ideal, i2: Ideal) -> Result<Ideal> {
        let (g, a, b) = self.ring.compose((i1.a, i1.b), (i2.a, i2.b));
        let scale = cmul(cmul(i1.scale, i2.scale)?, g)?;
        Ok(Ideal { scale, a, b })
    }

    /// A generator of a principal ideal, or `None` when the ideal is not principal.
    pub fn generator(&self, id: Ideal) -> Result<Option<QuadElem>> {
        let (class, g) = self.class_of(id)?;
        Ok((class == 0).then_some(g))
    }
}

fn build_class_group(disc: i64) -> Result<ClassGroup> {
    let ring = Ring::new(disc);
    let mut cycles: Vec<Vec<(i128, i128)>> = Vec::new();
    let mut index = HashMap::new();
    if disc < 0 {
        let mut forms = reduced_forms_imaginary(&ring);
        forms.sort_by_key(|&(a, b)| (a, b.abs(), -b));
        for (i, f) in forms.into_iter().enumerate() {
            index.insert(f, (i as u32, 0));
            cycles.push(vec![f]);
        }
    } else {
        let all = reduced_ideals_real(&ring);
        let b0 = ring.root - (ring.root - ring.disc).rem_euclid(2);
        let start = std::iter::once((1, b0)).chain(all.iter().copied());
        for f in start {
            if index.contains_key(&f) {
                continue;
            }
            let class = cycles.len() as u32;
            let mut cyc = Vec::new();
            let mut g = f;
            loop {
                index.insert(g, (class, cyc.len() as u32));
                cyc.push(g);
                g = ring.rho(g.0, g.1);
                if g == f {
                    break;
                }
            }
            cycles.push(cyc);
        }
        if index.len() != all.len() {
            return Err(Error::Inconsistent(format!("reduced ideal cycles of {disc} do not partition")));
        }
    }
    let h = cycles.len();
    let mut group = ClassGroup {
        ring,
        cycles,
        index,
        square: Vec::new(),
        half: vec![None; h],
        torsion_basis: Vec::new(),
        invariants: Vec::new(),
    };
    group.square = (0..h as u32).map(|x| group.mul(x, x)).collect();
    for x in 0..h as u32 {
        let s = group.square[x as usize] as usize;
        group.half[s].get_or_insert(x);
    }
    let mut span = vec![0u32];
    for x in 0..h as u32 {
        if group.square[x as usize] == 0 && !span.contains(&x) {
            group.torsion_basis.push(x);
            let more: Vec<u32> = span.iter().map(|&y| group.mul(x, y)).collect();
            span.extend(more);
        }
    }
    group.invariants = group_invariants(&group, h as u64);
    Ok(group)
}

fn group_invariants(group: &ClassGroup, h: u64) -> Vec<u64> {
    let n = h as usize;
    // exponents[p] = cyclic p-factor exponents, largest first
    let mut by_prime: Vec<(u64, Vec<u32>)> = Vec::new();
    for (p, v) in arith::factor(h) {
        let mut cur: Vec<u32> = (0..n as u32).collect();
        let mut ranks = vec![0u32];
        let mut k = 0;
        while ranks[k] < v {
            cur = cur.iter().map(|&x| group.pow(x, p)).collect();
            let killed = cur.iter().filter(|&&x| x == 0).count() as u64;
            ranks.push(killed.ilog(p));
            k += 1;
        }
        // number of factors of exponent >= j is ranks[j] - ranks[j-1]
        let mut exps = Vec::new();
        for j in 1..ranks.len() {
            let ge_j = ranks[j] - ranks[j - 1];
            let ge_next = if j + 1 < ranks.len() { ranks[j + 1] - ranks[j] } else { 0 };
            exps.extend(std::iter::repeat(j as u32).take((ge_j - ge_next) as usize));
        }
        exps.sort_unstable_by(|a, b| b.cmp(a));
        by_prime.push((p, exps));
    }
    let len = by_prime.iter().map(|(_, e)| e.len()).max().unwrap_or(0);
    let mut inv: Vec<u64> = (0..len)
        .map(|i| by_prime.iter().map(|(p, e)| e.get(i).map_or(1, |&k| p.pow(k))).product())
        .collect();
    inv.reverse();
    inv
}

fn reduced_forms_imaginary(ring: &Ring) -> Vec<(i128, i128)> {
    let dd = ring.disc;
    let amax = isqrt((-dd / 3) as u128) as i128;
    let mut out = Vec::new();
    for a in 1..=amax {
        for b in (-a + 1)..=a {
            if (b - dd).rem_euclid(2) != 0 || (b * b - dd) % (4 * a) != 0 {
                continue;
            }
            let c = (b * b - dd) / (4 * a);
            if c < a || (c == a && b < 0) {
                continue;
            }
            out.push((a, b));
        }
    }
    out
}

fn reduced_ideals_real(ring: &Ring) -> Vec<(i128, i128)> {
    let s = ring.root;
    let mut out = Vec::new();
    let mut b = if (s - ring.disc).rem_euclid(2) == 0 { s } else { s - 1 };
    while b >= 1 {
        let m = (ring.disc - b * b) / 4;
        let lo = (s - b) / 2 + 1;
        for a in lo..=(s + b) / 2 {
            if m % a == 0 {
                out.push((a, b));
            }
        }
        b -= 2;
    }
    out.sort_unstable();
    out
}

/// Class group of the quadratic order of fundamental discriminant `disc`.
pub fn class_group(disc: i64) -> Result<ClassGroup> {
    if !arith::is_fundamental(disc) {
        return Err(Error::NotFundamental(disc));
    }
    build_class_group(disc)
}

/// Fundamental unit `e > 1` in coordinates `x + y*w`, its norm, and `log e`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FundamentalUnit {
    pub unit: QuadInt,
    pub norm: i32,
    pub regulator: f64,
}

struct CfUnit {
    unit: Option<QuadInt>,
    norm: i32,
    regulator: f64,
}

/// Continued fraction of the reduced surd `(b0 + sqrt D)/2`; the unit is the product of
/// the complete quotients over one period.
fn cf_unit(ring: &Ring) -> CfUnit {
    let dd = ring.disc;
    let s = ring.root;
    let sqrt_d = (dd as f64).sqrt();
    let b0 = if (s - dd).rem_euclid(2) == 0 { s } else { s - 1 };
    let (mut p, mut q) = (b0, 2i128);
    let (mut q2, mut q1) = (Some(1i128), Some(0i128));
    let mut reg = 0.0;
    let mut len = 0;
    loop {
        let a = (p + s).div_euclid(q);
        reg += ((p as f64 + sqrt_d) / q as f64).ln();
        let qn = q1.zip(q2).and_then(|(q1, q2)| a.checked_mul(q1)?.checked_add(q2));
        (q2, q1) = (q1, qn);
        len += 1;
        p = a * q - p;
        q = (dd - p * p) / q;
        if q == 2 && p == b0 {
            break;
        }
    }
    let unit = q1.zip(q2).and_then(|(q1, q2)| {
        let x = q1.checked_mul((b0 - ring.t) / 2)?.checked_add(q2)?;
        Some(QuadInt::new(x, q1))
    });
    CfUnit { unit, norm: if len % 2 == 0 { 1 } else { -1 }, regulator: reg }
}

/// Fundamental unit of `Q(sqrt d)`, `d > 1` squarefree.
pub fn fundamental_unit(d: i64) -> Result<FundamentalUnit> {
    if d <= 1 {
        return Err(Error::Parameter(format!("fundamental unit needs d > 1, got {d}")));
    }
    let disc = arith::fundamental_discriminant_of(d)?;
    if arith::core(d) != d {
        return Err(Error::NotSquarefree(d));
    }
    let cf = cf_unit(&Ring::new(disc));
    let unit = cf.unit.ok_or(ovf("fundamental unit coordinates"))?;
    Ok(FundamentalUnit { unit, norm: cf.norm, regulator: cf.regulator })
}

/// Invariants of `F = Q(sqrt d)`.
#[derive(Debug)]
pub struct QuadField {
    d: i64,
    disc: i64,
    ring: Ring,
    w: u32,
    h: u64,
    reg: f64,
    cl2: u64,
    residue: f64,
    unit: Option<QuadInt>,
    unit_norm: i32,
    classes: OnceLock<Result<ClassGroup>>,
}

/// Build `Q(sqrt d)` for squarefree `d` other than 0 and 1.
pub fn build_field(d: i64) -> Result<QuadField> {
    match d {
        0 => return Err(Error::Zero),
        1 => return Err(Error::Degenerate(1)),
        _ => {}
    }
    if !arith::is_squarefree(d) {
        return Err(Error::NotSquarefree(d));
    }
    let disc = arith::fundamental_discriminant_of(d)?;
    let ring = Ring::new(disc);
    let residue = l1_exact(disc)?;
    let genus = 1u64 << (arith::omega(disc) - 1);
    let mut field = QuadField {
        d,
        disc,
        ring,
        w: match d {
            -1 => 4,
            -3 => 6,
            _ => 2,
        },
        h: 0,
        reg: 0.0,
        cl2: 0,
        residue,
        unit: None,
        unit_norm: 0,
        classes: OnceLock::new(),
    };
    if d < 0 {
        let forms = reduced_forms_imaginary(&ring);
        let h = forms.len() as u64;
        let analytic = residue * field.w as f64 * (-disc as f64).sqrt() / (2.0 * PI);
        let res = (analytic - h as f64).abs();
        if res >= 1e-4 {
            return Err(Error::Precision { disc, residue: res });
        }
        let ambiguous = forms
            .iter()
            .filter(|&&(a, b)| b == 0 || b == a || ring.c_of(a, b) == a)
            .count() as u64;
        if ambiguous != genus {
            return Err(Error::Inconsistent(format!(
                "{ambiguous} ambiguous forms vs genus count {genus} for {disc}"
            )));
        }
        field.h = h;
        field.cl2 = ambiguous;
    } else {
        let cf = cf_unit(&ring);
        let hf = residue * (disc as f64).sqrt() / (2.0 * cf.regulator);
        let h = hf.round();
        if (hf - h).abs() >= 0.01 || h < 1.0 {
            return Err(Error::Precision { disc, residue: (hf - h).abs() });
        }
        field.h = h as u64;
        field.reg = cf.regulator;
        field.unit = cf.unit;
        field.unit_norm = cf.norm;
        field.cl2 = real_cl2(disc, genus);
        if field.h % field.cl2 != 0 {
            return Err(Error::Inconsistent(format!("#Cl[2] = {} does not divide h = {}", field.cl2, field.h)));
        }
    }
    Ok(field)
}

/// `#Cl[2]` of a real field: the full genus count when every prime discriminant
/// dividing `disc` is positive (so -1 is a norm), half of it otherwise.
fn real_cl2(disc: i64, genus: u64) -> u64 {
    let negative_part = prime_discriminants(disc).iter().any(|&q| q < 0);
    if negative_part {
        genus / 2
    } else {
        genus
    }
}

/// Factorization of a fundamental discriminant into prime discriminants.
pub fn prime_discriminants(disc: i64) -> Vec<i64> {
    let mut out = Vec::new();
    let mut rest = disc;
    for (p, _) in arith::factor(disc.unsigned_abs()) {
        if p == 2 {
            continue;
        }
        let q = if p % 4 == 1 { p as i64 } else { -(p as i64) };
        out.push(q);
        rest /= q;
    }
    if rest != 1 {
        out.insert(0, rest);
    }
    out
}

impl QuadField {
    pub fn d(&self) -> i64 {
        self.d
    }

    pub fn disc(&self) -> i64 {
        self.disc
    }

    pub fn is_real(&self) -> bool {
        self.d > 0
    }

    /// `(r1, r2)`.
    pub fn signature(&self) -> (u32, u32) {
        if self.d > 0 {
            (2, 0)
        } else {
            (0, 1)
        }
    }

    pub fn roots_of_unity(&self) -> u32 {
        self.w
    }

    pub fn class_number(&self) -> u64 {
        self.h
    }

    pub fn regulator(&self) -> f64 {
        self.reg
    }

    pub fn cl2(&self) -> u64 {
        self.cl2
    }

    /// Residue of the Dedekind zeta function at `s = 1`.
    pub fn residue(&self) -> f64 {
        self.residue
    }

    /// Fundamental unit for real fields; `None` for imaginary fields or on overflow.
    pub fn unit(&self) -> Option<QuadInt> {
        self.unit
    }

    pub fn unit_norm(&self) -> i32 {
        self.unit_norm
    }

    /// `(t, n)` with `w^2 = t*w + n`.
    pub fn omega_poly(&self) -> (i128, i128) {
        (self.ring.t, self.ring.n)
    }

    /// The unit ideal `O_F`.
    pub fn one_ideal(&self) -> Ideal {
        Ideal { scale: 1, a: 1, b: self.ring.disc.rem_euclid(2) }
    }

    pub(crate) fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn mul(&self, u: QuadInt, v: QuadInt) -> Result<QuadInt> {
        self.ring.mul(u, v)
    }

    pub fn norm(&self, u: QuadInt) -> Result<i128> {
        self.ring.norm(u)
    }

    pub fn conj(&self, u: QuadInt) -> QuadInt {
        self.ring.conj(u)
    }

    pub fn trace(&self, u: QuadInt) -> i128 {
        self.ring.trace(u)
    }

    /// Signs of `u` under the two real embeddings (`w -> (t +- sqrt D)/2`).
    pub fn signs(&self, u: QuadInt) -> Result<(i32, i32)> {
        assert!(self.is_real());
        // 2u = (2x + y t) +- y sqrt D
        let p = cadd(cmul(2, u.x)?, cmul(u.y, self.ring.t)?)?;
        let lhs = cmul(p, p)?;
        let rhs = cmul(cmul(u.y, u.y)?, self.ring.disc)?;
        let sign = |s: i128| -> i32 {
            // sign of p + s*|y| sqrt D
            let q = s * u.y.signum();
            if q == 0 {
                p.signum() as i32
            } else if p.signum() == q.signum() || p == 0 {
                q.signum() as i32
            } else if lhs > rhs {
                p.signum() as i32
            } else {
                q.signum() as i32
            }
        };
        Ok((sign(1), sign(-1)))
    }

    /// Class group, computed on first use.
    pub fn class_group(&self) -> Result<&ClassGroup> {
        self.classes
            .get_or_init(|| build_class_group(self.disc))
            .as_ref()
            .map_err(Clone::clone)
    }

    /// Splitting of the rational prime `p`.
    pub fn splitting(&self, p: u64) -> Splitting {
        match kronecker(self.disc, p as i64) {
            1 => Splitting::Split,
            -1 => Splitting::Inert,
            _ => Splitting::Ramified,
        }
    }

    /// The prime ideals above `p` (one or two).
    pub fn primes_above(&self, p: u64) -> Vec<PrimeIdeal> {
        let splitting = self.splitting(p);
        if splitting == Splitting::Inert {
            let b = self.ring.disc.rem_euclid(2);
            return vec![PrimeIdeal { p, norm: p * p, splitting, omega_residue: None, b }];
        }
        let pi = p as i128;
        let dd = self.ring.disc;
        let b = if p == 2 {
            (0..4).find(|&b: &i128| (b * b - dd).rem_euclid(8) == 0).unwrap()
        } else {
            let s = sqrt_mod(dd.rem_euclid(pi) as u64, p).unwrap() as i128;
            if (s - dd).rem_euclid(2) == 0 {
                s
            } else {
                s + pi
            }
        };
        let make = |b: i128| {
            let b = self.ring.normalize(pi, b);
            let r = ((b + self.ring.t) / 2).rem_euclid(pi) as u64;
            PrimeIdeal { p, norm: p, splitting, omega_residue: Some(r), b }
        };
        let first = make(b);
        if splitting == Splitting::Ramified {
            return vec![first];
        }
        let second = make(-b);
        let mut v = vec![first, second];
        v.sort_by_key(|q| q.omega_residue);
        v
    }

    /// Every prime ideal of norm at most `bound`, ordered by norm.
    pub fn prime_ideals_up_to(&self, bound: u64) -> Vec<PrimeIdeal> {
        let table = PrimeTable::new(bound);
        let mut out = Vec::new();
        for &p in table.primes() {
            if self.splitting(p) == Splitting::Inert {
                if p.checked_mul(p).is_some_and(|n| n <= bound) {
                    out.extend(self.primes_above(p));
                }
            } else {
                out.extend(self.primes_above(p));
            }
        }
        out.sort_by_key(|q| (q.norm, q.omega_residue));
        out
    }

    /// `r_F(n)`, the number of ideals of norm `n`, for `n <= bound` (index 0 unused).
    pub fn ideal_counts(&self, bound: usize) -> Vec<u32> {
        let sieve = SpfSieve::new(bound.max(2));
        let mut chi = vec![0i8; bound + 1];
        let mut r = vec![0u32; bound + 1];
        if bound >= 1 {
            r[1] = 1;
        }
        for n in 2..=bound {
            let p = sieve.spf(n) as usize;
            if p == n {
                chi[p] = kronecker(self.disc, p as i64) as i8;
            }
            let (mut m, mut e) = (n, 0u32);
            while m % p == 0 {
                m /= p;
                e += 1;
            }
            let local = match chi[p] {
                1 => e + 1,
                -1 => u32::from(e % 2 == 0),
                _ => 1,
            };
            r[n] = r[m] * local;
        }
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Hermite normal form `(A, B, C)` of the Z-lattice spanned by `gens` in the basis
    /// `(1, w)`: the lattice is `Z (A, 0) + Z (B, C)` with `0 <= B < A`.
    fn hnf(gens: &[QuadInt]) -> (i128, i128, i128) {
        let (mut a, mut b, mut c) = (0i128, 0i128, 0i128);
        for g in gens {
            let (x, y) = (g.x, g.y);
            if y == 0 {
                a = gcd_i(a, x);
            } else if c == 0 {
                (b, c) = (x, y);
            } else {
                let (gg, u, v) = ext_gcd(c, y);
                let xr = (c / gg) * x - (y / gg) * b;
                a = gcd_i(a, xr);
                b = u * b + v * x;
                c = gg;
            }
        }
        if c < 0 {
            (b, c) = (-b, -c);
        }
        (a, b.rem_euclid(a), c)
    }

    fn basis(ring: &Ring, id: Ideal) -> [QuadInt; 2] {
        let al = ring.alpha(id.b);
        [QuadInt::rational(id.scale * id.a), QuadInt::new(id.scale * al.x, id.scale * al.y)]
    }

    fn lattice_product(ring: &Ring, i1: Ideal, i2: Ideal) -> (i128, i128, i128) {
        let (b1, b2) = (basis(ring, i1), basis(ring, i2));
        let gens: Vec<QuadInt> =
            b1.iter().flat_map(|&u| b2.iter().map(move |&v| ring.mul(u, v).unwrap())).collect();
        hnf(&gens)
    }

    /// Checks `I = g * J` as lattices.
    fn same_up_to(ring: &Ring, i: Ideal, g: QuadElem, j: Ideal) -> bool {
        let lhs: Vec<QuadInt> = basis(ring, i).iter().map(|u| QuadInt::new(u.x * g.den, u.y * g.den)).collect();
        let rhs: Vec<QuadInt> = basis(ring, j).iter().map(|&u| ring.mul(u, g.num).unwrap()).collect();
        hnf(&lhs) == hnf(&rhs)
    }

    fn brute_reduced_forms(disc: i64) -> usize {
        // all (a, b, c) with |b| <= a <= c, b >= 0 if |b| = a or a = c
        let d = disc as i128;
        let mut n = 0;
        for a in 1..=200i128 {
            for b in -a..=a {
                if (b * b - d) % (4 * a) == 0 {
                    let c = (b * b - d) / (4 * a);
                    if c >= a && !(b < 0 && (b == -a || a == c)) {
                        n += 1;
                    }
                }
            }
        }
        n
    }

    #[test]
    fn field_examples() {
        let f = build_field(-1).unwrap();
        assert_eq!(f.disc(), -4);
        assert_eq!(f.signature(), (0, 1));
        assert_eq!(f.roots_of_unity(), 4);
        assert_eq!(f.class_number(), 1);
        assert!((f.residue() - PI / 4.0).abs() < 1e-12);

        let f = build_field(-10).unwrap();
        assert_eq!((f.disc(), f.class_number(), f.cl2()), (-40, 2, 2));

        let f = build_field(2).unwrap();
        assert_eq!(f.disc(), 8);
        assert_eq!(f.unit(), Some(QuadInt::new(1, 1)));
        assert!((f.regulator() - (1.0 + 2f64.sqrt()).ln()).abs() < 1e-14);

        assert_eq!(build_field(4).unwrap_err(), Error::NotSquarefree(4));
        assert_eq!(build_field(1).unwrap_err(), Error::Degenerate(1));
        assert_eq!(build_field(0).unwrap_err(), Error::Zero);
        assert_eq!(build_field(-3).unwrap().roots_of_unity(), 6);
    }

    #[test]
    fn class_group_examples() {
        let g = class_group(-40).unwrap();
        assert_eq!((g.order(), g.invariants()), (2, &[2u64][..]));
        let g = class_group(-840).unwrap();
        assert_eq!((g.order(), g.two_torsion()), (8, 8));
        assert_eq!(g.invariants(), &[2, 2, 2]);
        let g = class_group(5).unwrap();
        assert_eq!(g.order(), 1);
        assert!(g.invariants().is_empty());
        assert!(class_group(20).is_err());
    }

    #[test]
    fn class_group_structure_known_cases() {
        // reference structures from an independent class group computation
        assert_eq!(class_group(-56).unwrap().invariants(), &[4]);
        assert_eq!(class_group(-260).unwrap().invariants(), &[2, 4]);
        assert_eq!(class_group(-3299).unwrap().invariants(), &[3, 9]);
        assert_eq!(class_group(-4027).unwrap().invariants(), &[3, 3]);
        assert_eq!(class_group(-3896).unwrap().invariants(), &[3, 12]);
        assert_eq!(class_group(316).unwrap().invariants(), &[3]);
        assert_eq!(class_group(328).unwrap().invariants(), &[4]);
        assert_eq!(class_group(40).unwrap().invariants(), &[2]);
    }

    #[test]
    fn fundamental_unit_examples() {
        let u = fundamental_unit(2).unwrap();
        assert_eq!((u.unit, u.norm), (QuadInt::new(1, 1), -1));
        let u = fundamental_unit(5).unwrap();
        assert_eq!((u.unit, u.norm), (QuadInt::new(0, 1), -1));
        let u = fundamental_unit(6).unwrap();
        assert_eq!((u.unit, u.norm), (QuadInt::new(5, 2), 1));
        // long period: x^2 - 94 y^2 = 1
        let u = fundamental_unit(94).unwrap();
        assert_eq!((u.unit, u.norm), (QuadInt::new(2143295, 221064), 1));
        assert!(fundamental_unit(-5).is_err());
    }

    #[test]
    fn units_have_unit_norm_and_match_regulator() {
        for d in 2..400i64 {
            if !arith::is_squarefree(d) {
                continue;
            }
            let Ok(u) = fundamental_unit(d) else { continue };
            let ring = Ring::new(arith::fundamental_discriminant_of(d).unwrap());
            assert_eq!(ring.norm(u.unit).unwrap(), u.norm as i128, "d={d}");
            let val = u.unit.x as f64 + u.unit.y as f64 * (ring.t as f64 + (ring.disc as f64).sqrt()) / 2.0;
            assert!((val.ln() - u.regulator).abs() < 1e-9 * u.regulator.max(1.0), "d={d}");
        }
    }

    #[test]
    fn cl2_examples() {
        assert_eq!(build_field(-10).unwrap().cl2(), 2);
        assert_eq!(build_field(-210).unwrap().cl2(), 8);
        assert_eq!(build_field(-1).unwrap().cl2(), 1);
    }

    #[test]
    fn imaginary_class_numbers_match_brute_force_forms() {
        for disc in arith::enumerate_fundamental_discriminants(2000) {
            if disc > 0 {
                continue;
            }
            let f = build_field(arith::core(disc)).unwrap();
            assert_eq!(f.class_number() as usize, brute_reduced_forms(disc), "D={disc}");
            let g = f.class_group().unwrap();
            assert_eq!(g.order(), f.class_number());
            assert_eq!(g.two_torsion(), f.cl2());
        }
    }

    #[test]
    fn real_class_numbers_match_cycles() {
        for disc in arith::enumerate_fundamental_discriminants(2000) {
            if disc < 0 {
                continue;
            }
            let f = build_field(arith::core(disc)).unwrap();
            let lhs = f.class_number() as f64 * f.regulator();
            assert!((lhs - f.residue() * (disc as f64).sqrt() / 2.0).abs() < 1e-6, "D={disc}");
            let g = f.class_group().unwrap();
            assert_eq!(g.order(), f.class_number(), "D={disc}");
            assert_eq!(g.two_torsion(), f.cl2(), "D={disc}");
        }
    }

    #[test]
    fn principal_cycle_returns_the_unit() {
        for d in [2i64, 3, 6, 7, 13, 14, 19, 31, 46, 94, 151, 223] {
            let f = build_field(d).unwrap();
            let g = f.class_group().unwrap();
            let eps = g.to_rep(0, 0).unwrap();
            assert_eq!(eps.den, 1);
            let u = f.unit().unwrap();
            let ok = [u, f.conj(u)].iter().any(|&v| {
                [1i128, -1].iter().any(|&s| QuadInt::new(s * v.x, s * v.y) == eps.num)
            });
            assert!(ok, "d={d}: {eps:?} vs {u:?}");
        }
    }

    #[test]
    fn composition_matches_lattice_product() {
        for disc in [-4i64, -23, -40, -84, -840, -1155, 5, 40, 60, 316, 1365] {
            let ring = Ring::new(disc);
            let f = build_field(arith::core(disc)).unwrap();
            let primes: Vec<Ideal> = f.prime_ideals_up_to(60).iter().map(|p| p.ideal()).collect();
            for &i in &primes {
                for &j in &primes {
                    if i.scale != 1 || j.scale != 1 {
                        continue;
                    }
                    let (g, a, b) = ring.compose((i.a, i.b), (j.a, j.b));
                    let k = Ideal { scale: g, a, b };
                    assert_eq!(lattice_product(&ring, i, j), hnf(&basis(&ring, k)), "D={disc} {i:?} {j:?}");
                }
            }
        }
    }

    #[test]
    fn tracked_reduction_relates_ideals() {
        for disc in [-4i64, -23, -40, -840, 5, 40, 316, 1365] {
            let ring = Ring::new(disc);
            let f = build_field(arith::core(disc)).unwrap();
            let primes = f.prime_ideals_up_to(200);
            let mut cur = f.one_ideal();
            for p in primes.iter().filter(|p| p.splitting != Splitting::Inert).take(12) {
                let (g, a, b) = ring.compose((cur.a, cur.b), (p.ideal().a, p.ideal().b));
                cur = Ideal { scale: 1, a, b };
                let _ = g;
                let (ra, rb, gamma) = ring.reduce_tracked(cur.a, cur.b).unwrap();
                assert!(same_up_to(&ring, cur, gamma, Ideal { scale: 1, a: ra, b: rb }), "D={disc}");
                let group = f.class_group().unwrap();
                let (class, gamma) = group.class_of(cur).unwrap();
                assert!(same_up_to(&ring, cur, gamma, group.rep(class)), "D={disc}");
                cur = Ideal { scale: 1, a: ra, b: rb };
            }
        }
    }

    #[test]
    fn generators_of_principal_ideals() {
        let f = build_field(-5).unwrap();
        let g = f.class_group().unwrap();
        // (2) = P2^2 and P3 P3' = (3) are principal; P2 is not
        let p2 = f.primes_above(2)[0].ideal();
        assert!(g.generator(p2).unwrap().is_none());
        let sq = g.mul_ideals(p2, p2).unwrap();
        let gen = g.generator(sq).unwrap().unwrap();
        assert_eq!(gen.den, 1);
        assert_eq!(f.norm(gen.num).unwrap().abs(), 4);
    }

    #[test]
    fn prime_ideal_examples() {
        let f = build_field(-1).unwrap();
        let norms: Vec<u64> = f.prime_ideals_up_to(10).iter().map(|p| p.norm).collect();
        assert_eq!(norms, vec![2, 5, 5, 9]);
        let f = build_field(5).unwrap();
        let norms: Vec<u64> = f.prime_ideals_up_to(5).iter().map(|p| p.norm).collect();
        assert_eq!(norms, vec![4, 5]);
    }

    #[test]
    fn omega_residues_are_roots() {
        for d in [-1i64, -5, -10, 2, 3, 5, 13, -210] {
            let f = build_field(d).unwrap();
            let (t, n) = f.omega_poly();
            for q in f.prime_ideals_up_to(500) {
                if let Some(r) = q.omega_residue {
                    let (r, p) = (r as i128, q.p as i128);
                    assert_eq!((r * r - t * r - n).rem_euclid(p), 0, "d={d} p={p}");
                    // w - r lies in the ideal
                    let id = q.ideal();
                    let (a, b, c) = hnf(&basis(f.ring(), id));
                    let _ = (a, c);
                    assert_eq!((b + r).rem_euclid(a), 0);
                }
            }
        }
    }

    #[test]
    fn ideal_counts_examples() {
        let f = build_field(-1).unwrap();
        let r = f.ideal_counts(10_000);
        assert_eq!((r[1], r[3], r[5], r[9]), (1, 0, 2, 1));
        // lattice points x^2 + y^2 = n, up to the 4 units
        let mut brute = vec![0u32; 10_001];
        for x in -100i64..=100 {
            for y in -100i64..=100 {
                let n = (x * x + y * y) as usize;
                if (1..=10_000).contains(&n) {
                    brute[n] += 1;
                }
            }
        }
        let total: u32 = r[1..].iter().sum();
        assert_eq!(total * 4, brute[1..].iter().sum::<u32>());
        for n in 1..=10_000 {
            assert_eq!(r[n] * 4, brute[n], "n={n}");
        }
    }

    #[test]
    fn ideal_count_growth_tracks_residue() {
        for d in [-1i64, 5, -10] {
            let f = build_field(d).unwrap();
            let r = f.ideal_counts(100_000);
            for &n in &[1000usize, 10_000, 100_000] {
                let s: u64 = r[1..=n].iter().map(|&v| v as u64).sum();
                let rel = (s as f64 / n as f64 - f.residue()).abs() / f.residue();
                assert!(rel < 5.0 / (n as f64).sqrt().sqrt(), "d={d} n={n} rel={rel}");
            }
        }
    }

    #[test]
    fn splitting_partitions_primes() {
        for d in [-1i64, -3, 2, 5, -210, 2310] {
            let f = build_field(d).unwrap();
            for &p in PrimeTable::new(2000).primes() {
                let ram = f.disc() % p as i64 == 0;
                assert_eq!(f.splitting(p) == Splitting::Ramified, ram);
                let above = f.primes_above(p);
                let total: u64 = above.iter().map(|q| q.norm).product();
                assert_eq!(total, if ram { p } else { p * p });
            }
        }
    }

    #[test]
    fn signs_of_real_embeddings() {
        let f = build_field(2).unwrap();
        assert_eq!(f.signs(QuadInt::new(1, 1)).unwrap(), (1, -1));
        assert_eq!(f.signs(QuadInt::new(-3, 2)).unwrap(), (-1, -1));
        assert_eq!(f.signs(QuadInt::new(3, -2)).unwrap(), (1, 1));
        let f = build_field(5).unwrap();
        // w = (1 + sqrt 5)/2 > 0, conjugate < 0
        assert_eq!(f.signs(QuadInt::new(0, 1)).unwrap(), (1, -1));
        assert_eq!(f.signs(QuadInt::new(-1, 0)).unwrap(), (-1, -1));
    }

    proptest! {
        #[test]
        fn norm_is_multiplicative(d in prop::sample::select(vec![-1i64, -3, -5, -10, 2, 3, 5, 13, 33]),
                                   x1 in -1000i128..1000, y1 in -1000i128..1000,
                                   x2 in -1000i128..1000, y2 in -1000i128..1000) {
            let f = build_field(d).unwrap();
            let (u, v) = (QuadInt::new(x1, y1), QuadInt::new(x2, y2));
            let uv = f.mul(u, v).unwrap();
            prop_assert_eq!(f.norm(uv).unwrap(), f.norm(u).unwrap() * f.norm(v).unwrap());
            prop_assert_eq!(f.mul(u, f.conj(u)).unwrap(), QuadInt::rational(f.norm(u).unwrap()));
            prop_assert_eq!(f.trace(u), f.trace(f.conj(u)));
        }

        #[test]
        fn class_of_product_is_product_of_classes(k1 in 0usize..30, k2 in 0usize..30,
                                                  d in prop::sample::select(vec![-210i64, -5, -65, 10, 79, 226])) {
            let f = build_field(d).unwrap();
            let g = f.class_group().unwrap();
            let primes: Vec<Ideal> = f.prime_ideals_up_to(400).iter()
                .filter(|p| p.splitting != Splitting::Inert).map(|p| p.ideal()).collect();
            let (i, j) = (primes[k1 % primes.len()], primes[k2 % primes.len()]);
            let (ci, _) = g.class_of(i).unwrap();
            let (cj, _) = g.class_of(j).unwrap();
            let (cij, _) = g.class_of(g.mul_ideals(i, j).unwrap()).unwrap();
            prop_assert_eq!(cij, g.mul(ci, cj));
        }
    }
}
