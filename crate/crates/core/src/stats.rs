//! Desk-scale experiments on `log L(1, chi)` over real character families and on
//! the distribution of `omega_Y(D)` over fundamental discriminants.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{self, PrimeTable};
use crate::dirichlet::{self, QuadChar, EXCEPTIONAL_FLOOR};
use crate::special::pairwise_sum;
use crate::{Error, Result};

/// Second moment of `log L(1, chi)` over the nonprincipal real characters mod `D`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentReport {
    pub modulus: u64,
    pub y: u64,
    pub threshold: u64,
    pub omega_y: u32,
    pub family_size: usize,
    /// Characters dropped because `L(1, chi)` fell below the exceptional floor.
    pub excluded: usize,
    pub second_moment_exact: f64,
    pub second_moment_truncated: f64,
    /// `(log log D)(log omega_Y + log log Y) + (log log D)^2 / 2^{omega_Y}`.
    pub bound_envelope: f64,
}

fn family(modulus: u64) -> Result<Vec<QuadChar>> {
    let chars: Vec<QuadChar> = dirichlet::quadratic_characters_mod(modulus)?.nonprincipal().cloned().collect();
    if chars.is_empty() {
        return Err(Error::Parameter(format!("no nonprincipal real character mod {modulus}")));
    }
    Ok(chars)
}

/// `L(1, chi)` for every member, dropping values below the exceptional floor.
fn family_l1(chars: &[QuadChar]) -> Result<Vec<(QuadChar, f64)>> {
    let values: Vec<f64> = chars.par_iter().map(dirichlet::l1_value).collect::<Result<_>>()?;
    Ok(chars
        .iter()
        .cloned()
        .zip(values)
        .filter(|&(_, l)| !dirichlet::is_exceptional(l, EXCEPTIONAL_FLOOR))
        .collect())
}

fn mean(xs: &[f64]) -> f64 {
    pairwise_sum(xs) / xs.len() as f64
}

pub fn bound_envelope(modulus: u64, omega_y: u32, y: u64) -> f64 {
    let ll = (modulus as f64).ln().ln();
    let log_omega = if omega_y == 0 { 0.0 } else { (omega_y as f64).ln() };
    ll * (log_omega + (y as f64).ln().ln()) + ll * ll / f64::powi(2.0, omega_y as i32)
}

pub fn second_moment(modulus: u64, y: u64, threshold: u64) -> Result<MomentReport> {
    if modulus < 3 {
        return Err(Error::Parameter(format!("modulus {modulus} < 3")));
    }
    if y < 3 || y > modulus {
        return Err(Error::Parameter(format!("need 3 <= Y <= D, got Y = {y}")));
    }
    let chars = family(modulus)?;
    let kept = family_l1(&chars)?;
    let primes = PrimeTable::new(threshold);
    let exact: Vec<f64> = kept.iter().map(|(_, l)| l.ln().powi(2)).collect();
    let truncated: Vec<f64> = kept
        .par_iter()
        .map(|(chi, _)| dirichlet::log_l1_truncated(chi, threshold, &primes).map(|v| v * v))
        .collect::<Result<_>>()?;
    let omega_y = arith::omega_y(modulus as i64, y);
    Ok(MomentReport {
        modulus,
        y,
        threshold,
        omega_y,
        family_size: chars.len(),
        excluded: chars.len() - kept.len(),
        second_moment_exact: mean(&exact),
        second_moment_truncated: mean(&truncated),
        bound_envelope: bound_envelope(modulus, omega_y, y),
    })
}

/// Share of the family with `L(1, chi) >= exp(-k sigma)`, `sigma^2` the exact second moment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LowerBound {
    pub modulus: u64,
    pub k: f64,
    pub sigma: f64,
    pub threshold: f64,
    pub fraction_meeting: f64,
    /// `1 - 1/k^2`.
    pub guaranteed: f64,
}

pub fn lower_bound_proportion(modulus: u64, k: f64) -> Result<LowerBound> {
    if !(k >= 1.0) {
        return Err(Error::Parameter(format!("k must be at least 1, got {k}")));
    }
    let kept = family_l1(&family(modulus)?)?;
    let logs: Vec<f64> = kept.iter().map(|(_, l)| l.ln()).collect();
    Ok(lower_bound_from_logs(modulus, &logs, k))
}

fn lower_bound_from_logs(modulus: u64, logs: &[f64], k: f64) -> LowerBound {
    let squares: Vec<f64> = logs.iter().map(|x| x * x).collect();
    let sigma = mean(&squares).sqrt();
    let cut = -k * sigma;
    let meeting = logs.iter().filter(|&&x| x >= cut).count();
    LowerBound {
        modulus,
        k,
        sigma,
        threshold: cut.exp(),
        fraction_meeting: meeting as f64 / logs.len() as f64,
        guaranteed: 1.0 - 1.0 / (k * k),
    }
}

const CENSUS_MAGIC: &[u8; 4] = b"QCEN";
const CENSUS_VERSION: u32 = 1;
const CENSUS_BLOCK: u64 = 1 << 16;

/// `(D, omega_Y(D))` for every fundamental discriminant with `|D| <= X`.
#[derive(Debug, Clone, PartialEq)]
pub struct Census {
    pub x: u64,
    pub y: u64,
    pub records: Vec<(i64, u8)>,
}

/// Summary of a census.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscStats {
    pub x: u64,
    pub y: u64,
    pub count: usize,
    pub empirical_mean: f64,
    pub empirical_variance: f64,
    /// `sum_{p <= Y} 1/(p+1)`.
    pub theoretical_mean: f64,
    /// `sum_{p <= Y} (1/(p+1)) (1 - 1/(p+1))`.
    pub theoretical_variance: f64,
    /// `(k, share with |omega_Y - mean| >= k sigma)`.
    pub exceedance: Vec<(f64, f64)>,
}

pub fn theoretical_moments(y: u64) -> (f64, f64) {
    let primes = PrimeTable::new(y);
    primes.primes().iter().fold((0.0, 0.0), |(m, v), &p| {
        let q = 1.0 / (p + 1) as f64;
        (m + q, v + q * (1.0 - q))
    })
}

impl Census {
    pub fn compute(x: u64, y: u64) -> Result<Census> {
        if x < 3 {
            return Err(Error::Parameter(format!("X = {x} < 3")));
        }
        let small = PrimeTable::new(y).primes().to_vec();
        let blocks = arith::discriminant_blocks(x, CENSUS_BLOCK);
        let parts: Vec<Vec<(i64, u8)>> = blocks
            .par_iter()
            .map(|&(lo, hi)| {
                arith::fundamental_discriminants_between(lo, hi)
                    .into_iter()
                    .map(|d| (d, arith::omega_y_with(d, &small)))
                    .collect()
            })
            .collect();
        Ok(Census { x, y, records: parts.concat() })
    }

    /// Write the 16-byte header and the records.
    pub fn save(&self, path: &Path) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        w.write_all(CENSUS_MAGIC)?;
        w.write_u32::<LittleEndian>(CENSUS_VERSION)?;
        w.write_u32::<LittleEndian>(u32::try_from(self.x).map_err(|_| Error::Overflow("census X"))?)?;
        w.write_u32::<LittleEndian>(u32::try_from(self.y).map_err(|_| Error::Overflow("census Y"))?)?;
        for &(d, w_) in &self.records {
            w.write_i64::<LittleEndian>(d)?;
            w.write_u8(w_)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Census> {
        let mut r = BufReader::new(File::open(path)?);
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != CENSUS_MAGIC {
            return Err(Error::Io("not a census file".into()));
        }
        let version = r.read_u32::<LittleEndian>()?;
        if version != CENSUS_VERSION {
            return Err(Error::Io(format!("census version {version}")));
        }
        let x = r.read_u32::<LittleEndian>()? as u64;
        let y = r.read_u32::<LittleEndian>()? as u64;
        let mut records = Vec::new();
        loop {
            let d = match r.read_i64::<LittleEndian>() {
                Ok(d) => d,
                Err(e) if e.kind() == std::io::ErrorKind::UnexpectedEof => break,
                Err(e) => return Err(e.into()),
            };
            records.push((d, r.read_u8()?));
        }
        Ok(Census { x, y, records })
    }

    /// Load `path` if it holds this `(X, Y)`, otherwise compute and write it.
    pub fn cached(path: &Path, x: u64, y: u64) -> Result<Census> {
        if let Ok(c) = Census::load(path) {
            if c.x == x && c.y == y {
                return Ok(c);
            }
        }
        let c = Census::compute(x, y)?;
        c.save(path)?;
        Ok(c)
    }

    fn mean_variance(&self) -> (f64, f64) {
        let n = self.records.len() as f64;
        let (s1, s2) = self
            .records
            .iter()
            .fold((0u64, 0u64), |(a, b), &(_, w)| (a + w as u64, b + (w as u64).pow(2)));
        let m = s1 as f64 / n;
        (m, (s2 as f64 / n - m * m).max(0.0))
    }

    /// Share of records with `|omega_Y - mean| >= k sigma`; zero when `sigma = 0`.
    pub fn exceedance(&self, k: f64) -> f64 {
        let (m, v) = self.mean_variance();
        let s = v.sqrt();
        if s == 0.0 {
            return 0.0;
        }
        let hits = self.records.iter().filter(|&&(_, w)| (w as f64 - m).abs() >= k * s).count();
        hits as f64 / self.records.len() as f64
    }

    pub fn stats(&self, ks: &[f64]) -> DiscStats {
        let (m, v) = self.mean_variance();
        let (tm, tv) = theoretical_moments(self.y);
        DiscStats {
            x: self.x,
            y: self.y,
            count: self.records.len(),
            empirical_mean: m,
            empirical_variance: v,
            theoretical_mean: tm,
            theoretical_variance: tv,
            exceedance: ks.iter().map(|&k| (k, self.exceedance(k))).collect(),
        }
    }
}

pub const DEFAULT_KS: [f64; 3] = [1.0, 2.0, 3.0];

pub fn omega_census(x: u64, y: u64) -> Result<DiscStats> {
    if y.saturating_mul(y) > x {
        return Err(Error::Parameter(format!("need Y <= X^(1/2), got X = {x}, Y = {y}")));
    }
    Ok(Census::compute(x, y)?.stats(&DEFAULT_KS))
}

/// Exceedance at `k` with `Y = floor(log X)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExceptionalReport {
    pub x: u64,
    pub y: u64,
    pub k: f64,
    pub fraction: f64,
    /// `1/k^2 + 0.01`.
    pub allowance: f64,
}

pub fn exceptional_y(x: u64) -> u64 {
    ((x as f64).ln().floor() as u64).max(2)
}

pub fn exceptional_fraction(x: u64, k: f64) -> Result<ExceptionalReport> {
    if x < 100 {
        return Err(Error::Parameter(format!("X = {x} < 100")));
    }
    let census = Census::compute(x, exceptional_y(x))?;
    Ok(exceptional_from(&census, k))
}

pub fn exceptional_from(census: &Census, k: f64) -> ExceptionalReport {
    ExceptionalReport {
        x: census.x,
        y: census.y,
        k,
        fraction: census.exceedance(k),
        allowance: 1.0 / (k * k) + 0.01,
    }
}

/// How the per-discriminant threshold on `L(1, chi)` is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Threshold {
    /// `exp(-c (log log |D|)^{1 - log 2 / 2 + eps})`.
    Power { c: f64, eps: f64 },
    /// `exp(-k sigma_D)` with `sigma_D^2` the family's exact second moment.
    Chebyshev { k: f64 },
}

impl Default for Threshold {
    fn default() -> Self {
        Threshold::Power { c: 1.0, eps: 0.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TypicalSample {
    pub disc: i64,
    pub family_size: usize,
    pub threshold: f64,
    pub fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TypicalReport {
    pub x: u64,
    pub threshold: Threshold,
    pub samples: Vec<TypicalSample>,
    pub min_fraction: f64,
    pub median_fraction: f64,
    pub mean_fraction: f64,
}

/// `sample` fundamental discriminants with `|D| <= x`, picked by the golden-ratio
/// sequence over the `|D|`-ordered list.
pub fn sample_discriminants(x: u64, sample: usize) -> Vec<i64> {
    let all = arith::enumerate_fundamental_discriminants(x);
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut picked: Vec<usize> = (1..=sample)
        .map(|i| ((i as f64 * phi).fract() * all.len() as f64) as usize)
        .collect();
    picked.sort_unstable();
    picked.dedup();
    picked.into_iter().map(|i| all[i]).collect()
}

pub fn typical_chi_experiment(x: u64, sample: usize, threshold: Threshold) -> Result<TypicalReport> {
    if x < 3 || sample == 0 {
        return Err(Error::Parameter("need X >= 3 and a nonempty sample".into()));
    }
    let samples: Vec<TypicalSample> = sample_discriminants(x, sample)
        .into_iter()
        .map(|disc| {
            let m = disc.unsigned_abs();
            let kept = family_l1(&family(m)?)?;
            let logs: Vec<f64> = kept.iter().map(|(_, l)| l.ln()).collect();
            let cut = match threshold {
                Threshold::Power { c, eps } => {
                    let ll = (m as f64).ln().ln().max(0.0);
                    -c * ll.powf(1.0 - std::f64::consts::LN_2 / 2.0 + eps)
                }
                Threshold::Chebyshev { k } => lower_bound_from_logs(m, &logs, k).threshold.ln(),
            };
            let meeting = logs.iter().filter(|&&v| v >= cut).count();
            Ok(TypicalSample {
                disc,
                family_size: logs.len(),
                threshold: cut.exp(),
                fraction: meeting as f64 / logs.len() as f64,
            })
        })
        .collect::<Result<_>>()?;
    let mut fractions: Vec<f64> = samples.iter().map(|s| s.fraction).collect();
    fractions.sort_by(f64::total_cmp);
    let n = fractions.len();
    let median = if n % 2 == 1 { fractions[n / 2] } else { (fractions[n / 2 - 1] + fractions[n / 2]) / 2.0 };
    Ok(TypicalReport {
        x,
        threshold,
        min_fraction: fractions[0],
        median_fraction: median,
        mean_fraction: fractions.iter().sum::<f64>() / n as f64,
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn theoretical_mean_small_y() {
        let (m, v) = theoretical_moments(10);
        assert!((m - 0.875).abs() < 1e-15);
        let want: f64 = [3.0, 4.0, 6.0, 8.0].iter().map(|q| (1.0 / q) * (1.0 - 1.0 / q)).sum();
        assert!((v - want).abs() < 1e-15);
    }

    #[test]
    fn prime_modulus_has_one_character() {
        for p in [7u64, 13, 101] {
            let r = second_moment(p, 3, 10_000).unwrap();
            assert_eq!(r.family_size, 1);
            let star = if p % 4 == 1 { p as i64 } else { -(p as i64) };
            let l = dirichlet::l1_exact(star).unwrap();
            assert!((r.second_moment_exact - l.ln().powi(2)).abs() < 1e-14);
        }
    }

    #[test]
    fn census_matches_brute_force() {
        let c = Census::compute(10_000, 10).unwrap();
        let brute: Vec<(i64, u8)> = (1..=10_000i64)
            .flat_map(|a| [-a, a])
            .filter(|&d| d != 1 && arith::is_fundamental(d))
            .map(|d| (d, [2, 3, 5, 7].iter().filter(|&&p| d % p == 0).count() as u8))
            .collect();
        assert_eq!(c.records, brute);
    }

    #[test]
    fn census_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("census.bin");
        let c = Census::compute(5_000, 7).unwrap();
        c.save(&path).unwrap();
        let bytes = std::fs::metadata(&path).unwrap().len();
        assert_eq!(bytes, 16 + 9 * c.records.len() as u64);
        assert_eq!(Census::load(&path).unwrap(), c);
        assert_eq!(Census::cached(&path, 5_000, 7).unwrap(), c);
        let other = Census::cached(&path, 6_000, 7).unwrap();
        assert_eq!(Census::load(&path).unwrap(), other);
    }

    #[test]
    fn chebyshev_contracts() {
        for m in [3 * 5 * 7 * 11 * 13u64, 4 * 3 * 5 * 7 * 11, 1155] {
            for k in [1.0, 1.5, 2.0, 3.0] {
                let b = lower_bound_proportion(m, k).unwrap();
                assert!(b.fraction_meeting >= b.guaranteed, "m={m} k={k}");
            }
        }
        let c = Census::compute(20_000, 13).unwrap();
        for k in [1.0, 1.5, 2.0, 3.0] {
            assert!(c.exceedance(k) <= 1.0 / (k * k), "k={k}");
        }
    }

    #[test]
    fn typical_with_huge_c_is_all() {
        let r = typical_chi_experiment(2_000, 12, Threshold::Power { c: 1e6, eps: 0.0 }).unwrap();
        assert!(r.samples.iter().all(|s| s.fraction == 1.0));
        let r = typical_chi_experiment(2_000, 12, Threshold::Chebyshev { k: 3.0 }).unwrap();
        assert!(r.samples.iter().all(|s| s.fraction >= 8.0 / 9.0));
    }

    #[test]
    fn sample_is_deterministic() {
        let a = sample_discriminants(10_000, 20);
        assert_eq!(a, sample_discriminants(10_000, 20));
        assert_eq!(a.len(), 20);
        assert!(a.iter().all(|&d| arith::is_fundamental(d) && d.unsigned_abs() <= 10_000));
    }

    #[test]
    fn census_fixture_small() {
        let s = Census::compute(10_000, 10).unwrap().stats(&DEFAULT_KS);
        assert_eq!(s.count, 6086);
        assert_eq!(s.empirical_mean, 0.8756161682550115);
        assert!((s.empirical_variance - 0.6590275122196916).abs() < 1e-12);
        assert!(omega_census(10_000, 101).is_err());
    }

    #[test]
    fn moment_methods_agree_on_fixtures() {
        let r = second_moment(255_255, 17, 1_000_000).unwrap();
        assert_eq!(r.family_size, 63);
        assert!((r.second_moment_exact - 0.31388206762304466).abs() < 1e-12);
        assert!((r.second_moment_exact - r.second_moment_truncated).abs() <= 0.1);
        let ll = 255_255f64.ln().ln();
        assert!((r.bound_envelope - (ll * (6f64.ln() + 17f64.ln().ln()) + ll * ll / 64.0)).abs() < 1e-12);
    }

    #[test]
    fn brun_titchmarsh_on_sieved_counts() {
        let table = PrimeTable::new(200_000);
        let count = |lo: u64, hi: u64, q: u64, a: u64| {
            table.primes().iter().filter(|&&p| p > lo && p <= hi && p % q == a).count() as f64
        };
        for q in [1u64, 3, 4, 5, 8, 12] {
            let phi = (1..=q).filter(|&a| arith::gcd(a as u128, q as u128) == 1).count() as f64;
            for a in (0..q).filter(|&a| arith::gcd(a as u128, q as u128) == 1) {
                for (x, y) in [(0, 1_000), (10_000, 5_000), (100_000, 50_000), (150_000, 40_000)] {
                    let bound = 2.0 * y as f64 / (phi * (y as f64 / q as f64).ln());
                    assert!(count(x, x + y, q, a % q) <= bound, "q={q} a={a} x={x} y={y}");
                }
            }
        }
    }
}
