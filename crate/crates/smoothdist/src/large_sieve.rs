//! Gallagher's multiplicative large sieve inequality
//! `Σ_{q<=Q} (q/φ(q)) Σ*_{χ mod q} |Σ_n a_n χ(n)|² <= (N + 3Q²) Σ |a_n|²`
//! (the starred sum runs over primitive characters), plus the
//! conductor-range bookkeeping that splits characters into the three
//! analysis ranges.
//!
//! The trivial character mod 1 counts as primitive, so Q = 1 is non-vacuous.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::characters::{CharacterGroup, CharacterGroups};
use crate::error::{Error, Result};
use crate::factor::FactorTable;

/// Complex coefficients `a_n` supported on the window `offset+1 ..= offset+len`.
#[derive(Debug, Clone)]
pub struct CoefficientWindow {
    pub offset: u64,
    pub values: Vec<Complex64>,
}

impl CoefficientWindow {
    pub fn new(offset: u64, values: Vec<Complex64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::domain("coefficient window must be nonempty"));
        }
        if values
            .iter()
            .any(|v| !v.re.is_finite() || !v.im.is_finite())
        {
            return Err(Error::domain("coefficient window entries must be finite"));
        }
        Ok(CoefficientWindow { offset, values })
    }

    pub fn len(&self) -> u64 {
        self.values.len() as u64
    }

    /// Never true: construction rejects empty windows.
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Σ |a_n|².
    pub fn norm_sq(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum()
    }
}

/// Per-modulus primitive character sums `Σ*_χ |Σ_n a_n χ(n)|²`, bucketing the
/// window by residue class so each group costs one window pass plus a φ(q)²
/// transform.
fn primitive_char_sums_sq(group: &CharacterGroup, w: &CoefficientWindow) -> f64 {
    let mut class_acc = vec![Complex64::new(0.0, 0.0); group.phi() as usize];
    for (i, &a) in w.values.iter().enumerate() {
        let n = w.offset + 1 + i as u64;
        if let Some(class) = group.class_of(n) {
            class_acc[class] += a;
        }
    }
    let mut total = 0.0f64;
    for chi in group.characters() {
        if !chi.is_primitive() {
            continue;
        }
        let mut sum = Complex64::new(0.0, 0.0);
        for (class, &acc) in class_acc.iter().enumerate() {
            sum += group.unit(chi.angle_of_class(class)) * acc;
        }
        total += sum.norm_sqr();
    }
    total
}

/// Left-hand side of the inequality:
/// `Σ_{q<=Q} (q/φ(q)) Σ*_{χ mod q primitive} |Σ_n a_n χ(n)|²`.
pub fn large_sieve_lhs(q_max: u64, w: &CoefficientWindow, groups: &CharacterGroups) -> Result<f64> {
    if q_max == 0 {
        return Err(Error::domain("large_sieve_lhs requires Q >= 1"));
    }
    if groups.q_max() < q_max {
        return Err(Error::domain(format!(
            "groups built to {} but Q = {q_max}",
            groups.q_max()
        )));
    }
    let mut lhs = 0.0f64;
    for q in 1..=q_max {
        let group = groups.group(q)?;
        let weight = q as f64 / group.phi() as f64;
        lhs += weight * primitive_char_sums_sq(group, w);
    }
    Ok(lhs)
}

/// The inequality check: `ok` iff lhs <= (N + 3Q²)·Σ|a_n|².
#[derive(Debug, Clone, Copy)]
pub struct LargeSieveCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub ok: bool,
}

pub fn large_sieve_check(
    q_max: u64,
    w: &CoefficientWindow,
    groups: &CharacterGroups,
) -> Result<LargeSieveCheck> {
    let lhs = large_sieve_lhs(q_max, w, groups)?;
    let n = w.len() as f64;
    let rhs = (n + 3.0 * (q_max as f64) * (q_max as f64)) * w.norm_sq();
    Ok(LargeSieveCheck {
        lhs,
        rhs,
        ok: lhs <= rhs,
    })
}

/// Bucketing of primitive characters with conductor in (1, Q] by the three
/// analysis ranges:
///
/// (i) `r <= min(y^η, e^{η√log x})`, (ii) up to `x^η`, (iii) above `x^η`.
#[derive(Debug, Clone)]
pub struct ConductorBuckets {
    pub x: u64,
    pub y: u64,
    pub q_max: u64,
    pub eta: f64,
    /// min(y^η, e^{η√log x}): top of range (i).
    pub low_cut: f64,
    /// x^η: top of range (ii).
    pub mid_cut: f64,
    /// Primitive-character counts per range.
    pub counts: [u64; 3],
    /// Σ 1/φ(r) over the same characters.
    pub phi_mass: [f64; 3],
    /// True when the ranges collapse (x^η < 2 leaves (ii)/(iii) without room,
    /// or the cuts are out of order).
    pub degenerate: bool,
}

pub fn conductor_buckets(
    x: u64,
    y: u64,
    q_max: u64,
    eta: f64,
    groups: &CharacterGroups,
) -> Result<ConductorBuckets> {
    if !(eta > 0.0 && eta < 1.0) {
        return Err(Error::domain("conductor_buckets requires 0 < eta < 1"));
    }
    if x < 2 || y < 2 {
        return Err(Error::domain("conductor_buckets requires x, y >= 2"));
    }
    if groups.q_max() < q_max {
        return Err(Error::domain(format!(
            "groups built to {} but Q = {q_max}",
            groups.q_max()
        )));
    }
    let low_cut = (y as f64)
        .powf(eta)
        .min((eta * (x as f64).ln().sqrt()).exp());
    let mid_cut = (x as f64).powf(eta);
    let mut counts = [0u64; 3];
    let mut phi_mass = [0.0f64; 3];
    for r in 2..=q_max {
        let group = groups.group(r)?;
        let primitive = group.characters().filter(|c| c.is_primitive()).count() as u64;
        if primitive == 0 {
            continue;
        }
        let bucket = if (r as f64) <= low_cut {
            0
        } else if (r as f64) <= mid_cut {
            1
        } else {
            2
        };
        counts[bucket] += primitive;
        phi_mass[bucket] += primitive as f64 / group.phi() as f64;
    }
    Ok(ConductorBuckets {
        x,
        y,
        q_max,
        eta,
        low_cut,
        mid_cut,
        counts,
        phi_mass,
        degenerate: mid_cut < 2.0 || low_cut > mid_cut,
    })
}

/// Seeded random windows for inequality trials: length up to `n_max`,
/// offset up to `m_max`, entries uniform in the complex unit box.
pub fn seeded_windows(seed: u64, trials: u64, n_max: u64, m_max: u64) -> Vec<CoefficientWindow> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..trials)
        .map(|_| {
            let n = rng.gen_range(1..=n_max.max(1));
            let offset = rng.gen_range(0..=m_max);
            let values = (0..n)
                .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            CoefficientWindow { offset, values }
        })
        .collect()
}

/// The fixed adversarial catalog: windows that probe the inequality's
/// tightness. Progression-supported indicators, conjugated primitive
/// characters (near-extremal), and smooth-number indicators.
pub fn adversarial_windows(
    q_max: u64,
    n: u64,
    table: &FactorTable,
    groups: &CharacterGroups,
) -> Result<Vec<CoefficientWindow>> {
    table.check_capacity("adversarial_windows", n)?;
    if n == 0 {
        return Err(Error::domain("adversarial catalog requires N >= 1"));
    }
    let mut out = Vec::new();
    // indicators of arithmetic progressions
    for &(q, a) in &[(3u64, 1u64), (4, 3), (8, 5), (12, 7)] {
        let values = (1..=n)
            .map(|i| {
                if i % q == a {
                    Complex64::new(1.0, 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            })
            .collect();
        out.push(CoefficientWindow { offset: 0, values });
    }
    // a_n = conj(χ(n)) for one primitive character per small modulus
    for q in [5u64, 7, 11, 16].iter().filter(|&&q| q <= q_max) {
        let group = groups.group(*q)?;
        if let Some(chi) = group
            .characters()
            .find(|c| c.is_primitive() && !c.is_principal())
        {
            let values = (1..=n).map(|i| chi.value(i).conj()).collect();
            out.push(CoefficientWindow { offset: 0, values });
        }
    }
    // smooth-number indicators at a few smoothness levels
    for y in [5u64, 20, 100] {
        let values = (1..=n)
            .map(|i| {
                if table.is_smooth(i, y) {
                    Complex64::new(1.0, 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            })
            .collect();
        out.push(CoefficientWindow { offset: 0, values });
    }
    Ok(out)
}
