//! Assembled left-hand sides and right-hand shapes of the averaged
//! progression-error bounds for smooth numbers, together with the exact
//! character-sum bridges and the fitted-constant machinery.
//!
//! Two averaged errors are measured for moduli q <= Q:
//!
//! - the worst-residue average `Σ_q max_{(a,q)=1} |Ψ(x,y;q,a) − Ψ_q(x,y)/φ(q)|`
//!   (Bombieri–Vinogradov form), majorized by
//!   `Σ_q (1/φ(q)) Σ_{χ≠χ₀} |Ψ(x,y;χ)|`;
//! - the all-residue variance `Σ_q Σ_{(a,q)=1} |·|²`
//!   (Barban–Davenport–Halberstam form), *equal* to
//!   `Σ_q (1/φ(q)) Σ_{χ≠χ₀} |Ψ(x,y;χ)|²` by orthogonality.
//!
//! The right-hand shapes carry an inexplicit constant c; nothing here asserts
//! the asymptotic theorems. [`fit_constant`] measures the largest c the desk
//! grid tolerates and reports it.

use rayon::prelude::*;

use crate::arith::{gcd, totient};
use crate::characters::{psi_char_all, CharacterGroups};
use crate::error::{Error, Result};
use crate::factor::FactorTable;
use crate::smooth::residue_counts;

/// Which averaged error an instance measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TheoremKind {
    /// Worst coprime residue, summed over moduli.
    BombieriVinogradov,
    /// Squared error over all coprime residues, summed over moduli.
    BarbanDavenportHalberstam,
}

/// One grid point's measured quantities.
#[derive(Debug, Clone)]
pub struct TheoremInstance {
    pub kind: TheoremKind,
    pub x: u64,
    pub y: u64,
    pub q_max: u64,
    /// u = log x / log y.
    pub u: f64,
    /// Ψ(x, y), exact.
    pub psi: f64,
    pub lhs: f64,
    pub char_form: f64,
}

impl TheoremInstance {
    /// The right-hand shape at constant c.
    pub fn rhs_shape(&self, c: f64) -> f64 {
        match self.kind {
            TheoremKind::BombieriVinogradov => {
                bv_rhs_shape(self.x, self.y, self.q_max, c, self.psi)
            }
            TheoremKind::BarbanDavenportHalberstam => {
                bdh_rhs_shape(self.x, self.y, self.q_max, c, self.psi)
            }
        }
    }

    /// The log-power variant of the shape, `(c, A)` jointly supplied. These
    /// shapes carry ineffective constants and are reported, never asserted.
    pub fn rhs_shape_log_power(&self, c: f64, a: f64) -> f64 {
        let x = self.x as f64;
        let u = self.u;
        let decay =
            (-c * u / (u + 1.0).ln().powi(2)).exp() / x.ln().powf(a) + (self.y as f64).powf(-c);
        match self.kind {
            TheoremKind::BombieriVinogradov => {
                self.psi * decay + self.psi.sqrt() * self.q_max as f64 * x.ln().powf(3.5)
            }
            TheoremKind::BarbanDavenportHalberstam => {
                self.psi * self.psi * decay + self.psi * self.q_max as f64
            }
        }
    }

    /// Q-range flag: the theorem statements take Q <= sqrt(Ψ) (worst-residue
    /// form) or Q <= Ψ (variance form); points beyond are measured anyway.
    pub fn q_in_stated_range(&self) -> bool {
        match self.kind {
            TheoremKind::BombieriVinogradov => (self.q_max as f64) <= self.psi.sqrt(),
            TheoremKind::BarbanDavenportHalberstam => (self.q_max as f64) <= self.psi,
        }
    }
}

/// Per-modulus deviations from equidistribution, as (max over coprime a,
/// sum of squares over coprime a) of `|count(a) − Ψ_q/φ(q)|`.
fn modulus_deviation(x: u64, y: u64, q: u64, table: &FactorTable) -> Result<(f64, f64)> {
    let counts = residue_counts(x, y, q, table)?;
    let phi = totient(q) as f64;
    let coprime: Vec<u64> = (0..q).filter(|&a| gcd(a, q) == 1).collect();
    let psi_q: u64 = coprime.iter().map(|&a| counts[a as usize]).sum();
    let expected = psi_q as f64 / phi;
    let mut max_dev = 0.0f64;
    let mut sq_sum = 0.0f64;
    for &a in &coprime {
        let dev = (counts[a as usize] as f64 - expected).abs();
        max_dev = max_dev.max(dev);
        sq_sum += dev * dev;
    }
    Ok((max_dev, sq_sum))
}

/// `Σ_{q<=Q} max_{(a,q)=1} |Ψ(x,y;q,a) − Ψ_q(x,y)/φ(q)|`, exact counting.
pub fn bv_lhs(x: u64, y: u64, q_max: u64, table: &FactorTable) -> Result<f64> {
    if q_max == 0 {
        return Err(Error::domain("bv_lhs requires Q >= 1"));
    }
    let per_q: Result<Vec<f64>> = (1..=q_max)
        .into_par_iter()
        .map(|q| modulus_deviation(x, y, q, table).map(|d| d.0))
        .collect();
    Ok(per_q?.into_iter().sum())
}

/// `Σ_{q<=Q} Σ_{(a,q)=1} |Ψ(x,y;q,a) − Ψ_q(x,y)/φ(q)|²`, exact counting.
pub fn bdh_lhs(x: u64, y: u64, q_max: u64, table: &FactorTable) -> Result<f64> {
    if q_max == 0 {
        return Err(Error::domain("bdh_lhs requires Q >= 1"));
    }
    let per_q: Result<Vec<f64>> = (1..=q_max)
        .into_par_iter()
        .map(|q| modulus_deviation(x, y, q, table).map(|d| d.1))
        .collect();
    Ok(per_q?.into_iter().sum())
}

/// The character majorant `Σ_{q<=Q} (1/φ(q)) Σ_{χ≠χ₀} |Ψ(x,y;χ)|`.
pub fn bv_char_form(
    x: u64,
    y: u64,
    q_max: u64,
    groups: &CharacterGroups,
    table: &FactorTable,
) -> Result<f64> {
    char_form(x, y, q_max, groups, table, false)
}

/// The exact-variance bridge `Σ_{q<=Q} (1/φ(q)) Σ_{χ≠χ₀} |Ψ(x,y;χ)|²`.
pub fn bdh_char_form(
    x: u64,
    y: u64,
    q_max: u64,
    groups: &CharacterGroups,
    table: &FactorTable,
) -> Result<f64> {
    char_form(x, y, q_max, groups, table, true)
}

fn char_form(
    x: u64,
    y: u64,
    q_max: u64,
    groups: &CharacterGroups,
    table: &FactorTable,
    squared: bool,
) -> Result<f64> {
    if q_max == 0 {
        return Err(Error::domain("char_form requires Q >= 1"));
    }
    if groups.q_max() < q_max {
        return Err(Error::domain(format!(
            "groups built to {} but Q = {q_max}",
            groups.q_max()
        )));
    }
    let per_q: Result<Vec<f64>> = (1..=q_max)
        .into_par_iter()
        .map(|q| -> Result<f64> {
            let group = groups.group(q)?;
            let sums = psi_char_all(x, y, group, table)?;
            let inner: f64 = sums
                .iter()
                .skip(1) // index 0 is principal
                .map(|s| if squared { s.norm_sqr() } else { s.norm() })
                .sum();
            Ok(inner / group.phi() as f64)
        })
        .collect();
    Ok(per_q?.into_iter().sum())
}

/// Worst-residue right-hand shape
/// `Ψ(e^{−cu/log²(u+1)} + y^{−c}) + sqrt(Ψ) · Q · log^{7/2} x`.
pub fn bv_rhs_shape(x: u64, y: u64, q_max: u64, c: f64, psi_val: f64) -> f64 {
    let log_x = (x as f64).ln();
    let u = log_x / (y as f64).ln();
    let decay = (-c * u / (u + 1.0).ln().powi(2)).exp() + (y as f64).powf(-c);
    psi_val * decay + psi_val.sqrt() * q_max as f64 * log_x.powf(3.5)
}

/// Variance right-hand shape `Ψ²(e^{−cu/log²(u+1)} + y^{−c}) + Ψ·Q`.
pub fn bdh_rhs_shape(x: u64, y: u64, q_max: u64, c: f64, psi_val: f64) -> f64 {
    let u = (x as f64).ln() / (y as f64).ln();
    let decay = (-c * u / (u + 1.0).ln().powi(2)).exp() + (y as f64).powf(-c);
    psi_val * psi_val * decay + psi_val * q_max as f64
}

/// Assemble one grid point: exact lhs, the character form, Ψ and u.
pub fn instance(
    kind: TheoremKind,
    x: u64,
    y: u64,
    q_max: u64,
    groups: &CharacterGroups,
    table: &FactorTable,
) -> Result<TheoremInstance> {
    let psi = crate::smooth::psi(x, y, table)? as f64;
    let (lhs, char_form_val) = match kind {
        TheoremKind::BombieriVinogradov => (
            bv_lhs(x, y, q_max, table)?,
            bv_char_form(x, y, q_max, groups, table)?,
        ),
        TheoremKind::BarbanDavenportHalberstam => (
            bdh_lhs(x, y, q_max, table)?,
            bdh_char_form(x, y, q_max, groups, table)?,
        ),
    };
    Ok(TheoremInstance {
        kind,
        x,
        y,
        q_max,
        u: (x as f64).ln() / (y as f64).ln(),
        psi,
        lhs,
        char_form: char_form_val,
    })
}

/// Bisection resolution for fitted constants.
pub const FIT_RESOLUTION: f64 = 1e-4;
/// Cap for fitted constants.
pub const FIT_CAP: f64 = 2.0;
const FIT_FLOOR: f64 = 1e-9;

/// The largest `c` in (0, 2] with `lhs <= rhs_shape(c)` on every instance,
/// by bisection at 1e-4 resolution. Returns 0.0 when even c -> 0+ fails,
/// which would falsify the shape at desk scale: callers report that rather
/// than crash.
pub fn fit_constant(instances: &[TheoremInstance], kind: TheoremKind) -> Result<f64> {
    fit_with(instances, kind, |inst, c| inst.rhs_shape(c))
}

/// Joint `(c, A)` fit for the log-power variant shape at a fixed A.
pub fn fit_constant_log_power(
    instances: &[TheoremInstance],
    kind: TheoremKind,
    a: f64,
) -> Result<f64> {
    fit_with(instances, kind, |inst, c| inst.rhs_shape_log_power(c, a))
}

fn fit_with<F: Fn(&TheoremInstance, f64) -> f64>(
    instances: &[TheoremInstance],
    kind: TheoremKind,
    shape: F,
) -> Result<f64> {
    if instances.is_empty() {
        return Err(Error::domain("fit_constant requires at least one instance"));
    }
    if instances.iter().any(|i| i.kind != kind) {
        return Err(Error::domain("fit_constant: mixed instance kinds"));
    }
    let feasible = |c: f64| instances.iter().all(|i| i.lhs <= shape(i, c));
    if !feasible(FIT_FLOOR) {
        return Ok(0.0);
    }
    if feasible(FIT_CAP) {
        return Ok(FIT_CAP);
    }
    let (mut lo, mut hi) = (FIT_FLOOR, FIT_CAP);
    while hi - lo > FIT_RESOLUTION {
        let mid = 0.5 * (lo + hi);
        if feasible(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}
