//! Dirichlet characters mod q and all character-weighted smooth sums.
//!
//! The group (ℤ/qℤ)* is decomposed into cyclic components: one per odd prime
//! power (generated by its least primitive root) and the ±1 × ⟨5⟩ pair for
//! 2^e with e >= 3. A character is an exponent vector against those fixed
//! generators, so its values are exact roots of unity e^{2πi t/L} with
//! L the group exponent; the integer angle bookkeeping keeps orthogonality
//! identities exact up to one final rounding. Generator choice is
//! deterministic (least primitive root), so individual values are
//! reproducible across runs.

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::arith::{factorize, gcd, lcm, mod_pow};
use crate::error::{Error, Result};
use crate::factor::FactorTable;
use crate::primes::primes_up_to;

/// Documented modulus ceiling for character groups.
pub const MAX_MODULUS: u64 = 1_000_000;

const NO_CLASS: u32 = u32::MAX;

/// One cyclic factor of (ℤ/qℤ)*.
#[derive(Debug, Clone)]
struct Component {
    /// Generator as a residue mod q (CRT-lifted so it is 1 in the other
    /// prime-power blocks).
    generator: u64,
    order: u64,
    /// L / order, where L is the group exponent.
    scale: u64,
}

/// A prime-power block p^e of the modulus and the component(s) it owns.
#[derive(Debug, Clone)]
struct PrimeBlock {
    prime: u64,
    /// Indices into `components`: odd p and 2^2 own one, 2^e (e >= 3) owns
    /// two (the ±1 component first, then ⟨5⟩).
    first_component: usize,
    component_count: usize,
}

struct GroupInner {
    modulus: u64,
    phi: u64,
    /// Group exponent: lcm of component orders (1 for q = 1, 2).
    exponent: u64,
    components: Vec<Component>,
    blocks: Vec<PrimeBlock>,
    /// Residue -> class index, or NO_CLASS when gcd(residue, q) > 1.
    class_of: Vec<u32>,
    /// Per class, per component: dlog * scale. Flat, stride = #components.
    scaled_dlogs: Vec<u64>,
    /// unit[t] = e^{2πi t / L}.
    units: Vec<Complex64>,
}

/// The full group of Dirichlet characters mod q. Cheap to clone (shared).
#[derive(Clone)]
pub struct CharacterGroup {
    inner: Arc<GroupInner>,
}

impl CharacterGroup {
    /// Build the group for modulus `q`.
    pub fn new(q: u64) -> Result<Self> {
        if q == 0 {
            return Err(Error::domain("character group requires q >= 1"));
        }
        if q > MAX_MODULUS {
            return Err(Error::Capacity {
                context: "character group",
                requested: q,
                limit: MAX_MODULUS,
            });
        }

        let mut components = Vec::new();
        let mut blocks = Vec::new();
        for (p, e) in factorize(q) {
            let pe = p.pow(e);
            let first = components.len();
            if p == 2 {
                match e {
                    1 => {}
                    2 => components.push(Component {
                        generator: crt_lift(3, pe, q),
                        order: 2,
                        scale: 0,
                    }),
                    _ => {
                        components.push(Component {
                            generator: crt_lift(pe - 1, pe, q),
                            order: 2,
                            scale: 0,
                        });
                        components.push(Component {
                            generator: crt_lift(5, pe, q),
                            order: pe / 4,
                            scale: 0,
                        });
                    }
                }
            } else {
                components.push(Component {
                    generator: crt_lift(least_primitive_root(p, e), pe, q),
                    order: pe / p * (p - 1),
                    scale: 0,
                });
            }
            blocks.push(PrimeBlock {
                prime: p,
                first_component: first,
                component_count: components.len() - first,
            });
        }

        let phi: u64 = components.iter().map(|c| c.order).product();
        let exponent = components.iter().fold(1u64, |l, c| lcm(l, c.order));
        for c in &mut components {
            c.scale = exponent / c.order;
        }

        // Enumerate all classes by odometer over the exponent vectors,
        // filling residue -> class and the scaled dlog table.
        let m = components.len();
        let mut class_of = vec![NO_CLASS; q as usize];
        let mut scaled_dlogs = vec![0u64; phi as usize * m.max(1)];
        let mut dlog = vec![0u64; m];
        let mut power = vec![1u64; m];
        for class in 0..phi {
            let residue = power.iter().fold(1u64 % q, |acc, &v| acc * v % q);
            debug_assert_eq!(class_of[residue as usize], NO_CLASS);
            class_of[residue as usize] = class as u32;
            for i in 0..m {
                scaled_dlogs[class as usize * m + i] = dlog[i] * components[i].scale;
            }
            // odometer step, last component fastest (mixed-radix counting)
            let mut i = m;
            while i > 0 {
                let c = i - 1;
                dlog[c] += 1;
                if dlog[c] < components[c].order {
                    power[c] = power[c] * components[c].generator % q;
                    break;
                }
                dlog[c] = 0;
                power[c] = 1;
                i -= 1;
            }
        }

        let units = (0..exponent)
            .map(|t| {
                let theta = 2.0 * std::f64::consts::PI * t as f64 / exponent as f64;
                Complex64::new(theta.cos(), theta.sin())
            })
            .collect();

        Ok(CharacterGroup {
            inner: Arc::new(GroupInner {
                modulus: q,
                phi,
                exponent,
                components,
                blocks,
                class_of,
                scaled_dlogs,
                units,
            }),
        })
    }

    pub fn modulus(&self) -> u64 {
        self.inner.modulus
    }

    /// φ(q), which is also the number of characters.
    pub fn phi(&self) -> u64 {
        self.inner.phi
    }

    /// The group exponent L: every character value is an L-th root of unity.
    pub fn exponent(&self) -> u64 {
        self.inner.exponent
    }

    /// Class index of `n` (reduced mod q), or `None` when gcd(n, q) > 1.
    #[inline]
    pub fn class_of(&self, n: u64) -> Option<usize> {
        let r = self.inner.class_of[(n % self.inner.modulus) as usize];
        (r != NO_CLASS).then_some(r as usize)
    }

    /// e^{2πi t / L} from the precomputed table.
    #[inline]
    pub fn unit(&self, t: u64) -> Complex64 {
        self.inner.units[t as usize]
    }

    /// The character with the given flat index (0 is principal).
    pub fn character(&self, index: u64) -> Result<DirichletCharacter> {
        if index >= self.inner.phi {
            return Err(Error::domain(format!(
                "character index {index} out of range for phi = {}",
                self.inner.phi
            )));
        }
        let exponents = self.decode_index(index);
        Ok(self.character_from_exponents(exponents, index))
    }

    pub fn principal(&self) -> DirichletCharacter {
        self.character(0).expect("index 0 always exists")
    }

    /// All φ(q) characters in deterministic index order.
    pub fn characters(&self) -> impl Iterator<Item = DirichletCharacter> + '_ {
        (0..self.inner.phi).map(move |i| self.character(i).expect("in range"))
    }

    fn decode_index(&self, index: u64) -> Vec<u64> {
        let mut exps = vec![0u64; self.inner.components.len()];
        let mut rest = index;
        for (i, c) in self.inner.components.iter().enumerate().rev() {
            exps[i] = rest % c.order;
            rest /= c.order;
        }
        exps
    }

    fn character_from_exponents(&self, exponents: Vec<u64>, index: u64) -> DirichletCharacter {
        let conductor = self.conductor_of(&exponents);
        let order = self
            .inner
            .components
            .iter()
            .zip(&exponents)
            .fold(1u64, |l, (c, &e)| lcm(l, c.order / gcd(e, c.order)));
        let mut chi = DirichletCharacter {
            group: self.clone(),
            index,
            exponents,
            conductor,
            order,
            parity: 1,
        };
        chi.parity = match chi.angle(self.inner.modulus.max(2) - 1) {
            Some((t, l)) => {
                if t == 0 {
                    1
                } else {
                    debug_assert_eq!(2 * t, l, "χ(-1) must be ±1");
                    -1
                }
            }
            None => 1, // q = 1 or 2: -1 ≡ the unit class or q = 1
        };
        chi
    }

    /// Conductor from the per-prime-block structure: the odd p^e block with a
    /// local character of order o contributes p^{v_p(o)+1}; the 2^e block
    /// contributes 4·ord(χ(5)-part) when that part is nontrivial, else 4 for
    /// the ±1 part alone.
    fn conductor_of(&self, exponents: &[u64]) -> u64 {
        let mut f = 1u64;
        for block in &self.inner.blocks {
            let lo = block.first_component;
            let hi = lo + block.component_count;
            let comps = &self.inner.components[lo..hi];
            let exps = &exponents[lo..hi];
            if block.prime == 2 {
                match block.component_count {
                    0 => {}
                    1 => {
                        if exps[0] != 0 {
                            f *= 4;
                        }
                    }
                    _ => {
                        let (c_minus, c_five) = (exps[0], exps[1]);
                        if c_five != 0 {
                            let o5 = comps[1].order / gcd(c_five, comps[1].order);
                            f *= 4 * o5;
                        } else if c_minus != 0 {
                            f *= 4;
                        }
                    }
                }
            } else if exps[0] != 0 {
                let o = comps[0].order / gcd(exps[0], comps[0].order);
                let mut pk = block.prime;
                let mut o_rest = o;
                while o_rest.is_multiple_of(block.prime) {
                    o_rest /= block.prime;
                    pk *= block.prime;
                }
                f *= pk;
            }
        }
        f
    }
}

/// A set of character groups for every modulus `1 ..= q_max`, built once and
/// shared by the averaged-sum assemblies.
pub struct CharacterGroups {
    groups: Vec<CharacterGroup>,
}

impl CharacterGroups {
    pub fn new(q_max: u64) -> Result<Self> {
        if q_max == 0 {
            return Err(Error::domain("q_max must be >= 1"));
        }
        let groups: Result<Vec<CharacterGroup>> = (1..=q_max)
            .into_par_iter()
            .map(CharacterGroup::new)
            .collect();
        Ok(CharacterGroups { groups: groups? })
    }

    pub fn q_max(&self) -> u64 {
        self.groups.len() as u64
    }

    pub fn group(&self, q: u64) -> Result<&CharacterGroup> {
        if q == 0 {
            return Err(Error::domain("modulus must be >= 1"));
        }
        self.groups
            .get((q - 1) as usize)
            .ok_or_else(|| Error::domain(format!("no group built for q = {q}")))
    }
}

/// One Dirichlet character, as an exponent vector against the group's fixed
/// generators. Conductor, order and parity are cached at construction.
#[derive(Clone)]
pub struct DirichletCharacter {
    group: CharacterGroup,
    index: u64,
    exponents: Vec<u64>,
    conductor: u64,
    order: u64,
    parity: i8,
}

impl DirichletCharacter {
    pub fn group(&self) -> &CharacterGroup {
        &self.group
    }

    pub fn modulus(&self) -> u64 {
        self.group.modulus()
    }

    /// Position in the group's deterministic enumeration; 0 is principal.
    pub fn index(&self) -> u64 {
        self.index
    }

    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    pub fn is_principal(&self) -> bool {
        self.index == 0
    }

    /// A character is primitive iff its conductor equals its modulus
    /// (the trivial character mod 1 counts as primitive).
    pub fn is_primitive(&self) -> bool {
        self.conductor == self.modulus()
    }

    pub fn is_real(&self) -> bool {
        self.order <= 2
    }

    /// Multiplicative order of the character in the dual group.
    pub fn order(&self) -> u64 {
        self.order
    }

    /// χ(−1): +1 for even characters, −1 for odd ones.
    pub fn parity(&self) -> i8 {
        self.parity
    }

    /// Exact angle of χ(n) as `(t, L)` meaning e^{2πi t/L}, or `None` when
    /// gcd(n, q) > 1 and the value is exactly zero.
    pub fn angle(&self, n: u64) -> Option<(u64, u64)> {
        let class = self.group.class_of(n)?;
        Some((self.angle_of_class(class), self.group.exponent()))
    }

    /// Exact angle on a coprime residue class.
    #[inline]
    pub fn angle_of_class(&self, class: usize) -> u64 {
        let inner = &self.group.inner;
        let m = inner.components.len();
        if m == 0 {
            return 0;
        }
        let dlogs = &inner.scaled_dlogs[class * m..class * m + m];
        let mut t = 0u64;
        for (c, &d) in self.exponents.iter().zip(dlogs) {
            t += c * d;
        }
        t % inner.exponent
    }

    /// χ(n) as a complex value; exact 0 off the coprime residues.
    pub fn value(&self, n: u64) -> Complex64 {
        match self.group.class_of(n) {
            Some(class) => self.group.unit(self.angle_of_class(class)),
            None => Complex64::new(0.0, 0.0),
        }
    }

    /// Per-class value table, indexed by class, for tight summation loops.
    pub fn class_values(&self) -> Vec<Complex64> {
        (0..self.group.phi() as usize)
            .map(|c| self.group.unit(self.angle_of_class(c)))
            .collect()
    }

    /// The primitive character mod `conductor()` inducing this one; satisfies
    /// `χ(n) = χ*(n) · 1_{gcd(n, q) = 1}` for all n.
    pub fn induced_primitive(&self) -> Result<DirichletCharacter> {
        let f = self.conductor;
        let sub = CharacterGroup::new(f)?;
        let q = self.modulus();
        let mut exponents = Vec::with_capacity(sub.inner.components.len());
        for comp in &sub.inner.components {
            // lift the generator to a residue coprime to q in the same
            // class mod f, then read off the exact angle
            let mut m = comp.generator;
            while gcd(m, q) != 1 {
                m += f;
            }
            let (t, l) = self.angle(m).expect("lift is coprime to q by construction");
            let num = t * comp.order;
            debug_assert_eq!(num % l, 0, "angle must refine to the component order");
            exponents.push((num / l) % comp.order);
        }
        let index = sub
            .inner
            .components
            .iter()
            .zip(&exponents)
            .fold(0u64, |acc, (c, &e)| acc * c.order + e);
        Ok(sub.character_from_exponents(exponents, index))
    }
}

/// Ψ(x, y; χ) = Σ_{n <= x, n y-smooth} χ(n), summed in ascending n for
/// reproducibility.
pub fn psi_char(
    x: u64,
    y: u64,
    chi: &DirichletCharacter,
    table: &FactorTable,
) -> Result<Complex64> {
    table.check_capacity("psi_char", x)?;
    if y == 0 {
        return Err(Error::domain("psi_char requires y >= 1"));
    }
    let group = chi.group();
    let values = chi.class_values();
    let mut sum = Complex64::new(0.0, 0.0);
    for n in 1..=x {
        if table.is_smooth(n, y) {
            if let Some(class) = group.class_of(n) {
                sum += values[class];
            }
        }
    }
    Ok(sum)
}

/// Smooth counts per coprime residue class, in one table pass.
pub fn class_counts(
    x: u64,
    y: u64,
    group: &CharacterGroup,
    table: &FactorTable,
) -> Result<Vec<u64>> {
    table.check_capacity("class_counts", x)?;
    if y == 0 {
        return Err(Error::domain("class_counts requires y >= 1"));
    }
    let mut counts = vec![0u64; group.phi() as usize];
    for n in 1..=x {
        if table.is_smooth(n, y) {
            if let Some(class) = group.class_of(n) {
                counts[class] += 1;
            }
        }
    }
    Ok(counts)
}

/// Ψ(x, y; χ) for every character mod q at once: one counting pass, then a
/// character transform of the class counts. Matches [`psi_char`] up to
/// summation rounding.
pub fn psi_char_all(
    x: u64,
    y: u64,
    group: &CharacterGroup,
    table: &FactorTable,
) -> Result<Vec<Complex64>> {
    let counts = class_counts(x, y, group, table)?;
    let mut out = Vec::with_capacity(group.phi() as usize);
    for chi in group.characters() {
        let mut sum = Complex64::new(0.0, 0.0);
        for (class, &count) in counts.iter().enumerate() {
            if count > 0 {
                sum += group.unit(chi.angle_of_class(class)).scale(count as f64);
            }
        }
        out.push(sum);
    }
    Ok(out)
}

/// Rebuild Ψ(x, y; q, a) from the character sums by orthogonality:
/// `(1/φ(q)) Σ_χ conj(χ(a)) Ψ(x, y; χ)`. Equals the direct progression
/// count up to root-of-unity rounding.
pub fn reconstruct_progression(
    x: u64,
    y: u64,
    a: u64,
    group: &CharacterGroup,
    table: &FactorTable,
) -> Result<f64> {
    let class_a = group.class_of(a).ok_or_else(|| {
        Error::domain(format!(
            "reconstruct_progression requires gcd(a, q) = 1 (a = {a}, q = {})",
            group.modulus()
        ))
    })?;
    let sums = psi_char_all(x, y, group, table)?;
    let mut acc = Complex64::new(0.0, 0.0);
    for (chi, sum) in group.characters().zip(&sums) {
        acc += group.unit(chi.angle_of_class(class_a)).conj() * sum;
    }
    Ok(acc.re / group.phi() as f64)
}

/// L(s, χ; y) = Π_{p <= y} (1 − χ(p) p^{−s})^{−1} on Re(s) > 0, with the
/// prime list supplied by the caller (it must contain exactly the primes
/// up to y).
pub fn l_smooth_with_primes(
    s: Complex64,
    chi: &DirichletCharacter,
    primes: &[u64],
) -> Result<Complex64> {
    if s.re.is_nan() || s.re <= 0.0 {
        return Err(Error::domain("l_smooth requires Re(s) > 0"));
    }
    let mut product = Complex64::new(1.0, 0.0);
    for &p in primes {
        if let Some(class) = chi.group().class_of(p) {
            let chip = chi.group().unit(chi.angle_of_class(class));
            let p_pow = (-s * (p as f64).ln()).exp();
            product *= (Complex64::new(1.0, 0.0) - chip * p_pow).finv();
        }
    }
    Ok(product)
}

/// L(s, χ; y) with an internal prime sieve up to y.
pub fn l_smooth(s: Complex64, chi: &DirichletCharacter, y: u64) -> Result<Complex64> {
    if y < 2 {
        return Err(Error::domain("l_smooth requires y >= 2"));
    }
    l_smooth_with_primes(s, chi, &primes_up_to(y))
}

/// Σ_{n <= z} Λ(n) χ(n) / n^{σ+it}, the prime-power sum behind the
/// logarithmic derivative of L(s, χ). Λ is read off the factor table:
/// n is a prime power iff its largest and smallest prime factor agree.
pub fn mangoldt_char_sum(
    z: u64,
    chi: &DirichletCharacter,
    sigma: f64,
    t: f64,
    table: &FactorTable,
) -> Result<Complex64> {
    table.check_capacity("mangoldt_char_sum", z)?;
    if !(0.0..1.0).contains(&sigma) {
        return Err(Error::domain("mangoldt_char_sum requires 0 <= sigma < 1"));
    }
    let group = chi.group();
    let values = chi.class_values();
    let mut sum = Complex64::new(0.0, 0.0);
    for n in 2..=z {
        if table.is_prime_power(n) {
            if let Some(class) = group.class_of(n) {
                let log_n = (n as f64).ln();
                let lambda = (table.smallest(n) as f64).ln();
                let magnitude = lambda * (-sigma * log_n).exp();
                let phase = Complex64::new(0.0, -t * log_n).exp();
                sum += values[class] * phase.scale(magnitude);
            }
        }
    }
    Ok(sum)
}

/// The non-negative prime sum `Σ_{p <= y, p ∤ q} (1 − Re(χ(p) p^{−it})) / p^α`
/// controlling |L(α+it, χ; y)| against L(α, χ₀; y).
pub fn rational_distance_sum(
    y: u64,
    chi: &DirichletCharacter,
    alpha: f64,
    t: f64,
    table: &FactorTable,
) -> Result<f64> {
    table.check_capacity("rational_distance_sum", y)?;
    if alpha.is_nan() || alpha <= 0.0 {
        return Err(Error::domain("rational_distance_sum requires alpha > 0"));
    }
    let group = chi.group();
    let mut sum = 0.0f64;
    for p in 2..=y {
        if table.is_prime(p) {
            if let Some(class) = group.class_of(p) {
                let log_p = (p as f64).ln();
                let chip = group.unit(chi.angle_of_class(class));
                let rotated = (chip * Complex64::new(0.0, -t * log_p).exp()).re;
                // each term is in [0, 2/p^alpha]; clamp rounding dust
                sum += ((1.0 - rotated) / (alpha * log_p).exp()).max(0.0);
            }
        }
    }
    Ok(sum)
}

/// Least primitive root mod p^e for odd prime p.
fn least_primitive_root(p: u64, e: u32) -> u64 {
    let pe = p.pow(e);
    let phi = pe / p * (p - 1);
    let factors: Vec<u64> = factorize(phi).into_iter().map(|(f, _)| f).collect();
    'candidates: for g in 2..pe {
        if g % p == 0 {
            continue;
        }
        for &f in &factors {
            if mod_pow(g, phi / f, pe) == 1 {
                continue 'candidates;
            }
        }
        return g;
    }
    unreachable!("every odd prime power has a primitive root");
}

/// CRT lift: the residue mod q that is `a` mod `pe` and 1 mod `q/pe`.
fn crt_lift(a: u64, pe: u64, q: u64) -> u64 {
    let rest = q / pe;
    if rest == 1 {
        return a % q;
    }
    // x = a + pe * k with x ≡ 1 (mod rest): k = (1 - a) * pe^{-1} mod rest
    let inv = mod_inverse(pe % rest, rest);
    let diff = (1 + rest - a % rest) % rest;
    (a + pe * (diff * inv % rest)) % q
}

fn mod_inverse(a: u64, m: u64) -> u64 {
    // extended Euclid; gcd(a, m) = 1 by construction
    let (mut old_r, mut r) = (a as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let quot = old_r / r;
        (old_r, r) = (r, old_r - quot * r);
        (old_s, s) = (s, old_s - quot * s);
    }
    debug_assert_eq!(old_r, 1);
    old_s.rem_euclid(m as i128) as u64
}
