//! Direct counting of y-smooth numbers: totals, coprime and progression
//! restrictions, short intervals, and the head/cofactor factorization that
//! turns smooth sums into double sums.
//!
//! All counts are exact `u64` values read off a [`FactorTable`]. `n = 1` is
//! y-smooth for every `y >= 1`: it has no prime factors, and the smooth Euler
//! product `zeta(s, y)` includes the `n = 1` term.

use crate::arith::gcd;
use crate::error::{Error, Result};
use crate::factor::FactorTable;

/// Ψ(x, y): how many `n <= x` have every prime factor `<= y`.
pub fn psi(x: u64, y: u64, table: &FactorTable) -> Result<u64> {
    table.check_capacity("psi", x)?;
    if y == 0 {
        return Err(Error::domain("psi requires y >= 1"));
    }
    let mut count = 0u64;
    for n in 1..=x {
        if table.is_smooth(n, y) {
            count += 1;
        }
    }
    Ok(count)
}

/// Ψ_q(x, y): the y-smooth `n <= x` with `gcd(n, q) = 1`.
pub fn psi_coprime(x: u64, y: u64, q: u64, table: &FactorTable) -> Result<u64> {
    table.check_capacity("psi_coprime", x)?;
    if y == 0 || q == 0 {
        return Err(Error::domain("psi_coprime requires y >= 1 and q >= 1"));
    }
    let coprime = coprime_mask(q);
    let mut count = 0u64;
    for n in 1..=x {
        if table.is_smooth(n, y) && coprime[(n % q) as usize] {
            count += 1;
        }
    }
    Ok(count)
}

/// Ψ(x, y; q, a): the y-smooth `n <= x` with `n ≡ a (mod q)`.
pub fn psi_progression(x: u64, y: u64, q: u64, a: u64, table: &FactorTable) -> Result<u64> {
    table.check_capacity("psi_progression", x)?;
    if y == 0 || q == 0 {
        return Err(Error::domain("psi_progression requires y >= 1 and q >= 1"));
    }
    if a >= q {
        return Err(Error::domain(format!(
            "residue {a} out of range for modulus {q}"
        )));
    }
    let mut count = 0u64;
    for n in 1..=x {
        if table.is_smooth(n, y) && n % q == a {
            count += 1;
        }
    }
    Ok(count)
}

/// Ψ(x, y; q, a) for every residue a at once, in one table pass.
pub fn residue_counts(x: u64, y: u64, q: u64, table: &FactorTable) -> Result<Vec<u64>> {
    table.check_capacity("residue_counts", x)?;
    if y == 0 || q == 0 {
        return Err(Error::domain("residue_counts requires y >= 1 and q >= 1"));
    }
    let mut counts = vec![0u64; q as usize];
    for n in 1..=x {
        if table.is_smooth(n, y) {
            counts[(n % q) as usize] += 1;
        }
    }
    Ok(counts)
}

/// Ψ(x+z, y) − Ψ(x, y), the y-smooth count in the interval `(x, x+z]`.
pub fn psi_short_interval(x: u64, z: u64, y: u64, table: &FactorTable) -> Result<u64> {
    let hi = x
        .checked_add(z)
        .ok_or_else(|| Error::domain("interval end x + z overflows u64"))?;
    table.check_capacity("psi_short_interval", hi)?;
    if y == 0 {
        return Err(Error::domain("psi_short_interval requires y >= 1"));
    }
    let mut count = 0u64;
    for n in (x + 1)..=hi {
        if table.is_smooth(n, y) {
            count += 1;
        }
    }
    Ok(count)
}

/// A smooth integer split as `head * cofactor` by peeling prime factors in
/// non-increasing order until the head exceeds the threshold.
///
/// Invariants: `head * cofactor` is the original integer,
/// `P(cofactor) <= head_least_prime = p1(head)`, and
/// `head / p1(head) <= threshold < head`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SmoothSplit {
    pub head: u64,
    pub cofactor: u64,
    /// p1(head): the last (hence smallest) prime peeled into the head.
    pub head_least_prime: u64,
}

/// Dyadic/λ-adic bucket of a split: `2^dyadic * threshold < head <=
/// 2^(dyadic+1) * threshold` and `y/λ^(lambda_adic+1) < p1(head) <=
/// y/λ^lambda_adic` with `λ = 1 + 1/(1000 log x)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SplitBucket {
    pub dyadic: u32,
    pub lambda_adic: u32,
}

/// Peel the prime factors of `n` (with multiplicity, largest first) into a
/// head until it exceeds `threshold`. Returns `None` when `n <= threshold`,
/// where no split is defined.
pub fn smooth_split(n: u64, threshold: u64, table: &FactorTable) -> Result<Option<SmoothSplit>> {
    if n == 0 {
        return Err(Error::domain("smooth_split requires n >= 1"));
    }
    if threshold == 0 {
        return Err(Error::domain("smooth_split requires threshold >= 1"));
    }
    table.check_capacity("smooth_split", n)?;
    if n <= threshold {
        return Ok(None);
    }
    let mut head = 1u64;
    let mut rest = n;
    let mut last_peeled = 0u64;
    while head <= threshold {
        // rest > 1 here: head <= threshold < n = head * rest forces rest > 1
        let p = table.largest(rest);
        head *= p;
        rest /= p;
        last_peeled = p;
    }
    Ok(Some(SmoothSplit {
        head,
        cofactor: rest,
        head_least_prime: last_peeled,
    }))
}

/// Bucket a split for the double-sum decomposition at parameters `(x, y)`.
pub fn bucket_split(split: &SmoothSplit, x: u64, y: u64, threshold: u64) -> Result<SplitBucket> {
    if x < 2 {
        return Err(Error::domain("bucket_split requires x >= 2"));
    }
    if threshold == 0 || y == 0 {
        return Err(Error::domain("bucket_split requires threshold, y >= 1"));
    }
    let m = split.head;
    let cap = y
        .checked_mul(threshold)
        .ok_or_else(|| Error::domain("y * threshold overflows u64"))?;
    if m <= threshold || m > cap {
        return Err(Error::domain(format!(
            "head {m} outside (threshold, y*threshold] = ({threshold}, {cap}]"
        )));
    }
    let p1 = split.head_least_prime;
    if p1 == 0 || p1 > y {
        return Err(Error::domain(format!(
            "head least prime {p1} outside (0, y={y}]"
        )));
    }

    // dyadic index: smallest i with head <= 2^(i+1) * threshold
    let mut dyadic = 0u32;
    let mut upper = threshold
        .checked_mul(2)
        .ok_or_else(|| Error::domain("2 * threshold overflows u64"))?;
    while m > upper {
        upper = upper
            .checked_mul(2)
            .ok_or_else(|| Error::domain("dyadic bucket bound overflows u64"))?;
        dyadic += 1;
    }

    // λ-adic index: largest j with p1 <= y / λ^j, i.e. p1 * λ^j <= y
    let lambda = 1.0 + 1.0 / (1000.0 * (x as f64).ln());
    let ratio = y as f64 / p1 as f64;
    let mut j = (ratio.ln() / lambda.ln()).floor().max(0.0) as i64;
    while j > 0 && p1 as f64 * lambda.powi(j as i32) > y as f64 {
        j -= 1;
    }
    while p1 as f64 * lambda.powi(j as i32 + 1) <= y as f64 {
        j += 1;
    }
    if p1 as f64 * lambda.powi(j as i32) > y as f64 {
        return Err(Error::domain(format!(
            "no λ-adic bucket for p1 = {p1} at y = {y}"
        )));
    }
    Ok(SplitBucket {
        dyadic,
        lambda_adic: j as u32,
    })
}

/// Split every y-smooth integer in `(threshold, x]`. Each of them splits,
/// so the returned vector realizes `Ψ(x,y) = Ψ(threshold,y) + #splits`.
pub fn splits_in_range(
    x: u64,
    y: u64,
    threshold: u64,
    table: &FactorTable,
) -> Result<Vec<SmoothSplit>> {
    table.check_capacity("splits_in_range", x)?;
    if y == 0 || threshold == 0 {
        return Err(Error::domain("splits_in_range requires y, threshold >= 1"));
    }
    let mut out = Vec::new();
    for n in (threshold + 1)..=x {
        if table.is_smooth(n, y) {
            let split = smooth_split(n, threshold, table)?.expect("n > threshold always splits");
            out.push(split);
        }
    }
    Ok(out)
}

fn coprime_mask(q: u64) -> Vec<bool> {
    (0..q).map(|r| gcd(r, q) == 1).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Enumeration oracle: trial-divide to test smoothness.
    fn is_smooth_td(mut n: u64, y: u64) -> bool {
        let mut d = 2;
        while d * d <= n {
            while n.is_multiple_of(d) {
                if d > y {
                    return false;
                }
                n /= d;
            }
            d += 1;
        }
        n == 1 || n <= y
    }

    fn psi_td(x: u64, y: u64) -> u64 {
        (1..=x).filter(|&n| is_smooth_td(n, y)).count() as u64
    }

    fn table() -> FactorTable {
        FactorTable::build(20_000).unwrap()
    }

    #[test]
    fn psi_known_values() {
        let t = table();
        // {1, 2, 4, 8}
        assert_eq!(psi(10, 2, &t).unwrap(), 4);
        assert_eq!(psi_td(10, 2), 4);
        // 2^a 3^b <= 100
        assert_eq!(psi(100, 3, &t).unwrap(), 20);
        assert_eq!(psi_td(100, 3), 20);
        // y >= x counts everything
        assert_eq!(psi(500, 500, &t).unwrap(), 500);
        assert_eq!(psi(500, 10_000, &t).unwrap(), 500);
    }

    #[test]
    fn psi_matches_enumeration_oracle() {
        let t = table();
        for &y in &[2u64, 3, 5, 10, 30] {
            for &x in &[1u64, 2, 50, 999, 2000] {
                assert_eq!(psi(x, y, &t).unwrap(), psi_td(x, y), "psi({x},{y})");
            }
        }
    }

    #[test]
    fn psi_coprime_known_values() {
        let t = table();
        assert_eq!(psi_coprime(10, 2, 3, &t).unwrap(), 4);
        assert_eq!(psi_coprime(10, 2, 2, &t).unwrap(), 1);
        for &(x, y) in &[(100u64, 3u64), (1000, 10)] {
            assert_eq!(
                psi_coprime(x, y, 1, &t).unwrap(),
                psi(x, y, &t).unwrap(),
                "q = 1 drops the restriction"
            );
        }
    }

    #[test]
    fn psi_progression_known_values() {
        let t = table();
        // odd 3-smooth <= 20 are {1, 3, 9}
        assert_eq!(psi_progression(20, 3, 4, 1, &t).unwrap(), 2);
        assert_eq!(psi_progression(20, 3, 4, 3, &t).unwrap(), 1);
        // residues partition
        for &(x, y, q) in &[(100u64, 3u64, 7u64), (500, 5, 12), (999, 10, 30)] {
            let total: u64 = (0..q)
                .map(|a| psi_progression(x, y, q, a, &t).unwrap())
                .sum();
            assert_eq!(total, psi(x, y, &t).unwrap());
        }
    }

    #[test]
    fn residue_counts_agree_with_progression() {
        let t = table();
        let counts = residue_counts(1000, 5, 12, &t).unwrap();
        for a in 0..12u64 {
            assert_eq!(
                counts[a as usize],
                psi_progression(1000, 5, 12, a, &t).unwrap()
            );
        }
    }

    #[test]
    fn short_interval_examples() {
        let t = table();
        assert_eq!(psi_short_interval(100, 0, 3, &t).unwrap(), 0);
        assert_eq!(
            psi_short_interval(50, 50, 3, &t).unwrap(),
            psi(100, 3, &t).unwrap() - psi(50, 3, &t).unwrap()
        );
        // 3-smooth in (90, 100]: 96 = 2^5*3, and... enumerate to be sure
        let expected = (91..=100).filter(|&n| is_smooth_td(n, 3)).count() as u64;
        assert_eq!(psi_short_interval(90, 10, 3, &t).unwrap(), expected);
    }

    #[test]
    fn monotone_in_x_and_y() {
        let t = table();
        let mut prev = 0;
        for x in (100..2000).step_by(137) {
            let v = psi(x, 7, &t).unwrap();
            assert!(v >= prev);
            prev = v;
        }
        let mut prev = 0;
        for y in 1..40 {
            let v = psi(1500, y, &t).unwrap();
            assert!(v >= prev);
            prev = v;
        }
    }

    #[test]
    fn split_worked_examples() {
        let t = table();
        // 60: peel 5; 5 > 4 stops, cofactor 12
        let s = smooth_split(60, 4, &t).unwrap().unwrap();
        assert_eq!((s.head, s.cofactor), (5, 12));
        assert_eq!(s.head_least_prime, 5);
        // 36: peel 3 then 3
        let s = smooth_split(36, 4, &t).unwrap().unwrap();
        assert_eq!((s.head, s.cofactor), (9, 4));
        assert_eq!(s.head_least_prime, 3);
        // below threshold: no split
        assert_eq!(smooth_split(8, 10, &t).unwrap(), None);
        assert!(matches!(smooth_split(0, 4, &t), Err(Error::Domain(_))));
    }

    #[test]
    fn split_invariants() {
        let t = table();
        for threshold in [1u64, 3, 4, 10, 31] {
            for n in (threshold + 1)..=3000 {
                let s = smooth_split(n, threshold, &t).unwrap().unwrap();
                assert_eq!(s.head * s.cofactor, n);
                assert_eq!(t.smallest(s.head), s.head_least_prime);
                assert!(s.head > threshold);
                assert!(s.head / s.head_least_prime <= threshold);
                if s.cofactor > 1 {
                    assert!(t.largest(s.cofactor) <= s.head_least_prime);
                }
            }
        }
    }

    #[test]
    fn split_round_trip_is_bijective() {
        // exact set reconstruction: distinct n give distinct (head, cofactor)
        let t = table();
        let x = 5_000u64;
        for &(y, threshold) in &[(7u64, 8u64), (30, 10), (50, 4)] {
            let splits = splits_in_range(x, y, threshold, &t).unwrap();
            let mut seen = std::collections::HashSet::new();
            for s in &splits {
                assert!(seen.insert((s.head, s.cofactor)), "duplicate split");
            }
            let reconstructed: std::collections::HashSet<u64> =
                splits.iter().map(|s| s.head * s.cofactor).collect();
            let direct: std::collections::HashSet<u64> = ((threshold + 1)..=x)
                .filter(|&n| t.is_smooth(n, y))
                .collect();
            assert_eq!(reconstructed, direct);
            // partition: Ψ(x,y) = Ψ(threshold,y) + #splits
            assert_eq!(
                psi(x, y, &t).unwrap(),
                psi(threshold, y, &t).unwrap() + splits.len() as u64
            );
        }
    }

    #[test]
    fn bucket_examples() {
        let t = table();
        // head just above threshold lands in the first dyadic bucket
        let s = smooth_split(60, 4, &t).unwrap().unwrap(); // head 5
        let b = bucket_split(&s, 60, 7, 4).unwrap();
        assert_eq!(b.dyadic, 0);
        // head 9, threshold 4: 8 < 9 <= 16
        let s = smooth_split(36, 4, &t).unwrap().unwrap();
        let b = bucket_split(&s, 36, 3, 4).unwrap();
        assert_eq!(b.dyadic, 1);
        // p1(head) = y lands in the top λ bucket
        assert_eq!(b.lambda_adic, 0);
    }

    #[test]
    fn bucket_ranges_verified() {
        let t = table();
        let x = 4_000u64;
        for &(y, threshold) in &[(10u64, 7u64), (30, 11)] {
            let lambda = 1.0 + 1.0 / (1000.0 * (x as f64).ln());
            for s in splits_in_range(x, y, threshold, &t).unwrap() {
                let b = bucket_split(&s, x, y, threshold).unwrap();
                let m = s.head as f64;
                let th = threshold as f64;
                assert!(th * 2f64.powi(b.dyadic as i32) < m);
                assert!(m <= th * 2f64.powi(b.dyadic as i32 + 1));
                let p1 = s.head_least_prime as f64;
                let yv = y as f64;
                assert!(p1 <= yv / lambda.powi(b.lambda_adic as i32) + 1e-9);
                assert!(p1 > yv / lambda.powi(b.lambda_adic as i32 + 1) - 1e-9);
            }
        }
    }

    #[test]
    fn bucket_domain_errors() {
        let t = table();
        let s = smooth_split(60, 4, &t).unwrap().unwrap();
        // head must lie in (threshold, y*threshold]
        assert!(bucket_split(&s, 60, 1, 4).is_err());
        let far = SmoothSplit {
            head: 1000,
            cofactor: 1,
            head_least_prime: 2,
        };
        assert!(bucket_split(&far, 60, 7, 4).is_err());
    }

    #[test]
    fn capacity_errors() {
        let t = FactorTable::build(100).unwrap();
        assert!(matches!(psi(101, 2, &t), Err(Error::Capacity { .. })));
        assert!(matches!(
            psi_short_interval(60, 50, 2, &t),
            Err(Error::Capacity { .. })
        ));
    }
}
