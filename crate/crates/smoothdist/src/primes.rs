//! A plain sieve of Eratosthenes.
//!
//! This is the prime source for operations that do not carry a
//! [`FactorTable`](crate::factor::FactorTable): saddle-point prime sums and
//! restricted Euler products. The factor table remains the single source of
//! truth for per-integer factor data; this sieve only lists primes.

/// All primes `p <= limit`, ascending.
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for p in 2..=n {
        if !composite[p] {
            out.push(p as u64);
            let mut m = p * p;
            while m <= n {
                composite[m] = true;
                m += p;
            }
        }
    }
    out
}
