//! Prime enumeration: plain Eratosthenes for small bounds, and a segmented
//! sieve over an arithmetic progression a + jk for everything else.

use serde::{Deserialize, Serialize};

use super::modular::{gcd, invmod, is_prime, isqrt};

const SEGMENT: u64 = 1 << 16;

/// All primes <= limit, unsegmented. Intended for small limits.
pub fn simple_sieve(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if composite[i] {
            continue;
        }
        out.push(i as u64);
        let mut j = i * i;
        while j <= n {
            composite[j] = true;
            j += i;
        }
    }
    out
}

/// Converts a real bound to the largest integer it admits.
pub fn floor_bound(x: f64) -> u64 {
    if x.is_nan() || x < 0.0 {
        0
    } else if x >= u64::MAX as f64 {
        u64::MAX
    } else {
        x.floor() as u64
    }
}

/// Primes p <= limit with p = residue (mod modulus), in increasing order.
///
/// Segmented over the index j of the terms residue + j * modulus, so memory
/// stays bounded regardless of the limit.
#[derive(Debug, Clone)]
pub struct ProgressionPrimes {
    modulus: u64,
    residue: u64,
    base: Vec<u64>,
    // Terms a + jk with j in [seg_lo, seg_lo + segment.len()).
    seg_lo: u64,
    n_terms: u64,
    segment: Vec<bool>,
    cursor: usize,
    // Used when gcd(residue, modulus) > 1: at most one prime qualifies.
    single: Option<Option<u64>>,
}

impl ProgressionPrimes {
    pub fn new(x: f64, modulus: u64, residue: i64) -> Self {
        assert!(modulus >= 1, "modulus must be positive");
        let limit = floor_bound(x);
        let a0 = residue.rem_euclid(modulus as i64) as u64;
        let g = gcd(a0, modulus);
        let mut it = ProgressionPrimes {
            modulus,
            residue: a0,
            base: Vec::new(),
            seg_lo: 0,
            n_terms: 0,
            segment: Vec::new(),
            cursor: 0,
            single: None,
        };
        if g > 1 {
            let hit = is_prime(g) && g <= limit && g % modulus == a0;
            it.single = Some(hit.then_some(g));
            return it;
        }
        if limit >= a0 {
            it.n_terms = (limit - a0) / modulus + 1;
        }
        it.base = simple_sieve(isqrt(limit))
            .into_iter()
            .filter(|q| modulus % q != 0)
            .collect();
        it.fill_segment();
        it
    }

    fn term(&self, j: u64) -> u64 {
        self.residue + j * self.modulus
    }

    fn fill_segment(&mut self) {
        let len = SEGMENT.min(self.n_terms.saturating_sub(self.seg_lo));
        self.segment.clear();
        self.segment.resize(len as usize, true);
        self.cursor = 0;
        if len == 0 {
            return;
        }
        let hi = self.seg_lo + len;
        for &q in &self.base {
            // first j >= seg_lo with residue + j * modulus = 0 (mod q)
            let kinv = invmod(self.modulus % q, q).expect("q does not divide modulus");
            let r = ((q - self.residue % q) % q) as u128 * kinv as u128 % q as u128;
            let r = r as u64;
            let mut j = if self.seg_lo <= r {
                r
            } else {
                r + (self.seg_lo - r).div_ceil(q) * q
            };
            while j < hi {
                if self.term(j) != q {
                    self.segment[(j - self.seg_lo) as usize] = false;
                }
                j += q;
            }
        }
    }
}

impl Iterator for ProgressionPrimes {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        if let Some(single) = &mut self.single {
            return single.take();
        }
        loop {
            while self.cursor < self.segment.len() {
                let j = self.seg_lo + self.cursor as u64;
                let keep = self.segment[self.cursor];
                self.cursor += 1;
                let t = self.term(j);
                if keep && t >= 2 {
                    return Some(t);
                }
            }
            if self.segment.is_empty() {
                return None;
            }
            self.seg_lo += self.segment.len() as u64;
            self.fill_segment();
        }
    }
}

/// Every prime <= x in increasing order.
pub fn primes_up_to(x: f64) -> ProgressionPrimes {
    ProgressionPrimes::new(x, 1, 0)
}

/// pi(x).
pub fn prime_pi(x: f64) -> u64 {
    primes_up_to(x).count() as u64
}

/// Primes p <= x with p = a (mod k).
pub fn primes_in_progression(x: f64, k: u64, a: i64) -> ProgressionPrimes {
    ProgressionPrimes::new(x, k, a)
}

/// Result of counting primes in one residue class.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProgressionCount {
    pub x: f64,
    pub modulus: u64,
    pub residue: i64,
    pub count: u64,
}

/// pi(x; k, a): primes p <= x with p = a (mod k).
pub fn count_primes_in_progression(x: f64, k: u64, a: i64) -> ProgressionCount {
    ProgressionCount {
        x,
        modulus: k,
        residue: a,
        count: primes_in_progression(x, k, a).count() as u64,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pi_examples() {
        assert_eq!(primes_up_to(1.0).count(), 0);
        assert_eq!(primes_up_to(10.0).collect::<Vec<_>>(), vec![2, 3, 5, 7]);
        assert_eq!(prime_pi(100.0), 25);
        assert_eq!(prime_pi(1e6), 78_498);
        assert_eq!(prime_pi(2.0), 1);
    }

    #[test]
    fn segmented_matches_plain_sieve() {
        let plain = simple_sieve(300_000);
        let seg: Vec<u64> = primes_up_to(300_000.5).collect();
        assert_eq!(plain, seg);
    }

    #[test]
    fn progression_examples() {
        assert_eq!(count_primes_in_progression(10.0, 1, 0).count, 4);
        let ones: Vec<u64> = primes_in_progression(100.0, 4, 1).collect();
        assert_eq!(ones, vec![5, 13, 17, 29, 37, 41, 53, 61, 73, 89, 97]);
        let c = count_primes_in_progression(100.0, 15, 1);
        assert_eq!(c.count, 2);
        assert_eq!(primes_in_progression(100.0, 15, 1).collect::<Vec<_>>(), vec![31, 61]);
        // non-coprime classes hold at most one prime
        assert_eq!(count_primes_in_progression(100.0, 6, 3).count, 1);
        assert_eq!(count_primes_in_progression(100.0, 6, 4).count, 0);
        assert_eq!(count_primes_in_progression(100.0, 4, -1).count, 13);
    }

    #[test]
    fn progression_counts_partition_pi() {
        let x = 50_000.0;
        let pi = prime_pi(x);
        for k in [1u64, 2, 3, 10, 12, 30, 97, 210] {
            let coprime: u64 = (0..k as i64)
                .filter(|&a| gcd(a as u64, k) == 1)
                .map(|a| count_primes_in_progression(x, k, a).count)
                .sum();
            let dividing = simple_sieve(k.min(50_000)).iter().filter(|&&p| k % p == 0).count() as u64;
            assert_eq!(coprime + dividing, pi, "k = {k}");
        }
    }
}
