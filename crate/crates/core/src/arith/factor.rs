//! Integer factorization: trial division by small primes, then Brent's
//! variant of Pollard rho on whatever cofactor remains.

use std::fmt;
use std::sync::OnceLock;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

use super::modular::{checked_lcm, gcd, is_prime, mulmod};
use crate::error::{Error, Result};

pub const TRIAL_DIVISION_BOUND: u64 = 100_000;
pub const DEFAULT_BUDGET: u64 = 100_000_000;
pub const DEFAULT_SEED: u64 = 0x5eed_0fc7_c1e5;

/// A positive integer as strictly increasing (prime, exponent) pairs.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Factorization {
    pairs: Vec<(u64, u32)>,
    value: u64,
}

/// What was recovered before a factorization ran out of budget.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartialFactorization {
    pub value: u64,
    pub known: Vec<(u64, u32)>,
    pub unfactored: Vec<u64>,
}

impl Factorization {
    pub fn one() -> Self {
        Factorization {
            pairs: Vec::new(),
            value: 1,
        }
    }

    /// Builds a factorization from (prime, exponent) pairs in any order.
    /// Repeated primes are merged; zero exponents are dropped.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (u64, u32)>) -> Result<Self> {
        let mut pairs: Vec<(u64, u32)> = pairs.into_iter().filter(|&(_, a)| a > 0).collect();
        pairs.sort_unstable();
        let mut merged: Vec<(u64, u32)> = Vec::with_capacity(pairs.len());
        for (p, a) in pairs {
            match merged.last_mut() {
                Some(last) if last.0 == p => last.1 += a,
                _ => merged.push((p, a)),
            }
        }
        let mut value = 1u64;
        for &(p, a) in &merged {
            if !is_prime(p) {
                return Err(Error::domain(format!("{p} is not prime")));
            }
            let pa = p
                .checked_pow(a)
                .ok_or_else(|| Error::WidthOverflow(format!("{p}^{a}")))?;
            value = value
                .checked_mul(pa)
                .ok_or_else(|| Error::WidthOverflow("factorization value".into()))?;
        }
        Ok(Factorization {
            pairs: merged,
            value,
        })
    }

    fn from_primes(mut primes: Vec<u64>) -> Self {
        primes.sort_unstable();
        let mut pairs: Vec<(u64, u32)> = Vec::new();
        let mut value = 1u64;
        for p in primes {
            value *= p;
            match pairs.last_mut() {
                Some(last) if last.0 == p => last.1 += 1,
                _ => pairs.push((p, 1)),
            }
        }
        Factorization { pairs, value }
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn pairs(&self) -> &[(u64, u32)] {
        &self.pairs
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.pairs.iter().map(|&(p, _)| p)
    }

    pub fn is_one(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn num_divisors(&self) -> u64 {
        self.pairs.iter().map(|&(_, a)| a as u64 + 1).product()
    }

    /// Euler's totient of the factored value.
    pub fn euler_phi(&self) -> u64 {
        self.pairs
            .iter()
            .map(|&(p, a)| p.pow(a - 1) * (p - 1))
            .product()
    }

    /// Largest prime divisor, 1 for the unit.
    pub fn largest_prime_factor(&self) -> u64 {
        self.pairs.last().map_or(1, |&(p, _)| p)
    }

    /// Carmichael's function: the exponent of the unit group mod `value`.
    pub fn carmichael_lambda(&self) -> u64 {
        self.pairs
            .iter()
            .map(|&(p, a)| prime_power_lambda(p, a))
            // lambda(n) <= n, so the lcm never overflows
            .fold(1, |acc, l| checked_lcm(acc, l).expect("lambda(n) <= n"))
    }

    pub fn divisors(&self) -> Divisors<'_> {
        Divisors {
            fact: self,
            exps: vec![0; self.pairs.len()],
            current: 1,
            done: false,
        }
    }

    /// Factorization of the divisor with the given exponent vector.
    pub fn sub_factorization(&self, exps: &[u32]) -> Factorization {
        let mut value = 1u64;
        let pairs = self
            .pairs
            .iter()
            .zip(exps)
            .filter(|(_, &j)| j > 0)
            .map(|(&(p, _), &j)| {
                value *= p.pow(j);
                (p, j)
            })
            .collect();
        Factorization { pairs, value }
    }
}

pub(crate) fn prime_power_lambda(p: u64, a: u32) -> u64 {
    match (p, a) {
        (2, 1) => 1,
        (2, 2) => 2,
        (2, a) => 1 << (a - 2),
        (p, a) => p.pow(a - 1) * (p - 1),
    }
}

impl fmt::Display for Factorization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.pairs.is_empty() {
            return write!(f, "1");
        }
        for (i, &(p, a)) in self.pairs.iter().enumerate() {
            if i > 0 {
                write!(f, " * ")?;
            }
            if a == 1 {
                write!(f, "{p}")?;
            } else {
                write!(f, "{p}^{a}")?;
            }
        }
        Ok(())
    }
}

/// Every divisor of a factored integer, exactly once, in odometer order
/// (not sorted).
pub struct Divisors<'a> {
    fact: &'a Factorization,
    exps: Vec<u32>,
    current: u64,
    done: bool,
}

impl Divisors<'_> {
    /// Exponent vector of the divisor that the next call to `next` yields.
    pub fn exponents(&self) -> &[u32] {
        &self.exps
    }
}

impl Iterator for Divisors<'_> {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        if self.done {
            return None;
        }
        let out = self.current;
        let pairs = self.fact.pairs();
        let mut i = 0;
        loop {
            if i == pairs.len() {
                self.done = true;
                break;
            }
            let (p, a) = pairs[i];
            if self.exps[i] < a {
                self.exps[i] += 1;
                self.current *= p;
                break;
            }
            self.current /= p.pow(self.exps[i]);
            self.exps[i] = 0;
            i += 1;
        }
        Some(out)
    }
}

fn small_primes() -> &'static [u64] {
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    PRIMES.get_or_init(|| super::sieve::simple_sieve(TRIAL_DIVISION_BOUND))
}

/// Configurable factorization engine: effort budget and rho seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Factorizer {
    pub budget: u64,
    pub seed: u64,
}

impl Default for Factorizer {
    fn default() -> Self {
        Factorizer {
            budget: DEFAULT_BUDGET,
            seed: DEFAULT_SEED,
        }
    }
}

impl Factorizer {
    pub fn new(budget: u64, seed: u64) -> Self {
        Factorizer { budget, seed }
    }

    pub fn factorize(&self, n: u64) -> Result<Factorization> {
        if n == 0 {
            return Err(Error::domain("cannot factor 0"));
        }
        let mut primes = Vec::new();
        let mut rest = n;
        for &q in small_primes() {
            if q * q > rest {
                break;
            }
            while rest % q == 0 {
                primes.push(q);
                rest /= q;
            }
        }
        if rest == 1 {
            return Ok(Factorization::from_primes(primes));
        }
        if rest < TRIAL_DIVISION_BOUND * TRIAL_DIVISION_BOUND || is_prime(rest) {
            primes.push(rest);
            return Ok(Factorization::from_primes(primes));
        }

        let mut rng = StdRng::seed_from_u64(self.seed ^ n);
        let mut remaining = self.budget;
        let mut stack = vec![rest];
        while let Some(c) = stack.pop() {
            if is_prime(c) {
                primes.push(c);
                continue;
            }
            if let Some(r) = perfect_square_root(c) {
                stack.push(r);
                stack.push(r);
                continue;
            }
            match split(c, &mut rng, &mut remaining) {
                Some(d) => {
                    stack.push(d);
                    stack.push(c / d);
                }
                None => {
                    stack.push(c);
                    let known = Factorization::from_primes(primes).pairs;
                    return Err(Error::BudgetExceeded {
                        budget: self.budget,
                        partial: PartialFactorization {
                            value: n,
                            known,
                            unfactored: stack,
                        },
                    });
                }
            }
        }
        Ok(Factorization::from_primes(primes))
    }
}

/// Factorizes with the default budget and seed.
pub fn factorize(n: u64) -> Result<Factorization> {
    Factorizer::default().factorize(n)
}

fn perfect_square_root(n: u64) -> Option<u64> {
    let r = super::modular::isqrt(n);
    (r * r == n).then_some(r)
}

// Retries rho with fresh parameters until a proper factor appears or the
// budget is gone.
fn split(n: u64, rng: &mut StdRng, remaining: &mut u64) -> Option<u64> {
    while *remaining > 0 {
        let c = rng.random_range(1..n);
        let x0 = rng.random_range(0..n);
        if let Some(d) = brent_rho(n, c, x0, remaining) {
            return Some(d);
        }
    }
    None
}

fn brent_rho(n: u64, c: u64, x0: u64, remaining: &mut u64) -> Option<u64> {
    const BATCH: u64 = 128;
    let f = |x: u64| ((x as u128 * x as u128 + c as u128) % n as u128) as u64;
    let mut y = x0;
    let mut x = y;
    let mut ys = y;
    let mut q = 1u64;
    let mut g = 1u64;
    let mut r = 1u64;
    while g == 1 {
        x = y;
        if *remaining < r {
            *remaining = 0;
            return None;
        }
        *remaining -= r;
        for _ in 0..r {
            y = f(y);
        }
        let mut k = 0;
        while k < r && g == 1 {
            ys = y;
            let steps = BATCH.min(r - k);
            if *remaining < steps {
                *remaining = 0;
                return None;
            }
            *remaining -= steps;
            for _ in 0..steps {
                y = f(y);
                q = mulmod(q, x.abs_diff(y), n);
            }
            g = gcd(q, n);
            k += BATCH;
        }
        r *= 2;
    }
    if g == n {
        // the batch overshot; replay it one step at a time
        loop {
            ys = f(ys);
            g = gcd(x.abs_diff(ys), n);
            if g > 1 {
                break;
            }
        }
    }
    (g != n).then_some(g)
}
