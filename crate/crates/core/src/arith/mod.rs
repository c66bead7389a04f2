//! Exact integer number theory on 64-bit values.

mod factor;
mod modular;
mod order;
mod sieve;

pub use factor::{
    factorize, Divisors, Factorization, Factorizer, PartialFactorization, DEFAULT_BUDGET,
    DEFAULT_SEED, TRIAL_DIVISION_BOUND,
};
pub use modular::{checked_lcm, gcd, invmod, is_prime, isqrt, mulmod, powmod};
pub use order::{coprime_part, mult_order, mult_order_with, order_mod_prime_power, OrderCache};
pub use sieve::{
    count_primes_in_progression, floor_bound, prime_pi, primes_in_progression, primes_up_to,
    simple_sieve, ProgressionCount, ProgressionPrimes,
};

/// phi(value) of a factored integer.
pub fn euler_phi(f: &Factorization) -> u64 {
    f.euler_phi()
}

/// P(value), with P(1) = 1.
pub fn largest_prime_factor(f: &Factorization) -> u64 {
    f.largest_prime_factor()
}

pub fn carmichael_lambda(f: &Factorization) -> u64 {
    f.carmichael_lambda()
}

pub fn divisors(f: &Factorization) -> Divisors<'_> {
    f.divisors()
}

/// lcm(1, 2, ..., n), `None` on overflow.
pub fn lcm_up_to(n: u64) -> Option<u64> {
    (1..=n).try_fold(1u64, checked_lcm)
}
