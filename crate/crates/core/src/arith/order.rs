//! Multiplicative orders by divisor descent from a known multiple.

use std::collections::HashMap;

use super::factor::{Factorization, Factorizer};
use super::modular::{checked_lcm, gcd, powmod};
use crate::error::{Error, Result};

/// Largest divisor of `n` coprime to `e`.
pub fn coprime_part(mut n: u64, e: u64) -> u64 {
    loop {
        let g = gcd(n, e);
        if g <= 1 {
            return n;
        }
        n /= g;
    }
}

/// Strips prime factors from a multiple of the order while a^t = 1 (mod m)
/// still holds.
fn descend(a: u64, m: u64, multiple: u64, multiple_fact: &Factorization) -> u64 {
    let mut t = multiple;
    for &(q, k) in multiple_fact.pairs() {
        for _ in 0..k {
            if powmod(a, t / q, m) == 1 {
                t /= q;
            } else {
                break;
            }
        }
    }
    t
}

/// The order of `a` modulo `b`, computed from lambda(b) by stripping primes.
pub fn mult_order(a: u64, b: u64) -> Result<u64> {
    mult_order_with(a, b, &Factorizer::default())
}

pub fn mult_order_with(a: u64, b: u64, factorizer: &Factorizer) -> Result<u64> {
    if b == 0 {
        return Err(Error::domain("modulus must be positive"));
    }
    if gcd(a % b, b) != 1 && b != 1 {
        return Err(Error::domain(format!("gcd({a}, {b}) > 1")));
    }
    if b == 1 {
        return Ok(1);
    }
    let lambda = factorizer.factorize(b)?.carmichael_lambda();
    let lambda_fact = factorizer.factorize(lambda)?;
    Ok(descend(a, b, lambda, &lambda_fact))
}

/// Order of `a` modulo r^j for a prime r not dividing `a`, given the
/// factorization of r - 1.
pub fn order_mod_prime_power(a: u64, r: u64, j: u32, r_minus_1: &Factorization) -> u64 {
    debug_assert_eq!(r_minus_1.value(), r - 1);
    let mut t = descend(a, r, r - 1, r_minus_1);
    if j > 1 {
        let modulus = r.pow(j);
        while powmod(a, t, modulus) != 1 {
            t *= r;
        }
    }
    t
}

/// Memo of orders keyed by (base, prime, exponent). One per sweep worker.
#[derive(Debug, Default, Clone)]
pub struct OrderCache {
    prime_power: HashMap<(u64, u64, u32), u64>,
    factorizer: Factorizer,
}

impl OrderCache {
    pub fn new(factorizer: Factorizer) -> Self {
        OrderCache {
            prime_power: HashMap::new(),
            factorizer,
        }
    }

    pub fn factorizer(&self) -> &Factorizer {
        &self.factorizer
    }

    pub fn len(&self) -> usize {
        self.prime_power.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prime_power.is_empty()
    }

    pub fn prime_power_order(&mut self, a: u64, r: u64, j: u32) -> Result<u64> {
        if j == 0 {
            return Ok(1);
        }
        if let Some(&t) = self.prime_power.get(&(a, r, j)) {
            return Ok(t);
        }
        if a % r == 0 {
            return Err(Error::domain(format!("{r} divides {a}")));
        }
        let t = match j {
            1 => {
                let fact = self.factorizer.factorize(r - 1)?;
                order_mod_prime_power(a, r, 1, &fact)
            }
            _ => {
                let mut t = self.prime_power_order(a, r, j - 1)?;
                let modulus = r.pow(j);
                while powmod(a, t, modulus) != 1 {
                    t *= r;
                }
                t
            }
        };
        self.prime_power.insert((a, r, j), t);
        Ok(t)
    }

    /// Order of `a` modulo the factored `m`: lcm over its prime powers.
    pub fn order(&mut self, a: u64, m: &Factorization) -> Result<u64> {
        let mut t = 1u64;
        for &(r, j) in m.pairs() {
            let o = self.prime_power_order(a, r, j)?;
            t = checked_lcm(t, o).ok_or_else(|| Error::invariant("order exceeds lambda"))?;
        }
        Ok(t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::factorize;

    fn naive_order(a: u64, b: u64) -> u64 {
        if b == 1 {
            return 1;
        }
        let mut x = a % b;
        let mut t = 1;
        while x != 1 {
            x = x * a % b;
            t += 1;
        }
        t
    }

    #[test]
    fn order_examples() {
        assert_eq!(mult_order(5, 1).unwrap(), 1);
        assert_eq!(naive_order(2, 7), 3);
        assert_eq!(mult_order(2, 7).unwrap(), 3);
        assert_eq!(naive_order(2, 15), 4);
        assert_eq!(mult_order(2, 15).unwrap(), 4);
        assert!(matches!(mult_order(6, 9), Err(Error::Domain(_))));
        assert!(matches!(mult_order(2, 0), Err(Error::Domain(_))));
    }

    #[test]
    fn coprime_part_examples() {
        assert_eq!(coprime_part(8, 2), 1);
        assert_eq!(coprime_part(30, 2), 15);
        assert_eq!(coprime_part(30, 6), 5);
        assert_eq!(coprime_part(1, 6), 1);
        assert_eq!(coprime_part(7 * 49 * 4, 14), 1);
    }

    #[test]
    fn cache_agrees_with_descent() {
        let mut cache = OrderCache::default();
        for b in 1..3000u64 {
            for a in [2u64, 3, 10] {
                if gcd(a, b) != 1 {
                    continue;
                }
                let via_cache = cache.order(a, &factorize(b).unwrap()).unwrap();
                assert_eq!(via_cache, naive_order(a, b), "a={a} b={b}");
            }
        }
        assert!(!cache.is_empty());
    }
}
