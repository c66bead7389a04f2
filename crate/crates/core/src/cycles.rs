//! Exact cycle counts and average cycle lengths of x -> x^e on F_q^*.
//!
//! With rho the largest divisor of q - 1 coprime to e, the elements lying
//! on cycles are exactly those whose order divides rho, and the elements of
//! order d split into phi(d) / ord_d(e) cycles of length ord_d(e). Summing
//! over d | rho gives the cycle count.

use serde::{Deserialize, Serialize};

use crate::arith::{
    checked_lcm, coprime_part, gcd, is_prime, mult_order, Factorization, Factorizer, OrderCache,
};
use crate::error::{Error, Result};
use crate::rational::{self, Rational};

/// The power map x -> x^e on F_q^*, q = p^k.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PowerMapInstance {
    pub e: u64,
    pub p: u64,
    pub k: u32,
    /// Group order q - 1.
    pub n: u64,
    pub n_fact: Factorization,
}

impl PowerMapInstance {
    pub fn new(e: u64, p: u64, k: u32) -> Result<Self> {
        Self::with_factorizer(e, p, k, &Factorizer::default())
    }

    pub fn prime_field(e: u64, p: u64) -> Result<Self> {
        Self::new(e, p, 1)
    }

    pub fn with_factorizer(e: u64, p: u64, k: u32, factorizer: &Factorizer) -> Result<Self> {
        if e < 2 {
            return Err(Error::domain(format!("exponent e = {e} must be at least 2")));
        }
        if !is_prime(p) {
            return Err(Error::domain(format!("{p} is not prime")));
        }
        if k == 0 {
            return Err(Error::domain("field degree k must be positive"));
        }
        let q = p
            .checked_pow(k)
            .ok_or_else(|| Error::WidthOverflow(format!("{p}^{k}")))?;
        let n = q - 1;
        let n_fact = factorizer.factorize(n)?;
        Ok(PowerMapInstance { e, p, k, n, n_fact })
    }

    /// Largest divisor of q - 1 coprime to e, with its factorization.
    pub fn rho(&self) -> Factorization {
        let pairs = self
            .n_fact
            .pairs()
            .iter()
            .copied()
            .filter(|&(r, _)| self.e % r != 0);
        Factorization::from_pairs(pairs).expect("sub-factorization of a valid factorization")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Contribution {
    pub d: u64,
    pub phi_d: u64,
    pub ord_d: u64,
    #[serde(with = "rational::pair")]
    pub ratio: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CycleReport {
    pub instance: PowerMapInstance,
    pub rho: u64,
    /// One entry per divisor of rho, sorted by d.
    pub contributions: Vec<Contribution>,
    pub n_cycles: u64,
}

impl CycleReport {
    /// Exact sum of the per-divisor ratios.
    pub fn ratio_sum(&self) -> Rational {
        self.contributions
            .iter()
            .fold(Rational::from_integer(0), |acc, c| acc + c.ratio)
    }

    /// The single divisor term phi(m) / ord_m(e), if m divides rho.
    pub fn term(&self, m: u64) -> Option<Rational> {
        self.contributions
            .binary_search_by_key(&m, |c| c.d)
            .ok()
            .map(|i| self.contributions[i].ratio)
    }
}

// Per-prime tables for a factored rho: phi(r^j) and ord_{r^j}(e).
struct PrimePowerTables {
    primes: Vec<(u64, u32)>,
    phi: Vec<Vec<u64>>,
    ord: Vec<Vec<u64>>,
}

impl PrimePowerTables {
    fn new(e: u64, rho: &Factorization, cache: &mut OrderCache) -> Result<Self> {
        let mut phi = Vec::new();
        let mut ord = Vec::new();
        for &(r, a) in rho.pairs() {
            let mut ph = vec![1u64];
            let mut od = vec![1u64];
            for j in 1..=a {
                ph.push(r.pow(j - 1) * (r - 1));
                od.push(cache.prime_power_order(e, r, j)?);
            }
            phi.push(ph);
            ord.push(od);
        }
        Ok(PrimePowerTables {
            primes: rho.pairs().to_vec(),
            phi,
            ord,
        })
    }

    /// Calls `f(d, phi(d), ord_d(e))` for every divisor d.
    fn for_each_divisor(&self, mut f: impl FnMut(u64, u64, u64)) {
        let mut exps = vec![0u32; self.primes.len()];
        loop {
            let mut d = 1u64;
            let mut phi = 1u64;
            let mut ord = 1u64;
            for (i, &j) in exps.iter().enumerate() {
                d *= self.primes[i].0.pow(j);
                phi *= self.phi[i][j as usize];
                ord = checked_lcm(ord, self.ord[i][j as usize]).expect("ord_d(e) <= d");
            }
            f(d, phi, ord);
            let mut i = 0;
            loop {
                if i == exps.len() {
                    return;
                }
                if exps[i] < self.primes[i].1 {
                    exps[i] += 1;
                    break;
                }
                exps[i] = 0;
                i += 1;
            }
        }
    }
}

/// N(e, q) with the full per-divisor breakdown.
pub fn cycle_count(inst: &PowerMapInstance) -> Result<CycleReport> {
    cycle_count_with(inst, &mut OrderCache::default())
}

pub fn cycle_count_with(inst: &PowerMapInstance, cache: &mut OrderCache) -> Result<CycleReport> {
    let rho = inst.rho();
    let tables = PrimePowerTables::new(inst.e, &rho, cache)?;
    let mut contributions = Vec::with_capacity(rho.num_divisors() as usize);
    tables.for_each_divisor(|d, phi_d, ord_d| {
        contributions.push(Contribution {
            d,
            phi_d,
            ord_d,
            ratio: Rational::new(phi_d as u128, ord_d as u128),
        });
    });
    contributions.sort_unstable_by_key(|c| c.d);
    let sum = contributions
        .iter()
        .fold(Rational::from_integer(0), |acc, c| acc + c.ratio);
    if !sum.is_integer() {
        return Err(Error::invariant(format!(
            "cycle sum {sum} for e={} q-1={} is not an integer",
            inst.e, inst.n
        )));
    }
    let n_cycles = u64::try_from(sum.to_integer())
        .map_err(|_| Error::invariant("cycle count exceeds q - 1"))?;
    Ok(CycleReport {
        instance: inst.clone(),
        rho: rho.value(),
        contributions,
        n_cycles,
    })
}

/// N(e, q) alone. Sums over the common denominator ord_rho(e), which
/// keeps every intermediate below rho^2.
pub fn cycle_total_with(inst: &PowerMapInstance, cache: &mut OrderCache) -> Result<u64> {
    let rho = inst.rho();
    let tables = PrimePowerTables::new(inst.e, &rho, cache)?;
    let big_l = cache.order(inst.e, &rho)? as u128;
    let mut scaled = 0u128;
    tables.for_each_divisor(|_, phi_d, ord_d| {
        scaled += phi_d as u128 * (big_l / ord_d as u128);
    });
    if scaled % big_l != 0 {
        return Err(Error::invariant(format!(
            "cycle sum for e={} q-1={} is not an integer",
            inst.e, inst.n
        )));
    }
    Ok((scaled / big_l) as u64)
}

/// Order of e modulo the prime-to-e part of n.
pub fn order_star(e: u64, n: u64) -> Result<u64> {
    if n == 0 {
        return Err(Error::domain("n must be positive"));
    }
    mult_order(e, coprime_part(n, e))
}

/// Average length of the cycle eventually reached, over all seeds of F_p^*.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AverageCycleLength {
    pub instance: PowerMapInstance,
    #[serde(with = "rational::pair")]
    pub value: Rational,
    /// phi(p-1)/(p-1) * ord_rho(e).
    #[serde(with = "rational::pair")]
    pub lower: Rational,
    /// ord_rho(e).
    pub upper: u64,
}

pub fn average_cycle_length(inst: &PowerMapInstance) -> Result<AverageCycleLength> {
    average_cycle_length_with(inst, &mut OrderCache::default())
}

pub fn average_cycle_length_with(
    inst: &PowerMapInstance,
    cache: &mut OrderCache,
) -> Result<AverageCycleLength> {
    if inst.k != 1 {
        return Err(Error::domain(
            "average cycle length is defined here for prime fields only (k = 1)",
        ));
    }
    // A seed of order d lands on a cycle of length ord_{d'}(e), d' the
    // prime-to-e part of d; there are phi(d) such seeds.
    let full = &inst.n_fact;
    let ords: Vec<Vec<u64>> = full
        .pairs()
        .iter()
        .map(|&(r, a)| {
            (0..=a)
                .map(|j| {
                    if inst.e % r == 0 {
                        Ok(1)
                    } else {
                        cache.prime_power_order(inst.e, r, j)
                    }
                })
                .collect::<Result<Vec<u64>>>()
        })
        .collect::<Result<_>>()?;
    let mut total = 0u128;
    let mut exps = vec![0u32; full.pairs().len()];
    'odometer: loop {
        let mut phi = 1u64;
        let mut ord = 1u64;
        for (i, &j) in exps.iter().enumerate() {
            let r = full.pairs()[i].0;
            if j > 0 {
                phi *= r.pow(j - 1) * (r - 1);
            }
            ord = checked_lcm(ord, ords[i][j as usize]).expect("order bounded by modulus");
        }
        total += phi as u128 * ord as u128;
        for (i, x) in exps.iter_mut().enumerate() {
            if *x < full.pairs()[i].1 {
                *x += 1;
                continue 'odometer;
            }
            *x = 0;
        }
        break;
    }
    let upper = cache.order(inst.e, &inst.rho())?;
    let group = inst.n as u128;
    let value = Rational::new(total, group);
    let lower = Rational::new(full.euler_phi() as u128 * upper as u128, group);
    Ok(AverageCycleLength {
        instance: inst.clone(),
        value,
        lower,
        upper,
    })
}

/// Guaranteed lower bound on N(e, p^k) from a modulus m coprime to e*p,
/// with k = ord_m(p).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimePowerBound {
    pub e: u64,
    pub p: u64,
    pub m: u64,
    pub lambda_m: u64,
    pub k: u64,
    /// m / lambda(m).
    #[serde(with = "rational::pair")]
    pub bound: Rational,
}

pub fn prime_power_lower_bound(e: u64, p: u64, m: u64) -> Result<PrimePowerBound> {
    prime_power_lower_bound_with(e, p, m, &Factorizer::default())
}

pub fn prime_power_lower_bound_with(
    e: u64,
    p: u64,
    m: u64,
    factorizer: &Factorizer,
) -> Result<PrimePowerBound> {
    if e < 2 {
        return Err(Error::domain(format!("exponent e = {e} must be at least 2")));
    }
    if !is_prime(p) {
        return Err(Error::domain(format!("{p} is not prime")));
    }
    if m == 0 || gcd(m, e) != 1 || gcd(m, p) != 1 {
        return Err(Error::domain(format!("m = {m} must be positive and coprime to e*p")));
    }
    let m_fact = factorizer.factorize(m)?;
    let lambda_m = m_fact.carmichael_lambda();
    let k = crate::arith::mult_order_with(p, m, factorizer)?;
    Ok(PrimePowerBound {
        e,
        p,
        m,
        lambda_m,
        k,
        bound: Rational::new(m as u128, lambda_m as u128),
    })
}

/// Evaluates N(e, p^k) for a bound record when p^k - 1 fits the word size
/// and factors within budget; `None` otherwise.
pub fn verify_prime_power_bound(b: &PrimePowerBound, factorizer: &Factorizer) -> Result<Option<u64>> {
    let Ok(k) = u32::try_from(b.k) else {
        return Ok(None);
    };
    match PowerMapInstance::with_factorizer(b.e, b.p, k, factorizer) {
        Ok(inst) => {
            let n = cycle_total_with(&inst, &mut OrderCache::new(*factorizer))?;
            if rational::from_int(n) < b.bound {
                return Err(Error::invariant(format!(
                    "N({}, {}^{}) = {n} below guaranteed {}",
                    b.e, b.p, b.k, b.bound
                )));
            }
            Ok(Some(n))
        }
        Err(Error::WidthOverflow(_)) | Err(Error::BudgetExceeded { .. }) => Ok(None),
        Err(other) => Err(other),
    }
}
