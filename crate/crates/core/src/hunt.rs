//! Constructive searches for primes (and prime powers) whose power map has
//! many cycles.
//!
//! Each search picks a modulus m coprime to e and looks for fields with
//! m | q - 1. Then m divides rho, so the single divisor term
//! phi(m) / ord_m(e) already bounds N(e, q) from below; every record
//! carries that bound next to the exact count.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::arith::{
    self, checked_lcm, gcd, is_prime, lcm_up_to, mult_order, primes_in_progression, Factorizer,
    OrderCache,
};
use crate::cycles::{
    cycle_total_with, prime_power_lower_bound_with, verify_prime_power_bound, PowerMapInstance,
};
use crate::error::{Error, Result};
use crate::rational::{self, Rational};

/// Exponent of the smoothness parameter w = v^(1/SHIFTED_PRIME_EXPONENT).
pub const SHIFTED_PRIME_EXPONENT: f64 = 0.2961;
pub const DEFAULT_KAPPA: f64 = 1.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HuntRecord {
    pub e: u64,
    /// ord_m(e); equals the k of m = e^k - 1 in the extremal hunt.
    pub k: u64,
    pub m: u64,
    pub p: u64,
    #[serde(with = "rational::pair")]
    pub guaranteed_lower: Rational,
    pub n_cycles: u64,
    /// ln N / ln p.
    pub exponent: f64,
}

pub(crate) fn log_ratio(n: u64, p: u64) -> f64 {
    if p <= 2 || n <= 1 {
        0.0
    } else {
        (n as f64).ln() / (p as f64).ln()
    }
}

fn make_record(
    e: u64,
    m: u64,
    ord: u64,
    p: u64,
    cache: &mut OrderCache,
) -> Result<HuntRecord> {
    let inst = PowerMapInstance::with_factorizer(e, p, 1, cache.factorizer())?;
    let n_cycles = cycle_total_with(&inst, cache)?;
    let phi_m = cache.factorizer().factorize(m)?.euler_phi();
    let guaranteed_lower = Rational::new(phi_m as u128, ord as u128);
    if (p - 1) % m != 0 || gcd(m, e) != 1 || rational::from_int(n_cycles) < guaranteed_lower {
        return Err(Error::invariant(format!(
            "hunt record e={e} m={m} p={p} N={n_cycles} violates its guarantee {guaranteed_lower}"
        )));
    }
    Ok(HuntRecord {
        e,
        k: ord,
        m,
        p,
        guaranteed_lower,
        n_cycles,
        exponent: log_ratio(n_cycles, p),
    })
}

/// One k of the extremal hunt: either the least prime p = 1 (mod e^k - 1)
/// under the cap, or a miss.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum LargeHunt {
    Found(HuntRecord),
    Miss { k: u64, m: u64, p_cap: u64 },
}

impl LargeHunt {
    pub fn record(&self) -> Option<&HuntRecord> {
        match self {
            LargeHunt::Found(r) => Some(r),
            LargeHunt::Miss { .. } => None,
        }
    }
}

/// For each k in [k_min, k_max], sets m = e^k - 1 and scans p = jm + 1,
/// j = 1, 2, ..., up to `p_cap` for the least prime.
pub fn hunt_large(e: u64, k_min: u64, k_max: u64, p_cap: u64) -> Result<Vec<LargeHunt>> {
    hunt_large_with(e, k_min, k_max, p_cap, &mut OrderCache::default())
}

pub fn hunt_large_with(
    e: u64,
    k_min: u64,
    k_max: u64,
    p_cap: u64,
    cache: &mut OrderCache,
) -> Result<Vec<LargeHunt>> {
    if e < 2 {
        return Err(Error::domain(format!("exponent e = {e} must be at least 2")));
    }
    if k_min == 0 || k_min > k_max {
        return Err(Error::domain(format!("bad k range [{k_min}, {k_max}]")));
    }
    let mut out = Vec::new();
    for k in k_min..=k_max {
        let m = u32::try_from(k)
            .ok()
            .and_then(|k32| e.checked_pow(k32))
            .map(|ek| ek - 1)
            .ok_or_else(|| Error::WidthOverflow(format!("{e}^{k} - 1")))?;
        // e^j - 1 < e^k - 1 for j < k, so no smaller power is 1 mod m.
        let ord = mult_order(e, m)?;
        if ord != k {
            return Err(Error::invariant(format!("ord_{m}({e}) = {ord}, expected {k}")));
        }
        let hit = (1u64..)
            .map_while(|j| j.checked_mul(m).and_then(|jm| jm.checked_add(1)))
            .take_while(|&p| p <= p_cap)
            .find(|&p| is_prime(p));
        out.push(match hit {
            Some(p) => LargeHunt::Found(make_record(e, m, k, p, cache)?),
            None => LargeHunt::Miss { k, m, p_cap },
        });
    }
    Ok(out)
}

/// Parameters of the shifted-prime construction behind the average-order
/// bound.
///
/// `v = ln u / ln ln u`, `w = v^(1/0.2961)`, `M_v = lcm(1..=floor(v))`, and
/// `q` holds the primes r in `[w / (ln w)^kappa, w]` with `r - 1 | M_v` and
/// `r` not dividing e. `nu = floor(ln u / ln w)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstructionParams {
    pub e: u64,
    pub u: f64,
    pub kappa: f64,
    pub v: f64,
    pub w: f64,
    /// w / (ln w)^kappa.
    pub lower: f64,
    pub m_v: u64,
    pub q: Vec<u64>,
    pub nu: usize,
}

impl ConstructionParams {
    /// The u > e^e at which ln u / ln ln u equals `v` (the increasing
    /// branch), rounded up so the computed v is not below the target.
    pub fn u_for_v(v: f64) -> Result<f64> {
        if !(v >= std::f64::consts::E) {
            return Err(Error::domain(format!("v = {v} is below the minimum e")));
        }
        let g = |y: f64| y / y.ln();
        let (mut lo, mut hi) = (std::f64::consts::E, std::f64::consts::E * 2.0);
        while g(hi) < v {
            hi *= 2.0;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if g(mid) < v {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(hi.exp())
    }

    /// Both ends of the window every product of nu members of Q lies in.
    pub fn product_window(&self) -> (f64, f64) {
        let nu = self.nu as i32;
        (self.lower.powi(nu), self.w.powi(nu))
    }

    pub fn binomial_count(&self) -> u128 {
        binomial(self.q.len(), self.nu)
    }

    pub fn products(&self, limit: usize) -> Result<ProductEnumerator<'_>> {
        enumerate_products(self, limit)
    }
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i as u128 + 1))
}

pub fn build_construction(e: u64, u: f64, kappa: f64) -> Result<ConstructionParams> {
    if e < 2 {
        return Err(Error::domain(format!("exponent e = {e} must be at least 2")));
    }
    if !(u > 10.0) || !u.is_finite() {
        return Err(Error::domain(format!("u = {u} must exceed 10")));
    }
    if !(kappa > 0.0) || !kappa.is_finite() {
        return Err(Error::domain(format!("kappa = {kappa} must be positive")));
    }
    let v = u.ln() / u.ln().ln();
    let v_floor = v.floor();
    if v_floor < 1.0 {
        return Err(Error::domain(format!("floor(v) = {v_floor} < 1; u too small")));
    }
    let m_v = lcm_up_to(v_floor as u64)
        .ok_or_else(|| Error::WidthOverflow(format!("lcm(1..={v_floor})")))?;
    let w = v.powf(1.0 / SHIFTED_PRIME_EXPONENT);
    let lower = w / w.ln().powf(kappa);
    let m_v_fact = arith::factorize(m_v)?;
    let mut q: Vec<u64> = m_v_fact
        .divisors()
        .map(|d| d + 1)
        .filter(|&r| (r as f64) >= lower && (r as f64) <= w && is_prime(r) && e % r != 0)
        .collect();
    q.sort_unstable();
    let nu = (u.ln() / w.ln()).floor().max(0.0) as usize;
    Ok(ConstructionParams {
        e,
        u,
        kappa,
        v,
        w,
        lower,
        m_v,
        q,
        nu,
    })
}

/// Products of nu distinct members of Q, in lexicographic order of the
/// chosen indices.
#[derive(Debug, Clone)]
pub struct ProductEnumerator<'a> {
    q: &'a [u64],
    idx: Vec<usize>,
    remaining: usize,
    done: bool,
}

pub fn enumerate_products(params: &ConstructionParams, limit: usize) -> Result<ProductEnumerator<'_>> {
    if params.nu == 0 {
        return Err(Error::domain("nu = 0: u is smaller than w"));
    }
    if params.q.len() < params.nu {
        return Err(Error::ConstructionTooThin {
            achieved: params.q.len(),
            needed: params.nu,
        });
    }
    Ok(ProductEnumerator {
        q: &params.q,
        idx: (0..params.nu).collect(),
        remaining: limit,
        done: false,
    })
}

impl Iterator for ProductEnumerator<'_> {
    type Item = Result<u64>;

    fn next(&mut self) -> Option<Result<u64>> {
        if self.done || self.remaining == 0 {
            return None;
        }
        self.remaining -= 1;
        let m = self
            .idx
            .iter()
            .try_fold(1u64, |acc, &i| acc.checked_mul(self.q[i]))
            .ok_or_else(|| Error::WidthOverflow("product of Q members".into()));
        // advance to the next combination
        let n = self.q.len();
        let k = self.idx.len();
        match (0..k).rev().find(|&i| self.idx[i] < n - k + i) {
            Some(i) => {
                self.idx[i] += 1;
                for j in i + 1..k {
                    self.idx[j] = self.idx[j - 1] + 1;
                }
            }
            None => self.done = true,
        }
        Some(m)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AverageHunt {
    pub params: ConstructionParams,
    pub x: f64,
    pub products: Vec<u64>,
    /// Sorted by (m, p); a prime shows up once per modulus it serves.
    pub records: Vec<HuntRecord>,
    /// Sum over the products m of pi(x; m, 1).
    pub sum_pi: u64,
    pub distinct_primes: u64,
    /// Mean N(e, p) over distinct primes found.
    pub mean_n_over_found: Option<f64>,
}

pub fn hunt_average(e: u64, u: f64, kappa: f64, x: f64, products_limit: usize) -> Result<AverageHunt> {
    let params = build_construction(e, u, kappa)?;
    hunt_average_on(params, x, products_limit, &mut OrderCache::default())
}

/// Runs the average-order hunt on an already built construction.
pub fn hunt_average_on(
    params: ConstructionParams,
    x: f64,
    products_limit: usize,
    cache: &mut OrderCache,
) -> Result<AverageHunt> {
    let mut hunt = AverageHunt {
        x,
        products: Vec::new(),
        records: Vec::new(),
        sum_pi: 0,
        distinct_primes: 0,
        mean_n_over_found: None,
        params,
    };
    if products_limit == 0 {
        return Ok(hunt);
    }
    let params = &hunt.params;
    let e = params.e;
    let products: Vec<u64> = enumerate_products(params, products_limit)?.collect::<Result<_>>()?;
    let mut distinct: BTreeMap<u64, u64> = BTreeMap::new();
    for &m in &products {
        let ord = mult_order(e, m)?;
        if params.m_v % ord != 0 {
            return Err(Error::invariant(format!("ord_{m}({e}) = {ord} does not divide M_v")));
        }
        for p in primes_in_progression(x, m, 1) {
            let rec = make_record(e, m, ord, p, cache)?;
            distinct.insert(p, rec.n_cycles);
            hunt.records.push(rec);
            hunt.sum_pi += 1;
        }
    }
    hunt.records.sort_by_key(|r| (r.m, r.p));
    hunt.distinct_primes = distinct.len() as u64;
    if !distinct.is_empty() {
        let total: f64 = distinct.values().map(|&n| n as f64).sum();
        hunt.mean_n_over_found = Some(total / distinct.len() as f64);
    }
    hunt.products = products;
    Ok(hunt)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrimePowerRecord {
    pub m: u64,
    pub lambda_m: u64,
    /// ord_m(p): the field F_{p^k} has m | p^k - 1.
    pub k: u64,
    #[serde(with = "rational::pair")]
    pub bound: Rational,
    pub verified_n: Option<u64>,
}

/// Primes r with r - 1 | M_v and r not dividing e*p.
pub fn eligible_primes(e: u64, p: u64, v: u64) -> Result<Vec<u64>> {
    let m_v = lcm_up_to(v).ok_or_else(|| Error::WidthOverflow(format!("lcm(1..={v})")))?;
    let mut out: Vec<u64> = arith::factorize(m_v)?
        .divisors()
        .map(|d| d + 1)
        .filter(|&r| is_prime(r) && e % r != 0 && p % r != 0)
        .collect();
    out.sort_unstable();
    Ok(out)
}

/// Small-lambda moduli m built from primes with smooth r - 1, and the
/// bound N(e, p^k) >= m / lambda(m) they give with k = ord_m(p).
///
/// Subsets are visited by size, then lexicographically, and at most `limit`
/// are kept. Output is sorted by m.
pub fn hunt_prime_power(
    e: u64,
    p: u64,
    v: u64,
    max_factors: usize,
    limit: usize,
    factorizer: &Factorizer,
) -> Result<Vec<PrimePowerRecord>> {
    if e < 2 {
        return Err(Error::domain(format!("exponent e = {e} must be at least 2")));
    }
    if !is_prime(p) {
        return Err(Error::domain(format!("{p} is not prime")));
    }
    if v == 0 {
        return Err(Error::domain("v must be positive"));
    }
    let m_v = lcm_up_to(v).ok_or_else(|| Error::WidthOverflow(format!("lcm(1..={v})")))?;
    let eligible = eligible_primes(e, p, v)?;
    let mut out = Vec::new();
    'sizes: for size in 1..=max_factors.min(eligible.len()) {
        let mut idx: Vec<usize> = (0..size).collect();
        loop {
            if out.len() == limit {
                break 'sizes;
            }
            let chosen = idx.iter().map(|&i| eligible[i]);
            if let Some(m) = chosen.clone().try_fold(1u64, |acc, r| acc.checked_mul(r)) {
                let lambda = chosen
                    .clone()
                    .try_fold(1u64, |acc, r| checked_lcm(acc, r - 1))
                    .expect("bounded by M_v");
                let b = prime_power_lower_bound_with(e, p, m, factorizer)?;
                if b.lambda_m != lambda || m_v % lambda != 0 || lambda % b.k != 0 {
                    return Err(Error::invariant(format!(
                        "m = {m}: lambda {} / {lambda}, k = {}, M_v = {m_v}",
                        b.lambda_m, b.k
                    )));
                }
                let verified_n = verify_prime_power_bound(&b, factorizer)?;
                out.push(PrimePowerRecord {
                    m,
                    lambda_m: lambda,
                    k: b.k,
                    bound: b.bound,
                    verified_n,
                });
            }
            let n = eligible.len();
            match (0..size).rev().find(|&i| idx[i] < n - size + i) {
                Some(i) => {
                    idx[i] += 1;
                    for j in i + 1..size {
                        idx[j] = idx[j - 1] + 1;
                    }
                }
                None => break,
            }
        }
    }
    out.sort_by_key(|r| r.m);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cycles::cycle_count;

    fn found(h: &[LargeHunt]) -> Vec<&HuntRecord> {
        h.iter().filter_map(LargeHunt::record).collect()
    }

    #[test]
    fn hunt_large_examples() {
        let h = hunt_large(2, 2, 4, 1_000).unwrap();
        let recs = found(&h);
        assert_eq!(recs.len(), 3);
        let r2 = recs[0];
        assert_eq!((r2.m, r2.p, r2.n_cycles), (3, 7, 2));
        assert_eq!(r2.guaranteed_lower, Rational::from_integer(1));
        let r4 = recs[2];
        assert_eq!((r4.m, r4.p, r4.n_cycles), (15, 31, 5));
        assert_eq!(r4.guaranteed_lower, Rational::from_integer(2));
        assert!((r4.exponent - 5f64.ln() / 31f64.ln()).abs() < 1e-12);
        assert!((r4.exponent - 0.469).abs() < 1e-3);

        // m = 2, p = 3: both elements of F_3^* are fixed by cubing
        let h = hunt_large(3, 1, 1, 100).unwrap();
        let r = h[0].record().unwrap();
        assert_eq!((r.m, r.p, r.n_cycles), (2, 3, 2));
    }

    #[test]
    fn hunt_large_misses_and_errors() {
        let h = hunt_large(2, 4, 4, 30).unwrap();
        assert_eq!(h, vec![LargeHunt::Miss { k: 4, m: 15, p_cap: 30 }]);
        assert!(matches!(hunt_large(2, 1, 70, 100), Err(Error::WidthOverflow(_))));
        assert!(hunt_large(2, 5, 4, 100).is_err());
    }

    #[test]
    fn small_construction() {
        // u = 10^6: v ~ 5.26, M_v = 60, w ~ 272
        let c = build_construction(2, 1e6, 3.0).unwrap();
        assert_eq!(c.m_v, 60);
        assert_eq!(c.q, vec![3, 5, 7, 11, 13, 31, 61]);
        assert_eq!(c.nu, 2);
        assert_eq!(c.binomial_count(), 21);
        let all: Vec<u64> = c.products(usize::MAX).unwrap().map(|m| m.unwrap()).collect();
        assert_eq!(all.len(), 21);
        assert_eq!(&all[..3], &[15, 21, 33]);
        let c1 = build_construction(2, 1e6, 1.0).unwrap();
        assert_eq!(c1.q, vec![61]);
        assert!(matches!(
            c1.products(10),
            Err(Error::ConstructionTooThin { achieved: 1, needed: 2 })
        ));
        assert!(build_construction(2, 5.0, 1.0).is_err());
        assert!(build_construction(2, 1e6, 0.0).is_err());
    }

    #[test]
    fn u_for_v_inverts_v() {
        for target in [3.0, 10.0, 17.5] {
            let u = ConstructionParams::u_for_v(target).unwrap();
            let v = u.ln() / u.ln().ln();
            assert!(v >= target && v - target < 1e-9, "{v} vs {target}");
        }
        assert!(ConstructionParams::u_for_v(2.0).is_err());
    }

    #[test]
    fn product_enumeration_counts() {
        let params = ConstructionParams {
            e: 2,
            u: 0.0,
            kappa: 1.0,
            v: 10.0,
            w: 2400.0,
            lower: 300.0,
            m_v: 2520,
            q: vec![421, 631, 1009],
            nu: 2,
        };
        let got: Vec<u64> = params.products(10).unwrap().map(|m| m.unwrap()).collect();
        assert_eq!(got, vec![421 * 631, 421 * 1009, 631 * 1009]);
        let one = ConstructionParams { nu: 1, ..params.clone() };
        let got: Vec<u64> = one.products(10).unwrap().map(|m| m.unwrap()).collect();
        assert_eq!(got, vec![421, 631, 1009]);
        assert_eq!(params.products(2).unwrap().count(), 2);
    }

    #[test]
    fn hunt_average_small() {
        let h = hunt_average(2, 1e6, 3.0, 1e5, 5).unwrap();
        assert_eq!(h.products, vec![15, 21, 33, 39, 93]);
        let expected_pi: u64 = h
            .products
            .iter()
            .map(|&m| crate::arith::count_primes_in_progression(1e5, m, 1).count)
            .sum();
        assert_eq!(h.sum_pi, expected_pi);
        assert_eq!(h.records.len() as u64, h.sum_pi);
        for r in &h.records {
            let report = cycle_count(&PowerMapInstance::prime_field(2, r.p).unwrap()).unwrap();
            assert_eq!(report.n_cycles, r.n_cycles);
            assert_eq!(report.term(r.m), Some(r.guaranteed_lower));
        }
        assert!(h.distinct_primes < h.sum_pi);
        let empty = hunt_average(2, 1e6, 3.0, 1e5, 0).unwrap();
        assert!(empty.records.is_empty());
        assert_eq!(empty.sum_pi, 0);
    }

    #[test]
    fn hunt_prime_power_examples() {
        let f = Factorizer::default();
        assert_eq!(eligible_primes(2, 3, 4).unwrap(), vec![5, 7, 13]);
        let recs = hunt_prime_power(2, 3, 4, 3, usize::MAX, &f).unwrap();
        assert_eq!(recs.len(), 7);
        let by_m = |m| recs.iter().find(|r| r.m == m).unwrap();
        let r = by_m(455);
        assert_eq!((r.lambda_m, r.k, r.bound), (12, 12, Rational::new(455, 12)));
        let r = by_m(5);
        assert_eq!((r.lambda_m, r.k, r.verified_n), (4, 4, Some(2)));
        assert!(hunt_prime_power(2, 3, 4, 0, usize::MAX, &f).unwrap().is_empty());
        assert_eq!(hunt_prime_power(2, 3, 4, 3, 2, &f).unwrap().len(), 2);
    }
}
