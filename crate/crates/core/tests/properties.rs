use powermap::arith::{
    self, coprime_part, count_primes_in_progression, factorize, gcd, is_prime, mult_order,
    prime_pi, simple_sieve,
};
use powermap::cycles::{average_cycle_length, cycle_count, order_star, PowerMapInstance};
use powermap::oracle::{brute_cycle_count_cyclic, brute_cycle_count_field};
use powermap::rational::{self, Rational};
use proptest::prelude::*;

fn small_primes(limit: u64) -> Vec<u64> {
    simple_sieve(limit)
}

proptest! {
    #[test]
    fn factorization_reassembles(n in 1u64..=u64::MAX) {
        let f = factorize(n).unwrap();
        let mut prod = 1u64;
        let mut last = 1u64;
        for &(p, a) in f.pairs() {
            prop_assert!(p > last);
            prop_assert!(is_prime(p));
            prop_assert!(a >= 1);
            prod *= p.pow(a);
            last = p;
        }
        prop_assert_eq!(prod, n);
        prop_assert_eq!(f.value(), n);
        prop_assert_eq!(f.is_one(), n == 1);
    }

    #[test]
    fn coprime_part_splits_n(n in 1u64..=u64::MAX, e in 2u64..1_000) {
        let r = coprime_part(n, e);
        prop_assert_eq!(n % r, 0);
        prop_assert_eq!(gcd(r, e), 1);
        let rest = factorize(n / r).unwrap();
        for p in rest.primes() {
            prop_assert_eq!(e % p, 0);
        }
    }

    #[test]
    fn divisors_are_exactly_once(n in 1u64..1u64 << 40) {
        let f = factorize(n).unwrap();
        let mut ds: Vec<u64> = f.divisors().collect();
        prop_assert_eq!(ds.len() as u64, f.num_divisors());
        prop_assert!(ds.iter().all(|d| n % d == 0));
        ds.sort_unstable();
        ds.dedup();
        prop_assert_eq!(ds.len() as u64, f.num_divisors());
    }

    #[test]
    fn order_divides_lambda(a in 2u64..1_000_000, b in 1u64..1u64 << 48) {
        prop_assume!(gcd(a, b) == 1);
        let t = mult_order(a, b).unwrap();
        prop_assert_eq!(arith::powmod(a, t, b), 1 % b);
        prop_assert_eq!(factorize(b).unwrap().carmichael_lambda() % t, 0);
    }

    #[test]
    fn progression_count_bounded_by_pi(k in 1u64..500, a in -500i64..500) {
        let x = 20_000.0;
        let c = count_primes_in_progression(x, k, a);
        prop_assert!(c.count <= prime_pi(x));
        let a0 = a.rem_euclid(k as i64) as u64;
        if gcd(a0, k) > 1 {
            prop_assert!(c.count <= 1);
        }
    }

    #[test]
    fn cycle_sum_is_integral_for_large_primes(start in 1u64 << 40..1u64 << 62, e in 2u64..20) {
        let p = (start..).find(|&n| is_prime(n)).unwrap();
        let r = cycle_count(&PowerMapInstance::prime_field(e, p).unwrap()).unwrap();
        prop_assert!(r.ratio_sum().is_integer());
        prop_assert_eq!(r.ratio_sum(), rational::from_int(r.n_cycles));
        let phi_sum: u64 = r.contributions.iter().map(|c| c.phi_d).sum();
        prop_assert_eq!(phi_sum, r.rho);
    }
}

#[test]
fn average_length_bounds_hold_for_many_primes() {
    for p in small_primes(20_000) {
        for e in [2u64, 3, 5, 12] {
            let c = average_cycle_length(&PowerMapInstance::prime_field(e, p).unwrap()).unwrap();
            assert!(c.lower <= c.value, "e={e} p={p}");
            assert!(c.value <= Rational::from_integer(c.upper as u128), "e={e} p={p}");
            assert_eq!(c.upper, order_star(e, p - 1).unwrap());
        }
    }
}

#[test]
fn rho_one_forces_a_single_cycle() {
    // Fermat primes: p - 1 is a power of 2
    for p in [3u64, 5, 17, 257, 65537] {
        let r = cycle_count(&PowerMapInstance::prime_field(2, p).unwrap()).unwrap();
        assert_eq!(r.rho, 1);
        assert_eq!(r.n_cycles, 1);
    }
}

#[test]
fn prime_power_fields_match_cyclic_model() {
    for p in small_primes(1_000) {
        for k in 1u32..=20 {
            let Some(q) = p.checked_pow(k) else { break };
            if q - 1 > 1_000_000 {
                break;
            }
            for e in [2u64, 3, 5, 6] {
                let inst = PowerMapInstance::new(e, p, k).unwrap();
                let formula = cycle_count(&inst).unwrap().n_cycles;
                let brute = brute_cycle_count_cyclic(e, q - 1).unwrap().n_cycles;
                assert_eq!(formula, brute, "e={e} q={p}^{k}");
            }
        }
    }
}

#[test]
fn field_cycle_lengths_match_orders() {
    for p in small_primes(3_000) {
        for e in 2u64..=10 {
            let g = brute_cycle_count_field(e, p).unwrap();
            let report = cycle_count(&PowerMapInstance::prime_field(e, p).unwrap()).unwrap();
            assert_eq!(g.cyclic_nodes, report.rho, "e={e} p={p}");
            // cycles of length ord_d(e) number phi(d) / ord_d(e) per divisor d
            let mut expected: Vec<u64> = report
                .contributions
                .iter()
                .flat_map(|c| std::iter::repeat_n(c.ord_d, (c.phi_d / c.ord_d) as usize))
                .collect();
            expected.sort_unstable();
            assert_eq!(g.cycle_lengths, expected, "e={e} p={p}");
            let iso = brute_cycle_count_cyclic(e, p - 1).unwrap();
            assert_eq!(iso.n_cycles, g.n_cycles);
        }
    }
}
