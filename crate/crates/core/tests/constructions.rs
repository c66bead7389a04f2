use powermap::arith::{gcd, mult_order, simple_sieve, Factorizer};
use powermap::cycles::{cycle_count, PowerMapInstance};
use powermap::hunt::{build_construction, hunt_average, hunt_large, hunt_prime_power, LargeHunt};
use powermap::rational::{self, Rational};

fn trial_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

#[test]
fn average_hunt_guarantee_on_a_rich_construction() {
    let h = hunt_average(2, 1e6, 3.0, 1e7, 5).unwrap();
    assert_eq!(h.products.len(), 5);
    assert!(h.records.len() > 1000);
    let (lo, hi) = h.params.product_window();
    for &m in &h.products {
        let m_f = m as f64;
        assert!(m_f >= lo * (1.0 - 1e-12) && m_f <= hi * (1.0 + 1e-12));
        assert_eq!(h.params.m_v % mult_order(2, m).unwrap(), 0);
    }
    for r in h.records.iter().step_by(17) {
        assert_eq!((r.p - 1) % r.m, 0);
        let report = cycle_count(&PowerMapInstance::prime_field(2, r.p).unwrap()).unwrap();
        assert_eq!(report.n_cycles, r.n_cycles);
        let phi_m = powermap::arith::factorize(r.m).unwrap().euler_phi();
        let ord = mult_order(2, r.m).unwrap();
        assert_eq!(r.guaranteed_lower, Rational::new(phi_m as u128, ord as u128));
        assert!(rational::from_int(r.n_cycles) >= r.guaranteed_lower);
    }
}

#[test]
fn construction_membership_rechecked_by_interval_sieve() {
    for (e, u, kappa) in [(2u64, 1e6, 3.0), (3, 1e9, 2.0), (2, 1e12, 1.5), (10, 1e8, 4.0)] {
        let c = build_construction(e, u, kappa).unwrap();
        let by_sieve: Vec<u64> = simple_sieve(c.w.floor() as u64)
            .into_iter()
            .filter(|&r| r as f64 >= c.lower && c.m_v % (r - 1) == 0 && e % r != 0)
            .collect();
        assert_eq!(c.q, by_sieve, "e={e} u={u} kappa={kappa}");
        for &r in &c.q {
            assert!(trial_prime(r));
        }
    }
}

#[test]
fn kappa_enlarges_q_monotonically() {
    let mut prev = 0;
    for kappa in [0.5, 1.0, 2.0, 4.0, 8.0] {
        let c = build_construction(2, 1e10, kappa).unwrap();
        assert!(c.q.len() >= prev);
        prev = c.q.len();
    }
}

#[test]
fn large_hunt_for_other_exponents() {
    for e in [3u64, 5, 10] {
        for row in hunt_large(e, 1, 8, 100_000_000).unwrap() {
            if let LargeHunt::Found(r) = row {
                assert_eq!(gcd(r.m, e), 1);
                assert_eq!(mult_order(e, r.m).unwrap(), r.k);
                assert!(rational::from_int(r.n_cycles) >= r.guaranteed_lower);
            }
        }
    }
}

#[test]
fn prime_power_records_respect_lambda_chain() {
    let f = Factorizer::default();
    for (e, p, v) in [(2u64, 3u64, 6u64), (3, 2, 6), (2, 5, 8)] {
        let recs = hunt_prime_power(e, p, v, 3, 200, &f).unwrap();
        assert!(!recs.is_empty());
        let m_v = powermap::arith::lcm_up_to(v).unwrap();
        for r in &recs {
            assert_eq!(m_v % r.lambda_m, 0);
            assert_eq!(r.lambda_m % r.k, 0);
            assert_eq!(gcd(r.m, e * p), 1);
            if let Some(n) = r.verified_n {
                assert!(rational::from_int(n) >= r.bound);
            }
        }
    }
}
