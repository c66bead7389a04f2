//! Brute-force ground truth: build the functional graph and look at it.
//!
//! Two graphs are available. The field graph is x -> x^e mod p on
//! {1, ..., p-1}. The cyclic model is t -> e*t mod n on {0, ..., n-1},
//! which is isomorphic to the field graph with n = q - 1 and needs no
//! field arithmetic, so it also covers prime powers.

use serde::{Deserialize, Serialize};

use crate::arith::{is_prime, mulmod, powmod};
use crate::error::{Error, Result};
use crate::rational::Rational;

pub const DEFAULT_FIELD_CAP: u64 = 1_000_000;
pub const DEFAULT_CYCLIC_CAP: u64 = 10_000_000;

/// Largest instances the brute-force routines accept.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleCaps {
    pub field: u64,
    pub cyclic: u64,
}

impl Default for OracleCaps {
    fn default() -> Self {
        OracleCaps {
            field: DEFAULT_FIELD_CAP,
            cyclic: DEFAULT_CYCLIC_CAP,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphSummary {
    pub n_nodes: u64,
    pub n_cycles: u64,
    /// Sorted ascending.
    pub cycle_lengths: Vec<u64>,
    pub cyclic_nodes: u64,
}

impl OracleCaps {
    fn check_field(&self, e: u64, p: u64) -> Result<()> {
        if e < 2 {
            return Err(Error::domain(format!("exponent e = {e} must be at least 2")));
        }
        if !is_prime(p) {
            return Err(Error::domain(format!("{p} is not prime")));
        }
        if p > self.field {
            return Err(Error::CapExceeded {
                what: "p",
                value: p,
                cap: self.field,
            });
        }
        Ok(())
    }

    pub fn brute_cycle_count_field(&self, e: u64, p: u64) -> Result<GraphSummary> {
        self.check_field(e, p)?;
        // node i stands for the field element i + 1
        Ok(census(p - 1, |i| powmod(i + 1, e, p) - 1))
    }

    pub fn brute_cycle_count_cyclic(&self, e: u64, n: u64) -> Result<GraphSummary> {
        if e < 2 {
            return Err(Error::domain(format!("exponent e = {e} must be at least 2")));
        }
        if n == 0 {
            return Err(Error::domain("group order must be positive"));
        }
        if n > self.cyclic {
            return Err(Error::CapExceeded {
                what: "n",
                value: n,
                cap: self.cyclic,
            });
        }
        Ok(census(n, |t| mulmod(e, t, n)))
    }

    pub fn eventual_cycle_length(&self, e: u64, p: u64, seed: u64) -> Result<u64> {
        self.check_field(e, p)?;
        if seed == 0 || seed >= p {
            return Err(Error::domain(format!("seed {seed} outside [1, {}]", p - 1)));
        }
        Ok(brent_cycle_length(seed, |x| powmod(x, e, p)))
    }

    /// Eventual cycle length of every seed 1..p-1, indexed by seed - 1.
    pub fn eventual_cycle_lengths(&self, e: u64, p: u64) -> Result<Vec<u64>> {
        self.check_field(e, p)?;
        Ok(label_cycle_lengths(p - 1, |i| powmod(i + 1, e, p) - 1))
    }

    pub fn brute_average_cycle_length(&self, e: u64, p: u64) -> Result<Rational> {
        let labels = self.eventual_cycle_lengths(e, p)?;
        let total: u128 = labels.iter().map(|&l| l as u128).sum();
        Ok(Rational::new(total, (p - 1) as u128))
    }
}

pub fn brute_cycle_count_field(e: u64, p: u64) -> Result<GraphSummary> {
    OracleCaps::default().brute_cycle_count_field(e, p)
}

pub fn brute_cycle_count_cyclic(e: u64, n: u64) -> Result<GraphSummary> {
    OracleCaps::default().brute_cycle_count_cyclic(e, n)
}

pub fn eventual_cycle_length(e: u64, p: u64, seed: u64) -> Result<u64> {
    OracleCaps::default().eventual_cycle_length(e, p, seed)
}

pub fn brute_average_cycle_length(e: u64, p: u64) -> Result<Rational> {
    OracleCaps::default().brute_average_cycle_length(e, p)
}

const UNSEEN: u32 = 0;

/// One pass over all nodes, marking each walk with its own stamp; a walk
/// that runs into its own stamp has closed a new cycle.
fn census(n: u64, f: impl Fn(u64) -> u64) -> GraphSummary {
    let mut stamp = vec![UNSEEN; n as usize];
    let mut lengths = Vec::new();
    for start in 0..n {
        if stamp[start as usize] != UNSEEN {
            continue;
        }
        let run = start as u32 + 1;
        let mut x = start;
        while stamp[x as usize] == UNSEEN {
            stamp[x as usize] = run;
            x = f(x);
        }
        if stamp[x as usize] == run {
            let mut len = 1;
            let mut y = f(x);
            while y != x {
                y = f(y);
                len += 1;
            }
            lengths.push(len);
        }
    }
    lengths.sort_unstable();
    GraphSummary {
        n_nodes: n,
        n_cycles: lengths.len() as u64,
        cyclic_nodes: lengths.iter().sum(),
        cycle_lengths: lengths,
    }
}

fn label_cycle_lengths(n: u64, f: impl Fn(u64) -> u64) -> Vec<u64> {
    let mut label = vec![0u64; n as usize];
    let mut stamp = vec![UNSEEN; n as usize];
    let mut path = Vec::new();
    for start in 0..n {
        if label[start as usize] != 0 {
            continue;
        }
        let run = start as u32 + 1;
        path.clear();
        let mut x = start;
        while label[x as usize] == 0 && stamp[x as usize] != run {
            stamp[x as usize] = run;
            path.push(x);
            x = f(x);
        }
        if label[x as usize] == 0 {
            // closed a new cycle at x
            let mut len = 1;
            let mut y = f(x);
            while y != x {
                y = f(y);
                len += 1;
            }
            label[x as usize] = len;
            let mut y = f(x);
            while y != x {
                label[y as usize] = len;
                y = f(y);
            }
        }
        let len = label[x as usize];
        for &v in &path {
            label[v as usize] = len;
        }
    }
    label
}

// Brent's cycle finding: returns the cycle length only.
fn brent_cycle_length(x0: u64, f: impl Fn(u64) -> u64) -> u64 {
    let mut power = 1u64;
    let mut lam = 1u64;
    let mut tortoise = x0;
    let mut hare = f(x0);
    while tortoise != hare {
        if power == lam {
            tortoise = hare;
            power *= 2;
            lam = 0;
        }
        hare = f(hare);
        lam += 1;
    }
    lam
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_census_examples() {
        let g = brute_cycle_count_field(2, 3).unwrap();
        assert_eq!((g.n_cycles, g.cycle_lengths.clone()), (1, vec![1]));
        let g = brute_cycle_count_field(2, 7).unwrap();
        assert_eq!((g.n_cycles, g.cycle_lengths.clone()), (2, vec![1, 2]));
        assert_eq!(brute_cycle_count_field(2, 31).unwrap().n_cycles, 5);
        let g = brute_cycle_count_field(3, 7).unwrap();
        assert_eq!(g.cycle_lengths, vec![1, 1]);
    }

    #[test]
    fn cyclic_census_examples() {
        let g = brute_cycle_count_cyclic(2, 2).unwrap();
        assert_eq!((g.n_cycles, g.cycle_lengths.clone()), (1, vec![1]));
        assert_eq!(brute_cycle_count_cyclic(2, 6).unwrap().n_cycles, 2);
        assert_eq!(brute_cycle_count_cyclic(3, 6).unwrap().n_cycles, 2);
        assert_eq!(brute_cycle_count_cyclic(2, 1).unwrap().n_cycles, 1);
    }

    #[test]
    fn eventual_length_examples() {
        assert_eq!(eventual_cycle_length(2, 7, 1).unwrap(), 1);
        assert_eq!(eventual_cycle_length(2, 7, 3).unwrap(), 2);
        // 3 -> 9 -> 19 -> 20 -> 28 -> 9
        assert_eq!(eventual_cycle_length(2, 31, 3).unwrap(), 4);
        assert!(eventual_cycle_length(2, 7, 7).is_err());
        assert!(eventual_cycle_length(2, 7, 0).is_err());
    }

    #[test]
    fn average_examples() {
        assert_eq!(brute_average_cycle_length(2, 3).unwrap(), Rational::from_integer(1));
        assert_eq!(brute_average_cycle_length(2, 7).unwrap(), Rational::new(5, 3));
        assert_eq!(brute_average_cycle_length(3, 7).unwrap(), Rational::from_integer(1));
    }

    #[test]
    fn labels_agree_with_per_seed_search() {
        let caps = OracleCaps::default();
        for p in [3u64, 5, 7, 11, 31, 97, 101, 257, 1009] {
            for e in [2u64, 3, 5] {
                let labels = caps.eventual_cycle_lengths(e, p).unwrap();
                for x in 1..p {
                    assert_eq!(
                        labels[(x - 1) as usize],
                        caps.eventual_cycle_length(e, p, x).unwrap()
                    );
                }
            }
        }
    }

    #[test]
    fn caps_are_enforced() {
        let caps = OracleCaps { field: 100, cyclic: 100 };
        assert!(matches!(
            caps.brute_cycle_count_field(2, 101),
            Err(Error::CapExceeded { .. })
        ));
        assert!(matches!(
            caps.brute_cycle_count_cyclic(2, 101),
            Err(Error::CapExceeded { .. })
        ));
        assert!(caps.brute_cycle_count_field(2, 9).is_err());
    }
}
