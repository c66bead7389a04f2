//! Sweeps over every prime p <= x: N(e, p) (and optionally C(e, p)) per
//! prime, aggregated and persisted as CSV or JSON lines.
//!
//! Primes are cut into blocks that workers claim in any order; results are
//! merged by block index, so output does not depend on the worker count.

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use crate::arith::{primes_up_to, Factorizer, OrderCache};
use crate::cycles::{average_cycle_length_with, cycle_total_with, PowerMapInstance};
use crate::error::{Error, Result};
use crate::hunt::log_ratio;
use crate::oracle::OracleCaps;
use crate::rational::{self, Rational};

pub const DEFAULT_BLOCK_PRIMES: usize = 1 << 16;
/// Exponent of the average-order benchmark x^0.293 printed next to the mean.
pub const BENCHMARK_EXPONENT: f64 = 0.293;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub p: u64,
    pub n_cycles: u64,
    /// ln N / ln p; 0 for p = 2.
    pub exponent: f64,
    #[serde(with = "rational::opt_pair")]
    pub c_value: Option<Rational>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub e: u64,
    pub x: f64,
    /// pi(x).
    pub count: u64,
    pub sum: u128,
    pub mean: f64,
    pub max_row: SweepRow,
    /// (mean, x^0.293), reported side by side and never compared.
    pub mean_vs_benchmark: (f64, f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepConfig {
    pub e: u64,
    pub x: f64,
    pub with_c: bool,
    pub workers: usize,
    pub block_primes: usize,
    pub factorizer: Factorizer,
}

impl SweepConfig {
    pub fn new(e: u64, x: f64) -> Self {
        SweepConfig {
            e,
            x,
            with_c: false,
            workers: 1,
            block_primes: DEFAULT_BLOCK_PRIMES,
            factorizer: Factorizer::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub rows: Vec<SweepRow>,
    pub summary: SweepSummary,
}

/// Runs `f` over every block with a pool of workers, each owning a state
/// built by `init`. Results come back in block order.
fn run_blocks<T, S>(
    blocks: &[&[u64]],
    workers: usize,
    init: impl Fn() -> S + Sync,
    f: impl Fn(&mut S, &[u64]) -> Result<T> + Sync,
) -> Result<Vec<T>>
where
    T: Send,
{
    if workers <= 1 || blocks.len() <= 1 {
        let mut state = init();
        return blocks.iter().map(|b| f(&mut state, b)).collect();
    }
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<Result<T>>>> =
        Mutex::new((0..blocks.len()).map(|_| None).collect());
    std::thread::scope(|scope| {
        for _ in 0..workers.min(blocks.len()) {
            scope.spawn(|| {
                let mut state = init();
                loop {
                    let i = next.fetch_add(1, Ordering::Relaxed);
                    if i >= blocks.len() {
                        break;
                    }
                    let out = f(&mut state, blocks[i]);
                    slots.lock().expect("worker panicked")[i] = Some(out);
                }
            });
        }
    });
    slots
        .into_inner()
        .expect("worker panicked")
        .into_iter()
        .map(|s| s.expect("every block is claimed"))
        .collect()
}

fn sweep_row(e: u64, p: u64, with_c: bool, cache: &mut OrderCache) -> Result<SweepRow> {
    let inst = PowerMapInstance::with_factorizer(e, p, 1, cache.factorizer())?;
    let n_cycles = cycle_total_with(&inst, cache)?;
    if n_cycles == 0 || n_cycles > p - 1 {
        return Err(Error::invariant(format!("N({e}, {p}) = {n_cycles} out of range")));
    }
    let c_value = if with_c {
        Some(average_cycle_length_with(&inst, cache)?.value)
    } else {
        None
    };
    Ok(SweepRow {
        p,
        n_cycles,
        exponent: log_ratio(n_cycles, p),
        c_value,
    })
}

pub fn sweep(cfg: &SweepConfig) -> Result<Sweep> {
    if cfg.e < 2 {
        return Err(Error::domain(format!("exponent e = {} must be at least 2", cfg.e)));
    }
    let primes: Vec<u64> = primes_up_to(cfg.x).collect();
    if primes.is_empty() {
        return Err(Error::EmptySweep(cfg.x));
    }
    let blocks: Vec<&[u64]> = primes.chunks(cfg.block_primes.max(1)).collect();
    let per_block = run_blocks(
        &blocks,
        cfg.workers,
        || OrderCache::new(cfg.factorizer),
        |cache, block| {
            block
                .iter()
                .map(|&p| sweep_row(cfg.e, p, cfg.with_c, cache))
                .collect::<Result<Vec<_>>>()
        },
    )?;
    let rows: Vec<SweepRow> = per_block.into_iter().flatten().collect();
    let summary = summarize(cfg.e, cfg.x, &rows)?;
    Ok(Sweep { rows, summary })
}

pub fn summarize(e: u64, x: f64, rows: &[SweepRow]) -> Result<SweepSummary> {
    let max_row = rows
        .iter()
        .max_by(|a, b| a.n_cycles.cmp(&b.n_cycles).then(b.p.cmp(&a.p)))
        .ok_or(Error::EmptySweep(x))?
        .clone();
    let sum: u128 = rows.iter().map(|r| r.n_cycles as u128).sum();
    let count = rows.len() as u64;
    let mean = sum as f64 / count as f64;
    Ok(SweepSummary {
        e,
        x,
        count,
        sum,
        mean,
        max_row,
        mean_vs_benchmark: (mean, x.powf(BENCHMARK_EXPONENT)),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub checked: u64,
    /// Rows above the brute-force cap.
    pub skipped: u64,
    /// (p, formula, brute force)
    pub mismatches: Vec<(u64, u64, u64)>,
}

impl VerifyReport {
    pub fn ok(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Recounts every row with p <= the field cap by brute force.
pub fn verify_rows(e: u64, rows: &[SweepRow], caps: &OracleCaps, workers: usize) -> Result<VerifyReport> {
    let chunk = 256;
    let ps: Vec<u64> = rows.iter().map(|r| r.p).collect();
    let blocks: Vec<&[u64]> = ps.chunks(chunk).collect();
    let brute = run_blocks(&blocks, workers, || (), |_, block| {
        block
            .iter()
            .map(|&p| {
                if p > caps.field {
                    Ok(None)
                } else {
                    caps.brute_cycle_count_field(e, p).map(|g| Some(g.n_cycles))
                }
            })
            .collect::<Result<Vec<_>>>()
    })?;
    let mut report = VerifyReport {
        checked: 0,
        skipped: 0,
        mismatches: Vec::new(),
    };
    for (row, b) in rows.iter().zip(brute.into_iter().flatten()) {
        match b {
            None => report.skipped += 1,
            Some(n) => {
                report.checked += 1;
                if n != row.n_cycles {
                    report.mismatches.push((row.p, row.n_cycles, n));
                }
            }
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub width: f64,
    /// Bucket index i covers [i * width, (i + 1) * width).
    pub buckets: BTreeMap<u64, u64>,
}

impl Histogram {
    pub fn total(&self) -> u64 {
        self.buckets.values().sum()
    }

    pub fn ranges(&self) -> impl Iterator<Item = (f64, f64, u64)> + '_ {
        self.buckets
            .iter()
            .map(|(&i, &c)| (i as f64 * self.width, (i + 1) as f64 * self.width, c))
    }
}

pub fn exponent_table<'a>(
    rows: impl IntoIterator<Item = &'a SweepRow>,
    bucket_width: f64,
) -> Result<Histogram> {
    if !(bucket_width > 0.0) || !bucket_width.is_finite() {
        return Err(Error::domain(format!("bucket width {bucket_width} must be positive")));
    }
    let mut buckets = BTreeMap::new();
    for r in rows {
        let i = (r.exponent / bucket_width).floor().max(0.0) as u64;
        *buckets.entry(i).or_insert(0) += 1;
    }
    Ok(Histogram {
        width: bucket_width,
        buckets,
    })
}

fn format_exponent(x: f64) -> String {
    format!("{x:.6}")
}

/// Columns `p,n_cycles,exponent`, plus `c_num,c_den` when any row has C.
pub fn write_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let with_c = rows.iter().any(|r| r.c_value.is_some());
    let mut w = csv::Writer::from_writer(out);
    if with_c {
        w.write_record(["p", "n_cycles", "exponent", "c_num", "c_den"])?;
    } else {
        w.write_record(["p", "n_cycles", "exponent"])?;
    }
    for r in rows {
        let mut rec = vec![r.p.to_string(), r.n_cycles.to_string(), format_exponent(r.exponent)];
        if with_c {
            let (num, den) = r
                .c_value
                .map_or((String::new(), String::new()), |c| {
                    (c.numer().to_string(), c.denom().to_string())
                });
            rec.push(num);
            rec.push(den);
        }
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<SweepRow>> {
    let mut rd = csv::Reader::from_reader(input);
    let headers = rd.headers()?.clone();
    let with_c = match headers.len() {
        3 => false,
        5 => true,
        n => return Err(Error::Io(format!("expected 3 or 5 columns, found {n}"))),
    };
    let field = |rec: &csv::StringRecord, i: usize| -> Result<String> {
        rec.get(i)
            .map(str::to_owned)
            .ok_or_else(|| Error::Io(format!("missing column {i}")))
    };
    let bad = |what: &str, s: &str| Error::Io(format!("bad {what}: {s:?}"));
    let mut rows = Vec::new();
    for rec in rd.records() {
        let rec = rec?;
        let p = field(&rec, 0)?;
        let n = field(&rec, 1)?;
        let x = field(&rec, 2)?;
        let c_value = if with_c {
            let (num, den) = (field(&rec, 3)?, field(&rec, 4)?);
            if num.is_empty() {
                None
            } else {
                let num: u128 = num.parse().map_err(|_| bad("c_num", &num))?;
                let den: u128 = den.parse().map_err(|_| bad("c_den", &den))?;
                if den == 0 {
                    return Err(bad("c_den", "0"));
                }
                Some(Rational::new(num, den))
            }
        } else {
            None
        };
        rows.push(SweepRow {
            p: p.parse().map_err(|_| bad("p", &p))?,
            n_cycles: n.parse().map_err(|_| bad("n_cycles", &n))?,
            exponent: x.parse().map_err(|_| bad("exponent", &x))?,
            c_value,
        });
    }
    Ok(rows)
}

#[derive(Serialize)]
struct JsonRow {
    p: u64,
    n: u64,
    exp: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    c: Option<[u128; 2]>,
}

/// One object per line: keys `p`, `n`, `exp`, and `c` as `[num, den]`.
pub fn write_jsonl<W: Write>(rows: &[SweepRow], mut out: W) -> Result<()> {
    for r in rows {
        let row = JsonRow {
            p: r.p,
            n: r.n_cycles,
            exp: format_exponent(r.exponent).parse().expect("formatted float"),
            c: r.c_value.map(|c| [*c.numer(), *c.denom()]),
        };
        serde_json::to_writer(&mut out, &row)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

pub fn write_summary<W: Write>(summary: &SweepSummary, mut out: W) -> Result<()> {
    serde_json::to_writer(&mut out, summary)?;
    out.write_all(b"\n")?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(e: u64, x: f64, workers: usize, block: usize, with_c: bool) -> Sweep {
        let cfg = SweepConfig {
            workers,
            block_primes: block,
            with_c,
            ..SweepConfig::new(e, x)
        };
        sweep(&cfg).unwrap()
    }

    #[test]
    fn sweep_examples() {
        let s = run(2, 10.0, 1, 1024, false);
        let got: Vec<(u64, u64)> = s.rows.iter().map(|r| (r.p, r.n_cycles)).collect();
        assert_eq!(got, vec![(2, 1), (3, 1), (5, 1), (7, 2)]);
        assert_eq!(s.summary.sum, 5);
        assert_eq!(s.summary.mean, 1.25);
        assert_eq!(s.rows[0].exponent, 0.0);

        // cubing: F_3^* has two fixed points; on F_5^* it permutes {1}, {4}, {2, 3}
        let s = run(3, 10.0, 1, 1024, false);
        let got: Vec<(u64, u64)> = s.rows.iter().map(|r| (r.p, r.n_cycles)).collect();
        assert_eq!(got, vec![(2, 1), (3, 2), (5, 3), (7, 2)]);
        for r in &s.rows {
            assert_eq!(
                crate::oracle::brute_cycle_count_field(3, r.p).unwrap().n_cycles,
                r.n_cycles
            );
        }

        assert!(matches!(sweep(&SweepConfig::new(2, 1.5)), Err(Error::EmptySweep(_))));
    }

    #[test]
    fn worker_count_does_not_change_output() {
        let a = run(2, 20_000.0, 1, 100, true);
        let b = run(2, 20_000.0, 4, 100, true);
        assert_eq!(a, b);
        let (mut ca, mut cb) = (Vec::new(), Vec::new());
        write_csv(&a.rows, &mut ca).unwrap();
        write_csv(&b.rows, &mut cb).unwrap();
        assert_eq!(ca, cb);
    }

    #[test]
    fn csv_round_trip_preserves_summary() {
        for with_c in [false, true] {
            let s = run(3, 5_000.0, 2, 64, with_c);
            let mut buf = Vec::new();
            write_csv(&s.rows, &mut buf).unwrap();
            let back = read_csv(buf.as_slice()).unwrap();
            assert_eq!(back.len(), s.rows.len());
            let again = summarize(3, 5_000.0, &back).unwrap();
            assert_eq!(again.sum, s.summary.sum);
            assert_eq!(again.count, s.summary.count);
            assert_eq!(again.max_row.p, s.summary.max_row.p);
            if with_c {
                assert_eq!(back[10].c_value, s.rows[10].c_value);
            }
        }
    }

    #[test]
    fn jsonl_lines_parse() {
        let s = run(2, 100.0, 1, 8, true);
        let mut buf = Vec::new();
        write_jsonl(&s.rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 25);
        let v: serde_json::Value = serde_json::from_str(lines[3]).unwrap();
        assert_eq!(v["p"], 7);
        assert_eq!(v["n"], 2);
        assert_eq!(v["c"], serde_json::json!([5, 3]));
    }

    #[test]
    fn histogram_examples() {
        assert!(exponent_table(&[], 0.1).unwrap().buckets.is_empty());
        let row = SweepRow {
            p: 31,
            n_cycles: 5,
            exponent: 0.469,
            c_value: None,
        };
        let h = exponent_table([&row], 0.1).unwrap();
        assert_eq!(h.buckets, BTreeMap::from([(4, 1)]));
        let (lo, hi, c) = h.ranges().next().unwrap();
        assert!((lo - 0.4).abs() < 1e-12 && (hi - 0.5).abs() < 1e-12 && c == 1);
        assert!(exponent_table([&row], 0.0).is_err());
    }

    #[test]
    fn verify_flags_mismatch() {
        let mut s = run(2, 1_000.0, 1, 50, false);
        let caps = OracleCaps::default();
        assert!(verify_rows(2, &s.rows, &caps, 3).unwrap().ok());
        s.rows[5].n_cycles += 1;
        let rep = verify_rows(2, &s.rows, &caps, 1).unwrap();
        assert_eq!(rep.mismatches.len(), 1);
        let small = OracleCaps { field: 100, cyclic: 100 };
        let rep = verify_rows(2, &s.rows, &small, 1).unwrap();
        assert_eq!(rep.checked, 25);
    }
}
