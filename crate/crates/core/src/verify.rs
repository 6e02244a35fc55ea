//! Convergence verification: single integers driven to 1 with exact step
//! counters, checkpoint/resume for long runs, and data-parallel range
//! scans with a deterministic merge.
//!
//! Counter conventions: `cnt_i`/`cnt_o` count combined transformations;
//! in classic-rule terms the same run does `cnt_i` 3x+1 computations and
//! `cnt_i + cnt_o` halvings (every I embeds one halving).

use std::collections::BTreeMap;
use std::path::Path;
use std::time::{Duration, Instant};

use serde::Serialize;

use crate::dynamics::{reduced_dynamics, RdOutcome};
use crate::error::{Error, Result};
use crate::nat::Nat;
use crate::steps::classic_step;
use crate::word::{self, Word};

/// Default combined-step budget for a single integer.
pub const DEFAULT_VERIFY_BUDGET: u64 = 10_000_000;
/// Default per-integer budget inside range scans.
pub const DEFAULT_RANGE_BUDGET: u64 = 10_000;

const CHECKPOINT_MAGIC: &[u8; 5] = b"CRTK1";

/// Resumable state of a single-integer descent. Each step is one
/// combined transformation; runs of halvings are batched through the
/// 2-adic valuation, which leaves the counters exactly as if stepped
/// one at a time.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct VerifySession {
    value: Nat,
    cnt_i: u64,
    cnt_o: u64,
}

impl VerifySession {
    pub fn new(x: &Nat) -> Result<VerifySession> {
        if x.is_zero() {
            return Err(Error::Domain("verification requires x >= 1".into()));
        }
        Ok(VerifySession {
            value: x.clone(),
            cnt_i: 0,
            cnt_o: 0,
        })
    }

    pub fn value(&self) -> &Nat {
        &self.value
    }

    pub fn cnt_i(&self) -> u64 {
        self.cnt_i
    }

    pub fn cnt_o(&self) -> u64 {
        self.cnt_o
    }

    pub fn steps_taken(&self) -> u64 {
        self.cnt_i + self.cnt_o
    }

    /// Done means the trajectory has returned to 1. A start at 1 is not
    /// done until it has gone around (its descent is IO).
    pub fn is_done(&self) -> bool {
        self.value.is_one() && self.steps_taken() > 0
    }

    /// Runs at most `max_steps` combined steps, stopping at 1. Returns the
    /// number of steps actually taken.
    pub fn advance(&mut self, max_steps: u64) -> u64 {
        let mut taken = 0u64;
        while taken < max_steps && !self.is_done() {
            let left = max_steps - taken;
            if self.value.is_odd() {
                let y = self.value.mul3_add1();
                let run = y.trailing_zeros().expect("3x+1 is positive");
                // I plus run-1 trailing O steps
                if run <= left {
                    self.value = &y >> run;
                    self.cnt_i += 1;
                    self.cnt_o += run - 1;
                    taken += run;
                } else {
                    self.value = &y >> left;
                    self.cnt_i += 1;
                    self.cnt_o += left - 1;
                    taken += left;
                }
            } else {
                let run = self.value.trailing_zeros().expect("value is positive");
                let step = run.min(left);
                self.value = &self.value >> step;
                self.cnt_o += step;
                taken += step;
            }
        }
        taken
    }

    pub fn run(&mut self, budget: u64) -> bool {
        let left = budget.saturating_sub(self.steps_taken());
        self.advance(left);
        self.is_done()
    }

    /// Checkpoint layout: magic, u64-be value length, value bytes
    /// (big-endian), u64-be cnt_i, u64-be cnt_o, CRC32 of everything
    /// before.
    pub fn to_checkpoint_bytes(&self) -> Vec<u8> {
        let value_bytes = self.value.to_bytes_be();
        let mut out = Vec::with_capacity(value_bytes.len() + 33);
        out.extend_from_slice(CHECKPOINT_MAGIC);
        out.extend_from_slice(&(value_bytes.len() as u64).to_be_bytes());
        out.extend_from_slice(&value_bytes);
        out.extend_from_slice(&self.cnt_i.to_be_bytes());
        out.extend_from_slice(&self.cnt_o.to_be_bytes());
        let crc = crc32fast::hash(&out);
        out.extend_from_slice(&crc.to_be_bytes());
        out
    }

    pub fn from_checkpoint_bytes(bytes: &[u8]) -> Result<VerifySession> {
        let corrupt = |msg: &str| Error::CorruptState(msg.to_string());
        if bytes.len() < CHECKPOINT_MAGIC.len() + 8 {
            return Err(corrupt("truncated header"));
        }
        if &bytes[..5] != CHECKPOINT_MAGIC {
            return Err(corrupt("bad magic"));
        }
        let value_len = u64::from_be_bytes(bytes[5..13].try_into().unwrap()) as usize;
        let expected_len = 13 + value_len + 8 + 8 + 4;
        if bytes.len() != expected_len {
            return Err(corrupt("length mismatch"));
        }
        let crc_at = expected_len - 4;
        let stored = u32::from_be_bytes(bytes[crc_at..].try_into().unwrap());
        if crc32fast::hash(&bytes[..crc_at]) != stored {
            return Err(corrupt("checksum mismatch"));
        }
        let value = Nat::from_bytes_be(&bytes[13..13 + value_len]);
        if value.is_zero() {
            return Err(corrupt("value must be positive"));
        }
        let cnt_i = u64::from_be_bytes(bytes[13 + value_len..21 + value_len].try_into().unwrap());
        let cnt_o = u64::from_be_bytes(bytes[21 + value_len..29 + value_len].try_into().unwrap());
        Ok(VerifySession {
            value,
            cnt_i,
            cnt_o,
        })
    }

    /// Atomic write: temp file in the same directory, then rename.
    pub fn save_checkpoint(&self, path: &Path) -> Result<()> {
        let tmp = path.with_extension("tmp");
        std::fs::write(&tmp, self.to_checkpoint_bytes())?;
        std::fs::rename(&tmp, path)?;
        Ok(())
    }

    pub fn load_checkpoint(path: &Path) -> Result<VerifySession> {
        Self::from_checkpoint_bytes(&std::fs::read(path)?)
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct VerifyReport {
    pub x: Nat,
    pub reached_one: bool,
    pub cnt_i: u64,
    pub cnt_o: u64,
    pub total_len: u64,
    pub classic_odd_steps: u64,
    pub classic_halvings: u64,
    /// Bits of the final value (1 when done; the stall point on budget
    /// exhaustion).
    pub final_bit_length: u64,
    pub oracle_checked: bool,
    #[serde(skip)]
    pub elapsed: Duration,
}

impl VerifyReport {
    fn from_session(x: Nat, session: &VerifySession, oracle_checked: bool, elapsed: Duration) -> VerifyReport {
        VerifyReport {
            x,
            reached_one: session.is_done(),
            cnt_i: session.cnt_i(),
            cnt_o: session.cnt_o(),
            total_len: session.steps_taken(),
            classic_odd_steps: session.cnt_i(),
            classic_halvings: session.steps_taken(),
            final_bit_length: session.value().bit_length(),
            oracle_checked,
            elapsed,
        }
    }
}

/// Drives x to 1 (or exhausts the budget) counting combined steps.
pub fn verify_to_one(x: &Nat, budget: u64) -> Result<VerifyReport> {
    let started = Instant::now();
    let mut session = VerifySession::new(x)?;
    session.run(budget);
    Ok(VerifyReport::from_session(
        x.clone(),
        &session,
        false,
        started.elapsed(),
    ))
}

/// Independent descent using only the textbook rule, one classic step at
/// a time. Returns (odd steps, halvings), or `None` if the classic-step
/// budget runs out.
pub fn classic_descent(x: &Nat, max_classic_steps: u64) -> Result<Option<(u64, u64)>> {
    if x.is_zero() {
        return Err(Error::Domain("verification requires x >= 1".into()));
    }
    let mut value = x.clone();
    let mut odd_steps = 0u64;
    let mut halvings = 0u64;
    for _ in 0..max_classic_steps {
        if value.is_odd() {
            odd_steps += 1;
        } else {
            halvings += 1;
        }
        value = classic_step(&value)?;
        if value.is_one() {
            return Ok(Some((odd_steps, halvings)));
        }
    }
    Ok(None)
}

/// Like [`verify_to_one`], re-running with the classic rule and checking
/// that the counters agree (odd steps = cnt_i, halvings = cnt_i + cnt_o).
pub fn verify_to_one_with_oracle(x: &Nat, budget: u64) -> Result<VerifyReport> {
    let started = Instant::now();
    let mut session = VerifySession::new(x)?;
    session.run(budget);
    let mut checked = false;
    if session.is_done() {
        let classic = classic_descent(x, budget.saturating_mul(2).saturating_add(2))?
            .ok_or_else(|| Error::Domain("classic oracle exhausted its budget".into()))?;
        if classic != (session.cnt_i(), session.steps_taken()) {
            return Err(Error::Domain(format!(
                "oracle disagreement for {x}: classic {classic:?} vs combined ({}, {})",
                session.cnt_i(),
                session.steps_taken()
            )));
        }
        checked = true;
    }
    Ok(VerifyReport::from_session(
        x.clone(),
        &session,
        checked,
        started.elapsed(),
    ))
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct RangeConfig {
    /// Combined-step budget per integer.
    pub budget: u64,
    pub threads: usize,
    /// Verify full descent to 1 instead of first descent.
    pub full: bool,
}

impl Default for RangeConfig {
    fn default() -> Self {
        RangeConfig {
            budget: DEFAULT_RANGE_BUDGET,
            threads: 1,
            full: false,
        }
    }
}

/// Aggregate over a range; identical for any worker count.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct RangeReport {
    pub a: Nat,
    pub b: Nat,
    pub full: bool,
    pub total: u64,
    pub found: u64,
    /// Integers whose search exhausted the budget, ascending.
    pub exhausted: Vec<Nat>,
    /// Longest dynamics seen (reduced, or full descent with `full`).
    pub max_len: u64,
    /// Smallest integer attaining `max_len`.
    pub argmax: Nat,
    /// length -> how many integers in the range have it.
    pub histogram: BTreeMap<u64, u64>,
}

enum ScanResult {
    Found(u64),
    Overflow,
    Exhausted,
    Cycle,
}

fn scan_reduced<W: Word>(x: W, budget: u64) -> ScanResult {
    let mut v = x;
    let mut len = 0u64;
    while len < budget {
        let Some((next, _)) = word::combined_step(v) else {
            return ScanResult::Overflow;
        };
        v = next;
        len += 1;
        if v < x {
            return ScanResult::Found(len);
        }
        if v == x {
            return ScanResult::Cycle;
        }
    }
    ScanResult::Exhausted
}

fn scan_full<W: Word>(x: W, budget: u64) -> ScanResult {
    let mut v = x;
    let mut len = 0u64;
    while len < budget {
        let Some((next, _)) = word::combined_step(v) else {
            return ScanResult::Overflow;
        };
        v = next;
        len += 1;
        if v == W::one() {
            return ScanResult::Found(len);
        }
    }
    ScanResult::Exhausted
}

/// Reduced-dynamics length of x within the budget, in the narrowest lane
/// that fits (u64 → u128 → Nat).
fn measure(x: &Nat, budget: u64, full: bool) -> Result<Option<u64>> {
    if let Some(w) = x.to_u64().filter(|&w| w < 1 << 32) {
        match if full { scan_full(w, budget) } else { scan_reduced(w, budget) } {
            ScanResult::Found(len) => return Ok(Some(len)),
            ScanResult::Exhausted => return Ok(None),
            ScanResult::Cycle => {
                return Err(Error::CycleAnomaly {
                    start: x.clone(),
                    steps: 0,
                })
            }
            ScanResult::Overflow => {}
        }
    }
    if let Some(w) = x.to_u128() {
        match if full { scan_full(w, budget) } else { scan_reduced(w, budget) } {
            ScanResult::Found(len) => return Ok(Some(len)),
            ScanResult::Exhausted => return Ok(None),
            ScanResult::Cycle => {
                return Err(Error::CycleAnomaly {
                    start: x.clone(),
                    steps: 0,
                })
            }
            ScanResult::Overflow => {}
        }
    }
    if full {
        let mut session = VerifySession::new(x)?;
        Ok(session.run(budget).then(|| session.steps_taken()))
    } else {
        match reduced_dynamics(x, budget)? {
            RdOutcome::Found(s) => Ok(Some(s.len() as u64)),
            RdOutcome::BudgetExhausted { .. } => Ok(None),
        }
    }
}

struct ChunkReport {
    exhausted: Vec<Nat>,
    max: Option<(u64, Nat)>,
    histogram: BTreeMap<u64, u64>,
}

fn scan_chunk(start: &Nat, count: u64, budget: u64, full: bool) -> Result<ChunkReport> {
    let mut report = ChunkReport {
        exhausted: Vec::new(),
        max: None,
        histogram: BTreeMap::new(),
    };
    let mut x = start.clone();
    for _ in 0..count {
        match measure(&x, budget, full)? {
            Some(len) => {
                *report.histogram.entry(len).or_insert(0) += 1;
                if report.max.as_ref().is_none_or(|(best, _)| len > *best) {
                    report.max = Some((len, x.clone()));
                }
            }
            None => report.exhausted.push(x.clone()),
        }
        x += 1;
    }
    Ok(report)
}

/// Verifies every integer in [a, b]: first descent by default, full
/// descent to 1 with `full`. Work splits into contiguous chunks across
/// threads and merges back in order, so the aggregate does not depend on
/// the worker count.
pub fn verify_range(a: &Nat, b: &Nat, config: &RangeConfig) -> Result<RangeReport> {
    if (!config.full && *a < 2u64) || a.is_zero() {
        return Err(Error::Domain(if config.full {
            "verify_range requires a >= 1".into()
        } else {
            "verify_range requires a >= 2".into()
        }));
    }
    if a > b {
        return Err(Error::Domain("verify_range requires a <= b".into()));
    }
    let total = b
        .checked_sub(a)
        .and_then(|d| d.to_u64())
        .and_then(|d| d.checked_add(1))
        .ok_or_else(|| Error::Domain("range size must fit in 64 bits".into()))?;

    let threads = config.threads.max(1).min(total.max(1) as usize);
    let chunk = total.div_ceil(threads as u64);
    let mut chunks = Vec::new();
    let mut offset = 0u64;
    while offset < total {
        let count = chunk.min(total - offset);
        chunks.push((a + &Nat::from(offset), count));
        offset += count;
    }

    let mut partials: Vec<ChunkReport> = Vec::with_capacity(chunks.len());
    if threads == 1 {
        for (start, count) in &chunks {
            partials.push(scan_chunk(start, *count, config.budget, config.full)?);
        }
    } else {
        let budget = config.budget;
        let full = config.full;
        let mut joined: Vec<Result<ChunkReport>> = Vec::with_capacity(chunks.len());
        std::thread::scope(|scope| {
            let handles: Vec<_> = chunks
                .iter()
                .map(|(start, count)| {
                    scope.spawn(move || scan_chunk(start, *count, budget, full))
                })
                .collect();
            for handle in handles {
                joined.push(handle.join().expect("range worker panicked"));
            }
        });
        for r in joined {
            partials.push(r?);
        }
    }

    let mut report = RangeReport {
        a: a.clone(),
        b: b.clone(),
        full: config.full,
        total,
        found: 0,
        exhausted: Vec::new(),
        max_len: 0,
        argmax: Nat::ZERO,
        histogram: BTreeMap::new(),
    };
    let mut best: Option<(u64, Nat)> = None;
    for partial in partials {
        report.exhausted.extend(partial.exhausted);
        for (len, n) in partial.histogram {
            *report.histogram.entry(len).or_insert(0) += n;
        }
        if let Some((len, x)) = partial.max {
            if best.as_ref().is_none_or(|(b, _)| len > *b) {
                best = Some((len, x));
            }
        }
    }
    if let Some((len, x)) = best {
        report.max_len = len;
        report.argmax = x;
    }
    report.found = total - report.exhausted.len() as u64;
    Ok(report)
}
