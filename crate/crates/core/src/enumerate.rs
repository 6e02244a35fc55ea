//! Enumeration of reduced-dynamics patterns, exact coverage ratios, and
//! the oracle cross-check of the pattern ↔ class bijection.
//!
//! The DFS walks the partition tree pruned by the ratio line: an I child
//! is always viable, an O child either stays above the line or terminates
//! a pattern. Coverage counts are computed independently by a lattice-path
//! DP over (CntI, CntO) profiles, which gives a second route to the same
//! per-length counts.

use std::collections::BTreeMap;
use std::fmt;

use serde::ser::SerializeStruct;
use serde::Serialize;

use crate::dynamics::{reduced_dynamics, RdOutcome};
use crate::error::{Error, Result};
use crate::form::{LineStatus, LineTracker};
use crate::nat::Nat;
use crate::residue::{ClassWalk, ResidueClass};
use crate::symbols::{DynString, Symbol};

/// Depth at which the DFS splits work across threads.
const FRONTIER_DEPTH: usize = 8;

/// A validated pattern with its residue class; the pattern covers a
/// 2^-len share of the positive integers.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct EnumRecord {
    pub pattern: DynString,
    pub class: ResidueClass,
}

impl EnumRecord {
    /// Natural density 2^-|pattern| as (numerator, log2 denominator).
    pub fn density(&self) -> (Nat, usize) {
        (Nat::ONE, self.pattern.len())
    }

    pub const CSV_HEADER: &'static str = "length,pattern,i,t,density_num,density_log2_den";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},1,{}",
            self.pattern.len(),
            self.pattern,
            self.class.i(),
            self.class.exponent(),
            self.pattern.len()
        )
    }
}

impl Serialize for EnumRecord {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("EnumRecord", 5)?;
        st.serialize_field("pattern", &self.pattern)?;
        st.serialize_field("i", self.class.i())?;
        st.serialize_field("t", &self.class.exponent())?;
        st.serialize_field("density_num", "1")?;
        st.serialize_field("density_log2_den", &self.pattern.len())?;
        st.end()
    }
}

/// Emits every terminal at exactly `target` depth under the given node.
fn dfs(target: usize, walk: &ClassWalk, prefix: &mut Vec<Symbol>, out: &mut Vec<EnumRecord>) {
    let depth = walk.depth;
    debug_assert!(depth < target);
    // an all-O tail is the fastest route to the line; prune when even that
    // cannot reach it in time
    let need = walk.tracker.threshold() - walk.o_count;
    if depth as u64 + need > target as u64 {
        return;
    }
    if depth + 1 < target {
        let mut child = walk.clone();
        child.step(Symbol::I);
        prefix.push(Symbol::I);
        dfs(target, &child, prefix, out);
        prefix.pop();
    }
    let mut child = walk.clone();
    child.step(Symbol::O);
    prefix.push(Symbol::O);
    match child.status() {
        LineStatus::Above => {
            if depth + 1 < target {
                dfs(target, &child, prefix, out);
            }
        }
        LineStatus::Terminal => {
            if depth + 1 == target {
                out.push(EnumRecord {
                    pattern: DynString::from_symbols(prefix.clone()),
                    class: child.class(),
                });
            }
        }
        LineStatus::Below => unreachable!("O child of a live node never crosses the line"),
    }
    prefix.pop();
}

/// All live (strictly-above) nodes at the given depth, in lexicographic
/// order of their prefixes.
fn live_frontier(depth: usize) -> Vec<(ClassWalk, Vec<Symbol>)> {
    fn go(depth: usize, walk: &ClassWalk, prefix: &mut Vec<Symbol>, out: &mut Vec<(ClassWalk, Vec<Symbol>)>) {
        if walk.depth == depth {
            out.push((walk.clone(), prefix.clone()));
            return;
        }
        let mut child = walk.clone();
        child.step(Symbol::I);
        prefix.push(Symbol::I);
        go(depth, &child, prefix, out);
        prefix.pop();
        let mut child = walk.clone();
        child.step(Symbol::O);
        if child.status() == LineStatus::Above {
            prefix.push(Symbol::O);
            go(depth, &child, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(depth, &ClassWalk::start(), &mut Vec::new(), &mut out);
    out
}

/// Every reduced-dynamics pattern of exactly this length, in
/// lexicographic order (I < O), each with its residue class.
pub fn forms_of_length(target: usize, threads: usize) -> Vec<EnumRecord> {
    assert!(target >= 1, "pattern length must be at least 1");
    let threads = threads.max(1);
    if threads == 1 || target <= FRONTIER_DEPTH + 1 {
        let mut out = Vec::new();
        dfs(target, &ClassWalk::start(), &mut Vec::new(), &mut out);
        return out;
    }
    let frontier = live_frontier(FRONTIER_DEPTH);
    let chunk_size = frontier.len().div_ceil(threads);
    let mut results: Vec<Vec<EnumRecord>> = Vec::new();
    std::thread::scope(|scope| {
        let handles: Vec<_> = frontier
            .chunks(chunk_size)
            .map(|chunk| {
                scope.spawn(move || {
                    let mut out = Vec::new();
                    for (walk, prefix) in chunk {
                        let mut prefix = prefix.clone();
                        dfs(target, walk, &mut prefix, &mut out);
                    }
                    out
                })
            })
            .collect();
        for handle in handles {
            results.push(handle.join().expect("enumeration worker panicked"));
        }
    });
    results.concat()
}

/// Streams every pattern with length ≤ max_len in (length, lexicographic)
/// order. Memory stays proportional to one length at a time.
pub fn enumerate_forms(max_len: usize) -> impl Iterator<Item = EnumRecord> {
    (1..=max_len).flat_map(|len| forms_of_length(len, 1))
}

/// Materialized multi-threaded variant of [`enumerate_forms`]; output is
/// identical for any thread count.
pub fn enumerate_forms_threaded(max_len: usize, threads: usize) -> Vec<EnumRecord> {
    (1..=max_len)
        .flat_map(|len| forms_of_length(len, threads))
        .collect()
}

/// One length's share of the coverage table. `r_num / 2^r_log2_den` is
/// the exact cumulative density of integers whose reduced dynamics has
/// length ≤ len, reduced to lowest terms.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CoverageRow {
    pub len: usize,
    pub count: Nat,
    pub r_num: Nat,
    pub r_log2_den: u64,
}

impl CoverageRow {
    pub fn r_float(&self) -> f64 {
        self.r_num.to_f64_lossy() / (self.r_log2_den as f64).exp2()
    }

    pub const CSV_HEADER: &'static str = "n,count_n,R_num,R_log2_den,R_float";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{}",
            self.len,
            self.count,
            self.r_num,
            self.r_log2_den,
            self.r_float()
        )
    }
}

impl Serialize for CoverageRow {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("CoverageRow", 5)?;
        st.serialize_field("n", &self.len)?;
        st.serialize_field("count_n", &self.count)?;
        st.serialize_field("R_num", &self.r_num)?;
        st.serialize_field("R_log2_den", &self.r_log2_den)?;
        st.serialize_field("R_float", &self.r_float())?;
        st.end()
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CoverageTable {
    pub rows: Vec<CoverageRow>,
}

impl CoverageTable {
    pub fn total(&self) -> &CoverageRow {
        self.rows.last().expect("coverage table is non-empty")
    }
}

/// Number of patterns of each length ≤ max_len, by lattice-path counting:
/// ways[a][b] counts strings with a I's and b O's whose every prefix is
/// strictly above the line; a pattern of length a + thr(a) closes the
/// path with one O. Independent of the DFS.
pub fn pattern_counts(max_len: usize) -> Vec<Nat> {
    let mut thresholds = Vec::with_capacity(max_len + 1);
    let mut tracker = LineTracker::new();
    thresholds.push(tracker.threshold());
    for _ in 0..max_len {
        tracker.push_i();
        thresholds.push(tracker.threshold());
    }

    let mut counts = vec![Nat::ZERO; max_len + 1];
    let mut ways: Vec<Vec<Nat>> = Vec::with_capacity(max_len + 1);
    for a in 0..=max_len {
        let width = thresholds[a] as usize;
        let mut row = vec![Nat::ZERO; width];
        for b in 0..width {
            let mut total = Nat::ZERO;
            if a == 0 && b == 0 {
                total = Nat::ONE;
            }
            if a >= 1 && (b as u64) < thresholds[a - 1] {
                total = &total + &ways[a - 1][b];
            }
            if b >= 1 {
                total = &total + &row[b - 1];
            }
            row[b] = total;
        }
        let close_len = a as u64 + thresholds[a];
        if close_len <= max_len as u64 && !row.is_empty() {
            let terminal_in = row[thresholds[a] as usize - 1].clone();
            counts[close_len as usize] = &counts[close_len as usize] + &terminal_in;
        }
        ways.push(row);
    }
    counts.remove(0);
    counts
}

/// Exact cumulative coverage ratios R(n) for n = 1..=max_len.
pub fn coverage(max_len: usize) -> CoverageTable {
    assert!((1..=60).contains(&max_len), "coverage supports 1..=60");
    let counts = pattern_counts(max_len);
    let mut rows = Vec::with_capacity(max_len);
    let mut num = Nat::ZERO; // running numerator over 2^len
    for (idx, count) in counts.iter().enumerate() {
        let len = idx + 1;
        num = &(&num << 1) + count;
        // reduce to lowest terms for the row
        let tz = num.trailing_zeros().unwrap_or(0).min(len as u64);
        rows.push(CoverageRow {
            len,
            count: count.clone(),
            r_num: &num >> tz,
            r_log2_den: len as u64 - tz,
        });
    }
    CoverageTable { rows }
}

/// Divergences between the DFS enumeration and the brute-force oracle.
#[derive(Clone, Debug, Default)]
pub struct MismatchReport {
    pub divergences: Vec<String>,
}

impl fmt::Display for MismatchReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} divergence(s)", self.divergences.len())?;
        for d in self.divergences.iter().take(10) {
            write!(f, "; {d}")?;
        }
        Ok(())
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct EnumCheckReport {
    pub max_len: usize,
    pub patterns: usize,
    pub integers_checked: u64,
}

/// Cross-checks `enumerate_forms(max_len)` against a brute-force oracle:
/// every integer in [2, 2^max_len) is grouped by its reduced dynamics and
/// the grouping must reproduce the enumerated pattern/class pairs exactly
/// (same patterns, same classes, with the full member count for each).
pub fn verify_enumeration(max_len: usize) -> Result<EnumCheckReport> {
    if !(1..=24).contains(&max_len) {
        return Err(Error::Domain(
            "verify_enumeration supports max_len in 1..=24".into(),
        ));
    }
    let enumerated: Vec<EnumRecord> = enumerate_forms(max_len).collect();
    let mut by_pattern: BTreeMap<DynString, &EnumRecord> = BTreeMap::new();
    let mut report = MismatchReport::default();
    for rec in &enumerated {
        if by_pattern.insert(rec.pattern.clone(), rec).is_some() {
            report
                .divergences
                .push(format!("pattern {} enumerated twice", rec.pattern));
        }
    }

    let bound = 1u64 << max_len;
    let mut observed: BTreeMap<DynString, u64> = BTreeMap::new();
    for x in 2..bound {
        let nat_x = Nat::from(x);
        match reduced_dynamics(&nat_x, max_len as u64)? {
            RdOutcome::Found(s) => match by_pattern.get(&s) {
                Some(rec) => {
                    if !rec.class.contains(&nat_x) {
                        report.divergences.push(format!(
                            "x = {x}: reduced dynamics {s} but x not in {}",
                            rec.class
                        ));
                    }
                    *observed.entry(s).or_insert(0) += 1;
                }
                None => report
                    .divergences
                    .push(format!("x = {x}: pattern {s} missing from enumeration")),
            },
            RdOutcome::BudgetExhausted { .. } => {
                // |RD[x]| > max_len: x belongs to no class of this table
            }
        }
    }

    for rec in &enumerated {
        let t = rec.class.exponent() as u64;
        let rep = rec.class.representative();
        let rep = rep.to_u64().expect("representative fits: t <= 24");
        // members of the class in [2, 2^max_len)
        let mut expected = if rep < bound { (bound - 1 - rep) / (1 << t) + 1 } else { 0 };
        if rep == 1 {
            expected -= 1; // x = 1 is outside the reduced-dynamics domain
        }
        let got = observed.get(&rec.pattern).copied().unwrap_or(0);
        if got != expected {
            report.divergences.push(format!(
                "pattern {} ({}): oracle found {got} members, expected {expected}",
                rec.pattern, rec.class
            ));
        }
    }

    if report.divergences.is_empty() {
        Ok(EnumCheckReport {
            max_len,
            patterns: enumerated.len(),
            integers_checked: bound - 2,
        })
    } else {
        Err(Error::EnumerationMismatch(Box::new(report)))
    }
}
