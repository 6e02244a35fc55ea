//! Exact reduced-form validation against the ratio line λ = log₂(3/2).
//!
//! A string over {I, O} is a reduced-dynamics pattern exactly when its
//! O-count first reaches ⌈λ·CntI⌉ at the final symbol (the single string
//! O being the even-integer pattern). λ is irrational, so every decision
//! here compares integer powers of 2 and 3; no floating point anywhere.

use crate::nat::Nat;
use crate::symbols::{DynString, Symbol};

/// ⌈k·log₂(3/2)⌉, computed exactly: for k ≥ 1 this is the least m with
/// 2^(k+m) > 3^k, i.e. bits(3^k) − k; k·λ is irrational so the strict
/// form is the ceiling.
pub fn ceil_lambda(k: u64) -> u64 {
    if k == 0 {
        0
    } else {
        Nat::three_pow(k).bit_length() - k
    }
}

/// Where a prefix with the given symbol counts sits relative to the
/// termination threshold.
#[derive(Copy, Clone, PartialEq, Eq, Debug)]
pub enum LineStatus {
    /// Strictly above the line: a viable reduced-dynamics prefix.
    Above,
    /// Exactly on the line: a complete pattern ends here.
    Terminal,
    /// Past the line: no reduced dynamics continues through here.
    Below,
}

/// Incrementally maintained termination threshold for a growing I-count.
///
/// `threshold()` is ⌈k·λ⌉ for k ≥ 1 and 1 for k = 0 (the lone-O pattern of
/// even integers terminates at height 1). Maintains 3^k and 2^(k+m) and
/// adjusts m by at most one per push, so a DFS pays O(1) big-int work per
/// step.
#[derive(Clone, Debug)]
pub struct LineTracker {
    i_count: u64,
    threshold: u64,
    pow3: Nat,
    pow2: Nat,
}

impl Default for LineTracker {
    fn default() -> Self {
        Self::new()
    }
}

impl LineTracker {
    pub fn new() -> LineTracker {
        LineTracker {
            i_count: 0,
            threshold: 1,
            pow3: Nat::ONE,
            pow2: Nat::from(2u64),
        }
    }

    pub fn i_count(&self) -> u64 {
        self.i_count
    }

    /// The O-count at which a prefix with this I-count terminates.
    pub fn threshold(&self) -> u64 {
        self.threshold
    }

    /// 3^i_count, shared with the separation bump of the class walk.
    pub fn pow3(&self) -> &Nat {
        &self.pow3
    }

    pub fn push_i(&mut self) {
        self.i_count += 1;
        self.pow3 = &self.pow3 * &Nat::from(3u64);
        self.pow2 = &self.pow2 << 1;
        if self.pow2 <= self.pow3 {
            self.threshold += 1;
            self.pow2 = &self.pow2 << 1;
        }
    }

    pub fn status(&self, o_count: u64) -> LineStatus {
        match o_count.cmp(&self.threshold) {
            std::cmp::Ordering::Less => LineStatus::Above,
            std::cmp::Ordering::Equal => LineStatus::Terminal,
            std::cmp::Ordering::Greater => LineStatus::Below,
        }
    }
}

/// Pointwise line status of every prefix of s, by prefix length.
pub fn prefix_status(s: &DynString) -> Vec<LineStatus> {
    let mut tracker = LineTracker::new();
    let mut o_count = 0u64;
    let mut out = Vec::with_capacity(s.len());
    for sym in s.iter() {
        match sym {
            Symbol::I => tracker.push_i(),
            Symbol::O => o_count += 1,
        }
        out.push(tracker.status(o_count));
    }
    out
}

#[derive(Copy, Clone, PartialEq, Eq, Debug)]
pub enum FormStatus {
    /// A complete reduced-dynamics pattern.
    ReducedForm,
    /// Every prefix (including the whole string) is strictly above the
    /// line: extendable, but no integer has exactly this reduced dynamics.
    ProperPrefix,
    /// Touched or crossed the line before the end, or crossed it at the
    /// end: not a reduced dynamics and not extendable into one.
    Inadmissible,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FormVerdict {
    pub status: FormStatus,
    /// 1-based length of the first prefix that is not strictly above the
    /// line, when that prefix invalidates the string.
    pub first_violation: Option<usize>,
}

/// Classifies s against the form condition: terminal exactly at full
/// length, strictly above everywhere before.
pub fn is_reduced_form(s: &DynString) -> FormVerdict {
    let statuses = prefix_status(s);
    let first_off = statuses.iter().position(|&st| st != LineStatus::Above);
    match first_off {
        None => FormVerdict {
            status: FormStatus::ProperPrefix,
            first_violation: None,
        },
        Some(idx) if idx + 1 == s.len() && statuses[idx] == LineStatus::Terminal => FormVerdict {
            status: FormStatus::ReducedForm,
            first_violation: None,
        },
        Some(idx) => FormVerdict {
            status: FormStatus::Inadmissible,
            first_violation: Some(idx + 1),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ds(s: &str) -> DynString {
        s.parse().unwrap()
    }

    #[test]
    fn ceil_lambda_small_values() {
        // λ ≈ 0.58496
        let expected = [0u64, 1, 2, 2, 3, 3, 4, 5, 5, 6, 6];
        for (k, &want) in expected.iter().enumerate() {
            assert_eq!(ceil_lambda(k as u64), want, "k = {k}");
        }
    }

    #[test]
    fn tracker_matches_standalone() {
        let mut tracker = LineTracker::new();
        for k in 1..=300u64 {
            tracker.push_i();
            assert_eq!(tracker.threshold(), ceil_lambda(k), "k = {k}");
            assert_eq!(*tracker.pow3(), Nat::three_pow(k));
        }
    }

    #[test]
    fn powers_never_collide() {
        // 3^k is odd, so it never equals a power of two: the strict and
        // non-strict ceilings coincide for k >= 1
        for k in 1..=200u64 {
            let m = ceil_lambda(k);
            assert!(Nat::two_pow(k + m) > Nat::three_pow(k));
            assert!(Nat::two_pow(k + m - 1) < Nat::three_pow(k));
        }
    }

    #[test]
    fn prefix_status_examples() {
        use LineStatus::*;
        assert_eq!(prefix_status(&ds("IIOO")), [Above, Above, Above, Terminal]);
        assert_eq!(prefix_status(&ds("IO")), [Above, Terminal]);
        assert_eq!(prefix_status(&ds("OO")), [Terminal, Below]);
        assert_eq!(prefix_status(&ds("IIIIOIOO")).last(), Some(&Terminal));
    }

    #[test]
    fn verdict_examples() {
        assert_eq!(is_reduced_form(&ds("IIOO")).status, FormStatus::ReducedForm);
        assert_eq!(is_reduced_form(&ds("O")).status, FormStatus::ReducedForm);
        assert_eq!(is_reduced_form(&ds("IO")).status, FormStatus::ReducedForm);
        assert_eq!(is_reduced_form(&ds("IIIIOIOO")).status, FormStatus::ReducedForm);

        let v = is_reduced_form(&ds("IOO"));
        assert_eq!(v.status, FormStatus::Inadmissible);
        assert_eq!(v.first_violation, Some(2));

        assert_eq!(is_reduced_form(&ds("I")).status, FormStatus::ProperPrefix);
        assert_eq!(is_reduced_form(&ds("II")).status, FormStatus::ProperPrefix);
        assert_eq!(is_reduced_form(&ds("IIO")).status, FormStatus::ProperPrefix);
        assert_eq!(is_reduced_form(&ds("IIIO")).status, FormStatus::ProperPrefix);

        // ends with I: cannot be terminal
        assert_eq!(is_reduced_form(&ds("III")).status, FormStatus::ProperPrefix);
        let v = is_reduced_form(&ds("IOI"));
        assert_eq!(v.status, FormStatus::Inadmissible);
        assert_eq!(v.first_violation, Some(2));
    }

    #[test]
    fn reduced_forms_end_with_o() {
        // structural consequence: the line is only reached by an O step
        for len in 1..=10usize {
            for bits in 0..(1u32 << len) {
                let syms: Vec<Symbol> = (0..len)
                    .map(|p| if bits >> p & 1 == 0 { Symbol::I } else { Symbol::O })
                    .collect();
                let s = DynString::from_symbols(syms);
                if is_reduced_form(&s).status == FormStatus::ReducedForm {
                    assert_eq!(s.last(), Some(Symbol::O));
                    let statuses = prefix_status(&s);
                    assert_eq!(statuses[s.len() - 1], LineStatus::Terminal);
                }
            }
        }
    }
}
