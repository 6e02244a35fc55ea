//! Trajectories, reduced dynamics, and the primed (linear-part) transform.
//!
//! The reduced dynamics of x is the unique shortest parity-driven
//! transformation sequence whose final value drops below x while every
//! intermediate stays above. Whether one exists for every x is the open
//! conjecture, so the search is budgeted and exhaustion is a report, not
//! an error.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nat::Nat;
use crate::symbols::{DynString, Symbol};

/// Default step budget for a single reduced-dynamics search.
pub const DEFAULT_RD_BUDGET: u64 = 10_000_000;

/// True iff the forthcoming transformation matches the parity of x
/// (odd ↔ I, even ↔ O).
pub fn is_matched(x: &Nat, c: Symbol) -> bool {
    match c {
        Symbol::I => x.is_odd(),
        Symbol::O => x.is_even(),
    }
}

fn apply_symbol(x: &Nat, c: Symbol) -> Nat {
    match c {
        Symbol::I => x.mul3_add1_half(),
        Symbol::O => x.half(),
    }
}

/// A fully materialized run of a dynamics string on a starting value.
/// `values[k]` is the value after the first k transformations.
#[derive(Clone, PartialEq, Eq, Debug, Deserialize)]
pub struct Trajectory {
    pub symbols: DynString,
    pub values: Vec<Nat>,
}

impl Serialize for Trajectory {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = serializer.serialize_struct("Trajectory", 3)?;
        st.serialize_field("start", self.start())?;
        st.serialize_field("symbols", &self.symbols)?;
        st.serialize_field("values", &self.values)?;
        st.end()
    }
}

impl Trajectory {
    pub fn start(&self) -> &Nat {
        &self.values[0]
    }

    pub fn final_value(&self) -> &Nat {
        self.values.last().expect("trajectory holds start value")
    }

    /// Wire form: `{"start": "...", "symbols": "...", "values": [...]}`.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("trajectory serializes")
    }
}

/// Runs `s` on `x`, checking at every step that the symbol matches the
/// current parity. A mismatch means `s` is not the dynamics of `x`.
pub fn apply(s: &DynString, x: &Nat) -> Result<Trajectory> {
    if x.is_zero() {
        return Err(Error::Domain("apply requires x >= 1".into()));
    }
    let mut values = Vec::with_capacity(s.len() + 1);
    values.push(x.clone());
    for (k, sym) in s.iter().enumerate() {
        let current = values.last().unwrap();
        if !is_matched(current, sym) {
            return Err(Error::ParityMismatch {
                step: k + 1,
                symbol: sym,
                value: current.clone(),
            });
        }
        values.push(apply_symbol(current, sym));
    }
    Ok(Trajectory {
        symbols: s.clone(),
        values,
    })
}

/// The first `n` parity-driven transformations of x, defined whether or
/// not the reduced dynamics of x exists.
pub fn dynam(x: &Nat, n: u64) -> Result<DynString> {
    if x.is_zero() {
        return Err(Error::Domain("dynam requires x >= 1".into()));
    }
    if n == 0 {
        return Err(Error::Domain("dynam requires n >= 1".into()));
    }
    let mut v = x.clone();
    let mut out = Vec::with_capacity(n.min(1 << 20) as usize);
    for _ in 0..n {
        if v.is_odd() {
            out.push(Symbol::I);
            v = v.mul3_add1_half();
        } else {
            out.push(Symbol::O);
            v = v.half();
        }
    }
    Ok(DynString::from_symbols(out))
}

/// Outcome of a budgeted reduced-dynamics search.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum RdOutcome {
    Found(DynString),
    /// No descent within the budget: a report, not an error.
    BudgetExhausted { steps: u64, bit_length: u64 },
}

impl RdOutcome {
    pub fn found(self) -> Option<DynString> {
        match self {
            RdOutcome::Found(s) => Some(s),
            RdOutcome::BudgetExhausted { .. } => None,
        }
    }
}

/// The conventional value for x = 1, whose defining inequality fails:
/// the search itself rejects 1.
pub fn rd_one_convention() -> DynString {
    DynString::from_symbols(vec![Symbol::I, Symbol::O])
}

/// Searches for the reduced dynamics of x: the shortest s with s(x) < x
/// and all intermediate values above x. An intermediate equal to x would
/// witness a cycle and is surfaced as [`Error::CycleAnomaly`].
pub fn reduced_dynamics(x: &Nat, budget: u64) -> Result<RdOutcome> {
    if *x < 2u64 {
        return Err(Error::Domain(format!(
            "reduced dynamics requires x >= 2 (for x = 1 the conventional value is {})",
            rd_one_convention()
        )));
    }
    let mut v = x.clone();
    let mut out = Vec::new();
    for step in 0..budget {
        if v.is_odd() {
            out.push(Symbol::I);
            v = v.mul3_add1_half();
        } else {
            out.push(Symbol::O);
            v = v.half();
        }
        if v < *x {
            return Ok(RdOutcome::Found(DynString::from_symbols(out)));
        }
        if v == *x {
            return Err(Error::CycleAnomaly {
                start: x.clone(),
                steps: step + 1,
            });
        }
    }
    Ok(RdOutcome::BudgetExhausted {
        steps: budget,
        bit_length: v.bit_length(),
    })
}

/// A symbol of the primed alphabet {I′, O}: the linear parts of the
/// transformations, used to separate s(x+P) into s(x) + s′(P).
#[derive(Copy, Clone, PartialEq, Eq, Debug)]
pub enum PrimedSymbol {
    IPrime,
    O,
}

impl fmt::Display for PrimedSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PrimedSymbol::IPrime => f.write_str("I'"),
            PrimedSymbol::O => f.write_str("O"),
        }
    }
}

/// `Replace(s)`: each I becomes I′, O stays O.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PrimedString(Vec<PrimedSymbol>);

impl PrimedString {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn symbols(&self) -> &[PrimedSymbol] {
        &self.0
    }

    /// Step-by-step application: I′(v) = 3v/2, O(v) = v/2. Errors with the
    /// 1-based prefix length at the first non-integral intermediate.
    pub fn apply_stepwise(&self, p: &Nat) -> Result<Nat> {
        let mut v = p.clone();
        for (k, sym) in self.0.iter().enumerate() {
            if v.is_odd() {
                return Err(Error::NonIntegral { prefix_len: k + 1 });
            }
            v = match sym {
                PrimedSymbol::IPrime => v.mul3_half(),
                PrimedSymbol::O => v.half(),
            };
        }
        Ok(v)
    }
}

impl fmt::Display for PrimedString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for sym in &self.0 {
            write!(f, "{sym}")?;
        }
        Ok(())
    }
}

/// Replaces every I in s by I′.
pub fn replace(s: &DynString) -> PrimedString {
    PrimedString(
        s.iter()
            .map(|sym| match sym {
                Symbol::I => PrimedSymbol::IPrime,
                Symbol::O => PrimedSymbol::O,
            })
            .collect(),
    )
}

/// The exact rational 3^a / 2^j attached to a prefix of a dynamics
/// string: a = count of I in the prefix, j = prefix length. The primed
/// prefix maps P to (3^a / 2^j)·P.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct StepCoefficient {
    i_count: u64,
    length: u64,
}

impl StepCoefficient {
    pub fn new(i_count: u64, length: u64) -> StepCoefficient {
        assert!(i_count <= length, "coefficient requires a <= j");
        StepCoefficient { i_count, length }
    }

    pub fn i_count(&self) -> u64 {
        self.i_count
    }

    pub fn length(&self) -> u64 {
        self.length
    }

    pub fn numerator(&self) -> Nat {
        Nat::three_pow(self.i_count)
    }

    pub fn denominator(&self) -> Nat {
        Nat::two_pow(self.length)
    }

    /// (3^a / 2^j)·p, exactly. Requires 2^j | p.
    pub fn apply(&self, p: &Nat) -> Result<Nat> {
        if !p.is_zero() && p.trailing_zeros().unwrap_or(0) >= self.length {
            Ok(&self.numerator() * &(p >> self.length))
        } else if p.is_zero() {
            Ok(Nat::ZERO)
        } else {
            // first non-integral intermediate sits right past the 2-adic
            // valuation of p
            let prefix_len = (p.trailing_zeros().unwrap_or(0) + 1) as usize;
            Err(Error::NonIntegral {
                prefix_len: prefix_len.min(self.length as usize),
            })
        }
    }
}

impl fmt::Display for StepCoefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "3^{}/2^{}", self.i_count, self.length)
    }
}

/// The coefficient of the length-j prefix of s (1 ≤ j ≤ |s|).
pub fn coefficient(s: &DynString, j: usize) -> Result<StepCoefficient> {
    if j < 1 || j > s.len() {
        return Err(Error::OutOfBounds {
            start: 1,
            len: j,
            within: s.len(),
        });
    }
    let a = s.symbols()[..j]
        .iter()
        .filter(|&&sym| sym == Symbol::I)
        .count() as u64;
    Ok(StepCoefficient::new(a, j as u64))
}

/// Applies Replace(s) to P via the closed form 3^CntI(s)/2^|s| · P.
/// Equals stepwise application of the primed string whenever integral.
pub fn apply_primed(s: &DynString, p: &Nat) -> Result<Nat> {
    if p.is_zero() {
        return Err(Error::Domain("apply_primed requires P >= 1".into()));
    }
    if s.is_empty() {
        return Ok(p.clone());
    }
    coefficient(s, s.len())?.apply(p)
}
