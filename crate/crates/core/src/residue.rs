//! Residue classes mod 2^t and their correspondence with dynamics
//! strings.
//!
//! Every residue class [i]_{2^t} shares its first t transformations, and
//! a class that has not yet descended splits into the two classes mod
//! 2^(t+1), one continuing with I and the other with O. `d2r` inverts the
//! direction: from an admissible string to the unique class with that
//! dynamics.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dynamics::{self, is_matched};
use crate::error::{Error, Result};
use crate::form::{self, LineStatus, LineTracker};
use crate::nat::Nat;
use crate::symbols::{DynString, Symbol};

/// The class [i]_{2^t} of positive integers congruent to i mod 2^t,
/// held with the canonical representative 0 ≤ i < 2^t.
///
/// t = 0 denotes the degenerate full class (everything ≡ 0 mod 1); it
/// appears only as the root label of the partition tree.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ResidueClass {
    i: Nat,
    t: usize,
}

impl ResidueClass {
    /// Builds [i]_{2^t}, reducing i mod 2^t; a non-canonical representative
    /// is normalized, never rejected.
    pub fn new(i: Nat, t: usize) -> ResidueClass {
        ResidueClass {
            i: i.low_bits(t as u64),
            t,
        }
    }

    pub fn i(&self) -> &Nat {
        &self.i
    }

    pub fn exponent(&self) -> usize {
        self.t
    }

    pub fn modulus(&self) -> Nat {
        Nat::two_pow(self.t as u64)
    }

    /// The smallest positive member: i itself, or 2^t for the zero class.
    pub fn representative(&self) -> Nat {
        if self.i.is_zero() {
            self.modulus()
        } else {
            self.i.clone()
        }
    }

    /// i + m·2^t.
    pub fn member(&self, m: u64) -> Nat {
        &self.i + &(&Nat::from(m) * &self.modulus())
    }

    pub fn contains(&self, x: &Nat) -> bool {
        !x.is_zero() && x.low_bits(self.t as u64) == self.i
    }

    /// The two half-classes [i]_{2^(t+1)} and [i+2^t]_{2^(t+1)}.
    pub fn halves(&self) -> (ResidueClass, ResidueClass) {
        let lo = ResidueClass {
            i: self.i.clone(),
            t: self.t + 1,
        };
        let hi = ResidueClass {
            i: &self.i + &self.modulus(),
            t: self.t + 1,
        };
        (lo, hi)
    }
}

impl fmt::Display for ResidueClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} mod 2^{}", self.i, self.t)
    }
}

impl fmt::Debug for ResidueClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]_2^{}", self.i, self.t)
    }
}

impl FromStr for ResidueClass {
    type Err = Error;

    /// Parses the text form `<i> mod 2^<t>`.
    fn from_str(text: &str) -> Result<ResidueClass> {
        let parts: Vec<&str> = text.split(" mod 2^").collect();
        if parts.len() != 2 {
            return Err(Error::Syntax {
                offset: 0,
                message: "expected `<i> mod 2^<t>`".into(),
            });
        }
        let i: Nat = parts[0].parse()?;
        let t: usize = parts[1].parse().map_err(|_| Error::Syntax {
            offset: parts[0].len() + 7,
            message: "invalid exponent".into(),
        })?;
        Ok(ResidueClass::new(i, t))
    }
}

/// Incremental walk down the partition tree.
///
/// After consuming a prefix s of length d, `rep` is the canonical
/// representative with dynam(rep, d) = s, `value` is s(rep), and `pow3`
/// (from the tracker) is the separation coefficient 3^CntI(s): bumping
/// the representative by 2^d shifts the value by exactly pow3.
#[derive(Clone, Debug)]
pub(crate) struct ClassWalk {
    pub rep: Nat,
    pub value: Nat,
    pub bit: Nat,
    pub depth: usize,
    pub o_count: u64,
    pub tracker: LineTracker,
}

impl ClassWalk {
    pub fn start() -> ClassWalk {
        ClassWalk {
            rep: Nat::ONE,
            value: Nat::ONE,
            bit: Nat::ONE,
            depth: 0,
            o_count: 0,
            tracker: LineTracker::new(),
        }
    }

    /// Consumes the next symbol, adjusting the representative when its
    /// current value does not match.
    pub fn step(&mut self, sym: Symbol) {
        if !is_matched(&self.value, sym) {
            self.rep = &self.rep + &self.bit;
            self.value = &self.value + self.tracker.pow3();
        }
        match sym {
            Symbol::I => {
                self.value = self.value.mul3_add1_half();
                self.tracker.push_i();
            }
            Symbol::O => {
                self.value = self.value.half();
                self.o_count += 1;
            }
        }
        self.bit = &self.bit << 1;
        self.depth += 1;
    }

    pub fn status(&self) -> LineStatus {
        self.tracker.status(self.o_count)
    }

    pub fn class(&self) -> ResidueClass {
        ResidueClass::new(self.rep.clone(), self.depth)
    }
}

/// The unique residue class whose first |s| transformations are s, for an
/// arbitrary string s (the map is a bijection between {I,O}^t and the
/// classes mod 2^t; the representative may be even).
pub fn class_with_dynamics(s: &DynString) -> Result<ResidueClass> {
    if s.is_empty() {
        return Err(Error::Domain("dynamics string must be non-empty".into()));
    }
    let mut walk = ClassWalk::start();
    for sym in s.iter() {
        walk.step(sym);
    }
    Ok(walk.class())
}

/// D2R: maps an admissible dynamics string of length t to the unique
/// class [i]_{2^t} whose members all start with exactly these t
/// transformations. Admissibility (checked here) means every proper
/// prefix is strictly above the ratio line and the full string has not
/// crossed it; for t ≥ 2 the representative is then odd.
pub fn d2r(s: &DynString) -> Result<ResidueClass> {
    if s.is_empty() {
        return Err(Error::Domain("dynamics string must be non-empty".into()));
    }
    if s.len() >= 2 {
        let statuses = form::prefix_status(s);
        for (idx, &st) in statuses.iter().enumerate() {
            let is_last = idx + 1 == s.len();
            let admissible = match st {
                LineStatus::Above => true,
                LineStatus::Terminal => is_last,
                LineStatus::Below => false,
            };
            if !admissible {
                return Err(Error::InadmissibleString {
                    first_violation: idx + 1,
                });
            }
        }
    }
    class_with_dynamics(s)
}

/// R2D: the first t transformations shared by every member of the class.
pub fn r2d(class: &ResidueClass) -> DynString {
    if class.exponent() == 0 {
        return DynString::new();
    }
    dynamics::dynam(&class.representative(), class.exponent() as u64)
        .expect("representative is positive and t >= 1")
}

/// The two children of a split, each paired with its (t+1)-symbol
/// dynamics. `with_o` continues with O, `with_i` with I.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SplitChildren {
    pub with_o: (ResidueClass, DynString),
    pub with_i: (ResidueClass, DynString),
}

/// Splits a non-terminal class [i]_{2^t} with dynamics s into its two
/// half-classes mod 2^(t+1): the half whose value s(rep) is even
/// continues with O, the other with I. Fails with `AlreadyTerminal` when
/// the dynamics has already descended below the class representative.
pub fn partition_split(class: &ResidueClass, s: &DynString) -> Result<SplitChildren> {
    if s.len() != class.exponent() || class.exponent() == 0 {
        return Err(Error::Domain(format!(
            "partition_split: dynamics length {} does not match exponent {}",
            s.len(),
            class.exponent()
        )));
    }
    // probe a member of the low half mod 2^(t+1); for i = 1 skip the
    // integer 1 itself, whose conventional non-descent (s(1) = 1) would
    // misreport the class as live
    let rep = if class.i().is_one() {
        &Nat::ONE + &Nat::two_pow(class.exponent() as u64 + 1)
    } else {
        class.representative()
    };
    let trajectory = dynamics::apply(s, &rep)?;
    if trajectory.values[1..].iter().any(|v| *v < rep) {
        return Err(Error::AlreadyTerminal {
            class: class.clone(),
        });
    }
    let (lo, hi) = class.halves();
    let final_even = trajectory.final_value().is_even();
    let (o_class, i_class) = if final_even { (lo, hi) } else { (hi, lo) };
    Ok(SplitChildren {
        with_o: (o_class, s.appended(Symbol::O)),
        with_i: (i_class, s.appended(Symbol::I)),
    })
}

/// Outcome of comparing the dynamics of two odd integers.
#[derive(Copy, Clone, PartialEq, Eq, Debug)]
pub enum ForkOutcome {
    Identical,
    /// First t transformations agree, the (t+1)-th differs.
    Forked { t: u64 },
}

/// The forking point of two odd integers: the unique t with identical
/// first t transformations and distinct (t+1)-th, which equals the
/// 2-adic valuation of their difference.
pub fn forking_point(x1: &Nat, x2: &Nat) -> Result<ForkOutcome> {
    if x1.is_even() {
        return Err(Error::NotOdd(x1.clone()));
    }
    if x2.is_even() {
        return Err(Error::NotOdd(x2.clone()));
    }
    if x1 == x2 {
        return Ok(ForkOutcome::Identical);
    }
    let diff = x1.abs_diff(x2);
    let t = diff.trailing_zeros().expect("difference is non-zero");
    // x1 ≡ x2 (mod 2^t) and x1 ≡ x2 + 2^t (mod 2^(t+1))
    assert_eq!(x1.low_bits(t), x2.low_bits(t));
    assert_eq!(
        x1.low_bits(t + 1),
        (&x2.low_bits(t + 1) + &Nat::two_pow(t)).low_bits(t + 1)
    );
    Ok(ForkOutcome::Forked { t })
}

/// Which quarter-class cell the next transformation of x falls in:
/// the residue of x mod 4 decides both the current parity and the parity
/// of the transformed value.
#[derive(Copy, Clone, PartialEq, Eq, Debug)]
pub enum ParityTransition {
    /// x ≡ 3 (mod 4): I(x) is odd.
    OddToOdd,
    /// x ≡ 1 (mod 4): I(x) is even.
    OddToEven,
    /// x ≡ 2 (mod 4): O(x) is odd.
    EvenToOdd,
    /// x ≡ 0 (mod 4): O(x) is even.
    EvenToEven,
}

pub fn parity_transition(x: &Nat) -> Result<ParityTransition> {
    if x.is_zero() {
        return Err(Error::Domain("parity transition requires x >= 1".into()));
    }
    Ok(match x.low_bits(2).to_u64().unwrap() {
        0 => ParityTransition::EvenToEven,
        1 => ParityTransition::OddToEven,
        2 => ParityTransition::EvenToOdd,
        _ => ParityTransition::OddToOdd,
    })
}
