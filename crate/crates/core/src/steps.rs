//! Exact Collatz step operators on [`Nat`].
//!
//! The combined alphabet is I(x) = (3x+1)/2 on odd x and O(x) = x/2 on
//! even x. The classic rule (3x+1 / x/2, no combining) is kept as an
//! independent oracle: one I step equals one classic odd step followed by
//! one classic halving.

use crate::error::{Error, Result};
use crate::nat::Nat;

/// (3x+1)/2. Requires x odd.
pub fn step_i(x: &Nat) -> Result<Nat> {
    if x.is_even() {
        return Err(Error::EvenInput(x.clone()));
    }
    Ok(x.mul3_add1_half())
}

/// x/2. Requires x even and ≥ 2.
pub fn step_o(x: &Nat) -> Result<Nat> {
    if x.is_zero() {
        return Err(Error::Domain("step O requires x >= 2".into()));
    }
    if x.is_odd() {
        return Err(Error::OddInput(x.clone()));
    }
    Ok(x.half())
}

/// 3x/2. Requires x even; the general (odd) case is served exactly by
/// [`StepCoefficient`](crate::dynamics::StepCoefficient).
pub fn step_i_prime(x: &Nat) -> Result<Nat> {
    if x.is_odd() {
        return Err(Error::OddInput(x.clone()));
    }
    Ok(x.mul3_half())
}

/// Textbook rule: 3x+1 on odd x, x/2 on even x. Requires x ≥ 1.
pub fn classic_step(x: &Nat) -> Result<Nat> {
    if x.is_zero() {
        return Err(Error::Domain("classic step requires x >= 1".into()));
    }
    if x.is_odd() {
        Ok(x.mul3_add1())
    } else {
        Ok(x.half())
    }
}
