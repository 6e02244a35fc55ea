//! Fixed-width step kernels, generic over the unsigned word type.
//!
//! Range scans run in the narrowest lane that fits and retry wider on
//! overflow (`u64` → `u128` → [`Nat`](crate::Nat)), so every kernel here
//! uses checked arithmetic and reports overflow as `None`.

use num_traits::{CheckedAdd, CheckedMul, PrimInt, Unsigned};

/// An unsigned machine word usable as a fast scan lane.
pub trait Word: PrimInt + Unsigned + CheckedAdd + CheckedMul {}

impl<T: PrimInt + Unsigned + CheckedAdd + CheckedMul> Word for T {}

#[inline]
pub fn is_even<W: Word>(x: W) -> bool {
    x & W::one() == W::zero()
}

/// (3x+1)/2 for odd x; `None` on overflow.
#[inline]
pub fn step_i<W: Word>(x: W) -> Option<W> {
    debug_assert!(!is_even(x));
    let three = W::from(3).expect("3 fits any word");
    Some(x.checked_mul(&three)?.checked_add(&W::one())? >> 1)
}

/// x/2 for even x.
#[inline]
pub fn step_o<W: Word>(x: W) -> W {
    debug_assert!(is_even(x));
    x >> 1
}

/// 3x/2 for even x; `None` on overflow.
#[inline]
pub fn step_i_prime<W: Word>(x: W) -> Option<W> {
    debug_assert!(is_even(x));
    let three = W::from(3).expect("3 fits any word");
    (x >> 1).checked_mul(&three)
}

/// Textbook rule: 3x+1 on odd, x/2 on even; `None` on overflow.
#[inline]
pub fn classic_step<W: Word>(x: W) -> Option<W> {
    if is_even(x) {
        Some(x >> 1)
    } else {
        let three = W::from(3).expect("3 fits any word");
        x.checked_mul(&three)?.checked_add(&W::one())
    }
}

/// One parity-driven combined step; `true` in the pair means the step was I.
#[inline]
pub fn combined_step<W: Word>(x: W) -> Option<(W, bool)> {
    if is_even(x) {
        Some((x >> 1, false))
    } else {
        step_i(x).map(|y| (y, true))
    }
}
