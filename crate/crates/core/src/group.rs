//! Generic multiplicative-group machinery shared by matrices and polynomial
//! residues: square-and-multiply powering and element order.

use crate::error::{Error, Result};
use crate::factor;

/// An element of a multiplicative monoid whose identity is recoverable from
/// any element (e.g. the identity matrix of the same dimension).
pub trait MulGroup: Clone + PartialEq {
    fn identity_like(&self) -> Self;
    fn op(&self, rhs: &Self) -> Self;

    fn is_identity(&self) -> bool {
        *self == self.identity_like()
    }

    /// `self^e` by left-to-right square-and-multiply; `x^0` is the identity.
    fn pow(&self, e: u64) -> Self {
        let mut acc = self.identity_like();
        if e == 0 {
            return acc;
        }
        for bit in (0..64 - e.leading_zeros()).rev() {
            acc = acc.op(&acc);
            if (e >> bit) & 1 == 1 {
                acc = acc.op(self);
            }
        }
        acc
    }
}

/// Multiplicative order of `x`, given that it divides `group_order`.
///
/// Factors `group_order`, then for each prime `q` strips factors of `q` from
/// the running exponent while `x^(t/q)` stays the identity. Fails with
/// [`Error::OrderNotDividing`] when `x^group_order` is not the identity.
pub fn element_order<G: MulGroup>(x: &G, group_order: u64) -> Result<u64> {
    if group_order == 0 {
        return Err(Error::OrderNotDividing);
    }
    if !x.pow(group_order).is_identity() {
        return Err(Error::OrderNotDividing);
    }
    let mut t = group_order;
    for (q, mult) in factor::factorize(group_order) {
        for _ in 0..mult {
            if x.pow(t / q).is_identity() {
                t /= q;
            } else {
                break;
            }
        }
    }
    Ok(t)
}
