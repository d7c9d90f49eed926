//! Statistical torsion elements of the circle for arithmetic sequences.
//!
//! An element `x` of `T = R/Z` is statistically torsion for `(a_n)` when
//! `a_n x -> 0` along a set of density one. The crate decides this
//! symbolically from the mixed-radix digits of `x` ([`membership`]) and
//! checks it numerically on a prefix ([`statconv`]).
//!
//! ```
//! use std::sync::Arc;
//! use storsion::density::IndexSet;
//! use storsion::expansion::{CircleElement, DigitRule, DigitValue};
//! use storsion::membership::{check_thm_main, Outcome, Params};
//! use storsion::sequences::ArithmeticSequence;
//!
//! let s = Arc::new(ArithmeticSequence::constant(2)?);
//! let x = CircleElement::digits(DigitRule::Indicator { support: IndexSet::Squares, value: DigitValue::One })?;
//! assert_eq!(check_thm_main(&x, &s, &Params::with_prefix(5_000))?.outcome, Outcome::Member);
//! # Ok::<(), storsion::error::Error>(())
//! ```

pub mod classify;
pub mod cli;
pub mod density;
pub mod error;
pub mod expansion;
pub mod membership;
pub mod rational;
pub mod sequences;
pub mod spec;
pub mod statconv;

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/intro.md")]
mod book_intro {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/sequences.md")]
mod book_sequences {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/expansion.md")]
mod book_expansion {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/density.md")]
mod book_density {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/oracle.md")]
mod book_oracle {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/classify.md")]
mod book_classify {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/membership.md")]
mod book_membership {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/cli.md")]
mod book_cli {}
