//! Compositional double-entry bookkeeping.
//!
//! Systems are spans of reflexive graphs composed by synchronizing on shared
//! boundaries. Accounts are spans measured in integer value by a valuation
//! that obeys a continuity equation, so closed systems of accounts conserve
//! their total value along every behaviour. The [`ledger`] module builds the
//! familiar five-kind ledger on top and checks that conservation on journal
//! replays.

pub mod accounts;
pub mod behaviour;
pub mod laws;
pub mod ledger;
pub mod rgraph;
pub mod span;
pub mod stdaccount;
pub mod syntax;

pub use num_bigint::BigInt;

/// Money units. Arbitrary precision, so conservation checks cannot overflow.
pub type Money = BigInt;
