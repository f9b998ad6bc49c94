//! Multiple zeta-star values with certified enclosures.

pub mod binary_tau;
pub mod cantor_hall;
pub mod cli;
pub mod enclosure;
pub mod error;
pub mod expansion;
pub mod explorer;
pub mod index;
pub mod values;

pub use enclosure::{Enclosure, Interval, Real};
pub use error::{Result, ZstarError};
pub use expansion::{expand, subtree_bounds, ExpandOptions, Expander, ExpansionResult, ExpansionStatus};
pub use index::{canonical_form, index_compare, make_composition, Composition, Tail, TailedIndex};
pub use values::{
    eval_extended, eval_finite, eval_parts, eval_with_const_tail, tail_factor, tail_factor_enclosure,
    tail_factor_limit, EvalConfig, Evaluator,
};
