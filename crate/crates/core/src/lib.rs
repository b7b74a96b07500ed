//! Weighted extended top-down (xT) tree transducers.
//!
//! Rule sets are loaded from YAML rule files ([`rules::load_rules`]) and
//! applied to bracketed parse trees ([`tree::parse_sexpr`]) by an exhaustive,
//! optionally beam-pruned, search ([`engine::transduce`]).
//!
//! ```
//! use xtt::{engine::{transduce, TransduceOptions}, rules::load_rules, tree::parse_sexpr};
//!
//! let rules = load_rules("- state: q\n  lhs: (NP John)\n  rhs: (NP Jean)\n").unwrap();
//! let input = parse_sexpr("(NP John)").unwrap();
//! let result = transduce(&input, &rules, &TransduceOptions::default());
//! assert_eq!(result.outputs[0].tree.to_string(), "(NP Jean)");
//! ```

pub mod cli;
pub mod corpus;
pub mod engine;
pub mod pattern;
pub mod rules;
pub mod tree;

pub use engine::{transduce, AnnotatedTree, Derivation, Output, Step, TransduceOptions, TransductionResult};
pub use pattern::{Bindings, Pattern};
pub use rules::{load_rules, Classification, Rule, RuleId, StateName, Transducer};
pub use tree::{parse_sexpr, Path, Tree};
