//! First-order formulas in negation normal form, in the plain (FO) and the
//! distinct-quantifier (FO≠) flavor.

pub mod ast;
pub mod dnf;
pub mod parse;
pub mod print;
pub mod transform;

pub use ast::{
    and, atom, big_and, big_or, default_avoid, exists, exists_d, forall, forall_d, neg_atom, or, Flavor, Formula,
    FormulaMetrics, Term, Var, Vocabulary,
};
pub use dnf::{existential_prenex_dnf, Disjunct, PrenexDnf};
pub use parse::{parse, parse_sentence, parse_with_vocab};
pub use print::render;
pub use transform::{
    binders_along, distinct_guard, find_postorder, flatten_sigma1, fo_to_foneq, foneq_to_fo, fresh_tuple, fresh_var,
    normalize_avoid, psi_n, rename_free, simplify, simplify_absorptive, standardize_apart, subformula_at,
    substitute_subformula, Path,
};
