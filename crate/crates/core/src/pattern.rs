//! Tree patterns: trees whose leaves may be `?`-prefixed variables.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::tree::{parse_sexpr, ParseError, Tree};

pub fn is_variable(label: &str) -> bool {
    label.len() > 1 && label.starts_with('?')
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PatternError {
    #[error(transparent)]
    Syntax(#[from] ParseError),
    #[error("variable {0} has children; variables may only appear at leaves")]
    InternalVariable(String),
    #[error("'?' is not a variable name; a variable is '?' followed by a name")]
    BareQuestionMark,
    #[error("variable {0} occurs more than once in a left-hand side")]
    DuplicateVariable(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unbound variable {0}")]
pub struct UnboundVariable(pub String);

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pattern(Tree);

impl Pattern {
    pub fn parse(text: &str) -> Result<Pattern, PatternError> {
        Pattern::from_tree(parse_sexpr(text)?)
    }

    pub fn from_tree(tree: Tree) -> Result<Pattern, PatternError> {
        check_variables(&tree)?;
        Ok(Pattern(tree))
    }

    pub fn as_tree(&self) -> &Tree {
        &self.0
    }

    pub fn is_variable(&self) -> bool {
        is_variable(self.0.label())
    }

    /// Distinct variable names.
    pub fn variables(&self) -> BTreeSet<&str> {
        self.variable_occurrences().into_keys().collect()
    }

    /// Distinct variable names, failing if any name repeats. This is the
    /// check applied to left-hand sides.
    pub fn linear_variables(&self) -> Result<BTreeSet<&str>, PatternError> {
        let counts = self.variable_occurrences();
        if let Some((name, _)) = counts.iter().find(|(_, &n)| n > 1) {
            return Err(PatternError::DuplicateVariable(name.to_string()));
        }
        Ok(counts.into_keys().collect())
    }

    pub fn variable_occurrences(&self) -> BTreeMap<&str, usize> {
        let mut counts = BTreeMap::new();
        count_variables(&self.0, &mut counts);
        counts
    }

    /// One-way matching of this pattern against `tree`. Literal nodes must
    /// agree on label and exact arity; a variable binds the whole subtree.
    pub fn match_tree(&self, tree: &Tree) -> Option<Bindings> {
        let mut bindings = Bindings::default();
        if match_into(&self.0, tree, &mut bindings) {
            Some(bindings)
        } else {
            None
        }
    }

    pub fn substitute(&self, bindings: &Bindings) -> Result<Tree, UnboundVariable> {
        substitute_tree(&self.0, bindings)
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl fmt::Debug for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Pattern({})", self.0)
    }
}

impl std::str::FromStr for Pattern {
    type Err = PatternError;

    fn from_str(s: &str) -> Result<Pattern, PatternError> {
        Pattern::parse(s)
    }
}

fn check_variables(tree: &Tree) -> Result<(), PatternError> {
    let label = tree.label();
    if label == "?" {
        return Err(PatternError::BareQuestionMark);
    }
    if is_variable(label) && !tree.is_leaf() {
        return Err(PatternError::InternalVariable(label.to_string()));
    }
    tree.children().iter().try_for_each(check_variables)
}

fn count_variables<'a>(tree: &'a Tree, counts: &mut BTreeMap<&'a str, usize>) {
    if is_variable(tree.label()) {
        *counts.entry(tree.label()).or_insert(0) += 1;
    }
    for child in tree.children() {
        count_variables(child, counts);
    }
}

fn match_into(pattern: &Tree, tree: &Tree, bindings: &mut Bindings) -> bool {
    if is_variable(pattern.label()) {
        return match bindings.0.get(pattern.label()) {
            // Only reachable for non-linear patterns, which loading rejects.
            Some(bound) => bound == tree,
            None => {
                bindings.0.insert(pattern.label_arc().clone(), tree.clone());
                true
            }
        };
    }
    pattern.label() == tree.label()
        && pattern.children().len() == tree.children().len()
        && pattern
            .children()
            .iter()
            .zip(tree.children())
            .all(|(p, t)| match_into(p, t, bindings))
}

fn substitute_tree(pattern: &Tree, bindings: &Bindings) -> Result<Tree, UnboundVariable> {
    if is_variable(pattern.label()) {
        return bindings
            .get(pattern.label())
            .cloned()
            .ok_or_else(|| UnboundVariable(pattern.label().to_string()));
    }
    if pattern.is_leaf() {
        return Ok(pattern.clone());
    }
    let children = pattern
        .children()
        .iter()
        .map(|c| substitute_tree(c, bindings))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Tree::from_parts(pattern.label_arc().clone(), children.into()))
}

/// Variable name (including the leading `?`) to bound subtree.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bindings(BTreeMap<Arc<str>, Tree>);

impl Bindings {
    pub fn new() -> Bindings {
        Bindings::default()
    }

    pub fn insert(&mut self, variable: &str, tree: Tree) -> Option<Tree> {
        self.0.insert(variable.into(), tree)
    }

    pub fn get(&self, variable: &str) -> Option<&Tree> {
        self.0.get(variable)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Tree)> {
        self.0.iter().map(|(k, v)| (&**k, v))
    }
}

impl fmt::Debug for Bindings {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map()
            .entries(self.0.iter().map(|(k, v)| (&**k, v.to_string())))
            .finish()
    }
}

impl<'a> FromIterator<(&'a str, Tree)> for Bindings {
    fn from_iter<I: IntoIterator<Item = (&'a str, Tree)>>(iter: I) -> Self {
        Bindings(iter.into_iter().map(|(k, v)| (Arc::from(k), v)).collect())
    }
}
