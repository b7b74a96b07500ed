//! Rules, transducers, the YAML rule-file loader and L/N/x classification.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use serde_yaml::Value;
use thiserror::Error;

use crate::pattern::{is_variable, Pattern, PatternError};
use crate::tree::{is_valid_label, Path};

pub const DEFAULT_INITIAL_STATE: &str = "q";
pub const DEFAULT_WEIGHT: f64 = 1.0;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateName(Arc<str>);

impl StateName {
    pub fn new(name: &str) -> Result<StateName, InvalidStateName> {
        if is_valid_label(name) {
            Ok(StateName(name.into()))
        } else {
            Err(InvalidStateName(name.to_string()))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for StateName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for StateName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", &*self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid state name {0:?}")]
pub struct InvalidStateName(pub String);

/// 1-based position of a rule in its source file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RuleId(pub usize);

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Rule {
    pub id: RuleId,
    pub state: StateName,
    pub lhs: Pattern,
    pub rhs: Pattern,
    /// State placements inside the rhs, as paths from the rhs root.
    pub newstates: Vec<(Path, StateName)>,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Violation {
    #[error("duplicate variable {0} in lhs")]
    DuplicateLhsVariable(String),
    #[error("rhs variable {0} does not occur in lhs")]
    RhsVariableNotInLhs(String),
    #[error("newstates path {path} is not valid for the rhs")]
    InvalidNewstatePath { path: Path },
    #[error("nested state placements: {outer} is a prefix of {inner}")]
    NestedNewstates { outer: Path, inner: Path },
    #[error("weight {0} is not a finite non-negative number")]
    BadWeight(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Warning {
    /// The placement does not address a variable leaf of the rhs.
    NonVariableTarget { path: Path },
    /// State re-entered at the rhs root; with a rhs that the lhs matches
    /// again this loops forever.
    RootSelfLoop { state: StateName },
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Warning::NonVariableTarget { path } => {
                write!(f, "newstates path {path} addresses a non-variable rhs position")
            }
            Warning::RootSelfLoop { state } => {
                write!(f, "self-loop risk: state {state} re-entered at root path []")
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RuleReport {
    pub violations: Vec<Violation>,
    pub warnings: Vec<Warning>,
}

impl RuleReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks every rule invariant, collecting all violations plus non-fatal warnings.
pub fn validate_rule(rule: &Rule) -> RuleReport {
    let mut report = RuleReport::default();

    let lhs_vars = match rule.lhs.linear_variables() {
        Ok(vars) => vars,
        Err(PatternError::DuplicateVariable(name)) => {
            report.violations.push(Violation::DuplicateLhsVariable(name));
            rule.lhs.variables()
        }
        Err(_) => rule.lhs.variables(),
    };
    for var in rule.rhs.variables() {
        if !lhs_vars.contains(var) {
            report.violations.push(Violation::RhsVariableNotInLhs(var.to_string()));
        }
    }

    for (path, state) in &rule.newstates {
        match rule.rhs.as_tree().subtree_at(path) {
            Err(_) => report
                .violations
                .push(Violation::InvalidNewstatePath { path: path.clone() }),
            Ok(target) => {
                if !is_variable(target.label()) {
                    report.warnings.push(Warning::NonVariableTarget { path: path.clone() });
                }
            }
        }
        if path.is_root() && *state == rule.state {
            report.warnings.push(Warning::RootSelfLoop { state: state.clone() });
        }
    }
    for (i, (a, _)) in rule.newstates.iter().enumerate() {
        for (b, _) in &rule.newstates[i + 1..] {
            if a.is_prefix_of(b) {
                report.violations.push(Violation::NestedNewstates {
                    outer: a.clone(),
                    inner: b.clone(),
                });
            } else if b.is_prefix_of(a) {
                report.violations.push(Violation::NestedNewstates {
                    outer: b.clone(),
                    inner: a.clone(),
                });
            }
        }
    }

    if !(rule.weight.is_finite() && rule.weight >= 0.0) {
        report.violations.push(Violation::BadWeight(rule.weight.to_string()));
    }
    report
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Classification {
    pub linear: bool,
    pub nondeleting: bool,
    pub extended: bool,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "linear={} nondeleting={} extended={}",
            self.linear, self.nondeleting, self.extended
        )
    }
}

impl Rule {
    /// Every lhs variable occurs at most once in the rhs.
    pub fn is_linear(&self) -> bool {
        let rhs = self.rhs.variable_occurrences();
        self.lhs
            .variables()
            .iter()
            .all(|v| rhs.get(v).copied().unwrap_or(0) <= 1)
    }

    /// Every lhs variable occurs at least once in the rhs.
    pub fn is_nondeleting(&self) -> bool {
        let rhs = self.rhs.variables();
        self.lhs.variables().iter().all(|v| rhs.contains(v))
    }

    /// The lhs goes beyond the plain top-down shape: a literal root whose
    /// children are all variables.
    pub fn is_extended(&self) -> bool {
        let lhs = self.lhs.as_tree();
        let plain =
            !is_variable(lhs.label()) && !lhs.is_leaf() && lhs.children().iter().all(|c| is_variable(c.label()));
        !plain
    }
}

#[derive(Debug, Clone)]
pub struct Transducer {
    rules: Vec<Rule>,
    initial_state: StateName,
    by_state: HashMap<StateName, Vec<usize>>,
}

impl Transducer {
    /// Builds a transducer, rejecting it if any rule has a violation.
    /// Rule ids are reassigned to 1-based positions.
    pub fn new(rules: Vec<Rule>, initial_state: StateName) -> Result<Transducer, LoadError> {
        let mut rules = rules;
        for (i, rule) in rules.iter_mut().enumerate() {
            rule.id = RuleId(i + 1);
            let report = validate_rule(rule);
            if !report.is_ok() {
                return Err(LoadError::at(i + 1, LoadErrorKind::Invalid(report.violations)));
            }
        }
        let mut by_state: HashMap<StateName, Vec<usize>> = HashMap::new();
        for (i, rule) in rules.iter().enumerate() {
            by_state.entry(rule.state.clone()).or_default().push(i);
        }
        Ok(Transducer {
            rules,
            initial_state,
            by_state,
        })
    }

    pub fn from_yaml(text: &str) -> Result<Transducer, LoadError> {
        load_rules(text)
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn rule(&self, id: RuleId) -> Option<&Rule> {
        id.0.checked_sub(1).and_then(|i| self.rules.get(i))
    }

    /// Rules for `state`, in id order.
    pub fn rules_for<'a>(&'a self, state: &StateName) -> impl Iterator<Item = &'a Rule> + 'a {
        self.by_state
            .get(state)
            .map(|v| v.as_slice())
            .unwrap_or(&[])
            .iter()
            .map(move |&i| &self.rules[i])
    }

    pub fn initial_state(&self) -> &StateName {
        &self.initial_state
    }

    pub fn with_initial_state(mut self, state: StateName) -> Transducer {
        self.initial_state = state;
        self
    }

    /// The initial state, every rule state, and every placed state.
    pub fn states(&self) -> BTreeSet<&StateName> {
        let mut states = BTreeSet::new();
        states.insert(&self.initial_state);
        for rule in &self.rules {
            states.insert(&rule.state);
            states.extend(rule.newstates.iter().map(|(_, s)| s));
        }
        states
    }

    pub fn classify(&self) -> Classification {
        classify(self)
    }

    /// Re-serializes the rules in the rule-file format, every key explicit.
    pub fn to_yaml(&self) -> String {
        let mut out = String::new();
        for rule in &self.rules {
            out.push_str(&format!("- state: {}\n", rule.state));
            out.push_str(&format!("  lhs: {}\n", yaml_scalar(&rule.lhs.to_string())));
            out.push_str(&format!("  rhs: {}\n", yaml_scalar(&rule.rhs.to_string())));
            if rule.newstates.is_empty() {
                out.push_str("  newstates: []\n");
            } else {
                out.push_str("  newstates:\n");
                for (path, state) in &rule.newstates {
                    out.push_str(&format!("  - [{path}, {state}]\n"));
                }
            }
            out.push_str(&format!("  weight: {:?}\n", rule.weight));
        }
        out
    }
}

fn yaml_scalar(text: &str) -> String {
    serde_yaml::to_string(text)
        .map(|s| s.trim_end().to_string())
        .unwrap_or_else(|_| text.to_string())
}

pub fn classify(transducer: &Transducer) -> Classification {
    let rules = transducer.rules();
    Classification {
        linear: rules.iter().all(Rule::is_linear),
        nondeleting: rules.iter().all(Rule::is_nondeleting),
        extended: rules.iter().any(Rule::is_extended),
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LoadErrorKind {
    #[error("YAML syntax error: {0}")]
    Yaml(String),
    #[error("rule file contains no rules")]
    NoRules,
    #[error("top level must be a sequence of rule entries")]
    NotASequence,
    #[error("entry must be a mapping")]
    NotAMapping,
    #[error("missing required key `{0}`")]
    MissingKey(&'static str),
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("key `{key}`: expected {expected}")]
    BadValue { key: &'static str, expected: &'static str },
    #[error("key `{key}`: {source}")]
    Pattern {
        key: &'static str,
        #[source]
        source: PatternError,
    },
    #[error("{}", join_violations(.0))]
    Invalid(Vec<Violation>),
}

fn join_violations(v: &[Violation]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

#[derive(Debug, Clone, PartialEq, Error)]
pub struct LoadError {
    /// 1-based entry index, when the error belongs to one entry.
    pub entry: Option<usize>,
    pub kind: LoadErrorKind,
}

impl LoadError {
    fn at(entry: usize, kind: LoadErrorKind) -> LoadError {
        LoadError {
            entry: Some(entry),
            kind,
        }
    }

    fn file(kind: LoadErrorKind) -> LoadError {
        LoadError { entry: None, kind }
    }
}

impl fmt::Display for LoadError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.entry {
            Some(entry) => write!(f, "rule entry {entry}: {}", self.kind),
            None => self.kind.fmt(f),
        }
    }
}

const KEYS: [&str; 5] = ["state", "lhs", "rhs", "newstates", "weight"];

/// Parses and validates a rule file. Nothing is returned unless every entry
/// is valid.
pub fn load_rules(text: &str) -> Result<Transducer, LoadError> {
    let doc: Value = serde_yaml::from_str(text).map_err(|e| LoadError::file(LoadErrorKind::Yaml(e.to_string())))?;
    let entries = match doc {
        Value::Null => return Err(LoadError::file(LoadErrorKind::NoRules)),
        Value::Sequence(entries) => entries,
        _ => return Err(LoadError::file(LoadErrorKind::NotASequence)),
    };
    if entries.is_empty() {
        return Err(LoadError::file(LoadErrorKind::NoRules));
    }
    let rules = entries
        .iter()
        .enumerate()
        .map(|(i, entry)| parse_entry(i + 1, entry).map_err(|kind| LoadError::at(i + 1, kind)))
        .collect::<Result<Vec<_>, _>>()?;
    Transducer::new(rules, StateName(DEFAULT_INITIAL_STATE.into()))
}

fn parse_entry(index: usize, entry: &Value) -> Result<Rule, LoadErrorKind> {
    let Value::Mapping(map) = entry else {
        return Err(LoadErrorKind::NotAMapping);
    };
    for key in map.keys() {
        let name = scalar_text(key).unwrap_or_else(|| format!("{key:?}"));
        if !KEYS.contains(&name.as_str()) {
            return Err(LoadErrorKind::UnknownKey(name));
        }
    }
    let required = |key: &'static str| map.get(key).ok_or(LoadErrorKind::MissingKey(key));

    let state_text = scalar_text(required("state")?).ok_or(LoadErrorKind::BadValue {
        key: "state",
        expected: "a state name",
    })?;
    let state = StateName::new(&state_text).map_err(|_| LoadErrorKind::BadValue {
        key: "state",
        expected: "a state name without whitespace or parentheses",
    })?;
    let lhs = parse_pattern("lhs", required("lhs")?)?;
    let rhs = parse_pattern("rhs", required("rhs")?)?;

    let newstates = match map.get("newstates") {
        None | Some(Value::Null) => Vec::new(),
        Some(Value::Sequence(items)) => items.iter().map(parse_placement).collect::<Result<_, _>>()?,
        Some(_) => {
            return Err(LoadErrorKind::BadValue {
                key: "newstates",
                expected: "a sequence of [path, state] pairs",
            })
        }
    };

    let weight = match map.get("weight") {
        None => DEFAULT_WEIGHT,
        Some(Value::Number(n)) => n.as_f64().ok_or(LoadErrorKind::BadValue {
            key: "weight",
            expected: "a number",
        })?,
        Some(_) => {
            return Err(LoadErrorKind::BadValue {
                key: "weight",
                expected: "a number",
            })
        }
    };

    Ok(Rule {
        id: RuleId(index),
        state,
        lhs,
        rhs,
        newstates,
        weight,
    })
}

fn scalar_text(value: &Value) -> Option<String> {
    match value {
        Value::String(s) => Some(s.clone()),
        Value::Number(n) => Some(n.to_string()),
        Value::Bool(b) => Some(b.to_string()),
        _ => None,
    }
}

fn parse_pattern(key: &'static str, value: &Value) -> Result<Pattern, LoadErrorKind> {
    let text = scalar_text(value).ok_or(LoadErrorKind::BadValue {
        key,
        expected: "a pattern string",
    })?;
    Pattern::parse(&text).map_err(|source| LoadErrorKind::Pattern { key, source })
}

fn parse_placement(item: &Value) -> Result<(Path, StateName), LoadErrorKind> {
    const BAD: LoadErrorKind = LoadErrorKind::BadValue {
        key: "newstates",
        expected: "[path, state] with path a list of non-negative integers",
    };
    let Value::Sequence(pair) = item else {
        return Err(BAD);
    };
    let [Value::Sequence(steps), state] = pair.as_slice() else {
        return Err(BAD);
    };
    let steps = steps
        .iter()
        .map(|s| s.as_u64().and_then(|n| usize::try_from(n).ok()).ok_or(BAD))
        .collect::<Result<Vec<_>, _>>()?;
    let state = scalar_text(state).and_then(|s| StateName::new(&s).ok()).ok_or(BAD)?;
    Ok((Path::new(steps), state))
}
