//! Bundled rule files and transduction fixtures.
//!
//! Everything here is compiled into the library, so fixtures can be listed
//! and run without touching the filesystem. The same files live on disk under
//! `corpus/` in this crate for use with the command-line tool.

use std::collections::BTreeMap;
use std::fmt;

use serde::Deserialize;
use thiserror::Error;

use crate::engine::{transduce, TransduceOptions};
use crate::rules::{load_rules, Classification, LoadError, Transducer};
use crate::tree::{parse_sexpr, ParseError};

/// Weight tolerance used when comparing outputs against a fixture.
pub const WEIGHT_TOLERANCE: f64 = 1e-9;

const MANIFEST: &str = include_str!("../corpus/fixtures.yaml");

const RULE_FILES: &[(&str, &str)] = &[
    ("fig2.yaml", include_str!("../corpus/rules/fig2.yaml")),
    ("fig4.yaml", include_str!("../corpus/rules/fig4.yaml")),
    ("lolcat.yaml", include_str!("../corpus/rules/lolcat.yaml")),
    ("german.yaml", include_str!("../corpus/rules/german.yaml")),
    ("spanish.yaml", include_str!("../corpus/rules/spanish.yaml")),
];

const INVALID_FILES: &[(&str, &str)] = &[
    ("missing-key.yaml", include_str!("../corpus/invalid/missing-key.yaml")),
    (
        "rhs-only-variable.yaml",
        include_str!("../corpus/invalid/rhs-only-variable.yaml"),
    ),
    ("bad-path.yaml", include_str!("../corpus/invalid/bad-path.yaml")),
    ("nested-paths.yaml", include_str!("../corpus/invalid/nested-paths.yaml")),
    (
        "negative-weight.yaml",
        include_str!("../corpus/invalid/negative-weight.yaml"),
    ),
    ("unknown-key.yaml", include_str!("../corpus/invalid/unknown-key.yaml")),
    ("empty.yaml", include_str!("../corpus/invalid/empty.yaml")),
];

/// Directory holding the on-disk copy of the corpus.
pub fn corpus_dir() -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus")
}

pub fn rule_file_names() -> impl Iterator<Item = &'static str> {
    RULE_FILES.iter().map(|(name, _)| *name)
}

pub fn rule_file(name: &str) -> Option<&'static str> {
    RULE_FILES.iter().find(|(n, _)| *n == name).map(|(_, text)| *text)
}

pub fn invalid_rule_file(name: &str) -> Option<&'static str> {
    INVALID_FILES.iter().find(|(n, _)| *n == name).map(|(_, text)| *text)
}

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("fixture manifest: {0}")]
    Manifest(String),
    #[error("fixture {fixture}: unknown rule file {file}")]
    MissingRuleFile { fixture: String, file: String },
    #[error("fixture {fixture}: rule file does not load: {source}")]
    Rules {
        fixture: String,
        #[source]
        source: LoadError,
    },
    #[error("fixture {fixture}: bad tree {text:?}: {source}")]
    Tree {
        fixture: String,
        text: String,
        #[source]
        source: ParseError,
    },
    #[error("fixture {fixture}: {message}")]
    Inconsistent { fixture: String, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum YieldNormalization {
    Casefold,
    StripPunctuation,
}

/// Applies the listed normalizations to a space-joined yield.
pub fn normalize_yield(text: &str, steps: &[YieldNormalization]) -> String {
    let mut out = text.trim().to_string();
    for step in steps {
        match step {
            YieldNormalization::Casefold => out = out.to_lowercase(),
            YieldNormalization::StripPunctuation => {
                out = out.trim_end_matches(['.', '!', '?']).trim_end().to_string();
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct ExpectedOutput {
    pub tree: String,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expected {
    /// No complete output; at least one configuration gets stuck.
    Stuck,
    Outputs(Vec<ExpectedOutput>),
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawExpected {
    Marker(String),
    Outputs(Vec<ExpectedOutput>),
}

impl<'de> Deserialize<'de> for Expected {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        match RawExpected::deserialize(deserializer)? {
            RawExpected::Marker(m) if m == "stuck" => Ok(Expected::Stuck),
            RawExpected::Marker(m) => Err(serde::de::Error::custom(format!(
                "expected `stuck` or a list of outputs, got {m:?}"
            ))),
            RawExpected::Outputs(v) => Ok(Expected::Outputs(v)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FixtureCase {
    pub input: String,
    #[serde(default)]
    pub target_yield: Option<String>,
    pub expected: Expected,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Fixture {
    pub name: String,
    pub description: String,
    /// Name of the bundled rule file.
    pub rules: String,
    #[serde(default)]
    pub yield_normalization: Vec<YieldNormalization>,
    pub cases: Vec<FixtureCase>,
}

impl Fixture {
    pub fn rules_text(&self) -> Option<&'static str> {
        rule_file(&self.rules)
    }

    pub fn transducer(&self) -> Result<Transducer, CorpusError> {
        let text = self.rules_text().ok_or_else(|| CorpusError::MissingRuleFile {
            fixture: self.name.clone(),
            file: self.rules.clone(),
        })?;
        load_rules(text).map_err(|source| CorpusError::Rules {
            fixture: self.name.clone(),
            source,
        })
    }

    fn check(&self) -> Result<(), CorpusError> {
        self.transducer()?;
        let tree_err = |text: &str, source| CorpusError::Tree {
            fixture: self.name.clone(),
            text: text.to_string(),
            source,
        };
        for case in &self.cases {
            parse_sexpr(&case.input).map_err(|e| tree_err(&case.input, e))?;
            if let Expected::Outputs(outputs) = &case.expected {
                let mut seen = BTreeMap::new();
                for out in outputs {
                    let tree = parse_sexpr(&out.tree).map_err(|e| tree_err(&out.tree, e))?;
                    if seen.insert(tree.to_string(), ()).is_some() {
                        return Err(CorpusError::Inconsistent {
                            fixture: self.name.clone(),
                            message: format!("duplicate expected tree {}", out.tree),
                        });
                    }
                }
                if outputs.is_empty() {
                    return Err(CorpusError::Inconsistent {
                        fixture: self.name.clone(),
                        message: "empty expected set; use `stuck`".into(),
                    });
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassificationFixture {
    pub name: String,
    pub rules: String,
    pub linear: bool,
    pub nondeleting: bool,
    pub extended: bool,
}

impl ClassificationFixture {
    pub fn expected(&self) -> Classification {
        Classification {
            linear: self.linear,
            nondeleting: self.nondeleting,
            extended: self.extended,
        }
    }
}

/// The rule-file error a negative fixture is meant to trigger.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InvalidKind {
    MissingKey,
    RhsOnlyVariable,
    BadPath,
    NestedPaths,
    NegativeWeight,
    UnknownKey,
    Empty,
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InvalidFixture {
    pub name: String,
    pub file: String,
    pub error: InvalidKind,
}

impl InvalidFixture {
    pub fn text(&self) -> Option<&'static str> {
        invalid_rule_file(&self.file)
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Manifest {
    fixtures: Vec<Fixture>,
    classifications: Vec<ClassificationFixture>,
    invalid: Vec<InvalidFixture>,
}

fn manifest() -> Result<Manifest, CorpusError> {
    serde_yaml::from_str(MANIFEST).map_err(|e| CorpusError::Manifest(e.to_string()))
}

/// All transduction fixtures, each checked for internal consistency.
pub fn list_fixtures() -> Result<Vec<Fixture>, CorpusError> {
    let fixtures = manifest()?.fixtures;
    for fixture in &fixtures {
        fixture.check()?;
    }
    Ok(fixtures)
}

pub fn fixture(name: &str) -> Result<Option<Fixture>, CorpusError> {
    Ok(list_fixtures()?.into_iter().find(|f| f.name == name))
}

pub fn classification_fixtures() -> Result<Vec<ClassificationFixture>, CorpusError> {
    let set = manifest()?.classifications;
    for c in &set {
        if rule_file(&c.rules).is_none() {
            return Err(CorpusError::MissingRuleFile {
                fixture: c.name.clone(),
                file: c.rules.clone(),
            });
        }
    }
    Ok(set)
}

pub fn invalid_fixtures() -> Result<Vec<InvalidFixture>, CorpusError> {
    let set = manifest()?.invalid;
    for f in &set {
        if f.text().is_none() {
            return Err(CorpusError::MissingRuleFile {
                fixture: f.name.clone(),
                file: f.file.clone(),
            });
        }
    }
    Ok(set)
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct CaseDiff {
    pub input: String,
    /// Expected (tree, weight) pairs with no matching output.
    pub missing: Vec<(String, f64)>,
    /// Produced (tree, weight) pairs not in the expected set.
    pub unexpected: Vec<(String, f64)>,
    /// (tree, expected weight, actual weight) beyond tolerance.
    pub weight_mismatch: Vec<(String, f64, f64)>,
    /// Expected `stuck` but the input completed, or got no stuck configuration.
    pub not_stuck: bool,
}

impl CaseDiff {
    fn is_empty(&self) -> bool {
        self.missing.is_empty() && self.unexpected.is_empty() && self.weight_mismatch.is_empty() && !self.not_stuck
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FixtureDiff {
    pub fixture: String,
    pub cases: Vec<CaseDiff>,
}

impl fmt::Display for FixtureDiff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "fixture {} failed", self.fixture)?;
        for case in &self.cases {
            writeln!(f, "  input {}", case.input)?;
            if case.not_stuck {
                writeln!(f, "    expected the transduction to get stuck")?;
            }
            for (tree, w) in &case.missing {
                writeln!(f, "    missing    {w:.6}\t{tree}")?;
            }
            for (tree, w) in &case.unexpected {
                writeln!(f, "    unexpected {w:.6}\t{tree}")?;
            }
            for (tree, want, got) in &case.weight_mismatch {
                writeln!(f, "    weight     {tree}: expected {want}, got {got}")?;
            }
        }
        Ok(())
    }
}

impl std::error::Error for FixtureDiff {}

/// Transduces every case of `fixture` and compares the complete output set
/// with the expected one.
pub fn run_fixture(fixture: &Fixture, options: &TransduceOptions) -> Result<(), FixtureDiff> {
    let fail = |message: String| FixtureDiff {
        fixture: fixture.name.clone(),
        cases: vec![CaseDiff {
            input: message,
            ..CaseDiff::default()
        }],
    };
    let transducer = fixture.transducer().map_err(|e| fail(e.to_string()))?;

    let mut diffs = Vec::new();
    for case in &fixture.cases {
        let input = parse_sexpr(&case.input).map_err(|e| fail(e.to_string()))?;
        let result = transduce(&input, &transducer, options);
        let actual: BTreeMap<String, f64> = result.outputs.iter().map(|o| (o.tree.to_string(), o.weight)).collect();

        let mut diff = CaseDiff {
            input: case.input.clone(),
            ..CaseDiff::default()
        };
        match &case.expected {
            Expected::Stuck => {
                if !actual.is_empty() || result.stuck_count == 0 {
                    diff.not_stuck = true;
                }
                diff.unexpected = actual.into_iter().collect();
            }
            Expected::Outputs(expected) => {
                let mut remaining = actual;
                for exp in expected {
                    let key = parse_sexpr(&exp.tree).map_err(|e| fail(e.to_string()))?.to_string();
                    match remaining.remove(&key) {
                        None => diff.missing.push((key, exp.weight)),
                        Some(got) if (got - exp.weight).abs() > WEIGHT_TOLERANCE => {
                            diff.weight_mismatch.push((key, exp.weight, got))
                        }
                        Some(_) => {}
                    }
                }
                diff.unexpected = remaining.into_iter().collect();
            }
        }
        if !diff.is_empty() {
            diffs.push(diff);
        }
    }
    if diffs.is_empty() {
        Ok(())
    } else {
        Err(FixtureDiff {
            fixture: fixture.name.clone(),
            cases: diffs,
        })
    }
}
