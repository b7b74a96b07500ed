//! Nondeterministic transduction over state-annotated trees.
//!
//! Search is generational: every configuration in the frontier is expanded at
//! every applicable site, identical configurations are merged, and complete
//! (state-free) configurations move to the output set.
//!
//! Two derivations that differ only in the order of independent steps (steps
//! at disjoint sites) describe the same transduction and are counted once.
//! Each derivation is kept in a canonical order: whenever several steps are
//! ready, the one at the lexicographically smallest site comes first.

use std::collections::BTreeMap;
use std::fmt;
use std::num::NonZeroUsize;

use thiserror::Error;

use crate::pattern::Bindings;
use crate::rules::{Rule, RuleId, StateName, Transducer};
use crate::tree::{Path, Tree};

pub const DEFAULT_MAX_STEPS: usize = 10_000;

/// A tree with states attached to some of its nodes. Annotated paths are
/// pairwise prefix-free.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AnnotatedTree {
    tree: Tree,
    annotations: BTreeMap<Path, StateName>,
}

impl AnnotatedTree {
    /// The input tree with its root in `state`.
    pub fn initial(tree: Tree, state: StateName) -> AnnotatedTree {
        let mut annotations = BTreeMap::new();
        annotations.insert(Path::root(), state);
        AnnotatedTree { tree, annotations }
    }

    pub fn tree(&self) -> &Tree {
        &self.tree
    }

    pub fn into_tree(self) -> Tree {
        self.tree
    }

    pub fn annotations(&self) -> &BTreeMap<Path, StateName> {
        &self.annotations
    }

    pub fn state_at(&self, path: &Path) -> Option<&StateName> {
        self.annotations.get(path)
    }

    pub fn is_complete(&self) -> bool {
        self.annotations.is_empty()
    }

    /// Bracketed form with each annotated node prefixed by `{state}`,
    /// e.g. `(A (R {q}(C F G) U) (S X))`.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let mut cur = Vec::new();
        self.render_node(&self.tree, &mut cur, &mut out);
        out
    }

    fn render_node(&self, node: &Tree, cur: &mut Vec<usize>, out: &mut String) {
        if let Some(state) = self.annotations.get(&Path::new(cur.clone())) {
            out.push('{');
            out.push_str(state.as_str());
            out.push('}');
        }
        if node.is_leaf() {
            out.push_str(node.label());
            return;
        }
        out.push('(');
        out.push_str(node.label());
        for (i, child) in node.children().iter().enumerate() {
            out.push(' ');
            cur.push(i);
            self.render_node(child, cur, out);
            cur.pop();
        }
        out.push(')');
    }
}

impl fmt::Debug for AnnotatedTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "AnnotatedTree({})", self.render())
    }
}

impl fmt::Display for AnnotatedTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

pub fn initial(tree: Tree, state: StateName) -> AnnotatedTree {
    AnnotatedTree::initial(tree, state)
}

#[derive(Debug, Clone)]
pub struct Site<'t> {
    pub rule: &'t Rule,
    pub path: Path,
    pub bindings: Bindings,
}

/// Every (rule, site, bindings) whose rule state equals the state at the
/// site and whose lhs matches the subtree there; ordered by site, then rule id.
pub fn applicable_sites<'t>(at: &AnnotatedTree, transducer: &'t Transducer) -> Vec<Site<'t>> {
    let mut sites = Vec::new();
    for (path, state) in &at.annotations {
        debug_assert!(
            at.annotations
                .range(path..)
                .skip(1)
                .take_while(|(p, _)| path.is_prefix_of(p))
                .next()
                .is_none(),
            "annotation nested below {path}"
        );
        let subtree = at
            .tree
            .subtree_at(path)
            .expect("annotation paths always address existing nodes");
        for rule in transducer.rules_for(state) {
            if let Some(bindings) = rule.lhs.match_tree(subtree) {
                sites.push(Site {
                    rule,
                    path: path.clone(),
                    bindings,
                });
            }
        }
    }
    sites
}

/// Rewrites the subtree at `site` with the rule's instantiated rhs, clears
/// the site's state and places the rule's new states below the site.
pub fn apply_rule(at: &AnnotatedTree, site: &Path, rule: &Rule, bindings: &Bindings) -> AnnotatedTree {
    let rhs = rule
        .rhs
        .substitute(bindings)
        .expect("rhs variables are a subset of lhs variables");
    let tree = at.tree.replace_at(site, rhs).expect("site addresses an existing node");
    let mut annotations = at.annotations.clone();
    annotations.remove(site);
    for (path, state) in &rule.newstates {
        annotations.insert(site.join(path), state.clone());
    }
    AnnotatedTree { tree, annotations }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Step {
    pub rule: RuleId,
    pub site: Path,
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let steps: Vec<String> = self.site.steps().iter().map(ToString::to_string).collect();
        write!(f, "{}@[{}]", self.rule, steps.join(","))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Derivation {
    pub steps: Vec<Step>,
    /// Product of the weights of the applied rules.
    pub weight: f64,
}

impl Derivation {
    pub fn empty() -> Derivation {
        Derivation {
            steps: Vec::new(),
            weight: 1.0,
        }
    }
}

/// Reorders a valid step sequence into canonical order. A step depends on the
/// latest earlier step whose site is a prefix of (or equal to) its own site;
/// among ready steps the smallest site goes first. Annotations are prefix-free
/// at every point, so ready steps never share a site.
pub fn canonical_order(steps: &[Step]) -> Vec<Step> {
    let n = steps.len();
    let parent: Vec<Option<usize>> = (0..n)
        .map(|j| (0..j).rev().find(|&i| steps[i].site.is_prefix_of(&steps[j].site)))
        .collect();
    let mut emitted = vec![false; n];
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let next = (0..n)
            .filter(|&j| !emitted[j] && parent[j].is_none_or(|p| emitted[p]))
            .min_by(|&a, &b| steps[a].site.cmp(&steps[b].site).then(a.cmp(&b)))
            .expect("dependency forest always has a ready step");
        emitted[next] = true;
        out.push(steps[next].clone());
    }
    out
}

#[derive(Debug, Clone)]
pub struct TransduceOptions {
    /// Configurations kept per generation; `None` is unlimited.
    pub beam: Option<NonZeroUsize>,
    /// Cap on rule applications over the whole search.
    pub max_steps: usize,
    pub initial_state: Option<StateName>,
    /// Keep the stuck configurations themselves, not just their count.
    pub collect_stuck: bool,
}

impl Default for TransduceOptions {
    fn default() -> Self {
        TransduceOptions {
            beam: None,
            max_steps: DEFAULT_MAX_STEPS,
            initial_state: None,
            collect_stuck: false,
        }
    }
}

impl TransduceOptions {
    pub fn with_beam(mut self, width: usize) -> Self {
        self.beam = NonZeroUsize::new(width);
        self
    }

    pub fn with_max_steps(mut self, max_steps: usize) -> Self {
        self.max_steps = max_steps;
        self
    }

    pub fn with_initial_state(mut self, state: StateName) -> Self {
        self.initial_state = Some(state);
        self
    }
}

#[derive(Debug, Clone)]
pub struct Output {
    pub tree: Tree,
    /// Sum of the supporting derivation weights.
    pub weight: f64,
    pub derivations: Vec<Derivation>,
}

#[derive(Debug, Clone, Default)]
pub struct TransductionResult {
    /// Sorted by weight descending, then serialized tree ascending.
    pub outputs: Vec<Output>,
    pub stuck_count: usize,
    pub stuck: Vec<AnnotatedTree>,
    /// Set when the beam dropped configurations or the step cap was hit.
    pub truncated: bool,
    pub expansions: usize,
}

impl TransductionResult {
    pub fn is_complete(&self) -> bool {
        !self.outputs.is_empty()
    }
}

/// Canonical step sequence to derivation weight.
type DerivationSet = BTreeMap<Vec<Step>, f64>;

fn total_weight(set: &DerivationSet) -> f64 {
    set.values().sum()
}

fn merge_into(target: &mut DerivationSet, source: DerivationSet) {
    for (steps, weight) in source {
        target.entry(steps).or_insert(weight);
    }
}

pub fn transduce(tree: &Tree, transducer: &Transducer, options: &TransduceOptions) -> TransductionResult {
    let state = options
        .initial_state
        .clone()
        .unwrap_or_else(|| transducer.initial_state().clone());

    let mut result = TransductionResult::default();
    let mut outputs: BTreeMap<Tree, DerivationSet> = BTreeMap::new();
    let mut frontier: BTreeMap<AnnotatedTree, DerivationSet> = BTreeMap::new();
    frontier.insert(
        AnnotatedTree::initial(tree.clone(), state),
        BTreeMap::from([(Vec::new(), 1.0)]),
    );

    while !frontier.is_empty() {
        let mut next: BTreeMap<AnnotatedTree, DerivationSet> = BTreeMap::new();
        let mut halted = false;

        'expand: for (config, derivations) in &frontier {
            let sites = applicable_sites(config, transducer);
            if sites.is_empty() {
                result.stuck_count += 1;
                if options.collect_stuck {
                    result.stuck.push(config.clone());
                }
                continue;
            }
            for site in sites {
                if result.expansions >= options.max_steps {
                    halted = true;
                    break 'expand;
                }
                result.expansions += 1;
                let successor = apply_rule(config, &site.path, site.rule, &site.bindings);
                let step = Step {
                    rule: site.rule.id,
                    site: site.path.clone(),
                };
                let entry = next.entry(successor).or_default();
                for (steps, weight) in derivations {
                    let mut extended = steps.clone();
                    extended.push(step.clone());
                    entry
                        .entry(canonical_order(&extended))
                        .or_insert(weight * site.rule.weight);
                }
            }
        }

        let mut generation: Vec<(AnnotatedTree, DerivationSet)> = next.into_iter().collect();
        if let Some(width) = options.beam {
            if generation.len() > width.get() {
                let mut ranked: Vec<(f64, String, AnnotatedTree, DerivationSet)> = generation
                    .into_iter()
                    .map(|(c, d)| (total_weight(&d), c.render(), c, d))
                    .collect();
                ranked.sort_by(|a, b| b.0.total_cmp(&a.0).then_with(|| a.1.cmp(&b.1)));
                ranked.truncate(width.get());
                generation = ranked.into_iter().map(|(_, _, c, d)| (c, d)).collect();
                result.truncated = true;
            }
        }

        frontier = BTreeMap::new();
        for (config, derivations) in generation {
            if config.is_complete() {
                merge_into(outputs.entry(config.into_tree()).or_default(), derivations);
            } else {
                frontier.insert(config, derivations);
            }
        }

        if halted {
            result.truncated = true;
            break;
        }
    }

    result.outputs = outputs
        .into_iter()
        .map(|(tree, set)| Output {
            tree,
            weight: total_weight(&set),
            derivations: set
                .into_iter()
                .map(|(steps, weight)| Derivation { steps, weight })
                .collect(),
        })
        .collect();
    sort_outputs(&mut result.outputs);
    result
}

fn sort_outputs(outputs: &mut [Output]) {
    outputs.sort_by(|a, b| {
        b.weight
            .total_cmp(&a.weight)
            .then_with(|| a.tree.to_string().cmp(&b.tree.to_string()))
    });
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReplayError {
    #[error("step {index}: unknown rule {rule}")]
    UnknownRule { index: usize, rule: RuleId },
    #[error("step {index}: rule {rule} is not applicable at {site}")]
    Inapplicable { index: usize, rule: RuleId, site: Path },
}

/// Re-applies a recorded step sequence from the initial configuration.
pub fn replay(tree: &Tree, transducer: &Transducer, steps: &[Step]) -> Result<AnnotatedTree, ReplayError> {
    let mut at = AnnotatedTree::initial(tree.clone(), transducer.initial_state().clone());
    for (index, step) in steps.iter().enumerate() {
        let rule = transducer
            .rule(step.rule)
            .ok_or(ReplayError::UnknownRule { index, rule: step.rule })?;
        let inapplicable = || ReplayError::Inapplicable {
            index,
            rule: step.rule,
            site: step.site.clone(),
        };
        if at.state_at(&step.site) != Some(&rule.state) {
            return Err(inapplicable());
        }
        let subtree = at.tree.subtree_at(&step.site).map_err(|_| inapplicable())?;
        let bindings = rule.lhs.match_tree(subtree).ok_or_else(inapplicable)?;
        at = apply_rule(&at, &step.site, rule, &bindings);
    }
    Ok(at)
}
