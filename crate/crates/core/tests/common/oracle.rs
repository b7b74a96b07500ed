//! Brute-force enumerator of complete transductions, kept apart from the
//! engine: it recurses top-down over rule choices and has its own matcher.
//! Only the tree data type, path helpers and loaded rule records are shared.

use std::collections::BTreeMap;

use xtt::{Rule, Transducer, Tree};

/// Serialized output tree to summed weight.
pub type Outcomes = BTreeMap<String, f64>;

pub fn enumerate(transducer: &Transducer, tree: &Tree) -> Outcomes {
    let mut depth_guard = 0;
    enumerate_state(transducer, transducer.initial_state().as_str(), tree, &mut depth_guard)
        .into_iter()
        .map(|(t, w)| (t.to_string(), w))
        .collect()
}

const MAX_DEPTH: usize = 64;

fn enumerate_state(transducer: &Transducer, state: &str, tree: &Tree, depth: &mut usize) -> Vec<(Tree, f64)> {
    *depth += 1;
    assert!(*depth < MAX_DEPTH, "oracle recursion too deep; rule set loops");
    let mut totals: BTreeMap<Tree, f64> = BTreeMap::new();
    for rule in transducer.rules().iter().filter(|r| r.state.as_str() == state) {
        let Some(bindings) = bind(rule.lhs.as_tree(), tree) else {
            continue;
        };
        let base = fill(rule.rhs.as_tree(), &bindings);
        let mut partial = vec![(base, rule.weight)];
        for (path, sub_state) in &rule.newstates {
            let mut extended = Vec::new();
            for (candidate, weight) in &partial {
                let subtree = candidate.subtree_at(path).unwrap().clone();
                for (result, sub_weight) in enumerate_state(transducer, sub_state.as_str(), &subtree, depth) {
                    extended.push((candidate.replace_at(path, result).unwrap(), weight * sub_weight));
                }
            }
            partial = extended;
        }
        for (t, w) in partial {
            *totals.entry(t).or_insert(0.0) += w;
        }
    }
    *depth -= 1;
    totals.into_iter().collect()
}

fn is_var(label: &str) -> bool {
    label.starts_with('?') && label.len() > 1
}

fn bind(pattern: &Tree, tree: &Tree) -> Option<BTreeMap<String, Tree>> {
    let mut out = BTreeMap::new();
    bind_into(pattern, tree, &mut out).then_some(out)
}

fn bind_into(pattern: &Tree, tree: &Tree, out: &mut BTreeMap<String, Tree>) -> bool {
    if is_var(pattern.label()) {
        out.insert(pattern.label().to_string(), tree.clone());
        return true;
    }
    if pattern.label() != tree.label() || pattern.children().len() != tree.children().len() {
        return false;
    }
    pattern
        .children()
        .iter()
        .zip(tree.children())
        .all(|(p, t)| bind_into(p, t, out))
}

fn fill(pattern: &Tree, bindings: &BTreeMap<String, Tree>) -> Tree {
    if is_var(pattern.label()) {
        return bindings[pattern.label()].clone();
    }
    let children = pattern.children().iter().map(|c| fill(c, bindings)).collect();
    Tree::new(pattern.label(), children).unwrap()
}

#[allow(dead_code)]
pub fn rule_weight_product(transducer: &Transducer, rules: impl IntoIterator<Item = xtt::RuleId>) -> f64 {
    rules
        .into_iter()
        .map(|id| transducer.rule(id).map(|r: &Rule| r.weight).unwrap())
        .product()
}
