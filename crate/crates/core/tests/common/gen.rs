//! proptest strategies for trees, patterns and small acyclic transducers.

use proptest::prelude::*;
use xtt::rules::{Rule, RuleId};
use xtt::{Path, Pattern, StateName, Transducer, Tree};

pub fn label() -> impl Strategy<Value = String> {
    prop_oneof![
        prop::sample::select(vec!["S", "NP", "VP", "a", "b", "à", "ñ", "Pokémon", ",", "x-1"]).prop_map(String::from),
        "[A-Za-z][A-Za-z0-9_.]{0,4}",
    ]
}

/// Trees of depth at most `depth` and branching at most `branching`.
pub fn tree(depth: u32, branching: usize) -> impl Strategy<Value = Tree> {
    let leaf = label().prop_map(|l| Tree::leaf(&l).unwrap());
    leaf.prop_recursive(depth.saturating_sub(1), 256, branching as u32, move |inner| {
        (label(), prop::collection::vec(inner, 1..=branching))
            .prop_map(|(l, children)| Tree::new(&l, children).unwrap())
    })
}

/// A tree together with a left-linear pattern obtained by replacing some of
/// its subtrees with fresh variables.
pub fn tree_and_pattern(depth: u32, branching: usize) -> impl Strategy<Value = (Tree, Pattern)> {
    tree(depth, branching)
        .prop_flat_map(|t| {
            let n = t.size();
            (Just(t), prop::collection::vec(any::<bool>(), n))
        })
        .prop_map(|(t, cut)| {
            let mut counter = 0;
            let mut index = 0;
            let p = abstract_tree(&t, &cut, &mut index, &mut counter);
            (t, Pattern::from_tree(p).unwrap())
        })
}

fn abstract_tree(t: &Tree, cut: &[bool], index: &mut usize, counter: &mut usize) -> Tree {
    let here = *index;
    *index += 1;
    if cut[here] {
        *index += t.size() - 1;
        let name = format!("?v{counter}");
        *counter += 1;
        return Tree::leaf(&name).unwrap();
    }
    let children = t
        .children()
        .iter()
        .map(|c| abstract_tree(c, cut, index, counter))
        .collect();
    Tree::new(t.label(), children).unwrap()
}

/// Small ranked alphabet used for random transducer checks.
const SYMBOLS: &[(&str, usize)] = &[("f", 2), ("g", 1), ("h", 3), ("a", 0), ("b", 0)];
const STATES: &[&str] = &["q", "r", "s"];

pub fn ranked_tree(depth: u32) -> BoxedStrategy<Tree> {
    let leaf = prop::sample::select(vec!["a", "b"]).prop_map(|l| Tree::leaf(l).unwrap());
    if depth <= 1 {
        return leaf.boxed();
    }
    let sub = ranked_tree(depth - 1);
    prop_oneof![
        1 => leaf,
        3 => (prop::sample::select(vec![("f", 2usize), ("g", 1), ("h", 3)]), prop::collection::vec(sub, 3))
            .prop_map(|((l, k), kids)| Tree::new(l, kids.into_iter().take(k).collect()).unwrap()),
    ]
    .boxed()
}

fn pick_state() -> impl Strategy<Value = StateName> {
    prop::sample::select(STATES.to_vec()).prop_map(|s| StateName::new(s).unwrap())
}

/// One rule whose lhs root is a literal, so every newstate placed on a
/// variable revisits a strictly smaller subtree and search terminates.
fn rule() -> impl Strategy<Value = Rule> {
    let symbol = prop::sample::select(SYMBOLS.to_vec());
    (
        pick_state(),
        symbol,
        prop::collection::vec(prop::option::of(prop::sample::select(vec!["a", "b"])), 3),
        prop::sample::select(vec!["f", "g", "h", "k", "c"]),
        prop::collection::vec((0usize..4, pick_state()), 0..4),
        prop::sample::select(vec![0.5, 1.0, 0.25, 0.1, 2.0]),
    )
        .prop_map(|(state, (root, arity), literal_kids, out_label, picks, weight)| {
            let mut vars = Vec::new();
            let lhs_kids: Vec<Tree> = (0..arity)
                .map(|i| match literal_kids[i] {
                    Some(l) => Tree::leaf(l).unwrap(),
                    None => {
                        let v = format!("?x{i}");
                        vars.push(v.clone());
                        Tree::leaf(&v).unwrap()
                    }
                })
                .collect();
            let lhs = Tree::new(root, lhs_kids).unwrap();
            // rhs: out_label over a selection of variables (possibly repeated or dropped)
            let mut rhs_kids = Vec::new();
            let mut newstates = Vec::new();
            for (pick, st) in picks {
                if vars.is_empty() {
                    rhs_kids.push(Tree::leaf("c").unwrap());
                    continue;
                }
                let v = &vars[pick % vars.len()];
                newstates.push((Path::from(vec![rhs_kids.len()]), st));
                rhs_kids.push(Tree::leaf(v).unwrap());
            }
            let rhs = if rhs_kids.is_empty() {
                Tree::leaf(out_label).unwrap()
            } else {
                Tree::new(out_label, rhs_kids).unwrap()
            };
            Rule {
                id: RuleId(0),
                state,
                lhs: Pattern::from_tree(lhs).unwrap(),
                rhs: Pattern::from_tree(rhs).unwrap(),
                newstates,
                weight,
            }
        })
}

pub fn transducer() -> impl Strategy<Value = Transducer> {
    prop::collection::vec(rule(), 1..8).prop_map(|rules| Transducer::new(rules, StateName::new("q").unwrap()).unwrap())
}
