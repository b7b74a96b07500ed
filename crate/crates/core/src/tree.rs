//! Ordered labeled trees, tree paths, and the bracketed s-expression format.
//!
//! Trees are immutable and cheap to clone: labels and child lists sit behind
//! `Arc`, so rewriting a subtree shares everything outside the rewritten spine.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// Returns true if `label` is a usable node label: nonempty, with no
/// whitespace and no parentheses.
pub fn is_valid_label(label: &str) -> bool {
    !label.is_empty() && !label.chars().any(|c| c.is_whitespace() || c == '(' || c == ')')
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid label {0:?}: labels must be nonempty and contain no whitespace or parentheses")]
pub struct LabelError(pub String);

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Tree {
    label: Arc<str>,
    children: Arc<[Tree]>,
}

impl Tree {
    pub fn new(label: &str, children: Vec<Tree>) -> Result<Tree, LabelError> {
        if !is_valid_label(label) {
            return Err(LabelError(label.to_string()));
        }
        Ok(Tree::from_parts(label.into(), children.into()))
    }

    pub fn leaf(label: &str) -> Result<Tree, LabelError> {
        Tree::new(label, Vec::new())
    }

    pub(crate) fn from_parts(label: Arc<str>, children: Arc<[Tree]>) -> Tree {
        Tree { label, children }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub(crate) fn label_arc(&self) -> &Arc<str> {
        &self.label
    }

    pub fn children(&self) -> &[Tree] {
        &self.children
    }

    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        1 + self.children.iter().map(Tree::size).sum::<usize>()
    }

    pub fn depth(&self) -> usize {
        1 + self.children.iter().map(Tree::depth).max().unwrap_or(0)
    }

    pub fn leaf_count(&self) -> usize {
        if self.is_leaf() {
            1
        } else {
            self.children.iter().map(Tree::leaf_count).sum()
        }
    }

    /// Left-to-right leaf labels.
    pub fn yield_of(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves<'a>(&'a self, out: &mut Vec<&'a str>) {
        if self.is_leaf() {
            out.push(&self.label);
        } else {
            for child in self.children.iter() {
                child.collect_leaves(out);
            }
        }
    }

    pub fn subtree_at(&self, path: &Path) -> Result<&Tree, PathError> {
        let mut node = self;
        for (step, &index) in path.steps().iter().enumerate() {
            node = node.children.get(index).ok_or(PathError {
                step,
                index,
                arity: node.children.len(),
            })?;
        }
        Ok(node)
    }

    /// Returns a copy of `self` with the subtree at `path` swapped for
    /// `replacement`. Only the nodes along `path` are rebuilt.
    pub fn replace_at(&self, path: &Path, replacement: Tree) -> Result<Tree, PathError> {
        self.replace_from(path.steps(), 0, replacement)
    }

    fn replace_from(&self, steps: &[usize], depth: usize, replacement: Tree) -> Result<Tree, PathError> {
        let Some((&index, rest)) = steps.split_first() else {
            return Ok(replacement);
        };
        let child = self.children.get(index).ok_or(PathError {
            step: depth,
            index,
            arity: self.children.len(),
        })?;
        let new_child = child.replace_from(rest, depth + 1, replacement)?;
        let mut children = self.children.to_vec();
        children[index] = new_child;
        Ok(Tree::from_parts(self.label.clone(), children.into()))
    }

    /// Paths of every node, in preorder.
    pub fn paths(&self) -> Vec<Path> {
        let mut out = Vec::new();
        let mut cur = Vec::new();
        self.collect_paths(&mut cur, &mut out);
        out
    }

    fn collect_paths(&self, cur: &mut Vec<usize>, out: &mut Vec<Path>) {
        out.push(Path::new(cur.clone()));
        for (i, child) in self.children.iter().enumerate() {
            cur.push(i);
            child.collect_paths(cur, out);
            cur.pop();
        }
    }
}

impl fmt::Display for Tree {
    /// Canonical single-line form: leaves bare, internal nodes as
    /// `(label child ...)` separated by single spaces.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_leaf() {
            return f.write_str(&self.label);
        }
        write!(f, "({}", self.label)?;
        for child in self.children.iter() {
            write!(f, " {child}")?;
        }
        f.write_str(")")
    }
}

impl fmt::Debug for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Tree({self})")
    }
}

impl std::str::FromStr for Tree {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Tree, ParseError> {
        parse_sexpr(s)
    }
}

/// A sequence of 0-based child indices; the empty path is the root.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Path(Vec<usize>);

impl Path {
    pub fn new(steps: Vec<usize>) -> Path {
        Path(steps)
    }

    pub fn root() -> Path {
        Path(Vec::new())
    }

    pub fn steps(&self) -> &[usize] {
        &self.0
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// True if `self` is a (non-strict) prefix of `other`.
    pub fn is_prefix_of(&self, other: &Path) -> bool {
        other.0.starts_with(&self.0)
    }

    pub fn join(&self, rest: &Path) -> Path {
        let mut steps = self.0.clone();
        steps.extend_from_slice(&rest.0);
        Path(steps)
    }

    pub fn child(&self, index: usize) -> Path {
        let mut steps = self.0.clone();
        steps.push(index);
        Path(steps)
    }
}

impl From<Vec<usize>> for Path {
    fn from(steps: Vec<usize>) -> Path {
        Path(steps)
    }
}

impl<const N: usize> From<[usize; N]> for Path {
    fn from(steps: [usize; N]) -> Path {
        Path(steps.to_vec())
    }
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, step) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{step}")?;
        }
        f.write_str("]")
    }
}

impl fmt::Debug for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Path{self}")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid path: step {step} selects child {index} of a node with {arity} children")]
pub struct PathError {
    /// Position within the path of the failing step.
    pub step: usize,
    pub index: usize,
    pub arity: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    EmptyInput,
    /// An opening parenthesis was never closed.
    Unclosed,
    /// A closing parenthesis with no matching opener.
    UnexpectedClose,
    EmptyNode,
    /// `(` not followed by a label token.
    MissingLabel,
    /// `(label)` with no children.
    NoChildren,
    TrailingContent,
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ParseErrorKind::EmptyInput => "empty input",
            ParseErrorKind::Unclosed => "unbalanced parentheses: missing ')'",
            ParseErrorKind::UnexpectedClose => "unbalanced parentheses: unexpected ')'",
            ParseErrorKind::EmptyNode => "empty node '()'",
            ParseErrorKind::MissingLabel => "expected a label after '('",
            ParseErrorKind::NoChildren => "bracketed node has no children (write leaves bare)",
            ParseErrorKind::TrailingContent => "trailing content after complete expression",
        })
    }
}

/// S-expression syntax error. `position` counts characters (not bytes)
/// from the start of the input.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{kind} at character {position}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub position: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token<'a> {
    Open,
    Close,
    Atom(&'a str),
}

struct Lexer<'a> {
    text: &'a str,
    chars: std::iter::Peekable<std::str::CharIndices<'a>>,
    char_pos: usize,
}

impl<'a> Lexer<'a> {
    fn new(text: &'a str) -> Self {
        Lexer {
            text,
            chars: text.char_indices().peekable(),
            char_pos: 0,
        }
    }

    fn bump(&mut self) -> Option<(usize, char)> {
        let next = self.chars.next();
        if next.is_some() {
            self.char_pos += 1;
        }
        next
    }

    /// Next token with its character position, or the end position.
    fn next_token(&mut self) -> Result<(Token<'a>, usize), usize> {
        while let Some(&(_, c)) = self.chars.peek() {
            if c.is_whitespace() {
                self.bump();
            } else {
                break;
            }
        }
        let pos = self.char_pos;
        let Some((start, c)) = self.bump() else {
            return Err(pos);
        };
        match c {
            '(' => Ok((Token::Open, pos)),
            ')' => Ok((Token::Close, pos)),
            _ => {
                let mut end = start + c.len_utf8();
                while let Some(&(i, c)) = self.chars.peek() {
                    if c.is_whitespace() || c == '(' || c == ')' {
                        break;
                    }
                    end = i + c.len_utf8();
                    self.bump();
                }
                Ok((Token::Atom(&self.text[start..end]), pos))
            }
        }
    }
}

/// Parses a single bracketed tree such as `(S (NP (PRP I)) (VP (VB am) (JJ hungry)))`.
/// A bare token parses as a leaf.
pub fn parse_sexpr(text: &str) -> Result<Tree, ParseError> {
    let mut lexer = Lexer::new(text);
    let tree = match lexer.next_token() {
        Err(position) => {
            return Err(ParseError {
                kind: ParseErrorKind::EmptyInput,
                position,
            })
        }
        Ok((Token::Atom(label), _)) => Tree::from_parts(label.into(), Arc::from([])),
        Ok((Token::Close, position)) => {
            return Err(ParseError {
                kind: ParseErrorKind::UnexpectedClose,
                position,
            })
        }
        Ok((Token::Open, position)) => parse_node(&mut lexer, position)?,
    };
    match lexer.next_token() {
        Err(_) => Ok(tree),
        Ok((Token::Close, position)) => Err(ParseError {
            kind: ParseErrorKind::UnexpectedClose,
            position,
        }),
        Ok((_, position)) => Err(ParseError {
            kind: ParseErrorKind::TrailingContent,
            position,
        }),
    }
}

// Called just after an opening parenthesis at `open_pos` has been consumed.
fn parse_node(lexer: &mut Lexer<'_>, open_pos: usize) -> Result<Tree, ParseError> {
    let label = match lexer.next_token() {
        Ok((Token::Atom(label), _)) => label,
        Ok((Token::Close, _)) => {
            return Err(ParseError {
                kind: ParseErrorKind::EmptyNode,
                position: open_pos,
            })
        }
        Ok((Token::Open, position)) => {
            return Err(ParseError {
                kind: ParseErrorKind::MissingLabel,
                position,
            })
        }
        Err(position) => {
            return Err(ParseError {
                kind: ParseErrorKind::Unclosed,
                position,
            })
        }
    };
    let mut children = Vec::new();
    loop {
        match lexer.next_token() {
            Ok((Token::Atom(atom), _)) => children.push(Tree::from_parts(atom.into(), Arc::from([]))),
            Ok((Token::Open, position)) => children.push(parse_node(lexer, position)?),
            Ok((Token::Close, _)) => break,
            Err(position) => {
                return Err(ParseError {
                    kind: ParseErrorKind::Unclosed,
                    position,
                })
            }
        }
    }
    if children.is_empty() {
        return Err(ParseError {
            kind: ParseErrorKind::NoChildren,
            position: open_pos,
        });
    }
    Ok(Tree::from_parts(label.into(), children.into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(s: &str) -> Tree {
        parse_sexpr(s).unwrap()
    }

    #[test]
    fn parses_penn_style_tree() {
        let tree = t("(S (NP (PRP I)) (VP (VB am) (JJ hungry)))");
        assert_eq!(tree.label(), "S");
        assert_eq!(tree.children().len(), 2);
        assert_eq!(tree.children()[0].to_string(), "(NP (PRP I))");
        assert_eq!(tree.children()[1].children()[1].children()[0].label(), "hungry");
    }

    #[test]
    fn bare_token_is_leaf() {
        let tree = t("X");
        assert_eq!(tree.label(), "X");
        assert!(tree.is_leaf());
        assert_eq!(t("  X \n"), tree);
    }

    #[test]
    fn whitespace_is_insignificant() {
        let a = t("(A (B D E) (C F G))");
        let b = t("(A\n   (B  D\tE)\n (C F G) )");
        assert_eq!(a, b);
        assert_eq!(b.to_string(), "(A (B D E) (C F G))");
    }

    #[test]
    fn unicode_labels_survive() {
        let tree = t("(S (NP Mary) (VP (V manque) (PP (P à) (NP John))))");
        assert_eq!(tree.yield_of(), vec!["Mary", "manque", "à", "John"]);
        assert_eq!(t("(NN puñaladas)").to_string(), "(NN puñaladas)");
    }

    #[test]
    fn parse_errors_carry_kind_and_position() {
        let err = parse_sexpr("(S (NP").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::Unclosed);
        assert_eq!(err.position, 6);

        assert_eq!(parse_sexpr("").unwrap_err().kind, ParseErrorKind::EmptyInput);
        assert_eq!(parse_sexpr("  \n").unwrap_err().kind, ParseErrorKind::EmptyInput);

        let err = parse_sexpr("(A B) C").unwrap_err();
        assert_eq!(
            err,
            ParseError {
                kind: ParseErrorKind::TrailingContent,
                position: 6
            }
        );

        let err = parse_sexpr("(A B))").unwrap_err();
        assert_eq!(
            err,
            ParseError {
                kind: ParseErrorKind::UnexpectedClose,
                position: 5
            }
        );

        let err = parse_sexpr("(A () B)").unwrap_err();
        assert_eq!(
            err,
            ParseError {
                kind: ParseErrorKind::EmptyNode,
                position: 3
            }
        );

        assert_eq!(parse_sexpr("()").unwrap_err().kind, ParseErrorKind::EmptyNode);
        assert_eq!(parse_sexpr(")").unwrap_err().kind, ParseErrorKind::UnexpectedClose);
        assert_eq!(parse_sexpr("((A B))").unwrap_err().kind, ParseErrorKind::MissingLabel);
        assert_eq!(parse_sexpr("(A)").unwrap_err().kind, ParseErrorKind::NoChildren);
    }

    #[test]
    fn error_position_counts_characters() {
        // "à" is two bytes but one character.
        let err = parse_sexpr("(P à").unwrap_err();
        assert_eq!(err.position, 4);
    }

    #[test]
    fn serialize_examples() {
        assert_eq!(Tree::leaf("X").unwrap().to_string(), "X");
        let tree = Tree::new(
            "A",
            vec![
                Tree::new("B", vec![Tree::leaf("D").unwrap(), Tree::leaf("E").unwrap()]).unwrap(),
                Tree::new("C", vec![Tree::leaf("F").unwrap(), Tree::leaf("G").unwrap()]).unwrap(),
            ],
        )
        .unwrap();
        assert_eq!(tree.to_string(), "(A (B D E) (C F G))");
    }

    #[test]
    fn constructor_rejects_bad_labels() {
        assert!(Tree::leaf("").is_err());
        assert!(Tree::leaf("a b").is_err());
        assert!(Tree::leaf("a(").is_err());
        assert!(Tree::leaf("é").is_ok());
    }

    #[test]
    fn yields() {
        assert_eq!(
            t("(S (NP (PRP I)) (VP (VB am) (JJ hungry)))").yield_of(),
            vec!["I", "am", "hungry"]
        );
        assert_eq!(t("X").yield_of(), vec!["X"]);
    }

    #[test]
    fn subtree_addressing() {
        let tree = t("(A (B D E) (C F G))");
        assert_eq!(tree.subtree_at(&Path::root()).unwrap(), &tree);
        assert_eq!(tree.subtree_at(&Path::from([0, 1])).unwrap(), &t("E"));

        let rhs = t("(S (NP ?x0) (VP (VB habe) ?x1))");
        assert_eq!(rhs.subtree_at(&Path::from([1, 1])).unwrap(), &t("?x1"));
    }

    #[test]
    fn subtree_reports_failing_step() {
        let tree = t("(A (B D E) (C F G))");
        let err = tree.subtree_at(&Path::from([1, 5])).unwrap_err();
        assert_eq!(
            err,
            PathError {
                step: 1,
                index: 5,
                arity: 2
            }
        );
        let err = tree.subtree_at(&Path::from([0, 0, 0])).unwrap_err();
        assert_eq!(
            err,
            PathError {
                step: 2,
                index: 0,
                arity: 0
            }
        );
    }

    #[test]
    fn replacement() {
        let tree = t("(A (B D E) (C F G))");
        let u = t("U");
        assert_eq!(tree.replace_at(&Path::root(), u.clone()).unwrap(), u);
        let replaced = tree.replace_at(&Path::from([0]), u).unwrap();
        assert_eq!(replaced, t("(A U (C F G))"));
        // original untouched
        assert_eq!(tree.to_string(), "(A (B D E) (C F G))");
        assert!(tree.replace_at(&Path::from([2]), t("Z")).is_err());
    }

    #[test]
    fn path_helpers() {
        let p = Path::from([1, 1]);
        assert!(Path::root().is_prefix_of(&p));
        assert!(p.is_prefix_of(&p));
        assert!(!Path::from([1, 0]).is_prefix_of(&p));
        assert_eq!(Path::from([1]).join(&Path::from([0, 2])), Path::from([1, 0, 2]));
        assert_eq!(p.to_string(), "[1, 1]");
        assert!(Path::from([0, 5]) < Path::from([1]));
        assert!(Path::from([0]) < Path::from([0, 0]));
    }

    #[test]
    fn counts() {
        let tree = t("(A (B D E) (C F G))");
        assert_eq!(tree.size(), 7);
        assert_eq!(tree.depth(), 3);
        assert_eq!(tree.leaf_count(), 4);
        assert_eq!(tree.paths().len(), 7);
    }
}
