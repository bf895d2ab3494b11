use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::lexer::{lex, Tok, Token};
use super::{ErrorKind, ParseError, SourceSpan};
use crate::bt::{LeafOp, NodeKind, OpKind, RepeatCount, SymbolRef, TickStatus, TreeNode, MAX_DEPTH};
use crate::predicator::{PredicateAtom, PredicateQuery};
use crate::world::{Category, GripperTarget};

/// Predicates add two levels of nesting below a leaf.
const MAX_NESTING: usize = MAX_DEPTH + 3;

enum SExpr {
    List { span: SourceSpan, items: Vec<SExpr> },
    Atom(Token),
}

impl SExpr {
    fn span(&self) -> SourceSpan {
        match self {
            SExpr::List { span, .. } => *span,
            SExpr::Atom(t) => t.span,
        }
    }

    fn head(&self) -> Option<&str> {
        match self {
            SExpr::List { items, .. } => match items.first() {
                Some(SExpr::Atom(Token { tok: Tok::Ident(s), .. })) => Some(s),
                _ => None,
            },
            SExpr::Atom(_) => None,
        }
    }
}

fn read(tokens: Vec<Token>, errors: &mut Vec<ParseError>) -> Vec<SExpr> {
    let mut top = Vec::new();
    let mut stack: Vec<(SourceSpan, Vec<SExpr>)> = Vec::new();
    let mut skipping = 0usize;
    for t in tokens {
        if skipping > 0 {
            match t.tok {
                Tok::Open => skipping += 1,
                Tok::Close => skipping -= 1,
                _ => {}
            }
            continue;
        }
        match t.tok {
            Tok::Open if stack.len() >= MAX_NESTING => {
                errors.push(ParseError::new(t.span, ErrorKind::Syntax, format!("nesting deeper than {MAX_DEPTH}")));
                skipping = 1;
            }
            Tok::Open => stack.push((t.span, Vec::new())),
            Tok::Close => match stack.pop() {
                Some((span, items)) => {
                    let list = SExpr::List { span, items };
                    match stack.last_mut() {
                        Some((_, parent)) => parent.push(list),
                        None => top.push(list),
                    }
                }
                None => errors.push(ParseError::new(t.span, ErrorKind::Syntax, "unmatched `)`")),
            },
            _ => match stack.last_mut() {
                Some((_, parent)) => parent.push(SExpr::Atom(t)),
                None => top.push(SExpr::Atom(t)),
            },
        }
    }
    // Close what is left so the contents still get diagnosed.
    while let Some((span, items)) = stack.pop() {
        errors.push(ParseError::new(span, ErrorKind::Syntax, "unclosed `(`"));
        let list = SExpr::List { span, items };
        match stack.last_mut() {
            Some((_, parent)) => parent.push(list),
            None => top.push(list),
        }
    }
    top
}

fn single_form(src: &str, errors: &mut Vec<ParseError>) -> Option<SExpr> {
    let tokens = lex(src, errors);
    let mut forms = read(tokens, errors);
    if forms.is_empty() {
        errors.push(ParseError::new(SourceSpan { line: 1, column: 1, length: 0 }, ErrorKind::Syntax, "empty program"));
        return None;
    }
    for extra in &forms[1..] {
        errors.push(ParseError::new(extra.span(), ErrorKind::Syntax, "expected a single top-level form"));
    }
    forms.truncate(1);
    forms.pop()
}

/// Parses a tree. On failure every diagnosable error is returned.
pub fn parse(src: &str) -> Result<TreeNode, Vec<ParseError>> {
    let mut errors = Vec::new();
    let tree = single_form(src, &mut errors).and_then(|f| convert_node(&f, 1, &mut errors));
    match tree {
        Some(t) if errors.is_empty() => Ok(t),
        _ => Err(errors),
    }
}

/// Parses a standalone predicate such as `(and (is node) (left-of robot))`.
pub fn parse_predicate(src: &str) -> Result<PredicateQuery, Vec<ParseError>> {
    let mut errors = Vec::new();
    let q = single_form(src, &mut errors).and_then(|f| convert_predicate(&f, &mut errors));
    match q {
        Some(q) if errors.is_empty() => Ok(q),
        _ => Err(errors),
    }
}

fn is_predicate_head(s: &str) -> bool {
    matches!(s, "and" | "is" | "found" | "left-of" | "right-of" | "gripper-holding")
}

fn convert_children(items: &[SExpr], depth: usize, errors: &mut Vec<ParseError>) -> Option<Vec<TreeNode>> {
    let mut out = Vec::new();
    let mut ok = true;
    for item in items {
        match convert_node(item, depth + 1, errors) {
            Some(n) => out.push(n),
            None => ok = false,
        }
    }
    ok.then_some(out)
}

fn convert_node(e: &SExpr, depth: usize, errors: &mut Vec<ParseError>) -> Option<TreeNode> {
    let SExpr::List { span, items } = e else {
        errors.push(ParseError::new(e.span(), ErrorKind::Syntax, "expected a node `(...)`, found an argument"));
        return None;
    };
    if depth > MAX_DEPTH {
        errors.push(ParseError::new(*span, ErrorKind::Syntax, format!("tree deeper than {MAX_DEPTH}")));
        return None;
    }
    let Some(kw) = e.head() else {
        errors.push(ParseError::new(*span, ErrorKind::Syntax, "a node must start with a keyword"));
        return None;
    };
    let kw_span = items[0].span();
    let rest = &items[1..];
    let composite = match kw {
        "root" => Some(NodeKind::Root),
        "sequence" => Some(NodeKind::Sequence),
        "selector" => Some(NodeKind::Selector),
        "parallel-all" => Some(NodeKind::ParallelAll),
        _ => None,
    };
    if let Some(kind) = composite {
        return convert_children(rest, depth, errors).map(|c| TreeNode::new(kind, c));
    }
    if kw == "repeat" {
        let count = match rest.first() {
            Some(SExpr::Atom(Token { tok: Tok::Int(n), span })) => {
                if *n == 0 || *n > u32::MAX as u64 {
                    errors.push(ParseError::new(*span, ErrorKind::Syntax, "repeat count must be between 1 and 2^32-1"));
                    None
                } else {
                    Some(RepeatCount::Times(*n as u32))
                }
            }
            Some(SExpr::Atom(Token { tok: Tok::Ident(s), .. })) if s == "forever" => Some(RepeatCount::Forever),
            Some(other) => {
                errors.push(ParseError::new(other.span(), ErrorKind::Arity, "repeat expects a count or `forever`"));
                None
            }
            None => {
                errors.push(ParseError::new(kw_span, ErrorKind::Arity, "repeat expects a count or `forever`"));
                None
            }
        };
        let children = convert_children(rest.get(1..).unwrap_or(&[]), depth, errors);
        return Some(TreeNode::new(NodeKind::Repeat(count?), children?));
    }
    let op = match kw {
        "move-to-joint" => Some(OpKind::ServoToJoint),
        _ => OpKind::parse(kw),
    };
    let Some(op) = op else {
        errors.push(ParseError::new(kw_span, ErrorKind::UnknownOp, format!("unknown operation `{kw}`")));
        for item in rest {
            if matches!(item, SExpr::List { .. }) && !item.head().is_some_and(is_predicate_head) {
                let _ = convert_node(item, depth + 1, errors);
            }
        }
        return None;
    };
    let mut args = Args { items: rest, pos: 0, op: kw, kw_span };
    let leaf = convert_leaf(op, &mut args, errors);
    let extra_args: Vec<&SExpr> = args.items[args.pos..].iter().filter(|i| matches!(i, SExpr::Atom(_))).collect();
    for a in &extra_args {
        errors.push(ParseError::new(a.span(), ErrorKind::Arity, format!("too many arguments to `{kw}`")));
    }
    let children: Vec<&SExpr> = args.items[args.pos..].iter().filter(|i| matches!(i, SExpr::List { .. })).collect();
    let mut kids = Vec::new();
    let mut ok = extra_args.is_empty();
    for c in children {
        match convert_node(c, depth + 1, errors) {
            Some(n) => kids.push(n),
            None => ok = false,
        }
    }
    let leaf = leaf?;
    ok.then(|| TreeNode::new(NodeKind::Leaf(leaf), kids))
}

struct Args<'a> {
    items: &'a [SExpr],
    pos: usize,
    op: &'a str,
    kw_span: SourceSpan,
}

impl<'a> Args<'a> {
    fn missing(&self, what: &str, errors: &mut Vec<ParseError>) {
        let span = self.items.get(self.pos).map_or(self.kw_span, SExpr::span);
        errors.push(ParseError::new(span, ErrorKind::Arity, format!("`{}` expects {what}", self.op)));
    }

    fn symbol(&mut self, errors: &mut Vec<ParseError>) -> Option<SymbolRef> {
        match self.items.get(self.pos) {
            Some(SExpr::Atom(Token { tok: Tok::Symbol(s), .. })) => {
                self.pos += 1;
                Some(SymbolRef(s.clone()))
            }
            Some(SExpr::Atom(t)) => {
                self.pos += 1;
                errors.push(ParseError::new(
                    t.span,
                    ErrorKind::BadSymbolRef,
                    format!("`{}` expects a symbol reference like `@name`", self.op),
                ));
                None
            }
            _ => {
                self.missing("a symbol reference `@name`", errors);
                None
            }
        }
    }

    fn ident(&mut self, what: &str, errors: &mut Vec<ParseError>) -> Option<(String, SourceSpan)> {
        match self.items.get(self.pos) {
            Some(SExpr::Atom(Token { tok: Tok::Ident(s), span })) => {
                self.pos += 1;
                Some((s.clone(), *span))
            }
            _ => {
                self.missing(what, errors);
                None
            }
        }
    }

    fn predicate(&mut self, required: bool, errors: &mut Vec<ParseError>) -> Option<Option<PredicateQuery>> {
        match self.items.get(self.pos) {
            Some(e) if e.head().is_some_and(is_predicate_head) => {
                self.pos += 1;
                convert_predicate(e, errors).map(Some)
            }
            _ if !required => Some(None),
            _ => {
                self.missing("a predicate like `(and (is node))`", errors);
                None
            }
        }
    }
}

fn convert_leaf(op: OpKind, args: &mut Args<'_>, errors: &mut Vec<ParseError>) -> Option<LeafOp> {
    Some(match op {
        OpKind::Gripper => {
            let (word, span) = args.ident("`open` or `close`", errors)?;
            match word.as_str() {
                "open" => LeafOp::Gripper(GripperTarget::Open),
                "close" => LeafOp::Gripper(GripperTarget::Closed),
                _ => {
                    errors.push(ParseError::new(span, ErrorKind::Syntax, "gripper target must be `open` or `close`"));
                    return None;
                }
            }
        }
        OpKind::ServoToJoint => LeafOp::ServoToJoint(args.symbol(errors)?),
        OpKind::PlanToJoint => LeafOp::PlanToJoint(args.symbol(errors)?),
        OpKind::MoveToRelativeWaypoint => LeafOp::MoveToRelativeWaypoint(args.symbol(errors)?),
        OpKind::PlanToHome => LeafOp::PlanToHome,
        OpKind::DetectObjects => LeafOp::DetectObjects,
        OpKind::DisableCollisions => LeafOp::DisableCollisions(args.ident("an object id", errors)?.0),
        OpKind::KnowledgeTest => LeafOp::KnowledgeTest(args.predicate(true, errors)?.expect("required")),
        OpKind::SmartGrasp => {
            let query = args.predicate(true, errors);
            let spec = args.symbol(errors);
            LeafOp::SmartGrasp { query: query?.expect("required"), spec: spec? }
        }
        OpKind::SmartRelease => {
            let query = args.predicate(false, errors);
            let spec = args.symbol(errors);
            LeafOp::SmartRelease { query: query?, spec: spec? }
        }
        OpKind::AlwaysSuccess => LeafOp::Constant(TickStatus::Success),
        OpKind::AlwaysFailure => LeafOp::Constant(TickStatus::Failure),
        OpKind::AlwaysRunning => LeafOp::Constant(TickStatus::Running),
    })
}

fn convert_predicate(e: &SExpr, errors: &mut Vec<ParseError>) -> Option<PredicateQuery> {
    let SExpr::List { span, items } = e else {
        errors.push(ParseError::new(e.span(), ErrorKind::Syntax, "expected a predicate `(...)`"));
        return None;
    };
    let atoms = if e.head() == Some("and") {
        if items.len() < 2 {
            errors.push(ParseError::new(*span, ErrorKind::Arity, "`and` needs at least one atom"));
            return None;
        }
        let mut atoms = Vec::new();
        let mut ok = true;
        for item in &items[1..] {
            match convert_atom(item, errors) {
                Some(a) => atoms.push(a),
                None => ok = false,
            }
        }
        if !ok {
            return None;
        }
        atoms
    } else {
        alloc::vec![convert_atom(e, errors)?]
    };
    match PredicateQuery::new(atoms) {
        Ok(q) => Some(q),
        Err(err) => {
            errors.push(ParseError::new(*span, ErrorKind::Syntax, format!("{err}")));
            None
        }
    }
}

fn convert_atom(e: &SExpr, errors: &mut Vec<ParseError>) -> Option<PredicateAtom> {
    let (SExpr::List { span, items }, Some(head)) = (e, e.head()) else {
        errors.push(ParseError::new(e.span(), ErrorKind::Syntax, "expected a predicate atom like `(is node)`"));
        return None;
    };
    let words: Vec<Option<&str>> = items[1..]
        .iter()
        .map(|i| match i {
            SExpr::Atom(Token { tok: Tok::Ident(s), .. }) => Some(s.as_str()),
            _ => None,
        })
        .collect();
    let category = |errors: &mut Vec<ParseError>| match words.as_slice() {
        [Some(c)] => match Category::parse(c) {
            Some(c) => Some(c),
            None => {
                errors.push(ParseError::new(items[1].span(), ErrorKind::Syntax, format!("unknown category `{c}`")));
                None
            }
        },
        _ => {
            errors.push(ParseError::new(*span, ErrorKind::Arity, format!("`{head}` expects one category")));
            None
        }
    };
    let robot = |errors: &mut Vec<ParseError>| {
        if words.as_slice() == [Some("robot")] {
            Some(())
        } else {
            errors.push(ParseError::new(*span, ErrorKind::Arity, format!("`{head}` expects `robot`")));
            None
        }
    };
    match head {
        "is" => category(errors).map(PredicateAtom::IsCategory),
        "found" => category(errors).map(PredicateAtom::Found),
        "left-of" => robot(errors).map(|_| PredicateAtom::LeftOfRobot),
        "right-of" => robot(errors).map(|_| PredicateAtom::RightOfRobot),
        "gripper-holding" if words.is_empty() => Some(PredicateAtom::GripperHolding),
        "gripper-holding" => {
            errors.push(ParseError::new(*span, ErrorKind::Arity, "`gripper-holding` takes no arguments"));
            None
        }
        other => {
            errors.push(ParseError::new(
                items[0].span(),
                ErrorKind::Syntax,
                format!("unknown predicate atom `{other}`"),
            ));
            None
        }
    }
}
