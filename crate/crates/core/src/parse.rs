//! S-expression knowledge base format.
//!
//! ```text
//! ; comments run to the end of the line
//! (transitive r)
//! (subrole R S)
//! (implies C D)
//! (instance a C)
//! (related a b R)
//! (distinct a b)
//! (role r)            ; declares a role without using it
//! ```
//!
//! Concepts are bare identifiers or `(and C D)`, `(or C D)`, `(not C)`,
//! `(some R C)`, `(all R C)`, `(at-least n R C)`, `(at-most n R C)`. Roles
//! are identifiers or `(inv r)`. `(not A)` on a concept name reads as the
//! negated atom. Identifiers starting with `$` are reserved.

use std::fmt::{self, Write};

use thiserror::Error;

use crate::syntax::{
    is_reserved, validate_concept, Assertion, Concept, Gci, KbError, KnowledgeBase, Name, Role,
    RoleBox,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Position {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("{pos}: syntax error: {message}")]
    Syntax { pos: Position, message: String },
    #[error("{pos}: invalid: {message}")]
    Validation { pos: Position, message: String },
}

impl ParseError {
    pub fn position(&self) -> Position {
        match self {
            ParseError::Syntax { pos, .. } | ParseError::Validation { pos, .. } => *pos,
        }
    }

    fn syntax(pos: Position, message: impl Into<String>) -> Self {
        ParseError::Syntax {
            pos,
            message: message.into(),
        }
    }

    fn invalid(pos: Position, message: impl Into<String>) -> Self {
        ParseError::Validation {
            pos,
            message: message.into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Declaration {
    Role(Name),
    Transitive(Name),
    SubRole(Role, Role),
    Implies(Concept, Concept),
    Instance(Name, Concept),
    Related(Name, Name, Role),
    Distinct(Name, Name),
}

/// Parsed declarations with the position of each opening parenthesis.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SourceDocument {
    pub declarations: Vec<(Position, Declaration)>,
}

impl SourceDocument {
    /// Assembles the knowledge base, reporting a number restriction on a
    /// non-simple role at the declaration that contains it.
    pub fn to_kb(&self) -> Result<KnowledgeBase, ParseError> {
        let mut names: Vec<Name> = Vec::new();
        let mut inclusions = Vec::new();
        let mut transitive = Vec::new();
        let mut tbox = Vec::new();
        let mut abox = Vec::new();
        for (_, d) in &self.declarations {
            match d {
                Declaration::Role(r) => names.push(r.clone()),
                Declaration::Transitive(r) => transitive.push(r.clone()),
                Declaration::SubRole(r, s) => inclusions.push((r.clone(), s.clone())),
                Declaration::Implies(c, d) => {
                    names.extend(c.roles().into_iter().chain(d.roles()).map(|r| r.name().clone()));
                    tbox.push(Gci::new(c.clone(), d.clone()));
                }
                Declaration::Instance(a, c) => {
                    names.extend(c.roles().into_iter().map(|r| r.name().clone()));
                    abox.push(Assertion::instance(a.clone(), c.clone()));
                }
                Declaration::Related(a, b, r) => {
                    names.push(r.name().clone());
                    abox.push(Assertion::related(a.clone(), b.clone(), r.clone()));
                }
                Declaration::Distinct(a, b) => abox.push(Assertion::distinct(a.clone(), b.clone())),
            }
        }
        let rbox = RoleBox::new(names, inclusions, transitive);
        for (pos, d) in &self.declarations {
            let concepts: Vec<&Concept> = match d {
                Declaration::Implies(c, d) => vec![c, d],
                Declaration::Instance(_, c) => vec![c],
                _ => continue,
            };
            for c in concepts {
                if let Err(e) = validate_concept(c, &rbox) {
                    return Err(ParseError::invalid(*pos, e.to_string()));
                }
            }
        }
        KnowledgeBase::new(tbox, rbox, abox).map_err(|e: KbError| {
            ParseError::invalid(Position { line: 1, col: 1 }, e.to_string())
        })
    }
}

#[derive(Clone, Debug)]
enum Sexp {
    Atom(String, Position),
    List(Vec<Sexp>, Position),
}

impl Sexp {
    fn pos(&self) -> Position {
        match self {
            Sexp::Atom(_, p) | Sexp::List(_, p) => *p,
        }
    }
}

fn read_all(text: &str) -> Result<Vec<Sexp>, ParseError> {
    let mut stack: Vec<(Position, Vec<Sexp>)> = Vec::new();
    let mut top = Vec::new();
    let mut token = String::new();
    let mut token_pos = Position { line: 1, col: 1 };
    let (mut line, mut col) = (1usize, 0usize);
    let mut in_comment = false;

    fn flush(
        token: &mut String,
        pos: Position,
        stack: &mut [(Position, Vec<Sexp>)],
        top: &mut Vec<Sexp>,
    ) {
        if !token.is_empty() {
            let atom = Sexp::Atom(std::mem::take(token), pos);
            match stack.last_mut() {
                Some((_, items)) => items.push(atom),
                None => top.push(atom),
            }
        }
    }

    for ch in text.chars() {
        if ch == '\n' {
            flush(&mut token, token_pos, &mut stack, &mut top);
            line += 1;
            col = 0;
            in_comment = false;
            continue;
        }
        col += 1;
        if in_comment {
            continue;
        }
        let here = Position { line, col };
        match ch {
            ';' => {
                flush(&mut token, token_pos, &mut stack, &mut top);
                in_comment = true;
            }
            '(' => {
                flush(&mut token, token_pos, &mut stack, &mut top);
                stack.push((here, Vec::new()));
            }
            ')' => {
                flush(&mut token, token_pos, &mut stack, &mut top);
                let (pos, items) = stack
                    .pop()
                    .ok_or_else(|| ParseError::syntax(here, "unbalanced `)`"))?;
                let list = Sexp::List(items, pos);
                match stack.last_mut() {
                    Some((_, items)) => items.push(list),
                    None => top.push(list),
                }
            }
            c if c.is_whitespace() => flush(&mut token, token_pos, &mut stack, &mut top),
            c => {
                if token.is_empty() {
                    token_pos = here;
                }
                token.push(c);
            }
        }
    }
    flush(&mut token, token_pos, &mut stack, &mut top);
    if let Some((pos, _)) = stack.pop() {
        return Err(ParseError::syntax(pos, "unclosed `(`"));
    }
    Ok(top)
}

fn ident(s: &Sexp, what: &str) -> Result<Name, ParseError> {
    match s {
        Sexp::Atom(t, pos) => {
            if is_reserved(t) {
                Err(ParseError::invalid(*pos, format!("`{t}` is a reserved name")))
            } else {
                Ok(Name::from(t.as_str()))
            }
        }
        Sexp::List(_, pos) => Err(ParseError::syntax(*pos, format!("expected {what}"))),
    }
}

fn head(items: &[Sexp], pos: Position) -> Result<&str, ParseError> {
    match items.first() {
        Some(Sexp::Atom(h, _)) => Ok(h),
        Some(other) => Err(ParseError::syntax(other.pos(), "expected a keyword")),
        None => Err(ParseError::syntax(pos, "empty list")),
    }
}

fn arity(items: &[Sexp], n: usize, pos: Position, form: &str) -> Result<(), ParseError> {
    if items.len() == n + 1 {
        Ok(())
    } else {
        Err(ParseError::syntax(
            pos,
            format!("`{form}` takes {n} arguments, found {}", items.len() - 1),
        ))
    }
}

fn role(s: &Sexp) -> Result<Role, ParseError> {
    match s {
        Sexp::Atom(..) => Ok(Role::named(ident(s, "a role")?)),
        Sexp::List(items, pos) => {
            let h = head(items, *pos)?;
            if h != "inv" {
                return Err(ParseError::syntax(*pos, format!("expected a role, found `{h}`")));
            }
            arity(items, 1, *pos, "inv")?;
            Ok(role(&items[1])?.inv())
        }
    }
}

fn number(s: &Sexp) -> Result<u32, ParseError> {
    let Sexp::Atom(t, pos) = s else {
        return Err(ParseError::syntax(s.pos(), "expected a number"));
    };
    if let Some(digits) = t.strip_prefix('-') {
        if !digits.is_empty() && digits.chars().all(|c| c.is_ascii_digit()) {
            return Err(ParseError::invalid(*pos, format!("negative number `{t}`")));
        }
    }
    if t.is_empty() || !t.chars().all(|c| c.is_ascii_digit()) {
        return Err(ParseError::syntax(*pos, format!("expected a number, found `{t}`")));
    }
    t.parse()
        .map_err(|_| ParseError::invalid(*pos, format!("number `{t}` is too large")))
}

fn concept(s: &Sexp) -> Result<Concept, ParseError> {
    let (items, pos) = match s {
        Sexp::Atom(..) => return Ok(Concept::atom(ident(s, "a concept")?)),
        Sexp::List(items, pos) => (items, *pos),
    };
    let h = head(items, pos)?;
    Ok(match h {
        "not" => {
            arity(items, 1, pos, h)?;
            match concept(&items[1])? {
                Concept::Atom(a) => Concept::NegAtom(a),
                c => Concept::not(c),
            }
        }
        "and" | "or" => {
            arity(items, 2, pos, h)?;
            let (c, d) = (concept(&items[1])?, concept(&items[2])?);
            if h == "and" {
                Concept::and(c, d)
            } else {
                Concept::or(c, d)
            }
        }
        "some" | "all" => {
            arity(items, 2, pos, h)?;
            let (r, c) = (role(&items[1])?, concept(&items[2])?);
            if h == "some" {
                Concept::exists(r, c)
            } else {
                Concept::forall(r, c)
            }
        }
        "at-least" | "at-most" => {
            arity(items, 3, pos, h)?;
            let n = number(&items[1])?;
            let (r, c) = (role(&items[2])?, concept(&items[3])?);
            if h == "at-least" {
                Concept::at_least(n, r, c)
            } else {
                Concept::at_most(n, r, c)
            }
        }
        other => {
            return Err(ParseError::syntax(
                pos,
                format!("unknown concept constructor `{other}`"),
            ))
        }
    })
}

fn declaration(s: &Sexp) -> Result<(Position, Declaration), ParseError> {
    let Sexp::List(items, pos) = s else {
        return Err(ParseError::syntax(s.pos(), "expected a declaration"));
    };
    let pos = *pos;
    let h = head(items, pos)?;
    let d = match h {
        "role" => {
            arity(items, 1, pos, h)?;
            Declaration::Role(ident(&items[1], "a role name")?)
        }
        "transitive" => {
            arity(items, 1, pos, h)?;
            Declaration::Transitive(ident(&items[1], "a role name")?)
        }
        "subrole" => {
            arity(items, 2, pos, h)?;
            Declaration::SubRole(role(&items[1])?, role(&items[2])?)
        }
        "implies" => {
            arity(items, 2, pos, h)?;
            Declaration::Implies(concept(&items[1])?, concept(&items[2])?)
        }
        "instance" => {
            arity(items, 2, pos, h)?;
            Declaration::Instance(ident(&items[1], "an individual")?, concept(&items[2])?)
        }
        "related" => {
            arity(items, 3, pos, h)?;
            Declaration::Related(
                ident(&items[1], "an individual")?,
                ident(&items[2], "an individual")?,
                role(&items[3])?,
            )
        }
        "distinct" => {
            arity(items, 2, pos, h)?;
            Declaration::Distinct(
                ident(&items[1], "an individual")?,
                ident(&items[2], "an individual")?,
            )
        }
        other => return Err(ParseError::syntax(pos, format!("unknown declaration `{other}`"))),
    };
    Ok((pos, d))
}

pub fn parse_document(text: &str) -> Result<SourceDocument, ParseError> {
    let declarations = read_all(text)?
        .iter()
        .map(declaration)
        .collect::<Result<_, _>>()?;
    Ok(SourceDocument { declarations })
}

pub fn parse_kb(text: &str) -> Result<KnowledgeBase, ParseError> {
    parse_document(text)?.to_kb()
}

/// Parses exactly one concept expression.
pub fn parse_concept(text: &str) -> Result<Concept, ParseError> {
    let mut items = read_all(text)?.into_iter();
    let first = items
        .next()
        .ok_or_else(|| ParseError::syntax(Position { line: 1, col: 1 }, "empty concept"))?;
    if let Some(extra) = items.next() {
        return Err(ParseError::syntax(extra.pos(), "trailing input after concept"));
    }
    concept(&first)
}

/// Prints a knowledge base in the format read by [`parse_kb`].
pub fn print_kb(kb: &KnowledgeBase) -> String {
    let mut out = String::new();
    let rbox = kb.rbox();
    let mut used: std::collections::BTreeSet<Name> = kb
        .concepts()
        .flat_map(Concept::roles)
        .map(|r| r.name().clone())
        .collect();
    for a in kb.abox() {
        if let Assertion::Related(_, _, r) = a {
            used.insert(r.name().clone());
        }
    }
    for (r, s) in rbox.declared_inclusions() {
        used.insert(r.name().clone());
        used.insert(s.name().clone());
    }
    used.extend(rbox.transitive_names().iter().cloned());
    for name in rbox.signature() {
        if !used.contains(name) {
            writeln!(out, "(role {name})").unwrap();
        }
    }
    for name in rbox.transitive_names() {
        writeln!(out, "(transitive {name})").unwrap();
    }
    for (r, s) in rbox.declared_inclusions() {
        writeln!(out, "(subrole {r} {s})").unwrap();
    }
    for g in kb.tbox() {
        writeln!(out, "(implies {} {})", g.sub, g.sup).unwrap();
    }
    for a in kb.abox() {
        match a {
            Assertion::Instance(x, c) => writeln!(out, "(instance {x} {c})"),
            Assertion::Related(x, y, r) => writeln!(out, "(related {x} {y} {r})"),
            Assertion::Distinct(x, y) => writeln!(out, "(distinct {x} {y})"),
        }
        .unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn instance_with_negated_atom() {
        let kb = parse_kb("(instance a (and A (not B)))").unwrap();
        assert_eq!(
            kb.abox(),
            &[Assertion::instance(
                "a",
                Concept::and(Concept::atom("A"), Concept::neg_atom("B"))
            )]
        );
    }

    #[test]
    fn number_restriction_on_transitive_role_is_rejected() {
        let err = parse_kb("(transitive r)\n(instance a (at-most 1 r A))").unwrap_err();
        assert!(matches!(err, ParseError::Validation { .. }));
        assert_eq!(err.position(), Position { line: 2, col: 1 });
    }

    #[test]
    fn related_with_inverse_role() {
        let kb = parse_kb("(related a b (inv r))").unwrap();
        assert_eq!(
            kb.abox(),
            &[Assertion::related("a", "b", Role::inverse_of("r"))]
        );
    }

    #[test]
    fn reserved_names_are_rejected() {
        let err = parse_kb("(instance a $bot)").unwrap_err();
        assert!(matches!(err, ParseError::Validation { .. }));
        assert_eq!(err.position(), Position { line: 1, col: 13 });
        assert!(parse_kb("(related a b $u)").is_err());
    }

    #[test]
    fn negative_numbers_are_rejected() {
        let err = parse_kb("(instance a (at-least -1 r A))").unwrap_err();
        assert!(matches!(err, ParseError::Validation { .. }));
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let err = parse_kb("; header\n(instance a\n  (and A B)").unwrap_err();
        assert_eq!(err, ParseError::syntax(Position { line: 2, col: 1 }, "unclosed `(`"));
        let err = parse_kb("(instance a (nand A B))").unwrap_err();
        assert_eq!(err.position(), Position { line: 1, col: 13 });
        let err = parse_kb("(instance a A))").unwrap_err();
        assert_eq!(err.position(), Position { line: 1, col: 15 });
        let err = parse_kb("(instance a)").unwrap_err();
        assert!(matches!(err, ParseError::Syntax { .. }));
    }

    #[test]
    fn empty_input_is_empty_kb() {
        let kb = parse_kb("; nothing here\n").unwrap();
        assert!(kb.abox().is_empty() && kb.tbox().is_empty());
    }

    #[test]
    fn print_round_trip() {
        let text = "(role q)\n(transitive r)\n(subrole s (inv r))\n\
                    (implies A (some r (at-least 2 s B)))\n\
                    (instance a (or (not A) (all (inv s) (not (and A B)))))\n\
                    (related a b s)\n(distinct a b)\n";
        let kb = parse_kb(text).unwrap();
        assert_eq!(parse_kb(&print_kb(&kb)).unwrap(), kb);
        assert!(kb.rbox().contains("q"));
    }

    #[test]
    fn concept_expression() {
        assert_eq!(
            parse_concept(" (some (inv R) A) ").unwrap(),
            Concept::exists(Role::inverse_of("R"), Concept::atom("A"))
        );
        assert!(parse_concept("A B").is_err());
    }
}
