//! The `.dlo` text format: a small OWL functional-style subset, one statement per line.
//!
//! ```text
//! SubClassOf(ObjectSomeValuesFrom(R C) D)
//! ClassAssertion(ObjectComplementOf(D) a)
//! ObjectPropertyAssertion(R a b)
//! ```

use std::fmt::{self, Write as _};

use thiserror::Error;

use crate::dl::{Concept, Name, Ontology, Role, TBox, ABox, RESERVED_PREFIX};

/// 1-based position in the source text.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SourceLocation {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for SourceLocation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax,
    ReservedName,
    InverseInAssertion,
    Arity,
    UnknownConstructor,
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
#[error("{location}: {message}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub location: SourceLocation,
    pub message: String,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct ParseOptions {
    /// Accept `_:`-prefixed names, which are otherwise reserved for generated symbols.
    pub allow_reserved: bool,
}

#[derive(Debug)]
enum Sexp {
    Atom(String, SourceLocation),
    App(String, SourceLocation, Vec<Sexp>),
}

impl Sexp {
    fn location(&self) -> SourceLocation {
        match self {
            Sexp::Atom(_, l) | Sexp::App(_, l, _) => *l,
        }
    }
}

#[derive(Debug, PartialEq)]
enum Tok {
    Open,
    Close,
    Word(String),
}

fn err(kind: ParseErrorKind, location: SourceLocation, message: impl Into<String>) -> ParseError {
    ParseError { kind, location, message: message.into() }
}

fn is_word_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || matches!(c, '_' | '.' | '-' | ':')
}

fn tokenize(line: &str, line_no: usize) -> Result<Vec<(Tok, SourceLocation)>, ParseError> {
    let mut out = Vec::new();
    let chars: Vec<char> = line.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let loc = SourceLocation { line: line_no, column: i + 1 };
        let c = chars[i];
        if c == '#' {
            break;
        } else if c.is_whitespace() {
            i += 1;
        } else if c == '(' {
            out.push((Tok::Open, loc));
            i += 1;
        } else if c == ')' {
            out.push((Tok::Close, loc));
            i += 1;
        } else if is_word_char(c) {
            let start = i;
            while i < chars.len() && is_word_char(chars[i]) {
                i += 1;
            }
            out.push((Tok::Word(chars[start..i].iter().collect()), loc));
        } else {
            return Err(err(ParseErrorKind::Syntax, loc, format!("unexpected character {c:?}")));
        }
    }
    Ok(out)
}

struct TokStream {
    toks: Vec<(Tok, SourceLocation)>,
    pos: usize,
    end: SourceLocation,
}

impl TokStream {
    fn sexp(&mut self) -> Result<Sexp, ParseError> {
        let (tok, loc) = match self.toks.get(self.pos) {
            Some((t, l)) => (t, *l),
            None => return Err(err(ParseErrorKind::Syntax, self.end, "unexpected end of input")),
        };
        let word = match tok {
            Tok::Word(w) => w.clone(),
            Tok::Open => return Err(err(ParseErrorKind::Syntax, loc, "expected a name, found '('")),
            Tok::Close => return Err(err(ParseErrorKind::Syntax, loc, "expected a name, found ')'")),
        };
        self.pos += 1;
        if !matches!(self.toks.get(self.pos), Some((Tok::Open, _))) {
            return Ok(Sexp::Atom(word, loc));
        }
        self.pos += 1;
        let mut args = Vec::new();
        loop {
            match self.toks.get(self.pos) {
                Some((Tok::Close, _)) => {
                    self.pos += 1;
                    return Ok(Sexp::App(word, loc, args));
                }
                Some(_) => args.push(self.sexp()?),
                None => return Err(err(ParseErrorKind::Syntax, self.end, format!("unclosed '(' after {word}"))),
            }
        }
    }
}

fn read_sexp(text: &str, line_no: usize, column_offset: usize) -> Result<Option<Sexp>, ParseError> {
    let mut toks = tokenize(text, line_no)?;
    for (_, l) in toks.iter_mut() {
        l.column += column_offset;
    }
    if toks.is_empty() {
        return Ok(None);
    }
    let end = SourceLocation { line: line_no, column: text.chars().count() + 1 + column_offset };
    let mut ts = TokStream { toks, pos: 0, end };
    let s = ts.sexp()?;
    if let Some((_, loc)) = ts.toks.get(ts.pos) {
        return Err(err(ParseErrorKind::Syntax, *loc, "trailing input after statement"));
    }
    Ok(Some(s))
}

struct Reader {
    opts: ParseOptions,
}

impl Reader {
    fn name(&self, word: &str, loc: SourceLocation) -> Result<Name, ParseError> {
        if let Some(rest) = word.strip_prefix(RESERVED_PREFIX) {
            if !self.opts.allow_reserved {
                return Err(err(
                    ParseErrorKind::ReservedName,
                    loc,
                    format!("name {word:?} uses the reserved prefix {RESERVED_PREFIX:?}"),
                ));
            }
            if rest.is_empty() {
                return Err(err(ParseErrorKind::Syntax, loc, "empty reserved name"));
            }
            return Ok(Name::new(word));
        }
        let mut chars = word.chars();
        let ok = chars.next().is_some_and(|c| c.is_ascii_alphabetic())
            && chars.all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '.' | '-'));
        if !ok {
            return Err(err(ParseErrorKind::Syntax, loc, format!("invalid name {word:?}")));
        }
        Ok(Name::new(word))
    }

    fn atom<'a>(&self, s: &'a Sexp, what: &str) -> Result<(&'a str, SourceLocation), ParseError> {
        match s {
            Sexp::Atom(w, l) => Ok((w, *l)),
            Sexp::App(w, l, _) => Err(err(ParseErrorKind::Syntax, *l, format!("expected {what}, found {w}(...)"))),
        }
    }

    fn arity(&self, head: &str, loc: SourceLocation, args: &[Sexp], min: usize, max: Option<usize>) -> Result<(), ParseError> {
        let n = args.len();
        if n < min || max.is_some_and(|m| n > m) {
            let want = match max {
                Some(m) if m == min => format!("{min}"),
                Some(m) => format!("{min}..{m}"),
                None => format!("at least {min}"),
            };
            return Err(err(
                ParseErrorKind::Arity,
                loc,
                format!("{head} takes {want} argument(s), found {n}"),
            ));
        }
        Ok(())
    }

    fn role(&self, s: &Sexp) -> Result<Role, ParseError> {
        match s {
            Sexp::Atom(w, l) => Ok(Role::named(self.name(w, *l)?)),
            Sexp::App(head, l, args) if head == "ObjectInverseOf" => {
                self.arity(head, *l, args, 1, Some(1))?;
                Ok(self.role(&args[0])?.inv())
            }
            Sexp::App(head, l, _) => Err(err(
                ParseErrorKind::UnknownConstructor,
                *l,
                format!("unknown role constructor {head}"),
            )),
        }
    }

    fn concept(&self, s: &Sexp) -> Result<Concept, ParseError> {
        let (head, loc, args) = match s {
            Sexp::Atom(w, l) => {
                return Ok(match w.as_str() {
                    "Top" => Concept::Top,
                    "Bottom" => Concept::Bottom,
                    _ => Concept::Atomic(self.name(w, *l)?),
                })
            }
            Sexp::App(h, l, a) => (h.as_str(), *l, a.as_slice()),
        };
        match head {
            "ObjectComplementOf" => {
                self.arity(head, loc, args, 1, Some(1))?;
                Ok(Concept::not(self.concept(&args[0])?))
            }
            "ObjectIntersectionOf" | "ObjectUnionOf" => {
                self.arity(head, loc, args, 2, None)?;
                let parts = args.iter().map(|a| self.concept(a)).collect::<Result<Vec<_>, _>>()?;
                Ok(if head == "ObjectIntersectionOf" { Concept::and(parts) } else { Concept::or(parts) })
            }
            "ObjectSomeValuesFrom" | "ObjectAllValuesFrom" => {
                self.arity(head, loc, args, 2, Some(2))?;
                let r = self.role(&args[0])?;
                let c = self.concept(&args[1])?;
                Ok(if head == "ObjectSomeValuesFrom" { Concept::exists(r, c) } else { Concept::forall(r, c) })
            }
            "ObjectOneOf" => {
                self.arity(head, loc, args, 1, Some(1))?;
                let (w, l) = self.atom(&args[0], "an individual")?;
                Ok(Concept::Nominal(self.name(w, l)?))
            }
            _ => Err(err(ParseErrorKind::UnknownConstructor, loc, format!("unknown constructor {head}"))),
        }
    }

    fn individual(&self, s: &Sexp) -> Result<Name, ParseError> {
        let (w, l) = self.atom(s, "an individual")?;
        self.name(w, l)
    }

    fn statement(&self, s: &Sexp, tbox: &mut TBox, abox: &mut ABox) -> Result<(), ParseError> {
        let (head, loc, args) = match s {
            Sexp::App(h, l, a) => (h.as_str(), *l, a.as_slice()),
            Sexp::Atom(w, l) => return Err(err(ParseErrorKind::Syntax, *l, format!("expected a statement, found {w:?}"))),
        };
        match head {
            "SubClassOf" => {
                self.arity(head, loc, args, 2, Some(2))?;
                tbox.add_gci(self.concept(&args[0])?, self.concept(&args[1])?);
            }
            "EquivalentClasses" => {
                self.arity(head, loc, args, 2, None)?;
                let cs = args.iter().map(|a| self.concept(a)).collect::<Result<Vec<_>, _>>()?;
                for w in cs.windows(2) {
                    tbox.add_equivalence(w[0].clone(), w[1].clone());
                }
            }
            "SubObjectPropertyOf" => {
                self.arity(head, loc, args, 2, Some(2))?;
                tbox.add_role_inclusion(self.role(&args[0])?, self.role(&args[1])?);
            }
            "TransitiveObjectProperty" => {
                self.arity(head, loc, args, 1, Some(1))?;
                tbox.add_transitive(self.role(&args[0])?.name().clone());
            }
            "ClassAssertion" => {
                self.arity(head, loc, args, 2, Some(2))?;
                abox.assert_concept(self.concept(&args[0])?, self.individual(&args[1])?);
            }
            "ObjectPropertyAssertion" => {
                self.arity(head, loc, args, 3, Some(3))?;
                let r = self.role(&args[0])?;
                if r.is_inverse() {
                    return Err(err(
                        ParseErrorKind::InverseInAssertion,
                        args[0].location(),
                        "role assertions take a role name, not an inverse",
                    ));
                }
                abox.assert_role(r.name().clone(), self.individual(&args[1])?, self.individual(&args[2])?);
            }
            _ => return Err(err(ParseErrorKind::UnknownConstructor, loc, format!("unknown statement {head}"))),
        }
        Ok(())
    }
}

pub fn parse_ontology(text: &str) -> Result<Ontology, ParseError> {
    parse_ontology_with(text, ParseOptions::default())
}

pub fn parse_ontology_with(text: &str, opts: ParseOptions) -> Result<Ontology, ParseError> {
    let reader = Reader { opts };
    let mut tbox = TBox::new();
    let mut abox = ABox::new();
    for (i, line) in text.lines().enumerate() {
        if let Some(s) = read_sexp(line, i + 1, 0)? {
            reader.statement(&s, &mut tbox, &mut abox)?;
        }
    }
    Ok(Ontology::new(tbox, abox))
}

pub fn parse_concept(text: &str) -> Result<Concept, ParseError> {
    parse_concept_with(text, ParseOptions::default())
}

pub fn parse_concept_with(text: &str, opts: ParseOptions) -> Result<Concept, ParseError> {
    let flat = flatten_lines(text);
    match read_sexp(&flat, 1, 0)? {
        Some(s) => Reader { opts }.concept(&s),
        None => Err(err(ParseErrorKind::Syntax, SourceLocation { line: 1, column: 1 }, "empty concept")),
    }
}

pub fn parse_role(text: &str) -> Result<Role, ParseError> {
    match read_sexp(&flatten_lines(text), 1, 0)? {
        Some(s) => Reader { opts: ParseOptions::default() }.role(&s),
        None => Err(err(ParseErrorKind::Syntax, SourceLocation { line: 1, column: 1 }, "empty role")),
    }
}

pub fn parse_individual(text: &str) -> Result<Name, ParseError> {
    match read_sexp(text.trim(), 1, 0)? {
        Some(s) => Reader { opts: ParseOptions::default() }.individual(&s),
        None => Err(err(ParseErrorKind::Syntax, SourceLocation { line: 1, column: 1 }, "empty individual name")),
    }
}

fn flatten_lines(text: &str) -> String {
    text.lines().collect::<Vec<_>>().join(" ")
}

pub fn serialize_role(r: &Role) -> String {
    r.to_string()
}

/// Canonical text: children of intersections and unions are emitted in sorted order.
pub fn serialize_concept(c: &Concept) -> String {
    let mut out = String::new();
    write_concept(&mut out, c);
    out
}

fn write_concept(out: &mut String, c: &Concept) {
    match c {
        Concept::Top => out.push_str("Top"),
        Concept::Bottom => out.push_str("Bottom"),
        Concept::Atomic(n) => out.push_str(n.as_str()),
        Concept::Nominal(n) => {
            let _ = write!(out, "ObjectOneOf({n})");
        }
        Concept::Not(inner) => {
            out.push_str("ObjectComplementOf(");
            write_concept(out, inner);
            out.push(')');
        }
        Concept::And(cs) | Concept::Or(cs) => {
            out.push_str(if matches!(c, Concept::And(_)) { "ObjectIntersectionOf(" } else { "ObjectUnionOf(" });
            let mut parts: Vec<String> = cs.iter().map(serialize_concept).collect();
            parts.sort();
            out.push_str(&parts.join(" "));
            out.push(')');
        }
        Concept::Exists(r, f) | Concept::Forall(r, f) => {
            out.push_str(if matches!(c, Concept::Exists(..)) { "ObjectSomeValuesFrom(" } else { "ObjectAllValuesFrom(" });
            let _ = write!(out, "{r} ");
            write_concept(out, f);
            out.push(')');
        }
    }
}

pub fn serialize_ontology(o: &Ontology) -> String {
    let mut out = String::new();
    for (a, b) in &o.tbox.role_inclusions {
        let _ = writeln!(out, "SubObjectPropertyOf({a} {b})");
    }
    for r in &o.tbox.transitive {
        let _ = writeln!(out, "TransitiveObjectProperty({r})");
    }
    for g in &o.tbox.gcis {
        let _ = writeln!(out, "SubClassOf({} {})", serialize_concept(&g.lhs), serialize_concept(&g.rhs));
    }
    for ca in &o.abox.concept_assertions {
        let _ = writeln!(out, "ClassAssertion({} {})", serialize_concept(&ca.concept), ca.individual);
    }
    for ra in &o.abox.role_assertions {
        let _ = writeln!(out, "ObjectPropertyAssertion({} {} {})", ra.role, ra.subject, ra.object);
    }
    out
}
