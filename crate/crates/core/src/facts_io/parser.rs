use std::fmt;

use super::term::Term;
use super::{AssignmentFact, FactError, FactSet, InitFact, OccursFact, UnknownFact};
use crate::checker::Diagnostic;

/// Any ground term, including function terms that only appear as wrappers
/// (`object(..)`, `value(..)`, `action(..)`) or in unknown predicates.
#[derive(Clone, Debug, PartialEq)]
enum Raw {
    Int(i64),
    Func(String, Vec<Raw>),
    Tuple(Vec<Raw>),
}

impl fmt::Display for Raw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Raw::Int(i) => write!(f, "{i}"),
            Raw::Func(name, args) if args.is_empty() => f.write_str(name),
            Raw::Func(name, args) => {
                write!(f, "{name}(")?;
                write_list(f, args)?;
                f.write_str(")")
            }
            Raw::Tuple(items) => {
                f.write_str("(")?;
                write_list(f, items)?;
                if items.len() == 1 {
                    f.write_str(",")?;
                }
                f.write_str(")")
            }
        }
    }
}

fn write_list(f: &mut fmt::Formatter<'_>, items: &[Raw]) -> fmt::Result {
    for (i, t) in items.iter().enumerate() {
        if i > 0 {
            f.write_str(",")?;
        }
        write!(f, "{t}")?;
    }
    Ok(())
}

impl Raw {
    fn into_term(self) -> Option<Term> {
        match self {
            Raw::Int(i) => Some(Term::Int(i)),
            Raw::Func(name, args) if args.is_empty() => Some(Term::Sym(name)),
            Raw::Func(..) => None,
            Raw::Tuple(items) => items.into_iter().map(Raw::into_term).collect::<Option<_>>().map(Term::Tuple),
        }
    }

    fn as_sym(&self) -> Option<&str> {
        match self {
            Raw::Func(name, args) if args.is_empty() => Some(name),
            _ => None,
        }
    }

    fn as_int(&self) -> Option<i64> {
        match self {
            Raw::Int(i) => Some(*i),
            _ => None,
        }
    }

    /// Matches `name(a, b)` and returns the two arguments.
    fn binary(&self, name: &str) -> Option<(&Raw, &Raw)> {
        match self {
            Raw::Func(n, args) if n == name && args.len() == 2 => Some((&args[0], &args[1])),
            _ => None,
        }
    }
}

/// Controls handling of well-formed facts of unknown predicates.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ParseOptions {
    /// Reject unknown predicates with [`FactError::UnknownPredicate`] instead
    /// of collecting them in [`FactSet::unknown`].
    pub strict: bool,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
    line: usize,
    col: usize,
}

impl<'a> Lexer<'a> {
    fn new(text: &'a str) -> Self {
        Lexer { src: text.as_bytes(), pos: 0, line: 1, col: 1 }
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<u8> {
        let c = self.peek()?;
        self.pos += 1;
        if c == b'\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn error(&self, expected: impl Into<String>) -> FactError {
        FactError::Syntax { line: self.line, column: self.col, expected: expected.into() }
    }

    /// Skips whitespace and comments, handing line comments to `on_comment`.
    fn skip_trivia(&mut self, on_comment: &mut dyn FnMut(&str)) -> Result<(), FactError> {
        loop {
            match self.peek() {
                Some(c) if c.is_ascii_whitespace() => {
                    self.bump();
                }
                Some(b'%') => {
                    self.bump();
                    if self.peek() == Some(b'*') {
                        self.bump();
                        loop {
                            match self.bump() {
                                None => return Err(self.error("end of block comment `*%`")),
                                Some(b'*') if self.peek() == Some(b'%') => {
                                    self.bump();
                                    break;
                                }
                                Some(_) => {}
                            }
                        }
                    } else {
                        let start = self.pos;
                        while !matches!(self.peek(), None | Some(b'\n')) {
                            self.bump();
                        }
                        let text = String::from_utf8_lossy(&self.src[start..self.pos]);
                        on_comment(text.trim());
                    }
                }
                _ => return Ok(()),
            }
        }
    }

    fn skip_ws(&mut self) -> Result<(), FactError> {
        self.skip_trivia(&mut |_| {})
    }

    fn expect(&mut self, c: u8) -> Result<(), FactError> {
        self.skip_ws()?;
        if self.peek() == Some(c) {
            self.bump();
            Ok(())
        } else {
            Err(self.error(format!("`{}`", c as char)))
        }
    }

    fn ident(&mut self) -> Result<String, FactError> {
        self.skip_ws()?;
        match self.peek() {
            Some(c) if c.is_ascii_lowercase() => {}
            _ => return Err(self.error("identifier")),
        }
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == b'_') {
            self.bump();
        }
        Ok(String::from_utf8_lossy(&self.src[start..self.pos]).into_owned())
    }

    fn term(&mut self) -> Result<Raw, FactError> {
        self.skip_ws()?;
        match self.peek() {
            Some(b'-') | Some(b'0'..=b'9') => {
                let negative = self.peek() == Some(b'-');
                if negative {
                    self.bump();
                }
                if !matches!(self.peek(), Some(b'0'..=b'9')) {
                    return Err(self.error("digit"));
                }
                let start = self.pos;
                while matches!(self.peek(), Some(b'0'..=b'9')) {
                    self.bump();
                }
                let digits = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                let value: i64 = digits.parse().map_err(|_| self.error("integer in 64-bit range"))?;
                Ok(Raw::Int(if negative { -value } else { value }))
            }
            Some(b'(') => {
                self.bump();
                let (items, trailing_comma) = self.list(b')')?;
                if items.len() == 1 && !trailing_comma {
                    Ok(items.into_iter().next().unwrap())
                } else {
                    Ok(Raw::Tuple(items))
                }
            }
            Some(c) if c.is_ascii_lowercase() => {
                let name = self.ident()?;
                self.skip_ws()?;
                if self.peek() == Some(b'(') {
                    self.bump();
                    let (args, _) = self.list(b')')?;
                    Ok(Raw::Func(name, args))
                } else {
                    Ok(Raw::Func(name, Vec::new()))
                }
            }
            _ => Err(self.error("term")),
        }
    }

    /// Comma-separated terms up to `close`; the opening bracket is consumed.
    fn list(&mut self, close: u8) -> Result<(Vec<Raw>, bool), FactError> {
        let mut items = Vec::new();
        self.skip_ws()?;
        if self.peek() == Some(close) {
            self.bump();
            return Ok((items, false));
        }
        loop {
            items.push(self.term()?);
            self.skip_ws()?;
            match self.peek() {
                Some(b',') => {
                    self.bump();
                    self.skip_ws()?;
                    if self.peek() == Some(close) {
                        self.bump();
                        return Ok((items, true));
                    }
                }
                Some(c) if c == close => {
                    self.bump();
                    return Ok((items, false));
                }
                _ => return Err(self.error(format!("`,` or `{}`", close as char))),
            }
        }
    }
}

pub fn parse_facts(text: &str) -> Result<FactSet, FactError> {
    parse_facts_with(text, ParseOptions::default())
}

/// Parses a stream of ground facts. Comments preceding the first fact become
/// the header.
pub fn parse_facts_with(text: &str, options: ParseOptions) -> Result<FactSet, FactError> {
    let mut lx = Lexer::new(text);
    let mut set = FactSet::default();
    let mut in_header = true;
    loop {
        {
            let header = &mut set.header_comments;
            let mut keep = |c: &str| {
                if in_header {
                    header.push(c.to_string());
                }
            };
            lx.skip_trivia(&mut keep)?;
        }
        if lx.peek().is_none() {
            break;
        }
        in_header = false;
        let (line, column) = (lx.line, lx.col);
        let fact = lx.term()?;
        lx.expect(b'.')?;
        let shape_error = |expected: &str| FactError::Syntax { line, column, expected: expected.to_string() };
        let Raw::Func(name, args) = &fact else {
            return Err(shape_error("predicate"));
        };
        match name.as_str() {
            "init" => {
                if args.len() != 2 {
                    return Err(FactError::Arity { predicate: "init".into(), got: args.len(), expected: 2 });
                }
                let (ty, id) = object(&args[0]).ok_or_else(|| shape_error("object(TYPE,ID)"))?;
                let (attr, value) = args[1]
                    .binary("value")
                    .and_then(|(a, v)| Some((a.as_sym()?.to_string(), v.clone().into_term()?)))
                    .ok_or_else(|| shape_error("value(ATTRIBUTE,TERM)"))?;
                set.inits.push(InitFact { object_type: ty, object_id: id, attribute: attr, value });
            }
            "occurs" => {
                if args.len() != 3 {
                    return Err(FactError::Arity { predicate: "occurs".into(), got: args.len(), expected: 3 });
                }
                let (ty, id) = object(&args[0]).ok_or_else(|| shape_error("object(TYPE,ID)"))?;
                let (action, action_args) = args[1]
                    .binary("action")
                    .and_then(|(a, v)| Some((a.as_sym()?.to_string(), v.clone().into_term()?)))
                    .ok_or_else(|| shape_error("action(NAME,TERM)"))?;
                let step = args[2].as_int().ok_or_else(|| shape_error("integer time step"))?;
                set.occurs.push(OccursFact { object_type: ty, object_id: id, action, args: action_args, step });
            }
            "err" => {
                if args.len() != 3 {
                    return Err(FactError::Arity { predicate: "err".into(), got: args.len(), expected: 3 });
                }
                let file = args[0].as_sym().ok_or_else(|| shape_error("symbol"))?;
                let constraint = args[1].as_sym().ok_or_else(|| shape_error("symbol"))?;
                let params = args[2].clone().into_term().ok_or_else(|| shape_error("ground tuple"))?;
                set.errs.push(Diagnostic::new(file, constraint, params));
            }
            "assignment" => {
                if args.len() != 2 {
                    return Err(FactError::Arity { predicate: "assignment".into(), got: args.len(), expected: 2 });
                }
                let robot = object(&args[0])
                    .filter(|(ty, _)| ty == "robot")
                    .map(|(_, id)| id)
                    .ok_or_else(|| shape_error("object(robot,ID)"))?;
                let (order, shelf) = args[1]
                    .binary("task")
                    .and_then(|(o, s)| Some((o.as_int()?, s.as_int()?)))
                    .ok_or_else(|| shape_error("task(ORDER,SHELF)"))?;
                set.assignments.push(AssignmentFact { robot, order, shelf });
            }
            other => {
                if options.strict {
                    return Err(FactError::UnknownPredicate(other.to_string()));
                }
                set.unknown.push(UnknownFact { name: other.to_string(), arity: args.len(), text: format!("{fact}.") });
            }
        }
    }
    Ok(set)
}

fn object(raw: &Raw) -> Option<(String, i64)> {
    let (ty, id) = raw.binary("object")?;
    Some((ty.as_sym()?.to_string(), id.as_int()?))
}
