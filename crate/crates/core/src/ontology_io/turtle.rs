//! Parser for N-Triples and the Turtle subset we accept.
//!
//! Supported: `@prefix`/`PREFIX`, `@base`/`BASE`, prefixed names, the `a`
//! keyword, predicate lists (`;`), object lists (`,`), string literals in all
//! four quoting styles with language tags or datatypes, and bare numeric or
//! boolean literals. Blank nodes and collections are rejected.

use std::collections::HashMap;

use crate::error::{Error, Result};

pub const RDF_TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum RawObject {
    Iri(String),
    Literal { lexical: String, lang: Option<String> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct RawTriple {
    pub subject: String,
    pub predicate: String,
    pub object: RawObject,
    pub line: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BlankNodePolicy {
    /// Fail with an "unsupported construct" error.
    #[default]
    Reject,
    /// Drop every statement that mentions a blank node label (`_:x`).
    Skip,
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Iri(String),
    PrefixedName(String, String),
    BlankLabel(String),
    Literal(String),
    LangTag(String),
    DatatypeMark,
    Bare(String),
    Dot,
    Semicolon,
    Comma,
    OpenBracket,
    OpenParen,
    PrefixDirective,
    BaseDirective,
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    // Set when a prefixed name swallowed the statement-terminating '.'.
    pending_dot: bool,
}

impl<'a> Lexer<'a> {
    fn new(input: &'a str) -> Self {
        Lexer {
            chars: input.chars().peekable(),
            line: 1,
            pending_dot: false,
        }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next();
        if c == Some('\n') {
            self.line += 1;
        }
        c
    }

    fn syntax(&self, message: impl Into<String>) -> Error {
        Error::Syntax {
            line: self.line,
            message: message.into(),
        }
    }

    fn skip_trivia(&mut self) {
        while let Some(&c) = self.chars.peek() {
            if c.is_whitespace() {
                self.bump();
            } else if c == '#' {
                while let Some(c) = self.bump() {
                    if c == '\n' {
                        break;
                    }
                }
            } else {
                break;
            }
        }
    }

    /// Returns the next token with the line it starts on.
    fn next_token(&mut self) -> Result<Option<(Token, usize)>> {
        if self.pending_dot {
            self.pending_dot = false;
            return Ok(Some((Token::Dot, self.line)));
        }
        self.skip_trivia();
        let line = self.line;
        let Some(&c) = self.chars.peek() else {
            return Ok(None);
        };
        let tok = match c {
            '<' => {
                self.bump();
                Token::Iri(self.iri_body()?)
            }
            '"' | '\'' => Token::Literal(self.string_literal(c)?),
            '@' => {
                self.bump();
                let word = self.take_while(|c| c.is_ascii_alphanumeric() || c == '-');
                match word.as_str() {
                    "prefix" => Token::PrefixDirective,
                    "base" => Token::BaseDirective,
                    "" => return Err(self.syntax("dangling '@'")),
                    _ => Token::LangTag(word),
                }
            }
            '^' => {
                self.bump();
                if self.bump() != Some('^') {
                    return Err(self.syntax("expected '^^'"));
                }
                Token::DatatypeMark
            }
            '.' => {
                self.bump();
                // A '.' directly followed by a digit starts a decimal literal.
                if matches!(self.chars.peek(), Some(d) if d.is_ascii_digit()) {
                    let rest = self.take_while(is_number_char);
                    Token::Literal(format!(".{rest}"))
                } else {
                    Token::Dot
                }
            }
            ';' => {
                self.bump();
                Token::Semicolon
            }
            ',' => {
                self.bump();
                Token::Comma
            }
            '[' => {
                self.bump();
                Token::OpenBracket
            }
            '(' => {
                self.bump();
                Token::OpenParen
            }
            '_' => {
                self.bump();
                if self.bump() != Some(':') {
                    return Err(self.syntax("expected ':' after '_'"));
                }
                Token::BlankLabel(self.take_while(is_name_char))
            }
            c if c.is_ascii_digit() || c == '+' || c == '-' => {
                let mut num = self.take_while(is_number_char);
                if num.ends_with('.') {
                    num.pop();
                    self.pending_dot = true;
                }
                Token::Literal(num)
            }
            c if is_name_start(c) || c == ':' => {
                let word = self.take_name();
                match word.split_once(':') {
                    Some((prefix, local)) => {
                        Token::PrefixedName(prefix.to_string(), local.to_string())
                    }
                    None => {
                        if word.eq_ignore_ascii_case("prefix") {
                            Token::PrefixDirective
                        } else if word.eq_ignore_ascii_case("base") {
                            Token::BaseDirective
                        } else {
                            Token::Bare(word)
                        }
                    }
                }
            }
            other => return Err(self.syntax(format!("unexpected character '{other}'"))),
        };
        Ok(Some((tok, line)))
    }

    fn take_while(&mut self, pred: impl Fn(char) -> bool) -> String {
        let mut out = String::new();
        while let Some(&c) = self.chars.peek() {
            if !pred(c) {
                break;
            }
            out.push(c);
            self.bump();
        }
        out
    }

    /// Prefixed names may contain '.', but not as their final character.
    fn take_name(&mut self) -> String {
        let mut out = self.take_while(|c| is_name_char(c) || c == ':' || c == '.');
        if out.ends_with('.') {
            out.pop();
            self.pending_dot = true;
        }
        out
    }

    fn iri_body(&mut self) -> Result<String> {
        let mut out = String::new();
        loop {
            match self.bump() {
                Some('>') => return Ok(out),
                Some('\\') => out.push(self.unicode_escape()?),
                Some(c) if c == '\n' || c == ' ' => {
                    return Err(self.syntax("whitespace inside IRI"));
                }
                Some(c) => out.push(c),
                None => return Err(self.syntax("unterminated IRI")),
            }
        }
    }

    fn unicode_escape(&mut self) -> Result<char> {
        let len = match self.bump() {
            Some('u') => 4,
            Some('U') => 8,
            _ => return Err(self.syntax("invalid escape in IRI")),
        };
        self.hex_char(len)
    }

    fn hex_char(&mut self, len: usize) -> Result<char> {
        let mut code = 0u32;
        for _ in 0..len {
            let d = self
                .bump()
                .and_then(|c| c.to_digit(16))
                .ok_or_else(|| self.syntax("invalid hex digit in escape"))?;
            code = code * 16 + d;
        }
        char::from_u32(code).ok_or_else(|| self.syntax("invalid unicode code point"))
    }

    fn string_literal(&mut self, quote: char) -> Result<String> {
        self.bump();
        let long = if self.chars.peek() == Some(&quote) {
            self.bump();
            if self.chars.peek() == Some(&quote) {
                self.bump();
                true
            } else {
                return Ok(String::new());
            }
        } else {
            false
        };
        let mut out = String::new();
        let mut run = 0usize;
        loop {
            let c = self
                .bump()
                .ok_or_else(|| self.syntax("unterminated string literal"))?;
            if c == quote {
                if !long {
                    return Ok(out);
                }
                run += 1;
                if run == 3 {
                    return Ok(out);
                }
                continue;
            }
            for _ in 0..run {
                out.push(quote);
            }
            run = 0;
            match c {
                '\\' => out.push(self.string_escape()?),
                '\n' if !long => return Err(self.syntax("newline in short string literal")),
                c => out.push(c),
            }
        }
    }

    fn string_escape(&mut self) -> Result<char> {
        Ok(match self.bump() {
            Some('t') => '\t',
            Some('b') => '\u{8}',
            Some('n') => '\n',
            Some('r') => '\r',
            Some('f') => '\u{c}',
            Some('"') => '"',
            Some('\'') => '\'',
            Some('\\') => '\\',
            Some('u') => self.hex_char(4)?,
            Some('U') => self.hex_char(8)?,
            _ => return Err(self.syntax("invalid escape in string literal")),
        })
    }
}

fn is_name_start(c: char) -> bool {
    c.is_alphabetic() || c == '_'
}

fn is_name_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '-'
}

fn is_number_char(c: char) -> bool {
    c.is_ascii_digit() || matches!(c, '.' | 'e' | 'E' | '+' | '-')
}

struct TokenStream<'a> {
    lexer: Lexer<'a>,
    peeked: Option<Option<(Token, usize)>>,
}

impl<'a> TokenStream<'a> {
    fn new(input: &'a str) -> Self {
        TokenStream {
            lexer: Lexer::new(input),
            peeked: None,
        }
    }

    fn peek(&mut self) -> Result<Option<&(Token, usize)>> {
        if self.peeked.is_none() {
            self.peeked = Some(self.lexer.next_token()?);
        }
        Ok(self.peeked.as_ref().and_then(|t| t.as_ref()))
    }

    fn next(&mut self) -> Result<Option<(Token, usize)>> {
        match self.peeked.take() {
            Some(t) => Ok(t),
            None => self.lexer.next_token(),
        }
    }

    fn line(&self) -> usize {
        self.lexer.line
    }

    fn expect_next(&mut self, what: &str) -> Result<(Token, usize)> {
        let line = self.line();
        self.next()?.ok_or_else(|| Error::Syntax {
            line,
            message: format!("unexpected end of input, expected {what}"),
        })
    }
}

pub(crate) fn parse(input: &str, blank_nodes: BlankNodePolicy) -> Result<Vec<RawTriple>> {
    let mut parser = Parser {
        tokens: TokenStream::new(input),
        prefixes: HashMap::new(),
        base: None,
        out: Vec::new(),
        blank_nodes,
    };
    parser.document()?;
    Ok(parser.out)
}

struct Parser<'a> {
    tokens: TokenStream<'a>,
    prefixes: HashMap<String, String>,
    base: Option<String>,
    out: Vec<RawTriple>,
    blank_nodes: BlankNodePolicy,
}

enum Node {
    Iri(String),
    Literal(String, Option<String>),
    Blank,
}

impl Parser<'_> {
    fn document(&mut self) -> Result<()> {
        while let Some((tok, line)) = self.tokens.next()? {
            match tok {
                Token::PrefixDirective => self.prefix_directive(line)?,
                Token::BaseDirective => self.base_directive(line)?,
                other => self.triples(other, line)?,
            }
        }
        Ok(())
    }

    fn prefix_directive(&mut self, line: usize) -> Result<()> {
        let (name, nl) = self.tokens.expect_next("prefix name")?;
        let prefix = match name {
            Token::PrefixedName(p, local) if local.is_empty() => p,
            _ => return Err(syntax(nl, "expected 'prefix:' after @prefix")),
        };
        let (iri, il) = self.tokens.expect_next("prefix IRI")?;
        let Token::Iri(iri) = iri else {
            return Err(syntax(il, "expected IRI in prefix directive"));
        };
        let iri = self.resolve(iri, il)?;
        self.prefixes.insert(prefix, iri);
        self.optional_dot(line)
    }

    fn base_directive(&mut self, line: usize) -> Result<()> {
        let (iri, il) = self.tokens.expect_next("base IRI")?;
        let Token::Iri(iri) = iri else {
            return Err(syntax(il, "expected IRI in base directive"));
        };
        self.base = Some(self.resolve(iri, il)?);
        self.optional_dot(line)
    }

    fn optional_dot(&mut self, _line: usize) -> Result<()> {
        if matches!(self.tokens.peek()?, Some((Token::Dot, _))) {
            self.tokens.next()?;
        }
        Ok(())
    }

    fn triples(&mut self, first: Token, line: usize) -> Result<()> {
        let subject = self.node(first, line, "subject")?;
        let subject = match subject {
            Node::Iri(iri) => Some(iri),
            Node::Blank => None,
            Node::Literal(..) => return Err(syntax(line, "literal in subject position")),
        };
        loop {
            let (verb, vl) = self.tokens.expect_next("predicate")?;
            let predicate = match verb {
                Token::Bare(ref w) if w == "a" => RDF_TYPE.to_string(),
                other => match self.node(other, vl, "predicate")? {
                    Node::Iri(iri) => iri,
                    _ => return Err(syntax(vl, "predicate must be an IRI")),
                },
            };
            loop {
                let (obj, ol) = self.tokens.expect_next("object")?;
                let object = match self.node(obj, ol, "object")? {
                    Node::Iri(iri) => Some(RawObject::Iri(iri)),
                    Node::Literal(lexical, lang) => Some(RawObject::Literal { lexical, lang }),
                    Node::Blank => None,
                };
                if let (Some(s), Some(o)) = (&subject, object) {
                    self.out.push(RawTriple {
                        subject: s.clone(),
                        predicate: predicate.clone(),
                        object: o,
                        line,
                    });
                }
                match self.tokens.expect_next("',', ';' or '.'")? {
                    (Token::Comma, _) => continue,
                    (Token::Semicolon, _) => {
                        // Repeated or trailing semicolons are allowed.
                        while matches!(self.tokens.peek()?, Some((Token::Semicolon, _))) {
                            self.tokens.next()?;
                        }
                        if matches!(self.tokens.peek()?, Some((Token::Dot, _))) {
                            self.tokens.next()?;
                            return Ok(());
                        }
                        break;
                    }
                    (Token::Dot, _) => return Ok(()),
                    (_, l) => return Err(syntax(l, "expected ',', ';' or '.'")),
                }
            }
        }
    }

    fn node(&mut self, tok: Token, line: usize, role: &str) -> Result<Node> {
        match tok {
            Token::Iri(iri) => Ok(Node::Iri(self.resolve(iri, line)?)),
            Token::PrefixedName(prefix, local) => {
                let ns = self.prefixes.get(&prefix).ok_or_else(|| {
                    syntax(line, format!("undeclared prefix '{prefix}:'"))
                })?;
                Ok(Node::Iri(format!("{ns}{}", unescape_local(&local))))
            }
            Token::BlankLabel(_) => match self.blank_nodes {
                BlankNodePolicy::Reject => Err(unsupported(line, "blank node")),
                BlankNodePolicy::Skip => Ok(Node::Blank),
            },
            Token::OpenBracket => Err(unsupported(line, "anonymous blank node '[ ]'")),
            Token::OpenParen => Err(unsupported(line, "collection '( )'")),
            Token::Literal(lexical) if role == "object" => {
                let mut lang = None;
                match self.tokens.peek()? {
                    Some((Token::LangTag(_), _)) => {
                        if let Some((Token::LangTag(tag), _)) = self.tokens.next()? {
                            lang = Some(tag.to_ascii_lowercase());
                        }
                    }
                    Some((Token::DatatypeMark, _)) => {
                        self.tokens.next()?;
                        let (dt, dl) = self.tokens.expect_next("datatype IRI")?;
                        // Datatypes are discarded, but must still be well formed.
                        match self.node(dt, dl, "datatype")? {
                            Node::Iri(_) => {}
                            _ => return Err(syntax(dl, "datatype must be an IRI")),
                        }
                    }
                    _ => {}
                }
                Ok(Node::Literal(lexical, lang))
            }
            Token::Bare(ref w) if role == "object" && (w == "true" || w == "false") => {
                Ok(Node::Literal(w.clone(), None))
            }
            Token::Literal(_) => Err(syntax(line, format!("literal in {role} position"))),
            other => Err(syntax(line, format!("unexpected {other:?} in {role} position"))),
        }
    }

    fn resolve(&self, iri: String, line: usize) -> Result<String> {
        if has_scheme(&iri) {
            return Ok(iri);
        }
        let Some(base) = &self.base else {
            return Err(syntax(line, format!("relative IRI <{iri}> without a base")));
        };
        Ok(resolve_relative(base, &iri))
    }
}

fn unescape_local(local: &str) -> String {
    local.replace('\\', "")
}

fn has_scheme(iri: &str) -> bool {
    match iri.find(':') {
        Some(pos) if pos > 0 => {
            let scheme = &iri[..pos];
            scheme.chars().next().is_some_and(|c| c.is_ascii_alphabetic())
                && scheme
                    .chars()
                    .all(|c| c.is_ascii_alphanumeric() || matches!(c, '+' | '-' | '.'))
        }
        _ => false,
    }
}

fn resolve_relative(base: &str, rel: &str) -> String {
    if rel.is_empty() {
        return base.to_string();
    }
    if rel.starts_with('#') {
        let stem = base.split('#').next().unwrap_or(base);
        return format!("{stem}{rel}");
    }
    if rel.starts_with('/') {
        if let Some(idx) = base.find("://") {
            let after = &base[idx + 3..];
            let host_end = after.find('/').map(|p| idx + 3 + p).unwrap_or(base.len());
            return format!("{}{rel}", &base[..host_end]);
        }
    }
    let stem = base.split('#').next().unwrap_or(base);
    match stem.rfind('/') {
        Some(pos) => format!("{}{rel}", &stem[..=pos]),
        None => format!("{stem}{rel}"),
    }
}

fn syntax(line: usize, message: impl Into<String>) -> Error {
    Error::Syntax {
        line,
        message: message.into(),
    }
}

fn unsupported(line: usize, construct: &str) -> Error {
    Error::Unsupported {
        line,
        construct: construct.to_string(),
    }
}
