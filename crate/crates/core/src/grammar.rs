//! Grammar files: tape declarations, alphabets, and rules.
//!
//! ```text
//! tapes lexical 1 surface 1
//! alphabet 1 : V B c d
//! alphabet 2 : V b c d
//! rule R1 =>  lex : V _ B _        surf : V _ b _
//! rule R3 <=> lex : c _ [] _ d     surf : c _ b _ d
//! ```
//!
//! Each side lists `left _ centre _ right`; multiple tapes on a side are
//! separated by `,`. A left context `x` stands for `Σ*x` and a right context
//! `x` for `xΣ*`, so an omitted context (or a lone `*`) is unconstrained.
//! An omitted centre field is ε. Symbols are single characters.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

/// Names that belong to the compiler: padding, partition marker, placeholder.
pub const RESERVED: [char; 3] = ['0', 'w', 't'];

const SYNTAX: &str = "_,|*+?()[].:#=<>-";

fn is_symbol_char(c: char) -> bool {
    !c.is_whitespace() && !SYNTAX.contains(c)
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

impl ParseError {
    fn new(line: usize, message: impl Into<String>) -> Self {
        Self {
            line,
            message: message.into(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Severity {
    Warning,
    Error,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub line: Option<usize>,
    pub message: String,
}

impl Diagnostic {
    fn error(line: Option<usize>, message: impl Into<String>) -> Self {
        Self {
            severity: Severity::Error,
            line,
            message: message.into(),
        }
    }

    fn warning(line: Option<usize>, message: impl Into<String>) -> Self {
        Self {
            severity: Severity::Warning,
            line,
            message: message.into(),
        }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        match self.line {
            Some(line) => write!(f, "{tag}: line {line}: {}", self.message),
            None => write!(f, "{tag}: {}", self.message),
        }
    }
}

/// A tuple of strings, one per tape.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StringTuple(pub Vec<String>);

impl StringTuple {
    pub fn new<S: Into<String>>(parts: impl IntoIterator<Item = S>) -> Self {
        Self(parts.into_iter().map(Into::into).collect())
    }

    pub fn arity(&self) -> usize {
        self.0.len()
    }

    pub fn tape(&self, i: usize) -> &str {
        &self.0[i]
    }

    pub fn is_all_empty(&self) -> bool {
        self.0.iter().all(String::is_empty)
    }

    /// n-way concatenation.
    pub fn concat(&self, other: &StringTuple) -> StringTuple {
        StringTuple(self.0.iter().zip(&other.0).map(|(a, b)| format!("{a}{b}")).collect())
    }
}

impl fmt::Display for StringTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "⟨{}⟩", self.0.join(","))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TapeConfig {
    lexical: usize,
    surface: usize,
    alphabets: Vec<BTreeSet<char>>,
}

impl TapeConfig {
    pub fn new(lexical: usize, surface: usize, alphabets: Vec<BTreeSet<char>>) -> Result<Self, String> {
        if lexical == 0 || surface == 0 {
            return Err("at least one lexical and one surface tape are required".into());
        }
        if alphabets.len() != lexical + surface {
            return Err(format!(
                "expected {} alphabets, found {}",
                lexical + surface,
                alphabets.len()
            ));
        }
        for (i, alpha) in alphabets.iter().enumerate() {
            if let Some(bad) = alpha.iter().find(|c| RESERVED.contains(c) || !is_symbol_char(**c)) {
                return Err(format!("tape {}: `{bad}` cannot be used as a symbol", i + 1));
            }
        }
        Ok(Self {
            lexical,
            surface,
            alphabets,
        })
    }

    pub fn lexical(&self) -> usize {
        self.lexical
    }

    pub fn surface(&self) -> usize {
        self.surface
    }

    /// Total tape count `n = N + M`.
    pub fn tapes(&self) -> usize {
        self.lexical + self.surface
    }

    pub fn alphabet(&self, tape: usize) -> &BTreeSet<char> {
        &self.alphabets[tape]
    }

    pub fn alphabets(&self) -> &[BTreeSet<char>] {
        &self.alphabets
    }
}

/// Per-tape regular expression in user syntax.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Pattern {
    Epsilon,
    Symbol(char),
    /// `.`: any symbol of the tape's alphabet.
    Any,
    Concat(Vec<Pattern>),
    Union(Vec<Pattern>),
    Star(Box<Pattern>),
    Plus(Box<Pattern>),
    Optional(Box<Pattern>),
}

impl Pattern {
    pub fn literal(s: &str) -> Self {
        Self::concat(s.chars().map(Pattern::Symbol).collect())
    }

    fn concat(parts: Vec<Pattern>) -> Self {
        let mut flat = Vec::new();
        for p in parts {
            match p {
                Pattern::Concat(inner) => flat.extend(inner),
                other => flat.push(other),
            }
        }
        match flat.len() {
            0 => Pattern::Epsilon,
            1 => flat.pop().unwrap(),
            _ => Pattern::Concat(flat),
        }
    }

    fn union(parts: Vec<Pattern>) -> Self {
        let mut flat = Vec::new();
        for p in parts {
            match p {
                Pattern::Union(inner) => flat.extend(inner),
                other => flat.push(other),
            }
        }
        if flat.len() == 1 {
            flat.pop().unwrap()
        } else {
            Pattern::Union(flat)
        }
    }

    /// The string this pattern denotes, if it denotes exactly one.
    pub fn as_literal(&self) -> Option<String> {
        match self {
            Pattern::Epsilon => Some(String::new()),
            Pattern::Symbol(c) => Some(c.to_string()),
            Pattern::Concat(parts) => parts.iter().map(Pattern::as_literal).collect(),
            _ => None,
        }
    }

    pub fn uses_any(&self) -> bool {
        match self {
            Pattern::Any => true,
            Pattern::Epsilon | Pattern::Symbol(_) => false,
            Pattern::Concat(ps) | Pattern::Union(ps) => ps.iter().any(Pattern::uses_any),
            Pattern::Star(p) | Pattern::Plus(p) | Pattern::Optional(p) => p.uses_any(),
        }
    }

    pub fn symbols(&self, out: &mut BTreeSet<char>) {
        match self {
            Pattern::Symbol(c) => {
                out.insert(*c);
            }
            Pattern::Epsilon | Pattern::Any => {}
            Pattern::Concat(ps) | Pattern::Union(ps) => ps.iter().for_each(|p| p.symbols(out)),
            Pattern::Star(p) | Pattern::Plus(p) | Pattern::Optional(p) => p.symbols(out),
        }
    }

    /// Parses one field. Errors are returned as plain messages; the caller
    /// attaches the line.
    pub fn parse(text: &str, alphabet: &BTreeSet<char>) -> Result<Self, String> {
        let chars: Vec<char> = text.chars().filter(|c| !c.is_whitespace()).collect();
        let mut p = PatternParser {
            chars: &chars,
            pos: 0,
            alphabet,
        };
        let pat = p.union()?;
        if p.pos != chars.len() {
            return Err(format!("unexpected `{}` in `{}`", chars[p.pos], text.trim()));
        }
        Ok(pat)
    }

    fn precedence(&self) -> u8 {
        match self {
            Pattern::Union(_) => 0,
            Pattern::Concat(_) => 1,
            Pattern::Star(_) | Pattern::Plus(_) | Pattern::Optional(_) => 2,
            _ => 3,
        }
    }

    fn fmt_at(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        if self.precedence() < min {
            f.write_str("(")?;
            self.fmt_at(f, 0)?;
            return f.write_str(")");
        }
        match self {
            Pattern::Epsilon => f.write_str("[]"),
            Pattern::Symbol(c) => write!(f, "{c}"),
            Pattern::Any => f.write_str("."),
            Pattern::Concat(ps) => ps.iter().try_for_each(|p| p.fmt_at(f, 2)),
            Pattern::Union(ps) => {
                for (i, p) in ps.iter().enumerate() {
                    if i > 0 {
                        f.write_str("|")?;
                    }
                    p.fmt_at(f, 1)?;
                }
                Ok(())
            }
            Pattern::Star(p) => {
                p.fmt_at(f, 2)?;
                f.write_str("*")
            }
            Pattern::Plus(p) => {
                p.fmt_at(f, 2)?;
                f.write_str("+")
            }
            Pattern::Optional(p) => {
                p.fmt_at(f, 2)?;
                f.write_str("?")
            }
        }
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_at(f, 0)
    }
}

struct PatternParser<'a> {
    chars: &'a [char],
    pos: usize,
    alphabet: &'a BTreeSet<char>,
}

impl PatternParser<'_> {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn union(&mut self) -> Result<Pattern, String> {
        let mut alts = vec![self.concat()?];
        while self.peek() == Some('|') {
            self.pos += 1;
            alts.push(self.concat()?);
        }
        Ok(Pattern::union(alts))
    }

    fn concat(&mut self) -> Result<Pattern, String> {
        let mut parts = Vec::new();
        while let Some(c) = self.peek() {
            if c == '|' || c == ')' {
                break;
            }
            parts.push(self.postfix()?);
        }
        Ok(Pattern::concat(parts))
    }

    fn postfix(&mut self) -> Result<Pattern, String> {
        let mut p = self.atom()?;
        while let Some(c) = self.peek() {
            p = match c {
                '*' => Pattern::Star(Box::new(p)),
                '+' => Pattern::Plus(Box::new(p)),
                '?' => Pattern::Optional(Box::new(p)),
                _ => break,
            };
            self.pos += 1;
        }
        Ok(p)
    }

    fn atom(&mut self) -> Result<Pattern, String> {
        let c = self.peek().ok_or("unexpected end of expression")?;
        self.pos += 1;
        match c {
            '.' => Ok(Pattern::Any),
            '[' => {
                if self.peek() == Some(']') {
                    self.pos += 1;
                    Ok(Pattern::Epsilon)
                } else {
                    Err("`[` must be followed by `]`".into())
                }
            }
            '(' => {
                let inner = self.union()?;
                if self.peek() != Some(')') {
                    return Err("unbalanced `(`".into());
                }
                self.pos += 1;
                Ok(inner)
            }
            c if RESERVED.contains(&c) => Err(format!("`{c}` is a reserved symbol")),
            c if !is_symbol_char(c) => Err(format!("unexpected `{c}`")),
            c if !self.alphabet.contains(&c) => Err(format!("unknown symbol `{c}`")),
            c => Ok(Pattern::Symbol(c)),
        }
    }
}

/// Context-restriction rule `(l, c, r)`; `centre` is a set of literal tuples.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CrRule {
    pub name: String,
    pub left: Vec<Pattern>,
    pub centre: BTreeSet<StringTuple>,
    pub right: Vec<Pattern>,
    pub line: Option<usize>,
}

/// Surface-coercion rule `(l, c_l, c_s, r)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScRule {
    pub name: String,
    pub left: Vec<Pattern>,
    /// One pattern per lexical tape.
    pub lexical_centre: Vec<Pattern>,
    /// One pattern per surface tape.
    pub surface_centre: Vec<Pattern>,
    pub right: Vec<Pattern>,
    pub line: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Grammar {
    pub tapes: TapeConfig,
    pub cr_rules: Vec<CrRule>,
    pub sc_rules: Vec<ScRule>,
}

impl Grammar {
    /// Builds a grammar programmatically, checking arities and symbols.
    pub fn new(tapes: TapeConfig, cr_rules: Vec<CrRule>, sc_rules: Vec<ScRule>) -> Result<Self, String> {
        let n = tapes.tapes();
        for r in &cr_rules {
            if r.left.len() != n || r.right.len() != n {
                return Err(format!("rule {}: contexts must have {n} tapes", r.name));
            }
            for c in &r.centre {
                if c.arity() != n {
                    return Err(format!("rule {}: centre {c} must have {n} tapes", r.name));
                }
                for (i, s) in c.0.iter().enumerate() {
                    if let Some(bad) = s.chars().find(|ch| !tapes.alphabet(i).contains(ch)) {
                        return Err(format!("rule {}: unknown symbol `{bad}` on tape {}", r.name, i + 1));
                    }
                }
            }
        }
        for r in &sc_rules {
            if r.left.len() != n
                || r.right.len() != n
                || r.lexical_centre.len() != tapes.lexical()
                || r.surface_centre.len() != tapes.surface()
            {
                return Err(format!("rule {}: arity mismatch", r.name));
            }
        }
        Ok(Self {
            tapes,
            cr_rules,
            sc_rules,
        })
    }

    /// Copy with source line numbers erased, for structural comparison.
    pub fn without_lines(&self) -> Self {
        let mut g = self.clone();
        g.cr_rules.iter_mut().for_each(|r| r.line = None);
        g.sc_rules.iter_mut().for_each(|r| r.line = None);
        g
    }

    /// Grammar with the same tapes and CR rules but no SC rules.
    pub fn without_coercions(&self) -> Self {
        Self {
            tapes: self.tapes.clone(),
            cr_rules: self.cr_rules.clone(),
            sc_rules: Vec::new(),
        }
    }

    /// Every distinct CR centre tuple.
    pub fn centre_tuples(&self) -> BTreeSet<StringTuple> {
        self.cr_rules.iter().flat_map(|r| r.centre.iter().cloned()).collect()
    }

    /// Semantic checks beyond parsing; never fails, only reports.
    pub fn validate(&self) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        if self.cr_rules.is_empty() {
            out.push(Diagnostic::error(
                None,
                "grammar has no context-restriction rules, so no partition is licensable",
            ));
        }
        // Literal centres are disjoint unless they share a tuple, and
        // right-padding is injective, so tuple overlap is the only case.
        for (i, a) in self.cr_rules.iter().enumerate() {
            for b in &self.cr_rules[i + 1..] {
                if a.centre != b.centre {
                    if let Some(shared) = a.centre.intersection(&b.centre).next() {
                        out.push(Diagnostic::error(
                            b.line,
                            format!(
                                "centres of rules {} and {} overlap on {shared} without being equal",
                                a.name, b.name
                            ),
                        ));
                    }
                }
            }
        }
        for r in &self.cr_rules {
            let unconstrained = r.left.iter().chain(&r.right).all(|p| *p == Pattern::Epsilon);
            if unconstrained && r.centre.iter().any(StringTuple::is_all_empty) {
                out.push(Diagnostic::warning(
                    r.line,
                    format!("rule {} licenses an empty partition in every context", r.name),
                ));
            }
        }
        let n = self.tapes.tapes();
        let mut used: Vec<BTreeSet<char>> = vec![BTreeSet::new(); n];
        let mut any: Vec<bool> = vec![false; n];
        let mut note = |tape: usize, p: &Pattern| {
            p.symbols(&mut used[tape]);
            any[tape] |= p.uses_any();
        };
        for r in &self.cr_rules {
            for (i, p) in r.left.iter().chain(&r.right).enumerate() {
                note(i % n, p);
            }
        }
        for r in &self.sc_rules {
            for (i, p) in r.left.iter().chain(&r.right).enumerate() {
                note(i % n, p);
            }
            for (i, p) in r.lexical_centre.iter().enumerate() {
                note(i, p);
            }
            for (i, p) in r.surface_centre.iter().enumerate() {
                note(self.tapes.lexical() + i, p);
            }
        }
        for c in self.centre_tuples() {
            for (i, s) in c.0.iter().enumerate() {
                used[i].extend(s.chars());
            }
        }
        for tape in 0..n {
            if any[tape] {
                continue;
            }
            let unused: Vec<String> = self
                .tapes
                .alphabet(tape)
                .difference(&used[tape])
                .map(char::to_string)
                .collect();
            if !unused.is_empty() {
                out.push(Diagnostic::warning(
                    None,
                    format!("tape {}: declared but unused symbol(s) {}", tape + 1, unused.join(" ")),
                ));
            }
        }
        out
    }
}

fn join_fields(fields: &[String]) -> String {
    if fields.iter().all(String::is_empty) {
        String::new()
    } else {
        fields.join(", ")
    }
}

fn context_field(p: &Pattern) -> String {
    match p {
        Pattern::Epsilon => String::new(),
        other => other.to_string(),
    }
}

fn centre_field(s: &str) -> String {
    if s.is_empty() {
        "[]".into()
    } else {
        s.into()
    }
}

fn write_sides(
    f: &mut fmt::Formatter<'_>,
    split: usize,
    left: &[Pattern],
    centre: &[String],
    right: &[Pattern],
) -> fmt::Result {
    let l: Vec<String> = left.iter().map(context_field).collect();
    let r: Vec<String> = right.iter().map(context_field).collect();
    write!(
        f,
        "lex : {} _ {} _ {}   surf : {} _ {} _ {}",
        join_fields(&l[..split]),
        centre[..split].join(", "),
        join_fields(&r[..split]),
        join_fields(&l[split..]),
        centre[split..].join(", "),
        join_fields(&r[split..]),
    )
}

/// Prints in the grammar file format. A CR rule with several centre tuples
/// is written as one line per tuple.
impl fmt::Display for Grammar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let t = &self.tapes;
        writeln!(f, "tapes lexical {} surface {}", t.lexical(), t.surface())?;
        for (i, alpha) in t.alphabets().iter().enumerate() {
            let syms: Vec<String> = alpha.iter().map(char::to_string).collect();
            writeln!(f, "alphabet {} : {}", i + 1, syms.join(" "))?;
        }
        for r in &self.cr_rules {
            for c in &r.centre {
                let centre: Vec<String> = c.0.iter().map(|s| centre_field(s)).collect();
                write!(f, "rule {} => ", r.name)?;
                write_sides(f, t.lexical(), &r.left, &centre, &r.right)?;
                writeln!(f)?;
            }
        }
        for r in &self.sc_rules {
            let centre: Vec<String> = r
                .lexical_centre
                .iter()
                .chain(&r.surface_centre)
                .map(|p| match p {
                    Pattern::Epsilon => "[]".to_string(),
                    other => other.to_string(),
                })
                .collect();
            write!(f, "rule {} <= ", r.name)?;
            write_sides(f, t.lexical(), &r.left, &centre, &r.right)?;
            writeln!(f)?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Arrow {
    Restrict,
    Coerce,
    Both,
}

struct Side {
    left: Vec<String>,
    centre: Vec<String>,
    right: Vec<String>,
}

fn split_side(text: &str, tapes: usize, line: usize, side: &str) -> Result<Side, ParseError> {
    let parts: Vec<&str> = text.split('_').collect();
    if parts.len() != 3 {
        return Err(ParseError::new(
            line,
            format!("{side} side must have the form `left _ centre _ right`"),
        ));
    }
    let fields = |part: &str, what: &str| -> Result<Vec<String>, ParseError> {
        if part.trim().is_empty() {
            return Ok(vec![String::new(); tapes]);
        }
        let fs: Vec<String> = part.split(',').map(|s| s.trim().to_owned()).collect();
        if fs.len() != tapes {
            return Err(ParseError::new(
                line,
                format!(
                    "arity mismatch: {side} {what} has {} field(s) but the {side} side has {tapes} tape(s)",
                    fs.len()
                ),
            ));
        }
        Ok(fs)
    };
    Ok(Side {
        left: fields(parts[0], "left context")?,
        centre: fields(parts[1], "centre")?,
        right: fields(parts[2], "right context")?,
    })
}

/// Splits `lex : ... surf : ...` into its two sides.
fn split_body(body: &str, line: usize) -> Result<(Option<String>, Option<String>), ParseError> {
    let pieces: Vec<&str> = body.split(':').collect();
    if pieces.len() < 2 {
        return Err(ParseError::new(
            line,
            "rule body needs `lex :` and/or `surf :` sections",
        ));
    }
    let mut keyword = pieces[0].trim().to_owned();
    let mut lex = None;
    let mut surf = None;
    for (i, piece) in pieces.iter().enumerate().skip(1) {
        let (content, next) = if i + 1 == pieces.len() {
            (piece.to_string(), String::new())
        } else {
            let trimmed = piece.trim_end();
            let cut = trimmed.rfind(char::is_whitespace).map_or(0, |p| p + 1);
            (trimmed[..cut].to_owned(), trimmed[cut..].to_owned())
        };
        let slot = match keyword.as_str() {
            "lex" => &mut lex,
            "surf" => &mut surf,
            other => {
                return Err(ParseError::new(
                    line,
                    format!("expected `lex` or `surf` before `:`, found `{other}`"),
                ))
            }
        };
        if slot.is_some() {
            return Err(ParseError::new(line, format!("duplicate `{keyword}` section")));
        }
        *slot = Some(content);
        keyword = next;
    }
    Ok((lex, surf))
}

/// Parses grammar text. Composite `<=>` rules become one CR and one SC rule.
pub fn parse_grammar(text: &str) -> Result<Grammar, ParseError> {
    let lines: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty())
        .collect();
    if lines.is_empty() {
        return Err(ParseError::new(1, "empty grammar: expected a `tapes` declaration"));
    }

    let mut counts: Option<(usize, usize, usize)> = None;
    let mut alphabets: Vec<Option<BTreeSet<char>>> = Vec::new();
    for &(line, content) in &lines {
        let words: Vec<&str> = content.split_whitespace().collect();
        match words[0] {
            "tapes" => {
                if counts.is_some() {
                    return Err(ParseError::new(line, "duplicate `tapes` declaration"));
                }
                let (lexical, surface) = match words.as_slice() {
                    ["tapes", "lexical", n, "surface", m] => (
                        n.parse::<usize>()
                            .map_err(|_| ParseError::new(line, format!("bad tape count `{n}`")))?,
                        m.parse::<usize>()
                            .map_err(|_| ParseError::new(line, format!("bad tape count `{m}`")))?,
                    ),
                    _ => return Err(ParseError::new(line, "expected `tapes lexical <N> surface <M>`")),
                };
                if lexical == 0 || surface == 0 {
                    return Err(ParseError::new(line, "need at least one lexical and one surface tape"));
                }
                counts = Some((lexical, surface, line));
                alphabets = vec![None; lexical + surface];
            }
            "alphabet" => {
                let Some(_) = counts else {
                    return Err(ParseError::new(line, "`alphabet` before `tapes` declaration"));
                };
                let (head, syms) = content
                    .split_once(':')
                    .ok_or_else(|| ParseError::new(line, "expected `alphabet <tape> : symbols`"))?;
                let idx = head
                    .split_whitespace()
                    .nth(1)
                    .and_then(|s| s.parse::<usize>().ok())
                    .filter(|&i| i >= 1 && i <= alphabets.len())
                    .ok_or_else(|| ParseError::new(line, "alphabet tape number out of range"))?;
                if alphabets[idx - 1].is_some() {
                    return Err(ParseError::new(line, format!("duplicate alphabet for tape {idx}")));
                }
                let mut set = BTreeSet::new();
                for tok in syms.split_whitespace() {
                    let mut cs = tok.chars();
                    let (Some(c), None) = (cs.next(), cs.next()) else {
                        return Err(ParseError::new(
                            line,
                            format!("symbol `{tok}` must be a single character"),
                        ));
                    };
                    if RESERVED.contains(&c) {
                        return Err(ParseError::new(line, format!("`{c}` is a reserved symbol")));
                    }
                    if !is_symbol_char(c) {
                        return Err(ParseError::new(line, format!("`{c}` cannot be used as a symbol")));
                    }
                    set.insert(c);
                }
                alphabets[idx - 1] = Some(set);
            }
            "rule" => {}
            other => return Err(ParseError::new(line, format!("unknown declaration `{other}`"))),
        }
    }
    let (lexical, surface, tapes_line) =
        counts.ok_or_else(|| ParseError::new(lines[0].0, "missing `tapes` declaration"))?;
    let alphabets: Vec<BTreeSet<char>> = alphabets
        .into_iter()
        .enumerate()
        .map(|(i, a)| a.ok_or_else(|| ParseError::new(tapes_line, format!("no alphabet declared for tape {}", i + 1))))
        .collect::<Result<_, _>>()?;
    let tapes = TapeConfig::new(lexical, surface, alphabets).map_err(|m| ParseError::new(tapes_line, m))?;

    let mut cr_rules = Vec::new();
    let mut sc_rules = Vec::new();
    for &(line, content) in &lines {
        let Some(rest) = content.strip_prefix("rule") else {
            continue;
        };
        let mut words = rest.split_whitespace();
        let name = words
            .next()
            .ok_or_else(|| ParseError::new(line, "rule needs a name"))?
            .to_owned();
        let arrow_text = words
            .next()
            .ok_or_else(|| ParseError::new(line, "rule needs an operator"))?;
        let arrow = match arrow_text {
            "=>" => Arrow::Restrict,
            "<=" => Arrow::Coerce,
            "<=>" => Arrow::Both,
            other => {
                return Err(ParseError::new(
                    line,
                    format!("unknown operator `{other}`; expected `=>`, `<=` or `<=>`"),
                ))
            }
        };
        let body_start = content.find(arrow_text).unwrap() + arrow_text.len();
        let (lex, surf) = split_body(&content[body_start..], line)?;
        let lex = split_side(lex.as_deref().unwrap_or("_ _"), lexical, line, "lex")?;
        let surf = split_side(surf.as_deref().unwrap_or("_ _"), surface, line, "surf")?;

        let parse_field = |text: &str, tape: usize| -> Result<Pattern, ParseError> {
            if text == "*" {
                return Ok(Pattern::Epsilon);
            }
            Pattern::parse(text, tapes.alphabet(tape))
                .map_err(|m| ParseError::new(line, format!("tape {}: {m}", tape + 1)))
        };
        let contexts = |fields: [&Vec<String>; 2]| -> Result<Vec<Pattern>, ParseError> {
            fields
                .iter()
                .flat_map(|f| f.iter())
                .enumerate()
                .map(|(tape, text)| parse_field(text, tape))
                .collect()
        };
        let left = contexts([&lex.left, &surf.left])?;
        let right = contexts([&lex.right, &surf.right])?;
        let centre_patterns: Vec<Pattern> = lex
            .centre
            .iter()
            .chain(&surf.centre)
            .enumerate()
            .map(|(tape, text)| {
                if text == "*" {
                    if arrow == Arrow::Coerce {
                        Ok(Pattern::Star(Box::new(Pattern::Any)))
                    } else {
                        Err(ParseError::new(line, "`*` is not a literal centre"))
                    }
                } else {
                    parse_field(text, tape)
                }
            })
            .collect::<Result<_, _>>()?;

        if arrow != Arrow::Coerce {
            let literal: Vec<String> = centre_patterns
                .iter()
                .enumerate()
                .map(|(tape, p)| {
                    p.as_literal().ok_or_else(|| {
                        ParseError::new(
                            line,
                            format!(
                                "tape {}: context-restriction centres must be literal strings, found `{p}`",
                                tape + 1
                            ),
                        )
                    })
                })
                .collect::<Result<_, _>>()?;
            let tuple = StringTuple(literal);
            match cr_rules.iter_mut().find(|r: &&mut CrRule| r.name == name) {
                // Repeated `=>` lines with one name build a centre set.
                Some(existing) => {
                    if existing.left != left || existing.right != right {
                        return Err(ParseError::new(
                            line,
                            format!("rule {name} is repeated with different contexts"),
                        ));
                    }
                    existing.centre.insert(tuple);
                }
                None => cr_rules.push(CrRule {
                    name: name.clone(),
                    left: left.clone(),
                    centre: BTreeSet::from([tuple]),
                    right: right.clone(),
                    line: Some(line),
                }),
            }
        }
        if arrow != Arrow::Restrict {
            sc_rules.push(ScRule {
                name,
                left,
                lexical_centre: centre_patterns[..lexical].to_vec(),
                surface_centre: centre_patterns[lexical..].to_vec(),
                right,
                line: Some(line),
            });
        }
    }
    Ok(Grammar {
        tapes,
        cr_rules,
        sc_rules,
    })
}
