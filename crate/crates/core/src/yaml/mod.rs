//! A small YAML 1.2 subset: block mappings and sequences, flow collections,
//! plain/quoted scalars and literal/folded block scalars.
//!
//! Anchors, aliases, tags and multi-document streams are rejected. Every node
//! carries the 1-based line/column where it starts so the GDY layer can point
//! diagnostics at the source.

mod emit;

use alloc::borrow::ToOwned;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

pub use emit::emit;

/// 1-based source position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct Mark {
    pub line: u32,
    pub column: u32,
}

impl fmt::Display for Mark {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScalarStyle {
    Plain,
    SingleQuoted,
    DoubleQuoted,
    Literal,
    Folded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Entry {
    pub key: String,
    pub key_mark: Mark,
    pub value: Node,
}

#[derive(Debug, Clone, PartialEq)]
pub enum NodeKind {
    Scalar(String, ScalarStyle),
    Sequence(Vec<Node>),
    /// Entries keep document order; duplicate keys are preserved so the
    /// schema layer can report them.
    Mapping(Vec<Entry>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    pub kind: NodeKind,
    pub mark: Mark,
}

impl Node {
    pub fn scalar(value: impl Into<String>, style: ScalarStyle) -> Self {
        Node {
            kind: NodeKind::Scalar(value.into(), style),
            mark: Mark::default(),
        }
    }

    pub fn plain(value: impl Into<String>) -> Self {
        Self::scalar(value, ScalarStyle::Plain)
    }

    pub fn sequence(items: Vec<Node>) -> Self {
        Node {
            kind: NodeKind::Sequence(items),
            mark: Mark::default(),
        }
    }

    pub fn mapping(entries: Vec<(String, Node)>) -> Self {
        Node {
            kind: NodeKind::Mapping(
                entries
                    .into_iter()
                    .map(|(key, value)| Entry {
                        key,
                        key_mark: Mark::default(),
                        value,
                    })
                    .collect(),
            ),
            mark: Mark::default(),
        }
    }

    fn null_at(mark: Mark) -> Self {
        Node {
            kind: NodeKind::Scalar(String::new(), ScalarStyle::Plain),
            mark,
        }
    }

    /// `~`, `null` or an empty plain scalar.
    pub fn is_null(&self) -> bool {
        matches!(&self.kind, NodeKind::Scalar(s, ScalarStyle::Plain) if s.is_empty() || s == "~" || s == "null")
    }

    pub fn as_scalar(&self) -> Option<&str> {
        match &self.kind {
            NodeKind::Scalar(s, _) => Some(s),
            _ => None,
        }
    }

    pub fn as_sequence(&self) -> Option<&[Node]> {
        match &self.kind {
            NodeKind::Sequence(items) => Some(items),
            _ => None,
        }
    }

    pub fn as_mapping(&self) -> Option<&[Entry]> {
        match &self.kind {
            NodeKind::Mapping(entries) => Some(entries),
            _ => None,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match &self.kind {
            NodeKind::Scalar(..) => "scalar",
            NodeKind::Sequence(_) => "sequence",
            NodeKind::Mapping(_) => "mapping",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct YamlError {
    pub mark: Mark,
    pub message: String,
}

impl fmt::Display for YamlError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.mark, self.message)
    }
}

impl core::error::Error for YamlError {}

type Result<T> = core::result::Result<T, YamlError>;

fn err<T>(line: u32, column: usize, message: impl Into<String>) -> Result<T> {
    Err(YamlError {
        mark: Mark {
            line,
            column: column as u32 + 1,
        },
        message: message.into(),
    })
}

#[derive(Debug, Clone, Copy)]
struct Line<'a> {
    raw: &'a str,
    number: u32,
    /// Column of the first content character. Rewritten when a compact
    /// `- key: value` item is re-read as a nested collection.
    indent: usize,
}

impl<'a> Line<'a> {
    fn content(&self) -> &'a str {
        &self.raw[self.indent..]
    }

    fn is_blank(&self) -> bool {
        let c = self.content().trim_start_matches(' ');
        c.is_empty() || c.starts_with('#')
    }
}

/// Parses a single YAML document.
pub fn parse(source: &str) -> Result<Node> {
    let mut lines = Vec::new();
    let source = source.strip_suffix('\n').unwrap_or(source);
    for (i, raw) in source.split('\n').enumerate() {
        let raw = raw.strip_suffix('\r').unwrap_or(raw);
        let indent = raw.len() - raw.trim_start_matches(' ').len();
        lines.push(Line {
            raw,
            number: i as u32 + 1,
            indent,
        });
    }
    let mut parser = Parser { lines, pos: 0 };
    parser.document()
}

struct Parser<'a> {
    lines: Vec<Line<'a>>,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn document(&mut self) -> Result<Node> {
        self.skip_blank()?;
        if let Some(line) = self.current() {
            let c = line.content();
            if c == "---" || c.starts_with("--- ") {
                if line.indent != 0 {
                    return err(line.number, line.indent, "document marker must start at column 1");
                }
                self.pos += 1;
            } else if c.starts_with('%') {
                return err(line.number, line.indent, "directives are not supported");
            }
        }
        self.skip_blank()?;
        let root = match self.current() {
            None => Node::null_at(Mark { line: 1, column: 1 }),
            Some(line) => {
                if line.indent != 0 {
                    return err(line.number, line.indent, "top-level node must start at column 1");
                }
                self.block(0)?
            }
        };
        self.skip_blank()?;
        if let Some(line) = self.current() {
            let c = line.content();
            if c == "..." && line.indent == 0 {
                self.pos += 1;
                self.skip_blank()?;
                if let Some(line) = self.current() {
                    return err(line.number, line.indent, "multiple documents are not supported");
                }
            } else if c == "---" || c.starts_with("--- ") {
                return err(line.number, line.indent, "multiple documents are not supported");
            } else {
                return err(line.number, line.indent, "unexpected content after document root");
            }
        }
        Ok(root)
    }

    fn current(&self) -> Option<Line<'a>> {
        self.lines.get(self.pos).copied()
    }

    fn skip_blank(&mut self) -> Result<()> {
        while let Some(line) = self.current() {
            if !line.is_blank() {
                if line.raw[..line.indent].contains('\t') || line.content().starts_with('\t') {
                    return err(line.number, line.indent, "tabs are not allowed for indentation");
                }
                return Ok(());
            }
            self.pos += 1;
        }
        Ok(())
    }

    /// Parses the block node starting on the current (non-blank) line.
    fn block(&mut self, indent: usize) -> Result<Node> {
        let line = self.current().expect("caller checked for a line");
        let content = line.content();
        if is_sequence_item(content) {
            self.sequence(indent)
        } else if find_mapping_colon(content).is_some() {
            self.mapping(indent)
        } else {
            let node = self.inline_value(line, line.indent, indent.saturating_sub(1))?;
            self.skip_blank()?;
            if let Some(next) = self.current() {
                if next.indent > indent {
                    return err(next.number, next.indent, "multi-line plain scalars are not supported");
                }
            }
            Ok(node)
        }
    }

    fn sequence(&mut self, indent: usize) -> Result<Node> {
        let first = self.current().expect("sequence start");
        let mark = Mark {
            line: first.number,
            column: first.indent as u32 + 1,
        };
        let mut items = Vec::new();
        loop {
            self.skip_blank()?;
            let Some(line) = self.current() else { break };
            if line.indent < indent {
                break;
            }
            if line.indent > indent {
                return err(line.number, line.indent, "bad indentation of a sequence entry");
            }
            if !is_sequence_item(line.content()) {
                break;
            }
            let after = &line.content()[1..];
            let rest = after.trim_start_matches(' ');
            if rest.is_empty() || rest.starts_with('#') {
                self.pos += 1;
                self.skip_blank()?;
                let item = match self.current() {
                    Some(next) if next.indent > indent => self.block(next.indent)?,
                    _ => Node::null_at(Mark {
                        line: line.number,
                        column: line.indent as u32 + 2,
                    }),
                };
                items.push(item);
                continue;
            }
            if rest.starts_with('\t') {
                return err(line.number, line.indent + 1, "tabs are not allowed for indentation");
            }
            let inner = line.indent + 1 + (after.len() - rest.len());
            if is_sequence_item(rest) || find_mapping_colon(rest).is_some() {
                self.lines[self.pos].indent = inner;
                items.push(self.block(inner)?);
            } else {
                let shifted = Line { indent: inner, ..line };
                items.push(self.inline_value(shifted, inner, indent)?);
            }
        }
        Ok(Node {
            kind: NodeKind::Sequence(items),
            mark,
        })
    }

    fn mapping(&mut self, indent: usize) -> Result<Node> {
        let first = self.current().expect("mapping start");
        let mark = Mark {
            line: first.number,
            column: first.indent as u32 + 1,
        };
        let mut entries = Vec::new();
        loop {
            self.skip_blank()?;
            let Some(line) = self.current() else { break };
            if line.indent < indent {
                break;
            }
            if line.indent > indent {
                return err(line.number, line.indent, "bad indentation of a mapping entry");
            }
            let content = line.content();
            if is_sequence_item(content) {
                break;
            }
            let Some(colon) = find_mapping_colon(content) else {
                return err(line.number, line.indent, "expected a mapping key");
            };
            let key = parse_key(&content[..colon], line.number, line.indent)?;
            let key_mark = Mark {
                line: line.number,
                column: line.indent as u32 + 1,
            };
            let after = &content[colon + 1..];
            let rest = after.trim_start_matches(' ');
            let value = if rest.is_empty() || rest.starts_with('#') {
                self.pos += 1;
                self.skip_blank()?;
                match self.current() {
                    Some(next) if next.indent > indent => self.block(next.indent)?,
                    Some(next) if next.indent == indent && is_sequence_item(next.content()) => {
                        self.sequence(indent)?
                    }
                    _ => Node::null_at(Mark {
                        line: line.number,
                        column: (line.indent + colon + 2) as u32,
                    }),
                }
            } else {
                let column = line.indent + colon + 1 + (after.len() - rest.len());
                let shifted = Line {
                    indent: column,
                    ..line
                };
                self.inline_value(shifted, column, indent)?
            };
            entries.push(Entry {
                key,
                key_mark,
                value,
            });
        }
        Ok(Node {
            kind: NodeKind::Mapping(entries),
            mark,
        })
    }

    /// Parses a value that starts mid-line at `column`, consuming the line
    /// (and, for block scalars, the following content lines).
    fn inline_value(&mut self, line: Line<'a>, column: usize, parent_indent: usize) -> Result<Node> {
        let text = &line.raw[column..];
        let mark = Mark {
            line: line.number,
            column: column as u32 + 1,
        };
        let first = text.chars().next().unwrap_or(' ');
        match first {
            '|' | '>' => {
                self.pos += 1;
                self.block_scalar(text, line.number, column, parent_indent, mark)
            }
            '&' | '*' | '!' => err(line.number, column, "anchors, aliases and tags are not supported"),
            _ => {
                let mut flow = Flow {
                    text,
                    pos: 0,
                    line: line.number,
                    base: column,
                };
                let node = flow.node(false)?;
                flow.skip_spaces();
                if !flow.at_end_or_comment() {
                    return err(line.number, column + flow.pos, "unexpected trailing characters");
                }
                self.pos += 1;
                Ok(node)
            }
        }
    }

    fn block_scalar(
        &mut self,
        header: &str,
        line_number: u32,
        column: usize,
        parent_indent: usize,
        mark: Mark,
    ) -> Result<Node> {
        let literal = header.starts_with('|');
        let mut chomp = Chomp::Clip;
        let mut explicit = None;
        let mut rest = &header[1..];
        for _ in 0..2 {
            match rest.chars().next() {
                Some('-') => chomp = Chomp::Strip,
                Some('+') => chomp = Chomp::Keep,
                Some(d @ '1'..='9') => explicit = Some(d as usize - '0' as usize),
                _ => break,
            }
            rest = &rest[1..];
        }
        let trailing = rest.trim_start_matches(' ');
        if !trailing.is_empty() && !(trailing.starts_with('#') && rest.len() > trailing.len()) {
            return err(line_number, column + 1, "invalid block scalar header");
        }

        let content_indent = match explicit {
            Some(d) => parent_indent + d,
            None => {
                let mut found = None;
                for l in &self.lines[self.pos..] {
                    if l.raw.trim_start_matches(' ').is_empty() {
                        continue;
                    }
                    found = Some(l.raw.len() - l.raw.trim_start_matches(' ').len());
                    break;
                }
                match found {
                    Some(n) if n > parent_indent => n,
                    _ => usize::MAX,
                }
            }
        };

        let mut body: Vec<&str> = Vec::new();
        while let Some(l) = self.current() {
            let spaces = l.raw.len() - l.raw.trim_start_matches(' ').len();
            if l.raw.trim_start_matches(' ').is_empty() {
                body.push(l.raw.get(content_indent..).unwrap_or(""));
            } else if content_indent != usize::MAX && spaces >= content_indent {
                if l.raw[..content_indent].contains('\t') {
                    return err(l.number, 0, "tabs are not allowed for indentation");
                }
                body.push(&l.raw[content_indent..]);
            } else {
                break;
            }
            self.pos += 1;
        }

        let mut last_content = body.len();
        while last_content > 0 && body[last_content - 1].is_empty() {
            last_content -= 1;
        }
        let (content, trailing_blank) = body.split_at(last_content);
        let mut value = String::new();
        if literal {
            for (i, l) in content.iter().enumerate() {
                if i > 0 {
                    value.push('\n');
                }
                value.push_str(l);
            }
        } else {
            fold_lines(content, &mut value);
        }
        match chomp {
            Chomp::Strip => {}
            Chomp::Clip => {
                if !content.is_empty() {
                    value.push('\n');
                }
            }
            Chomp::Keep => {
                if !content.is_empty() {
                    value.push('\n');
                }
                for _ in trailing_blank {
                    value.push('\n');
                }
            }
        }
        Ok(Node {
            kind: NodeKind::Scalar(
                value,
                if literal {
                    ScalarStyle::Literal
                } else {
                    ScalarStyle::Folded
                },
            ),
            mark,
        })
    }
}

#[derive(Clone, Copy)]
enum Chomp {
    Strip,
    Clip,
    Keep,
}

fn fold_lines(lines: &[&str], out: &mut String) {
    let mut previous_blank = true;
    for (i, l) in lines.iter().enumerate() {
        if l.is_empty() {
            out.push('\n');
            previous_blank = true;
            continue;
        }
        let more_indented = l.starts_with(' ');
        if i > 0 && !previous_blank {
            out.push(if more_indented { '\n' } else { ' ' });
        }
        out.push_str(l);
        previous_blank = false;
    }
}

fn is_sequence_item(content: &str) -> bool {
    content == "-" || content.starts_with("- ") || content.starts_with("-\t")
}

/// Byte offset of the `:` that separates a block mapping key from its value.
fn find_mapping_colon(content: &str) -> Option<usize> {
    let bytes = content.as_bytes();
    match bytes.first()? {
        b'[' | b'{' | b'#' | b'|' | b'>' => None,
        q @ (b'"' | b'\'') => {
            let mut i = 1;
            while i < bytes.len() {
                if bytes[i] == b'\\' && *q == b'"' {
                    i += 2;
                    continue;
                }
                if bytes[i] == *q {
                    if *q == b'\'' && bytes.get(i + 1) == Some(&b'\'') {
                        i += 2;
                        continue;
                    }
                    let rest = &content[i + 1..];
                    let trimmed = rest.trim_start_matches(' ');
                    return if trimmed.starts_with(':')
                        && matches!(trimmed.as_bytes().get(1), None | Some(b' '))
                    {
                        Some(i + 1 + (rest.len() - trimmed.len()))
                    } else {
                        None
                    };
                }
                i += 1;
            }
            None
        }
        _ => {
            for i in 0..bytes.len() {
                match bytes[i] {
                    b'#' if i > 0 && bytes[i - 1] == b' ' => return None,
                    b':' if matches!(bytes.get(i + 1), None | Some(b' ')) => return Some(i),
                    _ => {}
                }
            }
            None
        }
    }
}

fn parse_key(text: &str, line: u32, column: usize) -> Result<String> {
    let trimmed = text.trim_end_matches(' ');
    if trimmed.is_empty() {
        return err(line, column, "empty mapping key");
    }
    let mut flow = Flow {
        text: trimmed,
        pos: 0,
        line,
        base: column,
    };
    let node = flow.node(false)?;
    if flow.pos != trimmed.len() {
        return err(line, column, "invalid mapping key");
    }
    match node.kind {
        NodeKind::Scalar(s, _) => Ok(s),
        _ => err(line, column, "mapping keys must be scalars"),
    }
}

/// Single-line flow scanner.
struct Flow<'a> {
    text: &'a str,
    pos: usize,
    line: u32,
    base: usize,
}

impl<'a> Flow<'a> {
    fn peek(&self) -> Option<char> {
        self.text[self.pos..].chars().next()
    }

    fn skip_spaces(&mut self) {
        while self.peek() == Some(' ') {
            self.pos += 1;
        }
    }

    fn at_end_or_comment(&self) -> bool {
        let rest = &self.text[self.pos..];
        rest.is_empty() || (rest.starts_with('#') && (self.pos == 0 || self.text.as_bytes()[self.pos - 1] == b' '))
    }

    fn mark(&self) -> Mark {
        Mark {
            line: self.line,
            column: (self.base + self.pos) as u32 + 1,
        }
    }

    fn fail<T>(&self, message: impl Into<String>) -> Result<T> {
        err(self.line, self.base + self.pos, message)
    }

    fn node(&mut self, in_flow: bool) -> Result<Node> {
        self.skip_spaces();
        let mark = self.mark();
        match self.peek() {
            Some('[') => {
                self.pos += 1;
                let mut items = Vec::new();
                loop {
                    self.skip_spaces();
                    match self.peek() {
                        Some(']') => {
                            self.pos += 1;
                            break;
                        }
                        None => return self.fail("unterminated flow sequence"),
                        _ => {}
                    }
                    items.push(self.node(true)?);
                    self.skip_spaces();
                    match self.peek() {
                        Some(',') => self.pos += 1,
                        Some(']') => {}
                        _ => return self.fail("expected ',' or ']' in flow sequence"),
                    }
                }
                Ok(Node {
                    kind: NodeKind::Sequence(items),
                    mark,
                })
            }
            Some('{') => {
                self.pos += 1;
                let mut entries = Vec::new();
                loop {
                    self.skip_spaces();
                    match self.peek() {
                        Some('}') => {
                            self.pos += 1;
                            break;
                        }
                        None => return self.fail("unterminated flow mapping"),
                        _ => {}
                    }
                    let key_mark = self.mark();
                    let key = match self.node(true)?.kind {
                        NodeKind::Scalar(s, _) => s,
                        _ => return self.fail("mapping keys must be scalars"),
                    };
                    self.skip_spaces();
                    let value = if self.peek() == Some(':') {
                        self.pos += 1;
                        self.node(true)?
                    } else {
                        Node::null_at(self.mark())
                    };
                    entries.push(Entry {
                        key,
                        key_mark,
                        value,
                    });
                    self.skip_spaces();
                    match self.peek() {
                        Some(',') => self.pos += 1,
                        Some('}') => {}
                        _ => return self.fail("expected ',' or '}' in flow mapping"),
                    }
                }
                Ok(Node {
                    kind: NodeKind::Mapping(entries),
                    mark,
                })
            }
            Some('"') => self.double_quoted(mark),
            Some('\'') => self.single_quoted(mark),
            Some('&') | Some('*') | Some('!') => self.fail("anchors, aliases and tags are not supported"),
            Some(']') | Some('}') | Some(',') if in_flow => Ok(Node::null_at(mark)),
            _ => {
                let start = self.pos;
                let bytes = self.text.as_bytes();
                let mut end = start;
                while end < bytes.len() {
                    let b = bytes[end];
                    if in_flow && matches!(b, b',' | b'[' | b']' | b'{' | b'}') {
                        break;
                    }
                    if b == b':' {
                        let next = bytes.get(end + 1).copied();
                        if next.is_none() || next == Some(b' ') || (in_flow && matches!(next, Some(b',' | b']' | b'}'))) {
                            if in_flow {
                                break;
                            }
                            return self.fail("unexpected ': ' in plain scalar");
                        }
                    }
                    if b == b'#' && end > start && bytes[end - 1] == b' ' {
                        break;
                    }
                    end += 1;
                }
                self.pos = end;
                let value = self.text[start..end].trim_end_matches(' ');
                Ok(Node {
                    kind: NodeKind::Scalar(value.to_owned(), ScalarStyle::Plain),
                    mark,
                })
            }
        }
    }

    fn double_quoted(&mut self, mark: Mark) -> Result<Node> {
        self.pos += 1;
        let mut value = String::new();
        loop {
            let Some(c) = self.peek() else {
                return self.fail("unterminated double-quoted string");
            };
            self.pos += c.len_utf8();
            match c {
                '"' => break,
                '\\' => {
                    let Some(e) = self.peek() else {
                        return self.fail("unterminated escape sequence");
                    };
                    self.pos += e.len_utf8();
                    match e {
                        'n' => value.push('\n'),
                        't' => value.push('\t'),
                        'r' => value.push('\r'),
                        '0' => value.push('\0'),
                        '\\' => value.push('\\'),
                        '"' => value.push('"'),
                        '/' => value.push('/'),
                        ' ' => value.push(' '),
                        'x' | 'u' | 'U' => {
                            let len = match e {
                                'x' => 2,
                                'u' => 4,
                                _ => 8,
                            };
                            let digits = self.text.get(self.pos..self.pos + len).unwrap_or("");
                            let code = u32::from_str_radix(digits, 16).ok().and_then(char::from_u32);
                            match code {
                                Some(ch) if digits.len() == len => value.push(ch),
                                _ => return self.fail("invalid escape sequence"),
                            }
                            self.pos += len;
                        }
                        _ => return self.fail(format!("unknown escape '\\{e}'")),
                    }
                }
                _ => value.push(c),
            }
        }
        Ok(Node {
            kind: NodeKind::Scalar(value, ScalarStyle::DoubleQuoted),
            mark,
        })
    }

    fn single_quoted(&mut self, mark: Mark) -> Result<Node> {
        self.pos += 1;
        let mut value = String::new();
        loop {
            let Some(c) = self.peek() else {
                return self.fail("unterminated single-quoted string");
            };
            self.pos += c.len_utf8();
            if c == '\'' {
                if self.peek() == Some('\'') {
                    self.pos += 1;
                    value.push('\'');
                    continue;
                }
                break;
            }
            value.push(c);
        }
        Ok(Node {
            kind: NodeKind::Scalar(value, ScalarStyle::SingleQuoted),
            mark,
        })
    }
}
