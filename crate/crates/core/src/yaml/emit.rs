use alloc::string::String;
use core::fmt::Write;

use super::{Node, NodeKind, ScalarStyle};

/// Renders a node tree as block-style YAML that [`super::parse`] reads back
/// to an equal tree (modulo marks and scalar styles).
pub fn emit(node: &Node) -> String {
    let mut out = String::new();
    match &node.kind {
        NodeKind::Mapping(entries) if !entries.is_empty() => mapping(&mut out, node, 0),
        NodeKind::Sequence(items) if !items.is_empty() && !is_flow_sequence(node) => sequence(&mut out, node, 0),
        _ => {
            inline(&mut out, node, 0);
            out.push('\n');
        }
    }
    out
}

fn pad(out: &mut String, indent: usize) {
    for _ in 0..indent {
        out.push(' ');
    }
}

fn is_flow_sequence(node: &Node) -> bool {
    match &node.kind {
        NodeKind::Sequence(items) => items.iter().all(|item| match &item.kind {
            NodeKind::Scalar(s, _) => !s.contains('\n'),
            NodeKind::Sequence(_) => is_flow_sequence(item),
            NodeKind::Mapping(_) => false,
        }),
        _ => false,
    }
}

/// True for nodes written on the same line as their key or dash.
fn is_inline(node: &Node) -> bool {
    match &node.kind {
        NodeKind::Scalar(..) => true,
        NodeKind::Sequence(items) => items.is_empty() || is_flow_sequence(node),
        NodeKind::Mapping(entries) => entries.is_empty(),
    }
}

fn mapping(out: &mut String, node: &Node, indent: usize) {
    let NodeKind::Mapping(entries) = &node.kind else {
        unreachable!()
    };
    for (i, entry) in entries.iter().enumerate() {
        if i > 0 {
            pad(out, indent);
        }
        scalar(out, &entry.key, ScalarStyle::Plain, indent, true);
        out.push(':');
        value(out, &entry.value, indent);
    }
}

fn sequence(out: &mut String, node: &Node, indent: usize) {
    let NodeKind::Sequence(items) = &node.kind else {
        unreachable!()
    };
    for (i, item) in items.iter().enumerate() {
        if i > 0 {
            pad(out, indent);
        }
        out.push('-');
        match &item.kind {
            NodeKind::Mapping(entries) if !entries.is_empty() => {
                out.push(' ');
                mapping(out, item, indent + 2);
            }
            NodeKind::Sequence(_) if !is_inline(item) => {
                out.push(' ');
                sequence(out, item, indent + 2);
            }
            _ => {
                out.push(' ');
                inline(out, item, indent);
                out.push('\n');
            }
        }
    }
}

/// Writes the value following `key:`.
fn value(out: &mut String, node: &Node, indent: usize) {
    if is_inline(node) {
        out.push(' ');
        inline(out, node, indent);
        out.push('\n');
        return;
    }
    out.push('\n');
    pad(out, indent + 2);
    match &node.kind {
        NodeKind::Mapping(_) => mapping(out, node, indent + 2),
        NodeKind::Sequence(_) => sequence(out, node, indent + 2),
        NodeKind::Scalar(..) => unreachable!(),
    }
}

fn inline(out: &mut String, node: &Node, indent: usize) {
    match &node.kind {
        NodeKind::Scalar(s, style) => scalar(out, s, *style, indent, false),
        NodeKind::Sequence(items) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                match &item.kind {
                    NodeKind::Scalar(s, _) if !plain_safe(s, true) => double_quoted(out, s),
                    _ => inline(out, item, indent),
                }
            }
            out.push(']');
        }
        NodeKind::Mapping(_) => out.push_str("{}"),
    }
}

fn scalar(out: &mut String, s: &str, style: ScalarStyle, indent: usize, key: bool) {
    if !key && s.contains('\n') {
        literal(out, s, indent);
    } else if matches!(style, ScalarStyle::Plain) && plain_safe(s, false) {
        out.push_str(s);
    } else if !key && matches!(style, ScalarStyle::Plain) && s.is_empty() {
        out.push_str("\"\"");
    } else {
        double_quoted(out, s);
    }
}

fn literal(out: &mut String, s: &str, indent: usize) {
    let body = s.trim_end_matches('\n');
    let trailing = s.len() - body.len();
    out.push('|');
    if body.starts_with(' ') {
        out.push('2');
    }
    match trailing {
        0 => out.push('-'),
        1 => {}
        _ => out.push('+'),
    }
    for line in s.split_terminator('\n') {
        out.push('\n');
        if !line.is_empty() {
            pad(out, indent + 2);
            out.push_str(line);
        }
    }
}

fn plain_safe(s: &str, in_flow: bool) -> bool {
    let Some(first) = s.chars().next() else {
        return false;
    };
    if s.starts_with(' ') || s.ends_with(' ') || s.ends_with(':') {
        return false;
    }
    if "?:,[]{}#&*!|>'\"%@`".contains(first) {
        return false;
    }
    if first == '-' && (s.len() == 1 || s.as_bytes()[1] == b' ') {
        return false;
    }
    if s == "~" || s == "null" || s.contains(": ") || s.contains(" #") {
        return false;
    }
    !s.chars().any(|c| c.is_control() || (in_flow && ",[]{}".contains(c)))
}

fn double_quoted(out: &mut String, s: &str) {
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            '\r' => out.push_str("\\r"),
            c if c.is_control() => {
                let _ = write!(out, "\\u{:04x}", c as u32);
            }
            c => out.push(c),
        }
    }
    out.push('"');
}

#[cfg(test)]
mod tests {
    use super::super::parse;
    use super::*;
    use alloc::string::ToString;
    use alloc::vec;
    use alloc::vec::Vec;

    /// Compares trees ignoring marks and scalar style.
    fn same(a: &Node, b: &Node) -> bool {
        match (&a.kind, &b.kind) {
            (NodeKind::Scalar(x, _), NodeKind::Scalar(y, _)) => x == y,
            (NodeKind::Sequence(x), NodeKind::Sequence(y)) => {
                x.len() == y.len() && x.iter().zip(y).all(|(a, b)| same(a, b))
            }
            (NodeKind::Mapping(x), NodeKind::Mapping(y)) => {
                x.len() == y.len() && x.iter().zip(y).all(|(a, b)| a.key == b.key && same(&a.value, &b.value))
            }
            _ => false,
        }
    }

    #[test]
    fn emits_documents_that_reparse() {
        let src = "Environment:\n  Name: x\n  Levels:\n    - |\n      ab\n      cd\nObjects:\n- Name: a\n  V: [-1, 0]\n  Empty: []\n  Q: \"a: b\"\n- Name: b\n";
        let doc = parse(src).unwrap();
        let text = emit(&doc);
        let again = parse(&text).unwrap();
        assert!(same(&doc, &again), "{text}");
    }

    #[test]
    fn literal_chomping_round_trips() {
        for s in ["ab\n", "ab", "ab\n\n", "  lead\nx\n"] {
            let doc = Node::mapping(vec![("k".to_string(), Node::plain(s))]);
            let text = emit(&doc);
            let again = parse(&text).unwrap();
            assert!(same(&doc, &again), "{s:?} -> {text}");
        }
    }

    #[test]
    fn awkward_scalars_are_quoted() {
        let items: Vec<Node> = ["", "- x", "#c", "a: b", "null", "[x]", "tab\there"]
            .iter()
            .map(|s| Node::plain(*s))
            .collect();
        let doc = Node::mapping(vec![("k".to_string(), Node::sequence(items))]);
        let again = parse(&emit(&doc)).unwrap();
        assert!(same(&doc, &again), "{}", emit(&doc));
    }
}
