//! The `.cg` text format.
//!
//! ```text
//! # visible edges out of X
//! graph mag {
//!   V1 -> X
//!   X -> V2
//!   X -> Y
//!   V2 -> Y
//! }
//! query { X = X; Y = Y; Z = }
//! ```
//!
//! Edge operators are `->`, `<->`, `o-o`, `o->`, `<-o`, and `--` (CPDAG only,
//! same as `o-o`). A bare name declares an isolated node. Whitespace and line
//! breaks are not significant, `#` starts a comment.

use crate::error::{Error, Result};
use crate::graph::{edge_operator, Graph, GraphClass, Mark, NodeSet};
use crate::Limits;

/// Words that cannot be used as node names.
pub const RESERVED: &[&str] = &["graph", "query", "dag", "cpdag", "mag", "pag", "o"];

const OPERATORS: &[&str] = &["<->", "<-o", "o->", "o-o", "->", "--"];

/// Node lists of an optional `query` block. A missing key is `None`; `Z =`
/// with no names is the empty set.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Query {
    pub x: Option<Vec<String>>,
    pub y: Option<Vec<String>>,
    pub z: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphDocument {
    pub graph: Graph,
    pub query: Option<Query>,
}

pub fn is_valid_name(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
        && !RESERVED.contains(&name)
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Op(&'static str),
    Punct(char),
    End,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn tokenize(text: &str) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("");
        let bytes = line.as_bytes();
        let mut i = 0;
        while i < bytes.len() {
            let c = bytes[i] as char;
            let (line, col) = (ln + 1, i + 1);
            if c.is_whitespace() {
                i += 1;
                continue;
            }
            if let Some(op) = OPERATORS.iter().find(|op| line_starts(bytes, i, op)) {
                out.push(Token {
                    tok: Tok::Op(op),
                    line,
                    col,
                });
                i += op.len();
            } else if c.is_ascii_alphanumeric() || c == '_' {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push(Token {
                    tok: Tok::Ident(line_str(bytes, start, i)),
                    line,
                    col,
                });
            } else if "{}=,;".contains(c) {
                out.push(Token {
                    tok: Tok::Punct(c),
                    line,
                    col,
                });
                i += 1;
            } else {
                return Err(Error::Syntax {
                    line,
                    col,
                    expected: "a name, an edge operator or one of `{ } = , ;`".into(),
                });
            }
        }
    }
    let (line, col) = text
        .lines()
        .enumerate()
        .last()
        .map(|(i, l)| (i + 1, l.len() + 1))
        .unwrap_or((1, 1));
    out.push(Token {
        tok: Tok::End,
        line,
        col,
    });
    Ok(out)
}

fn line_starts(bytes: &[u8], i: usize, op: &str) -> bool {
    bytes[i..].starts_with(op.as_bytes())
        // `o` operators must not swallow the tail of a name such as `Xo`
        && !(op.starts_with('o') && i > 0 && (bytes[i - 1].is_ascii_alphanumeric() || bytes[i - 1] == b'_'))
}

fn line_str(bytes: &[u8], start: usize, end: usize) -> String {
    String::from_utf8_lossy(&bytes[start..end]).into_owned()
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn next(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &str) -> Error {
        let t = self.peek();
        Error::Syntax {
            line: t.line,
            col: t.col,
            expected: expected.into(),
        }
    }

    fn punct(&mut self, c: char) -> Result<()> {
        if self.peek().tok == Tok::Punct(c) {
            self.next();
            Ok(())
        } else {
            Err(self.error(&format!("`{c}`")))
        }
    }

    fn keyword(&mut self, word: &str) -> Result<()> {
        match &self.peek().tok {
            Tok::Ident(s) if s == word => {
                self.next();
                Ok(())
            }
            _ => Err(self.error(&format!("`{word}`"))),
        }
    }

    fn name(&mut self) -> Result<String> {
        match &self.peek().tok {
            Tok::Ident(s) if is_valid_name(s) => {
                let s = s.clone();
                self.next();
                Ok(s)
            }
            Tok::Ident(s)
                if s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
                    && !RESERVED.contains(&s.as_str()) =>
            {
                Err(self.error("a node name starting with a letter or `_`"))
            }
            _ => Err(self.error("a node name")),
        }
    }

    fn name_list(&mut self) -> Result<Vec<String>> {
        let mut names = Vec::new();
        if !matches!(self.peek().tok, Tok::Ident(_)) {
            return Ok(names);
        }
        names.push(self.name()?);
        while self.peek().tok == Tok::Punct(',') {
            self.next();
            names.push(self.name()?);
        }
        Ok(names)
    }
}

fn marks_of(op: &str, class: GraphClass) -> Option<(Mark, Mark)> {
    use Mark::*;
    Some(match op {
        "->" => (Tail, Arrow),
        "<->" => (Arrow, Arrow),
        "o-o" => (Circle, Circle),
        "o->" => (Circle, Arrow),
        "<-o" => (Arrow, Circle),
        "--" if class == GraphClass::Cpdag => (Circle, Circle),
        _ => return None,
    })
}

pub fn parse_graph(text: &str) -> Result<GraphDocument> {
    parse_graph_with_limits(text, &Limits::default())
}

pub fn parse_graph_with_limits(text: &str, limits: &Limits) -> Result<GraphDocument> {
    let mut p = Parser {
        toks: tokenize(text)?,
        pos: 0,
    };
    p.keyword("graph")?;
    let class = match &p.peek().tok {
        Tok::Ident(s) => GraphClass::from_keyword(s),
        _ => None,
    }
    .ok_or_else(|| p.error("one of `dag`, `cpdag`, `mag`, `pag`"))?;
    p.next();
    p.punct('{')?;

    let mut names: Vec<String> = Vec::new();
    let mut declared: Vec<String> = Vec::new();
    let mut edges = Vec::new();
    let touch = |names: &mut Vec<String>, n: &str| match names.iter().position(|m| m == n) {
        Some(i) => i,
        None => {
            names.push(n.to_string());
            names.len() - 1
        }
    };
    loop {
        match p.peek().tok {
            Tok::Punct('}') => {
                p.next();
                break;
            }
            Tok::Punct(';') => {
                p.next();
                continue;
            }
            _ => {}
        }
        let a = p.name()?;
        if let Tok::Op(op) = p.peek().tok {
            let (ma, mb) = marks_of(op, class).ok_or_else(|| Error::MarkNotAllowedInClass {
                class: class.to_string(),
                edge: format!("{a} {op} ..."),
            })?;
            p.next();
            let b = p.name()?;
            let (ia, ib) = (touch(&mut names, &a), touch(&mut names, &b));
            edges.push(crate::graph::Edge::new(ia, ma, mb, ib));
        } else {
            if declared.contains(&a) {
                return Err(Error::DuplicateNode(a));
            }
            touch(&mut names, &a);
            declared.push(a);
        }
    }

    let query = if p.peek().tok == Tok::End {
        None
    } else {
        p.keyword("query")?;
        p.punct('{')?;
        let mut q = Query::default();
        loop {
            match &p.peek().tok {
                Tok::Punct('}') => {
                    p.next();
                    break;
                }
                Tok::Punct(';') => {
                    p.next();
                    continue;
                }
                Tok::Ident(k) if matches!(k.as_str(), "X" | "Y" | "Z") => {
                    let key = k.clone();
                    p.next();
                    p.punct('=')?;
                    let list = p.name_list()?;
                    let slot = match key.as_str() {
                        "X" => &mut q.x,
                        "Y" => &mut q.y,
                        _ => &mut q.z,
                    };
                    if slot.is_some() {
                        return Err(p.error("each of `X`, `Y`, `Z` at most once"));
                    }
                    *slot = Some(list);
                }
                _ => return Err(p.error("`X =`, `Y =`, `Z =` or `}`")),
            }
        }
        if p.peek().tok != Tok::End {
            return Err(p.error("end of input"));
        }
        Some(q)
    };

    let graph = Graph::build_with_limits(class, names, edges, limits)?;
    if let Some(q) = &query {
        for list in [&q.x, &q.y, &q.z].into_iter().flatten() {
            graph.node_set(list)?;
        }
    }
    Ok(GraphDocument { graph, query })
}

/// Nodes first in index order, then edges, so that parsing the output
/// reproduces the same graph.
pub fn serialize(doc: &GraphDocument) -> String {
    let g = &doc.graph;
    let mut out = format!("graph {} {{\n", g.class().keyword());
    for name in g.names() {
        out.push_str(&format!("  {name}\n"));
    }
    for e in g.edges() {
        let e = if (e.mark_a, e.mark_b) == (Mark::Arrow, Mark::Tail) {
            e.reversed()
        } else {
            e
        };
        out.push_str(&format!(
            "  {} {} {}\n",
            g.name(e.a),
            edge_operator(e.mark_a, e.mark_b),
            g.name(e.b)
        ));
    }
    out.push_str("}\n");
    if let Some(q) = &doc.query {
        let parts: Vec<String> = [("X", &q.x), ("Y", &q.y), ("Z", &q.z)]
            .into_iter()
            .filter_map(|(k, v)| v.as_ref().map(|v| format!("{k} = {}", v.join(", "))))
            .collect();
        out.push_str(&format!("query {{ {} }}\n", parts.join("; ")));
    }
    out
}

/// Parses a comma separated node list such as `Z,A`; empty input is the empty set.
pub fn parse_node_list(g: &Graph, list: &str) -> Result<NodeSet> {
    let names: Vec<&str> = list
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .collect();
    g.node_set(&names)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_edge() {
        let d = parse_graph("graph dag { X -> Y }").unwrap();
        assert_eq!(d.graph.class(), GraphClass::Dag);
        assert_eq!(d.graph.names(), ["X", "Y"]);
        assert!(d.graph.is_directed(0, 1));
        assert_eq!(d.query, None);
    }

    #[test]
    fn circles_rejected_in_mag() {
        assert!(matches!(
            parse_graph("graph mag { X o-> Y }"),
            Err(Error::MarkNotAllowedInClass { .. })
        ));
        assert!(matches!(
            parse_graph("graph pag { X -- Y }"),
            Err(Error::MarkNotAllowedInClass { .. })
        ));
    }

    #[test]
    fn dash_dash_is_cpdag_alias() {
        let a = parse_graph("graph cpdag { A -- B }").unwrap();
        let b = parse_graph("graph cpdag { A o-o B }").unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn duplicate_edge() {
        assert_eq!(
            parse_graph("graph dag { A -> B\n B -> A }").unwrap_err(),
            Error::DuplicateEdge("B".into(), "A".into())
        );
    }

    #[test]
    fn syntax_errors_have_positions() {
        assert_eq!(
            parse_graph("graph dag {\n  A => B\n}").unwrap_err(),
            Error::Syntax {
                line: 2,
                col: 6,
                expected: "a name, an edge operator or one of `{ } = , ;`".into()
            }
        );
        assert!(matches!(
            parse_graph("graph tree { A -> B }"),
            Err(Error::Syntax {
                line: 1,
                col: 7,
                ..
            })
        ));
        assert!(matches!(
            parse_graph("graph dag { A -> B"),
            Err(Error::Syntax { .. })
        ));
        assert!(matches!(
            parse_graph("graph dag { 1A -> B }"),
            Err(Error::Syntax { .. })
        ));
    }

    #[test]
    fn reserved_names() {
        assert!(matches!(
            parse_graph("graph dag { graph -> B }"),
            Err(Error::Syntax { .. })
        ));
        assert!(matches!(
            parse_graph("graph dag { o }"),
            Err(Error::Syntax { .. })
        ));
        assert!(!is_valid_name("pag"));
        assert!(is_valid_name("_x1"));
    }

    #[test]
    fn comments_and_isolated_nodes() {
        let d = parse_graph("# header\ngraph dag {\n  W  # alone\n  X -> Y # edge\n}\n").unwrap();
        assert_eq!(d.graph.names(), ["W", "X", "Y"]);
        assert_eq!(d.graph.edge_count(), 1);
    }

    #[test]
    fn query_block() {
        let d =
            parse_graph("graph dag { C -> X C -> Y X -> Y } query { X = X; Y = Y; Z = }").unwrap();
        let q = d.query.unwrap();
        assert_eq!(q.x, Some(vec!["X".to_string()]));
        assert_eq!(q.z, Some(vec![]));
        assert!(matches!(
            parse_graph("graph dag { X -> Y } query { X = Q }"),
            Err(Error::UnknownNode(_))
        ));
    }

    #[test]
    fn name_ending_in_o() {
        let d = parse_graph("graph pag { Xo o-> Yo }").unwrap();
        assert_eq!(d.graph.names(), ["Xo", "Yo"]);
    }

    #[test]
    fn round_trip() {
        let text = "graph pag { V1 o-> X V2 o-> X V3 <-> X V3 <-> V4 V4 -> Y X -> V4 V3 -> Y W }\nquery { X = X; Y = Y; Z = V1, V2 }";
        let d = parse_graph(text).unwrap();
        let s = serialize(&d);
        assert_eq!(parse_graph(&s).unwrap(), d);
        assert_eq!(serialize(&parse_graph(&s).unwrap()), s);
    }

    #[test]
    fn node_lists() {
        let d = parse_graph("graph dag { A -> B  C }").unwrap();
        assert_eq!(parse_node_list(&d.graph, "").unwrap(), NodeSet::EMPTY);
        assert_eq!(
            parse_node_list(&d.graph, "A, C").unwrap(),
            d.graph.node_set(&["A", "C"]).unwrap()
        );
    }
}
