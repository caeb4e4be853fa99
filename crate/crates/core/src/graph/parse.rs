//! Graph DSL and edge-list reader.
//!
//! DSL: `K<n>` complete, `P<n>` path, `C<n>` cycle, `S<n>` star centered at 0,
//! `Kb<m>,<n>` complete bipartite (more comma-separated parts give a complete
//! multipartite graph), `D<n>` discrete, `<n>:<u>-<v>,...` an explicit edge
//! list on `n` vertices, and `cone^<l>(<expr>)` (or `cone(<expr>)`) for
//! iterated cones whose new vertices take the highest labels in order.

use super::{Graph, GraphError};

pub fn parse_graph(spec: &str) -> Result<Graph, GraphError> {
    let mut p = Parser { src: spec, pos: 0 };
    let g = p.expr()?;
    p.skip_ws();
    if p.pos != spec.len() {
        return Err(p.error("trailing input"));
    }
    Ok(g)
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn error(&self, reason: &str) -> GraphError {
        GraphError::Parse {
            spec: self.src.to_string(),
            reason: format!("{reason} at offset {}", self.pos),
        }
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.src.len() - trimmed.len();
    }

    fn eat(&mut self, token: &str) -> bool {
        self.skip_ws();
        if self.rest().starts_with(token) {
            self.pos += token.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, token: &str) -> Result<(), GraphError> {
        if self.eat(token) {
            Ok(())
        } else {
            Err(self.error(&format!("expected {token:?}")))
        }
    }

    fn number(&mut self) -> Result<usize, GraphError> {
        self.skip_ws();
        let digits = self.rest().bytes().take_while(u8::is_ascii_digit).count();
        if digits == 0 {
            return Err(self.error("expected a number"));
        }
        let text = &self.rest()[..digits];
        self.pos += digits;
        text.parse().map_err(|_| self.error("number too large"))
    }

    fn expr(&mut self) -> Result<Graph, GraphError> {
        let wrap = |r: Result<Graph, GraphError>, p: &Self| {
            r.map_err(|e| match e {
                GraphError::Parse { reason, .. } => GraphError::Parse {
                    spec: p.src.to_string(),
                    reason,
                },
                other => other,
            })
        };
        if self.eat("cone") {
            let times = if self.eat("^") { self.number()? } else { 1 };
            self.expect("(")?;
            let inner = self.expr()?;
            self.expect(")")?;
            return inner.iterated_cone(times);
        }
        if self.eat("Kb") {
            let mut parts = vec![self.number()?];
            while self.eat(",") {
                parts.push(self.number()?);
            }
            if parts.len() < 2 {
                return Err(self.error("Kb needs at least two part sizes"));
            }
            return Graph::complete_multipartite(&parts);
        }
        self.skip_ws();
        if self.rest().starts_with(|c: char| c.is_ascii_digit()) {
            return self.edge_list();
        }
        let Some(family) = self.rest().chars().next() else {
            return Err(self.error("empty graph spec"));
        };
        if !"KPCSD".contains(family) {
            return Err(self.error(&format!("unknown graph family {family:?}")));
        }
        self.pos += family.len_utf8();
        let n = self.number()?;
        let g = match family {
            'K' => Graph::complete(n),
            'P' => Graph::path(n),
            'C' => Graph::cycle(n),
            'S' => Graph::star(n),
            'D' => Graph::discrete(n),
            _ => unreachable!("family checked above"),
        };
        wrap(g, self)
    }

    fn edge_list(&mut self) -> Result<Graph, GraphError> {
        let n = self.number()?;
        self.expect(":")?;
        let mut g = Graph::new(n)?;
        self.skip_ws();
        if !self.rest().starts_with(|c: char| c.is_ascii_digit()) {
            return Ok(g);
        }
        loop {
            let u = self.number()?;
            self.expect("-")?;
            let v = self.number()?;
            g.add_edge(u, v)?;
            if !self.eat(",") {
                return Ok(g);
            }
        }
    }
}

/// Reads an edge list: the first non-comment line is the vertex count, then one
/// `u v` pair per line. `#` starts a comment. Repeated edges are ignored.
pub fn parse_edge_list(text: &str) -> Result<Graph, GraphError> {
    let err = |line: usize, reason: &str| GraphError::Parse {
        spec: "<edge list>".into(),
        reason: format!("line {line}: {reason}"),
    };
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    let (first, header) = lines.next().ok_or_else(|| err(1, "missing vertex count"))?;
    let n: usize = header
        .parse()
        .map_err(|_| err(first, "vertex count must be a non-negative integer"))?;
    let mut g = Graph::new(n)?;
    for (line, content) in lines {
        let fields: Vec<&str> = content.split_whitespace().collect();
        if fields.len() != 2 {
            return Err(err(line, "expected two vertex indices"));
        }
        let u: usize = fields[0]
            .parse()
            .map_err(|_| err(line, "bad vertex index"))?;
        let v: usize = fields[1]
            .parse()
            .map_err(|_| err(line, "bad vertex index"))?;
        g.add_edge(u, v)?;
    }
    Ok(g)
}
