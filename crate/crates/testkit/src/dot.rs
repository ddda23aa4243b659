//! A small DOT reader: tokenizes and checks statements against the DOT
//! grammar subset (graph, node, edge, attribute and subgraph statements).

#[derive(Debug, Clone, PartialEq)]
pub enum Token {
    Id(String),
    Quoted(String),
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Semi,
    Comma,
    Equals,
    Arrow,
}

pub fn tokenize(text: &str) -> Result<Vec<Token>, String> {
    let mut tokens = Vec::new();
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        match c {
            c if c.is_whitespace() => {
                chars.next();
            }
            '{' | '}' | '[' | ']' | ';' | ',' | '=' => {
                chars.next();
                tokens.push(match c {
                    '{' => Token::LBrace,
                    '}' => Token::RBrace,
                    '[' => Token::LBracket,
                    ']' => Token::RBracket,
                    ';' => Token::Semi,
                    ',' => Token::Comma,
                    _ => Token::Equals,
                });
            }
            '-' => {
                chars.next();
                match chars.next() {
                    Some('>') => tokens.push(Token::Arrow),
                    other => return Err(format!("expected '->', got '-{other:?}'")),
                }
            }
            '"' => {
                chars.next();
                let mut s = String::new();
                loop {
                    match chars.next() {
                        Some('\\') => match chars.next() {
                            Some(e) => {
                                s.push('\\');
                                s.push(e);
                            }
                            None => return Err("dangling escape".into()),
                        },
                        Some('"') => break,
                        Some(ch) => s.push(ch),
                        None => return Err("unterminated string".into()),
                    }
                }
                tokens.push(Token::Quoted(s));
            }
            c if c.is_ascii_alphanumeric() || c == '_' || c == '.' => {
                let mut s = String::new();
                while let Some(&ch) = chars.peek() {
                    if ch.is_ascii_alphanumeric() || ch == '_' || ch == '.' {
                        s.push(ch);
                        chars.next();
                    } else {
                        break;
                    }
                }
                if s.starts_with(|ch: char| ch.is_ascii_digit())
                    && !s.chars().all(|ch| ch.is_ascii_digit() || ch == '.')
                {
                    return Err(format!("identifier {s:?} starts with a digit"));
                }
                tokens.push(Token::Id(s));
            }
            other => return Err(format!("unexpected character {other:?}")),
        }
    }
    Ok(tokens)
}

/// Summary of a parsed graph.
#[derive(Debug, Default, PartialEq)]
pub struct DotSummary {
    pub nodes: Vec<String>,
    pub edges: Vec<(String, String)>,
    pub subgraphs: Vec<String>,
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    summary: DotSummary,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn expect(&mut self, want: Token) -> Result<(), String> {
        match self.next() {
            Some(t) if t == want => Ok(()),
            other => Err(format!("expected {want:?}, got {other:?} at {}", self.pos)),
        }
    }

    fn id(&mut self) -> Result<String, String> {
        match self.next() {
            Some(Token::Id(s)) | Some(Token::Quoted(s)) => Ok(s),
            other => Err(format!("expected id, got {other:?} at {}", self.pos)),
        }
    }

    fn attr_list(&mut self) -> Result<(), String> {
        while self.peek() == Some(&Token::LBracket) {
            self.next();
            while self.peek() != Some(&Token::RBracket) {
                self.id()?;
                self.expect(Token::Equals)?;
                self.id()?;
                if matches!(self.peek(), Some(Token::Comma) | Some(Token::Semi)) {
                    self.next();
                }
            }
            self.expect(Token::RBracket)?;
        }
        Ok(())
    }

    fn stmt_list(&mut self) -> Result<(), String> {
        while let Some(t) = self.peek() {
            if *t == Token::RBrace {
                return Ok(());
            }
            self.stmt()?;
            if self.peek() == Some(&Token::Semi) {
                self.next();
            }
        }
        Err("unexpected end of input".into())
    }

    fn stmt(&mut self) -> Result<(), String> {
        if let Some(Token::Id(kw)) = self.peek() {
            match kw.as_str() {
                "subgraph" => {
                    self.next();
                    let name = self.id()?;
                    self.summary.subgraphs.push(name);
                    self.expect(Token::LBrace)?;
                    self.stmt_list()?;
                    return self.expect(Token::RBrace);
                }
                "graph" | "node" | "edge" => {
                    self.next();
                    return self.attr_list();
                }
                _ => {}
            }
        }
        let first = self.id()?;
        match self.peek() {
            Some(Token::Equals) => {
                self.next();
                self.id()?;
            }
            Some(Token::Arrow) => {
                let mut from = first;
                while self.peek() == Some(&Token::Arrow) {
                    self.next();
                    let to = self.id()?;
                    self.summary.edges.push((from, to.clone()));
                    from = to;
                }
                self.attr_list()?;
            }
            _ => {
                self.summary.nodes.push(first);
                self.attr_list()?;
            }
        }
        Ok(())
    }
}

/// Parses `digraph name { ... }`.
pub fn parse(text: &str) -> Result<DotSummary, String> {
    let tokens = tokenize(text)?;
    let mut p = Parser { tokens, pos: 0, summary: DotSummary::default() };
    match p.next() {
        Some(Token::Id(kw)) if kw == "digraph" => {}
        other => return Err(format!("expected 'digraph', got {other:?}")),
    }
    if matches!(p.peek(), Some(Token::Id(_)) | Some(Token::Quoted(_))) {
        p.next();
    }
    p.expect(Token::LBrace)?;
    p.stmt_list()?;
    p.expect(Token::RBrace)?;
    if p.pos != p.tokens.len() {
        return Err("trailing tokens".into());
    }
    Ok(p.summary)
}
