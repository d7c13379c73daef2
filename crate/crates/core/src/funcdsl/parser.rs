use std::collections::BTreeMap;
use std::fmt;

/// Abstract syntax tree over the variable `t`.
#[derive(Clone, Debug, PartialEq)]
pub enum Node {
    Var,
    Num(f64),
    Add(Box<Node>, Box<Node>),
    Sub(Box<Node>, Box<Node>),
    Mul(Box<Node>, Box<Node>),
    Div(Box<Node>, Box<Node>),
    Pow(Box<Node>, Box<Node>),
    Log(Box<Node>),
    Exp(Box<Node>),
    Min(Box<Node>, Box<Node>),
    Max(Box<Node>, Box<Node>),
}

/// A parsed expression with all parameters resolved to finite reals.
#[derive(Clone, Debug, PartialEq)]
pub struct Expression {
    pub(crate) root: Node,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ParseError {
    /// Malformed input; `pos` is a byte offset into the source text.
    Syntax { pos: usize, msg: String },
    /// Identifier that is neither `t`, `e`, a function name, nor a bound parameter.
    UnknownIdentifier { pos: usize, name: String },
    /// Literals must be positive reals.
    NonPositiveLiteral { pos: usize },
    /// A parameter resolved to a non-finite value.
    NonFiniteParameter { name: String },
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseError::Syntax { pos, msg } => write!(f, "syntax error at offset {pos}: {msg}"),
            ParseError::UnknownIdentifier { pos, name } => {
                write!(f, "unknown identifier `{name}` at offset {pos}")
            }
            ParseError::NonPositiveLiteral { pos } => {
                write!(f, "literal at offset {pos} must be positive")
            }
            ParseError::NonFiniteParameter { name } => {
                write!(f, "parameter `{name}` is not a finite real")
            }
        }
    }
}

impl std::error::Error for ParseError {}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '+' => { out.push((Tok::Plus, i)); i += 1 }
            '-' => { out.push((Tok::Minus, i)); i += 1 }
            '*' => { out.push((Tok::Star, i)); i += 1 }
            '/' => { out.push((Tok::Slash, i)); i += 1 }
            '^' => { out.push((Tok::Caret, i)); i += 1 }
            '(' => { out.push((Tok::LParen, i)); i += 1 }
            ')' => { out.push((Tok::RParen, i)); i += 1 }
            ',' => { out.push((Tok::Comma, i)); i += 1 }
            '0'..='9' | '.' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
                }
                let s = &text[start..i];
                let v: f64 = s.parse().map_err(|_| ParseError::Syntax {
                    pos: start,
                    msg: format!("invalid number `{s}`"),
                })?;
                if v <= 0.0 {
                    return Err(ParseError::NonPositiveLiteral { pos: start });
                }
                out.push((Tok::Num(v), start));
            }
            'a'..='z' | 'A'..='Z' | '_' => {
                let start = i;
                while i < bytes.len()
                    && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                out.push((Tok::Ident(text[start..i].to_string()), start));
            }
            _ => {
                return Err(ParseError::Syntax { pos: i, msg: format!("unexpected character `{c}`") })
            }
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    params: &'a BTreeMap<String, f64>,
    text_len: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map(|(_, p)| *p).unwrap_or(self.text_len)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(t, _)| t.clone());
        self.pos += 1;
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<(), ParseError> {
        let pos = self.here();
        match self.bump() {
            Some(t) if t == want => Ok(()),
            _ => Err(ParseError::Syntax { pos, msg: format!("expected {what}") }),
        }
    }

    fn expr(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    lhs = Node::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Some(Tok::Minus) => {
                    self.bump();
                    lhs = Node::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.factor()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.bump();
                    lhs = Node::Mul(Box::new(lhs), Box::new(self.factor()?));
                }
                Some(Tok::Slash) => {
                    self.bump();
                    lhs = Node::Div(Box::new(lhs), Box::new(self.factor()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    // Right-associative power.
    fn factor(&mut self) -> Result<Node, ParseError> {
        let base = self.base()?;
        if let Some(Tok::Caret) = self.peek() {
            self.bump();
            let exponent = self.factor()?;
            return Ok(Node::Pow(Box::new(base), Box::new(exponent)));
        }
        Ok(base)
    }

    fn base(&mut self) -> Result<Node, ParseError> {
        let pos = self.here();
        match self.bump() {
            Some(Tok::Num(v)) => Ok(Node::Num(v)),
            Some(Tok::LParen) => {
                let inner = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            Some(Tok::Ident(name)) => self.ident(name, pos),
            _ => Err(ParseError::Syntax { pos, msg: "expected a value".into() }),
        }
    }

    fn ident(&mut self, name: String, pos: usize) -> Result<Node, ParseError> {
        let is_call = matches!(self.peek(), Some(Tok::LParen));
        match name.as_str() {
            "log" | "exp" if is_call => {
                self.bump();
                let arg = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(match name.as_str() {
                    "log" => Node::Log(Box::new(arg)),
                    _ => Node::Exp(Box::new(arg)),
                })
            }
            "min" | "max" if is_call => {
                self.bump();
                let a = self.expr()?;
                self.expect(Tok::Comma, "`,`")?;
                let b = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(match name.as_str() {
                    "min" => Node::Min(Box::new(a), Box::new(b)),
                    _ => Node::Max(Box::new(a), Box::new(b)),
                })
            }
            "t" => Ok(Node::Var),
            "e" => Ok(Node::Num(std::f64::consts::E)),
            _ => match self.params.get(&name) {
                Some(&v) if v.is_finite() => Ok(Node::Num(v)),
                Some(_) => Err(ParseError::NonFiniteParameter { name }),
                None => Err(ParseError::UnknownIdentifier { pos, name }),
            },
        }
    }
}

/// Parse `text` against a parameter map, resolving every named parameter to
/// its bound value.
pub fn parse_expression(
    text: &str,
    params: &BTreeMap<String, f64>,
) -> Result<Expression, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0, params, text_len: text.len() };
    let root = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(ParseError::Syntax { pos: p.here(), msg: "trailing input".into() });
    }
    Ok(Expression { root })
}

impl Expression {
    pub fn contains_var(&self) -> bool {
        fn walk(n: &Node) -> bool {
            match n {
                Node::Var => true,
                Node::Num(_) => false,
                Node::Add(a, b)
                | Node::Sub(a, b)
                | Node::Mul(a, b)
                | Node::Div(a, b)
                | Node::Pow(a, b)
                | Node::Min(a, b)
                | Node::Max(a, b) => walk(a) || walk(b),
                Node::Log(a) | Node::Exp(a) => walk(a),
            }
        }
        walk(&self.root)
    }
}

impl fmt::Display for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn p(n: &Node, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            match n {
                Node::Var => write!(f, "t"),
                Node::Num(v) => write!(f, "{v}"),
                Node::Add(a, b) => { write!(f, "(")?; p(a, f)?; write!(f, " + ")?; p(b, f)?; write!(f, ")") }
                Node::Sub(a, b) => { write!(f, "(")?; p(a, f)?; write!(f, " - ")?; p(b, f)?; write!(f, ")") }
                Node::Mul(a, b) => { write!(f, "(")?; p(a, f)?; write!(f, " * ")?; p(b, f)?; write!(f, ")") }
                Node::Div(a, b) => { write!(f, "(")?; p(a, f)?; write!(f, " / ")?; p(b, f)?; write!(f, ")") }
                Node::Pow(a, b) => { write!(f, "(")?; p(a, f)?; write!(f, " ^ ")?; p(b, f)?; write!(f, ")") }
                Node::Log(a) => { write!(f, "log(")?; p(a, f)?; write!(f, ")") }
                Node::Exp(a) => { write!(f, "exp(")?; p(a, f)?; write!(f, ")") }
                Node::Min(a, b) => { write!(f, "min(")?; p(a, f)?; write!(f, ", ")?; p(b, f)?; write!(f, ")") }
                Node::Max(a, b) => { write!(f, "max(")?; p(a, f)?; write!(f, ", ")?; p(b, f)?; write!(f, ")") }
            }
        }
        p(&self.root, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
        pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    #[test]
    fn parses_power_with_parameter() {
        let e = parse_expression("t^(p-1)", &params(&[("p", 3.0)])).unwrap();
        assert_eq!(e.eval(2.0), 4.0);
    }

    #[test]
    fn parses_identity() {
        let e = parse_expression("t", &params(&[])).unwrap();
        assert_eq!(e.eval(5.0), 5.0);
    }

    #[test]
    fn evaluates_guarded_log_power() {
        // independent route: plain f64 arithmetic
        let e = parse_expression("t^2 * log(2+t)^1.5", &params(&[])).unwrap();
        let want = 3.0_f64.ln().powf(1.5);
        assert!((e.eval(1.0) - want).abs() < 1e-12, "got {}", e.eval(1.0));
    }

    #[test]
    fn syntax_error_carries_position() {
        let err = parse_expression("t^(p-1", &params(&[("p", 2.0)])).unwrap_err();
        match err {
            ParseError::Syntax { pos, .. } => assert_eq!(pos, 6),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn unknown_identifier_rejected() {
        let err = parse_expression("t^q", &params(&[])).unwrap_err();
        assert!(matches!(err, ParseError::UnknownIdentifier { name, .. } if name == "q"));
    }

    #[test]
    fn zero_literal_rejected() {
        let err = parse_expression("t + 0", &params(&[])).unwrap_err();
        assert!(matches!(err, ParseError::NonPositiveLiteral { pos: 4 }));
    }

    #[test]
    fn min_max_two_args() {
        let e = parse_expression("min(t, 2) + max(t, 3)", &params(&[])).unwrap();
        assert_eq!(e.eval(2.5), 2.0 + 3.0);
        assert_eq!(e.eval(4.0), 2.0 + 4.0);
    }

    #[test]
    fn print_parse_round_trip_evaluates_identically() {
        let texts = [
            "t^(p-1) * log(2+t)^nu",
            "t^2 + t/3 - min(t, 5)",
            "exp(t/(1+t)) * max(t, 1)",
        ];
        let pm = params(&[("p", 2.5), ("nu", -1.5)]);
        for text in texts {
            let e = parse_expression(text, &pm).unwrap();
            let rt = parse_expression(&e.to_string(), &pm).unwrap();
            for ln_t in [-18.0, -4.0, 0.0, 1.0, 9.5, 18.0] {
                let t = ln_t.exp();
                let (a, b) = (e.eval(t), rt.eval(t));
                assert!(
                    (a - b).abs() <= 1e-12 * a.abs().max(1.0),
                    "round trip mismatch for `{text}` at t={t}: {a} vs {b}"
                );
            }
        }
    }
}
