use super::{Atom, Formula, FormulaError};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Word(String),
    Bracket(String),
    Once,
    Historically,
    Not,
    Next,
    Prev,
    LParen,
    RParen,
    Or,
    And,
    Implies,
    Dot,
    End,
}

struct Lexer {
    toks: Vec<(Tok, usize)>,
}

fn is_word_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

fn syntax(column: usize, message: impl Into<String>) -> FormulaError {
    FormulaError::Syntax {
        column,
        message: message.into(),
    }
}

impl Lexer {
    fn run(text: &str) -> Result<Lexer, FormulaError> {
        let chars: Vec<char> = text.chars().collect();
        let mut toks = Vec::new();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let col = i + 1;
            let ahead = |k: usize| chars.get(i + k).copied();
            if c.is_whitespace() {
                i += 1;
                continue;
            }
            let (tok, len) = match c {
                '(' if ahead(1) == Some(')') => (Tok::Next, 2),
                '(' if ahead(1) == Some('-') && ahead(2) == Some(')') => (Tok::Prev, 3),
                '(' => (Tok::LParen, 1),
                ')' => (Tok::RParen, 1),
                '|' => (Tok::Or, 1),
                '&' => (Tok::And, 1),
                '!' => (Tok::Not, 1),
                '.' => (Tok::Dot, 1),
                '-' if ahead(1) == Some('>') => (Tok::Implies, 2),
                '[' => {
                    let close = chars[i..]
                        .iter()
                        .position(|&c| c == ']')
                        .ok_or_else(|| syntax(col, "unclosed `[`"))?;
                    (
                        Tok::Bracket(chars[i + 1..i + close].iter().collect()),
                        close + 1,
                    )
                }
                c if is_word_char(c) => {
                    let len = chars[i..].iter().take_while(|&&c| is_word_char(c)).count();
                    let word: String = chars[i..i + len].iter().collect();
                    let past = (word == "F" || word == "G")
                        && ahead(len) == Some('-')
                        && ahead(len + 1) != Some('>');
                    match (past, word.as_str()) {
                        (true, "F") => (Tok::Once, 2),
                        (true, _) => (Tok::Historically, 2),
                        _ => (Tok::Word(word), len),
                    }
                }
                other => return Err(syntax(col, format!("unexpected character `{other}`"))),
            };
            toks.push((tok, col));
            i += len;
        }
        toks.push((Tok::End, chars.len() + 1));
        Ok(Lexer { toks })
    }
}

const KEYWORDS: [&str; 10] = ["mu", "nu", "rev", "A", "F", "G", "U", "W", "true", "false"];

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    /// Bound variables with the negation parity at their binder.
    scope: Vec<(String, bool)>,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn column(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if t != Tok::End {
            self.pos += 1;
        }
        t
    }

    fn is_word(&self, w: &str) -> bool {
        matches!(self.peek(), Tok::Word(x) if x == w)
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), FormulaError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(syntax(self.column(), format!("expected {what}")))
        }
    }

    fn implies(&mut self, neg: bool) -> Result<Formula, FormulaError> {
        let start = self.pos;
        let plain = self.or(neg);
        let monotone_failure = matches!(plain, Err(FormulaError::NonMonotone { .. }));
        if !(monotone_failure || (plain.is_ok() && *self.peek() == Tok::Implies)) {
            return plain;
        }
        // the left side of an implication sits under a negation
        let end = self.pos;
        self.pos = start;
        match self.or(!neg) {
            Ok(lhs) if *self.peek() == Tok::Implies => {
                self.bump();
                Ok(lhs.implies(self.implies(neg)?))
            }
            flipped => {
                self.pos = end;
                plain.and(flipped)
            }
        }
    }

    fn or(&mut self, neg: bool) -> Result<Formula, FormulaError> {
        let mut f = self.and(neg)?;
        while *self.peek() == Tok::Or {
            self.bump();
            f = f.or(self.and(neg)?);
        }
        Ok(f)
    }

    fn and(&mut self, neg: bool) -> Result<Formula, FormulaError> {
        let mut f = self.until(neg)?;
        while *self.peek() == Tok::And {
            self.bump();
            f = f.and(self.until(neg)?);
        }
        Ok(f)
    }

    fn until(&mut self, neg: bool) -> Result<Formula, FormulaError> {
        let lhs = self.unary(neg)?;
        if self.is_word("U") || self.is_word("W") {
            let strong = self.is_word("U");
            self.bump();
            let rhs = self.until(neg)?;
            return Ok(if strong {
                lhs.until(rhs)
            } else {
                lhs.weak_until(rhs)
            });
        }
        Ok(lhs)
    }

    fn unary(&mut self, neg: bool) -> Result<Formula, FormulaError> {
        let prefix: Option<fn(Formula) -> Formula> = match self.peek() {
            Tok::Next => Some(Formula::next),
            Tok::Prev => Some(Formula::prev),
            Tok::Once => Some(Formula::once),
            Tok::Historically => Some(Formula::historically),
            Tok::Word(w) => match w.as_str() {
                "rev" => Some(Formula::reverse),
                "A" => Some(Formula::all),
                "F" => Some(Formula::eventually),
                "G" => Some(Formula::always),
                _ => None,
            },
            _ => None,
        };
        if let Some(wrap) = prefix {
            self.bump();
            return Ok(wrap(self.unary(neg)?));
        }
        if *self.peek() == Tok::Not {
            self.bump();
            return Ok(self.unary(!neg)?.not());
        }
        if self.is_word("mu") || self.is_word("nu") {
            let least = self.is_word("mu");
            self.bump();
            let col = self.column();
            let var = match self.bump() {
                Tok::Word(v) if !KEYWORDS.contains(&v.as_str()) => v,
                _ => return Err(syntax(col, "expected a variable name")),
            };
            self.expect(Tok::Dot, "`.` after the bound variable")?;
            self.scope.push((var.clone(), neg));
            let body = self.implies(neg);
            self.scope.pop();
            let body = body?;
            return Ok(if least {
                Formula::mu(&var, body)
            } else {
                Formula::nu(&var, body)
            });
        }
        self.primary(neg)
    }

    fn primary(&mut self, neg: bool) -> Result<Formula, FormulaError> {
        let col = self.column();
        match self.bump() {
            Tok::LParen => {
                let f = self.implies(neg)?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(f)
            }
            Tok::Bracket(body) => parse_bracket(&body, col),
            Tok::Word(w) if w == "true" => Ok(Formula::True),
            Tok::Word(w) if w == "false" => Ok(Formula::False),
            Tok::Word(w) if KEYWORDS.contains(&w.as_str()) => {
                Err(syntax(col, format!("unexpected `{w}`")))
            }
            Tok::Word(w) => match self.scope.iter().rev().find(|(v, _)| *v == w) {
                Some((_, parity)) if *parity != neg => Err(FormulaError::NonMonotone {
                    var: w,
                    column: col,
                }),
                Some(_) => Ok(Formula::Var(w)),
                None => Ok(Formula::Sigma(Atom::Name(w))),
            },
            Tok::End => Err(syntax(col, "unexpected end of formula")),
            other => Err(syntax(col, format!("unexpected {}", describe(&other)))),
        }
    }
}

fn describe(t: &Tok) -> &'static str {
    match t {
        Tok::RParen => "`)`",
        Tok::Or => "`|`",
        Tok::And => "`&`",
        Tok::Implies => "`->`",
        Tok::Dot => "`.`",
        _ => "token",
    }
}

fn names(list: &str) -> Vec<String> {
    list.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(String::from)
        .collect()
}

/// `S:{a,b}` or `T:(a,b),(c,d)`.
fn parse_bracket(body: &str, col: usize) -> Result<Formula, FormulaError> {
    let (kind, rest) = body
        .split_once(':')
        .ok_or_else(|| syntax(col, "expected `[S:...]` or `[T:...]`"))?;
    let rest = rest.trim();
    match kind.trim() {
        "S" => {
            let inner = rest
                .strip_prefix('{')
                .and_then(|r| r.strip_suffix('}'))
                .ok_or_else(|| syntax(col, "expected `{...}` in a state literal"))?;
            Ok(Formula::Sigma(Atom::States(names(inner))))
        }
        "T" => {
            let mut edges = Vec::new();
            let mut rest = rest;
            while !rest.is_empty() {
                let open = rest
                    .strip_prefix('(')
                    .ok_or_else(|| syntax(col, "expected `(` in an edge list"))?;
                let (pair, tail) = open
                    .split_once(')')
                    .ok_or_else(|| syntax(col, "unclosed edge"))?;
                match names(pair).as_slice() {
                    [a, b] => edges.push((a.clone(), b.clone())),
                    _ => return Err(syntax(col, format!("edge `({pair})` needs two states"))),
                }
                rest = tail.trim_start().trim_start_matches(',').trim_start();
            }
            Ok(Formula::Pi(edges))
        }
        other => Err(syntax(col, format!("unknown literal kind `{other}`"))),
    }
}

/// Parses the concrete syntax; unbound names become state literals.
pub fn parse_formula(text: &str) -> Result<Formula, FormulaError> {
    let toks = Lexer::run(text)?.toks;
    let mut p = Parser {
        toks,
        pos: 0,
        scope: Vec::new(),
    };
    let f = p.implies(false)?;
    if *p.peek() != Tok::End {
        return Err(syntax(
            p.column(),
            format!("unexpected {}", describe(p.peek())),
        ));
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p() -> Formula {
        Formula::atom("p")
    }

    fn q() -> Formula {
        Formula::atom("q")
    }

    #[test]
    fn examples() {
        assert_eq!(
            parse_formula("G p | F G q").unwrap(),
            p().always().or(q().always().eventually())
        );
        assert_eq!(
            parse_formula("()(rev ()(rev p))").unwrap(),
            p().reverse().next().reverse().next()
        );
        assert_eq!(
            parse_formula("[S:{1,2}]").unwrap(),
            Formula::states(["1", "2"])
        );
        assert_eq!(
            parse_formula("[T:(1,2), (2,2)]").unwrap(),
            Formula::Pi(vec![("1".into(), "2".into()), ("2".into(), "2".into())])
        );
        assert_eq!(
            parse_formula("F- p & G-q").unwrap(),
            p().once().and(q().historically())
        );
        assert_eq!(
            parse_formula("p -> q -> p").unwrap(),
            p().implies(q().implies(p()))
        );
        assert_eq!(parse_formula("A (-)p").unwrap(), p().prev().all());
    }

    #[test]
    fn bound_names_are_variables() {
        let f = parse_formula("mu X. p | ()X").unwrap();
        assert_eq!(f, Formula::mu("X", p().or(Formula::Var("X".into()).next())));
        // free X is a literal
        assert_eq!(parse_formula("X").unwrap(), Formula::atom("X"));
    }

    #[test]
    fn monotonicity() {
        let err = parse_formula("mu X. !X").unwrap_err();
        assert_eq!(
            err,
            FormulaError::NonMonotone {
                var: "X".into(),
                column: 8
            }
        );
        assert!(parse_formula("mu X. !!X").is_ok());
        assert!(parse_formula("nu X. X -> p").is_err());
        assert!(parse_formula("nu X. p -> X").is_ok());
        assert!(parse_formula("mu X. !(nu Y. !X & Y)").is_ok());
        assert!(parse_formula("mu X. !(nu Y. X & Y)").is_err());
        // a negated binder is fine as long as the variable keeps its parity
        assert!(parse_formula("!(mu X. p | ()X)").is_ok());
    }

    #[test]
    fn syntax_errors_carry_columns() {
        let col = |t: &str| match parse_formula(t) {
            Err(FormulaError::Syntax { column, .. }) => column,
            other => panic!("{other:?}"),
        };
        assert_eq!(col("p |"), 4);
        assert_eq!(col("p q"), 3);
        assert_eq!(col("(p"), 3);
        assert_eq!(col("p $ q"), 3);
        assert_eq!(col("mu . p"), 4);
        assert_eq!(col("[S:1]"), 1);
        assert_eq!(col("G"), 2);
    }

    fn formula() -> impl Strategy<Value = Formula> {
        let leaf = prop_oneof![
            Just(p()),
            Just(q()),
            Just(Formula::True),
            Just(Formula::states(["1", "2"]))
        ];
        leaf.prop_recursive(4, 24, 2, |inner| {
            prop_oneof![
                inner.clone().prop_map(Formula::not),
                inner.clone().prop_map(Formula::next),
                inner.clone().prop_map(Formula::prev),
                inner.clone().prop_map(Formula::reverse),
                inner.clone().prop_map(Formula::eventually),
                inner.clone().prop_map(Formula::historically),
                inner.clone().prop_map(Formula::all),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| a.or(b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| a.and(b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| a.implies(b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| a.until(b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| a.weak_until(b)),
                inner.prop_map(|a| Formula::nu("Z", a.and(Formula::Var("Z".into()).next()))),
            ]
        })
    }

    proptest! {
        #[test]
        fn display_round_trips(f in formula()) {
            prop_assert_eq!(parse_formula(&f.to_string()).unwrap(), f);
        }
    }
}
