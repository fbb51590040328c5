use std::fmt;

use super::ast::Span;
use crate::error::ParseError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TokenKind {
    Ident(String),
    Int(u128),

    // keywords
    Contract,
    Function,
    Payable,
    Uint,
    Address,
    Mapping,
    Require,
    If,
    Else,
    Delete,
    True,
    False,
    Null,
    Msg,
    This,
    Random,

    LBrace,
    RBrace,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Semi,
    Comma,
    Dot,
    Assign,
    PlusAssign,
    MinusAssign,
    EqEq,
    NotEq,
    Lt,
    Gt,
    Le,
    Ge,
    Plus,
    Minus,
    Star,
    Slash,
    Percent,
    AndAnd,
    OrOr,
    Bang,
    FatArrow,

    Eof,
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            TokenKind::Ident(name) => return write!(f, "identifier `{name}`"),
            TokenKind::Int(v) => return write!(f, "integer `{v}`"),
            TokenKind::Contract => "`contract`",
            TokenKind::Function => "`function`",
            TokenKind::Payable => "`payable`",
            TokenKind::Uint => "`uint`",
            TokenKind::Address => "`address`",
            TokenKind::Mapping => "`mapping`",
            TokenKind::Require => "`require`",
            TokenKind::If => "`if`",
            TokenKind::Else => "`else`",
            TokenKind::Delete => "`delete`",
            TokenKind::True => "`true`",
            TokenKind::False => "`false`",
            TokenKind::Null => "`null`",
            TokenKind::Msg => "`msg`",
            TokenKind::This => "`this`",
            TokenKind::Random => "`random`",
            TokenKind::LBrace => "`{`",
            TokenKind::RBrace => "`}`",
            TokenKind::LParen => "`(`",
            TokenKind::RParen => "`)`",
            TokenKind::LBracket => "`[`",
            TokenKind::RBracket => "`]`",
            TokenKind::Semi => "`;`",
            TokenKind::Comma => "`,`",
            TokenKind::Dot => "`.`",
            TokenKind::Assign => "`=`",
            TokenKind::PlusAssign => "`+=`",
            TokenKind::MinusAssign => "`-=`",
            TokenKind::EqEq => "`==`",
            TokenKind::NotEq => "`!=`",
            TokenKind::Lt => "`<`",
            TokenKind::Gt => "`>`",
            TokenKind::Le => "`<=`",
            TokenKind::Ge => "`>=`",
            TokenKind::Plus => "`+`",
            TokenKind::Minus => "`-`",
            TokenKind::Star => "`*`",
            TokenKind::Slash => "`/`",
            TokenKind::Percent => "`%`",
            TokenKind::AndAnd => "`&&`",
            TokenKind::OrOr => "`||`",
            TokenKind::Bang => "`!`",
            TokenKind::FatArrow => "`=>`",
            TokenKind::Eof => "end of input",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub span: Span,
}

fn keyword(word: &str) -> Option<TokenKind> {
    Some(match word {
        "contract" => TokenKind::Contract,
        "function" => TokenKind::Function,
        "payable" => TokenKind::Payable,
        "uint" => TokenKind::Uint,
        "address" => TokenKind::Address,
        "mapping" => TokenKind::Mapping,
        "require" => TokenKind::Require,
        "if" => TokenKind::If,
        "else" => TokenKind::Else,
        "delete" => TokenKind::Delete,
        "true" => TokenKind::True,
        "false" => TokenKind::False,
        "null" => TokenKind::Null,
        "msg" => TokenKind::Msg,
        "this" => TokenKind::This,
        "random" => TokenKind::Random,
        _ => return None,
    })
}

struct Cursor<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: u32,
    column: u32,
}

impl Cursor<'_> {
    fn peek(&mut self) -> Option<char> {
        self.chars.peek().copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn span(&self) -> Span {
        Span::new(self.line, self.column)
    }

    fn eat(&mut self, expected: char) -> bool {
        if self.peek() == Some(expected) {
            self.bump();
            true
        } else {
            false
        }
    }
}

/// Splits MiniSol source into tokens. The returned vector always ends with
/// an `Eof` token.
pub fn tokenize(source: &str) -> Result<Vec<Token>, ParseError> {
    let mut cur = Cursor {
        chars: source.chars().peekable(),
        line: 1,
        column: 1,
    };
    let mut tokens = Vec::new();

    loop {
        // skip whitespace and comments
        loop {
            match cur.peek() {
                Some(c) if c.is_whitespace() => {
                    cur.bump();
                }
                Some('/') => {
                    let mut ahead = cur.chars.clone();
                    ahead.next();
                    if ahead.peek() == Some(&'/') {
                        while let Some(c) = cur.peek() {
                            if c == '\n' {
                                break;
                            }
                            cur.bump();
                        }
                    } else {
                        break;
                    }
                }
                _ => break,
            }
        }

        let span = cur.span();
        let Some(c) = cur.bump() else {
            tokens.push(Token {
                kind: TokenKind::Eof,
                span,
            });
            return Ok(tokens);
        };

        let kind = match c {
            '{' => TokenKind::LBrace,
            '}' => TokenKind::RBrace,
            '(' => TokenKind::LParen,
            ')' => TokenKind::RParen,
            '[' => TokenKind::LBracket,
            ']' => TokenKind::RBracket,
            ';' => TokenKind::Semi,
            ',' => TokenKind::Comma,
            '.' => TokenKind::Dot,
            '*' => TokenKind::Star,
            '/' => TokenKind::Slash,
            '%' => TokenKind::Percent,
            '+' => {
                if cur.eat('=') {
                    TokenKind::PlusAssign
                } else {
                    TokenKind::Plus
                }
            }
            '-' => {
                if cur.eat('=') {
                    TokenKind::MinusAssign
                } else {
                    TokenKind::Minus
                }
            }
            '=' => {
                if cur.eat('=') {
                    TokenKind::EqEq
                } else if cur.eat('>') {
                    TokenKind::FatArrow
                } else {
                    TokenKind::Assign
                }
            }
            '!' => {
                if cur.eat('=') {
                    TokenKind::NotEq
                } else {
                    TokenKind::Bang
                }
            }
            '<' => {
                if cur.eat('=') {
                    TokenKind::Le
                } else {
                    TokenKind::Lt
                }
            }
            '>' => {
                if cur.eat('=') {
                    TokenKind::Ge
                } else {
                    TokenKind::Gt
                }
            }
            '&' => {
                if cur.eat('&') {
                    TokenKind::AndAnd
                } else {
                    return Err(ParseError::new(
                        span,
                        "unexpected character `&`, expected `&&`",
                    ));
                }
            }
            '|' => {
                if cur.eat('|') {
                    TokenKind::OrOr
                } else {
                    return Err(ParseError::new(
                        span,
                        "unexpected character `|`, expected `||`",
                    ));
                }
            }
            c if c.is_ascii_digit() => {
                let mut digits = String::from(c);
                while let Some(d) = cur.peek() {
                    if d.is_ascii_digit() {
                        digits.push(d);
                        cur.bump();
                    } else {
                        break;
                    }
                }
                if matches!(cur.peek(), Some(c) if c.is_ascii_alphabetic() || c == '_') {
                    return Err(ParseError::new(
                        cur.span(),
                        "invalid suffix on integer literal",
                    ));
                }
                let value = digits.parse::<u128>().map_err(|_| {
                    ParseError::new(span, "integer literal does not fit in 128 bits")
                })?;
                TokenKind::Int(value)
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut word = String::from(c);
                while let Some(d) = cur.peek() {
                    if d.is_ascii_alphanumeric() || d == '_' {
                        word.push(d);
                        cur.bump();
                    } else {
                        break;
                    }
                }
                keyword(&word).unwrap_or(TokenKind::Ident(word))
            }
            other => {
                return Err(ParseError::new(
                    span,
                    format!("unexpected character `{}`", other.escape_default()),
                ))
            }
        };
        tokens.push(Token { kind, span });
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(src: &str) -> Vec<TokenKind> {
        tokenize(src).unwrap().into_iter().map(|t| t.kind).collect()
    }

    #[test]
    fn operators_take_longest_match() {
        assert_eq!(
            kinds("a+=1 == => <= !"),
            vec![
                TokenKind::Ident("a".into()),
                TokenKind::PlusAssign,
                TokenKind::Int(1),
                TokenKind::EqEq,
                TokenKind::FatArrow,
                TokenKind::Le,
                TokenKind::Bang,
                TokenKind::Eof,
            ]
        );
    }

    #[test]
    fn comments_and_positions() {
        let toks = tokenize("// hi\n  uint x; // trailing\n").unwrap();
        assert_eq!(toks[0].kind, TokenKind::Uint);
        assert_eq!(toks[0].span, Span::new(2, 3));
        assert_eq!(toks[1].span, Span::new(2, 8));
        assert_eq!(toks.last().unwrap().kind, TokenKind::Eof);
    }

    #[test]
    fn rejects_stray_characters() {
        let err = tokenize("uint x = 1 # 2;").unwrap_err();
        assert_eq!((err.line, err.column), (1, 12));
        assert!(tokenize("a & b").is_err());
        assert!(tokenize("12abc").is_err());
    }

    #[test]
    fn integer_overflow_is_lexical_error() {
        assert!(tokenize("340282366920938463463374607431768211455").is_ok());
        assert!(tokenize("340282366920938463463374607431768211456").is_err());
    }
}
