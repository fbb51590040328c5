//! Recursive-descent parser producing an unchecked, unnumbered AST.

use super::ast::*;
use super::lexer::{tokenize, Token, TokenKind};
use crate::error::ParseError;
use crate::value::{Address, Literal, ValueType};

type PResult<T> = Result<T, ParseError>;

pub fn parse_contract(source: &str) -> PResult<ContractModel> {
    let tokens = tokenize(source)?;
    let mut p = Parser { tokens, pos: 0 };
    let model = p.contract()?;
    p.expect(TokenKind::Eof)?;
    Ok(model)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &TokenKind {
        &self.tokens[self.pos].kind
    }

    fn peek_at(&self, offset: usize) -> &TokenKind {
        let idx = (self.pos + offset).min(self.tokens.len() - 1);
        &self.tokens[idx].kind
    }

    fn span(&self) -> Span {
        self.tokens[self.pos].span
    }

    fn advance(&mut self) -> Token {
        let tok = self.tokens[self.pos].clone();
        if tok.kind != TokenKind::Eof {
            self.pos += 1;
        }
        tok
    }

    fn check(&self, kind: &TokenKind) -> bool {
        self.peek() == kind
    }

    fn eat(&mut self, kind: &TokenKind) -> bool {
        if self.check(kind) {
            self.advance();
            true
        } else {
            false
        }
    }

    fn unexpected<T>(&self, what: &str) -> PResult<T> {
        Err(ParseError::new(
            self.span(),
            format!("expected {what}, found {}", self.peek()),
        ))
    }

    fn expect(&mut self, kind: TokenKind) -> PResult<Span> {
        if self.check(&kind) {
            Ok(self.advance().span)
        } else {
            self.unexpected(&kind.to_string())
        }
    }

    fn ident(&mut self) -> PResult<(String, Span)> {
        match self.peek().clone() {
            TokenKind::Ident(name) => {
                let span = self.advance().span;
                Ok((name, span))
            }
            _ => self.unexpected("identifier"),
        }
    }

    /// Consumes `expected` if it is the identifier at the cursor.
    fn member(&mut self, expected: &[&str]) -> PResult<(String, Span)> {
        match self.peek().clone() {
            TokenKind::Ident(name) if expected.contains(&name.as_str()) => {
                let span = self.advance().span;
                Ok((name, span))
            }
            _ => {
                let list = expected
                    .iter()
                    .map(|m| format!("`{m}`"))
                    .collect::<Vec<_>>()
                    .join(" or ");
                self.unexpected(&list)
            }
        }
    }

    fn int(&mut self) -> PResult<u128> {
        match self.peek() {
            TokenKind::Int(v) => {
                let v = *v;
                self.advance();
                Ok(v)
            }
            _ => self.unexpected("integer literal"),
        }
    }

    fn contract(&mut self) -> PResult<ContractModel> {
        let span = self.expect(TokenKind::Contract)?;
        let (name, _) = self.ident()?;
        self.expect(TokenKind::LBrace)?;

        let mut state_vars = Vec::new();
        let mut functions = Vec::new();
        loop {
            match self.peek() {
                TokenKind::RBrace => {
                    self.advance();
                    break;
                }
                TokenKind::Function => functions.push(self.function()?),
                TokenKind::Uint | TokenKind::Address | TokenKind::Mapping => {
                    state_vars.push(self.state_var()?)
                }
                _ => return self.unexpected("state variable, function or `}`"),
            }
        }

        Ok(ContractModel {
            name,
            state_vars,
            functions,
            branch_sites: Vec::new(),
            span,
        })
    }

    fn state_var(&mut self) -> PResult<StateVarDecl> {
        let span = self.span();
        let var_type = match self.advance().kind {
            TokenKind::Uint => VarType::Uint,
            TokenKind::Address => {
                if self.eat(&TokenKind::LBracket) {
                    self.expect(TokenKind::RBracket)?;
                    VarType::AddressArray
                } else {
                    VarType::Address
                }
            }
            TokenKind::Mapping => {
                self.expect(TokenKind::LParen)?;
                self.expect(TokenKind::Address)?;
                self.expect(TokenKind::FatArrow)?;
                self.expect(TokenKind::Uint)?;
                self.expect(TokenKind::RParen)?;
                VarType::Mapping
            }
            _ => unreachable!("caller checked the type keyword"),
        };
        let (name, _) = self.ident()?;
        let initializer = if self.eat(&TokenKind::Assign) {
            Some(self.literal()?)
        } else {
            None
        };
        self.expect(TokenKind::Semi)?;
        Ok(StateVarDecl {
            name,
            var_type,
            initializer,
            implicit: false,
            span,
        })
    }

    fn literal(&mut self) -> PResult<Literal> {
        match self.peek() {
            TokenKind::Int(_) => Ok(Literal::Uint(self.int()?)),
            TokenKind::Null => {
                self.advance();
                Ok(Literal::Address(Address::Null))
            }
            TokenKind::Address => Ok(Literal::Address(self.address_literal()?)),
            _ => self.unexpected("literal"),
        }
    }

    fn address_literal(&mut self) -> PResult<Address> {
        self.expect(TokenKind::Address)?;
        self.expect(TokenKind::LParen)?;
        let span = self.span();
        let index = self.int()?;
        self.expect(TokenKind::RParen)?;
        let index = u32::try_from(index)
            .map_err(|_| ParseError::new(span, "address index does not fit in 32 bits"))?;
        Ok(Address::Index(index))
    }

    fn function(&mut self) -> PResult<FunctionDecl> {
        let span = self.expect(TokenKind::Function)?;
        let (name, _) = self.ident()?;
        self.expect(TokenKind::LParen)?;
        let mut params = Vec::new();
        if !self.check(&TokenKind::RParen) {
            loop {
                let pspan = self.span();
                let ty = match self.peek() {
                    TokenKind::Uint => ValueType::Uint,
                    TokenKind::Address => ValueType::Address,
                    _ => return self.unexpected("parameter type `uint` or `address`"),
                };
                self.advance();
                let (pname, _) = self.ident()?;
                params.push(Param {
                    name: pname,
                    ty,
                    span: pspan,
                });
                if !self.eat(&TokenKind::Comma) {
                    break;
                }
            }
        }
        self.expect(TokenKind::RParen)?;
        let payable = self.eat(&TokenKind::Payable);
        let body = self.block()?;
        Ok(FunctionDecl {
            name,
            params,
            payable,
            body,
            entry_site: None,
            span,
        })
    }

    fn block(&mut self) -> PResult<Vec<Stmt>> {
        self.expect(TokenKind::LBrace)?;
        let mut stmts = Vec::new();
        while !self.eat(&TokenKind::RBrace) {
            if self.check(&TokenKind::Eof) {
                return self.unexpected("`}`");
            }
            stmts.push(self.stmt()?);
        }
        Ok(stmts)
    }

    fn stmt(&mut self) -> PResult<Stmt> {
        let span = self.span();
        let kind = match self.peek() {
            TokenKind::Require => {
                self.advance();
                self.expect(TokenKind::LParen)?;
                let cond = self.expr()?;
                self.expect(TokenKind::RParen)?;
                self.expect(TokenKind::Semi)?;
                StmtKind::Require { cond, sites: None }
            }
            TokenKind::If => return self.if_stmt(),
            TokenKind::Delete => {
                self.advance();
                let (var, _) = self.ident()?;
                self.expect(TokenKind::Semi)?;
                StmtKind::Delete { var }
            }
            _ => self.simple_stmt()?,
        };
        Ok(Stmt { kind, span })
    }

    fn if_stmt(&mut self) -> PResult<Stmt> {
        let span = self.expect(TokenKind::If)?;
        self.expect(TokenKind::LParen)?;
        let cond = self.expr()?;
        self.expect(TokenKind::RParen)?;
        let then_body = self.block()?;
        let else_body = if self.eat(&TokenKind::Else) {
            if self.check(&TokenKind::If) {
                Some(vec![self.if_stmt()?])
            } else {
                Some(self.block()?)
            }
        } else {
            None
        };
        Ok(Stmt {
            kind: StmtKind::If {
                cond,
                then_body,
                else_body,
                sites: None,
            },
            span,
        })
    }

    /// Assignment, transfer, push or a bare `random(..)` call.
    fn simple_stmt(&mut self) -> PResult<StmtKind> {
        let target = self.expr()?;
        let kind = match self.peek() {
            TokenKind::Assign | TokenKind::PlusAssign | TokenKind::MinusAssign => {
                let op = match self.advance().kind {
                    TokenKind::Assign => AssignOp::Set,
                    TokenKind::PlusAssign => AssignOp::Add,
                    _ => AssignOp::Sub,
                };
                let target =
                    match target.kind {
                        ExprKind::Var(name) => LValue::Var(name),
                        ExprKind::Index { base, index } => LValue::Index {
                            base,
                            index: *index,
                        },
                        _ => return Err(ParseError::new(
                            target.span,
                            "left-hand side of assignment must be a variable or an indexed element",
                        )),
                    };
                let value = self.expr()?;
                StmtKind::Assign { target, op, value }
            }
            TokenKind::Dot => {
                self.advance();
                let (method, _) = self.member(&["transfer", "push"])?;
                self.expect(TokenKind::LParen)?;
                let arg = self.expr()?;
                self.expect(TokenKind::RParen)?;
                if method == "transfer" {
                    StmtKind::Transfer {
                        to: target,
                        amount: arg,
                    }
                } else {
                    match target.kind {
                        ExprKind::Var(array) => StmtKind::Push { array, value: arg },
                        _ => {
                            return Err(ParseError::new(
                                target.span,
                                "`push` must be called on a state array",
                            ))
                        }
                    }
                }
            }
            TokenKind::Semi => match target.kind {
                ExprKind::Random(bound) => StmtKind::Random { bound: *bound },
                _ => {
                    return Err(ParseError::new(
                        target.span,
                        "expression statement has no effect",
                    ))
                }
            },
            _ => return self.unexpected("`=`, `+=`, `-=`, `.` or `;`"),
        };
        self.expect(TokenKind::Semi)?;
        Ok(kind)
    }

    fn expr(&mut self) -> PResult<Expr> {
        self.binary(1)
    }

    fn binop(&self) -> Option<BinOp> {
        Some(match self.peek() {
            TokenKind::OrOr => BinOp::Or,
            TokenKind::AndAnd => BinOp::And,
            TokenKind::EqEq => BinOp::Eq,
            TokenKind::NotEq => BinOp::Ne,
            TokenKind::Lt => BinOp::Lt,
            TokenKind::Gt => BinOp::Gt,
            TokenKind::Le => BinOp::Le,
            TokenKind::Ge => BinOp::Ge,
            TokenKind::Plus => BinOp::Add,
            TokenKind::Minus => BinOp::Sub,
            TokenKind::Star => BinOp::Mul,
            TokenKind::Slash => BinOp::Div,
            TokenKind::Percent => BinOp::Rem,
            _ => return None,
        })
    }

    /// Precedence climbing. Comparison operators are non-associative.
    fn binary(&mut self, min_prec: u8) -> PResult<Expr> {
        let mut lhs = self.unary()?;
        let mut last_comparison = false;
        while let Some(op) = self.binop() {
            let prec = op.precedence();
            if prec < min_prec {
                break;
            }
            if prec == 3 && last_comparison {
                return Err(ParseError::new(
                    self.span(),
                    "comparison operators cannot be chained",
                ));
            }
            self.advance();
            let rhs = self.binary(prec + 1)?;
            last_comparison = prec == 3;
            lhs = Expr {
                span: lhs.span,
                kind: ExprKind::Binary {
                    op,
                    lhs: Box::new(lhs),
                    rhs: Box::new(rhs),
                },
            };
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> PResult<Expr> {
        if self.check(&TokenKind::Bang) {
            let span = self.advance().span;
            let inner = self.unary()?;
            return Ok(Expr {
                kind: ExprKind::Not(Box::new(inner)),
                span,
            });
        }
        self.primary()
    }

    fn primary(&mut self) -> PResult<Expr> {
        let span = self.span();
        let kind = match self.peek().clone() {
            TokenKind::Int(v) => {
                self.advance();
                ExprKind::Literal(Literal::Uint(v))
            }
            TokenKind::True => {
                self.advance();
                ExprKind::Bool(true)
            }
            TokenKind::False => {
                self.advance();
                ExprKind::Bool(false)
            }
            TokenKind::Null => {
                self.advance();
                ExprKind::Literal(Literal::Address(Address::Null))
            }
            TokenKind::Address => ExprKind::Literal(Literal::Address(self.address_literal()?)),
            TokenKind::Msg => {
                self.advance();
                self.expect(TokenKind::Dot)?;
                let (m, _) = self.member(&["sender", "value"])?;
                if m == "sender" {
                    ExprKind::MsgSender
                } else {
                    ExprKind::MsgValue
                }
            }
            TokenKind::This => {
                self.advance();
                self.expect(TokenKind::Dot)?;
                self.member(&["balance"])?;
                ExprKind::ThisBalance
            }
            TokenKind::Random => {
                self.advance();
                self.expect(TokenKind::LParen)?;
                let bound = self.expr()?;
                self.expect(TokenKind::RParen)?;
                ExprKind::Random(Box::new(bound))
            }
            TokenKind::LParen => {
                self.advance();
                let inner = self.expr()?;
                self.expect(TokenKind::RParen)?;
                return Ok(inner);
            }
            TokenKind::Ident(name) => {
                self.advance();
                if self.check(&TokenKind::Dot)
                    && matches!(self.peek_at(1), TokenKind::Ident(m) if m == "length")
                {
                    self.advance();
                    self.advance();
                    ExprKind::Length(name)
                } else if self.eat(&TokenKind::LBracket) {
                    let index = self.expr()?;
                    self.expect(TokenKind::RBracket)?;
                    ExprKind::Index {
                        base: name,
                        index: Box::new(index),
                    }
                } else {
                    ExprKind::Var(name)
                }
            }
            _ => return self.unexpected("expression"),
        };
        Ok(Expr { kind, span })
    }
}
