//! Name resolution and type checking.

use std::collections::{HashMap, HashSet};
use std::fmt;

use super::ast::*;
use crate::error::ParseError;
use crate::value::{Literal, ValueType};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Ty {
    Uint,
    Address,
    Bool,
}

impl From<ValueType> for Ty {
    fn from(t: ValueType) -> Self {
        match t {
            ValueType::Uint => Ty::Uint,
            ValueType::Address => Ty::Address,
        }
    }
}

impl fmt::Display for Ty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Ty::Uint => "uint",
            Ty::Address => "address",
            Ty::Bool => "bool",
        })
    }
}

/// Checks every static rule of the language. Expects the implicit owner
/// variable to be declared already.
pub fn check_contract(model: &ContractModel) -> Result<(), ParseError> {
    let mut globals: HashMap<&str, VarType> = HashMap::new();
    for var in &model.state_vars {
        if globals.insert(&var.name, var.var_type).is_some() {
            let what = if var.name == OWNER_VAR {
                "`owner` is declared implicitly and cannot be redeclared".to_string()
            } else {
                format!("duplicate state variable `{}`", var.name)
            };
            return Err(ParseError::new(var.span, what));
        }
        if let Some(init) = &var.initializer {
            match var.var_type.value_type() {
                None => {
                    return Err(ParseError::new(
                        var.span,
                        format!(
                            "`{}` of type {} cannot have an initializer",
                            var.name, var.var_type
                        ),
                    ))
                }
                Some(ty) if ty != init.value_type() => {
                    return Err(ParseError::new(
                        var.span,
                        format!(
                            "initializer of `{}` has type {}, expected {}",
                            var.name,
                            init.value_type(),
                            ty
                        ),
                    ))
                }
                Some(_) => {}
            }
        }
    }

    let mut seen = HashSet::new();
    for func in &model.functions {
        if !seen.insert(func.name.as_str()) {
            return Err(ParseError::new(
                func.span,
                format!("duplicate function `{}`", func.name),
            ));
        }
        let mut locals = HashMap::new();
        for p in &func.params {
            if globals.contains_key(p.name.as_str()) {
                return Err(ParseError::new(
                    p.span,
                    format!("parameter `{}` shadows a state variable", p.name),
                ));
            }
            if locals.insert(p.name.as_str(), p.ty).is_some() {
                return Err(ParseError::new(
                    p.span,
                    format!("duplicate parameter `{}`", p.name),
                ));
            }
        }
        let scope = Scope {
            globals: &globals,
            locals,
        };
        scope.block(&func.body)?;
    }
    Ok(())
}

struct Scope<'a> {
    globals: &'a HashMap<&'a str, VarType>,
    locals: HashMap<&'a str, ValueType>,
}

fn mismatch(span: Span, context: &str, found: Ty, expected: Ty) -> ParseError {
    ParseError::new(
        span,
        format!("type mismatch in {context}: expected {expected}, found {found}"),
    )
}

impl Scope<'_> {
    fn global(&self, name: &str, span: Span) -> Result<VarType, ParseError> {
        match self.globals.get(name) {
            Some(t) => Ok(*t),
            None if self.locals.contains_key(name) => Err(ParseError::new(
                span,
                format!("parameter `{name}` is read-only"),
            )),
            None => Err(ParseError::new(
                span,
                format!("unknown identifier `{name}`"),
            )),
        }
    }

    fn block(&self, stmts: &[Stmt]) -> Result<(), ParseError> {
        stmts.iter().try_for_each(|s| self.stmt(s))
    }

    fn expect(&self, expr: &Expr, want: Ty, context: &str) -> Result<(), ParseError> {
        let got = self.expr(expr)?;
        if got == want {
            Ok(())
        } else {
            Err(mismatch(expr.span, context, got, want))
        }
    }

    fn stmt(&self, stmt: &Stmt) -> Result<(), ParseError> {
        match &stmt.kind {
            StmtKind::Require { cond, .. } => self.expect(cond, Ty::Bool, "`require` condition"),
            StmtKind::If {
                cond,
                then_body,
                else_body,
                ..
            } => {
                self.expect(cond, Ty::Bool, "`if` condition")?;
                self.block(then_body)?;
                if let Some(els) = else_body {
                    self.block(els)?;
                }
                Ok(())
            }
            StmtKind::Assign { target, op, value } => {
                let target_ty = match target {
                    LValue::Var(name) => match self.global(name, stmt.span)? {
                        VarType::Uint => Ty::Uint,
                        VarType::Address => Ty::Address,
                        other => {
                            return Err(ParseError::new(
                                stmt.span,
                                format!("cannot assign to `{name}` of type {other}"),
                            ))
                        }
                    },
                    LValue::Index { base, index } => self.index(base, index, stmt.span)?,
                };
                if *op != AssignOp::Set && target_ty != Ty::Uint {
                    return Err(ParseError::new(
                        stmt.span,
                        format!("compound assignment needs a uint target, found {target_ty}"),
                    ));
                }
                self.expect(value, target_ty, "assignment")
            }
            StmtKind::Transfer { to, amount } => {
                self.expect(to, Ty::Address, "`transfer` receiver")?;
                self.expect(amount, Ty::Uint, "`transfer` amount")
            }
            StmtKind::Push { array, value } => {
                match self.global(array, stmt.span)? {
                    VarType::AddressArray => {}
                    other => {
                        return Err(ParseError::new(
                            stmt.span,
                            format!("`push` needs an address[] but `{array}` is {other}"),
                        ))
                    }
                }
                self.expect(value, Ty::Address, "`push` argument")
            }
            StmtKind::Delete { var } => self.global(var, stmt.span).map(|_| ()),
            StmtKind::Random { bound } => self.expect(bound, Ty::Uint, "`random` bound"),
        }
    }

    /// Type of `base[index]`, checking the index type.
    fn index(&self, base: &str, index: &Expr, span: Span) -> Result<Ty, ParseError> {
        match self.global(base, span)? {
            VarType::Mapping => {
                self.expect(index, Ty::Address, "mapping key")?;
                Ok(Ty::Uint)
            }
            VarType::AddressArray => {
                self.expect(index, Ty::Uint, "array index")?;
                Ok(Ty::Address)
            }
            other => Err(ParseError::new(
                span,
                format!("cannot index `{base}` of type {other}"),
            )),
        }
    }

    fn expr(&self, expr: &Expr) -> Result<Ty, ParseError> {
        Ok(match &expr.kind {
            ExprKind::Literal(Literal::Uint(_)) => Ty::Uint,
            ExprKind::Literal(Literal::Address(_)) => Ty::Address,
            ExprKind::Bool(_) => Ty::Bool,
            ExprKind::MsgSender => Ty::Address,
            ExprKind::MsgValue | ExprKind::ThisBalance => Ty::Uint,
            ExprKind::Var(name) => {
                if let Some(t) = self.locals.get(name.as_str()) {
                    Ty::from(*t)
                } else {
                    match self.globals.get(name.as_str()) {
                        Some(VarType::Uint) => Ty::Uint,
                        Some(VarType::Address) => Ty::Address,
                        Some(other) => {
                            return Err(ParseError::new(
                                expr.span,
                                format!("`{name}` of type {other} cannot be used as a value"),
                            ))
                        }
                        None => {
                            return Err(ParseError::new(
                                expr.span,
                                format!("unknown identifier `{name}`"),
                            ))
                        }
                    }
                }
            }
            ExprKind::Length(name) => match self.global(name, expr.span)? {
                VarType::AddressArray => Ty::Uint,
                other => {
                    return Err(ParseError::new(
                        expr.span,
                        format!("`length` needs an address[] but `{name}` is {other}"),
                    ))
                }
            },
            ExprKind::Index { base, index } => self.index(base, index, expr.span)?,
            ExprKind::Random(bound) => {
                self.expect(bound, Ty::Uint, "`random` bound")?;
                Ty::Uint
            }
            ExprKind::Not(inner) => {
                self.expect(inner, Ty::Bool, "`!` operand")?;
                Ty::Bool
            }
            ExprKind::Binary { op, lhs, rhs } => {
                let context = format!("`{}` operand", op.symbol());
                match op {
                    BinOp::Add | BinOp::Sub | BinOp::Mul | BinOp::Div | BinOp::Rem => {
                        self.expect(lhs, Ty::Uint, &context)?;
                        self.expect(rhs, Ty::Uint, &context)?;
                        Ty::Uint
                    }
                    BinOp::Lt | BinOp::Gt | BinOp::Le | BinOp::Ge => {
                        self.expect(lhs, Ty::Uint, &context)?;
                        self.expect(rhs, Ty::Uint, &context)?;
                        Ty::Bool
                    }
                    BinOp::And | BinOp::Or => {
                        self.expect(lhs, Ty::Bool, &context)?;
                        self.expect(rhs, Ty::Bool, &context)?;
                        Ty::Bool
                    }
                    BinOp::Eq | BinOp::Ne => {
                        let left = self.expr(lhs)?;
                        self.expect(rhs, left, &context)?;
                        Ty::Bool
                    }
                }
            }
        })
    }
}
