//! Canonical source rendering of a contract model.

use std::fmt::{self, Write};

use super::ast::*;

pub fn pretty_print(model: &ContractModel) -> String {
    let mut out = String::new();
    write_contract(&mut out, model).expect("writing to a String cannot fail");
    out
}

fn write_contract(out: &mut String, model: &ContractModel) -> fmt::Result {
    writeln!(out, "contract {} {{", model.name)?;
    for var in model.state_vars.iter().filter(|v| !v.implicit) {
        write!(out, "    {} {}", var.var_type, var.name)?;
        if let Some(init) = &var.initializer {
            write!(out, " = {init}")?;
        }
        writeln!(out, ";")?;
    }
    let mut separate = model.state_vars.iter().any(|v| !v.implicit);
    for func in &model.functions {
        if separate {
            writeln!(out)?;
        }
        separate = true;
        let params = func
            .params
            .iter()
            .map(|p| format!("{} {}", p.ty, p.name))
            .collect::<Vec<_>>()
            .join(", ");
        write!(out, "    function {}({})", func.name, params)?;
        if func.payable {
            write!(out, " payable")?;
        }
        write_block(out, &func.body, 1)?;
        writeln!(out)?;
    }
    writeln!(out, "}}")
}

fn indent(out: &mut String, depth: usize) {
    for _ in 0..depth {
        out.push_str("    ");
    }
}

fn write_block(out: &mut String, stmts: &[Stmt], depth: usize) -> fmt::Result {
    if stmts.is_empty() {
        return write!(out, " {{ }}");
    }
    writeln!(out, " {{")?;
    for stmt in stmts {
        write_stmt(out, stmt, depth + 1)?;
    }
    indent(out, depth);
    write!(out, "}}")
}

fn write_stmt(out: &mut String, stmt: &Stmt, depth: usize) -> fmt::Result {
    indent(out, depth);
    match &stmt.kind {
        StmtKind::If { .. } => {
            write_if(out, stmt, depth)?;
            writeln!(out)
        }
        StmtKind::Require { cond, .. } => writeln!(out, "require({});", expr(cond)),
        StmtKind::Assign { target, op, value } => {
            let target = match target {
                LValue::Var(name) => name.clone(),
                LValue::Index { base, index } => format!("{base}[{}]", expr(index)),
            };
            let op = match op {
                AssignOp::Set => "=",
                AssignOp::Add => "+=",
                AssignOp::Sub => "-=",
            };
            writeln!(out, "{target} {op} {};", expr(value))
        }
        StmtKind::Transfer { to, amount } => {
            writeln!(out, "{}.transfer({});", operand(to, u8::MAX), expr(amount))
        }
        StmtKind::Push { array, value } => writeln!(out, "{array}.push({});", expr(value)),
        StmtKind::Delete { var } => writeln!(out, "delete {var};"),
        StmtKind::Random { bound } => writeln!(out, "random({});", expr(bound)),
    }
}

fn write_if(out: &mut String, stmt: &Stmt, depth: usize) -> fmt::Result {
    let StmtKind::If {
        cond,
        then_body,
        else_body,
        ..
    } = &stmt.kind
    else {
        unreachable!()
    };
    write!(out, "if ({})", expr(cond))?;
    write_block(out, then_body, depth)?;
    if let Some(els) = else_body {
        write!(out, " else")?;
        match els.as_slice() {
            [nested] if matches!(nested.kind, StmtKind::If { .. }) => {
                write!(out, " ")?;
                write_if(out, nested, depth)?;
            }
            _ => write_block(out, els, depth)?,
        }
    }
    Ok(())
}

fn expr(e: &Expr) -> String {
    operand(e, 0)
}

/// Renders `e`, parenthesised when its operator binds looser than `min_prec`.
fn operand(e: &Expr, min_prec: u8) -> String {
    match &e.kind {
        ExprKind::Literal(lit) => lit.to_string(),
        ExprKind::Bool(b) => b.to_string(),
        ExprKind::MsgSender => "msg.sender".into(),
        ExprKind::MsgValue => "msg.value".into(),
        ExprKind::ThisBalance => "this.balance".into(),
        ExprKind::Var(name) => name.clone(),
        ExprKind::Length(name) => format!("{name}.length"),
        ExprKind::Index { base, index } => format!("{base}[{}]", expr(index)),
        ExprKind::Random(bound) => format!("random({})", expr(bound)),
        ExprKind::Not(inner) => format!("!{}", operand(inner, u8::MAX)),
        ExprKind::Binary { op, lhs, rhs } => {
            let prec = op.precedence();
            // left-associative; comparisons do not associate at all
            let left_min = if prec == 3 { prec + 1 } else { prec };
            let text = format!(
                "{} {} {}",
                operand(lhs, left_min),
                op.symbol(),
                operand(rhs, prec + 1)
            );
            if prec < min_prec {
                format!("({text})")
            } else {
                text
            }
        }
    }
}

/// Copy of the model with every source location zeroed, for comparing two
/// parses of differently formatted text.
pub fn erase_locations(model: &ContractModel) -> ContractModel {
    fn stmts(list: &mut [Stmt]) {
        for s in list {
            s.span = Span::default();
            match &mut s.kind {
                StmtKind::Require { cond, .. } => expr_mut(cond),
                StmtKind::If {
                    cond,
                    then_body,
                    else_body,
                    ..
                } => {
                    expr_mut(cond);
                    stmts(then_body);
                    if let Some(els) = else_body {
                        stmts(els);
                    }
                }
                StmtKind::Assign { target, value, .. } => {
                    if let LValue::Index { index, .. } = target {
                        expr_mut(index);
                    }
                    expr_mut(value);
                }
                StmtKind::Transfer { to, amount } => {
                    expr_mut(to);
                    expr_mut(amount);
                }
                StmtKind::Push { value, .. } => expr_mut(value),
                StmtKind::Random { bound } => expr_mut(bound),
                StmtKind::Delete { .. } => {}
            }
        }
    }
    fn expr_mut(e: &mut Expr) {
        e.span = Span::default();
        match &mut e.kind {
            ExprKind::Index { index, .. } => expr_mut(index),
            ExprKind::Random(inner) | ExprKind::Not(inner) => expr_mut(inner),
            ExprKind::Binary { lhs, rhs, .. } => {
                expr_mut(lhs);
                expr_mut(rhs);
            }
            _ => {}
        }
    }

    let mut m = model.clone();
    m.span = Span::default();
    for v in &mut m.state_vars {
        v.span = Span::default();
    }
    for f in &mut m.functions {
        f.span = Span::default();
        for p in &mut f.params {
            p.span = Span::default();
        }
        stmts(&mut f.body);
    }
    for site in &mut m.branch_sites {
        site.location = Span::default();
    }
    m
}
