use std::fmt;

use serde::{Deserialize, Serialize};

use crate::value::{Literal, ValueType};

/// 1-based source position.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize,
)]
pub struct Span {
    pub line: u32,
    pub column: u32,
}

impl Span {
    pub const fn new(line: u32, column: u32) -> Self {
        Span { line, column }
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

pub type SiteId = u32;

/// The name every contract gets for its implicit owner variable.
pub const OWNER_VAR: &str = "owner";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VarType {
    Uint,
    Address,
    Mapping,
    AddressArray,
}

impl VarType {
    /// `Some` for the value types tracked by state-change snapshots.
    pub fn value_type(self) -> Option<ValueType> {
        match self {
            VarType::Uint => Some(ValueType::Uint),
            VarType::Address => Some(ValueType::Address),
            VarType::Mapping | VarType::AddressArray => None,
        }
    }
}

impl fmt::Display for VarType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VarType::Uint => f.write_str("uint"),
            VarType::Address => f.write_str("address"),
            VarType::Mapping => f.write_str("mapping(address => uint)"),
            VarType::AddressArray => f.write_str("address[]"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContractModel {
    pub name: String,
    pub state_vars: Vec<StateVarDecl>,
    pub functions: Vec<FunctionDecl>,
    pub branch_sites: Vec<BranchSite>,
    pub span: Span,
}

impl ContractModel {
    pub fn function(&self, name: &str) -> Option<&FunctionDecl> {
        self.functions.iter().find(|f| f.name == name)
    }

    pub fn state_var(&self, name: &str) -> Option<&StateVarDecl> {
        self.state_vars.iter().find(|v| v.name == name)
    }

    /// State variables of value type, in declaration order.
    pub fn value_vars(&self) -> impl Iterator<Item = &StateVarDecl> {
        self.state_vars
            .iter()
            .filter(|v| v.var_type.value_type().is_some())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateVarDecl {
    pub name: String,
    pub var_type: VarType,
    pub initializer: Option<Literal>,
    /// Declared by the compiler rather than the source (the owner slot).
    pub implicit: bool,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Param {
    pub name: String,
    pub ty: ValueType,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunctionDecl {
    pub name: String,
    pub params: Vec<Param>,
    pub payable: bool,
    pub body: Vec<Stmt>,
    pub entry_site: Option<SiteId>,
    pub span: Span,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BranchKind {
    Entry,
    IfThen,
    IfElse,
    RequirePass,
    RequireFail,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BranchSite {
    pub id: SiteId,
    pub function: String,
    pub kind: BranchKind,
    pub location: Span,
}

/// The two outcomes of a conditional: `taken` is the then/pass site and
/// `not_taken` the else/fail site.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SitePair {
    pub taken: SiteId,
    pub not_taken: SiteId,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AssignOp {
    Set,
    Add,
    Sub,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LValue {
    Var(String),
    Index { base: String, index: Expr },
}

impl LValue {
    pub fn base(&self) -> &str {
        match self {
            LValue::Var(name) | LValue::Index { base: name, .. } => name,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stmt {
    pub kind: StmtKind,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StmtKind {
    Require {
        cond: Expr,
        sites: Option<SitePair>,
    },
    If {
        cond: Expr,
        then_body: Vec<Stmt>,
        else_body: Option<Vec<Stmt>>,
        sites: Option<SitePair>,
    },
    Assign {
        target: LValue,
        op: AssignOp,
        value: Expr,
    },
    Transfer {
        to: Expr,
        amount: Expr,
    },
    Push {
        array: String,
        value: Expr,
    },
    Delete {
        var: String,
    },
    /// A bare `random(n);` evaluated for its revert-on-zero effect.
    Random {
        bound: Expr,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Rem,
    Eq,
    Ne,
    Lt,
    Gt,
    Le,
    Ge,
    And,
    Or,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Rem => "%",
            BinOp::Eq => "==",
            BinOp::Ne => "!=",
            BinOp::Lt => "<",
            BinOp::Gt => ">",
            BinOp::Le => "<=",
            BinOp::Ge => ">=",
            BinOp::And => "&&",
            BinOp::Or => "||",
        }
    }

    /// Binding strength; higher binds tighter.
    pub fn precedence(self) -> u8 {
        match self {
            BinOp::Or => 1,
            BinOp::And => 2,
            BinOp::Eq | BinOp::Ne | BinOp::Lt | BinOp::Gt | BinOp::Le | BinOp::Ge => 3,
            BinOp::Add | BinOp::Sub => 4,
            BinOp::Mul | BinOp::Div | BinOp::Rem => 5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExprKind {
    Literal(Literal),
    Bool(bool),
    MsgSender,
    MsgValue,
    ThisBalance,
    Var(String),
    Length(String),
    Index {
        base: String,
        index: Box<Expr>,
    },
    Random(Box<Expr>),
    Not(Box<Expr>),
    Binary {
        op: BinOp,
        lhs: Box<Expr>,
        rhs: Box<Expr>,
    },
}
