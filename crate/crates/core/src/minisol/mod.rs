//! MiniSol frontend: lexing, parsing, checking and branch-site numbering.
//!
//! [`parse`] is the entry point. It returns a [`ContractModel`] whose
//! implicit `owner` variable is declared and whose branch sites are
//! numbered, ready for the VM.

pub mod ast;
mod check;
mod lexer;
mod parser;
mod pretty;
mod sites;

use serde::{Deserialize, Serialize};

pub use ast::*;
pub use lexer::{tokenize, Token, TokenKind};
pub use pretty::{erase_locations, pretty_print};
pub use sites::{assign_branch_sites, expected_site_count};

use crate::error::ParseError;
use crate::value::ValueType;

/// Parses and validates MiniSol source text.
pub fn parse(source: &str) -> Result<ContractModel, ParseError> {
    let mut model = parser::parse_contract(source)?;
    model.state_vars.insert(
        0,
        StateVarDecl {
            name: OWNER_VAR.to_string(),
            var_type: VarType::Address,
            initializer: None,
            implicit: true,
            span: model.span,
        },
    );
    check::check_contract(&model)?;
    Ok(assign_branch_sites(model))
}

/// The externally callable surface of one function.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FunctionInterface {
    pub name: String,
    pub params: Vec<ValueType>,
    pub payable: bool,
}

pub fn extract_interface(model: &ContractModel) -> Vec<FunctionInterface> {
    model
        .functions
        .iter()
        .map(|f| FunctionInterface {
            name: f.name.clone(),
            params: f.params.iter().map(|p| p.ty).collect(),
            payable: f.payable,
        })
        .collect()
}
