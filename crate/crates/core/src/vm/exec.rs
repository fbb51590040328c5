use std::collections::{BTreeSet, HashMap};

use super::random::draw_random;
use super::world::{StorageValue, WorldState};
use super::{CallRecord, FunctionCall, InternalTransaction, Recipient, RevertReason, StateChange};
use crate::error::UsageError;
use crate::minisol::*;
use crate::value::{Address, Literal};

type Exec<T> = Result<T, RevertReason>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Val {
    Uint(u128),
    Address(Address),
    Bool(bool),
}

impl Val {
    fn uint(self) -> u128 {
        match self {
            Val::Uint(v) => v,
            other => unreachable!("type checker admitted {other:?} as uint"),
        }
    }

    fn address(self) -> Address {
        match self {
            Val::Address(a) => a,
            other => unreachable!("type checker admitted {other:?} as address"),
        }
    }

    fn bool(self) -> bool {
        match self {
            Val::Bool(b) => b,
            other => unreachable!("type checker admitted {other:?} as bool"),
        }
    }
}

impl From<Literal> for Val {
    fn from(lit: Literal) -> Self {
        match lit {
            Literal::Uint(v) => Val::Uint(v),
            Literal::Address(a) => Val::Address(a),
        }
    }
}

/// Executes one call against `world`.
///
/// Reverts are reported in the returned record and leave `world` exactly as
/// it was. Only calls that cannot be dispatched (unknown function or caller,
/// ill-typed arguments) are errors.
pub fn execute_call(
    world: &mut WorldState,
    model: &ContractModel,
    call: &FunctionCall,
    index: usize,
) -> Result<CallRecord, UsageError> {
    let func = model
        .function(&call.function)
        .ok_or_else(|| UsageError::UnknownFunction(call.function.clone()))?;
    let num_users = world.num_users();
    if call.caller >= num_users {
        return Err(UsageError::UnknownCaller {
            caller: call.caller,
            num_users,
        });
    }
    if call.args.len() != func.params.len() {
        return Err(UsageError::ArgumentCount {
            function: func.name.clone(),
            expected: func.params.len(),
            got: call.args.len(),
        });
    }
    let mut args = HashMap::new();
    for (position, (param, arg)) in func.params.iter().zip(&call.args).enumerate() {
        if arg.value_type() != param.ty {
            return Err(UsageError::ArgumentType {
                function: func.name.clone(),
                position,
                expected: param.ty,
            });
        }
        args.insert(param.name.as_str(), Val::from(*arg));
    }

    let before = world.clone();
    let mut frame = Frame {
        world,
        call,
        args,
        covered: BTreeSet::new(),
        transfers: Vec::new(),
        draws: 0,
    };
    frame
        .covered
        .insert(func.entry_site.expect("parse() numbers every function"));
    let outcome = frame.run(func);
    let Frame {
        world,
        covered,
        transfers,
        ..
    } = frame;

    match outcome {
        Ok(()) => {
            let state_changes = diff_value_vars(model, &before, world);
            world.call_counter += 1;
            Ok(CallRecord {
                index,
                call: call.clone(),
                reverted: false,
                revert_reason: None,
                inflow: call.value,
                internal_txs: transfers,
                state_changes,
                balances_after: world.balances(),
                covered_sites: covered,
            })
        }
        Err(reason) => {
            *world = before;
            Ok(CallRecord {
                index,
                call: call.clone(),
                reverted: true,
                revert_reason: Some(reason),
                inflow: 0,
                internal_txs: Vec::new(),
                state_changes: Vec::new(),
                balances_after: world.balances(),
                covered_sites: covered,
            })
        }
    }
}

fn diff_value_vars(
    model: &ContractModel,
    before: &WorldState,
    after: &WorldState,
) -> Vec<StateChange> {
    model
        .value_vars()
        .filter_map(|var| {
            let old = before.storage[&var.name].as_literal()?;
            let new = after.storage[&var.name].as_literal()?;
            if old == new {
                return None;
            }
            let delta = match (old, new) {
                // unrepresentable only for jumps of 2^127 or more
                (Literal::Uint(o), Literal::Uint(n)) if n >= o => i128::try_from(n - o).ok(),
                (Literal::Uint(o), Literal::Uint(n)) => i128::try_from(o - n).ok().map(|d| -d),
                _ => None,
            };
            Some(StateChange {
                var: var.name.clone(),
                old,
                new,
                delta,
            })
        })
        .collect()
}

struct Frame<'a> {
    world: &'a mut WorldState,
    call: &'a FunctionCall,
    args: HashMap<&'a str, Val>,
    covered: BTreeSet<SiteId>,
    transfers: Vec<InternalTransaction>,
    draws: u32,
}

impl Frame<'_> {
    fn run(&mut self, func: &FunctionDecl) -> Exec<()> {
        let value = self.call.value;
        if value > 0 && !func.payable {
            return Err(RevertReason::NonPayable);
        }
        let caller = self.call.caller as usize;
        let balance = self.world.user_balances[caller];
        if value > balance {
            return Err(RevertReason::InsufficientBalance);
        }
        self.world.user_balances[caller] = balance - value;
        self.world.contract_balance = self
            .world
            .contract_balance
            .checked_add(value)
            .ok_or(RevertReason::ArithmeticOverflow)?;
        self.block(&func.body)
    }

    fn block(&mut self, stmts: &[Stmt]) -> Exec<()> {
        stmts.iter().try_for_each(|s| self.stmt(s))
    }

    fn stmt(&mut self, stmt: &Stmt) -> Exec<()> {
        match &stmt.kind {
            StmtKind::Require { cond, sites } => {
                let sites = sites.expect("parse() numbers every require");
                if self.eval(cond)?.bool() {
                    self.covered.insert(sites.taken);
                    Ok(())
                } else {
                    self.covered.insert(sites.not_taken);
                    Err(RevertReason::RequireFailed)
                }
            }
            StmtKind::If {
                cond,
                then_body,
                else_body,
                sites,
            } => {
                let sites = sites.expect("parse() numbers every if");
                if self.eval(cond)?.bool() {
                    self.covered.insert(sites.taken);
                    self.block(then_body)
                } else {
                    self.covered.insert(sites.not_taken);
                    match else_body {
                        Some(els) => self.block(els),
                        None => Ok(()),
                    }
                }
            }
            StmtKind::Assign { target, op, value } => {
                let rhs = self.eval(value)?;
                match target {
                    LValue::Var(name) => {
                        let new = match op {
                            AssignOp::Set => rhs,
                            _ => Val::Uint(combine(*op, self.load_uint(name), rhs.uint())?),
                        };
                        let slot = self.slot(name);
                        *slot = match new {
                            Val::Uint(v) => StorageValue::Uint(v),
                            Val::Address(a) => StorageValue::Address(a),
                            Val::Bool(_) => unreachable!("bools are not storable"),
                        };
                        Ok(())
                    }
                    LValue::Index { base, index } => {
                        let key = self.eval(index)?;
                        match self.slot(base) {
                            StorageValue::Mapping(map) => {
                                let key = key.address();
                                let current = map.get(&key).copied().unwrap_or(0);
                                let new = match op {
                                    AssignOp::Set => rhs.uint(),
                                    _ => combine(*op, current, rhs.uint())?,
                                };
                                if new == 0 {
                                    map.remove(&key);
                                } else {
                                    map.insert(key, new);
                                }
                                Ok(())
                            }
                            StorageValue::Array(items) => {
                                let slot = usize::try_from(key.uint())
                                    .ok()
                                    .and_then(|i| items.get_mut(i))
                                    .ok_or(RevertReason::IndexOutOfRange)?;
                                *slot = rhs.address();
                                Ok(())
                            }
                            other => unreachable!("indexed non-collection {other:?}"),
                        }
                    }
                }
            }
            StmtKind::Transfer { to, amount } => {
                let to = self.eval(to)?.address();
                let amount = self.eval(amount)?.uint();
                self.transfer(to, amount)
            }
            StmtKind::Push { array, value } => {
                let item = self.eval(value)?.address();
                match self.slot(array) {
                    StorageValue::Array(items) => items.push(item),
                    other => unreachable!("push on {other:?}"),
                }
                Ok(())
            }
            StmtKind::Delete { var } => {
                let fresh = match self.world.storage[var.as_str()] {
                    StorageValue::Uint(_) => StorageValue::Uint(0),
                    StorageValue::Address(_) => StorageValue::Address(Address::Null),
                    StorageValue::Mapping(_) => StorageValue::Mapping(Default::default()),
                    StorageValue::Array(_) => StorageValue::Array(Vec::new()),
                };
                *self.slot(var) = fresh;
                Ok(())
            }
            StmtKind::Random { bound } => {
                let bound = self.eval(bound)?.uint();
                self.random(bound).map(|_| ())
            }
        }
    }

    fn transfer(&mut self, to: Address, amount: u128) -> Exec<()> {
        if amount > self.world.contract_balance {
            return Err(RevertReason::TransferExceedsBalance);
        }
        if amount == 0 {
            return Ok(());
        }
        self.world.contract_balance -= amount;
        let recipient = match to.user_index(self.world.num_users()) {
            Some(i) => {
                let bal = &mut self.world.user_balances[i as usize];
                *bal = bal
                    .checked_add(amount)
                    .ok_or(RevertReason::ArithmeticOverflow)?;
                Recipient::User(i)
            }
            None => {
                self.world.others_balance = self
                    .world
                    .others_balance
                    .checked_add(amount)
                    .ok_or(RevertReason::ArithmeticOverflow)?;
                Recipient::Others
            }
        };
        self.transfers.push(InternalTransaction {
            to: recipient,
            value: amount,
        });
        Ok(())
    }

    fn random(&mut self, bound: u128) -> Exec<u128> {
        let ordinal = self.draws;
        self.draws += 1;
        draw_random(self.world.rng_seed, self.world.call_counter, ordinal, bound)
    }

    fn slot(&mut self, name: &str) -> &mut StorageValue {
        self.world
            .storage
            .get_mut(name)
            .expect("checker resolved every state variable")
    }

    fn load_uint(&self, name: &str) -> u128 {
        match self.world.storage[name] {
            StorageValue::Uint(v) => v,
            ref other => unreachable!("`{name}` is {other:?}, not uint"),
        }
    }

    fn eval(&mut self, expr: &Expr) -> Exec<Val> {
        Ok(match &expr.kind {
            ExprKind::Literal(lit) => Val::from(*lit),
            ExprKind::Bool(b) => Val::Bool(*b),
            ExprKind::MsgSender => Val::Address(Address::Index(self.call.caller)),
            ExprKind::MsgValue => Val::Uint(self.call.value),
            ExprKind::ThisBalance => Val::Uint(self.world.contract_balance),
            ExprKind::Var(name) => match self.args.get(name.as_str()) {
                Some(v) => *v,
                None => match &self.world.storage[name.as_str()] {
                    StorageValue::Uint(v) => Val::Uint(*v),
                    StorageValue::Address(a) => Val::Address(*a),
                    other => unreachable!("`{name}` used as a value: {other:?}"),
                },
            },
            ExprKind::Length(name) => match &self.world.storage[name.as_str()] {
                StorageValue::Array(items) => Val::Uint(items.len() as u128),
                other => unreachable!("length of {other:?}"),
            },
            ExprKind::Index { base, index } => {
                let key = self.eval(index)?;
                match &self.world.storage[base.as_str()] {
                    StorageValue::Mapping(map) => {
                        Val::Uint(map.get(&key.address()).copied().unwrap_or(0))
                    }
                    StorageValue::Array(items) => usize::try_from(key.uint())
                        .ok()
                        .and_then(|i| items.get(i))
                        .map(|a| Val::Address(*a))
                        .ok_or(RevertReason::IndexOutOfRange)?,
                    other => unreachable!("indexed {other:?}"),
                }
            }
            ExprKind::Random(bound) => {
                let bound = self.eval(bound)?.uint();
                Val::Uint(self.random(bound)?)
            }
            ExprKind::Not(inner) => Val::Bool(!self.eval(inner)?.bool()),
            ExprKind::Binary { op, lhs, rhs } => match op {
                BinOp::And => Val::Bool(self.eval(lhs)?.bool() && self.eval(rhs)?.bool()),
                BinOp::Or => Val::Bool(self.eval(lhs)?.bool() || self.eval(rhs)?.bool()),
                BinOp::Eq => Val::Bool(self.eval(lhs)? == self.eval(rhs)?),
                BinOp::Ne => Val::Bool(self.eval(lhs)? != self.eval(rhs)?),
                _ => {
                    let a = self.eval(lhs)?.uint();
                    let b = self.eval(rhs)?.uint();
                    arithmetic(*op, a, b)?
                }
            },
        })
    }
}

fn combine(op: AssignOp, current: u128, rhs: u128) -> Exec<u128> {
    match op {
        AssignOp::Set => Ok(rhs),
        AssignOp::Add => current
            .checked_add(rhs)
            .ok_or(RevertReason::ArithmeticOverflow),
        AssignOp::Sub => current
            .checked_sub(rhs)
            .ok_or(RevertReason::ArithmeticOverflow),
    }
}

fn arithmetic(op: BinOp, a: u128, b: u128) -> Exec<Val> {
    let overflow = RevertReason::ArithmeticOverflow;
    Ok(match op {
        BinOp::Add => Val::Uint(a.checked_add(b).ok_or(overflow)?),
        BinOp::Sub => Val::Uint(a.checked_sub(b).ok_or(overflow)?),
        BinOp::Mul => Val::Uint(a.checked_mul(b).ok_or(overflow)?),
        BinOp::Div => Val::Uint(a.checked_div(b).ok_or(RevertReason::DivisionByZero)?),
        BinOp::Rem => Val::Uint(a.checked_rem(b).ok_or(RevertReason::DivisionByZero)?),
        BinOp::Lt => Val::Bool(a < b),
        BinOp::Gt => Val::Bool(a > b),
        BinOp::Le => Val::Bool(a <= b),
        BinOp::Ge => Val::Bool(a >= b),
        BinOp::Eq | BinOp::Ne | BinOp::And | BinOp::Or => unreachable!("handled by caller"),
    })
}
