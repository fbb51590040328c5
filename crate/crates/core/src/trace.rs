//! Analytics derived from a simulation: net-balance series, per-function
//! summaries, per-call flow classification and state-variable rows.

use serde::{Deserialize, Serialize};

use crate::config::FuzzConfig;
use crate::minisol::ContractModel;
use crate::value::{decimal, Literal, ValueType};
use crate::vm::{CallRecord, Recipient, Simulation};

/// Net balance of every account after each call, relative to its starting
/// balance (zero for the contract and the others bucket).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BalanceSeries {
    #[serde(with = "decimal::vec")]
    pub contract: Vec<i128>,
    pub users: Vec<UserSeries>,
    #[serde(with = "decimal::vec")]
    pub others: Vec<i128>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct UserSeries(#[serde(with = "decimal::vec")] pub Vec<i128>);

fn signed(v: u128) -> i128 {
    i128::try_from(v).expect("balances stay below 2^127")
}

/// Accumulates each call's value movements. Reverted calls move nothing.
pub fn net_balance_series(sim: &Simulation, config: &FuzzConfig) -> BalanceSeries {
    let users = config.num_users as usize;
    let mut contract = 0i128;
    let mut user_net = vec![0i128; users];
    let mut others = 0i128;

    let mut series = BalanceSeries {
        contract: Vec::with_capacity(sim.calls.len()),
        users: vec![UserSeries(Vec::with_capacity(sim.calls.len())); users],
        others: Vec::with_capacity(sim.calls.len()),
    };
    for record in &sim.calls {
        if !record.reverted {
            user_net[record.call.caller as usize] -= signed(record.inflow);
            contract += signed(record.inflow);
            for tx in &record.internal_txs {
                contract -= signed(tx.value);
                match tx.to {
                    Recipient::User(i) => user_net[i as usize] += signed(tx.value),
                    Recipient::Others => others += signed(tx.value),
                }
            }
        }
        series.contract.push(contract);
        for (row, net) in series.users.iter_mut().zip(&user_net) {
            row.0.push(*net);
        }
        series.others.push(others);
    }
    series
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FunctionSummary {
    pub function: String,
    pub payable: bool,
    pub total_calls: usize,
    /// Calls in which the caller paid value into the contract.
    pub calls_to_contract: usize,
    /// Calls that produced at least one internal transaction.
    pub calls_triggering_outflow: usize,
    pub to_contract: bool,
    pub to_caller: bool,
    pub to_others: bool,
}

/// One summary per called function, in order of first call.
pub fn summarize_functions(sim: &Simulation, model: &ContractModel) -> Vec<FunctionSummary> {
    let mut out: Vec<FunctionSummary> = Vec::new();
    for record in &sim.calls {
        let name = &record.call.function;
        let idx = match out.iter().position(|s| &s.function == name) {
            Some(i) => i,
            None => {
                out.push(FunctionSummary {
                    function: name.clone(),
                    payable: model.function(name).is_some_and(|f| f.payable),
                    total_calls: 0,
                    calls_to_contract: 0,
                    calls_triggering_outflow: 0,
                    to_contract: false,
                    to_caller: false,
                    to_others: false,
                });
                out.len() - 1
            }
        };
        let flows = classify_flows(record);
        let summary = &mut out[idx];
        summary.total_calls += 1;
        summary.calls_to_contract += usize::from(flows.to_contract);
        summary.calls_triggering_outflow += usize::from(!record.internal_txs.is_empty());
        summary.to_contract |= flows.to_contract;
        summary.to_caller |= flows.to_caller;
        summary.to_others |= flows.to_others;
    }
    out
}

/// A dashed caller-to-receiver link drawn for an internal transaction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlowLink {
    pub caller: u32,
    pub receiver: Recipient,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlowClassification {
    pub index: usize,
    pub to_contract: bool,
    pub to_caller: bool,
    pub to_others: bool,
    pub links: Vec<FlowLink>,
}

pub fn classify_flows(record: &CallRecord) -> FlowClassification {
    let caller = record.call.caller;
    let mut flows = FlowClassification {
        index: record.index,
        to_contract: record.inflow > 0,
        to_caller: false,
        to_others: false,
        links: Vec::with_capacity(record.internal_txs.len()),
    };
    for tx in &record.internal_txs {
        if tx.to == Recipient::User(caller) {
            flows.to_caller = true;
        } else {
            flows.to_others = true;
        }
        flows.links.push(FlowLink {
            caller,
            receiver: tx.to,
        });
    }
    flows
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VariableKind {
    Numeric,
    Address,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "state", rename_all = "lowercase")]
pub enum VariableCell {
    Changed {
        old: Literal,
        new: Literal,
        #[serde(with = "decimal::option")]
        delta: Option<i128>,
    },
    Unchanged,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VariableSeries {
    pub var: String,
    pub kind: VariableKind,
    pub cells: Vec<VariableCell>,
}

/// Rows for the value-type variables changed at least once, in
/// declaration order.
pub fn variable_change_series(sim: &Simulation, model: &ContractModel) -> Vec<VariableSeries> {
    model
        .value_vars()
        .filter_map(|var| {
            let cells: Vec<_> = sim
                .calls
                .iter()
                .map(|record| {
                    record
                        .state_changes
                        .iter()
                        .find(|c| c.var == var.name)
                        .map_or(VariableCell::Unchanged, |c| VariableCell::Changed {
                            old: c.old,
                            new: c.new,
                            delta: c.delta,
                        })
                })
                .collect();
            if cells.iter().all(|c| *c == VariableCell::Unchanged) {
                return None;
            }
            let kind = match var.var_type.value_type() {
                Some(ValueType::Uint) => VariableKind::Numeric,
                _ => VariableKind::Address,
            };
            Some(VariableSeries {
                var: var.name.clone(),
                kind,
                cells,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::minisol::parse;
    use crate::value::Address;
    use crate::vm::{replay, FunctionCall};

    const LOTTERY: &str = include_str!("../../../corpus/lottery.msol");
    const PONZI: &str = include_str!("../../../corpus/ponzi.msol");

    fn call(caller: u32, function: &str, value: u128) -> FunctionCall {
        FunctionCall {
            caller,
            function: function.into(),
            value,
            args: vec![],
        }
    }

    fn cfg() -> FuzzConfig {
        FuzzConfig {
            owner_index: 1,
            ..FuzzConfig::default()
        }
    }

    fn ponzi_sim() -> (ContractModel, Simulation) {
        let model = parse(PONZI).unwrap();
        let seq = [
            call(0, "BuyMessage", 8),
            call(2, "BuyMessage", 6),
            call(2, "BuyMessage", 4),
            call(1, "ownerWithdraw", 0),
            call(0, "messageCount", 0),
            call(0, "BuyMessage", 10),
        ];
        let sim = replay(&model, &cfg(), &seq).unwrap();
        (model, sim)
    }

    #[test]
    fn all_reverted_gives_zero_series() {
        let model = parse(LOTTERY).unwrap();
        let sim = replay(
            &model,
            &cfg(),
            &[call(0, "pickWinner", 0), call(2, "enter", 0)],
        )
        .unwrap();
        let series = net_balance_series(&sim, &cfg());
        assert_eq!(series.contract, vec![0, 0]);
        assert!(series.users.iter().all(|u| u.0 == vec![0, 0]));
        assert_eq!(series.others, vec![0, 0]);

        let summaries = summarize_functions(&sim, &model);
        assert_eq!(summaries.len(), 2);
        for s in summaries {
            assert_eq!(s.total_calls, 1);
            assert_eq!((s.calls_to_contract, s.calls_triggering_outflow), (0, 0));
            assert!(!s.to_contract && !s.to_caller && !s.to_others);
        }
        assert!(variable_change_series(&sim, &model).is_empty());
    }

    #[test]
    fn pay_in_then_pay_out_nets_to_zero() {
        let src = "contract P {
            function pay() payable { }
            function send(address to, uint v) { to.transfer(v); }
        }";
        let model = parse(src).unwrap();
        let seq = [
            call(0, "pay", 5),
            FunctionCall {
                caller: 1,
                function: "send".into(),
                value: 0,
                args: vec![Literal::Address(Address::Index(2)), Literal::Uint(5)],
            },
        ];
        let sim = replay(&model, &cfg(), &seq).unwrap();
        let series = net_balance_series(&sim, &cfg());
        assert_eq!(series.users[0].0, vec![-5, -5]);
        assert_eq!(series.users[2].0, vec![0, 5]);
        assert_eq!(series.contract, vec![5, 0]);
    }

    #[test]
    fn lottery_round_contract_series() {
        let model = parse(LOTTERY).unwrap();
        let seq = [
            call(0, "enter", 1),
            call(1, "enter", 1),
            call(2, "enter", 1),
            call(1, "pickWinner", 0),
        ];
        let sim = replay(&model, &cfg(), &seq).unwrap();
        assert_eq!(net_balance_series(&sim, &cfg()).contract, vec![1, 2, 3, 0]);

        let summaries = summarize_functions(&sim, &model);
        let pick = summaries
            .iter()
            .find(|s| s.function == "pickWinner")
            .unwrap();
        assert!(!pick.payable);
        assert_eq!(pick.calls_to_contract, 0);
        assert_eq!(pick.calls_triggering_outflow, pick.total_calls);
        let enter = summaries.iter().find(|s| s.function == "enter").unwrap();
        assert!(enter.payable && enter.to_contract);
        assert_eq!(enter.calls_to_contract, 3);
    }

    #[test]
    fn ponzi_buy_message_shows_all_flows() {
        let (model, sim) = ponzi_sim();
        let summaries = summarize_functions(&sim, &model);
        let names: Vec<_> = summaries.iter().map(|s| s.function.as_str()).collect();
        assert_eq!(names, ["BuyMessage", "ownerWithdraw", "messageCount"]);
        let buy = &summaries[0];
        assert!(buy.to_contract && buy.to_caller && buy.to_others);
        assert_eq!(buy.total_calls, 4);
        let withdraw = &summaries[1];
        assert!(!withdraw.to_contract && withdraw.to_caller && !withdraw.to_others);
        let count = &summaries[2];
        assert_eq!(
            (count.calls_to_contract, count.calls_triggering_outflow),
            (0, 0)
        );
    }

    #[test]
    fn flow_classification() {
        let (_, sim) = ponzi_sim();
        let first = classify_flows(&sim.calls[0]);
        assert!(first.to_contract && !first.to_caller && !first.to_others);
        assert!(first.links.is_empty());

        let second = classify_flows(&sim.calls[1]);
        assert_eq!(
            second.links,
            vec![FlowLink {
                caller: 2,
                receiver: Recipient::User(0)
            }]
        );
        assert!(second.to_others && !second.to_caller);

        // user 2 buys again and is paid as the previous buyer
        let third = classify_flows(&sim.calls[2]);
        assert!(third.to_caller && !third.to_others);
    }

    #[test]
    fn owner_can_win_own_lottery() {
        // Find the first seed whose draw picks the owner, who is the only player.
        let model = parse(LOTTERY).unwrap();
        let seq = [
            call(1, "enter", 2),
            call(0, "enter", 2),
            call(1, "pickWinner", 0),
        ];
        let (config, sim) = (0..64)
            .map(|seed| FuzzConfig {
                rng_seed: seed,
                ..cfg()
            })
            .map(|c| {
                let sim = replay(&model, &c, &seq).unwrap();
                (c, sim)
            })
            .find(|(_, sim)| sim.calls[2].internal_txs[0].to == Recipient::User(1))
            .expect("some seed picks the owner");
        let flows = classify_flows(&sim.calls[2]);
        assert!(flows.to_caller && !flows.to_others);
        assert_eq!(
            flows.links,
            vec![FlowLink {
                caller: 1,
                receiver: Recipient::User(1)
            }]
        );
        let series = net_balance_series(&sim, &config);
        assert_eq!(series.users[1].0[2], 2);
    }

    #[test]
    fn variable_rows() {
        let (model, sim) = ponzi_sim();
        let rows = variable_change_series(&sim, &model);
        let names: Vec<_> = rows.iter().map(|r| r.var.as_str()).collect();
        assert_eq!(names, ["LastAuthor", "OwnerAccount", "Messages"]);

        let author = &rows[0];
        assert_eq!(author.kind, VariableKind::Address);
        for (record, cell) in sim.calls.iter().zip(&author.cells) {
            match cell {
                VariableCell::Changed { new, .. } => {
                    assert_eq!(record.call.function, "BuyMessage");
                    assert_eq!(*new, Literal::Address(Address::Index(record.call.caller)));
                }
                VariableCell::Unchanged => {}
            }
        }
        // the repeat purchase by user 2 leaves LastAuthor as is
        assert_eq!(author.cells[2], VariableCell::Unchanged);

        let fee = &rows[1];
        assert_eq!(fee.kind, VariableKind::Numeric);
        assert_eq!(
            fee.cells[3],
            VariableCell::Changed {
                old: Literal::Uint(4),
                new: Literal::Uint(0),
                delta: Some(-4)
            }
        );
    }

    #[test]
    fn unchanged_variables_are_omitted() {
        let model = parse(LOTTERY).unwrap();
        let sim = replay(&model, &cfg(), &[call(0, "enter", 1)]).unwrap();
        assert!(variable_change_series(&sim, &model).is_empty());
    }
}
