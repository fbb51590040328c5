use serde::{Deserialize, Serialize};

use crate::vm::{FunctionCall, RevertReason, Simulation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BugKind {
    ArithmeticOverflow,
    TransferFailure,
}

/// A bug-pool entry: the sequence that exhibited the behavior.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BugReport {
    pub kind: BugKind,
    pub sequence: Vec<FunctionCall>,
}

/// Distinct bug kinds exhibited by `sim`, in order of first occurrence.
pub fn detect_bugs(sim: &Simulation) -> Vec<BugKind> {
    let mut kinds = Vec::new();
    for record in &sim.calls {
        let kind = match record.revert_reason {
            Some(RevertReason::ArithmeticOverflow) => BugKind::ArithmeticOverflow,
            Some(RevertReason::TransferExceedsBalance) => BugKind::TransferFailure,
            _ => continue,
        };
        if !kinds.contains(&kind) {
            kinds.push(kind);
        }
    }
    kinds
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::FuzzConfig;
    use crate::minisol::parse;
    use crate::vm::replay;

    const PONZI: &str = include_str!("../../../../corpus/ponzi.msol");

    fn call(caller: u32, function: &str, value: u128) -> FunctionCall {
        FunctionCall {
            caller,
            function: function.into(),
            value,
            args: vec![],
        }
    }

    #[test]
    fn clean_run_has_no_bugs() {
        let model = parse(PONZI).unwrap();
        let sim = replay(
            &model,
            &FuzzConfig::default(),
            &[
                call(0, "BuyMessage", 4),
                call(1, "BuyMessage", 5),
                call(0, "ownerWithdraw", 0),
            ],
        )
        .unwrap();
        assert!(sim.calls.iter().all(|r| !r.reverted));
        assert_eq!(detect_bugs(&sim), vec![]);
    }

    #[test]
    fn guard_failures_are_not_bugs() {
        let model = parse(PONZI).unwrap();
        let sim = replay(
            &model,
            &FuzzConfig::default(),
            &[call(2, "ownerWithdraw", 0)],
        )
        .unwrap();
        assert!(sim.calls[0].reverted);
        assert_eq!(detect_bugs(&sim), vec![]);
    }

    #[test]
    fn unguarded_withdrawal_is_transfer_failure() {
        // Fee vault whose owner may withdraw a fixed payout; the balance guard
        // is what keeps the transfer covered.
        let guarded = "contract Vault {
            uint payout = 10;
            function deposit() payable { require(msg.value > 0); }
            function ownerWithdraw() {
                require(msg.sender == owner);
                require(this.balance >= payout);
                msg.sender.transfer(payout);
            }
        }";
        let unguarded = guarded.replace("require(this.balance >= payout);", "");
        let seq = [call(0, "ownerWithdraw", 0)];

        let model = parse(guarded).unwrap();
        let sim = replay(&model, &FuzzConfig::default(), &seq).unwrap();
        assert_eq!(detect_bugs(&sim), vec![]);

        let model = parse(&unguarded).unwrap();
        let sim = replay(&model, &FuzzConfig::default(), &seq).unwrap();
        assert_eq!(detect_bugs(&sim), vec![BugKind::TransferFailure]);
    }

    #[test]
    fn counter_overflow_detected() {
        let src = "contract Counter {
            uint count = 340282366920938463463374607431768211454;
            function bump() { count += 1; }
        }";
        let model = parse(src).unwrap();
        let sim = replay(
            &model,
            &FuzzConfig::default(),
            &[call(0, "bump", 0), call(1, "bump", 0), call(2, "bump", 0)],
        )
        .unwrap();
        assert!(!sim.calls[0].reverted);
        assert!(sim.calls[1].reverted);
        assert_eq!(detect_bugs(&sim), vec![BugKind::ArithmeticOverflow]);
    }
}
