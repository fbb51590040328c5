//! The versioned JSON result document and its canonical encoding.
//!
//! Encoding goes through `serde_json::Value`, whose object map keeps keys
//! sorted, so the bytes depend only on the content. Currency amounts are
//! decimal strings throughout.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::FuzzConfig;
use crate::error::Error;
use crate::fuzz::{detect_bugs, fuzz, BugReport, FuzzResult};
use crate::minisol::{
    extract_interface, parse, BranchSite, ContractModel, FunctionInterface, SiteId, VarType,
};
use crate::trace::{
    classify_flows, net_balance_series, summarize_functions, variable_change_series, BalanceSeries,
    FlowClassification, FunctionSummary, VariableSeries,
};
use crate::vm::{replay, CallRecord, FunctionCall, Simulation};

pub const SCHEMA_VERSION: &str = "1";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResultDocument {
    pub schema_version: String,
    pub run_id: String,
    pub contract: ContractInfo,
    pub config: FuzzConfig,
    pub simulations: Vec<SimulationDocument>,
    pub bugs: Vec<BugReport>,
    pub global_coverage: BTreeSet<SiteId>,
    pub iterations_run: u64,
    pub pool_size: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContractInfo {
    pub name: String,
    /// Hex SHA-256 of the source text.
    pub source_sha256: String,
    pub functions: Vec<FunctionInterface>,
    pub state_vars: Vec<StateVarInfo>,
    pub branch_sites: Vec<BranchSite>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StateVarInfo {
    pub name: String,
    #[serde(rename = "type")]
    pub var_type: VarType,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimulationDocument {
    pub id: usize,
    pub calls: Vec<CallRecord>,
    pub coverage: BTreeSet<SiteId>,
    pub balance_series: BalanceSeries,
    pub function_summaries: Vec<FunctionSummary>,
    pub flow_classifications: Vec<FlowClassification>,
    pub variable_series: Vec<VariableSeries>,
}

impl SimulationDocument {
    pub fn new(id: usize, sim: &Simulation, model: &ContractModel, config: &FuzzConfig) -> Self {
        SimulationDocument {
            id,
            calls: sim.calls.clone(),
            coverage: sim.coverage.clone(),
            balance_series: net_balance_series(sim, config),
            function_summaries: summarize_functions(sim, model),
            flow_classifications: sim.calls.iter().map(classify_flows).collect(),
            variable_series: variable_change_series(sim, model),
        }
    }

    pub fn simulation(&self) -> Simulation {
        Simulation {
            calls: self.calls.clone(),
            coverage: self.coverage.clone(),
        }
    }
}

impl ContractInfo {
    pub fn new(source: &str, model: &ContractModel) -> Self {
        ContractInfo {
            name: model.name.clone(),
            source_sha256: hex::encode(Sha256::digest(source.as_bytes())),
            functions: extract_interface(model),
            state_vars: model
                .state_vars
                .iter()
                .map(|v| StateVarInfo {
                    name: v.name.clone(),
                    var_type: v.var_type,
                })
                .collect(),
            branch_sites: model.branch_sites.clone(),
        }
    }
}

impl ResultDocument {
    pub fn from_fuzz(
        source: &str,
        model: &ContractModel,
        config: &FuzzConfig,
        result: &FuzzResult,
    ) -> Self {
        ResultDocument {
            schema_version: SCHEMA_VERSION.to_owned(),
            run_id: run_id(source, config),
            contract: ContractInfo::new(source, model),
            config: config.clone(),
            simulations: result
                .simulations
                .iter()
                .enumerate()
                .map(|(id, sim)| SimulationDocument::new(id, sim, model, config))
                .collect(),
            bugs: result.bugs.clone(),
            global_coverage: result.global_coverage.clone(),
            iterations_run: result.iterations_run,
            pool_size: result.pool_size,
        }
    }

    /// A single-simulation document for a replayed sequence.
    pub fn from_replay(
        source: &str,
        model: &ContractModel,
        config: &FuzzConfig,
        sim: &Simulation,
    ) -> Self {
        let bugs = detect_bugs(sim)
            .into_iter()
            .map(|kind| BugReport {
                kind,
                sequence: sim.sequence(),
            })
            .collect();
        ResultDocument {
            schema_version: SCHEMA_VERSION.to_owned(),
            run_id: run_id(source, config),
            contract: ContractInfo::new(source, model),
            config: config.clone(),
            simulations: vec![SimulationDocument::new(0, sim, model, config)],
            bugs,
            global_coverage: sim.coverage.clone(),
            iterations_run: 0,
            pool_size: 1,
        }
    }
}

/// Parses `source` and fuzzes it: the whole pipeline behind one run.
pub fn fuzz_source(source: &str, config: &FuzzConfig) -> Result<ResultDocument, Error> {
    let model = parse(source)?;
    let result = fuzz(&model, config)?;
    Ok(ResultDocument::from_fuzz(source, &model, config, &result))
}

pub fn replay_source(
    source: &str,
    config: &FuzzConfig,
    sequence: &[FunctionCall],
) -> Result<ResultDocument, Error> {
    let model = parse(source)?;
    let sim = replay(&model, config, sequence)?;
    Ok(ResultDocument::from_replay(source, &model, config, &sim))
}

/// Canonical bytes: sorted keys, two-space indent, trailing newline.
pub fn export(doc: &ResultDocument) -> Vec<u8> {
    canonical_bytes(doc)
}

pub fn parse_document(bytes: &[u8]) -> Result<ResultDocument, serde_json::Error> {
    serde_json::from_slice(bytes)
}

pub fn canonical_bytes<T: Serialize>(value: &T) -> Vec<u8> {
    let value = serde_json::to_value(value).expect("document types serialize infallibly");
    let mut out = serde_json::to_vec_pretty(&value).expect("a Value always serializes");
    out.push(b'\n');
    out
}

/// Content address for a run: the first 16 bytes of
/// SHA-256(source, NUL, canonical config), hex encoded.
pub fn run_id(source: &str, config: &FuzzConfig) -> String {
    let mut hasher = Sha256::new();
    hasher.update(source.as_bytes());
    hasher.update([0]);
    hasher.update(canonical_bytes(config));
    hex::encode(&hasher.finalize()[..16])
}

/// Call sequences on disk are a JSON array of calls.
pub fn parse_sequence(bytes: &[u8]) -> Result<Vec<FunctionCall>, serde_json::Error> {
    serde_json::from_slice(bytes)
}

pub fn export_sequence(seq: &[FunctionCall]) -> Vec<u8> {
    canonical_bytes(&seq)
}
