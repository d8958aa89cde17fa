//! JSON and CSV shapes. Arbitrary-precision values travel as decimal strings;
//! machine-range counts (grades, exponents, step counts) are JSON integers.

use std::io::Write;
use std::str::FromStr;

use anyhow::{bail, Context};
use collatz_cycles::codec::OddParams;
use collatz_cycles::composer::{CycleShape, PlanReport};
use collatz_cycles::parallel::{pattern_bits, ParallelReport};
use collatz_cycles::terminal::{Case, TerminalPlan};
use collatz_cycles::trajectory::{CycleTrace, StepKind, Trajectory};
use num_bigint::{BigInt, BigUint};
use serde::{Deserialize, Serialize};

use crate::UsageError;

pub fn dec<T: ToString>(x: &T) -> String {
    x.to_string()
}

pub fn parse_nat(s: &str, what: &str) -> anyhow::Result<BigUint> {
    BigUint::from_str(s.trim()).map_err(|_| {
        UsageError(format!(
            "{what} must be a non-negative decimal integer, got {s:?}"
        ))
        .into()
    })
}

pub fn parse_int(s: &str, what: &str) -> anyhow::Result<BigInt> {
    BigInt::from_str(s.trim())
        .map_err(|_| UsageError(format!("{what} must be a decimal integer, got {s:?}")).into())
}

pub fn parse_odd(s: &str, what: &str) -> anyhow::Result<BigUint> {
    let v = parse_nat(s, what)?;
    if v.bit(0) {
        Ok(v)
    } else {
        bail!(UsageError(format!(
            "{what} must be a positive odd integer, got {s}"
        )))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct CycleDto {
    pub initial: String,
    pub upper: String,
    #[serde(rename = "final")]
    pub final_odd: String,
    pub n: u32,
    pub alpha: u64,
    /// Halvings after the `n` alternating Up/Down pairs.
    pub trailing_halvings: u64,
    pub terminal: bool,
}

impl From<&CycleTrace> for CycleDto {
    fn from(c: &CycleTrace) -> Self {
        Self {
            initial: dec(&c.initial),
            upper: dec(&c.upper),
            final_odd: dec(&c.final_odd),
            n: c.n,
            alpha: c.alpha,
            trailing_halvings: c.alpha - u64::from(c.n),
            terminal: c.terminal,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct SimulateDto {
    pub start: String,
    pub reached_one: bool,
    pub requested_cycles: Option<usize>,
    pub steps: u64,
    pub ups: u64,
    pub downs: u64,
    pub cycles: Vec<CycleDto>,
}

impl SimulateDto {
    pub fn new(t: &Trajectory, cycles: &[CycleTrace], requested: Option<usize>) -> Self {
        Self {
            start: dec(&t.start),
            reached_one: t.reached_one,
            requested_cycles: requested,
            steps: t.steps.len() as u64,
            ups: t.ups(),
            downs: t.downs(),
            cycles: cycles.iter().map(CycleDto::from).collect(),
        }
    }
}

/// Writes `step_index,kind,value[,bits]`, starting with the start value as
/// row 0 of kind `start`.
pub fn write_trajectory_csv<W: Write>(t: &Trajectory, log2: bool, out: W) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["step_index", "kind", "value"];
    if log2 {
        header.push("bits");
    }
    w.write_record(&header)?;
    let mut row = |i: usize, kind: &str, v: &BigUint| -> csv::Result<()> {
        let mut rec = vec![i.to_string(), kind.to_string(), dec(v)];
        if log2 {
            rec.push(v.bits().to_string());
        }
        w.write_record(&rec)
    };
    row(0, "start", &t.start)?;
    for (i, s) in t.steps.iter().enumerate() {
        let kind = match s.kind {
            StepKind::Up => "up",
            StepKind::Down => "down",
        };
        row(i + 1, kind, &s.value)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct DecomposeDto {
    pub n: u32,
    pub k_n: u64,
    pub j: u64,
    #[serde(rename = "K_O")]
    pub k_o: String,
    #[serde(rename = "a_F")]
    pub a_f: String,
    pub alpha: u64,
    pub beta: u64,
    pub upper: String,
}

impl DecomposeDto {
    pub fn new(p: &OddParams, c: &CycleTrace) -> anyhow::Result<Self> {
        Ok(Self {
            n: p.n,
            k_n: p.k_n,
            j: p.j,
            k_o: dec(&p.k_o),
            a_f: dec(&c.final_odd),
            alpha: p.alpha()?,
            beta: p.beta()?,
            upper: dec(&c.upper),
        })
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
pub struct ShapeDto {
    pub n: u32,
    pub j: u64,
    pub k_n: u64,
}

impl From<ShapeDto> for CycleShape {
    fn from(s: ShapeDto) -> Self {
        CycleShape::new(s.n, s.j, s.k_n)
    }
}

impl From<&CycleShape> for ShapeDto {
    fn from(s: &CycleShape) -> Self {
        Self {
            n: s.n,
            j: s.j,
            k_n: s.k_n,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct ComposeInput {
    pub shapes: Vec<ShapeDto>,
    #[serde(default)]
    pub j_delta: Option<u64>,
    #[serde(default, rename = "Q")]
    pub q: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct CycleCheckDto {
    pub expected: (u32, u64),
    pub actual: (u32, u64),
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct ComposeOutput {
    pub shapes: Vec<ShapeDto>,
    pub j_delta: u64,
    #[serde(rename = "Q")]
    pub q: String,
    pub weight_sum: String,
    pub initial: String,
    #[serde(rename = "final")]
    pub final_odd: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verified: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub per_cycle: Option<Vec<CycleCheckDto>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

pub fn per_cycle(r: &PlanReport) -> Vec<CycleCheckDto> {
    r.per_cycle
        .iter()
        .map(|c| CycleCheckDto {
            expected: c.expected,
            actual: c.actual,
        })
        .collect()
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct TerminalInput {
    pub shapes: Vec<ShapeDto>,
    #[serde(rename = "n_L")]
    pub n_l: u32,
    #[serde(default)]
    pub j_delta: Option<u64>,
    #[serde(default)]
    pub j_beta: Option<u64>,
    #[serde(default, rename = "gamma_O")]
    pub gamma_o: Option<u64>,
    #[serde(default, rename = "a_E")]
    pub a_e: Option<u64>,
    #[serde(default, rename = "K_O")]
    pub k_o: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct TerminalOutput {
    pub case: String,
    pub shapes: Vec<ShapeDto>,
    pub j_delta: u64,
    #[serde(rename = "n_L")]
    pub n_l: u32,
    #[serde(rename = "K_O")]
    pub k_o: String,
    #[serde(rename = "a_E")]
    pub a_e: u64,
    pub j_beta: u64,
    #[serde(rename = "gamma_O")]
    pub gamma_o: u64,
    #[serde(rename = "B")]
    pub b: String,
    #[serde(rename = "F_L")]
    pub f_l: String,
    #[serde(rename = "q_O")]
    pub q_o: String,
    #[serde(rename = "Q")]
    pub q: String,
    pub b_initial: String,
    pub b_landing: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verified: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub converges: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl From<&TerminalPlan> for TerminalOutput {
    fn from(tp: &TerminalPlan) -> Self {
        let p = &tp.params;
        Self {
            case: match tp.case {
                Case::Le => "le".into(),
                Case::Gt => "gt".into(),
            },
            shapes: p.shapes.iter().map(ShapeDto::from).collect(),
            j_delta: p.j_delta,
            n_l: p.n_l,
            k_o: dec(&p.k_o),
            a_e: p.a_e,
            j_beta: p.j_beta,
            gamma_o: p.gamma_o,
            b: dec(&tp.b),
            f_l: dec(&tp.f_l),
            q_o: dec(&tp.q_o),
            q: dec(&tp.q),
            b_initial: dec(&tp.b_initial),
            b_landing: dec(&tp.b_landing),
            verified: None,
            converges: None,
            error: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct DivergenceDto {
    pub a: String,
    pub b: String,
    pub difference: String,
    pub ups: u64,
    pub halvings: u64,
    pub steps: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct ParallelDto {
    pub a_start: String,
    pub b_start: String,
    pub beta: u64,
    #[serde(rename = "K")]
    pub k: String,
    pub pattern: String,
    pub divergence: DivergenceDto,
}

impl From<&ParallelReport> for ParallelDto {
    fn from(r: &ParallelReport) -> Self {
        Self {
            a_start: dec(&r.a_start),
            b_start: dec(&r.b_start),
            beta: r.beta,
            k: dec(&r.k),
            pattern: pattern_bits(&r.pattern),
            divergence: DivergenceDto {
                a: dec(&r.a_at_divergence),
                b: dec(&r.b_at_divergence),
                difference: dec(&(&r.b_at_divergence - &r.a_at_divergence)),
                ups: r.ups_at_divergence,
                halvings: r.halvings_matched,
                steps: r.steps_matched,
            },
        }
    }
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &str) -> anyhow::Result<T> {
    let text = if path == "-" {
        std::io::read_to_string(std::io::stdin()).context("reading plan from stdin")?
    } else {
        std::fs::read_to_string(path).with_context(|| format!("reading plan file {path}"))?
    };
    serde_json::from_str(&text)
        .map_err(|e| UsageError(format!("invalid plan JSON in {path}: {e}")).into())
}
