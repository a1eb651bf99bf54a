//! Input documents.
//!
//! A matrix function arrives as `{"matrix": [["1/z", "z-1"], ...]}` or
//! as the bare grid; a differential system as
//! `{"ode": {"m": 2, "matrices": [A0, A1, A2]}}` (coefficients of the
//! derivative orders `0..=m`, each a grid of exact scalars) or as the
//! bare object.  Scalar entries may be JSON strings in the expression
//! grammar or plain integers.  The digest ties a report to the exact
//! bytes it was computed from.

use meromat::{Error, GaussRat, Mat, OdeSystem, RatMatFun, Result};
use serde_json::Value;
use sha2::{Digest, Sha256};

pub enum InputKind {
    Matrix(RatMatFun),
    Ode(OdeSystem),
}

pub struct LoadedInput {
    pub digest: String,
    pub kind: InputKind,
}

impl LoadedInput {
    pub fn matrix(self) -> Result<RatMatFun> {
        match self.kind {
            InputKind::Matrix(q) => Ok(q),
            InputKind::Ode(_) => Err(Error::BadInput(
                "this command expects a matrix input, got a differential system".into(),
            )),
        }
    }

    pub fn ode(self) -> Result<OdeSystem> {
        match self.kind {
            InputKind::Ode(sys) => Ok(sys),
            InputKind::Matrix(_) => Err(Error::BadInput(
                "this command expects a differential system, got a matrix".into(),
            )),
        }
    }
}

pub fn load(path: &str) -> Result<LoadedInput> {
    let bytes = std::fs::read(path)
        .map_err(|e| Error::BadInput(format!("cannot read {path}: {e}")))?;
    let digest = format!("{:x}", Sha256::digest(&bytes));
    let value: Value = serde_json::from_slice(&bytes)
        .map_err(|e| Error::BadInput(format!("{path} is not valid JSON: {e}")))?;
    let kind = parse_value(&value)?;
    Ok(LoadedInput { digest, kind })
}

fn parse_value(value: &Value) -> Result<InputKind> {
    if let Some(grid) = value.get("matrix") {
        return Ok(InputKind::Matrix(matrix_from(grid)?));
    }
    if let Some(ode) = value.get("ode") {
        return Ok(InputKind::Ode(ode_from(ode)?));
    }
    if value.is_array() {
        return Ok(InputKind::Matrix(matrix_from(value)?));
    }
    if value.get("matrices").is_some() {
        return Ok(InputKind::Ode(ode_from(value)?));
    }
    Err(Error::BadInput(
        "input must contain a \"matrix\" grid or an \"ode\" object".into(),
    ))
}

fn entry_string(cell: &Value) -> Result<String> {
    match cell {
        Value::String(s) => Ok(s.clone()),
        Value::Number(n) if n.is_i64() || n.is_u64() => Ok(n.to_string()),
        other => Err(Error::BadInput(format!(
            "matrix entries must be expression strings or integers, got {other}"
        ))),
    }
}

fn string_grid(value: &Value) -> Result<Vec<Vec<String>>> {
    let rows = value
        .as_array()
        .ok_or_else(|| Error::BadInput("expected an array of rows".into()))?;
    if rows.is_empty() {
        return Err(Error::BadInput("matrix has no rows".into()));
    }
    rows.iter()
        .map(|row| {
            row.as_array()
                .ok_or_else(|| Error::BadInput("each matrix row must be an array".into()))?
                .iter()
                .map(entry_string)
                .collect()
        })
        .collect()
}

fn matrix_from(value: &Value) -> Result<RatMatFun> {
    let grid = string_grid(value)?;
    let refs: Vec<Vec<&str>> = grid
        .iter()
        .map(|row| row.iter().map(String::as_str).collect())
        .collect();
    let slices: Vec<&[&str]> = refs.iter().map(Vec::as_slice).collect();
    RatMatFun::from_exprs(&slices)
}

fn ode_from(value: &Value) -> Result<OdeSystem> {
    let obj = value
        .as_object()
        .ok_or_else(|| Error::BadInput("\"ode\" must be an object".into()))?;
    let m = obj
        .get("m")
        .and_then(Value::as_u64)
        .ok_or_else(|| Error::BadInput("\"ode\" needs an integer order \"m\"".into()))?
        as usize;
    let mats_value = obj
        .get("matrices")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::BadInput("\"ode\" needs an array \"matrices\"".into()))?;
    if mats_value.len() != m + 1 {
        return Err(Error::BadInput(format!(
            "order {m} needs {} coefficient matrices (derivative orders 0..={m}), got {}",
            m + 1,
            mats_value.len()
        )));
    }
    let mut mats = Vec::with_capacity(mats_value.len());
    for grid_value in mats_value {
        let grid = string_grid(grid_value)?;
        let mut rows = Vec::with_capacity(grid.len());
        for row in &grid {
            let parsed: Result<Vec<GaussRat>> = row.iter().map(|s| s.parse()).collect();
            rows.push(parsed?);
        }
        mats.push(Mat::from_rows(rows)?);
    }
    OdeSystem::new(mats)
}
