//! Fixture files exported from external tables, and the crosscheck command.

use crate::output::Outcome;
use crate::report::{big, int};
use crate::{CliError, Common};
use num_bigint::BigInt;
use plext_core::census::{census_by_group, ExtensionParams};
use plext_core::groups::GroupKey;
use serde::Deserialize;
use serde_json::{json, Value};
use std::collections::BTreeMap;
use std::path::Path;

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum Integer {
    Number(u64),
    Text(String),
}

impl Integer {
    fn value(&self) -> Result<BigInt, CliError> {
        match self {
            Integer::Number(n) => Ok(BigInt::from(*n)),
            Integer::Text(s) => s
                .parse::<BigInt>()
                .ok()
                .filter(|x| x.sign() != num_bigint::Sign::Minus)
                .ok_or_else(|| CliError::Usage(format!("fixture: {s:?} is not a non-negative integer"))),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupCount {
    pub label: String,
    pub count: Integer,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Record {
    pub p: u32,
    pub ell: u32,
    #[serde(rename = "e_K")]
    pub e_k: u32,
    #[serde(rename = "f_K")]
    pub f_k: u32,
    pub expected_total: Integer,
    #[serde(default)]
    pub by_group: Option<Vec<GroupCount>>,
    #[serde(default)]
    pub source: String,
}

pub fn parse(text: &str) -> Result<Vec<Record>, CliError> {
    serde_json::from_str(text).map_err(|e| {
        CliError::Usage(format!("fixture parse error at line {}, column {}: {e}", e.line(), e.column()))
    })
}

fn matches_filter(r: &Record, c: &Common) -> bool {
    c.p.map_or(true, |p| p == r.p)
        && c.ell.map_or(true, |x| x == r.ell)
        && c.e_k.map_or(true, |x| x == r.e_k)
        && c.f_k.map_or(true, |x| x == r.f_k)
}

fn check(r: &Record, allow: bool) -> Result<Value, CliError> {
    let params = ExtensionParams::with_flag(r.p, r.ell, r.e_k, r.f_k, allow)?;
    let report = census_by_group(&params)?;
    let expected = r.expected_total.value()?;
    let mut ok = expected == report.total;
    let mut v = json!({
        "p": int(r.p), "ell": int(r.ell), "e_K": int(r.e_k), "f_K": int(r.f_k),
        "source": r.source,
        "total": {"expected": big(&expected), "got": big(&report.total)},
    });
    if let Some(groups) = &r.by_group {
        let mut want: BTreeMap<GroupKey, BigInt> = BTreeMap::new();
        for g in groups {
            let key: GroupKey = g.label.parse()?;
            *want.entry(key).or_default() += g.count.value()?;
        }
        let got: BTreeMap<GroupKey, BigInt> = report.by_group.iter().map(|e| (e.key, e.count.clone())).collect();
        let keys: std::collections::BTreeSet<GroupKey> = want.keys().chain(got.keys()).copied().collect();
        let mut diffs = Vec::new();
        for k in keys {
            let (w, g) = (want.get(&k).cloned().unwrap_or_default(), got.get(&k).cloned().unwrap_or_default());
            if w != g {
                diffs.push(json!({"label": k.label(), "expected": big(&w), "got": big(&g)}));
            }
        }
        ok &= diffs.is_empty();
        v["by_group_mismatches"] = Value::Array(diffs);
    }
    v["verdict"] = json!(if ok { "match" } else { "mismatch" });
    Ok(v)
}

pub fn crosscheck(c: &Common, path: &Path) -> Result<Outcome, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read fixture {}: {e}", path.display())))?;
    let records: Vec<Record> = parse(&text)?.into_iter().filter(|r| matches_filter(r, c)).collect();
    if records.is_empty() {
        return Err(CliError::Usage("no records match the filter".into()));
    }
    let checked = records.iter().map(|r| check(r, c.allow_p_eq_ell)).collect::<Result<Vec<_>, _>>()?;
    let mismatched = checked.iter().filter(|v| v["verdict"] == "mismatch").count();
    let rows = checked
        .iter()
        .map(|v| {
            let label = format!(
                "p={} ell={} e_K={} f_K={}",
                v["p"].as_str().unwrap_or(""),
                v["ell"].as_str().unwrap_or(""),
                v["e_K"].as_str().unwrap_or(""),
                v["f_K"].as_str().unwrap_or("")
            );
            (label, v["verdict"].as_str().unwrap_or("").to_string())
        })
        .collect();
    let mut filter = serde_json::Map::new();
    for (k, x) in [("p", c.p), ("ell", c.ell), ("e_K", c.e_k), ("f_K", c.f_k)] {
        if let Some(x) = x {
            filter.insert(k.into(), int(x));
        }
    }
    let result = json!({
        "kind": "crosscheck",
        "fixture": path.display().to_string(),
        "records": checked,
        "matched": int(checked.len() - mismatched),
        "mismatched": int(mismatched),
    });
    Ok(Outcome {
        params: Value::Object(filter),
        params_cell: path.display().to_string(),
        finv: Value::Null,
        result,
        audit: None,
        rows,
        exit: if mismatched == 0 { 0 } else { 1 },
        note: (mismatched > 0).then(|| format!("crosscheck: {mismatched} record(s) mismatch")),
    })
}
