//! JSON shapes shared by the subcommands. Every integer is a decimal string.

use num_bigint::BigInt;
use plext_core::census::{CensusReport, DegreeExponent, ExtensionParams};
use plext_core::groups::{GroupKey, GroupKind};
use plext_core::modlab::{FInvariantSource, FInvariants};
use plext_core::ramify::{render, AuditItem, DiscriminantReport, Verdict};
use serde_json::{json, Value};

pub fn int(x: impl ToString) -> Value {
    Value::String(x.to_string())
}

pub fn big(x: &BigInt) -> Value {
    Value::String(x.to_string())
}

pub fn params_json(p: &ExtensionParams) -> Value {
    json!({
        "p": int(p.p),
        "ell": int(p.ell),
        "e_K": int(p.e_k),
        "f_K": int(p.f_k),
        "allow_p_equals_ell": p.allow_p_equals_ell,
        "case_tag": p.case().as_str(),
    })
}

pub fn params_cell(p: &ExtensionParams) -> String {
    format!("p={} ell={} e_K={} f_K={}", p.p, p.ell, p.e_k, p.f_k)
}

pub fn finv_json(f: &FInvariants) -> Value {
    json!({
        "e_rel": int(f.e_rel),
        "f_rel": int(f.f_rel),
        "e_F": int(f.e_f),
        "f_F": int(f.f_f),
        "n_F": int(f.n_f),
        "I_F": render(&f.i_f),
        "source": match f.source {
            FInvariantSource::DefaultDerivation => "default",
            FInvariantSource::UserOverride => "override",
        },
    })
}

pub fn kind_json(key: &GroupKey) -> Value {
    match key.kind {
        GroupKind::Cyclic => json!({"kind": "cyclic"}),
        GroupKind::NonabelianSplit => json!({"kind": "split"}),
        GroupKind::NonabelianNonsplit(j) => json!({"kind": "nonsplit", "class_index": int(j)}),
    }
}

pub fn by_group_json(report: &CensusReport) -> Value {
    Value::Array(
        report
            .by_group
            .iter()
            .map(|e| json!({"label": e.key.label(), "count": big(&e.count)}))
            .collect(),
    )
}

pub fn census_json(report: &CensusReport) -> Value {
    json!({
        "total": big(&report.total),
        "case_tag": report.case_tag.as_str(),
        "by_group": by_group_json(report),
        "identity_ok": report.identity_ok,
    })
}

pub fn census_rows(report: &CensusReport) -> Vec<(String, String)> {
    let mut rows: Vec<(String, String)> =
        report.by_group.iter().map(|e| (e.key.label(), e.count.to_string())).collect();
    rows.push(("total".into(), report.total.to_string()));
    rows
}

pub fn degree_json(d: &DegreeExponent) -> Value {
    json!({"base": int(d.base), "exponent": big(&d.exponent)})
}

pub fn discriminant_json(r: &DiscriminantReport) -> Value {
    json!({
        "alpha_closed": render(&r.alpha_closed),
        "different_valuation": render(&r.different_valuation),
        "alpha_direct": render(&r.alpha_direct),
        "agree": r.agree,
        "closed_integral": r.closed_integral,
        "flagged": r.flagged,
    })
}

pub fn audit_json(items: &[AuditItem]) -> Value {
    let all: Vec<Value> = items.iter().map(item_json).collect();
    let disagreements: Vec<Value> = items.iter().filter(|i| i.verdict.is_disagree()).map(item_json).collect();
    json!({"items": all, "disagreements": disagreements})
}

fn item_json(item: &AuditItem) -> Value {
    let (verdict, details) = match &item.verdict {
        Verdict::Agree => ("agree", None),
        Verdict::Disagree(d) => ("disagree", Some(d)),
        Verdict::NotRun(d) => ("not_run", Some(d)),
    };
    let mut v = json!({"id": item.id, "title": item.title, "verdict": verdict});
    if let Some(d) = details {
        v["details"] = Value::String(d.clone());
    }
    v
}
