use crate::output::Outcome;
use crate::report::*;
use crate::{CliError, Common, RamifyArgs};
use num_bigint::BigInt;
use plext_core::census::{census_by_group, degree_exponent, ExtensionParams};
use plext_core::ffield::{make_field, FieldCtx, FieldElement};
use plext_core::groups::{catalog, FieldMatrix, Representative};
use plext_core::modlab::{
    check_level_size, constituents, default_f_invariants, delta_from_scan, level_indices, oracle_from_scan,
    override_f_invariants, scan_levels, FInvariants, LevelContext,
};
use plext_core::ramify::{
    audit as run_audit, discriminant_report, herbrand_convert, jump_schedule, render, upper_dim, AuditItem,
    RamifyInput, Verdict,
};
use plext_core::arith::Rational;
use serde_json::{json, Value};

pub fn params(c: &Common) -> Result<ExtensionParams, CliError> {
    let need = |v: Option<u32>, flag: &str| v.ok_or_else(|| CliError::Usage(format!("missing required flag --{flag}")));
    Ok(ExtensionParams::with_flag(
        need(c.p, "p")?,
        need(c.ell, "ell")?,
        need(c.e_k, "eK")?,
        need(c.f_k, "fK")?,
        c.allow_p_eq_ell,
    )?)
}

pub fn finv(c: &Common, params: &ExtensionParams) -> Result<FInvariants, CliError> {
    match (c.e_rel, c.f_rel) {
        (Some(e), Some(f)) => Ok(override_f_invariants(params, e, f)?),
        (None, None) => Ok(default_f_invariants(params)?),
        _ => Err(CliError::Usage("--e-rel and --f-rel must be given together".into())),
    }
}

/// F-invariants for commands that do not depend on them: `null` when the
/// defaults are undefined (p = ell).
fn finv_or_null(c: &Common, params: &ExtensionParams) -> Result<Value, CliError> {
    match finv(c, params) {
        Ok(f) => Ok(finv_json(&f)),
        Err(CliError::Core(plext_core::Error::Domain(_))) if c.e_rel.is_none() => Ok(Value::Null),
        Err(e) => Err(e),
    }
}

fn outcome(params: &ExtensionParams, finv: Value, result: Value, rows: Vec<(String, String)>) -> Outcome {
    Outcome {
        params: params_json(params),
        params_cell: params_cell(params),
        finv,
        result,
        audit: None,
        rows,
        exit: 0,
        note: None,
    }
}

fn fail_unless(out: &mut Outcome, ok: bool, what: &str) {
    if !ok {
        out.exit = 1;
        out.note = Some(format!("error: internal identity failed: {what}"));
    }
}

pub fn count(c: &Common) -> Result<Outcome, CliError> {
    let params = params(c)?;
    let report = census_by_group(&params)?;
    let mut result = census_json(&report);
    result["kind"] = json!("count");
    result["degree_exponent"] = degree_json(&degree_exponent(&params)?);
    let mut out = outcome(&params, finv_or_null(c, &params)?, result, census_rows(&report));
    fail_unless(&mut out, report.identity_ok, "sum of per-group counts differs from the total");
    Ok(out)
}

fn element_json(x: &FieldElement) -> Value {
    Value::Array(x.coeffs().iter().map(|&c| int(c)).collect())
}

fn matrix_json(m: &FieldMatrix) -> Value {
    let n = m.size();
    Value::Array((0..n).map(|r| Value::Array((0..n).map(|c| element_json(m.get(r, c))).collect())).collect())
}

fn field_json(ctx: &FieldCtx) -> Value {
    json!({"p": int(ctx.characteristic()), "degree": int(ctx.degree()),
           "modulus": ctx.modulus().iter().map(|&c| int(c)).collect::<Vec<_>>()})
}

pub fn groups(c: &Common) -> Result<Outcome, CliError> {
    let params = params(c)?;
    let report = census_by_group(&params)?;
    let descriptors = catalog(&params)?;
    let ctx = make_field(params.p, params.ell)?;
    let mut rows = Vec::new();
    let mut list = Vec::new();
    for d in &descriptors {
        let count = report.by_group.iter().find(|e| e.key == d.key).map(|e| e.count.clone()).unwrap_or_default();
        let mut g = json!({
            "label": d.label,
            "c": int(d.key.c),
            "count": big(&count),
            "matrix_order": int(d.matrix_order),
            "full_order": int(d.full_order),
            "abelian": d.abelian,
            "closure_verified": d.closure_verified,
        });
        for (k, v) in kind_json(&d.key).as_object().expect("object") {
            g[k] = v.clone();
        }
        g["representative"] = match &d.representative {
            Representative::Cyclic { gamma, t } => json!({"gamma": element_json(gamma), "T": matrix_json(t)}),
            Representative::Nonabelian { alpha, beta, pair } => json!({
                "alpha": element_json(alpha),
                "beta": element_json(beta),
                "T": matrix_json(&pair.t),
                "V": matrix_json(&pair.v),
            }),
        };
        rows.push((d.label.clone(), count.to_string()));
        list.push(g);
    }
    let result = json!({"kind": "groups", "field": field_json(&ctx), "groups": list});
    Ok(outcome(&params, finv_or_null(c, &params)?, result, rows))
}

pub fn module(c: &Common) -> Result<Outcome, CliError> {
    let params = params(c)?;
    let finv = finv(c, &params)?;
    check_level_size(&finv)?;
    let ctx = LevelContext::new(&params, &finv)?;
    let mut levels = Vec::new();
    let mut rows = Vec::new();
    for i in level_indices(&finv, params.p) {
        let m = ctx.level(i)?;
        let parts = constituents(&ctx, &m)?;
        let list: Vec<Value> = parts
            .iter()
            .map(|x| {
                rows.push((
                    format!("level {i} ({},{})", x.key.alpha_exp, x.key.beta_exp),
                    x.multiplicity_in_level.to_string(),
                ));
                json!({
                    "alpha_exp": int(x.key.alpha_exp),
                    "beta_exp": int(x.key.beta_exp),
                    "beta_orbit": x.beta_orbit.iter().map(int).collect::<Vec<_>>(),
                    "r": int(x.r), "w": int(x.w), "g": int(x.g), "s": int(x.s),
                    "end_degree": int(x.d),
                    "dim": int(x.dim),
                    "multiplicity_in_level": int(x.multiplicity_in_level),
                    "global_multiplicity": int(x.global_multiplicity),
                })
            })
            .collect();
        levels.push(json!({"level": int(i), "alpha_exp": int(m.alpha_exp), "dim": int(finv.f_f), "constituents": list}));
    }
    let result = json!({"kind": "module", "levels": levels});
    Ok(outcome(&params, finv_json(&finv), result, rows))
}

pub fn oracle(c: &Common) -> Result<Outcome, CliError> {
    let params = params(c)?;
    let finv = finv(c, &params)?;
    let closed = census_by_group(&params)?;
    let scan = scan_levels(&params, &finv)?;
    let report = oracle_from_scan(&scan)?;
    let delta = delta_from_scan(&scan)?;
    let agree = report.census.total == closed.total && report.census.by_group == closed.by_group;
    let components: Vec<Value> = report
        .components
        .iter()
        .map(|x| {
            json!({
                "alpha_exp": int(x.key.alpha_exp),
                "beta_exp": int(x.key.beta_exp),
                "group": x.group.label(),
                "dim": int(x.dim),
                "end_degree": int(x.end_degree),
                "levels": x.levels.iter().map(int).collect::<Vec<_>>(),
                "multiplicity": int(x.multiplicity),
                "expected_multiplicity": int(x.expected_multiplicity),
                "count": big(&x.count),
            })
        })
        .collect();
    let result = json!({
        "kind": "oracle",
        "census": {"total": big(&report.census.total), "by_group": by_group_json(&report.census)},
        "closed_form": {"total": big(&closed.total), "by_group": by_group_json(&closed)},
        "agree": agree,
        "multiplicity_ok": report.multiplicity_ok,
        "components": components,
        "delta": {
            "levels": delta.levels.iter().map(|(l, d)| json!({"level": int(l), "dim": int(d)})).collect::<Vec<_>>(),
            "total": big(&delta.total),
            "expected": big(&delta.expected),
            "matches": delta.matches,
        },
    });
    let mut out = outcome(&params, finv_json(&finv), result, census_rows(&report.census));
    fail_unless(&mut out, agree, "oracle census differs from the closed form");
    fail_unless(&mut out, report.multiplicity_ok, "measured multiplicities differ from s n_K");
    fail_unless(&mut out, delta.matches, "delta total differs from d");
    Ok(out)
}

fn raw_input(c: &Common, args: &RamifyArgs) -> Result<Option<RamifyInput>, CliError> {
    match (args.e_f, args.f_f, args.d) {
        (None, None, None) => Ok(None),
        (Some(e_f), Some(f_f), Some(d)) => {
            let p = c.p.ok_or_else(|| CliError::Usage("missing required flag --p".into()))?;
            let (e_rel, f_rel) = match (c.e_rel, c.f_rel) {
                (Some(e), Some(f)) => (e, f),
                _ => return Err(CliError::Usage("raw ramify input needs --e-rel and --f-rel".into())),
            };
            if !plext_core::arith::is_prime(p as u128) {
                return Err(plext_core::Error::Domain(format!("p = {p} is not prime")).into());
            }
            Ok(Some(RamifyInput { p, e_f, f_f, d: BigInt::from(d), e_rel, f_rel }))
        }
        _ => Err(CliError::Usage("--eF, --fF and --d must be given together".into())),
    }
}

/// Upper dimensions at `-1, 0, 1, ...` up to one past the window, at most 64 points.
fn upper_dim_samples(input: &RamifyInput) -> Result<Vec<Value>, CliError> {
    let end = (input.p as u128 * input.e_f) / (input.p as u128 - 1);
    let mut out = Vec::new();
    for v in -1i64..=(end.min(62) as i64) {
        let u = upper_dim(&Rational::from_integer(v.into()), &input.d, input.e_f, input.f_f, input.p)?;
        out.push(json!({"v": int(v), "raw": big(&u.raw), "clamped": big(&u.clamped), "negative": u.negative}));
    }
    Ok(out)
}

pub fn ramify(c: &Common, args: &RamifyArgs) -> Result<Outcome, CliError> {
    let (input, params_value, cell, finv_value) = match raw_input(c, args)? {
        Some(input) => {
            let cell = format!("p={} e_F={} f_F={} d={}", input.p, input.e_f, input.f_f, input.d);
            let pv = json!({"p": int(input.p), "e_F": int(input.e_f), "f_F": int(input.f_f), "d": big(&input.d)});
            let fv = json!({"e_rel": int(input.e_rel), "f_rel": int(input.f_rel), "e_F": int(input.e_f),
                            "f_F": int(input.f_f), "n_F": int(input.n_f()), "source": "raw"});
            (input, pv, cell, fv)
        }
        None => {
            let params = params(c)?;
            let finv = finv(c, &params)?;
            (RamifyInput::from_params(&params, &finv)?, params_json(&params), params_cell(&params), finv_json(&finv))
        }
    };
    let profile = jump_schedule(&input)?;
    let herbrand = herbrand_convert(&profile)?;
    let disc = discriminant_report(&input)?;
    let result = json!({
        "kind": "ramify",
        "degree_F_over_K": int(input.degree_f_over_k()),
        "t": profile.schedule.t.iter().map(big).collect::<Vec<_>>(),
        "lower_jumps": profile.jumps.iter().map(big).collect::<Vec<_>>(),
        "upper_breaks": herbrand.upper_breaks().iter().map(render).collect::<Vec<_>>(),
        "segments": profile.segments.iter()
            .map(|s| json!({"start": big(&s.start), "end": big(&s.end), "exponent": big(&s.exponent)}))
            .collect::<Vec<_>>(),
        "flagged": profile.flagged,
        "upper_dim": upper_dim_samples(&input)?,
        "discriminant": discriminant_json(&disc),
    });
    let rows = vec![
        ("different_valuation".into(), render(&disc.different_valuation)),
        ("alpha_closed".into(), render(&disc.alpha_closed)),
        ("alpha_direct".into(), render(&disc.alpha_direct)),
    ];
    let item = AuditItem {
        id: "c",
        title: "closed discriminant vs different sum",
        verdict: if disc.agree {
            Verdict::Agree
        } else {
            Verdict::Disagree(format!(
                "closed {} vs f_rel * different = {}",
                render(&disc.alpha_closed),
                render(&disc.alpha_direct)
            ))
        },
    };
    let disagree = item.verdict.is_disagree();
    Ok(Outcome {
        params: params_value,
        params_cell: cell,
        finv: finv_value,
        result,
        audit: Some(audit_json(&[item])),
        rows,
        exit: if disagree { 2 } else { 0 },
        note: disagree.then(|| "audit: disagreement c".to_string()),
    })
}

pub fn audit(c: &Common) -> Result<Outcome, CliError> {
    let params = params(c)?;
    let finv = finv(c, &params)?;
    let report = run_audit(&params, &finv)?;
    let result = json!({
        "kind": "audit",
        "psi_divergences": report.psi_divergences.iter()
            .map(|x| json!({"a": int(x.a), "b": int(x.b), "count": int(x.count), "product": int(x.product)}))
            .collect::<Vec<_>>(),
        "discriminant": report.discriminant.as_ref().map_or(Value::Null, discriminant_json),
    });
    let rows = report
        .items
        .iter()
        .map(|i| {
            let v = match i.verdict {
                Verdict::Agree => "agree",
                Verdict::Disagree(_) => "disagree",
                Verdict::NotRun(_) => "not_run",
            };
            (format!("audit {}", i.id), v.to_string())
        })
        .collect();
    let ids: Vec<&str> = report.disagreements().iter().map(|i| i.id).collect();
    let mut out = outcome(&params, finv_json(&finv), result, rows);
    out.audit = Some(audit_json(&report.items));
    if !ids.is_empty() {
        out.exit = 2;
        out.note = Some(format!("audit: disagreements {}", ids.join(", ")));
    }
    Ok(out)
}
