//! Property grid over every module, summarized per suite.

use crate::output::Outcome;
use crate::report::int;
use crate::CliError;
use num_bigint::BigInt;
use plext_core::arith::{gcd, lcm, order_pair_count, paper_psi_product, Rational};
use plext_core::census::{census_by_group, degree_exponent, total_classes, ExtensionParams};
use plext_core::groups::catalog;
use plext_core::modlab::{
    default_f_invariants, delta_from_scan, enumerate_irreducible_submodules, oracle_from_scan, scan_levels,
    subspace_count_law, synthetic_block,
};
use plext_core::ramify::{different_valuation, different_valuation_literal, herbrand_convert, jump_schedule, RamifyInput};
use serde_json::{json, Value};

const PRIMES: [u32; 6] = [2, 3, 5, 7, 11, 13];

#[derive(Default)]
struct Suite {
    name: &'static str,
    cases: usize,
    failures: Vec<String>,
}

impl Suite {
    fn new(name: &'static str) -> Self {
        Suite { name, ..Default::default() }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.failures.push(what());
        }
    }

    fn check_result<T>(&mut self, r: plext_core::Result<T>, ok: impl FnOnce(&T) -> bool, what: impl Fn() -> String) {
        match r {
            Ok(v) => {
                let good = ok(&v);
                self.check(good, what)
            }
            Err(e) => self.check(false, || format!("{}: {e}", what())),
        }
    }
}

fn brute_order_pairs(a: u128, b: u128) -> u128 {
    let mut n = 0;
    for x in 0..a {
        let ox = a / gcd(x, a);
        for y in 0..b {
            if lcm(ox, b / gcd(y, b)) == a {
                n += 1;
            }
        }
    }
    n
}

fn census_suite() -> Suite {
    let mut s = Suite::new("census_cross_sum");
    for p in PRIMES {
        for ell in PRIMES {
            if p == ell {
                continue;
            }
            for e_k in 1..=4 {
                for f_k in 1..=4 {
                    let label = move || format!("p={p} ell={ell} e_K={e_k} f_K={f_k}");
                    let r = ExtensionParams::new(p, ell, e_k, f_k).and_then(|x| census_by_group(&x));
                    s.check_result(
                        r,
                        |r| r.identity_ok && r.by_group.iter().all(|e| e.count > BigInt::from(0)),
                        label,
                    );
                }
            }
        }
    }
    s
}

fn psi_suite() -> (Suite, Suite) {
    let mut count = Suite::new("psi_count_brute_force");
    for a in 1..=40u128 {
        for b in 1..=40u128 {
            count.check_result(order_pair_count(a, b), |&v| v == brute_order_pairs(a, b), || format!("({a},{b})"));
        }
    }
    let mut product = Suite::new("psi_product_when_a_divides_b");
    for a in 1..=200u128 {
        for b in (a..=200).step_by(a as usize) {
            let same = order_pair_count(a, b).and_then(|x| Ok(x == paper_psi_product(a, b)?));
            product.check_result(same, |&ok| ok, || format!("({a},{b})"));
        }
    }
    (count, product)
}

fn oracle_suite() -> (Suite, Suite) {
    let mut eq = Suite::new("oracle_equals_census");
    let mut delta = Suite::new("delta_total_equals_d");
    for (p, ell, e_k, f_k) in [(2, 3, 1, 1), (3, 2, 1, 1), (2, 3, 1, 2), (3, 2, 1, 2), (3, 2, 2, 1), (2, 3, 1, 3), (5, 2, 1, 1)] {
        let label = move || format!("p={p} ell={ell} e_K={e_k} f_K={f_k}");
        let scan = ExtensionParams::new(p, ell, e_k, f_k).and_then(|params| {
            let finv = default_f_invariants(&params)?;
            Ok((params, scan_levels(&params, &finv)?))
        });
        let (params, scan) = match scan {
            Ok(x) => x,
            Err(e) => {
                eq.check(false, || format!("{}: {e}", label()));
                continue;
            }
        };
        let closed = census_by_group(&params);
        let oracle = oracle_from_scan(&scan);
        eq.check_result(
            oracle.and_then(|o| Ok((o, closed?))),
            |(o, c)| o.multiplicity_ok && o.census.total == c.total && o.census.by_group == c.by_group,
            label,
        );
        let d = degree_exponent(&params);
        delta.check_result(
            delta_from_scan(&scan).and_then(|x| Ok((x, d?))),
            |(x, d)| x.total == d.exponent,
            label,
        );
    }
    (eq, delta)
}

fn subspace_suite() -> Suite {
    let mut s = Suite::new("subspace_count_law");
    for p in [2u32, 3, 5, 7] {
        for d in 1..=4u32 {
            for mult in 1..=4usize {
                if (p as f64).powi((d as usize * mult) as i32) > (1u64 << 16) as f64 {
                    continue;
                }
                let found = synthetic_block(p, d, mult)
                    .and_then(|b| enumerate_irreducible_submodules(&b, d as usize))
                    .map(|f| BigInt::from(f.len()));
                let law = subspace_count_law(d, mult as u32, p);
                s.check_result(found.and_then(|f| Ok((f, law?))), |(f, l)| f == l, || format!("p={p} d={d} mult={mult}"));
            }
        }
    }
    s
}

fn catalog_suite() -> Suite {
    let mut s = Suite::new("catalog_closure_orders");
    for p in [2u32, 3, 5, 7] {
        for ell in [2u32, 3, 5] {
            if p == ell {
                continue;
            }
            for f_k in [1, ell] {
                let params = match ExtensionParams::new(p, ell, 1, f_k) {
                    Ok(x) => x,
                    Err(_) => continue,
                };
                if params.top_order().map_or(true, |t| t * ell as u128 > 10_000) {
                    continue;
                }
                match catalog(&params) {
                    Ok(descs) => {
                        for d in descs {
                            let want = if d.abelian { d.key.c } else { d.key.c * ell as u128 };
                            s.check(d.closure_verified && d.matrix_order == want, || format!("{params} {}", d.label));
                        }
                    }
                    Err(e) => s.check(false, || format!("{params}: {e}")),
                }
            }
        }
    }
    s
}

fn ramify_suite() -> Suite {
    let mut s = Suite::new("ramification_profiles");
    for p in [2u32, 3, 5] {
        for e_f in 1..=5u128 {
            for f_f in 1..=2u128 {
                for d in [0i64, 3, 7, 12] {
                    let input = RamifyInput { p, e_f, f_f, d: BigInt::from(d), e_rel: 2, f_rel: 3 };
                    let label = || format!("p={p} e_F={e_f} f_F={f_f} d={d}");
                    let checked = jump_schedule(&input).and_then(|prof| {
                        let mut ok = prof.jumps.len() as u128 == e_f + 2;
                        if *prof.schedule.t.last().expect("nonempty") <= BigInt::from(10_000) {
                            ok &= different_valuation(&prof)? == different_valuation_literal(&prof)?;
                        }
                        let h = herbrand_convert(&prof)?;
                        for k in -4i64..200 {
                            let u = Rational::new(k.into(), 3.into());
                            ok &= h.psi(&h.phi(&u)) == u && h.phi(&h.psi(&u)) == u;
                        }
                        Ok(ok)
                    });
                    s.check_result(checked, |&ok| ok, label);
                }
            }
        }
    }
    s
}

pub fn run() -> Result<Outcome, CliError> {
    let (psi_count, psi_product) = psi_suite();
    let (oracle_eq, delta) = oracle_suite();
    let mut total = Suite::new("total_classes_positive");
    for p in [2u32, 3, 5] {
        for ell in [2u32, 3, 5] {
            if p != ell {
                let r = ExtensionParams::new(p, ell, 1, 1).and_then(|x| total_classes(&x));
                total.check_result(r, |t| *t > BigInt::from(0), || format!("p={p} ell={ell}"));
            }
        }
    }
    let suites = [
        census_suite(),
        total,
        psi_count,
        psi_product,
        oracle_eq,
        delta,
        subspace_suite(),
        catalog_suite(),
        ramify_suite(),
    ];
    let passed = suites.iter().all(|s| s.failures.is_empty());
    let list: Vec<Value> = suites
        .iter()
        .map(|s| {
            json!({
                "name": s.name,
                "cases": int(s.cases),
                "passed": int(s.cases - s.failures.len()),
                "failures": s.failures.iter().take(5).collect::<Vec<_>>(),
            })
        })
        .collect();
    let rows = suites.iter().map(|s| (s.name.to_string(), format!("{}/{}", s.cases - s.failures.len(), s.cases))).collect();
    Ok(Outcome {
        params: json!({}),
        params_cell: "selftest".into(),
        finv: Value::Null,
        result: json!({"kind": "selftest", "suites": list, "passed": passed}),
        audit: None,
        rows,
        exit: if passed { 0 } else { 1 },
        note: (!passed).then(|| "selftest: failures present".to_string()),
    })
}
