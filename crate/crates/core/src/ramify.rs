//! Ramification filtration and discriminant of the composite of all
//! degree-`p^ell` extensions without intermediate fields, evaluated exactly
//! from the closed statements, plus an audit comparing independent routes.

use crate::arith::{order_pair_count, paper_psi_product, Rational};
use crate::census::{admissible_orders, degree_exponent, CaseTag, ExtensionParams};
use crate::error::{capacity, domain, Result};
use crate::modlab::{delta_profile, FInvariants};
use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

/// Largest bit length allowed for `p^d` and the jump positions.
pub const MAX_BITS: u64 = 1 << 24;

fn rat(n: impl Into<BigInt>) -> Rational {
    Rational::from_integer(n.into())
}

/// `p^e` for a possibly negative exponent.
fn rat_pow(p: u32, e: &BigInt) -> Result<Rational> {
    let mag = e.abs().to_u64().filter(|m| m.saturating_mul(32) <= MAX_BITS * 32);
    let Some(mag) = mag else {
        return capacity(format!("{p}^{e} is too large"));
    };
    let value = num_traits::pow(BigInt::from(p), mag as usize);
    Ok(if e.is_negative() { Rational::new(BigInt::one(), value) } else { rat(value) })
}

fn ceil(x: &Rational) -> BigInt {
    x.ceil().to_integer()
}

/// Value of the piecewise upper dimension, with its clamped companion.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UpperDim {
    #[serde(serialize_with = "crate::ramify::ser_big")]
    pub raw: BigInt,
    #[serde(serialize_with = "crate::ramify::ser_big")]
    pub clamped: BigInt,
    pub negative: bool,
}

pub(crate) fn ser_big<S: serde::Serializer>(x: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

/// `dim G^v`: `d` on `[-1, 1]`, `d - (ceil(v) - ceil(v/p)) f_F` on
/// `(1, p e_F/(p-1) - 1]`, and 0 beyond.
pub fn upper_dim(v: &Rational, d: &BigInt, e_f: u128, f_f: u128, p: u32) -> Result<UpperDim> {
    if *v < rat(-1) {
        return domain("upper numbering starts at v = -1");
    }
    let window_end = Rational::new(BigInt::from(p as u128 * e_f), BigInt::from(p - 1)) - rat(1);
    let raw = if *v <= rat(1) {
        d.clone()
    } else if *v <= window_end {
        let steps = ceil(v) - ceil(&(v / rat(p)));
        d - steps * BigInt::from(f_f)
    } else {
        BigInt::zero()
    };
    let negative = raw.is_negative();
    let clamped = if negative { BigInt::zero() } else { raw.clone() };
    Ok(UpperDim { raw, clamped, negative })
}

/// Inputs of the ramification statements: `p`, `e_F`, `f_F`, `d` and the
/// tame relative invariants (`[F:K] = e_rel f_rel`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RamifyInput {
    pub p: u32,
    pub e_f: u128,
    pub f_f: u128,
    pub d: BigInt,
    pub e_rel: u128,
    pub f_rel: u128,
}

impl RamifyInput {
    pub fn from_params(params: &ExtensionParams, finv: &FInvariants) -> Result<Self> {
        Ok(RamifyInput {
            p: params.p,
            e_f: finv.e_f,
            f_f: finv.f_f,
            d: degree_exponent(params)?.exponent,
            e_rel: finv.e_rel,
            f_rel: finv.f_rel,
        })
    }

    pub fn degree_f_over_k(&self) -> u128 {
        self.e_rel * self.f_rel
    }

    pub fn n_f(&self) -> u128 {
        self.e_f * self.f_f
    }

    fn check_size(&self) -> Result<()> {
        let log_p = 64 - (self.p as u64).leading_zeros() as u64;
        let d_bits = self.d.abs().to_u64().map(|d| d.saturating_mul(log_p));
        let t_bits = (self.e_f as u64).saturating_mul(self.f_f as u64).saturating_mul(log_p);
        if self.e_f == 0 || self.f_f == 0 || self.p < 2 {
            return domain("p >= 2 and e_F, f_F >= 1 are required");
        }
        if d_bits.map_or(true, |b| b > MAX_BITS) || t_bits > MAX_BITS || self.e_f > 1 << 16 {
            return capacity("ramification data too large to evaluate exactly");
        }
        Ok(())
    }
}

/// `t(-1) = 0`, `t(0) = 1`, `t(k) = t(k-1) + c_k p^{k f_F}` with `c_k = 2`
/// when `(p - 1) | k` and 1 otherwise. `t[k + 1]` holds `t(k)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JumpSchedule {
    pub t: Vec<BigInt>,
}

impl JumpSchedule {
    pub fn at(&self, k: i64) -> &BigInt {
        &self.t[(k + 1) as usize]
    }
}

/// Lower indices `start < i <= end` on which `|G_i| = p^exponent`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Segment {
    pub start: BigInt,
    pub end: BigInt,
    pub exponent: BigInt,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RamificationProfile {
    pub p: u32,
    pub d: BigInt,
    pub e_f: u128,
    pub f_f: u128,
    pub e_rel: u128,
    pub f_rel: u128,
    pub schedule: JumpSchedule,
    pub segments: Vec<Segment>,
    /// Lower jumps: -1, 0 and `t(0), ..., t(e_F - 1)`.
    pub jumps: Vec<BigInt>,
    /// Some exponent `d - k f_F` is negative.
    pub flagged: bool,
}

impl RamificationProfile {
    /// `|G_{-1}| = p^d e_rel f_rel`.
    pub fn order_minus_one(&self) -> Result<Rational> {
        Ok(rat_pow(self.p, &self.d)? * rat(self.e_rel * self.f_rel))
    }

    /// `|G_0| = p^d e_rel`.
    pub fn order_zero(&self) -> Result<Rational> {
        Ok(rat_pow(self.p, &self.d)? * rat(self.e_rel))
    }

    /// `|G_i|` for an integer `i >= -1`.
    pub fn order_at(&self, i: &BigInt) -> Result<Rational> {
        if *i < BigInt::from(-1) {
            return domain("lower numbering starts at -1");
        }
        if *i == BigInt::from(-1) {
            return self.order_minus_one();
        }
        if i.is_zero() {
            return self.order_zero();
        }
        match self.segments.iter().find(|s| s.start < *i && *i <= s.end) {
            Some(s) => rat_pow(self.p, &s.exponent),
            None => Ok(rat(1)),
        }
    }
}

pub fn jump_schedule(input: &RamifyInput) -> Result<RamificationProfile> {
    input.check_size()?;
    let p = input.p;
    let mut t = vec![BigInt::zero(), BigInt::one()];
    for k in 1..input.e_f {
        let step = num_traits::pow(BigInt::from(p), (k * input.f_f) as usize);
        let factor = if k % (p as u128 - 1) == 0 { 2 } else { 1 };
        let next = t.last().expect("nonempty") + step * factor;
        t.push(next);
    }
    let schedule = JumpSchedule { t };
    let mut segments = Vec::new();
    let mut flagged = false;
    for k in 0..input.e_f as i64 {
        let exponent = &input.d - BigInt::from(k as u128 * input.f_f);
        flagged |= exponent.is_negative();
        segments.push(Segment { start: schedule.at(k - 1).clone(), end: schedule.at(k).clone(), exponent });
    }
    let mut jumps = vec![BigInt::from(-1), BigInt::zero()];
    jumps.extend(schedule.t[1..].iter().cloned());
    jumps.dedup();
    Ok(RamificationProfile {
        p,
        d: input.d.clone(),
        e_f: input.e_f,
        f_f: input.f_f,
        e_rel: input.e_rel,
        f_rel: input.f_rel,
        schedule,
        segments,
        jumps,
        flagged,
    })
}

/// Exact piecewise-linear Herbrand functions. On `[-1, 0]` both are the
/// identity; on `[0, inf)` `phi` has slope `|G_u| / |G_0|` piecewise.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HerbrandMap {
    /// Breakpoints `(u, phi(u))`, starting at `(0, 0)`.
    pub breaks: Vec<(Rational, Rational)>,
    /// Slope of `phi` after each breakpoint.
    pub slopes: Vec<Rational>,
}

impl HerbrandMap {
    /// `steps` lists `(end, |G_u|)` for `u` in `(previous end, end]`;
    /// `tail` is `|G_u|` beyond the last end.
    pub fn from_steps(order0: &Rational, steps: &[(Rational, Rational)], tail: &Rational) -> Self {
        let mut breaks = vec![(rat(0), rat(0))];
        let mut slopes = Vec::new();
        for (end, order) in steps {
            let (u0, v0) = breaks.last().expect("nonempty").clone();
            if *end <= u0 {
                continue;
            }
            let slope = order / order0;
            let v1 = &v0 + (end - &u0) * &slope;
            slopes.push(slope);
            breaks.push((end.clone(), v1));
        }
        slopes.push(tail / order0);
        HerbrandMap { breaks, slopes }
    }

    pub fn phi(&self, u: &Rational) -> Rational {
        if *u <= rat(0) {
            return u.clone();
        }
        let k = self.breaks.iter().rposition(|(b, _)| b <= u).expect("first break is 0");
        let (u0, v0) = &self.breaks[k];
        v0 + (u - u0) * &self.slopes[k]
    }

    pub fn psi(&self, v: &Rational) -> Rational {
        if *v <= rat(0) {
            return v.clone();
        }
        let k = self.breaks.iter().rposition(|(_, b)| b <= v).expect("first break is 0");
        let (u0, v0) = &self.breaks[k];
        u0 + (v - v0) / &self.slopes[k]
    }

    /// Images under `phi` of the lower breakpoints.
    pub fn upper_breaks(&self) -> Vec<Rational> {
        self.breaks.iter().map(|(_, v)| v.clone()).collect()
    }
}

pub fn herbrand_convert(profile: &RamificationProfile) -> Result<HerbrandMap> {
    let order0 = profile.order_zero()?;
    let steps = profile
        .segments
        .iter()
        .map(|s| Ok((Rational::from_integer(s.end.clone()), rat_pow(profile.p, &s.exponent)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(HerbrandMap::from_steps(&order0, &steps, &rat(1)))
}

/// `sum_{i >= 0} (|G_i| - 1)` with the `i = 0` term taken as `[F:K] p^d - 1`,
/// summed segment by segment.
pub fn different_valuation(profile: &RamificationProfile) -> Result<Rational> {
    let degree = rat(profile.e_rel * profile.f_rel);
    let mut total = degree * rat_pow(profile.p, &profile.d)? - rat(1);
    for s in &profile.segments {
        let length = rat(&s.end - &s.start);
        total += length * (rat_pow(profile.p, &s.exponent)? - rat(1));
    }
    Ok(total)
}

/// Term-by-term version of [`different_valuation`], for short filtrations.
pub fn different_valuation_literal(profile: &RamificationProfile) -> Result<Rational> {
    let last = profile.schedule.t.last().expect("nonempty").clone();
    if last > BigInt::from(10_000) {
        return capacity("literal different sum is limited to t <= 10^4");
    }
    let degree = rat(profile.e_rel * profile.f_rel);
    let mut total = degree * rat_pow(profile.p, &profile.d)? - rat(1);
    let mut i = BigInt::one();
    while i <= last {
        total += profile.order_at(&i)? - rat(1);
        i += 1;
    }
    Ok(total)
}

/// The displayed closed form
/// `f_rel (([F:K] - 1 + (p(e_F+1)-1)/(p-1)) p^d - 1 - (p^{n_F}-1)/(p^{f_F}-1) - (p^{n_F}-1)/(p^{(p-1)f_F}-1))`.
pub fn disc_exponent_closed(input: &RamifyInput) -> Result<Rational> {
    input.check_size()?;
    let p = input.p;
    let pm1 = rat(p - 1);
    let pd = rat_pow(p, &input.d)?;
    let n_f = BigInt::from(input.n_f());
    let pn = rat_pow(p, &n_f)? - rat(1);
    let lead = rat(input.degree_f_over_k()) - rat(1) + (rat(p as u128 * (input.e_f + 1)) - rat(1)) / &pm1;
    let first = &pn / (rat_pow(p, &BigInt::from(input.f_f))? - rat(1));
    let second = &pn / (rat_pow(p, &BigInt::from((p as u128 - 1) * input.f_f))? - rat(1));
    Ok(rat(input.f_rel) * (lead * pd - rat(1) - first - second))
}

/// Exact rational rendered as an integer when possible, `a/b` otherwise.
pub fn render(x: &Rational) -> String {
    if x.is_integer() {
        x.to_integer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiscriminantReport {
    pub alpha_closed: Rational,
    pub different_valuation: Rational,
    /// `f_rel * different_valuation`.
    pub alpha_direct: Rational,
    pub agree: bool,
    pub closed_integral: bool,
    /// The underlying profile has negative exponents.
    pub flagged: bool,
}

pub fn discriminant_report(input: &RamifyInput) -> Result<DiscriminantReport> {
    let profile = jump_schedule(input)?;
    let different = different_valuation(&profile)?;
    let alpha_closed = disc_exponent_closed(input)?;
    let alpha_direct = rat(input.f_rel) * &different;
    Ok(DiscriminantReport {
        agree: alpha_closed == alpha_direct,
        closed_integral: alpha_closed.is_integer(),
        alpha_closed,
        different_valuation: different,
        alpha_direct,
        flagged: profile.flagged,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", content = "details", rename_all = "snake_case")]
pub enum Verdict {
    Agree,
    Disagree(String),
    NotRun(String),
}

impl Verdict {
    pub fn is_disagree(&self) -> bool {
        matches!(self, Verdict::Disagree(_))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AuditItem {
    pub id: &'static str,
    pub title: &'static str,
    #[serde(flatten)]
    pub verdict: Verdict,
}

/// One pair where the element count and the closed product differ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PsiDivergence {
    pub a: u128,
    pub b: u128,
    pub count: u128,
    pub product: u128,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuditReport {
    pub items: Vec<AuditItem>,
    pub psi_divergences: Vec<PsiDivergence>,
    pub discriminant: Option<DiscriminantReport>,
}

impl AuditReport {
    pub fn disagreements(&self) -> Vec<&AuditItem> {
        self.items.iter().filter(|i| i.verdict.is_disagree()).collect()
    }
}

/// Bound on `a, b` for the generic part of the `psi` scan.
pub const PSI_GRID: u128 = 16;

/// Pairs `(a, b)` where the count and the product for `psi` differ: every
/// pair used by the per-group census, then all `a, b <= min(p^ell - 1, 16)`.
pub fn psi_divergences(params: &ExtensionParams) -> Result<Vec<PsiDivergence>> {
    let top = params.top_order()?;
    let second = match params.case() {
        CaseTag::EllDividesFk => top,
        CaseTag::EllNotDividesFk => params.p as u128 - 1,
    };
    let mut pairs: Vec<(u128, u128)> = admissible_orders(params)?.into_iter().map(|c| (c, second)).collect();
    let bound = top.min(PSI_GRID);
    for a in 1..=bound {
        for b in 1..=bound {
            pairs.push((a, b));
        }
    }
    let mut seen = std::collections::BTreeSet::new();
    let mut out = Vec::new();
    for (a, b) in pairs {
        if !seen.insert((a, b)) {
            continue;
        }
        let count = order_pair_count(a, b)?;
        let product = paper_psi_product(a, b)?;
        if count != product {
            out.push(PsiDivergence { a, b, count, product });
        }
    }
    Ok(out)
}

fn multiset(mut v: Vec<u128>) -> Vec<u128> {
    v.sort_unstable();
    v
}

/// Cross-checks of the ramification statements against independent routes.
pub fn audit(params: &ExtensionParams, finv: &FInvariants) -> Result<AuditReport> {
    let input = RamifyInput::from_params(params, finv)?;
    let p = params.p;
    let mut items = Vec::new();

    // (a) the drops f_F at every upper jump in the window, against d.
    let window_end = Rational::new(BigInt::from(p as u128 * finv.e_f), BigInt::from(p - 1)) - rat(1);
    let upper_jumps: Vec<u128> = (1u128..)
        .take_while(|t| rat(*t) <= window_end)
        .filter(|t| t % p as u128 != 0)
        .collect();
    let drops = BigInt::from(upper_jumps.len() as u128 * finv.f_f);
    items.push(AuditItem {
        id: "a",
        title: "upper-dimension drops vs d",
        verdict: if drops == input.d {
            Verdict::Agree
        } else {
            Verdict::Disagree(format!(
                "{} jumps of size f_F = {} give {drops}, d = {}",
                upper_jumps.len(),
                finv.f_f,
                input.d
            ))
        },
    });

    // (b) delta profile per level against uniform drops of f_F.
    let verdict_b = match delta_profile(params, finv) {
        Ok(delta) => {
            let measured = multiset(delta.levels.iter().map(|&(_, d)| d as u128).collect());
            let uniform = vec![finv.f_f; delta.levels.len()];
            if measured == uniform {
                Verdict::Agree
            } else {
                Verdict::Disagree(format!(
                    "delta per level {measured:?} vs uniform {} x {}; delta total {} (d = {})",
                    uniform.len(),
                    finv.f_f,
                    delta.total,
                    delta.expected
                ))
            }
        }
        Err(crate::Error::Capacity(msg)) => Verdict::NotRun(msg),
        Err(e) => return Err(e),
    };
    items.push(AuditItem { id: "b", title: "delta profile vs upper-dimension drops", verdict: verdict_b });

    // (c) closed discriminant exponent against f_rel times the different.
    let (verdict_c, discriminant) = match discriminant_report(&input) {
        Ok(r) => {
            let v = if r.agree {
                Verdict::Agree
            } else {
                Verdict::Disagree(format!(
                    "closed {} vs f_rel * different = {}",
                    render(&r.alpha_closed),
                    render(&r.alpha_direct)
                ))
            };
            (v, Some(r))
        }
        Err(crate::Error::Capacity(msg)) => (Verdict::NotRun(msg), None),
        Err(e) => return Err(e),
    };
    items.push(AuditItem { id: "c", title: "closed discriminant vs different sum", verdict: verdict_c });

    // (d) psi count against the closed product.
    let psi = psi_divergences(params)?;
    items.push(AuditItem {
        id: "d",
        title: "psi count vs closed product",
        verdict: if psi.is_empty() {
            Verdict::Agree
        } else {
            let shown: Vec<String> =
                psi.iter().take(8).map(|x| format!("({},{}): {} vs {}", x.a, x.b, x.count, x.product)).collect();
            Verdict::Disagree(format!("{} pairs differ, e.g. {}", psi.len(), shown.join(", ")))
        },
    });
    Ok(AuditReport { items, psi_divergences: psi, discriminant })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modlab::default_f_invariants;
    use proptest::prelude::*;

    fn synthetic() -> RamifyInput {
        RamifyInput { p: 3, e_f: 2, f_f: 1, d: BigInt::from(2), e_rel: 2, f_rel: 1 }
    }

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    fn big(n: i64) -> BigInt {
        BigInt::from(n)
    }

    #[test]
    fn upper_dim_examples() {
        assert_eq!(upper_dim(&q(1, 2), &big(24), 7, 21, 2).unwrap().raw, big(24));
        assert_eq!(upper_dim(&q(3, 2), &big(36), 8, 8, 3).unwrap().raw, big(28));
        let at3 = upper_dim(&q(3, 1), &big(24), 7, 21, 2).unwrap();
        assert_eq!((at3.raw, at3.negative), (big(3), false));
        let at4 = upper_dim(&q(4, 1), &big(24), 7, 21, 2).unwrap();
        assert_eq!((at4.raw, at4.clamped, at4.negative), (big(-18), big(0), true));
        assert_eq!(upper_dim(&q(14, 1), &big(24), 7, 21, 2).unwrap().raw, big(0));
        assert_eq!(upper_dim(&q(-1, 1), &big(24), 7, 21, 2).unwrap().raw, big(24));
        assert!(upper_dim(&q(-3, 2), &big(24), 7, 21, 2).is_err());
    }

    #[test]
    fn synthetic_schedule_and_different() {
        let prof = jump_schedule(&synthetic()).unwrap();
        assert_eq!(prof.schedule.t, vec![big(0), big(1), big(4)]);
        assert_eq!(prof.jumps, vec![big(-1), big(0), big(1), big(4)]);
        assert!(!prof.flagged);
        assert_eq!(different_valuation(&prof).unwrap(), q(31, 1));
        assert_eq!(different_valuation_literal(&prof).unwrap(), q(31, 1));
        let r = discriminant_report(&synthetic()).unwrap();
        assert_eq!(r.alpha_closed, q(39, 1));
        assert_eq!(r.alpha_direct, q(31, 1));
        assert!(!r.agree);
        assert_eq!(&r.alpha_closed - &r.alpha_direct, q(8, 1));
    }

    #[test]
    fn smallest_closed_value() {
        let input = RamifyInput { p: 2, e_f: 1, f_f: 1, d: big(1), e_rel: 1, f_rel: 1 };
        assert_eq!(disc_exponent_closed(&input).unwrap(), q(3, 1));
        let prof = jump_schedule(&input).unwrap();
        assert_eq!(prof.jumps.len(), 3);
    }

    #[test]
    fn jump_count_is_e_f_plus_two() {
        for (p, e_f, f_f) in [(2u32, 5u128, 2u128), (3, 4, 3), (5, 6, 1), (7, 3, 2)] {
            let input = RamifyInput { p, e_f, f_f, d: big(40), e_rel: 3, f_rel: 2 };
            let prof = jump_schedule(&input).unwrap();
            assert_eq!(prof.jumps.len() as u128, e_f + 2);
            assert!(prof.jumps.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn herbrand_trivial_and_cyclic() {
        let one = rat(1);
        let id = HerbrandMap::from_steps(&one, &[], &one);
        for v in [q(-1, 1), q(0, 1), q(7, 3), q(100, 1)] {
            assert_eq!(id.phi(&v), v);
            assert_eq!(id.psi(&v), v);
        }
        let p = rat(5);
        let cyc = HerbrandMap::from_steps(&p, &[(rat(3), p.clone())], &one);
        assert_eq!(cyc.phi(&rat(3)), rat(3));
        assert_eq!(cyc.phi(&rat(8)), rat(4));
        assert_eq!(cyc.psi(&rat(4)), rat(8));
    }

    #[test]
    fn herbrand_of_synthetic_profile() {
        let prof = jump_schedule(&synthetic()).unwrap();
        let h = herbrand_convert(&prof).unwrap();
        // |G_0| = 18, |G_1| = 9, |G_2..4| = 3
        assert_eq!(h.phi(&rat(1)), q(1, 2));
        assert_eq!(h.phi(&rat(4)), q(1, 2) + q(3, 6));
        assert_eq!(h.upper_breaks(), vec![rat(0), q(1, 2), rat(1)]);
    }

    #[test]
    fn audit_at_two_three() {
        let params = ExtensionParams::new(2, 3, 1, 1).unwrap();
        let finv = default_f_invariants(&params).unwrap();
        let report = audit(&params, &finv).unwrap();
        let ids: Vec<&str> = report.disagreements().iter().map(|i| i.id).collect();
        assert_eq!(ids, vec!["a", "b", "c", "d"]);
        match &report.items[1].verdict {
            Verdict::Disagree(msg) => assert!(msg.contains("[3, 3, 3, 3, 3, 3, 6]"), "{msg}"),
            v => panic!("{v:?}"),
        }
        assert!(report.psi_divergences.contains(&PsiDivergence { a: 4, b: 2, count: 4, product: 6 }));
        let disc = report.discriminant.unwrap();
        assert!(disc.flagged);
    }

    #[test]
    fn literal_sum_refuses_long_filtrations() {
        let input = RamifyInput { p: 2, e_f: 20, f_f: 1, d: big(30), e_rel: 1, f_rel: 1 };
        let prof = jump_schedule(&input).unwrap();
        assert!(different_valuation_literal(&prof).is_err());
        assert!(different_valuation(&prof).is_ok());
    }

    proptest! {
        #[test]
        fn segment_sum_equals_literal_sum(p in prop::sample::select(vec![2u32, 3, 5, 7]),
                                          e_f in 1u128..6, f_f in 1u128..3,
                                          d in 0i64..14, e_rel in 1u128..5, f_rel in 1u128..4) {
            let input = RamifyInput { p, e_f, f_f, d: big(d), e_rel, f_rel };
            let prof = jump_schedule(&input).unwrap();
            prop_assume!(*prof.schedule.t.last().unwrap() <= big(10_000));
            prop_assert_eq!(different_valuation(&prof).unwrap(), different_valuation_literal(&prof).unwrap());
        }

        #[test]
        fn herbrand_round_trip(p in prop::sample::select(vec![2u32, 3, 5]), e_f in 1u128..5,
                               f_f in 1u128..3, d in 0i64..10, e_rel in 1u128..4,
                               num in -8i64..4000, den in 1i64..9) {
            let input = RamifyInput { p, e_f, f_f, d: big(d), e_rel, f_rel: 1 };
            let h = herbrand_convert(&jump_schedule(&input).unwrap()).unwrap();
            let u = q(num, den).max(rat(-1));
            prop_assert_eq!(h.psi(&h.phi(&u)), u.clone());
            prop_assert_eq!(h.phi(&h.psi(&u)), u);
        }
    }
}
