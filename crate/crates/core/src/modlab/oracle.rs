use super::finv::{level_indices, FInvariants};
use super::level::{check_level_size, constituents, Constituent, ConstituentKey, LevelContext, LevelModule};
use super::spin::{is_irreducible, spin_bounded, ModuleAction};
use crate::census::{degree_exponent, CensusEntry, CensusReport, ExtensionParams};
use crate::error::{domain, invariant, Result};
use crate::ffield::{make_field, FieldCtx};
use crate::groups::{classify_generated, Classification, GroupKey};
use crate::linalg::{projective_points, FpMatrix, Subspace};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use std::collections::BTreeMap;

/// `(p^{d m} - 1) / (p^d - 1)`: the number of submodules isomorphic to `X`
/// inside `X^m` when `End(X) = F_{p^d}`.
pub fn subspace_count_law(d: u32, mult: u32, p: u32) -> Result<BigInt> {
    if d == 0 || mult == 0 {
        return domain("subspace_count_law needs d, mult >= 1");
    }
    let pd = num_traits::pow(BigInt::from(p), d as usize);
    let num = num_traits::pow(pd.clone(), mult as usize) - BigInt::one();
    let den = pd - BigInt::one();
    if !(&num % &den).is_zero() {
        return invariant("geometric sum is not integral");
    }
    Ok(num / den)
}

/// `X^mult` where `X = F_{p^d}` with a field generator acting by
/// multiplication, so that `End(X) = F_{p^d}` and `dim X = d`.
pub fn synthetic_block(p: u32, d: u32, mult: usize) -> Result<ModuleAction> {
    if mult == 0 {
        return domain("synthetic_block needs mult >= 1");
    }
    let field = make_field(p, d)?;
    let columns = (0..d as usize)
        .map(|i| {
            let mut e = vec![0; d as usize];
            e[i] = 1;
            Ok(field.mul(field.generator(), &field.from_coeffs(&e)?).coeffs().to_vec())
        })
        .collect::<Result<Vec<_>>>()?;
    let one = FpMatrix::from_columns(p, d as usize, &columns);
    ModuleAction::new(p, vec![FpMatrix::direct_sum(&vec![one; mult])])
}

/// Every level module with its isotypic decomposition.
#[derive(Debug, Clone)]
pub struct LevelScan {
    pub ctx: LevelContext,
    pub levels: Vec<(LevelModule, Vec<Constituent>)>,
}

pub fn scan_levels(params: &ExtensionParams, finv: &FInvariants) -> Result<LevelScan> {
    check_level_size(finv)?;
    let ctx = LevelContext::new(params, finv)?;
    let levels = level_indices(finv, params.p)
        .into_iter()
        .map(|i| {
            let module = ctx.level(i)?;
            let parts = constituents(&ctx, &module)?;
            Ok((module, parts))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(LevelScan { ctx, levels })
}

impl LevelScan {
    pub fn action(&self, module: &LevelModule) -> Result<ModuleAction> {
        Ok(ModuleAction::new(self.ctx.params.p, vec![module.tau.clone(), module.v.clone()])?.with_label(module.level))
    }

    /// Constituents of `F_p`-dimension `ell`, grouped by canonical key.
    pub fn dim_ell_keys(&self) -> BTreeMap<ConstituentKey, Vec<(&LevelModule, &Constituent)>> {
        let ell = self.ctx.params.ell as usize;
        let mut map: BTreeMap<ConstituentKey, Vec<(&LevelModule, &Constituent)>> = BTreeMap::new();
        for (module, parts) in &self.levels {
            for c in parts.iter().filter(|c| c.dim == ell) {
                map.entry(c.key).or_default().push((module, c));
            }
        }
        map
    }

    /// Direct sum over levels of the isotypic components with the given key.
    pub fn isotypic_block(&self, key: ConstituentKey) -> Result<ModuleAction> {
        let parts = self
            .levels
            .iter()
            .flat_map(|(m, cs)| cs.iter().filter(|c| c.key == key).map(move |c| (m, c)))
            .map(|(m, c)| {
                let restricted = self.action(m)?.restrict(&c.component)?;
                Ok(restricted.with_label(m.level))
            })
            .collect::<Result<Vec<_>>>()?;
        if parts.is_empty() {
            return domain("no constituent carries this key");
        }
        ModuleAction::direct_sum(&parts)
    }
}

/// Classifies the image of `H` on an `ell`-dimensional invariant subspace.
pub fn classify_submodule(
    sub: &Subspace,
    module: &ModuleAction,
    params: &ExtensionParams,
    ctx_ell: &FieldCtx,
) -> Result<Classification> {
    let ell = params.ell as usize;
    if ell < 2 || sub.dim() != ell {
        return domain(format!("classification needs a subspace of dimension ell = {ell}"));
    }
    if module.gens().len() != 2 {
        return domain("module must be given by the images of tau and v");
    }
    let tau = sub.restrict(&module.gens()[0])?;
    let v = sub.restrict(&module.gens()[1])?;
    classify_generated(ctx_ell, &tau, &v, params.f_k % params.ell)
}

/// First irreducible `ell`-dimensional submodule found by spinning the lines
/// of `module` in order.
pub fn find_irreducible(module: &ModuleAction, ell: usize) -> Option<Subspace> {
    projective_points(module.characteristic(), module.dim()).find_map(|seed| {
        let sub = spin_bounded(&seed, module, ell)?;
        (sub.dim() == ell && is_irreducible(&sub, module)).then_some(sub)
    })
}

#[derive(Debug, Clone)]
pub struct OracleComponent {
    pub key: ConstituentKey,
    pub dim: usize,
    pub end_degree: u128,
    pub levels: Vec<u128>,
    /// Copies of `X` over all levels, measured.
    pub multiplicity: u128,
    /// `s n_K`.
    pub expected_multiplicity: u128,
    pub count: BigInt,
    pub group: GroupKey,
}

#[derive(Debug, Clone)]
pub struct OracleReport {
    pub census: CensusReport,
    pub components: Vec<OracleComponent>,
    pub finv: FInvariants,
    /// Every measured multiplicity equals `s n_K` and every key occurs on
    /// `r e_K` levels.
    pub multiplicity_ok: bool,
}

/// Census rebuilt from the explicit modules: one entry per isotypic type of
/// dimension `ell`, counted by the subspace law and classified on a spun
/// representative.
pub fn oracle_census(params: &ExtensionParams, finv: &FInvariants) -> Result<OracleReport> {
    let scan = scan_levels(params, finv)?;
    oracle_from_scan(&scan)
}

pub fn oracle_from_scan(scan: &LevelScan) -> Result<OracleReport> {
    let params = scan.ctx.params;
    let ctx_ell = make_field(params.p, params.ell)?;
    let ell = params.ell as usize;
    let mut components = Vec::new();
    let mut multiplicity_ok = true;
    for (key, occurrences) in scan.dim_ell_keys() {
        let (module, first) = occurrences[0];
        let multiplicity: u128 = occurrences.iter().map(|(_, c)| c.multiplicity_in_level as u128).sum();
        let levels: Vec<u128> = occurrences.iter().map(|(m, _)| m.level).collect();
        let expected = first.global_multiplicity;
        if multiplicity != expected || levels.len() as u128 != first.r * params.e_k as u128 {
            multiplicity_ok = false;
        }
        let d = u32::try_from(first.d).map_err(|_| crate::Error::Capacity("end degree too large".into()))?;
        let m = u32::try_from(multiplicity).map_err(|_| crate::Error::Capacity("multiplicity too large".into()))?;
        let count = subspace_count_law(d, m, params.p)?;

        let local = scan.action(module)?.restrict(&first.component)?;
        let rep = find_irreducible(&local, ell)
            .ok_or_else(|| crate::Error::Invariant(format!("no irreducible submodule in component {key:?}")))?;
        let group = classify_submodule(&rep, &local, &params, &ctx_ell)?.key;
        components.push(OracleComponent {
            key,
            dim: first.dim,
            end_degree: first.d,
            levels,
            multiplicity,
            expected_multiplicity: expected,
            count,
            group,
        });
    }
    let mut by_key: BTreeMap<GroupKey, BigInt> = BTreeMap::new();
    for c in &components {
        *by_key.entry(c.group).or_insert_with(BigInt::zero) += &c.count;
    }
    let total: BigInt = by_key.values().sum();
    let census = CensusReport {
        total,
        case_tag: params.case(),
        by_group: by_key.into_iter().map(|(key, count)| CensusEntry { key, count }).collect(),
        identity_ok: true,
    };
    Ok(OracleReport { census, components, finv: scan.ctx.finv.clone(), multiplicity_ok })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeltaProfile {
    /// `(level, dim of the span of the ell-dimensional irreducibles there)`.
    pub levels: Vec<(u128, usize)>,
    pub total: BigInt,
    pub expected: BigInt,
    pub matches: bool,
}

pub fn delta_profile(params: &ExtensionParams, finv: &FInvariants) -> Result<DeltaProfile> {
    delta_from_scan(&scan_levels(params, finv)?)
}

pub fn delta_from_scan(scan: &LevelScan) -> Result<DeltaProfile> {
    let ell = scan.ctx.params.ell as usize;
    let levels: Vec<(u128, usize)> = scan
        .levels
        .iter()
        .map(|(m, cs)| {
            let dim = cs.iter().filter(|c| c.dim == ell).map(|c| c.dim * c.multiplicity_in_level).sum();
            (m.level, dim)
        })
        .collect();
    let total = BigInt::from(levels.iter().map(|&(_, d)| d).sum::<usize>());
    let expected = degree_exponent(&scan.ctx.params)?.exponent;
    Ok(DeltaProfile { matches: total == expected, levels, total, expected })
}
