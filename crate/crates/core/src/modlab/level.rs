use super::finv::FInvariants;
use crate::arith::{gcd, lcm, multiplicative_order};
use crate::census::ExtensionParams;
use crate::error::{capacity, invariant, Error, Result};
use crate::ffield::{make_field_with_ceiling, FieldCtx, FieldElement};
use crate::linalg::{FpMatrix, Subspace};
use std::collections::BTreeSet;

/// Largest auxiliary field used to hold both the residue field and the roots
/// of unity of order `f_rel`.
pub const OMEGA_CEILING: u128 = 1 << 64;

/// The residue field `kappa = F_{p^{f_F}}`, realized inside a larger field
/// `Omega` that also contains the `f_rel`-th roots of unity. Coordinates are
/// taken on the basis `theta^j` (`j < f_F`), `theta` a generator of `kappa^*`.
#[derive(Debug, Clone)]
pub struct ResidueField {
    omega: FieldCtx,
    f_f: usize,
    theta_powers: Vec<FieldElement>,
    pivot_rows: Vec<usize>,
    extractor: FpMatrix,
    zeta: FieldElement,
    eta: FieldElement,
}

impl ResidueField {
    pub fn new(p: u32, f_f: u128, e: u128, f: u128) -> Result<Self> {
        let f_f_u32 = u32::try_from(f_f).map_err(|_| Error::Capacity("f_F too large".into()))?;
        let degree = lcm(f_f, multiplicative_order(p as u128, f)?);
        let degree = u32::try_from(degree).map_err(|_| Error::Capacity("auxiliary field too large".into()))?;
        let omega = make_field_with_ceiling(p, degree, OMEGA_CEILING)?;
        let kappa_units = (p as u128).checked_pow(f_f_u32).ok_or_else(|| Error::Capacity("kappa too large".into()))? - 1;
        if kappa_units % e != 0 {
            return invariant(format!("e = {e} does not divide |kappa^*| = {kappa_units}"));
        }
        let theta = omega.pow(omega.generator(), omega.unit_order() / kappa_units);
        let mut theta_powers = Vec::with_capacity(f_f as usize);
        let mut x = omega.one();
        for _ in 0..f_f {
            theta_powers.push(x.clone());
            x = omega.mul(&x, &theta);
        }
        // Rows of the coordinate matrix on which the theta-basis is independent.
        let m = degree as usize;
        let columns: Vec<Vec<u32>> = theta_powers.iter().map(|t| t.coeffs().to_vec()).collect();
        let theta_mat = FpMatrix::from_columns(p, m, &columns);
        let mut rows = Subspace::zero(p, f_f as usize);
        let mut pivot_rows = Vec::new();
        for r in 0..m {
            if rows.insert(theta_mat.row(r)) {
                pivot_rows.push(r);
            }
        }
        if pivot_rows.len() != f_f as usize {
            return invariant("powers of theta are not independent");
        }
        let square: Vec<Vec<u32>> = pivot_rows.iter().map(|&r| theta_mat.row(r).to_vec()).collect();
        let extractor = FpMatrix::from_rows(p, &square).inverse()?;
        let zeta = omega.pow(omega.generator(), omega.unit_order() / e);
        let eta = omega.pow(omega.generator(), omega.unit_order() / f);
        Ok(ResidueField { omega, f_f: f_f as usize, theta_powers, pivot_rows, extractor, zeta, eta })
    }

    pub fn omega(&self) -> &FieldCtx {
        &self.omega
    }

    pub fn dim(&self) -> usize {
        self.f_f
    }

    /// Fixed primitive `e`-th root of unity in `kappa`.
    pub fn zeta(&self) -> &FieldElement {
        &self.zeta
    }

    /// Fixed primitive `f`-th root of unity in `Omega`.
    pub fn eta(&self) -> &FieldElement {
        &self.eta
    }

    /// Coordinates of `y` on the theta-basis; fails if `y` is not in `kappa`.
    pub fn coords(&self, y: &FieldElement) -> Result<Vec<u32>> {
        let picked: Vec<u32> = self.pivot_rows.iter().map(|&r| y.coeffs()[r]).collect();
        let x = self.extractor.apply(&picked);
        if self.element(&x) != *y {
            return invariant("element does not lie in the residue field");
        }
        Ok(x)
    }

    pub fn element(&self, coords: &[u32]) -> FieldElement {
        let o = &self.omega;
        coords
            .iter()
            .zip(&self.theta_powers)
            .fold(o.zero(), |acc, (&c, t)| if c == 0 { acc } else { o.add(&acc, &o.scale(t, c)) })
    }

    /// Matrix of an `F_p`-linear map of `kappa` on the theta-basis.
    pub fn linear_map(&self, map: impl Fn(&FieldElement) -> FieldElement) -> Result<FpMatrix> {
        let columns = self
            .theta_powers
            .iter()
            .map(|t| self.coords(&map(t)))
            .collect::<Result<Vec<_>>>()?;
        Ok(FpMatrix::from_columns(self.omega.characteristic(), self.f_f, &columns))
    }

    pub fn multiplication(&self, c: &FieldElement) -> Result<FpMatrix> {
        self.linear_map(|x| self.omega.mul(c, x))
    }
}

/// `M_i = kappa` with `tau` acting by `zeta^i` and `v` by `x -> x^q`.
#[derive(Debug, Clone)]
pub struct LevelModule {
    pub level: u128,
    pub alpha_exp: u128,
    pub tau: FpMatrix,
    pub v: FpMatrix,
}

/// Shared data for all levels of one parameter set.
#[derive(Debug, Clone)]
pub struct LevelContext {
    pub params: ExtensionParams,
    pub finv: FInvariants,
    pub field: ResidueField,
    pub v: FpMatrix,
    pub q_mod_e: u128,
}

impl LevelContext {
    pub fn new(params: &ExtensionParams, finv: &FInvariants) -> Result<Self> {
        let field = ResidueField::new(params.p, finv.f_f, finv.e_rel, finv.f_rel)?;
        let omega = field.omega().clone();
        let v = field.linear_map(|x| {
            let mut y = x.clone();
            for _ in 0..params.f_k {
                y = omega.frobenius(&y);
            }
            y
        })?;
        let q_mod_e = (0..params.f_k).fold(1 % finv.e_rel, |acc, _| acc * params.p as u128 % finv.e_rel);
        Ok(LevelContext { params: *params, finv: finv.clone(), field, v, q_mod_e })
    }

    pub fn level(&self, i: u128) -> Result<LevelModule> {
        let a = i % self.finv.e_rel;
        let alpha = self.field.omega().pow(self.field.zeta(), a);
        Ok(LevelModule { level: i, alpha_exp: a, tau: self.field.multiplication(&alpha)?, v: self.v.clone() })
    }
}

/// Canonical label of an isotypic piece: the least exponent pair `(a, b)`
/// (`alpha = zeta^a`, `beta = eta^b`) in the orbit under
/// `(a, b) -> (a p, b p)` and `(a, b) -> (a q, b)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ConstituentKey {
    pub alpha_exp: u128,
    pub beta_exp: u128,
}

pub(crate) fn canonical_key(a: u128, b: u128, p: u128, q: u128, e: u128, f: u128) -> ConstituentKey {
    let start = (a % e, b % f);
    let mut seen = BTreeSet::from([start]);
    let mut stack = vec![start];
    while let Some((x, y)) = stack.pop() {
        for next in [(x * p % e, y * p % f), (x * q % e, y)] {
            if seen.insert(next) {
                stack.push(next);
            }
        }
    }
    let (alpha_exp, beta_exp) = *seen.iter().next().expect("orbit is nonempty");
    ConstituentKey { alpha_exp, beta_exp }
}

#[derive(Debug, Clone)]
pub struct Constituent {
    pub level: u128,
    pub key: ConstituentKey,
    /// Exponents `b` (of `eta`) in the `p^g`-orbit of `beta`.
    pub beta_orbit: Vec<u128>,
    pub r: u128,
    pub w: u128,
    pub g: u128,
    pub s: u128,
    /// Degree of the endomorphism field, `lcm(w, g)`.
    pub d: u128,
    /// `F_p`-dimension of one irreducible copy, `lcm(r w / g, r)`.
    pub dim: usize,
    /// Number of copies inside this level, measured as `dim(component) / dim`.
    pub multiplicity_in_level: usize,
    /// `s n_K`, the expected number of copies over all levels.
    pub global_multiplicity: u128,
    /// The isotypic component inside the level, `ker h(v^s)`.
    pub component: Subspace,
}

/// Splits `M_i` into isotypic components, one per `p^g`-orbit of `beta`.
pub fn constituents(ctx: &LevelContext, module: &LevelModule) -> Result<Vec<Constituent>> {
    let p = ctx.params.p as u128;
    let e = ctx.finv.e_rel;
    let f = ctx.finv.f_rel;
    let f_k = ctx.params.f_k as u128;
    let omega = ctx.field.omega();
    let a = module.alpha_exp;
    let ord_alpha = e / gcd(a, e);
    let r = multiplicative_order(p, ord_alpha)?;
    let g = gcd(r, f_k);
    let s = r / g;
    let n = f / gcd(f, s);
    let step = f / n;
    let pg = (0..g).fold(1 % f, |acc, _| acc * p % f);
    let b_op = module.v.pow(s);
    let dim = ctx.field.dim();
    let mut b_powers = vec![FpMatrix::identity(ctx.params.p, dim)];

    let mut remaining: BTreeSet<u128> = (0..n).map(|k| k * step).collect();
    let mut out = Vec::new();
    let mut total = 0usize;
    while let Some(&b0) = remaining.iter().next() {
        let mut orbit = vec![b0];
        let mut x = b0 * pg % f;
        while x != b0 {
            orbit.push(x);
            x = x * pg % f;
        }
        for b in &orbit {
            remaining.remove(b);
        }
        orbit.sort_unstable();

        // h(t) = prod (t - eta^b), coefficients lowest degree first.
        let mut h = vec![omega.one()];
        for &b in &orbit {
            let root = omega.pow(ctx.field.eta(), b);
            let mut next = vec![omega.zero(); h.len() + 1];
            for (k, c) in h.iter().enumerate() {
                next[k + 1] = omega.add(&next[k + 1], c);
                next[k] = omega.sub(&next[k], &omega.mul(c, &root));
            }
            h = next;
        }
        while b_powers.len() < h.len() {
            let last = b_powers.last().expect("nonempty").mul(&b_op);
            b_powers.push(last);
        }
        let mut h_of_b = FpMatrix::zeros(ctx.params.p, dim, dim);
        for (k, c) in h.iter().enumerate() {
            if omega.is_zero(c) {
                continue;
            }
            h_of_b = h_of_b.add(&ctx.field.multiplication(c)?.mul(&b_powers[k]));
        }
        let component = h_of_b.kernel();

        let ord_beta = f / gcd(b0, f);
        let w = multiplicative_order(p, ord_beta)?;
        let d = lcm(w, g);
        if orbit.len() as u128 != d / g {
            return invariant(format!("beta orbit of size {} but lcm(w,g)/g = {}", orbit.len(), d / g));
        }
        let x_dim = lcm(r * w / g, r) as usize;
        if x_dim != r as usize * orbit.len() || component.dim() % x_dim != 0 {
            return invariant(format!(
                "level {}: component of dimension {} is not a multiple of {x_dim}",
                module.level,
                component.dim()
            ));
        }
        total += component.dim();
        out.push(Constituent {
            level: module.level,
            key: canonical_key(a, b0, p, ctx.q_mod_e, e, f),
            beta_orbit: orbit,
            r,
            w,
            g,
            s,
            d,
            dim: x_dim,
            multiplicity_in_level: component.dim() / x_dim,
            global_multiplicity: s * ctx.params.n_k() as u128,
            component,
        });
    }
    if total != dim {
        return invariant(format!("level {}: components add up to {total}, not f_F = {dim}", module.level));
    }
    Ok(out)
}

/// Refuses residue fields whose modules are too large to handle as dense matrices.
pub fn check_level_size(finv: &FInvariants) -> Result<()> {
    if finv.f_f > 512 {
        return capacity(format!("f_F = {} is too large for explicit level modules", finv.f_f));
    }
    Ok(())
}
