use crate::error::{capacity, domain, Result};
use crate::linalg::{FpMatrix, Subspace};
use rayon::prelude::*;
use std::collections::BTreeSet;

/// Largest ambient dimension accepted by [`spin`].
pub const SPIN_MAX_DIM: usize = 64;
/// Largest `p^dim` accepted by exhaustive enumeration.
pub const EXHAUSTIVE_LIMIT: u128 = 1 << 24;

/// A finite-dimensional `F_p`-representation given by generator matrices,
/// optionally split into labelled coordinate segments (one per level).
#[derive(Debug, Clone)]
pub struct ModuleAction {
    p: u32,
    dim: usize,
    gens: Vec<FpMatrix>,
    segments: Vec<(u128, usize, usize)>,
}

impl ModuleAction {
    pub fn new(p: u32, gens: Vec<FpMatrix>) -> Result<Self> {
        let dim = gens.first().map_or(0, FpMatrix::rows);
        if gens.iter().any(|g| !g.is_square() || g.rows() != dim || g.characteristic() != p) {
            return domain("generators must be square matrices of one size over F_p");
        }
        Ok(ModuleAction { p, dim, gens, segments: Vec::new() })
    }

    /// A single labelled segment covering the whole space.
    pub fn with_label(mut self, label: u128) -> Self {
        self.segments = vec![(label, 0, self.dim)];
        self
    }

    /// External direct sum, keeping the segments of each summand in order.
    pub fn direct_sum(parts: &[ModuleAction]) -> Result<Self> {
        let first = parts.first().ok_or_else(|| crate::Error::Domain("empty direct sum".into()))?;
        let ngens = first.gens.len();
        if parts.iter().any(|m| m.p != first.p || m.gens.len() != ngens) {
            return domain("summands must share the field and the number of generators");
        }
        let gens = (0..ngens)
            .map(|k| FpMatrix::direct_sum(&parts.iter().map(|m| m.gens[k].clone()).collect::<Vec<_>>()))
            .collect();
        let mut segments = Vec::new();
        let mut offset = 0;
        for m in parts {
            for &(label, off, len) in &m.segments {
                segments.push((label, offset + off, len));
            }
            offset += m.dim;
        }
        Ok(ModuleAction { p: first.p, dim: offset, gens, segments })
    }

    /// The action restricted to an invariant subspace, on its echelon basis.
    pub fn restrict(&self, sub: &Subspace) -> Result<Self> {
        let gens = self.gens.iter().map(|g| sub.restrict(g)).collect::<Result<Vec<_>>>()?;
        Ok(ModuleAction { p: self.p, dim: sub.dim(), gens, segments: Vec::new() })
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn gens(&self) -> &[FpMatrix] {
        &self.gens
    }

    /// Labels of the segments on which some basis vector of `sub` is nonzero.
    pub fn support(&self, sub: &Subspace) -> BTreeSet<u128> {
        self.segments
            .iter()
            .filter(|&&(_, off, len)| sub.basis().iter().any(|b| b[off..off + len].iter().any(|&x| x != 0)))
            .map(|&(label, _, _)| label)
            .collect()
    }

    pub fn is_invariant(&self, sub: &Subspace) -> bool {
        sub.basis().iter().all(|b| self.gens.iter().all(|g| sub.contains(&g.apply(b))))
    }
}

/// An invariant subspace together with the levels it touches.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Submodule {
    pub basis: Subspace,
    pub level_support: BTreeSet<u128>,
}

/// Smallest invariant subspace containing `seed`, or `None` once its dimension
/// exceeds `max_dim`.
pub fn spin_bounded(seed: &[u32], module: &ModuleAction, max_dim: usize) -> Option<Subspace> {
    let mut sub = Subspace::zero(module.p, module.dim);
    if !sub.insert(seed) {
        return Some(sub);
    }
    let mut queue = vec![seed.to_vec()];
    let mut image = vec![0u32; module.dim];
    while let Some(x) = queue.pop() {
        for g in &module.gens {
            g.apply_into(&x, &mut image);
            if sub.insert(&image) {
                if sub.dim() > max_dim {
                    return None;
                }
                queue.push(image.clone());
            }
        }
    }
    Some(sub)
}

pub fn spin(seed: &[u32], module: &ModuleAction) -> Result<Subspace> {
    if module.dim > SPIN_MAX_DIM {
        return capacity(format!("spin is limited to dimension {SPIN_MAX_DIM}, got {}", module.dim));
    }
    if seed.len() != module.dim || seed.iter().all(|&x| x % module.p == 0) {
        return domain("seed must be a nonzero vector of the ambient dimension");
    }
    Ok(spin_bounded(seed, module, module.dim).expect("bound is the ambient dimension"))
}

/// True when every nonzero vector of `sub` spins to `sub`.
pub fn is_irreducible(sub: &Subspace, module: &ModuleAction) -> bool {
    let k = sub.dim();
    if k == 0 {
        return false;
    }
    crate::linalg::projective_points(module.p, k).all(|c| {
        let w = sub.combine(&c);
        spin_bounded(&w, module, k).as_ref() == Some(sub)
    })
}

fn seed_count(p: u32, dim: usize) -> Result<u128> {
    let total = (p as u128).checked_pow(dim as u32).unwrap_or(u128::MAX);
    if total > EXHAUSTIVE_LIMIT {
        return capacity(format!(
            "exhaustive enumeration needs p^dim <= 2^24 (got {p}^{dim}); enumerate per component instead"
        ));
    }
    Ok(total)
}

const CHUNK: u128 = 1 << 14;

/// All irreducible invariant subspaces of dimension `target_dim`, by spinning
/// every line of the ambient space.
pub fn enumerate_irreducible_submodules(module: &ModuleAction, target_dim: usize) -> Result<BTreeSet<Submodule>> {
    let total = seed_count(module.p, module.dim)?;
    if target_dim == 0 || target_dim > module.dim {
        return Ok(BTreeSet::new());
    }
    let candidates: BTreeSet<Subspace> = if module.p == 2 && module.dim <= 64 {
        packed::candidates(module, target_dim, total)
    } else {
        generic_candidates(module, target_dim, total)
    };
    Ok(candidates
        .into_iter()
        .filter(|s| is_irreducible(s, module))
        .map(|basis| Submodule { level_support: module.support(&basis), basis })
        .collect())
}

/// Number of irreducible invariant subspaces of dimension `target_dim`, by
/// spinning every line. Each subspace is counted at the seed equal to its
/// first echelon row, so nothing is stored.
pub fn count_irreducible_submodules(module: &ModuleAction, target_dim: usize) -> Result<u128> {
    let total = seed_count(module.p, module.dim)?;
    if target_dim == 0 || target_dim > module.dim {
        return Ok(0);
    }
    let p = module.p as u128;
    let n = module.dim;
    let chunks: Vec<u128> = (0..total.div_ceil(CHUNK)).collect();
    Ok(chunks
        .into_par_iter()
        .map(|c| {
            let mut found = 0u128;
            let mut v = vec![0u32; n];
            for code in (c * CHUNK).max(1)..((c + 1) * CHUNK).min(total) {
                let mut x = code;
                for slot in v.iter_mut() {
                    *slot = (x % p) as u32;
                    x /= p;
                }
                if v.iter().find(|&&d| d != 0) != Some(&1) {
                    continue;
                }
                if let Some(sub) = spin_bounded(&v, module, target_dim) {
                    if sub.dim() == target_dim
                        && sub.basis()[0] == v
                        && (target_dim == 1 || is_irreducible(&sub, module))
                    {
                        found += 1;
                    }
                }
            }
            found
        })
        .sum())
}

fn generic_candidates(module: &ModuleAction, target_dim: usize, total: u128) -> BTreeSet<Subspace> {
    let p = module.p as u128;
    let n = module.dim;
    let chunks: Vec<u128> = (0..total.div_ceil(CHUNK)).collect();
    chunks
        .into_par_iter()
        .map(|c| {
            let mut found = BTreeSet::new();
            let mut v = vec![0u32; n];
            for code in (c * CHUNK).max(1)..((c + 1) * CHUNK).min(total) {
                let mut x = code;
                for slot in v.iter_mut() {
                    *slot = (x % p) as u32;
                    x /= p;
                }
                if v.iter().find(|&&d| d != 0) != Some(&1) {
                    continue;
                }
                if let Some(sub) = spin_bounded(&v, module, target_dim) {
                    if sub.dim() == target_dim {
                        found.insert(sub);
                    }
                }
            }
            found
        })
        .reduce(BTreeSet::new, |mut a, b| {
            a.extend(b);
            a
        })
}

mod packed {
    use super::*;

    // Vectors of F_2^n as bit masks; bit k is coordinate k.
    struct PackedMatrix {
        columns: Vec<u64>,
    }

    impl PackedMatrix {
        fn from(m: &FpMatrix) -> Self {
            let columns = (0..m.cols())
                .map(|c| (0..m.rows()).fold(0u64, |acc, r| acc | ((m.get(r, c) as u64 & 1) << r)))
                .collect();
            PackedMatrix { columns }
        }

        fn apply(&self, mut x: u64) -> u64 {
            let mut out = 0;
            while x != 0 {
                let k = x.trailing_zeros() as usize;
                out ^= self.columns[k];
                x &= x - 1;
            }
            out
        }
    }

    // Basis kept with distinct lowest set bits; reduction clears those bits.
    fn reduce(basis: &[u64], mut x: u64) -> u64 {
        for &b in basis {
            if x & (b & b.wrapping_neg()) != 0 {
                x ^= b;
            }
        }
        x
    }

    fn spin(gens: &[PackedMatrix], seed: u64, max_dim: usize, basis: &mut Vec<u64>) -> bool {
        basis.clear();
        basis.push(seed);
        let mut head = 0;
        while head < basis.len() {
            let x = basis[head];
            head += 1;
            for g in gens {
                let y = reduce(basis, g.apply(x));
                if y != 0 {
                    // Keep lowest bits distinct: clear y's lowest bit from older entries.
                    let low = y & y.wrapping_neg();
                    for b in basis.iter_mut() {
                        if *b & low != 0 {
                            *b ^= y;
                        }
                    }
                    basis.push(y);
                    if basis.len() > max_dim {
                        return false;
                    }
                }
            }
        }
        true
    }

    pub(super) fn candidates(module: &ModuleAction, target_dim: usize, total: u128) -> BTreeSet<Subspace> {
        let gens: Vec<PackedMatrix> = module.gens.iter().map(PackedMatrix::from).collect();
        let n = module.dim;
        let chunks: Vec<u128> = (0..total.div_ceil(CHUNK)).collect();
        chunks
            .into_par_iter()
            .map(|c| {
                let mut found: BTreeSet<Vec<u64>> = BTreeSet::new();
                let mut basis = Vec::with_capacity(target_dim + 2);
                for code in (c * CHUNK).max(1)..((c + 1) * CHUNK).min(total) {
                    if spin(&gens, code as u64, target_dim, &mut basis) && basis.len() == target_dim {
                        found.insert(canonical(&basis));
                    }
                }
                found
            })
            .reduce(BTreeSet::new, |mut a, b| {
                a.extend(b);
                a
            })
            .into_iter()
            .map(|basis| {
                let vectors = basis
                    .iter()
                    .map(|&b| (0..n).map(|k| ((b >> k) & 1) as u32).collect())
                    .collect();
                Subspace::span(2, n, vectors)
            })
            .collect()
    }

    // Fully reduced basis sorted by lowest bit: a unique key per subspace.
    fn canonical(basis: &[u64]) -> Vec<u64> {
        let mut rows: Vec<u64> = basis.to_vec();
        rows.sort_by_key(|b| b.trailing_zeros());
        for i in 0..rows.len() {
            let low = rows[i] & rows[i].wrapping_neg();
            for j in 0..rows.len() {
                if j != i && rows[j] & low != 0 {
                    rows[j] ^= rows[i];
                }
            }
        }
        rows
    }
}
