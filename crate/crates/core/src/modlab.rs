//! Explicit `F_p[H]`-modules of the residue levels, their isotypic
//! decomposition, submodule spinning, and the census rebuilt from them.

mod finv;
mod level;
mod oracle;
mod spin;

pub use finv::{
    build_h, default_f_invariants, level_indices, override_f_invariants, FInvariantSource, FInvariants,
    HElement, MetacyclicGroup,
};
pub use level::{
    check_level_size, constituents, Constituent, ConstituentKey, LevelContext, LevelModule, ResidueField, OMEGA_CEILING,
};
pub use oracle::{
    classify_submodule, delta_from_scan, delta_profile, find_irreducible, oracle_census, oracle_from_scan,
    scan_levels, subspace_count_law, synthetic_block, DeltaProfile, LevelScan, OracleComponent, OracleReport,
};
pub use spin::{
    count_irreducible_submodules, enumerate_irreducible_submodules, is_irreducible, spin, spin_bounded, ModuleAction, Submodule,
    EXHAUSTIVE_LIMIT, SPIN_MAX_DIM,
};
