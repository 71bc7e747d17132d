//! Dormancy oracle for PGL2 opers of level N on (P^1; 0, 1, infinity).
//!
//! Stage 0 is the Gauss equation with exponent differences 2 rho mod p. A dormant
//! stage is descended along Frobenius to a rank-2 bundle on the twist, and the next
//! stage is searched for among log connections on that bundle whose residues match
//! the next base-p digit of the chosen exponent lifts.

pub mod descent;
pub mod gauss;

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra_core::{Field, LocalizedMatrix, LocalizedPoly};
use crate::radii::{enum_xi2, modulus, reduce_level, Radius, RadiiError};

pub use descent::{cartier_descend, extend_stage, Descended};
pub use gauss::{p_curvature_rational, polynomial_solution_rank, polynomial_solutions, twisted_companion, GaussParams};

/// Bumped whenever a change could alter computed tables; part of the cache key.
pub const ORACLE_VERSION: u32 = 1;

/// Environment variable naming the table cache directory.
pub const CACHE_ENV: &str = "DORMANT_CACHE_DIR";

/// Largest prime for which the level-2 search is attempted.
pub const MAX_SEARCH_PRIME: u32 = 7;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OperError {
    #[error("exponents violate the Fuchs relation (their sum must be 1)")]
    IncompatibleExponents,
    #[error("stage has nonzero p-curvature")]
    NotDormantStage,
    #[error("no dormant extension with the prescribed residues")]
    EmptyExtension,
    #[error("descent is implemented over the prime field only")]
    NotPrimeField,
    #[error("search would examine {candidates} candidates")]
    BudgetExceeded { candidates: u64 },
    #[error("level {level} at p = {p} is outside the supported range (N <= 2, and p <= 7 when N = 2)")]
    Unsupported { p: u32, level: u32 },
    #[error(transparent)]
    Radii(#[from] RadiiError),
    #[error("cache: {0}")]
    Cache(String),
}

/// A dormant rank-one structure on T(log) tensor Theta^2, fixed once and for all.
///
/// Only its degree enters the computations: Theta is used to convert between
/// PGL2 opers and GL2 connections, and the result does not depend on the choice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThetaChoice {
    pub degree: u64,
    /// Exponents at 0, 1, infinity mod p^N.
    pub exponents: [u64; 3],
}

impl ThetaChoice {
    pub fn standard(p: u32, level: u32) -> Self {
        ThetaChoice { degree: modulus(p, level).div_ceil(2), exponents: [0, 0, 0] }
    }

    /// -1 + 2 deg Theta = p^N, and the exponent sum must match that degree mod p^N.
    pub fn is_consistent(&self, p: u32, level: u32) -> bool {
        let m = modulus(p, level);
        let deg = 2 * self.degree - 1;
        deg.is_multiple_of(m) && self.exponents.iter().sum::<u64>() % m == deg % m
    }
}

/// One stage of a level-N oper.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StageConnection {
    pub stage: u32,
    /// Degrees of the splitting O(k1) + O(k2) of the underlying bundle.
    pub bundle: [i64; 2],
    /// M with horizontal coordinate vectors solving Y' = M Y.
    pub matrix: LocalizedMatrix,
    /// Exponents (digit `stage` of the lifts) at 0, 1, infinity; the residue
    /// eigenvalues are their negatives.
    pub exponents: [[u64; 2]; 3],
    /// The scalar equation, for stage 0.
    pub scalar: Option<GaussParams>,
}

/// A complete dormant chain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelNOperChain {
    pub radii: [Radius; 3],
    pub stages: Vec<StageConnection>,
    /// Exponent pairs mod p^N at 0, 1, infinity realized by the chain.
    pub lifts: [[u64; 2]; 3],
}

/// Unordered radii triples carrying a dormant oper on a 3-pointed line.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdmissibilityTable {
    pub p: u32,
    #[serde(rename = "N")]
    pub level: u32,
    /// Sorted representative triples.
    pub admissible: BTreeSet<[u64; 3]>,
}

impl AdmissibilityTable {
    pub fn contains(&self, a: u64, b: u64, c: u64) -> bool {
        self.admissible.contains(&sorted([a, b, c]))
    }

    /// Representatives of the radii set the table is indexed by.
    pub fn index_set(&self) -> Vec<u64> {
        enum_xi2(self.p, self.level).iter().map(|r| r.rep).collect()
    }
}

fn sorted(mut t: [u64; 3]) -> [u64; 3] {
    t.sort();
    t
}

/// Stage 0 for the given radii with exponent differences s_i * 2 rho_i mod p.
pub fn stage0(f: &Field, radii: &[Radius; 3], signs: [bool; 3]) -> StageConnection {
    let d = |i: usize| {
        let r = reduce_level(&radii[i], 1);
        let v = f.from_int(2 * r.rep as i64);
        if signs[i] {
            v
        } else {
            f.neg(v)
        }
    };
    let g = GaussParams::from_differences(f, d(0), d(1), d(2));
    let exps = g.exponents(f);
    StageConnection {
        stage: 0,
        bundle: [1, 0],
        matrix: g.companion(f),
        exponents: exps.map(|pair| pair.map(|e| e as u64)),
        scalar: Some(g),
    }
}

/// Build the stage-0 connection from exponent pairs at 0, 1, infinity.
pub fn build_level1(f: &Field, exps: &[[i64; 2]; 3]) -> Result<StageConnection, OperError> {
    let e = exps.map(|pair| pair.map(|x| f.from_int(x)));
    let (g, m) = twisted_companion(f, &e).ok_or(OperError::IncompatibleExponents)?;
    Ok(StageConnection { stage: 0, bundle: [1, 0], matrix: m, exponents: e.map(|pair| pair.map(u64::from)), scalar: Some(g) })
}

/// Digit data of all exponent lifts compatible with the level-2 radii.
///
/// At each point the stage-0 pair (x, y) has y - x = 2 rho mod p up to the sign
/// fixed by stage 0; the digits (u, u + t) must give (y + p (u + t)) - (x + p u)
/// congruent to the matching sign of 2 rho mod p^2. The Fuchs relation fixes the
/// digit at infinity given those at 0 and 1.
pub fn digit_lifts(p: u32, radii: &[Radius; 3], desc: &Descended) -> Vec<[[u64; 2]; 3]> {
    let pp = p as i64;
    let m2 = pp * pp;
    let shift: Vec<i64> = (0..3)
        .map(|i| {
            let [x, y] = desc.exponents[i];
            let diff = y as i64 - x as i64;
            let two_rho = 2 * radii[i].rep as i64;
            let target = if (two_rho - diff).rem_euclid(pp) == 0 { two_rho } else { -two_rho };
            let t = (target - diff).rem_euclid(m2);
            debug_assert_eq!(t % pp, 0);
            t / pp
        })
        .collect();
    let degree = desc.degrees[0] + desc.degrees[1];
    let half = (pp + 1) / 2;
    let mut out = Vec::new();
    for u0 in 0..pp {
        for u1 in 0..pp {
            let partial = 2 * u0 + shift[0] + 2 * u1 + shift[1] + shift[2];
            let ui = ((degree - partial) * half).rem_euclid(pp);
            let pair = |u: i64, t: i64| [u as u64, (u + t).rem_euclid(pp) as u64];
            out.push([pair(u0, shift[0]), pair(u1, shift[1]), pair(ui, shift[2])]);
        }
    }
    out
}

fn check_supported(p: u32, level: u32) -> Result<(), OperError> {
    crate::radii::check_prime_level(p, level)?;
    if level > 2 || (level == 2 && p > MAX_SEARCH_PRIME) {
        return Err(OperError::Unsupported { p, level });
    }
    Ok(())
}

fn check_radii(p: u32, level: u32, radii: &[Radius; 3]) -> Result<(), OperError> {
    for r in radii {
        if r.p != p || r.level != level {
            return Err(RadiiError::LevelMismatch(r.level, level).into());
        }
    }
    Ok(())
}

/// All complete dormant chains, one per successful exponent lift (stage-0 signs +).
pub fn dormant_chains(radii: &[Radius; 3], p: u32, level: u32, stop_at_first: bool) -> Result<Vec<LevelNOperChain>, OperError> {
    check_supported(p, level)?;
    check_radii(p, level, radii)?;
    let f = Field::prime(p).expect("checked prime");
    let s0 = stage0(&f, radii, [true; 3]);
    if !p_curvature_rational(&f, &s0.matrix).is_zero() {
        return Ok(Vec::new());
    }
    if level == 1 {
        let lifts = s0.exponents;
        return Ok(vec![LevelNOperChain { radii: *radii, stages: vec![s0], lifts }]);
    }
    let g = s0.scalar.expect("stage 0 is scalar");
    let desc = cartier_descend(&f, &g)?;
    let mut out = Vec::new();
    for digits in digit_lifts(p, radii, &desc) {
        match extend_stage(&f, &desc, &digits, 1) {
            Ok(found) => {
                let lifts = [0, 1, 2].map(|i| [0, 1].map(|j| desc.exponents[i][j] + p as u64 * digits[i][j]));
                let s1 = found.into_iter().next().expect("nonempty");
                out.push(LevelNOperChain { radii: *radii, stages: vec![s0.clone(), s1], lifts });
                if stop_at_first {
                    break;
                }
            }
            Err(OperError::EmptyExtension) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

/// Whether the radii carry a dormant oper of level N.
pub fn is_dormant(radii: &[Radius; 3], p: u32, level: u32) -> Result<bool, OperError> {
    Ok(!dormant_chains(radii, p, level, true)?.is_empty())
}

/// All unordered triples of representatives of the radii set at level N.
pub fn all_triples(p: u32, level: u32) -> Vec<[u64; 3]> {
    let xi: Vec<u64> = enum_xi2(p, level).iter().map(|r| r.rep).collect();
    let mut out = Vec::new();
    for (i, &a) in xi.iter().enumerate() {
        for (j, &b) in xi.iter().enumerate().skip(i) {
            for &c in &xi[j..] {
                out.push([a, b, c]);
            }
        }
    }
    out
}

/// Evaluate the oracle on every unordered triple.
pub fn vertex_table(p: u32, level: u32) -> Result<AdmissibilityTable, OperError> {
    check_supported(p, level)?;
    let verdicts: Vec<Result<Option<[u64; 3]>, OperError>> = all_triples(p, level)
        .into_par_iter()
        .map(|t| {
            let radii = t.map(|rep| Radius { p, level, rep });
            Ok(is_dormant(&radii, p, level)?.then_some(t))
        })
        .collect();
    let mut admissible = BTreeSet::new();
    for v in verdicts {
        if let Some(t) = v? {
            admissible.insert(t);
        }
    }
    Ok(AdmissibilityTable { p, level, admissible })
}

/// Cache directory from the environment, if set.
pub fn cache_dir_from_env() -> Option<PathBuf> {
    std::env::var_os(CACHE_ENV).map(PathBuf::from)
}

pub fn cache_path(dir: &Path, p: u32, level: u32) -> PathBuf {
    dir.join(format!("admissibility_p{p}_N{level}_v{ORACLE_VERSION}.json"))
}

/// [`vertex_table`] with a JSON file cache in `dir` (no caching when None).
pub fn vertex_table_cached(p: u32, level: u32, dir: Option<&Path>) -> Result<AdmissibilityTable, OperError> {
    let Some(dir) = dir else { return vertex_table(p, level) };
    let path = cache_path(dir, p, level);
    if let Ok(text) = std::fs::read_to_string(&path) {
        if let Ok(t) = serde_json::from_str::<AdmissibilityTable>(&text) {
            if t.p == p && t.level == level {
                return Ok(t);
            }
        }
    }
    let table = vertex_table(p, level)?;
    std::fs::create_dir_all(dir).map_err(|e| OperError::Cache(e.to_string()))?;
    let text = serde_json::to_string(&table).expect("serializable");
    std::fs::write(&path, text).map_err(|e| OperError::Cache(e.to_string()))?;
    Ok(table)
}

/// det of the trace-free p-curvature of a stage; zero exactly for nilpotent
/// p-curvature, in particular for dormant stages.
pub fn hm_char_coeff(f: &Field, stage: &StageConnection) -> LocalizedPoly {
    gauss::traceless_det(f, &p_curvature_rational(f, &stage.matrix))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn radius(p: u32, level: u32, rep: u64) -> Radius {
        Radius::from_rep(p, level, rep).unwrap()
    }

    #[test]
    fn oracles_agree_at_level_one() {
        for p in [3u32, 5, 7] {
            let f = Field::prime(p).unwrap();
            for a in 0..p {
                for b in 0..p {
                    for c in 0..p {
                        let g = GaussParams { a, b, c };
                        let curv = p_curvature_rational(&f, &g.companion(&f)).is_zero();
                        let rank = polynomial_solution_rank(&f, &g);
                        assert_eq!(curv, rank == 2, "p={p} {g:?} rank {rank}");
                    }
                }
            }
        }
    }

    #[test]
    fn gauss_example_builds() {
        let f = Field::prime(5).unwrap();
        let s = build_level1(&f, &[[0, 0], [0, 3], [1, 2]]).unwrap();
        assert_eq!(s.scalar, Some(GaussParams { a: 1, b: 2, c: 1 }));
        assert_eq!(build_level1(&f, &[[0, 1], [0, 1], [0, 1]]), Err(OperError::IncompatibleExponents));
    }

    #[test]
    fn swapping_exponents_keeps_the_verdict() {
        let f = Field::prime(5).unwrap();
        for d0 in 1..5 {
            for d1 in 1..5 {
                for di in 1..5 {
                    let g = GaussParams::from_differences(&f, d0, d1, di);
                    let e = g.exponents(&f).map(|pair| pair.map(|x| x as i64));
                    let base = p_curvature_rational(&f, &build_level1(&f, &e).unwrap().matrix).is_zero();
                    for pt in 0..3 {
                        let mut sw = e;
                        sw[pt].swap(0, 1);
                        let s = build_level1(&f, &sw).unwrap();
                        assert_eq!(p_curvature_rational(&f, &s.matrix).is_zero(), base);
                    }
                }
            }
        }
    }

    #[test]
    fn sign_choices_do_not_matter_at_level_one() {
        for p in [3u32, 5, 7] {
            let f = Field::prime(p).unwrap();
            for t in all_triples(p, 1) {
                let radii = t.map(|r| radius(p, 1, r));
                let verdicts: BTreeSet<bool> = (0..8)
                    .map(|m| {
                        let s = stage0(&f, &radii, [m & 1 != 0, m & 2 != 0, m & 4 != 0]);
                        p_curvature_rational(&f, &s.matrix).is_zero()
                    })
                    .collect();
                assert_eq!(verdicts.len(), 1, "p={p} {t:?}");
            }
        }
    }

    #[test]
    fn level_two_verdict_is_lift_independent() {
        // Lifts differ by twists with (z), (z-1), so all or none succeed.
        for t in all_triples(3, 2) {
            let radii = t.map(|r| radius(3, 2, r));
            let chains = dormant_chains(&radii, 3, 2, false).unwrap();
            assert!(chains.is_empty() || chains.len() == 9, "{t:?}: {}", chains.len());
        }
    }

    #[test]
    fn tables_are_nested_and_reduce() {
        let t1 = vertex_table(3, 1).unwrap();
        let t2 = vertex_table(3, 2).unwrap();
        assert!(!t1.admissible.is_empty());
        for t in &t2.admissible {
            let red = t.map(|r| reduce_level(&radius(3, 2, r), 1).rep);
            assert!(t1.contains(red[0], red[1], red[2]));
        }
    }

    #[test]
    fn returned_stages_are_dormant() {
        let f = Field::prime(3).unwrap();
        for t in all_triples(3, 2) {
            let radii = t.map(|r| radius(3, 2, r));
            for chain in dormant_chains(&radii, 3, 2, false).unwrap() {
                for s in &chain.stages {
                    assert!(p_curvature_rational(&f, &s.matrix).is_zero());
                    assert!(hm_char_coeff(&f, s).is_zero());
                }
            }
        }
    }

    #[test]
    fn char_coeff_descends_and_detects_nilpotency() {
        // Parameters in F_3 give nilpotent p-curvature; F_9 parameters usually do not.
        let f = Field::new(3, 2).unwrap();
        let mut nonzero = 0;
        for a in f.elements() {
            for c in [0, 1, f.from_coeffs(&[1, 1])] {
                let g = GaussParams { a, b: 1, c };
                let s = StageConnection { stage: 0, bundle: [1, 0], matrix: g.companion(&f), exponents: [[0; 2]; 3], scalar: Some(g) };
                let a2 = hm_char_coeff(&f, &s);
                assert!(a2.is_in_pth_powers(&f, 3));
                let prime = f.is_in_prime_field(a) && f.is_in_prime_field(c);
                if prime {
                    assert!(a2.is_zero());
                }
                if !a2.is_zero() {
                    nonzero += 1;
                }
            }
        }
        assert!(nonzero > 0);
    }

    #[test]
    fn theta_choice_is_consistent() {
        for (p, n) in [(3, 1), (3, 2), (5, 1), (7, 2)] {
            let t = ThetaChoice::standard(p, n);
            assert!(t.is_consistent(p, n));
            assert_eq!(t.degree, modulus(p, n).div_ceil(2));
        }
    }

    #[test]
    fn unsupported_levels_error() {
        let r = [radius(11, 2, 1); 3];
        assert!(matches!(is_dormant(&r, 11, 2), Err(OperError::Unsupported { .. })));
        assert!(matches!(vertex_table(3, 3), Err(OperError::Unsupported { .. })));
    }

    #[test]
    fn cache_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let a = vertex_table_cached(5, 1, Some(dir.path())).unwrap();
        assert!(cache_path(dir.path(), 5, 1).exists());
        let b = vertex_table_cached(5, 1, Some(dir.path())).unwrap();
        assert_eq!(a, b);
        let text = std::fs::read_to_string(cache_path(dir.path(), 5, 1)).unwrap();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["p"], 5);
        assert_eq!(v["N"], 1);
        assert!(v["admissible"].is_array());
    }
}
