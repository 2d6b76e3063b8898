//! The defining relation families, their instance enumeration, and a
//! registry for user-supplied relator templates.
//!
//! Families `R0..R9` are the seed relations of the L-presentation;
//! families `H1..H9` are the same relations rewritten as products of
//! commutators, the form used by the homology-linearization bookkeeping.
//! An instance is a family name plus a signed parameter tuple; expanding
//! an instance yields a word over the IA alphabet that evaluates to the
//! identity automorphism.
//!
//! Parameter slots are signed letters. Slots whose sign is immaterial for
//! the family are normalized to positive. Enumeration emits, for a given
//! index pool `1..=p`, every admissible index assignment crossed with
//! every sign pattern on the live slots, in a fixed deterministic order;
//! the only quotient taken is for `R0`, whose slot-swap symmetry pairs
//! each instance with its own inverse.

use crate::alphabet::{ia_letters_evaluate_to_identity, IAGen, IAWord};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RelError {
    #[error("family {family} expects {expected} parameters, got {got}")]
    BadArity {
        family: String,
        expected: usize,
        got: usize,
    },
    #[error("invalid parameters for {family}: {detail}")]
    BadParams { family: String, detail: String },
    #[error("unknown relation family {0}")]
    UnknownFamily(String),
    #[error("relation family {0} is already registered")]
    DuplicateName(String),
    #[error("template for {name} is not a relator at parameters {params:?}")]
    NotARelator { name: String, params: Vec<i32> },
    #[error("invalid template for {name}: {detail}")]
    BadTemplate { name: String, detail: String },
}

/// One of the built-in relation families.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Builtin {
    R0,
    R1,
    R2,
    R3,
    R4,
    R5,
    R6,
    R7,
    R8,
    R9,
    H1,
    H2,
    H3,
    H4,
    H5,
    H6,
    H7,
    H8,
    H9,
}

use Builtin::*;

impl Builtin {
    pub const ALL: [Builtin; 19] = [
        R0, R1, R2, R3, R4, R5, R6, R7, R8, R9, H1, H2, H3, H4, H5, H6, H7, H8, H9,
    ];
    pub const R_FAMILIES: [Builtin; 10] = [R0, R1, R2, R3, R4, R5, R6, R7, R8, R9];
    pub const H_FAMILIES: [Builtin; 9] = [H1, H2, H3, H4, H5, H6, H7, H8, H9];

    pub fn name(self) -> &'static str {
        match self {
            R0 => "R0",
            R1 => "R1",
            R2 => "R2",
            R3 => "R3",
            R4 => "R4",
            R5 => "R5",
            R6 => "R6",
            R7 => "R7",
            R8 => "R8",
            R9 => "R9",
            H1 => "H1",
            H2 => "H2",
            H3 => "H3",
            H4 => "H4",
            H5 => "H5",
            H6 => "H6",
            H7 => "H7",
            H8 => "H8",
            H9 => "H9",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Builtin::ALL.into_iter().find(|f| f.name() == s)
    }

    pub fn arity(self) -> usize {
        match self {
            R0 | R4 | R5 | R6 | H4 | H9 => 3,
            R1 | R7 | R9 | H1 | H5 | H7 | H8 => 4,
            R3 | R8 | H3 | H6 => 5,
            R2 | H2 => 6,
        }
    }

    /// Slots (0-based) whose sign is meaningful; all other slots are
    /// normalized to positive.
    pub fn live_sign_slots(self) -> &'static [usize] {
        match self {
            R0 | R5 | R6 | H9 => &[0, 1, 2],
            R1 | R4 => &[],
            R2 | R8 | H2 | H6 => &[0, 1, 2, 3, 4, 5][..self.arity()],
            R3 => &[2, 3, 4],
            R7 | H5 => &[1, 2, 3],
            R9 | H7 | H8 => &[0, 1, 2, 3],
            H1 => &[1, 3],
            H3 => &[0, 1, 2, 4],
            H4 => &[0, 1],
        }
    }

    /// Index-level admissibility (arguments are the unsigned indices, in
    /// slot order). Encodes which coincidences each family permits.
    fn indices_ok(self, ix: &[i32]) -> bool {
        let d2 = |i: i32, j: i32| i != j;
        let d3 = |i: i32, j: i32, k: i32| i != j && i != k && j != k;
        match self {
            R0 | R4 | R5 | R6 | H4 | H9 => d3(ix[0], ix[1], ix[2]),
            // Two conjugation moves; second slots may coincide.
            R1 | H1 => {
                d2(ix[0], ix[1])
                    && d2(ix[2], ix[3])
                    && d2(ix[0], ix[2])
                    && d2(ix[0], ix[3])
                    && d2(ix[1], ix[2])
            }
            // Two commutator transvections; their commutator slots may
            // meet, and the heads may share an index (opposite signs only,
            // enforced at the signed level).
            R2 | H2 => {
                d3(ix[0], ix[1], ix[2])
                    && d3(ix[3], ix[4], ix[5])
                    && ix[0] != ix[4]
                    && ix[0] != ix[5]
                    && ix[3] != ix[1]
                    && ix[3] != ix[2]
            }
            // Conjugation move (a, b) against transvection (c, d, e); b may
            // land in {d, e}.
            R3 => {
                d2(ix[0], ix[1])
                    && d3(ix[2], ix[3], ix[4])
                    && ix[2] != ix[0]
                    && ix[2] != ix[1]
                    && ix[0] != ix[3]
                    && ix[0] != ix[4]
            }
            // Same coincidence pattern as R3 in the slot order (c, d, e, a, b).
            H3 => {
                d3(ix[0], ix[1], ix[2])
                    && d2(ix[3], ix[4])
                    && ix[0] != ix[3]
                    && ix[0] != ix[4]
                    && ix[3] != ix[1]
                    && ix[3] != ix[2]
            }
            R7 | H5 => {
                d3(ix[0], ix[1], ix[2]) && ix[3] != ix[0] && ix[3] != ix[1] && ix[3] != ix[2]
            }
            // (a, b, c, d, e): e may coincide with b or c.
            R8 | H6 => {
                d3(ix[0], ix[1], ix[2])
                    && ix[3] != ix[0]
                    && ix[3] != ix[1]
                    && ix[3] != ix[2]
                    && ix[4] != ix[0]
                    && ix[4] != ix[3]
            }
            // (a, b, c, d): b may coincide with d.
            R9 | H7 => {
                d2(ix[0], ix[1])
                    && d2(ix[0], ix[2])
                    && d2(ix[0], ix[3])
                    && d2(ix[2], ix[1])
                    && d2(ix[2], ix[3])
            }
            H8 => d3(ix[0], ix[1], ix[2]) && ix[3] != ix[0] && ix[3] != ix[1] && ix[3] != ix[2],
        }
    }

    /// Sign-level admissibility on top of [`Builtin::indices_ok`].
    fn signs_ok(self, p: &[i32]) -> bool {
        match self {
            // The two heads may only coincide as inverse letters.
            R2 | H2 => p[0] != p[3],
            _ => true,
        }
    }

    /// Canonical-representative filter for families with a slot symmetry.
    fn is_canonical(self, p: &[i32]) -> bool {
        match self {
            // Swapping the last two slots inverts the instance.
            R0 => p[1] < p[2],
            _ => true,
        }
    }

    /// Normalizes ignored sign slots to positive.
    pub fn normalize(self, params: &mut [i32]) {
        let live = self.live_sign_slots();
        for (i, p) in params.iter_mut().enumerate() {
            if !live.contains(&i) {
                *p = p.abs();
            }
        }
    }

    pub fn validate(self, params: &[i32]) -> Result<(), RelError> {
        if params.len() != self.arity() {
            return Err(RelError::BadArity {
                family: self.name().into(),
                expected: self.arity(),
                got: params.len(),
            });
        }
        if params.iter().any(|&p| p == 0) {
            return Err(RelError::BadParams {
                family: self.name().into(),
                detail: "zero letter".into(),
            });
        }
        let ix: Vec<i32> = params.iter().map(|p| p.abs()).collect();
        if !self.indices_ok(&ix) {
            return Err(RelError::BadParams {
                family: self.name().into(),
                detail: format!("inadmissible index coincidence in {:?}", params),
            });
        }
        let mut normalized = params.to_vec();
        self.normalize(&mut normalized);
        if !self.signs_ok(&normalized) {
            return Err(RelError::BadParams {
                family: self.name().into(),
                detail: format!("inadmissible sign pattern in {:?}", params),
            });
        }
        Ok(())
    }

    /// Expands an instance to its letter sequence (left to right, not
    /// reduced). Ignored sign slots are normalized first.
    pub fn expand_letters(self, params: &[i32]) -> Result<Vec<IAGen>, RelError> {
        self.validate(params)?;
        let mut p = params.to_vec();
        self.normalize(&mut p);
        let c = IAGen::conj;
        let m = IAGen::commtv;
        Ok(match self {
            // Mc[a,b,c] * Mc[a,c,b]: the slot-swap inverse pairing. The
            // word reduces to the identity by construction; its content is
            // checked at the action level.
            R0 => vec![m(p[0], p[1], p[2]), m(p[0], p[2], p[1])],
            // [C[a,b], C[c,d]]
            R1 => vec![
                c(p[0], p[1]),
                c(p[2], p[3]),
                c(p[0], -p[1]),
                c(p[2], -p[3]),
            ],
            // [Mc[a,b,c], Mc[d,e,f]]
            R2 => vec![
                m(p[0], p[1], p[2]),
                m(p[3], p[4], p[5]),
                m(p[0], p[2], p[1]),
                m(p[3], p[5], p[4]),
            ],
            // [C[a,b], Mc[c,d,e]]
            R3 => vec![
                c(p[0], p[1]),
                m(p[2], p[3], p[4]),
                c(p[0], -p[1]),
                m(p[2], p[4], p[3]),
            ],
            // [C[a,b] C[c,b], C[c,a]]
            R4 => vec![
                c(p[0], p[1]),
                c(p[2], p[1]),
                c(p[2], p[0]),
                c(p[2], -p[1]),
                c(p[0], -p[1]),
                c(p[2], -p[0]),
            ],
            // C[a,b] Mc[a,b,c] C[a,-b] equals Mc[a,c,-b]; as a relator:
            R5 => vec![
                c(p[0], p[1]),
                m(p[0], p[1], p[2]),
                c(p[0], -p[1]),
                m(p[0], -p[1], p[2]),
            ],
            // Mc[a,b,c] Mc[-a,b,c] equals [C[a,c]^-1, C[a,b]^-1] (in the
            // sign convention of the slots); as a relator:
            R6 => vec![
                m(p[0], p[1], p[2]),
                m(-p[0], p[1], p[2]),
                c(p[0], -p[1]),
                c(p[0], -p[2]),
                c(p[0], p[1]),
                c(p[0], p[2]),
            ],
            // [C[a,b]^-1, Mc[b,c,d]] equals [C[a,d]^-1, C[a,c]^-1]; as a
            // relator:
            R7 => vec![
                c(p[0], -p[1]),
                m(p[1], p[2], p[3]),
                c(p[0], p[1]),
                m(p[1], p[3], p[2]),
                c(p[0], -p[2]),
                c(p[0], -p[3]),
                c(p[0], p[2]),
                c(p[0], p[3]),
            ],
            // Mc[a,b,c] Mc[d,a,e] Mc[a,c,b] equals
            // C[d,e]^-1 Mc[d,c,b] C[d,e] Mc[d,a,e] Mc[d,b,c]; as a relator:
            R8 => vec![
                m(p[0], p[1], p[2]),
                m(p[3], p[0], p[4]),
                m(p[0], p[2], p[1]),
                m(p[3], p[2], p[1]),
                m(p[3], p[4], p[0]),
                c(p[3], -p[4]),
                m(p[3], p[1], p[2]),
                c(p[3], p[4]),
            ],
            // C[a,b] Mc[c,a,d] C[a,-b] equals
            // C[c,d]^-1 Mc[c,a,b] C[c,d] Mc[c,a,d] Mc[c,b,a]; as a relator:
            R9 => vec![
                c(p[0], p[1]),
                m(p[2], p[0], p[3]),
                c(p[0], -p[1]),
                m(p[2], p[0], p[1]),
                m(p[2], p[3], p[0]),
                c(p[2], -p[3]),
                m(p[2], p[1], p[0]),
                c(p[2], p[3]),
            ],
            // [C[a,b], C[c,d]] with live signs on the second slots.
            H1 => vec![
                c(p[0], p[1]),
                c(p[2], p[3]),
                c(p[0], -p[1]),
                c(p[2], -p[3]),
            ],
            // [Mc[a,b,c], Mc[d,e,f]]
            H2 => vec![
                m(p[0], p[1], p[2]),
                m(p[3], p[4], p[5]),
                m(p[0], p[2], p[1]),
                m(p[3], p[5], p[4]),
            ],
            // [C[a,b], Mc[c,d,e]] in the slot order (c, d, e, a, b).
            H3 => vec![
                c(p[3], p[4]),
                m(p[0], p[1], p[2]),
                c(p[3], -p[4]),
                m(p[0], p[2], p[1]),
            ],
            // [C[c,b] C[a,b], C[c,a]]
            H4 => vec![
                c(p[2], p[1]),
                c(p[0], p[1]),
                c(p[2], p[0]),
                c(p[0], -p[1]),
                c(p[2], -p[1]),
                c(p[2], -p[0]),
            ],
            // [C[a,c]^-1, C[a,d]^-1] [C[a,b]^-1, Mc[b,c,d]]
            H5 => vec![
                c(p[0], -p[2]),
                c(p[0], -p[3]),
                c(p[0], p[2]),
                c(p[0], p[3]),
                c(p[0], -p[1]),
                m(p[1], p[2], p[3]),
                c(p[0], p[1]),
                m(p[1], p[3], p[2]),
            ],
            // [Mc[a,b,c], Mc[d,a,e]] [Mc[d,a,e], Mc[d,c,b]]
            // [Mc[d,c,b], C[d,e]^-1]
            H6 => vec![
                m(p[0], p[1], p[2]),
                m(p[3], p[0], p[4]),
                m(p[0], p[2], p[1]),
                m(p[3], p[4], p[0]),
                m(p[3], p[0], p[4]),
                m(p[3], p[2], p[1]),
                m(p[3], p[4], p[0]),
                m(p[3], p[1], p[2]),
                m(p[3], p[2], p[1]),
                c(p[3], -p[4]),
                m(p[3], p[1], p[2]),
                c(p[3], p[4]),
            ],
            // [Mc[c,a,d], C[a,b]] [C[c,d]^-1, Mc[c,a,b]]
            // [Mc[c,a,b], Mc[c,a,d]]
            H7 => vec![
                m(p[2], p[0], p[3]),
                c(p[0], p[1]),
                m(p[2], p[3], p[0]),
                c(p[0], -p[1]),
                c(p[2], -p[3]),
                m(p[2], p[0], p[1]),
                c(p[2], p[3]),
                m(p[2], p[1], p[0]),
                m(p[2], p[0], p[1]),
                m(p[2], p[0], p[3]),
                m(p[2], p[1], p[0]),
                m(p[2], p[3], p[0]),
            ],
            // [Mc[a,b,c], C[a,d] C[b,d] C[c,d]]
            H8 => vec![
                m(p[0], p[1], p[2]),
                c(p[0], p[3]),
                c(p[1], p[3]),
                c(p[2], p[3]),
                m(p[0], p[2], p[1]),
                c(p[2], -p[3]),
                c(p[1], -p[3]),
                c(p[0], -p[3]),
            ],
            // [C[a,c] C[b,c], C[a,b] C[c,b]] [Mc[a,b,c], C[b,a] C[c,a]]
            H9 => vec![
                c(p[0], p[2]),
                c(p[1], p[2]),
                c(p[0], p[1]),
                c(p[2], p[1]),
                c(p[1], -p[2]),
                c(p[0], -p[2]),
                c(p[2], -p[1]),
                c(p[0], -p[1]),
                m(p[0], p[1], p[2]),
                c(p[1], p[0]),
                c(p[2], p[0]),
                m(p[0], p[2], p[1]),
                c(p[2], -p[0]),
                c(p[1], -p[0]),
            ],
        })
    }
}

impl fmt::Display for Builtin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A relation family name: built-in or registered.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum FamilyId {
    Builtin(Builtin),
    Named(String),
}

impl FamilyId {
    pub fn name(&self) -> &str {
        match self {
            FamilyId::Builtin(b) => b.name(),
            FamilyId::Named(s) => s,
        }
    }
}

impl From<Builtin> for FamilyId {
    fn from(b: Builtin) -> Self {
        FamilyId::Builtin(b)
    }
}

impl FromStr for FamilyId {
    type Err = std::convert::Infallible;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match Builtin::from_name(s) {
            Some(b) => FamilyId::Builtin(b),
            None => FamilyId::Named(s.to_string()),
        })
    }
}

impl fmt::Display for FamilyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl Serialize for FamilyId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for FamilyId {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Ok(s.parse().unwrap())
    }
}

/// A relation family applied to a concrete parameter tuple.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub struct RelInstance {
    pub family: FamilyId,
    pub params: Vec<i32>,
}

impl RelInstance {
    pub fn builtin(family: Builtin, params: &[i32]) -> Self {
        RelInstance {
            family: family.into(),
            params: params.to_vec(),
        }
    }
}

impl fmt::Display for RelInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{:?}", self.family, self.params)
    }
}

/// Streams every instance of a built-in family over the index pool
/// `1..=pool`, in a fixed order: index tuples ascending (first slot most
/// significant), then sign patterns ascending over the live slots.
pub fn for_each_instance<F: FnMut(&[i32])>(family: Builtin, pool: i32, f: F) {
    for_each_instance_sharded(family, pool, 0, 1, f);
}

/// Shard `shard` of `nshards` of the instance stream, split by index
/// tuple. The union over all shards is exactly the unsharded stream.
pub fn for_each_instance_sharded<F: FnMut(&[i32])>(
    family: Builtin,
    pool: i32,
    shard: u64,
    nshards: u64,
    mut f: F,
) {
    assert!(pool >= 1 && nshards >= 1 && shard < nshards);
    let arity = family.arity();
    let live = family.live_sign_slots();
    let total: u64 = (pool as u64).pow(arity as u32);
    let mut ix = vec![0i32; arity];
    let mut params = vec![0i32; arity];
    for t in (shard..total).step_by(nshards as usize) {
        let mut rest = t;
        for slot in (0..arity).rev() {
            ix[slot] = (rest % pool as u64) as i32 + 1;
            rest /= pool as u64;
        }
        if !family.indices_ok(&ix) {
            continue;
        }
        for bits in 0u32..(1 << live.len()) {
            params.copy_from_slice(&ix);
            for (j, &slot) in live.iter().enumerate() {
                if bits & (1 << j) != 0 {
                    params[slot] = -params[slot];
                }
            }
            if !family.signs_ok(&params) || !family.is_canonical(&params) {
                continue;
            }
            f(&params);
        }
    }
}

/// Collects the instance stream of a built-in family into a vector.
pub fn enumerate_builtin(family: Builtin, pool: i32) -> Vec<RelInstance> {
    let mut out = Vec::new();
    for_each_instance(family, pool, |params| {
        out.push(RelInstance::builtin(family, params));
    });
    out
}

/// Number of instances of a built-in family over the pool.
pub fn count_instances(family: Builtin, pool: i32) -> u64 {
    let mut n = 0u64;
    for_each_instance(family, pool, |_| n += 1);
    n
}

/// How a registered template is vetted.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProbePolicy {
    /// Registration checks every sign pattern over a distinct index tuple;
    /// the family is then trusted for all admissible parameters.
    AllSigns,
    /// Registration checks only the all-positive pattern; every later
    /// expansion is verified individually.
    PerUse,
}

/// A letter of a relator template. Slot references are nonzero integers:
/// `k` copies parameter `k` (1-based), `-k` copies it with flipped sign.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(tag = "k")]
pub enum TemplateLetter {
    C { a: i32, b: i32 },
    Mc { a: i32, b: i32, c: i32 },
}

impl TemplateLetter {
    fn slots(&self) -> Vec<i32> {
        match *self {
            TemplateLetter::C { a, b } => vec![a, b],
            TemplateLetter::Mc { a, b, c } => vec![a, b, c],
        }
    }

    fn instantiate(&self, name: &str, params: &[i32]) -> Result<IAGen, RelError> {
        let get = |r: i32| -> i32 {
            let v = params[(r.abs() - 1) as usize];
            if r < 0 {
                -v
            } else {
                v
            }
        };
        let lift = |g: Result<IAGen, crate::alphabet::GenError>| {
            g.map_err(|e| RelError::BadParams {
                family: name.to_string(),
                detail: e.to_string(),
            })
        };
        match *self {
            TemplateLetter::C { a, b } => lift(IAGen::try_conj(get(a), get(b))),
            TemplateLetter::Mc { a, b, c } => lift(IAGen::try_commtv(get(a), get(b), get(c))),
        }
    }
}

/// A registered relator family: a template word over slot references.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExtraDef {
    pub name: String,
    pub arity: usize,
    #[serde(default = "default_probe")]
    pub probe: ProbePolicy,
    pub template: Vec<TemplateLetter>,
}

fn default_probe() -> ProbePolicy {
    ProbePolicy::AllSigns
}

/// Expansion and validation for built-in and registered relation families.
#[derive(Default)]
pub struct Registry {
    extras: BTreeMap<String, ExtraDef>,
}

impl Registry {
    pub fn new() -> Self {
        Registry::default()
    }

    pub fn extras(&self) -> impl Iterator<Item = &ExtraDef> {
        self.extras.values()
    }

    pub fn lookup_extra(&self, name: &str) -> Option<&ExtraDef> {
        self.extras.get(name)
    }

    /// Registers a template after vetting it per its probe policy.
    /// Registered parameters must always be pairwise distinct indices.
    pub fn register(&mut self, def: ExtraDef) -> Result<(), RelError> {
        if Builtin::from_name(&def.name).is_some() || self.extras.contains_key(&def.name) {
            return Err(RelError::DuplicateName(def.name));
        }
        if def.arity == 0 || def.template.is_empty() {
            return Err(RelError::BadTemplate {
                name: def.name,
                detail: "empty template or zero arity".into(),
            });
        }
        for letter in &def.template {
            for slot in letter.slots() {
                if slot == 0 || slot.unsigned_abs() as usize > def.arity {
                    return Err(RelError::BadTemplate {
                        name: def.name,
                        detail: format!("slot reference {} outside arity {}", slot, def.arity),
                    });
                }
            }
        }
        // Probe over the canonical distinct index tuple. Any other distinct
        // assignment is a relabeling of this one, so it suffices for the
        // all-positive check; AllSigns additionally sweeps the sign
        // patterns.
        let base: Vec<i32> = (1..=def.arity as i32).collect();
        let patterns: u32 = match def.probe {
            ProbePolicy::AllSigns => 1 << def.arity,
            ProbePolicy::PerUse => 1,
        };
        for bits in 0..patterns {
            let mut params = base.clone();
            for (j, p) in params.iter_mut().enumerate() {
                if bits & (1 << j) != 0 {
                    *p = -*p;
                }
            }
            let letters = instantiate_template(&def.name, &def.template, &params)?;
            if !ia_letters_evaluate_to_identity(&letters, def.arity) {
                return Err(RelError::NotARelator {
                    name: def.name,
                    params,
                });
            }
        }
        self.extras.insert(def.name.clone(), def);
        Ok(())
    }

    /// Loads a JSON array of template definitions, registering each.
    pub fn load_extras_json(&mut self, json: &str) -> Result<usize, RelError> {
        let defs: Vec<ExtraDef> = serde_json::from_str(json).map_err(|e| RelError::BadTemplate {
            name: "<json>".into(),
            detail: e.to_string(),
        })?;
        let count = defs.len();
        for def in defs {
            self.register(def)?;
        }
        Ok(count)
    }

    /// Expands an instance to its (unreduced) letter sequence.
    pub fn expand_letters(&self, inst: &RelInstance) -> Result<Vec<IAGen>, RelError> {
        match &inst.family {
            FamilyId::Builtin(b) => b.expand_letters(&inst.params),
            FamilyId::Named(name) => {
                let def = self
                    .extras
                    .get(name)
                    .ok_or_else(|| RelError::UnknownFamily(name.clone()))?;
                if inst.params.len() != def.arity {
                    return Err(RelError::BadArity {
                        family: name.clone(),
                        expected: def.arity,
                        got: inst.params.len(),
                    });
                }
                let mut seen = Vec::new();
                for &p in &inst.params {
                    if p == 0 {
                        return Err(RelError::BadParams {
                            family: name.clone(),
                            detail: "zero letter".into(),
                        });
                    }
                    if seen.contains(&p.abs()) {
                        return Err(RelError::BadParams {
                            family: name.clone(),
                            detail: format!("repeated index in {:?}", inst.params),
                        });
                    }
                    seen.push(p.abs());
                }
                let letters = instantiate_template(name, &def.template, &inst.params)?;
                if def.probe == ProbePolicy::PerUse {
                    let rank = letters.iter().map(|g| g.max_index()).max().unwrap_or(1);
                    if !ia_letters_evaluate_to_identity(&letters, rank as usize) {
                        return Err(RelError::NotARelator {
                            name: name.clone(),
                            params: inst.params.clone(),
                        });
                    }
                }
                Ok(letters)
            }
        }
    }

    /// Expands an instance to a reduced word.
    pub fn expand(&self, inst: &RelInstance) -> Result<IAWord, RelError> {
        Ok(IAWord::from_letters(self.expand_letters(inst)?))
    }

    /// Visits the reduced expansion of every known-family instance over
    /// the pool: all builtin families plus registered extras. Per-use
    /// instances that fail their relator check are skipped.
    pub fn for_each_expansion<F: FnMut(&IAWord)>(&self, pool: usize, f: &mut F) {
        let pool = pool as i32;
        for fam in Builtin::ALL {
            for_each_instance(fam, pool, |params| {
                let word = IAWord::from_letters(fam.expand_letters(params).unwrap());
                f(&word);
            });
        }
        for def in self.extras.values() {
            let family = FamilyId::Named(def.name.clone());
            for inst in self.enumerate(&family, pool).unwrap() {
                if let Ok(word) = self.expand(&inst) {
                    f(&word);
                }
            }
        }
    }

    /// Enumerates instances of any known family over the pool. Registered
    /// families range over distinct index tuples; `AllSigns` templates
    /// also sweep sign patterns.
    pub fn enumerate(&self, family: &FamilyId, pool: i32) -> Result<Vec<RelInstance>, RelError> {
        match family {
            FamilyId::Builtin(b) => Ok(enumerate_builtin(*b, pool)),
            FamilyId::Named(name) => {
                let def = self
                    .extras
                    .get(name)
                    .ok_or_else(|| RelError::UnknownFamily(name.clone()))?;
                let mut out = Vec::new();
                let mut ix = vec![0i32; def.arity];
                let total = (pool as u64).pow(def.arity as u32);
                let patterns: u32 = match def.probe {
                    ProbePolicy::AllSigns => 1 << def.arity,
                    ProbePolicy::PerUse => 1,
                };
                for t in 0..total {
                    let mut rest = t;
                    for slot in (0..def.arity).rev() {
                        ix[slot] = (rest % pool as u64) as i32 + 1;
                        rest /= pool as u64;
                    }
                    let mut distinct = true;
                    for i in 0..def.arity {
                        for j in (i + 1)..def.arity {
                            distinct &= ix[i] != ix[j];
                        }
                    }
                    if !distinct {
                        continue;
                    }
                    for bits in 0..patterns {
                        let mut params = ix.clone();
                        for (j, p) in params.iter_mut().enumerate() {
                            if bits & (1 << j) != 0 {
                                *p = -*p;
                            }
                        }
                        out.push(RelInstance {
                            family: FamilyId::Named(name.clone()),
                            params,
                        });
                    }
                }
                Ok(out)
            }
        }
    }
}

fn instantiate_template(
    name: &str,
    template: &[TemplateLetter],
    params: &[i32],
) -> Result<Vec<IAGen>, RelError> {
    template
        .iter()
        .map(|t| t.instantiate(name, params))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn falling(p: u64, k: u64) -> u64 {
        (0..k).map(|i| p - i).product()
    }

    #[test]
    fn family_names_round_trip() {
        for f in Builtin::ALL {
            assert_eq!(Builtin::from_name(f.name()), Some(f));
        }
        let id: FamilyId = "R5".parse().unwrap();
        assert_eq!(id, FamilyId::Builtin(R5));
        let named: FamilyId = "x1".parse().unwrap();
        assert_eq!(named, FamilyId::Named("x1".into()));
    }

    #[test]
    fn instance_json_round_trip() {
        let inst = RelInstance::builtin(R4, &[1, 2, 3]);
        let json = serde_json::to_string(&inst).unwrap();
        assert_eq!(json, r#"{"family":"R4","params":[1,2,3]}"#);
        let back: RelInstance = serde_json::from_str(&json).unwrap();
        assert_eq!(back, inst);
    }

    #[test]
    fn r5_expansion_is_the_sandwich_word() {
        let letters = R5.expand_letters(&[1, 2, 3]).unwrap();
        assert_eq!(
            letters,
            vec![
                IAGen::conj(1, 2),
                IAGen::commtv(1, 2, 3),
                IAGen::conj(1, -2),
                IAGen::commtv(1, -2, 3),
            ]
        );
    }

    #[test]
    fn r6_expansion_matches_commutator_form() {
        let letters = R6.expand_letters(&[1, 2, 3]).unwrap();
        assert_eq!(
            letters,
            vec![
                IAGen::commtv(1, 2, 3),
                IAGen::commtv(-1, 2, 3),
                IAGen::conj(1, -2),
                IAGen::conj(1, -3),
                IAGen::conj(1, 2),
                IAGen::conj(1, 3),
            ]
        );
    }

    #[test]
    fn every_builtin_instance_is_a_relator_small_pool() {
        // Rank 4 exercises every coincidence pattern of every family.
        let pool = 4;
        for fam in Builtin::ALL {
            let mut checked = 0u64;
            for_each_instance(fam, pool, |params| {
                let letters = fam.expand_letters(params).unwrap();
                assert!(
                    ia_letters_evaluate_to_identity(&letters, pool as usize),
                    "{}{:?} does not evaluate to the identity",
                    fam,
                    params
                );
                checked += 1;
            });
            assert!(checked > 0, "no instances for {}", fam);
        }
    }

    #[test]
    fn r0_letter_actions_invert_each_other() {
        for_each_instance(R0, 3, |params| {
            let letters = R0.expand_letters(params).unwrap();
            // The raw pair must compose to the identity action even though
            // the reduced word is empty.
            assert!(ia_letters_evaluate_to_identity(&letters, 3));
            assert!(IAWord::from_letters(letters).is_identity());
        });
    }

    #[test]
    fn r0_enumeration_omits_slot_swapped_duplicates() {
        let instances = enumerate_builtin(R0, 3);
        for inst in &instances {
            let flipped = RelInstance::builtin(R0, &[inst.params[0], inst.params[2], inst.params[1]]);
            assert!(
                !instances.contains(&flipped),
                "both {} and its inverse enumerated",
                inst
            );
        }
        // 3 choices of head times 8 sign patterns on three slots, halved.
        assert_eq!(instances.len() as u64, falling(3, 3) * 8 / 2);
    }

    #[test]
    fn enumeration_counts_match_closed_forms() {
        for p in [3u64, 4, 5] {
            let pi = p as i32;
            // Two conjugation moves, second slots may collide.
            assert_eq!(count_instances(R1, pi), falling(p, 4) + falling(p, 3));
            assert_eq!(
                count_instances(H1, pi),
                (falling(p, 4) + falling(p, 3)) * 4
            );
            // Triple of distinct indices, no signs.
            assert_eq!(count_instances(R4, pi), falling(p, 3));
            assert_eq!(count_instances(H4, pi), falling(p, 3) * 4);
            // Triple of distinct indices, all signs live.
            assert_eq!(count_instances(R5, pi), falling(p, 3) * 8);
            assert_eq!(count_instances(R6, pi), falling(p, 3) * 8);
            assert_eq!(count_instances(H9, pi), falling(p, 3) * 8);
            // Four distinct indices.
            assert_eq!(count_instances(R7, pi), falling(p, 4) * 8);
            assert_eq!(count_instances(H5, pi), falling(p, 4) * 8);
            assert_eq!(count_instances(H8, pi), falling(p, 4) * 16);
            // Conjugation against a commutator transvection: a avoids the
            // whole transvection, b avoids only a and c.
            let r3_count = falling(p, 4) * (p - 2) * 8;
            assert_eq!(count_instances(R3, pi), r3_count);
            assert_eq!(count_instances(H3, pi), r3_count * 2);
            // Head, pair, second head possibly equal to a second-slot
            // letter: (a,b,c,d) with b = d allowed.
            let r9_index_tuples = falling(p, 3) * (p - 2);
            assert_eq!(count_instances(R9, pi), r9_index_tuples * 16);
            assert_eq!(count_instances(H7, pi), r9_index_tuples * 16);
            // (a,b,c,d,e): d fresh, e distinct from a and d.
            let r8_index_tuples = falling(p, 4) * (p - 2);
            assert_eq!(count_instances(R8, pi), r8_index_tuples * 32);
            assert_eq!(count_instances(H6, pi), r8_index_tuples * 32);
            // Two commutator transvections: heads equal only as inverses.
            if p >= 3 {
                let same_head = falling(p, 3) * (p - 1) * (p - 2) * 32;
                let diff_head = falling(p, 3) * (p - 3) * (p - 2) * (p - 3) * 64;
                assert_eq!(count_instances(R2, pi), same_head + diff_head);
                assert_eq!(count_instances(H2, pi), same_head + diff_head);
            }
        }
    }

    #[test]
    fn sharded_enumeration_partitions_the_stream() {
        let mut whole = Vec::new();
        for_each_instance(R9, 3, |p| whole.push(p.to_vec()));
        let mut merged = Vec::new();
        for shard in 0..4 {
            for_each_instance_sharded(R9, 3, shard, 4, |p| merged.push(p.to_vec()));
        }
        merged.sort();
        let mut sorted_whole = whole.clone();
        sorted_whole.sort();
        assert_eq!(merged, sorted_whole);
        assert_eq!(whole.len(), count_instances(R9, 3) as usize);
    }

    #[test]
    fn validate_rejects_inadmissible_params() {
        assert!(R5.validate(&[1, 2, 2]).is_err());
        assert!(R2.validate(&[1, 2, 3, 1, 4, 5]).is_err()); // equal heads, equal signs
        assert!(R2.validate(&[1, 2, 3, -1, 4, 5]).is_ok()); // inverse heads
        assert!(R2.validate(&[1, 2, 3, 4, 1, 5]).is_err()); // head inside other pair
        assert!(R3.validate(&[1, 2, 3, 2, 4]).is_ok()); // b = d is allowed
        assert!(R3.validate(&[1, 2, 3, 1, 4]).is_err()); // a inside the pair
        assert!(R9.validate(&[1, 2, 3, 2]).is_ok()); // b = d is allowed
        assert!(R8.validate(&[1, 2, 3, 4, 2]).is_ok()); // e = b is allowed
        assert!(R8.validate(&[1, 2, 3, 4, 1]).is_err()); // e = a is not
        assert!(R5.validate(&[1, 2]).is_err());
    }

    #[test]
    fn ignored_signs_are_normalized() {
        let w1 = H4.expand_letters(&[1, 2, -3]).unwrap();
        let w2 = H4.expand_letters(&[1, 2, 3]).unwrap();
        assert_eq!(w1, w2);
        let w3 = H1.expand_letters(&[-1, 2, 3, 4]).unwrap();
        let w4 = H1.expand_letters(&[1, 2, 3, 4]).unwrap();
        assert_eq!(w3, w4);
    }

    #[test]
    fn registry_accepts_a_genuine_relator_template() {
        let mut reg = Registry::new();
        // The commutator [C[1,2], C[3,4]] as a template over four slots.
        let def = ExtraDef {
            name: "disjoint-conj-comm".into(),
            arity: 4,
            probe: ProbePolicy::AllSigns,
            template: vec![
                TemplateLetter::C { a: 1, b: 2 },
                TemplateLetter::C { a: 3, b: 4 },
                TemplateLetter::C { a: 1, b: -2 },
                TemplateLetter::C { a: 3, b: -4 },
            ],
        };
        reg.register(def).unwrap();
        let inst = RelInstance {
            family: FamilyId::Named("disjoint-conj-comm".into()),
            params: vec![2, -3, 4, 1],
        };
        let w = reg.expand(&inst).unwrap();
        assert!(w.evaluates_to_identity(4));
    }

    #[test]
    fn registry_rejects_a_non_relator_template() {
        let mut reg = Registry::new();
        let def = ExtraDef {
            name: "bogus".into(),
            arity: 2,
            probe: ProbePolicy::AllSigns,
            template: vec![TemplateLetter::C { a: 1, b: 2 }],
        };
        let err = reg.register(def).unwrap_err();
        assert!(matches!(err, RelError::NotARelator { .. }));
    }

    #[test]
    fn registry_rejects_builtin_name_collisions() {
        let mut reg = Registry::new();
        let def = ExtraDef {
            name: "R1".into(),
            arity: 4,
            probe: ProbePolicy::AllSigns,
            template: vec![
                TemplateLetter::C { a: 1, b: 2 },
                TemplateLetter::C { a: 1, b: -2 },
            ],
        };
        assert!(matches!(
            reg.register(def),
            Err(RelError::DuplicateName(_))
        ));
    }

    #[test]
    fn extras_load_from_json() {
        let mut reg = Registry::new();
        let json = r#"[{
            "name": "conj-inverse-pair",
            "arity": 2,
            "probe": "all-signs",
            "template": [
                {"k": "C", "a": 1, "b": 2},
                {"k": "C", "a": 1, "b": -2}
            ]
        }]"#;
        assert_eq!(reg.load_extras_json(json).unwrap(), 1);
        let instances = reg
            .enumerate(&FamilyId::Named("conj-inverse-pair".into()), 3)
            .unwrap();
        assert_eq!(instances.len(), 6 * 4);
        for inst in instances {
            assert!(reg.expand(&inst).unwrap().is_identity());
        }
    }
}
