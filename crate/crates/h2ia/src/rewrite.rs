//! Certificate replay: machine-checkable witnesses that a word lies in
//! the normal closure of the defining relations.
//!
//! A certificate lists positioned insertions. Each step splices a word
//! that evaluates to the identity into the current reduced word; if the
//! final word is empty, the start word has been rewritten to the trivial
//! word by relator insertions alone. With `allow_cyclic` set the
//! certificate may also rotate the word, which proves triviality only up
//! to conjugacy (enough when the start word is itself a relator).
//!
//! In strict mode each inserted word must additionally match a
//! registered relation-family instance up to conjugation, rotation, and
//! inversion, so a successful strict replay is evidence usable by the
//! verification suites. Lax mode skips that matching for exploratory
//! reductions.

use crate::alphabet::{IAGen, IAWord};
use crate::relations::Registry;
use crate::theta::relabel_ia_gen;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use thiserror::Error;

/// One replay step: an insertion or (when permitted) a rotation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Step {
    /// Splice `insert` after the first `pos` letters of the current
    /// reduced word, then reduce.
    Insert { pos: usize, insert: IAWord },
    /// Rotate the current word left by `shift` (negative: right).
    Shift { shift: i64 },
}

/// A replayable reduction witness.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Certificate {
    pub start: IAWord,
    pub steps: Vec<Step>,
    #[serde(default)]
    pub allow_cyclic: bool,
    #[serde(default)]
    pub strict: bool,
}

#[derive(Debug, Error)]
pub enum ReplayError {
    #[error("step {step}: position {pos} exceeds current word length {len}")]
    PositionOutOfRange { step: usize, pos: usize, len: usize },
    #[error("step {step}: cyclic shift used without allow_cyclic")]
    CyclicNotAllowed { step: usize },
    #[error("step {step}: inserted word does not match any registered relation instance")]
    NotARelatorInsert { step: usize },
    #[error("certificate is not valid JSON: {0}")]
    BadJson(#[from] serde_json::Error),
}

/// Outcome of a replay.
#[derive(Clone, Debug)]
pub struct Replay {
    /// Word remaining after the last step.
    pub final_word: IAWord,
    /// Whether the final word is empty.
    pub reduces_to_identity: bool,
    /// Intermediate words, one per step.
    pub trace: Vec<IAWord>,
    /// Whether every intermediate word evaluates to the same
    /// automorphism as the start word.
    pub invariant_ok: bool,
    /// First step whose result changed the evaluation, if any.
    pub first_invariant_violation: Option<usize>,
}

/// Splices `insert` after the first `pos` letters of `current`.
pub fn apply_step(current: &IAWord, pos: usize, insert: &IAWord) -> Option<IAWord> {
    if pos > current.len() {
        return None;
    }
    let mut letters: Vec<IAGen> = current.letters()[..pos].to_vec();
    letters.extend_from_slice(insert.letters());
    letters.extend_from_slice(&current.letters()[pos..]);
    Some(IAWord::from_letters(letters))
}

impl Certificate {
    pub fn from_json(text: &str) -> Result<Certificate, ReplayError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).unwrap()
    }

    /// Smallest rank that accommodates every word in the certificate.
    pub fn rank(&self) -> usize {
        let mut r = self.start.max_index();
        for step in &self.steps {
            if let Step::Insert { insert, .. } = step {
                r = r.max(insert.max_index());
            }
        }
        r.max(2) as usize
    }

    /// Replays the certificate, validating every step.
    pub fn replay(&self, registry: &Registry) -> Result<Replay, ReplayError> {
        let n = self.rank();
        let target = self.start.eval(n);
        let mut current = self.start.clone();
        let mut trace = Vec::with_capacity(self.steps.len());
        let mut first_violation = None;
        for (i, step) in self.steps.iter().enumerate() {
            match step {
                Step::Insert { pos, insert } => {
                    if self.strict && !is_relation_instance(insert, registry) {
                        return Err(ReplayError::NotARelatorInsert { step: i });
                    }
                    current = apply_step(&current, *pos, insert).ok_or(
                        ReplayError::PositionOutOfRange {
                            step: i,
                            pos: *pos,
                            len: current.len(),
                        },
                    )?;
                }
                Step::Shift { shift } => {
                    if !self.allow_cyclic {
                        return Err(ReplayError::CyclicNotAllowed { step: i });
                    }
                    let len = current.len() as i64;
                    if len > 0 {
                        let k = shift.rem_euclid(len) as usize;
                        current = current.cyclic_shift(k);
                    }
                }
            }
            if first_violation.is_none() && current.eval(n) != target {
                first_violation = Some(i);
            }
            trace.push(current.clone());
        }
        Ok(Replay {
            reduces_to_identity: current.is_empty(),
            final_word: current,
            trace,
            invariant_ok: first_violation.is_none(),
            first_invariant_violation: first_violation,
        })
    }
}

/// Convenience form of the evaluation-preservation check: replays the
/// certificate and reports whether every intermediate word evaluates to
/// the same automorphism as the start. Malformed certificates report
/// false.
pub fn invariant_check(cert: &Certificate, registry: &Registry) -> bool {
    cert.replay(registry).map(|r| r.invariant_ok).unwrap_or(false)
}

fn distinct_indices(w: &IAWord) -> Vec<i32> {
    let mut set = BTreeSet::new();
    for g in w.letters() {
        match *g {
            IAGen::Conj { a, b } => {
                set.insert(a);
                set.insert(b.abs());
            }
            IAGen::CommTv { a, b, c } => {
                set.insert(a.abs());
                set.insert(b.abs());
                set.insert(c.abs());
            }
        }
    }
    set.into_iter().collect()
}

/// Lexicographically least rotation, the canonical form of a word up to
/// cyclic shifts. The input must already be cyclically reduced.
fn min_rotation(w: &IAWord) -> Vec<IAGen> {
    let letters = w.letters();
    if letters.is_empty() {
        return Vec::new();
    }
    (0..letters.len())
        .map(|k| {
            let mut rot = letters[k..].to_vec();
            rot.extend_from_slice(&letters[..k]);
            rot
        })
        .min()
        .unwrap()
}

/// Whether `insert` is an instance of a registered relation family, up
/// to conjugation, cyclic rotation, and inversion.
///
/// The conjugating word is stripped by cyclic reduction; the core is
/// relabeled onto a dense index range and compared against every family
/// instance over that many indices by canonical rotation.
pub fn is_relation_instance(insert: &IAWord, registry: &Registry) -> bool {
    let core = insert.cyclically_reduce();
    if core.is_empty() {
        return true;
    }
    let indices = distinct_indices(&core);
    let relabel = |w: &IAWord| -> IAWord {
        IAWord::from_letters(
            w.letters()
                .iter()
                .map(|g| {
                    relabel_ia_gen(g, |v| {
                        let j = indices.binary_search(&v.abs()).unwrap() as i32 + 1;
                        v.signum() * j
                    })
                })
                .collect::<Vec<_>>(),
        )
    };
    let dense = relabel(&core);
    let target = min_rotation(&dense);
    let target_inv = min_rotation(&dense.inv());
    let pool = indices.len();
    let mut found = false;
    registry.for_each_expansion(pool, &mut |word: &IAWord| {
        if found {
            return;
        }
        let cand = word.cyclically_reduce();
        if cand.len() != target.len() {
            return;
        }
        let m = min_rotation(&cand);
        if m == target || m == target_inv {
            found = true;
        }
    });
    found
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::relations::Builtin;
    use proptest::prelude::*;

    fn r5_word(a: i32, b: i32, c: i32) -> IAWord {
        IAWord::from_letters(Builtin::R5.expand_letters(&[a, b, c]).unwrap())
    }

    fn lax(start: IAWord, steps: Vec<Step>) -> Certificate {
        Certificate {
            start,
            steps,
            allow_cyclic: false,
            strict: false,
        }
    }

    #[test]
    fn empty_certificate_on_empty_start() {
        let replay = lax(IAWord::identity(), vec![]).replay(&Registry::default()).unwrap();
        assert!(replay.reduces_to_identity);
        assert!(replay.invariant_ok);
        assert!(replay.trace.is_empty());
    }

    #[test]
    fn no_steps_leaves_relator_unreduced() {
        let start = r5_word(1, 2, 3);
        let replay = lax(start.clone(), vec![]).replay(&Registry::default()).unwrap();
        assert!(!replay.reduces_to_identity);
        assert_eq!(replay.final_word, start);
    }

    #[test]
    fn inserting_empty_word_is_identity_step() {
        let w = IAWord::from_letters(vec![IAGen::conj(1, 2), IAGen::conj(3, 1)]);
        assert_eq!(apply_step(&w, 1, &IAWord::identity()).unwrap(), w);
    }

    #[test]
    fn insert_then_inverse_restores_word() {
        let w = IAWord::from_letters(vec![IAGen::conj(1, 2), IAGen::commtv(2, 3, 1)]);
        let r = r5_word(2, 3, 1);
        let cert = lax(
            w.clone(),
            vec![
                Step::Insert { pos: 1, insert: r.clone() },
                Step::Insert { pos: 1, insert: r.inv() },
            ],
        );
        let replay = cert.replay(&Registry::default()).unwrap();
        assert_eq!(replay.final_word, w);
        assert!(replay.invariant_ok);
    }

    #[test]
    fn position_out_of_range_names_step() {
        let cert = lax(
            IAWord::generator(IAGen::conj(1, 2)),
            vec![Step::Insert { pos: 5, insert: IAWord::identity() }],
        );
        match cert.replay(&Registry::default()) {
            Err(ReplayError::PositionOutOfRange { step: 0, pos: 5, len: 1 }) => {}
            other => panic!("expected position error, got {:?}", other),
        }
    }

    #[test]
    fn shift_requires_allow_cyclic() {
        let mut cert = lax(r5_word(1, 2, 3), vec![Step::Shift { shift: 1 }]);
        match cert.replay(&Registry::default()) {
            Err(ReplayError::CyclicNotAllowed { step: 0 }) => {}
            other => panic!("expected cyclic error, got {:?}", other),
        }
        cert.allow_cyclic = true;
        let replay = cert.replay(&Registry::default()).unwrap();
        assert_eq!(replay.trace.len(), 1);
        // A relator evaluates to the identity, so rotation keeps the
        // evaluation invariant.
        assert!(replay.invariant_ok);
    }

    #[test]
    fn non_relator_insert_flags_invariant() {
        let cert = lax(
            IAWord::identity(),
            vec![Step::Insert {
                pos: 0,
                insert: IAWord::generator(IAGen::conj(1, 2)),
            }],
        );
        let replay = cert.replay(&Registry::default()).unwrap();
        assert!(!replay.invariant_ok);
        assert_eq!(replay.first_invariant_violation, Some(0));
        assert!(!invariant_check(&cert, &Registry::default()));
    }

    #[test]
    fn strict_mode_accepts_relator_variants() {
        let registry = Registry::default();
        let r = r5_word(1, 2, 3);
        let conjugator = IAWord::generator(IAGen::commtv(3, -1, 2));
        let variants = vec![
            r.clone(),
            r.cyclic_shift(2),
            r.inv(),
            conjugator.mul(&r).mul(&conjugator.inv()),
        ];
        for (i, v) in variants.into_iter().enumerate() {
            assert!(
                is_relation_instance(&v, &registry),
                "variant {} not recognized",
                i
            );
            let cert = Certificate {
                start: v.inv(),
                steps: vec![Step::Insert { pos: 0, insert: v }],
                allow_cyclic: false,
                strict: true,
            };
            let replay = cert.replay(&registry).unwrap();
            assert!(replay.reduces_to_identity);
            assert!(replay.invariant_ok);
        }
    }

    #[test]
    fn strict_mode_rejects_non_relator() {
        let cert = Certificate {
            start: IAWord::identity(),
            steps: vec![Step::Insert {
                pos: 0,
                insert: IAWord::from_letters(vec![IAGen::conj(1, 2), IAGen::conj(1, 3)]),
            }],
            allow_cyclic: false,
            strict: true,
        };
        match cert.replay(&Registry::default()) {
            Err(ReplayError::NotARelatorInsert { step: 0 }) => {}
            other => panic!("expected strict rejection, got {:?}", other),
        }
    }

    #[test]
    fn json_round_trip_matches_wire_format() {
        let text = r#"{
            "start": [{"k":"C","a":1,"b":2}],
            "steps": [
                {"pos": 1, "insert": [{"k":"Mc","a":2,"b":-3,"c":1}]},
                {"shift": -1}
            ],
            "allow_cyclic": true,
            "strict": false
        }"#;
        let cert = Certificate::from_json(text).unwrap();
        assert_eq!(cert.steps.len(), 2);
        assert_eq!(cert.steps[1], Step::Shift { shift: -1 });
        let back = Certificate::from_json(&cert.to_json()).unwrap();
        assert_eq!(back.start, cert.start);
        assert_eq!(back.steps, cert.steps);
    }

    #[test]
    fn missing_flags_default_to_lax() {
        let cert = Certificate::from_json(r#"{"start": [], "steps": []}"#).unwrap();
        assert!(!cert.allow_cyclic);
        assert!(!cert.strict);
    }

    proptest! {
        #[test]
        fn relator_insertions_preserve_evaluation(
            seed_params in (1i32..=4, 1i32..=4, 1i32..=4),
            pos_fracs in proptest::collection::vec(0.0f64..1.0, 1..4),
        ) {
            let (a, b, c) = seed_params;
            prop_assume!(a != b && b != c && a != c);
            let start = IAWord::from_letters(vec![
                IAGen::conj(a, -b),
                IAGen::commtv(b, c, a),
            ]);
            let mut steps = Vec::new();
            for f in &pos_fracs {
                let r = r5_word(a, b, c);
                // Position scaled to the current length; the word grows
                // as steps accumulate, but any valid position works.
                let pos = (f * start.len() as f64) as usize;
                steps.push(Step::Insert { pos, insert: r });
            }
            let cert = lax(start.clone(), steps);
            let replay = cert.replay(&Registry::default()).unwrap();
            prop_assert!(replay.invariant_ok);
            let n = cert.rank();
            prop_assert_eq!(replay.final_word.eval(n), start.eval(n));
        }
    }
}
