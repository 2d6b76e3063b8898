//! Replay of the coinvariant elimination: the table of action and
//! exchange equations over the relation families H1 to H9, and the
//! case-by-case run that consumes them in dependency order.
//!
//! Equations are stored symbolically. Letters are variables standing
//! for pairwise distinct indices; each letter carries its own sign
//! variable, and a slot may flip it. An action equation states how one
//! transvection moves a family instance: the left side is the acted
//! instance, the right side lists the resulting terms plus an optional
//! opaque marker for lower-order garbage. An exchange identity relates
//! instances without an actor.
//!
//! The replay checks necessary conditions only. For every cited
//! equation, at every sign specialization: each concrete term must be a
//! valid instance whose expansion evaluates to the identity with zero
//! exponent vector; the actor must be well formed and its image of the
//! subject must again be an identity-evaluating word with zero exponent
//! vector; exchange identities that are pure sign or orientation rules
//! must hold formally under the canonicalization. Homological content
//! beyond that (the actual equality of classes) is not recomputed here.

use crate::alphabet::{AutGen, IAWord};
use crate::homlin::{is_commutator_class, H2Expr};
use crate::relations::Builtin;
use crate::theta::ThetaTable;
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use thiserror::Error;

const A: u8 = 0;
const B: u8 = 1;
const C: u8 = 2;
const D: u8 = 3;
const E: u8 = 4;
const F: u8 = 5;

const LETTER_NAMES: [char; 6] = ['a', 'b', 'c', 'd', 'e', 'f'];

/// One slot of a symbolic term: a letter variable, optionally with its
/// sign variable flipped.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct SymSlot {
    pub letter: u8,
    pub flip: bool,
}

const fn pos(letter: u8) -> SymSlot {
    SymSlot {
        letter,
        flip: false,
    }
}

const fn neg(letter: u8) -> SymSlot {
    SymSlot { letter, flip: true }
}

impl SymSlot {
    fn subst(self, map: &[(u8, SymSlot)]) -> SymSlot {
        for &(from, to) in map {
            if self.letter == from {
                return SymSlot {
                    letter: to.letter,
                    flip: self.flip ^ to.flip,
                };
            }
        }
        self
    }
}

impl fmt::Display for SymSlot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.flip {
            write!(f, "-")?;
        }
        write!(f, "{}", LETTER_NAMES[self.letter as usize])
    }
}

/// A signed family instance with symbolic slots.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SymTerm {
    pub coeff: i64,
    pub family: Builtin,
    pub slots: Vec<SymSlot>,
}

fn term(coeff: i64, family: Builtin, slots: &[SymSlot]) -> SymTerm {
    SymTerm {
        coeff,
        family,
        slots: slots.to_vec(),
    }
}

impl SymTerm {
    fn subst(&self, map: &[(u8, SymSlot)]) -> SymTerm {
        SymTerm {
            coeff: self.coeff,
            family: self.family,
            slots: self.slots.iter().map(|s| s.subst(map)).collect(),
        }
    }

    fn same_shape(&self, rhs: &SymTerm) -> bool {
        self.family == rhs.family && self.slots == rhs.slots
    }
}

impl fmt::Display for SymTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeff == -1 {
            write!(f, "-")?;
        } else if self.coeff != 1 {
            write!(f, "{}*", self.coeff)?;
        }
        write!(f, "{}[", self.family)?;
        for (i, s) in self.slots.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", s)?;
        }
        write!(f, "]")
    }
}

/// The acting transvection: head slot (a letter with its sign,
/// possibly flipped), target letter, and whether the exponent flips the
/// target letter's sign variable.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct SymActor {
    pub head: SymSlot,
    pub target: u8,
    pub exp_flip: bool,
}

impl SymActor {
    fn subst(self, map: &[(u8, SymSlot)]) -> SymActor {
        let target = SymSlot {
            letter: self.target,
            flip: self.exp_flip,
        }
        .subst(map);
        SymActor {
            head: self.head.subst(map),
            target: target.letter,
            exp_flip: target.flip,
        }
    }
}

impl fmt::Display for SymActor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "M[{}, {}]^{}{}",
            self.head,
            LETTER_NAMES[self.target as usize],
            if self.exp_flip { "-" } else { "" },
            LETTER_NAMES[self.target as usize],
        )
    }
}

#[derive(Clone, Debug)]
pub enum EquationKind {
    /// actor . subject = sum of rhs terms (+ wildcard garbage).
    Action {
        actor: SymActor,
        subject: SymTerm,
        rhs: Vec<SymTerm>,
        wildcard: Vec<Builtin>,
    },
    /// lhs = sum of rhs terms. Pure sign or orientation rules are
    /// additionally required to hold under the formal
    /// canonicalization.
    Identity {
        lhs: SymTerm,
        rhs: Vec<SymTerm>,
        formally_canonical: bool,
    },
}

#[derive(Clone, Debug)]
pub struct Equation {
    pub id: &'static str,
    pub kind: EquationKind,
}

fn action(
    id: &'static str,
    actor: SymActor,
    subject: SymTerm,
    rhs: Vec<SymTerm>,
    wildcard: Vec<Builtin>,
) -> Equation {
    Equation {
        id,
        kind: EquationKind::Action {
            actor,
            subject,
            rhs,
            wildcard,
        },
    }
}

fn identity(
    id: &'static str,
    lhs: SymTerm,
    rhs: Vec<SymTerm>,
    formally_canonical: bool,
) -> Equation {
    Equation {
        id,
        kind: EquationKind::Identity {
            lhs,
            rhs,
            formally_canonical,
        },
    }
}

fn actor(head: SymSlot, target: u8, exp_flip: bool) -> SymActor {
    SymActor {
        head,
        target,
        exp_flip,
    }
}

/// The full equation table.
pub fn standard_equations() -> Vec<Equation> {
    use Builtin::{H1, H2, H3, H4, H5, H6, H7, H8, H9};
    let mut eqs = Vec::new();

    // Sign and orientation rules.
    eqs.push(identity(
        "h1-sign",
        term(1, H1, &[pos(A), pos(B), pos(C), pos(D)]),
        vec![term(-1, H1, &[pos(A), pos(B), pos(C), neg(D)])],
        true,
    ));
    eqs.push(identity(
        "h3-sign",
        term(1, H3, &[pos(A), pos(B), pos(C), pos(D), pos(E)]),
        vec![term(-1, H3, &[pos(A), pos(B), pos(C), pos(D), neg(E)])],
        true,
    ));
    eqs.push(identity(
        "h3-swap",
        term(1, H3, &[pos(A), pos(B), pos(C), pos(D), pos(E)]),
        vec![term(-1, H3, &[pos(A), pos(C), pos(B), pos(D), pos(E)])],
        true,
    ));

    // Exchange identities between the repeated-slot cases of H6.
    eqs.push(identity(
        "h6-second-param",
        term(1, H6, &[pos(A), pos(E), pos(C), pos(D), pos(E)]),
        vec![
            term(1, H6, &[pos(A), pos(C), neg(E), pos(D), pos(E)]),
            term(-1, H7, &[pos(A), pos(E), pos(D), pos(E)]),
            term(-1, H7, &[pos(A), neg(E), pos(D), pos(E)]),
        ],
        false,
    ));
    eqs.push(identity(
        "h6-second-third",
        term(1, H6, &[pos(A), pos(B), pos(C), pos(D), pos(E)]),
        vec![term(-1, H6, &[pos(A), pos(C), pos(B), pos(D), pos(E)])],
        true,
    ));

    // Moving the second slot of an H1.
    eqs.push(action(
        "generic-h1",
        actor(pos(B), E, false),
        term(1, H1, &[pos(A), pos(B), pos(C), pos(D)]),
        vec![
            term(1, H1, &[pos(A), pos(B), pos(C), pos(D)]),
            term(1, H1, &[pos(A), pos(E), pos(C), pos(D)]),
        ],
        vec![],
    ));
    eqs.push(action(
        "generic-h1-fixed",
        actor(pos(B), E, false),
        term(1, H1, &[pos(A), pos(E), pos(C), pos(D)]),
        vec![term(1, H1, &[pos(A), pos(E), pos(C), pos(D)])],
        vec![],
    ));
    eqs.push(action(
        "special-h1",
        actor(pos(B), D, false),
        term(1, H1, &[pos(A), pos(B), pos(C), pos(D)]),
        vec![
            term(1, H1, &[pos(A), pos(B), pos(C), pos(D)]),
            term(1, H1, &[pos(A), pos(D), pos(C), pos(D)]),
        ],
        vec![],
    ));
    eqs.push(action(
        "h1-to-h3",
        actor(pos(A), E, true),
        term(1, H1, &[pos(A), pos(B), pos(C), pos(D)]),
        vec![
            term(1, H1, &[pos(A), pos(B), pos(C), pos(D)]),
            term(-1, H3, &[pos(A), pos(E), pos(B), pos(C), pos(D)]),
        ],
        vec![],
    ));
    eqs.push(action(
        "generic-h2",
        actor(pos(D), E, true),
        term(1, H3, &[pos(A), pos(B), pos(C), pos(D), pos(F)]),
        vec![
            term(1, H3, &[pos(A), pos(B), pos(C), pos(D), pos(F)]),
            term(
                -1,
                H2,
                &[pos(A), pos(B), pos(C), pos(D), pos(E), pos(F)],
            ),
        ],
        vec![],
    ));
    eqs.push(action(
        "both-sides-h2",
        actor(neg(A), D, false),
        term(1, H2, &[pos(A), pos(B), pos(C), neg(D), pos(F), pos(E)]),
        vec![
            term(1, H2, &[pos(A), pos(B), pos(C), neg(D), pos(F), pos(E)]),
            term(
                -1,
                H2,
                &[pos(A), pos(B), pos(C), neg(A), pos(E), pos(F)],
            ),
        ],
        vec![],
    ));

    // Moving slots of H4 and H8, and producing H5.
    eqs.push(action(
        "h4-step",
        actor(pos(D), B, false),
        term(1, H4, &[pos(A), pos(D), pos(C)]),
        vec![
            term(1, H4, &[pos(A), pos(D), pos(C)]),
            term(1, H4, &[pos(A), pos(B), pos(C)]),
        ],
        vec![],
    ));
    eqs.push(action(
        "h4-fixed",
        actor(pos(D), B, false),
        term(1, H4, &[pos(A), pos(B), pos(C)]),
        vec![term(1, H4, &[pos(A), pos(B), pos(C)])],
        vec![],
    ));
    eqs.push(action(
        "h5-step",
        actor(pos(B), C, true),
        term(1, H1, &[pos(A), pos(B), pos(C), pos(D)]),
        vec![
            term(1, H1, &[pos(A), pos(B), pos(C), pos(D)]),
            term(-1, H3, &[pos(B), pos(D), pos(C), pos(A), pos(C)]),
            term(1, H5, &[pos(A), pos(B), pos(C), pos(D)]),
            term(1, H4, &[pos(C), pos(D), pos(A)]),
        ],
        vec![],
    ));
    eqs.push(action(
        "h8-step",
        actor(pos(D), E, false),
        term(1, H8, &[pos(A), pos(B), pos(C), pos(D)]),
        vec![
            term(1, H8, &[pos(A), pos(B), pos(C), pos(D)]),
            term(1, H8, &[pos(A), pos(B), pos(C), pos(E)]),
        ],
        vec![Builtin::H1],
    ));
    eqs.push(action(
        "h8-fixed",
        actor(pos(D), E, false),
        term(1, H8, &[pos(A), pos(B), pos(C), pos(E)]),
        vec![term(1, H8, &[pos(A), pos(B), pos(C), pos(E)])],
        vec![],
    ));

    // Moving slots of H6 and H7.
    eqs.push(action(
        "generic-h6",
        actor(pos(F), E, false),
        term(1, H6, &[pos(A), pos(B), pos(C), pos(D), pos(F)]),
        vec![
            term(1, H6, &[pos(A), pos(B), pos(C), pos(D), pos(F)]),
            term(1, H6, &[pos(A), pos(B), pos(C), pos(D), pos(E)]),
        ],
        vec![],
    ));
    eqs.push(action(
        "generic-h6-fixed",
        actor(pos(F), E, false),
        term(1, H6, &[pos(A), pos(B), pos(C), pos(D), pos(E)]),
        vec![term(1, H6, &[pos(A), pos(B), pos(C), pos(D), pos(E)])],
        vec![],
    ));
    eqs.push(action(
        "generic-h7",
        actor(pos(C), E, true),
        term(1, H7, &[pos(A), pos(B), pos(E), pos(D)]),
        vec![
            term(1, H7, &[pos(A), pos(B), pos(E), pos(D)]),
            term(1, H7, &[pos(A), pos(B), pos(C), pos(D)]),
            term(1, H6, &[pos(E), pos(B), pos(A), pos(C), pos(D)]),
        ],
        vec![Builtin::H1, Builtin::H2, Builtin::H3],
    ));
    eqs.push(action(
        "generic-h7-fixed",
        actor(pos(C), E, true),
        term(1, H7, &[pos(A), pos(B), pos(C), pos(D)]),
        vec![
            term(1, H7, &[pos(A), pos(B), pos(C), pos(D)]),
            term(
                1,
                H2,
                &[neg(C), neg(E), neg(D), pos(C), pos(B), pos(A)],
            ),
        ],
        vec![],
    ));
    eqs.push(action(
        "part1-h7",
        actor(pos(D), B, false),
        term(1, H7, &[pos(A), pos(D), pos(C), pos(D)]),
        vec![
            term(1, H7, &[pos(A), pos(D), pos(C), pos(D)]),
            term(1, H7, &[pos(A), pos(B), pos(C), pos(B)]),
            term(1, H7, &[pos(A), pos(B), pos(C), pos(D)]),
            term(1, H7, &[pos(A), pos(D), pos(C), pos(B)]),
        ],
        vec![Builtin::H1],
    ));
    eqs.push(action(
        "part1-h7-fixed",
        actor(pos(D), B, false),
        term(1, H7, &[pos(A), pos(B), pos(C), pos(B)]),
        vec![term(1, H7, &[pos(A), pos(B), pos(C), pos(B)])],
        vec![],
    ));
    eqs.push(action(
        "part2-h7",
        actor(pos(D), B, false),
        term(1, H7, &[pos(A), neg(D), pos(C), pos(D)]),
        vec![
            term(1, H7, &[pos(A), neg(D), pos(C), pos(D)]),
            term(1, H7, &[pos(A), neg(B), pos(C), pos(B)]),
            term(1, H7, &[pos(A), neg(D), pos(C), pos(B)]),
            term(-1, H7, &[pos(A), neg(B), pos(C), neg(D)]),
        ],
        vec![],
    ));
    eqs.push(action(
        "part2-h7-fixed",
        actor(pos(D), B, false),
        term(1, H7, &[pos(A), neg(B), pos(C), pos(B)]),
        vec![term(1, H7, &[pos(A), neg(B), pos(C), pos(B)])],
        vec![],
    ));
    eqs.push(action(
        "special-h6",
        actor(pos(F), E, false),
        term(1, H6, &[pos(A), pos(F), pos(C), pos(D), pos(F)]),
        vec![
            term(1, H6, &[pos(A), pos(F), pos(C), pos(D), pos(F)]),
            term(-1, H7, &[pos(A), pos(E), pos(D), pos(F)]),
            term(-1, H7, &[pos(A), pos(E), pos(D), pos(E)]),
            term(1, H6, &[pos(A), pos(F), pos(C), pos(D), pos(E)]),
            term(-1, H7, &[pos(A), neg(E), pos(D), pos(F)]),
            term(-1, H7, &[pos(A), neg(E), pos(D), pos(E)]),
            term(1, H6, &[pos(A), pos(E), pos(C), pos(D), pos(F)]),
            term(1, H6, &[pos(A), pos(E), pos(C), pos(D), pos(E)]),
        ],
        vec![],
    ));
    eqs.push(action(
        "special-h6-fixed",
        actor(pos(F), E, false),
        term(1, H6, &[pos(A), pos(E), pos(C), pos(D), pos(E)]),
        vec![term(1, H6, &[pos(A), pos(E), pos(C), pos(D), pos(E)])],
        vec![],
    ));

    // Moving the second slot of H9.
    eqs.push(action(
        "h9-step",
        actor(pos(B), D, false),
        term(1, H9, &[pos(A), pos(B), pos(C)]),
        vec![
            term(1, H9, &[pos(A), pos(B), pos(C)]),
            term(1, H9, &[pos(A), pos(D), pos(C)]),
        ],
        vec![
            Builtin::H1,
            Builtin::H2,
            Builtin::H3,
            Builtin::H4,
            Builtin::H5,
        ],
    ));
    eqs.push(action(
        "h9-fixed",
        actor(pos(B), D, false),
        term(1, H9, &[pos(A), pos(D), pos(C)]),
        vec![term(1, H9, &[pos(A), pos(D), pos(C)])],
        vec![
            Builtin::H1,
            Builtin::H2,
            Builtin::H3,
            Builtin::H4,
            Builtin::H5,
            Builtin::H6,
        ],
    ));

    eqs
}

/// The elimination cases: each family splits by its repeated-slot
/// pattern, and each case names the equations that express it.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum CaseId {
    H1Generic,
    H1Special,
    H2Generic,
    H2Special,
    H3,
    H4,
    H5,
    H6Generic,
    H7Generic,
    H7SpecialAligned,
    H7SpecialOpposed,
    H6SpecialPrimary,
    H6SpecialDerived,
    H8,
    H9,
}

impl CaseId {
    pub fn name(self) -> &'static str {
        match self {
            CaseId::H1Generic => "H1-generic",
            CaseId::H1Special => "H1-special",
            CaseId::H2Generic => "H2-generic",
            CaseId::H2Special => "H2-special",
            CaseId::H3 => "H3",
            CaseId::H4 => "H4",
            CaseId::H5 => "H5",
            CaseId::H6Generic => "H6-generic",
            CaseId::H7Generic => "H7-generic",
            CaseId::H7SpecialAligned => "H7-special-aligned",
            CaseId::H7SpecialOpposed => "H7-special-opposed",
            CaseId::H6SpecialPrimary => "H6-special-primary",
            CaseId::H6SpecialDerived => "H6-special-derived",
            CaseId::H8 => "H8",
            CaseId::H9 => "H9",
        }
    }
}

impl fmt::Display for CaseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Repeated-slot classification of a symbolic term.
pub fn classify(t: &SymTerm) -> CaseId {
    let s = &t.slots;
    match t.family {
        Builtin::H1 => {
            if s[1].letter == s[3].letter {
                CaseId::H1Special
            } else {
                CaseId::H1Generic
            }
        }
        Builtin::H2 => {
            if s[0].letter == s[3].letter {
                CaseId::H2Special
            } else {
                CaseId::H2Generic
            }
        }
        Builtin::H3 => CaseId::H3,
        Builtin::H4 => CaseId::H4,
        Builtin::H5 => CaseId::H5,
        Builtin::H6 => {
            if s[1].letter == s[4].letter {
                if s[1].flip == s[4].flip {
                    CaseId::H6SpecialPrimary
                } else {
                    CaseId::H6SpecialDerived
                }
            } else if s[2].letter == s[4].letter {
                CaseId::H6SpecialDerived
            } else {
                CaseId::H6Generic
            }
        }
        Builtin::H7 => {
            if s[1].letter == s[3].letter {
                if s[1].flip == s[3].flip {
                    CaseId::H7SpecialAligned
                } else {
                    CaseId::H7SpecialOpposed
                }
            } else {
                CaseId::H7Generic
            }
        }
        Builtin::H8 => CaseId::H8,
        Builtin::H9 => CaseId::H9,
        other => panic!("classify called on non-H family {}", other),
    }
}

fn cases_of_family(f: Builtin) -> &'static [CaseId] {
    match f {
        Builtin::H1 => &[CaseId::H1Generic, CaseId::H1Special],
        Builtin::H2 => &[CaseId::H2Generic, CaseId::H2Special],
        Builtin::H3 => &[CaseId::H3],
        Builtin::H4 => &[CaseId::H4],
        Builtin::H5 => &[CaseId::H5],
        Builtin::H6 => &[
            CaseId::H6Generic,
            CaseId::H6SpecialPrimary,
            CaseId::H6SpecialDerived,
        ],
        Builtin::H7 => &[
            CaseId::H7Generic,
            CaseId::H7SpecialAligned,
            CaseId::H7SpecialOpposed,
        ],
        Builtin::H8 => &[CaseId::H8],
        Builtin::H9 => &[CaseId::H9],
        other => panic!("no cases for non-H family {}", other),
    }
}

/// One cited equation, possibly specialized by unifying letters (this
/// is how the stated coincidence allowances are exercised).
#[derive(Clone, Debug)]
pub(crate) struct Usage {
    pub eq: &'static str,
    pub subst: Vec<(u8, SymSlot)>,
}

fn plain(eq: &'static str) -> Usage {
    Usage {
        eq,
        subst: Vec::new(),
    }
}

fn specialized(eq: &'static str, subst: &[(u8, SymSlot)]) -> Usage {
    Usage {
        eq,
        subst: subst.to_vec(),
    }
}

#[derive(Clone, Debug)]
pub(crate) enum Rational {
    /// f.r - r = s with f fixing s; scaling the actor lands it in the
    /// level-l congruence subgroup, so s dies rationally.
    First { step: Usage, fixed: Usage },
    /// f.r - r = s with r already eliminated, so s dies. Extra usages
    /// carry the sign rules needed for the remaining sign patterns.
    Second { step: Usage, extra: Vec<Usage> },
    /// Exchange identities transporting the case into eliminated ones.
    Transport(Vec<Usage>),
}

#[derive(Clone, Debug)]
pub(crate) struct CaseSpec {
    pub id: CaseId,
    pub family: Builtin,
    pub full: Vec<Usage>,
    pub rational: Rational,
}

pub(crate) fn standard_cases() -> Vec<CaseSpec> {
    use Builtin::{H1, H2, H3, H4, H5, H6, H7, H8, H9};
    vec![
        CaseSpec {
            id: CaseId::H1Generic,
            family: H1,
            full: vec![plain("generic-h1")],
            rational: Rational::First {
                step: plain("generic-h1"),
                fixed: plain("generic-h1-fixed"),
            },
        },
        CaseSpec {
            id: CaseId::H1Special,
            family: H1,
            full: vec![plain("special-h1"), specialized("h1-sign", &[(B, pos(D))])],
            rational: Rational::Second {
                step: plain("special-h1"),
                extra: vec![specialized("h1-sign", &[(B, pos(D))])],
            },
        },
        CaseSpec {
            id: CaseId::H2Generic,
            family: H2,
            full: vec![plain("generic-h2")],
            rational: Rational::Second {
                step: plain("generic-h2"),
                extra: vec![],
            },
        },
        CaseSpec {
            id: CaseId::H2Special,
            family: H2,
            full: vec![plain("both-sides-h2")],
            rational: Rational::Second {
                step: plain("both-sides-h2"),
                extra: vec![],
            },
        },
        CaseSpec {
            id: CaseId::H3,
            family: H3,
            full: vec![plain("h1-to-h3"), plain("h3-sign"), plain("h3-swap")],
            rational: Rational::Second {
                step: plain("h1-to-h3"),
                extra: vec![plain("h3-sign"), plain("h3-swap")],
            },
        },
        CaseSpec {
            id: CaseId::H4,
            family: H4,
            full: vec![plain("h4-step")],
            rational: Rational::First {
                step: plain("h4-step"),
                fixed: plain("h4-fixed"),
            },
        },
        CaseSpec {
            id: CaseId::H5,
            family: H5,
            full: vec![plain("h5-step")],
            rational: Rational::Second {
                step: plain("h5-step"),
                extra: vec![],
            },
        },
        CaseSpec {
            id: CaseId::H6Generic,
            family: H6,
            full: vec![plain("generic-h6")],
            rational: Rational::First {
                step: plain("generic-h6"),
                fixed: plain("generic-h6-fixed"),
            },
        },
        CaseSpec {
            id: CaseId::H7Generic,
            family: H7,
            full: vec![plain("generic-h7")],
            rational: Rational::First {
                step: plain("generic-h7"),
                fixed: plain("generic-h7-fixed"),
            },
        },
        CaseSpec {
            id: CaseId::H7SpecialAligned,
            family: H7,
            full: vec![plain("part1-h7")],
            rational: Rational::First {
                step: plain("part1-h7"),
                fixed: plain("part1-h7-fixed"),
            },
        },
        CaseSpec {
            id: CaseId::H7SpecialOpposed,
            family: H7,
            full: vec![plain("part2-h7")],
            rational: Rational::First {
                step: plain("part2-h7"),
                fixed: plain("part2-h7-fixed"),
            },
        },
        CaseSpec {
            id: CaseId::H6SpecialPrimary,
            family: H6,
            full: vec![plain("special-h6")],
            rational: Rational::First {
                step: plain("special-h6"),
                fixed: plain("special-h6-fixed"),
            },
        },
        CaseSpec {
            id: CaseId::H6SpecialDerived,
            family: H6,
            full: vec![
                plain("h6-second-param"),
                specialized("h6-second-third", &[(B, pos(E))]),
                specialized("h6-second-third", &[(C, neg(E))]),
            ],
            rational: Rational::Transport(vec![
                plain("h6-second-param"),
                specialized("h6-second-third", &[(B, pos(E))]),
                specialized("h6-second-third", &[(C, neg(E))]),
            ]),
        },
        CaseSpec {
            id: CaseId::H8,
            family: H8,
            full: vec![plain("h8-step")],
            rational: Rational::First {
                step: plain("h8-step"),
                fixed: plain("h8-fixed"),
            },
        },
        CaseSpec {
            id: CaseId::H9,
            family: H9,
            full: vec![plain("h9-step")],
            rational: Rational::First {
                step: plain("h9-step"),
                fixed: plain("h9-fixed"),
            },
        },
    ]
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ReplayMode {
    Full,
    RationalCongruence(u32),
}

impl fmt::Display for ReplayMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ReplayMode::Full => write!(f, "full"),
            ReplayMode::RationalCongruence(l) => write!(f, "rational-congruence({})", l),
        }
    }
}

#[derive(Debug, Error)]
pub enum CoinvError {
    #[error("case {case} cites missing equation {equation}")]
    MissingEquation { case: String, equation: String },
    #[error("circular dependency among cases: {0}")]
    CircularDependency(String),
    #[error("equation {equation}: {detail}")]
    CheckFailed { equation: String, detail: String },
    #[error("case {case}: term {term} needs case {needs} eliminated first")]
    DependencyViolation {
        case: String,
        term: String,
        needs: String,
    },
}

#[derive(Clone, Debug, Serialize)]
pub struct ElimStep {
    pub case: String,
    pub family: String,
    pub method: String,
    pub eliminated_by: Vec<String>,
    pub depends_on: Vec<String>,
    pub letters: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct EliminationLog {
    pub mode: String,
    pub rank: usize,
    pub cases: Vec<ElimStep>,
}

/// Analysis of one specialized usage: which terms are the case's own,
/// which belong to other cases, and the wildcard families.
struct UsageView {
    own: Vec<SymTerm>,
    others: Vec<(SymTerm, CaseId)>,
    subject_case: Option<CaseId>,
    letters: usize,
}

fn view_usage(
    case: CaseId,
    usage: &Usage,
    by_id: &BTreeMap<&str, &Equation>,
    deps: &mut BTreeSet<CaseId>,
) -> Result<UsageView, CoinvError> {
    let eq = by_id
        .get(usage.eq)
        .ok_or_else(|| CoinvError::MissingEquation {
            case: case.name().into(),
            equation: usage.eq.into(),
        })?;
    let mut own = Vec::new();
    let mut others = Vec::new();
    let mut subject_case = None;
    let mut letters = BTreeSet::new();
    fn note(letters: &mut BTreeSet<u8>, t: &SymTerm) {
        for s in &t.slots {
            letters.insert(s.letter);
        }
    }
    match &eq.kind {
        EquationKind::Action {
            actor,
            subject,
            rhs,
            wildcard,
        } => {
            let actor = actor.subst(&usage.subst);
            let subject = subject.subst(&usage.subst);
            letters.insert(actor.head.letter);
            letters.insert(actor.target);
            note(&mut letters, &subject);
            subject_case = Some(classify(&subject));
            let mut copy_seen = false;
            for t in rhs {
                let t = t.subst(&usage.subst);
                note(&mut letters, &t);
                if !copy_seen && t.coeff == 1 && t.same_shape(&subject) {
                    copy_seen = true;
                    continue;
                }
                let c = classify(&t);
                if c == case {
                    own.push(t);
                } else {
                    deps.insert(c);
                    others.push((t, c));
                }
            }
            if !copy_seen {
                return Err(CoinvError::CheckFailed {
                    equation: usage.eq.into(),
                    detail: format!("right side lacks the subject term {}", subject),
                });
            }
            for fam in wildcard {
                for &c in cases_of_family(*fam) {
                    if c != case {
                        deps.insert(c);
                    }
                }
            }
        }
        EquationKind::Identity { lhs, rhs, .. } => {
            let lhs = lhs.subst(&usage.subst);
            note(&mut letters, &lhs);
            let c = classify(&lhs);
            if c == case {
                own.push(lhs);
            } else {
                deps.insert(c);
                others.push((lhs, c));
            }
            for t in rhs {
                let t = t.subst(&usage.subst);
                note(&mut letters, &t);
                let c = classify(&t);
                if c == case {
                    own.push(t);
                } else {
                    deps.insert(c);
                    others.push((t, c));
                }
            }
        }
    }
    Ok(UsageView {
        own,
        others,
        subject_case,
        letters: letters.len(),
    })
}

/// Instantiates a specialized equation with distinct indices and runs
/// the necessary conditions over every sign assignment.
fn check_usage(
    usage: &Usage,
    by_id: &BTreeMap<&str, &Equation>,
    congruence_level: Option<u32>,
) -> Result<(), CoinvError> {
    let eq = by_id[usage.eq];
    let fail = |detail: String| CoinvError::CheckFailed {
        equation: usage.eq.into(),
        detail,
    };

    // Collect the specialized pieces.
    let (actor_sym, terms): (Option<SymActor>, Vec<SymTerm>) = match &eq.kind {
        EquationKind::Action {
            actor,
            subject,
            rhs,
            ..
        } => {
            let mut ts = vec![subject.subst(&usage.subst)];
            ts.extend(rhs.iter().map(|t| t.subst(&usage.subst)));
            (Some(actor.subst(&usage.subst)), ts)
        }
        EquationKind::Identity { lhs, rhs, .. } => {
            let mut ts = vec![lhs.subst(&usage.subst)];
            ts.extend(rhs.iter().map(|t| t.subst(&usage.subst)));
            (None, ts)
        }
    };

    // Index assignment: used letters in sorted order become 1..k.
    let mut letters: BTreeSet<u8> = terms
        .iter()
        .flat_map(|t| t.slots.iter().map(|s| s.letter))
        .collect();
    if let Some(a) = &actor_sym {
        letters.insert(a.head.letter);
        letters.insert(a.target);
    }
    let letters: Vec<u8> = letters.into_iter().collect();
    let k = letters.len();
    let index_of = |l: u8| -> i32 { letters.iter().position(|&x| x == l).unwrap() as i32 + 1 };

    let theta = ThetaTable::standard();
    for mask in 0u32..(1 << k) {
        let sign_of = |l: u8| -> i32 {
            let bit = letters.iter().position(|&x| x == l).unwrap();
            if mask & (1 << bit) != 0 {
                -1
            } else {
                1
            }
        };
        let slot_value =
            |s: &SymSlot| -> i32 { sign_of(s.letter) * if s.flip { -1 } else { 1 } * index_of(s.letter) };

        let mut concrete = Vec::with_capacity(terms.len());
        for t in &terms {
            let params: Vec<i32> = t.slots.iter().map(&slot_value).collect();
            t.family
                .validate(&params)
                .map_err(|e| fail(format!("term {} invalid at {:?}: {}", t, params, e)))?;
            let word = IAWord::from_letters(t.family.expand_letters(&params).unwrap());
            if !word.evaluates_to_identity(k) {
                return Err(fail(format!("term {} at {:?} is not a relator", t, params)));
            }
            if !is_commutator_class(&word) {
                return Err(fail(format!(
                    "term {} at {:?} has nonzero exponent vector",
                    t, params
                )));
            }
            concrete.push((t, params, word));
        }

        if let Some(a) = &actor_sym {
            if a.head.letter == a.target {
                return Err(fail(format!("actor {} is degenerate", a)));
            }
            let head = slot_value(&a.head);
            let exp = sign_of(a.target) * if a.exp_flip { -1 } else { 1 };
            let gen = AutGen::try_transv(head, exp * index_of(a.target))
                .map_err(|e| fail(format!("actor {} invalid: {}", a, e)))?;
            // The acted subject must stay a zero-exponent relator.
            let (_, _, subject_word) = &concrete[0];
            let image = theta.apply_gen(&gen, subject_word);
            if !image.evaluates_to_identity(k) {
                return Err(fail(format!(
                    "actor {} image of the subject is not a relator",
                    a
                )));
            }
            if !is_commutator_class(&image) {
                return Err(fail(format!(
                    "actor {} image of the subject has nonzero exponent vector",
                    a
                )));
            }
            if let Some(l) = congruence_level {
                let abel = gen.action(k).abelianization();
                let mut power = abel.clone();
                for _ in 1..l {
                    power = power.mul(&abel);
                }
                let m = l as i64;
                for i in 1..=k {
                    for j in 1..=k {
                        let want = if i == j { 1 } else { 0 };
                        if (power.entry(i, j) - want).rem_euclid(m) != 0 {
                            return Err(fail(format!(
                                "actor {} power {} is not trivial modulo {}",
                                a, l, l
                            )));
                        }
                    }
                }
            }
        }

        if let EquationKind::Identity {
            formally_canonical: true,
            ..
        } = &eq.kind
        {
            // Pure sign and orientation rules must agree with the
            // formal canonicalization: lhs equals the sum of the rhs.
            let (lhs_term, lhs_params, _) = &concrete[0];
            let mut lhs = H2Expr::term(lhs_term.family, lhs_params, lhs_term.coeff);
            let mut rhs = H2Expr::zero();
            for (t, params, _) in &concrete[1..] {
                rhs.add_term(t.family, params, t.coeff);
            }
            lhs = lhs.add(&rhs.neg());
            if !lhs.is_zero() {
                return Err(fail(format!(
                    "canonicalization mismatch at mask {:#b}: difference {}",
                    mask, lhs
                )));
            }
        }
    }
    Ok(())
}

fn find_subst_term(eq: &Equation, usage: &Usage) -> SymTerm {
    match &eq.kind {
        EquationKind::Action { subject, .. } => subject.subst(&usage.subst),
        EquationKind::Identity { lhs, .. } => lhs.subst(&usage.subst),
    }
}

pub(crate) fn replay_with_cases(
    equations: &[Equation],
    cases: &[CaseSpec],
    mode: ReplayMode,
) -> Result<EliminationLog, CoinvError> {
    let by_id: BTreeMap<&str, &Equation> = equations.iter().map(|e| (e.id, e)).collect();

    // Pass 1: per case, gather usages, dependencies, and letter counts.
    struct Analyzed<'c> {
        spec: &'c CaseSpec,
        usages: Vec<Usage>,
        deps: BTreeSet<CaseId>,
        views: Vec<UsageView>,
        method: String,
    }
    let mut analyzed = Vec::new();
    for spec in cases {
        let (usages, method): (Vec<Usage>, String) = match mode {
            ReplayMode::Full => {
                let has_action = spec.full.iter().any(|u| {
                    by_id
                        .get(u.eq)
                        .is_some_and(|e| matches!(e.kind, EquationKind::Action { .. }))
                });
                (
                    spec.full.clone(),
                    if has_action { "coboundary" } else { "identity-transport" }.into(),
                )
            }
            ReplayMode::RationalCongruence(l) => match &spec.rational {
                Rational::First { step, fixed } => (
                    vec![step.clone(), fixed.clone()],
                    format!("scaled-coboundary({})", l),
                ),
                Rational::Second { step, extra } => {
                    let mut us = vec![step.clone()];
                    us.extend(extra.iter().cloned());
                    (us, "zero-subject".into())
                }
                Rational::Transport(us) => (us.clone(), "identity-transport".into()),
            },
        };
        let mut deps = BTreeSet::new();
        let mut views = Vec::new();
        for u in &usages {
            views.push(view_usage(spec.id, u, &by_id, &mut deps)?);
        }
        // The zero-subject route additionally consumes the subject's
        // own case, and the scaled route the fixed equation's terms.
        if let ReplayMode::RationalCongruence(_) = mode {
            if let Rational::Second { step, .. } = &spec.rational {
                let eq = by_id[step.eq];
                let subject = find_subst_term(eq, step);
                let c = classify(&subject);
                if c != spec.id {
                    deps.insert(c);
                }
            }
        }
        deps.remove(&spec.id);
        analyzed.push(Analyzed {
            spec,
            usages,
            deps,
            views,
            method,
        });
    }

    // Pass 2: dependency order by Kahn's algorithm, stable in the
    // declaration order.
    let position: BTreeMap<CaseId, usize> =
        cases.iter().enumerate().map(|(i, c)| (c.id, i)).collect();
    let mut order = Vec::new();
    let mut placed: BTreeSet<CaseId> = BTreeSet::new();
    while order.len() < analyzed.len() {
        let mut advanced = false;
        for (i, a) in analyzed.iter().enumerate() {
            if placed.contains(&a.spec.id) {
                continue;
            }
            if a.deps
                .iter()
                .all(|d| placed.contains(d) || !position.contains_key(d))
            {
                // Dependencies outside the case list are reported
                // during the per-case run below.
                order.push(i);
                placed.insert(a.spec.id);
                advanced = true;
                break;
            }
        }
        if !advanced {
            let stuck: Vec<&str> = analyzed
                .iter()
                .filter(|a| !placed.contains(&a.spec.id))
                .map(|a| a.spec.id.name())
                .collect();
            return Err(CoinvError::CircularDependency(stuck.join(", ")));
        }
    }

    // Pass 3: process in order with the full checks.
    let congruence = match mode {
        ReplayMode::Full => None,
        ReplayMode::RationalCongruence(l) => Some(l),
    };
    let mut eliminated: BTreeSet<CaseId> = BTreeSet::new();
    let mut steps = Vec::new();
    let mut rank = 0usize;
    for &i in &order {
        let a = &analyzed[i];
        let case = a.spec.id;
        for view in &a.views {
            for (t, c) in &view.others {
                if !eliminated.contains(c) && position.contains_key(c) {
                    return Err(CoinvError::DependencyViolation {
                        case: case.name().into(),
                        term: t.to_string(),
                        needs: c.name().into(),
                    });
                }
            }
        }
        for d in &a.deps {
            if !eliminated.contains(d) {
                return Err(CoinvError::DependencyViolation {
                    case: case.name().into(),
                    term: "(wildcard)".into(),
                    needs: d.name().into(),
                });
            }
        }
        let mut letters = 0usize;
        for (j, u) in a.usages.iter().enumerate() {
            let view = &a.views[j];
            letters = letters.max(view.letters);
            // Scaled-coboundary usage pairs: the step contributes the
            // moved term, the fixed equation must contribute nothing.
            let is_fixed = matches!(
                (&a.spec.rational, congruence, j),
                (Rational::First { .. }, Some(_), 1)
            );
            if is_fixed {
                if !view.own.is_empty() {
                    return Err(CoinvError::CheckFailed {
                        equation: u.eq.into(),
                        detail: format!(
                            "fixing equation moves a term of its own case: {}",
                            view.own[0]
                        ),
                    });
                }
                // The fixed subject must be the step's moved term.
                let step_eq = by_id[a.usages[0].eq];
                let step_view = &a.views[0];
                let step_target = step_view.own.first().ok_or_else(|| {
                    CoinvError::CheckFailed {
                        equation: a.usages[0].eq.into(),
                        detail: "step equation moves no term of its case".into(),
                    }
                })?;
                let fixed_subject = find_subst_term(by_id[u.eq], u);
                if !fixed_subject.same_shape(step_target) {
                    return Err(CoinvError::CheckFailed {
                        equation: u.eq.into(),
                        detail: format!(
                            "fixed subject {} does not match the moved term {} of {}",
                            fixed_subject, step_target, step_eq.id
                        ),
                    });
                }
            } else if view.own.is_empty() {
                return Err(CoinvError::CheckFailed {
                    equation: u.eq.into(),
                    detail: format!("no term of case {} appears", case),
                });
            }
            if let ReplayMode::RationalCongruence(_) = mode {
                if let (Rational::Second { .. }, 0) = (&a.spec.rational, j) {
                    let c = view.subject_case.expect("second route uses an action row");
                    if c != case && !eliminated.contains(&c) {
                        return Err(CoinvError::DependencyViolation {
                            case: case.name().into(),
                            term: "(subject)".into(),
                            needs: c.name().into(),
                        });
                    }
                }
            }
            let level = if matches!(&a.spec.rational, Rational::First { .. }) {
                congruence
            } else {
                None
            };
            check_usage(u, &by_id, level)?;
        }
        rank = rank.max(letters);
        eliminated.insert(case);
        steps.push(ElimStep {
            case: case.name().into(),
            family: a.spec.family.name().into(),
            method: a.method.clone(),
            eliminated_by: a.usages.iter().map(|u| u.eq.to_string()).collect(),
            depends_on: a.deps.iter().map(|d| d.name().into()).collect(),
            letters,
        });
    }
    Ok(EliminationLog {
        mode: mode.to_string(),
        rank,
        cases: steps,
    })
}

/// Runs the elimination over the given equation table in the given
/// mode, returning the log of cases in dependency order.
pub fn coinvariants_replay(
    equations: &[Equation],
    mode: ReplayMode,
) -> Result<EliminationLog, CoinvError> {
    replay_with_cases(equations, &standard_cases(), mode)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equation_table_is_well_formed() {
        let eqs = standard_equations();
        assert_eq!(eqs.len(), 28);
        let ids: BTreeSet<&str> = eqs.iter().map(|e| e.id).collect();
        assert_eq!(ids.len(), eqs.len(), "duplicate equation id");
        let actions = eqs
            .iter()
            .filter(|e| matches!(e.kind, EquationKind::Action { .. }))
            .count();
        assert_eq!(actions, 23);
    }

    #[test]
    fn full_replay_covers_all_families() {
        let log = coinvariants_replay(&standard_equations(), ReplayMode::Full).unwrap();
        assert_eq!(log.mode, "full");
        assert_eq!(log.cases.len(), 15);
        assert_eq!(log.rank, 6);
        let families: BTreeSet<&str> = log.cases.iter().map(|c| c.family.as_str()).collect();
        for fam in Builtin::H_FAMILIES {
            assert!(families.contains(fam.name()), "{} missing", fam);
        }
        // Every dependency is eliminated before its dependent.
        let mut seen = BTreeSet::new();
        for c in &log.cases {
            for d in &c.depends_on {
                assert!(seen.contains(d.as_str()), "{} before {}", c.case, d);
            }
            seen.insert(c.case.as_str());
        }
    }

    #[test]
    fn six_letters_are_needed_by_the_generic_h6_case() {
        let log = coinvariants_replay(&standard_equations(), ReplayMode::Full).unwrap();
        let h6 = log.cases.iter().find(|c| c.case == "H6-generic").unwrap();
        assert_eq!(h6.letters, 6);
    }

    #[test]
    fn rational_replay_covers_all_families() {
        let log =
            coinvariants_replay(&standard_equations(), ReplayMode::RationalCongruence(2)).unwrap();
        assert_eq!(log.mode, "rational-congruence(2)");
        assert_eq!(log.cases.len(), 15);
        let by_case: BTreeMap<&str, &str> = log
            .cases
            .iter()
            .map(|c| (c.case.as_str(), c.method.as_str()))
            .collect();
        assert_eq!(by_case["H1-generic"], "scaled-coboundary(2)");
        assert_eq!(by_case["H3"], "zero-subject");
        assert_eq!(by_case["H6-special-derived"], "identity-transport");
        // The zero-subject route forces its order: H3 after H1-generic,
        // H2-generic after H3.
        let pos = |name: &str| log.cases.iter().position(|c| c.case == name).unwrap();
        assert!(pos("H1-generic") < pos("H3"));
        assert!(pos("H3") < pos("H2-generic"));
        assert!(pos("H2-generic") < pos("H2-special"));
    }

    #[test]
    fn rational_replay_other_levels() {
        for l in [3u32, 5] {
            let log =
                coinvariants_replay(&standard_equations(), ReplayMode::RationalCongruence(l))
                    .unwrap();
            assert_eq!(log.cases.len(), 15);
        }
    }

    #[test]
    fn removing_the_generic_h6_equation_fails_naming_h6() {
        let eqs: Vec<Equation> = standard_equations()
            .into_iter()
            .filter(|e| e.id != "generic-h6")
            .collect();
        let err = coinvariants_replay(&eqs, ReplayMode::Full).unwrap_err();
        match &err {
            CoinvError::MissingEquation { case, equation } => {
                assert_eq!(case, "H6-generic");
                assert_eq!(equation, "generic-h6");
            }
            other => panic!("unexpected error {:?}", other),
        }
        assert!(err.to_string().contains("H6"));
    }

    #[test]
    fn removing_an_exchange_identity_fails_for_the_derived_case() {
        let eqs: Vec<Equation> = standard_equations()
            .into_iter()
            .filter(|e| e.id != "h6-second-param")
            .collect();
        let err = coinvariants_replay(&eqs, ReplayMode::Full).unwrap_err();
        assert!(matches!(
            err,
            CoinvError::MissingEquation { ref case, .. } if case == "H6-special-derived"
        ));
    }

    #[test]
    fn tampered_subject_is_rejected() {
        // Breaking the subject of a step equation must surface as a
        // failed copy match.
        let mut eqs = standard_equations();
        for eq in &mut eqs {
            if eq.id == "part2-h7" {
                if let EquationKind::Action { subject, .. } = &mut eq.kind {
                    subject.slots[1].flip = false;
                }
            }
        }
        let err = coinvariants_replay(&eqs, ReplayMode::Full).unwrap_err();
        assert!(matches!(err, CoinvError::CheckFailed { ref equation, .. } if equation == "part2-h7"));
    }

    #[test]
    fn tampered_sign_rule_fails_the_formal_check() {
        let mut eqs = standard_equations();
        for eq in &mut eqs {
            if eq.id == "h1-sign" {
                if let EquationKind::Identity { rhs, .. } = &mut eq.kind {
                    rhs[0].coeff = 1;
                }
            }
        }
        let err = coinvariants_replay(&eqs, ReplayMode::Full).unwrap_err();
        assert!(
            matches!(err, CoinvError::CheckFailed { ref equation, ref detail } if equation == "h1-sign" && detail.contains("canonicalization"))
        );
    }

    #[test]
    fn circular_case_data_is_reported() {
        // Two artificial cases, each transporting the other's instance.
        let eqs = vec![
            identity(
                "loop-1",
                term(1, Builtin::H4, &[pos(A), pos(B), pos(C)]),
                vec![term(1, Builtin::H9, &[pos(A), pos(B), pos(C)])],
                false,
            ),
            identity(
                "loop-2",
                term(1, Builtin::H9, &[pos(A), pos(B), pos(C)]),
                vec![term(1, Builtin::H4, &[pos(A), pos(B), pos(C)])],
                false,
            ),
        ];
        let cases = vec![
            CaseSpec {
                id: CaseId::H4,
                family: Builtin::H4,
                full: vec![plain("loop-1")],
                rational: Rational::Transport(vec![plain("loop-1")]),
            },
            CaseSpec {
                id: CaseId::H9,
                family: Builtin::H9,
                full: vec![plain("loop-2")],
                rational: Rational::Transport(vec![plain("loop-2")]),
            },
        ];
        let err = replay_with_cases(&eqs, &cases, ReplayMode::Full).unwrap_err();
        assert!(matches!(err, CoinvError::CircularDependency(_)));
        assert!(err.to_string().contains("H4"));
    }

    #[test]
    fn log_serializes_with_expected_fields() {
        let log = coinvariants_replay(&standard_equations(), ReplayMode::Full).unwrap();
        let json = serde_json::to_value(&log).unwrap();
        assert_eq!(json["mode"], "full");
        let first = &json["cases"][0];
        assert!(first["family"].is_string());
        assert!(first["eliminated_by"].is_array());
        assert!(first["depends_on"].is_array());
    }

    #[test]
    fn classification_matches_slot_patterns() {
        use Builtin::{H2, H6, H7};
        let generic = term(1, H7, &[pos(A), pos(B), pos(C), pos(D)]);
        assert_eq!(classify(&generic), CaseId::H7Generic);
        let aligned = term(1, H7, &[pos(A), pos(B), pos(C), pos(B)]);
        assert_eq!(classify(&aligned), CaseId::H7SpecialAligned);
        let opposed = term(1, H7, &[pos(A), neg(B), pos(C), pos(B)]);
        assert_eq!(classify(&opposed), CaseId::H7SpecialOpposed);
        let h2s = term(1, H2, &[pos(A), pos(B), pos(C), neg(A), pos(E), pos(F)]);
        assert_eq!(classify(&h2s), CaseId::H2Special);
        let h6p = term(1, H6, &[pos(A), pos(E), pos(C), pos(D), pos(E)]);
        assert_eq!(classify(&h6p), CaseId::H6SpecialPrimary);
        let h6d = term(1, H6, &[pos(A), pos(B), neg(E), pos(D), pos(E)]);
        assert_eq!(classify(&h6d), CaseId::H6SpecialDerived);
    }
}
