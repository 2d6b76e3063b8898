//! The substitution endomorphisms that realize conjugation by ambient
//! generators on the IA alphabet.
//!
//! For each ambient generator `s` and each IA letter `t`, `theta(s)(t)`
//! is a word over the IA alphabet whose evaluation equals the conjugate
//! `act(s) ∘ act(t) ∘ act(s)^-1`. Applied letterwise, this extends to
//! words, and carries every defining relator to another relator.
//!
//! For swaps and inversions the image is a single relabeled letter. For
//! transvections `s = M[a, b]` the image is given by a finite rule table
//! keyed on how the slots of `t` meet the two letters
//! `x_a^sign(a)` and `x_b^sign(b)` of `s`:
//!
//! * slot classes `a+`/`a-` mean the slot equals that head letter or its
//!   inverse, `b+`/`b-` the same for the second letter, `*` an unrelated
//!   index;
//! * a commutator transvection whose shape has no rule is looked up
//!   through its slot-swapped inverse letter, and the image inverted;
//! * shapes matched by neither are fixed;
//! * conjugation moves with a negative second slot are handled as
//!   inverses of their positive form.
//!
//! The table is data: each rule is a shape plus a template whose slots
//! copy indices and signs from `s` and `t`. [`ThetaTable::dump_json`]
//! serializes it for audit.

use crate::alphabet::{AutGen, AutWord, GenLetter, IAGen, IAWord};
use serde::Serialize;
use std::sync::OnceLock;

/// Index source for a template slot: the first or second index of `s`,
/// or a slot of `t`.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Ref {
    A,
    B,
    T(usize),
}

/// Sign source for a template slot: constant, the sign of a head of `s`,
/// or the sign of a slot of `t`.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Sgn {
    One,
    Alpha,
    Beta,
    TSign(usize),
}

/// A signed slot of a template letter.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub struct Slot {
    pub r: Ref,
    pub sign: Sgn,
    pub neg: bool,
}

/// A letter of an image template.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(tag = "k")]
pub enum TLetter {
    C { a: Ref, b: Slot },
    Mc { a: Slot, b: Slot, c: Slot },
}

/// Slot class of a commutator-transvection slot relative to `s`.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MClass {
    APlus,
    AMinus,
    BPlus,
    BMinus,
    Other,
}

/// Slot class of a conjugation-move slot relative to `s` (index only).
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CClass {
    A,
    B,
    Other,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(untagged)]
pub enum Shape {
    Conj([CClass; 2]),
    CommTv([MClass; 3]),
}

#[derive(Clone, Debug, Serialize)]
pub struct Rule {
    pub row: u8,
    pub shape: Shape,
    pub image: Vec<TLetter>,
    /// Sign whose value, when negative, inverts the whole image word.
    pub exponent: Slot,
}

/// The rule table for conjugation by transvections.
pub struct ThetaTable {
    rules: Vec<Rule>,
}

fn slot(r: Ref, sign: Sgn) -> Slot {
    Slot { r, sign, neg: false }
}

fn nslot(r: Ref, sign: Sgn) -> Slot {
    Slot { r, sign, neg: true }
}

fn copy_t(i: usize) -> Slot {
    slot(Ref::T(i), Sgn::TSign(i))
}

fn c(a: Ref, b: Slot) -> TLetter {
    TLetter::C { a, b }
}

fn m(a: Slot, b: Slot, c: Slot) -> TLetter {
    TLetter::Mc { a, b, c }
}

fn plain_exp() -> Slot {
    slot(Ref::A, Sgn::One)
}

impl ThetaTable {
    /// The standard table.
    pub fn standard() -> &'static ThetaTable {
        static TABLE: OnceLock<ThetaTable> = OnceLock::new();
        TABLE.get_or_init(ThetaTable::build)
    }

    fn build() -> ThetaTable {
        use CClass as C;
        use MClass::*;
        use Ref::{A, B, T};
        use Sgn::{Alpha, Beta, One, TSign};
        let rules = vec![
            // t = C[c, a]: conjugate both heads onto c; the whole image is
            // inverted when the first head of s is negative.
            Rule {
                row: 1,
                shape: Shape::Conj([C::Other, C::A]),
                image: vec![c(T(0), slot(A, Alpha)), c(T(0), slot(B, Beta))],
                exponent: slot(A, Alpha),
            },
            // t = C[a, c]
            Rule {
                row: 2,
                shape: Shape::Conj([C::A, C::Other]),
                image: vec![
                    c(A, slot(T(1), One)),
                    m(slot(A, Alpha), nslot(B, Beta), slot(T(1), One)),
                ],
                exponent: plain_exp(),
            },
            // t = C[b, c]
            Rule {
                row: 3,
                shape: Shape::Conj([C::B, C::Other]),
                image: vec![
                    c(B, slot(T(1), One)),
                    m(slot(A, Alpha), nslot(B, Beta), nslot(T(1), One)),
                ],
                exponent: plain_exp(),
            },
            // t = C[b, a]
            Rule {
                row: 4,
                shape: Shape::Conj([C::B, C::A]),
                image: vec![c(A, slot(B, Beta)), c(B, slot(A, Alpha))],
                exponent: slot(A, Alpha),
            },
            // t = Mc[a+, *, *]: sandwich by C[a, b]^beta.
            Rule {
                row: 5,
                shape: Shape::CommTv([APlus, Other, Other]),
                image: vec![
                    c(A, slot(B, Beta)),
                    m(copy_t(0), copy_t(1), copy_t(2)),
                    c(A, nslot(B, Beta)),
                ],
                exponent: plain_exp(),
            },
            // t = Mc[*, a+, *]
            Rule {
                row: 6,
                shape: Shape::CommTv([Other, APlus, Other]),
                image: vec![
                    m(copy_t(0), slot(B, Beta), copy_t(2)),
                    c(T(0), nslot(B, Beta)),
                    m(copy_t(0), copy_t(1), copy_t(2)),
                    c(T(0), slot(B, Beta)),
                ],
                exponent: plain_exp(),
            },
            // t = Mc[*, a-, *]
            Rule {
                row: 7,
                shape: Shape::CommTv([Other, AMinus, Other]),
                image: vec![
                    m(copy_t(0), copy_t(1), copy_t(2)),
                    c(T(0), slot(A, Alpha)),
                    m(copy_t(0), nslot(B, Beta), copy_t(2)),
                    c(T(0), nslot(A, Alpha)),
                ],
                exponent: plain_exp(),
            },
            // t = Mc[b+, *, *]
            Rule {
                row: 8,
                shape: Shape::CommTv([BPlus, Other, Other]),
                image: vec![
                    c(A, slot(B, Beta)),
                    m(nslot(A, Alpha), copy_t(1), copy_t(2)),
                    m(copy_t(0), copy_t(1), copy_t(2)),
                    c(A, nslot(B, Beta)),
                ],
                exponent: plain_exp(),
            },
            // t = Mc[b-, *, *]
            Rule {
                row: 9,
                shape: Shape::CommTv([BMinus, Other, Other]),
                image: vec![
                    m(slot(A, Alpha), copy_t(1), copy_t(2)),
                    m(copy_t(0), copy_t(1), copy_t(2)),
                ],
                exponent: plain_exp(),
            },
            // t = Mc[a+, b+, *]
            Rule {
                row: 10,
                shape: Shape::CommTv([APlus, BPlus, Other]),
                image: vec![
                    c(A, slot(B, Beta)),
                    m(copy_t(0), copy_t(1), copy_t(2)),
                    c(A, nslot(B, Beta)),
                ],
                exponent: plain_exp(),
            },
            // t = Mc[a+, b-, *]
            Rule {
                row: 11,
                shape: Shape::CommTv([APlus, BMinus, Other]),
                image: vec![
                    c(A, slot(B, Beta)),
                    m(copy_t(0), copy_t(1), copy_t(2)),
                    c(A, nslot(B, Beta)),
                ],
                exponent: plain_exp(),
            },
            // t = Mc[b+, a+, *]
            Rule {
                row: 12,
                shape: Shape::CommTv([BPlus, APlus, Other]),
                image: vec![
                    c(A, slot(T(2), TSign(2))),
                    m(slot(A, Alpha), nslot(B, Beta), copy_t(2)),
                    c(B, nslot(T(2), TSign(2))),
                    m(nslot(B, Beta), slot(A, Alpha), nslot(T(2), TSign(2))),
                ],
                exponent: plain_exp(),
            },
            // t = Mc[b+, a-, *]
            Rule {
                row: 13,
                shape: Shape::CommTv([BPlus, AMinus, Other]),
                image: vec![
                    c(T(2), nslot(B, Beta)),
                    c(T(2), nslot(A, Alpha)),
                    m(nslot(B, Beta), nslot(T(2), TSign(2)), slot(A, Alpha)),
                    c(B, slot(T(2), TSign(2))),
                    m(slot(A, Alpha), copy_t(2), nslot(B, Beta)),
                    c(A, nslot(T(2), TSign(2))),
                    c(T(2), slot(A, Alpha)),
                    c(T(2), slot(B, Beta)),
                ],
                exponent: plain_exp(),
            },
            // t = Mc[b-, a+, *]
            Rule {
                row: 14,
                shape: Shape::CommTv([BMinus, APlus, Other]),
                image: vec![
                    c(A, nslot(T(2), TSign(2))),
                    c(T(2), slot(A, Alpha)),
                    m(nslot(B, Beta), copy_t(2), nslot(A, Alpha)),
                    c(T(2), slot(B, Beta)),
                    m(slot(A, Alpha), copy_t(2), nslot(B, Beta)),
                    c(B, slot(T(2), TSign(2))),
                    c(T(2), nslot(B, Beta)),
                    c(T(2), nslot(A, Alpha)),
                ],
                exponent: plain_exp(),
            },
            // t = Mc[b-, a-, *]
            Rule {
                row: 15,
                shape: Shape::CommTv([BMinus, AMinus, Other]),
                image: vec![
                    c(B, nslot(T(2), TSign(2))),
                    m(slot(A, Alpha), nslot(B, Beta), copy_t(2)),
                    c(T(2), nslot(B, Beta)),
                    m(nslot(B, Beta), nslot(A, Alpha), copy_t(2)),
                    c(T(2), nslot(A, Alpha)),
                    c(A, slot(T(2), TSign(2))),
                    c(T(2), slot(A, Alpha)),
                    c(T(2), slot(B, Beta)),
                ],
                exponent: plain_exp(),
            },
            // t = Mc[*, a+, b+]
            Rule {
                row: 16,
                shape: Shape::CommTv([Other, APlus, BPlus]),
                image: vec![
                    c(A, slot(B, Beta)),
                    m(copy_t(0), copy_t(1), copy_t(2)),
                    c(A, nslot(B, Beta)),
                ],
                exponent: plain_exp(),
            },
            // t = Mc[*, a+, b-]: collapses to a single letter.
            Rule {
                row: 17,
                shape: Shape::CommTv([Other, APlus, BMinus]),
                image: vec![m(copy_t(0), slot(B, Beta), slot(A, Alpha))],
                exponent: plain_exp(),
            },
        ];
        let table = ThetaTable { rules };
        table.audit();
        table
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    fn find_rule(&self, shape: &Shape) -> Option<&Rule> {
        self.rules.iter().find(|r| r.shape == *shape)
    }

    /// Consistency audit: no shape is matched by two rules, and the fixed
    /// shapes are exactly the expected ones.
    fn audit(&self) {
        for shape in all_commtv_shapes() {
            let n = self
                .rules
                .iter()
                .filter(|r| r.shape == Shape::CommTv(shape))
                .count();
            assert!(n <= 1, "ambiguous rules for shape {:?}", shape);
        }
        let fixed = fixed_commtv_shapes(self);
        assert_eq!(fixed.len(), 14, "unexpected fixed shape count: {:?}", fixed);
    }

    /// Image of a single IA letter under conjugation by `s`.
    pub fn image(&self, s: &AutGen, t: &IAGen) -> IAWord {
        match s {
            AutGen::Swap { a, b } => {
                let (a, b) = (*a, *b);
                IAWord::generator(relabel_ia_gen(t, |i| {
                    if i.abs() == a {
                        i.signum() * b
                    } else if i.abs() == b {
                        i.signum() * a
                    } else {
                        i
                    }
                }))
            }
            AutGen::Inv { a } => {
                let a = *a;
                IAWord::generator(relabel_ia_gen(t, |i| if i.abs() == a { -i } else { i }))
            }
            AutGen::Transv { a, b } => self.transv_image(*a, *b, t),
        }
    }

    fn transv_image(&self, sa: i32, sb: i32, t: &IAGen) -> IAWord {
        match *t {
            IAGen::Conj { a, b } => {
                if b < 0 {
                    // Inverse letter: image of the positive form, inverted.
                    return self.transv_image(sa, sb, &IAGen::Conj { a, b: -b }).inv();
                }
                let shape = Shape::Conj([conj_class(sa, sb, a), conj_class(sa, sb, b)]);
                match self.find_rule(&shape) {
                    Some(rule) => instantiate(rule, sa, sb, &[a, b]),
                    None => IAWord::generator(*t),
                }
            }
            IAGen::CommTv { a, b, c } => {
                let classify =
                    |x: i32, y: i32, z: i32| [mc_class(sa, sb, x), mc_class(sa, sb, y), mc_class(sa, sb, z)];
                let shape = Shape::CommTv(classify(a, b, c));
                if let Some(rule) = self.find_rule(&shape) {
                    return instantiate(rule, sa, sb, &[a, b, c]);
                }
                // Try the slot-swapped inverse letter.
                let flipped = Shape::CommTv(classify(a, c, b));
                if let Some(rule) = self.find_rule(&flipped) {
                    return instantiate(rule, sa, sb, &[a, c, b]).inv();
                }
                IAWord::generator(*t)
            }
        }
    }

    /// Letterwise image of an IA word under conjugation by `s`.
    pub fn apply_gen(&self, s: &AutGen, w: &IAWord) -> IAWord {
        let mut out = IAWord::identity();
        for t in w.letters() {
            out = out.mul(&self.image(s, t));
        }
        out
    }

    /// Image of an IA word under conjugation by an ambient word,
    /// letters acting right to left.
    pub fn apply_word(&self, s: &AutWord, w: &IAWord) -> IAWord {
        let mut out = w.clone();
        for g in s.letters().iter().rev() {
            out = self.apply_gen(g, &out);
        }
        out
    }

    /// Serializes the rule table for audit.
    pub fn dump_json(&self) -> String {
        serde_json::to_string_pretty(&self.rules).unwrap()
    }
}

/// Relabels the slots of an IA letter by an odd index map
/// (`f(-i) = -f(i)`); the conjugation move's first slot stays positive.
pub fn relabel_ia_gen<F: Fn(i32) -> i32>(t: &IAGen, f: F) -> IAGen {
    match *t {
        IAGen::Conj { a, b } => IAGen::conj(f(a), f(b)),
        IAGen::CommTv { a, b, c } => IAGen::commtv(f(a), f(b), f(c)),
    }
}

fn conj_class(sa: i32, sb: i32, index: i32) -> CClass {
    if index == sa.abs() {
        CClass::A
    } else if index == sb.abs() {
        CClass::B
    } else {
        CClass::Other
    }
}

fn mc_class(sa: i32, sb: i32, v: i32) -> MClass {
    if v == sa {
        MClass::APlus
    } else if v == -sa {
        MClass::AMinus
    } else if v == sb {
        MClass::BPlus
    } else if v == -sb {
        MClass::BMinus
    } else {
        MClass::Other
    }
}

fn instantiate(rule: &Rule, sa: i32, sb: i32, t_slots: &[i32]) -> IAWord {
    let index = |r: Ref| -> i32 {
        match r {
            Ref::A => sa.abs(),
            Ref::B => sb.abs(),
            Ref::T(i) => t_slots[i].abs(),
        }
    };
    let sign = |g: Sgn| -> i32 {
        match g {
            Sgn::One => 1,
            Sgn::Alpha => sa.signum(),
            Sgn::Beta => sb.signum(),
            Sgn::TSign(i) => t_slots[i].signum(),
        }
    };
    let value = |s: &Slot| -> i32 {
        let v = index(s.r) * sign(s.sign);
        if s.neg {
            -v
        } else {
            v
        }
    };
    let letters: Vec<IAGen> = rule
        .image
        .iter()
        .map(|tl| match tl {
            TLetter::C { a, b } => IAGen::conj(index(*a), value(b)),
            TLetter::Mc { a, b, c } => IAGen::commtv(value(a), value(b), value(c)),
        })
        .collect();
    let word = IAWord::from_letters(letters);
    if value(&rule.exponent) < 0 {
        word.inv()
    } else {
        word
    }
}

/// All commutator-transvection shapes: at most one slot meets each head.
fn all_commtv_shapes() -> Vec<[MClass; 3]> {
    use MClass::*;
    let classes = [APlus, AMinus, BPlus, BMinus, Other];
    let mut shapes = Vec::new();
    for &x in &classes {
        for &y in &classes {
            for &z in &classes {
                let sh = [x, y, z];
                let count = |p: fn(&MClass) -> bool| sh.iter().filter(|c| p(c)).count();
                let a_refs = count(|c| matches!(c, APlus | AMinus));
                let b_refs = count(|c| matches!(c, BPlus | BMinus));
                if a_refs <= 1 && b_refs <= 1 {
                    shapes.push(sh);
                }
            }
        }
    }
    shapes
}

/// Shapes resolved as fixed: neither the shape nor its slot-swap has a
/// rule.
fn fixed_commtv_shapes(table: &ThetaTable) -> Vec<[MClass; 3]> {
    all_commtv_shapes()
        .into_iter()
        .filter(|sh| {
            let direct = table.find_rule(&Shape::CommTv(*sh)).is_some();
            let flip = table
                .find_rule(&Shape::CommTv([sh[0], sh[2], sh[1]]))
                .is_some();
            !direct && !flip
        })
        .collect()
}

/// Checks the defining property of the table on one pair: the image of
/// `t` under conjugation by `s` must evaluate to
/// `act(s) ∘ act(t) ∘ act(s)^-1`.
pub fn verify_theta_conjugation(s: &AutGen, t: &IAGen, n: usize) -> bool {
    let table = ThetaTable::standard();
    let image = table.image(s, t);
    let lhs = image.eval(n);
    let rho = s.action(n);
    let rho_inv = s.inverse().action(n);
    let rhs = rho.compose(&t.action(n)).compose(&rho_inv);
    lhs == rhs
}

/// Checks that conjugating by `s` then `s^-1` returns to the original
/// evaluation.
pub fn verify_theta_round_trip(s: &AutGen, t: &IAGen, n: usize) -> bool {
    let table = ThetaTable::standard();
    let back = table.apply_gen(s, &table.image(&s.inverse(), t));
    back.eval(n) == t.action(n)
}
