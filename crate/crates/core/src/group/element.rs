//! Normal forms and exact group arithmetic.
//!
//! - F(k): freely reduced words over `Letter`s, written left to right, the
//!   rightmost letter acting first.
//! - Z^k: exponent vectors.
//! - Heis: triples (i, j, k) encoding a^i b^j c^k with c = [a,b] central.
//! - BS(1,n): pairs (t, m) in Z[1/n] x Z encoding a^t b^m, multiplication
//!   (t1, m1)(t2, m2) = (t1 + n^m1 t2, m1 + m2).

use super::{Family, GroupError, GroupSpec};
use crate::numeric::{adic_denominator_exponent, pow_of, Rational};
use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub gen: u8,
    pub inverse: bool,
}

impl Letter {
    pub fn opposite(self) -> Letter {
        Letter {
            gen: self.gen,
            inverse: !self.inverse,
        }
    }

    pub fn to_char(self) -> char {
        let base = b'a' + self.gen;
        if self.inverse {
            base.to_ascii_uppercase() as char
        } else {
            base as char
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GroupElement {
    Free {
        rank: u32,
        word: Vec<Letter>,
    },
    Abelian {
        exps: Vec<i64>,
    },
    Heisenberg {
        a: i64,
        b: i64,
        c: i64,
    },
    BaumslagSolitar {
        n: u32,
        t: Rational,
        m: i64,
    },
}

pub(super) fn identity_of(spec: &GroupSpec) -> GroupElement {
    match spec.family() {
        Family::Free { rank } => GroupElement::Free {
            rank: *rank,
            word: Vec::new(),
        },
        Family::FreeAbelian { rank } => GroupElement::Abelian {
            exps: vec![0; *rank as usize],
        },
        Family::Heisenberg => GroupElement::Heisenberg { a: 0, b: 0, c: 0 },
        Family::BaumslagSolitar { n } => GroupElement::BaumslagSolitar {
            n: *n,
            t: Rational::zero(),
            m: 0,
        },
    }
}

pub(super) fn generator_of(spec: &GroupSpec, index: usize) -> GroupElement {
    match spec.family() {
        Family::Free { rank } => GroupElement::Free {
            rank: *rank,
            word: vec![Letter {
                gen: index as u8,
                inverse: false,
            }],
        },
        Family::FreeAbelian { rank } => {
            let mut exps = vec![0; *rank as usize];
            exps[index] = 1;
            GroupElement::Abelian { exps }
        }
        Family::Heisenberg => match index {
            0 => GroupElement::Heisenberg { a: 1, b: 0, c: 0 },
            1 => GroupElement::Heisenberg { a: 0, b: 1, c: 0 },
            _ => GroupElement::Heisenberg { a: 0, b: 0, c: 1 },
        },
        Family::BaumslagSolitar { n } => match index {
            0 => GroupElement::BaumslagSolitar {
                n: *n,
                t: Rational::from_integer(BigInt::from(1)),
                m: 0,
            },
            _ => GroupElement::BaumslagSolitar {
                n: *n,
                t: Rational::zero(),
                m: 1,
            },
        },
    }
}

impl GroupElement {
    pub fn free(rank: u32, letters: Vec<Letter>) -> Result<GroupElement, GroupError> {
        for l in &letters {
            if u32::from(l.gen) >= rank {
                return Err(GroupError::GeneratorRange {
                    index: l.gen as usize,
                    family: format!("F({rank})"),
                });
            }
        }
        let mut word = Vec::with_capacity(letters.len());
        for l in letters {
            push_reduced(&mut word, l);
        }
        Ok(GroupElement::Free { rank, word })
    }

    pub fn abelian(exps: Vec<i64>) -> GroupElement {
        GroupElement::Abelian { exps }
    }

    pub fn heisenberg(a: i64, b: i64, c: i64) -> GroupElement {
        GroupElement::Heisenberg { a, b, c }
    }

    pub fn baumslag_solitar(n: u32, t: Rational, m: i64) -> Result<GroupElement, GroupError> {
        if adic_denominator_exponent(&t, n).is_none() {
            return Err(GroupError::NotAdic {
                n,
                value: t.to_string(),
            });
        }
        Ok(GroupElement::BaumslagSolitar { n, t, m })
    }

    pub fn family(&self) -> Family {
        match self {
            GroupElement::Free { rank, .. } => Family::Free { rank: *rank },
            GroupElement::Abelian { exps } => Family::FreeAbelian {
                rank: exps.len() as u32,
            },
            GroupElement::Heisenberg { .. } => Family::Heisenberg,
            GroupElement::BaumslagSolitar { n, .. } => Family::BaumslagSolitar { n: *n },
        }
    }

    pub fn is_identity(&self) -> bool {
        match self {
            GroupElement::Free { word, .. } => word.is_empty(),
            GroupElement::Abelian { exps } => exps.iter().all(|&e| e == 0),
            GroupElement::Heisenberg { a, b, c } => *a == 0 && *b == 0 && *c == 0,
            GroupElement::BaumslagSolitar { t, m, .. } => t.is_zero() && *m == 0,
        }
    }

    pub fn multiply(&self, other: &GroupElement) -> Result<GroupElement, GroupError> {
        match (self, other) {
            (
                GroupElement::Free { rank, word },
                GroupElement::Free {
                    rank: r2,
                    word: w2,
                },
            ) if rank == r2 => {
                let mut out = word.clone();
                for &l in w2 {
                    push_reduced(&mut out, l);
                }
                Ok(GroupElement::Free {
                    rank: *rank,
                    word: out,
                })
            }
            (GroupElement::Abelian { exps }, GroupElement::Abelian { exps: e2 })
                if exps.len() == e2.len() =>
            {
                let sum = exps.iter().zip(e2).map(|(x, y)| x + y).collect();
                Ok(GroupElement::Abelian { exps: sum })
            }
            (
                GroupElement::Heisenberg { a, b, c },
                GroupElement::Heisenberg {
                    a: a2,
                    b: b2,
                    c: c2,
                },
            ) => Ok(GroupElement::Heisenberg {
                a: a + a2,
                b: b + b2,
                c: c + c2 - b * a2,
            }),
            (
                GroupElement::BaumslagSolitar { n, t, m },
                GroupElement::BaumslagSolitar {
                    n: n2,
                    t: t2,
                    m: m2,
                },
            ) if n == n2 => Ok(GroupElement::BaumslagSolitar {
                n: *n,
                t: t + pow_of(*n, *m) * t2,
                m: m + m2,
            }),
            _ => Err(GroupError::FamilyMismatch),
        }
    }

    pub fn inverse(&self) -> GroupElement {
        match self {
            GroupElement::Free { rank, word } => GroupElement::Free {
                rank: *rank,
                word: word.iter().rev().map(|l| l.opposite()).collect(),
            },
            GroupElement::Abelian { exps } => GroupElement::Abelian {
                exps: exps.iter().map(|e| -e).collect(),
            },
            GroupElement::Heisenberg { a, b, c } => GroupElement::Heisenberg {
                a: -a,
                b: -b,
                c: -c - a * b,
            },
            GroupElement::BaumslagSolitar { n, t, m } => GroupElement::BaumslagSolitar {
                n: *n,
                t: -t * pow_of(*n, -m),
                m: -m,
            },
        }
    }

    pub fn pow(&self, k: i64) -> GroupElement {
        let mut base = if k < 0 { self.inverse() } else { self.clone() };
        let mut e = k.unsigned_abs();
        let spec = GroupSpec::from_family(self.family()).expect("element family is valid");
        let mut acc = spec.identity();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.multiply(&base).expect("same family");
            }
            e >>= 1;
            if e > 0 {
                base = base.multiply(&base).expect("same family");
            }
        }
        acc
    }

    pub fn as_free_word(&self) -> Option<&[Letter]> {
        match self {
            GroupElement::Free { word, .. } => Some(word),
            _ => None,
        }
    }

    pub fn abelian_exps(&self) -> Option<&[i64]> {
        match self {
            GroupElement::Abelian { exps } => Some(exps),
            _ => None,
        }
    }

    pub fn heisenberg_coords(&self) -> Option<(i64, i64, i64)> {
        match self {
            GroupElement::Heisenberg { a, b, c } => Some((*a, *b, *c)),
            _ => None,
        }
    }

    pub fn bs_coords(&self) -> Option<(u32, &Rational, i64)> {
        match self {
            GroupElement::BaumslagSolitar { n, t, m } => Some((*n, t, *m)),
            _ => None,
        }
    }

    /// For BS(1,n) elements, the exponents (u, v, w) of the b^-u a^v b^w
    /// spelling; None outside the family or when v would overflow.
    pub fn bs_decomposition(&self) -> Option<(u64, i64, u64)> {
        match self {
            GroupElement::BaumslagSolitar { n, t, m } => bs_spelling(*n, t, *m),
            _ => None,
        }
    }

    /// Canonical word spelling. BS(1,n) elements use b^-u a^v b^w; if the
    /// middle exponent would be absurdly long the pair form `(p/q,m)` is
    /// emitted instead (both forms parse back).
    pub fn to_word(&self) -> String {
        if self.is_identity() {
            return "e".to_string();
        }
        match self {
            GroupElement::Free { word, .. } => word.iter().map(|l| l.to_char()).collect(),
            GroupElement::Abelian { exps } => {
                let mut s = String::new();
                for (i, &e) in exps.iter().enumerate() {
                    push_run(&mut s, i as u8, e);
                }
                s
            }
            GroupElement::Heisenberg { a, b, c } => {
                let mut s = String::new();
                push_run(&mut s, 0, *a);
                push_run(&mut s, 1, *b);
                push_run(&mut s, 2, *c);
                s
            }
            GroupElement::BaumslagSolitar { n, t, m } => {
                match bs_spelling(*n, t, *m) {
                    Some((u, v, w)) => {
                        let mut s = String::new();
                        push_run(&mut s, 1, -(u as i64));
                        push_run(&mut s, 0, v);
                        push_run(&mut s, 1, w as i64);
                        s
                    }
                    None => format!("({},{})", crate::numeric::format_rational(t), m),
                }
            }
        }
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_word())
    }
}

fn push_reduced(word: &mut Vec<Letter>, l: Letter) {
    if word.last() == Some(&l.opposite()) {
        word.pop();
    } else {
        word.push(l);
    }
}

fn push_run(s: &mut String, gen: u8, e: i64) {
    let l = Letter {
        gen,
        inverse: e < 0,
    };
    for _ in 0..e.unsigned_abs() {
        s.push(l.to_char());
    }
}

const MAX_SPELLED_EXPONENT: i64 = 1_000_000;

/// Decomposes (t, m) as b^-u a^v b^w with u, w >= 0 and v integral:
/// u = max(j, -m, 0) where denom(t) | n^j minimally, v = t n^u, w = m + u.
fn bs_spelling(n: u32, t: &Rational, m: i64) -> Option<(u64, i64, u64)> {
    let j = adic_denominator_exponent(t, n)?;
    let u = j.max(-m).max(0);
    let v_rat = t * pow_of(n, u);
    debug_assert!(v_rat.denom().abs() == BigInt::from(1));
    let v = v_rat.numer().to_i64()?;
    if v.abs() > MAX_SPELLED_EXPONENT {
        return None;
    }
    let w = m + u;
    debug_assert!(w >= 0);
    Some((u as u64, v, w as u64))
}

pub(super) fn parse_word(spec: &GroupSpec, input: &str) -> Result<GroupElement, GroupError> {
    let t = input.trim();
    if t.is_empty() {
        return Err(GroupError::Word {
            word: input.to_string(),
            msg: "empty word (use `e` for the identity)".to_string(),
        });
    }
    if t == "e" {
        return Ok(spec.identity());
    }
    if let Family::BaumslagSolitar { n } = spec.family() {
        if t.starts_with('(') {
            return parse_bs_pair(*n, t);
        }
    }
    let count = spec.generator_count();
    let mut acc = spec.identity();
    for ch in t.chars() {
        let (idx, inverse) = if ch.is_ascii_lowercase() {
            ((ch as u8 - b'a') as usize, false)
        } else if ch.is_ascii_uppercase() {
            ((ch as u8 - b'A') as usize, true)
        } else {
            return Err(GroupError::Word {
                word: input.to_string(),
                msg: format!("unexpected character `{ch}`"),
            });
        };
        if idx >= count {
            return Err(GroupError::Word {
                word: input.to_string(),
                msg: format!("`{ch}` is not a generator of {}", spec.describe()),
            });
        }
        let g = spec.generator(idx)?;
        let term = if inverse { g.inverse() } else { g };
        acc = acc.multiply(&term)?;
    }
    Ok(acc)
}

fn parse_bs_pair(n: u32, t: &str) -> Result<GroupElement, GroupError> {
    let bad = |msg: &str| GroupError::Word {
        word: t.to_string(),
        msg: msg.to_string(),
    };
    let inner = t
        .strip_prefix('(')
        .and_then(|s| s.strip_suffix(')'))
        .ok_or_else(|| bad("expected `(p/q,m)`"))?;
    let (ts, ms) = inner
        .split_once(',')
        .ok_or_else(|| bad("expected two comma-separated fields"))?;
    let tr = crate::numeric::parse_rational(ts)
        .map_err(|e| bad(&format!("first field: {e}")))?;
    let m: i64 = ms
        .trim()
        .parse()
        .map_err(|_| bad("second field must be an integer"))?;
    GroupElement::baumslag_solitar(n, tr, m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::rat;

    fn spec(s: &str) -> GroupSpec {
        GroupSpec::parse(s).unwrap()
    }

    #[test]
    fn free_reduction() {
        let f2 = spec("F(2)");
        let w = f2.parse_word("abBA").unwrap();
        assert!(w.is_identity());
        let u = f2.parse_word("abA").unwrap();
        assert_eq!(u.to_word(), "abA");
        assert_eq!(u.inverse().to_word(), "aBA");
        assert!(u.multiply(&u.inverse()).unwrap().is_identity());
    }

    #[test]
    fn abelian_commutes() {
        let z2 = spec("Z^2");
        let g = z2.parse_word("ab").unwrap();
        let h = z2.parse_word("ba").unwrap();
        assert_eq!(g, h);
        assert_eq!(g.to_word(), "ab");
        assert_eq!(z2.parse_word("aBBa").unwrap().to_word(), "aaBB");
    }

    #[test]
    fn heisenberg_commutator_is_center() {
        let h = spec("Heis");
        let a = h.generator(0).unwrap();
        let b = h.generator(1).unwrap();
        let c = h.generator(2).unwrap();
        assert_eq!(super::super::commutator(&a, &b).unwrap(), c);
        // c is central
        for g in [&a, &b] {
            assert_eq!(c.multiply(g).unwrap(), g.multiply(&c).unwrap());
        }
        assert!(h.verify_relations().is_ok());
    }

    #[test]
    fn heisenberg_inverse() {
        let g = GroupElement::heisenberg(3, -2, 5);
        let p = g.multiply(&g.inverse()).unwrap();
        assert!(p.is_identity());
        let q = g.inverse().multiply(&g).unwrap();
        assert!(q.is_identity());
    }

    #[test]
    fn bs_relation_holds() {
        for n in [2u32, 3, 5] {
            let g = spec(&format!("BS(1,{n})"));
            assert!(g.verify_relations().is_ok());
            let a = g.generator(0).unwrap();
            let b = g.generator(1).unwrap();
            let ba = b.multiply(&a).unwrap();
            let an_b = a.pow(i64::from(n)).multiply(&b).unwrap();
            assert_eq!(ba, an_b);
        }
    }

    #[test]
    fn bs_conjugation_produces_fractions() {
        let g = spec("BS(1,2)");
        // b^-1 a b = a^(1/2)
        let w = g.parse_word("Bab").unwrap();
        let (_, t, m) = w.bs_coords().unwrap();
        assert_eq!(t, &rat(1, 2));
        assert_eq!(m, 0);
        assert_eq!(w.to_word(), "Bab");
        assert_eq!(g.parse_word(&w.to_word()).unwrap(), w);
    }

    #[test]
    fn bs_pair_syntax_round_trip() {
        let g = spec("BS(1,2)");
        let w = g.parse_word("(3/8,-2)").unwrap();
        let (_, t, m) = w.bs_coords().unwrap();
        assert_eq!(t, &rat(3, 8));
        assert_eq!(m, -2);
        assert!(g.parse_word("(1/3,0)").is_err());
        let back = g.parse_word(&w.to_word()).unwrap();
        assert_eq!(back, w);
    }

    #[test]
    fn bs_spelling_basics() {
        let g = spec("BS(1,2)");
        for word in ["a", "A", "b", "B", "ab", "Bab", "bbaBB", "aaab"] {
            let w = g.parse_word(word).unwrap();
            let again = g.parse_word(&w.to_word()).unwrap();
            assert_eq!(w, again, "round trip failed for {word}");
        }
        assert_eq!(g.parse_word("ba").unwrap().to_word(), "aab");
    }

    #[test]
    fn pow_matches_repeated_multiplication() {
        let g = spec("BS(1,3)");
        let x = g.parse_word("ab").unwrap();
        let mut acc = g.identity();
        for _ in 0..7 {
            acc = acc.multiply(&x).unwrap();
        }
        assert_eq!(x.pow(7), acc);
        assert_eq!(x.pow(-7), acc.inverse());
        assert!(x.pow(0).is_identity());
    }

    #[test]
    fn family_mismatch_rejected() {
        let f = spec("F(2)").generator(0).unwrap();
        let z = spec("Z^2").generator(0).unwrap();
        assert_eq!(f.multiply(&z).unwrap_err(), GroupError::FamilyMismatch);
        let f2 = spec("F(2)").generator(0).unwrap();
        let f3 = spec("F(3)").generator(0).unwrap();
        assert_eq!(f2.multiply(&f3).unwrap_err(), GroupError::FamilyMismatch);
    }

    #[test]
    fn word_parse_errors() {
        let g = spec("F(2)");
        assert!(g.parse_word("axb").is_err());
        assert!(g.parse_word("abc").is_err());
        assert!(g.parse_word("").is_err());
        assert!(g.parse_word("a b").is_err());
    }

    #[test]
    fn identity_spelling() {
        assert_eq!(spec("Heis").identity().to_word(), "e");
        assert_eq!(spec("F(2)").parse_word("e").unwrap(), spec("F(2)").identity());
    }
}
