//! Finitely generated groups with decidable normal forms.
//!
//! Four families are supported: free groups F(k), free abelian groups Z^k,
//! the integer Heisenberg group, and the solvable Baumslag-Solitar groups
//! BS(1,n). Each family has a canonical normal form that makes equality,
//! multiplication and inversion exact; everything else (balls, word norms,
//! comparison of generating sets) is built on top of those four.

pub mod ball;
mod element;

pub use ball::{bilipschitz_constant, word_norm, BilipschitzReport, CayleyBall, WordMetric};
pub use element::{GroupElement, Letter};

use crate::numeric::Rational;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GroupError {
    #[error("presentation `{input}` unreadable at byte {pos}: {msg}")]
    Presentation {
        input: String,
        pos: usize,
        msg: String,
    },
    #[error("unsupported group: {0}")]
    Unsupported(String),
    #[error("operands live in different groups")]
    FamilyMismatch,
    #[error("word `{word}` unreadable: {msg}")]
    Word { word: String, msg: String },
    #[error("generator index {index} out of range for {family}")]
    GeneratorRange { index: usize, family: String },
    #[error("{value} does not lie in Z[1/{n}]")]
    NotAdic { n: u32, value: String },
    #[error("bad generating set: {0}")]
    BadGeneratingSet(String),
    #[error("ball construction exceeded the element cap {cap}")]
    BallCapExceeded { cap: usize },
    #[error("`{word}` not reached within radius {radius}; the word norm may be larger")]
    NormExceedsRadius { word: String, radius: u32 },
    #[error("`{word}` is not generated by the given set (search exhausted at radius {radius})")]
    NotGenerated { word: String, radius: u32 },
    #[error("relation `{name}` fails under the current normal forms")]
    RelationViolated { name: String },
    #[error("exponent overflow while spelling an element")]
    ExponentOverflow,
}

/// The group family together with its parameters.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Family {
    Free { rank: u32 },
    FreeAbelian { rank: u32 },
    Heisenberg,
    BaumslagSolitar { n: u32 },
}

/// A parsed group presentation. Generators are always named `a`, `b`, `c`,
/// ... in order, with uppercase letters denoting inverses.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GroupSpec {
    family: Family,
}

/// One defining relation, both sides as letter words.
#[derive(Debug, Clone)]
pub struct Relation {
    pub name: String,
    pub lhs: Vec<Letter>,
    pub rhs: Vec<Letter>,
}

const MAX_RANK: u32 = 26;

/// Accepted syntax: `F(k)`, `Z^k`, `Heis`, `BS(1,n)`.
pub fn parse_presentation(input: &str) -> Result<GroupSpec, GroupError> {
    GroupSpec::parse(input)
}

impl GroupSpec {
    pub fn parse(input: &str) -> Result<GroupSpec, GroupError> {
        let t = input.trim();
        let err = |pos: usize, msg: &str| GroupError::Presentation {
            input: input.to_string(),
            pos,
            msg: msg.to_string(),
        };
        if t == "Heis" {
            return Ok(GroupSpec {
                family: Family::Heisenberg,
            });
        }
        if let Some(rest) = t.strip_prefix("F(") {
            let inner = rest
                .strip_suffix(')')
                .ok_or_else(|| err(t.len(), "missing `)`"))?;
            let rank: u32 = inner
                .trim()
                .parse()
                .map_err(|_| err(2, "rank must be a positive integer"))?;
            if rank == 0 || rank > MAX_RANK {
                return Err(GroupError::Unsupported(format!(
                    "free rank must be in 1..={MAX_RANK}, got {rank}"
                )));
            }
            return Ok(GroupSpec {
                family: Family::Free { rank },
            });
        }
        if let Some(rest) = t.strip_prefix("Z^") {
            let rank: u32 = rest
                .trim()
                .parse()
                .map_err(|_| err(2, "exponent must be a positive integer"))?;
            if rank == 0 || rank > MAX_RANK {
                return Err(GroupError::Unsupported(format!(
                    "abelian rank must be in 1..={MAX_RANK}, got {rank}"
                )));
            }
            return Ok(GroupSpec {
                family: Family::FreeAbelian { rank },
            });
        }
        if let Some(rest) = t.strip_prefix("BS(") {
            let inner = rest
                .strip_suffix(')')
                .ok_or_else(|| err(t.len(), "missing `)`"))?;
            let (first, second) = inner
                .split_once(',')
                .ok_or_else(|| err(3, "expected `BS(1,n)`"))?;
            let m: i64 = first
                .trim()
                .parse()
                .map_err(|_| err(3, "first parameter unreadable"))?;
            let n: i64 = second
                .trim()
                .parse()
                .map_err(|_| err(3, "second parameter unreadable"))?;
            if m != 1 {
                return Err(GroupError::Unsupported(format!(
                    "only BS(1,n) is implemented, got BS({m},{n})"
                )));
            }
            if n < 2 || n > 1_000_000 {
                return Err(GroupError::Unsupported(format!(
                    "BS(1,n) needs 2 <= n <= 1000000, got n = {n}"
                )));
            }
            return Ok(GroupSpec {
                family: Family::BaumslagSolitar { n: n as u32 },
            });
        }
        Err(err(0, "expected one of F(k), Z^k, Heis, BS(1,n)"))
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn from_family(family: Family) -> Result<GroupSpec, GroupError> {
        match family {
            Family::Free { rank } | Family::FreeAbelian { rank } if rank == 0 || rank > MAX_RANK => {
                Err(GroupError::Unsupported(format!("rank {rank} out of range")))
            }
            Family::BaumslagSolitar { n } if n < 2 => Err(GroupError::Unsupported(
                "BS(1,n) needs n >= 2".to_string(),
            )),
            f => Ok(GroupSpec { family: f }),
        }
    }

    pub fn describe(&self) -> String {
        match self.family {
            Family::Free { rank } => format!("F({rank})"),
            Family::FreeAbelian { rank } => format!("Z^{rank}"),
            Family::Heisenberg => "Heis".to_string(),
            Family::BaumslagSolitar { n } => format!("BS(1,{n})"),
        }
    }

    pub fn generator_count(&self) -> usize {
        match self.family {
            Family::Free { rank } | Family::FreeAbelian { rank } => rank as usize,
            Family::Heisenberg => 3,
            Family::BaumslagSolitar { .. } => 2,
        }
    }

    pub fn generator_name(&self, index: usize) -> char {
        debug_assert!(index < MAX_RANK as usize);
        (b'a' + index as u8) as char
    }

    pub fn identity(&self) -> GroupElement {
        element::identity_of(self)
    }

    pub fn generator(&self, index: usize) -> Result<GroupElement, GroupError> {
        if index >= self.generator_count() {
            return Err(GroupError::GeneratorRange {
                index,
                family: self.describe(),
            });
        }
        Ok(element::generator_of(self, index))
    }

    /// Folds a letter word into a group element.
    pub fn evaluate_letters(&self, letters: &[Letter]) -> Result<GroupElement, GroupError> {
        let mut acc = self.identity();
        for l in letters {
            let g = self.generator(l.gen as usize)?;
            let term = if l.inverse { g.inverse() } else { g };
            acc = acc.multiply(&term)?;
        }
        Ok(acc)
    }

    pub fn relations(&self) -> Vec<Relation> {
        let pos = |g: u8| Letter {
            gen: g,
            inverse: false,
        };
        let neg = |g: u8| Letter {
            gen: g,
            inverse: true,
        };
        match self.family {
            Family::Free { .. } => Vec::new(),
            Family::FreeAbelian { rank } => {
                let mut out = Vec::new();
                for i in 0..rank as u8 {
                    for j in (i + 1)..rank as u8 {
                        out.push(Relation {
                            name: format!(
                                "{}{} = {}{}",
                                (b'a' + i) as char,
                                (b'a' + j) as char,
                                (b'a' + j) as char,
                                (b'a' + i) as char
                            ),
                            lhs: vec![pos(i), pos(j)],
                            rhs: vec![pos(j), pos(i)],
                        });
                    }
                }
                out
            }
            Family::Heisenberg => vec![
                Relation {
                    name: "c = [a,b]".to_string(),
                    lhs: vec![pos(2)],
                    rhs: vec![pos(0), pos(1), neg(0), neg(1)],
                },
                Relation {
                    name: "ac = ca".to_string(),
                    lhs: vec![pos(0), pos(2)],
                    rhs: vec![pos(2), pos(0)],
                },
                Relation {
                    name: "bc = cb".to_string(),
                    lhs: vec![pos(1), pos(2)],
                    rhs: vec![pos(2), pos(1)],
                },
            ],
            Family::BaumslagSolitar { n } => {
                let mut rhs = vec![pos(0); n as usize];
                rhs.push(pos(1));
                vec![Relation {
                    name: format!("ba = a^{n} b"),
                    lhs: vec![pos(1), pos(0)],
                    rhs,
                }]
            }
        }
    }

    /// Evaluates every defining relation under the normal forms; a failure
    /// would mean the arithmetic itself is broken.
    pub fn verify_relations(&self) -> Result<(), GroupError> {
        for rel in self.relations() {
            let lhs = self.evaluate_letters(&rel.lhs)?;
            let rhs = self.evaluate_letters(&rel.rhs)?;
            if lhs != rhs {
                return Err(GroupError::RelationViolated { name: rel.name });
            }
        }
        Ok(())
    }

    /// Reads a word over the generator letters (`a`, `A`, `b`, ...); `e`
    /// denotes the identity. BS(1,n) additionally accepts the pair syntax
    /// `(p/q,m)`.
    pub fn parse_word(&self, word: &str) -> Result<GroupElement, GroupError> {
        element::parse_word(self, word)
    }
}

/// A symmetric, labelled generating set. Labels double as words, so a set can
/// be reconstructed from its labels alone.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NamedGenerator {
    pub label: String,
    pub element: GroupElement,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratingSet {
    items: Vec<NamedGenerator>,
    inverse_of: Vec<usize>,
}

impl GeneratingSet {
    pub fn new(items: Vec<NamedGenerator>) -> Result<Self, GroupError> {
        if items.is_empty() {
            return Err(GroupError::BadGeneratingSet("empty set".to_string()));
        }
        let family = items[0].element.family();
        for it in &items {
            if it.element.family() != family {
                return Err(GroupError::FamilyMismatch);
            }
            if it.element.is_identity() {
                return Err(GroupError::BadGeneratingSet(format!(
                    "`{}` is the identity",
                    it.label
                )));
            }
        }
        for (i, it) in items.iter().enumerate() {
            for other in &items[i + 1..] {
                if it.element == other.element {
                    return Err(GroupError::BadGeneratingSet(format!(
                        "`{}` and `{}` are the same element",
                        it.label, other.label
                    )));
                }
            }
        }
        let mut inverse_of = Vec::with_capacity(items.len());
        for it in &items {
            let inv = it.element.inverse();
            let j = items
                .iter()
                .position(|o| o.element == inv)
                .ok_or_else(|| {
                    GroupError::BadGeneratingSet(format!(
                        "inverse of `{}` is missing",
                        it.label
                    ))
                })?;
            inverse_of.push(j);
        }
        Ok(GeneratingSet { items, inverse_of })
    }

    /// The standard set: each defining generator together with its inverse,
    /// ordered `a`, `A`, `b`, `B`, ...
    pub fn standard(spec: &GroupSpec) -> Self {
        let mut items = Vec::new();
        for i in 0..spec.generator_count() {
            let g = spec.generator(i).expect("index in range");
            let lower = spec.generator_name(i);
            items.push(NamedGenerator {
                label: lower.to_string(),
                element: g.clone(),
            });
            items.push(NamedGenerator {
                label: lower.to_ascii_uppercase().to_string(),
                element: g.inverse(),
            });
        }
        GeneratingSet::new(items).expect("standard set is symmetric")
    }

    /// Builds a set by parsing each label as a word.
    pub fn from_words(spec: &GroupSpec, labels: &[&str]) -> Result<Self, GroupError> {
        let items = labels
            .iter()
            .map(|l| {
                Ok(NamedGenerator {
                    label: (*l).to_string(),
                    element: spec.parse_word(l)?,
                })
            })
            .collect::<Result<Vec<_>, GroupError>>()?;
        GeneratingSet::new(items)
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn get(&self, i: usize) -> &NamedGenerator {
        &self.items[i]
    }

    pub fn iter(&self) -> impl Iterator<Item = &NamedGenerator> {
        self.items.iter()
    }

    pub fn inverse_of(&self, i: usize) -> usize {
        self.inverse_of[i]
    }

    pub fn labels(&self) -> Vec<String> {
        self.items.iter().map(|it| it.label.clone()).collect()
    }

    pub fn family(&self) -> Family {
        self.items[0].element.family()
    }
}

/// Commutator [g, h] = g h g^-1 h^-1.
pub fn commutator(g: &GroupElement, h: &GroupElement) -> Result<GroupElement, GroupError> {
    g.multiply(h)?
        .multiply(&g.inverse())?
        .multiply(&h.inverse())
}

/// Convenience used by callers that need the BS(1,n) scaling parameter as a
/// rational.
pub fn bs_parameter(spec: &GroupSpec) -> Option<Rational> {
    match spec.family() {
        Family::BaumslagSolitar { n } => Some(crate::numeric::rat_i64(i64::from(*n))),
        _ => None,
    }
}
