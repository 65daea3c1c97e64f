//! Exact linear actions on Q^1 and Q^2.
//!
//! An action assigns an invertible rational matrix to each defining generator
//! and is only accepted if every defining relation evaluates to an exact
//! matrix identity. Arbitrary elements are evaluated through their normal
//! forms, and a ball's BFS tree gives the same matrices incrementally (a fact
//! the tests pin down).
//!
//! The module also carries the auxiliary skew action of BS(1,n) on
//! Q[1/n] x Z used to manufacture pseudotrajectories, and a classifier for
//! the hyperbolic type of a rational matrix with rational eigenvalues.

use crate::group::{CayleyBall, Family, GroupElement, GroupError, GroupSpec};
use crate::numeric::{pow_of, Rational};
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ActionError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error("dimension {0} unsupported (only 1 and 2)")]
    Dimension(usize),
    #[error("matrix is singular: {0}")]
    Singular(String),
    #[error("action needs {expected} matrices, got {got}")]
    GeneratorCount { expected: usize, got: usize },
    #[error("matrices have mixed dimensions")]
    MixedDimensions,
    #[error("relation `{name}` fails; residual {residual}")]
    RelationBroken { name: String, residual: String },
    #[error("point dimension does not match the action")]
    PointDimension,
    #[error("element `{word}` needs exponent {exponent}, beyond the spelling cap")]
    ExponentTooLarge { word: String, exponent: String },
    #[error("expected a {expected} element, got {got}")]
    WrongFamily { expected: String, got: String },
    #[error("hyperbolic classification needs a triangular or diagonal matrix, got {0}")]
    UnsupportedShape(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point {
    coords: Vec<Rational>,
}

impl Point {
    pub fn new(coords: Vec<Rational>) -> Point {
        assert!(
            (1..=2).contains(&coords.len()),
            "points live in dimension 1 or 2"
        );
        Point { coords }
    }

    pub fn one_d(x: Rational) -> Point {
        Point { coords: vec![x] }
    }

    pub fn two_d(x: Rational, y: Rational) -> Point {
        Point { coords: vec![x, y] }
    }

    pub fn zero(dim: usize) -> Point {
        Point::new(vec![Rational::zero(); dim])
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coord(&self, i: usize) -> &Rational {
        &self.coords[i]
    }

    pub fn coords(&self) -> &[Rational] {
        &self.coords
    }

    pub fn add(&self, other: &Point) -> Point {
        assert_eq!(self.dim(), other.dim());
        Point {
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Point) -> Point {
        assert_eq!(self.dim(), other.dim());
        Point {
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn scale(&self, s: &Rational) -> Point {
        Point {
            coords: self.coords.iter().map(|a| a * s).collect(),
        }
    }

    pub fn sup_norm(&self) -> Rational {
        self.coords
            .iter()
            .map(|c| c.abs())
            .max()
            .expect("points are nonempty")
    }

    /// Distance in the sup metric; the metric every tolerance in the toolkit
    /// refers to.
    pub fn sup_dist(&self, other: &Point) -> Rational {
        self.sub(other).sup_norm()
    }
}

impl std::fmt::Display for Point {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self
            .coords
            .iter()
            .map(crate::numeric::format_rational)
            .collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// An invertible rational matrix of dimension 1 or 2 with its inverse stored
/// eagerly, so negative powers never re-derive it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalMatrix {
    dim: usize,
    entries: Vec<Rational>,
    inv: Vec<Rational>,
}

impl RationalMatrix {
    pub fn new(dim: usize, entries: Vec<Rational>) -> Result<RationalMatrix, ActionError> {
        if !(1..=2).contains(&dim) {
            return Err(ActionError::Dimension(dim));
        }
        assert_eq!(entries.len(), dim * dim, "entry count must be dim^2");
        let inv = match dim {
            1 => {
                if entries[0].is_zero() {
                    return Err(ActionError::Singular("[0]".to_string()));
                }
                vec![entries[0].recip()]
            }
            _ => {
                let det = &entries[0] * &entries[3] - &entries[1] * &entries[2];
                if det.is_zero() {
                    return Err(ActionError::Singular(format_entries(&entries)));
                }
                vec![
                    &entries[3] / &det,
                    -&entries[1] / &det,
                    -&entries[2] / &det,
                    &entries[0] / &det,
                ]
            }
        };
        Ok(RationalMatrix { dim, entries, inv })
    }

    pub fn identity(dim: usize) -> RationalMatrix {
        let mut entries = vec![Rational::zero(); dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = Rational::one();
        }
        RationalMatrix::new(dim, entries).expect("identity is invertible")
    }

    pub fn diagonal(diag: &[Rational]) -> Result<RationalMatrix, ActionError> {
        match diag.len() {
            1 => RationalMatrix::new(1, vec![diag[0].clone()]),
            2 => RationalMatrix::new(
                2,
                vec![
                    diag[0].clone(),
                    Rational::zero(),
                    Rational::zero(),
                    diag[1].clone(),
                ],
            ),
            d => Err(ActionError::Dimension(d)),
        }
    }

    pub fn from_rows_2(rows: [[Rational; 2]; 2]) -> Result<RationalMatrix, ActionError> {
        let [[a, b], [c, d]] = rows;
        RationalMatrix::new(2, vec![a, b, c, d])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, r: usize, c: usize) -> &Rational {
        &self.entries[r * self.dim + c]
    }

    pub fn entries(&self) -> &[Rational] {
        &self.entries
    }

    pub fn row(&self, r: usize) -> &[Rational] {
        &self.entries[r * self.dim..(r + 1) * self.dim]
    }

    pub fn inverse(&self) -> RationalMatrix {
        RationalMatrix {
            dim: self.dim,
            entries: self.inv.clone(),
            inv: self.entries.clone(),
        }
    }

    pub fn mul(&self, other: &RationalMatrix) -> RationalMatrix {
        assert_eq!(self.dim, other.dim, "matrix dimensions must agree");
        let d = self.dim;
        let mut entries = vec![Rational::zero(); d * d];
        for r in 0..d {
            for c in 0..d {
                let mut acc = Rational::zero();
                for k in 0..d {
                    acc += self.entry(r, k) * other.entry(k, c);
                }
                entries[r * d + c] = acc;
            }
        }
        let mut inv = vec![Rational::zero(); d * d];
        for r in 0..d {
            for c in 0..d {
                let mut acc = Rational::zero();
                for k in 0..d {
                    acc += &other.inv[r * d + k] * &self.inv[k * d + c];
                }
                inv[r * d + c] = acc;
            }
        }
        RationalMatrix {
            dim: d,
            entries,
            inv,
        }
    }

    pub fn pow(&self, e: i64) -> RationalMatrix {
        let mut base = if e < 0 { self.inverse() } else { self.clone() };
        let mut k = e.unsigned_abs();
        let mut acc = RationalMatrix::identity(self.dim);
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub fn apply(&self, p: &Point) -> Point {
        assert_eq!(self.dim, p.dim(), "matrix/point dimension mismatch");
        let coords = (0..self.dim)
            .map(|r| {
                (0..self.dim)
                    .map(|c| self.entry(r, c) * p.coord(c))
                    .fold(Rational::zero(), |a, b| a + b)
            })
            .collect();
        Point::new(coords)
    }

    pub fn det(&self) -> Rational {
        match self.dim {
            1 => self.entries[0].clone(),
            _ => &self.entries[0] * &self.entries[3] - &self.entries[1] * &self.entries[2],
        }
    }

    /// Operator norm with respect to the sup norm: max absolute row sum.
    pub fn op_norm_sup(&self) -> Rational {
        (0..self.dim)
            .map(|r| {
                self.row(r)
                    .iter()
                    .map(|e| e.abs())
                    .fold(Rational::zero(), |a, b| a + b)
            })
            .max()
            .expect("dim >= 1")
    }
}

impl std::fmt::Display for RationalMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&format_entries(&self.entries))
    }
}

fn format_entries(entries: &[Rational]) -> String {
    let parts: Vec<String> = entries.iter().map(crate::numeric::format_rational).collect();
    format!("[{}]", parts.join(", "))
}

/// A relation-checked assignment of matrices to the defining generators.
#[derive(Debug, Clone)]
pub struct LinearAction {
    spec: GroupSpec,
    dim: usize,
    mats: Vec<RationalMatrix>,
    lipschitz: Rational,
}

impl LinearAction {
    /// Verifies dimensions and every defining relation before accepting.
    pub fn load(spec: &GroupSpec, mats: Vec<RationalMatrix>) -> Result<LinearAction, ActionError> {
        let expected = spec.generator_count();
        if mats.len() != expected {
            return Err(ActionError::GeneratorCount {
                expected,
                got: mats.len(),
            });
        }
        let dim = mats[0].dim();
        if mats.iter().any(|m| m.dim() != dim) {
            return Err(ActionError::MixedDimensions);
        }
        let eval = |word: &[crate::group::Letter]| -> RationalMatrix {
            word.iter().fold(RationalMatrix::identity(dim), |acc, l| {
                let m = if l.inverse {
                    mats[l.gen as usize].inverse()
                } else {
                    mats[l.gen as usize].clone()
                };
                acc.mul(&m)
            })
        };
        for rel in spec.relations() {
            let lhs = eval(&rel.lhs);
            let rhs = eval(&rel.rhs);
            if lhs != rhs {
                let residual: Vec<Rational> = lhs
                    .entries()
                    .iter()
                    .zip(rhs.entries())
                    .map(|(a, b)| a - b)
                    .collect();
                return Err(ActionError::RelationBroken {
                    name: rel.name,
                    residual: format_entries(&residual),
                });
            }
        }
        let lipschitz = mats
            .iter()
            .flat_map(|m| [m.op_norm_sup(), m.inverse().op_norm_sup()])
            .max()
            .expect("at least one generator");
        Ok(LinearAction {
            spec: spec.clone(),
            dim,
            mats,
            lipschitz,
        })
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Max sup-operator norm over the defining generators and their inverses.
    pub fn lipschitz(&self) -> &Rational {
        &self.lipschitz
    }

    pub fn generator_matrix(&self, i: usize) -> &RationalMatrix {
        &self.mats[i]
    }

    /// Evaluates the action on an arbitrary element through its normal form.
    pub fn matrix_of(&self, g: &GroupElement) -> Result<RationalMatrix, ActionError> {
        if g.family() != *self.spec.family() {
            return Err(ActionError::WrongFamily {
                expected: self.spec.describe(),
                got: GroupSpec::from_family(g.family())
                    .map(|s| s.describe())
                    .unwrap_or_else(|_| "?".to_string()),
            });
        }
        match self.spec.family() {
            Family::Free { .. } => {
                let word = g.as_free_word().expect("family checked");
                Ok(word.iter().fold(RationalMatrix::identity(self.dim), |acc, l| {
                    let m = if l.inverse {
                        self.mats[l.gen as usize].inverse()
                    } else {
                        self.mats[l.gen as usize].clone()
                    };
                    acc.mul(&m)
                }))
            }
            Family::FreeAbelian { .. } => {
                let exps = g.abelian_exps().expect("family checked");
                let mut acc = RationalMatrix::identity(self.dim);
                for (i, &e) in exps.iter().enumerate() {
                    if e != 0 {
                        acc = acc.mul(&self.mats[i].pow(e));
                    }
                }
                Ok(acc)
            }
            Family::Heisenberg => {
                let (a, b, c) = g.heisenberg_coords().expect("family checked");
                Ok(self.mats[0]
                    .pow(a)
                    .mul(&self.mats[1].pow(b))
                    .mul(&self.mats[2].pow(c)))
            }
            Family::BaumslagSolitar { .. } => {
                let (u, v, w) = g.bs_decomposition().ok_or_else(|| {
                    let (_, t, _) = g.bs_coords().expect("family checked");
                    ActionError::ExponentTooLarge {
                        word: g.to_word(),
                        exponent: t.to_string(),
                    }
                })?;
                Ok(self.mats[1]
                    .pow(-(u as i64))
                    .mul(&self.mats[0].pow(v))
                    .mul(&self.mats[1].pow(w as i64)))
            }
        }
    }

    pub fn apply(&self, g: &GroupElement, x: &Point) -> Result<Point, ActionError> {
        if x.dim() != self.dim {
            return Err(ActionError::PointDimension);
        }
        Ok(self.matrix_of(g)?.apply(x))
    }

    /// Matrix of a named generator (which may be a composite word).
    pub fn matrix_of_named(
        &self,
        gens: &crate::group::GeneratingSet,
        i: usize,
    ) -> Result<RationalMatrix, ActionError> {
        self.matrix_of(&gens.get(i).element)
    }
}

/// Evaluates the action on every ball element via the BFS tree: the identity
/// gets I, and each child multiplies its edge generator's matrix on the left.
pub fn matrices_on_ball(
    action: &LinearAction,
    ball: &CayleyBall,
) -> Result<Vec<RationalMatrix>, ActionError> {
    if ball.spec().family() != action.spec.family() {
        return Err(ActionError::WrongFamily {
            expected: action.spec.describe(),
            got: ball.spec().describe(),
        });
    }
    let gen_mats: Vec<RationalMatrix> = (0..ball.gens().len())
        .map(|i| action.matrix_of(&ball.gens().get(i).element))
        .collect::<Result<_, _>>()?;
    let mut out: Vec<RationalMatrix> = Vec::with_capacity(ball.len());
    out.push(RationalMatrix::identity(action.dim));
    for i in 1..ball.len() {
        let edge = ball.parent(i).expect("non-identity elements have parents");
        debug_assert!(edge.parent < i);
        let m = gen_mats[edge.gen].mul(&out[edge.parent]);
        out.push(m);
    }
    Ok(out)
}

/// State of the auxiliary skew action of BS(1,n): a rational fiber coordinate
/// and an integer level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuxState {
    pub x: Rational,
    pub level: i64,
}

impl AuxState {
    pub fn new(x: Rational, level: i64) -> AuxState {
        AuxState { x, level }
    }

    pub fn origin() -> AuxState {
        AuxState {
            x: Rational::zero(),
            level: 0,
        }
    }
}

/// The skew action: a shifts the fiber coordinate by n^-level, b raises the
/// level. In closed form, (t, m) sends (x, k) to (x + t n^-(k+m), k + m).
pub fn aux_apply(g: &GroupElement, s: &AuxState) -> Result<AuxState, ActionError> {
    let (n, t, m) = g.bs_coords().ok_or_else(|| ActionError::WrongFamily {
        expected: "BS(1,n)".to_string(),
        got: GroupSpec::from_family(g.family())
            .map(|s| s.describe())
            .unwrap_or_else(|_| "?".to_string()),
    })?;
    let level = s.level + m;
    let x = &s.x + t * pow_of(n, -(s.level + m));
    Ok(AuxState { x, level })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HyperbolicClass {
    Expanding,
    Contracting,
    Saddle,
    NonHyperbolic,
}

#[derive(Debug, Clone)]
pub struct EigenData {
    pub value: Rational,
    pub vector: Vec<Rational>,
}

#[derive(Debug, Clone)]
pub struct Hyperbolicity {
    pub class: HyperbolicClass,
    /// Sorted by |value| ascending. A Jordan block contributes a single
    /// eigendirection.
    pub eigen: Vec<EigenData>,
}

impl Hyperbolicity {
    pub fn stable(&self) -> Vec<&EigenData> {
        self.eigen
            .iter()
            .filter(|e| e.value.abs() < Rational::one())
            .collect()
    }

    pub fn unstable(&self) -> Vec<&EigenData> {
        self.eigen
            .iter()
            .filter(|e| e.value.abs() > Rational::one())
            .collect()
    }
}

/// Classifies a matrix whose eigenvalues are readable from a triangular or
/// diagonal shape. General 2x2 matrices are out of scope and rejected.
pub fn hyperbolic_type(m: &RationalMatrix) -> Result<Hyperbolicity, ActionError> {
    let one = Rational::one();
    let classify = |values: &[Rational]| {
        if values.iter().any(|v| v.abs() == one) {
            HyperbolicClass::NonHyperbolic
        } else if values.iter().all(|v| v.abs() > one) {
            HyperbolicClass::Expanding
        } else if values.iter().all(|v| v.abs() < one) {
            HyperbolicClass::Contracting
        } else {
            HyperbolicClass::Saddle
        }
    };
    if m.dim() == 1 {
        let v = m.entry(0, 0).clone();
        return Ok(Hyperbolicity {
            class: classify(&[v.clone()]),
            eigen: vec![EigenData {
                value: v,
                vector: vec![Rational::one()],
            }],
        });
    }
    let a = m.entry(0, 0).clone();
    let b = m.entry(0, 1).clone();
    let c = m.entry(1, 0).clone();
    let d = m.entry(1, 1).clone();
    let upper = c.is_zero();
    let lower = b.is_zero();
    if !upper && !lower {
        return Err(ActionError::UnsupportedShape(m.to_string()));
    }
    let class = classify(&[a.clone(), d.clone()]);
    let mut eigen: Vec<EigenData> = Vec::new();
    if upper && lower {
        eigen.push(EigenData {
            value: a.clone(),
            vector: vec![Rational::one(), Rational::zero()],
        });
        eigen.push(EigenData {
            value: d.clone(),
            vector: vec![Rational::zero(), Rational::one()],
        });
    } else if a == d {
        // Jordan block: single eigendirection.
        let vector = if upper {
            vec![Rational::one(), Rational::zero()]
        } else {
            vec![Rational::zero(), Rational::one()]
        };
        eigen.push(EigenData { value: a.clone(), vector });
    } else if upper {
        eigen.push(EigenData {
            value: a.clone(),
            vector: vec![Rational::one(), Rational::zero()],
        });
        eigen.push(EigenData {
            value: d.clone(),
            vector: vec![b.clone(), &d - &a],
        });
    } else {
        eigen.push(EigenData {
            value: a.clone(),
            vector: vec![&a - &d, c.clone()],
        });
        eigen.push(EigenData {
            value: d.clone(),
            vector: vec![Rational::zero(), Rational::one()],
        });
    }
    eigen.sort_by(|x, y| {
        x.value
            .abs()
            .cmp(&y.value.abs())
            .then(x.value.cmp(&y.value))
    });
    Ok(Hyperbolicity { class, eigen })
}
