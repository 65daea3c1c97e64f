//! Balls in the word metric, built by breadth-first search over normal forms.
//!
//! Elements are stored in a canonical order (word norm first, then the normal
//! form's own ordering) so that everything downstream - constraint rows,
//! trajectory files, CSV artifacts - is reproducible byte for byte. Each
//! non-identity element records one BFS parent edge, which later lets actions
//! be evaluated incrementally along the tree.

use super::{Family, GeneratingSet, GroupElement, GroupError, GroupSpec};
use crate::numeric::{max_rational, rat_i64, Rational};
use std::collections::{BTreeMap, HashMap};

/// Default cap on the number of elements a single BFS may visit. Matches the
/// documented desk-scale budget; override through the `*_capped` entry points
/// or the CLI environment knob.
pub const DEFAULT_ELEMENT_CAP: usize = 2_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BallEdge {
    /// Index of the parent element.
    pub parent: usize,
    /// Index into the generating set; child = gens[gen] * parent.
    pub gen: usize,
}

#[derive(Debug, Clone)]
pub struct CayleyBall {
    spec: GroupSpec,
    gens: GeneratingSet,
    radius: u32,
    elements: Vec<GroupElement>,
    norms: Vec<u32>,
    parents: Vec<Option<BallEdge>>,
    index: HashMap<GroupElement, usize>,
    /// layer_ends[r] = number of elements of norm <= r.
    layer_ends: Vec<usize>,
}

impl CayleyBall {
    pub fn build(
        spec: &GroupSpec,
        gens: &GeneratingSet,
        radius: u32,
    ) -> Result<CayleyBall, GroupError> {
        Self::build_capped(spec, gens, radius, DEFAULT_ELEMENT_CAP)
    }

    pub fn build_capped(
        spec: &GroupSpec,
        gens: &GeneratingSet,
        radius: u32,
        cap: usize,
    ) -> Result<CayleyBall, GroupError> {
        if gens.family() != *spec.family() {
            return Err(GroupError::FamilyMismatch);
        }
        let mut elements = vec![spec.identity()];
        let mut norms = vec![0u32];
        let mut parents: Vec<Option<BallEdge>> = vec![None];
        let mut index = HashMap::new();
        index.insert(spec.identity(), 0usize);
        let mut layer_ends = vec![1usize];
        let mut frontier: Vec<usize> = vec![0];

        for depth in 1..=radius {
            // BTreeMap keys come out sorted, so each layer lands in canonical
            // order and the parent of a child is its first discoverer in that
            // order.
            let mut layer: BTreeMap<GroupElement, BallEdge> = BTreeMap::new();
            for &pi in &frontier {
                let parent_elem = elements[pi].clone();
                for (gi, ng) in gens.iter().enumerate() {
                    let child = ng.element.multiply(&parent_elem)?;
                    if !index.contains_key(&child) && !layer.contains_key(&child) {
                        layer.insert(child, BallEdge { parent: pi, gen: gi });
                    }
                }
            }
            frontier = Vec::with_capacity(layer.len());
            for (elem, edge) in layer {
                let id = elements.len();
                if id >= cap {
                    return Err(GroupError::BallCapExceeded { cap });
                }
                index.insert(elem.clone(), id);
                elements.push(elem);
                norms.push(depth);
                parents.push(Some(edge));
                frontier.push(id);
            }
            layer_ends.push(elements.len());
            if frontier.is_empty() {
                // The whole group is finite-diameter w.r.t. this set; pad the
                // remaining layers.
                for _ in depth + 1..=radius {
                    layer_ends.push(elements.len());
                }
                break;
            }
        }
        Ok(CayleyBall {
            spec: spec.clone(),
            gens: gens.clone(),
            radius,
            elements,
            norms,
            parents,
            index,
            layer_ends,
        })
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    pub fn gens(&self) -> &GeneratingSet {
        &self.gens
    }

    pub fn radius(&self) -> u32 {
        self.radius
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn element(&self, i: usize) -> &GroupElement {
        &self.elements[i]
    }

    pub fn elements(&self) -> &[GroupElement] {
        &self.elements
    }

    pub fn norm(&self, i: usize) -> u32 {
        self.norms[i]
    }

    pub fn parent(&self, i: usize) -> Option<BallEdge> {
        self.parents[i]
    }

    pub fn index_of(&self, g: &GroupElement) -> Option<usize> {
        self.index.get(g).copied()
    }

    pub fn contains(&self, g: &GroupElement) -> bool {
        self.index.contains_key(g)
    }

    /// Number of elements of norm <= r.
    pub fn len_at_radius(&self, r: u32) -> usize {
        self.layer_ends[(r as usize).min(self.layer_ends.len() - 1)]
    }

    /// Number of elements of norm exactly r.
    pub fn sphere_count(&self, r: u32) -> usize {
        if r == 0 {
            1
        } else {
            self.len_at_radius(r) - self.len_at_radius(r - 1)
        }
    }

    /// Generator indices along the BFS tree path from the identity, outermost
    /// first: element(i) = gens[g_k] * ... * gens[g_1] * e.
    pub fn tree_word(&self, i: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut cur = i;
        while let Some(edge) = self.parents[cur] {
            out.push(edge.gen);
            cur = edge.parent;
        }
        out
    }
}

/// Lazily expanded BFS distances from the identity for an arbitrary
/// generating set, memoized across queries.
pub struct WordMetric {
    spec: GroupSpec,
    gens: GeneratingSet,
    seen: HashMap<GroupElement, u32>,
    frontier: Vec<GroupElement>,
    depth: u32,
    cap: usize,
    exhausted: bool,
}

impl WordMetric {
    pub fn new(spec: &GroupSpec, gens: &GeneratingSet) -> Result<WordMetric, GroupError> {
        Self::new_capped(spec, gens, DEFAULT_ELEMENT_CAP)
    }

    pub fn new_capped(
        spec: &GroupSpec,
        gens: &GeneratingSet,
        cap: usize,
    ) -> Result<WordMetric, GroupError> {
        if gens.family() != *spec.family() {
            return Err(GroupError::FamilyMismatch);
        }
        let mut seen = HashMap::new();
        seen.insert(spec.identity(), 0);
        Ok(WordMetric {
            spec: spec.clone(),
            gens: gens.clone(),
            seen,
            frontier: vec![spec.identity()],
            depth: 0,
            cap,
            exhausted: false,
        })
    }

    fn expand_layer(&mut self) -> Result<(), GroupError> {
        let mut next = Vec::new();
        for g in std::mem::take(&mut self.frontier) {
            for ng in self.gens.iter() {
                let child = ng.element.multiply(&g)?;
                if !self.seen.contains_key(&child) {
                    if self.seen.len() >= self.cap {
                        return Err(GroupError::BallCapExceeded { cap: self.cap });
                    }
                    self.seen.insert(child.clone(), self.depth + 1);
                    next.push(child);
                }
            }
        }
        self.depth += 1;
        self.exhausted = next.is_empty();
        self.frontier = next;
        Ok(())
    }

    /// BFS distance from the identity to `g`, expanding at most to `radius`.
    pub fn norm_within(&mut self, g: &GroupElement, radius: u32) -> Result<u32, GroupError> {
        if g.family() != *self.spec.family() {
            return Err(GroupError::FamilyMismatch);
        }
        loop {
            if let Some(&n) = self.seen.get(g) {
                return Ok(n);
            }
            if self.exhausted {
                return Err(GroupError::NotGenerated {
                    word: g.to_word(),
                    radius: self.depth,
                });
            }
            if self.depth >= radius {
                return Err(GroupError::NormExceedsRadius {
                    word: g.to_word(),
                    radius,
                });
            }
            self.expand_layer()?;
        }
    }

    pub fn explored_depth(&self) -> u32 {
        self.depth
    }
}

/// One-shot word norm; for repeated queries construct a `WordMetric`.
pub fn word_norm(
    spec: &GroupSpec,
    gens: &GeneratingSet,
    g: &GroupElement,
    radius: u32,
) -> Result<u32, GroupError> {
    WordMetric::new(spec, gens)?.norm_within(g, radius)
}

#[derive(Debug, Clone)]
pub struct BilipschitzReport {
    pub radius: u32,
    /// Least C with |g|_S' / C <= |g|_S <= C |g|_S' on the ball.
    pub constant: Rational,
    pub witness_word: String,
    pub witness_norm_s: u32,
    pub witness_norm_s_prime: u32,
    pub elements_checked: usize,
    pub s_labels: Vec<String>,
    pub s_prime_labels: Vec<String>,
}

/// Exhaustively compares the word metrics of two generating sets over the
/// S-ball of the given radius. `search_radius` bounds the BFS in the
/// S'-metric; it must be at least the largest S'-norm occurring in the ball.
pub fn bilipschitz_constant(
    spec: &GroupSpec,
    s: &GeneratingSet,
    s_prime: &GeneratingSet,
    radius: u32,
    search_radius: u32,
) -> Result<BilipschitzReport, GroupError> {
    let ball = CayleyBall::build(spec, s, radius)?;
    let mut metric = WordMetric::new(spec, s_prime)?;
    let mut constant = rat_i64(1);
    let mut witness: Option<(usize, u32, u32)> = None;
    for i in 1..ball.len() {
        let ns = ball.norm(i);
        let np = metric.norm_within(ball.element(i), search_radius)?;
        if np == 0 {
            return Err(GroupError::BadGeneratingSet(
                "S'-norm 0 for a non-identity element".to_string(),
            ));
        }
        let ratio = max_rational(
            Rational::new(ns.into(), np.into()),
            Rational::new(np.into(), ns.into()),
        );
        if ratio > constant {
            constant = ratio;
            witness = Some((i, ns, np));
        }
    }
    let (wi, wns, wnp) = witness.unwrap_or((0, 0, 0));
    let report = BilipschitzReport {
        radius,
        constant,
        witness_word: ball.element(wi).to_word(),
        witness_norm_s: wns,
        witness_norm_s_prime: wnp,
        elements_checked: ball.len(),
        s_labels: s.labels(),
        s_prime_labels: s_prime.labels(),
    };
    // Double check both inequalities on every element; cheap and decisive.
    let mut metric2 = WordMetric::new(spec, s_prime)?;
    for i in 1..ball.len() {
        let ns = rat_i64(i64::from(ball.norm(i)));
        let np = rat_i64(i64::from(metric2.norm_within(ball.element(i), search_radius)?));
        if ns > &report.constant * &np || np > &report.constant * &ns {
            return Err(GroupError::BadGeneratingSet(
                "internal: bilipschitz constant failed its own check".to_string(),
            ));
        }
    }
    Ok(report)
}

/// True when the ball is closed under inverse with matching norms, an
/// invariant of symmetric generating sets.
pub fn ball_symmetric(ball: &CayleyBall) -> bool {
    (0..ball.len()).all(|i| {
        ball.index_of(&ball.element(i).inverse())
            .map(|j| ball.norm(j) == ball.norm(i))
            .unwrap_or(false)
    })
}

impl Family {
    /// Exact ball sizes known in closed form, used as oracles in tests.
    pub fn reference_ball_size(&self, r: u32) -> Option<u64> {
        let r = u64::from(r);
        match self {
            // 1 + 2k((2k-1)^r - 1)/(2k-2) for rank k >= 2; 2r + 1 for rank 1.
            Family::Free { rank } => {
                let k = u64::from(*rank);
                if k == 1 {
                    Some(2 * r + 1)
                } else {
                    let q = 2 * k - 1;
                    Some(1 + 2 * k * (q.pow(r as u32) - 1) / (q - 1))
                }
            }
            Family::FreeAbelian { rank } if *rank == 1 => Some(2 * r + 1),
            // |B(r)| in Z^2 with the diamond metric: 2r^2 + 2r + 1.
            Family::FreeAbelian { rank } if *rank == 2 => Some(2 * r * r + 2 * r + 1),
            _ => None,
        }
    }
}
