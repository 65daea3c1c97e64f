//! Exact convex polygon clipping (Sutherland-Hodgman with rational
//! coordinates). Polygons may degenerate to segments or points and stay
//! valid; every vertex produced is the intersection of two input constraint
//! lines, so coordinates never leave the field generated by the input.

use crate::numeric::Rational;

pub(crate) type Vertex = (Rational, Rational);

#[derive(Debug, Clone)]
pub(crate) struct Polygon {
    verts: Vec<Vertex>,
}

fn eval(a: &Rational, b: &Rational, v: &Vertex) -> Rational {
    a * &v.0 + b * &v.1
}

fn intersect(a: &Rational, b: &Rational, c: &Rational, p: &Vertex, q: &Vertex) -> Vertex {
    let fp = eval(a, b, p);
    let fq = eval(a, b, q);
    debug_assert!(fp != fq, "segment parallel to the clipping line");
    let t = (c - &fp) / (&fq - &fp);
    (
        &p.0 + &t * (&q.0 - &p.0),
        &p.1 + &t * (&q.1 - &p.1),
    )
}

impl Polygon {
    pub fn from_box(x_lo: Rational, x_hi: Rational, y_lo: Rational, y_hi: Rational) -> Polygon {
        debug_assert!(x_lo <= x_hi && y_lo <= y_hi);
        Polygon {
            verts: vec![
                (x_lo.clone(), y_lo.clone()),
                (x_hi.clone(), y_lo),
                (x_hi, y_hi.clone()),
                (x_lo, y_hi),
            ],
        }
    }

    pub fn is_empty(&self) -> bool {
        self.verts.is_empty()
    }

    #[cfg(test)]
    pub fn vertices(&self) -> &[Vertex] {
        &self.verts
    }

    /// Intersection with the half-plane a x + b y <= c.
    pub fn clip(&self, a: &Rational, b: &Rational, c: &Rational) -> Polygon {
        let inside = |v: &Vertex| eval(a, b, v) <= *c;
        match self.verts.len() {
            0 => Polygon { verts: Vec::new() },
            1 => {
                if inside(&self.verts[0]) {
                    self.clone()
                } else {
                    Polygon { verts: Vec::new() }
                }
            }
            2 => {
                let (p, q) = (&self.verts[0], &self.verts[1]);
                match (inside(p), inside(q)) {
                    (true, true) => self.clone(),
                    (false, false) => Polygon { verts: Vec::new() },
                    (pi, _) => {
                        let cut = intersect(a, b, c, p, q);
                        let kept = if pi { p.clone() } else { q.clone() };
                        let verts = if kept == cut {
                            vec![kept]
                        } else {
                            vec![kept, cut]
                        };
                        Polygon { verts }
                    }
                }
            }
            n => {
                let mut out: Vec<Vertex> = Vec::with_capacity(n + 1);
                for i in 0..n {
                    let p = &self.verts[i];
                    let q = &self.verts[(i + 1) % n];
                    let pi = inside(p);
                    let qi = inside(q);
                    if pi {
                        out.push(p.clone());
                        if !qi {
                            out.push(intersect(a, b, c, p, q));
                        }
                    } else if qi {
                        out.push(intersect(a, b, c, p, q));
                    }
                }
                dedup_cyclic(&mut out);
                Polygon { verts: out }
            }
        }
    }

    /// Minimum of a x + b y over the vertices, with the attaining vertex
    /// (ties broken toward the lexicographically smallest vertex).
    pub fn minimize(&self, a: &Rational, b: &Rational) -> Option<(Rational, Vertex)> {
        let mut best: Option<(Rational, Vertex)> = None;
        for v in &self.verts {
            let val = eval(a, b, v);
            let better = match &best {
                None => true,
                Some((bv, bvert)) => val < *bv || (val == *bv && v < bvert),
            };
            if better {
                best = Some((val, v.clone()));
            }
        }
        best
    }

    pub fn lex_min_vertex(&self) -> Option<Vertex> {
        self.verts.iter().min().cloned()
    }
}

fn dedup_cyclic(verts: &mut Vec<Vertex>) {
    verts.dedup();
    while verts.len() > 1 && verts.first() == verts.last() {
        verts.pop();
    }
}
