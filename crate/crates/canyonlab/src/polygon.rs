//! Newton polygons over exact rational coordinates: lower hulls of support
//! dots, compact edges with co-slopes and horizontal lengths, supporting-line
//! intercepts, and the augmentation by the dot (0, h-1).

use crate::arith::{rati, Rat};
use crate::error::{Error, Result};
use num::Zero;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Dot {
    pub m: u32,
    pub q: Rat,
}

impl Dot {
    pub fn new(m: u32, q: Rat) -> Dot {
        Dot { m, q }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub left: Dot,
    pub right: Dot,
    /// (q_left - q_right) / (m_right - m_left); positive for compact edges.
    pub co_slope: Rat,
    pub horizontal_length: u32,
    /// All input dots lying exactly on the edge, endpoints included,
    /// ordered by m. Needed for face polynomials.
    pub on_edge: Vec<Dot>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NewtonPolygon {
    /// Hull vertices, strictly decreasing in q, strictly increasing in m.
    pub vertices: Vec<Dot>,
    /// Compact edges left-to-right; co-slopes strictly decreasing.
    pub edges: Vec<Edge>,
    /// Deduplicated input support.
    pub dots: Vec<Dot>,
}

/// Lower convex hull of a nonempty dot set, keeping only the strictly
/// descending (positive co-slope) part of the boundary. Collinear dots are
/// merged into a single edge and recorded as on-edge.
pub fn lower_hull(dots: &[Dot]) -> NewtonPolygon {
    assert!(!dots.is_empty(), "empty support");
    let mut support: Vec<Dot> = dots.to_vec();
    support.sort();
    support.dedup();

    // minimal q per m
    let mut pts: Vec<Dot> = vec![];
    for d in &support {
        match pts.last_mut() {
            Some(p) if p.m == d.m => {
                if d.q < p.q {
                    p.q = d.q.clone();
                }
            }
            _ => pts.push(d.clone()),
        }
    }

    // monotone chain lower hull (points sorted by m asc, then q asc)
    let mut hull: Vec<Dot> = vec![];
    for p in &pts {
        while hull.len() >= 2 {
            let a = &hull[hull.len() - 2];
            let b = &hull[hull.len() - 1];
            // cross of (b-a) x (p-a); keep strictly convex turns
            let cross = (rati((b.m - a.m) as i64) * (&p.q - &a.q))
                - ((&b.q - &a.q) * rati((p.m - a.m) as i64));
            if cross <= Rat::zero() {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p.clone());
    }

    // cut the boundary at the first vertex attaining minimal q: the Newton
    // polygon keeps only edges of positive co-slope
    let mut vertices: Vec<Dot> = vec![];
    for v in &hull {
        if let Some(prev) = vertices.last() {
            if v.q >= prev.q {
                break;
            }
        }
        vertices.push(v.clone());
    }

    let mut edges = vec![];
    for w in vertices.windows(2) {
        let (l, r) = (&w[0], &w[1]);
        let co_slope = (&l.q - &r.q) / rati((r.m - l.m) as i64);
        let intercept = &l.q + &co_slope * rati(l.m as i64);
        let mut on_edge: Vec<Dot> = support
            .iter()
            .filter(|d| {
                d.m >= l.m
                    && d.m <= r.m
                    && &d.q + &co_slope * rati(d.m as i64) == intercept
            })
            .cloned()
            .collect();
        on_edge.sort();
        edges.push(Edge {
            left: l.clone(),
            right: r.clone(),
            co_slope,
            horizontal_length: r.m - l.m,
            on_edge,
        });
    }
    NewtonPolygon { vertices, edges, dots: support }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AugmentedPolygon {
    pub base: NewtonPolygon,
    pub added: Dot,
    pub hull: NewtonPolygon,
}

/// Conv(base support ∪ {(0, h-1)}), exposing the top edge E_con.
pub fn augment(base: &NewtonPolygon, h: &Rat) -> AugmentedPolygon {
    let added = Dot::new(0, h - rati(1));
    let mut dots = base.dots.clone();
    dots.push(added.clone());
    let hull = lower_hull(&dots);
    AugmentedPolygon { base: base.clone(), added, hull }
}

impl AugmentedPolygon {
    /// The top (leftmost) edge; its left endpoint is (0, h-1).
    pub fn e_con(&self) -> Option<&Edge> {
        self.hull.edges.first()
    }
}

/// Co-slope and endpoints of the edge starting at (0, h); errors when
/// (0, h) is not the leftmost vertex.
pub fn top_edge_data(np: &NewtonPolygon, h: &Rat) -> Result<(Rat, Dot, Dot)> {
    let e = np.edges.first().ok_or_else(|| {
        Error::MalformedTopEdge("polygon has no compact edges".into())
    })?;
    if e.left.m != 0 || &e.left.q != h {
        return Err(Error::MalformedTopEdge(format!(
            "left vertex is ({}, {}), expected (0, {h})",
            e.left.m, e.left.q
        )));
    }
    Ok((e.co_slope.clone(), e.left.clone(), e.right.clone()))
}

/// ω = min{ q + δ·m } over the support.
pub fn y_intercept(support: &[Dot], delta: &Rat) -> Rat {
    support
        .iter()
        .map(|d| &d.q + delta * rati(d.m as i64))
        .min()
        .expect("empty support")
}

/// Compact edges with co-slope strictly below `bound`.
pub fn edges_below<'a>(np: &'a NewtonPolygon, bound: &Rat) -> Vec<&'a Edge> {
    np.edges.iter().filter(|e| &e.co_slope < bound).collect()
}
