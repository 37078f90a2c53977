//! Kuo-Lu contact tree of the Puiseux roots of f: bars at pairwise contact
//! heights, and the prediction of the low (topological) edges of the
//! relative Newton polygon from contact data.

use crate::arith::{Rat, Tower};
use crate::error::{Error, Result};
use crate::poly::BivarPoly;
use crate::series::PuiseuxSeries;
use crate::solver::{puiseux_roots, RootBundle};
use std::sync::Arc;

#[derive(Debug, Clone, PartialEq)]
pub enum KuoLuNode {
    /// Index into the flattened member list.
    Leaf(usize),
    Bar { height: Rat, children: Vec<KuoLuNode> },
}

#[derive(Debug, Clone)]
pub struct KuoLuTree {
    /// All individual roots (every conjugate of every class), with
    /// multiplicities. Leaf indices refer to this list.
    pub members: Vec<(PuiseuxSeries, u32)>,
    pub root: KuoLuNode,
}

impl KuoLuNode {
    pub fn to_json(&self) -> serde_json::Value {
        match self {
            KuoLuNode::Leaf(i) => serde_json::json!({ "leaf": i }),
            KuoLuNode::Bar { height, children } => serde_json::json!({
                "bar": height.to_string(),
                "children": children.iter().map(|c| c.to_json()).collect::<Vec<_>>(),
            }),
        }
    }
    fn heights_above(&self, floor: Option<&Rat>) -> bool {
        match self {
            KuoLuNode::Leaf(_) => true,
            KuoLuNode::Bar { height, children } => {
                floor.map_or(true, |f| height > f)
                    && children.iter().all(|c| c.heights_above(Some(height)))
            }
        }
    }
}

/// Certified order of the plain difference of two member parametrizations.
fn pair_contact(a: &PuiseuxSeries, b: &PuiseuxSeries) -> Result<Option<Rat>> {
    let d = a.lift(b.tower()).sub(b);
    match d.ord_certified()? {
        crate::arith::ExtRat::Fin(o) => Ok(Some(o)),
        crate::arith::ExtRat::Inf => Ok(None), // identical parametrizations
    }
}

fn build_node(
    idx: &[usize],
    contact: &dyn Fn(usize, usize) -> Rat,
) -> KuoLuNode {
    if idx.len() == 1 {
        return KuoLuNode::Leaf(idx[0]);
    }
    let mut h: Option<Rat> = None;
    for (a, &i) in idx.iter().enumerate() {
        for &j in &idx[a + 1..] {
            let c = contact(i, j);
            h = Some(match h {
                Some(x) if x <= c => x,
                _ => c,
            });
        }
    }
    let h = h.unwrap();
    // group indices whose mutual contacts all exceed the bar height
    let mut groups: Vec<Vec<usize>> = vec![];
    for &i in idx {
        match groups
            .iter_mut()
            .find(|g| contact(g[0], i) > h)
        {
            Some(g) => g.push(i),
            None => groups.push(vec![i]),
        }
    }
    let mut children: Vec<KuoLuNode> = groups
        .iter()
        .map(|g| build_node(g, contact))
        .collect();
    children.sort_by_key(|c| match c {
        KuoLuNode::Leaf(i) => (0, *i),
        KuoLuNode::Bar { children, .. } => (1, children.len()),
    });
    KuoLuNode::Bar { height: h, children }
}

/// The contact tree over every individual root of the bundle.
pub fn build_tree(bundle: &RootBundle) -> Result<KuoLuTree> {
    let mut tower = bundle.tower.clone();
    let members = bundle.all_members(&mut tower)?;
    let n = members.len();
    let mut mat = vec![vec![num::Zero::zero(); n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let c = pair_contact(&members[i].0, &members[j].0)?
                .ok_or_else(|| {
                    Error::TruncationTooLow(
                        "two roots are identical parametrizations".into(),
                    )
                })?;
            mat[i][j] = c.clone();
            mat[j][i] = c;
        }
    }
    let idx: Vec<usize> = (0..n).collect();
    let root = build_node(&idx, &|i, j| mat[i][j].clone());
    Ok(KuoLuTree { members, root })
}

impl KuoLuTree {
    pub fn ultrametric_holds(&self) -> bool {
        self.root.heights_above(None)
    }
}

/// Contacts of γ with every root of f counted with multiplicity, split at
/// δ_top = max contact: the multiset below δ_top and the predicted edges
/// (co-slope, horizontal length) of the relative polygon of f along γ.
pub struct TopologicalPart {
    pub delta_top: Rat,
    pub below: Vec<Rat>,
    /// (co-slope q, length #{c_i = q}), decreasing in q.
    pub predicted_edges: Vec<(Rat, u32)>,
}

pub fn topological_part(
    f: &BivarPoly,
    gamma: &PuiseuxSeries,
    trunc: &Rat,
) -> Result<TopologicalPart> {
    // Expand the roots of f over γ's coefficient field so every contact
    // below is computed inside one extension tower.
    let bundle = puiseux_roots(&f.lift(gamma.tower()), trunc)?;
    topological_part_from(&bundle, gamma)
}

/// Same as [`topological_part`], reusing an already-solved root bundle of f
/// whose tower extends γ's tower.
pub fn topological_part_from(
    bundle: &RootBundle,
    gamma: &PuiseuxSeries,
) -> Result<TopologicalPart> {
    let mut tower: Arc<Tower> = bundle.tower.clone();
    let members = bundle.all_members(&mut tower)?;
    let mut contacts: Vec<Rat> = vec![];
    for (zeta, mult) in &members {
        let c = pair_contact(&gamma.lift(&tower), zeta)?.ok_or(Error::SameArc)?;
        for _ in 0..*mult {
            contacts.push(c.clone());
        }
    }
    let delta_top = contacts
        .iter()
        .cloned()
        .max()
        .ok_or(Error::NoDots)?;
    let mut below: Vec<Rat> = contacts
        .iter()
        .filter(|c| **c < delta_top)
        .cloned()
        .collect();
    below.sort();
    let mut predicted_edges: Vec<(Rat, u32)> = vec![];
    for c in below.iter().rev() {
        match predicted_edges.last_mut() {
            Some((q, n)) if q == c => *n += 1,
            _ => predicted_edges.push((c.clone(), 1)),
        }
    }
    Ok(TopologicalPart { delta_top, below, predicted_edges })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{rat, rati, Coeff};
    use crate::poly::{parse_poly, relative};
    use crate::polygon::{edges_below, lower_hull, Dot};
    use std::collections::BTreeMap;

    fn pp(src: &str) -> BivarPoly {
        parse_poly(src, &BTreeMap::new()).unwrap()
    }

    #[test]
    fn two_leaf_tree() {
        let b = puiseux_roots(&pp("x^2 - y^2"), &rati(8)).unwrap();
        let t = build_tree(&b).unwrap();
        match &t.root {
            KuoLuNode::Bar { height, children } => {
                assert_eq!(height, &rati(1));
                assert_eq!(children.len(), 2);
            }
            _ => panic!("expected a bar"),
        }
        assert!(t.ultrametric_holds());
    }

    #[test]
    fn single_leaf_tree() {
        let b = puiseux_roots(&pp("x - y^2"), &rati(8)).unwrap();
        let t = build_tree(&b).unwrap();
        assert_eq!(t.root, KuoLuNode::Leaf(0));
    }

    #[test]
    fn first_example_highest_bar() {
        // roots of x^4+x^3y^3+y^12 all have contact 3 with gamma_0 = 0
        let f = pp("x^4 + x^3*y^3 + y^12");
        let tp = topological_part(
            &f,
            &PuiseuxSeries::zero(&Tower::rationals()),
            &rati(16),
        )
        .unwrap();
        assert_eq!(tp.delta_top, rati(3));
        assert!(tp.below.is_empty());
        assert!(tp.predicted_edges.is_empty());
        let b = puiseux_roots(&f, &rati(16)).unwrap();
        let t = build_tree(&b).unwrap();
        assert!(t.ultrametric_holds());
    }

    #[test]
    fn chain_contacts() {
        // f=(x-y)(x-y^2)(x-y^3), gamma near the y^3 branch: multiset {1,2}
        let f = pp("(x-y)*(x-y^2)*(x-y^3)");
        let t = Tower::rationals();
        let gamma = PuiseuxSeries::new(
            t.clone(),
            vec![
                (rati(3), Coeff::one(&t)),
                (rati(4), Coeff::from_rat(&t, rat(1, 2))),
            ],
            crate::arith::ExtRat::Inf,
        );
        let tp = topological_part(&f, &gamma, &rati(10)).unwrap();
        // contacts with y, y^2, y^3 are 1, 2, 4
        assert_eq!(tp.delta_top, rati(4));
        assert_eq!(tp.below, vec![rati(1), rati(2)]);
        assert_eq!(tp.predicted_edges, vec![(rati(2), 1), (rati(1), 1)]);
    }

    #[test]
    fn predicted_edges_match_hull() {
        let f = pp("(x-y)*(x-y^2)*(x-y^3)");
        let t = Tower::rationals();
        let gamma = PuiseuxSeries::monomial(Coeff::one(&t), rati(3)).add(
            &PuiseuxSeries::monomial(Coeff::one(&t), rati(5)),
        );
        let tp = topological_part(&f, &gamma, &rati(10)).unwrap();
        let rel = relative(&f, &gamma);
        let dots: Vec<Dot> = rel
            .dots()
            .into_iter()
            .map(|(m, q)| Dot::new(m, q))
            .collect();
        let np = lower_hull(&dots);
        let low = edges_below(&np, &tp.delta_top);
        let actual: Vec<(Rat, u32)> = low
            .iter()
            .map(|e| (e.co_slope.clone(), e.horizontal_length))
            .collect();
        assert_eq!(actual, tp.predicted_edges);
    }

    #[test]
    fn contact_stability_below_delta_top() {
        // replacing gamma by an arc agreeing below delta_top keeps the multiset
        let f = pp("(x-y)*(x-y^2)*(x-y^3)");
        let t = Tower::rationals();
        let g1 = PuiseuxSeries::monomial(Coeff::one(&t), rati(3)).add(
            &PuiseuxSeries::monomial(Coeff::one(&t), rati(5)),
        );
        let tp1 = topological_part(&f, &g1, &rati(10)).unwrap();
        for c in [rat(11, 2), rat(13, 2), rat(6, 1)] {
            let g2 = g1.add(&PuiseuxSeries::monomial(
                Coeff::from_rat(&t, rati(2)),
                c,
            ));
            let tp2 = topological_part(&f, &g2, &rati(10)).unwrap();
            assert_eq!(tp1.below, tp2.below);
        }
    }
}
