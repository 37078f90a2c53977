//! Polar arcs, gradient degrees, gradient canyons, clusters and
//! sub-clusters, and polar multiplicities.

use crate::arith::{rati, Coeff, ExtRat, Rat, Tower};
use crate::error::{Error, Result};
use crate::poly::{polar_parts, relative, BivarPoly, XPoly};
use crate::polygon::{augment, lower_hull, AugmentedPolygon, Dot, NewtonPolygon};
use crate::series::{contact_order, PuiseuxSeries};
use crate::solver::{puiseux_roots, ArcClass};
use num::One;
use std::sync::Arc;

/// A conjugacy class of polar arcs (roots of f_x, not of f) with its
/// invariant data along f.
#[derive(Debug, Clone)]
pub struct PolarArc {
    pub arc: ArcClass,
    /// Multiplicity as a root of f_x.
    pub mult: u32,
    /// ord f(γ(y), y).
    pub h: Rat,
    /// Leading coefficient of f(γ(y), y).
    pub a: Coeff,
    /// Gradient degree.
    pub d: Rat,
    /// Coefficient of y^1 (zero when ord γ > 1).
    pub tangent: Coeff,
    /// Co-slope of the top edge of the polygon of f along γ.
    pub delta_top: Rat,
    /// Certified support of f_x along γ (no m=0 dots: f_x(γ) = 0).
    pub fx_dots: Vec<Dot>,
    /// Certified support of f along γ.
    pub f_dots: Vec<Dot>,
}

#[derive(Debug, Clone)]
pub struct Canyon {
    /// Indices into the polar list.
    pub members: Vec<usize>,
    pub d: Rat,
    pub h: Rat,
    pub a: Coeff,
    pub tangent: Coeff,
    /// Invariance only holds for degree > 1; degree-1 canyons are reported
    /// but excluded from clusters and invariance claims.
    pub degree_one: bool,
    pub delta_top: Rat,
    pub polygon: AugmentedPolygon,
    /// Polar multiplicity: members counted through the root indexing.
    pub mu: u64,
}

#[derive(Debug, Clone)]
pub struct Cluster {
    pub tangent: Coeff,
    pub d: Rat,
    pub h: Rat,
    /// Indices into the canyon list.
    pub canyons: Vec<usize>,
    /// Pairwise contacts k(i, j) between member canyons.
    pub contacts: Vec<(usize, usize, Rat)>,
    /// Partition of `canyons` by equality of contact multisets K.
    pub subclusters: Vec<Vec<usize>>,
}

#[derive(Debug, Clone)]
pub struct CanyonAnalysis {
    pub tower: Arc<Tower>,
    pub polars: Vec<PolarArc>,
    pub canyons: Vec<Canyon>,
    pub clusters: Vec<Cluster>,
    pub trunc: Rat,
}

/// Support dots of an X-polynomial for X-degrees >= m_min, certified
/// complete for q <= q_bound: errors when a coefficient's truncation could
/// hide a dot at or below the bound.
fn certified_dots(p: &XPoly, m_min: usize, q_bound: &Rat) -> Result<Vec<Dot>> {
    let mut out = vec![];
    for (m, s) in p.coeffs().iter().enumerate() {
        if m < m_min {
            continue;
        }
        if let ExtRat::Fin(t) = s.trunc() {
            if t <= q_bound {
                return Err(Error::TruncationTooLow(format!(
                    "support of X^{m} certified only below y^{t}, need beyond y^{q_bound}"
                )));
            }
        }
        for (e, _) in s.terms() {
            out.push(Dot::new(m as u32, e.clone()));
        }
    }
    Ok(out)
}

/// d(γ) = max over certified dots (m, q), m >= 1, of supp(f_x along γ)
/// of (h-1-q)/m: the co-slope of the supporting line through (1, h-1).
pub fn gradient_degree(f: &BivarPoly, gamma: &PuiseuxSeries) -> Result<Rat> {
    let rel = relative(f, gamma);
    let h = rel.coeff(0).ord_certified()?;
    let h = match h {
        ExtRat::Fin(h) => h,
        ExtRat::Inf => return Err(Error::NoDots), // γ is a root of f
    };
    let fx = rel.derivative_x();
    let hm1 = &h - rati(1);
    let dots = certified_dots(&fx, 1, &hm1)?;
    dots.iter()
        .map(|d| (&hm1 - &d.q) / rati(d.m as i64))
        .max()
        .ok_or(Error::NoDots)
}

fn polar_data(f: &BivarPoly, arc: ArcClass, mult: u32) -> Result<PolarArc> {
    let rel = relative(f, &arc.rep);
    let c0 = rel.coeff(0);
    let h = match c0.ord_certified()? {
        ExtRat::Fin(h) => h,
        ExtRat::Inf => {
            return Err(Error::InconsistentCanyon(
                "polar candidate is a root of f".into(),
            ))
        }
    };
    let a = c0.leading().unwrap().1.clone();
    let tangent = arc
        .rep
        .coeff_at(&rati(1))
        .unwrap_or_else(|_| Coeff::zero(arc.rep.tower()));
    let f_dots = certified_dots(&rel, 0, &h)?;
    let hm1 = &h - rati(1);
    let fx_dots = certified_dots(&rel.derivative_x(), 1, &hm1)?;
    let d = fx_dots
        .iter()
        .map(|dd| (&hm1 - &dd.q) / rati(dd.m as i64))
        .max()
        .ok_or(Error::NoDots)?;
    let np_f = lower_hull(&f_dots);
    let (delta_top, _, _) = crate::polygon::top_edge_data(&np_f, &h)?;
    Ok(PolarArc {
        arc,
        mult,
        h,
        a,
        d,
        tangent,
        delta_top,
        fx_dots,
        f_dots,
    })
}

/// The augmented polygon of f_x along γ: Conv(supp ∪ {(0, h-1)}).
pub fn augmented_polygon(p: &PolarArc) -> AugmentedPolygon {
    augment(&lower_hull(&p.fx_dots), &p.h)
}

/// The relative polygon of f along γ.
pub fn relative_polygon(p: &PolarArc) -> NewtonPolygon {
    lower_hull(&p.f_dots)
}

/// μ(C): the number of polar parametrizations, counted with multiplicity,
/// whose plain order of difference from the canyon representative is >= d.
/// Conjugate parametrizations of one class can land in distinct conjugate
/// canyons (mutual order < d); the count is the same against any
/// representative, so one is fixed.
pub fn polar_multiplicity(
    c: &Canyon,
    polars: &[PolarArc],
    tower: &mut Arc<Tower>,
) -> Result<u64> {
    let rep = polars[c.members[0]].arc.rep.lift(tower);
    let mut mu = 0u64;
    for &i in &c.members {
        let p = &polars[i];
        for conj in p.arc.rep.conjugates(tower)? {
            let diff = conj.lift(tower).sub(&rep.lift(tower));
            let inside = match diff.ord() {
                ExtRat::Fin(o) => o >= c.d,
                ExtRat::Inf => match diff.trunc() {
                    ExtRat::Inf => true,
                    ExtRat::Fin(t) if t >= &c.d => true,
                    ExtRat::Fin(t) => {
                        return Err(Error::TruncationTooLow(format!(
                            "polar difference certified zero only below y^{t}, need y^{}",
                            c.d
                        )))
                    }
                },
            };
            if inside {
                mu += p.mult as u64;
            }
        }
    }
    Ok(mu)
}

/// Compute all polar arcs of f and partition them into gradient canyons.
pub fn build_canyons(f: &BivarPoly, trunc: &Rat) -> Result<CanyonAnalysis> {
    f.mini_regular_order()?;
    let mut tower = f.tower().clone();
    let mut polars: Vec<PolarArc> = vec![];
    for (s, mult) in polar_parts(f) {
        let bundle = puiseux_roots(&s, trunc)?;
        tower = crate::arith::unify_towers(&tower, &bundle.tower)?;
        for (arc, inner_mult) in bundle.classes {
            debug_assert_eq!(inner_mult, 1); // polar parts are squarefree
            polars.push(polar_data(&f.lift(&tower), arc, mult)?);
        }
    }

    // pairwise class contacts
    let n = polars.len();
    let mut contact = vec![vec![None::<Rat>; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let c = contact_order(
                &polars[i].arc.rep.lift(&tower),
                &polars[j].arc.rep.lift(&tower),
                &mut tower,
            )?;
            contact[i][j] = Some(c.clone());
            contact[j][i] = Some(c);
        }
    }

    // same canyon iff contact >= gradient degree
    let mut assigned = vec![usize::MAX; n];
    let mut canyons: Vec<Canyon> = vec![];
    for i in 0..n {
        if assigned[i] != usize::MAX {
            continue;
        }
        let mut members = vec![i];
        assigned[i] = canyons.len();
        for j in i + 1..n {
            if assigned[j] == usize::MAX
                && contact[i][j].as_ref().unwrap() >= &polars[i].d
            {
                members.push(j);
                assigned[j] = canyons.len();
            }
        }
        let p0 = &polars[i];
        for &j in &members[1..] {
            let pj = &polars[j];
            if pj.d != p0.d || pj.h != p0.h || !pj.a.lift(&tower).eq(&p0.a.lift(&tower)) {
                return Err(Error::InconsistentCanyon(format!(
                    "members disagree: (d,h) = ({},{}) vs ({},{})",
                    p0.d, p0.h, pj.d, pj.h
                )));
            }
        }
        let polygon = augmented_polygon(p0);
        let mut canyon = Canyon {
            members,
            d: p0.d.clone(),
            h: p0.h.clone(),
            a: p0.a.clone(),
            tangent: p0.tangent.clone(),
            degree_one: p0.d == rati(1),
            delta_top: p0.delta_top.clone(),
            polygon,
            mu: 0,
        };
        canyon.mu = polar_multiplicity(&canyon, &polars, &mut tower)?;
        canyons.push(canyon);
    }

    let clusters = build_clusters(&canyons, &polars, &contact, &tower)?;
    Ok(CanyonAnalysis {
        tower,
        polars,
        canyons,
        clusters,
        trunc: trunc.clone(),
    })
}

fn build_clusters(
    canyons: &[Canyon],
    _polars: &[PolarArc],
    contact: &[Vec<Option<Rat>>],
    tower: &Arc<Tower>,
) -> Result<Vec<Cluster>> {
    let mut clusters: Vec<Cluster> = vec![];
    for (ci, c) in canyons.iter().enumerate() {
        if c.degree_one {
            continue;
        }
        let found = clusters.iter_mut().find(|cl| {
            cl.d == c.d
                && cl.h == c.h
                && cl.tangent.lift(tower).eq(&c.tangent.lift(tower))
        });
        match found {
            Some(cl) => cl.canyons.push(ci),
            None => clusters.push(Cluster {
                tangent: c.tangent.clone(),
                d: c.d.clone(),
                h: c.h.clone(),
                canyons: vec![ci],
                contacts: vec![],
                subclusters: vec![],
            }),
        }
    }
    for cl in &mut clusters {
        for (ai, &i) in cl.canyons.iter().enumerate() {
            for &j in &cl.canyons[ai + 1..] {
                let k = contact[canyons[i].members[0]][canyons[j].members[0]]
                    .clone()
                    .unwrap();
                // distinct same-degree canyons meet below their degree
                if k >= canyons[i].d {
                    return Err(Error::InconsistentCanyon(format!(
                        "canyon contact {k} >= degree {}",
                        canyons[i].d
                    )));
                }
                cl.contacts.push((i, j, k));
            }
        }
        // sub-clusters: group by the multiset of contacts to the others
        let key = |i: usize| -> Vec<Rat> {
            let mut v: Vec<Rat> = cl
                .contacts
                .iter()
                .filter(|(a, b, _)| *a == i || *b == i)
                .map(|(_, _, k)| k.clone())
                .collect();
            v.sort();
            v
        };
        let mut subs: Vec<(Vec<Rat>, Vec<usize>)> = vec![];
        for &i in &cl.canyons {
            let k = key(i);
            match subs.iter_mut().find(|(kk, _)| kk == &k) {
                Some((_, v)) => v.push(i),
                None => subs.push((k, vec![i])),
            }
        }
        cl.subclusters = subs.into_iter().map(|(_, v)| v).collect();
    }
    Ok(clusters)
}

/// Canyon contact: the arc contact between representatives of two canyons.
pub fn canyon_contact(
    a: &Canyon,
    b: &Canyon,
    polars: &[PolarArc],
    tower: &mut Arc<Tower>,
) -> Result<Rat> {
    contact_order(
        &polars[a.members[0]].arc.rep.lift(tower),
        &polars[b.members[0]].arc.rep.lift(tower),
        tower,
    )
}

impl CanyonAnalysis {
    pub fn degrees(&self) -> Vec<Rat> {
        let mut v: Vec<Rat> = self.canyons.iter().map(|c| c.d.clone()).collect();
        v.sort();
        v
    }
}

/// Convenience: is the gradient degree the trivial one (ord-1 direction)?
pub fn is_unit_degree(d: &Rat) -> bool {
    d == &Rat::one()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;
    use crate::poly::parse_poly;
    use std::collections::BTreeMap;

    fn pp(src: &str) -> BivarPoly {
        parse_poly(src, &BTreeMap::new()).unwrap()
    }
    fn ppt(src: &str, t: Rat) -> BivarPoly {
        parse_poly(src, &BTreeMap::from([("t".to_string(), t)])).unwrap()
    }
    const EX1: &str = "x^4 + x^3*y^3 + y^12 + t*x^2*y^7";
    const EX2: &str = "x^4 + y^12 + t*x^3*y^3 + (1-t)*x^2*y^7";

    #[test]
    fn gradient_degree_examples() {
        let t = Tower::rationals();
        let f = ppt(EX1, rat(1, 2));
        // γ0 = 0: dots (3,0),(2,3),(1,7), h = 12 -> max(11/3, 4, 4) = 4
        let g0 = PuiseuxSeries::zero(&t);
        assert_eq!(gradient_degree(&f, &g0).unwrap(), rati(4));
        // x^2+y^3, γ=0: dot (1,0), h=3 -> 2
        assert_eq!(
            gradient_degree(&pp("x^2 + y^3"), &g0).unwrap(),
            rati(2)
        );
    }

    #[test]
    fn canyons_of_first_example() {
        for tval in [rat(1, 2), rat(1, 3)] {
            let f = ppt(EX1, tval);
            let an = build_canyons(&f, &rati(16)).unwrap();
            assert_eq!(an.polars.len(), 3);
            assert_eq!(an.canyons.len(), 2);
            assert_eq!(an.degrees(), vec![rati(4), rati(5)]);
            let c4 = an.canyons.iter().find(|c| c.d == rati(4)).unwrap();
            let c5 = an.canyons.iter().find(|c| c.d == rati(5)).unwrap();
            assert_eq!(c4.members.len(), 2); // γ0 and γ+
            assert_eq!(c5.members.len(), 1); // γ-
            assert_eq!(c4.h, rati(12));
            assert_eq!(c5.h, rati(12));
            assert_eq!(c4.mu, 2);
            assert_eq!(c5.mu, 1);
            // expected augmented polygon vertices
            let v4: Vec<(u32, Rat)> = c4
                .polygon
                .hull
                .vertices
                .iter()
                .map(|d| (d.m, d.q.clone()))
                .collect();
            assert_eq!(v4, vec![(0, rati(11)), (2, rati(3)), (3, rati(0))]);
            let v5: Vec<(u32, Rat)> = c5
                .polygon
                .hull
                .vertices
                .iter()
                .map(|d| (d.m, d.q.clone()))
                .collect();
            assert_eq!(v5, vec![(0, rati(11)), (1, rati(6)), (3, rati(0))]);
            // horizontal length of E_con equals μ
            assert_eq!(c4.polygon.e_con().unwrap().horizontal_length, 2);
            assert_eq!(c5.polygon.e_con().unwrap().horizontal_length, 1);
            // mutual contact is δ = 3
            let mut tower = an.tower.clone();
            let k = canyon_contact(c4, c5, &an.polars, &mut tower).unwrap();
            assert_eq!(k, rati(3));
        }
    }

    #[test]
    fn canyons_of_second_example_special_value() {
        let f = ppt(EX2, rati(0));
        let an = build_canyons(&f, &rati(16)).unwrap();
        assert_eq!(an.canyons.len(), 2);
        // both canyons share Conv{(0,11),(1,7),(3,0)}
        for c in &an.canyons {
            let v: Vec<(u32, Rat)> = c
                .polygon
                .hull
                .vertices
                .iter()
                .map(|d| (d.m, d.q.clone()))
                .collect();
            assert_eq!(v, vec![(0, rati(11)), (1, rati(7)), (3, rati(0))]);
        }
        // on-support dot (2, 7/2) for the ±ξ canyon
        let cxi = an
            .canyons
            .iter()
            .find(|c| an.polars[c.members[0]].arc.size == 2)
            .unwrap();
        assert!(an.polars[cxi.members[0]]
            .fx_dots
            .contains(&Dot::new(2, rat(7, 2))));
        // the two conjugate parametrizations ±ξ y^{7/2} have mutual order
        // 7/2 < d = 4, so each conjugate canyon holds exactly one of them
        assert_eq!(cxi.mu, 1);
    }

    #[test]
    fn second_example_generic_value() {
        let f = ppt(EX2, rat(1, 2));
        let an = build_canyons(&f, &rati(16)).unwrap();
        assert_eq!(an.degrees(), vec![rati(4), rati(5)]);
        let c4 = an.canyons.iter().find(|c| c.d == rati(4)).unwrap();
        let v4: Vec<(u32, Rat)> = c4
            .polygon
            .hull
            .vertices
            .iter()
            .map(|d| (d.m, d.q.clone()))
            .collect();
        assert_eq!(v4, vec![(0, rati(11)), (2, rati(3)), (3, rati(0))]);
        // (1,7) lies on E_con
        assert!(c4
            .polygon
            .e_con()
            .unwrap()
            .on_edge
            .contains(&Dot::new(1, rati(7))));
    }

    #[test]
    fn cusp_single_canyon() {
        let an = build_canyons(&pp("x^2 + y^3"), &rati(8)).unwrap();
        assert_eq!(an.canyons.len(), 1);
        let c = &an.canyons[0];
        assert_eq!(c.members.len(), 1);
        assert_eq!(c.h, rati(3));
        assert_eq!(c.d, rati(2));
        assert_eq!(c.mu, 1);
        let v: Vec<(u32, Rat)> = c
            .polygon
            .hull
            .vertices
            .iter()
            .map(|d| (d.m, d.q.clone()))
            .collect();
        assert_eq!(v, vec![(0, rati(2)), (1, rati(0))]);
    }

    #[test]
    fn clusters_of_first_example() {
        let an = build_canyons(&ppt(EX1, rat(1, 2)), &rati(16)).unwrap();
        // degrees 4 and 5 fall in different clusters
        assert_eq!(an.clusters.len(), 2);
        for cl in &an.clusters {
            assert_eq!(cl.canyons.len(), 1);
            assert!(cl.contacts.is_empty());
            assert_eq!(cl.subclusters.len(), 1);
        }
    }
}
