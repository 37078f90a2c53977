//! Newton-Puiseux: all fractional-power-series roots in x of a bivariate
//! polynomial, with conjugacy classes, multiplicities, and automatic field
//! extensions, certified to a requested truncation order.

use crate::arith::{
    adjoin_root, rational_roots_dense, Coeff, ExtRat, Rat, Tower,
};
use crate::error::{Error, Result};
use crate::poly::{yun_x, BivarPoly, UPoly, XPoly};
use crate::polygon::{lower_hull, Dot, Edge};
use crate::series::PuiseuxSeries;
use num::Zero;
use std::sync::Arc;

/// One conjugacy class of Puiseux roots: the representative plus its
/// `size` = Puiseux-multiplicity conjugates, all roots of the input.
#[derive(Debug, Clone)]
pub struct ArcClass {
    pub rep: PuiseuxSeries,
    pub size: u64,
    /// Terminating series (true) vs certified only below the truncation.
    pub exact: bool,
}

#[derive(Debug, Clone)]
pub struct RootBundle {
    /// (class, multiplicity of each member as a root of the input).
    pub classes: Vec<(ArcClass, u32)>,
    pub tower: Arc<Tower>,
    pub trunc: Rat,
}

impl RootBundle {
    /// Sum of multiplicity x conjugacy size: the number of positive-order
    /// roots of the input counted with multiplicity.
    pub fn arc_count(&self) -> u64 {
        self.classes
            .iter()
            .map(|(c, m)| c.size * *m as u64)
            .sum()
    }
    /// Every individual root (all conjugates of all classes), flattened.
    pub fn all_members(&self, tower: &mut Arc<Tower>) -> Result<Vec<(PuiseuxSeries, u32)>> {
        let mut out = vec![];
        for (c, m) in &self.classes {
            for r in c.rep.conjugates(tower)? {
                out.push((r, *m));
            }
        }
        Ok(out)
    }
}

/// P restricted to an edge of the hull of its support: P_e(Z) with the
/// coefficient of Z^(m - m_left) read at each on-edge dot.
pub fn face_polynomial(p: &XPoly, edge: &Edge) -> Result<UPoly> {
    let tower = p.tower().clone();
    let mut c = vec![Coeff::zero(&tower); edge.horizontal_length as usize + 1];
    for d in &edge.on_edge {
        c[(d.m - edge.left.m) as usize] = p.coeff(d.m as usize).coeff_at(&d.q)?;
    }
    Ok(UPoly::new(tower, c))
}

fn yun_u(p: &UPoly) -> Vec<(UPoly, u32)> {
    let dp = p.derivative();
    if dp.is_zero() {
        return vec![];
    }
    let a0 = p.gcd(&dp);
    if a0.deg() == Some(0) {
        return if p.deg().map_or(false, |d| d > 0) {
            vec![(p.clone(), 1)]
        } else {
            vec![]
        };
    }
    let mut out = vec![];
    let mut b = p.div_rem(&a0).unwrap().0;
    let mut c = dp.div_rem(&a0).unwrap().0;
    let mut i = 1u32;
    loop {
        let d = c.sub(&b.derivative());
        if b.deg() == Some(0) || b.deg().is_none() {
            break;
        }
        let s = b.gcd(&d);
        if s.deg().map_or(false, |ds| ds > 0) {
            out.push((s.clone(), i));
        }
        b = b.div_rem(&s).unwrap().0;
        c = d.div_rem(&s).unwrap().0;
        i += 1;
    }
    out
}

/// All roots of a univariate polynomial over the tower, with multiplicity,
/// adjoining extensions as needed.
pub fn all_roots(tower: &mut Arc<Tower>, p: &UPoly) -> Result<Vec<(Coeff, u32)>> {
    let mut out = vec![];
    for (s, k) in yun_u(&p.lift(tower)) {
        let mut cur = s.lift(tower);
        // non-rational roots already adjoined for this squarefree factor;
        // later roots are first sought among their root-of-unity multiples
        // so that conjugate roots share one tower representation
        let mut adjoined: Vec<Coeff> = vec![];
        'deflate: while let Some(d) = cur.deg() {
            if d == 0 {
                break;
            }
            if d == 1 {
                let r = cur.coeffs()[0].neg().div(&cur.coeffs()[1])?;
                out.push((r, k));
                break;
            }
            if let Some(rc) = cur
                .coeffs()
                .iter()
                .map(|c| c.as_rat())
                .collect::<Option<Vec<Rat>>>()
            {
                let roots = rational_roots_dense(&rc);
                if !roots.is_empty() {
                    for r in roots {
                        let rc = Coeff::from_rat(tower, r);
                        let lin = UPoly::new(
                            tower.clone(),
                            vec![rc.neg(), Coeff::one(tower)],
                        );
                        let (q, rem) = cur.div_rem(&lin).unwrap();
                        assert!(rem.is_zero());
                        cur = q;
                        if !rc.is_zero() {
                            adjoined.push(rc.clone());
                        }
                        out.push((rc, k));
                    }
                    continue 'deflate;
                }
            }
            if let Some((t2, g)) = unity_multiple_root(tower, &cur, &adjoined) {
                *tower = t2;
                adjoined.push(g.clone());
                out.push((g.clone(), k));
                let lin =
                    UPoly::new(tower.clone(), vec![g.neg(), Coeff::one(tower)]);
                let (q, rem) = cur.lift(tower).div_rem(&lin).unwrap();
                assert!(rem.is_zero());
                cur = q;
                continue 'deflate;
            }
            let (t2, g) = adjoin_root(tower, cur.coeffs())?;
            *tower = t2;
            adjoined.push(g.clone());
            out.push((g.clone(), k));
            let lin = UPoly::new(tower.clone(), vec![g.neg(), Coeff::one(tower)]);
            let (q, rem) = cur.lift(tower).div_rem(&lin).unwrap();
            assert!(rem.is_zero());
            cur = q;
        }
    }
    Ok(out
        .into_iter()
        .map(|(c, k)| (c.lift(tower), k))
        .collect())
}

/// Look for a root of `cur` of the form g·ε^j, g an already-adjoined root
/// of the same factor and ε a root of unity of small order. Exact: every
/// candidate is verified by evaluation; the tower is only extended when a
/// candidate succeeds. Keeps conjugate roots in one representation.
fn unity_multiple_root(
    tower: &Arc<Tower>,
    cur: &UPoly,
    adjoined: &[Coeff],
) -> Option<(Arc<Tower>, Coeff)> {
    for g in adjoined {
        for m in 2..=6u64 {
            let (t2, eps) = match crate::arith::root_of_unity(tower, m) {
                Ok(v) => v,
                Err(_) => continue,
            };
            let mut cand = g.lift(&t2);
            for _ in 1..m {
                cand = cand.mul(&eps);
                if cur.lift(&t2).eval(&cand).is_zero() {
                    return Some((t2, cand));
                }
            }
        }
    }
    None
}

/// Roots of squarefree `p` with order strictly greater than `mu_prev`.
fn expand_branch(
    tower: &mut Arc<Tower>,
    p: &XPoly,
    mu_prev: &Rat,
    trunc: &Rat,
) -> Result<Vec<PuiseuxSeries>> {
    let p = p.lift(tower);
    let mut out = vec![];
    let c0 = p.coeff(0);
    if c0.is_exactly_zero() {
        out.push(PuiseuxSeries::zero(tower));
    } else if c0.terms().is_empty() {
        return Err(Error::TruncationTooLow(
            "constant coefficient order uncertified".into(),
        ));
    }
    let dots: Vec<Dot> = p
        .dots()
        .into_iter()
        .map(|(m, q)| Dot::new(m, q))
        .collect();
    if dots.is_empty() {
        return Ok(out);
    }
    let np = lower_hull(&dots);
    for e in np.edges.iter().filter(|e| &e.co_slope > mu_prev) {
        let mu = e.co_slope.clone();
        if &mu >= trunc {
            if e.horizontal_length == 1 {
                // one root continues here; its next term lies beyond trunc
                out.push(PuiseuxSeries::new(
                    tower.clone(),
                    vec![],
                    ExtRat::Fin(trunc.clone()),
                ));
                continue;
            }
            return Err(Error::TruncationTooLow(format!(
                "{} roots unseparated at order {mu} >= truncation {trunc}",
                e.horizontal_length
            )));
        }
        let fp = face_polynomial(&p, e)?;
        let roots = all_roots(tower, &fp)?;
        let mut count = 0u32;
        for (c, k) in roots {
            if c.is_zero() {
                continue;
            }
            let prefix = PuiseuxSeries::monomial(c.lift(tower), mu.clone());
            let q = p.lift(tower).compose_shift(&prefix);
            let tails = expand_branch(tower, &q, &mu, trunc)?;
            if tails.len() != k as usize {
                return Err(Error::TruncationTooLow(format!(
                    "branch at order {mu} yielded {} of {k} roots",
                    tails.len()
                )));
            }
            for tail in tails {
                out.push(prefix.lift(tower).add(&tail.lift(tower)));
            }
            count += k;
        }
        assert_eq!(
            count, e.horizontal_length,
            "face polynomial roots must fill the edge"
        );
    }
    Ok(out)
}

/// All positive-order Puiseux roots of f in x, grouped into conjugacy
/// classes, with multiplicities from the squarefree decomposition.
pub fn puiseux_roots(f: &BivarPoly, trunc: &Rat) -> Result<RootBundle> {
    let mut tower = f.tower().clone();
    let mut flat: Vec<(PuiseuxSeries, u32)> = vec![];
    for (s, mult) in yun_x(f) {
        let roots = expand_branch(
            &mut tower,
            &XPoly::from_bivar(&s),
            &Rat::zero(),
            trunc,
        )?;
        for r in roots {
            flat.push((r, mult));
        }
    }
    let classes = group_classes(&mut tower, flat)?;
    Ok(RootBundle { classes, tower, trunc: trunc.clone() })
}

/// Equal as far as both are certified: no surviving difference term.
fn same_up_to_trunc(a: &PuiseuxSeries, b: &PuiseuxSeries) -> bool {
    a.lift(b.tower()).sub(b).ord() == ExtRat::Inf
}

fn group_classes(
    tower: &mut Arc<Tower>,
    mut roots: Vec<(PuiseuxSeries, u32)>,
) -> Result<Vec<(ArcClass, u32)>> {
    let mut out = vec![];
    while let Some((rep, mult)) = roots.pop() {
        let conjs = rep.conjugates(tower)?;
        let mut size = 1u64;
        roots.retain(|(r, m)| {
            let hit = *m == mult
                && conjs
                    .iter()
                    .skip(1)
                    .any(|c| same_up_to_trunc(&r.lift(tower), c));
            if hit {
                size += 1;
            }
            !hit
        });
        if size != rep.puiseux_denominator() {
            // a conjugate is represented in an incompatible extension and
            // the identification was missed: refuse rather than mis-group
            return Err(Error::TowerDefect(tower.levels.len()));
        }
        let exact = rep.is_exact();
        out.push((
            ArcClass { rep: rep.lift(tower), size, exact },
            mult,
        ));
    }
    out.reverse();
    Ok(out)
}

/// Extend a certified root prefix to `target`: re-solves at the higher
/// truncation and selects the unique root matching the prefix.
pub fn expand_along(
    f: &BivarPoly,
    prefix: &PuiseuxSeries,
    target: &Rat,
) -> Result<PuiseuxSeries> {
    let bundle = puiseux_roots(f, target)?;
    let mut tower = bundle.tower.clone();
    let known = match prefix.terms().last() {
        Some((e, _)) => ExtRat::Fin(e.clone()),
        None => ExtRat::Fin(Rat::zero()),
    };
    let mut matches = vec![];
    for (r, _) in bundle.all_members(&mut tower)? {
        let d = r.lift(&tower).sub(&prefix.lift(&tower));
        if d.ord() > known {
            matches.push(r);
        }
    }
    match matches.len() {
        1 => Ok(matches.pop().unwrap()),
        0 => Err(Error::TruncationTooLow(
            "prefix matches no root of the input".into(),
        )),
        _ => Err(Error::TruncationTooLow(
            "prefix does not separate the roots".into(),
        )),
    }
}
