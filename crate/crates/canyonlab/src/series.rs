//! Truncated Puiseux series in y: the carrier for arcs, roots and expansions.
//!
//! A series stores exact terms strictly below its truncation bound; the bound
//! `ExtRat::Inf` marks a terminating (exact) series. Order comparisons are
//! certified against the truncation: an uncertified answer is an error, never
//! a guess.

use crate::arith::{rati, root_of_unity, unify_towers, Coeff, ExtRat, Rat, Tower};
use crate::error::{Error, Result};
use num::{One, Signed, Zero};
use std::sync::Arc;

#[derive(Debug, Clone, PartialEq)]
pub struct PuiseuxSeries {
    tower: Arc<Tower>,
    /// (exponent, coefficient); exponents strictly increasing, all < trunc,
    /// coefficients nonzero.
    terms: Vec<(Rat, Coeff)>,
    trunc: ExtRat,
}

impl PuiseuxSeries {
    pub fn new(tower: Arc<Tower>, mut terms: Vec<(Rat, Coeff)>, trunc: ExtRat) -> PuiseuxSeries {
        terms.retain(|(_, c)| !c.is_zero());
        terms.sort_by(|a, b| a.0.cmp(&b.0));
        if let ExtRat::Fin(t) = &trunc {
            terms.retain(|(e, _)| e < t);
        }
        let tower = terms
            .iter()
            .fold(tower, |t, (_, c)| unify_towers(&t, c.tower()).unwrap());
        let terms = terms
            .into_iter()
            .map(|(e, c)| {
                let c = c.lift(&tower);
                (e, c)
            })
            .collect();
        PuiseuxSeries { tower, terms, trunc }
    }

    pub fn zero(tower: &Arc<Tower>) -> PuiseuxSeries {
        PuiseuxSeries::new(tower.clone(), vec![], ExtRat::Inf)
    }

    pub fn monomial(c: Coeff, e: Rat) -> PuiseuxSeries {
        let tower = c.tower().clone();
        PuiseuxSeries::new(tower, vec![(e, c)], ExtRat::Inf)
    }

    pub fn constant(c: Coeff) -> PuiseuxSeries {
        PuiseuxSeries::monomial(c, Rat::zero())
    }

    pub fn tower(&self) -> &Arc<Tower> {
        &self.tower
    }
    pub fn terms(&self) -> &[(Rat, Coeff)] {
        &self.terms
    }
    pub fn trunc(&self) -> &ExtRat {
        &self.trunc
    }
    pub fn is_exact(&self) -> bool {
        self.trunc.is_inf()
    }
    /// Identically zero (not merely zero up to truncation).
    pub fn is_exactly_zero(&self) -> bool {
        self.terms.is_empty() && self.trunc.is_inf()
    }

    /// Order of the series; `Inf` when no terms are stored. For a truncated
    /// series `Inf` only means "zero below the truncation".
    pub fn ord(&self) -> ExtRat {
        match self.terms.first() {
            Some((e, _)) => ExtRat::Fin(e.clone()),
            None => ExtRat::Inf,
        }
    }

    /// Order as a certified rational: errors when the series has no stored
    /// terms but a finite truncation.
    pub fn ord_certified(&self) -> Result<ExtRat> {
        match (self.terms.first(), &self.trunc) {
            (Some((e, _)), _) => Ok(ExtRat::Fin(e.clone())),
            (None, ExtRat::Inf) => Ok(ExtRat::Inf),
            (None, ExtRat::Fin(t)) => Err(Error::TruncationTooLow(format!(
                "order not certified below truncation {t}"
            ))),
        }
    }

    pub fn leading(&self) -> Option<(&Rat, &Coeff)> {
        self.terms.first().map(|(e, c)| (e, c))
    }

    /// Coefficient at exponent `e`; errors if `e` is at or beyond truncation.
    pub fn coeff_at(&self, e: &Rat) -> Result<Coeff> {
        if let ExtRat::Fin(t) = &self.trunc {
            if e >= t {
                return Err(Error::TruncationTooLow(format!(
                    "coefficient at y^{e} lies beyond truncation {t}"
                )));
            }
        }
        Ok(self
            .terms
            .iter()
            .find(|(x, _)| x == e)
            .map(|(_, c)| c.clone())
            .unwrap_or_else(|| Coeff::zero(&self.tower)))
    }

    pub fn lift(&self, tower: &Arc<Tower>) -> PuiseuxSeries {
        PuiseuxSeries::new(tower.clone(), self.terms.clone(), self.trunc.clone())
    }

    pub fn truncate_to(&self, t: ExtRat) -> PuiseuxSeries {
        PuiseuxSeries::new(
            self.tower.clone(),
            self.terms.clone(),
            ExtRat::min(self.trunc.clone(), t),
        )
    }

    pub fn add(&self, other: &PuiseuxSeries) -> PuiseuxSeries {
        let tower = unify_towers(&self.tower, &other.tower).unwrap();
        let mut terms: Vec<(Rat, Coeff)> = vec![];
        let mut i = 0;
        let mut j = 0;
        while i < self.terms.len() || j < other.terms.len() {
            let pick_a = match (self.terms.get(i), other.terms.get(j)) {
                (Some(a), Some(b)) => a.0 <= b.0,
                (Some(_), None) => true,
                _ => false,
            };
            if pick_a {
                if j < other.terms.len() && other.terms[j].0 == self.terms[i].0 {
                    let c = self.terms[i].1.add(&other.terms[j].1);
                    terms.push((self.terms[i].0.clone(), c));
                    i += 1;
                    j += 1;
                } else {
                    terms.push(self.terms[i].clone());
                    i += 1;
                }
            } else {
                terms.push(other.terms[j].clone());
                j += 1;
            }
        }
        let trunc = ExtRat::min(self.trunc.clone(), other.trunc.clone());
        PuiseuxSeries::new(tower, terms, trunc)
    }

    pub fn neg(&self) -> PuiseuxSeries {
        PuiseuxSeries::new(
            self.tower.clone(),
            self.terms.iter().map(|(e, c)| (e.clone(), c.neg())).collect(),
            self.trunc.clone(),
        )
    }

    pub fn sub(&self, other: &PuiseuxSeries) -> PuiseuxSeries {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &PuiseuxSeries) -> PuiseuxSeries {
        let tower = unify_towers(&self.tower, &other.tower).unwrap();
        // trunc = min(a.trunc + ord b, b.trunc + ord a)
        let trunc = ExtRat::min(
            self.trunc.add(&other.ord()),
            other.trunc.add(&self.ord()),
        );
        let mut terms: Vec<(Rat, Coeff)> = vec![];
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e = ea + eb;
                if let ExtRat::Fin(t) = &trunc {
                    if &e >= t {
                        continue;
                    }
                }
                let c = ca.mul(cb);
                match terms.iter_mut().find(|(x, _)| *x == e) {
                    Some((_, acc)) => *acc = acc.add(&c),
                    None => terms.push((e, c)),
                }
            }
        }
        PuiseuxSeries::new(tower, terms, trunc)
    }

    pub fn scale(&self, c: &Coeff) -> PuiseuxSeries {
        if c.is_zero() {
            return PuiseuxSeries::zero(&self.tower);
        }
        PuiseuxSeries::new(
            unify_towers(&self.tower, c.tower()).unwrap(),
            self.terms.iter().map(|(e, x)| (e.clone(), x.mul(c))).collect(),
            self.trunc.clone(),
        )
    }

    pub fn pow(&self, n: u32) -> PuiseuxSeries {
        let mut acc = PuiseuxSeries::constant(Coeff::one(&self.tower));
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    /// Shift exponents by `e` (multiply by y^e).
    pub fn shift(&self, e: &Rat) -> PuiseuxSeries {
        PuiseuxSeries::new(
            self.tower.clone(),
            self.terms.iter().map(|(x, c)| (x + e, c.clone())).collect(),
            self.trunc.add(&ExtRat::Fin(e.clone())),
        )
    }

    /// Puiseux denominator: lcm of the (reduced) exponent denominators.
    /// Equals the gcd-normalized N, i.e. the Puiseux multiplicity.
    pub fn puiseux_denominator(&self) -> u64 {
        let mut n: u64 = 1;
        for (e, _) in &self.terms {
            let d: u64 = e
                .denom()
                .try_into()
                .expect("exponent denominator exceeds u64");
            n = num::integer::lcm(n, d);
        }
        n
    }

    /// The N conjugate series, k-th having coefficients a_i * eps^{k n_i}
    /// with eps of exact order N. Index 0 is the series itself. Extends the
    /// tower when the root of unity is not yet available.
    pub fn conjugates(&self, tower: &mut Arc<Tower>) -> Result<Vec<PuiseuxSeries>> {
        let n = self.puiseux_denominator();
        if n == 1 {
            return Ok(vec![self.lift(tower)]);
        }
        let (t2, eps) = root_of_unity(tower, n)?;
        *tower = t2;
        let nrat = rati(n as i64);
        let mut out = vec![];
        for k in 0..n {
            let terms = self
                .terms
                .iter()
                .map(|(e, c)| {
                    let ni = e * &nrat;
                    assert!(ni.is_integer());
                    let ni: u64 = (ni.to_integer() % rati(n as i64).to_integer())
                        .abs()
                        .try_into()
                        .unwrap();
                    let tw = eps.pow_u((k * ni) % n);
                    (e.clone(), c.lift(tower).mul(&tw))
                })
                .collect();
            out.push(PuiseuxSeries::new(tower.clone(), terms, self.trunc.clone()));
        }
        Ok(out)
    }

    /// Exact equality of terms strictly below `bound`.
    pub fn eq_below(&self, other: &PuiseuxSeries, bound: &ExtRat) -> bool {
        let d = self.sub(other);
        match d.ord() {
            ExtRat::Inf => true,
            ExtRat::Fin(o) => ExtRat::Fin(o) >= *bound,
        }
    }

    pub fn render(&self) -> String {
        if self.terms.is_empty() {
            return match &self.trunc {
                ExtRat::Inf => "0".to_string(),
                ExtRat::Fin(t) => format!("O(y^{t})"),
            };
        }
        let mut parts: Vec<String> = self
            .terms
            .iter()
            .map(|(e, c)| {
                let cs = c.render();
                let cs = if c.as_rat().is_some() && !cs.contains('/') && !cs.starts_with('-') || c.as_rat().is_some() {
                    if cs.starts_with('-') || cs.contains('/') {
                        format!("({cs})")
                    } else {
                        cs
                    }
                } else {
                    format!("({cs})")
                };
                if e.is_zero() {
                    cs
                } else if e.is_one() {
                    format!("{cs}*y")
                } else if e.is_integer() && e.is_positive() {
                    format!("{cs}*y^{e}")
                } else {
                    format!("{cs}*y^({e})")
                }
            })
            .collect();
        if let ExtRat::Fin(t) = &self.trunc {
            parts.push(format!("O(y^{t})"));
        }
        parts.join(" + ")
    }
}

/// Contact order of two distinct arcs: the maximum of ord(a_i - b_j) over all
/// conjugate pairs (Newton-Puiseux conjugates of each representative).
pub fn contact_order(
    a: &PuiseuxSeries,
    b: &PuiseuxSeries,
    tower: &mut Arc<Tower>,
) -> Result<Rat> {
    let ca = a.conjugates(tower)?;
    let cb = b.conjugates(tower)?;
    let mut best: Option<Rat> = None;
    let mut uncertified: Option<ExtRat> = None;
    let mut all_same = true;
    for x in &ca {
        for y in &cb {
            let d = x.lift(tower).sub(&y.lift(tower));
            match (d.ord(), d.trunc().clone()) {
                (ExtRat::Inf, ExtRat::Inf) => {
                    // exactly the same series: same arc
                }
                (ExtRat::Inf, t @ ExtRat::Fin(_)) => {
                    all_same = false;
                    uncertified = Some(match uncertified {
                        Some(u) => u.max(t),
                        None => t,
                    });
                }
                (ExtRat::Fin(o), _) => {
                    all_same = false;
                    best = Some(match best {
                        Some(b) if b >= o => b,
                        _ => o,
                    });
                }
            }
        }
    }
    if all_same {
        return Err(Error::SameArc);
    }
    match (best, uncertified) {
        (Some(b), None) => Ok(b),
        (Some(b), Some(u)) => {
            if ExtRat::Fin(b.clone()) >= u {
                // a pair is zero beyond certification and could still exceed b
                Err(Error::TruncationTooLow(format!(
                    "contact order >= {u} not separated from maximum {b}"
                )))
            } else {
                Ok(b)
            }
        }
        (None, Some(u)) => Err(Error::TruncationTooLow(format!(
            "contact order only known to be >= {u}"
        ))),
        (None, None) => Err(Error::SameArc),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{adjoin_root, rat};

    fn q(tower: &Arc<Tower>, n: i64, d: i64) -> Coeff {
        Coeff::from_rat(tower, rat(n, d))
    }

    #[test]
    fn ord_examples() {
        let t = Tower::rationals();
        // gamma_- = -(3/4) y^3 + (2/3)t y^4 with t = 1
        let s = PuiseuxSeries::new(
            t.clone(),
            vec![(rati(3), q(&t, -3, 4)), (rati(4), q(&t, 2, 3))],
            ExtRat::Inf,
        );
        assert_eq!(s.ord(), ExtRat::Fin(rati(3)));
        assert_eq!(PuiseuxSeries::zero(&t).ord(), ExtRat::Inf);
        let half72 = PuiseuxSeries::monomial(q(&t, 1, 1), rat(7, 2));
        assert_eq!(half72.ord(), ExtRat::Fin(rat(7, 2)));
        assert_eq!(half72.puiseux_denominator(), 2);
    }

    #[test]
    fn arithmetic_examples() {
        let t = Tower::rationals();
        let y3 = PuiseuxSeries::monomial(q(&t, 1, 1), rati(3));
        assert!(y3.add(&y3.neg()).is_exactly_zero());
        let a = PuiseuxSeries::monomial(q(&t, -3, 4), rati(3));
        let sq = a.mul(&a);
        assert_eq!(sq.terms(), &[(rati(6), q(&t, 9, 16))]);
        // (y + y^2)^2 = y^2 + 2y^3 + y^4
        let s = PuiseuxSeries::new(
            t.clone(),
            vec![(rati(1), q(&t, 1, 1)), (rati(2), q(&t, 1, 1))],
            ExtRat::Inf,
        );
        let s2 = s.pow(2);
        assert_eq!(
            s2.terms(),
            &[
                (rati(2), q(&t, 1, 1)),
                (rati(3), q(&t, 2, 1)),
                (rati(4), q(&t, 1, 1))
            ]
        );
    }

    #[test]
    fn mul_truncation_propagation() {
        let t = Tower::rationals();
        let a = PuiseuxSeries::new(
            t.clone(),
            vec![(rati(2), q(&t, 1, 1))],
            ExtRat::Fin(rati(5)),
        );
        let b = PuiseuxSeries::monomial(q(&t, 3, 1), rati(3));
        let p = a.mul(&b);
        // trunc = min(5 + 3, inf + 2) = 8
        assert_eq!(p.trunc(), &ExtRat::Fin(rati(8)));
        assert_eq!(p.ord(), ExtRat::Fin(rati(5)));
    }

    #[test]
    fn conjugates_of_xi_y_7_2() {
        let t = Tower::rationals();
        let poly = [q(&t, 1, 2), Coeff::zero(&t), Coeff::one(&t)];
        let (t2, xi) = adjoin_root(&t, &poly).unwrap();
        let s = PuiseuxSeries::monomial(xi.clone(), rat(7, 2));
        let mut tw = t2.clone();
        let cs = s.conjugates(&mut tw).unwrap();
        assert_eq!(cs.len(), 2);
        assert_eq!(cs[0].terms()[0].1, xi.lift(&tw));
        assert_eq!(cs[1].terms()[0].1, xi.lift(&tw).neg());
    }

    #[test]
    fn conjugates_third_roots() {
        let t = Tower::rationals();
        let s = PuiseuxSeries::new(
            t.clone(),
            vec![(rat(1, 3), q(&t, 1, 1)), (rat(2, 3), q(&t, 1, 1))],
            ExtRat::Inf,
        );
        let mut tw = t.clone();
        let cs = s.conjugates(&mut tw).unwrap();
        assert_eq!(cs.len(), 3);
        let (_, eps) = root_of_unity(&mut tw.clone(), 3).unwrap();
        let eps = eps.lift(&tw);
        assert_eq!(cs[1].terms()[0].1, eps);
        assert_eq!(cs[1].terms()[1].1, eps.pow_u(2));
        assert_eq!(cs[2].terms()[0].1, eps.pow_u(2));
        assert_eq!(cs[2].terms()[1].1, eps.pow_u(4));
        // double conjugation composes additively in the index
        // conjugate k=1 of cs[1] should equal cs[2]
        let cc = cs[1].conjugates(&mut tw).unwrap();
        assert_eq!(cc[1], cs[2].lift(&tw));
    }

    #[test]
    fn conjugates_count_is_multiplicity() {
        let t = Tower::rationals();
        let s = PuiseuxSeries::monomial(q(&t, 1, 1), rat(3, 4));
        let mut tw = t.clone();
        assert_eq!(s.conjugates(&mut tw).unwrap().len(), 4);
        let s1 = PuiseuxSeries::monomial(q(&t, 1, 1), rati(2));
        let mut tw = t.clone();
        assert_eq!(s1.conjugates(&mut tw).unwrap().len(), 1);
    }

    #[test]
    fn contact_order_examples() {
        let t = Tower::rationals();
        let mut tw = t.clone();
        let gm = PuiseuxSeries::new(
            t.clone(),
            vec![(rati(3), q(&t, -3, 4)), (rati(4), q(&t, 1, 3))],
            ExtRat::Inf,
        );
        let g0 = PuiseuxSeries::zero(&t);
        assert_eq!(contact_order(&gm, &g0, &mut tw).unwrap(), rati(3));
        let y = PuiseuxSeries::monomial(q(&t, 1, 1), rati(1));
        let y2 = PuiseuxSeries::monomial(q(&t, 1, 1), rati(2));
        assert_eq!(contact_order(&y, &y2, &mut tw).unwrap(), rati(1));
        // symmetric
        assert_eq!(contact_order(&y2, &y, &mut tw).unwrap(), rati(1));
    }

    #[test]
    fn contact_order_conjugate_pairs() {
        // xi y^{7/2} vs xi y^{7/2} + y^5 -> contact 5 over the 4 pairs
        let t = Tower::rationals();
        let poly = [q(&t, 1, 2), Coeff::zero(&t), Coeff::one(&t)];
        let (t2, xi) = adjoin_root(&t, &poly).unwrap();
        let a = PuiseuxSeries::monomial(xi.clone(), rat(7, 2));
        let b = a.add(&PuiseuxSeries::monomial(Coeff::one(&t2), rati(5)));
        let mut tw = t2.clone();
        assert_eq!(contact_order(&a, &b, &mut tw).unwrap(), rati(5));
        // and the conjugate representative gives the same contact
        let aconj = a.neg();
        assert_eq!(contact_order(&aconj, &b, &mut tw).unwrap(), rati(5));
    }

    #[test]
    fn contact_order_same_arc_and_truncation() {
        let t = Tower::rationals();
        let a = PuiseuxSeries::monomial(q(&t, 1, 1), rati(2));
        let mut tw = t.clone();
        assert!(matches!(
            contact_order(&a, &a.clone(), &mut tw),
            Err(Error::SameArc)
        ));
        let b = a.truncate_to(ExtRat::Fin(rati(4)));
        assert!(matches!(
            contact_order(&a, &b, &mut tw),
            Err(Error::TruncationTooLow(_))
        ));
    }

    #[test]
    fn ord_additivity() {
        let t = Tower::rationals();
        let a = PuiseuxSeries::new(
            t.clone(),
            vec![(rat(3, 2), q(&t, 2, 1)), (rati(2), q(&t, 1, 1))],
            ExtRat::Inf,
        );
        let b = PuiseuxSeries::new(
            t.clone(),
            vec![(rati(1), q(&t, -1, 1)), (rati(3), q(&t, 5, 1))],
            ExtRat::Inf,
        );
        assert_eq!(a.mul(&b).ord(), a.ord().add(&b.ord()));
        assert!(a.add(&b).ord() >= ExtRat::min(a.ord(), b.ord()));
        assert_eq!(a.add(&b).ord(), ExtRat::Fin(rati(1)));
    }
}
