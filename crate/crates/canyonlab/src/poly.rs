//! Bivariate polynomial germs f(x,y): parsing, derivatives, mini-regularity,
//! gcd/squarefree preprocessing in x, and the substitution x := X + g(Y).

use crate::arith::{rati, unify_towers, Coeff, ExtRat, Rat, Tower};
use crate::error::{Error, Result};
use crate::series::PuiseuxSeries;
use num::BigInt;
use std::collections::BTreeMap;
use std::sync::Arc;

// ---------------------------------------------------------------------------
// Univariate polynomials over the coefficient field (used in y).

#[derive(Debug, Clone, PartialEq)]
pub struct UPoly {
    tower: Arc<Tower>,
    /// c[i] is the coefficient of v^i; trailing zeros trimmed.
    c: Vec<Coeff>,
}

impl UPoly {
    pub fn new(tower: Arc<Tower>, mut c: Vec<Coeff>) -> UPoly {
        while c.last().map_or(false, |x| x.is_zero()) {
            c.pop();
        }
        let tower = c
            .iter()
            .fold(tower, |t, x| unify_towers(&t, x.tower()).unwrap());
        let c = c.into_iter().map(|x| x.lift(&tower)).collect();
        UPoly { tower, c }
    }
    pub fn zero(tower: &Arc<Tower>) -> UPoly {
        UPoly { tower: tower.clone(), c: vec![] }
    }
    pub fn constant(x: Coeff) -> UPoly {
        UPoly::new(x.tower().clone(), vec![x])
    }
    pub fn coeffs(&self) -> &[Coeff] {
        &self.c
    }
    pub fn tower(&self) -> &Arc<Tower> {
        &self.tower
    }
    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }
    pub fn deg(&self) -> Option<usize> {
        if self.c.is_empty() { None } else { Some(self.c.len() - 1) }
    }
    pub fn lead(&self) -> Option<&Coeff> {
        self.c.last()
    }
    pub fn add(&self, o: &UPoly) -> UPoly {
        let tower = unify_towers(&self.tower, &o.tower).unwrap();
        let n = self.c.len().max(o.c.len());
        let mut c = vec![Coeff::zero(&tower); n];
        for (i, x) in self.c.iter().enumerate() {
            c[i] = c[i].add(&x.lift(&tower));
        }
        for (i, x) in o.c.iter().enumerate() {
            c[i] = c[i].add(&x.lift(&tower));
        }
        UPoly::new(tower, c)
    }
    pub fn neg(&self) -> UPoly {
        UPoly { tower: self.tower.clone(), c: self.c.iter().map(|x| x.neg()).collect() }
    }
    pub fn sub(&self, o: &UPoly) -> UPoly {
        self.add(&o.neg())
    }
    pub fn mul(&self, o: &UPoly) -> UPoly {
        if self.is_zero() || o.is_zero() {
            return UPoly::zero(&self.tower);
        }
        let tower = unify_towers(&self.tower, &o.tower).unwrap();
        let mut c = vec![Coeff::zero(&tower); self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            for (j, b) in o.c.iter().enumerate() {
                c[i + j] = c[i + j].add(&a.lift(&tower).mul(&b.lift(&tower)));
            }
        }
        UPoly::new(tower, c)
    }
    pub fn scale(&self, s: &Coeff) -> UPoly {
        UPoly::new(
            self.tower.clone(),
            self.c.iter().map(|x| x.mul(s)).collect(),
        )
    }
    /// Exact division by a leading-coefficient-invertible divisor.
    pub fn div_rem(&self, d: &UPoly) -> Result<(UPoly, UPoly)> {
        let tower = unify_towers(&self.tower, &d.tower).unwrap();
        let dl = d.lead().ok_or(Error::DivisionByZero)?.lift(&tower);
        let dinv = dl.inv()?;
        let dd = d.deg().unwrap();
        let mut r = self.lift(&tower);
        let mut q = vec![Coeff::zero(&tower); self.c.len().saturating_sub(dd)];
        while let Some(rd) = r.deg() {
            if rd < dd {
                break;
            }
            let f = r.lead().unwrap().mul(&dinv);
            q[rd - dd] = f.clone();
            let mut sub = vec![Coeff::zero(&tower); rd - dd];
            sub.extend(d.c.iter().map(|x| x.lift(&tower).mul(&f)));
            r = r.sub(&UPoly::new(tower.clone(), sub));
        }
        Ok((UPoly::new(tower, q), r))
    }
    pub fn gcd(&self, o: &UPoly) -> UPoly {
        let mut a = self.clone();
        let mut b = o.clone();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b).unwrap();
            a = b;
            b = r;
        }
        a.monic()
    }
    pub fn monic(&self) -> UPoly {
        match self.lead() {
            None => self.clone(),
            Some(l) => self.scale(&l.inv().unwrap()),
        }
    }
    pub fn derivative(&self) -> UPoly {
        if self.c.len() <= 1 {
            return UPoly::zero(&self.tower);
        }
        let c = self
            .c
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, x)| x.scale(&rati(i as i64)))
            .collect();
        UPoly::new(self.tower.clone(), c)
    }
    pub fn eval(&self, v: &Coeff) -> Coeff {
        let tower = unify_towers(&self.tower, v.tower()).unwrap();
        let mut acc = Coeff::zero(&tower);
        for x in self.c.iter().rev() {
            acc = acc.mul(&v.lift(&tower)).add(&x.lift(&tower));
        }
        acc
    }
    pub fn lift(&self, tower: &Arc<Tower>) -> UPoly {
        UPoly::new(tower.clone(), self.c.clone())
    }
    pub fn as_series(&self) -> PuiseuxSeries {
        PuiseuxSeries::new(
            self.tower.clone(),
            self.c
                .iter()
                .enumerate()
                .map(|(i, x)| (rati(i as i64), x.clone()))
                .collect(),
            ExtRat::Inf,
        )
    }
}

// ---------------------------------------------------------------------------
// Bivariate germs.

#[derive(Debug, Clone, PartialEq)]
pub struct BivarPoly {
    tower: Arc<Tower>,
    /// (i, j) -> nonzero coefficient of x^i y^j.
    terms: BTreeMap<(u32, u32), Coeff>,
}

impl BivarPoly {
    pub fn new(tower: Arc<Tower>, terms: BTreeMap<(u32, u32), Coeff>) -> BivarPoly {
        let tower = terms
            .values()
            .fold(tower, |t, x| unify_towers(&t, x.tower()).unwrap());
        let terms = terms
            .into_iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| (k, c.lift(&tower)))
            .collect();
        BivarPoly { tower, terms }
    }
    pub fn zero(tower: &Arc<Tower>) -> BivarPoly {
        BivarPoly { tower: tower.clone(), terms: BTreeMap::new() }
    }
    pub fn monomial(c: Coeff, i: u32, j: u32) -> BivarPoly {
        let tower = c.tower().clone();
        BivarPoly::new(tower, BTreeMap::from([((i, j), c)]))
    }
    pub fn terms(&self) -> &BTreeMap<(u32, u32), Coeff> {
        &self.terms
    }
    pub fn tower(&self) -> &Arc<Tower> {
        &self.tower
    }
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    pub fn deg_x(&self) -> u32 {
        self.terms.keys().map(|(i, _)| *i).max().unwrap_or(0)
    }
    pub fn vanishes_at_origin(&self) -> bool {
        !self.terms.contains_key(&(0, 0))
    }
    pub fn constant_part(&self) -> Option<&Coeff> {
        self.terms.get(&(0, 0))
    }

    pub fn add(&self, o: &BivarPoly) -> BivarPoly {
        let tower = unify_towers(&self.tower, &o.tower).unwrap();
        let mut terms = self.terms.clone();
        for (k, c) in &o.terms {
            let e = terms
                .entry(*k)
                .or_insert_with(|| Coeff::zero(&tower));
            *e = e.lift(&tower).add(&c.lift(&tower));
        }
        BivarPoly::new(tower, terms)
    }
    pub fn neg(&self) -> BivarPoly {
        BivarPoly {
            tower: self.tower.clone(),
            terms: self.terms.iter().map(|(k, c)| (*k, c.neg())).collect(),
        }
    }
    pub fn sub(&self, o: &BivarPoly) -> BivarPoly {
        self.add(&o.neg())
    }
    pub fn mul(&self, o: &BivarPoly) -> BivarPoly {
        let tower = unify_towers(&self.tower, &o.tower).unwrap();
        let mut terms: BTreeMap<(u32, u32), Coeff> = BTreeMap::new();
        for ((i1, j1), a) in &self.terms {
            for ((i2, j2), b) in &o.terms {
                let k = (i1 + i2, j1 + j2);
                let p = a.lift(&tower).mul(&b.lift(&tower));
                let e = terms.entry(k).or_insert_with(|| Coeff::zero(&tower));
                *e = e.add(&p);
            }
        }
        BivarPoly::new(tower, terms)
    }
    pub fn scale(&self, s: &Coeff) -> BivarPoly {
        BivarPoly::new(
            self.tower.clone(),
            self.terms.iter().map(|(k, c)| (*k, c.mul(s))).collect(),
        )
    }
    pub fn pow(&self, n: u32) -> BivarPoly {
        let mut acc = BivarPoly::monomial(Coeff::one(&self.tower), 0, 0);
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn derivative_x(&self) -> BivarPoly {
        let terms = self
            .terms
            .iter()
            .filter(|((i, _), _)| *i > 0)
            .map(|((i, j), c)| ((i - 1, *j), c.scale(&rati(*i as i64))))
            .collect();
        BivarPoly::new(self.tower.clone(), terms)
    }
    pub fn derivative_y(&self) -> BivarPoly {
        let terms = self
            .terms
            .iter()
            .filter(|((_, j), _)| *j > 0)
            .map(|((i, j), c)| ((*i, j - 1), c.scale(&rati(*j as i64))))
            .collect();
        BivarPoly::new(self.tower.clone(), terms)
    }

    /// Multiplicity at the origin.
    pub fn order(&self) -> Option<u32> {
        self.terms.keys().map(|(i, j)| i + j).min()
    }

    /// The order m when the initial form does not vanish at (1,0),
    /// i.e. x^m appears in the degree-m part.
    pub fn mini_regular_order(&self) -> Result<u32> {
        let m = self.order().ok_or(Error::ZeroPolynomial)?;
        if self.terms.contains_key(&(m, 0)) {
            Ok(m)
        } else {
            Err(Error::NotMiniRegular)
        }
    }

    /// Substitute x := g(x,y).
    pub fn subst_x(&self, g: &BivarPoly) -> BivarPoly {
        let tower = unify_towers(&self.tower, &g.tower).unwrap();
        let mut acc = BivarPoly::zero(&tower);
        for m in (0..=self.deg_x()).rev() {
            acc = acc.mul(g);
            for ((i, j), c) in &self.terms {
                if *i == m {
                    acc = acc.add(&BivarPoly::monomial(c.lift(&tower), 0, *j));
                }
            }
        }
        acc
    }

    /// The shear x -> x + lambda*y.
    pub fn shear(&self, lambda: i64) -> BivarPoly {
        let x = BivarPoly::monomial(Coeff::one(&self.tower), 1, 0);
        let ly = BivarPoly::monomial(Coeff::from_rat(&self.tower, rati(lambda)), 0, 1);
        self.subst_x(&x.add(&ly))
    }

    /// Shear y -> y + λx. Restores mini-regularity for a suitable λ: the
    /// new initial form at (1,0) evaluates the old one at (1, λ).
    pub fn shear_y(&self, lambda: i64) -> BivarPoly {
        let lam = Coeff::from_rat(&self.tower, rati(lambda));
        let mut out = BivarPoly::zero(&self.tower);
        let x = BivarPoly::monomial(Coeff::one(&self.tower), 1, 0);
        let y = BivarPoly::monomial(Coeff::one(&self.tower), 0, 1);
        let ysub = y.add(&x.scale(&lam));
        for ((i, j), c) in &self.terms {
            let mut term = BivarPoly::monomial(c.clone(), *i, 0);
            term = term.mul(&ysub.pow(*j));
            out = out.add(&term);
        }
        out
    }

    /// Coefficients in x: index m holds the y-polynomial at x^m.
    pub fn x_coeffs(&self) -> Vec<UPoly> {
        let mut out = vec![UPoly::zero(&self.tower); self.deg_x() as usize + 1];
        for ((i, j), c) in &self.terms {
            let mut v = vec![Coeff::zero(&self.tower); *j as usize + 1];
            v[*j as usize] = c.clone();
            out[*i as usize] = out[*i as usize].add(&UPoly::new(self.tower.clone(), v));
        }
        out
    }
    pub fn from_x_coeffs(tower: &Arc<Tower>, cs: &[UPoly]) -> BivarPoly {
        let mut terms = BTreeMap::new();
        for (i, p) in cs.iter().enumerate() {
            for (j, c) in p.coeffs().iter().enumerate() {
                if !c.is_zero() {
                    terms.insert((i as u32, j as u32), c.clone());
                }
            }
        }
        BivarPoly::new(tower.clone(), terms)
    }

    pub fn lift(&self, tower: &Arc<Tower>) -> BivarPoly {
        BivarPoly::new(tower.clone(), self.terms.clone())
    }

    pub fn render(&self) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut parts: Vec<String> = vec![];
        for ((i, j), c) in self.terms.iter().rev() {
            let mut s = String::new();
            let cs = c.render();
            let coeff_one = c.is_one();
            if !coeff_one || (*i == 0 && *j == 0) {
                if cs.contains('+') || cs.contains('*') || cs.starts_with('-') {
                    s.push_str(&format!("({cs})"));
                } else {
                    s.push_str(&cs);
                }
            }
            for (v, e) in [("x", i), ("y", j)] {
                if *e > 0 {
                    if !s.is_empty() {
                        s.push('*');
                    }
                    s.push_str(v);
                    if *e > 1 {
                        s.push_str(&format!("^{e}"));
                    }
                }
            }
            parts.push(s);
        }
        parts.join(" + ")
    }
}

// ---------------------------------------------------------------------------
// Polynomials in X with Puiseux-series coefficients: F(X,Y) = f(X+g(Y),Y).

#[derive(Debug, Clone, PartialEq)]
pub struct XPoly {
    tower: Arc<Tower>,
    /// coeffs[m] is the series coefficient of X^m. Top entries that are
    /// exactly zero are trimmed; truncated-empty coefficients are kept.
    coeffs: Vec<PuiseuxSeries>,
}

impl XPoly {
    pub fn new(tower: Arc<Tower>, mut coeffs: Vec<PuiseuxSeries>) -> XPoly {
        while coeffs.last().map_or(false, |s| s.is_exactly_zero()) {
            coeffs.pop();
        }
        let tower = coeffs
            .iter()
            .fold(tower, |t, s| unify_towers(&t, s.tower()).unwrap());
        let coeffs = coeffs.iter().map(|s| s.lift(&tower)).collect();
        XPoly { tower, coeffs }
    }
    pub fn from_bivar(f: &BivarPoly) -> XPoly {
        XPoly::new(
            f.tower().clone(),
            f.x_coeffs().iter().map(|p| p.as_series()).collect(),
        )
    }
    pub fn tower(&self) -> &Arc<Tower> {
        &self.tower
    }
    pub fn coeffs(&self) -> &[PuiseuxSeries] {
        &self.coeffs
    }
    pub fn coeff(&self, m: usize) -> PuiseuxSeries {
        self.coeffs
            .get(m)
            .cloned()
            .unwrap_or_else(|| PuiseuxSeries::zero(&self.tower))
    }
    pub fn deg_x(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }
    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|s| s.is_exactly_zero())
    }

    pub fn add(&self, o: &XPoly) -> XPoly {
        let tower = unify_towers(&self.tower, &o.tower).unwrap();
        let n = self.coeffs.len().max(o.coeffs.len());
        let mut c = vec![PuiseuxSeries::zero(&tower); n];
        for (i, s) in self.coeffs.iter().enumerate() {
            c[i] = c[i].add(s);
        }
        for (i, s) in o.coeffs.iter().enumerate() {
            c[i] = c[i].add(s);
        }
        XPoly::new(tower, c)
    }
    pub fn scale(&self, s: &PuiseuxSeries) -> XPoly {
        XPoly::new(
            self.tower.clone(),
            self.coeffs.iter().map(|c| c.mul(s)).collect(),
        )
    }
    /// Multiply by (X + g).
    pub fn mul_x_plus(&self, g: &PuiseuxSeries) -> XPoly {
        let tower = unify_towers(&self.tower, g.tower()).unwrap();
        let mut c = vec![PuiseuxSeries::zero(&tower); self.coeffs.len() + 1];
        for (i, s) in self.coeffs.iter().enumerate() {
            c[i + 1] = c[i + 1].add(s);
            c[i] = c[i].add(&s.mul(g));
        }
        XPoly::new(tower, c)
    }

    /// F(X+g, Y) by Horner.
    pub fn compose_shift(&self, g: &PuiseuxSeries) -> XPoly {
        let tower = unify_towers(&self.tower, g.tower()).unwrap();
        let mut acc = XPoly::new(tower.clone(), vec![]);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul_x_plus(g);
            acc = acc.add(&XPoly::new(tower.clone(), vec![c.clone()]));
        }
        acc
    }

    /// f(g(y), y) by Horner.
    pub fn subst(&self, g: &PuiseuxSeries) -> PuiseuxSeries {
        let tower = unify_towers(&self.tower, g.tower()).unwrap();
        let mut acc = PuiseuxSeries::zero(&tower);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(g).add(c);
        }
        acc
    }

    pub fn derivative_x(&self) -> XPoly {
        if self.coeffs.len() <= 1 {
            return XPoly::new(self.tower.clone(), vec![]);
        }
        let c = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(m, s)| s.scale(&Coeff::from_rat(&self.tower, rati(m as i64))))
            .collect();
        XPoly::new(self.tower.clone(), c)
    }

    /// Support dots (m, q) from stored terms of each coefficient.
    pub fn dots(&self) -> Vec<(u32, Rat)> {
        let mut out = vec![];
        for (m, s) in self.coeffs.iter().enumerate() {
            for (e, _) in s.terms() {
                out.push((m as u32, e.clone()));
            }
        }
        out
    }

    pub fn lift(&self, tower: &Arc<Tower>) -> XPoly {
        XPoly::new(tower.clone(), self.coeffs.clone())
    }

    pub fn truncate_to(&self, t: &ExtRat) -> XPoly {
        XPoly::new(
            self.tower.clone(),
            self.coeffs.iter().map(|s| s.truncate_to(t.clone())).collect(),
        )
    }
}

/// F(X,Y) = f(X+g(Y),Y).
pub fn relative(f: &BivarPoly, g: &PuiseuxSeries) -> XPoly {
    XPoly::from_bivar(f).compose_shift(g)
}

// ---------------------------------------------------------------------------
// gcd / squarefree machinery in x over K[y] (coefficients as y-polynomials).

fn xp_deg(p: &[UPoly]) -> Option<usize> {
    let mut d = None;
    for (i, c) in p.iter().enumerate() {
        if !c.is_zero() {
            d = Some(i);
        }
    }
    d
}

fn xp_trim(mut p: Vec<UPoly>) -> Vec<UPoly> {
    while p.last().map_or(false, |c| c.is_zero()) {
        p.pop();
    }
    p
}

fn xp_scale(p: &[UPoly], s: &UPoly) -> Vec<UPoly> {
    p.iter().map(|c| c.mul(s)).collect()
}

fn xp_sub(a: &[UPoly], b: &[UPoly], tower: &Arc<Tower>) -> Vec<UPoly> {
    let n = a.len().max(b.len());
    let mut out = vec![UPoly::zero(tower); n];
    for (i, c) in a.iter().enumerate() {
        out[i] = out[i].add(c);
    }
    for (i, c) in b.iter().enumerate() {
        out[i] = out[i].sub(c);
    }
    xp_trim(out)
}

fn xp_content(p: &[UPoly], tower: &Arc<Tower>) -> UPoly {
    let mut g = UPoly::zero(tower);
    for c in p {
        g = g.gcd(c);
    }
    if g.is_zero() {
        UPoly::constant(Coeff::one(tower))
    } else {
        g
    }
}

fn xp_primitive(p: &[UPoly], tower: &Arc<Tower>) -> Vec<UPoly> {
    let cont = xp_content(p, tower);
    p.iter()
        .map(|c| {
            let (q, r) = c.div_rem(&cont).unwrap();
            assert!(r.is_zero());
            q
        })
        .collect()
}

/// Pseudo-remainder of a by b in x: lc(b)^(da-db+1) * a mod b.
fn xp_prem(a: &[UPoly], b: &[UPoly], tower: &Arc<Tower>) -> Vec<UPoly> {
    let db = xp_deg(b).expect("pseudo-division by zero");
    let lb = b[db].clone();
    let mut r: Vec<UPoly> = a.to_vec();
    loop {
        let dr = match xp_deg(&r) {
            Some(d) if d >= db => d,
            _ => return xp_trim(r),
        };
        let lr = r[dr].clone();
        // r := lb*r - lr*x^(dr-db)*b
        let mut shifted = vec![UPoly::zero(tower); dr - db];
        shifted.extend(b.iter().cloned());
        r = xp_sub(&xp_scale(&r, &lb), &xp_scale(&shifted, &lr), tower);
    }
}

/// Primitive gcd in x of two y-polynomial-coefficient polynomials.
pub fn gcd_x(fa: &BivarPoly, fb: &BivarPoly) -> BivarPoly {
    let tower = unify_towers(fa.tower(), fb.tower()).unwrap();
    let mut a = xp_trim(fa.lift(&tower).x_coeffs());
    let mut b = xp_trim(fb.lift(&tower).x_coeffs());
    if xp_deg(&a) < xp_deg(&b) {
        std::mem::swap(&mut a, &mut b);
    }
    if b.is_empty() {
        return BivarPoly::from_x_coeffs(&tower, &a);
    }
    loop {
        let r = xp_prem(&a, &b, &tower);
        if r.is_empty() {
            break;
        }
        a = b;
        b = xp_primitive(&r, &tower);
    }
    // normalize: primitive in y, monic-ish in x (leading y-poly monic)
    let mut g = xp_primitive(&b, &tower);
    if let Some(d) = xp_deg(&g) {
        let lc = g[d].lead().unwrap().inv().unwrap();
        g = g.iter().map(|c| c.scale(&lc)).collect();
    }
    BivarPoly::from_x_coeffs(&tower, &g)
}

/// Exact division in x (the quotient must exist over K[y]).
pub fn div_exact_x(fa: &BivarPoly, fb: &BivarPoly) -> BivarPoly {
    let tower = unify_towers(fa.tower(), fb.tower()).unwrap();
    let a = xp_trim(fa.lift(&tower).x_coeffs());
    let b = xp_trim(fb.lift(&tower).x_coeffs());
    let db = xp_deg(&b).expect("division by zero");
    let lb = &b[db];
    let mut r = a;
    let mut q: Vec<UPoly> = vec![];
    while let Some(dr) = xp_deg(&r) {
        if dr < db {
            break;
        }
        let (qc, rem) = r[dr].div_rem(lb).unwrap();
        assert!(rem.is_zero(), "inexact division in x");
        while q.len() <= dr - db {
            q.push(UPoly::zero(&tower));
        }
        q[dr - db] = qc.clone();
        let mut shifted = vec![UPoly::zero(&tower); dr - db];
        shifted.extend(b.iter().cloned());
        r = xp_sub(&r, &xp_scale(&shifted, &qc), &tower);
    }
    assert!(r.is_empty(), "inexact division in x");
    BivarPoly::from_x_coeffs(&tower, &q)
}

/// Yun squarefree decomposition in x: returns (S_i, i) with
/// f = unit * prod S_i^i, each S_i squarefree, pairwise coprime in x.
/// Only factors with positive x-degree are returned.
pub fn yun_x(f: &BivarPoly) -> Vec<(BivarPoly, u32)> {
    let fx = f.derivative_x();
    if fx.is_zero() {
        return vec![];
    }
    let a0 = gcd_x(f, &fx);
    if a0.deg_x() == 0 {
        return if f.deg_x() > 0 { vec![(f.clone(), 1)] } else { vec![] };
    }
    let mut out = vec![];
    let mut b = div_exact_x(f, &a0);
    let mut c = div_exact_x(&fx, &a0);
    let mut i = 1u32;
    loop {
        let d = c.sub(&b.derivative_x());
        if b.deg_x() == 0 {
            break;
        }
        let s = gcd_x(&b, &d);
        if s.deg_x() > 0 {
            out.push((s.clone(), i));
        }
        b = div_exact_x(&b, &s);
        c = div_exact_x(&d, &s);
        i += 1;
    }
    out
}

/// gcd(f, f_x) in x — the factor of f carrying its multiple x-roots.
pub fn common_factor(f: &BivarPoly) -> BivarPoly {
    gcd_x(f, &f.derivative_x())
}

/// Squarefree polynomials whose x-roots are exactly the polar roots
/// (roots of f_x that are not roots of f), paired with their multiplicity
/// in f_x.
pub fn polar_parts(f: &BivarPoly) -> Vec<(BivarPoly, u32)> {
    let fx = f.derivative_x();
    let g = gcd_x(f, &fx);
    let mut out = vec![];
    for (s, i) in yun_x(&fx) {
        let t = if g.deg_x() > 0 {
            let c = gcd_x(&s, &g);
            if c.deg_x() > 0 { div_exact_x(&s, &c) } else { s }
        } else {
            s
        };
        if t.deg_x() > 0 {
            let tc = t.x_coeffs();
            let lc = tc.last().unwrap().lead().unwrap().inv().unwrap();
            out.push((t.scale(&lc), i));
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Input grammar: terms c*x^i*y^j, +, -, parentheses, rational constants,
// declared parameters substituted at parse time.

struct Parser<'a> {
    toks: Vec<Tok>,
    pos: usize,
    params: &'a BTreeMap<String, Rat>,
    tower: Arc<Tower>,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LPar,
    RPar,
}

fn lex(src: &str) -> Result<Vec<Tok>> {
    let mut out = vec![];
    let cs: Vec<char> = src.chars().collect();
    let mut i = 0;
    while i < cs.len() {
        let c = cs[i];
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '+' => { out.push(Tok::Plus); i += 1 }
            '-' => { out.push(Tok::Minus); i += 1 }
            '*' => { out.push(Tok::Star); i += 1 }
            '/' => { out.push(Tok::Slash); i += 1 }
            '^' => { out.push(Tok::Caret); i += 1 }
            '(' => { out.push(Tok::LPar); i += 1 }
            ')' => { out.push(Tok::RPar); i += 1 }
            '0'..='9' => {
                let mut s = String::new();
                while i < cs.len() && cs[i].is_ascii_digit() {
                    s.push(cs[i]);
                    i += 1;
                }
                out.push(Tok::Num(s.parse().unwrap()));
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut s = String::new();
                while i < cs.len() && (cs[i].is_ascii_alphanumeric() || cs[i] == '_') {
                    s.push(cs[i]);
                    i += 1;
                }
                out.push(Tok::Ident(s));
            }
            c => return Err(Error::Parse(format!("unexpected character '{c}'"))),
        }
    }
    Ok(out)
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }
    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }
    fn expr(&mut self) -> Result<BivarPoly> {
        let mut neg = false;
        if self.peek() == Some(&Tok::Minus) {
            self.next();
            neg = true;
        } else if self.peek() == Some(&Tok::Plus) {
            self.next();
        }
        let mut acc = self.term()?;
        if neg {
            acc = acc.neg();
        }
        while let Some(t) = self.peek() {
            match t {
                Tok::Plus => {
                    self.next();
                    acc = acc.add(&self.term()?);
                }
                Tok::Minus => {
                    self.next();
                    acc = acc.sub(&self.term()?);
                }
                _ => break,
            }
        }
        Ok(acc)
    }
    fn term(&mut self) -> Result<BivarPoly> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.next();
                    acc = acc.mul(&self.factor()?);
                }
                Some(Tok::Slash) => {
                    self.next();
                    let d = self.factor()?;
                    let c = d
                        .constant_part()
                        .filter(|_| d.terms().len() == 1)
                        .ok_or_else(|| {
                            Error::Parse("division only by nonzero constants".into())
                        })?;
                    acc = acc.scale(&c.inv()?);
                }
                // implicit multiplication: x y, 2x, (..)x
                Some(Tok::Ident(_)) | Some(Tok::Num(_)) | Some(Tok::LPar) => {
                    acc = acc.mul(&self.factor()?);
                }
                _ => break,
            }
        }
        Ok(acc)
    }
    fn factor(&mut self) -> Result<BivarPoly> {
        let base = match self.next() {
            Some(Tok::Num(n)) => BivarPoly::monomial(
                Coeff::from_rat(&self.tower, Rat::from_integer(n)),
                0,
                0,
            ),
            Some(Tok::Ident(s)) if s == "x" => {
                BivarPoly::monomial(Coeff::one(&self.tower), 1, 0)
            }
            Some(Tok::Ident(s)) if s == "y" => {
                BivarPoly::monomial(Coeff::one(&self.tower), 0, 1)
            }
            Some(Tok::Ident(s)) => {
                let v = self
                    .params
                    .get(&s)
                    .ok_or_else(|| Error::UnboundParameter(s.clone()))?;
                BivarPoly::monomial(Coeff::from_rat(&self.tower, v.clone()), 0, 0)
            }
            Some(Tok::LPar) => {
                let e = self.expr()?;
                if self.next() != Some(Tok::RPar) {
                    return Err(Error::Parse("expected ')'".into()));
                }
                e
            }
            Some(Tok::Minus) => self.factor()?.neg(),
            t => return Err(Error::Parse(format!("unexpected token {t:?}"))),
        };
        if self.peek() == Some(&Tok::Caret) {
            self.next();
            match self.next() {
                Some(Tok::Num(n)) => {
                    let e: u32 = n
                        .try_into()
                        .map_err(|_| Error::Parse("exponent too large".into()))?;
                    return Ok(base.pow(e));
                }
                t => return Err(Error::Parse(format!("expected exponent, got {t:?}"))),
            }
        }
        Ok(base)
    }
}

pub fn parse_poly(src: &str, params: &BTreeMap<String, Rat>) -> Result<BivarPoly> {
    let toks = lex(src)?;
    let mut p = Parser {
        toks,
        pos: 0,
        params,
        tower: Tower::rationals(),
    };
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(Error::Parse(format!(
            "trailing input at token {}",
            p.pos
        )));
    }
    Ok(e)
}
