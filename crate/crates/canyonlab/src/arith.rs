//! Exact coefficient arithmetic: arbitrary-precision rationals and towers of
//! algebraic extensions of the rationals.
//!
//! A [`Tower`] is an ordered list of generators, each with a monic minimal
//! polynomial over the levels below it. A [`Coeff`] is a canonically reduced
//! polynomial expression in the generators with rational coefficients.
//! Zero-testing is exact: the canonical form of zero is the rational zero.

use crate::error::{Error, Result};
use num::bigint::BigInt;
use num::{One, Signed, Zero};
use std::fmt;
use std::sync::Arc;

pub type Rat = num::BigRational;

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn rati(n: i64) -> Rat {
    Rat::from(BigInt::from(n))
}

pub fn parse_rat(s: &str) -> Result<Rat> {
    s.trim()
        .parse::<Rat>()
        .map_err(|e| Error::Parse(format!("bad rational {s:?}: {e}")))
}

/// A rational extended with +infinity. Used for series orders ("identically
/// zero" vs "zero so far") and truncation bounds ("exact series").
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExtRat {
    Fin(Rat),
    Inf,
}

impl ExtRat {
    pub fn fin(&self) -> Option<&Rat> {
        match self {
            ExtRat::Fin(r) => Some(r),
            ExtRat::Inf => None,
        }
    }
    pub fn is_inf(&self) -> bool {
        matches!(self, ExtRat::Inf)
    }
    pub fn add(&self, other: &ExtRat) -> ExtRat {
        match (self, other) {
            (ExtRat::Fin(a), ExtRat::Fin(b)) => ExtRat::Fin(a + b),
            _ => ExtRat::Inf,
        }
    }
    pub fn min(a: ExtRat, b: ExtRat) -> ExtRat {
        if a <= b {
            a
        } else {
            b
        }
    }
}

impl PartialOrd for ExtRat {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for ExtRat {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        use ExtRat::*;
        match (self, other) {
            (Fin(a), Fin(b)) => a.cmp(b),
            (Fin(_), Inf) => std::cmp::Ordering::Less,
            (Inf, Fin(_)) => std::cmp::Ordering::Greater,
            (Inf, Inf) => std::cmp::Ordering::Equal,
        }
    }
}

impl fmt::Display for ExtRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtRat::Fin(r) => write!(f, "{r}"),
            ExtRat::Inf => write!(f, "inf"),
        }
    }
}

/// Canonically reduced element of a tower. `Ext(l, v)` is a polynomial of
/// degree `v.len()-1 >= 1` in generator `l` whose coefficients live strictly
/// below level `l`; the top coefficient is nonzero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Elem {
    Q(Rat),
    Ext(usize, Vec<Elem>),
}

impl Elem {
    pub fn zero() -> Elem {
        Elem::Q(Rat::zero())
    }
    pub fn one() -> Elem {
        Elem::Q(Rat::one())
    }
    fn lvl(&self) -> Option<usize> {
        match self {
            Elem::Q(_) => None,
            Elem::Ext(l, _) => Some(*l),
        }
    }
    pub fn is_zero(&self) -> bool {
        matches!(self, Elem::Q(r) if r.is_zero())
    }
}

fn canon(l: usize, mut v: Vec<Elem>) -> Elem {
    while v.last().is_some_and(|e| e.is_zero()) {
        v.pop();
    }
    match v.len() {
        0 => Elem::zero(),
        1 => v.pop().unwrap(),
        _ => Elem::Ext(l, v),
    }
}

fn vec_at(e: &Elem, l: usize) -> Vec<Elem> {
    match e {
        Elem::Ext(k, v) if *k == l => v.clone(),
        _ => vec![e.clone()],
    }
}

fn e_add(t: &Tower, a: &Elem, b: &Elem) -> Elem {
    match (a.lvl(), b.lvl()) {
        (None, None) => {
            let (Elem::Q(ra), Elem::Q(rb)) = (a, b) else { unreachable!() };
            Elem::Q(ra + rb)
        }
        (la, lb) => {
            let l = la.into_iter().chain(lb).max().unwrap();
            let va = vec_at(a, l);
            let vb = vec_at(b, l);
            let n = va.len().max(vb.len());
            let z = Elem::zero();
            let v = (0..n)
                .map(|i| e_add(t, va.get(i).unwrap_or(&z), vb.get(i).unwrap_or(&z)))
                .collect();
            canon(l, v)
        }
    }
}

fn e_neg(t: &Tower, a: &Elem) -> Elem {
    match a {
        Elem::Q(r) => Elem::Q(-r),
        Elem::Ext(l, v) => canon(*l, v.iter().map(|e| e_neg(t, e)).collect()),
    }
}

fn e_sub(t: &Tower, a: &Elem, b: &Elem) -> Elem {
    e_add(t, a, &e_neg(t, b))
}

fn e_mul(t: &Tower, a: &Elem, b: &Elem) -> Elem {
    if a.is_zero() || b.is_zero() {
        return Elem::zero();
    }
    match (a.lvl(), b.lvl()) {
        (None, None) => {
            let (Elem::Q(ra), Elem::Q(rb)) = (a, b) else { unreachable!() };
            Elem::Q(ra * rb)
        }
        (la, lb) => {
            let l = la.into_iter().chain(lb).max().unwrap();
            let va = vec_at(a, l);
            let vb = vec_at(b, l);
            let mut v = vec![Elem::zero(); va.len() + vb.len() - 1];
            for (i, x) in va.iter().enumerate() {
                if x.is_zero() {
                    continue;
                }
                for (j, y) in vb.iter().enumerate() {
                    if y.is_zero() {
                        continue;
                    }
                    let p = e_mul(t, x, y);
                    v[i + j] = e_add(t, &v[i + j], &p);
                }
            }
            reduce_mod(t, l, &mut v);
            canon(l, v)
        }
    }
}

/// Reduce a coefficient vector modulo the minimal polynomial of level `l`.
fn reduce_mod(t: &Tower, l: usize, v: &mut Vec<Elem>) {
    let mp = &t.levels[l].minpoly;
    let d = mp.len();
    while v.len() > d {
        let c = v.pop().unwrap();
        if c.is_zero() {
            continue;
        }
        let k = v.len();
        for (j, m) in mp.iter().enumerate() {
            let p = e_mul(t, &c, m);
            v[k - d + j] = e_sub(t, &v[k - d + j], &p);
        }
    }
}

// ---- dense univariate polynomial helpers over Elem (used for inversion) ----

fn p_trim(v: &mut Vec<Elem>) {
    while v.last().is_some_and(|e| e.is_zero()) {
        v.pop();
    }
}

fn p_sub(t: &Tower, a: &[Elem], b: &[Elem]) -> Vec<Elem> {
    let n = a.len().max(b.len());
    let z = Elem::zero();
    let mut v: Vec<Elem> = (0..n)
        .map(|i| e_sub(t, a.get(i).unwrap_or(&z), b.get(i).unwrap_or(&z)))
        .collect();
    p_trim(&mut v);
    v
}

fn p_mul(t: &Tower, a: &[Elem], b: &[Elem]) -> Vec<Elem> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut v = vec![Elem::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            let p = e_mul(t, x, y);
            v[i + j] = e_add(t, &v[i + j], &p);
        }
    }
    p_trim(&mut v);
    v
}

fn p_scale(t: &Tower, a: &[Elem], c: &Elem) -> Vec<Elem> {
    let mut v: Vec<Elem> = a.iter().map(|x| e_mul(t, x, c)).collect();
    p_trim(&mut v);
    v
}

/// Division with remainder; the leading coefficient of `b` must be invertible.
fn p_divmod(t: &Tower, a: &[Elem], b: &[Elem]) -> Result<(Vec<Elem>, Vec<Elem>)> {
    assert!(!b.is_empty(), "division by zero polynomial");
    let lcinv = e_inv(t, b.last().unwrap())?;
    let mut r = a.to_vec();
    p_trim(&mut r);
    let db = b.len() - 1;
    if r.len() <= db {
        return Ok((vec![], r));
    }
    let mut q = vec![Elem::zero(); r.len() - db];
    while r.len() > db {
        let k = r.len() - 1 - db;
        let c = e_mul(t, r.last().unwrap(), &lcinv);
        for (j, bc) in b.iter().enumerate() {
            let p = e_mul(t, &c, bc);
            r[k + j] = e_sub(t, &r[k + j], &p);
        }
        q[k] = c;
        p_trim(&mut r);
        if r.len() > db && r.len() - 1 - db >= k {
            // leading term failed to cancel; cannot happen over a field
            unreachable!("leading term did not cancel in division");
        }
    }
    Ok((q, r))
}

fn e_inv(t: &Tower, a: &Elem) -> Result<Elem> {
    if a.is_zero() {
        return Err(Error::DivisionByZero);
    }
    match a {
        Elem::Q(r) => Ok(Elem::Q(r.recip())),
        Elem::Ext(l, v) => {
            // extended Euclid of v against the minimal polynomial of level l
            let mut m = t.levels[*l].minpoly.clone();
            m.push(Elem::one());
            let mut r0 = m;
            let mut r1 = v.clone();
            let mut s0: Vec<Elem> = vec![];
            let mut s1: Vec<Elem> = vec![Elem::one()];
            while !r1.is_empty() {
                let (q, r2) = p_divmod(t, &r0, &r1)?;
                let s2 = p_sub(t, &s0, &p_mul(t, &q, &s1));
                r0 = r1;
                r1 = r2;
                s0 = s1;
                s1 = s2;
            }
            if r0.len() != 1 {
                return Err(Error::TowerDefect(*l));
            }
            let ginv = e_inv(t, &r0[0])?;
            let mut s = p_scale(t, &s0, &ginv);
            reduce_mod(t, *l, &mut s);
            Ok(canon(*l, s))
        }
    }
}

// ---------------------------------------------------------------------------

/// One level of an extension tower.
#[derive(Debug, Clone, PartialEq)]
pub struct Level {
    pub name: String,
    /// Non-leading coefficients of the monic minimal polynomial; the degree of
    /// the extension is `minpoly.len()`.
    pub minpoly: Vec<Elem>,
    /// Set when the generator was adjoined as a primitive M-th root of unity.
    pub root_order: Option<u64>,
    /// Whether irreducibility of the minimal polynomial was actually verified
    /// (rational-root / discriminant tests, degree <= 3) rather than assumed.
    pub verified: bool,
}

impl Level {
    fn same_extension(&self, other: &Level) -> bool {
        self.name == other.name && self.minpoly == other.minpoly
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Tower {
    pub levels: Vec<Level>,
}

impl Tower {
    pub fn rationals() -> Arc<Tower> {
        Arc::new(Tower { levels: vec![] })
    }

    pub fn is_prefix_of(&self, other: &Tower) -> bool {
        self.levels.len() <= other.levels.len()
            && self
                .levels
                .iter()
                .zip(&other.levels)
                .all(|(a, b)| a.same_extension(b))
    }

    pub fn degree(&self) -> u64 {
        self.levels.iter().map(|l| l.minpoly.len() as u64).product()
    }

    /// Caveats to surface in output: levels whose irreducibility is assumed.
    pub fn caveats(&self) -> Vec<String> {
        self.levels
            .iter()
            .filter(|l| !l.verified)
            .map(|l| format!("irreducibility of the minimal polynomial of {} was not verified", l.name))
            .collect()
    }
}

/// Pick the finer of two compatible towers.
pub fn unify_towers(a: &Arc<Tower>, b: &Arc<Tower>) -> Result<Arc<Tower>> {
    if a.is_prefix_of(b) {
        Ok(b.clone())
    } else if b.is_prefix_of(a) {
        Ok(a.clone())
    } else {
        Err(Error::IncompatibleTowers)
    }
}

/// Exact field element: a canonically reduced expression in the generators of
/// its tower. Immutable and freely shareable.
#[derive(Debug, Clone)]
pub struct Coeff {
    tower: Arc<Tower>,
    elem: Elem,
}

impl Coeff {
    pub fn new(tower: Arc<Tower>, elem: Elem) -> Coeff {
        Coeff { tower, elem }
    }
    pub fn zero(tower: &Arc<Tower>) -> Coeff {
        Coeff::new(tower.clone(), Elem::zero())
    }
    pub fn one(tower: &Arc<Tower>) -> Coeff {
        Coeff::new(tower.clone(), Elem::one())
    }
    pub fn from_rat(tower: &Arc<Tower>, r: Rat) -> Coeff {
        Coeff::new(tower.clone(), Elem::Q(r))
    }
    pub fn from_int(tower: &Arc<Tower>, n: i64) -> Coeff {
        Coeff::from_rat(tower, rati(n))
    }
    pub fn tower(&self) -> &Arc<Tower> {
        &self.tower
    }
    pub fn elem(&self) -> &Elem {
        &self.elem
    }
    pub fn is_zero(&self) -> bool {
        self.elem.is_zero()
    }
    pub fn is_one(&self) -> bool {
        matches!(&self.elem, Elem::Q(r) if r.is_one())
    }
    pub fn as_rat(&self) -> Option<Rat> {
        match &self.elem {
            Elem::Q(r) => Some(r.clone()),
            _ => None,
        }
    }
    /// Re-root this value in a finer tower. Panics if the towers are not
    /// prefix-compatible; use only on towers grown from this one.
    pub fn lift(&self, tower: &Arc<Tower>) -> Coeff {
        assert!(
            self.tower.is_prefix_of(tower),
            "lift to an incompatible tower"
        );
        Coeff::new(tower.clone(), self.elem.clone())
    }

    fn unify<'a>(&'a self, other: &'a Coeff) -> (Arc<Tower>, &'a Elem, &'a Elem) {
        let t = unify_towers(&self.tower, &other.tower)
            .expect("coefficient towers are incompatible");
        (t, &self.elem, &other.elem)
    }

    pub fn add(&self, other: &Coeff) -> Coeff {
        let (t, a, b) = self.unify(other);
        let e = e_add(&t, a, b);
        Coeff::new(t, e)
    }
    pub fn sub(&self, other: &Coeff) -> Coeff {
        let (t, a, b) = self.unify(other);
        let e = e_sub(&t, a, b);
        Coeff::new(t, e)
    }
    pub fn mul(&self, other: &Coeff) -> Coeff {
        let (t, a, b) = self.unify(other);
        let e = e_mul(&t, a, b);
        Coeff::new(t, e)
    }
    pub fn neg(&self) -> Coeff {
        Coeff::new(self.tower.clone(), e_neg(&self.tower, &self.elem))
    }
    pub fn inv(&self) -> Result<Coeff> {
        let e = e_inv(&self.tower, &self.elem)?;
        Ok(Coeff::new(self.tower.clone(), e))
    }
    pub fn div(&self, other: &Coeff) -> Result<Coeff> {
        let (t, a, b) = self.unify(other);
        let binv = e_inv(&t, b)?;
        let e = e_mul(&t, a, &binv);
        Ok(Coeff::new(t, e))
    }
    pub fn pow_u(&self, mut n: u64) -> Coeff {
        let mut base = self.clone();
        let mut acc = Coeff::one(&self.tower);
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(&base);
            }
            n >>= 1;
            if n > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }
    pub fn pow_i(&self, n: i64) -> Result<Coeff> {
        if n >= 0 {
            Ok(self.pow_u(n as u64))
        } else {
            Ok(self.inv()?.pow_u(n.unsigned_abs()))
        }
    }
    pub fn scale(&self, r: &Rat) -> Coeff {
        self.mul(&Coeff::from_rat(&self.tower, r.clone()))
    }

    /// Render as an expression in the generator names, parseable back by the
    /// card reader: rationals as `p/q`, products as `c*name^k`.
    pub fn render(&self) -> String {
        render_elem(&self.tower, &self.elem)
    }
}

impl PartialEq for Coeff {
    fn eq(&self, other: &Self) -> bool {
        if unify_towers(&self.tower, &other.tower).is_err() {
            return false;
        }
        self.elem == other.elem
    }
}
impl Eq for Coeff {}

fn render_elem(t: &Tower, e: &Elem) -> String {
    match e {
        Elem::Q(r) => format!("{r}"),
        Elem::Ext(l, v) => {
            let name = &t.levels[*l].name;
            let mut parts = vec![];
            for (k, c) in v.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let cs = render_elem(t, c);
                let cs = if matches!(c, Elem::Q(_)) && !cs.starts_with('-') {
                    cs
                } else {
                    format!("({cs})")
                };
                let term = match k {
                    0 => cs,
                    1 => format!("{cs}*{name}"),
                    _ => format!("{cs}*{name}^{k}"),
                };
                parts.push(term);
            }
            parts.join(" + ")
        }
    }
}

// ------------------------- tower construction ------------------------------

fn rational_vec(coeffs: &[Coeff]) -> Option<Vec<Rat>> {
    coeffs.iter().map(|c| c.as_rat()).collect()
}

fn is_rat_square(r: &Rat) -> bool {
    if r.is_negative() {
        return false;
    }
    let n = r.numer();
    let d = r.denom();
    let sn = n.sqrt();
    let sd = d.sqrt();
    &(&sn * &sn) == n && &(&sd * &sd) == d
}

/// Rational roots of a monic polynomial with rational coefficients
/// (non-leading coefficients given; implicit leading 1).
/// Rational roots of a dense rational-coefficient polynomial c[i]·z^i.
pub fn rational_roots_dense(c: &[Rat]) -> Vec<Rat> {
    let mut c = c.to_vec();
    while c.last().is_some_and(|x| x.is_zero()) {
        c.pop();
    }
    if c.len() < 2 {
        return vec![];
    }
    let lead = c.last().unwrap().clone();
    let nl: Vec<Rat> = c[..c.len() - 1].iter().map(|x| x / &lead).collect();
    rational_roots_monic(&nl)
}

fn rational_roots_monic(coeffs: &[Rat]) -> Vec<Rat> {
    // clear denominators: p(x) = x^d + c_{d-1}x^{d-1}+...; substitute x = z/m
    // to get an integer monic polynomial, then integer divisors of the constant.
    let d = coeffs.len();
    let mut m = BigInt::one();
    for c in coeffs {
        m = num::integer::lcm(m, c.denom().clone());
    }
    // q(z) = m^d p(z/m) is monic integer with coefficients a_k = c_k m^{d-k}
    let ints: Vec<BigInt> = coeffs
        .iter()
        .enumerate()
        .map(|(k, c)| {
            let scaled = c * Rat::from(m.pow((d - k) as u32));
            assert!(scaled.is_integer());
            scaled.to_integer()
        })
        .collect();
    let eval = |z: &BigInt| -> BigInt {
        let mut acc = BigInt::one();
        let mut val = BigInt::zero();
        // z^d + sum a_k z^k
        for a in &ints {
            val += a * &acc;
            acc *= z;
        }
        val + acc
    };
    let a0 = ints[0].clone();
    let mut roots = vec![];
    if a0.is_zero() {
        roots.push(Rat::zero());
    } else {
        let mut divs = vec![];
        let abs = a0.abs();
        let mut k = BigInt::one();
        while &k * &k <= abs {
            if (&abs % &k).is_zero() {
                divs.push(k.clone());
                divs.push(&abs / &k);
            }
            k += 1;
        }
        for dv in divs {
            for cand in [dv.clone(), -dv] {
                if eval(&cand).is_zero() {
                    let r = Rat::new(cand, m.clone());
                    if !roots.contains(&r) {
                        roots.push(r);
                    }
                }
            }
        }
    }
    roots
}

/// Adjoin a root of a monic polynomial to the tower. Errors with
/// `ReducibleMinPoly` when a rational (or otherwise detected) root exists:
/// the caller must split the polynomial instead of extending.
pub fn adjoin_root(tower: &Arc<Tower>, poly: &[Coeff]) -> Result<(Arc<Tower>, Coeff)> {
    let mut coeffs: Vec<Coeff> = poly.iter().map(|c| c.lift(tower)).collect();
    while coeffs.last().is_some_and(|c| c.is_zero()) {
        coeffs.pop();
    }
    if coeffs.len() < 2 {
        return Err(Error::Parse("minimal polynomial must be nonconstant".into()));
    }
    let lead = coeffs.last().unwrap().clone();
    let leadinv = lead.inv()?;
    let monic: Vec<Coeff> = coeffs[..coeffs.len() - 1]
        .iter()
        .map(|c| c.mul(&leadinv))
        .collect();
    let deg = monic.len();
    if deg == 1 {
        return Err(Error::ReducibleMinPoly);
    }
    if monic[0].is_zero() {
        return Err(Error::ReducibleMinPoly); // Z divides
    }
    let mut verified = false;
    if let Some(rats) = rational_vec(&monic) {
        if !rational_roots_monic(&rats).is_empty() {
            return Err(Error::ReducibleMinPoly);
        }
        if deg == 2 {
            let disc = &rats[1] * &rats[1] - rati(4) * &rats[0];
            if is_rat_square(&disc) {
                return Err(Error::ReducibleMinPoly);
            }
            verified = true;
        } else if deg == 3 {
            // cubic with no rational root is irreducible over Q
            verified = true;
        }
        // rational irreducibility does not rule out factorisation over a
        // nontrivial tower below; keep the flag but record a caveat there
        if !tower.levels.is_empty() && deg <= 3 {
            verified = tower.levels.is_empty();
        }
    }
    let idx = tower.levels.len();
    let mut levels = tower.levels.clone();
    levels.push(Level {
        name: format!("r{idx}"),
        minpoly: monic.iter().map(|c| c.elem.clone()).collect(),
        root_order: None,
        verified,
    });
    let t = Arc::new(Tower { levels });
    let gen = Coeff::new(t.clone(), Elem::Ext(idx, vec![Elem::zero(), Elem::one()]));
    Ok((t, gen))
}

/// Dense cyclotomic polynomial Phi_m over the integers.
fn cyclotomic(m: u64) -> Vec<Rat> {
    // x^m - 1 divided by the product of Phi_d over proper divisors d of m.
    fn divide(num: &mut Vec<Rat>, den: &[Rat]) {
        // exact long division, both monic up to leading coefficient of den
        let mut q = vec![Rat::zero(); num.len() - den.len() + 1];
        let lead = den.last().unwrap().clone();
        while num.len() >= den.len() {
            let k = num.len() - den.len();
            let c = num.last().unwrap() / &lead;
            for (j, d) in den.iter().enumerate() {
                let sub = &c * d;
                num[k + j] -= sub;
            }
            while num.last().is_some_and(|x| x.is_zero()) {
                num.pop();
            }
            q[k] = c;
        }
        *num = q;
    }
    let mut p = vec![Rat::zero(); (m + 1) as usize];
    p[0] = rati(-1);
    p[m as usize] = rati(1);
    for d in 1..m {
        if m % d == 0 {
            let phi_d = cyclotomic(d);
            divide(&mut p, &phi_d);
        }
    }
    p
}

/// Obtain a root of unity of exact multiplicative order `m`, adjoining the
/// m-th cyclotomic extension when the tower does not already provide one.
pub fn root_of_unity(tower: &Arc<Tower>, m: u64) -> Result<(Arc<Tower>, Coeff)> {
    assert!(m >= 1);
    if m == 1 {
        return Ok((tower.clone(), Coeff::one(tower)));
    }
    if m == 2 {
        return Ok((tower.clone(), Coeff::from_int(tower, -1)));
    }
    for (i, lvl) in tower.levels.iter().enumerate() {
        if let Some(order) = lvl.root_order {
            if order % m == 0 {
                let gen = Coeff::new(
                    tower.clone(),
                    Elem::Ext(i, vec![Elem::zero(), Elem::one()]),
                );
                return Ok((tower.clone(), gen.pow_u(order / m)));
            }
        }
    }
    let phi = cyclotomic(m);
    let deg = phi.len() - 1;
    let idx = tower.levels.len();
    let mut levels = tower.levels.clone();
    levels.push(Level {
        name: format!("zeta{m}"),
        minpoly: phi[..deg].iter().map(|r| Elem::Q(r.clone())).collect(),
        root_order: Some(m),
        // cyclotomics are irreducible over Q; over a nontrivial tower this is
        // assumed and the caveat is surfaced
        verified: tower.levels.is_empty(),
    });
    let t = Arc::new(Tower { levels });
    let eps = Coeff::new(t.clone(), Elem::Ext(idx, vec![Elem::zero(), Elem::one()]));
    // certify the exact order by powering
    if !eps.pow_u(m).is_one() {
        return Err(Error::TowerDefect(idx));
    }
    let mut p = 2;
    let mut mm = m;
    while mm > 1 {
        if mm % p == 0 {
            if eps.pow_u(m / p).is_one() {
                return Err(Error::TowerDefect(idx));
            }
            while mm % p == 0 {
                mm /= p;
            }
        }
        p += 1;
    }
    Ok((t, eps))
}
