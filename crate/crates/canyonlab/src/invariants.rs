//! Second-level invariants (H, Δ) of canyon pairs, the H_min = ω + δ
//! identity, assembly of the identity card, and card comparison up to the
//! one-parameter coefficient action of a bi-Lipschitz change of variable.

use crate::arith::{parse_rat, rati, Coeff, ExtRat, Rat};
use crate::canyon::{build_canyons, canyon_contact, Canyon, CanyonAnalysis, PolarArc};
use crate::error::{Error, Result};
use crate::poly::{parse_poly, BivarPoly, XPoly};
use crate::polygon::y_intercept;
use crate::series::PuiseuxSeries;
use num::{One, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

// ---------------------------------------------------------------------------
// Second-level invariant of a pair of polar arcs.

#[derive(Debug, Clone)]
pub struct SecondLevel {
    pub delta: Rat,
    pub h: Rat,
    /// Order of the difference of normalized expansions; infinite when the
    /// expansions agree to the certified truncation (e.g. germs odd in x
    /// pairing γ with −γ).
    pub h_invariant: ExtRat,
    pub delta_coeff: Option<Coeff>,
    /// H < h + δ - 1: the gate for bi-Lipschitz invariance of Δ.
    pub applicable: bool,
}

/// Normalized expansion (1/a) f(γ(y), y).
fn normalized_expansion(f: &XPoly, gamma: &PuiseuxSeries) -> Result<(Rat, Coeff, PuiseuxSeries)> {
    let s = f.subst(gamma);
    let h = match s.ord_certified()? {
        ExtRat::Fin(h) => h,
        ExtRat::Inf => return Err(Error::SameArc),
    };
    let a = s.leading().unwrap().1.clone();
    Ok((h, a.clone(), s.scale(&a.inv()?)))
}

/// (δ, H, ã, ã′, Δ) for two polar arcs with equal h and ord(γ-γ′) = δ.
pub fn second_level(
    f: &BivarPoly,
    gamma: &PuiseuxSeries,
    gamma_prime: &PuiseuxSeries,
    delta: &Rat,
) -> Result<SecondLevel> {
    let xp = XPoly::from_bivar(f);
    let (h, _, n1) = normalized_expansion(&xp, gamma)?;
    let (h2, _, n2) = normalized_expansion(&xp, gamma_prime)?;
    if h != h2 {
        return Err(Error::UnequalOrders);
    }
    let d = n1.sub(&n2);
    // an empty difference below a finite truncation is recorded as infinite
    // order: the stabilization driver re-checks it at doubled truncation
    let hh = match d.ord_certified() {
        Ok(o) => o,
        Err(Error::TruncationTooLow(_)) => ExtRat::Inf,
        Err(e) => return Err(e),
    };
    let (delta_coeff, applicable) = match &hh {
        ExtRat::Fin(v) => {
            let dc = n1.coeff_at(v)?.sub(&n2.coeff_at(v)?);
            let applicable = *v < &h + delta - rati(1);
            (Some(dc), applicable)
        }
        ExtRat::Inf => (None, false),
    };
    Ok(SecondLevel {
        delta: delta.clone(),
        h,
        h_invariant: hh,
        delta_coeff,
        applicable,
    })
}

/// Stability harness: perturbing a polar by u·y^q with q > δ_top must leave
/// (h, a) unchanged. Returns the equality verdict.
pub fn h_a_stability_check(
    f: &BivarPoly,
    p: &PolarArc,
    q: &Rat,
    u: &Rat,
) -> Result<bool> {
    if q <= &p.delta_top {
        return Err(Error::Parse("perturbation order must exceed delta_top".into()));
    }
    let tower = p.arc.rep.tower().clone();
    let pert = p.arc.rep.add(&PuiseuxSeries::monomial(
        Coeff::from_rat(&tower, u.clone()),
        q.clone(),
    ));
    let s = XPoly::from_bivar(&f.lift(&tower)).subst(&pert);
    let h2 = s.ord_certified()?;
    if h2 != ExtRat::Fin(p.h.clone()) {
        return Ok(false);
    }
    Ok(*s.leading().unwrap().1 == p.a.lift(s.tower()))
}

/// Minimum of H over all parametrization pairs (α, α′) of two canyons with
/// ord(α - α′) = δ; also returns the minimizing record.
pub fn h_min(
    f: &BivarPoly,
    an: &CanyonAnalysis,
    ci: usize,
    cj: usize,
) -> Result<(ExtRat, SecondLevel)> {
    let (a, b) = (&an.canyons[ci], &an.canyons[cj]);
    if a.h != b.h {
        return Err(Error::UnequalOrders);
    }
    let mut tower = an.tower.clone();
    let delta = canyon_contact(a, b, &an.polars, &mut tower)?;
    let mut members_a = vec![];
    for &i in &a.members {
        members_a.extend(an.polars[i].arc.rep.conjugates(&mut tower)?);
    }
    let mut members_b = vec![];
    for &j in &b.members {
        members_b.extend(an.polars[j].arc.rep.conjugates(&mut tower)?);
    }
    let fl = f.lift(&tower);
    let mut best: Option<(ExtRat, SecondLevel)> = None;
    for alpha in &members_a {
        for beta in &members_b {
            let o = alpha.lift(&tower).sub(&beta.lift(&tower)).ord();
            if o != ExtRat::Fin(delta.clone()) {
                continue;
            }
            let rec = second_level(&fl, &alpha.lift(&tower), &beta.lift(&tower), &delta)?;
            match &best {
                Some((h, _)) if h <= &rec.h_invariant => {}
                _ => best = Some((rec.h_invariant.clone(), rec)),
            }
        }
    }
    best.ok_or_else(|| {
        Error::TruncationTooLow("no pair realizes the canyon contact".into())
    })
}

// ---------------------------------------------------------------------------
// ω-consistency: intermediate edges of the polygon of f_x along γ.

#[derive(Debug, Clone)]
pub struct OmegaRecord {
    pub canyon: usize,
    pub edge_delta: Rat,
    pub omega: Rat,
    pub h_min: ExtRat,
    pub pass: bool,
}

/// For every compact edge of the polygon of f_x along a member of canyon
/// `ci` with δ_top < co-slope < d: verify a counterpart canyon at that
/// contact exists, and H_min = ω + δ < h + δ - 1.
pub fn omega_consistency(
    f: &BivarPoly,
    an: &CanyonAnalysis,
    ci: usize,
) -> Result<Vec<OmegaRecord>> {
    let c = &an.canyons[ci];
    let p0 = &an.polars[c.members[0]];
    let hull = crate::polygon::lower_hull(&p0.fx_dots);
    let mut out = vec![];
    for e in &hull.edges {
        if e.co_slope <= c.delta_top || e.co_slope >= c.d {
            continue;
        }
        let delta = e.co_slope.clone();
        // find a canyon meeting this one exactly at contact δ
        let mut tower = an.tower.clone();
        let mut counterpart = None;
        for (cj, other) in an.canyons.iter().enumerate() {
            if cj == ci || other.h != c.h {
                continue;
            }
            let k = canyon_contact(c, other, &an.polars, &mut tower)?;
            if k == delta {
                counterpart = Some(cj);
                break;
            }
        }
        let cj = counterpart.ok_or_else(|| {
            Error::MissingCounterpartPolar(format!(
                "no canyon at contact {delta} for the co-slope-{delta} edge"
            ))
        })?;
        let omega = y_intercept(&p0.fx_dots, &delta);
        let (hm, _) = h_min(f, an, ci, cj)?;
        let bound = &c.h + &delta - rati(1);
        let pass =
            hm == ExtRat::Fin(&omega + &delta) && &omega + &delta < bound;
        out.push(OmegaRecord {
            canyon: ci,
            edge_delta: delta,
            omega,
            h_min: hm,
            pass,
        });
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// The identity card: serializable invariant bundle.

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CardCoeff {
    /// Human-readable rendering over the card's tower.
    pub repr: String,
    /// Exact value "p/q" when the coefficient is rational.
    pub rational: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CardArc {
    pub series: String,
    pub size: u64,
    pub exact: bool,
    pub mult: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CardCanyon {
    pub degree: String,
    pub degree_one: bool,
    pub h: String,
    pub a: CardCoeff,
    pub tangent: CardCoeff,
    pub delta_top: String,
    /// Vertices (m, q) of the augmented polygon.
    pub polygon: Vec<(u32, String)>,
    /// Dots on the top edge E_con, endpoints included.
    pub e_con: Vec<(u32, String)>,
    pub mu: u64,
    pub members: Vec<CardArc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CardCluster {
    pub tangent: CardCoeff,
    pub degree: String,
    pub h: String,
    pub canyons: Vec<usize>,
    pub contacts: Vec<(usize, usize, String)>,
    pub subclusters: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CardPair {
    pub canyons: (usize, usize),
    pub applicable: bool,
    /// Present when both canyons share h.
    pub delta: Option<String>,
    pub h: Option<String>,
    pub h_invariant: Option<String>,
    pub h_min: Option<String>,
    pub delta_coeff: Option<CardCoeff>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CardOmega {
    pub canyon: usize,
    pub edge_delta: String,
    pub omega: String,
    pub h_min: String,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityCard {
    pub version: u32,
    pub input: String,
    pub params: BTreeMap<String, String>,
    /// Applied shear y -> y + λx making the germ mini-regular.
    pub shear: i64,
    pub multiplicity: u32,
    pub trunc: String,
    pub tower_caveats: Vec<String>,
    pub canyons: Vec<CardCanyon>,
    pub clusters: Vec<CardCluster>,
    pub pairs: Vec<CardPair>,
    pub omega_checks: Vec<CardOmega>,
}

pub const CARD_VERSION: u32 = 1;

fn ext_str(e: &ExtRat) -> String {
    match e {
        ExtRat::Fin(v) => v.to_string(),
        ExtRat::Inf => "inf".to_string(),
    }
}

fn card_coeff(c: &Coeff) -> CardCoeff {
    CardCoeff {
        repr: c.render(),
        rational: c.as_rat().map(|r| r.to_string()),
    }
}

fn dots_str(v: &[crate::polygon::Dot]) -> Vec<(u32, String)> {
    v.iter().map(|d| (d.m, d.q.to_string())).collect()
}

/// Full analysis of a mini-regular germ at a fixed truncation.
pub struct FullAnalysis {
    pub analysis: CanyonAnalysis,
    pub pairs: Vec<(usize, usize, Option<(ExtRat, SecondLevel)>)>,
    pub omega: Vec<OmegaRecord>,
}

pub fn full_analysis(f: &BivarPoly, trunc: &Rat) -> Result<FullAnalysis> {
    let an = build_canyons(f, trunc)?;
    let mut pairs = vec![];
    for i in 0..an.canyons.len() {
        for j in i + 1..an.canyons.len() {
            if an.canyons[i].h == an.canyons[j].h {
                pairs.push((i, j, Some(h_min(f, &an, i, j)?)));
            } else {
                pairs.push((i, j, None));
            }
        }
    }
    let mut omega = vec![];
    for i in 0..an.canyons.len() {
        if !an.canyons[i].degree_one {
            omega.extend(omega_consistency(f, &an, i)?);
        }
    }
    Ok(FullAnalysis { analysis: an, pairs, omega })
}

/// Deterministic canyon ordering for card output.
fn canyon_sort_key(c: &Canyon, polars: &[PolarArc]) -> (Rat, Rat, Rat, u64, String) {
    (
        c.d.clone(),
        c.h.clone(),
        c.delta_top.clone(),
        c.mu,
        polars[c.members[0]].arc.rep.render(),
    )
}

pub fn make_card(
    input: &str,
    params: &BTreeMap<String, Rat>,
    shear: i64,
    f: &BivarPoly,
    fa: &FullAnalysis,
    trunc: &Rat,
) -> IdentityCard {
    let an = &fa.analysis;
    let mut order: Vec<usize> = (0..an.canyons.len()).collect();
    order.sort_by_key(|&i| canyon_sort_key(&an.canyons[i], &an.polars));
    let rank: BTreeMap<usize, usize> =
        order.iter().enumerate().map(|(r, &i)| (i, r)).collect();

    let canyons = order
        .iter()
        .map(|&i| {
            let c = &an.canyons[i];
            CardCanyon {
                degree: c.d.to_string(),
                degree_one: c.degree_one,
                h: c.h.to_string(),
                a: card_coeff(&c.a),
                tangent: card_coeff(&c.tangent),
                delta_top: c.delta_top.to_string(),
                polygon: dots_str(&c.polygon.hull.vertices),
                e_con: c
                    .polygon
                    .e_con()
                    .map(|e| dots_str(&e.on_edge))
                    .unwrap_or_default(),
                mu: c.mu,
                members: c
                    .members
                    .iter()
                    .map(|&p| CardArc {
                        series: an.polars[p].arc.rep.render(),
                        size: an.polars[p].arc.size,
                        exact: an.polars[p].arc.exact,
                        mult: an.polars[p].mult,
                    })
                    .collect(),
            }
        })
        .collect();

    let mut clusters: Vec<CardCluster> = an
        .clusters
        .iter()
        .map(|cl| {
            let mut ids: Vec<usize> = cl.canyons.iter().map(|&i| rank[&i]).collect();
            ids.sort();
            let mut contacts: Vec<(usize, usize, String)> = cl
                .contacts
                .iter()
                .map(|(i, j, k)| {
                    let (a, b) = (rank[i].min(rank[j]), rank[i].max(rank[j]));
                    (a, b, k.to_string())
                })
                .collect();
            contacts.sort();
            let mut subclusters: Vec<Vec<usize>> = cl
                .subclusters
                .iter()
                .map(|s| {
                    let mut v: Vec<usize> = s.iter().map(|&i| rank[&i]).collect();
                    v.sort();
                    v
                })
                .collect();
            subclusters.sort();
            CardCluster {
                tangent: card_coeff(&cl.tangent),
                degree: cl.d.to_string(),
                h: cl.h.to_string(),
                canyons: ids,
                contacts,
                subclusters,
            }
        })
        .collect();
    clusters.sort_by_key(|c| (c.degree.clone(), c.h.clone(), c.canyons.clone()));

    let mut pairs: Vec<CardPair> = fa
        .pairs
        .iter()
        .map(|(i, j, rec)| {
            let (a, b) = (rank[i].min(rank[j]), rank[i].max(rank[j]));
            match rec {
                None => CardPair {
                    canyons: (a, b),
                    applicable: false,
                    delta: None,
                    h: None,
                    h_invariant: None,
                    h_min: None,
                    delta_coeff: None,
                },
                Some((hm, sl)) => {
                    // orient Δ by the card ordering of the pair
                    let dc = sl.delta_coeff.as_ref().map(|d| {
                        if rank[i] <= rank[j] {
                            d.clone()
                        } else {
                            d.neg()
                        }
                    });
                    CardPair {
                        canyons: (a, b),
                        applicable: sl.applicable,
                        delta: Some(sl.delta.to_string()),
                        h: Some(sl.h.to_string()),
                        h_invariant: Some(ext_str(&sl.h_invariant)),
                        h_min: Some(ext_str(hm)),
                        delta_coeff: dc.as_ref().map(card_coeff),
                    }
                }
            }
        })
        .collect();
    pairs.sort_by_key(|p| p.canyons);

    let mut omega_checks: Vec<CardOmega> = fa
        .omega
        .iter()
        .map(|o| CardOmega {
            canyon: rank[&o.canyon],
            edge_delta: o.edge_delta.to_string(),
            omega: o.omega.to_string(),
            h_min: ext_str(&o.h_min),
            pass: o.pass,
        })
        .collect();
    omega_checks.sort_by_key(|o| (o.canyon, o.edge_delta.clone()));

    IdentityCard {
        version: CARD_VERSION,
        input: input.to_string(),
        params: params
            .iter()
            .map(|(k, v)| (k.clone(), v.to_string()))
            .collect(),
        shear,
        multiplicity: f.mini_regular_order().unwrap_or(0),
        trunc: trunc.to_string(),
        tower_caveats: an.tower.caveats(),
        canyons,
        clusters,
        pairs,
        omega_checks,
    }
}

// ---------------------------------------------------------------------------
// Analysis driver: shear repair + truncation doubling with stabilization.

pub struct AnalyzeConfig {
    pub trunc_override: Option<Rat>,
    /// Truncation doubling rounds before giving up.
    pub cap: u32,
}

impl Default for AnalyzeConfig {
    fn default() -> Self {
        AnalyzeConfig { trunc_override: None, cap: 8 }
    }
}

pub struct AnalysisOutput {
    pub card: IdentityCard,
    pub full: FullAnalysis,
    pub germ: BivarPoly,
    pub shear: i64,
    pub trunc: Rat,
}

/// Card content without truncation-dependent fields (the truncation itself
/// and the rendered member series, which gain terms as truncation grows):
/// the stabilization target.
fn card_fingerprint(card: &IdentityCard) -> String {
    let mut v = serde_json::to_value(card).unwrap();
    let obj = v.as_object_mut().unwrap();
    obj.remove("trunc");
    for c in obj["canyons"].as_array_mut().unwrap() {
        for m in c["members"].as_array_mut().unwrap() {
            m.as_object_mut().unwrap().remove("series");
        }
    }
    v.to_string()
}

pub fn analyze(
    input: &str,
    params: &BTreeMap<String, Rat>,
    config: &AnalyzeConfig,
) -> Result<AnalysisOutput> {
    let parsed = parse_poly(input, params)?;
    if !parsed.vanishes_at_origin() || parsed.is_zero() {
        return Err(Error::Parse("input must be a germ vanishing at the origin".into()));
    }
    // mini-regularity repair: smallest shear y -> y + λx with λ >= 0
    let mut shear = 0i64;
    let f = loop {
        let cand = if shear == 0 { parsed.clone() } else { parsed.shear_y(shear) };
        match cand.mini_regular_order() {
            Ok(_) => break cand,
            Err(Error::NotMiniRegular) if shear < 64 => shear += 1,
            Err(e) => return Err(e),
        }
    };

    let max_j = f.terms().keys().map(|(_, j)| *j).max().unwrap_or(1) as i64;
    let seed = config
        .trunc_override
        .clone()
        .unwrap_or_else(|| rati(2 * (1 + max_j)));
    let mut t = seed;
    let mut last_err = None;
    for _ in 0..config.cap {
        let run = |tr: &Rat| -> Result<(IdentityCard, FullAnalysis)> {
            let fa = full_analysis(&f, tr)?;
            let card = make_card(input, params, shear, &f, &fa, tr);
            Ok((card, fa))
        };
        match (run(&t), run(&(&t * rati(2)))) {
            (Ok((c1, _)), Ok((c2, fa2))) => {
                if card_fingerprint(&c1) == card_fingerprint(&c2) {
                    return Ok(AnalysisOutput {
                        card: c1,
                        full: fa2,
                        germ: f,
                        shear,
                        trunc: t,
                    });
                }
                last_err = Some(Error::TruncationTooLow(
                    "invariants not stable under truncation doubling".into(),
                ));
            }
            (Err(e), _) | (_, Err(e)) => match e {
                Error::TruncationTooLow(_) => last_err = Some(e),
                other => return Err(other),
            },
        }
        t = &t * rati(2);
    }
    Err(last_err.unwrap_or_else(|| Error::TruncationTooLow("cap exhausted".into())))
}

// ---------------------------------------------------------------------------
// Card comparison.

#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    Distinguished(Vec<String>),
    Inconclusive(Option<String>),
}

/// Discrete (c-action-independent) fingerprint of a canyon.
fn canyon_fingerprint(c: &CardCanyon) -> String {
    serde_json::json!({
        "degree": c.degree,
        "degree_one": c.degree_one,
        "h": c.h,
        "delta_top": c.delta_top,
        "polygon": c.polygon,
        "e_con": c.e_con,
        "mu": c.mu,
        "members": c.members.iter().map(|m| (m.size, m.mult)).collect::<Vec<_>>(),
    })
    .to_string()
}

fn pair_fingerprint(p: &CardPair) -> String {
    serde_json::json!({
        "applicable": p.applicable,
        "delta": p.delta,
        "h": p.h,
        "h_invariant": p.h_invariant,
        "h_min": p.h_min,
    })
    .to_string()
}

/// Tangent partition: groups of canyon ids sharing a tangent coefficient.
fn tangent_groups(card: &IdentityCard) -> Vec<Vec<usize>> {
    let mut groups: Vec<(String, Vec<usize>)> = vec![];
    for (i, c) in card.canyons.iter().enumerate() {
        match groups.iter_mut().find(|(t, _)| t == &c.tangent.repr) {
            Some((_, v)) => v.push(i),
            None => groups.push((c.tangent.repr.clone(), vec![i])),
        }
    }
    groups.into_iter().map(|(_, v)| v).collect()
}

fn perms(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = vec![];
    for p in perms(n - 1) {
        for i in 0..n {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

/// One monomial constraint c^k = λ on the comparison parameter.
fn add_constraint(sys: &mut Vec<(i64, Rat)>, k: Rat, lambda: Rat) {
    // clear the rational exponent: c^(p/q) = λ implies c^p = λ^q
    let p: i64 = k.numer().try_into().expect("exponent overflow");
    let q: i64 = k.denom().try_into().expect("exponent overflow");
    let lam = rat_pow(&lambda, q);
    sys.push((p, lam));
}

fn rat_pow(r: &Rat, e: i64) -> Rat {
    let mut acc = Rat::one();
    let b = if e < 0 { r.recip() } else { r.clone() };
    for _ in 0..e.abs() {
        acc *= &b;
    }
    acc
}

/// Exact unsatisfiability of {c^{k_i} = λ_i} over the rationals (and any
/// field containing them): c^0 = λ ≠ 1, or two constraints whose
/// cross-powers force different values. Returns the clashing pair.
fn system_unsat(sys: &[(i64, Rat)]) -> Option<String> {
    for (k, l) in sys {
        if *k == 0 && !l.is_one() {
            return Some(format!("c^0 = {l} is impossible"));
        }
        if l.is_zero() {
            // c is invertible; a_C and Δ are nonzero
            return Some(format!("c^{k} = 0 is impossible"));
        }
    }
    for (i, (k1, l1)) in sys.iter().enumerate() {
        for (k2, l2) in &sys[i + 1..] {
            if *k1 == 0 || *k2 == 0 {
                continue;
            }
            // c^{k1 k2} = l1^{k2} = l2^{k1}
            if rat_pow(l1, *k2) != rat_pow(l2, *k1) {
                return Some(format!(
                    "c^{k1} = {l1} and c^{k2} = {l2} cannot hold simultaneously"
                ));
            }
        }
    }
    None
}

pub fn compare_cards(a: &IdentityCard, b: &IdentityCard) -> Verdict {
    let mut witnesses = vec![];

    // 1. global discrete data
    let mut fa: Vec<String> = a.canyons.iter().map(canyon_fingerprint).collect();
    let mut fb: Vec<String> = b.canyons.iter().map(canyon_fingerprint).collect();
    fa.sort();
    fb.sort();
    if fa != fb {
        witnesses.push("canyon invariants (degree/h/polygon/mu) differ".into());
        return Verdict::Distinguished(witnesses);
    }
    let shape = |card: &IdentityCard| -> Vec<usize> {
        let mut v: Vec<usize> = tangent_groups(card).iter().map(|g| g.len()).collect();
        v.sort();
        v
    };
    if shape(a) != shape(b) {
        witnesses.push("tangent-line grouping of canyons differs".into());
        return Verdict::Distinguished(witnesses);
    }
    if a.omega_checks.len() != b.omega_checks.len() {
        witnesses.push("intermediate-edge (ω) records differ".into());
        return Verdict::Distinguished(witnesses);
    }

    // 2. enumerate fingerprint-preserving bijections; a bijection must also
    //    match pair data and tangent grouping; constraints use one c per
    //    tangent line (conservative scope)
    let n = a.canyons.len();
    let fp_a: Vec<String> = a.canyons.iter().map(canyon_fingerprint).collect();
    let fp_b: Vec<String> = b.canyons.iter().map(canyon_fingerprint).collect();
    let ga = tangent_groups(a);
    let gb = tangent_groups(b);
    let group_of_b: BTreeMap<usize, usize> = gb
        .iter()
        .enumerate()
        .flat_map(|(gi, g)| g.iter().map(move |&i| (i, gi)))
        .collect();
    let pair_map_b: BTreeMap<(usize, usize), String> = b
        .pairs
        .iter()
        .map(|p| (p.canyons, pair_fingerprint(p)))
        .collect();

    let mut any_satisfiable = false;
    let mut any_valid_bijection = false;
    let mut skipped_nonrational = false;
    let mut last_clash: Option<String> = None;

    'perm: for perm in perms(n) {
        // canyon i of a maps to perm[i] of b
        for i in 0..n {
            if fp_a[i] != fp_b[perm[i]] {
                continue 'perm;
            }
        }
        // tangent partition must be carried to tangent partition
        for g in &ga {
            let target = group_of_b[&perm[g[0]]];
            if g.iter().any(|&i| group_of_b[&perm[i]] != target)
                || gb[target].len() != g.len()
            {
                continue 'perm;
            }
        }
        // pair records must agree discretely
        for p in &a.pairs {
            let (i, j) = p.canyons;
            let key = (perm[i].min(perm[j]), perm[i].max(perm[j]));
            match pair_map_b.get(&key) {
                Some(fp) if *fp == pair_fingerprint(p) => {}
                _ => continue 'perm,
            }
        }
        any_valid_bijection = true;

        // 3. coefficient constraints per tangent group
        let mut ok = true;
        for g in &ga {
            let mut sys: Vec<(i64, Rat)> = vec![];
            for &i in g {
                let ca = &a.canyons[i];
                let cb = &b.canyons[perm[i]];
                // a_C(b) = c^{-h} a_C(a): c^h = a_C(a)/a_C(b)
                match (&ca.a.rational, &cb.a.rational) {
                    (Some(x), Some(y)) => {
                        let (x, y) = (parse_rat(x).unwrap(), parse_rat(y).unwrap());
                        if x.is_zero() || y.is_zero() {
                            skipped_nonrational = true;
                        } else {
                            add_constraint(
                                &mut sys,
                                parse_rat(&ca.h).unwrap(),
                                x / y,
                            );
                        }
                    }
                    _ => skipped_nonrational = true,
                }
            }
            for p in &a.pairs {
                let (i, j) = p.canyons;
                if !g.contains(&i) || !g.contains(&j) || !p.applicable {
                    continue;
                }
                let key = (perm[i].min(perm[j]), perm[i].max(perm[j]));
                let q = b.pairs.iter().find(|x| x.canyons == key).unwrap();
                // Δ(b) = c^{h-H} Δ(a): c^{h-H} = Δ(b)/Δ(a)
                let (da, db) = (
                    p.delta_coeff.as_ref().and_then(|c| c.rational.as_ref()),
                    q.delta_coeff.as_ref().and_then(|c| c.rational.as_ref()),
                );
                match (da, db) {
                    (Some(x), Some(y)) => {
                        let (x, y) = (parse_rat(x).unwrap(), parse_rat(y).unwrap());
                        if x.is_zero() != y.is_zero() {
                            ok = false; // Δ = 0 is c-invariant
                            continue;
                        }
                        if x.is_zero() {
                            continue;
                        }
                        let h = parse_rat(p.h.as_ref().unwrap()).unwrap();
                        let hh = parse_rat(p.h_invariant.as_ref().unwrap()).unwrap();
                        add_constraint(&mut sys, h - hh, y / x);
                    }
                    _ => skipped_nonrational = true,
                }
            }
            if let Some(clash) = system_unsat(&sys) {
                ok = false;
                last_clash = Some(clash);
            }
        }
        if ok {
            any_satisfiable = true;
            break;
        }
    }

    if !any_valid_bijection {
        witnesses.push("no canyon correspondence preserves pair invariants".into());
        return Verdict::Distinguished(witnesses);
    }
    if any_satisfiable {
        return Verdict::Inconclusive(None);
    }
    if skipped_nonrational {
        return Verdict::Inconclusive(Some(
            "non-rational coefficient constraints were not decided".into(),
        ));
    }
    witnesses.push(format!(
        "coefficient data incompatible with every scaling c: {}",
        last_clash.unwrap_or_else(|| "no consistent constraint system".into())
    ));
    Verdict::Distinguished(witnesses)
}
