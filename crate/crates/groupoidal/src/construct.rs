//! Constructions of groupoids and fibrations: transformation groupoids of
//! classical actions, action groupoids of actions on spaces, pullback and
//! Čech groupoids, bitransformation groupoids, and linking groupoids of
//! equivalence bibundles.
//!
//! Every construction produces deterministic canonical arrow ids (tuple
//! components joined with `|`, corner prefixes `g:`/`h:`/`x:`/`x*:` for the
//! linking groupoid), so isomorphism-as-equality tests can be exact where
//! equality is meant, and the bounded search in [`crate::iso`] is used only
//! where abstract isomorphism is meant.

use crate::error::{Error, Result};
use crate::functor::GroupoidFunctor;
use crate::groupoid::{pair_groupoid, ArrowSpec, FiniteGroupoid, GpRef};
use crate::report::ValidationReport;
use std::collections::HashMap;
use std::sync::Arc;

fn build_groupoid(
    objects: Vec<String>,
    mut arrows: Vec<ArrowSpec>,
    units: HashMap<String, String>,
    comp: Vec<(String, String, String)>,
) -> Result<FiniteGroupoid> {
    arrows.sort_by(|a, b| a.id.cmp(&b.id));
    FiniteGroupoid::new(objects, arrows, &units, &comp)
}

// ---------------------------------------------------------------------------
// Actions on spaces
// ---------------------------------------------------------------------------

/// An action of a groupoid `H` on a finite set of points, with an anchor map
/// to `H`'s objects. `act(h, x)` is defined exactly when `src(h) =
/// anchor(x)`, and then `anchor(act(h, x)) = rng(h)`.
#[derive(Debug, Clone)]
pub struct SpaceAction {
    acting: GpRef,
    points: Vec<String>,
    point_idx: HashMap<String, usize>,
    anchor: Vec<usize>,
    act: HashMap<(usize, usize), usize>,
}

impl SpaceAction {
    pub fn new(
        acting: GpRef,
        points: Vec<String>,
        anchor: &HashMap<String, String>,
        act: &[(String, String, String)],
    ) -> Result<Self> {
        let mut point_idx = HashMap::new();
        for (i, p) in points.iter().enumerate() {
            if point_idx.insert(p.clone(), i).is_some() {
                return Err(Error::InvalidAction(format!("duplicate point `{p}`")));
            }
        }
        let mut anchor_v = Vec::with_capacity(points.len());
        for p in &points {
            let y = anchor
                .get(p)
                .ok_or_else(|| Error::InvalidAction(format!("point `{p}` has no anchor")))?;
            anchor_v
                .push(acting.object_index(y).ok_or_else(|| Error::UnknownObject(y.clone()))?);
        }
        let mut act_m = HashMap::new();
        for (h, x, y) in act {
            let hi = acting.arrow_index(h).ok_or_else(|| Error::UnknownArrow(h.clone()))?;
            let xi = *point_idx
                .get(x)
                .ok_or_else(|| Error::InvalidAction(format!("unknown point `{x}`")))?;
            let yi = *point_idx
                .get(y)
                .ok_or_else(|| Error::InvalidAction(format!("unknown point `{y}`")))?;
            if acting.src(hi) != anchor_v[xi] {
                return Err(Error::InvalidAction(format!(
                    "`{h}` cannot act on `{x}`: src(h) != anchor(x)"
                )));
            }
            if act_m.insert((hi, xi), yi).is_some() {
                return Err(Error::InvalidAction(format!(
                    "action of `{h}` on `{x}` defined twice"
                )));
            }
        }
        for h in 0..acting.n_arrows() {
            for x in 0..points.len() {
                if acting.src(h) == anchor_v[x] && !act_m.contains_key(&(h, x)) {
                    return Err(Error::InvalidAction(format!(
                        "action of `{}` on `{}` is missing",
                        acting.arrow_id(h),
                        points[x]
                    )));
                }
            }
        }
        Ok(SpaceAction { acting, points, point_idx, anchor: anchor_v, act: act_m })
    }

    pub fn acting(&self) -> &GpRef {
        &self.acting
    }

    pub fn points(&self) -> &[String] {
        &self.points
    }

    pub fn anchor(&self, x: usize) -> usize {
        self.anchor[x]
    }

    pub fn point_index(&self, p: &str) -> Option<usize> {
        self.point_idx.get(p).copied()
    }

    pub fn apply(&self, h: usize, x: usize) -> Option<usize> {
        self.act.get(&(h, x)).copied()
    }

    /// The left translation action of a groupoid on its own arrow set:
    /// points are the arrows, the anchor is the range map, `h` acts by
    /// `l -> h.l`.
    pub fn translation(h: &GpRef) -> SpaceAction {
        let points: Vec<String> = h.arrows().to_vec();
        let anchor: HashMap<String, String> = (0..h.n_arrows())
            .map(|a| (h.arrow_id(a).to_string(), h.object_id(h.rng(a)).to_string()))
            .collect();
        let mut act = Vec::new();
        for k in 0..h.n_arrows() {
            for l in 0..h.n_arrows() {
                if h.src(k) == h.rng(l) {
                    act.push((
                        h.arrow_id(k).to_string(),
                        h.arrow_id(l).to_string(),
                        h.arrow_id(h.comp_unchecked(k, l)).to_string(),
                    ));
                }
            }
        }
        SpaceAction::new(h.clone(), points, &anchor, &act)
            .expect("translation action tables are well formed")
    }
}

/// Checks the action axioms: anchor equivariance, unit action, and
/// compatibility with composition.
pub fn validate_space_action(a: &SpaceAction) -> ValidationReport {
    let mut report = ValidationReport::new();
    let h = &a.acting;
    for (&(hi, xi), &yi) in &a.act {
        if a.anchor[yi] != h.rng(hi) {
            report.push(
                "action-anchor",
                vec![h.arrow_id(hi).into(), a.points[xi].clone()],
                "anchor(h.x) != rng(h)",
            );
        }
    }
    for x in 0..a.points.len() {
        let u = h.unit(a.anchor[x]);
        if a.apply(u, x) != Some(x) {
            report.push("action-unit", vec![a.points[x].clone()], "1.x != x");
        }
    }
    for (h1, h2) in h.composable_pairs() {
        let h12 = h.comp_unchecked(h1, h2);
        for x in 0..a.points.len() {
            if h.src(h2) == a.anchor[x] {
                let step = a.apply(h2, x).and_then(|y| a.apply(h1, y));
                if a.apply(h12, x) != step {
                    report.push(
                        "action-compatibility",
                        vec![h.arrow_id(h1).into(), h.arrow_id(h2).into(), a.points[x].clone()],
                        "(h1.h2).x != h1.(h2.x)",
                    );
                }
            }
        }
    }
    report
}

/// The action groupoid of an action on a space, together with the projection
/// functor to the acting groupoid, which is a groupoid covering with the
/// point set (as a unit groupoid) for fibre. Arrow ids are `h|x`.
pub fn action_groupoid(a: &SpaceAction) -> Result<(GpRef, GroupoidFunctor)> {
    let report = validate_space_action(a);
    if !report.is_valid() {
        return Err(Error::InvalidAction(format!("{} violations", report.violations.len())));
    }
    let h = &a.acting;
    let id = |hi: usize, xi: usize| format!("{}|{}", h.arrow_id(hi), a.points[xi]);

    let objects = a.points.clone();
    let mut arrows = Vec::new();
    let mut comp = Vec::new();
    let mut component: HashMap<String, (usize, usize)> = HashMap::new();
    for hi in 0..h.n_arrows() {
        for xi in 0..a.points.len() {
            let Some(yi) = a.apply(hi, xi) else { continue };
            component.insert(id(hi, xi), (hi, xi));
            arrows.push(ArrowSpec {
                id: id(hi, xi),
                src: a.points[xi].clone(),
                rng: a.points[yi].clone(),
                inv: id(h.inv(hi), yi),
            });
        }
    }
    for (h1, h2) in h.composable_pairs() {
        let h12 = h.comp_unchecked(h1, h2);
        for x2 in 0..a.points.len() {
            if h.src(h2) == a.anchor[x2] {
                comp.push((id(h1, a.apply(h2, x2).unwrap()), id(h2, x2), id(h12, x2)));
            }
        }
    }
    let units = (0..a.points.len())
        .map(|x| (a.points[x].clone(), id(h.unit(a.anchor[x]), x)))
        .collect();
    let hx = Arc::new(build_groupoid(objects, arrows, units, comp)?);

    let f0 = (0..hx.n_objects())
        .map(|x| a.anchor[a.point_idx[hx.object_id(x)]])
        .collect();
    let f1 = (0..hx.n_arrows())
        .map(|l| component[hx.arrow_id(l)].0)
        .collect();
    let f = GroupoidFunctor::from_indices(hx.clone(), h.clone(), f0, f1);
    Ok((hx, f))
}

// ---------------------------------------------------------------------------
// Classical actions and transformation groupoids
// ---------------------------------------------------------------------------

/// A classical action of a groupoid `H` on a groupoid `G`: actions of `H` on
/// `G`'s objects and arrows, equivariant for source, range, units, inverses
/// and composition. The arrow anchor is `anchor0 . src`, which must agree
/// with `anchor0 . rng`.
#[derive(Debug, Clone)]
pub struct ClassicalAction {
    acting: GpRef,
    target: GpRef,
    anchor0: Vec<usize>,
    act0: HashMap<(usize, usize), usize>,
    act1: HashMap<(usize, usize), usize>,
}

impl ClassicalAction {
    pub fn new(
        acting: GpRef,
        target: GpRef,
        anchor0: &HashMap<String, String>,
        act0: &[(String, String, String)],
        act1: &[(String, String, String)],
    ) -> Result<Self> {
        let mut anchor = Vec::with_capacity(target.n_objects());
        for x in 0..target.n_objects() {
            let id = target.object_id(x);
            let y = anchor0
                .get(id)
                .ok_or_else(|| Error::InvalidAction(format!("object `{id}` has no anchor")))?;
            anchor.push(acting.object_index(y).ok_or_else(|| Error::UnknownObject(y.clone()))?);
        }
        let mut act0_m = HashMap::new();
        for (h, x, y) in act0 {
            let hi = acting.arrow_index(h).ok_or_else(|| Error::UnknownArrow(h.clone()))?;
            let xi = target.object_index(x).ok_or_else(|| Error::UnknownObject(x.clone()))?;
            let yi = target.object_index(y).ok_or_else(|| Error::UnknownObject(y.clone()))?;
            if acting.src(hi) != anchor[xi] {
                return Err(Error::InvalidAction(format!("`{h}` cannot act on object `{x}`")));
            }
            act0_m.insert((hi, xi), yi);
        }
        let mut act1_m = HashMap::new();
        for (h, g, g2) in act1 {
            let hi = acting.arrow_index(h).ok_or_else(|| Error::UnknownArrow(h.clone()))?;
            let gi = target.arrow_index(g).ok_or_else(|| Error::UnknownArrow(g.clone()))?;
            let g2i = target.arrow_index(g2).ok_or_else(|| Error::UnknownArrow(g2.clone()))?;
            if acting.src(hi) != anchor[target.src(gi)] {
                return Err(Error::InvalidAction(format!("`{h}` cannot act on arrow `{g}`")));
            }
            act1_m.insert((hi, gi), g2i);
        }
        for h in 0..acting.n_arrows() {
            for x in 0..target.n_objects() {
                if acting.src(h) == anchor[x] && !act0_m.contains_key(&(h, x)) {
                    return Err(Error::InvalidAction(format!(
                        "object action of `{}` on `{}` is missing",
                        acting.arrow_id(h),
                        target.object_id(x)
                    )));
                }
            }
            for g in 0..target.n_arrows() {
                if acting.src(h) == anchor[target.src(g)] && !act1_m.contains_key(&(h, g)) {
                    return Err(Error::InvalidAction(format!(
                        "arrow action of `{}` on `{}` is missing",
                        acting.arrow_id(h),
                        target.arrow_id(g)
                    )));
                }
            }
        }
        Ok(ClassicalAction { acting, target, anchor0: anchor, act0: act0_m, act1: act1_m })
    }

    pub fn acting(&self) -> &GpRef {
        &self.acting
    }

    pub fn target(&self) -> &GpRef {
        &self.target
    }

    pub fn anchor0(&self, x: usize) -> usize {
        self.anchor0[x]
    }

    /// `anchor1(g) = anchor0(src(g))`.
    pub fn anchor1(&self, g: usize) -> usize {
        self.anchor0[self.target.src(g)]
    }

    pub fn apply0(&self, h: usize, x: usize) -> Option<usize> {
        self.act0.get(&(h, x)).copied()
    }

    pub fn apply1(&self, h: usize, g: usize) -> Option<usize> {
        self.act1.get(&(h, g)).copied()
    }

    /// The action of a one-object groupoid `H` on `G` where every arrow acts
    /// trivially.
    pub fn trivial(acting: GpRef, target: GpRef) -> Result<Self> {
        if acting.n_objects() != 1 {
            return Err(Error::InvalidAction(
                "trivial actions need a one-object acting groupoid".into(),
            ));
        }
        let y = acting.object_id(0).to_string();
        let anchor0 = target.objects().iter().map(|o| (o.clone(), y.clone())).collect();
        let mut act0 = Vec::new();
        let mut act1 = Vec::new();
        for h in 0..acting.n_arrows() {
            for x in 0..target.n_objects() {
                act0.push((
                    acting.arrow_id(h).to_string(),
                    target.object_id(x).to_string(),
                    target.object_id(x).to_string(),
                ));
            }
            for g in 0..target.n_arrows() {
                act1.push((
                    acting.arrow_id(h).to_string(),
                    target.arrow_id(g).to_string(),
                    target.arrow_id(g).to_string(),
                ));
            }
        }
        ClassicalAction::new(acting, target, &anchor0, &act0, &act1)
    }
}

/// Checks the classical-action axioms.
pub fn validate_classical_action(a: &ClassicalAction) -> ValidationReport {
    let mut report = ValidationReport::new();
    let (h, g) = (&a.acting, &a.target);

    for arrow in 0..g.n_arrows() {
        if a.anchor0[g.src(arrow)] != a.anchor0[g.rng(arrow)] {
            report.push(
                "anchor-invariant",
                vec![g.arrow_id(arrow).into()],
                "anchor0(src(g)) != anchor0(rng(g))",
            );
        }
    }
    // Equivariance of src, rng, anchors, and inverses.
    for (&(hi, gi), &gj) in &a.act1 {
        if a.apply0(hi, g.src(gi)) != Some(g.src(gj)) {
            report.push(
                "action-src",
                vec![h.arrow_id(hi).into(), g.arrow_id(gi).into()],
                "src not equivariant",
            );
        }
        if a.apply0(hi, g.rng(gi)) != Some(g.rng(gj)) {
            report.push(
                "action-rng",
                vec![h.arrow_id(hi).into(), g.arrow_id(gi).into()],
                "rng not equivariant",
            );
        }
        if a.anchor1(gj) != h.rng(hi) {
            report.push(
                "action-anchor",
                vec![h.arrow_id(hi).into(), g.arrow_id(gi).into()],
                "anchor1(h.g) != rng(h)",
            );
        }
        if a.apply1(hi, g.inv(gi)) != Some(g.inv(gj)) {
            report.push(
                "action-inverse",
                vec![h.arrow_id(hi).into(), g.arrow_id(gi).into()],
                "h.inv(g) != inv(h.g)",
            );
        }
    }
    for (&(hi, xi), &yi) in &a.act0 {
        if a.anchor0[yi] != h.rng(hi) {
            report.push(
                "action-anchor",
                vec![h.arrow_id(hi).into(), g.object_id(xi).into()],
                "anchor0(h.x) != rng(h)",
            );
        }
        if a.apply1(hi, g.unit(xi)) != Some(g.unit(yi)) {
            report.push(
                "action-unit-arrow",
                vec![h.arrow_id(hi).into(), g.object_id(xi).into()],
                "h.1_x != 1_{h.x}",
            );
        }
    }
    // Unit action.
    for x in 0..g.n_objects() {
        if a.apply0(h.unit(a.anchor0[x]), x) != Some(x) {
            report.push("action-unit", vec![g.object_id(x).into()], "1.x != x");
        }
    }
    for gi in 0..g.n_arrows() {
        if a.apply1(h.unit(a.anchor1(gi)), gi) != Some(gi) {
            report.push("action-unit", vec![g.arrow_id(gi).into()], "1.g != g");
        }
    }
    // Each h acts multiplicatively.
    for hi in 0..h.n_arrows() {
        for (g1, g2) in g.composable_pairs() {
            if h.src(hi) != a.anchor1(g1) {
                continue;
            }
            let lhs = a.apply1(hi, g.comp_unchecked(g1, g2));
            let rhs = match (a.apply1(hi, g1), a.apply1(hi, g2)) {
                (Some(p), Some(q)) => g.comp(p, q),
                _ => None,
            };
            if lhs != rhs || lhs.is_none() {
                report.push(
                    "action-multiplicative",
                    vec![h.arrow_id(hi).into(), g.arrow_id(g1).into(), g.arrow_id(g2).into()],
                    "h.(g1.g2) != (h.g1).(h.g2)",
                );
            }
        }
    }
    // (h1.h2).g = h1.(h2.g), and likewise on objects.
    for (h1, h2) in h.composable_pairs() {
        let h12 = h.comp_unchecked(h1, h2);
        for gi in 0..g.n_arrows() {
            if h.src(h2) == a.anchor1(gi) {
                let step = a.apply1(h2, gi).and_then(|m| a.apply1(h1, m));
                if a.apply1(h12, gi) != step {
                    report.push(
                        "action-composition",
                        vec![h.arrow_id(h1).into(), h.arrow_id(h2).into(), g.arrow_id(gi).into()],
                        "(h1.h2).g != h1.(h2.g)",
                    );
                }
            }
        }
        for x in 0..g.n_objects() {
            if h.src(h2) == a.anchor0[x] {
                let step = a.apply0(h2, x).and_then(|m| a.apply0(h1, m));
                if a.apply0(h12, x) != step {
                    report.push(
                        "action-composition",
                        vec![h.arrow_id(h1).into(), h.arrow_id(h2).into(), g.object_id(x).into()],
                        "(h1.h2).x != h1.(h2.x)",
                    );
                }
            }
        }
    }
    report
}

/// The transformation groupoid of a classical action, with the projection
/// fibration to the acting groupoid `H`. Arrows are pairs `h|g` with
/// `src(h) = anchor1(g)`; `src(h|g) = src(g)`, `rng(h|g) = h.rng(g)`, and
/// `(h1|g1).(h2|g2) = h1.h2 | (inv(h2).g1).g2`. The fibre of the projection
/// is a copy of the target on the arrows `1|g`.
pub fn transformation_groupoid(a: &ClassicalAction) -> Result<(GpRef, GroupoidFunctor)> {
    let report = validate_classical_action(a);
    if !report.is_valid() {
        return Err(Error::InvalidAction(format!("{} violations", report.violations.len())));
    }
    let (h, g) = (&a.acting, &a.target);
    let id = |hi: usize, gi: usize| format!("{}|{}", h.arrow_id(hi), g.arrow_id(gi));

    let mut pairs = Vec::new();
    let mut component: HashMap<String, (usize, usize)> = HashMap::new();
    for hi in 0..h.n_arrows() {
        for gi in 0..g.n_arrows() {
            if h.src(hi) == a.anchor1(gi) {
                pairs.push((hi, gi));
                component.insert(id(hi, gi), (hi, gi));
            }
        }
    }
    let objects: Vec<String> = g.objects().to_vec();
    let arrows: Vec<ArrowSpec> = pairs
        .iter()
        .map(|&(hi, gi)| {
            let rng_obj = a.apply0(hi, g.rng(gi)).unwrap();
            let inv_g = a.apply1(hi, g.inv(gi)).unwrap();
            ArrowSpec {
                id: id(hi, gi),
                src: g.object_id(g.src(gi)).into(),
                rng: g.object_id(rng_obj).into(),
                inv: id(h.inv(hi), inv_g),
            }
        })
        .collect();
    let units: HashMap<String, String> = (0..g.n_objects())
        .map(|x| (g.object_id(x).to_string(), id(h.unit(a.anchor0[x]), g.unit(x))))
        .collect();
    let mut comp = Vec::new();
    for &(h1, g1) in &pairs {
        for &(h2, g2) in &pairs {
            // Composable iff src(g1) = h2.rng(g2).
            if a.apply0(h2, g.rng(g2)) == Some(g.src(g1)) {
                let back = a.apply1(h.inv(h2), g1).unwrap();
                let gi = g.comp_unchecked(back, g2);
                comp.push((id(h1, g1), id(h2, g2), id(h.comp_unchecked(h1, h2), gi)));
            }
        }
    }
    let l = Arc::new(build_groupoid(objects, arrows, units, comp)?);
    debug_assert!(crate::groupoid::validate_groupoid(&l).is_valid());

    let f0 = (0..l.n_objects())
        .map(|x| a.anchor0[g.object_index(l.object_id(x)).unwrap()])
        .collect();
    let f1 = (0..l.n_arrows())
        .map(|arrow| component[l.arrow_id(arrow)].0)
        .collect();
    let f = GroupoidFunctor::from_indices(l.clone(), h.clone(), f0, f1);
    Ok((l, f))
}

// ---------------------------------------------------------------------------
// Pullback and Čech groupoids
// ---------------------------------------------------------------------------

/// The pullback of `H` along a surjection `p: X -> H^0`, with the projection
/// fibration to `H`. Arrows are triples `x|h|y` with `p(x) = rng(h)` and
/// `p(y) = src(h)`; the fibre is the Čech groupoid of `p`.
pub fn pullback_groupoid(
    h: &GpRef,
    points: &[String],
    p: &HashMap<String, String>,
) -> Result<(GpRef, GroupoidFunctor)> {
    let mut p_idx = Vec::with_capacity(points.len());
    for x in points {
        let y =
            p.get(x).ok_or_else(|| Error::InvalidAction(format!("point `{x}` has no image")))?;
        p_idx.push(h.object_index(y).ok_or_else(|| Error::UnknownObject(y.clone()))?);
    }
    for y in 0..h.n_objects() {
        if !p_idx.contains(&y) {
            return Err(Error::NotSurjective(h.object_id(y).into()));
        }
    }
    let id =
        |x: usize, k: usize, y: usize| format!("{}|{}|{}", points[x], h.arrow_id(k), points[y]);
    let mut triples = Vec::new();
    let mut component: HashMap<String, usize> = HashMap::new();
    for k in 0..h.n_arrows() {
        for x in 0..points.len() {
            if p_idx[x] != h.rng(k) {
                continue;
            }
            for y in 0..points.len() {
                if p_idx[y] == h.src(k) {
                    triples.push((x, k, y));
                    component.insert(id(x, k, y), k);
                }
            }
        }
    }
    let arrows: Vec<ArrowSpec> = triples
        .iter()
        .map(|&(x, k, y)| ArrowSpec {
            id: id(x, k, y),
            src: points[y].clone(),
            rng: points[x].clone(),
            inv: id(y, h.inv(k), x),
        })
        .collect();
    let units = (0..points.len())
        .map(|x| (points[x].clone(), id(x, h.unit(p_idx[x]), x)))
        .collect();
    let mut comp = Vec::new();
    for &(x, k, y) in &triples {
        for &(y2, k2, z) in &triples {
            if y2 == y && h.src(k) == h.rng(k2) {
                comp.push((id(x, k, y), id(y2, k2, z), id(x, h.comp_unchecked(k, k2), z)));
            }
        }
    }
    let ph = Arc::new(build_groupoid(points.to_vec(), arrows, units, comp)?);

    let f0 = (0..ph.n_objects())
        .map(|x| {
            let pos = points.iter().position(|q| q == ph.object_id(x)).unwrap();
            p_idx[pos]
        })
        .collect();
    let f1 = (0..ph.n_arrows())
        .map(|arrow| component[ph.arrow_id(arrow)])
        .collect();
    let f = GroupoidFunctor::from_indices(ph.clone(), h.clone(), f0, f1);
    Ok((ph, f))
}

/// The Čech groupoid of a surjection `p: X -> Y`: unit space `X`, one arrow
/// `x|y` from `y` to `x` for each pair in the same fibre.
pub fn cech_groupoid(
    points: &[String],
    p: &HashMap<String, String>,
    codomain: &[String],
) -> Result<FiniteGroupoid> {
    let mut cls = Vec::with_capacity(points.len());
    for x in points {
        let y =
            p.get(x).ok_or_else(|| Error::InvalidAction(format!("point `{x}` has no image")))?;
        if !codomain.contains(y) {
            return Err(Error::UnknownObject(y.clone()));
        }
        cls.push(y.clone());
    }
    for y in codomain {
        if !cls.contains(y) {
            return Err(Error::NotSurjective(y.clone()));
        }
    }
    let id = |x: usize, y: usize| format!("{}|{}", points[x], points[y]);
    let mut arrows = Vec::new();
    let mut comp = Vec::new();
    for x in 0..points.len() {
        for y in 0..points.len() {
            if cls[x] == cls[y] {
                arrows.push(ArrowSpec {
                    id: id(x, y),
                    src: points[y].clone(),
                    rng: points[x].clone(),
                    inv: id(y, x),
                });
                for z in 0..points.len() {
                    if cls[z] == cls[x] {
                        comp.push((id(x, y), id(y, z), id(x, z)));
                    }
                }
            }
        }
    }
    let units = (0..points.len()).map(|x| (points[x].clone(), id(x, x))).collect();
    build_groupoid(points.to_vec(), arrows, units, comp)
}

// ---------------------------------------------------------------------------
// Bibundles, bitransformation and linking groupoids
// ---------------------------------------------------------------------------

/// A `G`-`H` bibundle: a finite point set with commuting left `G`- and right
/// `H`-actions. `lact(g, x)` is defined exactly when `src(g) = lanchor(x)`
/// and moves `lanchor` to `rng(g)`; `ract(x, h)` is defined exactly when
/// `ranchor(x) = rng(h)` and moves `ranchor` to `src(h)`.
#[derive(Debug, Clone)]
pub struct Bibundle {
    left: GpRef,
    right: GpRef,
    points: Vec<String>,
    point_idx: HashMap<String, usize>,
    lanchor: Vec<usize>,
    ranchor: Vec<usize>,
    lact: HashMap<(usize, usize), usize>,
    ract: HashMap<(usize, usize), usize>,
}

impl Bibundle {
    pub fn new(
        left: GpRef,
        right: GpRef,
        points: Vec<String>,
        lanchor: &HashMap<String, String>,
        ranchor: &HashMap<String, String>,
        lact: &[(String, String, String)],
        ract: &[(String, String, String)],
    ) -> Result<Self> {
        let mut point_idx = HashMap::new();
        for (i, p) in points.iter().enumerate() {
            if point_idx.insert(p.clone(), i).is_some() {
                return Err(Error::InvalidBibundle(format!("duplicate point `{p}`")));
            }
        }
        let get_pt = |p: &String| -> Result<usize> {
            point_idx
                .get(p)
                .copied()
                .ok_or_else(|| Error::InvalidBibundle(format!("unknown point `{p}`")))
        };
        let mut lanchor_v = Vec::new();
        let mut ranchor_v = Vec::new();
        for p in &points {
            let lo = lanchor
                .get(p)
                .ok_or_else(|| Error::InvalidBibundle(format!("point `{p}` has no left anchor")))?;
            lanchor_v
                .push(left.object_index(lo).ok_or_else(|| Error::UnknownObject(lo.clone()))?);
            let ro = ranchor.get(p).ok_or_else(|| {
                Error::InvalidBibundle(format!("point `{p}` has no right anchor"))
            })?;
            ranchor_v
                .push(right.object_index(ro).ok_or_else(|| Error::UnknownObject(ro.clone()))?);
        }
        let mut lact_m = HashMap::new();
        for (g, x, y) in lact {
            let gi = left.arrow_index(g).ok_or_else(|| Error::UnknownArrow(g.clone()))?;
            let (xi, yi) = (get_pt(x)?, get_pt(y)?);
            if left.src(gi) != lanchor_v[xi] {
                return Err(Error::InvalidBibundle(format!("`{g}` cannot act on `{x}`")));
            }
            lact_m.insert((gi, xi), yi);
        }
        let mut ract_m = HashMap::new();
        for (x, h, y) in ract {
            let hi = right.arrow_index(h).ok_or_else(|| Error::UnknownArrow(h.clone()))?;
            let (xi, yi) = (get_pt(x)?, get_pt(y)?);
            if right.rng(hi) != ranchor_v[xi] {
                return Err(Error::InvalidBibundle(format!("`{x}` cannot act by `{h}`")));
            }
            ract_m.insert((xi, hi), yi);
        }
        for x in 0..points.len() {
            for g in 0..left.n_arrows() {
                if left.src(g) == lanchor_v[x] && !lact_m.contains_key(&(g, x)) {
                    return Err(Error::InvalidBibundle(format!(
                        "left action of `{}` on `{}` is missing",
                        left.arrow_id(g),
                        points[x]
                    )));
                }
            }
            for h in 0..right.n_arrows() {
                if right.rng(h) == ranchor_v[x] && !ract_m.contains_key(&(x, h)) {
                    return Err(Error::InvalidBibundle(format!(
                        "right action of `{}` on `{}` is missing",
                        right.arrow_id(h),
                        points[x]
                    )));
                }
            }
        }
        Ok(Bibundle {
            left,
            right,
            points,
            point_idx,
            lanchor: lanchor_v,
            ranchor: ranchor_v,
            lact: lact_m,
            ract: ract_m,
        })
    }

    pub fn left(&self) -> &GpRef {
        &self.left
    }

    pub fn right(&self) -> &GpRef {
        &self.right
    }

    pub fn points(&self) -> &[String] {
        &self.points
    }

    pub fn lanchor(&self, x: usize) -> usize {
        self.lanchor[x]
    }

    pub fn ranchor(&self, x: usize) -> usize {
        self.ranchor[x]
    }

    pub fn lapply(&self, g: usize, x: usize) -> Option<usize> {
        self.lact.get(&(g, x)).copied()
    }

    pub fn rapply(&self, x: usize, h: usize) -> Option<usize> {
        self.ract.get(&(x, h)).copied()
    }

    /// The translation bibundle on the arrows of `g`, between `g` and
    /// itself: both actions by composition. Always a groupoid equivalence.
    pub fn translation(g: &GpRef) -> Bibundle {
        let points: Vec<String> = g.arrows().to_vec();
        let lanchor: HashMap<String, String> = (0..g.n_arrows())
            .map(|a| (g.arrow_id(a).to_string(), g.object_id(g.rng(a)).to_string()))
            .collect();
        let ranchor: HashMap<String, String> = (0..g.n_arrows())
            .map(|a| (g.arrow_id(a).to_string(), g.object_id(g.src(a)).to_string()))
            .collect();
        let mut lact = Vec::new();
        let mut ract = Vec::new();
        for (a, b) in g.composable_pairs() {
            let c = g.arrow_id(g.comp_unchecked(a, b)).to_string();
            // Left: a acts on point b (rng(b) = lanchor target: src(a) = rng(b)).
            lact.push((g.arrow_id(a).to_string(), g.arrow_id(b).to_string(), c.clone()));
            // Right: point a acted by b (ranchor(a) = src(a) = rng(b)).
            ract.push((g.arrow_id(a).to_string(), g.arrow_id(b).to_string(), c));
        }
        Bibundle::new(g.clone(), g.clone(), points, &lanchor, &ranchor, &lact, &ract)
            .expect("translation bibundle tables are well formed")
    }
}

/// Checks the bibundle axioms: anchor equivariance, unitality and
/// associativity of both actions, and commutation.
pub fn validate_bibundle(b: &Bibundle) -> ValidationReport {
    let mut report = ValidationReport::new();
    let (g, h) = (&b.left, &b.right);
    for (&(gi, xi), &yi) in &b.lact {
        if b.lanchor[yi] != g.rng(gi) {
            report.push(
                "left-anchor",
                vec![g.arrow_id(gi).into(), b.points[xi].clone()],
                "lanchor(g.x) != rng(g)",
            );
        }
        if b.ranchor[yi] != b.ranchor[xi] {
            report.push(
                "left-anchor",
                vec![g.arrow_id(gi).into(), b.points[xi].clone()],
                "ranchor(g.x) != ranchor(x)",
            );
        }
    }
    for (&(xi, hi), &yi) in &b.ract {
        if b.ranchor[yi] != h.src(hi) {
            report.push(
                "right-anchor",
                vec![b.points[xi].clone(), h.arrow_id(hi).into()],
                "ranchor(x.h) != src(h)",
            );
        }
        if b.lanchor[yi] != b.lanchor[xi] {
            report.push(
                "right-anchor",
                vec![b.points[xi].clone(), h.arrow_id(hi).into()],
                "lanchor(x.h) != lanchor(x)",
            );
        }
    }
    for x in 0..b.points.len() {
        if b.lapply(g.unit(b.lanchor[x]), x) != Some(x) {
            report.push("left-unit", vec![b.points[x].clone()], "1.x != x");
        }
        if b.rapply(x, h.unit(b.ranchor[x])) != Some(x) {
            report.push("right-unit", vec![b.points[x].clone()], "x.1 != x");
        }
    }
    for (g1, g2) in g.composable_pairs() {
        for x in 0..b.points.len() {
            if g.src(g2) == b.lanchor[x] {
                let step = b.lapply(g2, x).and_then(|y| b.lapply(g1, y));
                if b.lapply(g.comp_unchecked(g1, g2), x) != step {
                    report.push(
                        "left-associative",
                        vec![g.arrow_id(g1).into(), g.arrow_id(g2).into(), b.points[x].clone()],
                        "(g1.g2).x != g1.(g2.x)",
                    );
                }
            }
        }
    }
    for (h1, h2) in h.composable_pairs() {
        for x in 0..b.points.len() {
            if h.rng(h1) == b.ranchor[x] {
                let step = b.rapply(x, h1).and_then(|y| b.rapply(y, h2));
                if b.rapply(x, h.comp_unchecked(h1, h2)) != step {
                    report.push(
                        "right-associative",
                        vec![b.points[x].clone(), h.arrow_id(h1).into(), h.arrow_id(h2).into()],
                        "x.(h1.h2) != (x.h1).h2",
                    );
                }
            }
        }
    }
    for x in 0..b.points.len() {
        for gi in 0..g.n_arrows() {
            if g.src(gi) != b.lanchor[x] {
                continue;
            }
            for hi in 0..h.n_arrows() {
                if h.rng(hi) != b.ranchor[x] {
                    continue;
                }
                let lr = b.lapply(gi, x).and_then(|y| b.rapply(y, hi));
                let rl = b.rapply(x, hi).and_then(|y| b.lapply(gi, y));
                if lr != rl || lr.is_none() {
                    report.push(
                        "actions-commute",
                        vec![g.arrow_id(gi).into(), b.points[x].clone(), h.arrow_id(hi).into()],
                        "(g.x).h != g.(x.h)",
                    );
                }
            }
        }
    }
    report
}

fn equivalence_axioms(b: &Bibundle) -> Result<()> {
    let (g, h) = (&b.left, &b.right);
    for (&(gi, xi), &yi) in &b.lact {
        if yi == xi && !g.is_unit(gi) {
            return Err(Error::NotAnEquivalence(format!(
                "left action is not free: `{}` fixes `{}`",
                g.arrow_id(gi),
                b.points[xi]
            )));
        }
    }
    for (&(xi, hi), &yi) in &b.ract {
        if yi == xi && !h.is_unit(hi) {
            return Err(Error::NotAnEquivalence(format!(
                "right action is not free: `{}` fixes `{}`",
                h.arrow_id(hi),
                b.points[xi]
            )));
        }
    }
    // ranchor descends to a bijection of left orbits onto the right objects.
    let left_related = |x: usize, y: usize| (0..g.n_arrows()).any(|gi| b.lapply(gi, x) == Some(y));
    for x in 0..b.points.len() {
        for y in 0..b.points.len() {
            if (b.ranchor[x] == b.ranchor[y]) != left_related(x, y) {
                return Err(Error::NotAnEquivalence(
                    "ranchor does not induce a bijection of left orbits onto the right objects"
                        .into(),
                ));
            }
        }
    }
    for y in 0..h.n_objects() {
        if !b.ranchor.contains(&y) {
            return Err(Error::NotAnEquivalence(format!(
                "ranchor is not surjective: `{}` is not hit",
                h.object_id(y)
            )));
        }
    }
    // lanchor descends to a bijection of right orbits onto the left objects.
    let right_related = |x: usize, y: usize| (0..h.n_arrows()).any(|hi| b.rapply(x, hi) == Some(y));
    for x in 0..b.points.len() {
        for y in 0..b.points.len() {
            if (b.lanchor[x] == b.lanchor[y]) != right_related(x, y) {
                return Err(Error::NotAnEquivalence(
                    "lanchor does not induce a bijection of right orbits onto the left objects"
                        .into(),
                ));
            }
        }
    }
    for x in 0..g.n_objects() {
        if !b.lanchor.contains(&x) {
            return Err(Error::NotAnEquivalence(format!(
                "lanchor is not surjective: `{}` is not hit",
                g.object_id(x)
            )));
        }
    }
    Ok(())
}

/// Whether the bibundle is a groupoid equivalence: both actions free, and
/// the anchors descend to bijections of the orbit spaces.
pub fn equivalence_check(b: &Bibundle) -> bool {
    validate_bibundle(b).is_valid() && equivalence_axioms(b).is_ok()
}

/// The left action of a bibundle as a space action.
pub fn left_space_action(b: &Bibundle) -> SpaceAction {
    let lanchor: HashMap<String, String> = (0..b.points.len())
        .map(|x| (b.points[x].clone(), b.left.object_id(b.lanchor[x]).to_string()))
        .collect();
    let lact: Vec<(String, String, String)> = b
        .lact
        .iter()
        .map(|(&(g, x), &y)| {
            (b.left.arrow_id(g).to_string(), b.points[x].clone(), b.points[y].clone())
        })
        .collect();
    SpaceAction::new(b.left.clone(), b.points.clone(), &lanchor, &lact)
        .expect("bibundle left action tables are well formed")
}

/// The bitransformation groupoid of a bibundle, with the projection
/// fibration to the right groupoid. Built as the transformation groupoid of
/// the classical right-action `h.m = m.inv(h)` on the left action groupoid,
/// so the fibre is exactly that left action groupoid. Arrow ids are
/// `h|g|x`.
pub fn bitransformation_groupoid(b: &Bibundle) -> Result<(GpRef, GroupoidFunctor)> {
    let report = validate_bibundle(b);
    if !report.is_valid() {
        return Err(Error::InvalidBibundle(format!("{} violations", report.violations.len())));
    }
    let left_action = left_space_action(b);
    let (gx, _) = action_groupoid(&left_action)
        .map_err(|e| Error::InvalidBibundle(format!("left action groupoid: {e}")))?;
    let h = &b.right;

    // gx arrow ids are `<g-arrow>|<point>`; reconstruct the components with
    // the same formatting rather than splitting on `|`, which may occur
    // inside component ids.
    let g = &b.left;
    let mut gx_component: HashMap<String, (usize, usize)> = HashMap::new();
    for gi in 0..g.n_arrows() {
        for pt in 0..b.points.len() {
            if g.src(gi) == b.lanchor[pt] {
                gx_component.insert(format!("{}|{}", g.arrow_id(gi), b.points[pt]), (gi, pt));
            }
        }
    }

    let anchor0: HashMap<String, String> = (0..gx.n_objects())
        .map(|x| {
            let pt = b.point_idx[gx.object_id(x)];
            (gx.object_id(x).to_string(), h.object_id(b.ranchor[pt]).to_string())
        })
        .collect();
    let mut act0 = Vec::new();
    let mut act1 = Vec::new();
    for hi in 0..h.n_arrows() {
        let hinv = h.inv(hi);
        for x in 0..gx.n_objects() {
            let pt = b.point_idx[gx.object_id(x)];
            if b.ranchor[pt] == h.src(hi) {
                let moved = b.rapply(pt, hinv).unwrap();
                act0.push((
                    h.arrow_id(hi).to_string(),
                    gx.object_id(x).to_string(),
                    b.points[moved].clone(),
                ));
            }
        }
        for m in 0..gx.n_arrows() {
            let (gi, pt) = gx_component[gx.arrow_id(m)];
            if b.ranchor[pt] == h.src(hi) {
                let moved = b.rapply(pt, hinv).unwrap();
                act1.push((
                    h.arrow_id(hi).to_string(),
                    gx.arrow_id(m).to_string(),
                    format!("{}|{}", g.arrow_id(gi), b.points[moved]),
                ));
            }
        }
    }
    let action = ClassicalAction::new(h.clone(), gx.clone(), &anchor0, &act0, &act1)
        .map_err(|e| Error::InvalidBibundle(format!("induced classical action: {e}")))?;
    transformation_groupoid(&action)
        .map_err(|e| Error::InvalidBibundle(format!("bitransformation groupoid: {e}")))
}

/// The linking groupoid of an equivalence bibundle, with the fibration onto
/// the pair groupoid on `{a, b}`. Objects are `g:<obj>` and `h:<obj>`;
/// arrows are `g:<arrow>`, `h:<arrow>`, `x:<point>` (from `h:ranchor` to
/// `g:lanchor`) and `x*:<point>` (the reverse). The fibre is the disjoint
/// union of the two groupoids.
pub fn linking_groupoid(b: &Bibundle) -> Result<(GpRef, GroupoidFunctor)> {
    let report = validate_bibundle(b);
    if !report.is_valid() {
        return Err(Error::InvalidBibundle(format!("{} violations", report.violations.len())));
    }
    equivalence_axioms(b)?;
    let (g, h) = (&b.left, &b.right);
    let n = b.points.len();

    let gobj = |x: usize| format!("g:{}", g.object_id(x));
    let hobj = |y: usize| format!("h:{}", h.object_id(y));
    let garr = |a: usize| format!("g:{}", g.arrow_id(a));
    let harr = |a: usize| format!("h:{}", h.arrow_id(a));
    let xarr = |p: usize| format!("x:{}", b.points[p]);
    let xsarr = |p: usize| format!("x*:{}", b.points[p]);

    let mut objects: Vec<String> = (0..g.n_objects()).map(gobj).collect();
    objects.extend((0..h.n_objects()).map(hobj));
    objects.sort();

    let mut arrows = Vec::new();
    for a in 0..g.n_arrows() {
        arrows.push(ArrowSpec {
            id: garr(a),
            src: gobj(g.src(a)),
            rng: gobj(g.rng(a)),
            inv: garr(g.inv(a)),
        });
    }
    for a in 0..h.n_arrows() {
        arrows.push(ArrowSpec {
            id: harr(a),
            src: hobj(h.src(a)),
            rng: hobj(h.rng(a)),
            inv: harr(h.inv(a)),
        });
    }
    for p in 0..n {
        arrows.push(ArrowSpec {
            id: xarr(p),
            src: hobj(b.ranchor[p]),
            rng: gobj(b.lanchor[p]),
            inv: xsarr(p),
        });
        arrows.push(ArrowSpec {
            id: xsarr(p),
            src: gobj(b.lanchor[p]),
            rng: hobj(b.ranchor[p]),
            inv: xarr(p),
        });
    }

    // Division maps of the free actions with matching orbits.
    let left_divide = |p: usize, q: usize| -> usize {
        (0..g.n_arrows())
            .find(|&gi| b.lapply(gi, q) == Some(p))
            .expect("equivalence axioms guarantee a unique left quotient")
    };
    let right_divide = |p: usize, q: usize| -> usize {
        (0..h.n_arrows())
            .find(|&hi| b.rapply(p, hi) == Some(q))
            .expect("equivalence axioms guarantee a unique right quotient")
    };

    let mut comp = Vec::new();
    for (a1, a2) in g.composable_pairs() {
        comp.push((garr(a1), garr(a2), garr(g.comp_unchecked(a1, a2))));
    }
    for (a1, a2) in h.composable_pairs() {
        comp.push((harr(a1), harr(a2), harr(h.comp_unchecked(a1, a2))));
    }
    for p in 0..n {
        for gi in 0..g.n_arrows() {
            if g.src(gi) == b.lanchor[p] {
                comp.push((garr(gi), xarr(p), xarr(b.lapply(gi, p).unwrap())));
            }
            if g.rng(gi) == b.lanchor[p] {
                let q = b.lapply(g.inv(gi), p).unwrap();
                comp.push((xsarr(p), garr(gi), xsarr(q)));
            }
        }
        for hi in 0..h.n_arrows() {
            if h.rng(hi) == b.ranchor[p] {
                comp.push((xarr(p), harr(hi), xarr(b.rapply(p, hi).unwrap())));
            }
            if h.src(hi) == b.ranchor[p] {
                let q = b.rapply(p, h.inv(hi)).unwrap();
                comp.push((harr(hi), xsarr(p), xsarr(q)));
            }
        }
        for q in 0..n {
            if b.ranchor[p] == b.ranchor[q] {
                comp.push((xarr(p), xsarr(q), garr(left_divide(p, q))));
            }
            if b.lanchor[p] == b.lanchor[q] {
                comp.push((xsarr(p), xarr(q), harr(right_divide(p, q))));
            }
        }
    }
    let units: HashMap<String, String> = (0..g.n_objects())
        .map(|x| (gobj(x), garr(g.unit(x))))
        .chain((0..h.n_objects()).map(|y| (hobj(y), harr(h.unit(y)))))
        .collect();
    let l = Arc::new(build_groupoid(objects, arrows, units, comp)?);
    debug_assert!(crate::groupoid::validate_groupoid(&l).is_valid());

    let k = Arc::new(pair_groupoid(&["a", "b"]));
    let f0 = (0..l.n_objects())
        .map(|x| {
            let tag = if l.object_id(x).starts_with("g:") { "a" } else { "b" };
            k.object_index(tag).unwrap()
        })
        .collect();
    let f1 = (0..l.n_arrows())
        .map(|a| {
            let id = l.arrow_id(a);
            let target = if id.starts_with("g:") {
                "a|a"
            } else if id.starts_with("h:") {
                "b|b"
            } else if id.starts_with("x:") {
                "a|b"
            } else {
                "b|a"
            };
            k.arrow_index(target).unwrap()
        })
        .collect();
    let f = GroupoidFunctor::from_indices(l.clone(), k, f0, f1);
    Ok((l, f))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functor::{covering_check, fibration_check, fibre, validate_functor};
    use crate::groupoid::{
        cyclic_group, group_from_table, product_groupoid, unit_groupoid, validate_groupoid,
    };
    use crate::iso::{groupoids_isomorphic, SearchResult, ISO_SEARCH_BOUND};

    fn iso(a: &FiniteGroupoid, b: &FiniteGroupoid) -> bool {
        groupoids_isomorphic(a, b, ISO_SEARCH_BOUND) == SearchResult::Found
    }

    /// Z/2 acting on Z/3 by inversion.
    fn inversion_action() -> ClassicalAction {
        let h = Arc::new(cyclic_group(2));
        let g = Arc::new(cyclic_group(3));
        let anchor0 = HashMap::from([("*".to_string(), "*".to_string())]);
        let mut act0 = vec![];
        let mut act1 = vec![];
        for hi in 0..2u32 {
            act0.push((hi.to_string(), "*".to_string(), "*".to_string()));
            for gi in 0..3u32 {
                let out = if hi == 0 { gi } else { (3 - gi) % 3 };
                act1.push((hi.to_string(), gi.to_string(), out.to_string()));
            }
        }
        ClassicalAction::new(h, g, &anchor0, &act0, &act1).unwrap()
    }

    /// S3 from its multiplication table, computed by composing permutations.
    fn s3() -> FiniteGroupoid {
        let perms: Vec<[usize; 3]> =
            vec![[0, 1, 2], [1, 2, 0], [2, 0, 1], [1, 0, 2], [0, 2, 1], [2, 1, 0]];
        let ids: Vec<String> =
            perms.iter().map(|p| format!("p{}{}{}", p[0], p[1], p[2])).collect();
        let id_refs: Vec<&str> = ids.iter().map(|s| s.as_str()).collect();
        let mut mul = vec![vec![0usize; 6]; 6];
        for (i, a) in perms.iter().enumerate() {
            for (j, b) in perms.iter().enumerate() {
                let c = [a[b[0]], a[b[1]], a[b[2]]];
                mul[i][j] = perms.iter().position(|p| *p == c).unwrap();
            }
        }
        group_from_table(&id_refs, &mul, 0)
    }

    #[test]
    fn inversion_transformation_groupoid_is_s3() {
        let a = inversion_action();
        assert!(validate_classical_action(&a).is_valid());
        let (l, f) = transformation_groupoid(&a).unwrap();
        assert_eq!(l.n_objects(), 1);
        assert_eq!(l.n_arrows(), 6);
        assert!(validate_groupoid(&l).is_valid());
        assert!(fibration_check(&f).unwrap().is_fibration);
        assert!(iso(&l, &s3()));
        // The fibre is the copy 0|g of the target.
        let g = fibre(&f).unwrap();
        assert!(iso(&g, &cyclic_group(3)));
    }

    #[test]
    fn trivial_action_gives_product() {
        let a = ClassicalAction::trivial(Arc::new(cyclic_group(2)), Arc::new(cyclic_group(3)))
            .unwrap();
        let (l, f) = transformation_groupoid(&a).unwrap();
        assert!(fibration_check(&f).unwrap().is_fibration);
        assert!(iso(&l, &product_groupoid(&cyclic_group(3), &cyclic_group(2))));
    }

    #[test]
    fn trivial_acting_group_gives_target_back() {
        let a = ClassicalAction::trivial(Arc::new(cyclic_group(1)), Arc::new(pair_groupoid(&["1", "2"])))
            .unwrap();
        let (l, _) = transformation_groupoid(&a).unwrap();
        assert!(iso(&l, &pair_groupoid(&["1", "2"])));
    }

    fn swap_action() -> SpaceAction {
        let h = Arc::new(cyclic_group(2));
        let anchor =
            HashMap::from([("p".to_string(), "*".to_string()), ("q".to_string(), "*".to_string())]);
        let act = vec![
            ("0".into(), "p".into(), "p".into()),
            ("0".into(), "q".into(), "q".into()),
            ("1".into(), "p".into(), "q".into()),
            ("1".into(), "q".into(), "p".into()),
        ];
        SpaceAction::new(h, vec!["p".into(), "q".into()], &anchor, &act).unwrap()
    }

    #[test]
    fn swap_action_groupoid_is_pair_groupoid_and_covering() {
        let a = swap_action();
        let (hx, f) = action_groupoid(&a).unwrap();
        assert_eq!(hx.n_arrows(), 4);
        assert!(covering_check(&f).unwrap());
        assert!(iso(&hx, &pair_groupoid(&["p", "q"])));
        // Fibre is the point set as a unit groupoid.
        let g = fibre(&f).unwrap();
        assert!(iso(&g, &unit_groupoid(&["p", "q"])));
    }

    #[test]
    fn trivial_point_action_recovers_group() {
        let h = Arc::new(cyclic_group(2));
        let anchor = HashMap::from([("p".to_string(), "*".to_string())]);
        let act = vec![
            ("0".into(), "p".into(), "p".into()),
            ("1".into(), "p".into(), "p".into()),
        ];
        let a = SpaceAction::new(h, vec!["p".into()], &anchor, &act).unwrap();
        let (hx, f) = action_groupoid(&a).unwrap();
        assert!(covering_check(&f).unwrap());
        assert!(iso(&hx, &cyclic_group(2)));
    }

    #[test]
    fn translation_action_groupoid_is_cech_of_source() {
        // Uses a pair groupoid so component ids themselves contain `|`.
        let h = Arc::new(pair_groupoid(&["1", "2"]));
        let a = SpaceAction::translation(&h);
        let (hx, f) = action_groupoid(&a).unwrap();
        assert!(covering_check(&f).unwrap());

        let points: Vec<String> = h.arrows().to_vec();
        let p: HashMap<String, String> = (0..h.n_arrows())
            .map(|l| (h.arrow_id(l).to_string(), h.object_id(h.src(l)).to_string()))
            .collect();
        let cech = cech_groupoid(&points, &p, &h.objects().to_vec()).unwrap();

        // Explicit isomorphism (k, l) -> (k.l, l).
        let f0: HashMap<String, String> =
            points.iter().map(|x| (x.clone(), x.clone())).collect();
        let mut f1 = HashMap::new();
        for (k, l) in h.composable_pairs() {
            let trafo = format!("{}|{}", h.arrow_id(k), h.arrow_id(l));
            let target =
                format!("{}|{}", h.arrow_id(h.comp_unchecked(k, l)), h.arrow_id(l));
            f1.insert(trafo, target);
        }
        let cech_ref = Arc::new(cech);
        let phi = GroupoidFunctor::new(hx.clone(), cech_ref, &f0, &f1).unwrap();
        assert!(validate_functor(&phi).is_valid());
        assert!(phi.is_bijective());
    }

    #[test]
    fn pullback_along_identity_is_the_same_groupoid() {
        let h = Arc::new(cyclic_group(2));
        let points = vec!["*".to_string()];
        let p = HashMap::from([("*".to_string(), "*".to_string())]);
        let (ph, f) = pullback_groupoid(&h, &points, &p).unwrap();
        assert!(fibration_check(&f).unwrap().is_fibration);
        assert!(iso(&ph, &cyclic_group(2)));
    }

    #[test]
    fn pullback_of_unit_groupoid_is_cech() {
        let h = Arc::new(unit_groupoid(&["a", "b"]));
        let points: Vec<String> = vec!["1".into(), "2".into(), "3".into()];
        let p = HashMap::from([
            ("1".to_string(), "a".to_string()),
            ("2".to_string(), "a".to_string()),
            ("3".to_string(), "b".to_string()),
        ]);
        let (ph, f) = pullback_groupoid(&h, &points, &p).unwrap();
        assert_eq!(ph.n_arrows(), 5);
        let cech = cech_groupoid(&points, &p, &["a".into(), "b".into()]).unwrap();
        assert!(iso(&ph, &cech));
        // The fibre of the pullback fibration is the whole Čech groupoid here.
        let g = fibre(&f).unwrap();
        assert_eq!(g.n_arrows(), 5);
    }

    #[test]
    fn pullback_of_group_along_two_points() {
        let h = Arc::new(cyclic_group(2));
        let points: Vec<String> = vec!["1".into(), "2".into()];
        let p = HashMap::from([
            ("1".to_string(), "*".to_string()),
            ("2".to_string(), "*".to_string()),
        ]);
        let (ph, f) = pullback_groupoid(&h, &points, &p).unwrap();
        assert_eq!(ph.n_objects(), 2);
        assert_eq!(ph.n_arrows(), 8);
        assert!(fibration_check(&f).unwrap().is_fibration);
    }

    #[test]
    fn cech_of_injection_is_unit_groupoid() {
        let points: Vec<String> = vec!["1".into(), "2".into()];
        let p = HashMap::from([
            ("1".to_string(), "a".to_string()),
            ("2".to_string(), "b".to_string()),
        ]);
        let c = cech_groupoid(&points, &p, &["a".into(), "b".into()]).unwrap();
        assert!(iso(&c, &unit_groupoid(&["1", "2"])));
    }

    #[test]
    fn cech_arrows_enumerated() {
        let points: Vec<String> = vec!["1".into(), "2".into(), "3".into()];
        let p = HashMap::from([
            ("1".to_string(), "a".to_string()),
            ("2".to_string(), "a".to_string()),
            ("3".to_string(), "b".to_string()),
        ]);
        let c = cech_groupoid(&points, &p, &["a".into(), "b".into()]).unwrap();
        let mut ids: Vec<&String> = c.arrows().iter().collect();
        ids.sort();
        let expected = ["1|1", "1|2", "2|1", "2|2", "3|3"];
        assert_eq!(ids, expected.iter().collect::<Vec<_>>());
        assert!(validate_groupoid(&c).is_valid());
    }

    #[test]
    fn cech_of_constant_map_is_pair_groupoid() {
        let points: Vec<String> = vec!["1".into(), "2".into(), "3".into()];
        let p: HashMap<String, String> =
            points.iter().map(|x| (x.clone(), "y".to_string())).collect();
        let c = cech_groupoid(&points, &p, &["y".into()]).unwrap();
        assert_eq!(c.n_arrows(), 9);
        assert!(iso(&c, &pair_groupoid(&["1", "2", "3"])));
    }

    #[test]
    fn cech_requires_surjectivity() {
        let points: Vec<String> = vec!["1".into()];
        let p = HashMap::from([("1".to_string(), "a".to_string())]);
        let err = cech_groupoid(&points, &p, &["a".into(), "b".into()]).unwrap_err();
        assert!(matches!(err, Error::NotSurjective(_)));
    }

    /// The pair groupoid on {1,2} acting on two points over the trivial
    /// group: an equivalence bibundle.
    fn pair_point_bibundle() -> Bibundle {
        let g = Arc::new(pair_groupoid(&["1", "2"]));
        let h = Arc::new(cyclic_group(1));
        let points: Vec<String> = vec!["v1".into(), "v2".into()];
        let lanchor = HashMap::from([
            ("v1".to_string(), "1".to_string()),
            ("v2".to_string(), "2".to_string()),
        ]);
        let ranchor: HashMap<String, String> =
            points.iter().map(|x| (x.clone(), "*".to_string())).collect();
        let mut lact = Vec::new();
        for i in ["1", "2"] {
            for j in ["1", "2"] {
                lact.push((format!("{i}|{j}"), format!("v{j}"), format!("v{i}")));
            }
        }
        let ract = vec![
            ("v1".to_string(), "0".to_string(), "v1".to_string()),
            ("v2".to_string(), "0".to_string(), "v2".to_string()),
        ];
        Bibundle::new(g, h, points, &lanchor, &ranchor, &lact, &ract).unwrap()
    }

    #[test]
    fn bitransformation_with_trivial_right_groupoid_is_left_action_groupoid() {
        let b = pair_point_bibundle();
        assert!(validate_bibundle(&b).is_valid());
        let (gxh, f) = bitransformation_groupoid(&b).unwrap();
        assert!(fibration_check(&f).unwrap().is_fibration);
        let (gx, _) = action_groupoid(&left_space_action(&b)).unwrap();
        assert!(iso(&gxh, &gx));
        assert!(iso(&fibre(&f).unwrap(), &gx));
    }

    #[test]
    fn bitransformation_with_trivial_left_groupoid_is_mirror() {
        let g = Arc::new(cyclic_group(1));
        let h = Arc::new(cyclic_group(2));
        let points: Vec<String> = vec!["x1".into(), "x2".into()];
        let lanchor: HashMap<String, String> =
            points.iter().map(|x| (x.clone(), "*".to_string())).collect();
        let ranchor = lanchor.clone();
        let lact = vec![
            ("0".to_string(), "x1".to_string(), "x1".to_string()),
            ("0".to_string(), "x2".to_string(), "x2".to_string()),
        ];
        let ract = vec![
            ("x1".to_string(), "0".to_string(), "x1".to_string()),
            ("x2".to_string(), "0".to_string(), "x2".to_string()),
            ("x1".to_string(), "1".to_string(), "x2".to_string()),
            ("x2".to_string(), "1".to_string(), "x1".to_string()),
        ];
        let b = Bibundle::new(g, h, points, &lanchor, &ranchor, &lact, &ract).unwrap();
        let (gxh, f) = bitransformation_groupoid(&b).unwrap();
        assert_eq!(gxh.n_arrows(), 4);
        assert!(fibration_check(&f).unwrap().is_fibration);
        assert!(iso(&gxh, &pair_groupoid(&["x1", "x2"])));
    }

    #[test]
    fn bitransformation_of_commuting_pair_and_swap() {
        // G = pair groupoid on {1,2}, H = Z/2, X = {x11, x12, x21, x22}:
        // G moves the first index, H swaps the second, and the actions
        // commute. 8 (g, x) pairs times 2 arrows of H.
        let g = Arc::new(pair_groupoid(&["1", "2"]));
        let h = Arc::new(cyclic_group(2));
        let points: Vec<String> =
            vec!["x11".into(), "x12".into(), "x21".into(), "x22".into()];
        let lanchor: HashMap<String, String> = points
            .iter()
            .map(|x| (x.clone(), x[1..2].to_string()))
            .collect();
        let ranchor: HashMap<String, String> =
            points.iter().map(|x| (x.clone(), "*".to_string())).collect();
        let mut lact = Vec::new();
        for i in ["1", "2"] {
            for j in ["1", "2"] {
                for k in ["1", "2"] {
                    lact.push((format!("{i}|{j}"), format!("x{j}{k}"), format!("x{i}{k}")));
                }
            }
        }
        let mut ract = Vec::new();
        for i in ["1", "2"] {
            for k in ["1", "2"] {
                ract.push((format!("x{i}{k}"), "0".to_string(), format!("x{i}{k}")));
                let flip = if k == "1" { "2" } else { "1" };
                ract.push((format!("x{i}{k}"), "1".to_string(), format!("x{i}{flip}")));
            }
        }
        let b = Bibundle::new(g, h, points, &lanchor, &ranchor, &lact, &ract).unwrap();
        assert!(validate_bibundle(&b).is_valid());
        let (gxh, f) = bitransformation_groupoid(&b).unwrap();
        assert_eq!(gxh.n_arrows(), 16);
        assert!(validate_groupoid(&gxh).is_valid());
        assert!(fibration_check(&f).unwrap().is_fibration);
        let (gx, _) = action_groupoid(&left_space_action(&b)).unwrap();
        assert!(iso(&fibre(&f).unwrap(), &gx));
    }

    #[test]
    fn linking_of_pair_point_equivalence_is_pair_groupoid_on_three() {
        let b = pair_point_bibundle();
        assert!(equivalence_check(&b));
        let (l, f) = linking_groupoid(&b).unwrap();
        assert_eq!(l.n_arrows(), 9);
        assert!(validate_groupoid(&l).is_valid());
        assert!(iso(&l, &pair_groupoid(&["1", "2", "3"])));
        let report = fibration_check(&f).unwrap();
        assert!(report.is_fibration);
        // Fibre is G disjoint-union H: 4 + 1 arrows.
        let fib = fibre(&f).unwrap();
        assert_eq!(fib.n_arrows(), 5);
    }

    #[test]
    fn linking_of_translation_bibundle_doubles_the_groupoid() {
        let z2 = Arc::new(cyclic_group(2));
        let b = Bibundle::translation(&z2);
        assert!(equivalence_check(&b));
        let (l, f) = linking_groupoid(&b).unwrap();
        assert!(validate_groupoid(&l).is_valid());
        assert!(fibration_check(&f).unwrap().is_fibration);
        assert!(iso(&l, &product_groupoid(&cyclic_group(2), &pair_groupoid(&["1", "2"]))));
    }

    #[test]
    fn linking_rejects_non_free_action() {
        // Z/2 acting trivially on one point over itself: not free.
        let g = Arc::new(cyclic_group(2));
        let h = Arc::new(cyclic_group(2));
        let points: Vec<String> = vec!["x".into()];
        let anchor = HashMap::from([("x".to_string(), "*".to_string())]);
        let acts = vec![
            ("0".to_string(), "x".to_string(), "x".to_string()),
            ("1".to_string(), "x".to_string(), "x".to_string()),
        ];
        let racts = vec![
            ("x".to_string(), "0".to_string(), "x".to_string()),
            ("x".to_string(), "1".to_string(), "x".to_string()),
        ];
        let b = Bibundle::new(g, h, points, &anchor, &anchor, &acts, &racts).unwrap();
        assert!(!equivalence_check(&b));
        let err = linking_groupoid(&b).unwrap_err();
        assert!(matches!(err, Error::NotAnEquivalence(_)));
    }
}
