//! Finite discrete groupoids.
//!
//! A groupoid here is a small category with invertible arrows, given by
//! explicit finite tables. Composition follows the convention
//! `comp(a, b) = a.b` meaning "`b` then `a`": it is defined exactly when
//! `src(a) = rng(b)`, and then `src(a.b) = src(b)` and `rng(a.b) = rng(a)`.
//!
//! Ids are opaque strings. Structural well-formedness (ids resolve, the
//! composition table is defined exactly on composable pairs) is enforced at
//! construction; the algebraic axioms are checked by [`validate_groupoid`],
//! which reports every violation instead of failing.
//!
//! All topological conditions in the source theory (openness of the range
//! and source maps, local compactness) are automatic for finite discrete
//! groupoids and are therefore not represented.

use crate::error::{Error, Result};
use crate::exec;
use crate::report::ValidationReport;
use std::collections::HashMap;
use std::sync::Arc;

/// Shared handle to an immutable groupoid.
pub type GpRef = Arc<FiniteGroupoid>;

/// Raw arrow data used to build a groupoid.
#[derive(Debug, Clone)]
pub struct ArrowSpec {
    pub id: String,
    pub src: String,
    pub rng: String,
    pub inv: String,
}

/// A finite groupoid with explicit source, range, unit, inverse and
/// composition tables.
#[derive(Debug, Clone)]
pub struct FiniteGroupoid {
    objects: Vec<String>,
    arrows: Vec<String>,
    obj_idx: HashMap<String, usize>,
    arr_idx: HashMap<String, usize>,
    src: Vec<usize>,
    rng: Vec<usize>,
    inv: Vec<usize>,
    unit: Vec<usize>,
    comp: HashMap<(usize, usize), usize>,
    by_src: Vec<Vec<usize>>,
    by_rng: Vec<Vec<usize>>,
}

impl PartialEq for FiniteGroupoid {
    fn eq(&self, other: &Self) -> bool {
        self.objects == other.objects
            && self.arrows == other.arrows
            && self.src == other.src
            && self.rng == other.rng
            && self.inv == other.inv
            && self.unit == other.unit
            && self.comp == other.comp
    }
}

impl Eq for FiniteGroupoid {}

impl FiniteGroupoid {
    /// Builds a groupoid from raw tables.
    ///
    /// `units` maps each object id to its unit arrow id, and `comp` lists
    /// entries `(a, b, c)` meaning `a.b = c`. Fails with
    /// [`Error::MalformedGroupoid`] when ids are duplicated or dangling, or
    /// when the composition table is not defined exactly on the composable
    /// pairs. Algebraic axioms are *not* checked here; see
    /// [`validate_groupoid`].
    pub fn new(
        objects: Vec<String>,
        arrows: Vec<ArrowSpec>,
        units: &HashMap<String, String>,
        comp: &[(String, String, String)],
    ) -> Result<Self> {
        let mut obj_idx = HashMap::new();
        for (i, o) in objects.iter().enumerate() {
            if obj_idx.insert(o.clone(), i).is_some() {
                return Err(Error::MalformedGroupoid(format!("duplicate object id `{o}`")));
            }
        }
        let mut arr_idx = HashMap::new();
        for (i, a) in arrows.iter().enumerate() {
            if arr_idx.insert(a.id.clone(), i).is_some() {
                return Err(Error::MalformedGroupoid(format!("duplicate arrow id `{}`", a.id)));
            }
        }
        let look_obj = |id: &String| -> Result<usize> {
            obj_idx.get(id).copied().ok_or_else(|| Error::UnknownObject(id.clone()))
        };
        let look_arr = |id: &String| -> Result<usize> {
            arr_idx.get(id).copied().ok_or_else(|| Error::UnknownArrow(id.clone()))
        };

        let mut src = Vec::with_capacity(arrows.len());
        let mut rng = Vec::with_capacity(arrows.len());
        let mut inv = Vec::with_capacity(arrows.len());
        for a in &arrows {
            src.push(look_obj(&a.src)?);
            rng.push(look_obj(&a.rng)?);
            inv.push(look_arr(&a.inv)?);
        }

        let mut unit = vec![usize::MAX; objects.len()];
        for (o, a) in units {
            unit[look_obj(o)?] = look_arr(a)?;
        }
        if let Some(missing) = unit.iter().position(|&u| u == usize::MAX) {
            return Err(Error::MalformedGroupoid(format!(
                "object `{}` has no unit arrow",
                objects[missing]
            )));
        }

        let mut comp_map = HashMap::with_capacity(comp.len());
        for (a, b, c) in comp {
            let (ai, bi, ci) = (look_arr(a)?, look_arr(b)?, look_arr(c)?);
            if src[ai] != rng[bi] {
                return Err(Error::MalformedGroupoid(format!(
                    "composition `{a}.{b}` defined on a non-composable pair"
                )));
            }
            if comp_map.insert((ai, bi), ci).is_some() {
                return Err(Error::MalformedGroupoid(format!(
                    "composition `{a}.{b}` defined twice"
                )));
            }
        }
        for ai in 0..arrows.len() {
            for bi in 0..arrows.len() {
                if src[ai] == rng[bi] && !comp_map.contains_key(&(ai, bi)) {
                    return Err(Error::MalformedGroupoid(format!(
                        "composable pair `{}`.`{}` has no composition entry",
                        arrows[ai].id, arrows[bi].id
                    )));
                }
            }
        }

        let mut by_src = vec![Vec::new(); objects.len()];
        let mut by_rng = vec![Vec::new(); objects.len()];
        for a in 0..arrows.len() {
            by_src[src[a]].push(a);
            by_rng[rng[a]].push(a);
        }

        Ok(FiniteGroupoid {
            objects,
            arrows: arrows.into_iter().map(|a| a.id).collect(),
            obj_idx,
            arr_idx,
            src,
            rng,
            inv,
            unit,
            comp: comp_map,
            by_src,
            by_rng,
        })
    }

    pub fn n_objects(&self) -> usize {
        self.objects.len()
    }

    pub fn n_arrows(&self) -> usize {
        self.arrows.len()
    }

    pub fn objects(&self) -> &[String] {
        &self.objects
    }

    pub fn arrows(&self) -> &[String] {
        &self.arrows
    }

    pub fn object_id(&self, x: usize) -> &str {
        &self.objects[x]
    }

    pub fn arrow_id(&self, a: usize) -> &str {
        &self.arrows[a]
    }

    pub fn object_index(&self, id: &str) -> Option<usize> {
        self.obj_idx.get(id).copied()
    }

    pub fn arrow_index(&self, id: &str) -> Option<usize> {
        self.arr_idx.get(id).copied()
    }

    pub fn src(&self, a: usize) -> usize {
        self.src[a]
    }

    pub fn rng(&self, a: usize) -> usize {
        self.rng[a]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inv[a]
    }

    pub fn unit(&self, x: usize) -> usize {
        self.unit[x]
    }

    pub fn is_unit(&self, a: usize) -> bool {
        self.unit[self.src[a]] == a
    }

    /// `a.b` ("b then a"), if `src(a) = rng(b)`.
    pub fn comp(&self, a: usize, b: usize) -> Option<usize> {
        self.comp.get(&(a, b)).copied()
    }

    /// `a.b` for a pair known to be composable.
    pub fn comp_unchecked(&self, a: usize, b: usize) -> usize {
        self.comp[&(a, b)]
    }

    /// Arrows with source `x`.
    pub fn arrows_with_src(&self, x: usize) -> &[usize] {
        &self.by_src[x]
    }

    /// Arrows with range `x`.
    pub fn arrows_with_rng(&self, x: usize) -> &[usize] {
        &self.by_rng[x]
    }

    /// All composable pairs `(a, b)` with `src(a) = rng(b)`.
    pub fn composable_pairs(&self) -> Vec<(usize, usize)> {
        let mut pairs = Vec::new();
        for a in 0..self.n_arrows() {
            for &b in &self.by_rng[self.src[a]] {
                pairs.push((a, b));
            }
        }
        pairs
    }

    /// Partition of the objects into orbits; returns the orbit index of each
    /// object, with orbit indices numbered in order of first appearance.
    pub fn orbit_of_objects(&self) -> Vec<usize> {
        let n = self.n_objects();
        let mut repr: Vec<usize> = (0..n).collect();
        fn find(repr: &mut Vec<usize>, mut x: usize) -> usize {
            while repr[x] != x {
                repr[x] = repr[repr[x]];
                x = repr[x];
            }
            x
        }
        for a in 0..self.n_arrows() {
            let (s, r) = (find(&mut repr, self.src[a]), find(&mut repr, self.rng[a]));
            if s != r {
                repr[s.max(r)] = s.min(r);
            }
        }
        let mut label = HashMap::new();
        let mut out = Vec::with_capacity(n);
        for x in 0..n {
            let root = find(&mut repr, x);
            let next = label.len();
            out.push(*label.entry(root).or_insert(next));
        }
        out
    }

    /// The full subgroupoid on the given arrow subset (object set unchanged).
    /// Fails unless the subset is closed under units, inverses and
    /// composition.
    pub fn subgroupoid_on_arrows(&self, keep: &[usize]) -> Result<FiniteGroupoid> {
        let mut in_set = vec![false; self.n_arrows()];
        for &a in keep {
            in_set[a] = true;
        }
        for x in 0..self.n_objects() {
            if !in_set[self.unit[x]] {
                return Err(Error::NotSubgroupoid(format!(
                    "unit arrow of `{}` missing",
                    self.objects[x]
                )));
            }
        }
        for &a in keep {
            if !in_set[self.inv[a]] {
                return Err(Error::NotSubgroupoid(format!(
                    "inverse of `{}` missing",
                    self.arrows[a]
                )));
            }
            for &b in keep {
                if self.src[a] == self.rng[b] && !in_set[self.comp_unchecked(a, b)] {
                    return Err(Error::NotSubgroupoid(format!(
                        "composite `{}`.`{}` missing",
                        self.arrows[a], self.arrows[b]
                    )));
                }
            }
        }
        let arrows: Vec<usize> = (0..self.n_arrows()).filter(|&a| in_set[a]).collect();
        self.sub_tables(self.objects.clone(), &arrows)
    }

    /// Builds the groupoid with the given objects and arrow subset, reusing
    /// this groupoid's tables. Callers must pass closed data.
    fn sub_tables(&self, objects: Vec<String>, arrows: &[usize]) -> Result<FiniteGroupoid> {
        let specs: Vec<ArrowSpec> = arrows
            .iter()
            .map(|&a| ArrowSpec {
                id: self.arrows[a].clone(),
                src: self.objects[self.src[a]].clone(),
                rng: self.objects[self.rng[a]].clone(),
                inv: self.arrows[self.inv[a]].clone(),
            })
            .collect();
        let units: HashMap<String, String> = objects
            .iter()
            .map(|o| {
                let x = self.obj_idx[o];
                (o.clone(), self.arrows[self.unit[x]].clone())
            })
            .collect();
        let mut comp = Vec::new();
        for &a in arrows {
            for &b in arrows {
                if self.src[a] == self.rng[b] {
                    let c = self.comp_unchecked(a, b);
                    comp.push((
                        self.arrows[a].clone(),
                        self.arrows[b].clone(),
                        self.arrows[c].clone(),
                    ));
                }
            }
        }
        FiniteGroupoid::new(objects, specs, &units, &comp)
    }

    /// Restriction to an invariant object subset; see
    /// [`restrict_to_invariant`].
    fn restrict_tables(&self, objs: &[usize]) -> Result<FiniteGroupoid> {
        let keep_obj: Vec<bool> = {
            let mut k = vec![false; self.n_objects()];
            for &x in objs {
                k[x] = true;
            }
            k
        };
        let arrows: Vec<usize> =
            (0..self.n_arrows()).filter(|&a| keep_obj[self.src[a]] && keep_obj[self.rng[a]]).collect();
        let objects: Vec<String> =
            (0..self.n_objects()).filter(|&x| keep_obj[x]).map(|x| self.objects[x].clone()).collect();
        self.sub_tables(objects, &arrows)
    }
}

/// Checks every groupoid axiom and reports all violations.
///
/// The checks are, in order: units have matching source and range, the unit
/// laws, coherence of the composition table with source and range,
/// associativity on all composable triples, and the inverse laws.
pub fn validate_groupoid(g: &FiniteGroupoid) -> ValidationReport {
    let mut report = ValidationReport::new();

    for x in 0..g.n_objects() {
        let u = g.unit(x);
        if g.src(u) != x || g.rng(u) != x {
            report.push(
                "unit-endpoints",
                vec![g.arrow_id(u).into(), g.object_id(x).into()],
                "unit arrow does not start and end at its object",
            );
        }
    }

    for a in 0..g.n_arrows() {
        let us = g.unit(g.src(a));
        let ur = g.unit(g.rng(a));
        if g.comp(a, us) != Some(a) {
            report.push(
                "unit-law",
                vec![g.arrow_id(a).into()],
                format!("a.1_src(a) != a for a = `{}`", g.arrow_id(a)),
            );
        }
        if g.comp(ur, a) != Some(a) {
            report.push(
                "unit-law",
                vec![g.arrow_id(a).into()],
                format!("1_rng(a).a != a for a = `{}`", g.arrow_id(a)),
            );
        }
    }

    for (&(a, b), &c) in &g.comp {
        if g.src(c) != g.src(b) || g.rng(c) != g.rng(a) {
            report.push(
                "composition-endpoints",
                vec![g.arrow_id(a).into(), g.arrow_id(b).into(), g.arrow_id(c).into()],
                "composite has wrong source or range",
            );
        }
    }

    // Associativity over all composable triples, in parallel over the
    // outer arrow.
    let assoc = exec::flat_map_indexed(g.n_arrows(), |a| {
        let mut bad = Vec::new();
        for &b in g.arrows_with_rng(g.src(a)) {
            let ab = g.comp_unchecked(a, b);
            for &c in g.arrows_with_rng(g.src(b)) {
                let bc = g.comp_unchecked(b, c);
                if g.comp(ab, c) != g.comp(a, bc) {
                    bad.push((a, b, c));
                }
            }
        }
        bad
    });
    for (a, b, c) in assoc {
        report.push(
            "associativity",
            vec![g.arrow_id(a).into(), g.arrow_id(b).into(), g.arrow_id(c).into()],
            "(a.b).c != a.(b.c)",
        );
    }

    for a in 0..g.n_arrows() {
        let i = g.inv(a);
        if g.src(i) != g.rng(a) || g.rng(i) != g.src(a) {
            report.push(
                "inverse-endpoints",
                vec![g.arrow_id(a).into()],
                "src(inv(a)) != rng(a)",
            );
        }
        if g.inv(i) != a {
            report.push("inverse-involutive", vec![g.arrow_id(a).into()], "inv(inv(a)) != a");
        }
        if g.src(i) == g.rng(a) && g.comp(a, i) != Some(g.unit(g.rng(a))) {
            report.push(
                "inverse-law",
                vec![g.arrow_id(a).into()],
                "a.inv(a) != 1_rng(a)",
            );
        }
        if g.src(a) == g.rng(i) && g.comp(i, a) != Some(g.unit(g.src(a))) {
            report.push(
                "inverse-law",
                vec![g.arrow_id(a).into()],
                "inv(a).a != 1_src(a)",
            );
        }
    }

    report
}

/// Restriction of `g` to an object subset closed under the orbit relation.
pub fn restrict_to_invariant(g: &FiniteGroupoid, objs: &[String]) -> Result<FiniteGroupoid> {
    let mut keep = vec![false; g.n_objects()];
    let mut idxs = Vec::with_capacity(objs.len());
    for o in objs {
        let x = g.object_index(o).ok_or_else(|| Error::UnknownObject(o.clone()))?;
        keep[x] = true;
        idxs.push(x);
    }
    for a in 0..g.n_arrows() {
        if keep[g.src(a)] != keep[g.rng(a)] {
            return Err(Error::NotInvariant { arrow: g.arrow_id(a).into() });
        }
    }
    g.restrict_tables(&idxs)
}

/// The isotropy bundle: the subgroupoid of all arrows with equal source and
/// range. For discrete groupoids this is automatically a normal subgroup
/// bundle; conjugation stability is asserted in debug builds.
pub fn isotropy_bundle(g: &FiniteGroupoid) -> FiniteGroupoid {
    let keep: Vec<usize> = (0..g.n_arrows()).filter(|&a| g.src(a) == g.rng(a)).collect();
    g.subgroupoid_on_arrows(&keep)
        .expect("isotropy arrows are closed under units, inverses and composition")
}

/// True when `sub`'s arrows all have equal source and range, include every
/// unit of `g`, and the set is stable under conjugation by arrows of `g`.
pub fn is_normal_subgroup_bundle(g: &FiniteGroupoid, sub_arrows: &[usize]) -> Result<()> {
    let mut in_sub = vec![false; g.n_arrows()];
    for &a in sub_arrows {
        if g.src(a) != g.rng(a) {
            return Err(Error::NotSubgroupBundle(format!(
                "arrow `{}` has distinct source and range",
                g.arrow_id(a)
            )));
        }
        in_sub[a] = true;
    }
    for x in 0..g.n_objects() {
        if !in_sub[g.unit(x)] {
            return Err(Error::NotSubgroupBundle(format!(
                "unit of `{}` missing",
                g.object_id(x)
            )));
        }
    }
    for &a in sub_arrows {
        if !in_sub[g.inv(a)] {
            return Err(Error::NotSubgroupBundle(format!(
                "inverse of `{}` missing",
                g.arrow_id(a)
            )));
        }
        for &b in sub_arrows {
            if g.src(a) == g.rng(b) && !in_sub[g.comp_unchecked(a, b)] {
                return Err(Error::NotSubgroupBundle(format!(
                    "composite `{}`.`{}` missing",
                    g.arrow_id(a), g.arrow_id(b)
                )));
            }
        }
    }
    for l in 0..g.n_arrows() {
        for &a in sub_arrows {
            if g.src(l) == g.rng(a) {
                let conj = g.comp_unchecked(g.comp_unchecked(l, a), g.inv(l));
                if !in_sub[conj] {
                    return Err(Error::NotNormal {
                        arrow: g.arrow_id(a).into(),
                        by: g.arrow_id(l).into(),
                    });
                }
            }
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Stock groupoids
// ---------------------------------------------------------------------------

fn build(
    objects: Vec<String>,
    arrows: Vec<ArrowSpec>,
    units: HashMap<String, String>,
    comp: Vec<(String, String, String)>,
) -> FiniteGroupoid {
    FiniteGroupoid::new(objects, arrows, &units, &comp).expect("stock groupoid tables are well formed")
}

/// The groupoid with the given objects and only unit arrows `1_x`.
pub fn unit_groupoid(objects: &[&str]) -> FiniteGroupoid {
    let mut objs: Vec<String> = objects.iter().map(|s| s.to_string()).collect();
    objs.sort();
    let arrows: Vec<ArrowSpec> = objs
        .iter()
        .map(|o| ArrowSpec {
            id: format!("1_{o}"),
            src: o.clone(),
            rng: o.clone(),
            inv: format!("1_{o}"),
        })
        .collect();
    let units = objs.iter().map(|o| (o.clone(), format!("1_{o}"))).collect();
    let comp = objs
        .iter()
        .map(|o| {
            let u = format!("1_{o}");
            (u.clone(), u.clone(), u)
        })
        .collect();
    build(objs, arrows, units, comp)
}

/// The pair groupoid: one arrow `x|y` from `y` to `x` for every ordered pair.
pub fn pair_groupoid(objects: &[&str]) -> FiniteGroupoid {
    let mut objs: Vec<String> = objects.iter().map(|s| s.to_string()).collect();
    objs.sort();
    let id = |x: &str, y: &str| format!("{x}|{y}");
    let mut arrows = Vec::new();
    for x in &objs {
        for y in &objs {
            arrows.push(ArrowSpec {
                id: id(x, y),
                src: y.clone(),
                rng: x.clone(),
                inv: id(y, x),
            });
        }
    }
    arrows.sort_by(|a, b| a.id.cmp(&b.id));
    let units = objs.iter().map(|o| (o.clone(), id(o, o))).collect();
    let mut comp = Vec::new();
    for x in &objs {
        for y in &objs {
            for z in &objs {
                comp.push((id(x, y), id(y, z), id(x, z)));
            }
        }
    }
    build(objs, arrows, units, comp)
}

/// The cyclic group of order `k` as a one-object groupoid with object `*`
/// and arrows `0, .., k-1`.
pub fn cyclic_group(k: u32) -> FiniteGroupoid {
    assert!(k > 0);
    let objs = vec!["*".to_string()];
    let arrows: Vec<ArrowSpec> = (0..k)
        .map(|j| ArrowSpec {
            id: j.to_string(),
            src: "*".into(),
            rng: "*".into(),
            inv: ((k - j) % k).to_string(),
        })
        .collect();
    let units = HashMap::from([("*".to_string(), "0".to_string())]);
    let mut comp = Vec::new();
    for a in 0..k {
        for b in 0..k {
            comp.push((a.to_string(), b.to_string(), ((a + b) % k).to_string()));
        }
    }
    build(objs, arrows, units, comp)
}

/// A one-object groupoid from an explicit group multiplication table.
/// `mul[i][j]` is the index of the product "row . column" (column first under
/// this crate's composition convention; for testing against standard tables
/// any consistent reading works as long as the table is associative).
pub fn group_from_table(ids: &[&str], mul: &[Vec<usize>], unit: usize) -> FiniteGroupoid {
    let n = ids.len();
    let mut inv = vec![usize::MAX; n];
    for i in 0..n {
        for j in 0..n {
            if mul[i][j] == unit {
                inv[i] = j;
            }
        }
    }
    let objs = vec!["*".to_string()];
    let arrows: Vec<ArrowSpec> = (0..n)
        .map(|i| ArrowSpec {
            id: ids[i].to_string(),
            src: "*".into(),
            rng: "*".into(),
            inv: ids[inv[i]].to_string(),
        })
        .collect();
    let units = HashMap::from([("*".to_string(), ids[unit].to_string())]);
    let mut comp = Vec::new();
    for i in 0..n {
        for j in 0..n {
            comp.push((ids[i].to_string(), ids[j].to_string(), ids[mul[i][j]].to_string()));
        }
    }
    build(objs, arrows, units, comp)
}

/// Disjoint union; ids are prefixed `"{tag}:"` per component.
pub fn disjoint_union(parts: &[(&str, &FiniteGroupoid)]) -> FiniteGroupoid {
    let mut objects = Vec::new();
    let mut arrows = Vec::new();
    let mut units = HashMap::new();
    let mut comp = Vec::new();
    for (tag, g) in parts {
        let obj = |x: usize| format!("{tag}:{}", g.object_id(x));
        let arr = |a: usize| format!("{tag}:{}", g.arrow_id(a));
        for x in 0..g.n_objects() {
            objects.push(obj(x));
            units.insert(obj(x), arr(g.unit(x)));
        }
        for a in 0..g.n_arrows() {
            arrows.push(ArrowSpec { id: arr(a), src: obj(g.src(a)), rng: obj(g.rng(a)), inv: arr(g.inv(a)) });
        }
        for (&(a, b), &c) in &g.comp {
            comp.push((arr(a), arr(b), arr(c)));
        }
    }
    objects.sort();
    arrows.sort_by(|a, b| a.id.cmp(&b.id));
    build(objects, arrows, units, comp)
}

/// Product groupoid `G x H`; ids of pairs are joined with `&`.
pub fn product_groupoid(g: &FiniteGroupoid, h: &FiniteGroupoid) -> FiniteGroupoid {
    let obj = |x: usize, y: usize| format!("{}&{}", g.object_id(x), h.object_id(y));
    let arr = |a: usize, b: usize| format!("{}&{}", g.arrow_id(a), h.arrow_id(b));
    let mut objects = Vec::new();
    let mut units = HashMap::new();
    for x in 0..g.n_objects() {
        for y in 0..h.n_objects() {
            objects.push(obj(x, y));
            units.insert(obj(x, y), arr(g.unit(x), h.unit(y)));
        }
    }
    let mut arrows = Vec::new();
    for a in 0..g.n_arrows() {
        for b in 0..h.n_arrows() {
            arrows.push(ArrowSpec {
                id: arr(a, b),
                src: obj(g.src(a), h.src(b)),
                rng: obj(g.rng(a), h.rng(b)),
                inv: arr(g.inv(a), h.inv(b)),
            });
        }
    }
    let mut comp = Vec::new();
    for (&(a1, b1), &c1) in &g.comp {
        for (&(a2, b2), &c2) in &h.comp {
            comp.push((arr(a1, a2), arr(b1, b2), arr(c1, c2)));
        }
    }
    objects.sort();
    arrows.sort_by(|a, b| a.id.cmp(&b.id));
    build(objects, arrows, units, comp)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_groupoid_on_two_objects_is_valid() {
        // The four-arrow groupoid K with two objects.
        let k = pair_groupoid(&["a", "b"]);
        assert_eq!(k.n_objects(), 2);
        assert_eq!(k.n_arrows(), 4);
        assert!(validate_groupoid(&k).is_valid());
    }

    #[test]
    fn unit_groupoid_is_valid() {
        let g = unit_groupoid(&["1", "2", "3"]);
        assert_eq!(g.n_arrows(), 3);
        assert!(validate_groupoid(&g).is_valid());
    }

    #[test]
    fn idempotent_non_unit_violates_inverse_law() {
        // One object, arrows {1, g} with g.g = g and inv(g) = g.
        let objs = vec!["*".to_string()];
        let arrows = vec![
            ArrowSpec { id: "1".into(), src: "*".into(), rng: "*".into(), inv: "1".into() },
            ArrowSpec { id: "g".into(), src: "*".into(), rng: "*".into(), inv: "g".into() },
        ];
        let units = HashMap::from([("*".to_string(), "1".to_string())]);
        let comp = vec![
            ("1".into(), "1".into(), "1".into()),
            ("1".into(), "g".into(), "g".into()),
            ("g".into(), "1".into(), "g".into()),
            ("g".into(), "g".into(), "g".into()),
        ];
        let g = FiniteGroupoid::new(objs, arrows, &units, &comp).unwrap();
        let report = validate_groupoid(&g);
        assert!(!report.is_valid());
        assert!(report.has_rule("inverse-law"));
        assert!(!report.has_rule("associativity"));
    }

    #[test]
    fn missing_composition_entry_is_structural() {
        let objs = vec!["*".to_string()];
        let arrows = vec![ArrowSpec {
            id: "1".into(),
            src: "*".into(),
            rng: "*".into(),
            inv: "1".into(),
        }];
        let units = HashMap::from([("*".to_string(), "1".to_string())]);
        let err = FiniteGroupoid::new(objs, arrows, &units, &[]).unwrap_err();
        assert!(matches!(err, Error::MalformedGroupoid(_)));
    }

    #[test]
    fn cyclic_group_tables() {
        let z4 = cyclic_group(4);
        assert!(validate_groupoid(&z4).is_valid());
        let a1 = z4.arrow_index("1").unwrap();
        let a3 = z4.arrow_index("3").unwrap();
        assert_eq!(z4.comp(a1, a3), Some(z4.arrow_index("0").unwrap()));
        assert_eq!(z4.inv(a1), a3);
    }

    #[test]
    fn restriction_requires_invariance() {
        let p = pair_groupoid(&["1", "2", "3"]);
        let err = restrict_to_invariant(&p, &["1".into(), "2".into()]).unwrap_err();
        assert!(matches!(err, Error::NotInvariant { .. }));

        let g = disjoint_union(&[("A", &cyclic_group(2)), ("B", &cyclic_group(3))]);
        let got = restrict_to_invariant(&g, &["A:*".into()]).unwrap();
        assert_eq!(got.n_arrows(), 2);
        assert!(validate_groupoid(&got).is_valid());

        // objs = all objects gives the groupoid back.
        let all: Vec<String> = g.objects().to_vec();
        assert_eq!(restrict_to_invariant(&g, &all).unwrap(), g);
    }

    #[test]
    fn isotropy_of_pair_groupoid_is_units() {
        let p = pair_groupoid(&["1", "2"]);
        let iso = isotropy_bundle(&p);
        assert_eq!(iso.n_arrows(), 2);
        assert!(iso.arrows().iter().all(|a| a.contains('|')));
    }

    #[test]
    fn isotropy_of_group_is_whole_group() {
        let z4 = cyclic_group(4);
        assert_eq!(isotropy_bundle(&z4), z4);
    }

    #[test]
    fn orbits_of_disjoint_union() {
        let g = disjoint_union(&[("A", &pair_groupoid(&["1", "2"])), ("B", &cyclic_group(2))]);
        let orbits = g.orbit_of_objects();
        assert_eq!(orbits.len(), 3);
        let a1 = g.object_index("A:1").unwrap();
        let a2 = g.object_index("A:2").unwrap();
        let b = g.object_index("B:*").unwrap();
        assert_eq!(orbits[a1], orbits[a2]);
        assert_ne!(orbits[a1], orbits[b]);
    }
}
