//! Functors between finite groupoids, the fibration and covering criteria,
//! fibres, fibre slices, and quotients by normal subgroup bundles.
//!
//! For finite discrete groupoids the openness half of the fibration
//! condition is automatic, so a functor `F: L -> H` is a fibration exactly
//! when the map `l -> (F1(l), src(l))` is onto the set of pairs `(h, x)`
//! with `src(h) = F0(x)`, and a covering when that map is bijective.

use crate::error::{Error, Result};
use crate::exec;
use crate::groupoid::{is_normal_subgroup_bundle, FiniteGroupoid, GpRef};
use crate::report::ValidationReport;
use std::collections::{HashMap, HashSet};
use std::sync::Arc;

/// A functor between two finite groupoids: an object map and an arrow map.
#[derive(Debug, Clone)]
pub struct GroupoidFunctor {
    dom: GpRef,
    cod: GpRef,
    f0: Vec<usize>,
    f1: Vec<usize>,
}

impl GroupoidFunctor {
    /// Builds a functor from id-level maps. Fails when the maps are not
    /// total or mention unknown ids; the functor axioms themselves are
    /// checked by [`validate_functor`].
    pub fn new(
        dom: GpRef,
        cod: GpRef,
        f0: &HashMap<String, String>,
        f1: &HashMap<String, String>,
    ) -> Result<Self> {
        let mut obj_map = Vec::with_capacity(dom.n_objects());
        for x in 0..dom.n_objects() {
            let id = dom.object_id(x);
            let target = f0
                .get(id)
                .ok_or_else(|| Error::MalformedFunctor(format!("object `{id}` has no image")))?;
            obj_map.push(
                cod.object_index(target).ok_or_else(|| Error::UnknownObject(target.clone()))?,
            );
        }
        let mut arr_map = Vec::with_capacity(dom.n_arrows());
        for a in 0..dom.n_arrows() {
            let id = dom.arrow_id(a);
            let target = f1
                .get(id)
                .ok_or_else(|| Error::MalformedFunctor(format!("arrow `{id}` has no image")))?;
            arr_map.push(
                cod.arrow_index(target).ok_or_else(|| Error::UnknownArrow(target.clone()))?,
            );
        }
        Ok(GroupoidFunctor { dom, cod, f0: obj_map, f1: arr_map })
    }

    /// Builds a functor from index-level maps (internal constructions).
    pub fn from_indices(dom: GpRef, cod: GpRef, f0: Vec<usize>, f1: Vec<usize>) -> Self {
        debug_assert_eq!(f0.len(), dom.n_objects());
        debug_assert_eq!(f1.len(), dom.n_arrows());
        GroupoidFunctor { dom, cod, f0, f1 }
    }

    pub fn identity(g: GpRef) -> Self {
        let f0 = (0..g.n_objects()).collect();
        let f1 = (0..g.n_arrows()).collect();
        GroupoidFunctor { dom: g.clone(), cod: g, f0, f1 }
    }

    pub fn dom(&self) -> &GpRef {
        &self.dom
    }

    pub fn cod(&self) -> &GpRef {
        &self.cod
    }

    pub fn f0(&self, x: usize) -> usize {
        self.f0[x]
    }

    pub fn f1(&self, a: usize) -> usize {
        self.f1[a]
    }

    /// `self . inner` (apply `inner` first). Requires `inner.cod == self.dom`.
    pub fn compose(&self, inner: &GroupoidFunctor) -> Result<GroupoidFunctor> {
        if *inner.cod != *self.dom {
            return Err(Error::MalformedFunctor(
                "codomain of the inner functor differs from the domain of the outer".into(),
            ));
        }
        Ok(GroupoidFunctor {
            dom: inner.dom.clone(),
            cod: self.cod.clone(),
            f0: inner.f0.iter().map(|&x| self.f0[x]).collect(),
            f1: inner.f1.iter().map(|&a| self.f1[a]).collect(),
        })
    }

    /// True if both the object and arrow maps are bijections; together with
    /// a valid functor structure this is an isomorphism of groupoids.
    pub fn is_bijective(&self) -> bool {
        let mut seen_obj = vec![false; self.cod.n_objects()];
        for &x in &self.f0 {
            if seen_obj[x] {
                return false;
            }
            seen_obj[x] = true;
        }
        let mut seen_arr = vec![false; self.cod.n_arrows()];
        for &a in &self.f1 {
            if seen_arr[a] {
                return false;
            }
            seen_arr[a] = true;
        }
        seen_obj.iter().all(|&b| b) && seen_arr.iter().all(|&b| b)
    }
}

/// Checks the functor axioms: compatibility with source, range, units and
/// composition.
pub fn validate_functor(f: &GroupoidFunctor) -> ValidationReport {
    let mut report = ValidationReport::new();
    let (dom, cod) = (&f.dom, &f.cod);
    for a in 0..dom.n_arrows() {
        if f.f0(dom.src(a)) != cod.src(f.f1(a)) {
            report.push("functor-src", vec![dom.arrow_id(a).into()], "F0(src(a)) != src(F1(a))");
        }
        if f.f0(dom.rng(a)) != cod.rng(f.f1(a)) {
            report.push("functor-rng", vec![dom.arrow_id(a).into()], "F0(rng(a)) != rng(F1(a))");
        }
    }
    for x in 0..dom.n_objects() {
        if f.f1(dom.unit(x)) != cod.unit(f.f0(x)) {
            report.push("functor-unit", vec![dom.object_id(x).into()], "F1(1_x) != 1_F0(x)");
        }
    }
    let bad = exec::flat_map_indexed(dom.n_arrows(), |a| {
        let mut bad = Vec::new();
        for &b in dom.arrows_with_rng(dom.src(a)) {
            let ab = dom.comp_unchecked(a, b);
            if cod.comp(f.f1(a), f.f1(b)) != Some(f.f1(ab)) {
                bad.push((a, b));
            }
        }
        bad
    });
    for (a, b) in bad {
        report.push(
            "functor-multiplicative",
            vec![dom.arrow_id(a).into(), dom.arrow_id(b).into()],
            "F1(a.b) != F1(a).F1(b)",
        );
    }
    report
}

fn require_valid(f: &GroupoidFunctor) -> Result<()> {
    let report = validate_functor(f);
    if report.is_valid() {
        Ok(())
    } else {
        Err(Error::InvalidFunctor(format!("{} violations", report.violations.len())))
    }
}

/// Result of the fibration criterion.
#[derive(Debug, Clone)]
pub struct FibrationReport {
    pub is_fibration: bool,
    /// Pairs `(h, x)` with `src(h) = F0(x)` not covered by any arrow.
    pub missing: Vec<(String, String)>,
}

/// Surjectivity of `l -> (F1(l), src(l))` onto `{(h, x) : src(h) = F0(x)}`.
pub fn fibration_check(f: &GroupoidFunctor) -> Result<FibrationReport> {
    require_valid(f)?;
    let covered: HashSet<(usize, usize)> =
        (0..f.dom.n_arrows()).map(|l| (f.f1(l), f.dom.src(l))).collect();
    let mut missing = Vec::new();
    for h in 0..f.cod.n_arrows() {
        for x in 0..f.dom.n_objects() {
            if f.cod.src(h) == f.f0(x) && !covered.contains(&(h, x)) {
                missing.push((f.cod.arrow_id(h).to_string(), f.dom.object_id(x).to_string()));
            }
        }
    }
    Ok(FibrationReport { is_fibration: missing.is_empty(), missing })
}

/// Bijectivity of `l -> (F1(l), src(l))`; equivalently, a fibration whose
/// fibre has only unit arrows.
pub fn covering_check(f: &GroupoidFunctor) -> Result<bool> {
    require_valid(f)?;
    let mut seen = HashSet::new();
    for l in 0..f.dom.n_arrows() {
        if !seen.insert((f.f1(l), f.dom.src(l))) {
            return Ok(false);
        }
    }
    Ok(fibration_check(f)?.is_fibration)
}

/// The fibre subgroupoid: all objects of the domain, and the arrows sent to
/// unit arrows of the codomain.
pub fn fibre(f: &GroupoidFunctor) -> Result<FiniteGroupoid> {
    require_valid(f)?;
    let keep: Vec<usize> = (0..f.dom.n_arrows())
        .filter(|&g| f.f1(g) == f.cod.unit(f.f0(f.dom.src(g))))
        .collect();
    f.dom
        .subgroupoid_on_arrows(&keep)
        .map_err(|e| Error::InvalidFunctor(format!("fibre is not a subgroupoid: {e}")))
}

fn require_fibration(f: &GroupoidFunctor) -> Result<()> {
    let report = fibration_check(f)?;
    if report.is_fibration {
        Ok(())
    } else {
        Err(Error::NotAFibration { missing: report.missing.len() })
    }
}

/// Whether left multiplication of the fibre on the domain arrows is a
/// principal bundle over `(F1, src)`: the map `(g, l) -> (g.l, l)` must be a
/// bijection onto the pairs with equal `(F1, src)`.
pub fn principal_bundle_check(f: &GroupoidFunctor) -> Result<bool> {
    require_fibration(f)?;
    let fib = fibre(f)?;
    let dom = &f.dom;
    let fibre_arrows: Vec<usize> =
        fib.arrows().iter().map(|id| dom.arrow_index(id).unwrap()).collect();

    let mut image = HashMap::new();
    for &g in &fibre_arrows {
        for l in 0..dom.n_arrows() {
            if dom.src(g) == dom.rng(l) {
                let gl = dom.comp_unchecked(g, l);
                *image.entry((gl, l)).or_insert(0usize) += 1;
            }
        }
    }
    let mut expected = 0usize;
    for l1 in 0..dom.n_arrows() {
        for l2 in 0..dom.n_arrows() {
            if f.f1(l1) == f.f1(l2) && dom.src(l1) == dom.src(l2) {
                expected += 1;
                if image.get(&(l1, l2)) != Some(&1) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(image.len() == expected && image.values().all(|&c| c == 1))
}

/// A fibre slice `L_h = F1^{-1}(h)` of a fibration.
#[derive(Debug, Clone)]
pub struct FibreSlice {
    /// Arrow index of `h` in the codomain.
    pub h: usize,
    /// Domain arrow indices with `F1 = h`.
    pub members: Vec<usize>,
}

/// The slice `L_h` over a codomain arrow id.
pub fn fibre_slice(f: &GroupoidFunctor, h_id: &str) -> Result<FibreSlice> {
    require_fibration(f)?;
    let h = f.cod.arrow_index(h_id).ok_or_else(|| Error::UnknownArrow(h_id.into()))?;
    Ok(slice_by_index(f, h))
}

fn slice_by_index(f: &GroupoidFunctor, h: usize) -> FibreSlice {
    FibreSlice { h, members: (0..f.dom.n_arrows()).filter(|&l| f.f1(l) == h).collect() }
}

/// Fibre arrows lying in `G_y` for a codomain object `y`: arrows sent to
/// units whose objects map to `y`.
fn fibre_arrows_over(f: &GroupoidFunctor, y: usize) -> Vec<usize> {
    (0..f.dom.n_arrows())
        .filter(|&g| {
            f.f1(g) == f.cod.unit(f.f0(f.dom.src(g))) && f.f0(f.dom.src(g)) == y
        })
        .collect()
}

/// Verifies that `L_h` with its left `G_rng(h)` and right `G_src(h)`
/// multiplication actions is a groupoid equivalence: both actions are free,
/// left orbits correspond to the objects over `src(h)` via the source map,
/// and right orbits to the objects over `rng(h)` via the range map.
pub fn verify_slice_equivalence(f: &GroupoidFunctor, h_id: &str) -> Result<bool> {
    let slice = fibre_slice(f, h_id)?;
    let h = slice.h;
    let dom = &f.dom;
    let left = fibre_arrows_over(f, f.cod.rng(h));
    let right = fibre_arrows_over(f, f.cod.src(h));

    // Freeness of both actions.
    for &g in &left {
        for &l in &slice.members {
            if dom.src(g) == dom.rng(l) && dom.comp_unchecked(g, l) == l && !dom.is_unit(g) {
                return Ok(false);
            }
        }
    }
    for &l in &slice.members {
        for &g in &right {
            if dom.src(l) == dom.rng(g) && dom.comp_unchecked(l, g) == l && !dom.is_unit(g) {
                return Ok(false);
            }
        }
    }

    // Left orbits <-> objects over src(h), via src.
    let left_related = |l1: usize, l2: usize| {
        left.iter().any(|&g| dom.src(g) == dom.rng(l2) && dom.comp_unchecked(g, l2) == l1)
    };
    for &l1 in &slice.members {
        for &l2 in &slice.members {
            let same_src = dom.src(l1) == dom.src(l2);
            if same_src != left_related(l1, l2) {
                return Ok(false);
            }
        }
    }
    let src_objects: HashSet<usize> =
        (0..dom.n_objects()).filter(|&x| f.f0(x) == f.cod.src(h)).collect();
    let hit_src: HashSet<usize> = slice.members.iter().map(|&l| dom.src(l)).collect();
    if hit_src != src_objects {
        return Ok(false);
    }

    // Right orbits <-> objects over rng(h), via rng.
    let right_related = |l1: usize, l2: usize| {
        right.iter().any(|&g| dom.src(l2) == dom.rng(g) && dom.comp_unchecked(l2, g) == l1)
    };
    for &l1 in &slice.members {
        for &l2 in &slice.members {
            let same_rng = dom.rng(l1) == dom.rng(l2);
            if same_rng != right_related(l1, l2) {
                return Ok(false);
            }
        }
    }
    let rng_objects: HashSet<usize> =
        (0..dom.n_objects()).filter(|&x| f.f0(x) == f.cod.rng(h)).collect();
    let hit_rng: HashSet<usize> = slice.members.iter().map(|&l| dom.rng(l)).collect();
    if hit_rng != rng_objects {
        return Ok(false);
    }

    Ok(true)
}

/// Verifies that multiplication restricts to a bijection
/// `L_h1 x_{G_y} L_h2 -> L_{h1.h2}` for a composable pair: the map
/// `(l1, l2) -> l1.l2` is onto, and two pairs have equal product exactly
/// when they differ by the middle `G_y` action.
pub fn slice_composition_check(f: &GroupoidFunctor, h1_id: &str, h2_id: &str) -> Result<bool> {
    require_fibration(f)?;
    let dom = &f.dom;
    let h1 = f.cod.arrow_index(h1_id).ok_or_else(|| Error::UnknownArrow(h1_id.into()))?;
    let h2 = f.cod.arrow_index(h2_id).ok_or_else(|| Error::UnknownArrow(h2_id.into()))?;
    let h12 = f
        .cod
        .comp(h1, h2)
        .ok_or_else(|| Error::MalformedFunctor("arrows are not composable".into()))?;
    let s1 = slice_by_index(f, h1);
    let s2 = slice_by_index(f, h2);
    let s12 = slice_by_index(f, h12);
    let middle = fibre_arrows_over(f, f.cod.src(h1));

    let pairs: Vec<(usize, usize)> = s1
        .members
        .iter()
        .flat_map(|&l1| {
            s2.members
                .iter()
                .filter(move |&&l2| dom.src(l1) == dom.rng(l2))
                .map(move |&l2| (l1, l2))
        })
        .collect();

    let mut hit: HashSet<usize> = HashSet::new();
    for &(l1, l2) in &pairs {
        hit.insert(dom.comp_unchecked(l1, l2));
    }
    if !s12.members.iter().all(|l| hit.contains(l)) {
        return Ok(false);
    }

    // Same product <=> related by the middle action (l1.g, inv(g).l2).
    let related = |p: (usize, usize), q: (usize, usize)| {
        middle.iter().any(|&g| {
            dom.src(p.0) == dom.rng(g)
                && dom.comp_unchecked(p.0, g) == q.0
                && dom.comp_unchecked(dom.inv(g), p.1) == q.1
        })
    };
    for &p in &pairs {
        for &q in &pairs {
            let same = dom.comp_unchecked(p.0, p.1) == dom.comp_unchecked(q.0, q.1);
            if same != related(p, q) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Quotient of `l` by a normal subgroup bundle, given by the arrow ids of
/// the bundle. Returns the quotient groupoid and the projection functor,
/// which is a fibration with the bundle as fibre. Quotient arrow ids are the
/// least member of each coset in `l`'s arrow order.
pub fn quotient_by_normal_bundle(
    l: &GpRef,
    sub_arrow_ids: &[String],
) -> Result<(GpRef, GroupoidFunctor)> {
    let mut sub = Vec::with_capacity(sub_arrow_ids.len());
    for id in sub_arrow_ids {
        sub.push(l.arrow_index(id).ok_or_else(|| Error::UnknownArrow(id.clone()))?);
    }
    is_normal_subgroup_bundle(l, &sub)?;

    // Right cosets a.G; the representative is the least member.
    let mut rep = vec![usize::MAX; l.n_arrows()];
    for a in 0..l.n_arrows() {
        let mut least = a;
        for &g in &sub {
            if l.src(a) == l.rng(g) {
                least = least.min(l.comp_unchecked(a, g));
            }
        }
        rep[a] = least;
    }
    let reps: Vec<usize> = {
        let mut v: Vec<usize> = (0..l.n_arrows()).filter(|&a| rep[a] == a).collect();
        v.sort_unstable();
        v
    };

    let objects: Vec<String> = l.objects().to_vec();
    let arrows: Vec<crate::groupoid::ArrowSpec> = reps
        .iter()
        .map(|&a| crate::groupoid::ArrowSpec {
            id: l.arrow_id(a).into(),
            src: l.object_id(l.src(a)).into(),
            rng: l.object_id(l.rng(a)).into(),
            inv: l.arrow_id(rep[l.inv(a)]).into(),
        })
        .collect();
    let units: HashMap<String, String> = (0..l.n_objects())
        .map(|x| (l.object_id(x).to_string(), l.arrow_id(rep[l.unit(x)]).to_string()))
        .collect();
    let mut comp = Vec::new();
    for &a in &reps {
        for &b in &reps {
            if l.src(a) == l.rng(b) {
                comp.push((
                    l.arrow_id(a).to_string(),
                    l.arrow_id(b).to_string(),
                    l.arrow_id(rep[l.comp_unchecked(a, b)]).to_string(),
                ));
            }
        }
    }
    let h = Arc::new(FiniteGroupoid::new(objects, arrows, &units, &comp)?);

    let f0 = (0..l.n_objects())
        .map(|x| h.object_index(l.object_id(x)).unwrap())
        .collect();
    let f1 = (0..l.n_arrows())
        .map(|a| h.arrow_index(l.arrow_id(rep[a])).unwrap())
        .collect();
    let proj = GroupoidFunctor::from_indices(l.clone(), h.clone(), f0, f1);
    Ok((h, proj))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groupoid::{cyclic_group, pair_groupoid, unit_groupoid, validate_groupoid};

    fn z4_to_z2() -> GroupoidFunctor {
        let z4 = Arc::new(cyclic_group(4));
        let z2 = Arc::new(cyclic_group(2));
        let f0 = HashMap::from([("*".to_string(), "*".to_string())]);
        let f1: HashMap<String, String> =
            (0..4).map(|j| (j.to_string(), (j % 2).to_string())).collect();
        GroupoidFunctor::new(z4, z2, &f0, &f1).unwrap()
    }

    #[test]
    fn reduction_mod_two_is_a_valid_functor_and_fibration() {
        let f = z4_to_z2();
        assert!(validate_functor(&f).is_valid());
        let report = fibration_check(&f).unwrap();
        assert!(report.is_fibration);
        assert!(report.missing.is_empty());
        // Not a covering: the fibre has a non-unit arrow.
        assert!(!covering_check(&f).unwrap());
    }

    #[test]
    fn identity_functor_is_a_covering() {
        let k = Arc::new(pair_groupoid(&["a", "b"]));
        let f = GroupoidFunctor::identity(k);
        assert!(validate_functor(&f).is_valid());
        assert!(covering_check(&f).unwrap());
        assert!(principal_bundle_check(&f).unwrap());
    }

    #[test]
    fn swapping_an_arrow_with_a_unit_breaks_multiplicativity() {
        let k = Arc::new(pair_groupoid(&["a", "b"]));
        let mut f1: HashMap<String, String> =
            k.arrows().iter().map(|a| (a.clone(), a.clone())).collect();
        // Swap the non-unit arrow b|a with the unit a|a.
        f1.insert("b|a".into(), "a|a".into());
        f1.insert("a|a".into(), "b|a".into());
        let f0: HashMap<String, String> =
            k.objects().iter().map(|o| (o.clone(), o.clone())).collect();
        let f = GroupoidFunctor::new(k.clone(), k, &f0, &f1).unwrap();
        let report = validate_functor(&f);
        assert!(!report.is_valid());
    }

    #[test]
    fn fibre_of_reduction_is_kernel() {
        let f = z4_to_z2();
        let g = fibre(&f).unwrap();
        assert_eq!(g.n_arrows(), 2);
        assert!(g.arrow_index("0").is_some());
        assert!(g.arrow_index("2").is_some());
        assert!(validate_groupoid(&g).is_valid());
    }

    #[test]
    fn group_fibration_is_a_principal_bundle() {
        let f = z4_to_z2();
        assert!(principal_bundle_check(&f).unwrap());
    }

    #[test]
    fn slices_of_reduction_are_equivalences() {
        let f = z4_to_z2();
        let s = fibre_slice(&f, "1").unwrap();
        let ids: Vec<&str> = s.members.iter().map(|&l| f.dom().arrow_id(l)).collect();
        assert_eq!(ids, vec!["1", "3"]);
        assert!(verify_slice_equivalence(&f, "1").unwrap());
        assert!(verify_slice_equivalence(&f, "0").unwrap());
        assert!(slice_composition_check(&f, "1", "1").unwrap());
    }

    #[test]
    fn quotient_of_z4_by_kernel_is_z2() {
        let z4 = Arc::new(cyclic_group(4));
        let (h, proj) = quotient_by_normal_bundle(&z4, &["0".into(), "2".into()]).unwrap();
        assert_eq!(h.n_arrows(), 2);
        assert!(validate_groupoid(&h).is_valid());
        let report = fibration_check(&proj).unwrap();
        assert!(report.is_fibration);
        // Round trip: the fibre of the projection is the bundle again.
        let g = fibre(&proj).unwrap();
        let mut ids: Vec<&String> = g.arrows().iter().collect();
        ids.sort();
        assert_eq!(ids, [&"0".to_string(), &"2".to_string()]);
    }

    #[test]
    fn quotient_rejects_non_normal_and_non_bundle_input() {
        let k = Arc::new(pair_groupoid(&["a", "b"]));
        // Not a subgroup bundle: contains an arrow with src != rng.
        let err =
            quotient_by_normal_bundle(&k, &["a|a".into(), "b|b".into(), "b|a".into()]).unwrap_err();
        assert!(matches!(err, Error::NotSubgroupBundle(_)));
    }

    #[test]
    fn quotient_by_full_isotropy_of_group_is_unit_groupoid() {
        let z4 = Arc::new(cyclic_group(4));
        let all: Vec<String> = z4.arrows().to_vec();
        let (h, _) = quotient_by_normal_bundle(&z4, &all).unwrap();
        assert_eq!(h.n_objects(), unit_groupoid(&["*"]).n_objects());
        assert_eq!(h.n_arrows(), 1);
        assert!(validate_groupoid(&h).is_valid());
    }
}
