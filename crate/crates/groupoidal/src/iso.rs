//! Abstract isomorphism testing for finite groupoids, and the brute-force
//! search for an actor exhibiting a fibration as a classical action.
//!
//! Both searches are backtracking with invariant pruning and are intended
//! for desk-scale instances; above the configured bound they return
//! `Inconclusive` rather than run away.

use crate::error::Result;
use crate::functor::{fibration_check, GroupoidFunctor};
use crate::groupoid::FiniteGroupoid;

/// Outcome of a bounded search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchResult {
    Found,
    NotFound,
    /// The instance exceeded the search bound.
    Inconclusive,
}

/// Default arrow-count bound for [`groupoids_isomorphic`].
pub const ISO_SEARCH_BOUND: usize = 64;

fn object_signature(g: &FiniteGroupoid, orbit: &[usize], orbit_size: &[usize]) -> Vec<(usize, usize, usize)> {
    (0..g.n_objects())
        .map(|x| {
            let out = g.arrows_with_src(x).len();
            let iso = g
                .arrows_with_src(x)
                .iter()
                .filter(|&&a| g.rng(a) == x)
                .count();
            (out, iso, orbit_size[orbit[x]])
        })
        .collect()
}

fn arrow_signature(
    g: &FiniteGroupoid,
    obj_sig: &[(usize, usize, usize)],
) -> Vec<(bool, bool, usize, (usize, usize, usize), (usize, usize, usize))> {
    (0..g.n_arrows())
        .map(|a| {
            let iso = g.src(a) == g.rng(a);
            let order = if iso {
                let mut k = 1usize;
                let mut cur = a;
                let unit = g.unit(g.src(a));
                while cur != unit && k <= g.n_arrows() {
                    cur = g.comp_unchecked(a, cur);
                    k += 1;
                }
                if cur == unit { k } else { 0 }
            } else {
                0
            };
            (g.is_unit(a), iso, order, obj_sig[g.src(a)], obj_sig[g.rng(a)])
        })
        .collect()
}

/// Backtracking isomorphism test with degree/orbit/order pruning.
/// Instances with more than `max_arrows` arrows return `Inconclusive`.
pub fn groupoids_isomorphic(
    g: &FiniteGroupoid,
    h: &FiniteGroupoid,
    max_arrows: usize,
) -> SearchResult {
    if g.n_objects() != h.n_objects() || g.n_arrows() != h.n_arrows() {
        return SearchResult::NotFound;
    }
    if g.n_arrows() > max_arrows {
        return SearchResult::Inconclusive;
    }

    let g_orbit = g.orbit_of_objects();
    let h_orbit = h.orbit_of_objects();
    let orbit_sizes = |orbit: &[usize]| {
        let n = orbit.iter().max().map_or(0, |&m| m + 1);
        let mut sizes = vec![0usize; n];
        for &o in orbit {
            sizes[o] += 1;
        }
        sizes
    };
    let g_sizes = orbit_sizes(&g_orbit);
    let h_sizes = orbit_sizes(&h_orbit);
    let g_obj_sig = object_signature(g, &g_orbit, &g_sizes);
    let h_obj_sig = object_signature(h, &h_orbit, &h_sizes);
    let g_sig = arrow_signature(g, &g_obj_sig);
    let h_sig = arrow_signature(h, &h_obj_sig);
    {
        let mut a = g_sig.clone();
        let mut b = h_sig.clone();
        a.sort_unstable();
        b.sort_unstable();
        if a != b {
            return SearchResult::NotFound;
        }
    }

    // Candidates per arrow share the invariant signature.
    let candidates: Vec<Vec<usize>> = (0..g.n_arrows())
        .map(|a| (0..h.n_arrows()).filter(|&b| h_sig[b] == g_sig[a]).collect())
        .collect();

    // Process most-constrained arrows first.
    let mut order: Vec<usize> = (0..g.n_arrows()).collect();
    order.sort_by_key(|&a| candidates[a].len());

    struct State<'a> {
        g: &'a FiniteGroupoid,
        h: &'a FiniteGroupoid,
        candidates: &'a [Vec<usize>],
        order: &'a [usize],
        arr_map: Vec<Option<usize>>,
        obj_map: Vec<Option<usize>>,
        arr_used: Vec<bool>,
        obj_used: Vec<bool>,
    }

    fn consistent(s: &State, a: usize, b: usize) -> bool {
        // Object constraints.
        for (x, y) in [(s.g.src(a), s.h.src(b)), (s.g.rng(a), s.h.rng(b))] {
            match s.obj_map[x] {
                Some(m) if m != y => return false,
                None if s.obj_used[y] => return false,
                _ => {}
            }
        }
        if s.g.src(a) != s.g.rng(a) && s.h.src(b) == s.h.rng(b) {
            return false;
        }
        // Inverse constraint.
        if let Some(ib) = s.arr_map[s.g.inv(a)] {
            if ib != s.h.inv(b) {
                return false;
            }
        }
        // Composition constraints against everything already assigned.
        for c in 0..s.g.n_arrows() {
            let Some(cb) = s.arr_map[c] else { continue };
            if s.g.src(a) == s.g.rng(c) {
                let d = s.g.comp_unchecked(a, c);
                let db = match s.h.comp(b, cb) {
                    Some(db) => db,
                    None => return false,
                };
                if let Some(mapped) = s.arr_map[d] {
                    if mapped != db {
                        return false;
                    }
                }
            }
            if s.g.src(c) == s.g.rng(a) {
                let d = s.g.comp_unchecked(c, a);
                let db = match s.h.comp(cb, b) {
                    Some(db) => db,
                    None => return false,
                };
                if let Some(mapped) = s.arr_map[d] {
                    if mapped != db {
                        return false;
                    }
                }
            }
        }
        true
    }

    fn assign(s: &mut State, pos: usize) -> bool {
        if pos == s.order.len() {
            // Full verification of multiplicativity.
            for a in 0..s.g.n_arrows() {
                let fa = s.arr_map[a].unwrap();
                for &b in s.g.arrows_with_rng(s.g.src(a)) {
                    let fb = s.arr_map[b].unwrap();
                    let fc = s.arr_map[s.g.comp_unchecked(a, b)].unwrap();
                    if s.h.comp(fa, fb) != Some(fc) {
                        return false;
                    }
                }
            }
            return true;
        }
        let a = s.order[pos];
        if s.arr_map[a].is_some() {
            return assign(s, pos + 1);
        }
        for i in 0..s.candidates[a].len() {
            let b = s.candidates[a][i];
            if s.arr_used[b] || !consistent(s, a, b) {
                continue;
            }
            s.arr_map[a] = Some(b);
            s.arr_used[b] = true;
            let mut newly_obj = Vec::new();
            for (x, y) in [(s.g.src(a), s.h.src(b)), (s.g.rng(a), s.h.rng(b))] {
                if s.obj_map[x].is_none() {
                    s.obj_map[x] = Some(y);
                    s.obj_used[y] = true;
                    newly_obj.push((x, y));
                }
            }
            if assign(s, pos + 1) {
                return true;
            }
            s.arr_map[a] = None;
            s.arr_used[b] = false;
            for (x, y) in newly_obj {
                s.obj_map[x] = None;
                s.obj_used[y] = false;
            }
        }
        false
    }

    let mut state = State {
        g,
        h,
        candidates: &candidates,
        order: &order,
        arr_map: vec![None; g.n_arrows()],
        obj_map: vec![None; g.n_objects()],
        arr_used: vec![false; h.n_arrows()],
        obj_used: vec![false; h.n_objects()],
    };
    if assign(&mut state, 0) {
        SearchResult::Found
    } else {
        SearchResult::NotFound
    }
}

/// Brute-force search for an actor exhibiting a fibration `F: L -> H` as a
/// classical action of `H` on the fibre.
///
/// An actor is determined by a section `m(h, x)` of `(F1, src)` over the
/// pairs with `src(h) = F0(x)`, subject to `m(1_{F0(x)}, x) = 1_x` and the
/// cocycle condition `m(h1.h2, x) = m(h1, rng(m(h2, x))) . m(h2, x)`.
/// Instances with `|L1| * |H1|` above `bound` return `Inconclusive`.
pub fn classical_actor_search(f: &GroupoidFunctor, bound: usize) -> Result<SearchResult> {
    let report = fibration_check(f)?;
    if !report.is_fibration {
        return Ok(SearchResult::NotFound);
    }
    let (dom, cod) = (f.dom(), f.cod());
    if dom.n_arrows() * cod.n_arrows() > bound {
        return Ok(SearchResult::Inconclusive);
    }

    // Enumerate the pairs (h, x) with src(h) = F0(x).
    let mut pair_idx = std::collections::HashMap::new();
    let mut pairs = Vec::new();
    for h in 0..cod.n_arrows() {
        for x in 0..dom.n_objects() {
            if cod.src(h) == f.f0(x) {
                pair_idx.insert((h, x), pairs.len());
                pairs.push((h, x));
            }
        }
    }
    let mut candidates: Vec<Vec<usize>> = vec![Vec::new(); pairs.len()];
    for l in 0..dom.n_arrows() {
        if let Some(&p) = pair_idx.get(&(f.f1(l), dom.src(l))) {
            candidates[p].push(l);
        }
    }

    let mut assignment: Vec<Option<usize>> = vec![None; pairs.len()];
    // Unit pairs are forced.
    for (p, &(h, x)) in pairs.iter().enumerate() {
        if h == cod.unit(f.f0(x)) {
            assignment[p] = Some(dom.unit(x));
        }
    }

    // Checks every cocycle instance whose three participants are assigned.
    let cocycle_ok = |assignment: &[Option<usize>]| -> bool {
        for (&(h2, x), &p2) in &pair_idx {
            let Some(m2) = assignment[p2] else { continue };
            for h1 in 0..cod.n_arrows() {
                if cod.src(h1) != cod.rng(h2) {
                    continue;
                }
                let p1 = pair_idx[&(h1, dom.rng(m2))];
                let Some(m1) = assignment[p1] else { continue };
                let p12 = pair_idx[&(cod.comp_unchecked(h1, h2), x)];
                let Some(m12) = assignment[p12] else { continue };
                if dom.comp_unchecked(m1, m2) != m12 {
                    return false;
                }
            }
        }
        true
    };

    fn assign(
        pos: usize,
        pairs: &[(usize, usize)],
        candidates: &[Vec<usize>],
        assignment: &mut Vec<Option<usize>>,
        cocycle_ok: &dyn Fn(&[Option<usize>]) -> bool,
    ) -> bool {
        if pos == pairs.len() {
            return cocycle_ok(assignment);
        }
        if assignment[pos].is_some() {
            return assign(pos + 1, pairs, candidates, assignment, cocycle_ok);
        }
        for &l in &candidates[pos] {
            assignment[pos] = Some(l);
            if cocycle_ok(assignment)
                && assign(pos + 1, pairs, candidates, assignment, cocycle_ok)
            {
                return true;
            }
            assignment[pos] = None;
        }
        false
    }

    if !cocycle_ok(&assignment) {
        return Ok(SearchResult::NotFound);
    }
    Ok(if assign(0, &pairs, &candidates, &mut assignment, &cocycle_ok) {
        SearchResult::Found
    } else {
        SearchResult::NotFound
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groupoid::{cyclic_group, pair_groupoid, product_groupoid, unit_groupoid};
    use std::collections::HashMap;
    use std::sync::Arc;

    #[test]
    fn isomorphic_to_relabeled_self() {
        let g = pair_groupoid(&["1", "2"]);
        let h = pair_groupoid(&["x", "y"]);
        assert_eq!(groupoids_isomorphic(&g, &h, ISO_SEARCH_BOUND), SearchResult::Found);
    }

    #[test]
    fn z4_is_not_klein_four() {
        let z4 = cyclic_group(4);
        let v4 = product_groupoid(&cyclic_group(2), &cyclic_group(2));
        assert_eq!(groupoids_isomorphic(&z4, &v4, ISO_SEARCH_BOUND), SearchResult::NotFound);
    }

    #[test]
    fn pair_groupoid_is_not_two_groups() {
        let p = pair_groupoid(&["1", "2"]);
        let gg = crate::groupoid::disjoint_union(&[("A", &cyclic_group(2)), ("B", &cyclic_group(2))]);
        assert_eq!(groupoids_isomorphic(&p, &gg, ISO_SEARCH_BOUND), SearchResult::NotFound);
    }

    #[test]
    fn oversized_instances_are_inconclusive() {
        let g = pair_groupoid(&["1", "2"]);
        assert_eq!(groupoids_isomorphic(&g, &g, 2), SearchResult::Inconclusive);
    }

    #[test]
    fn non_split_extension_has_no_actor() {
        let z4 = Arc::new(cyclic_group(4));
        let z2 = Arc::new(cyclic_group(2));
        let f0 = HashMap::from([("*".to_string(), "*".to_string())]);
        let f1: HashMap<String, String> =
            (0..4).map(|j| (j.to_string(), (j % 2).to_string())).collect();
        let f = GroupoidFunctor::new(z4, z2, &f0, &f1).unwrap();
        assert_eq!(classical_actor_search(&f, 10_000).unwrap(), SearchResult::NotFound);
    }

    #[test]
    fn split_extension_has_an_actor() {
        // Z/2 x Z/2 -> Z/2 (first coordinate) splits.
        let v4 = Arc::new(product_groupoid(&cyclic_group(2), &cyclic_group(2)));
        let z2 = Arc::new(cyclic_group(2));
        let f0 = HashMap::from([("*&*".to_string(), "*".to_string())]);
        let f1: HashMap<String, String> = v4
            .arrows()
            .iter()
            .map(|a| (a.clone(), a.split('&').next().unwrap().to_string()))
            .collect();
        let f = GroupoidFunctor::new(v4, z2, &f0, &f1).unwrap();
        assert_eq!(classical_actor_search(&f, 10_000).unwrap(), SearchResult::Found);
    }

    #[test]
    fn functor_to_space_always_has_trivial_actor() {
        let g = Arc::new(pair_groupoid(&["1", "2"]));
        let y = Arc::new(unit_groupoid(&["y"]));
        let f0: HashMap<String, String> =
            g.objects().iter().map(|o| (o.clone(), "y".to_string())).collect();
        let f1: HashMap<String, String> =
            g.arrows().iter().map(|a| (a.clone(), "1_y".to_string())).collect();
        let f = GroupoidFunctor::new(g, y, &f0, &f1).unwrap();
        assert_eq!(classical_actor_search(&f, 10_000).unwrap(), SearchResult::Found);
    }
}
