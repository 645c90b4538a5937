//! Seeded random instances for the property suites: fibrations from
//! classical actions, from quotients by normal subgroup bundles, and from
//! linking groupoids of equivalences, plus random cocycles and saturated
//! matrix bundles. Everything is deterministic in the seed.

use crate::construct::{
    linking_groupoid, transformation_groupoid, Bibundle, ClassicalAction,
};
use crate::fell::{FellBundle, TorusCocycle};
use crate::functor::{quotient_by_normal_bundle, GroupoidFunctor};
use crate::groupoid::{
    cyclic_group, disjoint_union, pair_groupoid, unit_groupoid, FiniteGroupoid, GpRef,
};
use crate::num::NumMode;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::HashMap;
use std::sync::Arc;

/// A generated fibration together with the family it came from.
pub struct RandomFibration {
    pub functor: GroupoidFunctor,
    pub kind: &'static str,
}

fn small_groupoid(rng: &mut ChaCha8Rng) -> FiniteGroupoid {
    match rng.random_range(0..5) {
        0 => cyclic_group(2),
        1 => cyclic_group(3),
        2 => pair_groupoid(&["1", "2"]),
        3 => unit_groupoid(&["1", "2"]),
        _ => cyclic_group(4),
    }
}

/// A cyclic group shifting `k` tagged copies of a small groupoid.
fn shift_action(rng: &mut ChaCha8Rng) -> ClassicalAction {
    let k = rng.random_range(2..=3u32);
    let gamma = small_groupoid(rng);
    let tags: Vec<String> = (0..k).map(|i| format!("c{i}")).collect();
    let parts: Vec<(&str, &FiniteGroupoid)> =
        tags.iter().map(|t| (t.as_str(), &gamma)).collect();
    let g = Arc::new(disjoint_union(&parts));
    let h = Arc::new(cyclic_group(k));

    let anchor0: HashMap<String, String> =
        g.objects().iter().map(|o| (o.clone(), "*".to_string())).collect();
    let retag = |id: &str, by: u32| -> String {
        let (tag, rest) = id.split_once(':').unwrap();
        let i: u32 = tag[1..].parse().unwrap();
        format!("c{}:{rest}", (i + by) % k)
    };
    let mut act0 = Vec::new();
    let mut act1 = Vec::new();
    for j in 0..k {
        for o in g.objects() {
            act0.push((j.to_string(), o.clone(), retag(o, j)));
        }
        for a in g.arrows() {
            act1.push((j.to_string(), a.clone(), retag(a, j)));
        }
    }
    ClassicalAction::new(h, g, &anchor0, &act0, &act1).unwrap()
}

/// Z/2 acting on Z/m by inversion.
fn inversion_action(rng: &mut ChaCha8Rng) -> ClassicalAction {
    let m = rng.random_range(3..=5u32);
    let h = Arc::new(cyclic_group(2));
    let g = Arc::new(cyclic_group(m));
    let anchor0 = HashMap::from([("*".to_string(), "*".to_string())]);
    let mut act0 = Vec::new();
    let mut act1 = Vec::new();
    for hi in 0..2u32 {
        act0.push((hi.to_string(), "*".to_string(), "*".to_string()));
        for gi in 0..m {
            let out = if hi == 0 { gi } else { (m - gi) % m };
            act1.push((hi.to_string(), gi.to_string(), out.to_string()));
        }
    }
    ClassicalAction::new(h, g, &anchor0, &act0, &act1).unwrap()
}

fn trivial_action(rng: &mut ChaCha8Rng) -> ClassicalAction {
    let h = Arc::new(cyclic_group(rng.random_range(2..=3u32)));
    let g = Arc::new(small_groupoid(rng));
    ClassicalAction::trivial(h, g).unwrap()
}

/// A random normalized cocycle: a coboundary perturbation, possibly times
/// the standard nontrivial cocycle when the base is a product of two cyclic
/// groups.
pub fn random_coboundary(base: GpRef, order: u32, seed: u64) -> TorusCocycle {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let beta: Vec<i64> = (0..base.n_arrows())
        .map(|a| if base.is_unit(a) { 0 } else { rng.random_range(0..order as i64) })
        .collect();
    TorusCocycle::coboundary(base, order, &beta).expect("coboundary construction")
}

/// A fibration from the projection of a central extension by a random
/// coboundary cocycle.
fn extension_fibration(rng: &mut ChaCha8Rng) -> GroupoidFunctor {
    let base = Arc::new(match rng.random_range(0..3) {
        0 => cyclic_group(2),
        1 => cyclic_group(3),
        _ => pair_groupoid(&["1", "2"]),
    });
    let k = rng.random_range(2..=3u32);
    let w = random_coboundary(base, k, rng.random());
    let (_, _, proj) = crate::fell::central_extension_from_cocycle(&w, k).unwrap();
    proj
}

/// A fibration from quotienting a central extension by its canonical
/// normal bundle, exercising the quotient construction.
fn quotient_fibration(rng: &mut ChaCha8Rng) -> GroupoidFunctor {
    let base = Arc::new(match rng.random_range(0..2) {
        0 => cyclic_group(2),
        _ => unit_groupoid(&["1", "2"]),
    });
    let k = rng.random_range(2..=3u32);
    let w = random_coboundary(base.clone(), k, rng.random());
    let (l, incl, _) = crate::fell::central_extension_from_cocycle(&w, k).unwrap();
    // The image of the inclusion is the normal Z/k bundle.
    let bundle_ids: Vec<String> = (0..incl.dom().n_arrows())
        .map(|a| l.arrow_id(incl.f1(a)).to_string())
        .collect();
    let (_, proj) = quotient_by_normal_bundle(&l, &bundle_ids).unwrap();
    proj
}

/// An equivalence bibundle: either the pair groupoid on `n` points against
/// the trivial group, or the translation bibundle of a small groupoid.
pub fn random_equivalence(seed: u64) -> Bibundle {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match rng.random_range(0..2) {
        0 => {
            let n = rng.random_range(2..=3usize);
            let names: Vec<String> = (1..=n).map(|i| i.to_string()).collect();
            let name_refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
            let g = Arc::new(pair_groupoid(&name_refs));
            let h = Arc::new(cyclic_group(1));
            let points: Vec<String> = (1..=n).map(|i| format!("v{i}")).collect();
            let lanchor: HashMap<String, String> =
                (1..=n).map(|i| (format!("v{i}"), i.to_string())).collect();
            let ranchor: HashMap<String, String> =
                points.iter().map(|x| (x.clone(), "*".to_string())).collect();
            let mut lact = Vec::new();
            for i in 1..=n {
                for j in 1..=n {
                    lact.push((format!("{i}|{j}"), format!("v{j}"), format!("v{i}")));
                }
            }
            let ract: Vec<(String, String, String)> =
                points.iter().map(|x| (x.clone(), "0".to_string(), x.clone())).collect();
            Bibundle::new(g, h, points, &lanchor, &ranchor, &lact, &ract).unwrap()
        }
        _ => {
            let g = Arc::new(small_groupoid(&mut rng));
            Bibundle::translation(&g)
        }
    }
}

/// A random fibration from one of the three families: transformation
/// groupoids of classical actions, quotients by normal subgroup bundles
/// (via central extensions), and linking groupoids of equivalences.
pub fn random_fibration(seed: u64) -> RandomFibration {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match rng.random_range(0..5) {
        0 => {
            let a = shift_action(&mut rng);
            let (_, f) = transformation_groupoid(&a).unwrap();
            RandomFibration { functor: f, kind: "transformation-shift" }
        }
        1 => {
            let a = inversion_action(&mut rng);
            let (_, f) = transformation_groupoid(&a).unwrap();
            RandomFibration { functor: f, kind: "transformation-inversion" }
        }
        2 => {
            let a = trivial_action(&mut rng);
            let (_, f) = transformation_groupoid(&a).unwrap();
            RandomFibration { functor: f, kind: "transformation-trivial" }
        }
        3 => {
            let f = if rng.random_bool(0.5) {
                extension_fibration(&mut rng)
            } else {
                quotient_fibration(&mut rng)
            };
            RandomFibration { functor: f, kind: "extension-quotient" }
        }
        _ => {
            let b = random_equivalence(rng.random());
            let (_, f) = linking_groupoid(&b).unwrap();
            RandomFibration { functor: f, kind: "linking" }
        }
    }
}

/// A random saturated matrix bundle over the given base: the endomorphism
/// bundle of a random vector bundle on the objects (fibre dimensions 1 or
/// 2), optionally twisted by a random coboundary cocycle.
pub fn random_matrix_bundle(base: GpRef, mode: NumMode, seed: u64) -> FellBundle {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dims: Vec<usize> =
        (0..base.n_objects()).map(|_| rng.random_range(1..=2usize)).collect();
    let b = FellBundle::endomorphism(base.clone(), &dims, mode).unwrap();
    if rng.random_bool(0.5) {
        let w = random_coboundary(base, 2, rng.random());
        crate::fell::twist_bundle(&b, &w).unwrap()
    } else {
        b
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fell::validate_fell;
    use crate::functor::fibration_check;

    #[test]
    fn random_fibrations_are_fibrations() {
        for seed in 0..25 {
            let rf = random_fibration(seed);
            let report = fibration_check(&rf.functor).unwrap();
            assert!(report.is_fibration, "seed {seed} kind {}", rf.kind);
        }
    }

    #[test]
    fn random_fibrations_are_deterministic() {
        let a = random_fibration(42);
        let b = random_fibration(42);
        assert_eq!(a.functor.dom().arrows(), b.functor.dom().arrows());
        assert_eq!(a.functor.cod().arrows(), b.functor.cod().arrows());
    }

    #[test]
    fn random_matrix_bundles_validate() {
        for seed in 0..6 {
            let rf = random_fibration(seed);
            let dom = rf.functor.dom().clone();
            if dom.n_arrows() > 12 {
                continue;
            }
            let b = random_matrix_bundle(dom, NumMode::Float, seed);
            assert!(validate_fell(&b).is_valid(), "seed {seed}");
        }
    }
}
