//! Haar systems on finite groupoids, the induced Haar system of a
//! fibration, quasi-invariant measures, and modular functions.
//!
//! A Haar system is stored as a positive weight per arrow, read as the mass
//! of the singleton `{l}` in the measure on the range fibre of `rng(l)`.
//! Left invariance of the system says `weight(l.g) = weight(g)` whenever
//! `rng(g) = src(l)`; on a finite groupoid this forces the weight to depend
//! only on the source object, with the counting system (all ones) as the
//! default.

use crate::error::{Error, Result};
use crate::functor::{fibration_check, fibre, GroupoidFunctor};
use crate::groupoid::FiniteGroupoid;
use crate::num::{NumMode, Real};
use crate::report::ValidationReport;

/// A left-invariant weight on the arrows of a groupoid.
#[derive(Debug, Clone)]
pub struct HaarSystem {
    /// Weight per arrow, `lambda^{rng(l)}({l})`.
    pub weight: Vec<Real>,
}

impl HaarSystem {
    /// The counting system: every arrow has weight one.
    pub fn counting(g: &FiniteGroupoid, mode: NumMode) -> Self {
        HaarSystem { weight: vec![Real::one(mode); g.n_arrows()] }
    }

    /// A system determined by a positive weight on objects:
    /// `weight(l) = w(src(l))`. Every valid Haar system has this form.
    pub fn from_object_weights(g: &FiniteGroupoid, w: &[Real]) -> Self {
        HaarSystem { weight: (0..g.n_arrows()).map(|l| w[g.src(l)].clone()).collect() }
    }

    pub fn weight_by_id(&self, g: &FiniteGroupoid, id: &str) -> Option<&Real> {
        g.arrow_index(id).map(|a| &self.weight[a])
    }
}

/// Checks full support and left invariance.
pub fn validate_haar(g: &FiniteGroupoid, h: &HaarSystem) -> ValidationReport {
    let mut report = ValidationReport::new();
    if h.weight.len() != g.n_arrows() {
        report.push("support", vec![], "weight vector length differs from the arrow count");
        return report;
    }
    for a in 0..g.n_arrows() {
        if !h.weight[a].is_positive() {
            report.push(
                "support",
                vec![g.arrow_id(a).into()],
                "weight must be strictly positive",
            );
        }
    }
    for (l, a) in g.composable_pairs() {
        let lg = g.comp_unchecked(l, a);
        if h.weight[lg] != h.weight[a] {
            report.push(
                "left-invariance",
                vec![g.arrow_id(l).into(), g.arrow_id(a).into()],
                "weight(l.g) != weight(g)",
            );
        }
    }
    report
}

/// A measure on the objects; zero masses are allowed, and the support must
/// be nonempty.
#[derive(Debug, Clone)]
pub struct UnitMeasure {
    pub mass: Vec<Real>,
}

impl UnitMeasure {
    pub fn uniform(g: &FiniteGroupoid, mode: NumMode) -> Self {
        UnitMeasure { mass: vec![Real::one(mode); g.n_objects()] }
    }
}

/// Checks nonnegativity and a nonempty support.
pub fn validate_unit_measure(g: &FiniteGroupoid, m: &UnitMeasure) -> ValidationReport {
    let mut report = ValidationReport::new();
    if m.mass.len() != g.n_objects() {
        report.push("support", vec![], "mass vector length differs from the object count");
        return report;
    }
    for (x, v) in m.mass.iter().enumerate() {
        if v.is_negative() {
            report.push("positivity", vec![g.object_id(x).into()], "mass must be nonnegative");
        }
    }
    if m.mass.iter().all(|v| v.is_zero()) {
        report.push("support", vec![], "measure is identically zero");
    }
    report
}

fn require_fibration(f: &GroupoidFunctor) -> Result<()> {
    let report = fibration_check(f)?;
    if report.is_fibration {
        Ok(())
    } else {
        Err(Error::NotAFibration { missing: report.missing.len() })
    }
}

fn require_valid_haar(g: &FiniteGroupoid, h: &HaarSystem) -> Result<()> {
    let report = validate_haar(g, h);
    if report.is_valid() {
        Ok(())
    } else {
        Err(Error::InvalidHaar(format!("{} violations", report.violations.len())))
    }
}

/// The measure induced on the fibre-product slices of a fibration: for a
/// codomain arrow `h` and a domain object `x` with `F0(x) = rng(h)`, the
/// measure on `{l : F1(l) = h, rng(l) = x}` given by `l -> lam(inv(k).l)`
/// for any `k` in the same set. The result does not depend on the choice of
/// `k`; this is checked over all choices.
///
/// Returns pairs of the domain arrow index and its mass.
pub fn lambda_dot(
    f: &GroupoidFunctor,
    lam: &HaarSystem,
    h_id: &str,
    x_id: &str,
) -> Result<Vec<(usize, Real)>> {
    require_fibration(f)?;
    let dom = f.dom();
    let cod = f.cod();
    let fib = fibre(f)?;
    require_valid_haar(&fib, lam)?;
    let h = cod.arrow_index(h_id).ok_or_else(|| Error::UnknownArrow(h_id.into()))?;
    let x = dom.object_index(x_id).ok_or_else(|| Error::UnknownObject(x_id.into()))?;

    let support: Vec<usize> = (0..dom.n_arrows())
        .filter(|&l| f.f1(l) == h && dom.rng(l) == x)
        .collect();
    if support.is_empty() {
        return Err(Error::EmptyFibre { h: h_id.into(), x: x_id.into() });
    }
    // Weight through one section, then verify independence over all k.
    let fib_weight = |arrow_in_fibre: &str| -> Real {
        let idx = fib.arrow_index(arrow_in_fibre).expect("fibre arrow");
        lam.weight[idx].clone()
    };
    let masses_for = |k: usize| -> Vec<Real> {
        support
            .iter()
            .map(|&l| {
                let rel = dom.comp_unchecked(dom.inv(k), l);
                fib_weight(dom.arrow_id(rel))
            })
            .collect()
    };
    let reference = masses_for(support[0]);
    for &k in &support[1..] {
        let other = masses_for(k);
        if other != reference {
            return Err(Error::InvalidHaar(
                "induced slice measure depends on the section choice".into(),
            ));
        }
    }
    Ok(support.into_iter().zip(reference).collect())
}

/// The Haar system induced on the domain of a fibration from systems on the
/// fibre and the codomain: `nu(l) = lambda_dot(l) * mu(F1(l))`. The result
/// is left invariant; this is re-validated exactly.
pub fn induce_haar(
    f: &GroupoidFunctor,
    lam: &HaarSystem,
    mu: &HaarSystem,
) -> Result<HaarSystem> {
    require_fibration(f)?;
    let dom = f.dom();
    let cod = f.cod();
    let fib = fibre(f)?;
    require_valid_haar(&fib, lam)?;
    require_valid_haar(cod, mu)?;

    let mut weight = Vec::with_capacity(dom.n_arrows());
    for l in 0..dom.n_arrows() {
        let h = f.f1(l);
        let x = dom.rng(l);
        let slice = lambda_dot(f, lam, cod.arrow_id(h), dom.object_id(x))?;
        let mass = slice
            .iter()
            .find(|(m, _)| *m == l)
            .map(|(_, w)| w.clone())
            .expect("arrow lies in its own slice");
        weight.push(&mass * &mu.weight[h]);
    }
    let nu = HaarSystem { weight };
    let report = validate_haar(dom, &nu);
    if !report.is_valid() {
        return Err(Error::InvalidHaar("induced system failed left invariance".into()));
    }
    Ok(nu)
}

/// A positive multiplicative function on the arrows where the measure has
/// support; `None` where it is undefined.
#[derive(Debug, Clone)]
pub struct ModularFunction {
    pub value: Vec<Option<Real>>,
}

impl ModularFunction {
    pub fn by_id(&self, g: &FiniteGroupoid, id: &str) -> Option<&Real> {
        g.arrow_index(id).and_then(|a| self.value[a].as_ref())
    }
}

/// The Radon–Nikodym character of a quasi-invariant measure:
/// `delta(l) = alpha(src(l)) nu(inv(l)) / (alpha(rng(l)) nu(l))` wherever
/// numerator and denominator are both nonzero. Quasi-invariance demands
/// that they vanish together; a witness arrow is reported otherwise.
/// Multiplicativity on the support is verified.
pub fn modular_function(
    g: &FiniteGroupoid,
    nu: &HaarSystem,
    alpha: &UnitMeasure,
) -> Result<ModularFunction> {
    require_valid_haar(g, nu)?;
    let report = validate_unit_measure(g, alpha);
    if !report.is_valid() {
        return Err(Error::InvalidHaar("invalid unit measure".into()));
    }
    let mut value = Vec::with_capacity(g.n_arrows());
    for l in 0..g.n_arrows() {
        let num = &alpha.mass[g.src(l)] * &nu.weight[g.inv(l)];
        let den = &alpha.mass[g.rng(l)] * &nu.weight[l];
        match (num.is_zero(), den.is_zero()) {
            (false, false) => value.push(Some(&num / &den)),
            (true, true) => value.push(None),
            _ => return Err(Error::NotQuasiInvariant(g.arrow_id(l).into())),
        }
    }
    let delta = ModularFunction { value };
    // Multiplicativity on the support.
    for (a, b) in g.composable_pairs() {
        if let (Some(va), Some(vb)) = (&delta.value[a], &delta.value[b]) {
            let vc = delta.value[g.comp_unchecked(a, b)]
                .as_ref()
                .ok_or_else(|| Error::NotQuasiInvariant(g.arrow_id(a).into()))?;
            if *vc != va * vb {
                return Err(Error::NotQuasiInvariant(format!(
                    "modular function is not multiplicative at `{}`.`{}`",
                    g.arrow_id(a),
                    g.arrow_id(b)
                )));
            }
        }
    }
    Ok(delta)
}

/// Verifies the compatibility of the fibre and domain modular functions
/// over a fibration: `delta_G(g) * delta(l) = delta(g.l)` for every
/// composable pair with `g` in the fibre, where the domain carries the
/// induced Haar system.
pub fn modular_compatibility_check(
    f: &GroupoidFunctor,
    lam: &HaarSystem,
    mu: &HaarSystem,
    alpha: &UnitMeasure,
) -> Result<bool> {
    let dom = f.dom();
    let fib = fibre(f)?;
    let nu = induce_haar(f, lam, mu)?;
    let delta = modular_function(dom, &nu, alpha)?;
    let alpha_fib = UnitMeasure { mass: alpha.mass.clone() };
    let delta_g = modular_function(&fib, lam, &alpha_fib)?;

    for gf in 0..fib.n_arrows() {
        let g_in_dom = dom.arrow_index(fib.arrow_id(gf)).expect("fibre arrow id");
        for l in 0..dom.n_arrows() {
            if dom.src(g_in_dom) != dom.rng(l) {
                continue;
            }
            let gl = dom.comp_unchecked(g_in_dom, l);
            match (&delta_g.value[gf], &delta.value[l], &delta.value[gl]) {
                (Some(a), Some(b), Some(c)) => {
                    if *c != a * b {
                        return Ok(false);
                    }
                }
                (None, None, None) | (Some(_), None, None) | (None, Some(_), None) => {}
                _ => {
                    // The supports must match up: g.l is supported exactly
                    // when both factors are.
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functor::GroupoidFunctor;
    use crate::groupoid::{cyclic_group, pair_groupoid};
    use std::collections::HashMap;
    use std::sync::Arc;

    fn z4_to_z2() -> GroupoidFunctor {
        let z4 = Arc::new(cyclic_group(4));
        let z2 = Arc::new(cyclic_group(2));
        let f0 = HashMap::from([("*".to_string(), "*".to_string())]);
        let f1: HashMap<String, String> =
            (0..4).map(|j| (j.to_string(), (j % 2).to_string())).collect();
        GroupoidFunctor::new(z4, z2, &f0, &f1).unwrap()
    }

    #[test]
    fn counting_weights_are_valid() {
        let k = pair_groupoid(&["a", "b"]);
        let h = HaarSystem::counting(&k, NumMode::Exact);
        assert!(validate_haar(&k, &h).is_valid());
    }

    #[test]
    fn non_uniform_group_weights_violate_invariance() {
        let z2 = cyclic_group(2);
        let h = HaarSystem {
            weight: vec![Real::one(NumMode::Exact), Real::from_ratio(2, 1, NumMode::Exact)],
        };
        let report = validate_haar(&z2, &h);
        assert!(report.has_rule("left-invariance"));
    }

    #[test]
    fn pair_groupoid_weights_from_source_objects() {
        // weight((x, y)) = c_y: any positive choice per source object works.
        let k = pair_groupoid(&["1", "2"]);
        let w = vec![Real::from_ratio(3, 2, NumMode::Exact), Real::from_ratio(5, 1, NumMode::Exact)];
        let h = HaarSystem::from_object_weights(&k, &w);
        assert!(validate_haar(&k, &h).is_valid());
        assert_eq!(*h.weight_by_id(&k, "1|2").unwrap(), Real::from_ratio(5, 1, NumMode::Exact));
    }

    #[test]
    fn lambda_dot_on_group_reduction() {
        let f = z4_to_z2();
        let fib = fibre(&f).unwrap();
        let lam = HaarSystem::counting(&fib, NumMode::Exact);
        let slice = lambda_dot(&f, &lam, "1", "*").unwrap();
        assert_eq!(slice.len(), 2);
        for (_, w) in &slice {
            assert_eq!(*w, Real::one(NumMode::Exact));
        }
    }

    #[test]
    fn induced_system_multiplies_fibre_and_base_weights() {
        let f = z4_to_z2();
        let fib = fibre(&f).unwrap();
        // Valid weighted systems: uniform 1/2 on the fibre, uniform 3 on the base.
        let lam = HaarSystem {
            weight: vec![Real::from_ratio(1, 2, NumMode::Exact); fib.n_arrows()],
        };
        let mu = HaarSystem {
            weight: vec![Real::from_ratio(3, 1, NumMode::Exact); f.cod().n_arrows()],
        };
        let nu = induce_haar(&f, &lam, &mu).unwrap();
        assert!(validate_haar(f.dom(), &nu).is_valid());
        for l in 0..f.dom().n_arrows() {
            assert_eq!(nu.weight[l], Real::from_ratio(3, 2, NumMode::Exact));
        }
    }

    #[test]
    fn counting_systems_induce_counting() {
        let f = z4_to_z2();
        let fib = fibre(&f).unwrap();
        let lam = HaarSystem::counting(&fib, NumMode::Exact);
        let mu = HaarSystem::counting(f.cod(), NumMode::Exact);
        let nu = induce_haar(&f, &lam, &mu).unwrap();
        for w in &nu.weight {
            assert_eq!(*w, Real::one(NumMode::Exact));
        }
    }

    #[test]
    fn group_modular_function_is_trivial() {
        let z4 = cyclic_group(4);
        let nu = HaarSystem::counting(&z4, NumMode::Exact);
        let alpha = UnitMeasure::uniform(&z4, NumMode::Exact);
        let delta = modular_function(&z4, &nu, &alpha).unwrap();
        for v in &delta.value {
            assert_eq!(*v.as_ref().unwrap(), Real::one(NumMode::Exact));
        }
    }

    #[test]
    fn pair_groupoid_modular_values() {
        let k = pair_groupoid(&["1", "2"]);
        let nu = HaarSystem::counting(&k, NumMode::Exact);
        let alpha = UnitMeasure {
            mass: vec![Real::one(NumMode::Exact), Real::from_ratio(4, 1, NumMode::Exact)],
        };
        let delta = modular_function(&k, &nu, &alpha).unwrap();
        // Arrow 2|1 goes from 1 to 2: delta = alpha(1)/alpha(2) = 1/4
        // with counting weights; its inverse gets 4.
        assert_eq!(*delta.by_id(&k, "2|1").unwrap(), Real::from_ratio(1, 4, NumMode::Exact));
        assert_eq!(*delta.by_id(&k, "1|2").unwrap(), Real::from_ratio(4, 1, NumMode::Exact));
    }

    #[test]
    fn vanishing_on_an_orbit_shrinks_the_support() {
        let g = crate::groupoid::disjoint_union(&[
            ("A", &pair_groupoid(&["1", "2"])),
            ("B", &cyclic_group(2)),
        ]);
        let nu = HaarSystem::counting(&g, NumMode::Exact);
        let mut mass = vec![Real::one(NumMode::Exact); g.n_objects()];
        let b = g.object_index("B:*").unwrap();
        mass[b] = Real::zero(NumMode::Exact);
        let delta = modular_function(&g, &nu, &UnitMeasure { mass }).unwrap();
        let b_arrow = g.arrow_index("B:1").unwrap();
        assert!(delta.value[b_arrow].is_none());
        let a_arrow = g.arrow_index("A:1|2").unwrap();
        assert!(delta.value[a_arrow].is_some());
    }

    #[test]
    fn non_invariant_support_is_rejected() {
        let k = pair_groupoid(&["1", "2"]);
        let nu = HaarSystem::counting(&k, NumMode::Exact);
        let alpha = UnitMeasure { mass: vec![Real::one(NumMode::Exact), Real::zero(NumMode::Exact)] };
        let err = modular_function(&k, &nu, &alpha).unwrap_err();
        assert!(matches!(err, Error::NotQuasiInvariant(_)));
    }

    #[test]
    fn modular_compatibility_for_weighted_systems() {
        let f = z4_to_z2();
        let fib = fibre(&f).unwrap();
        let lam = HaarSystem {
            weight: vec![Real::from_ratio(2, 1, NumMode::Exact); fib.n_arrows()],
        };
        let mu = HaarSystem {
            weight: vec![Real::from_ratio(5, 1, NumMode::Exact); f.cod().n_arrows()],
        };
        let alpha = UnitMeasure::uniform(f.dom(), NumMode::Exact);
        assert!(modular_compatibility_check(&f, &lam, &mu, &alpha).unwrap());
    }
}
