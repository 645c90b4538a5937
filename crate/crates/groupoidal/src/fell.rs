//! Fell bundles over finite groupoids: per-arrow complex fibres with a
//! multiplication over composition and a compatible involution, all given by
//! explicit structure constants. Includes trivial bundles, cocycle line
//! bundles, endomorphism bundles, twisting by a cocycle, restriction, and
//! central extensions built from a cocycle.
//!
//! Only saturated bundles are supported: [`validate_fell`] reports a
//! violation when some product space fails to span its target fibre.

use crate::error::{Error, Result};
use crate::exec;
use crate::functor::GroupoidFunctor;
use crate::groupoid::{ArrowSpec, FiniteGroupoid, GpRef};
use crate::num::{NumMode, Scalar};
use crate::report::ValidationReport;
use std::collections::HashMap;
use std::sync::Arc;

/// Sparse bilinear tensor: entries `(i, j, k, c)` meaning
/// `e_i * e_j = sum_k c e_k` plus further `k`-entries.
pub type MultTensor = Vec<(usize, usize, usize, Scalar)>;

/// Sparse conjugate-linear map: entries `(i, j, c)` meaning
/// `star(e_i) = sum_j c e_j`.
pub type StarMap = Vec<(usize, usize, Scalar)>;

/// A Fell bundle over a finite groupoid.
#[derive(Debug, Clone)]
pub struct FellBundle {
    base: GpRef,
    mode: NumMode,
    dim: Vec<usize>,
    mult: HashMap<(usize, usize), MultTensor>,
    star: Vec<StarMap>,
}

impl FellBundle {
    /// Builds a bundle from raw tables, enforcing structural well-formedness
    /// (positive dimensions, tensors on exactly the composable pairs,
    /// indices in range). Algebraic axioms are checked by [`validate_fell`].
    pub fn new(
        base: GpRef,
        mode: NumMode,
        dim: Vec<usize>,
        mult: HashMap<(usize, usize), MultTensor>,
        star: Vec<StarMap>,
    ) -> Result<Self> {
        if dim.len() != base.n_arrows() || star.len() != base.n_arrows() {
            return Err(Error::InvalidBundle("table lengths differ from the arrow count".into()));
        }
        // Zero-dimensional fibres are representable (they arise from
        // degenerate inputs such as non-fibrations) but are rejected by
        // `validate_fell`.
        for (&(a, b), tensor) in &mult {
            if base.comp(a, b).is_none() {
                return Err(Error::InvalidBundle(format!(
                    "multiplication tensor on the non-composable pair `{}`.`{}`",
                    base.arrow_id(a),
                    base.arrow_id(b)
                )));
            }
            let ab = base.comp_unchecked(a, b);
            for &(i, j, k, _) in tensor {
                if i >= dim[a] || j >= dim[b] || k >= dim[ab] {
                    return Err(Error::InvalidBundle("tensor index out of range".into()));
                }
            }
        }
        for (a, b) in base.composable_pairs() {
            if !mult.contains_key(&(a, b)) {
                return Err(Error::InvalidBundle(format!(
                    "no multiplication tensor for `{}`.`{}`",
                    base.arrow_id(a),
                    base.arrow_id(b)
                )));
            }
        }
        for (a, map) in star.iter().enumerate() {
            let ia = base.inv(a);
            for &(i, j, _) in map {
                if i >= dim[a] || j >= dim[ia] {
                    return Err(Error::InvalidBundle("star index out of range".into()));
                }
            }
        }
        Ok(FellBundle { base, mode, dim, mult, star })
    }

    pub fn base(&self) -> &GpRef {
        &self.base
    }

    pub fn mode(&self) -> NumMode {
        self.mode
    }

    pub fn dim(&self, arrow: usize) -> usize {
        self.dim[arrow]
    }

    /// Total dimension `sum_l dim(B_l)`.
    pub fn total_dim(&self) -> usize {
        self.dim.iter().sum()
    }

    pub fn mult_tensor(&self, a: usize, b: usize) -> Option<&MultTensor> {
        self.mult.get(&(a, b))
    }

    pub fn star_map(&self, a: usize) -> &StarMap {
        &self.star[a]
    }

    /// Product of coordinate vectors `va` over `a` and `vb` over `b`, in the
    /// fibre over `a.b`.
    pub fn mult_vec(&self, a: usize, b: usize, va: &[Scalar], vb: &[Scalar]) -> Vec<Scalar> {
        let ab = self.base.comp_unchecked(a, b);
        let mut out = vec![Scalar::zero(self.mode); self.dim[ab]];
        for &(i, j, k, ref c) in &self.mult[&(a, b)] {
            if va[i].is_zero() || vb[j].is_zero() {
                continue;
            }
            out[k] = &out[k] + &(&(&va[i] * &vb[j]) * c);
        }
        out
    }

    /// Involution of a coordinate vector over `a`, in the fibre over
    /// `inv(a)`; conjugate-linear.
    pub fn star_vec(&self, a: usize, va: &[Scalar]) -> Vec<Scalar> {
        let ia = self.base.inv(a);
        let mut out = vec![Scalar::zero(self.mode); self.dim[ia]];
        for &(i, j, ref c) in &self.star[a] {
            if va[i].is_zero() {
                continue;
            }
            out[j] = &out[j] + &(&va[i].conj() * c);
        }
        out
    }

    /// The trivial line bundle: every fibre is the complex line, the
    /// multiplication is scalar multiplication and the involution is
    /// conjugation.
    pub fn trivial(base: GpRef, mode: NumMode) -> Self {
        let n = base.n_arrows();
        let mut mult = HashMap::new();
        for (a, b) in base.composable_pairs() {
            mult.insert((a, b), vec![(0, 0, 0, Scalar::one(mode))]);
        }
        let star = (0..n).map(|_| vec![(0, 0, Scalar::one(mode))]).collect();
        FellBundle { base, mode, dim: vec![1; n], mult, star }
    }

    /// The endomorphism bundle of a vector bundle over the objects: the
    /// fibre over `a` is `Hom(V_src(a), V_rng(a))` with matrix units as
    /// basis, composition as multiplication and the adjoint as involution.
    /// Always saturated.
    pub fn endomorphism(base: GpRef, obj_dims: &[usize], mode: NumMode) -> Result<Self> {
        if obj_dims.len() != base.n_objects() || obj_dims.contains(&0) {
            return Err(Error::InvalidBundle("need a positive dimension per object".into()));
        }
        let n = base.n_arrows();
        let dim: Vec<usize> =
            (0..n).map(|a| obj_dims[base.src(a)] * obj_dims[base.rng(a)]).collect();
        // Basis index of the matrix unit E_{p q} over `a`: p over rng, q over src.
        let unit_index = |base_g: &FiniteGroupoid, a: usize, p: usize, q: usize| {
            p * obj_dims[base_g.src(a)] + q
        };
        let mut mult = HashMap::new();
        for (a, b) in base.composable_pairs() {
            let ab = base.comp_unchecked(a, b);
            let mut tensor =
                Vec::with_capacity(obj_dims[base.rng(a)] * obj_dims[base.src(a)] * obj_dims[base.src(b)]);
            for p in 0..obj_dims[base.rng(a)] {
                for q in 0..obj_dims[base.src(a)] {
                    for s in 0..obj_dims[base.src(b)] {
                        tensor.push((
                            unit_index(&base, a, p, q),
                            unit_index(&base, b, q, s),
                            unit_index(&base, ab, p, s),
                            Scalar::one(mode),
                        ));
                    }
                }
            }
            mult.insert((a, b), tensor);
        }
        let star = (0..n)
            .map(|a| {
                let ia = base.inv(a);
                let mut map = Vec::with_capacity(dim[a]);
                for p in 0..obj_dims[base.rng(a)] {
                    for q in 0..obj_dims[base.src(a)] {
                        map.push((
                            unit_index(&base, a, p, q),
                            unit_index(&base, ia, q, p),
                            Scalar::one(mode),
                        ));
                    }
                }
                map
            })
            .collect();
        Ok(FellBundle { base, mode, dim, mult, star })
    }
}

// ---------------------------------------------------------------------------
// 2-cocycles with values in roots of unity
// ---------------------------------------------------------------------------

/// A normalized 2-cocycle on a groupoid with values in the `order`-th roots
/// of unity; the value on a composable pair `(a, b)` is
/// `e^{2 pi i exp(a,b)/order}`. Missing entries mean exponent zero.
#[derive(Debug, Clone)]
pub struct TorusCocycle {
    base: GpRef,
    order: u32,
    exp: HashMap<(usize, usize), i64>,
}

impl TorusCocycle {
    pub fn new(base: GpRef, order: u32, entries: &[(String, String, i64)]) -> Result<Self> {
        if order == 0 {
            return Err(Error::InvalidCocycle("order must be positive".into()));
        }
        let mut exp = HashMap::new();
        for (a, b, e) in entries {
            let ai = base.arrow_index(a).ok_or_else(|| Error::UnknownArrow(a.clone()))?;
            let bi = base.arrow_index(b).ok_or_else(|| Error::UnknownArrow(b.clone()))?;
            if base.comp(ai, bi).is_none() {
                return Err(Error::InvalidCocycle(format!(
                    "entry on the non-composable pair `{a}`.`{b}`"
                )));
            }
            let e = e.rem_euclid(order as i64);
            if e != 0 {
                exp.insert((ai, bi), e);
            }
        }
        Ok(TorusCocycle { base, order, exp })
    }

    /// The trivial cocycle.
    pub fn trivial(base: GpRef, order: u32) -> Self {
        TorusCocycle { base, order, exp: HashMap::new() }
    }

    /// The coboundary of an arrow labelling `beta` (exponents, zero on
    /// units): `omega(a, b) = beta(a) + beta(b) - beta(a.b)`. Always a
    /// normalized cocycle.
    pub fn coboundary(base: GpRef, order: u32, beta: &[i64]) -> Result<Self> {
        if beta.len() != base.n_arrows() {
            return Err(Error::InvalidCocycle("need one exponent per arrow".into()));
        }
        for x in 0..base.n_objects() {
            if beta[base.unit(x)].rem_euclid(order as i64) != 0 {
                return Err(Error::InvalidCocycle("beta must vanish on units".into()));
            }
        }
        let mut exp = HashMap::new();
        for (a, b) in base.composable_pairs() {
            let ab = base.comp_unchecked(a, b);
            let e = (beta[a] + beta[b] - beta[ab]).rem_euclid(order as i64);
            if e != 0 {
                exp.insert((a, b), e);
            }
        }
        Ok(TorusCocycle { base, order, exp })
    }

    pub fn base(&self) -> &GpRef {
        &self.base
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    /// Exponent on a composable pair (zero when absent).
    pub fn exponent(&self, a: usize, b: usize) -> i64 {
        self.exp.get(&(a, b)).copied().unwrap_or(0)
    }

    pub fn value(&self, a: usize, b: usize, mode: NumMode) -> Scalar {
        Scalar::root_of_unity(self.exponent(a, b), self.order, mode)
    }

    /// The `n`-th power cocycle.
    pub fn power(&self, n: i64) -> TorusCocycle {
        let exp = self
            .exp
            .iter()
            .filter_map(|(&k, &e)| {
                let p = (e * n).rem_euclid(self.order as i64);
                (p != 0).then_some((k, p))
            })
            .collect();
        TorusCocycle { base: self.base.clone(), order: self.order, exp }
    }

    pub fn entries(&self) -> Vec<(String, String, i64)> {
        let mut out: Vec<(String, String, i64)> = self
            .exp
            .iter()
            .map(|(&(a, b), &e)| {
                (self.base.arrow_id(a).to_string(), self.base.arrow_id(b).to_string(), e)
            })
            .collect();
        out.sort();
        out
    }
}

/// Checks normalization and the cocycle identity
/// `omega(a,b) omega(a.b,c) = omega(a,b.c) omega(b,c)` on all composable
/// triples (as exponent arithmetic, hence exact).
pub fn validate_cocycle(w: &TorusCocycle) -> ValidationReport {
    let mut report = ValidationReport::new();
    let g = &w.base;
    let n = w.order as i64;
    for a in 0..g.n_arrows() {
        if w.exponent(g.unit(g.rng(a)), a) % n != 0 {
            report.push("normalization", vec![g.arrow_id(a).into()], "omega(1, a) != 1");
        }
        if w.exponent(a, g.unit(g.src(a))) % n != 0 {
            report.push("normalization", vec![g.arrow_id(a).into()], "omega(a, 1) != 1");
        }
    }
    let bad = exec::flat_map_indexed(g.n_arrows(), |a| {
        let mut bad = Vec::new();
        for &b in g.arrows_with_rng(g.src(a)) {
            let ab = g.comp_unchecked(a, b);
            for &c in g.arrows_with_rng(g.src(b)) {
                let bc = g.comp_unchecked(b, c);
                let lhs = w.exponent(a, b) + w.exponent(ab, c);
                let rhs = w.exponent(a, bc) + w.exponent(b, c);
                if (lhs - rhs).rem_euclid(n) != 0 {
                    bad.push((a, b, c));
                }
            }
        }
        bad
    });
    for (a, b, c) in bad {
        report.push(
            "cocycle-identity",
            vec![g.arrow_id(a).into(), g.arrow_id(b).into(), g.arrow_id(c).into()],
            "omega(a,b) omega(ab,c) != omega(a,bc) omega(b,c)",
        );
    }
    report
}

/// The Fell line bundle of a 2-cocycle: one-dimensional fibres,
/// `mult = omega(a, b)`, and the unitary involution gauge
/// `star(1_a) = conj(omega(a, inv(a))) 1_{inv(a)}`.
pub fn cocycle_line_bundle(w: &TorusCocycle, mode: NumMode) -> Result<FellBundle> {
    let report = validate_cocycle(w);
    if !report.is_valid() {
        return Err(Error::InvalidCocycle(format!("{} violations", report.violations.len())));
    }
    let g = &w.base;
    let n = g.n_arrows();
    let mut mult = HashMap::new();
    for (a, b) in g.composable_pairs() {
        mult.insert((a, b), vec![(0, 0, 0, w.value(a, b, mode))]);
    }
    let star = (0..n)
        .map(|a| vec![(0, 0, w.value(a, g.inv(a), mode).conj())])
        .collect();
    Ok(FellBundle { base: g.clone(), mode, dim: vec![1; n], mult, star })
}

/// Multiplies a bundle's structure by a cocycle on the same base:
/// `mult' = omega(a,b) mult`, `star' = conj(omega(a, inv(a))) star`.
pub fn twist_bundle(b: &FellBundle, w: &TorusCocycle) -> Result<FellBundle> {
    if **w.base() != **b.base() {
        return Err(Error::MismatchedBase);
    }
    let report = validate_cocycle(w);
    if !report.is_valid() {
        return Err(Error::InvalidCocycle(format!("{} violations", report.violations.len())));
    }
    let mode = b.mode;
    let mult = b
        .mult
        .iter()
        .map(|(&(x, y), tensor)| {
            let c = w.value(x, y, mode);
            let scaled =
                tensor.iter().map(|&(i, j, k, ref s)| (i, j, k, s * &c)).collect();
            ((x, y), scaled)
        })
        .collect();
    let star = (0..b.base.n_arrows())
        .map(|a| {
            let c = w.value(a, b.base.inv(a), mode).conj();
            b.star[a].iter().map(|&(i, j, ref s)| (i, j, s * &c)).collect()
        })
        .collect();
    Ok(FellBundle { base: b.base.clone(), mode, dim: b.dim.clone(), mult, star })
}

/// Restriction of a bundle to a subgroupoid (given by its arrow ids in the
/// base); saturation over the subgroupoid is re-checked by `validate_fell`.
pub fn restrict_bundle(b: &FellBundle, sub: &FiniteGroupoid) -> Result<FellBundle> {
    let base = &b.base;
    let mut back = Vec::with_capacity(sub.n_arrows());
    for a in 0..sub.n_arrows() {
        let idx = base
            .arrow_index(sub.arrow_id(a))
            .ok_or_else(|| Error::NotSubgroupoid(format!("unknown arrow `{}`", sub.arrow_id(a))))?;
        back.push(idx);
    }
    // Structural subgroupoid checks: endpoints, inverses and composites agree.
    for a in 0..sub.n_arrows() {
        if base.object_id(base.src(back[a])) != sub.object_id(sub.src(a))
            || base.object_id(base.rng(back[a])) != sub.object_id(sub.rng(a))
            || base.arrow_id(base.inv(back[a])) != sub.arrow_id(sub.inv(a))
        {
            return Err(Error::NotSubgroupoid(format!(
                "arrow `{}` has different structure in the base",
                sub.arrow_id(a)
            )));
        }
    }
    let dim = back.iter().map(|&a| b.dim[a]).collect();
    let mut mult = HashMap::new();
    for (a, c) in sub.composable_pairs() {
        let big = (back[a], back[c]);
        if base.comp(big.0, big.1) != Some(back[sub.comp_unchecked(a, c)]) {
            return Err(Error::NotSubgroupoid(format!(
                "composite of `{}` and `{}` differs in the base",
                sub.arrow_id(a),
                sub.arrow_id(c)
            )));
        }
        mult.insert((a, c), b.mult[&big].clone());
    }
    let star = back.iter().map(|&a| b.star[a].clone()).collect();
    Ok(FellBundle { base: Arc::new(sub.clone()), mode: b.mode, dim, mult, star })
}

/// The central extension defined by a cocycle with values in the `k`-th
/// roots of unity: arrows are `h#j` for `j` in `Z/k`, multiplied with the
/// cocycle's exponent twist. Returns the extension, the inclusion of the
/// trivial `Z/k` bundle, and the projection fibration to the base.
pub fn central_extension_from_cocycle(
    w: &TorusCocycle,
    k: u32,
) -> Result<(GpRef, GroupoidFunctor, GroupoidFunctor)> {
    let report = validate_cocycle(w);
    if !report.is_valid() {
        return Err(Error::InvalidCocycle(format!("{} violations", report.violations.len())));
    }
    if k == 0 || k % w.order != 0 {
        return Err(Error::OrderMismatch { order: k });
    }
    let scale = (k / w.order) as i64;
    let h = &w.base;
    let kk = k as i64;
    let id = |a: usize, j: i64| format!("{}#{}", h.arrow_id(a), j.rem_euclid(kk));

    let objects: Vec<String> = h.objects().to_vec();
    let mut arrows = Vec::new();
    for a in 0..h.n_arrows() {
        for j in 0..kk {
            // inv(a#j) solves (a#j).(inv) = unit: exponent j + j' + e(a, inv a) = 0.
            let e_inv = w.exponent(a, h.inv(a)) * scale;
            arrows.push(ArrowSpec {
                id: id(a, j),
                src: h.object_id(h.src(a)).into(),
                rng: h.object_id(h.rng(a)).into(),
                inv: id(h.inv(a), -j - e_inv),
            });
        }
    }
    arrows.sort_by(|a, b| a.id.cmp(&b.id));
    let units: HashMap<String, String> = (0..h.n_objects())
        .map(|x| (h.object_id(x).to_string(), id(h.unit(x), 0)))
        .collect();
    let mut comp = Vec::new();
    for (a, b) in h.composable_pairs() {
        let ab = h.comp_unchecked(a, b);
        let e = w.exponent(a, b) * scale;
        for j1 in 0..kk {
            for j2 in 0..kk {
                comp.push((id(a, j1), id(b, j2), id(ab, j1 + j2 + e)));
            }
        }
    }
    let l = Arc::new(FiniteGroupoid::new(objects, arrows, &units, &comp)?);
    debug_assert!(crate::groupoid::validate_groupoid(&l).is_valid());

    // Centrality: (1_rng(l)#j).(l') = (l').(1_src(l)#j) for every arrow.
    for lp in 0..l.n_arrows() {
        for j in 0..kk {
            let left_unit = l.arrow_index(&id(h.unit(l.rng(lp)), j)).unwrap();
            let right_unit = l.arrow_index(&id(h.unit(l.src(lp)), j)).unwrap();
            if l.comp(left_unit, lp) != l.comp(lp, right_unit) {
                return Err(Error::InvalidCocycle("extension is not central".into()));
            }
        }
    }

    // Inclusion of the trivial Z/k bundle.
    let mut t_arrows = Vec::new();
    let tid = |x: usize, j: i64| format!("{}#{}", h.object_id(x), j.rem_euclid(kk));
    for x in 0..h.n_objects() {
        for j in 0..kk {
            t_arrows.push(ArrowSpec {
                id: tid(x, j),
                src: h.object_id(x).into(),
                rng: h.object_id(x).into(),
                inv: tid(x, -j),
            });
        }
    }
    t_arrows.sort_by(|a, b| a.id.cmp(&b.id));
    let t_units: HashMap<String, String> =
        (0..h.n_objects()).map(|x| (h.object_id(x).to_string(), tid(x, 0))).collect();
    let mut t_comp = Vec::new();
    for x in 0..h.n_objects() {
        for j1 in 0..kk {
            for j2 in 0..kk {
                t_comp.push((tid(x, j1), tid(x, j2), tid(x, j1 + j2)));
            }
        }
    }
    let t = Arc::new(FiniteGroupoid::new(h.objects().to_vec(), t_arrows, &t_units, &t_comp)?);
    let incl_f0 = (0..t.n_objects()).map(|x| l.object_index(t.object_id(x)).unwrap()).collect();
    let incl_f1 = (0..t.n_arrows())
        .map(|a| {
            let (obj, j) = t.arrow_id(a).rsplit_once('#').unwrap();
            let x = h.object_index(obj).unwrap();
            l.arrow_index(&format!("{}#{}", h.arrow_id(h.unit(x)), j)).unwrap()
        })
        .collect();
    let incl = GroupoidFunctor::from_indices(t, l.clone(), incl_f0, incl_f1);

    let proj_f0 = (0..l.n_objects()).map(|x| h.object_index(l.object_id(x)).unwrap()).collect();
    let proj_f1 = (0..l.n_arrows())
        .map(|a| {
            let (base_id, _) = l.arrow_id(a).rsplit_once('#').unwrap();
            h.arrow_index(base_id).unwrap()
        })
        .collect();
    let proj = GroupoidFunctor::from_indices(l.clone(), h.clone(), proj_f0, proj_f1);
    Ok((l, incl, proj))
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

fn scalar_close(mode: NumMode, x: &Scalar, y: &Scalar, tol: f64) -> bool {
    match mode {
        NumMode::Exact => (x - y).is_zero(),
        NumMode::Float => (x - y).abs() <= tol,
    }
}

fn vecs_close(mode: NumMode, xs: &[Scalar], ys: &[Scalar], tol: f64) -> bool {
    xs.len() == ys.len()
        && xs.iter().zip(ys.iter()).all(|(x, y)| scalar_close(mode, x, y, tol))
}

fn basis_vec(mode: NumMode, dim: usize, i: usize) -> Vec<Scalar> {
    let mut v = vec![Scalar::zero(mode); dim];
    v[i] = Scalar::one(mode);
    v
}

/// Checks the Fell bundle axioms and reports all violations: positive fibre
/// dimensions, associativity of the multiplication tensors, the involution
/// laws, saturation (`span(B_a B_b) = B_{a.b}` for all composable pairs),
/// and a positivity certificate: the regular representation of the full
/// section algebra (counting Haar system) must be a faithful
/// *-representation, so that products `a* a` are represented by
/// positive-semidefinite matrices.
pub fn validate_fell(b: &FellBundle) -> ValidationReport {
    let mut report = ValidationReport::new();
    let g = b.base();
    let mode = b.mode();
    let tol = 1e-12;

    for a in 0..g.n_arrows() {
        if b.dim(a) == 0 {
            report.push(
                "positive-dimension",
                vec![g.arrow_id(a).into()],
                "fibre has dimension zero",
            );
        }
    }

    // Associativity on basis triples.
    let assoc_bad = exec::flat_map_indexed(g.n_arrows(), |a| {
        let mut bad = Vec::new();
        for &bb in g.arrows_with_rng(g.src(a)) {
            let ab = g.comp_unchecked(a, bb);
            for &c in g.arrows_with_rng(g.src(bb)) {
                let bc = g.comp_unchecked(bb, c);
                for i in 0..b.dim(a) {
                    let ei = basis_vec(mode, b.dim(a), i);
                    for j in 0..b.dim(bb) {
                        let ej = basis_vec(mode, b.dim(bb), j);
                        let eij = b.mult_vec(a, bb, &ei, &ej);
                        for k in 0..b.dim(c) {
                            let ek = basis_vec(mode, b.dim(c), k);
                            let left = b.mult_vec(ab, c, &eij, &ek);
                            let right =
                                b.mult_vec(a, bc, &ei, &b.mult_vec(bb, c, &ej, &ek));
                            if !vecs_close(mode, &left, &right, tol) {
                                bad.push((a, bb, c));
                            }
                        }
                    }
                }
            }
        }
        bad
    });
    for (a, bb, c) in assoc_bad {
        report.push(
            "associativity",
            vec![g.arrow_id(a).into(), g.arrow_id(bb).into(), g.arrow_id(c).into()],
            "(u v) w != u (v w) on basis vectors",
        );
    }

    // Involution: star is involutive and anti-multiplicative.
    for a in 0..g.n_arrows() {
        for i in 0..b.dim(a) {
            let e = basis_vec(mode, b.dim(a), i);
            let back = b.star_vec(g.inv(a), &b.star_vec(a, &e));
            if !vecs_close(mode, &back, &e, tol) {
                report.push(
                    "involution",
                    vec![g.arrow_id(a).into()],
                    "star(star(u)) != u",
                );
            }
        }
    }
    for (a, c) in g.composable_pairs() {
        let ac = g.comp_unchecked(a, c);
        for i in 0..b.dim(a) {
            let ei = basis_vec(mode, b.dim(a), i);
            for j in 0..b.dim(c) {
                let ej = basis_vec(mode, b.dim(c), j);
                let left = b.star_vec(ac, &b.mult_vec(a, c, &ei, &ej));
                let right =
                    b.mult_vec(g.inv(c), g.inv(a), &b.star_vec(c, &ej), &b.star_vec(a, &ei));
                if !vecs_close(mode, &left, &right, tol) {
                    report.push(
                        "involution",
                        vec![g.arrow_id(a).into(), g.arrow_id(c).into()],
                        "star(u v) != star(v) star(u)",
                    );
                }
            }
        }
    }

    // Saturation: products span the target fibre.
    for (a, c) in g.composable_pairs() {
        let ac = g.comp_unchecked(a, c);
        if b.dim(ac) == 0 {
            continue;
        }
        let rows = b.dim(a) * b.dim(c);
        let mut m = crate::linalg::CMat::zeros(rows.max(1), b.dim(ac));
        if let Some(tensor) = b.mult_tensor(a, c) {
            for &(i, j, k, ref s) in tensor {
                m[(i * b.dim(c) + j, k)] += s.to_c64();
            }
        }
        if rows == 0 || crate::linalg::rank(&m, 1e-9) < b.dim(ac) {
            report.push(
                "saturation",
                vec![g.arrow_id(a).into(), g.arrow_id(c).into()],
                "products do not span the target fibre",
            );
        }
    }

    // Positivity certificate via the regular representation, only worth
    // running when the algebraic axioms hold.
    if report.is_valid() {
        let nu = crate::haar::HaarSystem::counting(g, mode);
        let alg = crate::cstar::section_algebra_unchecked(&nu, b);
        let alpha = crate::haar::UnitMeasure::uniform(g, mode);
        match crate::cstar::regular_representation(&alg, &alpha) {
            Err(_) => {
                report.push("positivity", vec![], "regular representation is not faithful");
            }
            Ok(rep) => {
                let d = alg.dim();
                for i in 0..d {
                    let mut f = vec![crate::linalg::C64::new(0.0, 0.0); d];
                    f[i] = crate::linalg::C64::new(1.0, 0.0);
                    if rep.star_residual(&alg, &f) > 1e-10 {
                        let (l, _) = alg.basis_label(i);
                        report.push(
                            "positivity",
                            vec![g.arrow_id(l).into()],
                            "representation does not intertwine the involution",
                        );
                        break;
                    }
                }
                if report.is_valid() {
                    // Spot-check positive semidefiniteness of a* a.
                    for i in 0..d.min(8) {
                        let mut f = vec![crate::linalg::C64::new(0.0, 0.0); d];
                        f[i] = crate::linalg::C64::new(1.0, 0.0);
                        let aa = alg.mul_c64(&alg.star_c64(&f), &f);
                        for m in rep.apply(&aa) {
                            let (vals, _) = crate::linalg::hermitian_eigen(&m);
                            if vals.first().copied().unwrap_or(0.0) < -1e-10 {
                                report.push(
                                    "positivity",
                                    vec![],
                                    "a* a has a negative eigenvalue",
                                );
                            }
                        }
                    }
                }
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groupoid::{cyclic_group, pair_groupoid, product_groupoid, validate_groupoid};
    use crate::iso::{groupoids_isomorphic, SearchResult, ISO_SEARCH_BOUND};

    #[test]
    fn trivial_bundles_validate() {
        for g in [pair_groupoid(&["a", "b"]), cyclic_group(4)] {
            let b = FellBundle::trivial(Arc::new(g), NumMode::Exact);
            assert!(validate_fell(&b).is_valid());
        }
    }

    #[test]
    fn endomorphism_bundle_validates() {
        let g = Arc::new(pair_groupoid(&["1", "2"]));
        let b = FellBundle::endomorphism(g, &[2, 1], NumMode::Float).unwrap();
        assert_eq!(b.total_dim(), 4 + 2 + 2 + 1);
        assert!(validate_fell(&b).is_valid());
    }

    #[test]
    fn cocycle_line_bundle_of_twisted_z2_validates() {
        let g = Arc::new(cyclic_group(2));
        let w = TorusCocycle::new(g.clone(), 2, &[("1".into(), "1".into(), 1)]).unwrap();
        assert!(validate_cocycle(&w).is_valid());
        let b = cocycle_line_bundle(&w, NumMode::Exact).unwrap();
        assert!(validate_fell(&b).is_valid());
    }

    #[test]
    fn non_cocycle_is_reported() {
        // omega(1,1) = -1 on Z/3 breaks the cocycle identity.
        let g = Arc::new(cyclic_group(3));
        let w = TorusCocycle::new(g.clone(), 2, &[("1".into(), "1".into(), 1)]).unwrap();
        let report = validate_cocycle(&w);
        assert!(report.has_rule("cocycle-identity"));
        assert!(matches!(cocycle_line_bundle(&w, NumMode::Exact), Err(Error::InvalidCocycle(_))));
    }

    #[test]
    fn coboundaries_are_cocycles() {
        let g = Arc::new(cyclic_group(4));
        let beta = vec![0, 3, 1, 2];
        let w = TorusCocycle::coboundary(g, 4, &beta).unwrap();
        assert!(validate_cocycle(&w).is_valid());
        let b = cocycle_line_bundle(&w, NumMode::Exact).unwrap();
        assert!(validate_fell(&b).is_valid());
    }

    #[test]
    fn twisting_the_endomorphism_bundle_stays_valid() {
        let g = Arc::new(cyclic_group(2));
        let w = TorusCocycle::new(g.clone(), 2, &[("1".into(), "1".into(), 1)]).unwrap();
        let b = FellBundle::endomorphism(g, &[2], NumMode::Exact).unwrap();
        let tb = twist_bundle(&b, &w).unwrap();
        assert!(validate_fell(&tb).is_valid());
    }

    #[test]
    fn restriction_to_unit_groupoid_keeps_unit_fibres() {
        let g = Arc::new(pair_groupoid(&["1", "2"]));
        let b = FellBundle::trivial(g.clone(), NumMode::Exact);
        let units = crate::groupoid::isotropy_bundle(&g);
        let restricted = restrict_bundle(&b, &units).unwrap();
        assert_eq!(restricted.total_dim(), 2);
        assert!(validate_fell(&restricted).is_valid());
    }

    #[test]
    fn central_extension_of_z2_by_minus_one_is_z4() {
        let h = Arc::new(cyclic_group(2));
        let w = TorusCocycle::new(h.clone(), 2, &[("1".into(), "1".into(), 1)]).unwrap();
        let (l, incl, proj) = central_extension_from_cocycle(&w, 2).unwrap();
        assert_eq!(l.n_arrows(), 4);
        assert!(validate_groupoid(&l).is_valid());
        assert_eq!(groupoids_isomorphic(&l, &cyclic_group(4), ISO_SEARCH_BOUND), SearchResult::Found);
        assert!(crate::functor::validate_functor(&incl).is_valid());
        let report = crate::functor::fibration_check(&proj).unwrap();
        assert!(report.is_fibration);
        // The fibre is the trivial Z/2 bundle.
        let fib = crate::functor::fibre(&proj).unwrap();
        assert_eq!(fib.n_arrows(), 2);
    }

    /// The standard nontrivial cocycle on Z/2 x Z/2.
    pub(crate) fn klein_cocycle() -> (GpRef, TorusCocycle) {
        let v4 = Arc::new(product_groupoid(&cyclic_group(2), &cyclic_group(2)));
        let mut entries = Vec::new();
        for a1 in 0..2i64 {
            for a2 in 0..2i64 {
                for b1 in 0..2i64 {
                    for b2 in 0..2i64 {
                        let e = a2 * b1;
                        if e % 2 != 0 {
                            entries.push((format!("{a1}&{a2}"), format!("{b1}&{b2}"), 1));
                        }
                    }
                }
            }
        }
        let w = TorusCocycle::new(v4.clone(), 2, &entries).unwrap();
        (v4, w)
    }

    #[test]
    fn central_extension_of_klein_four_is_dihedral() {
        let (_, w) = klein_cocycle();
        assert!(validate_cocycle(&w).is_valid());
        let (l, _, proj) = central_extension_from_cocycle(&w, 2).unwrap();
        assert_eq!(l.n_arrows(), 8);
        // D4: the dihedral group of order 8, via its permutation table on
        // the square's vertices.
        let perms: Vec<[usize; 4]> = vec![
            [0, 1, 2, 3],
            [1, 2, 3, 0],
            [2, 3, 0, 1],
            [3, 0, 1, 2],
            [3, 2, 1, 0],
            [0, 3, 2, 1],
            [1, 0, 3, 2],
            [2, 1, 0, 3],
        ];
        let ids: Vec<String> = (0..8).map(|i| format!("d{i}")).collect();
        let id_refs: Vec<&str> = ids.iter().map(|s| s.as_str()).collect();
        let mut mul = vec![vec![0usize; 8]; 8];
        for (i, a) in perms.iter().enumerate() {
            for (j, b) in perms.iter().enumerate() {
                let c = [a[b[0]], a[b[1]], a[b[2]], a[b[3]]];
                mul[i][j] = perms.iter().position(|p| *p == c).unwrap();
            }
        }
        let d4 = crate::groupoid::group_from_table(&id_refs, &mul, 0);
        assert_eq!(groupoids_isomorphic(&l, &d4, ISO_SEARCH_BOUND), SearchResult::Found);
        assert!(crate::functor::fibration_check(&proj).unwrap().is_fibration);
    }

    #[test]
    fn trivial_cocycle_extension_is_a_product() {
        let h = Arc::new(cyclic_group(2));
        let w = TorusCocycle::trivial(h, 1);
        let (l, _, _) = central_extension_from_cocycle(&w, 3).unwrap();
        let expect = product_groupoid(&cyclic_group(2), &cyclic_group(3));
        assert_eq!(groupoids_isomorphic(&l, &expect, ISO_SEARCH_BOUND), SearchResult::Found);
    }

    #[test]
    fn extension_order_must_divide() {
        let h = Arc::new(cyclic_group(2));
        let w = TorusCocycle::new(h, 2, &[("1".into(), "1".into(), 1)]).unwrap();
        assert!(matches!(
            central_extension_from_cocycle(&w, 3),
            Err(Error::OrderMismatch { .. })
        ));
    }
}
