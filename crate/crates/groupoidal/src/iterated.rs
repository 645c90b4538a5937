//! The induced Fell bundle over the base of a fibration, and the checks
//! built on it: the iterated decomposition of section algebras, the norm
//! estimate, spectral decomposition of central extensions, the induced
//! action on block labels, and the multiplier action of the fibre algebra.
//!
//! For a fibration `F: L -> H` with fibre `G` and a Fell bundle `B` over
//! `L`, the fibre of the induced bundle over an arrow `h` is the direct sum
//! of the `B`-fibres over the slice `L_h`, with the sliced convolution as
//! multiplication. Regrouping a section over `L` by slices is then a
//! *-isomorphism onto the section algebra of the induced bundle; both that
//! identity and the equality of block profiles are verified here, exactly
//! in the rational mode.

use crate::cstar::{
    self, minimal_central_idempotents, section_algebra_unchecked, wedderburn_seeded,
    BlockProfile, SectionAlgebra, DEFAULT_SEED,
};
use crate::error::{Error, Result};
use crate::exec;
use crate::fell::{cocycle_line_bundle, validate_fell, FellBundle, MultTensor, StarMap, TorusCocycle};
use crate::functor::{fibration_check, fibre, GroupoidFunctor};
use crate::groupoid::{restrict_to_invariant, FiniteGroupoid};
use crate::haar::{induce_haar, validate_haar, HaarSystem};
use crate::linalg::C64;
use crate::num::{NumMode, Real, Scalar};
use std::collections::HashMap;

/// The Fell bundle over the codomain of a fibration whose fibre over `h` is
/// `⊕_{l in L_h} B_l`.
#[derive(Debug, Clone)]
pub struct InducedFellBundle {
    /// The induced bundle, based on the codomain groupoid.
    pub bundle: FellBundle,
    /// For each codomain arrow: the (domain arrow, fibre index) labels of
    /// its fibre basis.
    pub slice_basis: Vec<Vec<(usize, usize)>>,
}

impl InducedFellBundle {
    /// Position of a (domain arrow, fibre index) pair within its slice.
    pub fn local_index(&self, h: usize, l: usize, i: usize) -> Option<usize> {
        self.slice_basis[h].iter().position(|&(a, b)| (a, b) == (l, i))
    }
}

fn require_fibration(f: &GroupoidFunctor) -> Result<()> {
    let report = fibration_check(f)?;
    if report.is_fibration {
        Ok(())
    } else {
        Err(Error::NotAFibration { missing: report.missing.len() })
    }
}

/// Builds the induced bundle without requiring the fibration condition;
/// over a non-fibration the result generally fails saturation, which
/// `validate_fell` reports.
pub fn induced_fell_bundle_raw(
    f: &GroupoidFunctor,
    b: &FellBundle,
    lam: &HaarSystem,
) -> Result<InducedFellBundle> {
    if **b.base() != **f.dom() {
        return Err(Error::MismatchedBase);
    }
    let dom = f.dom();
    let cod = f.cod();
    let mode = b.mode();
    let fib = fibre(f)?;

    // Slice bases, ordered by domain arrow index.
    let mut slice_basis: Vec<Vec<(usize, usize)>> = vec![Vec::new(); cod.n_arrows()];
    for l in 0..dom.n_arrows() {
        for i in 0..b.dim(l) {
            slice_basis[f.f1(l)].push((l, i));
        }
    }
    let local: Vec<HashMap<(usize, usize), usize>> = slice_basis
        .iter()
        .map(|basis| basis.iter().enumerate().map(|(p, &key)| (key, p)).collect())
        .collect();
    let dims: Vec<usize> = slice_basis.iter().map(Vec::len).collect();

    // The slice weight of a domain arrow: lam(inv(k).l) for a section k of
    // the slice through rng(l); left invariance makes this the lam-weight
    // at the source object, read off the unit arrow.
    let slice_weight = |l: usize| -> Real {
        let unit_id = dom.arrow_id(dom.unit(dom.src(l)));
        let idx = fib.arrow_index(unit_id).expect("units lie in the fibre");
        lam.weight[idx].clone()
    };

    let mut mult: HashMap<(usize, usize), MultTensor> = HashMap::new();
    for (h1, h2) in cod.composable_pairs() {
        mult.insert((h1, h2), Vec::new());
    }
    for (l1, l2) in dom.composable_pairs() {
        let (h1, h2) = (f.f1(l1), f.f1(l2));
        if cod.comp(h1, h2).is_none() {
            // Cannot happen for valid functors; guards raw misuse.
            continue;
        }
        let h12 = cod.comp_unchecked(h1, h2);
        let l12 = dom.comp_unchecked(l1, l2);
        let Some(tensor) = b.mult_tensor(l1, l2) else { continue };
        let w = Scalar::from_real(&slice_weight(l1));
        let out = mult.get_mut(&(h1, h2)).unwrap();
        for &(i, j, k, ref c) in tensor {
            out.push((
                local[h1][&(l1, i)],
                local[h2][&(l2, j)],
                local[h12][&(l12, k)],
                &w * c,
            ));
        }
    }
    let star: Vec<StarMap> = (0..cod.n_arrows())
        .map(|h| {
            let ih = cod.inv(h);
            let mut map = Vec::new();
            for &(l, i) in &slice_basis[h] {
                for &(ii, j, ref c) in b.star_map(l) {
                    if ii == i {
                        map.push((local[h][&(l, i)], local[ih][&(dom.inv(l), j)], c.clone()));
                    }
                }
            }
            map
        })
        .collect();
    let bundle = FellBundle::new(cod.clone(), mode, dims, mult, star)?;
    Ok(InducedFellBundle { bundle, slice_basis })
}

/// The unit-fibre algebra of the domain data at a codomain object `y`: the
/// section algebra of the bundle restricted to `G_y` with the restricted
/// fibre Haar system.
fn unit_fibre_algebra(
    f: &GroupoidFunctor,
    b: &FellBundle,
    lam: &HaarSystem,
    fib: &FiniteGroupoid,
    y: usize,
) -> Result<SectionAlgebra> {
    let objs: Vec<String> = (0..fib.n_objects())
        .filter(|&x| f.f0(f.dom().object_index(fib.object_id(x)).unwrap()) == y)
        .map(|x| fib.object_id(x).to_string())
        .collect();
    let gy = restrict_to_invariant(fib, &objs)?;
    let by = crate::fell::restrict_bundle(b, &gy)?;
    let lam_y = HaarSystem {
        weight: (0..gy.n_arrows())
            .map(|a| lam.weight[fib.arrow_index(gy.arrow_id(a)).unwrap()].clone())
            .collect(),
    };
    Ok(section_algebra_unchecked(&lam_y, &by))
}

/// Verifies that each unit fibre of the induced bundle coincides with the
/// section algebra of the corresponding restriction, at the level of bases
/// and structure constants.
fn unit_fibre_identity(
    f: &GroupoidFunctor,
    b: &FellBundle,
    lam: &HaarSystem,
    fib: &FiniteGroupoid,
    ind: &InducedFellBundle,
) -> Result<bool> {
    let dom = f.dom();
    let cod = f.cod();
    let mode = b.mode();
    let tol = 1e-12;
    for y in 0..cod.n_objects() {
        let uy = unit_fibre_algebra(f, b, lam, fib, y)?;
        let h = cod.unit(y);
        if uy.dim() != ind.slice_basis[h].len() {
            return Ok(false);
        }
        // Basis correspondence by (arrow id, fibre index).
        let gy = uy.groupoid().clone();
        let mut to_local = Vec::with_capacity(uy.dim());
        for p in 0..uy.dim() {
            let (a, i) = uy.basis_label(p);
            let l = dom.arrow_index(gy.arrow_id(a)).unwrap();
            match ind.local_index(h, l, i) {
                Some(idx) => to_local.push(idx),
                None => return Ok(false),
            }
        }
        // Compare structure constants.
        for p in 0..uy.dim() {
            for q in 0..uy.dim() {
                let mut expected = vec![Scalar::zero(mode); uy.dim()];
                for (k, s) in uy.table_entry(p, q) {
                    expected[*k] = &expected[*k] + s;
                }
                let mut got = vec![Scalar::zero(mode); uy.dim()];
                if let Some(tensor) = ind.bundle.mult_tensor(h, h) {
                    for &(i, j, k, ref c) in tensor {
                        if i == to_local[p] && j == to_local[q] {
                            let Some(back) = to_local.iter().position(|&t| t == k) else {
                                return Ok(false);
                            };
                            got[back] = &got[back] + c;
                        }
                    }
                }
                for (e, g) in expected.iter().zip(got.iter()) {
                    let d = e - g;
                    let ok = match mode {
                        NumMode::Exact => d.is_zero(),
                        NumMode::Float => d.abs() <= tol,
                    };
                    if !ok {
                        return Ok(false);
                    }
                }
            }
        }
    }
    Ok(true)
}

/// The induced Fell bundle of a fibration: checks the fibration condition,
/// validates the input bundle and Haar systems, builds the induced bundle,
/// and verifies that it is again a valid (saturated) Fell bundle whose unit
/// fibres are exactly the section algebras of the restrictions `G_y`.
pub fn induced_fell_bundle(
    f: &GroupoidFunctor,
    b: &FellBundle,
    lam: &HaarSystem,
) -> Result<InducedFellBundle> {
    require_fibration(f)?;
    let fell_report = validate_fell(b);
    if !fell_report.is_valid() {
        return Err(Error::InvalidBundle(format!("{:?}", fell_report.rules())));
    }
    let fib = fibre(f)?;
    let haar_report = validate_haar(&fib, lam);
    if !haar_report.is_valid() {
        return Err(Error::InvalidHaar(format!("{} violations", haar_report.violations.len())));
    }
    let ind = induced_fell_bundle_raw(f, b, lam)?;
    let induced_report = validate_fell(&ind.bundle);
    if !induced_report.is_valid() {
        return Err(Error::InvalidBundle(format!(
            "induced bundle fails validation: {:?}",
            induced_report.rules()
        )));
    }
    if !unit_fibre_identity(f, b, lam, &fib, &ind)? {
        return Err(Error::InvalidBundle(
            "induced unit fibres differ from the restricted section algebras".into(),
        ));
    }
    Ok(ind)
}

// ---------------------------------------------------------------------------
// Section transport and the decomposition check
// ---------------------------------------------------------------------------

/// Everything needed to compare the two section algebras of a fibration:
/// the domain algebra under the induced Haar system, the codomain algebra
/// of the induced bundle, and the regrouping bijection between their bases.
pub struct Iterated {
    pub functor: GroupoidFunctor,
    pub bundle: FellBundle,
    pub lam: HaarSystem,
    pub mu: HaarSystem,
    pub nu: HaarSystem,
    pub fib: FiniteGroupoid,
    pub induced: InducedFellBundle,
    /// Section algebra over the domain with the induced Haar system.
    pub dom_algebra: SectionAlgebra,
    /// Section algebra of the induced bundle over the codomain.
    pub cod_algebra: SectionAlgebra,
    /// Basis bijection: domain index -> codomain index.
    pub transport: Vec<usize>,
}

impl Iterated {
    pub fn new(
        f: &GroupoidFunctor,
        b: &FellBundle,
        lam: &HaarSystem,
        mu: &HaarSystem,
    ) -> Result<Self> {
        let cod_report = validate_haar(f.cod(), mu);
        if !cod_report.is_valid() {
            return Err(Error::InvalidHaar(format!(
                "{} violations",
                cod_report.violations.len()
            )));
        }
        let induced = induced_fell_bundle(f, b, lam)?;
        let fib = fibre(f)?;
        let nu = induce_haar(f, lam, mu)?;
        let dom_algebra = section_algebra_unchecked(&nu, b);
        let cod_algebra = section_algebra_unchecked(mu, &induced.bundle);
        let transport = (0..dom_algebra.dim())
            .map(|p| {
                let (l, i) = dom_algebra.basis_label(p);
                let h = f.f1(l);
                let local = induced.local_index(h, l, i).expect("slice bases are complete");
                cod_algebra.basis_position(h, local).expect("codomain basis is complete")
            })
            .collect();
        Ok(Iterated {
            functor: f.clone(),
            bundle: b.clone(),
            lam: lam.clone(),
            mu: mu.clone(),
            nu,
            fib,
            induced,
            dom_algebra,
            cod_algebra,
            transport,
        })
    }

    /// Transports a domain coefficient vector to the codomain algebra.
    pub fn transport_vec(&self, f: &[Scalar]) -> Vec<Scalar> {
        let mut out = self.cod_algebra.zero();
        for (p, c) in f.iter().enumerate() {
            if !c.is_zero() {
                out[self.transport[p]] = c.clone();
            }
        }
        out
    }
}

/// Outcome of the decomposition check.
#[derive(Debug, Clone)]
pub struct TheoremReport {
    pub iso: bool,
    /// Largest deviation over all basis pairs, between the transported
    /// product and the product of the transports (and likewise for the
    /// involution); exactly zero in rational mode when `iso` holds.
    pub max_residual: f64,
    pub blocks_dom: BlockProfile,
    pub blocks_cod: BlockProfile,
}

/// Verifies the iterated decomposition for a fibration and bundle: the
/// regrouping map intertwines convolution and involution on all basis
/// pairs, and the block profiles of the two section algebras agree.
pub fn theorem_check(
    f: &GroupoidFunctor,
    b: &FellBundle,
    lam: &HaarSystem,
    mu: &HaarSystem,
) -> Result<TheoremReport> {
    theorem_check_seeded(f, b, lam, mu, DEFAULT_SEED)
}

pub fn theorem_check_seeded(
    f: &GroupoidFunctor,
    b: &FellBundle,
    lam: &HaarSystem,
    mu: &HaarSystem,
    seed: u64,
) -> Result<TheoremReport> {
    let it = Iterated::new(f, b, lam, mu)?;
    let mode = b.mode();
    let d = it.dom_algebra.dim();

    let exact_zero = std::sync::atomic::AtomicBool::new(true);
    let residual = exec::max_indexed(d, |p| {
        let mut ep = it.dom_algebra.zero();
        ep[p] = Scalar::one(mode);
        let tp = it.transport_vec(&ep);
        let mut worst = 0.0f64;
        for q in 0..d {
            let mut eq = it.dom_algebra.zero();
            eq[q] = Scalar::one(mode);
            let left = it.transport_vec(&it.dom_algebra.mul(&ep, &eq));
            let right = it.cod_algebra.mul(&tp, &it.transport_vec(&eq));
            for (x, y) in left.iter().zip(right.iter()) {
                let diff = x - y;
                if !diff.is_zero() {
                    exact_zero.store(false, std::sync::atomic::Ordering::Relaxed);
                }
                worst = worst.max(diff.abs());
            }
        }
        // Involution.
        let left = it.transport_vec(&it.dom_algebra.star(&ep));
        let right = it.cod_algebra.star(&tp);
        for (x, y) in left.iter().zip(right.iter()) {
            let diff = x - y;
            if !diff.is_zero() {
                exact_zero.store(false, std::sync::atomic::Ordering::Relaxed);
            }
            worst = worst.max(diff.abs());
        }
        worst
    });

    let blocks_dom = wedderburn_seeded(&it.dom_algebra, seed)?;
    let blocks_cod = wedderburn_seeded(&it.cod_algebra, seed)?;
    let algebra_ok = match mode {
        NumMode::Exact => exact_zero.load(std::sync::atomic::Ordering::Relaxed),
        NumMode::Float => residual <= 1e-10,
    };
    Ok(TheoremReport {
        iso: algebra_ok && blocks_dom == blocks_cod,
        max_residual: residual,
        blocks_dom,
        blocks_cod,
    })
}

// ---------------------------------------------------------------------------
// Norm estimate
// ---------------------------------------------------------------------------

/// Outcome of the norm estimate for one element.
#[derive(Debug, Clone)]
pub struct NormEstimate {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// Tolerance slack for the norm estimate.
pub const NORM_SLACK: f64 = 1e-9;

fn slice_bimodule_norm(it: &Iterated, h: usize, slice: &[Scalar]) -> Result<f64> {
    // ||psi_h|| = ||(psi_h)* psi_h||^{1/2} in the unit-fibre algebra at src(h).
    let cod = it.functor.cod();
    let ih = cod.inv(h);
    let starred = it.induced.bundle.star_vec(h, slice);
    let inner = it.induced.bundle.mult_vec(ih, h, &starred, slice);
    let unit_arrow = cod.unit(cod.src(h));
    // Read the inner product as an element of the codomain algebra's unit
    // fibre and take its operator norm there.
    let mut vec = it.cod_algebra.zero();
    for (local, c) in inner.iter().enumerate() {
        if !c.is_zero() {
            let p = it.cod_algebra.basis_position(unit_arrow, local).unwrap();
            vec[p] = c.clone();
        }
    }
    // The unit-fibre algebra embeds in the codomain algebra; its norm is
    // computed in the regular representation of the full codomain algebra,
    // which restricts to the unit fibre faithfully.
    let norm = cstar::operator_norm(&it.cod_algebra, &vec)?;
    Ok(norm.sqrt())
}

/// Checks `||psi|| <= (||psi||_H ||psi*||_H)^{1/2}` where
/// `||psi||_H = max_y sum_{h in H^y} mu(h) ||psi|_{L_h}||` and the slice
/// norms are bimodule norms in the induced bundle.
pub fn norm_estimate_check(it: &Iterated, psi: &[Scalar]) -> Result<NormEstimate> {
    let cod = it.functor.cod();
    let lhs = cstar::operator_norm(&it.dom_algebra, psi)?;

    let transported = it.transport_vec(psi);
    let slice_of = |vec: &[Scalar], h: usize| -> Vec<Scalar> {
        let dim = it.induced.bundle.dim(h);
        let mut out = vec![Scalar::zero(it.bundle.mode()); dim];
        for local in 0..dim {
            if let Some(p) = it.cod_algebra.basis_position(h, local) {
                out[local] = vec[p].clone();
            }
        }
        out
    };
    let h_norm = |vec: &[Scalar]| -> Result<f64> {
        let mut worst = 0.0f64;
        for y in 0..cod.n_objects() {
            let mut total = 0.0;
            for &h in cod.arrows_with_rng(y) {
                let slice = slice_of(vec, h);
                if slice.iter().all(Scalar::is_zero) {
                    continue;
                }
                total += it.mu.weight[h].to_f64() * slice_bimodule_norm(it, h, &slice)?;
            }
            worst = worst.max(total);
        }
        Ok(worst)
    };
    let psi_h = h_norm(&transported)?;
    let psi_star_h = h_norm(&it.cod_algebra.star(&transported))?;
    let rhs = (psi_h * psi_star_h).sqrt();
    Ok(NormEstimate { lhs, rhs, holds: lhs <= rhs + NORM_SLACK })
}

// ---------------------------------------------------------------------------
// Twist spectral decomposition
// ---------------------------------------------------------------------------

/// Outcome of the spectral decomposition of a central extension.
#[derive(Debug, Clone)]
pub struct TwistReport {
    /// Block profile of each spectral summand, indexed by the character
    /// exponent `n` in `Z/k`.
    pub summand_profiles: Vec<BlockProfile>,
    /// Block profiles of the twisted algebras `C*(H, omega^n)`.
    pub twisted_profiles: Vec<BlockProfile>,
    pub total_profile: BlockProfile,
    /// Whether the summands match the twisted algebras and jointly exhaust
    /// the extension's algebra.
    pub matches: bool,
}

/// Builds the central extension `L` of a cocycle, computes the spectral
/// projections of the central copy of `Z/k` inside `C*(L)`, splits the
/// block profile of `C*(L)` along them, and compares each spectral summand
/// with the twisted algebra `C*(H, omega^n)`.
pub fn twist_decompose(w: &TorusCocycle, k: u32, mode: NumMode) -> Result<TwistReport> {
    twist_decompose_seeded(w, k, mode, DEFAULT_SEED)
}

pub fn twist_decompose_seeded(
    w: &TorusCocycle,
    k: u32,
    mode: NumMode,
    seed: u64,
) -> Result<TwistReport> {
    let (l, incl, _proj) = crate::fell::central_extension_from_cocycle(w, k)?;
    let h = w.base();
    let nu = HaarSystem::counting(&l, mode);
    let trivial = FellBundle::trivial(l.clone(), mode);
    let sl = section_algebra_unchecked(&nu, &trivial);

    // Central projections p_n = (1/k) sum_j zeta^{-n j} u_j with
    // u_j = sum_x delta_{1_x # j}.
    let kk = k as i64;
    let t = incl.dom();
    let u_j = |j: i64| -> Vec<C64> {
        let mut v = vec![C64::new(0.0, 0.0); sl.dim()];
        for a in 0..t.n_arrows() {
            let id = t.arrow_id(a);
            let (_, jj) = id.rsplit_once('#').unwrap();
            if jj.parse::<i64>().unwrap() == j {
                let arrow = incl.f1(a);
                v[sl.basis_position(arrow, 0).unwrap()] = C64::new(1.0, 0.0);
            }
        }
        v
    };
    let p_n = |n: i64| -> Vec<C64> {
        let mut v = vec![C64::new(0.0, 0.0); sl.dim()];
        for j in 0..kk {
            let phase =
                C64::from_polar(1.0 / k as f64, -std::f64::consts::TAU * (n * j) as f64 / k as f64);
            for (t, u) in v.iter_mut().zip(u_j(j).iter()) {
                *t += phase * u;
            }
        }
        v
    };

    // Assign the minimal central idempotents of C*(L) to spectral summands.
    let idempotents = minimal_central_idempotents(&sl, seed)?;
    let tol = 1e-7;
    let mut summand_sizes: Vec<Vec<usize>> = vec![Vec::new(); k as usize];
    let mut total_sizes = Vec::new();
    for e in &idempotents {
        let m = sl.left_mult_c64(e);
        let d = crate::linalg::rank(&m, 1e-9);
        let n_block = (d as f64).sqrt().round() as usize;
        if n_block * n_block != d {
            return Err(Error::DegenerateRandomElement(0));
        }
        total_sizes.push(n_block);
        let mut owner = None;
        for n in 0..kk {
            let prod = sl.mul_c64(&p_n(n), e);
            let diff = prod
                .iter()
                .zip(e.iter())
                .map(|(x, y)| (x - y).norm())
                .fold(0.0, f64::max);
            if diff < tol {
                owner = Some(n as usize);
                break;
            }
        }
        let Some(n) = owner else {
            return Err(Error::InvalidCocycle(
                "a block is not contained in a single spectral summand".into(),
            ));
        };
        summand_sizes[n].push(n_block);
    }
    let summand_profiles: Vec<BlockProfile> = summand_sizes
        .into_iter()
        .map(|mut sizes| {
            sizes.sort_unstable_by(|a, b| b.cmp(a));
            BlockProfile(sizes)
        })
        .collect();
    let total_profile = {
        total_sizes.sort_unstable_by(|a, b| b.cmp(a));
        BlockProfile(total_sizes)
    };

    // The reference profiles of the twisted algebras C*(H, omega^n).
    let scale = (k / w.order()) as i64;
    let mut twisted_profiles = Vec::with_capacity(k as usize);
    for n in 0..kk {
        // As a cocycle with values in the k-th roots: exponents scale * e * n.
        let entries: Vec<(String, String, i64)> = w
            .entries()
            .into_iter()
            .map(|(a, b, e)| (a, b, (e * scale * n).rem_euclid(kk)))
            .collect();
        let wn = TorusCocycle::new(h.clone(), k, &entries)?;
        let bn = cocycle_line_bundle(&wn, mode)?;
        let an = section_algebra_unchecked(&HaarSystem::counting(h, mode), &bn);
        twisted_profiles.push(wedderburn_seeded(&an, seed)?);
    }

    let dims_ok =
        total_profile.total_dim() == sl.dim()
            && summand_profiles.iter().map(BlockProfile::total_dim).sum::<usize>() == sl.dim();
    let matches = dims_ok
        && summand_profiles
            .iter()
            .zip(twisted_profiles.iter())
            .all(|(a, b)| a == b);
    Ok(TwistReport { summand_profiles, twisted_profiles, total_profile, matches })
}

// ---------------------------------------------------------------------------
// Induced action on block labels
// ---------------------------------------------------------------------------

/// The induced action of the base groupoid on the block labels of the
/// unit-fibre algebras: one label set per codomain object, and one
/// bijection per codomain arrow (from the labels over its source to the
/// labels over its range), composing functorially.
#[derive(Debug, Clone)]
pub struct PrimAction {
    /// Number of block labels at each codomain object.
    pub labels: Vec<usize>,
    /// For each codomain arrow `h`: `perm[j]` is the label over `rng(h)`
    /// paired with label `j` over `src(h)`.
    pub perms: Vec<Vec<usize>>,
    pub functorial: bool,
}

/// Computes the block-label action via the finite Rieffel correspondence:
/// label `j` at `src(h)` is sent to the unique label `i` at `rng(h)` with
/// `e_i . A_h . f_j` nonzero. Functoriality and unit behaviour are
/// verified exactly as permutation identities.
pub fn prim_action(it: &Iterated, seed: u64) -> Result<PrimAction> {
    let cod = it.functor.cod();
    let bundle = &it.induced.bundle;

    // Minimal central idempotents of each unit-fibre algebra, expressed in
    // the fibre coordinates of the induced bundle.
    let mut fibre_idempotents: Vec<Vec<Vec<C64>>> = Vec::with_capacity(cod.n_objects());
    for y in 0..cod.n_objects() {
        let uy = unit_fibre_algebra(&it.functor, &it.bundle, &it.lam, &it.fib, y)?;
        let es = minimal_central_idempotents(&uy, seed)?;
        let h = cod.unit(y);
        let dom = it.functor.dom();
        let gy = uy.groupoid().clone();
        let mut in_fibre_coords = Vec::with_capacity(es.len());
        for e in es {
            let mut v = vec![C64::new(0.0, 0.0); bundle.dim(h)];
            for (p, &c) in e.iter().enumerate() {
                let (a, i) = uy.basis_label(p);
                let l = dom.arrow_index(gy.arrow_id(a)).unwrap();
                v[it.induced.local_index(h, l, i).unwrap()] = c;
            }
            in_fibre_coords.push(v);
        }
        fibre_idempotents.push(in_fibre_coords);
    }
    let labels: Vec<usize> = fibre_idempotents.iter().map(Vec::len).collect();

    let to_scalar = |v: &[C64]| -> Vec<Scalar> { v.iter().map(|&z| Scalar::Float(z)).collect() };
    let mut perms = Vec::with_capacity(cod.n_arrows());
    for h in 0..cod.n_arrows() {
        let (uy_r, uy_s) = (cod.rng(h), cod.src(h));
        let hr = cod.unit(uy_r);
        let hs = cod.unit(uy_s);
        let dim_h = bundle.dim(h);
        let mut perm = vec![usize::MAX; labels[uy_s]];
        for (j, fj) in fibre_idempotents[uy_s].iter().enumerate() {
            let mut owner = None;
            for (i, ei) in fibre_idempotents[uy_r].iter().enumerate() {
                // e_i . v . f_j over all fibre basis vectors v of A_h.
                let mut nonzero = false;
                for t in 0..dim_h {
                    let mut v = vec![Scalar::Float(C64::new(0.0, 0.0)); dim_h];
                    v[t] = Scalar::Float(C64::new(1.0, 0.0));
                    let left = bundle.mult_vec(hr, h, &to_scalar(ei), &v);
                    let full = bundle.mult_vec(h, hs, &left, &to_scalar(fj));
                    if full.iter().any(|c| c.abs() > 1e-8) {
                        nonzero = true;
                        break;
                    }
                }
                if nonzero {
                    if owner.is_some() {
                        return Err(Error::InvalidBundle(
                            "bimodule pairs a source block with two range blocks".into(),
                        ));
                    }
                    owner = Some(i);
                }
            }
            perm[j] =
                owner.ok_or_else(|| Error::InvalidBundle("bimodule misses a block".into()))?;
        }
        // Bijectivity.
        let mut seen = vec![false; labels[uy_r]];
        for &i in &perm {
            if i == usize::MAX || seen[i] {
                return Err(Error::InvalidBundle("block pairing is not a bijection".into()));
            }
            seen[i] = true;
        }
        if labels[uy_r] != labels[uy_s] && !seen.iter().all(|&s| s) {
            return Err(Error::InvalidBundle("block pairing is not a bijection".into()));
        }
        perms.push(perm);
    }

    // Functoriality: units act as the identity, composition matches.
    let mut functorial = true;
    for y in 0..cod.n_objects() {
        let u = cod.unit(y);
        if perms[u].iter().enumerate().any(|(j, &i)| i != j) {
            functorial = false;
        }
    }
    for (h1, h2) in cod.composable_pairs() {
        let h12 = cod.comp_unchecked(h1, h2);
        for j in 0..perms[h12].len() {
            if perms[h12][j] != perms[h1][perms[h2][j]] {
                functorial = false;
            }
        }
    }
    Ok(PrimAction { labels, perms, functorial })
}

// ---------------------------------------------------------------------------
// Multiplier action of the fibre algebra
// ---------------------------------------------------------------------------

/// Verifies that convolution by sections of the fibre (with the fibre Haar
/// system) acts as a multiplier of the domain section algebra: the action
/// is associative on both sides and satisfies the adjoint identity
/// `psi1* (phi psi2) = (phi* psi1)* psi2`, on all basis triples.
pub fn multiplier_action_check(it: &Iterated) -> Result<bool> {
    let dom = it.functor.dom();
    let fib = &it.fib;
    let by = crate::fell::restrict_bundle(&it.bundle, fib)?;
    let sg = section_algebra_unchecked(&it.lam, &by);
    let sl = &it.dom_algebra;
    let mode = it.bundle.mode();
    let tol = 1e-10;

    // phi * psi with the fibre Haar weight (not the induced one).
    let act = |phi: &[Scalar], psi: &[Scalar]| -> Vec<Scalar> {
        let mut out = sl.zero();
        for p in 0..sg.dim() {
            if phi[p].is_zero() {
                continue;
            }
            let (gf, i) = sg.basis_label(p);
            let g_dom = dom.arrow_index(fib.arrow_id(gf)).unwrap();
            let w = Scalar::from_real(&it.lam.weight[gf]);
            for q in 0..sl.dim() {
                if psi[q].is_zero() {
                    continue;
                }
                let (l, j) = sl.basis_label(q);
                if dom.src(g_dom) != dom.rng(l) {
                    continue;
                }
                let gl = dom.comp_unchecked(g_dom, l);
                let Some(tensor) = it.bundle.mult_tensor(g_dom, l) else { continue };
                let c = &(&phi[p] * &psi[q]) * &w;
                for &(ii, jj, kk, ref s) in tensor {
                    if ii == i && jj == j {
                        let target = sl.basis_position(gl, kk).unwrap();
                        out[target] = &out[target] + &(&c * s);
                    }
                }
            }
        }
        out
    };
    let close = |u: &[Scalar], v: &[Scalar]| -> bool {
        u.iter().zip(v.iter()).all(|(x, y)| {
            let d = x - y;
            match mode {
                NumMode::Exact => d.is_zero(),
                NumMode::Float => d.abs() <= tol,
            }
        })
    };

    let basis_g = |p: usize| {
        let mut v = vec![Scalar::zero(mode); sg.dim()];
        v[p] = Scalar::one(mode);
        v
    };
    let basis_l = |p: usize| {
        let mut v = sl.zero();
        v[p] = Scalar::one(mode);
        v
    };
    for p1 in 0..sg.dim() {
        let phi1 = basis_g(p1);
        for p2 in 0..sg.dim() {
            let phi2 = basis_g(p2);
            for q in 0..sl.dim() {
                let psi = basis_l(q);
                // (phi1 phi2) psi = phi1 (phi2 psi)
                let lhs = act(&sg.mul(&phi1, &phi2), &psi);
                let rhs = act(&phi1, &act(&phi2, &psi));
                if !close(&lhs, &rhs) {
                    return Ok(false);
                }
            }
        }
        for q1 in 0..sl.dim() {
            let psi1 = basis_l(q1);
            for q2 in 0..sl.dim() {
                let psi2 = basis_l(q2);
                // phi (psi1 psi2) = (phi psi1) psi2
                let lhs = act(&phi1, &sl.mul(&psi1, &psi2));
                let rhs = sl.mul(&act(&phi1, &psi1), &psi2);
                if !close(&lhs, &rhs) {
                    return Ok(false);
                }
                // psi1* (phi psi2) = (phi* psi1)* psi2
                let lhs = sl.mul(&sl.star(&psi1), &act(&phi1, &psi2));
                let rhs = sl.mul(&sl.star(&act(&sg.star(&phi1), &psi1)), &psi2);
                if !close(&lhs, &rhs) {
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
    use crate::fell::TorusCocycle;
    use crate::groupoid::cyclic_group;
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

    fn counting_data(f: &GroupoidFunctor, mode: NumMode) -> (FellBundle, HaarSystem, HaarSystem) {
        let b = FellBundle::trivial(f.dom().clone(), mode);
        let fib = fibre(f).unwrap();
        let lam = HaarSystem::counting(&fib, mode);
        let mu = HaarSystem::counting(f.cod(), mode);
        (b, lam, mu)
    }

    #[test]
    fn induced_bundle_of_group_extension() {
        let f = z4_to_z2();
        let (b, lam, _) = counting_data(&f, NumMode::Exact);
        let ind = induced_fell_bundle(&f, &b, &lam).unwrap();
        // A_0 has the fibre arrows {0, 2}, A_1 the slice {1, 3}.
        assert_eq!(ind.bundle.dim(f.cod().arrow_index("0").unwrap()), 2);
        assert_eq!(ind.bundle.dim(f.cod().arrow_index("1").unwrap()), 2);
        assert!(validate_fell(&ind.bundle).is_valid());
    }

    #[test]
    fn induced_bundle_of_identity_is_the_bundle_itself() {
        let g = Arc::new(cyclic_group(3));
        let f = GroupoidFunctor::identity(g.clone());
        let b = FellBundle::trivial(g.clone(), NumMode::Exact);
        let fib = fibre(&f).unwrap();
        let lam = HaarSystem::counting(&fib, NumMode::Exact);
        let ind = induced_fell_bundle(&f, &b, &lam).unwrap();
        for a in 0..g.n_arrows() {
            assert_eq!(ind.bundle.dim(a), 1);
        }
    }

    #[test]
    fn theorem_check_on_group_extension_rational() {
        let f = z4_to_z2();
        let (b, lam, mu) = counting_data(&f, NumMode::Exact);
        let report = theorem_check(&f, &b, &lam, &mu).unwrap();
        assert!(report.iso);
        assert_eq!(report.max_residual, 0.0);
        assert_eq!(report.blocks_dom, BlockProfile(vec![1, 1, 1, 1]));
        assert_eq!(report.blocks_cod, BlockProfile(vec![1, 1, 1, 1]));
    }

    #[test]
    fn multiplier_action_identities_hold() {
        let f = z4_to_z2();
        let (b, lam, mu) = counting_data(&f, NumMode::Exact);
        let it = Iterated::new(&f, &b, &lam, &mu).unwrap();
        assert!(multiplier_action_check(&it).unwrap());
    }

    #[test]
    fn twist_decompose_z2() {
        let h = Arc::new(cyclic_group(2));
        let w = TorusCocycle::new(h, 2, &[("1".into(), "1".into(), 1)]).unwrap();
        let report = twist_decompose(&w, 2, NumMode::Exact).unwrap();
        assert!(report.matches);
        assert_eq!(report.total_profile, BlockProfile(vec![1, 1, 1, 1]));
        assert_eq!(report.summand_profiles[0], BlockProfile(vec![1, 1]));
        assert_eq!(report.summand_profiles[1], BlockProfile(vec![1, 1]));
    }

    #[test]
    fn prim_action_of_identity_is_identity() {
        let f = z4_to_z2();
        let (b, lam, mu) = counting_data(&f, NumMode::Exact);
        let it = Iterated::new(&f, &b, &lam, &mu).unwrap();
        let action = prim_action(&it, DEFAULT_SEED).unwrap();
        assert!(action.functorial);
        assert_eq!(action.labels, vec![2]);
    }
}
