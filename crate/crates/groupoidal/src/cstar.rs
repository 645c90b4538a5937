//! Finite-dimensional section *-algebras of Fell bundles: Haar-weighted
//! convolution, involution, regular representations, operator norms, block
//! (Wedderburn) decomposition, and *-isomorphism testing.
//!
//! At finite scale the section algebra is already complete, and finite
//! groupoids are amenable, so the regular representation attains the
//! maximal C*-norm; the C*-identity is verified numerically in the tests
//! rather than re-proved.

use crate::error::{Error, Result};
use crate::exec;
use crate::fell::{validate_fell, FellBundle};
use crate::groupoid::GpRef;
use crate::haar::{validate_haar, HaarSystem, UnitMeasure};
use crate::linalg::{self, CMat, C64};
use crate::num::{NumMode, Scalar};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::HashMap;
use std::fmt;

/// Default seed for the randomized steps (generic central elements); every
/// public entry point lets callers pass their own.
pub const DEFAULT_SEED: u64 = 0x5eed_cafe;

/// Relative gap used when clustering eigenvalues of generic central
/// elements.
pub const CLUSTER_GAP: f64 = 1e-8;

/// A finite-dimensional *-algebra of sections, with basis indexed by pairs
/// (arrow, fibre basis index) and sparse structure constants for the
/// Haar-weighted convolution.
#[derive(Debug, Clone)]
pub struct SectionAlgebra {
    groupoid: GpRef,
    haar: HaarSystem,
    mode: NumMode,
    basis: Vec<(usize, usize)>,
    basis_index: HashMap<(usize, usize), usize>,
    table: HashMap<(usize, usize), Vec<(usize, Scalar)>>,
    star_table: Vec<Vec<(usize, Scalar)>>,
}

impl SectionAlgebra {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn groupoid(&self) -> &GpRef {
        &self.groupoid
    }

    pub fn haar(&self) -> &HaarSystem {
        &self.haar
    }

    pub fn mode(&self) -> NumMode {
        self.mode
    }

    /// The basis label (arrow, fibre index) of a coordinate.
    pub fn basis_label(&self, i: usize) -> (usize, usize) {
        self.basis[i]
    }

    pub fn basis_position(&self, arrow: usize, fibre: usize) -> Option<usize> {
        self.basis_index.get(&(arrow, fibre)).copied()
    }

    pub fn zero(&self) -> Vec<Scalar> {
        vec![Scalar::zero(self.mode); self.dim()]
    }

    /// Convolution product of two coefficient vectors.
    pub fn mul(&self, f: &[Scalar], g: &[Scalar]) -> Vec<Scalar> {
        let mut out = self.zero();
        for i in 0..self.dim() {
            if f[i].is_zero() {
                continue;
            }
            for j in 0..self.dim() {
                if g[j].is_zero() {
                    continue;
                }
                if let Some(terms) = self.table.get(&(i, j)) {
                    let c = &f[i] * &g[j];
                    for (k, s) in terms {
                        out[*k] = &out[*k] + &(&c * s);
                    }
                }
            }
        }
        out
    }

    /// Involution of a coefficient vector (conjugate-linear).
    pub fn star(&self, f: &[Scalar]) -> Vec<Scalar> {
        let mut out = self.zero();
        for i in 0..self.dim() {
            if f[i].is_zero() {
                continue;
            }
            let c = f[i].conj();
            for (j, s) in &self.star_table[i] {
                out[*j] = &out[*j] + &(&c * s);
            }
        }
        out
    }

    /// Product table entry on basis elements.
    pub fn table_entry(&self, i: usize, j: usize) -> &[(usize, Scalar)] {
        self.table.get(&(i, j)).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Complex-coefficient product, for the numerical paths.
    pub fn mul_c64(&self, f: &[C64], g: &[C64]) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); self.dim()];
        for i in 0..self.dim() {
            if f[i].norm_sqr() == 0.0 {
                continue;
            }
            for j in 0..self.dim() {
                if g[j].norm_sqr() == 0.0 {
                    continue;
                }
                if let Some(terms) = self.table.get(&(i, j)) {
                    let c = f[i] * g[j];
                    for (k, s) in terms {
                        out[*k] += c * s.to_c64();
                    }
                }
            }
        }
        out
    }

    /// Complex-coefficient involution.
    pub fn star_c64(&self, f: &[C64]) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); self.dim()];
        for i in 0..self.dim() {
            let c = f[i].conj();
            if c.norm_sqr() == 0.0 {
                continue;
            }
            for (j, s) in &self.star_table[i] {
                out[*j] += c * s.to_c64();
            }
        }
        out
    }

    /// Left-multiplication matrix of a complex element.
    pub fn left_mult_c64(&self, f: &[C64]) -> CMat {
        let d = self.dim();
        let mut m = CMat::zeros(d, d);
        for j in 0..d {
            let mut e = vec![C64::new(0.0, 0.0); d];
            e[j] = C64::new(1.0, 0.0);
            let col = self.mul_c64(f, &e);
            for k in 0..d {
                m[(k, j)] = col[k];
            }
        }
        m
    }

    /// The multiplicative unit, computed numerically by least squares from
    /// the structure constants.
    pub fn unit_c64(&self) -> Vec<C64> {
        let d = self.dim();
        // Equations: for each basis j, sum_i u_i (e_i e_j) = e_j.
        let mut m = CMat::zeros(d * d, d);
        let mut rhs = nalgebra::DVector::<C64>::zeros(d * d);
        for j in 0..d {
            for i in 0..d {
                for (k, s) in self.table_entry(i, j) {
                    m[(j * d + k, i)] += s.to_c64();
                }
            }
            rhs[j * d + j] = C64::new(1.0, 0.0);
        }
        let svd = m.svd(true, true);
        let sol = svd.solve(&rhs, 1e-12).expect("least squares solve");
        sol.iter().copied().collect()
    }
}

/// Builds the section algebra of a Fell bundle with a Haar system, without
/// validating the bundle. Used internally, in particular by `validate_fell`
/// itself for the positivity certificate.
pub(crate) fn section_algebra_unchecked(nu: &HaarSystem, b: &FellBundle) -> SectionAlgebra {
    let g = b.base().clone();
    let mode = b.mode();
    let mut basis = Vec::new();
    let mut basis_index = HashMap::new();
    for l in 0..g.n_arrows() {
        for i in 0..b.dim(l) {
            basis_index.insert((l, i), basis.len());
            basis.push((l, i));
        }
    }
    // Basis product: (l1, i) * (l2, j) = nu(l1) * mult(e_i, e_j) over l1.l2.
    let mut table = HashMap::new();
    for (l1, l2) in g.composable_pairs() {
        let l12 = g.comp_unchecked(l1, l2);
        let Some(tensor) = b.mult_tensor(l1, l2) else { continue };
        let w = Scalar::from_real(&nu.weight[l1]);
        for &(i, j, k, ref c) in tensor {
            let row = table
                .entry((basis_index[&(l1, i)], basis_index[&(l2, j)]))
                .or_insert_with(Vec::new);
            let target = basis_index[&(l12, k)];
            let coeff = &w * c;
            match row.iter_mut().find(|(t, _)| *t == target) {
                Some((_, existing)) => *existing = &*existing + &coeff,
                None => row.push((target, coeff)),
            }
        }
    }
    let star_table = (0..basis.len())
        .map(|p| {
            let (l, i) = basis[p];
            b.star_map(l)
                .iter()
                .filter(|&&(ii, _, _)| ii == i)
                .map(|&(_, j, ref c)| (basis_index[&(g.inv(l), j)], c.clone()))
                .collect()
        })
        .collect();
    SectionAlgebra { groupoid: g, haar: nu.clone(), mode, basis, basis_index, table, star_table }
}

/// The section *-algebra of a validated Fell bundle under the Haar-weighted
/// convolution `(f1 * f2)(l) = sum nu(l1) f1(l1) f2(inv(l1).l)`.
pub fn section_algebra(l: &GpRef, nu: &HaarSystem, b: &FellBundle) -> Result<SectionAlgebra> {
    if **l != **b.base() {
        return Err(Error::MismatchedBase);
    }
    let haar_report = validate_haar(l, nu);
    if !haar_report.is_valid() {
        return Err(Error::InvalidHaar(format!("{} violations", haar_report.violations.len())));
    }
    let fell_report = validate_fell(b);
    if !fell_report.is_valid() {
        return Err(Error::InvalidBundle(format!(
            "bundle fails validation: {:?}",
            fell_report.rules()
        )));
    }
    Ok(section_algebra_unchecked(nu, b))
}

// ---------------------------------------------------------------------------
// Regular representation
// ---------------------------------------------------------------------------

/// One block of the regular representation: the Hilbert space spanned by
/// the bundle fibres over arrows with a fixed source object.
#[derive(Debug, Clone)]
pub struct RepBlock {
    pub object: usize,
    /// Basis labels (arrow with src = object, fibre index).
    pub basis: Vec<(usize, usize)>,
    /// One matrix per algebra basis element, in the orthonormalized gauge.
    pub matrices: Vec<CMat>,
}

/// The block-diagonal regular representation over the support of a unit
/// measure.
#[derive(Debug, Clone)]
pub struct RegularRep {
    pub blocks: Vec<RepBlock>,
    algebra_dim: usize,
}

impl RegularRep {
    /// Matrices of a complex element, one per block.
    pub fn apply(&self, f: &[C64]) -> Vec<CMat> {
        self.blocks
            .iter()
            .map(|block| {
                let n = block.basis.len();
                let mut m = CMat::zeros(n, n);
                for (i, &c) in f.iter().enumerate() {
                    if c.norm_sqr() > 0.0 {
                        m += &block.matrices[i] * c;
                    }
                }
                m
            })
            .collect()
    }

    /// Largest operator norm over the blocks.
    pub fn norm(&self, f: &[C64]) -> f64 {
        self.apply(f).iter().map(linalg::operator_norm).fold(0.0, f64::max)
    }

    /// Largest deviation between the matrices of `pi(star f)` and the
    /// adjoints of `pi(f)`.
    pub fn star_residual(&self, alg: &SectionAlgebra, f: &[C64]) -> f64 {
        let starred = self.apply(&alg.star_c64(f));
        self.apply(f)
            .iter()
            .zip(starred.iter())
            .map(|(m, s)| linalg::max_abs_diff(&m.adjoint(), s))
            .fold(0.0, f64::max)
    }

    /// Whether the representation has zero kernel.
    pub fn is_faithful(&self) -> bool {
        let rows: usize = self.blocks.iter().map(|b| b.basis.len() * b.basis.len()).sum();
        if self.algebra_dim == 0 {
            return true;
        }
        let mut m = CMat::zeros(rows, self.algebra_dim);
        let mut row0 = 0;
        for block in &self.blocks {
            let n = block.basis.len();
            for (i, mat) in block.matrices.iter().enumerate() {
                for r in 0..n {
                    for c in 0..n {
                        m[(row0 + r * n + c, i)] = mat[(r, c)];
                    }
                }
            }
            row0 += n * n;
        }
        linalg::rank(&m, 1e-10) == self.algebra_dim
    }
}

/// The regular representation of a section algebra over the support of
/// `alpha`: for each object `x` with positive mass, the space
/// `⊕_{src(l) = x} B_l` carries `pi(f) xi = f * xi`, orthonormalized for
/// the Haar-weighted inner product (mass `nu(inv(l))` on the summand of
/// `l`). Fails with [`Error::NotFaithful`] when the support misses an
/// orbit.
pub fn regular_representation(a: &SectionAlgebra, alpha: &UnitMeasure) -> Result<RegularRep> {
    let g = &a.groupoid;
    if alpha.mass.len() != g.n_objects() {
        return Err(Error::InvalidHaar("measure length mismatch".into()));
    }
    let mut blocks = Vec::new();
    for x in 0..g.n_objects() {
        if !alpha.mass[x].is_positive() {
            continue;
        }
        let mut basis = Vec::new();
        let mut pos = HashMap::new();
        for &(l, i) in &a.basis {
            if g.src(l) == x {
                pos.insert((l, i), basis.len());
                basis.push((l, i));
            }
        }
        let n = basis.len();
        let scale: Vec<f64> =
            basis.iter().map(|&(l, _)| a.haar.weight[g.inv(l)].to_f64().sqrt()).collect();
        let matrices = exec::map_indexed(a.dim(), |p| {
            let mut m = CMat::zeros(n, n);
            // pi(e_p) e_col: the product table gives e_p * e_col directly,
            // and (l1, i)*(l, j) is supported on arrows l1.l with src = x.
            for (col, &(l, j)) in basis.iter().enumerate() {
                let q = a.basis_position(l, j).unwrap();
                for (k, s) in a.table_entry(p, q) {
                    let (l2, j2) = a.basis[*k];
                    let row = pos[&(l2, j2)];
                    m[(row, col)] += s.to_c64() * (scale[row] / scale[col]);
                }
            }
            m
        });
        blocks.push(RepBlock { object: x, basis, matrices });
    }
    let rep = RegularRep { blocks, algebra_dim: a.dim() };
    if !rep.is_faithful() {
        return Err(Error::NotFaithful);
    }
    Ok(rep)
}

/// Operator norm of an element in the regular representation over the
/// uniform measure.
pub fn operator_norm(a: &SectionAlgebra, f: &[Scalar]) -> Result<f64> {
    let rep = regular_representation(a, &UnitMeasure::uniform(&a.groupoid, a.mode))?;
    let fc: Vec<C64> = f.iter().map(Scalar::to_c64).collect();
    Ok(rep.norm(&fc))
}

// ---------------------------------------------------------------------------
// Centre and block decomposition
// ---------------------------------------------------------------------------

/// Orthonormal basis of the centre, as complex coefficient vectors.
pub fn center(a: &SectionAlgebra) -> Vec<Vec<C64>> {
    let d = a.dim();
    if d == 0 {
        return Vec::new();
    }
    // z is central iff (L_i - R_i) z = 0 for all basis i.
    let mut m = CMat::zeros(d * d, d);
    for i in 0..d {
        for j in 0..d {
            for (k, s) in a.table_entry(i, j) {
                m[(i * d + k, j)] += s.to_c64();
            }
            for (k, s) in a.table_entry(j, i) {
                m[(i * d + k, j)] -= s.to_c64();
            }
        }
    }
    linalg::nullspace(&m, 1e-10).into_iter().map(|v| v.iter().copied().collect()).collect()
}

fn axpy(target: &mut [C64], c: C64, v: &[C64]) {
    for (t, x) in target.iter_mut().zip(v.iter()) {
        *t += c * x;
    }
}

/// The minimal central idempotents, via the spectral decomposition of a
/// generic self-adjoint central element (random rational coefficients from
/// the seed, eigenvalues clustered with a relative gap of [`CLUSTER_GAP`]).
/// The results are verified: idempotent, self-adjoint, orthogonal, summing
/// to the unit; degenerate draws are retried with fresh seeds.
pub fn minimal_central_idempotents(a: &SectionAlgebra, seed: u64) -> Result<Vec<Vec<C64>>> {
    let rep = regular_representation(a, &UnitMeasure::uniform(&a.groupoid, a.mode))?;
    minimal_central_idempotents_in(a, &rep, seed)
}

fn minimal_central_idempotents_in(
    a: &SectionAlgebra,
    rep: &RegularRep,
    seed: u64,
) -> Result<Vec<Vec<C64>>> {
    let z_basis = center(a);
    let c = z_basis.len();
    let d = a.dim();
    // Self-adjoint spanning set of the centre.
    let mut sa = Vec::new();
    for z in &z_basis {
        let zs = a.star_c64(z);
        let mut plus = vec![C64::new(0.0, 0.0); d];
        axpy(&mut plus, C64::new(1.0, 0.0), z);
        axpy(&mut plus, C64::new(1.0, 0.0), &zs);
        let mut minus = vec![C64::new(0.0, 0.0); d];
        axpy(&mut minus, C64::new(0.0, 1.0), z);
        axpy(&mut minus, C64::new(0.0, -1.0), &zs);
        sa.push(plus);
        sa.push(minus);
    }
    let unit = a.unit_c64();
    // Coordinates in the centre: columns of zmat span the centre in A.
    let zmat = {
        let mut m = CMat::zeros(d, c);
        for (j, z) in z_basis.iter().enumerate() {
            for i in 0..d {
                m[(i, j)] = z[i];
            }
        }
        m
    };
    let zmat_svd = zmat.clone().svd(true, true);

    const RETRIES: u32 = 8;
    'attempt: for attempt in 0..RETRIES {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(attempt as u64));
        let mut z = vec![C64::new(0.0, 0.0); d];
        for v in &sa {
            let num: i64 = rng.random_range(-20..=20);
            let den: i64 = rng.random_range(1..=7);
            axpy(&mut z, C64::new(num as f64 / den as f64, 0.0), v);
        }
        // Eigenvalues of pi(z); z is self-adjoint so they are real. A
        // generic draw has one cluster per block.
        let mut eigs: Vec<f64> = Vec::new();
        for m in rep.apply(&z) {
            let (vals, _) = linalg::hermitian_eigen(&m);
            eigs.extend(vals);
        }
        eigs.sort_by(|x, y| x.partial_cmp(y).unwrap());
        let clusters = linalg::cluster_eigenvalues(&eigs, CLUSTER_GAP);
        if clusters.len() != c {
            continue 'attempt;
        }
        // Multiplication by z restricted to the centre, in centre
        // coordinates: solve zmat w_i = z * z_i.
        let mut mz = CMat::zeros(c, c);
        for i in 0..c {
            let prod = a.mul_c64(&z, &z_basis[i]);
            let rhs = nalgebra::DVector::<C64>::from_iterator(d, prod.iter().copied());
            let Ok(w) = zmat_svd.solve(&rhs, 1e-12) else { continue 'attempt };
            for r in 0..c {
                mz[(r, i)] = w[r];
            }
        }
        // One idempotent per eigenvalue cluster: take the eigenvector of
        // M_z in the centre and rescale it to square to itself. The
        // nullspace threshold is absolute, scaled by the spread of z.
        let spread = linalg::operator_norm(&mz).max(1.0);
        let mut idempotents = Vec::with_capacity(c);
        for &(lambda, _) in &clusters {
            let mut shifted = mz.clone();
            for i in 0..c {
                shifted[(i, i)] -= C64::new(lambda, 0.0);
            }
            let ns = linalg::nullspace_abs(&shifted, spread * 1e-8);
            if ns.len() != 1 {
                continue 'attempt;
            }
            let mut u = vec![C64::new(0.0, 0.0); d];
            for (j, &coord) in ns[0].iter().enumerate() {
                axpy(&mut u, coord, &z_basis[j]);
            }
            // u = kappa e for the idempotent e: recover kappa from u^2 = kappa u.
            let uu = a.mul_c64(&u, &u);
            let dot = |x: &[C64], y: &[C64]| {
                x.iter().zip(y.iter()).map(|(p, q)| p.conj() * q).sum::<C64>()
            };
            let denom = dot(&u, &u);
            if denom.norm() < 1e-12 {
                continue 'attempt;
            }
            let kappa = dot(&u, &uu) / denom;
            if kappa.norm() < 1e-10 {
                continue 'attempt;
            }
            let e: Vec<C64> = u.iter().map(|&x| x / kappa).collect();
            idempotents.push(e);
        }
        // Verification.
        let tol = 1e-7;
        let close = |u: &[C64], v: &[C64]| {
            u.iter().zip(v.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max) < tol
        };
        let mut total = vec![C64::new(0.0, 0.0); d];
        for (j, e) in idempotents.iter().enumerate() {
            if !close(&a.mul_c64(e, e), e) || !close(&a.star_c64(e), e) {
                continue 'attempt;
            }
            axpy(&mut total, C64::new(1.0, 0.0), e);
            for other in idempotents.iter().skip(j + 1) {
                let prod = a.mul_c64(e, other);
                if prod.iter().map(|x| x.norm()).fold(0.0, f64::max) >= tol {
                    continue 'attempt;
                }
            }
        }
        if !close(&total, &unit) {
            continue 'attempt;
        }
        return Ok(idempotents);
    }
    Err(Error::DegenerateRandomElement(RETRIES))
}

/// The multiset of full matrix block sizes of a finite-dimensional
/// C*-algebra; a complete *-isomorphism invariant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockProfile(pub Vec<usize>);

impl BlockProfile {
    fn from_sizes(mut sizes: Vec<usize>) -> Self {
        sizes.sort_unstable_by(|a, b| b.cmp(a));
        BlockProfile(sizes)
    }

    pub fn total_dim(&self) -> usize {
        self.0.iter().map(|n| n * n).sum()
    }
}

impl fmt::Display for BlockProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, n) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{n}")?;
        }
        write!(f, "}}")
    }
}

fn isqrt_exact(n: usize) -> Option<usize> {
    let r = (n as f64).sqrt().round() as usize;
    (r * r == n).then_some(r)
}

/// The block profile of a section algebra: block sizes `n_i` with
/// `A ≅ ⊕ M_{n_i}`, computed from the minimal central idempotents; each
/// ideal dimension must be a perfect square and the squares must sum to the
/// algebra dimension.
pub fn wedderburn(a: &SectionAlgebra) -> Result<BlockProfile> {
    wedderburn_seeded(a, DEFAULT_SEED)
}

pub fn wedderburn_seeded(a: &SectionAlgebra, seed: u64) -> Result<BlockProfile> {
    let idempotents = minimal_central_idempotents(a, seed)?;
    let mut sizes = Vec::with_capacity(idempotents.len());
    let mut total = 0usize;
    for e in &idempotents {
        // Ideal dimension = rank of left multiplication by e.
        let m = a.left_mult_c64(e);
        let d = linalg::rank(&m, 1e-9);
        let n = isqrt_exact(d).ok_or(Error::DegenerateRandomElement(0))?;
        sizes.push(n);
        total += d;
    }
    if total != a.dim() {
        return Err(Error::DegenerateRandomElement(0));
    }
    Ok(BlockProfile::from_sizes(sizes))
}

/// Whether two section algebras are *-isomorphic: equality of block
/// profiles, a complete invariant at finite dimension.
pub fn star_isomorphic(a: &SectionAlgebra, b: &SectionAlgebra) -> Result<bool> {
    Ok(wedderburn(a)? == wedderburn(b)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groupoid::{cyclic_group, disjoint_union, pair_groupoid};
    use std::sync::Arc;

    fn group_algebra(k: u32, mode: NumMode) -> SectionAlgebra {
        let g = Arc::new(cyclic_group(k));
        let nu = HaarSystem::counting(&g, mode);
        let b = FellBundle::trivial(g.clone(), mode);
        section_algebra(&g, &nu, &b).unwrap()
    }

    #[test]
    fn group_algebra_of_z4_has_dimension_four_and_scalar_blocks() {
        let a = group_algebra(4, NumMode::Exact);
        assert_eq!(a.dim(), 4);
        // Characters of Z/4: four one-dimensional blocks.
        assert_eq!(wedderburn(&a).unwrap(), BlockProfile(vec![1, 1, 1, 1]));
    }

    #[test]
    fn pair_groupoid_algebra_is_full_matrix_algebra() {
        let g = Arc::new(pair_groupoid(&["1", "2"]));
        let nu = HaarSystem::counting(&g, NumMode::Exact);
        let b = FellBundle::trivial(g.clone(), NumMode::Exact);
        let a = section_algebra(&g, &nu, &b).unwrap();
        // Matrix units: e_{xy} e_{yz} = e_{xz}, all other products vanish.
        let exy = |x: &str, y: &str| {
            let arrow = g.arrow_index(&format!("{x}|{y}")).unwrap();
            let mut v = a.zero();
            v[a.basis_position(arrow, 0).unwrap()] = Scalar::one(NumMode::Exact);
            v
        };
        let prod = a.mul(&exy("1", "2"), &exy("2", "1"));
        assert_eq!(prod, exy("1", "1"));
        let zero = a.mul(&exy("1", "2"), &exy("1", "2"));
        assert!(zero.iter().all(Scalar::is_zero));
        assert_eq!(wedderburn(&a).unwrap(), BlockProfile(vec![2]));
    }

    #[test]
    fn twisted_z2_algebra_splits_into_two_lines() {
        // u^2 = -1: the two characters send u to +-i.
        let g = Arc::new(cyclic_group(2));
        let w = crate::fell::TorusCocycle::new(g.clone(), 2, &[("1".into(), "1".into(), 1)])
            .unwrap();
        let b = crate::fell::cocycle_line_bundle(&w, NumMode::Exact).unwrap();
        let nu = HaarSystem::counting(&g, NumMode::Exact);
        let a = section_algebra(&g, &nu, &b).unwrap();
        let u = {
            let arrow = g.arrow_index("1").unwrap();
            let mut v = a.zero();
            v[a.basis_position(arrow, 0).unwrap()] = Scalar::one(NumMode::Exact);
            v
        };
        let u2 = a.mul(&u, &u);
        let minus_one = {
            let arrow = g.arrow_index("0").unwrap();
            let mut v = a.zero();
            v[a.basis_position(arrow, 0).unwrap()] = Scalar::from_ratio(-1, 1, NumMode::Exact);
            v
        };
        assert_eq!(u2, minus_one);
        assert_eq!(wedderburn(&a).unwrap(), BlockProfile(vec![1, 1]));
    }

    #[test]
    fn regular_representation_is_star_preserving_and_faithful() {
        let a = group_algebra(4, NumMode::Float);
        let rep =
            regular_representation(&a, &UnitMeasure::uniform(&a.groupoid, NumMode::Float)).unwrap();
        assert!(rep.is_faithful());
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let f: Vec<C64> = (0..a.dim())
                .map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .collect();
            assert!(rep.star_residual(&a, &f) < 1e-12);
        }
    }

    #[test]
    fn missing_an_orbit_is_not_faithful() {
        let g = Arc::new(disjoint_union(&[("A", &cyclic_group(2)), ("B", &cyclic_group(3))]));
        let nu = HaarSystem::counting(&g, NumMode::Float);
        let b = FellBundle::trivial(g.clone(), NumMode::Float);
        let a = section_algebra(&g, &nu, &b).unwrap();
        let mut mass = vec![crate::num::Real::zero(NumMode::Float); g.n_objects()];
        mass[g.object_index("A:*").unwrap()] = crate::num::Real::one(NumMode::Float);
        let err = regular_representation(&a, &UnitMeasure { mass }).unwrap_err();
        assert!(matches!(err, Error::NotFaithful));
    }

    #[test]
    fn operator_norms_of_units_and_partial_isometries() {
        let g = Arc::new(pair_groupoid(&["1", "2"]));
        let nu = HaarSystem::counting(&g, NumMode::Float);
        let b = FellBundle::trivial(g.clone(), NumMode::Float);
        let a = section_algebra(&g, &nu, &b).unwrap();
        let unit: Vec<Scalar> = a.unit_c64().iter().map(|&z| Scalar::Float(z)).collect();
        assert!((operator_norm(&a, &unit).unwrap() - 1.0).abs() < 1e-10);
        // A single off-diagonal matrix unit has norm 1 under counting Haar.
        let arrow = g.arrow_index("2|1").unwrap();
        let mut v = a.zero();
        v[a.basis_position(arrow, 0).unwrap()] = Scalar::one(NumMode::Float);
        assert!((operator_norm(&a, &v).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn center_dimensions() {
        let m2 = {
            let g = Arc::new(pair_groupoid(&["1", "2"]));
            let nu = HaarSystem::counting(&g, NumMode::Exact);
            let b = FellBundle::trivial(g.clone(), NumMode::Exact);
            section_algebra(&g, &nu, &b).unwrap()
        };
        assert_eq!(center(&m2).len(), 1);
        let c4 = group_algebra(4, NumMode::Exact);
        assert_eq!(center(&c4).len(), 4);
    }

    #[test]
    fn idempotents_of_z2_group_algebra() {
        let a = group_algebra(2, NumMode::Exact);
        let es = minimal_central_idempotents(&a, DEFAULT_SEED).unwrap();
        assert_eq!(es.len(), 2);
        // (1 +- u)/2 in coordinates: both entries +-1/2.
        for e in &es {
            for z in e {
                assert!((z.re.abs() - 0.5).abs() < 1e-9);
                assert!(z.im.abs() < 1e-9);
            }
        }
    }

    #[test]
    fn c_star_identity_holds_numerically() {
        let a = group_algebra(4, NumMode::Float);
        let rep =
            regular_representation(&a, &UnitMeasure::uniform(&a.groupoid, NumMode::Float)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10 {
            let f: Vec<C64> = (0..a.dim())
                .map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .collect();
            let norm_f = rep.norm(&f);
            let ff = a.mul_c64(&a.star_c64(&f), &f);
            let norm_ff = rep.norm(&ff);
            assert!((norm_ff - norm_f * norm_f).abs() < 1e-10 * (1.0 + norm_ff));
        }
    }
}
