//! Shared helpers for the integration suites, including the independent
//! brute-force block-profile oracle.

use groupoidal::cstar::SectionAlgebra;
use groupoidal::linalg::{self, CMat, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Independent block-profile oracle: commutant eigenspace dimensions.
///
/// The commutant of the left regular representation of a unital semisimple
/// algebra is the algebra of right multiplications; a generic element of it
/// has, for each `M_n` block, `n` distinct eigenvalues of geometric
/// multiplicity `n`. Reading off eigenspace dimensions therefore recovers
/// the block profile without touching the centre/idempotent machinery used
/// by `wedderburn`.
pub fn block_profile_oracle(a: &SectionAlgebra, seed: u64) -> Vec<usize> {
    let d = a.dim();
    // Left multiplication matrices.
    let left_mats: Vec<CMat> = (0..d)
        .map(|i| {
            let mut f = vec![C64::new(0.0, 0.0); d];
            f[i] = C64::new(1.0, 0.0);
            a.left_mult_c64(&f)
        })
        .collect();
    // Commutant: matrices M with M L_i = L_i M for all i.
    let mut system = CMat::zeros(d * d * d, d * d);
    for (i, l) in left_mats.iter().enumerate() {
        // (M L - L M)[r][c] = sum_k M[r][k] L[k][c] - L[r][k] M[k][c]
        for r in 0..d {
            for c in 0..d {
                let row = (i * d + r) * d + c;
                for k in 0..d {
                    system[(row, r * d + k)] += l[(k, c)];
                    system[(row, k * d + c)] -= l[(r, k)];
                }
            }
        }
    }
    let commutant = linalg::nullspace(&system, 1e-10);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut generic = CMat::zeros(d, d);
    for v in &commutant {
        let coeff = C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        for r in 0..d {
            for c in 0..d {
                generic[(r, c)] += coeff * v[r * d + c];
            }
        }
    }
    let eigs = linalg::complex_eigenvalues(&generic);
    // Group eigenvalues, then read multiplicities: a block of size n
    // contributes n eigenvalues each with multiplicity n.
    let mut remaining: Vec<C64> = eigs;
    let mut mult_counts: Vec<usize> = Vec::new();
    let scale = remaining.iter().map(|z| z.norm()).fold(1e-9, f64::max);
    while let Some(&z) = remaining.first() {
        let (same, rest): (Vec<C64>, Vec<C64>) =
            remaining.into_iter().partition(|w| (w - z).norm() < 1e-6 * scale);
        mult_counts.push(same.len());
        remaining = rest;
    }
    // mult_counts holds one entry per distinct eigenvalue: the value n for
    // each of the n eigenvalues of a block of size n.
    let mut profile = Vec::new();
    let mut counts = std::collections::BTreeMap::new();
    for m in mult_counts {
        *counts.entry(m).or_insert(0usize) += 1;
    }
    for (n, how_many) in counts {
        assert_eq!(how_many % n, 0, "oracle eigenvalue bookkeeping");
        for _ in 0..how_many / n {
            profile.push(n);
        }
    }
    profile.sort_unstable_by(|a, b| b.cmp(a));
    profile
}
