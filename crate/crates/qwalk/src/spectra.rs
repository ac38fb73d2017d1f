//! Dense eigendecomposition for real symmetric and complex-symmetric
//! operators, plus spectral-density utilities.
//!
//! Correctness is residual-based: orthonormality / biorthonormality,
//! completeness and reconstruction are checked against fixed bounds rather
//! than prescribing a particular algorithm. The kernels are backed by LAPACK
//! (dsyev / zgeev); the biorthonormal left system for complex-symmetric input
//! is built here from the unconjugated transposes of the right vectors.

use std::io::Write;

use ndarray::{Array1, Array2};
use ndarray_linalg::{Eig, Eigh, Inverse, UPLO};
use num_complex::Complex64;

use crate::error::{QwalkError, Result};

/// Ascending eigenvalues and orthonormal eigenvectors of a real symmetric
/// operator. Column `l` of `eigenvectors` pairs with `eigenvalues[l]`.
#[derive(Debug, Clone)]
pub struct RealSpectrum {
    pub eigenvalues: Array1<f64>,
    pub eigenvectors: Array2<f64>,
}

impl RealSpectrum {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// Multiplicity of the zero eigenvalue at the given tolerance. For a
    /// Laplacian this equals the number of connected components.
    pub fn zero_multiplicity(&self, tol: f64) -> usize {
        self.eigenvalues.iter().filter(|l| l.abs() < tol).count()
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "# l, lambda")?;
        for (l, lam) in self.eigenvalues.iter().enumerate() {
            writeln!(w, "{l}, {lam:.17e}")?;
        }
        Ok(())
    }
}

/// Complex eigenvalues E_l = ε_l − iγ_l with biorthonormal right/left
/// eigenvector pairs and the residual diagnostics of the pairing.
#[derive(Debug, Clone)]
pub struct ComplexSpectrum {
    pub eigenvalues: Array1<Complex64>,
    /// Right vectors |Φ_l⟩, one per column.
    pub right_vectors: Array2<Complex64>,
    /// Left vectors ⟨Φ̃_l|, stored unconjugated, one per column; the pairing
    /// contract is left_lᵀ · right_l' = δ_ll'.
    pub left_vectors: Array2<Complex64>,
    /// Per-mode biorthogonality residual max_l' |left_lᵀ right_l' − δ|.
    pub biorth_residuals: Array1<f64>,
    /// ‖Σ_l |Φ_l⟩⟨Φ̃_l| − 1‖max.
    pub completeness_residual: f64,
}

impl ComplexSpectrum {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// Decay rates γ_l = −Im E_l.
    pub fn decay_rates(&self) -> Array1<f64> {
        self.eigenvalues.mapv(|e| -e.im)
    }

    pub fn biorth_residual(&self) -> f64 {
        self.biorth_residuals.iter().cloned().fold(0.0, f64::max)
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "# l, re_E, im_E, biorth_residual")?;
        for l in 0..self.len() {
            let e = self.eigenvalues[l];
            writeln!(
                w,
                "{l}, {:.17e}, {:.17e}, {:.3e}",
                e.re, e.im, self.biorth_residuals[l]
            )?;
        }
        Ok(())
    }
}

const SYMMETRY_TOL: f64 = 1e-12;

/// Full spectrum of a real symmetric matrix, ascending, with the eigenvector
/// sign fixed so the first component of magnitude above 1e-12 is positive.
pub fn eig_symmetric(matrix: &Array2<f64>) -> Result<RealSpectrum> {
    let n = matrix.nrows();
    for i in 0..n {
        for j in (i + 1)..n {
            if (matrix[[i, j]] - matrix[[j, i]]).abs() > SYMMETRY_TOL {
                return Err(QwalkError::Config(format!(
                    "matrix not symmetric at ({i}, {j}): {} vs {}",
                    matrix[[i, j]],
                    matrix[[j, i]]
                )));
            }
        }
    }
    let (eigenvalues, mut eigenvectors) =
        matrix.eigh(UPLO::Lower).map_err(|e| QwalkError::NonConvergence {
            context: format!("dsyev on {n}x{n} matrix: {e}"),
        })?;
    for mut col in eigenvectors.columns_mut() {
        if let Some(&lead) = col.iter().find(|x| x.abs() > 1e-12) {
            if lead < 0.0 {
                col.mapv_inplace(|x| -x);
            }
        }
    }
    Ok(RealSpectrum {
        eigenvalues,
        eigenvectors,
    })
}

/// Biorthogonality residual at which the spectrum is declared near-defective.
pub const DEFECTIVE_LIMIT: f64 = 1e-6;

/// Full spectrum of a dense complex matrix with a biorthonormal left/right
/// system. Intended for complex-symmetric H = L − iΓ, where the left vector
/// of a simple eigenvalue is the unconjugated transpose of the right vector
/// rescaled so left_lᵀ right_l = 1. Numerically degenerate clusters
/// (gap < 1e-9·‖H‖max) are re-biorthogonalized by a small dense solve.
pub fn eig_complex(matrix: &Array2<Complex64>) -> Result<ComplexSpectrum> {
    let n = matrix.nrows();
    let (raw_vals, raw_vecs) = matrix.eig().map_err(|e| QwalkError::NonConvergence {
        context: format!("zgeev on {n}x{n} matrix: {e}"),
    })?;

    // Sort by (Re, Im) ascending for a reproducible ordering.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        (raw_vals[a].re, raw_vals[a].im)
            .partial_cmp(&(raw_vals[b].re, raw_vals[b].im))
            .unwrap()
    });
    let eigenvalues = Array1::from_iter(order.iter().map(|&i| raw_vals[i]));
    let mut right = Array2::zeros((n, n));
    for (dst, &src) in order.iter().enumerate() {
        right.column_mut(dst).assign(&raw_vecs.column(src));
    }

    // Phase fix: rotate each right vector so its largest-magnitude component
    // is real and positive.
    for mut col in right.columns_mut() {
        let mut best = 0usize;
        let mut best_norm = 0.0;
        for (k, v) in col.iter().enumerate() {
            if v.norm() > best_norm {
                best_norm = v.norm();
                best = k;
            }
        }
        if best_norm > 0.0 {
            let phase = col[best] / best_norm;
            let inv = phase.conj();
            col.mapv_inplace(|x| x * inv);
        }
    }

    let scale = matrix.iter().map(|x| x.norm()).fold(0.0, f64::max);
    let cluster_tol = 1e-9 * scale.max(1.0);

    // Partition into clusters of numerically coincident eigenvalues.
    let mut left = Array2::<Complex64>::zeros((n, n));
    let mut lo = 0;
    while lo < n {
        let mut hi = lo + 1;
        while hi < n && (eigenvalues[hi] - eigenvalues[hi - 1]).norm() < cluster_tol {
            hi += 1;
        }
        let m = hi - lo;
        if m == 1 {
            let v = right.column(lo);
            let c: Complex64 = v.iter().map(|x| x * x).sum();
            if c.norm() < 1e-12 {
                // Quasi-null vector: vᵀv ≈ 0 signals a (near-)defective pair.
                return Err(QwalkError::DefectivePencil {
                    residual: 1.0 / c.norm().max(f64::MIN_POSITIVE),
                    limit: DEFECTIVE_LIMIT,
                });
            }
            // Symmetric rescale: divide the right vector by √(vᵀv) so the
            // left vector is literally its unconjugated transpose.
            let s = c.sqrt();
            let inv = Complex64::new(1.0, 0.0) / s;
            let scaled = v.mapv(|x| x * inv);
            right.column_mut(lo).assign(&scaled);
            left.column_mut(lo).assign(&scaled);
        } else {
            // Gram solve within the cluster: left block = W · G⁻¹ with
            // G = Wᵀ W, so leftᵀ · right = I on the cluster.
            let w = right.slice(ndarray::s![.., lo..hi]).to_owned();
            let mut gram = Array2::<Complex64>::zeros((m, m));
            for a in 0..m {
                for b in 0..m {
                    gram[[a, b]] = w.column(a).iter().zip(w.column(b)).map(|(x, y)| x * y).sum();
                }
            }
            let gram_inv = gram.inv().map_err(|_| QwalkError::DefectivePencil {
                residual: f64::INFINITY,
                limit: DEFECTIVE_LIMIT,
            })?;
            let lblock = w.dot(&gram_inv);
            left.slice_mut(ndarray::s![.., lo..hi]).assign(&lblock);
        }
        lo = hi;
    }

    // Residual diagnostics.
    let product = left.t().dot(&right); // (Lᵀ R)_{l l'} = ⟨Φ̃_l|Φ_l'⟩
    let mut biorth_residuals = Array1::zeros(n);
    for l in 0..n {
        let mut worst = 0.0f64;
        for lp in 0..n {
            let target = if l == lp {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            };
            worst = worst.max((product[[l, lp]] - target).norm());
        }
        biorth_residuals[l] = worst;
    }
    let biorth = biorth_residuals.iter().cloned().fold(0.0, f64::max);
    if biorth > DEFECTIVE_LIMIT {
        return Err(QwalkError::DefectivePencil {
            residual: biorth,
            limit: DEFECTIVE_LIMIT,
        });
    }

    let completeness = {
        let recon = right.dot(&left.t());
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let target = if i == j {
                    Complex64::new(1.0, 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                };
                worst = worst.max((recon[[i, j]] - target).norm());
            }
        }
        worst
    };

    Ok(ComplexSpectrum {
        eigenvalues,
        right_vectors: right,
        left_vectors: left,
        biorth_residuals,
        completeness_residual: completeness,
    })
}

/// Wigner semicircle density of the ER Laplacian bulk: centered at z̄ = pN
/// with radius 2σ, σ² = Np(1−p). Zero outside the support.
pub fn wigner_density(lambda: f64, n: usize, p: f64) -> f64 {
    let sigma2 = n as f64 * p * (1.0 - p);
    let zbar = p * n as f64;
    let d = lambda - zbar;
    let support = 4.0 * sigma2 - d * d;
    if support > 0.0 {
        support.sqrt() / (2.0 * std::f64::consts::PI * sigma2)
    } else {
        0.0
    }
}

/// Normalized histogram density (area 1) over [min, max] of the samples.
#[derive(Debug, Clone)]
pub struct Histogram {
    /// bin_count + 1 edges, ascending.
    pub edges: Vec<f64>,
    /// Density per bin; Σ density·width = 1.
    pub density: Vec<f64>,
}

impl Histogram {
    pub fn bin_centers(&self) -> Vec<f64> {
        self.edges.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect()
    }
}

pub fn empirical_density(samples: &[f64], bin_count: usize) -> Result<Histogram> {
    if samples.is_empty() {
        return Err(QwalkError::Config("empirical_density: no samples".into()));
    }
    if bin_count < 2 {
        return Err(QwalkError::Config(format!(
            "empirical_density: bin_count must be >= 2, got {bin_count}"
        )));
    }
    let mut lo = samples.iter().cloned().fold(f64::INFINITY, f64::min);
    let mut hi = samples.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if hi <= lo {
        // Degenerate range: widen around the constant value.
        lo -= 0.5;
        hi += 0.5;
    }
    let width = (hi - lo) / bin_count as f64;
    let mut counts = vec![0usize; bin_count];
    for &x in samples {
        let mut idx = ((x - lo) / width) as usize;
        if idx >= bin_count {
            idx = bin_count - 1;
        }
        counts[idx] += 1;
    }
    let total = samples.len() as f64;
    let density = counts.iter().map(|&c| c as f64 / (total * width)).collect();
    let edges = (0..=bin_count).map(|i| lo + i as f64 * width).collect();
    Ok(Histogram { edges, density })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate_er, ErParams, Graph};
    use ndarray::array;

    fn complete_graph(n: usize) -> Graph {
        let mut edges = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                edges.push((i, j));
            }
        }
        Graph::from_edges(n, &edges).unwrap()
    }

    #[test]
    fn k3_laplacian_spectrum() {
        let l = complete_graph(3).laplacian();
        let s = eig_symmetric(&l).unwrap();
        let expect = [0.0, 3.0, 3.0];
        for (got, want) in s.eigenvalues.iter().zip(expect) {
            assert!((got - want).abs() < 1e-10, "{got} vs {want}");
        }
    }

    #[test]
    fn single_edge_spectrum() {
        let l = array![[1.0, -1.0], [-1.0, 1.0]];
        let s = eig_symmetric(&l).unwrap();
        assert!((s.eigenvalues[0] - 0.0).abs() < 1e-12);
        assert!((s.eigenvalues[1] - 2.0).abs() < 1e-12);
        let r = 1.0 / 2f64.sqrt();
        for (got, want) in s.eigenvectors.column(0).iter().zip([r, r]) {
            assert!((got - want).abs() < 1e-12);
        }
        for (got, want) in s.eigenvectors.column(1).iter().zip([r, -r]) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn ground_state_is_uniform() {
        let params = ErParams::new(50, 0.4, 21).unwrap();
        let g = generate_er(&params, true, 100).unwrap().graph;
        let s = eig_symmetric(&g.laplacian()).unwrap();
        assert!(s.eigenvalues[0].abs() < 1e-9);
        let expect = 1.0 / (50f64).sqrt();
        for v in s.eigenvectors.column(0) {
            assert!((v - expect).abs() < 1e-8, "{v} vs {expect}");
        }
    }

    #[test]
    fn real_spectrum_contracts() {
        let params = ErParams::new(30, 0.3, 5).unwrap();
        let g = generate_er(&params, false, 1).unwrap().graph;
        let l = g.laplacian();
        let s = eig_symmetric(&l).unwrap();
        // orthonormality
        let gram = s.eigenvectors.t().dot(&s.eigenvectors);
        for i in 0..30 {
            for j in 0..30 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((gram[[i, j]] - want).abs() < 1e-9);
            }
        }
        // reconstruction
        let lam = Array2::from_diag(&s.eigenvalues);
        let recon = s.eigenvectors.dot(&lam).dot(&s.eigenvectors.t());
        for i in 0..30 {
            for j in 0..30 {
                assert!((recon[[i, j]] - l[[i, j]]).abs() < 1e-8);
            }
        }
        assert!(s.eigenvalues[0] > -1e-9);
    }

    #[test]
    fn complex_2x2_against_quadratic() {
        // H = [[1, -1], [-1, 1 - 0.1i]]; roots of λ² − (2−0.1i)λ − 0.1i = 0.
        let h = array![
            [Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0)],
            [Complex64::new(-1.0, 0.0), Complex64::new(1.0, -0.1)]
        ];
        let s = eig_complex(&h).unwrap();
        let b = Complex64::new(2.0, -0.1);
        let c = Complex64::new(0.0, -0.1);
        let disc = (b * b - 4.0 * c).sqrt();
        let mut roots = [(b - disc) / 2.0, (b + disc) / 2.0];
        roots.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap());
        for (got, want) in s.eigenvalues.iter().zip(roots) {
            assert!((got - want).norm() < 1e-12, "{got} vs {want}");
        }
        assert!(s.biorth_residual() < 1e-10);
        assert!(s.completeness_residual < 1e-10);
    }

    #[test]
    fn hermitian_limit_matches_symmetric() {
        let params = ErParams::new(20, 0.5, 33).unwrap();
        let g = generate_er(&params, true, 100).unwrap().graph;
        let l = g.laplacian();
        let h = l.mapv(|x| Complex64::new(x, 0.0));
        let cs = eig_complex(&h).unwrap();
        let rs = eig_symmetric(&l).unwrap();
        for (c, r) in cs.eigenvalues.iter().zip(rs.eigenvalues.iter()) {
            assert!(c.im.abs() < 1e-9);
            assert!((c.re - r).abs() < 1e-8);
        }
    }

    #[test]
    fn wigner_center_and_edge() {
        let (n, p) = (1000, 0.1);
        let sigma = (n as f64 * p * (1.0 - p)).sqrt();
        let zbar = p * n as f64;
        let center = wigner_density(zbar, n, p);
        assert!((center - 1.0 / (std::f64::consts::PI * sigma)).abs() < 1e-12);
        assert_eq!(wigner_density(zbar + 2.0 * sigma, n, p), 0.0);
        assert_eq!(wigner_density(zbar - 2.0 * sigma - 1.0, n, p), 0.0);
    }

    #[test]
    fn wigner_integrates_to_one() {
        // Midpoint quadrature over the support.
        let (n, p) = (500, 0.3);
        let sigma = (n as f64 * p * (1.0 - p)).sqrt();
        let zbar = p * n as f64;
        let (lo, hi) = (zbar - 2.0 * sigma, zbar + 2.0 * sigma);
        let steps = 200_000;
        let h = (hi - lo) / steps as f64;
        let integral: f64 = (0..steps)
            .map(|i| wigner_density(lo + (i as f64 + 0.5) * h, n, p) * h)
            .sum();
        assert!((integral - 1.0).abs() < 1e-6, "integral {integral}");
    }

    #[test]
    fn empirical_density_basics() {
        let hist = empirical_density(&[2.0; 50], 5).unwrap();
        let occupied: Vec<_> = hist.density.iter().filter(|&&d| d > 0.0).collect();
        assert_eq!(occupied.len(), 1);
        let width = hist.edges[1] - hist.edges[0];
        assert!((occupied[0] - &(1.0 / width)).abs() < 1e-12);

        let grid: Vec<f64> = (0..10_000).map(|i| i as f64 / 9_999.0).collect();
        let hist = empirical_density(&grid, 20).unwrap();
        for d in &hist.density {
            assert!((d - 1.0).abs() < 0.05, "density {d}");
        }
    }

    #[test]
    fn zero_multiplicity_matches_components() {
        let two_triangles =
            Graph::from_edges(6, &[(0, 1), (0, 2), (1, 2), (3, 4), (3, 5), (4, 5)]).unwrap();
        let s = eig_symmetric(&two_triangles.laplacian()).unwrap();
        assert_eq!(s.zero_multiplicity(1e-8), 2);
        assert_eq!(two_triangles.connectivity().1, 2);
    }
}
