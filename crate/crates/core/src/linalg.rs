//! Small dense linear-algebra helpers on complex matrices.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::C64;

pub type CMatrix = DMatrix<C64>;

pub fn c(re: f64) -> C64 { C64::new(re, 0.0) }

/// A complex matrix with independent standard Gaussian entries.
pub fn ginibre<R: Rng>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    DMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re, im)
    })
}

/// Haar-random unitary via QR of a Gaussian matrix with the phases of the
/// diagonal of `R` folded back into `Q`.
pub fn haar_unitary<R: Rng>(d: usize, rng: &mut R) -> CMatrix {
    let qr = ginibre(d, d, rng).qr();
    let (q, r) = (qr.q(), qr.r());
    let phases = DMatrix::from_diagonal(&DVector::from_fn(d, |i, _| {
        let x = r[(i, i)];
        if x.norm() > 0.0 { x / x.norm() } else { c(1.0) }
    }));
    q * phases
}

/// Random unit vector in `C^d`.
pub fn random_unit_vector<R: Rng>(d: usize, rng: &mut R) -> DVector<C64> {
    let v = ginibre(d, 1, rng).column(0).into_owned();
    let n = v.norm();
    v / c(n)
}

/// Random invertible matrix (a Gaussian matrix, regenerated in the unlikely
/// event that it is badly conditioned).
pub fn random_invertible<R: Rng>(d: usize, rng: &mut R) -> CMatrix {
    loop {
        let m = ginibre(d, d, rng);
        let s = singular_values(&m);
        if s[s.len() - 1] > 1e-3 * s[0] {
            return m;
        }
    }
}

/// Singular values in decreasing order.
pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    if m.is_empty() {
        return Vec::new();
    }
    let mut s: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Eigenvalues of a Hermitian matrix, increasing.
pub fn hermitian_eigenvalues(h: &CMatrix) -> Vec<f64> {
    let mut e: Vec<f64> = h.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
    e.sort_by(|a, b| a.total_cmp(b));
    e
}

/// Square root of a positive semidefinite Hermitian matrix, clamping
/// eigenvalues above `-1e-12` to zero. Returns `None` if a more negative
/// eigenvalue is found.
pub fn psd_sqrt(h: &CMatrix) -> Option<CMatrix> {
    let herm = (h + h.adjoint()) * c(0.5);
    let eig = herm.symmetric_eigen();
    if eig.eigenvalues.iter().any(|&l| l < -1e-12) {
        return None;
    }
    let roots = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| c(l.max(0.0).sqrt())));
    let v = &eig.eigenvectors;
    Some(v * roots * v.adjoint())
}

/// `‖M†M − I‖` in the max-entry norm.
pub fn isometry_defect(m: &CMatrix) -> f64 {
    let g = m.adjoint() * m;
    let id = CMatrix::identity(g.nrows(), g.ncols());
    (g - id).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Generalised Pauli `X^a Z^b` on `C^d`: `X|j> = |j+1>`, `Z|j> = ω^j |j>`.
pub fn weyl(d: usize, a: usize, b: usize) -> CMatrix {
    let omega = |k: usize| C64::from_polar(1.0, std::f64::consts::TAU * (k % d) as f64 / d as f64);
    let x = DMatrix::from_fn(d, d, |r, col| if r == (col + 1) % d { c(1.0) } else { c(0.0) });
    let z = DMatrix::from_fn(d, d, |r, col| if r == col { omega(r) } else { c(0.0) });
    let mut m = CMatrix::identity(d, d);
    for _ in 0..a {
        m *= &x;
    }
    for _ in 0..b {
        m *= &z;
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn haar_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for d in 1..5 {
            assert!(isometry_defect(&haar_unitary(d, &mut rng)) < 1e-12);
        }
    }

    #[test]
    fn sqrt_squares_back() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let g = ginibre(3, 3, &mut rng);
        let h = &g * g.adjoint();
        let s = psd_sqrt(&h).unwrap();
        assert!((&s * &s - h).norm() < 1e-10);
    }

    #[test]
    fn sqrt_rejects_negative() {
        let h = DMatrix::from_diagonal(&DVector::from_vec(vec![c(1.0), c(-0.5)]));
        assert!(psd_sqrt(&h).is_none());
    }

    #[test]
    fn weyl_qubit_is_pauli() {
        let x = weyl(2, 1, 0);
        let z = weyl(2, 0, 1);
        assert_eq!(x[(1, 0)], c(1.0));
        assert!((z[(1, 1)] + c(1.0)).norm() < 1e-15);
    }
}
