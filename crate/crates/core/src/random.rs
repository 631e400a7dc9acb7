//! Seeded random states and matrices for property checks and batteries.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::Result;
use crate::fock::{make_coherent_superposition, DensityMatrix, ModeCutoffs, StateVector};
use crate::linalg::{self, CMatrix, CVector};
use crate::scalar::{lit, Real, C};

fn gaussian<T: Real, R: Rng + ?Sized>(rng: &mut R) -> C<T> {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    C::new(lit(re), lit(im))
}

/// Haar-random pure state on the full truncated space.
pub fn random_pure_state<T: Real, R: Rng + ?Sized>(cutoffs: &ModeCutoffs, rng: &mut R) -> StateVector<T> {
    let v = CVector::<T>::from_fn(cutoffs.total(), |_, _| gaussian(rng));
    StateVector::new(cutoffs.clone(), v).expect("gaussian vector is nonzero")
}

/// Random single-mode pure state.
pub fn random_mode_state<T: Real, R: Rng + ?Sized>(cutoff: usize, rng: &mut R) -> StateVector<T> {
    random_pure_state(&ModeCutoffs::new(vec![cutoff]).expect("valid cutoff"), rng)
}

/// Random product state with independent random pure factors per mode.
pub fn random_product_state<T: Real, R: Rng + ?Sized>(cutoffs: &ModeCutoffs, rng: &mut R) -> StateVector<T> {
    let mut it = cutoffs.dims().iter();
    let mut acc = random_mode_state(*it.next().expect("at least one mode"), rng);
    for &d in it {
        acc = acc.tensor(&random_mode_state(d, rng)).expect("product fits the cap");
    }
    acc
}

/// Mixed state of the given rank (Hilbert-Schmidt style `G G^dag / Tr`).
pub fn random_density<T: Real, R: Rng + ?Sized>(cutoffs: &ModeCutoffs, rank: usize, rng: &mut R) -> DensityMatrix<T> {
    let m = random_psd(cutoffs.total(), rank, rng);
    DensityMatrix::new(cutoffs.clone(), m).expect("normalized PSD matrix")
}

/// Random trace-one positive semidefinite matrix of the given rank.
pub fn random_psd<T: Real, R: Rng + ?Sized>(n: usize, rank: usize, rng: &mut R) -> CMatrix<T> {
    let g = CMatrix::<T>::from_fn(n, rank.max(1), |_, _| gaussian(rng));
    let m = &g * g.adjoint();
    let tr = linalg::trace(&m).re;
    linalg::hermitian_part(&m.map(|z| z.unscale(tr)))
}

/// Random real orthogonal matrix with determinant +1 (QR of a Gaussian matrix).
pub fn random_rotation<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> DMatrix<T> {
    let g = DMatrix::<T>::from_fn(n, n, |_, _| lit(StandardNormal.sample(rng)));
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..n {
        if r[(j, j)] < T::zero() {
            q.column_mut(j).neg_mut();
        }
    }
    if q.determinant() < T::zero() {
        q.column_mut(0).neg_mut();
    }
    q
}

/// Random separable mixture of `terms` product states.
pub fn random_separable_mixture<T: Real, R: Rng + ?Sized>(
    cutoffs: &ModeCutoffs,
    terms: usize,
    rng: &mut R,
) -> DensityMatrix<T> {
    let states: Vec<StateVector<T>> = (0..terms.max(1)).map(|_| random_product_state(cutoffs, rng)).collect();
    let weights: Vec<T> = states.iter().map(|_| lit(rng.random_range(0.05..1.0))).collect();
    let pairs: Vec<(T, &StateVector<T>)> = weights.into_iter().zip(&states).collect();
    DensityMatrix::mixture(&pairs).expect("weights are positive")
}

/// Random mixture of two-mode product coherent states `|α_t> |β_t>` with
/// amplitudes of modulus at most `max_amplitude`.
pub fn random_coherent_mixture<T: Real, R: Rng + ?Sized>(
    cutoffs: &ModeCutoffs,
    terms: usize,
    max_amplitude: f64,
    eps: f64,
    rng: &mut R,
) -> Result<DensityMatrix<T>> {
    let mut states = Vec::new();
    for _ in 0..terms.max(1) {
        let alphas: Vec<C<T>> = (0..cutoffs.modes())
            .map(|_| {
                let r = max_amplitude * rng.random::<f64>().sqrt();
                let phi = std::f64::consts::TAU * rng.random::<f64>();
                C::new(lit(r * phi.cos()), lit(r * phi.sin()))
            })
            .collect();
        states.push(make_coherent_superposition(&[(C::new(T::one(), T::zero()), alphas)], cutoffs, eps)?);
    }
    let weights: Vec<T> = states.iter().map(|_| lit(rng.random_range(0.05..1.0))).collect();
    let pairs: Vec<(T, &StateVector<T>)> = weights.into_iter().zip(&states).collect();
    DensityMatrix::mixture(&pairs)
}
