//! Homogeneous Sobolev and absolute-sum norms over the Fourier lattice.

use crate::field::SpectralField;

/// Coefficient modulus `|u_hat(k)|` of a vector coefficient.
#[inline]
pub fn coeff_modulus(v: [num_complex::Complex64; 3]) -> f64 {
    (v[0].norm_sqr() + v[1].norm_sqr() + v[2].norm_sqr()).sqrt()
}

/// `(sum_{k != 0} |k|^{2s} |u_hat(k)|^2)^{1/2}`.
pub fn sobolev_norm(u: &SpectralField, s: f64) -> f64 {
    let lattice = u.lattice();
    let mut acc = 0.0;
    for k in lattice.iter_nonzero() {
        let i = lattice.index(k);
        let sq = u.component(0)[i].norm_sqr()
            + u.component(1)[i].norm_sqr()
            + u.component(2)[i].norm_sqr();
        if sq > 0.0 {
            acc += k.norm_sq().powf(s) * sq;
        }
    }
    acc.sqrt()
}

/// L2 norm; for mean-free fields this equals `sobolev_norm(u, 0)`.
pub fn l2_norm(u: &SpectralField) -> f64 {
    sobolev_norm(u, 0.0)
}

/// Absolute-sum norm `sum_{k != 0} |k|^r |u_hat(k)|`; `r = 1` is the F^1
/// norm controlling the gradient in the absolute sense.
pub fn fr_norm(u: &SpectralField, r: f64) -> f64 {
    let lattice = u.lattice();
    let mut acc = 0.0;
    for k in lattice.iter_nonzero() {
        let m = coeff_modulus(u.get(k));
        if m > 0.0 {
            acc += k.norm_sq().powf(0.5 * r) * m;
        }
    }
    acc
}
