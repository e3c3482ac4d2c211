//! Discrete Fourier transforms between coefficient and collocation space,
//! plus the dealiased pointwise product and the convective derivative.
//!
//! Synthesis uses the `e^{2*pi*i*k.x}` convention on the uniform grid
//! `x_j = j / M`, `M = 2N + 2`. Products are always evaluated on a grid
//! large enough that retained output modes carry no aliasing, so a product
//! equals the exact truncated convolution on the retained set: under the
//! two-thirds rule the native grid suffices; with dealiasing off the
//! product is computed on a zero-padded grid of `3N + 2` points per axis.

use crate::error::{Error, Result};
use crate::field::{SpectralField, ZERO_COEFF};
use crate::lattice::{Dealias, Lattice, WaveVector};
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::f64::consts::TAU;
use std::sync::Arc;

/// Real vector samples on the uniform collocation grid of `[0,1)^3`.
#[derive(Clone, Debug)]
pub struct PhysicalField {
    grid: usize,
    comps: [Vec<f64>; 3],
}

impl PhysicalField {
    pub fn grid(&self) -> usize {
        self.grid
    }

    pub fn component(&self, c: usize) -> &[f64] {
        &self.comps[c]
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize, l: usize) -> usize {
        (i * self.grid + j) * self.grid + l
    }

    pub fn sample(&self, i: usize, j: usize, l: usize) -> [f64; 3] {
        let idx = self.index(i, j, l);
        [self.comps[0][idx], self.comps[1][idx], self.comps[2][idx]]
    }

    /// Largest pointwise velocity magnitude.
    pub fn max_speed(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for idx in 0..self.comps[0].len() {
            let s = self.comps[0][idx].powi(2)
                + self.comps[1][idx].powi(2)
                + self.comps[2][idx].powi(2);
            worst = worst.max(s);
        }
        worst.sqrt()
    }

    pub fn from_components(grid: usize, comps: [Vec<f64>; 3]) -> Result<Self> {
        let want = grid * grid * grid;
        if comps.iter().any(|c| c.len() != want) {
            return Err(Error::GridMismatch {
                want,
                got: comps.iter().map(|c| c.len()).max().unwrap_or(0),
            });
        }
        Ok(PhysicalField { grid, comps })
    }
}

/// Cached forward/inverse FFT plans for one cubic grid size.
pub(crate) struct Fft3 {
    m: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl Fft3 {
    pub(crate) fn new(m: usize) -> Self {
        let mut planner = FftPlanner::new();
        Fft3 {
            m,
            fwd: planner.plan_fft_forward(m),
            inv: planner.plan_fft_inverse(m),
        }
    }

    pub(crate) fn len(&self) -> usize {
        self.m * self.m * self.m
    }

    fn apply_axes(&self, data: &mut [Complex64], fft: &Arc<dyn Fft<f64>>) {
        let m = self.m;
        debug_assert_eq!(data.len(), self.len());
        // z axis: lines are contiguous.
        fft.process(data);
        // y axis then x axis via permute, batch transform, permute back.
        let mut scratch = vec![Complex64::default(); data.len()];
        for (perm, inv_perm) in [(permute_y as PermFn, unpermute_y as PermFn), (
            permute_x as PermFn,
            unpermute_x as PermFn,
        )] {
            perm(data, &mut scratch, m);
            fft.process(&mut scratch);
            inv_perm(&scratch, data, m);
        }
    }

    /// Unnormalized analysis transform (`e^{-2*pi*i*k.x}` phases).
    pub(crate) fn forward(&self, data: &mut [Complex64]) {
        self.apply_axes(data, &self.fwd.clone());
    }

    /// Unnormalized synthesis transform (`e^{+2*pi*i*k.x}` phases).
    pub(crate) fn inverse(&self, data: &mut [Complex64]) {
        self.apply_axes(data, &self.inv.clone());
    }
}

type PermFn = fn(&[Complex64], &mut [Complex64], usize);

fn permute_y(src: &[Complex64], dst: &mut [Complex64], m: usize) {
    for x in 0..m {
        for y in 0..m {
            for z in 0..m {
                dst[(x * m + z) * m + y] = src[(x * m + y) * m + z];
            }
        }
    }
}

fn unpermute_y(src: &[Complex64], dst: &mut [Complex64], m: usize) {
    for x in 0..m {
        for y in 0..m {
            for z in 0..m {
                dst[(x * m + y) * m + z] = src[(x * m + z) * m + y];
            }
        }
    }
}

fn permute_x(src: &[Complex64], dst: &mut [Complex64], m: usize) {
    for x in 0..m {
        for y in 0..m {
            for z in 0..m {
                dst[(y * m + z) * m + x] = src[(x * m + y) * m + z];
            }
        }
    }
}

fn unpermute_x(src: &[Complex64], dst: &mut [Complex64], m: usize) {
    for x in 0..m {
        for y in 0..m {
            for z in 0..m {
                dst[(x * m + y) * m + z] = src[(y * m + z) * m + x];
            }
        }
    }
}

#[inline]
fn bin(k: i32, m: usize) -> usize {
    if k >= 0 {
        k as usize
    } else {
        (m as i32 + k) as usize
    }
}

/// Scatter one coefficient component into FFT bins, keeping only modes with
/// every `|k_i| <= kmax`. The zero mode is carried.
fn place_coefficients(
    field: &SpectralField,
    comp: usize,
    kmax: i32,
    m: usize,
    buf: &mut [Complex64],
) {
    buf.fill(Complex64::default());
    let lattice = field.lattice();
    let coeffs = field.component(comp);
    for x in -kmax..=kmax {
        for y in -kmax..=kmax {
            for z in -kmax..=kmax {
                let k = WaveVector::new(x, y, z);
                let v = coeffs[lattice.index(k)];
                buf[(bin(x, m) * m + bin(y, m)) * m + bin(z, m)] = v;
            }
        }
    }
}

/// Same as `place_coefficients` but multiplied by the derivative symbol
/// `2*pi*i*k_axis`.
fn place_derivative(
    field: &SpectralField,
    comp: usize,
    axis: usize,
    kmax: i32,
    m: usize,
    buf: &mut [Complex64],
) {
    buf.fill(Complex64::default());
    let lattice = field.lattice();
    let coeffs = field.component(comp);
    for x in -kmax..=kmax {
        for y in -kmax..=kmax {
            for z in -kmax..=kmax {
                let k = WaveVector::new(x, y, z);
                let kc = [x, y, z][axis] as f64;
                let v = coeffs[lattice.index(k)] * Complex64::new(0.0, TAU * kc);
                buf[(bin(x, m) * m + bin(y, m)) * m + bin(z, m)] = v;
            }
        }
    }
}

fn extract_coefficients(
    buf: &[Complex64],
    kmax: i32,
    m: usize,
    scale: f64,
    out: &mut SpectralField,
    comp: usize,
) {
    let lattice = out.lattice();
    for x in -kmax..=kmax {
        for y in -kmax..=kmax {
            for z in -kmax..=kmax {
                let k = WaveVector::new(x, y, z);
                let idx = lattice.index(k);
                out.component_mut(comp)[idx] =
                    buf[(bin(x, m) * m + bin(y, m)) * m + bin(z, m)] * scale;
            }
        }
    }
}

/// Synthesize collocation samples on the `(2N+2)^3` grid. Fails if the
/// imaginary residue exceeds `1e-12` of the field amplitude, which signals a
/// non-Hermitian coefficient set.
pub fn to_physical(field: &SpectralField) -> Result<PhysicalField> {
    let lattice = field.lattice();
    let m = lattice.grid();
    let fft = Fft3::new(m);
    let mut comps: [Vec<f64>; 3] = [Vec::new(), Vec::new(), Vec::new()];
    let mut buf = vec![Complex64::default(); fft.len()];
    let mut max_abs: f64 = 0.0;
    let mut max_im: f64 = 0.0;
    for c in 0..3 {
        place_coefficients(field, c, lattice.n() as i32, m, &mut buf);
        fft.inverse(&mut buf);
        let mut vals = Vec::with_capacity(buf.len());
        for v in &buf {
            max_abs = max_abs.max(v.re.abs());
            max_im = max_im.max(v.im.abs());
            vals.push(v.re);
        }
        comps[c] = vals;
    }
    if max_im > 1e-12 * max_abs.max(f64::MIN_POSITIVE) {
        return Err(Error::NotHermitian {
            residual: max_im / max_abs.max(f64::MIN_POSITIVE),
        });
    }
    PhysicalField::from_components(m, comps)
}

/// Analyze grid samples back into lattice coefficients. Constant (nonzero
/// mean) fields are rejected; the mean bin is pinned to zero and the output
/// is exactly Hermitian.
pub fn to_spectral(phys: &PhysicalField, lattice: Lattice) -> Result<SpectralField> {
    let m = lattice.grid();
    if phys.grid() != m {
        return Err(Error::GridMismatch {
            want: m,
            got: phys.grid(),
        });
    }
    let fft = Fft3::new(m);
    let scale = 1.0 / (m * m * m) as f64;
    let mut out = SpectralField::zero(lattice);
    let mut buf = vec![Complex64::default(); fft.len()];
    let mut max_abs: f64 = 0.0;
    let mut mean = ZERO_COEFF;
    for c in 0..3 {
        for (slot, v) in buf.iter_mut().zip(phys.component(c)) {
            *slot = Complex64::new(*v, 0.0);
            max_abs = max_abs.max(v.abs());
        }
        fft.forward(&mut buf);
        mean[c] = buf[0] * scale;
        extract_coefficients(&buf, lattice.n() as i32, m, scale, &mut out, c);
    }
    let mean_mod = mean.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if mean_mod > 1e-12 * max_abs.max(f64::MIN_POSITIVE) {
        return Err(Error::NonzeroMean { mean: mean_mod });
    }
    out.set(WaveVector::new(0, 0, 0), ZERO_COEFF);
    Ok(out.symmetrize_real())
}

/// Retained-mode bound and working grid for products under a lattice's rule.
/// The grid satisfies `M > 3*kmax`, so retained product modes are exact.
fn product_geometry(lattice: Lattice) -> (i32, usize) {
    match lattice.dealias() {
        Dealias::TwoThirds => (lattice.max_retained(), lattice.grid()),
        Dealias::None => (lattice.n() as i32, 3 * lattice.n() + 2),
    }
}

/// Componentwise pointwise product with both inputs and the output masked
/// to the retained set; equals the exact truncated convolution there. The
/// zero mode of the product is kept.
pub fn dealiased_product(u: &SpectralField, v: &SpectralField) -> Result<SpectralField> {
    u.lattice().same_as(&v.lattice())?;
    let lattice = u.lattice();
    let (kmax, m) = product_geometry(lattice);
    let fft = Fft3::new(m);
    let mut out = SpectralField::zero(lattice);
    let scale = 1.0 / (m * m * m) as f64;
    let mut a = vec![Complex64::default(); fft.len()];
    let mut b = vec![Complex64::default(); fft.len()];
    for c in 0..3 {
        place_coefficients(u, c, kmax, m, &mut a);
        place_coefficients(v, c, kmax, m, &mut b);
        fft.inverse(&mut a);
        fft.inverse(&mut b);
        for (x, y) in a.iter_mut().zip(&b) {
            *x = Complex64::new(x.re * y.re, 0.0);
        }
        fft.forward(&mut a);
        extract_coefficients(&a, kmax, m, scale, &mut out, c);
    }
    Ok(out)
}

/// Componentwise truncated convolution evaluated by the direct O(B^2)
/// double sum over the retained set; the oracle for `dealiased_product`.
pub fn direct_convolution(u: &SpectralField, v: &SpectralField) -> Result<SpectralField> {
    u.lattice().same_as(&v.lattice())?;
    let lattice = u.lattice();
    let (kmax, _) = product_geometry(lattice);
    let mut out = SpectralField::zero(lattice);
    let side = (2 * kmax + 1) as usize;
    let ball: Vec<WaveVector> = {
        let mut b = Vec::with_capacity(side * side * side);
        for x in -kmax..=kmax {
            for y in -kmax..=kmax {
                for z in -kmax..=kmax {
                    b.push(WaveVector::new(x, y, z));
                }
            }
        }
        b
    };
    for c in 0..3 {
        let uc: Vec<Complex64> = ball.iter().map(|&k| u.component(c)[lattice.index(k)]).collect();
        let vc: Vec<Complex64> = ball.iter().map(|&k| v.component(c)[lattice.index(k)]).collect();
        let mut acc = vec![Complex64::default(); ball.len()];
        for (ip, &p) in ball.iter().enumerate() {
            let up = uc[ip];
            if up.re == 0.0 && up.im == 0.0 {
                continue;
            }
            for (iq, &q) in ball.iter().enumerate() {
                let tx = p.x + q.x;
                let ty = p.y + q.y;
                let tz = p.z + q.z;
                if tx.abs() > kmax || ty.abs() > kmax || tz.abs() > kmax {
                    continue;
                }
                let t = ((tx + kmax) as usize * side + (ty + kmax) as usize) * side
                    + (tz + kmax) as usize;
                acc[t] += up * vc[iq];
            }
        }
        for (ik, &k) in ball.iter().enumerate() {
            out.component_mut(c)[lattice.index(k)] = acc[ik];
        }
    }
    Ok(out)
}

/// Pseudo-spectral convective derivative `(u . grad) u` with the
/// `2*pi*i*k` multiplier, masked to the retained set. Not projected.
pub fn convective_term(u: &SpectralField) -> SpectralField {
    let lattice = u.lattice();
    let (kmax, m) = product_geometry(lattice);
    let fft = Fft3::new(m);
    let scale = 1.0 / (m * m * m) as f64;
    let mut out = SpectralField::zero(lattice);

    let mut vel: [Vec<Complex64>; 3] = [
        vec![Complex64::default(); fft.len()],
        vec![Complex64::default(); fft.len()],
        vec![Complex64::default(); fft.len()],
    ];
    for (j, slot) in vel.iter_mut().enumerate() {
        place_coefficients(u, j, kmax, m, slot);
        fft.inverse(slot);
        for v in slot.iter_mut() {
            *v = Complex64::new(v.re, 0.0);
        }
    }

    let mut deriv = vec![Complex64::default(); fft.len()];
    let mut acc = vec![Complex64::default(); fft.len()];
    for i in 0..3 {
        acc.fill(Complex64::default());
        for (j, velj) in vel.iter().enumerate() {
            place_derivative(u, i, j, kmax, m, &mut deriv);
            fft.inverse(&mut deriv);
            for (a, (uj, di)) in acc.iter_mut().zip(velj.iter().zip(&deriv)) {
                *a += Complex64::new(uj.re * di.re, 0.0);
            }
        }
        fft.forward(&mut acc);
        extract_coefficients(&acc, kmax, m, scale, &mut out, i);
    }
    out
}

/// Pointwise maximum speed of the synthesized field, used by the CFL guard.
pub fn max_velocity(u: &SpectralField) -> Result<f64> {
    Ok(to_physical(u)?.max_speed())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{random_solenoidal, SpectralField};
    use crate::lattice::{Dealias, Lattice};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::TAU;

    fn lat(n: usize, rule: Dealias) -> Lattice {
        Lattice::new(n, rule).unwrap()
    }

    #[test]
    fn single_mode_synthesizes_cosine() {
        let lattice = lat(3, Dealias::None);
        let u = SpectralField::from_canonical_modes(
            lattice,
            &[(
                WaveVector::new(1, 0, 0),
                [0.0.into(), 0.5.into(), 0.0.into()],
            )],
        )
        .unwrap();
        let phys = to_physical(&u).unwrap();
        let m = phys.grid();
        for i in 0..m {
            let x = i as f64 / m as f64;
            let v = phys.sample(i, 1, 2);
            assert_abs_diff_eq!(v[0], 0.0, epsilon = 1e-14);
            assert_abs_diff_eq!(v[1], (TAU * x).cos(), epsilon = 1e-13);
            assert_abs_diff_eq!(v[2], 0.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn round_trip_identity() {
        let lattice = lat(6, Dealias::None);
        let u = random_solenoidal(lattice, 2.0, 11);
        let back = to_spectral(&to_physical(&u).unwrap(), lattice).unwrap();
        let err = back.sub(&u).unwrap().max_modulus();
        assert!(err <= 1e-12 * u.max_modulus(), "round-trip error {err}");
    }

    #[test]
    fn constant_field_is_rejected() {
        let lattice = lat(2, Dealias::None);
        let m = lattice.grid();
        let ones = vec![1.0; m * m * m];
        let phys =
            PhysicalField::from_components(m, [ones.clone(), ones.clone(), ones]).unwrap();
        assert!(matches!(
            to_spectral(&phys, lattice),
            Err(crate::error::Error::NonzeroMean { .. })
        ));
    }

    #[test]
    fn grid_mismatch_is_rejected() {
        let lattice = lat(2, Dealias::None);
        let wrong = PhysicalField::from_components(4, [vec![0.0; 64], vec![0.0; 64], vec![0.0; 64]])
            .unwrap();
        assert!(matches!(
            to_spectral(&wrong, lattice),
            Err(crate::error::Error::GridMismatch { .. })
        ));
    }

    #[test]
    fn product_of_single_modes_hits_sum_and_mean() {
        // cos(2 pi x) times itself = 1/2 + cos(4 pi x) / 2.
        let lattice = lat(4, Dealias::None);
        let u = SpectralField::from_canonical_modes(
            lattice,
            &[(
                WaveVector::new(1, 0, 0),
                [0.5.into(), 0.0.into(), 0.0.into()],
            )],
        )
        .unwrap();
        let w = dealiased_product(&u, &u).unwrap();
        assert_abs_diff_eq!(w.get(WaveVector::new(0, 0, 0))[0].re, 0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(w.get(WaveVector::new(2, 0, 0))[0].re, 0.25, epsilon = 1e-14);
        assert_abs_diff_eq!(w.get(WaveVector::new(-2, 0, 0))[0].re, 0.25, epsilon = 1e-14);
        assert_abs_diff_eq!(w.get(WaveVector::new(1, 0, 0))[0].norm(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn product_with_zero_is_zero() {
        let lattice = lat(4, Dealias::TwoThirds);
        let u = random_solenoidal(lattice, 2.0, 5);
        let z = SpectralField::zero(lattice);
        assert_eq!(dealiased_product(&u, &z).unwrap().max_modulus(), 0.0);
    }

    #[test]
    fn product_matches_direct_convolution() {
        for rule in [Dealias::None, Dealias::TwoThirds] {
            let lattice = lat(6, rule);
            let u = random_solenoidal(lattice, 2.0, 21);
            let v = random_solenoidal(lattice, 2.5, 22);
            let fast = dealiased_product(&u, &v).unwrap();
            let slow = direct_convolution(&u, &v).unwrap();
            let err = fast.sub(&slow).unwrap().max_modulus();
            let scale = slow.max_modulus().max(1e-300);
            assert!(err <= 1e-12 * scale, "rule {rule:?}: relative error {}", err / scale);
        }
    }

    #[test]
    fn lattice_mismatch_is_rejected() {
        let a = random_solenoidal(lat(4, Dealias::None), 2.0, 1);
        let b = random_solenoidal(lat(5, Dealias::None), 2.0, 1);
        assert!(dealiased_product(&a, &b).is_err());
    }

    #[test]
    fn steady_shear_has_no_convection() {
        // u = (0, cos 2 pi x, 0) depends only on x and transports in y.
        let lattice = lat(4, Dealias::TwoThirds);
        let u = SpectralField::from_canonical_modes(
            lattice,
            &[(
                WaveVector::new(1, 0, 0),
                [0.0.into(), 0.5.into(), 0.0.into()],
            )],
        )
        .unwrap();
        assert_eq!(convective_term(&u).max_modulus(), 0.0);
    }
}
