//! Vector fields in Fourier representation.
//!
//! A `SpectralField` stores the complex coefficient triple `u_hat(k)` for
//! every mode of the cube, under the basis `e^{2*pi*i*k.x}` on `[0,1)^3`.
//! Real-valued fields satisfy `u_hat(-k) = conj(u_hat(k))`; velocity data is
//! mean-free (`u_hat(0) = 0`) and, once projected, solenoidal
//! (`k . u_hat(k) = 0`).

use crate::error::{Error, Result};
use crate::lattice::{Dealias, Lattice, WaveVector};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use std::fmt::Write as _;
use std::path::Path;

pub type Coeff = [Complex64; 3];

pub const ZERO_COEFF: Coeff = [Complex64::new(0.0, 0.0); 3];

#[derive(Clone, Debug)]
pub struct SpectralField {
    lattice: Lattice,
    comps: [Vec<Complex64>; 3],
}

impl SpectralField {
    pub fn zero(lattice: Lattice) -> Self {
        let m = lattice.modes();
        SpectralField {
            lattice,
            comps: [vec![Complex64::default(); m], vec![Complex64::default(); m], vec![
                Complex64::default();
                m
            ]],
        }
    }

    pub fn lattice(&self) -> Lattice {
        self.lattice
    }

    pub fn component(&self, c: usize) -> &[Complex64] {
        &self.comps[c]
    }

    pub fn component_mut(&mut self, c: usize) -> &mut [Complex64] {
        &mut self.comps[c]
    }

    #[inline]
    pub fn get(&self, k: WaveVector) -> Coeff {
        let i = self.lattice.index(k);
        [self.comps[0][i], self.comps[1][i], self.comps[2][i]]
    }

    #[inline]
    pub fn set(&mut self, k: WaveVector, v: Coeff) {
        let i = self.lattice.index(k);
        self.comps[0][i] = v[0];
        self.comps[1][i] = v[1];
        self.comps[2][i] = v[2];
    }

    /// Build a Hermitian field from canonical-mode coefficients; the
    /// conjugate partner of each listed mode is filled in automatically.
    pub fn from_canonical_modes(lattice: Lattice, modes: &[(WaveVector, Coeff)]) -> Result<Self> {
        let mut field = SpectralField::zero(lattice);
        for &(k, v) in modes {
            if k.is_zero() || !lattice.contains(k) {
                return Err(Error::InvalidArgument(format!(
                    "mode {k} is not a nonzero lattice mode"
                )));
            }
            field.set(k, v);
            field.set(k.neg(), [v[0].conj(), v[1].conj(), v[2].conj()]);
        }
        Ok(field)
    }

    /// Largest coefficient modulus over all modes.
    pub fn max_modulus(&self) -> f64 {
        let mut m: f64 = 0.0;
        for i in 0..self.lattice.modes() {
            let s = self.comps[0][i].norm_sqr()
                + self.comps[1][i].norm_sqr()
                + self.comps[2][i].norm_sqr();
            m = m.max(s);
        }
        m.sqrt()
    }

    /// Max over modes of `|u_hat(k) - conj(u_hat(-k))|`.
    pub fn hermitian_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for k in self.lattice.iter() {
            let a = self.get(k);
            let b = self.get(k.neg());
            for c in 0..3 {
                worst = worst.max((a[c] - b[c].conj()).norm());
            }
        }
        worst
    }

    /// Hermitian average `(u_hat(k) + conj(u_hat(-k))) / 2`; the result is
    /// exactly symmetric.
    pub fn symmetrize_real(&self) -> SpectralField {
        let mut out = SpectralField::zero(self.lattice);
        for k in self.lattice.iter() {
            if k.is_canonical() || k.is_zero() {
                let a = self.get(k);
                let b = self.get(k.neg());
                let mut v = ZERO_COEFF;
                for c in 0..3 {
                    v[c] = (a[c] + b[c].conj()) * 0.5;
                }
                out.set(k, v);
                if !k.is_zero() {
                    out.set(k.neg(), [v[0].conj(), v[1].conj(), v[2].conj()]);
                }
            }
        }
        out
    }

    /// Per-mode orthogonal projection onto divergence-free fields:
    /// `u_hat(k) - k (k . u_hat(k)) / |k|^2`, with the mean pinned to zero.
    pub fn leray_project(&self) -> SpectralField {
        let mut out = self.clone();
        for k in self.lattice.iter() {
            if k.is_zero() {
                out.set(k, ZERO_COEFF);
                continue;
            }
            let v = self.get(k);
            let kf = k.as_f64();
            let kdotv = v[0] * kf[0] + v[1] * kf[1] + v[2] * kf[2];
            let inv = 1.0 / k.norm_sq();
            let mut w = ZERO_COEFF;
            for c in 0..3 {
                w[c] = v[c] - kdotv * (kf[c] * inv);
            }
            out.set(k, w);
        }
        out
    }

    /// Max over nonzero modes of `|k . u_hat(k)| / |k|`.
    pub fn divergence_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for k in self.lattice.iter_nonzero() {
            let v = self.get(k);
            let kf = k.as_f64();
            let d = v[0] * kf[0] + v[1] * kf[1] + v[2] * kf[2];
            worst = worst.max(d.norm() / k.norm());
        }
        worst
    }

    pub fn is_solenoidal(&self) -> bool {
        self.divergence_residual() <= 1e-12 * self.max_modulus().max(f64::MIN_POSITIVE)
    }

    pub fn mean_coefficient(&self) -> Coeff {
        self.get(WaveVector::new(0, 0, 0))
    }

    pub fn scale(&self, factor: f64) -> SpectralField {
        let mut out = self.clone();
        for c in 0..3 {
            for v in out.comps[c].iter_mut() {
                *v *= factor;
            }
        }
        out
    }

    pub fn add(&self, other: &SpectralField) -> Result<SpectralField> {
        self.lattice.same_as(&other.lattice)?;
        let mut out = self.clone();
        for c in 0..3 {
            for (a, b) in out.comps[c].iter_mut().zip(&other.comps[c]) {
                *a += b;
            }
        }
        Ok(out)
    }

    pub fn sub(&self, other: &SpectralField) -> Result<SpectralField> {
        self.lattice.same_as(&other.lattice)?;
        let mut out = self.clone();
        for c in 0..3 {
            for (a, b) in out.comps[c].iter_mut().zip(&other.comps[c]) {
                *a -= b;
            }
        }
        Ok(out)
    }

    /// Root of the summed squared coefficient moduli of the difference,
    /// convenient for convergence studies.
    pub fn diff_l2(&self, other: &SpectralField) -> Result<f64> {
        self.lattice.same_as(&other.lattice)?;
        let mut acc = 0.0;
        for c in 0..3 {
            for (a, b) in self.comps[c].iter().zip(&other.comps[c]) {
                acc += (a - b).norm_sqr();
            }
        }
        Ok(acc.sqrt())
    }

    pub fn is_finite(&self) -> bool {
        self.comps
            .iter()
            .all(|c| c.iter().all(|v| v.re.is_finite() && v.im.is_finite()))
    }
}

/// Deterministic random Hermitian solenoidal field with coefficient moduli
/// proportional to `|k|^-slope`.
pub fn random_solenoidal(lattice: Lattice, slope: f64, seed: u64) -> SpectralField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut field = SpectralField::zero(lattice);
    let normal = StandardNormal;
    for k in lattice.iter_canonical().collect::<Vec<_>>() {
        let amp = k.norm().powf(-slope);
        let mut v = ZERO_COEFF;
        for item in v.iter_mut() {
            let re: f64 = normal.sample(&mut rng);
            let im: f64 = normal.sample(&mut rng);
            *item = Complex64::new(re, im) * amp;
        }
        field.set(k, v);
        field.set(k.neg(), [v[0].conj(), v[1].conj(), v[2].conj()]);
    }
    field.leray_project()
}

/// Negative control for solenoidality-sensitive checks: the random field
/// with an added gradient component `i k |u_hat(k)| / |k|` at every mode,
/// Hermitian but decisively divergence-carrying.
pub fn non_solenoidal_control(lattice: Lattice, slope: f64, seed: u64) -> SpectralField {
    let base = random_solenoidal(lattice, slope, seed);
    let mut out = base.clone();
    for k in lattice.iter_canonical().collect::<Vec<_>>() {
        let v = base.get(k);
        let m = (v[0].norm_sqr() + v[1].norm_sqr() + v[2].norm_sqr()).sqrt();
        let g = Complex64::new(0.0, m.max(1e-6 * base.max_modulus()) / k.norm());
        let kf = k.as_f64();
        let w = [v[0] + g * kf[0], v[1] + g * kf[1], v[2] + g * kf[2]];
        out.set(k, w);
        out.set(k.neg(), [w[0].conj(), w[1].conj(), w[2].conj()]);
    }
    out
}

/// Spectral coefficients of the Taylor-Green vortex
/// `A (sin 2*pi*x cos 2*pi*y cos 2*pi*z, -cos 2*pi*x sin 2*pi*y cos 2*pi*z, 0)`.
///
/// Eight excited modes `k = (s_x, s_y, s_z)` with components `+-1`:
/// the first velocity component carries `-i A s_x / 8`, the second
/// `+i A s_y / 8`.
pub fn taylor_green(lattice: Lattice, amplitude: f64) -> Result<SpectralField> {
    if !(amplitude > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "Taylor-Green amplitude must be positive, got {amplitude}"
        )));
    }
    if lattice.max_retained() < 1 {
        return Err(Error::InvalidArgument(
            "lattice cannot hold the |k_i| = 1 Taylor-Green modes".into(),
        ));
    }
    let mut field = SpectralField::zero(lattice);
    let a8 = amplitude / 8.0;
    for sx in [-1i32, 1] {
        for sy in [-1i32, 1] {
            for sz in [-1i32, 1] {
                let k = WaveVector::new(sx, sy, sz);
                let v = [
                    Complex64::new(0.0, -a8 * sx as f64),
                    Complex64::new(0.0, a8 * sy as f64),
                    Complex64::new(0.0, 0.0),
                ];
                field.set(k, v);
            }
        }
    }
    Ok(field)
}

const SNAPSHOT_MAGIC: &str = "SPECFIELD v1";

/// Serialize to the `SPECFIELD v1` text format: one line per canonical mode
/// with a nonzero coefficient, `kx ky kz re1 im1 re2 im2 re3 im3`.
pub fn snapshot_to_string(field: &SpectralField) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{SNAPSHOT_MAGIC} N={}", field.lattice().n());
    for k in field.lattice().iter_canonical() {
        let v = field.get(k);
        if v.iter().all(|c| c.re == 0.0 && c.im == 0.0) {
            continue;
        }
        let _ = writeln!(
            out,
            "{} {} {} {:.16e} {:.16e} {:.16e} {:.16e} {:.16e} {:.16e}",
            k.x, k.y, k.z, v[0].re, v[0].im, v[1].re, v[1].im, v[2].re, v[2].im
        );
    }
    out
}

pub fn write_snapshot(field: &SpectralField, path: &Path) -> Result<()> {
    std::fs::write(path, snapshot_to_string(field)).map_err(|e| Error::io(path, e))
}

/// Parse the `SPECFIELD v1` format. Duplicate, out-of-range, zero and
/// non-canonical wavevectors are rejected; Hermitian partners are implied.
pub fn snapshot_from_str(text: &str, dealias: Dealias) -> Result<SpectralField> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| Error::SnapshotFormat {
        line: 1,
        msg: "empty file".into(),
    })?;
    let header = header.trim();
    let n: usize = header
        .strip_prefix(SNAPSHOT_MAGIC)
        .map(str::trim)
        .and_then(|rest| rest.strip_prefix("N="))
        .and_then(|v| v.trim().parse().ok())
        .ok_or_else(|| Error::SnapshotFormat {
            line: 1,
            msg: format!("bad header '{header}', expected '{SNAPSHOT_MAGIC} N=<N>'"),
        })?;
    let lattice = Lattice::new(n, dealias)?;
    let mut field = SpectralField::zero(lattice);
    let mut seen = std::collections::HashSet::new();
    for (idx, raw) in lines {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split_whitespace().collect();
        if parts.len() != 9 {
            return Err(Error::SnapshotFormat {
                line: line_no,
                msg: format!("expected 9 fields, found {}", parts.len()),
            });
        }
        let ki: Vec<i32> = parts[..3]
            .iter()
            .map(|p| p.parse::<i32>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::SnapshotFormat {
                line: line_no,
                msg: format!("bad wavevector component: {e}"),
            })?;
        let k = WaveVector::new(ki[0], ki[1], ki[2]);
        if !lattice.contains(k) {
            return Err(Error::SnapshotFormat {
                line: line_no,
                msg: format!("wavevector {k} out of range for N = {n}"),
            });
        }
        if !k.is_canonical() {
            return Err(Error::SnapshotFormat {
                line: line_no,
                msg: format!("wavevector {k} is not canonical (first nonzero coordinate positive)"),
            });
        }
        if !seen.insert(k) {
            return Err(Error::SnapshotFormat {
                line: line_no,
                msg: format!("duplicate wavevector {k}"),
            });
        }
        let vals: Vec<f64> = parts[3..]
            .iter()
            .map(|p| p.parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::SnapshotFormat {
                line: line_no,
                msg: format!("bad coefficient: {e}"),
            })?;
        let v = [
            Complex64::new(vals[0], vals[1]),
            Complex64::new(vals[2], vals[3]),
            Complex64::new(vals[4], vals[5]),
        ];
        field.set(k, v);
        field.set(k.neg(), [v[0].conj(), v[1].conj(), v[2].conj()]);
    }
    Ok(field)
}

pub fn read_snapshot(path: &Path, dealias: Dealias) -> Result<SpectralField> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    snapshot_from_str(&text, dealias)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn lat(n: usize) -> Lattice {
        Lattice::new(n, Dealias::None).unwrap()
    }

    #[test]
    fn leray_annihilates_gradients() {
        // u_hat(k) = k at every mode is a pure gradient direction.
        let lattice = lat(3);
        let mut u = SpectralField::zero(lattice);
        for k in lattice.iter_nonzero() {
            let kf = k.as_f64();
            u.set(k, [kf[0].into(), kf[1].into(), kf[2].into()]);
        }
        let p = u.leray_project();
        assert!(p.max_modulus() <= 1e-14);
    }

    #[test]
    fn leray_is_idempotent_and_matches_example() {
        let lattice = lat(2);
        let u = SpectralField::from_canonical_modes(
            lattice,
            &[(
                WaveVector::new(1, 0, 0),
                [1.0.into(), 1.0.into(), 0.0.into()],
            )],
        )
        .unwrap();
        let p = u.leray_project();
        let v = p.get(WaveVector::new(1, 0, 0));
        assert_abs_diff_eq!(v[0].re, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(v[1].re, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(v[2].norm(), 0.0, epsilon = 1e-15);
        let pp = p.leray_project();
        assert!(pp.sub(&p).unwrap().max_modulus() <= 1e-15);
        assert!(p.is_solenoidal());
    }

    #[test]
    fn symmetrize_examples() {
        let lattice = lat(2);
        // Hermitian input unchanged.
        let u = random_solenoidal(lattice, 2.0, 3);
        let s = u.symmetrize_real();
        assert!(s.sub(&u).unwrap().max_modulus() <= 1e-15);
        assert_eq!(s.hermitian_residual(), 0.0);

        // Averaging example from the one-sided mode.
        let mut v = SpectralField::zero(lattice);
        v.set(WaveVector::new(1, 0, 0), [1.0.into(), 0.0.into(), 0.0.into()]);
        let sv = v.symmetrize_real();
        assert_abs_diff_eq!(sv.get(WaveVector::new(1, 0, 0))[0].re, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(sv.get(WaveVector::new(-1, 0, 0))[0].re, 0.5, epsilon = 1e-15);

        // Anti-Hermitian input vanishes.
        let mut w = SpectralField::zero(lattice);
        for k in lattice.iter_canonical().collect::<Vec<_>>() {
            let c = Complex64::new(0.3 * k.x as f64, 0.7);
            w.set(k, [c, c, c]);
            w.set(k.neg(), [-c.conj(), -c.conj(), -c.conj()]);
        }
        assert!(w.symmetrize_real().max_modulus() <= 1e-15);
    }

    #[test]
    fn random_solenoidal_is_deterministic_and_divergence_free() {
        let lattice = lat(8);
        let a = random_solenoidal(lattice, 3.0, 42);
        let b = random_solenoidal(lattice, 3.0, 42);
        assert_eq!(a.sub(&b).unwrap().max_modulus(), 0.0);
        let c = random_solenoidal(lattice, 3.0, 43);
        assert!(a.sub(&c).unwrap().max_modulus() > 0.0);
        assert!(a.is_solenoidal());
        assert_eq!(a.hermitian_residual(), 0.0);
        assert!(a.mean_coefficient().iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn taylor_green_structure() {
        let lattice = lat(4);
        let u = taylor_green(lattice, 1.0).unwrap();
        assert!(u.divergence_residual() <= 1e-15);
        let mut excited = 0;
        for k in lattice.iter_nonzero() {
            let v = u.get(k);
            if v.iter().any(|c| c.norm() > 0.0) {
                excited += 1;
                assert_eq!(k.norm_sq(), 3.0);
            }
        }
        assert_eq!(excited, 8);
        assert!(taylor_green(lattice, 0.0).is_err());
    }

    #[test]
    fn snapshot_round_trip_and_rejections() {
        let lattice = lat(5);
        let u = random_solenoidal(lattice, 2.5, 9);
        let text = snapshot_to_string(&u);
        let back = snapshot_from_str(&text, Dealias::None).unwrap();
        assert!(back.sub(&u).unwrap().max_modulus() <= 1e-18 * u.max_modulus().max(1.0));

        let dup = "SPECFIELD v1 N=2\n1 0 0 1 0 0 0 0 0\n1 0 0 1 0 0 0 0 0\n";
        assert!(matches!(
            snapshot_from_str(dup, Dealias::None),
            Err(Error::SnapshotFormat { line: 3, .. })
        ));
        let oor = "SPECFIELD v1 N=2\n3 0 0 1 0 0 0 0 0\n";
        assert!(snapshot_from_str(oor, Dealias::None).is_err());
        let noncanon = "SPECFIELD v1 N=2\n-1 0 0 1 0 0 0 0 0\n";
        assert!(snapshot_from_str(noncanon, Dealias::None).is_err());
        let zero = "SPECFIELD v1 N=2\n0 0 0 1 0 0 0 0 0\n";
        assert!(snapshot_from_str(zero, Dealias::None).is_err());
    }
}
