//! The Hs-weighted convection form, its exact cancellation identity, and
//! the bound chain of the nonlinear-term lemma.
//!
//! Everything here works on the symmetric triad restriction: a pair (k, q)
//! contributes only when k, q and k - q are all retained nonzero modes. For
//! real (Hermitian) fields the raw double sum
//! `sum |k|^{2s} (k . u_hat(k-q)) (u_hat(q) . conj u_hat(k))` is purely
//! imaginary under k,q -> -k,-q, so the real-valued form is taken with the
//! derivative's phase factored in: `T_s(u) = Re[i * sum] = -Im(sum)`. With
//! that orientation the fast pseudo-spectral route
//! `(1/2pi) Re sum |k|^{2s} v_hat(k) . conj u_hat(k)`, `v = (u.grad)u`,
//! evaluates the same number, and the Hs pairing of `B(u,u)` with `u`
//! equals `2 pi T_s(u)`.

use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::transform::convective_term;
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::TAU;

/// Largest retained mode count accepted by the O(M^2) triad scans.
pub const DIRECT_MODE_GUARD: usize = 100_000;

/// Dense cube tables over the retained set, indexed by shifted components.
struct TriadTables {
    kmax: i32,
    side: usize,
    coeff: Vec<[Complex64; 3]>,
    modulus: Vec<f64>,
    norm: Vec<f64>,
    /// Retained nonzero modes in lexicographic order.
    nonzero: Vec<(i32, i32, i32)>,
}

impl TriadTables {
    fn build(u: &SpectralField) -> Result<Self> {
        let lattice = u.lattice();
        let kmax = lattice.max_retained();
        let side = (2 * kmax + 1) as usize;
        let count = side * side * side - 1;
        if count > DIRECT_MODE_GUARD {
            return Err(Error::GuardExceeded {
                modes: count,
                limit: DIRECT_MODE_GUARD,
            });
        }
        let mut coeff = vec![[Complex64::default(); 3]; side * side * side];
        let mut modulus = vec![0.0; side * side * side];
        let mut norm = vec![0.0; side * side * side];
        let mut nonzero = Vec::with_capacity(count);
        for x in -kmax..=kmax {
            for y in -kmax..=kmax {
                for z in -kmax..=kmax {
                    let idx = Self::idx_of(kmax, side, x, y, z);
                    if (x, y, z) == (0, 0, 0) {
                        continue;
                    }
                    let k = crate::lattice::WaveVector::new(x, y, z);
                    let v = u.get(k);
                    coeff[idx] = v;
                    modulus[idx] =
                        (v[0].norm_sqr() + v[1].norm_sqr() + v[2].norm_sqr()).sqrt();
                    norm[idx] = k.norm();
                    nonzero.push((x, y, z));
                }
            }
        }
        Ok(TriadTables {
            kmax,
            side,
            coeff,
            modulus,
            norm,
            nonzero,
        })
    }

    #[inline]
    fn idx_of(kmax: i32, side: usize, x: i32, y: i32, z: i32) -> usize {
        (((x + kmax) as usize) * side + (y + kmax) as usize) * side + (z + kmax) as usize
    }

    #[inline]
    fn idx(&self, x: i32, y: i32, z: i32) -> usize {
        Self::idx_of(self.kmax, self.side, x, y, z)
    }

    /// `|k|^e` over the dense cube; the center entry stays zero.
    fn pow_table(&self, e: f64) -> Vec<f64> {
        self.norm
            .iter()
            .map(|&n| if n > 0.0 { n.powf(e) } else { 0.0 })
            .collect()
    }

    /// Restricted norms over the retained set, used for the final
    /// Cauchy-Schwarz line.
    fn retained_sobolev(&self, s: f64) -> f64 {
        let mut acc = 0.0;
        for &(x, y, z) in &self.nonzero {
            let i = self.idx(x, y, z);
            let m = self.modulus[i];
            if m > 0.0 {
                acc += self.norm[i].powf(2.0 * s) * m * m;
            }
        }
        acc.sqrt()
    }

    fn retained_fr(&self, r: f64) -> f64 {
        let mut acc = 0.0;
        for &(x, y, z) in &self.nonzero {
            let i = self.idx(x, y, z);
            let m = self.modulus[i];
            if m > 0.0 {
                acc += self.norm[i].powf(r) * m;
            }
        }
        acc
    }
}

#[inline]
fn dot_real(k: (f64, f64, f64), v: &[Complex64; 3]) -> Complex64 {
    v[0] * k.0 + v[1] * k.1 + v[2] * k.2
}

#[inline]
fn dot_conj(a: &[Complex64; 3], b: &[Complex64; 3]) -> Complex64 {
    a[0] * b[0].conj() + a[1] * b[1].conj() + a[2] * b[2].conj()
}

#[derive(Clone, Copy, Default)]
struct FormCancelAcc {
    form: Complex64,
    cancel: Complex64,
    denom: f64,
}

/// Fused scan evaluating, for every requested s, the raw double sum, the
/// symmetric cancellation sum and its absolute-term normalization.
fn scan_form_cancel(u: &SpectralField, s_values: &[f64]) -> Result<Vec<FormCancelAcc>> {
    let t = TriadTables::build(u)?;
    let pow_s: Vec<Vec<f64>> = s_values.iter().map(|&s| t.pow_table(s)).collect();
    let ns = s_values.len();
    let kmax = t.kmax;

    let per_k: Vec<Vec<FormCancelAcc>> = t
        .nonzero
        .par_iter()
        .map(|&(kx, ky, kz)| {
            let mut acc = vec![FormCancelAcc::default(); ns];
            let ik = t.idx(kx, ky, kz);
            let uk = t.coeff[ik];
            let mk = t.modulus[ik];
            let kf = (kx as f64, ky as f64, kz as f64);
            let qx_lo = (-kmax).max(kx - kmax);
            let qx_hi = kmax.min(kx + kmax);
            for qx in qx_lo..=qx_hi {
                let qy_lo = (-kmax).max(ky - kmax);
                let qy_hi = kmax.min(ky + kmax);
                for qy in qy_lo..=qy_hi {
                    let qz_lo = (-kmax).max(kz - kmax);
                    let qz_hi = kmax.min(kz + kmax);
                    let mut iq = t.idx(qx, qy, qz_lo);
                    let mut id = t.idx(kx - qx, ky - qy, kz - qz_lo);
                    for qz in qz_lo..=qz_hi {
                        let cur_q = iq;
                        let cur_d = id;
                        iq += 1;
                        id = id.wrapping_sub(1);
                        if (qx, qy, qz) == (0, 0, 0) || (qx, qy, qz) == (kx, ky, kz) {
                            continue;
                        }
                        let md = t.modulus[cur_d];
                        let mq = t.modulus[cur_q];
                        if md == 0.0 || mq == 0.0 {
                            continue;
                        }
                        let ud = &t.coeff[cur_d];
                        let uq = &t.coeff[cur_q];
                        let qf = (qx as f64, qy as f64, qz as f64);
                        let kd = dot_real(kf, ud);
                        let qd = dot_real(qf, ud);
                        let pq = dot_conj(uq, &uk);
                        let qn = t.norm[cur_q];
                        let abs_terms = md * qn * mq * mk;
                        for (j, pows) in pow_s.iter().enumerate() {
                            let pk = pows[ik];
                            let pq_s = pows[cur_q];
                            acc[j].form += kd * pq * (pk * pk);
                            acc[j].cancel += qd * pq * (pq_s * pk);
                            acc[j].denom += pq_s * pk * abs_terms;
                        }
                    }
                }
            }
            acc
        })
        .collect();

    let mut totals = vec![FormCancelAcc::default(); ns];
    for row in &per_k {
        for (tot, part) in totals.iter_mut().zip(row) {
            tot.form += part.form;
            tot.cancel += part.cancel;
            tot.denom += part.denom;
        }
    }
    Ok(totals)
}

/// The form evaluated by the direct double lattice sum over retained
/// triads, batched over Sobolev indices.
pub fn trilinear_direct_batch(u: &SpectralField, s_values: &[f64]) -> Result<Vec<f64>> {
    Ok(scan_form_cancel(u, s_values)?
        .into_iter()
        .map(|acc| -acc.form.im)
        .collect())
}

pub fn trilinear_direct(u: &SpectralField, s: f64) -> Result<f64> {
    Ok(trilinear_direct_batch(u, &[s])?[0])
}

/// Normalized residual of the cancellation identity
/// `sum sum |q|^s |k|^s (u_hat(k-q) . q)(u_hat(q) . conj u_hat(k)) = 0`;
/// the divisor is the same sum with every factor in absolute value.
pub fn cancellation_residual_batch(u: &SpectralField, s_values: &[f64]) -> Result<Vec<f64>> {
    Ok(scan_form_cancel(u, s_values)?
        .into_iter()
        .map(|acc| {
            if acc.denom > 0.0 {
                acc.cancel.norm() / acc.denom
            } else {
                0.0
            }
        })
        .collect())
}

pub fn cancellation_residual(u: &SpectralField, s: f64) -> Result<f64> {
    Ok(cancellation_residual_batch(u, &[s])?[0])
}

/// Signed form value and normalized cancellation residual per index from a
/// single fused triad scan.
pub fn form_and_cancellation_batch(
    u: &SpectralField,
    s_values: &[f64],
) -> Result<Vec<(f64, f64)>> {
    Ok(scan_form_cancel(u, s_values)?
        .into_iter()
        .map(|acc| {
            let residual = if acc.denom > 0.0 {
                acc.cancel.norm() / acc.denom
            } else {
                0.0
            };
            (-acc.form.im, residual)
        })
        .collect())
}

/// Fast evaluation through the dealiased pseudo-spectral product: with
/// `v = (u.grad)u` carrying the `2 pi i k` derivative factor, the pairing
/// `Re sum |k|^{2s} v_hat . conj u_hat` equals `2 pi` times the raw lattice
/// sum, so the derivative's `2 pi` is normalized away here.
pub fn trilinear_fast(u: &SpectralField, s: f64) -> f64 {
    let v = convective_term(u);
    raw_pairing(&v, u, s) / TAU
}

pub fn trilinear_fast_batch(u: &SpectralField, s_values: &[f64]) -> Vec<f64> {
    let v = convective_term(u);
    s_values.iter().map(|&s| raw_pairing(&v, u, s) / TAU).collect()
}

fn raw_pairing(v: &SpectralField, u: &SpectralField, s: f64) -> f64 {
    let lattice = u.lattice();
    let mut acc = 0.0;
    for k in lattice.iter_nonzero() {
        let i = lattice.index(k);
        let mut dot = 0.0;
        for c in 0..3 {
            let a = v.component(c)[i];
            let b = u.component(c)[i];
            dot += a.re * b.re + a.im * b.im;
        }
        if dot != 0.0 {
            acc += k.norm_sq().powf(s) * dot;
        }
    }
    acc
}

/// `Re sum_{k != 0} |k|^{2s} v_hat(k) . conj(u_hat(k))`.
pub fn hs_pairing(v: &SpectralField, u: &SpectralField, s: f64) -> Result<f64> {
    v.lattice().same_as(&u.lattice())?;
    Ok(raw_pairing(v, u, s))
}

/// `B(u,u) = P((u.grad)u)`, the projected dealiased convection term.
pub fn nonlinear_term(u: &SpectralField) -> SpectralField {
    convective_term(u).leray_project()
}

/// Every majorant line of the nonlinear-term lemma evaluated as its own
/// lattice sum, in proof order.
#[derive(Clone, Debug)]
pub struct TrilinearBreakdown {
    pub s: f64,
    pub r: f64,
    /// Signed value of the form.
    pub value: f64,
    pub cancellation_residual: f64,
    /// (line label, value), starting from |form| and ending at the last
    /// pre-Cauchy-Schwarz lattice sum.
    pub chain: Vec<(&'static str, f64)>,
    /// Final right side `s 2^{s+1} (sum |k|^r |u_hat|) ||u||_s ||u||_{s+1-r}`
    /// over the retained set.
    pub bound: f64,
}

impl TrilinearBreakdown {
    /// Relative tolerance for chain monotonicity checks.
    pub fn monotone(&self, tol: f64) -> bool {
        let mut prev = self.chain[0].1;
        for &(_, v) in &self.chain[1..] {
            if v < prev * (1.0 - tol) - f64::MIN_POSITIVE {
                return false;
            }
            prev = prev.max(v);
        }
        self.bound >= prev * (1.0 - tol) - f64::MIN_POSITIVE
    }

    pub fn final_slack(&self) -> f64 {
        self.bound - self.chain[0].1
    }
}

struct ChainAcc {
    form: Complex64,
    cancel: Complex64,
    denom: f64,
    line1: f64,
    line2: f64,
    line3: f64,
    line4: Vec<f64>,
    line5: Vec<f64>,
}

impl ChainAcc {
    fn zero(nr: usize) -> Self {
        ChainAcc {
            form: Complex64::default(),
            cancel: Complex64::default(),
            denom: 0.0,
            line1: 0.0,
            line2: 0.0,
            line3: 0.0,
            line4: vec![0.0; nr],
            line5: vec![0.0; nr],
        }
    }
}

fn scan_chain(u: &SpectralField, s: f64, r_values: &[f64]) -> Result<Vec<TrilinearBreakdown>> {
    for &r in r_values {
        if !(0.0..=1.0).contains(&r) {
            return Err(Error::InvalidArgument(format!(
                "lemma parameter r = {r} outside [0, 1]"
            )));
        }
    }
    let t = TriadTables::build(u)?;
    let pow_s = t.pow_table(s);
    let pow_sm1 = t.pow_table(s - 1.0);
    let pow_r: Vec<Vec<f64>> = r_values.iter().map(|&r| t.pow_table(r)).collect();
    let pow_1mr: Vec<Vec<f64>> = r_values.iter().map(|&r| t.pow_table(1.0 - r)).collect();
    let pow_sp1mr: Vec<Vec<f64>> =
        r_values.iter().map(|&r| t.pow_table(s + 1.0 - r)).collect();
    let nr = r_values.len();
    let kmax = t.kmax;

    let per_k: Vec<ChainAcc> = t
        .nonzero
        .par_iter()
        .map(|&(kx, ky, kz)| {
            let mut acc = ChainAcc::zero(nr);
            let ik = t.idx(kx, ky, kz);
            let uk = t.coeff[ik];
            let mk = t.modulus[ik];
            let pk = pow_s[ik];
            let kf = (kx as f64, ky as f64, kz as f64);
            for qx in (-kmax).max(kx - kmax)..=kmax.min(kx + kmax) {
                for qy in (-kmax).max(ky - kmax)..=kmax.min(ky + kmax) {
                    let qz_lo = (-kmax).max(kz - kmax);
                    let qz_hi = kmax.min(kz + kmax);
                    let mut iq = t.idx(qx, qy, qz_lo);
                    let mut id = t.idx(kx - qx, ky - qy, kz - qz_lo);
                    for qz in qz_lo..=qz_hi {
                        let cur_q = iq;
                        let cur_d = id;
                        iq += 1;
                        id = id.wrapping_sub(1);
                        if (qx, qy, qz) == (0, 0, 0) || (qx, qy, qz) == (kx, ky, kz) {
                            continue;
                        }
                        let md = t.modulus[cur_d];
                        let mq = t.modulus[cur_q];
                        if md == 0.0 || mq == 0.0 {
                            continue;
                        }
                        let ud = &t.coeff[cur_d];
                        let uq = &t.coeff[cur_q];
                        let qf = (qx as f64, qy as f64, qz as f64);
                        let kd = dot_real(kf, ud);
                        let qd = dot_real(qf, ud);
                        let pq = dot_conj(uq, &uk);
                        acc.form += kd * pq * (pk * pk);
                        acc.cancel += qd * pq * (pow_s[cur_q] * pk);
                        let abs_qd = qd.norm();
                        let mqk = mq * mk;
                        let dn = t.norm[cur_d];
                        let qn = t.norm[cur_q];
                        acc.denom += pow_s[cur_q] * pk * md * qn * mqk;
                        acc.line1 += pk * (pk - pow_s[cur_q]).abs() * abs_qd * mqk;
                        acc.line2 +=
                            pk * abs_qd * mqk * dn * (pow_sm1[cur_d] + pow_sm1[cur_q]);
                        let mm = md * mqk;
                        let base3 = pk * pow_s[cur_d] * mm;
                        acc.line3 += base3 * qn;
                        for j in 0..nr {
                            acc.line4[j] +=
                                base3 * pow_r[j][cur_q] * (pow_1mr[j][cur_d] + pow_1mr[j][ik]);
                            acc.line5[j] += pow_r[j][cur_q] * mq
                                * pow_s[cur_d] * md
                                * pow_sp1mr[j][ik] * mk;
                        }
                    }
                }
            }
            acc
        })
        .collect();

    let mut total = ChainAcc::zero(nr);
    for part in &per_k {
        total.form += part.form;
        total.cancel += part.cancel;
        total.denom += part.denom;
        total.line1 += part.line1;
        total.line2 += part.line2;
        total.line3 += part.line3;
        for j in 0..nr {
            total.line4[j] += part.line4[j];
            total.line5[j] += part.line5[j];
        }
    }

    let c_base = s * 2f64.powf(s);
    let hs_ret = t.retained_sobolev(s);
    let residual = if total.denom > 0.0 {
        total.cancel.norm() / total.denom
    } else {
        0.0
    };
    Ok(r_values
        .iter()
        .enumerate()
        .map(|(j, &r)| {
            let bound = 2.0 * c_base
                * t.retained_fr(r)
                * hs_ret
                * t.retained_sobolev(s + 1.0 - r);
            TrilinearBreakdown {
                s,
                r,
                value: -total.form.im,
                cancellation_residual: residual,
                chain: vec![
                    ("form", total.form.norm()),
                    ("cancel_triangle", total.line1),
                    ("pointwise_power", 0.5 * c_base * total.line2),
                    ("symmetrized", c_base * total.line3),
                    ("split_r", c_base * total.line4[j]),
                    ("regrouped", 2.0 * c_base * total.line5[j]),
                ],
                bound,
            }
        })
        .collect())
}

/// Audit the lemma proof chain at one (s, r). Requires s > 1, where the
/// pointwise power inequality backing the chain holds.
pub fn lemma_chain_audit(u: &SpectralField, s: f64, r: f64) -> Result<TrilinearBreakdown> {
    Ok(lemma_chain_audit_batch(u, s, &[r])?.pop().unwrap())
}

pub fn lemma_chain_audit_batch(
    u: &SpectralField,
    s: f64,
    r_values: &[f64],
) -> Result<Vec<TrilinearBreakdown>> {
    if !(s > 1.0) {
        return Err(Error::InadmissibleIndex {
            s,
            range: "(1, inf) for the lemma chain",
        });
    }
    scan_chain(u, s, r_values)
}

/// Exploratory evaluation for 1/2 < s <= 1, the sub-range where the paper
/// states the theorem but the lemma's pointwise inequality is unavailable.
/// Values are reported; nothing is asserted.
pub fn lemma_chain_exploratory(
    u: &SpectralField,
    s: f64,
    r_values: &[f64],
) -> Result<Vec<TrilinearBreakdown>> {
    if !(s > 0.5) {
        return Err(Error::InadmissibleIndex {
            s,
            range: "(1/2, inf)",
        });
    }
    scan_chain(u, s, r_values)
}

/// Full-field lemma bound `s 2^{s+1} (sum |k|^r |u_hat|) ||u||_s
/// ||u||_{s+1-r}`, the right side monitored along solver trajectories.
pub fn lemma_bound(u: &SpectralField, s: f64, r: f64) -> f64 {
    use crate::norms::{fr_norm, sobolev_norm};
    s * 2f64.powf(s + 1.0) * fr_norm(u, r) * sobolev_norm(u, s) * sobolev_norm(u, s + 1.0 - r)
}
