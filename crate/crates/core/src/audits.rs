//! Inequality audits: both sides of each bound are evaluated on concrete
//! fields and the slack is reported.
//!
//! Truncated reciprocal lattice sums are made conservative by adding an
//! analytic tail bound: for a radial decreasing kernel f, every excluded
//! mode has |k| >= R and sits in a unit cell inside {|x| >= R - sqrt(3)/2},
//! so the tail is at most `4 pi int_{R - sqrt3}^inf (sigma + sqrt3/2)^2
//! f(sigma) d sigma`. The sum-to-integral comparison itself is part of what
//! is audited; a negative slack is reported, not masked.

use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::norms::{fr_norm, l2_norm, sobolev_norm};
use crate::quadrature::{carlson_integral_constant, euler_integral_constant, tail_integral};
use std::f64::consts::PI;

/// Relative tolerance deciding the pass flag: pass iff
/// `slack >= -AUDIT_TOL * rhs`.
pub const AUDIT_TOL: f64 = 1e-10;

/// Working truncation radius for standalone reciprocal lattice sums. Chosen
/// large enough that the conservative tail bound does not swamp the slack
/// near the marginal end of the admissible range.
pub const RECIPROCAL_WORKING_N: usize = 48;

/// One audited inequality: named left and right sides plus intermediates.
#[derive(Clone, Debug)]
pub struct AuditResult {
    pub name: String,
    pub s: Option<f64>,
    pub r: Option<f64>,
    pub lhs: f64,
    pub rhs: f64,
    pub constant: f64,
    pub detail: Vec<(String, f64)>,
    /// Exploratory rows are reported but never fail a suite.
    pub exploratory: bool,
}

impl AuditResult {
    pub fn new(name: impl Into<String>, lhs: f64, rhs: f64, constant: f64) -> Self {
        AuditResult {
            name: name.into(),
            s: None,
            r: None,
            lhs,
            rhs,
            constant,
            detail: Vec::new(),
            exploratory: false,
        }
    }

    pub fn with_s(mut self, s: f64) -> Self {
        self.s = Some(s);
        self
    }

    pub fn with_r(mut self, r: f64) -> Self {
        self.r = Some(r);
        self
    }

    pub fn with_detail(mut self, detail: Vec<(String, f64)>) -> Self {
        self.detail = detail;
        self
    }

    pub fn exploratory(mut self) -> Self {
        self.exploratory = true;
        self
    }

    pub fn slack(&self) -> f64 {
        self.rhs - self.lhs
    }

    pub fn pass(&self) -> bool {
        self.slack() >= -AUDIT_TOL * self.rhs.abs()
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.16e}")).unwrap_or_default()
}

/// CSV serialization with the fixed schema
/// `name,s,r,lhs,rhs,constant,slack,pass`.
pub fn audits_to_csv(results: &[AuditResult]) -> String {
    let mut out = String::from("name,s,r,lhs,rhs,constant,slack,pass\n");
    for a in results {
        out.push_str(&format!(
            "{},{},{},{:.16e},{:.16e},{:.16e},{:.16e},{}\n",
            a.name,
            fmt_opt(a.s),
            fmt_opt(a.r),
            a.lhs,
            a.rhs,
            a.constant,
            a.slack(),
            a.pass()
        ));
    }
    out
}

fn check_carlson_range(s: f64) -> Result<()> {
    if s > 0.5 && s < 2.5 {
        Ok(())
    } else {
        Err(Error::InadmissibleIndex {
            s,
            range: "(1/2, 5/2)",
        })
    }
}

/// Truncated sum of `f(|k|)` over the nonzero cube `{-n..n}^3`.
fn lattice_sum(n: usize, f: impl Fn(f64) -> f64) -> f64 {
    let n = n as i32;
    let mut acc = 0.0;
    for x in -n..=n {
        for y in -n..=n {
            for z in -n..=n {
                if (x, y, z) == (0, 0, 0) {
                    continue;
                }
                acc += f(((x * x + y * y + z * z) as f64).sqrt());
            }
        }
    }
    acc
}

/// Conservative bound on the sum of `f(|k|)` over modes excluded by the
/// cube of radius n, valid for radial decreasing f with integrand decaying
/// like `sigma^{-decay}` (including the volume factor), `decay > 1`.
fn lattice_tail_bound(n: usize, decay: f64, f: impl Fn(f64) -> f64) -> f64 {
    let r = (n + 1) as f64;
    let sqrt3 = 3f64.sqrt();
    4.0 * PI
        * tail_integral(
            &|sigma: f64| (sigma + 0.5 * sqrt3).powi(2) * f(sigma),
            r - sqrt3,
            decay,
            1e-12,
        )
}

/// Audit of the reciprocal lattice sum against its radial-integral bound:
/// lhs is the exact truncated sum plus an analytic tail, rhs is
/// `(4 pi / sqrt(ab)) (sqrt(a/b))^{3/2-s} int_0^inf y^{3/2-s}/(1+y^2) dy`.
pub fn lattice_reciprocal_sum_audit(a: f64, b: f64, s: f64, working_n: usize) -> Result<AuditResult> {
    if !(a > 0.0) || !(b > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "reciprocal sum weights must be positive (a = {a}, b = {b})"
        )));
    }
    check_carlson_range(s)?;
    let kernel = |rho: f64| 1.0 / (a * rho.powf(s + 0.5) + b * rho.powf(s + 2.5));
    let truncated = lattice_sum(working_n, kernel);
    // Integrand sigma^2 * kernel decays like sigma^{-(s+1/2)}.
    let tail = lattice_tail_bound(working_n, s + 0.5, kernel);
    let constant = carlson_integral_constant(s)?;
    let rhs = 4.0 * PI / (a * b).sqrt() * (a / b).sqrt().powf(1.5 - s) * constant;
    Ok(AuditResult::new("lattice_reciprocal_sum", truncated + tail, rhs, constant)
        .with_s(s)
        .with_detail(vec![
            ("truncated_sum".into(), truncated),
            ("tail_bound".into(), tail),
            ("working_n".into(), working_n as f64),
            ("weight_a".into(), a),
            ("weight_b".into(), b),
        ]))
}

/// Reciprocal sum restricted to the field's own mode cube; this is the
/// exact Cauchy-Schwarz companion factor, no tail needed.
fn field_reciprocal_sum(u: &SpectralField, f: impl Fn(f64) -> f64) -> f64 {
    lattice_sum(u.lattice().n(), f)
}

/// Carlson-split audit of the weighted absolute sum
/// `sum |u_hat(k)| |k|^{(s-1/2)/2}` against
/// `(a ||u||_s^2 + b ||u||_{s+1}^2)^{1/2}` times the square root of the
/// reciprocal-sum bound, with the optimized weights `a = ||u||_{s+1}^2`,
/// `b = ||u||_s^2`.
pub fn carlson_majorant_audit(u: &SpectralField, s: f64) -> Result<AuditResult> {
    check_carlson_range(s)?;
    let r = 0.5 * (s - 0.5);
    let hs = sobolev_norm(u, s);
    let hs1 = sobolev_norm(u, s + 1.0);
    if hs == 0.0 || hs1 == 0.0 {
        return Err(Error::DegenerateInput(
            "carlson majorant needs a nonzero field (a = b = 0 otherwise)",
        ));
    }
    let a = hs1 * hs1;
    let b = hs * hs;
    let lhs = fr_norm(u, r);
    // Cauchy-Schwarz factor (a ||u||_s^2 + b ||u||_{s+1}^2)^{1/2} = sqrt(2) hs hs1.
    let cs_factor = (a * hs * hs + b * hs1 * hs1).sqrt();
    let recip_truncated =
        field_reciprocal_sum(u, |rho| 1.0 / (a * rho.powf(s + 0.5) + b * rho.powf(s + 2.5)));
    let constant = carlson_integral_constant(s)?;
    let recip_bound = 4.0 * PI / (a * b).sqrt() * (a / b).sqrt().powf(1.5 - s) * constant;
    let rhs = cs_factor * recip_bound.sqrt();
    Ok(AuditResult::new("carlson_majorant", lhs, rhs, constant)
        .with_s(s)
        .with_r(r)
        .with_detail(vec![
            ("weight_a".into(), a),
            ("weight_b".into(), b),
            ("cauchy_schwarz_factor".into(), cs_factor),
            ("reciprocal_sum_truncated".into(), recip_truncated),
            ("cauchy_schwarz_rhs".into(), cs_factor * recip_truncated.sqrt()),
            ("reciprocal_sum_bound".into(), recip_bound),
        ]))
}

/// Interpolation between homogeneous Sobolev norms:
/// `||u||_{theta s0 + (1-theta) s1} <= ||u||_{s0}^theta ||u||_{s1}^{1-theta}`.
pub fn interpolation_audit(u: &SpectralField, s0: f64, s1: f64, theta: f64) -> Result<AuditResult> {
    if !(0.0..=1.0).contains(&theta) {
        return Err(Error::InvalidArgument(format!(
            "interpolation parameter theta = {theta} outside [0, 1]"
        )));
    }
    if !(s0 < s1) {
        return Err(Error::InvalidArgument(format!(
            "interpolation needs s0 < s1, got s0 = {s0}, s1 = {s1}"
        )));
    }
    let mid = theta * s0 + (1.0 - theta) * s1;
    let lhs = sobolev_norm(u, mid);
    let n0 = sobolev_norm(u, s0);
    let n1 = sobolev_norm(u, s1);
    let rhs = n0.powf(theta) * n1.powf(1.0 - theta);
    Ok(AuditResult::new("interpolation", lhs, rhs, 1.0)
        .with_s(mid)
        .with_detail(vec![
            ("s0".into(), s0),
            ("s1".into(), s1),
            ("theta".into(), theta),
            ("norm_s0".into(), n0),
            ("norm_s1".into(), n1),
        ]))
}

/// The paper instance of the interpolation step for the energy inequality:
/// indices (s, s+1) with theta = s/2 - 1/4, landing on s/2 + 5/4.
pub fn interpolation_audit_energy_instance(u: &SpectralField, s: f64) -> Result<AuditResult> {
    check_carlson_range(s)?;
    interpolation_audit(u, s, s + 1.0, 0.5 * s - 0.25)
}

/// F^1 majorant audit: `sum |k| |u_hat(k)|` against
/// `sqrt(8 pi J(s)) ||u||_{L2}^{(2s-5)/(2s)} ||u||_s^{5/(2s)}`, `s > 5/2`,
/// with the weights `a = ||u||_s^2`, `b = ||u||_1^2` and the quadrature
/// constant `J(s) = int_0^inf y^2/(1+y^{2s-2}) dy`. The detail records each
/// chain line: exact Cauchy-Schwarz, integral majorant, weight substitution,
/// Sobolev interpolation.
pub fn f1_majorant_audit(u: &SpectralField, s: f64) -> Result<AuditResult> {
    if !(s > 2.5) {
        return Err(Error::InadmissibleIndex {
            s,
            range: "(5/2, inf)",
        });
    }
    let hs = sobolev_norm(u, s);
    let h1 = sobolev_norm(u, 1.0);
    let l2 = l2_norm(u);
    if hs == 0.0 || h1 == 0.0 {
        return Err(Error::DegenerateInput("f1 majorant needs a nonzero field"));
    }
    let a = hs * hs;
    let b = h1 * h1;
    let lhs = fr_norm(u, 1.0);
    let j = euler_integral_constant(s)?;
    let constant = (8.0 * PI * j).sqrt();
    // Exact Cauchy-Schwarz over the field's modes.
    let cs_factor = (a * h1 * h1 + b * hs * hs).sqrt();
    let recip_truncated = field_reciprocal_sum(u, |rho| 1.0 / (a + b * rho.powf(2.0 * s - 2.0)));
    let cs_rhs = cs_factor * recip_truncated.sqrt();
    // Radial-integral majorant of the reciprocal sum.
    let integral_factor =
        (4.0 * PI * j).sqrt() / a.sqrt() * (a / b).powf(3.0 / (2.0 * (2.0 * s - 2.0)));
    let pre_interp = cs_factor * integral_factor;
    // Same value rearranged through the weight substitution.
    let rearranged =
        constant * h1.powf((2.0 * s - 5.0) / (2.0 * s - 2.0)) * hs.powf(3.0 / (2.0 * s - 2.0));
    // Sobolev interpolation ||u||_1 <= ||u||_{L2}^{(s-1)/s} ||u||_s^{1/s}.
    let rhs = constant * l2.powf((2.0 * s - 5.0) / (2.0 * s)) * hs.powf(5.0 / (2.0 * s));
    Ok(AuditResult::new("f1_majorant", lhs, rhs, constant)
        .with_s(s)
        .with_r(1.0)
        .with_detail(vec![
            ("weight_a".into(), a),
            ("weight_b".into(), b),
            ("cauchy_schwarz_factor".into(), cs_factor),
            ("reciprocal_sum_truncated".into(), recip_truncated),
            ("cauchy_schwarz_rhs".into(), cs_rhs),
            ("integral_majorant".into(), pre_interp),
            ("weights_substituted".into(), rearranged),
            ("quadrature_constant".into(), j),
        ]))
}
