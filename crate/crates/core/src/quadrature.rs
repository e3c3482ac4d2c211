//! Adaptive quadrature for the improper integral constants.
//!
//! Both constants are split at y = 1; each piece is mapped by a power
//! substitution that removes the endpoint singularity before the adaptive
//! rule sees it, leaving smooth integrands on [0, 1].

use crate::error::{Error, Result};
use std::f64::consts::PI;

pub const DEFAULT_QUAD_TOL: f64 = 1e-13;

/// Adaptive Simpson with Richardson correction. `tol` is absolute.
pub(crate) fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(fa: f64, fm: f64, fb: f64, h: f64) -> f64 {
        h / 6.0 * (fa + 4.0 * fm + fb)
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = simpson(fa, flm, fm, m - a);
        let right = simpson(fm, frm, fb, b - m);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
    let fa = f(a);
    let fb = f(b);
    let fm = f(0.5 * (a + b));
    let whole = simpson(fa, fm, fb, b - a);
    recurse(f, a, b, fa, fm, fb, whole, tol, 48)
}

/// `int_0^1 y^alpha / (1 + y^2) dy` for `alpha > -1`, via `y = t^p` with
/// `p (alpha + 1) = 5` so the mapped integrand is `p t^4 / (1 + t^{2p})`.
fn unit_power_piece(alpha: f64, tol: f64) -> f64 {
    let p = 5.0 / (alpha + 1.0);
    adaptive_simpson(&|t: f64| p * t.powi(4) / (1.0 + t.powf(2.0 * p)), 0.0, 1.0, tol)
}

/// Quadrature value of `int_0^inf y^{3/2-s} / (1 + y^2) dy`, the constant in
/// the Carlson-split bound. Admissible for `1/2 < s < 5/2`; the closed form
/// `(pi/2) sec(pi (3/2 - s) / 2)` is asserted against it in tests.
pub fn carlson_integral_constant(s: f64) -> Result<f64> {
    carlson_integral_constant_tol(s, DEFAULT_QUAD_TOL)
}

pub fn carlson_integral_constant_tol(s: f64, tol: f64) -> Result<f64> {
    if !(s > 0.5 && s < 2.5) {
        return Err(Error::DivergentIntegral {
            s,
            reason: "y^{3/2-s}/(1+y^2) is integrable only for 1/2 < s < 5/2",
        });
    }
    // Tail piece maps to the same family: int_1^inf = int_0^1 t^{s-3/2}/(1+t^2) dt.
    Ok(unit_power_piece(1.5 - s, 0.5 * tol) + unit_power_piece(s - 1.5, 0.5 * tol))
}

/// Closed form of the Carlson constant, used as the quadrature oracle.
pub fn carlson_integral_closed_form(s: f64) -> Result<f64> {
    if !(s > 0.5 && s < 2.5) {
        return Err(Error::DivergentIntegral {
            s,
            reason: "closed form valid only for 1/2 < s < 5/2",
        });
    }
    Ok(PI / 2.0 / (PI * (1.5 - s) / 2.0).cos())
}

/// Quadrature value of `int_0^inf y^2 / (1 + y^{2s-2}) dy`, the constant in
/// the F^1 bound. Admissible for `s > 5/2`.
pub fn euler_integral_constant(s: f64) -> Result<f64> {
    euler_integral_constant_tol(s, DEFAULT_QUAD_TOL)
}

pub fn euler_integral_constant_tol(s: f64, tol: f64) -> Result<f64> {
    if !(s > 2.5) {
        return Err(Error::DivergentIntegral {
            s,
            reason: "y^2/(1+y^{2s-2}) is integrable only for s > 5/2",
        });
    }
    let m = 2.0 * s - 2.0;
    let head = adaptive_simpson(&|y: f64| y * y / (1.0 + y.powf(m)), 0.0, 1.0, 0.5 * tol);
    // int_1^inf = int_0^1 t^{m-4}/(1+t^m) dt; map t = tau^p, p(m-3) = 5.
    let p = 5.0 / (m - 3.0);
    let tail = adaptive_simpson(
        &|t: f64| p * t.powi(4) / (1.0 + t.powf(p * m)),
        0.0,
        1.0,
        0.5 * tol,
    );
    Ok(head + tail)
}

/// Closed form `(pi/m) / sin(3 pi / m)`, `m = 2s - 2`, the quadrature oracle.
pub fn euler_integral_closed_form(s: f64) -> Result<f64> {
    if !(s > 2.5) {
        return Err(Error::DivergentIntegral {
            s,
            reason: "closed form valid only for s > 5/2",
        });
    }
    let m = 2.0 * s - 2.0;
    Ok(PI / m / (3.0 * PI / m).sin())
}

/// `int_r^inf h(x) dx` for an integrand decaying like `x^{-decay}`,
/// `decay > 1`, via `x = r t^{-p}` with `p (decay - 1) = 5`.
pub(crate) fn tail_integral(h: &dyn Fn(f64) -> f64, r: f64, decay: f64, tol: f64) -> f64 {
    assert!(r > 0.0 && decay > 1.0);
    let p = 5.0 / (decay - 1.0);
    adaptive_simpson(
        &|t: f64| {
            if t == 0.0 {
                return 0.0;
            }
            let x = r * t.powf(-p);
            h(x) * p * r * t.powf(-p - 1.0)
        },
        0.0,
        1.0,
        tol,
    )
}
