//! Conformal classes, lattices and the reference-torus chart.
//!
//! A torus is `C / (Z + omega Z)` with `Im(omega) > 0`. Moduli are reduced to
//! the canonical set `M = { a+ib : b > 0, 0 <= a <= 1/2, a^2+b^2 >= 1 }`;
//! internally everything is handled in the Teichmueller half plane.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Boundary tolerance used when classifying membership in the canonical set.
const BOUNDARY_TOL: f64 = 1e-12;
/// Iteration cap for the modular reduction loop.
const MAX_REDUCE_ITERS: usize = 1000;

/// A conformal class together with the modular word that canonicalized it.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ConformalClass {
    /// Representative in the canonical set `M`.
    pub omega: Complex64,
    /// The original parameter handed to [`canonicalize`].
    pub original: Complex64,
    /// Unimodular matrix `[[a,b],[c,d]]` with `omega' = (a w + b)/(c w + d)`.
    pub matrix: [[i64; 2]; 2],
    /// Whether the final reflection `w -> -conj(w)` was applied.
    pub reflected: bool,
}

/// The lattice `Z + omega Z` with generators `(1, omega)`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Lattice {
    omega: Complex64,
}

impl Lattice {
    pub fn new(omega: Complex64) -> Result<Self> {
        if !(omega.im > 0.0) || !omega.is_finite() {
            return Err(Error::NonPositiveImaginaryPart(omega));
        }
        Ok(Lattice { omega })
    }

    pub fn omega(&self) -> Complex64 {
        self.omega
    }

    /// Generators `(omega_1, omega_2) = (1, omega)`.
    pub fn generators(&self) -> (Complex64, Complex64) {
        (Complex64::new(1.0, 0.0), self.omega)
    }

    /// Real coordinates `(s, t)` with `z = s + t*omega`.
    pub fn coords(&self, z: Complex64) -> (f64, f64) {
        let t = z.im / self.omega.im;
        let s = z.re - t * self.omega.re;
        (s, t)
    }

    pub fn from_coords(&self, s: f64, t: f64) -> Complex64 {
        Complex64::new(s, 0.0) + self.omega * t
    }

    /// Representative of `z` in the fundamental parallelogram
    /// `I = { s + t*omega : s, t in [0,1) }`.
    pub fn reduce(&self, z: Complex64) -> Complex64 {
        let (s, t) = self.coords(z);
        let zr = self.from_coords(s - s.floor(), t - t.floor());
        // Guard against s.floor() landing exactly on 1 after roundoff.
        let (s2, t2) = self.coords(zr);
        if !(0.0..1.0).contains(&s2) || !(0.0..1.0).contains(&t2) {
            self.from_coords(s2.rem_euclid(1.0), t2.rem_euclid(1.0))
        } else {
            zr
        }
    }

    /// Representative with coordinates in `[-1/2, 1/2)`, i.e. the translate of
    /// `z` closest to the origin in lattice coordinates.
    pub fn reduce_centered(&self, z: Complex64) -> Complex64 {
        let (s, t) = self.coords(z);
        self.from_coords(s - s.round(), t - t.round())
    }

    /// Distance from `z` to the nearest lattice point.
    ///
    /// Exact for the lattices in the canonical set; for strongly sheared
    /// bases it is an upper bound tight enough for pole-exclusion tests.
    pub fn dist_to_lattice(&self, z: Complex64) -> f64 {
        let zc = self.reduce_centered(z);
        let mut best = zc.norm();
        for m in -1..=1_i32 {
            for n in -1..=1_i32 {
                let w = zc - Complex64::new(m as f64, 0.0) - self.omega * (n as f64);
                best = best.min(w.norm());
            }
        }
        best
    }

    /// Flat distance between `z` and `w` on the torus.
    pub fn torus_dist(&self, z: Complex64, w: Complex64) -> f64 {
        self.dist_to_lattice(z - w)
    }

    /// Length of the shortest nonzero lattice vector.
    pub fn min_period(&self) -> f64 {
        let mut best = f64::INFINITY;
        for m in -2..=2_i64 {
            for n in -2..=2_i64 {
                if m == 0 && n == 0 {
                    continue;
                }
                let v = Complex64::new(m as f64, 0.0) + self.omega * (n as f64);
                best = best.min(v.norm());
            }
        }
        best
    }

    /// Covolume `Im(omega)` of the fundamental parallelogram.
    pub fn covolume(&self) -> f64 {
        self.omega.im
    }
}

/// Membership test for the canonical moduli set `M`.
pub fn in_canonical_set(omega: Complex64) -> bool {
    omega.im > 0.0
        && omega.re >= -BOUNDARY_TOL
        && omega.re <= 0.5 + BOUNDARY_TOL
        && omega.norm_sqr() >= 1.0 - BOUNDARY_TOL
}

fn mat_mul(a: [[i64; 2]; 2], b: [[i64; 2]; 2]) -> [[i64; 2]; 2] {
    [
        [
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
        ],
        [
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        ],
    ]
}

pub(crate) fn moebius(m: [[i64; 2]; 2], w: Complex64) -> Complex64 {
    let num = w * (m[0][0] as f64) + Complex64::new(m[0][1] as f64, 0.0);
    let den = w * (m[1][0] as f64) + Complex64::new(m[1][1] as f64, 0.0);
    num / den
}

/// Reduce `omega` into the standard `SL2(Z)` fundamental domain
/// `|Re| <= 1/2, |omega| >= 1` and return the matrix used.
///
/// No reflection is applied, so the result may have negative real part; this
/// is the reduction used internally by the elliptic kernel, where the lattice
/// (not the class representative) is what matters.
pub(crate) fn reduce_to_fundamental(omega: Complex64) -> Result<(Complex64, [[i64; 2]; 2])> {
    if !(omega.im > 0.0) || !omega.is_finite() {
        return Err(Error::NonPositiveImaginaryPart(omega));
    }
    let mut tau = omega;
    let mut m = [[1_i64, 0], [0, 1]];
    for _ in 0..MAX_REDUCE_ITERS {
        let n = tau.re.round();
        if n != 0.0 {
            tau -= Complex64::new(n, 0.0);
            m = mat_mul([[1, -(n as i64)], [0, 1]], m);
        }
        if tau.norm_sqr() < 1.0 - BOUNDARY_TOL {
            tau = -tau.inv();
            m = mat_mul([[0, -1], [1, 0]], m);
        } else {
            return Ok((tau, m));
        }
    }
    Err(Error::ConvergenceFailure(format!(
        "modular reduction did not terminate for {omega}"
    )))
}

/// Canonicalize a Teichmueller parameter into the moduli set `M`.
///
/// Ties on the boundary are broken toward `a = 1/2` and `|omega| = 1`
/// representatives with nonnegative real part.
pub fn canonicalize(omega: Complex64) -> Result<ConformalClass> {
    let (mut tau, mut m) = reduce_to_fundamental(omega)?;
    // Prefer the a = +1/2 edge over a = -1/2.
    if tau.re < -0.5 + BOUNDARY_TOL {
        tau += Complex64::new(1.0, 0.0);
        m = mat_mul([[1, 1], [0, 1]], m);
    }
    let mut reflected = false;
    if tau.re < -BOUNDARY_TOL {
        if tau.norm_sqr() <= 1.0 + BOUNDARY_TOL {
            // On the unit arc the inversion flips the sign of the real part
            // without leaving the lattice's modular orbit.
            tau = -tau.inv();
            m = mat_mul([[0, -1], [1, 0]], m);
        } else {
            tau = Complex64::new(-tau.re, tau.im);
            reflected = true;
        }
    }
    if tau.re.abs() <= BOUNDARY_TOL {
        tau = Complex64::new(0.0, tau.im);
    }
    debug_assert!(in_canonical_set(tau), "canonicalize landed at {tau}");
    Ok(ConformalClass {
        omega: tau,
        original: omega,
        matrix: m,
        reflected,
    })
}

impl ConformalClass {
    pub fn new(omega: Complex64) -> Result<Self> {
        canonicalize(omega)
    }

    pub fn lattice(&self) -> Lattice {
        Lattice { omega: self.omega }
    }
}

/// The real-linear map `A_sigma = (e_1, sigma)` identifying the reference
/// torus `C/(Z+iZ)` with `C/(Z+sigma Z)`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct TorusMap {
    pub sigma: Complex64,
}

impl TorusMap {
    pub fn new(sigma: Complex64) -> Result<Self> {
        if !(sigma.im > 0.0) {
            return Err(Error::NonPositiveImaginaryPart(sigma));
        }
        Ok(TorusMap { sigma })
    }

    /// `A_sigma (x + i y) = x + sigma y`.
    pub fn apply(&self, z: Complex64) -> Complex64 {
        Complex64::new(z.re, 0.0) + self.sigma * z.im
    }

    pub fn apply_coords(&self, s: f64, t: f64) -> Complex64 {
        Complex64::new(s, 0.0) + self.sigma * t
    }

    pub fn inverse_apply(&self, w: Complex64) -> Complex64 {
        let y = w.im / self.sigma.im;
        let x = w.re - y * self.sigma.re;
        Complex64::new(x, y)
    }

    /// Wirtinger coefficients `(k1, k2)` with `A(z) = k1 z + k2 conj(z)`.
    pub fn wirtinger(&self) -> (Complex64, Complex64) {
        let i = Complex64::i();
        let k1 = (Complex64::new(1.0, 0.0) - i * self.sigma) * 0.5;
        let k2 = (Complex64::new(1.0, 0.0) + i * self.sigma) * 0.5;
        (k1, k2)
    }

    /// Wirtinger coefficients of the inverse map.
    pub fn wirtinger_inverse(&self) -> (Complex64, Complex64) {
        let (k1, k2) = self.wirtinger();
        // Invert z -> k1 z + k2 zbar: determinant |k1|^2 - |k2|^2.
        let det = k1.norm_sqr() - k2.norm_sqr();
        (k1.conj() / det, -k2 / det)
    }

    /// Pullback `A_sigma^* g_euc` as a constant symmetric matrix
    /// `[[E, F], [F, G]]`.
    pub fn metric(&self) -> [[f64; 2]; 2] {
        let s = self.sigma;
        [[1.0, s.re], [s.re, s.norm_sqr()]]
    }
}

/// Chart from the reference torus into `C/(Z + sigma Z)`.
///
/// `p` is a representative in `[0,1)^2`; composing with lattice reduction on
/// the target makes this lattice-periodic.
pub fn torus_chart(map: &TorusMap, p: (f64, f64)) -> Complex64 {
    map.apply_coords(p.0, p.1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn canonicalize_fixed_points() {
        let cc = canonicalize(c(0.0, 1.0)).unwrap();
        assert_abs_diff_eq!(cc.omega.re, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(cc.omega.im, 1.0, epsilon = 1e-15);

        let cc = canonicalize(c(1.0, 1.0)).unwrap();
        assert_abs_diff_eq!((cc.omega - c(0.0, 1.0)).norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn canonicalize_rejects_lower_half_plane() {
        assert!(canonicalize(c(0.3, -1.0)).is_err());
        assert!(canonicalize(c(0.3, 0.0)).is_err());
    }

    #[test]
    fn canonicalize_is_idempotent() {
        for &om in &[c(0.1, 0.2), c(-3.7, 0.9), c(0.49, 5.0), c(0.5, 0.9)] {
            let c1 = canonicalize(om).unwrap();
            let c2 = canonicalize(c1.omega).unwrap();
            assert!((c1.omega - c2.omega).norm() < 1e-12, "{om} -> {c1:?} -> {c2:?}");
        }
    }

    #[test]
    fn canonical_matrix_is_unimodular_and_consistent() {
        for &om in &[c(0.1, 0.2), c(2.3, 0.4), c(-0.3, 1.7)] {
            let cc = canonicalize(om).unwrap();
            let m = cc.matrix;
            let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
            assert_eq!(det.abs(), 1);
            let mut w = moebius(m, om);
            if cc.reflected {
                w = c(-w.re, w.im);
            }
            assert!((w - cc.omega).norm() < 1e-12);
            assert!(in_canonical_set(cc.omega));
        }
    }

    #[test]
    fn reduce_point_basics() {
        let lat = Lattice::new(c(0.0, 1.0)).unwrap();
        assert_abs_diff_eq!(lat.reduce(c(0.0, 0.0)).norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(lat.reduce(c(3.0, 5.0)).norm(), 0.0, epsilon = 1e-12);

        let lat = Lattice::new(c(0.3, 1.1)).unwrap();
        let z = c(17.23, -4.57);
        let r = lat.reduce(z);
        let (s, t) = lat.coords(r);
        assert!((0.0..1.0).contains(&s) && (0.0..1.0).contains(&t));
        // difference is a lattice vector
        let d = z - r;
        let (ds, dt) = lat.coords(d);
        assert_abs_diff_eq!(ds, ds.round(), epsilon = 1e-9);
        assert_abs_diff_eq!(dt, dt.round(), epsilon = 1e-9);
    }

    #[test]
    fn torus_chart_generators() {
        let om = c(0.3, 1.1);
        let a = TorusMap::new(om).unwrap();
        assert_abs_diff_eq!(torus_chart(&a, (0.0, 0.0)).norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!((torus_chart(&a, (1.0, 0.0)) - c(1.0, 0.0)).norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!((torus_chart(&a, (0.0, 1.0)) - om).norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn torus_map_wirtinger_roundtrip() {
        let a = TorusMap::new(c(0.4, 1.3)).unwrap();
        let (k1, k2) = a.wirtinger();
        let z = c(0.21, -0.73);
        let w = k1 * z + k2 * z.conj();
        assert!((w - a.apply(z)).norm() < 1e-14);
        let (j1, j2) = a.wirtinger_inverse();
        let back = j1 * w + j2 * w.conj();
        assert!((back - z).norm() < 1e-13);
        assert!((a.inverse_apply(w) - z).norm() < 1e-13);
    }
}
