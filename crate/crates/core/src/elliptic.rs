//! High-accuracy evaluation of the Weierstrass functions on an arbitrary
//! lattice `Z + omega Z`.
//!
//! The kernel reduces the lattice to the modular fundamental domain
//! (`|Re tau| <= 1/2`, `|tau| >= 1`) with an `SL2(Z)` basis change and
//! rescales values back through the homogeneity relations
//! `wp(z; c L) = c^-2 wp(z/c; L)` etc. On the reduced lattice the nome
//! `Q = exp(2 pi i tau)` satisfies `|Q| <= exp(-pi sqrt(3))`, so the Fourier
//! series
//!
//! ```text
//! wp(z)  = pi^2/sin^2(pi z) - eta1 - 4 pi^2   sum_k k   (A^k + B^k)/(1 - Q^k)
//! wp'(z) = -2 pi^3 cos(pi z)/sin^3(pi z) - 8 pi^3 i sum_k k^2 (A^k - B^k)/(1 - Q^k)
//! zeta(z)=  pi cot(pi z) + eta1 z + 2 pi i    sum_k     (B^k - A^k)/(1 - Q^k)
//! ```
//!
//! with `A = exp(2 pi i (z + tau))`, `B = exp(2 pi i (tau - z))` and
//! `eta1 = pi^2/3 - 8 pi^2 sum Q^n/(1-Q^n)^2` converge geometrically once
//! `z` is reduced to `|Im z| <= Im tau / 2`. The trigonometric prefactors
//! carry the poles exactly, so accuracy is uniform up to the pole-exclusion
//! radius.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::lattice::{reduce_to_fundamental, Lattice};

/// Default relative accuracy target away from poles.
pub const DEFAULT_ACCURACY: f64 = 1e-10;
/// Default pole-exclusion radius as a fraction of the shortest period.
pub const DEFAULT_POLE_EXCLUSION: f64 = 1e-6;

/// `exp(w) - 1` without cancellation for small `w`.
pub(crate) fn cexpm1(w: Complex64) -> Complex64 {
    if w.norm() > 0.5 {
        return w.exp() - 1.0;
    }
    // e^w - 1 = w (1 + w/2 (1 + w/3 (...)))
    let mut acc = Complex64::new(0.0, 0.0);
    for k in (2..=18u32).rev() {
        acc = (acc + 1.0) * w / (k as f64);
    }
    w * (acc + 1.0)
}

/// Evaluator for `wp`, `wp'`, `zeta` and the lattice invariants.
#[derive(Debug, Clone)]
pub struct EllipticKernel {
    lattice: Lattice,
    /// Reduced modulus in the fundamental domain.
    tau: Complex64,
    /// Basis change: `[1, omega] = scale * [a - c tau, d tau - b]` lattices.
    scale: Complex64,
    /// Unimodular matrix taking `omega` to `tau`.
    basis: [[i64; 2]; 2],
    /// `exp(2 pi i tau)`.
    q: Complex64,
    /// `1/(1 - Q^k)` for `k = 1..=len`.
    inv_one_minus_qk: Vec<Complex64>,
    eta1_can: Complex64,
    eta2_can: Complex64,
    g2_can: Complex64,
    g2: Complex64,
    g3: Complex64,
    eta1: Complex64,
    eta2: Complex64,
    min_period: f64,
    pole_exclusion: f64,
    accuracy: f64,
}

impl EllipticKernel {
    pub fn new(omega: Complex64) -> Result<Self> {
        let lattice = Lattice::new(omega)?;
        let (tau, m) = reduce_to_fundamental(omega)?;
        let scale = omega * (m[1][0] as f64) + Complex64::new(m[1][1] as f64, 0.0);

        let q = (Complex64::new(0.0, 2.0 * PI) * tau).exp();
        let qn = q.norm();
        // |A^k|, |B^k| <= |Q|^(k/2); pick len so the tail is below 1e-18.
        let len = ((2.0 * 18.0 * std::f64::consts::LN_10 / -qn.ln()).ceil() as usize)
            .clamp(8, 96);

        let mut inv_one_minus_qk = Vec::with_capacity(len);
        let mut qk = Complex64::new(1.0, 0.0);
        for _ in 0..len {
            qk *= q;
            inv_one_minus_qk.push((Complex64::new(1.0, 0.0) - qk).inv());
        }

        // eta1 = pi^2/3 - 8 pi^2 sum Q^n/(1-Q^n)^2
        let mut s_eta = Complex64::new(0.0, 0.0);
        let mut s_e4 = Complex64::new(0.0, 0.0);
        let mut s_e6 = Complex64::new(0.0, 0.0);
        qk = Complex64::new(1.0, 0.0);
        for n in 1..=len {
            qk *= q;
            let inv = inv_one_minus_qk[n - 1];
            let base = qk * inv;
            s_eta += base * inv;
            let n2 = (n * n) as f64;
            s_e4 += base * n2 * (n as f64);
            s_e6 += base * n2 * n2 * (n as f64);
        }
        let pi2 = PI * PI;
        let eta1_can = pi2 / 3.0 - 8.0 * pi2 * s_eta;
        let eta2_can = eta1_can * tau - Complex64::new(0.0, 2.0 * PI);
        let e4 = Complex64::new(1.0, 0.0) + 240.0 * s_e4;
        let e6 = Complex64::new(1.0, 0.0) - 504.0 * s_e6;
        let g2_can = e4 * (4.0 * pi2 * pi2 / 3.0);
        let g3_can = e6 * (8.0 * pi2 * pi2 * pi2 / 27.0);

        let s2 = scale * scale;
        let s4 = s2 * s2;
        let g2 = g2_can / s4;
        let g3 = g3_can / (s4 * s2);
        // Quasi-periods of the original generators: 1/scale = a - c tau and
        // omega/scale = d tau - b in the reduced basis.
        let (a, b, c, d) = (m[0][0] as f64, m[0][1] as f64, m[1][0] as f64, m[1][1] as f64);
        let eta1 = (eta1_can * a - eta2_can * c) / scale;
        let eta2 = (eta2_can * d - eta1_can * b) / scale;

        let min_period = scale.norm();
        Ok(EllipticKernel {
            lattice,
            tau,
            scale,
            basis: m,
            q,
            inv_one_minus_qk,
            eta1_can,
            eta2_can,
            g2_can,
            g2,
            g3,
            eta1,
            eta2,
            min_period,
            pole_exclusion: DEFAULT_POLE_EXCLUSION * min_period,
            accuracy: DEFAULT_ACCURACY,
        })
    }

    pub fn with_pole_exclusion(mut self, radius: f64) -> Self {
        self.pole_exclusion = radius;
        self
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn omega(&self) -> Complex64 {
        self.lattice.omega()
    }

    /// Invariants `(g2, g3)` of the lattice.
    pub fn invariants(&self) -> (Complex64, Complex64) {
        (self.g2, self.g3)
    }

    /// Additive quasi-periods of `zeta` along the generators `(1, omega)`.
    pub fn quasi_periods(&self) -> (Complex64, Complex64) {
        (self.eta1, self.eta2)
    }

    /// Length of the shortest nonzero lattice vector.
    pub fn min_period(&self) -> f64 {
        self.min_period
    }

    pub fn pole_exclusion(&self) -> f64 {
        self.pole_exclusion
    }

    pub fn accuracy(&self) -> f64 {
        self.accuracy
    }

    /// `wp` at the three nonzero half-periods: `(e1, e2, e3)` at
    /// `1/2, (1+omega)/2, omega/2`.
    pub fn half_period_values(&self) -> (Complex64, Complex64, Complex64) {
        let om = self.omega();
        let e1 = self.wp_unchecked(Complex64::new(0.5, 0.0));
        let e2 = self.wp_unchecked((Complex64::new(1.0, 0.0) + om) * 0.5);
        let e3 = self.wp_unchecked(om * 0.5);
        (e1, e2, e3)
    }

    fn check_pole(&self, z: Complex64) -> Result<()> {
        let d = self.lattice.dist_to_lattice(z);
        if d < self.pole_exclusion {
            Err(Error::PoleAtInput { z, radius: self.pole_exclusion })
        } else {
            Ok(())
        }
    }

    pub fn wp(&self, z: Complex64) -> Result<Complex64> {
        self.check_pole(z)?;
        Ok(self.wp_unchecked(z))
    }

    pub fn wp_prime(&self, z: Complex64) -> Result<Complex64> {
        self.check_pole(z)?;
        Ok(self.wp_prime_unchecked(z))
    }

    pub fn zeta(&self, z: Complex64) -> Result<Complex64> {
        self.check_pole(z)?;
        Ok(self.zeta_unchecked(z))
    }

    /// `(zeta, wp, wp')` in one reduction; the workhorse for block evaluation.
    pub fn zpw(&self, z: Complex64) -> Result<(Complex64, Complex64, Complex64)> {
        self.check_pole(z)?;
        Ok(self.zpw_unchecked(z))
    }

    /// `wp''` via `6 wp^2 - g2/2`.
    pub fn wp_second(&self, z: Complex64) -> Result<Complex64> {
        let p = self.wp(z)?;
        Ok(p * p * 6.0 - self.g2 * 0.5)
    }

    pub fn wp_unchecked(&self, z: Complex64) -> Complex64 {
        let zc = z / self.scale;
        let (z0, _, _) = self.reduce_canonical(zc);
        let core = self.canonical_core(z0);
        core.wp / (self.scale * self.scale)
    }

    pub fn wp_prime_unchecked(&self, z: Complex64) -> Complex64 {
        let zc = z / self.scale;
        let (z0, _, _) = self.reduce_canonical(zc);
        let core = self.canonical_core(z0);
        core.wpp / (self.scale * self.scale * self.scale)
    }

    pub fn zeta_unchecked(&self, z: Complex64) -> Complex64 {
        let zc = z / self.scale;
        let (z0, m, n) = self.reduce_canonical(zc);
        let core = self.canonical_core(z0);
        (core.zeta + self.eta1_can * (m as f64) + self.eta2_can * (n as f64)) / self.scale
    }

    pub fn zpw_unchecked(&self, z: Complex64) -> (Complex64, Complex64, Complex64) {
        let zc = z / self.scale;
        let (z0, m, n) = self.reduce_canonical(zc);
        let core = self.canonical_core(z0);
        let s = self.scale;
        let s2 = s * s;
        (
            (core.zeta + self.eta1_can * (m as f64) + self.eta2_can * (n as f64)) / s,
            core.wp / s2,
            core.wpp / (s2 * s),
        )
    }

    /// Reduce a point in canonical coordinates to `|s|, |t| <= 1/2` and
    /// return the integer shifts removed.
    fn reduce_canonical(&self, z: Complex64) -> (Complex64, i64, i64) {
        let t = z.im / self.tau.im;
        let n = t.round();
        let s = z.re - t * self.tau.re;
        let m = s.round();
        (z - Complex64::new(m, 0.0) - self.tau * n, m as i64, n as i64)
    }

    fn canonical_core(&self, z0: Complex64) -> CoreValues {
        // Stable cot(pi z) and 1/sin^2(pi z) through expm1 on the side of the
        // real axis where the exponential stays bounded.
        let two_pi_i = Complex64::new(0.0, 2.0 * PI);
        let (cot, inv_sin2) = if z0.im >= 0.0 {
            let e = cexpm1(two_pi_i * z0);
            let cot = Complex64::i() * (e + 2.0) / e;
            let inv_sin2 = -4.0 * (e + 1.0) / (e * e);
            (cot, inv_sin2)
        } else {
            let e = cexpm1(-two_pi_i * z0);
            let cot = -Complex64::i() * (e + 2.0) / e;
            let inv_sin2 = -4.0 * (e + 1.0) / (e * e);
            (cot, inv_sin2)
        };

        let a = (two_pi_i * (z0 + self.tau)).exp();
        let b = (two_pi_i * (self.tau - z0)).exp();
        let mut ak = Complex64::new(1.0, 0.0);
        let mut bk = Complex64::new(1.0, 0.0);
        let mut s_zeta = Complex64::new(0.0, 0.0);
        let mut s_wp = Complex64::new(0.0, 0.0);
        let mut s_wpp = Complex64::new(0.0, 0.0);
        for (k, inv) in self.inv_one_minus_qk.iter().enumerate() {
            ak *= a;
            bk *= b;
            let kf = (k + 1) as f64;
            s_zeta += (bk - ak) * inv;
            s_wp += (ak + bk) * (kf * inv);
            s_wpp += (ak - bk) * (kf * kf * inv);
            if ak.norm_sqr() + bk.norm_sqr() < 1e-72 {
                break;
            }
        }
        let pi2 = PI * PI;
        CoreValues {
            zeta: PI * cot + self.eta1_can * z0 + two_pi_i * s_zeta,
            wp: pi2 * inv_sin2 - self.eta1_can - 4.0 * pi2 * s_wp,
            wpp: -2.0 * pi2 * PI * cot * inv_sin2 - Complex64::new(0.0, 8.0 * pi2 * PI) * s_wpp,
        }
    }
}

struct CoreValues {
    zeta: Complex64,
    wp: Complex64,
    wpp: Complex64,
}
