//! Numerical engine for unramified Hecke Grossencharacter L-functions of the
//! Gauss field Q(i), the double Dirichlet series
//!
//! ```text
//! D(s,w) = L(s,chi_0) + sum_{n != 0} L(s,chi_n) |n|^{-w},
//! ```
//!
//! its normalization `Dtilde(s,w) = 2^{w/2} / Gamma((1-w)/2) * D(s,w)`, and the
//! representation-theoretic machinery that underpins the continuation of
//! `Dtilde` in `w`: the circle model of the principal series of PGL2(R), the
//! localized test vector `u_w`, Hecke operators, and classical Eisenstein
//! series together with their torus periods around `z = i`.
//!
//! All arithmetic is IEEE-754 binary64. Operations are pure and reentrant;
//! summations use compensated accumulation in a fixed order so repeated runs
//! are bit-identical.
//!
//! ```
//! use dds_core::{c64, hecke_l::l_completed, special::riemann_zeta};
//!
//! // zeta_K(2) = zeta(2) * beta(2) for the Gauss field
//! let zk2 = l_completed(c64(2.0, 0.0), 0, None).unwrap().value;
//! assert!((zk2.re - 1.5067030099229851).abs() < 1e-10);
//!
//! // and the Riemann factor on its own
//! let z2 = riemann_zeta(c64(2.0, 0.0)).unwrap();
//! assert!((z2.re - std::f64::consts::PI.powi(2) / 6.0).abs() < 1e-12);
//! ```

pub mod dds;
pub mod eisenstein;
pub mod error;
pub mod gaussian;
pub mod hecke_l;
pub mod quadrature;
pub mod repn;
pub mod special;
pub mod verify;

pub use error::{Error, Result};

/// The universal scalar: a complex number with binary64 components.
pub type C64 = num_complex::Complex<f64>;

/// Shorthand constructor for [`C64`].
#[inline]
pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Checks that both components of `z` are finite, otherwise reports `ctx`.
#[inline]
pub(crate) fn ensure_finite(z: C64, ctx: &str) -> Result<C64> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(z)
    } else {
        Err(Error::NonFinite(ctx.to_string()))
    }
}

/// Compensated (Kahan) accumulator for complex values.
///
/// Used everywhere a sum has a contractually fixed order; keeps rounding
/// error independent of the number of terms.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanC64 {
    sum: C64,
    comp: C64,
}

impl KahanC64 {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, term: C64) {
        let y = term - self.comp;
        let t = self.sum + y;
        self.comp = (t - self.sum) - y;
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> C64 {
        self.sum
    }
}
