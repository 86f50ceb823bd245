//! The double Dirichlet series
//! `D(s,w) = L(s,chi_0) + sum_{n != 0} L(s,chi_n) |n|^{-w}` assembled by two
//! independent routes, its normalization
//! `Dtilde(s,w) = 2^{w/2}/Gamma((1-w)/2) D(s,w)`, residue extraction at
//! w = 1, and the smoothed pairing against the test-vector Fourier weights.
//!
//! The continuation route in w swaps the two summations: the real-axis ideals
//! resum to `2 zeta(w) zeta(2s)` in closed form (this term carries the lone
//! w-pole in the covered region), and each off-axis orbit contributes the
//! entire function `F(x_a, w) + F(1 - x_a, w)` of the periodic zeta, giving
//!
//! ```text
//! D(s,w) = L(s,chi_0) + 2 zeta(w) zeta(2s)
//!          + sum_{reps, y >= 1} N^{-s} [F(x_a, w) + F(1-x_a, w)],
//! ```
//!
//! absolutely convergent for Re(s) > 1, Re(w) > 2 - 2 Re(s).

use crate::error::{Error, Result};
use crate::gaussian::{angle_fraction, enumerate_reps};
use crate::hecke_l::{l_completed, l_completed_table};
use crate::quadrature::contour_residue;
use crate::repn::{test_vector_fourier, fourier_main_term, tilde_prefactor, ReprParams, TestVectorSpec};
use crate::special::{periodic_zeta_even_pair, riemann_zeta};
use crate::{c64, ensure_finite, C64, KahanC64};

/// Which assembly produced an [`EvalResult`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DDSMethod {
    Direct,
    Lerch,
    Smoothed,
}

impl DDSMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            DDSMethod::Direct => "direct",
            DDSMethod::Lerch => "lerch",
            DDSMethod::Smoothed => "smoothed",
        }
    }
}

/// Evaluation parameters: the point (s, w) plus the two truncation knobs.
#[derive(Debug, Clone, Copy)]
pub struct DDSParams {
    pub s: C64,
    pub w: C64,
    /// Largest character index |n| in the direct assembly.
    pub char_cutoff: i64,
    /// Largest orbit norm in the swapped assembly.
    pub norm_cutoff: i64,
}

impl DDSParams {
    pub fn new(s: C64, w: C64, char_cutoff: i64, norm_cutoff: i64) -> Result<Self> {
        if char_cutoff < 8 {
            return Err(Error::Domain(format!(
                "char_cutoff must be >= 8, got {char_cutoff}"
            )));
        }
        if norm_cutoff < 100 {
            return Err(Error::Domain(format!(
                "norm_cutoff must be >= 100, got {norm_cutoff}"
            )));
        }
        Ok(Self { s, w, char_cutoff, norm_cutoff })
    }

    pub fn with_defaults(s: C64, w: C64) -> Self {
        Self { s, w, char_cutoff: 64, norm_cutoff: 40_000 }
    }
}

/// A D/Dtilde/V value with its error estimate and provenance.
#[derive(Debug, Clone, Copy)]
pub struct EvalResult {
    pub value: C64,
    pub err_est: f64,
    pub method: DDSMethod,
    pub params: DDSParams,
}

/// Direct assembly `L(s,chi_0) + 2 sum_{n=1}^{C} L(s,chi_n) n^{-w}` with
/// L-values from the completed route (so s may sit anywhere off the n = 0
/// poles). Requires Re(w) >= 1.1. The error estimate combines the smooth
/// axis part `2 zeta(2s) sum_{n>C} n^{-w}` with the fitted fluctuation of
/// the computed terms.
pub fn d_direct(p: &DDSParams) -> Result<EvalResult> {
    let table = l_completed_table(p.s, p.char_cutoff as usize)?;
    d_direct_with_table(p, &table)
}

/// As [`d_direct`] but reusing a precomputed table of L(s, chi_n) values for
/// n = 0..=char_cutoff.
pub fn d_direct_with_table(p: &DDSParams, table: &[C64]) -> Result<EvalResult> {
    if p.w.re < 1.1 {
        return Err(Error::Domain(format!(
            "d_direct needs Re(w) >= 1.1, got {}",
            p.w
        )));
    }
    if table.len() < p.char_cutoff as usize + 1 {
        return Err(Error::Domain("L-table shorter than char_cutoff".into()));
    }
    let mut acc = KahanC64::new();
    acc.add(table[0]);
    for n in 1..=p.char_cutoff {
        let weight = (-p.w * (n as f64).ln()).exp();
        acc.add(table[n as usize] * weight * 2.0);
    }
    let value = ensure_finite(acc.value(), "d_direct")?;

    // Tail estimate: the axis part of every L(s, chi_n) is zeta(2s), which
    // does not decay in n; its tail is the exact zeta tail. The off-axis
    // fluctuation is bounded from the computed terms.
    let z2s = riemann_zeta(2.0 * p.s)?;
    let c = p.char_cutoff as f64;
    let axis_tail = 2.0 * z2s.norm() * c.powf(1.0 - p.w.re) / (p.w.re - 1.0);
    let fluct = table
        .iter()
        .skip((p.char_cutoff as usize).saturating_sub(8))
        .map(|l| (l - z2s).norm())
        .fold(0.0f64, f64::max);
    let fluct_tail = 2.0 * fluct * c.powf(-p.w.re) * (1.0 + p.w.norm() / p.w.re);
    Ok(EvalResult {
        value,
        err_est: axis_tail + fluct_tail,
        method: DDSMethod::Direct,
        params: *p,
    })
}

/// Swapped (periodic-zeta) assembly; the meromorphic continuation of D in w
/// on Re(s) > 1, Re(w) > 2 - 2 Re(s) + 0.1, with the w = 1 pole carried by
/// the closed-form term 2 zeta(w) zeta(2s).
pub fn d_lerch(p: &DDSParams) -> Result<EvalResult> {
    let (value, err) = d_lerch_parts(p)?;
    Ok(EvalResult { value, err_est: err, method: DDSMethod::Lerch, params: *p })
}

fn d_lerch_parts(p: &DDSParams) -> Result<(C64, f64)> {
    if p.s.re <= 1.0 {
        return Err(Error::Domain(format!(
            "d_lerch needs Re(s) > 1, got {}",
            p.s
        )));
    }
    if p.w.re <= 2.0 - 2.0 * p.s.re + 0.1 - 1e-12 {
        return Err(Error::Domain(format!(
            "d_lerch needs Re(w) > 2 - 2 Re(s) + 0.1, got s={} w={}",
            p.s, p.w
        )));
    }
    if (p.w - 1.0).norm() < 1e-12 {
        return Err(Error::Pole("D(s, w) has a pole at w = 1".into()));
    }
    let l0 = l_completed(p.s, 0, None)?.value;
    let axis = 2.0 * riemann_zeta(p.w)? * riemann_zeta(2.0 * p.s)?;

    let reps = enumerate_reps(p.norm_cutoff)?;
    // Near-axis terms (x_a < 0.01) carry the largest magnitudes; accumulate
    // them separately before merging.
    let mut bulk = KahanC64::new();
    let mut near_axis = KahanC64::new();
    // Partial sums at B/4 and B/2 for a geometric tail estimate.
    let quarter = p.norm_cutoff / 4;
    let half = p.norm_cutoff / 2;
    let mut at_quarter = c64(0.0, 0.0);
    let mut at_half = c64(0.0, 0.0);
    let mut seen_quarter = false;
    let mut seen_half = false;
    for rep in &reps {
        if rep.y() == 0 {
            continue; // resummed exactly into 2 zeta(w) zeta(2s)
        }
        let n = rep.norm();
        if !seen_quarter && n > quarter {
            at_quarter = bulk.value() + near_axis.value();
            seen_quarter = true;
        }
        if !seen_half && n > half {
            at_half = bulk.value() + near_axis.value();
            seen_half = true;
        }
        let xa = angle_fraction(*rep);
        let pair = periodic_zeta_even_pair(xa, p.w)?;
        let term = (-p.s * (n as f64).ln()).exp() * pair;
        if xa < 0.01 {
            near_axis.add(term);
        } else {
            bulk.add(term);
        }
    }
    let total = bulk.value() + near_axis.value();
    let d1 = (at_half - at_quarter).norm();
    let d2 = (total - at_half).norm();
    let ratio = if d1 > 1e-300 { (d2 / d1).min(0.95) } else { 0.5 };
    let tail = d2 * ratio / (1.0 - ratio) + 1e-12 * (1.0 + total.norm());
    let value = ensure_finite(l0 + axis + total, "d_lerch")?;
    Ok((value, tail))
}

/// The normalized series Dtilde = 2^{w/2}/Gamma((1-w)/2) * D. At w = 1 the
/// prefactor zero cancels the D-pole; the finite limit is recovered from
/// two-sided evaluations at w = 1 +- h with Richardson extrapolation.
pub fn d_tilde(p: &DDSParams, method: DDSMethod) -> Result<EvalResult> {
    let eval = |w: C64| -> Result<EvalResult> {
        let q = DDSParams { w, ..*p };
        match method {
            DDSMethod::Direct => d_direct(&q),
            DDSMethod::Lerch => d_lerch(&q),
            DDSMethod::Smoothed => Err(Error::Domain(
                "d_tilde supports the direct and lerch methods".into(),
            )),
        }
    };
    if (p.w - 1.0).norm() < 1e-9 {
        // f(h) = [Dt(1+h) + Dt(1-h)]/2 = L + c h^2 + O(h^4);
        // Richardson over h in {1e-3, 5e-4}.
        let mut f = Vec::new();
        let mut err = 0.0f64;
        for &h in &[1e-3f64, 5e-4] {
            let up = eval(c64(1.0 + h, 0.0) + (p.w - 1.0))?;
            let dn = eval(c64(1.0 - h, 0.0) + (p.w - 1.0))?;
            let tu = tilde_prefactor(up.params.w) * up.value;
            let td = tilde_prefactor(dn.params.w) * dn.value;
            f.push((tu + td) * 0.5);
            err = err.max(up.err_est + dn.err_est);
        }
        let value = (f[1] * 4.0 - f[0]) / 3.0;
        let rich_err = (f[1] - f[0]).norm() / 3.0;
        return Ok(EvalResult {
            value: ensure_finite(value, "d_tilde limit")?,
            err_est: rich_err + err * 1e-3,
            method,
            params: *p,
        });
    }
    let base = eval(p.w)?;
    let pref = tilde_prefactor(p.w);
    Ok(EvalResult {
        value: ensure_finite(pref * base.value, "d_tilde")?,
        err_est: pref.norm() * base.err_est,
        method,
        params: *p,
    })
}

/// Residue of w -> D(s, w) at w = 1 by a 64-point contour integral of the
/// swapped assembly on |w - 1| = 0.1. Contract: equals 2 zeta(2s).
pub fn residue_at_w1(s: C64, norm_cutoff: i64) -> Result<C64> {
    if s.re <= 1.0 {
        return Err(Error::Domain(format!(
            "residue_at_w1 needs Re(s) > 1, got {s}"
        )));
    }
    // The only w-dependent pieces matter; L(s, chi_0) integrates to zero, but
    // evaluating it 64 times is wasteful, so assemble d_lerch once per node
    // with the shared L-value folded in.
    let l0 = l_completed(s, 0, None)?.value;
    let z2s = riemann_zeta(2.0 * s)?;
    let reps = enumerate_reps(norm_cutoff)?;
    let mut data: Vec<(f64, f64)> = Vec::new(); // (ln N, x_a)
    for rep in &reps {
        if rep.y() == 0 {
            continue;
        }
        data.push(((rep.norm() as f64).ln(), angle_fraction(*rep)));
    }
    let f = |w: C64| -> C64 {
        let axis = 2.0 * riemann_zeta(w).map(|z| z * z2s).unwrap_or(c64(f64::NAN, 0.0));
        let mut acc = KahanC64::new();
        for &(ln_n, xa) in &data {
            let pair = match periodic_zeta_even_pair(xa, w) {
                Ok(v) => v,
                Err(_) => return c64(f64::NAN, 0.0),
            };
            acc.add((-s * ln_n).exp() * pair);
        }
        l0 + axis + acc.value()
    };
    let res = contour_residue(f, c64(1.0, 0.0), 0.1, 64);
    ensure_finite(res, "residue_at_w1")
}

/// Decomposition of the smoothed value V(s, w).
#[derive(Debug, Clone, Copy)]
pub struct SmoothedDecomposition {
    /// a_0 u_hat(0) = L(s, chi_0) u_hat(0).
    pub n0_term: C64,
    /// sum over K-types 4m != 0 of a_n times the Fourier main term.
    pub main_sum: C64,
    /// sum of a_n times the remainder u_hat(n) - main(n).
    pub remainder_sum: C64,
}

/// The smoothed series `V(s,w) = sum_{n in 2Z} a_n(E(s)) u_hat_w(n)` with
/// `a_n = L(s, chi_{-n/4})` when 4 | n and zero otherwise (the arithmetic
/// index m pairs with the K-type 4m). Returns the value together with its
/// main-term/remainder decomposition.
pub fn smoothed_series_value(
    s: C64,
    w: C64,
    tv: &TestVectorSpec,
    m_max: i64,
) -> Result<(EvalResult, SmoothedDecomposition)> {
    if w.re < 1.5 {
        return Err(Error::Domain(format!(
            "smoothed_series_value needs Re(w) >= 1.5, got {w}"
        )));
    }
    if (tv.w - w).norm() > 1e-13 {
        return Err(Error::Domain(
            "test-vector spec must carry the same w".into(),
        ));
    }
    let rp = ReprParams::from_s(s);
    let uhat = test_vector_fourier(&rp, tv, 4 * m_max)?;
    let l = l_completed_table(s, m_max as usize)?;
    let mut value = KahanC64::new();
    let n0 = l[0] * uhat[&0];
    value.add(n0);
    let mut main = KahanC64::new();
    let mut rem = KahanC64::new();
    for m in 1..=m_max {
        let n = 4 * m;
        let u = uhat[&n];
        let mt = fourier_main_term(w, n);
        // K-types n and -n both contribute: a_{+-n} = L(s, chi_{-+m}) and
        // L(s, chi_m) = L(s, chi_{-m}), u_hat even.
        value.add(l[m as usize] * u * 2.0);
        main.add(l[m as usize] * mt * 2.0);
        rem.add(l[m as usize] * (u - mt) * 2.0);
    }
    // Tail: |L| ~ O(1) and u_hat(4m) ~ |c(w)| (4m)^{-Re w}.
    let cnorm = tilde_prefactor(w).norm();
    let mf = (4 * m_max) as f64;
    let tail = 3.0 * cnorm * mf.powf(1.0 - w.re) / ((w.re - 1.0) * 4.0);
    let params = DDSParams {
        s,
        w,
        char_cutoff: m_max.max(8),
        norm_cutoff: 100,
    };
    Ok((
        EvalResult {
            value: ensure_finite(value.value(), "smoothed_series_value")?,
            err_est: tail,
            method: DDSMethod::Smoothed,
            params,
        },
        SmoothedDecomposition {
            n0_term: n0,
            main_sum: main.value(),
            remainder_sum: rem.value(),
        },
    ))
}
