//! Classical normalized Eisenstein series for PGL2(Z),
//! `E_s(z) = sum_{(c,d) != 0} y^s / |c z + d|^{2s}`: truncated lattice
//! summation with a tail bound, an exponentially convergent incomplete-gamma
//! split of the same sum, Hecke-eigenvalue verification, circle-mode
//! extraction around z = i, spherical matrix coefficients, and the
//! normalization-free ratio checks of the torus-period formula.

use crate::error::{Error, Result};
use crate::hecke_l::l_completed;
use crate::repn::{rotation, Mat2};
use crate::special::{log_gamma, upper_incomplete_gamma};
use crate::{c64, ensure_finite, C64, KahanC64};

/// A point x + iy of the upper half plane (y > 0).
#[derive(Debug, Clone, Copy)]
pub struct UpperHalfPoint {
    pub x: f64,
    pub y: f64,
}

impl UpperHalfPoint {
    pub fn new(x: f64, y: f64) -> Result<Self> {
        if y > 0.0 && x.is_finite() && y.is_finite() {
            Ok(Self { x, y })
        } else {
            Err(Error::Domain(format!("not an upper-half-plane point: {x} + {y} i")))
        }
    }
}

/// Moebius action of a real 2x2 matrix with positive determinant.
pub fn moebius(g: Mat2, z: UpperHalfPoint) -> Result<UpperHalfPoint> {
    let num = c64(g[0][0] * z.x + g[0][1], g[0][0] * z.y);
    let den = c64(g[1][0] * z.x + g[1][1], g[1][0] * z.y);
    let w = num / den;
    UpperHalfPoint::new(w.re, w.im)
}

/// One extracted circle mode around z = i.
#[derive(Debug, Clone, Copy)]
pub struct ModeResult {
    /// Arithmetic index; the K-type of the mode is 4m.
    pub m: i64,
    pub c_m: C64,
    pub s: C64,
    pub r: f64,
}

/// Smallest eigenvalue of the quadratic form (c,d) -> |c z + d|^2.
fn form_min_eigenvalue(z: UpperHalfPoint) -> f64 {
    let a = z.x * z.x + z.y * z.y;
    let tr = a + 1.0;
    let det = z.y * z.y;
    0.5 * (tr - (tr * tr - 4.0 * det).sqrt())
}

/// Compensated lattice sum over max(|c|, |d|) <= M in expanding shells.
/// Returns the value and the attached tail bound
/// `8 y^Re(s) lambda_min^{-Re(s)} M^{2-2Re(s)} / (2Re(s)-2)`.
pub fn eisenstein_value(s: C64, z: UpperHalfPoint, m: i64) -> Result<(C64, f64)> {
    if s.re < 1.2 {
        return Err(Error::Domain(format!(
            "eisenstein_value needs Re(s) >= 1.2, got {s}"
        )));
    }
    if !(1..=100_000).contains(&m) {
        return Err(Error::Convergence(format!(
            "lattice cutoff must lie in 1..=1e5, got {m}"
        )));
    }
    let ln_y = z.y.ln();
    let mut acc = KahanC64::new();
    for k in 1..=m {
        // boundary of the square max(|c|,|d|) = k, fixed traversal order
        let mut shell = KahanC64::new();
        let mut add = |c: i64, d: i64| {
            let q = {
                let t = c as f64 * z.x + d as f64;
                t * t + (c as f64 * z.y) * (c as f64 * z.y)
            };
            shell.add((s * ln_y - s * q.ln()).exp());
        };
        for d in -k..=k {
            add(k, d);
            add(-k, d);
        }
        for c in (-k + 1)..=(k - 1) {
            add(c, k);
            add(c, -k);
        }
        acc.add(shell.value());
    }
    let lam = form_min_eigenvalue(z);
    let tail = 8.0 * z.y.powf(s.re) * lam.powf(-s.re) * (m as f64).powf(2.0 - 2.0 * s.re)
        / (2.0 * s.re - 2.0);
    Ok((ensure_finite(acc.value(), "eisenstein_value")?, tail))
}

/// The same Eisenstein series through the incomplete-gamma split of the
/// underlying binary quadratic form Q_z(c,d) = |c z + d|^2 / y (determinant
/// one, self-dual value multiset):
///
/// ```text
/// pi^{-s} Gamma(s) E_s(z) = sum_{v != 0} [ (pi Q)^{-s} Gamma(s, pi Q)
///                                        + (pi Q)^{s-1} Gamma(1-s, pi Q) ]
///                           + 1/(s-1) - 1/s .
/// ```
///
/// Exponentially convergent and valid for all s off {0, 1}; used internally
/// wherever the polynomially decaying lattice tail cannot reach the required
/// accuracy.
pub fn eisenstein_theta(s: C64, z: UpperHalfPoint) -> Result<C64> {
    if (s - 1.0).norm() < 1e-12 || s.norm() < 1e-12 {
        return Err(Error::Pole(format!("E_s pole at s = {s}")));
    }
    // Cutoff: pi R - max(Re s, 1-Re s, 1) ln(pi R) >= 34.
    let a = s.re.max(1.0 - s.re).max(1.0);
    let mut r = 14.0f64;
    for _ in 0..30 {
        let need = (34.0 + a * (std::f64::consts::PI * r).ln()) / std::f64::consts::PI;
        if need <= r {
            break;
        }
        r = need;
    }
    let one = c64(1.0, 0.0);
    let mut acc = KahanC64::new();
    let cmax = (r / z.y).sqrt().floor() as i64;
    for c in -cmax..=cmax {
        let cy2 = (c as f64 * z.y) * (c as f64 * z.y);
        let span = (r * z.y - cy2).max(0.0).sqrt();
        let lo = (-(c as f64) * z.x - span).ceil() as i64;
        let hi = (-(c as f64) * z.x + span).floor() as i64;
        for d in lo..=hi {
            if c == 0 && d == 0 {
                continue;
            }
            let t = c as f64 * z.x + d as f64;
            let q = (t * t + cy2) / z.y;
            let x = std::f64::consts::PI * q;
            if x <= 0.0 {
                continue;
            }
            let g1 = upper_incomplete_gamma(s, x)? * (-s * x.ln()).exp();
            let g2 = upper_incomplete_gamma(one - s, x)? * ((s - 1.0) * x.ln()).exp();
            acc.add(g1 + g2);
        }
    }
    let body = acc.value() + (s - 1.0).inv() - s.inv();
    let pref = (s * std::f64::consts::PI.ln() - log_gamma(s)?).exp();
    ensure_finite(pref * body, "eisenstein_theta")
}

/// Relative Hecke defect
/// `|p^{-1/2} sum_i E_s(gamma_i z) - lambda_p(s) E_s(z)| / |lambda_p(s) E_s(z)|`
/// with the coset maps z -> (z+i)/p (0 <= i < p) and z -> p z.
pub fn hecke_eigen_check(s: C64, p: i64, z: UpperHalfPoint) -> Result<f64> {
    if s.re < 1.2 {
        return Err(Error::Domain(format!(
            "hecke_eigen_check needs Re(s) >= 1.2, got {s}"
        )));
    }
    if !crate::repn::HECKE_PRIMES.contains(&p) {
        return Err(Error::Domain(format!("unsupported prime {p}")));
    }
    let mut acc = c64(0.0, 0.0);
    for i in 0..p {
        let zi = UpperHalfPoint::new((z.x + i as f64) / p as f64, z.y / p as f64)?;
        acc += eisenstein_theta(s, zi)?;
    }
    let zp = UpperHalfPoint::new(z.x * p as f64, z.y * p as f64)?;
    acc += eisenstein_theta(s, zp)?;
    acc /= (p as f64).sqrt();
    let rhs = crate::repn::lambda_p(s, p) * eisenstein_theta(s, z)?;
    Ok((acc - rhs).norm() / rhs.norm())
}

/// Geodesic-circle point z(phi, r) = k_phi . (e^r i).
pub fn circle_point(phi: f64, r: f64) -> Result<UpperHalfPoint> {
    moebius(rotation(phi), UpperHalfPoint::new(0.0, r.exp())?)
}

/// Extracts the K-type-k Fourier mode of E_s along the geodesic circle of
/// radius r about i: `(1/pi) int_0^pi E_s(z(phi, r)) e^{-i k phi} d phi` by
/// the trapezoid rule with q nodes (spectrally accurate).
pub fn circle_mode_ktype(s: C64, r: f64, ktype: i64, q: usize) -> Result<C64> {
    if s.re < 1.2 {
        return Err(Error::Domain(format!(
            "circle modes need Re(s) >= 1.2, got {s}"
        )));
    }
    if !(r > 0.0 && r <= 1.5) {
        return Err(Error::Domain(format!("circle radius must lie in (0, 1.5], got {r}")));
    }
    if q < 256 {
        return Err(Error::Domain(format!("need at least 256 quadrature nodes, got {q}")));
    }
    let mut acc = KahanC64::new();
    for j in 0..q {
        let phi = std::f64::consts::PI * j as f64 / q as f64;
        let e = eisenstein_theta(s, circle_point(phi, r)?)?;
        acc.add(e * (c64(0.0, -(ktype as f64) * phi)).exp());
    }
    Ok(acc.value() / q as f64)
}

/// The arithmetic mode c_m (K-type 4m).
pub fn circle_fourier_mode(s: C64, r: f64, m: i64, q: usize) -> Result<ModeResult> {
    let c_m = circle_mode_ktype(s, r, 4 * m, q)?;
    Ok(ModeResult { m, c_m, s, r })
}

/// Spherical matrix coefficient in the circle model,
/// `F_tau(n, a_r) = (1/2 pi) int_0^{2 pi} (pi_tau(a_r) 1)(theta) e^{-i n theta} d theta`
/// with a_r = diag(e^{r/2}, e^{-r/2}); the integrand is the classical
/// `(cosh r - sinh r cos 2 theta)^{(tau-1)/2}`. This fixes the normalization
/// of all mode coefficients used by the period checks.
pub fn matrix_coeff(tau: C64, n: i64, r: f64) -> Result<C64> {
    if n % 2 != 0 {
        return Err(Error::Domain(format!("K-types of PGL2 are even, got n = {n}")));
    }
    if r < 0.0 {
        return Err(Error::Domain(format!("need r >= 0, got {r}")));
    }
    let q = 4096usize;
    let (ch, sh) = (r.cosh(), r.sinh());
    let mut acc = KahanC64::new();
    for j in 0..q {
        let th = 2.0 * std::f64::consts::PI * j as f64 / q as f64;
        let base = ch - sh * (2.0 * th).cos();
        let v = ((tau - 1.0) * 0.5 * base.ln()).exp();
        acc.add(v * (c64(0.0, -(n as f64) * th)).exp());
    }
    Ok(acc.value() / q as f64)
}

/// Outcome of the two normalization-free torus-period checks.
#[derive(Debug, Clone, Copy)]
pub struct PeriodReport {
    /// | c_m/c_m2 / [L_m F(4m)] * [L_m2 F(4m2)] - 1 |
    pub ratio_a_defect: f64,
    /// | [c_m(r)/F_r(4m)] / [c_m(r2)/F_r2(4m)] - 1 |
    pub ratio_b_defect: f64,
    /// Largest extracted mode of K-type 2 mod 4 (elliptic-point vanishing).
    pub elliptic_max: f64,
    pub pass_a: bool,
    pub pass_b: bool,
    pub pass_elliptic: bool,
}

/// Verifies the torus-period structure of E_s around i in ratio form:
/// (a) c_m / c_m2 = [L(s,chi_m) F_tau(4m, a_r)] / [L(s,chi_m2) F_tau(4m2, a_r)];
/// (b) c_m(r) / F_tau(4m, a_r) is independent of r.
pub fn verify_period_formula(
    s: C64,
    r: f64,
    r2: f64,
    m: i64,
    m2: i64,
) -> Result<PeriodReport> {
    if !(1..=3).contains(&m) || !(1..=3).contains(&m2) {
        return Err(Error::Domain("mode indices must lie in 1..=3".into()));
    }
    if !(1.2..=2.0).contains(&s.re) {
        return Err(Error::Domain(format!(
            "period checks need Re(s) in [1.2, 2], got {s}"
        )));
    }
    if !(0.3..=0.8).contains(&r) || !(0.3..=0.8).contains(&r2) {
        return Err(Error::Domain(format!(
            "circle radii must lie in [0.3, 0.8], got {r}, {r2}"
        )));
    }
    let q = 512usize;
    let tau = c64(1.0, 0.0) - 2.0 * s;
    let cm_r = circle_fourier_mode(s, r, m, q)?.c_m;
    let cm2_r = circle_fourier_mode(s, r, m2, q)?.c_m;
    let cm_r2 = circle_fourier_mode(s, r2, m, q)?.c_m;
    let f_m_r = matrix_coeff(tau, 4 * m, r)?;
    let f_m2_r = matrix_coeff(tau, 4 * m2, r)?;
    let f_m_r2 = matrix_coeff(tau, 4 * m, r2)?;
    let l_m = l_completed(s, m, None)?.value;
    let l_m2 = l_completed(s, m2, None)?.value;

    let lhs_a = cm_r / cm2_r;
    let rhs_a = (l_m * f_m_r) / (l_m2 * f_m2_r);
    let ratio_a_defect = (lhs_a / rhs_a - 1.0).norm();

    let lhs_b = (cm_r / f_m_r) / (cm_r2 / f_m_r2);
    let ratio_b_defect = (lhs_b - 1.0).norm();

    let mut elliptic_max = 0.0f64;
    for &k in &[2i64, 6] {
        elliptic_max = elliptic_max.max(circle_mode_ktype(s, r, k, q)?.norm());
    }
    Ok(PeriodReport {
        ratio_a_defect,
        ratio_b_defect,
        elliptic_max,
        pass_a: ratio_a_defect <= 1e-3,
        pass_b: ratio_b_defect <= 1e-3,
        pass_elliptic: elliptic_max <= 1e-8,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::repn::{act_point, lambda_p, ReprParams};

    const PI: f64 = std::f64::consts::PI;

    #[test]
    fn lattice_value_at_i_is_four_zeta_k() {
        // E_2(i) = sum (c^2+d^2)^{-2} = 4 zeta_K(2).
        let z = UpperHalfPoint::new(0.0, 1.0).unwrap();
        let (v, tail) = eisenstein_value(c64(2.0, 0.0), z, 2000).unwrap();
        let zk2 = l_completed(c64(2.0, 0.0), 0, None).unwrap().value;
        assert!((v - zk2 * 4.0).norm() <= tail + 1e-9, "v={v} want={}", zk2 * 4.0);
        // the theta route reaches far higher accuracy
        let vt = eisenstein_theta(c64(2.0, 0.0), z).unwrap();
        assert!((vt - zk2 * 4.0).norm() < 1e-10, "vt={vt}");
    }

    #[test]
    fn theta_route_matches_lattice_route() {
        let z = UpperHalfPoint::new(0.3, 1.2).unwrap();
        for &s in &[c64(1.5, 0.0), c64(2.0, 0.0), c64(1.3, 2.0)] {
            let (v, tail) = eisenstein_value(s, z, 800).unwrap();
            let vt = eisenstein_theta(s, z).unwrap();
            assert!(
                (v - vt).norm() <= tail,
                "s={s}: lattice {v}, theta {vt}, tail {tail}"
            );
        }
    }

    #[test]
    fn modular_invariance() {
        let s = c64(1.5, 0.0);
        let z = UpperHalfPoint::new(0.3, 1.2).unwrap();
        let z1 = UpperHalfPoint::new(z.x + 1.0, z.y).unwrap();
        // -1/z
        let d = z.x * z.x + z.y * z.y;
        let zs = UpperHalfPoint::new(-z.x / d, z.y / d).unwrap();
        let a = eisenstein_theta(s, z).unwrap();
        assert!((eisenstein_theta(s, z1).unwrap() - a).norm() < 1e-8 * a.norm());
        assert!((eisenstein_theta(s, zs).unwrap() - a).norm() < 1e-8 * a.norm());
    }

    #[test]
    fn lattice_value_against_independent_shell_sum() {
        // Same truncation region, independent accumulation order.
        let s = c64(1.3, 0.0);
        let z = UpperHalfPoint::new(0.1, 0.7).unwrap();
        let m = 400i64;
        let mut brute = KahanC64::new();
        for c in -m..=m {
            for d in -m..=m {
                if c == 0 && d == 0 {
                    continue;
                }
                if c.abs().max(d.abs()) > m {
                    continue;
                }
                let t = c as f64 * z.x + d as f64;
                let q = t * t + (c as f64 * z.y) * (c as f64 * z.y);
                brute.add((s * z.y.ln() - s * q.ln()).exp());
            }
        }
        let (v, _) = eisenstein_value(s, z, m).unwrap();
        assert!((v - brute.value()).norm() < 1e-11);
    }

    #[test]
    fn hecke_eigenvalue_defect() {
        let z = UpperHalfPoint::new(0.3, 1.2).unwrap();
        let d = hecke_eigen_check(c64(1.4, 0.0), 2, z).unwrap();
        assert!(d < 1e-6, "defect={d}");
        let zi = UpperHalfPoint::new(0.0, 1.0).unwrap();
        let d = hecke_eigen_check(c64(2.0, 0.0), 3, zi).unwrap();
        assert!(d < 1e-6, "defect={d}");
        // lambda_p(s) = lambda_p(1-s) so the defect is insensitive to the swap
        let s = c64(1.4, 0.0);
        let a = lambda_p(s, 5);
        let b = lambda_p(c64(1.0, 0.0) - s, 5);
        assert!((a - b).norm() < 1e-14);
    }

    #[test]
    fn elliptic_point_kills_2_mod_4_modes() {
        let s = c64(1.5, 0.0);
        for &k in &[2i64, 6, -2] {
            let c = circle_mode_ktype(s, 0.4, k, 512).unwrap();
            assert!(c.norm() < 1e-8, "k={k}: {}", c.norm());
        }
    }

    #[test]
    fn mode_c0_converges_to_point_value() {
        let s = c64(1.5, 0.0);
        let e_i = eisenstein_theta(s, UpperHalfPoint::new(0.0, 1.0).unwrap()).unwrap();
        let c0 = circle_mode_ktype(s, 0.05, 0, 512).unwrap();
        assert!((c0 / e_i - 1.0).norm() < 1e-2, "c0={c0} E(i)={e_i}");
        let c0_closer = circle_mode_ktype(s, 0.02, 0, 512).unwrap();
        assert!((c0_closer / e_i - 1.0).norm() < (c0 / e_i - 1.0).norm());
    }

    #[test]
    fn matrix_coeff_normalization() {
        // At r = 0 the integrand is 1: F(0, e) = 1, F(n != 0, e) = 0.
        for &tau in &[c64(0.0, 0.0), c64(-1.6, 0.0), c64(0.3, 0.8)] {
            assert!((matrix_coeff(tau, 0, 0.0).unwrap() - 1.0).norm() < 1e-13);
            assert!(matrix_coeff(tau, 4, 0.0).unwrap().norm() < 1e-13);
        }
        assert!(matrix_coeff(c64(0.0, 0.0), 3, 0.5).is_err());
        // Evenness in n.
        let tau = c64(-1.6, 0.0);
        let a = matrix_coeff(tau, 4, 0.7).unwrap();
        let b = matrix_coeff(tau, -4, 0.7).unwrap();
        assert!((a - b).norm() < 1e-10);
        // tau = 0, r = 1 spot value against an independent quadrature
        // (tanh-sinh on the half period; the integrand is even about 0 and
        // pi). Frozen classical value of
        // (1/2pi) int (cosh 1 - sinh 1 cos 2 th)^{-1/2} d th.
        let (o, _) = crate::quadrature::tanh_sinh(
            |th| {
                let base = 1.0f64.cosh() - 1.0f64.sinh() * (2.0 * th).cos();
                c64(base.powf(-0.5), 0.0)
            },
            0.0,
            PI,
            1e-13,
        );
        let oracle = o / PI;
        let got = matrix_coeff(c64(0.0, 0.0), 0, 1.0).unwrap();
        assert!((got - oracle).norm() < 1e-11, "got={got} oracle={oracle}");
        let frozen = 0.9408621592493498;
        assert!((got.re - frozen).abs() < 1e-10, "got={got}");
    }

    #[test]
    fn period_formula_ratios() {
        let rep = verify_period_formula(c64(1.3, 0.0), 0.4, 0.6, 1, 2).unwrap();
        assert!(rep.pass_a, "ratio (a) defect {}", rep.ratio_a_defect);
        assert!(rep.pass_b, "ratio (b) defect {}", rep.ratio_b_defect);
        assert!(rep.pass_elliptic, "elliptic max {}", rep.elliptic_max);
        // degenerate input: both ratios are exactly 1
        let rep = verify_period_formula(c64(1.3, 0.0), 0.4, 0.4, 2, 2).unwrap();
        assert!(rep.ratio_a_defect < 1e-12);
        assert!(rep.ratio_b_defect < 1e-12);
    }

    #[test]
    fn conjugate_mode_symmetry() {
        // c_{-m} = conj(c_m) for real s.
        let s = c64(1.4, 0.0);
        let a = circle_fourier_mode(s, 0.4, 1, 512).unwrap().c_m;
        let b = circle_fourier_mode(s, 0.4, -1, 512).unwrap().c_m;
        assert!((b - a.conj()).norm() < 1e-10 * (1.0 + a.norm()));
    }

    #[test]
    fn whole_expansion_l2_consistency() {
        // Reconstruct E on the circle from modes |m| <= 3; the residual L2
        // energy must be controlled by the discarded tail (estimated from
        // c_4, c_5 with a geometric cushion).
        let s = c64(1.5, 0.0);
        let r = 0.4f64;
        let q = 512usize;
        let mut modes = Vec::new();
        for m in -5i64..=5 {
            modes.push((m, circle_mode_ktype(s, r, 4 * m, q).unwrap()));
        }
        let mut resid_sq = 0.0f64;
        for j in 0..q {
            let phi = PI * j as f64 / q as f64;
            let e = eisenstein_theta(s, circle_point(phi, r).unwrap()).unwrap();
            let mut rec = c64(0.0, 0.0);
            for &(m, c) in modes.iter().filter(|(m, _)| m.abs() <= 3) {
                rec += c * (c64(0.0, 4.0 * m as f64 * phi)).exp();
            }
            resid_sq += (e - rec).norm_sqr();
        }
        resid_sq /= q as f64;
        let tail_energy: f64 = modes
            .iter()
            .filter(|(m, _)| m.abs() > 3)
            .map(|(_, c)| c.norm_sqr())
            .sum();
        // allow a geometric factor for modes beyond |m| = 5
        assert!(
            resid_sq <= 4.0 * tail_energy + 1e-16,
            "residual {resid_sq} vs tail {tail_energy}"
        );
    }

    #[test]
    fn act_point_consistency_with_spherical_integrand() {
        // The matrix_coeff integrand is exactly (pi(a_r) 1)(theta).
        let tau = c64(-1.6, 0.0);
        let rp = ReprParams::new(tau);
        let r = 0.7f64;
        let g = crate::repn::diag((r / 2.0).exp(), (-r / 2.0).exp());
        for &th in &[0.2f64, 1.0, 2.5] {
            let v = act_point(&rp, g, |_| c64(1.0, 0.0), th).unwrap();
            let want = ((tau - 1.0) * 0.5 * (r.cosh() - r.sinh() * (2.0 * th).cos()).ln()).exp();
            assert!((v - want).norm() < 1e-12);
        }
    }
}
