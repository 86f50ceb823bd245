//! Cross-module consistency: identities that tie the character-side and
//! orbit-side assemblies together through independent code paths.

use dds_core::dds::{d_lerch, DDSParams};
use dds_core::eisenstein::{eisenstein_theta, UpperHalfPoint};
use dds_core::hecke_l::{l_completed, l_completed_table};
use dds_core::repn::{hecke_scalars, lambda_p};
use dds_core::special::riemann_zeta;
use dds_core::{c64, C64, KahanC64};

/// In the joint region of absolute convergence the two summation orders must
/// meet: the orbit-side F-part of the swapped assembly equals the
/// character-side sum 2 sum_{m >= 1} (L(s, chi_m) - zeta(2s)) m^{-w}.
#[test]
fn summation_swap_identity() {
    let s = c64(1.4, 0.0);
    let w = c64(2.5, 0.0);
    // Character side, fully independent of the periodic-zeta machinery.
    let n_max = 700usize;
    let z2s = riemann_zeta(2.0 * s).unwrap();
    let l = l_completed_table(s, n_max).unwrap();
    let mut chars = KahanC64::new();
    for m in 1..=n_max {
        chars.add((l[m] - z2s) * (-w * (m as f64).ln()).exp() * 2.0);
    }
    // Tail of the character side: fluctuation Abel bound plus nothing smooth
    // (the zeta part is subtracted).
    let fluct = (600..=n_max).map(|m| (l[m] - z2s).norm()).fold(0.0, f64::max);
    let char_tail = 2.0 * fluct * (n_max as f64).powf(1.0 - w.re) / (w.re - 1.0);

    // Orbit side: d_lerch minus its closed-form pieces.
    let p = DDSParams::new(s, w, 8, 400_000).unwrap();
    let d = d_lerch(&p).unwrap();
    let l0 = l_completed(s, 0, None).unwrap().value;
    let orbit = d.value - l0 - 2.0 * riemann_zeta(w).unwrap() * z2s;

    let diff = (chars.value() - orbit).norm();
    assert!(
        diff <= char_tail + d.err_est + 1e-9,
        "character side {} vs orbit side {} (diff {diff}, budget {})",
        chars.value(),
        orbit,
        char_tail + d.err_est
    );
}

/// The Eisenstein evaluator must reproduce 4 zeta_K at z = i over a range of
/// s, including complex values, tying eisenstein to hecke_l.
#[test]
fn eisenstein_at_i_is_dedekind_zeta() {
    let z = UpperHalfPoint::new(0.0, 1.0).unwrap();
    for &s in &[c64(1.5, 0.0), c64(2.0, 0.0), c64(2.5, -1.0), c64(1.21, 0.4)] {
        let e: C64 = eisenstein_theta(s, z).unwrap();
        let zk = l_completed(s, 0, None).unwrap().value;
        assert!(
            (e - zk * 4.0).norm() < 1e-9 * (1.0 + e.norm()),
            "s={s}: E={e} 4zeta_K={}",
            zk * 4.0
        );
    }
}

/// lambda_p from the Hecke scalars must match the measured Eisenstein
/// eigenvalue ratio (an end-to-end consistency of the two Hecke layers).
#[test]
fn eigenvalue_scalar_matches_measured_ratio() {
    let s = c64(1.6, 0.3);
    let z = UpperHalfPoint::new(0.21, 0.9).unwrap();
    let p = 3i64;
    let mut acc = c64(0.0, 0.0);
    for i in 0..p {
        let zi = UpperHalfPoint::new((z.x + i as f64) / p as f64, z.y / p as f64).unwrap();
        acc += eisenstein_theta(s, zi).unwrap();
    }
    let zp = UpperHalfPoint::new(z.x * p as f64, z.y * p as f64).unwrap();
    acc += eisenstein_theta(s, zp).unwrap();
    acc /= (p as f64).sqrt();
    let measured = acc / eisenstein_theta(s, z).unwrap();
    assert!((measured - lambda_p(s, p)).norm() < 1e-9);
    // and b_p vanishes exactly on the zero locus fed by the same lambda
    let sc = hecke_scalars(s, c64(1.0, 0.0), p);
    assert!(sc.b_p.norm() < 1e-14);
}
