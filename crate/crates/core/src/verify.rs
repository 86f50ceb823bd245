//! The verification battery: fifteen named suites, each a list of cases with
//! pinned tolerances, plus deterministic TSV/CSV/JSON rendering. The CLI
//! `verify` subcommand and the acceptance tests both run through here.

use crate::dds::{d_direct_with_table, d_lerch, d_tilde, residue_at_w1, DDSMethod, DDSParams};
use crate::eisenstein::{hecke_eigen_check, verify_period_formula, UpperHalfPoint};
use crate::error::Result;
use crate::hecke_l::{
    l_completed, l_completed_table, l_direct_row, residue_at_s1, theta_transform_check, RepTable,
};
use crate::repn::{
    fit_log_slope, fourier_main_term, hecke_scalars, lemma_germ_check, test_vector_fourier,
    ReprParams, TestVectorSpec,
};
use crate::special::riemann_zeta;
use crate::{c64, C64};
use serde::{Serialize, Serializer};

/// An f64 rendered as C-style `%.12e` wherever it is serialized; keeps every
/// output stream byte-deterministic.
#[derive(Debug, Clone, Copy)]
pub struct E12(pub f64);

impl Serialize for E12 {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        ser.serialize_str(&fmt_e12(self.0))
    }
}

/// C-style `%.12e` formatting (two-or-more exponent digits, explicit sign).
pub fn fmt_e12(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let s = format!("{:.12e}", x);
    match s.split_once('e') {
        Some((mant, exp)) => {
            let e: i32 = exp.parse().unwrap_or(0);
            let sign = if e < 0 { '-' } else { '+' };
            format!("{mant}e{sign}{:02}", e.abs())
        }
        None => s,
    }
}

/// Complex rendering `re+imi` in %.12e.
pub fn fmt_complex(z: C64) -> String {
    let sign = if z.im.is_sign_negative() { '-' } else { '+' };
    format!("{}{}{}i", fmt_e12(z.re), sign, fmt_e12(z.im.abs()))
}

/// One verified case.
#[derive(Debug, Clone, Serialize)]
pub struct CaseResult {
    pub id: String,
    pub inputs: String,
    pub expected: String,
    pub got: String,
    pub defect: E12,
    pub tol: E12,
    pub pass: bool,
}

impl CaseResult {
    fn new(
        id: impl Into<String>,
        inputs: impl Into<String>,
        expected: impl Into<String>,
        got: impl Into<String>,
        defect: f64,
        tol: f64,
    ) -> Self {
        Self {
            id: id.into(),
            inputs: inputs.into(),
            expected: expected.into(),
            got: got.into(),
            defect: E12(defect),
            tol: E12(tol),
            pass: defect.is_finite() && defect <= tol,
        }
    }
}

/// A suite of cases; `wall_time` goes to diagnostics, never to the report
/// stream (reports must be byte-identical across runs).
#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub suite: String,
    pub cases: Vec<CaseResult>,
    #[serde(skip)]
    pub wall_time: f64,
}

impl VerificationReport {
    pub fn all_pass(&self) -> bool {
        self.cases.iter().all(|c| c.pass)
    }

    pub fn failing(&self) -> Vec<&CaseResult> {
        self.cases.iter().filter(|c| !c.pass).collect()
    }
}

pub const SUITE_NAMES: [&str; 15] = [
    "c01_l_engine",
    "c02_functional_equation",
    "c03_zeta_k2",
    "c04_residue_s1",
    "c05_theta_transform",
    "c06_dds_agreement",
    "c07_residue_w1",
    "c08_dtilde_at_w1",
    "c09_holomorphy_scan",
    "c10_lemma_germ",
    "c11_fourier_asymptotics",
    "c12_eisenstein_hecke",
    "c13_period_ratios",
    "c14_bp_zero_locus",
    "c15_determinism",
];

/// Runs a single suite by name.
pub fn run_suite(name: &str) -> Result<VerificationReport> {
    let start = std::time::Instant::now();
    let mut rep = match name {
        "c01_l_engine" => c01_l_engine()?,
        "c02_functional_equation" => c02_functional_equation()?,
        "c03_zeta_k2" => c03_zeta_k2()?,
        "c04_residue_s1" => c04_residue_s1()?,
        "c05_theta_transform" => c05_theta_transform()?,
        "c06_dds_agreement" => c06_dds_agreement()?,
        "c07_residue_w1" => c07_residue_w1()?,
        "c08_dtilde_at_w1" => c08_dtilde_at_w1()?,
        "c09_holomorphy_scan" => c09_holomorphy_scan()?,
        "c10_lemma_germ" => c10_lemma_germ()?,
        "c11_fourier_asymptotics" => c11_fourier_asymptotics()?,
        "c12_eisenstein_hecke" => c12_eisenstein_hecke()?,
        "c13_period_ratios" => c13_period_ratios()?,
        "c14_bp_zero_locus" => c14_bp_zero_locus()?,
        "c15_determinism" => c15_determinism()?,
        other => {
            return Err(crate::Error::Domain(format!(
                "unknown suite '{other}'; known: {SUITE_NAMES:?}"
            )))
        }
    };
    rep.wall_time = start.elapsed().as_secs_f64();
    Ok(rep)
}

/// Runs every suite in order.
pub fn run_all() -> Result<Vec<VerificationReport>> {
    SUITE_NAMES.iter().map(|n| run_suite(n)).collect()
}

fn report(suite: &str, cases: Vec<CaseResult>) -> VerificationReport {
    VerificationReport {
        suite: suite.into(),
        cases,
        wall_time: 0.0,
    }
}

/// Catalan's constant by its alternating series (independent code path).
pub fn catalan() -> f64 {
    let mut g = 0.0f64;
    let mut sign = 1.0;
    for k in 0..200_000u64 {
        let d = (2 * k + 1) as f64;
        g += sign / (d * d);
        sign = -sign;
    }
    g
}

const C01_BOUND: i64 = 10_000_000;

fn c01_l_engine() -> Result<VerificationReport> {
    // |l_completed - l_direct| <= 1e-7 on s in {1.2,1.5,2,3} x {0,+-2i},
    // n in 0..=6, with the direct bound 1e7 (the largest fitting the stated
    // wall budget). For Re(s) < 2 the direct truncation tail itself exceeds
    // the tolerance (it is ~ (pi/4) B^{1-Re s}/(Re s - 1) at n = 0), so those
    // sub-cases measure exactly that tail.
    let table = RepTable::new(C01_BOUND)?;
    let mut cases = Vec::new();
    let mut idx = 0usize;
    for &sre in &[1.2f64, 1.5, 2.0, 3.0] {
        for &sim in &[0.0f64, 2.0, -2.0] {
            let s = c64(sre, sim);
            let row = l_direct_row(&table, s, 6)?;
            for n in 0..=6i64 {
                idx += 1;
                let lc = l_completed(s, n, None)?;
                let defect = (lc.value - row[n as usize].value).norm();
                cases.push(CaseResult::new(
                    format!("C01.{idx}"),
                    format!("s={} n={n} bound={C01_BOUND}", fmt_complex(s)),
                    fmt_complex(lc.value),
                    fmt_complex(row[n as usize].value),
                    defect,
                    1e-7,
                ));
            }
        }
    }
    Ok(report("c01_l_engine", cases))
}

fn c02_functional_equation() -> Result<VerificationReport> {
    let mut cases = Vec::new();
    let mut idx = 0usize;
    for &s in &[c64(0.3, 0.0), c64(0.5, 7.0), c64(1.8, -2.0)] {
        for n in 0..=4i64 {
            idx += 1;
            let a = l_completed(s, n, None)?
                .completed
                .ok_or_else(|| crate::Error::Overflow("Lambda out of range".into()))?;
            let b = l_completed(c64(1.0, 0.0) - s, n, None)?
                .completed
                .ok_or_else(|| crate::Error::Overflow("Lambda out of range".into()))?;
            let rel = (a - b).norm() / a.norm();
            cases.push(CaseResult::new(
                format!("C02.{idx}"),
                format!("s={} n={n}", fmt_complex(s)),
                fmt_complex(a),
                fmt_complex(b),
                rel,
                1e-9,
            ));
        }
    }
    Ok(report("c02_functional_equation", cases))
}

fn c03_zeta_k2() -> Result<VerificationReport> {
    let want = std::f64::consts::PI.powi(2) / 6.0 * catalan();
    let got = l_completed(c64(2.0, 0.0), 0, None)?.value;
    let defect = (got - c64(want, 0.0)).norm();
    Ok(report(
        "c03_zeta_k2",
        vec![CaseResult::new(
            "C03.1",
            "zeta_K(2) vs pi^2 G / 6 (Catalan by alternating series)",
            fmt_e12(want),
            fmt_complex(got),
            defect,
            1e-8,
        )],
    ))
}

fn c04_residue_s1() -> Result<VerificationReport> {
    let (contour, limit) = residue_at_s1()?;
    let want = std::f64::consts::FRAC_PI_4;
    Ok(report(
        "c04_residue_s1",
        vec![
            CaseResult::new(
                "C04.1",
                "contour residue of L(s,chi_0) at s=1",
                fmt_e12(want),
                fmt_complex(contour),
                (contour - c64(want, 0.0)).norm(),
                1e-6,
            ),
            CaseResult::new(
                "C04.2",
                "two-sided limit of (s-1) L(s,chi_0)",
                fmt_e12(want),
                fmt_complex(limit),
                (limit - c64(want, 0.0)).norm(),
                1e-6,
            ),
            CaseResult::new(
                "C04.3",
                "contour vs limit",
                fmt_complex(contour),
                fmt_complex(limit),
                (contour - limit).norm(),
                1e-6,
            ),
        ],
    ))
}

fn c05_theta_transform() -> Result<VerificationReport> {
    let mut cases = Vec::new();
    let mut idx = 0usize;
    for n in 0..=3i64 {
        for &t in &[0.6f64, 1.0, 1.7] {
            idx += 1;
            let cutoff = (60.0 / t.min(1.0 / t)).ceil() as i64;
            let defect = theta_transform_check(n, t, cutoff)?;
            cases.push(CaseResult::new(
                format!("C05.{idx}"),
                format!("n={n} t={t} cutoff={cutoff}"),
                "0",
                fmt_e12(defect),
                defect,
                1e-10,
            ));
        }
    }
    Ok(report("c05_theta_transform", cases))
}

fn c06_dds_agreement() -> Result<VerificationReport> {
    // Overlap grid; both conditions of the criterion are recorded:
    // |d_direct - d_lerch| <= combined err_est AND combined err_est <= 1e-6.
    // The direct truncation tail ~ 2 zeta(2s) C^{1-Re w}/(Re w - 1) cannot be
    // pushed to 1e-6 at Re(w) in {1.6, 2.5} with any desk-scale character
    // cutoff; the cases record the honest estimates.
    let mut cases = Vec::new();
    let mut idx = 0usize;
    for &s in &[c64(1.3, 0.0), c64(1.5, 0.0), c64(2.0, 0.0), c64(1.5, 4.0)] {
        let char_cutoff = 1280i64;
        let table = l_completed_table(s, char_cutoff as usize)?;
        for &w in &[c64(1.6, 0.0), c64(2.5, 0.0), c64(3.0, 2.0)] {
            idx += 1;
            let norm_cutoff = if w.re < 2.0 { 250_000 } else { 60_000 };
            let p = DDSParams::new(s, w, char_cutoff, norm_cutoff)?;
            let a = d_direct_with_table(&p, &table)?;
            let b = d_lerch(&p)?;
            let diff = (a.value - b.value).norm();
            let combined = a.err_est + b.err_est;
            let defect = diff.max(combined);
            cases.push(CaseResult::new(
                format!("C06.{idx}"),
                format!(
                    "s={} w={} char_cutoff={char_cutoff} norm_cutoff={norm_cutoff} |diff|={} combined_err={}",
                    fmt_complex(s),
                    fmt_complex(w),
                    fmt_e12(diff),
                    fmt_e12(combined)
                ),
                fmt_complex(b.value),
                fmt_complex(a.value),
                defect,
                1e-6,
            ));
        }
    }
    Ok(report("c06_dds_agreement", cases))
}

fn c07_residue_w1() -> Result<VerificationReport> {
    let mut cases = Vec::new();
    for (i, &s) in [c64(1.5, 0.0), c64(2.0, 0.0), c64(1.2, 1.0)].iter().enumerate() {
        let got = residue_at_w1(s, 60_000)?;
        let want = 2.0 * riemann_zeta(2.0 * s)?;
        cases.push(CaseResult::new(
            format!("C07.{}", i + 1),
            format!("s={}", fmt_complex(s)),
            fmt_complex(want),
            fmt_complex(got),
            (got - want).norm(),
            1e-5,
        ));
    }
    Ok(report("c07_residue_w1", cases))
}

fn c08_dtilde_at_w1() -> Result<VerificationReport> {
    let mut cases = Vec::new();
    for (i, &s) in [c64(1.5, 0.0), c64(2.0, 0.0)].iter().enumerate() {
        let p = DDSParams::new(s, c64(1.0, 0.0), 8, 60_000)?;
        let got = d_tilde(&p, DDSMethod::Lerch)?;
        let want = -(2.0f64).sqrt() * riemann_zeta(2.0 * s)?;
        cases.push(CaseResult::new(
            format!("C08.{}", i + 1),
            format!("s={} w=1 (pole-zero cancellation)", fmt_complex(s)),
            fmt_complex(want),
            fmt_complex(got.value),
            (got.value - want).norm(),
            1e-6,
        ));
    }
    Ok(report("c08_dtilde_at_w1", cases))
}

fn c09_holomorphy_scan() -> Result<VerificationReport> {
    let s = c64(1.5, 0.0);
    let mut grid_max = 0.0f64;
    let mut anomalies = 0usize;
    let mut count = 0usize;
    let mut k = 0i64;
    loop {
        let wre = -0.5 + 0.05 * k as f64;
        if wre > 3.0 + 1e-12 {
            break;
        }
        k += 1;
        let w = c64(wre, 0.0);
        if (w - 1.0).norm() < 0.2 {
            continue;
        }
        count += 1;
        let p = DDSParams::new(s, w, 8, 20_000)?;
        match d_tilde(&p, DDSMethod::Lerch) {
            Ok(v) => {
                let mag = v.value.norm();
                if !mag.is_finite() {
                    anomalies += 1;
                } else {
                    grid_max = grid_max.max(mag);
                }
            }
            Err(_) => anomalies += 1,
        }
    }
    let pass_metric = if anomalies == 0 { grid_max } else { f64::INFINITY };
    Ok(report(
        "c09_holomorphy_scan",
        vec![CaseResult::new(
            "C09.1",
            format!("s=1.5, Re(w) in [-0.5,3] step 0.05, |w-1| >= 0.2, {count} points, {anomalies} anomalies"),
            "finite, grid max < 1e3",
            fmt_e12(grid_max),
            pass_metric,
            1e3,
        )],
    ))
}

fn c10_lemma_germ() -> Result<VerificationReport> {
    let mut cases = Vec::new();
    let mut idx = 0usize;
    for &tau in &[c64(0.0, 0.0), c64(0.4, 0.0), c64(0.0, 0.8)] {
        for &p in &[2i64, 3, 5] {
            for &wre in &[1.3f64, 2.0, 2.5] {
                idx += 1;
                let rp = ReprParams::new(tau);
                let tv = TestVectorSpec::for_hecke(c64(wre, 0.0), p)?;
                let rep = lemma_germ_check(&rp, &tv, p)?;
                let d2 = rep.germ_defect[0].1; // theta = 1e-2
                let d3 = rep.germ_defect[1].1; // theta = 1e-3
                let ok_decay = d3 <= d2;
                let ok_slope = rep.slope >= 0.7 && rep.slope <= 1.3;
                let defect = if ok_decay && ok_slope { 0.0 } else { 1.0 };
                cases.push(CaseResult::new(
                    format!("C10.{idx}"),
                    format!(
                        "tau={} p={p} w={wre} defect(1e-2)={} defect(1e-3)={} slope={:.3}",
                        fmt_complex(tau),
                        fmt_e12(d2),
                        fmt_e12(d3),
                        rep.slope
                    ),
                    fmt_complex(rep.beta_expected),
                    fmt_complex(rep.beta_measured),
                    defect,
                    0.5,
                ));
            }
        }
    }
    Ok(report("c10_lemma_germ", cases))
}

fn c11_fourier_asymptotics() -> Result<VerificationReport> {
    // Fitted decay exponent of r(n) = u_hat(n)/main(n) - 1 over n in
    // [32, 512], required to equal -1.0 +- 0.15. A C^2 bump with a plateau
    // makes r decay like n^{Re w - 4} (all Taylor data of the bump vanish at
    // the singular point), so the fitted exponents land near w - 4, not -1;
    // the cases record the measured values.
    let mut cases = Vec::new();
    let ns: Vec<i64> = vec![32, 46, 64, 90, 128, 182, 256, 362, 512];
    let rp = ReprParams::from_s(c64(0.5, 0.0));
    for (i, &wre) in [1.3f64, 2.0, 3.5].iter().enumerate() {
        let w = c64(wre, 0.0);
        let tv = TestVectorSpec::with_w(w)?;
        let uhat = test_vector_fourier(&rp, &tv, 512)?;
        let mut rmag = Vec::new();
        for &n in &ns {
            let r = (uhat[&n] / fourier_main_term(w, n) - 1.0).norm();
            rmag.push(r);
        }
        let xs: Vec<f64> = ns.iter().map(|&n| n as f64).collect();
        let slope = fit_log_slope(&xs, &rmag);
        cases.push(CaseResult::new(
            format!("C11.{}", i + 1),
            format!("w={wre}, remainder exponent fit over n in [32,512]"),
            "-1.0 +- 0.15",
            format!("{slope:.4}"),
            (slope + 1.0).abs(),
            0.15,
        ));
    }
    // Corrected-vector decay gain at (tau, p, w) = (0, 2, 2.5).
    let rp0 = ReprParams::new(c64(0.0, 0.0));
    let tv = TestVectorSpec::for_hecke(c64(2.5, 0.0), 2)?;
    let rep = lemma_germ_check(&rp0, &tv, 2)?;
    cases.push(CaseResult::new(
        "C11.4",
        format!(
            "decay gain at (tau,p,w)=(0,2,2.5): u exponent {:.3}, corrected {:.3}",
            rep.u_decay_exponent, rep.d_decay_exponent
        ),
        ">= 0.8",
        format!("{:.4}", rep.decay_gain),
        if rep.decay_gain >= 0.8 { 0.0 } else { 0.8 - rep.decay_gain },
        1e-12,
    ));
    Ok(report("c11_fourier_asymptotics", cases))
}

fn c12_eisenstein_hecke() -> Result<VerificationReport> {
    let mut cases = Vec::new();
    let mut idx = 0usize;
    let zs = [
        UpperHalfPoint::new(0.0, 1.0)?,
        UpperHalfPoint::new(0.3, 1.2)?,
    ];
    for &sre in &[1.3f64, 1.5, 2.0] {
        for &p in &[2i64, 3, 5] {
            for z in zs.iter() {
                idx += 1;
                let defect = hecke_eigen_check(c64(sre, 0.0), p, *z)?;
                cases.push(CaseResult::new(
                    format!("C12.{idx}"),
                    format!("s={sre} p={p} z={}+{}i", z.x, z.y),
                    "0",
                    fmt_e12(defect),
                    defect,
                    1e-6,
                ));
            }
        }
    }
    Ok(report("c12_eisenstein_hecke", cases))
}

fn c13_period_ratios() -> Result<VerificationReport> {
    let rep = verify_period_formula(c64(1.3, 0.0), 0.4, 0.6, 1, 2)?;
    Ok(report(
        "c13_period_ratios",
        vec![
            CaseResult::new(
                "C13.1",
                "character ratio c_1/c_2 vs [L F]/[L F] at (s,r,m,m2)=(1.3,0.4,1,2)",
                "1",
                fmt_e12(1.0 + rep.ratio_a_defect),
                rep.ratio_a_defect,
                1e-3,
            ),
            CaseResult::new(
                "C13.2",
                "radius independence of c_1/F at r=0.4 vs r2=0.6",
                "1",
                fmt_e12(1.0 + rep.ratio_b_defect),
                rep.ratio_b_defect,
                1e-3,
            ),
            CaseResult::new(
                "C13.3",
                "elliptic vanishing of K-types 2 mod 4",
                "0",
                fmt_e12(rep.elliptic_max),
                rep.elliptic_max,
                1e-8,
            ),
        ],
    ))
}

/// Deterministic pseudo-random stream (64-bit LCG), fixed seed.
struct Lcg(u64);

impl Lcg {
    fn next_unit(&mut self) -> f64 {
        self.0 = self
            .0
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        (self.0 >> 11) as f64 / (1u64 << 53) as f64
    }
}

fn c14_bp_zero_locus() -> Result<VerificationReport> {
    let mut cases = Vec::new();
    let mut rng = Lcg(0x5eed_1234_abcd_9876);
    let mut points = Vec::new();
    for _ in 0..20 {
        let re = 0.2 + 1.8 * rng.next_unit();
        let im = -3.0 + 6.0 * rng.next_unit();
        points.push(c64(re, im));
    }
    for (i, &p) in [2i64, 3, 5, 7].iter().enumerate() {
        let mut worst = 0.0f64;
        for &s in &points {
            let (w1, w2) = crate::repn::bp_zero_locus(s);
            worst = worst.max(hecke_scalars(s, w1, p).b_p.norm());
            worst = worst.max(hecke_scalars(s, w2, p).b_p.norm());
        }
        cases.push(CaseResult::new(
            format!("C14.{}", i + 1),
            format!("p={p}, 20 seeded points in [0.2,2]x[-3,3]i, w in {{1, 2-2s}}"),
            "0",
            fmt_e12(worst),
            worst,
            1e-14,
        ));
    }
    Ok(report("c14_bp_zero_locus", cases))
}

fn c15_determinism() -> Result<VerificationReport> {
    // In-process re-evaluation determinism over a representative sub-battery
    // (the full two-invocation binary check lives in the acceptance tests).
    let once = [run_suite("c05_theta_transform")?, run_suite("c14_bp_zero_locus")?];
    let twice = [run_suite("c05_theta_transform")?, run_suite("c14_bp_zero_locus")?];
    let a = render_json(&once);
    let b = render_json(&twice);
    let equal = a == b;
    Ok(report(
        "c15_determinism",
        vec![CaseResult::new(
            "C15.1",
            "byte equality of two in-process re-evaluations (c05 + c14)",
            "identical",
            if equal { "identical" } else { "mismatch" },
            if equal { 0.0 } else { 1.0 },
            0.5,
        )],
    ))
}

/// JSON rendering (array of suite objects), stable field order, %.12e
/// numerics, no timing data.
pub fn render_json(reports: &[VerificationReport]) -> String {
    serde_json::to_string_pretty(reports).expect("report serialization cannot fail") + "\n"
}

/// Tab-separated rendering with a single header line.
pub fn render_tsv(reports: &[VerificationReport]) -> String {
    let mut out = String::from("suite\tid\tinputs\texpected\tgot\tdefect\ttol\tpass\n");
    for r in reports {
        for c in &r.cases {
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
                r.suite,
                c.id,
                c.inputs,
                c.expected,
                c.got,
                fmt_e12(c.defect.0),
                fmt_e12(c.tol.0),
                c.pass
            ));
        }
    }
    out
}

fn csv_quote(s: &str) -> String {
    format!("\"{}\"", s.replace('"', "\"\""))
}

/// Comma-separated rendering with a single header line.
pub fn render_csv(reports: &[VerificationReport]) -> String {
    let mut out = String::from("suite,id,inputs,expected,got,defect,tol,pass\n");
    for r in reports {
        for c in &r.cases {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                r.suite,
                c.id,
                csv_quote(&c.inputs),
                csv_quote(&c.expected),
                csv_quote(&c.got),
                fmt_e12(c.defect.0),
                fmt_e12(c.tol.0),
                c.pass
            ));
        }
    }
    out
}
