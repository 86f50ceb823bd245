//! `dds` — command-line access to the Q(i) Hecke L-function engine, the
//! double Dirichlet series D(s,w)/Dtilde(s,w), grid scans, residues, the
//! test-vector Fourier table, and the full verification battery.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage/domain error.
//! Results go to stdout; diagnostics (timings) to stderr. Numeric output is
//! rendered as %.12e with a fixed ordering, so identical invocations produce
//! byte-identical output.

use clap::{Args, Parser, Subcommand, ValueEnum};
use dds_core::dds::{d_direct, d_lerch, d_tilde, residue_at_w1, DDSMethod, DDSParams};
use dds_core::hecke_l::{self, l_completed, l_direct, LMethod};
use dds_core::repn::{fourier_main_term, test_vector_fourier, ReprParams, TestVectorSpec};
use dds_core::verify::{fmt_complex, fmt_e12, render_csv, render_json, render_tsv, run_all, run_suite, SUITE_NAMES};
use dds_core::{c64, C64};

#[derive(Parser)]
#[command(name = "dds", version, about = "Hecke L-functions of Q(i) and their double Dirichlet series")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputFormat {
    Tsv,
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum LMethodArg {
    Direct,
    Completed,
}

#[derive(Clone, Copy, ValueEnum)]
enum DDSMethodArg {
    Direct,
    Lerch,
}

impl From<DDSMethodArg> for DDSMethod {
    fn from(m: DDSMethodArg) -> Self {
        match m {
            DDSMethodArg::Direct => DDSMethod::Direct,
            DDSMethodArg::Lerch => DDSMethod::Lerch,
        }
    }
}

/// Complex flag parsed as "RE,IM" (a bare real is accepted).
fn parse_complex(text: &str) -> Result<C64, String> {
    let parts: Vec<&str> = text.split(',').collect();
    match parts.as_slice() {
        [re] => re
            .trim()
            .parse::<f64>()
            .map(|r| c64(r, 0.0))
            .map_err(|e| format!("bad real part '{re}': {e}")),
        [re, im] => {
            let r = re.trim().parse::<f64>().map_err(|e| format!("bad real part '{re}': {e}"))?;
            let i = im.trim().parse::<f64>().map_err(|e| format!("bad imaginary part '{im}': {e}"))?;
            Ok(c64(r, i))
        }
        _ => Err(format!("expected RE,IM, got '{text}'")),
    }
}

#[derive(Args)]
struct ToleranceArg {
    /// Requested tolerance in [1e-12, 1e-3] (error estimates must certify it).
    #[arg(long, default_value_t = 1e-3)]
    tol: f64,
}

impl ToleranceArg {
    fn validate(&self) -> dds_core::Result<f64> {
        if (1e-12..=1e-3).contains(&self.tol) {
            Ok(self.tol)
        } else {
            Err(dds_core::Error::Domain(format!(
                "tol must lie in [1e-12, 1e-3], got {}",
                self.tol
            )))
        }
    }
}

/// Renders a one-row result table in the requested format.
fn emit_row(output: OutputFormat, headers: &[&str], values: &[String]) {
    match output {
        OutputFormat::Tsv => {
            println!("{}", headers.join("\t"));
            println!("{}", values.join("\t"));
        }
        OutputFormat::Csv => {
            println!("{}", headers.join(","));
            println!("{}", values.join(","));
        }
        OutputFormat::Json => {
            let fields: Vec<String> = headers
                .iter()
                .zip(values)
                .map(|(h, v)| format!("  \"{h}\": \"{v}\""))
                .collect();
            println!("{{\n{}\n}}", fields.join(",\n"));
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate L(s, chi_n).
    Lvalue {
        /// s as RE,IM
        #[arg(long, value_parser = parse_complex)]
        s: C64,
        /// character index n (may be negative)
        #[arg(long, allow_hyphen_values = true)]
        n: i64,
        #[arg(long, value_enum, default_value = "completed")]
        method: LMethodArg,
        /// norm bound for the direct sum
        #[arg(long, default_value_t = 1_000_000)]
        bound: i64,
        /// theta-split cutoff (defaults to the built-in rule)
        #[arg(long)]
        cutoff: Option<i64>,
        #[arg(long, value_enum, default_value = "tsv")]
        output: OutputFormat,
    },
    /// Evaluate the double Dirichlet series D(s, w).
    Dds {
        #[arg(long, value_parser = parse_complex)]
        s: C64,
        #[arg(long, value_parser = parse_complex)]
        w: C64,
        #[arg(long, value_enum, default_value = "lerch")]
        method: DDSMethodArg,
        #[arg(long, default_value_t = 256)]
        char_cutoff: i64,
        #[arg(long, default_value_t = 40_000)]
        norm_cutoff: i64,
        #[command(flatten)]
        tol: ToleranceArg,
        #[arg(long, value_enum, default_value = "tsv")]
        output: OutputFormat,
    },
    /// Evaluate the normalized series Dtilde(s, w) (w = 1 allowed).
    Dtilde {
        #[arg(long, value_parser = parse_complex)]
        s: C64,
        #[arg(long, value_parser = parse_complex)]
        w: C64,
        #[arg(long, value_enum, default_value = "lerch")]
        method: DDSMethodArg,
        #[arg(long, default_value_t = 256)]
        char_cutoff: i64,
        #[arg(long, default_value_t = 40_000)]
        norm_cutoff: i64,
        #[arg(long, value_enum, default_value = "tsv")]
        output: OutputFormat,
    },
    /// Scan Dtilde(s, w) over a real w-range, one row per grid point.
    Scan {
        #[arg(long, value_parser = parse_complex)]
        s: C64,
        #[arg(long, allow_hyphen_values = true)]
        w_from: f64,
        #[arg(long, allow_hyphen_values = true)]
        w_to: f64,
        #[arg(long)]
        step: f64,
        #[arg(long, value_enum, default_value = "lerch")]
        method: DDSMethodArg,
        #[arg(long, default_value_t = 20_000)]
        norm_cutoff: i64,
        #[arg(long, value_enum, default_value = "csv")]
        output: OutputFormat,
    },
    /// Residue of w -> D(s, w) at w = 1 (contract: 2 zeta(2s)).
    ResidueW1 {
        #[arg(long, value_parser = parse_complex)]
        s: C64,
        #[arg(long, default_value_t = 40_000)]
        norm_cutoff: i64,
        #[arg(long, value_enum, default_value = "tsv")]
        output: OutputFormat,
    },
    /// Fourier coefficients of the test vector u_w with their normalized
    /// remainders.
    Fourier {
        #[arg(long, value_parser = parse_complex)]
        w: C64,
        #[arg(long, default_value_t = 64)]
        n_max: i64,
        /// bump outer radius (defaults to pi/16)
        #[arg(long)]
        delta: Option<f64>,
        /// bump plateau radius (defaults to delta/2)
        #[arg(long)]
        plateau: Option<f64>,
        #[arg(long, value_enum, default_value = "tsv")]
        output: OutputFormat,
    },
    /// Run verification suites ("all" or a suite name).
    Verify {
        /// "all" or one of the suite names
        #[arg(default_value = "all")]
        suite: String,
        #[arg(long, value_enum, default_value = "json")]
        output: OutputFormat,
        /// list available suites and exit
        #[arg(long)]
        list: bool,
    },
}

fn usage_error(msg: &str) -> ! {
    eprintln!("error: {msg}");
    std::process::exit(2);
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => std::process::exit(code),
        Err(e) => usage_error(&e.to_string()),
    }
}

fn cache_path() -> Option<std::path::PathBuf> {
    std::env::var_os("DDS_LCACHE").map(std::path::PathBuf::from)
}

fn run(cli: Cli) -> dds_core::Result<i32> {
    match cli.command {
        Command::Lvalue { s, n, method, bound, cutoff, output } => {
            let method = match method {
                LMethodArg::Direct => LMethod::Direct,
                LMethodArg::Completed => LMethod::Completed,
            };
            let cache_key_cutoff = cutoff.unwrap_or_else(|| match method {
                LMethod::Direct => bound,
                LMethod::Completed => hecke_l::default_completed_cutoff(s, n),
            });
            let mut cache = match cache_path() {
                Some(p) => Some(hecke_l::cache::LCache::open(&p)?),
                None => None,
            };
            let headers = ["value", "err_est", "method"];
            if let Some(c) = cache.as_ref() {
                if let Some((value, err)) = c.get(s, n, method, cache_key_cutoff) {
                    emit_row(
                        output,
                        &headers,
                        &[fmt_complex(value), fmt_e12(err), method.as_str().into()],
                    );
                    return Ok(0);
                }
            }
            let r = match method {
                LMethod::Direct => l_direct(s, n, bound)?,
                LMethod::Completed => l_completed(s, n, cutoff)?,
            };
            if let Some(c) = cache.as_mut() {
                c.put(s, n, method, cache_key_cutoff, r.value, r.err_est)?;
            }
            emit_row(
                output,
                &headers,
                &[fmt_complex(r.value), fmt_e12(r.err_est), method.as_str().into()],
            );
            Ok(0)
        }
        Command::Dds { s, w, method, char_cutoff, norm_cutoff, tol, output } => {
            let tol = tol.validate()?;
            let p = DDSParams::new(s, w, char_cutoff, norm_cutoff)?;
            let r = match method {
                DDSMethodArg::Direct => d_direct(&p)?,
                DDSMethodArg::Lerch => d_lerch(&p)?,
            };
            if r.err_est > tol {
                return Err(dds_core::Error::Convergence(format!(
                    "tail estimate {} does not certify the requested tolerance {}; raise the cutoffs",
                    fmt_e12(r.err_est),
                    fmt_e12(tol)
                )));
            }
            emit_row(
                output,
                &["value", "err_est", "method"],
                &[fmt_complex(r.value), fmt_e12(r.err_est), r.method.as_str().into()],
            );
            Ok(0)
        }
        Command::Dtilde { s, w, method, char_cutoff, norm_cutoff, output } => {
            let p = DDSParams::new(s, w, char_cutoff, norm_cutoff)?;
            let r = d_tilde(&p, method.into())?;
            emit_row(
                output,
                &["value", "err_est", "method"],
                &[fmt_complex(r.value), fmt_e12(r.err_est), r.method.as_str().into()],
            );
            Ok(0)
        }
        Command::Scan { s, w_from, w_to, step, method, norm_cutoff, output } => {
            if step <= 0.0 {
                return Err(dds_core::Error::Domain(format!(
                    "step must be positive, got {step}"
                )));
            }
            if w_to < w_from {
                return Err(dds_core::Error::Domain("w_to must be >= w_from".into()));
            }
            let mut rows = Vec::new();
            let mut k = 0i64;
            loop {
                let wre = w_from + step * k as f64;
                if wre > w_to + 1e-12 {
                    break;
                }
                k += 1;
                let w = c64(wre, 0.0);
                let near_pole = (w - 1.0).norm() <= 0.1 + 1e-12;
                let p = DDSParams::new(s, w, 64, norm_cutoff)?;
                let (re, im, err) = match d_tilde(&p, method.into()) {
                    Ok(v) => (fmt_e12(v.value.re), fmt_e12(v.value.im), fmt_e12(v.err_est)),
                    Err(_) => ("nan".into(), "nan".into(), "inf".into()),
                };
                rows.push((fmt_e12(wre), re, im, err, near_pole));
                if w_from == w_to {
                    break;
                }
            }
            let method_s = match method {
                DDSMethodArg::Direct => "direct",
                DDSMethodArg::Lerch => "lerch",
            };
            match output {
                OutputFormat::Csv => {
                    println!("w,re_dtilde,im_dtilde,err_est,method,flag");
                    for (w, re, im, err, np) in rows {
                        println!("{w},{re},{im},{err},{method_s},{}", if np { "near-pole" } else { "" });
                    }
                }
                OutputFormat::Tsv => {
                    println!("w\tre_dtilde\tim_dtilde\terr_est\tmethod\tflag");
                    for (w, re, im, err, np) in rows {
                        println!("{w}\t{re}\t{im}\t{err}\t{method_s}\t{}", if np { "near-pole" } else { "" });
                    }
                }
                OutputFormat::Json => {
                    let items: Vec<String> = rows
                        .iter()
                        .map(|(w, re, im, err, np)| {
                            format!(
                                "  {{\"w\": \"{w}\", \"re\": \"{re}\", \"im\": \"{im}\", \"err_est\": \"{err}\", \"method\": \"{method_s}\", \"flag\": \"{}\"}}",
                                if *np { "near-pole" } else { "" }
                            )
                        })
                        .collect();
                    println!("[\n{}\n]", items.join(",\n"));
                }
            }
            Ok(0)
        }
        Command::ResidueW1 { s, norm_cutoff, output } => {
            let r = residue_at_w1(s, norm_cutoff)?;
            let want = 2.0 * dds_core::special::riemann_zeta(2.0 * s)?;
            emit_row(
                output,
                &["residue", "expected_2zeta2s", "defect"],
                &[
                    fmt_complex(r),
                    fmt_complex(want),
                    fmt_e12((r - want).norm()),
                ],
            );
            Ok(0)
        }
        Command::Fourier { w, n_max, delta, plateau, output } => {
            let d = delta.unwrap_or(std::f64::consts::PI / 16.0);
            let p = plateau.unwrap_or(d / 2.0);
            let tv = TestVectorSpec::new(w, d, p, 1 << 12, dds_core::repn::QuadratureRule::GradedMesh)?;
            let rp = ReprParams::from_s(c64(0.5, 0.0));
            let table = test_vector_fourier(&rp, &tv, n_max)?;
            let mut rows = Vec::new();
            let mut n = 0i64;
            while n <= n_max {
                let u = table[&n];
                let rem = if n == 0 {
                    "".to_string()
                } else {
                    fmt_e12((u / fourier_main_term(w, n) - 1.0).norm())
                };
                rows.push((n, fmt_complex(u), rem));
                n += 2;
            }
            match output {
                OutputFormat::Tsv => {
                    println!("n\tu_hat\tremainder");
                    for (n, u, r) in rows {
                        println!("{n}\t{u}\t{r}");
                    }
                }
                OutputFormat::Csv => {
                    println!("n,u_hat,remainder");
                    for (n, u, r) in rows {
                        println!("{n},\"{u}\",{r}");
                    }
                }
                OutputFormat::Json => {
                    let items: Vec<String> = rows
                        .iter()
                        .map(|(n, u, r)| format!("  {{\"n\": {n}, \"u_hat\": \"{u}\", \"remainder\": \"{r}\"}}"))
                        .collect();
                    println!("[\n{}\n]", items.join(",\n"));
                }
            }
            Ok(0)
        }
        Command::Verify { suite, output, list } => {
            if list {
                for s in SUITE_NAMES {
                    println!("{s}");
                }
                return Ok(0);
            }
            let reports = if suite == "all" {
                run_all()?
            } else {
                vec![run_suite(&suite)?]
            };
            for r in &reports {
                eprintln!(
                    "suite {} finished in {:.2} s: {}",
                    r.suite,
                    r.wall_time,
                    if r.all_pass() { "pass" } else { "FAIL" }
                );
            }
            let text = match output {
                OutputFormat::Json => render_json(&reports),
                OutputFormat::Tsv => render_tsv(&reports),
                OutputFormat::Csv => render_csv(&reports),
            };
            print!("{text}");
            Ok(if reports.iter().all(|r| r.all_pass()) { 0 } else { 1 })
        }
    }
}
