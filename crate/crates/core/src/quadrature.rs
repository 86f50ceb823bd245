//! Quadrature and transform utilities: Gauss-Legendre panels (graded toward an
//! endpoint singularity, refined against oscillation), tanh-sinh and exp-sinh
//! rules for singular/semi-infinite integrands, a radix-2 FFT, and small
//! helpers (4-point analytic extrapolation, contour residues).

use crate::{c64, C64};

/// 16-point Gauss-Legendre nodes/weights on [-1, 1], computed once by Newton
/// iteration on P_16 (full f64 accuracy, deterministic).
fn gauss_legendre_16() -> &'static ([f64; 16], [f64; 16]) {
    use std::sync::OnceLock;
    static CELL: OnceLock<([f64; 16], [f64; 16])> = OnceLock::new();
    CELL.get_or_init(|| {
        let n = 16usize;
        let mut xs = [0.0f64; 16];
        let mut ws = [0.0f64; 16];
        for i in 0..n {
            // Chebyshev initial guess, then Newton on P_n.
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            for _ in 0..100 {
                let (p, dp) = legendre_pn_dpn(n, x);
                let dx = p / dp;
                x -= dx;
                if dx.abs() < 1e-17 {
                    break;
                }
            }
            let (_, dp) = legendre_pn_dpn(n, x);
            xs[i] = x;
            ws[i] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
        (xs, ws)
    })
}

fn legendre_pn_dpn(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0f64;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = (n as f64) * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// 16-point Gauss-Legendre on [a, b].
pub fn gl16<F: FnMut(f64) -> C64>(mut f: F, a: f64, b: f64) -> C64 {
    let (xs, ws) = gauss_legendre_16();
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut acc = c64(0.0, 0.0);
    for i in 0..16 {
        acc += f(mid + half * xs[i]) * ws[i];
    }
    acc * half
}

/// Composite Gauss-Legendre over [a, b] for an integrand that may have an
/// algebraic singularity at `a` (graded geometric panels toward `a`) and an
/// oscillation scale `freq` (panels are split so `freq * width <= 4`).
pub fn integrate_graded<F: FnMut(f64) -> C64>(
    mut f: F,
    a: f64,
    b: f64,
    freq: f64,
    singular_at_a: bool,
) -> C64 {
    if b <= a || !(a.is_finite() && b.is_finite()) {
        return c64(0.0, 0.0);
    }
    let len = b - a;
    let mut edges: Vec<f64> = Vec::new();
    if singular_at_a {
        // a + len * 2^-k for k = K .. 0; the first panel [a, a + len*2^-K]
        // carries a negligible share of any integrable power singularity.
        let kmax = 60;
        edges.push(a);
        for k in (0..=kmax).rev() {
            edges.push(a + len * (0.5f64).powi(k));
        }
    } else {
        edges.push(a);
        edges.push(b);
    }
    let mut acc = c64(0.0, 0.0);
    for w in edges.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let width = hi - lo;
        if width <= 0.0 {
            continue;
        }
        let n_sub = ((freq * width / 4.0).ceil() as usize).max(1);
        let sub = width / n_sub as f64;
        for j in 0..n_sub {
            let l = lo + sub * j as f64;
            acc += gl16(&mut f, l, l + sub);
        }
    }
    acc
}

/// Tanh-sinh (double-exponential) quadrature on the finite interval [a, b].
/// Handles integrable endpoint singularities. Doubles the level until the
/// result is stable to `tol` or `max_level` is reached; returns the value and
/// an error estimate.
pub fn tanh_sinh<F: FnMut(f64) -> C64>(mut f: F, a: f64, b: f64, tol: f64) -> (C64, f64) {
    let half = 0.5 * (b - a);
    let hpi = std::f64::consts::FRAC_PI_2;
    let mut h = 1.0f64;
    let mut best = c64(0.0, 0.0);
    let mut err = f64::INFINITY;
    // Level 0: coarse trapezoid in u.
    let mut total = c64(0.0, 0.0);
    let umax = 3.8f64;
    let eval = |u: f64, f: &mut F| -> C64 {
        let sh = hpi * u.sinh();
        // 1 +- tanh(sh) computed without cancellation: the node position is
        // accurate relative to the nearer endpoint, which is what endpoint-
        // singular integrands need.
        let p = 2.0 / (1.0 + (-2.0 * sh).exp()); // 1 + tanh
        let q = 2.0 / (1.0 + (2.0 * sh).exp()); // 1 - tanh
        let w = hpi * u.cosh() / (sh.cosh() * sh.cosh());
        let t = if p <= q { a + half * p } else { b - half * q };
        if t <= a || t >= b {
            return c64(0.0, 0.0);
        }
        f(t) * w
    };
    {
        let mut k = -(umax / h).floor() as i64;
        let kend = (umax / h).floor() as i64;
        while k <= kend {
            total += eval(k as f64 * h, &mut f);
            k += 1;
        }
    }
    let mut prev = total * (h * half);
    for level in 1..=11 {
        h *= 0.5;
        // Add the new odd-index nodes.
        let mut k = 1i64;
        loop {
            let u = k as f64 * h;
            if u > umax {
                break;
            }
            total += eval(u, &mut f);
            total += eval(-u, &mut f);
            k += 2;
        }
        let cur = total * (h * half);
        err = (cur - prev).norm();
        best = cur;
        if err < tol * (1.0 + cur.norm()) && level >= 3 {
            return (best, err);
        }
        prev = cur;
    }
    (best, err)
}

/// Exp-sinh quadrature on [a, infinity) for integrands decaying at least
/// exponentially. Returns value and error estimate.
pub fn exp_sinh<F: FnMut(f64) -> C64>(mut f: F, a: f64, tol: f64) -> (C64, f64) {
    let hpi = std::f64::consts::FRAC_PI_2;
    let mut h = 1.0f64;
    let umax = 3.7f64;
    let mut total = c64(0.0, 0.0);
    let eval = |u: f64, f: &mut F| -> C64 {
        let sh = hpi * u.sinh();
        let x = sh.exp();
        let w = x * hpi * u.cosh();
        if !x.is_finite() || !w.is_finite() {
            return c64(0.0, 0.0);
        }
        f(a + x) * w
    };
    {
        let mut k = -(umax / h).floor() as i64;
        let kend = (umax / h).floor() as i64;
        while k <= kend {
            total += eval(k as f64 * h, &mut f);
            k += 1;
        }
    }
    let mut prev = total * h;
    let mut best = prev;
    let mut err = f64::INFINITY;
    for level in 1..=11 {
        h *= 0.5;
        let mut k = 1i64;
        loop {
            let u = k as f64 * h;
            if u > umax {
                break;
            }
            total += eval(u, &mut f);
            total += eval(-u, &mut f);
            k += 2;
        }
        let cur = total * h;
        err = (cur - prev).norm();
        best = cur;
        if err < tol * (1.0 + cur.norm()) && level >= 3 {
            return (best, err);
        }
        prev = cur;
    }
    (best, err)
}

/// In-place radix-2 decimation-in-time FFT. `data.len()` must be a power of
/// two. Computes the unnormalized forward transform
/// `X_j = sum_k data_k exp(-2*pi*i*j*k/M)`.
pub fn fft_in_place(data: &mut [C64]) {
    let n = data.len();
    assert!(n.is_power_of_two(), "fft length must be a power of two");
    // Bit reversal.
    let mut j = 0usize;
    for i in 1..n {
        let mut bit = n >> 1;
        while j & bit != 0 {
            j ^= bit;
            bit >>= 1;
        }
        j |= bit;
        if i < j {
            data.swap(i, j);
        }
    }
    let mut len = 2usize;
    while len <= n {
        let ang = -2.0 * std::f64::consts::PI / len as f64;
        let wlen = c64(ang.cos(), ang.sin());
        let mut i = 0;
        while i < n {
            let mut w = c64(1.0, 0.0);
            for k in 0..len / 2 {
                let u = data[i + k];
                let v = data[i + k + len / 2] * w;
                data[i + k] = u + v;
                data[i + k + len / 2] = u - v;
                w *= wlen;
            }
            i += len;
        }
        len <<= 1;
    }
}

/// 4-point Lagrange interpolation of an analytic function from a ring of
/// sample points to a target; used to cross removable singularities.
pub fn lagrange4(ws: &[C64; 4], fs: &[C64; 4], w: C64) -> C64 {
    let mut acc = c64(0.0, 0.0);
    for i in 0..4 {
        let mut num = c64(1.0, 0.0);
        let mut den = c64(1.0, 0.0);
        for j in 0..4 {
            if i != j {
                num *= w - ws[j];
                den *= ws[i] - ws[j];
            }
        }
        acc += fs[i] * (num / den);
    }
    acc
}

/// Residue of `f` at `center` by an `n`-point trapezoid rule on the circle of
/// radius `rho` (spectrally accurate for f meromorphic with a single simple
/// pole inside).
pub fn contour_residue<F: FnMut(C64) -> C64>(
    mut f: F,
    center: C64,
    rho: f64,
    n: usize,
) -> C64 {
    let mut acc = crate::KahanC64::new();
    for j in 0..n {
        let phi = 2.0 * std::f64::consts::PI * j as f64 / n as f64;
        let dw = c64(rho * phi.cos(), rho * phi.sin());
        acc.add(f(center + dw) * dw);
    }
    acc.value() / n as f64
}
