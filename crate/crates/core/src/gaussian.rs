//! Nonzero ideals of `Z[i]` via unit-orbit representatives, and the unramified
//! Hecke characters chi_n(a) = (a/|a|)^{4n}.

use crate::error::{Error, Result};
use crate::{c64, C64};

/// Index of an unramified Hecke character of Q(i); may be negative.
pub type CharacterIndex = i64;

/// One representative per orbit of `Z[i]` \ {0} under multiplication by the
/// units {1, i, -1, -i}: the associate with x >= 1, y >= 0. Orbits biject
/// with nonzero ideals of `Z[i]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct UnitOrbitRep {
    x: i64,
    y: i64,
}

impl UnitOrbitRep {
    /// Builds a representative, checking the normalization x >= 1, y >= 0.
    pub fn new(x: i64, y: i64) -> Result<Self> {
        if x >= 1 && y >= 0 {
            Ok(Self { x, y })
        } else {
            Err(Error::Domain(format!(
                "({x},{y}) is not a unit-orbit representative (need x >= 1, y >= 0)"
            )))
        }
    }

    /// Reduces an arbitrary nonzero Gaussian integer to its representative.
    pub fn reduce(mut x: i64, mut y: i64) -> Result<Self> {
        if x == 0 && y == 0 {
            return Err(Error::Domain("zero is not in any unit orbit".into()));
        }
        for _ in 0..4 {
            if x >= 1 && y >= 0 {
                return Ok(Self { x, y });
            }
            // multiply by i: (x, y) -> (-y, x)
            let (nx, ny) = (-y, x);
            x = nx;
            y = ny;
        }
        unreachable!("every nonzero Gaussian integer has a normalized associate")
    }

    pub fn x(&self) -> i64 {
        self.x
    }

    pub fn y(&self) -> i64 {
        self.y
    }

    /// The ideal norm N = x^2 + y^2 >= 1.
    pub fn norm(&self) -> i64 {
        self.x * self.x + self.y * self.y
    }

    /// Argument of x + iy, in [0, pi/2).
    pub fn theta(&self) -> f64 {
        (self.y as f64).atan2(self.x as f64)
    }
}

/// Gaussian-integer product (for tests of multiplicativity).
pub fn gaussian_mul(a: (i64, i64), b: (i64, i64)) -> (i64, i64) {
    (a.0 * b.0 - a.1 * b.1, a.0 * b.1 + a.1 * b.0)
}

/// All representatives with norm <= `norm_bound`, sorted ascending by norm
/// and, within a norm shell, by angle (equivalently by y). Deterministic.
pub fn enumerate_reps(norm_bound: i64) -> Result<Vec<UnitOrbitRep>> {
    if norm_bound < 1 {
        return Err(Error::Domain(format!(
            "norm_bound must be >= 1, got {norm_bound}"
        )));
    }
    if norm_bound > i64::MAX / 4 {
        return Err(Error::Overflow(
            "norm_bound exceeds the representable range of x^2 + y^2".into(),
        ));
    }
    let xmax = (norm_bound as f64).sqrt() as i64 + 1;
    let mut reps = Vec::with_capacity((0.8 * norm_bound as f64) as usize + 8);
    for x in 1..=xmax {
        let xx = x * x;
        if xx > norm_bound {
            break;
        }
        let mut y = 0i64;
        loop {
            let n = xx + y * y;
            if n > norm_bound {
                break;
            }
            reps.push(UnitOrbitRep { x, y });
            y += 1;
        }
    }
    reps.sort_by_key(|r| (r.norm(), r.y));
    Ok(reps)
}

/// chi_n(a) = (a/|a|)^{4n} = exp(4 i n theta_a); unit modulus.
pub fn hecke_char(a: UnitOrbitRep, n: CharacterIndex) -> C64 {
    let ang = 4.0 * n as f64 * a.theta();
    c64(ang.cos(), ang.sin())
}

/// x_a = 2 theta_a / pi in [0, 1); zero exactly when a lies on the real axis.
pub fn angle_fraction(a: UnitOrbitRep) -> f64 {
    if a.y == 0 {
        return 0.0;
    }
    2.0 * a.theta() / std::f64::consts::PI
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_enumerations_are_exact() {
        let reps = enumerate_reps(2).unwrap();
        let got: Vec<(i64, i64)> = reps.iter().map(|r| (r.x, r.y)).collect();
        assert_eq!(got, vec![(1, 0), (1, 1)]);
        assert_eq!(reps.iter().map(|r| r.norm()).collect::<Vec<_>>(), vec![1, 2]);

        let reps = enumerate_reps(5).unwrap();
        let got: Vec<(i64, i64)> = reps.iter().map(|r| (r.x, r.y)).collect();
        assert_eq!(got, vec![(1, 0), (1, 1), (2, 0), (2, 1), (1, 2)]);
        assert_eq!(
            reps.iter().map(|r| r.norm()).collect::<Vec<_>>(),
            vec![1, 2, 4, 5, 5]
        );
        assert!(matches!(enumerate_reps(0), Err(Error::Domain(_))));
    }

    #[test]
    fn count_matches_brute_force_and_gauss_circle() {
        // Brute force: count lattice points with 0 < N <= B, divide by 4.
        let bound = 10_000i64;
        let r = (bound as f64).sqrt() as i64 + 1;
        let mut lattice = 0i64;
        for x in -r..=r {
            for y in -r..=r {
                if (x != 0 || y != 0) && x * x + y * y <= bound {
                    lattice += 1;
                }
            }
        }
        let reps = enumerate_reps(bound).unwrap();
        assert_eq!(reps.len() as i64 * 4, lattice);

        for &b in &[100i64, 1_000, 10_000, 100_000] {
            let count = enumerate_reps(b).unwrap().len() as f64;
            let expect = std::f64::consts::PI * b as f64 / 4.0;
            let slack = 3.0 * (b as f64).sqrt() + 10.0;
            assert!((count - expect).abs() <= slack, "B={b}");
        }
    }

    #[test]
    fn unit_invariance_of_reduction() {
        for &(x, y) in &[(3i64, 2i64), (1, 0), (0, 5), (-4, 7), (2, -9)] {
            let base = UnitOrbitRep::reduce(x, y).unwrap();
            for rot in [(-y, x), (-x, -y), (y, -x)] {
                assert_eq!(UnitOrbitRep::reduce(rot.0, rot.1).unwrap(), base);
            }
        }
        assert!(UnitOrbitRep::reduce(0, 0).is_err());
    }

    #[test]
    fn character_trivial_values() {
        // a = 1+i: chi_n = (-1)^n.
        let a = UnitOrbitRep::new(1, 1).unwrap();
        for n in -3..=3i64 {
            let want = if n.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
            assert!((hecke_char(a, n) - c64(want, 0.0)).norm() < 1e-14);
        }
        // a = 2+i, n = 1: (2+i)^4 / 25 = (-7+24i)/25.
        let a = UnitOrbitRep::new(2, 1).unwrap();
        let got = hecke_char(a, 1);
        assert!((got - c64(-0.28, 0.96)).norm() < 1e-14, "got={got}");
        // a = 3+2i, n = 2: (3+2i)^8 / 13^4 = (-239 - 28560 i)/28561 by exact
        // integer arithmetic.
        let mut z = (3i64, 2i64);
        for _ in 0..3 {
            z = gaussian_mul(z, z); // (3+2i)^8
        }
        assert_eq!(z, (-239, -28560));
        let a = UnitOrbitRep::new(3, 2).unwrap();
        let want = c64(z.0 as f64 / 28561.0, z.1 as f64 / 28561.0);
        assert!((hecke_char(a, 2) - want).norm() < 1e-13);
    }

    #[test]
    fn character_algebra() {
        let reps = [(2i64, 1i64), (3, 2), (5, 0), (1, 1), (4, 3)];
        for &(ax, ay) in &reps {
            let a = UnitOrbitRep::reduce(ax, ay).unwrap();
            // chi_0 = 1, chi_{-n} = conj(chi_n), |chi_n| = 1.
            assert!((hecke_char(a, 0) - c64(1.0, 0.0)).norm() < 1e-15);
            for n in 1..=4i64 {
                let plus = hecke_char(a, n);
                let minus = hecke_char(a, -n);
                assert!((minus - plus.conj()).norm() < 1e-14);
                assert!((plus.norm() - 1.0).abs() < 1e-15);
            }
            // Multiplicativity on products, after reduction.
            for &(bx, by) in &reps {
                let b = UnitOrbitRep::reduce(bx, by).unwrap();
                let prod = gaussian_mul((a.x(), a.y()), (b.x(), b.y()));
                let ab = UnitOrbitRep::reduce(prod.0, prod.1).unwrap();
                for n in [1i64, 3] {
                    let lhs = hecke_char(ab, n);
                    let rhs = hecke_char(a, n) * hecke_char(b, n);
                    assert!((lhs - rhs).norm() < 1e-13);
                }
            }
        }
    }

    #[test]
    fn angle_fraction_values() {
        assert_eq!(angle_fraction(UnitOrbitRep::new(1, 0).unwrap()), 0.0);
        let half = angle_fraction(UnitOrbitRep::new(1, 1).unwrap());
        assert!((half - 0.5).abs() < 1e-15);
        // 2 atan(1/2) / pi by a high-accuracy arctangent series:
        // atan(t) = sum (-1)^k t^{2k+1} / (2k+1).
        let t: f64 = 0.5;
        let mut atan = 0.0;
        let mut pk = t;
        for k in 0..60 {
            atan += if k % 2 == 0 { pk } else { -pk } / (2 * k + 1) as f64;
            pk *= t * t;
        }
        let want = 2.0 * atan / std::f64::consts::PI;
        let got = angle_fraction(UnitOrbitRep::new(2, 1).unwrap());
        assert!((got - want).abs() < 1e-14, "got={got} want={want}");
        assert!((got - 0.2951672353008665).abs() < 1e-13);
    }
}
