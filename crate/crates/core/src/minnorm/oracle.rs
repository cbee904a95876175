//! Brute-force minimum-norm oracle used for independent verification.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::clf::{Bounds, FeasibleSet};
use crate::error::{Error, Result};
use crate::linalg::{lex_less, linspace, norm, norm_sq};
use crate::minnorm::select::{member, SolverConfig};
use crate::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult<T> {
    pub point: Vec<T>,
    pub norm: T,
    /// Sampling resolution: distance scale between neighbouring samples.
    pub resolution: T,
    pub survivors: usize,
}

fn grid_points<T: Scalar>(b: &Bounds<T>, samples: usize) -> (Vec<Vec<T>>, T) {
    match b.dim() {
        1 => {
            let n = samples.max(2);
            let pts = linspace(b.lower[0], b.upper[0], n);
            let h = (b.upper[0] - b.lower[0]) / T::from_usize(n - 1).unwrap();
            (pts.into_iter().map(|v| vec![v]).collect(), h)
        }
        2 => {
            let n = ((samples as f64).sqrt().ceil() as usize).max(2);
            let a0 = linspace(b.lower[0], b.upper[0], n);
            let a1 = linspace(b.lower[1], b.upper[1], n);
            let nn = T::from_usize(n - 1).unwrap();
            let h0 = (b.upper[0] - b.lower[0]) / nn;
            let h1 = (b.upper[1] - b.lower[1]) / nn;
            let pts = a0
                .iter()
                .flat_map(|u0| a1.iter().map(move |u1| vec![*u0, *u1]))
                .collect();
            (pts, (h0 * h0 + h1 * h1).sqrt())
        }
        _ => unreachable!(),
    }
}

fn random_points<T: Scalar>(b: &Bounds<T>, samples: usize, seed: u64) -> (Vec<Vec<T>>, T) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = b.dim();
    let pts = (0..samples)
        .map(|_| {
            (0..m)
                .map(|i| {
                    let s: f64 = rng.gen();
                    b.lower[i] + (b.upper[i] - b.lower[i]) * T::lit(s)
                })
                .collect()
        })
        .collect();
    let diam = norm(&crate::linalg::sub(&b.upper, &b.lower));
    let res = diam / T::lit((samples.max(1) as f64).powf(1.0 / m as f64));
    (pts, res)
}

/// Samples the base set within `bounds` (grid for 1-D/2-D, seeded uniform otherwise),
/// keeps the points satisfying every cut and returns the one of least norm.
pub fn brute_force_oracle<T: Scalar>(
    set: &FeasibleSet<T>,
    samples: usize,
    seed: u64,
    bounds: Option<&Bounds<T>>,
) -> Result<OracleResult<T>> {
    oracle_with(set, samples, seed, bounds, &SolverConfig::default())
}

pub(crate) fn oracle_with<T: Scalar>(
    set: &FeasibleSet<T>,
    samples: usize,
    seed: u64,
    bounds: Option<&Bounds<T>>,
    cfg: &SolverConfig<T>,
) -> Result<OracleResult<T>> {
    let (pts, resolution) = match set.base() {
        FeasibleSet::Empty => return Err(Error::NoFeasibleSample),
        FeasibleSet::Finite(v) => (v.clone(), T::zero()),
        FeasibleSet::Box(b) | FeasibleSet::Interval1D { bounds: b, .. } => {
            let b = match bounds {
                Some(extra) => b.intersect(extra),
                None => b.clone(),
            };
            if b.is_empty() {
                return Err(Error::NoFeasibleSample);
            }
            if !b.is_bounded() {
                return Err(Error::InvalidArgument(
                    "oracle needs a bounded base set or a bounding box".into(),
                ));
            }
            match b.dim() {
                0 => (vec![vec![]], T::zero()),
                1 | 2 => grid_points(&b, samples),
                _ => random_points(&b, samples, seed),
            }
        }
        FeasibleSet::Cut { .. } => unreachable!("bases are never cuts"),
    };
    let mut best: Option<(Vec<T>, T)> = None;
    let mut survivors = 0;
    for u in pts {
        if !member(set, &u, cfg) {
            continue;
        }
        survivors += 1;
        let n = norm_sq(&u);
        let better = match &best {
            None => true,
            Some((b, bn)) => n < *bn || (n == *bn && lex_less(&u, b)),
        };
        if better {
            best = Some((u, n));
        }
    }
    match best {
        Some((point, n)) => Ok(OracleResult {
            point,
            norm: n.sqrt(),
            resolution,
            survivors,
        }),
        None => Err(Error::NoFeasibleSample),
    }
}

/// Oracle over `[-R, R]^m` with growing `R`, stopping once the box contains the whole
/// ball of the best norm found.
pub(crate) fn oracle_expanding<T: Scalar>(
    set: &FeasibleSet<T>,
    samples: usize,
    seed: u64,
    r0: T,
    cfg: &SolverConfig<T>,
) -> Result<OracleResult<T>> {
    let m = set.dim().ok_or(Error::NoFeasibleSample)?;
    if matches!(set.base(), FeasibleSet::Finite(_)) || set.bounds().is_some_and(|b| b.is_bounded()) {
        return oracle_with(set, samples, seed, None, cfg);
    }
    let mut r = r0.max(T::lit(1e-6));
    for _ in 0..60 {
        let bx = Bounds::new(vec![-r; m], vec![r; m]);
        match oracle_with(set, samples, seed, Some(&bx), cfg) {
            Ok(res) if res.norm <= r => return Ok(res),
            Ok(res) => r = res.norm * T::lit(1.01),
            Err(Error::NoFeasibleSample) => r = r * T::lit(4.0),
            Err(e) => return Err(e),
        }
    }
    Err(Error::NoFeasibleSample)
}

/// [`brute_force_oracle`] on an unbounded set, enlarging a centred box until conclusive.
pub fn brute_force_oracle_unbounded<T: Scalar>(
    set: &FeasibleSet<T>,
    samples: usize,
    seed: u64,
) -> Result<OracleResult<T>> {
    oracle_expanding(set, samples, seed, T::one(), &SolverConfig::default())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clf::ConstraintFn;

    #[test]
    fn singleton_quadratic_found_on_grid_endpoint() {
        let e = std::f64::consts::FRAC_PI_2.exp();
        let gx = 0.1 * 2f64.sqrt();
        let s = FeasibleSet::interval(gx, f64::INFINITY).cut(ConstraintFn::Quadratic1D {
            axis: 0,
            a: e,
            b: 0.0,
            c: -e * gx * gx,
        });
        let bx = Bounds::new(vec![0.0], vec![2.0 * gx]);
        let r = brute_force_oracle(&s, 100_000, 1, Some(&bx)).unwrap();
        assert!((r.norm - gx).abs() <= 2.0 * r.resolution);
    }

    #[test]
    fn empty_cut_yields_no_sample() {
        let s = FeasibleSet::interval(-1.0, 1.0).cut(ConstraintFn::Quadratic1D {
            axis: 0,
            a: 1.0,
            b: 0.0,
            c: 1.0,
        });
        assert_eq!(brute_force_oracle(&s, 100_000, 0, None), Err(Error::NoFeasibleSample));
    }

    #[test]
    fn unbounded_set_needs_bounds() {
        let s: FeasibleSet<f64> = FeasibleSet::full(1);
        assert!(matches!(
            brute_force_oracle(&s, 10, 0, None),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn random_sampling_is_deterministic() {
        let s: FeasibleSet<f64> =
            FeasibleSet::Box(Bounds::new(vec![-1.0; 3], vec![1.0; 3])).cut(ConstraintFn::Affine {
                offset: 0.5,
                slope: vec![-1.0, 0.0, 0.0],
            });
        let a = brute_force_oracle(&s, 5000, 42, None).unwrap();
        let b = brute_force_oracle(&s, 5000, 42, None).unwrap();
        assert_eq!(a, b);
        assert!(a.point[0] >= 0.5);
    }
}
