//! Global maximisation of smooth log-objectives on ℂ by multi-start pattern
//! search.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;

const DIRECTIONS: [(f64, f64); 8] = [
    (1.0, 0.0),
    (std::f64::consts::FRAC_1_SQRT_2, std::f64::consts::FRAC_1_SQRT_2),
    (0.0, 1.0),
    (-std::f64::consts::FRAC_1_SQRT_2, std::f64::consts::FRAC_1_SQRT_2),
    (-1.0, 0.0),
    (-std::f64::consts::FRAC_1_SQRT_2, -std::f64::consts::FRAC_1_SQRT_2),
    (0.0, -1.0),
    (std::f64::consts::FRAC_1_SQRT_2, -std::f64::consts::FRAC_1_SQRT_2),
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Maximum {
    pub z: Complex64,
    pub ln_value: f64,
}

/// Step-halving compass search from `start`.
pub(crate) fn ascend(f: &(dyn Fn(Complex64) -> f64 + Sync), start: Complex64, step: f64) -> Maximum {
    let mut z = start;
    let mut v = f(z);
    let mut h = step.max(1e-6);
    let mut iterations = 0;
    while h > 1e-10 * (1.0 + z.norm()) && iterations < 20_000 {
        iterations += 1;
        let best = DIRECTIONS
            .iter()
            .map(|&(dx, dy)| {
                let w = z + Complex64::new(dx * h, dy * h);
                (w, f(w))
            })
            .filter(|(_, fw)| !fw.is_nan())
            .max_by(|a, b| a.1.total_cmp(&b.1));
        match best {
            Some((w, fw)) if fw > v => {
                z = w;
                v = fw;
                h *= 1.25;
            }
            _ => h *= 0.5,
        }
    }
    Maximum { z, ln_value: v }
}

/// Seeds on concentric rings: the origin plus `rings × per_ring` points up
/// to `radius`.
pub(crate) fn polar_seeds(radius: f64, rings: usize, per_ring: usize) -> Vec<Complex64> {
    let mut seeds = vec![Complex64::new(0.0, 0.0)];
    for i in 1..=rings {
        let r = radius * i as f64 / rings as f64;
        for j in 0..per_ring {
            let t = TAU * (j as f64 + 0.5 * (i % 2) as f64) / per_ring as f64;
            seeds.push(Complex64::from_polar(r, t));
        }
    }
    seeds
}

/// Largest `r ≤ cap` with `upper(r) ≥ level`, found on a geometric scan and
/// refined by bisection. Zero when the bound is below `level` everywhere
/// on the scan.
pub(crate) fn reach(upper: &dyn Fn(f64) -> f64, level: f64, cap: f64) -> f64 {
    let mut last_above = 0.0;
    let mut r = 0.25;
    while r <= cap {
        if upper(r) >= level {
            last_above = r;
        }
        r *= 1.25;
    }
    if last_above == 0.0 {
        return 0.0;
    }
    let (mut lo, mut hi) = (last_above, (last_above * 1.25).min(cap));
    for _ in 0..50 {
        let mid = 0.5 * (lo + hi);
        if upper(mid) >= level {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

/// Global maximum of `f` given a radial upper bound `upper(r) ≥ max_{|z|=r} f`.
///
/// Starts from polar seeds within `base_radius`; the search disc is then
/// widened to every radius where `upper` could still beat the incumbent.
pub(crate) fn maximize(f: &(dyn Fn(Complex64) -> f64 + Sync), upper: &dyn Fn(f64) -> f64, base_radius: f64) -> Maximum {
    let cap = 1e4;
    let base = base_radius.clamp(1.0, cap);
    let mut best = multistart(f, &polar_seeds(base, 3, 8), base / 8.0);
    let wide = reach(upper, best.ln_value, cap);
    if wide > base {
        let seeds = scan_candidates(f, wide, 48, 32, 8);
        let more = multistart(f, &seeds, wide / 64.0);
        if more.ln_value > best.ln_value {
            best = more;
        }
    }
    best
}

pub(crate) fn multistart(f: &(dyn Fn(Complex64) -> f64 + Sync), seeds: &[Complex64], step: f64) -> Maximum {
    seeds
        .par_iter()
        .map(|&s| ascend(f, s, step))
        .collect::<Vec<_>>()
        .into_iter()
        .fold(
            Maximum {
                z: Complex64::new(0.0, 0.0),
                ln_value: f64::NEG_INFINITY,
            },
            |acc, m| if m.ln_value > acc.ln_value { m } else { acc },
        )
}

/// The `keep` best points of a polar grid over the disc of the given radius.
pub(crate) fn scan_candidates(
    f: &(dyn Fn(Complex64) -> f64 + Sync),
    radius: f64,
    n_r: usize,
    n_theta: usize,
    keep: usize,
) -> Vec<Complex64> {
    let mut pts: Vec<(Complex64, f64)> = polar_seeds(radius, n_r, n_theta)
        .into_par_iter()
        .map(|z| (z, f(z)))
        .collect();
    pts.sort_by(|a, b| b.1.total_cmp(&a.1));
    pts.truncate(keep);
    pts.into_iter().map(|(z, _)| z).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn concave_quadratic() {
        let c = Complex64::new(1.5, -2.0);
        let f = move |z: Complex64| -(z - c).norm_sqr();
        let m = maximize(&f, &|r| -(r - c.norm()).max(0.0).powi(2), 4.0);
        assert!((m.z - c).norm() < 1e-8);
        assert!(m.ln_value.abs() < 1e-15);
    }

    #[test]
    fn far_peak_found_through_upper_bound() {
        let c = Complex64::new(30.0, 10.0);
        let f = move |z: Complex64| 5.0 - 0.01 * (z - c).norm_sqr();
        let upper = move |r: f64| 5.0 - 0.01 * (r - c.norm()).max(0.0).powi(2);
        let m = maximize(&f, &upper, 2.0);
        assert!((m.ln_value - 5.0).abs() < 1e-10, "{m:?}");
    }

    #[test]
    fn reach_brackets_level() {
        let r = reach(&|r| 10.0 - r, 3.0, 100.0);
        assert!((r - 7.0).abs() < 1e-9);
        assert_eq!(reach(&|_| 0.0, 1.0, 100.0), 0.0);
    }
}
