use focklab::criteria::{classify, classify_with, m_profile, symbolic_profile, Regime, Verdict};
use focklab::fock::{fock_norm, polar_grid};
use focklab::operator::{
    empirical_norm, f2_compression, matrix_sigma_max, Family, LinearOperator, WeightedCompositionOperator,
};
use focklab::quadrature::{gaussian_integral, PowerIntegrand, QuadratureSpec};
use focklab::sampling::Sampler;
use focklab::symbol::{parse_symbol, AffineMap, EntireFunction, FockIndex};
use focklab::topology::{distance_lower_bound, separation_grid};
use num_complex::Complex64;
use proptest::prelude::*;

fn fi(p: f64) -> FockIndex {
    FockIndex::new(p).unwrap()
}

fn close(x: Complex64, y: Complex64, scale: f64, tol: f64) -> bool {
    (x - y).norm() <= tol * scale.max(1e-300)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn add_and_mul_are_pointwise(seed in any::<u64>()) {
        let mut s = Sampler::new(seed);
        let (f, g) = (s.function(), s.function());
        let (sum, prod) = (f.add(&g), f.mul(&g));
        for _ in 0..200 {
            let z = s.disc(10.0);
            let (fz, gz) = (f.evaluate(z), g.evaluate(z));
            prop_assert!(close(sum.evaluate(z), fz + gz, fz.norm() + gz.norm(), 1e-10));
            prop_assert!(close(prod.evaluate(z), fz * gz, fz.norm() * gz.norm(), 1e-10));
        }
    }

    #[test]
    fn composition_law(seed in any::<u64>()) {
        let mut s = Sampler::new(seed);
        let f = s.function();
        let (phi1, phi2) = (s.contraction(), s.contraction());
        let both = phi1.compose(&phi2).unwrap();
        let lhs = f.compose_affine(&phi1).compose_affine(&phi2);
        let rhs = f.compose_affine(&both);
        for _ in 0..50 {
            let z = s.disc(10.0);
            let scale = f.growth_envelope(both.apply(z).norm());
            prop_assert!(close(lhs.evaluate(z), rhs.evaluate(z), scale, 1e-10));
            prop_assert!(close(rhs.evaluate(z), f.evaluate(both.apply(z)), scale, 1e-10));
        }
    }

    #[test]
    fn derivative_matches_central_differences(seed in any::<u64>()) {
        let mut s = Sampler::new(seed);
        let f = s.function();
        let df = f.differentiate();
        let h = 1e-5;
        for _ in 0..50 {
            let z = s.disc(5.0);
            let fd = (f.evaluate(z + h) - f.evaluate(z - h)) / (2.0 * h);
            let scale = df.evaluate(z).norm() + f.growth_envelope(z.norm() + h);
            prop_assert!(close(df.evaluate(z), fd, scale, 1e-5));
        }
    }

    #[test]
    fn envelope_dominates_circle_maxima(seed in any::<u64>()) {
        let mut s = Sampler::new(seed);
        let f = s.function();
        for r in [1.0, 2.0, 4.0, 8.0] {
            let env = f.growth_envelope(r);
            for k in 0..720 {
                let z = Complex64::from_polar(r, std::f64::consts::TAU * k as f64 / 720.0);
                prop_assert!(f.evaluate(z).norm() <= env * (1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn render_round_trip(seed in any::<u64>()) {
        let f = Sampler::new(seed).function();
        let g = parse_symbol(&f.render()).unwrap();
        prop_assert!(f.approx_eq(&g, 0.0));
    }

    #[test]
    fn operator_is_pointwise(seed in any::<u64>()) {
        let mut s = Sampler::new(seed);
        let w = s.compact_operator(fi(2.0), fi(2.0));
        let f = s.function();
        let wf = w.apply(&f);
        for _ in 0..100 {
            let z = s.disc(6.0);
            let want = w.psi().evaluate(z) * f.evaluate(w.phi().apply(z));
            let scale = w.psi().growth_envelope(z.norm()) * f.growth_envelope(w.phi().apply(z).norm());
            prop_assert!(close(wf.evaluate(z), want, scale, 1e-10));
        }
    }
}

#[test]
fn doubling_panel_order_stays_within_error() {
    let coarse = QuadratureSpec::default();
    let fine = QuadratureSpec {
        radial_panel_order: 2 * coarse.radial_panel_order,
        ..coarse
    };
    let mut s = Sampler::new(11);
    for _ in 0..20 {
        let f = s.function();
        let p = s.uniform(0.5, 4.0);
        let g = PowerIntegrand::new(&f, p);
        let a = gaussian_integral(&g, p, &coarse).unwrap();
        let b = gaussian_integral(&g, p, &fine).unwrap();
        let slack = a.error_estimate + b.error_estimate + 1e-14 * a.value;
        assert!(
            (a.value - b.value).abs() <= slack,
            "{} vs {} (err {})",
            a.value,
            b.value,
            a.error_estimate
        );
    }
}

#[test]
fn norm_is_homogeneous_and_definite() {
    let spec = QuadratureSpec::default();
    let mut s = Sampler::new(12);
    for _ in 0..20 {
        let f = s.function();
        let c = s.disc(3.0) + 0.1;
        let p = fi(s.uniform(0.5, 4.0));
        let n = fock_norm(&f, p, &spec).unwrap().value;
        let m = fock_norm(&f.scale(c), p, &spec).unwrap().value;
        assert!(n > 0.0);
        assert!((m / (c.norm() * n) - 1.0).abs() < 1e-9);
    }
    assert_eq!(fock_norm(&EntireFunction::zero(), fi(1.0), &spec).unwrap().value, 0.0);
}

#[test]
fn compression_norms_increase_with_order() {
    let mut s = Sampler::new(13);
    for _ in 0..10 {
        let w = s.bounded_operator(fi(2.0), fi(2.0));
        let m = symbolic_profile(w.psi(), w.phi()).sup;
        let k = focklab::criteria::bracket_constant(w.p(), w.q(), w.phi());
        let mut last = 0.0;
        for n in [8, 16, 32, 64] {
            let sigma = matrix_sigma_max(&f2_compression(&w, n).unwrap()).unwrap();
            assert!(sigma >= last * (1.0 - 1e-8), "order {n}: {sigma} < {last}");
            assert!(sigma <= k * m * (1.0 + 1e-8));
            last = sigma;
        }
    }
}

#[test]
fn empirical_norm_within_bracket() {
    let spec = QuadratureSpec::default();
    let family = Family {
        kernel_radii: 6,
        kernel_angles: 8,
        max_monomial_degree: 10,
        ..Family::default()
    };
    let mut s = Sampler::new(14);
    for (p, q) in [(2.0, 2.0), (1.0, 2.0), (2.0, 3.0), (3.0, 2.0), (2.0, 1.0)] {
        let w = s.bounded_operator(fi(p), fi(q));
        let c = classify_with(&w, &spec, &family).unwrap();
        let e = empirical_norm(&w, &family, &spec).unwrap().value;
        assert!(
            e <= c.norm_upper * (1.0 + 1e-6),
            "(p, q) = ({p}, {q}): {e} > {}",
            c.norm_upper
        );
        if q >= p {
            assert!(c.norm_lower <= c.norm_upper);
        } else {
            assert!(e <= c.norm_lower * (1.0 + 1e-12));
        }
    }
}

#[test]
fn numeric_sup_agrees_with_symbolic() {
    let mut s = Sampler::new(15);
    let radii: Vec<f64> = (1..=10).map(|k| 2f64.powi(k)).collect();
    for k in 0..48 {
        let modulus = [0.0, 0.3, 0.9, 1.0][k % 4];
        let a = s.unimodular() * modulus;
        let phi = AffineMap::new(a, s.disc(1.0)).unwrap();
        let psi = s.function();
        let prof = m_profile(&psi, &phi, &radii);
        if prof.symbolic_sup.is_finite() {
            let rel = (prof.numeric_sup / prof.symbolic_sup - 1.0).abs();
            assert!(
                rel < 1e-6,
                "|a| = {modulus}: numeric {} symbolic {}",
                prof.numeric_sup,
                prof.symbolic_sup
            );
        } else {
            assert!(
                prof.numeric_diverges(),
                "|a| = 1 profile with ψ = {} did not diverge",
                psi.render()
            );
        }
    }
}

#[test]
fn classification_is_scale_invariant() {
    let spec = QuadratureSpec::default();
    let mut s = Sampler::new(16);
    for (p, q) in [(2.0, 2.0), (1.0, 3.0), (3.0, 2.0)] {
        for _ in 0..4 {
            let w = s.bounded_operator(fi(p), fi(q));
            let c = s.disc(2.0) + 0.05;
            let scaled = WeightedCompositionOperator::new(w.psi().scale(c), *w.phi(), w.p(), w.q()).unwrap();
            let family = Family {
                kernel_radii: 3,
                kernel_angles: 4,
                max_monomial_degree: 4,
                ..Family::default()
            };
            let a = classify_with(&w, &spec, &family).unwrap();
            let b = classify_with(&scaled, &spec, &family).unwrap();
            assert_eq!(a.verdict, b.verdict);
        }
    }
}

#[test]
fn q_below_p_consistency() {
    let spec = QuadratureSpec::default();
    let mut s = Sampler::new(17);
    for k in 0..8 {
        let (p, q) = (fi(3.0), fi(2.0));
        let w = if k % 2 == 0 {
            s.compact_operator(p, q)
        } else {
            s.leaf_operator(p, q)
        };
        let c = classify(&w, &spec).unwrap();
        let ls = c.ls_norm.unwrap();
        let unit = matches!(c.regime, Regime::UnitModulus { .. });
        assert_eq!(c.verdict == Verdict::Unbounded, !ls.is_finite());
        assert_eq!(c.verdict == Verdict::Unbounded, unit);
        assert_eq!(c.verdict == Verdict::Compact, ls.is_finite());
    }
}

#[test]
fn berezin_dominates_m() {
    let spec = QuadratureSpec::default();
    let mut s = Sampler::new(18);
    for _ in 0..4 {
        let w = s.bounded_operator(fi(2.0), fi(1.5));
        for z in polar_grid(3.0, 10, 8) {
            let m = focklab::criteria::m_at(w.psi(), w.phi(), z);
            let b = w.berezin(w.phi().apply(z), &spec).unwrap();
            assert!(m.powf(1.5) <= b * (1.0 + 1e-8));
        }
    }
}

#[test]
fn separation_below_triangle_bound() {
    let spec = QuadratureSpec::default();
    let grid = separation_grid(4.0);
    let mut s = Sampler::new(19);
    for _ in 0..3 {
        let (phi1, phi2) = (s.contraction(), s.contraction());
        let d = distance_lower_bound(&phi1, &phi2, fi(2.0), fi(2.0), &grid, &spec).unwrap();
        let upper = |phi: AffineMap| {
            classify(&WeightedCompositionOperator::composition(phi, fi(2.0), fi(2.0)), &spec)
                .unwrap()
                .norm_upper
        };
        assert!(d <= upper(phi1) + upper(phi2));
    }
}
