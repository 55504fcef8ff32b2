//! The property and oracle suite behind `focklab verify` and the
//! acceptance tests: twelve criteria, each replayable from a seed.

use num_complex::Complex64;
use serde::Serialize;

use crate::criteria::{
    bracket_constant, classify, default_annulus_radii, essential_norm_bracket, ls_bound_constant, ls_norm_of_m, m_at,
    m_profile, symbolic_profile, Verdict,
};
use crate::fock::{
    check_derivative_bound, check_embedding, check_pointwise_bound, default_check_grid, fock_norm, kernel, polar_grid,
    BOUND_SLACK,
};
use crate::operator::{
    f2_compression, f2_matrix, matrix_sigma_max, LinearOperator, OperatorError, WeightedCompositionOperator,
};
use crate::quadrature::{gaussian_integral, PowerIntegrand, QuadratureSpec};
use crate::sampling::Sampler;
use crate::symbol::{AffineMap, EntireFunction, FockIndex};
use crate::topology::{
    compact_difference, component_id, distance_lower_bound, is_isolated, separation_grid, weight_path_symbol,
    ComponentKind, DifferenceReason, TopologyError,
};

/// Relative slack on the truncated-matrix bracket.
pub const MATRIX_SLACK: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyConfig {
    pub spec: QuadratureSpec,
    pub matrix_order: usize,
    pub grid_radius: f64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            spec: QuadratureSpec::default(),
            matrix_order: 64,
            grid_radius: 6.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionOutcome {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub checks: usize,
    pub failures: usize,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub passed: usize,
    pub failed: usize,
    pub criteria: Vec<CriterionOutcome>,
}

pub const CRITERIA: [&str; 12] = [
    "kernel normalization",
    "monomial oracle",
    "pointwise and derivative bounds",
    "embedding",
    "norm chain",
    "diagonal oracle and matrix bracket",
    "classification truth table",
    "essential norm",
    "separation",
    "compact-difference table",
    "components and isolation",
    "q<p explicit bound",
];

#[derive(Default)]
struct Tally {
    checks: usize,
    failures: usize,
    first_failure: Option<String>,
    worst: f64,
}

impl Tally {
    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failures += 1;
            if self.first_failure.is_none() {
                self.first_failure = Some(what());
            }
        }
    }

    fn track(&mut self, x: f64) {
        if x.is_nan() || x > self.worst {
            self.worst = x;
        }
    }

    fn fail(&mut self, what: String) {
        self.check(false, || what);
    }

    fn finish(self, id: usize, metric: &str) -> CriterionOutcome {
        let mut detail = format!("{} checks, {metric} {:.3e}", self.checks, self.worst);
        if let Some(f) = &self.first_failure {
            detail.push_str(&format!("; first failure: {f}"));
        }
        CriterionOutcome {
            id,
            name: CRITERIA[id - 1],
            passed: self.failures == 0 && self.checks > 0,
            checks: self.checks,
            failures: self.failures,
            detail,
        }
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn fi(p: f64) -> FockIndex {
    FockIndex::new(p).expect("valid exponent")
}

fn map(a: Complex64, b: Complex64) -> AffineMap {
    AffineMap::new(a, b).expect("finite coefficients")
}

fn within(x: f64, bound: f64) -> bool {
    x <= bound * (1.0 + BOUND_SLACK)
}

fn sampler(seed: u64, id: usize) -> Sampler {
    Sampler::new(seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(id as u64))
}

fn ln_factorial(n: usize) -> f64 {
    (1..=n).map(|k| (k as f64).ln()).sum()
}

/// Runs criterion `id` (1 to 12).
pub fn run_criterion(id: usize, seed: u64, config: &VerifyConfig) -> CriterionOutcome {
    let spec = &config.spec;
    let mut rng = sampler(seed, id);
    let mut t = Tally::default();
    match id {
        1 => {
            for w in [c(0.0, 0.0), c(1.0, 1.0), c(3.0, -2.0), c(4.0, 0.0)] {
                for p in [0.5, 1.0, 2.0, 3.7] {
                    match fock_norm(&kernel(w), fi(p), spec) {
                        Ok(n) => {
                            let dev = (n.value - 1.0).abs();
                            t.track(dev);
                            t.check(dev < 1e-8, || format!("‖k_{w}‖_{p} = {}", n.value));
                        }
                        Err(e) => t.fail(format!("w = {w}, p = {p}: {e}")),
                    }
                }
            }
            t.finish(id, "max |‖k_w‖ − 1|")
        }
        2 => {
            for n in 0..=12 {
                let exact = (0.5 * ln_factorial(n)).exp();
                match fock_norm(&EntireFunction::monomial(n), fi(2.0), spec) {
                    Ok(v) => {
                        let rel = (v.value / exact - 1.0).abs();
                        t.track(rel);
                        t.check(rel < 1e-8, || format!("‖z^{n}‖_2 = {}", v.value));
                    }
                    Err(e) => t.fail(format!("n = {n}: {e}")),
                }
            }
            for p in [1.0f64, 2.0, 4.0] {
                for n in 0..=12 {
                    let f = EntireFunction::monomial(n);
                    let exact = (n as f64 * (2.0 / p).ln() + ln_factorial(n)).exp();
                    match gaussian_integral(&PowerIntegrand::new(&f, 2.0), p, spec) {
                        Ok(r) => {
                            let rel = (r.value / exact - 1.0).abs();
                            t.track(rel);
                            t.check(rel < 1e-8, || format!("moment n = {n}, p = {p}: {}", r.value));
                        }
                        Err(e) => t.fail(format!("moment n = {n}, p = {p}: {e}")),
                    }
                }
            }
            t.finish(id, "max relative error")
        }
        3 => {
            let grid = default_check_grid();
            for _ in 0..50 {
                let f = rng.function();
                let p = fi(rng.uniform(0.5, 4.0));
                match check_pointwise_bound(&f, p, &grid, spec) {
                    Ok(r) => {
                        t.track(r.max_ratio);
                        t.check(true, String::new);
                    }
                    Err(e) => t.fail(format!("pointwise, f = {}: {e}", f.render())),
                }
                match check_derivative_bound(&f, p, &grid, spec) {
                    Ok(r) => {
                        t.track(r.max_ratio);
                        t.check(true, String::new);
                    }
                    Err(e) => t.fail(format!("derivative, f = {}: {e}", f.render())),
                }
            }
            t.finish(id, "max ratio")
        }
        4 => {
            for _ in 0..100 {
                let f = rng.function();
                for (p, q) in [(0.5, 1.0), (1.0, 2.0), (2.0, 5.0)] {
                    match check_embedding(&f, fi(p), fi(q), spec) {
                        Ok(r) => {
                            t.track(r.ratio);
                            t.check(true, String::new);
                        }
                        Err(e) => t.fail(format!("(p, q) = ({p}, {q}), f = {}: {e}", f.render())),
                    }
                }
            }
            t.finish(id, "max ratio")
        }
        5 => {
            let pairs = [(2.0, 2.0), (1.0, 2.0), (2.0, 3.0), (3.0, 2.0), (2.0, 1.0), (1.5, 1.5)];
            let grid = polar_grid(3.0, 4, 8);
            for k in 0..20 {
                let (p, q) = pairs[k % pairs.len()];
                let w = rng.bounded_operator(fi(p), fi(q));
                let upper = match classify(&w, spec) {
                    Ok(cl) => cl.norm_upper,
                    Err(e) => {
                        t.fail(format!("classify: {e}"));
                        continue;
                    }
                };
                for &z in &grid {
                    let m = m_at(w.psi(), w.phi(), z);
                    match w.berezin(w.phi().apply(z), spec) {
                        Ok(b) => {
                            let b = b.powf(1.0 / q);
                            t.track(m / b);
                            t.track(b / upper);
                            t.check(within(m, b) && within(b, upper), || {
                                format!("z = {z}: m = {m}, berezin^(1/q) = {b}, upper = {upper}")
                            });
                        }
                        Err(e) => t.fail(format!("berezin at z = {z}: {e}")),
                    }
                }
            }
            t.finish(id, "max link ratio")
        }
        6 => {
            for r in [0.3, 0.7, 1.0] {
                let w = WeightedCompositionOperator::composition(
                    map(Complex64::from_polar(r, 0.7), c(0.0, 0.0)),
                    fi(2.0),
                    fi(2.0),
                );
                match f2_matrix(&w, 64).and_then(|m| matrix_sigma_max(&m)) {
                    Ok(s) => {
                        t.track((s - 1.0).abs());
                        t.check((s - 1.0).abs() <= 1e-10, || format!("|a| = {r}: σ = {s}"));
                    }
                    Err(e) => t.fail(format!("|a| = {r}: {e}")),
                }
            }
            for _ in 0..20 {
                let w = rng.bounded_operator(fi(2.0), fi(2.0));
                let m = symbolic_profile(w.psi(), w.phi()).sup;
                let k = bracket_constant(w.p(), w.q(), w.phi());
                match settled_sigma(&w, config.matrix_order) {
                    Ok(s) => {
                        t.track(m / s - 1.0);
                        t.check(
                            m <= s * (1.0 + MATRIX_SLACK) && s <= k * m * (1.0 + MATRIX_SLACK),
                            || {
                                format!(
                                    "ψ = {}, φ = {:?}: m = {m}, σ = {s}, K·m = {}",
                                    w.psi().render(),
                                    w.phi(),
                                    k * m
                                )
                            },
                        );
                    }
                    Err(e) => t.fail(format!("compression: {e}")),
                }
            }
            t.finish(id, "max |σ − 1| or m/σ − 1")
        }
        7 => {
            truth_table(&mut t, spec);
            t.finish(id, "mismatches")
        }
        8 => {
            let rot = WeightedCompositionOperator::composition(
                map(Complex64::from_polar(1.0, 0.9), c(0.0, 0.0)),
                fi(2.0),
                fi(2.0),
            );
            match essential_norm_bracket(&rot) {
                Ok(b) => t.check(b == (1.0, 2.0), || format!("bracket for C_az: {b:?}")),
                Err(e) => t.fail(format!("C_az: {e}")),
            }
            let radii = default_annulus_radii();
            for _ in 0..10 {
                let w = rng.leaf_operator(fi(2.0), fi(2.0));
                let exact = w.psi().evaluate(c(0.0, 0.0)).norm() * (0.5 * w.phi().b().norm_sqr()).exp();
                let numeric = m_profile(w.psi(), w.phi(), &radii).numeric_limsup();
                let rel = (numeric / exact - 1.0).abs();
                t.track(rel);
                t.check(rel < 1e-6, || format!("leaf limsup {numeric} vs {exact}"));
            }
            for _ in 0..5 {
                let w = rng.compact_operator(fi(2.0), fi(2.0));
                let ok = matches!(essential_norm_bracket(&w), Ok(b) if b == (0.0, 0.0))
                    && matches!(classify(&w, spec), Ok(cl) if cl.verdict == Verdict::Compact
                        && cl.ess_lower == 0.0 && cl.ess_upper == 0.0);
                t.check(ok, || {
                    format!("compact operator without (0, 0) bracket: ψ = {}", w.psi().render())
                });
            }
            t.finish(id, "max relative limsup error")
        }
        9 => {
            let grid = separation_grid(config.grid_radius);
            let id_map = AffineMap::identity();
            for other in [map(c(-1.0, 0.0), c(0.0, 0.0)), map(c(0.5, 0.0), c(0.0, 0.0))] {
                match distance_lower_bound(&id_map, &other, fi(2.0), fi(2.0), &grid, spec) {
                    Ok(d) => {
                        t.track(1.0 - d);
                        t.check(d >= 0.99, || format!("C_z − C_φ′ with a′ = {}: {d}", other.a()));
                    }
                    Err(e) => t.fail(format!("{e}")),
                }
            }
            t.finish(id, "max 1 − distance")
        }
        10 => {
            difference_table(&mut t, &mut rng);
            t.finish(id, "mismatches")
        }
        11 => {
            component_table(&mut t, &mut rng, spec);
            t.finish(id, "mismatches")
        }
        12 => {
            let pairs = [(3.0, 2.0), (2.0, 1.0), (4.0, 1.5), (1.5, 0.75)];
            for k in 0..10 {
                let (p, q) = pairs[k % pairs.len()];
                let w = rng.compact_operator(fi(p), fi(q));
                let ls = match ls_norm_of_m(w.psi(), w.phi(), w.p(), w.q(), spec) {
                    Ok(v) if v.is_finite() => v,
                    Ok(v) => {
                        t.fail(format!("ls_norm = {v} for a compact operator"));
                        continue;
                    }
                    Err(e) => {
                        t.fail(format!("ls_norm: {e}"));
                        continue;
                    }
                };
                let bound = ls_bound_constant(w.p(), w.q(), w.phi()) * ls;
                for _ in 0..20 {
                    let f = rng.function();
                    let norms = fock_norm(&w.apply(&f), w.q(), spec).and_then(|l| Ok((l, fock_norm(&f, w.p(), spec)?)));
                    match norms {
                        Ok((lhs, nf)) => {
                            let rhs = bound * nf.value;
                            t.track(lhs.value / rhs);
                            t.check(within(lhs.value, rhs), || {
                                format!("‖Wf‖_q = {} > {rhs} for f = {}", lhs.value, f.render())
                            });
                        }
                        Err(e) => t.fail(format!("f = {}: {e}", f.render())),
                    }
                }
            }
            t.finish(id, "max ‖Wf‖_q / bound")
        }
        _ => CriterionOutcome {
            id,
            name: "unknown",
            passed: false,
            checks: 0,
            failures: 1,
            detail: format!("no criterion {id}"),
        },
    }
}

/// `σ_max` of `P_N W P_N`, growing `N` from `order` by factors of 3/2 until it
/// settles to 1e-9 or reaches `4·order`.
fn settled_sigma(w: &WeightedCompositionOperator, order: usize) -> Result<f64, OperatorError> {
    let mut n = order;
    let mut sigma = matrix_sigma_max(&f2_compression(w, n)?)?;
    while n < 4 * order {
        n += n / 2;
        let next = matrix_sigma_max(&f2_compression(w, n)?)?;
        let settled = next - sigma <= 1e-9 * next;
        sigma = next;
        if settled {
            break;
        }
    }
    Ok(sigma)
}

fn truth_table(t: &mut Tally, spec: &QuadratureSpec) {
    let rot = Complex64::from_polar(1.0, 0.4);
    let one = EntireFunction::one();
    let leaf_psi =
        |phi: &AffineMap| EntireFunction::exp_linear(c(0.7, -0.2), -phi.b().conj() * phi.a()).expect("finite");
    let rot_b = map(rot, c(1.0, 0.0));
    #[rustfmt::skip]
    let rows: Vec<(EntireFunction, AffineMap, Verdict, Verdict)> = vec![
        (one.clone(), map(c(0.0, 0.0), c(1.0, 0.0)), Verdict::Compact, Verdict::Compact),
        (one.clone(), map(c(0.5, 0.0), c(1.0, 0.0)), Verdict::Compact, Verdict::Compact),
        (one.clone(), map(rot, c(0.0, 0.0)), Verdict::BoundedNonCompact, Verdict::Unbounded),
        (one.clone(), rot_b, Verdict::Unbounded, Verdict::Unbounded),
        (leaf_psi(&rot_b), rot_b, Verdict::BoundedNonCompact, Verdict::Unbounded),
        (EntireFunction::z(), map(rot, c(0.0, 0.0)), Verdict::Unbounded, Verdict::Unbounded),
        (EntireFunction::exp_linear(c(1.0, 0.0), c(3.0, 0.0)).expect("finite"), map(c(0.5, 0.0), c(0.0, 0.0)), Verdict::Compact, Verdict::Compact),
        (EntireFunction::z(), map(c(0.0, 0.0), c(0.0, 1.0)), Verdict::Compact, Verdict::Compact),
    ];
    for (psi, phi, small, large) in rows {
        for (p, q, want) in [(2.0, 2.0, small), (1.0, 2.0, small), (3.0, 2.0, large)] {
            let w = WeightedCompositionOperator::new(psi.clone(), phi, fi(p), fi(q)).expect("nonzero");
            match classify(&w, spec) {
                Ok(cl) => {
                    t.check(cl.verdict == want, || {
                        format!(
                            "ψ = {}, a = {}, b = {}, (p, q) = ({p}, {q}): {:?}, want {want:?}",
                            psi.render(),
                            phi.a(),
                            phi.b(),
                            cl.verdict
                        )
                    });
                    if cl.verdict != want {
                        t.worst += 1.0;
                    }
                }
                Err(e) => t.fail(format!("ψ = {}: {e}", psi.render())),
            }
        }
    }
    let w = WeightedCompositionOperator::composition(map(c(0.5, 0.0), c(0.0, 0.0)), fi(2.0), fi(2.0));
    match classify(&w, spec) {
        Ok(cl) => t.check(
            cl.verdict == Verdict::Compact
                && (cl.norm_lower - 1.0).abs() < 1e-12
                && (cl.norm_upper - 2.0).abs() < 1e-12,
            || format!("C_(z/2) bracket [{}, {}]", cl.norm_lower, cl.norm_upper),
        ),
        Err(e) => t.fail(format!("C_(z/2): {e}")),
    }
}

fn difference_table(t: &mut Tally, rng: &mut Sampler) {
    let (p, q) = (fi(2.0), fi(2.0));
    let half = map(c(0.5, 0.0), c(0.0, 0.0));
    let op = |psi: EntireFunction, phi: AffineMap| WeightedCompositionOperator::new(psi, phi, p, q).expect("nonzero");
    let leaf =
        |coef: Complex64, phi: &AffineMap| EntireFunction::exp_linear(coef, -phi.b().conj() * phi.a()).expect("finite");
    let unit = map(Complex64::from_polar(1.0, 1.1), c(1.0, 0.0));
    let rows = [
        (
            op(EntireFunction::one(), half),
            op(EntireFunction::z().add(&EntireFunction::one()), half),
            Some(DifferenceReason::BothCompact),
        ),
        (
            op(EntireFunction::one(), AffineMap::identity()),
            op(EntireFunction::one(), map(c(-1.0, 0.0), c(0.0, 0.0))),
            Some(DifferenceReason::NotCompact),
        ),
        (
            op(leaf(c(1.0, 0.0), &unit), unit),
            op(leaf(c(0.3, 0.4), &unit), unit),
            Some(DifferenceReason::NotCompact),
        ),
    ];
    for (w1, w2, want) in rows {
        match compact_difference(&w1, &w2) {
            Ok(v) => t.check(
                Some(v.reason) == want && v.compact == (v.reason != DifferenceReason::NotCompact),
                || format!("row {:?}: got {:?}", want, v.reason),
            ),
            Err(e) => t.fail(format!("{e}")),
        }
    }

    for k in 0..20 {
        let (w1, w2) = match k % 4 {
            0 => (rng.compact_operator(p, q), rng.compact_operator(p, q)),
            1 => {
                let phi = rng.unit_map();
                (rng.leaf_operator_on(phi, p, q), rng.leaf_operator_on(phi, p, q))
            }
            2 => (rng.compact_operator(p, q), rng.leaf_operator(p, q)),
            _ => (rng.leaf_operator(p, q), rng.leaf_operator(p, q)),
        };
        match (compact_difference(&w1, &w2), compact_difference(&w2, &w1)) {
            (Ok(a), Ok(b)) => t.check(a.compact == b.compact && a.reason == b.reason, || {
                format!("asymmetric verdict {:?} vs {:?}", a.reason, b.reason)
            }),
            (a, b) => t.fail(format!("pair {k}: {a:?} / {b:?}")),
        }
        for w in [&w1, &w2] {
            match compact_difference(w, w) {
                Ok(v) => t.check(v.compact && v.reason == DifferenceReason::SameSymbolVanishing, || {
                    format!("self-difference gave {:?}", v.reason)
                }),
                Err(e) => t.fail(format!("self-difference: {e}")),
            }
        }
    }
}

fn component_table(t: &mut Tally, rng: &mut Sampler, spec: &QuadratureSpec) {
    let rot = Complex64::from_polar(1.0, 0.4);
    let op = |psi: EntireFunction, phi: AffineMap, p: f64, q: f64| {
        WeightedCompositionOperator::new(psi, phi, fi(p), fi(q)).expect("nonzero")
    };
    let one_one = map(c(1.0, 0.0), c(1.0, 0.0));
    let three_plus_z = EntireFunction::z().add(&EntireFunction::constant(c(3.0, 0.0)));
    let leaf_psi = EntireFunction::exp_linear(c(1.0, 0.0), c(-1.0, 0.0)).expect("finite");
    type Want = Result<(ComponentKind, Option<(Complex64, Complex64)>), TopologyError>;
    let comps: Vec<(WeightedCompositionOperator, Want)> = vec![
        (
            op(three_plus_z, map(c(0.5, 0.0), c(2.0, 0.0)), 1.0, 2.0),
            Ok((ComponentKind::CompactBulk, None)),
        ),
        (
            op(leaf_psi, one_one, 2.0, 2.0),
            Ok((ComponentKind::UnitModulusLeaf, Some((c(1.0, 0.0), c(1.0, 0.0))))),
        ),
        (
            op(EntireFunction::z(), map(c(0.3, 0.1), c(1.0, 0.0)), 3.0, 2.0),
            Ok((ComponentKind::AllConnected, None)),
        ),
        (
            op(EntireFunction::one(), map(rot, c(0.0, 0.0)), 2.0, 2.0),
            Ok((ComponentKind::UnitModulusLeaf, Some((rot, c(0.0, 0.0))))),
        ),
        (
            op(EntireFunction::z(), map(c(0.0, 0.0), c(1.0, 1.0)), 2.0, 2.0),
            Ok((ComponentKind::CompactBulk, None)),
        ),
        (
            op(EntireFunction::one(), one_one, 2.0, 2.0),
            Err(TopologyError::NotBounded),
        ),
        (
            op(EntireFunction::one(), map(rot, c(0.0, 0.0)), 3.0, 2.0),
            Err(TopologyError::NotBounded),
        ),
    ];
    for (w, want) in comps {
        let got = component_id(&w).map(|id| (id.kind, id.leaf_key));
        t.check(got == want, || {
            format!("component of ψ = {}, φ = {:?}: {got:?}", w.psi().render(), w.phi())
        });
    }
    let isolated: Vec<(AffineMap, f64, f64, Result<bool, ()>)> = vec![
        (map(rot, c(0.0, 0.0)), 2.0, 2.0, Ok(true)),
        (map(c(0.5, 0.0), c(1.0, 0.0)), 1.0, 2.0, Ok(false)),
        (map(c(0.0, 0.0), c(1.0, 0.0)), 2.0, 2.0, Ok(false)),
        (AffineMap::identity(), 3.0, 2.0, Err(())),
        (one_one, 2.0, 2.0, Err(())),
    ];
    for (phi, p, q, want) in isolated {
        let got = is_isolated(&phi, fi(p), fi(q)).map_err(|_| ());
        t.check(got == want, || {
            format!(
                "is_isolated(a = {}, b = {}, p = {p}, q = {q}) = {got:?}",
                phi.a(),
                phi.b()
            )
        });
    }

    for k in 0..5 {
        let phi = rng.unit_map();
        let w1 = rng.leaf_operator_on(phi, fi(2.0), fi(2.0));
        let w2 = if k == 0 {
            WeightedCompositionOperator::new(w1.psi().scale(c(-1.0, 0.0)), phi, fi(2.0), fi(2.0)).expect("nonzero")
        } else {
            rng.leaf_operator_on(phi, fi(2.0), fi(2.0))
        };
        for j in 1..=5 {
            let s = j as f64 / 6.0;
            let u = weight_path_symbol(w1.psi(), w2.psi(), s);
            let inside = WeightedCompositionOperator::new(u, phi, fi(2.0), fi(2.0))
                .ok()
                .map(|w| {
                    let bounded = matches!(classify(&w, spec), Ok(cl) if cl.verdict != Verdict::Unbounded);
                    let leaf = component_id(&w).ok().and_then(|id| id.leaf_key) == Some((phi.a(), phi.b()));
                    bounded && leaf
                })
                .unwrap_or(false);
            t.check(inside, || format!("weight path leaves the leaf at t = {s}"));
        }
    }
    for _ in 0..10 {
        let w = rng.bounded_operator(fi(2.0), fi(2.0));
        let compact = matches!(classify(&w, spec), Ok(cl) if cl.verdict == Verdict::Compact);
        let bulk = matches!(component_id(&w), Ok(id) if id.kind == ComponentKind::CompactBulk);
        t.check(compact == bulk, || {
            format!("classify and component disagree for φ = {:?}", w.phi())
        });
    }
}

/// Runs all twelve criteria.
pub fn run_suite(seed: u64, config: &VerifyConfig) -> SuiteReport {
    let criteria: Vec<CriterionOutcome> = (1..=CRITERIA.len()).map(|id| run_criterion(id, seed, config)).collect();
    let passed = criteria.iter().filter(|o| o.passed).count();
    SuiteReport {
        seed,
        passed,
        failed: criteria.len() - passed,
        criteria,
    }
}
