//! Cross-checks between the floating-point pipeline and its independent
//! evaluators: the exact-rational oracle on losslessly convertible instances,
//! and the four equivalent representations across every space family the
//! ensemble generator can produce.

use chebgruss::bounds::{evaluate_all, BoundFamily, HolderPair};
use chebgruss::ensemble::{generate_instance, EnsembleConfig, ScalarMode, WeightMode};
use chebgruss::functional::{aggregates, chebyshev_direct};
use chebgruss::identities::{
    chebyshev_double_sum, chebyshev_identity1, chebyshev_identity2, chebyshev_identity3,
};
use chebgruss::oracle::{k_one_closed_exact, k_one_exact, t_uniform_ramp_exact, ExactInstance};
use chebgruss::space::{Instance, NormDescriptor, Vector};
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn max_coord_gap(u: &Vector, v: &Vector) -> f64 {
    u.coords()
        .iter()
        .zip(v.coords())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max)
}

fn norms_under_test() -> Vec<(NormDescriptor, usize)> {
    vec![
        (NormDescriptor::lp_real(1.0, 3).unwrap(), 3),
        (NormDescriptor::lp_real(2.0, 3).unwrap(), 3),
        (NormDescriptor::linf_real(3).unwrap(), 3),
        (NormDescriptor::lp_real(2.0, 1).unwrap(), 1),
        (NormDescriptor::real_abs(), 1),
        (NormDescriptor::complex_modulus(), 1),
    ]
}

#[test]
fn representations_agree_across_all_space_families() {
    let modes = [
        WeightMode::Uniform,
        WeightMode::PositiveRandom,
        WeightMode::SignedRandom,
        WeightMode::ProbabilitySimplex,
    ];
    let scalar_modes = [ScalarMode::Real, ScalarMode::Complex];
    let mut checked = 0usize;
    for (norm, dimension) in norms_under_test() {
        for &weight_mode in &modes {
            for &scalar_mode in &scalar_modes {
                let cfg = EnsembleConfig {
                    n: 7,
                    trials: 12,
                    dimension,
                    norm,
                    weight_mode,
                    scalar_mode,
                    holder_p: None,
                    seed: 0xC0FFEE,
                };
                for index in 0..cfg.trials {
                    let generated = generate_instance(&cfg, index).unwrap();
                    let inst = &generated.instance;
                    let agg = aggregates(inst);
                    let tol = 1e-10 * inst.scale().max(1.0);

                    let direct = chebyshev_direct(inst);
                    assert!(max_coord_gap(&chebyshev_identity1(&agg), &direct) <= tol);
                    assert!(max_coord_gap(&chebyshev_double_sum(&agg), &direct) <= tol);
                    if let Ok(v) = chebyshev_identity2(&agg) {
                        assert!(max_coord_gap(&v, &direct) <= tol);
                    }
                    if let Ok(v) = chebyshev_identity3(&agg) {
                        assert!(max_coord_gap(&v, &direct) <= tol);
                    }
                    checked += 1;
                }
            }
        }
    }
    assert_eq!(checked, 6 * 4 * 2 * 12);
}

fn integer_instance(rng: &mut ChaCha8Rng, n: usize, norm: NormDescriptor) -> Instance {
    let d = norm.dimension();
    let weights: Vec<f64> = (0..n).map(|_| rng.random_range(-5..=5) as f64).collect();
    let scalars: Vec<f64> = (0..n).map(|_| rng.random_range(-5..=5) as f64).collect();
    let vectors: Vec<Vector> = (0..n)
        .map(|_| {
            let coords: Vec<f64> = (0..d).map(|_| rng.random_range(-5..=5) as f64).collect();
            Vector::from_real(&coords)
        })
        .collect();
    Instance::from_real(weights, &scalars, vectors, norm).unwrap()
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

#[test]
fn float_pipeline_matches_oracle_on_integer_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let norms = [
        NormDescriptor::real_abs(),
        NormDescriptor::lp_real(1.0, 3).unwrap(),
        NormDescriptor::linf_real(3).unwrap(),
    ];
    for trial in 0..150 {
        let n = 2 + (trial % 7);
        let inst = integer_instance(&mut rng, n, norms[trial % 3]);
        let exact = ExactInstance::from_instance(&inst).unwrap();

        let t_float = evaluate_all(&inst, None);
        let t_exact = exact.t_norm().to_f64().unwrap();
        assert!(
            rel_close(t_float.t_norm, t_exact, 1e-10),
            "t_norm {} vs {}",
            t_float.t_norm,
            t_exact
        );

        for family in BoundFamily::ALL {
            let float_entry = t_float.entry(family);
            match exact.bound(family) {
                None => assert!(
                    !float_entry.bound.applicable(),
                    "{family}: float applicable, oracle not"
                ),
                Some(bound) => {
                    let fv = float_entry
                        .bound
                        .value
                        .unwrap_or_else(|| panic!("{family}: oracle applicable, float not"));
                    let ev = bound.to_f64();
                    assert!(rel_close(fv, ev, 1e-10), "{family}: {fv} vs {ev}");
                    // The oracle also certifies validity without rounding.
                    assert!(bound.at_least(&exact.t_norm()), "{family} exact violation");
                }
            }
        }
    }
}

#[test]
fn oracle_matches_float_on_uniform_rational_weights() {
    let mut rng = ChaCha8Rng::seed_from_u64(19);
    for trial in 0..60u64 {
        let n = 2 + (trial as usize % 7);
        let scalars: Vec<f64> = (0..n).map(|_| rng.random_range(-5..=5) as f64).collect();
        let coords: Vec<f64> = (0..n).map(|_| rng.random_range(-5..=5) as f64).collect();
        let vectors: Vec<Vector> = coords.iter().map(|&c| Vector::from_real(&[c])).collect();
        let inst = Instance::from_real(
            vec![1.0 / n as f64; n],
            &scalars,
            vectors,
            NormDescriptor::real_abs(),
        )
        .unwrap();

        let uniform = BigRational::new(1.into(), (n as i64).into());
        let exact = ExactInstance::new(
            vec![uniform; n],
            scalars
                .iter()
                .map(|&v| BigRational::from_float(v).unwrap())
                .collect(),
            coords
                .iter()
                .map(|&v| vec![BigRational::from_float(v).unwrap()])
                .collect(),
            chebgruss::oracle::ExactNorm::RealAbs,
        )
        .unwrap();

        let report = evaluate_all(&inst, Some(HolderPair::square()));
        for family in BoundFamily::ALL {
            let entry = report.entry(family);
            let exact_bound = exact.bound(family);
            assert_eq!(
                entry.bound.applicable(),
                exact_bound.is_some(),
                "{family} applicability"
            );
            if let (Some(fv), Some(eb)) = (entry.bound.value, exact_bound) {
                assert!(
                    rel_close(fv, eb.to_f64(), 1e-10),
                    "{family}: {} vs {}",
                    fv,
                    eb.to_f64()
                );
            }
        }
    }
}

#[test]
fn kernel_mass_constant_triple_agreement() {
    for n in 2..=50usize {
        // Exact: grid sum, closed form, and the functional route agree as
        // rationals.
        assert_eq!(k_one_exact(n), k_one_closed_exact(n));
        assert_eq!(t_uniform_ramp_exact(n), k_one_closed_exact(n));

        // Float: the functional module on uniform weights and the ramp.
        let ramp: Vec<f64> = (1..=n).map(|i| i as f64).collect();
        let vectors: Vec<Vector> = ramp.iter().map(|&c| Vector::from_real(&[c])).collect();
        let inst = Instance::from_real(
            vec![1.0 / n as f64; n],
            &ramp,
            vectors,
            NormDescriptor::real_abs(),
        )
        .unwrap();
        let through_functional = chebyshev_direct(&inst).coords()[0].re;
        let closed = chebgruss::k_one(n);
        assert!(
            rel_close(through_functional, closed, 1e-12),
            "n={n}: {through_functional} vs {closed}"
        );
        assert!(rel_close(
            chebgruss::constants::k_one_grid(n),
            closed,
            1e-12
        ));
    }
}

#[test]
fn adversarial_search_finds_no_violation_in_any_family() {
    // The hill climber actively hunts for instances where ||T_n|| exceeds the
    // bound; the regularized ratio crossing 1 + 1e-9 would surface as a
    // search error on a broken family.
    let norm = NormDescriptor::lp_real(2.0, 1).unwrap();
    for (i, family) in BoundFamily::ALL.iter().enumerate() {
        let result = chebgruss::sharpness_search(*family, 3, 1, norm, 4_000, 8_000 + i as u64)
            .unwrap_or_else(|e| panic!("{family}: {e}"));
        assert!(result.best_ratio <= 1.0 + 1e-9, "{family}");
    }
}

#[test]
fn reports_stay_violation_free_with_other_holder_exponents() {
    for (seed, holder_p) in [(1u64, 1.5f64), (2, 3.0), (3, 10.0)] {
        let cfg = EnsembleConfig {
            n: 6,
            trials: 40,
            dimension: 3,
            norm: NormDescriptor::lp_real(2.0, 3).unwrap(),
            weight_mode: WeightMode::SignedRandom,
            scalar_mode: ScalarMode::Complex,
            holder_p: Some(holder_p),
            seed,
        };
        let report = chebgruss::run_report(&cfg, true).unwrap();
        assert_eq!(report.total_violations, 0, "holder_p={holder_p}");
    }
}
