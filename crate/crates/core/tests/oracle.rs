use std::time::Instant;

use eit_qhe_core::sampling::draw_params;
use eit_qhe_core::{
    build_generator, derive_rates, rho0, rho1, steady_state, DensityMatrix, SystemParams,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn assert_physical(rho: &DensityMatrix) {
    assert!(
        rho.hermiticity_error() <= 1e-12,
        "hermiticity {}",
        rho.hermiticity_error()
    );
    assert!((rho.trace().re - 1.0).abs() <= 1e-10 && rho.trace().im.abs() <= 1e-10);
    let ev = rho.eigenvalues();
    assert!(ev[0] >= -1e-10, "eigenvalues {ev:?}");
}

#[test]
fn closed_form_matches_master_equation_on_random_draws() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let (params, delta) = draw_params(&mut rng);
        let params = params.with_g(0.0);
        let rates = derive_rates(&params).unwrap();
        let closed = rho0(&params, &rates, delta).unwrap().to_density_matrix();
        let numeric = steady_state(&build_generator(&params, &rates, delta).unwrap()).unwrap();
        assert_physical(&numeric);
        for i in 1..=3 {
            for j in 1..=3 {
                worst = worst.max((closed.get(i, j) - numeric.get(i, j)).norm());
            }
        }
    }
    assert!(worst <= 1e-8, "worst elementwise deviation {worst:e}");
    assert!(start.elapsed().as_secs_f64() < 10.0);
}

#[test]
fn steady_states_with_probe_are_physical() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for _ in 0..100 {
        let (params, delta) = draw_params(&mut rng);
        let rates = derive_rates(&params).unwrap();
        let rho = steady_state(&build_generator(&params, &rates, delta).unwrap()).unwrap();
        assert_physical(&rho);
    }
}

/// Max deviation of the first-order `(ρ₃₃, ρ₁₃)` from the exact steady state.
fn first_order_residual(params: &SystemParams) -> f64 {
    let rates = derive_rates(params).unwrap();
    let zeroth = rho0(params, &rates, 0.0).unwrap();
    let first = rho1(params, &rates, 0.0, &zeroth).unwrap();
    let exact = steady_state(&build_generator(params, &rates, 0.0).unwrap()).unwrap();
    (first.rho33 - exact.population(3))
        .abs()
        .max((first.rho13 - exact.get(1, 3)).norm())
}

#[test]
fn first_order_error_is_quadratic_in_probe() {
    for p in [0.0, 0.7] {
        let base = SystemParams::reference().with_p(p);
        let ratio =
            first_order_residual(&base.with_g(2e4)) / first_order_residual(&base.with_g(1e4));
        assert!((ratio - 4.0).abs() <= 0.8, "p={p}: ratio {ratio}");
    }
}
