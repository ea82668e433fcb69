//! Full master-equation generator on the 3×3 density matrix.
//!
//! The generator is an explicit dense linear map on the nine complex entries
//! of `ρ`, stored as a 9×9 complex matrix acting on the row-major
//! vectorisation `vec(ρ)[3(i−1) + (j−1)] = ρᵢⱼ`. It is non-perturbative in both
//! `g` and `Ωc` and serves as the reference against which every closed form in
//! the crate is checked.

use nalgebra::{DMatrix, DVector, Matrix3, SMatrix, SVector};
use num_complex::Complex64;

use crate::model::{DerivedRates, SystemParams};
use crate::ode::rk4_step;
use crate::{Error, Result};

type Vec9 = SVector<Complex64, 9>;

/// Relative singular-value threshold deciding the null-space dimension.
pub const RANK_TOLERANCE: f64 = 1e-12;

const I: Complex64 = Complex64::new(0.0, 1.0);

fn idx(i: usize, j: usize) -> usize {
    3 * (i - 1) + (j - 1)
}

/// A 3×3 density matrix indexed by levels 1, 2, 3.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix(Matrix3<Complex64>);

impl DensityMatrix {
    pub fn from_matrix(m: Matrix3<Complex64>) -> Self {
        DensityMatrix(m)
    }

    /// Diagonal state with the given populations.
    pub fn diagonal(p1: f64, p2: f64, p3: f64) -> Self {
        let mut m = Matrix3::zeros();
        m[(0, 0)] = p1.into();
        m[(1, 1)] = p2.into();
        m[(2, 2)] = p3.into();
        DensityMatrix(m)
    }

    /// Element `ρᵢⱼ` with 1-based level indices.
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.0[(i - 1, j - 1)]
    }

    pub fn population(&self, level: usize) -> f64 {
        self.get(level, level).re
    }

    pub fn matrix(&self) -> &Matrix3<Complex64> {
        &self.0
    }

    pub fn trace(&self) -> Complex64 {
        self.0.trace()
    }

    /// Largest entry of `ρ − ρ†`.
    pub fn hermiticity_error(&self) -> f64 {
        (self.0 - self.0.adjoint()).camax()
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn eigenvalues(&self) -> [f64; 3] {
        let h = (self.0 + self.0.adjoint()) * Complex64::new(0.5, 0.0);
        let ev = h.symmetric_eigenvalues();
        let mut out = [ev[0], ev[1], ev[2]];
        out.sort_by(f64::total_cmp);
        out
    }

    /// Hermitian within `tol`, unit trace within `tol`, eigenvalues ≥ −`tol`.
    pub fn is_physical(&self, tol: f64) -> bool {
        self.hermiticity_error() <= tol
            && (self.trace() - Complex64::new(1.0, 0.0)).norm() <= tol
            && self.eigenvalues()[0] >= -tol
    }

    fn to_vec(self) -> Vec9 {
        Vec9::from_fn(|k, _| self.0[(k / 3, k % 3)])
    }

    fn from_vec(v: &Vec9) -> Self {
        DensityMatrix(Matrix3::from_fn(|i, j| v[3 * i + j]))
    }
}

/// The linear map `ρ ↦ ρ̇`, together with the operating point it was built for.
#[derive(Debug, Clone)]
pub struct Generator {
    matrix: SMatrix<Complex64, 9, 9>,
    params: SystemParams,
    rates: DerivedRates,
    delta31: f64,
}

impl Generator {
    pub fn matrix(&self) -> &SMatrix<Complex64, 9, 9> {
        &self.matrix
    }

    pub fn params(&self) -> &SystemParams {
        &self.params
    }

    pub fn rates(&self) -> &DerivedRates {
        &self.rates
    }

    /// Probe detuning Δω₃₁ (rad/s).
    pub fn delta31(&self) -> f64 {
        self.delta31
    }

    /// Two-photon detuning Δω₂₁ = Δω₃₁ − Δc (rad/s).
    pub fn delta21(&self) -> f64 {
        self.delta31 - self.params.coupling_detuning
    }

    /// `G(ρ)` for an arbitrary (not necessarily physical) 3×3 matrix.
    pub fn apply(&self, rho: &Matrix3<Complex64>) -> Matrix3<Complex64> {
        let v = Vec9::from_fn(|k, _| rho[(k / 3, k % 3)]);
        let out = self.matrix * v;
        Matrix3::from_fn(|i, j| out[3 * i + j])
    }

    /// Frobenius norm of the generator matrix.
    pub fn norm(&self) -> f64 {
        self.matrix.norm()
    }

    /// Singular values of the generator, scaled by the largest one.
    fn relative_singular_values(&self) -> Vec<f64> {
        let sv = self.matrix.singular_values();
        let max = sv.max();
        if max == 0.0 {
            return vec![0.0; 9];
        }
        sv.iter().map(|s| s / max).collect()
    }

    /// Dimension of the (complex) null space at [`RANK_TOLERANCE`].
    pub fn null_space_dim(&self) -> usize {
        self.relative_singular_values()
            .iter()
            .filter(|&&s| s < RANK_TOLERANCE)
            .count()
    }

    /// Rank of the generator stacked with the trace row; 9 means a unique steady state.
    pub fn constrained_rank(&self) -> usize {
        let a = self.constrained_system();
        let sv = a.singular_values();
        let max = sv.max();
        sv.iter().filter(|&&s| s >= RANK_TOLERANCE * max).count()
    }

    fn constrained_system(&self) -> DMatrix<Complex64> {
        let scale = Complex64::new(1.0 / self.matrix.camax().max(f64::MIN_POSITIVE), 0.0);
        let mut a = DMatrix::<Complex64>::zeros(10, 9);
        for r in 0..9 {
            for c in 0..9 {
                a[(r, c)] = self.matrix[(r, c)] * scale;
            }
        }
        for level in 1..=3 {
            a[(9, idx(level, level))] = Complex64::new(1.0, 0.0);
        }
        a
    }
}

/// Right-hand side of the rate equations, written element by element.
///
/// `Δ₂₁ = Δ₃₁ − Δc` is the two-photon detuning and `Δc` the control-field
/// detuning. The three lower-triangle coherences are the complex conjugate
/// equations, written in linear form.
fn master_equation(
    params: &SystemParams,
    rates: &DerivedRates,
    delta31: f64,
    rho: &Matrix3<Complex64>,
) -> Matrix3<Complex64> {
    let r = |i: usize, j: usize| rho[(i - 1, j - 1)];
    let g = params.g;
    let om = params.omega_c;
    let (d31, d32) = (params.decay31, params.decay32);
    let (r13, r23) = (rates.r13, rates.r23);
    let (y21, y31, y32) = (rates.dephasing21, rates.dephasing31, rates.dephasing32);
    let gs = rates.gamma_s;
    let dc = params.coupling_detuning;
    let delta21 = delta31 - dc;
    let half = 0.5;

    let rho11 = d31 * r(3, 3) - half * I * g * (r(3, 1) - r(1, 3)) + r13 * (r(3, 3) - r(1, 1));
    let rho22 = d32 * r(3, 3) + half * I * om * (r(3, 2) - r(2, 3)) + r23 * (r(3, 3) - r(2, 2));
    let rho33 = -(d31 + d32) * r(3, 3) - half * I * g * (r(1, 3) - r(3, 1))
        + half * I * om * (r(2, 3) - r(3, 2))
        - r23 * (r(3, 3) - r(2, 2))
        - r13 * (r(3, 3) - r(1, 1));

    let rho12 =
        -(half * y21 - I * delta21) * r(1, 2) - half * I * om * r(1, 3) - half * I * g * r(3, 2)
            + gs * r(3, 3);
    let rho23 = -(half * y32 - I * dc) * r(2, 3)
        + half * I * om * (r(3, 3) - r(2, 2))
        + half * I * g * r(2, 1);
    let rho13 = -(half * y31 - I * delta31) * r(1, 3)
        - half * I * g * (r(3, 3) - r(1, 1))
        - half * I * om * r(1, 2);

    let rho21 = -(half * y21 + I * delta21) * r(2, 1)
        + half * I * om * r(3, 1)
        + half * I * g * r(2, 3)
        + gs * r(3, 3);
    let rho32 = -(half * y32 + I * dc) * r(3, 2)
        - half * I * om * (r(3, 3) - r(2, 2))
        - half * I * g * r(1, 2);
    let rho31 = -(half * y31 + I * delta31) * r(3, 1)
        + half * I * g * (r(3, 3) - r(1, 1))
        + half * I * om * r(2, 1);

    Matrix3::new(
        rho11, rho12, rho13, //
        rho21, rho22, rho23, //
        rho31, rho32, rho33,
    )
}

/// Builds the generator for probe detuning `delta31` (rad/s).
///
/// A switched-off control field (`omega_c == 0`) is accepted here so that
/// degenerate configurations can be diagnosed by [`steady_state`].
pub fn build_generator(
    params: &SystemParams,
    rates: &DerivedRates,
    delta31: f64,
) -> Result<Generator> {
    if params.omega_c == 0.0 {
        params.with_omega_c(1.0).validate()?;
    } else {
        params.validate()?;
    }
    if !delta31.is_finite() {
        return Err(Error::invalid("delta31", "must be finite"));
    }
    let mut matrix = SMatrix::<Complex64, 9, 9>::zeros();
    for k in 0..9 {
        let mut basis = Matrix3::zeros();
        basis[(k / 3, k % 3)] = Complex64::new(1.0, 0.0);
        let image = master_equation(params, rates, delta31, &basis);
        for row in 0..9 {
            matrix[(row, k)] = image[(row / 3, row % 3)];
        }
    }
    Ok(Generator {
        matrix,
        params: *params,
        rates: *rates,
        delta31,
    })
}

/// Unique trace-one fixed point of the generator.
///
/// The trace condition is appended as a tenth row and the overdetermined
/// system is solved in the least-squares sense via SVD.
pub fn steady_state(generator: &Generator) -> Result<DensityMatrix> {
    let null_dim = generator.null_space_dim();
    if null_dim != 1 {
        return Err(Error::DegenerateSteadyState { null_dim });
    }
    let a = generator.constrained_system();
    let mut b = DVector::<Complex64>::zeros(10);
    b[9] = Complex64::new(1.0, 0.0);
    let x = a
        .svd(true, true)
        .solve(&b, 0.0)
        .expect("SVD was computed with both U and V^T");
    Ok(DensityMatrix::from_vec(&Vec9::from_fn(|k, _| x[k])))
}

/// Integrates `ρ̇ = G(ρ)` from `rho0` over `[0, t_end]` with classical RK4.
///
/// The step is shrunk slightly so that an integer number of steps lands on
/// `t_end`.
pub fn propagate(
    generator: &Generator,
    rho0: &DensityMatrix,
    t_end: f64,
    dt: f64,
) -> Result<DensityMatrix> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::invalid("dt", "must be > 0"));
    }
    if !(t_end >= dt) || !t_end.is_finite() {
        return Err(Error::invalid("t_end", "must be >= dt"));
    }
    let steps = (t_end / dt - 1e-9).ceil().max(1.0) as usize;
    let h = t_end / steps as f64;
    let m = generator.matrix;
    let f = |y: &Vec9| m * y;
    let trace0 = rho0.trace();
    let mut y = rho0.to_vec();
    for step in 1..=steps {
        y = rk4_step(&y, h, &f);
        let trace = y[idx(1, 1)] + y[idx(2, 2)] + y[idx(3, 3)];
        let trace_error = (trace - trace0).norm();
        let magnitude = y.camax();
        if trace_error > 1e-6 || !(magnitude <= 1e3) {
            return Err(Error::StepInstability {
                time: step as f64 * h,
                trace_error,
            });
        }
    }
    Ok(DensityMatrix::from_vec(&y))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::derive_rates;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn hamiltonian(params: &SystemParams, delta31: f64) -> Matrix3<Complex64> {
        let delta21 = delta31 - params.coupling_detuning;
        let c = |x: f64| Complex64::new(x, 0.0);
        let mut h = Matrix3::zeros();
        h[(2, 2)] = c(delta31);
        h[(1, 1)] = c(delta21);
        h[(2, 0)] = c(params.g / 2.0);
        h[(0, 2)] = c(params.g / 2.0);
        h[(2, 1)] = c(-params.omega_c / 2.0);
        h[(1, 2)] = c(-params.omega_c / 2.0);
        h
    }

    fn random_matrix(vals: &[f64]) -> Matrix3<Complex64> {
        Matrix3::from_fn(|i, j| Complex64::new(vals[3 * i + j], vals[9 + 3 * i + j]))
    }

    fn hermitian(vals: &[f64]) -> Matrix3<Complex64> {
        let m = random_matrix(vals);
        (m + m.adjoint()) * Complex64::new(0.5, 0.0)
    }

    fn generic_params() -> SystemParams {
        SystemParams {
            t13: 20000.0,
            t23: 15000.0,
            g: 1e6,
            coupling_detuning: 3e6,
            ..SystemParams::reference()
        }
    }

    #[test]
    fn coherent_part_is_a_commutator() {
        // With all rates off, only -i[H, rho] remains.
        let params = generic_params();
        let rates = DerivedRates {
            n13: 0.0,
            n23: 0.0,
            r13: 0.0,
            r23: 0.0,
            dephasing21: 0.0,
            dephasing31: 0.0,
            dephasing32: 0.0,
            gamma_s: 0.0,
        };
        let params = SystemParams {
            decay31: f64::MIN_POSITIVE,
            decay32: f64::MIN_POSITIVE,
            ..params
        };
        let delta = 2.3e7;
        let gen = build_generator(&params, &rates, delta).unwrap();
        let rho = random_matrix(&(0..18).map(|k| (k as f64 * 0.37).sin()).collect::<Vec<_>>());
        let h = hamiltonian(&params, delta);
        let expected = (h * rho - rho * h) * Complex64::new(0.0, -1.0);
        let got = gen.apply(&rho);
        assert!((got - expected).camax() < 1e-6 * params.omega_c);
    }

    #[test]
    fn ground_state_without_pumping() {
        let params = SystemParams {
            g: 0.0,
            ..SystemParams::reference()
        };
        let rates = DerivedRates::with_occupations(&params, 0.0, 0.0);
        let gen = build_generator(&params, &rates, 0.0).unwrap();
        let rho = steady_state(&gen).unwrap();
        let expected = DensityMatrix::diagonal(1.0, 0.0, 0.0);
        assert!((rho.matrix() - expected.matrix()).camax() < 1e-12);
    }

    #[test]
    fn dark_lower_levels_are_degenerate() {
        let params = SystemParams {
            g: 0.0,
            omega_c: 0.0,
            ..SystemParams::reference()
        };
        let rates = DerivedRates::with_occupations(&params, 0.0, 0.0);
        let gen = build_generator(&params, &rates, 0.0).unwrap();
        match steady_state(&gen) {
            Err(Error::DegenerateSteadyState { null_dim }) => assert!(null_dim >= 2),
            other => panic!("expected degenerate steady state, got {other:?}"),
        }
    }

    #[test]
    fn sgc_off_has_no_lower_coherences() {
        let params = SystemParams {
            g: 0.0,
            p: 0.0,
            ..generic_params()
        };
        let rates = derive_rates(&params).unwrap();
        for delta in [-5e7, 0.0, 1.3e7] {
            let rho = steady_state(&build_generator(&params, &rates, delta).unwrap()).unwrap();
            assert!(rho.get(1, 2).norm() < 1e-12);
            assert!(rho.get(1, 3).norm() < 1e-12);
            assert!(rho.is_physical(1e-10));
        }
    }

    #[test]
    fn fixed_point_is_preserved_by_propagation() {
        let params = generic_params();
        let rates = derive_rates(&params).unwrap();
        let gen = build_generator(&params, &rates, 4e6).unwrap();
        let rho = steady_state(&gen).unwrap();
        let out = propagate(&gen, &rho, 1e-7, 1e-9).unwrap();
        assert!((out.matrix() - rho.matrix()).camax() < 1e-12);
    }

    #[test]
    fn long_time_propagation_reaches_steady_state() {
        let params = generic_params();
        let rates = derive_rates(&params).unwrap();
        let gen = build_generator(&params, &rates, 4e6).unwrap();
        let ss = steady_state(&gen).unwrap();
        let start = DensityMatrix::diagonal(1.0, 0.0, 0.0);
        let out = propagate(&gen, &start, 2e-4, 2e-9).unwrap();
        assert!((out.matrix() - ss.matrix()).camax() < 1e-6);
        assert_abs_diff_eq!(out.trace().re, 1.0, epsilon = 1e-9);
    }

    #[test]
    fn rk4_convergence_order() {
        let params = generic_params();
        let rates = derive_rates(&params).unwrap();
        let gen = build_generator(&params, &rates, 4e6).unwrap();
        let start = DensityMatrix::diagonal(1.0, 0.0, 0.0);
        let t = 2e-7;
        let reference = propagate(&gen, &start, t, 1e-11).unwrap();
        let err = |dt: f64| {
            (propagate(&gen, &start, t, dt).unwrap().matrix() - reference.matrix()).camax()
        };
        let ratio = err(1e-8) / err(5e-9);
        assert!((ratio - 16.0).abs() <= 0.3 * 16.0, "ratio {ratio}");
    }

    #[test]
    fn oversized_step_is_reported() {
        let params = generic_params();
        let rates = derive_rates(&params).unwrap();
        let gen = build_generator(&params, &rates, 0.0).unwrap();
        let start = DensityMatrix::diagonal(1.0, 0.0, 0.0);
        assert!(matches!(
            propagate(&gen, &start, 1e-4, 1e-6),
            Err(Error::StepInstability { .. })
        ));
        assert!(propagate(&gen, &start, 1e-9, 1e-8).is_err());
    }

    proptest! {
        #[test]
        fn trace_and_hermiticity_preserved(
            vals in proptest::collection::vec(-1.0f64..1.0, 18),
            p in 0.0f64..=1.0,
            delta in -2e8f64..2e8,
            g in 0.0f64..5e7,
        ) {
            let params = SystemParams { p, g, ..generic_params() };
            let rates = derive_rates(&params).unwrap();
            let gen = build_generator(&params, &rates, delta).unwrap();
            let rho = hermitian(&vals);
            let out = gen.apply(&rho);
            let scale = gen.norm();
            prop_assert!(out.trace().norm() <= 1e-12 * scale);
            prop_assert!((out - out.adjoint()).camax() <= 1e-12 * scale);

            let any = random_matrix(&vals);
            prop_assert!(gen.apply(&any).trace().norm() <= 1e-12 * scale);
        }

        #[test]
        fn unique_steady_state_with_control_field(
            om in 1e6f64..1e8,
            n13 in 0.0f64..0.5,
            n23 in 0.0f64..0.5,
            p in 0.0f64..=1.0,
        ) {
            let params = SystemParams { omega_c: om, p, g: 0.0, ..SystemParams::reference() };
            let rates = DerivedRates::with_occupations(&params, n13, n23);
            let gen = build_generator(&params, &rates, 0.0).unwrap();
            prop_assert_eq!(gen.null_space_dim(), 1);
            prop_assert_eq!(gen.constrained_rank(), 9);
        }
    }
}
