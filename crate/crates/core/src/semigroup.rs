//! Evolution `ρ ↦ 𝓣*ₜ(ρ) = exp(t𝓛)(ρ)` and the structural relations of the
//! semigroup.
//!
//! States are evolved along two independent routes: the superoperator
//! exponential ([`evolve_exact`]) and, for GKS generators, the closed-form
//! Bloch solution ([`evolve_bloch_gks`]).

use std::io::{self, Write};

use crate::error::{Error, Result};
use crate::lindblad::{superop_from_yz, DiscriminantCase, GKSParams, YZGenerator};
use crate::mat2::{
    c, eig_hermitian2, expm2, expm4, pauli_compose, pauli_decompose, BlochState, ComplexMat2,
    SuperOp4,
};

/// Tolerance for operator orderings.
pub const ORDER_TOL: f64 = -1e-10;

/// `unvec(exp(t·s)·vec(ρ))`.
pub fn evolve_exact(s: &SuperOp4, rho: &ComplexMat2, t: f64) -> Result<ComplexMat2> {
    Ok(expm4(s, t)?.apply(rho))
}

/// Real 2×2 propagator of `(u₁, u₂)` over time `t` for the GKS generator.
///
/// The coordinates obey `u' = A u` with
///
/// ```text
/// A = [[−(ν+η/2−Re ζ), −(2ξ+Im ζ)],
///      [  2ξ−Im ζ,     −(ν+η/2+Re ζ)]]
/// ```
///
/// and `A = m·I + N` with `m = −(ν+η/2)`, `N² = δ²·I`, `δ² = |ζ|² − 4ξ²`.
/// So `exp(tA) = e^{mt}(C(t)·I + S(t)·N)` where `(C, S)` is `(cosh δt,
/// sinh δt/δ)`, `(cos ωt, sin ωt/ω)` with `ω² = −δ²`, or, on the
/// boundary, the series `(1 + δ²t²/2, t(1 + δ²t²/6))`.
pub fn bloch_propagator(p: &GKSParams, t: f64) -> [[f64; 2]; 2] {
    let GKSParams { xi, eta, nu, zeta } = *p;
    let m = -(nu + 0.5 * eta);
    let n = [
        [zeta.re, -(2.0 * xi + zeta.im)],
        [2.0 * xi - zeta.im, -zeta.re],
    ];
    let delta2 = zeta.norm_sqr() - 4.0 * xi * xi;
    // e^{mt}·C and e^{mt}·S
    let (ec, es) = match p.case() {
        DiscriminantCase::DistinctReal => {
            let delta = delta2.sqrt();
            let (f1, f2) = (((m + delta) * t).exp(), ((m - delta) * t).exp());
            (0.5 * (f1 + f2), (f1 - f2) / (2.0 * delta))
        }
        DiscriminantCase::Oscillatory => {
            let omega = (-delta2).sqrt();
            let e = (m * t).exp();
            (e * (omega * t).cos(), e * (omega * t).sin() / omega)
        }
        DiscriminantCase::Defective => {
            let e = (m * t).exp();
            let x = delta2 * t * t;
            (e * (1.0 + 0.5 * x), e * t * (1.0 + x / 6.0))
        }
    };
    [
        [ec + es * n[0][0], es * n[0][1]],
        [es * n[1][0], ec + es * n[1][1]],
    ]
}

/// Closed-form evolution of a Hermitian `ρ` under the GKS generator.
///
/// `u₃(t) = e^{−kt}(u₃ + η·tr/k) − η·tr/k` with `k = 2ν + η`, and `(u₁, u₂)`
/// by [`bloch_propagator`]. The trace is conserved.
pub fn evolve_bloch_gks(p: &GKSParams, rho: &ComplexMat2, t: f64) -> Result<ComplexMat2> {
    p.validate()?;
    if !t.is_finite() {
        return Err(Error::NonFinite);
    }
    if t < 0.0 {
        return Err(Error::NegativeTime(t));
    }
    let b = pauli_decompose(rho)?;
    if t == 0.0 {
        return Ok(pauli_compose(&b));
    }
    Ok(pauli_compose(&evolve_bloch_coords(p, &b, t)))
}

fn evolve_bloch_coords(p: &GKSParams, b: &BlochState, t: f64) -> BlochState {
    let k = 2.0 * p.nu + p.eta;
    let fixed = p.eta * b.trace / k;
    let u3 = (-k * t).exp() * (b.u[2] + fixed) - fixed;
    let prop = bloch_propagator(p, t);
    let u1 = prop[0][0] * b.u[0] + prop[0][1] * b.u[1];
    let u2 = prop[1][0] * b.u[0] + prop[1][1] * b.u[1];
    BlochState::new(b.trace, [u1, u2, u3])
}

/// A sampled trajectory `t ↦ u(ρₜ)` with the spectrum of each state.
#[derive(Clone, Debug, PartialEq)]
pub struct BlochTrajectory {
    pub generator_id: String,
    pub times: Vec<f64>,
    pub states: Vec<BlochState>,
    /// `(largest, least)` eigenvalue of each state.
    pub spectra: Vec<(f64, f64)>,
}

impl BlochTrajectory {
    /// Evolves `rho0` to every grid time independently via the exponential.
    pub fn compute(
        generator_id: impl Into<String>,
        s: &SuperOp4,
        rho0: &ComplexMat2,
        times: &[f64],
    ) -> Result<Self> {
        check_grid(times)?;
        rho0.check_density()?;
        let mut states = Vec::with_capacity(times.len());
        let mut spectra = Vec::with_capacity(times.len());
        for &t in times {
            let rho = evolve_exact(s, rho0, t)?;
            let (hi, lo) = eig_hermitian2(&rho)?;
            states.push(pauli_decompose(&rho)?);
            spectra.push((hi.eigenvalue, lo.eigenvalue));
        }
        Ok(Self {
            generator_id: generator_id.into(),
            times: times.to_vec(),
            states,
            spectra,
        })
    }

    /// CSV with header `t,u1,u2,u3,eig_max,eig_min`, 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "t,u1,u2,u3,eig_max,eig_min")?;
        for ((t, b), (hi, lo)) in self.times.iter().zip(&self.states).zip(&self.spectra) {
            writeln!(
                w,
                "{},{},{},{},{},{}",
                fmt17(*t),
                fmt17(b.u[0]),
                fmt17(b.u[1]),
                fmt17(b.u[2]),
                fmt17(*hi),
                fmt17(*lo)
            )?;
        }
        Ok(())
    }
}

/// A float with 17 significant digits.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

/// Checks that a time grid is non-empty, finite, non-negative and
/// strictly ascending.
pub fn check_grid(times: &[f64]) -> Result<()> {
    if times.is_empty() {
        return Err(Error::InvalidGrid("empty".into()));
    }
    if times.iter().any(|t| !t.is_finite() || *t < 0.0) {
        return Err(Error::InvalidGrid("times must be finite and non-negative".into()));
    }
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidGrid("times must be strictly ascending".into()));
    }
    Ok(())
}

/// `n` equally spaced points on `[0, t_max]`.
pub fn linear_grid(t_max: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2);
    (0..n)
        .map(|i| if i + 1 == n { t_max } else { t_max * i as f64 / (n - 1) as f64 })
        .collect()
}

/// `n` points from `first` to `t_max` with a constant ratio, the last one
/// exactly `t_max`.
pub fn geometric_grid(first: f64, t_max: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2 && first > 0.0 && t_max > first);
    let ratio = (t_max / first).powf(1.0 / (n - 1) as f64);
    (0..n)
        .map(|i| if i + 1 == n { t_max } else { first * ratio.powi(i as i32) })
        .collect()
}

/// Outcome of a subordination check at one `(ρ, t)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SubordinationReport {
    /// `𝒮ₜ(ρ) = e^{ty}ρe^{ty*}`.
    pub subordinate: ComplexMat2,
    /// `𝓣*ₜ(ρ)`.
    pub evolved: ComplexMat2,
    /// Least eigenvalue of `𝒮ₜ(ρ)`.
    pub min_eig_subordinate: f64,
    /// Least eigenvalue of `𝓣*ₜ(ρ) − 𝒮ₜ(ρ)`.
    pub min_eig_difference: f64,
}

/// Checks `0 ≤ 𝒮ₜ(ρ) ≤ 𝓣*ₜ(ρ)` for a positive `ρ`.
pub fn subordination_check(g: &YZGenerator, rho: &ComplexMat2, t: f64) -> Result<SubordinationReport> {
    if t < 0.0 {
        return Err(Error::NegativeTime(t));
    }
    let s = superop_from_yz(g)?;
    let ct = expm2(&g.y, t)?;
    let subordinate = ct * *rho * ct.adjoint();
    let evolved = evolve_exact(&s, rho, t)?;
    let min_eig_subordinate = eig_hermitian2(&hermitize(&subordinate))?.1.eigenvalue;
    let min_eig_difference = eig_hermitian2(&hermitize(&(evolved - subordinate)))?.1.eigenvalue;
    if min_eig_subordinate < ORDER_TOL {
        return Err(Error::OrderingViolation {
            which: "S_t(rho)",
            eigenvalue: min_eig_subordinate,
        });
    }
    if min_eig_difference < ORDER_TOL {
        return Err(Error::OrderingViolation {
            which: "T_t(rho) - S_t(rho)",
            eigenvalue: min_eig_difference,
        });
    }
    Ok(SubordinationReport {
        subordinate,
        evolved,
        min_eig_subordinate,
        min_eig_difference,
    })
}

// Round-off can leave ~1e-17 anti-Hermitian noise; project it away.
fn hermitize(m: &ComplexMat2) -> ComplexMat2 {
    0.5 * (*m + m.adjoint())
}

/// Max-entry residual of `𝓣*ₜ = 𝒮ₜ + ∫₀ᵗ 𝓣*ₜ₋ₛ 𝓙 𝒮ₛ ds` with the integral
/// taken by the composite trapezoid rule on `steps` panels.
pub fn integral_equation_residual(g: &YZGenerator, t: f64, steps: usize) -> Result<f64> {
    if steps < 2 {
        return Err(Error::InvalidGrid(format!("need at least 2 panels, got {steps}")));
    }
    if t < 0.0 {
        return Err(Error::NegativeTime(t));
    }
    let l = superop_from_yz(g)?;
    let jump = g.jump_superop();
    let no_jump = |s: f64| -> Result<SuperOp4> { Ok(SuperOp4::conjugation(&expm2(&g.y, s)?)) };

    let h = t / steps as f64;
    let mut integral = SuperOp4::zero();
    for k in 0..=steps {
        let s = if k == steps { t } else { h * k as f64 };
        let w = if k == 0 || k == steps { 0.5 * h } else { h };
        let term = expm4(&l, (t - s).max(0.0))? * jump * no_jump(s)?;
        integral = integral + term.scale(w);
    }
    let lhs = expm4(&l, t)?;
    let rhs = no_jump(t)? + integral;
    Ok(lhs.max_abs_diff(&rhs))
}

/// `‖exp((t₁+t₂)s) − exp(t₁s)·exp(t₂s)‖_max`.
pub fn semigroup_law_check(s: &SuperOp4, t1: f64, t2: f64) -> Result<f64> {
    let joint = expm4(s, t1 + t2)?;
    let split = expm4(s, t1)? * expm4(s, t2)?;
    Ok(joint.max_abs_diff(&split))
}

/// Max over the grid of `‖𝓣*ₜ(|e₁⟩⟨e₂|) − e^{t(⟨e₁,ye₁⟩ + conj⟨e₂,ye₂⟩)}|e₁⟩⟨e₂|‖_max`.
///
/// With `y e₁ = 0` the exponent is `t·γ̄`, `γ` the `e₂`-eigenvalue of `y`.
pub fn coherence_rotation_residual(g: &YZGenerator, times: &[f64]) -> Result<f64> {
    let s = superop_from_yz(g)?;
    let coherence = ComplexMat2::ket_bra(&g.e1, &g.e2);
    let rate = g.y.matrix_element(&g.e1, &g.e1) + g.y.matrix_element(&g.e2, &g.e2).conj();
    let mut worst: f64 = 0.0;
    for &t in times {
        let evolved = evolve_exact(&s, &coherence, t)?;
        let phase = (rate * c(t, 0.0)).exp();
        worst = worst.max(evolved.max_abs_diff(&coherence.scale(phase)));
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lindblad::{gks_to_yz, superop_from_gks};
    use crate::mat2::C64;

    fn gks(xi: f64, eta: f64, nu: f64, zeta: C64) -> GKSParams {
        GKSParams::new(xi, eta, nu, zeta).unwrap()
    }

    fn half_identity() -> ComplexMat2 {
        ComplexMat2::diag(0.5, 0.5)
    }

    #[test]
    fn exact_evolution_examples() {
        let p = gks(0.3, 1.0, 0.0, c(0.0, 0.0));
        let s = superop_from_gks(&p).unwrap();
        let rho = ComplexMat2::from_real([[0.3, 0.1], [0.1, 0.7]]);
        assert_eq!(evolve_exact(&s, &rho, 0.0).unwrap(), rho);

        for &t in &[0.5, 2.0, 7.0] {
            let got = evolve_exact(&s, &half_identity(), t).unwrap();
            let want = 0.5
                * (ComplexMat2::identity() + ((-t).exp() - 1.0) * ComplexMat2::sigma3());
            assert!(got.max_abs_diff(&want) < 1e-14, "t = {t}");
        }

        let got = evolve_exact(&s, &ComplexMat2::diag(1.0, 0.0), 3.0).unwrap();
        let b = pauli_decompose(&got).unwrap();
        let u3 = 2.0 * (-3.0f64).exp() - 1.0;
        assert!(b.u[0].abs() < 1e-15 && b.u[1].abs() < 1e-15);
        assert!((b.u[2] - u3).abs() < 1e-14);
        assert!((b.trace - 1.0).abs() < 1e-14);
    }

    #[test]
    fn bloch_rotation_closed_form() {
        let p = gks(0.3, 1.0, 0.0, c(0.0, 0.0));
        assert_eq!(p.case(), DiscriminantCase::Oscillatory);
        let rho = pauli_compose(&BlochState::state([1.0, 0.0, 0.0]));
        for &t in &[0.0, 0.7, 3.0, 12.0] {
            let b = pauli_decompose(&evolve_bloch_gks(&p, &rho, t).unwrap()).unwrap();
            let d = (-0.5 * t).exp();
            assert!((b.u[0] - d * (0.6 * t).cos()).abs() < 1e-15);
            assert!((b.u[1] - d * (0.6 * t).sin()).abs() < 1e-15);
        }
    }

    #[test]
    fn bloch_zero_time_is_identity() {
        let p = gks(0.1, 1.0, 0.5, c(0.5, 0.0));
        let rho = ComplexMat2::from_real([[0.2, 0.3], [0.3, 0.8]]);
        assert!(evolve_bloch_gks(&p, &rho, 0.0).unwrap().max_abs_diff(&rho) < 1e-16);
    }

    #[test]
    fn bloch_matches_exponential_distinct_real_case() {
        let p = gks(0.1, 1.0, 0.5, c(0.5, 0.0));
        assert_eq!(p.case(), DiscriminantCase::DistinctReal);
        assert!((p.discriminant() / 4.0 - 0.21).abs() < 1e-15);
        let rho = pauli_compose(&BlochState::state([0.5, 0.5, 0.0]));
        let s = superop_from_gks(&p).unwrap();
        let a = evolve_bloch_gks(&p, &rho, 2.0).unwrap();
        let b = evolve_exact(&s, &rho, 2.0).unwrap();
        assert!(a.max_abs_diff(&b) < 1e-10);
    }

    #[test]
    fn bloch_matches_exponential_defective_case() {
        let p = gks(0.25, 1.0, 0.25, c(0.5, 0.0));
        assert_eq!(p.case(), DiscriminantCase::Defective);
        let s = superop_from_gks(&p).unwrap();
        let rho = pauli_compose(&BlochState::state([0.6, -0.3, 0.2]));
        for &t in &[0.3, 1.0, 4.0, 20.0] {
            let a = evolve_bloch_gks(&p, &rho, t).unwrap();
            let b = evolve_exact(&s, &rho, t).unwrap();
            assert!(a.max_abs_diff(&b) < 1e-12, "t = {t}");
        }
    }

    #[test]
    fn subordination_examples() {
        let z = ComplexMat2::zero();
        let e1 = crate::mat2::ket(c(0.0, 0.0), c(1.0, 0.0));
        let g = YZGenerator::new(ComplexMat2::diag_c(c(0.0, 0.4), c(0.0, -0.2)), z, z, e1).unwrap();
        let rho = ComplexMat2::from_real([[0.4, 0.2], [0.2, 0.6]]);
        let r = subordination_check(&g, &rho, 2.0).unwrap();
        assert!(r.subordinate.max_abs_diff(&r.evolved) < 1e-14);

        let g = gks_to_yz(&gks(0.3, 1.0, 0.0, c(0.0, 0.0))).unwrap();
        let r = subordination_check(&g, &g.p2(), 1.0).unwrap();
        let sub = r.subordinate.matrix_element(&g.e2, &g.e2).re;
        let ev = r.evolved.matrix_element(&g.e2, &g.e2).re;
        assert!((sub - (-1.0f64).exp()).abs() < 1e-15);
        assert!(sub <= ev + 1e-15);

        for &t in &[0.0, 1.0, 10.0] {
            let r = subordination_check(&g, &g.p1(), t).unwrap();
            assert!(r.subordinate.max_abs_diff(&g.p1()) < 1e-14);
            assert!(r.evolved.max_abs_diff(&g.p1()) < 1e-14);
        }
    }

    #[test]
    fn integral_equation_examples() {
        let g = gks_to_yz(&gks(0.3, 1.0, 0.0, c(0.0, 0.0))).unwrap();
        assert_eq!(integral_equation_residual(&g, 0.0, 10).unwrap(), 0.0);
        let r1 = integral_equation_residual(&g, 1.0, 1000).unwrap();
        let r2 = integral_equation_residual(&g, 1.0, 2000).unwrap();
        assert!(r1 <= 1e-5, "{r1}");
        let ratio = r2 / r1;
        assert!((0.2..=0.3).contains(&ratio), "{ratio}");
        assert!(integral_equation_residual(&g, 1.0, 1).is_err());
    }

    #[test]
    fn semigroup_law_examples() {
        let s = superop_from_gks(&gks(0.3, 1.0, 0.0, c(0.0, 0.0))).unwrap();
        assert_eq!(semigroup_law_check(&s, 0.0, 0.0).unwrap(), 0.0);
        assert!(semigroup_law_check(&s, 1.3, 2.7).unwrap() <= 1e-10);
        let s = superop_from_gks(&gks(0.1, 1.0, 0.5, c(0.5, 0.0))).unwrap();
        assert!(semigroup_law_check(&s, 5.0, 5.0).unwrap() <= 1e-10);
    }

    #[test]
    fn coherence_rotation() {
        let g = gks_to_yz(&gks(0.3, 1.0, 0.0, c(0.0, 0.0))).unwrap();
        let r = coherence_rotation_residual(&g, &[0.0, 0.5, 2.0, 10.0]).unwrap();
        assert!(r < 1e-10, "{r}");
    }

    #[test]
    fn grids() {
        let g = geometric_grid(0.1, 50.0, 40);
        assert_eq!(g[0], 0.1);
        assert_eq!(*g.last().unwrap(), 50.0);
        assert!(check_grid(&g).is_ok());
        let l = linear_grid(10.0, 101);
        assert_eq!(l.len(), 101);
        assert!((l[1] - 0.1).abs() < 1e-15);
        assert!(check_grid(&[1.0, 1.0]).is_err());
        assert!(check_grid(&[]).is_err());
    }

    #[test]
    fn trajectory_csv() {
        let p = gks(0.3, 1.0, 0.0, c(0.0, 0.0));
        let s = superop_from_gks(&p).unwrap();
        let traj = BlochTrajectory::compute("m", &s, &half_identity(), &linear_grid(1.0, 3)).unwrap();
        let mut buf = Vec::new();
        traj.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], "t,u1,u2,u3,eig_max,eig_min");
        assert_eq!(lines.len(), 4);
        assert!(lines[1].starts_with("0.0000000000000000e0,"));
    }
}
