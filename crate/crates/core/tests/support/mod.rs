#![allow(dead_code)]

use blochldp::lindblad::{GKSParams, YZGenerator};
use blochldp::mat2::{c, ket, pauli_compose, BlochState, ComplexMat2, C64};
use proptest::prelude::*;

/// `(ξ, η, ν, ζ)` with `|ζ|² ≤ ν(ν+η)`.
pub fn gks_params() -> impl Strategy<Value = GKSParams> {
    (-1.0..1.0f64, 0.2..3.0f64, 0.0..2.0f64, 0.0..1.0f64, 0.0..std::f64::consts::TAU).prop_map(
        |(xi, eta, nu, u, arg)| {
            let r = (nu * (nu + eta)).sqrt() * u.sqrt();
            GKSParams::new(xi, eta, nu, C64::from_polar(r, arg)).unwrap()
        },
    )
}

pub fn pure_absorbing_params() -> impl Strategy<Value = GKSParams> {
    (-1.0..1.0f64, 0.2..3.0f64)
        .prop_map(|(xi, eta)| GKSParams::new(xi, eta, 0.0, c(0.0, 0.0)).unwrap())
}

pub fn bloch_vector() -> impl Strategy<Value = [f64; 3]> {
    (0.0..1.0f64, -1.0..1.0f64, 0.0..std::f64::consts::TAU).prop_map(|(r, z, phi)| {
        let r = r.cbrt();
        let s = (1.0 - z * z).sqrt();
        [r * s * phi.cos(), r * s * phi.sin(), r * z]
    })
}

pub fn density() -> impl Strategy<Value = ComplexMat2> {
    bloch_vector().prop_map(|u| pauli_compose(&BlochState::state(u)))
}

/// Unitary `[[cos θ, −e^{−iφ} sin θ], [e^{iφ} sin θ, cos θ]]`.
pub fn unitary(theta: f64, phi: f64) -> ComplexMat2 {
    let (s, co) = theta.sin_cos();
    let e = C64::from_polar(1.0, phi);
    ComplexMat2::new([[c(co, 0.0), -e.conj() * s], [e * s, c(co, 0.0)]])
}

/// A yz generator with `z₁e₂ = c₁e₁ + c₂e₂` and `z₂e₂ = d₁e₁ + d₂e₂`, so that
/// `η = |c₁|²+|c₂|²+|d₁|²+|d₂|²` and `a = |c₂|²+|d₂|²`, written in the basis
/// `e₁ = U(0,1)`, `e₂ = U(1,0)`.
pub fn hand_built_yz(c1: C64, c2: C64, d1: C64, d2: C64, theta: f64, phi: f64, u: &ComplexMat2) -> YZGenerator {
    let eta = c1.norm_sqr() + c2.norm_sqr() + d1.norm_sqr() + d2.norm_sqr();
    let zero = c(0.0, 0.0);
    let y = ComplexMat2::diag_c(c(-eta / 2.0, theta), c(0.0, phi));
    let z1 = ComplexMat2::new([[c2, zero], [c1, zero]]);
    let z2 = ComplexMat2::new([[d2, zero], [d1, zero]]);
    let conj = |m: ComplexMat2| *u * m * u.adjoint();
    let e1 = u.apply(&ket(zero, c(1.0, 0.0)));
    YZGenerator::new(conj(y), conj(z1), conj(z2), e1).unwrap()
}

/// Twenty hand-built generators with `a > 0`.
pub fn hand_built_family() -> Vec<YZGenerator> {
    (0..20)
        .map(|k| {
            let f = k as f64;
            let c1 = C64::from_polar(0.4 + 0.05 * f, 0.3 * f);
            let c2 = C64::from_polar(0.2 + 0.03 * f, -0.7 * f);
            let d1 = C64::from_polar(0.1 * (k % 3) as f64, 1.1 * f);
            let d2 = C64::from_polar(0.15 * (k % 4) as f64, 0.5);
            let u = unitary(0.17 * f, 0.4 * f);
            hand_built_yz(c1, c2, d1, d2, 0.2 * f - 1.0, 0.5 - 0.1 * f, &u)
        })
        .collect()
}
