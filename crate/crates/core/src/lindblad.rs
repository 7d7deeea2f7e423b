//! Generators of quantum Markov semigroups on M₂.
//!
//! Two parametrisations are supported:
//!
//! * the *yz form* `𝓛(ρ) = yρ + ρy* + z₁ρz₁* + z₂ρz₂*` around a stationary
//!   pure state `|e₁⟩⟨e₁|` ([`YZGenerator`]);
//! * the *GKS form* of a two-level system with jump operator
//!   `D = [[0,0],[1,0]]` and parameters `(ξ, η, ν, ζ)` ([`GKSParams`]).
//!
//! When `ν = 0` the GKS generator has the pure absorbing state `diag(0, 1)`
//! and [`gks_to_yz`] rewrites it in yz form.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mat2::{
    c, eig_hermitian2, inner, orthogonal_complement, ComplexMat2, Ket, SuperOp4, C64,
};

/// Tolerance for the structural constraints of a yz generator.
pub const GENERATOR_TOL: f64 = 1e-10;

/// Slack on `|ζ|² ≤ ν(ν+η)`.
pub const ZETA_SLACK: f64 = 1e-12;

/// Rate gaps at or below this are rejected.
pub const GAP_TOL: f64 = 1e-12;

/// The jump operator `D = [[0,0],[1,0]]`.
pub fn jump_operator() -> ComplexMat2 {
    ComplexMat2::from_real([[0.0, 0.0], [1.0, 0.0]])
}

/// A generator `yρ + ρy* + Σ zᵢρzᵢ*` with stationary pure state `|e₁⟩⟨e₁|`.
///
/// Construction checks `(y + y*)e₁ = 0`, `⟨e₂, y e₁⟩ = 0`, `zᵢe₁ = 0` and
/// trace preservation. Only the Hermitian part of `y` is required to kill
/// `e₁`; a phase `y e₁ = iθ e₁` is accepted.
#[derive(Clone, Debug, PartialEq)]
pub struct YZGenerator {
    pub y: ComplexMat2,
    pub z1: ComplexMat2,
    pub z2: ComplexMat2,
    pub e1: Ket,
    pub e2: Ket,
}

impl YZGenerator {
    pub fn new(y: ComplexMat2, z1: ComplexMat2, z2: ComplexMat2, e1: Ket) -> Result<Self> {
        let g = Self::assemble(y, z1, z2, e1)?;
        let violations = g.violations(true);
        if violations.is_empty() {
            Ok(g)
        } else {
            Err(Error::InvalidGenerator(violations))
        }
    }

    /// Like [`YZGenerator::new`] but accepts generators that do not
    /// annihilate the trace (sub-Markovian or diagnostic inputs).
    pub fn without_trace_check(
        y: ComplexMat2,
        z1: ComplexMat2,
        z2: ComplexMat2,
        e1: Ket,
    ) -> Result<Self> {
        let g = Self::assemble(y, z1, z2, e1)?;
        let violations = g.violations(false);
        if violations.is_empty() {
            Ok(g)
        } else {
            Err(Error::InvalidGenerator(violations))
        }
    }

    fn assemble(y: ComplexMat2, z1: ComplexMat2, z2: ComplexMat2, e1: Ket) -> Result<Self> {
        let finite = y.is_finite()
            && z1.is_finite()
            && z2.is_finite()
            && e1.iter().all(|z| z.re.is_finite() && z.im.is_finite());
        if !finite {
            return Err(Error::NonFinite);
        }
        let e2 = orthogonal_complement(&e1);
        Ok(Self { y, z1, z2, e1, e2 })
    }

    /// Human-readable list of violated constraints.
    pub fn violations(&self, check_trace: bool) -> Vec<String> {
        let mut out = Vec::new();
        let norm = self.e1.norm();
        if (norm - 1.0).abs() > 1e-12 {
            out.push(format!("e1 is not a unit vector (norm {norm})"));
        }
        let herm = self.y + self.y.adjoint();
        let r = herm.apply(&self.e1).norm();
        if r > GENERATOR_TOL {
            out.push(format!("(y + y*)·e1 = 0 violated (residual {r:.3e})"));
        }
        let r = self.y.matrix_element(&self.e2, &self.e1).norm();
        if r > GENERATOR_TOL {
            out.push(format!(
                "e1 is not an eigenvector of y: <e2, y e1> = {r:.3e}"
            ));
        }
        for (name, z) in [("z1", &self.z1), ("z2", &self.z2)] {
            let r = z.apply(&self.e1).norm();
            if r > GENERATOR_TOL {
                out.push(format!("{name}·e1 = 0 violated (residual {r:.3e})"));
            }
        }
        if check_trace {
            let d = self.map_superop().trace_annihilation_defect();
            if d > GENERATOR_TOL {
                out.push(format!("generator is not trace-annihilating (defect {d:.3e})"));
            }
        }
        out
    }

    fn map_superop(&self) -> SuperOp4 {
        let (y, z1, z2) = (self.y, self.z1, self.z2);
        SuperOp4::from_map(|r| {
            y * *r + *r * y.adjoint() + z1 * *r * z1.adjoint() + z2 * *r * z2.adjoint()
        })
    }

    /// Superoperator of `𝓙(ρ) = Σ zᵢρzᵢ*`.
    pub fn jump_superop(&self) -> SuperOp4 {
        SuperOp4::conjugation(&self.z1) + SuperOp4::conjugation(&self.z2)
    }

    /// `|e₁⟩⟨e₁|`.
    pub fn p1(&self) -> ComplexMat2 {
        ComplexMat2::projector(&self.e1)
    }

    /// `|e₂⟩⟨e₂|`.
    pub fn p2(&self) -> ComplexMat2 {
        ComplexMat2::projector(&self.e2)
    }
}

/// Parameters `(ξ, η, ν, ζ)` of the two-level GKS generator.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GKSParams {
    pub xi: f64,
    pub eta: f64,
    pub nu: f64,
    pub zeta: C64,
}

/// Sign of `Δ = 4(|ζ|² − 4ξ²)`, which selects the shape of the `(u₁, u₂)`
/// solution.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum DiscriminantCase {
    /// `Δ > 0`: two real exponents `m₁ ≠ m₂`.
    DistinctReal,
    /// `Δ < 0`: damped rotation.
    Oscillatory,
    /// `Δ = 0`: defective double root with a secular term.
    Defective,
}

impl DiscriminantCase {
    pub fn label(&self) -> &'static str {
        match self {
            DiscriminantCase::DistinctReal => "b",
            DiscriminantCase::Oscillatory => "c",
            DiscriminantCase::Defective => "d",
        }
    }
}

/// `|Δ|` at or below this is treated as the defective case.
pub const DISCRIMINANT_TOL: f64 = 1e-10;

impl GKSParams {
    pub fn new(xi: f64, eta: f64, nu: f64, zeta: C64) -> Result<Self> {
        let p = Self { xi, eta, nu, zeta };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.xi, self.eta, self.nu, self.zeta.re, self.zeta.im];
        if !all.iter().all(|x| x.is_finite()) {
            return Err(Error::NonFinite);
        }
        if self.eta <= 0.0 {
            return Err(Error::InvalidParams(format!("eta > 0 violated (eta = {})", self.eta)));
        }
        if self.nu < 0.0 {
            return Err(Error::InvalidParams(format!("nu >= 0 violated (nu = {})", self.nu)));
        }
        let lhs = self.zeta.norm_sqr();
        let rhs = self.nu * (self.nu + self.eta);
        if lhs > rhs + ZETA_SLACK {
            return Err(Error::InvalidParams(format!(
                "|zeta|^2 <= nu(nu + eta) violated ({lhs} > {rhs})"
            )));
        }
        Ok(())
    }

    /// `Δ = 4(|ζ|² − 4ξ²)`.
    pub fn discriminant(&self) -> f64 {
        4.0 * (self.zeta.norm_sqr() - 4.0 * self.xi * self.xi)
    }

    pub fn case(&self) -> DiscriminantCase {
        let d = self.discriminant();
        if d.abs() <= DISCRIMINANT_TOL {
            DiscriminantCase::Defective
        } else if d > 0.0 {
            DiscriminantCase::DistinctReal
        } else {
            DiscriminantCase::Oscillatory
        }
    }

    /// `u₃` of the absorbing state, `−η/(2ν+η)`.
    pub fn absorbing_u3(&self) -> f64 {
        -self.eta / (2.0 * self.nu + self.eta)
    }

    pub fn has_pure_absorbing_state(&self) -> bool {
        self.nu == 0.0 && self.zeta == C64::default()
    }
}

/// Matrix of `ρ ↦ yρ + ρy* + z₁ρz₁* + z₂ρz₂*`.
pub fn superop_from_yz(g: &YZGenerator) -> Result<SuperOp4> {
    let violations = g.violations(true);
    if !violations.is_empty() {
        return Err(Error::InvalidGenerator(violations));
    }
    Ok(g.map_superop())
}

/// Matrix of the GKS generator
///
/// ```text
/// iξ[DD†−D†D, ρ] − (ν+η)/2 (D†Dρ − 2DρD† + ρD†D)
///                − ν/2 (DD†ρ − 2D†ρD + ρDD†) + ζ̄ DρD + ζ D†ρD†
/// ```
pub fn superop_from_gks(p: &GKSParams) -> Result<SuperOp4> {
    p.validate()?;
    let d = jump_operator();
    let dd = d.adjoint();
    let k = d * dd - dd * d;
    let down = dd * d;
    let up = d * dd;
    let GKSParams { xi, eta, nu, zeta } = *p;
    Ok(SuperOp4::from_map(|r| {
        let r = *r;
        c(0.0, xi) * (k * r - r * k)
            - (0.5 * (nu + eta)) * (down * r - 2.0 * (d * r * dd) + r * down)
            - (0.5 * nu) * (up * r - 2.0 * (dd * r * d) + r * up)
            + zeta.conj() * (d * r * d)
            + zeta * (dd * r * dd)
    }))
}

/// The `ν = 0` GKS generator in yz form:
/// `y = diag(−η/2 − iξ, iξ)`, `z₁ = [[0,0],[√η,0]]`, `z₂ = 0`,
/// `e₁ = (0,1)`, `e₂ = (1,0)`.
pub fn gks_to_yz(p: &GKSParams) -> Result<YZGenerator> {
    p.validate()?;
    if !p.has_pure_absorbing_state() {
        return Err(Error::NotPureAbsorbing {
            nu: p.nu,
            zeta_abs: p.zeta.norm(),
        });
    }
    let y = ComplexMat2::diag_c(c(-0.5 * p.eta, -p.xi), c(0.0, p.xi));
    let z1 = ComplexMat2::from_real([[0.0, 0.0], [p.eta.sqrt(), 0.0]]);
    YZGenerator::new(y, z1, ComplexMat2::zero(), Ket::new(c(0.0, 0.0), c(1.0, 0.0)))
}

/// `η`, `a` and the gap `η − a` governing the decay towards `|e₁⟩⟨e₁|`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateParams {
    pub eta: f64,
    pub a: f64,
    pub gap: f64,
}

fn eta_and_a(g: &YZGenerator) -> Result<(f64, f64)> {
    let minus_re_y = -(g.y + g.y.adjoint());
    let eta = eig_hermitian2(&minus_re_y)?.0.eigenvalue;
    let a = [g.z1, g.z2]
        .iter()
        .map(|z| inner(&z.apply(&g.e2), &g.e2).norm_sqr())
        .sum();
    Ok((eta, a))
}

/// `η` = top eigenvalue of `−(y + y*)`, `a = Σ |⟨zᵢe₂, e₂⟩|²`.
pub fn rate_params(g: &YZGenerator) -> Result<RateParams> {
    let (eta, a) = eta_and_a(g)?;
    let gap = eta - a;
    if gap <= GAP_TOL {
        return Err(Error::NonPositiveGap { eta, a, gap });
    }
    Ok(RateParams { eta, a, gap })
}

/// `𝓙*(|e₁⟩⟨e₁|) = Σ zᵢ*|e₁⟩⟨e₁|zᵢ`, checked against `(η − a)|e₂⟩⟨e₂|`.
pub fn jstar_on_e1(g: &YZGenerator) -> Result<ComplexMat2> {
    let p1 = g.p1();
    let computed = g.z1.adjoint() * p1 * g.z1 + g.z2.adjoint() * p1 * g.z2;
    let (eta, a) = eta_and_a(g)?;
    let residual = computed.max_abs_diff(&((eta - a) * g.p2()));
    if residual > GENERATOR_TOL {
        return Err(Error::IdentityViolation { residual });
    }
    Ok(computed)
}

/// `ρ_∞ = ½(I − η/(2ν+η) σ₃)`.
pub fn absorbing_state(p: &GKSParams) -> ComplexMat2 {
    0.5 * (ComplexMat2::identity() + p.absorbing_u3() * ComplexMat2::sigma3())
}

/// A generator in either parametrisation.
#[derive(Clone, Debug, PartialEq)]
pub enum Generator {
    Gks(GKSParams),
    Yz(YZGenerator),
}

impl Generator {
    pub fn superop(&self) -> Result<SuperOp4> {
        match self {
            Generator::Gks(p) => superop_from_gks(p),
            Generator::Yz(g) => superop_from_yz(g),
        }
    }

    /// The yz form when the generator has a pure absorbing state.
    pub fn pure_absorbing(&self) -> Option<YZGenerator> {
        match self {
            Generator::Gks(p) => gks_to_yz(p).ok(),
            Generator::Yz(g) => rate_params(g).ok().map(|_| g.clone()),
        }
    }

    /// The absorbing state, when known in closed form.
    pub fn absorbing_state(&self) -> Option<ComplexMat2> {
        match self {
            Generator::Gks(p) => Some(absorbing_state(p)),
            Generator::Yz(g) => rate_params(g).ok().map(|_| g.p1()),
        }
    }

    /// `|e₂⟩⟨e₂|`, or `I − ρ_∞` in GKS form.
    pub fn e2_projector(&self) -> ComplexMat2 {
        match self {
            Generator::Gks(_) => ComplexMat2::diag(1.0, 0.0),
            Generator::Yz(g) => g.p2(),
        }
    }

    pub fn label(&self) -> String {
        match self {
            Generator::Gks(p) => format!(
                "gks(xi={}, eta={}, nu={}, zeta={}{:+}i)",
                p.xi, p.eta, p.nu, p.zeta.re, p.zeta.im
            ),
            Generator::Yz(_) => "yz".to_string(),
        }
    }
}

/// JSON form of a generator:
/// `{"form":"gks","xi":…,"eta":…,"nu":…,"zeta":[re,im]}` or
/// `{"form":"yz","y":M,"z1":M,"z2":M,"e1":[[re,im],[re,im]]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "lowercase", deny_unknown_fields)]
pub enum GeneratorSpec {
    Gks {
        xi: f64,
        eta: f64,
        #[serde(default)]
        nu: f64,
        #[serde(default)]
        zeta: [f64; 2],
    },
    Yz {
        y: ComplexMat2,
        z1: ComplexMat2,
        #[serde(default = "ComplexMat2::zero")]
        z2: ComplexMat2,
        e1: [[f64; 2]; 2],
    },
}

impl GeneratorSpec {
    /// Validates and builds the generator.
    pub fn build(&self) -> Result<Generator> {
        match self {
            GeneratorSpec::Gks { xi, eta, nu, zeta } => Ok(Generator::Gks(GKSParams::new(
                *xi,
                *eta,
                *nu,
                c(zeta[0], zeta[1]),
            )?)),
            GeneratorSpec::Yz { y, z1, z2, e1 } => {
                let e1 = Ket::new(c(e1[0][0], e1[0][1]), c(e1[1][0], e1[1][1]));
                Ok(Generator::Yz(YZGenerator::new(*y, *z1, *z2, e1)?))
            }
        }
    }
}

impl From<&Generator> for GeneratorSpec {
    fn from(g: &Generator) -> Self {
        match g {
            Generator::Gks(p) => GeneratorSpec::Gks {
                xi: p.xi,
                eta: p.eta,
                nu: p.nu,
                zeta: [p.zeta.re, p.zeta.im],
            },
            Generator::Yz(g) => GeneratorSpec::Yz {
                y: g.y,
                z1: g.z1,
                z2: g.z2,
                e1: [[g.e1[0].re, g.e1[0].im], [g.e1[1].re, g.e1[1].im]],
            },
        }
    }
}
