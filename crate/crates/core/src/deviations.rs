//! Spectral decay of evolved states and the large-deviation rate function.
//!
//! For a generator with pure absorbing state `|e₁⟩⟨e₁|` the least eigenvalue
//! `a₂,ₜ` of `ρₜ` decays like `e^{t(a−η)}` for every initial state other than
//! `|e₁⟩⟨e₁|`. The rate function of the orthogonal measures of `ρₜ` is
//! then `0` at `|e₁⟩⟨e₁|`, `η − a` at `|e₂⟩⟨e₂|` and `+∞` elsewhere. When the
//! absorbing state is faithful both eigenvalue rates vanish.

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::lindblad::{rate_params, superop_from_yz, Generator, RateParams, YZGenerator};
use crate::mat2::{
    eig_hermitian2, expm4, inner, pauli_compose, BlochState, ComplexMat2, SpectralPair, SuperOp4,
    Ket, C64,
};
use crate::semigroup::check_grid;

/// Tolerance when matching a projection against `|e₁⟩⟨e₁|` or `|e₂⟩⟨e₂|`.
pub const PROJECTION_TOL: f64 = 1e-10;

/// Eigenvalues at or below this are treated as underflowed.
pub const UNDERFLOW: f64 = 1e-300;

/// Initial states closer than this to the absorbing state are rejected.
pub const START_TOL: f64 = 1e-8;

/// Constant `C` of the `C/t_max` bias budget on empirical rates.
pub const BIAS_CONSTANT: f64 = 5.0;

/// `C/t_max + 1e-6`.
pub fn rate_tolerance(t_max: f64) -> f64 {
    BIAS_CONSTANT / t_max + 1e-6
}

/// One atom `weight · δ_{projection}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Atom {
    pub weight: f64,
    pub projection: ComplexMat2,
}

/// The discrete measure on pure states given by a spectral decomposition.
#[derive(Clone, Debug, PartialEq)]
pub struct OrthogonalMeasure {
    /// Sorted by descending weight.
    pub atoms: Vec<Atom>,
    /// The state is `½I` and the atoms sit on the standard basis.
    pub degenerate: bool,
}

impl OrthogonalMeasure {
    pub fn reconstruct(&self) -> ComplexMat2 {
        self.atoms
            .iter()
            .fold(ComplexMat2::zero(), |acc, a| acc + a.weight * a.projection)
    }

    pub fn total_weight(&self) -> f64 {
        self.atoms.iter().map(|a| a.weight).sum()
    }
}

pub fn orthogonal_measure(rho: &ComplexMat2) -> Result<OrthogonalMeasure> {
    let (hi, lo) = eig_hermitian2(rho)?;
    let atom = |p: SpectralPair| Atom {
        weight: p.eigenvalue,
        projection: p.projection,
    };
    Ok(OrthogonalMeasure {
        degenerate: hi.degenerate,
        atoms: vec![atom(hi), atom(lo)],
    })
}

/// Value of the rate function at a pure state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RateValue {
    Zero,
    Finite(f64),
    Infinite,
}

/// `J(|e⟩⟨e|)` together with the point it was evaluated at.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RateFunctionValue {
    pub value: RateValue,
    pub at: ComplexMat2,
}

/// `J(p) = 0` if `p = |e₁⟩⟨e₁|`, `η − a` if `p = |e₂⟩⟨e₂|`, `+∞` otherwise.
pub fn rate_function(g: &YZGenerator, p: &ComplexMat2) -> Result<RateFunctionValue> {
    if p.check_projection(PROJECTION_TOL)? != 1 {
        return Err(Error::NotAProjection("rank is not one".into()));
    }
    let RateParams { gap, .. } = rate_params(g)?;
    let value = if (*p - g.p1()).op_norm() <= PROJECTION_TOL {
        RateValue::Zero
    } else if (*p - g.p2()).op_norm() <= PROJECTION_TOL {
        RateValue::Finite(gap)
    } else {
        RateValue::Infinite
    };
    Ok(RateFunctionValue { value, at: *p })
}

/// When the evolved state first becomes faithful for good.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FaithfulOnset {
    /// Faithful at every sampled time.
    Immediately,
    /// Faithful from this grid time onwards.
    At(f64),
    /// Not faithful at the last sampled time.
    NeverInWindow,
}

impl Serialize for FaithfulOnset {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            FaithfulOnset::Immediately => s.serialize_str("immediately"),
            FaithfulOnset::At(t) => s.serialize_f64(*t),
            FaithfulOnset::NeverInWindow => s.serialize_str("never-in-window"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    /// Pure absorbing state; the least eigenvalue decays at rate `η − a`.
    PureAbsorbing,
    /// Faithful absorbing state; both eigenvalue rates vanish.
    Trivial,
}

/// Empirical decay of the least eigenvalue along a time grid.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RateReport {
    pub regime: Regime,
    /// `a − η` when the absorbing state is pure.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub predicted_gap: Option<f64>,
    /// `(t, (1/t)·log a₂,ₜ)` for `t > 0` up to underflow.
    pub series: Vec<(f64, f64)>,
    /// `(t, (1/t)·log a₁,ₜ)`.
    pub top_series: Vec<(f64, f64)>,
    /// `(t, a₂,ₜ)` at every sampled time.
    pub eig_min: Vec<(f64, f64)>,
    pub final_estimate: f64,
    /// `|final_estimate − reference|`, the reference being `a − η` or `0`.
    pub abs_error: f64,
    pub faithful_from: FaithfulOnset,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub advisory: Option<String>,
}

impl RateReport {
    pub fn t_max(&self) -> f64 {
        self.series.last().map_or(0.0, |p| p.0)
    }

    pub fn tolerance(&self) -> f64 {
        rate_tolerance(self.t_max())
    }

    pub fn within_tolerance(&self) -> bool {
        self.abs_error <= self.tolerance()
    }

    /// CSV with header `t,log_rate,eig_min`.
    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        use crate::semigroup::fmt17;
        writeln!(w, "t,log_rate,eig_min")?;
        for &(t, a2) in &self.eig_min {
            let rate = self
                .series
                .iter()
                .find(|p| p.0 == t)
                .map_or(String::new(), |p| fmt17(p.1));
            writeln!(w, "{},{},{}", fmt17(t), rate, fmt17(a2))?;
        }
        Ok(())
    }
}

fn reject_absorbing_start(g: &Generator, rho0: &ComplexMat2) -> Result<()> {
    if let Some(inf) = g.absorbing_state() {
        let distance = (*rho0 - inf).op_norm();
        if distance <= START_TOL {
            return Err(Error::DegenerateStart { distance });
        }
    }
    Ok(())
}

fn sample_evolution(s: &SuperOp4, rho0: &ComplexMat2, grid: &[f64]) -> Result<Vec<ComplexMat2>> {
    grid.iter()
        .map(|&t| Ok(expm4(s, t)?.apply(rho0)))
        .collect()
}

/// The evolution written in the basis `(e₂, e₁)`, in which the absorbing
/// state is `diag(0, 1)`. The `e₂`-population is then a matrix entry of its
/// own and keeps relative precision down to `e^{t(a−η)}` far below round-off
/// of the `O(1)` entries.
struct AdaptedFrame {
    s: SuperOp4,
    /// Unitary with columns `e₂`, `e₁`.
    w: ComplexMat2,
}

impl AdaptedFrame {
    fn new(g: &Generator) -> Result<Self> {
        match g {
            Generator::Gks(_) => Ok(Self {
                s: g.superop()?,
                w: ComplexMat2::identity(),
            }),
            Generator::Yz(yz) => Self::from_yz(yz),
        }
    }

    fn from_yz(g: &YZGenerator) -> Result<Self> {
        let w = ComplexMat2::new([[g.e2[0], g.e1[0]], [g.e2[1], g.e1[1]]]);
        let zero = C64::new(0.0, 0.0);
        let rotate = |m: &ComplexMat2| w.adjoint() * *m * w;
        // Entries the generator constraints force to vanish are set to zero.
        let mut y = rotate(&g.y);
        y.0[(0, 1)] = zero;
        y.0[(1, 0)] = zero;
        let jump = |z: &ComplexMat2| {
            let mut z = rotate(z);
            z.0[(0, 1)] = zero;
            z.0[(1, 1)] = zero;
            z
        };
        let e1 = Ket::new(zero, C64::new(1.0, 0.0));
        let adapted = YZGenerator::without_trace_check(y, jump(&g.z1), jump(&g.z2), e1)?;
        Ok(Self {
            s: superop_from_yz(&adapted)?,
            w,
        })
    }

    fn to_frame(&self, m: &ComplexMat2) -> ComplexMat2 {
        self.w.adjoint() * *m * self.w
    }

    /// `|e₁⟩⟨e₁|` and `|e₂⟩⟨e₂|` map exactly onto the frame projectors.
    fn projection_to_frame(&self, p: &ComplexMat2) -> ComplexMat2 {
        let q = self.to_frame(p);
        [ComplexMat2::diag(1.0, 0.0), ComplexMat2::diag(0.0, 1.0)]
            .into_iter()
            .find(|e| (q - *e).op_norm() <= PROJECTION_TOL)
            .unwrap_or(q)
    }

    fn sample(&self, rho0: &ComplexMat2, grid: &[f64]) -> Result<Vec<ComplexMat2>> {
        sample_evolution(&self.s, &self.to_frame(rho0), grid)
    }
}

/// Evolves `rho0` on the grid and reads the decay rate of its least
/// eigenvalue at the largest grid time.
pub fn empirical_rate(g: &Generator, rho0: &ComplexMat2, grid: &[f64]) -> Result<RateReport> {
    check_grid(grid)?;
    rho0.check_density()?;
    reject_absorbing_start(g, rho0)?;
    let frame = AdaptedFrame::new(g)?;
    let params = match g.pure_absorbing() {
        Some(yz) => Some(rate_params(&yz)?),
        None => None,
    };
    let t_max = *grid.last().expect("grid checked non-empty");
    if let Some(p) = params {
        let required = 10.0 / p.gap;
        if t_max < required {
            return Err(Error::InsufficientGrid { t_max, required });
        }
    }
    let predicted_gap = params.map(|p| p.a - p.eta);

    let mut series = Vec::new();
    let mut top_series = Vec::new();
    let mut eig_min = Vec::new();
    let mut advisory = None;
    let mut was_faithful = false;
    for (&t, rho) in grid.iter().zip(frame.sample(rho0, grid)?) {
        let (hi, lo) = eig_hermitian2(&hermitize(&rho))?;
        let a2 = lo.eigenvalue;
        if was_faithful && a2 <= UNDERFLOW {
            advisory = Some(format!(
                "least eigenvalue {a2:.3e} reached the underflow range at t = {t}; series truncated"
            ));
            break;
        }
        eig_min.push((t, a2));
        if a2 > UNDERFLOW {
            was_faithful = true;
            if t > 0.0 {
                series.push((t, a2.ln() / t));
                top_series.push((t, hi.eigenvalue.ln() / t));
            }
        }
    }
    let faithful_from = faithful_onset(&eig_min);
    let final_estimate = series.last().map_or(f64::NAN, |p| p.1);
    let reference = predicted_gap.unwrap_or(0.0);
    Ok(RateReport {
        regime: if params.is_some() {
            Regime::PureAbsorbing
        } else {
            Regime::Trivial
        },
        predicted_gap,
        series,
        top_series,
        eig_min,
        final_estimate,
        abs_error: (final_estimate - reference).abs(),
        faithful_from,
        advisory,
    })
}

fn faithful_onset(eig_min: &[(f64, f64)]) -> FaithfulOnset {
    match eig_min.iter().rposition(|&(_, a2)| a2 <= UNDERFLOW) {
        None => FaithfulOnset::Immediately,
        Some(i) if i + 1 == eig_min.len() => FaithfulOnset::NeverInWindow,
        Some(i) => FaithfulOnset::At(eig_min[i + 1].0),
    }
}

fn hermitize(m: &ComplexMat2) -> ComplexMat2 {
    0.5 * (*m + m.adjoint())
}

/// `(1/t)·log ω(𝓣ₜ(p))` along a grid.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecayReport {
    pub series: Vec<(f64, f64)>,
    pub final_estimate: f64,
    /// `a − η` for `p = |e₂⟩⟨e₂|` with a pure absorbing state, `0` otherwise.
    pub expected: f64,
}

impl DecayReport {
    pub fn abs_error(&self) -> f64 {
        (self.final_estimate - self.expected).abs()
    }
}

/// Decay of `ω(𝓣ₜ(p)) = tr(𝓣*ₜ(ρ)·p)` for a nonzero projection `p`.
pub fn projection_decay(
    g: &Generator,
    omega: &ComplexMat2,
    p: &ComplexMat2,
    grid: &[f64],
) -> Result<DecayReport> {
    check_grid(grid)?;
    omega.check_density()?;
    let rank = p.check_projection(PROJECTION_TOL)?;
    if rank == 0 {
        return Err(Error::NotAProjection("zero projection".into()));
    }
    reject_absorbing_start(g, omega)?;
    let frame = AdaptedFrame::new(g)?;
    let p_frame = frame.projection_to_frame(p);
    let expected = match g.pure_absorbing() {
        Some(yz) if rank == 1 && (*p - yz.p2()).op_norm() <= PROJECTION_TOL => {
            let r = rate_params(&yz)?;
            r.a - r.eta
        }
        _ => 0.0,
    };
    let mut series = Vec::new();
    for (&t, rho) in grid.iter().zip(frame.sample(omega, grid)?) {
        if t == 0.0 {
            continue;
        }
        let value = (rho * p_frame).trace().re;
        if value <= UNDERFLOW {
            break;
        }
        series.push((t, value.ln() / t));
    }
    let final_estimate = series.last().map_or(f64::NAN, |p| p.1);
    Ok(DecayReport {
        series,
        final_estimate,
        expected,
    })
}

/// `maxₜ |⟨e₂, 𝓣*ₜ(|e₂⟩⟨e₂|)e₂⟩ − e^{t(a−η)}|`.
pub fn volterra_identity_check(g: &YZGenerator, grid: &[f64]) -> Result<f64> {
    check_grid(grid)?;
    let RateParams { eta, a, .. } = rate_params(g)?;
    let s = superop_from_yz(g)?;
    let p2 = g.p2();
    let mut worst: f64 = 0.0;
    for (&t, rho) in grid.iter().zip(sample_evolution(&s, &p2, grid)?) {
        let u = rho.matrix_element(&g.e2, &g.e2).re;
        worst = worst.max((u - (t * (a - eta)).exp()).abs());
    }
    Ok(worst)
}

/// `κ = Σᵢ ⟨e₁, zᵢe₂⟩·conj⟨e₂, zᵢe₂⟩`, the coherence the jumps feed from
/// `|e₂⟩⟨e₂|` into `|e₁⟩⟨e₂|`.
pub fn jump_coherence(g: &YZGenerator) -> C64 {
    [g.z1, g.z2]
        .iter()
        .map(|z| {
            let ze2 = z.apply(&g.e2);
            inner(&g.e1, &ze2) * inner(&g.e2, &ze2).conj()
        })
        .sum()
}

/// `⟨e₁, 𝓣*ₜ(|e₂⟩⟨e₂|)e₂⟩ = κ·(e^{μt} − e^{λt})/(μ − λ)` with
/// `μ = ⟨e₁,ye₁⟩ + conj⟨e₂,ye₂⟩` and `λ = a − η`; it vanishes when `κ = 0`.
pub fn off_diagonal_closed_form(g: &YZGenerator, t: f64) -> Result<C64> {
    let RateParams { eta, a, .. } = rate_params(g)?;
    let mu = g.y.matrix_element(&g.e1, &g.e1) + g.y.matrix_element(&g.e2, &g.e2).conj();
    let lambda = a - eta;
    let z = (mu - lambda) * t;
    // (e^z − 1)/z, by series near 0.
    let exprel = if z.norm() < 1e-5 {
        1.0 + z / 2.0 + z * z / 6.0
    } else {
        (z.exp() - 1.0) / z
    };
    Ok(jump_coherence(g) * (lambda * t).exp() * t * exprel)
}

/// `maxₜ |⟨e₁, 𝓣*ₜ(|e₂⟩⟨e₂|)e₂⟩ − v(t)|` and the same for the adjoint
/// entry, `v` from [`off_diagonal_closed_form`].
pub fn off_diagonal_residual(g: &YZGenerator, grid: &[f64]) -> Result<f64> {
    check_grid(grid)?;
    let s = superop_from_yz(g)?;
    let mut worst: f64 = 0.0;
    for (&t, rho) in grid.iter().zip(sample_evolution(&s, &g.p2(), grid)?) {
        let v = off_diagonal_closed_form(g, t)?;
        let a = (rho.matrix_element(&g.e1, &g.e2) - v).norm();
        let b = (rho.matrix_element(&g.e2, &g.e1) - v.conj()).norm();
        worst = worst.max(a).max(b);
    }
    Ok(worst)
}

/// `maxₜ max(|⟨e₁, 𝓣*ₜ(|e₂⟩⟨e₂|)e₂⟩|, |⟨e₂, 𝓣*ₜ(|e₂⟩⟨e₂|)e₁⟩|)`.
pub fn off_diagonal_magnitude(g: &YZGenerator, grid: &[f64]) -> Result<f64> {
    check_grid(grid)?;
    let s = superop_from_yz(g)?;
    let mut worst: f64 = 0.0;
    for rho in sample_evolution(&s, &g.p2(), grid)? {
        let a = rho.matrix_element(&g.e1, &g.e2).norm();
        let b = rho.matrix_element(&g.e2, &g.e1).norm();
        worst = worst.max(a).max(b);
    }
    Ok(worst)
}

/// The six oblique projections `½(I + n·σ)` for `n = ±x, ±y` and two
/// diagonal axes.
pub fn oblique_projections() -> Vec<(String, ComplexMat2)> {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    [
        ("+x", [1.0, 0.0, 0.0]),
        ("-x", [-1.0, 0.0, 0.0]),
        ("+y", [0.0, 1.0, 0.0]),
        ("-y", [0.0, -1.0, 0.0]),
        ("+x+z", [r, 0.0, r]),
        ("+y-z", [0.0, r, -r]),
    ]
    .into_iter()
    .map(|(name, n)| (name.to_string(), pauli_compose(&BlochState::state(n))))
    .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GoverningEntry {
    pub projection: String,
    pub state: usize,
    /// `sup{λ ∈ σ(Z) : p·E_λ ≠ 0}`.
    pub predicted: f64,
    /// `ω_{t_max}(p)^{1/t_max}`.
    pub empirical: f64,
    pub discrepancy: f64,
    /// `|(1/t)·log ω_t(p) − log predicted|`.
    pub log_discrepancy: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GoverningReport {
    /// Eigenvalues of `Z = exp(−𝓙*(|e₁⟩⟨e₁|))`, descending.
    pub spectrum: [f64; 2],
    pub t_max: f64,
    pub entries: Vec<GoverningEntry>,
    pub max_discrepancy: f64,
    pub max_log_discrepancy: f64,
}

impl GoverningReport {
    /// Log discrepancies within the `C/t_max` bias budget.
    pub fn passes(&self) -> bool {
        self.max_log_discrepancy <= rate_tolerance(self.t_max)
    }
}

/// Compares `ωₜ(p)^{1/t}` with the spectral prediction of the governing
/// operator `Z = exp(−𝓙*(|e₁⟩⟨e₁|))` for `|e₁⟩⟨e₁|`, `|e₂⟩⟨e₂|`, `I` and the
/// oblique projections, at the last grid time.
pub fn governing_operator_check(
    g: &YZGenerator,
    grid: &[f64],
    sample_states: &[ComplexMat2],
) -> Result<GoverningReport> {
    check_grid(grid)?;
    let frame = AdaptedFrame::from_yz(g)?;
    let p1 = g.p1();
    let jstar = g.z1.adjoint() * p1 * g.z1 + g.z2.adjoint() * p1 * g.z2;
    let (top, bottom) = eig_hermitian2(&hermitize(&jstar))?;
    // exp(−λ) reverses the order.
    let z_spectrum = [
        ((-bottom.eigenvalue).exp(), bottom.projection),
        ((-top.eigenvalue).exp(), top.projection),
    ];
    let predict = |p: &ComplexMat2| -> f64 {
        z_spectrum
            .iter()
            .filter(|(_, e)| (*p * *e).op_norm() > PROJECTION_TOL)
            .map(|(l, _)| *l)
            .fold(f64::NEG_INFINITY, f64::max)
    };

    let mut projections = vec![
        ("e1".to_string(), p1),
        ("e2".to_string(), g.p2()),
        ("I".to_string(), ComplexMat2::identity()),
    ];
    projections.extend(oblique_projections());

    let t = *grid.last().expect("grid checked non-empty");
    let mut entries = Vec::new();
    for (k, omega) in sample_states.iter().enumerate() {
        let rho = expm4(&frame.s, t)?.apply(&frame.to_frame(omega));
        for (name, p) in &projections {
            let predicted = predict(p);
            let value = (rho * frame.projection_to_frame(p)).trace().re.max(0.0);
            let log_rate = value.ln() / t;
            let empirical = log_rate.exp();
            entries.push(GoverningEntry {
                projection: name.clone(),
                state: k,
                predicted,
                empirical,
                discrepancy: (empirical - predicted).abs(),
                log_discrepancy: (log_rate - predicted.ln()).abs(),
            });
        }
    }
    let max_discrepancy = entries.iter().map(|e| e.discrepancy).fold(0.0, f64::max);
    let max_log_discrepancy = entries.iter().map(|e| e.log_discrepancy).fold(0.0, f64::max);
    Ok(GoverningReport {
        spectrum: [z_spectrum[0].0, z_spectrum[1].0],
        t_max: t,
        entries,
        max_discrepancy,
        max_log_discrepancy,
    })
}
