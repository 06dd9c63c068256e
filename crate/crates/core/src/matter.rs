//! Frames, Madsen pressure/density extraction, energy-momentum tensors of
//! torsion Lagrangians, the antisymmetric-profile solver and the linear
//! combination of matter fields.

use serde::{Deserialize, Serialize};

use crate::connection::ConnectionAtPoint;
use crate::curvature::{raise_all, torsion_contraction, trace_with, CurvatureAtPoint};
use crate::error::{MathError, ParseError};
use crate::expr::{parse_expression, Expression};
use crate::jet::DIM;
use crate::metric::{CoeffSet, Frame, MatterTermSpec, MetricAtPoint, ScalarField, SpacetimeModel};
use crate::quadrature::{adaptive_simpson, DEFAULT_MAX_DEPTH, DEFAULT_TOL};
use crate::tensor::{Lower, Mat4, SymMetricAtPoint, Tensor};

/// Relative size below which an energy density counts as zero.
pub const RHO_ZERO_REL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrameAtPoint {
    pub u_up: [f64; DIM],
    pub u_low: [f64; DIM],
    pub h_low: Mat4,
    /// `h_mixed[k][i]` is `h^k_i = δ^k_i - u_i u^k`.
    pub h_mixed: Mat4,
    /// Set when the comoving vector had to be rescaled by `1/sqrt(g_00)`.
    pub rescaled_comoving: bool,
}

impl FrameAtPoint {
    /// Normalizes `u^i` against the symmetric metric.
    pub fn from_vector(u: [f64; DIM], m: &SymMetricAtPoint) -> Result<Self, MathError> {
        let g = &m.g_lower;
        let norm2: f64 = (0..DIM)
            .flat_map(|a| (0..DIM).map(move |b| (a, b)))
            .map(|(a, b)| g[a][b] * u[a] * u[b])
            .sum();
        if !(norm2 > 0.0) {
            return Err(MathError::NotTimelike(norm2));
        }
        let s = norm2.sqrt().recip();
        let u_up = u.map(|c| c * s);
        let u_low: [f64; DIM] = std::array::from_fn(|i| (0..DIM).map(|a| g[i][a] * u_up[a]).sum());
        let h_low = std::array::from_fn(|i| std::array::from_fn(|j| g[i][j] - u_low[i] * u_low[j]));
        let h_mixed = std::array::from_fn(|k| {
            std::array::from_fn(|i| if k == i { 1.0 } else { 0.0 } - u_low[i] * u_up[k])
        });
        Ok(Self {
            u_up,
            u_low,
            h_low,
            h_mixed,
            rescaled_comoving: false,
        })
    }
}

/// `u^i = δ^i_0 / sqrt(g_00)`.
pub fn comoving_frame(m: &SymMetricAtPoint) -> Result<FrameAtPoint, MathError> {
    let g00 = m.g_lower[0][0];
    if !(g00 > 0.0) {
        return Err(MathError::NotTimelike(g00));
    }
    let mut f = FrameAtPoint::from_vector([1.0, 0.0, 0.0, 0.0], m)?;
    f.rescaled_comoving = g00 != 1.0;
    Ok(f)
}

/// `u^i = (g^{αβ} φ_α φ_β)^{-1/2} g^{iβ} φ_β`.
pub fn frame_from_scalar(
    phi: &Expression,
    model: &SpacetimeModel,
    m: &MetricAtPoint,
) -> Result<FrameAtPoint, MathError> {
    let jet = model.eval_at(phi, m.point, || "scalar_field.phi".into())?;
    let gi = &m.sym.g_upper;
    let up: [f64; DIM] = std::array::from_fn(|i| (0..DIM).map(|b| gi[i][b] * jet.grad[b]).sum());
    let norm2: f64 = (0..DIM).map(|a| up[a] * jet.grad[a]).sum();
    if !(norm2 > 0.0) {
        return Err(MathError::NotTimelike(norm2));
    }
    FrameAtPoint::from_vector(up, &m.sym)
}

/// The frame a model declares: comoving or explicit components.
pub fn model_frame(model: &SpacetimeModel, m: &MetricAtPoint) -> Result<FrameAtPoint, MathError> {
    match &model.frame {
        Frame::Comoving => comoving_frame(&m.sym),
        Frame::Explicit(u) => {
            let mut comps = [0.0; DIM];
            for (i, e) in u.iter().enumerate() {
                comps[i] = model.eval_at(e, m.point, || format!("frame.u[{i}]"))?.value;
            }
            FrameAtPoint::from_vector(comps, &m.sym)
        }
    }
}

fn quad_form(t: &Tensor, u: &[f64; DIM]) -> f64 {
    let mut s = 0.0;
    for a in 0..DIM {
        for b in 0..DIM {
            s += t.get(&[a, b]) * u[a] * u[b];
        }
    }
    s
}

/// `p / ρ`, or `None` when ρ vanishes relative to `scale`.
pub fn omega_of(p: f64, rho: f64, scale: f64) -> Option<f64> {
    if scale == 0.0 || rho.abs() <= RHO_ZERO_REL * scale {
        None
    } else {
        Some(p / rho)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PressureDensity {
    pub trace: f64,
    pub p: f64,
    /// Pressure from the projected tensor `Π_ij = -T_αβ h^α_i h^β_j`.
    pub p_pi: f64,
    pub rho: f64,
    pub omega: Option<f64>,
}

pub fn pressure_density_omega(t: &Tensor, frame: &FrameAtPoint, m: &SymMetricAtPoint) -> PressureDensity {
    let trace = trace_with(&m.g_upper, t);
    let rho = quad_form(t, &frame.u_up);
    let p = -trace / 3.0 + rho / 3.0;
    let h = &frame.h_mixed;
    let pi = Tensor::from_fn(&[Lower, Lower], |x| {
        let mut s = 0.0;
        for a in 0..DIM {
            for b in 0..DIM {
                s -= t.get(&[a, b]) * h[a][x[0]] * h[b][x[1]];
            }
        }
        s
    });
    let p_pi = trace_with(&m.g_upper, &pi) / 3.0;
    PressureDensity {
        trace,
        p,
        p_pi,
        rho,
        omega: omega_of(p, rho, t.max_abs()),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Column {
    pub p: f64,
    pub rho: f64,
    pub omega: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Table1 {
    pub general: Column,
    /// Uses `R_00` literally; meaningful for `g_00 = 1`.
    pub comoving: Column,
}

pub fn table1_quantities(
    cur: &CurvatureAtPoint,
    frame: &FrameAtPoint,
    lambda: f64,
) -> Table1 {
    let r = cur.scalar;
    let column = |ruu: f64| {
        let p = ruu / 3.0 + r / 6.0 - lambda;
        let rho = ruu - r / 2.0 + lambda;
        let scale = cur.ricci.max_abs().max(r.abs()).max(lambda.abs());
        Column {
            p,
            rho,
            omega: omega_of(p, rho, scale),
        }
    };
    Table1 {
        general: column(quad_form(&cur.ricci, &frame.u_up)),
        comoving: column(cur.ricci.get(&[0, 0])),
    }
}

/// `R_ij - ½ R g_ij + Λ g_ij`.
pub fn einstein_tensor(cur: &CurvatureAtPoint, m: &SymMetricAtPoint, lambda: f64) -> Tensor {
    let g = &m.g_lower;
    Tensor::from_fn(&[Lower, Lower], |x| {
        cur.ricci.get(x) - 0.5 * cur.scalar * g[x[0]][x[1]] + lambda * g[x[0]][x[1]]
    })
}

pub fn eom_residual(t: &Tensor, cur: &CurvatureAtPoint, m: &SymMetricAtPoint, lambda: f64) -> Tensor {
    einstein_tensor(cur, m, lambda).add_scaled(-1.0, t)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EqmColumn {
    pub p: f64,
    pub rho: f64,
    pub omega: Option<f64>,
    /// Geometric (curvature) side minus matter side.
    pub p_eqm_residual: f64,
    pub rho_eqm_residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatterReport {
    pub t_low: Tensor,
    pub trace: f64,
    pub p: f64,
    pub p_pi: f64,
    pub rho: f64,
    pub omega: Option<f64>,
    pub p_eqm_residual: f64,
    pub rho_eqm_residual: f64,
    pub lambda: f64,
    /// `u^i = δ^i_0` column with `ρ_0 = T_00`.
    pub comoving: EqmColumn,
    pub rescaled_comoving: bool,
}

/// Madsen quantities of `t` plus the residuals against the curvature side.
pub fn matter_report(
    t: Tensor,
    m: &SymMetricAtPoint,
    cur: &CurvatureAtPoint,
    frame: &FrameAtPoint,
    lambda: f64,
) -> MatterReport {
    let pd = pressure_density_omega(&t, frame, m);
    let geo = table1_quantities(cur, frame, lambda);
    let t00 = t.get(&[0, 0]);
    let p0 = -pd.trace / 3.0 + t00 / 3.0;
    MatterReport {
        trace: pd.trace,
        p: pd.p,
        p_pi: pd.p_pi,
        rho: pd.rho,
        omega: pd.omega,
        p_eqm_residual: geo.general.p - pd.p,
        rho_eqm_residual: geo.general.rho - pd.rho,
        lambda,
        comoving: EqmColumn {
            p: p0,
            rho: t00,
            omega: omega_of(p0, t00, t.max_abs()),
            p_eqm_residual: geo.comoving.p - p0,
            rho_eqm_residual: geo.comoving.rho - t00,
        },
        rescaled_comoving: frame.rescaled_comoving,
        t_low: t,
    }
}

/// Energy-momentum tensor of a non-minimally coupled scalar field,
/// `(1 - ξφ²)^{-1} [S_ij + ξ(g_ij □(φ²) - (φ²)_{|i|j})]`.
pub fn madsen_emt(
    field: &ScalarField,
    model: &SpacetimeModel,
    m: &MetricAtPoint,
    c: &ConnectionAtPoint,
) -> Result<Tensor, MathError> {
    let phi = model.eval_at(&field.phi, m.point, || "scalar_field.phi".into())?;
    let conformal = 1.0 - field.xi * phi.value * phi.value;
    if conformal.abs() < 1e-14 {
        return Err(MathError::ConformalSingularity);
    }
    let mut bindings = vec![phi.value];
    bindings.extend(model.param_values());
    let potential = field
        .potential
        .eval_value(&bindings)
        .map_err(|source| MathError::Domain {
            location: "scalar_field.potential".into(),
            source,
        })?;
    let g = &m.sym.g_lower;
    let gi = &m.sym.g_upper;
    let f2 = phi * phi;
    let hess: Mat4 = std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            f2.hess[i][j] - (0..DIM).map(|a| c.gamma_sym[a][i][j] * f2.grad[a]).sum::<f64>()
        })
    });
    let mut boxed = 0.0;
    let mut grad2 = 0.0;
    for a in 0..DIM {
        for b in 0..DIM {
            boxed += gi[a][b] * hess[a][b];
            grad2 += gi[a][b] * phi.grad[a] * phi.grad[b];
        }
    }
    let k = field.xi;
    Ok(Tensor::from_fn(&[Lower, Lower], |x| {
        let (i, j) = (x[0], x[1]);
        let s = phi.grad[i] * phi.grad[j] - (0.5 * grad2 - potential) * g[i][j];
        (s + k * (g[i][j] * boxed - hess[i][j])) / conformal
    }))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EisenhartLagrangian {
    /// `-(v'+w) X`
    pub l_m: f64,
    /// `X = g^{γδ} g^{εα} g^{βζ} T_{εγβ} T_{αδζ}`
    pub x: f64,
    pub tau: Tensor,
    pub w: Tensor,
}

/// `τ_ij = g^{εα} g^{βζ} T_{εiβ} T_{αjζ}`, symmetrized.
pub fn tau_tensor(t_low: &Tensor, g: &Mat4) -> Tensor {
    let m = Tensor::from_fn(&[Lower, Lower], |x| {
        let mut s = 0.0;
        for e in 0..DIM {
            for a in 0..DIM {
                if g[e][a] == 0.0 {
                    continue;
                }
                for b in 0..DIM {
                    for z in 0..DIM {
                        s += g[e][a] * g[b][z] * t_low.get(&[e, x[0], b]) * t_low.get(&[a, x[1], z]);
                    }
                }
            }
        }
        s
    });
    Tensor::from_fn(&[Lower, Lower], |x| 0.5 * (m.get(&[x[0], x[1]]) + m.get(&[x[1], x[0]])))
}

/// `W_ij = A^{αγβ} v_{αγβij}` with `A` the fully raised torsion.
pub fn w_tensor(t_low: &Tensor, g: &Mat4, variation: &[([usize; 5], f64)]) -> Tensor {
    let a = raise_all(t_low, g);
    let mut w = Tensor::zeros(&[Lower, Lower]);
    for &([al, ga, be, i, j], v) in variation {
        let cur = w.get(&[i, j]);
        w.set(&[i, j], cur + a.get(&[al, ga, be]) * v);
    }
    w
}

pub fn eisenhart_matter_lagrangian(
    c: &ConnectionAtPoint,
    m: &MetricAtPoint,
    coeffs: &CoeffSet,
    variation: &[([usize; 5], f64)],
) -> EisenhartLagrangian {
    let g = &m.sym.g_upper;
    let x = torsion_contraction(&c.torsion_low, g);
    EisenhartLagrangian {
        l_m: -coeffs.vw() * x,
        x,
        tau: tau_tensor(&c.torsion_low, g),
        w: w_tensor(&c.torsion_low, g, variation),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EisenhartReport {
    pub lagrangian: EisenhartLagrangian,
    pub report: MatterReport,
    /// Pressure and density as printed in the closed displays.
    pub display_p: f64,
    pub display_rho: f64,
    pub display_p0: f64,
    pub display_rho0: f64,
}

/// `T_ij = (v'+w)(3τ_ij + 2W_ij - ½ X g_ij)` and its Madsen report.
pub fn emt_family(
    c: &ConnectionAtPoint,
    m: &MetricAtPoint,
    cur: &CurvatureAtPoint,
    coeffs: &CoeffSet,
    variation: &[([usize; 5], f64)],
    frame: &FrameAtPoint,
    lambda: f64,
) -> EisenhartReport {
    let lag = eisenhart_matter_lagrangian(c, m, coeffs, variation);
    let k = coeffs.vw();
    let g = &m.sym.g_lower;
    let core = lag.tau.scale(3.0).add_scaled(2.0, &lag.w);
    let t = Tensor::from_fn(&[Lower, Lower], |x| {
        k * (core.get(x) - 0.5 * lag.x * g[x[0]][x[1]])
    });
    let core_trace = trace_with(&m.sym.g_upper, &core);
    let core_uu = quad_form(&core, &frame.u_up);
    let core_00 = core.get(&[0, 0]);
    let report = matter_report(t, &m.sym, cur, frame, lambda);
    EisenhartReport {
        display_p: -k / 3.0 * (core_trace - 1.5 * lag.x - core_uu),
        display_rho: k * (core_uu - 1.5 * lag.x),
        display_p0: -k / 3.0 * (core_trace - 1.5 * lag.x - core_00),
        display_rho0: k * (core_00 - 1.5 * lag.x),
        lagrangian: lag,
        report,
    }
}

/// One summand `α 𝓛` of a matter Lagrangian with its variation tensor.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatterFieldTerm {
    pub label: String,
    pub alpha: f64,
    pub l_value: f64,
    pub v_low: Tensor,
}

pub fn matter_term_at(
    spec: &MatterTermSpec,
    model: &SpacetimeModel,
    point: [f64; DIM],
) -> Result<MatterFieldTerm, MathError> {
    let l_value = model
        .eval_at(&spec.lagrangian, point, || format!("matter_term {}: L", spec.label))?
        .value;
    let mut v = Tensor::zeros(&[Lower, Lower]);
    for i in 0..DIM {
        for j in 0..DIM {
            let val = model
                .eval_at(&spec.variation[i][j], point, || format!("matter_term {}: V[{i}][{j}]", spec.label))?
                .value;
            v.set(&[i, j], val);
        }
    }
    Ok(MatterFieldTerm {
        label: spec.label.clone(),
        alpha: spec.alpha,
        l_value,
        v_low: v,
    })
}

/// Pressure and density forms of the linear-combination table, as printed
/// (`p` carries `-𝓛` in its bracket) and as implied by the Madsen formulae
/// (`+3/2 𝓛`).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Table2 {
    pub p_printed: f64,
    pub p_derived: f64,
    pub rho: f64,
    pub p0_printed: f64,
    pub p0_derived: f64,
    pub rho0: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CombinedReport {
    pub report: MatterReport,
    pub table2: Table2,
}

/// `T_ij = -Σ α_r (𝒱_r,ij - ½ g_ij 𝓛_r)`.
pub fn combine_matter_fields(
    terms: &[MatterFieldTerm],
    m: &SymMetricAtPoint,
    cur: &CurvatureAtPoint,
    frame: &FrameAtPoint,
    lambda: f64,
) -> CombinedReport {
    let g = &m.g_lower;
    let mut t = Tensor::zeros(&[Lower, Lower]);
    let mut tab = Table2 {
        p_printed: 0.0,
        p_derived: 0.0,
        rho: 0.0,
        p0_printed: 0.0,
        p0_derived: 0.0,
        rho0: 0.0,
    };
    for term in terms {
        let a = term.alpha;
        let l = term.l_value;
        let piece = Tensor::from_fn(&[Lower, Lower], |x| term.v_low.get(x) - 0.5 * g[x[0]][x[1]] * l);
        t = t.add_scaled(-a, &piece);
        let vtr = trace_with(&m.g_upper, &term.v_low);
        let vuu = quad_form(&term.v_low, &frame.u_up);
        let v00 = term.v_low.get(&[0, 0]);
        tab.p_printed += -a / 3.0 * (vuu - vtr - l);
        tab.p_derived += -a / 3.0 * (vuu - vtr + 1.5 * l);
        tab.rho += -a * (vuu - 0.5 * l);
        tab.p0_printed += -a / 3.0 * (v00 - vtr - l);
        tab.p0_derived += -a / 3.0 * (v00 - vtr + 1.5 * l);
        tab.rho0 += -a * (v00 - 0.5 * l);
    }
    CombinedReport {
        report: matter_report(t, m, cur, frame, lambda),
        table2: tab,
    }
}

// ------------------------------------------------------------ profile solver

/// Parses an expression in the single variable `t`.
pub fn parse_profile_expr(src: &str) -> Result<Expression, ParseError> {
    parse_expression(src, &["t"])
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProfileProblem {
    /// `s_0 .. s_3` as expressions in `t`.
    pub s: [Expression; 4],
    /// `(α_3, α_4, α_5)`
    pub alphas: [f64; 3],
    /// Target `𝓛_M(t)`.
    pub target: Expression,
    /// `v' + w`
    pub vw: f64,
    pub t_start: f64,
    pub t_end: f64,
    pub steps: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfileRow {
    pub t: f64,
    /// `(n_3, n_4, n_5)` on the first branch.
    pub n: [f64; 3],
    /// The mirrored branch, `-n`.
    pub n_mirror: [f64; 3],
    pub target: f64,
    /// Closed-form `𝓛_M` rebuilt from difference quotients of the profile.
    pub roundtrip: f64,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfileSolution {
    pub rows: Vec<ProfileRow>,
    pub max_residual: f64,
}

struct ProfileEval<'a> {
    p: &'a ProfileProblem,
}

impl ProfileEval<'_> {
    fn value(&self, e: &Expression, t: f64, what: &str) -> Result<f64, MathError> {
        e.eval_value(&[t]).map_err(|source| MathError::Domain {
            location: format!("{what} at t = {t}"),
            source,
        })
    }

    fn s(&self, t: f64) -> Result<[f64; 4], MathError> {
        let mut out = [0.0; 4];
        for (k, e) in self.p.s.iter().enumerate() {
            out[k] = self.value(e, t, &format!("s{k}"))?;
        }
        Ok(out)
    }

    /// `α_3² s_3 + α_4² s_2 + α_5² s_1`
    fn weight(&self, s: &[f64; 4]) -> f64 {
        let [a3, a4, a5] = self.p.alphas;
        a3 * a3 * s[3] + a4 * a4 * s[2] + a5 * a5 * s[1]
    }

    /// `n(t)'` with `n_k' = α_k n'`.
    fn integrand(&self, t: f64) -> Result<f64, MathError> {
        let s = self.s(t)?;
        let l = self.value(&self.p.target, t, "target")?;
        let denom = self.p.vw * self.weight(&s) * s[0];
        if denom == 0.0 || !denom.is_finite() {
            return Err(MathError::VanishingDenominator { t });
        }
        let g = s[0] * s[1] * s[2] * s[3];
        let radicand = -2.0 / 3.0 * g * l / denom;
        if radicand < 0.0 {
            return Err(MathError::NegativeRadicand { t, value: radicand });
        }
        Ok(radicand.sqrt())
    }

    fn integral(&self, a: f64, b: f64) -> Result<f64, MathError> {
        adaptive_simpson(|t| self.integrand(t), a, b, DEFAULT_TOL, DEFAULT_MAX_DEPTH)
    }

    /// Closed `𝓛_M` with the derivatives `n_k'` supplied.
    fn closed_lm(&self, t: f64, dn: [f64; 3]) -> Result<f64, MathError> {
        let s = self.s(t)?;
        let num = s[3] * dn[0] * dn[0] + s[2] * dn[1] * dn[1] + s[1] * dn[2] * dn[2];
        Ok(-1.5 * self.p.vw * num / (s[1] * s[2] * s[3]))
    }
}

/// Five-point first-derivative weights for offsets `k h`, centred when
/// possible and one-sided near the ends of `[lo, hi]`.
fn stencil(t: f64, h: f64, lo: f64, hi: f64) -> ([f64; 5], [f64; 5]) {
    if t - 2.0 * h >= lo && t + 2.0 * h <= hi {
        ([-2.0, -1.0, 0.0, 1.0, 2.0], [1.0, -8.0, 0.0, 8.0, -1.0])
    } else if t + 4.0 * h <= hi {
        ([0.0, 1.0, 2.0, 3.0, 4.0], [-25.0, 48.0, -36.0, 16.0, -3.0])
    } else {
        ([0.0, -1.0, -2.0, -3.0, -4.0], [25.0, -48.0, 36.0, -16.0, 3.0])
    }
}

pub fn solve_antisym_profile(p: &ProfileProblem) -> Result<ProfileSolution, MathError> {
    if p.steps == 0 || !(p.t_end > p.t_start) {
        return Err(MathError::Invalid("profile range needs t_end > t_start and steps > 0".into()));
    }
    let ev = ProfileEval { p };
    let span = p.t_end - p.t_start;
    let h = (1e-2f64).min(span / 8.0);
    let dt = span / p.steps as f64;
    let mut rows = Vec::with_capacity(p.steps + 1);
    let mut n = 0.0;
    let mut max_residual = 0.0f64;
    for i in 0..=p.steps {
        let t = if i == p.steps { p.t_end } else { p.t_start + i as f64 * dt };
        if i > 0 {
            n += ev.integral(rows.last().map_or(p.t_start, |r: &ProfileRow| r.t), t)?;
        }
        let (offsets, weights) = stencil(t, h, p.t_start, p.t_end);
        let mut dn = 0.0;
        for (o, w) in offsets.iter().zip(weights) {
            if w != 0.0 {
                dn += w * ev.integral(t, t + o * h)?;
            }
        }
        dn /= 12.0 * h;
        let dnk = p.alphas.map(|a| a * dn);
        let roundtrip = ev.closed_lm(t, dnk)?;
        let target = ev.value(&p.target, t, "target")?;
        let residual = (roundtrip - target).abs();
        max_residual = max_residual.max(residual);
        let nk = p.alphas.map(|a| a * n);
        rows.push(ProfileRow {
            t,
            n: nk,
            n_mirror: nk.map(|v| -v),
            target,
            roundtrip,
            residual,
        });
    }
    Ok(ProfileSolution { rows, max_residual })
}
