//! The generalized space whose torsion `T̃_ijk` is an independent field:
//! its connection `Γ̃`, the tensor `η`, the curvatures `R̃`, `K̃` and the
//! matter Lagrangian `𝓛̃_M`.

use serde::{Deserialize, Serialize};

use crate::connection::{
    covariant_derivative, covariant_derivative_with, jet3_values, ConnectionAtPoint, DerivativeKind, Jet3,
    JetTensor, JET3_ZERO,
};
use crate::curvature::{riemann_from_jets, trace_with, CurvatureAtPoint, FamilyTerms};
use crate::diagnostics::{compare_routes, ConsistencyCheck, RouteTerm};
use crate::error::MathError;
use crate::jet::{Jet1, DIM};
use crate::matter::{matter_report, FrameAtPoint, MatterReport};
use crate::metric::{CoeffSet, IzSpec, MetricAtPoint, MetricityMode, SpacetimeModel};
use crate::tensor::{contract, Arr3, Lower, Tensor, Upper};

pub const FIXED_POINT_TOL: f64 = 1e-12;
pub const FIXED_POINT_MAX_ITER: usize = 100;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IzConnectionAtPoint {
    pub mode: MetricityMode,
    /// Fixed-point iterations used; 0 in `assume_zero` mode.
    pub iterations: usize,
    /// `T̃_ijk`
    pub torsion_low: Jet3,
    /// `T̃^i_jk = g^{iα} T̃_αjk`
    pub torsion_up: Jet3,
    /// Full `Γ̃^i_jk`.
    pub gamma_tilde: Jet3,
    /// Symmetric part `Γ̃^i_(jk)`.
    pub gamma_tilde_sym: Jet3,
    pub eta: Jet3,
    /// `N_abc = g_{ab 1|c}`, the kind-1 derivative of the symmetric metric
    /// under the full `Γ̃`.
    pub nonmetricity: Jet3,
    /// Largest `|η^i_jk - η^i_kj|`.
    pub eta_asymmetry: f64,
    /// Largest `|Γ̃^i_(jk) - (Γ^i_jk - ½ η^i_jk)|`.
    pub sym_identity_error: f64,
}

impl IzConnectionAtPoint {
    pub fn eta_values(&self) -> Arr3 {
        jet3_values(&self.eta)
    }

    pub fn torsion_up_tensor(&self) -> Tensor {
        Tensor::from_fn(&[Upper, Lower, Lower], |x| self.torsion_up[x[0]][x[1]][x[2]].value)
    }
}

/// Evaluates the `T̃_ijk` entries of an `[iz]` section.
pub fn torsion_jets(model: &SpacetimeModel, spec: &IzSpec, point: [f64; DIM]) -> Result<Jet3, MathError> {
    let mut t = JET3_ZERO;
    for e in &spec.torsion {
        let [i, j, k] = e.index;
        let jet = model.eval_at(&e.expr, point, || format!("iz.T[{i},{j},{k}]"))?;
        t[i][j][k] = jet.first_order().scale(e.sign);
    }
    Ok(t)
}

fn nonmetricity(m: &MetricAtPoint, gamma: &Jet3) -> Jet3 {
    let g = &m.sym_jet;
    let g1 = g.map(|r| r.map(|x| x.first_order()));
    let mut n = JET3_ZERO;
    for a in 0..DIM {
        for b in 0..DIM {
            for c in 0..DIM {
                let mut s = g[a][b].partial(c);
                for al in 0..DIM {
                    s -= gamma[al][a][c] * g1[al][b] + gamma[al][b][c] * g1[a][al];
                }
                n[a][b][c] = s;
            }
        }
    }
    n
}

fn eta_from(t: &Jet3, n: &Jet3, inv: &[[Jet1; DIM]; DIM]) -> Jet3 {
    let mut eta = JET3_ZERO;
    for i in 0..DIM {
        for j in 0..DIM {
            for k in 0..DIM {
                let mut s = Jet1::ZERO;
                for al in 0..DIM {
                    let bracket =
                        (t[j][al][k] + t[k][al][j]) + ((n[k][al][j] + n[al][j][k]) - n[k][j][al]);
                    s += inv[i][al] * bracket;
                }
                eta[i][j][k] = s;
            }
        }
    }
    eta
}

fn jet3_max_diff(a: &Jet3, b: &Jet3) -> f64 {
    let mut m = 0.0f64;
    for i in 0..DIM {
        for j in 0..DIM {
            for k in 0..DIM {
                let (x, y) = (a[i][j][k], b[i][j][k]);
                m = m.max((x.value - y.value).abs());
                for d in 0..DIM {
                    m = m.max((x.grad[d] - y.grad[d]).abs());
                }
            }
        }
    }
    m
}

fn jet3_max_abs(a: &Jet3) -> f64 {
    jet3_max_diff(a, &JET3_ZERO)
}

fn combine(a: &Jet3, b: &Jet3, k: f64) -> Jet3 {
    let mut out = JET3_ZERO;
    for i in 0..DIM {
        for j in 0..DIM {
            for l in 0..DIM {
                out[i][j][l] = a[i][j][l] + b[i][j][l].scale(k);
            }
        }
    }
    out
}

struct Assembled {
    full: Jet3,
    sym: Jet3,
    eta: Jet3,
    n: Jet3,
}

/// One pass of the connection display with a given `g_1|` family.
fn assemble(c: &ConnectionAtPoint, t_low: &Jet3, t_up: &Jet3, n: Jet3, inv: &[[Jet1; DIM]; DIM]) -> Assembled {
    let eta = eta_from(t_low, &n, inv);
    let sym = combine(&c.gamma_sym_jet, &eta, -0.5);
    let full = combine(&sym, t_up, 0.5);
    Assembled { full, sym, eta, n }
}

/// `Γ̃` and `η` from a covariant torsion field with first derivatives.
pub fn iz_connection_from_torsion(
    m: &MetricAtPoint,
    c: &ConnectionAtPoint,
    t_low: &Jet3,
    mode: MetricityMode,
) -> Result<IzConnectionAtPoint, MathError> {
    let inv = m.inverse_jet();
    let mut t_up = JET3_ZERO;
    for i in 0..DIM {
        for j in 0..DIM {
            for k in 0..DIM {
                let mut s = Jet1::ZERO;
                for al in 0..DIM {
                    s += inv[i][al] * t_low[al][j][k];
                }
                t_up[i][j][k] = s;
            }
        }
    }

    let (result, iterations) = match mode {
        MetricityMode::AssumeZero => (assemble(c, t_low, &t_up, JET3_ZERO, &inv), 0),
        MetricityMode::FixedPoint => {
            let mut gamma = c.gamma_sym_jet;
            let mut it = 0;
            loop {
                it += 1;
                let next = assemble(c, t_low, &t_up, nonmetricity(m, &gamma), &inv);
                let change = jet3_max_diff(&next.full, &gamma);
                let limit = FIXED_POINT_TOL * jet3_max_abs(&next.full).max(1.0);
                if change < limit {
                    break (next, it);
                }
                if it == FIXED_POINT_MAX_ITER {
                    return Err(MathError::NoConvergence {
                        residual: change,
                        iterations: it,
                    });
                }
                gamma = next.full;
            }
        }
    };

    let mut asym = 0.0f64;
    let mut ident = 0.0f64;
    for i in 0..DIM {
        for j in 0..DIM {
            for k in 0..DIM {
                asym = asym.max((result.eta[i][j][k].value - result.eta[i][k][j].value).abs());
                let want = c.gamma_sym[i][j][k] - 0.5 * result.eta[i][j][k].value;
                ident = ident.max((result.sym[i][j][k].value - want).abs());
            }
        }
    }
    Ok(IzConnectionAtPoint {
        mode,
        iterations,
        torsion_low: *t_low,
        torsion_up: t_up,
        gamma_tilde: result.full,
        gamma_tilde_sym: result.sym,
        eta: result.eta,
        nonmetricity: result.n,
        eta_asymmetry: asym,
        sym_identity_error: ident,
    })
}

pub fn iz_connection_at(
    model: &SpacetimeModel,
    spec: &IzSpec,
    m: &MetricAtPoint,
    c: &ConnectionAtPoint,
) -> Result<IzConnectionAtPoint, MathError> {
    let t = torsion_jets(model, spec, m.point)?;
    iz_connection_from_torsion(m, c, &t, spec.mode)
}

/// Index order of the torsion factor in the two lower-slot correction blocks
/// of the `K̃` display.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LowerBlockReading {
    /// `T̃^i_{mβ}` and `T̃^i_{nβ}`.
    #[default]
    AsPrinted,
    /// `T̃^i_{βm}` and `T̃^i_{βn}`.
    Swapped,
}

/// Switches for the seven correction blocks of the `K̃` display.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KTildeBlocks {
    pub eta_derivative: bool,
    pub eta_quadratic: bool,
    pub u_upper: bool,
    pub u_lower: bool,
    pub u1_upper: bool,
    pub u1_lower: bool,
    pub mixed: bool,
    pub lower_reading: LowerBlockReading,
}

impl Default for KTildeBlocks {
    fn default() -> Self {
        Self {
            eta_derivative: true,
            eta_quadratic: true,
            u_upper: true,
            u_lower: true,
            u1_upper: true,
            u1_lower: true,
            mixed: true,
            lower_reading: LowerBlockReading::AsPrinted,
        }
    }
}

/// Scalar pieces of `𝓛̃_M = K̃ - R`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LTildeTerms {
    /// `-½ g^{βγ} η^α_{βγ|α} + ½ g^{βγ} η^α_{αβ|γ}`
    pub eta_derivative: f64,
    /// `¼ g^{γδ} (η^α_γδ η^β_αβ - η^α_βγ η^β_αδ)`
    pub eta_quadratic: f64,
    /// `-(v'+w) g^{γδ} T̃^α_γβ T̃^β_δα`
    pub torsion_quadratic: f64,
    /// `u' g^{βγ} T̃^α_{βα|γ}`
    pub torsion_derivative: f64,
    /// `u'/2 g^{δε} η^β_δε T̃^γ_βγ`
    pub torsion_eta: f64,
}

impl LTildeTerms {
    pub fn total(&self) -> f64 {
        self.eta_derivative + self.eta_quadratic + self.torsion_quadratic + self.torsion_derivative + self.torsion_eta
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IzCurvatureAtPoint {
    pub coeffs: CoeffSet,
    /// `R̃^i_jmn` from the symmetric part of `Γ̃`.
    pub r_tilde: Tensor,
    /// `R - ½ η_{jm|n} + ½ η_{jn|m} + ¼(ηη - ηη)`.
    pub r_tilde_eta: Tensor,
    pub riemann_check: ConsistencyCheck,
    /// `K̃` from `R̃` and derivatives under `Γ̃_(jk)`.
    pub k_tilde: Tensor,
    /// `K̃` rebuilt from `R`, `η` and the enabled correction blocks.
    pub k_tilde_display: Tensor,
    pub family_check: ConsistencyCheck,
    pub k_ricci: Tensor,
    pub k_scalar: f64,
    pub k_scalar_closed: f64,
    pub scalar_check: ConsistencyCheck,
    /// `K̃ - R` from the closed scalar.
    pub l_tilde_m: f64,
    pub l_tilde_terms: LTildeTerms,
}

fn ricci(t: &Tensor) -> Tensor {
    contract(t, 0, 3).expect("rank-4 (1,3) tensor")
}

pub fn iz_curvature_at(
    ic: &IzConnectionAtPoint,
    c: &ConnectionAtPoint,
    base: &CurvatureAtPoint,
    m: &MetricAtPoint,
    coeffs: &CoeffSet,
    blocks: &KTildeBlocks,
    tol: f64,
) -> IzCurvatureAtPoint {
    let v4 = [Upper, Lower, Lower, Lower];
    let eta = ic.eta_values();
    let e = |i: usize, j: usize, k: usize| eta[i][j][k];
    let t_up = ic.torsion_up_tensor();
    let t = |i: usize, j: usize, k: usize| t_up.get(&[i, j, k]);
    let eta_field = JetTensor::from_jet3([Upper, Lower, Lower], &ic.eta);
    let t_field = JetTensor::from_jet3([Upper, Lower, Lower], &ic.torsion_up);
    let eta_d = covariant_derivative(&eta_field, DerivativeKind::Assoc, c).expect("rank 3");
    let t_d = covariant_derivative(&t_field, DerivativeKind::Assoc, c).expect("rank 3");
    let gs = jet3_values(&ic.gamma_tilde_sym);
    let t_dt = covariant_derivative_with(&t_field, DerivativeKind::Assoc, &gs).expect("rank 3");

    let sum = |f: &dyn Fn(usize) -> f64| (0..DIM).map(f).sum::<f64>();
    let eta_deriv = Tensor::from_fn(&v4, |x| {
        let (i, j, mm, n) = (x[0], x[1], x[2], x[3]);
        -0.5 * eta_d.get(&[i, j, mm, n]) + 0.5 * eta_d.get(&[i, j, n, mm])
    });
    let eta_quad = Tensor::from_fn(&v4, |x| {
        let (i, j, mm, n) = (x[0], x[1], x[2], x[3]);
        0.25 * sum(&|a| e(a, j, mm) * e(i, a, n) - e(a, j, n) * e(i, a, mm))
    });
    let r_tilde = riemann_from_jets(&ic.gamma_tilde_sym);
    let r_tilde_eta = base.riemann.add_scaled(1.0, &eta_deriv).add_scaled(1.0, &eta_quad);
    let riemann_check = compare_routes(
        "iz_riemann",
        "direct",
        "eta_decomposition",
        r_tilde.data(),
        r_tilde_eta.data(),
        vec![],
        tol,
    );

    let (deriv_tilde, quad) = FamilyTerms::new(&t_up, t_dt).weighted(coeffs);
    let k_tilde = r_tilde.add_scaled(1.0, &deriv_tilde).add_scaled(1.0, &quad);
    let (deriv_assoc, _) = FamilyTerms::new(&t_up, t_d.clone()).weighted(coeffs);

    let (u, u1) = (coeffs.u, coeffs.u_prime);
    let tl = |i: usize, a: usize, b: usize| match blocks.lower_reading {
        LowerBlockReading::AsPrinted => t(i, a, b),
        LowerBlockReading::Swapped => t(i, b, a),
    };
    let on = |b: bool| if b { 1.0 } else { 0.0 };
    let corrections = Tensor::from_fn(&v4, |x| {
        let (i, j, mm, n) = (x[0], x[1], x[2], x[3]);
        let u_upper = -u / 2.0 * sum(&|b| e(i, b, n) * t(b, j, mm));
        let u_lower = -u / 2.0 * sum(&|b| e(b, j, n) * tl(i, mm, b));
        let u1_upper = -u1 / 2.0 * sum(&|b| e(i, b, mm) * t(b, j, n));
        let u1_lower = -u1 / 2.0 * sum(&|b| e(b, j, mm) * tl(i, n, b));
        let mixed = (u + u1) / 2.0 * sum(&|b| e(b, mm, n) * t(i, j, b));
        on(blocks.u_upper) * u_upper
            + on(blocks.u_lower) * u_lower
            + on(blocks.u1_upper) * u1_upper
            + on(blocks.u1_lower) * u1_lower
            + on(blocks.mixed) * mixed
    });
    let curvature_display = base
        .riemann
        .add_scaled(on(blocks.eta_derivative), &eta_deriv)
        .add_scaled(on(blocks.eta_quadratic), &eta_quad);
    let deriv_display = deriv_assoc.add_scaled(1.0, &corrections);
    let k_tilde_display = curvature_display.add_scaled(1.0, &deriv_display).add_scaled(1.0, &quad);
    let family_check = compare_routes(
        "iz_family",
        "direct",
        "display",
        k_tilde.data(),
        k_tilde_display.data(),
        vec![
            RouteTerm {
                name: "curvature",
                a: r_tilde.data().to_vec(),
                b: curvature_display.data().to_vec(),
            },
            RouteTerm {
                name: "torsion_derivative",
                a: deriv_tilde.data().to_vec(),
                b: deriv_display.data().to_vec(),
            },
            RouteTerm {
                name: "torsion_quadratic",
                a: quad.data().to_vec(),
                b: quad.data().to_vec(),
            },
        ],
        tol,
    );

    let gi = &m.sym.g_upper;
    let k_ricci = ricci(&k_tilde);
    let k_scalar = trace_with(gi, &k_ricci);
    let mut lt = LTildeTerms {
        eta_derivative: 0.0,
        eta_quadratic: 0.0,
        torsion_quadratic: 0.0,
        torsion_derivative: 0.0,
        torsion_eta: 0.0,
    };
    for b in 0..DIM {
        for g in 0..DIM {
            let w = gi[b][g];
            if w == 0.0 {
                continue;
            }
            for a in 0..DIM {
                lt.eta_derivative += w * (-0.5 * eta_d.get(&[a, b, g, a]) + 0.5 * eta_d.get(&[a, a, b, g]));
                lt.torsion_derivative += u1 * w * t_d.get(&[a, b, a, g]);
                for d in 0..DIM {
                    lt.eta_quadratic += 0.25 * w * (e(a, b, g) * e(d, a, d) - e(a, d, b) * e(d, a, g));
                    lt.torsion_quadratic -= coeffs.vw() * w * t(a, b, d) * t(d, g, a);
                    lt.torsion_eta += u1 / 2.0 * w * e(a, b, g) * t(d, a, d);
                }
            }
        }
    }
    let l_tilde_m = lt.total();
    let k_scalar_closed = base.scalar + l_tilde_m;
    let scalar_check = compare_routes(
        "iz_scalar",
        "contraction",
        "closed",
        &[k_scalar],
        &[k_scalar_closed],
        vec![
            RouteTerm {
                name: "curvature",
                a: vec![trace_with(gi, &ricci(&r_tilde))],
                b: vec![base.scalar + lt.eta_derivative + lt.eta_quadratic],
            },
            RouteTerm {
                name: "torsion_derivative",
                a: vec![trace_with(gi, &ricci(&deriv_tilde))],
                b: vec![lt.torsion_derivative + lt.torsion_eta],
            },
            RouteTerm {
                name: "torsion_quadratic",
                a: vec![trace_with(gi, &ricci(&quad))],
                b: vec![lt.torsion_quadratic],
            },
        ],
        tol,
    );

    IzCurvatureAtPoint {
        coeffs: *coeffs,
        r_tilde,
        r_tilde_eta,
        riemann_check,
        k_tilde,
        k_tilde_display,
        family_check,
        k_ricci,
        k_scalar,
        k_scalar_closed,
        scalar_check,
        l_tilde_m,
        l_tilde_terms: lt,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IzMatterReport {
    pub report: MatterReport,
    pub l_tilde_m: f64,
    /// Pressure and density as written in terms of `𝒱̃` and `𝓛̃`.
    pub display_p: f64,
    pub display_rho: f64,
    pub display_p0: f64,
    pub display_rho0: f64,
}

/// `Ṽ_ij` from the `[iz.variation]` entries.
pub fn iz_variation_at(model: &SpacetimeModel, spec: &IzSpec, point: [f64; DIM]) -> Result<Tensor, MathError> {
    let mut v = Tensor::zeros(&[Lower, Lower]);
    for ([i, j], e) in &spec.variation {
        let val = model.eval_at(e, point, || format!("iz.variation.V[{i},{j}]"))?.value;
        v.set(&[*i, *j], val);
    }
    Ok(v)
}

/// `T̃_ij = -Ṽ_ij + ½ g_ij 𝓛̃` with the Madsen report.
pub fn iz_emt_at(
    l_tilde_m: f64,
    v_tilde: &Tensor,
    m: &MetricAtPoint,
    base: &CurvatureAtPoint,
    frame: &FrameAtPoint,
    lambda: f64,
) -> IzMatterReport {
    let g = &m.sym.g_lower;
    let t = Tensor::from_fn(&[Lower, Lower], |x| -v_tilde.get(x) + 0.5 * g[x[0]][x[1]] * l_tilde_m);
    let vtr = trace_with(&m.sym.g_upper, v_tilde);
    let mut vuu = 0.0;
    for a in 0..DIM {
        for b in 0..DIM {
            vuu += v_tilde.get(&[a, b]) * frame.u_up[a] * frame.u_up[b];
        }
    }
    let v00 = v_tilde.get(&[0, 0]);
    IzMatterReport {
        report: matter_report(t, &m.sym, base, frame, lambda),
        l_tilde_m,
        display_p: vtr / 3.0 - vuu / 3.0 - 0.5 * l_tilde_m,
        display_rho: -vuu + 0.5 * l_tilde_m,
        display_p0: vtr / 3.0 - v00 / 3.0 - 0.5 * l_tilde_m,
        display_rho0: -v00 + 0.5 * g[0][0] * l_tilde_m,
    }
}
