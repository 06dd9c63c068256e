//! Per-point analysis report.

use serde::{Deserialize, Serialize};

use eisenhart_core::connection::{first_kind, generalized_christoffel};
use eisenhart_core::curvature::{curvature_family_at, riemann_at};
use eisenhart_core::diagnostics::{compare_routes, ConsistencyCheck};
use eisenhart_core::error::MathError;
use eisenhart_core::iz::{iz_connection_at, iz_curvature_at, iz_emt_at, iz_variation_at, KTildeBlocks, LTildeTerms};
use eisenhart_core::matter::{
    combine_matter_fields, emt_family, frame_from_scalar, madsen_emt, matter_term_at, model_frame,
    pressure_density_omega, table1_quantities, FrameAtPoint, MatterReport, PressureDensity, Table1, Table2,
};
use eisenhart_core::metric::{metric_at, CoeffSet, MetricityMode, SpacetimeModel};
use eisenhart_core::tensor::{Lower, Mat4, Tensor, Upper};

/// Components below this magnitude are left out of component listings.
pub const LISTING_EPS: f64 = 1e-14;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Component {
    pub index: Vec<usize>,
    pub value: f64,
}

fn listing(t: &Tensor) -> Vec<Component> {
    t.nonzero(LISTING_EPS)
        .into_iter()
        .map(|(index, value)| Component { index, value })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricBlock {
    pub g: Mat4,
    pub symmetric: Mat4,
    pub antisymmetric: Mat4,
    pub det_symmetric: f64,
    pub inverse_symmetric: Mat4,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilyBlock {
    pub k_ricci: Mat4,
    pub k_ricci_closed: Mat4,
    pub k_scalar: f64,
    pub k_scalar_closed: f64,
    pub torsion_contraction: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TorsionMatter {
    pub l_m: f64,
    pub tau: Mat4,
    pub w: Mat4,
    pub report: MatterReport,
    pub display_p: f64,
    pub display_rho: f64,
    pub display_p0: f64,
    pub display_rho0: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalarFieldBlock {
    pub t_low: Mat4,
    pub frame_u: [f64; 4],
    pub madsen: PressureDensity,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatterTermsBlock {
    pub labels: Vec<String>,
    pub report: MatterReport,
    pub table2: Table2,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IzBlock {
    pub mode: MetricityMode,
    pub iterations: usize,
    pub torsion_up: Vec<Component>,
    pub eta: Vec<Component>,
    pub eta_asymmetry: f64,
    pub sym_identity_error: f64,
    pub k_scalar: f64,
    pub k_scalar_closed: f64,
    pub l_tilde_m: f64,
    pub l_tilde_terms: LTildeTerms,
    /// `𝓛̃_M - 𝓛_M`
    pub l_difference: f64,
    pub matter: MatterReport,
    pub display_p: f64,
    pub display_rho: f64,
    pub display_p0: f64,
    pub display_rho0: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub model: String,
    pub point: [f64; 4],
    pub coeffs: CoeffSet,
    pub lambda: f64,
    pub tol: f64,
    pub metric: MetricBlock,
    /// `Γ^i_jk` of the full metric.
    pub christoffel: Vec<Component>,
    /// `Γ_{i.jk}` of the symmetric part.
    pub christoffel_first_kind: Vec<Component>,
    /// `T_ijk`
    pub torsion: Vec<Component>,
    pub riemann: Vec<Component>,
    pub ricci: Mat4,
    pub scalar: f64,
    pub family: FamilyBlock,
    pub frame_u: [f64; 4],
    pub table1: Table1,
    pub torsion_matter: TorsionMatter,
    pub scalar_field: Option<ScalarFieldBlock>,
    pub matter_terms: Option<MatterTermsBlock>,
    pub iz: Option<IzBlock>,
    pub diagnostics: Vec<ConsistencyCheck>,
}

impl AnalysisReport {
    pub fn failing(&self, strict: bool) -> Vec<&ConsistencyCheck> {
        self.diagnostics.iter().filter(|c| c.is_failure(strict)).collect()
    }
}

pub struct AnalysisRequest<'a> {
    pub model: &'a SpacetimeModel,
    pub point: [f64; 4],
    pub coeffs: CoeffSet,
    pub lambda: f64,
    pub tol: f64,
    pub frame: Option<[f64; 4]>,
}

pub fn run_analyze(req: &AnalysisRequest<'_>) -> Result<AnalysisReport, MathError> {
    let model = req.model;
    let m = metric_at(model, req.point)?;
    let c = generalized_christoffel(&m);
    let cur = riemann_at(&c, &m);
    let fam = curvature_family_at(&c, &cur, &m, &req.coeffs, req.tol);
    let frame: FrameAtPoint = match req.frame {
        Some(u) => FrameAtPoint::from_vector(u, &m.sym)?,
        None => model_frame(model, &m)?,
    };
    let table1 = table1_quantities(&cur, &frame, req.lambda);
    let em = emt_family(&c, &m, &cur, &req.coeffs, &model.variation, &frame, req.lambda);

    let mut diagnostics = vec![fam.ricci_check.clone(), fam.scalar_check.clone()];
    diagnostics.push(compare_routes(
        "connection_split",
        "full",
        "symmetric_plus_antisymmetric",
        &[c.route_mismatch],
        &[0.0],
        vec![],
        req.tol,
    ));
    diagnostics.push(compare_routes(
        "madsen_pressure",
        "trace",
        "projection",
        &[em.report.p],
        &[em.report.p_pi],
        vec![],
        req.tol,
    ));

    let scalar_field = match &model.scalar_field {
        Some(field) => {
            let t = madsen_emt(field, model, &m, &c)?;
            let f = frame_from_scalar(&field.phi, model, &m).unwrap_or_else(|_| frame.clone());
            Some(ScalarFieldBlock {
                madsen: pressure_density_omega(&t, &f, &m.sym),
                t_low: t.to_mat(),
                frame_u: f.u_up,
            })
        }
        None => None,
    };

    let matter_terms = if model.matter_terms.is_empty() {
        None
    } else {
        let mut terms = Vec::new();
        for spec in &model.matter_terms {
            terms.push(matter_term_at(spec, model, req.point)?);
        }
        let comb = combine_matter_fields(&terms, &m.sym, &cur, &frame, req.lambda);
        diagnostics.push(compare_routes(
            "combined_density",
            "madsen",
            "display",
            &[comb.report.rho],
            &[comb.table2.rho],
            vec![],
            req.tol,
        ));
        Some(MatterTermsBlock {
            labels: terms.iter().map(|t| t.label.clone()).collect(),
            report: comb.report,
            table2: comb.table2,
        })
    };

    let iz = match &model.iz {
        Some(spec) => {
            let ic = iz_connection_at(model, spec, &m, &c)?;
            let ic_cur = iz_curvature_at(&ic, &c, &cur, &m, &req.coeffs, &KTildeBlocks::default(), req.tol);
            diagnostics.push(ic_cur.riemann_check.clone());
            diagnostics.push(ic_cur.family_check.clone());
            diagnostics.push(ic_cur.scalar_check.clone());
            let v = iz_variation_at(model, spec, req.point)?;
            let emt = iz_emt_at(ic_cur.l_tilde_m, &v, &m, &cur, &frame, req.lambda);
            let eta = Tensor::from_fn(&[Upper, Lower, Lower], |x| ic.eta[x[0]][x[1]][x[2]].value);
            Some(IzBlock {
                mode: ic.mode,
                iterations: ic.iterations,
                torsion_up: listing(&ic.torsion_up_tensor()),
                eta: listing(&eta),
                eta_asymmetry: ic.eta_asymmetry,
                sym_identity_error: ic.sym_identity_error,
                k_scalar: ic_cur.k_scalar,
                k_scalar_closed: ic_cur.k_scalar_closed,
                l_tilde_m: ic_cur.l_tilde_m,
                l_tilde_terms: ic_cur.l_tilde_terms,
                l_difference: ic_cur.l_tilde_m - em.lagrangian.l_m,
                matter: emt.report,
                display_p: emt.display_p,
                display_rho: emt.display_rho,
                display_p0: emt.display_p0,
                display_rho0: emt.display_rho0,
            })
        }
        None => None,
    };

    let gamma = Tensor::from_arr3([Upper, Lower, Lower], &c.gamma_full);
    let fk = Tensor::from_arr3([Lower, Lower, Lower], &first_kind(&c, &m));
    let g: Mat4 = std::array::from_fn(|i| std::array::from_fn(|j| m.g[i][j].value));
    Ok(AnalysisReport {
        model: model.name.clone(),
        point: req.point,
        coeffs: req.coeffs,
        lambda: req.lambda,
        tol: req.tol,
        metric: MetricBlock {
            g,
            symmetric: m.sym.g_lower,
            antisymmetric: m.antisym,
            det_symmetric: m.sym.det,
            inverse_symmetric: m.sym.g_upper,
        },
        christoffel: listing(&gamma),
        christoffel_first_kind: listing(&fk),
        torsion: listing(&c.torsion_low),
        riemann: listing(&cur.riemann),
        ricci: cur.ricci.to_mat(),
        scalar: cur.scalar,
        family: FamilyBlock {
            k_ricci: fam.k_ricci.to_mat(),
            k_ricci_closed: fam.k_ricci_closed.to_mat(),
            k_scalar: fam.k_scalar,
            k_scalar_closed: fam.k_scalar_closed,
            torsion_contraction: fam.torsion_contraction,
        },
        frame_u: frame.u_up,
        table1,
        torsion_matter: TorsionMatter {
            l_m: em.lagrangian.l_m,
            tau: em.lagrangian.tau.to_mat(),
            w: em.lagrangian.w.to_mat(),
            display_p: em.display_p,
            display_rho: em.display_rho,
            display_p0: em.display_p0,
            display_rho0: em.display_rho0,
            report: em.report,
        },
        scalar_field,
        matter_terms,
        iz,
        diagnostics,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use eisenhart_core::metric::builtin_model;

    #[test]
    fn report_round_trips_through_json() {
        let model = builtin_model("paper-example").unwrap();
        for t in [0.6, 1.0, 1.9] {
            let req = AnalysisRequest {
                model: &model,
                point: [t, 0.0, 0.0, 0.0],
                coeffs: CoeffSet::new(0.3, -1.2, 0.7, 1.0, 0.25),
                lambda: 0.1,
                tol: 1e-8,
                frame: None,
            };
            let report = run_analyze(&req).unwrap();
            let text = serde_json::to_string(&report).unwrap();
            let back: AnalysisReport = serde_json::from_str(&text).unwrap();
            assert_eq!(back, report);
            assert_eq!(back.scalar.to_bits(), report.scalar.to_bits());
            assert_eq!(serde_json::to_string(&back).unwrap(), text);
        }
    }
}
