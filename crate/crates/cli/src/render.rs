//! Plain-text rendering of reports.

use std::fmt::Write;

use eisenhart_core::matter::{MatterReport, ProfileSolution};
use eisenhart_core::tensor::Mat4;
use eisenhart_core::verify::{LinearityReport, VerifyReport};

use crate::analyze::{AnalysisReport, Component};

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "undefined".into(), |x| format!("{x:.10e}"))
}

fn mat(out: &mut String, title: &str, m: &Mat4) {
    let _ = writeln!(out, "{title}:");
    for row in m {
        let cells: Vec<String> = row.iter().map(|v| format!("{v:>18.10e}")).collect();
        let _ = writeln!(out, "  {}", cells.join(" "));
    }
}

fn components(out: &mut String, title: &str, c: &[Component]) {
    if c.is_empty() {
        let _ = writeln!(out, "{title}: all zero");
        return;
    }
    let _ = writeln!(out, "{title}: {} nonzero", c.len());
    for comp in c {
        let idx: Vec<String> = comp.index.iter().map(usize::to_string).collect();
        let _ = writeln!(out, "  [{}] = {:.12e}", idx.join(","), comp.value);
    }
}

fn matter(out: &mut String, title: &str, r: &MatterReport) {
    let _ = writeln!(out, "{title}:");
    let _ = writeln!(out, "  trace = {:.12e}", r.trace);
    let _ = writeln!(out, "  p     = {:.12e}   (projection: {:.12e})", r.p, r.p_pi);
    let _ = writeln!(out, "  rho   = {:.12e}", r.rho);
    let _ = writeln!(out, "  omega = {}", opt(r.omega));
    let _ = writeln!(out, "  pEQM residual = {:.3e}, rhoEQM residual = {:.3e}", r.p_eqm_residual, r.rho_eqm_residual);
    let c = &r.comoving;
    let _ = writeln!(
        out,
        "  comoving: p0 = {:.12e}, rho0 = {:.12e}, omega0 = {}{}",
        c.p,
        c.rho,
        opt(c.omega),
        if r.rescaled_comoving { " (g_00 != 1)" } else { "" }
    );
}

pub fn analysis(r: &AnalysisReport) -> String {
    let mut out = String::new();
    let p = r.point;
    let _ = writeln!(out, "model {} at ({}, {}, {}, {})", r.model, p[0], p[1], p[2], p[3]);
    let k = r.coeffs;
    let _ = writeln!(
        out,
        "coefficients u = {}, u' = {}, v = {}, v' = {}, w = {}; Lambda = {}",
        k.u, k.u_prime, k.v, k.v_prime, k.w, r.lambda
    );
    mat(&mut out, "symmetric metric", &r.metric.symmetric);
    mat(&mut out, "antisymmetric metric", &r.metric.antisymmetric);
    let _ = writeln!(out, "det(symmetric) = {:.12e}", r.metric.det_symmetric);
    components(&mut out, "Gamma^i_jk", &r.christoffel);
    components(&mut out, "Gamma_i.jk (symmetric part)", &r.christoffel_first_kind);
    components(&mut out, "T_ijk", &r.torsion);
    components(&mut out, "R^i_jmn", &r.riemann);
    mat(&mut out, "Ricci", &r.ricci);
    let _ = writeln!(out, "scalar curvature R = {:.12e}", r.scalar);
    let _ = writeln!(out, "family: K = {:.12e} (closed: {:.12e}), X = {:.12e}", r.family.k_scalar, r.family.k_scalar_closed, r.family.torsion_contraction);
    let _ = writeln!(out, "L_M = {:.12e}", r.torsion_matter.l_m);
    mat(&mut out, "tau", &r.torsion_matter.tau);
    matter(&mut out, "torsion matter", &r.torsion_matter.report);
    let _ = writeln!(
        out,
        "  closed displays: p = {:.12e}, rho = {:.12e}",
        r.torsion_matter.display_p, r.torsion_matter.display_rho
    );
    let t1 = &r.table1;
    let _ = writeln!(
        out,
        "curvature side: p = {:.12e}, rho = {:.12e}, omega = {}",
        t1.general.p,
        t1.general.rho,
        opt(t1.general.omega)
    );
    if let Some(sf) = &r.scalar_field {
        let _ = writeln!(
            out,
            "scalar field: p = {:.12e}, rho = {:.12e}, omega = {}",
            sf.madsen.p,
            sf.madsen.rho,
            opt(sf.madsen.omega)
        );
    }
    if let Some(mt) = &r.matter_terms {
        matter(&mut out, &format!("matter terms [{}]", mt.labels.join(", ")), &mt.report);
        let _ = writeln!(
            out,
            "  combination displays: p = {:.12e} (printed), {:.12e} (derived), rho = {:.12e}",
            mt.table2.p_printed, mt.table2.p_derived, mt.table2.rho
        );
    }
    if let Some(iz) = &r.iz {
        let _ = writeln!(out, "independent torsion ({:?}, {} iterations)", iz.mode, iz.iterations);
        components(&mut out, "  eta^i_jk", &iz.eta);
        let _ = writeln!(out, "  K~ = {:.12e} (closed: {:.12e})", iz.k_scalar, iz.k_scalar_closed);
        let _ = writeln!(out, "  L~_M = {:.12e}, L~_M - L_M = {:.12e}", iz.l_tilde_m, iz.l_difference);
        matter(&mut out, "  matter", &iz.matter);
    }
    let _ = writeln!(out, "diagnostics:");
    for d in &r.diagnostics {
        let _ = writeln!(out, "  {}", d.summary());
    }
    out
}

pub fn verify(r: &VerifyReport) -> String {
    let mut out = String::new();
    let g = r.grid;
    let _ = writeln!(
        out,
        "grid {}:{}:{}, {} points evaluated, {} skipped",
        g.start,
        g.stop,
        g.steps,
        r.points_evaluated,
        r.skipped.len()
    );
    for s in &r.skipped {
        let _ = writeln!(out, "  skipped t = {}: {}", s.t, s.reason);
    }
    let _ = writeln!(out, "checks:");
    for c in &r.checks {
        let _ = writeln!(
            out,
            "  {:<6} {:<34} max error {:.3e} (tol {:.0e}){}",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.max_error,
            c.tol,
            c.worst_t.map(|t| format!(" worst at t = {t}")).unwrap_or_default()
        );
    }
    let _ = writeln!(out, "ledger:");
    if r.ledger.is_empty() {
        let _ = writeln!(out, "  (empty)");
    }
    for e in &r.ledger {
        let span = if e.constant {
            format!("{:.12}", e.min)
        } else {
            format!("{:.6} .. {:.6}", e.min, e.max)
        };
        let _ = writeln!(
            out,
            "  {:<26} {:<38} = {:<24} expected {}{}",
            e.quantity,
            e.ratio,
            span,
            e.expected,
            if e.constant { "" } else { " (varies)" }
        );
    }
    let _ = writeln!(out, "{}", if r.passed { "PASSED" } else { "FAILED" });
    out
}

pub fn profile(s: &ProfileSolution) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:>12} {:>18} {:>18} {:>18} {:>18} {:>18} {:>18} {:>10}",
        "t", "n3", "n4", "n5", "-n3", "-n4", "-n5", "residual"
    );
    for r in &s.rows {
        let _ = writeln!(
            out,
            "{:>12.6} {:>18.10e} {:>18.10e} {:>18.10e} {:>18.10e} {:>18.10e} {:>18.10e} {:>10.2e}",
            r.t, r.n[0], r.n[1], r.n[2], r.n_mirror[0], r.n_mirror[1], r.n_mirror[2], r.residual
        );
    }
    let _ = writeln!(out, "max round-trip residual {:.3e}", s.max_residual);
    out
}

pub fn linearity(r: &LinearityReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{} sets of {} terms (seed {})", r.sets, r.terms_per_set, r.seed);
    let _ = writeln!(out, "  T     max relative deviation {:.3e}", r.max_t_deviation);
    let _ = writeln!(out, "  trace max relative deviation {:.3e}", r.max_trace_deviation);
    let _ = writeln!(out, "  p     max relative deviation {:.3e}", r.max_p_deviation);
    let _ = writeln!(out, "  rho   max relative deviation {:.3e}", r.max_rho_deviation);
    let c = &r.counterexample;
    let _ = writeln!(
        out,
        "  omega counterexample: omega1 = {:.6}, omega2 = {:.6}, combined = {:.6}, gap = {:.6}",
        c.omega_1, c.omega_2, c.omega_combined, c.gap
    );
    let _ = writeln!(out, "{}", if r.passed { "PASSED" } else { "FAILED" });
    out
}
