//! Curvature of the associated space and the five-coefficient curvature
//! family with its Ricci and scalar contractions.

use serde::{Deserialize, Serialize};

use crate::connection::{covariant_derivative, ConnectionAtPoint, DerivativeKind, Jet3, JetTensor};
use crate::diagnostics::{compare_routes, ConsistencyCheck, RouteTerm};
use crate::jet::DIM;
use crate::metric::{CoeffSet, MetricAtPoint};
use crate::tensor::{contract, Lower, Mat4, Tensor, Upper};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvatureAtPoint {
    pub riemann: Tensor,
    pub ricci: Tensor,
    pub scalar: f64,
}

/// `R^i_jmn = Γ^i_{jm,n} - Γ^i_{jn,m} + Γ^α_jm Γ^i_αn - Γ^α_jn Γ^i_αm` for a
/// connection given with first derivatives. Exactly antisymmetric in `m, n`.
pub fn riemann_from_jets(gamma: &Jet3) -> Tensor {
    let half = |i: usize, j: usize, m: usize, n: usize| -> f64 {
        let mut s = gamma[i][j][m].grad[n];
        for a in 0..DIM {
            s += gamma[a][j][m].value * gamma[i][a][n].value;
        }
        s
    };
    Tensor::from_fn(&[Upper, Lower, Lower, Lower], |x| {
        half(x[0], x[1], x[2], x[3]) - half(x[0], x[1], x[3], x[2])
    })
}

/// `g^{ab} S_ab` for a rank-2 covariant tensor.
pub fn trace_with(g_upper: &Mat4, s: &Tensor) -> f64 {
    let mut sum = 0.0;
    for a in 0..DIM {
        for b in 0..DIM {
            sum += g_upper[a][b] * s.get(&[a, b]);
        }
    }
    sum
}

fn ricci_of(riemann: &Tensor) -> Tensor {
    contract(riemann, 0, 3).expect("riemann has variance (1,3)")
}

pub fn riemann_at(c: &ConnectionAtPoint, m: &MetricAtPoint) -> CurvatureAtPoint {
    let riemann = riemann_from_jets(&c.gamma_sym_jet);
    let ricci = ricci_of(&riemann);
    let scalar = trace_with(&m.sym.g_upper, &ricci);
    CurvatureAtPoint {
        riemann,
        ricci,
        scalar,
    }
}

/// The coefficient-free building blocks of the family.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilyTerms {
    /// `T^i_{jm|n}` (associated derivative, derivative index last).
    pub torsion_derivative: Tensor,
    /// `T^α_jm T^i_αn`
    pub quad_v: Tensor,
    /// `T^α_jn T^i_αm`
    pub quad_v_prime: Tensor,
    /// `T^α_mn T^i_αj`
    pub quad_w: Tensor,
}

impl FamilyTerms {
    pub fn new(torsion: &Tensor, torsion_derivative: Tensor) -> Self {
        let t = |i: usize, j: usize, k: usize| torsion.get(&[i, j, k]);
        let v4 = [Upper, Lower, Lower, Lower];
        let quad = |f: &dyn Fn(usize, usize, usize, usize, usize) -> f64| {
            Tensor::from_fn(&v4, |x| (0..DIM).map(|a| f(a, x[0], x[1], x[2], x[3])).sum())
        };
        Self {
            torsion_derivative,
            quad_v: quad(&|a, i, j, m, n| t(a, j, m) * t(i, a, n)),
            quad_v_prime: quad(&|a, i, j, m, n| t(a, j, n) * t(i, a, m)),
            quad_w: quad(&|a, i, j, m, n| t(a, m, n) * t(i, a, j)),
        }
    }

    /// `T^i_{jn|m}`: the derivative block with `m, n` exchanged.
    pub fn torsion_derivative_swapped(&self) -> Tensor {
        let d = &self.torsion_derivative;
        Tensor::from_fn(d.variance(), |x| d.get(&[x[0], x[1], x[3], x[2]]))
    }

    /// `u T_{|n} + u' T_{|m}` and `v, v', w` quadratic parts, separately.
    pub fn weighted(&self, k: &CoeffSet) -> (Tensor, Tensor) {
        let deriv = self
            .torsion_derivative
            .scale(k.u)
            .add_scaled(k.u_prime, &self.torsion_derivative_swapped());
        let quad = self
            .quad_v
            .scale(k.v)
            .add_scaled(k.v_prime, &self.quad_v_prime)
            .add_scaled(k.w, &self.quad_w);
        (deriv, quad)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilyCurvatureAtPoint {
    pub coeffs: CoeffSet,
    pub k_full: Tensor,
    /// Contraction of `k_full` on its first and last slots.
    pub k_ricci: Tensor,
    /// `R_ij + u T^α_{ij|α} - (v'+w) T^α_{iβ} T^β_{jα}`.
    pub k_ricci_closed: Tensor,
    /// `g^{γδ} K_γδ` from the contraction route.
    pub k_scalar: f64,
    /// `R - (v'+w) X` from the closed display.
    pub k_scalar_closed: f64,
    /// `X = g^{γδ} g^{αε} g^{βζ} T_{αγβ} T_{εδζ}`.
    pub torsion_contraction: f64,
    pub ricci_check: ConsistencyCheck,
    pub scalar_check: ConsistencyCheck,
}

/// `X = g^{γδ} g^{αε} g^{βζ} T_{αγβ} T_{εδζ}` by raising all three slots of
/// one factor and contracting.
pub fn torsion_contraction(t_low: &Tensor, g_upper: &Mat4) -> f64 {
    let raised = raise_all(t_low, g_upper);
    let mut sum = 0.0;
    t_low.for_each(|idx, v| sum += v * raised.get(idx));
    sum
}

/// `A^{abc} = g^{aα} g^{bβ} g^{cγ} T_{αβγ}`.
pub fn raise_all(t_low: &Tensor, g: &Mat4) -> Tensor {
    let step = |t: &Tensor, slot: usize| {
        Tensor::from_fn(&[Upper; 3], |x| {
            let mut y = [x[0], x[1], x[2]];
            (0..DIM)
                .map(|a| {
                    y[slot] = a;
                    g[x[slot]][a] * t.get(&y)
                })
                .sum()
        })
    };
    step(&step(&step(t_low, 0), 1), 2)
}

pub fn torsion_derivative(c: &ConnectionAtPoint) -> Tensor {
    let field = JetTensor::from_jet3([Upper, Lower, Lower], &c.torsion_jet);
    covariant_derivative(&field, DerivativeKind::Assoc, c).expect("rank 3 is supported")
}

pub fn curvature_family_at(
    c: &ConnectionAtPoint,
    cur: &CurvatureAtPoint,
    m: &MetricAtPoint,
    coeffs: &CoeffSet,
    tol: f64,
) -> FamilyCurvatureAtPoint {
    let terms = FamilyTerms::new(&c.torsion_up, torsion_derivative(c));
    let (deriv, quad) = terms.weighted(coeffs);
    let k_full = cur.riemann.add_scaled(1.0, &deriv).add_scaled(1.0, &quad);
    let k_ricci = ricci_of(&k_full);

    // closed Ricci display, term by term
    let t = &c.torsion_up;
    let d = &terms.torsion_derivative;
    let closed_deriv = Tensor::from_fn(&[Lower, Lower], |x| {
        coeffs.u * (0..DIM).map(|a| d.get(&[a, x[0], x[1], a])).sum::<f64>()
    });
    let closed_quad = Tensor::from_fn(&[Lower, Lower], |x| {
        let mut s = 0.0;
        for a in 0..DIM {
            for b in 0..DIM {
                s += t.get(&[a, x[0], b]) * t.get(&[b, x[1], a]);
            }
        }
        -coeffs.vw() * s
    });
    let k_ricci_closed = cur.ricci.add_scaled(1.0, &closed_deriv).add_scaled(1.0, &closed_quad);
    let ricci_deriv = ricci_of(&deriv);
    let ricci_quad = ricci_of(&quad);
    let ricci_check = compare_routes(
        "family_ricci",
        "contraction",
        "closed",
        k_ricci.data(),
        k_ricci_closed.data(),
        vec![
            RouteTerm {
                name: "ricci",
                a: ricci_of(&cur.riemann).data().to_vec(),
                b: cur.ricci.data().to_vec(),
            },
            RouteTerm {
                name: "torsion_derivative",
                a: ricci_deriv.data().to_vec(),
                b: closed_deriv.data().to_vec(),
            },
            RouteTerm {
                name: "torsion_quadratic",
                a: ricci_quad.data().to_vec(),
                b: closed_quad.data().to_vec(),
            },
        ],
        tol,
    );

    let g_up = &m.sym.g_upper;
    let x = torsion_contraction(&c.torsion_low, g_up);
    let k_scalar = trace_with(g_up, &k_ricci);
    let k_scalar_closed = cur.scalar - coeffs.vw() * x;
    let scalar_check = compare_routes(
        "family_scalar",
        "contraction",
        "closed",
        &[k_scalar],
        &[k_scalar_closed],
        vec![
            RouteTerm {
                name: "ricci_scalar",
                a: vec![trace_with(g_up, &cur.ricci)],
                b: vec![cur.scalar],
            },
            RouteTerm {
                name: "torsion_derivative",
                a: vec![trace_with(g_up, &ricci_deriv)],
                b: vec![0.0],
            },
            RouteTerm {
                name: "torsion_quadratic",
                a: vec![trace_with(g_up, &ricci_quad)],
                b: vec![-coeffs.vw() * x],
            },
        ],
        tol,
    );

    FamilyCurvatureAtPoint {
        coeffs: *coeffs,
        k_full,
        k_ricci,
        k_ricci_closed,
        k_scalar,
        k_scalar_closed,
        torsion_contraction: x,
        ricci_check,
        scalar_check,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::connection::generalized_christoffel;
    use crate::diagnostics::Outcome;
    use crate::metric::{example_model, metric_at, ExampleProfiles, SpacetimeModel};

    fn model(g: [[&str; 4]; 4]) -> SpacetimeModel {
        SpacetimeModel::from_components(["t", "x", "y", "z"], &[], g).unwrap()
    }

    fn flrw() -> SpacetimeModel {
        model([["1", "0", "0", "0"], ["0", "-t^2", "0", "0"], ["0", "0", "-t^2", "0"], ["0", "0", "0", "-t^2"]])
    }

    fn at(m: &SpacetimeModel, p: [f64; 4]) -> (MetricAtPoint, ConnectionAtPoint, CurvatureAtPoint) {
        let mp = metric_at(m, p).unwrap();
        let c = generalized_christoffel(&mp);
        let cur = riemann_at(&c, &mp);
        (mp, c, cur)
    }

    #[test]
    fn flat_is_flat() {
        let m = model([["1", "0", "0", "0"], ["0", "-1", "0", "0"], ["0", "0", "-1", "0"], ["0", "0", "0", "-1"]]);
        let (_, _, cur) = at(&m, [0.1, 0.2, 0.3, 0.4]);
        assert_eq!(cur.riemann.max_abs(), 0.0);
        assert_eq!(cur.scalar, 0.0);
    }

    #[test]
    fn flrw_scalar_against_difference_quotients() {
        // finite differences of Γ replace its exact jets
        let m = flrw();
        let p = [1.0, 0.0, 0.0, 0.0];
        let (mp, c, cur) = at(&m, p);
        let h = 1e-5;
        let gamma_at = |t: f64| {
            let (_, c, _) = at(&m, [t, 0.0, 0.0, 0.0]);
            c.gamma_sym
        };
        let (gp, gm) = (gamma_at(1.0 + h), gamma_at(1.0 - h));
        let dg = |i: usize, j: usize, k: usize, d: usize| {
            if d == 0 {
                (gp[i][j][k] - gm[i][j][k]) / (2.0 * h)
            } else {
                0.0
            }
        };
        let g = &c.gamma_sym;
        let mut scalar = 0.0;
        for a in 0..4 {
            for b in 0..4 {
                let mut ric = 0.0;
                for i in 0..4 {
                    ric += dg(i, a, b, i) - dg(i, a, i, b);
                    for l in 0..4 {
                        ric += g[l][a][b] * g[i][l][i] - g[l][a][i] * g[i][l][b];
                    }
                }
                scalar += mp.sym.g_upper[a][b] * ric;
            }
        }
        assert!((scalar - cur.scalar).abs() < 1e-6, "{scalar} vs {}", cur.scalar);
        // a(t) = t: R = -6 (a''/a + (a'/a)^2) in this signature
        assert!((cur.scalar + 6.0).abs() < 1e-12);
    }

    #[test]
    fn riemann_antisymmetry_and_ricci_symmetry() {
        let m = model([
            ["2 + sin(t*x)", "0.3*y", "0.1*t", "x*z/5"],
            ["0.1*x - 0.2*z", "-1 - t^2/4", "0.2*t*y", "0"],
            ["0.05*y", "-0.3*x*t", "-exp(0.2*y)", "0.1"],
            ["0.4*t", "0.2*z", "0", "-1.5 - cos(x)/3"],
        ]);
        let (_, _, cur) = at(&m, [0.4, 0.3, -0.2, 0.7]);
        for i in 0..4 {
            for j in 0..4 {
                assert!((cur.ricci.get(&[i, j]) - cur.ricci.get(&[j, i])).abs() < 1e-10);
                for a in 0..4 {
                    for b in 0..4 {
                        assert_eq!(cur.riemann.get(&[i, j, a, b]), -cur.riemann.get(&[i, j, b, a]));
                    }
                }
            }
        }
    }

    #[test]
    fn torsion_free_family_is_riemann() {
        let m = flrw();
        let (mp, c, cur) = at(&m, [1.3, 0.0, 0.0, 0.0]);
        let k = CoeffSet::new(0.3, -1.2, 2.0, 0.7, 1.1);
        let fam = curvature_family_at(&c, &cur, &mp, &k, 1e-8);
        assert_eq!(fam.k_full, cur.riemann);
    }

    #[test]
    fn zero_coefficients_give_riemann() {
        let m = example_model(&ExampleProfiles::default()).unwrap();
        let (mp, c, cur) = at(&m, [0.9, 0.0, 0.0, 0.0]);
        let fam = curvature_family_at(&c, &cur, &mp, &CoeffSet::default(), 1e-8);
        assert_eq!(fam.k_full, cur.riemann);
        assert_eq!(fam.k_scalar, cur.scalar);
    }

    #[test]
    fn example_contraction_and_sign_finding() {
        let m = example_model(&ExampleProfiles {
            s: ["1", "1", "1", "1"].map(String::from),
            n: ["0", "0", "0", "t", "0", "0"].map(String::from),
        })
        .unwrap();
        let (mp, c, cur) = at(&m, [0.5, 0.0, 0.0, 0.0]);
        let k = CoeffSet::new(0.0, 0.0, 0.0, 1.0, 0.0);
        let fam = curvature_family_at(&c, &cur, &mp, &k, 1e-8);
        assert!((fam.torsion_contraction - 6.0).abs() < 1e-12);
        assert!(fam.ricci_check.agrees());
        assert_eq!(
            fam.scalar_check.outcome,
            Outcome::Isolated {
                terms: vec!["torsion_quadratic".into()]
            }
        );
        assert!(fam.scalar_check.documented);
        assert!((fam.k_scalar - (cur.scalar + 6.0)).abs() < 1e-12);
        assert!((fam.k_scalar_closed - (cur.scalar - 6.0)).abs() < 1e-12);
    }

    #[test]
    fn brute_force_contraction() {
        let m = example_model(&ExampleProfiles::default()).unwrap();
        let (mp, c, _) = at(&m, [1.1, 0.0, 0.0, 0.0]);
        let g = &mp.sym.g_upper;
        let t = &c.torsion_low;
        let mut brute = 0.0;
        for gm in 0..4 {
            for dl in 0..4 {
                for al in 0..4 {
                    for ep in 0..4 {
                        for be in 0..4 {
                            for ze in 0..4 {
                                brute += g[gm][dl] * g[al][ep] * g[be][ze]
                                    * t.get(&[al, gm, be])
                                    * t.get(&[ep, dl, ze]);
                            }
                        }
                    }
                }
            }
        }
        let x = torsion_contraction(t, g);
        assert!((brute - x).abs() < 1e-12 * brute.abs().max(1.0));
    }
}
