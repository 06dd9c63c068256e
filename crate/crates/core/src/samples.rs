//! Seeded random inputs: smooth Lorentzian models, coefficient sets, torsion
//! fields, frames and matter terms.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::connection::{Jet3, JET3_ZERO};
use crate::jet::{Jet1, DIM};
use crate::matter::MatterFieldTerm;
use crate::metric::{CoeffSet, SpacetimeModel};
use crate::tensor::{Lower, Mat4, Tensor};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn num(x: f64) -> String {
    format!("({x:.6})")
}

fn coord(r: &mut impl Rng) -> &'static str {
    ["t", "x", "y", "z"][r.gen_range(0..DIM)]
}

/// A bounded smooth function of the coordinates of amplitude about `amp`.
fn wiggle(r: &mut impl Rng, amp: f64) -> String {
    let a = num(r.gen_range(-amp..amp));
    let k = num(r.gen_range(0.3..1.2));
    let b = num(r.gen_range(-1.0..1.0));
    let c = coord(r);
    match r.gen_range(0..3) {
        0 => format!("{a}*sin({k}*{c} + {b})"),
        1 => format!("{a}*cos({k}*{c})*exp({b}*{c}/4)"),
        _ => format!("{a}*{c}*{c}/(1 + {c}*{c})"),
    }
}

/// Random smooth model with a Lorentzian symmetric part near
/// `diag(1, -1.5, -1.5, -1.5)` over the unit box, and an optional
/// antisymmetric part. With `unit_g00`, `g_00 = 1` and `g_0k = 0`.
pub fn random_model(r: &mut impl Rng, unit_g00: bool, antisym: bool) -> SpacetimeModel {
    let mut g: [[String; DIM]; DIM] = std::array::from_fn(|_| std::array::from_fn(|_| "0".to_string()));
    g[0][0] = if unit_g00 {
        "1".into()
    } else {
        format!("1 + {}", wiggle(r, 0.2))
    };
    for i in 1..DIM {
        g[i][i] = format!("-(1.5 + {})", wiggle(r, 0.3));
    }
    for i in 0..DIM {
        for j in (i + 1)..DIM {
            let sym = if unit_g00 && i == 0 { "0".to_string() } else { wiggle(r, 0.1) };
            let anti = if antisym { wiggle(r, 0.4) } else { "0".to_string() };
            g[i][j] = format!("{sym} + {anti}");
            g[j][i] = format!("{sym} - ({anti})");
        }
    }
    let refs: [[&str; DIM]; DIM] = std::array::from_fn(|i| std::array::from_fn(|j| g[i][j].as_str()));
    let mut m = SpacetimeModel::from_components(["t", "x", "y", "z"], &[], refs).expect("generated model parses");
    m.name = "random".into();
    m
}

pub fn random_point(r: &mut impl Rng) -> [f64; DIM] {
    std::array::from_fn(|_| r.gen_range(-0.8..0.8))
}

pub fn random_coeffs(r: &mut impl Rng) -> CoeffSet {
    let mut c = || r.gen_range(-2.0..2.0);
    CoeffSet::new(c(), c(), c(), c(), c())
}

/// Covariant torsion jets, antisymmetric in the last pair.
pub fn random_torsion(r: &mut impl Rng, amp: f64) -> Jet3 {
    let mut t = JET3_ZERO;
    for i in 0..DIM {
        for j in 0..DIM {
            for k in (j + 1)..DIM {
                let jet = Jet1 {
                    value: r.gen_range(-amp..amp),
                    grad: std::array::from_fn(|_| r.gen_range(-amp..amp)),
                };
                t[i][j][k] = jet;
                t[i][k][j] = jet.scale(-1.0);
            }
        }
    }
    t
}

/// Lorentzian metric `A diag(1,-1,-1,-1) Aᵀ` with `A` near the identity.
pub fn random_lorentzian(r: &mut impl Rng) -> Mat4 {
    let a: Mat4 = std::array::from_fn(|i| {
        std::array::from_fn(|j| if i == j { 1.0 } else { 0.0 } + r.gen_range(-0.25..0.25))
    });
    let eta = [1.0, -1.0, -1.0, -1.0];
    std::array::from_fn(|i| std::array::from_fn(|j| (0..DIM).map(|k| a[i][k] * eta[k] * a[j][k]).sum()))
}

/// A vector with `g_ab u^a u^b > 0`, by rejection.
pub fn random_timelike(r: &mut impl Rng, g: &Mat4) -> [f64; DIM] {
    loop {
        let u: [f64; DIM] = std::array::from_fn(|k| if k == 0 { 1.0 } else { r.gen_range(-0.6..0.6) });
        let n: f64 = (0..DIM).flat_map(|a| (0..DIM).map(move |b| (a, b))).map(|(a, b)| g[a][b] * u[a] * u[b]).sum();
        if n > 0.05 {
            return u;
        }
    }
}

pub fn random_symmetric(r: &mut impl Rng, amp: f64) -> Tensor {
    let mut t = Tensor::zeros(&[Lower, Lower]);
    for i in 0..DIM {
        for j in i..DIM {
            let v = r.gen_range(-amp..amp);
            t.set(&[i, j], v);
            t.set(&[j, i], v);
        }
    }
    t
}

pub fn random_terms(r: &mut impl Rng, count: usize) -> Vec<MatterFieldTerm> {
    (0..count)
        .map(|k| MatterFieldTerm {
            label: format!("term{k}"),
            alpha: r.gen_range(-2.0..2.0),
            l_value: r.gen_range(-3.0..3.0),
            v_low: random_symmetric(r, 2.0),
        })
        .collect()
}
