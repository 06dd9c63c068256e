//! Generalized Christoffel symbols of a non-symmetric metric, torsion and the
//! associated and kind 1-4 covariant derivatives.

use serde::{Deserialize, Serialize};

use crate::error::MathError;
use crate::jet::{Jet1, Jet2, DIM};
use crate::metric::MetricAtPoint;
use crate::tensor::{Arr3, Lower, Tensor, Upper, Variance};

/// A rank-3 array of first-order jets, indexed `[i][j][k]`.
pub type Jet3 = [[[Jet1; DIM]; DIM]; DIM];

pub const JET3_ZERO: Jet3 = [[[Jet1::ZERO; DIM]; DIM]; DIM];

pub fn jet3_values(a: &Jet3) -> Arr3 {
    a.map(|m| m.map(|r| r.map(|j| j.value)))
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConnectionAtPoint {
    /// `Γ^i_jk` from the full metric.
    pub gamma_full: Arr3,
    pub gamma_full_jet: Jet3,
    /// Levi-Civita connection of the symmetric part.
    pub gamma_sym: Arr3,
    pub gamma_sym_jet: Jet3,
    /// Same formula over the antisymmetric part.
    pub gamma_anti: Arr3,
    pub gamma_anti_jet: Jet3,
    pub torsion_up: Tensor,
    pub torsion_low: Tensor,
    /// `T^i_jk` with first derivatives.
    pub torsion_jet: Jet3,
    /// Largest deviation of `Γ` from `Γ_sym + Γ_anti` over values and
    /// first derivatives.
    pub route_mismatch: f64,
}

/// `½ g^{iα} ((X_{jα,k} + X_{αk,j}) - X_{jk,α})` for a matrix of 2-jets.
///
/// The grouping makes the result exactly symmetric (antisymmetric) in `j, k`
/// when `X` is exactly symmetric (antisymmetric).
fn christoffel_shape(x: &[[Jet2; DIM]; DIM], inv: &[[Jet1; DIM]; DIM]) -> Jet3 {
    let mut d = [[[Jet1::ZERO; DIM]; DIM]; DIM];
    for (a, row) in d.iter_mut().enumerate() {
        for (b, cell) in row.iter_mut().enumerate() {
            for (k, slot) in cell.iter_mut().enumerate() {
                *slot = x[a][b].partial(k);
            }
        }
    }
    let mut out = JET3_ZERO;
    for i in 0..DIM {
        for j in 0..DIM {
            for k in 0..DIM {
                let mut sum = Jet1::ZERO;
                for al in 0..DIM {
                    let bracket = (d[j][al][k] + d[al][k][j]) - d[j][k][al];
                    sum += inv[i][al] * bracket;
                }
                out[i][j][k] = sum.scale(0.5);
            }
        }
    }
    out
}

fn max_jet_diff(a: &Jet1, b: &Jet1) -> f64 {
    let mut m = (a.value - b.value).abs();
    for k in 0..DIM {
        m = m.max((a.grad[k] - b.grad[k]).abs());
    }
    m
}

pub fn generalized_christoffel(m: &MetricAtPoint) -> ConnectionAtPoint {
    let inv = m.inverse_jet();
    let full = christoffel_shape(&m.g, &inv);
    let sym = christoffel_shape(&m.sym_jet, &inv);
    let anti = christoffel_shape(&m.antisym_jet, &inv);
    let mut mismatch = 0.0f64;
    let mut torsion_jet = JET3_ZERO;
    for i in 0..DIM {
        for j in 0..DIM {
            for k in 0..DIM {
                mismatch = mismatch.max(max_jet_diff(&full[i][j][k], &(sym[i][j][k] + anti[i][j][k])));
                torsion_jet[i][j][k] = anti[i][j][k].scale(2.0);
            }
        }
    }
    let (torsion_up, torsion_low) = torsion_tensors(&torsion_jet, m);
    ConnectionAtPoint {
        gamma_full: jet3_values(&full),
        gamma_full_jet: full,
        gamma_sym: jet3_values(&sym),
        gamma_sym_jet: sym,
        gamma_anti: jet3_values(&anti),
        gamma_anti_jet: anti,
        torsion_up,
        torsion_low,
        torsion_jet,
        route_mismatch: mismatch,
    }
}

fn torsion_tensors(t: &Jet3, m: &MetricAtPoint) -> (Tensor, Tensor) {
    let up = Tensor::from_fn(&[Upper, Lower, Lower], |x| t[x[0]][x[1]][x[2]].value);
    let g = &m.sym.g_lower;
    let low = Tensor::from_fn(&[Lower, Lower, Lower], |x| {
        (0..DIM).map(|a| g[x[0]][a] * t[a][x[1]][x[2]].value).sum()
    });
    (up, low)
}

/// `(T^i_jk, T_ijk, ∂T^i_jk)` of a connection.
pub fn torsion_at(c: &ConnectionAtPoint, m: &MetricAtPoint) -> (Tensor, Tensor, Jet3) {
    let (up, low) = torsion_tensors(&c.torsion_jet, m);
    (up, low, c.torsion_jet)
}

/// Christoffel symbols of the first kind of the symmetric part,
/// `Γ_{i.jk} = g_{iα} Γ^α_jk`.
pub fn first_kind(c: &ConnectionAtPoint, m: &MetricAtPoint) -> Arr3 {
    let g = &m.sym.g_lower;
    let mut out = [[[0.0; DIM]; DIM]; DIM];
    for i in 0..DIM {
        for j in 0..DIM {
            for k in 0..DIM {
                out[i][j][k] = (0..DIM).map(|a| g[i][a] * c.gamma_sym[a][j][k]).sum();
            }
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum DerivativeKind {
    /// Levi-Civita connection of the symmetric part.
    Assoc,
    First,
    Second,
    Third,
    Fourth,
}

impl DerivativeKind {
    pub const ALL: [DerivativeKind; 5] = [
        DerivativeKind::Assoc,
        DerivativeKind::First,
        DerivativeKind::Second,
        DerivativeKind::Third,
        DerivativeKind::Fourth,
    ];

    /// Whether the upper-slot term reads `Γ^i_{αk}` (true) or `Γ^i_{kα}`.
    fn upper_alpha_first(self) -> bool {
        matches!(self, Self::Assoc | Self::First | Self::Third)
    }

    /// Whether the lower-slot term reads `Γ^α_{jk}` (true) or `Γ^α_{kj}`.
    fn lower_slot_first(self) -> bool {
        matches!(self, Self::Assoc | Self::First | Self::Fourth)
    }
}

/// A tensor whose components carry first derivatives.
#[derive(Clone, Debug, PartialEq)]
pub struct JetTensor {
    variance: Vec<Variance>,
    data: Vec<Jet1>,
}

impl JetTensor {
    pub fn from_fn(variance: &[Variance], mut f: impl FnMut(&[usize]) -> Jet1) -> Self {
        let values = Tensor::zeros(variance);
        let mut data = Vec::with_capacity(values.data().len());
        values.for_each(|idx, _| data.push(f(idx)));
        Self {
            variance: variance.to_vec(),
            data,
        }
    }

    pub fn from_jet3(variance: [Variance; 3], a: &Jet3) -> Self {
        Self::from_fn(&variance, |x| a[x[0]][x[1]][x[2]])
    }

    pub fn rank(&self) -> usize {
        self.variance.len()
    }

    pub fn variance(&self) -> &[Variance] {
        &self.variance
    }

    pub fn get(&self, idx: &[usize]) -> Jet1 {
        self.data[idx.iter().fold(0, |acc, &i| acc * DIM + i)]
    }

    pub fn values(&self) -> Tensor {
        let mut k = 0;
        Tensor::from_fn(&self.variance, |_| {
            k += 1;
            self.data[k - 1].value
        })
    }
}

/// Covariant derivative of `field` with the derivative index appended last.
///
/// Every upper slot contributes `+Γ(i, α, k) a^{..α..}` and every lower slot
/// `-Γ(α, j, k) a_{..α..}`, with the index order inside `Γ` fixed by `kind`.
pub fn covariant_derivative(
    field: &JetTensor,
    kind: DerivativeKind,
    c: &ConnectionAtPoint,
) -> Result<Tensor, MathError> {
    let gamma = match kind {
        DerivativeKind::Assoc => &c.gamma_sym,
        _ => &c.gamma_full,
    };
    covariant_derivative_with(field, kind, gamma)
}

/// As [`covariant_derivative`] with an explicit connection `Γ^i_jk`.
pub fn covariant_derivative_with(
    field: &JetTensor,
    kind: DerivativeKind,
    gamma: &Arr3,
) -> Result<Tensor, MathError> {
    let rank = field.rank();
    if rank > 4 {
        return Err(MathError::UnsupportedRank(rank));
    }
    let mut variance = field.variance.clone();
    variance.push(Lower);
    let up_first = kind.upper_alpha_first();
    let low_first = kind.lower_slot_first();
    Ok(Tensor::from_fn(&variance, |idx| {
        let k = idx[rank];
        let base = &idx[..rank];
        let mut out = field.get(base).grad[k];
        let mut shifted = [0usize; 4];
        let shifted = &mut shifted[..rank];
        shifted.copy_from_slice(base);
        for slot in 0..rank {
            let i = base[slot];
            for a in 0..DIM {
                shifted[slot] = a;
                let comp = field.get(shifted).value;
                match field.variance[slot] {
                    Upper => {
                        let g = if up_first { gamma[i][a][k] } else { gamma[i][k][a] };
                        out += g * comp;
                    }
                    Lower => {
                        let g = if low_first { gamma[a][i][k] } else { gamma[a][k][i] };
                        out -= g * comp;
                    }
                }
            }
            shifted[slot] = i;
        }
        out
    }))
}
