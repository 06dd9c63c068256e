//! Dense dimension-4 tensors with index variance, contraction and index
//! raising/lowering against the symmetric part of the metric.

use serde::{Deserialize, Serialize};

use crate::error::MathError;
use crate::jet::DIM;

pub type Mat4 = [[f64; DIM]; DIM];
pub type Arr3 = [[[f64; DIM]; DIM]; DIM];

pub const MAX_RANK: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Variance {
    Upper,
    Lower,
}

pub use Variance::{Lower, Upper};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Up,
    Down,
}

/// Row-major dense tensor; `data.len() == 4^rank`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tensor {
    variance: Vec<Variance>,
    data: Vec<f64>,
}

fn multi_index(rank: usize, mut flat: usize) -> [usize; MAX_RANK + 1] {
    let mut idx = [0; MAX_RANK + 1];
    for slot in (0..rank).rev() {
        idx[slot] = flat % DIM;
        flat /= DIM;
    }
    idx
}

impl Tensor {
    pub fn zeros(variance: &[Variance]) -> Self {
        assert!(variance.len() <= MAX_RANK, "tensor rank above {MAX_RANK}");
        Self {
            variance: variance.to_vec(),
            data: vec![0.0; DIM.pow(variance.len() as u32)],
        }
    }

    pub fn scalar(value: f64) -> Self {
        Self {
            variance: Vec::new(),
            data: vec![value],
        }
    }

    pub fn from_fn(variance: &[Variance], mut f: impl FnMut(&[usize]) -> f64) -> Self {
        let mut t = Self::zeros(variance);
        let rank = t.rank();
        for (flat, slot) in t.data.iter_mut().enumerate() {
            let idx = multi_index(rank, flat);
            *slot = f(&idx[..rank]);
        }
        t
    }

    pub fn from_mat(variance: [Variance; 2], m: &Mat4) -> Self {
        Self::from_fn(&variance, |i| m[i[0]][i[1]])
    }

    pub fn from_arr3(variance: [Variance; 3], a: &Arr3) -> Self {
        Self::from_fn(&variance, |i| a[i[0]][i[1]][i[2]])
    }

    pub fn rank(&self) -> usize {
        self.variance.len()
    }

    pub fn variance(&self) -> &[Variance] {
        &self.variance
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    fn offset(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.rank());
        idx.iter().fold(0, |acc, &i| acc * DIM + i)
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        self.data[self.offset(idx)]
    }

    pub fn set(&mut self, idx: &[usize], value: f64) {
        let o = self.offset(idx);
        self.data[o] = value;
    }

    pub fn value(&self) -> f64 {
        assert_eq!(self.rank(), 0);
        self.data[0]
    }

    /// Calls `f(multi_index, value)` for every component.
    pub fn for_each(&self, mut f: impl FnMut(&[usize], f64)) {
        let rank = self.rank();
        for (flat, &v) in self.data.iter().enumerate() {
            let idx = multi_index(rank, flat);
            f(&idx[..rank], v);
        }
    }

    pub fn to_mat(&self) -> Mat4 {
        assert_eq!(self.rank(), 2);
        let mut m = [[0.0; DIM]; DIM];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = self.get(&[i, j]);
            }
        }
        m
    }

    pub fn scale(&self, k: f64) -> Self {
        Self {
            variance: self.variance.clone(),
            data: self.data.iter().map(|v| k * v).collect(),
        }
    }

    /// Componentwise `self + k * other`; variances must match.
    pub fn add_scaled(&self, k: f64, other: &Tensor) -> Self {
        assert_eq!(self.variance, other.variance, "variance mismatch");
        Self {
            variance: self.variance.clone(),
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + k * b)
                .collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn max_abs_diff(&self, other: &Tensor) -> f64 {
        assert_eq!(self.data.len(), other.data.len());
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    /// Nonzero components (|value| > `eps`) with their multi-indices.
    pub fn nonzero(&self, eps: f64) -> Vec<(Vec<usize>, f64)> {
        let mut out = Vec::new();
        self.for_each(|idx, v| {
            if v.abs() > eps {
                out.push((idx.to_vec(), v));
            }
        });
        out
    }
}

fn check_slot(t: &Tensor, slot: usize) -> Result<(), MathError> {
    if slot >= t.rank() {
        return Err(MathError::SlotOutOfRange {
            slot,
            rank: t.rank(),
        });
    }
    Ok(())
}

/// Sum over a pair of opposite-variance slots; the result drops both slots.
pub fn contract(t: &Tensor, slot_a: usize, slot_b: usize) -> Result<Tensor, MathError> {
    check_slot(t, slot_a)?;
    check_slot(t, slot_b)?;
    if slot_a == slot_b || t.variance[slot_a] == t.variance[slot_b] {
        return Err(MathError::Variance(format!(
            "cannot contract slots {slot_a} and {slot_b} of {:?}",
            t.variance
        )));
    }
    let kept: Vec<usize> = (0..t.rank()).filter(|&s| s != slot_a && s != slot_b).collect();
    let variance: Vec<Variance> = kept.iter().map(|&s| t.variance[s]).collect();
    Ok(Tensor::from_fn(&variance, |idx| {
        let mut idx_full = [0; MAX_RANK];
        let idx_full = &mut idx_full[..t.rank()];
        for (k, &s) in kept.iter().enumerate() {
            idx_full[s] = idx[k];
        }
        let mut sum = 0.0;
        for a in 0..DIM {
            idx_full[slot_a] = a;
            idx_full[slot_b] = a;
            sum += t.get(idx_full);
        }
        sum
    }))
}

/// Symmetric part of the metric at a point with its inverse and determinant.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymMetricAtPoint {
    pub g_lower: Mat4,
    pub g_upper: Mat4,
    pub det: f64,
}

impl SymMetricAtPoint {
    pub fn new(g_lower: Mat4) -> Result<Self, MathError> {
        let (g_upper, det) = invert_sym4(&g_lower)?;
        Ok(Self {
            g_lower,
            g_upper,
            det,
        })
    }

    pub fn lower_tensor(&self) -> Tensor {
        Tensor::from_mat([Lower, Lower], &self.g_lower)
    }
}

/// Moves one slot of `t` up (with `g^{ij}`) or down (with `g_{ij}`).
pub fn raise_lower(
    t: &Tensor,
    slot: usize,
    m: &SymMetricAtPoint,
    direction: Direction,
) -> Result<Tensor, MathError> {
    check_slot(t, slot)?;
    let (from, to, g) = match direction {
        Direction::Up => (Lower, Upper, &m.g_upper),
        Direction::Down => (Upper, Lower, &m.g_lower),
    };
    if t.variance[slot] != from {
        return Err(MathError::Variance(format!(
            "slot {slot} of {:?} is already {to:?}",
            t.variance
        )));
    }
    let mut variance = t.variance.clone();
    variance[slot] = to;
    Ok(Tensor::from_fn(&variance, |idx| {
        let mut src = idx.to_vec();
        let i = idx[slot];
        (0..DIM)
            .map(|a| {
                src[slot] = a;
                g[i][a] * t.get(&src)
            })
            .sum()
    }))
}

/// Inverse and determinant of a symmetric 4x4 matrix.
///
/// Gauss-Jordan with partial pivoting; the result is symmetrized. A matrix
/// is treated as singular when `|det| < 1e-14 * scale^4`, `scale` being the
/// largest entry magnitude.
pub fn invert_sym4(m: &Mat4) -> Result<(Mat4, f64), MathError> {
    let scale = m.iter().flatten().fold(0.0f64, |s, v| s.max(v.abs()));
    if scale == 0.0 || !scale.is_finite() {
        return Err(MathError::SingularMetric { det: 0.0, scale });
    }
    let mut a = *m;
    let mut inv = [[0.0; DIM]; DIM];
    for (i, row) in inv.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    let mut det = 1.0;
    for col in 0..DIM {
        let pivot = (col..DIM)
            .max_by(|&r, &s| a[r][col].abs().total_cmp(&a[s][col].abs()))
            .unwrap_or(col);
        if a[pivot][col] == 0.0 {
            return Err(MathError::SingularMetric { det: 0.0, scale });
        }
        if pivot != col {
            a.swap(pivot, col);
            inv.swap(pivot, col);
            det = -det;
        }
        let p = a[col][col];
        det *= p;
        for k in 0..DIM {
            a[col][k] /= p;
            inv[col][k] /= p;
        }
        for r in 0..DIM {
            if r != col {
                let f = a[r][col];
                if f != 0.0 {
                    for k in 0..DIM {
                        a[r][k] -= f * a[col][k];
                        inv[r][k] -= f * inv[col][k];
                    }
                }
            }
        }
    }
    if det.abs() < 1e-14 * scale.powi(4) {
        return Err(MathError::SingularMetric { det, scale });
    }
    for i in 0..DIM {
        for j in (i + 1)..DIM {
            let s = 0.5 * (inv[i][j] + inv[j][i]);
            inv[i][j] = s;
            inv[j][i] = s;
        }
    }
    Ok((inv, det))
}

pub fn mat_mul(a: &Mat4, b: &Mat4) -> Mat4 {
    let mut out = [[0.0; DIM]; DIM];
    for i in 0..DIM {
        for j in 0..DIM {
            out[i][j] = (0..DIM).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn diag(d: [f64; 4]) -> Mat4 {
        let mut m = [[0.0; 4]; 4];
        for i in 0..4 {
            m[i][i] = d[i];
        }
        m
    }

    fn det3(m: [[f64; 3]; 3]) -> f64 {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    fn minor(m: &Mat4, r: usize, c: usize) -> f64 {
        let mut out = [[0.0; 3]; 3];
        let rows = (0..4).filter(|&i| i != r);
        for (oi, i) in rows.enumerate() {
            for (oj, j) in (0..4).filter(|&j| j != c).enumerate() {
                out[oi][oj] = m[i][j];
            }
        }
        det3(out)
    }

    /// Cofactor expansion, independent of the elimination route.
    fn adjugate_inverse(m: &Mat4) -> (Mat4, f64) {
        let det: f64 = (0..4)
            .map(|j| if j % 2 == 0 { 1.0 } else { -1.0 } * m[0][j] * minor(m, 0, j))
            .sum();
        let mut inv = [[0.0; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
                inv[j][i] = sign * minor(m, i, j) / det;
            }
        }
        (inv, det)
    }

    fn random_spd(rng: &mut ChaCha8Rng) -> Mat4 {
        let mut a = [[0.0; 4]; 4];
        for row in a.iter_mut() {
            for v in row.iter_mut() {
                *v = rng.gen_range(-1.0..1.0);
            }
        }
        let mut m = [[0.0; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                m[i][j] = (0..4).map(|k| a[i][k] * a[j][k]).sum::<f64>();
            }
            m[i][i] += 0.5;
        }
        m
    }

    #[test]
    fn trace_of_identity_and_diagonal() {
        let id = Tensor::from_fn(&[Upper, Lower], |i| if i[0] == i[1] { 1.0 } else { 0.0 });
        assert_eq!(contract(&id, 0, 1).unwrap().value(), 4.0);
        let d = Tensor::from_mat([Upper, Lower], &diag([1.0, 2.0, 3.0, 4.0]));
        assert_eq!(contract(&d, 1, 0).unwrap().value(), 10.0);
    }

    #[test]
    fn contraction_errors() {
        let t = Tensor::zeros(&[Lower, Lower]);
        assert!(matches!(contract(&t, 0, 1), Err(MathError::Variance(_))));
        let t = Tensor::zeros(&[Upper, Lower]);
        assert!(matches!(contract(&t, 0, 2), Err(MathError::SlotOutOfRange { .. })));
    }

    #[test]
    fn contraction_matches_explicit_loop() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let r = Tensor::from_fn(&[Upper, Lower, Lower, Lower], |_| rng.gen_range(-1.0..1.0));
        let ricci = contract(&r, 0, 3).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let mut s = 0.0;
                for a in 0..4 {
                    s += r.get(&[a, i, j, a]);
                }
                assert_eq!(ricci.get(&[i, j]), s);
            }
        }
    }

    #[test]
    fn minkowski_and_diagonal_inverse() {
        let (inv, det) = invert_sym4(&diag([1.0, -1.0, -1.0, -1.0])).unwrap();
        assert_eq!(inv, diag([1.0, -1.0, -1.0, -1.0]));
        assert_eq!(det, -1.0);
        let (inv, det) = invert_sym4(&diag([1.0, 4.0, 4.0, 4.0])).unwrap();
        assert_eq!(inv, diag([1.0, 0.25, 0.25, 0.25]));
        assert_eq!(det, 64.0);
    }

    #[test]
    fn singular_is_reported() {
        let mut m = diag([1.0, 1.0, 1.0, 0.0]);
        assert!(matches!(invert_sym4(&m), Err(MathError::SingularMetric { .. })));
        m[3][3] = 1e-20;
        assert!(invert_sym4(&m).is_err());
        // scaled units: a tiny but well-conditioned metric is fine
        assert!(invert_sym4(&diag([1e-6, 1e-6, 1e-6, 1e-6])).is_ok());
    }

    #[test]
    fn random_spd_matches_adjugate() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let m = random_spd(&mut rng);
            let (inv, det) = invert_sym4(&m).unwrap();
            let (oracle, odet) = adjugate_inverse(&m);
            for i in 0..4 {
                for j in 0..4 {
                    assert!((inv[i][j] - oracle[i][j]).abs() < 1e-10);
                    assert!((inv[i][j] - inv[j][i]).abs() < 1e-12);
                }
            }
            assert!((det - odet).abs() < 1e-10 * odet.abs().max(1.0));
            let id = mat_mul(&m, &inv);
            for i in 0..4 {
                for j in 0..4 {
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!((id[i][j] - want).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn raise_lower_round_trip_and_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let t = Tensor::from_fn(&[Upper, Lower, Lower], |_| rng.gen_range(-1.0..1.0));
        let euclid = SymMetricAtPoint::new(diag([1.0; 4])).unwrap();
        let lowered = raise_lower(&t, 0, &euclid, Direction::Down).unwrap();
        assert_eq!(lowered.data(), t.data());

        let m = SymMetricAtPoint::new(random_spd(&mut rng)).unwrap();
        let t = Tensor::from_fn(&[Lower, Lower, Lower], |_| rng.gen_range(-1.0..1.0));
        for slot in 0..3 {
            let up = raise_lower(&t, slot, &m, Direction::Up).unwrap();
            let back = raise_lower(&up, slot, &m, Direction::Down).unwrap();
            assert!(back.max_abs_diff(&t) < 1e-12);
        }
        assert!(matches!(
            raise_lower(&t, 0, &m, Direction::Down),
            Err(MathError::Variance(_))
        ));
    }

    #[test]
    fn contraction_commutes_with_raising_disjoint_slots() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let m = SymMetricAtPoint::new(random_spd(&mut rng)).unwrap();
        let t = Tensor::from_fn(&[Upper, Lower, Lower, Lower], |_| rng.gen_range(-1.0..1.0));
        let a = contract(&raise_lower(&t, 1, &m, Direction::Up).unwrap(), 0, 3).unwrap();
        let b = raise_lower(&contract(&t, 0, 3).unwrap(), 0, &m, Direction::Up).unwrap();
        assert!(a.max_abs_diff(&b) < 1e-12);
    }
}
