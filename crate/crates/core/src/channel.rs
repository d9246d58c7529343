//! Auxiliary channels `p_{Q|X_A}`: one pmf over Q per joint source symbol.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pmf::{JointPmf, NORMALIZATION_TOL};

/// Default cardinality cap on |Q|: `∏|X_a| + 2`.
pub fn cardinality_bound(p: &JointPmf) -> usize {
    p.len() + 2
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ChannelFile", into = "ChannelFile")]
pub struct AuxChannel {
    q_size: usize,
    // row-major, one row of length q_size per source symbol
    data: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct ChannelFile {
    q_size: usize,
    rows: Vec<Vec<f64>>,
}

impl TryFrom<ChannelFile> for AuxChannel {
    type Error = Error;
    fn try_from(f: ChannelFile) -> Result<Self> {
        AuxChannel::new(f.q_size, f.rows)
    }
}

impl From<AuxChannel> for ChannelFile {
    fn from(w: AuxChannel) -> Self {
        ChannelFile {
            q_size: w.q_size,
            rows: w.rows().map(<[f64]>::to_vec).collect(),
        }
    }
}

impl AuxChannel {
    pub fn new(q_size: usize, rows: Vec<Vec<f64>>) -> Result<Self> {
        if q_size == 0 {
            return Err(Error::InvalidChannel("q_size must be positive".into()));
        }
        let mut data = Vec::with_capacity(rows.len() * q_size);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != q_size {
                return Err(Error::InvalidChannel(format!(
                    "row {i} has {} entries, expected {q_size}",
                    row.len()
                )));
            }
            data.extend_from_slice(row);
        }
        Self::from_flat(q_size, data)
    }

    /// Builds a channel from a flat row-major buffer.
    pub fn from_flat(q_size: usize, data: Vec<f64>) -> Result<Self> {
        if q_size == 0 || !data.len().is_multiple_of(q_size) {
            return Err(Error::InvalidChannel(
                "buffer length is not a multiple of q_size".into(),
            ));
        }
        for (i, row) in data.chunks(q_size).enumerate() {
            if row.iter().any(|v| !v.is_finite() || *v < 0.0) {
                return Err(Error::InvalidChannel(format!(
                    "row {i} has a negative entry"
                )));
            }
            let s: f64 = row.iter().sum();
            if (s - 1.0).abs() > NORMALIZATION_TOL {
                return Err(Error::InvalidChannel(format!("row {i} sums to {s}")));
            }
        }
        Ok(Self { q_size, data })
    }

    /// `|Q| = 1`.
    pub fn constant(num_rows: usize) -> Self {
        Self {
            q_size: 1,
            data: vec![1.0; num_rows],
        }
    }

    pub fn uniform(num_rows: usize, q_size: usize) -> Self {
        Self {
            q_size,
            data: vec![1.0 / q_size as f64; num_rows * q_size],
        }
    }

    /// Deterministic channel `Q = labels[x]`.
    pub fn deterministic(labels: &[usize], q_size: usize) -> Result<Self> {
        if let Some(&l) = labels.iter().find(|&&l| l >= q_size) {
            return Err(Error::InvalidChannel(format!(
                "label {l} exceeds q_size {q_size}"
            )));
        }
        let mut data = vec![0.0; labels.len() * q_size];
        for (x, &l) in labels.iter().enumerate() {
            data[x * q_size + l] = 1.0;
        }
        Ok(Self { q_size, data })
    }

    /// `Q = X_A`, the full joint symbol.
    pub fn identity(num_rows: usize) -> Self {
        let labels: Vec<usize> = (0..num_rows).collect();
        Self::deterministic(&labels, num_rows).expect("labels are in range")
    }

    /// `p_{Q|X_A}` read off a pmf whose last coordinate is Q. Rows of
    /// zero-probability source symbols are set uniform.
    pub fn conditional_of_last(joint: &JointPmf) -> Self {
        let q = *joint.sizes().last().expect("pmf has coordinates");
        let mut data = joint.probs().to_vec();
        for row in data.chunks_mut(q) {
            let s: f64 = row.iter().sum();
            if s > 0.0 {
                row.iter_mut().for_each(|v| *v /= s);
            } else {
                row.iter_mut().for_each(|v| *v = 1.0 / q as f64);
            }
        }
        Self { q_size: q, data }
    }

    /// Time sharing: `Q' = (S, Q_S)` where the selector S is independent of
    /// the source, picking `a` with probability `mix`. Alphabet sizes add.
    pub fn time_share(a: &AuxChannel, b: &AuxChannel, mix: f64) -> Result<Self> {
        if a.num_rows() != b.num_rows() {
            return Err(Error::Dimension(
                "time sharing needs equal row counts".into(),
            ));
        }
        if !(0.0..=1.0).contains(&mix) {
            return Err(Error::InvalidChannel(format!(
                "mixing weight {mix} outside [0,1]"
            )));
        }
        let q = a.q_size + b.q_size;
        let mut data = Vec::with_capacity(a.num_rows() * q);
        for x in 0..a.num_rows() {
            data.extend(a.row(x).iter().map(|v| mix * v));
            data.extend(b.row(x).iter().map(|v| (1.0 - mix) * v));
        }
        Ok(Self { q_size: q, data })
    }

    /// Pads the Q alphabet with unused symbols up to `q_size`.
    pub fn padded(&self, q_size: usize) -> Self {
        if q_size <= self.q_size {
            return self.clone();
        }
        let mut data = Vec::with_capacity(self.num_rows() * q_size);
        for row in self.rows() {
            data.extend_from_slice(row);
            data.extend(std::iter::repeat_n(0.0, q_size - self.q_size));
        }
        Self { q_size, data }
    }

    /// Mixes every row with the uniform pmf: `(1−eps)·w + eps·uniform`.
    pub fn smoothed(&self, eps: f64) -> Self {
        let u = eps / self.q_size as f64;
        Self {
            q_size: self.q_size,
            data: self.data.iter().map(|v| (1.0 - eps) * v + u).collect(),
        }
    }

    pub fn q_size(&self) -> usize {
        self.q_size
    }

    pub fn num_rows(&self) -> usize {
        self.data.len() / self.q_size
    }

    pub fn row(&self, x: usize) -> &[f64] {
        &self.data[x * self.q_size..(x + 1) * self.q_size]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks(self.q_size)
    }

    pub fn get(&self, x: usize, q: usize) -> f64 {
        self.data[x * self.q_size + q]
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.data
    }

    pub(crate) fn flat_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    /// Lexicographic order on (q_size, rows); used to break exact ties.
    pub fn tie_order(&self, other: &AuxChannel) -> Ordering {
        self.q_size.cmp(&other.q_size).then_with(|| {
            self.data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a.total_cmp(b))
                .find(|o| o.is_ne())
                .unwrap_or(Ordering::Equal)
        })
    }
}
