//! Dense joint probability tensors over finite alphabets.
//!
//! Storage is row-major in coordinate order: the last coordinate varies
//! fastest. Coordinates are parties, in party order.

use serde::{Deserialize, Serialize};

use crate::channel::AuxChannel;
use crate::error::{Error, Result};

/// Tolerance on `Σ p = 1` for inputs.
pub const NORMALIZATION_TOL: f64 = 1e-9;

/// A joint pmf over K finite alphabets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PmfFile", into = "PmfFile")]
pub struct JointPmf {
    sizes: Vec<usize>,
    probs: Vec<f64>,
    labels: Option<Vec<Vec<String>>>,
}

/// On-disk layout of a distribution file.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct PmfFile {
    alphabet_sizes: Vec<usize>,
    probs: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<Vec<String>>>,
}

impl TryFrom<PmfFile> for JointPmf {
    type Error = Error;

    fn try_from(f: PmfFile) -> Result<Self> {
        let mut p = JointPmf::new(f.alphabet_sizes, f.probs)?;
        if let Some(labels) = f.labels {
            p = p.with_labels(labels)?;
        }
        Ok(p)
    }
}

impl From<JointPmf> for PmfFile {
    fn from(p: JointPmf) -> Self {
        PmfFile {
            alphabet_sizes: p.sizes,
            probs: p.probs,
            labels: p.labels,
        }
    }
}

impl JointPmf {
    /// Validates and builds a pmf. Inputs that are not normalized within
    /// [`NORMALIZATION_TOL`] are rejected, never silently rescaled.
    pub fn new(sizes: Vec<usize>, probs: Vec<f64>) -> Result<Self> {
        if sizes.is_empty() {
            return Err(Error::InvalidPmf(
                "at least one coordinate is required".into(),
            ));
        }
        if let Some(i) = sizes.iter().position(|&s| s == 0) {
            return Err(Error::InvalidPmf(format!("alphabet {i} is empty")));
        }
        let len = sizes
            .iter()
            .try_fold(1usize, |acc, &s| acc.checked_mul(s))
            .ok_or_else(|| Error::InvalidPmf("alphabet product overflows".into()))?;
        if probs.len() != len {
            return Err(Error::InvalidPmf(format!(
                "expected {len} probabilities for shape {sizes:?}, got {}",
                probs.len()
            )));
        }
        if let Some(i) = probs.iter().position(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidPmf(format!(
                "entry {i} is negative or not finite"
            )));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::InvalidPmf(format!("entries sum to {total}, not 1")));
        }
        Ok(Self {
            sizes,
            probs,
            labels: None,
        })
    }

    /// Builds a pmf from unnormalized nonnegative weights.
    pub fn from_weights(sizes: Vec<usize>, weights: Vec<f64>) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if !total.is_finite() || total <= 0.0 {
            return Err(Error::InvalidPmf(
                "weights must have a positive finite sum".into(),
            ));
        }
        Self::new(sizes, weights.into_iter().map(|w| w / total).collect())
    }

    /// Builds a pmf by evaluating `f` on every joint symbol.
    pub fn from_fn(sizes: Vec<usize>, f: impl Fn(&[usize]) -> f64) -> Result<Self> {
        let shape = Shape::new(&sizes);
        let mut sym = vec![0; sizes.len()];
        let probs = (0..shape.len)
            .map(|i| {
                shape.unravel_into(i, &mut sym);
                f(&sym)
            })
            .collect();
        Self::new(sizes, probs)
    }

    pub fn uniform(sizes: Vec<usize>) -> Result<Self> {
        let len: usize = sizes.iter().product();
        Self::new(sizes, vec![1.0 / len.max(1) as f64; len])
    }

    pub fn point_mass(sizes: Vec<usize>, symbol: &[usize]) -> Result<Self> {
        let target = symbol.to_vec();
        Self::from_fn(sizes, |s| if s == target.as_slice() { 1.0 } else { 0.0 })
    }

    /// Attaches per-coordinate symbol names.
    pub fn with_labels(mut self, labels: Vec<Vec<String>>) -> Result<Self> {
        if labels.len() != self.sizes.len()
            || labels.iter().zip(&self.sizes).any(|(l, &s)| l.len() != s)
        {
            return Err(Error::InvalidPmf(
                "labels do not match alphabet sizes".into(),
            ));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn labels(&self) -> Option<&[Vec<String>]> {
        self.labels.as_deref()
    }

    /// Number of coordinates K.
    pub fn num_coords(&self) -> usize {
        self.sizes.len()
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Number of joint symbols, `∏ |X_a|`.
    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn shape(&self) -> Shape {
        Shape::new(&self.sizes)
    }

    pub fn prob(&self, symbol: &[usize]) -> f64 {
        self.probs[self.shape().ravel(symbol)]
    }

    /// Iterator over `(joint symbol, probability)` for positive entries.
    pub fn support(&self) -> impl Iterator<Item = (Vec<usize>, f64)> + '_ {
        let shape = self.shape();
        self.probs
            .iter()
            .enumerate()
            .filter(|(_, &v)| v > 0.0)
            .map(move |(i, &v)| (shape.unravel(i), v))
    }

    /// Marginal probabilities over `coords` (in the given order), as a flat
    /// row-major vector.
    pub fn marginal_probs(&self, coords: &[usize]) -> Vec<f64> {
        let proj = self.shape().projection(coords);
        let len: usize = coords.iter().map(|&c| self.sizes[c]).product();
        let mut out = vec![0.0; len];
        for (i, &v) in self.probs.iter().enumerate() {
            out[proj[i]] += v;
        }
        out
    }

    /// Marginal pmf over the coordinates of `spec`, in spec order.
    pub fn marginal(&self, spec: &MarginSpec) -> Result<JointPmf> {
        spec.check(self.num_coords())?;
        let sizes = spec.coords().iter().map(|&c| self.sizes[c]).collect();
        let labels = self
            .labels
            .as_ref()
            .map(|l| spec.coords().iter().map(|&c| l[c].clone()).collect());
        Ok(JointPmf {
            sizes,
            probs: self.marginal_probs(spec.coords()),
            labels,
        })
    }

    /// Builds `p_{X_A Q} = p_{X_A} p_{Q|X_A}` with Q appended as the last
    /// coordinate.
    pub fn extend(&self, w: &AuxChannel) -> Result<JointPmf> {
        if w.num_rows() != self.len() {
            return Err(Error::Dimension(format!(
                "channel has {} rows, pmf has {} joint symbols",
                w.num_rows(),
                self.len()
            )));
        }
        let q = w.q_size();
        let mut probs = Vec::with_capacity(self.len() * q);
        for (x, &px) in self.probs.iter().enumerate() {
            probs.extend(w.row(x).iter().map(|&wq| px * wq));
        }
        let mut sizes = self.sizes.clone();
        sizes.push(q);
        Ok(JointPmf {
            sizes,
            probs,
            labels: None,
        })
    }

    /// Merges coordinate groups into single coordinates. Group `g` becomes
    /// coordinate `g` of the result, with its symbols ordered row-major over
    /// the group's members. Distinct groups may share coordinates, in which
    /// case each of them holds a copy.
    pub fn group(&self, groups: &[Vec<usize>]) -> Result<JointPmf> {
        for g in groups {
            if g.is_empty() {
                return Err(Error::InvalidMarginSpec("empty coordinate group".into()));
            }
            MarginSpec::new(g.clone())?.check(self.num_coords())?;
        }
        let sizes: Vec<usize> = groups
            .iter()
            .map(|g| g.iter().map(|&c| self.sizes[c]).product())
            .collect();
        let order: Vec<usize> = groups.iter().flatten().copied().collect();
        let mut distinct = order.clone();
        distinct.sort_unstable();
        distinct.dedup();
        if distinct.len() == order.len() {
            return Ok(JointPmf {
                sizes,
                probs: self.marginal_probs(&order),
                labels: None,
            });
        }
        let shape = self.shape();
        let out_shape = Shape::new(&sizes);
        let mut probs = vec![0.0; out_shape.len()];
        let mut sym = vec![0; self.num_coords()];
        let mut out = vec![0; groups.len()];
        for (i, &v) in self.probs.iter().enumerate() {
            if v <= 0.0 {
                continue;
            }
            shape.unravel_into(i, &mut sym);
            for (o, g) in out.iter_mut().zip(groups) {
                *o = g.iter().fold(0, |acc, &c| acc * self.sizes[c] + sym[c]);
            }
            probs[out_shape.ravel(&out)] += v;
        }
        Ok(JointPmf {
            sizes,
            probs,
            labels: None,
        })
    }

    /// Reorders coordinates; `order[i]` is the old coordinate placed at `i`.
    pub fn permute(&self, order: &[usize]) -> Result<JointPmf> {
        if order.len() != self.num_coords() {
            return Err(Error::InvalidMarginSpec(
                "permutation must cover every coordinate".into(),
            ));
        }
        MarginSpec::new(order.to_vec())?.check(self.num_coords())?;
        let groups: Vec<Vec<usize>> = order.iter().map(|&c| vec![c]).collect();
        self.group(&groups)
    }

    /// Per-party product of two independent sources with the same number of
    /// parties: party `a` observes the pair `(X_a, Y_a)`.
    pub fn tensor(&self, other: &JointPmf) -> Result<JointPmf> {
        let k = self.num_coords();
        if other.num_coords() != k {
            return Err(Error::Dimension(format!(
                "tensor product needs equal party counts ({k} vs {})",
                other.num_coords()
            )));
        }
        let mut sizes = self.sizes.clone();
        sizes.extend_from_slice(&other.sizes);
        let mut probs = Vec::with_capacity(self.len() * other.len());
        for &a in &self.probs {
            probs.extend(other.probs.iter().map(|&b| a * b));
        }
        let joined = JointPmf {
            sizes,
            probs,
            labels: None,
        };
        let groups: Vec<Vec<usize>> = (0..k).map(|a| vec![a, a + k]).collect();
        joined.group(&groups)
    }

    /// Independent joint of `self` and `other`, coordinates concatenated.
    pub fn product(&self, other: &JointPmf) -> JointPmf {
        let mut sizes = self.sizes.clone();
        sizes.extend_from_slice(&other.sizes);
        let mut probs = Vec::with_capacity(self.len() * other.len());
        for &a in &self.probs {
            probs.extend(other.probs.iter().map(|&b| a * b));
        }
        JointPmf {
            sizes,
            probs,
            labels: None,
        }
    }

    /// Mixture `λ·self + (1−λ)·other` of two pmfs with equal shapes.
    pub fn mix(&self, other: &JointPmf, lambda: f64) -> Result<JointPmf> {
        if self.sizes != other.sizes {
            return Err(Error::Dimension(
                "mixture of differently shaped pmfs".into(),
            ));
        }
        let probs = self
            .probs
            .iter()
            .zip(&other.probs)
            .map(|(a, b)| lambda * a + (1.0 - lambda) * b)
            .collect();
        JointPmf::new(self.sizes.clone(), probs)
    }
}

/// Row-major index arithmetic for a tensor shape.
#[derive(Debug, Clone)]
pub struct Shape {
    sizes: Vec<usize>,
    strides: Vec<usize>,
    len: usize,
}

impl Shape {
    pub fn new(sizes: &[usize]) -> Self {
        let mut strides = vec![1; sizes.len()];
        for i in (0..sizes.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * sizes[i + 1];
        }
        Self {
            sizes: sizes.to_vec(),
            strides,
            len: sizes.iter().product(),
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn ravel(&self, symbol: &[usize]) -> usize {
        symbol.iter().zip(&self.strides).map(|(s, st)| s * st).sum()
    }

    pub fn unravel(&self, index: usize) -> Vec<usize> {
        let mut out = vec![0; self.sizes.len()];
        self.unravel_into(index, &mut out);
        out
    }

    pub fn unravel_into(&self, mut index: usize, out: &mut [usize]) {
        for (i, &st) in self.strides.iter().enumerate() {
            out[i] = index / st;
            index %= st;
        }
    }

    /// For every flat index, the flat index of its projection onto `coords`
    /// (row-major in the given coordinate order).
    pub fn projection(&self, coords: &[usize]) -> Vec<usize> {
        let mut sub_strides = vec![1usize; coords.len()];
        for i in (0..coords.len().saturating_sub(1)).rev() {
            sub_strides[i] = sub_strides[i + 1] * self.sizes[coords[i + 1]];
        }
        let mut sym = vec![0; self.sizes.len()];
        (0..self.len)
            .map(|i| {
                self.unravel_into(i, &mut sym);
                coords
                    .iter()
                    .zip(&sub_strides)
                    .map(|(&c, &st)| sym[c] * st)
                    .sum()
            })
            .collect()
    }
}

/// An ordered, duplicate-free, nonempty set of coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MarginSpec(Vec<usize>);

impl MarginSpec {
    pub fn new(coords: Vec<usize>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::InvalidMarginSpec("margin spec is empty".into()));
        }
        let mut sorted = coords.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidMarginSpec(format!(
                "repeated coordinate in {coords:?}"
            )));
        }
        Ok(Self(coords))
    }

    /// Shorthand for a single coordinate.
    pub fn single(c: usize) -> Self {
        Self(vec![c])
    }

    /// The coordinates `0..k` in order.
    pub fn range(k: usize) -> Self {
        Self((0..k).collect())
    }

    pub fn coords(&self) -> &[usize] {
        &self.0
    }

    pub fn check(&self, num_coords: usize) -> Result<()> {
        match self.0.iter().find(|&&c| c >= num_coords) {
            Some(c) => Err(Error::InvalidMarginSpec(format!(
                "coordinate {c} out of range for {num_coords} coordinates"
            ))),
            None => Ok(()),
        }
    }

    pub fn is_disjoint(&self, other: &MarginSpec) -> bool {
        !self.0.iter().any(|c| other.0.contains(c))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p4() -> JointPmf {
        JointPmf::new(vec![2, 2], vec![0.4, 0.1, 0.2, 0.3]).unwrap()
    }

    #[test]
    fn overlapping_groups_copy_the_shared_coordinate() {
        let p = p4();
        let g = p.group(&[vec![0, 1], vec![1]]).unwrap();
        assert_eq!(g.sizes(), &[4, 2]);
        // (x0, x1) paired with x1: only consistent cells carry mass
        assert_eq!(g.prob(&[1, 1]), 0.1);
        assert_eq!(g.prob(&[1, 0]), 0.0);
        assert_eq!(g.prob(&[3, 1]), 0.3);
        assert!(p.group(&[vec![0, 0]]).is_err());
        assert!(p.permute(&[0, 0]).is_err());
    }

    #[test]
    fn rejects_unnormalized_input() {
        assert!(JointPmf::new(vec![2], vec![0.5, 0.6]).is_err());
        assert!(JointPmf::new(vec![2], vec![1.5, -0.5]).is_err());
        assert!(JointPmf::new(vec![], vec![]).is_err());
        assert!(JointPmf::new(vec![2, 0], vec![]).is_err());
        assert!(JointPmf::new(vec![2, 2], vec![0.5, 0.5]).is_err());
    }

    #[test]
    fn marginal_sums_out_rows() {
        let m = p4().marginal(&MarginSpec::single(0)).unwrap();
        assert_eq!(m.sizes(), &[2]);
        assert!((m.probs()[0] - 0.5).abs() < 1e-15);
        assert!((m.probs()[1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn marginal_of_uniform_and_diagonal() {
        let u = JointPmf::uniform(vec![2, 2]).unwrap();
        assert_eq!(
            u.marginal(&MarginSpec::single(0)).unwrap().probs(),
            &[0.5, 0.5]
        );
        let d = JointPmf::new(vec![2, 2], vec![0.5, 0.0, 0.0, 0.5]).unwrap();
        assert_eq!(
            d.marginal(&MarginSpec::single(1)).unwrap().probs(),
            &[0.5, 0.5]
        );
    }

    #[test]
    fn marginal_rejects_out_of_range() {
        let err = p4().marginal(&MarginSpec::single(2)).unwrap_err();
        assert!(matches!(err, Error::InvalidMarginSpec(_)));
        assert!(MarginSpec::new(vec![0, 0]).is_err());
        assert!(MarginSpec::new(vec![]).is_err());
    }

    #[test]
    fn marginal_respects_order() {
        let p = JointPmf::new(vec![2, 3], vec![0.1, 0.2, 0.0, 0.3, 0.15, 0.25]).unwrap();
        let swapped = p.marginal(&MarginSpec::new(vec![1, 0]).unwrap()).unwrap();
        assert_eq!(swapped.sizes(), &[3, 2]);
        assert_eq!(swapped.prob(&[2, 1]), p.prob(&[1, 2]));
    }

    #[test]
    fn extend_with_constant_channel_appends_singleton() {
        let p = p4();
        let e = p.extend(&AuxChannel::constant(p.len())).unwrap();
        assert_eq!(e.sizes(), &[2, 2, 1]);
        assert_eq!(e.probs(), p.probs());
    }

    #[test]
    fn extend_with_copy_channel() {
        let p = JointPmf::uniform(vec![2, 2]).unwrap();
        let copy = AuxChannel::deterministic(&[0, 0, 1, 1], 2).unwrap();
        let e = p.extend(&copy).unwrap();
        for (sym, v) in e.support() {
            assert_eq!(sym[2], sym[0]);
            assert!((v - 0.25).abs() < 1e-15);
        }
    }

    #[test]
    fn extend_rejects_row_mismatch() {
        let err = p4().extend(&AuxChannel::constant(3)).unwrap_err();
        assert!(matches!(err, Error::Dimension(_)));
    }

    #[test]
    fn tensor_pairs_parties() {
        let a = JointPmf::new(vec![2, 2], vec![0.5, 0.0, 0.0, 0.5]).unwrap();
        let b = JointPmf::uniform(vec![3, 2]).unwrap();
        let t = a.tensor(&b).unwrap();
        assert_eq!(t.sizes(), &[6, 4]);
        // party 0 symbol (x=1, y=2) -> 1*3+2 = 5, party 1 (x=1, y=0) -> 2
        assert!((t.prob(&[5, 2]) - 0.5 / 6.0).abs() < 1e-15);
        assert_eq!(t.prob(&[5, 0]), 0.0);
    }

    #[test]
    fn json_round_trip_uses_file_layout() {
        let text =
            r#"{"alphabet_sizes":[2,2],"probs":[0.4,0.1,0.2,0.3],"labels":[["a","b"],["x","y"]]}"#;
        let p: JointPmf = serde_json::from_str(text).unwrap();
        assert_eq!(p.labels().unwrap()[1][0], "x");
        let back = serde_json::to_string(&p).unwrap();
        assert_eq!(back, text);
        let bad = r#"{"alphabet_sizes":[2],"probs":[0.4,0.4]}"#;
        assert!(serde_json::from_str::<JointPmf>(bad).is_err());
    }
}
