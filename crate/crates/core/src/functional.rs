//! Linear combinations of joint entropies `H(X_S, Q)` as functions of the
//! auxiliary channel `p_{Q|X_A}`.
//!
//! Every quantity the region and CI solvers minimize (`Δ1`, `Δ2a`,
//! `I(X_A;Q)`, the pairwise terms of the 2K region) is of the form
//!
//! ```text
//! F(W) = c0 + Σ_S c_S · H(X_S, Q)
//! ```
//!
//! where `S` ranges over subsets of source coordinates (the empty set gives
//! `H(Q)`) and `c0` collects entropies that do not involve Q. The partial
//! derivative with respect to `W(q|x)` is
//! `−p(x) Σ_S c_S (log2 m_S(x_S, q) + log2 e)`; the `log2 e` part is
//! constant along each row and vanishes on the simplex.

use std::collections::BTreeMap;

use crate::channel::AuxChannel;
use crate::info::entropy_coords;
use crate::pmf::JointPmf;

/// A formal combination `c0 + Σ c_S H(X_S Q)` over source-coordinate subsets.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EntropyForm {
    constant: f64,
    // sorted subset -> coefficient
    terms: BTreeMap<Vec<usize>, f64>,
}

impl EntropyForm {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: f64) -> Self {
        Self {
            constant: c,
            terms: BTreeMap::new(),
        }
    }

    /// `coeff · H(X_S, Q)`.
    pub fn term(subset: &[usize], coeff: f64) -> Self {
        let mut s = subset.to_vec();
        s.sort_unstable();
        s.dedup();
        let mut terms = BTreeMap::new();
        terms.insert(s, coeff);
        Self {
            constant: 0.0,
            terms,
        }
    }

    pub fn plus(mut self, other: &EntropyForm) -> Self {
        self.constant += other.constant;
        for (s, c) in &other.terms {
            *self.terms.entry(s.clone()).or_insert(0.0) += c;
        }
        self.terms.retain(|_, c| *c != 0.0);
        self
    }

    pub fn scale(mut self, k: f64) -> Self {
        self.constant *= k;
        self.terms.values_mut().for_each(|c| *c *= k);
        self.terms.retain(|_, c| *c != 0.0);
        self
    }

    pub fn constant_part(&self) -> f64 {
        self.constant
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[usize], f64)> {
        self.terms.iter().map(|(s, &c)| (s.as_slice(), c))
    }

    /// Weighted sum `Σ w_i F_i`.
    pub fn combine<'a>(parts: impl IntoIterator<Item = (f64, &'a EntropyForm)>) -> Self {
        parts
            .into_iter()
            .filter(|(w, _)| *w != 0.0)
            .fold(Self::zero(), |acc, (w, f)| acc.plus(&f.clone().scale(w)))
    }
}

/// Builders for the quantities used across the crate. `k` is the number of
/// source coordinates of the pmf the form will be evaluated on.
pub mod forms {
    use super::EntropyForm;
    use crate::info::entropy_coords;
    use crate::pmf::JointPmf;

    fn all(k: usize) -> Vec<usize> {
        (0..k).collect()
    }

    fn others(k: usize, a: usize) -> Vec<usize> {
        (0..k).filter(|&b| b != a).collect()
    }

    /// `I(X_A; Q) = H(X_A) + H(Q) − H(X_A Q)`.
    pub fn mutual_info_with_q(p: &JointPmf) -> EntropyForm {
        let k = p.num_coords();
        EntropyForm::constant(entropy_coords(p, &all(k)))
            .plus(&EntropyForm::term(&[], 1.0))
            .plus(&EntropyForm::term(&all(k), -1.0))
    }

    /// `Δ1 = I(X_1;…;X_K|Q) = Σ_a H(X_a Q) − (K−1) H(Q) − H(X_A Q)`.
    pub fn delta1(p: &JointPmf) -> EntropyForm {
        let k = p.num_coords();
        let mut f =
            EntropyForm::term(&[], -((k as f64) - 1.0)).plus(&EntropyForm::term(&all(k), -1.0));
        for a in 0..k {
            f = f.plus(&EntropyForm::term(&[a], 1.0));
        }
        f
    }

    /// `Δ2a = I(X_{A∖a}; Q | X_a) = H(X_A) − H(X_a) − H(X_A Q) + H(X_a Q)`.
    pub fn delta2(p: &JointPmf, a: usize) -> EntropyForm {
        let k = p.num_coords();
        EntropyForm::constant(entropy_coords(p, &all(k)) - entropy_coords(p, &[a]))
            .plus(&EntropyForm::term(&all(k), -1.0))
            .plus(&EntropyForm::term(&[a], 1.0))
    }

    /// `I(X_{A∖i}; X_i | Q) = H(X_{A∖i} Q) + H(X_i Q) − H(X_A Q) − H(Q)`.
    pub fn pairwise_residual(p: &JointPmf, i: usize) -> EntropyForm {
        let k = p.num_coords();
        EntropyForm::term(&others(k, i), 1.0)
            .plus(&EntropyForm::term(&[i], 1.0))
            .plus(&EntropyForm::term(&all(k), -1.0))
            .plus(&EntropyForm::term(&[], -1.0))
    }
}

/// Precomputed evaluation of an [`EntropyForm`] against a fixed source pmf.
#[derive(Debug, Clone)]
pub struct Evaluator<'a> {
    p: &'a JointPmf,
    constant: f64,
    // (coefficient, projection of each source symbol onto S, |X_S|)
    terms: Vec<(f64, Vec<usize>, usize)>,
}

impl<'a> Evaluator<'a> {
    pub fn new(p: &'a JointPmf, form: &EntropyForm) -> Self {
        let shape = p.shape();
        let terms = form
            .terms()
            .map(|(s, c)| {
                let size: usize = s.iter().map(|&i| p.sizes()[i]).product();
                (c, shape.projection(s), size)
            })
            .collect();
        Self {
            p,
            constant: form.constant_part(),
            terms,
        }
    }

    pub fn pmf(&self) -> &JointPmf {
        self.p
    }

    fn marginals(&self, w: &AuxChannel) -> Vec<Vec<f64>> {
        let q = w.q_size();
        let probs = self.p.probs();
        self.terms
            .iter()
            .map(|(_, proj, size)| {
                let mut m = vec![0.0; size * q];
                for (x, &px) in probs.iter().enumerate() {
                    if px == 0.0 {
                        continue;
                    }
                    let base = proj[x] * q;
                    for (j, &wq) in w.row(x).iter().enumerate() {
                        m[base + j] += px * wq;
                    }
                }
                m
            })
            .collect()
    }

    pub fn value(&self, w: &AuxChannel) -> f64 {
        let margs = self.marginals(w);
        self.constant
            + self
                .terms
                .iter()
                .zip(&margs)
                .map(|((c, _, _), m)| c * crate::info::entropy_of(m))
                .sum::<f64>()
    }

    /// Value plus the per-row scaled gradient `∂F/∂W(q|x) / p(x)`, up to a
    /// per-row additive constant. Rows with `p(x) = 0` get zeros.
    pub fn value_and_grad(&self, w: &AuxChannel, grad: &mut [f64]) -> f64 {
        let q = w.q_size();
        let margs = self.marginals(w);
        grad.iter_mut().for_each(|g| *g = 0.0);
        let mut value = self.constant;
        let probs = self.p.probs();
        for ((c, proj, _), m) in self.terms.iter().zip(&margs) {
            value += c * crate::info::entropy_of(m);
            let logs: Vec<f64> = m.iter().map(|&v| v.max(1e-300).log2()).collect();
            for (x, &px) in probs.iter().enumerate() {
                if px == 0.0 {
                    continue;
                }
                let base = proj[x] * q;
                let row = &mut grad[x * q..(x + 1) * q];
                for (j, g) in row.iter_mut().enumerate() {
                    *g -= c * logs[base + j];
                }
            }
        }
        value
    }
}

/// Reference evaluation of a form through extended-pmf entropies, used to
/// cross-check [`Evaluator`].
pub fn evaluate_direct(p: &JointPmf, form: &EntropyForm, w: &AuxChannel) -> f64 {
    let ext = p.extend(w).expect("channel matches pmf");
    let qc = p.num_coords();
    form.constant_part()
        + form
            .terms()
            .map(|(s, c)| {
                let mut coords = s.to_vec();
                coords.push(qc);
                c * entropy_coords(&ext, &coords)
            })
            .sum::<f64>()
}
