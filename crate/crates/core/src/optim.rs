//! Exponentiated-gradient descent over auxiliary channels.
//!
//! Each row of `p_{Q|X_A}` lives on a probability simplex; the update
//! `w'(q) ∝ w(q)·exp(−η·g(x,q))` keeps iterates feasible without projection.
//! The step size is chosen by Armijo backtracking and grows after every
//! accepted step.

use std::cmp::Ordering;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};
use rayon::prelude::*;

use crate::channel::AuxChannel;
use crate::functional::Evaluator;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DescentOptions {
    pub max_iters: usize,
    /// Stop after a few consecutive steps improving by less than this.
    pub tol: f64,
}

impl Default for DescentOptions {
    fn default() -> Self {
        Self {
            max_iters: 400,
            tol: 1e-11,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Descent {
    pub value: f64,
    pub channel: AuxChannel,
    pub iters: usize,
}

const ARMIJO: f64 = 1e-4;
const MAX_STEP: f64 = 1e8;
const MIN_STEP: f64 = 1e-14;

fn eg_step(w: &AuxChannel, grad: &[f64], probs: &[f64], eta: f64) -> AuxChannel {
    let q = w.q_size();
    let mut out = w.clone();
    let data = out.flat_mut();
    for (x, &px) in probs.iter().enumerate() {
        if px == 0.0 {
            continue;
        }
        let row = &mut data[x * q..(x + 1) * q];
        let g = &grad[x * q..(x + 1) * q];
        let gmin = row
            .iter()
            .zip(g)
            .filter(|(v, _)| **v > 0.0)
            .map(|(_, g)| *g)
            .fold(f64::INFINITY, f64::min);
        let mut s = 0.0;
        for (v, gj) in row.iter_mut().zip(g) {
            if *v > 0.0 {
                *v *= (-eta * (gj - gmin)).exp();
                s += *v;
            }
        }
        row.iter_mut().for_each(|v| *v /= s);
    }
    out
}

/// A smooth function of an auxiliary channel over a fixed source pmf.
pub trait Objective: Sync {
    fn source_probs(&self) -> &[f64];
    fn value(&self, w: &AuxChannel) -> f64;
    /// Value plus the per-row scaled gradient `∂F/∂W(q|x) / p(x)`, up to a
    /// per-row additive constant.
    fn value_and_grad(&self, w: &AuxChannel, grad: &mut [f64]) -> f64;
}

impl Objective for Evaluator<'_> {
    fn source_probs(&self) -> &[f64] {
        self.pmf().probs()
    }

    fn value(&self, w: &AuxChannel) -> f64 {
        Evaluator::value(self, w)
    }

    fn value_and_grad(&self, w: &AuxChannel, grad: &mut [f64]) -> f64 {
        Evaluator::value_and_grad(self, w, grad)
    }
}

/// Local descent from `start`.
pub fn descend<O: Objective + ?Sized>(ev: &O, start: AuxChannel, opts: &DescentOptions) -> Descent {
    let probs = ev.source_probs();
    let q = start.q_size();
    let mut w = start;
    let mut grad = vec![0.0; w.as_flat().len()];
    let mut f = ev.value_and_grad(&w, &mut grad);
    let mut eta = 1.0;
    let mut stall = 0;
    let mut iters = 0;
    while iters < opts.max_iters {
        iters += 1;
        let mut next = None;
        while eta >= MIN_STEP {
            let cand = eg_step(&w, &grad, probs, eta);
            let slope: f64 = probs
                .iter()
                .enumerate()
                .filter(|(_, &px)| px > 0.0)
                .map(|(x, &px)| {
                    let r = x * q..(x + 1) * q;
                    px * cand.as_flat()[r.clone()]
                        .iter()
                        .zip(&w.as_flat()[r.clone()])
                        .zip(&grad[r])
                        .map(|((c, o), g)| g * (c - o))
                        .sum::<f64>()
                })
                .sum();
            let fc = ev.value(&cand);
            if fc <= f + ARMIJO * slope.min(0.0) {
                next = Some((fc, cand));
                eta = (eta * 2.0).min(MAX_STEP);
                break;
            }
            eta *= 0.5;
        }
        let Some((fc, cand)) = next else { break };
        let gain = f - fc;
        w = cand;
        f = ev.value_and_grad(&w, &mut grad);
        if gain < opts.tol * (1.0 + f.abs()) {
            stall += 1;
            if stall >= 3 {
                break;
            }
        } else {
            stall = 0;
        }
    }
    Descent {
        value: f,
        channel: w,
        iters,
    }
}

/// Independent random stream for restart `index` under `seed`.
pub fn restart_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Rows drawn uniformly from the simplex (Dirichlet(1)).
pub fn random_channel(rng: &mut ChaCha8Rng, rows: usize, q_size: usize) -> AuxChannel {
    let mut data: Vec<f64> = (0..rows * q_size)
        .map(|_| {
            let e: f64 = Exp1.sample(rng);
            e + 1e-12
        })
        .collect();
    for row in data.chunks_mut(q_size) {
        let s: f64 = row.iter().sum();
        row.iter_mut().for_each(|v| *v /= s);
    }
    AuxChannel::from_flat(q_size, data).expect("rows are normalized")
}

/// Starting points for a multi-start run: `restarts` random channels
/// followed by the structured `seeds` (padded to `q_size` and smoothed so
/// multiplicative updates can move every entry). Seeds wider than `q_size`
/// are skipped.
pub fn starting_points(
    rows: usize,
    q_size: usize,
    restarts: usize,
    seed: u64,
    seeds: &[AuxChannel],
) -> Vec<AuxChannel> {
    let mut starts: Vec<AuxChannel> = (0..restarts as u64)
        .map(|i| random_channel(&mut restart_rng(seed, i), rows, q_size))
        .collect();
    starts.extend(
        seeds
            .iter()
            .filter(|s| s.q_size() <= q_size && s.num_rows() == rows)
            .map(|s| s.padded(q_size).smoothed(1e-3)),
    );
    starts
}

/// Lower value wins; exact ties go to the smaller alphabet, then the
/// lexicographically smaller row matrix.
pub fn better(a: &(f64, AuxChannel), b: &(f64, AuxChannel)) -> Ordering {
    a.0.total_cmp(&b.0).then_with(|| a.1.tie_order(&b.1))
}

pub fn best_of(cands: impl IntoIterator<Item = (f64, AuxChannel)>) -> Option<(f64, AuxChannel)> {
    cands.into_iter().min_by(better)
}

/// Multi-start minimization of a single evaluator. Exact (unsmoothed)
/// seeds are also evaluated as candidates, so a deterministic witness
/// found combinatorially is never lost to smoothing.
pub fn minimize(
    ev: &Evaluator,
    q_size: usize,
    restarts: usize,
    seed: u64,
    seeds: &[AuxChannel],
    opts: &DescentOptions,
) -> (f64, AuxChannel) {
    let rows = ev.pmf().len();
    let starts = starting_points(rows, q_size, restarts, seed, seeds);
    let mut results: Vec<(f64, AuxChannel)> = starts
        .into_par_iter()
        .map(|s| {
            let d = descend(ev, s, opts);
            (d.value, d.channel)
        })
        .collect();
    results.extend(
        seeds
            .iter()
            .filter(|s| s.q_size() <= q_size && s.num_rows() == rows)
            .map(|s| {
                let s = s.padded(q_size);
                (ev.value(&s), s)
            }),
    );
    best_of(results).expect("at least one start")
}
