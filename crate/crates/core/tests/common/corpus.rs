//! Seeded distributions shared by the integration and acceptance tests.

use infomono::{AuxChannel, JointPmf};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn weight(rng: &mut ChaCha8Rng) -> f64 {
    let w: f64 = Exp1.sample(rng);
    w + 1e-3
}

fn cells(sizes: &[usize]) -> Vec<Vec<usize>> {
    let n: usize = sizes.iter().product();
    (0..n)
        .map(|mut i| {
            let mut s = vec![0; sizes.len()];
            for a in (0..sizes.len()).rev() {
                s[a] = i % sizes[a];
                i /= sizes[a];
            }
            s
        })
        .collect()
}

/// Full-support pmf with Dirichlet(1)-like weights.
pub fn dense(rng: &mut ChaCha8Rng, sizes: &[usize]) -> JointPmf {
    let n: usize = sizes.iter().product();
    JointPmf::from_weights(sizes.to_vec(), (0..n).map(|_| weight(rng)).collect()).unwrap()
}

/// Each cell survives with probability `keep`; at least one always does.
pub fn sparse(rng: &mut ChaCha8Rng, sizes: &[usize], keep: f64) -> JointPmf {
    let n: usize = sizes.iter().product();
    let mut w: Vec<f64> = (0..n)
        .map(|_| {
            if rng.random::<f64>() < keep {
                weight(rng)
            } else {
                0.0
            }
        })
        .collect();
    if w.iter().all(|&v| v == 0.0) {
        w[rng.random_range(0..n)] = 1.0;
    }
    JointPmf::from_weights(sizes.to_vec(), w).unwrap()
}

/// Block label of every symbol of every party; the first `blocks` symbols
/// of each party cover every block.
fn block_labels(rng: &mut ChaCha8Rng, sizes: &[usize], blocks: usize) -> Vec<Vec<usize>> {
    sizes
        .iter()
        .map(|&s| {
            (0..s)
                .map(|x| {
                    if x < blocks {
                        x
                    } else {
                        rng.random_range(0..blocks)
                    }
                })
                .collect()
        })
        .collect()
}

/// Mass only on cells whose parties agree on a planted block label; inside
/// a block the cells are dependent.
pub fn planted_block(rng: &mut ChaCha8Rng, sizes: &[usize]) -> JointPmf {
    let max = *sizes.iter().min().unwrap();
    let blocks = rng.random_range(2..=max);
    let labels = block_labels(rng, sizes, blocks);
    let w: Vec<f64> = cells(sizes)
        .iter()
        .map(|s| {
            let b = labels[0][s[0]];
            let same = s.iter().enumerate().all(|(a, &x)| labels[a][x] == b);
            if same && rng.random::<f64>() < 0.85 {
                weight(rng)
            } else {
                0.0
            }
        })
        .collect();
    if w.iter().all(|&v| v == 0.0) {
        return dense(rng, sizes);
    }
    JointPmf::from_weights(sizes.to_vec(), w).unwrap()
}

/// `Σ_b π_b Π_a p(x_a|b)` with disjoint per-block supports: the planted
/// block is the common part and leaves no residual dependence.
pub fn planted_resolvable(rng: &mut ChaCha8Rng, sizes: &[usize]) -> JointPmf {
    let max = *sizes.iter().min().unwrap();
    let blocks = rng.random_range(1..=max);
    let labels = block_labels(rng, sizes, blocks);
    let block_mass: Vec<f64> = (0..blocks).map(|_| weight(rng)).collect();
    let local: Vec<Vec<f64>> = sizes
        .iter()
        .map(|&s| (0..s).map(|_| weight(rng)).collect())
        .collect();
    let local_sum = |a: usize, b: usize| -> f64 {
        (0..sizes[a])
            .filter(|&x| labels[a][x] == b)
            .map(|x| local[a][x])
            .sum()
    };
    let w = cells(sizes)
        .iter()
        .map(|s| {
            let b = labels[0][s[0]];
            if s.iter().enumerate().any(|(a, &x)| labels[a][x] != b) {
                return 0.0;
            }
            s.iter().enumerate().fold(block_mass[b], |acc, (a, &x)| {
                acc * local[a][x] / local_sum(a, b)
            })
        })
        .collect();
    JointPmf::from_weights(sizes.to_vec(), w).unwrap()
}

/// Independent parties.
pub fn product(rng: &mut ChaCha8Rng, sizes: &[usize]) -> JointPmf {
    let marg: Vec<Vec<f64>> = sizes
        .iter()
        .map(|&s| (0..s).map(|_| weight(rng)).collect())
        .collect();
    let w = cells(sizes)
        .iter()
        .map(|s| s.iter().enumerate().map(|(a, &x)| marg[a][x]).product())
        .collect();
    JointPmf::from_weights(sizes.to_vec(), w).unwrap()
}

pub fn random_sizes(rng: &mut ChaCha8Rng, k: usize, max: usize) -> Vec<usize> {
    (0..k).map(|_| rng.random_range(2..=max)).collect()
}

/// 200 seeded pmfs: 100 with two parties over alphabets of at most 4,
/// 100 with three parties over alphabets of at most 3. Families cycle
/// through dense, sparse, planted block, planted resolvable and product.
pub fn corpus() -> Vec<JointPmf> {
    (0..200u64)
        .map(|i| {
            let mut r = rng(0xC0_0000 + i);
            let sizes = if i < 100 {
                random_sizes(&mut r, 2, 4)
            } else {
                random_sizes(&mut r, 3, 3)
            };
            match i % 5 {
                0 => dense(&mut r, &sizes),
                1 => sparse(&mut r, &sizes, 0.45),
                2 => planted_block(&mut r, &sizes),
                3 => planted_resolvable(&mut r, &sizes),
                _ => product(&mut r, &sizes),
            }
        })
        .collect()
}

/// Random channel with Dirichlet-like rows.
pub fn channel(rng: &mut ChaCha8Rng, rows: usize, q_size: usize) -> AuxChannel {
    AuxChannel::new(
        q_size,
        (0..rows)
            .map(|_| {
                let w: Vec<f64> = (0..q_size).map(|_| weight(rng)).collect();
                let s: f64 = w.iter().sum();
                w.into_iter().map(|v| v / s).collect()
            })
            .collect(),
    )
    .unwrap()
}

/// `Pr{X1 = X2} = agree` with uniform marginals.
pub fn correlated_bits(agree: f64) -> JointPmf {
    JointPmf::new(
        vec![2, 2],
        vec![
            agree / 2.0,
            (1.0 - agree) / 2.0,
            (1.0 - agree) / 2.0,
            agree / 2.0,
        ],
    )
    .unwrap()
}

/// `Y1 = (U1, Q)`, `Y2 = (Q, U2)`, and for three parties `Y3 = (Q, U3)`,
/// with independent uniform bits. Symbols are `2·first + second`.
pub fn trivial_form(k: usize) -> JointPmf {
    JointPmf::from_fn(vec![4; k], |s| {
        let q = s[0] % 2;
        if s[1..].iter().all(|&x| x / 2 == q) {
            1.0 / f64::powi(2.0, k as i32 + 1)
        } else {
            0.0
        }
    })
    .unwrap()
}
