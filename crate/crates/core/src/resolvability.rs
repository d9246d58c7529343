//! Gács–Körner common part, Wyner common information and perfect
//! resolvability.
//!
//! The common part is support-determined: nodes are `(coordinate, symbol)`
//! pairs with positive marginal mass, every positive joint symbol links its
//! K nodes, and the connected components are the values of the maximal
//! common function.

use petgraph::unionfind::UnionFind;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{cardinality_bound, AuxChannel};
use crate::error::{Error, Result};
use crate::functional::{forms, Evaluator};
use crate::info::{entropy_coords, entropy_of, total_correlation_groups};
use crate::optim::{descend, starting_points, DescentOptions};
use crate::pmf::JointPmf;

/// Conditional independence counts as achieved below this residual.
pub const WYNER_PENALTY_TOL: f64 = 1e-7;
/// Residual total correlation at or below this is treated as zero.
pub const RESOLVABLE_TOL: f64 = 1e-9;
/// Guard on the default Wyner alphabet.
pub const WYNER_DEFAULT_Q_MAX: usize = 16;

const PENALTY_RAMP: [f64; 6] = [10.0, 100.0, 1e3, 1e4, 1e5, 1e6];

/// Factor applied to [`PENALTY_RAMP`]. A constant `Q` costs `μ·TC` and is a
/// stationary point of the descent, so the first stage must charge more than
/// the cheapest exact witness `Q = X_{A∖a}`, or nearly independent sources
/// collapse onto it.
fn penalty_scale(p: &JointPmf) -> f64 {
    let k = p.num_coords();
    let groups: Vec<Vec<usize>> = (0..k).map(|a| vec![a]).collect();
    let tc = total_correlation_groups(p, &groups, &[]);
    let upper = (0..k)
        .map(|a| entropy_coords(p, &(0..k).filter(|&b| b != a).collect::<Vec<_>>()))
        .fold(f64::INFINITY, f64::min);
    if tc <= 0.0 {
        return 1.0;
    }
    (2.0 * upper / (PENALTY_RAMP[0] * tc)).max(1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Certification {
    Exact,
    Heuristic,
}

/// The maximal common function of a joint pmf.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CommonPart {
    /// `component_of[a][x]` is the component of symbol `x` of coordinate
    /// `a`, or `None` for zero-probability symbols.
    pub component_of: Vec<Vec<Option<usize>>>,
    pub component_pmf: Vec<f64>,
}

impl CommonPart {
    pub fn num_components(&self) -> usize {
        self.component_pmf.len()
    }

    pub fn entropy(&self) -> f64 {
        entropy_of(&self.component_pmf)
    }

    /// Component of a joint symbol: the first coordinate with a defined
    /// component decides, which is exact on the support.
    pub fn label_of(&self, symbol: &[usize]) -> usize {
        symbol
            .iter()
            .enumerate()
            .find_map(|(a, &x)| self.component_of[a][x])
            .unwrap_or(0)
    }

    /// Component labels of every joint symbol of `p`, in flat order.
    pub fn joint_labels(&self, p: &JointPmf) -> Vec<usize> {
        let shape = p.shape();
        let mut sym = vec![0; p.num_coords()];
        (0..p.len())
            .map(|i| {
                shape.unravel_into(i, &mut sym);
                self.label_of(&sym)
            })
            .collect()
    }

    /// Deterministic channel `Q = component(X_A)`.
    pub fn channel(&self, p: &JointPmf) -> AuxChannel {
        AuxChannel::deterministic(&self.joint_labels(p), self.num_components().max(1))
            .expect("labels are component ids")
    }

    /// Symbols of coordinate `a` that carry no probability.
    pub fn pruned(&self, a: usize) -> Vec<usize> {
        self.component_of[a]
            .iter()
            .enumerate()
            .filter(|(_, c)| c.is_none())
            .map(|(x, _)| x)
            .collect()
    }
}

pub fn common_part(p: &JointPmf) -> CommonPart {
    let sizes = p.sizes();
    let mut offsets = vec![0; sizes.len()];
    for a in 1..sizes.len() {
        offsets[a] = offsets[a - 1] + sizes[a - 1];
    }
    let total: usize = sizes.iter().sum();
    let mut uf = UnionFind::<usize>::new(total);
    for (sym, _) in p.support() {
        let first = offsets[0] + sym[0];
        for (a, &x) in sym.iter().enumerate().skip(1) {
            uf.union(first, offsets[a] + x);
        }
    }
    // ids in order of first appearance along the flat (lexicographic) order
    let mut id_of_root = vec![usize::MAX; total];
    let mut component_of: Vec<Vec<Option<usize>>> = sizes.iter().map(|&s| vec![None; s]).collect();
    let mut component_pmf = Vec::new();
    for (sym, v) in p.support() {
        let root = uf.find(offsets[0] + sym[0]);
        if id_of_root[root] == usize::MAX {
            id_of_root[root] = component_pmf.len();
            component_pmf.push(0.0);
        }
        let id = id_of_root[root];
        component_pmf[id] += v;
        for (a, &x) in sym.iter().enumerate() {
            component_of[a][x] = Some(id);
        }
    }
    CommonPart {
        component_of,
        component_pmf,
    }
}

/// A common-information value with the auxiliary channel that attains it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CIResult {
    pub value: f64,
    pub certified: Certification,
    pub witness: AuxChannel,
    /// `I(X_1;…;X_K | Q)` at the witness.
    pub residual: f64,
    /// The witness alphabet sits at the configured cardinality cap.
    #[serde(default)]
    pub at_cap: bool,
}

fn residual_tc(p: &JointPmf, w: &AuxChannel) -> f64 {
    let ext = p.extend(w).expect("channel matches pmf");
    let k = p.num_coords();
    let groups: Vec<Vec<usize>> = (0..k).map(|a| vec![a]).collect();
    total_correlation_groups(&ext, &groups, &[k])
}

/// `C_GK` as the entropy of the common part.
pub fn gk_common_information(p: &JointPmf) -> CIResult {
    let cp = common_part(p);
    let witness = cp.channel(p);
    CIResult {
        value: cp.entropy(),
        certified: Certification::Exact,
        residual: residual_tc(p, &witness),
        witness,
        at_cap: false,
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Resolvability {
    pub resolvable: bool,
    pub witness: AuxChannel,
    /// Residual total correlation given the common part.
    pub residual: f64,
}

/// Perfectly resolvable iff the maximal common part leaves no residual
/// total correlation.
pub fn is_perfectly_resolvable(p: &JointPmf) -> Resolvability {
    let witness = common_part(p).channel(p);
    let residual = residual_tc(p, &witness);
    Resolvability {
        resolvable: residual <= RESOLVABLE_TOL,
        witness,
        residual,
    }
}

#[derive(Debug, Clone)]
pub struct WynerOptions {
    /// Auxiliary alphabet; `None` picks `min(∏|X_a| + 2, 16)`.
    pub q_size: Option<usize>,
    /// Cardinality cap; `None` uses `∏|X_a| + 2`.
    pub cap: Option<usize>,
    pub restarts: usize,
    pub seed: u64,
    pub descent: DescentOptions,
}

impl Default for WynerOptions {
    fn default() -> Self {
        Self {
            q_size: None,
            cap: None,
            restarts: 8,
            seed: 0,
            descent: DescentOptions::default(),
        }
    }
}

/// Channels with `Δ1 = 0` by construction (`Q = X_{A∖a}`) plus the common
/// part, used as structured starts.
fn wyner_seeds(p: &JointPmf) -> Vec<AuxChannel> {
    let k = p.num_coords();
    let shape = p.shape();
    let mut seeds = Vec::new();
    for a in (0..k).rev() {
        let rest: Vec<usize> = (0..k).filter(|&b| b != a).collect();
        if rest.is_empty() {
            continue;
        }
        let size: usize = rest.iter().map(|&b| p.sizes()[b]).product();
        let labels = shape.projection(&rest);
        seeds.push(AuxChannel::deterministic(&labels, size).expect("projection in range"));
    }
    seeds.push(common_part(p).channel(p));
    seeds
}

const MAX_SPIKE_CELLS: usize = 16;

/// Channels that route a fraction of one cell's mass to a separate symbol.
/// Near independence the optimal witness is a dominant component plus a
/// light component concentrated on a few unlikely cells, which random
/// starts rarely approach.
fn spike_starts(p: &JointPmf, q_size: usize) -> Vec<AuxChannel> {
    let probs = p.probs();
    let mut cells: Vec<usize> = (0..probs.len()).filter(|&x| probs[x] > 0.0).collect();
    cells.sort_by(|&a, &b| probs[a].total_cmp(&probs[b]).then(a.cmp(&b)));
    cells.truncate(MAX_SPIKE_CELLS);
    let floor = 0.01;
    let base: Vec<f64> = (0..q_size)
        .map(|j| {
            if j == 0 {
                1.0 - floor * (q_size - 1) as f64
            } else {
                floor
            }
        })
        .collect();
    let mut out = Vec::new();
    for &cell in &cells {
        for height in [0.5, 0.1] {
            let rows = (0..probs.len())
                .map(|x| {
                    let mut row = base.clone();
                    if x == cell {
                        row[1] = height;
                        row[0] = 1.0 - height - floor * (q_size - 2) as f64;
                    }
                    row
                })
                .collect();
            out.push(AuxChannel::new(q_size, rows).expect("rows are normalized"));
        }
    }
    out
}

pub fn wyner_common_information(
    p: &JointPmf,
    q_size: usize,
    restarts: usize,
    seed: u64,
) -> Result<CIResult> {
    wyner_with(
        p,
        &WynerOptions {
            q_size: Some(q_size),
            restarts,
            seed,
            ..Default::default()
        },
    )
}

/// Minimizes `I(X_A;Q) + μ·Δ1` with μ ramped over six decades, over
/// `restarts` random starts plus structured and spike starts, and keeps the best
/// witness whose residual `Δ1` is at most [`WYNER_PENALTY_TOL`].
pub fn wyner_with(p: &JointPmf, opts: &WynerOptions) -> Result<CIResult> {
    let cap = opts.cap.unwrap_or_else(|| cardinality_bound(p));
    let q_size = opts.q_size.unwrap_or_else(|| cap.min(WYNER_DEFAULT_Q_MAX));
    if q_size == 0 {
        return Err(Error::InvalidChannel("q_size must be positive".into()));
    }
    if q_size > cap {
        return Err(Error::Cardinality {
            requested: q_size,
            cap,
        });
    }
    if opts.restarts == 0 {
        return Err(Error::InvalidOperation(
            "restarts must be at least 1".into(),
        ));
    }
    let info = forms::mutual_info_with_q(p);
    let d1 = forms::delta1(p);
    let scale = penalty_scale(p);
    let staged: Vec<_> = PENALTY_RAMP
        .iter()
        .map(|&mu| info.clone().plus(&d1.clone().scale(mu * scale)))
        .collect();
    let evals: Vec<Evaluator> = staged.iter().map(|f| Evaluator::new(p, f)).collect();
    let info_ev = Evaluator::new(p, &info);
    let d1_ev = Evaluator::new(p, &d1);

    let seeds = wyner_seeds(p);
    let mut starts = starting_points(p.len(), q_size, opts.restarts, opts.seed, &seeds);
    if q_size >= 2 {
        starts.extend(spike_starts(p, q_size));
    }
    let polish = DescentOptions {
        max_iters: opts.descent.max_iters * 5,
        tol: opts.descent.tol * 1e-2,
    };
    let mut results: Vec<(f64, f64, AuxChannel)> = starts
        .into_par_iter()
        .map(|start| {
            let mut w = start;
            for ev in &evals {
                w = descend(ev, w, &opts.descent).channel;
            }
            if d1_ev.value(&w) > WYNER_PENALTY_TOL {
                w = descend(evals.last().expect("ramp is nonempty"), w, &polish).channel;
            }
            (info_ev.value(&w), d1_ev.value(&w).max(0.0), w)
        })
        .collect();
    results.extend(seeds.iter().filter(|s| s.q_size() <= q_size).map(|s| {
        let s = s.padded(q_size);
        (info_ev.value(&s), d1_ev.value(&s).max(0.0), s)
    }));

    let best = results
        .iter()
        .filter(|r| r.1 <= WYNER_PENALTY_TOL)
        .min_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.2.tie_order(&b.2)));
    match best {
        Some((value, residual, w)) => Ok(CIResult {
            value: value.max(0.0),
            certified: Certification::Heuristic,
            witness: w.clone(),
            residual: *residual,
            at_cap: q_size == cap,
        }),
        None => Err(Error::InfeasibleWitness {
            best_penalty: results.iter().map(|r| r.1).fold(f64::INFINITY, f64::min),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag() -> JointPmf {
        JointPmf::new(vec![2, 2], vec![0.5, 0.0, 0.0, 0.5]).unwrap()
    }

    #[test]
    fn common_part_of_copy() {
        let cp = common_part(&diag());
        assert_eq!(cp.num_components(), 2);
        assert_eq!(cp.component_pmf, vec![0.5, 0.5]);
        assert!((cp.entropy() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn full_support_has_single_component() {
        let p = JointPmf::new(vec![2, 2], vec![0.4, 0.1, 0.2, 0.3]).unwrap();
        let cp = common_part(&p);
        assert_eq!(cp.num_components(), 1);
        assert_eq!(cp.entropy(), 0.0);
    }

    #[test]
    fn block_pmf_has_two_components() {
        let p = JointPmf::from_fn(vec![4, 4], |s| {
            if (s[0] < 2) == (s[1] < 2) {
                0.125
            } else {
                0.0
            }
        })
        .unwrap();
        let cp = common_part(&p);
        assert_eq!(cp.num_components(), 2);
        assert_eq!(cp.component_of[0], vec![Some(0), Some(0), Some(1), Some(1)]);
        assert!((cp.entropy() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn zero_probability_symbols_are_pruned() {
        let p = JointPmf::new(vec![3, 2], vec![0.5, 0.0, 0.0, 0.5, 0.0, 0.0]).unwrap();
        let cp = common_part(&p);
        assert_eq!(cp.pruned(0), vec![2]);
        assert_eq!(cp.component_of[0][2], None);
        assert_eq!(cp.num_components(), 2);
    }

    #[test]
    fn gk_three_parties() {
        let same = JointPmf::from_fn(vec![2, 2, 2], |s| {
            if s[0] == s[1] && s[1] == s[2] {
                0.5
            } else {
                0.0
            }
        })
        .unwrap();
        let r = gk_common_information(&same);
        assert!((r.value - 1.0).abs() < 1e-12);
        assert_eq!(r.certified, Certification::Exact);
        let indep = JointPmf::uniform(vec![2, 2, 2]).unwrap();
        assert_eq!(gk_common_information(&indep).value, 0.0);
    }

    #[test]
    fn resolvability_examples() {
        // X1 = (U1, Q), X2 = (Q, U2), all bits independent
        let trivial = JointPmf::from_fn(vec![4, 4], |s| {
            let (q1, q2) = (s[0] % 2, s[1] / 2);
            if q1 == q2 {
                1.0 / 8.0
            } else {
                0.0
            }
        })
        .unwrap();
        assert!(is_perfectly_resolvable(&trivial).resolvable);
        let noisy = JointPmf::new(vec![2, 2], vec![0.45, 0.05, 0.05, 0.45]).unwrap();
        assert!(!is_perfectly_resolvable(&noisy).resolvable);
        assert!(is_perfectly_resolvable(&diag()).resolvable);
    }

    #[test]
    fn wyner_trivial_cases() {
        let indep = JointPmf::uniform(vec![2, 2]).unwrap();
        let r = wyner_common_information(&indep, 2, 2, 1).unwrap();
        assert!(r.value < 1e-6, "{}", r.value);
        let r = wyner_common_information(&diag(), 2, 2, 1).unwrap();
        assert!((r.value - 1.0).abs() < 1e-6, "{}", r.value);
        assert!(r.residual <= WYNER_PENALTY_TOL);
    }

    #[test]
    fn wyner_rejects_oversized_alphabet() {
        let p = diag();
        assert!(matches!(
            wyner_common_information(&p, 7, 1, 0),
            Err(Error::Cardinality {
                requested: 7,
                cap: 6
            })
        ));
    }

    #[test]
    fn wyner_escapes_constant_channel_near_independence() {
        // I(X1;X2) is below 1e-6 bits, yet the optimum is far below H(X1)
        let p =
            JointPmf::new(vec![2, 2], vec![0.0216119, 0.0891134, 0.1748252, 0.7144495]).unwrap();
        let r = wyner_common_information(&p, 3, 4, 0).unwrap();
        assert!(r.residual <= WYNER_PENALTY_TOL);
        assert!(r.value < 0.01, "{}", r.value);
    }

    #[test]
    fn wyner_reports_infeasible_when_alphabet_too_small() {
        let noisy = JointPmf::new(vec![2, 2], vec![0.45, 0.05, 0.05, 0.45]).unwrap();
        assert!(matches!(
            wyner_common_information(&noisy, 1, 1, 0),
            Err(Error::InfeasibleWitness { .. })
        ));
    }
}
