//! Secure multiparty sampling against a passive t-adversary: privacy and
//! correctness verdicts, from-scratch realizability certificates, a
//! simulator for the broadcast protocol they certify, region-based
//! impossibility tests and a monotonicity regression harness.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{cardinality_bound, AuxChannel};
use crate::error::{Error, Result};
use crate::info::{cmi_coords, total_variation};
use crate::optim::restart_rng;
use crate::pmf::{JointPmf, MarginSpec};
use crate::region::{
    intercept_delta1, region_approx, region_included, scale_region, Direction, Inclusion,
    InclusionVerdict, RegionOptions,
};
use crate::resolvability::common_part;

/// Largest party count handled; coalition enumeration is exhaustive.
pub const MAX_PARTIES: usize = 6;
/// Tolerance on exact conditional-independence and leakage conditions.
pub const INDEPENDENCE_TOL: f64 = 1e-9;
/// Support increases beyond this (plus the caller's margin) are regressions.
pub const REGRESSION_TOL: f64 = 1e-4;

fn check_parties(k: usize) -> Result<()> {
    if !(2..=MAX_PARTIES).contains(&k) {
        return Err(Error::Dimension(format!(
            "{k} parties; between 2 and {MAX_PARTIES} are supported"
        )));
    }
    Ok(())
}

fn check_threshold(t: usize, k: usize) -> Result<()> {
    if t == 0 || t >= k {
        return Err(Error::InvalidThreshold { t, parties: k });
    }
    Ok(())
}

/// Nonempty subsets of `0..k` with at most `t` members, by size then
/// lexicographically.
pub fn coalitions(k: usize, t: usize) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = (1u32..(1 << k))
        .filter(|m| m.count_ones() as usize <= t)
        .map(|m| (0..k).filter(|&i| m & (1 << i) != 0).collect())
        .collect();
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    out
}

fn complement(k: usize, set: &[usize]) -> Vec<usize> {
    (0..k).filter(|i| !set.contains(i)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoalitionLeakage {
    pub coalition: Vec<usize>,
    /// `I(V_T; Ŷ_{A∖T} | Ŷ_T)`.
    pub leakage_bits: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrivacyVerdict {
    pub t: usize,
    /// Sum of leakages over all coalitions of size at most `t`.
    pub delta_total: f64,
    /// Largest single-coalition leakage.
    pub delta_max: f64,
    /// Total variation from the output marginal to the target.
    pub epsilon: f64,
    pub per_coalition: Vec<CoalitionLeakage>,
}

/// Where outputs and views live in a joint pmf. `outputs[i]` is the
/// coordinate of `Ŷ_i`; `views[i]` lists the coordinates making up `V_i`,
/// which may include output coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ViewLayout {
    pub outputs: Vec<usize>,
    pub views: Vec<Vec<usize>>,
}

impl ViewLayout {
    pub fn new(outputs: Vec<usize>, views: Vec<Vec<usize>>) -> Self {
        Self { outputs, views }
    }

    /// `K` output coordinates followed by one view coordinate per party.
    pub fn outputs_then_views(k: usize) -> Self {
        Self {
            outputs: (0..k).collect(),
            views: (k..2 * k).map(|c| vec![c]).collect(),
        }
    }

    pub fn parties(&self) -> usize {
        self.outputs.len()
    }

    fn validate(&self, p: &JointPmf) -> Result<()> {
        let n = p.num_coords();
        if self.views.len() != self.outputs.len() {
            return Err(Error::InvalidMarginSpec(format!(
                "{} outputs but {} views",
                self.outputs.len(),
                self.views.len()
            )));
        }
        MarginSpec::new(self.outputs.clone())?.check(n)?;
        if let Some(c) = self.views.iter().flatten().find(|&&c| c >= n) {
            return Err(Error::InvalidMarginSpec(format!(
                "view coordinate {c} out of range"
            )));
        }
        Ok(())
    }
}

/// Exact (δ, t)-privacy and ε-correctness of a joint over outputs and views.
pub fn privacy_check(
    p: &JointPmf,
    layout: &ViewLayout,
    t: usize,
    target: &JointPmf,
) -> Result<PrivacyVerdict> {
    layout.validate(p)?;
    let k = layout.parties();
    check_parties(k)?;
    check_threshold(t, k)?;
    let outputs = p.marginal(&MarginSpec::new(layout.outputs.clone())?)?;
    let epsilon = total_variation(&outputs, target)?;
    let per_coalition: Vec<CoalitionLeakage> = coalitions(k, t)
        .into_par_iter()
        .map(|coalition| {
            let views: Vec<usize> = coalition
                .iter()
                .flat_map(|&i| layout.views[i].iter().copied())
                .collect();
            let own: Vec<usize> = coalition.iter().map(|&i| layout.outputs[i]).collect();
            let rest: Vec<usize> = complement(k, &coalition)
                .iter()
                .map(|&i| layout.outputs[i])
                .collect();
            let leakage_bits = cmi_coords(p, &views, &rest, &own).max(0.0);
            CoalitionLeakage {
                coalition,
                leakage_bits,
            }
        })
        .collect();
    Ok(PrivacyVerdict {
        t,
        delta_total: per_coalition.iter().map(|c| c.leakage_bits).sum(),
        delta_max: per_coalition
            .iter()
            .map(|c| c.leakage_bits)
            .fold(0.0, f64::max),
        epsilon: epsilon.clamp(0.0, 1.0),
        per_coalition,
    })
}

/// `Σ_{|T| ≤ t} I(Ŷ_{A∖T}; Q | Ŷ_T)` for a joint whose last coordinate is Q.
pub fn broadcast_leakage(joint: &JointPmf, t: usize) -> f64 {
    let k = joint.num_coords() - 1;
    coalitions(k, t)
        .iter()
        .map(|c| cmi_coords(joint, &complement(k, c), &[k], c).max(0.0))
        .sum()
}

/// `max_i I(Ŷ_{A∖i}; Ŷ_i | Q)` for a joint whose last coordinate is Q.
pub fn conditional_dependence(joint: &JointPmf) -> f64 {
    let k = joint.num_coords() - 1;
    (0..k)
        .map(|i| cmi_coords(joint, &complement(k, &[i]), &[i], &[k]).max(0.0))
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScratchConditions {
    /// `TV(p_Y, p_Ŷ) ≤ ε`.
    pub tv_bound: bool,
    /// `Σ_{|T| ≤ t} I(Ŷ_{A∖T}; Q | Ŷ_T) ≤ δ`.
    pub leakage_bound: bool,
    /// `I(Ŷ_{A∖i}; Ŷ_i | Q) = 0` for every party.
    pub conditional_independence: bool,
}

impl ScratchConditions {
    pub fn all(&self) -> bool {
        self.tv_bound && self.leakage_bound && self.conditional_independence
    }
}

/// Witness that a target can (or cannot) be sampled from scratch by the
/// broadcast protocol: one party samples `(Ŷ_i, Q)`, announces `Q`, and the
/// others sample their outputs given `Q`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScratchCertificate {
    pub t: usize,
    pub target: JointPmf,
    /// Joint over `(Ŷ_1, …, Ŷ_K, Q)`.
    pub joint: JointPmf,
    /// `p_{Q|Ŷ_A}`.
    pub channel: AuxChannel,
    pub epsilon: f64,
    pub delta: f64,
    pub tv: f64,
    pub leakage: f64,
    pub dependence: f64,
    pub conditions: ScratchConditions,
    pub realizable: bool,
}

fn certify(
    joint: JointPmf,
    target: JointPmf,
    t: usize,
    epsilon: f64,
    delta: f64,
) -> Result<ScratchCertificate> {
    let k = target.num_coords();
    if joint.num_coords() != k + 1 || joint.sizes()[..k] != *target.sizes() {
        return Err(Error::Dimension(
            "joint must hold the target's outputs followed by one auxiliary coordinate".into(),
        ));
    }
    check_parties(k)?;
    check_threshold(t, k)?;
    if !(epsilon >= 0.0 && delta >= 0.0) {
        return Err(Error::InvalidOperation(
            "epsilon and delta must be nonnegative".into(),
        ));
    }
    let outputs = joint.marginal(&MarginSpec::range(k))?;
    let tv = total_variation(&outputs, &target)?;
    let leakage = broadcast_leakage(&joint, t);
    let dependence = conditional_dependence(&joint);
    let conditions = ScratchConditions {
        tv_bound: tv <= epsilon + 1e-12,
        leakage_bound: leakage <= delta + INDEPENDENCE_TOL,
        conditional_independence: dependence <= INDEPENDENCE_TOL,
    };
    Ok(ScratchCertificate {
        t,
        channel: AuxChannel::conditional_of_last(&joint),
        target,
        joint,
        epsilon,
        delta,
        tv,
        leakage,
        dependence,
        realizable: conditions.all(),
        conditions,
    })
}

/// Perfect realizability from scratch, decided with `Q` set to the maximal
/// common part: every admissible `Q` is a coarsening of it, and a coarser
/// `Q` can only leave more dependence.
pub fn scratch_characterization_perfect(p: &JointPmf, t: usize) -> Result<ScratchCertificate> {
    let joint = p.extend(&common_part(p).channel(p))?;
    certify(joint, p.clone(), t, 0.0, 0.0)
}

/// Statistical realizability of `target` given a candidate joint over
/// `(Ŷ_A, Q)` with `Q` last.
pub fn scratch_check_statistical(
    p_hat: &JointPmf,
    target: &JointPmf,
    t: usize,
    epsilon: f64,
    delta: f64,
) -> Result<ScratchCertificate> {
    certify(p_hat.clone(), target.clone(), t, epsilon, delta)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Simulation {
    pub samples: usize,
    pub seed: u64,
    pub initiator: usize,
    /// Empirical output pmf.
    pub empirical: JointPmf,
    pub empirical_tv: f64,
    /// Exact joint of outputs and broadcast induced by the protocol.
    pub induced: JointPmf,
    /// Exact privacy of the induced views `V_j = (Ŷ_j, Q)`.
    pub privacy: PrivacyVerdict,
    /// Broadcast leakage sum evaluated on the induced joint.
    pub broadcast_leakage: f64,
    pub certificate_leakage: f64,
}

/// Runs the broadcast protocol `n_samples` times. Each party draws from its
/// own random stream derived from `seed`.
pub fn simulate_pi_s(
    cert: &ScratchCertificate,
    initiator: usize,
    n_samples: usize,
    seed: u64,
) -> Result<Simulation> {
    if !cert.realizable {
        return Err(Error::Certificate(
            "certificate does not establish realizability".into(),
        ));
    }
    let joint = &cert.joint;
    let k = joint.num_coords() - 1;
    if initiator >= k {
        return Err(Error::InvalidAxis {
            axis: initiator,
            parties: k,
        });
    }
    if n_samples == 0 {
        return Err(Error::InvalidOperation(
            "at least one sample is required".into(),
        ));
    }
    let sizes = joint.sizes();
    let qn = sizes[k];
    let pq = joint.marginal_probs(&[k]);
    let pair: Vec<Vec<f64>> = (0..k).map(|j| joint.marginal_probs(&[j, k])).collect();
    let weighted =
        |w: Vec<f64>| WeightedIndex::new(w).map_err(|e| Error::InvalidPmf(e.to_string()));

    let first = weighted(pair[initiator].clone())?;
    let mut given_q: Vec<Vec<Option<WeightedIndex<f64>>>> = Vec::with_capacity(k);
    for (j, m) in pair.iter().enumerate() {
        let per_q = (0..qn)
            .map(|q| {
                if j == initiator || pq[q] <= 0.0 {
                    return Ok(None);
                }
                weighted((0..sizes[j]).map(|y| m[y * qn + q]).collect()).map(Some)
            })
            .collect::<Result<Vec<_>>>()?;
        given_q.push(per_q);
    }

    let out_shape = crate::pmf::Shape::new(&sizes[..k]);
    let mut rngs: Vec<_> = (0..k as u64).map(|j| restart_rng(seed, j)).collect();
    let mut counts = vec![0.0; out_shape.len()];
    let mut sym = vec![0; k];
    for _ in 0..n_samples {
        let draw = first.sample(&mut rngs[initiator]);
        let q = draw % qn;
        sym[initiator] = draw / qn;
        for j in (0..k).filter(|&j| j != initiator) {
            let dist = given_q[j][q]
                .as_ref()
                .expect("broadcast value has positive probability");
            sym[j] = dist.sample(&mut rngs[j]);
        }
        counts[out_shape.ravel(&sym)] += 1.0;
    }
    let empirical = JointPmf::from_weights(sizes[..k].to_vec(), counts)?;
    let empirical_tv = total_variation(&empirical, &cert.target)?;

    let induced = JointPmf::from_fn(sizes.to_vec(), |s| {
        let q = s[k];
        if pq[q] <= 0.0 {
            return 0.0;
        }
        (0..k).fold(pq[q], |acc, j| acc * pair[j][s[j] * qn + q] / pq[q])
    })?;
    let layout = ViewLayout::new((0..k).collect(), (0..k).map(|j| vec![j, k]).collect());
    let privacy = privacy_check(&induced, &layout, cert.t, &cert.target)?;
    Ok(Simulation {
        samples: n_samples,
        seed,
        initiator,
        empirical,
        empirical_tv,
        broadcast_leakage: broadcast_leakage(&induced, cert.t),
        certificate_leakage: cert.leakage,
        induced,
        privacy,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityReport {
    pub n: u32,
    pub m: u32,
    pub verdict: InclusionVerdict,
    /// True when `n·T(setup) ⊄ m·T(target)` was established, which rules
    /// out the reduction.
    pub impossible: bool,
    pub inclusion: Inclusion,
}

/// Tests the necessary condition `n·T(setup) ⊆ m·T(target)` for securely
/// sampling `m` copies of `target` from `n` copies of `setup`.
pub fn feasibility_test(
    setup: &JointPmf,
    target: &JointPmf,
    n: u32,
    m: u32,
    directions: &[Direction],
    opts: &RegionOptions,
    tolerance: f64,
) -> Result<FeasibilityReport> {
    if setup.num_coords() != target.num_coords() {
        return Err(Error::Dimension(format!(
            "setup has {} parties, target has {}",
            setup.num_coords(),
            target.num_coords()
        )));
    }
    let inner = scale_region(&region_approx(setup, directions, opts)?, n)?;
    let outer = scale_region(&region_approx(target, directions, opts)?, m)?;
    let inclusion = region_included(&inner, &outer, tolerance)?;
    Ok(FeasibilityReport {
        n,
        m,
        verdict: inclusion.verdict,
        impossible: inclusion.verdict == InclusionVerdict::NotIncluded,
        inclusion,
    })
}

/// Operations under which the region may only grow.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum MonotoneOp {
    /// Party `party` passes its variable through `channel` and keeps both.
    LocalOperation { party: usize, channel: AuxChannel },
    /// Party `party` announces `function[x]` of its variable to everyone.
    PublicAnnouncement { party: usize, function: Vec<usize> },
    /// Every party `a` outputs `Ŷ_a ~ outputs[a](·|X_a)`; the coalition
    /// keeps its views `V_a = X_a`. The region of the outputs is compared
    /// with that of the coalition's (output, view) pairs shifted by
    /// `delta_t`, which defaults to the exact leakage
    /// `I(V_T; Ŷ_{A∖T} | Ŷ_T)`.
    SecureOutputMap {
        coalition: Vec<usize>,
        outputs: Vec<AuxChannel>,
        #[serde(default)]
        delta_t: Option<f64>,
    },
}

impl MonotoneOp {
    pub fn name(&self) -> &'static str {
        match self {
            MonotoneOp::LocalOperation { .. } => "local_operation",
            MonotoneOp::PublicAnnouncement { .. } => "public_announcement",
            MonotoneOp::SecureOutputMap { .. } => "secure_output_map",
        }
    }
}

/// A joint pmf from which both sides of a monotonicity claim are read off
/// by grouping coordinates.
struct Lift {
    joint: JointPmf,
    before: Vec<Vec<usize>>,
    after: Vec<Vec<usize>>,
    /// Coordinates appended to the induced auxiliary variable on the after side.
    announce: Vec<usize>,
    slack: f64,
}

fn party_check(party: usize, k: usize) -> Result<()> {
    if party >= k {
        return Err(Error::InvalidOperation(format!(
            "party {party} out of range for {k} parties"
        )));
    }
    Ok(())
}

fn singletons(k: usize) -> Vec<Vec<usize>> {
    (0..k).map(|a| vec![a]).collect()
}

fn lift(p: &JointPmf, op: &MonotoneOp) -> Result<Lift> {
    let k = p.num_coords();
    let mut sizes = p.sizes().to_vec();
    match op {
        MonotoneOp::LocalOperation { party, channel } => {
            party_check(*party, k)?;
            if channel.num_rows() != sizes[*party] {
                return Err(Error::InvalidOperation(format!(
                    "channel has {} rows, party {party} has {} symbols",
                    channel.num_rows(),
                    sizes[*party]
                )));
            }
            sizes.push(channel.q_size());
            let joint =
                JointPmf::from_fn(sizes, |s| p.prob(&s[..k]) * channel.get(s[*party], s[k]))?;
            let mut after = singletons(k);
            after[*party].push(k);
            Ok(Lift {
                joint,
                before: singletons(k),
                after,
                announce: Vec::new(),
                slack: 0.0,
            })
        }
        MonotoneOp::PublicAnnouncement { party, function } => {
            party_check(*party, k)?;
            if function.len() != sizes[*party] {
                return Err(Error::InvalidOperation(format!(
                    "announcement has {} entries, party {party} has {} symbols",
                    function.len(),
                    sizes[*party]
                )));
            }
            let m = function.iter().max().map_or(1, |v| v + 1);
            sizes.push(m);
            let joint = JointPmf::from_fn(sizes, |s| {
                if function[s[*party]] == s[k] {
                    p.prob(&s[..k])
                } else {
                    0.0
                }
            })?;
            let after = (0..k)
                .map(|a| if a == *party { vec![a] } else { vec![a, k] })
                .collect();
            Ok(Lift {
                joint,
                before: singletons(k),
                after,
                announce: vec![k],
                slack: 0.0,
            })
        }
        MonotoneOp::SecureOutputMap {
            coalition,
            outputs,
            delta_t,
        } => {
            let mut sorted = coalition.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if sorted.is_empty() || sorted.len() != coalition.len() || sorted.len() >= k {
                return Err(Error::InvalidOperation(
                    "coalition must be a nonempty proper subset of distinct parties".into(),
                ));
            }
            for &a in &sorted {
                party_check(a, k)?;
            }
            if outputs.len() != k || outputs.iter().zip(&sizes).any(|(w, &s)| w.num_rows() != s) {
                return Err(Error::InvalidOperation(
                    "one output channel per party, with one row per symbol".into(),
                ));
            }
            sizes.extend(outputs.iter().map(AuxChannel::q_size));
            let joint = JointPmf::from_fn(sizes, |s| {
                (0..k).fold(p.prob(&s[..k]), |acc, a| {
                    acc * outputs[a].get(s[a], s[k + a])
                })
            })?;
            let own: Vec<usize> = sorted.iter().map(|&a| k + a).collect();
            let rest: Vec<usize> = complement(k, &sorted).iter().map(|&a| k + a).collect();
            let leakage = cmi_coords(&joint, &sorted, &rest, &own).max(0.0);
            let slack = match delta_t {
                Some(d) if *d < leakage - INDEPENDENCE_TOL => {
                    return Err(Error::Precondition(format!(
                        "coalition leakage {leakage} exceeds the supplied bound {d}"
                    )))
                }
                Some(d) => *d,
                None => leakage,
            };
            let before = (0..k)
                .map(|a| {
                    if sorted.contains(&a) {
                        vec![k + a, a]
                    } else {
                        vec![k + a]
                    }
                })
                .collect();
            Ok(Lift {
                joint,
                before,
                after: (0..k).map(|a| vec![k + a]).collect(),
                announce: Vec::new(),
                slack,
            })
        }
    }
}

/// Maps channels on the before side to the channels they induce on the
/// after side, `p(q'|a) = Σ_l p(l|a)·p(q|b(l))`, with announced
/// coordinates appended to `q`.
struct Inducer {
    probs: Vec<f64>,
    before_idx: Vec<usize>,
    after_idx: Vec<usize>,
    extra_idx: Vec<usize>,
    extra_size: usize,
    after_len: usize,
}

impl Inducer {
    fn new(l: &Lift) -> Self {
        let shape = l.joint.shape();
        let flat = |g: &[Vec<usize>]| -> Vec<usize> { g.iter().flatten().copied().collect() };
        let after_order = flat(&l.after);
        Self {
            probs: l.joint.probs().to_vec(),
            before_idx: shape.projection(&flat(&l.before)),
            after_idx: shape.projection(&after_order),
            extra_idx: if l.announce.is_empty() {
                vec![0; shape.len()]
            } else {
                shape.projection(&l.announce)
            },
            extra_size: l.announce.iter().map(|&c| l.joint.sizes()[c]).product(),
            after_len: after_order.iter().map(|&c| l.joint.sizes()[c]).product(),
        }
    }

    fn induce(&self, w: &AuxChannel) -> AuxChannel {
        let q = w.q_size();
        let width = q * self.extra_size;
        let mut data = vec![0.0; self.after_len * width];
        for (l, &pl) in self.probs.iter().enumerate() {
            if pl <= 0.0 {
                continue;
            }
            let row = &mut data[self.after_idx[l] * width..(self.after_idx[l] + 1) * width];
            for (qi, &wq) in w.row(self.before_idx[l]).iter().enumerate() {
                row[qi * self.extra_size + self.extra_idx[l]] += pl * wq;
            }
        }
        for row in data.chunks_mut(width) {
            let s: f64 = row.iter().sum();
            if s > 0.0 {
                row.iter_mut().for_each(|v| *v /= s);
            } else {
                row.iter_mut().for_each(|v| *v = 1.0 / width as f64);
            }
        }
        AuxChannel::from_flat(width, data).expect("rows are normalized")
    }
}

#[derive(Debug, Clone)]
pub struct HarnessOptions {
    pub region: RegionOptions,
    /// Optimizer margin added to [`REGRESSION_TOL`] before flagging.
    pub margin: f64,
}

impl Default for HarnessOptions {
    fn default() -> Self {
        Self {
            region: RegionOptions::default(),
            margin: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectionCheck {
    pub direction: Direction,
    pub before: f64,
    pub after: f64,
    /// `after − before − slack`.
    pub violation: f64,
    pub flagged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonotonicityReport {
    pub op: String,
    /// Uniform shift allowed on every coordinate.
    pub slack: f64,
    pub threshold: f64,
    pub checks: Vec<DirectionCheck>,
    pub max_violation: f64,
    pub regressions: usize,
}

/// Checks `h_after(λ) ≤ h_before(λ) + slack` on every direction, i.e. that
/// the region did not shrink. Before-side witnesses are carried over to the
/// after side through the channels they induce, so a flagged direction
/// points at a failure of the monotonicity argument rather than at optimizer
/// noise. A requested `q_size` above a side's cardinality bound is lowered
/// to that bound.
pub fn monotonicity_harness(
    p: &JointPmf,
    op: &MonotoneOp,
    directions: &[Direction],
    opts: &HarnessOptions,
) -> Result<MonotonicityReport> {
    let l = lift(p, op)?;
    let before = l.joint.group(&l.before)?;
    let after = l.joint.group(&l.after)?;
    let side_opts = |pmf: &JointPmf| RegionOptions {
        q_size: opts.region.q_size.map(|q| q.min(cardinality_bound(pmf))),
        ..opts.region.clone()
    };
    let r_before = region_approx(&before, directions, &side_opts(&before))?;
    let mut r_after = region_approx(&after, directions, &side_opts(&after))?;
    let inducer = Inducer::new(&l);
    let carried: Vec<AuxChannel> = r_before
        .samples
        .iter()
        .filter_map(|s| s.witness.as_ref())
        .map(|w| inducer.induce(w))
        .collect();
    r_after.absorb_witnesses(&after, &carried)?;

    let threshold = REGRESSION_TOL + opts.margin;
    let checks: Vec<DirectionCheck> = r_before
        .samples
        .iter()
        .zip(&r_after.samples)
        .map(|(b, a)| {
            let violation = a.value - b.value - l.slack * b.direction.weights().iter().sum::<f64>();
            DirectionCheck {
                direction: b.direction.clone(),
                before: b.value,
                after: a.value,
                violation,
                flagged: violation > threshold,
            }
        })
        .collect();
    Ok(MonotonicityReport {
        op: op.name().to_string(),
        slack: l.slack,
        threshold,
        max_violation: checks
            .iter()
            .map(|c| c.violation)
            .fold(f64::NEG_INFINITY, f64::max),
        regressions: checks.iter().filter(|c| c.flagged).count(),
        checks,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DpiReport {
    /// `I(V_i; Y_{A∖i} | Y_i)` per party.
    pub markov_residuals: Vec<f64>,
    /// Residual total correlation of `Y_A`.
    pub lhs: f64,
    /// Residual total correlation of `(V_1 Y_1, …, V_K Y_K)`.
    pub rhs: f64,
    pub holds: bool,
}

/// Compares residual total correlations of `Y_A` and `(V_a Y_a)_a` for a
/// joint laid out as `(Y_1, …, Y_K, V_1, …, V_K)` with each `V_i − Y_i −
/// Y_{A∖i}` Markov.
pub fn residual_total_correlation_dpi_check(p_joint: &JointPmf) -> Result<DpiReport> {
    let n = p_joint.num_coords();
    if n < 4 || !n.is_multiple_of(2) {
        return Err(Error::Dimension(format!(
            "expected (Y_1..Y_K, V_1..V_K) with K ≥ 2, got {n} coordinates"
        )));
    }
    let k = n / 2;
    let markov_residuals: Vec<f64> = (0..k)
        .map(|i| cmi_coords(p_joint, &[k + i], &complement(k, &[i]), &[i]).max(0.0))
        .collect();
    if let Some((i, r)) = markov_residuals
        .iter()
        .enumerate()
        .find(|(_, &r)| r > INDEPENDENCE_TOL)
    {
        return Err(Error::Precondition(format!(
            "V_{i} is not conditionally independent of the other outputs given Y_{i} (residual {r})"
        )));
    }
    let value = |pmf: &JointPmf| {
        intercept_delta1(pmf)
            .value
            .value()
            .expect("always attained")
    };
    let lhs = value(&p_joint.marginal(&MarginSpec::range(k))?);
    let rhs = value(&p_joint.group(&(0..k).map(|i| vec![k + i, i]).collect::<Vec<_>>())?);
    Ok(DpiReport {
        markov_residuals,
        holds: lhs <= rhs + INDEPENDENCE_TOL,
        lhs,
        rhs,
    })
}
