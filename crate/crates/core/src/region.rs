//! The assisted residual information region `T(X_A)` and its 2K-dimensional
//! counterpart, represented by lower support-function samples.
//!
//! A region is the increasing hull of achievable tuples. For a direction
//! `λ ≥ 0` the lower support value is `h(λ) = min_W λ·point(W)`; a
//! [`RegionApprox`] stores heuristic minima (upper bounds on `h`) together
//! with the achieving points, which are certified members of the region.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{cardinality_bound, AuxChannel};
use crate::error::{Error, Result};
use crate::functional::{forms, EntropyForm, Evaluator};
use crate::gray_wyner::inefficiencies;
use crate::info::{cmi_coords, entropy_coords, total_correlation_groups};
use crate::optim::{minimize, DescentOptions};
use crate::partition::{block_count, Partitions, BELL_GUARD};
use crate::pmf::{JointPmf, MarginSpec};
use crate::resolvability::{common_part, is_perfectly_resolvable, Certification, RESOLVABLE_TOL};

/// Guard on the default region alphabet.
pub const REGION_DEFAULT_Q_MAX: usize = 12;
/// Default number of lattice directions added to the axes.
pub const DEFAULT_LATTICE_DIRECTIONS: usize = 50;

const SNAP: f64 = 1e-12;

fn snap(v: f64) -> f64 {
    if v.abs() <= SNAP {
        0.0
    } else {
        v.max(0.0)
    }
}

/// `({Δ2a}_a, Δ1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionPoint {
    pub delta2: Vec<f64>,
    pub delta1: f64,
}

impl RegionPoint {
    /// Coordinates in region order: `Δ21, …, Δ2K, Δ1`.
    pub fn coords(&self) -> Vec<f64> {
        let mut c = self.delta2.clone();
        c.push(self.delta1);
        c
    }

    pub fn from_coords(c: &[f64]) -> Self {
        let (d1, d2) = c.split_last().expect("nonempty coordinates");
        Self {
            delta2: d2.to_vec(),
            delta1: *d1,
        }
    }
}

pub fn region_point_for_channel(p: &JointPmf, w: &AuxChannel) -> Result<RegionPoint> {
    let i = inefficiencies(p, w)?;
    Ok(RegionPoint {
        delta2: i.delta2a.into_iter().map(snap).collect(),
        delta1: snap(i.delta1),
    })
}

/// Nonnegative scalarization weights with unit L1 norm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Direction(Vec<f64>);

impl TryFrom<Vec<f64>> for Direction {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Direction::new(v)
    }
}

impl From<Direction> for Vec<f64> {
    fn from(d: Direction) -> Self {
        d.0
    }
}

impl Direction {
    pub fn new(lambda: Vec<f64>) -> Result<Self> {
        if lambda.is_empty() {
            return Err(Error::InvalidDirection("empty direction".into()));
        }
        if lambda.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidDirection(format!(
                "negative or non-finite weight in {lambda:?}"
            )));
        }
        let s: f64 = lambda.iter().sum();
        if s <= 0.0 {
            return Err(Error::InvalidDirection("all weights are zero".into()));
        }
        Ok(Self(lambda.into_iter().map(|v| v / s).collect()))
    }

    pub fn axis(dim: usize, i: usize) -> Self {
        let mut v = vec![0.0; dim];
        v[i] = 1.0;
        Self(v)
    }

    pub fn weights(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn dot(&self, x: &[f64]) -> f64 {
        self.0.iter().zip(x).map(|(a, b)| a * b).sum()
    }

    fn same_as(&self, other: &Direction) -> bool {
        self.0.len() == other.0.len()
            && self
                .0
                .iter()
                .zip(&other.0)
                .all(|(a, b)| (a - b).abs() <= 1e-12)
    }
}

/// Positive root of `x^(s+1) = x + 1`, the generalized golden ratio.
fn generalized_golden_ratio(s: usize) -> f64 {
    let mut x: f64 = 2.0;
    for _ in 0..60 {
        x = (1.0 + x).powf(1.0 / (s as f64 + 1.0));
    }
    x
}

/// `count` directions on the nonnegative unit-L1 simplex from a Kronecker
/// lattice with generalized-golden-ratio increments (the Fibonacci lattice
/// for three coordinates), mapped to the simplex by sorted spacings.
pub fn lattice_directions(dim: usize, count: usize) -> Vec<Direction> {
    if dim == 1 {
        return vec![Direction::axis(1, 0); count.min(1)];
    }
    let s = dim - 1;
    let g = generalized_golden_ratio(s);
    let alpha: Vec<f64> = (1..=s).map(|i| g.powi(-(i as i32))).collect();
    (1..=count)
        .map(|n| {
            let mut u: Vec<f64> = alpha.iter().map(|a| (0.5 + n as f64 * a).fract()).collect();
            u.sort_by(f64::total_cmp);
            let mut w = Vec::with_capacity(dim);
            let mut prev = 0.0;
            for v in u {
                w.push(v - prev);
                prev = v;
            }
            w.push(1.0 - prev);
            Direction::new(w).expect("spacings are nonnegative and sum to 1")
        })
        .collect()
}

/// The coordinate axes followed by `lattice` lattice directions.
pub fn default_directions(dim: usize, lattice: usize) -> Vec<Direction> {
    let mut d: Vec<Direction> = (0..dim).map(|i| Direction::axis(dim, i)).collect();
    d.extend(lattice_directions(dim, lattice));
    d
}

/// Which coordinate map a region uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegionKind {
    /// `({I(X_{A∖a};Q|X_a)}_a, I(X_1;…;X_K|Q))`, dimension K+1.
    Ari,
    /// `({I(Y_{A∖i};Y_i|Q)}_i, {I(Y_{A∖i};Q|Y_i)}_i)`, dimension 2K.
    TwoK,
}

impl RegionKind {
    pub fn dimension(self, parties: usize) -> usize {
        match self {
            RegionKind::Ari => parties + 1,
            RegionKind::TwoK => 2 * parties,
        }
    }

    fn coordinate_forms(self, p: &JointPmf) -> Vec<EntropyForm> {
        let k = p.num_coords();
        match self {
            RegionKind::Ari => (0..k)
                .map(|a| forms::delta2(p, a))
                .chain(std::iter::once(forms::delta1(p)))
                .collect(),
            RegionKind::TwoK => (0..k)
                .map(|i| forms::pairwise_residual(p, i))
                .chain((0..k).map(|i| forms::delta2(p, i)))
                .collect(),
        }
    }

    /// Region coordinates of a channel, evaluated through extended-pmf
    /// entropies (independent of the optimizer's evaluator).
    pub fn point(self, p: &JointPmf, w: &AuxChannel) -> Result<Vec<f64>> {
        match self {
            RegionKind::Ari => Ok(region_point_for_channel(p, w)?.coords()),
            RegionKind::TwoK => {
                if w.num_rows() != p.len() {
                    return Err(Error::Dimension("channel does not match pmf".into()));
                }
                let ext = p.extend(w)?;
                let k = p.num_coords();
                let rest = |i: usize| -> Vec<usize> { (0..k).filter(|&b| b != i).collect() };
                let mut c: Vec<f64> = (0..k)
                    .map(|i| snap(cmi_coords(&ext, &rest(i), &[i], &[k])))
                    .collect();
                c.extend((0..k).map(|i| snap(cmi_coords(&ext, &rest(i), &[k], &[i]))));
                Ok(c)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SupportSample {
    pub direction: Direction,
    /// Best value found for `λ·x`; an upper bound on the true support.
    pub value: f64,
    /// The region point achieving `value`.
    pub point: Vec<f64>,
    /// Channel achieving `point`, when one exists (not after region algebra).
    pub witness: Option<AuxChannel>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionMeta {
    pub q_size: usize,
    pub restarts: usize,
    pub seed: u64,
    /// `∏|X_a| + 2`.
    pub cardinality_bound: usize,
    /// Minkowski multiplier applied to the computed region.
    pub scale: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RegionFile", into = "RegionFile")]
pub struct RegionApprox {
    pub kind: RegionKind,
    pub dimension: usize,
    pub samples: Vec<SupportSample>,
    /// Exact origin membership, when known.
    pub contains_origin: Option<bool>,
    pub meta: RegionMeta,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct RegionFile {
    kind: RegionKind,
    dimension: usize,
    directions: Vec<Direction>,
    supports: Vec<f64>,
    points: Vec<Vec<f64>>,
    witnesses: Vec<Option<AuxChannel>>,
    contains_origin: Option<bool>,
    meta: RegionMeta,
}

impl TryFrom<RegionFile> for RegionApprox {
    type Error = Error;
    fn try_from(f: RegionFile) -> Result<Self> {
        let n = f.directions.len();
        if f.supports.len() != n || f.points.len() != n || f.witnesses.len() != n {
            return Err(Error::Dimension(
                "region file columns have different lengths".into(),
            ));
        }
        if f.directions.iter().any(|d| d.dim() != f.dimension)
            || f.points.iter().any(|x| x.len() != f.dimension)
        {
            return Err(Error::Dimension(
                "region file entries do not match its dimension".into(),
            ));
        }
        let samples = f
            .directions
            .into_iter()
            .zip(f.supports)
            .zip(f.points)
            .zip(f.witnesses)
            .map(|(((direction, value), point), witness)| SupportSample {
                direction,
                value,
                point,
                witness,
            })
            .collect();
        Ok(RegionApprox {
            kind: f.kind,
            dimension: f.dimension,
            samples,
            contains_origin: f.contains_origin,
            meta: f.meta,
        })
    }
}

impl From<RegionApprox> for RegionFile {
    fn from(r: RegionApprox) -> Self {
        let mut f = RegionFile {
            kind: r.kind,
            dimension: r.dimension,
            directions: Vec::new(),
            supports: Vec::new(),
            points: Vec::new(),
            witnesses: Vec::new(),
            contains_origin: r.contains_origin,
            meta: r.meta,
        };
        for s in r.samples {
            f.directions.push(s.direction);
            f.supports.push(s.value);
            f.points.push(s.point);
            f.witnesses.push(s.witness);
        }
        f
    }
}

impl RegionApprox {
    pub fn directions(&self) -> impl Iterator<Item = &Direction> {
        self.samples.iter().map(|s| &s.direction)
    }

    pub fn supports(&self) -> impl Iterator<Item = f64> + '_ {
        self.samples.iter().map(|s| s.value)
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.samples.iter().map(|s| s.point.as_slice())
    }

    /// Best known upper bound on `h(λ)`: the stored value for `λ` if
    /// sampled, improved by every stored point.
    pub fn support_estimate(&self, d: &Direction) -> f64 {
        let stored = self
            .samples
            .iter()
            .filter(|s| s.direction.same_as(d))
            .map(|s| s.value)
            .fold(f64::INFINITY, f64::min);
        self.points().map(|x| d.dot(x)).fold(stored, f64::min)
    }

    /// Lowers stored supports with the points of extra candidate channels.
    pub fn absorb_witnesses(&mut self, p: &JointPmf, channels: &[AuxChannel]) -> Result<()> {
        for w in channels {
            let x = self.kind.point(p, w)?;
            for s in &mut self.samples {
                let v = s.direction.dot(&x);
                if v < s.value {
                    s.value = v;
                    s.point = x.clone();
                    s.witness = Some(w.clone());
                }
            }
        }
        Ok(())
    }

    /// One CSV row per direction: index, weights, support, achieving point.
    pub fn to_csv(&self) -> String {
        let d = self.dimension;
        let mut out = String::from("index");
        for i in 0..d {
            out.push_str(&format!(",lambda_{i}"));
        }
        out.push_str(",support");
        for i in 0..d {
            out.push_str(&format!(",x_{i}"));
        }
        out.push('\n');
        for (n, s) in self.samples.iter().enumerate() {
            out.push_str(&n.to_string());
            for v in s
                .direction
                .weights()
                .iter()
                .chain([s.value].iter())
                .chain(&s.point)
            {
                out.push_str(&format!(",{}", fmt_sig(*v)));
            }
            out.push('\n');
        }
        out
    }
}

/// Nine significant digits, shortest round-trip representation.
pub fn fmt_sig(v: f64) -> String {
    format!("{}", round_sig(v))
}

pub fn round_sig(v: f64) -> f64 {
    if v == 0.0 {
        return 0.0;
    }
    if !v.is_finite() {
        return v;
    }
    format!("{v:.8e}").parse().unwrap_or(v)
}

#[derive(Debug, Clone)]
pub struct RegionOptions {
    /// `None` picks `min(∏|X_a| + 2, 12)`.
    pub q_size: Option<usize>,
    pub restarts: usize,
    pub seed: u64,
    pub descent: DescentOptions,
}

impl Default for RegionOptions {
    fn default() -> Self {
        Self {
            q_size: None,
            restarts: 4,
            seed: 0,
            descent: DescentOptions::default(),
        }
    }
}

impl RegionOptions {
    fn resolve_q(&self, p: &JointPmf) -> Result<usize> {
        let cap = cardinality_bound(p);
        let q = self.q_size.unwrap_or_else(|| cap.min(REGION_DEFAULT_Q_MAX));
        if q == 0 {
            return Err(Error::InvalidChannel("q_size must be positive".into()));
        }
        if q > cap {
            return Err(Error::Cardinality { requested: q, cap });
        }
        Ok(q)
    }
}

/// Structured starting channels: the common part, constant Q, `Q = X_a`,
/// `Q = X_{A∖a}` and `Q = X_A`.
pub(crate) fn structured_seeds(p: &JointPmf) -> Vec<AuxChannel> {
    let k = p.num_coords();
    let shape = p.shape();
    let mut seeds = vec![common_part(p).channel(p), AuxChannel::constant(p.len())];
    let mut subsets: Vec<Vec<usize>> = (0..k).map(|a| vec![a]).collect();
    if k > 2 {
        subsets.extend((0..k).map(|a| (0..k).filter(|&b| b != a).collect()));
    }
    subsets.push((0..k).collect());
    for s in subsets {
        let size: usize = s.iter().map(|&b| p.sizes()[b]).product();
        seeds.push(
            AuxChannel::deterministic(&shape.projection(&s), size).expect("projection in range"),
        );
    }
    seeds
}

fn check_direction(kind: RegionKind, p: &JointPmf, d: &Direction) -> Result<()> {
    let dim = kind.dimension(p.num_coords());
    if d.dim() != dim {
        return Err(Error::Dimension(format!(
            "direction has {} weights, region has dimension {dim}",
            d.dim()
        )));
    }
    Ok(())
}

const SKEW_LIMIT: f64 = 30.0;

/// Square root of every weight, or `None` when the positive weights are
/// already within `SKEW_LIMIT` of each other.
fn milder_direction(d: &Direction) -> Option<Direction> {
    let positive = d.weights().iter().copied().filter(|&v| v > 0.0);
    let (lo, hi) = positive.fold((f64::INFINITY, 0.0f64), |(lo, hi), v| {
        (lo.min(v), hi.max(v))
    });
    if hi <= SKEW_LIMIT * lo {
        return None;
    }
    Direction::new(d.weights().iter().map(|v| v.sqrt() * hi.sqrt()).collect()).ok()
}

fn support_sample(
    p: &JointPmf,
    kind: RegionKind,
    coord_forms: &[EntropyForm],
    seeds: &[AuxChannel],
    d: &Direction,
    q_size: usize,
    opts: &RegionOptions,
) -> Result<SupportSample> {
    let form = EntropyForm::combine(d.weights().iter().copied().zip(coord_forms));
    let ev = Evaluator::new(p, &form);
    let mut seeds = seeds.to_vec();
    if let Some(milder) = milder_direction(d) {
        // heavily skewed weights make the landscape stiff, so warm-start
        // from the optimum of a less skewed direction
        let s = support_sample(p, kind, coord_forms, &seeds, &milder, q_size, opts)?;
        seeds.extend(s.witness);
    }
    let (_, w) = minimize(&ev, q_size, opts.restarts, opts.seed, &seeds, &opts.descent);
    let point = kind.point(p, &w)?;
    Ok(SupportSample {
        value: d.dot(&point),
        direction: d.clone(),
        point,
        witness: Some(w),
    })
}

/// `h(λ)` for the K+1 dimensional region: best value found over restarts
/// and its witness. The value is an upper bound on the true minimum.
pub fn support_function(
    p: &JointPmf,
    d: &Direction,
    q_size: usize,
    restarts: usize,
    seed: u64,
) -> Result<(f64, AuxChannel)> {
    let opts = RegionOptions {
        q_size: Some(q_size),
        restarts,
        seed,
        ..Default::default()
    };
    let s = support_with(p, RegionKind::Ari, d, &opts)?;
    Ok((
        s.value,
        s.witness.expect("computed samples carry witnesses"),
    ))
}

pub fn support_with(
    p: &JointPmf,
    kind: RegionKind,
    d: &Direction,
    opts: &RegionOptions,
) -> Result<SupportSample> {
    check_direction(kind, p, d)?;
    let q = opts.resolve_q(p)?;
    support_sample(
        p,
        kind,
        &kind.coordinate_forms(p),
        &structured_seeds(p),
        d,
        q,
        opts,
    )
}

fn build_region(
    p: &JointPmf,
    kind: RegionKind,
    directions: &[Direction],
    opts: &RegionOptions,
) -> Result<RegionApprox> {
    if directions.is_empty() {
        return Err(Error::InvalidDirection(
            "at least one direction is required".into(),
        ));
    }
    for d in directions {
        check_direction(kind, p, d)?;
    }
    let q = opts.resolve_q(p)?;
    let coord_forms = kind.coordinate_forms(p);
    let seeds = structured_seeds(p);
    let mut samples = directions
        .par_iter()
        .map(|d| support_sample(p, kind, &coord_forms, &seeds, d, q, opts))
        .collect::<Result<Vec<_>>>()?;

    // every achieved point bounds every direction's support
    let achieved: Vec<(Vec<f64>, Option<AuxChannel>)> = samples
        .iter()
        .map(|s| (s.point.clone(), s.witness.clone()))
        .collect();
    for s in &mut samples {
        for (x, w) in &achieved {
            let v = s.direction.dot(x);
            if v < s.value {
                s.value = v;
                s.point = x.clone();
                s.witness = w.clone();
            }
        }
    }
    let resolvable = is_perfectly_resolvable(p).resolvable;
    Ok(RegionApprox {
        kind,
        dimension: kind.dimension(p.num_coords()),
        samples,
        contains_origin: Some(resolvable),
        meta: RegionMeta {
            q_size: q,
            restarts: opts.restarts,
            seed: opts.seed,
            cardinality_bound: cardinality_bound(p),
            scale: 1.0,
        },
    })
}

pub fn region_approx(
    p: &JointPmf,
    directions: &[Direction],
    opts: &RegionOptions,
) -> Result<RegionApprox> {
    build_region(p, RegionKind::Ari, directions, opts)
}

/// The 2K-dimensional region with coordinates
/// `(I(Y_{A∖i};Y_i|Q))_i` followed by `(I(Y_{A∖i};Q|Y_i))_i`.
pub fn region_t2k(
    p: &JointPmf,
    directions: &[Direction],
    opts: &RegionOptions,
) -> Result<RegionApprox> {
    build_region(p, RegionKind::TwoK, directions, opts)
}

/// `n`-fold Minkowski self-sum: supports and points scale by `n`.
pub fn scale_region(r: &RegionApprox, n: u32) -> Result<RegionApprox> {
    if n == 0 {
        return Err(Error::InvalidOperation(
            "scale factor must be at least 1".into(),
        ));
    }
    let k = f64::from(n);
    let mut out = r.clone();
    for s in &mut out.samples {
        s.value *= k;
        s.point.iter_mut().for_each(|v| *v *= k);
        if n > 1 {
            s.witness = None;
        }
    }
    out.meta.scale *= k;
    Ok(out)
}

/// Minkowski sum of two regions sampled on the same directions.
pub fn minkowski_sum(a: &RegionApprox, b: &RegionApprox) -> Result<RegionApprox> {
    if a.kind != b.kind || a.dimension != b.dimension || a.samples.len() != b.samples.len() {
        return Err(Error::Dimension(
            "Minkowski sum needs regions of the same kind and sampling".into(),
        ));
    }
    let samples = a
        .samples
        .iter()
        .zip(&b.samples)
        .map(|(x, y)| {
            if !x.direction.same_as(&y.direction) {
                return Err(Error::Dimension(
                    "regions are sampled on different directions".into(),
                ));
            }
            Ok(SupportSample {
                direction: x.direction.clone(),
                value: x.value + y.value,
                point: x.point.iter().zip(&y.point).map(|(u, v)| u + v).collect(),
                witness: None,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RegionApprox {
        kind: a.kind,
        dimension: a.dimension,
        samples,
        contains_origin: match (a.contains_origin, b.contains_origin) {
            (Some(x), Some(y)) => Some(x && y),
            _ => None,
        },
        meta: RegionMeta {
            scale: a.meta.scale + b.meta.scale,
            ..a.meta.clone()
        },
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InclusionVerdict {
    Included,
    NotIncluded,
    Undecided,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Inclusion {
    pub verdict: InclusionVerdict,
    pub certified: Certification,
    /// `min_λ (h_inner(λ) − h_outer(λ))` over the compared directions.
    pub support_margin: f64,
    /// `min_{x ∈ inner points, λ} (λ·x − h_outer(λ))`.
    pub point_margin: f64,
    /// Inner point lying outside the outer region, with the separating direction.
    pub refutation: Option<(Direction, Vec<f64>)>,
}

/// Compares `inner ⊆ outer` on the union of both regions' directions.
///
/// Exact origin membership decides the two cases it can: an outer region
/// containing the origin is the whole orthant, and an inner region with the
/// origin cannot sit inside an outer one without it. Otherwise the heuristic
/// supports decide: inclusion when every margin is at least `−tolerance`,
/// refutation when some inner point undercuts an outer support by more than
/// `2·tolerance`, undecided in between.
pub fn region_included(
    inner: &RegionApprox,
    outer: &RegionApprox,
    tolerance: f64,
) -> Result<Inclusion> {
    if inner.dimension != outer.dimension {
        return Err(Error::Dimension(format!(
            "cannot compare regions of dimension {} and {}",
            inner.dimension, outer.dimension
        )));
    }
    let mut dirs: Vec<Direction> = Vec::new();
    for d in inner.directions().chain(outer.directions()) {
        if !dirs.iter().any(|e| e.same_as(d)) {
            dirs.push(d.clone());
        }
    }
    let mut support_margin = f64::INFINITY;
    let mut point_margin = f64::INFINITY;
    let mut refutation = None;
    for d in &dirs {
        let h_out = outer.support_estimate(d);
        support_margin = support_margin.min(inner.support_estimate(d) - h_out);
        for x in inner.points() {
            let m = d.dot(x) - h_out;
            if m < point_margin {
                point_margin = m;
                refutation = Some((d.clone(), x.to_vec()));
            }
        }
    }
    let origin = vec![0.0; inner.dimension];
    let (verdict, certified, refutation) = match (inner.contains_origin, outer.contains_origin) {
        (_, Some(true)) => (InclusionVerdict::Included, Certification::Exact, None),
        (Some(true), Some(false)) => (
            InclusionVerdict::NotIncluded,
            Certification::Exact,
            Some((
                Direction::axis(inner.dimension, inner.dimension - 1),
                origin,
            )),
        ),
        _ if support_margin >= -tolerance && point_margin >= -tolerance => {
            (InclusionVerdict::Included, Certification::Heuristic, None)
        }
        _ if point_margin < -2.0 * tolerance => (
            InclusionVerdict::NotIncluded,
            Certification::Heuristic,
            refutation,
        ),
        _ => (InclusionVerdict::Undecided, Certification::Heuristic, None),
    };
    Ok(Inclusion {
        verdict,
        certified,
        support_margin,
        point_margin,
        refutation,
    })
}

/// `Infeasible` is reported when no channel in the searched class meets
/// the intercept's constraints.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InterceptValue {
    Value(f64),
    Marker(InfeasibleMarker),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum InfeasibleMarker {
    #[serde(rename = "infeasible")]
    Infeasible,
}

impl InterceptValue {
    pub const INFEASIBLE: InterceptValue = InterceptValue::Marker(InfeasibleMarker::Infeasible);

    pub fn value(&self) -> Option<f64> {
        match self {
            InterceptValue::Value(v) => Some(*v),
            InterceptValue::Marker(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterceptResult {
    /// Region coordinate: `0..K` are the `Δ2a` axes, `K` is the `Δ1` axis.
    pub axis: usize,
    pub value: InterceptValue,
    pub witness: Option<AuxChannel>,
    pub certified: Certification,
}

fn conditional_tc(p: &JointPmf, w: &AuxChannel) -> f64 {
    let ext = p.extend(w).expect("channel matches pmf");
    let k = p.num_coords();
    let groups: Vec<Vec<usize>> = (0..k).map(|a| vec![a]).collect();
    total_correlation_groups(&ext, &groups, &[k])
}

/// `Δ1^int = min_{Q common} I(X_1;…;X_K|Q)`, attained by the maximal common
/// part since `I(X_1;…;X_K|Q) = I(X_1;…;X_K) − (K−1)·H(Q)` for common Q.
pub fn intercept_delta1(p: &JointPmf) -> InterceptResult {
    let w = common_part(p).channel(p);
    InterceptResult {
        axis: p.num_coords(),
        value: InterceptValue::Value(snap(conditional_tc(p, &w))),
        witness: Some(w),
        certified: Certification::Exact,
    }
}

struct Candidate {
    value: f64,
    blocks: usize,
    witness: AuxChannel,
}

fn evaluate_coarsening(
    p: &JointPmf,
    labels: &[usize],
    blocks: &[usize],
    a: usize,
) -> Option<Candidate> {
    let n = block_count(blocks);
    let q: Vec<usize> = labels.iter().map(|&l| blocks[l]).collect();
    let w = AuxChannel::deterministic(&q, n.max(1)).expect("blocks in range");
    if conditional_tc(p, &w) > RESOLVABLE_TOL {
        return None;
    }
    let ext = p.extend(&w).expect("channel matches pmf");
    let k = p.num_coords();
    let h = entropy_coords(&ext, &[a, k]) - entropy_coords(&ext, &[a]);
    Some(Candidate {
        value: snap(h),
        blocks: n,
        witness: w,
    })
}

fn pick(best: &mut Option<Candidate>, c: Candidate) {
    let better = match best {
        None => true,
        Some(b) => c
            .value
            .total_cmp(&b.value)
            .then(c.blocks.cmp(&b.blocks))
            .then_with(|| c.witness.tie_order(&b.witness))
            .is_lt(),
    };
    if better {
        *best = Some(c);
    }
}

/// `Δ2a^int = min H(Q|X_a)` over Q that are common functions of
/// `X_{A∖a}` with `I(X_1;…;X_K|Q) = 0`. Candidates are the coarsenings of
/// the maximal common part of `X_{A∖a}`; all of them when it has at most
/// eight values, a greedy merge path otherwise.
pub fn intercept_delta2(p: &JointPmf, axis: usize) -> Result<InterceptResult> {
    let k = p.num_coords();
    if axis >= k || k < 2 {
        return Err(Error::InvalidAxis { axis, parties: k });
    }
    let rest: Vec<usize> = (0..k).filter(|&b| b != axis).collect();
    let sub = p.marginal(&MarginSpec::new(rest.clone())?)?;
    let cp = common_part(&sub);
    let n_labels = cp.num_components();
    let shape = p.shape();
    let mut sym = vec![0; k];
    let labels: Vec<usize> = (0..p.len())
        .map(|i| {
            shape.unravel_into(i, &mut sym);
            let r: Vec<usize> = rest.iter().map(|&b| sym[b]).collect();
            cp.label_of(&r)
        })
        .collect();

    let mut best = None;
    let exhaustive = n_labels <= BELL_GUARD;
    if exhaustive {
        for blocks in Partitions::new(n_labels) {
            if let Some(c) = evaluate_coarsening(p, &labels, &blocks, axis) {
                pick(&mut best, c);
            }
        }
    } else {
        // greedy: start from the finest labeling and merge while it helps
        let mut blocks: Vec<usize> = (0..n_labels).collect();
        if let Some(c) = evaluate_coarsening(p, &labels, &blocks, axis) {
            pick(&mut best, c);
        }
        loop {
            let nb = block_count(&blocks);
            let mut step: Option<(Vec<usize>, Candidate)> = None;
            for i in 0..nb {
                for j in i + 1..nb {
                    let merged = relabel(&blocks, i, j);
                    if let Some(c) = evaluate_coarsening(p, &labels, &merged, axis) {
                        if step.as_ref().is_none_or(|(_, s)| c.value < s.value) {
                            step = Some((merged, c));
                        }
                    }
                }
            }
            match step {
                Some((merged, c)) => {
                    blocks = merged;
                    pick(&mut best, c);
                }
                None => break,
            }
        }
        let constant = vec![0; n_labels];
        if let Some(c) = evaluate_coarsening(p, &labels, &constant, axis) {
            pick(&mut best, c);
        }
    }
    let certified = if k >= 3 && exhaustive {
        Certification::Exact
    } else {
        Certification::Heuristic
    };
    Ok(match best {
        Some(c) => InterceptResult {
            axis,
            value: InterceptValue::Value(c.value),
            witness: Some(c.witness),
            certified,
        },
        None => InterceptResult {
            axis,
            value: InterceptValue::INFEASIBLE,
            witness: None,
            certified,
        },
    })
}

/// Merges block `j` into block `i` and renumbers to a growth string.
fn relabel(blocks: &[usize], i: usize, j: usize) -> Vec<usize> {
    let merged: Vec<usize> = blocks.iter().map(|&b| if b == j { i } else { b }).collect();
    let mut map = std::collections::HashMap::new();
    merged
        .iter()
        .map(|b| {
            let n = map.len();
            *map.entry(*b).or_insert(n)
        })
        .collect()
}

/// All K+1 intercepts, `Δ2a` axes first.
pub fn intercepts(p: &JointPmf) -> Result<Vec<InterceptResult>> {
    let mut out = (0..p.num_coords())
        .map(|a| intercept_delta2(p, a))
        .collect::<Result<Vec<_>>>()?;
    out.push(intercept_delta1(p));
    Ok(out)
}
