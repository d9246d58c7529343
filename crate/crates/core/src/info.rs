//! Shannon-information primitives over [`JointPmf`]. All values are in bits.

use crate::error::{Error, Result};
use crate::pmf::{JointPmf, MarginSpec};

/// Negative conditional mutual information within this distance of zero is
/// floating-point noise and is clamped to 0.
pub const CMI_CLAMP: f64 = 1e-10;

/// `−Σ p log2 p` with `0 log 0 = 0`.
pub fn entropy_of(probs: &[f64]) -> f64 {
    let h: f64 = probs
        .iter()
        .filter(|&&v| v > 0.0)
        .map(|&v| -v * v.log2())
        .sum();
    // a point mass yields −0.0
    h + 0.0
}

/// Entropy of the marginal over `coords`. The empty set has entropy 0.
pub(crate) fn entropy_coords(p: &JointPmf, coords: &[usize]) -> f64 {
    if coords.is_empty() {
        return 0.0;
    }
    entropy_of(&p.marginal_probs(coords))
}

pub fn entropy(p: &JointPmf, s: &MarginSpec) -> Result<f64> {
    s.check(p.num_coords())?;
    Ok(entropy_coords(p, s.coords()))
}

/// `H(A | C)`.
pub fn conditional_entropy(p: &JointPmf, a: &MarginSpec, c: Option<&MarginSpec>) -> Result<f64> {
    a.check(p.num_coords())?;
    let c = c.map(MarginSpec::coords).unwrap_or(&[]);
    let ac = union(a.coords(), c);
    Ok(entropy_coords(p, &ac) - entropy_coords(p, c))
}

fn union(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = a.to_vec();
    out.extend(b.iter().filter(|c| !a.contains(c)));
    out
}

fn clamp_cmi(v: f64) -> f64 {
    if v.abs() <= CMI_CLAMP {
        0.0
    } else {
        v
    }
}

/// `I(A;B|C) = H(AC) + H(BC) − H(ABC) − H(C)` on raw coordinate lists.
/// Overlapping lists are merged by union; the caller guarantees range.
pub(crate) fn cmi_coords(p: &JointPmf, a: &[usize], b: &[usize], c: &[usize]) -> f64 {
    let ac = union(a, c);
    let bc = union(b, c);
    let abc = union(&ac, b);
    clamp_cmi(
        entropy_coords(p, &ac) + entropy_coords(p, &bc)
            - entropy_coords(p, &abc)
            - entropy_coords(p, c),
    )
}

/// `I(A;B|C)`; `c = None` means unconditional.
pub fn conditional_mutual_information(
    p: &JointPmf,
    a: &MarginSpec,
    b: &MarginSpec,
    c: Option<&MarginSpec>,
) -> Result<f64> {
    let k = p.num_coords();
    a.check(k)?;
    b.check(k)?;
    if !a.is_disjoint(b) {
        return Err(Error::InvalidMarginSpec(
            "I(A;B|C) needs disjoint A and B".into(),
        ));
    }
    if let Some(c) = c {
        c.check(k)?;
        if !a.is_disjoint(c) || !b.is_disjoint(c) {
            return Err(Error::InvalidMarginSpec(
                "conditioning set overlaps A or B".into(),
            ));
        }
    }
    Ok(cmi_coords(
        p,
        a.coords(),
        b.coords(),
        c.map(MarginSpec::coords).unwrap_or(&[]),
    ))
}

pub fn mutual_information(p: &JointPmf, a: &MarginSpec, b: &MarginSpec) -> Result<f64> {
    conditional_mutual_information(p, a, b, None)
}

/// Total correlation of coordinate groups given `cond`, as
/// `Σ H(G_i|C) − H(G_1…G_n|C)`.
pub(crate) fn total_correlation_groups(p: &JointPmf, groups: &[Vec<usize>], cond: &[usize]) -> f64 {
    let hc = entropy_coords(p, cond);
    let singles: f64 = groups
        .iter()
        .map(|g| entropy_coords(p, &union(g, cond)) - hc)
        .sum();
    let all: Vec<usize> = groups.iter().flatten().copied().collect();
    let joint = entropy_coords(p, &union(&all, cond)) - hc;
    clamp_cmi(singles - joint)
}

/// Total correlation as the chain `Σ_{i≥1} I(G_0…G_{i−1}; G_i | C)`.
pub(crate) fn total_correlation_chain_groups(
    p: &JointPmf,
    groups: &[Vec<usize>],
    cond: &[usize],
) -> f64 {
    let mut prefix: Vec<usize> = Vec::new();
    let mut sum = 0.0;
    for (i, g) in groups.iter().enumerate() {
        if i > 0 {
            sum += cmi_coords(p, &prefix, g, cond);
        }
        prefix.extend_from_slice(g);
    }
    sum
}

fn source_groups(
    p: &JointPmf,
    q_cond: Option<&MarginSpec>,
) -> Result<(Vec<Vec<usize>>, Vec<usize>)> {
    let cond = match q_cond {
        Some(c) => {
            c.check(p.num_coords())?;
            c.coords().to_vec()
        }
        None => Vec::new(),
    };
    let groups = (0..p.num_coords())
        .filter(|c| !cond.contains(c))
        .map(|c| vec![c])
        .collect();
    Ok((groups, cond))
}

/// `I(X_1;…;X_K | Q) = Σ H(X_a|Q) − H(X_A|Q)`, where the sources are every
/// coordinate outside `q_cond`.
pub fn total_correlation(p: &JointPmf, q_cond: Option<&MarginSpec>) -> Result<f64> {
    let (groups, cond) = source_groups(p, q_cond)?;
    let tc = total_correlation_groups(p, &groups, &cond);
    debug_assert!(
        (tc - total_correlation_chain_groups(p, &groups, &cond)).abs() < 1e-9,
        "entropy-difference and chain forms of total correlation disagree"
    );
    Ok(tc)
}

/// The chain-rule form `Σ_{i=1}^{K−1} I(X_1…X_i; X_{i+1} | Q)`.
pub fn total_correlation_chain(p: &JointPmf, q_cond: Option<&MarginSpec>) -> Result<f64> {
    let (groups, cond) = source_groups(p, q_cond)?;
    Ok(total_correlation_chain_groups(p, &groups, &cond))
}

/// `½ ‖p − q‖₁`.
pub fn total_variation(p: &JointPmf, q: &JointPmf) -> Result<f64> {
    if p.sizes() != q.sizes() {
        return Err(Error::Dimension(format!(
            "shapes {:?} and {:?} differ",
            p.sizes(),
            q.sizes()
        )));
    }
    let l1: f64 = p
        .probs()
        .iter()
        .zip(q.probs())
        .map(|(a, b)| (a - b).abs())
        .sum();
    Ok((0.5 * l1).min(1.0))
}
