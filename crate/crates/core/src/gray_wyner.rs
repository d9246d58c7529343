//! Gray–Wyner corner rates and the bundling inefficiencies `Δ1`, `Δ2a`.

use serde::{Deserialize, Serialize};

use crate::channel::AuxChannel;
use crate::error::{Error, Result};
use crate::info::{cmi_coords, entropy_coords, total_correlation_groups};
use crate::pmf::JointPmf;

/// Slack allowed on the lower-bound inequalities.
pub const LOWER_BOUND_SLACK: f64 = 1e-9;

/// A Gray–Wyner rate tuple `(R_0, R_1, …, R_K)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GwRates {
    pub r0: f64,
    pub ra: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Inefficiency {
    pub delta1: f64,
    pub delta2a: Vec<f64>,
    pub delta2: f64,
}

/// Both expansions of each inefficiency, for auditing.
#[derive(Debug, Clone, PartialEq)]
pub struct InefficiencyAudit {
    /// `R0 + Σ Ra − H(X_A)` at the corner.
    pub delta1_rate_surplus: f64,
    /// `I(X_1;…;X_K | Q)`.
    pub delta1_conditional_tc: f64,
    /// `Σ_a [I(X_A;Q) + H(X_a|Q) − H(X_a)]`.
    pub delta2_rate_surplus: f64,
    /// `Σ_a I(X_{A∖a}; Q | X_a)`.
    pub delta2_sum: f64,
}

fn check(p: &JointPmf, w: &AuxChannel) -> Result<JointPmf> {
    if w.num_rows() != p.len() {
        return Err(Error::Dimension(format!(
            "channel has {} rows, pmf has {} joint symbols",
            w.num_rows(),
            p.len()
        )));
    }
    p.extend(w)
}

fn all(k: usize) -> Vec<usize> {
    (0..k).collect()
}

/// The tight corner `R0 = I(X_A;Q)`, `Ra = H(X_a|Q)`.
pub fn gw_rates_for_channel(p: &JointPmf, w: &AuxChannel) -> Result<GwRates> {
    let ext = check(p, w)?;
    let k = p.num_coords();
    let hq = entropy_coords(&ext, &[k]);
    let r0 = cmi_coords(&ext, &all(k), &[k], &[]);
    let ra = (0..k)
        .map(|a| (entropy_coords(&ext, &[a, k]) - hq).max(0.0))
        .collect();
    Ok(GwRates { r0, ra })
}

/// `R0 + Ra ≥ H(X_a)` for every a and `R0 + Σ Ra ≥ H(X_A)`, with slack.
pub fn gw_lower_bound_check(p: &JointPmf, r: &GwRates) -> Result<bool> {
    let k = p.num_coords();
    if r.ra.len() != k {
        return Err(Error::Dimension(format!(
            "{} private rates for {k} parties",
            r.ra.len()
        )));
    }
    let per_party = (0..k).all(|a| r.r0 + r.ra[a] >= entropy_coords(p, &[a]) - LOWER_BOUND_SLACK);
    let sum = r.r0 + r.ra.iter().sum::<f64>() >= entropy_coords(p, &all(k)) - LOWER_BOUND_SLACK;
    Ok(per_party && sum)
}

pub fn inefficiencies(p: &JointPmf, w: &AuxChannel) -> Result<Inefficiency> {
    inefficiencies_audited(p, w).map(|(i, _)| i)
}

/// Inefficiencies together with both expansions of `Δ1` and `Δ2`.
pub fn inefficiencies_audited(
    p: &JointPmf,
    w: &AuxChannel,
) -> Result<(Inefficiency, InefficiencyAudit)> {
    let ext = check(p, w)?;
    let k = p.num_coords();
    let rates = gw_rates_for_channel(p, w)?;
    let h_all = entropy_coords(p, &all(k));

    let groups: Vec<Vec<usize>> = (0..k).map(|a| vec![a]).collect();
    let delta1_conditional_tc = total_correlation_groups(&ext, &groups, &[k]);
    let delta1_rate_surplus = rates.r0 + rates.ra.iter().sum::<f64>() - h_all;

    let delta2a: Vec<f64> = (0..k)
        .map(|a| {
            let rest: Vec<usize> = (0..k).filter(|&b| b != a).collect();
            cmi_coords(&ext, &rest, &[k], &[a])
        })
        .collect();
    let delta2_sum: f64 = delta2a.iter().sum();
    let delta2_rate_surplus: f64 = (0..k)
        .map(|a| rates.r0 + rates.ra[a] - entropy_coords(p, &[a]))
        .sum();

    debug_assert!((delta1_rate_surplus - delta1_conditional_tc).abs() < 1e-9);
    debug_assert!((delta2_rate_surplus - delta2_sum).abs() < 1e-9);

    Ok((
        Inefficiency {
            delta1: delta1_conditional_tc,
            delta2: delta2_sum,
            delta2a,
        },
        InefficiencyAudit {
            delta1_rate_surplus,
            delta1_conditional_tc,
            delta2_rate_surplus,
            delta2_sum,
        },
    ))
}
