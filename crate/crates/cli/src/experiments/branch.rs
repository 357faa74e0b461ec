use anyhow::Result;
use kappa_core::branching::{
    branching_consistency, expand, ktype_sparsity, parity_sign, parity_wall_residual,
    wall_residual_with_sign, BranchingOptions, BranchingReport, LaguerreField, ProductSphereGrid,
    PullbackSamples, DEFAULT_CUTOFF,
};
use kappa_core::ultrahyperbolic::Signature;
use kappa_core::Complex64;
use serde_json::json;

use super::{max, Context, Outcome};
use crate::config::ExperimentConfig;
use crate::fixtures::{laguerre_family, SIGNATURES};
use crate::record::{Metric, Series};

/// Offset from the wall used by the parity check.
const WALL_OFFSET: f64 = 2.5e-4;

fn signatures(cfg: &ExperimentConfig) -> Vec<(usize, usize)> {
    cfg.signature()
        .map_or_else(|| SIGNATURES.to_vec(), |s| vec![s])
}

fn reports(cfg: &ExperimentConfig, p: usize, q: usize) -> Result<Vec<BranchingReport>> {
    let b = cfg.grid.unwrap_or(DEFAULT_CUTOFF);
    laguerre_family(p, q, cfg.seed)?
        .iter()
        .enumerate()
        .map(|(i, u)| {
            let opts = BranchingOptions {
                b_cutoff: b,
                profile_id: Some(format!("laguerre-{p}{q}-{i}")),
            };
            Ok(branching_consistency(u, &opts)?)
        })
        .collect()
}

pub fn branch_parseval(cfg: &ExperimentConfig, _: &Context) -> Result<Outcome> {
    let mut metrics = Vec::new();
    let mut rows = Series::new(
        "triangle",
        &[
            "p",
            "q",
            "profile",
            "inner_spectral",
            "parseval",
            "quarter_power",
            "xi_norm_scaled",
            "tail",
        ],
    );
    let mut all = Vec::new();
    for (p, q) in signatures(cfg) {
        let t = format!("p{p}q{q}");
        let reps = reports(cfg, p, q)?;
        for (i, r) in reps.iter().enumerate() {
            rows.push(vec![
                p as f64,
                q as f64,
                i as f64,
                r.inner_spectral,
                r.parseval,
                r.quarter_power,
                r.xi_norm_scaled,
                r.tail,
            ]);
        }
        let dev = max(reps.iter().map(|r| r.deviations.parseval_vs_spectral));
        let quarter = max(reps
            .iter()
            .map(|r| (r.parseval - r.quarter_power).abs() / r.parseval));
        let ratios: Vec<f64> = reps.iter().map(|r| r.parseval_over_xi).collect();
        let spread = max(ratios.iter().map(|x| (x / ratios[0] - 1.0).abs()));
        let tail = max(reps.iter().map(|r| r.tail.abs()));
        let mult = reps
            .iter()
            .flat_map(|r| r.multiplicity.iter().copied())
            .max()
            .unwrap_or(0);

        let sig = Signature::new(p, q)?;
        let (mut parity, mut control) = (0.0f64, f64::INFINITY);
        for u in laguerre_family(p, q, cfg.seed)? {
            let field = LaguerreField::new(&u)?;
            let f = |x: &[f64]| field.eval(x);
            parity = max([parity, parity_wall_residual(sig, &f, 6, WALL_OFFSET)?]);
            control = control.min(wall_residual_with_sign(
                sig,
                &f,
                6,
                WALL_OFFSET,
                -parity_sign(sig),
            )?);
        }
        metrics.extend([
            Metric::at_most(format!("parseval_vs_spectral_{t}"), dev, 5e-3),
            Metric::at_most(format!("quarter_power_vs_parseval_{t}"), quarter, 1e-12),
            Metric::at_most(format!("parseval_over_xi_spread_{t}"), spread, 1e-4),
            Metric::info(format!("parseval_over_xi_{t}"), ratios[0]),
            Metric::at_most(format!("expansion_tail_{t}"), tail, 1e-6),
            Metric::at_most(format!("multiplicity_{t}"), mult as f64, 1.0),
            Metric::at_most(format!("parity_wall_residual_{t}"), parity, 1e-8),
            Metric::at_least(format!("parity_wrong_sign_control_{t}"), control, 1e-2),
        ]);
        all.extend(reps);
    }
    Ok(Outcome {
        params: json!({
            "signatures": signatures(cfg),
            "cutoff_b": cfg.grid.unwrap_or(DEFAULT_CUTOFF),
            "reports": all,
        }),
        metrics,
        series: vec![rows],
    })
}

pub fn ktype(cfg: &ExperimentConfig, _: &Context) -> Result<Outcome> {
    let b = cfg.grid.unwrap_or(DEFAULT_CUTOFF);
    let mut metrics = Vec::new();
    let mut rows = Series::new("mass", &["p", "q", "profile", "off_pattern_mass"]);
    for (p, q) in signatures(cfg) {
        let t = format!("p{p}q{q}");
        let reps = reports(cfg, p, q)?;
        for (i, r) in reps.iter().enumerate() {
            rows.push(vec![p as f64, q as f64, i as f64, r.ktype_mass]);
        }
        let sig = Signature::new(p, q)?;
        let grid = ProductSphereGrid::new(sig, b)?;
        let values = grid
            .rule_p
            .points
            .iter()
            .map(|x| {
                grid.rule_q
                    .points
                    .iter()
                    .map(|y| Complex64::new((x[0] + y[1]).exp(), 0.0))
                    .collect()
            })
            .collect();
        let control = ktype_sparsity(
            &expand(
                &PullbackSamples {
                    values,
                    rejected: vec![],
                },
                &grid,
            )?,
            sig,
        );
        rows.push(vec![p as f64, q as f64, -1.0, control]);
        metrics.extend([
            Metric::at_most(
                format!("off_pattern_mass_{t}"),
                max(reps.iter().map(|r| r.ktype_mass)),
                1e-6,
            ),
            Metric::at_least(format!("negative_control_mass_{t}"), control, 0.1),
        ]);
    }
    Ok(Outcome {
        params: json!({ "signatures": signatures(cfg), "cutoff_b": b, "control": "exp(xi_0 + eta_1)" }),
        metrics,
        series: vec![rows],
    })
}
