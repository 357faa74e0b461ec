use std::f64::consts::PI;

use anyhow::{bail, Result};
use kappa_core::ultrahyperbolic::{
    conformal_act, conformal_samples, covariance_residual, energy_identity, q_alpha_inner,
    spectral_inner, synthesize, theorem41_ratio, ConformalElement, Extrapolated, Signature,
    SliceOptions,
};
use kappa_core::Complex64;
use serde_json::json;

use super::{max, Context, Outcome};
use crate::config::ExperimentConfig;
use crate::fixtures::{family, standard, SIGNATURES};
use crate::record::{Metric, Series};

fn signatures(cfg: &ExperimentConfig) -> Vec<(usize, usize)> {
    cfg.signature()
        .map_or_else(|| SIGNATURES.to_vec(), |s| vec![s])
}

fn tag(p: usize, q: usize) -> String {
    format!("p{p}q{q}")
}

fn opts(cfg: &ExperimentConfig, points: usize) -> SliceOptions {
    SliceOptions {
        points,
        r_trunc: cfg.radius,
    }
}

pub fn conserve_hyperplane(cfg: &ExperimentConfig, _: &Context) -> Result<Outcome> {
    let m = cfg.grid.unwrap_or(96);
    let mut metrics = Vec::new();
    let mut ladder = Series::new("ladder", &["p", "q", "hyperplane", "radius", "partial"]);
    let mut values = Series::new(
        "hyperplanes",
        &["p", "q", "hyperplane", "value", "error", "spectral"],
    );
    let mut positivity = Series::new("positivity", &["p", "q", "profile", "value", "spectral"]);
    for (p, q) in signatures(cfg) {
        let t = tag(p, q);
        let (u, hs) = standard(p, q)?;
        let spec = spectral_inner(&u, &hs[0])?;
        let vals: Vec<Extrapolated> = hs
            .iter()
            .map(|h| q_alpha_inner(&u, h, &opts(cfg, m)))
            .collect::<Result<_, _>>()?;
        let (mut oracle, mut spec_spread, mut imag, mut flagged) = (0.0f64, 0.0f64, 0.0f64, 0);
        for (i, (h, v)) in hs.iter().zip(&vals).enumerate() {
            let other = spectral_inner(&u, h)?.value;
            spec_spread = max([spec_spread, (other - spec.value).abs() / spec.value]);
            oracle = max([oracle, (v.value - spec.value).abs() / spec.value]);
            imag = max([imag, v.imag]);
            flagged += v.flagged as usize;
            values.push(vec![p as f64, q as f64, i as f64, v.value, v.error, other]);
            for (r, s) in v.radii.iter().zip(&v.partials) {
                ladder.push(vec![p as f64, q as f64, i as f64, *r, *s]);
            }
        }
        let (mut bar_ratio, mut rel_gap) = (0.0f64, 0.0f64);
        for a in 0..vals.len() {
            for b in a + 1..vals.len() {
                let gap = (vals[a].value - vals[b].value).abs();
                bar_ratio = max([bar_ratio, gap / (vals[a].error + vals[b].error)]);
                rel_gap = max([rel_gap, gap / spec.value]);
            }
        }
        let mut min_value = f64::INFINITY;
        let mut pos_gap: f64 = 0.0;
        for (i, w) in family(p, q, 10, cfg.seed)?.iter().enumerate() {
            let v = q_alpha_inner(w, &hs[0], &opts(cfg, m / 2))?.value;
            let s = spectral_inner(w, &hs[0])?.value;
            min_value = min_value.min(v).min(s);
            pos_gap = max([pos_gap, (v - s).abs() / s]);
            positivity.push(vec![p as f64, q as f64, i as f64, v, s]);
        }
        metrics.extend([
            Metric::at_most(format!("independence_gap_over_error_{t}"), bar_ratio, 1.0),
            Metric::at_most(format!("independence_relative_gap_{t}"), rel_gap, 1e-2),
            Metric::at_most(format!("grid_vs_spectral_{t}"), oracle, 1e-2),
            Metric::at_most(
                format!("spectral_hyperplane_spread_{t}"),
                spec_spread,
                1e-10,
            ),
            Metric::at_most(
                format!("spectral_fd_jacobian_{t}"),
                (spec.value - spec.value_fd).abs() / spec.value,
                1e-6,
            ),
            Metric::at_most(format!("imaginary_part_{t}"), imag, 1e-8),
            Metric::at_most(format!("flagged_ladders_{t}"), flagged as f64, 0.0),
            Metric::at_least(format!("positivity_min_{t}"), min_value, f64::MIN_POSITIVE),
            Metric::info(format!("positivity_coarse_grid_gap_{t}"), pos_gap),
            Metric::info(format!("spectral_value_{t}"), spec.value),
        ]);
    }
    Ok(Outcome {
        params: json!({ "signatures": signatures(cfg), "grid": m, "radius": cfg.radius, "profiles": 10 }),
        metrics,
        series: vec![values, ladder, positivity],
    })
}

fn gaussian(x: &[f64]) -> f64 {
    let r2: f64 = x.iter().map(|v| v * v).sum();
    (-0.5 * r2).exp() * (1.0 + 0.3 * x[0] - 0.2 * x[1] * x[2])
}

pub fn conformal(cfg: &ExperimentConfig, _: &Context) -> Result<Outcome> {
    let m = cfg.grid.unwrap_or(64);
    let mut metrics = Vec::new();
    let mut weights = Series::new("dilation", &["p", "q", "lambda", "ratio"]);
    for (p, q) in signatures(cfg) {
        let t = tag(p, q);
        let (u, hs) = standard(p, q)?;
        let s = u.sig;
        let n = s.n() as f64;
        let base = q_alpha_inner(&u, &hs[0], &opts(cfg, m))?.value;
        let moved = conformal_act(
            &ConformalElement::Translation(vec![0.5, -0.3, 0.2, 0.1]),
            0.0,
            &u,
        )?;
        let trans = (q_alpha_inner(&moved, &hs[0], &opts(cfg, m))?.value - base).abs() / base;
        let w0 = (n - 2.0) / 2.0;
        let mut ratios = Vec::new();
        for lambda in [w0 - 0.5, w0, w0 + 0.5] {
            let d = conformal_act(&ConformalElement::Dilation(2.0), lambda, &u)?;
            let r = q_alpha_inner(&d, &hs[0], &opts(cfg, m))?.value / base;
            weights.push(vec![p as f64, q as f64, lambda, r]);
            ratios.push(r);
        }
        let boost = ConformalElement::boost(s, 0, 2, 0.25)?;
        let boosted = conformal_act(&boost, w0, &u)?;
        let a = spectral_inner(&u, &hs[0])?.value;
        let boost_dev = (spectral_inner(&boosted, &hs[0])?.value - a).abs() / a;
        let xs = vec![
            vec![0.2, 0.5, -0.3, 0.1],
            vec![1.5, 0.2, 0.4, -0.6],
            vec![-0.4, 1.1, 0.9, 0.3],
        ];
        let far = vec![
            vec![2.0, 0.5, 0.3, 0.1],
            vec![0.3, 2.2, 0.4, -0.6],
            vec![0.1, 0.2, 1.9, 0.3],
        ];
        let cov = max([
            covariance_residual(&ConformalElement::Dilation(2.0), s, &gaussian, &xs, 1e-2)?,
            covariance_residual(&boost, s, &gaussian, &xs, 1e-2)?,
            covariance_residual(
                &ConformalElement::rotation(s, 2, 3, 0.7)?,
                s,
                &gaussian,
                &xs,
                1e-2,
            )?,
            covariance_residual(&ConformalElement::Inversion, s, &gaussian, &far, 1e-3)?,
        ]);
        let kelvin = kelvin_box_residual(s, &u)?;
        metrics.extend([
            Metric::at_most(
                format!("dilation_at_weight_{t}"),
                (ratios[1] - 1.0).abs(),
                1e-2,
            ),
            Metric::at_least(
                format!("dilation_wrong_weight_min_{t}"),
                (ratios[0] - 1.0).abs().min((ratios[2] - 1.0).abs()),
                0.1,
            ),
            Metric::at_most(format!("translation_{t}"), trans, 1e-2),
            Metric::at_most(format!("boost_{t}"), boost_dev, 1e-3),
            Metric::at_most(format!("covariance_residual_{t}"), cov, 1e-5),
            Metric::at_most(format!("kelvin_image_box_{t}"), kelvin, 1e-5),
        ]);
    }
    Ok(Outcome {
        params: json!({ "signatures": signatures(cfg), "grid": m }),
        metrics,
        series: vec![weights],
    })
}

/// `|□(Kelvin f)| / Σ|∂²_i|` at a point off the light cone.
fn kelvin_box_residual(s: Signature, u: &kappa_core::ultrahyperbolic::ConeProfile) -> Result<f64> {
    let g = synthesize(u, 12.0)?;
    let kelvin = |x: &[f64]| -> kappa_core::Result<Complex64> {
        Ok(conformal_samples(
            &ConformalElement::Inversion,
            (s.n() as f64 - 2.0) / 2.0,
            s,
            &|y| g.eval(y),
            &[x.to_vec()],
        )?[0])
    };
    let x0 = [2.0, 0.4, 0.3, -0.2];
    let h = 1e-2;
    let (mut boxed, mut scale) = (Complex64::new(0.0, 0.0), 0.0);
    for i in 0..s.n() {
        let at = |t: f64| -> Result<Complex64> {
            let mut y = x0.to_vec();
            y[i] += t;
            Ok(kelvin(&y)?)
        };
        let d2 = (-at(2.0 * h)? + at(h)? * 16.0 - at(0.0)? * 30.0 + at(-h)? * 16.0 - at(-2.0 * h)?)
            / (12.0 * h * h);
        scale += d2.norm();
        boxed += if i < s.p { d2 } else { -d2 };
    }
    Ok(boxed.norm() / scale)
}

pub fn theorem41(cfg: &ExperimentConfig, _: &Context) -> Result<Outcome> {
    let mut metrics = Vec::new();
    let mut rows = Series::new(
        "ratios",
        &[
            "p",
            "q",
            "profile",
            "ratio",
            "ratio_over_scalar",
            "ratio_over_scalar_sq",
        ],
    );
    for (p, q) in signatures(cfg) {
        let t = tag(p, q);
        let (_, hs) = standard(p, q)?;
        let ratios = family(p, q, 5, cfg.seed)?
            .iter()
            .map(|u| theorem41_ratio(u, &hs[1]))
            .collect::<Result<Vec<_>, _>>()?;
        for (i, r) in ratios.iter().enumerate() {
            rows.push(vec![
                p as f64,
                q as f64,
                i as f64,
                r.ratio,
                r.ratio_over_scalar,
                r.ratio_over_scalar_sq,
            ]);
        }
        let lo = ratios.iter().map(|r| r.ratio).fold(f64::INFINITY, f64::min);
        let hi = max(ratios.iter().map(|r| r.ratio));
        let n = (p + q) as i32;
        metrics.extend([
            Metric::at_most(format!("spread_{t}"), (hi - lo) / lo, 5e-3),
            Metric::info(format!("ratio_{t}"), ratios[0].ratio),
            Metric::info(format!("scalar_{t}"), ratios[0].scalar),
            Metric::info(
                format!("ratio_over_scalar_{t}"),
                ratios[0].ratio_over_scalar,
            ),
            Metric::info(
                format!("ratio_over_scalar_sq_{t}"),
                ratios[0].ratio_over_scalar_sq,
            ),
            Metric::info(
                format!("ratio_over_2pi_pow_n_minus_1_half_{t}"),
                ratios[0].ratio / ((2.0 * PI).powi(n - 1) / 2.0),
            ),
        ]);
    }
    Ok(Outcome {
        params: json!({
            "signatures": signatures(cfg),
            "orientation": "ratio = (f,f) / ||u||^2 with cone measure r^(n-3)/2 dr dω dη and f = ∫ u e^{i<x,ξ>} dμ",
            "profiles": 5,
        }),
        metrics,
        series: vec![rows],
    })
}

pub fn energy(cfg: &ExperimentConfig, _: &Context) -> Result<Outcome> {
    let (p, q) = cfg.signature().unwrap_or((1, 3));
    if p != 1 {
        bail!("energy needs p = 1, got ({p},{q})");
    }
    let m = cfg.grid.unwrap_or(64);
    let s = Signature::new(p, q)?;
    let terms = vec![
        kappa_core::ultrahyperbolic::HarmonicTerm {
            omega: (0, 0),
            eta: (0, 0),
            coeff: Complex64::new(1.0, 0.0),
        },
        kappa_core::ultrahyperbolic::HarmonicTerm {
            omega: (1, 0),
            eta: (1, 2),
            coeff: Complex64::new(0.3, 0.6),
        },
        kappa_core::ultrahyperbolic::HarmonicTerm {
            omega: (0, 0),
            eta: (2, 0),
            coeff: Complex64::new(-0.2, 0.1),
        },
    ];
    let u = kappa_core::ultrahyperbolic::ConeProfile::gauss(s, 1.4, 0.3, terms)?;
    let mut slices = Series::new("slices", &["t", "energy", "error"]);
    let mut values = Vec::new();
    for t in [0.0, 1.0, -0.7] {
        let e = kappa_core::ultrahyperbolic::energy(&u, t, &opts(cfg, m))?;
        slices.push(vec![t, e.value, e.error]);
        values.push(e.value);
    }
    let drift = max(values.iter().map(|v| (v - values[0]).abs() / values[0]));
    let id = energy_identity(&u, &opts(cfg, m))?;
    Ok(Outcome {
        params: json!({ "signature": [p, q], "grid": m, "times": [0.0, 1.0, -0.7] }),
        metrics: vec![
            Metric::at_least("energy_positive", values[0], f64::MIN_POSITIVE),
            Metric::at_most("slice_drift", drift, 1e-2),
            Metric::at_most("identity_residual", id.residual, 1e-2),
            Metric::flag(
                "split_signs",
                id.positive_part >= 0.0 && id.negative_part <= 0.0,
            ),
            Metric::info("identity_lhs", id.lhs),
            Metric::info("identity_rhs", id.rhs),
        ],
        series: vec![slices],
    })
}
