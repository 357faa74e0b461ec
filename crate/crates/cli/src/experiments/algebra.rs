use anyhow::{bail, Result};
use kappa_core::dunkl::{canonical_test_set, sl2_triple, MultiplicityData, Sl2Generator::*};
use kappa_core::kafourier::{
    build_model, fka_apply, holomorphy_residual, intertwining_residual, oracle_fourier,
    oracle_hankel, order_check, parity_join, parity_split, MehlerOracle, SectorVector,
    SemigroupOperator, SpectralFamily, DEFAULT_MODES,
};
use kappa_core::Complex64;
use serde_json::json;

use super::{max, Context, Outcome};
use crate::config::{ExperimentConfig, Ratio};
use crate::record::{Metric, Series};

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn ks_or(cfg: &ExperimentConfig, default: &[f64]) -> Vec<f64> {
    cfg.k.map_or_else(|| default.to_vec(), |k| vec![k])
}

fn as_or(cfg: &ExperimentConfig, default: &[f64]) -> Result<Vec<f64>> {
    Ok(cfg
        .ratio()?
        .map_or_else(|| default.to_vec(), |r| vec![r.value()]))
}

pub fn sl2_commutators(cfg: &ExperimentConfig, _: &Context) -> Result<Outcome> {
    let ks = ks_or(cfg, &[0.0, 0.5, 1.3]);
    let avals = as_or(cfg, &[1.0, 1.5, 2.0])?;
    let mut series = Series::new("residuals", &["N", "k", "a", "worst"]);
    let (mut worst, mut skipped, mut cases, mut functions) = (0.0f64, 0, 0, 0);
    for n in 1..=3usize {
        for &k in &ks {
            for &a in &avals {
                let Ok(md) = MultiplicityData::uniform(n, k, a) else {
                    skipped += 1;
                    continue;
                };
                let tri = sl2_triple(&md);
                let set = canonical_test_set(n);
                functions = set.len();
                let mut w: f64 = 0.0;
                for f in &set {
                    for (x, y, s, z) in [
                        (H, EPlus, 2.0, EPlus),
                        (H, EMinus, -2.0, EMinus),
                        (EPlus, EMinus, 1.0, H),
                    ] {
                        w = max([w, tri.bracket_residual(x, y, s, z, f)?]);
                    }
                }
                series.push(vec![n as f64, k, a, w]);
                worst = max([worst, w]);
                cases += 1;
            }
        }
    }
    let md = MultiplicityData::uniform(2, 0.5, 1.0)?;
    let wrong =
        sl2_triple(&md).bracket_residual(H, EPlus, 1.0, EPlus, &canonical_test_set(2)[6])?;
    Ok(Outcome {
        params: json!({ "k": ks, "a": avals, "N": [1, 2, 3] }),
        metrics: vec![
            Metric::at_most("bracket_residual", worst, 1e-10),
            Metric::at_least("test_functions", functions as f64, 20.0),
            Metric::info("cases", cases as f64),
            Metric::info("skipped_not_admissible", skipped as f64),
            Metric::at_least("wrong_constant_residual", wrong, 1e-3),
        ],
        series: vec![series],
    })
}

pub fn semigroup_laws(cfg: &ExperimentConfig, ctx: &Context) -> Result<Outcome> {
    let k = cfg.k.unwrap_or(0.5);
    let a = cfg.ratio()?.map_or(1.5, |r| r.value());
    let n = cfg.grid.unwrap_or(48);
    let md = MultiplicityData::uniform(2, k, a)?;
    let fam = ctx.family(&md, 1, n)?;
    let f = fam.project(1, &|r| c(r * (-0.6 * r * r).exp()))?;
    let id = SemigroupOperator::new(&fam, c(0.0))?.apply(&f)?;
    let identity = id.value.distance(&f) / f.norm();
    let mut composition: f64 = 0.0;
    for (z1, z2) in [
        ((0.3, 0.7), (0.45, -1.1)),
        ((1.2, 0.0), (0.1, 2.5)),
        ((0.05, -3.0), (0.6, 0.4)),
    ] {
        let (z1, z2) = (Complex64::new(z1.0, z1.1), Complex64::new(z2.0, z2.1));
        let a = SemigroupOperator::new(&fam, z1)?;
        let b = SemigroupOperator::new(&fam, z2)?;
        let lhs = a.apply(&b.apply(&f)?.value)?.value;
        let rhs = SemigroupOperator::new(&fam, z1 + z2)?.apply(&f)?.value;
        composition = max([composition, lhs.distance(&rhs) / f.norm()]);
    }
    let mut unitarity: f64 = 0.0;
    for t in [0.1, 0.9, 2.3, -4.0, 17.5] {
        let u = SemigroupOperator::new(&fam, Complex64::new(0.0, t))?.apply(&f)?;
        unitarity = max([unitarity, (u.value.norm() / f.norm() - 1.0).abs()]);
    }
    let mut hs = Series::new("hs_norm", &["re_z", "hs_norm"]);
    let mut violations = 0;
    let mut prev = f64::INFINITY;
    for i in 1..=20 {
        let x = 0.1 * i as f64;
        let h = SemigroupOperator::new(&fam, c(x))?.hs_norm()?;
        if !(h < prev) {
            violations += 1;
        }
        prev = h;
        hs.push(vec![x, h]);
    }
    let rejects_left_half = SemigroupOperator::new(&fam, c(-0.1)).is_err();
    let points: Vec<Complex64> = [(0.2, -1.0), (0.5, 0.3), (1.2, 1.7), (2.0, 0.0)]
        .iter()
        .map(|&(x, y)| Complex64::new(x, y))
        .collect();
    let g = fam.project(1, &|r| c(r * r * (-r).exp()))?;
    let holo = holomorphy_residual(&fam, &f, &g, &points)?;
    Ok(Outcome {
        params: json!({ "N": 2, "k": k, "a": a, "modes": n }),
        metrics: vec![
            Metric::at_most("identity_residual", identity, 1e-12),
            Metric::at_most("composition_residual", composition, 1e-10),
            Metric::at_most("boundary_unitarity", unitarity, 1e-9),
            Metric::at_most("hs_monotonicity_violations", violations as f64, 0.0),
            Metric::flag("rejects_re_z_negative", rejects_left_half),
            Metric::at_most("holomorphy_residual", holo, 1e-6),
        ],
        series: vec![hs],
    })
}

pub fn spectrum(cfg: &ExperimentConfig, _: &Context) -> Result<Outcome> {
    let n = cfg.grid.unwrap_or(64);
    let cases: Vec<(usize, f64, f64)> = match (cfg.k, cfg.ratio()?) {
        (None, None) => vec![
            (1, 0.0, 2.0),
            (1, 0.5, 1.0),
            (2, 0.0, 1.0),
            (2, 1.3, 1.5),
            (3, 0.5, 0.7),
        ],
        (k, a) => vec![(2, k.unwrap_or(0.5), a.map_or(1.5, |r| r.value()))],
    };
    let mut spectra = Series::new("spectra", &["N", "k", "a", "m", "j", "eigenvalue", "drift"]);
    let (mut top, mut drift, mut resid) = (f64::NEG_INFINITY, 0.0f64, 0.0f64);
    for (dim, k, a) in &cases {
        let md = MultiplicityData::uniform(*dim, *k, *a)?;
        for m in 0..=1 {
            let small = build_model(&md, m, n)?;
            let big = build_model(&md, m, 2 * n)?;
            top = small
                .eigenvalues
                .iter()
                .chain(&big.eigenvalues)
                .fold(top, |t, &l| if l.is_nan() { f64::NAN } else { t.max(l) });
            for j in 0..small.retained {
                let d = (small.eigenvalues[j] - big.eigenvalues[j]).abs();
                drift = max([drift, d]);
                spectra.push(vec![
                    *dim as f64,
                    *k,
                    *a,
                    m as f64,
                    j as f64,
                    small.eigenvalues[j],
                    d,
                ]);
            }
            resid = max([resid, max(small.eigen_residuals()?)]);
        }
    }
    Ok(Outcome {
        params: json!({ "cases": cases, "modes": [n, 2 * n] }),
        metrics: vec![
            Metric::below("max_eigenvalue", top, 0.0),
            Metric::at_most("retained_drift_under_doubling", drift, 1e-6),
            Metric::at_most("eigen_residual", resid, 1e-8),
        ],
        series: vec![spectra],
    })
}

pub fn fka_orders(cfg: &ExperimentConfig, ctx: &Context) -> Result<Outcome> {
    let ks = ks_or(cfg, &[0.0, 0.5]);
    let ratios: Vec<Ratio> = match cfg.ratio()? {
        Some(r) => vec![r],
        None => vec![
            Ratio { num: 1, den: 1 },
            Ratio { num: 2, den: 1 },
            Ratio { num: 3, den: 2 },
        ],
    };
    let n = cfg.grid.unwrap_or(48);
    let mut trace = Series::new("trace", &["k", "a", "power", "residual"]);
    let mut orders = Series::new("orders", &["k", "a", "expected", "measured", "residual"]);
    let (mut mismatches, mut worst) = (0, 0.0f64);
    for &k in &ks {
        for r in &ratios {
            let md = MultiplicityData::uniform(2, k, r.value())?;
            let fam = ctx.family(&md, 3, n)?;
            let rep = order_check(&fam, r.num, r.den, 1e-8)?;
            // Sector eigenvalues of F are (-1)^j e^{-iπm/a}; together they generate the 2·num-th roots of unity.
            let expected = 2 * r.num as usize;
            for (j, res) in rep.trace.iter().enumerate() {
                trace.push(vec![k, r.value(), (j + 1) as f64, *res]);
            }
            let measured = rep.order.map_or(f64::NAN, |o| o as f64);
            orders.push(vec![k, r.value(), expected as f64, measured, rep.residual]);
            if rep.order != Some(expected) {
                mismatches += 1;
            }
            worst = max([worst, rep.residual]);
        }
    }
    let mut metrics = vec![
        Metric::at_most("order_mismatches", mismatches as f64, 0.0),
        Metric::at_most("residual_at_order", worst, 1e-8),
    ];
    if let [r] = ratios.as_slice() {
        let measured = orders.rows.first().map_or(f64::NAN, |row| row[3]);
        metrics.push(Metric::info(
            format!("order_a_{}", r.to_string().replace('/', "_")),
            measured,
        ));
    }
    Ok(Outcome {
        params: json!({ "k": ks, "a": ratios.iter().map(|r| r.to_string()).collect::<Vec<_>>(), "modes": n }),
        metrics,
        series: vec![orders, trace],
    })
}

type LineProfile = Box<dyn Fn(f64) -> Complex64 + Sync>;

fn schwartz_profiles() -> Vec<LineProfile> {
    vec![
        Box::new(|x: f64| c((-0.5 * x * x).exp())),
        Box::new(|x: f64| c(x * (-x * x).exp())),
        Box::new(|x: f64| c((1.0 + x) * (-(x - 0.3f64).powi(2)).exp())),
        Box::new(|x: f64| c(x * x * (-x * x / 3.0).exp())),
        Box::new(|x: f64| Complex64::new((-0.7 * x * x).exp(), 0.5 * x * (-0.6 * x * x).exp())),
    ]
}

fn line_sectors(fam: &SpectralFamily, f: &dyn Fn(f64) -> Complex64) -> Result<[SectorVector; 2]> {
    Ok([
        fam.project(0, &|r| parity_split(f, r).0)?,
        fam.project(1, &|r| parity_split(f, r).1)?,
    ])
}

fn line_eval(fam: &SpectralFamily, v: &[SectorVector; 2], x: f64) -> Result<Complex64> {
    Ok(parity_join(
        fam.eval(&v[0], x.abs())?,
        fam.eval(&v[1], x.abs())?,
        x,
    ))
}

pub fn fka_oracles(cfg: &ExperimentConfig, ctx: &Context) -> Result<Outcome> {
    let width = cfg.radius.unwrap_or(14.0);
    let hermite = ctx.family(&MultiplicityData::uniform(1, 0.0, 2.0)?, 1, DEFAULT_MODES)?;
    let mut errors = Series::new("errors", &["oracle", "case", "point", "error"]);
    let mut fourier: f64 = 0.0;
    for (i, f) in schwartz_profiles().iter().enumerate() {
        let v = line_sectors(&hermite, &**f)?;
        let out = [fka_apply(&hermite, &v[0])?, fka_apply(&hermite, &v[1])?];
        if out.iter().any(|o| o.truncated()) {
            bail!("Fourier profile {i} not resolved");
        }
        let outv = [out[0].value.clone(), out[1].value.clone()];
        for xi in [-2.2, -1.0, -0.1, 0.6, 1.4, 3.0] {
            let want = oracle_fourier(&|x: &[f64]| f(x[0]), &[xi], width, 801)?;
            let e = (line_eval(&hermite, &outv, xi)? - want).norm();
            errors.push(vec![0.0, i as f64, xi, e]);
            fourier = max([fourier, e]);
        }
    }
    let mut hankel: f64 = 0.0;
    for dim in [2usize, 3] {
        let fam = ctx.family(&MultiplicityData::uniform(dim, 0.0, 1.0)?, 2, DEFAULT_MODES)?;
        let radial: Vec<(usize, LineProfile)> = vec![
            (0, Box::new(|r: f64| c(1.0 / r.cosh()))),
            (0, Box::new(|r: f64| c((-(1.0 + r * r).sqrt()).exp()))),
            (1, Box::new(|r: f64| c(r / r.cosh()))),
            (1, Box::new(|r: f64| c(r * (-0.5 * r * r).exp()))),
            (
                2,
                Box::new(|r: f64| {
                    Complex64::new(r * r * (-r * r).exp(), r * r / (1.0 + r * r).powi(3))
                }),
            ),
        ];
        for (i, (m, g)) in radial.iter().enumerate() {
            let v = fam.project(*m, &**g)?;
            let out = fka_apply(&fam, &v)?;
            if out.truncated() {
                bail!("Hankel profile {i} not resolved");
            }
            for s in [0.2, 0.9, 2.5, 6.0] {
                let want = oracle_hankel(&**g, *m, dim, s, 12.0)?;
                let e = (fam.eval(&out.value, s)? - want).norm();
                errors.push(vec![dim as f64 - 1.0, i as f64, s, e]);
                hankel = max([hankel, e]);
            }
        }
    }
    let mut mehler: f64 = 0.0;
    let mut frob: f64 = 0.0;
    for (zi, z) in [c(0.5), c(1.0), Complex64::new(0.2, 0.9)]
        .into_iter()
        .enumerate()
    {
        let op = SemigroupOperator::new(&hermite, z)?;
        let oracle = MehlerOracle::new(z, 160, 12.0, 0.05)?;
        for f in schwartz_profiles() {
            let v = line_sectors(&hermite, &*f)?;
            let out = [op.apply(&v[0])?.value, op.apply(&v[1])?.value];
            for x in [-1.8, -0.3, 0.5, 2.2] {
                let e = (line_eval(&hermite, &out, x)? - oracle.apply(&*f, x)?).norm();
                errors.push(vec![3.0, zi as f64, x, e]);
                mehler = max([mehler, e]);
            }
        }
        if z.im == 0.0 {
            let hs = op.hs_norm()?;
            frob = max([frob, (hs - oracle.frobenius_norm()).abs() / hs]);
        }
    }
    Ok(Outcome {
        params: json!({ "oracle_half_width": width, "mehler_z": ["0.5", "1", "0.2+0.9i"] }),
        metrics: vec![
            Metric::at_most("fourier_error", fourier, 1e-6),
            Metric::at_most("hankel_error", hankel, 1e-6),
            Metric::at_most("mehler_error", mehler, 1e-6),
            Metric::at_most("mehler_hs_norm", frob, 1e-6),
        ],
        series: vec![errors],
    })
}

pub fn intertwining(cfg: &ExperimentConfig, ctx: &Context) -> Result<Outcome> {
    let cases: Vec<(usize, f64, f64)> = match (cfg.k, cfg.ratio()?) {
        (None, None) => vec![(1, 0.0, 2.0), (1, 0.4, 1.0), (2, 0.5, 1.5), (3, 1.3, 0.8)],
        (k, a) => vec![(2, k.unwrap_or(0.5), a.map_or(1.5, |r| r.value()))],
    };
    let n = cfg.grid.unwrap_or(DEFAULT_MODES);
    let mut res = Series::new(
        "residuals",
        &["N", "k", "a", "m", "euler", "radial", "laplacian"],
    );
    let (mut worst, mut eig) = (0.0f64, 0.0f64);
    for &(dim, k, a) in &cases {
        let md = MultiplicityData::uniform(dim, k, a)?;
        let fam = ctx.family(&md, 1, n)?;
        for m in 0..=1 {
            let f = fam.project(m, &|r| {
                c(r.powi(m as i32) * (1.0 + r.powf(a)) * (-0.8 * r.powf(a)).exp())
            })?;
            let (r1, r2, r3) = intertwining_residual(&fam, &f)?;
            res.push(vec![dim as f64, k, a, m as f64, r1, r2, r3]);
            worst = max([worst, r1, r2, r3]);
        }
        let model = fam.sector(0)?;
        let v = SectorVector {
            m: 0,
            coeffs: model.eigenvectors.column(0).iter().map(|&x| c(x)).collect(),
        };
        let (r1, r2, r3) = intertwining_residual(&fam, &v)?;
        eig = max([eig, r1, r2, r3]);
    }
    Ok(Outcome {
        params: json!({ "cases": cases, "modes": n }),
        metrics: vec![
            Metric::at_most("intertwining_residual", worst, 1e-6),
            Metric::at_most("eigenvector_residual", eig, 1e-10),
        ],
        series: vec![res],
    })
}
