use kappa_core::dunkl::MultiplicityData;
use kappa_core::kafourier::*;
use kappa_core::Complex64;
use std::f64::consts::PI;

type Profile = Box<dyn Fn(f64) -> Complex64>;

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn hermite_family() -> SpectralFamily {
    SpectralFamily::build(
        &MultiplicityData::uniform(1, 0.0, 2.0).unwrap(),
        1,
        DEFAULT_MODES,
    )
    .unwrap()
}

/// Splits `f` on the line into its two sectors.
fn line_sectors(fam: &SpectralFamily, f: &dyn Fn(f64) -> Complex64) -> [SectorVector; 2] {
    [
        fam.project(0, &|r| parity_split(f, r).0).unwrap(),
        fam.project(1, &|r| parity_split(f, r).1).unwrap(),
    ]
}

fn line_eval(fam: &SpectralFamily, v: &[SectorVector; 2], x: f64) -> Complex64 {
    parity_join(
        fam.eval(&v[0], x.abs()).unwrap(),
        fam.eval(&v[1], x.abs()).unwrap(),
        x,
    )
}

fn schwartz_profiles() -> Vec<Profile> {
    vec![
        Box::new(|x: f64| c((-0.5 * x * x).exp())),
        Box::new(|x: f64| c(x * (-x * x).exp())),
        Box::new(|x: f64| c((1.0 + x) * (-(x - 0.3f64).powi(2)).exp())),
        Box::new(|x: f64| c(x * x * (-x * x / 3.0).exp())),
        Box::new(|x: f64| Complex64::new((-0.7 * x * x).exp(), 0.5 * x * (-0.6 * x * x).exp())),
    ]
}

#[test]
fn hermite_sector_spectrum() {
    let fam = hermite_family();
    let even = fam.sector(0).unwrap();
    for j in 0..even.retained {
        assert!(
            (even.eigenvalues[j] + (4 * j + 1) as f64).abs() < 1e-9,
            "j={j}"
        );
    }
    let odd = fam.sector(1).unwrap();
    assert!((odd.eigenvalues[0] + 3.0).abs() < 1e-10);
}

#[test]
fn every_model_is_negative_and_stable_under_doubling() {
    for (n_dim, k, a) in [
        (1, 0.0, 2.0),
        (1, 0.5, 1.0),
        (2, 0.0, 1.0),
        (2, 1.3, 1.5),
        (3, 0.5, 0.7),
    ] {
        let md = MultiplicityData::uniform(n_dim, k, a).unwrap();
        for m in 0..=1 {
            let small = build_model(&md, m, 64).unwrap();
            let big = build_model(&md, m, 128).unwrap();
            assert!(small
                .eigenvalues
                .iter()
                .chain(&big.eigenvalues)
                .all(|&l| l < 0.0));
            for j in 0..small.retained {
                assert!((small.eigenvalues[j] - big.eigenvalues[j]).abs() <= 1e-6);
            }
            let res = small.eigen_residuals().unwrap();
            assert!(
                res.iter().all(|&r| r <= 1e-8),
                "{:?}",
                res.iter().cloned().fold(0.0, f64::max)
            );
            let gram = small.eigenvectors.transpose() * &small.eigenvectors;
            let id = nalgebra::DMatrix::<f64>::identity(64, 64);
            assert!((gram - id).abs().max() < 1e-10);
        }
    }
}

#[test]
#[allow(clippy::needless_range_loop)]
fn eigenfunctions_orthonormal_under_independent_quadrature() {
    use kappa_core::specfun::{gauss_rule, WeightSpec};
    let md = MultiplicityData::uniform(2, 0.5, 1.5).unwrap();
    let model = build_model(&md, 1, 24).unwrap();
    // Composite Gauss–Legendre in r against r^{2⟨k⟩+N+a-3} = r^{2.5}.
    let rule = gauss_rule(WeightSpec::Legendre, 16).unwrap();
    let mut gram = [[0.0; 6]; 6];
    for p in 0..200 {
        for (&u, &w) in rule.nodes.iter().zip(&rule.weights) {
            let r = 0.1 * (p as f64 + 0.5 * (u + 1.0));
            let v: Vec<f64> = (0..6).map(|i| model.mode_value(i, r)).collect();
            for i in 0..6 {
                for j in 0..6 {
                    gram[i][j] += 0.05 * w * r.powf(2.5) * v[i] * v[j];
                }
            }
        }
    }
    for i in 0..6 {
        for j in 0..6 {
            let g = gram[i][j];
            assert!(
                (g - if i == j { 1.0 } else { 0.0 }).abs() < 1e-10,
                "({i},{j}) {g}"
            );
        }
    }
}

#[test]
fn continuity_in_k() {
    let m0 = build_model(&MultiplicityData::uniform(2, 0.0, 1.5).unwrap(), 0, 48).unwrap();
    let m1 = build_model(&MultiplicityData::uniform(2, 1e-4, 1.5).unwrap(), 0, 48).unwrap();
    for j in 0..m0.retained {
        assert!((m0.eigenvalues[j] - m1.eigenvalues[j]).abs() <= 1e-3);
    }
}

#[test]
fn semigroup_laws() {
    let md = MultiplicityData::uniform(2, 0.5, 1.5).unwrap();
    let fam = SpectralFamily::build(&md, 1, 48).unwrap();
    let f = fam.project(1, &|r| c(r * (-0.6 * r * r).exp())).unwrap();
    let id = SemigroupOperator::new(&fam, c(0.0))
        .unwrap()
        .apply(&f)
        .unwrap();
    assert!(id.value.distance(&f) < 1e-12 * f.norm());
    let z1 = Complex64::new(0.3, 0.7);
    let z2 = Complex64::new(0.45, -1.1);
    let a = SemigroupOperator::new(&fam, z1).unwrap();
    let b = SemigroupOperator::new(&fam, z2).unwrap();
    let ab = SemigroupOperator::new(&fam, z1 + z2).unwrap();
    let lhs = a.apply(&b.apply(&f).unwrap().value).unwrap().value;
    let rhs = ab.apply(&f).unwrap().value;
    assert!(lhs.distance(&rhs) <= 1e-10 * f.norm());
    for t in [0.1, 0.9, 2.3, -4.0, 17.5] {
        let u = SemigroupOperator::new(&fam, Complex64::new(0.0, t))
            .unwrap()
            .apply(&f)
            .unwrap();
        assert!((u.value.norm() / f.norm() - 1.0).abs() <= 1e-9);
    }
    assert!(SemigroupOperator::new(&fam, c(-0.1)).is_err());
    let mut prev = f64::INFINITY;
    for i in 1..=20 {
        let z = c(0.1 * i as f64);
        let hs = SemigroupOperator::new(&fam, z).unwrap().hs_norm().unwrap();
        assert!(hs < prev);
        prev = hs;
    }
    assert!(
        SemigroupOperator::new(&fam, c(60.0))
            .unwrap()
            .hs_norm()
            .unwrap()
            < 1e-20
    );
    let points: Vec<Complex64> = [(0.2, -1.0), (0.5, 0.3), (1.2, 1.7), (2.0, 0.0)]
        .iter()
        .map(|&(x, y)| Complex64::new(x, y))
        .collect();
    let g = fam.project(1, &|r| c(r * r * (-r).exp())).unwrap();
    assert!(holomorphy_residual(&fam, &f, &g, &points).unwrap() <= 1e-6);
}

#[test]
fn phase_constants() {
    let e = |x: f64| Complex64::from_polar(1.0, x);
    let p = phase_constant(&MultiplicityData::uniform(1, 0.0, 2.0).unwrap());
    assert!((p - e(PI / 4.0)).norm() < 1e-15);
    for n in 1..=3 {
        let md = MultiplicityData::uniform(n, 0.0, 1.0);
        if let Ok(md) = md {
            assert!((phase_constant(&md) - e(PI * (n as f64 - 1.0) / 2.0)).norm() < 1e-15);
        }
    }
    let md = MultiplicityData::new(2, vec![0.3, 1.1], 0.8).unwrap();
    assert!((phase_constant(&md).norm() - 1.0).abs() < 1e-15);
}

#[test]
fn fourier_special_case() {
    let fam = hermite_family();
    let gauss = |x: f64| c((-0.5 * x * x).exp());
    let v = line_sectors(&fam, &gauss);
    let out = [
        fka_apply(&fam, &v[0]).unwrap().value,
        fka_apply(&fam, &v[1]).unwrap().value,
    ];
    for xi in [-2.5, -0.7, 0.0, 0.4, 1.9] {
        assert!((line_eval(&fam, &out, xi) - gauss(xi)).norm() < 1e-10);
    }
    for f in schwartz_profiles() {
        let v = line_sectors(&fam, &*f);
        let out = [
            fka_apply(&fam, &v[0]).unwrap(),
            fka_apply(&fam, &v[1]).unwrap(),
        ];
        assert!(out.iter().all(|o| !o.truncated()));
        let norm_in = (v[0].norm().powi(2) + v[1].norm().powi(2)).sqrt();
        let norm_out = (out[0].value.norm().powi(2) + out[1].value.norm().powi(2)).sqrt();
        assert!((norm_out / norm_in - 1.0).abs() < 1e-10);
        let outv = [out[0].value.clone(), out[1].value.clone()];
        for xi in [-2.2, -1.0, -0.1, 0.6, 1.4, 3.0] {
            let want = oracle_fourier(&|x: &[f64]| f(x[0]), &[xi], 14.0, 801).unwrap();
            assert!(
                (line_eval(&fam, &outv, xi) - want).norm() <= 1e-6,
                "xi={xi}"
            );
        }
    }
}

#[test]
fn fourier_oracle_gaussian_pair() {
    let g = |x: &[f64]| c((-0.5 * x.iter().map(|v| v * v).sum::<f64>()).exp());
    for xi in [[0.0f64, 0.0], [0.5, -1.2], [2.0, 1.0]] {
        let want = (-0.5 * (xi[0] * xi[0] + xi[1] * xi[1])).exp();
        assert!((oracle_fourier(&g, &xi, 12.0, 161).unwrap() - c(want)).norm() < 1e-10);
    }
    let rough = |x: &[f64]| c((-0.5 * x[0] * x[0]).exp() * (30.0 * x[0]).cos());
    assert!(oracle_fourier(&rough, &[0.3], 12.0, 81).is_err());
}

#[test]
fn hankel_special_case() {
    for n_dim in [2usize, 3] {
        let md = MultiplicityData::uniform(n_dim, 0.0, 1.0).unwrap();
        let fam = SpectralFamily::build(&md, 2, DEFAULT_MODES).unwrap();
        let profiles: Vec<(usize, Profile)> = vec![
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
        for (m, g) in profiles {
            let v = fam.project(m, &*g).unwrap();
            let out = fka_apply(&fam, &v).unwrap();
            assert!(!out.truncated());
            for s in [0.2, 0.9, 2.5, 6.0] {
                let want = oracle_hankel(&*g, m, n_dim, s, 12.0).unwrap();
                let got = fam.eval(&out.value, s).unwrap();
                assert!(
                    (got - want).norm() <= 1e-6,
                    "N={n_dim} m={m} s={s}: {got} vs {want}"
                );
            }
        }
    }
}

#[test]
fn mehler_agreement() {
    let fam = hermite_family();
    for z in [c(0.5), c(1.0), Complex64::new(0.2, 0.9)] {
        let op = SemigroupOperator::new(&fam, z).unwrap();
        let oracle = MehlerOracle::new(z, 160, 12.0, 0.05).unwrap();
        for f in schwartz_profiles() {
            let v = line_sectors(&fam, &*f);
            let out = [
                op.apply(&v[0]).unwrap().value,
                op.apply(&v[1]).unwrap().value,
            ];
            for x in [-1.8, -0.3, 0.5, 2.2] {
                let want = oracle.apply(&*f, x).unwrap();
                assert!(
                    (line_eval(&fam, &out, x) - want).norm() <= 1e-6,
                    "z={z} x={x}"
                );
            }
        }
        if z.im == 0.0 {
            let hs = op.hs_norm().unwrap();
            assert!((hs - oracle.frobenius_norm()).abs() <= 1e-6 * hs);
        }
    }
}

#[test]
fn finite_orders() {
    for k in [0.0, 0.5] {
        for (num, den, want) in [(1u32, 1u32, 2usize), (2, 1, 4), (3, 2, 6)] {
            let md = MultiplicityData::uniform(2, k, num as f64 / den as f64).unwrap();
            let fam = SpectralFamily::build(&md, 3, 48).unwrap();
            let rep = order_check(&fam, num, den, 1e-8).unwrap();
            assert_eq!(
                rep.order,
                Some(want),
                "k={k} a={num}/{den}: {:?}",
                rep.trace
            );
        }
    }
    let md = MultiplicityData::uniform(2, 0.0, 1.0).unwrap();
    let fam = SpectralFamily::build(&md, 1, 32).unwrap();
    assert!(order_check(&fam, 2, 2, 1e-8).is_err());
}

#[test]
fn intertwining_relations() {
    for (n_dim, k, a) in [(1, 0.0, 2.0), (1, 0.4, 1.0), (2, 0.5, 1.5), (3, 1.3, 0.8)] {
        let md = MultiplicityData::uniform(n_dim, k, a).unwrap();
        let fam = SpectralFamily::build(&md, 1, DEFAULT_MODES).unwrap();
        for m in 0..=1 {
            let f = fam
                .project(m, &|r| {
                    c(r.powi(m as i32) * (1.0 + r.powf(a)) * (-0.8 * r.powf(a)).exp())
                })
                .unwrap();
            let (r1, r2, r3) = intertwining_residual(&fam, &f).unwrap();
            assert!(
                r1.max(r2).max(r3) <= 1e-6,
                "{n_dim} {k} {a} m={m}: {r1:e} {r2:e} {r3:e}"
            );
        }
        let model = fam.sector(0).unwrap();
        let eig = model.eigenvectors.column(0).iter().map(|&x| c(x)).collect();
        let (r1, r2, r3) =
            intertwining_residual(&fam, &SectorVector { m: 0, coeffs: eig }).unwrap();
        assert!(r1.max(r2).max(r3) <= 1e-10);
    }
}

#[test]
fn cache_round_trip_and_corruption() {
    let dir = tempfile::tempdir().unwrap();
    let cache = ModelCache::new(dir.path()).unwrap();
    let md = MultiplicityData::new(2, vec![0.5, 0.25], 1.5).unwrap();
    let (fresh, o1) = cache.get_or_build(&md, 1, 32).unwrap();
    let (warm, o2) = cache.get_or_build(&md, 1, 32).unwrap();
    assert_eq!((o1, o2), (CacheOutcome::Miss, CacheOutcome::Hit));
    assert_eq!(fresh.eigenvalues, warm.eigenvalues);
    assert_eq!(fresh.eigenvectors, warm.eigenvectors);
    let bin = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().path())
        .find(|p| p.extension().is_some_and(|e| e == "bin"))
        .unwrap();
    let mut bytes = std::fs::read(&bin).unwrap();
    let last = bytes.len() - 1;
    bytes[last] ^= 0xff;
    std::fs::write(&bin, bytes).unwrap();
    let (again, o3) = cache.get_or_build(&md, 1, 32).unwrap();
    assert_eq!(o3, CacheOutcome::Rebuilt);
    assert_eq!(again.eigenvalues, fresh.eigenvalues);
}
