//! Profile families shared by the experiments.

use anyhow::Result;
use kappa_core::ultrahyperbolic::{
    Branch, ConeProfile, HarmonicTerm, Hyperplane, Radial, Signature,
};
use kappa_core::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const SIGNATURES: [(usize, usize); 2] = [(1, 3), (2, 2)];

fn term(omega: (usize, usize), eta: (usize, usize), coeff: Complex64) -> HarmonicTerm {
    HarmonicTerm { omega, eta, coeff }
}

pub fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

fn coeff(r: &mut ChaCha8Rng, scale: f64) -> Complex64 {
    Complex64::new(r.random_range(-scale..scale), r.random_range(-scale..scale))
}

/// Two timelike normals and one spacelike normal, with the standard profile
/// cut away from every split wall it meets.
pub fn standard(p: usize, q: usize) -> Result<(ConeProfile, Vec<Hyperplane>)> {
    let s = Signature::new(p, q)?;
    let b = 0.3f64;
    let boost_axis = if p == 1 { 1 } else { 2 };
    let mut normals = vec![vec![0.0; 4]; 3];
    normals[0][0] = 1.0;
    normals[1][0] = b.cosh();
    normals[1][boost_axis] = b.sinh();
    normals[2][boost_axis] = 1.0;
    let terms = vec![
        term((0, 0), (0, 0), Complex64::new(1.0, 0.0)),
        term((1, 0), (1, 1), Complex64::new(0.4, -0.3)),
    ];
    let mut u = ConeProfile::gauss(s, 1.4, 0.3, terms)?;
    for v in &normals {
        if p > 1 || s.quad(v) < 0.0 {
            u = u.with_wall(v);
        }
    }
    let hs = normals
        .iter()
        .zip([0.0, 0.7, 0.4])
        .map(|(v, c)| Hyperplane::new(s, v, c))
        .collect::<Result<_, _>>()?;
    Ok((u, hs))
}

/// Gaussian-envelope profiles with seeded harmonic content, sharing the
/// standard walls.
pub fn family(p: usize, q: usize, count: usize, seed: u64) -> Result<Vec<ConeProfile>> {
    let s = Signature::new(p, q)?;
    let (base, _) = standard(p, q)?;
    let mut r = rng(seed, (10 * p + q) as u64);
    (0..count)
        .map(|k| {
            let lead = Complex64::from_polar(r.random_range(0.6..1.0), r.random_range(0.0..6.2));
            let terms = vec![
                term((0, 0), (0, 0), lead),
                term((1, 0), (1, k % 2), coeff(&mut r, 0.5)),
                term((k % 2, 0), (2, k % 2), coeff(&mut r, 0.3)),
            ];
            let kf = k as f64;
            let mut u = ConeProfile::gauss(s, 1.2 + 0.05 * kf, 0.28 + 0.01 * kf, terms)?;
            u.walls = base.walls.clone();
            if p == 1 && k % 4 == 3 {
                u = u.with_branch(if k % 8 == 3 {
                    Branch::Forward
                } else {
                    Branch::Backward
                })?;
            }
            Ok(u)
        })
        .collect()
}

/// `r^κ e^{-2r}` profiles whose fields have closed forms at every point.
pub fn laguerre_family(p: usize, q: usize, seed: u64) -> Result<Vec<ConeProfile>> {
    let s = Signature::new(p, q)?;
    let mut r = rng(seed, 100 + (10 * p + q) as u64);
    let lag = |power: f64| Radial::Laguerre { power, rate: 2.0 };
    let one = Complex64::new(1.0, 0.0);
    let out = if p == 1 {
        vec![
            ConeProfile::with_radial(s, lag(0.0), vec![term((0, 0), (0, 0), one)])?,
            ConeProfile::with_radial(
                s,
                lag(1.0),
                vec![
                    term((1, 0), (1, 2), one),
                    term((0, 0), (0, 0), coeff(&mut r, 0.5)),
                ],
            )?,
            ConeProfile::with_radial(
                s,
                lag(2.0),
                vec![
                    term((1, 0), (2, 3), coeff(&mut r, 0.6)),
                    term((0, 0), (1, 0), one),
                ],
            )?,
            ConeProfile::with_radial(s, lag(1.0), vec![term((0, 0), (0, 0), one)])?
                .with_branch(Branch::Forward)?,
        ]
    } else {
        vec![
            ConeProfile::with_radial(s, lag(0.0), vec![term((0, 0), (0, 0), one)])?,
            ConeProfile::with_radial(
                s,
                lag(1.0),
                vec![term((0, 0), (0, 0), coeff(&mut r, 0.8) + 0.2)],
            )?,
        ]
    };
    Ok(out)
}
