use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::fs;
use std::path::{Path, PathBuf};

use super::model::{
    build_model_with, check_request, default_beta, LaguerreBasis, SectorSpectralModel,
};
use crate::dunkl::MultiplicityData;
use crate::error::{KappaError, Result};

const FORMAT: u32 = 1;

/// JSON companion of a cached model file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CacheSidecar {
    pub format: u32,
    pub dim: usize,
    pub k: Vec<f64>,
    pub a: f64,
    pub m: usize,
    pub n: usize,
    pub beta: f64,
    pub sha256: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CacheOutcome {
    Hit,
    Miss,
    /// A file was present but failed validation.
    Rebuilt,
}

/// One binary file per `(N, k, a, m, n)` plus a checksum sidecar.
#[derive(Clone, Debug)]
pub struct ModelCache {
    dir: PathBuf,
}

fn header(md: &MultiplicityData, m: usize, n: usize) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(&(md.dim() as u64).to_le_bytes());
    for k in md.k() {
        out.extend_from_slice(&k.to_le_bytes());
    }
    out.extend_from_slice(&md.a().to_le_bytes());
    out.extend_from_slice(&(m as u64).to_le_bytes());
    out.extend_from_slice(&(n as u64).to_le_bytes());
    out
}

fn encode(model: &SectorSpectralModel) -> Vec<u8> {
    let mut out = header(&model.md, model.m(), model.n());
    for l in &model.eigenvalues {
        out.extend_from_slice(&l.to_le_bytes());
    }
    for v in model.eigenvectors.iter() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

fn read_f64s(bytes: &[u8]) -> Vec<f64> {
    bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")))
        .collect()
}

impl ModelCache {
    pub fn new(dir: impl Into<PathBuf>) -> Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir)?;
        Ok(ModelCache { dir })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn paths(&self, md: &MultiplicityData, m: usize, n: usize) -> (PathBuf, PathBuf) {
        let key = hex::encode(&Sha256::digest(header(md, m, n))[..8]);
        let base = format!("sector-N{}-m{}-n{}-{}", md.dim(), m, n, key);
        (
            self.dir.join(format!("{base}.bin")),
            self.dir.join(format!("{base}.json")),
        )
    }

    /// Loads the model if a valid file exists, otherwise builds and stores it.
    pub fn get_or_build(
        &self,
        md: &MultiplicityData,
        m: usize,
        n: usize,
    ) -> Result<(SectorSpectralModel, CacheOutcome)> {
        check_request(md, m, n)?;
        let (bin, json) = self.paths(md, m, n);
        let outcome = if bin.exists() || json.exists() {
            match self.load(md, m, n, &bin, &json) {
                Ok(model) => return Ok((model, CacheOutcome::Hit)),
                Err(e) => {
                    log::warn!("discarding cached model {}: {e}", bin.display());
                    CacheOutcome::Rebuilt
                }
            }
        } else {
            CacheOutcome::Miss
        };
        let model = build_model_with(md, m, n, default_beta(md))?;
        self.store(&model, &bin, &json)?;
        Ok((model, outcome))
    }

    fn load(
        &self,
        md: &MultiplicityData,
        m: usize,
        n: usize,
        bin: &Path,
        json: &Path,
    ) -> Result<SectorSpectralModel> {
        let side: CacheSidecar = serde_json::from_slice(&fs::read(json)?)?;
        let bytes = fs::read(bin)?;
        if hex::encode(Sha256::digest(&bytes)) != side.sha256 {
            return Err(KappaError::Cache("checksum mismatch".into()));
        }
        let head = header(md, m, n);
        let beta = default_beta(md);
        if side.format != FORMAT || side.beta != beta || !bytes.starts_with(&head) {
            return Err(KappaError::Cache("key or format mismatch".into()));
        }
        let body = read_f64s(&bytes[head.len()..]);
        if body.len() != n + n * n {
            return Err(KappaError::Cache(format!(
                "expected {} values, found {}",
                n + n * n,
                body.len()
            )));
        }
        let basis = LaguerreBasis::new(md, m, n, beta)?;
        Ok(SectorSpectralModel {
            md: md.clone(),
            basis,
            eigenvalues: body[..n].to_vec(),
            eigenvectors: DMatrix::from_column_slice(n, n, &body[n..]),
            retained: 2 * n / 3,
        })
    }

    fn store(&self, model: &SectorSpectralModel, bin: &Path, json: &Path) -> Result<()> {
        let bytes = encode(model);
        let side = CacheSidecar {
            format: FORMAT,
            dim: model.md.dim(),
            k: model.md.k().to_vec(),
            a: model.md.a(),
            m: model.m(),
            n: model.n(),
            beta: model.basis.beta,
            sha256: hex::encode(Sha256::digest(&bytes)),
        };
        // Write-then-rename so concurrent readers never see a partial file.
        let tmp_bin = bin.with_extension(format!("bin.{}.tmp", std::process::id()));
        let tmp_json = json.with_extension(format!("json.{}.tmp", std::process::id()));
        fs::write(&tmp_bin, &bytes)?;
        fs::write(&tmp_json, serde_json::to_vec_pretty(&side)?)?;
        fs::rename(&tmp_bin, bin)?;
        fs::rename(&tmp_json, json)?;
        Ok(())
    }
}
