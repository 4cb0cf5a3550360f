use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::diffcore::nn::{init_linear, init_mlp_block, linear_eval, linear_node, mlp_block_eval, mlp_block_node, Bound};
use crate::diffcore::{Graph, NodeId, ParamSet, Tensor};
use crate::error::{Error, Result};
use crate::ingest::format::{dim_u32, put_f32s, put_header, put_u32, read_bytes, write_bytes, Reader};

pub const MODEL_MAGIC: &[u8; 4] = b"BFVM";
pub const DEFAULT_H1: usize = 512;
pub const DEFAULT_H2: usize = 256;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VaeDims {
    pub v: usize,
    pub m: usize,
    pub h1: usize,
    pub h2: usize,
}

impl VaeDims {
    pub fn new(v: usize, m: usize) -> Self {
        Self {
            v,
            m,
            h1: DEFAULT_H1,
            h2: DEFAULT_H2,
        }
    }
}

/// Encoder `V → h1 → h2 → (μ, log σ²)` and decoder `M → h2 → h1 → V`.
#[derive(Clone, Debug, PartialEq)]
pub struct VaeModel {
    dims: VaeDims,
    params: ParamSet,
}

fn fresh_params(d: VaeDims, rng: &mut ChaCha8Rng) -> Result<ParamSet> {
    let mut p = ParamSet::new();
    init_mlp_block(&mut p, "enc.h1", d.v, d.h1, rng)?;
    init_mlp_block(&mut p, "enc.h2", d.h1, d.h2, rng)?;
    init_linear(&mut p, "enc.mu", d.h2, d.m, rng)?;
    init_linear(&mut p, "enc.logvar", d.h2, d.m, rng)?;
    init_mlp_block(&mut p, "dec.h2", d.m, d.h2, rng)?;
    init_mlp_block(&mut p, "dec.h1", d.h2, d.h1, rng)?;
    init_linear(&mut p, "dec.out", d.h1, d.v, rng)?;
    Ok(p)
}

impl VaeModel {
    pub fn init(dims: VaeDims, seed: u64) -> Result<Self> {
        if dims.v == 0 || dims.m == 0 || dims.h1 == 0 || dims.h2 == 0 {
            return Err(Error::Contract(format!("all VAE dimensions must be positive: {dims:?}")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Ok(Self {
            dims,
            params: fresh_params(dims, &mut rng)?,
        })
    }

    pub fn dims(&self) -> VaeDims {
        self.dims
    }

    pub fn params(&self) -> &ParamSet {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut ParamSet {
        &mut self.params
    }

    pub(crate) fn check_width(&self, e: &Tensor) -> Result<()> {
        let (_, v) = e.expect_rank2("embeddings")?;
        if v != self.dims.v {
            return Err(Error::Dimension(format!(
                "model expects embedding width {}, got {v}",
                self.dims.v
            )));
        }
        Ok(())
    }
}

/// Deterministic encoder pass: `(μ, log σ²)`.
pub fn encode(model: &VaeModel, e: &Tensor) -> Result<(Tensor, Tensor)> {
    model.check_width(e)?;
    let p = &model.params;
    let h = mlp_block_eval(p, "enc.h1", e)?;
    let h = mlp_block_eval(p, "enc.h2", &h)?;
    Ok((linear_eval(p, "enc.mu", &h)?, linear_eval(p, "enc.logvar", &h)?))
}

/// Decoder pass from latent codes to reconstructed embeddings.
pub fn decode(model: &VaeModel, z: &Tensor) -> Result<Tensor> {
    let p = &model.params;
    let h = mlp_block_eval(p, "dec.h2", z)?;
    let h = mlp_block_eval(p, "dec.h1", &h)?;
    linear_eval(p, "dec.out", &h)
}

/// `z = μ + exp(logvar / 2) ⊙ noise`.
pub fn reparameterize(mu: &Tensor, logvar: &Tensor, noise: &Tensor) -> Result<Tensor> {
    mu.expect_same_shape(logvar)?;
    mu.expect_same_shape(noise)?;
    let sigma_eps = logvar.zip_map(noise, |lv, e| (0.5 * lv).exp() * e)?;
    mu.zip_map(&sigma_eps, |m, s| m + s)
}

pub(crate) fn encode_node(g: &mut Graph, p: &Bound, e: NodeId) -> Result<(NodeId, NodeId)> {
    let h = mlp_block_node(g, p, "enc.h1", e)?;
    let h = mlp_block_node(g, p, "enc.h2", h)?;
    Ok((linear_node(g, p, "enc.mu", h)?, linear_node(g, p, "enc.logvar", h)?))
}

pub(crate) fn decode_node(g: &mut Graph, p: &Bound, z: NodeId) -> Result<NodeId> {
    let h = mlp_block_node(g, p, "dec.h2", z)?;
    let h = mlp_block_node(g, p, "dec.h1", h)?;
    linear_node(g, p, "dec.out", h)
}

pub fn encode_model(model: &VaeModel) -> Result<Vec<u8>> {
    let d = model.dims;
    let mut out = Vec::new();
    put_header(&mut out, MODEL_MAGIC);
    for (x, what) in [(d.v, "V"), (d.m, "M"), (d.h1, "h1"), (d.h2, "h2")] {
        put_u32(&mut out, dim_u32(x, what)?);
    }
    for (_, p) in model.params.iter() {
        put_f32s(&mut out, p.value.data());
    }
    Ok(out)
}

pub fn decode_model(bytes: &[u8], path: &Path) -> Result<VaeModel> {
    let mut r = Reader::new(bytes, path);
    r.magic(MODEL_MAGIC)?;
    let mut dims = [0usize; 4];
    for d in &mut dims {
        *d = r.u32()? as usize;
    }
    let [v, m, h1, h2] = dims;
    let mut model = VaeModel::init(VaeDims { v, m, h1, h2 }, 0)
        .map_err(|e| Error::format(path, e.to_string()))?;
    for (name, p) in model.params.iter_mut() {
        let vals = r.f32s(p.value.numel())?;
        if vals.iter().any(|x| !x.is_finite()) {
            return Err(Error::format(path, format!("non-finite values in {name}")));
        }
        for (d, s) in p.value.data_mut().iter_mut().zip(vals) {
            *d = f64::from(s);
        }
    }
    r.finish()?;
    Ok(model)
}

pub fn write_model(path: impl AsRef<Path>, model: &VaeModel) -> Result<()> {
    write_bytes(path.as_ref(), &encode_model(model)?)
}

pub fn read_model(path: impl AsRef<Path>) -> Result<VaeModel> {
    let path = path.as_ref();
    decode_model(&read_bytes(path)?, path)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> VaeDims {
        VaeDims {
            v: 4,
            m: 3,
            h1: 8,
            h2: 6,
        }
    }

    fn input() -> Tensor {
        Tensor::new(vec![2, 4], vec![0.3, -1.2, 0.8, 0.1, 2.0, 0.4, -0.7, 1.1]).unwrap()
    }

    #[test]
    fn encode_is_deterministic_with_width_m() {
        let m = VaeModel::init(small(), 4).unwrap();
        let (mu, lv) = encode(&m, &input()).unwrap();
        assert_eq!(mu.shape(), &[2, 3]);
        assert_eq!(lv.shape(), &[2, 3]);
        assert_eq!(encode(&m, &input()).unwrap(), (mu, lv));
        assert_eq!(VaeModel::init(small(), 4).unwrap(), m);
    }

    #[test]
    fn zero_heads_give_zero_outputs() {
        let mut m = VaeModel::init(small(), 1).unwrap();
        for (name, p) in m.params_mut().iter_mut() {
            if name.starts_with("enc.mu") || name.starts_with("enc.logvar") {
                p.value.data_mut().iter_mut().for_each(|v| *v = 0.0);
            }
        }
        let (mu, lv) = encode(&m, &input()).unwrap();
        assert!(mu.data().iter().chain(lv.data()).all(|&v| v == 0.0));
    }

    #[test]
    fn wrong_width_is_a_dimension_error() {
        let m = VaeModel::init(small(), 1).unwrap();
        assert!(matches!(encode(&m, &Tensor::zeros(&[2, 5])), Err(Error::Dimension(_))));
    }

    #[test]
    fn reparameterize_cases() {
        let mu = Tensor::new(vec![1, 2], vec![0.5, -1.0]).unwrap();
        let eps = Tensor::new(vec![1, 2], vec![0.3, -2.0]).unwrap();
        let zero = Tensor::zeros(&[1, 2]);
        assert_eq!(reparameterize(&mu, &zero, &zero).unwrap(), mu);
        assert_eq!(reparameterize(&mu, &zero, &eps).unwrap().data(), &[0.8, -3.0]);
        let ln4 = Tensor::full(&[1, 2], 4f64.ln());
        let z = reparameterize(&mu, &ln4, &eps).unwrap();
        assert!((z.data()[0] - 1.1).abs() < 1e-12);
        assert!((z.data()[1] + 5.0).abs() < 1e-12);
    }

    #[test]
    fn file_roundtrip() {
        let m = VaeModel::init(small(), 2).unwrap();
        let bytes = encode_model(&m).unwrap();
        assert_eq!(&bytes[..4], b"BFVM");
        let back = decode_model(&bytes, Path::new("mem")).unwrap();
        assert_eq!(back.dims(), m.dims());
        assert_eq!(encode_model(&back).unwrap(), bytes);
        let mut bad = bytes.clone();
        bad.push(0);
        assert!(decode_model(&bad, Path::new("mem")).is_err());
    }
}
