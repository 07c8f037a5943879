//! Binary container for networks, optimiser state and counters.
//!
//! Layout (all integers and floats little-endian):
//! `magic[8] version:u32 config_hash:u64`, then three sections, each
//! prefixed with a `u32` count: counters (`name u64`), float vectors
//! (`name len:u32 f64*`), networks (`name layers:u32 (in:u32 out:u32
//! act:u8)* blobs`), optimisers (`name step:u64 lr b1 b2 eps m-blobs
//! v-blobs`, shaped like the network with the same name). Names are `u16`
//! length-prefixed UTF-8.

use std::path::Path;

use ndarray::{Array1, Array2};

use super::adam::Adam;
use super::mlp::{Activation, Dense, Gradients, Mlp};
use crate::{Error, Result};

pub const MAGIC: &[u8; 8] = b"GEONAVCK";
pub const VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Checkpoint {
    pub config_hash: u64,
    pub counters: Vec<(String, u64)>,
    pub vectors: Vec<(String, Vec<f64>)>,
    pub networks: Vec<(String, Mlp)>,
    pub optimizers: Vec<(String, Adam)>,
}

impl Checkpoint {
    pub fn counter(&self, name: &str) -> Option<u64> {
        self.counters.iter().find(|(n, _)| n == name).map(|(_, v)| *v)
    }

    pub fn vector(&self, name: &str) -> Option<&[f64]> {
        self.vectors
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v.as_slice())
    }

    pub fn network(&self, name: &str) -> Option<&Mlp> {
        self.networks.iter().find(|(n, _)| n == name).map(|(_, v)| v)
    }

    pub fn optimizer(&self, name: &str) -> Option<&Adam> {
        self.optimizers.iter().find(|(n, _)| n == name).map(|(_, v)| v)
    }

    pub fn encode(&self) -> Vec<u8> {
        let mut w = Writer(Vec::new());
        w.0.extend_from_slice(MAGIC);
        w.u32(VERSION);
        w.u64(self.config_hash);
        w.u32(self.counters.len() as u32);
        for (name, v) in &self.counters {
            w.name(name);
            w.u64(*v);
        }
        w.u32(self.vectors.len() as u32);
        for (name, v) in &self.vectors {
            w.name(name);
            w.u32(v.len() as u32);
            v.iter().for_each(|x| w.f64(*x));
        }
        w.u32(self.networks.len() as u32);
        for (name, net) in &self.networks {
            w.name(name);
            w.u32(net.layers().len() as u32);
            for l in net.layers() {
                w.u32(l.inputs() as u32);
                w.u32(l.outputs() as u32);
                w.0.push(l.activation.code());
            }
            for l in net.layers() {
                l.weight.iter().for_each(|x| w.f64(*x));
                l.bias.iter().for_each(|x| w.f64(*x));
            }
        }
        w.u32(self.optimizers.len() as u32);
        for (name, opt) in &self.optimizers {
            w.name(name);
            w.u64(opt.step);
            w.f64(opt.lr);
            w.f64(opt.beta1);
            w.f64(opt.beta2);
            w.f64(opt.eps);
            for g in [&opt.m, &opt.v] {
                for (gw, gb) in &g.layers {
                    gw.iter().for_each(|x| w.f64(*x));
                    gb.iter().for_each(|x| w.f64(*x));
                }
            }
        }
        w.0
    }

    pub fn decode(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader { buf: bytes, pos: 0 };
        if r.take(8)? != MAGIC {
            return Err(Error::Checkpoint("bad magic, not a checkpoint file".into()));
        }
        let version = r.u32()?;
        if version != VERSION {
            return Err(Error::Checkpoint(format!(
                "unsupported checkpoint version {version}"
            )));
        }
        let mut ck = Checkpoint {
            config_hash: r.u64()?,
            ..Default::default()
        };
        for _ in 0..r.u32()? {
            let name = r.name()?;
            ck.counters.push((name, r.u64()?));
        }
        for _ in 0..r.u32()? {
            let name = r.name()?;
            let n = r.u32()? as usize;
            ck.vectors.push((name, r.f64s(n)?));
        }
        for _ in 0..r.u32()? {
            let name = r.name()?;
            let n_layers = r.u32()? as usize;
            let mut shapes = Vec::with_capacity(n_layers.min(64));
            for _ in 0..n_layers {
                let i = r.u32()? as usize;
                let o = r.u32()? as usize;
                let act = Activation::from_code(r.u8()?)
                    .ok_or_else(|| Error::Checkpoint("unknown activation code".into()))?;
                shapes.push((i, o, act));
            }
            let mut layers = Vec::with_capacity(n_layers);
            for (i, o, act) in shapes {
                let w = Array2::from_shape_vec((i, o), r.f64s(i * o)?)
                    .map_err(|e| Error::Checkpoint(e.to_string()))?;
                let b = Array1::from_vec(r.f64s(o)?);
                layers.push(Dense {
                    weight: w,
                    bias: b,
                    activation: act,
                });
            }
            let net = Mlp::from_layers(layers).map_err(|e| Error::Checkpoint(e.to_string()))?;
            ck.networks.push((name, net));
        }
        for _ in 0..r.u32()? {
            let name = r.name()?;
            let net = ck.network(&name).ok_or_else(|| {
                Error::Checkpoint(format!("optimiser {name:?} has no matching network"))
            })?;
            let mut opt = Adam::new(net, 0.0);
            opt.step = r.u64()?;
            opt.lr = r.f64()?;
            opt.beta1 = r.f64()?;
            opt.beta2 = r.f64()?;
            opt.eps = r.f64()?;
            for g in [&mut opt.m, &mut opt.v] {
                read_grads(&mut r, g)?;
            }
            ck.optimizers.push((name, opt));
        }
        if r.pos != bytes.len() {
            return Err(Error::Checkpoint("trailing bytes after checkpoint".into()));
        }
        Ok(ck)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.encode()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        Self::decode(&bytes)
    }
}

fn read_grads(r: &mut Reader<'_>, g: &mut Gradients) -> Result<()> {
    for (gw, gb) in &mut g.layers {
        let w = r.f64s(gw.len())?;
        gw.iter_mut().zip(w).for_each(|(a, b)| *a = b);
        let b = r.f64s(gb.len())?;
        gb.iter_mut().zip(b).for_each(|(a, b)| *a = b);
    }
    Ok(())
}

struct Writer(Vec<u8>);

impl Writer {
    fn u32(&mut self, v: u32) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn u64(&mut self, v: u64) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn f64(&mut self, v: f64) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn name(&mut self, s: &str) {
        self.0.extend_from_slice(&(s.len() as u16).to_le_bytes());
        self.0.extend_from_slice(s.as_bytes());
    }
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.buf.len())
            .ok_or_else(|| Error::Checkpoint("truncated checkpoint".into()))?;
        let s = &self.buf[self.pos..end];
        self.pos = end;
        Ok(s)
    }
    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }
    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }
    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
    fn f64s(&mut self, n: usize) -> Result<Vec<f64>> {
        let bytes = self.take(n.checked_mul(8).ok_or_else(|| {
            Error::Checkpoint("blob size overflow".into())
        })?)?;
        Ok(bytes
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect())
    }
    fn name(&mut self) -> Result<String> {
        let n = u16::from_le_bytes(self.take(2)?.try_into().unwrap()) as usize;
        String::from_utf8(self.take(n)?.to_vec())
            .map_err(|_| Error::Checkpoint("name is not UTF-8".into()))
    }
}
