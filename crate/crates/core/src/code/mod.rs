//! Parity-check matrices, their Tanner graphs and systematic encoders.

pub mod alist;
pub mod construct;
pub mod encoder;
pub mod matrix;

pub use construct::{construct_regular, RegularParams};
pub use encoder::{rank, Encoder};
pub use matrix::{Edge, ParityCheckMatrix, TannerGraph};

use crate::error::Result;
use crate::gf::Field;

/// A mother code with every derived view the simulator needs.
#[derive(Clone, Debug)]
pub struct MotherCode {
    pub field: Field,
    pub h: ParityCheckMatrix,
    pub graph: TannerGraph,
    pub encoder: Encoder,
}

impl MotherCode {
    pub fn from_matrix(field: Field, h: ParityCheckMatrix) -> Result<Self> {
        let encoder = Encoder::new(&h, &field)?;
        let graph = TannerGraph::new(&h);
        Ok(MotherCode {
            field,
            h,
            graph,
            encoder,
        })
    }

    pub fn regular(field: Field, params: RegularParams, seed: u64) -> Result<Self> {
        let h = construct_regular(params, &field, seed)?;
        Self::from_matrix(field, h)
    }

    pub fn n(&self) -> usize {
        self.h.cols()
    }

    pub fn k(&self) -> usize {
        self.encoder.k()
    }

    /// K / N.
    pub fn rate(&self) -> f64 {
        self.k() as f64 / self.n() as f64
    }
}
