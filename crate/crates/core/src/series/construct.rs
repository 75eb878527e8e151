//! Coefficients in `c_0` whose series against a non-summable `Σ|f_i|` diverges.

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::numeric::Scalar;
use crate::sequence::{SequenceSpec, SignBlocks};
use crate::series::CoefficientSpec;

pub const DEFAULT_BUDGET: u64 = 10_000_000;

/// One block `start..=end` of the construction, with constant `|a_i|`.
#[derive(Clone, Debug, PartialEq)]
pub struct Block<T> {
    pub t: u32,
    pub start: u64,
    pub end: u64,
    /// `2^-t`.
    pub coefficient: T,
    /// `Σ |f_i|` over the block; exceeds `4^t`.
    pub abs_sum: T,
    /// `Σ a_i f_i` over the block; exceeds `2^t`.
    pub signed_sum: T,
}

impl<T: Scalar> Block<T> {
    pub fn to_json(&self) -> Value {
        json!({
            "t": self.t,
            "start": self.start,
            "m": self.end,
            "coefficient": self.coefficient.to_json(),
            "abs_sum": self.abs_sum.to_json(),
            "block_sum": self.signed_sum.to_json(),
        })
    }
}

#[derive(Clone, Debug)]
pub struct Construction<T> {
    pub coeffs: CoefficientSpec,
    pub blocks: Vec<Block<T>>,
}

/// Block `t` takes `a_i = sign(f_i)·2^-t` (with `sign(0) = +1`) and closes at
/// the first index where its `Σ |f_i|` exceeds `4^t`.
pub fn construct_divergent_coeffs<T: Scalar>(
    f: &SequenceSpec,
    num_blocks: u32,
    budget: u64,
) -> Result<Construction<T>> {
    let (blocks, err) = build_blocks(f, num_blocks, budget)?;
    if let Some(e) = err {
        return Err(e);
    }
    Ok(Construction {
        coeffs: CoefficientSpec::constructed(f)?,
        blocks,
    })
}

/// Builds blocks until `num_blocks` are complete or `budget` indices are
/// spent. Returns the completed blocks together with the budget error, if
/// any.
pub fn build_blocks<T: Scalar>(
    f: &SequenceSpec,
    num_blocks: u32,
    budget: u64,
) -> Result<(Vec<Block<T>>, Option<Error>)> {
    if f.dim() != 1 {
        return Err(Error::Dimension {
            expected: 1,
            got: f.dim(),
        });
    }
    if num_blocks == 0 {
        return Err(Error::invalid("at least one block is required"));
    }
    let mut signs = SignBlocks::<T>::new();
    let mut blocks = Vec::with_capacity(num_blocks as usize);
    let mut start = 1u64;
    let mut abs_sum = T::zero();
    let mut signed_sum = T::zero();
    for (i, v) in f.stream::<T>().take(budget as usize).enumerate() {
        let v = v?.into_first();
        let t = signs.block;
        let coefficient = signs.coefficient.clone();
        let a = signs.next(&v);
        abs_sum = abs_sum + v.abs();
        signed_sum = signed_sum + a * v;
        if signs.block != t {
            let end = i as u64 + 1;
            blocks.push(Block {
                t,
                start,
                end,
                coefficient,
                abs_sum: std::mem::replace(&mut abs_sum, T::zero()),
                signed_sum: std::mem::replace(&mut signed_sum, T::zero()),
            });
            if blocks.len() == num_blocks as usize {
                return Ok((blocks, None));
            }
            start = end + 1;
        }
    }
    let err = Error::Budget {
        budget,
        block: signs.block,
        completed: blocks.len(),
        last_sum: abs_sum.render(),
    };
    Ok((blocks, Some(err)))
}
