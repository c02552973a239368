//! Orthonormal Haar transform in 1D and 2D plus the multi-level pyramid.
//!
//! Subband convention, used everywhere in this crate: rows (x axis) are
//! filtered first, then columns (y axis). LH is row-lowpass / column-highpass
//! (horizontal detail), HL the transpose, HH diagonal. The highpass filter is
//! applied as (first - second) / sqrt(2). Inputs must have even (for one
//! level) or 2^S-divisible (for S levels) spatial sides; there is no implicit
//! padding, which keeps the flattened transform strictly orthogonal.

use crate::error::{Error, Result};
use crate::tensor::Tensor;

pub const INV_SQRT2: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// The Haar analysis filters: lowpass h, highpass g, each of unit norm.
pub fn haar_filters() -> ([f64; 2], [f64; 2]) {
    ([INV_SQRT2, INV_SQRT2], [INV_SQRT2, -INV_SQRT2])
}

/// The three detail bands of one decomposition level, all shape-equal.
#[derive(Debug, Clone, PartialEq)]
pub struct SubbandTriple {
    pub lh: Tensor,
    pub hl: Tensor,
    pub hh: Tensor,
}

impl SubbandTriple {
    pub fn shape(&self) -> &[usize] {
        self.lh.shape()
    }

    pub fn sq_norm(&self) -> f64 {
        self.lh.sq_norm() + self.hl.sq_norm() + self.hh.sq_norm()
    }
}

/// Multi-level decomposition: the coarsest LL band plus detail triples per
/// level. `highs[0]` is the finest level (k = 1), `highs[levels-1]` the
/// coarsest (k = S).
#[derive(Debug, Clone, PartialEq)]
pub struct WaveletPyramid {
    pub levels: usize,
    pub ll: Tensor,
    pub highs: Vec<SubbandTriple>,
}

impl WaveletPyramid {
    /// Detail triple at scale k (1 = finest, levels = coarsest).
    pub fn high(&self, k: usize) -> &SubbandTriple {
        &self.highs[k - 1]
    }

    pub fn sq_norm(&self) -> f64 {
        self.ll.sq_norm() + self.highs.iter().map(|t| t.sq_norm()).sum::<f64>()
    }
}

fn check_even_sides(op: &str, h: usize, w: usize) -> Result<()> {
    if h % 2 != 0 || w % 2 != 0 {
        return Err(Error::invalid(op, format!("spatial sides must be even, got {h}x{w}")));
    }
    Ok(())
}

/// One-level 2D Haar analysis, channelwise. Returns (ll, lh, hl, hh), each
/// with halved spatial sides.
pub fn dwt2(image: &Tensor) -> Result<(Tensor, Tensor, Tensor, Tensor)> {
    let (c, h, w) = image.as_chw()?;
    check_even_sides("dwt2", h, w)?;
    let (hh2, wh) = (h / 2, w / 2);
    let out_shape = [c, hh2, wh];
    let mut ll = Tensor::zeros(&out_shape);
    let mut lh = Tensor::zeros(&out_shape);
    let mut hl = Tensor::zeros(&out_shape);
    let mut hh = Tensor::zeros(&out_shape);

    for ch in 0..c {
        // Row pass along x.
        let mut lo = vec![0.0; h * wh];
        let mut hi = vec![0.0; h * wh];
        for y in 0..h {
            for j in 0..wh {
                let a = image.at3(ch, y, 2 * j);
                let b = image.at3(ch, y, 2 * j + 1);
                lo[y * wh + j] = (a + b) * INV_SQRT2;
                hi[y * wh + j] = (a - b) * INV_SQRT2;
            }
        }
        // Column pass along y.
        for i in 0..hh2 {
            for j in 0..wh {
                let (l0, l1) = (lo[(2 * i) * wh + j], lo[(2 * i + 1) * wh + j]);
                let (h0, h1) = (hi[(2 * i) * wh + j], hi[(2 * i + 1) * wh + j]);
                ll.set3(ch, i, j, (l0 + l1) * INV_SQRT2);
                lh.set3(ch, i, j, (l0 - l1) * INV_SQRT2);
                hl.set3(ch, i, j, (h0 + h1) * INV_SQRT2);
                hh.set3(ch, i, j, (h0 - h1) * INV_SQRT2);
            }
        }
    }
    Ok((ll, lh, hl, hh))
}

/// Exact inverse of [`dwt2`]; the four subbands must be shape-equal.
pub fn idwt2(ll: &Tensor, lh: &Tensor, hl: &Tensor, hh: &Tensor) -> Result<Tensor> {
    for (name, band) in [("lh", lh), ("hl", hl), ("hh", hh)] {
        if band.shape() != ll.shape() {
            return Err(Error::shape(
                format!("idwt2 subband {name}"),
                format!("{:?}", ll.shape()),
                format!("{:?}", band.shape()),
            ));
        }
    }
    let (c, hs, ws) = ll.as_chw()?;
    let (h, w) = (hs * 2, ws * 2);
    let mut out = Tensor::zeros(&[c, h, w]);

    for ch in 0..c {
        // Invert the column pass.
        let mut lo = vec![0.0; h * ws];
        let mut hi = vec![0.0; h * ws];
        for i in 0..hs {
            for j in 0..ws {
                let (l, d) = (ll.at3(ch, i, j), lh.at3(ch, i, j));
                lo[(2 * i) * ws + j] = (l + d) * INV_SQRT2;
                lo[(2 * i + 1) * ws + j] = (l - d) * INV_SQRT2;
                let (v, g) = (hl.at3(ch, i, j), hh.at3(ch, i, j));
                hi[(2 * i) * ws + j] = (v + g) * INV_SQRT2;
                hi[(2 * i + 1) * ws + j] = (v - g) * INV_SQRT2;
            }
        }
        // Invert the row pass.
        for y in 0..h {
            for j in 0..ws {
                let (l, d) = (lo[y * ws + j], hi[y * ws + j]);
                out.set3(ch, y, 2 * j, (l + d) * INV_SQRT2);
                out.set3(ch, y, 2 * j + 1, (l - d) * INV_SQRT2);
            }
        }
    }
    Ok(out)
}

/// Recursive decomposition of successive LL bands down to `levels`.
pub fn decompose(image: &Tensor, levels: usize) -> Result<WaveletPyramid> {
    if levels == 0 {
        return Err(Error::invalid("decompose", "levels must be >= 1"));
    }
    let (_, h, w) = image.as_chw()?;
    let div = 1usize << levels;
    if h % div != 0 || w % div != 0 {
        return Err(Error::invalid(
            "decompose",
            format!("spatial sides {h}x{w} not divisible by 2^{levels}"),
        ));
    }
    let mut highs = Vec::with_capacity(levels);
    let mut current = image.clone();
    for _ in 0..levels {
        let (ll, lh, hl, hh) = dwt2(&current)?;
        highs.push(SubbandTriple { lh, hl, hh });
        current = ll;
    }
    Ok(WaveletPyramid {
        levels,
        ll: current,
        highs,
    })
}

/// Exact inverse of [`decompose`].
pub fn reconstruct(pyramid: &WaveletPyramid) -> Result<Tensor> {
    let mut current = pyramid.ll.clone();
    for triple in pyramid.highs.iter().rev() {
        current = idwt2(&current, &triple.lh, &triple.hl, &triple.hh)?;
    }
    Ok(current)
}

/// Flattens a single-channel pyramid into a vector with a fixed coefficient
/// order: coarsest LL first, then (lh, hl, hh) from the coarsest level to the
/// finest. Together with [`unflatten_pyramid`] this realizes the transform as
/// an orthogonal matrix acting on flattened images.
pub fn flatten_pyramid(pyramid: &WaveletPyramid) -> Tensor {
    let mut data = Vec::new();
    data.extend_from_slice(pyramid.ll.data());
    for triple in pyramid.highs.iter().rev() {
        data.extend_from_slice(triple.lh.data());
        data.extend_from_slice(triple.hl.data());
        data.extend_from_slice(triple.hh.data());
    }
    Tensor::vector(data)
}

/// Inverse of [`flatten_pyramid`] for a single-channel square image of side
/// `side` decomposed to `levels`.
pub fn unflatten_pyramid(flat: &Tensor, side: usize, levels: usize) -> Result<WaveletPyramid> {
    if flat.numel() != side * side {
        return Err(Error::shape(
            "unflatten_pyramid",
            format!("{} coefficients", side * side),
            format!("{}", flat.numel()),
        ));
    }
    let data = flat.data();
    let mut pos = 0;
    let mut take = |n: usize| -> Vec<f64> {
        let s = data[pos..pos + n].to_vec();
        pos += n;
        s
    };
    let coarse = side >> levels;
    let ll = Tensor::from_parts(vec![1, coarse, coarse], take(coarse * coarse));
    let mut highs_rev = Vec::with_capacity(levels);
    for k in (1..=levels).rev() {
        let s = side >> k;
        let shape = vec![1, s, s];
        let lh = Tensor::from_parts(shape.clone(), take(s * s));
        let hl = Tensor::from_parts(shape.clone(), take(s * s));
        let hh = Tensor::from_parts(shape, take(s * s));
        highs_rev.push(SubbandTriple { lh, hl, hh });
    }
    highs_rev.reverse();
    Ok(WaveletPyramid {
        levels,
        ll,
        highs: highs_rev,
    })
}

/// Applies the flattened transform: x (flat image, side^2) -> A x.
pub fn apply_flat_forward(x: &Tensor, side: usize, levels: usize) -> Result<Tensor> {
    let image = x.reshape(&[1, side, side])?;
    Ok(flatten_pyramid(&decompose(&image, levels)?))
}

/// Applies the transpose (= inverse) of the flattened transform: y -> A^T y.
pub fn apply_flat_inverse(y: &Tensor, side: usize, levels: usize) -> Result<Tensor> {
    let pyramid = unflatten_pyramid(y, side, levels)?;
    let image = reconstruct(&pyramid)?;
    image.reshape(&[side * side])
}

/// Materializes the flattened transform as a dense matrix (row-major,
/// d x d with d = side^2) by probing with basis vectors. Test and
/// verification tool; the transform itself never forms this matrix.
pub fn flat_operator_matrix(side: usize, levels: usize) -> Result<Vec<Vec<f64>>> {
    let d = side * side;
    let mut columns = Vec::with_capacity(d);
    for j in 0..d {
        let mut e = Tensor::zeros(&[d]);
        e.data_mut()[j] = 1.0;
        columns.push(apply_flat_forward(&e, side, levels)?);
    }
    let mut rows = vec![vec![0.0; d]; d];
    for (j, col) in columns.iter().enumerate() {
        for i in 0..d {
            rows[i][j] = col.data()[i];
        }
    }
    Ok(rows)
}
