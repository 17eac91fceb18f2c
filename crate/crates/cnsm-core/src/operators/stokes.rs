//! Stokes operator `A = P(-Laplacian_D)` on discretely divergence-free fields.
//!
//! Divergence-free fields are spanned by one stream-function pair per interior
//! wave vector `(j, k)` plus the highest sine mode of each component. In that
//! orthonormal basis `A` splits into blocks by reflection parity, and each block
//! is handed to the symmetric eigensolver for its lowest eigenpairs.

use super::calculus::Calculus;
use super::field::VectorField;
use super::grid::Grid;
use super::spectrum::{first_gap, Modes, OperatorSpectrum, SpectrumKind};
use crate::error::{CoreError, Result};
use crate::linalg::sym_eig_lowest;
use ndarray::{Array1, Array2};
use std::sync::Arc;

/// Largest grid (cells) for which the dense Stokes matrix may be assembled.
pub const DENSE_VECTOR_LIMIT: usize = 32 * 32;

#[derive(Clone, Copy, Debug)]
pub(crate) enum Coord {
    Stream { k: usize, j: usize, ax: f64, by: f64 },
    NyquistX { k: usize },
    NyquistY { j: usize },
}

#[derive(Clone, Debug)]
pub(crate) struct Block {
    pub coords: Vec<Coord>,
    pub vectors: Array2<f64>,
    pub values: Vec<f64>,
}

impl Block {
    pub fn gather(&self, a: &Array2<f64>, b: &Array2<f64>, nx: usize, ny: usize) -> Array1<f64> {
        Array1::from_iter(self.coords.iter().map(|c| match *c {
            Coord::Stream { k, j, ax, by } => ax * a[[k, j - 1]] + by * b[[k - 1, j]],
            Coord::NyquistX { k } => a[[k, nx - 1]],
            Coord::NyquistY { j } => b[[ny - 1, j]],
        }))
    }

    pub fn scatter(&self, z: &Array1<f64>, a: &mut Array2<f64>, b: &mut Array2<f64>, nx: usize, ny: usize) {
        for (c, &v) in self.coords.iter().zip(z.iter()) {
            match *c {
                Coord::Stream { k, j, ax, by } => {
                    a[[k, j - 1]] += ax * v;
                    b[[k - 1, j]] += by * v;
                }
                Coord::NyquistX { k } => a[[k, nx - 1]] += v,
                Coord::NyquistY { j } => b[[ny - 1, j]] += v,
            }
        }
    }
}

/// Retained Stokes eigenvectors in reduced coordinates.
#[derive(Clone, Debug)]
pub struct StokesModes {
    pub(crate) calculus: Calculus,
    pub(crate) blocks: Vec<Block>,
    /// Global mode `i` lives in column `order[i].1` of block `order[i].0`.
    pub(crate) order: Vec<(usize, usize)>,
}

impl StokesModes {
    pub(crate) fn mode_field(&self, i: usize) -> Option<VectorField> {
        let (bi, col) = *self.order.get(i)?;
        let g = self.calculus.grid;
        let (ny, nx) = g.shape();
        let mut a = Array2::zeros((ny, nx));
        let mut b = Array2::zeros((ny, nx));
        let z = self.blocks[bi].vectors.column(col).to_owned();
        self.blocks[bi].scatter(&z, &mut a, &mut b, nx, ny);
        let w = 1.0 / g.cell_area().sqrt();
        Some(self.calculus.velocity_from_coeffs(&a, &b).scaled(w))
    }
}

/// Matrix-free Stokes operator.
#[derive(Clone, Debug)]
pub struct StokesOperator {
    pub calculus: Calculus,
}

impl StokesOperator {
    pub fn grid(&self) -> Grid {
        self.calculus.grid
    }

    /// `P(-Laplacian_D u)`.
    pub fn apply(&self, u: &VectorField) -> Result<VectorField> {
        let lap = self.calculus.dirichlet_laplacian(u)?;
        self.calculus.leray_project(&lap.scaled(-1.0))
    }

    /// Dense matrix of `P(-Laplacian_D)P` on stacked `[x plane, y plane]` vectors.
    pub fn dense(&self) -> Result<Array2<f64>> {
        let g = self.grid();
        if g.len() > DENSE_VECTOR_LIMIT {
            return Err(CoreError::TooLarge(format!(
                "dense Stokes assembly limited to {DENSE_VECTOR_LIMIT} cells, grid has {}",
                g.len()
            )));
        }
        let n = g.len();
        let mut m = Array2::zeros((2 * n, 2 * n));
        for col in 0..2 * n {
            let mut e = VectorField::zeros(g);
            let (plane, idx) = if col < n { (0, col) } else { (1, col - n) };
            let (iy, ix) = (idx / g.nx, idx % g.nx);
            if plane == 0 {
                e.x[[iy, ix]] = 1.0;
            } else {
                e.y[[iy, ix]] = 1.0;
            }
            let pe = self.calculus.leray_project(&e)?;
            let ae = self.apply(&pe)?;
            for (r, v) in ae.x.iter().chain(ae.y.iter()).enumerate() {
                m[[r, col]] = *v;
            }
        }
        for i in 0..2 * n {
            for j in i + 1..2 * n {
                let v = 0.5 * (m[[i, j]] + m[[j, i]]);
                m[[i, j]] = v;
                m[[j, i]] = v;
            }
        }
        Ok(m)
    }
}

pub fn stokes_operator(grid: Grid) -> StokesOperator {
    StokesOperator { calculus: Calculus::new(grid) }
}

/// Dimension of the discrete divergence-free subspace.
pub fn solenoidal_dimension(grid: &Grid) -> usize {
    grid.nx * grid.ny + 1
}

fn reduced_blocks(c: &Calculus) -> Vec<(Vec<Coord>, Array2<f64>)> {
    let g = c.grid;
    let (ny, nx) = g.shape();
    let my = c.by.cos.t().dot(&c.by.dirichlet).dot(&c.by.cos).mapv(|v| -v);
    let mx = c.bx.cos.t().dot(&c.bx.dirichlet).dot(&c.bx.cos).mapv(|v| -v);
    let mut out = Vec::new();

    for pj in 0..2 {
        for pk in 0..2 {
            let mut coords = Vec::new();
            let mut pos = Array2::from_elem((ny, nx), usize::MAX);
            for k in (1..ny).filter(|k| k % 2 == pk) {
                for j in (1..nx).filter(|j| j % 2 == pj) {
                    let (wx, wy) = (c.bx.wave[j], c.by.wave[k]);
                    let norm = wx.hypot(wy);
                    pos[[k, j]] = coords.len();
                    coords.push(Coord::Stream { k, j, ax: wy / norm, by: -wx / norm });
                }
            }
            let dim = coords.len();
            let mut m = Array2::zeros((dim, dim));
            for (r, cr) in coords.iter().enumerate() {
                let Coord::Stream { k, j, ax, by } = *cr else { unreachable!() };
                for k2 in (1..ny).filter(|k2| k2 % 2 == pk) {
                    let s = pos[[k2, j]];
                    let Coord::Stream { ax: ax2, .. } = coords[s] else { unreachable!() };
                    let mut v = my[[k, k2]];
                    if k2 == k {
                        v += c.bx.wave[j] * c.bx.wave[j];
                    }
                    m[[r, s]] += ax * ax2 * v;
                }
                for j2 in (1..nx).filter(|j2| j2 % 2 == pj) {
                    let s = pos[[k, j2]];
                    let Coord::Stream { by: by2, .. } = coords[s] else { unreachable!() };
                    let mut v = mx[[j, j2]];
                    if j2 == j {
                        v += c.by.wave[k] * c.by.wave[k];
                    }
                    m[[r, s]] += by * by2 * v;
                }
            }
            out.push((coords, m));
        }
    }

    let wxn = c.bx.wave[nx];
    let wyn = c.by.wave[ny];
    for p in 0..2 {
        let ks: Vec<usize> = (0..ny).filter(|k| k % 2 == p).collect();
        let m = Array2::from_shape_fn((ks.len(), ks.len()), |(r, s)| {
            my[[ks[r], ks[s]]] + if r == s { wxn * wxn } else { 0.0 }
        });
        out.push((ks.iter().map(|&k| Coord::NyquistX { k }).collect(), m));
    }
    for p in 0..2 {
        let js: Vec<usize> = (0..nx).filter(|j| j % 2 == p).collect();
        let m = Array2::from_shape_fn((js.len(), js.len()), |(r, s)| {
            mx[[js[r], js[s]]] + if r == s { wyn * wyn } else { 0.0 }
        });
        out.push((js.iter().map(|&j| Coord::NyquistY { j }).collect(), m));
    }
    out
}

/// The `kmax` smallest eigenpairs of the Stokes operator.
pub fn stokes_spectrum(op: &StokesOperator, kmax: usize) -> Result<OperatorSpectrum> {
    let g = op.grid();
    let dim = solenoidal_dimension(&g);
    if kmax == 0 || kmax > dim {
        return Err(CoreError::InvalidArgument(format!(
            "kmax must lie in 1..={dim}, got {kmax}"
        )));
    }
    let c = &op.calculus;
    let mut solved = Vec::new();
    let mut all: Vec<(f64, usize, usize)> = Vec::new();
    for (bi, (coords, m)) in reduced_blocks(c).into_iter().enumerate() {
        if coords.is_empty() {
            solved.push((coords, Vec::new(), Array2::zeros((0, 0))));
            continue;
        }
        let want = kmax.min(coords.len());
        let (vals, vecs) = sym_eig_lowest(&m, want)?;
        for (col, &v) in vals.iter().enumerate() {
            all.push((v, bi, col));
        }
        solved.push((coords, vals, vecs));
    }
    all.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    all.truncate(kmax);

    let mut keep: Vec<Vec<usize>> = vec![Vec::new(); solved.len()];
    for &(_, bi, col) in &all {
        keep[bi].push(col);
    }
    let mut blocks = Vec::with_capacity(solved.len());
    let mut remap: Vec<Vec<usize>> = Vec::with_capacity(solved.len());
    for ((coords, vals, vecs), cols) in solved.into_iter().zip(keep.iter_mut()) {
        cols.sort_unstable();
        let mut map = vec![usize::MAX; vals.len()];
        let mut v = Array2::zeros((coords.len(), cols.len()));
        let mut kept_vals = Vec::with_capacity(cols.len());
        for (new, &old) in cols.iter().enumerate() {
            map[old] = new;
            v.column_mut(new).assign(&vecs.column(old));
            kept_vals.push(vals[old]);
        }
        remap.push(map);
        blocks.push(Block { coords, vectors: v, values: kept_vals });
    }
    let order: Vec<(usize, usize)> = all.iter().map(|&(_, bi, col)| (bi, remap[bi][col])).collect();
    let eigenvalues: Vec<f64> = all.iter().map(|e| e.0).collect();
    let gap = first_gap(&eigenvalues);
    let modes = StokesModes { calculus: c.clone(), blocks, order };
    Ok(OperatorSpectrum {
        kind: SpectrumKind::Stokes,
        grid: g,
        eigenvalues,
        gap,
        modes: Modes::Stokes(Arc::new(modes)),
    })
}
