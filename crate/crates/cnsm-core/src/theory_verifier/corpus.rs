use crate::operators::{leray_project, Grid, ScalarField, VectorField};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Resolution-independent description of a test field, sampled on any grid.
#[derive(Clone, Debug, PartialEq)]
pub enum Profile {
    /// `sum a_jk cos(j pi x / lx) cos(k pi y / ly)` over a low mode band.
    Smooth { coeffs: Vec<(usize, usize, f64)> },
    /// Independent values on a coarse `cells x cells` lattice, constant per block.
    Rough { cells: usize, values: Vec<f64> },
    /// Gaussian bump with centre and width in units of the domain size.
    Bump { x0: f64, y0: f64, width: f64, sign: f64 },
}

impl Profile {
    pub fn sample(&self, g: Grid) -> ScalarField {
        match self {
            Profile::Smooth { coeffs } => ScalarField::from_fn(g, |x, y| {
                coeffs
                    .iter()
                    .map(|&(j, k, a)| {
                        a * (j as f64 * std::f64::consts::PI * x / g.lx).cos()
                            * (k as f64 * std::f64::consts::PI * y / g.ly).cos()
                    })
                    .sum()
            }),
            Profile::Rough { cells, values } => ScalarField::from_fn(g, |x, y| {
                let ix = ((x / g.lx * *cells as f64) as usize).min(cells - 1);
                let iy = ((y / g.ly * *cells as f64) as usize).min(cells - 1);
                values[iy * cells + ix]
            }),
            Profile::Bump { x0, y0, width, sign } => ScalarField::from_fn(g, |x, y| {
                let dx = x / g.lx - x0;
                let dy = y / g.ly - y0;
                sign * (-(dx * dx + dy * dy) / (width * width)).exp()
            }),
        }
    }
}

/// Numbers of smooth, rough and concentrated profiles in the standard corpus.
pub const CORPUS_MIX: [usize; 3] = [30, 10, 10];

const SMOOTH_BAND: usize = 8;
const ROUGH_CELLS: usize = 16;

fn smooth(rng: &mut ChaCha8Rng) -> Profile {
    let mut coeffs = Vec::new();
    for j in 0..SMOOTH_BAND {
        for k in 0..SMOOTH_BAND {
            let decay = 1.0 / (1.0 + (j * j + k * k) as f64);
            coeffs.push((j, k, rng.gen_range(-1.0..1.0) * decay));
        }
    }
    Profile::Smooth { coeffs }
}

fn rough(rng: &mut ChaCha8Rng) -> Profile {
    Profile::Rough { cells: ROUGH_CELLS, values: (0..ROUGH_CELLS * ROUGH_CELLS).map(|_| rng.gen_range(-1.0..1.0)).collect() }
}

fn bump(rng: &mut ChaCha8Rng) -> Profile {
    Profile::Bump {
        x0: rng.gen_range(0.1..0.9),
        y0: rng.gen_range(0.1..0.9),
        width: rng.gen_range(0.05..0.1),
        sign: if rng.gen_bool(0.5) { 1.0 } else { -1.0 },
    }
}

/// The standard mix of profiles, in a fixed order determined by `seed`.
pub fn corpus_profiles(seed: u64) -> Vec<Profile> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    out.extend((0..CORPUS_MIX[0]).map(|_| smooth(&mut rng)));
    out.extend((0..CORPUS_MIX[1]).map(|_| rough(&mut rng)));
    out.extend((0..CORPUS_MIX[2]).map(|_| bump(&mut rng)));
    out
}

/// Scalar, vector, solenoidal and tensor samples built from the same profile lists.
#[derive(Clone, Debug)]
pub struct DecayCorpus {
    /// Mean-zero scalar fields.
    pub scalars: Vec<ScalarField>,
    pub vectors: Vec<VectorField>,
    pub solenoidal: Vec<VectorField>,
    /// Row-wise tensors `[row_x, row_y]`.
    pub tensors: Vec<(VectorField, VectorField)>,
}

impl DecayCorpus {
    pub fn new(grid: Grid, seed: u64) -> Self {
        let a: Vec<ScalarField> = corpus_profiles(seed).iter().map(|p| p.sample(grid)).collect();
        let b: Vec<ScalarField> = corpus_profiles(seed.wrapping_add(1)).iter().map(|p| p.sample(grid)).collect();
        let vectors: Vec<VectorField> =
            a.iter().zip(&b).map(|(x, y)| VectorField::from_components(x.clone(), y.clone()).expect("same grid")).collect();
        let solenoidal: Vec<VectorField> = vectors.iter().map(leray_project).collect();
        let n = vectors.len();
        let tensors = (0..n).map(|i| (vectors[i].clone(), vectors[(i + 1) % n].clone())).collect();
        Self { scalars: a.iter().map(|f| f.centered()).collect(), vectors, solenoidal, tensors }
    }

    pub fn len(&self) -> usize {
        self.scalars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scalars.is_empty()
    }

    /// The first `m` samples of each kind.
    pub fn truncated(&self, m: usize) -> Self {
        Self {
            scalars: self.scalars.iter().take(m).cloned().collect(),
            vectors: self.vectors.iter().take(m).cloned().collect(),
            solenoidal: self.solenoidal.iter().take(m).cloned().collect(),
            tensors: self.tensors.iter().take(m).cloned().collect(),
        }
    }
}
