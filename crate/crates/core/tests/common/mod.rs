#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use specseq::bicomplex::DoubleComplex;
use specseq::complexes::{CochainComplex, ComplexMap};
use specseq::linalg::{kernel_basis, FieldSpec, FpMatrix};
use specseq::spectral::{FilteredComplex, PosetIndex};
use std::sync::Arc;

pub fn rng(seed: u64) -> ChaCha8Rng {
    rand::SeedableRng::seed_from_u64(seed)
}

pub fn random_matrix(rng: &mut ChaCha8Rng, f: FieldSpec, r: usize, c: usize) -> FpMatrix {
    let data: Vec<i64> = (0..r * c).map(|_| rng.gen_range(0..f.p() as i64)).collect();
    FpMatrix::from_i64(f, r, c, &data)
}

pub fn random_invertible(rng: &mut ChaCha8Rng, f: FieldSpec, n: usize) -> FpMatrix {
    loop {
        let m = random_matrix(rng, f, n, n);
        if m.is_invertible() {
            return m;
        }
    }
}

/// Block lower-triangular invertible matrix for the piece sizes `sizes` (increasing filtration).
fn random_filtered_iso(rng: &mut ChaCha8Rng, f: FieldSpec, sizes: &[usize]) -> FpMatrix {
    let n: usize = sizes.iter().sum();
    let mut m = FpMatrix::zeros(f, n, n);
    let mut off = vec![0];
    for s in sizes {
        off.push(off.last().unwrap() + s);
    }
    for (a, &sa) in sizes.iter().enumerate() {
        m.set_block(off[a], off[a], &random_invertible(rng, f, sa));
        for (b, &sb) in sizes.iter().enumerate().take(a) {
            m.set_block(off[a], off[b], &random_matrix(rng, f, sa, sb));
        }
    }
    m
}

/// A random filtered complex in degrees `0..=degrees` with `depth` filtration pieces: a random
/// pairing of basis vectors conjugated by random filtered isomorphisms.
pub fn random_filtered_complex(rng: &mut ChaCha8Rng, f: FieldSpec, degrees: usize, depth: usize, max_piece: usize) -> FilteredComplex {
    let smin = rng.gen_range(-2..=1i64);
    let pieces: Vec<Vec<usize>> = (0..=degrees).map(|_| (0..depth).map(|_| rng.gen_range(0..=max_piece)).collect()).collect();
    let levels = |k: usize| -> Vec<usize> { pieces[k].iter().enumerate().flat_map(|(s, &n)| std::iter::repeat_n(s, n)).collect() };
    let mut used: Vec<Vec<bool>> = (0..=degrees).map(|k| vec![false; levels(k).len()]).collect();
    let mut diffs = vec![];
    for k in 0..degrees {
        let (src, tgt) = (levels(k), levels(k + 1));
        let mut d = FpMatrix::zeros(f, src.len(), tgt.len());
        for u in 0..src.len() {
            if used[k][u] || rng.gen_bool(0.4) {
                continue;
            }
            let free: Vec<usize> = (0..tgt.len()).filter(|&v| !used[k + 1][v] && tgt[v] <= src[u]).collect();
            if free.is_empty() {
                continue;
            }
            let v = free[rng.gen_range(0..free.len())];
            used[k][u] = true;
            used[k + 1][v] = true;
            d.set(u, v, 1);
        }
        diffs.push(d);
    }
    let g: Vec<FpMatrix> = pieces.iter().map(|p| random_filtered_iso(rng, f, p)).collect();
    let diffs = diffs.iter().enumerate().map(|(k, d)| &(&g[k] * d) * &g[k + 1].inverse().unwrap()).collect();
    FilteredComplex::new(f, 0, smin, pieces, diffs).unwrap()
}

/// A random commuting first-quadrant double complex on a `rows × cols` window: a direct sum of
/// dots, arrows, squares and two-arrow zigzags, conjugated by random isomorphisms per position.
pub fn random_double_complex(rng: &mut ChaCha8Rng, f: FieldSpec, rows: usize, cols: usize, max_dim: usize) -> DoubleComplex {
    type Gen = Vec<(usize, usize)>;
    let mut dims = vec![vec![0usize; cols]; rows];
    let mut hor: Vec<((usize, usize, usize), usize)> = vec![];
    let mut ver: Vec<((usize, usize, usize), usize)> = vec![];
    let fits = |dims: &Vec<Vec<usize>>, cells: &Gen| cells.iter().all(|&(i, j)| i < rows && j < cols && dims[i][j] < max_dim);
    for _ in 0..rows * cols * 2 {
        let (i, j) = (rng.gen_range(0..rows), rng.gen_range(0..cols));
        let shape = rng.gen_range(0..6);
        let cells: Gen = match shape {
            0 => vec![(i, j)],
            1 => vec![(i, j), (i, j + 1)],
            2 => vec![(i, j), (i + 1, j)],
            3 => vec![(i, j), (i, j + 1), (i + 1, j), (i + 1, j + 1)],
            4 => vec![(i, j), (i, j + 1), (i.wrapping_sub(1), j + 1)],
            _ => vec![(i, j), (i, j + 1), (i + 1, j)],
        };
        if !fits(&dims, &cells) {
            continue;
        }
        let idx: Vec<usize> = cells.iter().map(|&(a, b)| {
            dims[a][b] += 1;
            dims[a][b] - 1
        }).collect();
        let at = |n: usize| (cells[n].0, cells[n].1, idx[n]);
        match shape {
            1 => hor.push((at(0), idx[1])),
            2 => ver.push((at(0), idx[1])),
            3 => {
                hor.push((at(0), idx[1]));
                ver.push((at(0), idx[2]));
                hor.push((at(2), idx[3]));
                ver.push((at(1), idx[3]));
            }
            4 => {
                hor.push((at(0), idx[1]));
                ver.push((at(2), idx[1]));
            }
            5 => {
                hor.push((at(0), idx[1]));
                ver.push((at(0), idx[2]));
            }
            _ => {}
        }
    }
    let g: Vec<Vec<FpMatrix>> = (0..rows).map(|i| (0..cols).map(|j| random_invertible(rng, f, dims[i][j])).collect()).collect();
    let dim = |i: usize, j: usize| if i < rows && j < cols { dims[i][j] } else { 0 };
    let conj = |i: usize, j: usize, ti: usize, tj: usize, raw: FpMatrix| -> FpMatrix {
        if dim(ti, tj) == 0 || dim(i, j) == 0 {
            return FpMatrix::zeros(f, dim(i, j), dim(ti, tj));
        }
        &(&g[i][j] * &raw) * &g[ti][tj].inverse().unwrap()
    };
    let d = |i: usize, j: usize| {
        let mut m = FpMatrix::zeros(f, dim(i, j), dim(i, j + 1));
        for &((a, b, u), v) in &hor {
            if (a, b) == (i, j) {
                m.set(u, v, 1);
            }
        }
        conj(i, j, i, j + 1, m)
    };
    let delta = |i: usize, j: usize| {
        let mut m = FpMatrix::zeros(f, dim(i, j), dim(i + 1, j));
        for &((a, b, u), v) in &ver {
            if (a, b) == (i, j) {
                m.set(u, v, 1);
            }
        }
        conj(i, j, i + 1, j, m)
    };
    DoubleComplex::from_fn(f, rows, cols, |i, j| dims[i][j], d, delta).unwrap()
}

pub fn fields() -> [FieldSpec; 2] {
    [FieldSpec::new(2).unwrap(), FieldSpec::new(3).unwrap()]
}

/// The underlying complex of a filtered complex.
pub fn full_complex(x: &FilteredComplex) -> CochainComplex {
    let dims = (x.lo()..=x.hi()).map(|k| x.total_dim(k)).collect();
    let diffs = (x.lo()..x.hi()).map(|k| x.diff(k)).collect();
    CochainComplex::new(x.field(), x.lo(), dims, diffs).unwrap()
}

/// A random chain `α ≤ β ≤ γ ≤ δ ≤ ε` of filtration indices around `[smin, smax]`.
pub fn random_chain(r: &mut impl Rng, smin: i64, smax: i64) -> [PosetIndex; 5] {
    let mut level0 = vec![PosetIndex::neg_inf()];
    level0.extend((smin - 1..=smax + 1).map(PosetIndex::fin));
    level0.push(PosetIndex::pos_inf());
    let alpha = level0[r.gen_range(0..level0.len())];
    let mut cand: Vec<PosetIndex> = level0.iter().copied().filter(|&b| b >= alpha).collect();
    cand.extend(level0.iter().map(|b| b.up(1)).filter(|&b| b <= alpha.up(1)));
    let mut picks: Vec<PosetIndex> = (0..4).map(|_| cand[r.gen_range(0..cand.len())]).collect();
    picks.sort();
    [alpha, picks[0], picks[1], picks[2], picks[3]]
}

pub fn random_complex(rng: &mut ChaCha8Rng, f: FieldSpec, degrees: usize, max_dim: usize) -> CochainComplex {
    let x = random_filtered_complex(rng, f, degrees, 1, max_dim);
    let dims = (0..=degrees as i64).map(|k| x.total_dim(k)).collect();
    let diffs = (0..degrees as i64).map(|k| x.diff(k)).collect();
    CochainComplex::new(f, 0, dims, diffs).unwrap()
}

/// A degreewise split short exact sequence `X′ ↣ X ↠ X″` on degrees `0..=degrees`.
///
/// `X = X′ ⊕ X″` with differential `[[d′, 0], [c, d″]]` for a random solution `c` of
/// `c_k d′ + d″ c_{k+1} = 0`, conjugated by a random automorphism in each degree. With
/// `twist = false`, `c = 0` and the sequence is split as complexes.
pub fn random_ses(rng: &mut ChaCha8Rng, f: FieldSpec, degrees: usize, max_dim: usize, twist: bool) -> (ComplexMap, ComplexMap) {
    let xp = random_complex(rng, f, degrees, max_dim);
    let xpp = random_complex(rng, f, degrees, max_dim);
    let shape = |k: usize| (xpp.dim(k as i64), xp.dim(k as i64 + 1));
    let mut off = vec![0];
    for k in 0..degrees {
        off.push(off[k] + shape(k).0 * shape(k).1);
    }
    let unknowns = off[degrees];
    let unpack = |v: &[u32]| -> Vec<FpMatrix> {
        (0..=degrees).map(|k| {
            if k == degrees {
                return FpMatrix::zeros(f, xpp.dim(k as i64), 0);
            }
            let (r, c) = shape(k);
            FpMatrix::from_vec(f, r, c, v[off[k]..off[k + 1]].to_vec())
        }).collect()
    };
    let constraint = |c: &[FpMatrix]| -> Vec<u32> {
        let mut out = vec![];
        for k in 0..degrees.saturating_sub(1) {
            let v = &(&c[k] * &xp.diff(k as i64 + 1)) + &(&xpp.diff(k as i64) * &c[k + 1]);
            out.extend_from_slice(v.data());
        }
        out
    };
    let c = if twist && unknowns > 0 {
        let rows: Vec<Vec<u32>> = (0..unknowns).map(|u| {
            let mut e = vec![0u32; unknowns];
            e[u] = 1;
            constraint(&unpack(&e))
        }).collect();
        let width = rows[0].len();
        let a = FpMatrix::from_vec(f, unknowns, width, rows.concat());
        let ker = kernel_basis(&a);
        let coeffs = random_matrix(rng, f, 1, ker.dim());
        let v = if ker.dim() == 0 { vec![0; unknowns] } else { (&coeffs * ker.basis()).data().to_vec() };
        unpack(&v)
    } else {
        unpack(&vec![0; unknowns])
    };
    let dim = |k: usize| xp.dim(k as i64) + xpp.dim(k as i64);
    let g: Vec<FpMatrix> = (0..=degrees).map(|k| random_invertible(rng, f, dim(k))).collect();
    let diffs: Vec<FpMatrix> = (0..degrees).map(|k| {
        let a = xp.dim(k as i64);
        let mut d = FpMatrix::zeros(f, dim(k), dim(k + 1));
        d.set_block(0, 0, &xp.diff(k as i64));
        d.set_block(a, 0, &c[k]);
        d.set_block(a, xp.dim(k as i64 + 1), &xpp.diff(k as i64));
        &(&g[k].inverse().unwrap() * &d) * &g[k + 1]
    }).collect();
    let x = Arc::new(CochainComplex::new(f, 0, (0..=degrees).map(dim).collect(), diffs).unwrap());
    let incl: Vec<FpMatrix> = (0..=degrees).map(|k| {
        let mut m = FpMatrix::zeros(f, xp.dim(k as i64), dim(k));
        m.set_block(0, 0, &FpMatrix::identity(f, xp.dim(k as i64)));
        &m * &g[k]
    }).collect();
    let proj: Vec<FpMatrix> = (0..=degrees).map(|k| {
        let mut m = FpMatrix::zeros(f, dim(k), xpp.dim(k as i64));
        m.set_block(xp.dim(k as i64), 0, &FpMatrix::identity(f, xpp.dim(k as i64)));
        &g[k].inverse().unwrap() * &m
    }).collect();
    let fm = ComplexMap::new(Arc::new(xp), x.clone(), 0, incl).unwrap();
    let gm = ComplexMap::new(x, Arc::new(xpp), 0, proj).unwrap();
    (fm, gm)
}
