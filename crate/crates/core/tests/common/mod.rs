//! Independent oracles shared by the integration and acceptance tests.
#![allow(dead_code)]

use kgalign::aligner::{Candidate, SimilarityMatrix};
use kgalign::kge::{init_params, ModelKind, ModelParams, Norm};
use kgalign::triple_factory::{IdTriple, TripleFactory};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

pub const FD_EPS: f64 = 1e-5;
pub const FD_TOL: f64 = 1e-4;

/// Relative error with a small floor so near-zero partials compare absolutely.
/// Differences below the rounding noise of a central difference on a score of
/// magnitude `f` (a few ulps of `f` divided by ε) count as zero.
pub fn rel_err(a: f64, b: f64, f: f64) -> f64 {
    let diff = (a - b).abs();
    if diff <= 4.0 * f64::EPSILON * f.abs().max(1.0) / FD_EPS {
        return 0.0;
    }
    diff / a.abs().max(b.abs()).max(1e-6)
}

/// Worst relative error between the analytic gradient and central differences
/// over every parameter of the model, for one (h, r, t).
pub fn fd_worst(params: &ModelParams, h: usize, r: usize, t: usize) -> f64 {
    let grad = params.grad(h, r, t).unwrap();
    let f = params.score(h, r, t).unwrap();
    let mut p = params.clone();
    let mut worst: f64 = 0.0;
    for k in 0..p.tensors.len() {
        let cols = p.tensors[k].cols;
        for idx in 0..p.tensors[k].data.len() {
            let orig = p.tensors[k].data[idx];
            p.tensors[k].data[idx] = orig + FD_EPS;
            let plus = p.score(h, r, t).unwrap();
            p.tensors[k].data[idx] = orig - FD_EPS;
            let minus = p.score(h, r, t).unwrap();
            p.tensors[k].data[idx] = orig;
            let numeric = (plus - minus) / (2.0 * FD_EPS);
            let analytic = grad
                .get(k, idx / cols)
                .map(|row| row[idx % cols])
                .unwrap_or(0.0);
            worst = worst.max(rel_err(analytic, numeric, f));
        }
    }
    worst
}

/// Runs `points` seeded finite-difference checks; returns the worst error seen.
pub fn fd_model(kind: ModelKind, norm: Norm, dim: usize, points: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..points {
        let (ne, nr) = (4, 3);
        let mut params = init_params(kind, ne, nr, dim, &mut rng).unwrap();
        params.norm = norm;
        let h = rng.random_range(0..ne);
        let r = rng.random_range(0..nr);
        let t = rng.random_range(0..ne);
        worst = worst.max(fd_worst(&params, h, r, t));
    }
    worst
}

/// Circular correlation through the FFT: `a ⋆ b = IFFT(conj(FFT a) · FFT b)`.
pub fn fft_correlation(a: &[f64], b: &[f64]) -> Vec<f64> {
    let n = a.len();
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(n);
    let inv = planner.plan_fft_inverse(n);
    let mut fa: Vec<Complex<f64>> = a.iter().map(|&x| Complex::new(x, 0.0)).collect();
    let mut fb: Vec<Complex<f64>> = b.iter().map(|&x| Complex::new(x, 0.0)).collect();
    fwd.process(&mut fa);
    fwd.process(&mut fb);
    let mut prod: Vec<Complex<f64>> = fa.iter().zip(&fb).map(|(x, y)| x.conj() * y).collect();
    inv.process(&mut prod);
    prod.iter().map(|c| c.re / n as f64).collect()
}

/// Second O(d²) correlation, indexing the other way round:
/// `c_k = Σ_j a_{(j-k) mod d} b_j`.
pub fn naive_correlation(a: &[f64], b: &[f64]) -> Vec<f64> {
    let d = a.len();
    (0..d)
        .map(|k| (0..d).map(|j| a[(j + d - k) % d] * b[j]).sum())
        .collect()
}

/// Brute-force greedy: the accepted set is the unique subset `M` of the argmax
/// candidates such that no two members share a target, no member has an
/// earlier member with its target, and every rejected candidate has an
/// earlier member with its target. Found by trying every subset.
pub fn brute_force_greedy(s: &SimilarityMatrix) -> Vec<(usize, usize)> {
    let cands: Vec<Candidate> = (0..s.rows)
        .map(|i| {
            let mut best = 0;
            for j in 0..s.cols {
                if s.get(i, j) > s.get(i, best) {
                    best = j;
                }
            }
            Candidate { source: i, target: best, theta: s.get(i, best) }
        })
        .collect();
    let before = |a: &Candidate, b: &Candidate| a.theta > b.theta || (a.theta == b.theta && a.source < b.source);
    let n = cands.len();
    let mut found = Vec::new();
    for mask in 0u32..(1 << n) {
        let member = |i: usize| mask & (1 << i) != 0;
        let ok = (0..n).all(|i| {
            let blocked = (0..n).any(|j| j != i && member(j) && cands[j].target == cands[i].target && before(&cands[j], &cands[i]));
            member(i) != blocked
        });
        if ok {
            found.push(mask);
        }
    }
    assert_eq!(found.len(), 1, "greedy rule must have exactly one fixed point");
    let mask = found[0];
    let mut out: Vec<(usize, usize)> = (0..n)
        .filter(|i| mask & (1 << i) != 0)
        .map(|i| (cands[i].source, cands[i].target))
        .collect();
    out.sort();
    out
}

/// Hub 0 with leaves 1..=19: (0, r0, i) and (i, r1, 0), plus the leaf edges
/// (1, r0, 2) and (3, r0, 4). 20 entities, 2 relations, 40 triples.
pub fn star_graph() -> TripleFactory {
    let mut triples = Vec::new();
    for i in 1..20 {
        triples.push(IdTriple::new(0, 0, i));
        triples.push(IdTriple::new(i, 1, 0));
    }
    triples.push(IdTriple::new(1, 0, 2));
    triples.push(IdTriple::new(3, 0, 4));
    assert_eq!(triples.len(), 40);
    TripleFactory::from_id_triples(20, 2, &triples).unwrap()
}

/// Mean score of the training triples and mean score over every head and tail
/// corruption of them, by full enumeration.
pub fn separation(params: &ModelParams, factory: &TripleFactory) -> (f64, f64) {
    let n = factory.num_entities();
    let (mut pos, mut neg, mut neg_count) = (0.0, 0.0, 0usize);
    for tr in factory.triples() {
        pos += params.score(tr.head, tr.relation, tr.tail).unwrap();
        for e in 0..n {
            if e != tr.head {
                neg += params.score(e, tr.relation, tr.tail).unwrap();
                neg_count += 1;
            }
            if e != tr.tail {
                neg += params.score(tr.head, tr.relation, e).unwrap();
                neg_count += 1;
            }
        }
    }
    (pos / factory.triples().len() as f64, neg / neg_count as f64)
}

/// A dimension every model accepts.
pub fn dim_for(kind: ModelKind, want: usize) -> usize {
    let m = kind.dim_multiple();
    want.div_ceil(m) * m
}
