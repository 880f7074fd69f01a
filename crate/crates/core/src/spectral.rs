//! Signless Laplacian `Q(G) = D(G) + A(G)`: matrix-free products, Perron
//! pairs by power iteration, and exact rational enclosures of `q(G)`.
//!
//! For a connected graph `Q` is nonnegative and irreducible, so for every
//! positive vector `x`
//!
//! ```text
//! <Qx, x> / <x, x>  <=  q(G)  <=  max_v (Qx)_v / x_v
//! ```
//!
//! The left side is the Rayleigh quotient, the right side the
//! Collatz-Wielandt bound. Power iteration from the all-ones vector drives
//! both toward `q(G)`; the exact variants evaluate them in rational
//! arithmetic on an integer rounding of the iterate, which gives a rigorous
//! enclosure regardless of floating-point error.

use nalgebra::{DMatrix, SymmetricEigen};
use num_bigint::BigInt;
use serde::Serialize;
use thiserror::Error;

use crate::graph::Graph;
use crate::rational::RationalValue;

pub const DEFAULT_TOL: f64 = 1e-10;

/// `200 n + 10^4`.
pub fn default_max_iter(n: usize) -> usize {
    200 * n + 10_000
}

/// Iterations of plain power iteration before a dense eigenvector is used
/// as a warm start (only for orders up to `DENSE_WARM_START_LIMIT`).
const WARM_START_AFTER: usize = 400;
const DENSE_WARM_START_LIMIT: usize = 1500;
/// Iterations without any narrowing of the interval before giving up.
const STAGNATION_WINDOW: usize = 500;
/// Integer scale used when rounding an eigenvector for exact evaluation.
const EXACT_SCALE: f64 = (1u64 << 40) as f64;

#[derive(Debug, Error, Clone)]
pub enum SpectralError {
    #[error("vector has length {got}, graph has order {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("graph is not connected")]
    NotConnected,
    #[error("graph must have at least two vertices")]
    TooSmall,
    #[error("zero vector")]
    ZeroVector,
    #[error("entries must be strictly positive")]
    NonPositiveEntry,
    #[error("no convergence after {iterations} iterations (interval width {width:e})")]
    NoConvergence {
        iterations: usize,
        width: f64,
        best: Box<SpectralEstimate>,
    },
}

/// Approximate Perron pair with a certified enclosure `lo <= q(G) <= hi`.
#[derive(Debug, Clone, Serialize)]
pub struct SpectralEstimate {
    pub q_hat: f64,
    /// Positive entries, max entry exactly 1.
    pub f: Vec<f64>,
    pub residual: f64,
    pub lo: f64,
    pub hi: f64,
    pub iterations: usize,
}

/// Rational enclosure of `q(G)` evaluated exactly from an integer vector.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExactEnclosure {
    pub lo: RationalValue,
    pub hi: RationalValue,
}

impl ExactEnclosure {
    /// `q(G) >= t` is proven.
    pub fn proves_at_least(&self, t: &RationalValue) -> bool {
        &self.lo >= t
    }

    /// `q(G) < t` is proven.
    pub fn proves_below(&self, t: &RationalValue) -> bool {
        &self.hi < t
    }
}

impl SpectralEstimate {
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    /// `f` rounded to positive integers at scale `2^40`.
    pub fn scaled_vector(&self) -> Vec<i64> {
        self.f.iter().map(|&v| ((v * EXACT_SCALE).round() as i64).max(1)).collect()
    }

    /// Exact Rayleigh and Collatz-Wielandt bounds from the rounded vector.
    pub fn exact_enclosure(&self, g: &Graph) -> Result<ExactEnclosure, SpectralError> {
        let x = self.scaled_vector();
        Ok(ExactEnclosure {
            lo: rayleigh_quotient_exact(g, &x)?,
            hi: collatz_wielandt_exact(g, &x)?,
        })
    }
}

fn check_len(g: &Graph, len: usize) -> Result<(), SpectralError> {
    if len != g.n() {
        Err(SpectralError::DimensionMismatch { expected: g.n(), got: len })
    } else {
        Ok(())
    }
}

fn check_connected(g: &Graph) -> Result<(), SpectralError> {
    if g.n() < 2 {
        return Err(SpectralError::TooSmall);
    }
    if !g.is_connected() {
        return Err(SpectralError::NotConnected);
    }
    Ok(())
}

fn q_apply_into(g: &Graph, x: &[f64], y: &mut [f64]) {
    for (v, yv) in y.iter_mut().enumerate() {
        let mut s = g.degree(v) as f64 * x[v];
        for u in g.neighbors(v) {
            s += x[u];
        }
        *yv = s;
    }
}

/// `y_v = d(v) x_v + Σ_{u~v} x_u`, summed in ascending neighbor order.
pub fn q_apply(g: &Graph, x: &[f64]) -> Result<Vec<f64>, SpectralError> {
    check_len(g, x.len())?;
    let mut y = vec![0.0; g.n()];
    q_apply_into(g, x, &mut y);
    Ok(y)
}

/// `max_v |(q − d(v)) f_v − Σ_{u~v} f_u|`.
pub fn eigen_residual(g: &Graph, q: f64, f: &[f64]) -> Result<f64, SpectralError> {
    check_len(g, f.len())?;
    Ok((0..g.n())
        .map(|v| {
            let s: f64 = g.neighbors(v).map(|u| f[u]).sum();
            ((q - g.degree(v) as f64) * f[v] - s).abs()
        })
        .fold(0.0, f64::max))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn dense_perron_vector(g: &Graph) -> Vec<f64> {
    let n = g.n();
    let q = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            g.degree(i) as f64
        } else if g.has_edge(i, j) {
            1.0
        } else {
            0.0
        }
    });
    let eig = SymmetricEigen::new(q);
    let top = eig
        .eigenvalues
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .expect("nonempty spectrum");
    let col = eig.eigenvectors.column(top);
    let scale = col.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    col.iter().map(|v| (v.abs() / scale).max(f64::MIN_POSITIVE)).collect()
}

/// Power iteration from the all-ones vector until `hi − lo <= tol`.
///
/// `lo` is the best Rayleigh quotient seen and `hi` the best Collatz-Wielandt
/// bound. If plain iteration is slow, a dense eigenvector is used once as a
/// warm start; the enclosure logic is unchanged.
pub fn perron_pair(g: &Graph, tol: f64, max_iter: usize) -> Result<SpectralEstimate, SpectralError> {
    check_connected(g)?;
    let n = g.n();
    let mut x = vec![1.0; n];
    let mut y = vec![0.0; n];
    let mut lo = f64::NEG_INFINITY;
    let mut hi = f64::INFINITY;
    let mut best_width = f64::INFINITY;
    let mut last_improvement = 0;
    let mut warm_started = false;

    for iter in 1..=max_iter {
        q_apply_into(g, &x, &mut y);
        let rq = dot(&x, &y) / dot(&x, &x);
        let cw = (0..n).map(|v| y[v] / x[v]).fold(f64::NEG_INFINITY, f64::max);
        lo = lo.max(rq);
        hi = hi.min(cw);
        let width = hi - lo;
        // x has max entry 1, so this is the eigen-equation defect at q = lo
        let defect = (0..n).map(|v| (y[v] - lo * x[v]).abs()).fold(0.0, f64::max);
        let score = width.max(defect);
        if score < best_width {
            best_width = score;
            last_improvement = iter;
        }
        if width <= tol && defect <= tol {
            return Ok(finish(g, x, lo, hi, iter));
        }
        if iter - last_improvement > STAGNATION_WINDOW {
            return Err(no_convergence(g, x, lo, hi, iter));
        }
        if iter == WARM_START_AFTER && !warm_started && n <= DENSE_WARM_START_LIMIT {
            warm_started = true;
            x = dense_perron_vector(g);
            continue;
        }
        let top = y.iter().fold(0.0f64, |m, &v| m.max(v));
        for (xv, yv) in x.iter_mut().zip(&y) {
            *xv = yv / top;
        }
    }
    Err(no_convergence(g, x, lo, hi, max_iter))
}

pub fn perron_pair_default(g: &Graph) -> Result<SpectralEstimate, SpectralError> {
    perron_pair(g, DEFAULT_TOL, default_max_iter(g.n()))
}

fn finish(g: &Graph, mut f: Vec<f64>, lo: f64, hi: f64, iterations: usize) -> SpectralEstimate {
    let top = f.iter().fold(0.0f64, |m, &v| m.max(v));
    for v in f.iter_mut() {
        *v /= top;
    }
    let q_hat = lo;
    let residual = eigen_residual(g, q_hat, &f).expect("length checked");
    SpectralEstimate { q_hat, f, residual, lo, hi, iterations }
}

fn no_convergence(g: &Graph, f: Vec<f64>, lo: f64, hi: f64, iterations: usize) -> SpectralError {
    SpectralError::NoConvergence {
        iterations,
        width: hi - lo,
        best: Box::new(finish(g, f, lo, hi, iterations)),
    }
}

fn all_binary(x: &[i64]) -> bool {
    x.iter().all(|&v| v == 0 || v == 1)
}

/// `Σ_{uv∈E} (x_u + x_v)^2 / Σ_v x_v^2`, a lower bound on `q(G)`.
pub fn rayleigh_quotient_exact(g: &Graph, x: &[i64]) -> Result<RationalValue, SpectralError> {
    check_len(g, x.len())?;
    if x.iter().all(|&v| v == 0) {
        return Err(SpectralError::ZeroVector);
    }
    let (num, den) = quadratic_form(g, x);
    Ok(RationalValue::new(num, den))
}

/// Returns `(<Qx, x>, <x, x>)` exactly.
pub fn quadratic_form(g: &Graph, x: &[i64]) -> (BigInt, BigInt) {
    if all_binary(x) {
        // popcount form: <Qc, c> = Σ_{v∈S} d(v) + 2 e(S)
        let words = g.words();
        let mut support = vec![0u64; words];
        for (v, &xv) in x.iter().enumerate() {
            if xv == 1 {
                support[v / 64] |= 1 << (v % 64);
            }
        }
        let mut num: u64 = 0;
        let mut den: u64 = 0;
        for (v, &xv) in x.iter().enumerate() {
            if xv == 1 {
                let inside: u64 = g
                    .neighbor_bits(v)
                    .iter()
                    .zip(&support)
                    .map(|(a, b)| (a & b).count_ones() as u64)
                    .sum();
                num += g.degree(v) as u64 + inside;
                den += 1;
            }
        }
        return (BigInt::from(num), BigInt::from(den));
    }
    let wide = || -> Option<(i128, i128)> {
        let mut num: i128 = 0;
        let mut den: i128 = 0;
        for (u, v) in g.edges() {
            let s = (x[u] as i128).checked_add(x[v] as i128)?;
            num = num.checked_add(s.checked_mul(s)?)?;
        }
        for &v in x {
            den = den.checked_add((v as i128).checked_mul(v as i128)?)?;
        }
        Some((num, den))
    };
    if let Some((num, den)) = wide() {
        return (BigInt::from(num), BigInt::from(den));
    }
    let mut num = BigInt::from(0);
    let mut den = BigInt::from(0);
    for (u, v) in g.edges() {
        let s = BigInt::from(x[u]) + BigInt::from(x[v]);
        num += &s * &s;
    }
    for &v in x {
        den += BigInt::from(v) * BigInt::from(v);
    }
    (num, den)
}

/// `max_v (Qx)_v / x_v` for a strictly positive integer vector, an upper
/// bound on `q(G)` when `G` is connected.
pub fn collatz_wielandt_exact(g: &Graph, x: &[i64]) -> Result<RationalValue, SpectralError> {
    check_len(g, x.len())?;
    check_connected(g)?;
    if x.iter().any(|&v| v <= 0) {
        return Err(SpectralError::NonPositiveEntry);
    }
    let narrow = || -> Option<(i128, i128)> {
        let mut best: Option<(i128, i128)> = None;
        for v in 0..g.n() {
            let mut y = (g.degree(v) as i128).checked_mul(x[v] as i128)?;
            for u in g.neighbors(v) {
                y = y.checked_add(x[u] as i128)?;
            }
            let d = x[v] as i128;
            let better = match best {
                None => true,
                Some((bn, bd)) => y.checked_mul(bd)? > bn.checked_mul(d)?,
            };
            if better {
                best = Some((y, d));
            }
        }
        best
    };
    if let Some((num, den)) = narrow() {
        return Ok(RationalValue::new(num, den));
    }
    let mut best: Option<(BigInt, BigInt)> = None;
    for v in 0..g.n() {
        let mut y = BigInt::from(g.degree(v)) * BigInt::from(x[v]);
        for u in g.neighbors(v) {
            y += BigInt::from(x[u]);
        }
        let d = BigInt::from(x[v]);
        let better = match &best {
            None => true,
            Some((bn, bd)) => &y * bd > bn * &d,
        };
        if better {
            best = Some((y, d));
        }
    }
    let (num, den) = best.expect("n >= 2");
    Ok(RationalValue::new(num, den))
}

/// `2m/(n − 1) + n − 2`, an upper bound on `q(G)` for connected `G`.
pub fn upper_bound_edge_count(g: &Graph) -> Result<RationalValue, SpectralError> {
    check_connected(g)?;
    let n = g.n() as i64;
    Ok(RationalValue::new(2 * g.m() as i64, n - 1) + RationalValue::integer(n - 2))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s62() -> Graph {
        let inner = Graph::complete(3).unwrap().disjoint_union(&Graph::complete(1).unwrap());
        Graph::complete(2).unwrap().join(&inner)
    }

    #[test]
    fn q_apply_examples() {
        let k3 = Graph::complete(3).unwrap();
        assert_eq!(q_apply(&k3, &[1.0, 1.0, 1.0]).unwrap(), vec![4.0, 4.0, 4.0]);
        let c4 = Graph::cycle(4).unwrap();
        assert_eq!(q_apply(&c4, &[1.0; 4]).unwrap(), vec![4.0; 4]);
        let p3 = Graph::path(3).unwrap();
        assert_eq!(q_apply(&p3, &[1.0, 0.0, 0.0]).unwrap(), vec![1.0, 1.0, 0.0]);
        assert!(matches!(q_apply(&p3, &[1.0]), Err(SpectralError::DimensionMismatch { .. })));
    }

    #[test]
    fn perron_pair_regular_graphs() {
        for n in [2usize, 3, 7, 20] {
            let est = perron_pair_default(&Graph::complete(n).unwrap()).unwrap();
            assert!((est.q_hat - (2 * n - 2) as f64).abs() <= DEFAULT_TOL);
            assert!(est.f.iter().all(|&v| (v - 1.0).abs() < 1e-12));
        }
        let est = perron_pair_default(&Graph::cycle(6).unwrap()).unwrap();
        assert!((est.q_hat - 4.0).abs() <= DEFAULT_TOL);
    }

    #[test]
    fn perron_pair_s62_window() {
        let g = s62();
        let est = perron_pair_default(&g).unwrap();
        assert!(est.lo >= 8.4 && est.hi <= 8.8, "{est:?}");
        assert!(est.lo <= est.q_hat && est.q_hat <= est.hi);
        assert!(est.width() <= DEFAULT_TOL);
        assert!(est.residual <= 10.0 * DEFAULT_TOL, "{est:?}");
        assert!(est.f.iter().all(|&v| v > 0.0));
        assert_eq!(est.f.iter().cloned().fold(0.0, f64::max), 1.0);
        let ex = est.exact_enclosure(&g).unwrap();
        assert!(ex.lo <= ex.hi);
        assert!(ex.lo >= RationalValue::new(42, 5));
        assert!(ex.hi <= upper_bound_edge_count(&g).unwrap());
    }

    #[test]
    fn perron_pair_rejects_disconnected() {
        let g = Graph::complete(2).unwrap().disjoint_union(&Graph::complete(2).unwrap());
        assert!(matches!(perron_pair_default(&g), Err(SpectralError::NotConnected)));
        assert!(matches!(perron_pair_default(&Graph::complete(1).unwrap()), Err(SpectralError::TooSmall)));
    }

    #[test]
    fn slow_paths_still_converge() {
        let g = Graph::path(50).unwrap();
        let est = perron_pair_default(&g).unwrap();
        // q(P_n) = 2 + 2 cos(pi / n)
        let exact = 2.0 + 2.0 * (std::f64::consts::PI / 50.0).cos();
        assert!((est.q_hat - exact).abs() < 1e-9);
    }

    #[test]
    fn no_convergence_reports_best_interval() {
        let g = Graph::path(40).unwrap();
        match perron_pair(&g, 1e-12, 3) {
            Err(SpectralError::NoConvergence { iterations, best, .. }) => {
                assert_eq!(iterations, 3);
                assert!(best.lo <= best.hi);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn rayleigh_examples() {
        let k3 = Graph::complete(3).unwrap();
        assert_eq!(rayleigh_quotient_exact(&k3, &[1, 1, 1]).unwrap(), RationalValue::integer(4));
        // S_6^2 with c = 1 on Y ∪ Z (vertices 0..5), 0 on X = {5}
        let g = s62();
        assert_eq!(rayleigh_quotient_exact(&g, &[1, 1, 1, 1, 1, 0]).unwrap(), RationalValue::new(42, 5));
        assert!(matches!(rayleigh_quotient_exact(&k3, &[0, 0, 0]), Err(SpectralError::ZeroVector)));
        // non-binary route: P3 with x = (1, 2, 1): (1+2)^2 + (2+1)^2 = 18 over 6
        let p3 = Graph::path(3).unwrap();
        assert_eq!(rayleigh_quotient_exact(&p3, &[1, 2, 1]).unwrap(), RationalValue::integer(3));
        let huge = [i64::MAX, i64::MAX, 1];
        assert!(rayleigh_quotient_exact(&p3, &huge).unwrap() > RationalValue::integer(1));
    }

    #[test]
    fn edge_count_bound_examples() {
        assert_eq!(upper_bound_edge_count(&Graph::complete(4).unwrap()).unwrap(), RationalValue::integer(6));
        assert_eq!(upper_bound_edge_count(&Graph::cycle(5).unwrap()).unwrap(), RationalValue::new(11, 2));
        assert_eq!(upper_bound_edge_count(&s62()).unwrap(), RationalValue::new(44, 5));
    }

    #[test]
    fn residual_examples() {
        let k3 = Graph::complete(3).unwrap();
        assert_eq!(eigen_residual(&k3, 4.0, &[1.0; 3]).unwrap(), 0.0);
        assert_eq!(eigen_residual(&Graph::cycle(4).unwrap(), 4.0, &[1.0; 4]).unwrap(), 0.0);
        assert!((eigen_residual(&k3, 3.9, &[1.0; 3]).unwrap() - 0.1).abs() < 1e-12);
    }

    #[test]
    fn collatz_wielandt_on_uniform_vector() {
        // star K_{1,3}: (Qx) for x = 1 is (6, 2, 2, 2) / 1
        let star = Graph::from_edges(4, [(0, 1), (0, 2), (0, 3)]).unwrap();
        assert_eq!(collatz_wielandt_exact(&star, &[1, 1, 1, 1]).unwrap(), RationalValue::integer(6));
        assert!(matches!(
            collatz_wielandt_exact(&star, &[1, 0, 1, 1]),
            Err(SpectralError::NonPositiveEntry)
        ));
    }
}
