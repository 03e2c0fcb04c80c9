//! Independent oracles and generators shared by the integration suites.
//! Nothing here calls the library's linear algebra.
#![allow(dead_code)]

use num_complex::Complex64 as C;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use qnot_core::{CMatrix, QuditState, StateSet, TargetMap};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_complex(r: &mut impl Rng) -> C {
    C::new(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0))
}

pub fn random_vec(r: &mut impl Rng, d: usize) -> Vec<C> {
    loop {
        let v: Vec<C> = (0..d).map(|_| random_complex(r)).collect();
        if norm(&v) > 0.1 {
            return v;
        }
    }
}

pub fn random_state(r: &mut impl Rng, d: usize) -> QuditState {
    QuditState::normalized(random_vec(r, d)).unwrap()
}

pub fn random_real_state(r: &mut impl Rng, d: usize) -> QuditState {
    loop {
        let v: Vec<C> = (0..d)
            .map(|_| C::new(r.random_range(-1.0..1.0), 0.0))
            .collect();
        if norm(&v) > 0.1 {
            return QuditState::normalized(v).unwrap();
        }
    }
}

pub fn random_set(r: &mut impl Rng, n: usize, d: usize, target: TargetMap) -> StateSet {
    StateSet::new((0..n).map(|_| random_state(r, d)).collect(), target).unwrap()
}

/// `Σ conj(a_k) b_k`.
pub fn dot(a: &[C], b: &[C]) -> C {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm(a: &[C]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn fidelity(a: &[C], b: &[C]) -> f64 {
    dot(a, b).norm() / (norm(a) * norm(b))
}

pub type Dense = Vec<Vec<C>>;

pub fn to_dense(m: &CMatrix) -> Dense {
    (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| m[(i, j)]).collect())
        .collect()
}

pub fn from_dense(m: &Dense) -> CMatrix {
    CMatrix::from_rows(m).unwrap()
}

pub fn matmul(a: &Dense, b: &Dense) -> Dense {
    let (n, k, m) = (a.len(), b.len(), b[0].len());
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| (0..k).map(|l| a[i][l] * b[l][j]).sum())
                .collect()
        })
        .collect()
}

pub fn adjoint(a: &Dense) -> Dense {
    (0..a[0].len())
        .map(|j| (0..a.len()).map(|i| a[i][j].conj()).collect())
        .collect()
}

pub fn apply(a: &Dense, v: &[C]) -> Vec<C> {
    a.iter()
        .map(|row| row.iter().zip(v).map(|(x, y)| x * y).sum())
        .collect()
}

pub fn max_diff(a: &Dense, b: &Dense) -> f64 {
    a.iter()
        .zip(b)
        .flat_map(|(x, y)| x.iter().zip(y).map(|(p, q)| (p - q).norm()))
        .fold(0.0, f64::max)
}

pub fn identity(n: usize) -> Dense {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        C::new(1.0, 0.0)
                    } else {
                        C::new(0.0, 0.0)
                    }
                })
                .collect()
        })
        .collect()
}

/// Determinant by cofactor expansion along the first row.
pub fn det(a: &Dense) -> C {
    let n = a.len();
    match n {
        0 => C::new(1.0, 0.0),
        1 => a[0][0],
        _ => (0..n)
            .map(|j| {
                let minor: Dense = a[1..]
                    .iter()
                    .map(|row| {
                        row.iter()
                            .enumerate()
                            .filter(|(k, _)| *k != j)
                            .map(|(_, z)| *z)
                            .collect()
                    })
                    .collect();
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                a[0][j] * det(&minor) * sign
            })
            .sum(),
    }
}

pub fn principal_submatrix(a: &Dense, idx: &[usize]) -> Dense {
    idx.iter()
        .map(|&i| idx.iter().map(|&j| a[i][j]).collect())
        .collect()
}

/// Every non-empty index subset of `0..n`.
pub fn subsets(n: usize) -> Vec<Vec<usize>> {
    (1u32..(1 << n))
        .map(|mask| (0..n).filter(|k| mask & (1 << k) != 0).collect())
        .collect()
}

/// `e_k` = sum of all `k × k` principal minors: the coefficients of the
/// characteristic polynomial.
pub fn minor_sums(a: &Dense) -> Vec<f64> {
    let n = a.len();
    let mut e = vec![0.0; n + 1];
    e[0] = 1.0;
    for s in subsets(n) {
        e[s.len()] += det(&principal_submatrix(a, &s)).re;
    }
    e
}

/// Elementary symmetric polynomials of `xs`.
pub fn elementary_symmetric(xs: &[f64]) -> Vec<f64> {
    let mut e = vec![0.0; xs.len() + 1];
    e[0] = 1.0;
    for &x in xs {
        for k in (1..e.len()).rev() {
            e[k] += e[k - 1] * x;
        }
    }
    e
}

/// PSD iff every principal minor is non-negative.
pub fn psd_by_minors(a: &Dense, tol: f64) -> bool {
    subsets(a.len())
        .iter()
        .all(|s| det(&principal_submatrix(a, s)).re >= -tol)
}

/// Random unitary from modified Gram–Schmidt on random columns.
pub fn random_unitary(r: &mut impl Rng, n: usize) -> Dense {
    let mut cols: Vec<Vec<C>> = Vec::new();
    while cols.len() < n {
        let mut v = random_vec(r, n);
        for _ in 0..2 {
            for c in &cols {
                let p = dot(c, &v);
                for (x, y) in v.iter_mut().zip(c) {
                    *x -= p * y;
                }
            }
        }
        let nv = norm(&v);
        if nv > 1e-3 {
            cols.push(v.into_iter().map(|x| x / nv).collect());
        }
    }
    (0..n)
        .map(|i| (0..n).map(|j| cols[j][i]).collect())
        .collect()
}

/// `U diag(λ) U†`.
pub fn hermitian_with_spectrum(r: &mut impl Rng, eigenvalues: &[f64]) -> Dense {
    let n = eigenvalues.len();
    let u = random_unitary(r, n);
    let d: Dense = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        C::new(eigenvalues[i], 0.0)
                    } else {
                        C::new(0.0, 0.0)
                    }
                })
                .collect()
        })
        .collect();
    let h = matmul(&matmul(&u, &d), &adjoint(&u));
    // Exact Hermitian symmetry from the upper triangle.
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| match i.cmp(&j) {
                    std::cmp::Ordering::Equal => C::new(h[i][i].re, 0.0),
                    std::cmp::Ordering::Less => h[i][j],
                    std::cmp::Ordering::Greater => h[j][i].conj(),
                })
                .collect()
        })
        .collect()
}

/// Cholesky factor `L` with `G = L L†` for a positive-definite `G`.
pub fn cholesky(g: &Dense) -> Option<Dense> {
    let n = g.len();
    let mut l = vec![vec![C::new(0.0, 0.0); n]; n];
    for i in 0..n {
        for j in 0..=i {
            let s: C = (0..j).map(|k| l[i][k] * l[j][k].conj()).sum();
            if i == j {
                let d = g[i][i].re - s.re;
                if d <= 0.0 {
                    return None;
                }
                l[i][i] = C::new(d.sqrt(), 0.0);
            } else {
                l[i][j] = (g[i][j] - s) / l[j][j].re;
            }
        }
    }
    Some(l)
}

/// States whose Gram matrix `⟨Ψ_i|Ψ_j⟩` is `g` (rows of `conj(L)`).
pub fn states_from_gram(g: &Dense, target: TargetMap) -> Option<StateSet> {
    let l = cholesky(g)?;
    let states = l
        .iter()
        .map(|row| QuditState::new(row.iter().map(|z| z.conj()).collect()).unwrap())
        .collect();
    Some(StateSet::new(states, target).unwrap())
}

/// Gram matrix from magnitudes and phases, `G_ij = t_ij e^{iθ_ij}`.
pub fn polar_gram3(t: [f64; 3], theta: [f64; 3]) -> Dense {
    let one = C::new(1.0, 0.0);
    let g12 = C::from_polar(t[0], theta[0]);
    let g13 = C::from_polar(t[1], theta[1]);
    let g23 = C::from_polar(t[2], theta[2]);
    vec![
        vec![one, g12, g13],
        vec![g12.conj(), one, g23],
        vec![g13.conj(), g23.conj(), one],
    ]
}

/// Orthogonal qubit state `(−conj(b), conj(a))` computed by hand.
pub fn perp(v: &[C]) -> Vec<C> {
    vec![-v[1].conj(), v[0].conj()]
}

/// Real roots of `a x² + b x + c` in ascending order.
pub fn quadratic_roots(a: f64, b: f64, c: f64) -> Option<(f64, f64)> {
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return None;
    }
    let r1 = (-b - disc.sqrt()) / (2.0 * a);
    let r2 = (-b + disc.sqrt()) / (2.0 * a);
    Some((r1.min(r2), r1.max(r2)))
}

/// Worked qubit triple: two fixed states and `q Ψ1 + r e^{−iφ/2} Ψ2`, normalized.
pub fn worked_triple(phi: f64, q: f64, r: f64) -> StateSet {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let s1 = vec![C::new(h, 0.0), C::new(h, 0.0)];
    let s2 = vec![C::new(h, 0.0), C::new(0.0, h)];
    let e = C::from_polar(r, -phi / 2.0);
    let s3: Vec<C> = (0..2).map(|k| s1[k] * q + s2[k] * e).collect();
    StateSet::new(
        vec![
            QuditState::new(s1).unwrap(),
            QuditState::new(s2).unwrap(),
            QuditState::normalized(s3).unwrap(),
        ],
        TargetMap::Not,
    )
    .unwrap()
}
