//! Unitary completion of a Gram-preserving partial map.
//!
//! Given vectors `x_1..x_n` and `y_1..y_n` in `C^D` with identical Gram
//! matrices, build a `D x D` unitary `U` with `U x_i = y_i`. An orthonormal
//! basis of `span{x}` is grown by pivoted Gram-Schmidt and the same linear
//! combinations of the `y_i` give an orthonormal basis of `span{y}`. Both
//! bases are then extended to all of `C^D` with canonical vectors.

use num_complex::Complex;

use super::{gram_of, inner, norm, Matrix};
use crate::error::{Error, Result};
use crate::scalar::Real;

type Vector<T> = Vec<Complex<T>>;

/// Subtracts the projection of `v` onto the orthonormal `basis` (two passes)
/// and returns the accumulated coefficients `<b_k|v>`.
fn project_out<T: Real>(basis: &[Vector<T>], v: &mut Vector<T>) -> Vec<Complex<T>> {
    let mut coeffs = vec![Complex::new(T::zero(), T::zero()); basis.len()];
    for _ in 0..2 {
        for (k, b) in basis.iter().enumerate() {
            let c = inner(b, v);
            coeffs[k] = coeffs[k] + c;
            v.iter_mut().zip(b).for_each(|(vi, &bi)| *vi = *vi - bi * c);
        }
    }
    coeffs
}

fn residual_norm<T: Real>(basis: &[Vector<T>], v: &[Complex<T>]) -> T {
    let mut r = v.to_vec();
    project_out(basis, &mut r);
    norm(&r)
}

/// Extends an orthonormal family to an orthonormal basis of `C^dim`, picking
/// at each step the canonical vector with the largest residual.
fn extend_basis<T: Real>(basis: &mut Vec<Vector<T>>, dim: usize) {
    let zero = Complex::new(T::zero(), T::zero());
    let unit = |k: usize| -> Vector<T> {
        let mut e = vec![zero; dim];
        e[k] = Complex::new(T::one(), T::zero());
        e
    };
    while basis.len() < dim {
        let (best, _) = (0..dim).map(|k| (k, residual_norm(basis, &unit(k)))).fold(
            (0, -T::one()),
            |acc, cur| if cur.1 > acc.1 { cur } else { acc },
        );
        let mut v = unit(best);
        project_out(basis, &mut v);
        let n = norm(&v);
        v.iter_mut().for_each(|z| *z = *z / n);
        basis.push(v);
    }
}

/// Unitary `U` on `C^D` with `U inputs[i] = outputs[i]` for every `i`.
///
/// Requires `Gram(inputs) == Gram(outputs)` within the scalar's Gram
/// tolerance; the offending entry is reported otherwise.
pub fn unitary_completion<T: Real>(
    inputs: &[Vector<T>],
    outputs: &[Vector<T>],
) -> Result<Matrix<T>> {
    if inputs.len() != outputs.len() {
        return Err(Error::DimensionMismatch {
            expected: inputs.len(),
            found: outputs.len(),
        });
    }
    let dim = inputs.first().ok_or(Error::EmptySet)?.len();
    if let Some(bad) = inputs.iter().chain(outputs).find(|v| v.len() != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: bad.len(),
        });
    }
    let (dev, i, j) = gram_of(inputs).max_abs_diff(&gram_of(outputs));
    if dev.is_nan() || dev > T::lit(T::GRAM_TOL) {
        return Err(Error::GramMismatch {
            i,
            j,
            deviation: dev.as_f64(),
        });
    }

    let drop_tol = T::lit(T::RANK_TOL);
    let mut in_basis: Vec<Vector<T>> = Vec::new();
    let mut out_basis: Vec<Vector<T>> = Vec::new();
    let mut remaining: Vec<usize> = (0..inputs.len()).collect();
    while !remaining.is_empty() && in_basis.len() < dim {
        let (pos, res) = remaining
            .iter()
            .enumerate()
            .map(|(pos, &idx)| (pos, residual_norm(&in_basis, &inputs[idx])))
            .fold(
                (0, -T::one()),
                |acc, cur| if cur.1 > acc.1 { cur } else { acc },
            );
        if res <= drop_tol {
            break;
        }
        let idx = remaining.remove(pos);

        let mut e = inputs[idx].clone();
        let coeffs = project_out(&in_basis, &mut e);
        let r = norm(&e);
        e.iter_mut().for_each(|z| *z = *z / r);

        let mut f = outputs[idx].clone();
        for (c, b) in coeffs.iter().zip(&out_basis) {
            f.iter_mut()
                .zip(b)
                .for_each(|(fi, &bi)| *fi = *fi - bi * *c);
        }
        // Exact arithmetic makes f orthonormal already; this only removes drift.
        project_out(&out_basis, &mut f);
        let fnorm = norm(&f);
        f.iter_mut().for_each(|z| *z = *z / fnorm);

        in_basis.push(e);
        out_basis.push(f);
    }

    extend_basis(&mut in_basis, dim);
    extend_basis(&mut out_basis, dim);

    let zero = Complex::new(T::zero(), T::zero());
    Ok(Matrix::from_fn(dim, dim, |r, c| {
        in_basis
            .iter()
            .zip(&out_basis)
            .fold(zero, |acc, (e, f)| acc + f[r] * e[c].conj())
    }))
}
