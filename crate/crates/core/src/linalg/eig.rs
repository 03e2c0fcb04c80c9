//! Cyclic complex Jacobi eigensolver for small dense Hermitian matrices.

use num_complex::Complex;

use super::Matrix;
use crate::error::{Error, Result};
use crate::scalar::Real;

const MAX_SWEEPS: usize = 64;

/// Eigendecomposition `M = V diag(λ) V^H` with ascending eigenvalues.
#[derive(Debug, Clone, PartialEq)]
pub struct HermEig<T> {
    pub eigenvalues: Vec<T>,
    /// Unitary matrix whose columns are the eigenvectors.
    pub eigenvectors: Matrix<T>,
}

impl<T: Real> HermEig<T> {
    pub fn min(&self) -> T {
        self.eigenvalues.first().copied().unwrap_or_else(T::zero)
    }

    pub fn max(&self) -> T {
        self.eigenvalues.last().copied().unwrap_or_else(T::zero)
    }

    /// `V f(diag(λ)) V^H`.
    pub fn reconstruct_with(&self, f: impl Fn(T) -> T) -> Matrix<T> {
        let v = &self.eigenvectors;
        let n = v.rows();
        let mapped: Vec<T> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        Matrix::from_fn(n, n, |i, j| {
            (0..n).fold(Complex::new(T::zero(), T::zero()), |acc, k| {
                acc + v[(i, k)] * v[(j, k)].conj() * mapped[k]
            })
        })
    }

    pub fn reconstruct(&self) -> Matrix<T> {
        self.reconstruct_with(|l| l)
    }
}

/// Eigendecomposition of a Hermitian matrix.
///
/// Fails with [`Error::NotHermitian`] when `max |M - M^H|` exceeds the
/// scalar's symmetry tolerance. The input is symmetrized before iterating.
/// Eigenvectors are phase-fixed so that their first non-negligible component
/// is real and positive.
pub fn herm_eig<T: Real>(m: &Matrix<T>) -> Result<HermEig<T>> {
    m.ensure_square()?;
    if !m.is_finite() {
        return Err(Error::NonFinite);
    }
    let dev = m.hermitian_deviation();
    if dev > T::lit(T::SYMMETRY_TOL) {
        return Err(Error::NotHermitian(dev.as_f64()));
    }

    let n = m.rows();
    let half = T::lit(0.5);
    let zero = Complex::new(T::zero(), T::zero());
    let mut a = Matrix::from_fn(n, n, |i, j| {
        if i == j {
            Complex::new(m[(i, i)].re, T::zero())
        } else {
            (m[(i, j)] + m[(j, i)].conj()) * half
        }
    });
    let mut v = Matrix::identity(n);

    let scale = a.max_abs().max(T::min_positive_value());
    let threshold = T::epsilon() * scale;
    for _ in 0..MAX_SWEEPS {
        let mut off = T::zero();
        for p in 0..n {
            for q in p + 1..n {
                off = off.max(a[(p, q)].norm());
            }
        }
        if off <= threshold {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let mag = apq.norm();
                if mag <= T::min_positive_value() {
                    continue;
                }
                let phase = apq / mag;
                let tau = (a[(q, q)].re - a[(p, p)].re) / (mag + mag);
                let sign = if tau < T::zero() { -T::one() } else { T::one() };
                let t = sign / (tau.abs() + (T::one() + tau * tau).sqrt());
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = t * c;
                // J_pp = J_qq = c, J_pq = s e^{ia}, J_qp = -s e^{-ia}; A <- J^H A J.
                let jpq = phase * s;
                let jqp = -(phase.conj() * s);
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * c + akq * jqp;
                    a[(k, q)] = akp * jpq + akq * c;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = apk * c + aqk * jqp.conj();
                    a[(q, k)] = apk * jpq.conj() + aqk * c;
                }
                a[(p, q)] = zero;
                a[(q, p)] = zero;
                a[(p, p)] = Complex::new(a[(p, p)].re, T::zero());
                a[(q, q)] = Complex::new(a[(q, q)].re, T::zero());
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * c + vkq * jqp;
                    v[(k, q)] = vkp * jpq + vkq * c;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.partial_cmp(&a[(j, j)].re).expect("finite"));
    let eigenvalues: Vec<T> = order.iter().map(|&k| a[(k, k)].re).collect();

    let phase_floor = T::epsilon().sqrt();
    let mut columns: Vec<Vec<Complex<T>>> = order.iter().map(|&k| v.column(k)).collect();
    for col in &mut columns {
        if let Some(lead) = col.iter().find(|z| z.norm() > phase_floor).copied() {
            let fix = lead.conj() / lead.norm();
            col.iter_mut().for_each(|z| *z = *z * fix);
        }
    }
    Ok(HermEig {
        eigenvalues,
        eigenvectors: Matrix::from_columns(&columns)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    type C = Complex<f64>;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    #[test]
    fn identity_has_unit_spectrum() {
        let e = herm_eig(&Matrix::<f64>::identity(2)).unwrap();
        assert_eq!(e.eigenvalues, vec![1.0, 1.0]);
    }

    #[test]
    fn two_by_two_closed_form() {
        let m = Matrix::from_rows(&[
            vec![c(1.0, 0.0), c(0.5, 0.0)],
            vec![c(0.5, 0.0), c(1.0, 0.0)],
        ])
        .unwrap();
        let e = herm_eig(&m).unwrap();
        assert!((e.eigenvalues[0] - 0.5).abs() < 1e-14);
        assert!((e.eigenvalues[1] - 1.5).abs() < 1e-14);
    }

    #[test]
    fn complex_reconstruction() {
        let m = Matrix::from_rows(&[
            vec![c(2.0, 0.0), c(0.3, 0.7), c(-0.1, 0.2)],
            vec![c(0.3, -0.7), c(1.0, 0.0), c(0.0, -0.5)],
            vec![c(-0.1, -0.2), c(0.0, 0.5), c(-1.0, 0.0)],
        ])
        .unwrap();
        let e = herm_eig(&m).unwrap();
        assert!(e.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
        assert!(e.reconstruct().max_abs_diff(&m).0 < 1e-12);
        assert!(e.eigenvectors.unitarity_deviation() < 1e-12);
        for k in 0..3 {
            let lead = e.eigenvectors[(0, k)];
            assert!(lead.im.abs() < 1e-15 && lead.re > 0.0);
        }
    }

    #[test]
    fn rejects_non_hermitian_and_non_square() {
        let m = Matrix::from_rows(&[
            vec![c(1.0, 0.0), c(1.0, 0.0)],
            vec![c(0.0, 0.0), c(1.0, 0.0)],
        ])
        .unwrap();
        assert!(matches!(herm_eig(&m), Err(Error::NotHermitian(_))));
        let r = Matrix::<f64>::zeros(2, 3);
        assert!(matches!(
            herm_eig(&r),
            Err(Error::NotSquare { rows: 2, cols: 3 })
        ));
    }

    #[test]
    fn single_precision() {
        let m = Matrix::from_rows(&[
            vec![Complex::new(1.0f32, 0.0), Complex::new(0.0, 0.5)],
            vec![Complex::new(0.0, -0.5), Complex::new(1.0, 0.0)],
        ])
        .unwrap();
        let e = herm_eig(&m).unwrap();
        assert!((e.eigenvalues[0] - 0.5).abs() < 1e-6);
        assert!((e.eigenvalues[1] - 1.5).abs() < 1e-6);
    }
}
