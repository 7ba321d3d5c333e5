use crate::error::{dim_err, Error, Result};
use crate::linalg::Matrix;
use crate::scalar::Real;

/// Eigendecomposition `S = V diag(values) Vᵀ` of a symmetric matrix.
#[derive(Debug, Clone)]
pub struct SymEig<T> {
    /// Eigenvalues in descending order.
    pub values: Vec<T>,
    /// Orthogonal matrix whose columns are the matching eigenvectors.
    pub vectors: Matrix<T>,
}

impl<T: Real> SymEig<T> {
    /// `V diag(f(λ)) Vᵀ`.
    pub fn apply(&self, f: impl Fn(T) -> T) -> Matrix<T> {
        let n = self.values.len();
        let fv: Vec<T> = self.values.iter().map(|&l| f(l)).collect();
        let scaled = Matrix::from_fn(n, n, |i, j| self.vectors[(i, j)] * fv[j]);
        scaled.matmul_tr(&self.vectors).symmetrized()
    }
}

pub fn sym_eig<T: Real>(s: &Matrix<T>) -> Result<SymEig<T>> {
    sym_eig_with(s, 100)
}

/// Cyclic Jacobi with threshold sweeps.
pub fn sym_eig_with<T: Real>(s: &Matrix<T>, max_sweeps: usize) -> Result<SymEig<T>> {
    if !s.is_square() {
        return dim_err(format!("sym_eig of non-square {:?}", s.shape()));
    }
    let n = s.rows();
    let mut a = s.symmetrized();
    let mut v = Matrix::<T>::identity(n);
    let eps = T::epsilon();
    let hundred = T::lit(100.0);
    let norm = a.norm_fro();

    let off = |a: &Matrix<T>| -> T {
        let mut acc = T::zero();
        for p in 0..n {
            for q in p + 1..n {
                acc = acc + a[(p, q)] * a[(p, q)];
            }
        }
        acc.sqrt()
    };

    let mut converged = n < 2 || norm == T::zero();
    let mut sweep = 0;
    while !converged {
        if sweep >= max_sweeps {
            return Err(Error::ConvergenceFailure { what: "jacobi eigensolver".into(), iterations: sweep });
        }
        let off_norm = off(&a);
        if off_norm <= eps * T::lit(0.5) * norm {
            break;
        }
        let threshold = if sweep < 3 { T::lit(0.2) * off_norm / T::from_count(n * n) } else { T::zero() };
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let g = hundred * apq.abs();
                if sweep > 3 && a[(p, p)].abs() + g == a[(p, p)].abs() && a[(q, q)].abs() + g == a[(q, q)].abs() {
                    a[(p, q)] = T::zero();
                    a[(q, p)] = T::zero();
                    continue;
                }
                if apq.abs() <= threshold || apq == T::zero() {
                    continue;
                }
                let app = a[(p, p)];
                let aqq = a[(q, q)];
                let theta = (aqq - app) / (T::lit(2.0) * apq);
                let t = {
                    let mag = T::one() / (theta.abs() + (theta * theta + T::one()).sqrt());
                    if theta < T::zero() {
                        -mag
                    } else {
                        mag
                    }
                };
                let c = T::one() / (t * t + T::one()).sqrt();
                let sn = t * c;
                for r in 0..n {
                    if r == p || r == q {
                        continue;
                    }
                    let arp = a[(r, p)];
                    let arq = a[(r, q)];
                    let np = c * arp - sn * arq;
                    let nq = sn * arp + c * arq;
                    a[(r, p)] = np;
                    a[(p, r)] = np;
                    a[(r, q)] = nq;
                    a[(q, r)] = nq;
                }
                a[(p, p)] = app - t * apq;
                a[(q, q)] = aqq + t * apq;
                a[(p, q)] = T::zero();
                a[(q, p)] = T::zero();
                for r in 0..n {
                    let vrp = v[(r, p)];
                    let vrq = v[(r, q)];
                    v[(r, p)] = c * vrp - sn * vrq;
                    v[(r, q)] = sn * vrp + c * vrq;
                }
            }
        }
        sweep += 1;
        converged = off(&a) <= eps * T::lit(0.5) * norm;
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].partial_cmp(&a[(i, i)]).unwrap_or(std::cmp::Ordering::Equal));
    let values = order.iter().map(|&i| a[(i, i)]).collect();
    let vectors = Matrix::from_fn(n, n, |r, k| v[(r, order[k])]);
    Ok(SymEig { values, vectors })
}
