//! Small dense complex linear algebra used by the steady-state solvers.

use num_complex::Complex64;

pub type C64 = Complex64;
pub type Mat2 = [[C64; 2]; 2];
pub type Vec2 = [C64; 2];

pub const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub const ONE: C64 = C64 { re: 1.0, im: 0.0 };
pub const I: C64 = C64 { re: 0.0, im: 1.0 };

pub fn mat2_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[ZERO; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

pub fn mat2_adjoint(a: &Mat2) -> Mat2 {
    [
        [a[0][0].conj(), a[1][0].conj()],
        [a[0][1].conj(), a[1][1].conj()],
    ]
}

pub fn mat2_apply(a: &Mat2, v: &Vec2) -> Vec2 {
    [
        a[0][0] * v[0] + a[0][1] * v[1],
        a[1][0] * v[0] + a[1][1] * v[1],
    ]
}

pub fn mat2_scale(a: &Mat2, s: C64) -> Mat2 {
    [[a[0][0] * s, a[0][1] * s], [a[1][0] * s, a[1][1] * s]]
}

/// Largest entry modulus of A − A†.
pub fn mat2_hermitian_defect(a: &Mat2) -> f64 {
    let adj = mat2_adjoint(a);
    let mut worst = 0.0_f64;
    for i in 0..2 {
        for j in 0..2 {
            worst = worst.max((a[i][j] - adj[i][j]).norm());
        }
    }
    worst
}

/// Outcome of a pivoted elimination: solution and the determinant it implies.
#[derive(Clone, Copy, Debug)]
pub struct DenseSolution<const N: usize> {
    pub x: [C64; N],
    pub det: C64,
    /// Largest entry modulus of the original matrix.
    pub scale: f64,
}

/// Gaussian elimination with partial pivoting.
///
/// Returns `None` when the determinant modulus falls below `rel_tol · scale^N`,
/// `scale` being the largest entry modulus.
#[allow(clippy::needless_range_loop)]
pub fn solve_dense<const N: usize>(
    mut a: [[C64; N]; N],
    mut b: [C64; N],
    rel_tol: f64,
) -> Option<DenseSolution<N>> {
    let scale = a.iter().flatten().map(|z| z.norm()).fold(0.0_f64, f64::max);
    if scale == 0.0 {
        return None;
    }
    let mut det = ONE;
    for col in 0..N {
        let pivot = (col..N)
            .max_by(|&i, &j| a[i][col].norm().total_cmp(&a[j][col].norm()))
            .unwrap();
        if a[pivot][col].norm() == 0.0 {
            return None;
        }
        if pivot != col {
            a.swap(pivot, col);
            b.swap(pivot, col);
            det = -det;
        }
        let p = a[col][col];
        det *= p;
        for row in col + 1..N {
            let factor = a[row][col] / p;
            if factor == ZERO {
                continue;
            }
            for k in col..N {
                let v = a[col][k];
                a[row][k] -= factor * v;
            }
            let bv = b[col];
            b[row] -= factor * bv;
        }
    }
    if det.norm() < rel_tol * scale.powi(N as i32) {
        return None;
    }
    let mut x = [ZERO; N];
    for row in (0..N).rev() {
        let mut acc = b[row];
        for k in row + 1..N {
            acc -= a[row][k] * x[k];
        }
        x[row] = acc / a[row][row];
    }
    Some(DenseSolution { x, det, scale })
}
