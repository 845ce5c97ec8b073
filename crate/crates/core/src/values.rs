//! Concrete normed-value arithmetic.
//!
//! Test functions take values in one of three model spaces: complex scalars,
//! finite-dimensional `l_p` vectors, or Schatten-p matrices (the `l_p` norm of
//! the singular values). Dimensions are capped at [`MAX_DIM`]; everything is
//! double precision.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Largest admitted vector/matrix dimension.
pub const MAX_DIM: usize = 16;

/// The space a value lives in. `p` is the norm exponent, `1 <= p <= inf`
/// (`f64::INFINITY` for the max norm).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Space {
    Scalar,
    Vector { dim: usize, p: f64 },
    Matrix { dim: usize, p: f64 },
}

impl Space {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Space::Scalar => Ok(()),
            Space::Vector { dim, p } | Space::Matrix { dim, p } => {
                if dim == 0 || dim > MAX_DIM {
                    return Err(Error::Structural(format!(
                        "dimension {dim} outside 1..={MAX_DIM}"
                    )));
                }
                if !(p >= 1.0) {
                    return Err(Error::Structural(format!("norm exponent p={p} must be >= 1")));
                }
                Ok(())
            }
        }
    }

    /// Number of complex components in a payload of this space.
    pub fn payload_len(&self) -> usize {
        match *self {
            Space::Scalar => 1,
            Space::Vector { dim, .. } => dim,
            Space::Matrix { dim, .. } => dim * dim,
        }
    }

    pub fn zero_value(&self) -> NormedValue {
        NormedValue {
            space: *self,
            payload: vec![C64::new(0.0, 0.0); self.payload_len()],
        }
    }

    /// Norm of a raw component slice interpreted in this space.
    ///
    /// This is the hot path behind every operator evaluation, so the scalar
    /// and 2x2-matrix cases are special-cased (closed-form singular values).
    pub fn norm_of(&self, payload: &[C64]) -> f64 {
        debug_assert_eq!(payload.len(), self.payload_len());
        match *self {
            Space::Scalar => payload[0].norm(),
            Space::Vector { p, .. } => lp_norm(payload.iter().map(|z| z.norm()), p),
            Space::Matrix { dim: 2, p } => {
                let (s1, s2) = singular_values_2x2(payload);
                lp_norm([s1, s2].into_iter(), p)
            }
            Space::Matrix { dim, p } => {
                let sv = singular_values(dim, payload);
                lp_norm(sv.into_iter(), p)
            }
        }
    }
}

/// An element of a concrete normed space together with its space tag.
///
/// Immutable after construction; freely shared between threads.
#[derive(Debug, Clone, PartialEq)]
pub struct NormedValue {
    space: Space,
    payload: Vec<C64>,
}

impl NormedValue {
    pub fn new(space: Space, payload: Vec<C64>) -> Result<Self> {
        space.validate()?;
        if payload.len() != space.payload_len() {
            return Err(Error::Structural(format!(
                "payload has {} components, space {:?} needs {}",
                payload.len(),
                space,
                space.payload_len()
            )));
        }
        Ok(Self { space, payload })
    }

    pub fn scalar(z: C64) -> Self {
        Self { space: Space::Scalar, payload: vec![z] }
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn components(&self) -> &[C64] {
        &self.payload
    }

    pub fn norm(&self) -> f64 {
        self.space.norm_of(&self.payload)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_space(other)?;
        let payload = self
            .payload
            .iter()
            .zip(&other.payload)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Self { space: self.space, payload })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_space(other)?;
        let payload = self
            .payload
            .iter()
            .zip(&other.payload)
            .map(|(a, b)| a - b)
            .collect();
        Ok(Self { space: self.space, payload })
    }

    pub fn scale(&self, c: C64) -> Self {
        Self {
            space: self.space,
            payload: self.payload.iter().map(|z| z * c).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.payload.iter().all(|z| z.re == 0.0 && z.im == 0.0)
    }

    fn check_same_space(&self, other: &Self) -> Result<()> {
        if self.space != other.space {
            return Err(Error::Structural(format!(
                "space mismatch: {:?} vs {:?}",
                self.space, other.space
            )));
        }
        Ok(())
    }
}

/// `(sum |x_i|^p)^{1/p}`, max norm for infinite `p`. Scales by the largest
/// entry so large exponents stay well conditioned.
fn lp_norm(values: impl Iterator<Item = f64> + Clone, p: f64) -> f64 {
    if p.is_infinite() {
        return values.fold(0.0, f64::max);
    }
    let top = values.clone().fold(0.0, f64::max);
    if top == 0.0 {
        return 0.0;
    }
    let sum: f64 = values.map(|v| (v / top).powf(p)).sum();
    top * sum.powf(1.0 / p)
}

/// Closed-form singular values of a complex 2x2 matrix (row-major).
///
/// `s1^2 + s2^2 = ||A||_F^2` and `s1 s2 = |det A|`; the small value is
/// recovered from the determinant to avoid cancellation.
fn singular_values_2x2(a: &[C64]) -> (f64, f64) {
    let frob2: f64 = a.iter().map(|z| z.norm_sqr()).sum();
    if frob2 == 0.0 {
        return (0.0, 0.0);
    }
    let det = (a[0] * a[3] - a[1] * a[2]).norm();
    let gap = (frob2 * frob2 - 4.0 * det * det).max(0.0).sqrt();
    let s1 = ((frob2 + gap) / 2.0).sqrt();
    let s2 = if s1 > 0.0 { det / s1 } else { 0.0 };
    (s1, s2)
}

/// Singular values of a complex `dim x dim` matrix (row-major), descending.
///
/// One-sided Jacobi: repeatedly orthogonalizes column pairs of the matrix
/// itself, so squaring the condition number is avoided and the values are
/// accurate to ~1e-14 relative for `dim <= 16`, comfortably inside the 1e-10
/// budget the callers rely on.
pub fn singular_values(dim: usize, a: &[C64]) -> Vec<f64> {
    assert!(dim >= 1 && dim <= MAX_DIM);
    assert_eq!(a.len(), dim * dim);
    // column-major working copy
    let mut col = vec![C64::new(0.0, 0.0); dim * dim];
    for r in 0..dim {
        for c in 0..dim {
            col[c * dim + r] = a[r * dim + c];
        }
    }
    let tol = 1e-15;
    for _sweep in 0..60 {
        let mut rotated = false;
        for i in 0..dim {
            for j in (i + 1)..dim {
                let (ci, cj) = (i * dim, j * dim);
                let mut alpha = 0.0;
                let mut beta = 0.0;
                let mut gamma = C64::new(0.0, 0.0);
                for r in 0..dim {
                    alpha += col[ci + r].norm_sqr();
                    beta += col[cj + r].norm_sqr();
                    gamma += col[ci + r].conj() * col[cj + r];
                }
                let g = gamma.norm();
                if g <= tol * (alpha * beta).sqrt() || g == 0.0 {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for r in 0..dim {
                    let u = col[ci + r];
                    let v = col[cj + r] * phase.conj();
                    col[ci + r] = u * c - v * s;
                    col[cj + r] = u * s + v * c;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<f64> = (0..dim)
        .map(|c| col[c * dim..(c + 1) * dim].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
        .collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
    sv
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn scalar_norm_is_modulus() {
        let v = NormedValue::scalar(c(3.0, 4.0));
        assert_eq!(v.norm(), 5.0);
    }

    #[test]
    fn schatten2_identity() {
        let space = Space::Matrix { dim: 2, p: 2.0 };
        let v = NormedValue::new(space, vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)])
            .unwrap();
        assert!((v.norm() - 2.0f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn schatten1_nilpotent() {
        // [[0,2],[0,0]] has singular values (2, 0)
        let space = Space::Matrix { dim: 2, p: 1.0 };
        let v = NormedValue::new(space, vec![c(0.0, 0.0), c(2.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)])
            .unwrap();
        assert!((v.norm() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn add_zero_and_scale_zero() {
        let space = Space::Vector { dim: 3, p: 1.5 };
        let v = NormedValue::new(space, vec![c(1.0, 2.0), c(-0.5, 0.0), c(0.0, 3.0)]).unwrap();
        let zero = space.zero_value();
        assert_eq!(v.add(&zero).unwrap(), v);
        assert!(v.scale(c(0.0, 0.0)).is_zero());
        // scale(i, 1) = i in the scalar case
        let one = NormedValue::scalar(c(1.0, 0.0));
        assert_eq!(one.scale(c(0.0, 1.0)).components()[0], c(0.0, 1.0));
    }

    #[test]
    fn space_mismatch_is_error() {
        let a = NormedValue::scalar(c(1.0, 0.0));
        let b = Space::Vector { dim: 2, p: 2.0 }.zero_value();
        assert!(a.add(&b).is_err());
        let bad = NormedValue::new(Space::Matrix { dim: 3, p: 2.0 }, vec![c(1.0, 0.0)]);
        assert!(bad.is_err());
    }

    #[test]
    fn max_norm_vector() {
        let space = Space::Vector { dim: 3, p: f64::INFINITY };
        let v = NormedValue::new(space, vec![c(1.0, 0.0), c(0.0, -2.0), c(0.5, 0.5)]).unwrap();
        assert_eq!(v.norm(), 2.0);
    }

    fn nalgebra_singular_values(dim: usize, a: &[C64]) -> Vec<f64> {
        let m = nalgebra::DMatrix::from_fn(dim, dim, |r, c| a[r * dim + c]);
        let mut sv: Vec<f64> = m.singular_values().iter().copied().collect();
        sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
        sv
    }

    #[test]
    fn jacobi_matches_reference_svd() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        for &dim in &[2usize, 3, 5, 8, 16] {
            for _ in 0..8 {
                let a: Vec<C64> = (0..dim * dim)
                    .map(|_| c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)))
                    .collect();
                let mine = singular_values(dim, &a);
                let theirs = nalgebra_singular_values(dim, &a);
                for (x, y) in mine.iter().zip(&theirs) {
                    assert!((x - y).abs() < 1e-10 * (1.0 + y), "dim {dim}: {x} vs {y}");
                }
            }
        }
    }

    /// Random unitary via Gram-Schmidt of a random complex matrix.
    fn random_unitary(dim: usize, rng: &mut impl rand::Rng) -> Vec<C64> {
        let mut cols: Vec<Vec<C64>> = (0..dim)
            .map(|_| (0..dim).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect())
            .collect();
        for i in 0..dim {
            for j in 0..i {
                let proj: C64 = (0..dim).map(|r| cols[j][r].conj() * cols[i][r]).sum();
                for r in 0..dim {
                    let t = cols[j][r] * proj;
                    cols[i][r] -= t;
                }
            }
            let nrm = (0..dim).map(|r| cols[i][r].norm_sqr()).sum::<f64>().sqrt();
            for r in 0..dim {
                cols[i][r] /= nrm;
            }
        }
        let mut out = vec![c(0.0, 0.0); dim * dim];
        for r in 0..dim {
            for cc in 0..dim {
                out[r * dim + cc] = cols[cc][r];
            }
        }
        out
    }

    fn mat_mul(dim: usize, a: &[C64], b: &[C64]) -> Vec<C64> {
        let mut out = vec![c(0.0, 0.0); dim * dim];
        for r in 0..dim {
            for cc in 0..dim {
                out[r * dim + cc] = (0..dim).map(|k| a[r * dim + k] * b[k * dim + cc]).sum();
            }
        }
        out
    }

    #[test]
    fn schatten_norm_unitary_invariance() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for &dim in &[2usize, 4, 6] {
            for &p in &[1.0, 2.0, 3.5, f64::INFINITY] {
                let space = Space::Matrix { dim, p };
                let a: Vec<C64> = (0..dim * dim)
                    .map(|_| c(rand::Rng::gen_range(&mut rng, -3.0..3.0), rand::Rng::gen_range(&mut rng, -3.0..3.0)))
                    .collect();
                let u = random_unitary(dim, &mut rng);
                let v = random_unitary(dim, &mut rng);
                let uav = mat_mul(dim, &u, &mat_mul(dim, &a, &v));
                let na = NormedValue::new(space, a).unwrap().norm();
                let nuav = NormedValue::new(space, uav).unwrap().norm();
                assert!((na - nuav).abs() < 1e-9 * (1.0 + na), "dim {dim} p {p}: {na} vs {nuav}");
            }
        }
    }

    fn arb_space() -> impl Strategy<Value = Space> {
        prop_oneof![
            Just(Space::Scalar),
            (1usize..=6, prop_oneof![Just(1.0), Just(1.5), Just(2.0), Just(4.0), Just(f64::INFINITY)])
                .prop_map(|(dim, p)| Space::Vector { dim, p }),
            (1usize..=4, prop_oneof![Just(1.0), Just(2.0), Just(3.0)])
                .prop_map(|(dim, p)| Space::Matrix { dim, p }),
        ]
    }

    fn arb_value(space: Space) -> impl Strategy<Value = NormedValue> {
        proptest::collection::vec((-5.0f64..5.0, -5.0f64..5.0), space.payload_len())
            .prop_map(move |v| {
                NormedValue::new(space, v.into_iter().map(|(re, im)| c(re, im)).collect()).unwrap()
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(128))]

        #[test]
        fn norm_nonnegative_and_definite(space in arb_space()) {
            let zero = space.zero_value();
            prop_assert_eq!(zero.norm(), 0.0);
        }

        #[test]
        fn norm_homogeneous((v, re, im) in arb_space().prop_flat_map(|s| (arb_value(s), -4.0f64..4.0, -4.0f64..4.0))) {
            let sc = c(re, im);
            let lhs = v.scale(sc).norm();
            let rhs = sc.norm() * v.norm();
            prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + rhs));
        }

        #[test]
        fn norm_triangle(pair in arb_space().prop_flat_map(|s| (arb_value(s), arb_value(s)))) {
            let (u, v) = pair;
            let lhs = u.add(&v).unwrap().norm();
            let rhs = u.norm() + v.norm();
            prop_assert!(lhs <= rhs + 1e-12 * (1.0 + rhs));
        }

        #[test]
        fn norm_zero_iff_zero(pair in arb_space().prop_flat_map(|s| (Just(s), arb_value(s)))) {
            let (_, v) = pair;
            if v.is_zero() {
                prop_assert_eq!(v.norm(), 0.0);
            } else {
                prop_assert!(v.norm() > 0.0);
            }
        }
    }
}
