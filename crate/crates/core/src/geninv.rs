//! Generalized inverses.
//!
//! With `A = F * diag(I_r, 0) * G^-1` every generalized inverse (`A A~ A = A`)
//! has the form
//!
//! ```text
//! A~ = G * [[I_r, X], [Y, Z]] * F^-1
//! ```
//!
//! for arbitrary blocks `X` (r x (m-r)), `Y` ((n-r) x r), `Z` ((n-r) x (m-r)).
//! Over GF(p) that gives exactly `p^(mn - r^2)` of them, which this module
//! can enumerate. Sampling draws the free blocks at random.

use num::BigUint;
use rand::Rng;
use serde::Serialize;

use crate::error::{shape_err, Error, Result};
use crate::field::Field;
use crate::matrix::{Matrix, RankNormalForm};

/// Default ceiling on exhaustive enumeration.
pub const DEFAULT_ENUM_CAP: u64 = 1 << 20;

/// Product of Frobenius norms, the natural error scale of a floating product.
pub(crate) fn product_scale<F: Field>(factors: &[&Matrix<F>]) -> f64 {
    factors.iter().map(|m| m.frobenius_norm()).product()
}

/// `lhs == rhs` where `lhs` was computed as the product of `factors`.
pub(crate) fn product_matches<F: Field>(lhs: &Matrix<F>, rhs: &Matrix<F>, factors: &[&Matrix<F>]) -> bool {
    if lhs.field().is_exact() {
        lhs == rhs
    } else {
        lhs.approx_eq_scaled(rhs, product_scale(factors))
    }
}

/// The free blocks of one generalized inverse, relative to a rank normal form.
#[derive(Clone, Debug)]
pub struct GenInverseParams<F: Field> {
    pub base: RankNormalForm<F>,
    pub x: Matrix<F>,
    pub y: Matrix<F>,
    pub z: Matrix<F>,
}

impl<F: Field> GenInverseParams<F> {
    /// Blocks `X = Y = Z = 0`.
    pub fn zero_blocks(base: RankNormalForm<F>) -> Self {
        let field = base.f.field().clone();
        let (m, n, r) = (base.f.rows(), base.g.rows(), base.rank);
        GenInverseParams {
            x: Matrix::zeros(&field, r, m - r),
            y: Matrix::zeros(&field, n - r, r),
            z: Matrix::zeros(&field, n - r, m - r),
            base,
        }
    }

    pub fn random<R: Rng + ?Sized>(base: RankNormalForm<F>, rng: &mut R) -> Self {
        let field = base.f.field().clone();
        let (m, n, r) = (base.f.rows(), base.g.rows(), base.rank);
        GenInverseParams {
            x: Matrix::random(&field, r, m - r, rng),
            y: Matrix::random(&field, n - r, r, rng),
            z: Matrix::random(&field, n - r, m - r, rng),
            base,
        }
    }

    /// The `n x m` middle factor `[[I, X], [Y, Z]]`.
    pub fn middle(&self) -> Matrix<F> {
        let field = self.base.f.field();
        let top = Matrix::identity(field, self.base.rank)
            .hstack(&self.x)
            .expect("block rows");
        let bottom = self.y.hstack(&self.z).expect("block rows");
        top.vstack(&bottom).expect("block cols")
    }

    /// `G * [[I, X], [Y, Z]] * F^-1`.
    pub fn assemble(&self) -> Matrix<F> {
        &(&self.base.g * &self.middle()) * &self.base.f_inv
    }
}

/// The generalized inverse with all free blocks zero.
pub fn canonical_generalized_inverse<F: Field>(a: &Matrix<F>) -> Matrix<F> {
    GenInverseParams::zero_blocks(a.rank_normal_form()).assemble()
}

/// Draws a generalized inverse of `a` with random free blocks.
pub fn sample_generalized_inverse<F: Field, R: Rng + ?Sized>(a: &Matrix<F>, rng: &mut R) -> Matrix<F> {
    GenInverseParams::random(a.rank_normal_form(), rng).assemble()
}

/// Reusable sampler that factors `a` once.
#[derive(Clone, Debug)]
pub struct InverseSampler<F: Field> {
    base: RankNormalForm<F>,
}

impl<F: Field> InverseSampler<F> {
    pub fn new(a: &Matrix<F>) -> Self {
        InverseSampler {
            base: a.rank_normal_form(),
        }
    }

    pub fn rank(&self) -> usize {
        self.base.rank
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Matrix<F> {
        GenInverseParams::random(self.base.clone(), rng).assemble()
    }
}

/// Number of generalized inverses of an `m x n` rank-`r` matrix over a field
/// of `order` elements, `order^(mn - r^2)`.
pub fn inverse_count(order: u64, rows: usize, cols: usize, rank: usize) -> BigUint {
    BigUint::from(order).pow((rows * cols - rank * rank) as u32)
}

/// The count as a `u64` when it fits under `cap`.
pub fn inverse_count_within(order: Option<u64>, rows: usize, cols: usize, rank: usize, cap: u64) -> Option<u64> {
    let count = inverse_count(order?, rows, cols, rank);
    u64::try_from(count).ok().filter(|&c| c <= cap)
}

/// Iterator over every generalized inverse of a matrix over GF(p).
#[derive(Clone, Debug)]
pub struct GenInverseIter<F: Field> {
    base: RankNormalForm<F>,
    order: u64,
    next: u64,
    total: u64,
}

impl<F: Field> GenInverseIter<F> {
    fn params_at(&self, mut k: u64) -> GenInverseParams<F> {
        let mut params = GenInverseParams::zero_blocks(self.base.clone());
        let field = self.base.f.field().clone();
        for block in [&mut params.x, &mut params.y, &mut params.z] {
            for i in 0..block.rows() {
                for j in 0..block.cols() {
                    block.set(i, j, field.nth_element(k % self.order));
                    k /= self.order;
                }
            }
        }
        params
    }

    pub fn total(&self) -> u64 {
        self.total
    }
}

impl<F: Field> Iterator for GenInverseIter<F> {
    type Item = Matrix<F>;

    fn next(&mut self) -> Option<Matrix<F>> {
        if self.next >= self.total {
            return None;
        }
        let out = self.params_at(self.next).assemble();
        self.next += 1;
        Some(out)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = (self.total - self.next) as usize;
        (left, Some(left))
    }
}

impl<F: Field> ExactSizeIterator for GenInverseIter<F> {}

/// Every generalized inverse of `a`; `a` must live over a finite field and
/// have at most `cap` of them.
pub fn enumerate_generalized_inverses<F: Field>(a: &Matrix<F>, cap: u64) -> Result<GenInverseIter<F>> {
    let order = a.field().order().ok_or(Error::NotFiniteField)?;
    let base = a.rank_normal_form();
    let count = inverse_count(order, a.rows(), a.cols(), base.rank);
    let total = u64::try_from(&count)
        .ok()
        .filter(|&c| c <= cap)
        .ok_or_else(|| Error::EnumerationTooLarge {
            count: count.to_string(),
            cap,
        })?;
    Ok(GenInverseIter {
        base,
        order,
        next: 0,
        total,
    })
}

fn check_inverse_shape<F: Field>(a: &Matrix<F>, b: &Matrix<F>) -> Result<()> {
    if b.shape() != (a.cols(), a.rows()) {
        return Err(shape_err(format!(
            "inverse candidate is {}x{}, expected {}x{}",
            b.rows(),
            b.cols(),
            a.cols(),
            a.rows()
        )));
    }
    if a.field() != b.field() {
        return Err(Error::FieldMismatch);
    }
    Ok(())
}

/// `A B A == A`.
pub fn is_generalized_inverse<F: Field>(a: &Matrix<F>, b: &Matrix<F>) -> Result<bool> {
    check_inverse_shape(a, b)?;
    Ok(product_matches(&(&(a * b) * a), a, &[a, b, a]))
}

/// `B1 A B2`, a {1,2}-inverse whenever `B1` and `B2` are generalized inverses.
pub fn one_two_inverse<F: Field>(a: &Matrix<F>, b1: &Matrix<F>, b2: &Matrix<F>) -> Result<Matrix<F>> {
    if !is_generalized_inverse(a, b1)? {
        return Err(Error::NotGeneralizedInverse("B1"));
    }
    if !is_generalized_inverse(a, b2)? {
        return Err(Error::NotGeneralizedInverse("B2"));
    }
    Ok(&(b1 * a) * b2)
}

/// Which of the four Moore–Penrose identities a candidate satisfies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct MpConditionSet {
    pub c1: bool,
    pub c2: bool,
    pub c3: bool,
    pub c4: bool,
}

impl MpConditionSet {
    pub fn all(&self) -> bool {
        self.c1 && self.c2 && self.c3 && self.c4
    }

    /// The satisfied condition numbers, e.g. `[1, 2]`.
    pub fn satisfied(&self) -> Vec<u8> {
        [self.c1, self.c2, self.c3, self.c4]
            .iter()
            .zip(1u8..)
            .filter_map(|(&ok, k)| ok.then_some(k))
            .collect()
    }
}

/// Evaluates `ABA = A`, `BAB = B`, `(AB)* = AB`, `(BA)* = BA`.
pub fn mp_conditions<F: Field>(a: &Matrix<F>, b: &Matrix<F>) -> Result<MpConditionSet> {
    check_inverse_shape(a, b)?;
    let ab = a * b;
    let ba = b * a;
    Ok(MpConditionSet {
        c1: product_matches(&(&ab * a), a, &[a, b, a]),
        c2: product_matches(&(&ba * b), b, &[b, a, b]),
        c3: product_matches(&ab.conj_transpose(), &ab, &[a, b]),
        c4: product_matches(&ba.conj_transpose(), &ba, &[b, a]),
    })
}

/// Moore–Penrose pseudoinverse over the reals or complexes, from the
/// full-rank factorization `A = B C` read off the rank normal form:
/// `A+ = C* (C C*)^-1 (B* B)^-1 B*`.
pub fn moore_penrose<F: Field>(a: &Matrix<F>) -> Result<Matrix<F>> {
    if a.field().is_exact() {
        return Err(Error::UnsupportedField("Moore-Penrose pseudoinverse"));
    }
    let rnf = a.rank_normal_form();
    let (m, n, r) = (a.rows(), a.cols(), rnf.rank);
    if r == 0 {
        return Ok(Matrix::zeros(a.field(), n, m));
    }
    let first: Vec<usize> = (0..r).collect();
    let b = rnf.f.select(&(0..m).collect::<Vec<_>>(), &first);
    let c = rnf.g_inv.select(&first, &(0..n).collect::<Vec<_>>());
    let bs = b.conj_transpose();
    let cs = c.conj_transpose();
    let cc_inv = (&c * &cs).invert()?;
    let bb_inv = (&bs * &b).invert()?;
    Ok(&(&(&cs * &cc_inv) * &bb_inv) * &bs)
}

/// Drazin inverse together with the index of the source matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DrazinInverse<F: Field> {
    pub inverse: Matrix<F>,
    pub index: u32,
}

/// Smallest `k >= 0` with `rank(A^(k+1)) == rank(A^k)`.
pub fn matrix_index<F: Field>(a: &Matrix<F>) -> Result<u32> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    let mut power = Matrix::identity(a.field(), a.rows());
    let mut rank = a.rows();
    for k in 0..=a.rows() as u32 {
        let next = &power * a;
        let next_rank = next.rank();
        if next_rank == rank {
            return Ok(k);
        }
        power = next;
        rank = next_rank;
    }
    unreachable!("ranks of powers stabilise within n steps")
}

/// Checks `X A X = X`, `A X = X A` and `A^(k+1) X = A^k`.
pub fn satisfies_drazin_axioms<F: Field>(a: &Matrix<F>, x: &Matrix<F>, index: u32) -> Result<bool> {
    check_inverse_shape(a, x)?;
    let ak = a.pow(index)?;
    let ak1 = &ak * a;
    let ax = a * x;
    let xa = x * a;
    Ok(product_matches(&(&xa * x), x, &[x, a, x])
        && product_matches(&ax, &xa, &[a, x])
        && product_matches(&(&ak1 * x), &ak, &[&ak1, x]))
}

/// Drazin inverse via `A^k (A^(2k+1))~ A^k` for a caller-chosen {1}-inverse
/// of `A^(2k+1)`; the axioms are checked before anything is returned.
pub fn drazin_inverse_with<F: Field>(
    a: &Matrix<F>,
    one_inverse: impl FnOnce(&Matrix<F>) -> Matrix<F>,
) -> Result<DrazinInverse<F>> {
    let k = matrix_index(a)?;
    let ak = a.pow(k)?;
    let big = a.pow(2 * k + 1)?;
    let candidate = &(&ak * &one_inverse(&big)) * &ak;
    if !satisfies_drazin_axioms(a, &candidate, k)? {
        return Err(Error::VerificationFailed(format!(
            "Drazin candidate for index {k} violates the axioms"
        )));
    }
    Ok(DrazinInverse {
        inverse: candidate,
        index: k,
    })
}

/// Drazin inverse using the canonical {1}-inverse.
pub fn drazin_inverse<F: Field>(a: &Matrix<F>) -> Result<DrazinInverse<F>> {
    drazin_inverse_with(a, canonical_generalized_inverse)
}
