//! Dense n-mode tensors and tensor CUR verifiers.
//!
//! Entries are stored with mode 1 varying fastest. The mode-`i` unfolding is
//! `d_i x prod_{j != i} d_j` and orders its columns with the lower modes
//! varying fastest, so a multi-index `(i_1, .., i_n)` without `i_i` lands in
//! column `sum_{k != i} i_k * prod_{m < k, m != i} d_m` (zero-based).
//!
//! Modes are zero-based throughout the API. Index sets stay 1-based like
//! everywhere else.

use std::fmt;

use rand::{Rng, RngCore};
use serde::Serialize;

use crate::cur::{
    inverse_count_under_cap, involution_note, quantify, select_indices, Budget, Flag, Mode, SCHEMA_VERSION,
};
use crate::error::{shape_err, Error, Result};
use crate::field::{Field, FieldSpec};
use crate::geninv::{enumerate_generalized_inverses, product_scale, InverseSampler};
use crate::matrix::{IndexSet, Matrix};
use crate::seeded_rng;

/// Sampled tuples used for "every tuple" quantifiers when enumeration is out
/// of reach.
pub const DEFAULT_TUPLES: usize = 8;

/// Resampling cap of [`random_low_mlrank_tensor`].
pub const MLRANK_RETRIES: usize = 100;

#[derive(Clone, Debug, PartialEq)]
pub struct Tensor<F: Field> {
    field: F,
    shape: Vec<usize>,
    data: Vec<F::Elem>,
}

/// Number of columns of the mode-`mode` unfolding.
fn others_len(shape: &[usize], mode: usize) -> usize {
    shape
        .iter()
        .enumerate()
        .filter(|&(k, _)| k != mode)
        .map(|(_, d)| d)
        .product()
}

/// Decodes a linear index (mode 1 fastest) into `idx`.
fn decode(mut k: usize, shape: &[usize], idx: &mut [usize]) {
    for (slot, &d) in idx.iter_mut().zip(shape) {
        *slot = k % d;
        k /= d;
    }
}

impl<F: Field> Tensor<F> {
    pub fn new(field: &F, shape: Vec<usize>, data: Vec<F::Elem>) -> Result<Self> {
        if shape.is_empty() {
            return Err(shape_err("a tensor needs at least one mode"));
        }
        let len: usize = shape.iter().product();
        if data.len() != len {
            return Err(shape_err(format!(
                "{} entries cannot fill shape {:?}",
                data.len(),
                shape
            )));
        }
        Ok(Tensor {
            field: field.clone(),
            shape,
            data,
        })
    }

    pub fn zeros(field: &F, shape: &[usize]) -> Self {
        let len = shape.iter().product();
        Tensor {
            field: field.clone(),
            shape: shape.to_vec(),
            data: vec![field.zero(); len],
        }
    }

    /// Fills entries from their zero-based multi-index.
    pub fn from_fn(field: &F, shape: &[usize], mut f: impl FnMut(&[usize]) -> F::Elem) -> Self {
        let len: usize = shape.iter().product();
        let mut idx = vec![0; shape.len()];
        let data = (0..len)
            .map(|k| {
                decode(k, shape, &mut idx);
                f(&idx)
            })
            .collect();
        Tensor {
            field: field.clone(),
            shape: shape.to_vec(),
            data,
        }
    }

    pub fn random<R: Rng + ?Sized>(field: &F, shape: &[usize], rng: &mut R) -> Self {
        let len = shape.iter().product();
        let data = (0..len).map(|_| field.sample(rng)).collect();
        Tensor {
            field: field.clone(),
            shape: shape.to_vec(),
            data,
        }
    }

    /// Views a matrix as a 2-mode tensor.
    pub fn from_matrix(m: &Matrix<F>) -> Self {
        Self::from_fn(m.field(), &[m.rows(), m.cols()], |idx| m.get(idx[0], idx[1]).clone())
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    /// Number of modes.
    pub fn order(&self) -> usize {
        self.shape.len()
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    /// Entries in linearization order.
    pub fn data(&self) -> &[F::Elem] {
        &self.data
    }

    pub fn into_data(self) -> Vec<F::Elem> {
        self.data
    }

    pub fn linear_index(&self, idx: &[usize]) -> usize {
        assert_eq!(idx.len(), self.order(), "multi-index has the wrong length");
        let mut k = 0;
        let mut s = 1;
        for (&i, &d) in idx.iter().zip(&self.shape) {
            assert!(i < d, "index {i} outside mode of size {d}");
            k += i * s;
            s *= d;
        }
        k
    }

    /// Zero-based entry access.
    pub fn get(&self, idx: &[usize]) -> &F::Elem {
        &self.data[self.linear_index(idx)]
    }

    pub fn set(&mut self, idx: &[usize], v: F::Elem) {
        let k = self.linear_index(idx);
        self.data[k] = v;
    }

    fn check_mode(&self, mode: usize) -> Result<()> {
        if mode >= self.order() {
            return Err(Error::BadMode {
                mode,
                order: self.order(),
            });
        }
        Ok(())
    }

    /// The mode-`mode` unfolding.
    pub fn unfold(&self, mode: usize) -> Result<Matrix<F>> {
        self.check_mode(mode)?;
        let rows = self.shape[mode];
        let cols = others_len(&self.shape, mode);
        let col_strides = unfold_strides(&self.shape, mode);
        let mut data = vec![self.field.zero(); self.len()];
        let mut idx = vec![0; self.order()];
        for (k, v) in self.data.iter().enumerate() {
            decode(k, &self.shape, &mut idx);
            let col: usize = idx.iter().zip(&col_strides).map(|(i, s)| i * s).sum();
            data[idx[mode] * cols + col] = v.clone();
        }
        Matrix::new(&self.field, rows, cols, data)
    }

    /// Inverse of [`Tensor::unfold`].
    pub fn fold(m: &Matrix<F>, mode: usize, shape: &[usize]) -> Result<Self> {
        if mode >= shape.len() {
            return Err(Error::BadMode {
                mode,
                order: shape.len(),
            });
        }
        let len: usize = shape.iter().product();
        let rows = shape[mode];
        let cols = others_len(shape, mode);
        if m.shape() != (rows, cols) {
            return Err(shape_err(format!(
                "{}x{} matrix does not unfold shape {:?} along mode {mode}",
                m.rows(),
                m.cols(),
                shape
            )));
        }
        let col_strides = unfold_strides(shape, mode);
        let mut idx = vec![0; shape.len()];
        let data = (0..len)
            .map(|k| {
                decode(k, shape, &mut idx);
                let col: usize = idx.iter().zip(&col_strides).map(|(i, s)| i * s).sum();
                m.get(idx[mode], col).clone()
            })
            .collect();
        Ok(Tensor {
            field: m.field().clone(),
            shape: shape.to_vec(),
            data,
        })
    }

    /// `T x_mode M`: replaces `d_mode` with `rows(M)`, defined by
    /// `unfold(T x_mode M, mode) = M * unfold(T, mode)`.
    pub fn mode_product(&self, m: &Matrix<F>, mode: usize) -> Result<Self> {
        self.check_mode(mode)?;
        if m.cols() != self.shape[mode] {
            return Err(shape_err(format!(
                "mode-{mode} product needs {} columns, got {}",
                self.shape[mode],
                m.cols()
            )));
        }
        let product = m.matmul(&self.unfold(mode)?)?;
        let mut shape = self.shape.clone();
        shape[mode] = m.rows();
        Self::fold(&product, mode, &shape)
    }

    /// `T x_1 M_1 x_2 .. x_n M_n`.
    pub fn multi_mode_product(&self, factors: &[Matrix<F>]) -> Result<Self> {
        if factors.len() != self.order() {
            return Err(shape_err(format!(
                "{} factors for a {}-mode tensor",
                factors.len(),
                self.order()
            )));
        }
        let mut out = self.clone();
        for (mode, m) in factors.iter().enumerate() {
            out = out.mode_product(m, mode)?;
        }
        Ok(out)
    }

    pub fn multilinear_rank(&self) -> MultilinearRank {
        MultilinearRank(
            (0..self.order())
                .map(|i| self.unfold(i).expect("mode in range").rank())
                .collect(),
        )
    }

    /// `T(I_1, .., I_n)`.
    pub fn subtensor(&self, sets: &[IndexSet]) -> Result<Self> {
        check_sets(sets, &self.shape, None)?;
        let picks: Vec<Vec<usize>> = sets.iter().map(IndexSet::zero_based).collect();
        let shape: Vec<usize> = picks.iter().map(Vec::len).collect();
        let mut src = vec![0; self.order()];
        Ok(Tensor::from_fn(&self.field, &shape, |idx| {
            for (m, &i) in idx.iter().enumerate() {
                src[m] = picks[m][i];
            }
            self.get(&src).clone()
        }))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data
            .iter()
            .map(|a| {
                let m = self.field.magnitude(a);
                m * m
            })
            .sum::<f64>()
            .sqrt()
    }

    fn as_column(&self) -> Matrix<F> {
        Matrix::new(&self.field, self.len(), 1, self.data.clone()).expect("length matches")
    }

    /// Exact equality for exact fields, relative Frobenius closeness with an
    /// extra reference `scale` for floats.
    pub fn approx_eq_scaled(&self, other: &Self, scale: f64) -> bool {
        self.shape == other.shape && self.as_column().approx_eq_scaled(&other.as_column(), scale)
    }

    pub fn approx_eq(&self, other: &Self) -> bool {
        self.approx_eq_scaled(other, 0.0)
    }

    pub fn relative_error(&self, reference: &Self) -> f64 {
        self.as_column().relative_error(&reference.as_column())
    }
}

impl<F: Field> fmt::Display for Tensor<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.data.iter().map(|a| self.field.format_elem(a)).collect();
        write!(f, "{:?}: {}", self.shape, parts.join(" "))
    }
}

/// Column strides of the mode-`mode` unfolding; zero in the unfolded mode.
fn unfold_strides(shape: &[usize], mode: usize) -> Vec<usize> {
    let mut out = vec![0; shape.len()];
    let mut s = 1;
    for (k, &d) in shape.iter().enumerate() {
        if k != mode {
            out[k] = s;
            s *= d;
        }
    }
    out
}

fn check_sets(sets: &[IndexSet], shape: &[usize], skip: Option<usize>) -> Result<()> {
    if sets.len() != shape.len() {
        return Err(shape_err(format!(
            "{} index sets for a {}-mode tensor",
            sets.len(),
            shape.len()
        )));
    }
    for (k, (s, &d)) in sets.iter().zip(shape).enumerate() {
        if Some(k) == skip {
            continue;
        }
        if s.bound() != d {
            return Err(shape_err(format!(
                "index set for mode {k} has bound {}, mode size {d}",
                s.bound()
            )));
        }
    }
    Ok(())
}

/// Per-mode unfolding ranks.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct MultilinearRank(pub Vec<usize>);

impl MultilinearRank {
    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }
}

impl fmt::Display for MultilinearRank {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|r| r.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Columns of the mode-`mode` unfolding whose multi-indices lie in the
/// Cartesian product of the other sets. `sets[mode]` is ignored.
pub fn kron_index_map(sets: &[IndexSet], shape: &[usize], mode: usize) -> Result<IndexSet> {
    if mode >= shape.len() {
        return Err(Error::BadMode {
            mode,
            order: shape.len(),
        });
    }
    check_sets(sets, shape, Some(mode))?;
    let col_strides = unfold_strides(shape, mode);
    let mut cols = vec![0usize];
    for k in 0..shape.len() {
        if k == mode {
            continue;
        }
        let stride = col_strides[k];
        cols = sets[k]
            .zero_based()
            .into_iter()
            .flat_map(|i| cols.iter().map(move |c| c + i * stride))
            .collect();
    }
    IndexSet::from_zero_based(cols, others_len(shape, mode))
}

/// Random tensor of the given shape and multilinear rank: a random core of
/// shape `target` multiplied along every mode by a random factor, resampled
/// until the rank comes out right.
pub fn random_low_mlrank_tensor<F: Field, R: Rng + ?Sized>(
    field: &F,
    shape: &[usize],
    target: &[usize],
    rng: &mut R,
) -> Result<Tensor<F>> {
    if shape.is_empty() || shape.len() != target.len() {
        return Err(shape_err(format!(
            "target {:?} does not match shape {:?}",
            target, shape
        )));
    }
    let n = shape.len();
    for i in 0..n {
        let others: usize = (0..n).filter(|&j| j != i).map(|j| target[j]).product();
        if target[i] > shape[i] || (n > 1 && target[i] > others) {
            return Err(Error::InfeasibleRank(format!(
                "multilinear rank {:?} in shape {:?}",
                target, shape
            )));
        }
    }
    for _ in 0..MLRANK_RETRIES {
        let core = Tensor::random(field, target, rng);
        let factors: Vec<Matrix<F>> = (0..n)
            .map(|i| Matrix::random(field, shape[i], target[i], rng))
            .collect();
        let t = core.multi_mode_product(&factors)?;
        if t.multilinear_rank().0 == target {
            return Ok(t);
        }
    }
    Err(Error::RetriesExhausted(MLRANK_RETRIES))
}

/// Index sets for a fiber CUR: per mode, pivot rows and columns of the
/// unfolding.
pub fn select_fiber_indices<F: Field>(t: &Tensor<F>, rng: &mut dyn RngCore) -> (Vec<IndexSet>, Vec<IndexSet>) {
    (0..t.order())
        .map(|i| select_indices(&t.unfold(i).expect("mode in range"), rng))
        .unzip()
}

/// Index sets for a chidori CUR: per mode, pivot rows of the unfolding.
pub fn select_chidori_indices<F: Field>(t: &Tensor<F>, rng: &mut dyn RngCore) -> Vec<IndexSet> {
    (0..t.order())
        .map(|i| {
            let rows = t.unfold(i).expect("mode in range").transpose().pivots_with(rng).cols;
            IndexSet::from_zero_based(rows, t.shape()[i]).expect("pivot rows in range")
        })
        .collect()
}

/// Pieces of a tensor CUR: the core `R = T(I_1, .., I_n)`, column matrices
/// `C_i = T_(i)(:, J_i)` and `U_i = C_i(I_i, :)`.
#[derive(Clone, Debug, PartialEq)]
pub struct TensorCurInstance<F: Field> {
    pub core: Tensor<F>,
    pub c: Vec<Matrix<F>>,
    pub u: Vec<Matrix<F>>,
    pub rows: Vec<IndexSet>,
    pub cols: Vec<IndexSet>,
}

pub fn fiber_instance<F: Field>(t: &Tensor<F>, rows: &[IndexSet], cols: &[IndexSet]) -> Result<TensorCurInstance<F>> {
    check_sets(rows, t.shape(), None)?;
    if cols.len() != t.order() {
        return Err(shape_err(format!(
            "{} column sets for a {}-mode tensor",
            cols.len(),
            t.order()
        )));
    }
    let core = t.subtensor(rows)?;
    let mut c = Vec::new();
    let mut u = Vec::new();
    for i in 0..t.order() {
        let ci = t.unfold(i)?.select_cols(&cols[i])?;
        u.push(ci.select_rows(&rows[i])?);
        c.push(ci);
    }
    Ok(TensorCurInstance {
        core,
        c,
        u,
        rows: rows.to_vec(),
        cols: cols.to_vec(),
    })
}

/// Chidori instance: `J_i` is the image of the other modes' row sets, so
/// `U_i` is the mode-`i` unfolding of the core.
pub fn chidori_instance<F: Field>(t: &Tensor<F>, rows: &[IndexSet]) -> Result<TensorCurInstance<F>> {
    check_sets(rows, t.shape(), None)?;
    let cols: Vec<IndexSet> = (0..t.order())
        .map(|i| kron_index_map(rows, t.shape(), i))
        .collect::<Result<_>>()?;
    fiber_instance(t, rows, &cols)
}

/// `R x_1 M_1 x_2 .. x_n M_n` where `M_i = C_i U_i~`.
pub fn reconstruct_tensor<F: Field>(core: &Tensor<F>, c: &[Matrix<F>], u_inv: &[Matrix<F>]) -> Result<Tensor<F>> {
    let factors: Vec<Matrix<F>> = c
        .iter()
        .zip(u_inv)
        .map(|(ci, ui)| ci.matmul(ui))
        .collect::<Result<_>>()?;
    core.multi_mode_product(&factors)
}

/// Tuples of generalized inverses, one per matrix: the full Cartesian product
/// when it fits under the cap, else independently sampled tuples.
struct TupleCandidates<F: Field> {
    mode: Mode,
    per_mode: Vec<Vec<Matrix<F>>>,
}

impl<F: Field> TupleCandidates<F> {
    fn new<R: Rng + ?Sized>(mats: &[Matrix<F>], budget: &Budget, rng: &mut R) -> Self {
        let samplers: Vec<InverseSampler<F>> = mats.iter().map(InverseSampler::new).collect();
        let cap = budget.enum_cap;
        let counts: Option<Vec<u64>> = mats
            .iter()
            .zip(&samplers)
            .map(|(m, s)| inverse_count_under_cap(m, s.rank(), cap))
            .collect();
        let total = counts.and_then(|cs| cs.iter().try_fold(1u64, |acc, &c| acc.checked_mul(c)));
        if total.is_some_and(|t| t <= cap) {
            let per_mode = mats
                .iter()
                .map(|m| enumerate_generalized_inverses(m, cap).expect("count checked").collect())
                .collect();
            return TupleCandidates {
                mode: Mode::Exhaustive,
                per_mode,
            };
        }
        // Sampled tuples: tuple k takes the k-th sample of every mode.
        let k = budget.samples.max(1);
        let mut per_mode: Vec<Vec<Matrix<F>>> = vec![Vec::with_capacity(k); mats.len()];
        for _ in 0..k {
            for (list, s) in per_mode.iter_mut().zip(&samplers) {
                list.push(s.sample(rng));
            }
        }
        TupleCandidates {
            mode: Mode::Sampled,
            per_mode,
        }
    }

    /// `(some, all)` of `check` over tuples of prepared per-mode data.
    fn quantify<P>(&self, prep: impl Fn(usize, &Matrix<F>) -> P, check: impl Fn(&[&P]) -> bool) -> (Flag, Flag) {
        let prepared: Vec<Vec<P>> = self
            .per_mode
            .iter()
            .enumerate()
            .map(|(i, list)| list.iter().map(|m| prep(i, m)).collect())
            .collect();
        match self.mode {
            Mode::Sampled => {
                let k = prepared.first().map_or(1, Vec::len);
                quantify(
                    self.mode,
                    (0..k).map(|s| check(&prepared.iter().map(|l| &l[s]).collect::<Vec<_>>())),
                )
            }
            _ => {
                let sizes: Vec<usize> = prepared.iter().map(Vec::len).collect();
                let total: usize = sizes.iter().product();
                let mut digits = vec![0; sizes.len()];
                quantify(
                    self.mode,
                    (0..total).map(|k| {
                        decode(k, &sizes, &mut digits);
                        check(&prepared.iter().zip(&digits).map(|(l, &d)| &l[d]).collect::<Vec<_>>())
                    }),
                )
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TensorCurRanks {
    pub u: Vec<usize>,
    pub c: Vec<usize>,
    /// `rank T_(i)(I_i, :)`, chidori only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slabs: Option<Vec<usize>>,
}

/// Flags of the fiber and chidori characterizations. `v` is present for
/// chidori reports only.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct TensorCurConditions {
    pub i: Flag,
    pub ii: Flag,
    pub iii: Flag,
    pub iv: Flag,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub v: Option<Flag>,
}

impl TensorCurConditions {
    pub fn block(&self) -> [bool; 4] {
        [self.i.value, self.ii.value, self.iii.value, self.iv.value]
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TensorCurReport {
    pub schema: u32,
    pub kind: &'static str,
    pub field: FieldSpec,
    pub shape: Vec<usize>,
    pub mlrank: MultilinearRank,
    pub core_mlrank: MultilinearRank,
    pub ranks: TensorCurRanks,
    #[serde(rename = "I")]
    pub rows: Vec<IndexSet>,
    #[serde(rename = "J", skip_serializing_if = "Option::is_none")]
    pub cols: Option<Vec<IndexSet>>,
    pub conditions: TensorCurConditions,
    /// `T == T x_i C_i C_i~` over every tuple of `C_i~`.
    pub self_projection: Flag,
    /// Whether `(v)` implying the block was checked on this field.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub converse_tested: Option<bool>,
    pub seed: u64,
    pub notes: Vec<String>,
}

impl TensorCurReport {
    /// `(i)`-`(iv)` agree; when they hold, the projection identity (and for
    /// chidori `(v)`) holds too; over fields where the converse is tested,
    /// `(v)` agrees with the block.
    pub fn is_consistent(&self) -> bool {
        let block = self.conditions.block();
        let head = block[0];
        if block.iter().any(|&b| b != head) {
            return false;
        }
        if head && !self.self_projection.value {
            return false;
        }
        match self.conditions.v {
            None => true,
            Some(v) if head => v.value,
            Some(v) => !(self.converse_tested == Some(true) && v.value),
        }
    }

    pub fn all_true(&self) -> bool {
        self.conditions.block().iter().all(|&b| b) && self.conditions.v.is_none_or(|v| v.value)
    }
}

fn tensor_matches<F: Field>(lhs: &Tensor<F>, rhs: &Tensor<F>, scale: f64) -> bool {
    if lhs.field().is_exact() {
        lhs == rhs
    } else {
        lhs.approx_eq_scaled(rhs, scale)
    }
}

/// Whether the converse `(v) => (i)` is exercised on this field.
fn converse_tested(spec: FieldSpec) -> bool {
    matches!(spec, FieldSpec::Real { .. } | FieldSpec::Complex { .. })
}

fn evaluate<F: Field>(
    t: &Tensor<F>,
    inst: &TensorCurInstance<F>,
    chidori: bool,
    budget: &Budget,
) -> Result<TensorCurReport> {
    let mut rng = seeded_rng(budget.seed);
    let n = t.order();
    let mlrank = t.multilinear_rank();
    let core_mlrank = inst.core.multilinear_rank();
    let r = mlrank.as_slice();
    let u_ranks: Vec<usize> = inst.u.iter().map(Matrix::rank).collect();
    let c_ranks: Vec<usize> = inst.c.iter().map(Matrix::rank).collect();

    let core_scale = inst.core.frobenius_norm();
    let u_tuples = TupleCandidates::new(&inst.u, budget, &mut rng);
    let (ii, iii) = u_tuples.quantify(
        |i, ui| {
            let f = inst.c[i].matmul(ui).expect("conformable");
            let s = product_scale(&[&inst.c[i], ui]);
            (f, s)
        },
        |tuple| {
            let factors: Vec<Matrix<F>> = tuple.iter().map(|(f, _)| f.clone()).collect();
            let scale = core_scale * tuple.iter().map(|(_, s)| s).product::<f64>();
            let rec = inst.core.multi_mode_product(&factors).expect("conformable");
            tensor_matches(&rec, t, scale)
        },
    );

    let c_tuples = TupleCandidates::new(&inst.c, budget, &mut rng);
    let t_scale = t.frobenius_norm();
    let (_, self_projection) = c_tuples.quantify(
        |i, ci| {
            let f = inst.c[i].matmul(ci).expect("conformable");
            let s = product_scale(&[&inst.c[i], ci]);
            (f, s)
        },
        |tuple| {
            let factors: Vec<Matrix<F>> = tuple.iter().map(|(f, _)| f.clone()).collect();
            let scale = t_scale * tuple.iter().map(|(_, s)| s).product::<f64>();
            let rec = t.multi_mode_product(&factors).expect("conformable");
            tensor_matches(&rec, t, scale)
        },
    );

    let i = Flag::direct(u_ranks.as_slice() == r);
    let iv = if chidori {
        Flag::direct(core_mlrank == mlrank)
    } else {
        Flag::direct(c_ranks.as_slice() == r && core_mlrank == mlrank)
    };
    let slabs: Option<Vec<usize>> = chidori.then(|| {
        (0..n)
            .map(|k| {
                t.unfold(k)
                    .expect("mode in range")
                    .select_rows(&inst.rows[k])
                    .expect("rows in range")
                    .rank()
            })
            .collect()
    });
    let v = slabs.as_ref().map(|s| Flag::direct(s.as_slice() == r));

    let spec = t.field().spec();
    let mut notes: Vec<String> = involution_note(spec).into_iter().collect();
    let converse = chidori.then(|| converse_tested(spec));
    if converse == Some(false) {
        notes.push("(v) => (i) is not tested on this field".to_string());
    }
    Ok(TensorCurReport {
        schema: SCHEMA_VERSION,
        kind: if chidori { "chidori" } else { "fiber" },
        field: spec,
        shape: t.shape().to_vec(),
        mlrank,
        core_mlrank,
        ranks: TensorCurRanks {
            u: u_ranks,
            c: c_ranks,
            slabs,
        },
        rows: inst.rows.clone(),
        cols: (!chidori).then(|| inst.cols.clone()),
        conditions: TensorCurConditions { i, ii, iii, iv, v },
        self_projection,
        converse_tested: converse,
        seed: budget.seed,
        notes,
    })
}

/// Evaluates the fiber CUR characterization for row sets `rows` (one per
/// mode, in `[d_i]`) and column sets `cols` (in the unfolding's columns).
pub fn fiber_cur<F: Field>(
    t: &Tensor<F>,
    rows: &[IndexSet],
    cols: &[IndexSet],
    budget: &Budget,
) -> Result<TensorCurReport> {
    let inst = fiber_instance(t, rows, cols)?;
    evaluate(t, &inst, false, budget)
}

/// Evaluates the chidori CUR characterization, including the slab rank
/// condition `(v)`.
pub fn chidori_cur<F: Field>(t: &Tensor<F>, rows: &[IndexSet], budget: &Budget) -> Result<TensorCurReport> {
    let inst = chidori_instance(t, rows)?;
    evaluate(t, &inst, true, budget)
}
