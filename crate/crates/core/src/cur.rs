//! Matrix pseudoskeleton (CUR) decompositions with generalized inverses.
//!
//! For `C = A(:, J)`, `R = A(I, :)` and `U = A(I, J)` the following ten
//! statements are equivalent over any field:
//!
//! | flag | statement |
//! |------|-----------|
//! | i    | `rank U = rank A` |
//! | ii   | `rank C = rank R = rank A` |
//! | iii  | `A = C U~ R` for some `U~` |
//! | iv   | `A = C U~ R` for all `U~` |
//! | v    | `A = C C~ A R~ R` for some `C~, R~` |
//! | vi   | `A = C C~ A R~ R` for all `C~, R~` |
//! | vii  | `R~ U C~` is a generalized inverse of `A` for some `C~, R~` |
//! | viii | `R~ U C~` is a generalized inverse of `A` for all `C~, R~` |
//! | ix   | the Schur residuals vanish for some `U~` |
//! | x    | the Schur residuals vanish for all `U~` |
//!
//! [`verify_cur`] evaluates all of them on one instance. Quantifiers
//! over generalized inverses are decided by enumeration when the field is
//! finite and the candidate count fits under [`Budget::enum_cap`]; otherwise
//! [`Budget::samples`] random inverses stand in and the flag is tagged
//! [`Mode::Sampled`].

use rand::{Rng, RngCore};
use serde::Serialize;

use crate::error::{shape_err, Error, Result};
use crate::field::{Field, FieldSpec, Rationals};
use crate::geninv::{
    drazin_inverse, enumerate_generalized_inverses, inverse_count_within, is_generalized_inverse, mp_conditions,
    product_matches, product_scale, DrazinInverse, InverseSampler, MpConditionSet, DEFAULT_ENUM_CAP,
};
use crate::matrix::{IndexSet, Matrix};
use crate::seeded_rng;

/// Report schema version.
pub const SCHEMA_VERSION: u32 = 1;

/// How a flag was decided.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Computed outright (ranks).
    Direct,
    /// Quantifier decided over every generalized inverse.
    Exhaustive,
    /// Quantifier checked on random generalized inverses only.
    Sampled,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Flag {
    pub value: bool,
    pub mode: Mode,
}

impl Flag {
    pub fn direct(value: bool) -> Self {
        Flag {
            value,
            mode: Mode::Direct,
        }
    }
}

/// Sampling and enumeration limits plus the seed behind every random choice.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    pub samples: usize,
    pub enum_cap: u64,
    pub seed: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            samples: 16,
            enum_cap: DEFAULT_ENUM_CAP,
            seed: 0,
        }
    }
}

impl Budget {
    pub fn with_seed(self, seed: u64) -> Self {
        Budget { seed, ..self }
    }
}

/// Generalized inverses standing in for "every generalized inverse".
#[derive(Clone, Debug)]
pub struct Candidates<F: Field> {
    pub mode: Mode,
    pub items: Vec<Matrix<F>>,
}

pub(crate) fn inverse_count_under_cap<F: Field>(a: &Matrix<F>, rank: usize, cap: u64) -> Option<u64> {
    inverse_count_within(a.field().order(), a.rows(), a.cols(), rank, cap)
}

/// All generalized inverses of `a` if that is at most `budget.enum_cap` of
/// them, otherwise `budget.samples` random ones.
pub fn inverse_candidates<F: Field, R: Rng + ?Sized>(a: &Matrix<F>, budget: &Budget, rng: &mut R) -> Candidates<F> {
    let sampler = InverseSampler::new(a);
    if inverse_count_under_cap(a, sampler.rank(), budget.enum_cap).is_some() {
        let items = enumerate_generalized_inverses(a, budget.enum_cap)
            .expect("count checked")
            .collect();
        return Candidates {
            mode: Mode::Exhaustive,
            items,
        };
    }
    let items = (0..budget.samples.max(1)).map(|_| sampler.sample(rng)).collect();
    Candidates {
        mode: Mode::Sampled,
        items,
    }
}

/// Pairs `(C~, R~)`: a full cross product when it fits under the cap, else
/// independently sampled pairs.
enum PairCandidates<F: Field> {
    Exhaustive {
        left: Vec<Matrix<F>>,
        right: Vec<Matrix<F>>,
    },
    Sampled(Vec<(Matrix<F>, Matrix<F>)>),
}

impl<F: Field> PairCandidates<F> {
    fn new<R: Rng + ?Sized>(c: &Matrix<F>, r: &Matrix<F>, budget: &Budget, rng: &mut R) -> Self {
        let cs = InverseSampler::new(c);
        let rs = InverseSampler::new(r);
        let cap = budget.enum_cap;
        if let (Some(nc), Some(nr)) = (
            inverse_count_under_cap(c, cs.rank(), cap),
            inverse_count_under_cap(r, rs.rank(), cap),
        ) {
            if nc.checked_mul(nr).is_some_and(|n| n <= cap) {
                return PairCandidates::Exhaustive {
                    left: enumerate_generalized_inverses(c, cap).expect("count checked").collect(),
                    right: enumerate_generalized_inverses(r, cap).expect("count checked").collect(),
                };
            }
        }
        PairCandidates::Sampled(
            (0..budget.samples.max(1))
                .map(|_| (cs.sample(rng), rs.sample(rng)))
                .collect(),
        )
    }

    fn mode(&self) -> Mode {
        match self {
            PairCandidates::Exhaustive { .. } => Mode::Exhaustive,
            PairCandidates::Sampled(_) => Mode::Sampled,
        }
    }

    /// `(some, all)` of `check(left_index, right_index)` over the pairs,
    /// where precomputed per-side data is looked up by index.
    fn quantify<L, Rt>(
        &self,
        prep_left: impl Fn(&Matrix<F>) -> L,
        prep_right: impl Fn(&Matrix<F>) -> Rt,
        check: impl Fn(&L, &Rt) -> bool,
    ) -> (Flag, Flag) {
        let mode = self.mode();
        match self {
            PairCandidates::Exhaustive { left, right } => {
                let left: Vec<L> = left.iter().map(&prep_left).collect();
                let right: Vec<Rt> = right.iter().map(&prep_right).collect();
                quantify(mode, left.iter().flat_map(|l| right.iter().map(|r| check(l, r))))
            }
            PairCandidates::Sampled(pairs) => {
                quantify(mode, pairs.iter().map(|(l, r)| check(&prep_left(l), &prep_right(r))))
            }
        }
    }
}

/// `(exists, forall)` over a lazily evaluated sequence of checks; stops as
/// soon as both are settled.
pub(crate) fn quantify(mode: Mode, checks: impl IntoIterator<Item = bool>) -> (Flag, Flag) {
    let (mut any, mut all) = (false, true);
    for ok in checks {
        any |= ok;
        all &= ok;
        if any && !all {
            break;
        }
    }
    (Flag { value: any, mode }, Flag { value: all, mode })
}

/// Row and column indices whose intersection has the rank of `a`.
///
/// `J` holds the pivot columns of elimination on `a`, `I` the pivot rows of
/// elimination on `a(:, J)`. The generator only breaks ties between equal
/// floating pivots.
pub fn select_indices<F: Field>(a: &Matrix<F>, rng: &mut dyn RngCore) -> (IndexSet, IndexSet) {
    let cols = a.pivots_with(rng).cols;
    let c = a.select(&(0..a.rows()).collect::<Vec<_>>(), &cols);
    let rows = c.pivots_with(rng).rows;
    (
        IndexSet::from_zero_based(rows, a.rows()).expect("pivot rows in range"),
        IndexSet::from_zero_based(cols, a.cols()).expect("pivot cols in range"),
    )
}

/// `A` together with its column, row and intersection submatrices.
#[derive(Clone, Debug, PartialEq)]
pub struct CurInstance<F: Field> {
    pub a: Matrix<F>,
    pub rows: IndexSet,
    pub cols: IndexSet,
    pub c: Matrix<F>,
    pub u: Matrix<F>,
    pub r: Matrix<F>,
}

/// `C = A(:, J)`, `R = A(I, :)`, `U = A(I, J)`.
pub fn extract<F: Field>(a: &Matrix<F>, rows: &IndexSet, cols: &IndexSet) -> Result<CurInstance<F>> {
    let u = a.submatrix(rows, cols)?;
    Ok(CurInstance {
        a: a.clone(),
        rows: rows.clone(),
        cols: cols.clone(),
        c: a.select_cols(cols)?,
        r: a.select_rows(rows)?,
        u,
    })
}

/// `C * U~ * R`.
pub fn reconstruct<F: Field>(c: &Matrix<F>, u_inv: &Matrix<F>, r: &Matrix<F>) -> Result<Matrix<F>> {
    c.matmul(u_inv)?.matmul(r)
}

/// The block partition `[[U, B], [D, E]]` of `A` after moving rows `I` and
/// columns `J` to the front.
#[derive(Clone, Debug)]
pub struct SchurBlocks<F: Field> {
    pub u: Matrix<F>,
    pub b: Matrix<F>,
    pub d: Matrix<F>,
    pub e: Matrix<F>,
}

/// Partition blocks plus the three residuals for one choice of `U~`.
#[derive(Clone, Debug)]
pub struct SchurParts<F: Field> {
    pub blocks: SchurBlocks<F>,
    /// `A/U = E - D U~ B`
    pub complement: Matrix<F>,
    /// `D (I - U~ U)`
    pub left: Matrix<F>,
    /// `(I - U U~) B`
    pub right: Matrix<F>,
    scales: [f64; 3],
}

impl<F: Field> SchurParts<F> {
    /// All three residuals are zero (exactly, or relative to the magnitude of
    /// the terms that produced them).
    pub fn vanishes(&self) -> bool {
        self.complement.is_approx_zero(self.scales[0])
            && self.left.is_approx_zero(self.scales[1])
            && self.right.is_approx_zero(self.scales[2])
    }
}

impl<F: Field> SchurBlocks<F> {
    pub fn new(a: &Matrix<F>, rows: &IndexSet, cols: &IndexSet) -> Result<Self> {
        let (ic, jc) = (rows.complement(), cols.complement());
        Ok(SchurBlocks {
            u: a.submatrix(rows, cols)?,
            b: a.submatrix(rows, &jc)?,
            d: a.submatrix(&ic, cols)?,
            e: a.submatrix(&ic, &jc)?,
        })
    }

    /// Residuals with the same `U~` in all three places.
    pub fn residuals(&self, u_inv: &Matrix<F>) -> Result<SchurParts<F>> {
        let (u, b, d, e) = (&self.u, &self.b, &self.d, &self.e);
        if u_inv.shape() != (u.cols(), u.rows()) {
            return Err(shape_err("U~ must have the transposed shape of U"));
        }
        let complement = e.try_sub(&(&(d * u_inv) * b))?;
        let left = d.try_sub(&(&(d * u_inv) * u))?;
        let right = b.try_sub(&(&(u * u_inv) * b))?;
        let nu = product_scale(&[u_inv]);
        let scales = [
            e.frobenius_norm() + product_scale(&[d, b]) * nu,
            d.frobenius_norm() * (1.0 + nu * u.frobenius_norm()),
            b.frobenius_norm() * (1.0 + nu * u.frobenius_norm()),
        ];
        Ok(SchurParts {
            blocks: self.clone(),
            complement,
            left,
            right,
            scales,
        })
    }
}

/// Block partition and residuals of `A` with respect to `U = A(I, J)`.
pub fn schur_parts<F: Field>(
    a: &Matrix<F>,
    rows: &IndexSet,
    cols: &IndexSet,
    u_inv: &Matrix<F>,
) -> Result<SchurParts<F>> {
    SchurBlocks::new(a, rows, cols)?.residuals(u_inv)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CurRanks {
    pub a: usize,
    pub c: usize,
    pub u: usize,
    pub r: usize,
}

/// The ten flags, serialized under their roman numerals.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CurConditions {
    pub i: Flag,
    pub ii: Flag,
    pub iii: Flag,
    pub iv: Flag,
    pub v: Flag,
    pub vi: Flag,
    pub vii: Flag,
    pub viii: Flag,
    pub ix: Flag,
    pub x: Flag,
}

impl CurConditions {
    pub fn values(&self) -> [bool; 10] {
        [
            self.i.value,
            self.ii.value,
            self.iii.value,
            self.iv.value,
            self.v.value,
            self.vi.value,
            self.vii.value,
            self.viii.value,
            self.ix.value,
            self.x.value,
        ]
    }
}

/// Outcome of [`verify_cur`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CurReport {
    pub schema: u32,
    pub kind: &'static str,
    pub field: FieldSpec,
    pub shape: [usize; 2],
    pub ranks: CurRanks,
    #[serde(rename = "I")]
    pub rows: IndexSet,
    #[serde(rename = "J")]
    pub cols: IndexSet,
    pub conditions: CurConditions,
    pub seed: u64,
    pub notes: Vec<String>,
}

impl CurReport {
    /// All ten flags agree, and agree with `rank U == rank A`.
    pub fn is_consistent(&self) -> bool {
        let expected = self.ranks.u == self.ranks.a;
        self.conditions.values().iter().all(|&v| v == expected)
    }

    pub fn all_true(&self) -> bool {
        self.conditions.values().iter().all(|&v| v)
    }
}

pub(crate) fn involution_note(spec: FieldSpec) -> Option<String> {
    match spec {
        FieldSpec::Prime(_) | FieldSpec::Rational => Some("involution is the identity on this field".to_string()),
        _ => None,
    }
}

/// Evaluates every condition of the CUR characterization on one instance.
pub fn verify_cur<F: Field>(a: &Matrix<F>, rows: &IndexSet, cols: &IndexSet, budget: &Budget) -> Result<CurReport> {
    let inst = extract(a, rows, cols)?;
    let mut rng = seeded_rng(budget.seed);
    let CurInstance { c, u, r, .. } = &inst;
    let ranks = CurRanks {
        a: a.rank(),
        c: c.rank(),
        u: u.rank(),
        r: r.rank(),
    };
    let exact = a.field().is_exact();

    let matches = |lhs: &Matrix<F>, scale: f64| {
        if exact {
            lhs == a
        } else {
            lhs.approx_eq_scaled(a, scale)
        }
    };

    // quantifiers over U~
    let u_cands = inverse_candidates(u, budget, &mut rng);
    let schur = SchurBlocks::new(a, rows, cols)?;
    let (iii, iv) = quantify(
        u_cands.mode,
        u_cands.items.iter().map(|ui| {
            let lhs = &(c * ui) * r;
            matches(&lhs, product_scale(&[c, ui, r]))
        }),
    );
    let (ix, x) = quantify(
        u_cands.mode,
        u_cands
            .items
            .iter()
            .map(|ui| schur.residuals(ui).expect("shapes").vanishes()),
    );

    // quantifiers over (C~, R~)
    let pairs = PairCandidates::new(c, r, budget, &mut rng);
    let (v, vi) = pairs.quantify(
        |ci| {
            let cca = &(c * ci) * a;
            let s = product_scale(&[c, ci, a]);
            (cca, s)
        },
        |ri| {
            let rr = ri * r;
            let s = product_scale(&[ri, r]);
            (rr, s)
        },
        |(cca, sl), (rr, sr)| matches(&(cca * rr), sl * sr),
    );
    let (vii, viii) = pairs.quantify(
        |ci| {
            // C~ A
            (ci * a, product_scale(&[ci, a]))
        },
        |ri| {
            // A R~ U
            (&(a * ri) * u, product_scale(&[a, ri, u]))
        },
        |(ca, sl), (aru, sr)| matches(&(aru * ca), sl * sr),
    );

    let conditions = CurConditions {
        i: Flag::direct(ranks.u == ranks.a),
        ii: Flag::direct(ranks.c == ranks.a && ranks.r == ranks.a),
        iii,
        iv,
        v,
        vi,
        vii,
        viii,
        ix,
        x,
    };
    Ok(CurReport {
        schema: SCHEMA_VERSION,
        kind: "cur",
        field: a.field().spec(),
        shape: [a.rows(), a.cols()],
        ranks,
        rows: rows.clone(),
        cols: cols.clone(),
        conditions,
        seed: budget.seed,
        notes: involution_note(a.field().spec()).into_iter().collect(),
    })
}

/// `R A~ C == U`; holds for every generalized inverse `A~` without any rank
/// assumption.
pub fn urac_identity_check<F: Field>(
    a: &Matrix<F>,
    rows: &IndexSet,
    cols: &IndexSet,
    a_inv: &Matrix<F>,
) -> Result<bool> {
    if !is_generalized_inverse(a, a_inv)? {
        return Err(Error::NotGeneralizedInverse("A~"));
    }
    let inst = extract(a, rows, cols)?;
    let lhs = &(&inst.r * a_inv) * &inst.c;
    Ok(product_matches(&lhs, &inst.u, &[&inst.r, a_inv, &inst.c]))
}

/// The six projection identities, each quantified over all inverses of the
/// matrix it ranges over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ProjectionIdentities {
    /// `C C~ A = A`
    pub cca: Flag,
    /// `A R~ R = A`
    pub arr: Flag,
    /// `C U~ U = C`
    pub cuu: Flag,
    /// `U U~ R = R`
    pub uur: Flag,
    /// `U C~ C = U`
    pub ucc: Flag,
    /// `R R~ U = U`
    pub rru: Flag,
}

impl ProjectionIdentities {
    pub fn all(&self) -> bool {
        [self.cca, self.arr, self.cuu, self.uur, self.ucc, self.rru]
            .iter()
            .all(|f| f.value)
    }
}

fn rank_hypothesis<F: Field>(inst: &CurInstance<F>, with_cr: bool) -> Result<()> {
    let ra = inst.a.rank();
    let ru = inst.u.rank();
    if ru != ra {
        return Err(Error::RankHypothesisViolated(format!(
            "rank U = {ru} but rank A = {ra}"
        )));
    }
    if with_cr {
        let (rc, rr) = (inst.c.rank(), inst.r.rank());
        if rc != ra || rr != ra {
            return Err(Error::RankHypothesisViolated(format!(
                "rank C = {rc}, rank R = {rr}, rank A = {ra}"
            )));
        }
    }
    Ok(())
}

/// Checks the projection identities under `rank U = rank C = rank R = rank A`.
pub fn projection_identities<F: Field>(inst: &CurInstance<F>, budget: &Budget) -> Result<ProjectionIdentities> {
    rank_hypothesis(inst, true)?;
    let mut rng = seeded_rng(budget.seed);
    let CurInstance { a, c, u, r, .. } = inst;
    let cs = inverse_candidates(c, budget, &mut rng);
    let us = inverse_candidates(u, budget, &mut rng);
    let rs = inverse_candidates(r, budget, &mut rng);

    let forall = |cands: &Candidates<F>, check: &dyn Fn(&Matrix<F>) -> bool| Flag {
        value: cands.items.iter().all(check),
        mode: cands.mode,
    };
    Ok(ProjectionIdentities {
        cca: forall(&cs, &|ci| product_matches(&(&(c * ci) * a), a, &[c, ci, a])),
        arr: forall(&rs, &|ri| product_matches(&(&(a * ri) * r), a, &[a, ri, r])),
        cuu: forall(&us, &|ui| product_matches(&(&(c * ui) * u), c, &[c, ui, u])),
        uur: forall(&us, &|ui| product_matches(&(&(u * ui) * r), r, &[u, ui, r])),
        ucc: forall(&cs, &|ci| product_matches(&(&(u * ci) * c), u, &[u, ci, c])),
        rru: forall(&rs, &|ri| product_matches(&(&(r * ri) * u), u, &[r, ri, u])),
    })
}

/// Moore–Penrose conditions met by `R~ U C~`, next to the conditions its
/// factors bring along.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct OneTwoCurOutcome {
    pub conditions: MpConditionSet,
    /// `C~` satisfies `(C C~)* = C C~`.
    pub c_inverse_c3: bool,
    /// `R~` satisfies `(R~ R)* = R~ R`.
    pub r_inverse_c4: bool,
}

impl OneTwoCurOutcome {
    /// {1,2} always; 3 inherited from `C~`; 4 inherited from `R~`.
    pub fn holds(&self) -> bool {
        self.conditions.c1
            && self.conditions.c2
            && (!self.c_inverse_c3 || self.conditions.c3)
            && (!self.r_inverse_c4 || self.conditions.c4)
    }
}

/// Evaluates the Moore–Penrose conditions of `R~ U C~` against `A`.
pub fn one_two_cur_check<F: Field>(
    inst: &CurInstance<F>,
    c_inv: &Matrix<F>,
    r_inv: &Matrix<F>,
) -> Result<OneTwoCurOutcome> {
    rank_hypothesis(inst, false)?;
    if !is_generalized_inverse(&inst.c, c_inv)? {
        return Err(Error::NotGeneralizedInverse("C~"));
    }
    if !is_generalized_inverse(&inst.r, r_inv)? {
        return Err(Error::NotGeneralizedInverse("R~"));
    }
    let candidate = &(r_inv * &inst.u) * c_inv;
    Ok(OneTwoCurOutcome {
        conditions: mp_conditions(&inst.a, &candidate)?,
        c_inverse_c3: mp_conditions(&inst.c, c_inv)?.c3,
        r_inverse_c4: mp_conditions(&inst.r, r_inv)?.c4,
    })
}

/// What happens to `C U~ R` when `U~` is replaced by a Drazin inverse with
/// `C = R = U = A`.
#[derive(Clone, Debug, PartialEq)]
pub struct DrazinCurCheck<F: Field> {
    pub a: Matrix<F>,
    pub drazin: DrazinInverse<F>,
    pub rank_u: usize,
    pub rank_a: usize,
    /// `A A^D A`
    pub reconstruction: Matrix<F>,
    pub reconstructs: bool,
}

pub fn drazin_cur_check<F: Field>(a: &Matrix<F>) -> Result<DrazinCurCheck<F>> {
    let drazin = drazin_inverse(a)?;
    let full_rows = IndexSet::full(a.rows());
    let full_cols = IndexSet::full(a.cols());
    let inst = extract(a, &full_rows, &full_cols)?;
    let reconstruction = reconstruct(&inst.c, &drazin.inverse, &inst.r)?;
    let reconstructs = product_matches(&reconstruction, a, &[a, &drazin.inverse, a]);
    Ok(DrazinCurCheck {
        a: a.clone(),
        rank_u: inst.u.rank(),
        rank_a: a.rank(),
        drazin,
        reconstruction,
        reconstructs,
    })
}

/// The nilpotent `[[0, 1], [0, 0]]` over the rationals: rank U equals rank A,
/// yet `A A^D A = 0`.
pub fn drazin_counterexample() -> DrazinCurCheck<Rationals> {
    let a = Matrix::from_i64(&Rationals, &[[0, 1], [0, 0]]);
    drazin_cur_check(&a).expect("square input")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{Complexes, PrimeField, Reals};
    use crate::geninv::{moore_penrose, sample_generalized_inverse};
    use crate::matrix::random_rank_matrix;

    fn gf(p: u32) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    fn set(ix: &[usize], bound: usize) -> IndexSet {
        IndexSet::new(ix.iter().copied(), bound).unwrap()
    }

    #[test]
    fn select_indices_examples() {
        let q = Rationals;
        let mut rng = seeded_rng(0);
        let (i, j) = select_indices(&Matrix::identity(&q, 3), &mut rng);
        assert_eq!((i.as_slice(), j.as_slice()), (&[1, 2, 3][..], &[1, 2, 3][..]));
        let (i, j) = select_indices(&Matrix::zeros(&q, 2, 3), &mut rng);
        assert!(i.is_empty() && j.is_empty());

        let f = gf(5);
        let a = Matrix::from_i64(&f, &[[1, 2, 3], [2, 4, 1], [3, 1, 0]]);
        let (i, j) = select_indices(&a, &mut rng);
        assert_eq!(a.submatrix(&i, &j).unwrap().rank(), 2);
        // brute force: some pair of 2-subsets works, and ours is one of them
        let good: Vec<_> = IndexSet::subsets(3)
            .filter(|s| s.len() == 2)
            .flat_map(|s| {
                IndexSet::subsets(3)
                    .filter(|t| t.len() == 2)
                    .map(move |t| (s.clone(), t))
            })
            .filter(|(s, t)| a.submatrix(s, t).unwrap().rank() == 2)
            .collect();
        assert!(good.contains(&(i, j)));
    }

    #[test]
    fn extract_examples() {
        let q = Rationals;
        let a = Matrix::from_i64(&q, &[[1, 2], [2, 4]]);
        let full = IndexSet::full(2);
        let inst = extract(&a, &full, &full).unwrap();
        assert!(inst.c == a && inst.u == a && inst.r == a);
        let one = set(&[1], 2);
        let inst = extract(&a, &one, &one).unwrap();
        assert_eq!(inst.c, Matrix::from_i64(&q, &[[1], [2]]));
        assert_eq!(inst.r, Matrix::from_i64(&q, &[[1, 2]]));
        assert_eq!(inst.u, Matrix::from_i64(&q, &[[1]]));
        assert_eq!(inst.c.select_rows(&one).unwrap(), inst.u);
        assert_eq!(inst.r.select_cols(&one).unwrap(), inst.u);
        assert!(extract(&a, &set(&[3], 3), &one).is_err());
    }

    #[test]
    fn reconstruct_examples() {
        let f = gf(5);
        let a = Matrix::from_i64(&f, &[[1, 2, 3], [2, 4, 1], [3, 1, 4]]);
        let one = set(&[1], 3);
        let inst = extract(&a, &one, &one).unwrap();
        assert_eq!(inst.u, Matrix::from_i64(&f, &[[1]]));
        assert_eq!(reconstruct(&inst.c, &Matrix::from_i64(&f, &[[1]]), &inst.r).unwrap(), a);

        let q = Rationals;
        let b = Matrix::from_i64(&q, &[[2, 1], [1, 1]]);
        assert_eq!(reconstruct(&b, &b.invert().unwrap(), &b).unwrap(), b);
        assert!(reconstruct(&b, &Matrix::zeros(&q, 3, 3), &b).is_err());

        let z = Matrix::zeros(&q, 3, 0);
        let e = Matrix::zeros(&q, 0, 0);
        let r = Matrix::zeros(&q, 0, 2);
        assert_eq!(reconstruct(&z, &e, &r).unwrap(), Matrix::zeros(&q, 3, 2));
    }

    #[test]
    fn rank_deficient_u_never_reconstructs() {
        // exhaustive over GF(2) 2x2 with every inverse of U
        let f = gf(2);
        for mask in 0u32..16 {
            let a = Matrix::from_fn(&f, 2, 2, |i, j| mask >> (2 * i + j) & 1);
            for rows in IndexSet::subsets(2).skip(1) {
                for cols in IndexSet::subsets(2).skip(1) {
                    let inst = extract(&a, &rows, &cols).unwrap();
                    if inst.u.rank() == a.rank() {
                        continue;
                    }
                    for ui in enumerate_generalized_inverses(&inst.u, 1 << 10).unwrap() {
                        assert_ne!(reconstruct(&inst.c, &ui, &inst.r).unwrap(), a);
                    }
                }
            }
        }
    }

    #[test]
    fn schur_examples() {
        let q = Rationals;
        let id = Matrix::identity(&q, 2);
        let one = set(&[1], 2);
        let parts = schur_parts(&id, &one, &one, &Matrix::from_i64(&q, &[[1]])).unwrap();
        assert_eq!(parts.complement, Matrix::from_i64(&q, &[[1]]));
        assert!(!parts.vanishes());

        let a = Matrix::from_i64(&q, &[[1, 1], [1, 1]]);
        let parts = schur_parts(&a, &one, &one, &Matrix::from_i64(&q, &[[1]])).unwrap();
        assert!(parts.vanishes());
        assert!(parts.complement.is_zero() && parts.left.is_zero() && parts.right.is_zero());
        assert_eq!(parts.blocks.b.shape(), (1, 1));
    }

    #[test]
    fn schur_residuals_vanish_on_rank_matching_gf2() {
        let f = gf(2);
        for mask in 0u32..512 {
            let a = Matrix::from_fn(&f, 3, 3, |i, j| mask >> (3 * i + j) & 1);
            let mut rng = seeded_rng(mask as u64);
            let (rows, cols) = select_indices(&a, &mut rng);
            let u = a.submatrix(&rows, &cols).unwrap();
            for ui in enumerate_generalized_inverses(&u, 1 << 10).unwrap() {
                let parts = schur_parts(&a, &rows, &cols, &ui).unwrap();
                assert!(parts.vanishes(), "{a}");
            }
        }
    }

    #[test]
    fn verify_cur_examples() {
        let q = Rationals;
        let id = Matrix::identity(&q, 2);
        let one = set(&[1], 2);
        let rep = verify_cur(&id, &one, &one, &Budget::default()).unwrap();
        assert_eq!(rep.conditions.values(), [false; 10]);
        assert!(rep.is_consistent());
        assert_eq!(rep.conditions.iv.mode, Mode::Sampled);

        let f = gf(5);
        let mut rng = seeded_rng(3);
        for _ in 0..30 {
            let a = random_rank_matrix(&f, 4, 5, 2, &mut rng, 100).unwrap();
            let (i, j) = select_indices(&a, &mut rng);
            let rep = verify_cur(&a, &i, &j, &Budget::default()).unwrap();
            assert!(rep.all_true(), "{rep:?}");
        }
        let c = Complexes::default();
        for _ in 0..30 {
            let a = random_rank_matrix(&c, 5, 4, 2, &mut rng, 100).unwrap();
            let (i, j) = select_indices(&a, &mut rng);
            let rep = verify_cur(&a, &i, &j, &Budget::default()).unwrap();
            assert!(rep.all_true(), "{rep:?}");
        }
    }

    #[test]
    fn verify_cur_zero_matrix_is_vacuous() {
        let f = gf(2);
        let a = Matrix::zeros(&f, 2, 2);
        let (i, j) = select_indices(&a, &mut seeded_rng(0));
        let rep = verify_cur(&a, &i, &j, &Budget::default()).unwrap();
        assert!(rep.all_true());
        assert_eq!(rep.conditions.vi.mode, Mode::Exhaustive);
    }

    #[test]
    fn report_json_shape() {
        let f = gf(2);
        let a = Matrix::from_i64(&f, &[[1, 0], [0, 1]]);
        let rep = verify_cur(&a, &set(&[1], 2), &set(&[1, 2], 2), &Budget::default()).unwrap();
        let v = serde_json::to_value(&rep).unwrap();
        assert_eq!(v["field"], "gf 2");
        assert_eq!(v["I"], serde_json::json!([1]));
        assert_eq!(v["conditions"]["i"]["mode"], "direct");
        assert_eq!(v["conditions"]["x"]["mode"], "exhaustive");
        assert_eq!(v["schema"], 1);
    }

    #[test]
    fn urac_identity_examples() {
        let q = Rationals;
        let a = Matrix::from_i64(&q, &[[2, 1], [1, 1]]);
        let ai = a.invert().unwrap();
        for rows in IndexSet::subsets(2) {
            for cols in IndexSet::subsets(2) {
                assert!(urac_identity_check(&a, &rows, &cols, &ai).unwrap());
            }
        }
        let id = Matrix::identity(&q, 2);
        let one = set(&[1], 2);
        let mut rng = seeded_rng(1);
        let ai = sample_generalized_inverse(&id, &mut rng);
        assert!(urac_identity_check(&id, &one, &one, &ai).unwrap());
        let r = Reals::default();
        let b = random_rank_matrix(&r, 4, 3, 2, &mut rng, 10).unwrap();
        let bi = sample_generalized_inverse(&b, &mut rng);
        assert!(urac_identity_check(&b, &set(&[2], 4), &set(&[1, 3], 3), &bi).unwrap());
        assert_eq!(
            urac_identity_check(&a, &one, &one, &Matrix::zeros(&q, 2, 2)),
            Err(Error::NotGeneralizedInverse("A~"))
        );
    }

    #[test]
    fn projection_identity_examples() {
        let q = Rationals;
        let a = Matrix::from_i64(&q, &[[2, 1], [1, 1]]);
        let full = IndexSet::full(2);
        let inst = extract(&a, &full, &full).unwrap();
        assert!(projection_identities(&inst, &Budget::default()).unwrap().all());

        let mut rng = seeded_rng(9);
        let c = Complexes::default();
        let z = random_rank_matrix(&c, 5, 4, 2, &mut rng, 10).unwrap();
        let (i, j) = select_indices(&z, &mut rng);
        let inst = extract(&z, &i, &j).unwrap();
        let p = projection_identities(&inst, &Budget::default()).unwrap();
        assert!(p.all());
        assert_eq!(p.cca.mode, Mode::Sampled);

        let id = Matrix::identity(&q, 2);
        let one = set(&[1], 2);
        let inst = extract(&id, &one, &one).unwrap();
        assert!(matches!(
            projection_identities(&inst, &Budget::default()),
            Err(Error::RankHypothesisViolated(_))
        ));
    }

    #[test]
    fn one_two_cur_examples() {
        let mut rng = seeded_rng(5);
        let r = Reals::default();
        for _ in 0..20 {
            let a = random_rank_matrix(&r, 5, 4, 2, &mut rng, 10).unwrap();
            let (i, j) = select_indices(&a, &mut rng);
            let inst = extract(&a, &i, &j).unwrap();
            let cp = moore_penrose(&inst.c).unwrap();
            let rp = moore_penrose(&inst.r).unwrap();
            let out = one_two_cur_check(&inst, &cp, &rp).unwrap();
            assert!(out.conditions.all() && out.holds());
            let rs = sample_generalized_inverse(&inst.r, &mut rng);
            let out = one_two_cur_check(&inst, &cp, &rs).unwrap();
            assert!(out.conditions.c1 && out.conditions.c2 && out.conditions.c3);
        }
        let f = gf(5);
        for _ in 0..100 {
            let a = random_rank_matrix(&f, 4, 4, 2, &mut rng, 100).unwrap();
            let (i, j) = select_indices(&a, &mut rng);
            let inst = extract(&a, &i, &j).unwrap();
            let ci = sample_generalized_inverse(&inst.c, &mut rng);
            let ri = sample_generalized_inverse(&inst.r, &mut rng);
            let out = one_two_cur_check(&inst, &ci, &ri).unwrap();
            assert!(out.conditions.c1 && out.conditions.c2 && out.holds());
        }
    }

    #[test]
    fn drazin_counterexample_reproduces() {
        let check = drazin_counterexample();
        assert_eq!(check.drazin.inverse, Matrix::zeros(&Rationals, 2, 2));
        assert_eq!(check.rank_u, check.rank_a);
        assert_eq!(check.reconstruction, Matrix::zeros(&Rationals, 2, 2));
        assert!(!check.reconstructs);

        let q = Rationals;
        let inv = drazin_cur_check(&Matrix::from_i64(&q, &[[2, 1], [1, 1]])).unwrap();
        assert!(inv.reconstructs);
        let d = Matrix::from_i64(&q, &[[1, 0], [0, 0]]);
        let check = drazin_cur_check(&d).unwrap();
        assert_eq!(check.drazin.inverse, d);
        assert!(check.reconstructs);
    }
}
