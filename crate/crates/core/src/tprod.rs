//! The t-product of 3-mode tensors over the reals and complexes.
//!
//! A tensor `T` of shape `m x n x l` is viewed through its frontal faces
//! `T_1 .. T_l` (`T(:, :, k)`). Its block circulant `bcirc(T)` is the
//! `ml x nl` matrix whose block `(a, b)` is `T_{(a - b) mod l}`, and the
//! t-product is `unfold_vertical(T * S) = bcirc(T) * unfold_vertical(S)`.
//!
//! The facewise transform `T^_k = sum_j w^(kj) T_j` with `w = exp(-2 pi i / l)`
//! block-diagonalizes `bcirc(T)` under the unitary DFT, so products,
//! inverses and CUR checks all run face by face in the Fourier domain.

use std::f64::consts::PI;

use rand::{Rng, RngCore};
use serde::Serialize;

use crate::cur::{quantify, select_indices, Budget, Flag, Mode, SCHEMA_VERSION};
use crate::error::{shape_err, Error, Result};
use crate::field::{Complexes, Field, FieldSpec, Reals, C64};
use crate::geninv::{product_matches, sample_generalized_inverse};
use crate::matrix::{IndexSet, Matrix};
use crate::seeded_rng;
use crate::tensor::{MultilinearRank, Tensor};

/// Relative tolerance on spatial t-CUR reconstructions.
pub const RECONSTRUCTION_TOL: f64 = 1e-8;

/// Fields the t-product is defined over.
pub trait Spectral: Field {
    /// Whether elements are real, so transforms are conjugate symmetric.
    const REAL: bool;
    fn to_c64(&self, a: &Self::Elem) -> C64;
    /// Embeds a complex number; real fields keep the real part.
    #[allow(clippy::wrong_self_convention)]
    fn from_c64(&self, z: C64) -> Self::Elem;
}

impl Spectral for Reals {
    const REAL: bool = true;
    fn to_c64(&self, a: &f64) -> C64 {
        C64::new(*a, 0.0)
    }
    fn from_c64(&self, z: C64) -> f64 {
        z.re
    }
}

impl Spectral for Complexes {
    const REAL: bool = false;
    fn to_c64(&self, a: &C64) -> C64 {
        *a
    }
    fn from_c64(&self, z: C64) -> C64 {
        z
    }
}

fn check_order3<F: Field>(t: &Tensor<F>) -> Result<()> {
    if t.order() != 3 {
        return Err(shape_err(format!(
            "t-product needs a 3-mode tensor, got {} modes",
            t.order()
        )));
    }
    Ok(())
}

/// Frontal faces `T(:, :, k)`.
pub fn faces<F: Field>(t: &Tensor<F>) -> Result<Vec<Matrix<F>>> {
    check_order3(t)?;
    let (m, n, l) = (t.shape()[0], t.shape()[1], t.shape()[2]);
    Ok((0..l)
        .map(|k| Matrix::from_fn(t.field(), m, n, |i, j| t.get(&[i, j, k]).clone()))
        .collect())
}

/// Stacks equally sized faces into an `m x n x l` tensor.
pub fn from_faces<F: Field>(field: &F, faces: &[Matrix<F>]) -> Result<Tensor<F>> {
    let (m, n) = faces.first().map_or((0, 0), Matrix::shape);
    if faces.iter().any(|f| f.shape() != (m, n)) {
        return Err(shape_err("faces differ in shape"));
    }
    Ok(Tensor::from_fn(field, &[m, n, faces.len()], |idx| {
        faces[idx[2]].get(idx[0], idx[1]).clone()
    }))
}

/// The `ml x nl` block circulant matrix with first block column
/// `T_1, .., T_l`.
pub fn bcirc<F: Field>(t: &Tensor<F>) -> Result<Matrix<F>> {
    let fs = faces(t)?;
    let (m, n, l) = (t.shape()[0], t.shape()[1], t.shape()[2]);
    Ok(Matrix::from_fn(t.field(), m * l, n * l, |r, c| {
        let (a, b) = (r / m, c / n);
        fs[(a + l - b) % l].get(r % m, c % n).clone()
    }))
}

/// The faces stacked vertically, `ml x n`.
pub fn unfold_vertical<F: Field>(t: &Tensor<F>) -> Result<Matrix<F>> {
    check_order3(t)?;
    let m = t.shape()[0];
    Ok(Matrix::from_fn(t.field(), m * t.shape()[2], t.shape()[1], |r, c| {
        t.get(&[r % m, c, r / m]).clone()
    }))
}

/// Inverse of [`unfold_vertical`] for `l` faces.
pub fn fold_vertical<F: Field>(v: &Matrix<F>, l: usize) -> Result<Tensor<F>> {
    if l == 0 || !v.rows().is_multiple_of(l) {
        return Err(shape_err(format!("{} rows do not split into {l} faces", v.rows())));
    }
    let m = v.rows() / l;
    Ok(Tensor::from_fn(v.field(), &[m, v.cols(), l], |idx| {
        v.get(idx[2] * m + idx[0], idx[1]).clone()
    }))
}

/// Fourier-domain faces of a 3-mode tensor.
#[derive(Clone, Debug, PartialEq)]
pub struct FaceTransform {
    pub faces: Vec<Matrix<Complexes>>,
}

fn omega(l: usize, e: i64) -> C64 {
    C64::from_polar(1.0, -2.0 * PI * (e.rem_euclid(l as i64)) as f64 / l as f64)
}

fn complex_field(eps: f64) -> Complexes {
    Complexes::new(if eps > 0.0 { eps } else { crate::field::DEFAULT_EPS })
}

fn conj(m: &Matrix<Complexes>) -> Matrix<Complexes> {
    m.map_into(m.field(), |z| z.conj())
}

impl FaceTransform {
    pub fn len(&self) -> usize {
        self.faces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.faces.is_empty()
    }

    /// `diag(T^_1, .., T^_l)`.
    pub fn block_diagonal(&self) -> Matrix<Complexes> {
        let field = *self.faces[0].field();
        let (m, n) = self.faces[0].shape();
        let l = self.len();
        Matrix::from_fn(&field, m * l, n * l, |r, c| {
            if r / m == c / n {
                *self.faces[r / m].get(r % m, c % n)
            } else {
                C64::new(0.0, 0.0)
            }
        })
    }

    /// Largest relative violation of `T^_{l-k} = conj(T^_k)`.
    pub fn conjugate_symmetry_defect(&self) -> f64 {
        let l = self.len();
        let scale = self
            .faces
            .iter()
            .map(Matrix::frobenius_norm)
            .fold(0.0, f64::max)
            .max(f64::MIN_POSITIVE);
        (0..l)
            .map(|k| {
                let mirror = &self.faces[(l - k) % l];
                conj(&self.faces[k])
                    .try_sub(mirror)
                    .expect("faces conform")
                    .frobenius_norm()
                    / scale
            })
            .fold(0.0, f64::max)
    }

    /// Facewise products `T^_k S^_k`.
    pub fn facewise_mul(&self, other: &FaceTransform) -> Result<FaceTransform> {
        if self.len() != other.len() {
            return Err(shape_err("transforms have different face counts"));
        }
        let faces = self
            .faces
            .iter()
            .zip(&other.faces)
            .map(|(a, b)| a.matmul(b))
            .collect::<Result<_>>()?;
        Ok(FaceTransform { faces })
    }
}

/// Facewise DFT, `T^_k = sum_j w^(kj) T_j`.
pub fn dft_faces<F: Spectral>(t: &Tensor<F>) -> Result<FaceTransform> {
    let fs = faces(t)?;
    let field = complex_field(t.field().eps());
    let (m, n, l) = (t.shape()[0], t.shape()[1], t.shape()[2]);
    let lifted: Vec<Matrix<Complexes>> = fs.iter().map(|f| f.map_into(&field, |a| t.field().to_c64(a))).collect();
    let faces = (0..l)
        .map(|k| {
            Matrix::from_fn(&field, m, n, |i, j| {
                (0..l).map(|s| omega(l, (k * s) as i64) * lifted[s].get(i, j)).sum()
            })
        })
        .collect();
    Ok(FaceTransform { faces })
}

/// Inverse facewise DFT into complex faces.
pub fn idft_faces(ft: &FaceTransform) -> Result<Tensor<Complexes>> {
    let l = ft.len();
    if l == 0 {
        return Err(shape_err("no faces"));
    }
    let field = *ft.faces[0].field();
    let (m, n) = ft.faces[0].shape();
    let scale = 1.0 / l as f64;
    let out: Vec<Matrix<Complexes>> = (0..l)
        .map(|s| {
            Matrix::from_fn(&field, m, n, |i, j| {
                (0..l)
                    .map(|k| omega(l, -((k * s) as i64)) * ft.faces[k].get(i, j))
                    .sum::<C64>()
                    * scale
            })
        })
        .collect();
    from_faces(&field, &out)
}

/// Inverse DFT into `field`. Over the reals the transform must be conjugate
/// symmetric up to `field`'s tolerance; the vanishing imaginary parts are
/// dropped.
pub fn idft_into<F: Spectral>(ft: &FaceTransform, field: &F) -> Result<Tensor<F>> {
    if F::REAL {
        let defect = ft.conjugate_symmetry_defect();
        if defect > field.eps() {
            return Err(Error::NonConjugateSymmetric(defect));
        }
    }
    Ok(narrow(&idft_faces(ft)?, field))
}

/// `T * S` via the facewise transform.
pub fn t_product<F: Spectral>(t: &Tensor<F>, s: &Tensor<F>) -> Result<Tensor<F>> {
    check_conformable(t, s)?;
    let h = dft_faces(t)?.facewise_mul(&dft_faces(s)?)?;
    // The product of real tensors is real; only rounding sits in the
    // imaginary parts.
    Ok(narrow(&idft_faces(&h)?, t.field()))
}

fn narrow<F: Spectral>(t: &Tensor<Complexes>, field: &F) -> Tensor<F> {
    let data = t.data().iter().map(|z| field.from_c64(*z)).collect();
    Tensor::new(field, t.shape().to_vec(), data).expect("same length")
}

/// `T * S` as `bcirc(T) * unfold_vertical(S)`, folded back.
pub fn t_product_bcirc<F: Field>(t: &Tensor<F>, s: &Tensor<F>) -> Result<Tensor<F>> {
    check_conformable(t, s)?;
    fold_vertical(&bcirc(t)?.matmul(&unfold_vertical(s)?)?, t.shape()[2])
}

fn check_conformable<F: Field>(t: &Tensor<F>, s: &Tensor<F>) -> Result<()> {
    check_order3(t)?;
    check_order3(s)?;
    if t.shape()[1] != s.shape()[0] || t.shape()[2] != s.shape()[2] {
        return Err(shape_err(format!(
            "cannot t-multiply {:?} by {:?}",
            t.shape(),
            s.shape()
        )));
    }
    Ok(())
}

/// Identity on the first face, zero elsewhere.
pub fn t_identity<F: Field>(field: &F, n: usize, l: usize) -> Tensor<F> {
    Tensor::from_fn(field, &[n, n, l], |idx| {
        if idx[2] == 0 && idx[0] == idx[1] {
            field.one()
        } else {
            field.zero()
        }
    })
}

/// A random generalized inverse of every Fourier face. For real sources the
/// faces `k` and `l - k` get conjugate inverses and self-conjugate faces a
/// real one, so the spatial inverse is real.
pub fn sample_face_inverses<R: Rng + ?Sized>(ft: &FaceTransform, real: bool, rng: &mut R) -> FaceTransform {
    let l = ft.len();
    let mut out: Vec<Option<Matrix<Complexes>>> = vec![None; l];
    for k in 0..l {
        if out[k].is_some() {
            continue;
        }
        let inv = sample_generalized_inverse(&ft.faces[k], rng);
        let mirror = (l - k) % l;
        if real && mirror == k {
            // A real matrix A has A Re(B) A = Re(A B A) = A.
            out[k] = Some(inv.map_into(inv.field(), |z| C64::new(z.re, 0.0)));
        } else if real {
            out[mirror] = Some(conj(&inv));
            out[k] = Some(inv);
        } else {
            out[k] = Some(inv);
        }
    }
    FaceTransform {
        faces: out.into_iter().map(|f| f.expect("every face visited")).collect(),
    }
}

/// An inner inverse `T~` with `T * T~ * T = T`, built facewise.
pub fn t_generalized_inverse<F: Spectral, R: Rng + ?Sized>(t: &Tensor<F>, rng: &mut R) -> Result<Tensor<F>> {
    let ft = dft_faces(t)?;
    let inv = sample_face_inverses(&ft, F::REAL, rng);
    idft_into(&inv, t.field())
}

/// `I` and `J` whose Fourier faces of `U = T(I, J, :)` have full face rank:
/// `J` gathers pivot columns of every `T^_k`, `I` pivot rows of every
/// `T^_k(:, J)`.
pub fn select_tcur_indices<F: Spectral>(t: &Tensor<F>, rng: &mut dyn RngCore) -> Result<(IndexSet, IndexSet)> {
    let ft = dft_faces(t)?;
    let (m, n) = (t.shape()[0], t.shape()[1]);
    let mut cols = std::collections::BTreeSet::new();
    for f in &ft.faces {
        cols.extend(f.pivots_with(rng).cols);
    }
    let j = IndexSet::from_zero_based(cols, n)?;
    let mut rows = std::collections::BTreeSet::new();
    for f in &ft.faces {
        let c = f.select_cols(&j)?;
        rows.extend(select_indices(&c, rng).0.zero_based());
    }
    Ok((IndexSet::from_zero_based(rows, m)?, j))
}

/// Per-face ranks of `T`, `U`, `C` and `R`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FaceRanks {
    pub t: Vec<usize>,
    pub u: Vec<usize>,
    pub c: Vec<usize>,
    pub r: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct TcurConditions {
    pub i: Flag,
    pub ii: Flag,
    pub iii: Flag,
    pub iv: Flag,
    pub v: Flag,
    pub vi: Flag,
    pub vii: Flag,
    pub viii: Flag,
}

impl TcurConditions {
    pub fn values(&self) -> [bool; 8] {
        [
            self.i.value,
            self.ii.value,
            self.iii.value,
            self.iv.value,
            self.v.value,
            self.vi.value,
            self.vii.value,
            self.viii.value,
        ]
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TcurReport {
    pub schema: u32,
    pub kind: &'static str,
    pub field: FieldSpec,
    pub shape: [usize; 3],
    pub mlrank: MultilinearRank,
    /// Ranks of the Fourier faces; the rank conditions use these.
    pub face_ranks: FaceRanks,
    /// Ranks of the spatial faces, for diagnostics only.
    pub spatial_ranks: FaceRanks,
    #[serde(rename = "I")]
    pub rows: IndexSet,
    #[serde(rename = "J")]
    pub cols: IndexSet,
    pub conditions: TcurConditions,
    /// `|T - C * U~ * R|_F / |T|_F` in the spatial domain for the first
    /// sampled `U~`.
    pub reconstruction_error: f64,
    pub seed: u64,
    pub notes: Vec<String>,
}

impl TcurReport {
    pub fn is_consistent(&self) -> bool {
        let v = self.conditions.values();
        v.iter().all(|&b| b == v[0])
    }

    pub fn all_true(&self) -> bool {
        self.conditions.values().iter().all(|&b| b)
    }
}

fn face_ranks(ts: &[&[Matrix<Complexes>]; 4]) -> FaceRanks {
    let r = |fs: &[Matrix<Complexes>]| fs.iter().map(Matrix::rank).collect();
    FaceRanks {
        t: r(ts[0]),
        u: r(ts[1]),
        c: r(ts[2]),
        r: r(ts[3]),
    }
}

fn lifted_faces<F: Spectral>(t: &Tensor<F>) -> Result<Vec<Matrix<Complexes>>> {
    let field = complex_field(t.field().eps());
    Ok(faces(t)?
        .iter()
        .map(|f| f.map_into(&field, |a| t.field().to_c64(a)))
        .collect())
}

/// Evaluates the eight t-CUR conditions for `C = T(:, J, :)`,
/// `R = T(I, :, :)` and `U = T(I, J, :)`. Rank conditions compare Fourier
/// face ranks; equalities are checked face by face, which is equivalent to
/// the spatial identities.
pub fn verify_tcur<F: Spectral>(
    t: &Tensor<F>,
    rows: &IndexSet,
    cols: &IndexSet,
    budget: &Budget,
) -> Result<TcurReport> {
    check_order3(t)?;
    let (m, n, l) = (t.shape()[0], t.shape()[1], t.shape()[2]);
    if rows.bound() != m || cols.bound() != n {
        return Err(shape_err(format!(
            "index bounds ({}, {}) do not match {m}x{n} faces",
            rows.bound(),
            cols.bound()
        )));
    }
    let mut rng = seeded_rng(budget.seed);
    let all = |d| IndexSet::full(d);
    let c = t.subtensor(&[all(m), cols.clone(), all(l)])?;
    let r = t.subtensor(&[rows.clone(), all(n), all(l)])?;
    let u = t.subtensor(&[rows.clone(), cols.clone(), all(l)])?;
    let (th, ch, rh, uh) = (dft_faces(t)?, dft_faces(&c)?, dft_faces(&r)?, dft_faces(&u)?);
    let fr = face_ranks(&[&th.faces, &uh.faces, &ch.faces, &rh.faces]);
    let spatial = face_ranks(&[
        &lifted_faces(t)?,
        &lifted_faces(&u)?,
        &lifted_faces(&c)?,
        &lifted_faces(&r)?,
    ]);

    let i = Flag::direct(fr.u == fr.t);
    let ii = Flag::direct(fr.c == fr.t && fr.r == fr.t);

    let k = budget.samples.max(1);
    let u_invs: Vec<FaceTransform> = (0..k).map(|_| sample_face_inverses(&uh, F::REAL, &mut rng)).collect();
    let c_invs: Vec<FaceTransform> = (0..k).map(|_| sample_face_inverses(&ch, F::REAL, &mut rng)).collect();
    let r_invs: Vec<FaceTransform> = (0..k).map(|_| sample_face_inverses(&rh, F::REAL, &mut rng)).collect();

    let faces_idx = 0..l;
    let (iii, iv) = quantify(
        Mode::Sampled,
        u_invs.iter().map(|ui| {
            faces_idx.clone().all(|f| {
                let (cf, wf, rf) = (&ch.faces[f], &ui.faces[f], &rh.faces[f]);
                product_matches(&(&(cf * wf) * rf), &th.faces[f], &[cf, wf, rf])
            })
        }),
    );
    let (v, vi) = quantify(
        Mode::Sampled,
        c_invs.iter().zip(&r_invs).map(|(ci, ri)| {
            faces_idx.clone().all(|f| {
                let (cf, cif, tf, rif, rf) = (&ch.faces[f], &ci.faces[f], &th.faces[f], &ri.faces[f], &rh.faces[f]);
                let lhs = &(&(&(cf * cif) * tf) * rif) * rf;
                product_matches(&lhs, tf, &[cf, cif, tf, rif, rf])
            })
        }),
    );
    let (vii, viii) = quantify(
        Mode::Sampled,
        c_invs.iter().zip(&r_invs).map(|(ci, ri)| {
            faces_idx.clone().all(|f| {
                let (tf, rif, uf, cif) = (&th.faces[f], &ri.faces[f], &uh.faces[f], &ci.faces[f]);
                let w = &(rif * uf) * cif;
                let lhs = &(tf * &w) * tf;
                product_matches(&lhs, tf, &[tf, rif, uf, cif, tf])
            })
        }),
    );

    let u_inv = narrow(&idft_faces(&u_invs[0])?, t.field());
    let rec = t_product(&t_product(&c, &u_inv)?, &r)?;
    let reconstruction_error = rec.relative_error(t);

    let mut notes =
        vec!["rank conditions use Fourier face ranks; the multilinear-rank reading is not asserted".to_string()];
    if F::REAL {
        notes.push("inverses sampled conjugate symmetric, so they are real".to_string());
    }
    Ok(TcurReport {
        schema: SCHEMA_VERSION,
        kind: "tcur",
        field: t.field().spec(),
        shape: [m, n, l],
        mlrank: t.multilinear_rank(),
        face_ranks: fr,
        spatial_ranks: spatial,
        rows: rows.clone(),
        cols: cols.clone(),
        conditions: TcurConditions {
            i,
            ii,
            iii,
            iv,
            v,
            vi,
            vii,
            viii,
        },
        reconstruction_error,
        seed: budget.seed,
        notes,
    })
}
