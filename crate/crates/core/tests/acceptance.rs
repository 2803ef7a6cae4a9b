//! End-to-end acceptance checks. Runs without the libtest harness so every
//! criterion prints one PASS/FAIL line; exits non-zero if any fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use pseudoskeleton::cur::{
    drazin_counterexample, extract, one_two_cur_check, select_indices, urac_identity_check, verify_cur, Budget, Mode,
};
use pseudoskeleton::geninv::{
    enumerate_generalized_inverses, moore_penrose, sample_generalized_inverse, satisfies_drazin_axioms,
    DEFAULT_ENUM_CAP,
};
use pseudoskeleton::io::{parse_matrix, parse_tensor};
use pseudoskeleton::matrix::random_rank_matrix;
use pseudoskeleton::tensor::{
    chidori_cur, chidori_instance, fiber_cur, fiber_instance, random_low_mlrank_tensor, reconstruct_tensor,
    select_chidori_indices, select_fiber_indices, Tensor,
};
use pseudoskeleton::tprod::{
    dft_faces, faces, from_faces, idft_into, select_tcur_indices, t_product, t_product_bcirc, verify_tcur,
};
use pseudoskeleton::{seeded_rng, Complexes, Field, IndexSet, Matrix, PrimeField, Rationals, Reals};
use rand::Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($msg)+));
        }
    };
}

fn within(start: Instant, limit: Duration, what: &str) -> Result<(), String> {
    let took = start.elapsed();
    ensure!(took <= limit, "{what} took {took:.1?}, limit {limit:?}");
    Ok(())
}

fn gf(p: u32) -> PrimeField {
    PrimeField::new(p).unwrap()
}

/// Plain mod-p matrices used as an oracle independent of the library.
type Raw = Vec<Vec<u32>>;

fn raw<F: Field<Elem = u32>>(m: &Matrix<F>) -> Raw {
    (0..m.rows()).map(|i| m.row(i).to_vec()).collect()
}

fn raw_mul(a: &Raw, b: &Raw, inner: usize, cols: usize, p: u32) -> Raw {
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| (0..inner).map(|k| row[k] * b[k][j]).sum::<u32>() % p)
                .collect()
        })
        .collect()
}

fn raw_rank(a: &Raw, cols: usize, p: u32) -> usize {
    let mut m = a.clone();
    let mut rank = 0;
    for c in 0..cols {
        let Some(piv) = (rank..m.len()).find(|&i| m[i][c] != 0) else {
            continue;
        };
        m.swap(rank, piv);
        let inv = (1..p).find(|x| x * m[rank][c] % p == 1).unwrap();
        let pivot_row: Vec<u32> = m[rank].iter().map(|v| v * inv % p).collect();
        for (i, row) in m.iter_mut().enumerate() {
            if i != rank && row[c] != 0 {
                let f = row[c];
                for (x, y) in row.iter_mut().zip(&pivot_row) {
                    *x = (*x + p * p - f * y) % p;
                }
            }
        }
        m[rank] = pivot_row;
        rank += 1;
    }
    rank
}

fn pick(m: &Raw, rows: &[usize], cols: &[usize]) -> Raw {
    rows.iter().map(|&i| cols.iter().map(|&j| m[i][j]).collect()).collect()
}

fn all_matrices(f: &PrimeField, m: usize, n: usize) -> impl Iterator<Item = Matrix<PrimeField>> + '_ {
    let p = f.order().unwrap();
    let total = p.pow((m * n) as u32);
    (0..total).map(move |mut code| {
        let data = (0..m * n)
            .map(|_| {
                let d = (code % p) as u32;
                code /= p;
                d
            })
            .collect();
        Matrix::new(f, m, n, data).unwrap()
    })
}

fn nonempty(bound: usize) -> impl Iterator<Item = IndexSet> {
    IndexSet::subsets(bound).filter(|s| !s.is_empty())
}

fn exhaustive_gf2_sweep() -> Outcome {
    let start = Instant::now();
    let f = gf(2);
    let budget = Budget {
        enum_cap: DEFAULT_ENUM_CAP,
        ..Budget::default()
    };
    let mut instances = 0usize;
    let mut reconstructing = 0usize;
    for m in 1..=3 {
        for n in 1..=3 {
            for a in all_matrices(&f, m, n) {
                let ra = raw(&a);
                let rank_a = raw_rank(&ra, n, 2);
                for rows in nonempty(m) {
                    for cols in nonempty(n) {
                        let rep = verify_cur(&a, &rows, &cols, &budget).map_err(|e| e.to_string())?;
                        let rank_u = raw_rank(&pick(&ra, &rows.zero_based(), &cols.zero_based()), cols.len(), 2);
                        let expected = rank_u == rank_a;
                        ensure!(
                            rep.ranks.a == rank_a && rep.ranks.u == rank_u,
                            "rank mismatch on {m}x{n} {a:?} I={rows} J={cols}"
                        );
                        ensure!(
                            rep.conditions.values().iter().all(|&v| v == expected),
                            "flags {:?} but rank U == rank A is {expected} for {a:?} I={rows} J={cols}",
                            rep.conditions.values()
                        );
                        let c = &rep.conditions;
                        let quantified = [c.iii, c.iv, c.v, c.vi, c.vii, c.viii, c.ix, c.x];
                        ensure!(
                            quantified.iter().all(|f| f.mode == Mode::Exhaustive),
                            "a quantified flag was sampled for {a:?} I={rows} J={cols}"
                        );
                        instances += 1;
                        reconstructing += usize::from(expected);
                    }
                }
            }
        }
    }
    within(start, Duration::from_secs(120), "sweep")?;
    Ok(format!(
        "{instances} instances, {reconstructing} with rank U = rank A, 0 violations"
    ))
}

fn urac_identity_gf2() -> Outcome {
    let start = Instant::now();
    let f = gf(2);
    let (m, n) = (2, 3);
    let mut checks = 0usize;
    for a in all_matrices(&f, m, n) {
        let ra = raw(&a);
        let rank = raw_rank(&ra, n, 2);
        let inverses: Vec<_> = enumerate_generalized_inverses(&a, DEFAULT_ENUM_CAP)
            .map_err(|e| e.to_string())?
            .collect();
        ensure!(
            inverses.len() == 1 << (m * n - rank * rank),
            "wrong inverse count for {a:?}"
        );
        for ai in &inverses {
            let rai = raw(ai);
            ensure!(
                raw_mul(&raw_mul(&ra, &rai, n, m, 2), &ra, m, n, 2) == ra,
                "{ai:?} is not an inverse of {a:?}"
            );
            for rows in IndexSet::subsets(m) {
                for cols in IndexSet::subsets(n) {
                    let (i, j) = (rows.zero_based(), cols.zero_based());
                    let r = pick(&ra, &i, &(0..n).collect::<Vec<_>>());
                    let c = pick(&ra, &(0..m).collect::<Vec<_>>(), &j);
                    let rac = raw_mul(&raw_mul(&r, &rai, n, m, 2), &c, m, j.len(), 2);
                    ensure!(
                        rac == pick(&ra, &i, &j),
                        "R A~ C != U for {a:?}, {ai:?}, I={rows} J={cols}"
                    );
                    ensure!(
                        urac_identity_check(&a, &rows, &cols, ai).map_err(|e| e.to_string())?,
                        "library rejects R A~ C = U for {a:?}, {ai:?}, I={rows} J={cols}"
                    );
                    checks += 1;
                }
            }
        }
    }
    within(start, Duration::from_secs(60), "identity check")?;
    Ok(format!("{checks} (A, A~, I, J) combinations, 0 violations"))
}

fn randomized_instance<F: Field>(f: &F, rng: &mut impl Rng, seed: u64) -> Result<(Matrix<F>, f64), String> {
    let m = rng.random_range(1..=6);
    let n = rng.random_range(1..=7);
    let r = rng.random_range(0..=3.min(m).min(n));
    let a = random_rank_matrix(f, m, n, r, rng, 100).map_err(|e| e.to_string())?;
    let (rows, cols) = select_indices(&a, rng);
    let budget = Budget {
        samples: 16,
        ..Budget::default()
    }
    .with_seed(seed);
    let rep = verify_cur(&a, &rows, &cols, &budget).map_err(|e| e.to_string())?;
    ensure!(rep.ranks.a == r, "generated rank {} instead of {r}", rep.ranks.a);
    ensure!(
        rep.all_true(),
        "flags {:?} on {m}x{n} rank {r} I={rows} J={cols}",
        rep.conditions.values()
    );
    let inst = extract(&a, &rows, &cols).map_err(|e| e.to_string())?;
    let ui = sample_generalized_inverse(&inst.u, rng);
    let rec = &(&inst.c * &ui) * &inst.r;
    Ok((a.clone(), rec.relative_error(&a)))
}

fn randomized_cur() -> Outcome {
    let start = Instant::now();
    let mut rng = seeded_rng(3);
    let mut worst = 0f64;
    for k in 0..500 {
        randomized_instance(&gf(5), &mut rng, k).map_err(|e| format!("GF(5) #{k}: {e}"))?;
        randomized_instance(&Rationals, &mut rng, k).map_err(|e| format!("Q #{k}: {e}"))?;
        let (_, err) = randomized_instance(&Complexes::default(), &mut rng, k).map_err(|e| format!("C #{k}: {e}"))?;
        ensure!(err <= 1e-8, "C #{k}: reconstruction error {err:e}");
        worst = worst.max(err);
    }
    within(start, Duration::from_secs(60), "randomized checks")?;
    Ok(format!(
        "3 x 500 instances all true, worst complex reconstruction {worst:.1e}"
    ))
}

/// Largest relative residual of the four Penrose equations for `x` against `a`.
fn penrose_residual(a: &Matrix<Reals>, x: &Matrix<Reals>) -> f64 {
    let ax = a * x;
    let xa = x * a;
    [
        (&ax * a).relative_error(a),
        (&xa * x).relative_error(x),
        ax.transpose().relative_error(&ax),
        xa.transpose().relative_error(&xa),
    ]
    .into_iter()
    .fold(0.0, f64::max)
}

fn one_two_inverse_real() -> Outcome {
    let f = Reals::default();
    let mut rng = seeded_rng(4);
    let mut worst = 0f64;
    let mut inherited = [0usize; 2];
    for k in 0..200 {
        let m = rng.random_range(1..=6);
        let n = rng.random_range(1..=7);
        let r = rng.random_range(1..=3.min(m).min(n));
        let a = random_rank_matrix(&f, m, n, r, &mut rng, 100).map_err(|e| e.to_string())?;
        let (rows, cols) = select_indices(&a, &mut rng);
        let inst = extract(&a, &rows, &cols).map_err(|e| e.to_string())?;
        let (cp, rp) = (moore_penrose(&inst.c).unwrap(), moore_penrose(&inst.r).unwrap());
        let x = &(&rp * &inst.u) * &cp;
        let res = penrose_residual(&a, &x);
        ensure!(res <= 1e-8, "#{k}: R+ U C+ has Penrose residual {res:e}");
        let mp = moore_penrose(&a).unwrap();
        ensure!(
            x.relative_error(&mp) <= 1e-8,
            "#{k}: R+ U C+ differs from the pseudoinverse"
        );
        worst = worst.max(res);

        let ci = sample_generalized_inverse(&inst.c, &mut rng);
        let ri = sample_generalized_inverse(&inst.r, &mut rng);
        for (cinv, rinv) in [(&ci, &ri), (&cp, &ri), (&ci, &rp)] {
            let out = one_two_cur_check(&inst, cinv, rinv).map_err(|e| e.to_string())?;
            ensure!(
                out.conditions.c1 && out.conditions.c2,
                "#{k}: R~ U C~ is not a {{1,2}}-inverse"
            );
            ensure!(
                !out.c_inverse_c3 || out.conditions.c3,
                "#{k}: condition 3 not inherited from C~"
            );
            ensure!(
                !out.r_inverse_c4 || out.conditions.c4,
                "#{k}: condition 4 not inherited from R~"
            );
            inherited[0] += usize::from(out.c_inverse_c3);
            inherited[1] += usize::from(out.r_inverse_c4);
        }
    }
    ensure!(
        inherited[0] >= 200 && inherited[1] >= 200,
        "inheritance hypotheses too rarely exercised: {inherited:?}"
    );
    Ok(format!(
        "200 instances, worst Penrose residual {worst:.1e}, c3/c4 inheritance exercised {}/{} times",
        inherited[0], inherited[1]
    ))
}

fn drazin_counterexample_check() -> Outcome {
    let q = Rationals;
    let check = drazin_counterexample();
    let a = Matrix::from_i64(&q, &[[0, 1], [0, 0]]);
    let zero = Matrix::zeros(&q, 2, 2);
    ensure!(check.a == a, "unexpected matrix");
    ensure!(
        check.drazin.inverse == zero,
        "A^D = {:?}, expected 0",
        check.drazin.inverse
    );
    let (x, k) = (&check.drazin.inverse, check.drazin.index);
    ensure!(k == 2, "index {k}, expected 2");
    // The axioms by hand: X A X = X, A X = X A, A^(k+1) X = A^k.
    let ak = (0..k).fold(Matrix::identity(&q, 2), |p, _| &p * &a);
    ensure!(
        &(x * &a) * x == *x && &a * x == x * &a && &(&ak * &a) * x == ak,
        "Drazin axioms fail"
    );
    ensure!(
        satisfies_drazin_axioms(&a, x, k).unwrap(),
        "library rejects its own Drazin inverse"
    );
    ensure!(
        check.rank_u == check.rank_a && check.rank_a == 1,
        "rank U = {}, rank A = {}",
        check.rank_u,
        check.rank_a
    );
    ensure!(
        check.reconstruction == zero && !check.reconstructs,
        "C A^D R should be 0"
    );
    Ok("A^D = 0 (index 2), rank U = rank A = 1, C A^D R = 0 != A".into())
}

fn census() -> Outcome {
    let mut shapes = 0;
    for (p, max) in [(2u32, 3usize), (3, 2)] {
        let f = gf(p);
        for m in 1..=max {
            for n in 1..=max {
                let candidates: Vec<Raw> = all_matrices(&f, n, m).map(|b| raw(&b)).collect();
                for a in all_matrices(&f, m, n) {
                    let ra = raw(&a);
                    let r = raw_rank(&ra, n, p);
                    let mut brute: Vec<&Raw> = candidates
                        .iter()
                        .filter(|b| raw_mul(&raw_mul(&ra, b, n, m, p), &ra, m, n, p) == ra)
                        .collect();
                    let mut listed: Vec<Raw> = enumerate_generalized_inverses(&a, DEFAULT_ENUM_CAP)
                        .map_err(|e| e.to_string())?
                        .map(|b| raw(&b))
                        .collect();
                    let formula = (p as usize).pow((m * n - r * r) as u32);
                    ensure!(
                        listed.len() == formula,
                        "GF({p}) {a:?}: {} listed, formula {formula}",
                        listed.len()
                    );
                    brute.sort();
                    listed.sort();
                    ensure!(
                        listed.iter().eq(brute.iter().copied()),
                        "GF({p}) {a:?}: enumeration differs from brute force"
                    );
                }
                shapes += 1;
            }
        }
    }
    Ok(format!("{shapes} shapes, every matrix matches brute force"))
}

fn gf7_tensors() -> Outcome {
    let start = Instant::now();
    let f = gf(7);
    let shape = [4, 5, 6];
    let mut rng = seeded_rng(7);
    let budget = |k: u64| Budget::default().with_seed(k);
    for k in 0..100u64 {
        let t = random_low_mlrank_tensor(&f, &shape, &[2, 2, 2], &mut rng).map_err(|e| e.to_string())?;
        ensure!(
            t.multilinear_rank().as_slice() == [2, 2, 2],
            "#{k}: generated {}",
            t.multilinear_rank()
        );

        let (rows, cols) = select_fiber_indices(&t, &mut rng);
        let rep = fiber_cur(&t, &rows, &cols, &budget(k)).map_err(|e| e.to_string())?;
        ensure!(
            rep.is_consistent() && rep.all_true(),
            "#{k}: fiber flags {:?}",
            rep.conditions.block()
        );
        let inst = fiber_instance(&t, &rows, &cols).map_err(|e| e.to_string())?;
        let inv: Vec<_> = inst.u.iter().map(|u| sample_generalized_inverse(u, &mut rng)).collect();
        ensure!(
            reconstruct_tensor(&inst.core, &inst.c, &inv).unwrap() == t,
            "#{k}: fiber CUR does not reconstruct"
        );

        let rows = select_chidori_indices(&t, &mut rng);
        let rep = chidori_cur(&t, &rows, &budget(k)).map_err(|e| e.to_string())?;
        ensure!(
            rep.is_consistent() && rep.all_true(),
            "#{k}: chidori flags {:?}",
            rep.conditions.block()
        );
        ensure!(
            rep.conditions.v.is_some_and(|v| v.value),
            "#{k}: chidori (v) fails in a rank-matching case"
        );
        let inst = chidori_instance(&t, &rows).map_err(|e| e.to_string())?;
        let inv: Vec<_> = inst.u.iter().map(|u| sample_generalized_inverse(u, &mut rng)).collect();
        ensure!(
            reconstruct_tensor(&inst.core, &inst.c, &inv).unwrap() == t,
            "#{k}: chidori CUR does not reconstruct"
        );

        // One index in the first mode cannot carry rank 2.
        let mode = (k % 3) as usize;
        let mut small = rows.clone();
        small[mode] = IndexSet::new([rows[mode].as_slice()[0]], shape[mode]).unwrap();
        let rep = chidori_cur(&t, &small, &budget(k)).map_err(|e| e.to_string())?;
        ensure!(rep.is_consistent(), "#{k}: undersized chidori report inconsistent");
        ensure!(
            rep.conditions.block() == [false; 4],
            "#{k}: undersized chidori flags {:?}",
            rep.conditions.block()
        );
        let (mut frows, mut fcols) = select_fiber_indices(&t, &mut rng);
        frows[mode] = IndexSet::new([frows[mode].as_slice()[0]], shape[mode]).unwrap();
        let bound = fcols[mode].bound();
        fcols[mode] = IndexSet::new([fcols[mode].as_slice()[0]], bound).unwrap();
        let rep = fiber_cur(&t, &frows, &fcols, &budget(k)).map_err(|e| e.to_string())?;
        ensure!(rep.is_consistent(), "#{k}: undersized fiber report inconsistent");
        ensure!(
            rep.conditions.block() == [false; 4],
            "#{k}: undersized fiber flags {:?}",
            rep.conditions.block()
        );
        let inst = fiber_instance(&t, &frows, &fcols).map_err(|e| e.to_string())?;
        let inv: Vec<_> = inst.u.iter().map(|u| sample_generalized_inverse(u, &mut rng)).collect();
        ensure!(
            reconstruct_tensor(&inst.core, &inst.c, &inv).unwrap() != t,
            "#{k}: undersized fiber CUR reconstructs"
        );
    }
    within(start, Duration::from_secs(120), "tensor checks")?;
    Ok("100 tensors reconstruct via fiber and chidori CUR, 200 undersized negatives fail".into())
}

/// `sum_j T_j S_{(k - j) mod l}` face by face.
fn convolution(t: &Tensor<Reals>, s: &Tensor<Reals>) -> Tensor<Reals> {
    let (tf, sf) = (faces(t).unwrap(), faces(s).unwrap());
    let l = tf.len();
    let out: Vec<Matrix<Reals>> = (0..l)
        .map(|k| {
            (0..l).fold(Matrix::zeros(t.field(), tf[0].rows(), sf[0].cols()), |acc, j| {
                &acc + &(&tf[j] * &sf[(k + l - j) % l])
            })
        })
        .collect();
    from_faces(t.field(), &out).unwrap()
}

fn t_product_checks() -> Outcome {
    let f = Reals::default();
    let mut rng = seeded_rng(8);
    let (mut worst_prod, mut worst_trip, mut worst_rec) = (0f64, 0f64, 0f64);
    for k in 0..100 {
        let (m, n, p) = (
            rng.random_range(1..=5),
            rng.random_range(1..=5),
            rng.random_range(1..=5),
        );
        let l = rng.random_range(1..=8);
        let t = Tensor::random(&f, &[m, n, l], &mut rng);
        let s = Tensor::random(&f, &[n, p, l], &mut rng);
        let fw = t_product(&t, &s).map_err(|e| e.to_string())?;
        let bc = t_product_bcirc(&t, &s).map_err(|e| e.to_string())?;
        let conv = convolution(&t, &s);
        let err = fw
            .relative_error(&bc)
            .max(fw.relative_error(&conv))
            .max(bc.relative_error(&conv));
        ensure!(err <= 1e-10, "#{k}: facewise and bcirc products differ by {err:e}");
        worst_prod = worst_prod.max(err);
        let back = idft_into(&dft_faces(&t).unwrap(), &f).map_err(|e| e.to_string())?;
        let trip = back.relative_error(&t);
        ensure!(trip <= 1e-12, "#{k}: DFT round trip error {trip:e}");
        worst_trip = worst_trip.max(trip);
    }
    for k in 0..100u64 {
        let (m, n) = (rng.random_range(2..=6), rng.random_range(2..=6));
        let l = rng.random_range(1..=8);
        let r = rng.random_range(1..=m.min(n));
        let x = Tensor::random(&f, &[m, r, l], &mut rng);
        let y = Tensor::random(&f, &[r, n, l], &mut rng);
        let t = t_product(&x, &y).unwrap();
        let (rows, cols) = select_tcur_indices(&t, &mut rng).map_err(|e| e.to_string())?;
        let rep = verify_tcur(&t, &rows, &cols, &Budget::default().with_seed(k)).map_err(|e| e.to_string())?;
        ensure!(
            rep.is_consistent() && rep.all_true(),
            "#{k}: t-CUR flags {:?}",
            rep.conditions.values()
        );
        ensure!(
            rep.reconstruction_error <= 1e-8,
            "#{k}: reconstruction error {:e}",
            rep.reconstruction_error
        );
        worst_rec = worst_rec.max(rep.reconstruction_error);
    }
    Ok(format!(
        "products agree to {worst_prod:.1e}, round trip {worst_trip:.1e}, t-CUR reconstruction {worst_rec:.1e}"
    ))
}

fn pskel(args: &[&str]) -> Result<(i32, Vec<u8>), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_pskel"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    Ok((out.status.code().unwrap_or(-1), out.stdout))
}

fn same_twice(args: &[&str]) -> Result<Vec<u8>, String> {
    let (c1, a) = pskel(args)?;
    let (c2, b) = pskel(args)?;
    ensure!(c1 == 0 && c2 == 0, "`pskel {}` exited {c1}, {c2}", args.join(" "));
    ensure!(a == b, "`pskel {}` is not byte-identical across runs", args.join(" "));
    Ok(a)
}

fn cli_determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = |name: &str| dir.path().join(name).to_string_lossy().into_owned();
    let read = |p: &str| std::fs::read_to_string(Path::new(p)).map_err(|e| e.to_string());
    let mut runs = 0;

    for (field, shape, rank) in [
        ("gf7", "5x6", 3usize),
        ("rational", "4x4", 2),
        ("complex", "6x5", 2),
        ("real", "3x7", 1),
    ] {
        let file = path(&format!("{field}.txt"));
        let gen = [
            "gen",
            "--field",
            field,
            "--shape",
            shape,
            "--rank",
            &rank.to_string(),
            "--seed",
            "11",
        ];
        let text = String::from_utf8(same_twice(&gen).map_err(|e| e.to_string())?).unwrap();
        std::fs::write(&file, &text).unwrap();
        let spec = pseudoskeleton::io::peek_field(&text).unwrap();
        let got = match spec {
            pseudoskeleton::FieldSpec::Prime(p) => parse_matrix(&gf(p), &text).unwrap().rank(),
            pseudoskeleton::FieldSpec::Rational => parse_matrix(&Rationals, &text).unwrap().rank(),
            pseudoskeleton::FieldSpec::Real { .. } => parse_matrix(&Reals::default(), &text).unwrap().rank(),
            pseudoskeleton::FieldSpec::Complex { .. } => parse_matrix(&Complexes::default(), &text).unwrap().rank(),
        };
        ensure!(got == rank, "{field}: generated rank {got}, declared {rank}");
        let json = same_twice(&["verify", "cur", &file, "--auto-indices", "--trials", "3", "--seed", "5"])?;
        let v: serde_json::Value = serde_json::from_slice(&json).map_err(|e| e.to_string())?;
        for trial in v["trials"].as_array().unwrap() {
            ensure!(
                trial["ranks"]["a"] == rank,
                "{field}: verify reports rank {}",
                trial["ranks"]["a"]
            );
        }
        runs += 3;
    }

    let file = path("t.txt");
    let gen = [
        "gen", "--field", "gf 7", "--shape", "4x5x6", "--mlrank", "2,3,2", "--seed", "2", "--out", &file,
    ];
    pskel(&gen)?;
    let first = read(&file)?;
    pskel(&gen)?;
    ensure!(read(&file)? == first, "tensor gen is not deterministic");
    ensure!(
        parse_tensor(&gf(7), &first).unwrap().multilinear_rank().as_slice() == [2, 3, 2],
        "tensor gen does not have the declared multilinear rank"
    );
    for kind in ["fiber", "chidori"] {
        let json = same_twice(&["verify", kind, &file, "--auto-indices", "--seed", "9"])?;
        let v: serde_json::Value = serde_json::from_slice(&json).unwrap();
        ensure!(
            v["mlrank"] == serde_json::json!([2, 3, 2]),
            "{kind}: verify reports {}",
            v["mlrank"]
        );
        runs += 1;
    }

    let file = path("tubal.txt");
    pskel(&[
        "gen",
        "--field",
        "real",
        "--shape",
        "5x4x6",
        "--tubal-rank",
        "2",
        "--seed",
        "4",
        "--out",
        &file,
    ])?;
    let json = same_twice(&["verify", "tcur", &file, "--auto-indices", "--seed", "1"])?;
    let v: serde_json::Value = serde_json::from_slice(&json).unwrap();
    ensure!(
        v["face_ranks"]["t"] == serde_json::json!(vec![2; 6]),
        "tcur face ranks {}",
        v["face_ranks"]["t"]
    );
    runs += 1;

    let file = path("g.txt");
    std::fs::write(&file, "field gf 3\n2 2\n1 2\n2 1\n").unwrap();
    let json = same_twice(&[
        "geninv",
        &file,
        "--enumerate",
        "--samples",
        "4",
        "--drazin",
        "--seed",
        "3",
    ])?;
    let v: serde_json::Value = serde_json::from_slice(&json).unwrap();
    ensure!(v["count"] == "27", "geninv count {}", v["count"]);
    runs += 1;

    Ok(format!(
        "{runs} verify reports byte-identical across runs, generated ranks preserved"
    ))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("exhaustive GF(2) CUR sweep", exhaustive_gf2_sweep),
        ("R A~ C = U over GF(2) 2x3", urac_identity_gf2),
        ("randomized CUR over GF(5), Q, C", randomized_cur),
        ("{1,2}-inverse R~ U C~ over R", one_two_inverse_real),
        ("Drazin counterexample", drazin_counterexample_check),
        ("generalized-inverse census", census),
        ("GF(7) fiber and chidori CUR", gf7_tensors),
        ("t-product and t-CUR", t_product_checks),
        ("CLI determinism and round trip", cli_determinism),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {} {name} ({secs:.1}s): {detail}", k + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {} {name} ({secs:.1}s): {why}", k + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
